//! Threshold crossings, pseudo-thresholds, suppression slopes and the
//! repetition-count bound for bare-ancilla measurements.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{wilson_interval, TrialBatch};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub p: f64,
    pub rate: f64,
    pub low: f64,
    pub high: f64,
    /// Zero when the point did not come from sampling.
    pub shots: u64,
}

impl RatePoint {
    /// A noiseless point, for synthetic curves.
    pub fn exact(p: f64, rate: f64) -> Self {
        Self {
            p,
            rate,
            low: rate,
            high: rate,
            shots: 0,
        }
    }
}

/// Logical failure rate against physical rate for one distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub d: usize,
    points: Vec<RatePoint>,
}

impl RateCurve {
    pub fn new(d: usize, mut points: Vec<RatePoint>) -> Result<Self> {
        if points.iter().any(|q| !(0.0..=1.0).contains(&q.rate) || q.p.is_nan() || q.p <= 0.0) {
            return Err(Error::InvalidParameter("rates must lie in [0, 1] and p > 0".into()));
        }
        points.sort_by(|a, b| a.p.total_cmp(&b.p));
        if points.windows(2).any(|w| w[0].p == w[1].p) {
            return Err(Error::InvalidParameter("duplicate p in curve".into()));
        }
        Ok(Self { d, points })
    }

    /// Synthetic curve `rate = f(p)` on a grid.
    pub fn from_fn(d: usize, grid: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(d, grid.iter().map(|&p| RatePoint::exact(p, f(p))).collect())
    }

    pub fn points(&self) -> &[RatePoint] {
        &self.points
    }

    /// Rate at `p` by log-log interpolation, `None` outside the grid or
    /// where a neighbouring rate is zero.
    fn log_rate_at(&self, p: f64) -> Option<f64> {
        let pts = &self.points;
        let k = pts.iter().position(|q| q.p >= p)?;
        if pts[k].p == p {
            return (pts[k].rate > 0.0).then(|| pts[k].rate.ln());
        }
        if k == 0 {
            return None;
        }
        let (a, b) = (&pts[k - 1], &pts[k]);
        if a.rate <= 0.0 || b.rate <= 0.0 {
            return None;
        }
        let t = (p.ln() - a.p.ln()) / (b.p.ln() - a.p.ln());
        Some(a.rate.ln() + t * (b.rate.ln() - a.rate.ln()))
    }

    /// Gnuplot-ready columns.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# p\trate\tci_low\tci_high\tshots\n");
        for q in &self.points {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", q.p, q.rate, q.low, q.high, q.shots);
        }
        out
    }
}

/// Zero of a piecewise-linear function of `ln p`, taken at the first strict
/// sign change of `diffs`.
fn first_sign_change(samples: &[(f64, f64)]) -> Option<f64> {
    let nz: Vec<(f64, f64)> = samples.iter().copied().filter(|&(_, v)| v != 0.0).collect();
    nz.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        (y0.signum() != y1.signum()).then(|| (x0 + (x1 - x0) * y0 / (y0 - y1)).exp())
    })
}

/// Where `a` and `b` swap order, from `ln rate_a - ln rate_b` interpolated
/// linearly in `ln p` over the union of both grids inside their overlap.
pub fn find_crossing(a: &RateCurve, b: &RateCurve) -> Option<f64> {
    let lo = a.points.first()?.p.max(b.points.first()?.p);
    let hi = a.points.last()?.p.min(b.points.last()?.p);
    let mut grid: Vec<f64> = a
        .points
        .iter()
        .chain(&b.points)
        .map(|q| q.p)
        .filter(|&p| p >= lo && p <= hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let samples: Vec<(f64, f64)> = grid
        .iter()
        .filter_map(|&p| Some((p.ln(), a.log_rate_at(p)? - b.log_rate_at(p)?)))
        .collect();
    first_sign_change(&samples)
}

/// Crossing with the unencoded line `rate = p`.
pub fn find_pseudothreshold(c: &RateCurve) -> Option<f64> {
    let samples: Vec<(f64, f64)> = c
        .points
        .iter()
        .filter(|q| q.rate > 0.0)
        .map(|q| (q.p.ln(), q.rate.ln() - q.p.ln()))
        .collect();
    first_sign_change(&samples)
}

/// Least-squares fit of `ln rate = slope * ln p + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope: from binomial variances when every point
    /// carries a shot count, otherwise from the residuals.
    pub stderr: f64,
    pub points: usize,
}

pub fn fit_suppression_slope(c: &RateCurve, p_range: (f64, f64)) -> Result<SlopeFit> {
    let pts: Vec<&RatePoint> = c
        .points
        .iter()
        .filter(|q| q.p >= p_range.0 && q.p <= p_range.1 && q.rate > 0.0)
        .collect();
    if pts.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "slope fit needs 3 points with nonzero rate in range, found {}",
            pts.len()
        )));
    }
    let sampled = pts.iter().all(|q| q.shots > 0);
    let weight = |q: &RatePoint| {
        if sampled {
            // Delta-method variance of ln(rate).
            q.shots as f64 * q.rate / (1.0 - q.rate).max(1e-12)
        } else {
            1.0
        }
    };
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for q in &pts {
        let (x, y, w) = (q.p.ln(), q.rate.ln(), weight(q));
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = sw * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(Error::InvalidParameter("degenerate p range".into()));
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / sw;
    let stderr = if sampled {
        (sw / det).sqrt()
    } else {
        let n = pts.len() as f64;
        let rss: f64 = pts
            .iter()
            .map(|q| (q.rate.ln() - slope * q.p.ln() - intercept).powi(2))
            .sum();
        (rss / (n - 2.0).max(1.0) * sw / det).sqrt()
    };
    Ok(SlopeFit {
        slope,
        intercept,
        stderr,
        points: pts.len(),
    })
}

/// Probability that one noisy bare-ancilla measurement of a weight-`w`
/// operator returns the right outcome when each coupling flips it with
/// probability `p_coupling`.
pub fn single_shot_success(w: usize, p_coupling: f64) -> f64 {
    (1.0 + (1.0 - 2.0 * p_coupling).powi(w as i32)) / 2.0
}

/// Smallest odd number of repetitions whose majority vote is right with
/// probability at least `confidence`, by the Hoeffding bound
/// `exp(-N b^2 / 2)` with bias `b = (1 - 2p/16)^w`.
pub fn shor_repetition_bound(w: usize, p: f64, confidence: f64) -> Result<u64> {
    if w == 0 {
        return Err(Error::InvalidParameter("operator weight must be >= 1".into()));
    }
    if !(0.0..0.5).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} leaves no bias")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParameter("confidence must lie in (0, 1)".into()));
    }
    if p == 0.0 {
        return Ok(1);
    }
    let p_coupling = p / 16.0;
    let b = (1.0 - 2.0 * p_coupling).powi(w as i32);
    let n = (2.0 * (1.0 / (1.0 - confidence)).ln() / (b * b)).ceil().max(1.0) as u64;
    Ok(if n.is_multiple_of(2) { n + 1 } else { n })
}

/// Identity of a ledger cell apart from `p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveKey {
    pub code: String,
    pub d: usize,
    pub strategy: String,
    pub rounds: usize,
    pub noise: String,
    pub decoder: String,
}

impl CurveKey {
    pub fn label(&self) -> String {
        format!(
            "{}_d{}_{}_r{}_{}_{}",
            self.code, self.d, self.strategy, self.rounds, self.noise, self.decoder
        )
    }
}

/// Pool ledger rows by cell and `p` into curves, in key order.
pub fn curves_from_ledger(rows: &[TrialBatch]) -> Result<Vec<(CurveKey, RateCurve)>> {
    let mut cells: BTreeMap<CurveKey, BTreeMap<u64, (f64, u64, u64)>> = BTreeMap::new();
    for r in rows {
        let key = CurveKey {
            code: r.code.clone(),
            d: r.d,
            strategy: r.strategy.clone(),
            rounds: r.rounds,
            noise: r.noise.to_string(),
            decoder: r.decoder.to_string(),
        };
        let e = cells.entry(key).or_default().entry(r.p.to_bits()).or_insert((r.p, 0, 0));
        e.1 += r.shots;
        e.2 += r.failures;
    }
    cells
        .into_iter()
        .map(|(key, by_p)| {
            let pts = by_p
                .into_values()
                .filter(|&(p, _, _)| p > 0.0)
                .map(|(p, shots, failures)| {
                    let est = wilson_interval(failures, shots)?;
                    Ok(RatePoint {
                        p,
                        rate: est.rate,
                        low: est.low,
                        high: est.high,
                        shots,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let d = key.d;
            Ok((key, RateCurve::new(d, pts)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub a: String,
    pub b: String,
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudothresholdRecord {
    pub curve: String,
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeRecord {
    pub curve: String,
    pub p_min: f64,
    pub p_max: f64,
    pub fit: Option<SlopeFit>,
}

/// Serialized as `{"crossings": [...], "pseudothresholds": [...], "slopes": [...]}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub crossings: Vec<CrossingRecord>,
    pub pseudothresholds: Vec<PseudothresholdRecord>,
    pub slopes: Vec<SlopeRecord>,
}

impl AnalysisReport {
    /// Every analysis over a set of curves: crossings between curves that
    /// differ only in distance, a pseudo-threshold per curve, and a slope
    /// per curve over `slope_range`.
    pub fn from_curves(curves: &[(CurveKey, RateCurve)], slope_range: (f64, f64)) -> Self {
        let mut report = AnalysisReport::default();
        for (i, (ka, a)) in curves.iter().enumerate() {
            for (kb, b) in &curves[i + 1..] {
                let rounds_match = ka.rounds == kb.rounds || (ka.rounds == ka.d && kb.rounds == kb.d);
                let same_family =
                    rounds_match && CurveKey { d: 0, rounds: 0, ..ka.clone() } == CurveKey { d: 0, rounds: 0, ..kb.clone() };
                if same_family && ka.d != kb.d {
                    report.crossings.push(CrossingRecord {
                        a: ka.label(),
                        b: kb.label(),
                        p: find_crossing(a, b),
                    });
                }
            }
            report.pseudothresholds.push(PseudothresholdRecord {
                curve: ka.label(),
                p: find_pseudothreshold(a),
            });
            report.slopes.push(SlopeRecord {
                curve: ka.label(),
                p_min: slope_range.0,
                p_max: slope_range.1,
                fit: fit_suppression_slope(a, slope_range).ok(),
            });
        }
        report
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Vec<f64> {
        (0..12).map(|i| 0.01 * 1.35f64.powi(i)).collect()
    }

    #[test]
    fn crossing_examples() {
        let g = grid();
        let a = RateCurve::from_fn(3, &g, |p| 0.01 * (p / 0.1).powi(2)).unwrap();
        let b = RateCurve::from_fn(5, &g, |p| 0.01 * (p / 0.1).powi(3)).unwrap();
        let x = find_crossing(&a, &b).unwrap();
        assert!((x - 0.1).abs() < 1e-9, "{x}");
        assert_eq!(find_crossing(&a, &a), None);
        let below = RateCurve::from_fn(5, &g, |p| p * p / 4.0).unwrap();
        let above = RateCurve::from_fn(3, &g, |p| p * p).unwrap();
        assert_eq!(find_crossing(&below, &above), None);
    }

    #[test]
    fn pseudothreshold_examples() {
        let g = grid();
        let sq = RateCurve::from_fn(3, &g, |p| p * p).unwrap();
        assert_eq!(find_pseudothreshold(&sq), None);
        let four = RateCurve::from_fn(3, &[0.05, 0.1, 0.2, 0.3, 0.4], |p| (4.0 * p * p).min(1.0)).unwrap();
        assert!((find_pseudothreshold(&four).unwrap() - 0.25).abs() < 1e-12);
        let high = RateCurve::from_fn(3, &g, |p| p.sqrt()).unwrap();
        assert_eq!(find_pseudothreshold(&high), None);
    }

    #[test]
    fn slope_examples() {
        let g = grid();
        let two = RateCurve::from_fn(3, &g, |p| p * p).unwrap();
        assert!((fit_suppression_slope(&two, (0.0, 1.0)).unwrap().slope - 2.0).abs() < 1e-9);
        let three = RateCurve::from_fn(3, &g, |p| 7.0 * p.powi(3)).unwrap();
        let f = fit_suppression_slope(&three, (0.0, 0.08)).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-9);
        assert!((f.intercept - 7f64.ln()).abs() < 1e-9);
        assert!(fit_suppression_slope(&two, (0.0, 0.015)).is_err());
    }

    /// Direct evaluation of the Hoeffding expression.
    fn oracle(w: usize, p_coupling: f64, conf: f64) -> u64 {
        let b = (1.0 - 2.0 * p_coupling).powi(w as i32);
        (1u64..).step_by(2).find(|&n| (-(n as f64) * b * b / 2.0).exp() <= 1.0 - conf).unwrap()
    }

    #[test]
    fn repetition_bound_examples() {
        assert_eq!(shor_repetition_bound(5, 0.0, 0.99).unwrap(), 1);
        assert!((single_shot_success(1, 0.01) - 0.99).abs() < 1e-15);
        let b = 0.98f64.powi(10);
        assert!((b - 0.817).abs() < 1e-3);
        let n = shor_repetition_bound(10, 0.16, 0.99).unwrap();
        assert_eq!(n, oracle(10, 0.01, 0.99));
        assert_eq!(n, 15);
        assert!(shor_repetition_bound(3, 0.5, 0.9).is_err());
        assert!(shor_repetition_bound(0, 0.1, 0.9).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = AnalysisReport::default();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert!(v["crossings"].is_array() && v["pseudothresholds"].is_array() && v["slopes"].is_array());
    }

    #[test]
    fn crossings_pair_distances_within_a_family() {
        let key = |d, rounds, decoder: &str| CurveKey {
            code: "surface".into(),
            d,
            strategy: "identity".into(),
            rounds,
            noise: "phenomenological".into(),
            decoder: decoder.into(),
        };
        let g = grid();
        let c = |d| RateCurve::from_fn(d, &g, |p| p * p).unwrap();
        let curves = vec![
            (key(3, 3, "mwe"), c(3)),
            (key(5, 5, "mwe"), c(5)),
            (key(5, 3, "mwe"), c(5)),
            (key(5, 5, "two_step"), c(5)),
        ];
        let r = AnalysisReport::from_curves(&curves, (0.0, 1.0));
        let pairs: Vec<(String, String)> = r.crossings.iter().map(|x| (x.a.clone(), x.b.clone())).collect();
        assert_eq!(
            pairs,
            vec![
                (key(3, 3, "mwe").label(), key(5, 5, "mwe").label()),
                (key(3, 3, "mwe").label(), key(5, 3, "mwe").label()),
            ]
        );
    }

    proptest! {
        #[test]
        fn crossing_is_symmetric(p0 in 0.02f64..0.2, k in 1.5f64..3.0, dk in 0.3f64..2.0) {
            let g = grid();
            let a = RateCurve::from_fn(3, &g, |p| 1e-6 * (p / p0).powf(k)).unwrap();
            let b = RateCurve::from_fn(5, &g, |p| 1e-6 * (p / p0).powf(k + dk)).unwrap();
            let x = find_crossing(&a, &b);
            prop_assert_eq!(x, find_crossing(&b, &a));
            prop_assert!((x.unwrap() - p0).abs() < 1e-9);
        }

        #[test]
        fn slope_recovers_exponent(k in 0.5f64..6.0, c in 0.01f64..10.0) {
            let g: Vec<f64> = (1..8).map(|i| i as f64 * 1e-3).collect();
            let curve = RateCurve::from_fn(3, &g, |p| c * p.powf(k)).unwrap();
            let f = fit_suppression_slope(&curve, (0.0, 1.0)).unwrap();
            prop_assert!((f.slope - k).abs() < 1e-9);
        }

        #[test]
        fn repetition_bound_is_monotone(w in 1usize..30, p in 0.0f64..0.45, dp in 0.0f64..0.04) {
            let n = shor_repetition_bound(w, p, 0.99).unwrap();
            prop_assert!(shor_repetition_bound(w + 1, p, 0.99).unwrap() >= n);
            prop_assert!(shor_repetition_bound(w, p + dp, 0.99).unwrap() >= n);
        }
    }
}
