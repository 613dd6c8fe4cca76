use crate::error::{Error, Result};

/// One primitive polynomial per extension degree, bit `i` holding the
/// coefficient of `x^i`. Minimal-weight choices (trinomials where one exists).
const PRIMITIVE_POLYS: [(u32, u32); 15] = [
    (2, 0x7),      // x^2 + x + 1
    (3, 0xB),      // x^3 + x + 1
    (4, 0x13),     // x^4 + x + 1
    (5, 0x25),     // x^5 + x^2 + 1
    (6, 0x43),     // x^6 + x + 1
    (7, 0x83),     // x^7 + x + 1
    (8, 0x11D),    // x^8 + x^4 + x^3 + x^2 + 1
    (9, 0x211),    // x^9 + x^4 + 1
    (10, 0x409),   // x^10 + x^3 + 1
    (11, 0x805),   // x^11 + x^2 + 1
    (12, 0x1053),  // x^12 + x^6 + x^4 + x + 1
    (13, 0x201B),  // x^13 + x^4 + x^3 + x + 1
    (14, 0x4443),  // x^14 + x^10 + x^6 + x + 1
    (15, 0x8003),  // x^15 + x + 1
    (16, 0x1100B), // x^16 + x^12 + x^3 + x + 1
];

/// Built-in primitive polynomial for `GF(2^m)`, `m` in `2..=16`.
pub fn primitive_poly(m: u32) -> Option<u32> {
    PRIMITIVE_POLYS
        .iter()
        .find(|(deg, _)| *deg == m)
        .map(|&(_, p)| p)
}

/// `GF(2^m)` with elements as `m`-bit integers in the polynomial basis and
/// exp/log tables over the primitive element `alpha = x`.
#[derive(Clone, Debug)]
pub struct Gf2mField {
    m: u32,
    poly: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Gf2mField {
    pub fn new(m: u32) -> Result<Self> {
        let poly = primitive_poly(m)
            .ok_or_else(|| Error::InvalidParameter(format!("no built-in polynomial for m={m}")))?;
        Self::with_poly(m, poly)
    }

    /// Build from an explicit polynomial; rejects polynomials for which `x`
    /// does not have multiplicative order `2^m - 1`.
    pub fn with_poly(m: u32, poly: u32) -> Result<Self> {
        if !(1..=20).contains(&m) || poly >> m != 1 {
            return Err(Error::InvalidParameter(format!(
                "polynomial {poly:#x} is not of degree {m}"
            )));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u32; order];
        let mut log = vec![u32::MAX; order + 1];
        let mut x = 1u32;
        for (i, e) in exp.iter_mut().enumerate() {
            if log[x as usize] != u32::MAX {
                return Err(Error::InvalidParameter(format!(
                    "polynomial {poly:#x} is not primitive"
                )));
            }
            *e = x;
            log[x as usize] = i as u32;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::InvalidParameter(format!(
                "polynomial {poly:#x} is not primitive"
            )));
        }
        Ok(Self { m, poly, exp, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Multiplicative group order `2^m - 1`.
    pub fn order(&self) -> usize {
        self.exp.len()
    }

    /// `alpha^i`, exponent taken modulo the group order.
    pub fn power(&self, i: i64) -> u32 {
        let n = self.order() as i64;
        self.exp[i.rem_euclid(n) as usize]
    }

    /// Discrete log of a nonzero element.
    pub fn log(&self, a: u32) -> Option<usize> {
        match self.log.get(a as usize) {
            Some(&l) if a != 0 && l != u32::MAX => Some(l as usize),
            _ => None,
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.exp[s % self.order()]
    }
}
