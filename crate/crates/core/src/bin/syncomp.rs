use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use syncomp::circuits::OrderingRule;
use syncomp::compress::Strategy;
use syncomp::experiment::{
    classical_code, cmd_analyze, cmd_build, cmd_certify, cmd_compress, cmd_simulate, load_code, AnalysisTask,
    CertifyRequest, CheckName, CodeSpec, ExperimentConfig,
};
use syncomp::qcode::CssCode;
use syncomp::Error;

const PASS: u8 = 0;
const VIOLATED: u8 = 1;
const BUDGET: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "syncomp", version, about = "Compressed syndrome-measurement schedules")]
struct Cli {
    /// Worker threads for simulation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CodeArgs {
    /// Code file written by `build`.
    #[arg(long, conflicts_with = "code")]
    code_file: Option<PathBuf>,
    /// surface, tetrahedral, steane or concat.
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    levels: Option<usize>,
}

impl CodeArgs {
    fn spec(&self) -> Option<CodeSpec> {
        self.code.as_ref().map(|family| CodeSpec {
            family: family.clone(),
            d: self.d,
            base: self.base.clone(),
            levels: self.levels,
        })
    }

    fn load(&self) -> Result<Option<CssCode>, Error> {
        if let Some(path) = &self.code_file {
            return load_code(&fs::read_to_string(path)?).map(Some);
        }
        self.spec().map(|s| s.build()).transpose()
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a code file.
    Build {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a measurement schedule and print its accounting.
    Compress {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        strategy: Strategy,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Schedule JSON destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an exhaustive check.
    Certify {
        #[arg(long)]
        check: CheckName,
        #[command(flatten)]
        code: CodeArgs,
        /// Repeatable; defaults to every applicable strategy.
        #[arg(long)]
        strategy: Vec<Strategy>,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Classical family for classical_distance: bch or repetition.
        #[arg(long)]
        classical: Option<String>,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long, value_parser = OrderingRule::parse)]
        ordering: Option<OrderingRule>,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run a simulation grid from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Crossings, pseudothresholds and slopes from a ledger.
    Analyze {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long, default_value = "all")]
        task: AnalysisTask,
        #[arg(long, default_value_t = 1e-4)]
        slope_min: f64,
        #[arg(long, default_value_t = 1e-2)]
        slope_max: f64,
        /// Directory for report.json and per-curve TSV files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn code_required(code: &CodeArgs) -> Result<CssCode, Error> {
    code.load()?
        .ok_or_else(|| Error::InvalidParameter("pass --code or --code-file".into()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Build { code, out } => {
            let spec = code
                .spec()
                .ok_or_else(|| Error::InvalidParameter("build needs --code".into()))?;
            emit(out.as_deref(), &cmd_build(&spec)?)?;
        }
        Cmd::Compress {
            code,
            strategy,
            rounds,
            out,
        } => {
            let code = code_required(&code)?;
            let (schedule, _, table) = cmd_compress(&code, strategy, rounds)?;
            match out {
                Some(p) => {
                    fs::write(&p, schedule.to_json()?)?;
                    print!("{table}");
                }
                None => println!("{}", schedule.to_json()?),
            }
        }
        Cmd::Certify {
            check,
            code,
            strategy,
            rounds,
            classical,
            length,
            delta,
            ordering,
            budget,
            json,
        } => {
            let classical = match classical {
                Some(f) => {
                    let length = length.ok_or_else(|| Error::InvalidParameter("--length is required".into()))?;
                    Some(classical_code(&f, length, delta.unwrap_or(3))?)
                }
                None => None,
            };
            let report = cmd_certify(&CertifyRequest {
                check,
                code: code.load()?,
                strategies: strategy,
                rounds,
                classical,
                rule: ordering,
                budget,
            })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for l in &report.lines {
                    println!("{l}");
                }
                match &report.witness {
                    Some(w) => println!("FAIL witness: {w}"),
                    None => println!("PASS"),
                }
            }
            if !report.passed {
                return Ok(VIOLATED);
            }
        }
        Cmd::Simulate { config } => {
            let text = fs::read_to_string(&config)?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let rows = cmd_simulate(&cfg, base)?;
            let failures: u64 = rows.iter().map(|r| r.failures).sum();
            let shots: u64 = rows.iter().map(|r| r.shots).sum();
            println!(
                "{} batches, {shots} shots, {failures} failures -> {}",
                rows.len(),
                base.join(&cfg.output_dir).display()
            );
        }
        Cmd::Analyze {
            ledger,
            task,
            slope_min,
            slope_max,
            out,
        } => {
            let (report, tsv) = cmd_analyze(&ledger, task, (slope_min, slope_max))?;
            let json = report.to_json()?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    fs::write(dir.join("report.json"), &json)?;
                    for (label, body) in tsv {
                        fs::write(dir.join(format!("{label}.tsv")), body)?;
                    }
                    println!("{}", dir.display());
                }
                None => println!("{json}"),
            }
        }
    }
    Ok(PASS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => BUDGET,
                Error::DecodeFailure { .. } => VIOLATED,
                _ => USAGE,
            })
        }
    }
}
