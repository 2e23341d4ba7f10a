//! Command-line front end: `blocks`, `spectrum`, `wavefunction`, `verify`.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::models::{
    block_for, decay_radius, permissible_blocks, radial_profile, solve_block, BlockSpec, BlockSpectrum, Case, Example,
    ModelConfig,
};
use crate::precision::PrecisionPolicy;
use crate::report::{profile_csv, SpectrumReport};
use crate::verify::{self, Fault, Level, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAMETER: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_SELECTION: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "heun-spectra", version, about = "Bound-state spectra of two planar magnetic systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List permissible (n, l, sigma) blocks.
    Blocks {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Solve every permissible block up to --n-max.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Worker threads for independent blocks.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Sample one bound state on a uniform radial grid.
    Wavefunction {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        l: Option<i64>,
        /// Root index in ascending energy among all real roots.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        rho_max: Option<f64>,
        /// Scale so that the integral of |psi|^2 over the plane is one.
        #[arg(long)]
        normalize: bool,
    },
    /// Run the self-check suite.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// 1: repulsive polynomial system, 2: non-rational system.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub example: u8,
    #[arg(long = "case", value_enum)]
    pub case: CaseArg,
    #[arg(long, allow_negative_numbers = true)]
    pub k: i64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    A,
    B,
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    Sequences,
}

impl ModelArgs {
    pub fn config(&self) -> Result<ModelConfig, Error> {
        let example = if self.example == 1 { Example::RepulsivePolynomial } else { Example::NonRational };
        let case = match self.case {
            CaseArg::A => Case::A,
            CaseArg::B => Case::B,
            CaseArg::First => Case::First,
            CaseArg::Second => Case::Second,
        };
        ModelConfig::new(example, case, self.k, self.epsilon)
    }
}

/// Process exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) | Error::Constraint(_) | Error::Domain(_) => EXIT_PARAMETER,
        Error::NotPhysical(_) => EXIT_SELECTION,
        Error::PrecisionFailure { .. }
        | Error::ResidualTooLarge { .. }
        | Error::RecurrenceBreakdown { .. }
        | Error::DegeneratePolynomial(_) => EXIT_PRECISION,
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn failure(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAMETER } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| failure(1, e.to_string());
    match command {
        Command::Blocks { model, n_max, format } => {
            let cfg = model.config()?;
            let blocks = permissible_blocks(&cfg, *n_max)?;
            for d in cfg.diagnostics() {
                writeln!(err, "note: {d}").map_err(io)?;
            }
            match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Listing<'a> {
                        example: u8,
                        case: &'a str,
                        k: i64,
                        blocks: Vec<Row>,
                    }
                    #[derive(Serialize)]
                    struct Row {
                        n: usize,
                        l: i64,
                        sigma: i32,
                    }
                    let listing = Listing {
                        example: cfg.example.number(),
                        case: cfg.case.label(),
                        k: cfg.k,
                        blocks: blocks.iter().map(|b| Row { n: b.n, l: b.l, sigma: b.sigma }).collect(),
                    };
                    writeln!(out, "{}", serde_json::to_string_pretty(&listing).expect("plain data")).map_err(io)?;
                }
                Format::Csv => {
                    writeln!(out, "n,l,sigma").map_err(io)?;
                    for b in &blocks {
                        writeln!(out, "{},{},{}", b.n, b.l, b.sigma).map_err(io)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Spectrum { model, n_max, format, jobs } => {
            let cfg = model.config()?;
            let policy = PrecisionPolicy::from_env().map_err(|m| failure(EXIT_PARAMETER, m))?;
            for d in cfg.diagnostics() {
                writeln!(err, "note: {d}").map_err(io)?;
            }
            let blocks = permissible_blocks(&cfg, *n_max)?;
            let spectra = solve_all(&cfg, &blocks, policy, *jobs)?;
            for w in spectra.iter().flat_map(|s| &s.warnings) {
                writeln!(err, "warning: {w}").map_err(io)?;
            }
            let report = SpectrumReport::new(&cfg, &spectra);
            match format {
                Format::Json => writeln!(out, "{}", report.to_json().expect("report serializes")).map_err(io)?,
                Format::Csv => write!(out, "{}", report.to_csv()).map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Wavefunction { model, n, l, index, phi, samples, rho_max, normalize } => {
            let cfg = model.config()?;
            let policy = PrecisionPolicy::from_env().map_err(|m| failure(EXIT_PARAMETER, m))?;
            let block = block_for(&cfg, *n, *l)?;
            let sol = solve_block(&cfg, &block, policy)?;
            let root = sol.roots.get(*index).ok_or_else(|| {
                failure(EXIT_SELECTION, format!("block {block} has {} real roots; index {index} out of range", sol.roots.len()))
            })?;
            if !root.physical {
                return Err(failure(
                    EXIT_SELECTION,
                    format!("root {index} of block {block} (value {}) is not a bound state", root.value),
                ));
            }
            let rho_max = match rho_max {
                Some(r) => *r,
                None => default_rho_max(&cfg, &block, root.value, &sol),
            };
            let profile = radial_profile(&cfg, &block, root, rho_max, *samples)?;
            let scale = if *normalize { 1.0 / (2.0 * std::f64::consts::PI * profile.norm).sqrt() } else { 1.0 };
            write!(out, "{}", profile_csv(&profile, *phi, block.angular_number(), scale)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Verify { level, inject_fault } => {
            let options = VerifyOptions {
                level: if *level == LevelArg::Full { Level::Full } else { Level::Quick },
                fault: inject_fault.map(|FaultArg::Sequences| Fault::Sequences),
                ..Default::default()
            };
            let report = verify::run(&options);
            for c in &report.checks {
                writeln!(out, "{c}").map_err(io)?;
            }
            if report.passed() {
                writeln!(out, "all {} checks passed", report.checks.len()).map_err(io)?;
                Ok(EXIT_OK)
            } else {
                let names: Vec<_> = report.failures().map(|c| c.name).collect();
                Err(failure(EXIT_VERIFICATION, format!("verification failed: {}", names.join(", "))))
            }
        }
    }
}

fn default_rho_max(cfg: &ModelConfig, block: &BlockSpec, value: f64, sol: &BlockSpectrum) -> f64 {
    match cfg.example {
        Example::RepulsivePolynomial => 5.0,
        Example::NonRational => {
            let root = sol.roots.iter().find(|r| r.value == value).expect("root from this block");
            0.5 * decay_radius(cfg, block, root)
        }
    }
}

/// Solves blocks on up to `jobs` threads; output order follows `blocks`.
fn solve_all(cfg: &ModelConfig, blocks: &[BlockSpec], policy: PrecisionPolicy, jobs: usize) -> Result<Vec<BlockSpectrum>, Error> {
    let jobs = jobs.clamp(1, blocks.len().max(1));
    if jobs == 1 {
        return blocks.iter().map(|b| solve_block(cfg, b, policy)).collect();
    }
    let chunk = blocks.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = blocks
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|b| solve_block(cfg, b, policy)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("solver thread panicked"))
            .collect()
    })
}
