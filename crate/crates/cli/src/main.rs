//! `refyoung`: verify refined Young inequalities and their operator and
//! Hilbert–Schmidt versions, evaluate single instances, and sweep grids.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use refyoung_core::hs::HsSign;
use refyoung_core::scalar::DEPTH_CAP;
use refyoung_core::{Reading, Tolerance};

mod eval;
mod grid;
mod output;
mod verify;

#[derive(Parser, Debug)]
#[command(
    name = "refyoung",
    version,
    about = "Verify refined Young inequalities for scalars, operators and Hilbert-Schmidt norms"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Seed for instance generation.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Relative slack tolerance.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_RELATIVE)]
    pub tol: f64,

    /// Absolute slack tolerance added to the relative one.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub abs_tol: f64,

    /// Output format; table values are rounded to 12 significant digits.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write records (verify) or rows (eval, sweep) here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Sign of the νXB term in the Hilbert-Schmidt chains.
    #[arg(long, global = true, value_enum, default_value_t = SignArg::Plus)]
    pub hs_sign: SignArg,

    /// Largest refinement depth; deeper requests are clamped.
    #[arg(long, global = true, default_value_t = DEPTH_CAP)]
    pub depth_cap: usize,

    /// Evaluate the forms as printed in the literature instead of the ones
    /// the derivations support (several of them fail).
    #[arg(long, global = true, value_enum, default_value_t = ReadingArg::Proof)]
    pub reading: ReadingArg,
}

impl Opts {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            relative: self.tol,
            absolute: self.abs_tol,
        }
    }

    pub fn sign(&self) -> HsSign {
        match self.hs_sign {
            SignArg::Plus => HsSign::Plus,
            SignArg::Minus => HsSign::Minus,
        }
    }

    pub fn reading(&self) -> Reading {
        match self.reading {
            ReadingArg::Proof => Reading::Proof,
            ReadingArg::Displayed => Reading::Displayed,
        }
    }

    /// Applies the depth cap, with a warning when it bites.
    pub fn depth(&self, n: usize) -> usize {
        if n > self.depth_cap {
            log::warn!("depth {n} exceeds --depth-cap {}; clamped", self.depth_cap);
            self.depth_cap
        } else {
            n
        }
    }

    fn validate(&self) -> Result<(), Failure> {
        if !(self.tol >= 0.0 && self.tol.is_finite()) || !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(Failure::Usage("tolerances must be finite and nonnegative".into()));
        }
        if self.depth_cap == 0 || self.depth_cap > DEPTH_CAP {
            return Err(Failure::Usage(format!("--depth-cap must be in 1..={DEPTH_CAP}")));
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReadingArg {
    Proof,
    Displayed,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the seeded slack sweep over every inequality family.
    Verify(verify::VerifyArgs),
    /// Evaluate one scalar instance `a b nu n`, or matrix fixtures.
    Eval(eval::EvalArgs),
    /// Tabulate slack and tightness over a (nu, h, n) grid.
    Sweep(grid::SweepArgs),
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Exit code 1.
    Violated,
    /// Exit code 2.
    Usage(String),
    /// A numerical failure not caused by the input; exit code 1.
    Numeric(String),
}

impl From<refyoung_core::Error> for Failure {
    fn from(e: refyoung_core::Error) -> Self {
        if e.is_input_error() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = cli.opts.validate().and_then(|()| match &cli.command {
        Command::Verify(args) => verify::run(&cli.opts, args),
        Command::Eval(args) => eval::run(&cli.opts, args),
        Command::Sweep(args) => grid::run(&cli.opts, args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violated) => ExitCode::from(1),
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
