//! Batch front end for `extkp-core`: coefficient tables, identity checks,
//! hierarchy flows and Pearcey comparisons, each as one reproducible command.

pub mod commands;
pub mod error;
pub mod formats;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use extkp_core::pearcey::Complex;

pub use crate::commands::run;
pub use crate::error::{exit, CliError};
pub use crate::report::{Format, Report, Status};

#[derive(Debug, Parser)]
#[command(
    name = "extkp",
    version,
    about = "String-equation series, identities, flows and Pearcey integrals"
)]
pub struct Cli {
    /// Output format; csv is only available for coefficient tables.
    #[arg(
        long,
        value_enum,
        env = "EXTKP_FORMAT",
        default_value = "pretty",
        global = true
    )]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    A,
    D,
}

impl From<WhichArg> for extkp_core::Which {
    fn from(w: WhichArg) -> Self {
        match w {
            WhichArg::A => extkp_core::Which::A,
            WhichArg::D => extkp_core::Which::D,
        }
    }
}

fn parse_r(s: &str) -> Result<u32, String> {
    let r: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if r < 2 {
        return Err("r must be at least 2".into());
    }
    Ok(r)
}

/// `re,im` (or just `re`).
pub fn parse_complex(s: &str) -> Result<Complex, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| format!("bad real part in {s:?}"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| format!("bad imaginary part in {s:?}"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(format!("z must be finite, got {s:?}"));
    }
    Ok(Complex::new(re, im))
}

#[derive(Clone, Debug, Args)]
pub struct RArg {
    #[arg(long, value_parser = parse_r)]
    pub r: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Block coefficients a_1..a_K and/or d_1..d_K as exact rationals.
    Coeffs {
        #[command(flatten)]
        r: RArg,
        /// Series to print; both when omitted.
        #[arg(long, value_enum)]
        which: Option<WhichArg>,
        #[arg(long)]
        order: usize,
    },
    /// Run one identity suite; exit 0 iff every check passes.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// The flow d u_alpha / d t_m as differential polynomials.
    Flow {
        #[command(flatten)]
        r: RArg,
        #[arg(long)]
        m: u32,
    },
    /// Compare the quadrature of A or D with its K-term asymptotic series.
    Pearcey {
        #[command(flatten)]
        r: RArg,
        #[arg(long, value_enum)]
        which: WhichArg,
        /// Evaluation point as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex,
        #[arg(long)]
        terms: usize,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        /// Initial Gauss nodes per half-path (doubled until the tolerance is met).
        #[arg(long, default_value_t = 128)]
        nodes: usize,
        /// Radius of the detour around w = 0 for D; negative passes on the far side.
        #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
        detour: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    /// Res S*^m a(omega z) S^n a(z) = 0 for 0 <= m, n <= max.
    Ortho {
        #[command(flatten)]
        r: RArg,
        #[arg(long)]
        max: usize,
        /// Blocks of a(z) to use; the smallest sufficient order when omitted.
        #[arg(long)]
        order: Option<usize>,
    },
    /// The bilinear concomitant equals (-1)^(r-1) r z^(r-1).
    Concomitant {
        #[command(flatten)]
        r: RArg,
        #[arg(long)]
        order: usize,
    },
    /// Psi(x; t_>=2 = 0) has Taylor coefficients (1, 0, .., 0) up to x^n.
    PsiInit {
        #[command(flatten)]
        r: RArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        order: Option<usize>,
    },
    /// The defining equations of a(z) and d(z) hold on every retained order.
    OdeResidual {
        #[command(flatten)]
        r: RArg,
        #[arg(long)]
        order: usize,
    },
    /// The flows t_m and t_n commute; all pairs up to --max when m, n are omitted.
    FlowCommute {
        #[command(flatten)]
        r: RArg,
        #[arg(long, requires = "n")]
        m: Option<u32>,
        #[arg(long, requires = "m")]
        n: Option<u32>,
        #[arg(long, default_value_t = 5)]
        max: u32,
    },
}
