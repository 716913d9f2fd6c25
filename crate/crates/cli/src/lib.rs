//! Command-line front end for `fermat-core`.
//!
//! [`run`] parses arguments, dispatches to the library and returns the exit
//! code together with the text written to stdout and stderr, so the binary
//! and the tests share one code path.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse error, 3 mathematical
//! domain error (including a failing `verify` check).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand};
use fermat_core::constants::{
    self, family_conductor, find_alpha, homogeneous_certificate, kernel_up_to_degree,
    ConstantsError,
};
use fermat_core::derivation::{generator_dij, generator_epsilon, Derivation, DerivationError};
use fermat_core::field::{CycloNum, FieldSpec};
use fermat_core::linearder::{
    linear_derivation_space, Classification, LinearDerivation, LinearError,
};
use fermat_core::parse::{self, ParseError, ParseErrorKind};
use fermat_core::ring::RingSpec;

pub mod random;
pub mod suite;

pub const DEFAULT_RING: &str = "n=3;m=2,2,2;field=4";

#[derive(Debug, Parser)]
#[command(
    name = "fermat",
    version,
    about = "Derivations of Fermat rings over cyclotomic fields"
)]
struct Cli {
    /// Ring as `n=<n>;m=<m1,..,mn>;field=<k>`.
    #[arg(long, global = true, default_value = DEFAULT_RING)]
    ring: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["matrix", "images"])))]
struct DerivationArgs {
    /// Associated matrix, rows separated by `;`, entries by `,`.
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    /// Images `d(x1)=<expr>; ...`.
    #[arg(long, allow_hyphen_values = true)]
    images: Option<String>,
}

#[derive(Debug, Args)]
struct MatrixArg {
    /// Associated matrix, rows separated by `;`, entries by `,`.
    #[arg(long, allow_hyphen_values = true)]
    matrix: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the normal form of an expression.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Apply a derivation, optionally several times.
    Apply {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        derivation: DerivationArgs,
        #[arg(long, default_value_t = 1)]
        times: u32,
    },
    /// List the generators d_ij and the Euler derivation.
    Gens,
    /// Basis of the space of linear derivations.
    Linspace,
    /// Classify a linear derivation.
    Classify {
        #[command(flatten)]
        matrix: MatrixArg,
    },
    /// Split a linear derivation of the quadric into scalar and skew parts.
    Decompose {
        #[command(flatten)]
        matrix: MatrixArg,
    },
    /// Decide local nilpotency of a linear derivation.
    Lnd {
        #[command(flatten)]
        matrix: MatrixArg,
    },
    /// Constants of a linear derivation degree by degree.
    Kernel {
        #[command(flatten)]
        matrix: MatrixArg,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
    },
    /// Certify a Darboux element of the diagonal derivation with parameter alpha.
    Darboux {
        #[arg(allow_hyphen_values = true)]
        element: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        alpha: String,
    },
    /// Search for alpha making alpha*I + S have trivial constants.
    FindAlpha {
        #[command(flatten)]
        matrix: MatrixArg,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
        #[arg(long, default_value = "1,2,1/2", allow_hyphen_values = true)]
        candidates: String,
    },
    /// Build a nilpotent skew family and check alpha*I + S.
    #[command(group(ArgGroup::new("parity").required(true).args(["odd", "even"])))]
    Family {
        #[arg(long)]
        odd: Option<usize>,
        #[arg(long)]
        even: Option<usize>,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        alpha: String,
    },
    /// Run every check of the verification suite.
    Verify {
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        /// Ring specs separated by `|`.
        #[arg(long)]
        grid: Option<String>,
        /// Degree bound for the triangular-derivation check.
        #[arg(long, default_value_t = 2)]
        bound: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(ParseError),
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Parse(_) => 2,
            Self::Domain(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Parse(e) => write!(f, "{e}"),
            Self::Domain(m) => write!(f, "{m}"),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        Self::Parse(e)
    }
}

impl From<ConstantsError> for CliError {
    fn from(e: ConstantsError) -> Self {
        Self::Domain(e.to_string())
    }
}

impl From<DerivationError> for CliError {
    fn from(e: DerivationError) -> Self {
        match e {
            DerivationError::Arity { .. } => Self::Usage(e.to_string()),
            _ => Self::Domain(e.to_string()),
        }
    }
}

impl From<LinearError> for CliError {
    fn from(e: LinearError) -> Self {
        match e {
            LinearError::Shape(_) => Self::Usage(e.to_string()),
            LinearError::Derivation(d) => d.into(),
            _ => Self::Domain(e.to_string()),
        }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut out = String::new();
    match dispatch(&cli, &mut out) {
        Ok(code) => Outcome {
            code,
            stdout: out,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.code(),
            stdout: out,
            stderr: format!("error: {e}\n"),
        },
    }
}

fn ring_of(cli: &Cli) -> Result<Arc<RingSpec>, CliError> {
    Ok(parse::parse_ring_spec(&cli.ring)?)
}

fn linear_from(spec: &Arc<RingSpec>, text: &str) -> Result<LinearDerivation, CliError> {
    let m = parse::parse_matrix(text, spec.field())?;
    if m.rows() != spec.n() || m.cols() != spec.n() {
        return Err(CliError::Parse(ParseError {
            kind: ParseErrorKind::Arity,
            offset: 0,
            line: 1,
            column: 1,
            message: format!(
                "matrix is {}x{}, ring has n={}",
                m.rows(),
                m.cols(),
                spec.n()
            ),
        }));
    }
    Ok(LinearDerivation::from_matrix(spec, m)?)
}

fn derivation_from(spec: &Arc<RingSpec>, args: &DerivationArgs) -> Result<Derivation, CliError> {
    match (&args.matrix, &args.images) {
        (Some(m), _) => Ok(linear_from(spec, m)?.derivation().clone()),
        (None, Some(i)) => Ok(Derivation::new(spec, parse::parse_images(i, spec)?)?),
        (None, None) => Err(CliError::Usage("need --matrix or --images".into())),
    }
}

fn images_line(d: &Derivation) -> String {
    d.images()
        .iter()
        .enumerate()
        .map(|(i, f)| format!("d(x{})={f}", i + 1))
        .collect::<Vec<_>>()
        .join("; ")
}

fn write_kernel(out: &mut String, report: &constants::KernelReport) {
    for (k, basis) in &report.per_degree {
        let listed = basis
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        let _ = writeln!(out, "k={k} dim={} basis=[{listed}]", basis.len());
    }
    match report.first_nontrivial_degree() {
        None => {
            let _ = writeln!(out, "TRIVIAL_UP_TO={}", report.max_degree);
        }
        Some(k) => {
            let _ = writeln!(out, "NONTRIVIAL at k={k}");
        }
    }
}

fn require_degree(k: u32) -> Result<(), CliError> {
    if k == 0 {
        return Err(CliError::Usage("--max-degree must be at least 1".into()));
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut String) -> Result<i32, CliError> {
    match &cli.command {
        Command::Verify {
            max_degree,
            grid,
            bound,
            seed,
        } => {
            require_degree(*max_degree)?;
            let specs = match grid {
                None => suite::default_grid(),
                Some(g) => g
                    .split('|')
                    .map(parse::parse_ring_spec)
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let report = suite::run_suite(&suite::SuiteConfig {
                max_degree: *max_degree,
                grid: specs,
                bound: *bound,
                seed: *seed,
            });
            out.push_str(&report.render());
            return Ok(if report.failed() == 0 { 0 } else { 3 });
        }
        Command::Family {
            odd,
            even,
            max_degree,
            alpha,
        } => {
            require_degree(*max_degree)?;
            let requested = parse::parse_ring_spec(&cli.ring)?.field().conductor();
            let (n, is_odd) = match (odd, even) {
                (Some(n), _) => (*n, true),
                (None, Some(n)) => (*n, false),
                (None, None) => return Err(CliError::Usage("need --odd or --even".into())),
            };
            let conductor = num::integer::lcm(requested, family_conductor(n));
            let field = FieldSpec::new(conductor).map_err(|e| CliError::Domain(e.to_string()))?;
            let ds = if is_odd {
                constants::build_odd_family(n, &field)?
            } else {
                constants::build_even_family(n, &field)?
            };
            let alpha = parse::parse_coefficient(alpha, &field)?;
            let _ = writeln!(out, "FIELD={conductor}");
            let _ = writeln!(out, "RING={}", ds.spec());
            let _ = writeln!(out, "MATRIX={}", ds.matrix());
            let _ = writeln!(out, "SKEW={}", ds.matrix().is_skew_symmetric());
            let cube = fermat_core::exactla::matrix_power(ds.matrix(), 3)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            let _ = writeln!(out, "CUBE_ZERO={}", cube.is_zero());
            let _ = writeln!(out, "LND={}", ds.is_locally_nilpotent());
            let d = LinearDerivation::scalar(ds.spec(), &alpha)?.checked_add(&ds)?;
            let _ = writeln!(out, "ALPHA={alpha}");
            write_kernel(out, &kernel_up_to_degree(&d, *max_degree)?);
            return Ok(0);
        }
        _ => {}
    }
    let spec = ring_of(cli)?;
    match &cli.command {
        Command::Reduce { expr } => {
            let _ = writeln!(out, "{}", parse::parse_expression(expr, &spec)?);
        }
        Command::Apply {
            expr,
            derivation,
            times,
        } => {
            let f = parse::parse_expression(expr, &spec)?;
            let d = derivation_from(&spec, derivation)?;
            let _ = writeln!(out, "{}", d.compose_power(*times, &f)?);
        }
        Command::Gens => {
            let n = spec.n();
            for i in 0..n {
                for j in i + 1..n {
                    let d = generator_dij(&spec, i, j)?;
                    let _ = writeln!(out, "d{}{}: {}", i + 1, j + 1, images_line(&d));
                }
            }
            let _ = writeln!(out, "eps: {}", images_line(&generator_epsilon(&spec)));
        }
        Command::Linspace => {
            let basis = linear_derivation_space(&spec);
            for (idx, b) in basis.iter().enumerate() {
                let _ = writeln!(out, "B{}: {b}", idx + 1);
            }
            let _ = writeln!(out, "DIM={}", basis.len());
        }
        Command::Classify { matrix } => {
            let d = linear_from(&spec, &matrix.matrix)?;
            match d.classify()? {
                Classification::Diagonal { alpha } => {
                    let _ = writeln!(out, "CLASS=diagonal");
                    let _ = writeln!(out, "ALPHA={alpha}");
                }
                Classification::ScalarPlusSkew(dec) => {
                    let _ = writeln!(out, "CLASS=scalar+skew");
                    let _ = writeln!(out, "ALPHA={}", dec.alpha);
                    let _ = writeln!(out, "SKEW={}", dec.skew);
                }
                Classification::Unclassified { matrix } => {
                    let _ = writeln!(out, "CLASS=unclassified");
                    let _ = writeln!(out, "MATRIX={matrix}");
                }
            }
        }
        Command::Decompose { matrix } => {
            let dec = linear_from(&spec, &matrix.matrix)?.decompose()?;
            let _ = writeln!(out, "ALPHA={}", dec.alpha);
            let _ = writeln!(out, "SKEW={}", dec.skew);
            let _ = writeln!(out, "SKEW_VERIFIED={}", dec.skew.is_skew_symmetric());
        }
        Command::Lnd { matrix } => {
            let report = linear_from(&spec, &matrix.matrix)?.nilpotency();
            if let Some(index) = report.index {
                let _ = writeln!(out, "INDEX={index}");
            }
            if let Some(agrees) = report.skew_cross_check {
                let _ = writeln!(
                    out,
                    "SKEW_CROSS_CHECK={}",
                    if agrees { "agree" } else { "DISAGREE" }
                );
            }
            let _ = writeln!(out, "LND={}", report.nilpotent);
        }
        Command::Kernel { matrix, max_degree } => {
            require_degree(*max_degree)?;
            let d = linear_from(&spec, &matrix.matrix)?;
            write_kernel(out, &kernel_up_to_degree(&d, *max_degree)?);
        }
        Command::Darboux { element, alpha } => {
            let f = parse::parse_expression(element, &spec)?;
            let alpha = parse::parse_coefficient(alpha, spec.field())?;
            let d = LinearDerivation::diagonal(&spec, &alpha);
            let cert = if f.len() == 1 {
                let (mono, _) = f.terms().next().expect("one term");
                let lambda = constants::darboux_eigenvalue(&spec, &alpha, mono);
                constants::DarbouxCertificate::new(d.derivation(), f.clone(), lambda)?
            } else {
                homogeneous_certificate(&spec, &alpha, &f)?
            };
            let _ = writeln!(out, "ELEMENT={}", cert.element());
            let _ = writeln!(out, "EIGENVALUE={}", cert.eigenvalue());
            let _ = writeln!(out, "VERIFIED={}", cert.verify(d.derivation())?);
        }
        Command::FindAlpha {
            matrix,
            max_degree,
            candidates,
        } => {
            require_degree(*max_degree)?;
            let ds = linear_from(&spec, &matrix.matrix)?;
            let list = candidates
                .split(',')
                .map(|c| parse::parse_coefficient(c, spec.field()))
                .collect::<Result<Vec<CycloNum>, _>>()?;
            for c in &list {
                match constants::alpha_rejection_degree(&ds, *max_degree, c)? {
                    None => {
                        let _ = writeln!(out, "candidate {c}: passes through k={max_degree}");
                    }
                    Some(k) => {
                        let _ = writeln!(out, "candidate {c}: rejected at k={k}");
                    }
                }
            }
            match find_alpha(&ds, *max_degree, &list)? {
                Some(a) => {
                    let _ = writeln!(out, "ALPHA={a}");
                }
                None => {
                    let _ = writeln!(out, "ALPHA=none");
                }
            }
        }
        Command::Verify { .. } | Command::Family { .. } => unreachable!("handled above"),
    }
    Ok(0)
}
