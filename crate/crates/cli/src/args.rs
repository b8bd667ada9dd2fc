//! Command-line arguments and their validation into a [`RunConfig`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use smld_core::analysis::{NormSpec, DEFAULT_GRID_POINTS};
use smld_core::operator::{OperatorParams, TestFunction, TruncationPolicy};
use smld_core::verify::CRITERIA;

use crate::error::CliError;
use crate::spec::{parse_function, parse_norm};
use crate::table::Format;

/// Identifier of the determinism check that `verify-all` adds to the
/// library criteria.
pub const DETERMINISM_CRITERION: u8 = CRITERIA + 1;

#[derive(Debug, Parser)]
#[command(
    name = "smld",
    version,
    about = "Szasz-Mirakyan-Laguerre-Durrmeyer operators: moments, spectra and convergence experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write the report to this file instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Absolute bound on the neglected tail of the k-sum
    #[arg(long, global = true, default_value_t = TruncationPolicy::default().eps_tail)]
    eps_tail: f64,

    /// Nodes of the Gauss-Laguerre rule for smooth integrands
    #[arg(long, global = true, default_value_t = TruncationPolicy::default().quad_nodes)]
    quad_nodes: usize,

    /// Target relative error of each coefficient integral
    #[arg(long, global = true, default_value_t = TruncationPolicy::default().eps_quad)]
    eps_quad: f64,

    /// Hard cap on the summation index
    #[arg(long, global = true, default_value_t = TruncationPolicy::default().k_max)]
    k_max: u64,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Operator index n (must exceed beta)
    #[arg(long, default_value_t = 10.0)]
    n: f64,
    /// Laguerre exponent alpha (must exceed -1)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Exponential tilt beta
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<OperatorParams, CliError> {
        Ok(OperatorParams::new(self.n, self.alpha, self.beta)?)
    }
}

/// Parameters for commands that sweep over n.
#[derive(Debug, Args)]
struct ShapeArgs {
    /// Laguerre exponent alpha (must exceed -1)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Exponential tilt beta (must be below every n)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
}

#[derive(Debug, Args)]
struct FunctionArgs {
    /// Test function: monomial:r, poly:c0,c1,..., exp:c, abs:c, sqrt, sin:c, const1, const:c or file:<path>
    #[arg(long = "f", value_name = "SPEC", default_value = "const1")]
    spec: String,
    /// Override the growth exponent A of the envelope |f(t)| <= K e^(A t)
    #[arg(long)]
    growth_a: Option<f64>,
}

impl FunctionArgs {
    fn function(&self) -> Result<TestFunction, CliError> {
        let f = parse_function(&self.spec)?;
        match self.growth_a {
            Some(a) => Ok(f.with_growth(a, None)?),
            None => Ok(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchurQuantity {
    /// E_n(t), the Laguerre factor of the second Schur integral
    E,
    /// The first Schur integral at each x
    First,
    /// The second Schur integral at each t: bound, direct quadrature and closed form
    Second,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Raw moments M_n t^r (x) by closed form, recurrence, explicit polynomial and quadrature
    Moments {
        #[command(flatten)]
        params: ParamArgs,
        /// Evaluation point
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        /// Highest moment order
        #[arg(long, default_value_t = 4)]
        max_r: u32,
    },
    /// Central moments by explicit formula and by binomial sum
    CentralMoments {
        #[command(flatten)]
        params: ParamArgs,
        /// Evaluation points
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,1,2,5")]
        x: Vec<f64>,
        /// Highest moment order
        #[arg(long, default_value_t = 4)]
        max_r: u32,
    },
    /// Exact central moment against its leading-order prediction along n
    Asymptotics {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Moment order
        #[arg(long, default_value_t = 2)]
        r: u32,
        /// Evaluation point
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        /// Strictly ascending values of n
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
        n_grid: Vec<f64>,
    },
    /// Evaluate M_n f on a grid of points
    Apply {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        function: FunctionArgs,
        /// Evaluation points
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,1,2,5")]
        x: Vec<f64>,
    },
    /// Error of M_n f in a chosen norm along a grid of n
    Converge {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Test function: monomial:r, poly:c0,c1,..., exp:c, abs:c, sqrt, sin:c, const1, const:c or file:<path>
        #[arg(long = "f", value_name = "SPEC", default_value = "abs:1")]
        spec: String,
        /// Override the growth exponent A of the envelope |f(t)| <= K e^(A t)
        #[arg(long)]
        growth_a: Option<f64>,
        /// Norm: sup:a, phi:x_max, lp:p,R or wlp:p,gamma,R_max
        #[arg(long, default_value = "sup:2")]
        norm: String,
        /// Strictly ascending values of n
        #[arg(long, value_delimiter = ',', default_value = "25,100,400,1600")]
        n_grid: Vec<f64>,
        /// Grid points for sup norms
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
    /// Check the eigenpairs of the coefficient matrix and of the operator
    Eigen {
        #[command(flatten)]
        params: ParamArgs,
        /// Points at which the operator eigen-relations are checked
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,5")]
        x: Vec<f64>,
        /// Fixed truncation order of the matrix (adaptive when omitted)
        #[arg(long)]
        k: Option<usize>,
        /// Instead of the eigenpair table, iterate P this many times from the second eigenvector
        #[arg(long)]
        iterations: Option<u32>,
    },
    /// Schur-test integrals for the weighted Lp bounds
    Schur {
        #[command(flatten)]
        params: ParamArgs,
        /// Quantity to tabulate
        #[arg(long, value_enum, default_value_t = SchurQuantity::E)]
        quantity: SchurQuantity,
        /// Weight exponent gamma
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Lebesgue exponent p
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Values of t for the e and second quantities
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2,5")]
        t: Vec<f64>,
        /// Values of x for the first quantity
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,5,10")]
        x: Vec<f64>,
    },
    /// Run the acceptance suite and print one row per check
    VerifyAll {
        /// Criteria to run (default: all, including the determinism check)
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
    },
}

/// A fully validated command.
#[derive(Debug, Clone)]
pub enum Command {
    Moments { params: OperatorParams, x: f64, max_r: u32 },
    CentralMoments { params: OperatorParams, x: Vec<f64>, max_r: u32 },
    Asymptotics { alpha: f64, beta: f64, r: u32, x: f64, n_grid: Vec<f64> },
    Apply { params: OperatorParams, f: TestFunction, x: Vec<f64> },
    Converge { base: OperatorParams, f: TestFunction, norm: NormSpec, n_grid: Vec<f64> },
    Eigen { params: OperatorParams, x: Vec<f64>, k: Option<usize>, iterations: Option<u32> },
    Schur { params: OperatorParams, quantity: SchurQuantity, gamma: f64, p: f64, points: Vec<f64> },
    VerifyAll { criteria: Vec<u8> },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub policy: TruncationPolicy,
    pub format: Format,
    pub output: Option<PathBuf>,
}

/// Outcome of argument parsing that does not produce a config: either a
/// help or version text for standard output, or a usage error.
#[derive(Debug)]
pub enum ParseOutcome {
    Run(Box<RunConfig>),
    Print(String),
}

fn check_points(name: &str, xs: &[f64]) -> Result<(), CliError> {
    if xs.is_empty() {
        return Err(CliError::usage(format!("--{name} needs at least one value")));
    }
    if let Some(bad) = xs.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(CliError::usage(format!("--{name} values must be finite and nonnegative, got {bad}")));
    }
    Ok(())
}

fn check_n_grid(alpha: f64, beta: f64, n_grid: &[f64]) -> Result<(), CliError> {
    if n_grid.is_empty() {
        return Err(CliError::usage("--n-grid needs at least one value"));
    }
    if n_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::usage("--n-grid must be strictly ascending"));
    }
    for &n in n_grid {
        OperatorParams::new(n, alpha, beta)?;
    }
    Ok(())
}

/// Parses and validates a full argument vector (including the program
/// name). Every numeric input is checked before any computation starts.
pub fn parse_config<I, T>(args: I) -> Result<ParseOutcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(ParseOutcome::Print(e.to_string())),
                _ => Err(CliError::usage(e.to_string().trim_end().trim_start_matches("error: ").to_owned())),
            };
        }
    };
    let policy = TruncationPolicy {
        eps_tail: cli.eps_tail,
        quad_nodes: cli.quad_nodes,
        eps_quad: cli.eps_quad,
        k_max: cli.k_max,
    };
    policy.validate()?;

    let command = match cli.command {
        Cmd::Moments { params, x, max_r } => {
            let params = params.params()?;
            check_points("x", &[x])?;
            Command::Moments { params, x, max_r }
        }
        Cmd::CentralMoments { params, x, max_r } => {
            let params = params.params()?;
            check_points("x", &x)?;
            if max_r == 0 {
                return Err(CliError::usage("--max-r must be at least 1"));
            }
            Command::CentralMoments { params, x, max_r }
        }
        Cmd::Asymptotics { shape, r, x, n_grid } => {
            check_n_grid(shape.alpha, shape.beta, &n_grid)?;
            check_points("x", &[x])?;
            Command::Asymptotics { alpha: shape.alpha, beta: shape.beta, r, x, n_grid }
        }
        Cmd::Apply { params, function, x } => {
            let params = params.params()?;
            check_points("x", &x)?;
            let f = function.function()?;
            smld_core::operator::validate(&params, &f)?;
            Command::Apply { params, f, x }
        }
        Cmd::Converge { shape, spec, growth_a, norm, n_grid, grid_points } => {
            check_n_grid(shape.alpha, shape.beta, &n_grid)?;
            let f = FunctionArgs { spec, growth_a }.function()?;
            let norm = parse_norm(&norm, grid_points)?;
            let base = OperatorParams::new(n_grid[0], shape.alpha, shape.beta)?;
            smld_core::operator::validate(&base, &f)?;
            Command::Converge { base, f, norm, n_grid }
        }
        Cmd::Eigen { params, x, k, iterations } => {
            let params = params.params()?;
            check_points("x", &x)?;
            if params.beta < 0.0 {
                return Err(CliError::usage("eigen requires beta >= 0"));
            }
            if iterations.is_some() && !(params.beta > 0.0) {
                return Err(CliError::usage("--iterations requires beta > 0"));
            }
            if k.is_some_and(|k| k < 1) {
                return Err(CliError::usage("--k must be at least 1"));
            }
            Command::Eigen { params, x, k, iterations }
        }
        Cmd::Schur { params, quantity, gamma, p, t, x } => {
            let params = params.params()?;
            if !(p >= 1.0 && p.is_finite()) {
                return Err(CliError::usage(format!("--p must be at least 1, got {p}")));
            }
            if !(gamma >= 0.0 && gamma < params.n * p) {
                return Err(CliError::usage(format!("--gamma must satisfy 0 <= gamma < n p, got {gamma}")));
            }
            if params.beta < 0.0 {
                return Err(CliError::usage("schur requires beta >= 0"));
            }
            let points = match quantity {
                SchurQuantity::First => {
                    check_points("x", &x)?;
                    x
                }
                SchurQuantity::E => {
                    check_points("t", &t)?;
                    t
                }
                SchurQuantity::Second => {
                    check_points("t", &t)?;
                    if t.iter().any(|&v| v == 0.0) {
                        return Err(CliError::usage("--t values must be positive for the second integral"));
                    }
                    t
                }
            };
            Command::Schur { params, quantity, gamma, p, points }
        }
        Cmd::VerifyAll { criteria } => {
            let criteria = criteria.unwrap_or_else(|| (1..=DETERMINISM_CRITERION).collect());
            if let Some(bad) = criteria.iter().find(|c| !(1..=DETERMINISM_CRITERION).contains(*c)) {
                return Err(CliError::usage(format!(
                    "--criteria values must lie in 1..={DETERMINISM_CRITERION}, got {bad}"
                )));
            }
            let mut criteria = criteria;
            criteria.sort_unstable();
            criteria.dedup();
            Command::VerifyAll { criteria }
        }
    };
    Ok(ParseOutcome::Run(Box::new(RunConfig { command, policy, format: cli.format, output: cli.output })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        let mut v = vec!["smld"];
        v.extend_from_slice(args);
        match parse_config(v)? {
            ParseOutcome::Run(c) => Ok(*c),
            ParseOutcome::Print(s) => panic!("unexpected text output: {s}"),
        }
    }

    #[test]
    fn moments_config() {
        let c = parse(&["moments", "--n", "10", "--alpha", "0", "--beta", "0", "--x", "1", "--max-r", "4"]).unwrap();
        match c.command {
            Command::Moments { params, x, max_r } => {
                assert_eq!((params.n, params.alpha, params.beta, x, max_r), (10.0, 0.0, 0.0, 1.0, 4));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.policy, TruncationPolicy::default());
    }

    #[test]
    fn parameter_errors_name_the_condition() {
        let e = parse(&["moments", "--beta", "12", "--n", "10"]).unwrap_err();
        assert!(e.to_string().contains("requires n > beta"), "{e}");
        assert_eq!(e.exit_code(), 2);
        let e = parse(&["moments", "--alpha", "-1.5"]).unwrap_err();
        assert!(e.to_string().contains("requires alpha > -1"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn rejects_unknown_flags_and_bad_values() {
        for args in [
            vec!["moments", "--bogus", "1"],
            vec!["moments", "--x", "-1"],
            vec!["apply", "--f", "nope"],
            vec!["asymptotics", "--n-grid", "10,5"],
            vec!["converge", "--norm", "lp:0.5,1"],
            vec!["verify-all", "--criteria", "16"],
            vec!["moments", "--eps-tail", "1e-3"],
            vec!["schur", "--quantity", "second", "--t", "0"],
            vec!["eigen", "--beta", "0", "--iterations", "2"],
        ] {
            let e = parse(&args).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{args:?}: {e}");
        }
    }

    #[test]
    fn help_is_printed_not_an_error() {
        match parse_config(["smld", "--help"]).unwrap() {
            ParseOutcome::Print(s) => assert!(s.contains("verify-all")),
            ParseOutcome::Run(_) => panic!(),
        }
    }

    #[test]
    fn verify_all_defaults_to_every_criterion() {
        match parse(&["verify-all"]).unwrap().command {
            Command::VerifyAll { criteria } => assert_eq!(criteria, (1..=DETERMINISM_CRITERION).collect::<Vec<_>>()),
            other => panic!("{other:?}"),
        }
    }
}
