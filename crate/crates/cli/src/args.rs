use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Accepts a decimal number or a simple fraction such as `1/48`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let num: f64 = a.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: f64 = b.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            num / den
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if !value.is_finite() {
        return Err(format!("not a finite number: {s:?}"));
    }
    Ok(value)
}

#[derive(Debug, Parser)]
#[command(name = "smeared", version, about = "Smeared position grids, metrics, Dyson maps and quadrature")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; defaults to standard output, or to a file in
    /// $SMEARED_OUTPUT_DIR when that is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Diagonal metric, first row (1, 0, ...).
    Theta0,
    /// Tridiagonal, first row (1, mu, 0, ...).
    Theta1,
    /// Pentadiagonal, first row (1, mu, p, 0, ...).
    Theta2,
    /// First row (k, mu, p, d, 0, ...).
    General,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "general")]
    pub family: Family,
    /// Explicit first row, comma separated; overrides the family.
    #[arg(long, value_delimiter = ',', value_parser = parse_real, allow_hyphen_values = true)]
    pub row: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_real, default_value = "1", allow_hyphen_values = true)]
    pub k: f64,
    #[arg(long, value_parser = parse_real, default_value = "0", allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, value_parser = parse_real, default_value = "0", allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, value_parser = parse_real, default_value = "0", allow_hyphen_values = true)]
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridMethod {
    /// Symmetric tridiagonal eigensolver.
    Tridiagonal,
    /// General eigensolver on the raw matrix.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FactorMethod {
    /// Upper-triangular factor.
    Cholesky,
    /// Lower-triangular factor grown from the bottom corner.
    Reverse,
    /// Diagonal map omega_k = c / sqrt(2^k k!).
    Omega0,
    /// Closed-form N = 4 approximation for the tridiagonal family.
    Perturbative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FactorPart {
    Omega,
    Inverse,
    /// Conjugated position matrix Omega Q Omega^{-1}.
    Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Integrand {
    One,
    X2,
    X4,
    Cos,
    Exp,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grid points (eigenvalues of the position matrix).
    Grid {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "tridiagonal")]
        method: GridMethod,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Metric compatible with the position matrix.
    Metric {
        #[command(flatten)]
        metric: MetricArgs,
        /// Print the band-limited solution count for this bandwidth instead.
        #[arg(long)]
        band: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Positivity boundary by bisection, or a spectrum check at one point.
    Positivity {
        #[command(flatten)]
        metric: MetricArgs,
        /// Bisect in mu (or in p with --in-p) over this bracket.
        #[arg(long, num_args = 2, value_parser = parse_real, allow_hyphen_values = true)]
        bracket: Option<Vec<f64>>,
        #[arg(long)]
        in_p: bool,
        #[arg(long, value_parser = parse_real, default_value = "1e-12")]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Smallest eigenvalue of the pentadiagonal family over a (mu, p) lattice.
    Scan {
        #[arg(long, num_args = 2, value_parser = parse_real, allow_hyphen_values = true, default_values = ["-1.5", "1.5"])]
        mu_range: Vec<f64>,
        #[arg(long, num_args = 2, value_parser = parse_real, allow_hyphen_values = true, default_values = ["-0.2", "1.2"])]
        p_range: Vec<f64>,
        #[arg(long, value_parser = parse_real, default_value = "0.01")]
        step: f64,
        /// File for the interpolated boundary points.
        #[arg(long)]
        boundary: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Width in mu of the positive pentadiagonal region, as a function of p.
    Width {
        #[arg(long, num_args = 2, value_parser = parse_real, allow_hyphen_values = true, default_values = ["0", "1"])]
        p_range: Vec<f64>,
        #[arg(long, value_parser = parse_real, default_value = "0.01")]
        step: f64,
        /// Bisection brackets are [0, mu_max] and [-mu_max, 0].
        #[arg(long, value_parser = parse_real, default_value = "3")]
        mu_max: f64,
        #[arg(long, value_parser = parse_real, default_value = "1e-10")]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dyson map factorizing a metric.
    Factorize {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, value_enum, default_value = "cholesky")]
        method: FactorMethod,
        #[arg(long, value_parser = parse_real, default_value = "1", allow_hyphen_values = true)]
        c: f64,
        #[arg(long, value_enum, default_value = "omega")]
        part: FactorPart,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Basis of Hamiltonians compatible with a positive metric.
    Hamiltonian {
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gauss-Hermite rule, or its comparison with an equidistant rule.
    Quadrature {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        compare: Option<Integrand>,
        #[arg(long, value_parser = parse_real, default_value = "6")]
        half_width: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Plot data: 1 = first-order eigenvalue drift, 2 = tridiagonal metric
    /// spectrum, 3 = pentadiagonal positivity scan.
    Figures {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, num_args = 2, value_parser = parse_real, allow_hyphen_values = true)]
        mu_range: Option<Vec<f64>>,
        #[arg(long, num_args = 2, value_parser = parse_real, allow_hyphen_values = true)]
        p_range: Option<Vec<f64>>,
        #[arg(long, value_parser = parse_real)]
        step: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn rationals_and_decimals() {
        assert_eq!(parse_real("1/48"), Ok(1.0 / 48.0));
        assert_eq!(parse_real("-3/4"), Ok(-0.75));
        assert_eq!(parse_real("0.25"), Ok(0.25));
        assert_eq!(parse_real("1e-3"), Ok(1e-3));
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("abc").is_err());
        assert!(parse_real("inf").is_err());
    }

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_bracket_values_parse() {
        let cli = Cli::try_parse_from(["smeared", "positivity", "--family", "theta1", "--bracket", "-1", "0"]).unwrap();
        match cli.command {
            Command::Positivity { bracket, .. } => assert_eq!(bracket, Some(vec![-1.0, 0.0])),
            other => panic!("{other:?}"),
        }
    }
}
