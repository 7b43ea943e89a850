use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use smeared_core::dieudonne::{band_metric_dimension, metric_from_first_row, MetricCandidate};
use smeared_core::dynamics::admissible_hamiltonian_basis;
use smeared_core::figures::{approximation_drift, pentadiagonal_domain, tridiagonal_metric_spectrum};
use smeared_core::hermite::{build_position_matrix, grid_points, grid_residual, raw_position_eigenvalues};
use smeared_core::hermitization::{
    cholesky_factor, hermitized_position, omega0, perturbative_omega, reverse_cholesky_factor, DysonMap,
};
use smeared_core::output::{fmt_real, matrix_json, matrix_table, Table};
use smeared_core::positivity::{
    positivity_boundary_1d, positivity_check, positivity_scan_2d, positivity_width_curve, DomainScan, LatticeAxis,
};
use smeared_core::quadrature::{equidistant_compare, gauss_hermite_rule};
use smeared_core::{DMatrix, Error};

use crate::args::{Command, FactorMethod, FactorPart, Family, Format, GridMethod, Integrand, MetricArgs, OutputArgs};

pub const OUTPUT_DIR_VAR: &str = "SMEARED_OUTPUT_DIR";

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage error",
            Failure::Numerical(_) => "numerical failure",
            Failure::Io(_) => "i/o error",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyDimension
            | Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::OutsideBand { .. }
            | Error::NotSymmetric { .. }
            | Error::EmptyLattice => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

/// A rendered artifact and where it goes; `None` means standard output.
struct Artifact {
    path: Option<PathBuf>,
    text: String,
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn destination(output: &OutputArgs, default_stem: &str) -> Option<PathBuf> {
    if let Some(p) = &output.out {
        return Some(p.clone());
    }
    match env::var_os(OUTPUT_DIR_VAR) {
        Some(dir) if !dir.is_empty() => {
            Some(Path::new(&dir).join(format!("{default_stem}.{}", extension(output.format))))
        }
        _ => None,
    }
}

/// `dir/stem_suffix.ext` next to `path`.
fn sibling(path: &Path, suffix: &str, format: Format) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}_{suffix}.{}", extension(format)))
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn render_matrix(m: &DMatrix<f64>, format: Format) -> String {
    match format {
        Format::Csv => matrix_table(m).to_csv(),
        Format::Json => matrix_json(m),
    }
}

fn write_all(artifacts: Vec<Artifact>) -> Outcome<()> {
    let mut stdout = String::new();
    for a in artifacts {
        match a.path {
            Some(p) => fs::write(&p, a.text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
            None => stdout.push_str(&a.text),
        }
    }
    if !stdout.is_empty() {
        print!("{stdout}");
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct MetricSpec {
    n: usize,
    family: Family,
    row: Option<Vec<f64>>,
    k: f64,
    mu: f64,
    p: f64,
    d: f64,
}

impl From<&MetricArgs> for MetricSpec {
    fn from(a: &MetricArgs) -> Self {
        Self {
            n: a.n,
            family: a.family,
            row: a.row.clone(),
            k: a.k,
            mu: a.mu,
            p: a.p,
            d: a.d,
        }
    }
}

impl MetricSpec {
    fn first_row(&self) -> smeared_core::Result<Vec<f64>> {
        if let Some(row) = &self.row {
            if row.len() != self.n {
                return Err(Error::InvalidParameter(format!(
                    "--row has {} entries but --n is {}",
                    row.len(),
                    self.n
                )));
            }
            return Ok(row.clone());
        }
        let params = match self.family {
            Family::Theta0 => [1.0, 0.0, 0.0, 0.0],
            Family::Theta1 => [1.0, self.mu, 0.0, 0.0],
            Family::Theta2 => [1.0, self.mu, self.p, 0.0],
            Family::General => [self.k, self.mu, self.p, self.d],
        };
        let mut row = vec![0.0; self.n];
        for (i, &v) in params.iter().enumerate() {
            if i < self.n {
                row[i] = v;
            } else if v != 0.0 {
                let name = ["k", "mu", "p", "d"][i];
                return Err(Error::InvalidParameter(format!("--{name} needs --n of at least {}", i + 1)));
            }
        }
        Ok(row)
    }

    fn build(&self) -> smeared_core::Result<MetricCandidate> {
        metric_from_first_row(&build_position_matrix(self.n)?, &self.first_row()?)
    }

    fn with_mu(&self, x: f64) -> Self {
        let mut s = self.clone();
        match &mut s.row {
            Some(r) if r.len() > 1 => r[1] = x,
            _ => s.mu = x,
        }
        s
    }

    fn with_p(&self, x: f64) -> Self {
        let mut s = self.clone();
        match &mut s.row {
            Some(r) if r.len() > 2 => r[2] = x,
            _ => s.p = x,
        }
        s
    }
}

fn pair(v: &[f64], name: &str) -> Outcome<(f64, f64)> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(Failure::Usage(format!("--{name} takes two values"))),
    }
}

fn axis(range: (f64, f64), step: f64) -> Outcome<LatticeAxis> {
    Ok(LatticeAxis::new(range.0, range.1, step)?)
}

pub fn run(command: Command) -> Outcome<()> {
    let artifacts = match command {
        Command::Grid { n, method, output } => grid(n, method, &output)?,
        Command::Metric { metric, band, output } => metric_cmd(&metric, band, &output)?,
        Command::Positivity {
            metric,
            bracket,
            in_p,
            tol,
            output,
        } => positivity(&metric, bracket.as_deref(), in_p, tol, &output)?,
        Command::Scan {
            mu_range,
            p_range,
            step,
            boundary,
            output,
        } => {
            let scan = positivity_scan_2d(axis(pair(&mu_range, "mu-range")?, step)?, axis(pair(&p_range, "p-range")?, step)?)?;
            scan_artifacts(&scan, boundary, &output, "scan")
        }
        Command::Width {
            p_range,
            step,
            mu_max,
            tol,
            output,
        } => {
            let ps = axis(pair(&p_range, "p-range")?, step)?.points();
            let t = positivity_width_curve(&ps, mu_max, tol)?;
            vec![Artifact {
                path: destination(&output, "width"),
                text: render(&t, output.format),
            }]
        }
        Command::Factorize {
            metric,
            method,
            c,
            part,
            output,
        } => factorize(&metric, method, c, part, &output)?,
        Command::Hamiltonian { metric, output } => hamiltonian(&metric, &output)?,
        Command::Quadrature {
            n,
            compare,
            half_width,
            output,
        } => quadrature(n, compare, half_width, &output)?,
        Command::Figures {
            which,
            n,
            mu_range,
            p_range,
            step,
            output,
        } => figures(which, n, mu_range.as_deref(), p_range.as_deref(), step, &output)?,
    };
    write_all(artifacts)
}

fn grid(n: usize, method: GridMethod, output: &OutputArgs) -> Outcome<Vec<Artifact>> {
    let points = match method {
        GridMethod::Tridiagonal => grid_points(n)?.points().to_vec(),
        GridMethod::Raw => raw_position_eigenvalues(n)?,
    };
    let mut t = Table::new(["index", "x", "residual"]);
    for (i, &x) in points.iter().enumerate() {
        t.push(vec![i as f64, x, grid_residual(n, x)]);
    }
    Ok(vec![Artifact {
        path: destination(output, &format!("grid_n{n}")),
        text: render(&t, output.format),
    }])
}

fn metric_cmd(metric: &MetricArgs, band: Option<usize>, output: &OutputArgs) -> Outcome<Vec<Artifact>> {
    let spec = MetricSpec::from(metric);
    let text = match band {
        Some(alpha) => {
            let dim = band_metric_dimension(&build_position_matrix(spec.n)?, alpha)?;
            let mut t = Table::new(["n", "bandwidth", "dimension"]);
            t.push(vec![spec.n as f64, alpha as f64, dim as f64]);
            render(&t, output.format)
        }
        None => render_matrix(spec.build()?.matrix(), output.format),
    };
    Ok(vec![Artifact {
        path: destination(output, &format!("metric_n{}", spec.n)),
        text,
    }])
}

fn positivity(
    metric: &MetricArgs,
    bracket: Option<&[f64]>,
    in_p: bool,
    tol: f64,
    output: &OutputArgs,
) -> Outcome<Vec<Artifact>> {
    let spec = MetricSpec::from(metric);
    let path = destination(output, "positivity");
    let Some(bracket) = bracket else {
        let report = positivity_check(&spec.build()?)?;
        let mut columns = vec!["smallest_eigenvalue".to_string(), "is_positive".to_string()];
        columns.extend((1..=report.eigenvalues.len()).map(|k| format!("eig_{k}")));
        let mut t = Table::new(columns);
        let mut row = vec![report.smallest_eigenvalue, if report.is_positive { 1.0 } else { 0.0 }];
        row.extend(report.eigenvalues);
        t.push(row);
        return Ok(vec![Artifact {
            path,
            text: render(&t, output.format),
        }]);
    };
    let (a, b) = pair(bracket, "bracket")?;
    let family = |x: f64| if in_p { spec.with_p(x) } else { spec.with_mu(x) }.build();
    let boundary = positivity_boundary_1d(family, a, b, tol)?;
    let text = match output.format {
        Format::Csv => format!("{}\n", fmt_real(boundary)),
        Format::Json => format!("{{\"boundary\": {}}}\n", fmt_real(boundary)),
    };
    Ok(vec![Artifact { path, text }])
}

fn scan_artifacts(scan: &DomainScan, boundary: Option<PathBuf>, output: &OutputArgs, stem: &str) -> Vec<Artifact> {
    let main = destination(output, stem);
    let boundary_path = boundary.or_else(|| main.as_deref().map(|p| sibling(p, "boundary", output.format)));
    let mut out = vec![Artifact {
        path: main,
        text: render(&scan.values_table(), output.format),
    }];
    if let Some(p) = boundary_path {
        out.push(Artifact {
            path: Some(p),
            text: render(&scan.boundary_table(), output.format),
        });
    }
    out
}

fn factorize(
    metric: &MetricArgs,
    method: FactorMethod,
    c: f64,
    part: FactorPart,
    output: &OutputArgs,
) -> Outcome<Vec<Artifact>> {
    let spec = MetricSpec::from(metric);
    let map: DysonMap = match method {
        FactorMethod::Cholesky => cholesky_factor(&spec.build()?)?,
        FactorMethod::Reverse => reverse_cholesky_factor(&spec.build()?)?,
        FactorMethod::Omega0 => omega0(spec.n, c)?,
        FactorMethod::Perturbative => {
            if spec.n != 4 {
                return Err(Failure::Usage("the perturbative map exists only for --n 4".into()));
            }
            perturbative_omega(spec.mu)
        }
    };
    let matrix = match part {
        FactorPart::Omega => map.omega().clone(),
        FactorPart::Inverse => map.omega_inverse().clone(),
        FactorPart::Position => hermitized_position(&build_position_matrix(spec.n)?, &map)?.matrix,
    };
    Ok(vec![Artifact {
        path: destination(output, "factor"),
        text: render_matrix(&matrix, output.format),
    }])
}

fn hamiltonian(metric: &MetricArgs, output: &OutputArgs) -> Outcome<Vec<Artifact>> {
    let basis = admissible_hamiltonian_basis(&MetricSpec::from(metric).build()?)?;
    let mut t = Table::new(["element", "row", "col", "value"]);
    for (e, h) in basis.iter().enumerate() {
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                t.push(vec![e as f64, i as f64, j as f64, h.matrix[(i, j)]]);
            }
        }
    }
    Ok(vec![Artifact {
        path: destination(output, "hamiltonian"),
        text: render(&t, output.format),
    }])
}

fn quadrature(n: usize, compare: Option<Integrand>, half_width: f64, output: &OutputArgs) -> Outcome<Vec<Artifact>> {
    let table = match compare {
        None => gauss_hermite_rule(n)?.to_table(),
        Some(f) => {
            let f: fn(f64) -> f64 = match f {
                Integrand::One => |_| 1.0,
                Integrand::X2 => |x| x * x,
                Integrand::X4 => |x| x.powi(4),
                Integrand::Cos => f64::cos,
                Integrand::Exp => f64::exp,
            };
            equidistant_compare(f, n, half_width)?.to_table()
        }
    };
    Ok(vec![Artifact {
        path: destination(output, &format!("quadrature_n{n}")),
        text: render(&table, output.format),
    }])
}

fn figures(
    which: u8,
    n: usize,
    mu_range: Option<&[f64]>,
    p_range: Option<&[f64]>,
    step: Option<f64>,
    output: &OutputArgs,
) -> Outcome<Vec<Artifact>> {
    let stem = format!("figure{which}");
    let range = |r: Option<&[f64]>, default: (f64, f64), name: &str| r.map_or(Ok(default), |v| pair(v, name));
    match which {
        1 | 2 => {
            let mu = axis(range(mu_range, (-0.6, 0.6), "mu-range")?, step.unwrap_or(0.005))?;
            let t = if which == 1 {
                approximation_drift(mu)?
            } else {
                tridiagonal_metric_spectrum(n, mu)?
            };
            Ok(vec![Artifact {
                path: destination(output, &stem),
                text: render(&t, output.format),
            }])
        }
        _ => {
            let step = step.unwrap_or(0.01);
            let mu = axis(range(mu_range, (-1.5, 1.5), "mu-range")?, step)?;
            let p = axis(range(p_range, (-0.2, 1.2), "p-range")?, step)?;
            Ok(scan_artifacts(&pentadiagonal_domain(mu, p)?, None, output, &stem))
        }
    }
}
