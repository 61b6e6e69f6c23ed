//! Command-line front end: `lle <equilibria|curves|coeffs|construct|verify>`.
//!
//! Exit codes: 0 success, 1 io, 2 configuration or domain, 3 coefficient cross-check,
//! 4 regime, 5 verification.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{LleError, Result};
use crate::fmt::g15;
use crate::linearization::{bifurcation_curves, BifurcationClass, ClassKind};
use crate::model::{classify_region, cubic_roots, CurveCase, DEFAULT_DISC_TOL};
use crate::normalform::{coeffs_closed, coeffs_numeric_on_curve, default_case, in_excluded_band, validity};
use crate::profiles::{build, Family, Order, ProfileConfig, ProfileSpec};
use crate::verify::{run_suite, SuiteConfig};

pub const OUT_DIR_ENV: &str = "LLE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "lle", version, about = "Stationary waves of the Lugiato-Lefever equation near bifurcation points")]
pub struct Cli {
    /// Output directory [default: $LLE_OUT_DIR, else the current directory]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Format of tabular output
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count the constant solutions over an (alpha, F^2) grid; writes regions.csv
    Equilibria(EquilibriaArgs),
    /// Sweep alpha along the bifurcation curves; writes curves_<beta>.csv
    Curves(CurvesArgs),
    /// Normal-form coefficients, closed form against numeric projection
    Coeffs(CoeffsArgs),
    /// Sample one solution family; writes a profile CSV and a JSON sidecar
    Construct(ConstructArgs),
    /// Run the verification suite; writes verify_report.json
    Verify(VerifyArgs),
}

/// `a:b:n` for n evenly spaced points, or a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i + 1 == self.n { self.hi } else { self.lo + h * i as f64 }).collect()
    }

    fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        let r = match parts.as_slice() {
            [v] => Range { lo: num(v)?, hi: num(v)?, n: 1 },
            [a, b, n] => {
                let n = n.trim().parse::<usize>().map_err(|e| format!("steps '{n}': {e}"))?;
                Range { lo: num(a)?, hi: num(b)?, n }
            }
            _ => return Err(format!("expected a:b:n or a value, got '{s}'")),
        };
        if r.n == 0 {
            return Err("steps must be at least 1".into());
        }
        if !(r.lo.is_finite() && r.hi.is_finite()) || r.hi < r.lo {
            return Err(format!("empty or non-finite range '{s}'"));
        }
        Ok(r)
    }
}

fn parse_beta(s: &str) -> std::result::Result<i32, String> {
    match s.trim() {
        "1" | "+1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err(format!("beta must be +1 or -1, got '{s}'")),
    }
}

fn parse_branch(s: &str) -> std::result::Result<i8, String> {
    match s.trim() {
        "+" | "+1" | "1" => Ok(1),
        "-" | "-1" => Ok(-1),
        _ => Err(format!("branch must be + or -, got '{s}'")),
    }
}

fn parse_phase(s: &str) -> std::result::Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "0" => Ok(false),
        "pi" => Ok(true),
        _ => Err(format!("phase must be 0 or pi, got '{s}'")),
    }
}

fn parse_mu(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v != 0.0 => Ok(v),
        Ok(v) => Err(format!("mu must be finite and nonzero, got {v}")),
        Err(e) => Err(format!("mu '{s}': {e}")),
    }
}

fn parse_class(s: &str) -> std::result::Result<ClassKind, String> {
    s.parse::<ClassKind>().map_err(|e| e.to_string())
}

fn parse_case(s: &str) -> std::result::Result<CurveCase, String> {
    s.parse::<CurveCase>().map_err(|e| e.to_string())
}

fn parse_order(s: &str) -> std::result::Result<Order, String> {
    s.parse::<Order>().map_err(|e| e.to_string())
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("tolerance must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct EquilibriaArgs {
    #[arg(long, default_value = "0:4:200", conflicts_with = "alpha_star")]
    pub alpha_range: Range,
    /// A single alpha instead of a range
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_star: Option<f64>,
    /// F^2 as a value or a:b:n range
    #[arg(long, default_value = "0:6:200")]
    pub f2: Range,
    /// Distance to a fold curve or the cusp below which a point is tagged on it
    #[arg(long, default_value = "1e-9", value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, value_parser = parse_beta, allow_hyphen_values = true)]
    pub beta: i32,
    #[arg(long, default_value = "1.75:5:500")]
    pub alpha_range: Range,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long, value_parser = parse_class)]
    pub class: ClassKind,
    #[arg(long, value_parser = parse_beta, allow_hyphen_values = true)]
    pub beta: i32,
    /// line, fold-plus (1) or fold-minus (2); defaults to the class's curve
    #[arg(long, value_parser = parse_case)]
    pub case: Option<CurveCase>,
    #[arg(long, conflicts_with = "alpha_range")]
    pub alpha_star: Option<f64>,
    #[arg(long)]
    pub alpha_range: Option<Range>,
    /// Largest relative discrepancy accepted
    #[arg(long, default_value = "1e-8", value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_parser = parse_class)]
    pub class: ClassKind,
    /// Family name, e.g. homoclinic, periodic-first, dark-front
    #[arg(long)]
    pub family: String,
    #[arg(long, value_parser = parse_beta, allow_hyphen_values = true)]
    pub beta: i32,
    #[arg(long)]
    pub alpha_star: f64,
    #[arg(long, value_parser = parse_case)]
    pub case: Option<CurveCase>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long = "K", allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long, value_parser = parse_branch, allow_hyphen_values = true)]
    pub branch: Option<i8>,
    #[arg(long, value_parser = parse_phase, default_value = "0")]
    pub phase: bool,
    /// leading or corrected
    #[arg(long, value_parser = parse_order, default_value = "leading")]
    pub order: Order,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma list of classes to include
    #[arg(long, value_parser = parse_class, value_delimiter = ',')]
    pub families: Option<Vec<ClassKind>>,
    /// Comma list of mu values for the scaling sweeps
    #[arg(long, value_parser = parse_mu, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Option<Vec<f64>>,
    /// Replace the nonlinear coefficient of the truncated systems (b2, b1 or b) in the oracle check
    #[arg(long = "override-b2", allow_hyphen_values = true)]
    pub override_b2: Option<f64>,
    /// Comma list from residual, refine, oracle, temporal, reversibility
    #[arg(long, value_delimiter = ',', default_value = "residual,refine,oracle,temporal,reversibility")]
    pub checks: Vec<String>,
}

/// Runs the tool on raw arguments and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

/// A table written as CSV or as a JSON array of row objects.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => g15(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let m: serde_json::Map<String, Value> =
                            self.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                        Value::Object(m)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn file_name(stem: &str, format: Format) -> String {
    match format {
        Format::Csv => format!("{stem}.csv"),
        Format::Json => format!("{stem}.json"),
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let dir = out_dir(cli);
    match &cli.command {
        Command::Equilibria(a) => equilibria(a, &dir, cli.format),
        Command::Curves(a) => curves(a, &dir, cli.format),
        Command::Coeffs(a) => coeffs(a, &dir, cli.format),
        Command::Construct(a) => construct(a, &dir),
        Command::Verify(a) => verify(a, &dir),
    }
}

fn equilibria(a: &EquilibriaArgs, dir: &Path, format: Format) -> Result<i32> {
    let alphas = match a.alpha_star {
        Some(v) => vec![v],
        None => a.alpha_range.values(),
    };
    let mut table = Table { header: vec!["alpha", "F2", "n_equilibria", "region_tag"], rows: vec![] };
    for &alpha in &alphas {
        for f2 in a.f2.values() {
            if !(f2 >= 0.0) {
                return Err(LleError::Config(format!("--f2: F^2 must be non-negative, got {f2}")));
            }
            let n = cubic_roots(alpha, f2, DEFAULT_DISC_TOL).len();
            let tag = classify_region(alpha, f2, a.tol);
            table.rows.push(vec![Cell::Num(alpha), Cell::Num(f2), Cell::Int(n as i64), Cell::Text(tag.to_string())]);
        }
    }
    let path = write(dir, &file_name("regions", format), &table.render(format))?;
    println!("{} rows -> {}", table.rows.len(), path.display());
    Ok(0)
}

fn curves(a: &CurvesArgs, dir: &Path, format: Format) -> Result<i32> {
    let mut table = Table { header: vec!["alpha", "F2", "class", "omega"], rows: vec![] };
    let mut o4 = false;
    let o4_row = || vec![Cell::Num(2.0), Cell::Num(2.0), Cell::Text("O4".into()), Cell::Empty];
    for alpha in a.alpha_range.values() {
        if !o4 && alpha > 2.0 && a.alpha_range.contains(2.0) {
            table.rows.push(o4_row());
            o4 = true;
        }
        for p in bifurcation_curves(a.beta, alpha) {
            if p.class == BifurcationClass::O4 {
                if o4 {
                    continue;
                }
                o4 = true;
            }
            let omega = p.class.omega().map(Cell::Num).unwrap_or(Cell::Empty);
            table.rows.push(vec![Cell::Num(alpha), Cell::Num(p.f2), Cell::Text(p.class.name().into()), omega]);
        }
    }
    if !o4 && a.alpha_range.contains(2.0) {
        table.rows.push(o4_row());
    }
    let stem = format!("curves_{}", a.beta);
    let path = write(dir, &file_name(&stem, format), &table.render(format))?;
    println!("{} rows -> {}", table.rows.len(), path.display());
    Ok(0)
}

fn coeffs(a: &CoeffsArgs, dir: &Path, format: Format) -> Result<i32> {
    let alphas = match (a.alpha_star, a.alpha_range) {
        (Some(v), _) => vec![v],
        (None, Some(r)) => r.values().into_iter().filter(|&x| r.n == 1 || !in_excluded_band(a.class, x)).collect(),
        (None, None) => return Err(LleError::Config("coeffs needs --alpha-star or --alpha-range".into())),
    };
    let mut table = Table {
        header: vec!["alpha", "case", "coefficient", "closed", "numeric", "abs_diff", "rel_diff"],
        rows: vec![],
    };
    let mut worst: (f64, String) = (0.0, String::new());
    let mut report = String::new();
    for alpha in alphas {
        let case = a.case.unwrap_or_else(|| default_case(a.class, a.beta, alpha));
        validity(a.class, a.beta, case, alpha)?;
        let closed = coeffs_closed(a.class, a.beta, case, alpha)?;
        let numeric = coeffs_numeric_on_curve(a.class, a.beta, case, alpha)?;
        for ((name, c), (_, n)) in closed.coeffs.named().into_iter().zip(numeric.coeffs.named()) {
            let abs = (n - c).abs();
            let rel = abs / c.abs().max(n.abs()).max(f64::MIN_POSITIVE);
            if rel > worst.0 {
                worst = (rel, format!("{name} at alpha* = {alpha}"));
            }
            let _ = writeln!(report, "alpha*={:<10} {:<10} {:<3} closed {:>22} numeric {:>22} rel {:.2e}", g15(alpha), case.as_str(), name, g15(c), g15(n), rel);
            table.rows.push(vec![
                Cell::Num(alpha),
                Cell::Text(case.as_str().into()),
                Cell::Text(name.into()),
                Cell::Num(c),
                Cell::Num(n),
                Cell::Num(abs),
                Cell::Num(rel),
            ]);
        }
    }
    let stem = format!("coeffs_{}_{}", a.class, a.beta);
    let path = write(dir, &file_name(&stem, format), &table.render(format))?;
    print!("{report}");
    println!("{} rows -> {}", table.rows.len(), path.display());
    if worst.0 > a.tol {
        return Err(LleError::CrossCheck(format!("relative discrepancy {:.3e} > {:.1e} for {}", worst.0, a.tol, worst.1)));
    }
    Ok(0)
}

fn construct(a: &ConstructArgs, dir: &Path) -> Result<i32> {
    let name = a.family.rsplit('/').next().unwrap_or(&a.family);
    let family = Family::parse(a.class, name)?;
    let case = a.case.unwrap_or_else(|| default_case(a.class, a.beta, a.alpha_star));
    let mut spec = ProfileSpec::new(family, a.beta, case, a.alpha_star, a.mu).with_phase_pi(a.phase);
    if let Some(k) = a.k {
        spec = spec.with_k(k);
    }
    if let Some(e) = a.eps {
        spec = spec.with_eps(e);
    }
    if let Some(b) = a.branch {
        spec = spec.with_branch(b);
    }
    let config = ProfileConfig { order: a.order, ..ProfileConfig::default() };
    let profile = build(&spec, &config)?;
    let stem = format!("profile_{}_{}", family.class(), family.name());
    let csv = write(dir, &format!("{stem}.csv"), &profile.to_csv())?;
    let mut sidecar = serde_json::to_string_pretty(&profile.sidecar_json()).expect("sidecar serializes");
    sidecar.push('\n');
    let side = write(dir, &format!("{stem}.json"), &sidecar)?;
    println!("k = {}", g15(profile.k));
    println!("amplitude = {}", g15(profile.amplitude));
    println!("truncation_order = {}", profile.truncation_order);
    for w in &profile.warnings {
        println!("warning: {w}");
    }
    println!("{} samples -> {}, {}", profile.x.len(), csv.display(), side.display());
    Ok(0)
}

fn verify(a: &VerifyArgs, dir: &Path) -> Result<i32> {
    let mut cfg = SuiteConfig::default();
    if let Some(c) = &a.families {
        cfg.classes = c.clone();
    }
    cfg.mu_list = a.mu.clone();
    cfg.override_nonlinear = a.override_b2;
    let names = ["residual", "refine", "oracle", "temporal", "reversibility"];
    for c in &a.checks {
        if !names.contains(&c.as_str()) {
            return Err(LleError::Config(format!("--checks: unknown check '{c}'")));
        }
    }
    let on = |n: &str| a.checks.iter().any(|c| c == n);
    cfg.residual = on("residual");
    cfg.refine = on("refine");
    cfg.oracle = on("oracle");
    cfg.temporal = on("temporal");
    cfg.reversibility = on("reversibility");

    let report = run_suite(&cfg);
    let mut body = serde_json::to_string_pretty(&report).expect("report serializes");
    body.push('\n');
    let path = write(dir, "verify_report.json", &body)?;
    for c in &report.checks {
        let slope = c.detail.get("corrected").and_then(|v| v.get("fitted_slope")).or_else(|| c.detail.get("distance_slope"));
        let extra = slope.and_then(Value::as_f64).map(|s| format!(" slope {s:.3}")).unwrap_or_default();
        println!("{} {} | {}{extra}", if c.pass { "PASS" } else { "FAIL" }, c.check, c.case);
    }
    println!("{} checks -> {}", report.checks.len(), path.display());
    if report.pass {
        Ok(0)
    } else {
        let failing: Vec<String> = report.failing().iter().map(|c| format!("{} [{}]", c.check, c.case)).collect();
        Err(LleError::Verification(failing.join("; ")))
    }
}
