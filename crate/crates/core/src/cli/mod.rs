//! Command-line front end. `run` never panics on bad input; it returns the
//! process exit code: 0 success, 1 I/O failure, 2 usage or config error,
//! 3 numerical failure.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::assembly::{
    overlap_coordinate, scaling_fit, theorem1_sweep, theorem2_sequence, FitTarget, ModelManifold,
};
use crate::covering_bound::{evaluate, sensitivity, CoverSpec, CtExponent, Parameter, Sweep};
use crate::sturm_liouville::convergence_study;
use crate::tube_model::{core_length_from_boundary_area, Tube};
use crate::tube_spectrum::{collar_function_problem, t_form_problem, theta_form_problem, tube_mu1};

pub use config::{ConfigError, ConvergenceProblem, Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "margulis-bounds", version, about = "Spectral lower bounds for hyperbolic 3-manifolds with Margulis tubes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub mesh_n: Option<usize>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub ct_exponent: Option<u32>,
    #[arg(long, global = true)]
    pub growth_exponent: Option<f64>,
    /// Replace every weight by 1 (closed-form control problems).
    #[arg(long, global = true)]
    pub constant_weights: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First coexact eigenvalue of single tubes over the radius sweep.
    TubeSpectrum,
    /// Evaluate the two-open covering bound from explicit inputs.
    CoveringBound(CoverArgs),
    /// μ_1 and μ_{k+1} bounds over the radius sweep.
    Theorem1,
    /// μ_1 bounds for the (1, i) filling sequence.
    Theorem2,
    /// Mesh convergence of one reduced tube problem.
    Convergence,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    #[arg(long)]
    pub mu1: f64,
    #[arg(long)]
    pub mu2: f64,
    #[arg(long)]
    pub mu12: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c_rho: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c_t: f64,
    #[arg(long, default_value_t = 0)]
    pub k_offset: usize,
    /// Parameter to sweep: `mu:1`, `mu:2`, `mu:1,2`, `c_rho` or `c_t`.
    #[arg(long, requires = "values")]
    pub sweep: Option<String>,
    #[arg(long, value_delimiter = ',', requires = "sweep")]
    pub values: Vec<f64>,
    /// Treat sweep values as factors on the base value.
    #[arg(long)]
    pub scale: bool,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<crate::error::Error> for CliError {
    fn from(e: crate::error::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<crate::covering_bound::CoverError> for CliError {
    fn from(e: crate::covering_bound::CoverError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            // 17 significant digits round-trip every f64
            Cell::Real(x) => write!(f, "{x:.16e}"),
            Cell::Int(n) => write!(f, "{n}"),
            Cell::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Trailing comment lines (fits, bands).
    pub notes: Vec<String>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn render(&self, format: Format, command: &str, hash: &str) -> String {
        let sep = format.separator().to_string();
        let mut s = String::new();
        writeln!(s, "# margulis-bounds {} command={command} config-sha256={hash}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(s, "{}", self.columns.join(&sep)).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(s, "{}", cells.join(&sep)).unwrap();
        }
        for n in &self.notes {
            writeln!(s, "# {n}").unwrap();
        }
        s
    }
}

/// Result of one command: an optional table plus free text for the terminal.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub table: Option<Table>,
    pub text: Option<String>,
}

/// Load the config file (if any) and apply flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let s = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_toml_str(&s)?
        }
        None => RunConfig::default(),
    };
    if let Some(n) = cli.mesh_n {
        cfg.solver.mesh_n = n;
    }
    if let Some(e) = cli.ct_exponent {
        cfg.experiment.ct_exponent = e;
    }
    if let Some(g) = cli.growth_exponent {
        cfg.experiment.growth_exponent = g;
    }
    if cli.constant_weights {
        cfg.solver.weights = config::WeightKind::Constant;
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(p) = &cli.out {
        cfg.output.path = Some(p.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_tube_spectrum(cfg: &RunConfig) -> Result<Table, CliError> {
    use rayon::prelude::*;
    let mesh = cfg.mesh();
    let mode = cfg.weights();
    let slope = cfg.slope();
    let spectra = cfg
        .experiment
        .radii
        .par_iter()
        .map(|&r| {
            let l = core_length_from_boundary_area(r, cfg.experiment.boundary_area).map_err(crate::error::Error::from)?;
            let tube = Tube::new(r, l, slope).map_err(crate::error::Error::from)?;
            tube_mu1(&tube, mesh, mode)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(vec!["R", "lambda_t", "lambda_theta", "mu1", "mu1*R^2", "invariance_valid"]);
    for s in spectra {
        t.rows.push(vec![
            Cell::Real(s.radius),
            Cell::Real(s.lambda_t),
            Cell::Real(s.lambda_theta),
            Cell::Real(s.mu1),
            Cell::Real(s.normalized()),
            Cell::Bool(s.invariance_valid),
        ]);
    }
    Ok(t)
}

pub fn cmd_covering_bound(cfg: &RunConfig, args: &CoverArgs) -> Result<Outcome, CliError> {
    let e = CtExponent::from_int(cfg.experiment.ct_exponent).expect("validated exponent");
    let cover = CoverSpec::two_open(args.mu1, args.mu2, args.mu12, args.c_rho, args.c_t, args.k_offset, e);
    let b = evaluate(&cover)?;
    let mut text = format!("mu_{} >= {}\n", b.rank, b.bound);
    let mut t;
    if let Some(p) = &args.sweep {
        let param: Parameter = p.parse().map_err(|e: crate::covering_bound::CoverError| CliError::Config(e.to_string()))?;
        let sweep = if args.scale { Sweep::Scale(args.values.clone()) } else { Sweep::Set(args.values.clone()) };
        let rows = sensitivity(&cover, &param, &sweep)?;
        t = Table::new(vec!["value", "bound"]);
        for r in rows {
            writeln!(text, "  {p} = {}: {}", r.value, r.bound).unwrap();
            t.rows.push(vec![Cell::Real(r.value), Cell::Real(r.bound)]);
        }
    } else {
        t = Table::new(vec!["mu1", "mu2", "mu12", "c_rho", "c_t", "ct_exponent", "rank", "bound"]);
        t.rows.push(vec![
            Cell::Real(args.mu1),
            Cell::Real(args.mu2),
            Cell::Real(args.mu12),
            Cell::Real(args.c_rho),
            Cell::Real(args.c_t),
            Cell::Int(e.as_int() as i64),
            Cell::Int(b.rank as i64),
            Cell::Real(b.bound),
        ]);
    }
    Ok(Outcome { table: Some(t), text: Some(text) })
}

pub fn cmd_theorem1(cfg: &RunConfig) -> Result<Table, CliError> {
    let ex = &cfg.experiment;
    let reports = theorem1_sweep(cfg.thick(), ex.k, &ex.radii, cfg.slope(), ex.boundary_area, cfg.options())?;
    let mut t = Table::new(vec![
        "R",
        "d",
        "mu1_lb",
        "mu_k1_lb",
        "mu_k1_lb*d^2",
        "mu1_lb*d^4*exp(2k d)",
        "mu1_lb*R^4*exp(2k R)",
        "C_T_mu1",
    ]);
    for r in &reports {
        t.rows.push(vec![
            Cell::Real(r.max_radius),
            Cell::Real(r.d),
            Cell::Real(r.mu1_lb),
            Cell::Real(r.mu_k1_lb),
            Cell::Real(r.mu_k1_normalized()),
            Cell::Real(r.mu1_normalized_d()),
            Cell::Real(r.mu1_normalized_r()),
            Cell::Real(r.section_mu1.c_t),
        ]);
    }
    t.notes.push(format!("k={} ct_exponent={} growth_exponent={:.16e}", ex.k, ex.ct_exponent, ex.growth_exponent));
    for (name, target) in [("mu_k1 log-log slope vs d", FitTarget::MuK1), ("mu1 log(bound*d^4) slope vs d", FitTarget::Mu1)] {
        match scaling_fit(&reports, target) {
            Ok(f) => t.notes.push(format!("fit {name}: {:.16e} (rms residual {:.16e})", f.slope, f.residual)),
            Err(e) => t.notes.push(format!("fit {name}: skipped ({e})")),
        }
    }
    if let Some(band) = band_ratio(reports.iter().map(|r| r.mu_k1_normalized())) {
        t.notes.push(format!("mu_k1_lb*d^2 band ratio: {band:.16e}"));
    }
    Ok(t)
}

pub fn cmd_theorem2(cfg: &RunConfig) -> Result<Table, CliError> {
    let ex = &cfg.experiment;
    let first_r = ex.r_offset + (ex.i_range[0] as f64).ln() / ex.growth_exponent;
    let template = ModelManifold::uniform(cfg.thick(), 1, first_r, cfg.slope(), ex.boundary_area, cfg.options())?;
    let indices: Vec<u64> = (ex.i_range[0]..=ex.i_range[1]).collect();
    let rows = theorem2_sequence(&template, &indices, ex.r_offset)?;
    let mut t = Table::new(vec!["i", "R_i", "d_i", "regime_ok", "mu1_lb", "mu1_lb*d_i^2", "C_T"]);
    for r in &rows {
        t.rows.push(vec![
            Cell::Int(r.i as i64),
            Cell::Real(r.radius),
            Cell::Real(r.d),
            Cell::Bool(r.regime_ok),
            Cell::Real(r.mu1_lb),
            Cell::Real(r.normalized()),
            Cell::Real(r.c_t),
        ]);
    }
    let failed: Vec<String> = rows.iter().filter(|r| !r.regime_ok).map(|r| r.i.to_string()).collect();
    if !failed.is_empty() {
        t.notes.push(format!("regime |b| >= R|a| fails for i = {}", failed.join(" ")));
    }
    if let Some(band) = band_ratio(rows.iter().filter(|r| r.regime_ok).map(|r| r.normalized())) {
        t.notes.push(format!("mu1_lb*d_i^2 band ratio over regime rows: {band:.16e}"));
    }
    Ok(t)
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<Table, CliError> {
    let ex = &cfg.experiment;
    let (mesh, mode, r) = (cfg.mesh(), cfg.weights(), ex.convergence_radius);
    let problem = match ex.convergence_problem {
        ConvergenceProblem::T => t_form_problem(r, mesh, mode),
        ConvergenceProblem::Theta => theta_form_problem(r, mesh, mode),
        ConvergenceProblem::Collar => collar_function_problem(overlap_coordinate(r, &cfg.thick()), r, mesh, mode),
    }?;
    let study = convergence_study(&problem, &ex.convergence_elements, None).map_err(crate::error::Error::from)?;
    let mut t = Table::new(vec!["elements", "eigenvalue", "difference_to_next", "order"]);
    for (i, (&n, &lam)) in study.elements.iter().zip(&study.eigenvalues).enumerate() {
        let diff = study.errors.get(i).map_or(f64::NAN, |&x| x);
        let order = if i >= 1 { study.orders.get(i - 1).map_or(f64::NAN, |&x| x) } else { f64::NAN };
        t.rows.push(vec![Cell::Int(n as i64), Cell::Real(lam), Cell::Real(diff), Cell::Real(order)]);
    }
    t.notes.push(format!("estimated order {:.16e}", study.estimated_order));
    t.notes.push(format!("extrapolated eigenvalue {:.16e}", study.extrapolated));
    Ok(t)
}

fn band_ratio(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return None;
    }
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some(hi / lo)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::TubeSpectrum => "tube-spectrum",
        Command::CoveringBound(_) => "covering-bound",
        Command::Theorem1 => "theorem1",
        Command::Theorem2 => "theorem2",
        Command::Convergence => "convergence",
    }
}

/// Run one parsed invocation, writing the table and text.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve_config(cli)?;
    let mut hash = cfg.hash();
    let outcome = match &cli.command {
        Command::TubeSpectrum => Outcome { table: Some(cmd_tube_spectrum(&cfg)?), text: None },
        Command::CoveringBound(args) => {
            // inline inputs are part of what was run
            let extra = format!("{args:?}");
            hash = hash_str(&(cfg.canonical() + &extra));
            let mut o = cmd_covering_bound(&cfg, args)?;
            if cfg.output.path.is_none() {
                o.table = None;
            }
            o
        }
        Command::Theorem1 => Outcome { table: Some(cmd_theorem1(&cfg)?), text: None },
        Command::Theorem2 => Outcome { table: Some(cmd_theorem2(&cfg)?), text: None },
        Command::Convergence => Outcome { table: Some(cmd_convergence(&cfg)?), text: None },
    };
    if let Some(text) = &outcome.text {
        print!("{text}");
    }
    if let Some(table) = &outcome.table {
        let rendered = table.render(cfg.output.format, command_name(&cli.command), &hash);
        match &cfg.output.path {
            Some(p) => std::fs::write(p, rendered).map_err(|e| CliError::Io(format!("cannot write {p}: {e}")))?,
            None => print!("{rendered}"),
        }
    }
    Ok(())
}

pub(crate) fn hash_str(s: &str) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parse arguments and run; returns the exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("margulis-bounds: {e}");
            e.exit_code()
        }
    }
}
