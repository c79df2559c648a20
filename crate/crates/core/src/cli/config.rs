//! TOML run configuration. Every section and key is optional; missing keys
//! take the documented defaults, unknown keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assembly::{PipelineOptions, ThickPartSpec};
use crate::covering_bound::CtExponent;
use crate::sturm_liouville::{Grading, MeshSpec};
use crate::tube_model::FillingSlope;
use crate::tube_spectrum::WeightMode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.key.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { key: key.to_string(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    /// Thick-part coexact eigenvalue `μ(U_1)`.
    pub c1: f64,
    /// Overlap eigenvalue override; the collar problem is solved when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    pub c_prime: f64,
    pub c_double_prime: f64,
    pub big_c: f64,
    /// Quasi-isometry ratio between the model and actual metrics.
    pub tau: f64,
    /// Margulis constant; lower bound for the diameter proxy.
    pub c_margulis: f64,
    pub r_a_infinity: f64,
    pub d_thick: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: None,
            c_prime: 1.0,
            c_double_prime: 1.0,
            big_c: 1.0,
            tau: 2.0,
            c_margulis: 0.1,
            r_a_infinity: 1.0,
            d_thick: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradingKind {
    Uniform,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Geometric,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Solver {
    pub mesh_n: usize,
    pub grading: GradingKind,
    /// Element size ratio at the 64-element reference resolution.
    pub grading_ratio: f64,
    pub weights: WeightKind,
}

impl Default for Solver {
    fn default() -> Self {
        Self { mesh_n: 1024, grading: GradingKind::Geometric, grading_ratio: 0.9, weights: WeightKind::Geometric }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvergenceProblem {
    T,
    Theta,
    Collar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Experiment {
    pub radii: Vec<f64>,
    /// Number of tubes.
    pub k: usize,
    pub slope: [i64; 2],
    pub boundary_area: f64,
    /// Inclusive range of `i` for the `(1, i)` filling sequence.
    pub i_range: [u64; 2],
    pub r_offset: f64,
    pub ct_exponent: u32,
    pub growth_exponent: f64,
    pub convergence_problem: ConvergenceProblem,
    pub convergence_radius: f64,
    pub convergence_elements: Vec<usize>,
}

impl Default for Experiment {
    fn default() -> Self {
        Self {
            radii: vec![5.0, 10.0, 15.0, 20.0, 30.0, 40.0],
            k: 1,
            slope: [1, 7],
            boundary_area: 1.0,
            i_range: [8, 64],
            r_offset: 2.0,
            ct_exponent: 2,
            growth_exponent: 1.0,
            convergence_problem: ConvergenceProblem::T,
            convergence_radius: 10.0,
            convergence_elements: vec![128, 256, 512, 1024],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    pub fn separator(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub constants: Constants,
    pub solver: Solver,
    pub experiment: Experiment,
    pub output: Output,
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(key, format!("must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        // the parser's message already names the offending key and its line
        toml::from_str(s).map_err(|e| bad("", e.to_string().trim_end()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.constants;
        for (k, v) in [
            ("constants.c1", c.c1),
            ("constants.c_prime", c.c_prime),
            ("constants.c_double_prime", c.c_double_prime),
            ("constants.big_c", c.big_c),
            ("constants.tau", c.tau),
            ("constants.c_margulis", c.c_margulis),
            ("constants.r_a_infinity", c.r_a_infinity),
            ("constants.d_thick", c.d_thick),
        ] {
            positive(k, v)?;
        }
        if let Some(v) = c.c2 {
            positive("constants.c2", v)?;
        }
        if c.tau < 1.0 {
            return Err(bad("constants.tau", format!("quasi-isometry ratio must be at least 1, got {}", c.tau)));
        }
        if c.d_thick < c.c_margulis {
            return Err(bad("constants.d_thick", "must be at least constants.c_margulis"));
        }
        let s = &self.solver;
        if s.mesh_n < MeshSpec::MIN_ELEMENTS {
            return Err(bad("solver.mesh_n", format!("must be at least {}, got {}", MeshSpec::MIN_ELEMENTS, s.mesh_n)));
        }
        if !(s.grading_ratio > 0.0 && s.grading_ratio <= 1.0) {
            return Err(bad("solver.grading_ratio", format!("must lie in (0, 1], got {}", s.grading_ratio)));
        }
        let e = &self.experiment;
        if e.radii.is_empty() {
            return Err(bad("experiment.radii", "sweep is empty"));
        }
        for (i, &r) in e.radii.iter().enumerate() {
            positive(&format!("experiment.radii[{i}]"), r)?;
        }
        if e.k == 0 {
            return Err(bad("experiment.k", "need at least one tube"));
        }
        FillingSlope::new(e.slope[0], e.slope[1]).map_err(|err| bad("experiment.slope", err.to_string()))?;
        positive("experiment.boundary_area", e.boundary_area)?;
        if e.i_range[0] == 0 || e.i_range[0] > e.i_range[1] {
            return Err(bad("experiment.i_range", format!("need 1 <= first <= last, got {:?}", e.i_range)));
        }
        if !e.r_offset.is_finite() || e.r_offset + (e.i_range[0] as f64).ln() / e.growth_exponent <= 0.0 {
            return Err(bad("experiment.r_offset", "first filling radius must be positive"));
        }
        if CtExponent::from_int(e.ct_exponent).is_none() {
            return Err(bad("experiment.ct_exponent", format!("must be 1 or 2, got {}", e.ct_exponent)));
        }
        positive("experiment.growth_exponent", e.growth_exponent)?;
        positive("experiment.convergence_radius", e.convergence_radius)?;
        if e.convergence_problem == ConvergenceProblem::Collar && e.convergence_radius <= self.r_a(e.convergence_radius) {
            return Err(bad("experiment.convergence_radius", "collar is empty"));
        }
        let ce = &e.convergence_elements;
        if ce.len() < 3 || ce.windows(2).any(|w| w[1] != 2 * w[0]) || ce[0] < MeshSpec::MIN_ELEMENTS {
            return Err(bad("experiment.convergence_elements", "need at least 3 doubling element counts"));
        }
        Ok(())
    }

    fn r_a(&self, radius: f64) -> f64 {
        (radius / 2.0).min(self.constants.r_a_infinity)
    }

    /// Canonical TOML of the effective configuration; the hash is taken over this.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        // where the result goes does not change it
        c.output.path = None;
        toml::to_string(&c).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn thick(&self) -> ThickPartSpec<f64> {
        let c = &self.constants;
        ThickPartSpec {
            mu_thick: c.c1,
            lambda_overlap_floor: c.c2,
            c_prime: c.c_prime,
            c_double_prime: c.c_double_prime,
            big_c: c.big_c,
            d_thick: c.d_thick,
            r_a_infinity: c.r_a_infinity,
        }
    }

    pub fn mesh(&self) -> MeshSpec {
        let g = match self.solver.grading {
            GradingKind::Uniform => Grading::Uniform,
            GradingKind::Geometric => Grading::Geometric(self.solver.grading_ratio),
        };
        MeshSpec::new(self.solver.mesh_n, g).expect("validated mesh")
    }

    pub fn weights(&self) -> WeightMode {
        match self.solver.weights {
            WeightKind::Geometric => WeightMode::Geometric,
            WeightKind::Constant => WeightMode::Constant,
        }
    }

    pub fn options(&self) -> PipelineOptions<f64> {
        PipelineOptions {
            mesh: self.mesh(),
            weights: self.weights(),
            ct_exponent: CtExponent::from_int(self.experiment.ct_exponent).expect("validated exponent"),
            growth_exponent: self.experiment.growth_exponent,
        }
    }

    pub fn slope(&self) -> FillingSlope {
        FillingSlope::new(self.experiment.slope[0], self.experiment.slope[1]).expect("validated slope")
    }
}
