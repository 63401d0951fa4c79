//! JSON experiment configuration.
//!
//! Every field is optional; unset fields fall back to per-experiment
//! defaults when the run resolves them. Unknown keys are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wwgm::{
    CoherentLabel, ContractionParam, CosetAlgebraParams, CosetPoint, EvolutionConfig, HamiltonianGenerator,
    PhaseFunction, PhaseGrid, Polynomial, Role, StarMethod,
};

use crate::RunError;

/// Highest total degree a catalog monomial may have.
pub const MAX_MONOMIAL_DEGREE: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Coherent,
    StarCheck,
    Evolve,
    SweepK,
    Coset,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Coherent => "coherent",
            Experiment::StarCheck => "star-check",
            Experiment::Evolve => "evolve",
            Experiment::SweepK => "sweep-k",
            Experiment::Coset => "coset",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Picture {
    Schrodinger,
    Heisenberg,
    ContractedHeisenberg,
    Liouville,
    ClassicalLiouville,
    ClassicalHeisenberg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Overlap,
    LeftOperator,
    Commutativization,
    Bracket,
    Theta,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Overlap => "overlap",
            SweepKind::LeftOperator => "left-operator",
            SweepKind::Commutativization => "commutativization",
            SweepKind::Bracket => "bracket",
            SweepKind::Theta => "theta",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "one_dim")]
    pub n: usize,
    pub size: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

fn one_dim() -> usize {
    1
}

fn default_half_width() -> f64 {
    8.0
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelConfig {
    pub p: Vec<f64>,
    pub x: Vec<f64>,
}

/// Closed observable catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Observable {
    /// `coefficient · Π p_i^{p[i]} x_i^{x[i]}`, total degree at most 4.
    Monomial {
        #[serde(default = "unit")]
        coefficient: f64,
        p: Vec<u32>,
        x: Vec<u32>,
    },
    /// `amplitude · exp(−|z − c|² / 2w²)`.
    Gaussian {
        #[serde(default = "unit")]
        amplitude: f64,
        center_p: Vec<f64>,
        center_x: Vec<f64>,
        width: f64,
    },
}

impl Observable {
    pub fn monomial(p: &[u32], x: &[u32]) -> Self {
        Observable::Monomial { coefficient: 1.0, p: p.to_vec(), x: x.to_vec() }
    }

    /// Comma-free display name used in report rows.
    pub fn name(&self) -> String {
        match self {
            Observable::Monomial { coefficient, p, x } => {
                let n = p.len();
                let mut factors = Vec::new();
                for (sym, exps) in [("p", p), ("x", x)] {
                    for (i, &e) in exps.iter().enumerate() {
                        let var = if n == 1 { sym.to_string() } else { format!("{sym}{}", i + 1) };
                        match e {
                            0 => {}
                            1 => factors.push(var),
                            e => factors.push(format!("{var}^{e}")),
                        }
                    }
                }
                let body = if factors.is_empty() { "1".to_string() } else { factors.join(" ") };
                if *coefficient == 1.0 {
                    body
                } else {
                    format!("{coefficient} {body}")
                }
            }
            Observable::Gaussian { amplitude, center_p, center_x, width } => {
                let join = |v: &[f64]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
                format!("{amplitude} gauss(p=[{}] x=[{}] w={width})", join(center_p), join(center_x))
            }
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), RunError> {
        match self {
            Observable::Monomial { coefficient, p, x } => {
                if p.len() != n || x.len() != n {
                    return Err(invalid(format!("monomial exponents need {n} entries per axis kind")));
                }
                let degree: u32 = p.iter().chain(x).sum();
                if degree > MAX_MONOMIAL_DEGREE {
                    return Err(invalid(format!(
                        "monomial degree {degree} exceeds the catalog limit {MAX_MONOMIAL_DEGREE}"
                    )));
                }
                finite("monomial coefficient", *coefficient)
            }
            Observable::Gaussian { amplitude, center_p, center_x, width } => {
                if center_p.len() != n || center_x.len() != n {
                    return Err(invalid(format!("gaussian centre needs {n} entries per axis kind")));
                }
                finite("gaussian amplitude", *amplitude)?;
                for &c in center_p.iter().chain(center_x) {
                    finite("gaussian centre", c)?;
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(invalid(format!("gaussian width must be finite and > 0, got {width}")));
                }
                Ok(())
            }
        }
    }

    /// Polynomial observables stay tagged so the exact algebra applies.
    pub fn build(&self, grid: &PhaseGrid) -> Result<PhaseFunction, RunError> {
        self.validate(grid.dim())?;
        match self {
            Observable::Monomial { coefficient, p, x } => {
                let exps: Vec<u32> = p.iter().chain(x).copied().collect();
                let poly = Polynomial::monomial(grid.dim(), exps, *coefficient);
                Ok(PhaseFunction::polynomial(grid, poly)?)
            }
            Observable::Gaussian { amplitude, center_p, center_x, width } => {
                let a = *amplitude;
                let s = 2.0 * width * width;
                Ok(PhaseFunction::from_fn(grid, Role::Observable, |p, x| {
                    let r2: f64 = p.iter().zip(center_p).chain(x.iter().zip(center_x)).map(|(v, c)| (v - c).powi(2)).sum();
                    Complex64::new(a * (-r2 / s).exp(), 0.0)
                }))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StarConfig {
    Spectral {},
    Series { order: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetPointConfig {
    pub p: Vec<f64>,
    pub x: Vec<f64>,
    #[serde(default)]
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetConfig {
    /// Antisymmetric rotation block; zero when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<Vec<f64>>>,
    pub p_bar: Vec<f64>,
    pub x_bar: Vec<f64>,
    #[serde(default)]
    pub theta_bar: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<CosetPointConfig>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<LabelConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub picture: Option<Picture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub save_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<StarConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coset: Option<CosetConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

/// Command-line overrides of top-level scalar fields.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub k_values: Option<Vec<f64>>,
    pub grid_n: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub steps: Option<usize>,
    pub save_every: Option<usize>,
    pub output_dir: Option<String>,
}

pub const DEFAULT_STEPS: usize = 100;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_OUTPUT_DIR: &str = "wwgm-out";

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = &o.k_values {
            self.k_values = Some(k.clone());
        }
        if let Some(size) = o.grid_n {
            let base = self.grid.unwrap_or(GridConfig { n: 1, size, half_width: default_half_width() });
            self.grid = Some(GridConfig { size, ..base });
        }
        if o.dt.is_some() {
            self.dt = o.dt;
        }
        if o.t_final.is_some() {
            self.t_final = o.t_final;
        }
        if o.steps.is_some() {
            self.steps = o.steps;
        }
        if o.save_every.is_some() {
            self.save_every = o.save_every;
        }
        if o.output_dir.is_some() {
            self.output_dir = o.output_dir.clone();
        }
    }

    /// Rejects a config written for a different subcommand.
    pub fn check_experiment(&self, run: Experiment) -> Result<(), RunError> {
        match self.experiment {
            Some(e) if e != run => Err(invalid(format!(
                "config is for `{}` but `{}` was requested",
                e.name(),
                run.name()
            ))),
            _ => Ok(()),
        }
    }

    /// Sweeps default to a grid fine enough for `k = 8` probes.
    pub fn grid(&self, run: Experiment) -> Result<PhaseGrid, RunError> {
        let g = self.grid.unwrap_or(GridConfig {
            n: 1,
            size: if run == Experiment::SweepK { 1024 } else { 128 },
            half_width: default_half_width(),
        });
        Ok(PhaseGrid::new(g.n, g.size, g.half_width)?)
    }

    pub fn labels_or(&self, defaults: Vec<CoherentLabel>) -> Result<Vec<CoherentLabel>, RunError> {
        if self.labels.is_empty() {
            return Ok(defaults);
        }
        self.labels.iter().map(|l| Ok(CoherentLabel::new(l.p.clone(), l.x.clone())?)).collect()
    }

    pub fn observables_or(&self, defaults: Vec<Observable>) -> Vec<Observable> {
        if self.observables.is_empty() {
            defaults
        } else {
            self.observables.clone()
        }
    }

    pub fn generator(&self, n: usize) -> Result<HamiltonianGenerator, RunError> {
        match &self.hamiltonian {
            None => Ok(HamiltonianGenerator::harmonic(n)),
            Some(h) => Ok(HamiltonianGenerator::by_name(&h.name, n, h.mass)?),
        }
    }

    pub fn picture(&self) -> Picture {
        self.picture.unwrap_or(Picture::Schrodinger)
    }

    /// `t_final` with `steps` equal steps, or `dt` per step; not both.
    pub fn evolution(&self) -> Result<EvolutionConfig, RunError> {
        let steps = self.steps.unwrap_or(DEFAULT_STEPS);
        let cfg = match (self.dt, self.t_final) {
            (Some(_), Some(_)) => return Err(invalid("set either dt or t_final, not both".into())),
            (None, Some(t)) => EvolutionConfig::to_time(t, steps)?,
            (dt, None) => EvolutionConfig::new(dt.unwrap_or(DEFAULT_DT), steps)?,
        };
        Ok(cfg.with_save_every(self.save_every.unwrap_or(0)))
    }

    pub fn k_values(&self) -> Result<Vec<f64>, RunError> {
        let ks = self.k_values.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
        if ks.is_empty() {
            return Err(invalid("k_values must not be empty".into()));
        }
        for &k in &ks {
            ContractionParam::new(k)?;
        }
        Ok(ks)
    }

    pub fn star_method(&self) -> Result<StarMethod, RunError> {
        match self.star.unwrap_or(StarConfig::Spectral {}) {
            StarConfig::Spectral {} => Ok(StarMethod::Spectral),
            StarConfig::Series { order } => Ok(StarMethod::series(order)?),
        }
    }

    pub fn sweep(&self) -> SweepKind {
        self.sweep.unwrap_or(SweepKind::Overlap)
    }

    /// Defaults to a unit momentum shift `p̄ = 1`, evaluated at `x = 2`.
    pub fn coset(&self, n: usize) -> Result<(CosetAlgebraParams, Vec<CosetPoint>), RunError> {
        let default_point = || CosetPoint { p: vec![0.0; n], x: vec![2.0; n], theta: 0.0 };
        let Some(c) = &self.coset else {
            let params = CosetAlgebraParams::translation(vec![1.0; n], vec![0.0; n], 0.0)?;
            return Ok((params, vec![default_point()]));
        };
        let dim = c.p_bar.len();
        let omega = c.omega.clone().unwrap_or_else(|| vec![vec![0.0; dim]; dim]);
        let params = CosetAlgebraParams::new(omega, c.p_bar.clone(), c.x_bar.clone(), c.theta_bar)?;
        let points = if c.points.is_empty() {
            vec![CosetPoint { p: vec![0.0; dim], x: vec![2.0; dim], theta: 0.0 }]
        } else {
            c.points.iter().map(|q| CosetPoint { p: q.p.clone(), x: q.x.clone(), theta: q.theta }).collect()
        };
        Ok((params, points))
    }

    pub fn output_dir(&self) -> String {
        self.output_dir.clone().unwrap_or_else(|| DEFAULT_OUTPUT_DIR.to_string())
    }
}

fn invalid(msg: String) -> RunError {
    RunError::Config(msg)
}

fn finite(what: &str, v: f64) -> Result<(), RunError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{what} must be finite, got {v}")))
    }
}
