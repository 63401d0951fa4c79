//! Time evolution in the Schrödinger, Heisenberg and Liouville pictures,
//! their classical counterparts, and the tilde (derivation) generators.
//!
//! Every flow is linear in the evolving field. For a polynomial generator
//! `G` the right-hand side is assembled once as a sum of
//! `coefficient field × Fourier multiplier` terms (the Bopp form of the star
//! product, which terminates for polynomials) and integrated with classical
//! fixed-step RK4. Polynomial observables evolve in coefficient space.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{PhaseFunction, PhaseGrid, Role, MAX_GRID_DIM};
use crate::group::ContractionParam;
use crate::phase_space::{check_normalized, inner, norm, peak_location};
use crate::polynomial::{factorial, multi_indices, Polynomial};
use crate::spectral::{self, Direction};
use crate::star::{star, trace_pair, StarMethod};

/// Spec-level guard: `dt · ‖G‖∞` on the grid.
pub const GENERATOR_GUARD: f64 = 0.5;

/// RK4 is stable on the imaginary axis up to `2√2`; keep a margin.
pub const OPERATOR_GUARD: f64 = 2.5;

/// Total norm (or trace, or mass) drift that fails a run.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// Largest polynomial degree an evolving observable may reach.
pub const MAX_OBSERVABLE_DEGREE: u32 = 12;

/// Real polynomial generator `G(p, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianGenerator {
    name: String,
    poly: Polynomial,
    mass: Option<f64>,
}

impl HamiltonianGenerator {
    pub fn new(name: impl Into<String>, poly: Polynomial) -> Result<Self> {
        if !poly.is_real() {
            return Err(Error::InvalidInput("generator must have real coefficients".into()));
        }
        Ok(HamiltonianGenerator { name: name.into(), poly, mass: None })
    }

    /// `Σ_i p_i² + x_i²`: labels rotate with angular frequency 2.
    pub fn harmonic(n: usize) -> Self {
        let mut g = Polynomial::zero(n);
        for i in 0..n {
            let p = Polynomial::p(n, i);
            let x = Polynomial::x(n, i);
            g = &(&g + &(&p * &p)) + &(&x * &x);
        }
        HamiltonianGenerator { name: "harmonic".into(), poly: g, mass: None }
    }

    /// `Σ_i p_i² / 2m`.
    pub fn free(n: usize, mass: f64) -> Result<Self> {
        check_mass(mass)?;
        let mut g = Polynomial::zero(n);
        for i in 0..n {
            let p = Polynomial::p(n, i);
            g = &g + &(&p * &p).scale(0.5 / mass);
        }
        Ok(HamiltonianGenerator { name: "free".into(), poly: g, mass: Some(mass) })
    }

    /// `Σ_i (p_i² + x_i²)/2`: unit-frequency oscillator for classical runs.
    pub fn classical_harmonic(n: usize) -> Self {
        HamiltonianGenerator {
            name: "classical-harmonic".into(),
            poly: Self::harmonic(n).poly.scale(0.5),
            mass: None,
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        HamiltonianGenerator { name: "constant".into(), poly: Polynomial::constant(n, c), mass: None }
    }

    pub fn zero(n: usize) -> Self {
        HamiltonianGenerator { name: "zero".into(), poly: Polynomial::zero(n), mass: None }
    }

    /// Catalog lookup: `harmonic`, `free` (needs a mass), `classical-harmonic`,
    /// `zero`.
    pub fn by_name(name: &str, n: usize, mass: Option<f64>) -> Result<Self> {
        match name {
            "harmonic" => Ok(Self::harmonic(n)),
            "free" => Self::free(n, mass.unwrap_or(1.0)),
            "classical-harmonic" => Ok(Self::classical_harmonic(n)),
            "zero" => Ok(Self::zero(n)),
            other => Err(Error::InvalidInput(format!(
                "unknown generator `{other}`; expected harmonic, free, classical-harmonic or zero"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn mass(&self) -> Option<f64> {
        self.mass
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    /// `G` sampled on `grid`, tagged polynomial.
    pub fn field(&self, grid: &PhaseGrid) -> Result<PhaseFunction> {
        PhaseFunction::polynomial(grid, self.poly.clone())
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidInput(format!("mass must be finite and > 0, got {mass}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    /// Snapshot interval in steps; 0 keeps only the initial and final fields.
    pub save_every: usize,
}

impl EvolutionConfig {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        let cfg = EvolutionConfig { dt, steps, save_every: 0 };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `steps` equal steps reaching exactly `t_final`.
    pub fn to_time(t_final: f64, steps: usize) -> Result<Self> {
        Self::new(t_final / steps as f64, steps)
    }

    pub fn with_save_every(mut self, every: usize) -> Self {
        self.save_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidInput(format!("dt must be finite and > 0, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidInput("steps must be >= 1".into()));
        }
        Ok(())
    }

    pub fn final_time(&self) -> f64 {
        self.dt * self.steps as f64
    }

    fn saves(&self, step: usize) -> bool {
        step == self.steps || (self.save_every > 0 && step.is_multiple_of(self.save_every))
    }
}

/// Diagnostics recorded with each snapshot. `norm` is `‖φ‖` for
/// wavefunctions, `Tr ρ` (or plain mass for classical runs) for densities
/// and the sup norm for observables; quantities without meaning for a role
/// are NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    pub peak_p: f64,
    pub peak_x: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub snapshots: Vec<PhaseFunction>,
    pub records: Vec<TrajectoryRecord>,
    /// Largest single-step change of the conserved norm.
    pub max_step_drift: f64,
    /// Final minus initial conserved norm.
    pub total_drift: f64,
}

impl Trajectory {
    pub fn final_field(&self) -> &PhaseFunction {
        self.snapshots.last().expect("a trajectory holds the initial field")
    }

    pub fn final_record(&self) -> &TrajectoryRecord {
        self.records.last().expect("a trajectory holds the initial record")
    }
}

/// Which flow a linear operator implements.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Flow {
    /// `(1/2i) G ⋆ φ`.
    Schrodinger,
    /// `(1/2i)(G ⋆ ρ − ρ ⋆ G)`.
    Liouville,
    /// `(k²/2i)(α ⋆_k G − G ⋆_k α)`.
    Heisenberg { k: f64 },
    /// `{G, ρ}`.
    ClassicalLiouville,
    /// `{α, G}`.
    ClassicalHeisenberg,
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flow::Schrodinger => "Schrödinger",
            Flow::Liouville => "Liouville",
            Flow::Heisenberg { .. } => "Heisenberg",
            Flow::ClassicalLiouville => "classical Liouville",
            Flow::ClassicalHeisenberg => "classical Heisenberg",
        };
        f.write_str(s)
    }
}

enum Coef {
    Const(Complex64),
    Field(Vec<Complex64>),
}

/// `L f = local·f + Σ_t coef_t · F⁻¹[mult_t · F f]`.
struct LinearOp {
    grid: PhaseGrid,
    local: Option<Vec<Complex64>>,
    terms: Vec<(Coef, Vec<Complex64>)>,
}

impl LinearOp {
    fn build(g: &Polynomial, grid: &PhaseGrid, flow: Flow) -> Result<Self> {
        let n = grid.dim();
        let freqs = grid.frequencies();
        let mask = spectral::two_thirds_mask(grid.size());
        let i = Complex64::new(0.0, 1.0);
        let sample = |q: &Polynomial| -> Result<Coef> {
            if q.degree() == 0 {
                Ok(Coef::Const(q.eval(&vec![0.0; n], &vec![0.0; n])))
            } else {
                Ok(Coef::Field(PhaseFunction::polynomial(grid, q.clone())?.into_values()))
            }
        };
        // Per-axis multiplier tables combined into a full (masked) array.
        let full_multiplier = |tables: &[Vec<Complex64>]| -> Vec<Complex64> {
            let axes = grid.axes();
            let size = grid.size();
            (0..grid.len())
                .into_par_iter()
                .map(|flat| {
                    let mut idx = [0usize; 2 * MAX_GRID_DIM];
                    spectral::digits(flat, size, &mut idx[..axes]);
                    if idx[..axes].iter().any(|&m| !mask[m]) {
                        return Complex64::new(0.0, 0.0);
                    }
                    (0..axes).map(|a| tables[a][idx[a]]).product()
                })
                .collect()
        };

        let mut local = None;
        let mut raw: Vec<(Coef, Vec<Complex64>)> = Vec::new();
        match flow {
            Flow::Schrodinger | Flow::Liouville | Flow::Heisenberg { .. } => {
                let (s, scale, lw, rw) = match flow {
                    Flow::Schrodinger => (1.0, Complex64::new(0.0, -0.5), 1.0, 0.0),
                    Flow::Liouville => (1.0, Complex64::new(0.0, -0.5), 1.0, -1.0),
                    Flow::Heisenberg { k } => (1.0 / (k * k), Complex64::new(0.0, -0.5 * k * k), -1.0, 1.0),
                    _ => unreachable!(),
                };
                for idx in multi_indices(2 * n, g.degree()) {
                    let total: u32 = idx.iter().sum();
                    let weight = lw + if total % 2 == 0 { rw } else { -rw };
                    if weight == 0.0 {
                        continue;
                    }
                    let d = g.derivative(&idx);
                    if d.is_zero() {
                        continue;
                    }
                    let denom: f64 = idx.iter().map(|&o| factorial(o)).product();
                    let coef = d.scale(scale * (weight / denom));
                    if total == 0 {
                        local = Some(PhaseFunction::polynomial(grid, coef)?.into_values());
                        continue;
                    }
                    // G ⋆ f: p-orders of G pair with (s η) on the x axes of
                    // f, x-orders with (−s κ) on the p axes.
                    let tables: Vec<Vec<Complex64>> = (0..2 * n)
                        .map(|axis| {
                            freqs
                                .iter()
                                .map(|&w| {
                                    if axis < n {
                                        Complex64::new(-s * w, 0.0).powu(idx[n + axis])
                                    } else {
                                        Complex64::new(s * w, 0.0).powu(idx[axis - n])
                                    }
                                })
                                .collect()
                        })
                        .collect();
                    raw.push((sample(&coef)?, full_multiplier(&tables)));
                }
            }
            Flow::ClassicalLiouville | Flow::ClassicalHeisenberg => {
                let sign = if flow == Flow::ClassicalLiouville { 1.0 } else { -1.0 };
                for ax in 0..n {
                    // ∂_{x}G · ∂_{p}f and −∂_{p}G · ∂_{x}f.
                    for (coef_poly, deriv_axis) in [
                        (g.derivative_axis(n + ax, 1).scale(sign), ax),
                        (g.derivative_axis(ax, 1).scale(-sign), n + ax),
                    ] {
                        if coef_poly.is_zero() {
                            continue;
                        }
                        let tables: Vec<Vec<Complex64>> = (0..2 * n)
                            .map(|axis| {
                                freqs
                                    .iter()
                                    .map(|&w| if axis == deriv_axis { i * w } else { Complex64::new(1.0, 0.0) })
                                    .collect()
                            })
                            .collect();
                        raw.push((sample(&coef_poly)?, full_multiplier(&tables)));
                    }
                }
            }
        }

        // Merge the constant-coefficient terms into one multiplier.
        let mut terms = Vec::new();
        let mut merged: Option<Vec<Complex64>> = None;
        for (coef, mult) in raw {
            match coef {
                Coef::Const(c) => {
                    let acc = merged.get_or_insert_with(|| vec![Complex64::new(0.0, 0.0); grid.len()]);
                    acc.iter_mut().zip(&mult).for_each(|(a, m)| *a += c * m);
                }
                Coef::Field(_) => terms.push((coef, mult)),
            }
        }
        if let Some(m) = merged {
            terms.push((Coef::Const(Complex64::new(1.0, 0.0)), m));
        }
        Ok(LinearOp { grid: *grid, local, terms })
    }

    /// Upper bound on the spectral radius of the discretised operator.
    fn bound(&self) -> f64 {
        let sup = |v: &[Complex64]| v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut b = self.local.as_deref().map_or(0.0, sup);
        for (coef, mult) in &self.terms {
            let c = match coef {
                Coef::Const(c) => c.norm(),
                Coef::Field(f) => sup(f),
            };
            b += c * sup(mult);
        }
        b
    }

    fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut out = match &self.local {
            Some(l) => l.par_iter().zip(f).map(|(a, b)| a * b).collect(),
            None => vec![Complex64::new(0.0, 0.0); f.len()],
        };
        if self.terms.is_empty() {
            return out;
        }
        let shape = self.grid.shape();
        let axes: Vec<usize> = (0..self.grid.axes()).collect();
        let mut hat = f.to_vec();
        spectral::fft_axes(&mut hat, &shape, &axes, Direction::Forward);
        let mut buf = vec![Complex64::new(0.0, 0.0); f.len()];
        for (coef, mult) in &self.terms {
            buf.par_iter_mut()
                .zip(hat.par_iter().zip(mult))
                .for_each(|(b, (h, m))| *b = h * m);
            spectral::fft_axes(&mut buf, &shape, &axes, Direction::Inverse);
            match coef {
                Coef::Const(c) => out.par_iter_mut().zip(&buf).for_each(|(o, b)| *o += c * b),
                Coef::Field(c) => out
                    .par_iter_mut()
                    .zip(c.par_iter().zip(&buf))
                    .for_each(|(o, (cc, b))| *o += cc * b),
            }
        }
        out
    }
}

fn rk4_step(y: &mut [Complex64], dt: f64, rhs: impl Fn(&[Complex64]) -> Vec<Complex64>) {
    let axpy = |a: f64, k: &[Complex64]| -> Vec<Complex64> {
        y.par_iter().zip(k).map(|(u, v)| u + v * a).collect()
    };
    let k1 = rhs(y);
    let k2 = rhs(&axpy(0.5 * dt, &k1));
    let k3 = rhs(&axpy(0.5 * dt, &k2));
    let k4 = rhs(&axpy(dt, &k3));
    y.par_iter_mut().enumerate().for_each(|(j, v)| {
        *v += (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (dt / 6.0);
    });
}

fn check_generator(g: &HamiltonianGenerator, grid: &PhaseGrid, cfg: &EvolutionConfig) -> Result<()> {
    cfg.validate()?;
    if g.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { left: g.dim(), right: grid.dim() });
    }
    let sup = g.field(grid)?.sup_norm();
    if cfg.dt * sup > GENERATOR_GUARD {
        return Err(Error::StabilityGuard(format!(
            "dt·‖G‖∞ = {:.4} exceeds {GENERATOR_GUARD} (‖G‖∞ = {sup:.4} on this grid); reduce dt",
            cfg.dt * sup
        )));
    }
    Ok(())
}

fn check_operator(op: &LinearOp, cfg: &EvolutionConfig, flow: Flow) -> Result<()> {
    let b = op.bound();
    if cfg.dt * b > OPERATOR_GUARD {
        return Err(Error::StabilityGuard(format!(
            "{flow} operator: dt·bound = {:.4} exceeds {OPERATOR_GUARD}; reduce dt below {:.3e}",
            cfg.dt * b,
            OPERATOR_GUARD / b
        )));
    }
    Ok(())
}

fn check_role(f: &PhaseFunction, want: Role) -> Result<()> {
    if f.role() != want {
        return Err(Error::WrongRole { expected: want.name(), got: f.role().name() });
    }
    Ok(())
}

/// Conserved quantity tracked for drift.
#[derive(Clone, Copy)]
enum Conserved {
    Norm,
    Trace,
    Mass,
    None,
}

fn conserved_value(kind: Conserved, grid: &PhaseGrid, values: &[Complex64]) -> f64 {
    match kind {
        Conserved::Norm => {
            let f = PhaseFunction::from_values_unchecked(grid, Role::Wavefunction, values.to_vec());
            norm(&f)
        }
        Conserved::Trace => {
            let n = grid.dim() as i32;
            values.iter().map(|v| v.re).sum::<f64>() * grid.cell_volume()
                / (4f64.powi(n) * std::f64::consts::PI.powi(n))
        }
        Conserved::Mass => values.iter().map(|v| v.re).sum::<f64>() * grid.cell_volume(),
        Conserved::None => 0.0,
    }
}

fn record_for(
    f: &PhaseFunction,
    t: f64,
    g: &HamiltonianGenerator,
    kind: Conserved,
) -> Result<TrajectoryRecord> {
    let grid = f.grid();
    let gfield = g.field(grid)?;
    let (norm_v, energy, peak) = match (f.role(), kind) {
        (Role::Wavefunction, _) => {
            let gphi = star(&gfield, f, StarMethod::Spectral, &ContractionParam::unit())?;
            let nrm = norm(f);
            (nrm, inner(f, &gphi)?.re / (nrm * nrm), Some(peak_location(f)))
        }
        (Role::Density, Conserved::Mass) => {
            let mass = conserved_value(Conserved::Mass, grid, f.values());
            let e = gfield.values().iter().zip(f.values()).map(|(a, b)| (a * b).re).sum::<f64>()
                * grid.cell_volume()
                / mass;
            (mass, e, Some(peak_location(f)))
        }
        (Role::Density, _) => {
            let tr = trace_pair(&PhaseFunction::constant(grid, 1.0), f)?.re;
            (tr, trace_pair(&gfield, f)?.re / tr, Some(peak_location(f)))
        }
        (Role::Observable, _) => (f.sup_norm(), f64::NAN, None),
    };
    let (peak_p, peak_x) = match peak {
        Some((p, x)) => (p[0], x[0]),
        None => (f64::NAN, f64::NAN),
    };
    Ok(TrajectoryRecord { t, norm: norm_v, energy, peak_p, peak_x })
}

fn run_sampled(
    init: &PhaseFunction,
    g: &HamiltonianGenerator,
    cfg: &EvolutionConfig,
    flow: Flow,
    kind: Conserved,
) -> Result<Trajectory> {
    let grid = *init.grid();
    check_generator(g, &grid, cfg)?;
    if init.is_polynomial() {
        return Err(Error::InvalidInput(format!(
            "{flow} evolution of a sampled field needs a boundary-decayed field"
        )));
    }
    let op = LinearOp::build(g.polynomial(), &grid, flow)?;
    check_operator(&op, cfg, flow)?;

    let role = init.role();
    let mut y = init.values().to_vec();
    let mut snapshots = vec![init.clone()];
    let mut records = vec![record_for(init, 0.0, g, kind)?];
    let c0 = conserved_value(kind, &grid, &y);
    let mut prev = c0;
    let mut max_step_drift = 0.0f64;
    for step in 1..=cfg.steps {
        rk4_step(&mut y, cfg.dt, |v| op.apply(v));
        let c = conserved_value(kind, &grid, &y);
        max_step_drift = max_step_drift.max((c - prev).abs());
        prev = c;
        if cfg.saves(step) {
            let f = PhaseFunction::from_values_unchecked(&grid, role, y.clone());
            records.push(record_for(&f, step as f64 * cfg.dt, g, kind)?);
            snapshots.push(f);
        }
    }
    let total_drift = prev - c0;
    if total_drift.abs() > DRIFT_LIMIT * c0.abs().max(1.0) {
        return Err(Error::Accuracy(format!(
            "{flow} run drifted by {total_drift:.3e} in its conserved norm (limit {DRIFT_LIMIT:.0e}); reduce dt"
        )));
    }
    Ok(Trajectory { snapshots, records, max_step_drift, total_drift })
}

fn run_polynomial(
    init: &PhaseFunction,
    g: &HamiltonianGenerator,
    cfg: &EvolutionConfig,
    flow: Flow,
) -> Result<Trajectory> {
    let grid = *init.grid();
    check_generator(g, &grid, cfg)?;
    let gp = g.polynomial();
    let rhs = |a: &Polynomial| -> Result<Polynomial> {
        match flow {
            Flow::Heisenberg { k } => {
                let s = 1.0 / (k * k);
                Ok(a.moyal_bracket(gp, s)?.scale(Complex64::new(0.0, -0.5 * k * k)))
            }
            Flow::ClassicalHeisenberg => a.poisson_bracket(gp),
            _ => unreachable!("only observable flows run in coefficient space"),
        }
    };
    let mut a = init.as_polynomial().expect("polynomial field").clone();
    let mut snapshots = vec![init.clone()];
    let mut records = vec![record_for(init, 0.0, g, Conserved::None)?];
    let dt = cfg.dt;
    for step in 1..=cfg.steps {
        let k1 = rhs(&a)?;
        let k2 = rhs(&(&a + &k1.scale(0.5 * dt)))?;
        let k3 = rhs(&(&a + &k2.scale(0.5 * dt)))?;
        let k4 = rhs(&(&a + &k3.scale(dt)))?;
        let incr = &(&k1 + &k2.scale(2.0)) + &(&k3.scale(2.0) + &k4);
        a = &a + &incr.scale(dt / 6.0);
        if a.degree() > MAX_OBSERVABLE_DEGREE {
            return Err(Error::InvalidInput(format!(
                "observable degree grew past {MAX_OBSERVABLE_DEGREE}; evolve a sampled observable instead"
            )));
        }
        if cfg.saves(step) {
            let f = PhaseFunction::polynomial(&grid, a.clone())?.with_role(init.role());
            records.push(record_for(&f, step as f64 * dt, g, Conserved::None)?);
            snapshots.push(f);
        }
    }
    Ok(Trajectory { snapshots, records, max_step_drift: 0.0, total_drift: 0.0 })
}

/// `dφ/dt = (1/2i) G ⋆ φ`.
pub fn schrodinger_evolve(phi: &PhaseFunction, g: &HamiltonianGenerator, cfg: &EvolutionConfig) -> Result<Trajectory> {
    check_role(phi, Role::Wavefunction)?;
    check_normalized(phi, 1e-6)?;
    run_sampled(phi, g, cfg, Flow::Schrodinger, Conserved::Norm)
}

/// `dα/dt = (1/2i)(α ⋆ G − G ⋆ α)`.
pub fn heisenberg_evolve(alpha: &PhaseFunction, g: &HamiltonianGenerator, cfg: &EvolutionConfig) -> Result<Trajectory> {
    contracted_heisenberg_evolve(alpha, g, cfg, &ContractionParam::unit())
}

/// `dα/dt = (k²/2i)(α ⋆_k G − G ⋆_k α)`; `k = 1` is the quantum flow and
/// `k → ∞` the classical one.
pub fn contracted_heisenberg_evolve(
    alpha: &PhaseFunction,
    g: &HamiltonianGenerator,
    cfg: &EvolutionConfig,
    kp: &ContractionParam,
) -> Result<Trajectory> {
    check_role(alpha, Role::Observable)?;
    let flow = Flow::Heisenberg { k: kp.k() };
    if alpha.is_polynomial() {
        run_polynomial(alpha, g, cfg, flow)
    } else {
        run_sampled(alpha, g, cfg, flow, Conserved::None)
    }
}

/// `dρ/dt = (1/2i)(G ⋆ ρ − ρ ⋆ G)`.
pub fn liouville_evolve(rho: &PhaseFunction, g: &HamiltonianGenerator, cfg: &EvolutionConfig) -> Result<Trajectory> {
    check_role(rho, Role::Density)?;
    run_sampled(rho, g, cfg, Flow::Liouville, Conserved::Trace)
}

/// `dρ/dt = {G, ρ}`, conserving the plain mass `∫ρ`.
pub fn classical_liouville_evolve(
    rho: &PhaseFunction,
    g: &HamiltonianGenerator,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    check_role(rho, Role::Density)?;
    run_sampled(rho, g, cfg, Flow::ClassicalLiouville, Conserved::Mass)
}

/// `dα/dt = {α, G}`.
pub fn classical_heisenberg_evolve(
    alpha: &PhaseFunction,
    g: &HamiltonianGenerator,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    check_role(alpha, Role::Observable)?;
    if alpha.is_polynomial() {
        run_polynomial(alpha, g, cfg, Flow::ClassicalHeisenberg)
    } else {
        run_sampled(alpha, g, cfg, Flow::ClassicalHeisenberg, Conserved::None)
    }
}

/// Tilde generators: `p̃_i = 2i ∂_{x_i}`, `x̃_i = 2i ∂_{p_i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tilde {
    P(usize),
    X(usize),
}

pub fn tilde_apply(which: Tilde, alpha: &PhaseFunction) -> Result<PhaseFunction> {
    let n = alpha.grid().dim();
    let (axis, i) = match which {
        Tilde::P(i) => (n + i, i),
        Tilde::X(i) => (i, i),
    };
    if i >= n {
        return Err(Error::DimensionMismatch { left: i + 1, right: n });
    }
    Ok(alpha.derivative_axis(axis, 1).scale(Complex64::new(0.0, 2.0)))
}

/// Contracted free-particle tilde generator `G̃ = (−iħ/m) Σ_i p_i ∂_{x_i}`
/// on contracted coordinates. It does not depend on `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeParticleTilde {
    mass: f64,
    k: f64,
}

pub fn free_particle_tilde_generator(mass: f64, kp: &ContractionParam) -> Result<FreeParticleTilde> {
    check_mass(mass)?;
    Ok(FreeParticleTilde { mass, k: kp.k() })
}

impl FreeParticleTilde {
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `G̃ ρ`.
    pub fn apply(&self, rho: &PhaseFunction) -> Result<PhaseFunction> {
        let grid = rho.grid();
        let n = grid.dim();
        let mut out = PhaseFunction::constant(grid, 0.0).with_role(rho.role());
        for i in 0..n {
            let p = PhaseFunction::polynomial(grid, Polynomial::p(n, i))?;
            out = out.add(&p.mul(&rho.derivative_axis(n + i, 1))?)?;
        }
        Ok(out.scale(Complex64::new(0.0, -crate::group::HBAR / self.mass)).with_role(rho.role()))
    }

    /// `(1/2i) G̃ ρ = −(p/m)·∂_x ρ`, the advection field of `p²/2m`.
    pub fn rhs(&self, rho: &PhaseFunction) -> Result<PhaseFunction> {
        Ok(self.apply(rho)?.scale(Complex64::new(0.0, -0.5)))
    }
}
