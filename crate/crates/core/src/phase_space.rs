//! Coherent states, the coherent-basis inner product, the left-regular
//! position/momentum operators and the translation action.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{apply_axis_multipliers, PhaseFunction, PhaseGrid, Role, MAX_GRID_DIM, WAVEFUNCTION_EDGE_TOL};
use crate::group::ContractionParam;
use crate::polynomial::Polynomial;
use crate::spectral::{self, Direction};

/// Distance a coherent label keeps from the box edge: `e^{−m²/2} < 10⁻¹⁰`,
/// so coherent states satisfy the wavefunction edge invariant.
pub const COHERENT_MARGIN: f64 = 6.8;

/// Minimum grid points per contracted state width `1/k`.
pub const MIN_POINTS_PER_WIDTH: f64 = 8.0;

/// Label `(p_a, x_a)` of a canonical coherent state. The components are half
/// the expectation values of `P` and `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentLabel {
    pub p: Vec<f64>,
    pub x: Vec<f64>,
}

impl CoherentLabel {
    pub fn new(p: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if p.len() != x.len() {
            return Err(Error::DimensionMismatch { left: p.len(), right: x.len() });
        }
        if p.is_empty() || p.len() > MAX_GRID_DIM {
            return Err(Error::UnsupportedDimension { got: p.len(), max: MAX_GRID_DIM });
        }
        if p.iter().chain(&x).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("coherent label must be finite".into()));
        }
        Ok(CoherentLabel { p, x })
    }

    /// The label at the origin.
    pub fn origin(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n], vec![0.0; n])
    }

    /// One-dimensional label from `(p, x)`.
    pub fn pair(p: f64, x: f64) -> Self {
        CoherentLabel { p: vec![p], x: vec![x] }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// Componentwise scaling, e.g. from contracted to group coordinates.
    pub fn scaled(&self, factor: f64) -> Self {
        CoherentLabel {
            p: self.p.iter().map(|v| v * factor).collect(),
            x: self.x.iter().map(|v| v * factor).collect(),
        }
    }

    /// Rejects labels closer than `margin` to the box edge.
    pub fn check_margin(&self, grid: &PhaseGrid, margin: f64) -> Result<()> {
        if self.dim() != grid.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: grid.dim() });
        }
        let worst = self.p.iter().chain(&self.x).map(|v| v.abs()).fold(0.0, f64::max);
        if worst + margin > grid.half_width() {
            return Err(Error::LabelOutsideMargin(format!(
                "|component| {worst} + margin {margin} exceeds half-width {}",
                grid.half_width()
            )));
        }
        Ok(())
    }
}

/// `exp(i(p_a·x − x_a·p)) · exp(−½|z − a|²)`.
pub fn coherent_value(a: &CoherentLabel, p: &[f64], x: &[f64]) -> Complex64 {
    let mut phase = 0.0;
    let mut r2 = 0.0;
    for i in 0..a.dim() {
        phase += a.p[i] * x[i] - a.x[i] * p[i];
        r2 += (p[i] - a.p[i]).powi(2) + (x[i] - a.x[i]).powi(2);
    }
    Complex64::from_polar((-0.5 * r2).exp(), phase)
}

/// Coherent-state wavefunction `φ_a(p, x)` sampled on `grid`.
pub fn coherent_state(a: &CoherentLabel, grid: &PhaseGrid) -> Result<PhaseFunction> {
    a.check_margin(grid, COHERENT_MARGIN)?;
    Ok(PhaseFunction::from_fn(grid, Role::Wavefunction, |p, x| coherent_value(a, p, x)))
}

/// `(1/πⁿ) Σ conj(φ) ψ h^{2n}`.
pub fn inner(phi: &PhaseFunction, psi: &PhaseFunction) -> Result<Complex64> {
    phi.grid().check_same(psi.grid())?;
    let grid = phi.grid();
    let sum = dot_conj(phi.values(), psi.values());
    Ok(sum * grid.cell_volume() / PI.powi(grid.dim() as i32))
}

/// `sqrt(inner(φ, φ))`.
pub fn norm(phi: &PhaseFunction) -> f64 {
    inner(phi, phi).expect("same grid").re.max(0.0).sqrt()
}

/// Rejects wavefunctions whose norm differs from 1 by more than `tol`.
pub fn check_normalized(phi: &PhaseFunction, tol: f64) -> Result<()> {
    let nrm = norm(phi);
    if (nrm - 1.0).abs() > tol {
        return Err(Error::NotNormalized(nrm));
    }
    Ok(())
}

/// Chunked `Σ conj(a) b`, summed in a fixed order.
pub(crate) fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    const CHUNK: usize = 4096;
    let partial: Vec<Complex64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(ca, cb)| ca.iter().zip(cb).map(|(u, v)| u.conj() * v).sum())
        .collect();
    partial.into_iter().sum()
}

/// `X_i^L φ = (x_i + i ∂_{p_i}) φ`.
pub fn apply_xl(phi: &PhaseFunction, axis: usize) -> Result<PhaseFunction> {
    apply_xl_contracted(phi, axis, &ContractionParam::unit())
}

/// `P_i^L φ = (p_i − i ∂_{x_i}) φ`.
pub fn apply_pl(phi: &PhaseFunction, axis: usize) -> Result<PhaseFunction> {
    apply_pl_contracted(phi, axis, &ContractionParam::unit())
}

/// Contracted `X_i^{cL} = x_i + (i/k²) ∂_{p_i}` on contracted coordinates.
pub fn apply_xl_contracted(phi: &PhaseFunction, axis: usize, kp: &ContractionParam) -> Result<PhaseFunction> {
    let n = check_operand(phi, axis)?;
    let coord = PhaseFunction::polynomial(phi.grid(), Polynomial::x(n, axis))?;
    let deriv = phi.derivative_axis(axis, 1).scale(Complex64::new(0.0, kp.inv_k2()));
    Ok(coord.mul(phi)?.add(&deriv)?.with_role(phi.role()))
}

/// Contracted `P_i^{cL} = p_i − (i/k²) ∂_{x_i}`.
pub fn apply_pl_contracted(phi: &PhaseFunction, axis: usize, kp: &ContractionParam) -> Result<PhaseFunction> {
    let n = check_operand(phi, axis)?;
    let coord = PhaseFunction::polynomial(phi.grid(), Polynomial::p(n, axis))?;
    let deriv = phi.derivative_axis(n + axis, 1).scale(Complex64::new(0.0, -kp.inv_k2()));
    Ok(coord.mul(phi)?.add(&deriv)?.with_role(phi.role()))
}

fn check_operand(phi: &PhaseFunction, axis: usize) -> Result<usize> {
    if phi.role() == Role::Density {
        return Err(Error::WrongRole { expected: "wavefunction or observable", got: phi.role().name() });
    }
    let n = phi.grid().dim();
    if axis >= n {
        return Err(Error::DimensionMismatch { left: axis + 1, right: n });
    }
    Ok(n)
}

/// `U(p, x)φ`: `φ(p' − p, x' − x) · exp(i(p·x' − x·p'))`.
///
/// The shift is a Fourier phase ramp, exact for band-limited fields and any
/// real shift. The result must still decay at the box edge.
pub fn translate(phi: &PhaseFunction, p: &[f64], x: &[f64]) -> Result<PhaseFunction> {
    let grid = *phi.grid();
    let n = grid.dim();
    for v in [p.len(), x.len()] {
        if v != n {
            return Err(Error::DimensionMismatch { left: n, right: v });
        }
    }
    if phi.is_polynomial() {
        return Err(Error::InvalidInput("translate needs a boundary-decayed field".into()));
    }
    let shift: Vec<f64> = p.iter().chain(x).copied().collect();
    let freqs = grid.frequencies();
    let shape = grid.shape();
    let axes: Vec<usize> = (0..2 * n).collect();
    let mut data = phi.values().to_vec();
    spectral::fft_axes(&mut data, &shape, &axes, Direction::Forward);
    apply_axis_multipliers(&mut data, &grid, |axis, m| Complex64::from_polar(1.0, -freqs[m] * shift[axis]));
    spectral::fft_axes(&mut data, &shape, &axes, Direction::Inverse);
    data.par_iter_mut().enumerate().for_each(|(i, v)| {
        let mut z = [0.0; 2 * MAX_GRID_DIM];
        grid.point(i, &mut z[..2 * n]);
        let phase: f64 = (0..n).map(|j| p[j] * z[n + j] - x[j] * z[j]).sum();
        *v *= Complex64::from_polar(1.0, phase);
    });
    let out = PhaseFunction::from_values_unchecked(&grid, phi.role(), data);
    if let Err(Error::SupportSpill(msg)) = out.check_boundary(WAVEFUNCTION_EDGE_TOL) {
        return Err(Error::SupportSpill(format!("translated field: {msg}")));
    }
    Ok(out)
}

/// Rejects `k` whose contracted width `1/k` spans fewer than
/// [`MIN_POINTS_PER_WIDTH`] grid points.
pub fn check_resolution(grid: &PhaseGrid, kp: &ContractionParam) -> Result<()> {
    let per_width = 1.0 / (kp.k() * grid.spacing());
    if per_width < MIN_POINTS_PER_WIDTH {
        return Err(Error::Resolution(format!(
            "state width 1/k = {:.4} covers {per_width:.2} grid points (need >= {MIN_POINTS_PER_WIDTH}); \
             increase N or lower k",
            1.0 / kp.k()
        )));
    }
    Ok(())
}

/// Coherent state in contracted coordinates: `φ_{k a}(k p^c, k x^c)`, a
/// Gaussian of width `1/k` centred at the contracted label `a`.
pub fn contracted_coherent_state(
    a: &CoherentLabel,
    grid: &PhaseGrid,
    kp: &ContractionParam,
) -> Result<PhaseFunction> {
    check_resolution(grid, kp)?;
    a.check_margin(grid, COHERENT_MARGIN / kp.k())?;
    let k = kp.k();
    let group_label = a.scaled(k);
    Ok(PhaseFunction::from_fn(grid, Role::Wavefunction, |p, x| {
        let mut zp = [0.0; MAX_GRID_DIM];
        let mut zx = [0.0; MAX_GRID_DIM];
        for i in 0..p.len() {
            zp[i] = k * p[i];
            zx[i] = k * x[i];
        }
        coherent_value(&group_label, &zp[..p.len()], &zx[..p.len()])
    }))
}

/// Inner product of fields sampled in contracted coordinates: the base
/// inner product after the change of variables `z = k z^c`.
pub fn contracted_inner(phi: &PhaseFunction, psi: &PhaseFunction, kp: &ContractionParam) -> Result<Complex64> {
    let jac = kp.k().powi(2 * phi.grid().dim() as i32);
    Ok(inner(phi, psi)? * jac)
}

/// Location `(p, x)` of the maximum of `key`, refined between grid points
/// by a parabola through the logarithms of the neighbouring values (exact
/// for Gaussians).
pub fn peak_by(f: &PhaseFunction, key: impl Fn(Complex64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let grid = f.grid();
    let n = grid.dim();
    let size = grid.size();
    let best = f.argmax_by(&key);
    let mut idx = [0usize; 2 * MAX_GRID_DIM];
    spectral::digits(best, size, &mut idx[..2 * n]);
    let h = grid.spacing();
    let mut coords = Vec::with_capacity(2 * n);
    for axis in 0..2 * n {
        let j = idx[axis];
        let mut z = grid.coordinate(j);
        if j > 0 && j + 1 < size {
            let stride = size.pow((2 * n - 1 - axis) as u32);
            let (lo, mid, hi) = (
                key(f.values()[best - stride]),
                key(f.values()[best]),
                key(f.values()[best + stride]),
            );
            if lo > 0.0 && mid > 0.0 && hi > 0.0 {
                let (l0, l1, l2) = (lo.ln(), mid.ln(), hi.ln());
                let curv = l0 - 2.0 * l1 + l2;
                if curv < 0.0 {
                    let delta = 0.5 * (l0 - l2) / curv;
                    if delta.abs() <= 1.0 {
                        z += delta * h;
                    }
                }
            }
        }
        coords.push(z);
    }
    let x = coords.split_off(n);
    (coords, x)
}

/// Peak of `|φ|` for wavefunctions and of `Re ρ` otherwise.
pub fn peak_location(f: &PhaseFunction) -> (Vec<f64>, Vec<f64>) {
    match f.role() {
        Role::Wavefunction => peak_by(f, |v| v.norm()),
        _ => peak_by(f, |v| v.re),
    }
}

/// Grid point `(p, x)` of the maximum of `key`, without refinement.
pub fn peak_grid_point(f: &PhaseFunction, key: impl Fn(Complex64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let grid = f.grid();
    let n = grid.dim();
    let mut z = vec![0.0; 2 * n];
    grid.point(f.argmax_by(key), &mut z);
    let x = z.split_off(n);
    (z, x)
}
