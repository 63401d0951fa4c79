//! Phase-space grids and the fields that live on them.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::spectral::{self, Direction};

/// Largest spatial dimension the grid numerics support.
pub const MAX_GRID_DIM: usize = 2;

/// Uniform rectangular grid on the 2n-dimensional phase space.
///
/// Every axis carries `size` points `-L + j·h`, `h = 2L/size`. Storage is
/// row-major with the momentum axes outermost: `[p_1..p_n, x_1..x_n]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    n: usize,
    size: usize,
    half_width: f64,
}

impl PhaseGrid {
    pub const MIN_SIZE: usize = 16;

    pub fn new(n: usize, size: usize, half_width: f64) -> Result<Self> {
        if n == 0 || n > MAX_GRID_DIM {
            return Err(Error::UnsupportedDimension { got: n, max: MAX_GRID_DIM });
        }
        if size < Self::MIN_SIZE || !size.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= {}, got {size}",
                Self::MIN_SIZE
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half-width must be finite and > 0, got {half_width}")));
        }
        Ok(PhaseGrid { n, size, half_width })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.size as f64
    }

    /// Number of axes, `2n`.
    pub fn axes(&self) -> usize {
        2 * self.n
    }

    pub fn len(&self) -> usize {
        self.size.pow(self.axes() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.size; self.axes()]
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.size).map(|j| self.coordinate(j)).collect()
    }

    /// Quadrature weight `h^{2n}`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.axes() as i32)
    }

    /// Fills `z = [p_1..p_n, x_1..x_n]` with the coordinates of `flat`.
    #[inline]
    pub fn point(&self, flat: usize, z: &mut [f64]) {
        let mut idx = [0usize; 2 * MAX_GRID_DIM];
        spectral::digits(flat, self.size, &mut idx[..self.axes()]);
        for (zi, &j) in z.iter_mut().zip(&idx[..self.axes()]) {
            *zi = self.coordinate(j);
        }
    }

    /// Angular frequencies along any axis, FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        spectral::angular_frequencies(self.size, self.spacing())
    }

    /// Indices of the edge points along `axis` (first and last slabs).
    pub(crate) fn on_edge(&self, flat: usize) -> bool {
        let mut idx = [0usize; 2 * MAX_GRID_DIM];
        spectral::digits(flat, self.size, &mut idx[..self.axes()]);
        idx[..self.axes()].iter().any(|&j| j == 0 || j + 1 == self.size)
    }

    pub(crate) fn check_same(&self, other: &PhaseGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// What a phase-space field stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// A state `φ(p, x) = ⟨p, x|φ⟩` on the coherent-state basis.
    Wavefunction,
    /// A phase-space symbol `α(p, x)`.
    Observable,
    /// A Wigner-type density `ρ(p, x)`.
    Density,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Wavefunction => "wavefunction",
            Role::Observable => "observable",
            Role::Density => "density",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Relative edge threshold a wavefunction must satisfy.
pub const WAVEFUNCTION_EDGE_TOL: f64 = 1e-10;

/// Complex field on a [`PhaseGrid`].
///
/// A field built from a [`Polynomial`] keeps the polynomial alongside its
/// samples; derivatives and star products then use exact coefficients and
/// skip boundary-decay checks.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseFunction {
    grid: PhaseGrid,
    values: Vec<Complex64>,
    role: Role,
    poly: Option<Polynomial>,
}

impl PhaseFunction {
    /// Samples `f(p, x)` on the grid.
    pub fn from_fn<F>(grid: &PhaseGrid, role: Role, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
    {
        let n = grid.dim();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let mut z = [0.0; 2 * MAX_GRID_DIM];
                grid.point(i, &mut z[..2 * n]);
                f(&z[..n], &z[n..2 * n])
            })
            .collect();
        PhaseFunction { grid: *grid, values, role, poly: None }
    }

    /// Wraps raw samples. Wavefunctions must satisfy the boundary invariant.
    pub fn from_values(grid: &PhaseGrid, role: Role, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        let f = PhaseFunction { grid: *grid, values, role, poly: None };
        if role == Role::Wavefunction {
            f.check_boundary(WAVEFUNCTION_EDGE_TOL)?;
        }
        Ok(f)
    }

    pub(crate) fn from_values_unchecked(grid: &PhaseGrid, role: Role, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        PhaseFunction { grid: *grid, values, role, poly: None }
    }

    /// Polynomial observable, sampled and tagged.
    pub fn polynomial(grid: &PhaseGrid, poly: Polynomial) -> Result<Self> {
        if poly.dim() != grid.dim() {
            return Err(Error::DimensionMismatch { left: poly.dim(), right: grid.dim() });
        }
        let mut f = PhaseFunction::from_fn(grid, Role::Observable, |p, x| poly.eval(p, x));
        f.poly = Some(poly);
        Ok(f)
    }

    /// The constant function.
    pub fn constant(grid: &PhaseGrid, c: impl Into<Complex64>) -> Self {
        Self::polynomial(grid, Polynomial::constant(grid.dim(), c)).expect("dimensions agree")
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.poly.as_ref()
    }

    pub fn is_polynomial(&self) -> bool {
        self.poly.is_some()
    }

    /// Value at the grid point with per-axis indices `idx`.
    pub fn at(&self, idx: &[usize]) -> Complex64 {
        let flat = idx.iter().fold(0, |acc, &j| acc * self.grid.size() + j);
        self.values[flat]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Largest magnitude on the outermost grid slabs.
    pub fn edge_max(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.on_edge(*i))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// `edge_max / sup_norm`, 0 for the zero field.
    pub fn edge_ratio(&self) -> f64 {
        let m = self.sup_norm();
        if m == 0.0 {
            0.0
        } else {
            self.edge_max() / m
        }
    }

    pub(crate) fn check_boundary(&self, tol: f64) -> Result<()> {
        if self.poly.is_some() {
            return Ok(());
        }
        let r = self.edge_ratio();
        if r > tol {
            return Err(Error::SupportSpill(format!(
                "{} edge magnitude {r:.3e} of the peak exceeds {tol:.0e}",
                self.role
            )));
        }
        Ok(())
    }

    /// Plain Riemann sum `Σ f · h^{2n}`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_volume()
    }

    pub fn conj(&self) -> Self {
        PhaseFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
            role: self.role,
            poly: self.poly.as_ref().map(Polynomial::conj),
        }
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        PhaseFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            role: self.role,
            poly: self.poly.as_ref().map(|q| q.scale(c)),
        }
    }

    pub fn add(&self, other: &PhaseFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &PhaseFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b, |a, b| a - b)
    }

    /// Pointwise (commutative) product.
    pub fn mul(&self, other: &PhaseFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b, |a, b| a * b)
    }

    fn zip_with(
        &self,
        other: &PhaseFunction,
        op: impl Fn(Complex64, Complex64) -> Complex64 + Sync,
        poly_op: impl Fn(&Polynomial, &Polynomial) -> Polynomial,
    ) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self
            .values
            .par_iter()
            .zip(&other.values)
            .map(|(a, b)| op(*a, *b))
            .collect();
        let poly = match (&self.poly, &other.poly) {
            (Some(a), Some(b)) => Some(poly_op(a, b)),
            _ => None,
        };
        Ok(PhaseFunction {
            grid: self.grid,
            values,
            role: combine_roles(self.role, other.role),
            poly,
        })
    }

    /// Mixed partial derivative with `orders` indexed `[p_1..p_n, x_1..x_n]`.
    /// Exact for polynomial fields, spectral otherwise.
    pub fn derivative(&self, orders: &[u32]) -> Self {
        assert_eq!(orders.len(), self.grid.axes());
        if let Some(q) = &self.poly {
            let d = q.derivative(orders);
            let mut f = PhaseFunction::polynomial(&self.grid, d).expect("same dimension");
            f.role = self.role;
            return f;
        }
        if orders.iter().all(|&o| o == 0) {
            return self.clone();
        }
        let freqs = self.grid.frequencies();
        let axes: Vec<usize> = (0..orders.len()).filter(|&a| orders[a] > 0).collect();
        let mut data = self.values.clone();
        let shape = self.grid.shape();
        spectral::fft_axes(&mut data, &shape, &axes, Direction::Forward);
        apply_axis_multipliers(&mut data, &self.grid, |axis, m| {
            if orders[axis] == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, freqs[m]).powu(orders[axis])
            }
        });
        spectral::fft_axes(&mut data, &shape, &axes, Direction::Inverse);
        PhaseFunction::from_values_unchecked(&self.grid, self.role, data)
    }

    pub fn derivative_axis(&self, axis: usize, order: u32) -> Self {
        let mut orders = vec![0; self.grid.axes()];
        orders[axis] = order;
        self.derivative(&orders)
    }

    /// Max-abs difference to another field on the same grid.
    pub fn max_abs_diff(&self, other: &PhaseFunction) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Grid index of the largest value of `key(v)`.
    pub fn argmax_by(&self, key: impl Fn(Complex64) -> f64) -> usize {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (i, v) in self.values.iter().enumerate() {
            let k = key(*v);
            if k > best_v {
                best_v = k;
                best = i;
            }
        }
        best
    }
}

/// Multiplies an array already in Fourier space (along the axes where the
/// factor is not 1) by `Π_axis f(axis, bin)`.
pub(crate) fn apply_axis_multipliers(
    data: &mut [Complex64],
    grid: &PhaseGrid,
    f: impl Fn(usize, usize) -> Complex64 + Sync,
) {
    let axes = grid.axes();
    let size = grid.size();
    let tables: Vec<Vec<Complex64>> = (0..axes).map(|a| (0..size).map(|m| f(a, m)).collect()).collect();
    data.par_iter_mut().enumerate().for_each(|(i, v)| {
        let mut idx = [0usize; 2 * MAX_GRID_DIM];
        spectral::digits(i, size, &mut idx[..axes]);
        let mut m = Complex64::new(1.0, 0.0);
        for a in 0..axes {
            m *= tables[a][idx[a]];
        }
        *v *= m;
    });
}

pub(crate) fn combine_roles(a: Role, b: Role) -> Role {
    if a == Role::Density || b == Role::Density {
        Role::Density
    } else if a == Role::Wavefunction || b == Role::Wavefunction {
        Role::Wavefunction
    } else {
        Role::Observable
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(PhaseGrid::new(1, 256, 8.0).is_ok());
        assert!(matches!(PhaseGrid::new(3, 16, 8.0), Err(Error::UnsupportedDimension { .. })));
        assert!(matches!(PhaseGrid::new(1, 8, 8.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(PhaseGrid::new(1, 48, 8.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(PhaseGrid::new(1, 64, -1.0), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn coordinates_follow_layout() {
        let g = PhaseGrid::new(1, 16, 8.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        let mut z = [0.0; 2];
        g.point(3 * 16 + 5, &mut z);
        assert_eq!(z, [-5.0, -3.0]);
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let g = PhaseGrid::new(1, 128, 8.0).unwrap();
        let f = PhaseFunction::from_fn(&g, Role::Observable, |p, x| {
            Complex64::new((-(p[0] * p[0] + x[0] * x[0]) / 2.0).exp(), 0.0)
        });
        let d = f.derivative(&[1, 2]);
        let want = PhaseFunction::from_fn(&g, Role::Observable, |p, x| {
            let e = (-(p[0] * p[0] + x[0] * x[0]) / 2.0).exp();
            Complex64::new(-p[0] * (x[0] * x[0] - 1.0) * e, 0.0)
        });
        assert!(d.max_abs_diff(&want).unwrap() < 1e-10);
    }

    #[test]
    fn polynomial_derivative_is_exact() {
        let g = PhaseGrid::new(1, 16, 8.0).unwrap();
        let q = &Polynomial::x(1, 0) * &Polynomial::x(1, 0);
        let f = PhaseFunction::polynomial(&g, q).unwrap();
        let d = f.derivative(&[0, 1]);
        let want = PhaseFunction::polynomial(&g, Polynomial::x(1, 0).scale(2.0)).unwrap();
        assert_eq!(d.max_abs_diff(&want).unwrap(), 0.0);
        assert!(d.is_polynomial());
    }

    #[test]
    fn boundary_check_rejects_wide_state() {
        let g = PhaseGrid::new(1, 32, 4.0).unwrap();
        let values = vec![Complex64::new(1.0, 0.0); g.len()];
        assert!(matches!(
            PhaseFunction::from_values(&g, Role::Wavefunction, values.clone()),
            Err(Error::SupportSpill(_))
        ));
        assert!(PhaseFunction::from_values(&g, Role::Observable, values).is_ok());
    }
}
