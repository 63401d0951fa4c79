//! Exact Heisenberg–Weyl group algebra, coset flows and contraction
//! rescaling of group coordinates.
//!
//! Conventions: ħ = 2, so `[X_i, P_j] = 2iδ_ij I`, and a group element
//! `(p, x, θ)` stands for `W = exp[i(p·X − x·P + θI)]`. Composition is
//!
//! ```text
//! W(p', x', θ') W(p, x, θ) = W(p' + p, x' + x, θ' + θ − (x'·p − p'·x))
//! ```
//!
//! The law is polynomial of degree two, so [`GroupElement`] is generic over
//! the scalar: with `Ratio<i64>` every group axiom holds exactly, and with
//! `f64` it holds exactly on dyadic inputs of modest size.

use std::ops::Neg;

use num_traits::Num;

use crate::error::{Error, Result};

/// Reduced Planck constant in the units used throughout the crate.
pub const HBAR: f64 = 2.0;

/// Largest dimension the group algebra supports (H(3)).
pub const MAX_GROUP_DIM: usize = 3;

pub trait Scalar: Num + Copy + Neg<Output = Self> {}
impl<T: Num + Copy + Neg<Output = T>> Scalar for T {}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T = f64> {
    p: Vec<T>,
    x: Vec<T>,
    theta: T,
}

impl<T: Scalar> GroupElement<T> {
    pub fn new(p: Vec<T>, x: Vec<T>, theta: T) -> Result<Self> {
        if p.len() != x.len() {
            return Err(Error::DimensionMismatch { left: p.len(), right: x.len() });
        }
        check_dim(p.len())?;
        Ok(GroupElement { p, x, theta })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(GroupElement { p: vec![T::zero(); n], x: vec![T::zero(); n], theta: T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[T] {
        &self.p
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// Central phase picked up by `self · other`: `−(x₁·p₂ − p₁·x₂)`.
    pub fn twist(&self, other: &Self) -> Result<T> {
        self.check_same_dim(other)?;
        Ok(-(dot(&self.x, &other.p) - dot(&self.p, &other.x)))
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        let twist = self.twist(other)?;
        Ok(GroupElement {
            p: add(&self.p, &other.p),
            x: add(&self.x, &other.x),
            theta: self.theta + other.theta + twist,
        })
    }

    /// `(−p, −x, −θ)`; the twist with the original vanishes.
    pub fn inverse(&self) -> Self {
        GroupElement {
            p: self.p.iter().map(|&v| -v).collect(),
            x: self.x.iter().map(|&v| -v).collect(),
            theta: -self.theta,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.theta == T::zero() && self.p.iter().chain(&self.x).all(|v| *v == T::zero())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }
}

pub fn compose<T: Scalar>(g1: &GroupElement<T>, g2: &GroupElement<T>) -> Result<GroupElement<T>> {
    g1.compose(g2)
}

pub fn inverse<T: Scalar>(g: &GroupElement<T>) -> GroupElement<T> {
    g.inverse()
}

/// The contraction parameter `k`; ħ stays fixed at 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionParam {
    k: f64,
}

impl ContractionParam {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidContraction(k));
        }
        Ok(ContractionParam { k })
    }

    /// `k = 1`, the uncontracted theory.
    pub fn unit() -> Self {
        ContractionParam { k: 1.0 }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `1/k²`, the strength of every deformation term.
    pub fn inv_k2(&self) -> f64 {
        1.0 / (self.k * self.k)
    }

    /// `ħ/k²`.
    pub fn hbar_eff(&self) -> f64 {
        HBAR / (self.k * self.k)
    }
}

impl Default for ContractionParam {
    fn default() -> Self {
        Self::unit()
    }
}

/// Parameters of an infinitesimal coset transformation: rotations `ω`
/// (antisymmetric), translations `p̄`, `x̄` and the central `θ̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetAlgebraParams {
    omega: Vec<Vec<f64>>,
    p_bar: Vec<f64>,
    x_bar: Vec<f64>,
    theta_bar: f64,
}

impl CosetAlgebraParams {
    pub fn new(omega: Vec<Vec<f64>>, p_bar: Vec<f64>, x_bar: Vec<f64>, theta_bar: f64) -> Result<Self> {
        let n = p_bar.len();
        check_dim(n)?;
        if x_bar.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: x_bar.len() });
        }
        if omega.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: omega.len() });
        }
        for (i, row) in omega.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { left: n, right: row.len() });
            }
            for j in 0..n {
                if row[j] != -omega[j][i] {
                    return Err(Error::NotAntisymmetric { row: i, col: j });
                }
            }
        }
        Ok(CosetAlgebraParams { omega, p_bar, x_bar, theta_bar })
    }

    /// Pure translation/phase generator with no rotation.
    pub fn translation(p_bar: Vec<f64>, x_bar: Vec<f64>, theta_bar: f64) -> Result<Self> {
        let n = p_bar.len();
        Self::new(vec![vec![0.0; n]; n], p_bar, x_bar, theta_bar)
    }

    pub fn dim(&self) -> usize {
        self.p_bar.len()
    }

    pub fn omega(&self) -> &[Vec<f64>] {
        &self.omega
    }

    pub fn p_bar(&self) -> &[f64] {
        &self.p_bar
    }

    pub fn x_bar(&self) -> &[f64] {
        &self.x_bar
    }

    pub fn theta_bar(&self) -> f64 {
        self.theta_bar
    }

    fn rotate(&self, v: &[f64]) -> Vec<f64> {
        self.omega.iter().map(|row| dot(row, v)).collect()
    }
}

/// A point `(p_c, x_c, θ)` on the phase-space coset, in group parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetPoint {
    pub p: Vec<f64>,
    pub x: Vec<f64>,
    pub theta: f64,
}

/// Tangent `(dp_c, dx_c, dθ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetTangent {
    pub dp: Vec<f64>,
    pub dx: Vec<f64>,
    pub dtheta: f64,
}

/// Infinitesimal action on the `(p_c, x_c, θ)` coset:
///
/// ```text
/// dp_c = ω p_c + p̄_c
/// dx_c = ω x_c + x̄_c
/// dθ   = (−x̄_c·p_c + p̄_c·x_c)/k² + θ̄
/// ```
pub fn phase_space_coset_flow(
    params: &CosetAlgebraParams,
    point: &CosetPoint,
    kp: &ContractionParam,
) -> Result<CosetTangent> {
    let n = params.dim();
    for len in [point.p.len(), point.x.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { left: n, right: len });
        }
    }
    let dp = add(&params.rotate(&point.p), &params.p_bar);
    let dx = add(&params.rotate(&point.x), &params.x_bar);
    let coupling = -dot(&params.x_bar, &point.p) + dot(&params.p_bar, &point.x);
    let dtheta = coupling * kp.inv_k2() + params.theta_bar;
    Ok(CosetTangent { dp, dx, dtheta })
}

/// Infinitesimal action on the configuration coset `(x, θ)`:
/// `dx = ω x + x̄`, `dθ = p̄·x + θ̄`.
pub fn config_coset_flow(params: &CosetAlgebraParams, x: &[f64], _theta: f64) -> Result<(Vec<f64>, f64)> {
    let n = params.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { left: n, right: x.len() });
    }
    let dx = add(&params.rotate(x), &params.x_bar);
    let dtheta = dot(&params.p_bar, x) + params.theta_bar;
    Ok((dx, dtheta))
}

/// Group parameters in contracted units: `(k·p, k·x, θ)`.
pub fn contract_coordinates(g: &GroupElement<f64>, kp: &ContractionParam) -> GroupElement<f64> {
    let k = kp.k();
    GroupElement {
        p: g.p.iter().map(|v| k * v).collect(),
        x: g.x.iter().map(|v| k * v).collect(),
        theta: g.theta,
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GROUP_DIM {
        return Err(Error::UnsupportedDimension { got: n, max: MAX_GROUP_DIM });
    }
    Ok(())
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&u, &v)| acc + u * v)
}

fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&u, &v)| u + v).collect()
}
