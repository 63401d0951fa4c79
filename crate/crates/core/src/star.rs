//! Moyal star product, brackets, Wigner densities and the trace pairing.
//!
//! With deformation strength `s = 1/k²` the product is
//!
//! ```text
//! α ⋆ β = α exp[−i s (←∂_p·→∂_x − ←∂_x·→∂_p)] β
//! ```
//!
//! so `x ⋆ p − p ⋆ x = 2i/k²` and `k = 1` is the ħ = 2 product.
//!
//! Three evaluation paths exist. Polynomial × polynomial uses exact
//! coefficient algebra. Polynomial × sampled field is a finite Bopp shift:
//! each term multiplies the Fourier transform of the sampled factor by a
//! monomial in the dual variables. Sampled × sampled uses a mixed
//! representation: Fourier series in `p`, samples in `x`, where the product
//! of two `p`-modes is a single `p`-mode times `x`-shifted coefficient rows.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{apply_axis_multipliers, combine_roles, PhaseFunction, PhaseGrid, Role};
use crate::group::ContractionParam;
use crate::phase_space::{check_normalized, inner};
use crate::polynomial::{factorial, multi_indices, star_coefficient, Polynomial};
use crate::spectral::{self, bin_of, signed_index, CubeFft, Direction};

pub const DEFAULT_SERIES_ORDER: u32 = 8;

/// Sampled factors must decay to this fraction of their peak at the edge.
pub const STAR_EDGE_TOL: f64 = 1e-8;

/// Wigner densities must be real to this fraction of their peak.
pub const DENSITY_IMAG_TOL: f64 = 1e-8;

/// Coefficient rows below this fraction of the largest row are treated as
/// FFT round-off by the spectral kernel.
const ROW_CUTOFF: f64 = 1e-14;

/// Mode pairs whose bound falls below this fraction of the largest pair
/// bound are skipped by the spectral kernel.
const PAIR_CUTOFF: f64 = 1e-17;

/// Mode pairs outside the resolvable band or shift range are dropped into the
/// tail estimate when their bound is below this fraction of the largest pair
/// bound; larger ones raise an accuracy error.
const RANGE_CUTOFF: f64 = 1e-11;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StarMethod {
    /// Bidifferential series summed through total order `order`.
    Series { order: u32 },
    /// Exact kernel evaluation in Fourier space.
    #[default]
    Spectral,
}

impl StarMethod {
    pub fn series(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("series order must be >= 1".into()));
        }
        Ok(StarMethod::Series { order })
    }
}

/// `ħ/k²`, the effective Planck constant of the contracted product.
pub fn effective_planck(kp: &ContractionParam) -> f64 {
    kp.hbar_eff()
}

#[derive(Clone, Debug)]
pub struct StarReport {
    pub value: PhaseFunction,
    /// Series: sup norm of the last summed order. Polynomial inputs: largest
    /// dropped coefficient. Spectral: bound on the skipped mode pairs.
    pub tail_estimate: f64,
    /// Sup norm of each summed order (series only).
    pub order_norms: Vec<f64>,
}

pub fn star(a: &PhaseFunction, b: &PhaseFunction, method: StarMethod, kp: &ContractionParam) -> Result<PhaseFunction> {
    Ok(star_with_report(a, b, method, kp)?.value)
}

pub fn star_with_report(
    a: &PhaseFunction,
    b: &PhaseFunction,
    method: StarMethod,
    kp: &ContractionParam,
) -> Result<StarReport> {
    a.grid().check_same(b.grid())?;
    if let StarMethod::Series { order: 0 } = method {
        return Err(Error::InvalidInput("series order must be >= 1".into()));
    }
    let s = kp.inv_k2();
    let role = combine_roles(a.role(), b.role());
    if let (Some(pa), Some(pb)) = (a.as_polynomial(), b.as_polynomial()) {
        let full = pa.star(pb, s)?;
        let (value, tail) = match method {
            StarMethod::Series { order } => {
                let kept = pa.star_to_order(pb, s, order)?;
                let tail = (&full - &kept).max_coefficient();
                (kept, tail)
            }
            StarMethod::Spectral => (full, 0.0),
        };
        let value = PhaseFunction::polynomial(a.grid(), value)?.with_role(role);
        return Ok(StarReport { value, tail_estimate: tail, order_norms: Vec::new() });
    }
    check_decay(a)?;
    check_decay(b)?;
    let report = match method {
        StarMethod::Series { order } => series_star(a, b, s, order)?,
        StarMethod::Spectral => match (a.as_polynomial(), b.as_polynomial()) {
            (Some(pa), None) => bopp_star(pa, b, s, Side::Left),
            (None, Some(pb)) => bopp_star(pb, a, s, Side::Right),
            _ => mixed_star(a, b, s)?,
        },
    };
    Ok(StarReport { value: report.value.with_role(role), ..report })
}

/// `α ⋆ β − β ⋆ α`.
pub fn moyal_bracket(
    a: &PhaseFunction,
    b: &PhaseFunction,
    method: StarMethod,
    kp: &ContractionParam,
) -> Result<PhaseFunction> {
    star(a, b, method, kp)?.sub(&star(b, a, method, kp)?)
}

/// `(k²/2i)(α ⋆_k β − β ⋆_k α)`: equals the Poisson bracket on quadratics
/// and tends to it as `k → ∞`.
pub fn scaled_bracket(
    a: &PhaseFunction,
    b: &PhaseFunction,
    method: StarMethod,
    kp: &ContractionParam,
) -> Result<PhaseFunction> {
    let k2 = kp.k() * kp.k();
    Ok(moyal_bracket(a, b, method, kp)?.scale(Complex64::new(0.0, -0.5 * k2)))
}

/// `{α, β} = Σ_i ∂_{x_i}α ∂_{p_i}β − ∂_{p_i}α ∂_{x_i}β`.
pub fn poisson_bracket(a: &PhaseFunction, b: &PhaseFunction) -> Result<PhaseFunction> {
    a.grid().check_same(b.grid())?;
    let n = a.grid().dim();
    let mut out: Option<PhaseFunction> = None;
    for i in 0..n {
        let t1 = a.derivative_axis(n + i, 1).mul(&b.derivative_axis(i, 1))?;
        let t2 = a.derivative_axis(i, 1).mul(&b.derivative_axis(n + i, 1))?;
        let term = t1.sub(&t2)?;
        out = Some(match out {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    Ok(out.expect("n >= 1").with_role(combine_roles(a.role(), b.role())))
}

/// Wigner density `ρ_φ = 4ⁿ φ ⋆ conj(φ)` of a normalized wavefunction.
pub fn wigner(phi: &PhaseFunction) -> Result<PhaseFunction> {
    wigner_with(phi, StarMethod::Spectral)
}

pub fn wigner_with(phi: &PhaseFunction, method: StarMethod) -> Result<PhaseFunction> {
    if phi.role() != Role::Wavefunction {
        return Err(Error::WrongRole { expected: "wavefunction", got: phi.role().name() });
    }
    check_normalized(phi, 1e-6)?;
    let n = phi.grid().dim();
    let rho = star(phi, &phi.conj(), method, &ContractionParam::unit())?
        .scale(4f64.powi(n as i32))
        .with_role(Role::Density);
    let peak = rho.sup_norm();
    if rho.edge_max() > STAR_EDGE_TOL * peak {
        return Err(Error::SupportSpill(format!(
            "Wigner density reaches {:.3e} of its peak at the box edge (it is centred at twice the \
             coherent label); enlarge the box",
            rho.edge_max() / peak
        )));
    }
    if rho.max_imag() > DENSITY_IMAG_TOL * peak {
        return Err(Error::Accuracy(format!(
            "Wigner density imaginary part {:.3e} of the peak",
            rho.max_imag() / peak
        )));
    }
    Ok(rho)
}

/// `Tr[α ⋆ ρ] = (1/4ⁿ)(1/πⁿ) Σ α ρ h^{2n}`.
pub fn trace_pair(alpha: &PhaseFunction, rho: &PhaseFunction) -> Result<Complex64> {
    alpha.grid().check_same(rho.grid())?;
    if rho.role() != Role::Density {
        return Err(Error::WrongRole { expected: "density", got: rho.role().name() });
    }
    let grid = rho.grid();
    let n = grid.dim() as i32;
    let sum = alpha.values().iter().zip(rho.values()).map(|(a, r)| a * r).sum::<Complex64>();
    Ok(sum * grid.cell_volume() / (4f64.powi(n) * PI.powi(n)))
}

/// `(1/πⁿ) Σ conj(φ) (α ⋆ φ) h^{2n}`, the state-side trace expression.
pub fn trace_via_state(alpha: &PhaseFunction, phi: &PhaseFunction, method: StarMethod) -> Result<Complex64> {
    let a_phi = star(alpha, phi, method, &ContractionParam::unit())?;
    inner(phi, &a_phi)
}

fn check_decay(f: &PhaseFunction) -> Result<()> {
    if f.is_polynomial() {
        return Ok(());
    }
    let r = f.edge_ratio();
    if r > STAR_EDGE_TOL {
        return Err(Error::SupportSpill(format!(
            "star factor ({}) has edge magnitude {r:.3e} of its peak; needs decay below {STAR_EDGE_TOL:.0e} \
             or a polynomial tag",
            f.role()
        )));
    }
    Ok(())
}

/// Field whose derivatives can be taken repeatedly.
enum Operand<'a> {
    Poly(&'a Polynomial),
    /// Forward transform over all axes.
    Sampled(Vec<Complex64>),
}

impl<'a> Operand<'a> {
    fn new(f: &'a PhaseFunction) -> Self {
        match f.as_polynomial() {
            Some(q) => Operand::Poly(q),
            None => {
                let grid = f.grid();
                let mut hat = f.values().to_vec();
                spectral::fft_axes(&mut hat, &grid.shape(), &(0..grid.axes()).collect::<Vec<_>>(), Direction::Forward);
                Operand::Sampled(hat)
            }
        }
    }

    /// `None` when the derivative vanishes identically.
    fn derivative(&self, grid: &PhaseGrid, orders: &[u32]) -> Option<Vec<Complex64>> {
        match self {
            Operand::Poly(q) => {
                let d = q.derivative(orders);
                if d.is_zero() {
                    return None;
                }
                Some(PhaseFunction::polynomial(grid, d).expect("same dimension").into_values())
            }
            Operand::Sampled(hat) => {
                let freqs = grid.frequencies();
                let mut data = hat.clone();
                apply_axis_multipliers(&mut data, grid, |axis, m| Complex64::new(0.0, freqs[m]).powu(orders[axis]));
                spectral::fft_axes(&mut data, &grid.shape(), &(0..grid.axes()).collect::<Vec<_>>(), Direction::Inverse);
                Some(data)
            }
        }
    }
}

fn series_star(a: &PhaseFunction, b: &PhaseFunction, s: f64, order: u32) -> Result<StarReport> {
    let grid = *a.grid();
    let n = grid.dim();
    let (left, right) = (Operand::new(a), Operand::new(b));
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut order_norms = Vec::with_capacity(order as usize + 1);
    let indices = multi_indices(2 * n, order);
    for m in 0..=order {
        let mut term = vec![Complex64::new(0.0, 0.0); grid.len()];
        for idx in indices.iter().filter(|idx| idx.iter().sum::<u32>() == m) {
            // idx = [a (on p of α, x of β), b (on x of α, p of β)].
            let (ia, ib) = idx.split_at(n);
            let Some(da) = left.derivative(&grid, idx) else { continue };
            let right_orders: Vec<u32> = ib.iter().chain(ia).copied().collect();
            let Some(db) = right.derivative(&grid, &right_orders) else { continue };
            let c = star_coefficient(ia, ib, s);
            term.par_iter_mut()
                .zip(da.par_iter().zip(&db))
                .for_each(|(t, (u, v))| *t += c * u * v);
        }
        order_norms.push(term.iter().map(|v| v.norm()).fold(0.0, f64::max));
        acc.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
    }
    check_series_divergence(&order_norms, order)?;
    let tail_estimate = *order_norms.last().expect("order >= 1");
    let value = PhaseFunction::from_values_unchecked(&grid, Role::Observable, acc);
    Ok(StarReport { value, tail_estimate, order_norms })
}

/// Divergence: from order `M/2` on, the non-negligible term norms never
/// decrease.
fn check_series_divergence(norms: &[f64], order: u32) -> Result<()> {
    let scale = norms.iter().copied().fold(0.0, f64::max);
    let tail: Vec<f64> = norms[(order / 2) as usize..]
        .iter()
        .copied()
        .filter(|&v| v > 1e-14 * scale)
        .collect();
    if tail.len() >= 2 && tail.windows(2).all(|w| w[1] >= w[0]) {
        return Err(Error::Accuracy(format!(
            "star series diverges: term norms from order {} on are non-decreasing ({:?}); use the spectral method \
             or a larger k",
            order / 2,
            tail
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Polynomial on the left: `α(p + sη, x − sκ) ⋆`-shift of `β`.
    Left,
    /// Polynomial on the right: `β(p − sη, x + sκ)`.
    Right,
}

/// Polynomial ⋆ sampled (or sampled ⋆ polynomial) as a finite sum of
/// Fourier multipliers on the sampled factor.
fn bopp_star(poly: &Polynomial, field: &PhaseFunction, s: f64, side: Side) -> StarReport {
    let grid = *field.grid();
    let n = grid.dim();
    let freqs = grid.frequencies();
    let axes: Vec<usize> = (0..2 * n).collect();
    let shape = grid.shape();
    let mut hat = field.values().to_vec();
    spectral::fft_axes(&mut hat, &shape, &axes, Direction::Forward);

    // (p-shift, x-shift) signs: Left shifts p by +sη and x by −sκ.
    let (sp, sx) = match side {
        Side::Left => (s, -s),
        Side::Right => (-s, s),
    };
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for idx in multi_indices(2 * n, poly.degree()) {
        let d = poly.derivative(&idx);
        if d.is_zero() {
            continue;
        }
        let weight: f64 = idx.iter().map(|&o| factorial(o)).product();
        let dvals = PhaseFunction::polynomial(&grid, d.scale(1.0 / weight))
            .expect("same dimension")
            .into_values();
        let mut data = hat.clone();
        // idx[i] (p-order) pairs with x-frequency η_i; idx[n+i] (x-order)
        // with p-frequency κ_i.
        apply_axis_multipliers(&mut data, &grid, |axis, m| {
            let w = freqs[m];
            if axis < n {
                Complex64::new(sx * w, 0.0).powu(idx[n + axis])
            } else {
                Complex64::new(sp * w, 0.0).powu(idx[axis - n])
            }
        });
        spectral::fft_axes(&mut data, &shape, &axes, Direction::Inverse);
        acc.par_iter_mut()
            .zip(dvals.par_iter().zip(&data))
            .for_each(|(t, (u, v))| *t += u * v);
    }
    StarReport {
        value: PhaseFunction::from_values_unchecked(&grid, field.role(), acc),
        tail_estimate: 0.0,
        order_norms: Vec::new(),
    }
}

/// Sampled ⋆ sampled in the mixed representation
/// `α(p, x) = Σ_m c_m(x) e^{iξ_m·p}`:
///
/// ```text
/// (α ⋆ β)_l(x) = Σ_{m + m' = l} c_m(x − sξ_{m'}) d_{m'}(x + sξ_m)
/// ```
///
/// The `x`-shifts are Fourier phase ramps on a zero-padded copy of each
/// row, so shifts up to `2L` do not wrap.
fn mixed_star(a: &PhaseFunction, b: &PhaseFunction, s: f64) -> Result<StarReport> {
    let grid = *a.grid();
    let n = grid.dim();
    let size = grid.size();
    let shape = grid.shape();
    let row_len = size.pow(n as u32);
    let p_axes: Vec<usize> = (0..n).collect();
    let h = grid.spacing();
    let base = 2.0 * PI / (size as f64 * h);

    let mut ahat = a.values().to_vec();
    let mut bhat = b.values().to_vec();
    spectral::fft_axes(&mut ahat, &shape, &p_axes, Direction::Forward);
    spectral::fft_axes(&mut bhat, &shape, &p_axes, Direction::Forward);

    let row_norm = |data: &[Complex64], m: usize| {
        data[m * row_len..(m + 1) * row_len].iter().map(|v| v.norm()).fold(0.0, f64::max)
    };
    let an: Vec<f64> = (0..row_len).map(|m| row_norm(&ahat, m)).collect();
    let bn: Vec<f64> = (0..row_len).map(|m| row_norm(&bhat, m)).collect();
    let amax = an.iter().copied().fold(0.0, f64::max);
    let bmax = bn.iter().copied().fold(0.0, f64::max);
    let zero = vec![Complex64::new(0.0, 0.0); grid.len()];
    if amax == 0.0 || bmax == 0.0 {
        return Ok(StarReport {
            value: PhaseFunction::from_values_unchecked(&grid, Role::Observable, zero),
            tail_estimate: 0.0,
            order_norms: Vec::new(),
        });
    }
    let cutoff = PAIR_CUTOFF * amax * bmax;
    let row_cut_a = ROW_CUTOFF * amax;
    let row_cut_b = ROW_CUTOFF * bmax;
    let sig_a: Vec<usize> = (0..row_len).filter(|&m| an[m] >= row_cut_a).collect();
    let sig_b: Vec<usize> = (0..row_len).filter(|&m| bn[m] >= row_cut_b).collect();

    let signed = |m: usize| -> Vec<i64> {
        let mut d = vec![0usize; n];
        spectral::digits(m, size, &mut d);
        d.iter().map(|&j| signed_index(j, size)).collect()
    };
    let xi = |m: usize| -> Vec<f64> { signed(m).iter().map(|&j| j as f64 * base).collect() };
    let max_shift = 2.0 * grid.half_width();
    let half = (size / 2) as i64;

    // Which of band / shift a pair violates, if any.
    let violation = |sm: &[i64], smp: &[i64]| -> Option<Error> {
        for i in 0..n {
            let l = sm[i] + smp[i];
            if l < -half || l >= half || sm[i] == -half || smp[i] == -half {
                return Some(Error::Accuracy(format!(
                    "star product spectrum exceeds the grid band along p{}; refine the grid",
                    i + 1
                )));
            }
            if (s * sm[i] as f64 * base).abs() >= max_shift || (s * smp[i] as f64 * base).abs() >= max_shift {
                return Some(Error::Accuracy(format!(
                    "star kernel shift exceeds 2L along x{}; enlarge the box or refine the grid",
                    i + 1
                )));
            }
        }
        None
    };
    let range_cut = RANGE_CUTOFF * amax * bmax;
    for &m in &sig_a {
        let sm = signed(m);
        for &mp in &sig_b {
            if an[m] * bn[mp] < range_cut {
                continue;
            }
            if let Some(e) = violation(&sm, &signed(mp)) {
                return Err(e);
            }
        }
    }

    // Zero-padded x-transforms of every retained row.
    let pad = 2 * size;
    let cube = CubeFft::new(pad, n);
    let padded_len = cube.len();
    let pad_freqs = spectral::angular_frequencies(pad, h);
    let embed = |data: &[Complex64], m: usize| -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); padded_len];
        let row = &data[m * row_len..(m + 1) * row_len];
        let mut d = vec![0usize; n];
        for (j, v) in row.iter().enumerate() {
            spectral::digits(j, size, &mut d);
            let flat = d.iter().fold(0, |acc, &q| acc * pad + q);
            buf[flat] = *v;
        }
        cube.process(&mut buf, Direction::Forward);
        buf
    };
    let a_rows: Vec<(usize, Vec<Complex64>)> = sig_a.par_iter().map(|&m| (m, embed(&ahat, m))).collect();
    let b_rows: Vec<(usize, Vec<Complex64>)> = sig_b.par_iter().map(|&m| (m, embed(&bhat, m))).collect();
    let mut a_slot = vec![usize::MAX; row_len];
    for (i, (m, _)) in a_rows.iter().enumerate() {
        a_slot[*m] = i;
    }

    let shifted = |hat: &[Complex64], delta: &[f64], out: &mut Vec<Complex64>| {
        out.clear();
        let mut d = vec![0usize; n];
        for (j, v) in hat.iter().enumerate() {
            spectral::digits(j, pad, &mut d);
            let phase: f64 = (0..n).map(|i| -pad_freqs[d[i]] * delta[i]).sum();
            out.push(v * Complex64::from_polar(1.0, phase));
        }
        cube.process(out, Direction::Inverse);
    };
    let window_index: Vec<usize> = (0..row_len)
        .map(|j| {
            let mut d = vec![0usize; n];
            spectral::digits(j, size, &mut d);
            d.iter().fold(0, |acc, &q| acc * pad + q)
        })
        .collect();

    let norm = 1.0 / row_len as f64;
    let rows: Vec<(Vec<Complex64>, f64)> = (0..row_len)
        .into_par_iter()
        .map(|l| {
            let sl = signed(l);
            let mut acc = vec![Complex64::new(0.0, 0.0); row_len];
            let mut dropped = 0.0;
            let mut sa = Vec::with_capacity(padded_len);
            let mut sb = Vec::with_capacity(padded_len);
            for (mp, brow) in &b_rows {
                let smp = signed(*mp);
                let mut m = 0usize;
                let mut in_band = true;
                for i in 0..n {
                    match bin_of(sl[i] - smp[i], size) {
                        Some(q) => m = m * size + q,
                        None => in_band = false,
                    }
                }
                if !in_band || a_slot[m] == usize::MAX {
                    continue;
                }
                let bound = an[m] * bn[*mp];
                if bound < cutoff || violation(&signed(m), &smp).is_some() {
                    dropped += bound;
                    continue;
                }
                let arow = &a_rows[a_slot[m]].1;
                let xi_b: Vec<f64> = xi(*mp).iter().map(|v| s * v).collect();
                let xi_a: Vec<f64> = xi(m).iter().map(|v| -s * v).collect();
                shifted(arow, &xi_b, &mut sa);
                shifted(brow, &xi_a, &mut sb);
                for (j, w) in window_index.iter().enumerate() {
                    acc[j] += sa[*w] * sb[*w];
                }
            }
            acc.iter_mut().for_each(|v| *v *= norm);
            (acc, dropped)
        })
        .collect();

    let mut out = Vec::with_capacity(grid.len());
    let mut tail = 0.0f64;
    for (row, dropped) in rows {
        out.extend(row);
        tail = tail.max(dropped * norm);
    }
    spectral::fft_axes(&mut out, &shape, &p_axes, Direction::Inverse);
    Ok(StarReport {
        value: PhaseFunction::from_values_unchecked(&grid, Role::Observable, out),
        tail_estimate: tail,
        order_norms: Vec::new(),
    })
}
