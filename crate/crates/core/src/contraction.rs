//! `k`-sweeps that exhibit the classical limit: overlap decay, left
//! operators collapsing to multiplication, the product becoming
//! commutative, the scaled bracket converging to the Poisson bracket and
//! the central phase decoupling from the coset flow.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_line, fit_log_log, LinearFit};
use crate::grid::{PhaseFunction, PhaseGrid};
use crate::group::{phase_space_coset_flow, ContractionParam, CosetAlgebraParams, CosetPoint};
use crate::phase_space::{
    apply_pl_contracted, apply_xl_contracted, check_resolution, contracted_coherent_state, contracted_inner, inner,
    CoherentLabel,
};
use crate::star::{poisson_bracket, scaled_bracket, star, StarMethod};

/// Smallest `k_max / k_min` a sweep may span.
pub const MIN_SWEEP_RATIO: f64 = 8.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    k_values: Vec<f64>,
    grid: PhaseGrid,
}

impl SweepSpec {
    /// At least four strictly ascending positive values spanning a factor
    /// of [`MIN_SWEEP_RATIO`].
    pub fn new(k_values: Vec<f64>, grid: PhaseGrid) -> Result<Self> {
        if k_values.len() < 4 {
            return Err(Error::InvalidInput(format!("a sweep needs >= 4 k values, got {}", k_values.len())));
        }
        for &k in &k_values {
            ContractionParam::new(k)?;
        }
        if k_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("k values must be strictly ascending".into()));
        }
        let ratio = k_values[k_values.len() - 1] / k_values[0];
        if ratio < MIN_SWEEP_RATIO {
            return Err(Error::InvalidInput(format!(
                "k values span a factor {ratio}; slope fits need >= {MIN_SWEEP_RATIO}"
            )));
        }
        Ok(SweepSpec { k_values, grid })
    }

    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    fn params(&self) -> Vec<ContractionParam> {
        self.k_values.iter().map(|&k| ContractionParam::new(k).expect("validated")).collect()
    }
}

/// A named fit attached to a table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: LinearFit,
}

/// Rows sorted by `k` (first column).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fits: Vec<NamedFit>,
}

impl SweepTable {
    fn new(name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        SweepTable {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            fits: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn fit(&self, name: &str) -> Option<&LinearFit> {
        self.fits.iter().find(|f| f.name == name).map(|f| &f.fit)
    }

    /// Adds a log-log fit of `column` against `k` when every value is positive.
    fn add_log_log_fit(&mut self, column: &str) -> Result<()> {
        let k = self.column("k").expect("k column");
        let y = self.column(column).expect("known column");
        if y.iter().all(|&v| v > 0.0) {
            let fit = fit_log_log(&k, &y)?;
            self.fits.push(NamedFit { name: format!("log {column} vs log k"), fit });
        }
        Ok(())
    }
}

/// Closed-form overlap of contracted coherent states with contracted labels.
pub fn contracted_overlap(a: &CoherentLabel, b: &CoherentLabel, kp: &ContractionParam) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let k2 = kp.k() * kp.k();
    let mut phase = 0.0;
    let mut d2 = 0.0;
    for i in 0..a.dim() {
        phase += b.x[i] * a.p[i] - b.p[i] * a.x[i];
        d2 += (b.x[i] - a.x[i]).powi(2) + (b.p[i] - a.p[i]).powi(2);
    }
    Ok(Complex64::from_polar((-0.5 * k2 * d2).exp(), k2 * phase))
}

/// The same overlap from sampled states: `⟨ψ_b|ψ_a⟩` in contracted
/// coordinates.
pub fn contracted_overlap_numeric(
    a: &CoherentLabel,
    b: &CoherentLabel,
    kp: &ContractionParam,
    grid: &PhaseGrid,
) -> Result<Complex64> {
    let psi_a = contracted_coherent_state(a, grid, kp)?;
    let psi_b = contracted_coherent_state(b, grid, kp)?;
    contracted_inner(&psi_b, &psi_a, kp)
}

/// Columns `k, numeric, closed_form, rel_err` (magnitudes; `rel_err` is
/// the complex relative difference). Fit: `ln|overlap|` against `k²`,
/// whose slope is `−Δ²/2`.
pub fn overlap_decay_sweep(a: &CoherentLabel, b: &CoherentLabel, spec: &SweepSpec) -> Result<SweepTable> {
    for kp in spec.params() {
        check_resolution(spec.grid(), &kp)?;
    }
    let rows: Vec<Vec<f64>> = spec
        .params()
        .par_iter()
        .map(|kp| -> Result<Vec<f64>> {
            let num = contracted_overlap_numeric(a, b, kp, spec.grid())?;
            let exact = contracted_overlap(a, b, kp)?;
            let rel = (num - exact).norm() / exact.norm();
            Ok(vec![kp.k(), num.norm(), exact.norm(), rel])
        })
        .collect::<Result<_>>()?;
    let mut table = SweepTable::new("overlap_decay", &["k", "numeric", "closed_form", "rel_err"], rows);
    let k2: Vec<f64> = spec.k_values().iter().map(|k| k * k).collect();
    let ln: Vec<f64> = table.column("numeric").unwrap().iter().map(|v| v.ln()).collect();
    if ln.iter().all(|v| v.is_finite()) {
        let fit = fit_line(&k2, &ln)?;
        table.fits.push(NamedFit { name: "ln|overlap| vs k^2".into(), fit });
    }
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LeftOperatorReport {
    pub k: f64,
    /// `‖(X^{cL} − x^c)φ‖ / ‖φ‖`.
    pub x_residual: f64,
    /// `‖(P^{cL} − p^c)φ‖ / ‖φ‖`.
    pub p_residual: f64,
}

/// How far the contracted left operators are from plain multiplication on
/// `probe` (summed over axes in quadrature).
pub fn left_operator_limit(kp: &ContractionParam, probe: &PhaseFunction) -> Result<LeftOperatorReport> {
    let grid = probe.grid();
    if !probe.is_polynomial() {
        check_resolution(grid, kp)?;
    }
    let n = grid.dim();
    let nrm2 = inner(probe, probe)?.re;
    if nrm2 == 0.0 {
        return Err(Error::InvalidInput("probe is identically zero".into()));
    }
    let mut xr = 0.0;
    let mut pr = 0.0;
    for axis in 0..n {
        let xmul = PhaseFunction::polynomial(grid, crate::polynomial::Polynomial::x(n, axis))?.mul(probe)?;
        let pmul = PhaseFunction::polynomial(grid, crate::polynomial::Polynomial::p(n, axis))?.mul(probe)?;
        let dx = apply_xl_contracted(probe, axis, kp)?.sub(&xmul)?;
        let dp = apply_pl_contracted(probe, axis, kp)?.sub(&pmul)?;
        xr += inner(&dx, &dx)?.re;
        pr += inner(&dp, &dp)?.re;
    }
    Ok(LeftOperatorReport { k: kp.k(), x_residual: (xr / nrm2).sqrt(), p_residual: (pr / nrm2).sqrt() })
}

/// Left-operator residuals on the contracted coherent probe `a` for each
/// `k`, with the closed form `sqrt(|x_a|² + n/(2k²))` (resp. `p_a`).
/// Columns `k, x_residual, x_closed_form, p_residual, p_closed_form`.
pub fn left_operator_sweep(a: &CoherentLabel, spec: &SweepSpec) -> Result<SweepTable> {
    let n = a.dim() as f64;
    let rows: Vec<Vec<f64>> = spec
        .params()
        .par_iter()
        .map(|kp| -> Result<Vec<f64>> {
            let probe = contracted_coherent_state(a, spec.grid(), kp)?;
            let r = left_operator_limit(kp, &probe)?;
            let spread = n / (2.0 * kp.k() * kp.k());
            let xa2: f64 = a.x.iter().map(|v| v * v).sum();
            let pa2: f64 = a.p.iter().map(|v| v * v).sum();
            Ok(vec![kp.k(), r.x_residual, (xa2 + spread).sqrt(), r.p_residual, (pa2 + spread).sqrt()])
        })
        .collect::<Result<_>>()?;
    let mut table = SweepTable::new(
        "left_operator_limit",
        &["k", "x_residual", "x_closed_form", "p_residual", "p_closed_form"],
        rows,
    );
    table.add_log_log_fit("x_residual")?;
    table.add_log_log_fit("p_residual")?;
    Ok(table)
}

/// Columns `k, product_deviation = ‖α ⋆_k β − αβ‖∞,
/// commutator = ‖α ⋆_k β − β ⋆_k α‖∞`.
pub fn product_commutativization(
    a: &PhaseFunction,
    b: &PhaseFunction,
    spec: &SweepSpec,
    method: StarMethod,
) -> Result<SweepTable> {
    let pointwise = a.mul(b)?;
    let rows: Vec<Vec<f64>> = spec
        .params()
        .iter()
        .map(|kp| -> Result<Vec<f64>> {
            let ab = star(a, b, method, kp)?;
            let ba = star(b, a, method, kp)?;
            Ok(vec![kp.k(), ab.max_abs_diff(&pointwise)?, ab.max_abs_diff(&ba)?])
        })
        .collect::<Result<_>>()?;
    let mut table = SweepTable::new("product_commutativization", &["k", "product_deviation", "commutator"], rows);
    table.add_log_log_fit("product_deviation")?;
    table.add_log_log_fit("commutator")?;
    Ok(table)
}

/// Columns `k, error = ‖(k²/2i)(α ⋆_k β − β ⋆_k α) − {α, β}‖∞`.
pub fn bracket_convergence(
    a: &PhaseFunction,
    b: &PhaseFunction,
    spec: &SweepSpec,
    method: StarMethod,
) -> Result<SweepTable> {
    let pb = poisson_bracket(a, b)?;
    let rows: Vec<Vec<f64>> = spec
        .params()
        .iter()
        .map(|kp| -> Result<Vec<f64>> {
            let sb = scaled_bracket(a, b, method, kp)?;
            Ok(vec![kp.k(), sb.max_abs_diff(&pb)?])
        })
        .collect::<Result<_>>()?;
    let mut table = SweepTable::new("bracket_convergence", &["k", "error"], rows);
    table.add_log_log_fit("error")?;
    Ok(table)
}

/// Columns `k, numeric = |dθ(k) − θ̄|, closed_form = |dθ(1) − θ̄|/k²,
/// rel_err`.
pub fn theta_decoupling_scan(params: &CosetAlgebraParams, point: &CosetPoint, spec: &SweepSpec) -> Result<SweepTable> {
    let base = phase_space_coset_flow(params, point, &ContractionParam::unit())?.dtheta - params.theta_bar();
    let rows: Vec<Vec<f64>> = spec
        .params()
        .iter()
        .map(|kp| -> Result<Vec<f64>> {
            let d = (phase_space_coset_flow(params, point, kp)?.dtheta - params.theta_bar()).abs();
            let closed = base.abs() / (kp.k() * kp.k());
            let rel = if closed == 0.0 { (d - closed).abs() } else { (d - closed).abs() / closed };
            Ok(vec![kp.k(), d, closed, rel])
        })
        .collect::<Result<_>>()?;
    let mut table = SweepTable::new("theta_decoupling", &["k", "numeric", "closed_form", "rel_err"], rows);
    table.add_log_log_fit("numeric")?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::Polynomial;

    fn spec() -> SweepSpec {
        SweepSpec::new(vec![1.0, 2.0, 4.0, 8.0], PhaseGrid::new(1, 256, 8.0).unwrap()).unwrap()
    }

    #[test]
    fn sweep_spec_validation() {
        let g = PhaseGrid::new(1, 64, 8.0).unwrap();
        assert!(SweepSpec::new(vec![1.0, 2.0, 4.0], g).is_err());
        assert!(SweepSpec::new(vec![1.0, 2.0, 2.0, 8.0], g).is_err());
        assert!(SweepSpec::new(vec![1.0, 1.5, 2.0, 3.0], g).is_err());
        assert!(SweepSpec::new(vec![0.0, 2.0, 4.0, 8.0], g).is_err());
    }

    #[test]
    fn overlap_closed_form_examples() {
        let o = CoherentLabel::pair(0.0, 0.0);
        let b = CoherentLabel::pair(1.0, 0.0);
        let k2 = ContractionParam::new(2.0).unwrap();
        assert!((contracted_overlap(&o, &o, &k2).unwrap() - 1.0).norm() < 1e-15);
        let v = contracted_overlap(&o, &b, &k2).unwrap().norm();
        assert!((v - 0.135_335_283_236_612_7).abs() < 1e-15);
    }

    #[test]
    fn theta_scan_examples() {
        let params = CosetAlgebraParams::translation(vec![1.0], vec![0.0], 0.0).unwrap();
        let pt = CosetPoint { p: vec![0.0], x: vec![2.0], theta: 0.0 };
        let t = theta_decoupling_scan(&params, &pt, &spec()).unwrap();
        let col = t.column("numeric").unwrap();
        assert_eq!(col, vec![2.0, 0.5, 0.125, 0.03125]);
        assert!((t.fit("log numeric vs log k").unwrap().slope + 2.0).abs() < 1e-12);
        let zero = CosetAlgebraParams::translation(vec![0.0], vec![0.0], 0.3).unwrap();
        let t = theta_decoupling_scan(&zero, &pt, &spec()).unwrap();
        assert!(t.column("numeric").unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn commutator_of_coordinates() {
        let s = spec();
        let x = PhaseFunction::polynomial(s.grid(), Polynomial::x(1, 0)).unwrap();
        let p = PhaseFunction::polynomial(s.grid(), Polynomial::p(1, 0)).unwrap();
        let t = product_commutativization(&x, &p, &s, StarMethod::Spectral).unwrap();
        for row in &t.rows {
            assert!((row[2] - 2.0 / (row[0] * row[0])).abs() < 1e-14);
        }
        let t = product_commutativization(&x, &x, &s, StarMethod::Spectral).unwrap();
        assert!(t.column("commutator").unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn left_operator_constant_probe() {
        let g = PhaseGrid::new(1, 64, 8.0).unwrap();
        let one = PhaseFunction::constant(&g, 1.0);
        let r = left_operator_limit(&ContractionParam::new(3.0).unwrap(), &one).unwrap();
        assert_eq!((r.x_residual, r.p_residual), (0.0, 0.0));
    }
}
