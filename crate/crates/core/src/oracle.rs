//! Closed-form reference values. Nothing here touches the grid, the
//! phase-space operators or the star-product kernels, so these results can
//! check them.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;

/// A reference value together with where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<T> {
    pub name: &'static str,
    pub inputs: String,
    pub value: T,
    pub derivation: &'static str,
}

/// `⟨b|a⟩ = φ_a(p_b, x_b) = exp(i(p_a·x_b − x_a·p_b)) · exp(−½|b − a|²)`.
pub fn oracle_coherent_overlap(a: (&[f64], &[f64]), b: (&[f64], &[f64])) -> OracleResult<Complex64> {
    let (pa, xa) = a;
    let (pb, xb) = b;
    let mut phase = 0.0;
    let mut d2 = 0.0;
    for i in 0..pa.len() {
        phase += pa[i] * xb[i] - xa[i] * pb[i];
        d2 += (pa[i] - pb[i]).powi(2) + (xa[i] - xb[i]).powi(2);
    }
    OracleResult {
        name: "coherent_overlap",
        inputs: format!("a=(p {pa:?}, x {xa:?}), b=(p {pb:?}, x {xb:?})"),
        value: Complex64::from_polar((-0.5 * d2).exp(), phase),
        derivation: "coherent wavefunction evaluated at the second label",
    }
}

/// Overlap of contracted coherent states with contracted labels:
/// `exp[ik²(x_b·p_a − p_b·x_a)] · exp[−(k²/2)|b − a|²]`.
pub fn oracle_contracted_overlap(
    a: (&[f64], &[f64]),
    b: (&[f64], &[f64]),
    k: f64,
) -> Result<OracleResult<Complex64>> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidContraction(k));
    }
    let (pa, xa) = a;
    let (pb, xb) = b;
    let k2 = k * k;
    let mut phase = 0.0;
    let mut d2 = 0.0;
    for i in 0..pa.len() {
        phase += xb[i] * pa[i] - pb[i] * xa[i];
        d2 += (pa[i] - pb[i]).powi(2) + (xa[i] - xb[i]).powi(2);
    }
    Ok(OracleResult {
        name: "contracted_overlap",
        inputs: format!("a=(p {pa:?}, x {xa:?}), b=(p {pb:?}, x {xb:?}), k={k}"),
        value: Complex64::from_polar((-0.5 * k2 * d2).exp(), k2 * phase),
        derivation: "coherent overlap with labels scaled by k",
    })
}

/// Wigner density of the coherent state `a` at `(p, x)`:
/// `2ⁿ exp(−½|z − 2a|²)`, a unit-width Gaussian at the expectation values.
pub fn oracle_coherent_wigner(a: (&[f64], &[f64]), p: &[f64], x: &[f64]) -> f64 {
    let (pa, xa) = a;
    let mut r2 = 0.0;
    for i in 0..pa.len() {
        r2 += (p[i] - 2.0 * pa[i]).powi(2) + (x[i] - 2.0 * xa[i]).powi(2);
    }
    2f64.powi(pa.len() as i32) * (-0.5 * r2).exp()
}

/// `⟨p² + x²⟩` in the coherent state `a`: `4|a|² + 2n`.
pub fn oracle_harmonic_energy(a: (&[f64], &[f64])) -> f64 {
    let (pa, xa) = a;
    let r2: f64 = pa.iter().chain(xa).map(|v| v * v).sum();
    4.0 * r2 + 2.0 * pa.len() as f64
}

/// Quadratic generators with a closed-form flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuadraticGenerator {
    /// `p² + x²`.
    Harmonic,
    /// `p²/2m`.
    Free { mass: f64 },
}

/// Label flow `(x, p)(t)` for a quadratic generator. Moyal and Poisson
/// brackets agree on quadratics, so this is exact for both.
pub fn oracle_quadratic_flow(
    g: QuadraticGenerator,
    x0: &[f64],
    p0: &[f64],
    t: f64,
) -> Result<OracleResult<(Vec<f64>, Vec<f64>)>> {
    let value = match g {
        QuadraticGenerator::Harmonic => {
            let (c, s) = ((2.0 * t).cos(), (2.0 * t).sin());
            (
                x0.iter().zip(p0).map(|(x, p)| c * x + s * p).collect(),
                x0.iter().zip(p0).map(|(x, p)| -s * x + c * p).collect(),
            )
        }
        QuadraticGenerator::Free { mass } => {
            if !(mass.is_finite() && mass > 0.0) {
                return Err(Error::InvalidInput(format!("mass must be > 0, got {mass}")));
            }
            (x0.iter().zip(p0).map(|(x, p)| x + p * t / mass).collect(), p0.to_vec())
        }
    };
    Ok(OracleResult {
        name: "quadratic_flow",
        inputs: format!("{g:?}, x0={x0:?}, p0={p0:?}, t={t}"),
        value,
        derivation: "linear Hamilton equations solved in closed form",
    })
}

/// Foot of the free-particle characteristic through `(p, x)` after time
/// `t`: the transported density is `ρ₀(p, x − pt/m)`.
pub fn oracle_free_characteristic(p: f64, x: f64, t: f64, mass: f64) -> (f64, f64) {
    (p, x - p * t / mass)
}

/// Largest monomial degree [`oracle_polynomial_star`] accepts.
pub const ORACLE_MAX_DEGREE: u32 = 6;

pub type ExactCoef = Complex<Rational64>;

/// Polynomial with exact Gaussian-rational coefficients, exponents
/// `[p_1..p_n, x_1..x_n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPolynomial {
    n: usize,
    terms: BTreeMap<Vec<u32>, ExactCoef>,
}

impl ExactPolynomial {
    pub fn monomial(n: usize, exponents: Vec<u32>, c: ExactCoef) -> Self {
        assert_eq!(exponents.len(), 2 * n);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponents, c);
        }
        ExactPolynomial { n, terms }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, ExactCoef> {
        &self.terms
    }

    pub fn coefficient(&self, exponents: &[u32]) -> ExactCoef {
        self.terms.get(exponents).copied().unwrap_or_else(ExactCoef::zero)
    }

    fn add_term(&mut self, e: Vec<u32>, c: ExactCoef) {
        let v = self.coefficient(&e) + c;
        if v.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    /// Floating-point copy.
    pub fn to_polynomial(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (e, c) in &self.terms {
            let re = *c.re.numer() as f64 / *c.re.denom() as f64;
            let im = *c.im.numer() as f64 / *c.im.denom() as f64;
            out = &out + &Polynomial::monomial(self.n, e.clone(), Complex64::new(re, im));
        }
        out
    }
}

impl fmt::Display for ExactPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("({}+{}i){e:?}", c.re, c.im)).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Exact Moyal product of two monomials `c_a z^{e_a} ⋆ c_b z^{e_b}` with
/// deformation strength `s` (1 for the ħ = 2 product):
///
/// ```text
/// Σ_{a,b} (−is)^{|a|} (is)^{|b|} / (a! b!) · ∂_p^a ∂_x^b α · ∂_x^a ∂_p^b β
/// ```
pub fn oracle_polynomial_star(
    n: usize,
    alpha: (&[u32], ExactCoef),
    beta: (&[u32], ExactCoef),
    s: Rational64,
) -> Result<OracleResult<ExactPolynomial>> {
    let (ea, ca) = alpha;
    let (eb, cb) = beta;
    if ea.len() != 2 * n || eb.len() != 2 * n {
        return Err(Error::DimensionMismatch { left: 2 * n, right: ea.len().max(eb.len()) });
    }
    for e in [ea, eb] {
        let deg: u32 = e.iter().sum();
        if deg > ORACLE_MAX_DEGREE {
            return Err(Error::InvalidInput(format!(
                "monomial degree {deg} exceeds the oracle cap {ORACLE_MAX_DEGREE}"
            )));
        }
    }
    let mut out = ExactPolynomial { n, terms: BTreeMap::new() };
    // a_i ≤ min(ea_p_i, eb_x_i), b_i ≤ min(ea_x_i, eb_p_i).
    let bounds: Vec<u32> = (0..n)
        .map(|i| ea[i].min(eb[n + i]))
        .chain((0..n).map(|i| ea[n + i].min(eb[i])))
        .collect();
    let mut idx = vec![0u32; 2 * n];
    loop {
        let (a, b) = idx.split_at(n);
        let mut coef = ca * cb;
        let i_unit = ExactCoef::new(Rational64::zero(), Rational64::one());
        let minus_is = -i_unit * s;
        let is = i_unit * s;
        for _ in 0..a.iter().sum::<u32>() {
            coef *= minus_is;
        }
        for _ in 0..b.iter().sum::<u32>() {
            coef *= is;
        }
        let mut e = vec![0u32; 2 * n];
        let mut scalar = Rational64::one();
        for i in 0..n {
            // α: ∂_{p_i}^{a_i} ∂_{x_i}^{b_i}; β: ∂_{x_i}^{a_i} ∂_{p_i}^{b_i}.
            scalar *= falling(ea[i], a[i]) * falling(ea[n + i], b[i]);
            scalar *= falling(eb[n + i], a[i]) * falling(eb[i], b[i]);
            scalar /= fact(a[i]) * fact(b[i]);
            e[i] = ea[i] - a[i] + eb[i] - b[i];
            e[n + i] = ea[n + i] - b[i] + eb[n + i] - a[i];
        }
        out.add_term(e, coef * scalar);

        // Next multi-index within bounds.
        let mut pos = 0;
        loop {
            if pos == 2 * n {
                return Ok(OracleResult {
                    name: "polynomial_star",
                    inputs: format!("{ea:?} ⋆ {eb:?}, s={s}"),
                    value: out,
                    derivation: "terminating bidifferential series with exact rational coefficients",
                });
            }
            if idx[pos] < bounds[pos] {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn falling(e: u32, d: u32) -> Rational64 {
    (0..d).fold(Rational64::one(), |acc, j| acc * Rational64::from_integer(i64::from(e - j)))
}

fn fact(k: u32) -> Rational64 {
    falling(k, k)
}
