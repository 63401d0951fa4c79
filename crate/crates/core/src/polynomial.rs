//! Polynomials in the phase-space coordinates.
//!
//! Polynomial observables (`x`, `p`, `p² + x²`, ...) do not decay at the
//! grid boundary, so spectral derivatives of their samples are meaningless.
//! They are carried symbolically instead; the star product, the brackets
//! and the evolution of polynomial observables all work on coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Exponent vector `[p_1..p_n, x_1..x_n]`.
pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Exponents, Complex64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: impl Into<Complex64>) -> Self {
        Self::monomial(n, vec![0; 2 * n], c)
    }

    /// `c · Π p_i^{e_i} x_i^{e_{n+i}}`.
    pub fn monomial(n: usize, exponents: Exponents, c: impl Into<Complex64>) -> Self {
        assert_eq!(exponents.len(), 2 * n, "exponent vector must have 2n entries");
        let mut poly = Self::zero(n);
        let c = c.into();
        if c != Complex64::new(0.0, 0.0) {
            poly.terms.insert(exponents, c);
        }
        poly
    }

    /// The momentum coordinate `p_axis`.
    pub fn p(n: usize, axis: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[axis] = 1;
        Self::monomial(n, e, 1.0)
    }

    /// The position coordinate `x_axis`.
    pub fn x(n: usize, axis: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[n + axis] = 1;
        Self::monomial(n, e, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero(self.n);
        for (e, v) in &self.terms {
            out.insert_add(e.clone(), v * c);
        }
        out
    }

    pub fn conj(&self) -> Self {
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    /// Mixed partial derivative with orders indexed like [`Exponents`].
    pub fn derivative(&self, orders: &[u32]) -> Self {
        assert_eq!(orders.len(), 2 * self.n);
        let mut out = Self::zero(self.n);
        'terms: for (e, c) in &self.terms {
            let mut factor = 1.0;
            let mut exps = e.clone();
            for (slot, &d) in exps.iter_mut().zip(orders) {
                if d > *slot {
                    continue 'terms;
                }
                factor *= falling_factorial(*slot, d);
                *slot -= d;
            }
            out.insert_add(exps, c * factor);
        }
        out
    }

    /// Derivative along one axis (`0..n` momenta, `n..2n` positions).
    pub fn derivative_axis(&self, axis: usize, order: u32) -> Self {
        let mut orders = vec![0; 2 * self.n];
        orders[axis] = order;
        self.derivative(&orders)
    }

    pub fn eval(&self, p: &[f64], x: &[f64]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = 1.0;
            for i in 0..self.n {
                m *= p[i].powi(e[i] as i32) * x[i].powi(e[self.n + i] as i32);
            }
            sum += c * m;
        }
        sum
    }

    /// Moyal product with deformation strength `s` (`s = 1/k²`; `s = 1`
    /// is the ħ = 2 product). The series terminates, so this is exact up to
    /// coefficient rounding.
    pub fn star(&self, other: &Polynomial, s: f64) -> Result<Polynomial> {
        self.star_to_order(other, s, u32::MAX)
    }

    /// [`Polynomial::star`] keeping only bidifferential orders `<= max_order`.
    pub fn star_to_order(&self, other: &Polynomial, s: f64, max_order: u32) -> Result<Polynomial> {
        check_dims(self.n, other.n)?;
        let n = self.n;
        let max_order = self.degree().min(other.degree()).min(max_order);
        let mut out = Self::zero(n);
        for idx in multi_indices(2 * n, max_order) {
            // idx = [a_1..a_n, b_1..b_n]: a acts on p of the left factor and
            // x of the right one, b the other way round.
            let (a, b) = idx.split_at(n);
            let left = self.derivative(&idx);
            if left.is_zero() {
                continue;
            }
            let mut right_orders = b.to_vec();
            right_orders.extend_from_slice(a);
            let right = other.derivative(&right_orders);
            if right.is_zero() {
                continue;
            }
            let coef = star_coefficient(a, b, s);
            out = &out + &(&left * &right).scale(coef);
        }
        Ok(out)
    }

    /// `self ⋆ other − other ⋆ self`.
    pub fn moyal_bracket(&self, other: &Polynomial, s: f64) -> Result<Polynomial> {
        Ok(&self.star(other, s)? - &other.star(self, s)?)
    }

    /// `Σ_i ∂_{x_i}α ∂_{p_i}β − ∂_{p_i}α ∂_{x_i}β`.
    pub fn poisson_bracket(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dims(self.n, other.n)?;
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            let t1 = &self.derivative_axis(n + i, 1) * &other.derivative_axis(i, 1);
            let t2 = &self.derivative_axis(i, 1) * &other.derivative_axis(n + i, 1);
            out = &(&out + &t1) - &t2;
        }
        Ok(out)
    }

    /// Largest coefficient magnitude.
    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn insert_add(&mut self, e: Exponents, c: Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let v = self.terms.get(&e).copied().unwrap_or(zero) + c;
        if v == zero {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }
}

/// `(−is)^{|a|} (is)^{|b|} / (a! b!)`.
pub(crate) fn star_coefficient(a: &[u32], b: &[u32], s: f64) -> Complex64 {
    let na: u32 = a.iter().sum();
    let nb: u32 = b.iter().sum();
    let denom: f64 = a.iter().chain(b).map(|&k| factorial(k)).product();
    let mag = s.powi((na + nb) as i32) / denom;
    Complex64::new(0.0, -1.0).powu(na) * Complex64::new(0.0, 1.0).powu(nb) * mag
}

pub(crate) fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn falling_factorial(e: u32, d: u32) -> f64 {
    (0..d).map(|j| f64::from(e - j)).product()
}

/// All multi-indices of length `len` with total order `<= max_total`, in
/// order of increasing total.
pub(crate) fn multi_indices(len: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        let mut cur = vec![0; len];
        fill_indices(&mut cur, 0, total, &mut out);
    }
    out
}

fn fill_indices(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v;
        fill_indices(cur, pos + 1, remaining - v, out);
    }
    cur[pos] = 0;
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_add(e.clone(), *c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_add(e.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n);
        let mut out = Polynomial::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_add(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for i in 0..self.n {
                let suffix = if self.n > 1 { format!("{}", i + 1) } else { String::new() };
                if e[i] > 0 {
                    write!(f, "·p{suffix}^{}", e[i])?;
                }
                if e[self.n + i] > 0 {
                    write!(f, "·x{suffix}^{}", e[self.n + i])?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn x_star_p_has_single_correction() {
        let x = Polynomial::x(1, 0);
        let p = Polynomial::p(1, 0);
        let xp = x.star(&p, 1.0).unwrap();
        let expected = &(&x * &p) + &Polynomial::constant(1, c(0.0, 1.0));
        assert_eq!(xp, expected);
        let px = p.star(&x, 1.0).unwrap();
        assert_eq!(px, &(&x * &p) - &Polynomial::constant(1, c(0.0, 1.0)));
    }

    #[test]
    fn x2_star_p2_two_terms() {
        let x2 = Polynomial::monomial(1, vec![0, 2], 1.0);
        let p2 = Polynomial::monomial(1, vec![2, 0], 1.0);
        let got = x2.star(&p2, 1.0).unwrap();
        let want = &(&Polynomial::monomial(1, vec![2, 2], 1.0)
            + &Polynomial::monomial(1, vec![1, 1], c(0.0, 4.0)))
            + &Polynomial::constant(1, -2.0);
        assert_eq!(got, want);
    }

    #[test]
    fn contracted_commutator_scales() {
        let x = Polynomial::x(1, 0);
        let p = Polynomial::p(1, 0);
        for k in [1.0, 2.0, 4.0, 8.0] {
            let s = 1.0 / (k * k);
            let br = x.moyal_bracket(&p, s).unwrap();
            assert_eq!(br, Polynomial::constant(1, c(0.0, 2.0 * s)));
        }
    }

    #[test]
    fn poisson_of_canonical_pair() {
        let x = Polynomial::x(2, 1);
        let p = Polynomial::p(2, 1);
        assert_eq!(x.poisson_bracket(&p).unwrap(), Polynomial::constant(2, 1.0));
        assert!(x.poisson_bracket(&Polynomial::p(2, 0)).unwrap().is_zero());
    }

    #[test]
    fn derivative_drops_constants() {
        let q = &Polynomial::monomial(1, vec![3, 1], 2.0) + &Polynomial::constant(1, 5.0);
        let d = q.derivative(&[2, 1]);
        assert_eq!(d, Polynomial::monomial(1, vec![1, 0], 12.0));
        assert!(q.derivative(&[4, 0]).is_zero());
    }

    #[test]
    fn multi_index_count() {
        // C(len + t, t) indices of total <= t
        assert_eq!(multi_indices(2, 3).len(), 10);
        assert_eq!(multi_indices(4, 2).len(), 15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = Polynomial::x(1, 0);
        let b = Polynomial::x(2, 0);
        assert!(matches!(a.star(&b, 1.0), Err(Error::DimensionMismatch { .. })));
    }
}
