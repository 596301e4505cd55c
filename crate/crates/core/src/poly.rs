//! Holomorphic and N-analytic polynomials.
//!
//! An N-analytic polynomial is stored as its holomorphic components
//! `Q_0, ..., Q_{N-1}` so that `P(z) = Σ_p Q_p(z) z̄^p`. Every constructor and
//! arithmetic operation trims trailing zero coefficients, which gives the zero
//! polynomial a unique representation and makes equality and degree exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

/// Degree of a polynomial, with an explicit sentinel for the zero polynomial.
///
/// `NegInf` compares below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Degree {
    NegInf,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }

    pub fn is_neg_inf(self) -> bool {
        self == Degree::NegInf
    }

    /// `self ≤ n` for a nonnegative integer `n`.
    pub fn at_most(self, n: usize) -> bool {
        self <= Degree::Finite(n)
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Degree::NegInf, Degree::NegInf) => Ordering::Equal,
            (Degree::NegInf, _) => Ordering::Less,
            (_, Degree::NegInf) => Ordering::Greater,
            (Degree::Finite(a), Degree::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Holomorphic polynomial `Σ_q c_q z^q` with trimmed dense coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HoloPoly {
    coeffs: Vec<ComplexScalar>,
}

impl HoloPoly {
    pub fn new(mut coeffs: Vec<ComplexScalar>) -> Self {
        trim(&mut coeffs);
        HoloPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| ComplexScalar::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        HoloPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: ComplexScalar) -> Self {
        Self::new(vec![c])
    }

    /// `c · z^q`.
    pub fn monomial(q: usize, c: ComplexScalar) -> Self {
        let mut coeffs = vec![ComplexScalar::new(0.0, 0.0); q + 1];
        coeffs[q] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[ComplexScalar] {
        &self.coeffs
    }

    /// Coefficient of `z^q`, zero beyond the stored range.
    pub fn coeff(&self, q: usize) -> ComplexScalar {
        self.coeffs.get(q).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInf,
            len => Degree::Finite(len - 1),
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, z: ComplexScalar) -> ComplexScalar {
        self.coeffs
            .iter()
            .rev()
            .fold(ComplexScalar::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// m-th derivative with exact integer factors.
    pub fn derivative(&self, m: usize) -> HoloPoly {
        if m == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(m)
            .map(|(q, &c)| c * falling_factorial(q, m))
            .collect();
        HoloPoly::new(coeffs)
    }

    pub fn scale(&self, c: ComplexScalar) -> HoloPoly {
        HoloPoly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    fn zip_with(&self, other: &HoloPoly, op: impl Fn(ComplexScalar, ComplexScalar) -> ComplexScalar) -> HoloPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        HoloPoly::new((0..len).map(|q| op(self.coeff(q), other.coeff(q))).collect())
    }
}

impl Add for &HoloPoly {
    type Output = HoloPoly;
    fn add(self, rhs: &HoloPoly) -> HoloPoly {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &HoloPoly {
    type Output = HoloPoly;
    fn sub(self, rhs: &HoloPoly) -> HoloPoly {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &HoloPoly {
    type Output = HoloPoly;
    fn neg(self) -> HoloPoly {
        HoloPoly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

/// N-analytic polynomial `Σ_{p<N} Q_p(z) z̄^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NAnalyticPoly {
    components: Vec<HoloPoly>,
}

impl NAnalyticPoly {
    /// Builds a polynomial whose order is the number of components (at least one).
    pub fn new(components: Vec<HoloPoly>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("an N-analytic polynomial needs order N >= 1".into()));
        }
        Ok(NAnalyticPoly { components })
    }

    pub fn zero(order: usize) -> Self {
        assert!(order >= 1, "order must be at least 1");
        NAnalyticPoly { components: vec![HoloPoly::zero(); order] }
    }

    /// `c · z^q z̄^p` viewed as a polynomial of the given order (requires `p < order`).
    pub fn monomial(order: usize, q: usize, p: usize, c: ComplexScalar) -> Result<Self> {
        if p >= order {
            return Err(Error::IndexOutOfRange { index: p, order });
        }
        let mut poly = Self::zero(order);
        poly.components[p] = HoloPoly::monomial(q, c);
        Ok(poly)
    }

    /// Builds from per-component coefficient vectors `coeffs[p][q]`.
    pub fn from_coeffs(coeffs: Vec<Vec<ComplexScalar>>) -> Result<Self> {
        Self::new(coeffs.into_iter().map(HoloPoly::new).collect())
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[HoloPoly] {
        &self.components
    }

    /// The holomorphic component `K_p(P)`.
    pub fn component(&self, p: usize) -> Result<&HoloPoly> {
        self.components.get(p).ok_or(Error::IndexOutOfRange { index: p, order: self.order() })
    }

    /// Coefficient of `z^q z̄^p` (zero outside the stored range).
    pub fn coeff(&self, p: usize, q: usize) -> ComplexScalar {
        self.components.get(p).map(|c| c.coeff(q)).unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(HoloPoly::is_zero)
    }

    /// Maximum holomorphic degree over the nonzero components.
    pub fn degree(&self) -> Degree {
        self.components.iter().map(HoloPoly::degree).max().unwrap_or(Degree::NegInf)
    }

    /// `Σ_p Q_p(z) conj(z)^p`, Horner in both variables.
    pub fn eval(&self, z: ComplexScalar) -> ComplexScalar {
        let w = z.conj();
        self.components
            .iter()
            .rev()
            .fold(ComplexScalar::new(0.0, 0.0), |acc, q| acc * w + q.eval(z))
    }

    /// `(∂/∂z̄)^m P`, using `∂̄(Q_p z̄^p) = p Q_p z̄^{p-1}`; the order drops to `max(N-m, 1)`.
    pub fn dbar_pow(&self, m: usize) -> NAnalyticPoly {
        let n = self.order();
        let new_order = n.saturating_sub(m).max(1);
        let mut components = vec![HoloPoly::zero(); new_order];
        for (p, q) in self.components.iter().enumerate().skip(m) {
            components[p - m] = q.scale(ComplexScalar::new(falling_factorial(p, m), 0.0));
        }
        NAnalyticPoly { components }
    }

    /// `(∂/∂z)^m P`, differentiating each component.
    pub fn dz_pow(&self, m: usize) -> NAnalyticPoly {
        NAnalyticPoly { components: self.components.iter().map(|q| q.derivative(m)).collect() }
    }

    pub fn scale(&self, c: ComplexScalar) -> NAnalyticPoly {
        NAnalyticPoly { components: self.components.iter().map(|q| q.scale(c)).collect() }
    }

    /// Same polynomial viewed with a larger order (padding with zero components).
    pub fn with_order(&self, order: usize) -> Result<NAnalyticPoly> {
        if order < self.order() && self.components[order..].iter().any(|q| !q.is_zero()) {
            return Err(Error::InvalidInput(format!(
                "cannot lower order to {order}: higher components are nonzero"
            )));
        }
        let mut components = self.components.clone();
        components.resize(order.max(1), HoloPoly::zero());
        Ok(NAnalyticPoly { components })
    }

    /// `z^s · P`.
    pub fn mul_z_pow(&self, s: usize) -> NAnalyticPoly {
        let components = self
            .components
            .iter()
            .map(|q| {
                if q.is_zero() {
                    return HoloPoly::zero();
                }
                let mut coeffs = vec![ComplexScalar::new(0.0, 0.0); s];
                coeffs.extend_from_slice(q.coeffs());
                HoloPoly::new(coeffs)
            })
            .collect();
        NAnalyticPoly { components }
    }

    fn zip_with(&self, other: &NAnalyticPoly, op: impl Fn(&HoloPoly, &HoloPoly) -> HoloPoly) -> NAnalyticPoly {
        let order = self.order().max(other.order());
        let zero = HoloPoly::zero();
        let components = (0..order)
            .map(|p| op(self.components.get(p).unwrap_or(&zero), other.components.get(p).unwrap_or(&zero)))
            .collect();
        NAnalyticPoly { components }
    }
}

impl Add for &NAnalyticPoly {
    type Output = NAnalyticPoly;
    fn add(self, rhs: &NAnalyticPoly) -> NAnalyticPoly {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &NAnalyticPoly {
    type Output = NAnalyticPoly;
    fn sub(self, rhs: &NAnalyticPoly) -> NAnalyticPoly {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &NAnalyticPoly {
    type Output = NAnalyticPoly;
    fn neg(self) -> NAnalyticPoly {
        NAnalyticPoly { components: self.components.iter().map(|q| -q).collect() }
    }
}

/// Random polynomial of the given order with every coefficient uniform in the
/// square `[-1, 1] × [-1, 1]` and degree at most `max_degree`. Deterministic in `seed`.
pub fn random_poly(order: usize, max_degree: usize, seed: u64) -> Result<NAnalyticPoly> {
    if order == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..order)
        .map(|_| {
            (0..=max_degree)
                .map(|_| ComplexScalar::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect()
        })
        .collect();
    NAnalyticPoly::from_coeffs(coeffs)
}

/// `q (q-1) ... (q-m+1)` as a float; exact while the product stays below 2^53.
pub fn falling_factorial(q: usize, m: usize) -> f64 {
    (0..m).map(|i| (q - i) as f64).product()
}

/// `ln(n!)`, summed directly for small `n` and by Stirling's series beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= 20 {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    // Stirling series for ln Γ(x), accurate to ~1e-15 relative at x > 21.
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// `n!` as a float (overflows to infinity past 170).
pub fn factorial(n: usize) -> f64 {
    if n <= 20 {
        (1..=n).map(|i| i as f64).product()
    } else {
        ln_factorial(n).exp()
    }
}

fn trim(coeffs: &mut Vec<ComplexScalar>) {
    while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
        coeffs.pop();
    }
}
