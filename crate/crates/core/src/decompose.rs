//! Recovery of holomorphic components from samples on concentric circles.
//!
//! On the circle `|z| = r` a term `a_{p,q} z^q z̄^p` equals `a_{p,q} r^{q+p} e^{i(q-p)θ}`,
//! so the Fourier mode `m = q - p` of the samples mixes the coefficients
//! `a_{p, m+p}` with weights `r^{m+2p}`. Sampling `N` circles gives, for every
//! mode, a small linear system in those coefficients.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{ComplexScalar, HoloPoly, NAnalyticPoly};

/// Values of a function at `M` equispaced points `r e^{2πij/M}` of a circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSamples {
    pub radius: f64,
    pub values: Vec<ComplexScalar>,
}

impl CircleSamples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The node `r e^{2πij/M}`.
pub fn circle_node(radius: f64, j: usize, m: usize) -> ComplexScalar {
    let (s, c) = (2.0 * PI * j as f64 / m as f64).sin_cos();
    ComplexScalar::new(radius * c, radius * s)
}

/// Samples `f` on the circle of the given radius at `m ≥ 4` equispaced angles.
pub fn sample_circle(f: impl Fn(ComplexScalar) -> ComplexScalar, radius: f64, m: usize) -> Result<CircleSamples> {
    try_sample_circle(|z| Ok(f(z)), radius, m)
}

/// Like [`sample_circle`] for fallible evaluators; the first failure is returned.
pub fn try_sample_circle(
    mut f: impl FnMut(ComplexScalar) -> Result<ComplexScalar>,
    radius: f64,
    m: usize,
) -> Result<CircleSamples> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("circle radius must be positive, got {radius}")));
    }
    if m < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 samples per circle, got {m}")));
    }
    let values = (0..m).map(|j| f(circle_node(radius, j, m))).collect::<Result<Vec<_>>>()?;
    Ok(CircleSamples { radius, values })
}

/// Normalized discrete Fourier transform `φ_m = (1/M) Σ_j v_j e^{-2πijm/M}`, `m = 0..M-1`,
/// by direct summation.
pub fn dft_direct(values: &[ComplexScalar]) -> Vec<ComplexScalar> {
    let m = values.len();
    let twiddle: Vec<ComplexScalar> = (0..m).map(|t| circle_node(1.0, t, m).conj()).collect();
    let scale = 1.0 / m as f64;
    (0..m)
        .map(|mode| {
            let mut acc = ComplexScalar::new(0.0, 0.0);
            for (j, &v) in values.iter().enumerate() {
                acc += v * twiddle[(j * mode) % m];
            }
            acc * scale
        })
        .collect()
}

/// Same transform as [`dft_direct`] by an iterative radix-2 FFT; `values.len()` must be a power of two.
pub fn fft_radix2(values: &[ComplexScalar]) -> Vec<ComplexScalar> {
    let n = values.len();
    assert!(n.is_power_of_two(), "radix-2 FFT needs a power-of-two length");
    let bits = n.trailing_zeros();
    let mut a: Vec<ComplexScalar> = vec![ComplexScalar::new(0.0, 0.0); n];
    for (i, &v) in values.iter().enumerate() {
        let rev = if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) };
        a[rev] = v;
    }
    let twiddle: Vec<ComplexScalar> = (0..n / 2).map(|t| circle_node(1.0, t, n).conj()).collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = twiddle[k * stride];
                let u = a[start + k];
                let v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
        len <<= 1;
    }
    let scale = 1.0 / n as f64;
    a.iter_mut().for_each(|x| *x *= scale);
    a
}

/// Values of `Σ_j weight_j · P_j` on the circle `|z| = radius` at `m` equispaced angles,
/// computed by accumulating Fourier modes and one inverse FFT (`m` a power of two larger
/// than the span of modes, `q_max + order`).
pub fn polys_on_circle<'a>(
    terms: impl IntoIterator<Item = (ComplexScalar, &'a NAnalyticPoly)>,
    radius: f64,
    m: usize,
) -> Vec<ComplexScalar> {
    assert!(m.is_power_of_two(), "circle synthesis needs a power-of-two sample count");
    let mut modes = vec![ComplexScalar::new(0.0, 0.0); m];
    for (weight, poly) in terms {
        if weight == ComplexScalar::new(0.0, 0.0) {
            continue;
        }
        for (p, comp) in poly.components().iter().enumerate() {
            for (q, &c) in comp.coeffs().iter().enumerate() {
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let mode = (q as i64 - p as i64).rem_euclid(m as i64) as usize;
                modes[mode] += weight * c * radius.powi((q + p) as i32);
            }
        }
    }
    // Σ_mode b e^{+iθ mode} = conj(M · forward(conj b)).
    let conj: Vec<ComplexScalar> = modes.iter().map(|b| b.conj()).collect();
    fft_radix2(&conj).into_iter().map(|v| (v * m as f64).conj()).collect()
}

/// Fourier modes of one circle's samples, addressable by signed mode index.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierModes {
    raw: Vec<ComplexScalar>,
}

impl FourierModes {
    /// Number of samples `M`.
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Largest admissible `|m|`, namely `M/2 - 1`.
    pub fn max_mode(&self) -> i64 {
        self.raw.len() as i64 / 2 - 1
    }

    /// `φ_m` for `|m| ≤ M/2 - 1`.
    pub fn get(&self, m: i64) -> Option<ComplexScalar> {
        if m.abs() > self.max_mode() {
            return None;
        }
        let len = self.raw.len() as i64;
        Some(self.raw[m.rem_euclid(len) as usize])
    }

    /// All admissible `(m, φ_m)` pairs in increasing `m`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, ComplexScalar)> + '_ {
        let top = self.max_mode();
        (-top..=top).map(move |m| (m, self.get(m).expect("mode in range")))
    }
}

/// Fourier analysis of circle samples (radix-2 path when `M` is a power of two).
pub fn fourier_modes(samples: &CircleSamples) -> FourierModes {
    let raw = if samples.values.len().is_power_of_two() {
        fft_radix2(&samples.values)
    } else {
        dft_direct(&samples.values)
    };
    FourierModes { raw }
}

/// Taylor coefficients `a_{p,q}` of the components of an order-N function, for `q ≤ q_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    order: usize,
    q_max: usize,
    coeffs: Vec<Vec<ComplexScalar>>,
}

impl CoefficientTable {
    pub fn zeros(order: usize, q_max: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("table order must be at least 1".into()));
        }
        Ok(CoefficientTable { order, q_max, coeffs: vec![vec![ComplexScalar::new(0.0, 0.0); q_max + 1]; order] })
    }

    /// Table from per-component vectors; shorter rows are zero-padded to the longest.
    pub fn from_rows(rows: Vec<Vec<ComplexScalar>>) -> Result<Self> {
        let q_max = rows.iter().map(Vec::len).max().unwrap_or(1).max(1) - 1;
        let mut table = Self::zeros(rows.len(), q_max)?;
        for (p, row) in rows.into_iter().enumerate() {
            for (q, c) in row.into_iter().enumerate() {
                table.coeffs[p][q] = c;
            }
        }
        Ok(table)
    }

    /// Coefficients of a polynomial, truncated to `q_max` (an error if that would drop terms).
    pub fn from_poly(poly: &NAnalyticPoly, q_max: usize) -> Result<Self> {
        if !poly.degree().at_most(q_max) {
            return Err(Error::InvalidInput(format!("polynomial degree {} exceeds q_max = {q_max}", poly.degree())));
        }
        let mut table = Self::zeros(poly.order(), q_max)?;
        for (p, comp) in poly.components().iter().enumerate() {
            for (q, &c) in comp.coeffs().iter().enumerate() {
                table.coeffs[p][q] = c;
            }
        }
        Ok(table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    pub fn get(&self, p: usize, q: usize) -> ComplexScalar {
        self.coeffs.get(p).and_then(|row| row.get(q)).copied().unwrap_or_default()
    }

    pub fn set(&mut self, p: usize, q: usize, value: ComplexScalar) -> Result<()> {
        if p >= self.order {
            return Err(Error::IndexOutOfRange { index: p, order: self.order });
        }
        if q > self.q_max {
            return Err(Error::InvalidInput(format!("power {q} exceeds q_max = {}", self.q_max)));
        }
        self.coeffs[p][q] = value;
        Ok(())
    }

    pub fn row(&self, p: usize) -> &[ComplexScalar] {
        &self.coeffs[p]
    }

    /// `|a_{p,q}|` for `q = 0..=q_max`.
    pub fn moduli(&self, p: usize) -> Vec<f64> {
        self.coeffs[p].iter().map(|c| c.norm()).collect()
    }

    /// Nonzero entries `(p, q, a_{p,q})` in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, ComplexScalar)> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(p, row)| {
            row.iter().enumerate().filter(|(_, c)| c.re != 0.0 || c.im != 0.0).map(move |(q, &c)| (p, q, c))
        })
    }

    pub fn to_poly(&self) -> NAnalyticPoly {
        NAnalyticPoly::from_coeffs(self.coeffs.clone()).expect("table order is at least 1")
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `|a_{p,q} - b_{p,q}|` over the union of both index ranges.
    pub fn max_abs_diff(&self, other: &CoefficientTable) -> f64 {
        let order = self.order.max(other.order);
        let q_max = self.q_max.max(other.q_max);
        (0..order)
            .flat_map(|p| (0..=q_max).map(move |q| (p, q)))
            .map(|(p, q)| (self.get(p, q) - other.get(p, q)).norm())
            .fold(0.0, f64::max)
    }
}

/// Outcome of [`components_from_circles`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub table: CoefficientTable,
    pub radii: Vec<f64>,
    /// Largest `|A x - φ|` over all modes and circles, relative to the largest sample modulus.
    pub residual: f64,
    /// Largest per-mode condition estimate.
    pub condition: f64,
    /// Set when some mode's condition estimate exceeds [`ILL_CONDITIONED_THRESHOLD`].
    pub ill_conditioned: bool,
}

pub const ILL_CONDITIONED_THRESHOLD: f64 = 1e10;

/// Default radii `0.95·(0.5 + 0.5 j/(N-1))`, or `0.95` for a single circle.
pub fn default_radii(n: usize) -> Vec<f64> {
    linspace_radii(n, 0.475, 0.95)
}

/// Radii spread over `[0.92, 1.05]`. Only valid for functions polyanalytic beyond the
/// unit circle (polynomials in particular); recovering high degrees from radii
/// well inside the disk amplifies sample rounding by `r^{-q}`.
pub fn straddling_radii(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    linspace_radii(n, 0.92, 1.05)
}

/// Radii `1 - j/(2 q_max)`, `j = 0..N-1`: circles close enough together that the
/// per-mode systems stay well conditioned up to power `q_max`, and none outside the unit
/// circle. Suited to recovering long tables of functions known on the closed disk.
pub fn clustered_radii(n: usize, q_max: usize) -> Vec<f64> {
    let h = 1.0 / (2.0 * q_max.max(n) as f64);
    (0..n).rev().map(|j| 1.0 - h * j as f64).collect()
}

fn linspace_radii(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![hi],
        _ => (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect(),
    }
}

/// Recovers `a_{p,q}` (`p < N`, `q ≤ q_max`) from samples on `N` circles of distinct radii.
///
/// For each mode the unknowns are the `a_{p,m+p}` with `0 ≤ m+p ≤ q_max`. When a
/// mode has fewer unknowns than circles, the outermost circles are used.
pub fn components_from_circles(samples: &[CircleSamples], q_max: usize) -> Result<Decomposition> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InvalidInput("need at least one circle".into()));
    }
    let m_len = samples[0].len();
    if samples.iter().any(|s| s.len() != m_len) {
        return Err(Error::InvalidInput("all circles must carry the same number of samples".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| samples[a].radius.total_cmp(&samples[b].radius));
    for w in order.windows(2) {
        if samples[w[0]].radius == samples[w[1]].radius {
            return Err(Error::SingularSystem(format!("repeated radius {}", samples[w[0]].radius)));
        }
    }
    if samples.iter().any(|s| !(s.radius > 0.0)) {
        return Err(Error::Domain("radii must be positive".into()));
    }
    let max_mode = m_len as i64 / 2 - 1;
    if q_max as i64 > max_mode || n as i64 - 1 > max_mode {
        return Err(Error::InvalidInput(format!(
            "M = {m_len} samples cannot resolve modes -{}..{q_max}; need M >= {}",
            n - 1,
            2 * (q_max.max(n - 1) + 1)
        )));
    }

    let radii: Vec<f64> = order.iter().map(|&i| samples[i].radius).collect();
    let modes: Vec<FourierModes> = order.iter().map(|&i| fourier_modes(&samples[i])).collect();
    let scale = samples.iter().flat_map(|s| s.values.iter()).map(|v| v.norm()).fold(0.0, f64::max);

    let solved: Vec<Result<ModeSolution>> = (-(n as i64 - 1)..=q_max as i64)
        .into_par_iter()
        .map(|m| solve_mode(m, n, q_max, &radii, &modes))
        .collect();

    let mut table = CoefficientTable::zeros(n, q_max)?;
    let mut residual: f64 = 0.0;
    let mut condition: f64 = 1.0;
    for sol in solved {
        let sol = sol?;
        for (p, q, value) in sol.entries {
            table.coeffs[p][q] = value;
        }
        residual = residual.max(sol.residual);
        condition = condition.max(sol.condition);
    }
    let residual = if scale > 0.0 { residual / scale } else { residual };
    Ok(Decomposition { table, radii, residual, condition, ill_conditioned: condition > ILL_CONDITIONED_THRESHOLD })
}

struct ModeSolution {
    entries: Vec<(usize, usize, ComplexScalar)>,
    residual: f64,
    condition: f64,
}

fn solve_mode(m: i64, n: usize, q_max: usize, radii: &[f64], modes: &[FourierModes]) -> Result<ModeSolution> {
    let p_lo = (-m).max(0) as usize;
    let p_hi = (n as i64 - 1).min(q_max as i64 - m);
    if p_hi < p_lo as i64 {
        return Ok(ModeSolution { entries: Vec::new(), residual: 0.0, condition: 1.0 });
    }
    let unknowns: Vec<usize> = (p_lo..=p_hi as usize).collect();
    let u = unknowns.len();
    let phi: Vec<ComplexScalar> = modes.iter().map(|f| f.get(m).expect("mode checked against M")).collect();
    let weight = |j: usize, p: usize| radii[j].powi((m + 2 * p as i64) as i32);

    let rows: Vec<usize> = (n - u..n).collect();
    let a: Vec<Vec<f64>> = rows.iter().map(|&j| unknowns.iter().map(|&p| weight(j, p)).collect()).collect();
    let b: Vec<ComplexScalar> = rows.iter().map(|&j| phi[j]).collect();
    let (x, condition) = solve_dense(a, b)?;

    let mut residual: f64 = 0.0;
    for (j, &target) in phi.iter().enumerate() {
        let fitted: ComplexScalar = unknowns.iter().zip(&x).map(|(&p, &xi)| xi * weight(j, p)).sum();
        residual = residual.max((fitted - target).norm());
    }
    let entries = unknowns.iter().zip(x).map(|(&p, v)| (p, (m + p as i64) as usize, v)).collect();
    Ok(ModeSolution { entries, residual, condition })
}

/// Solves a small real-matrix, complex-right-hand-side system by Gaussian elimination
/// with partial pivoting after equilibrating columns. Returns the solution and the
/// ratio of the largest to smallest column norm of the eliminated factor.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<ComplexScalar>) -> Result<(Vec<ComplexScalar>, f64)> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("matrix must be square and match the right-hand side".into()));
    }
    let col_scale: Vec<f64> = (0..n)
        .map(|c| {
            let s = (0..n).map(|r| a[r][c].abs()).fold(0.0, f64::max);
            if s > 0.0 {
                1.0 / s
            } else {
                1.0
            }
        })
        .collect();
    for row in a.iter_mut() {
        for (c, v) in row.iter_mut().enumerate() {
            *v *= col_scale[c];
        }
    }
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).expect("nonempty range");
        if a[pivot][k].abs() < 1e-300 || !a[pivot][k].is_finite() {
            return Err(Error::SingularSystem(format!("zero pivot in column {k}")));
        }
        a.swap(k, pivot);
        b.swap(k, pivot);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == 0.0 {
                continue;
            }
            for c in k..n {
                a[i][c] -= f * a[k][c];
            }
            let bk = b[k];
            b[i] -= bk * f;
        }
    }
    let mut x = vec![ComplexScalar::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in k + 1..n {
            acc -= x[c] * a[k][c];
        }
        x[k] = acc / a[k][k];
    }
    for (xi, s) in x.iter_mut().zip(&col_scale) {
        *xi *= *s;
    }
    let col_norms: Vec<f64> = (0..n).map(|c| (0..=c).map(|r| a[r][c] * a[r][c]).sum::<f64>().sqrt()).collect();
    let hi = col_norms.iter().cloned().fold(0.0, f64::max);
    let lo = col_norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let diag_lo = (0..n).map(|k| a[k][k].abs()).fold(f64::INFINITY, f64::min);
    let condition = (hi / lo).max(hi / diag_lo);
    Ok((x, condition))
}

/// Samples `f` on the given circles and recovers its coefficient table.
pub fn decompose_function(
    f: impl Fn(ComplexScalar) -> ComplexScalar + Sync,
    radii: &[f64],
    samples_per_circle: usize,
    q_max: usize,
) -> Result<Decomposition> {
    let samples = radii
        .par_iter()
        .map(|&r| sample_circle(&f, r, samples_per_circle))
        .collect::<Result<Vec<_>>>()?;
    components_from_circles(&samples, q_max)
}

/// The holomorphic component `K_p(P)`.
pub fn kp_extract(poly: &NAnalyticPoly, p: usize) -> Result<HoloPoly> {
    poly.component(p).cloned()
}

/// Smallest power of two `M` with `M ≥ 2·q_max + 2·N + 4`, the sampling density
/// used when the caller does not choose one.
pub fn recommended_samples(q_max: usize, order: usize) -> usize {
    (2 * q_max + 2 * order + 4).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_wrap_to_signed_indices() {
        let s = sample_circle(|z| z.conj(), 0.5, 8).unwrap();
        let f = fourier_modes(&s);
        assert!((f.get(-1).unwrap() - ComplexScalar::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(f.get(4), None);
        assert_eq!(f.iter().count(), 7);
    }

    #[test]
    fn fft_matches_direct_on_small_lengths() {
        for len in [1usize, 2, 4, 8, 32] {
            let v: Vec<ComplexScalar> = (0..len).map(|j| ComplexScalar::new(j as f64, (j * j) as f64 * 0.1)).collect();
            let a = dft_direct(&v);
            let b = fft_radix2(&v);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-12, "len={len}");
            }
        }
    }

    #[test]
    fn solver_rejects_singular_matrix() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let b = vec![ComplexScalar::new(1.0, 0.0); 2];
        assert!(matches!(solve_dense(a, b), Err(Error::SingularSystem(_))));
    }
}
