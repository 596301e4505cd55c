//! Explicit constants `L_m`, `J_m`, the closed-form supremum of `t^{l/k} ρ^{t/2}`,
//! and verifiers for every inequality of the theory, each returning a [`BoundReport`].

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decompose::circle_node;
use crate::error::{Error, Result};
use crate::numeric::snap_ceil;
use crate::poly::{ln_factorial, ComplexScalar, HoloPoly, NAnalyticPoly};

/// Relative slack allowed for rounding when comparing the two sides.
pub const REPORT_SLACK: f64 = 1e-12;

/// One verified instance of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, parameters: BTreeMap<String, f64>, lhs: f64, rhs: f64) -> Self {
        let holds = lhs <= rhs * (1.0 + REPORT_SLACK) || (lhs <= rhs);
        BoundReport { name: name.into(), parameters, lhs, rhs, margin: rhs - lhs, holds }
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// The dilated disk `D_{k,R,n}` of radius `1 + R n^{-1/k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilatedDisk {
    pub k: f64,
    pub r: f64,
    pub n: usize,
}

impl DilatedDisk {
    pub fn new(k: f64, r: f64, n: usize) -> Result<Self> {
        if !(k > 0.0) || !(r > 0.0) || n == 0 {
            return Err(Error::Domain(format!("dilated disk needs k > 0, R > 0, n >= 1 (got {k}, {r}, {n})")));
        }
        Ok(DilatedDisk { k, r, n })
    }

    pub fn radius(&self) -> f64 {
        1.0 + self.r * (self.n as f64).powf(-1.0 / self.k)
    }
}

/// `L_m(s_1, ..., s_{m-1})` for `1 < s_1 < ... < s_{m-1}`.
pub fn lm(s: &[f64]) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::Domain("L_m needs m >= 2 (at least one node)".into()));
    }
    if s.iter().any(|&x| !(x > 1.0) || !x.is_finite()) {
        return Err(Error::Domain("every node of L_m must exceed 1".into()));
    }
    if s.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("nodes of L_m must be strictly increasing".into()));
    }
    let m = s.len() + 1;
    let sq: Vec<f64> = s.iter().map(|x| x * x).collect();
    let prefactor: f64 = sq.iter().map(|&x| (x + 1.0) / (x - 1.0)).product();
    let sum: f64 = (0..s.len())
        .map(|p| {
            let others: f64 = (0..s.len())
                .filter(|&j| j != p)
                .map(|j| (sq[j] + 1.0) / (sq[j] - sq[p]).abs())
                .product();
            s[p].powi(m as i32 - 1) * others
        })
        .sum();
    Ok(prefactor * sum)
}

/// `J_m(r0, r)`: `L_m` at the nodes `1 + j(r - r0)/(m r0)`, and `1` for `m = 1`.
pub fn jm(m: usize, r0: f64, r: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("J_m needs m >= 1".into()));
    }
    if !(r0 > 0.0) || !(r > r0) {
        return Err(Error::Domain(format!("J_m needs r > r0 > 0 (got r0 = {r0}, r = {r})")));
    }
    if m == 1 {
        return Ok(1.0);
    }
    let nodes: Vec<f64> = (1..m).map(|j| 1.0 + j as f64 * (r - r0) / (m as f64 * r0)).collect();
    lm(&nodes)
}

/// Compares `J_m(1 + ε/2, 1 + ε)` with `(m-1)(5m/2)^{2m-2}(1 + 2/ε)^{2m-2}`.
pub fn check_estm1(m: usize, eps: f64) -> Result<BoundReport> {
    if m < 2 {
        return Err(Error::Domain("the estimate is verified for m >= 2 only".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let lhs = jm(m, 1.0 + eps / 2.0, 1.0 + eps)?;
    let e = 2 * m as i32 - 2;
    let rhs = (m - 1) as f64 * (2.5 * m as f64).powi(e) * (1.0 + 2.0 / eps).powi(e);
    Ok(BoundReport::new("estm1", params(&[("m", m as f64), ("eps", eps)]), lhs, rhs))
}

/// `sup_{t ≥ 0} t^{l/k} ρ^{t/2} = ((2/(e k ln(1/ρ)))^{1/k})^l · l^{l/k}`, with `0^0 = 1`.
pub fn sup_power_decay(l: usize, k: f64, rho: f64) -> f64 {
    ln_sup_power_decay(l as f64, k, rho).exp()
}

/// Natural log of [`sup_power_decay`], valid for real `l ≥ 0`.
pub fn ln_sup_power_decay(l: f64, k: f64, rho: f64) -> f64 {
    if l == 0.0 {
        return 0.0;
    }
    (l / k) * ((2.0 / (E * k * (1.0 / rho).ln())).ln() + l.ln())
}

/// Sampling density for suprema over circles, disks and annuli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupGrid {
    /// Points per circle.
    pub angular: usize,
    /// Radial levels (excluding the center for disks).
    pub radial: usize,
}

impl Default for SupGrid {
    fn default() -> Self {
        SupGrid { angular: 1024, radial: 32 }
    }
}

/// Sampled `max |f|` on the circle `|z - center| = radius`.
pub fn circle_sup(f: &(impl Fn(ComplexScalar) -> ComplexScalar + ?Sized), center: ComplexScalar, radius: f64, angular: usize) -> f64 {
    (0..angular).map(|j| f(center + circle_node(radius, j, angular)).norm()).fold(0.0, f64::max)
}

/// Sampled `max |f|` on the closed disk: the center plus `grid.radial` circles up to `radius`.
pub fn disk_sup(f: &(impl Fn(ComplexScalar) -> ComplexScalar + ?Sized), center: ComplexScalar, radius: f64, grid: SupGrid) -> f64 {
    let levels = grid.radial.max(1);
    (1..=levels)
        .map(|i| circle_sup(f, center, radius * i as f64 / levels as f64, grid.angular))
        .fold(f(center).norm(), f64::max)
}

/// Sampled `max |f|` on the annulus `r0 ≤ |z - center| ≤ r` (`grid.radial + 1` circles).
pub fn annulus_sup(f: &(impl Fn(ComplexScalar) -> ComplexScalar + ?Sized), center: ComplexScalar, r0: f64, r: f64, grid: SupGrid) -> f64 {
    let levels = grid.radial.max(1);
    (0..=levels)
        .map(|i| circle_sup(f, center, r0 + (r - r0) * i as f64 / levels as f64, grid.angular))
        .fold(0.0, f64::max)
}

/// Which maximum-modulus inequality to verify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MaxModulusVariant {
    /// Sup on the disk of radius `r0` against the `N` circles of radii `r0, r_1, ..., r_{N-1}`;
    /// the vector holds `r_1..r_{N-1}`.
    Circles(Vec<f64>),
    /// Sup on the disk against the sup on the annulus `r0 < |z| < r`.
    Annulus,
    /// Sup of the `p`-th holomorphic component (about the center) against the annulus sup over `r0^p`.
    Component(usize),
}

/// The `p`-th holomorphic component of `f` in powers of `z̄ - conj(center)`.
pub fn component_about(f: &NAnalyticPoly, p: usize, center: ComplexScalar) -> Result<HoloPoly> {
    let n = f.order();
    if p >= n {
        return Err(Error::IndexOutOfRange { index: p, order: n });
    }
    let w = center.conj();
    let mut acc = HoloPoly::zero();
    for (j, q) in f.components().iter().enumerate().skip(p) {
        let binom = binomial(j, p);
        acc = &acc + &q.scale(w.powu((j - p) as u32) * binom);
    }
    Ok(acc)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Verifies one of the maximum-modulus estimates by sampling.
pub fn check_max_modulus(
    f: &NAnalyticPoly,
    center: ComplexScalar,
    r0: f64,
    r: f64,
    variant: &MaxModulusVariant,
    grid: SupGrid,
) -> Result<BoundReport> {
    if !(r0 > 0.0) || !(r > r0) {
        return Err(Error::Domain(format!("need 0 < r0 < r (got {r0}, {r})")));
    }
    let n = f.order();
    let eval = |z: ComplexScalar| f.eval(z);
    let mut pars = params(&[
        ("N", n as f64),
        ("degree", f.degree().finite().map_or(-1.0, |d| d as f64)),
        ("center_re", center.re),
        ("center_im", center.im),
        ("r0", r0),
        ("r", r),
    ]);
    match variant {
        MaxModulusVariant::Circles(interior) => {
            if interior.len() + 1 != n {
                return Err(Error::Domain(format!("need {} interior radii for order {n}, got {}", n - 1, interior.len())));
            }
            let mut radii = vec![r0];
            radii.extend_from_slice(interior);
            if radii.windows(2).any(|w| !(w[0] < w[1])) || radii.last().is_some_and(|&x| !(x < r)) {
                return Err(Error::Domain("circle radii must satisfy r0 < r_1 < ... < r_{N-1} < r".into()));
            }
            let constant = if n == 1 { 1.0 } else { lm(&interior.iter().map(|x| x / r0).collect::<Vec<_>>())? };
            let lhs = disk_sup(&eval, center, r0, grid);
            let circles = radii.iter().map(|&rad| circle_sup(&eval, center, rad, grid.angular)).fold(0.0, f64::max);
            pars.insert("constant".into(), constant);
            pars.insert("circle_sup".into(), circles);
            Ok(BoundReport::new("maxp0", pars, lhs, constant * circles))
        }
        MaxModulusVariant::Annulus => {
            let constant = jm(n, r0, r)?;
            let lhs = disk_sup(&eval, center, r0, grid);
            let ann = annulus_sup(&eval, center, r0, r, grid);
            pars.insert("constant".into(), constant);
            pars.insert("annulus_sup".into(), ann);
            Ok(BoundReport::new("maxp1", pars, lhs, constant * ann))
        }
        MaxModulusVariant::Component(p) => {
            let comp = component_about(f, *p, center)?;
            let constant = jm(n, r0, r)?;
            let lhs = disk_sup(&|z| comp.eval(z), center, r0, grid);
            let ann = annulus_sup(&eval, center, r0, r, grid);
            pars.insert("p".into(), *p as f64);
            pars.insert("constant".into(), constant);
            pars.insert("annulus_sup".into(), ann);
            Ok(BoundReport::new("maxp2", pars, lhs, constant * ann / r0.powi(*p as i32)))
        }
    }
}

/// Bernstein–Walsh constant `(2^{N+1} - 1) J_N(1/2, 1)`.
pub fn bw_constant(n: usize) -> Result<f64> {
    Ok(((1u64 << (n + 1)) - 1) as f64 * jm(n, 0.5, 1.0)?)
}

/// The smaller constant `(2^N - 1) J_N(1/2, 1)` obtained by summing the geometric series exactly.
pub fn bw_constant_tight(n: usize) -> Result<f64> {
    Ok(((1u64 << n) - 1) as f64 * jm(n, 0.5, 1.0)?)
}

/// `|P(z)| ≤ C ‖P‖_{D̄} |z|^{n+N-1}` for `|z| > 1` and `degree(P) ≤ n`, with `C = bw_constant(N)`.
pub fn check_bw(p: &NAnalyticPoly, n: usize, z: ComplexScalar, grid: SupGrid) -> Result<BoundReport> {
    check_bw_with(p, n, z, grid, bw_constant(p.order())?, "bernstein_walsh")
}

/// Same as [`check_bw`] with the constant `(2^N - 1) J_N(1/2, 1)`.
pub fn check_bw_tight(p: &NAnalyticPoly, n: usize, z: ComplexScalar, grid: SupGrid) -> Result<BoundReport> {
    check_bw_with(p, n, z, grid, bw_constant_tight(p.order())?, "bernstein_walsh_tight")
}

fn check_bw_with(p: &NAnalyticPoly, n: usize, z: ComplexScalar, grid: SupGrid, constant: f64, name: &str) -> Result<BoundReport> {
    if !p.degree().at_most(n) {
        return Err(Error::Domain(format!("degree {} exceeds n = {n}", p.degree())));
    }
    if !(z.norm() > 1.0) {
        return Err(Error::Domain("the evaluation point must lie outside the closed unit disk".into()));
    }
    let norm = disk_sup(&|w| p.eval(w), ComplexScalar::new(0.0, 0.0), 1.0, grid);
    let lhs = p.eval(z).norm();
    let rhs = constant * norm * z.norm().powi((n + p.order() - 1) as i32);
    let pars = params(&[
        ("N", p.order() as f64),
        ("n", n as f64),
        ("z_re", z.re),
        ("z_im", z.im),
        ("constant", constant),
        ("disk_sup", norm),
    ]);
    Ok(BoundReport::new(name, pars, lhs, rhs))
}

/// Splits `values[1..]` (indexed by `n = 1..`) into the last decade and everything before,
/// returning `(max over head, max over last decade)` in log space.
fn head_tail_max(log_values: &[f64]) -> (f64, f64) {
    let n_max = log_values.len();
    let cut = (n_max / 10).max(1);
    let head = log_values[..cut].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tail = log_values[cut..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (head, tail)
}

/// Evaluates `ln g(n) + Bn/4` for `1 ≤ n ≤ n_max`, where
/// `g(n) = e^{-Bn}((n+1)^a - n^a + 1)(1 + (B/2) n^{-1/k})^{n^a}` and `a = (k+1)/k`.
pub fn appendix_81_series(b: f64, k: f64, n_max: usize) -> Vec<f64> {
    let a = (k + 1.0) / k;
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let x = n as f64;
            let count = (x + 1.0).powf(a) - x.powf(a) + 1.0;
            -b * x + count.ln() + x.powf(a) * (0.5 * b * x.powf(-1.0 / k)).ln_1p() + b * x / 4.0
        })
        .collect()
}

/// Boundedness of `g(n) e^{Bn/4}`: the maximum over the last decade of `n` must not exceed the
/// maximum over the first tenth. The fitted constant `D1` is the overall maximum.
pub fn check_appendix_81(b: f64, k: f64, n_max: usize) -> Result<BoundReport> {
    if !(b > 0.0) || !(k > 0.0) || n_max < 10 {
        return Err(Error::Domain("need B > 0, k > 0 and n_max >= 10".into()));
    }
    let series = appendix_81_series(b, k, n_max);
    let d1 = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp();
    let (head, tail) = head_tail_max(&series);
    let pars = params(&[("B", b), ("k", k), ("n_max", n_max as f64), ("D1", d1)]);
    Ok(BoundReport::new("appendix_81", pars, tail.exp(), head.exp()))
}

/// Sampling density for the kernel suprema over `D × (D_{1+2R/3} \ D̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelGrid {
    /// Samples of `|ζ| - 1` in `(0, 2R/3]`.
    pub shell: usize,
    /// Radial levels of `z` in the closed unit disk.
    pub radial: usize,
    /// Angles of `z`.
    pub angular: usize,
}

impl Default for KernelGrid {
    fn default() -> Self {
        KernelGrid { shell: 2000, radial: 8, angular: 64 }
    }
}

impl KernelGrid {
    pub fn refined(self) -> Self {
        KernelGrid { shell: 2 * self.shell, radial: 2 * self.radial, angular: 2 * self.angular }
    }
}

/// `ln sup exp(-B(|ζ|-1)^{-k}) · l! · w(|z-ζ|) / |z-ζ|^{l+1}` over the sampled pairs, where
/// `ln w` is supplied by the caller. By rotation invariance `ζ` is taken on the positive axis.
fn ln_kernel_sup(l: usize, b: f64, k: f64, outer: f64, grid: KernelGrid, ln_weight: impl Fn(f64) -> f64 + Sync) -> f64 {
    let ln_fact = ln_factorial(l);
    (1..=grid.shell)
        .into_par_iter()
        .map(|i| {
            let u = outer * i as f64 / grid.shell as f64;
            let zeta = ComplexScalar::new(1.0 + u, 0.0);
            let damping = -b * u.powf(-k);
            let mut best = f64::NEG_INFINITY;
            for ir in 0..=grid.radial {
                let rad = ir as f64 / grid.radial.max(1) as f64;
                let count = if ir == 0 { 1 } else { grid.angular };
                for j in 0..count {
                    let d = (circle_node(rad, j, grid.angular) - zeta).norm();
                    best = best.max(damping + ln_fact - (l as f64 + 1.0) * d.ln() + ln_weight(d));
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Fitted data from the kernel supremum study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSupStudy {
    /// `ln` of the sampled supremum for `l = 0..=l_max`.
    pub ln_sup: Vec<f64>,
    /// `ln` of the closed-form route `B^{-(l+1)/k} l! sup_t t^{(l+1)/k} e^{-t}`.
    pub ln_closed_form: Vec<f64>,
    /// Per-`l` constant `(sup / l^{(1+1/k) l})^{1/(l+1)}`.
    pub d2_per_l: Vec<f64>,
    /// `max(1, max_l d2_per_l)`.
    pub d2: f64,
}

/// Samples the kernel supremum for `l = 0..=l_max` and fits the envelope constant.
pub fn kernel_sup_study(b: f64, r: f64, k: f64, l_max: usize, grid: KernelGrid) -> Result<KernelSupStudy> {
    if !(b > 0.0) || !(r > 0.0) || !(k > 0.0) {
        return Err(Error::Domain("need B, R, k > 0".into()));
    }
    let outer = 2.0 * r / 3.0;
    let ln_sup: Vec<f64> = (0..=l_max).map(|l| ln_kernel_sup(l, b, k, outer, grid, |_| 0.0)).collect();
    let ln_closed_form: Vec<f64> = (0..=l_max)
        .map(|l| {
            let e = (l + 1) as f64;
            -(e / k) * b.ln() + ln_factorial(l) + ln_sup_power_decay(e, k, (-2.0f64).exp())
        })
        .collect();
    let d2_per_l: Vec<f64> = ln_sup
        .iter()
        .enumerate()
        .map(|(l, &s)| {
            let growth = if l == 0 { 0.0 } else { (1.0 + 1.0 / k) * l as f64 * (l as f64).ln() };
            ((s - growth) / (l as f64 + 1.0)).exp()
        })
        .collect();
    let d2 = d2_per_l.iter().cloned().fold(1.0, f64::max);
    Ok(KernelSupStudy { ln_sup, ln_closed_form, d2_per_l, d2 })
}

/// Kernel supremum against its closed-form route: `lhs = max_l sup_l / closed_l`, `rhs = 1`.
/// The fitted `D2` and the last-`l` envelope ratio are reported as parameters.
pub fn check_appendix_82(b: f64, r: f64, k: f64, l_max: usize, grid: KernelGrid) -> Result<BoundReport> {
    let study = kernel_sup_study(b, r, k, l_max, grid)?;
    let ratio = study
        .ln_sup
        .iter()
        .zip(&study.ln_closed_form)
        .map(|(s, c)| s - c)
        .fold(f64::NEG_INFINITY, f64::max)
        .exp();
    let pars = params(&[
        ("B", b),
        ("R", r),
        ("k", k),
        ("l_max", l_max as f64),
        ("D2", study.d2),
        ("shell_samples", grid.shell as f64),
    ]);
    Ok(BoundReport::new("appendix_82", pars, ratio, 1.0))
}

/// Blocks with more terms than this are summed through the closed-form upper bound.
const EXACT_TERMS: u64 = 1 << 12;

/// `ln h(n) + Bn/4` for `1 ≤ n ≤ n_max`, where `h(n)` sums over `n^a ≤ j < (n+1)^a`.
pub fn appendix_83_series(b: f64, k: f64, order: usize, n_max: usize) -> Vec<f64> {
    let a = (k + 1.0) / k;
    let inv = 1.0 / a;
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let x = n as f64;
            let lo = snap_ceil(x.powf(a)) as u64;
            let hi = snap_ceil((x + 1.0).powf(a)) as u64;
            let ln_q = ((b / 3.0) * x.powf(-1.0 / k)).ln_1p();
            // Terms are (1 + e^{B d_j}) q^{j+N}; factor out q^{lo+N} to keep the sum in range.
            let first = lo.max(1);
            let sum = if hi.saturating_sub(first) <= EXACT_TERMS {
                let mut sum = 0.0;
                for j in first..hi {
                    let jf = j as f64;
                    let d = jf.powf(inv) - (jf - 1.0).powf(inv);
                    sum += (1.0 + (b * d).exp()) * ((j - lo) as f64 * ln_q).exp();
                }
                sum
            } else {
                // d_j decreases in j, so its first value bounds the prefactor from above and
                // the remaining geometric sum has a closed form.
                let f = first as f64;
                let d = f.powf(inv) - (f - 1.0).powf(inv);
                let m = (hi - first) as f64;
                let offset = (first - lo) as f64 * ln_q;
                (1.0 + (b * d).exp()) * (offset.exp() * (m * ln_q).exp_m1() / ln_q.exp_m1())
            };
            -b * x + (lo as f64 + order as f64) * ln_q + sum.ln() + b * x / 4.0
        })
        .collect()
}

/// Boundedness of `h(n) e^{Bn/4}` (last decade against first tenth). The final ratio
/// `h(n_max)/h(n_max - 1)` is reported as `tail_ratio`, to compare with `e^{-B/4}`.
pub fn check_appendix_83(b: f64, k: f64, order: usize, n_max: usize) -> Result<BoundReport> {
    if !(b > 0.0) || !(k > 0.0) || order == 0 || n_max < 10 {
        return Err(Error::Domain("need B > 0, k > 0, N >= 1 and n_max >= 10".into()));
    }
    let series = appendix_83_series(b, k, order, n_max);
    let (head, tail) = head_tail_max(&series);
    let last = series.len() - 1;
    let tail_ratio = (series[last] - series[last - 1] - b / 4.0).exp();
    let pars = params(&[
        ("B", b),
        ("k", k),
        ("N", order as f64),
        ("n_max", n_max as f64),
        ("max_scaled", series.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp()),
        ("tail_ratio", tail_ratio),
        ("ratio_threshold", (-b / 4.0).exp()),
    ]);
    Ok(BoundReport::new("appendix_83", pars, tail.exp(), head.exp()))
}

/// The sampled supremum of the derivative kernel bound and its envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiBound {
    pub l: usize,
    /// Sampled `sup max(|z-ζ|,1)^{N-1} exp(-B(|ζ|-1)^{-k}) l! / (π |z-ζ|^{l+1})`.
    pub sup: f64,
    /// `π^{-1} (2(1+2R0/3))^{N-1} D2^{l+1} l^{(1+1/k) l}`.
    pub envelope: f64,
    pub holds: bool,
}

/// Kernel supremum for the `l`-th derivative of the order-`N` Pompeiu kernel, checked
/// against the envelope with the given `D2` (typically from [`kernel_sup_study`]).
pub fn psi_kernel_bound(l: usize, b: f64, k: f64, r0: f64, order: usize, d2: f64, grid: KernelGrid) -> Result<PsiBound> {
    if !(b > 0.0) || !(k > 0.0) || !(r0 > 0.0) || order == 0 {
        return Err(Error::Domain("need B, k, R0 > 0 and N >= 1".into()));
    }
    let outer = 2.0 * r0 / 3.0;
    let power = (order - 1) as f64;
    let ln_sup = ln_kernel_sup(l, b, k, outer, grid, |d| power * d.max(1.0).ln()) - PI.ln();
    let growth = if l == 0 { 0.0 } else { (1.0 + 1.0 / k) * l as f64 * (l as f64).ln() };
    let ln_env = -PI.ln() + power * (2.0 * (1.0 + outer)).ln() + (l as f64 + 1.0) * d2.ln() + growth;
    Ok(PsiBound { l, sup: ln_sup.exp(), envelope: ln_env.exp(), holds: ln_sup <= ln_env + 1e-12 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lm_rejects_bad_nodes() {
        assert!(lm(&[]).is_err());
        assert!(lm(&[1.0]).is_err());
        assert!(lm(&[2.0, 2.0]).is_err());
        assert!(lm(&[3.0, 2.0]).is_err());
    }

    #[test]
    fn report_margin_and_slack() {
        let r = BoundReport::new("x", BTreeMap::new(), 1.0 + 1e-13, 1.0);
        assert!(r.holds);
        let r = BoundReport::new("x", BTreeMap::new(), 1.0 + 1e-9, 1.0);
        assert!(!r.holds);
        assert!(r.margin < 0.0);
    }

    #[test]
    fn component_about_origin_is_plain_component() {
        let f = crate::poly::random_poly(3, 4, 7).unwrap();
        for p in 0..3 {
            assert_eq!(component_about(&f, p, ComplexScalar::new(0.0, 0.0)).unwrap(), f.components()[p]);
        }
    }
}
