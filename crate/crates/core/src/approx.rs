//! Degree of best uniform N-polynomial approximation on the closed unit disk.
//!
//! `E_{N,n}(f) = inf { ‖f - P‖_{∞,D̄} : P ∈ Π_{N,n} }`, where `Π_{N,n}` holds the
//! N-analytic polynomials whose holomorphic components have degree at most `n`.
//! Two estimators are provided: truncating a certified block expansion
//! ([`constructive_approximant`]) and a discrete minimax solve by Lawson's iteratively
//! reweighted least squares ([`minimax_estimate`]). [`fit_theta`] fits the decay law
//! `α exp(-β n^{k/(k+1)})` to a record sequence and [`converse_blocks`] runs the converse
//! construction from a sequence of approximants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::bw_constant;
use crate::decompose::{fft_radix2, polys_on_circle};
use crate::error::{Error, Result};
use crate::expansion::{certify_norms, converse_verify_with, poly_disk_sup, BlockExpansion, ConverseReport, NormGrid};
use crate::gevrey::{stretched_fit, FitOptions};
use crate::numeric::{least_squares, snap_ceil, upper_hull};
use crate::poly::{ComplexScalar, HoloPoly, NAnalyticPoly};

type C = ComplexScalar;

/// How a record was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Constructive,
    Minimax,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Constructive => "constructive",
            Method::Minimax => "minimax",
        }
    }
}

/// Solver status attached to a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ApproxFlag {
    Ok,
    /// The minimax iteration hit its cap; the record holds the best iterate.
    Nonconverged,
}

impl ApproxFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            ApproxFlag::Ok => "OK",
            ApproxFlag::Nonconverged => "NONCONVERGED",
        }
    }
}

/// One estimate of `E_{N,n}(f)` with the approximant that realizes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxRecord {
    pub n: usize,
    pub method: Method,
    /// Sampled sup of `|f - P|` over the grid.
    pub e_value: f64,
    /// `C δ^{n^{k/(k+1)}}/(1-δ)` for constructive records.
    pub bound: Option<f64>,
    /// Lower bound on the discrete optimum (minimax records).
    pub lower_bound: Option<f64>,
    pub iterations: usize,
    pub flag: ApproxFlag,
    /// States what the value is an estimate of.
    pub caveat: String,
    pub approximant: NAnalyticPoly,
}

/// Sampling grid on the closed unit disk: concentric rings times equispaced angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxGrid {
    pub radii: usize,
    /// Angles per ring; a power of two.
    pub angles: usize,
}

impl Default for ApproxGrid {
    fn default() -> Self {
        ApproxGrid { radii: 24, angles: 256 }
    }
}

impl ApproxGrid {
    /// Ring radii in increasing order. Half of them lie in `[0.9, 1]`, including `1`.
    pub fn ring_radii(&self) -> Vec<f64> {
        let outer = (self.radii / 2).max(1);
        let inner = self.radii - outer;
        let mut radii: Vec<f64> = (1..=inner).map(|i| 0.9 * i as f64 / (inner + 1) as f64).collect();
        if outer == 1 {
            radii.push(1.0);
        } else {
            radii.extend((0..outer).map(|i| 0.9 + 0.1 * i as f64 / (outer - 1) as f64));
        }
        radii
    }

    fn validate(&self) -> Result<()> {
        if self.radii == 0 || !self.angles.is_power_of_two() || self.angles < 4 {
            return Err(Error::InvalidInput(format!(
                "approximation grid needs at least one ring and a power-of-two angle count, got {}x{}",
                self.radii, self.angles
            )));
        }
        Ok(())
    }

    fn caveat(&self) -> String {
        format!("discrete estimate on a {}x{} disk grid; the continuous value may be larger", self.radii, self.angles)
    }
}

/// Largest `J` with `J^{(k+1)/k} ≤ n`.
pub fn constructive_last_block(n: usize, k: f64) -> usize {
    let e = (k + 1.0) / k;
    let mut j = (n as f64).powf(1.0 / e).floor() as usize;
    while snap_ceil(((j + 1) as f64).powf(e)) <= n as f64 {
        j += 1;
    }
    while j > 0 && snap_ceil((j as f64).powf(e)) > n as f64 {
        j -= 1;
    }
    j
}

/// `Q_n = Σ_{j^{(k+1)/k} ≤ n} P_j` for a certified expansion, its sampled error against the
/// full expansion, and the certified bound `C δ^{n^{k/(k+1)}}/(1-δ)`.
///
/// The error is the sampled sup of the discarded tail, evaluated ring by ring with
/// enough angles to resolve its highest mode (a refinement of `grid`).
pub fn constructive_approximant(exp: &BlockExpansion, n: usize, grid: ApproxGrid) -> Result<ApproxRecord> {
    let cert = exp.certificate()?;
    grid.validate()?;
    let k = exp.k;
    let last = constructive_last_block(n, k);
    let mut approximant = NAnalyticPoly::zero(exp.order);
    for block in exp.blocks.iter().take(last + 1) {
        approximant = &approximant + block;
    }
    let tail: Vec<&NAnalyticPoly> = exp.blocks.iter().skip(last + 1).filter(|b| !b.is_zero()).collect();
    let e_value = if tail.is_empty() {
        0.0
    } else {
        let span = exp.q_max() + exp.order + 1;
        let angles = grid.angles.max(span.next_power_of_two());
        grid.ring_radii()
            .par_iter()
            .map(|&r| {
                polys_on_circle(tail.iter().map(|&b| (C::new(1.0, 0.0), b)), r, angles)
                    .into_iter()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    };
    let bound = cert.c * cert.delta.powf((n as f64).powf(k / (k + 1.0))) / (1.0 - cert.delta);
    Ok(ApproxRecord {
        n,
        method: Method::Constructive,
        e_value,
        bound: Some(bound),
        lower_bound: None,
        iterations: 0,
        flag: ApproxFlag::Ok,
        caveat: grid.caveat(),
        approximant,
    })
}

/// Stopping rules of the Lawson iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawsonOptions {
    pub max_iterations: usize,
    /// Stop when `(upper - lower) ≤ rel_gap · upper`.
    pub rel_gap: f64,
    /// Stop when the sup error falls below this value.
    pub abs_floor: f64,
}

impl Default for LawsonOptions {
    fn default() -> Self {
        LawsonOptions { max_iterations: 200, rel_gap: 1e-2, abs_floor: 1e-12 }
    }
}

/// [`minimax_estimate_with`] under the default stopping rules.
pub fn minimax_estimate(
    f: impl Fn(C) -> C + Sync,
    order: usize,
    n: usize,
    grid: ApproxGrid,
) -> Result<ApproxRecord> {
    minimax_estimate_with(f, order, n, grid, &LawsonOptions::default())
}

/// Discrete `min_{P ∈ Π_{N,n}} max_grid |f - P|` by Lawson's iteration.
///
/// Each step solves the weighted normal equations for the monomials `z^q z̄^p`
/// (`q ≤ n`, `p < N`), multiplies the weights by the pointwise error and renormalizes.
/// Since the weights sum to one, the weighted root-mean-square error of each weighted
/// least-squares solution bounds the discrete optimum from below; the best sup error
/// found bounds it from above.
pub fn minimax_estimate_with(
    f: impl Fn(C) -> C + Sync,
    order: usize,
    n: usize,
    grid: ApproxGrid,
    opts: &LawsonOptions,
) -> Result<ApproxRecord> {
    if order == 0 {
        return Err(Error::InvalidInput("order N must be at least 1".into()));
    }
    grid.validate()?;
    let m = grid.angles;
    if n + order > m {
        return Err(Error::InvalidInput(format!("{m} angles cannot resolve degree {n} at order {order}")));
    }
    let radii = grid.ring_radii();
    let values: Vec<Vec<C>> = radii
        .par_iter()
        .map(|&r| (0..m).map(|b| f(ring_node(r, b, m))).collect())
        .collect();
    if values.iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Evaluation("f is not finite on the approximation grid".into()));
    }

    let basis: Vec<(usize, usize)> = (0..order).flat_map(|p| (0..=n).map(move |q| (p, q))).collect();
    let max_exp = 2 * (n + order);
    let powers: Vec<Vec<f64>> = radii.iter().map(|&r| (0..=max_exp).map(|e| r.powi(e as i32)).collect()).collect();

    let count = (radii.len() * m) as f64;
    let mut weights = vec![vec![1.0 / count; m]; radii.len()];
    let mut best: Option<(f64, NAnalyticPoly)> = None;
    let mut lower = 0.0f64;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        let (gram, rhs) = normal_equations(&basis, &powers, &weights, &values, m);
        let coeffs = solve_hermitian(gram, rhs, basis.len())
            .ok_or_else(|| Error::SingularSystem("weighted normal equations are not positive definite".into()))?;
        let poly = poly_from_basis(&basis, &coeffs, order);

        let errors: Vec<Vec<f64>> = radii
            .par_iter()
            .zip(values.par_iter())
            .map(|(&r, fv)| {
                polys_on_circle([(C::new(1.0, 0.0), &poly)], r, m).into_iter().zip(fv).map(|(p, v)| (v - p).norm()).collect()
            })
            .collect();
        let upper = errors.iter().flatten().cloned().fold(0.0, f64::max);
        let weighted: f64 = weights.iter().flatten().zip(errors.iter().flatten()).map(|(w, e)| w * e * e).sum();
        lower = lower.max(weighted.sqrt());
        if best.as_ref().map_or(true, |(u, _)| upper < *u) {
            best = Some((upper, poly));
        }
        let best_upper = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        if best_upper <= opts.abs_floor || best_upper - lower <= opts.rel_gap * best_upper {
            converged = true;
            break;
        }

        let total: f64 = weights.iter().flatten().zip(errors.iter().flatten()).map(|(w, e)| w * e).sum();
        if !(total > 0.0) {
            converged = true;
            break;
        }
        for (wr, er) in weights.iter_mut().zip(&errors) {
            for (w, e) in wr.iter_mut().zip(er) {
                *w *= e / total;
            }
        }
    }

    let (e_value, approximant) = best.expect("at least one iteration runs");
    Ok(ApproxRecord {
        n,
        method: Method::Minimax,
        e_value,
        bound: None,
        lower_bound: Some(lower.min(e_value)),
        iterations,
        flag: if converged { ApproxFlag::Ok } else { ApproxFlag::Nonconverged },
        caveat: grid.caveat(),
        approximant,
    })
}

/// Minimax records for every `n` in `ns`, computed in parallel.
pub fn minimax_sweep(
    f: impl Fn(C) -> C + Sync,
    order: usize,
    ns: &[usize],
    grid: ApproxGrid,
    opts: &LawsonOptions,
) -> Result<Vec<ApproxRecord>> {
    ns.par_iter().map(|&n| minimax_estimate_with(&f, order, n, grid, opts)).collect()
}

fn ring_node(r: f64, b: usize, m: usize) -> C {
    C::from_polar(r, 2.0 * std::f64::consts::PI * b as f64 / m as f64)
}

fn mode_index(mode: i64, m: usize) -> usize {
    mode.rem_euclid(m as i64) as usize
}

/// Gram matrix `G_{jl} = Σ W conj(φ_j) φ_l` and right-hand side `Σ W conj(φ_j) F`, where
/// `φ_{(p,q)}(r e^{iθ}) = r^{q+p} e^{i(q-p)θ}`; the angular sums are single FFTs per ring.
fn normal_equations(
    basis: &[(usize, usize)],
    powers: &[Vec<f64>],
    weights: &[Vec<f64>],
    values: &[Vec<C>],
    m: usize,
) -> (Vec<C>, Vec<C>) {
    let scale = m as f64;
    let spectra: Vec<(Vec<C>, Vec<C>)> = weights
        .par_iter()
        .zip(values.par_iter())
        .map(|(w, fv)| {
            let wc: Vec<C> = w.iter().map(|&x| C::new(x, 0.0)).collect();
            let wf: Vec<C> = w.iter().zip(fv).map(|(&x, &v)| v * x).collect();
            let w_hat: Vec<C> = fft_radix2(&wc).into_iter().map(|v| v.conj() * scale).collect();
            let wf_hat: Vec<C> = fft_radix2(&wf).into_iter().map(|v| v * scale).collect();
            (w_hat, wf_hat)
        })
        .collect();

    let d = basis.len();
    let gram: Vec<C> = (0..d)
        .into_par_iter()
        .flat_map_iter(|j| {
            let (pj, qj) = basis[j];
            let (ej, mj) = (qj + pj, qj as i64 - pj as i64);
            let spectra = &spectra;
            (0..d).map(move |l| {
                let (pl, ql) = basis[l];
                let (el, ml) = (ql + pl, ql as i64 - pl as i64);
                let idx = mode_index(ml - mj, m);
                spectra.iter().zip(powers).map(|((w_hat, _), pw)| w_hat[idx] * pw[ej + el]).sum::<C>()
            })
        })
        .collect();
    let rhs: Vec<C> = basis
        .iter()
        .map(|&(p, q)| {
            let idx = mode_index(q as i64 - p as i64, m);
            spectra.iter().zip(powers).map(|((_, wf_hat), pw)| wf_hat[idx] * pw[q + p]).sum()
        })
        .collect();
    (gram, rhs)
}

/// Solves a Hermitian positive definite system by Cholesky after symmetric diagonal
/// scaling, retrying with a small ridge when a pivot breaks down.
fn solve_hermitian(gram: Vec<C>, rhs: Vec<C>, d: usize) -> Option<Vec<C>> {
    let diag: Vec<f64> = (0..d).map(|i| gram[i * d + i].re).collect();
    if diag.iter().any(|&x| !(x > 0.0)) {
        return None;
    }
    let s: Vec<f64> = diag.iter().map(|x| 1.0 / x.sqrt()).collect();
    let scaled: Vec<C> = (0..d * d).map(|idx| gram[idx] * (s[idx / d] * s[idx % d])).collect();
    let b: Vec<C> = rhs.iter().zip(&s).map(|(v, si)| v * si).collect();
    for ridge in [0.0, 1e-14, 1e-12, 1e-10, 1e-8] {
        let mut a = scaled.clone();
        (0..d).for_each(|i| a[i * d + i] += ridge);
        if let Some(y) = cholesky_solve(a, &b, d) {
            return Some(y.iter().zip(&s).map(|(v, si)| v * si).collect());
        }
    }
    None
}

fn cholesky_solve(mut a: Vec<C>, b: &[C], d: usize) -> Option<Vec<C>> {
    for j in 0..d {
        let mut pivot = a[j * d + j].re;
        for t in 0..j {
            pivot -= a[j * d + t].norm_sqr();
        }
        if !(pivot > 1e-15) {
            return None;
        }
        let pivot = pivot.sqrt();
        a[j * d + j] = C::new(pivot, 0.0);
        for i in j + 1..d {
            let mut v = a[i * d + j];
            for t in 0..j {
                v -= a[i * d + t] * a[j * d + t].conj();
            }
            a[i * d + j] = v / pivot;
        }
    }
    let mut y = b.to_vec();
    for i in 0..d {
        for t in 0..i {
            let v = a[i * d + t] * y[t];
            y[i] -= v;
        }
        y[i] /= a[i * d + i];
    }
    for i in (0..d).rev() {
        for t in i + 1..d {
            let v = a[t * d + i].conj() * y[t];
            y[i] -= v;
        }
        y[i] /= a[i * d + i];
    }
    Some(y)
}

fn poly_from_basis(basis: &[(usize, usize)], coeffs: &[C], order: usize) -> NAnalyticPoly {
    let n = basis.iter().map(|b| b.1).max().unwrap_or(0);
    let mut rows = vec![vec![C::new(0.0, 0.0); n + 1]; order];
    for (&(p, q), &c) in basis.iter().zip(coeffs) {
        rows[p][q] = c;
    }
    NAnalyticPoly::new(rows.into_iter().map(HoloPoly::new).collect()).expect("order >= 1")
}

/// Fitted decay law `E_n ≈ α exp(-β n^{k/(k+1)})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaFit {
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Largest `ln E_n - (ln α - β n^{k/(k+1)})` over the fitted records.
    pub residual: f64,
    pub beta_head: f64,
    pub beta_tail: f64,
    /// Record indices `n` that entered the regression.
    pub fitted: Vec<usize>,
    pub accepted: bool,
}

/// Minimum number of usable records for [`fit_theta`].
pub const MIN_THETA_RECORDS: usize = 12;

/// Records at or below this fraction of the largest value are treated as exact.
pub const THETA_FLOOR: f64 = 1e-12;

/// [`fit_theta_with`] with the default acceptance rule (no records skipped).
pub fn fit_theta(records: &[ApproxRecord], k: f64) -> Result<ThetaFit> {
    fit_theta_with(records, k, &FitOptions { skip: 0, ..FitOptions::default() })
}

/// Regresses `ln E_n` on `-n^{k/(k+1)}` over records with `n ≥ opts.skip` and a value
/// above the noise floor; acceptance follows the coefficient-decay rule.
pub fn fit_theta_with(records: &[ApproxRecord], k: f64, opts: &FitOptions) -> Result<ThetaFit> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k must be positive, got {k}")));
    }
    let scale = records.iter().map(|r| r.e_value).fold(0.0, f64::max);
    let mut usable: Vec<&ApproxRecord> = records
        .iter()
        .filter(|r| r.n >= opts.skip && r.e_value > THETA_FLOOR * scale && r.e_value.is_finite())
        .collect();
    usable.sort_by_key(|r| r.n);
    if usable.len() < MIN_THETA_RECORDS {
        return Err(Error::InsufficientData(format!(
            "{} records with a positive error; need {MIN_THETA_RECORDS}",
            usable.len()
        )));
    }
    let e = k / (k + 1.0);
    let xs: Vec<f64> = usable.iter().map(|r| -(r.n as f64).powf(e)).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.e_value.ln()).collect();
    let fit = stretched_fit(&xs, &ys, opts)?;
    Ok(ThetaFit {
        k,
        alpha: fit.line.intercept.exp(),
        beta: fit.line.slope,
        residual: fit.residual,
        beta_head: fit.beta_head,
        beta_tail: fit.beta_tail,
        fitted: usable.iter().map(|r| r.n).collect(),
        accepted: fit.accepted,
    })
}

/// Options of [`converse_blocks`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverseBlocksOptions {
    /// Relative slack on the target ratio `e^{-β/4}`.
    pub tolerance: f64,
    pub grid: NormGrid,
}

impl Default for ConverseBlocksOptions {
    fn default() -> Self {
        ConverseBlocksOptions { tolerance: 0.05, grid: NormGrid::default() }
    }
}

/// Norms of one `Y_n` on its dilated disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YBlockNorm {
    pub n: usize,
    /// `W` indices `j` summed into `Y_n`.
    pub j_range: (usize, usize),
    pub radius: f64,
    /// Sampled sup of `|Y_n|` on the disk of that radius.
    pub direct: f64,
    /// `Σ_j bw ‖W_j - W_{j-1}‖_{D̄} ρ^{j+N-1}`.
    pub extrapolated: f64,
}

/// Outcome of [`converse_blocks`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseBlocksReport {
    pub k: f64,
    pub beta: f64,
    pub norms: Vec<YBlockNorm>,
    /// Every direct norm is within its extrapolated bound.
    pub extrapolation_holds: bool,
    /// `exp` of the fitted slope of `ln ‖Y_n‖` (upper hull over `n ≥ 1`); `None` when fewer
    /// than two nonzero blocks exist.
    pub ratio: Option<f64>,
    /// `e^{-β/4}`.
    pub target_ratio: f64,
    /// Blocks `[W_0, Y_1, Y_2, ...]` with the norm certificate on `D_{k,β/3,n}`.
    pub expansion: BlockExpansion,
    pub converse: ConverseReport,
    pub accepted: bool,
}

/// First `j` with `j ≥ n^{(k+1)/k}`.
fn y_start(n: usize, k: f64) -> usize {
    snap_ceil((n as f64).powf((k + 1.0) / k)) as usize
}

/// Converse construction from approximants `W_0, W_1, ...` (with `degree(W_j) ≤ j`) and
/// their sup errors `errors[j] ≥ ‖f - W_j‖`.
///
/// Forms `Y_n = Σ_{n^{(k+1)/k} ≤ j < (n+1)^{(k+1)/k}} (W_j - W_{j-1}) = W_{e-1} - W_{s-1}` for
/// every `n ≥ 1` whose range is covered by the sequence, so that `W_0 + Σ Y_n` telescopes to
/// the last covered `W`. Each `Y_n` is measured on `D_{k,β/3,n}` directly and through the
/// Bernstein–Walsh extrapolation of the on-disk norms of its differences; the direct norms
/// must decay geometrically with ratio at most `e^{-β/4}(1 + tolerance)`. The blocks
/// `[W_0, Y_1, ...]` are then certified at `R = min(β/3, 0.9)` and passed to
/// [`converse_verify_with`], which knows the limit only up to the error of the last
/// approximant used.
pub fn converse_blocks(
    w: &[NAnalyticPoly],
    errors: &[f64],
    k: f64,
    beta: f64,
    opts: &ConverseBlocksOptions,
) -> Result<ConverseBlocksReport> {
    if !(k > 0.0 && beta > 0.0) {
        return Err(Error::Domain(format!("need k > 0 and beta > 0, got k = {k}, beta = {beta}")));
    }
    let first = w.first().ok_or_else(|| Error::InsufficientData("empty approximant sequence".into()))?;
    if errors.len() != w.len() || errors.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::InvalidInput("one nonnegative error per approximant is required".into()));
    }
    let order = w.iter().map(NAnalyticPoly::order).max().unwrap_or(1);
    for (j, wj) in w.iter().enumerate() {
        if !wj.degree().at_most(j) {
            return Err(Error::InvalidInput(format!("W_{j} has degree {} > {j}", wj.degree())));
        }
    }
    let w: Vec<NAnalyticPoly> = w.iter().map(|p| p.with_order(order)).collect::<Result<_>>()?;
    let bw = bw_constant(order)?;
    let radius_scale = beta / 3.0;

    let diff_norms: Vec<f64> = (0..w.len())
        .into_par_iter()
        .map(|j| if j == 0 { 0.0 } else { poly_disk_sup(&(&w[j] - &w[j - 1]), 1.0, opts.grid) })
        .collect();

    let mut ranges = Vec::new();
    let mut n = 1;
    while y_start(n + 1, k) <= w.len() {
        ranges.push((n, y_start(n, k), y_start(n + 1, k)));
        n += 1;
    }
    let norms: Vec<(YBlockNorm, NAnalyticPoly)> = ranges
        .par_iter()
        .map(|&(n, s, e)| {
            let y = &w[e - 1] - &w[s - 1];
            let rho = 1.0 + radius_scale * (n as f64).powf(-1.0 / k);
            let direct = poly_disk_sup(&y, rho, opts.grid);
            let extrapolated = (s..e).map(|j| bw * diff_norms[j] * rho.powi((j + order - 1) as i32)).sum();
            (YBlockNorm { n, j_range: (s, e), radius: rho, direct, extrapolated }, y)
        })
        .collect();
    let extrapolation_holds = norms.iter().all(|(b, _)| b.direct <= b.extrapolated * (1.0 + 1e-9) + 1e-300);

    let target_ratio = (-beta / 4.0).exp();
    let nonzero: Vec<&YBlockNorm> = norms.iter().map(|(b, _)| b).filter(|b| b.direct > 1e-300).collect();
    let ratio = if nonzero.len() >= 2 {
        let xs: Vec<f64> = nonzero.iter().map(|b| b.n as f64).collect();
        let ys: Vec<f64> = nonzero.iter().map(|b| b.direct.ln()).collect();
        let hull = upper_hull(&xs, &ys);
        let hx: Vec<f64> = hull.iter().map(|&i| xs[i]).collect();
        let hy: Vec<f64> = hull.iter().map(|&i| ys[i]).collect();
        least_squares(&hx, &hy).or_else(|| least_squares(&xs, &ys)).map(|l| l.slope.exp())
    } else {
        None
    };
    if let Some(r) = ratio {
        if r > target_ratio * (1.0 + opts.tolerance) {
            return Err(Error::NoGeometricDecay { delta: r });
        }
    }

    let mut blocks = vec![first.with_order(order)?];
    blocks.extend(norms.iter().map(|(_, y)| y.clone()));
    let expansion = certify_norms(&BlockExpansion::new(k, order, blocks)?, radius_scale.min(0.9), opts.grid)?;
    let last_used = ranges.last().map_or(0, |r| r.2 - 1);
    let converse = converse_verify_with(&expansion, k, opts.grid, errors[last_used])?;
    let accepted = extrapolation_holds && converse.accepted;
    Ok(ConverseBlocksReport {
        k,
        beta,
        norms: norms.into_iter().map(|(b, _)| b).collect(),
        extrapolation_holds,
        ratio,
        target_ratio,
        expansion,
        converse,
        accepted,
    })
}
