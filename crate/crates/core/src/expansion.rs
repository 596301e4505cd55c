//! Coefficient-block expansions `f = Σ_n P_n` with `d°(P_n) ≤ n^{(k+1)/k}` and
//! geometric norm certificates `‖P_n‖ ≤ C δ^n` on the dilated disks `D_{k,R,n}`,
//! in both directions: building and certifying blocks from a coefficient table,
//! and recovering class membership of the limit from certified blocks.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{circle_sup, jm, ln_sup_power_decay};
use crate::decompose::{clustered_radii, decompose_function, recommended_samples, CoefficientTable};
use crate::error::{Error, Result};
use crate::gevrey::{fit_decay, membership_report_with, FitOptions, MembershipReport};
use crate::numeric::{least_squares, snap_ceil, upper_hull, Line};
use crate::poly::{ComplexScalar, HoloPoly, NAnalyticPoly};

/// First power of block `n`: `⌈(n/2)^{(k+1)/k}⌉`, i.e. `⌈2^{-(k+1)/k} n^{(k+1)/k}⌉`.
pub fn block_start(n: usize, k: f64) -> usize {
    if n == 0 {
        return 0;
    }
    snap_ceil((n as f64 / 2.0).powf((k + 1.0) / k)) as usize
}

/// Powers `p` with `c n^{(k+1)/k} ≤ p < c (n+1)^{(k+1)/k}`, `c = 2^{-(k+1)/k}`.
/// Consecutive ranges tile the nonnegative integers; some are empty.
pub fn block_range(n: usize, k: f64) -> Range<usize> {
    block_start(n, k)..block_start(n + 1, k)
}

/// Radius `1 + R max(n,1)^{-1/k}` of the dilated disk attached to block `n`.
pub fn block_radius(n: usize, k: f64, r: f64) -> f64 {
    1.0 + r * (n.max(1) as f64).powf(-1.0 / k)
}

/// Fitted geometric envelope `m_n ≤ C δ^n` of the measured block norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub r: f64,
    pub c: f64,
    pub delta: f64,
    /// Measured sup norm of every block on its dilated disk.
    pub norms: Vec<f64>,
    /// One-sided log residual of the fitted line over the fitted blocks.
    pub residual: f64,
    /// Block indices that entered the regression.
    pub fitted_blocks: Vec<usize>,
    /// Set when `δ = 1/2` was imposed: too few nonzero blocks for a regression, or a short
    /// (finite) expansion whose fit did not decay.
    pub trivial: bool,
}

impl Certificate {
    /// `C δ^n`.
    pub fn envelope(&self, n: usize) -> f64 {
        self.c * self.delta.powi(n as i32)
    }

    /// `C δ^{n+1}/(1 - δ)`, the bound on the tail after block `n`.
    pub fn tail_bound(&self, n: usize) -> f64 {
        self.c * self.delta.powi(n as i32 + 1) / (1.0 - self.delta)
    }
}

/// A sequence of N-analytic polynomial blocks with an optional norm certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockExpansion {
    pub k: f64,
    pub order: usize,
    pub blocks: Vec<NAnalyticPoly>,
    pub cert: Option<Certificate>,
}

impl BlockExpansion {
    pub fn new(k: f64, order: usize, blocks: Vec<NAnalyticPoly>) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("k must be positive, got {k}")));
        }
        if order == 0 || blocks.iter().any(|b| b.order() > order) {
            return Err(Error::InvalidInput("block orders must not exceed the expansion order".into()));
        }
        let blocks = blocks.into_iter().map(|b| b.with_order(order)).collect::<Result<Vec<_>>>()?;
        Ok(BlockExpansion { k, order, blocks, cert: None })
    }

    pub fn certificate(&self) -> Result<&Certificate> {
        self.cert.as_ref().ok_or(Error::Uncertified)
    }

    /// `Σ_{n ≤ last} P_n(z)`.
    pub fn partial_sum(&self, z: ComplexScalar, last: usize) -> ComplexScalar {
        self.blocks.iter().take(last + 1).map(|b| b.eval(z)).sum()
    }

    /// Sum of all stored blocks.
    pub fn eval(&self, z: ComplexScalar) -> ComplexScalar {
        self.blocks.iter().map(|b| b.eval(z)).sum()
    }

    /// Largest power carried by any block.
    pub fn q_max(&self) -> usize {
        self.blocks.iter().filter_map(|b| b.degree().finite()).max().unwrap_or(0)
    }

    /// Adds all blocks back into one coefficient table.
    pub fn reassemble(&self) -> CoefficientTable {
        let mut table = CoefficientTable::zeros(self.order, self.q_max()).expect("order >= 1");
        for block in &self.blocks {
            for (p, comp) in block.components().iter().enumerate() {
                for (q, &c) in comp.coeffs().iter().enumerate() {
                    let cur = table.get(p, q);
                    table.set(p, q, cur + c).expect("index within reassembled table");
                }
            }
        }
        table
    }
}

/// Splits a coefficient table into blocks by [`block_range`] (identically in every component).
pub fn build_blocks(table: &CoefficientTable, k: f64) -> Result<BlockExpansion> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k must be positive, got {k}")));
    }
    let q_max = table.q_max();
    let mut blocks = Vec::new();
    let mut n = 0;
    while block_start(n, k) <= q_max {
        let range = block_range(n, k);
        let components = (0..table.order())
            .map(|p| {
                let mut coeffs = vec![ComplexScalar::new(0.0, 0.0); range.end.min(q_max + 1)];
                for q in range.start..range.end.min(q_max + 1) {
                    coeffs[q] = table.get(p, q);
                }
                HoloPoly::new(coeffs)
            })
            .collect();
        blocks.push(NAnalyticPoly::new(components)?);
        n += 1;
    }
    let mut exp = BlockExpansion::new(k, table.order(), blocks)?;
    exp.cert = None;
    Ok(exp)
}

/// Sampling density for block norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormGrid {
    pub angular: usize,
    /// Interior circles sampled in addition to the boundary.
    pub interior: usize,
}

impl Default for NormGrid {
    fn default() -> Self {
        NormGrid { angular: 512, interior: 8 }
    }
}

/// Sampled sup of `|P|` on the closed disk of the given radius: the boundary circle plus
/// `interior` equally spaced inner circles and the center.
pub fn poly_disk_sup(poly: &NAnalyticPoly, radius: f64, grid: NormGrid) -> f64 {
    if poly.is_zero() {
        return 0.0;
    }
    let f = |z: ComplexScalar| poly.eval(z);
    let levels = grid.interior + 1;
    (1..=levels)
        .map(|i| circle_sup(&f, ComplexScalar::new(0.0, 0.0), radius * i as f64 / levels as f64, grid.angular))
        .fold(poly.eval(ComplexScalar::new(0.0, 0.0)).norm(), f64::max)
}

/// Default certification radius `R = min(β/4, 1/2)`, with `β` the smallest decay rate fitted
/// over the components (`1/4` when no component can be fitted).
pub fn default_radius(table: &CoefficientTable, k: f64) -> f64 {
    let beta = (0..table.order())
        .filter_map(|p| fit_decay(&table.moduli(p), k).ok())
        .map(|m| m.beta)
        .fold(f64::INFINITY, f64::min);
    if beta.is_finite() {
        (beta / 4.0).min(0.5)
    } else {
        0.25
    }
}

/// Blocks excluded from the start of the regression (the constant-dominated regime).
pub const CERT_SKIP: usize = 8;
/// Norms at or below this value are treated as zero blocks.
pub const NORM_FLOOR: f64 = 1e-300;

/// Smallest half of the fitted blocks on which the decay rate is compared.
const MIN_HALF: usize = 3;
/// The decay rate over the later half of the blocks must keep this share of the earlier rate.
const MIN_RATE_RATIO: f64 = 0.8;

/// Measures every block on its dilated disk and fits `m_n ≤ C δ^n`.
///
/// The regression runs over the upper concave hull of `(n, ln m_n)` after the first
/// [`CERT_SKIP`] blocks, excluding a last block cut short by the table truncation. The
/// reported `C` is raised by the largest excess over all blocks, so the envelope covers
/// every measured norm. With fewer than `2 CERT_SKIP` nonzero blocks the expansion is treated
/// as finite: when the fit does not decay, `δ = 1/2` is imposed and `C` alone covers the norms.
pub fn certify_norms(exp: &BlockExpansion, r: f64, grid: NormGrid) -> Result<BlockExpansion> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("certification radius must be positive, got {r}")));
    }
    let k = exp.k;
    let norms: Vec<f64> = exp
        .blocks
        .par_iter()
        .enumerate()
        .map(|(n, b)| poly_disk_sup(b, block_radius(n, k, r), grid))
        .collect();

    let q_max = exp.q_max();
    let complete = |n: usize| block_range(n, k).end <= q_max + 1 || n + 1 < exp.blocks.len();
    let nonzero: Vec<usize> = (0..norms.len()).filter(|&n| norms[n] > NORM_FLOOR).collect();
    let candidates: Vec<usize> = if nonzero.len() >= 2 * CERT_SKIP {
        nonzero.iter().cloned().filter(|&n| n >= CERT_SKIP && complete(n)).collect()
    } else {
        nonzero.iter().cloned().filter(|&n| complete(n)).collect()
    };

    let short = nonzero.len() < 2 * CERT_SKIP;
    let fit = if candidates.len() >= 3 { Some(fit_block_norms(&candidates, &norms)) } else { None };
    let (line, trivial) = match fit {
        None => (None, true),
        Some(Ok(fit)) if fit.0.slope < 0.0 || !short => (Some(fit), false),
        Some(_) if short => (None, true),
        Some(Ok(fit)) => (Some(fit), false),
        Some(Err(err)) => return Err(err),
    };
    let fitted = candidates;

    let (delta, intercept, residual) = match line {
        Some((line, residual)) => (line.slope.exp(), line.intercept, residual),
        None => (0.5, 0.0, 0.0),
    };
    if !(delta < 1.0) {
        return Err(Error::NoGeometricDecay { delta });
    }
    let ln_delta = delta.ln();
    let cover = norms
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > NORM_FLOOR)
        .map(|(n, &m)| m.ln() - (intercept + ln_delta * n as f64))
        .fold(f64::NEG_INFINITY, f64::max);
    let c = if cover.is_finite() { (intercept + cover.max(0.0)).exp() } else { intercept.exp() };
    let mut out = exp.clone();
    out.cert = Some(Certificate { r, c, delta, norms, residual, fitted_blocks: fitted, trivial });
    Ok(out)
}

/// Regression of `ln m_n` on `n` over the upper hull of the candidates, with the
/// rate-consistency check between the two halves.
fn fit_block_norms(candidates: &[usize], norms: &[f64]) -> Result<(Line, f64)> {
    let xs: Vec<f64> = candidates.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = candidates.iter().map(|&n| norms[n].ln()).collect();
    let hull = upper_hull(&xs, &ys);
    let hx: Vec<f64> = hull.iter().map(|&i| xs[i]).collect();
    let hy: Vec<f64> = hull.iter().map(|&i| ys[i]).collect();
    let line = least_squares(&hx, &hy)
        .or_else(|| least_squares(&xs, &ys))
        .ok_or_else(|| Error::InsufficientData("degenerate block norms".into()))?;
    let residual = line.max_excess(&xs, &ys);
    if xs.len() >= 2 * MIN_HALF {
        let mid = xs.len() / 2;
        if let (Some(head), Some(tail)) = (least_squares(&xs[..mid], &ys[..mid]), least_squares(&xs[mid..], &ys[mid..])) {
            let (rate_head, rate_tail) = (-head.slope, -tail.slope);
            if rate_head > 0.0 && rate_tail < MIN_RATE_RATIO * rate_head {
                return Err(Error::NoGeometricDecay { delta: tail.slope.exp() });
            }
        }
    }
    Ok((line, residual))
}

/// Partial sum with the certified tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Synthesis {
    pub value: ComplexScalar,
    pub tail_bound: f64,
}

/// `Σ_{n ≤ n_terms} P_n(z)` together with `C δ^{n_terms+1}/(1-δ)`.
pub fn synthesize(exp: &BlockExpansion, z: ComplexScalar, n_terms: usize) -> Result<Synthesis> {
    let cert = exp.certificate()?;
    if z.norm() >= 1.0 {
        return Err(Error::Domain("synthesis is certified on the open unit disk".into()));
    }
    Ok(Synthesis { value: exp.partial_sum(z, n_terms), tail_bound: cert.tail_bound(n_terms) })
}

/// One block's holomorphic-component norms against the chain of estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentNormCheck {
    pub block: usize,
    pub component: usize,
    /// Sup of `|K_p(P_n)|` on `D_{k,A/2,n}`.
    pub measured: f64,
    /// `J_N(1 + (A/2)n^{-1/k}, 1 + A n^{-1/k}) m_n / r0^p`.
    pub chain_bound: f64,
}

/// Outcome of [`converse_verify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseReport {
    pub checks: Vec<ComponentNormCheck>,
    /// `max_{n,p} measured / √δ^n`.
    pub q_fitted: f64,
    /// Closed-form constant of the chain (equal to `C` when `N = 1`).
    pub q_closed_form: f64,
    pub chain_holds: bool,
    pub membership: MembershipReport,
    /// Nonzero coefficients of the recovered limit that entered the decay test.
    pub resolved: usize,
    pub accepted: bool,
}

/// Noise floor used when fitting the recovered limit's coefficients.
pub const RECOVERY_FLOOR: f64 = 1e-12;

/// Converse direction: component norms obey `Q √δ^n`, and the limit's recovered
/// coefficient table passes the decay test with the given `k`.
pub fn converse_verify(exp: &BlockExpansion, k: f64, grid: NormGrid) -> Result<ConverseReport> {
    converse_verify_with(exp, k, grid, 0.0)
}

/// [`converse_verify`] for blocks whose sum is known only up to `limit_error` in sup norm
/// on the closed unit disk. A recovered coefficient enters the decay test only when its
/// modulus exceeds `κ` times its [`coefficient_resolution`], `κ = 1/(1 - e^{-τ})` with `τ`
/// the fit tolerance, so that the true coefficient lies within a log distance `τ`.
pub fn converse_verify_with(exp: &BlockExpansion, k: f64, grid: NormGrid, limit_error: f64) -> Result<ConverseReport> {
    let cert = exp.certificate()?;
    let a = cert.r;
    if !(a < 1.0) {
        return Err(Error::Domain(format!("the converse check assumes A = R < 1, got {a}")));
    }
    let order = exp.order;
    let sqrt_delta = cert.delta.sqrt();

    let checks: Vec<ComponentNormCheck> = exp
        .blocks
        .par_iter()
        .enumerate()
        .flat_map_iter(|(n, block)| {
            let r0 = block_radius(n, k, a / 2.0);
            let r = block_radius(n, k, a);
            let j = jm(order, r0, r).expect("r > r0 > 0");
            let m_n = cert.norms.get(n).copied().unwrap_or(0.0);
            block
                .components()
                .iter()
                .enumerate()
                .map(move |(p, comp)| ComponentNormCheck {
                    block: n,
                    component: p,
                    measured: if comp.is_zero() {
                        0.0
                    } else {
                        circle_sup(&|z| comp.eval(z), ComplexScalar::new(0.0, 0.0), r0, grid.angular)
                    },
                    chain_bound: j * m_n / r0.powi(p as i32),
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let q_fitted = checks
        .iter()
        .map(|c| c.measured / sqrt_delta.powi(c.block as i32))
        .fold(0.0, f64::max);
    let q_closed_form = closed_form_q(cert.c, order, a, k, cert.delta);
    let slack = 1.0 + 1e-9;
    let chain_holds = checks.iter().all(|c| c.measured <= c.chain_bound * slack) && q_fitted <= q_closed_form * slack;

    let mut table = recover_limit(exp)?;
    let fit = FitOptions { relative_floor: RECOVERY_FLOOR, ..FitOptions::default() };
    if limit_error > 0.0 {
        let kappa = 1.0 / (1.0 - (-fit.tolerance).exp());
        for p in 0..table.order() {
            for q in 0..=table.q_max() {
                if table.get(p, q).norm() <= kappa * coefficient_resolution(order, p, q, limit_error) {
                    table.set(p, q, ComplexScalar::new(0.0, 0.0))?;
                }
            }
        }
    }
    let resolved = table.nonzero().count();
    let membership = membership_report_with(&table, k, &fit)?;
    let accepted = chain_holds && membership.accepted;
    Ok(ConverseReport { checks, q_fitted, q_closed_form, chain_holds, membership, resolved, accepted })
}

/// Largest possible `|a_{p,q}(g)|` for an order-`N` function with `‖g‖_{D̄} ≤ error`:
/// `error · min_{r0 < 1} J_N(r0, 1) r0^{-(p+q)}`, minimized over a logarithmic grid of `1 - r0`.
pub fn coefficient_resolution(order: usize, p: usize, q: usize, error: f64) -> f64 {
    let ln_min = (0..=96)
        .map(|i| {
            let gap = 10f64.powf(-5.0 + 5.0 * i as f64 / 96.0).min(0.9);
            let r0 = 1.0 - gap;
            jm(order, r0, 1.0).expect("0 < r0 < 1").ln() - (p + q) as f64 * r0.ln()
        })
        .fold(f64::INFINITY, f64::min);
    error * ln_min.exp()
}

/// `C (N-1) (10N/A)^{2N-2} (2N-2)^{(2N-2)/k} ((2/(e k ln(1/δ)))^{1/k})^{2N-2}`, or `C` for `N = 1`.
pub fn closed_form_q(c: f64, order: usize, a: f64, k: f64, delta: f64) -> f64 {
    if order == 1 {
        return c;
    }
    let l = 2.0 * (order as f64 - 1.0);
    let ln = c.ln() + (order as f64 - 1.0).ln() + l * (10.0 * order as f64 / a).ln() + ln_sup_power_decay(l, k, delta);
    ln.exp()
}

/// Samples the sum of the blocks on circles just inside the unit circle and recovers its table.
pub fn recover_limit(exp: &BlockExpansion) -> Result<CoefficientTable> {
    let q_max = exp.q_max();
    let radii = clustered_radii(exp.order, q_max);
    let m = recommended_samples(q_max, exp.order);
    Ok(decompose_function(|z| exp.eval(z), &radii, m, q_max)?.table)
}
