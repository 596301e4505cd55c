//! Coefficient-decay model of the Gevrey polyanalytic class: fitting
//! `|a_p| ≤ α exp(-β p^{k/(k+1)})`, the explicit infimum formula behind that bound,
//! and per-component membership verdicts for coefficient tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decompose::CoefficientTable;
use crate::error::{Error, Result};
use crate::numeric::{least_squares, Line};

/// Fitted `(k, α, β)` with the diagnostics used to accept or reject it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyDecayModel {
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Smallest and largest power entering the fit.
    pub fit_range: (usize, usize),
    /// Largest `ln|a_p| - (ln α - β p^{k/(k+1)})` over the fit range.
    pub residual: f64,
    /// `α e^{max(0, residual)}`: the bound then holds on every fitted point.
    pub alpha_certified: f64,
    /// Decay rate fitted on the first half of the points.
    pub beta_head: f64,
    /// Decay rate fitted on the second half of the points.
    pub beta_tail: f64,
    pub accepted: bool,
}

impl GevreyDecayModel {
    /// `α exp(-β p^{k/(k+1)})`.
    pub fn envelope(&self, p: f64) -> f64 {
        self.alpha * (-self.beta * p.powf(self.k / (self.k + 1.0))).exp()
    }

    /// `β_tail / β_head`; above 1 when the decay accelerates.
    pub fn rate_ratio(&self) -> f64 {
        self.beta_tail / self.beta_head
    }
}

/// Options of [`fit_decay_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Leading coefficients excluded from the fit.
    pub skip: usize,
    /// Accepted one-sided log residual.
    pub tolerance: f64,
    /// Moduli at or below `floor · max|a_p|` are treated as zero (numerical noise floor).
    pub relative_floor: f64,
    /// Smallest accepted `β_tail/β_head` (a slowing decay rate signals sub-Gevrey decay).
    pub min_rate_ratio: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { skip: 8, tolerance: 0.5, relative_floor: 0.0, min_rate_ratio: 0.8 }
    }
}

/// Minimum number of usable moduli for a fit.
pub const MIN_FIT_POINTS: usize = 8;

/// [`fit_decay_with`] under the default options.
pub fn fit_decay(moduli: &[f64], k: f64) -> Result<GevreyDecayModel> {
    fit_decay_with(moduli, k, &FitOptions::default())
}

/// Regresses `ln|a_p|` on `-p^{k/(k+1)}` over `p ≥ skip` (zeros skipped).
///
/// A model is accepted when `β > 0`, the decay rates of the two halves of the range
/// agree to within `min_rate_ratio` (or the tail decays faster), and either the one-sided
/// residual is within tolerance or the decay accelerates (faster than the envelope, as
/// for geometric sequences, whose log-moduli curve away below any fitted line).
pub fn fit_decay_with(moduli: &[f64], k: f64, opts: &FitOptions) -> Result<GevreyDecayModel> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k must be positive, got {k}")));
    }
    let scale = moduli.iter().cloned().fold(0.0, f64::max);
    let floor = opts.relative_floor * scale;
    let e = k / (k + 1.0);
    let (xs, ys, ps): (Vec<f64>, Vec<f64>, Vec<usize>) = moduli
        .iter()
        .enumerate()
        .skip(opts.skip)
        .filter(|(_, &m)| m > floor && m > 0.0 && m.is_finite())
        .map(|(p, &m)| (-(p as f64).powf(e), m.ln(), p))
        .fold((Vec::new(), Vec::new(), Vec::new()), |mut acc, (x, y, p)| {
            acc.0.push(x);
            acc.1.push(y);
            acc.2.push(p);
            acc
        });
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} usable moduli after skipping {}; need {MIN_FIT_POINTS}",
            xs.len(),
            opts.skip
        )));
    }
    let fit = stretched_fit(&xs, &ys, opts)?;
    Ok(GevreyDecayModel {
        k,
        alpha: fit.line.intercept.exp(),
        beta: fit.line.slope,
        fit_range: (ps[0], *ps.last().expect("nonempty")),
        residual: fit.residual,
        alpha_certified: (fit.line.intercept + fit.residual.max(0.0)).exp(),
        beta_head: fit.beta_head,
        beta_tail: fit.beta_tail,
        accepted: fit.accepted,
    })
}

/// Regression of `ln v` on `x = -t^{k/(k+1)}` with the acceptance rule of [`fit_decay_with`].
pub(crate) struct StretchedFit {
    pub line: Line,
    pub residual: f64,
    pub beta_head: f64,
    pub beta_tail: f64,
    pub accepted: bool,
}

pub(crate) fn stretched_fit(xs: &[f64], ys: &[f64], opts: &FitOptions) -> Result<StretchedFit> {
    let line = least_squares(xs, ys).ok_or_else(|| Error::InsufficientData("degenerate abscissae".into()))?;
    if !(line.slope > 0.0) {
        return Err(Error::NegativeBeta { beta: line.slope });
    }
    let residual = line.max_excess(xs, ys);
    let half = xs.len() / 2;
    let rate = |lo: usize, hi: usize| least_squares(&xs[lo..hi], &ys[lo..hi]).map_or(0.0, |l: Line| l.slope);
    let beta_head = rate(0, half);
    let beta_tail = rate(half, xs.len());
    let consistent = beta_head > 0.0 && beta_tail >= opts.min_rate_ratio * beta_head;
    let accelerating = beta_tail >= beta_head;
    let accepted = consistent && (residual <= opts.tolerance || accelerating);
    Ok(StretchedFit { line, residual, beta_head, beta_tail, accepted })
}

/// `r_p = ⌊e^{-1} (1 + e P0)^{-k/(k+1)} p^{k/(k+1)}⌋`.
pub fn lemma_rp(p: u64, p0: f64, k: f64) -> u64 {
    let e = k / (k + 1.0);
    ((1.0 + std::f64::consts::E * p0).powf(-e) * (p as f64).powf(e) / std::f64::consts::E).floor() as u64
}

/// `ln(n^{n(1+1/k)} x^n)` with `x = (1 + e P0)/p`.
pub fn lemma_ln_term(n: u64, p: u64, p0: f64, k: f64) -> f64 {
    let nf = n as f64;
    let x = (1.0 + std::f64::consts::E * p0) / p as f64;
    nf * ((1.0 + 1.0 / k) * nf.ln() + x.ln())
}

/// Natural log of [`lemma_infimum`] together with the minimizing `n`.
pub fn ln_lemma_infimum(p: u64, p0: f64, k: f64) -> (u64, f64) {
    let rp = lemma_rp(p, p0, k);
    [rp, rp + 1]
        .into_iter()
        .filter(|&n| n >= 1)
        .map(|n| (n, lemma_ln_term(n, p, p0, k)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("r_p + 1 >= 1")
}

/// `inf_{n ≥ 1} n^{n(1+1/k)} ((1 + e P0)/p)^n` by the two-candidate formula `n ∈ {r_p, r_p + 1}`.
///
/// The map `n ↦ n(1+1/k) ln n + n ln x` is convex with its real minimizer in
/// `[r_p, r_p + 1)`, so the two candidates suffice.
pub fn lemma_infimum(p: u64, p0: f64, k: f64) -> f64 {
    ln_lemma_infimum(p, p0, k).1.exp()
}

/// Exhaustive `min_{1 ≤ n ≤ n_max}` of the same quantity, in log space, with its argmin.
pub fn ln_lemma_infimum_exhaustive(p: u64, p0: f64, k: f64, n_max: u64) -> (u64, f64) {
    (1..=n_max)
        .map(|n| (n, lemma_ln_term(n, p, p0, k)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("n_max >= 1")
}

/// Verdict for one component of a coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentVerdict {
    pub component: usize,
    pub model: Option<GevreyDecayModel>,
    /// Error code when the fit failed (e.g. `NEGATIVE_BETA`).
    pub error: Option<String>,
    /// Fewer significant coefficients than a fit needs: finitely supported, accepted trivially.
    pub trivial: bool,
    pub accepted: bool,
}

/// Per-component decay fits and the combined verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub k: f64,
    pub components: Vec<ComponentVerdict>,
    pub accepted: bool,
}

impl MembershipReport {
    /// Indices of the components that failed.
    pub fn rejected(&self) -> Vec<usize> {
        self.components.iter().filter(|c| !c.accepted).map(|c| c.component).collect()
    }
}

/// [`membership_report_with`] under the default fit options.
pub fn membership_report(table: &CoefficientTable, k: f64) -> Result<MembershipReport> {
    membership_report_with(table, k, &FitOptions::default())
}

/// Fits every component independently; the table is accepted when all components are.
pub fn membership_report_with(table: &CoefficientTable, k: f64, opts: &FitOptions) -> Result<MembershipReport> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k must be positive, got {k}")));
    }
    let components: Vec<ComponentVerdict> = (0..table.order())
        .into_par_iter()
        .map(|p| {
            let moduli = table.moduli(p);
            match fit_decay_with(&moduli, k, opts) {
                Ok(model) => ComponentVerdict { component: p, accepted: model.accepted, model: Some(model), error: None, trivial: false },
                Err(Error::InsufficientData(_)) => {
                    ComponentVerdict { component: p, model: None, error: None, trivial: true, accepted: true }
                }
                Err(err) => ComponentVerdict {
                    component: p,
                    model: None,
                    error: Some(err.code().to_string()),
                    trivial: false,
                    accepted: false,
                },
            }
        })
        .collect();
    let accepted = components.iter().all(|c| c.accepted);
    Ok(MembershipReport { k, components, accepted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rp_for_small_instance() {
        assert_eq!(lemma_rp(100, 1.0, 1.0), 1);
        let (n, v) = ln_lemma_infimum(100, 1.0, 1.0);
        assert_eq!(n, 2);
        assert!((v.exp() - 0.02212).abs() < 5e-5);
    }

    #[test]
    fn too_few_points_is_insufficient() {
        let m: Vec<f64> = (0..12).map(|p| (-(p as f64)).exp()).collect();
        assert!(matches!(fit_decay(&m, 1.0), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn growing_moduli_give_negative_beta() {
        let m: Vec<f64> = (0..64).map(|p| 1.0 + p as f64).collect();
        assert!(matches!(fit_decay(&m, 1.0), Err(Error::NegativeBeta { .. })));
    }
}
