//! The fundamental solution of `∂̄^N`, Cauchy–Pompeiu reconstruction on a Cartesian grid,
//! pseudoanalytic extensions built from certified block expansions, and the converse check
//! that recovers derivative bounds from the decay of `∂̄^N F`.

pub mod jet;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::{kernel_sup_study, psi_kernel_bound, KernelGrid, PsiBound};
use crate::decompose::polys_on_circle;
use crate::error::{Error, Result};
use crate::expansion::{block_radius, block_range, BlockExpansion};
use crate::numeric::{gauss_legendre, least_squares, pairwise_sum, upper_hull, Line};
use crate::poly::{factorial, ln_factorial, ComplexScalar, NAnalyticPoly};

use jet::Jet;

const ZERO: ComplexScalar = ComplexScalar::new(0.0, 0.0);

/// `𝒱_N(z) = z̄^{N-1} / (π (N-1)! z)`.
pub fn vn_kernel(z: ComplexScalar, order: usize) -> Result<ComplexScalar> {
    if order == 0 {
        return Err(Error::Domain("the kernel needs N >= 1".into()));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Singular);
    }
    let inv_fact = if order > 21 { (-ln_factorial(order - 1)).exp() } else { 1.0 / factorial(order - 1) };
    let modulus = z.norm().powi(order as i32 - 2) * inv_fact / PI;
    Ok(ComplexScalar::from_polar(modulus, -(order as f64) * z.arg()))
}

/// Uniform `M × M` grid of cell centers on `[-h, h]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub half_width: f64,
    pub resolution: usize,
}

impl Grid2D {
    pub const MIN_RESOLUTION: usize = 64;

    pub fn new(half_width: f64, resolution: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Domain("grid half-width must be positive".into()));
        }
        if resolution < Self::MIN_RESOLUTION {
            return Err(Error::InvalidInput(format!("grid resolution must be at least {}", Self::MIN_RESOLUTION)));
        }
        Ok(Grid2D { half_width, resolution })
    }

    pub fn cell(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.cell() * self.cell()
    }

    /// Center of cell `(ix, iy)`.
    pub fn node(&self, ix: usize, iy: usize) -> ComplexScalar {
        let h = self.cell();
        ComplexScalar::new(-self.half_width + (ix as f64 + 0.5) * h, -self.half_width + (iy as f64 + 0.5) * h)
    }

    /// Cell containing `z`, if inside the square.
    pub fn cell_of(&self, z: ComplexScalar) -> Option<(usize, usize)> {
        let h = self.cell();
        let ix = ((z.re + self.half_width) / h).floor();
        let iy = ((z.im + self.half_width) / h).floor();
        let m = self.resolution as f64;
        (ix >= 0.0 && iy >= 0.0 && ix < m && iy < m).then_some((ix as usize, iy as usize))
    }

    /// Grid with half the resolution over the same square.
    pub fn coarsened(&self) -> Grid2D {
        Grid2D { half_width: self.half_width, resolution: self.resolution / 2 }
    }
}

/// The smooth step `S(t) = g(t)/(g(t) + g(1-t))`, `g(t) = exp(-1/t)` for `t > 0`, else 0.
pub fn smooth_step(t: f64) -> f64 {
    smooth_step_jet(Jet::constant(t, 0)).value()
}

/// [`smooth_step`] propagated through a jet.
pub fn smooth_step_jet(t: Jet) -> Jet {
    let t0 = t.value();
    if t0 <= 0.0 {
        return Jet::constant(0.0, t.order());
    }
    if t0 >= 1.0 {
        return Jet::constant(1.0, t.order());
    }
    let g = |u: Jet| (-u.recip()).exp();
    let a = g(t);
    let b = g(-t.offset(-1.0));
    a / (a + b)
}

/// Radial cutoff `h(r)`: identically 1 for `r ≤ inner`, 0 for `r ≥ outer`, smooth between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub inner: f64,
    pub outer: f64,
}

impl CutoffSpec {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0) || !(outer > inner) {
            return Err(Error::Domain(format!("cutoff needs 0 < inner < outer (got {inner}, {outer})")));
        }
        Ok(CutoffSpec { inner, outer })
    }

    /// Cutoff attached to block `n`: plateau up to `1 + (A/4)n^{-1/k}`, support in `1 + (A/3)n^{-1/k}`.
    pub fn for_block(n: usize, k: f64, a: f64) -> Self {
        CutoffSpec { inner: block_radius(n, k, a / 4.0), outer: block_radius(n, k, a / 3.0) }
    }

    pub fn value(&self, r: f64) -> f64 {
        smooth_step((self.outer - r) / (self.outer - self.inner))
    }

    /// `h(√s)` as a jet in `s` at `s0`: its derivatives are the `∂̄`-weights of the cutoff.
    pub fn jet_in_s(&self, s0: f64, order: usize) -> Jet {
        if s0 <= self.inner * self.inner {
            return Jet::constant(1.0, order);
        }
        if s0 >= self.outer * self.outer {
            return Jet::constant(0.0, order);
        }
        let r = Jet::variable(s0, order).sqrt();
        smooth_step_jet((-r).offset(self.outer).scale(1.0 / (self.outer - self.inner)))
    }

    /// `h^{(j)}(s0)` in the variable `s = |z|²`, for `j = 0..=order`.
    pub fn s_derivatives(&self, s0: f64, order: usize) -> Vec<f64> {
        self.jet_in_s(s0, order).derivatives()
    }

    /// Largest sampled `|d^j/ds^j h|` over the transition shell, `j = 0..=order`.
    pub fn max_s_derivatives(&self, order: usize, samples: usize) -> Vec<f64> {
        let (lo, hi) = (self.inner * self.inner, self.outer * self.outer);
        let mut best = vec![0.0f64; order + 1];
        for i in 0..=samples {
            let s = lo + (hi - lo) * i as f64 / samples as f64;
            for (b, d) in best.iter_mut().zip(self.s_derivatives(s, order)) {
                *b = b.max(d.abs());
            }
        }
        best
    }
}

/// `∂̄^N (h(|z|²) P)(z)` by the Leibniz rule, using `∂̄^j h(|z|²) = h^{(j)}(|z|²) z^j`.
pub fn dbar_n_of_cutoff_product(cutoff: &CutoffSpec, poly: &NAnalyticPoly, order: usize, z: ComplexScalar) -> ComplexScalar {
    let h = cutoff.s_derivatives(z.norm_sqr(), order);
    (0..=order)
        .map(|i| {
            let weight = h[order - i] * binomial(order, i);
            if weight == 0.0 {
                return ZERO;
            }
            z.powu((order - i) as u32) * poly.dbar_pow(i).eval(z) * weight
        })
        .sum()
}

/// Compactly supported test function `h(|z|) P(z)`: a smooth radial bump times an
/// N-analytic polynomial, with `∂̄^N` available in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFunction {
    pub cutoff: CutoffSpec,
    pub factor: NAnalyticPoly,
}

impl BumpFunction {
    /// The bump `≡ 1` on `|z| ≤ 1/2`, supported in `|z| < 0.9`, times `1 + z̄`.
    pub fn standard() -> Self {
        let factor = NAnalyticPoly::from_coeffs(vec![vec![ComplexScalar::new(1.0, 0.0)], vec![ComplexScalar::new(1.0, 0.0)]])
            .expect("two nonempty components");
        BumpFunction { cutoff: CutoffSpec { inner: 0.5, outer: 0.9 }, factor }
    }

    pub fn value(&self, z: ComplexScalar) -> ComplexScalar {
        self.factor.eval(z) * self.cutoff.value(z.norm())
    }

    pub fn dbar_n(&self, order: usize, z: ComplexScalar) -> ComplexScalar {
        dbar_n_of_cutoff_product(&self.cutoff, &self.factor, order, z)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Midpoint-rule value of the reconstruction integral and its refinement indicator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PompeiuEstimate {
    pub value: ComplexScalar,
    /// `|value - value on the half-resolution grid|`.
    pub indicator: f64,
    /// `|value - φ(z)|`, the observed error against the supplied function.
    pub error: f64,
}

/// `∬ 𝒱_N(z - ζ) g(ζ) dν(ζ)` by the midpoint rule. The cell containing `z` is replaced by
/// the integral of the kernel over a centered disk of equal area against the local density;
/// that integral vanishes (the kernel's angular factor `e^{-iNθ}` averages to zero).
pub fn pompeiu_quadrature(
    dbar_n_phi: &(dyn Fn(ComplexScalar) -> ComplexScalar + Sync),
    order: usize,
    z: ComplexScalar,
    grid: Grid2D,
) -> Result<ComplexScalar> {
    let skip = grid.cell_of(z);
    let area = grid.cell_area();
    let rows: Vec<ComplexScalar> = (0..grid.resolution)
        .map(|iy| {
            let row: Vec<ComplexScalar> = (0..grid.resolution)
                .map(|ix| {
                    if skip == Some((ix, iy)) {
                        return ZERO;
                    }
                    let zeta = grid.node(ix, iy);
                    let g = dbar_n_phi(zeta);
                    if g == ZERO {
                        return ZERO;
                    }
                    vn_kernel(z - zeta, order).map(|k| k * g).unwrap_or(ZERO)
                })
                .collect();
            pairwise_sum(&row)
        })
        .collect();
    Ok(pairwise_sum(&rows) * area)
}

/// Reconstructs `φ(z)` from `∂̄^N φ`, reporting a refinement indicator; fails with
/// `GRID_TOO_COARSE` when the indicator exceeds ten times `tol`.
pub fn pompeiu_reconstruct(
    phi: &(dyn Fn(ComplexScalar) -> ComplexScalar + Sync),
    dbar_n_phi: &(dyn Fn(ComplexScalar) -> ComplexScalar + Sync),
    order: usize,
    z: ComplexScalar,
    grid: Grid2D,
    tol: f64,
) -> Result<PompeiuEstimate> {
    let value = pompeiu_quadrature(dbar_n_phi, order, z, grid)?;
    let coarse = pompeiu_quadrature(dbar_n_phi, order, z, grid.coarsened())?;
    let indicator = (value - coarse).norm();
    if indicator > 10.0 * tol {
        return Err(Error::GridTooCoarse { indicator, limit: 10.0 * tol });
    }
    Ok(PompeiuEstimate { value, indicator, error: (value - phi(z)).norm() })
}

/// Compactly supported extension `F = Σ_n h_n P_n` of a certified block expansion.
#[derive(Debug, Clone)]
pub struct PseudoanalyticExtension {
    pub k: f64,
    pub a: f64,
    pub order: usize,
    blocks: Vec<NAnalyticPoly>,
    cutoffs: Vec<CutoffSpec>,
    /// `prefix[j] = Σ_{n<j} P_n`.
    prefix: Vec<NAnalyticPoly>,
    /// `leibniz[n][i] = C(N,i) z^{N-i} ∂̄^i P_n`.
    leibniz: Vec<Vec<NAnalyticPoly>>,
}

impl PseudoanalyticExtension {
    /// Requires a certificate; `a` must lie in `(0, 1)`.
    pub fn new(exp: &BlockExpansion, a: f64) -> Result<Self> {
        exp.certificate()?;
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Domain(format!("A must lie in (0, 1), got {a}")));
        }
        let order = exp.order;
        let cutoffs: Vec<CutoffSpec> = (0..exp.blocks.len()).map(|n| CutoffSpec::for_block(n, exp.k, a)).collect();
        let mut prefix = vec![NAnalyticPoly::zero(order)];
        for b in &exp.blocks {
            let next = prefix.last().expect("seeded") + b;
            prefix.push(next);
        }
        let leibniz = exp
            .blocks
            .iter()
            .map(|b| (0..order).map(|i| b.dbar_pow(i).mul_z_pow(order - i).scale(ComplexScalar::new(binomial(order, i), 0.0))).collect())
            .collect();
        Ok(PseudoanalyticExtension { k: exp.k, a, order, blocks: exp.blocks.clone(), cutoffs, prefix, leibniz })
    }

    pub fn cutoffs(&self) -> &[CutoffSpec] {
        &self.cutoffs
    }

    /// Radius beyond which `F` and `∂̄^N F` vanish identically (`1 + A`).
    pub fn support_radius(&self) -> f64 {
        1.0 + self.a
    }

    /// Blocks with `h_n ≡ 1` at radius `r` form a prefix `0..j1`; those with a nonconstant
    /// cutoff form `j1..j2`.
    fn split(&self, r: f64) -> (usize, usize) {
        let j1 = self.cutoffs.iter().take_while(|c| r <= c.inner).count();
        let j2 = j1 + self.cutoffs[j1..].iter().take_while(|c| r < c.outer).count();
        (j1, j2)
    }

    pub fn eval(&self, z: ComplexScalar) -> ComplexScalar {
        let r = z.norm();
        if r >= self.support_radius() {
            return ZERO;
        }
        let (j1, j2) = self.split(r);
        let mut acc = self.prefix[j1].eval(z);
        for n in j1..j2 {
            acc += self.blocks[n].eval(z) * self.cutoffs[n].value(r);
        }
        acc
    }

    /// `(∂/∂z̄)^N F(z)`.
    pub fn dbar_n(&self, z: ComplexScalar) -> ComplexScalar {
        let r = z.norm();
        if r >= self.support_radius() {
            return ZERO;
        }
        let (j1, j2) = self.split(r);
        let s = z.norm_sqr();
        let mut acc = ZERO;
        for n in j1..j2 {
            let h = self.cutoffs[n].s_derivatives(s, self.order);
            for (i, term) in self.leibniz[n].iter().enumerate() {
                let w = h[self.order - i];
                if w != 0.0 {
                    acc += term.eval(z) * w;
                }
            }
        }
        acc
    }

    /// `∂̄^N F` at `m` equispaced points of the circle of radius `rho` (via one inverse FFT).
    pub fn dbar_n_on_circle(&self, rho: f64, m: usize) -> Vec<ComplexScalar> {
        let (j1, j2) = self.split(rho);
        let s = rho * rho;
        let mut terms = Vec::new();
        for n in j1..j2 {
            let h = self.cutoffs[n].s_derivatives(s, self.order);
            for (i, term) in self.leibniz[n].iter().enumerate() {
                terms.push((ComplexScalar::new(h[self.order - i], 0.0), term));
            }
        }
        polys_on_circle(terms, rho, m)
    }

    /// Sorted radii where some cutoff starts or stops varying.
    pub fn shell_breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .cutoffs
            .iter()
            .zip(&self.blocks)
            .filter(|(_, b)| !b.is_zero())
            .flat_map(|(c, _)| [c.inner, c.outer])
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        pts
    }

    /// Largest power carried by the blocks.
    pub fn q_max(&self) -> usize {
        self.blocks.iter().filter_map(|b| b.degree().finite()).max().unwrap_or(0)
    }
}

/// `F` and `∂̄^N F` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionField {
    pub grid: Grid2D,
    pub order: usize,
    pub k: f64,
    pub a: f64,
    pub support_radius: f64,
    /// Radius inside which `∂̄^N F` would receive contributions from blocks missing from a
    /// truncated table; the decay fit ignores nodes inside it.
    pub truncation_radius: f64,
    /// Row-major (`iy * M + ix`).
    pub values: Vec<ComplexScalar>,
    pub dbar_n: Vec<ComplexScalar>,
}

impl ExtensionField {
    pub fn value_at(&self, ix: usize, iy: usize) -> ComplexScalar {
        self.values[iy * self.grid.resolution + ix]
    }

    pub fn dbar_n_at(&self, ix: usize, iy: usize) -> ComplexScalar {
        self.dbar_n[iy * self.grid.resolution + ix]
    }
}

/// Builds the extension with cutoff parameter `A` and samples it on `grid`, which must
/// contain the disk of radius `1 + A`.
pub fn build_extension(exp: &BlockExpansion, a: f64, grid: Grid2D) -> Result<(PseudoanalyticExtension, ExtensionField)> {
    let ext = PseudoanalyticExtension::new(exp, a)?;
    if grid.half_width < ext.support_radius() {
        return Err(Error::Domain(format!(
            "grid half-width {} does not contain the support radius {}",
            grid.half_width,
            ext.support_radius()
        )));
    }
    let m = grid.resolution;
    let mut values = Vec::with_capacity(m * m);
    let mut dbar_n = Vec::with_capacity(m * m);
    for iy in 0..m {
        for ix in 0..m {
            let z = grid.node(ix, iy);
            values.push(ext.eval(z));
            dbar_n.push(ext.dbar_n(z));
        }
    }
    let q_max = exp.q_max();
    let complete = (0..exp.blocks.len())
        .filter(|&n| block_range(n, exp.k).end <= q_max + 1 || n + 1 < exp.blocks.len())
        .max()
        .unwrap_or(0);
    let truncation_radius = block_radius(complete + 1, exp.k, a / 3.0);
    let field = ExtensionField {
        grid,
        order: ext.order,
        k: exp.k,
        a,
        support_radius: ext.support_radius(),
        truncation_radius,
        values,
        dbar_n,
    };
    Ok((ext, field))
}

/// Upper-envelope fit `|∂̄^N F(z)| ≤ C1 exp(-C2 (|z|-1)^{-k})` over the annulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c1: f64,
    pub c2: f64,
    /// Largest excess of a bin maximum over the fitted line (log space).
    pub residual: f64,
    /// Annulus nodes with nonzero `∂̄^N F`.
    pub nodes: usize,
    /// Bins between the circle and the peak that entered the regression.
    pub bins_used: usize,
}

/// Number of bins in `x = -(|z|-1)^{-k}` used by [`dbar_decay_fit`].
pub const DECAY_BINS: usize = 24;

/// Fits the decay law of `∂̄^N F` over annulus nodes between the truncation radius and the support.
///
/// Nodes are binned geometrically in `|x|`, `x = -(|z|-1)^{-k}`, and the maximum of
/// `ln|∂̄^N F|` is kept per bin (single nodes sample angular zeros of the blocks). Away
/// from the circle the profile has a plateau where the growing cutoff derivatives
/// compete with the block norms; the decay law describes the side between the circle
/// and the highest bin, so the line is fitted by least squares to the upper concave hull
/// of the bins on that side.
pub fn dbar_decay_fit(field: &ExtensionField, k: f64) -> Result<DecayFit> {
    let m = field.grid.resolution;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for iy in 0..m {
        for ix in 0..m {
            let z = field.grid.node(ix, iy);
            let r = z.norm();
            let v = field.dbar_n_at(ix, iy).norm();
            if r > field.truncation_radius.max(1.0) && r < field.support_radius && v > 1e-300 {
                pts.push((-(r - 1.0).powf(-k), v.ln()));
            }
        }
    }
    decay_fit_points(&pts)
}

/// The binned upper fit behind [`dbar_decay_fit`], on raw `(x, ln|∂̄^N F|)` pairs with `x < 0`.
pub fn decay_fit_points(pts: &[(f64, f64)]) -> Result<DecayFit> {
    if pts.len() < 2 * DECAY_BINS {
        return Err(Error::InsufficientData(format!("{} annulus nodes with nonzero dbar^N F", pts.len())));
    }
    let lo = pts.iter().map(|p| (-p.0).ln()).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| (-p.0).ln()).fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo).max(f64::MIN_POSITIVE);
    let mut bins = vec![(f64::NAN, f64::NEG_INFINITY); DECAY_BINS];
    for &(x, y) in pts {
        // Bin 0 holds the nodes closest to the circle (largest |x|).
        let b = (((hi - (-x).ln()) / width) * DECAY_BINS as f64).floor().clamp(0.0, (DECAY_BINS - 1) as f64) as usize;
        if y > bins[b].1 {
            bins[b] = (x, y);
        }
    }
    let filled: Vec<(f64, f64)> = bins.into_iter().filter(|b| b.1.is_finite()).collect();
    let peak = filled
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("at least one node");
    let (xs, ys): (Vec<f64>, Vec<f64>) = filled[..=peak].iter().copied().unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} bins between the circle and the peak of |dbar^N F|; refine the grid",
            xs.len()
        )));
    }
    let hull = upper_hull(&xs, &ys);
    let hx: Vec<f64> = hull.iter().map(|&i| xs[i]).collect();
    let hy: Vec<f64> = hull.iter().map(|&i| ys[i]).collect();
    let line: Line = least_squares(&hx, &hy)
        .or_else(|| least_squares(&xs, &ys))
        .ok_or_else(|| Error::InsufficientData("annulus nodes share one radius".into()))?;
    Ok(DecayFit {
        c1: line.intercept.exp(),
        c2: line.slope,
        residual: line.max_excess(&xs, &ys),
        nodes: pts.len(),
        bins_used: xs.len(),
    })
}

/// Polar quadrature for derivatives of the reconstruction integral over the shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellQuadrature {
    /// Angular trapezoid points (power of two, larger than the mode span of the blocks).
    pub angular: usize,
    /// Gauss–Legendre nodes per radial panel.
    pub gauss: usize,
    /// Panels per interval between consecutive cutoff breakpoints.
    pub panels: usize,
}

impl Default for ShellQuadrature {
    fn default() -> Self {
        ShellQuadrature { angular: 2048, gauss: 32, panels: 4 }
    }
}

/// `∂_z^l ∂_z̄^m 𝒱_N(z - ζ)`.
pub fn kernel_derivative(z: ComplexScalar, zeta: ComplexScalar, order: usize, l: usize, m: usize) -> ComplexScalar {
    if m + 1 > order {
        return ZERO;
    }
    let d = z - zeta;
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    let scale = sign * factorial(l) / (PI * factorial(order - 1 - m));
    d.conj().powu((order - 1 - m) as u32) / d.powu(l as u32 + 1) * scale
}

/// A mixed derivative `∂_z^l ∂_z̄^m f(z)` computed from the reconstruction integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub l: usize,
    pub m: usize,
    pub z: ComplexScalar,
    pub value: ComplexScalar,
}

/// Outcome of [`converse_membership`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseMembership {
    /// Kernel envelope checks run before any derivative is computed.
    pub gate: Vec<PsiBound>,
    pub d2: f64,
    pub derivatives: Vec<DerivativeEstimate>,
    /// Fitted `𝒫` with `|∂^{l+m} f| ≤ 𝒫^{l+m+1} (l+m)^{(1+1/k)(l+m)}` on the probes.
    pub p_fitted: f64,
    pub accepted: bool,
}

/// Mixed derivatives `∂_z^l ∂_z̄^m f` (`l + m ≤ max_total`) at the probes, by differentiating
/// the reconstruction integral under the integral sign over the shell where `∂̄^N F` lives.
pub fn shell_derivatives(
    ext: &PseudoanalyticExtension,
    probes: &[ComplexScalar],
    max_total: usize,
    quad: ShellQuadrature,
) -> Result<Vec<DerivativeEstimate>> {
    if probes.iter().any(|z| z.norm() >= 1.0) {
        return Err(Error::Domain("derivative probes must lie in the open unit disk".into()));
    }
    if quad.angular <= ext.q_max() + 2 * ext.order || !quad.angular.is_power_of_two() {
        return Err(Error::GridTooCoarse { indicator: quad.angular as f64, limit: (ext.q_max() + 2 * ext.order) as f64 });
    }
    let order = ext.order;
    let pairs: Vec<(usize, usize)> =
        (0..=max_total).flat_map(|t| (0..=t).map(move |m| (t - m, m))).filter(|&(_, m)| m < order).collect();
    let (gx, gw) = gauss_legendre(quad.gauss);
    let bp = ext.shell_breakpoints();
    let mut radial: Vec<(f64, f64)> = Vec::new();
    for w in bp.windows(2) {
        let (a, b) = (w[0], w[1]);
        for p in 0..quad.panels {
            let lo = a + (b - a) * p as f64 / quad.panels as f64;
            let hi = a + (b - a) * (p + 1) as f64 / quad.panels as f64;
            for (x, wt) in gx.iter().zip(&gw) {
                radial.push((0.5 * (lo + hi) + 0.5 * (hi - lo) * x, 0.5 * (hi - lo) * wt));
            }
        }
    }
    let dtheta = 2.0 * PI / quad.angular as f64;
    let nodes: Vec<ComplexScalar> = (0..quad.angular).map(|j| crate::decompose::circle_node(1.0, j, quad.angular)).collect();
    let mut acc = vec![vec![ZERO; pairs.len()]; probes.len()];
    for &(rho, wr) in &radial {
        let g = ext.dbar_n_on_circle(rho, quad.angular);
        let weight = wr * rho * dtheta;
        for (pi, &z) in probes.iter().enumerate() {
            for (qi, &(l, m)) in pairs.iter().enumerate() {
                let mut s = ZERO;
                for (u, gv) in nodes.iter().zip(&g) {
                    if gv.re == 0.0 && gv.im == 0.0 {
                        continue;
                    }
                    s += kernel_derivative(z, u * rho, order, l, m) * gv;
                }
                acc[pi][qi] += s * weight;
            }
        }
    }
    let mut out = Vec::new();
    for (pi, &z) in probes.iter().enumerate() {
        for (qi, &(l, m)) in pairs.iter().enumerate() {
            out.push(DerivativeEstimate { l, m, z, value: acc[pi][qi] });
        }
    }
    Ok(out)
}

/// Converse check: the kernel envelope gate (with `B = C2`) followed by derivative bounds
/// of order `l + m ≤ max_total` at the probes.
pub fn converse_membership(
    ext: &PseudoanalyticExtension,
    decay: &DecayFit,
    k: f64,
    probes: &[ComplexScalar],
    max_total: usize,
    quad: ShellQuadrature,
) -> Result<ConverseMembership> {
    if !(decay.c2 > 0.0) {
        return Err(Error::NegativeBeta { beta: decay.c2 });
    }
    let r0 = 1.5 * ext.a;
    let kgrid = KernelGrid { shell: 400, radial: 4, angular: 32 };
    let d2 = kernel_sup_study(decay.c2, r0, k, max_total, kgrid)?.d2;
    let gate = (0..=max_total)
        .map(|l| psi_kernel_bound(l, decay.c2, k, r0, ext.order, d2, kgrid))
        .collect::<Result<Vec<_>>>()?;
    if !gate.iter().all(|g| g.holds) {
        return Ok(ConverseMembership { gate, d2, derivatives: Vec::new(), p_fitted: f64::INFINITY, accepted: false });
    }
    let derivatives = shell_derivatives(ext, probes, max_total, quad)?;
    let p_fitted = derivatives
        .iter()
        .map(|d| {
            let t = (d.l + d.m) as f64;
            let growth = if t == 0.0 { 0.0 } else { (1.0 + 1.0 / k) * t * t.ln() };
            ((d.value.norm().max(1e-300).ln() - growth) / (t + 1.0)).exp()
        })
        .fold(1.0, f64::max);
    let accepted = p_fitted.is_finite() && derivatives.iter().all(|d| d.value.re.is_finite() && d.value.im.is_finite());
    Ok(ConverseMembership { gate, d2, derivatives, p_fitted, accepted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_rejects_origin() {
        assert!(matches!(vn_kernel(ZERO, 2), Err(Error::Singular)));
    }

    #[test]
    fn cutoff_plateaus() {
        let c = CutoffSpec::new(0.5, 1.0).unwrap();
        assert_eq!(c.value(0.3), 1.0);
        assert_eq!(c.value(1.2), 0.0);
        assert!((c.value(0.75) - 0.5).abs() < 1e-15);
        assert_eq!(c.s_derivatives(0.01, 3), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn grid_cell_lookup() {
        let g = Grid2D::new(1.0, 64).unwrap();
        let (ix, iy) = g.cell_of(g.node(10, 20)).unwrap();
        assert_eq!((ix, iy), (10, 20));
        assert!(g.cell_of(ComplexScalar::new(2.0, 0.0)).is_none());
    }
}
