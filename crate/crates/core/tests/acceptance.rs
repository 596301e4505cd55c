//! Acceptance run: one PASS/FAIL line per criterion with the measured quantities.
//!
//! Runs as a plain binary under `cargo test`. A failing criterion is reported, not hidden,
//! and does not abort the remaining ones. The process exits non-zero only when a check
//! could not be carried out at all (an unexpected error).

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use polyanalytic::approx::{constructive_approximant, fit_theta, minimax_estimate, minimax_sweep, ApproxGrid, ApproxRecord, LawsonOptions};
use polyanalytic::bounds::{
    check_appendix_81, check_appendix_82, check_appendix_83, check_bw, check_bw_tight, check_estm1, check_max_modulus, jm, lm,
    sup_power_decay, KernelGrid, MaxModulusVariant, SupGrid,
};
use polyanalytic::corpus::{self, CorpusFunction};
use polyanalytic::decompose::{components_from_circles, recommended_samples, sample_circle, straddling_radii};
use polyanalytic::dynkin::{
    build_extension, converse_membership, dbar_decay_fit, pompeiu_reconstruct, BumpFunction, Grid2D, ShellQuadrature,
};
use polyanalytic::expansion::{build_blocks, certify_norms, converse_verify, default_radius, BlockExpansion, NormGrid};
use polyanalytic::gevrey::{lemma_rp, ln_lemma_infimum, ln_lemma_infimum_exhaustive};
use polyanalytic::{random_poly, ComplexScalar, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict { passed, detail: detail.into() })
}

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

fn within_budget(elapsed: Duration, seconds: u64) -> bool {
    elapsed <= Duration::from_secs(seconds)
}

fn certified(f: &CorpusFunction) -> Result<(f64, BlockExpansion)> {
    let k = f.k().unwrap_or(1.0);
    let table = f.table();
    let exp = certify_norms(&build_blocks(&table, k)?, default_radius(&table, k), NormGrid::default())?;
    Ok((k, exp))
}

fn decomposition_round_trip() -> Result<Verdict> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut worst_entry) = (0.0f64, 0.0f64);
    for i in 0..100u64 {
        let order = rng.gen_range(1..=5);
        let degree = rng.gen_range(0..=64);
        let poly = random_poly(order, degree, 1000 + i)?;
        let scale = (0..order).flat_map(|p| (0..=degree).map(move |q| (p, q))).map(|(p, q)| poly.coeff(p, q).norm()).fold(0.0, f64::max);
        let m = recommended_samples(degree, order);
        let samples = straddling_radii(order)
            .iter()
            .map(|&r| sample_circle(|z| poly.eval(z), r, m))
            .collect::<Result<Vec<_>>>()?;
        let table = components_from_circles(&samples, degree)?.table;
        for p in 0..order {
            for q in 0..=degree {
                let exact = poly.coeff(p, q);
                let err = (table.get(p, q) - exact).norm();
                worst = worst.max(err / scale);
                worst_entry = worst_entry.max(err / exact.norm());
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-9 && within_budget(elapsed, 30),
        format!(
            "worst coefficient error relative to the largest coefficient {worst:.2e} (limit 1e-9), entrywise {worst_entry:.2e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn constant_oracles() -> Result<Verdict> {
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
    let l2 = rel(lm(&[2.0])?, 10.0 / 3.0);
    let l3 = rel(lm(&[2.0, 3.0])?, 425.0 / 12.0);
    let j2 = rel(jm(2, 0.5, 1.0)?, 3.9);
    let worst = l2.max(l3).max(j2);
    verdict(worst <= 1e-12, format!("relative errors L2 {l2:.1e}, L3 {l3:.1e}, J2 {j2:.1e}"))
}

fn estm1_sweep() -> Result<Verdict> {
    let start = Instant::now();
    let mut failures = 0;
    let mut worst_margin = f64::INFINITY;
    for m in 2..=8 {
        for eps in [0.1, 0.2, 0.5, 1.0, 2.0] {
            let r = check_estm1(m, eps)?;
            failures += usize::from(!r.holds);
            worst_margin = worst_margin.min(r.margin);
        }
    }
    let elapsed = start.elapsed();
    verdict(
        failures == 0 && within_budget(elapsed, 5),
        format!("35 cases, {failures} violations, smallest margin {worst_margin:.3e}, {:.3} s", elapsed.as_secs_f64()),
    )
}

/// Maximizes the concave `ln(t^{l/k} ρ^{t/2})` by a coarse grid followed by golden-section search.
fn sup_by_search(l: usize, k: f64, rho: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let g = |t: f64| (l as f64 / k) * t.ln() + 0.5 * t * rho.ln();
    let hi = 64.0 * l as f64 / (k * (1.0 / rho).ln());
    let n = 4096;
    let best = (1..=n).max_by(|&a, &b| g(hi * a as f64 / n as f64).total_cmp(&g(hi * b as f64 / n as f64))).unwrap();
    let (mut a, mut b) = (hi * (best - 1).max(1) as f64 / n as f64, hi * (best + 1) as f64 / n as f64);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if g(x1) < g(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    g(0.5 * (a + b)).exp()
}

fn boundsup_closed_form() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for l in 0..=50 {
        for k in [0.5, 1.0, 2.0] {
            for rho in [0.1, 0.5, 0.9] {
                let closed = sup_power_decay(l, k, rho);
                let searched = sup_by_search(l, k, rho);
                worst = worst.max((closed - searched).abs() / searched);
            }
        }
    }
    verdict(worst <= 1e-6, format!("worst relative disagreement {worst:.2e} over 459 cases (limit 1e-6)"))
}

fn max_modulus_verifiers() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = SupGrid { angular: 1024, radial: 16 };
    let mut violations = 0;
    let mut checks = 0;
    for i in 0..200u64 {
        let order = rng.gen_range(1..=4);
        let degree = rng.gen_range(0..=12);
        let f = random_poly(order, degree, 5000 + i)?;
        let center = c(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        let r0 = rng.gen_range(0.3..0.6);
        let r = r0 + rng.gen_range(0.2..0.6);
        let interior: Vec<f64> = (1..order).map(|j| r0 + (r - r0) * j as f64 / order as f64).collect();
        let p = rng.gen_range(0..order);
        for variant in [MaxModulusVariant::Circles(interior), MaxModulusVariant::Annulus, MaxModulusVariant::Component(p)] {
            checks += 1;
            violations += usize::from(!check_max_modulus(&f, center, r0, r, &variant, grid)?.holds);
        }
    }
    verdict(violations == 0, format!("{checks} checks on 200 polynomials, {violations} violations"))
}

fn bernstein_walsh() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let grid = SupGrid { angular: 1024, radial: 16 };
    let (mut paper, mut tight) = (0, 0);
    for i in 0..1000u64 {
        let order = rng.gen_range(1..=4);
        let degree = rng.gen_range(0..=16);
        let f = random_poly(order, degree, 9000 + i)?;
        let z = ComplexScalar::from_polar(rng.gen_range(1.0..=3.0f64).max(1.0 + 1e-9), rng.gen_range(0.0..TAU));
        paper += usize::from(!check_bw(&f, degree, z, grid)?.holds);
        tight += usize::from(!check_bw_tight(&f, degree, z, grid)?.holds);
    }
    verdict(paper == 0, format!("1000 instances: {paper} violations of the stated constant, {tight} of the tighter one"))
}

fn direct_part() -> Result<Verdict> {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (id, delta_cap) in [("gevrey:c=1,k=1,N=1,Q=512", 0.93), ("gevrey:c=1,k=2,N=1,Q=512", 1.0)] {
        let (_, exp) = certified(&CorpusFunction::parse(id)?)?;
        let cert = exp.certificate()?;
        ok &= cert.delta < 1.0 && cert.delta <= delta_cap && cert.residual <= 0.3;
        parts.push(format!("k={} delta={:.4} residual={:.3}", exp.k, cert.delta, cert.residual));
    }
    let elapsed = start.elapsed();
    verdict(ok && within_budget(elapsed, 60), format!("{}; {:.2} s", parts.join(", "), elapsed.as_secs_f64()))
}

fn converse_part() -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for f in corpus::members() {
        let (k, exp) = certified(&f)?;
        let report = converse_verify(&exp, k, NormGrid::default())?;
        let limit = &report.membership;
        let mut text = format!("{}: converse {}", f.id, if report.accepted { "accepted" } else { "rejected" });
        ok &= report.accepted && limit.accepted;
        if let Some(beta0) = f.decay_constant() {
            let worst = limit
                .components
                .iter()
                .map(|v| v.model.as_ref().map_or(f64::INFINITY, |m| (m.beta - beta0).abs() / beta0))
                .fold(0.0, f64::max);
            ok &= worst <= 0.2;
            text += &format!(", limit beta off by {:.1e}", worst);
        } else {
            text += &format!(", limit membership {}", if limit.accepted { "accepted" } else { "rejected" });
        }
        parts.push(text);
    }
    verdict(ok, parts.join("; "))
}

fn lemma_infimum() -> Result<Verdict> {
    let mut mismatches = 0;
    let mut extended = 0;
    for k in [0.5, 1.0, 2.0] {
        for p0 in [1.0, 2.0, 5.0] {
            for p in 1..=10_000u64 {
                let window = 50u64.max(2 * (lemma_rp(p, p0, k) + 1));
                extended += usize::from(window > 50);
                let (_, formula) = ln_lemma_infimum(p, p0, k);
                let (_, exhaustive) = ln_lemma_infimum_exhaustive(p, p0, k, window);
                if (formula - exhaustive).abs() > 1e-12 * exhaustive.abs().max(1.0) {
                    mismatches += 1;
                }
            }
        }
    }
    verdict(
        mismatches == 0,
        format!("90000 cases, {mismatches} mismatches ({extended} cases with the minimizer beyond 50 searched to 2(r_p+1))"),
    )
}

fn pompeiu_quadrature() -> Result<Verdict> {
    let start = Instant::now();
    let bump = BumpFunction::standard();
    let probes = [c(0.0, 0.0), c(0.31, -0.17), c(-0.6, 0.2)];
    let mut worst = 0.0f64;
    let mut monotone = true;
    for order in 1..=3 {
        for &z in &probes {
            let mut last = f64::INFINITY;
            for m in [128, 256, 512] {
                let est = pompeiu_reconstruct(&|z| bump.value(z), &|z| bump.dbar_n(order, z), order, z, Grid2D::new(1.0, m)?, 1.0)?;
                monotone &= est.indicator < last;
                last = est.indicator;
                if m == 512 {
                    worst = worst.max(est.error);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 5e-3 && monotone && within_budget(elapsed, 120),
        format!(
            "worst error at 512^2 {worst:.2e} (limit 5e-3), indicator monotone: {monotone}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn dynkin_extension() -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for f in corpus::members() {
        let (k, exp) = certified(&f)?;
        let a = exp.certificate()?.r;
        let (_, field) = build_extension(&exp, a, Grid2D::new(1.0 + a + 0.01, 512)?)?;
        let fit = dbar_decay_fit(&field, k)?;
        ok &= fit.c2 > 0.0 && fit.residual <= 0.5;
        parts.push(format!("{}: C2={:.4} residual={:.3}", f.id, fit.c2, fit.residual));
    }

    let f = CorpusFunction::parse("gevrey:c=1,k=1,N=2,Q=128")?;
    let (k, exp) = certified(&f)?;
    let a = exp.certificate()?.r;
    let (ext, field) = build_extension(&exp, a, Grid2D::new(1.0 + a + 0.01, 256)?)?;
    let fit = dbar_decay_fit(&field, k)?;
    let zero = c(0.0, 0.0);
    let check = converse_membership(&ext, &fit, k, &[zero], 4, ShellQuadrature::default())?;
    let poly = exp.reassemble().to_poly();
    let worst = check
        .derivatives
        .iter()
        .map(|d| (d.value - poly.dz_pow(d.l).dbar_pow(d.m).eval(zero)).norm())
        .fold(0.0, f64::max);
    ok &= worst <= 1e-4;
    parts.push(format!("derivatives at 0 (l+m <= 4) off by {worst:.1e}"));
    verdict(ok, parts.join("; "))
}

fn theta_summary(records: &[ApproxRecord], k: f64) -> (bool, String) {
    match fit_theta(records, k) {
        Ok(fit) => (fit.accepted && fit.beta > 0.0, format!("beta={:.3}{}", fit.beta, if fit.accepted { "" } else { " rejected" })),
        Err(e) => (false, e.code().to_string()),
    }
}

fn best_approximation() -> Result<Verdict> {
    let grid = ApproxGrid::default();
    let opts = LawsonOptions::default();
    let ns: Vec<usize> = (0..=128).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for f in corpus::members() {
        let (k, exp) = certified(&f)?;
        let constructive = ns.iter().map(|&n| constructive_approximant(&exp, n, grid)).collect::<Result<Vec<_>>>()?;
        let violations = constructive.iter().filter(|r| r.bound.is_some_and(|b| r.e_value > b)).count();
        let (c_ok, c_text) = theta_summary(&constructive, k);
        let poly = f.poly();
        let minimax = minimax_sweep(|z| poly.eval(z), f.order, &ns, grid, &opts)?;
        let (m_ok, m_text) = theta_summary(&minimax, k);
        ok &= violations == 0 && c_ok && m_ok;
        parts.push(format!("{}: {violations} bound violations, constructive {c_text}, minimax {m_text}", f.id));
    }

    let nm = corpus::non_member();
    let poly = nm.poly();
    let minimax = minimax_sweep(|z| poly.eval(z), nm.order, &ns, grid, &opts)?;
    let rejected = match fit_theta(&minimax, 1.0) {
        Ok(fit) => {
            parts.push(format!(
                "non-member: beta={:.3} residual={:.3} rate head/tail {:.3}/{:.3} {}",
                fit.beta,
                fit.residual,
                fit.beta_head,
                fit.beta_tail,
                if fit.accepted { "accepted" } else { "rejected" }
            ));
            !fit.accepted
        }
        Err(e) => {
            parts.push(format!("non-member: {}", e.code()));
            true
        }
    };
    ok &= rejected;

    let zbar = minimax_estimate(|z: ComplexScalar| z.conj(), 1, 8, grid)?;
    ok &= (0.95..=1.0 + 1e-9).contains(&zbar.e_value);
    parts.push(format!("E(zbar; N=1, n=8) = {:.12}", zbar.e_value));
    verdict(ok, parts.join("; "))
}

fn appendix_suite() -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [0.5, 1.0, 2.0] {
        for b in [0.5, 1.0, 2.0] {
            for r in [check_appendix_81(b, k, 10_000)?, check_appendix_83(b, k, 2, 10_000)?] {
                ok &= r.holds && r.lhs.is_finite();
            }
        }
        let r = check_appendix_82(1.0, 0.5, k, 10, KernelGrid::default())?;
        ok &= r.holds && r.parameters["D2"].is_finite();
        parts.push(format!("k={k}: D2={:.3}", r.parameters["D2"]));
    }
    verdict(ok, format!("81/83 over B in {{0.5,1,2}}, n <= 10^4; 82 with l <= 10: {}", parts.join(", ")))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Result<Verdict>)> = vec![
        ("decomposition round trip", decomposition_round_trip),
        ("constant oracles", constant_oracles),
        ("J_m estimate sweep", estm1_sweep),
        ("power-decay supremum closed form", boundsup_closed_form),
        ("maximum-modulus verifiers", max_modulus_verifiers),
        ("Bernstein-Walsh estimate", bernstein_walsh),
        ("block expansion, direct part", direct_part),
        ("block expansion, converse part", converse_part),
        ("lemma infimum formula", lemma_infimum),
        ("Pompeiu quadrature", pompeiu_quadrature),
        ("pseudoanalytic extension", dynkin_extension),
        ("best approximation", best_approximation),
        ("appendix inequalities", appendix_suite),
    ];
    let mut passed = 0;
    let mut errors = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(v) => {
                passed += usize::from(v.passed);
                println!("{} {:>2} {name}: {}", if v.passed { "PASS" } else { "FAIL" }, i + 1, v.detail);
            }
            Err(e) => {
                errors += 1;
                println!("FAIL {:>2} {name}: error {e}", i + 1);
            }
        }
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if errors > 0 {
        std::process::exit(1);
    }
}
