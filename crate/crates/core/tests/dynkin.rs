use std::f64::consts::PI;

use polyanalytic::corpus::CorpusFunction;
use polyanalytic::decompose::CoefficientTable;
use polyanalytic::dynkin::{
    build_extension, dbar_decay_fit, kernel_derivative, pompeiu_quadrature, pompeiu_reconstruct, shell_derivatives,
    smooth_step, vn_kernel, BumpFunction, CutoffSpec, Grid2D, ShellQuadrature,
};
use polyanalytic::expansion::{build_blocks, certify_norms, default_radius, synthesize, BlockExpansion, NormGrid};
use polyanalytic::poly::factorial;
use polyanalytic::{random_poly, ComplexScalar, Error};
use proptest::prelude::*;

type C = ComplexScalar;

fn certified(id: &str) -> (f64, BlockExpansion) {
    let f = CorpusFunction::parse(id).unwrap();
    let k = f.k().unwrap_or(1.0);
    let table = f.table();
    (k, certify_norms(&build_blocks(&table, k).unwrap(), default_radius(&table, k), NormGrid::default()).unwrap())
}

#[test]
fn kernel_examples() {
    assert!((vn_kernel(C::new(1.0, 0.0), 1).unwrap() - C::new(1.0 / PI, 0.0)).norm() < 1e-16);
    assert!((vn_kernel(C::new(0.0, 1.0), 2).unwrap() - C::new(-1.0 / PI, 0.0)).norm() < 1e-16);
    assert!(matches!(vn_kernel(C::new(0.0, 0.0), 2), Err(Error::Singular)));
    assert!(vn_kernel(C::new(1.0, 0.0), 0).is_err());
    assert!(vn_kernel(C::new(0.3, 0.4), 40).unwrap().norm().is_finite());
}

#[test]
fn kernel_derivative_matches_finite_differences() {
    let (z, zeta) = (C::new(0.2, 0.1), C::new(1.3, -0.4));
    let h = 1e-5;
    for order in 1..=3 {
        let dx_dy = |s: C| (vn_kernel(z + s - zeta, order).unwrap() - vn_kernel(z - s - zeta, order).unwrap()) / (2.0 * h);
        let wirtinger_z = (dx_dy(C::new(h, 0.0)) - C::i() * dx_dy(C::new(0.0, h))) * 0.5;
        let wirtinger_zbar = (dx_dy(C::new(h, 0.0)) + C::i() * dx_dy(C::new(0.0, h))) * 0.5;
        assert!((kernel_derivative(z, zeta, order, 1, 0) - wirtinger_z).norm() < 1e-6);
        assert!((kernel_derivative(z, zeta, order, 0, 1) - wirtinger_zbar).norm() < 1e-6);
    }
}

#[test]
fn smooth_step_is_a_transition() {
    assert_eq!(smooth_step(-1.0), 0.0);
    assert_eq!(smooth_step(0.0), 0.0);
    assert_eq!(smooth_step(1.0), 1.0);
    assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    let c = CutoffSpec::new(1.1, 1.2).unwrap();
    assert_eq!(c.value(1.05), 1.0);
    assert_eq!(c.value(1.25), 0.0);
    assert!((0.0..=1.0).contains(&c.value(1.15)));
    assert!(CutoffSpec::new(1.2, 1.1).is_err());
}

#[test]
fn pompeiu_of_zero_is_zero() {
    let grid = Grid2D::new(1.0, 64).unwrap();
    assert_eq!(pompeiu_quadrature(&|_| C::new(0.0, 0.0), 2, C::new(0.1, 0.2), grid).unwrap(), C::new(0.0, 0.0));
    assert!(Grid2D::new(1.0, 32).is_err());
}

#[test]
fn pompeiu_reconstructs_the_bump() {
    let bump = BumpFunction::standard();
    let z = C::new(0.0, 0.0);
    let mut previous = f64::INFINITY;
    for m in [128, 256] {
        let est = pompeiu_reconstruct(&|z| bump.value(z), &|z| bump.dbar_n(1, z), 1, z, Grid2D::new(1.0, m).unwrap(), 1.0).unwrap();
        assert!(est.indicator < previous);
        previous = est.indicator;
        assert!(est.error <= 2e-2, "m = {m}: {}", est.error);
    }
    let tight = pompeiu_reconstruct(&|z| bump.value(z), &|z| bump.dbar_n(1, z), 1, z, Grid2D::new(1.0, 64).unwrap(), 1e-9);
    assert!(matches!(tight, Err(Error::GridTooCoarse { .. })));
}

#[test]
fn extension_agrees_inside_and_vanishes_outside() {
    let (k, exp) = certified("gevrey:c=1,k=1,N=2,Q=128");
    let cert = exp.certificate().unwrap().clone();
    let a = cert.r;
    let grid = Grid2D::new(1.0 + a + 0.01, 128).unwrap();
    let (ext, field) = build_extension(&exp, a, grid).unwrap();
    assert_eq!(field.support_radius, 1.0 + a);
    let n_all = exp.blocks.len() - 1;
    for iy in 0..grid.resolution {
        for ix in 0..grid.resolution {
            let z = grid.node(ix, iy);
            let r = z.norm();
            if r >= 1.0 + a {
                assert_eq!(field.value_at(ix, iy), C::new(0.0, 0.0));
                assert_eq!(field.dbar_n_at(ix, iy), C::new(0.0, 0.0));
            } else if r < 1.0 {
                let s = synthesize(&exp, z, n_all).unwrap();
                assert!((field.value_at(ix, iy) - s.value).norm() <= s.tail_bound + 1e-9);
                if r <= 1.0 - 2.0 / grid.resolution as f64 {
                    assert!(field.dbar_n_at(ix, iy).norm() <= 1e-10);
                }
            }
        }
    }
    let (ix, iy) = (17, 90);
    assert_eq!(ext.eval(grid.node(ix, iy)), field.value_at(ix, iy));
    assert!(ext.shell_breakpoints().iter().all(|&r| r > 1.0 && r <= 1.0 + a / 3.0 + 1e-12));
    assert_eq!(field.k, k);
}

#[test]
fn extension_needs_a_certificate_and_room() {
    let f = CorpusFunction::parse("gevrey:Q=64").unwrap();
    let raw = build_blocks(&f.table(), 1.0).unwrap();
    assert!(matches!(build_extension(&raw, 0.25, Grid2D::new(1.3, 64).unwrap()), Err(Error::Uncertified)));
    let (_, exp) = certified("gevrey:Q=64");
    assert!(matches!(build_extension(&exp, 0.25, Grid2D::new(1.1, 64).unwrap()), Err(Error::Domain(_))));
    assert!(build_extension(&exp, 1.5, Grid2D::new(3.0, 64).unwrap()).is_err());
}

#[test]
fn decay_fit_for_a_member() {
    let (k, exp) = certified("gevrey:c=1,k=1,N=1,Q=256");
    let a = exp.certificate().unwrap().r;
    let (_, field) = build_extension(&exp, a, Grid2D::new(1.0 + a + 0.01, 512).unwrap()).unwrap();
    let fit = dbar_decay_fit(&field, k).unwrap();
    assert!(fit.c2 > 0.0 && fit.residual <= 0.5, "C2 {} residual {}", fit.c2, fit.residual);
}

#[test]
fn decay_fit_needs_annulus_data() {
    let (k, exp) = certified("finite:[0;0;0]");
    let (_, field) = build_extension(&exp, 0.25, Grid2D::new(1.26, 64).unwrap()).unwrap();
    assert!(field.dbar_n.iter().all(|v| v.norm() == 0.0));
    assert!(matches!(dbar_decay_fit(&field, k), Err(Error::InsufficientData(_))));

    // A short table leaves only its last cutoff shell: too few bins for the decay law.
    let (k, exp) = certified("finite:[1;0.5;-2]");
    let (_, field) = build_extension(&exp, 0.25, Grid2D::new(1.26, 64).unwrap()).unwrap();
    match dbar_decay_fit(&field, k) {
        Ok(fit) => assert!(fit.bins_used < 8 && fit.residual > 0.5),
        Err(e) => assert!(matches!(e, Error::InsufficientData(_))),
    }
}

#[test]
fn shell_derivatives_of_a_polynomial_extension() {
    let p = random_poly(2, 4, 5).unwrap();
    let table = CoefficientTable::from_poly(&p, 4).unwrap();
    let exp = certify_norms(&build_blocks(&table, 1.0).unwrap(), 0.5, NormGrid::default()).unwrap();
    let (ext, _) = build_extension(&exp, 0.5, Grid2D::new(1.6, 64).unwrap()).unwrap();
    let z = C::new(0.1, -0.2);
    let quad = ShellQuadrature { angular: 256, gauss: 24, panels: 4 };
    let ds = shell_derivatives(&ext, &[z], 3, quad).unwrap();
    assert!(!ds.is_empty());
    for d in ds {
        let exact = p.dz_pow(d.l).dbar_pow(d.m).eval(z);
        assert!((d.value - exact).norm() <= 1e-6 * (1.0 + exact.norm()), "l={} m={}", d.l, d.m);
    }
    assert!(shell_derivatives(&ext, &[C::new(1.0, 0.0)], 2, quad).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2048))]

    #[test]
    fn kernel_modulus_identity(order in 1usize..=12, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        prop_assume!(x.abs() + y.abs() > 1e-6);
        let z = C::new(x, y);
        let expected = z.norm().powi(order as i32 - 2) / (PI * factorial(order - 1));
        let got = vn_kernel(z, order).unwrap().norm();
        prop_assert!((got - expected).abs() <= 4.0 * f64::EPSILON * expected);
    }
}
