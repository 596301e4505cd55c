use polyanalytic::poly::{falling_factorial, Degree, HoloPoly};
use polyanalytic::{random_poly, ComplexScalar, Error, NAnalyticPoly};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

fn real_rows(rows: &[&[f64]]) -> NAnalyticPoly {
    NAnalyticPoly::from_coeffs(rows.iter().map(|r| r.iter().map(|&x| c(x, 0.0)).collect()).collect()).unwrap()
}

/// Direct monomial summation `Σ a_{p,q} z^q z̄^p`, independent of the Horner path.
fn eval_by_monomials(p: &NAnalyticPoly, z: ComplexScalar) -> ComplexScalar {
    let mut acc = c(0.0, 0.0);
    for (j, comp) in p.components().iter().enumerate() {
        for (q, a) in comp.coeffs().iter().enumerate() {
            acc += a * z.powu(q as u32) * z.conj().powu(j as u32);
        }
    }
    acc
}

#[test]
fn eval_examples() {
    assert_eq!(real_rows(&[&[1.0], &[1.0]]).eval(c(0.0, 1.0)), c(1.0, -1.0));
    assert_eq!(NAnalyticPoly::zero(3).eval(c(0.3, -2.0)), c(0.0, 0.0));
    assert_eq!(real_rows(&[&[0.0, 0.0, 1.0], &[], &[1.0]]).eval(c(2.0, 0.0)), c(8.0, 0.0));
}

#[test]
fn degree_examples() {
    assert_eq!(NAnalyticPoly::zero(2).degree(), Degree::NegInf);
    assert_eq!(real_rows(&[&[], &[], &[1.0]]).degree(), Degree::Finite(0));
    assert_eq!(real_rows(&[&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0], &[0.0, 0.0, 1.0]]).degree(), Degree::Finite(5));
    assert!(Degree::NegInf < Degree::Finite(0));
    assert!(Degree::NegInf.at_most(0));
}

#[test]
fn wirtinger_examples() {
    let zbar = real_rows(&[&[], &[1.0]]);
    assert_eq!(zbar.dbar_pow(1), real_rows(&[&[1.0]]));
    assert!(zbar.dz_pow(1).is_zero());

    let z_zbar2 = real_rows(&[&[], &[], &[0.0, 1.0]]);
    assert_eq!(z_zbar2.dbar_pow(1), real_rows(&[&[], &[0.0, 2.0]]));

    let z2 = real_rows(&[&[0.0, 0.0, 1.0]]);
    assert_eq!(z2.dz_pow(1), real_rows(&[&[0.0, 2.0]]));

    let z2_zbar = real_rows(&[&[], &[0.0, 0.0, 1.0]]);
    assert_eq!(z2_zbar.dz_pow(2), real_rows(&[&[], &[2.0]]));
}

#[test]
fn random_poly_examples() {
    assert_eq!(random_poly(3, 7, 42).unwrap(), random_poly(3, 7, 42).unwrap());
    let p = random_poly(4, 0, 9).unwrap();
    assert!(p.components().iter().all(|q| q.degree().at_most(0)));
    assert!(matches!(random_poly(0, 3, 1), Err(Error::InvalidInput(_))));
}

#[test]
fn falling_factorial_is_exact() {
    assert_eq!(falling_factorial(7, 3), 210.0);
    assert_eq!(falling_factorial(2, 3), 0.0);
    assert_eq!(falling_factorial(5, 0), 1.0);
}

#[test]
fn component_index_is_checked() {
    let p = real_rows(&[&[1.0], &[0.0, 1.0]]);
    assert_eq!(p.component(1).unwrap(), &HoloPoly::from_real(&[0.0, 1.0]));
    assert!(matches!(p.component(2), Err(Error::IndexOutOfRange { index: 2, order: 2 })));
}

fn poly_strategy() -> impl Strategy<Value = NAnalyticPoly> {
    (1usize..=4, 0usize..=10, any::<u64>()).prop_map(|(n, d, s)| random_poly(n, d, s).unwrap())
}

/// Gaussian-integer coefficients keep every derivative rearrangement exact in floating point.
fn integer_poly() -> impl Strategy<Value = NAnalyticPoly> {
    prop::collection::vec(prop::collection::vec((-50i32..50, -50i32..50), 0..10), 1..=4).prop_map(|rows| {
        NAnalyticPoly::from_coeffs(rows.into_iter().map(|r| r.into_iter().map(|(a, b)| c(a as f64, b as f64)).collect()).collect())
            .unwrap()
    })
}

fn point() -> impl Strategy<Value = ComplexScalar> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(x, y)| c(x, y))
}

proptest! {
    #[test]
    fn horner_matches_monomial_sum(p in poly_strategy(), z in point()) {
        let a = p.eval(z);
        let b = eval_by_monomials(&p, z);
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()) * 64.0);
    }

    #[test]
    fn eval_is_linear(p in poly_strategy(), s in any::<u64>(), z in point()) {
        let q = random_poly(p.order(), 6, s).unwrap();
        let lhs = (&p + &q).eval(z);
        let rhs = p.eval(z) + q.eval(z);
        let scale = p.eval(z).norm().max(q.eval(z).norm()).max(1.0);
        prop_assert!((lhs - rhs).norm() <= 64.0 * f64::EPSILON * scale);
    }

    #[test]
    fn dbar_to_the_order_vanishes_exactly(p in poly_strategy()) {
        prop_assert!(p.dbar_pow(p.order()).is_zero());
    }

    #[test]
    fn wirtinger_derivatives_commute(p in integer_poly()) {
        prop_assert_eq!(p.dbar_pow(1).dz_pow(1), p.dz_pow(1).dbar_pow(1));
    }

    #[test]
    fn real_direction_chain_rule(p in poly_strategy(), z in point()) {
        let h = 1e-5;
        let fd = (p.eval(z + c(h, 0.0)) - p.eval(z - c(h, 0.0))) / (2.0 * h);
        let exact = p.dz_pow(1).eval(z) + p.dbar_pow(1).eval(z);
        prop_assert!((fd - exact).norm() <= 1e-6 * exact.norm().max(1.0));
    }

    #[test]
    fn degree_of_sum_is_at_most_the_max(p in poly_strategy(), s in any::<u64>()) {
        let q = random_poly(p.order(), 4, s).unwrap();
        prop_assert!((&p + &q).degree() <= p.degree().max(q.degree()));
        prop_assert!((&p - &p).degree().is_neg_inf());
    }
}
