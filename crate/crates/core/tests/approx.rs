use polyanalytic::approx::{
    constructive_approximant, constructive_last_block, converse_blocks, fit_theta, minimax_estimate, minimax_sweep, ApproxFlag,
    ApproxGrid, ApproxRecord, ConverseBlocksOptions, LawsonOptions, Method,
};
use polyanalytic::corpus::CorpusFunction;
use polyanalytic::expansion::{build_blocks, certify_norms, default_radius, BlockExpansion, NormGrid};
use polyanalytic::{random_poly, ComplexScalar, Error, NAnalyticPoly};

type C = ComplexScalar;

fn small_grid() -> ApproxGrid {
    ApproxGrid { radii: 12, angles: 128 }
}

fn certified(id: &str) -> (CorpusFunction, BlockExpansion) {
    let f = CorpusFunction::parse(id).unwrap();
    let k = f.k().unwrap_or(1.0);
    let table = f.table();
    let exp = certify_norms(&build_blocks(&table, k).unwrap(), default_radius(&table, k), NormGrid::default()).unwrap();
    (f, exp)
}

fn synthetic(n: usize, e: f64) -> ApproxRecord {
    ApproxRecord {
        n,
        method: Method::Minimax,
        e_value: e,
        bound: None,
        lower_bound: None,
        iterations: 0,
        flag: ApproxFlag::Ok,
        caveat: String::new(),
        approximant: NAnalyticPoly::zero(1),
    }
}

#[test]
fn last_block_rule() {
    assert_eq!(constructive_last_block(0, 1.0), 0);
    assert_eq!(constructive_last_block(3, 1.0), 1);
    assert_eq!(constructive_last_block(4, 1.0), 2);
    assert_eq!(constructive_last_block(8, 1.0), 2);
    assert_eq!(constructive_last_block(9, 1.0), 3);
    assert_eq!(constructive_last_block(8, 2.0), 4);
}

#[test]
fn constructive_records_respect_the_bound() {
    let (f, exp) = certified("gevrey:c=1,k=1,N=1,Q=256");
    let mut previous = f64::INFINITY;
    for n in [1, 2, 4, 8, 16, 32, 64, 128] {
        let rec = constructive_approximant(&exp, n, small_grid()).unwrap();
        assert!(rec.approximant.degree().at_most(n), "n = {n}");
        assert!(rec.e_value <= rec.bound.unwrap(), "n = {n}: {} > {}", rec.e_value, rec.bound.unwrap());
        assert!(rec.e_value <= previous + 1e-10);
        previous = rec.e_value;
        let z = C::new(0.3, -0.2);
        assert!((exp.eval(z) - rec.approximant.eval(z)).norm() <= rec.e_value + 1e-12);
    }
    let rec = constructive_approximant(&exp, 100_000, small_grid()).unwrap();
    assert!(rec.e_value <= 1e-10);
    assert!((rec.approximant.eval(C::new(0.5, 0.0)) - f.poly().eval(C::new(0.5, 0.0))).norm() < 1e-12);
}

#[test]
fn constructive_needs_a_certificate() {
    let exp = build_blocks(&CorpusFunction::parse("gevrey:Q=64").unwrap().table(), 1.0).unwrap();
    assert!(matches!(constructive_approximant(&exp, 4, small_grid()), Err(Error::Uncertified)));
}

#[test]
fn minimax_reproduces_members_of_the_space() {
    let p = random_poly(2, 3, 11).unwrap();
    let rec = minimax_estimate(|z| p.eval(z), 2, 3, small_grid()).unwrap();
    assert!(rec.e_value <= 1e-10);
    assert!(rec.iterations <= 200);
    let z = C::new(-0.4, 0.5);
    assert!((rec.approximant.eval(z) - p.eval(z)).norm() <= 1e-9);
}

#[test]
fn conjugate_examples() {
    let rec = minimax_estimate(|z| z.conj(), 2, 0, small_grid()).unwrap();
    assert!(rec.e_value <= 1e-10);

    for n in [0, 3, 8] {
        let rec = minimax_estimate(|z| z.conj(), 1, n, ApproxGrid::default()).unwrap();
        // For holomorphic P the circle mean of (z̄ - P(z)) z equals 1, so sup |z̄ - P| ≥ 1.
        let m = 1024;
        let mean: C = (0..m)
            .map(|j| {
                let z = C::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
                (z.conj() - rec.approximant.eval(z)) * z
            })
            .sum::<C>()
            / m as f64;
        assert!((mean - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!(rec.e_value >= 0.95 && rec.e_value <= 1.0 + 1e-9, "n = {n}: {}", rec.e_value);
    }
}

#[test]
fn minimax_is_monotone_and_below_constructive() {
    let (f, exp) = certified("gevrey:c=1,k=1,N=1,Q=256");
    let poly = f.poly();
    let ns = [2, 4, 6, 8, 12, 16];
    let records = minimax_sweep(|z| poly.eval(z), 1, &ns, small_grid(), &LawsonOptions::default()).unwrap();
    for w in records.windows(2) {
        assert!(w[1].e_value <= w[0].e_value * 1.02 + 1e-10, "{} then {}", w[0].e_value, w[1].e_value);
    }
    for rec in &records {
        let constructive = constructive_approximant(&exp, rec.n, small_grid()).unwrap();
        assert!(rec.e_value <= constructive.e_value * 1.02 + 1e-10, "n = {}", rec.n);
        if let Some(lower) = rec.lower_bound {
            assert!(lower <= rec.e_value * (1.0 + 1e-9));
        }
    }
}

#[test]
fn theta_fit_examples() {
    let records: Vec<_> = (1..=40).map(|n| synthetic(n, 2.0 * (-0.5 * (n as f64).sqrt()).exp())).collect();
    let fit = fit_theta(&records, 1.0).unwrap();
    assert!((fit.alpha - 2.0).abs() < 0.02 && (fit.beta - 0.5).abs() < 0.005 && fit.accepted);

    let harmonic: Vec<_> = (1..=40).map(|n| synthetic(n, 1.0 / n as f64)).collect();
    match fit_theta(&harmonic, 1.0) {
        Ok(fit) => assert!(!fit.accepted),
        Err(e) => assert!(matches!(e, Error::NegativeBeta { .. })),
    }

    assert!(matches!(fit_theta(&records[..5], 1.0), Err(Error::InsufficientData(_))));
}

#[test]
fn constructive_records_fit_a_positive_rate() {
    let (_, exp) = certified("gevrey:c=1,k=1,N=1,Q=256");
    let records: Vec<_> =
        (1..=64).step_by(4).map(|n| constructive_approximant(&exp, n, small_grid()).unwrap()).collect();
    assert!(fit_theta(&records, 1.0).unwrap().beta > 0.0);
}

#[test]
fn constant_approximants_are_accepted() {
    let w0 = NAnalyticPoly::from_coeffs(vec![vec![C::new(0.7, -0.1)], vec![C::new(0.2, 0.0)]]).unwrap();
    let w = vec![w0; 40];
    let errors = vec![0.0; 40];
    let report = converse_blocks(&w, &errors, 1.0, 1.0, &ConverseBlocksOptions::default()).unwrap();
    assert!(report.norms.iter().all(|b| b.direct == 0.0));
    assert!(report.extrapolation_holds && report.accepted);
}

#[test]
fn converse_blocks_rejects_bad_sequences() {
    let w = vec![NAnalyticPoly::monomial(1, 3, 0, C::new(1.0, 0.0)).unwrap(); 4];
    assert!(matches!(converse_blocks(&w, &[0.0; 4], 1.0, 1.0, &ConverseBlocksOptions::default()), Err(Error::InvalidInput(_))));
    assert!(matches!(converse_blocks(&[], &[], 1.0, 1.0, &ConverseBlocksOptions::default()), Err(Error::InsufficientData(_))));
    assert!(converse_blocks(&w[..1], &[0.0; 2], 1.0, 1.0, &ConverseBlocksOptions::default()).is_err());
}

#[test]
fn minimax_sequence_of_a_member_passes_the_converse() {
    let f = CorpusFunction::parse("gevrey:c=1,k=1,N=1,Q=128").unwrap();
    let poly = f.poly();
    let ns: Vec<usize> = (0..48).collect();
    let records = minimax_sweep(|z| poly.eval(z), 1, &ns, small_grid(), &LawsonOptions::default()).unwrap();
    let w: Vec<NAnalyticPoly> = records.iter().map(|r| r.approximant.clone()).collect();
    let errors: Vec<f64> = records.iter().map(|r| r.e_value).collect();
    let report = converse_blocks(&w, &errors, 1.0, 1.0, &ConverseBlocksOptions::default()).unwrap();
    assert!(report.extrapolation_holds);
    assert!(report.accepted);
}
