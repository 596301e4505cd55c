//! Compares the constructive approximants of a certified expansion with discrete minimax
//! approximants and fits the decay law of the best-approximation error.

use polyanalytic::approx::{constructive_approximant, fit_theta, minimax_sweep, ApproxGrid, LawsonOptions};
use polyanalytic::corpus::CorpusFunction;
use polyanalytic::expansion::{build_blocks, certify_norms, default_radius, NormGrid};

fn main() -> polyanalytic::Result<()> {
    let f = CorpusFunction::parse("gevrey:c=1,k=1,N=1,Q=128")?;
    let table = f.table();
    let exp = certify_norms(&build_blocks(&table, 1.0)?, default_radius(&table, 1.0), NormGrid::default())?;
    let grid = ApproxGrid { radii: 12, angles: 128 };
    let ns: Vec<usize> = (0..=48).collect();
    let poly = f.poly();
    let minimax = minimax_sweep(|z| poly.eval(z), 1, &ns, grid, &LawsonOptions::default())?;
    let mut constructive = Vec::new();
    for &n in &ns {
        constructive.push(constructive_approximant(&exp, n, grid)?);
    }
    for n in [0, 8, 16, 32, 48] {
        println!(
            "n={n:>2}: constructive {:.3e} (bound {:.3e}), minimax {:.3e}",
            constructive[n].e_value,
            constructive[n].bound.unwrap_or(f64::NAN),
            minimax[n].e_value
        );
    }
    for (name, records) in [("constructive", &constructive), ("minimax", &minimax)] {
        let fit = fit_theta(records, 1.0)?;
        println!("{name}: E_n ~ {:.3} exp(-{:.3} sqrt(n)), accepted {}", fit.alpha, fit.beta, fit.accepted);
    }
    Ok(())
}
