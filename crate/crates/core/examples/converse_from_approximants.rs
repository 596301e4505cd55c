//! Rebuilds a certified block expansion from a sequence of minimax approximants and checks
//! that its limit lies in the Gevrey class.

use polyanalytic::approx::{converse_blocks, minimax_sweep, ApproxGrid, ConverseBlocksOptions, LawsonOptions};
use polyanalytic::corpus::CorpusFunction;

fn main() -> polyanalytic::Result<()> {
    let f = CorpusFunction::parse("gevrey:c=1,k=1,N=1,Q=128")?;
    let poly = f.poly();
    let ns: Vec<usize> = (0..64).collect();
    let records = minimax_sweep(|z| poly.eval(z), 1, &ns, ApproxGrid { radii: 12, angles: 128 }, &LawsonOptions::default())?;
    let w: Vec<_> = records.iter().map(|r| r.approximant.clone()).collect();
    let errors: Vec<f64> = records.iter().map(|r| r.e_value).collect();
    let report = converse_blocks(&w, &errors, 1.0, 1.0, &ConverseBlocksOptions::default())?;
    println!("{} Y blocks, ratio {:?} (target {:.4})", report.norms.len(), report.ratio, report.target_ratio);
    println!("direct norms within extrapolated bounds: {}", report.extrapolation_holds);
    println!("accepted: {}", report.accepted);
    Ok(())
}
