//! Builds the compactly supported extension of a certified expansion and fits the decay
//! law of its `∂̄^N` toward the unit circle.

use polyanalytic::corpus::CorpusFunction;
use polyanalytic::dynkin::{build_extension, dbar_decay_fit, Grid2D};
use polyanalytic::expansion::{build_blocks, certify_norms, default_radius, NormGrid};

fn main() -> polyanalytic::Result<()> {
    let f = CorpusFunction::parse("gevrey:c=1,k=1,N=1,Q=256")?;
    let table = f.table();
    let exp = certify_norms(&build_blocks(&table, 1.0)?, default_radius(&table, 1.0), NormGrid::default())?;
    let a = exp.certificate()?.r;
    let (_, field) = build_extension(&exp, a, Grid2D::new(1.0 + a + 0.01, 512)?)?;
    let fit = dbar_decay_fit(&field, 1.0)?;
    println!("A={a:.3}, support radius {:.3}", field.support_radius);
    println!("|dbar F| <= {:.3e} exp(-{:.4} (|z|-1)^-1), residual {:.3}, {} bins", fit.c1, fit.c2, fit.residual, fit.bins_used);
    Ok(())
}
