//! Reconstructs a compactly supported bump function at the origin from its `∂̄^N`
//! derivative with the fundamental solution of `∂̄^N`.

use polyanalytic::dynkin::{pompeiu_reconstruct, BumpFunction, Grid2D};
use polyanalytic::ComplexScalar;

fn main() -> polyanalytic::Result<()> {
    let bump = BumpFunction::standard();
    let z = ComplexScalar::new(0.1, -0.05);
    for order in 1..=3 {
        for m in [128, 256, 512] {
            let est = pompeiu_reconstruct(&|z| bump.value(z), &|z| bump.dbar_n(order, z), order, z, Grid2D::new(1.0, m)?, 1.0)?;
            println!("N={order} grid {m:>3}^2: error {:.2e}, refinement indicator {:.2e}", est.error, est.indicator);
        }
    }
    Ok(())
}
