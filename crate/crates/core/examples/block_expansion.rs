//! Splits a Gevrey coefficient table into blocks, certifies their norms on the dilated
//! disks, sums the series back and runs the converse membership check.

use polyanalytic::corpus::CorpusFunction;
use polyanalytic::expansion::{build_blocks, certify_norms, converse_verify, default_radius, synthesize, NormGrid};
use polyanalytic::ComplexScalar;

fn main() -> polyanalytic::Result<()> {
    let f = CorpusFunction::parse("gevrey:c=1,k=1,N=2,Q=256")?;
    let table = f.table();
    let k = 1.0;
    let r = default_radius(&table, k);
    let exp = certify_norms(&build_blocks(&table, k)?, r, NormGrid::default())?;
    let cert = exp.certificate()?;
    println!("{} blocks, R={r:.3}: |P_n| <= {:.3} * {:.4}^n (residual {:.3})", exp.blocks.len(), cert.c, cert.delta, cert.residual);

    let z = ComplexScalar::new(0.4, 0.3);
    let exact = f.poly().eval(z);
    for n in [4, 8, 16] {
        let s = synthesize(&exp, z, n)?;
        println!("n={n:>2}: error {:.2e}, certified tail {:.2e}", (s.value - exact).norm(), s.tail_bound);
    }

    let report = converse_verify(&exp, k, NormGrid::default())?;
    println!("converse: chain holds {}, limit accepted {}", report.chain_holds, report.accepted);
    Ok(())
}
