//! Fits the coefficient decay law `|a_p| ≤ α exp(-β p^{k/(k+1)})` and evaluates the
//! infimum formula used to derive it.

use polyanalytic::gevrey::{fit_decay, lemma_infimum, lemma_rp};

fn main() -> polyanalytic::Result<()> {
    let k = 2.0;
    let moduli: Vec<f64> = (0..400).map(|p| 3.0 * (-0.7 * (p as f64).powf(k / (k + 1.0))).exp()).collect();
    let m = fit_decay(&moduli, k)?;
    println!("stretched decay: alpha={:.4} beta={:.4} residual={:.1e} accepted={}", m.alpha, m.beta, m.residual, m.accepted);

    let harmonic: Vec<f64> = (0..400).map(|p| 1.0 / (p as f64 + 1.0)).collect();
    match fit_decay(&harmonic, k) {
        Ok(m) => println!("1/(p+1): beta={:.4} accepted={}", m.beta, m.accepted),
        Err(e) => println!("1/(p+1): {}", e.code()),
    }

    for p in [10, 100, 1000, 10_000] {
        println!("p={p:>5}: r_p={} infimum={:.4e}", lemma_rp(p, 1.0, 1.0), lemma_infimum(p, 1.0, 1.0));
    }
    Ok(())
}
