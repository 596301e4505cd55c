//! Evaluates the explicit constants behind the max-modulus and Bernstein–Walsh estimates.

use polyanalytic::bounds::{bw_constant, check_bw, check_estm1, jm, lm, SupGrid};
use polyanalytic::{random_poly, ComplexScalar};

fn main() -> polyanalytic::Result<()> {
    println!("L_2(2)       = {}", lm(&[2.0])?);
    println!("L_3(2, 3)    = {}", lm(&[2.0, 3.0])?);
    println!("J_2(1/2, 1)  = {}", jm(2, 0.5, 1.0)?);
    for n in 1..=4 {
        println!("Bernstein–Walsh constant, N={n}: {:.4}", bw_constant(n)?);
    }
    for m in [2, 4, 8] {
        let r = check_estm1(m, 0.5)?;
        println!("m={m}, eps=0.5: {:.4e} <= {:.4e} ({})", r.lhs, r.rhs, r.holds);
    }
    let f = random_poly(2, 8, 1)?;
    let r = check_bw(&f, 8, ComplexScalar::new(0.0, 1.8), SupGrid::default())?;
    println!("|f(1.8i)| = {:.4e} <= {:.4e}", r.lhs, r.rhs);
    Ok(())
}
