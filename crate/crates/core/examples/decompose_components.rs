//! Recovers the holomorphic components of a random 3-analytic polynomial from samples on
//! three concentric circles.

use polyanalytic::decompose::{components_from_circles, recommended_samples, sample_circle, straddling_radii};
use polyanalytic::random_poly;

fn main() -> polyanalytic::Result<()> {
    let (order, degree) = (3, 24);
    let f = random_poly(order, degree, 2024)?;
    let m = recommended_samples(degree, order);
    let samples = straddling_radii(order)
        .iter()
        .map(|&r| sample_circle(|z| f.eval(z), r, m))
        .collect::<polyanalytic::Result<Vec<_>>>()?;
    let d = components_from_circles(&samples, degree)?;

    let mut worst = 0.0f64;
    for p in 0..order {
        for q in 0..=degree {
            worst = worst.max((d.table.get(p, q) - f.coeff(p, q)).norm());
        }
    }
    println!("N={order}, degree {degree}, {m} samples on radii {:?}", d.radii);
    println!("largest coefficient error {worst:.2e}, condition {:.2e}", d.condition);
    Ok(())
}
