//! Admissibility and moment diagnostics for the three potential families.

use sbgas::potential::PotentialModel;

fn main() -> sbgas::Result<()> {
    let models = [
        PotentialModel::gaussian(50.0, 0.5),
        PotentialModel::flat_cutoff(2.0, 3.0),
        PotentialModel::rational(2.0, 1.0),
    ];
    for m in &models {
        let r = m.validate()?;
        println!(
            "{:<12} valid={} ∫k²λ² = {:.6e} tail exponent = {:?}",
            m.family.name(),
            r.valid,
            r.quadratic_moment_total,
            r.tail_exponent
        );
    }
    // a potential with λ(0) ≤ 0 is rejected
    let bad = PotentialModel::gaussian(-1.0, 1.0);
    println!("negative λ₀: {}", bad.validate().unwrap_err());
    Ok(())
}
