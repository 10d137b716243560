//! μ_ρ and the condensate density across the plateau.

use sbgas::potential::PotentialModel;
use sbgas::variational::{Gas, MuScan};

fn main() -> sbgas::Result<()> {
    let gas = Gas::new(PotentialModel::gaussian(50.0, 0.5));
    let beta = 1.0;
    let tr = gas.find_transition(
        beta,
        &MuScan {
            mu_min: 0.0,
            mu_max: 5.0,
            steps: 50,
        },
    )?;
    let tr = tr.expect("this coupling has a transition at β = 1");
    for i in 0..12 {
        let rho = 0.01 + 0.006 * i as f64;
        let mu = gas.mu_of_rho(beta, rho, Some(&tr))?;
        let x = gas.condensate_of_rho(beta, rho, Some(&tr))?;
        let tag = if tr.contains(rho) { "plateau" } else { "" };
        println!("ρ = {rho:.4}  μ_ρ = {mu:+.8}  x = {x:.8} {tag}");
    }
    Ok(())
}
