//! Laplace-surrogate basin masses approaching the mixture as the volume grows.

use sbgas::finite_volume::{quasi_average, FreeEnergyField};
use sbgas::kac_mixture::{gamma_of_rho, kappa};
use sbgas::potential::PotentialModel;
use sbgas::rates::superstability_bound;
use sbgas::variational::{Gas, MuScan};

fn main() -> sbgas::Result<()> {
    let gas = Gas::new(PotentialModel::gaussian(50.0, 0.5));
    let beta = 1.0;
    let tr = gas
        .find_transition(
            beta,
            &MuScan {
                mu_min: 0.0,
                mu_max: 5.0,
                steps: 50,
            },
        )?
        .expect("transition");
    let m = superstability_bound(&gas, beta, tr.mu_c)?.m;
    let field = FreeEnergyField::uniform(&gas, beta, (192, 192), m, m)?;
    let rho = tr.rho_minus + 0.75 * (tr.rho_plus - tr.rho_minus);
    let g = gamma_of_rho(rho, &tr)?;
    println!("target κ = {:.4}", kappa(rho, &tr)?);
    for v in [1e2, 1e3, 1e4, 1e5] {
        let q = quasi_average(&field, &tr, g, v)?;
        println!(
            "V = {v:>8.0e}  condensed mass = {:.5}  E[x+y] = {:.6}  raw Θ = {:.3}",
            q.mass_condensed, q.mean_density, q.theta
        );
    }
    Ok(())
}
