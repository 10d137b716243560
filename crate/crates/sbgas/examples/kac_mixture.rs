//! Fixed-density two-atom law and the tilt that reproduces it.

use sbgas::kac_mixture::{gamma_of_rho, limit_measure, mixture_density, tilted_law};
use sbgas::potential::PotentialModel;
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
    for k in [0.1, 0.5, 0.9] {
        let rho = tr.rho_minus + k * (tr.rho_plus - tr.rho_minus);
        let law = limit_measure(&gas, beta, rho, Some(&tr))?;
        let g = gamma_of_rho(rho, &tr)?;
        let tilted = tilted_law(g, &tr);
        println!(
            "ρ = {rho:.6}  weights ({:.4}, {:.4})  γ_ρ = {g:+.4}  tilted ({:.4}, {:.4})  ρ(γ_ρ) = {:.6}",
            law.weight_normal,
            law.weight_condensed,
            tilted.weight_normal,
            tilted.weight_condensed,
            mixture_density(g, &tr)
        );
    }
    Ok(())
}
