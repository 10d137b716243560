//! Brute-force search over coupling strength and β for a transition with a
//! density jump whose normal phase lies off the α = 0 boundary.

use sbgas::potential::PotentialModel;
use sbgas::variational::{Gas, MuScan};

fn main() -> sbgas::Result<()> {
    let scan = MuScan {
        mu_min: 0.0,
        mu_max: 5.0,
        steps: 50,
    };
    for lambda0 in [10.0, 25.0, 50.0] {
        let gas = Gas::new(PotentialModel::gaussian(lambda0, 0.5));
        for beta in [0.5, 1.0, 2.0] {
            match gas.find_transition(beta, &scan) {
                Ok(Some(tr)) => {
                    let usable = tr.rho_plus > tr.rho_minus && tr.alpha_minus < 0.0;
                    println!(
                        "λ₀ = {lambda0:>4} β = {beta:.1}: μ_c = {:.6} ρ± = ({:.6}, {:.6}) α₋ = {:+.4}{}",
                        tr.mu_c,
                        tr.rho_minus,
                        tr.rho_plus,
                        tr.alpha_minus,
                        if usable { "" } else { "  (normal phase pinned at α = 0)" }
                    );
                }
                Ok(None) => println!("λ₀ = {lambda0:>4} β = {beta:.1}: no transition in [0, 5]"),
                Err(e) => println!("λ₀ = {lambda0:>4} β = {beta:.1}: {e}"),
            }
        }
    }
    Ok(())
}
