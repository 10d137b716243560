//! Zeros of K_μ below, at and above μ_c, and of D_ρ on the plateau.

use sbgas::potential::PotentialModel;
use sbgas::rates::{superstability_bound, tabulate_d, tabulate_k, CondensateRate, JointRate};
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
    for mu in [tr.mu_c - 0.3, tr.mu_c, tr.mu_c + 0.3] {
        let m = superstability_bound(&gas, beta, mu)?.m;
        let grid = tabulate_k(&JointRate::new(&gas, beta, mu)?, 96, 96, m, m)?;
        let zeros: Vec<_> = grid
            .minimizers
            .iter()
            .map(|z| (z.x, z.y.unwrap_or(0.0)))
            .collect();
        let min = grid
            .minimizers
            .iter()
            .map(|z| z.value)
            .fold(f64::INFINITY, f64::min);
        println!("μ = {mu:.5}  min K = {min:+.1e}  zeros {zeros:.6?}");
    }
    let rho = 0.5 * (tr.rho_minus + tr.rho_plus);
    let rate = CondensateRate::new(&gas, beta, rho, Some(&tr))?;
    let grid = tabulate_d(&rate, 200, 0.1)?;
    let zeros: Vec<f64> = grid.minimizers.iter().map(|z| z.x).collect();
    println!("ρ = {rho:.5} (plateau)  zeros of D {zeros:.6?}");
    Ok(())
}
