//! Locate the first-order transition and print the density jump.

use sbgas::potential::PotentialModel;
use sbgas::variational::{Gas, MuScan};

fn main() -> sbgas::Result<()> {
    let gas = Gas::new(PotentialModel::gaussian(50.0, 0.5));
    let beta = 1.0;
    let scan = MuScan {
        mu_min: 0.0,
        mu_max: 5.0,
        steps: 50,
    };
    let Some(tr) = gas.find_transition(beta, &scan)? else {
        println!("no transition in [{}, {}]", scan.mu_min, scan.mu_max);
        return Ok(());
    };
    println!("μ_c  = {:.12}", tr.mu_c);
    println!("ρ₋   = {:.12}  α₋ = {:.6}", tr.rho_minus, tr.alpha_minus);
    println!("ρ₊   = {:.12}  α₊ = {:.6}", tr.rho_plus, tr.alpha_plus);
    println!("(x₊, y₊) = ({:.10}, {:.10})", tr.x_plus, tr.y_plus);
    println!("pressure gap at μ_c: {:.2e}", tr.pressure_gap);
    for mu in [tr.mu_c - 0.2, tr.mu_c + 0.2] {
        let s = *gas.pressure_sb(beta, mu)?.dominant();
        println!(
            "μ = {mu:.4}: ρ = {:.8} x = {:.8} ({:?})",
            s.density(),
            s.x_star,
            s.branch
        );
    }
    Ok(())
}
