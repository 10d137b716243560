//! Free energy by Legendre transform and the exchange of sup and inf.

use sbgas::bog_pressure::ThermoPoint;
use sbgas::legendre::{double_conjugate, f0b, minimax_psi};
use sbgas::potential::PotentialModel;
use sbgas::variational::Gas;

fn main() -> sbgas::Result<()> {
    let gas = Gas::new(PotentialModel::gaussian(50.0, 0.5));
    let beta = 1.0;
    let x = 0.03;
    for y in [0.0, 0.005, 0.01, 0.02] {
        let p = f0b(&gas, beta, y, x)?;
        println!(
            "y = {y:.3}  α = {:+.6}  f0B = {:+.10e}  fSB = {:+.10e}",
            p.alpha, p.f0b, p.fsb
        );
    }
    let alpha = -0.5;
    let back = double_conjugate(&gas, beta, alpha, x)?;
    let direct = gas.bog.p0b(ThermoPoint::new(beta, alpha, x)?)?;
    println!("p0B = {direct:.12e}  biconjugate = {back:.12e}");
    let mm = minimax_psi(&gas, beta, 1.3, x)?;
    println!(
        "sup inf = {:.12e}  inf sup = {:.12e}",
        mm.sup_inf, mm.inf_sup
    );
    Ok(())
}
