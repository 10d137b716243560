//! Finite-box momentum sums converging to the radial integral.

use sbgas::bog_pressure::ThermoPoint;
use sbgas::finite_volume::lattice_check;
use sbgas::potential::PotentialModel;
use sbgas::variational::Gas;

fn main() -> sbgas::Result<()> {
    let gas = Gas::new(PotentialModel::gaussian(1.0, 1.0));
    let pt = ThermoPoint::new(1.0, -1.0, 1.0)?;
    for r in lattice_check(&gas, pt, &[8.0, 16.0, 32.0, 64.0], 12.0)? {
        println!(
            "L = {:>4}  lattice = {:.10}  integral = {:.10}  error = {:.2e}",
            r.box_side, r.lattice, r.integral, r.error
        );
    }
    Ok(())
}
