//! Bogoliubov pressure, its α-derivative and the depletion along an α sweep.

use sbgas::bog_pressure::{perfect_gas_pressure, Bogoliubov, ThermoPoint};
use sbgas::potential::PotentialModel;

fn main() -> sbgas::Result<()> {
    let bog = Bogoliubov::new(PotentialModel::gaussian(50.0, 0.5));
    let beta = 1.0;
    println!(
        "{:>8} {:>14} {:>14} {:>14} {:>14}",
        "alpha", "p0B(x=0)", "ideal", "p0B(x=0.05)", "depletion"
    );
    for i in 0..8 {
        let alpha = -2.0 + 0.25 * i as f64;
        let p0 = bog.p0b(ThermoPoint::new(beta, alpha, 0.0)?)?;
        let s = bog.state(ThermoPoint::new(beta, alpha, 0.05)?)?;
        println!(
            "{alpha:>8.3} {p0:>14.8e} {:>14.8e} {:>14.8e} {:>14.8e}",
            perfect_gas_pressure(beta, alpha)?,
            s.pressure,
            s.depletion
        );
    }
    Ok(())
}
