use sbgas::finite_volume::{quasi_average, FreeEnergyField};
use sbgas::kac_mixture::gamma_of_rho;
use sbgas::potential::PotentialModel;
use sbgas::rates::superstability_bound;
use sbgas::variational::{Gas, MuScan, PhaseTransition};

const VOLUMES: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

fn setup() -> (Gas, PhaseTransition, f64) {
    let gas = Gas::new(PotentialModel::gaussian(50.0, 0.5));
    let tr = gas
        .find_transition(
            1.0,
            &MuScan {
                mu_min: 0.0,
                mu_max: 5.0,
                steps: 50,
            },
        )
        .unwrap()
        .unwrap();
    let m = superstability_bound(&gas, 1.0, tr.mu_c).unwrap().m;
    (gas, tr, m)
}

#[test]
fn divergent_tilt_selects_one_phase() {
    let (gas, tr, m) = setup();
    let field = FreeEnergyField::uniform(&gas, 1.0, (256, 256), m, m).unwrap();
    // γ = ±√V is one admissible divergent sequence
    for sign in [-1.0, 1.0] {
        let masses: Vec<f64> = VOLUMES
            .iter()
            .map(|&v| {
                let q = quasi_average(&field, &tr, sign * v.sqrt(), v).unwrap();
                if sign < 0.0 {
                    q.mass_normal
                } else {
                    q.mass_condensed
                }
            })
            .collect();
        assert!(masses.windows(2).all(|w| w[1] > w[0]), "{masses:?}");
        assert!(masses[3] > 0.99, "{masses:?}");
    }
}

#[test]
fn mixture_mean_and_grid_refinement() {
    let (gas, tr, m) = setup();
    let rho = tr.rho_minus + 0.75 * (tr.rho_plus - tr.rho_minus);
    let g = gamma_of_rho(rho, &tr).unwrap();
    let coarse = FreeEnergyField::uniform(&gas, 1.0, (256, 256), m, m).unwrap();
    let fine = FreeEnergyField::uniform(&gas, 1.0, (384, 384), m, m).unwrap();
    let a = quasi_average(&coarse, &tr, g, 1e5).unwrap();
    let b = quasi_average(&fine, &tr, g, 1e5).unwrap();
    assert!((a.mean_density - rho).abs() < 0.02);
    assert!((b.mean_density - rho).abs() < 0.02);
    assert!(
        (a.mass_condensed - b.mass_condensed).abs() < 0.02,
        "{} vs {}",
        a.mass_condensed,
        b.mass_condensed
    );
}
