//! Limiting laws of `(x, y)` at fixed density and under a tilted chemical potential.
//!
//! On the plateau `[ρ₋, ρ₊]` the law at fixed density is the two-atom mixture
//! with condensed weight `κ_ρ = (ρ − ρ₋)/(ρ₊ − ρ₋)`. At `μ_c` with tilt
//! `γ/(βV)` the normal atom carries `ξ_γ = 1/(1 + e^{γ(ρ₊ − ρ₋)})`, so the
//! tilt `γ_ρ = ln((ρ − ρ₋)/(ρ₊ − ρ))/(ρ₊ − ρ₋)` reproduces the fixed-density law.
//! Laws are symbolic: atom positions and weights, with a uniform phase on the
//! condensed atom.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::variational::{Gas, PhaseTransition};

/// Convex combination of at most two atoms in the `(x, y)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureLaw {
    pub weight_normal: f64,
    pub weight_condensed: f64,
    /// `(x, y)` of the normal atom.
    pub peak_normal: (f64, f64),
    /// `(x, y)` of the condensed atom.
    pub peak_condensed: (f64, f64),
    /// The condensate phase is uniform on `[0, 2π)`.
    pub uniform_phase: bool,
}

impl MixtureLaw {
    /// `∫x dLaw`.
    pub fn mean_condensate(&self) -> f64 {
        self.weight_normal * self.peak_normal.0 + self.weight_condensed * self.peak_condensed.0
    }

    /// `∫(x + y) dLaw`.
    pub fn mean_density(&self) -> f64 {
        self.weight_normal * (self.peak_normal.0 + self.peak_normal.1)
            + self.weight_condensed * (self.peak_condensed.0 + self.peak_condensed.1)
    }

    fn single(peak: (f64, f64)) -> Self {
        let condensed = peak.0 > 0.0;
        MixtureLaw {
            weight_normal: if condensed { 0.0 } else { 1.0 },
            weight_condensed: if condensed { 1.0 } else { 0.0 },
            peak_normal: if condensed { (0.0, 0.0) } else { peak },
            peak_condensed: if condensed { peak } else { (0.0, 0.0) },
            uniform_phase: condensed,
        }
    }
}

fn check_gap(tr: &PhaseTransition) -> Result<f64> {
    let gap = tr.rho_plus - tr.rho_minus;
    if !(gap > 0.0) {
        return Err(Error::domain(format!(
            "degenerate plateau: ρ₊ − ρ₋ = {gap}"
        )));
    }
    Ok(gap)
}

/// `κ_ρ`, defined on `[ρ₋, ρ₊]`.
pub fn kappa(rho: f64, tr: &PhaseTransition) -> Result<f64> {
    let gap = check_gap(tr)?;
    if !(rho >= tr.rho_minus && rho <= tr.rho_plus) {
        return Err(Error::domain(format!(
            "ρ = {rho} outside the plateau [{}, {}]",
            tr.rho_minus, tr.rho_plus
        )));
    }
    Ok((rho - tr.rho_minus) / gap)
}

/// `ξ_γ`: weight of the normal atom under tilt `γ`.
pub fn xi(gamma: f64, tr: &PhaseTransition) -> f64 {
    let t = gamma * (tr.rho_plus - tr.rho_minus);
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

/// `γ_ρ`, defined on the open plateau; diverges at both ends.
pub fn gamma_of_rho(rho: f64, tr: &PhaseTransition) -> Result<f64> {
    let gap = check_gap(tr)?;
    if !(rho > tr.rho_minus && rho < tr.rho_plus) {
        return Err(Error::domain(format!(
            "γ_ρ diverges: ρ = {rho} not inside ({}, {})",
            tr.rho_minus, tr.rho_plus
        )));
    }
    Ok(((rho - tr.rho_minus) / (tr.rho_plus - rho)).ln() / gap)
}

/// `ξ_γ ρ₋ + (1 − ξ_γ) ρ₊`.
pub fn mixture_density(gamma: f64, tr: &PhaseTransition) -> f64 {
    let w = xi(gamma, tr);
    w * tr.rho_minus + (1.0 - w) * tr.rho_plus
}

/// Two-atom law at `μ_c` under tilt `γ`.
pub fn tilted_law(gamma: f64, tr: &PhaseTransition) -> MixtureLaw {
    let w = xi(gamma, tr);
    MixtureLaw {
        weight_normal: w,
        weight_condensed: 1.0 - w,
        peak_normal: (0.0, tr.rho_minus),
        peak_condensed: (tr.x_plus, tr.y_plus),
        uniform_phase: true,
    }
}

/// Limiting law of `(x, y)` at fixed density `ρ`.
pub fn limit_measure(
    gas: &Gas,
    beta: f64,
    rho: f64,
    transition: Option<&PhaseTransition>,
) -> Result<MixtureLaw> {
    if !(rho > 0.0) {
        return Err(Error::domain(format!("ρ must be positive, got {rho}")));
    }
    match transition {
        Some(tr) if tr.contains(rho) => {
            let k = kappa(rho, tr)?;
            Ok(MixtureLaw {
                weight_normal: 1.0 - k,
                weight_condensed: k,
                peak_normal: (0.0, tr.rho_minus),
                peak_condensed: (tr.x_plus, tr.y_plus),
                uniform_phase: true,
            })
        }
        Some(tr) if rho < tr.rho_minus => {
            let s = gas.normal_branch(beta, gas.mu_of_rho(beta, rho, transition)?)?;
            Ok(MixtureLaw::single((0.0, s.y_star)))
        }
        Some(tr) => {
            let s = gas.condensed_saddle_of_rho(beta, rho, tr)?;
            Ok(MixtureLaw::single((s.x_star, s.y_star)))
        }
        None => {
            let mu = gas.mu_of_rho(beta, rho, None)?;
            let s = *gas.pressure_sb(beta, mu)?.dominant();
            Ok(MixtureLaw::single((s.x_star, s.y_star)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr() -> PhaseTransition {
        PhaseTransition {
            beta: 1.0,
            mu_c: 1.0,
            rho_minus: 0.2,
            rho_plus: 0.5,
            x_plus: 0.25,
            y_plus: 0.25,
            alpha_minus: -0.1,
            alpha_plus: -0.5,
            pressure: 0.3,
            pressure_gap: 0.0,
        }
    }

    #[test]
    fn kappa_endpoints() {
        let t = tr();
        assert_eq!(kappa(0.2, &t).unwrap(), 0.0);
        assert_eq!(kappa(0.5, &t).unwrap(), 1.0);
        assert!((kappa(0.35, &t).unwrap() - 0.5).abs() < 1e-15);
        assert!(kappa(0.6, &t).is_err());
    }

    #[test]
    fn xi_limits() {
        let t = tr();
        assert_eq!(xi(0.0, &t), 0.5);
        assert!((xi(-1e4, &t) - 1.0).abs() < 1e-15);
        assert!(xi(1e4, &t) < 1e-300);
        assert!((mixture_density(1e4, &t) - t.rho_plus).abs() < 1e-15);
        assert!((mixture_density(0.0, &t) - 0.35).abs() < 1e-15);
    }

    #[test]
    fn gamma_diverges_at_ends() {
        let t = tr();
        assert!(gamma_of_rho(0.2, &t).is_err());
        assert!(gamma_of_rho(0.5, &t).is_err());
        assert!(gamma_of_rho(0.35, &t).unwrap().abs() < 1e-12);
        let g: Vec<f64> = [1e-3, 1e-6, 1e-9]
            .iter()
            .map(|e| gamma_of_rho(0.2 + e, &t).unwrap())
            .collect();
        assert!(g[0] > g[1] && g[1] > g[2]);
    }

    #[test]
    fn symbolic_law_expectations() {
        let t = tr();
        let gas = Gas::new(crate::potential::PotentialModel::gaussian(1.0, 1.0));
        let law = limit_measure(&gas, 1.0, 0.35, Some(&t)).unwrap();
        assert!((law.weight_normal - 0.5).abs() < 1e-15);
        assert!((law.mean_condensate() - 0.125).abs() < 1e-15);
        assert!((law.mean_density() - 0.35).abs() < 1e-15);
    }
}
