//! Pressure of the Bogoliubov-approximated gas at fixed condensate density.
//!
//! With `ε_k = k²`, the quasiparticle spectrum is
//! `f_k = ε_k − α + xλ_k`, `E_k = √((ε_k − α)(ε_k − α + 2xλ_k))` and
//!
//! ```text
//! p₀ᴮ(β, α, x) = αx − (1/β) ∫ ln(1 − e^{−βE_k}) d³k/(2π)³
//!               + ½ ∫ (f_k − E_k) d³k/(2π)³
//! ```
//!
//! All integrals are radial and evaluated by adaptive Gauss–Kronrod
//! quadrature on `[0, k_s] ∪ [k_s, ∞)`. Every difference that cancels
//! catastrophically at large `k` is rewritten in a stable form
//! (`f − E = x²λ²/(f + E)` and friends).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::quad::{integrate_half_line_with_breaks, QuadConfig};
use crate::special::polylog_exp;

/// Inverse temperature, effective chemical potential and condensate density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoPoint {
    pub beta: f64,
    pub alpha: f64,
    pub x: f64,
}

impl ThermoPoint {
    pub fn new(beta: f64, alpha: f64, x: f64) -> Result<Self> {
        let pt = ThermoPoint { beta, alpha, x };
        pt.check()?;
        Ok(pt)
    }

    fn check(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::domain(format!(
                "β must be positive, got {}",
                self.beta
            )));
        }
        if !(self.alpha <= 0.0) {
            return Err(Error::domain(format!("α must be ≤ 0, got {}", self.alpha)));
        }
        if !(self.x >= 0.0) || !self.x.is_finite() {
            return Err(Error::domain(format!("x must be ≥ 0, got {}", self.x)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiparticleSpectrum {
    pub f: f64,
    pub e: f64,
}

/// `(f_k, E_k)` at wavenumber `k`.
pub fn quasiparticle_energy(
    pt: ThermoPoint,
    k: f64,
    model: &PotentialModel,
) -> Result<QuasiparticleSpectrum> {
    pt.check()?;
    let l = model.lambda_k(k)?;
    let u = k * k - pt.alpha;
    let xl = pt.x * l;
    Ok(QuasiparticleSpectrum {
        f: u + xl,
        e: (u * (u + 2.0 * xl)).sqrt(),
    })
}

/// Pressure, its α- and x-derivatives, and the out-of-condensate density at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogoliubovState {
    pub pressure: f64,
    /// `∂p₀ᴮ/∂α = x + depletion`
    pub dalpha: f64,
    pub dx: f64,
    pub depletion: f64,
}

// d³k/(2π)³ = k² dk / (2π²)
const RADIAL: f64 = 1.0 / (2.0 * PI * PI);

/// Per-mode contributions at one `k`, before the radial measure.
#[derive(Debug, Clone, Copy)]
struct Mode {
    thermal: f64,
    zero_point: f64,
    depletion: f64,
    dx: f64,
}

#[inline]
fn mode(beta: f64, alpha: f64, x: f64, k: f64, l: f64) -> Mode {
    let u = k * k - alpha;
    let xl = x * l;
    let e = (u * (u + 2.0 * xl)).sqrt();
    if e <= 0.0 {
        return Mode {
            thermal: 0.0,
            zero_point: 0.0,
            depletion: 0.0,
            dx: 0.0,
        };
    }
    let f = u + xl;
    let be = beta * e;
    let (thermal, occupation) = if be > 700.0 {
        let z = (-be).exp();
        (z / beta, z)
    } else {
        (-(-(-be).exp()).ln_1p() / beta, 1.0 / be.exp_m1())
    };
    let zero_point = 0.5 * xl * xl / (f + e);
    let depletion = f * occupation / e + xl * xl / (2.0 * e * (f + e));
    let dx = xl * l * u / (e * (e + u)) - occupation * u * l / e;
    Mode {
        thermal,
        zero_point,
        depletion,
        dx,
    }
}

/// Evaluator for the Bogoliubov pressure of a fixed potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bogoliubov {
    pub model: PotentialModel,
    pub quad: QuadConfig,
}

impl Bogoliubov {
    pub fn new(model: PotentialModel) -> Self {
        Bogoliubov {
            model,
            quad: QuadConfig::default(),
        }
    }

    pub fn with_quad(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    fn breaks(&self, pt: &ThermoPoint) -> (Vec<f64>, f64) {
        let k_s = (pt.x * self.model.lambda0).sqrt().max(1.0);
        let mut pts: Vec<f64> = self.model.kinks();
        pts.push(k_s);
        pts.push(self.model.scale());
        pts.push((1.0 / pt.beta).sqrt());
        pts.push((-pt.alpha).sqrt());
        pts.retain(|&p| p > 0.0 && p.is_finite());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let split = pts.iter().cloned().fold(k_s, f64::max);
        pts.retain(|&p| p < split);
        (pts, split)
    }

    fn integrate<F, const N: usize>(&self, pt: &ThermoPoint, f: F) -> Result<[f64; N]>
    where
        F: Fn(Mode) -> [f64; N],
    {
        pt.check()?;
        let (breaks, split) = self.breaks(pt);
        let ThermoPoint { beta, alpha, x } = *pt;
        let model = self.model;
        integrate_half_line_with_breaks(
            |k| {
                let w = k * k * RADIAL;
                let mut v = f(mode(beta, alpha, x, k, model.eval(k)));
                for c in v.iter_mut() {
                    *c *= w;
                }
                v
            },
            &breaks,
            split,
            &self.quad,
        )
    }

    /// `p₀ᴮ(β, α, x)`.
    pub fn p0b(&self, pt: ThermoPoint) -> Result<f64> {
        let [v] = self.integrate(&pt, |m| [m.thermal + m.zero_point])?;
        Ok(pt.alpha * pt.x + v)
    }

    /// Density of particles outside the zero mode.
    pub fn depletion_density(&self, pt: ThermoPoint) -> Result<f64> {
        let [v] = self.integrate(&pt, |m| [m.depletion])?;
        Ok(v)
    }

    /// `∂p₀ᴮ/∂α = x + depletion`.
    pub fn p0b_dalpha(&self, pt: ThermoPoint) -> Result<f64> {
        Ok(pt.x + self.depletion_density(pt)?)
    }

    /// `∂p₀ᴮ/∂x`.
    pub fn p0b_dx(&self, pt: ThermoPoint) -> Result<f64> {
        let [v] = self.integrate(&pt, |m| [m.dx])?;
        Ok(pt.alpha + v)
    }

    /// All quantities at once, sharing quadrature panels.
    pub fn state(&self, pt: ThermoPoint) -> Result<BogoliubovState> {
        let [p, d, dx] = self.integrate(&pt, |m| [m.thermal + m.zero_point, m.depletion, m.dx])?;
        Ok(BogoliubovState {
            pressure: pt.alpha * pt.x + p,
            dalpha: pt.x + d,
            dx: pt.alpha + dx,
            depletion: d,
        })
    }

    /// Pressure integral without the `αx` term, together with the depletion density.
    pub fn excess_and_depletion(&self, pt: ThermoPoint) -> Result<(f64, f64)> {
        let [p, d] = self.integrate(&pt, |m| [m.thermal + m.zero_point, m.depletion])?;
        Ok((p, d))
    }

    /// Separate thermal and zero-point parts of the pressure integral (no `αx`).
    pub fn pressure_parts(&self, pt: ThermoPoint) -> Result<(f64, f64)> {
        let [t, z] = self.integrate(&pt, |m| [m.thermal, m.zero_point])?;
        Ok((t, z))
    }
}

fn check_ideal(beta: f64, alpha: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("β must be positive, got {beta}")));
    }
    if !(alpha <= 0.0) {
        return Err(Error::domain(format!("α must be ≤ 0, got {alpha}")));
    }
    Ok(())
}

/// Pressure of the free Bose gas with `ε_k = k²`:
/// `(4πβ)^{-3/2} β^{-1} Li_{5/2}(e^{βα})`.
pub fn perfect_gas_pressure(beta: f64, alpha: f64) -> Result<f64> {
    check_ideal(beta, alpha)?;
    if alpha == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(polylog_exp(2.5, -beta * alpha) / (beta * (4.0 * PI * beta).powf(1.5)))
}

/// Particle density of the free Bose gas: `(4πβ)^{-3/2} Li_{3/2}(e^{βα})`.
pub fn perfect_gas_density(beta: f64, alpha: f64) -> Result<f64> {
    check_ideal(beta, alpha)?;
    if alpha == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(polylog_exp(1.5, -beta * alpha) / (4.0 * PI * beta).powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> Bogoliubov {
        Bogoliubov::new(PotentialModel::gaussian(1.0, 1.0))
    }

    #[test]
    fn spectrum_examples() {
        let g = PotentialModel::gaussian(1.0, 1.0);
        let s = quasiparticle_energy(ThermoPoint::new(1.0, -1.0, 0.0).unwrap(), 1.0, &g).unwrap();
        assert_eq!((s.f, s.e), (2.0, 2.0));
        let s = quasiparticle_energy(ThermoPoint::new(1.0, 0.0, 1.0).unwrap(), 0.0, &g).unwrap();
        assert_eq!((s.f, s.e), (1.0, 0.0));
        let fc = PotentialModel::flat_cutoff(1.0, 2.0);
        let s = quasiparticle_energy(ThermoPoint::new(1.0, -1.0, 1.0).unwrap(), 1.0, &fc).unwrap();
        assert_eq!(s.f, 3.0);
        assert!((s.e - 8f64.sqrt()).abs() < 1e-15);
        assert!((s.e - 2.828_427_1).abs() < 1e-7);
        // both algebraic forms: √(f² − x²λ²)
        assert!((s.e - (s.f * s.f - 1.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn positive_alpha_is_rejected() {
        let g = gauss();
        assert!(ThermoPoint::new(1.0, 0.1, 1.0).is_err());
        let bad = ThermoPoint {
            beta: 1.0,
            alpha: 0.1,
            x: 1.0,
        };
        assert!(matches!(g.p0b(bad), Err(Error::Domain(_))));
        assert!(perfect_gas_pressure(1.0, 0.5).is_err());
        assert!(quasiparticle_energy(bad, 1.0, &g.model).is_err());
    }

    #[test]
    fn zero_condensate_is_ideal_gas() {
        let g = gauss();
        let pt = ThermoPoint::new(1.0, -1.0, 0.0).unwrap();
        let p = g.p0b(pt).unwrap();
        let oracle = perfect_gas_pressure(1.0, -1.0).unwrap();
        assert!((p - oracle).abs() < 1e-8 * oracle, "{p} vs {oracle}");
        let d = g.p0b_dalpha(pt).unwrap();
        let rho = perfect_gas_density(1.0, -1.0).unwrap();
        assert!((d - rho).abs() < 1e-8 * rho);
        let (_, zp) = g.pressure_parts(pt).unwrap();
        assert_eq!(zp, 0.0);
    }

    #[test]
    fn ideal_gas_scaling_and_limits() {
        for &(beta, alpha) in &[(2.0, -0.3), (0.5, -3.0), (3.0, 0.0)] {
            let lhs = perfect_gas_pressure(beta, alpha).unwrap();
            let rhs = beta.powf(-2.5) * perfect_gas_pressure(1.0, beta * alpha).unwrap();
            assert!((lhs - rhs).abs() < 1e-13 * lhs);
        }
        assert_eq!(perfect_gas_pressure(1.0, f64::NEG_INFINITY).unwrap(), 0.0);
        assert!(perfect_gas_pressure(1.0, -200.0).unwrap() < 1e-80);
    }

    #[test]
    fn very_negative_alpha() {
        let g = gauss();
        let pt = ThermoPoint::new(1.0, -1e4, 1.0).unwrap();
        let p = g.p0b(pt).unwrap();
        assert!((p + 1e4).abs() <= 1e-6 * 1e4);
        let d = g.p0b_dalpha(pt).unwrap();
        assert!((d - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn gapless_boundary_is_finite() {
        let g = gauss();
        for &x in &[0.0, 0.5, 2.0] {
            let s = g.state(ThermoPoint::new(1.0, 0.0, x).unwrap()).unwrap();
            assert!(s.pressure.is_finite() && s.depletion.is_finite() && s.dx.is_finite());
        }
        let p = g.p0b(ThermoPoint::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        let oracle = perfect_gas_pressure(1.0, 0.0).unwrap();
        assert!((p - oracle).abs() < 1e-8 * oracle);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let g = gauss();
        let pt = ThermoPoint::new(1.0, -1.0, 1.0).unwrap();
        let h = 1e-4;
        let plus = g
            .p0b(ThermoPoint {
                alpha: -1.0 + h,
                ..pt
            })
            .unwrap();
        let minus = g
            .p0b(ThermoPoint {
                alpha: -1.0 - h,
                ..pt
            })
            .unwrap();
        let fd = (plus - minus) / (2.0 * h);
        assert!((g.p0b_dalpha(pt).unwrap() - fd).abs() < 1e-6);
        let hx = 1e-4;
        let plus = g.p0b(ThermoPoint { x: 1.0 + hx, ..pt }).unwrap();
        let minus = g.p0b(ThermoPoint { x: 1.0 - hx, ..pt }).unwrap();
        let fd = (plus - minus) / (2.0 * hx);
        assert!((g.p0b_dx(pt).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn depletion_freezes_out_only_without_condensate() {
        let g = gauss();
        let cold_free = g
            .depletion_density(ThermoPoint::new(100.0, -1.0, 0.0).unwrap())
            .unwrap();
        assert!(cold_free < 1e-10);
        let cold = g
            .depletion_density(ThermoPoint::new(100.0, -1.0, 1.0).unwrap())
            .unwrap();
        assert!(cold > 0.0);
    }

    #[test]
    fn state_agrees_with_single_integrals() {
        let g = Bogoliubov::new(PotentialModel::flat_cutoff(1.0, 2.0));
        let pt = ThermoPoint::new(0.7, -0.4, 0.8).unwrap();
        let s = g.state(pt).unwrap();
        assert!((s.pressure - g.p0b(pt).unwrap()).abs() < 1e-11 * s.pressure.abs());
        assert!((s.depletion - g.depletion_density(pt).unwrap()).abs() < 1e-11 * s.depletion);
        assert!((s.dx - g.p0b_dx(pt).unwrap()).abs() < 1e-10);
    }
}
