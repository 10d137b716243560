//! Isotropic interaction potentials in momentum space.
//!
//! A potential is described by its Fourier transform `λ(k)` with
//! `0 ≤ λ(k) ≤ λ(0) = λ₀` and `λ₀ > 0`. All families are radial, so every
//! three-dimensional momentum integral reduces to `4π ∫ k² (...) dk`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_half_line, QuadConfig};

/// Shape of `λ(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `λ₀ exp(-σ²k²/2)`
    Gaussian { sigma: f64 },
    /// `λ₀` for `k ≤ k_c`, zero beyond.
    FlatCutoff { kc: f64 },
    /// `λ₀ / (1 + (k/k_r)²)`
    Rational { kr: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian { .. } => "gaussian",
            Family::FlatCutoff { .. } => "flat_cutoff",
            Family::Rational { .. } => "rational",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialModel {
    pub lambda0: f64,
    #[serde(flatten)]
    pub family: Family,
}

impl PotentialModel {
    pub fn gaussian(lambda0: f64, sigma: f64) -> Self {
        PotentialModel {
            lambda0,
            family: Family::Gaussian { sigma },
        }
    }

    pub fn flat_cutoff(lambda0: f64, kc: f64) -> Self {
        PotentialModel {
            lambda0,
            family: Family::FlatCutoff { kc },
        }
    }

    pub fn rational(lambda0: f64, kr: f64) -> Self {
        PotentialModel {
            lambda0,
            family: Family::Rational { kr },
        }
    }

    /// Evaluates `λ(k)` without argument checks. Callers guarantee `k ≥ 0`.
    #[inline]
    pub fn eval(&self, k: f64) -> f64 {
        match self.family {
            Family::Gaussian { sigma } => self.lambda0 * (-0.5 * sigma * sigma * k * k).exp(),
            Family::FlatCutoff { kc } => {
                if k <= kc {
                    self.lambda0
                } else {
                    0.0
                }
            }
            Family::Rational { kr } => {
                let q = k / kr;
                self.lambda0 / (1.0 + q * q)
            }
        }
    }

    /// `λ(k)` for a wavenumber `k ≥ 0`.
    pub fn lambda_k(&self, k: f64) -> Result<f64> {
        if !(k >= 0.0) {
            return Err(Error::domain(format!(
                "wavenumber must be nonnegative, got {k}"
            )));
        }
        Ok(self.eval(k))
    }

    /// Characteristic momentum beyond which `λ(k)` is small; used to place
    /// quadrature breakpoints.
    pub fn scale(&self) -> f64 {
        match self.family {
            Family::Gaussian { sigma } => 1.0 / sigma,
            Family::FlatCutoff { kc } => kc,
            Family::Rational { kr } => kr,
        }
    }

    /// Discontinuities of `λ(k)`, to be used as quadrature breakpoints.
    pub fn kinks(&self) -> Vec<f64> {
        match self.family {
            Family::FlatCutoff { kc } => vec![kc],
            _ => Vec::new(),
        }
    }

    /// `∫ λ(k) d³k / (2π)³`, or `None` if it diverges.
    pub fn mean_coupling(&self) -> Option<f64> {
        let l0 = self.lambda0;
        match self.family {
            Family::Gaussian { sigma } => Some(l0 / (2.0 * PI * sigma * sigma).powf(1.5)),
            Family::FlatCutoff { kc } => Some(l0 * kc.powi(3) / (6.0 * PI * PI)),
            Family::Rational { .. } => None,
        }
    }

    /// `∫ λ(k)² / (2k²) d³k / (2π)³ = ∫ λ(k)² dk / (4π²)`.
    pub fn dilute_coupling(&self) -> f64 {
        let l0 = self.lambda0;
        match self.family {
            Family::Gaussian { sigma } => l0 * l0 * PI.sqrt() / (2.0 * sigma) / (4.0 * PI * PI),
            Family::FlatCutoff { kc } => l0 * l0 * kc / (4.0 * PI * PI),
            Family::Rational { kr } => l0 * l0 * kr * PI / 4.0 / (4.0 * PI * PI),
        }
    }

    fn check_params(&self) -> Result<()> {
        if !(self.lambda0 > 0.0) || !self.lambda0.is_finite() {
            return Err(Error::InvalidPotential {
                reason: format!("λ₀ must be positive, got {}", self.lambda0),
                k: None,
            });
        }
        let (name, v) = match self.family {
            Family::Gaussian { sigma } => ("sigma", sigma),
            Family::FlatCutoff { kc } => ("kc", kc),
            Family::Rational { kr } => ("kr", kr),
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidPotential {
                reason: format!("shape parameter `{name}` must be positive, got {v}"),
                k: None,
            });
        }
        Ok(())
    }

    /// Checks the admissibility bounds and estimates the tail behaviour of
    /// `k² λ(k)` and `k² λ(k)²`.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_params()?;
        let grid = log_grid(1e-6, 1e3, 1000);
        let l0 = self.lambda0;
        if self.eval(0.0) != l0 {
            return Err(Error::InvalidPotential {
                reason: "λ(0) differs from λ₀".into(),
                k: Some(0.0),
            });
        }
        for &k in std::iter::once(&0.0).chain(grid.iter()) {
            let v = self.eval(k);
            if !(v >= 0.0 && v <= l0) {
                return Err(Error::InvalidPotential {
                    reason: format!("λ({k}) = {v} outside [0, λ₀]"),
                    k: Some(k),
                });
            }
        }

        let cfg = QuadConfig::default().with_rel_tol(1e-10);
        let cutoffs = [1e1, 1e2, 1e3];
        let mut linear = Vec::with_capacity(cutoffs.len());
        let mut quadratic = Vec::with_capacity(cutoffs.len());
        for &kmax in &cutoffs {
            let mut breaks: Vec<f64> = self.kinks().into_iter().filter(|&b| b < kmax).collect();
            breaks.push(self.scale().min(kmax * 0.5));
            breaks.sort_by(f64::total_cmp);
            let [a, b] = crate::quad::integrate_with_breaks(
                |k| {
                    let l = self.eval(k);
                    [k * k * l, k * k * l * l]
                },
                0.0,
                kmax,
                &breaks,
                &cfg,
            )?;
            linear.push(a);
            quadratic.push(b);
        }
        let [full_quadratic] = integrate_half_line(
            |k| {
                let l = self.eval(k);
                [k * k * l * l]
            },
            self.scale(),
            &cfg,
        )
        .unwrap_or([f64::INFINITY]);

        let tail_exponent = tail_decay_exponent(self, 1e2, 1e3);
        Ok(ValidationReport {
            valid: true,
            cutoffs: cutoffs.to_vec(),
            linear_moment: linear,
            quadratic_moment: quadratic,
            quadratic_moment_total: full_quadratic,
            tail_exponent,
            quadratic_tail_converges: tail_exponent.is_none_or(|p| 2.0 * p > 3.0),
        })
    }
}

/// Result of [`PotentialModel::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    /// Cutoffs `K` at which the moments were evaluated.
    pub cutoffs: Vec<f64>,
    /// `∫₀ᴷ k² λ(k) dk` per cutoff.
    pub linear_moment: Vec<f64>,
    /// `∫₀ᴷ k² λ(k)² dk` per cutoff.
    pub quadratic_moment: Vec<f64>,
    /// `∫₀^∞ k² λ(k)² dk`.
    pub quadratic_moment_total: f64,
    /// Fitted `p` in `λ(k) ~ k^(-p)` at large `k`; `None` for faster than any power.
    pub tail_exponent: Option<f64>,
    pub quadratic_tail_converges: bool,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn tail_decay_exponent(model: &PotentialModel, k1: f64, k2: f64) -> Option<f64> {
    let (l1, l2) = (model.eval(k1), model.eval(k2));
    if l1 <= 0.0 || l2 <= 0.0 {
        return None;
    }
    let p = -(l2.ln() - l1.ln()) / (k2.ln() - k1.ln());
    // Compare against the slope one decade lower: a power law has a stable exponent.
    let l0 = model.eval(k1 / 10.0);
    let p_lower = -(l1.ln() - l0.ln()) / 10f64.ln();
    if (p - p_lower).abs() < 0.05 * p.max(1.0) {
        Some(p)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    fn moment(model: &PotentialModel, power: i32, kmax: f64) -> Result<f64> {
        let [v] = integrate(
            |k| [k * k * model.eval(k).powi(power)],
            0.0,
            kmax,
            &QuadConfig::default(),
        )?;
        Ok(v)
    }

    #[test]
    fn closed_form_values() {
        let g = PotentialModel::gaussian(1.0, 1.0);
        assert_eq!(g.lambda_k(0.0).unwrap(), 1.0);
        assert!((g.lambda_k(1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((g.lambda_k(1.0).unwrap() - 0.6065307).abs() < 1e-7);
        let f = PotentialModel::flat_cutoff(2.0, 1.0);
        assert_eq!(f.lambda_k(2.0).unwrap(), 0.0);
        assert_eq!(f.lambda_k(1.0).unwrap(), 2.0);
    }

    #[test]
    fn negative_k_is_domain_error() {
        let g = PotentialModel::gaussian(1.0, 1.0);
        assert!(matches!(g.lambda_k(-0.1), Err(Error::Domain(_))));
        assert!(g.lambda_k(f64::NAN).is_err());
    }

    #[test]
    fn validation_accepts_and_rejects() {
        assert!(PotentialModel::gaussian(1.0, 1.0).validate().unwrap().valid);
        let err = PotentialModel::gaussian(-1.0, 1.0).validate().unwrap_err();
        assert!(err.to_string().contains("λ₀ must be positive"));
        assert!(PotentialModel::flat_cutoff(1.0, 0.0).validate().is_err());
    }

    #[test]
    fn rational_tail_diagnostics() {
        let r = PotentialModel::rational(1.0, 1.0).validate().unwrap();
        assert!(r.valid);
        let p = r.tail_exponent.expect("power-law tail");
        assert!((p - 2.0).abs() < 1e-3, "{p}");
        assert!(r.quadratic_tail_converges);
        // ∫₀^∞ k²/(1+k²)² dk = π/4; the truncated moments approach it from below.
        let exact = PI / 4.0;
        assert!((r.quadratic_moment_total - exact).abs() < 1e-8);
        let gaps: Vec<f64> = r.quadratic_moment.iter().map(|m| exact - m).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
        // ∫ k² λ dk grows linearly with the cutoff.
        assert!(r.linear_moment[2] > 9.0 * r.linear_moment[1]);
    }

    #[test]
    fn moments_match_closed_forms() {
        let g = PotentialModel::gaussian(2.0, 0.7);
        let m = moment(&g, 1, 60.0).unwrap();
        let expect = g.mean_coupling().unwrap() * 2.0 * PI * PI;
        assert!((m - expect).abs() < 1e-10 * expect);
        let q = moment(&g, 2, 60.0).unwrap();
        assert!(q > 0.0);
        let [d] =
            integrate_half_line(|k| [g.eval(k).powi(2)], 1.0, &QuadConfig::default()).unwrap();
        assert!((d / (4.0 * PI * PI) - g.dilute_coupling()).abs() < 1e-12);
    }

    #[test]
    fn grid_bounds_and_monotonicity() {
        let models = [
            PotentialModel::gaussian(1.0, 1.0),
            PotentialModel::flat_cutoff(2.0, 3.0),
            PotentialModel::rational(0.5, 2.0),
        ];
        for m in models {
            let mut prev = f64::INFINITY;
            for i in 0..1000 {
                let k = 1e3 * i as f64 / 999.0;
                let v = m.lambda_k(k).unwrap();
                assert!((0.0..=m.lambda0).contains(&v));
                assert!(v <= prev);
                prev = v;
            }
        }
    }
}
