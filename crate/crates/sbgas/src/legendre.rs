//! Conjugation between `p₀ᴮ(β, ·, x)` and the free-energy densities.
//!
//! `f₀ᴮ(β, y, x) = sup_{α ≤ 0} { α(y + x) − p₀ᴮ(β, α, x) }`. The maximizer solves
//! `depletion(α, x) = y`; once `y` exceeds the depletion at `α = 0` the
//! supremum sits on the boundary and `f₀ᴮ = −p₀ᴮ(β, 0, x)` is flat in `y`.
//! Values are computed on demand with no caching.

use serde::Serialize;

use crate::bog_pressure::ThermoPoint;
use crate::error::{Error, Result};
use crate::roots::{brent, minimize};
use crate::variational::Gas;

/// `f₀ᴮ` and `fˢᴮ` at one `(y, x)`, with the conjugate slope `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeEnergyPoint {
    pub y: f64,
    pub x: f64,
    /// `∂f₀ᴮ/∂y`; `−∞` at `y = 0`, `0` in the flat region.
    pub alpha: f64,
    pub f0b: f64,
    pub fsb: f64,
}

/// Stationary pair of `Ψ(y, α) = α(y + x) − f₀ᴮ(β, y, x) + (μ − α)²/(2λ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiSaddle {
    pub y: f64,
    pub alpha: f64,
    pub value: f64,
    /// `∂_αΨ = y + x + (α − μ)/λ₀`.
    pub residual: f64,
}

/// Both iterated optimizations of `Ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minimax {
    pub sup_inf: f64,
    pub inf_sup: f64,
}

fn check_yx(y: f64, x: f64) -> Result<()> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(Error::domain(format!("y must be ≥ 0, got {y}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("x must be ≥ 0, got {x}")));
    }
    Ok(())
}

/// Depletion density at `α = 0`; beyond it `f₀ᴮ` is flat in `y`.
pub fn saturation_depletion(gas: &Gas, beta: f64, x: f64) -> Result<f64> {
    gas.bog.depletion_density(ThermoPoint::new(beta, 0.0, x)?)
}

/// `f₀ᴮ(β, y, x)`.
pub fn f0b(gas: &Gas, beta: f64, y: f64, x: f64) -> Result<FreeEnergyPoint> {
    check_yx(y, x)?;
    let l0 = gas.lambda0();
    let s = y + x;
    let point = |alpha: f64, f0b: f64| FreeEnergyPoint {
        y,
        x,
        alpha,
        f0b,
        fsb: f0b + 0.5 * l0 * s * s,
    };
    if y == 0.0 {
        // sup_α { −∫(...) } approached as α → −∞
        ThermoPoint::new(beta, 0.0, x)?;
        return Ok(point(f64::NEG_INFINITY, 0.0));
    }
    let (ex0, d0) = gas
        .bog
        .excess_and_depletion(ThermoPoint::new(beta, 0.0, x)?)?;
    if y >= d0 {
        return Ok(point(0.0, -ex0));
    }
    let alpha = conjugate_slope(gas, beta, y, x, None)?;
    let (ex, _) = gas
        .bog
        .excess_and_depletion(ThermoPoint::new(beta, alpha, x)?)?;
    // α(y + x) − (αx + excess) without the cancelling αx
    Ok(point(alpha, alpha * y - ex))
}

// Solves depletion(α, x) = y for α < 0, optionally bracketing outward from a guess.
fn conjugate_slope(gas: &Gas, beta: f64, y: f64, x: f64, guess: Option<f64>) -> Result<f64> {
    let resid = |a: f64| -> Result<f64> {
        Ok(gas.bog.depletion_density(ThermoPoint::new(beta, a, x)?)? - y)
    };
    let bracket_err = |lo: f64, hi: f64| Error::Bracket {
        context: "f₀ᴮ conjugate slope".into(),
        lo,
        hi,
    };
    let (mut lo, mut hi) = (-1.0_f64, 0.0_f64);
    match guess {
        Some(g) if g < 0.0 && g.is_finite() => {
            let step0 = 0.05 * g.abs() + 1e-6;
            if resid(g)? < 0.0 {
                lo = g;
                let mut step = step0;
                hi = (g + step).min(0.0);
                while hi < 0.0 && resid(hi)? < 0.0 {
                    lo = hi;
                    step *= 3.0;
                    hi = (hi + step).min(0.0);
                }
            } else {
                hi = g;
                let mut step = step0;
                lo = g - step;
                while resid(lo)? >= 0.0 {
                    hi = lo;
                    step *= 3.0;
                    lo -= step;
                    if lo < -1e15 {
                        return Err(bracket_err(lo, hi));
                    }
                }
            }
        }
        _ => {
            while resid(lo)? >= 0.0 {
                lo *= 4.0;
                if lo < -1e15 {
                    return Err(bracket_err(lo, hi));
                }
            }
        }
    }
    brent(resid, lo, hi, 1e-15 * lo.abs(), "f₀ᴮ conjugate slope")
}

/// `f₀ᴮ(β, y, x)` along a column of increasing `y` at fixed `x`, each root
/// search started from the previous slope. Agrees with [`f0b`] pointwise.
pub fn f0b_column(gas: &Gas, beta: f64, x: f64, ys: &[f64]) -> Result<Vec<FreeEnergyPoint>> {
    check_yx(0.0, x)?;
    let l0 = gas.lambda0();
    let (ex0, d0) = gas
        .bog
        .excess_and_depletion(ThermoPoint::new(beta, 0.0, x)?)?;
    let mut out = Vec::with_capacity(ys.len());
    let mut guess = None;
    for &y in ys {
        check_yx(y, x)?;
        let s = y + x;
        let (alpha, f) = if y == 0.0 {
            (f64::NEG_INFINITY, 0.0)
        } else if y >= d0 {
            (0.0, -ex0)
        } else {
            let a = conjugate_slope(gas, beta, y, x, guess)?;
            guess = Some(a);
            let (ex, _) = gas
                .bog
                .excess_and_depletion(ThermoPoint::new(beta, a, x)?)?;
            (a, a * y - ex)
        };
        out.push(FreeEnergyPoint {
            y,
            x,
            alpha,
            f0b: f,
            fsb: f + 0.5 * l0 * s * s,
        });
    }
    Ok(out)
}

/// `fˢᴮ(β, y, x) = f₀ᴮ + (λ₀/2)(y + x)²`.
pub fn fsb(gas: &Gas, beta: f64, y: f64, x: f64) -> Result<f64> {
    Ok(f0b(gas, beta, y, x)?.fsb)
}

/// `sup_y { α(y + x) − f₀ᴮ(β, y, x) }` by 1D maximization; restores `p₀ᴮ`.
pub fn double_conjugate(gas: &Gas, beta: f64, alpha: f64, x: f64) -> Result<f64> {
    let y_top = saturation_depletion(gas, beta, x)?;
    let obj = |y: f64| -> Result<f64> { Ok(f0b(gas, beta, y, x)?.f0b - alpha * (y + x)) };
    let (_, v) = minimize(obj, 0.0, y_top, 1e-13 * y_top.max(1e-300))?;
    // the flat region contributes α(y + x) + p₀ᴮ(0, x), maximal at its left edge
    let edge = -obj(y_top)?;
    Ok((-v).max(edge))
}

/// The stationary pair of `Ψ`: `α̃ = α*(x)` from the inner problem and `ỹ = depletion(α̃, x)`.
pub fn saddle_psi(gas: &Gas, beta: f64, mu: f64, x: f64) -> Result<PsiSaddle> {
    let inner = gas.inner_inf_alpha(beta, mu, x)?;
    let y = inner.depletion;
    let alpha = inner.alpha;
    let fe = f0b(gas, beta, y, x)?;
    let l0 = gas.lambda0();
    Ok(PsiSaddle {
        y,
        alpha,
        value: alpha * (y + x) - fe.f0b + (mu - alpha) * (mu - alpha) / (2.0 * l0),
        residual: y + x + (alpha - mu) / l0,
    })
}

// inf over α ≤ 0 of α s + (μ − α)²/(2λ₀)
fn inf_alpha_quadratic(mu: f64, l0: f64, s: f64) -> f64 {
    if mu - l0 * s <= 0.0 {
        mu * s - 0.5 * l0 * s * s
    } else {
        mu * mu / (2.0 * l0)
    }
}

/// `sup_y inf_α Ψ` and `inf_α sup_y Ψ`, each by nested 1D optimization.
pub fn minimax_psi(gas: &Gas, beta: f64, mu: f64, x: f64) -> Result<Minimax> {
    let l0 = gas.lambda0();
    let y_sat = saturation_depletion(gas, beta, x)?;

    // sup_y: the α-infimum is explicit, the y-supremum numeric
    let y_top = y_sat.max(mu / l0 - x).max(1e-12) * 1.5;
    let neg = |y: f64| -> Result<f64> {
        Ok(f0b(gas, beta, y, x)?.f0b - inf_alpha_quadratic(mu, l0, y + x))
    };
    let (_, v) = minimize(neg, 0.0, y_top, 1e-13 * y_top)?;
    let sup_inf = -v;

    // inf_α: the y-supremum by numeric conjugation
    let outer = |a: f64| -> Result<f64> {
        Ok(double_conjugate(gas, beta, a, x)? + (mu - a) * (mu - a) / (2.0 * l0))
    };
    // the minimizer lies in [μ − λ₀(x + y_sat), 0]
    let a_lo = (mu - l0 * (x + y_sat)).min(0.0) - 1e-9;
    let (_, inf_sup) = if a_lo < 0.0 {
        let (a, v) = minimize(outer, a_lo, 0.0, 1e-12 * a_lo.abs().max(1.0))?;
        let at0 = outer(0.0)?;
        if at0 < v {
            (0.0, at0)
        } else {
            (a, v)
        }
    } else {
        (0.0, outer(0.0)?)
    };
    Ok(Minimax { sup_inf, inf_sup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialModel;

    fn gas() -> Gas {
        Gas::new(PotentialModel::gaussian(1.0, 1.0))
    }

    #[test]
    fn empty_system() {
        let g = gas();
        let p = f0b(&g, 1.0, 0.0, 0.0).unwrap();
        assert!(p.f0b.abs() <= 1e-8);
        assert_eq!(p.fsb, 0.0);
    }

    #[test]
    fn mean_field_term_is_exact() {
        let g1 = gas();
        let g2 = Gas::new(PotentialModel::gaussian(2.0, 1.0));
        let (y, x) = (0.05, 0.0);
        let a = f0b(&g1, 1.0, y, x).unwrap();
        assert!((a.fsb - a.f0b - 0.5 * (y + x) * (y + x)).abs() <= 1e-16);
        // at x = 0 f₀ᴮ does not depend on λ₀
        let b = f0b(&g2, 1.0, y, x).unwrap();
        assert!(((b.fsb - a.fsb) - 0.5 * (y + x) * (y + x)).abs() < 1e-12);
    }

    #[test]
    fn duality_round_trip() {
        let g = gas();
        let (beta, alpha, x) = (1.0, -1.0, 0.5);
        let p = g
            .bog
            .p0b(ThermoPoint::new(beta, alpha, x).unwrap())
            .unwrap();
        let dc = double_conjugate(&g, beta, alpha, x).unwrap();
        assert!((p - dc).abs() < 1e-6, "{p} vs {dc}");
    }

    #[test]
    fn convex_in_y() {
        let g = gas();
        let x = 0.2;
        let top = 1.3 * saturation_depletion(&g, 1.0, x).unwrap();
        let ys: Vec<f64> = (0..=24).map(|i| top * i as f64 / 24.0).collect();
        let f: Vec<f64> = ys
            .iter()
            .map(|&y| f0b(&g, 1.0, y, x).unwrap().f0b)
            .collect();
        for i in 1..f.len() - 1 {
            assert!(0.5 * (f[i - 1] + f[i + 1]) - f[i] >= -1e-9, "i={i}");
        }
    }

    #[test]
    fn flat_beyond_saturation() {
        let g = gas();
        let x = 0.3;
        let d0 = saturation_depletion(&g, 1.0, x).unwrap();
        let a = f0b(&g, 1.0, d0 * 1.1, x).unwrap();
        let b = f0b(&g, 1.0, d0 * 2.0, x).unwrap();
        assert_eq!(a.f0b, b.f0b);
        assert_eq!(a.alpha, 0.0);
    }

    #[test]
    fn dilute_saddle() {
        let g = gas();
        let s = saddle_psi(&g, 1.0, -30.0, 0.0).unwrap();
        assert!(s.y < 1e-10);
        assert!((s.alpha + 30.0).abs() < 1e-9);
        assert!(s.residual.abs() < 1e-8);
    }

    #[test]
    fn minimax_commutes() {
        let g = Gas::new(PotentialModel::gaussian(50.0, 0.5));
        let m = minimax_psi(&g, 1.0, 1.3, 0.3).unwrap();
        assert!((m.sup_inf - m.inf_sup).abs() < 1e-6, "{m:?}");
        let inner = g.inner_inf_alpha(1.0, 1.3, 0.3).unwrap();
        assert!((m.inf_sup - inner.value).abs() < 1e-6);
    }

    #[test]
    fn column_matches_pointwise() {
        let g = gas();
        let x = 0.15;
        let ys: Vec<f64> = (0..30).map(|j| 0.004 * j as f64).collect();
        let col = f0b_column(&g, 1.0, x, &ys).unwrap();
        for (p, &y) in col.iter().zip(&ys) {
            let q = f0b(&g, 1.0, y, x).unwrap();
            assert!(
                (p.f0b - q.f0b).abs() < 1e-12,
                "y={y}: {} vs {}",
                p.f0b,
                q.f0b
            );
        }
    }

    #[test]
    fn rejects_negative_arguments() {
        let g = gas();
        assert!(f0b(&g, 1.0, -1.0, 0.0).is_err());
        assert!(f0b(&g, 1.0, 0.0, -1.0).is_err());
    }
}
