//! Large-deviation rate functions at speed `βV`.
//!
//! ```text
//! K_μ(x, y) = p(β, μ) + f₀ᴮ(β, y, x) + (λ₀/2)(y + x)² − μ(y + x)
//! D_ρ(x)    = g_{μ_ρ}(x_ρ) − g_{μ_ρ}(x)
//! ```
//!
//! Both are nonnegative and vanish exactly on the maximizers of the
//! variational problem. `min_y K_{μ_ρ}(x, ·) = D_ρ(x)` (contraction).

use rayon::prelude::*;
use serde::Serialize;

use crate::bog_pressure::ThermoPoint;
use crate::error::{Error, Result};
use crate::legendre::{f0b, f0b_column};
use crate::roots::minimize;
use crate::variational::{Gas, PhaseTransition};

/// Rates at or below this are zeros of the rate function.
pub const ZERO_RATE: f64 = 1e-8;
/// Presentation clamp for reported rates.
pub const REPORT_CLAMP: f64 = 1e-12;

/// `K_μ` at fixed `(β, μ)` with the pressure computed once.
#[derive(Debug, Clone, Copy)]
pub struct JointRate<'a> {
    pub gas: &'a Gas,
    pub beta: f64,
    pub mu: f64,
    pub pressure: f64,
}

impl<'a> JointRate<'a> {
    pub fn new(gas: &'a Gas, beta: f64, mu: f64) -> Result<Self> {
        let pressure = gas.pressure_sb(beta, mu)?.pressure;
        Ok(JointRate {
            gas,
            beta,
            mu,
            pressure,
        })
    }

    /// With an externally supplied pressure, e.g. the transition value at `μ_c`.
    pub fn with_pressure(gas: &'a Gas, beta: f64, mu: f64, pressure: f64) -> Self {
        JointRate {
            gas,
            beta,
            mu,
            pressure,
        }
    }

    /// `K_μ(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let p = f0b(self.gas, self.beta, y, x)?;
        Ok(self.rate_from_fsb(x, y, p.fsb))
    }

    fn rate_from_fsb(&self, x: f64, y: f64, fsb: f64) -> f64 {
        self.pressure + fsb - self.mu * (y + x)
    }

    /// `min_y K_μ(x, y)` over `y ∈ [lo, hi]`, with the minimizing `y`.
    pub fn profile(&self, x: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let (y, v) = minimize(|y| self.eval(x, y), lo, hi, 1e-12 * hi.max(1e-300))?;
        let (vl, vh) = (self.eval(x, lo)?, self.eval(x, hi)?);
        Ok([(y, v), (lo, vl), (hi, vh)]
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("three candidates"))
    }
}

/// `K_μ(x, y)` computed from scratch.
pub fn rate_k(gas: &Gas, beta: f64, mu: f64, x: f64, y: f64) -> Result<f64> {
    JointRate::new(gas, beta, mu)?.eval(x, y)
}

/// `D_ρ` at fixed `(β, ρ)`.
#[derive(Debug, Clone, Copy)]
pub struct CondensateRate<'a> {
    pub gas: &'a Gas,
    pub beta: f64,
    pub rho: f64,
    pub mu_rho: f64,
    /// `x_ρ`; the normal-branch point `0` on the plateau.
    pub x_rho: f64,
    /// `g_{μ_ρ}(x_ρ)`.
    pub reference: f64,
}

impl<'a> CondensateRate<'a> {
    pub fn new(
        gas: &'a Gas,
        beta: f64,
        rho: f64,
        transition: Option<&PhaseTransition>,
    ) -> Result<Self> {
        let mu_rho = gas.mu_of_rho(beta, rho, transition)?;
        let x_rho = match transition {
            Some(tr) if rho <= tr.rho_plus => 0.0,
            Some(tr) => gas.condensed_saddle_of_rho(beta, rho, tr)?.x_star,
            None => gas.pressure_sb(beta, mu_rho)?.dominant().x_star,
        };
        let reference = gas.inner_inf_alpha(beta, mu_rho, x_rho)?.value;
        Ok(CondensateRate {
            gas,
            beta,
            rho,
            mu_rho,
            x_rho,
            reference,
        })
    }

    /// `D_ρ(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.reference - self.gas.inner_inf_alpha(self.beta, self.mu_rho, x)?.value)
    }
}

/// `D_ρ(x)` computed from scratch.
pub fn rate_d(
    gas: &Gas,
    beta: f64,
    rho: f64,
    x: f64,
    transition: Option<&PhaseTransition>,
) -> Result<f64> {
    CondensateRate::new(gas, beta, rho, transition)?.eval(x)
}

/// Growth constants: `μ(y + x) − fˢᴮ(β, y, x) ≤ −B(y + x)` whenever `x, y ≥ M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperstabilityBound {
    pub m: f64,
    pub b: f64,
}

impl SuperstabilityBound {
    /// Checks the inequality on an `n × n` grid of `[M, 10M]²`.
    pub fn verify(&self, gas: &Gas, beta: f64, mu: f64, n: usize) -> Result<()> {
        let n = n.max(2);
        let pts: Vec<f64> = (0..n)
            .map(|i| self.m * (1.0 + 9.0 * i as f64 / (n - 1) as f64))
            .collect();
        for &x in &pts {
            for p in f0b_column(gas, beta, x, &pts)? {
                let s = p.x + p.y;
                let exponent = mu * s - p.fsb;
                if exponent > -self.b * s {
                    return Err(Error::NoConvergence {
                        context: format!(
                            "superstability bound fails at (x, y) = ({}, {})",
                            p.x, p.y
                        ),
                        iterations: 0,
                        residual: exponent + self.b * s,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Finds `(M, B)` with `B = 1` and verifies it on `[M, 10M]²`.
///
/// `f₀ᴮ(y, x) ≥ −p₀ᴮ(β, 0, x)` and `∂ₓp₀ᴮ(β, 0, x) ≤ Ī/2`, so with
/// `s = x + y ≥ 2M` the exponent is at most `μs + p_c + Ī s/2 − λ₀s²/2`,
/// below `−Bs` once `λ₀M ≥ μ + Ī/2 + B + p_c/(2M)`. Without a finite `Ī`
/// the slope is bounded by `xL` instead, which needs `L < λ₀`.
pub fn superstability_bound(gas: &Gas, beta: f64, mu: f64) -> Result<SuperstabilityBound> {
    let b = 1.0;
    let l0 = gas.lambda0();
    let p_c = gas.bog.p0b(ThermoPoint::new(beta, 0.0, 0.0)?)?;
    let (curv, shift) = match gas.model().mean_coupling() {
        Some(i) => (l0, 0.5 * i),
        None => {
            let l = gas.model().dilute_coupling();
            if l >= l0 {
                return Err(Error::domain(
                    "no superstability bound: ∫λ diverges and ∫λ²/k² ≥ λ₀",
                ));
            }
            (l0 - l, 0.0)
        }
    };
    let c = mu + shift + b;
    let m = (c + (c * c + 2.0 * curv * p_c).sqrt()) / (2.0 * curv);
    let bound = SuperstabilityBound { m: m.max(1e-6), b };
    bound.verify(gas, beta, mu, 8)?;
    Ok(bound)
}

/// A zero of a rate function after continuous refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateMinimizer {
    pub x: f64,
    pub y: Option<f64>,
    pub value: f64,
}

/// Tabulated rate function with its refined zero set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateGrid {
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    /// Row-major in `x`: `values[i * ny + j]` at `(x[i], y[j])`.
    pub values: Vec<f64>,
    pub minimizers: Vec<RateMinimizer>,
}

impl RateGrid {
    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Value clamped to zero below [`REPORT_CLAMP`], for output only.
    pub fn reported(v: f64) -> f64 {
        if v.abs() < REPORT_CLAMP {
            0.0
        } else {
            v
        }
    }
}

/// Default tabulation size per axis.
pub const DEFAULT_GRID: usize = 256;

fn axis(max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

// Cells not larger than any of their (up to 8) neighbours.
fn local_minima_2d(v: &[f64], nx: usize, ny: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let c = v[i * ny + j];
            let mut is_min = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= nx as i64 || b >= ny as i64 {
                        continue;
                    }
                    if v[a as usize * ny + b as usize] < c {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                out.push((i, j));
            }
        }
    }
    out
}

/// Tabulates `K_μ` on `[0, x_max] × [0, y_max]` and refines its zeros.
pub fn tabulate_k(
    rate: &JointRate,
    nx: usize,
    ny: usize,
    x_max: f64,
    y_max: f64,
) -> Result<RateGrid> {
    let (nx, ny) = (nx.max(3), ny.max(3));
    let xs = axis(x_max, nx);
    let ys = axis(y_max, ny);
    let cols: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            f0b_column(rate.gas, rate.beta, x, &ys).map(|c| {
                c.iter()
                    .map(|p| rate.rate_from_fsb(x, p.y, p.fsb))
                    .collect()
            })
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = cols.into_iter().flatten().collect();

    let (hx, hy) = (xs[1] - xs[0], ys[1] - ys[0]);
    let mut minimizers: Vec<RateMinimizer> = Vec::new();
    for (i, j) in local_minima_2d(&values, nx, ny) {
        let (ylo, yhi) = ((ys[j] - 3.0 * hy).max(0.0), (ys[j] + 3.0 * hy).min(y_max));
        let prof = |x: f64| -> Result<f64> { Ok(rate.profile(x, ylo, yhi)?.1) };
        let (xlo, xhi) = ((xs[i] - hx).max(0.0), (xs[i] + hx).min(x_max));
        let (mut xb, mut vb) = minimize(prof, xlo, xhi, 1e-12 * xhi)?;
        for e in [xlo, xhi] {
            let v = prof(e)?;
            if v < vb {
                xb = e;
                vb = v;
            }
        }
        let (yb, vb) = rate.profile(xb, ylo, yhi)?;
        if vb > ZERO_RATE {
            continue;
        }
        let dup = minimizers
            .iter()
            .any(|m| (m.x - xb).abs() <= 2.0 * hx && (m.y.unwrap() - yb).abs() <= 2.0 * hy);
        if !dup {
            minimizers.push(RateMinimizer {
                x: xb,
                y: Some(yb),
                value: vb,
            });
        }
    }
    Ok(RateGrid {
        x: xs,
        y: Some(ys),
        values,
        minimizers,
    })
}

/// Tabulates `D_ρ` on `[0, x_max]` and refines its zeros.
pub fn tabulate_d(rate: &CondensateRate, nx: usize, x_max: f64) -> Result<RateGrid> {
    let nx = nx.max(3);
    let xs = axis(x_max, nx);
    let values: Vec<f64> = xs
        .par_iter()
        .map(|&x| rate.eval(x))
        .collect::<Result<_>>()?;
    let h = xs[1] - xs[0];
    let mut minimizers: Vec<RateMinimizer> = Vec::new();
    for i in 0..nx {
        let left = i == 0 || values[i - 1] >= values[i];
        let right = i + 1 == nx || values[i + 1] >= values[i];
        if !(left && right) {
            continue;
        }
        let (lo, hi) = ((xs[i] - h).max(0.0), (xs[i] + h).min(x_max));
        let (mut xb, mut vb) = minimize(|x| rate.eval(x), lo, hi, 1e-12 * hi)?;
        for e in [lo, hi, rate.x_rho] {
            if e >= lo && e <= hi {
                let v = rate.eval(e)?;
                if v < vb {
                    xb = e;
                    vb = v;
                }
            }
        }
        if vb <= ZERO_RATE && !minimizers.iter().any(|m| (m.x - xb).abs() <= 2.0 * h) {
            minimizers.push(RateMinimizer {
                x: xb,
                y: None,
                value: vb,
            });
        }
    }
    Ok(RateGrid {
        x: xs,
        y: None,
        values,
        minimizers,
    })
}

/// `inf K_μ` over a rectangle, from a grid scan refined around the best cell.
pub fn min_over_rect(rate: &JointRate, x: (f64, f64), y: (f64, f64), n: usize) -> Result<f64> {
    let n = n.max(3);
    let xs: Vec<f64> = (0..n)
        .map(|i| x.0 + (x.1 - x.0) * i as f64 / (n - 1) as f64)
        .collect();
    let ys: Vec<f64> = (0..n)
        .map(|j| y.0 + (y.1 - y.0) * j as f64 / (n - 1) as f64)
        .collect();
    let mut best = (f64::INFINITY, 0usize);
    for (i, &xi) in xs.iter().enumerate() {
        for p in f0b_column(rate.gas, rate.beta, xi, &ys)? {
            let v = rate.rate_from_fsb(xi, p.y, p.fsb);
            if v < best.0 {
                best = (v, i);
            }
        }
    }
    let i = best.1;
    let (lo, hi) = (xs[i.saturating_sub(1)], xs[(i + 1).min(n - 1)]);
    let prof = |xv: f64| -> Result<f64> { Ok(rate.profile(xv, y.0, y.1)?.1) };
    let (_, v) = minimize(prof, lo, hi, 1e-12 * hi.abs().max(1e-12))?;
    Ok(v.min(prof(lo)?).min(prof(hi)?).min(best.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialModel;

    fn gas() -> Gas {
        Gas::new(PotentialModel::gaussian(1.0, 1.0))
    }

    #[test]
    fn zero_at_saddle() {
        let g = gas();
        let mu = -0.5;
        let r = JointRate::new(&g, 1.0, mu).unwrap();
        let s = g.pressure_sb(1.0, mu).unwrap().maximizers[0];
        assert!(r.eval(s.x_star, s.y_star).unwrap().abs() < 1e-7);
    }

    #[test]
    fn origin_rate_is_pressure() {
        let g = gas();
        let r = JointRate::new(&g, 1.0, 0.5).unwrap();
        let k = r.eval(0.0, 0.0).unwrap();
        assert!(k > 0.0);
        assert_eq!(k, r.pressure);
    }

    #[test]
    fn bound_for_unit_coupling() {
        let g = gas();
        let b = superstability_bound(&g, 1.0, 1.0).unwrap();
        assert!(g.lambda0() * b.m > 1.0 + 1.0);
        let doubled = SuperstabilityBound {
            m: 2.0 * b.m,
            b: b.b,
        };
        doubled.verify(&g, 1.0, 1.0, 6).unwrap();
    }

    #[test]
    fn d_vanishes_at_its_reference() {
        let g = gas();
        let r = CondensateRate::new(&g, 1.0, 0.05, None).unwrap();
        assert_eq!(r.eval(r.x_rho).unwrap(), 0.0);
        assert!(r.eval(r.x_rho + 5.0).unwrap() > 0.0);
    }

    #[test]
    fn local_minima_on_a_bowl() {
        let (nx, ny) = (5, 4);
        let v: Vec<f64> = (0..nx * ny)
            .map(|k| {
                let (i, j) = ((k / ny) as f64, (k % ny) as f64);
                (i - 2.0).powi(2) + (j - 1.0).powi(2)
            })
            .collect();
        assert_eq!(local_minima_2d(&v, nx, ny), vec![(2, 1)]);
    }
}
