//! Nested variational problem for the grand-canonical pressure
//!
//! ```text
//! p(β, μ) = sup_{x ≥ 0} g_μ(x),   g_μ(x) = inf_{α ≤ 0} { p₀ᴮ(β, α, x) + (μ − α)²/(2λ₀) }
//! ```
//!
//! The inner problem is strictly convex in `α`; its stationarity condition
//! `x + depletion(α, x) = (μ − α)/λ₀` is solved by Brent's method. The outer
//! objective is bimodal near the transition, so every local maximum of
//! `g_μ` is located from a logarithmic scan of `g'_μ(x) = ∂ₓp₀ᴮ(β, α*(x), x)`
//! and refined separately.

use serde::Serialize;

use crate::bog_pressure::{Bogoliubov, ThermoPoint};
use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::roots::brent;

/// Points of the logarithmic `x` scan used to detect condensed maxima.
const X_SCAN_POINTS: usize = 48;
/// Smallest scanned `x` relative to the cap.
const X_SCAN_FLOOR: f64 = 1e-6;
/// Relative tolerance under which two branch pressures count as tied.
const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Normal,
    Condensed,
}

/// Solution of the inner problem at fixed `(β, μ, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerSolution {
    pub x: f64,
    pub alpha: f64,
    /// `g_μ(x)`
    pub value: f64,
    pub depletion: f64,
    /// `g'_μ(x)`
    pub slope: f64,
    /// The minimizer sits on the boundary `α = 0`.
    pub at_boundary: bool,
}

/// A local maximizer of `g_μ` together with its saddle data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleSolution {
    pub beta: f64,
    pub mu: f64,
    pub alpha_star: f64,
    pub x_star: f64,
    pub y_star: f64,
    pub pressure: f64,
    pub branch: Branch,
    pub lambda0: f64,
}

impl SaddleSolution {
    fn from_inner(beta: f64, mu: f64, lambda0: f64, s: InnerSolution) -> Self {
        SaddleSolution {
            beta,
            mu,
            alpha_star: s.alpha,
            x_star: s.x,
            y_star: s.depletion,
            pressure: s.value,
            branch: if s.x > 0.0 {
                Branch::Condensed
            } else {
                Branch::Normal
            },
            lambda0,
        }
    }

    /// `∂p/∂μ = (μ − α*)/λ₀`.
    pub fn density(&self) -> f64 {
        (self.mu - self.alpha_star) / self.lambda0
    }

    /// `y* + x* + (α* − μ)/λ₀`, zero at an interior saddle.
    pub fn stationarity_residual(&self) -> f64 {
        self.y_star + self.x_star + (self.alpha_star - self.mu) / self.lambda0
    }
}

/// `p(β, μ)` with every maximizer that attains it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureSb {
    pub pressure: f64,
    /// Sorted by `x`; two entries only at coexistence.
    pub maximizers: Vec<SaddleSolution>,
}

impl PressureSb {
    pub fn dominant(&self) -> &SaddleSolution {
        self.maximizers
            .iter()
            .max_by(|a, b| a.pressure.total_cmp(&b.pressure))
            .expect("at least one maximizer")
    }
}

/// First-order transition data at fixed `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseTransition {
    pub beta: f64,
    pub mu_c: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub x_plus: f64,
    pub y_plus: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub pressure: f64,
    /// `g(x₊) − g(0)` at `μ_c`.
    pub pressure_gap: f64,
}

impl PhaseTransition {
    pub fn contains(&self, rho: f64) -> bool {
        rho >= self.rho_minus && rho <= self.rho_plus
    }
}

/// Chemical-potential range scanned by [`Gas::find_transition`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuScan {
    pub mu_min: f64,
    pub mu_max: f64,
    pub steps: usize,
}

impl Default for MuScan {
    fn default() -> Self {
        MuScan {
            mu_min: -10.0,
            mu_max: 10.0,
            steps: 80,
        }
    }
}

/// Densities at a chemical potential; two entries at `μ_c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityOfMu {
    pub mu: f64,
    pub branches: Vec<(f64, SaddleSolution)>,
}

impl DensityOfMu {
    pub fn rho(&self) -> f64 {
        self.branches
            .iter()
            .max_by(|a, b| a.1.pressure.total_cmp(&b.1.pressure))
            .map(|b| b.0)
            .expect("at least one branch")
    }
}

/// Solver for the superstable gas at a fixed potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gas {
    pub bog: Bogoliubov,
}

impl Gas {
    pub fn new(model: PotentialModel) -> Self {
        Gas {
            bog: Bogoliubov::new(model),
        }
    }

    pub fn model(&self) -> &PotentialModel {
        &self.bog.model
    }

    pub fn lambda0(&self) -> f64 {
        self.bog.model.lambda0
    }

    fn point(beta: f64, alpha: f64, x: f64) -> Result<ThermoPoint> {
        ThermoPoint::new(beta, alpha, x)
    }

    /// Residual of the inner stationarity condition; increasing in `α`.
    fn inner_residual(&self, beta: f64, mu: f64, x: f64, alpha: f64) -> Result<f64> {
        let d = self.bog.depletion_density(Self::point(beta, alpha, x)?)?;
        Ok(x + d - (mu - alpha) / self.lambda0())
    }

    /// Minimizer `α*(x)` of `p₀ᴮ(β, α, x) + (μ − α)²/(2λ₀)` over `α ≤ 0`.
    pub fn inner_alpha(&self, beta: f64, mu: f64, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("x must be ≥ 0, got {x}")));
        }
        if self.inner_residual(beta, mu, x, 0.0)? <= 0.0 {
            return Ok(0.0);
        }
        let l0 = self.lambda0();
        // At α = μ − λ₀(x + δ) the residual is depletion − δ.
        let mut delta = 1e-3_f64.max(x);
        let mut lo = (mu - l0 * (x + delta)).min(-1e-12);
        let mut tries = 0;
        while self.inner_residual(beta, mu, x, lo)? >= 0.0 {
            delta *= 4.0;
            lo = (mu - l0 * (x + delta)).min(4.0 * lo);
            tries += 1;
            if tries > 200 {
                return Err(Error::Bracket {
                    context: "inner α minimization".into(),
                    lo,
                    hi: 0.0,
                });
            }
        }
        let xtol = 1e-15 * lo.abs().max(1.0);
        brent(
            |a| self.inner_residual(beta, mu, x, a),
            lo,
            0.0,
            xtol,
            "inner α minimization",
        )
    }

    /// Solves the inner problem and reports `g_μ(x)` with its slope.
    pub fn inner_inf_alpha(&self, beta: f64, mu: f64, x: f64) -> Result<InnerSolution> {
        let alpha = self.inner_alpha(beta, mu, x)?;
        let s = self.bog.state(Self::point(beta, alpha, x)?)?;
        let d = mu - alpha;
        Ok(InnerSolution {
            x,
            alpha,
            value: s.pressure + d * d / (2.0 * self.lambda0()),
            depletion: s.depletion,
            slope: s.dx,
            at_boundary: alpha == 0.0,
        })
    }

    /// Upper bound on the condensate density of any local maximizer of `g_μ`.
    ///
    /// At an interior maximizer `−α* = J ≤ min(Ī/2, x L)` with
    /// `Ī = ∫λ d³k/(2π)³` and `L = ∫λ²/(2k²) d³k/(2π)³`, while
    /// `x ≤ (μ − α*)/λ₀`.
    pub fn condensate_cap(&self, mu: f64) -> Result<f64> {
        let l0 = self.lambda0();
        let by_mean = self
            .model()
            .mean_coupling()
            .map(|i| (mu + 0.5 * i).max(0.0) / l0);
        let dil = self.model().dilute_coupling();
        let by_dilute = (dil < l0).then(|| mu.max(0.0) / (l0 - dil));
        let cap = match (by_mean, by_dilute) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => {
                return Err(Error::domain(
                    "potential admits no condensate cap: ∫λ diverges and ∫λ²/k² ≥ λ₀",
                ))
            }
        };
        Ok(cap)
    }

    fn scan_grid(cap: f64) -> Vec<f64> {
        let lo = (cap * X_SCAN_FLOOR).ln();
        let hi = cap.ln();
        (0..X_SCAN_POINTS)
            .map(|i| (lo + (hi - lo) * i as f64 / (X_SCAN_POINTS - 1) as f64).exp())
            .collect()
    }

    /// Refines a local maximum of `g_μ` inside a bracket where the slope goes from + to −.
    fn refine_max(&self, beta: f64, mu: f64, lo: f64, hi: f64) -> Result<InnerSolution> {
        let x = brent(
            |x| Ok(self.inner_inf_alpha(beta, mu, x)?.slope),
            lo,
            hi,
            1e-14 * hi.max(1e-300),
            "condensed maximizer",
        )?;
        self.inner_inf_alpha(beta, mu, x)
    }

    /// Every interior local maximizer of `g_μ` (the condensed candidates).
    pub fn interior_maxima(&self, beta: f64, mu: f64) -> Result<Vec<InnerSolution>> {
        let cap = 1.25 * self.condensate_cap(mu)? + 1e-9;
        if cap <= 1e-9 * 1.0001 {
            return Ok(Vec::new());
        }
        let grid = Self::scan_grid(cap);
        let mut slopes = Vec::with_capacity(grid.len());
        for &x in &grid {
            slopes.push(self.inner_inf_alpha(beta, mu, x)?.slope);
        }
        let mut out = Vec::new();
        for i in 0..grid.len() - 1 {
            if slopes[i] > 0.0 && slopes[i + 1] <= 0.0 {
                out.push(self.refine_max(beta, mu, grid[i], grid[i + 1])?);
            }
        }
        Ok(out)
    }

    /// The `x = 0` branch.
    pub fn normal_branch(&self, beta: f64, mu: f64) -> Result<SaddleSolution> {
        let s = self.inner_inf_alpha(beta, mu, 0.0)?;
        Ok(SaddleSolution::from_inner(beta, mu, self.lambda0(), s))
    }

    /// The condensed local maximizer with the largest `g_μ`, if any.
    pub fn condensed_branch(&self, beta: f64, mu: f64) -> Result<Option<SaddleSolution>> {
        let best = self
            .interior_maxima(beta, mu)?
            .into_iter()
            .max_by(|a, b| a.value.total_cmp(&b.value));
        Ok(best.map(|s| SaddleSolution::from_inner(beta, mu, self.lambda0(), s)))
    }

    /// Condensed maximizer tracked from a nearby condensate density.
    pub fn condensed_branch_near(
        &self,
        beta: f64,
        mu: f64,
        x_guess: f64,
    ) -> Result<Option<SaddleSolution>> {
        let slope = |x: f64| -> Result<f64> { Ok(self.inner_inf_alpha(beta, mu, x)?.slope) };
        let mut lo = x_guess;
        let mut hi = x_guess;
        let s0 = slope(x_guess)?;
        let mut step = 0.02 * x_guess.max(1e-12);
        if s0 > 0.0 {
            for _ in 0..60 {
                hi = lo + step;
                if slope(hi)? <= 0.0 {
                    break;
                }
                lo = hi;
                step *= 2.0;
            }
        } else {
            for _ in 0..60 {
                lo = (hi - step).max(0.5 * hi);
                if lo <= 1e-14 || slope(lo)? > 0.0 {
                    break;
                }
                hi = lo;
                step *= 2.0;
            }
        }
        if !(slope(lo)? > 0.0 && slope(hi)? <= 0.0) {
            return self.condensed_branch(beta, mu);
        }
        let s = self.refine_max(beta, mu, lo, hi)?;
        Ok(Some(SaddleSolution::from_inner(
            beta,
            mu,
            self.lambda0(),
            s,
        )))
    }

    /// `p(β, μ)` and the set of maximizers.
    pub fn pressure_sb(&self, beta: f64, mu: f64) -> Result<PressureSb> {
        let mut cands = vec![self.normal_branch(beta, mu)?];
        for s in self.interior_maxima(beta, mu)? {
            cands.push(SaddleSolution::from_inner(beta, mu, self.lambda0(), s));
        }
        let best = cands
            .iter()
            .map(|c| c.pressure)
            .fold(f64::NEG_INFINITY, f64::max);
        let tol = TIE_TOL * best.abs().max(1.0);
        let maximizers: Vec<SaddleSolution> = cands
            .into_iter()
            .filter(|c| best - c.pressure <= tol)
            .collect();
        Ok(PressureSb {
            pressure: best,
            maximizers,
        })
    }

    /// Pressure gap `g(x₊) − g(0)` between the best condensed and the normal branch.
    fn branch_gap(
        &self,
        beta: f64,
        mu: f64,
    ) -> Result<Option<(f64, SaddleSolution, SaddleSolution)>> {
        let normal = self.normal_branch(beta, mu)?;
        Ok(self
            .condensed_branch(beta, mu)?
            .map(|c| (c.pressure - normal.pressure, normal, c)))
    }

    /// Locates `μ_c` where the condensed branch overtakes the normal one.
    ///
    /// `Ok(None)` means no condensed local maximum exists anywhere on the
    /// scan. A condensed branch that never wins, or already wins at the
    /// lower end, is reported as [`Error::ScanExhausted`].
    pub fn find_transition(&self, beta: f64, scan: &MuScan) -> Result<Option<PhaseTransition>> {
        if !(beta > 0.0) {
            return Err(Error::domain(format!("β must be positive, got {beta}")));
        }
        let n = scan.steps.max(2);
        let mus: Vec<f64> = (0..=n)
            .map(|i| scan.mu_min + (scan.mu_max - scan.mu_min) * i as f64 / n as f64)
            .collect();
        let mut seen_condensed = false;
        let mut prev: Option<(f64, f64)> = None;
        for &mu in &mus {
            let gap = self.branch_gap(beta, mu)?;
            let Some((d, _, _)) = gap else {
                prev = None;
                continue;
            };
            if !seen_condensed && d > 0.0 && mu == scan.mu_min {
                return Err(Error::ScanExhausted(format!(
                    "condensed branch already dominant at μ_min = {mu}"
                )));
            }
            seen_condensed = true;
            if d >= 0.0 {
                let (lo, dlo) = match prev {
                    Some(p) => p,
                    None => return Err(Error::ScanExhausted(format!(
                        "condensed branch appears already dominant near μ = {mu}; refine the scan"
                    ))),
                };
                debug_assert!(dlo < 0.0);
                return self.bisect_transition(beta, lo, mu).map(Some);
            }
            prev = Some((mu, d));
        }
        if seen_condensed {
            Err(Error::ScanExhausted(format!(
                "condensed branch never dominant on μ ∈ [{}, {}]",
                scan.mu_min, scan.mu_max
            )))
        } else {
            Ok(None)
        }
    }

    fn bisect_transition(&self, beta: f64, lo: f64, hi: f64) -> Result<PhaseTransition> {
        let gap = |mu: f64| -> Result<f64> {
            match self.branch_gap(beta, mu)? {
                Some((d, _, _)) => Ok(d),
                None => Err(Error::ScanExhausted(format!(
                    "condensed branch vanished at μ = {mu} inside the bracket"
                ))),
            }
        };
        let mu_c = brent(gap, lo, hi, 1e-13, "μ_c bisection")?;
        let (d, normal, cond) = self.branch_gap(beta, mu_c)?.ok_or_else(|| {
            Error::ScanExhausted(format!("condensed branch missing at μ_c = {mu_c}"))
        })?;
        Ok(PhaseTransition {
            beta,
            mu_c,
            rho_minus: normal.density(),
            rho_plus: cond.density(),
            x_plus: cond.x_star,
            y_plus: cond.y_star,
            alpha_minus: normal.alpha_star,
            alpha_plus: cond.alpha_star,
            pressure: normal.pressure.max(cond.pressure),
            pressure_gap: d,
        })
    }

    /// `ρ(μ) = (μ − α*)/λ₀` for each maximizer at `μ`.
    pub fn density_of_mu(&self, beta: f64, mu: f64) -> Result<DensityOfMu> {
        let p = self.pressure_sb(beta, mu)?;
        Ok(DensityOfMu {
            mu,
            branches: p.maximizers.into_iter().map(|s| (s.density(), s)).collect(),
        })
    }

    /// Normal-branch chemical potential at density `ρ`: `α` from
    /// `depletion(α, 0) = ρ`, then `μ = α + λ₀ρ`.
    fn mu_normal(&self, beta: f64, rho: f64) -> Result<f64> {
        let dep = |a: f64| -> Result<f64> {
            Ok(self.bog.depletion_density(Self::point(beta, a, 0.0)?)? - rho)
        };
        let l0 = self.lambda0();
        if dep(0.0)? <= 0.0 {
            // saturated ideal part: α pinned at zero
            return Ok(l0 * rho);
        }
        let mut lo = -1.0;
        while dep(lo)? >= 0.0 {
            lo *= 2.0;
            if lo < -1e6 {
                return Err(Error::Bracket {
                    context: "normal-branch α".into(),
                    lo,
                    hi: 0.0,
                });
            }
        }
        let a = brent(dep, lo, 0.0, 1e-15 * lo.abs(), "normal-branch α")?;
        Ok(a + l0 * rho)
    }

    fn mu_condensed(&self, beta: f64, rho: f64, tr: &PhaseTransition) -> Result<f64> {
        let l0 = self.lambda0();
        let x_guess = std::cell::Cell::new(tr.x_plus);
        let f = |mu: f64| -> Result<f64> {
            let s = self
                .condensed_branch_near(beta, mu, x_guess.get())?
                .ok_or_else(|| Error::domain(format!("no condensed branch at μ = {mu}")))?;
            x_guess.set(s.x_star);
            Ok(s.density() - rho)
        };
        // On the condensed branch α ∈ [−Ī/2, 0], so μ ∈ [λ₀ρ − Ī/2, λ₀ρ].
        let half_mean = self.model().mean_coupling().map_or(l0 * rho, |i| 0.5 * i);
        let lo = tr.mu_c.max(l0 * rho - half_mean - 1e-9);
        let hi = (l0 * rho).max(lo + 1e-12);
        if f(lo)? >= 0.0 {
            return Ok(lo);
        }
        brent(f, lo, hi, 1e-14 * hi.abs().max(1.0), "condensed-branch μ")
    }

    /// `μ_ρ`: inverse of [`Gas::density_of_mu`], constant `μ_c` on the plateau.
    pub fn mu_of_rho(
        &self,
        beta: f64,
        rho: f64,
        transition: Option<&PhaseTransition>,
    ) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::domain(format!("ρ must be positive, got {rho}")));
        }
        match transition {
            Some(tr) if tr.contains(rho) => Ok(tr.mu_c),
            Some(tr) if rho < tr.rho_minus => self.mu_normal(beta, rho),
            Some(tr) => self.mu_condensed(beta, rho, tr),
            None => self.mu_generic(beta, rho),
        }
    }

    // Without transition data: Brent on the full density map.
    fn mu_generic(&self, beta: f64, rho: f64) -> Result<f64> {
        let l0 = self.lambda0();
        let f = |mu: f64| -> Result<f64> { Ok(self.density_of_mu(beta, mu)?.rho() - rho) };
        // α ≤ 0 gives ρ(λ₀ρ) ≥ ρ.
        let hi = l0 * rho;
        let mut delta = 1.0;
        let mut lo = hi - delta;
        while f(lo)? >= 0.0 {
            delta *= 2.0;
            lo = hi - delta;
            if delta > 1e8 {
                return Err(Error::Bracket {
                    context: "μ_ρ".into(),
                    lo,
                    hi,
                });
            }
        }
        if f(hi)? <= 0.0 {
            return Ok(hi);
        }
        brent(f, lo, hi, 1e-14 * hi.abs().max(1.0), "μ_ρ")
    }

    /// Condensate density at fixed total density: zero below `ρ₋`, linear on
    /// the plateau, the condensed saddle above `ρ₊`.
    pub fn condensate_of_rho(
        &self,
        beta: f64,
        rho: f64,
        transition: Option<&PhaseTransition>,
    ) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::domain(format!("ρ must be positive, got {rho}")));
        }
        match transition {
            Some(tr) if rho <= tr.rho_minus => Ok(0.0),
            Some(tr) if rho <= tr.rho_plus => {
                Ok((rho - tr.rho_minus) / (tr.rho_plus - tr.rho_minus) * tr.x_plus)
            }
            Some(tr) => {
                let mu = self.mu_condensed(beta, rho, tr)?;
                let s = self
                    .condensed_branch_near(beta, mu, tr.x_plus)?
                    .ok_or_else(|| Error::domain(format!("no condensed branch at μ = {mu}")))?;
                Ok(s.x_star)
            }
            None => {
                let mu = self.mu_generic(beta, rho)?;
                Ok(self.pressure_sb(beta, mu)?.dominant().x_star)
            }
        }
    }

    /// Condensed saddle at the chemical potential of a density above `ρ₊`.
    pub fn condensed_saddle_of_rho(
        &self,
        beta: f64,
        rho: f64,
        tr: &PhaseTransition,
    ) -> Result<SaddleSolution> {
        let mu = if rho <= tr.rho_plus {
            tr.mu_c
        } else {
            self.mu_condensed(beta, rho, tr)?
        };
        self.condensed_branch_near(beta, mu, tr.x_plus)?
            .ok_or_else(|| Error::domain(format!("no condensed branch at μ = {mu}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bog_pressure::{perfect_gas_density, perfect_gas_pressure};
    use crate::roots::minimize;

    fn gas() -> Gas {
        Gas::new(PotentialModel::gaussian(1.0, 1.0))
    }

    #[test]
    fn dilute_limit() {
        let g = gas();
        let s = g.inner_inf_alpha(1.0, -50.0, 0.0).unwrap();
        assert!((s.alpha + 50.0).abs() <= 1e-6);
        let resid = s.depletion + (s.alpha + 50.0);
        assert!(resid.abs() <= 1e-8);
        let p = g.pressure_sb(1.0, -50.0).unwrap();
        assert!(p.pressure <= 1e-15);
        assert_eq!(p.maximizers.len(), 1);
        assert_eq!(p.maximizers[0].branch, Branch::Normal);
    }

    #[test]
    fn inner_matches_grid_scan() {
        let g = gas();
        let (beta, mu, x) = (1.0, 1.0, 0.5);
        let s = g.inner_inf_alpha(beta, mu, x).unwrap();
        // brute force: 10⁴ points on [−20, 0], then local polish of the best cell
        let obj = |a: f64| {
            let p = g.bog.p0b(ThermoPoint::new(beta, a, x).unwrap()).unwrap();
            p + (mu - a) * (mu - a) / 2.0
        };
        let n = 10_000;
        let (mut best, mut ib) = (f64::INFINITY, 0);
        for i in 0..=n {
            let a = -20.0 + 20.0 * i as f64 / n as f64;
            let v = obj(a);
            if v < best {
                best = v;
                ib = i;
            }
        }
        let h = 20.0 / n as f64;
        let a0 = -20.0 + h * ib as f64;
        let (a_star, _) = minimize(
            |a| Ok(obj(a)),
            (a0 - h).max(-20.0),
            (a0 + h).min(0.0),
            1e-12,
        )
        .unwrap();
        assert!((a_star - s.alpha).abs() < 1e-7, "{a_star} vs {}", s.alpha);
        assert!(best >= s.value - 1e-12);
    }

    #[test]
    fn strong_coupling_rearranged_stationarity() {
        let g = Gas::new(PotentialModel::gaussian(1e3, 1.0));
        let (mu, x) = (0.5, 0.2);
        let s = g.inner_inf_alpha(1.0, mu, x).unwrap();
        assert!((s.alpha - mu).abs() <= 1e3 * (x + s.depletion) + 1e-9);
        if !s.at_boundary {
            let r = (mu - s.alpha) / 1e3 - x - s.depletion;
            assert!(r.abs() < 1e-10);
        }
    }

    #[test]
    fn mean_field_gas_below_transition() {
        let g = gas();
        let (beta, mu) = (1.0, -0.3);
        let p = g.pressure_sb(beta, mu).unwrap();
        assert_eq!(p.maximizers.len(), 1);
        assert_eq!(p.maximizers[0].x_star, 0.0);
        // independent: polylog pressure, 1D minimization over α
        let (a, v) = minimize(
            |a| Ok(perfect_gas_pressure(beta, a)? + (mu - a) * (mu - a) / 2.0),
            -20.0,
            0.0,
            1e-12,
        )
        .unwrap();
        assert!((p.pressure - v).abs() < 1e-9, "{} vs {v}", p.pressure);
        let rho = perfect_gas_density(beta, a).unwrap();
        assert!((p.maximizers[0].density() - rho).abs() < 1e-6);
    }

    #[test]
    fn cap_bounds_condensed_maxima() {
        let g = Gas::new(PotentialModel::gaussian(50.0, 0.5));
        let mu = 3.0;
        let cap = g.condensate_cap(mu).unwrap();
        for m in g.interior_maxima(1.0, mu).unwrap() {
            assert!(m.x < cap);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = gas();
        assert!(g.inner_inf_alpha(1.0, 0.0, -1.0).is_err());
        assert!(g.mu_of_rho(1.0, 0.0, None).is_err());
        assert!(g.find_transition(-1.0, &MuScan::default()).is_err());
    }
}
