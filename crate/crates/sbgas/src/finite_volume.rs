//! Finite-volume checks of the thermodynamic-limit statements.
//!
//! * Momentum-lattice sums over `Λ* = (2π/L)ℤ³ \ {0}` converging to the
//!   radial integrals of [`crate::bog_pressure`].
//! * A Laplace surrogate for the joint law of `(x, y)` at volume `V`: weights
//!   `exp(βV(μ(y + x) − fˢᴮ(β, y, x)) + γ(y + x))` on a grid, in log domain.
//!
//! The surrogate keeps `V` only in the exponent scale. Its two basins carry
//! different Laplace prefactors (the normal peak sits on the `x = 0`
//! boundary), so the raw basin ratio grows like `√V` at `μ_c`.
//! [`quasi_average`] therefore normalizes each basin separately before
//! tilting, and reports the raw ratio alongside.

use rayon::prelude::*;
use serde::Serialize;

use crate::bog_pressure::ThermoPoint;
use crate::error::{Error, Result};
use crate::legendre::f0b_column;
use crate::potential::PotentialModel;
use crate::variational::{Gas, PhaseTransition};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Periodic box of side `L`; the zero mode is always excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeConfig {
    pub box_side: f64,
    pub k_cutoff: f64,
}

/// Momenta of equal modulus `k = 2π√m/L` and their count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shell {
    pub k: f64,
    pub multiplicity: u64,
}

impl LatticeConfig {
    pub fn new(box_side: f64, k_cutoff: f64) -> Result<Self> {
        if !(box_side > 0.0) || !box_side.is_finite() {
            return Err(Error::domain(format!(
                "box side must be positive, got {box_side}"
            )));
        }
        if !(k_cutoff > TWO_PI / box_side) || !k_cutoff.is_finite() {
            return Err(Error::domain(format!(
                "cutoff {k_cutoff} admits no shell for L = {box_side} (needs > {})",
                TWO_PI / box_side
            )));
        }
        Ok(LatticeConfig { box_side, k_cutoff })
    }

    pub fn volume(&self) -> f64 {
        self.box_side.powi(3)
    }

    /// Nonzero shells with `|k| ≤ k_cutoff`.
    pub fn shells(&self) -> Vec<Shell> {
        let r = self.k_cutoff * self.box_side / TWO_PI;
        let m_max = (r * r).floor() as i64;
        let n_max = r.floor() as i64;
        let mut counts = vec![0u64; m_max as usize + 1];
        for a in -n_max..=n_max {
            let ma = a * a;
            for b in -n_max..=n_max {
                let mab = ma + b * b;
                if mab > m_max {
                    continue;
                }
                let c_max = ((m_max - mab) as f64).sqrt().floor() as i64;
                for c in -c_max..=c_max {
                    counts[(mab + c * c) as usize] += 1;
                }
            }
        }
        counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &n)| n > 0)
            .map(|(m, &n)| Shell {
                k: TWO_PI * (m as f64).sqrt() / self.box_side,
                multiplicity: n,
            })
            .collect()
    }
}

// thermal + zero-point contribution of one mode
fn mode_term(beta: f64, alpha: f64, x: f64, k: f64, l: f64) -> f64 {
    let u = k * k - alpha;
    let xl = x * l;
    let f = u + xl;
    let e = (u * (u + 2.0 * xl)).max(0.0).sqrt();
    let be = beta * e;
    let thermal = if be > 700.0 {
        0.0
    } else if be > 0.0 {
        -(-(-be).exp()).ln_1p() / beta
    } else {
        // E → 0 only on gapless shells; the term diverges logarithmically, cut at machine scale
        -(f64::EPSILON).ln() / beta
    };
    thermal + 0.5 * xl * xl / (f + e)
}

/// `αx + V⁻¹ Σ_{k ∈ Λ*, |k| ≤ cutoff} [−β⁻¹ln(1 − e^{−βE_k}) + (f_k − E_k)/2]`.
pub fn lattice_p0b(model: &PotentialModel, pt: ThermoPoint, cfg: &LatticeConfig) -> Result<f64> {
    let pt = ThermoPoint::new(pt.beta, pt.alpha, pt.x)?;
    let sum: f64 = cfg
        .shells()
        .iter()
        .map(|s| s.multiplicity as f64 * mode_term(pt.beta, pt.alpha, pt.x, s.k, model.eval(s.k)))
        .sum();
    Ok(pt.alpha * pt.x + sum / cfg.volume())
}

/// Free-gas lattice pressure by direct enumeration of every momentum.
pub fn lattice_ideal_sum(beta: f64, alpha: f64, cfg: &LatticeConfig) -> Result<f64> {
    ThermoPoint::new(beta, alpha, 0.0)?;
    let h = TWO_PI / cfg.box_side;
    let n = (cfg.k_cutoff / h).floor() as i64;
    let kc2 = cfg.k_cutoff * cfg.k_cutoff;
    let mut sum = 0.0;
    for a in -n..=n {
        for b in -n..=n {
            for c in -n..=n {
                if a == 0 && b == 0 && c == 0 {
                    continue;
                }
                let k2 = h * h * (a * a + b * b + c * c) as f64;
                if k2 > kc2 * (1.0 + 1e-12) {
                    continue;
                }
                sum -= (-(-beta * (k2 - alpha)).exp()).ln_1p() / beta;
            }
        }
    }
    Ok(sum / cfg.volume())
}

/// One row of a lattice convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeRow {
    pub box_side: f64,
    pub lattice: f64,
    pub integral: f64,
    pub error: f64,
}

/// Lattice sums against the radial integral for a sequence of box sides.
pub fn lattice_check(
    gas: &Gas,
    pt: ThermoPoint,
    sides: &[f64],
    k_cutoff: f64,
) -> Result<Vec<LatticeRow>> {
    let integral = gas.bog.p0b(pt)?;
    sides
        .iter()
        .map(|&l| {
            let cfg = LatticeConfig::new(l, k_cutoff)?;
            let lattice = lattice_p0b(gas.model(), pt, &cfg)?;
            Ok(LatticeRow {
                box_side: l,
                lattice,
                integral,
                error: (lattice - integral).abs(),
            })
        })
        .collect()
}

/// Evenly spaced points on `[0, max]`.
pub fn uniform_axis(max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

/// Axis on `[0, max]` with `edges.0` and `edges.1` as nodes, spacing about `max/(n−1)`.
pub fn aligned_axis(max: f64, edges: (f64, f64), n: usize) -> Vec<f64> {
    let h = max / (n.max(2) - 1) as f64;
    let mut out = vec![0.0];
    let push_to = |out: &mut Vec<f64>, end: f64| {
        let start = *out.last().unwrap();
        let m = ((end - start) / h).ceil().max(1.0) as usize;
        for i in 1..=m {
            out.push(start + (end - start) * i as f64 / m as f64);
        }
    };
    for e in [edges.0, edges.1, max] {
        if e > *out.last().unwrap() {
            push_to(&mut out, e);
        }
    }
    out
}

// trapezoid-style node widths
fn node_widths(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|i| {
            let l = if i > 0 { a[i] - a[i - 1] } else { 0.0 };
            let r = if i + 1 < n { a[i + 1] - a[i] } else { 0.0 };
            0.5 * (l + r)
        })
        .collect()
}

/// `fˢᴮ(β, ·, ·)` tabulated on a grid; independent of `μ`, `γ` and `V`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeEnergyField {
    pub beta: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Row-major in `x`.
    pub fsb: Vec<f64>,
}

impl FreeEnergyField {
    pub fn new(gas: &Gas, beta: f64, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let cols: Vec<Vec<f64>> = x
            .par_iter()
            .map(|&xi| f0b_column(gas, beta, xi, &y).map(|c| c.iter().map(|p| p.fsb).collect()))
            .collect::<Result<_>>()?;
        Ok(FreeEnergyField {
            beta,
            x,
            y,
            fsb: cols.into_iter().flatten().collect(),
        })
    }

    pub fn uniform(
        gas: &Gas,
        beta: f64,
        n: (usize, usize),
        x_max: f64,
        y_max: f64,
    ) -> Result<Self> {
        Self::new(
            gas,
            beta,
            uniform_axis(x_max, n.0),
            uniform_axis(y_max, n.1),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basin {
    Normal,
    Condensed,
}

/// Condensed iff `x > x₊/2` and `y` lies on the `y₊` side of `(ρ₋ + y₊)/2`.
pub fn basin_of(x: f64, y: f64, tr: &PhaseTransition) -> Basin {
    let mid = 0.5 * (tr.rho_minus + tr.y_plus);
    let y_side = if tr.y_plus >= tr.rho_minus {
        y > mid
    } else {
        y < mid
    };
    if x > 0.5 * tr.x_plus && y_side {
        Basin::Condensed
    } else {
        Basin::Normal
    }
}

/// Normalized Laplace weights on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightGrid {
    pub beta: f64,
    pub mu: f64,
    pub gamma: f64,
    pub volume: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Normalized log-weights, row-major in `x`.
    pub log_weights: Vec<f64>,
    pub weights: Vec<f64>,
    pub basins: Option<Vec<Basin>>,
}

fn log_sum_exp(it: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = it.clone().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + it.map(|v| (v - m).exp()).sum::<f64>().ln()
}

fn raw_log_weights(field: &FreeEnergyField, mu: f64, gamma: f64, volume: f64) -> Vec<f64> {
    let bv = field.beta * volume;
    let (wx, wy) = (node_widths(&field.x), node_widths(&field.y));
    let ny = field.y.len();
    field
        .fsb
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let (i, j) = (k / ny, k % ny);
            let area = wx[i] * wy[j];
            if area <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let s = field.x[i] + field.y[j];
            bv * (mu * s - f) + gamma * s + area.ln()
        })
        .collect()
}

/// Weight field `∝ exp(βV(μs − fˢᴮ) + γs)` with cell areas, normalized in log domain.
pub fn laplace_weight_grid(
    field: &FreeEnergyField,
    mu: f64,
    gamma: f64,
    volume: f64,
    transition: Option<&PhaseTransition>,
) -> Result<WeightGrid> {
    if !(volume > 0.0) {
        return Err(Error::domain(format!(
            "volume must be positive, got {volume}"
        )));
    }
    let raw = raw_log_weights(field, mu, gamma, volume);
    let norm = log_sum_exp(raw.iter().cloned());
    if !norm.is_finite() {
        return Err(Error::Underflow(format!(
            "no finite weight at V = {volume}; use a larger grid or a smaller volume"
        )));
    }
    let log_weights: Vec<f64> = raw.iter().map(|v| v - norm).collect();
    let weights = log_weights.iter().map(|v| v.exp()).collect();
    let ny = field.y.len();
    let basins = transition.map(|tr| {
        (0..raw.len())
            .map(|k| basin_of(field.x[k / ny], field.y[k % ny], tr))
            .collect()
    });
    Ok(WeightGrid {
        beta: field.beta,
        mu,
        gamma,
        volume,
        x: field.x.clone(),
        y: field.y.clone(),
        log_weights,
        weights,
        basins,
    })
}

impl WeightGrid {
    fn coords(&self, k: usize) -> (f64, f64) {
        let ny = self.y.len();
        (self.x[k / ny], self.y[k % ny])
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mean_x(&self) -> f64 {
        (0..self.weights.len())
            .map(|k| self.weights[k] * self.coords(k).0)
            .sum()
    }

    pub fn mean_density(&self) -> f64 {
        (0..self.weights.len())
            .map(|k| {
                let (x, y) = self.coords(k);
                self.weights[k] * (x + y)
            })
            .sum()
    }

    /// Mass of nodes within one grid step (per axis) of `(x0, y0)`.
    pub fn mass_near(&self, x0: f64, y0: f64) -> f64 {
        let step = |a: &[f64]| a.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let (hx, hy) = (step(&self.x), step(&self.y));
        (0..self.weights.len())
            .filter(|&k| {
                let (x, y) = self.coords(k);
                (x - x0).abs() <= hx && (y - y0).abs() <= hy
            })
            .map(|k| self.weights[k])
            .sum()
    }

    /// `ln` of the mass of nodes inside a closed rectangle.
    pub fn log_mass_rect(&self, rect: &Rect) -> f64 {
        let idx: Vec<usize> = (0..self.weights.len())
            .filter(|&k| {
                let (x, y) = self.coords(k);
                rect.contains(x, y)
            })
            .collect();
        log_sum_exp(idx.iter().map(|&k| self.log_weights[k]))
    }
}

/// `(mass_normal, mass_condensed)` of a weight grid built with transition data.
pub fn basin_masses(wg: &WeightGrid, tr: &PhaseTransition) -> (f64, f64) {
    let mut m = (0.0, 0.0);
    for (k, w) in wg.weights.iter().enumerate() {
        let (x, y) = wg.coords(k);
        match basin_of(x, y, tr) {
            Basin::Normal => m.0 += w,
            Basin::Condensed => m.1 += w,
        }
    }
    m
}

/// Basin-resolved tilted law at `μ_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiAverage {
    pub gamma: f64,
    pub volume: f64,
    /// Masses with each untilted basin normalized to one.
    pub mass_normal: f64,
    pub mass_condensed: f64,
    /// `E[x]` and `E[x + y]` under the basin-normalized law.
    pub mean_x: f64,
    pub mean_density: f64,
    /// Masses of the raw tilted weight grid.
    pub raw_mass_normal: f64,
    pub raw_mass_condensed: f64,
    /// Raw untilted weight ratio condensed/normal.
    pub theta: f64,
}

/// Two-basin decomposition at `μ_c` with tilt `γ`.
///
/// With `Z±` the untilted basin weights and `L± = e^{βV(μ_c s − fˢᴮ)}/Z±` on
/// each basin, the condensed mass is `∫e^{γs}dL₊ / (∫e^{γs}dL₋ + ∫e^{γs}dL₊)`.
pub fn quasi_average(
    field: &FreeEnergyField,
    tr: &PhaseTransition,
    gamma: f64,
    volume: f64,
) -> Result<QuasiAverage> {
    let lw0 = raw_log_weights(field, tr.mu_c, 0.0, volume);
    let ny = field.y.len();
    let coords = |k: usize| (field.x[k / ny], field.y[k % ny]);
    let in_basin = |b: Basin| {
        (0..lw0.len())
            .filter(move |&k| {
                let (x, y) = coords(k);
                basin_of(x, y, tr) == b
            })
            .collect::<Vec<usize>>()
    };
    let (idx_n, idx_c) = (in_basin(Basin::Normal), in_basin(Basin::Condensed));
    let ln_z = |idx: &[usize]| log_sum_exp(idx.iter().map(|&k| lw0[k]));
    let (zn, zc) = (ln_z(&idx_n), ln_z(&idx_c));
    if !zn.is_finite() || !zc.is_finite() {
        return Err(Error::Underflow(format!(
            "a basin carries no finite weight at V = {volume}; refine or enlarge the grid"
        )));
    }
    let tilt = |k: usize| {
        let (x, y) = coords(k);
        gamma * (x + y)
    };
    let ln_t = |idx: &[usize], z: f64| log_sum_exp(idx.iter().map(|&k| lw0[k] - z + tilt(k)));
    let (tn, tc) = (ln_t(&idx_n, zn), ln_t(&idx_c, zc));
    let ln_total = log_sum_exp([tn, tc].into_iter());
    let mass_condensed = (tc - ln_total).exp();
    let mass_normal = (tn - ln_total).exp();

    let mut mean_x = 0.0;
    let mut mean_density = 0.0;
    for (idx, z) in [(&idx_n, zn), (&idx_c, zc)] {
        for &k in idx.iter() {
            let w = (lw0[k] - z + tilt(k) - ln_total).exp();
            let (x, y) = coords(k);
            mean_x += w * x;
            mean_density += w * (x + y);
        }
    }

    let raw_c = tc + zc;
    let raw_n = tn + zn;
    let raw_total = log_sum_exp([raw_n, raw_c].into_iter());
    Ok(QuasiAverage {
        gamma,
        volume,
        mass_normal,
        mass_condensed,
        mean_x,
        mean_density,
        raw_mass_normal: (raw_n - raw_total).exp(),
        raw_mass_condensed: (raw_c - raw_total).exp(),
        theta: (zc - zn).exp(),
    })
}

/// Closed rectangle in the `(x, y)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Rect {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let tol = 1e-12;
        x >= self.x.0 - tol && x <= self.x.1 + tol && y >= self.y.0 - tol && y <= self.y.1 + tol
    }
}

/// `(1/βV) ln P_V(rect)` for one volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LdRow {
    pub volume: f64,
    pub scaled_log_mass: f64,
}

/// Scaled log-masses of `rect` on a grid whose nodes include the rectangle edges.
///
/// The grid spans `[0, margin·x₁] × [0, margin·y₁]` with about `n` nodes per axis.
pub fn ld_convergence_check(
    gas: &Gas,
    beta: f64,
    mu: f64,
    volumes: &[f64],
    rect: &Rect,
    n: usize,
) -> Result<Vec<LdRow>> {
    let x_max = 1.05 * rect.x.1;
    let y_max = 1.05 * rect.y.1;
    let field = FreeEnergyField::new(
        gas,
        beta,
        aligned_axis(x_max, rect.x, n),
        aligned_axis(y_max, rect.y, n),
    )?;
    ld_rows(&field, mu, volumes, rect)
}

/// As [`ld_convergence_check`] on a precomputed field.
pub fn ld_rows(
    field: &FreeEnergyField,
    mu: f64,
    volumes: &[f64],
    rect: &Rect,
) -> Result<Vec<LdRow>> {
    volumes
        .iter()
        .map(|&v| {
            let wg = laplace_weight_grid(field, mu, 0.0, v, None)?;
            Ok(LdRow {
                volume: v,
                scaled_log_mass: wg.log_mass_rect(rect) / (field.beta * v),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_counts() {
        let cfg = LatticeConfig::new(TWO_PI, 2.0).unwrap();
        let s = cfg.shells();
        let m: Vec<u64> = s.iter().map(|s| s.multiplicity).collect();
        // |n|² = 1, 2, 3, 4 carry 6, 12, 8, 6 points
        assert_eq!(m, vec![6, 12, 8, 6]);
        assert!((s[1].k - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_lattice() {
        assert!(LatticeConfig::new(1.0, 1.0).is_err());
        assert!(LatticeConfig::new(-1.0, 10.0).is_err());
    }

    #[test]
    fn single_shell_by_hand() {
        let l: f64 = 4.0;
        let cfg = LatticeConfig::new(l, 1.2 * TWO_PI / l).unwrap();
        let model = PotentialModel::gaussian(1.0, 1.0);
        let (beta, alpha, x) = (1.0, -0.5, 0.7);
        let v = lattice_p0b(&model, ThermoPoint::new(beta, alpha, x).unwrap(), &cfg).unwrap();
        let k = TWO_PI / l;
        let lam = (-0.5 * k * k).exp();
        let u = k * k - alpha;
        let f = u + x * lam;
        let e = (f * f - x * x * lam * lam).sqrt();
        let term = -(1.0 - (-beta * e).exp()).ln() / beta + 0.5 * (f - e);
        let hand = alpha * x + 6.0 * term / l.powi(3);
        assert!((v - hand).abs() < 1e-14, "{v} vs {hand}");
    }

    #[test]
    fn ideal_gas_identity() {
        let model = PotentialModel::gaussian(1.0, 1.0);
        let cfg = LatticeConfig::new(12.0, 7.0).unwrap();
        let a = lattice_p0b(&model, ThermoPoint::new(1.0, -0.4, 0.0).unwrap(), &cfg).unwrap();
        let b = lattice_ideal_sum(1.0, -0.4, &cfg).unwrap();
        assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn aligned_axis_hits_edges() {
        let a = aligned_axis(2.1, (1.0, 2.0), 30);
        assert!(a.contains(&1.0) && a.contains(&2.0));
        assert_eq!(*a.last().unwrap(), 2.1);
        assert!(a.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn weights_normalize() {
        let gas = Gas::new(PotentialModel::gaussian(1.0, 1.0));
        let field = FreeEnergyField::uniform(&gas, 1.0, (12, 12), 0.5, 0.5).unwrap();
        let wg = laplace_weight_grid(&field, -0.5, 0.0, 1e3, None).unwrap();
        assert!((wg.total() - 1.0).abs() < 1e-12);
        assert!(wg.weights.iter().all(|&w| w >= 0.0));
        assert!(laplace_weight_grid(&field, -0.5, 0.0, -1.0, None).is_err());
    }
}
