//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature for vector-valued
//! integrands, plus a semi-infinite variant used for the radial momentum
//! integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_intervals: 2000,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    // integral of |f|, the scale for sign-changing components
    l1: [f64; N],
    // largest per-component error, used as the heap key
    key: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl<const N: usize> Eq for Panel<N> {}

impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod<F, const N: usize>(f: &F, a: f64, b: f64) -> ([f64; N], [f64; N], [f64; N])
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut res_k = [0.0; N];
    let mut res_g = [0.0; N];
    let mut res_abs = [0.0; N];
    let mut fv = [[0.0; N]; 20];

    for i in 0..N {
        res_k[i] = WGK[10] * fc[i];
        res_abs[i] = (WGK[10] * fc[i]).abs();
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for i in 0..N {
            res_k[i] += WGK[j] * (f1[i] + f2[i]);
            res_abs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                res_g[i] += WG[j / 2] * (f1[i] + f2[i]);
            }
        }
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    let mut l1 = [0.0; N];
    for i in 0..N {
        let mean = 0.5 * res_k[i];
        let mut res_asc = WGK[10] * (fc[i] - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((fv[2 * j][i] - mean).abs() + (fv[2 * j + 1][i] - mean).abs());
        }
        let h = half.abs();
        value[i] = res_k[i] * half;
        l1[i] = res_abs[i] * h;
        error[i] = rescale_error((res_k[i] - res_g[i]) * half, res_abs[i] * h, res_asc * h);
    }
    (value, error, l1)
}

fn panel<F, const N: usize>(f: &F, a: f64, b: f64) -> Panel<N>
where
    F: Fn(f64) -> [f64; N],
{
    let (value, error, l1) = kronrod(f, a, b);
    let key = error.iter().cloned().fold(0.0, f64::max);
    Panel {
        a,
        b,
        value,
        error,
        l1,
        key,
    }
}

// Relative accuracy is measured against ∫|f| so that sign-changing
// components with near-zero integrals still terminate.
fn target(total: f64, l1: f64, cfg: &QuadConfig) -> f64 {
    cfg.abs_tol.max(cfg.rel_tol * total.abs().max(l1))
}

/// Integrates a vector-valued `f` over `[a, b]`, starting from the given
/// breakpoints (interior points, sorted, may be empty).
pub fn integrate_with_breaks<F, const N: usize>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    let mut heap = BinaryHeap::new();
    let mut lo = a;
    for &p in breaks.iter().filter(|&&p| p > a && p < b) {
        heap.push(panel(&f, lo, p));
        lo = p;
    }
    heap.push(panel(&f, lo, b));

    loop {
        let mut total = [0.0; N];
        let mut err = [0.0; N];
        let mut l1 = [0.0; N];
        for p in heap.iter() {
            for i in 0..N {
                total[i] += p.value[i];
                err[i] += p.error[i];
                l1[i] += p.l1[i];
            }
        }
        if (0..N).all(|i| err[i] <= target(total[i], l1[i], cfg)) {
            return Ok(total);
        }
        if heap.len() >= cfg.max_intervals {
            let (achieved, requested) = (0..N)
                .map(|i| (err[i], target(total[i], l1[i], cfg)))
                .max_by(|x, y| (x.0 / x.1).total_cmp(&(y.0 / y.1)))
                .unwrap_or((0.0, 0.0));
            return Err(Error::Quadrature {
                achieved,
                requested,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point; accept it.
            let frozen = Panel {
                key: 0.0,
                error: [0.0; N],
                ..worst
            };
            heap.push(frozen);
            continue;
        }
        heap.push(panel(&f, worst.a, mid));
        heap.push(panel(&f, mid, worst.b));
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F, const N: usize>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    integrate_with_breaks(f, a, b, &[], cfg)
}

/// Integrates `f` over `[0, inf)`: `[0, split]` directly and the tail through
/// the map `k = split + t / (1 - t)`.
pub fn integrate_half_line<F, const N: usize>(
    f: F,
    split: f64,
    cfg: &QuadConfig,
) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    integrate_half_line_with_breaks(f, &[0.25 * split, 0.5 * split], split, cfg)
}

/// As [`integrate_half_line`] with explicit breakpoints inside `[0, split]`.
pub fn integrate_half_line_with_breaks<F, const N: usize>(
    f: F,
    breaks: &[f64],
    split: f64,
    cfg: &QuadConfig,
) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    let head = integrate_with_breaks(&f, 0.0, split, breaks, cfg)?;
    let mapped = |t: f64| {
        let s = 1.0 - t;
        let k = split + t / s;
        let jac = 1.0 / (s * s);
        let mut v = f(k);
        for c in v.iter_mut() {
            *c *= jac;
        }
        v
    };
    let tail = integrate_with_breaks(mapped, 0.0, 1.0, &[0.5, 0.75], cfg)?;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = head[i] + tail[i];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadConfig::default();
        let [v] = integrate(|x| [x.powi(7) - 3.0 * x * x], 0.0, 2.0, &cfg).unwrap();
        assert!((v - (32.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_half_line() {
        let cfg = QuadConfig::default();
        let [v] = integrate_half_line(|k| [(-k * k).exp()], 1.0, &cfg).unwrap();
        let exact = 0.5 * std::f64::consts::PI.sqrt();
        assert!((v - exact).abs() < 1e-14 * exact);
    }

    #[test]
    fn log_endpoint_singularity() {
        let cfg = QuadConfig::default();
        let [v] = integrate(|x| [x.ln()], 0.0, 1.0, &cfg).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn vector_components_share_panels() {
        let cfg = QuadConfig::default();
        let [a, b] = integrate(|x| [x.sin(), x.cos()], 0.0, std::f64::consts::PI, &cfg).unwrap();
        assert!((a - 2.0).abs() < 1e-13);
        assert!(b.abs() < 1e-13);
    }

    #[test]
    fn reports_nonconvergence() {
        let cfg = QuadConfig {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_intervals: 3,
        };
        let r = integrate(|x: f64| [(1.0 / x).sin()], 1e-6, 1.0, &cfg);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
