//! Run configuration: a sectioned TOML file of flat keys, merged with
//! command-line overrides and validated before any computation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::quad::QuadConfig;
use crate::variational::MuScan;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub family: Option<String>,
    pub lambda0: Option<f64>,
    pub sigma: Option<f64>,
    pub kc: Option<f64>,
    pub kr: Option<f64>,
}

/// A density, or the midpoint of the plateau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoSpec {
    Value(f64),
    Named(NamedRho),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedRho {
    Midpoint,
}

impl std::str::FromStr for RhoSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("midpoint") {
            return Ok(RhoSpec::Named(NamedRho::Midpoint));
        }
        s.parse::<f64>()
            .map(RhoSpec::Value)
            .map_err(|_| format!("expected a number or `midpoint`, got `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub beta: Option<f64>,
    pub mu: Option<f64>,
    pub rho: Option<RhoSpec>,
    pub alpha: Option<f64>,
    pub x: Option<f64>,
    pub gamma: Option<f64>,
    pub mu_min: Option<f64>,
    pub mu_max: Option<f64>,
    pub mu_steps: Option<usize>,
    pub rho_min: Option<f64>,
    pub rho_max: Option<f64>,
    pub rho_steps: Option<usize>,
    pub x_max: Option<f64>,
    pub y_max: Option<f64>,
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_intervals: Option<usize>,
    pub k_cutoff: Option<f64>,
    pub box_sides: Option<Vec<f64>>,
    pub volumes: Option<Vec<f64>>,
    pub scan_mu_min: Option<f64>,
    pub scan_mu_max: Option<f64>,
    pub scan_steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("expected `csv` or `json`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub potential: PotentialSection,
    #[serde(default)]
    pub physics: PhysicsSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn missing(key: &str) -> Error {
    Error::config(key, "missing required value")
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(
            key,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn finite(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(key, format!("must be finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| {
            let msg = e.message().to_string();
            let key = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("unknown field"))
                .unwrap_or("config")
                .to_string();
            // qualify with the nearest section header above the error
            let section =
                e.span()
                    .and_then(|sp| {
                        s[..sp.start].lines().rev().find_map(|l| {
                            l.trim().strip_prefix('[')?.strip_suffix(']').map(str::trim)
                        })
                    })
                    .filter(|_| key != "config");
            let key = match section {
                Some(sec) => format!("{sec}.{key}"),
                None => key,
            };
            Error::config(key, msg)
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(mut self, over: &RunConfig) -> Self {
        macro_rules! take {
            ($sec:ident: $($f:ident),*) => {
                $( if over.$sec.$f.is_some() { self.$sec.$f = over.$sec.$f.clone(); } )*
            };
        }
        take!(potential: family, lambda0, sigma, kc, kr);
        take!(physics: beta, mu, rho, alpha, x, gamma, mu_min, mu_max, mu_steps, rho_min, rho_max,
              rho_steps, x_max, y_max, grid);
        take!(numerics: rel_tol, abs_tol, max_intervals, k_cutoff, box_sides, volumes, scan_mu_min,
              scan_mu_max, scan_steps);
        take!(output: format, path);
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    /// The potential, validated against the admissibility bounds.
    pub fn model(&self) -> Result<PotentialModel> {
        let p = &self.potential;
        let family = p
            .family
            .as_deref()
            .ok_or_else(|| missing("potential.family"))?;
        let l0 = positive(
            "potential.lambda0",
            p.lambda0.ok_or_else(|| missing("potential.lambda0"))?,
        )?;
        let shape = |key: &str, v: Option<f64>| -> Result<f64> {
            positive(key, v.ok_or_else(|| missing(key))?)
        };
        let model = match family {
            "gaussian" => PotentialModel::gaussian(l0, shape("potential.sigma", p.sigma)?),
            "flat_cutoff" => PotentialModel::flat_cutoff(l0, shape("potential.kc", p.kc)?),
            "rational" => PotentialModel::rational(l0, shape("potential.kr", p.kr)?),
            other => {
                return Err(Error::config(
                    "potential.family",
                    format!("unknown family `{other}` (gaussian, flat_cutoff, rational)"),
                ))
            }
        };
        Ok(model)
    }

    pub fn beta(&self) -> Result<f64> {
        positive(
            "physics.beta",
            self.physics.beta.ok_or_else(|| missing("physics.beta"))?,
        )
    }

    pub fn quad(&self) -> Result<QuadConfig> {
        let mut q = QuadConfig::default();
        if let Some(v) = self.numerics.rel_tol {
            q.rel_tol = positive("numerics.rel_tol", v)?;
        }
        if let Some(v) = self.numerics.abs_tol {
            q.abs_tol = positive("numerics.abs_tol", v)?;
        }
        if let Some(v) = self.numerics.max_intervals {
            if v == 0 {
                return Err(Error::config("numerics.max_intervals", "must be ≥ 1"));
            }
            q.max_intervals = v;
        }
        Ok(q)
    }

    /// μ range searched for the transition.
    pub fn transition_scan(&self) -> Result<MuScan> {
        let d = MuScan::default();
        let n = &self.numerics;
        let scan = MuScan {
            mu_min: finite("numerics.scan_mu_min", n.scan_mu_min.unwrap_or(d.mu_min))?,
            mu_max: finite("numerics.scan_mu_max", n.scan_mu_max.unwrap_or(d.mu_max))?,
            steps: n.scan_steps.unwrap_or(d.steps),
        };
        if scan.mu_max <= scan.mu_min {
            return Err(Error::config(
                "numerics.scan_mu_max",
                "must exceed scan_mu_min",
            ));
        }
        if scan.steps < 2 {
            return Err(Error::config("numerics.scan_steps", "must be ≥ 2"));
        }
        Ok(scan)
    }

    /// Exactly one of `physics.mu` and `physics.rho`.
    pub fn mu_or_rho(&self) -> Result<MuOrRho> {
        match (self.physics.mu, self.physics.rho) {
            (Some(m), None) => Ok(MuOrRho::Mu(finite("physics.mu", m)?)),
            (None, Some(RhoSpec::Value(r))) => {
                Ok(MuOrRho::Rho(RhoSpec::Value(positive("physics.rho", r)?)))
            }
            (None, Some(r)) => Ok(MuOrRho::Rho(r)),
            (Some(_), Some(_)) => Err(Error::config(
                "physics.mu",
                "set exactly one of `mu` and `rho`",
            )),
            (None, None) => Err(Error::config(
                "physics.mu",
                "set exactly one of `mu` and `rho`",
            )),
        }
    }

    pub fn rho(&self) -> Result<RhoSpec> {
        match self.physics.rho {
            Some(RhoSpec::Value(r)) => Ok(RhoSpec::Value(positive("physics.rho", r)?)),
            Some(r) => Ok(r),
            None => Err(missing("physics.rho")),
        }
    }

    pub fn range(&self, lo: &str, hi: &str, steps: &str) -> Result<(f64, f64, usize)> {
        let p = &self.physics;
        let get = |k: &str| -> Option<f64> {
            match k {
                "mu_min" => p.mu_min,
                "mu_max" => p.mu_max,
                "rho_min" => p.rho_min,
                "rho_max" => p.rho_max,
                _ => None,
            }
        };
        let key = |k: &str| format!("physics.{k}");
        let a = finite(&key(lo), get(lo).ok_or_else(|| missing(&key(lo)))?)?;
        let b = finite(&key(hi), get(hi).ok_or_else(|| missing(&key(hi)))?)?;
        if b <= a {
            return Err(Error::config(key(hi), format!("must exceed {lo}")));
        }
        let n = match steps {
            "mu_steps" => p.mu_steps,
            _ => p.rho_steps,
        }
        .unwrap_or(100);
        if n < 2 {
            return Err(Error::config(key(steps), "must be ≥ 2"));
        }
        Ok((a, b, n))
    }

    pub fn grid(&self) -> Result<usize> {
        let g = self.physics.grid.unwrap_or(crate::rates::DEFAULT_GRID);
        if g < 3 {
            return Err(Error::config("physics.grid", "must be ≥ 3"));
        }
        Ok(g)
    }

    pub fn volumes(&self) -> Result<Vec<f64>> {
        let v = self
            .numerics
            .volumes
            .clone()
            .unwrap_or_else(|| vec![1e2, 1e3, 1e4, 1e5]);
        for &x in &v {
            positive("numerics.volumes", x)?;
        }
        if v.is_empty() {
            return Err(Error::config("numerics.volumes", "empty list"));
        }
        Ok(v)
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuOrRho {
    Mu(f64),
    Rho(RhoSpec),
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[potential]
family = "gaussian"
lambda0 = 50.0
sigma = 0.5

[physics]
beta = 1.0
rho = "midpoint"
"#;

    #[test]
    fn parses_sections() {
        let c = RunConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(c.model().unwrap(), PotentialModel::gaussian(50.0, 0.5));
        assert_eq!(c.rho().unwrap(), RhoSpec::Named(NamedRho::Midpoint));
    }

    #[test]
    fn missing_lambda0_names_key() {
        let c =
            RunConfig::from_toml_str("[potential]\nfamily = \"gaussian\"\nsigma = 1.0\n").unwrap();
        let e = c.model().unwrap_err();
        assert!(e.is_config());
        assert!(e.to_string().contains("potential.lambda0"), "{e}");
    }

    #[test]
    fn unknown_key_is_config_error() {
        let e = RunConfig::from_toml_str("[physics]\nbta = 1.0\n").unwrap_err();
        assert!(e.is_config());
        assert!(e.to_string().contains("bta"), "{e}");
    }

    #[test]
    fn overrides_win() {
        let base = RunConfig::from_toml_str(SAMPLE).unwrap();
        let mut over = RunConfig::default();
        over.physics.beta = Some(2.0);
        let m = base.merge(&over);
        assert_eq!(m.beta().unwrap(), 2.0);
        assert_eq!(m.potential.lambda0, Some(50.0));
    }

    #[test]
    fn mu_and_rho_exclusive() {
        let mut c = RunConfig::from_toml_str(SAMPLE).unwrap();
        c.physics.mu = Some(1.0);
        assert!(c.mu_or_rho().unwrap_err().is_config());
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig::from_toml_str(SAMPLE).unwrap();
        let again = RunConfig::from_toml_str(&c.to_toml()).unwrap();
        assert_eq!(c, again);
    }
}
