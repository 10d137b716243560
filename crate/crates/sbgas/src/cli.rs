//! Command-line front end. Every subcommand resolves a [`RunConfig`] from an
//! optional TOML file plus flag overrides, validates it, computes, and writes
//! CSV or JSON preceded by a header that echoes the resolved configuration.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bog_pressure::{Bogoliubov, ThermoPoint};
use crate::config::{Format, MuOrRho, NamedRho, RhoSpec, RunConfig};
use crate::error::{Error, Result};
use crate::finite_volume::{lattice_check, quasi_average, FreeEnergyField};
use crate::kac_mixture::{gamma_of_rho, kappa, limit_measure, xi};
use crate::rates::{
    superstability_bound, tabulate_d, tabulate_k, CondensateRate, JointRate, RateGrid,
};
use crate::variational::{Branch, Gas, PhaseTransition};

/// Environment variable fixing the worker-pool size.
pub const WORKERS_ENV: &str = "SBGAS_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "sbgas",
    version,
    about = "Superstable Bose gas: pressure, transition, rate functions"
)]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Omit the timestamp from output headers
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the potential and report moment and tail diagnostics
    #[command(allow_negative_numbers = true)]
    ValidatePotential,
    /// p₀ᴮ, ∂_α p₀ᴮ and depletion at (β, α, x)
    #[command(allow_negative_numbers = true)]
    Pressure,
    /// μ sweep: density, condensate and branch
    #[command(allow_negative_numbers = true)]
    PhaseDiagram,
    /// ρ sweep: μ_ρ and condensate density
    #[command(allow_negative_numbers = true)]
    CondensateCurve,
    /// K_μ on an (x, y) grid, or D_ρ on an x grid
    #[command(allow_negative_numbers = true)]
    RateDump,
    /// Limiting two-atom law at fixed ρ
    #[command(allow_negative_numbers = true)]
    Mixture,
    /// Laplace-surrogate basin masses over a volume sweep
    #[command(allow_negative_numbers = true)]
    KacSim,
    /// Momentum-lattice sums against the radial integral
    #[command(allow_negative_numbers = true)]
    LatticeCheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ValidatePotential => "validate-potential",
            Command::Pressure => "pressure",
            Command::PhaseDiagram => "phase-diagram",
            Command::CondensateCurve => "condensate-curve",
            Command::RateDump => "rate-dump",
            Command::Mixture => "mixture",
            Command::KacSim => "kac-sim",
            Command::LatticeCheck => "lattice-check",
        }
    }
}

/// Flags overriding config-file keys of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub family: Option<String>,
    #[arg(long, global = true)]
    pub lambda0: Option<f64>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub kc: Option<f64>,
    #[arg(long, global = true)]
    pub kr: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// A density or `midpoint`
    #[arg(long, global = true)]
    pub rho: Option<RhoSpec>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub x: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub mu_min: Option<f64>,
    #[arg(long, global = true)]
    pub mu_max: Option<f64>,
    #[arg(long, global = true)]
    pub mu_steps: Option<usize>,
    #[arg(long, global = true)]
    pub rho_min: Option<f64>,
    #[arg(long, global = true)]
    pub rho_max: Option<f64>,
    #[arg(long, global = true)]
    pub rho_steps: Option<usize>,
    #[arg(long, global = true)]
    pub x_max: Option<f64>,
    #[arg(long, global = true)]
    pub y_max: Option<f64>,
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub k_cutoff: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub box_sides: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub volumes: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub scan_mu_min: Option<f64>,
    #[arg(long, global = true)]
    pub scan_mu_max: Option<f64>,
    #[arg(long, global = true)]
    pub scan_steps: Option<usize>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Output file; stdout when absent
    #[arg(long, short, global = true)]
    pub output: Option<String>,
}

impl Overrides {
    fn to_config(&self) -> RunConfig {
        let mut c = RunConfig::default();
        let o = self.clone();
        c.potential.family = o.family;
        c.potential.lambda0 = o.lambda0;
        c.potential.sigma = o.sigma;
        c.potential.kc = o.kc;
        c.potential.kr = o.kr;
        c.physics.beta = o.beta;
        c.physics.mu = o.mu;
        c.physics.rho = o.rho;
        c.physics.alpha = o.alpha;
        c.physics.x = o.x;
        c.physics.gamma = o.gamma;
        c.physics.mu_min = o.mu_min;
        c.physics.mu_max = o.mu_max;
        c.physics.mu_steps = o.mu_steps;
        c.physics.rho_min = o.rho_min;
        c.physics.rho_max = o.rho_max;
        c.physics.rho_steps = o.rho_steps;
        c.physics.x_max = o.x_max;
        c.physics.y_max = o.y_max;
        c.physics.grid = o.grid;
        c.numerics.rel_tol = o.rel_tol;
        c.numerics.abs_tol = o.abs_tol;
        c.numerics.k_cutoff = o.k_cutoff;
        c.numerics.box_sides = o.box_sides;
        c.numerics.volumes = o.volumes;
        c.numerics.scan_mu_min = o.scan_mu_min;
        c.numerics.scan_mu_max = o.scan_mu_max;
        c.numerics.scan_steps = o.scan_steps;
        c.output.format = o.format;
        c.output.path = o.output;
        c
    }
}

/// Column of a CSV table, documented in the schema file.
#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
    pub description: &'static str,
}

const fn col(name: &'static str, unit: &'static str, description: &'static str) -> Column {
    Column {
        name,
        unit,
        description,
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Output of one subcommand before rendering.
#[derive(Debug, Clone)]
pub enum Payload {
    Table {
        columns: Vec<Column>,
        rows: Vec<Vec<Cell>>,
    },
    Document {
        fields: Vec<Column>,
        value: serde_json::Value,
    },
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: Command,
    /// Derived quantities echoed in the header, e.g. transition data.
    pub notes: Vec<(String, String)>,
    pub payload: Payload,
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Normal => "normal",
        Branch::Condensed => "condensed",
    }
}

fn transition_notes(tr: Option<&PhaseTransition>) -> Vec<(String, String)> {
    match tr {
        None => vec![("transition".into(), "none".into())],
        Some(t) => vec![
            ("mu_c".into(), format!("{:.16e}", t.mu_c)),
            ("rho_minus".into(), format!("{:.16e}", t.rho_minus)),
            ("rho_plus".into(), format!("{:.16e}", t.rho_plus)),
            ("x_plus".into(), format!("{:.16e}", t.x_plus)),
            ("y_plus".into(), format!("{:.16e}", t.y_plus)),
        ],
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

struct Ctx {
    cfg: RunConfig,
}

impl Ctx {
    fn gas(&self) -> Result<Gas> {
        let model = self.cfg.model()?;
        model.validate()?;
        Ok(Gas {
            bog: Bogoliubov::new(model).with_quad(self.cfg.quad()?),
        })
    }

    fn transition(&self, gas: &Gas, beta: f64) -> Result<Option<PhaseTransition>> {
        gas.find_transition(beta, &self.cfg.transition_scan()?)
    }

    fn resolve_rho(&self, spec: RhoSpec, tr: Option<&PhaseTransition>) -> Result<f64> {
        match spec {
            RhoSpec::Value(r) => Ok(r),
            RhoSpec::Named(NamedRho::Midpoint) => {
                tr.map(|t| 0.5 * (t.rho_minus + t.rho_plus)).ok_or_else(|| {
                    Error::config(
                        "physics.rho",
                        "`midpoint` needs a transition, none found at this β",
                    )
                })
            }
        }
    }
}

fn validate_potential(ctx: &Ctx) -> Result<Report> {
    let report = ctx.cfg.model()?.validate()?;
    Ok(Report {
        command: Command::ValidatePotential,
        notes: vec![],
        payload: Payload::Document {
            fields: vec![
                col(
                    "valid",
                    "bool",
                    "admissibility bounds hold on the test grid",
                ),
                col("cutoffs", "k", "cutoffs K for the truncated moments"),
                col("linear_moment", "k³·λ", "∫₀ᴷ k²λ(k) dk"),
                col("quadratic_moment", "k³·λ²", "∫₀ᴷ k²λ(k)² dk"),
                col("quadratic_moment_total", "k³·λ²", "∫₀^∞ k²λ(k)² dk"),
                col(
                    "tail_exponent",
                    "1",
                    "fitted p in λ ~ k^(-p); null if faster than any power",
                ),
                col("quadratic_tail_converges", "bool", "2p > 3"),
            ],
            value: serde_json::to_value(report).expect("serializable"),
        },
    })
}

fn pressure(ctx: &Ctx) -> Result<Report> {
    let gas = ctx.gas()?;
    let beta = ctx.cfg.beta()?;
    let alpha = ctx
        .cfg
        .physics
        .alpha
        .ok_or_else(|| Error::config("physics.alpha", "missing required value"))?;
    let x = ctx.cfg.physics.x.unwrap_or(0.0);
    let pt =
        ThermoPoint::new(beta, alpha, x).map_err(|e| Error::config("physics", e.to_string()))?;
    let s = gas.bog.state(pt)?;
    Ok(Report {
        command: Command::Pressure,
        notes: vec![],
        payload: Payload::Table {
            columns: vec![
                col("beta", "1/energy", "inverse temperature"),
                col("alpha", "energy", "effective chemical potential, ≤ 0"),
                col("x", "density", "condensate density"),
                col("p0b", "energy·density", "Bogoliubov pressure p₀ᴮ(β, α, x)"),
                col("dalpha", "density", "∂p₀ᴮ/∂α"),
                col("depletion", "density", "out-of-condensate density"),
            ],
            rows: vec![vec![
                Cell::Num(beta),
                Cell::Num(alpha),
                Cell::Num(x),
                Cell::Num(s.pressure),
                Cell::Num(s.dalpha),
                Cell::Num(s.depletion),
            ]],
        },
    })
}

fn phase_diagram(ctx: &Ctx) -> Result<Report> {
    let gas = ctx.gas()?;
    let beta = ctx.cfg.beta()?;
    let (a, b, n) = ctx.cfg.range("mu_min", "mu_max", "mu_steps")?;
    let tr = ctx.transition(&gas, beta)?;
    let rows: Vec<Vec<Cell>> = linspace(a, b, n)
        .par_iter()
        .map(|&mu| {
            let p = gas.pressure_sb(beta, mu)?;
            let s = p.dominant();
            Ok(vec![
                Cell::Num(mu),
                Cell::Num(p.pressure),
                Cell::Num(s.density()),
                Cell::Num(s.x_star),
                Cell::Num(s.y_star),
                Cell::Text(branch_name(s.branch).into()),
                Cell::Int(p.maximizers.len() as u64),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(Report {
        command: Command::PhaseDiagram,
        notes: transition_notes(tr.as_ref()),
        payload: Payload::Table {
            columns: vec![
                col("mu", "energy", "chemical potential"),
                col("pressure", "energy·density", "p(β, μ)"),
                col("rho", "density", "∂p/∂μ = (μ − α*)/λ₀"),
                col(
                    "x",
                    "density",
                    "condensate density of the dominant maximizer",
                ),
                col(
                    "y",
                    "density",
                    "depletion density of the dominant maximizer",
                ),
                col("branch", "", "normal (x = 0) or condensed"),
                col("maximizers", "count", "2 only at coexistence"),
            ],
            rows,
        },
    })
}

fn condensate_curve(ctx: &Ctx) -> Result<Report> {
    let gas = ctx.gas()?;
    let beta = ctx.cfg.beta()?;
    let (a, b, n) = ctx.cfg.range("rho_min", "rho_max", "rho_steps")?;
    if a <= 0.0 {
        return Err(Error::config("physics.rho_min", "must be positive"));
    }
    let tr = ctx.transition(&gas, beta)?;
    let rows: Vec<Vec<Cell>> = linspace(a, b, n)
        .par_iter()
        .map(|&rho| {
            let mu = gas.mu_of_rho(beta, rho, tr.as_ref())?;
            let x = gas.condensate_of_rho(beta, rho, tr.as_ref())?;
            Ok(vec![Cell::Num(rho), Cell::Num(mu), Cell::Num(x)])
        })
        .collect::<Result<_>>()?;
    Ok(Report {
        command: Command::CondensateCurve,
        notes: transition_notes(tr.as_ref()),
        payload: Payload::Table {
            columns: vec![
                col("rho", "density", "total density"),
                col(
                    "mu_rho",
                    "energy",
                    "chemical potential at density ρ; μ_c on the plateau",
                ),
                col("x", "density", "condensate density"),
            ],
            rows,
        },
    })
}

fn rate_dump(ctx: &Ctx) -> Result<Report> {
    let gas = ctx.gas()?;
    let beta = ctx.cfg.beta()?;
    let n = ctx.cfg.grid()?;
    match ctx.cfg.mu_or_rho()? {
        MuOrRho::Mu(mu) => {
            let bound = superstability_bound(&gas, beta, mu)?;
            let x_max = ctx.cfg.physics.x_max.unwrap_or(bound.m);
            let y_max = ctx.cfg.physics.y_max.unwrap_or(bound.m);
            let rate = JointRate::new(&gas, beta, mu)?;
            let grid = tabulate_k(&rate, n, n, x_max, y_max)?;
            let ys = grid.y.clone().expect("two-dimensional grid");
            let mut rows = Vec::with_capacity(grid.values.len());
            for (i, &x) in grid.x.iter().enumerate() {
                for (j, &y) in ys.iter().enumerate() {
                    rows.push(vec![
                        Cell::Num(x),
                        Cell::Num(y),
                        Cell::Num(RateGrid::reported(grid.values[i * ys.len() + j])),
                    ]);
                }
            }
            let mut notes = vec![
                ("pressure".to_string(), format!("{:.16e}", rate.pressure)),
                ("superstability_m".to_string(), format!("{:.16e}", bound.m)),
            ];
            for (k, z) in grid.minimizers.iter().enumerate() {
                notes.push((
                    format!("zero_{k}"),
                    format!("x={:.16e} y={:.16e}", z.x, z.y.unwrap_or(0.0)),
                ));
            }
            Ok(Report {
                command: Command::RateDump,
                notes,
                payload: Payload::Table {
                    columns: vec![
                        col("x", "density", "condensate density"),
                        col("y", "density", "depletion density"),
                        col(
                            "K",
                            "energy·density",
                            "K_μ(x, y); |K| < 1e-12 reported as 0",
                        ),
                    ],
                    rows,
                },
            })
        }
        MuOrRho::Rho(spec) => {
            let tr = ctx.transition(&gas, beta)?;
            let rho = ctx.resolve_rho(spec, tr.as_ref())?;
            let rate = CondensateRate::new(&gas, beta, rho, tr.as_ref())?;
            let x_max = match ctx.cfg.physics.x_max {
                Some(v) => v,
                None => superstability_bound(&gas, beta, rate.mu_rho)?.m,
            };
            let grid = tabulate_d(&rate, n, x_max)?;
            let rows = grid
                .x
                .iter()
                .zip(&grid.values)
                .map(|(&x, &d)| vec![Cell::Num(x), Cell::Num(RateGrid::reported(d))])
                .collect();
            let mut notes = transition_notes(tr.as_ref());
            notes.push(("mu_rho".into(), format!("{:.16e}", rate.mu_rho)));
            for (k, z) in grid.minimizers.iter().enumerate() {
                notes.push((format!("zero_{k}"), format!("x={:.16e}", z.x)));
            }
            Ok(Report {
                command: Command::RateDump,
                notes,
                payload: Payload::Table {
                    columns: vec![
                        col("x", "density", "condensate density"),
                        col("D", "energy·density", "D_ρ(x); |D| < 1e-12 reported as 0"),
                    ],
                    rows,
                },
            })
        }
    }
}

fn mixture(ctx: &Ctx) -> Result<Report> {
    let gas = ctx.gas()?;
    let beta = ctx.cfg.beta()?;
    let tr = ctx.transition(&gas, beta)?;
    let rho = ctx.resolve_rho(ctx.cfg.rho()?, tr.as_ref())?;
    let law = limit_measure(&gas, beta, rho, tr.as_ref())?;
    let (k, g, x) = match tr.as_ref() {
        Some(t) if rho > t.rho_minus && rho < t.rho_plus => {
            let g = gamma_of_rho(rho, t)?;
            (Some(kappa(rho, t)?), Some(g), Some(xi(g, t)))
        }
        Some(t) if t.contains(rho) => (Some(kappa(rho, t)?), None, None),
        _ => (None, None, None),
    };
    let value = json!({
        "rho": rho,
        "weights": { "normal": law.weight_normal, "condensed": law.weight_condensed },
        "peaks": {
            "normal": { "x": law.peak_normal.0, "y": law.peak_normal.1 },
            "condensed": { "x": law.peak_condensed.0, "y": law.peak_condensed.1 },
        },
        "uniform_phase": law.uniform_phase,
        "kappa": k,
        "gamma": g,
        "xi": x,
        "mean_condensate": law.mean_condensate(),
        "mean_density": law.mean_density(),
    });
    Ok(Report {
        command: Command::Mixture,
        notes: transition_notes(tr.as_ref()),
        payload: Payload::Document {
            fields: vec![
                col("rho", "density", "resolved density"),
                col("weights", "1", "masses of the normal and condensed atoms"),
                col("peaks", "density", "(x, y) of each atom"),
                col(
                    "uniform_phase",
                    "bool",
                    "condensate phase uniform on [0, 2π)",
                ),
                col("kappa", "1", "κ_ρ on the plateau, else null"),
                col(
                    "gamma",
                    "1/density",
                    "tilt γ_ρ inside the plateau, else null",
                ),
                col("xi", "1", "ξ at γ_ρ, equals 1 − κ_ρ"),
                col("mean_condensate", "density", "∫x dLaw"),
                col("mean_density", "density", "∫(x + y) dLaw"),
            ],
            value,
        },
    })
}

fn kac_sim(ctx: &Ctx) -> Result<Report> {
    let gas = ctx.gas()?;
    let beta = ctx.cfg.beta()?;
    let tr = ctx.transition(&gas, beta)?.ok_or_else(|| {
        Error::config("physics.beta", "no transition at this β; kac-sim needs one")
    })?;
    let rho = ctx.resolve_rho(ctx.cfg.rho()?, Some(&tr))?;
    let gamma = match ctx.cfg.physics.gamma {
        Some(g) => g,
        None => gamma_of_rho(rho, &tr).map_err(|e| Error::config("physics.rho", e.to_string()))?,
    };
    let volumes = ctx.cfg.volumes()?;
    let bound = superstability_bound(&gas, beta, tr.mu_c)?;
    let n = ctx.cfg.physics.grid.unwrap_or(512);
    let x_max = ctx.cfg.physics.x_max.unwrap_or(bound.m);
    let y_max = ctx.cfg.physics.y_max.unwrap_or(bound.m);
    let field = FreeEnergyField::uniform(&gas, beta, (n, n), x_max, y_max)?;
    let rows: Vec<Vec<Cell>> = volumes
        .par_iter()
        .map(|&v| {
            let q = quasi_average(&field, &tr, gamma, v)?;
            Ok(vec![
                Cell::Num(v),
                Cell::Num(q.mass_normal),
                Cell::Num(q.mass_condensed),
                Cell::Num(q.mean_x),
                Cell::Num(q.mean_density),
                Cell::Num(q.raw_mass_condensed),
                Cell::Num(q.theta),
            ])
        })
        .collect::<Result<_>>()?;
    let mut notes = transition_notes(Some(&tr));
    notes.push(("rho".into(), format!("{rho:.16e}")));
    notes.push(("gamma".into(), format!("{gamma:.16e}")));
    Ok(Report {
        command: Command::KacSim,
        notes,
        payload: Payload::Table {
            columns: vec![
                col("V", "volume", "dimensionless volume"),
                col(
                    "mass_normal",
                    "1",
                    "normal-basin mass, basins normalized separately",
                ),
                col(
                    "mass_condensed",
                    "1",
                    "condensed-basin mass, basins normalized separately",
                ),
                col("mean_x", "density", "E[x] under the basin-normalized law"),
                col(
                    "mean_density",
                    "density",
                    "E[x + y] under the basin-normalized law",
                ),
                col(
                    "raw_mass_condensed",
                    "1",
                    "condensed mass of the raw weight grid",
                ),
                col("theta", "1", "raw untilted weight ratio condensed/normal"),
            ],
            rows,
        },
    })
}

fn lattice(ctx: &Ctx) -> Result<Report> {
    let gas = ctx.gas()?;
    let beta = ctx.cfg.beta()?;
    let alpha = ctx
        .cfg
        .physics
        .alpha
        .ok_or_else(|| Error::config("physics.alpha", "missing required value"))?;
    let x = ctx.cfg.physics.x.unwrap_or(0.0);
    let pt =
        ThermoPoint::new(beta, alpha, x).map_err(|e| Error::config("physics", e.to_string()))?;
    let sides = ctx
        .cfg
        .numerics
        .box_sides
        .clone()
        .unwrap_or_else(|| vec![8.0, 16.0, 32.0, 64.0]);
    let cutoff = ctx.cfg.numerics.k_cutoff.unwrap_or(12.0);
    let rows = lattice_check(&gas, pt, &sides, cutoff)?
        .into_iter()
        .map(|r| {
            vec![
                Cell::Num(r.box_side),
                Cell::Num(r.lattice),
                Cell::Num(r.integral),
                Cell::Num(r.error),
            ]
        })
        .collect();
    Ok(Report {
        command: Command::LatticeCheck,
        notes: vec![],
        payload: Payload::Table {
            columns: vec![
                col("L", "length", "box side"),
                col("lattice_p0b", "energy·density", "momentum-lattice sum"),
                col("integral", "energy·density", "radial integral p₀ᴮ"),
                col("error", "energy·density", "absolute difference"),
            ],
            rows,
        },
    })
}

/// Resolves the configuration: file first, then flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let base = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    Ok(base.merge(&cli.overrides.to_config()))
}

/// Computes the report for a resolved configuration.
pub fn compute(command: Command, cfg: RunConfig) -> Result<Report> {
    // fail on configuration before any numerics run
    cfg.model()?;
    cfg.quad()?;
    cfg.transition_scan()?;
    cfg.grid()?;
    cfg.volumes()?;
    if command != Command::ValidatePotential {
        cfg.beta()?;
    }
    let ctx = Ctx { cfg };
    match command {
        Command::ValidatePotential => validate_potential(&ctx),
        Command::Pressure => pressure(&ctx),
        Command::PhaseDiagram => phase_diagram(&ctx),
        Command::CondensateCurve => condensate_curve(&ctx),
        Command::RateDump => rate_dump(&ctx),
        Command::Mixture => mixture(&ctx),
        Command::KacSim => kac_sim(&ctx),
        Command::LatticeCheck => lattice(&ctx),
    }
}

fn header_lines(report: &Report, cfg: &RunConfig, deterministic: bool) -> Vec<String> {
    let mut out = vec![format!(
        "sbgas {} {}",
        env!("CARGO_PKG_VERSION"),
        report.command.name()
    )];
    if !deterministic {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        out.push(format!("generated_unix = {secs}"));
    }
    out.extend(
        cfg.to_toml()
            .lines()
            .filter(|l| !l.is_empty())
            .map(str::to_string),
    );
    if !report.notes.is_empty() {
        out.push("[derived]".into());
        out.extend(report.notes.iter().map(|(k, v)| format!("{k} = {v}")));
    }
    out
}

/// Renders the report in the configured format.
pub fn render(report: &Report, cfg: &RunConfig, deterministic: bool) -> Result<String> {
    let header = header_lines(report, cfg, deterministic);
    match (cfg.format(), &report.payload) {
        (Format::Csv, Payload::Table { columns, rows }) => {
            let mut buf: Vec<u8> = Vec::new();
            for l in &header {
                writeln!(buf, "# {l}").expect("write to memory");
            }
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(columns.iter().map(|c| c.name))
                    .map_err(|e| Error::config("output", e.to_string()))?;
                for r in rows {
                    w.write_record(r.iter().map(Cell::render))
                        .map_err(|e| Error::config("output", e.to_string()))?;
                }
                w.flush()
                    .map_err(|e| Error::config("output", e.to_string()))?;
            }
            Ok(String::from_utf8(buf).expect("utf-8 output"))
        }
        // documents have no tabular form and are always JSON
        (_, payload) => {
            let body = match payload {
                Payload::Table { columns, rows } => {
                    let rows: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|r| {
                            serde_json::Value::Object(
                                columns
                                    .iter()
                                    .zip(r)
                                    .map(|(c, v)| (c.name.to_string(), v.json()))
                                    .collect(),
                            )
                        })
                        .collect();
                    json!(rows)
                }
                Payload::Document { value, .. } => value.clone(),
            };
            let doc = json!({ "header": header, "data": body });
            Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n")
        }
    }
}

/// JSON schema-like description of a subcommand's output.
pub fn schema(report: &Report, format: Format) -> String {
    let format = match report.payload {
        Payload::Document { .. } => Format::Json,
        Payload::Table { .. } => format,
    };
    let (kind, fields) = match &report.payload {
        Payload::Table { columns, .. } => ("table", columns),
        Payload::Document { fields, .. } => ("document", fields),
    };
    let doc = json!({
        "command": report.command.name(),
        "format": match format { Format::Csv => "csv", Format::Json => "json" },
        "kind": kind,
        "header": "leading lines starting with '#' (csv) or the `header` array (json) echo the resolved config",
        "fields": fields,
    });
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

fn init_workers() {
    if let Some(n) = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    init_workers();
    let result = resolve_config(&cli).and_then(|cfg| {
        let report = compute(cli.command, cfg.clone())?;
        let text = render(&report, &cfg, cli.deterministic)?;
        match &cfg.output.path {
            Some(p) => {
                std::fs::write(p, &text)
                    .map_err(|e| Error::config("output.path", format!("cannot write {p}: {e}")))?;
                let schema_path = format!("{p}.schema.json");
                std::fs::write(&schema_path, schema(&report, cfg.format())).map_err(|e| {
                    Error::config("output.path", format!("cannot write {schema_path}: {e}"))
                })?;
            }
            None => {
                std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| Error::config("output", e.to_string()))?;
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                2
            } else {
                3
            }
        }
    }
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    run(Cli::parse())
}
