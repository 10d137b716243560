use std::path::Path;
use std::process::{Command, Output};

const FIXTURE: &[&str] = &[
    "--family",
    "gaussian",
    "--lambda0",
    "50",
    "--sigma",
    "0.5",
    "--beta",
    "1",
    "--scan-mu-min",
    "0",
    "--scan-mu-max",
    "5",
    "--scan-steps",
    "50",
];

fn sbgas_with(workers: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbgas"))
        .args(args)
        .env("SBGAS_WORKERS", workers)
        .output()
        .expect("binary runs")
}

fn sbgas(args: &[&str]) -> Output {
    sbgas_with("1", args)
}

fn with_fixture<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    FIXTURE
        .iter()
        .copied()
        .chain(extra.iter().copied())
        .collect()
}

#[test]
fn missing_lambda0_exits_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[potential]\nfamily = \"gaussian\"\nsigma = 0.5\n[physics]\nbeta = 1.0\nalpha = -1.0\n",
    )
    .unwrap();
    let out = sbgas(&["--config", cfg.to_str().unwrap(), "pressure"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("potential.lambda0"), "{err}");
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[physics]\nbeta = 1.0\ntemperature = 2.0\n").unwrap();
    let out = sbgas(&["--config", cfg.to_str().unwrap(), "pressure"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("physics.temperature"));
}

#[test]
fn numeric_failure_exits_3() {
    let out = sbgas(&[
        "--family",
        "gaussian",
        "--lambda0",
        "50",
        "--sigma",
        "0.5",
        "--beta",
        "1",
        "--scan-mu-min",
        "2",
        "--scan-mu-max",
        "5",
        "mixture",
        "--rho",
        "midpoint",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn mixture_midpoint_has_even_weights() {
    let out = sbgas(&with_fixture(&[
        "--deterministic",
        "mixture",
        "--rho",
        "midpoint",
    ]));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let kappa = doc["data"]["kappa"].as_f64().unwrap();
    assert!((kappa - 0.5).abs() < 1e-12);
    let w = &doc["data"]["weights"];
    assert!((w["normal"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(doc["header"]
        .as_array()
        .unwrap()
        .iter()
        .any(|l| l == "rho = \"midpoint\""));
}

#[test]
fn deterministic_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("pd.csv");
    let p = a.to_str().unwrap().to_string();
    let run = |workers: &str| {
        let out = sbgas_with(
            workers,
            &with_fixture(&[
                "--deterministic",
                "phase-diagram",
                "--mu-min",
                "1",
                "--mu-max",
                "1.6",
                "--mu-steps",
                "7",
                "-o",
                &p,
            ]),
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read(&a).unwrap()
    };
    // output does not depend on the worker count
    let (ta, tb) = (run("1"), run("3"));
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# sbgas"));
    assert!(text.contains("# lambda0 = 50.0"));
    assert!(text
        .lines()
        .any(|l| l == "mu,pressure,rho,x,y,branch,maximizers"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 8);
    let schema = Path::new(&format!("{}.schema.json", a.display())).to_path_buf();
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(schema).unwrap()).unwrap();
    assert_eq!(s["command"], "phase-diagram");
    assert_eq!(s["fields"].as_array().unwrap().len(), 7);
}

#[test]
fn pressure_row_matches_library() {
    let out = sbgas(&with_fixture(&[
        "--deterministic",
        "pressure",
        "--alpha",
        "-1",
        "--x",
        "0.1",
    ]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    let bog =
        sbgas::bog_pressure::Bogoliubov::new(sbgas::potential::PotentialModel::gaussian(50.0, 0.5));
    let p = bog
        .p0b(sbgas::bog_pressure::ThermoPoint::new(1.0, -1.0, 0.1).unwrap())
        .unwrap();
    assert_eq!(row[3], p);
    assert!((row[4] - (0.1 + row[5])).abs() < 1e-15);
}

#[test]
fn every_subcommand_is_wired() {
    let help = sbgas(&["--help"]);
    let text = String::from_utf8(help.stdout).unwrap();
    for c in [
        "validate-potential",
        "pressure",
        "phase-diagram",
        "condensate-curve",
        "rate-dump",
        "mixture",
        "kac-sim",
        "lattice-check",
    ] {
        assert!(text.contains(c), "{c}");
    }
    let out = sbgas(&with_fixture(&[
        "lattice-check",
        "--alpha",
        "-1",
        "--x",
        "1",
        "--box-sides",
        "8,16",
    ]));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .count(),
        3
    );
}
