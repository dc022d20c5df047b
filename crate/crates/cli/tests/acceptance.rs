//! Acceptance suite for the CSV/verify front end: criteria 8 and 11.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_eit")
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        let header: Vec<String> = lines
            .next()
            .expect("header row")
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|l| {
                l.split(',')
                    .map(|cell| cell.parse::<f64>().expect("numeric cell"))
                    .collect()
            })
            .collect();
        Self { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("column {name}"))
    }
}

#[test]
fn criterion_08_detuning_sweep_reproduction() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("detuning.csv");
    let status = Command::new(bin())
        .args([
            "sweep",
            "--config",
            repo_root().join("configs/detuning_sweep.toml").to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success(), "criterion 8: FAIL — sweep run failed");

    let csv = Csv::parse(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(csv.rows.len(), 1001);
    let d = csv.col("delta");
    let resonance: &Vec<f64> = csv
        .rows
        .iter()
        .find(|r| r[d] == 0.0)
        .expect("criterion 8: FAIL — no exact delta = 0 row");

    // (i) ideal channel: exact transparency at two-photon resonance
    let im_ideal = resonance[csv.col("im_chi_ideal")];
    assert!(
        im_ideal.abs() < 1e-8,
        "criterion 8: FAIL — ideal absorption at resonance = {im_ideal:.3e}"
    );

    // (ii) absorption ordering at resonance with equal raw rates. The
    // reverse damping shows gain; exchange and depolarization sit together
    // below the forward damping, which sits below dephasing (the ordering
    // fixed by the resonance spot values of criterion 6).
    let im: HashMap<&str, f64> = ["dephase", "depol", "damp_bc", "damp_cb", "popex"]
        .into_iter()
        .map(|k| (k, resonance[csv.col(&format!("im_chi_{k}"))]))
        .collect();
    assert!(
        im["damp_cb"] < im["popex"] && im["damp_cb"] < im["depol"],
        "criterion 8: FAIL — reverse damping not the lowest: {im:?}"
    );
    let pair_gap = (im["depol"] - im["popex"]).abs() / im["depol"].max(im["popex"]);
    assert!(
        pair_gap < 0.25,
        "criterion 8: FAIL — depol and popex absorption separate by {pair_gap:.2}: {im:?}"
    );
    assert!(
        im["depol"].max(im["popex"]) < im["damp_bc"],
        "criterion 8: FAIL — exchange/depolarization above forward damping: {im:?}"
    );
    assert!(
        im["damp_bc"] < im["dephase"],
        "criterion 8: FAIL — forward damping above dephasing: {im:?}"
    );

    // (iii) Re chi of the ideal channel antisymmetric about delta = 0
    let re_i = csv.col("re_chi_ideal");
    let n = csv.rows.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        worst = worst.max((csv.rows[i][re_i] + csv.rows[n - 1 - i][re_i]).abs());
    }
    assert!(
        worst < 1e-8,
        "criterion 8: FAIL — max |Re chi(d) + Re chi(-d)| = {worst:.3e}"
    );

    println!(
        "criterion 8: PASS — resonance Im: cb {:.3} < popex {:.3} ≈ depol {:.3} < bc {:.3} < dephase {:.3}; ideal Im(0) = {im_ideal:.1e}; antisymmetry {worst:.1e}",
        im["damp_cb"], im["popex"], im["depol"], im["damp_bc"], im["dephase"]
    );
}

#[derive(serde::Deserialize)]
struct ReportCheck {
    id: String,
    status: String,
    ledger_ids: Vec<String>,
}

#[derive(serde::Deserialize)]
struct Report {
    checks: Vec<ReportCheck>,
    exit_code: i32,
}

#[test]
fn criterion_11_verify_exits_clean_with_ledgered_errata() {
    let tmp = tempfile::tempdir().unwrap();
    let json = tmp.path().join("report.json");
    let root = repo_root();
    let output = Command::new(bin())
        .args([
            "verify",
            "--config",
            root.join("configs/verify.toml").to_str().unwrap(),
            "--errata",
            root.join("errata.toml").to_str().unwrap(),
            "--output",
            json.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "criterion 11: FAIL — verify exited {:?}\n{}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout)
    );

    let report: Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.exit_code, 0);
    for c in &report.checks {
        assert_ne!(
            c.status, "fail",
            "criterion 11: FAIL — unledgered failing check {}",
            c.id
        );
    }
    let ledgered: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.status == "expected-deviation")
        .flat_map(|c| c.ledger_ids.iter().map(String::as_str))
        .collect();
    // the source-row contraction and the decay-normalization family must be
    // the ledgered findings
    assert!(
        ledgered.contains(&"source-row-contraction"),
        "criterion 11: FAIL — source-row deviation not ledgered: {ledgered:?}"
    );
    assert!(
        ledgered.contains(&"decay-jump-rate-normalization"),
        "criterion 11: FAIL — decay normalization deviation not ledgered: {ledgered:?}"
    );
    let known = [
        "source-row-contraction",
        "decay-jump-rate-normalization",
        "ground-coupling-a34",
        "source-e3-decay-asymmetry",
    ];
    for id in &ledgered {
        assert!(
            known.contains(id),
            "criterion 11: FAIL — unexpected ledger item {id}"
        );
    }
    println!("criterion 11: PASS — verify exit 0; ledgered deviations: {ledgered:?}");
}
