//! End-to-end checks of the binary: exit codes, output schemas, flag
//! precedence, and thread-count independence.

use std::path::Path;
use std::process::{Command, Output};

use specmode_cli::report::{DistributionReport, HomReport, PhardReport};

fn specmode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specmode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn specmode_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_specmode"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

const MIXED_PAIR: &str = r#"{"photons":[
    {"type":"mixed","weights":[0.5,0.5]},
    {"type":"mixed","weights":[0.5,0.5]}],
    "n_hard":2,"epsilon":0.25}"#;

#[test]
fn exit_code_2_on_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = write_config(dir.path(), "bad.json", "{nope");
    let out = specmode(&["phard", "exact", "--config", &bad_json]);
    assert_eq!(out.status.code(), Some(2));

    // Missing required parameter.
    let out = specmode(&["phard", "bound-purity", "--n", "2", "--n-hard", "2"]);
    assert_eq!(out.status.code(), Some(2));

    // Invariant violation inside an otherwise well-formed config.
    let unnormalized = write_config(
        dir.path(),
        "unnormalized.json",
        r#"{"photons":[{"type":"pure","coeffs":[[0.5,0.0]]}],"n_hard":1,"epsilon":0.5}"#,
    );
    let out = specmode(&["phard", "exact", "--config", &unnormalized]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown config keys are rejected, not ignored.
    let typo = write_config(
        dir.path(),
        "typo.json",
        r#"{"photon":[{"type":"mixed","weights":[1.0]}],"n_hard":1,"epsilon":0.5}"#,
    );
    let out = specmode(&["phard", "exact", "--config", &typo]);
    assert_eq!(out.status.code(), Some(2));

    // Empty photon lists fail cleanly everywhere, never panic.
    let empty = write_config(dir.path(), "empty.json", r#"{"photons":[]}"#);
    for verb in ["pure", "mixed"] {
        let out = specmode(&["simulate", verb, "--config", &empty]);
        assert_eq!(out.status.code(), Some(2), "simulate {verb}");
    }
    let empty_query = write_config(
        dir.path(),
        "empty_query.json",
        r#"{"photons":[],"n_hard":1,"epsilon":0.5}"#,
    );
    let out = specmode(&["phard", "exact", "--config", &empty_query]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_3_on_budget_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "q.json", MIXED_PAIR);
    let out = specmode(&["phard", "exact", "--config", &config, "--budget", "3"]);
    assert_eq!(out.status.code(), Some(3));

    // Spectral basis beyond the enlarged-space budget.
    let wide = write_config(
        dir.path(),
        "wide.json",
        r#"{"photons":[
            {"type":"mixed","weights":[0.2,0.2,0.2,0.2,0.2]},
            {"type":"mixed","weights":[0.2,0.2,0.2,0.2,0.2]}],
           "unitary":{"type":"beamsplitter"},"m":2}"#,
    );
    let out = specmode(&["simulate", "mixed", "--config", &wide]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn phard_reports_reparse_under_their_own_schema() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "q.json", MIXED_PAIR);

    let text = stdout_of(&specmode(&["phard", "exact", "--config", &config]));
    let report: PhardReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.method, "ExactEnumeration");
    assert!((report.p_hard.unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(report.exceeds_epsilon, Some(true));
    assert!(report.disclaimer.contains("necessary condition"));

    let text = stdout_of(&specmode(&[
        "phard",
        "mc",
        "--config",
        &config,
        "--samples",
        "50000",
        "--seed",
        "9",
    ]));
    let report: PhardReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.method, "MonteCarlo");
    assert_eq!(report.seed, Some(9));
    assert_eq!(report.samples, Some(50000));
    assert_eq!(report.rng.as_deref(), Some("chacha8"));
    assert!(report.std_error.unwrap() > 0.0);

    let text = stdout_of(&specmode(&[
        "phard",
        "iid",
        "--config",
        &write_config(dir.path(), "iid.json", r#"{"weights":[0.5,0.5]}"#),
        "--n",
        "2",
        "--n-hard",
        "2",
    ]));
    let report: PhardReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.method, "ClosedFormIID");
    assert!((report.p_hard.unwrap() - 0.5).abs() < 1e-12);

    let text = stdout_of(&specmode(&[
        "phard",
        "bound-fidelity",
        "--fmin",
        "0.5",
        "--n",
        "3",
        "--n-hard",
        "2",
        "--epsilon",
        "0.4",
    ]));
    let report: PhardReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.lower_bound, Some(0.5));
    assert_eq!(report.exceeds_epsilon, Some(true));
    assert_eq!(report.empty_event, Some(false));
}

#[test]
fn hom_reports_the_reference_value() {
    let text = stdout_of(&specmode(&["simulate", "hom", "--fmin", "0.75"]));
    let report: HomReport = serde_json::from_str(&text).unwrap();
    assert!((report.coincidence_probability - 0.125).abs() < 1e-9);
    assert_eq!(report.reference_value, 0.125);

    let text = stdout_of(&specmode(&[
        "simulate", "hom", "--fmin", "1", "--format", "csv",
    ]));
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 2);
    for line in &lines {
        assert_eq!(line.split(',').count(), 4);
    }
    // Perfect fidelity: the dip reaches zero.
    let coincidence: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!(coincidence.abs() < 1e-12);
}

#[test]
fn distribution_csv_has_consistent_columns_and_unit_mass() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sim.json",
        r#"{"unitary":{"type":"identity"},"input":[1,1,0]}"#,
    );
    let text = stdout_of(&specmode(&["simulate", "ideal", "--config", &config]));
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], "n1,n2,n3,probability");
    assert_eq!(lines.len(), 1 + 6); // C(4, 2) configurations
    let mut total = 0.0;
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 4);
        total += cells[3].parse::<f64>().unwrap();
    }
    assert!((total - 1.0).abs() < 1e-9);
    // Identity network: the input configuration keeps all the mass.
    assert!(text.contains("1,1,0,1.0000000000000000e0"));
}

#[test]
fn simulate_json_includes_the_oracle_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "mixed.json",
        r#"{"photons":[
            {"type":"mixed","weights":[0.5,0.5]},
            {"type":"mixed","weights":[0.25,0.75]}],
           "unitary":{"type":"haar","seed":5},"m":3}"#,
    );
    let text = stdout_of(&specmode(&[
        "simulate", "mixed", "--config", &config, "--oracle", "--format", "json",
    ]));
    let report: DistributionReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.modes, 3);
    assert_eq!(report.photons, 2);
    assert!(report.oracle_max_abs_deviation.unwrap() < 1e-9);
    let total: f64 = report.probabilities.iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn figure_grids_have_the_documented_shape() {
    let text = stdout_of(&specmode(&["figure", "purity", "--n-hard", "2"]));
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], "n,P,bound");
    assert_eq!(lines.len(), 1 + 20 * 21);
    // Every P = 1 row saturates at 1 once n >= n_hard.
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 3);
        let n: usize = cells[0].parse().unwrap();
        let p: f64 = cells[1].parse().unwrap();
        let bound: f64 = cells[2].parse().unwrap();
        if p == 1.0 && n >= 2 {
            assert_eq!(bound, 1.0);
        }
    }

    let text = stdout_of(&specmode(&["figure", "fidelity", "--n-hard", "2"]));
    for row in text.trim_end().lines().skip(1) {
        let cells: Vec<&str> = row.split(',').collect();
        let f: f64 = cells[1].parse().unwrap();
        let bound: f64 = cells[2].parse().unwrap();
        if f == 0.0 {
            assert_eq!(bound, 0.0, "F_min = 0 must give a zero bound");
        }
    }
}

#[test]
fn region_threshold_falls_as_the_system_grows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "region.json",
        r#"{"n_min":3,"n_max":8,"n_hard":2,"epsilon":0.5}"#,
    );
    let text = stdout_of(&specmode(&["figure", "region", "--config", &config]));
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], "F_min,n,n_hard,bound,in_region");

    let mut thresholds = Vec::new();
    let mut current_n = 0usize;
    let mut found = false;
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 5);
        let n: usize = cells[1].parse().unwrap();
        if n != current_n {
            current_n = n;
            found = false;
        }
        if !found && cells[4] == "true" {
            thresholds.push(cells[0].parse::<f64>().unwrap());
            found = true;
        }
    }
    assert_eq!(thresholds.len(), 6);
    for pair in thresholds.windows(2) {
        assert!(pair[0] >= pair[1], "thresholds {thresholds:?}");
    }
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "q.json",
        r#"{"photons":[
            {"type":"mixed","weights":[0.5,0.5]},
            {"type":"mixed","weights":[0.5,0.5]}],
           "n_hard":1,"epsilon":0.9}"#,
    );
    let text = stdout_of(&specmode(&[
        "phard",
        "exact",
        "--config",
        &config,
        "--n-hard",
        "2",
        "--epsilon",
        "0.25",
    ]));
    let report: PhardReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.n_hard, 2);
    assert_eq!(report.epsilon, Some(0.25));
    assert!((report.p_hard.unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn wavepacket_configs_decompose_into_photons() {
    let dir = tempfile::tempdir().unwrap();
    // Two Gaussians separated by a small delay, decomposed onto a matched
    // Hermite-Gauss basis: p_hard for n_hard = 2 is basis-diagonal overlap
    // mass, strictly between 0 and 1.
    let config = write_config(
        dir.path(),
        "wp.json",
        r#"{"wavepackets":[
             {"shape":"gaussian","center_frequency":100.0,"bandwidth":1.0},
             {"shape":"gaussian","center_frequency":100.0,"bandwidth":1.0,"temporal_delay":0.6}],
            "basis":{"family":"hermite_gauss","center_frequency":100.0,"scale":1.0,"size":12},
            "n_hard":2,"epsilon":0.25}"#,
    );
    let text = stdout_of(&specmode(&["phard", "exact", "--config", &config]));
    let report: PhardReport = serde_json::from_str(&text).unwrap();
    let p = report.p_hard.unwrap();
    assert!(p > 0.0 && p < 1.0, "p_hard = {p}");

    // A basis too small to hold the delayed packet is a config error.
    let truncated = write_config(
        dir.path(),
        "wp_small.json",
        r#"{"wavepackets":[
             {"shape":"gaussian","center_frequency":100.0,"bandwidth":1.0,"temporal_delay":3.0}],
            "basis":{"family":"hermite_gauss","center_frequency":100.0,"scale":1.0,"size":2},
            "n_hard":1,"epsilon":0.5}"#,
    );
    let out = specmode(&["phard", "exact", "--config", &truncated]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size"));

    // The same wavepacket inputs drive the simulator: identical packets on
    // a beamsplitter show the full dip.
    let sim = write_config(
        dir.path(),
        "wp_sim.json",
        r#"{"wavepackets":[
             {"shape":"gaussian","center_frequency":100.0,"bandwidth":1.0},
             {"shape":"gaussian","center_frequency":100.0,"bandwidth":1.0}],
            "basis":{"family":"hermite_gauss","center_frequency":100.0,"scale":1.0,"size":4},
            "unitary":{"type":"beamsplitter"},"m":2}"#,
    );
    let text = stdout_of(&specmode(&[
        "simulate", "pure", "--config", &sim, "--format", "json",
    ]));
    let report: DistributionReport = serde_json::from_str(&text).unwrap();
    let coincidence = report
        .counts
        .iter()
        .position(|c| c == &[1, 1])
        .map(|i| report.probabilities[i])
        .unwrap();
    assert!(coincidence < 1e-9, "identical packets must interfere fully");
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "q.json", MIXED_PAIR);
    let args = [
        "phard",
        "mc",
        "--config",
        &config,
        "--samples",
        "300000",
        "--seed",
        "3",
    ];
    let one = specmode_env(&args, &[("SPECMODE_THREADS", "1")]);
    let four = specmode_env(&args, &[("SPECMODE_THREADS", "4")]);
    assert_eq!(stdout_of(&one), stdout_of(&four));

    let bad = specmode_env(&args, &[("SPECMODE_THREADS", "zero")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "q.json", MIXED_PAIR);
    // The CSV rendering stays naively comma-splittable: 14 declared
    // columns on the header and on the data row.
    let csv = stdout_of(&specmode(&[
        "phard", "exact", "--config", &config, "--format", "csv",
    ]));
    let rows: Vec<&str> = csv.trim_end().lines().collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].split(',').count(), 14);
    assert_eq!(rows[1].split(',').count(), 14);

    let stdout_text = stdout_of(&specmode(&["phard", "exact", "--config", &config]));
    let out_path = dir.path().join("report.json");
    let out = specmode(&[
        "phard",
        "exact",
        "--config",
        &config,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out_path).unwrap(), stdout_text);
}
