//! End-to-end runs of the binary against small experiment configs.

use std::path::Path;
use std::process::{Command, Output};

fn base_config() -> &'static str {
    r#"
spec_version = 1

[shifts.X]
kind = "full"
alphabet = 3

[shifts.Y]
kind = "full"
alphabet = 2

[shifts.GM]
kind = "sft"
transition_matrix = [[1, 1], [1, 0]]

[maps.pi]
domain = "X"
codomain = "Y"
symbol_map = [[0, 0], [1, 0], [2, 1]]

[potentials.F]
shift = "X"
window = 1
log_values = { "0" = 0.0, "1" = 0.6931471805599453, "2" = 1.0986122886681098 }

[potentials.Psi]
shift = "Y"
window = 1
log_values = { "0" = 0.6931471805599453, "1" = 1.6094379124341003 }

[potentials.Zero]
shift = "GM"
window = 1
log_values = { "0" = 0.0, "1" = 0.0 }

[potentials.W2]
shift = "X"
window = 2
log_values = { "00" = 0.35, "01" = 0.6, "02" = 0.2, "10" = 0.5, "11" = 0.75, "12" = 0.4, "20" = 0.3, "21" = 0.55, "22" = 0.65 }

[potentials.Pulled]
derived = "pullback"
source = "Psi"
map = "pi"

[run]
n_max = 8
seed = 7
shift = "X"
potential = "F"
map = "pi"
psi = "Psi"
y_cycle = [0]
"#
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_factorgibbs"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn setup(config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("exp.toml"), config).unwrap();
    dir
}

fn report_json(dir: &Path, out: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(out).join("report.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn pressure_series_is_exact_and_reruns_are_byte_identical() {
    let dir = setup(base_config());
    let out = run(
        dir.path(),
        &["pressure", "--config", "exp.toml", "--out", "a", "--n-max", "12"],
    );
    assert!(out.status.success(), "{out:?}");
    let tsv = std::fs::read_to_string(dir.path().join("a/pressure.tsv")).unwrap();
    let mut rows = 0;
    for line in tsv.lines().skip(1) {
        let cells: Vec<&str> = line.split('\t').collect();
        let estimate: f64 = cells[1].parse().unwrap();
        assert!((estimate - 6f64.ln()).abs() <= 1e-12, "line {line}");
        rows += 1;
    }
    assert_eq!(rows, 12);

    let out2 = run(
        dir.path(),
        &["pressure", "--config", "exp.toml", "--out", "b", "--n-max", "12"],
    );
    assert!(out2.status.success());
    for file in ["pressure.tsv", "report.json"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between reruns");
    }
}

#[test]
fn factor_gibbs_verdict_and_unit_ratio() {
    let dir = setup(base_config());
    let out = run(dir.path(), &["factor-gibbs", "--config", "exp.toml", "--out", "fg"]);
    assert!(out.status.success(), "{out:?}");
    let report = report_json(dir.path(), "fg");
    assert_eq!(report["verdict"], "PASS");
    let min = report["summary"]["ratio_min_at_n_max"].as_f64().unwrap();
    let max = report["summary"]["ratio_max_at_n_max"].as_f64().unwrap();
    assert!((min - 1.0).abs() < 1e-9 && (max - 1.0).abs() < 1e-9);
    let tsv = std::fs::read_to_string(dir.path().join("fg/ratio_envelope.tsv")).unwrap();
    assert!(tsv.lines().count() >= 9);

    // level-approximant measure path
    let config = format!("{}\nmeasure = \"approximant\"\n", base_config());
    let dir = setup(&config);
    let out = run(dir.path(), &["factor-gibbs", "--config", "exp.toml", "--out", "fga"]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(report_json(dir.path(), "fga")["verdict"], "PASS");
}

#[test]
fn preimage_reproduces_the_target_measure() {
    let dir = setup(base_config());
    let out = run(dir.path(), &["preimage", "--config", "exp.toml", "--out", "pre"]);
    assert!(out.status.success(), "{out:?}");
    let report = report_json(dir.path(), "pre");
    assert_eq!(report["verdict"], "PASS");
    assert!(report["summary"]["max_pushforward_diff"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["summary"]["condition_a_best_d"].as_f64().unwrap(), 1.0);
    // φ₁ on the singleton-fiber symbol keeps the ψ value: log 5
    let tsv = std::fs::read_to_string(dir.path().join("pre/preimage_potential.tsv")).unwrap();
    let row: Vec<&str> = tsv
        .lines()
        .find(|l| l.starts_with("2\t"))
        .expect("symbol row")
        .split('\t')
        .collect();
    let hi: f64 = row[2].parse().unwrap();
    assert!((hi - 5f64.ln()).abs() < 1e-12);
}

#[test]
fn condition_a_exact_on_full_collapse() {
    let dir = setup(base_config());
    let out = run(dir.path(), &["condition-a", "--config", "exp.toml", "--out", "ca"]);
    assert!(out.status.success(), "{out:?}");
    let report = report_json(dir.path(), "ca");
    assert_eq!(report["summary"]["best_d"].as_f64().unwrap(), 1.0);
}

#[test]
fn ratio_criterion_flags_growth_with_nonzero_exit() {
    let dir = setup(base_config());
    let out = run(dir.path(), &["ratio-criterion", "--config", "exp.toml", "--out", "rc"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let report = report_json(dir.path(), "rc");
    assert_eq!(report["verdict"], "FAIL");

    // the pulled-back potential is fiber constant: stable, exit 0
    let config = base_config().replace("potential = \"F\"", "potential = \"Pulled\"");
    let dir = setup(&config);
    let out = run(dir.path(), &["ratio-criterion", "--config", "exp.toml", "--out", "rc2"]);
    assert!(out.status.success(), "{out:?}");
    let report = report_json(dir.path(), "rc2");
    assert_eq!(report["verdict"], "PASS");
}

#[test]
fn u_converge_on_window2_fixture() {
    let config = base_config().replace("potential = \"F\"", "potential = \"W2\"");
    let dir = setup(&config);
    let out = run(
        dir.path(),
        &["u-converge", "--config", "exp.toml", "--out", "u", "--n-max", "10"],
    );
    assert!(out.status.success(), "{out:?}");
    let tsv = std::fs::read_to_string(dir.path().join("u/u_convergence.tsv")).unwrap();
    let diffs: Vec<f64> = tsv
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(diffs.len() >= 8);
    assert!(diffs.last().unwrap() < &diffs[0]);
}

#[test]
fn compensation_values_and_identity() {
    let dir = setup(base_config());
    let out = run(dir.path(), &["compensation", "--config", "exp.toml", "--out", "comp"]);
    assert!(out.status.success(), "{out:?}");
    let tsv = std::fs::read_to_string(dir.path().join("comp/compensation.tsv")).unwrap();
    let mut lines = tsv.lines().skip(1);
    let a: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let b: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert!((a[1].parse::<f64>().unwrap() - 2f64.ln()).abs() < 1e-15);
    assert_eq!(b[1].parse::<f64>().unwrap(), 0.0);
    let report = report_json(dir.path(), "comp");
    assert_eq!(report["verdict"], "PASS");
}

#[test]
fn oracle_on_golden_mean() {
    let config = r#"
spec_version = 1

[shifts.GM]
kind = "sft"
transition_matrix = [[1, 1], [1, 0]]

[potentials.Zero]
shift = "GM"
window = 1
log_values = { "0" = 0.0, "1" = 0.0 }

[run]
n_max = 8
shift = "GM"
potential = "Zero"
"#;
    let dir = setup(config);
    let out = run(dir.path(), &["oracle", "--config", "exp.toml", "--out", "orc"]);
    assert!(out.status.success(), "{out:?}");
    let report = report_json(dir.path(), "orc");
    let pressure = report["summary"]["pressure"].as_f64().unwrap();
    assert!((pressure - 0.4812118250596035).abs() < 1e-12);
}

#[test]
fn relative_pressure_series_along_constant_point() {
    let dir = setup(base_config());
    let out = run(
        dir.path(),
        &["relative-pressure", "--config", "exp.toml", "--out", "rp"],
    );
    assert!(out.status.success(), "{out:?}");
    let report = report_json(dir.path(), "rp");
    let last = report["summary"]["last_term"].as_f64().unwrap();
    assert!((last - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn sofic_shift_config_runs_pressure() {
    // even shift: 1s come in even runs
    let config = r#"
spec_version = 1

[shifts.EVEN]
kind = "sofic"
alphabet = 2
labeled_graph = { states = 2, edges = [[0, 0, 0], [0, 1, 1], [1, 1, 0]] }

[potentials.Zero]
shift = "EVEN"
window = 1
log_values = { "0" = 0.0, "1" = 0.0 }

[run]
n_max = 12
shift = "EVEN"
potential = "Zero"
"#;
    let dir = setup(config);
    let out = run(dir.path(), &["pressure", "--config", "exp.toml", "--out", "sof"]);
    assert!(out.status.success(), "{out:?}");
    let report = report_json(dir.path(), "sof");
    // the even shift has the same entropy as the golden mean
    let est = report["summary"]["estimate_at_n_max"].as_f64().unwrap();
    assert!((est - 0.4812118250596035).abs() < 0.06, "estimate {est}");
}

#[test]
fn budget_refusal_reports_estimated_cost() {
    let dir = setup(base_config());
    let out = run(
        dir.path(),
        &["pressure", "--config", "exp.toml", "--out", "big", "--n-max", "40"],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("budget"), "{stderr}");
    assert!(stderr.contains("--force"), "{stderr}");
}

#[test]
fn schema_errors_list_offending_fields() {
    let config = base_config().replace("potential = \"F\"", "potential = \"Nope\"");
    let dir = setup(&config);
    let out = run(dir.path(), &["pressure", "--config", "exp.toml", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Nope"), "{stderr}");

    let config = base_config().replace("spec_version = 1", "spec_version = 9");
    let dir = setup(&config);
    let out = run(dir.path(), &["pressure", "--config", "exp.toml", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("spec_version"), "{stderr}");

    // a bad subshift and a dangling map reference are reported together
    let config = base_config()
        .replace("transition_matrix = [[1, 1], [1, 0]]", "transition_matrix = [[1, 1], [0, 0]]")
        .replace("codomain = \"Y\"", "codomain = \"Missing\"");
    let dir = setup(&config);
    let out = run(dir.path(), &["pressure", "--config", "exp.toml", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("shifts.GM"), "{stderr}");
    assert!(stderr.contains("maps.pi.codomain"), "{stderr}");
}
