use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_assettax");

fn assettax(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write_scenario(dir: &Path, body: &str) -> String {
    let path = dir.join("test.scenario");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn verify_bundled_reference_scenario() {
    let (code, out, err) = assettax(&["verify"]);
    assert_eq!(code, 0, "{out}{err}");
    for needle in ["30/31", "10/11", "180%", "200%", "0 failed"] {
        assert!(out.contains(needle), "missing {needle}:\n{out}");
    }
    assert!(!out.contains("[FAIL]"));
}

#[test]
fn zero_point_grid_is_a_usage_error() {
    let (code, _, err) = assettax(&["schedule", "--name", "innovation", "--grid", "0:100:0"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn malformed_grid_and_unknown_flag_are_usage_errors() {
    assert_eq!(assettax(&["sweep", "--param", "land_tax_rate", "--grid", "0:1"]).0, 1);
    assert_eq!(assettax(&["report", "--colour"]).0, 1);
    assert_eq!(assettax(&[]).0, 1);
}

#[test]
fn sweep_capture_column_matches_closed_form() {
    let (code, out, err) = assettax(&["sweep", "--param", "land_tax_rate", "--grid", "0:0.15:16"]);
    assert_eq!(code, 0, "{err}");
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (value, share) = (col("value"), col("captured_share"));
    let rho = 0.005;
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let t: f64 = rec[value].parse().unwrap();
        let got: f64 = rec[share].parse().unwrap();
        assert!((got - t / (t + rho)).abs() <= 1e-15, "t = {t}");
        rows += 1;
    }
    assert_eq!(rows, 16);
}

#[test]
fn schedule_csv_has_full_precision_columns() {
    let (code, out, _) = assettax(&["schedule", "--name", "innovation", "--grid", "0:6000:7"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,marginal,total,regime_flag"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // 7 grid points plus the junction at 3000 already on the grid
    assert_eq!(rows.len(), 7);
    for r in &rows {
        let mantissa = r[2].split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{}", r[2]);
    }
    assert_eq!(rows[0][3], "floor");
    assert_eq!(rows[6][3], "formula");
    let total_at_floor: f64 = rows[2][2].parse().unwrap();
    assert_eq!(total_at_floor, 2000.0);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["schedule", "--name", "wage_tax"][..],
        &["report", "--format", "json"][..],
        &["verify", "--seed", "11"][..],
        &["sweep", "--param", "floor_multiplier", "--grid", "0:5:6"][..],
    ] {
        let a = assettax(args);
        let b = assettax(args);
        assert_eq!(a.0, 0, "{args:?}: {}", a.2);
        assert_eq!(a.1, b.1, "{args:?}");
    }
}

#[test]
fn out_directory_receives_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let out_s = out.display().to_string();
    assert_eq!(assettax(&["schedule", "--out", &out_s]).0, 0);
    for name in ["innovation.csv", "mineral.csv", "monopoly.csv", "wage_tax.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
    assert_eq!(assettax(&["report", "--format", "json", "--out", &out_s]).0, 0);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["abolished"][0], "taxi_medallion");
}

#[test]
fn several_schedules_on_stdout_need_a_name() {
    assert_eq!(assettax(&["schedule"]).0, 1);
}

#[test]
fn invalid_scenario_is_a_data_error_with_loci() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        r#"
[distributions.d]
kind = "pareto"
scale = 1.0
shape = 2.0

[elasticities.e]
kind = "constant"
value = 0.5

[schedules.s]
kind = "wage_tax"
distribution = "d"
weights = "nobody"
elasticity = "e"

[agents.ghost]
"#,
    );
    let (code, _, err) = assettax(&["report", "--scenario", &path]);
    // `[agents.ghost]` is a table, not a list: rejected while parsing
    assert_eq!(code, 2, "{err}");

    let path = write_scenario(dir.path(), &std::fs::read_to_string(&path).unwrap().replace("[agents.ghost]\n", ""));
    let (code, _, err) = assettax(&["report", "--scenario", &path]);
    assert_eq!(code, 2);
    assert!(err.contains("schedules.s.weights"), "{err}");
    assert!(err.contains("`nobody`"), "{err}");
}

#[test]
fn tail_truncation_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        r#"
[distributions.d]
kind = "pareto"
scale = 1.0
shape = 2.0

[weights.w]
family = "power"
nu = 1.0

[elasticities.e]
kind = "constant"
value = 0.5

[schedules.s]
kind = "wage_tax"
distribution = "d"
weights = "w"
elasticity = "e"
"#,
    );
    let (code, _, err) = assettax(&["schedule", "--scenario", &path, "--grid", "1:1e7:5"]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("grid point"), "{err}");
}

#[test]
fn no_interior_wealth_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let reference = assettax_reference();
    let body = reference.replacen("delta = 0.06", "delta = 0.03", 1);
    let path = write_scenario(dir.path(), &body);
    let (code, _, err) = assettax(&["steady-state", "--scenario", &path]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("inventor"), "{err}");
}

#[test]
fn value_command_formats() {
    let (code, out, _) = assettax(&["value", "--format", "json"]);
    assert_eq!(code, 0);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    let medallion = rows.as_array().unwrap().iter().find(|r| r["name"] == "taxi_medallion").unwrap();
    assert!((medallion["captured_share"].as_f64().unwrap() - 30.0 / 31.0).abs() < 1e-12);
    let (_, table, _) = assettax(&["value"]);
    assert!(table.contains("180%"));
}

#[test]
fn steady_state_table_lists_agents() {
    let (code, out, err) = assettax(&["steady-state", "--format", "csv"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("schedule,agent,c,k,s,prize"));
    assert_eq!(out.lines().count(), 3);
}

fn assettax_reference() -> String {
    assettax::scenario::REFERENCE_SCENARIO.to_string()
}
