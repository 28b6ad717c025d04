use qubit_teleport::cli::{Report, SWEEP_COLUMNS};
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teleport-sim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn run_reports_analytic_success() {
    let o = sim(&["run", "--protocol", "qubit-assisted", "--alpha-sq", "0.8", "--trials", "100000", "--seed", "7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Report = serde_json::from_str(&stdout(&o)).unwrap();
    let analytic = report.analytic.unwrap();
    assert!((analytic.success - 0.4).abs() < 1e-12);
    let empirical = report.empirical.unwrap();
    assert!((empirical.success_rate - 0.4).abs() < 4.0 * (0.24f64 / 1e5).sqrt());
    assert_eq!(empirical.n_trials, 100_000);
    assert_eq!(empirical.seed, 7);
}

#[test]
fn run_at_maximal_entanglement_always_succeeds() {
    let o = sim(&["run", "--alpha-sq", "0.5", "--trials", "2000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.analytic.unwrap().success, 1.0);
    assert_eq!(report.empirical.unwrap().success_rate, 1.0);
}

#[test]
fn text_report_lists_defaults() {
    let o = sim(&["run", "--quick"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for needle in ["protocol           qubit-assisted", "alpha_sq           0.8", "trials             10000", "seed               42", "mean success fidelity"] {
        assert!(text.contains(needle), "missing {needle:?} in\n{text}");
    }
    assert!(!text.contains("generated_at_unix"));
}

#[test]
fn timestamps_only_on_request() {
    let o = sim(&["run", "--quick", "--timestamps"]);
    assert!(stdout(&o).contains("generated_at_unix"));
}

#[test]
fn alpha_out_of_range_exits_2() {
    let o = sim(&["run", "--alpha-sq", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha_sq must lie in [0.5, 1]"));
}

#[test]
fn invalid_flag_exits_2_with_usage() {
    let o = sim(&["run", "--nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn explicit_input_renormalized_with_warning() {
    let o = sim(&["run", "--input", "0.6,0,0.8000001,0", "--trials", "1000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: input renormalized"));
    let o = sim(&["run", "--input", "0.6,0,0,-0.8", "--trials", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).is_empty());
    let o = sim(&["run", "--input", "0.6,0,0.81,0", "--trials", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_csv_schema_and_rows() {
    let o = sim(&["sweep", "--grid", "0.5,0.8,1.0", "--trials", "20000", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, SWEEP_COLUMNS);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let analytic: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(analytic[0], 1.0);
    assert!((analytic[1] - 0.4).abs() < 1e-15);
    assert_eq!(analytic[2], 0.0);
    assert_eq!(&rows[0][3], "1.0000000000000000");
    assert_eq!(&rows[2][6], "");
    for r in &rows {
        for field in r.iter().filter(|f| !f.is_empty()) {
            assert!(!field.contains(','));
            let f: f64 = field.parse().unwrap();
            assert!(f.is_finite());
        }
    }
}

#[test]
fn sweep_single_point_is_exact() {
    let o = sim(&["sweep", "--grid", "0.5", "--trials", "5000", "--format", "json"]);
    let report: Report = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = report.sweep.unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].empirical_success, 1.0);
}

#[test]
fn sweep_grid_steps() {
    let o = sim(&["sweep", "--grid-steps", "11", "--quick", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 12);
}

#[test]
fn malformed_grid_exits_2() {
    let o = sim(&["sweep", "--grid", "0.5,zero"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_round_trips() {
    let o = sim(&["run", "--protocol", "mor-horodecki", "--input", "0,1,0,0", "--trials", "3000", "--format", "json"]);
    let text = stdout(&o);
    let report: Report = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, text);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["config", "analytic", "empirical", "checks"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    for format in ["text", "json", "csv"] {
        let args = ["sweep", "--grid", "0.6,0.9", "--trials", "4000", "--seed", "3", "--format", format];
        assert_eq!(sim(&args).stdout, sim(&args).stdout, "{format}");
        let args = ["run", "--protocol", "bbcjpw", "--trials", "4000", "--format", format];
        assert_eq!(sim(&args).stdout, sim(&args).stdout, "{format}");
    }
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("teleport-sim-{}.csv", std::process::id()));
    let o = sim(&["sweep", "--grid", "0.7", "--quick", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(written.starts_with(&SWEEP_COLUMNS.join(",")));
}

#[test]
fn quick_verify_passes() {
    let o = sim(&["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}

#[test]
fn verify_json_lists_checks() {
    let o = sim(&["verify", "--quick", "--seed", "12345", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.checks.len(), 10);
    assert!(report.all_passed());
}
