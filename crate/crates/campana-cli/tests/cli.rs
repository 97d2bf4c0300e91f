//! End-to-end tests running the compiled binary: documented examples,
//! exit codes, config handling, and byte-level determinism.

use std::process::Output;

fn campana(args: &[&str]) -> Output {
    campana_env(args, &[])
}

fn campana_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut command = std::process::Command::new(env!("CARGO_BIN_EXE_campana"));
    command.args(args).env_remove("CAMPANA_THREADS");
    for (key, value) in env {
        command.env(key, value);
    }
    command.output().expect("binary should run")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn predict_prints_the_documented_invariants() {
    let out = campana(&["predict", "--model", "p3-heisenberg", "--m", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "{\"a\": 3.5, \"b\": 1}\n");

    let out = campana(&["predict", "--model", "p3-heisenberg", "--m", "1"]);
    assert_eq!(stdout(&out), "{\"a\": 4, \"b\": 1}\n");

    let out = campana(&["predict", "--model", "p3-heisenberg", "--m", "infinity"]);
    assert_eq!(stdout(&out), "{\"a\": 1, \"b\": 1, \"b_prime\": 1}\n");

    let out = campana(&[
        "predict",
        "--model",
        "p3-heisenberg",
        "--m",
        "infinity",
        "--s-places",
        "inf,2",
    ]);
    assert_eq!(stdout(&out), "{\"a\": 1, \"b\": 1, \"b_prime\": 2}\n");
}

#[test]
fn formal_local_factor_lists_exact_coefficients() {
    let out = campana(&[
        "densities",
        "--model",
        "p3-heisenberg",
        "--m",
        "2",
        "--prime",
        "2",
        "--formal",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "{\"model\": \"p3-heisenberg\", \"m\": \"2\", \"prime\": 2, \"shift\": 3, \
         \"numerator\": [\"1\", \"-1\", \"7/8\"], \"denominator\": [\"1\", \"-1\"]}\n"
    );
}

#[test]
fn density_reports_cover_each_requested_exponent() {
    let out = campana(&[
        "densities",
        "--model",
        "p3-heisenberg",
        "--m",
        "1",
        "--s",
        "5,6",
        "--p-max",
        "100",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("\"s\": 5") && lines[0].starts_with('{'));
    assert!(lines[1].contains("\"s\": 6") && lines[1].ends_with('}'));
}

#[test]
fn constant_reports_the_tail_bound() {
    let out = campana(&[
        "constant",
        "--model",
        "p3-heisenberg",
        "--m",
        "1",
        "--p-max",
        "1000",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("\"c_bar\": "));
    assert!(text.contains("\"tauberian\": "));
    assert!(text.contains("\"tail_bound\": "));
}

#[test]
fn validation_failures_exit_2() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["predict", "--model", "p4-nonsense"],
        vec!["predict", "--model", "p3-heisenberg", "--m", "0"],
        vec!["predict", "--s-places", "4"],
        vec!["predict", "--format", "csv"],
        vec!["densities", "--formal"],
        vec!["count", "--grid", "10,20"],
        vec!["count", "--threads", "0"],
        vec!["predict", "--no-such-flag"],
        vec!["no-such-subcommand"],
    ];
    for args in cases {
        let out = campana(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?}: {}",
            stderr(&out)
        );
        assert!(!stderr(&out).is_empty(), "args {args:?} should explain");
    }
}

#[test]
fn count_reports_are_identical_across_thread_counts() {
    let base = [
        "count",
        "--model",
        "p3-heisenberg",
        "--m",
        "2",
        "--grid",
        "10,20,40,80",
        "--p-max",
        "200",
    ];
    let mut with_one = base.to_vec();
    with_one.extend(["--threads", "1"]);
    let mut with_four = base.to_vec();
    with_four.extend(["--threads", "4"]);
    let first = campana(&with_one);
    let second = campana(&with_four);
    assert!(first.status.success(), "{}", stderr(&first));
    assert_eq!(stdout(&first), stdout(&second));
    assert!(stdout(&first).contains("\"counts\": "));

    let via_env = campana_env(&base, &[("CAMPANA_THREADS", "2")]);
    assert_eq!(stdout(&first), stdout(&via_env));

    let bad_env = campana_env(&base, &[("CAMPANA_THREADS", "many")]);
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn csv_columns_match_the_documented_header() {
    let out = campana(&[
        "count",
        "--model",
        "p3-heisenberg",
        "--m",
        "2",
        "--grid",
        "10,20,40",
        "--p-max",
        "100",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "T,N,predicted,fitted,rel_err");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("10,"));
}

#[test]
fn verify_exit_codes_encode_the_verdict() {
    let base = [
        "verify",
        "--model",
        "p3-heisenberg",
        "--m",
        "1",
        "--grid",
        "100,200,400,800",
        "--p-max",
        "2000",
    ];
    let mut lenient = base.to_vec();
    lenient.extend(["--tol-slope", "0.5", "--tol-constant", "0.5"]);
    let out = campana(&lenient);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("\"pass\": true"), "{text}");
    assert!(text.contains("\"tol_slope\": 0.5"));

    let mut strict = base.to_vec();
    strict.extend(["--tol-slope", "0.000001", "--tol-constant", "0.000001"]);
    let out = campana(&strict);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("\"pass\": false"));
}

#[test]
fn config_file_is_applied_and_flags_override_it() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config_path = dir.path().join("run.conf");
    std::fs::write(
        &config_path,
        "# p1 sample run\nmodel = p1-vector\nm = 3\ngrid = 5, 10, 20\np_max = 50\n",
    )
    .unwrap();
    let config = config_path.to_str().unwrap();

    let out = campana(&["count", "--config", config]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("\"model\": \"p1-vector\"") && text.contains("\"m\": \"3\""));

    let out = campana(&["count", "--config", config, "--m", "2"]);
    assert!(stdout(&out).contains("\"m\": \"2\""));

    std::fs::write(&config_path, "model = p1-vector\nmmm = 3\n").unwrap();
    let out = campana(&["count", "--config", config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown config key"));
}

#[test]
fn output_flag_redirects_the_report_to_a_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let report_path = dir.path().join("report.json");
    let out = campana(&[
        "predict",
        "--model",
        "p3-heisenberg",
        "--m",
        "2",
        "--output",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&report_path).unwrap();
    assert_eq!(written, "{\"a\": 3.5, \"b\": 1}\n");
}

#[test]
fn sweep_emits_one_line_per_grid_cell() {
    let base = [
        "sweep",
        "--model",
        "p3-heisenberg",
        "--m-list",
        "1,2",
        "--grid",
        "50,100",
        "--p-max",
        "500",
    ];
    let out = campana(&base);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines
        .iter()
        .all(|l| l.starts_with("{\"model\": \"p3-heisenberg\"")));
    assert_eq!(
        lines.iter().filter(|l| l.contains("\"m\": \"1\"")).count(),
        2
    );
    assert!(lines[0].contains("\"T\": 50") && lines[1].contains("\"T\": 100"));

    let mut csv = base.to_vec();
    csv.extend(["--format", "csv"]);
    let out = campana(&csv);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "model,m,T,N,predicted,ratio");
    assert_eq!(lines.len(), 5);
}
