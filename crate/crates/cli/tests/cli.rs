use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_harmonic-id"));
    c.env_remove("HARMONIC_ID_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bell_text_output() {
    let o = run(&["compute", "bell", "--r", "4", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "6*h4 + 8*h1*h3 + 3*h2^2 + 6*h1^2*h2 + h1^4\n");
}

#[test]
fn zeta_even_text_output() {
    let o = run(&["compute", "zeta-even", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1/6 * pi^2\n");
    let o = run(&["compute", "zeta-even", "--n", "4", "--format", "json"]);
    assert_eq!(stdout(&o), "{\"quantity\":\"zeta-even\",\"n\":4,\"coeff\":\"1/9450\",\"pi_power\":8}\n");
}

#[test]
fn compute_values() {
    assert_eq!(stdout(&run(&["compute", "H", "--n", "3"])), "11/6\n");
    assert_eq!(stdout(&run(&["compute", "H", "--n", "2", "--x", "1/2", "--alpha", "1"])), "142/105\n");
    assert_eq!(stdout(&run(&["compute", "F", "--n", "1", "--x", "1/2"])), "4/15\n");
    // F_0''(0) = 2
    assert_eq!(stdout(&run(&["compute", "dF", "--n", "0", "--r", "2"])), "2\n");
    let table = stdout(&run(&["compute", "bernoulli", "--N", "4"]));
    assert_eq!(table, "B_0 = 1\nB_1 = -1/2\nB_2 = 1/6\nB_3 = 0\nB_4 = -1/30\n");
}

#[test]
fn verify_all_sweep_passes() {
    let o = run(&["verify", "all", "--n-max", "25", "--r-max", "6", "--x", "0,1/2,7/3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.len() > 1000);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["status"], "pass", "{line}");
        assert!(v.get("witness").is_none());
    }
}

#[test]
fn verify_json_is_byte_stable() {
    let args = ["verify", "thm2.3", "--n-max", "12", "--x", "0,1/2", "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let first = stdout(&a).lines().next().unwrap().to_string();
    assert_eq!(
        first,
        r#"{"identity_id":"thm2.3a","params":{"n":0,"x":"0"},"status":"pass","elapsed_ms":0}"#
    );
}

#[test]
fn verify_csv_columns() {
    let o = run(&["verify", "thm2.6", "--n-max", "3", "--r-max", "1", "--x", "1/2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("identity_id,n,x,r,status,lhs,rhs,elapsed_ms"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..6], &["thm2.6-finite", "0", "1/2", "0", "pass", ""]);
}

#[test]
fn series_brackets() {
    let o = run(&["series", "zeta", "--N", "100", "--s", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["target_id"], "zeta");
    assert_eq!(v["N"], 100);
    assert_eq!(v["exact"], true);
    assert_eq!(v["claimed_limit"]["coeff"], "1/90");
    assert_eq!(v["claimed_limit"]["pi_power"], 4);

    let o = run(&["series", "cor2.4-r3", "--N", "1"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["partial"], "7/4");
    assert_eq!(v["claimed_limit"], "6");

    let o = run(&["series", "eq32", "--r", "1", "--N", "300", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("claimed -6 (-6) inside bracket"));
}

#[test]
fn series_float_mode_gate() {
    let o = run(&["series", "lemma-c", "--r", "2", "--N", "20000"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["series", "lemma-c", "--r", "2", "--N", "20000", "--float"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["exact"], false);
    assert!(v["partial"].is_f64());
}

#[test]
fn oracle_reports_embed_results() {
    let o = run(&["oracle", "quad", "--n", "2", "--m", "2", "--x", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["identity_id"], "oracle-quad");
    assert!((v["oracle"]["value"].as_f64().unwrap() - 85.0 / 54.0).abs() < 1e-12);

    let args = ["oracle", "mc", "--n", "3", "--r", "2", "--samples", "100000", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let va: serde_json::Value = serde_json::from_str(stdout(&a).trim()).unwrap();
    let vb: serde_json::Value = serde_json::from_str(stdout(&b).trim()).unwrap();
    assert_eq!(va["oracle"], vb["oracle"]);
    assert_eq!(va["oracle"]["seed"], 9);
    assert_eq!(va["oracle"]["generator"], "chacha8");
}

#[test]
fn undersampled_monte_carlo_fails_with_exit_one() {
    // With seed 1 both samples of (1-u)^1000 are below 1e-36, far from the
    // mean 1/1001 relative to their spread.
    let o = run(&["oracle", "mc", "--n", "1000", "--r", "1", "--samples", "2", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "fail");
    assert_eq!(v["witness"]["lhs"], "1/1001");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["compute", "F", "--x", "0.5"],
        vec!["compute", "F", "--x", "1/0"],
        vec!["compute", "G"],
        vec!["verify", "thm9"],
        vec!["verify", "all", "--bogus"],
        vec!["series", "zeta", "--s", "1"],
        vec!["compute", "F", "--n", "2", "--x", "-1"],
        vec!["oracle", "mc", "--samples", "1"],
        vec![],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn output_flag_writes_file() {
    let path: PathBuf = std::env::temp_dir().join(format!("harmonic-id-cli-{}.json", std::process::id()));
    let o = run(&["compute", "F", "--n", "3", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, "{\"quantity\":\"F\",\"n\":3,\"x\":\"0\",\"value\":\"1/4\"}\n");
}

#[test]
fn thread_cap_variable() {
    let o = bin()
        .env("HARMONIC_ID_THREADS", "1")
        .args(["verify", "beta-eq", "--n-max", "5"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = bin()
        .env("HARMONIC_ID_THREADS", "zero")
        .args(["verify", "beta-eq", "--n-max", "5"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = harmonic_id_cli::run(["harmonic-id", "compute", "H", "--n", "4", "--alpha", "2"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), "205/144\n");
    assert!(err.is_empty());
}
