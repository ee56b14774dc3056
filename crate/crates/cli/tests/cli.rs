use std::process::{Command, Output};

fn lambda_holo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambda-holo"))
        .args(args)
        .output()
        .expect("spawn lambda-holo")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().to_owned())
        .collect()
}

#[test]
fn rwa_not_is_exact() {
    let out = lambda_holo(&["run", "--mode", "rwa", "--gate", "not", "--input", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert_eq!(column(&text, "fidelity"), ["1.000000"]);
}

#[test]
fn table1_shape() {
    let out = lambda_holo(&["table1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let header = text.lines().next().unwrap();
    assert!(header.ends_with("fidelity,excited_population,overlap_phase"));
    assert_eq!(column(&text, "fe0").len(), 12);
    assert_eq!(column(&text, "fe0")[0], "1.0000e6");
}

#[test]
fn fig1_grid_size() {
    let out = lambda_holo(&[
        "fig1",
        "--tau-min-ns",
        "1",
        "--tau-max-ns",
        "100",
        "--points",
        "100",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let gates = column(&text, "gate");
    assert_eq!(gates.len(), 200);
    assert_eq!(gates.iter().filter(|g| *g == "not").count(), 100);
    assert!(column(&text, "input").iter().all(|i| i == "avg"));
}

#[test]
fn fig2_series() {
    let out = lambda_holo(&[
        "fig2",
        "--tau-min-ns",
        "40",
        "--tau-max-ns",
        "100",
        "--points",
        "2",
    ]);
    assert!(out.status.success());
    let series = column(&stdout(&out), "series");
    assert_eq!(
        series,
        ["first-second", "second-first", "product"].repeat(2)
    );
}

#[test]
fn json_records() {
    let out = lambda_holo(&["table2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), 15);
    assert_eq!(records[0]["envelope"], "gaussian");
    assert!(records[0]["fidelity"].as_f64().unwrap() > 0.99);
}

#[test]
fn output_file_and_config_file() {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let config = dir.join("run.toml");
    let output = dir.join("run.csv");
    std::fs::write(
        &config,
        "mode = \"rwa\"\nenvelope = \"square\"\ntau-ns = 10.0\n",
    )
    .unwrap();
    let out = lambda_holo(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--tau-ns",
        "20",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&output).unwrap();
    assert_eq!(column(&text, "envelope"), ["square"]);
    assert_eq!(column(&text, "tau_ns"), ["20"]);
    assert_eq!(column(&text, "mode"), ["rwa"]);
}

#[test]
fn ghz_frequencies_are_echoed_in_rad_per_s() {
    let out = lambda_holo(&["run", "--fe0-ghz", "1", "--fe1-ghz", "1"]);
    assert!(out.status.success());
    assert_eq!(column(&stdout(&out), "fe0"), ["6.2832e9"]);
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "tau-ns = 10.0\nfwhm = 0.3\n").unwrap();
    let cases: [(&[&str], &str); 5] = [
        (&["run", "--envelope", "triangle"], "envelope"),
        (&["run", "--tau-ns", "0"], "tau-ns"),
        (&["table1", "--fe0", "1e9"], "fe0"),
        (&["run", "--config", bad.to_str().unwrap()], "fwhm"),
        (&["run", "--bogus", "1"], "--bogus"),
    ];
    for (args, key) in cases {
        let out = lambda_holo(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{args:?}: {err}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn convergence_guard_exits_1() {
    let out = lambda_holo(&["run", "--tau-ns", "2.5", "--convergence-tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("refinement"));
}
