//! End-to-end checks of the command surface: exit codes, report
//! reproducibility, the config file, and the CSV schema.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lieplane"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

#[test]
fn catalog_list_counts() {
    let o = run(&["catalog", "list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 28);
    let o = run(&["catalog", "list", "--hamiltonian-only"]);
    assert_eq!(stdout(&o).lines().count(), 12);
    let o = run(&["catalog", "list", "--hamiltonian-only", "--primitive-only"]);
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), vec!["P1", "P2", "P3", "P5"]);
}

#[test]
fn catalog_show_p2() {
    let o = run(&["catalog", "show", "P2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("y != 0"));
    assert!(text.contains("1/y^2"));
}

#[test]
fn catalog_show_i16_with_params() {
    let o = run(&[
        "catalog", "show", "I16", "--param", "alpha=-1", "--param", "r=1", "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["hamiltonian"]["central_extension"], true);
}

#[test]
fn verify_exit_codes() {
    // P2 basis with an extra ansatz factor: structure found
    let o = run(&[
        "verify",
        "--fields", "1;0",
        "--fields", "x;y",
        "--fields", "x^2 - y^2;2*x*y",
        "--ansatz", "y",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // I9 basis: divergence obstruction
    let o = run(&[
        "verify",
        "--fields", "1;0",
        "--fields", "0;1",
        "--fields", "x;0",
        "--fields", "0;y",
    ]);
    assert_eq!(o.status.code(), Some(3));
    // single field: f = 1, h = y + const
    let o = run(&["verify", "--fields", "1;0"]);
    assert_eq!(o.status.code(), Some(0));
    // parse error
    let o = run(&["verify", "--fields", "1;("]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_so3_fields_with_quadrature_hamiltonians() {
    // the Hamiltonians come out quadrature-defined; the bracket table is
    // solved numerically and still names the trivializable extension
    let o = run(&[
        "verify",
        "--fields", "y;-x",
        "--fields", "1 + x^2 - y^2;2*x*y",
        "--fields", "2*x*y;1 + y^2 - x^2",
        "--no-timestamp",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        v["report"]["bracket_table"]["lie_hamilton_algebra"],
        "so(3) + R"
    );
    assert_eq!(v["report"]["bracket_table"]["central_extension"], true);
}

#[test]
fn verify_inconclusive_exit() {
    // the factor 1/(1+x^2) is outside the ansatz vocabulary and there is no
    // divergence obstruction for a single field
    let o = run(&["verify", "--fields", "1 + x^2;0"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn simulate_abort_exits_5() {
    // starting on the guard zero set aborts before integration
    let o = run(&[
        "simulate", "riccati",
        "--coeff", "a0=1",
        "--x0", "0,0",
        "--t1", "1",
        "--no-timestamp",
    ]);
    assert_eq!(o.status.code(), Some(5));
    // finite-time escape aborts mid-run with partial output
    let o = run(&[
        "simulate", "kummer-schwarz",
        "--param", "c=-1",
        "--coeff", "b1=sin(t)",
        "--x0", "1,0.3",
        "--t1", "2",
        "--no-timestamp",
    ]);
    assert_eq!(o.status.code(), Some(5));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["report"]["termination"].as_str().unwrap().contains("StepUnderflow"));
    assert!(!v["report"]["samples"].as_array().unwrap().is_empty());
}

#[test]
fn simulate_riccati_equilibrium() {
    let dir = std::env::temp_dir().join("lieplane-cli-test-sim");
    let _ = std::fs::create_dir_all(&dir);
    let csv = dir.join("riccati.csv");
    let o = run(&[
        "simulate", "riccati",
        "--coeff", "a0=1", "--coeff", "a1=0", "--coeff", "a2=1",
        "--x0", "0,1", "--t1", "3",
        "--csv", csv.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,x,y,h,residual");
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let x: f64 = cols[1].parse().unwrap();
        let y: f64 = cols[2].parse().unwrap();
        assert!(x.abs() < 1e-8 && (y - 1.0).abs() < 1e-8, "not constant: {line}");
    }
}

#[test]
fn reports_are_reproducible() {
    let args = [
        "simulate", "milne-pinney",
        "--param", "c=1",
        "--coeff", "w2=1",
        "--x0", "2,0",
        "--t1", "5",
        "--no-timestamp",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b, "reports differ between runs");
    assert!(!a.contains("timestamp"));
}

#[test]
fn config_file_defaults_with_flag_override() {
    let dir = std::env::temp_dir().join("lieplane-cli-test-cfg");
    let _ = std::fs::create_dir_all(&dir);
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "t1 = 5\nrtol = 1e-7\ncoeff = w2=1\nparam = c=1\n").unwrap();
    // flag t1 wins over the config value
    let o = run(&[
        "simulate", "milne-pinney",
        "--config", cfg.to_str().unwrap(),
        "--x0", "2,0",
        "--t1", "1",
        "--no-timestamp",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["t1"], 1.0);
    assert_eq!(v["config"]["rtol"], 1e-7);
}

#[test]
fn transport_ks_to_mp() {
    let o = run(&[
        "transport",
        "--from", "ks", "--to", "mp",
        "--param", "c=-1", "--param", "target-c=-1/4",
        "--coeff", "b1=sin(t)",
        "--x0", "1,0.3",
        "--t1", "2",
        "--no-timestamp",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["report"]["max_deviation"].as_f64().unwrap() < 1e-5);
}

#[test]
fn transport_identity() {
    let o = run(&[
        "transport",
        "--from", "mp", "--to", "mp",
        "--param", "c=1",
        "--coeff", "w2=1",
        "--x0", "2,0",
        "--t1", "2",
        "--no-timestamp",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["report"]["max_deviation"].as_f64().unwrap() < 1e-10);
}
