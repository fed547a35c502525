use std::process::{Command, Output};

use tempfile::TempDir;

fn qms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qms"))
        .args(args)
        .env_remove("QMS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn with_config(dir: &TempDir, toml: &str) -> String {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, toml).unwrap();
    path.to_str().unwrap().to_string()
}

/// `(key, value)` pairs of a two-column CSV, skipping header comments.
fn table(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn value(rows: &[(String, String)], key: &str) -> String {
    rows.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone()).unwrap_or_else(|| panic!("no row {key}"))
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn chsh_singlet_is_infeasible() {
    let rows = table(&stdout(&qms(&["chsh"])));
    let s: f64 = value(&rows, "S").parse().unwrap();
    assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert_eq!(value(&rows, "status"), "infeasible");
}

#[test]
fn chsh_deterministic_lhv_is_feasible() {
    let dir = TempDir::new().unwrap();
    let cfg = with_config(&dir, "mode = \"lhv\"\n");
    let rows = table(&stdout(&qms(&["chsh", "--config", &cfg])));
    assert_eq!(value(&rows, "S").parse::<f64>().unwrap(), 2.0);
    assert_eq!(value(&rows, "status"), "feasible");
}

#[test]
fn random_tensor_mode_is_bounded_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = with_config(&dir, "mode = \"random-tensor\"\n");
    let out = |name: &str| {
        let path = dir.path().join(name);
        let o = qms(&["chsh", "--config", &cfg, "--samples", "2000", "--seed", "9", "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
        std::fs::read(path).unwrap()
    };
    let first = out("a.csv");
    assert_eq!(first, out("b.csv"));
    let text = String::from_utf8(first).unwrap();
    assert!(text.contains("# seed: 9\n"));
    let rows = table(&text);
    assert_eq!(rows.len(), 2000);
    assert_eq!(rows[0].0, "9");
    assert!(rows.iter().all(|(_, s)| s.parse::<f64>().unwrap().abs() <= 2.0 + 1e-12));
}

#[test]
fn ghz_report() {
    let o = qms(&["ghz"]);
    let rows = table(&stdout(&o));
    assert_eq!(value(&rows, "full_system"), "INFEASIBLE");
    assert_eq!(value(&rows, "relaxed_system"), "FEASIBLE");
    assert_eq!(value(&rows, "forced_XXX_max").parse::<f64>().unwrap(), -1.0);
    let q: Vec<f64> = ["XYY", "YXY", "YYX", "XXX"]
        .iter()
        .map(|n| value(&rows, &format!("quantum_{n}")).parse().unwrap())
        .collect();
    assert_eq!(q, [-1.0, -1.0, -1.0, 1.0]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("forced <XXX> = -1"));
}

#[test]
fn bell_test_noisy_singlet() {
    let rows = table(&stdout(&qms(&["bell-test"])));
    assert_eq!(value(&rows, "status"), "infeasible");
    let v: f64 = value(&rows, "critical_visibility").parse().unwrap();
    assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);

    let dir = TempDir::new().unwrap();
    let cfg = with_config(&dir, "visibility = 0.7\n");
    let rows = table(&stdout(&qms(&["bell-test", "--config", &cfg])));
    assert_eq!(value(&rows, "status"), "feasible");
    assert!(rows.iter().any(|(k, _)| k == "cell_15"));
}

#[test]
fn bound_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = with_config(&dir, "preset = { kind = \"xy\" }\n");
    let text = stdout(&qms(&["bound", "--config", &cfg]));
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "k,s_k,S_k");
    let s: Vec<f64> = body[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let want = [1.0, 0.5f64.sqrt(), (2.0 - 2f64.sqrt()) / 2.0, 0.0];
    for (a, b) in s.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn oversized_pool_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = with_config(&dir, "preset = { kind = \"planar\", n = 7 }\n");
    assert_eq!(qms(&["bound", "--config", &cfg]).status.code(), Some(3));
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = with_config(&dir, "sed = 3\n");
    assert_eq!(qms(&["bound", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(qms(&["bound"]).status.code(), Some(2));
    assert_eq!(qms(&["chsh", "--config", "/nonexistent/run.toml"]).status.code(), Some(2));
    assert_eq!(qms(&["steer"]).status.code(), Some(2));
    assert_eq!(qms(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn steer_werner_both_directions() {
    let dir = TempDir::new().unwrap();
    let cfg = with_config(
        &dir,
        r#"
direction = "both"
state = { kind = "qubit-werner", eta = 0.8 }
alice = [{ kind = "pauli", axis = "x" }, { kind = "pauli", axis = "y" }]
bob = [{ kind = "pauli", axis = "x" }, { kind = "pauli", axis = "y" }]
"#,
    );
    let o = qms(&["steer", "--config", &cfg]);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    for d in ["a-steers-b", "b-steers-a"] {
        let k2 = rows.iter().find(|r| r[0] == d && r[1] == "2").unwrap();
        assert!((k2[2].parse::<f64>().unwrap() - 1.8).abs() < 1e-12);
        assert!(k2[4].parse::<f64>().unwrap() < 0.0);
    }
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.matches("VIOLATED").count(), 2);
}

#[test]
fn scan_planar_sizes() {
    let dir = TempDir::new().unwrap();
    let cfg = with_config(
        &dir,
        r#"
family = { kind = "qubit-werner" }
preset = { kind = "planar", n = 2 }
sizes = [2, 4, 8]
"#,
    );
    let rows = table(&stdout(&qms(&["scan", "--config", &cfg])));
    let t: Vec<f64> = rows.iter().map(|(_, v)| v.parse().unwrap()).collect();
    assert_eq!(rows.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(), ["2", "4", "8"]);
    assert!((t[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    assert!(t.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn scan_qutrit_isotropic() {
    let dir = TempDir::new().unwrap();
    let cfg = with_config(
        &dir,
        r#"
family = { kind = "isotropic", dim = 3 }
preset = { kind = "mub", dim = 3 }
"#,
    );
    let rows = table(&stdout(&qms(&["scan", "--config", &cfg])));
    let t: f64 = value(&rows, "4").parse().unwrap();
    assert!((t - (3.0 * 5f64.sqrt() + 1.0) / 16.0).abs() < 1e-6);
}

#[test]
fn table1_writes_atomically_under_out_dir() {
    let dir = TempDir::new().unwrap();
    let cfg = with_config(&dir, "sizes = [10, 100, 1000]\n");
    let o = Command::new(env!("CARGO_BIN_EXE_qms"))
        .args(["table1", "--config", &cfg, "--out", "nested/table1.csv"])
        .env("QMS_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let path = dir.path().join("nested/table1.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let leftovers = std::fs::read_dir(path.parent().unwrap()).unwrap().count();
    assert_eq!(leftovers, 1);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "state,measurements,computed,expected,abs_error");
    let error_of = |prefix: &str| -> f64 {
        let line = body.iter().find(|l| l.starts_with(prefix)).unwrap_or_else(|| panic!("no row {prefix}"));
        line.rsplit(',').next().unwrap().parse().unwrap()
    };
    assert!(error_of("qutrit isotropic,qutrit MUB") < 1e-6);
    assert!(error_of("qutrit Werner,qutrit MUB") < 1e-6);
    assert!(error_of("qubit Werner,\"sigma_x, sigma_y\"") < 1e-6);
}
