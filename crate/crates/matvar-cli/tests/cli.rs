use std::path::Path;
use std::process::{Command, Output};

fn matvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matvar")).env_remove("MATVAR_TABLE_DIR").args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

/// Data rows of a CSV, skipping the `#` header line and the column names.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn hypergeometric_at_zero_is_one() {
    let o = matvar(&["eval-hyperg", "--upper", "1.5", "--lower", "2.5", "--eigenvalues", "0,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(rows(&stdout(&o))[0][0], "1.0");
}

#[test]
fn header_records_version_and_config() {
    let o = matvar(&["zonal", "--kappa", "(2)", "--eigenvalues", "1,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let header: serde_json::Value =
        serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# ")).unwrap();
    assert_eq!(header["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(header["config"]["command"], "zonal");
    let value: f64 = rows(&text)[0].last().unwrap().parse().unwrap();
    assert!((value - 8.0 / 3.0).abs() < 1e-15);
}

#[test]
fn out_of_domain_spec_exits_two_with_bound() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "bad.json",
        r#"{"family": "compound_thm1", "a": 0.2, "xi": [[1, 0], [0, 1]], "upsilon": [[0, 0], [0, 0]], "hypergeom": {},
            "params": {"mu": [[0, 0]], "sigma": [[1, 0], [0, 1]], "theta": [[1]]}}"#,
    );
    let points = write(dir.path(), "p.txt", "0 0\n");
    let o = matvar(&["eval-density", "--spec", &spec, "--points", &points]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("0.5"), "{}", stderr(&o));
}

#[test]
fn unknown_key_and_subcommand_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.json",
        r#"{"family": "matrix_normal", "params": {"mu": [[0]], "sigma": [[1]], "theta": [[1]]}, "colour": 1}"#,
    );
    let points = write(dir.path(), "p.txt", "0\n");
    let o = matvar(&["eval-density", "--spec", &spec, "--points", &points]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
    assert_eq!(matvar(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn normal_density_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.json",
        r#"{"family": "matrix_normal", "params": {"mu": [[0]], "sigma": [[1]], "theta": [[1]]}}"#,
    );
    let points = write(dir.path(), "p.txt", "0\n1.5\n");
    let o = matvar(&["eval-density", "--spec", &spec, "--points", &points, "--exp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for (row, x) in rows(&stdout(&o)).iter().zip([0.0f64, 1.5]) {
        let want = -0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * x * x;
        assert!((row[1].parse::<f64>().unwrap() - want).abs() < 1e-14);
        assert!((row[2].parse::<f64>().unwrap() - want.exp()).abs() < 1e-14);
    }
}

#[test]
fn sampling_is_reproducible_from_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.json",
        r#"{"family": "matricvariate_t", "nu": 4, "params": {"mu": [[0, 1]], "sigma": [[1, 0.2], [0.2, 2]], "theta": [[1]]}}"#,
    );
    let run = |seed: &str| stdout(&matvar(&["sample", "--spec", &spec, "--n", "50", "--seed", seed]));
    let (a, b, c) = (run("3"), run("3"), run("4"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    let r = rows(&a);
    assert_eq!(r.len(), 50);
    assert_eq!(r[0].len(), 3);
}

#[test]
fn dumped_tables_are_preloaded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = matvar(&["dump-tables", "--max-degree", "8", "--max-parts", "2", "--out-dir", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("zonal_m2.txt").exists());
    let o = Command::new(env!("CARGO_BIN_EXE_matvar"))
        .env("MATVAR_TABLE_DIR", d)
        .args(["zonal", "--degree", "3", "--eigenvalues", "0.5,2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // Over all partitions of 3 the zonal polynomials sum to (tr Y)^3.
    let total: f64 = rows(&stdout(&o)).iter().map(|r| r.last().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 2.5f64.powi(3)).abs() < 1e-12);
    std::fs::write(dir.path().join("zonal_m3.txt"), "garbage").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_matvar"))
        .env("MATVAR_TABLE_DIR", d)
        .args(["zonal", "--degree", "1", "--eigenvalues", "1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mellin_check_passes() {
    let o = matvar(&["mellin-check", "--form", "confluent", "--alpha", "1", "--b", "3", "--c", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let o = matvar(&["mellin-check", "--form", "gauss", "--alpha", "1", "--a", "3", "--b", "3", "--c", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn verify_suite_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = matvar(&["verify", "--suite", "specialfun", "--seed", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["failed"], 0);
    assert_eq!(report["header"]["seed"], 11);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}
