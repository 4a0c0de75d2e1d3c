use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::tempdir;

fn ptlab(args: &[&str]) -> (i32, String, String) {
    ptlab_env(args, None)
}

fn ptlab_env(args: &[&str], threads: Option<&str>) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ptlab"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("PTLAB_THREADS", t),
        None => cmd.env_remove("PTLAB_THREADS"),
    };
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::Reader::from_path(path).unwrap();
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let rows = rd
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn hc_spectrum_table() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("hc.csv");
    let (code, _, err) = ptlab(&[
        "spectrum",
        "--model",
        "hc",
        "--range",
        "-3:1.5:451",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["R", "idx", "re", "im"]);
    assert_eq!(rows.len(), 451 * 5);
    // the straight branches E = 3 and E = 1 + R are present at every R
    for chunk in rows.chunks(5) {
        let r: f64 = chunk[0][0].parse().unwrap();
        let res: Vec<f64> = chunk.iter().map(|row| row[2].parse().unwrap()).collect();
        assert!(res.iter().any(|e| (e - 3.0).abs() < 1e-9), "R = {r}");
        assert!(res.iter().any(|e| (e - 1.0 - r).abs() < 1e-9), "R = {r}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn csv_values_reparse_bitwise() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let (code, _, _) = ptlab(&[
        "spectrum",
        "--model",
        "rho_b",
        "--range",
        "-1:1:7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for row in read_csv(&out).1 {
        for f in [&row[0], &row[2], &row[3]] {
            let v: f64 = f.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), *f);
        }
    }
}

#[test]
fn kep_prints_rounded_value() {
    let (code, out, _) = ptlab(&[
        "kep",
        "--model",
        "rho_a",
        "--bracket",
        "0.9:1.1",
        "--tol",
        "1e-7",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1.0363404");
}

#[test]
fn diagonal_metric_output() {
    let (code, out, err) = ptlab(&[
        "metric", "--model", "hc", "--R", "0.5", "--method", "diagonal",
    ]);
    assert_eq!(code, 0);
    let want = [1.0, 0.5, 0.5, 0.5, 0.25];
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    for rec in rd.records() {
        let rec = rec.unwrap();
        let (i, j): (usize, usize) = (rec[0].parse().unwrap(), rec[1].parse().unwrap());
        let v: f64 = rec[2].parse().unwrap();
        assert_eq!(v, if i == j { want[i] } else { 0.0 });
    }
    let residual: f64 = err
        .split_whitespace()
        .find_map(|w| w.strip_prefix("residual="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-12);
}

#[test]
fn other_metric_methods() {
    for (model, method, extra) in [
        ("hc", "spectral", vec![]),
        ("laplacian", "closed-form", vec![]),
        ("hc", "recurrent", vec!["--params", "1,0,0,0,0"]),
    ] {
        let mut args = vec!["metric", "--model", model, "--R", "0.3", "--method", method];
        args.extend(extra);
        let (code, _, err) = ptlab(&args);
        assert_eq!(code, 0, "{method}: {err}");
        assert!(
            err.contains("classification=positive-definite"),
            "{method}: {err}"
        );
    }
    let (code, _, err) = ptlab(&[
        "metric",
        "--model",
        "hc",
        "--R",
        "0.3",
        "--method",
        "recurrent",
        "--params",
        "1,2",
    ]);
    assert_eq!(code, 1, "{err}");
    let (code, _, err) = ptlab(&[
        "metric",
        "--model",
        "hc",
        "--R",
        "0.3",
        "--method",
        "closed-form",
    ]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn model_file_and_errors() {
    let dir = tempdir().unwrap();
    let good = dir.path().join("m.json");
    let zero = r#"{"re":0,"im":0}"#;
    fs::write(
        &good,
        format!(r#"{{"n":4, "z":{{"re":0,"im":0.5}}, "a":0, "b":0, "alpha":[{zero},{zero},{zero}], "beta":[{zero},{zero},{zero}]}}"#),
    )
    .unwrap();
    let (code, out, err) = ptlab(&[
        "spectrum",
        "--model",
        good.to_str().unwrap(),
        "--range",
        "0:1:3",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 1 + 3 * 5);

    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        format!(r#"{{"n":4, "z":{{"re":0,"im":0.5}}, "a":0, "b":0, "alpha":[{zero},{zero}], "beta":[{zero},{zero},{zero}]}}"#),
    )
    .unwrap();
    let (code, _, err) = ptlab(&[
        "spectrum",
        "--model",
        bad.to_str().unwrap(),
        "--range",
        "0:1:3",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("alpha"), "{err}");
}

#[test]
fn exit_codes() {
    assert_eq!(
        ptlab(&["spectrum", "--model", "hc", "--range", "1:0:3"]).0,
        1
    );
    assert_eq!(ptlab(&["spectrum", "--model", "hc"]).0, 1);
    assert_eq!(ptlab(&["frobnicate"]).0, 1);
    assert_eq!(ptlab(&["--help"]).0, 0);
    assert_eq!(
        ptlab(&["kep", "--model", "rho_a", "--bracket", "0.1:0.2"]).0,
        1
    );
    assert_eq!(
        ptlab(&["metric", "--model", "hc", "--R", "1.5", "--method", "diagonal"]).0,
        2
    );
    assert_eq!(
        ptlab(&[
            "metric",
            "--model",
            "hc",
            "--R",
            "1.0",
            "--method",
            "recurrent",
            "--params",
            "1,0,0,0,0"
        ])
        .0,
        2
    );
    assert_eq!(
        ptlab_env(
            &["spectrum", "--model", "hc", "--range", "0:1:2"],
            Some("zero")
        )
        .0,
        1
    );
}

#[test]
fn thread_cap_keeps_output_identical() {
    let args = ["spectrum", "--model", "h7", "--range", "-1:1:64"];
    let one = ptlab_env(&args, Some("1"));
    let many = ptlab_env(&args, Some("4"));
    let default = ptlab(&args);
    assert_eq!(one.0, 0);
    assert_eq!(one.1, many.1);
    assert_eq!(one.1, default.1);
}

#[test]
fn positivity_and_pseudometric_tables() {
    let dir = tempdir().unwrap();
    let pos = dir.path().join("pos.csv");
    let (code, out, _) = ptlab(&[
        "positivity",
        "--model",
        "hc",
        "--range",
        "0:1:11",
        "--method",
        "tridiagonal",
        "--w",
        "0.5",
        "--out",
        pos.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (header, rows) = read_csv(&pos);
    assert_eq!(header, ["param", "min_eig", "classification"]);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[10][2], "failed");
    assert!(out.contains("positive-definite on"));

    let ps = dir.path().join("ps.csv");
    let (code, out, _) = ptlab(&[
        "pseudometric",
        "--R",
        "0",
        "--xi-range",
        "0:1:5",
        "--out",
        ps.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (header, rows) = read_csv(&ps);
    assert_eq!(header, ["xi", "idx", "tau"]);
    assert_eq!(rows.len(), 5 * 7);
    assert!(out.starts_with("xi_opt=3.82683"));

    let (code, _, _) = ptlab(&[
        "positivity",
        "--model",
        "h7",
        "--range",
        "0:1:3",
        "--method",
        "tridiagonal",
        "--w",
        "0.5",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn bound_states_table() {
    let (code, out, _) = ptlab(&["bound-states", "--model", "hc", "--R", "0.5"]);
    assert_eq!(code, 0);
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rd.headers().unwrap(), vec!["idx", "E", "residual"]);
    let energies: Vec<f64> = rd
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    assert_eq!(energies.len(), 5);
    assert!(energies.iter().any(|e| (e - 1.5).abs() < 1e-9));
    assert!(energies.iter().any(|e| (e - 3.0).abs() < 1e-9));
}
