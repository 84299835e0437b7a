use std::f64::consts::PI;
use std::path::Path;

use qsense_core::cli::{run_figure, run_with_args, validate_config, FigureId, FigureOptions};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with_args(args.iter().copied(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn opts(dir: &Path, name: &str, shots: Option<u64>) -> FigureOptions {
    FigureOptions {
        shots,
        out: Some(dir.join(name)),
        ..Default::default()
    }
}

#[test]
fn fig3_exact_mode_is_cos_squared() {
    let dir = tempfile::tempdir().unwrap();
    let art = run_figure(FigureId::Fig3, &opts(dir.path(), "f3.csv", Some(0))).unwrap();
    let (h, rows) = read_csv(&art.csv);
    assert_eq!(h, ["theta", "phi", "alpha", "p0_estimate", "p0_stderr", "p0_theory"]);
    let alpha = col(&h, &rows, "alpha");
    let theory = col(&h, &rows, "p0_theory");
    let est = col(&h, &rows, "p0_estimate");
    for ((a, t), e) in alpha.iter().zip(&theory).zip(&est) {
        let c2 = (a / 2.0).cos().powi(2);
        assert_eq!(*t, c2);
        assert!((e - c2).abs() < 1e-12);
    }
}

#[test]
fn fig1d_exact_theory_column() {
    let dir = tempfile::tempdir().unwrap();
    let art = run_figure(FigureId::Fig1d, &opts(dir.path(), "f1d.csv", Some(0))).unwrap();
    let (h, rows) = read_csv(&art.csv);
    assert_eq!(h, ["lambda", "theta", "fi_estimate", "fi_stderr", "fi_theory"]);
    assert_eq!(rows.len(), 42);
    let lam = col(&h, &rows, "lambda");
    let th = col(&h, &rows, "theta");
    let theory = col(&h, &rows, "fi_theory");
    let est = col(&h, &rows, "fi_estimate");
    for i in 0..rows.len() {
        assert!(lam[i] == 0.0 || (lam[i] + PI / 4.0).abs() < 1e-15);
        let want = (th[i] - lam[i]).sin().powi(2);
        assert!((theory[i] - want).abs() < 1e-15);
        assert!((est[i] - want).abs() < 1e-9, "{} {}", est[i], want);
    }
}

#[test]
fn figs3_has_five_curves() {
    let dir = tempfile::tempdir().unwrap();
    let art = run_figure(FigureId::FigS3, &opts(dir.path(), "s3.csv", None)).unwrap();
    let (h, rows) = read_csv(&art.csv);
    let mut f = col(&h, &rows, "fidelity");
    f.dedup();
    assert_eq!(f, vec![0.25, 0.5, 0.75, 0.94, 1.0]);
    let fi = col(&h, &rows, "fi");
    // Ideal curve is flat at 1.
    for (x, y) in col(&h, &rows, "fidelity").iter().zip(&fi) {
        if *x == 1.0 {
            assert!((y - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn fig2f_columns_and_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let art = run_figure(FigureId::Fig2f, &opts(dir.path(), "f2f.csv", None)).unwrap();
    let (h, rows) = read_csv(&art.csv);
    assert_eq!(h, ["theta", "fi_estimate", "fi_stderr", "fi_theory"]);
    for (e, t) in col(&h, &rows, "fi_estimate").iter().zip(col(&h, &rows, "fi_theory")) {
        assert!((e - t).abs() < 0.06);
    }
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for id in FigureId::ALL {
        let a = run_figure(id, &opts(dir.path(), "a.csv", None)).unwrap();
        let b = run_figure(id, &opts(dir.path(), "b.csv", None)).unwrap();
        assert_eq!(std::fs::read(&a.csv).unwrap(), std::fs::read(&b.csv).unwrap(), "{id}");
        let sa = std::fs::read_to_string(&a.sidecar).unwrap();
        let sb = std::fs::read_to_string(&b.sidecar).unwrap();
        assert_eq!(sa, sb);
    }
    let mut o = opts(dir.path(), "c.csv", None);
    o.seed = Some(99);
    let c = run_figure(FigureId::Fig1c, &o).unwrap();
    let base = run_figure(FigureId::Fig1c, &opts(dir.path(), "d.csv", None)).unwrap();
    assert_ne!(std::fs::read(&c.csv).unwrap(), std::fs::read(&base.csv).unwrap());
}

#[test]
fn command_line_figure_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let (code, stdout, _) = run(&["qsense", "figure", "fig2c", "--shots", "500", "--seed", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("25 rows"));
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("x.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["shots"], 500);
    assert!(side["version"].is_string());

    let (code, _, err) = run(&["qsense", "figure", "fig3", "--fidelity", "1.5"]);
    assert_eq!(code, 1);
    assert!(err.contains("prep_fidelity"));
    let (code, _, _) = run(&["qsense", "figure", "fig9"]);
    assert_eq!(code, 2);
    let bad = dir.path().join("no_such_dir_file").join("\0");
    let (code, _, _) = run(&["qsense", "figure", "figs3", "--out", bad.to_str().unwrap()]);
    assert_ne!(code, 0);
}

#[test]
fn qfim_and_protocol_commands() {
    let (code, out, _) = run(&["qsense", "qfim", "--state", "rho-star", "--alpha", "1.0", "--theta", "0.7", "--phi", "0.3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["alpha_bound"]["bound"].as_f64().unwrap() - 1.5).abs() < 1e-6);

    let (code, out, _) = run(&["qsense", "qfim", "--alpha", "1.0", "--theta", "0.7"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["alpha_bound"]["non_identifiable"].is_string());

    let (code, out, _) = run(&["qsense", "protocol", "agnostic", "--alpha", "-1.2", "--theta", "1.0", "--phi", "2.0", "--shots", "100", "--seed", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["fim"][0][0].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["shots"]["n_total"], 100);
}

const SAMPLE: &str = r#"{
  "protocol": {"kind": "single_qubit", "lambda": 0.0, "obs_axis": [0.0, 1.0, 0.0]},
  "theta": [1.5707963267948966, 0.0],
  "phi": 0.0,
  "alpha": {"start": -1.0, "stop": 1.0, "points": 5},
  "shots": 0,
  "seed": 1,
  "readout": "ideal",
  "output": "unused.csv"
}"#;

#[test]
fn validate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, SAMPLE).unwrap();
    assert!(validate_config(&good).unwrap().is_empty());
    let (code, out, _) = run(&["qsense", "validate", good.to_str().unwrap()]);
    assert_eq!((code, out.trim_end().ends_with("ok")), (0, true));

    let neg = dir.path().join("neg.json");
    std::fs::write(&neg, SAMPLE.replace("\"shots\": 0", "\"shots\": -1")).unwrap();
    let d = validate_config(&neg).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].field, "shots");
    let (code, out, _) = run(&["qsense", "validate", neg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("shots"));

    let theta = dir.path().join("theta.json");
    std::fs::write(&theta, SAMPLE.replace("[1.5707963267948966, 0.0]", "[1.0, 3.5]")).unwrap();
    let d = validate_config(&theta).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].field, "theta[1]");

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\n  \"protocol\": {\"kind\": \"agnostic\"},\n  \"theta\": oops\n}").unwrap();
    let d = validate_config(&broken).unwrap();
    assert!(d[0].message.starts_with("line 3"), "{}", d[0].message);
}

#[test]
fn sweep_is_sorted_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let text = SAMPLE.replace("\"shots\": 0", "\"shots\": 200");
    std::fs::write(&cfg, text).unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let (code, _, err) = run(&["qsense", "sweep", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (h, rows) = read_csv(&a);
    assert_eq!(h, ["theta", "phi", "alpha", "p_+1", "p_-1", "n_+1", "n_-1", "fi_theory"]);
    let th = col(&h, &rows, "theta");
    assert_eq!(th[0], 0.0);
    assert_eq!(th[9], PI / 2.0);
    let fi = col(&h, &rows, "fi_theory");
    let al = col(&h, &rows, "alpha");
    // θ = π/2, λ = 0, Y observable: FI = 1 off the poles.
    for i in 5..10 {
        assert!((fi[i] - 1.0).abs() < 1e-6, "{} {}", al[i], fi[i]);
    }

    // Exact mode: no count columns, probabilities match the model.
    let (code, _, _) = run(&["qsense", "sweep", cfg.to_str().unwrap(), "--shots", "0", "--out", a.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (h, rows) = read_csv(&a);
    assert_eq!(h.len(), 6);
    let p = col(&h, &rows, "p_+1");
    for i in 5..10 {
        let a = al[i];
        assert!((p[i] - (1.0 - a.sin()) / 2.0).abs() < 1e-12 || (p[i] - (1.0 + a.sin()) / 2.0).abs() < 1e-12);
    }
}

#[test]
fn readout_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, r#"{"rows": [[0.97, 0.03], [0.05, 0.95]]}"#).unwrap();
    let out = dir.path().join("r.csv");
    let (code, _, err) = run(&["qsense", "figure", "fig3", "--shots", "0", "--readout", m.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (h, rows) = read_csv(&out);
    // Exact unfolding recovers the noiseless curve; convergence is slow next to p = 0 or 1.
    for (e, t) in col(&h, &rows, "p0_estimate").iter().zip(col(&h, &rows, "p0_theory")) {
        let tol = if t > 0.05 && t < 0.95 { 1e-6 } else { 2e-2 };
        assert!((e - t).abs() < tol, "{e} {t}");
    }
    let (code, _, err) = run(&["qsense", "figure", "fig2c", "--readout", m.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("outcomes"));
}
