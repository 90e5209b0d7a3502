use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use isosurf_cli::output::read_obj;
use serde_json::Value;
use tempfile::TempDir;

fn isosurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isosurf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &TempDir, json: &str) -> PathBuf {
    let p = dir.path().join("job.json");
    fs::write(&p, json).unwrap();
    p
}

fn run_with(json: &str, cmd: &[&str]) -> (TempDir, PathBuf, Output) {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, json);
    let out = dir.path().join("out");
    let mut args = cmd.to_vec();
    args.extend([
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let o = isosurf(&args);
    (dir, out, o)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_rows(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .map(|v| v.parse::<f64>().unwrap())
                .collect()
        })
        .collect();
    (header, rows)
}

const HELICOID: &str = r#"{
    "signature": "simply",
    "subgroup": {"phi": 1.0, "c": 1.0},
    "curve": {"plane": "xy", "kind": "line", "params": [0.5, 0.0, 1.0, 0.0], "domain": [0.0, 1.0]},
    "domain": {"u": [0.0, 1.0], "t": [0.0, 3.0]},
    "grid": [16, 16]
}"#;

#[test]
fn helicoid_on_a_4x4_grid_has_16_vertices_and_9_quads() {
    let (_d, out, o) = run_with(HELICOID, &["generate", "--grid", "4x4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let obj = fs::read_to_string(out.join("surface.obj")).unwrap();
    let (verts, faces) = read_obj(obj.as_bytes()).unwrap();
    assert_eq!(verts.len(), 16);
    assert_eq!(faces.len(), 9);
    assert!(faces
        .iter()
        .all(|f| f.len() == 4 && f.iter().all(|&i| i < 16)));
    let rep = read_json(&out.join("generate.json"));
    assert_eq!(rep["schema"], "isosurf/1");
    assert_eq!(rep["vertices"], 16);
    assert_eq!(rep["faces"], 9);
    assert_eq!(rep["family"], "Y2");
}

#[test]
fn obj_reparses_bit_for_bit_and_matches_the_csv() {
    let (_d, out, o) = run_with(HELICOID, &["generate"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let obj = fs::read_to_string(out.join("surface.obj")).unwrap();
    for line in obj.lines().filter(|l| l.starts_with("v ")) {
        let digits = line
            .split_whitespace()
            .nth(1)
            .unwrap()
            .split('e')
            .next()
            .unwrap();
        assert_eq!(
            digits.chars().filter(|c| c.is_ascii_digit()).count(),
            17,
            "{line}"
        );
    }
    let (verts, _) = read_obj(obj.as_bytes()).unwrap();
    let (header, rows) = csv_rows(&out.join("surface.csv"));
    assert_eq!(header, ["u", "t", "x", "y", "z", "K", "H", "det_g"]);
    assert_eq!(rows.len(), verts.len());
    for (v, r) in verts.iter().zip(&rows) {
        for k in 0..3 {
            assert_eq!(v[k].to_bits(), r[2 + k].to_bits());
        }
        assert!(r.iter().all(|x| x.is_finite()), "{r:?}");
    }
}

#[test]
fn sphere_vertices_lie_on_the_quadric() {
    for (sig, plane, sub, sign) in [
        ("simply", "xz", r#"{"phi": 1.0}"#, [1.0, 1.0]),
        (
            "simply",
            "xz",
            r#"{"a": 1.2, "b": -0.8, "c1": 0.6, "c2": -0.4}"#,
            [1.0, 1.0],
        ),
        ("pseudo", "xz", r#"{"phi": 1.0}"#, [1.0, -1.0]),
        ("pseudo", "yz", r#"{"phi": 1.0}"#, [-1.0, 1.0]),
    ] {
        let p = 2.0;
        let json = format!(
            r#"{{"signature": "{sig}", "subgroup": {sub},
                "curve": {{"plane": "{plane}", "kind": "parabola", "params": [{p}]}},
                "domain": {{"u": [0.2, 1.5], "t": [-1.0, 1.0]}}, "grid": [12, 12]}}"#
        );
        let (_d, out, o) = run_with(&json, &["generate"]);
        assert_eq!(code(&o), 0, "{sig} {plane}: {}", stderr(&o));
        let (verts, _) = read_obj(
            fs::read_to_string(out.join("surface.obj"))
                .unwrap()
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(verts.len(), 144);
        for v in verts {
            let q = (sign[0] * v[0] * v[0] + sign[1] * v[1] * v[1]) / (2.0 * p);
            assert!(
                (v[2] - q).abs() <= 1e-10 * v[2].abs().max(1.0),
                "{sig} {plane} {sub}: {v:?}"
            );
        }
    }
}

#[test]
fn isotropic_line_is_rejected_with_its_obstruction() {
    let json = r#"{
        "signature": "simply",
        "subgroup": {"phi": 1.0, "c": 1.0},
        "curve": {"plane": "xz", "kind": "line", "params": [1.0, 0.0, 0.0, 1.0]},
        "grid": [8, 8]
    }"#;
    let (_d, out, o) = run_with(json, &["generate"]);
    assert_eq!(code(&o), 3);
    let err = stderr(&o);
    assert!(
        err.contains("not admissible") && err.contains("isotropic line"),
        "{err}"
    );
    assert!(!out.join("surface.obj").exists());
}

#[test]
fn classify_prints_type_orbit_and_ruledness() {
    for (sub, want) in [
        (
            r#"{"phi": 1, "c": 1}"#,
            "II helicoidal; orbit: helix; ruled: no",
        ),
        (
            r#"{"a": 1, "c1": 1}"#,
            "III parabolic rotation; orbit: parabola; ruled: no",
        ),
        (r#"{"a": 1}"#, "VI translation; orbit: line; ruled: yes"),
        (r#"{"phi": 1}"#, "I rotation; orbit: circle; ruled: no"),
    ] {
        let json = format!(r#"{{"signature": "simply", "subgroup": {sub}}}"#);
        let (_d, out, o) = run_with(&json, &["classify"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(stdout(&o).trim(), want);
        let rep = read_json(&out.join("classify.json"));
        assert_eq!(rep["schema"], "isosurf/1");
        assert_eq!(rep["summary"], want);
    }
}

#[test]
fn config_errors_exit_2() {
    let o = isosurf(&["classify", "--config", "/nonexistent/job.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("/nonexistent/job.json"));

    let (_d, _, o) = run_with(
        r#"{"signature": "simply", "subgroup": {"phi": 1, "typo": 2}}"#,
        &["classify"],
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("typo"), "{}", stderr(&o));

    let (_d, _, o) = run_with(r#"{"signature": "simply"}"#, &["classify"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("subgroup"), "{}", stderr(&o));

    let (_d, _, o) = run_with(HELICOID, &["generate", "--grid", "1x4"]);
    assert_eq!(code(&o), 2);

    let bad_plane = r#"{"signature": "simply", "subgroup": {"phi": 1},
        "curve": {"plane": "yz", "kind": "line", "params": [1, 0, 0, 1]}}"#;
    let (_d, _, o) = run_with(bad_plane, &["generate"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));

    let (_d, _, o) = run_with(r#"{"domain": {"u": [1, 0], "t": [0, 1]}}"#, &["generate"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("domain"));
}

#[test]
fn solver_domain_errors_exit_3() {
    // 1 + 3 ∫K with K = -0.5 reaches zero inside [1, 3].
    let json = r#"{"signature": "simply", "subgroup": {"phi": 1, "c": 1},
        "solve": {"solver": "k_helicoidal_ni", "profile": {"kind": "constant", "params": [-0.5]},
                  "s_range": [1, 3], "constants": [4, 1]}}"#;
    let (_d, _, o) = run_with(json, &["solve"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("[1, 3]"));
}

#[test]
fn cmc_helicoidal_curve_matches_the_closed_form() {
    let (h0, z0, z1) = (0.5, 0.3, 0.7);
    let json = format!(
        r#"{{"signature": "simply",
            "solve": {{"solver": "h_helicoidal_i", "profile": {{"kind": "constant", "params": [{h0}]}},
                       "s_range": [1, 2], "constants": [{z0}, {z1}], "samples": 51}}}}"#
    );
    let (_d, out, o) = run_with(&json, &["solve"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = csv_rows(&out.join("curve.csv"));
    assert_eq!(header, ["s", "x", "y", "z"]);
    assert_eq!(rows.len(), 51);
    // Integrals start at s = 1, so the log and constant terms absorb the base point.
    let (c0, c1) = (z0 - h0 / 2.0, z1 - h0);
    for r in rows {
        let s = r[0];
        let want = c0 + c1 * s.ln() + h0 * s * s / 2.0;
        assert!(
            (r[1] - s).abs() < 1e-15 && (r[3] - want).abs() < 1e-9,
            "{r:?} vs {want}"
        );
    }
    let rep = read_json(&out.join("solve.json"));
    assert_eq!(rep["schema"], "isosurf/1");
    assert_eq!(rep["constants"]["h0"], z0);
    assert!(rep["roundtrip"]["max_error"].as_f64().unwrap() <= 1e-5);
    assert!(out.join("roundtrip.csv").exists());
}

#[test]
fn flat_helicoidal_curve_matches_the_arctan_closed_form() {
    let (c, phi, k1) = (1.0, 2.0, 1.0);
    let json = format!(
        r#"{{"signature": "simply", "subgroup": {{"phi": {phi}, "c": {c}}},
            "solve": {{"solver": "k_helicoidal_i", "profile": {{"kind": "constant", "params": [0]}},
                       "s_range": [1, 3], "constants": [0, {k1}], "plane": "xz"}}}}"#
    );
    let (_d, out, o) = run_with(&json, &["solve"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let q: f64 = c / phi;
    let closed = |s: f64| {
        let w = (k1 * s * s - q * q).sqrt();
        w + q * (q / w).atan()
    };
    let (_, rows) = csv_rows(&out.join("curve.csv"));
    let s0 = rows[0][0];
    for r in &rows {
        assert!((r[3] - (closed(r[0]) - closed(s0))).abs() < 1e-8, "{r:?}");
    }
}

#[test]
fn roundtrip_above_tolerance_exits_4() {
    let json = r#"{"signature": "pseudo",
        "solve": {"solver": "h_helicoidal_i", "profile": {"kind": "sin", "params": [0.4, 2.0]},
                  "s_range": [1, 2], "constants": [0.1, 0.2]}}"#;
    let (_d, out, o) = run_with(json, &["solve"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (_d2, _, o) = run_with(json, &["solve", "--tol", "1e-30"]);
    assert_eq!(code(&o), 4);
    assert!(read_json(&out.join("solve.json"))["roundtrip"]["passed"]
        .as_bool()
        .unwrap());
}

#[test]
fn curvature_command_reports_both_routes() {
    let (_d, out, o) = run_with(HELICOID, &["curvature", "--grid", "3x3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = read_json(&out.join("curvature.json"));
    assert_eq!(rep["schema"], "isosurf/1");
    let samples = rep["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 9);
    for s in samples {
        for key in [
            "u",
            "t",
            "K_numeric",
            "H_numeric",
            "K_closed",
            "H_closed",
            "det_g",
        ] {
            assert!(s[key].is_number(), "{key} in {s}");
        }
    }
    assert!(rep["max_rel_discrepancy"].as_f64().unwrap() < 1e-6);
}

#[test]
fn verify_passes_and_catches_an_injected_sign_flip() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v");
    let o = isosurf(&[
        "verify",
        "--suite",
        "differential",
        "--suite",
        "continuity",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let rep = read_json(&out.join("verify.json"));
    assert_eq!(rep["passed"], true);
    assert_eq!(rep["suites"].as_array().unwrap().len(), 2);

    let o = isosurf(&[
        "verify",
        "--suite",
        "differential",
        "--inject-sign-flip",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("FAIL differential"), "{}", stdout(&o));
    let rep = read_json(&out.join("verify.json"));
    assert_eq!(rep["failed"][0], "differential");

    let o = isosurf(&["verify", "--suite", "nonsense"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_default_run_passes() {
    let o = isosurf(&["verify"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(),
        9
    );
}
