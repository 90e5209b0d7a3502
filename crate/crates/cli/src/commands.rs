use std::io::Write;

use isosurf_core::prescribed::{
    solve_h_helicoidal_i, solve_h_parabolic_i, solve_k_helicoidal_i, solve_k_helicoidal_ni,
    solve_k_parabolic_i,
};
use isosurf_core::surface::{ParamSurface, DEFAULT_GRID};
use isosurf_core::verify::{self, VerifyOptions, SUITES};
use isosurf_core::{
    admissibility_with_tol, curvatures_closed_form, curvatures_numeric, evaluate_surface,
    metric::dot, CurvatureProfile, IsoError, Plane, SolverOutput,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{JobConfig, SolverKind, DEFAULT_MESH_GRID};
use crate::output::{self, display, finite, report, MeshOutput, OutDir, VertexAttr};
use crate::CliError;

pub const DEFAULT_ADMISSIBILITY_TOL: f64 = 1e-10;
pub const DEFAULT_ROUNDTRIP_TOL: f64 = 1e-5;
pub const DEFAULT_CURVATURE_TOL: f64 = 1e-6;
const CURVATURE_GRID: [usize; 2] = [9, 9];
const ROUNDTRIP_SAMPLES: usize = 21;

fn say(out: &mut dyn Write, msg: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", msg.as_ref()).map_err(|e| CliError::io("<stdout>", e))
}

/// Samples the surface, writes `surface.obj`, `surface.csv` and
/// `generate.json`.
pub fn generate(cfg: &JobConfig, out: &mut dyn Write) -> Result<MeshOutput, CliError> {
    cfg.validate()?;
    let surf = cfg.surface()?;
    let domain = cfg.domain_for(&surf.curve);
    if !domain.is_valid() {
        return Err(CliError::Config(format!(
            "domain: empty rectangle u={:?} t={:?}",
            domain.u, domain.t
        )));
    }
    let [nu, nt] = cfg.grid_or(DEFAULT_MESH_GRID);
    let rel_tol = cfg.tol.unwrap_or(DEFAULT_ADMISSIBILITY_TOL);
    let adm = admissibility_with_tol(
        &surf,
        &domain,
        nu.max(DEFAULT_GRID),
        nt.max(DEFAULT_GRID),
        rel_tol,
    );
    if !adm.admissible {
        return Err(CliError::Domain(format!(
            "not admissible: det g reaches {:.3e} (tolerance {:.3e}) at (u={}, t={}); obstruction: {}",
            adm.det_g_min,
            adm.tolerance,
            adm.witness.0,
            adm.witness.1,
            adm.obstruction.as_deref().unwrap_or("unidentified degeneracy")
        )));
    }

    let sig = surf.group.sig;
    let mut mesh = MeshOutput {
        faces: MeshOutput::grid_faces(nu, nt),
        ..Default::default()
    };
    for i in 0..nu {
        for j in 0..nt {
            let (u, t) = domain.grid_point(i, j, nu, nt);
            let p = evaluate_surface(&surf, u, t);
            let jet = surf.jet(u, t);
            let (g11, g12, g22) = (
                dot(jet.xu, jet.xu, sig),
                dot(jet.xu, jet.xt, sig),
                dot(jet.xt, jet.xt, sig),
            );
            let (k, h) = curvatures_numeric(&surf, u, t)
                .map(|c| (c.k, c.h))
                .unwrap_or((f64::NAN, f64::NAN));
            mesh.vertices.push([p.x, p.y, p.z]);
            mesh.attrs.push(VertexAttr {
                u,
                t,
                k,
                h,
                det_g: g11 * g22 - g12 * g12,
            });
        }
    }

    let dir = OutDir::create(cfg.out_dir())?;
    let comment = format!("isosurf {} surface, {}x{} grid", surf.family, nu, nt);
    let obj = dir.with_file("surface.obj", |w| {
        Ok(output::write_obj(w, &mesh, &comment)?)
    })?;
    let csv = dir.with_file("surface.csv", |w| Ok(output::write_vertex_csv(w, &mesh)?))?;
    let range = |f: fn(&VertexAttr) -> f64| {
        let vals = mesh.attrs.iter().map(f).filter(|v| v.is_finite());
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        json!([finite(lo), finite(hi)])
    };
    let nonfinite = mesh
        .attrs
        .iter()
        .filter(|a| !(a.k.is_finite() && a.h.is_finite()))
        .count();
    let rep = report(
        "generate",
        json!({
            "family": surf.family,
            "motion_type": surf.motion_type(),
            "subgroup": surf.group,
            "domain": domain,
            "grid": [nu, nt],
            "vertices": mesh.vertices.len(),
            "faces": mesh.faces.len(),
            "admissibility": {
                "det_g_min": adm.det_g_min,
                "tolerance": adm.tolerance,
                "witness": [adm.witness.0, adm.witness.1],
            },
            "K_range": range(|a| a.k),
            "H_range": range(|a| a.h),
            "nonfinite_curvature_samples": nonfinite,
            "files": { "obj": display(&obj), "csv": display(&csv) },
        }),
    );
    dir.json("generate.json", &rep)?;
    say(
        out,
        format!(
            "{}: {} vertices, {} quads written to {}",
            surf.family,
            mesh.vertices.len(),
            mesh.faces.len(),
            display(&dir.path(""))
        ),
    )?;
    Ok(mesh)
}

/// One-line summary: type, orbit shape, ruledness.
pub fn classify_line(g: &isosurf_core::MotionSubgroup) -> Result<String, CliError> {
    let ty = g.classify()?;
    Ok(format!(
        "{ty}; orbit: {}; ruled: {}",
        ty.orbit(),
        if ty.is_ruled() { "yes" } else { "no" }
    ))
}

pub fn classify(cfg: &JobConfig, out: &mut dyn Write) -> Result<String, CliError> {
    cfg.validate()?;
    let g = cfg.subgroup()?;
    let line = classify_line(&g)?;
    say(out, &line)?;
    if cfg.out.is_some() {
        let ty = g.classify()?;
        let rep = report(
            "classify",
            json!({
                "subgroup": g,
                "type": ty,
                "name": ty.name(),
                "orbit": ty.orbit(),
                "ruled": ty.is_ruled(),
                "summary": line,
            }),
        );
        OutDir::create(cfg.out_dir())?.json("classify.json", &rep)?;
    }
    Ok(line)
}

#[derive(Serialize)]
struct CurveRow {
    s: f64,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Serialize)]
struct RoundTripRow {
    s: f64,
    t: f64,
    target: f64,
    value: f64,
    error: f64,
}

fn run_solver(cfg: &JobConfig) -> Result<(SolverOutput, CurvatureProfile), CliError> {
    let sc = cfg
        .solve
        .as_ref()
        .ok_or_else(|| CliError::Config("solve: missing".into()))?;
    let sig = cfg.signature()?;
    let p = cfg.subgroup.unwrap_or_default();
    let [lo, hi] = sc.s_range;
    let prof = CurvatureProfile::from_spec(&sc.profile, lo, hi)
        .map_err(|e| CliError::Config(format!("solve.profile: {e}")))?;
    let [k0, k1] = sc.constants;
    let plane = sc.plane.unwrap_or(Plane::XZ);
    let res = match sc.solver {
        SolverKind::KHelicoidalNi => solve_k_helicoidal_ni(&prof, p.c, p.phi, k0, k1, sig, sc.eps),
        SolverKind::KHelicoidalI => solve_k_helicoidal_i(&prof, p.c, p.phi, k0, k1, sig, plane),
        SolverKind::HHelicoidalI => solve_h_helicoidal_i(&prof, k0, k1, sig, sc.eps),
        SolverKind::KParabolicI => {
            solve_k_parabolic_i(&prof, p.a, p.b, p.c1, p.c2, k0, k1, sig, plane)
        }
        SolverKind::HParabolicI => {
            solve_h_parabolic_i(&prof, p.a, p.b, p.c1, p.c2, k0, k1, sig, plane)
        }
    };
    match res {
        Ok(o) => Ok((o, prof)),
        Err(e @ (IsoError::InvalidInput(_) | IsoError::IncompatiblePlane { .. })) => {
            Err(CliError::Config(format!("solve: {e}")))
        }
        Err(e) => Err(CliError::Domain(format!(
            "{e} (profile domain [{lo}, {hi}])"
        ))),
    }
}

/// Runs the configured solver; writes `curve.csv`, `solve.json` and, unless
/// disabled, `roundtrip.csv`. A round-trip error above the tolerance is a
/// verification failure after the files are written.
pub fn solve(cfg: &JobConfig, out: &mut dyn Write) -> Result<SolverOutput, CliError> {
    cfg.validate()?;
    let (sol, prof) = run_solver(cfg)?;
    let sc = cfg.solve.as_ref().expect("checked by run_solver");
    let dir = OutDir::create(cfg.out_dir())?;
    let [lo, hi] = sol.validity;
    let n = sc.samples.max(2);
    let rows: Vec<CurveRow> = (0..n)
        .map(|i| {
            let s = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let p = sol.curve.point(s);
            CurveRow {
                s,
                x: p.x,
                y: p.y,
                z: p.z,
            }
        })
        .collect();
    let curve_csv = dir.with_file("curve.csv", |w| Ok(output::write_rows(w, &rows)?))?;

    let tol = cfg.tol.unwrap_or(DEFAULT_ROUNDTRIP_TOL);
    let mut rt = Value::Null;
    let mut rt_max = None;
    if sc.roundtrip {
        let surf = sol.surface()?;
        let pad = 0.01 * (hi - lo);
        let mut table = Vec::new();
        for i in 0..ROUNDTRIP_SAMPLES {
            let s = lo + pad + (hi - lo - 2.0 * pad) * i as f64 / (ROUNDTRIP_SAMPLES - 1) as f64;
            for t in [-0.5, 0.0, 0.5] {
                let c = curvatures_numeric(&surf, s, t)?;
                let value = if sol.quantity == "K" { c.k } else { c.h };
                let target = prof.value(s);
                table.push(RoundTripRow {
                    s,
                    t,
                    target,
                    value,
                    error: (value - target).abs(),
                });
            }
        }
        let worst = table
            .iter()
            .map(|r| {
                if r.error.is_nan() {
                    f64::INFINITY
                } else {
                    r.error
                }
            })
            .fold(0.0, f64::max);
        let path = dir.with_file("roundtrip.csv", |w| Ok(output::write_rows(w, &table)?))?;
        rt = json!({
            "max_error": finite(worst),
            "tolerance": tol,
            "passed": worst <= tol,
            "samples": table.len(),
            "table": display(&path),
        });
        rt_max = Some(worst);
    }

    let names = sol.constant_names();
    let rep = report(
        "solve",
        json!({
            "cell": sol.cell,
            "quantity": sol.quantity,
            "constants": { names[0]: sol.constants[0], names[1]: sol.constants[1] },
            "validity": sol.validity,
            "eps": sol.eps,
            "plane": sol.curve.plane,
            "subgroup": sol.group,
            "profile": sc.profile,
            "curve": display(&curve_csv),
            "roundtrip": rt,
        }),
    );
    dir.json("solve.json", &rep)?;
    say(
        out,
        format!("{}: validity [{lo}, {hi}], {n} curve samples", sol.cell),
    )?;
    if let Some(worst) = rt_max {
        say(
            out,
            format!(
                "round trip max |{}-target| = {worst:.3e} (tol {tol:.1e})",
                sol.quantity
            ),
        )?;
        if !(worst <= tol) {
            return Err(CliError::Verification(format!(
                "round-trip error {worst:.3e} exceeds {tol:.1e}"
            )));
        }
    }
    Ok(sol)
}

/// Numeric and closed-form curvature on a grid, written to
/// `curvature.json`.
pub fn curvature(cfg: &JobConfig, out: &mut dyn Write) -> Result<Value, CliError> {
    cfg.validate()?;
    let surf = cfg.surface()?;
    let domain = cfg.domain_for(&surf.curve);
    let [nu, nt] = cfg.grid_or(CURVATURE_GRID);
    let tol = cfg.tol.unwrap_or(DEFAULT_CURVATURE_TOL);
    let sig = surf.group.sig;
    let mut records = Vec::new();
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    let mut closed_available = true;
    for i in 0..nu {
        for j in 0..nt {
            let (u, t) = domain.grid_point(i, j, nu, nt);
            let num = curvatures_numeric(&surf, u, t)?;
            let closed = match curvatures_closed_form(&surf, u) {
                Ok(c) => Some(c),
                Err(IsoError::NoClosedForm(_)) => {
                    closed_available = false;
                    None
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(c) = closed {
                let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
                let e = rel(c.k, num.k).max(rel(c.h, num.h));
                worst = worst.max(if e.is_nan() { f64::INFINITY } else { e });
                compared += 1;
            }
            let jet = surf.jet(u, t);
            let (g11, g12, g22) = (
                dot(jet.xu, jet.xu, sig),
                dot(jet.xu, jet.xt, sig),
                dot(jet.xt, jet.xt, sig),
            );
            records.push(json!({
                "u": u,
                "t": t,
                "K_numeric": finite(num.k),
                "H_numeric": finite(num.h),
                "K_closed": closed.map_or(Value::Null, |c| finite(c.k)),
                "H_closed": closed.map_or(Value::Null, |c| finite(c.h)),
                "det_g": finite(g11 * g22 - g12 * g12),
            }));
        }
    }
    let passed = worst <= tol;
    let rep = report(
        "curvature",
        json!({
            "family": surf.family,
            "domain": domain,
            "grid": [nu, nt],
            "closed_form": closed_available,
            "max_rel_discrepancy": if compared > 0 { finite(worst) } else { Value::Null },
            "tolerance": tol,
            "passed": passed,
            "samples": records,
        }),
    );
    let path = OutDir::create(cfg.out_dir())?.json("curvature.json", &rep)?;
    if compared > 0 {
        say(
            out,
            format!(
                "{}: {compared} samples, max relative discrepancy {worst:.3e} (tol {tol:.1e})",
                surf.family
            ),
        )?;
    } else {
        say(
            out,
            format!(
                "{}: {} samples, no closed form for this family",
                surf.family,
                records.len()
            ),
        )?;
    }
    say(out, format!("wrote {}", display(&path)))?;
    if !passed {
        return Err(CliError::Verification(format!(
            "closed form and numeric curvature differ by {worst:.3e}"
        )));
    }
    Ok(rep)
}

/// Runs the selected suites (all by default). Suite failures are listed and
/// turn into a verification error after the summary is written.
pub fn verify(cfg: &JobConfig, out: &mut dyn Write) -> Result<Value, CliError> {
    cfg.validate()?;
    let vc = cfg.verify.clone().unwrap_or_default();
    let mut opts = VerifyOptions {
        inject_sign_flip: vc.inject_sign_flip,
        ..Default::default()
    };
    if let Some(seed) = vc.seed {
        opts.seed = seed;
    }
    if let Some(t) = cfg.tol {
        opts.tol_scale = t;
    }
    let names: Vec<String> = if vc.suites.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        vc.suites
    };
    for n in &names {
        if !SUITES.contains(&n.as_str()) {
            return Err(CliError::Config(format!(
                "verify.suites: unknown suite '{n}' (known: {})",
                SUITES.join(", ")
            )));
        }
    }
    let mut results = Vec::new();
    for n in &names {
        let r = verify::run_suite(n, &opts).expect("checked above");
        say(
            out,
            format!(
                "{} {:<15} max error {:.3e} (tol {:.1e}, {} checks)",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.max_error,
                r.tolerance,
                r.samples
            ),
        )?;
        for f in &r.failures {
            say(out, format!("    {f}"))?;
        }
        results.push(r);
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .collect();
    let suites: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "passed": r.passed,
                "max_error": finite(r.max_error),
                "tolerance": r.tolerance,
                "samples": r.samples,
                "failures": r.failures,
            })
        })
        .collect();
    let rep = report(
        "verify",
        json!({
            "seed": opts.seed,
            "inject_sign_flip": opts.inject_sign_flip,
            "tol_scale": opts.tol_scale,
            "passed": failed.is_empty(),
            "failed": failed,
            "suites": suites,
        }),
    );
    if cfg.out.is_some() {
        OutDir::create(cfg.out_dir())?.json("verify.json", &rep)?;
    }
    if !failed.is_empty() {
        return Err(CliError::Verification(format!(
            "failed suites: {}",
            failed.join(", ")
        )));
    }
    Ok(rep)
}
