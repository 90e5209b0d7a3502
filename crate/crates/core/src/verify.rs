//! Self-check suites run by `isosurf verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::{
    brioschi, curvatures_closed_form, curvatures_numeric, fundamental_forms, GraphSurface,
    BRIOSCHI_STEP,
};
use crate::curve::{CurveFn, GeneratingCurve, Plane};
use crate::error::Result;
use crate::metric::Signature;
use crate::motion::{compose, evaluate, MotionSubgroup, MotionType};
use crate::prescribed::{
    solve_h_helicoidal_i, solve_h_parabolic_i, solve_k_helicoidal_i, solve_k_helicoidal_ni,
    solve_k_parabolic_i, CurvatureProfile, SolverOutput,
};
use crate::surface::{
    invariant_surface, is_ruled, normal_form_chart, InvariantSurface, ParamSurface,
};

const SIGS: [Signature; 2] = [Signature::SimplyIsotropic, Signature::PseudoIsotropic];

pub const SUITES: [&str; 9] = [
    "group_law",
    "determinant",
    "continuity",
    "differential",
    "flatness",
    "sphere",
    "roundtrip",
    "ruled",
    "h_independence",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Flips the sign of every closed-form K, to prove the differential
    /// suite can fail.
    pub inject_sign_flip: bool,
    /// Scales every tolerance.
    pub tol_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            inject_sign_flip: false,
            tol_scale: 1.0,
        }
    }
}

struct Tally {
    name: &'static str,
    tol: f64,
    max: f64,
    samples: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            tol,
            max: 0.0,
            samples: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, err: f64, what: impl FnOnce() -> String) {
        let err = if err.is_nan() { f64::INFINITY } else { err };
        self.max = self.max.max(err);
        self.check_with(err, self.tol, what);
    }

    /// A secondary check with its own bound; it does not feed `max_error`.
    fn check_with(&mut self, err: f64, tol: f64, what: impl FnOnce() -> String) {
        self.samples += 1;
        if !(err <= tol) {
            self.push(format!("{} (error {err:.3e} > {tol:.1e})", what()));
        }
    }

    fn push(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }

    fn fail(&mut self, what: String) {
        self.samples += 1;
        self.max = f64::INFINITY;
        self.push(what);
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name.into(),
            passed: self.failures.is_empty(),
            max_error: self.max,
            tolerance: self.tol,
            samples: self.samples,
            failures: self.failures,
        }
    }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteResult> {
    SUITES
        .iter()
        .map(|n| run_suite(n, opts).expect("known suite"))
        .collect()
}

/// `None` for an unknown suite name.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Option<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let s = opts.tol_scale;
    Some(match name {
        "group_law" => group_law(&mut rng, 1e-9 * s),
        "determinant" => determinant(&mut rng, 1e-10 * s),
        "continuity" => continuity(&mut rng, 1e-4 * s),
        "differential" => differential(opts.inject_sign_flip, 1e-6 * s),
        "flatness" => flatness(1e-5 * s),
        "sphere" => sphere(1e-10 * s),
        "roundtrip" => roundtrip(1e-5 * s),
        "ruled" => ruled(&mut rng),
        "h_independence" => h_independence(1e-9 * s),
        _ => return None,
    })
}

pub fn random_subgroup(rng: &mut impl Rng, sig: Signature) -> MotionSubgroup {
    let mut r = || rng.random_range(-2.0..2.0);
    MotionSubgroup::new(sig, r(), r(), r(), r(), r(), r())
}

fn group_law(rng: &mut ChaCha8Rng, tol: f64) -> SuiteResult {
    let mut t = Tally::new("group_law", tol);
    for sig in SIGS {
        for _ in 0..100 {
            let g = random_subgroup(rng, sig);
            let (s, u) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let lhs = evaluate(&g, s + u);
            let rhs = compose(&evaluate(&g, s), &evaluate(&g, u));
            t.check(lhs.max_abs_diff(&rhs), || format!("{g:?} at s={s}, t={u}"));
        }
    }
    t.finish()
}

fn determinant(rng: &mut ChaCha8Rng, tol: f64) -> SuiteResult {
    let mut t = Tally::new("determinant", tol);
    for sig in SIGS {
        for _ in 0..100 {
            let g = random_subgroup(rng, sig);
            let s = rng.random_range(-3.0..3.0);
            t.check((evaluate(&g, s).determinant() - 1.0).abs(), || {
                format!("{g:?} at t={s}")
            });
        }
    }
    t.finish()
}

fn continuity(rng: &mut ChaCha8Rng, tol: f64) -> SuiteResult {
    let mut t = Tally::new("continuity", tol);
    let switch_tol = tol * 1e-5;
    let thr = crate::motion::SERIES_THRESHOLD;
    for sig in SIGS {
        for _ in 0..20 {
            let g = random_subgroup(rng, sig);
            let lim = MotionSubgroup { phi: 0.0, ..g };
            let small = MotionSubgroup { phi: 1e-6, ..g };
            let below = MotionSubgroup {
                phi: thr * (1.0 - 1e-12),
                ..g
            };
            let above = MotionSubgroup {
                phi: thr * (1.0 + 1e-12),
                ..g
            };
            for i in 0..=40 {
                let s = -2.0 + 0.1 * i as f64;
                t.check(evaluate(&small, s).max_abs_diff(&evaluate(&lim, s)), || {
                    format!("phi=1e-6, t={s}")
                });
                let jump = evaluate(&below, s).max_abs_diff(&evaluate(&above, s));
                t.check_with(jump, switch_tol, || format!("switchover at t={s}"));
            }
        }
    }
    t.finish()
}

/// One representative surface per family with a closed-form curvature,
/// plus the parameter window it is admissible on.
pub fn reference_surfaces() -> Vec<InvariantSurface> {
    use Signature::*;
    let xy = || {
        GeneratingCurve::new(
            Plane::XY,
            CurveFn::linear(1.5, 0.5),
            CurveFn::Sum(vec![
                CurveFn::constant(0.2),
                CurveFn::Sin {
                    amp: 0.3,
                    freq: 1.0,
                    phase: 0.0,
                },
            ]),
        )
        .with_domain(0.2, 1.0)
    };
    let iso = |plane| {
        GeneratingCurve::new(
            plane,
            CurveFn::linear(1.0, 0.5),
            CurveFn::Sum(vec![
                CurveFn::Poly(vec![0.1, 0.0, 0.3]),
                CurveFn::Sin {
                    amp: 0.2,
                    freq: 2.0,
                    phase: 0.5,
                },
            ]),
        )
        .with_domain(0.2, 1.0)
    };
    let mut out = Vec::new();
    for sig in [SimplyIsotropic, PseudoIsotropic] {
        let planes: &[Plane] = if sig.is_pseudo() {
            &[Plane::XY, Plane::XZ, Plane::YZ]
        } else {
            &[Plane::XY, Plane::XZ]
        };
        for &plane in planes {
            let curve = if plane == Plane::XY { xy() } else { iso(plane) };
            let groups = [
                MotionSubgroup::helicoidal(sig, 0.8, 0.0),
                MotionSubgroup::helicoidal(sig, 0.8, 0.6),
                MotionSubgroup::limit(sig, 1.0, 2.0, 0.4, 0.5, 0.3),
                MotionSubgroup::limit(sig, 1.0, 2.0, 0.0, 0.6, -0.3),
                MotionSubgroup::limit(sig, 1.0, 2.0, 0.0, 0.0, 0.0),
            ];
            for g in groups {
                out.push(invariant_surface(curve.clone(), g).expect("reference plane is allowed"));
            }
        }
    }
    out
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn differential(flip: bool, tol: f64) -> SuiteResult {
    let mut t = Tally::new("differential", tol);
    for s in reference_surfaces() {
        let [lo, hi] = s.curve.domain;
        for i in 0..50 {
            let u = lo + (hi - lo) * i as f64 / 49.0;
            let cf = match curvatures_closed_form(&s, u) {
                Ok(c) => c,
                Err(e) => {
                    t.fail(format!("{}: {e}", s.family));
                    continue;
                }
            };
            let kcf = if flip { -cf.k } else { cf.k };
            let mut first = None;
            for j in 0..5 {
                let tt = -1.0 + 0.5 * j as f64;
                match curvatures_numeric(&s, u, tt) {
                    Ok(n) => {
                        t.check(rel(kcf, n.k).max(rel(cf.h, n.h)), || {
                            format!("{} at u={u}, t={tt}", s.family)
                        });
                        let (k0, h0) = *first.get_or_insert((n.k, n.h));
                        t.check_with(rel(n.k, k0).max(rel(n.h, h0)), tol * 1e-2, || {
                            format!("{} varies in t at u={u}", s.family)
                        });
                    }
                    Err(e) => t.fail(format!("{} at u={u}, t={tt}: {e}", s.family)),
                }
            }
        }
    }
    t.finish()
}

fn flatness(tol: f64) -> SuiteResult {
    let mut t = Tally::new("flatness", tol);
    let mut surfaces = reference_surfaces();
    // A general subgroup outside the seven types.
    let curve = GeneratingCurve::line(Plane::XZ, [1.0, 0.0], [1.0, 0.5]).with_domain(0.2, 1.0);
    surfaces.push(
        invariant_surface(
            curve,
            MotionSubgroup::new(Signature::SimplyIsotropic, 0.7, 0.3, -0.2, 0.4, 0.1, 0.5),
        )
        .unwrap(),
    );
    for s in &surfaces {
        let [lo, hi] = s.curve.domain;
        let chart = normal_form_chart(s).ok();
        for i in 0..6 {
            let u = lo + (hi - lo) * (0.1 + 0.16 * i as f64);
            for tt in [-0.7, 0.0, 0.6] {
                if fundamental_forms(s, u, tt).is_err() {
                    continue;
                }
                t.check(brioschi(s, u, tt, BRIOSCHI_STEP).abs(), || {
                    format!("{} Brioschi at u={u}, t={tt}", s.family)
                });
                if let Some(c) = &chart {
                    let f = fundamental_forms(s, u, tt).unwrap();
                    let (g11, g12, g22) = c.pullback(u, tt);
                    let err = (g11 - f.g11)
                        .abs()
                        .max((g12 - f.g12).abs())
                        .max((g22 - f.g22).abs());
                    t.check_with(err, tol * 1e-3, || {
                        format!("{} chart pullback at u={u}, t={tt}", s.family)
                    });
                }
            }
        }
    }
    t.finish()
}

/// Height `z(x, y, p)` of a quadric.
pub type Quadric = fn(f64, f64, f64) -> f64;

/// Isotropic spheres `z = (x^2 ± y^2)/(2p)` swept as invariant surfaces.
pub fn sphere_examples(p: f64) -> Vec<(InvariantSurface, Quadric)> {
    use Signature::*;
    let (c1, c2) = (0.6, -0.4);
    let xz = GeneratingCurve::parabola(Plane::XZ, p);
    let yz = GeneratingCurve::parabola(Plane::YZ, p);
    let simply: fn(f64, f64, f64) -> f64 = |x, y, p| (x * x + y * y) / (2.0 * p);
    let pseudo: fn(f64, f64, f64) -> f64 = |x, y, p| (x * x - y * y) / (2.0 * p);
    let timelike: fn(f64, f64, f64) -> f64 = |x, y, p| (y * y - x * x) / (2.0 * p);
    let mk = |c: &GeneratingCurve, g| invariant_surface(c.clone(), g).unwrap();
    vec![
        (
            mk(&xz, MotionSubgroup::helicoidal(SimplyIsotropic, 1.0, 0.0)),
            simply,
        ),
        (
            mk(
                &xz,
                MotionSubgroup::limit(SimplyIsotropic, p * c1, p * c2, 0.0, c1, c2),
            ),
            simply,
        ),
        (
            mk(&xz, MotionSubgroup::helicoidal(PseudoIsotropic, 1.0, 0.0)),
            pseudo,
        ),
        (
            mk(
                &xz,
                MotionSubgroup::limit(PseudoIsotropic, p * c1, -p * c2, 0.0, c1, c2),
            ),
            pseudo,
        ),
        (
            mk(&yz, MotionSubgroup::helicoidal(PseudoIsotropic, 1.0, 0.0)),
            timelike,
        ),
        (
            mk(
                &yz,
                MotionSubgroup::limit(PseudoIsotropic, -p * c1, p * c2, 0.0, c1, c2),
            ),
            timelike,
        ),
    ]
}

fn sphere(tol: f64) -> SuiteResult {
    let mut t = Tally::new("sphere", tol);
    for p in [0.5, 2.0] {
        for (s, quadric) in sphere_examples(p) {
            for i in 0..=10 {
                let u = -1.0 + 0.2 * i as f64;
                for j in 0..=10 {
                    let tt = -1.0 + 0.2 * j as f64;
                    let x = s.point(u, tt);
                    let err = (x.z - quadric(x.x, x.y, p)).abs() / x.max_abs().max(1.0);
                    t.check(err, || format!("{} p={p} at u={u}, t={tt}", s.family));
                }
            }
        }
    }
    for sig in SIGS {
        let g = GraphSurface::sphere(sig, 2.0);
        for (u, v) in [(0.0, 0.0), (0.3, -0.8), (1.2, 0.4)] {
            match curvatures_numeric(&g, u, v) {
                Ok(c) => t.check_with((c.k - 0.25).abs(), tol * 1e2, || {
                    format!("sphere graph K at ({u}, {v})")
                }),
                Err(e) => t.fail(format!("sphere graph: {e}")),
            }
        }
    }
    t.finish()
}

/// Every solvable cell with each constant profile in `{-0.5, 0, 0.5}`.
pub fn roundtrip_cases(value: f64) -> Vec<Result<SolverOutput>> {
    use Signature::*;
    let kh = |lo, hi| CurvatureProfile::constant(value, lo, hi).without_fast_path();
    vec![
        solve_k_helicoidal_ni(&kh(1.0, 1.5), 1.0, 1.0, 4.0, 1.0, SimplyIsotropic, 1.0),
        solve_k_helicoidal_ni(&kh(1.0, 1.5), 1.0, 1.0, 0.25, 1.0, PseudoIsotropic, 1.0),
        solve_k_helicoidal_ni(&kh(1.0, 1.5), 1.0, 1.0, 4.0, 1.0, PseudoIsotropic, -1.0),
        solve_k_helicoidal_i(
            &kh(1.0, 1.5),
            0.5,
            1.0,
            0.0,
            2.0,
            SimplyIsotropic,
            Plane::XZ,
        ),
        solve_k_helicoidal_i(
            &kh(1.0, 1.5),
            0.5,
            1.0,
            0.0,
            2.0,
            PseudoIsotropic,
            Plane::XZ,
        ),
        solve_k_helicoidal_i(
            &kh(1.0, 1.5),
            0.5,
            1.0,
            0.0,
            2.0,
            PseudoIsotropic,
            Plane::YZ,
        ),
        solve_h_helicoidal_i(&kh(1.0, 2.0), 0.3, 0.7, SimplyIsotropic, 1.0),
        solve_h_helicoidal_i(&kh(1.0, 2.0), 0.3, 0.7, PseudoIsotropic, 1.0),
        solve_h_helicoidal_i(&kh(1.0, 2.0), 0.3, 0.7, PseudoIsotropic, -1.0),
        solve_k_parabolic_i(
            &kh(-1.0, 1.0),
            1.0,
            2.0,
            0.5,
            1.5,
            0.0,
            0.0,
            SimplyIsotropic,
            Plane::XZ,
        ),
        solve_k_parabolic_i(
            &kh(-1.0, 1.0),
            1.0,
            2.0,
            0.5,
            1.5,
            0.0,
            0.0,
            PseudoIsotropic,
            Plane::XZ,
        ),
        solve_k_parabolic_i(
            &kh(-1.0, 1.0),
            1.0,
            2.0,
            0.5,
            1.5,
            0.0,
            0.0,
            PseudoIsotropic,
            Plane::YZ,
        ),
        solve_h_parabolic_i(
            &kh(-1.0, 1.0),
            2.0,
            1.0,
            0.5,
            -0.3,
            0.0,
            0.0,
            SimplyIsotropic,
            Plane::XZ,
        ),
        solve_h_parabolic_i(
            &kh(-1.0, 1.0),
            2.0,
            1.0,
            0.5,
            -0.3,
            0.0,
            0.0,
            PseudoIsotropic,
            Plane::XZ,
        ),
        solve_h_parabolic_i(
            &kh(-1.0, 1.0),
            2.0,
            1.0,
            0.5,
            -0.3,
            0.0,
            0.0,
            PseudoIsotropic,
            Plane::YZ,
        ),
    ]
}

/// Largest curvature error over interior samples of the validity interval.
pub fn roundtrip_error(out: &SolverOutput, target: impl Fn(f64) -> f64, n: usize) -> Result<f64> {
    let surf = out.surface()?;
    let [lo, hi] = out.validity;
    let pad = 0.01 * (hi - lo);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let s = lo + pad + (hi - lo - 2.0 * pad) * i as f64 / (n - 1) as f64;
        for t in [-0.5, 0.0, 0.5] {
            let c = curvatures_numeric(&surf, s, t)?;
            let got = if out.quantity == "K" { c.k } else { c.h };
            let e = (got - target(s)).abs();
            worst = worst.max(if e.is_nan() { f64::INFINITY } else { e });
        }
    }
    Ok(worst)
}

fn roundtrip(tol: f64) -> SuiteResult {
    let mut t = Tally::new("roundtrip", tol);
    for v in [-0.5, 0.0, 0.5] {
        for out in roundtrip_cases(v) {
            match out.and_then(|o| roundtrip_error(&o, |_| v, 21).map(|e| (o.cell, e))) {
                Ok((cell, e)) => t.check(e, || format!("{cell} with constant {v}")),
                Err(e) => t.fail(format!("constant {v}: {e}")),
            }
        }
    }
    t.finish()
}

fn random_curve(rng: &mut ChaCha8Rng, plane: Plane) -> GeneratingCurve {
    let mut r = |lo: f64, hi: f64| rng.random_range(lo..hi);
    let f = CurveFn::linear(r(0.5, 2.0), r(0.3, 1.0));
    let g = CurveFn::Poly(vec![r(-1.0, 1.0), r(-1.0, 1.0), r(-0.5, 0.5)]);
    GeneratingCurve::new(plane, f, g).with_domain(0.0, 1.0)
}

/// A random subgroup of the given type with every parameter that the type
/// allows bounded away from zero.
pub fn random_of_type(rng: &mut impl Rng, sig: Signature, ty: MotionType) -> MotionSubgroup {
    let mut nz = || {
        let v: f64 = rng.random_range(0.3..2.0);
        if rng.random_bool(0.5) {
            v
        } else {
            -v
        }
    };
    let (phi, a, b, c, c1, c2) = (nz(), nz(), nz(), nz(), nz(), nz());
    match ty {
        MotionType::Rotation => MotionSubgroup::helicoidal(sig, phi, 0.0),
        MotionType::Helicoidal => MotionSubgroup::helicoidal(sig, phi, c),
        MotionType::ParabolicRotation => {
            // Keep a c1 + b c2 well away from zero.
            let c2 = if (a * c1 + b * c2).abs() < 0.1 {
                -c2
            } else {
                c2
            };
            MotionSubgroup::limit(sig, a, b, c, c1, c2)
        }
        // c1 = b, c2 = -a makes a c1 + b c2 vanish exactly.
        MotionType::WarpedTranslation => MotionSubgroup::limit(sig, a, b, 0.0, b, -a),
        MotionType::Shear => MotionSubgroup::limit(sig, 0.0, 0.0, 0.0, c1, c2),
        MotionType::TranslationNonIsotropic => MotionSubgroup::limit(sig, a, b, 0.0, 0.0, 0.0),
        MotionType::TranslationIsotropic => MotionSubgroup::limit(sig, 0.0, 0.0, c, 0.0, 0.0),
    }
}

fn ruled(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("ruled", 0.0);
    for ty in MotionType::ALL {
        for k in 0..50 {
            let sig = SIGS[k % 2];
            let plane = [Plane::XY, Plane::XZ, Plane::YZ][k % 3];
            let plane = if plane.allowed_in(sig) {
                plane
            } else {
                Plane::XZ
            };
            let g = random_of_type(rng, sig, ty);
            let s = invariant_surface(random_curve(rng, plane), g).unwrap();
            let ok = is_ruled(&s) == ty.is_ruled() && s.motion_type() == Some(ty);
            t.check(if ok { 0.0 } else { 1.0 }, || {
                format!("{} ({ty}) draw {k}", s.family)
            });
        }
    }
    t.finish()
}

fn h_independence(tol: f64) -> SuiteResult {
    let mut t = Tally::new("h_independence", tol);
    let curves = [
        GeneratingCurve::poly_graph(Plane::XZ, vec![0.0, 0.3, 0.5, -0.1]).with_domain(0.5, 2.0),
        GeneratingCurve::new(
            Plane::XZ,
            CurveFn::linear(1.0, 0.7),
            CurveFn::Sin {
                amp: 1.0,
                freq: 1.3,
                phase: 0.2,
            },
        )
        .with_domain(0.0, 1.5),
        GeneratingCurve::new(
            Plane::YZ,
            CurveFn::linear(1.0, 0.7),
            CurveFn::Cos {
                amp: 0.5,
                freq: 1.0,
                phase: 0.0,
            },
        )
        .with_domain(0.0, 1.5),
    ];
    for curve in curves {
        for sig in SIGS {
            if !curve.plane.allowed_in(sig) {
                continue;
            }
            let s0 = invariant_surface(curve.clone(), MotionSubgroup::helicoidal(sig, 0.9, 0.0))
                .unwrap();
            let s2 = invariant_surface(curve.clone(), MotionSubgroup::helicoidal(sig, 0.9, 2.0))
                .unwrap();
            for u in curve.samples(11) {
                for tt in [-1.0, 0.0, 0.8] {
                    match (
                        curvatures_numeric(&s0, u, tt),
                        curvatures_numeric(&s2, u, tt),
                    ) {
                        (Ok(a), Ok(b)) => t.check((a.h - b.h).abs(), || {
                            format!("{} at u={u}, t={tt}", s0.family)
                        }),
                        _ => t.fail(format!("{} not admissible at u={u}", s0.family)),
                    }
                }
            }
        }
    }
    t.finish()
}
