//! Invariant surfaces `x(u, t) = psi_t(alpha(u))`.

use std::fmt;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::curve::{GeneratingCurve, Plane};
use crate::error::{IsoError, Result};
use crate::metric::{dot, IsoVector, Signature};
use crate::motion::{apply, classify, evaluate, evaluate_jet, MotionSubgroup, MotionType};

/// Position and partial derivatives of a parameterized surface.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SurfaceJet {
    pub x: IsoVector,
    pub xu: IsoVector,
    pub xt: IsoVector,
    pub xuu: IsoVector,
    pub xut: IsoVector,
    pub xtt: IsoVector,
}

/// Anything the curvature routines can differentiate.
pub trait ParamSurface {
    fn signature(&self) -> Signature;
    fn jet(&self, u: f64, t: f64) -> SurfaceJet;

    fn point(&self, u: f64, t: f64) -> IsoVector {
        self.jet(u, t).x
    }
}

/// Family tag: the subgroup type paired with the curve plane, e.g. `Z2`,
/// `Yh3`, `Wh6`. Index 8 marks a general subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    pub sig: Signature,
    pub plane: Plane,
    pub index: u8,
}

impl Family {
    pub fn motion_type(&self) -> Option<MotionType> {
        MotionType::ALL.get(self.index as usize - 1).copied()
    }

    pub fn is_general(&self) -> bool {
        self.index == 8
    }

    pub fn prefix(&self) -> &'static str {
        match (self.sig, self.plane) {
            (Signature::SimplyIsotropic, Plane::XY) => "Y",
            (Signature::SimplyIsotropic, _) => "Z",
            (Signature::PseudoIsotropic, Plane::XY) => "Yh",
            (Signature::PseudoIsotropic, Plane::XZ) => "Zh",
            (Signature::PseudoIsotropic, Plane::YZ) => "Wh",
        }
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.prefix(), self.index)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

#[derive(Clone, Debug)]
pub struct InvariantSurface {
    pub curve: GeneratingCurve,
    pub group: MotionSubgroup,
    pub family: Family,
}

impl InvariantSurface {
    pub fn motion_type(&self) -> Option<MotionType> {
        self.family.motion_type()
    }
}

impl ParamSurface for InvariantSurface {
    fn signature(&self) -> Signature {
        self.group.sig
    }

    fn jet(&self, u: f64, t: f64) -> SurfaceJet {
        let [m0, m1, m2] = evaluate_jet(&self.group, t);
        let [a0, a1, a2] = self.curve.jet(u);
        let point = |m: &Matrix4<f64>, p: IsoVector| -> IsoVector {
            let r = m * Vector4::new(p.x, p.y, p.z, 1.0);
            IsoVector::new(r[0], r[1], r[2])
        };
        let vector = |m: &Matrix4<f64>, v: IsoVector| -> IsoVector {
            let r = m * Vector4::new(v.x, v.y, v.z, 0.0);
            IsoVector::new(r[0], r[1], r[2])
        };
        SurfaceJet {
            x: point(&m0, a0),
            xu: vector(&m0, a1),
            xt: point(&m1, a0),
            xuu: vector(&m0, a2),
            xut: vector(&m1, a1),
            xtt: point(&m2, a0),
        }
    }

    fn point(&self, u: f64, t: f64) -> IsoVector {
        evaluate_surface(self, u, t)
    }
}

/// Sweeps `curve` by `group`. Groups outside the seven types produce a
/// general (index 8) family.
pub fn invariant_surface(
    curve: GeneratingCurve,
    group: MotionSubgroup,
) -> Result<InvariantSurface> {
    if !curve.plane.allowed_in(group.sig) {
        return Err(IsoError::IncompatiblePlane {
            plane: curve.plane.to_string(),
            signature: group.sig.to_string(),
        });
    }
    if !group.is_finite() {
        return Err(IsoError::InvalidInput(
            "subgroup parameters must be finite".into(),
        ));
    }
    let index = classify(&group).map(|t| t.index()).unwrap_or(8);
    let family = Family {
        sig: group.sig,
        plane: curve.plane,
        index,
    };
    Ok(InvariantSurface {
        curve,
        group,
        family,
    })
}

pub fn evaluate_surface(s: &InvariantSurface, u: f64, t: f64) -> IsoVector {
    apply(&evaluate(&s.group, t), s.curve.point(u))
}

/// Rectangle `[u0, u1] x [t0, t1]` in the parameter plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u: [f64; 2],
    pub t: [f64; 2],
}

impl Domain {
    pub fn new(u0: f64, u1: f64, t0: f64, t1: f64) -> Self {
        Self {
            u: [u0, u1],
            t: [t0, t1],
        }
    }

    pub fn is_valid(&self) -> bool {
        self.u.iter().chain(&self.t).all(|v| v.is_finite())
            && self.u[0] < self.u[1]
            && self.t[0] < self.t[1]
    }

    /// Grid point `(i, j)` of an `nu x nt` sampling, corners included.
    pub fn grid_point(&self, i: usize, j: usize, nu: usize, nt: usize) -> (f64, f64) {
        let lerp = |r: [f64; 2], k: usize, n: usize| {
            if n <= 1 {
                0.5 * (r[0] + r[1])
            } else {
                r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64
            }
        };
        (lerp(self.u, i, nu), lerp(self.t, j, nt))
    }

    pub fn scale(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.t)
            .fold(1.0f64, |m, v| m.max(v.abs()))
    }
}

pub const DEFAULT_GRID: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub det_g_min: f64,
    pub witness: (f64, f64),
    pub tolerance: f64,
    pub obstruction: Option<String>,
}

/// Induced metric coefficients `(g11, g12, g22)` from first partials.
pub fn metric_coefficients(sig: Signature, j: &SurfaceJet) -> (f64, f64, f64) {
    (
        dot(j.xu, j.xu, sig),
        dot(j.xu, j.xt, sig),
        dot(j.xt, j.xt, sig),
    )
}

pub fn admissibility(s: &InvariantSurface, domain: &Domain) -> AdmissibilityReport {
    admissibility_on_grid(s, domain, DEFAULT_GRID, DEFAULT_GRID)
}

/// Samples `det g` on an `nu x nt` grid. Zero is judged against
/// `1e-10 * scale^4`, with `scale` the largest tangent length seen.
pub fn admissibility_on_grid(
    s: &InvariantSurface,
    domain: &Domain,
    nu: usize,
    nt: usize,
) -> AdmissibilityReport {
    admissibility_with_tol(s, domain, nu, nt, 1e-10)
}

/// As [`admissibility_on_grid`] with the relative factor `rel_tol` in place
/// of `1e-10`.
pub fn admissibility_with_tol(
    s: &InvariantSurface,
    domain: &Domain,
    nu: usize,
    nt: usize,
    rel_tol: f64,
) -> AdmissibilityReport {
    let sig = s.group.sig;
    let mut det_min = f64::INFINITY;
    let mut witness = (domain.u[0], domain.t[0]);
    let mut scale = 1.0f64;
    for i in 0..nu {
        for j in 0..nt {
            let (u, t) = domain.grid_point(i, j, nu, nt);
            let jet = s.jet(u, t);
            let (g11, g12, g22) = metric_coefficients(sig, &jet);
            scale = scale.max(g11.abs().sqrt()).max(g22.abs().sqrt());
            let det = (g11 * g22 - g12 * g12).abs();
            if !(det >= det_min) {
                det_min = det;
                witness = (u, t);
            }
        }
    }
    let tolerance = rel_tol * scale.powi(4);
    let admissible = det_min.is_finite() && det_min > tolerance;
    let obstruction = if admissible {
        None
    } else {
        obstruction(s, domain, nu.max(8))
    };
    AdmissibilityReport {
        admissible,
        det_g_min: det_min,
        witness,
        tolerance,
        obstruction,
    }
}

/// Names the degenerate configuration behind a vanishing metric, when the
/// defining condition holds at every curve sample.
fn obstruction(s: &InvariantSurface, domain: &Domain, n: usize) -> Option<String> {
    let g = &s.group;
    let fam = s.family;
    let ty = fam.motion_type()?;
    if matches!(ty, MotionType::Shear | MotionType::TranslationIsotropic) {
        return Some("no top-view motion (a = b = 0)".into());
    }
    let us: Vec<f64> = (0..n)
        .map(|i| domain.u[0] + (domain.u[1] - domain.u[0]) * i as f64 / (n - 1).max(1) as f64)
        .collect();
    let jets: Vec<[IsoVector; 3]> = us.iter().map(|&u| s.curve.jet(u)).collect();
    let scale = jets
        .iter()
        .fold(1.0f64, |m, j| m.max(j[0].max_abs()).max(j[1].max_abs()));
    let tol = 1e-10 * scale * scale;
    let all = |f: &dyn Fn(&[IsoVector; 3]) -> f64| jets.iter().all(|j| f(j).abs() <= tol);
    let pseudo = g.sig.is_pseudo();
    let helicoidal = matches!(ty, MotionType::Rotation | MotionType::Helicoidal);
    match fam.plane {
        Plane::XY if helicoidal => {
            if pseudo && all(&|j| j[0].x * j[1].x - j[0].y * j[1].y) {
                Some("hyperbola centered at the origin".into())
            } else if !pseudo && all(&|j| j[0].x * j[1].x + j[0].y * j[1].y) {
                Some("circle centered at the origin".into())
            } else {
                None
            }
        }
        Plane::XY => {
            if all(&|j| g.b * j[1].x - g.a * j[1].y) {
                Some("line with slope b/a".into())
            } else {
                None
            }
        }
        Plane::XZ | Plane::YZ => {
            let f = |j: &[IsoVector; 3]| {
                if fam.plane == Plane::XZ {
                    (j[0].x, j[1].x)
                } else {
                    (j[0].y, j[1].y)
                }
            };
            if all(&|j| f(j).1) || (helicoidal && all(&|j| f(j).0)) {
                Some("isotropic line".into())
            } else if !helicoidal && fam.plane == Plane::XZ && g.b == 0.0 {
                Some("b = 0".into())
            } else if !helicoidal && fam.plane == Plane::YZ && g.a == 0.0 {
                Some("a = 0".into())
            } else {
                None
            }
        }
    }
}

/// True when every sampled orbit `t -> psi_t(q)` has vanishing second
/// derivative, i.e. the orbits are straight lines.
pub fn is_ruled(s: &InvariantSurface) -> bool {
    let us = s.curve.samples(9);
    let ts = [-1.0, 0.0, 1.0];
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for &u in &us {
        for &t in &ts {
            let j = s.jet(u, t);
            worst = worst.max(j.xtt.max_abs());
            scale = scale.max(j.x.max_abs());
        }
    }
    worst <= 1e-10 * scale
}

/// Quadratic form the chart pulls back: `dU^2 + dT^2`, `dU^2 - dT^2` or
/// `dU dT`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlatMetric {
    Euclidean,
    Lorentzian,
    Null,
}

impl FlatMetric {
    /// `q(dU, dT)` as a bilinear form evaluated on two tangent vectors.
    pub fn pair(self, a: [f64; 2], b: [f64; 2]) -> f64 {
        match self {
            FlatMetric::Euclidean => a[0] * b[0] + a[1] * b[1],
            FlatMetric::Lorentzian => a[0] * b[0] - a[1] * b[1],
            FlatMetric::Null => 0.5 * (a[0] * b[1] + a[1] * b[0]),
        }
    }
}

/// Coordinates `(U, T)` in which the first fundamental form is flat.
#[derive(Clone, Debug)]
pub struct NormalChart {
    surface: InvariantSurface,
    pub metric: FlatMetric,
    helicoidal: bool,
}

impl NormalChart {
    fn null_coords(&self) -> bool {
        self.metric == FlatMetric::Null
    }

    /// Exact chart: the top view of the surface, or its light-cone
    /// coordinates for pseudo helicoidal i-type surfaces.
    pub fn map(&self, u: f64, t: f64) -> (f64, f64) {
        let p = self.surface.point(u, t);
        if self.null_coords() {
            (p.x + p.y, p.x - p.y)
        } else {
            (p.x, p.y)
        }
    }

    /// Jacobian `[[U_u, U_t], [T_u, T_t]]`.
    pub fn jacobian(&self, u: f64, t: f64) -> [[f64; 2]; 2] {
        let j = self.surface.jet(u, t);
        if self.null_coords() {
            [
                [j.xu.x + j.xu.y, j.xt.x + j.xt.y],
                [j.xu.x - j.xu.y, j.xt.x - j.xt.y],
            ]
        } else {
            [[j.xu.x, j.xt.x], [j.xu.y, j.xt.y]]
        }
    }

    /// Pull-back `(g11, g12, g22)` of the flat form.
    pub fn pullback(&self, u: f64, t: f64) -> (f64, f64, f64) {
        let m = self.jacobian(u, t);
        let cu = [m[0][0], m[1][0]];
        let ct = [m[0][1], m[1][1]];
        (
            self.metric.pair(cu, cu),
            self.metric.pair(cu, ct),
            self.metric.pair(ct, ct),
        )
    }

    /// The first-order form of the chart, linear in `t`:
    /// helicoidal ni `(x - tφy, y + tφx)` (pseudo `(x + tφy, y + tφx)`),
    /// helicoidal i `(x, tφx)` (pseudo `(x + tφx, x - tφx)`),
    /// parabolic `(x + at, y + bt)` and `(x + at, bt)`.
    pub fn linearized(&self, u: f64, t: f64) -> (f64, f64) {
        let s = &self.surface;
        let g = &s.group;
        let a = s.curve.point(u);
        let pseudo = g.sig.is_pseudo();
        let tp = t * g.phi;
        if self.helicoidal {
            match s.curve.plane {
                Plane::XY if pseudo => (a.x + tp * a.y, a.y + tp * a.x),
                Plane::XY => (a.x - tp * a.y, a.y + tp * a.x),
                Plane::XZ if pseudo => (a.x + tp * a.x, a.x - tp * a.x),
                Plane::XZ => (a.x, tp * a.x),
                Plane::YZ => (a.y + tp * a.y, -(a.y - tp * a.y)),
            }
        } else {
            match s.curve.plane {
                Plane::XY => (a.x + g.a * t, a.y + g.b * t),
                Plane::XZ => (a.x + g.a * t, g.b * t),
                Plane::YZ => (g.a * t, a.y + g.b * t),
            }
        }
    }
}

pub fn normal_form_chart(s: &InvariantSurface) -> Result<NormalChart> {
    use MotionType::*;
    let ty = s.family.motion_type();
    let helicoidal = match ty {
        Some(Rotation) | Some(Helicoidal) => true,
        Some(ParabolicRotation) | Some(WarpedTranslation) | Some(TranslationNonIsotropic) => false,
        _ => return Err(IsoError::ChartUnavailable(s.family.name())),
    };
    let metric = match (s.group.sig, helicoidal && s.curve.plane.is_isotropic()) {
        (Signature::SimplyIsotropic, _) => FlatMetric::Euclidean,
        (Signature::PseudoIsotropic, true) => FlatMetric::Null,
        (Signature::PseudoIsotropic, false) => FlatMetric::Lorentzian,
    };
    Ok(NormalChart {
        surface: s.clone(),
        metric,
        helicoidal,
    })
}
