//! Reconstruction of generating curves from a prescribed Gaussian or mean
//! curvature, by iterated quadrature.
//!
//! All running integrals start at `s0 = s_min`. Constant profiles take a
//! fast path where the inner integrals are evaluated analytically.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{CurveFn, GeneratingCurve, Plane};
use crate::error::{IsoError, Result};
use crate::metric::Signature;
use crate::motion::MotionSubgroup;
use crate::quad::{CumulativeIntegral, DEFAULT_TOL};
use crate::surface::{invariant_surface, InvariantSurface};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const KNOTS: usize = 128;
const VALIDITY_GRID: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Constant,
    Poly,
    Sin,
}

/// `{"kind": "constant" | "poly" | "sin", "params": [...]}`.
///
/// `constant [v]`, `poly [c0, c1, ...]` (ascending powers),
/// `sin [amp, freq, phase]` for `amp sin(freq s + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    #[serde(default)]
    pub params: Vec<f64>,
}

/// A prescribed curvature `s -> f(s)` on `[s_min, s_max]`.
#[derive(Clone)]
pub struct CurvatureProfile {
    f: RealFn,
    pub s_min: f64,
    pub s_max: f64,
    constant: Option<f64>,
}

impl fmt::Debug for CurvatureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurvatureProfile")
            .field("s_min", &self.s_min)
            .field("s_max", &self.s_max)
            .field("constant", &self.constant)
            .finish()
    }
}

impl CurvatureProfile {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, s_min: f64, s_max: f64) -> Self {
        Self {
            f: Arc::new(f),
            s_min,
            s_max,
            constant: None,
        }
    }

    pub fn constant(v: f64, s_min: f64, s_max: f64) -> Self {
        Self {
            f: Arc::new(move |_| v),
            s_min,
            s_max,
            constant: Some(v),
        }
    }

    pub fn from_spec(spec: &ProfileSpec, s_min: f64, s_max: f64) -> Result<Self> {
        let p = spec.params.clone();
        if p.iter().any(|v| !v.is_finite()) {
            return Err(IsoError::InvalidInput(
                "profile params must be finite".into(),
            ));
        }
        let out = match spec.kind {
            ProfileKind::Constant => {
                let v = *p.first().ok_or_else(|| {
                    IsoError::InvalidInput("constant profile needs [value]".into())
                })?;
                Self::constant(v, s_min, s_max)
            }
            ProfileKind::Poly => {
                if p.is_empty() {
                    return Err(IsoError::InvalidInput(
                        "poly profile needs coefficients".into(),
                    ));
                }
                Self::new(
                    move |s| p.iter().rev().fold(0.0, |acc, c| acc * s + c),
                    s_min,
                    s_max,
                )
            }
            ProfileKind::Sin => {
                if p.len() < 2 {
                    return Err(IsoError::InvalidInput(
                        "sin profile needs [amp, freq, phase?]".into(),
                    ));
                }
                let (amp, freq, phase) = (p[0], p[1], p.get(2).copied().unwrap_or(0.0));
                Self::new(move |s| amp * (freq * s + phase).sin(), s_min, s_max)
            }
        };
        out.validate()?;
        Ok(out)
    }

    /// Forces the quadrature route even for constant profiles.
    pub fn without_fast_path(mut self) -> Self {
        self.constant = None;
        self
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    pub fn value(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_min.is_finite() && self.s_max.is_finite() && self.s_min < self.s_max) {
            return Err(IsoError::InvalidInput(format!(
                "profile domain [{}, {}] is empty",
                self.s_min, self.s_max
            )));
        }
        for s in grid(self.s_min, self.s_max, 200) {
            if !self.value(s).is_finite() {
                return Err(IsoError::InvalidInput(format!(
                    "profile is not finite at s = {s}"
                )));
            }
        }
        Ok(())
    }

    fn func(&self) -> RealFn {
        self.f.clone()
    }
}

/// Result of a solve: the arc-length curve, the subgroup that sweeps it
/// into the prescribed surface, and the bookkeeping of the family.
#[derive(Clone, Debug)]
pub struct SolverOutput {
    pub curve: GeneratingCurve,
    pub group: MotionSubgroup,
    /// `(k0, k1)` or `(h0, h1)`.
    pub constants: [f64; 2],
    pub validity: [f64; 2],
    /// Causal sign of the curve, `±1`.
    pub eps: f64,
    /// `"K"` or `"H"`.
    pub quantity: &'static str,
    pub cell: String,
}

impl SolverOutput {
    pub fn surface(&self) -> Result<InvariantSurface> {
        invariant_surface(self.curve.clone(), self.group)
    }

    /// Names of the two integration constants.
    pub fn constant_names(&self) -> [&'static str; 2] {
        if self.quantity == "K" {
            ["k0", "k1"]
        } else {
            ["h0", "h1"]
        }
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// `s -> ∫_{lo}^s g`.
fn running(g: RealFn, lo: f64, hi: f64) -> Result<RealFn> {
    let c = CumulativeIntegral::new(move |s| g(s), lo, hi, KNOTS, DEFAULT_TOL)?;
    Ok(Arc::new(move |s| c.eval(s).unwrap_or(f64::NAN)))
}

/// Longest run of grid points where `ok` holds.
fn longest_run(lo: f64, hi: f64, ok: impl Fn(f64) -> bool) -> Option<[f64; 2]> {
    let pts: Vec<f64> = grid(lo, hi, VALIDITY_GRID).collect();
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, &s) in pts.iter().enumerate() {
        if ok(s) {
            let st = *start.get_or_insert(i);
            if best.is_none_or(|(a, b)| i - st > b - a) {
                best = Some((st, i));
            }
        } else {
            start = None;
        }
    }
    best.filter(|(a, b)| b > a).map(|(a, b)| [pts[a], pts[b]])
}

fn check_nonzero(name: &str, v: f64) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        return Err(IsoError::InvalidInput(format!(
            "{name} must be nonzero and finite"
        )));
    }
    Ok(())
}

fn graph_curve(
    plane: Plane,
    z: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    lo: f64,
    hi: f64,
) -> GeneratingCurve {
    GeneratingCurve::new(plane, CurveFn::linear(0.0, 1.0), CurveFn::jet_fn(z)).with_domain(lo, hi)
}

fn plane_eps(plane: Plane) -> f64 {
    plane.causal_sign()
}

/// Gaussian curvature of a helicoidal surface with a non-isotropic axis
/// plane curve `(x, y, 0)`: the curve is returned in polar form with
/// `x^2 ± y^2 = k0 + 2 ∫ (k1 + κ ∫ K)^{-1/3}`.
///
/// `eps` is the causal sign `x'^2 - y'^2` of the pseudo curve; it is
/// ignored in the simply isotropic case.
#[allow(clippy::too_many_arguments)]
pub fn solve_k_helicoidal_ni(
    k: &CurvatureProfile,
    c: f64,
    phi: f64,
    k0: f64,
    k1: f64,
    sig: Signature,
    eps: f64,
) -> Result<SolverOutput> {
    k.validate()?;
    check_nonzero("c", c)?;
    check_nonzero("phi", phi)?;
    let pseudo = sig.is_pseudo();
    let eps = if pseudo { eps.signum() } else { 1.0 };
    if eps == 0.0 {
        return Err(IsoError::InvalidInput("eps must be +1 or -1".into()));
    }
    let (lo, hi) = (k.s_min, k.s_max);
    let kappa = if pseudo {
        -3.0 * eps * phi * phi / (c * c)
    } else {
        3.0 * phi * phi / (c * c)
    };

    let int_k: RealFn = match k.constant_value() {
        Some(v) => Arc::new(move |s| v * (s - lo)),
        None => running(k.func(), lo, hi)?,
    };
    let base = {
        let int_k = int_k.clone();
        move |s: f64| k1 + kappa * int_k(s)
    };
    let b0 = base(lo);
    for s in grid(lo, hi, VALIDITY_GRID) {
        let b = base(s);
        if !(b * b0 > 0.0) {
            return Err(IsoError::DomainError(format!(
                "cube-root base k1 + κ∫K vanishes near s = {s}"
            )));
        }
    }
    let rho: RealFn = {
        let base = base.clone();
        Arc::new(move |s| 1.0 / base(s).cbrt())
    };
    let int_rho: RealFn = match k.constant_value() {
        // ∫ B^{-1/3} for B linear in s.
        Some(v) if v != 0.0 => {
            let slope = kappa * v;
            Arc::new(move |s| 1.5 / slope * (base(s).cbrt().powi(2) - b0.cbrt().powi(2)))
        }
        Some(_) => {
            let r0 = 1.0 / b0.cbrt();
            Arc::new(move |s| r0 * (s - lo))
        }
        None => running(rho.clone(), lo, hi)?,
    };
    let big_r: RealFn = Arc::new(move |s| k0 + 2.0 * int_rho(s));

    let radicand: RealFn = {
        let (big_r, rho) = (big_r.clone(), rho.clone());
        Arc::new(move |s| {
            let rp2 = rho(s).powi(2) / big_r(s);
            if pseudo {
                rp2 - eps
            } else {
                1.0 - rp2
            }
        })
    };
    let validity = {
        let (big_r, radicand) = (big_r.clone(), radicand.clone());
        longest_run(lo, hi, |s| big_r(s) > 0.0 && radicand(s) >= 0.0)
            .ok_or(IsoError::EmptyValidity)?
    };
    let omega: RealFn = {
        let (big_r, radicand) = (big_r.clone(), radicand.clone());
        Arc::new(move |s| radicand(s).max(0.0).sqrt() / big_r(s).sqrt())
    };
    let theta = running(omega, validity[0], validity[1])?;

    let kf = k.func();
    let polar = Arc::new(move |s: f64| -> [[f64; 3]; 2] {
        let rr = big_r(s);
        let r = rr.sqrt();
        let p = rho(s);
        let rp = p / r;
        let pp = -kappa * kf(s) * p.powi(4) / 3.0;
        let rpp = pp / r - p * p / (r * r * r);
        let q = radicand(s).max(0.0);
        let sq = q.sqrt();
        let qp = if pseudo {
            2.0 * rp * rpp
        } else {
            -2.0 * rp * rpp
        };
        let w = sq / r;
        let wp = if sq > 0.0 { qp / (2.0 * sq * r) } else { 0.0 } - sq * rp / (r * r);
        let th = theta(s);
        let (cs, sn) = if pseudo {
            (th.cosh(), th.sinh())
        } else {
            (th.cos(), th.sin())
        };
        // d/dθ of (cs, sn) is (-sn, cs) for trig and (sn, cs) for hyperbolic.
        let dcs = if pseudo { sn } else { -sn };
        let ddcs = if pseudo { cs } else { -cs };
        let dsn = cs;
        let ddsn = if pseudo { sn } else { -sn };
        let comp = |f: f64, df: f64, ddf: f64| {
            [
                r * f,
                rp * f + r * w * df,
                rpp * f + 2.0 * rp * w * df + r * wp * df + r * w * w * ddf,
            ]
        };
        [comp(cs, dcs, ddcs), comp(sn, dsn, ddsn)]
    });
    let px = polar.clone();
    let curve = GeneratingCurve::new(
        Plane::XY,
        CurveFn::jet_fn(move |s| px(s)[0]),
        CurveFn::jet_fn(move |s| polar(s)[1]),
    )
    .with_domain(validity[0], validity[1]);
    Ok(SolverOutput {
        curve,
        group: MotionSubgroup::helicoidal(sig, phi, c),
        constants: [k0, k1],
        validity,
        eps,
        quantity: "K",
        cell: format!("K helicoidal ni {}", sig.short_name()),
    })
}

/// Gaussian curvature of a helicoidal surface with a curve in an isotropic
/// plane: `z' = (k1 ∓ c²/(φ² s²) + 2 ∫ w K)^{1/2}`, `+` branch.
#[allow(clippy::too_many_arguments)]
pub fn solve_k_helicoidal_i(
    k: &CurvatureProfile,
    c: f64,
    phi: f64,
    k0: f64,
    k1: f64,
    sig: Signature,
    plane: Plane,
) -> Result<SolverOutput> {
    k.validate()?;
    check_nonzero("phi", phi)?;
    check_isotropic_plane(plane, sig)?;
    let (lo, hi) = (k.s_min, k.s_max);
    if lo <= 0.0 {
        return Err(IsoError::DomainError(format!(
            "s_min = {lo} must be positive"
        )));
    }
    let q2 = (c / phi).powi(2);
    let sgn = if sig.is_pseudo() { 1.0 } else { -1.0 };
    let int_wk: RealFn = match k.constant_value() {
        Some(v) => Arc::new(move |s| 0.5 * v * (s * s - lo * lo)),
        None => {
            let f = k.func();
            running(Arc::new(move |w| w * f(w)), lo, hi)?
        }
    };
    let rad: RealFn = Arc::new(move |s| k1 + sgn * q2 / (s * s) + 2.0 * int_wk(s));
    let validity = {
        let rad = rad.clone();
        longest_run(lo, hi, |s| rad(s) >= 0.0)
    }
    .ok_or_else(|| {
        IsoError::DomainError("radicand of z'^2 is negative on the whole interval".into())
    })?;
    let zp: RealFn = {
        let rad = rad.clone();
        Arc::new(move |s| rad(s).max(0.0).sqrt())
    };
    let int_zp = running(zp.clone(), validity[0], validity[1])?;
    let kf = k.func();
    let z = move |s: f64| {
        let d = zp(s);
        let drad = -2.0 * sgn * q2 / (s * s * s) + 2.0 * s * kf(s);
        [
            k0 + int_zp(s),
            d,
            if d > 0.0 { drad / (2.0 * d) } else { 0.0 },
        ]
    };
    Ok(SolverOutput {
        curve: graph_curve(plane, z, validity[0], validity[1]),
        group: MotionSubgroup::helicoidal(sig, phi, c),
        constants: [k0, k1],
        validity,
        eps: plane_eps(plane),
        quantity: "K",
        cell: format!("K helicoidal i {} {}", sig.short_name(), plane),
    })
}

/// Mean curvature of a helicoidal surface with a curve in an isotropic
/// plane: `z = h0 + h1 ln s + ε ∫ (2/v) ∫ w H`.
///
/// For pseudo-isotropic space `eps = +1` puts the curve in the xz-plane and
/// `eps = -1` in the yz-plane.
pub fn solve_h_helicoidal_i(
    h: &CurvatureProfile,
    h0: f64,
    h1: f64,
    sig: Signature,
    eps: f64,
) -> Result<SolverOutput> {
    h.validate()?;
    let (lo, hi) = (h.s_min, h.s_max);
    if lo <= 0.0 {
        return Err(IsoError::DomainError(format!(
            "s_min = {lo} must be positive"
        )));
    }
    let eps = if sig.is_pseudo() { eps.signum() } else { 1.0 };
    if eps == 0.0 {
        return Err(IsoError::InvalidInput("eps must be +1 or -1".into()));
    }
    let plane = if eps < 0.0 { Plane::YZ } else { Plane::XZ };
    let (inner, outer): (RealFn, RealFn) = match h.constant_value() {
        Some(v) => (
            Arc::new(move |s| 0.5 * v * (s * s - lo * lo)),
            Arc::new(move |s| v * (0.5 * (s * s - lo * lo) - lo * lo * (s / lo).ln())),
        ),
        None => {
            let f = h.func();
            let inner = running(Arc::new(move |w| w * f(w)), lo, hi)?;
            let i2 = inner.clone();
            let outer = running(Arc::new(move |v| 2.0 / v * i2(v)), lo, hi)?;
            (inner, outer)
        }
    };
    let hf = h.func();
    let z = move |s: f64| {
        let i = inner(s);
        [
            h0 + h1 * s.ln() + eps * outer(s),
            h1 / s + eps * 2.0 * i / s,
            -h1 / (s * s) + eps * (2.0 * hf(s) - 2.0 * i / (s * s)),
        ]
    };
    Ok(SolverOutput {
        curve: graph_curve(plane, z, lo, hi),
        group: MotionSubgroup::helicoidal(sig, 1.0, 0.0),
        constants: [h0, h1],
        validity: [lo, hi],
        eps,
        quantity: "H",
        cell: format!("H helicoidal i {} {}", sig.short_name(), plane),
    })
}

fn check_isotropic_plane(plane: Plane, sig: Signature) -> Result<()> {
    if !plane.is_isotropic() || !plane.allowed_in(sig) {
        return Err(IsoError::IncompatiblePlane {
            plane: plane.to_string(),
            signature: sig.to_string(),
        });
    }
    Ok(())
}

/// `(B, C)`: the translation and shear coefficients seen by the plane.
fn plane_coeffs(plane: Plane, a: f64, b: f64, c1: f64, c2: f64) -> (f64, f64) {
    if plane == Plane::YZ {
        (a, c2)
    } else {
        (b, c1)
    }
}

/// `(∫K, ∫∫K)` from `s_min`, analytic for constant profiles.
fn single_and_double(p: &CurvatureProfile) -> Result<(RealFn, RealFn)> {
    let lo = p.s_min;
    Ok(match p.constant_value() {
        Some(v) => (
            Arc::new(move |s| v * (s - lo)),
            Arc::new(move |s| 0.5 * v * (s - lo).powi(2)),
        ),
        None => {
            let single = running(p.func(), lo, p.s_max)?;
            let double = running(single.clone(), lo, p.s_max)?;
            (single, double)
        }
    })
}

/// Gaussian curvature of a parabolic revolution surface:
/// `z = k0 + k1 s + C² s²/(2 D) ± B²/D ∫∫ K` with `D = a c1 + b c2`.
#[allow(clippy::too_many_arguments)]
pub fn solve_k_parabolic_i(
    k: &CurvatureProfile,
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
    k0: f64,
    k1: f64,
    sig: Signature,
    plane: Plane,
) -> Result<SolverOutput> {
    k.validate()?;
    check_isotropic_plane(plane, sig)?;
    let d = a * c1 + b * c2;
    if d == 0.0 {
        return Err(IsoError::DegenerateParameters(
            "a c1 + b c2 = 0: warped translation, K is constant".into(),
        ));
    }
    let (bb, cc) = plane_coeffs(plane, a, b, c1, c2);
    if bb == 0.0 {
        return Err(IsoError::DegenerateParameters(format!(
            "{} = 0: the surface is not admissible",
            if plane == Plane::YZ { "a" } else { "b" }
        )));
    }
    let sgn = if sig.is_pseudo() { -1.0 } else { 1.0 };
    let (single, double) = single_and_double(k)?;
    let kf = k.func();
    let (quad2, lin) = (cc * cc / d, sgn * bb * bb / d);
    let z = move |s: f64| {
        [
            k0 + k1 * s + 0.5 * quad2 * s * s + lin * double(s),
            k1 + quad2 * s + lin * single(s),
            quad2 + lin * kf(s),
        ]
    };
    Ok(SolverOutput {
        curve: graph_curve(plane, z, k.s_min, k.s_max),
        group: MotionSubgroup::limit(sig, a, b, 0.0, c1, c2),
        constants: [k0, k1],
        validity: [k.s_min, k.s_max],
        eps: plane_eps(plane),
        quantity: "K",
        cell: format!("K parabolic i {} {}", sig.short_name(), plane),
    })
}

/// Mean curvature of a parabolic revolution surface:
/// `z = h0 + h1 s + (a c1 - b c2) s²/(2Δ) ± 2B²/Δ ∫∫ H` with
/// `Δ = a² ± b²`.
#[allow(clippy::too_many_arguments)]
pub fn solve_h_parabolic_i(
    h: &CurvatureProfile,
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
    h0: f64,
    h1: f64,
    sig: Signature,
    plane: Plane,
) -> Result<SolverOutput> {
    h.validate()?;
    check_isotropic_plane(plane, sig)?;
    let pseudo = sig.is_pseudo();
    let delta = if pseudo { a * a - b * b } else { a * a + b * b };
    if delta == 0.0 {
        return Err(IsoError::DegenerateParameters(if pseudo {
            "a^2 - b^2 = 0: lightlike translation direction".into()
        } else {
            "a = b = 0: no translation part".into()
        }));
    }
    let (bb, _) = plane_coeffs(plane, a, b, c1, c2);
    if bb == 0.0 {
        return Err(IsoError::DegenerateParameters(format!(
            "{} = 0: the surface is not admissible",
            if plane == Plane::YZ { "a" } else { "b" }
        )));
    }
    let sgn = if pseudo { -1.0 } else { 1.0 };
    let (single, double) = single_and_double(h)?;
    let hf = h.func();
    let (quad2, lin) = ((a * c1 - b * c2) / delta, sgn * 2.0 * bb * bb / delta);
    let z = move |s: f64| {
        [
            h0 + h1 * s + 0.5 * quad2 * s * s + lin * double(s),
            h1 + quad2 * s + lin * single(s),
            quad2 + lin * hf(s),
        ]
    };
    Ok(SolverOutput {
        curve: graph_curve(plane, z, h.s_min, h.s_max),
        group: MotionSubgroup::limit(sig, a, b, 0.0, c1, c2),
        constants: [h0, h1],
        validity: [h.s_min, h.s_max],
        eps: plane_eps(plane),
        quantity: "H",
        cell: format!("H parabolic i {} {}", sig.short_name(), plane),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::curvatures_numeric;
    use crate::metric::dot;

    const S: Signature = Signature::SimplyIsotropic;
    const P: Signature = Signature::PseudoIsotropic;

    fn z_at(out: &SolverOutput, s: f64) -> f64 {
        out.curve.point(s).z
    }

    fn inner_points(v: [f64; 2], n: usize) -> Vec<f64> {
        let pad = 0.02 * (v[1] - v[0]);
        grid(v[0] + pad, v[1] - pad, n).collect()
    }

    fn assert_roundtrip(out: &SolverOutput, target: impl Fn(f64) -> f64, tol: f64) {
        let surf = out.surface().unwrap();
        for s in inner_points(out.validity, 15) {
            for t in [-0.5, 0.3] {
                let c = curvatures_numeric(&surf, s, t).unwrap();
                let got = if out.quantity == "K" { c.k } else { c.h };
                assert!(
                    (got - target(s)).abs() <= tol,
                    "{} at s={s}: {got} vs {}",
                    out.cell,
                    target(s)
                );
            }
        }
    }

    #[test]
    fn profile_specs() {
        let p = CurvatureProfile::from_spec(
            &serde_json::from_str(r#"{"kind":"poly","params":[1,2,3]}"#).unwrap(),
            0.0,
            1.0,
        )
        .unwrap();
        assert_eq!(p.value(2.0), 17.0);
        assert!(p.constant_value().is_none());
        let c = CurvatureProfile::from_spec(
            &ProfileSpec {
                kind: ProfileKind::Constant,
                params: vec![0.5],
            },
            0.0,
            1.0,
        )
        .unwrap();
        assert_eq!(c.constant_value(), Some(0.5));
        assert!(c.without_fast_path().constant_value().is_none());
        assert!(CurvatureProfile::from_spec(
            &ProfileSpec {
                kind: ProfileKind::Sin,
                params: vec![1.0]
            },
            0.0,
            1.0
        )
        .is_err());
        assert!(CurvatureProfile::constant(1.0, 1.0, 1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn longest_run_picks_the_widest_block() {
        let v = longest_run(0.0, 1.0, |s| !(0.2..0.3).contains(&s)).unwrap();
        assert!(v[0] >= 0.3 && v[1] == 1.0);
        assert!(longest_run(0.0, 1.0, |_| false).is_none());
    }

    #[test]
    fn ni_flat_radius_is_linear() {
        for (sig, k0, k1) in [(S, 4.0, 8.0), (P, 0.1, 1.0)] {
            let k = CurvatureProfile::constant(0.0, 1.0, 2.0);
            let out = solve_k_helicoidal_ni(&k, 1.0, 1.0, k0, k1, sig, 1.0).unwrap();
            for s in inner_points(out.validity, 7) {
                let p = out.curve.point(s);
                let r2 = p.x * p.x + sig.sigma() * p.y * p.y;
                let want = k0 + 2.0 * k1.powf(-1.0 / 3.0) * (s - 1.0);
                assert!((r2 - want).abs() < 1e-10, "{sig}: {r2} vs {want}");
            }
        }
    }

    #[test]
    fn ni_arc_length_and_roundtrip() {
        let cases = [
            (S, 1.0, CurvatureProfile::constant(-0.5, 1.0, 1.5)),
            (S, 1.0, CurvatureProfile::constant(0.5, 1.0, 1.5)),
            (S, 1.0, CurvatureProfile::new(|s| 0.1 * s.sin(), 1.0, 1.5)),
            (P, 1.0, CurvatureProfile::constant(0.5, 1.0, 1.5)),
            (P, -1.0, CurvatureProfile::constant(-0.5, 1.0, 1.5)),
        ];
        for (sig, eps, k) in cases {
            let (k0, k1) = if sig.is_pseudo() && eps > 0.0 {
                (0.25, 1.0)
            } else {
                (4.0, 1.0)
            };
            let out = solve_k_helicoidal_ni(&k, 1.0, 1.0, k0, k1, sig, eps).unwrap();
            for s in inner_points(out.validity, 9) {
                let d = out.curve.jet(s)[1];
                assert!((dot(d, d, sig) - out.eps).abs() < 1e-8, "{}", out.cell);
            }
            let kk = k.clone();
            assert_roundtrip(&out, move |s| kk.value(s), 1e-5);
        }
    }

    #[test]
    fn ni_fast_path_matches_quadrature() {
        let k = CurvatureProfile::constant(0.5, 1.0, 1.5);
        let fast = solve_k_helicoidal_ni(&k, 1.0, 1.0, 4.0, 1.0, S, 1.0).unwrap();
        let slow =
            solve_k_helicoidal_ni(&k.clone().without_fast_path(), 1.0, 1.0, 4.0, 1.0, S, 1.0)
                .unwrap();
        for s in inner_points(fast.validity, 9) {
            assert!((fast.curve.point(s) - slow.curve.point(s)).max_abs() < 1e-9);
        }
    }

    #[test]
    fn ni_domain_errors() {
        // Base 1 + 3 ∫K reaches zero at s = 1 + 2/3.
        let k = CurvatureProfile::constant(-0.5, 1.0, 3.0);
        assert!(matches!(
            solve_k_helicoidal_ni(&k, 1.0, 1.0, 4.0, 1.0, S, 1.0),
            Err(IsoError::DomainError(_))
        ));
        let k = CurvatureProfile::constant(0.0, 1.0, 2.0);
        assert!(matches!(
            solve_k_helicoidal_ni(&k, 1.0, 1.0, -4.0, 1.0, S, 1.0),
            Err(IsoError::EmptyValidity)
        ));
    }

    fn flat_simply(s: f64, q: f64, k1: f64) -> f64 {
        let w = (k1 * s * s - q * q).sqrt();
        w + q * (q / w).atan()
    }

    fn flat_pseudo(s: f64, q: f64, k1: f64) -> f64 {
        let w = (k1 * s * s + q * q).sqrt();
        w - q * ((q + w) / s).ln()
    }

    #[test]
    fn i_flat_helicoidal_closed_forms() {
        let (c, phi, k1) = (1.0, 2.0, 1.0);
        let q = c / phi;
        let k = CurvatureProfile::constant(0.0, 1.0, 3.0);
        let out = solve_k_helicoidal_i(&k, c, phi, 0.0, k1, S, Plane::XZ).unwrap();
        let v0 = out.validity[0];
        for s in grid(v0, 3.0, 11) {
            let want = flat_simply(s, q, k1) - flat_simply(v0, q, k1);
            assert!((z_at(&out, s) - want).abs() < 1e-8);
        }
        for plane in [Plane::XZ, Plane::YZ] {
            let out = solve_k_helicoidal_i(&k, c, phi, 0.0, k1, P, plane).unwrap();
            for s in grid(1.0, 3.0, 11) {
                let want = flat_pseudo(s, q, k1) - flat_pseudo(1.0, q, k1);
                assert!((z_at(&out, s) - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn i_constant_k_revolution() {
        for k0v in [0.5, -0.5] {
            let k = CurvatureProfile::constant(k0v, 0.5, 1.0);
            let k1 = 1.0;
            let out = solve_k_helicoidal_i(&k, 0.0, 1.0, 0.0, k1, S, Plane::XZ).unwrap();
            let z0 = k1 - k0v * 0.25;
            let f = |s: f64| {
                let root = (z0 + k0v * s * s).sqrt();
                let tail = if k0v > 0.0 {
                    (k0v.sqrt() * s + root).ln() / k0v.sqrt()
                } else {
                    ((-k0v / z0).sqrt() * s).asin() / (-k0v).sqrt()
                };
                0.5 * s * root + 0.5 * z0 * tail
            };
            for s in grid(0.5, 1.0, 9) {
                assert!((z_at(&out, s) - (f(s) - f(0.5))).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn i_k_roundtrip_and_errors() {
        for (sig, plane) in [(S, Plane::XZ), (P, Plane::XZ), (P, Plane::YZ)] {
            for k in [
                CurvatureProfile::constant(-0.5, 1.0, 1.5),
                CurvatureProfile::constant(0.5, 1.0, 1.5),
                CurvatureProfile::new(|s| 0.1 * s.sin(), 1.0, 1.5),
            ] {
                let out = solve_k_helicoidal_i(&k, 0.5, 1.0, 0.0, 2.0, sig, plane).unwrap();
                let kk = k.clone();
                assert_roundtrip(&out, move |s| kk.value(s), 1e-5);
            }
        }
        let k = CurvatureProfile::constant(0.0, 1.0, 2.0);
        assert!(matches!(
            solve_k_helicoidal_i(&k, 1.0, 1.0, 0.0, -5.0, S, Plane::XZ),
            Err(IsoError::DomainError(_))
        ));
        assert!(solve_k_helicoidal_i(&k, 1.0, 1.0, 0.0, 1.0, S, Plane::YZ).is_err());
        let k = CurvatureProfile::constant(0.0, 0.0, 2.0);
        assert!(solve_k_helicoidal_i(&k, 1.0, 1.0, 0.0, 1.0, S, Plane::XZ).is_err());
    }

    #[test]
    fn i_cmc_logarithmoid() {
        for (sig, eps) in [(S, 1.0), (P, 1.0), (P, -1.0)] {
            for h0v in [0.0, 0.5, -0.5] {
                let h = CurvatureProfile::constant(h0v, 1.0, 2.0);
                let slow = solve_h_helicoidal_i(&h.clone().without_fast_path(), 0.3, 0.7, sig, eps)
                    .unwrap();
                let fast = solve_h_helicoidal_i(&h, 0.3, 0.7, sig, eps).unwrap();
                // z = z0 + z1 ln s + ε H0 s²/2 with z0, z1 absorbing the base point.
                let z1 = 0.7 - eps * h0v;
                let z0 = 0.3 - eps * h0v * 0.5;
                for s in grid(1.0, 2.0, 9) {
                    let want = z0 + z1 * s.ln() + eps * h0v * s * s / 2.0;
                    assert!((z_at(&slow, s) - want).abs() < 1e-8);
                    assert!((z_at(&fast, s) - want).abs() < 1e-12);
                }
                assert_roundtrip(&slow, move |_| h0v, 1e-5);
            }
        }
        let h = CurvatureProfile::new(|s| 0.1 * s.sin(), 1.0, 2.0);
        let out = solve_h_helicoidal_i(&h, 0.0, 1.0, S, 1.0).unwrap();
        assert_roundtrip(&out, |s| 0.1 * s.sin(), 1e-5);
    }

    #[test]
    fn parabolic_k_closed_forms() {
        let (a, b, c1, c2) = (1.0, 2.0, 0.5, 1.5);
        let d = a * c1 + b * c2;
        for (sig, plane) in [(S, Plane::XZ), (P, Plane::XZ), (P, Plane::YZ)] {
            let (bb, cc) = plane_coeffs(plane, a, b, c1, c2);
            for k0v in [-0.5, 0.0, 0.5] {
                let k = CurvatureProfile::constant(k0v, -1.0, 1.0);
                let out = solve_k_parabolic_i(
                    &k.clone().without_fast_path(),
                    a,
                    b,
                    c1,
                    c2,
                    0.2,
                    0.1,
                    sig,
                    plane,
                )
                .unwrap();
                let sgn = if sig.is_pseudo() { -1.0 } else { 1.0 };
                let coef = (cc * cc + sgn * bb * bb * k0v) / (2.0 * d);
                // Closed form in s, shifted so that the base point s = -1 matches.
                let z0 = 0.2 + sgn * bb * bb * k0v / (2.0 * d);
                let z1 = 0.1 + sgn * bb * bb * k0v / d;
                for s in grid(-1.0, 1.0, 9) {
                    let want = z0 + z1 * s + coef * s * s;
                    assert!((z_at(&out, s) - want).abs() < 1e-8, "{}", out.cell);
                }
                assert_roundtrip(&out, move |_| k0v, 1e-5);
            }
        }
        let k = CurvatureProfile::constant(0.0, -1.0, 1.0);
        assert!(matches!(
            solve_k_parabolic_i(&k, 1.0, 1.0, 1.0, -1.0, 0.0, 0.0, S, Plane::XZ),
            Err(IsoError::DegenerateParameters(_))
        ));
    }

    #[test]
    fn parabolic_h_closed_forms() {
        let (a, b, c1, c2) = (2.0, 1.0, 0.5, -0.3);
        for (sig, plane) in [(S, Plane::XZ), (P, Plane::XZ), (P, Plane::YZ)] {
            let bb = plane_coeffs(plane, a, b, c1, c2).0;
            let (delta, sgn) = if sig.is_pseudo() {
                (a * a - b * b, -1.0)
            } else {
                (a * a + b * b, 1.0)
            };
            for h0v in [-0.5, 0.0, 0.5] {
                let h = CurvatureProfile::constant(h0v, -1.0, 1.0);
                let out = solve_h_parabolic_i(
                    &h.clone().without_fast_path(),
                    a,
                    b,
                    c1,
                    c2,
                    0.0,
                    0.0,
                    sig,
                    plane,
                )
                .unwrap();
                let coef = (a * c1 - b * c2 + sgn * 2.0 * bb * bb * h0v) / (2.0 * delta);
                let lin = sgn * 2.0 * bb * bb * h0v / delta;
                for s in grid(-1.0, 1.0, 9) {
                    let want = coef * s * s + lin * (s + 0.5);
                    assert!((z_at(&out, s) - want).abs() < 1e-8, "{}", out.cell);
                }
                assert_roundtrip(&out, move |_| h0v, 1e-5);
            }
        }
        let h = CurvatureProfile::constant(0.0, -1.0, 1.0);
        let plane = solve_h_parabolic_i(&h, 1.0, 1.0, 0.0, 0.0, 0.5, 2.0, S, Plane::XZ).unwrap();
        assert!((z_at(&plane, 0.7) - (0.5 + 1.4)).abs() < 1e-14);
        assert!(matches!(
            solve_h_parabolic_i(&h, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, P, Plane::XZ),
            Err(IsoError::DegenerateParameters(_))
        ));
    }

    #[test]
    fn parabolic_sin_roundtrip() {
        let f = |s: f64| 0.1 * s.sin();
        let k = CurvatureProfile::new(f, -1.0, 1.0);
        let out = solve_k_parabolic_i(&k, 1.0, 2.0, 0.5, 1.5, 0.0, 0.0, P, Plane::YZ).unwrap();
        assert_roundtrip(&out, f, 1e-5);
        let out = solve_h_parabolic_i(&k, 2.0, 1.0, 0.5, 1.5, 0.0, 0.0, S, Plane::XZ).unwrap();
        assert_roundtrip(&out, f, 1e-5);
    }

    #[test]
    fn constants_shift_and_tilt() {
        let k = CurvatureProfile::new(|s| 0.1 * s.sin(), -1.0, 1.0);
        let base = solve_k_parabolic_i(&k, 1.0, 2.0, 0.5, 1.5, 0.0, 0.0, S, Plane::XZ).unwrap();
        let shifted = solve_k_parabolic_i(&k, 1.0, 2.0, 0.5, 1.5, 0.75, 0.0, S, Plane::XZ).unwrap();
        let tilted = solve_k_parabolic_i(&k, 1.0, 2.0, 0.5, 1.5, 0.0, 0.25, S, Plane::XZ).unwrap();
        for s in grid(-1.0, 1.0, 5) {
            assert!((z_at(&shifted, s) - z_at(&base, s) - 0.75).abs() < 1e-12);
            let dz = tilted.curve.jet(s)[1].z - base.curve.jet(s)[1].z;
            assert!((dz - 0.25).abs() < 1e-12);
        }
    }
}
