//! Fundamental forms, relative normal, Gauss map and the isotropic
//! Gaussian and mean curvatures.

use serde::Serialize;

use crate::curve::Plane;
use crate::error::{IsoError, Result};
use crate::metric::{ambient_dot, dot, IsoVector, Signature};
use crate::motion::MotionType;
use crate::surface::{InvariantSurface, ParamSurface, SurfaceJet};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct FundamentalForms {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
    pub x12: f64,
    pub x13: f64,
    pub x23: f64,
    pub x31: f64,
    /// Relative normal.
    pub n_h: IsoVector,
}

impl FundamentalForms {
    pub fn det_g(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn curvatures(&self) -> CurvaturePair {
        let d = self.det_g();
        CurvaturePair {
            k: (self.h11 * self.h22 - self.h12 * self.h12) / d,
            h: 0.5 * (self.g11 * self.h22 - 2.0 * self.g12 * self.h12 + self.g22 * self.h11) / d,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CurvaturePair {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

fn minor(a: IsoVector, b: IsoVector, i: usize, j: usize) -> f64 {
    let (a, b) = (a.to_array(), b.to_array());
    a[i] * b[j] - b[i] * a[j]
}

/// Forms from a precomputed jet.
pub fn forms_from_jet(sig: Signature, j: &SurfaceJet, u: f64, t: f64) -> Result<FundamentalForms> {
    let x12 = minor(j.xu, j.xt, 0, 1);
    let x13 = minor(j.xu, j.xt, 0, 2);
    let x23 = minor(j.xu, j.xt, 1, 2);
    let x31 = minor(j.xu, j.xt, 2, 0);
    let tu = (j.xu.x * j.xu.x + j.xu.y * j.xu.y).sqrt();
    let tt = (j.xt.x * j.xt.x + j.xt.y * j.xt.y).sqrt();
    let scale = 1f64.max(tu).max(tt);
    if !(x12.abs() > 1e-10 * scale * scale) {
        return Err(IsoError::NotAdmissible { u, t, x12 });
    }
    let n_h = match sig {
        Signature::SimplyIsotropic => IsoVector::new(x23 / x12, x31 / x12, 1.0),
        Signature::PseudoIsotropic => IsoVector::new(x23 / x12, x13 / x12, 1.0),
    };
    Ok(FundamentalForms {
        g11: dot(j.xu, j.xu, sig),
        g12: dot(j.xu, j.xt, sig),
        g22: dot(j.xt, j.xt, sig),
        h11: ambient_dot(n_h, j.xuu, sig),
        h12: ambient_dot(n_h, j.xut, sig),
        h22: ambient_dot(n_h, j.xtt, sig),
        x12,
        x13,
        x23,
        x31,
        n_h,
    })
}

pub fn fundamental_forms<S: ParamSurface + ?Sized>(
    s: &S,
    u: f64,
    t: f64,
) -> Result<FundamentalForms> {
    forms_from_jet(s.signature(), &s.jet(u, t), u, t)
}

/// Gauss map onto the unit sphere of parabolic type
/// `z = (1 - (x^2 ± y^2)) / 2`.
pub fn gauss_map<S: ParamSurface + ?Sized>(s: &S, u: f64, t: f64) -> Result<IsoVector> {
    let f = fundamental_forms(s, u, t)?;
    let n = f.n_h;
    let q = n.x * n.x + s.signature().sigma() * n.y * n.y;
    Ok(IsoVector::new(n.x, n.y, 0.5 * (1.0 - q)))
}

pub fn curvatures_numeric<S: ParamSurface + ?Sized>(
    s: &S,
    u: f64,
    t: f64,
) -> Result<CurvaturePair> {
    Ok(fundamental_forms(s, u, t)?.curvatures())
}

/// Second fundamental form through the shape operator `-Dξ`, with the
/// derivatives of ξ taken by central differences of step `h`.
pub fn shape_operator_forms<S: ParamSurface + ?Sized>(
    s: &S,
    u: f64,
    t: f64,
    h: f64,
) -> Result<[f64; 3]> {
    let sig = s.signature();
    let j = s.jet(u, t);
    let xi_u = (gauss_map(s, u + h, t)? - gauss_map(s, u - h, t)?) * (0.5 / h);
    let xi_t = (gauss_map(s, u, t + h)? - gauss_map(s, u, t - h)?) * (0.5 / h);
    Ok([
        dot(-xi_u, j.xu, sig),
        dot(-xi_u, j.xt, sig),
        dot(-xi_t, j.xt, sig),
    ])
}

/// Step for [`brioschi`] on unit-scale parameters. Five-point stencils
/// lose `eps/h^2` to rounding and `h^4` to truncation; this balances the two.
pub const BRIOSCHI_STEP: f64 = 2e-3;

/// Intrinsic curvature of the induced metric by the Brioschi formula,
/// using five-point differences of step `h` on `g`.
pub fn brioschi<S: ParamSurface + ?Sized>(s: &S, u: f64, t: f64, h: f64) -> f64 {
    let sig = s.signature();
    let g = |u: f64, t: f64| {
        let j = s.jet(u, t);
        [
            dot(j.xu, j.xu, sig),
            dot(j.xu, j.xt, sig),
            dot(j.xt, j.xt, sig),
        ]
    };
    let w = [1.0, -8.0, 0.0, 8.0, -1.0];
    let w2 = [-1.0, 16.0, -30.0, 16.0, -1.0];
    let offs = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let along = |du: f64, dt: f64, weights: &[f64; 5], denom: f64| {
        let mut acc = [0.0; 3];
        for (k, &o) in offs.iter().enumerate() {
            if weights[k] == 0.0 {
                continue;
            }
            let v = g(u + o * du, t + o * dt);
            for i in 0..3 {
                acc[i] += weights[k] * v[i];
            }
        }
        acc.map(|a| a / denom)
    };
    let gu = along(h, 0.0, &w, 12.0 * h);
    let gt = along(0.0, h, &w, 12.0 * h);
    let guu = along(h, 0.0, &w2, 12.0 * h * h);
    let gtt = along(0.0, h, &w2, 12.0 * h * h);
    // Mixed derivative of F: five-point difference in t of the five-point
    // difference in u.
    let mut f_ut = 0.0;
    for (k, &o) in offs.iter().enumerate() {
        if w[k] == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (l, &p) in offs.iter().enumerate() {
            if w[l] == 0.0 {
                continue;
            }
            inner += w[l] * g(u + p * h, t + o * h)[1];
        }
        f_ut += w[k] * inner / (12.0 * h);
    }
    f_ut /= 12.0 * h;

    let [e, f, gg] = g(u, t);
    let (eu, fu, gu_) = (gu[0], gu[1], gu[2]);
    let (ev, fv, gv) = (gt[0], gt[1], gt[2]);
    let a = [
        [-0.5 * gtt[0] + f_ut - 0.5 * guu[2], 0.5 * eu, fu - 0.5 * ev],
        [fv - 0.5 * gu_, e, f],
        [0.5 * gv, f, gg],
    ];
    let b = [
        [0.0, 0.5 * ev, 0.5 * gu_],
        [0.5 * ev, e, f],
        [0.5 * gu_, f, gg],
    ];
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let dg = e * gg - f * f;
    (det3(a) - det3(b)) / (dg * dg)
}

/// Graph `(u, v, Z(u, v))`. The closure returns
/// `[Z, Z_u, Z_v, Z_uu, Z_uv, Z_vv]`.
pub struct GraphSurface {
    sig: Signature,
    z: Box<dyn Fn(f64, f64) -> [f64; 6] + Send + Sync>,
}

impl GraphSurface {
    pub fn new(sig: Signature, z: impl Fn(f64, f64) -> [f64; 6] + Send + Sync + 'static) -> Self {
        Self {
            sig,
            z: Box::new(z),
        }
    }

    /// Paraboloid `z = (x^2 ± y^2) / (2p)`, the isotropic sphere of parameter `p`.
    pub fn sphere(sig: Signature, p: f64) -> Self {
        let s = sig.sigma();
        Self::new(sig, move |u, v| {
            [
                (u * u + s * v * v) / (2.0 * p),
                u / p,
                s * v / p,
                1.0 / p,
                0.0,
                s / p,
            ]
        })
    }
}

impl ParamSurface for GraphSurface {
    fn signature(&self) -> Signature {
        self.sig
    }

    fn jet(&self, u: f64, v: f64) -> SurfaceJet {
        let [z, zu, zv, zuu, zuv, zvv] = (self.z)(u, v);
        SurfaceJet {
            x: IsoVector::new(u, v, z),
            xu: IsoVector::new(1.0, 0.0, zu),
            xt: IsoVector::new(0.0, 1.0, zv),
            xuu: IsoVector::new(0.0, 0.0, zuu),
            xut: IsoVector::new(0.0, 0.0, zuv),
            xtt: IsoVector::new(0.0, 0.0, zvv),
        }
    }
}

/// Families with a closed-form curvature.
pub fn has_closed_form(s: &InvariantSurface) -> bool {
    use MotionType::*;
    matches!(
        s.motion_type(),
        Some(
            Rotation | Helicoidal | ParabolicRotation | WarpedTranslation | TranslationNonIsotropic
        )
    )
}

/// Per-family closed forms for K and H. These depend on `u` only.
pub fn curvatures_closed_form(s: &InvariantSurface, u: f64) -> Result<CurvaturePair> {
    use MotionType::*;
    let ty = match s.motion_type() {
        Some(
            ty @ (Rotation
            | Helicoidal
            | ParabolicRotation
            | WarpedTranslation
            | TranslationNonIsotropic),
        ) => ty,
        _ => return Err(IsoError::NoClosedForm(s.family.name())),
    };
    let g = &s.group;
    let pseudo = g.sig.is_pseudo();
    let [p, d1, d2] = s.curve.jet(u);
    let plane = s.curve.plane;
    let helicoidal = matches!(ty, Rotation | Helicoidal);
    let out = match (plane, helicoidal) {
        (Plane::XY, true) => {
            let (x, y, xp, yp, xpp, ypp) = (p.x, p.y, d1.x, d1.y, d2.x, d2.y);
            let q = g.c / g.phi;
            let bend = xpp * yp - xp * ypp;
            let cross = x * yp - xp * y;
            if pseudo {
                let speed = xp * xp - yp * yp;
                let den = x * xp - y * yp;
                CurvaturePair {
                    k: q * q * (speed * speed - cross * bend) / den.powi(4),
                    h: q * ((x * x - y * y) * bend + speed * cross) / (2.0 * den.powi(3)),
                }
            } else {
                let speed = xp * xp + yp * yp;
                let den = x * xp + y * yp;
                CurvaturePair {
                    k: q * q * (-cross * bend - speed * speed) / den.powi(4),
                    h: q * ((x * x + y * y) * bend + speed * cross) / (2.0 * den.powi(3)),
                }
            }
        }
        (_, true) => {
            let (f, fp, fpp) = profile(plane, p, d1, d2);
            let (zp, zpp) = (d1.z, d2.z);
            let w = fpp * zp - fp * zpp;
            let q2 = (g.c / g.phi).powi(2) / f.powi(4);
            let k_rev = -zp * w / (f * fp.powi(4));
            let h_rev = (fp * fp * zp - f * w) / (2.0 * f * fp.powi(3));
            if pseudo {
                CurvaturePair {
                    k: q2 + k_rev,
                    h: plane.causal_sign() * h_rev,
                }
            } else {
                CurvaturePair {
                    k: k_rev - q2,
                    h: h_rev,
                }
            }
        }
        (Plane::XY, false) => {
            let (x, y, xp, yp, xpp, ypp) = (p.x, p.y, d1.x, d1.y, d2.x, d2.y);
            let (a, b) = (g.a, g.b);
            let dd = g.d1();
            let den = b * xp - a * yp;
            let bend = xpp * yp - xp * ypp;
            let slope = (g.c1 * xp + g.c2 * yp) / den;
            let lin = g.c + g.c1 * x + g.c2 * y;
            if ty == WarpedTranslation {
                let lin = g.c1 * x + g.c2 * y;
                if pseudo {
                    CurvaturePair {
                        k: slope * slope,
                        h: -(a * a - b * b) * lin * bend / (2.0 * den.powi(3))
                            + (a * xp - b * yp) * (g.c1 * xp + g.c2 * yp) / (den * den),
                    }
                } else {
                    CurvaturePair {
                        k: -slope * slope,
                        h: (a * a + b * b) * lin * bend / (2.0 * den.powi(3))
                            - (a * xp + b * yp) * (g.c1 * xp + g.c2 * yp) / (den * den),
                    }
                }
            } else if pseudo {
                CurvaturePair {
                    k: slope * slope - dd * lin * bend / den.powi(3),
                    h: -(a * a - b * b) * lin * bend / (2.0 * den.powi(3))
                        + (a * xp - b * yp) * (g.c1 * xp + g.c2 * yp) / (den * den)
                        - (xp * xp - yp * yp) * dd / (2.0 * den * den),
                }
            } else {
                CurvaturePair {
                    k: dd * lin * bend / den.powi(3) - slope * slope,
                    h: (a * a + b * b) * lin * bend / (2.0 * den.powi(3))
                        - (a * xp + b * yp) * (g.c1 * xp + g.c2 * yp) / (den * den)
                        + (xp * xp + yp * yp) * dd / (2.0 * den * den),
                }
            }
        }
        (_, false) => {
            let (_, fp, fpp) = profile(plane, p, d1, d2);
            let (zp, zpp) = (d1.z, d2.z);
            let w = fpp * zp - fp * zpp;
            let (a, b) = (g.a, g.b);
            let dd = g.d1();
            let (bb, cc) = if plane == Plane::YZ {
                (a, g.c2)
            } else {
                (b, g.c1)
            };
            let b2 = bb * bb;
            if ty == WarpedTranslation {
                if pseudo {
                    CurvaturePair {
                        k: (cc / bb).powi(2),
                        h: -(b * g.c2 - a * g.c1) / (2.0 * b2)
                            + (a * a - b * b) * w / (2.0 * b2 * fp.powi(3)),
                    }
                } else {
                    CurvaturePair {
                        k: -(g.c1 / b).powi(2),
                        h: -(a * a + b * b) * w / (2.0 * b2 * fp.powi(3))
                            + (b * g.c2 - a * g.c1) / (2.0 * b2),
                    }
                }
            } else if pseudo {
                CurvaturePair {
                    k: dd * w / (b2 * fp.powi(3)) + cc * cc / b2,
                    h: (a * a - b * b) * w / (2.0 * b2 * fp.powi(3))
                        - (b * g.c2 - a * g.c1) / (2.0 * b2),
                }
            } else {
                CurvaturePair {
                    k: -dd * w / (b2 * fp.powi(3)) - g.c1 * g.c1 / b2,
                    h: (b * g.c2 - a * g.c1) / (2.0 * b2)
                        - (a * a + b * b) * w / (2.0 * b2 * fp.powi(3)),
                }
            }
        }
    };
    Ok(out)
}

/// The in-plane coordinate of an i-type curve and its derivatives.
fn profile(plane: Plane, p: IsoVector, d1: IsoVector, d2: IsoVector) -> (f64, f64, f64) {
    if plane == Plane::YZ {
        (p.y, d1.y, d2.y)
    } else {
        (p.x, d1.x, d2.x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveFn, GeneratingCurve};
    use crate::motion::MotionSubgroup;
    use crate::surface::invariant_surface;

    const S: Signature = Signature::SimplyIsotropic;
    const P: Signature = Signature::PseudoIsotropic;

    fn cubic(u: f64, v: f64) -> [f64; 6] {
        let z = u * u * v + 0.5 * v * v * v - u;
        [
            z,
            2.0 * u * v - 1.0,
            u * u + 1.5 * v * v,
            2.0 * v,
            2.0 * u,
            3.0 * v,
        ]
    }

    #[test]
    fn graph_normal_and_hessian() {
        for sig in [S, P] {
            let g = GraphSurface::new(sig, cubic);
            let (u, v) = (0.4, -0.7);
            let f = fundamental_forms(&g, u, v).unwrap();
            let z = cubic(u, v);
            assert!((f.n_h.x + z[1]).abs() < 1e-14);
            let ny = if sig == S { -z[2] } else { z[2] };
            assert!((f.n_h.y - ny).abs() < 1e-14);
            assert_eq!((f.h11, f.h12, f.h22), (z[3], z[4], z[5]));
            let xi = gauss_map(&g, u, v).unwrap();
            assert_eq!((xi.x, xi.y), (f.n_h.x, f.n_h.y));
        }
    }

    #[test]
    fn plane_is_flat() {
        let g = GraphSurface::new(S, |_, _| [0.0; 6]);
        let f = fundamental_forms(&g, 0.3, 0.2).unwrap();
        assert_eq!((f.h11, f.h12, f.h22), (0.0, 0.0, 0.0));
        let c = curvatures_numeric(&g, 0.3, 0.2).unwrap();
        assert_eq!((c.k, c.h), (0.0, 0.0));
        assert_eq!(
            gauss_map(&g, 5.0, -2.0).unwrap(),
            IsoVector::new(0.0, 0.0, 0.5)
        );
    }

    #[test]
    fn sphere_vertex_gauss_map() {
        let p = 2.0;
        let g = GraphSurface::new(S, move |u, v| {
            [
                (u * u + v * v) / (2.0 * p),
                u / p,
                v / p,
                1.0 / p,
                0.0,
                1.0 / p,
            ]
        });
        assert_eq!(
            gauss_map(&g, 0.0, 0.0).unwrap(),
            IsoVector::new(0.0, 0.0, 0.5)
        );
        assert!((curvatures_numeric(&g, 0.3, 0.1).unwrap().k - 0.25).abs() < 1e-14);
    }

    #[test]
    fn helicoid_second_form() {
        let line = GeneratingCurve::line(Plane::XZ, [0.0, 0.0], [1.0, 0.0]);
        let s = invariant_surface(line, MotionSubgroup::helicoidal(S, 1.0, 1.0)).unwrap();
        let f = fundamental_forms(&s, 1.0, 0.3).unwrap();
        assert!(f.h11.abs() < 1e-15 && (f.h12 + 1.0).abs() < 1e-15 && f.h22.abs() < 1e-15);
        let c = curvatures_numeric(&s, 1.0, 0.3).unwrap();
        assert!((c.k + 1.0).abs() < 1e-14 && c.h.abs() < 1e-14);
        let cf = curvatures_closed_form(&s, 1.0).unwrap();
        assert!((cf.k + 1.0).abs() < 1e-14 && cf.h.abs() < 1e-14);
    }

    #[test]
    fn closed_form_examples() {
        let par = GeneratingCurve::poly_graph(Plane::XZ, vec![0.0, 0.0, 0.5]);
        let s = invariant_surface(par, MotionSubgroup::helicoidal(S, 1.0, 0.0)).unwrap();
        let c = curvatures_closed_form(&s, 1.0).unwrap();
        assert!((c.h - 1.0).abs() < 1e-15 && (c.k - 1.0).abs() < 1e-15);

        let curve = GeneratingCurve::poly_graph(Plane::XZ, vec![0.1, 0.3, 0.2]);
        let (a, b, c1) = (1.0, 2.0, 0.5);
        let c2 = -a * c1 / b;
        let zh4 =
            invariant_surface(curve.clone(), MotionSubgroup::limit(P, a, b, 0.0, c1, c2)).unwrap();
        assert_eq!(zh4.family.name(), "Zh4");
        assert!((curvatures_closed_form(&zh4, 0.7).unwrap().k - (c1 / b).powi(2)).abs() < 1e-15);
        let z4 = invariant_surface(curve, MotionSubgroup::limit(S, a, b, 0.0, c1, c2)).unwrap();
        assert!((curvatures_closed_form(&z4, 0.7).unwrap().k + (c1 / b).powi(2)).abs() < 1e-15);

        let shear = invariant_surface(
            GeneratingCurve::line(Plane::XY, [0.0, 0.0], [1.0, 1.0]),
            MotionSubgroup::limit(S, 0.0, 0.0, 0.0, 1.0, 0.0),
        )
        .unwrap();
        assert!(matches!(
            curvatures_closed_form(&shear, 0.2),
            Err(IsoError::NoClosedForm(_))
        ));
    }

    #[test]
    fn not_admissible_is_reported() {
        let iso = GeneratingCurve::line(Plane::XZ, [1.0, 0.0], [0.0, 1.0]);
        let s = invariant_surface(iso, MotionSubgroup::helicoidal(S, 1.0, 1.0)).unwrap();
        assert!(matches!(
            fundamental_forms(&s, 0.5, 0.1),
            Err(IsoError::NotAdmissible { .. })
        ));
        assert!(gauss_map(&s, 0.5, 0.1).is_err());
    }

    #[test]
    fn brioschi_flat_on_invariant_surface() {
        let c = GeneratingCurve::new(
            Plane::XY,
            CurveFn::Sum(vec![
                CurveFn::constant(1.2),
                CurveFn::Sin {
                    amp: 0.3,
                    freq: 1.0,
                    phase: 0.0,
                },
            ]),
            CurveFn::Poly(vec![0.2, 0.5, 0.1]),
        );
        let s = invariant_surface(c, MotionSubgroup::helicoidal(S, 0.8, 0.4)).unwrap();
        assert!(brioschi(&s, 0.3, 0.2, BRIOSCHI_STEP).abs() < 1e-6);
    }
}
