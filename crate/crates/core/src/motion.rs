//! Rigid motions as 4x4 matrices and their 1-parameter subgroups.

use std::fmt;

use nalgebra::{Matrix3, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{IsoError, Result};
use crate::metric::{IsoVector, Signature};

const ORTHO_TOL: f64 = 1e-12;

/// Below this |phi| the phase sums switch to their Taylor expansions.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// An affine motion `[[A, a], [0, 1]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Motion4 {
    pub m: Matrix4<f64>,
}

impl Motion4 {
    pub fn identity() -> Self {
        Self {
            m: Matrix4::identity(),
        }
    }

    pub fn from_matrix(m: Matrix4<f64>) -> Self {
        Self { m }
    }

    pub fn linear(&self) -> Matrix3<f64> {
        self.m.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn translation(&self) -> IsoVector {
        IsoVector::new(self.m[(0, 3)], self.m[(1, 3)], self.m[(2, 3)])
    }

    /// For the affine shape `[[A, a], [0, 1]]` with zero `(1,3)`, `(2,3)`
    /// entries this is `A33 (A11 A22 - A12 A21)`; other matrices fall back
    /// to a full LU determinant.
    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        let affine = m[(3, 0)] == 0.0 && m[(3, 1)] == 0.0 && m[(3, 2)] == 0.0 && m[(3, 3)] == 1.0;
        if affine && m[(0, 2)] == 0.0 && m[(1, 2)] == 0.0 {
            m[(2, 2)] * m[(0, 0)].mul_add(m[(1, 1)], -m[(0, 1)] * m[(1, 0)])
        } else {
            m.determinant()
        }
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Motion4) -> f64 {
        (self.m - other.m).abs().max()
    }
}

/// Assembles `[[A, a], [0, 1]]` after checking that `A` belongs to the
/// orthogonal group of the given space.
pub fn make_motion(a_mat: Matrix3<f64>, a: IsoVector, sig: Signature) -> Result<Motion4> {
    if !is_orthogonal_iso(&a_mat, sig) {
        return Err(IsoError::NotOrthogonal(format!("{a_mat:?}")));
    }
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&a_mat);
    m[(0, 3)] = a.x;
    m[(1, 3)] = a.y;
    m[(2, 3)] = a.z;
    Ok(Motion4 { m })
}

/// Membership test for the isotropic orthogonal groups.
///
/// Simply isotropic: the top-left block is `[[cos, -s sin], [sin, s cos]]`.
/// Pseudo-isotropic: `[[s ch, sh], [sh, s ch]]` or `[[s ch, -sh], [sh, -s ch]]`.
/// In both cases `(1,3) = (2,3) = 0`, `(3,3) = ±1` and the rest of the third
/// row is free.
pub fn is_orthogonal_iso(a: &Matrix3<f64>, sig: Signature) -> bool {
    if a.iter().any(|v| !v.is_finite()) {
        return false;
    }
    if a[(0, 2)].abs() > ORTHO_TOL || a[(1, 2)].abs() > ORTHO_TOL {
        return false;
    }
    if (a[(2, 2)].abs() - 1.0).abs() > ORTHO_TOL {
        return false;
    }
    let close = |x: f64, y: f64| (x - y).abs() <= ORTHO_TOL;
    let (a11, a12, a21, a22) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    match sig {
        Signature::SimplyIsotropic => {
            let phi = a21.atan2(a11);
            if !close(a11, phi.cos()) || !close(a21, phi.sin()) {
                return false;
            }
            (close(a12, -a21) && close(a22, a11)) || (close(a12, a21) && close(a22, -a11))
        }
        Signature::PseudoIsotropic => {
            let ch = (1.0 + a21 * a21).sqrt();
            if !close(a11.abs(), ch) {
                return false;
            }
            (close(a12, a21) && close(a22, a11)) || (close(a12, -a21) && close(a22, -a11))
        }
    }
}

pub fn compose(m1: &Motion4, m2: &Motion4) -> Motion4 {
    Motion4 { m: m1.m * m2.m }
}

pub fn apply(m: &Motion4, p: IsoVector) -> IsoVector {
    let r = m.m * Vector4::new(p.x, p.y, p.z, 1.0);
    IsoVector::new(r[0], r[1], r[2])
}

/// The four auxiliary sums `C_t, S_t, C~_t, S~_t` (or their hyperbolic
/// versions). At integer `t = n` they are
/// `sum_{k<n} cos kφ`, `sum_{k<n} sin kφ`, `sum_{k<n-1} (n-1-k) cos kφ`
/// and `sum_{k<n-1} (n-1-k) sin kφ`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseSums {
    pub c: f64,
    pub s: f64,
    pub ct: f64,
    pub st: f64,
}

pub fn phase_sums(phi: f64, t: f64, sig: Signature) -> PhaseSums {
    phase_sums_jet(phi, t, sig)[0]
}

/// Phase sums together with their first and second `t`-derivatives.
pub fn phase_sums_jet(phi: f64, t: f64, sig: Signature) -> [PhaseSums; 3] {
    if phi.abs() < SERIES_THRESHOLD {
        series_jet(phi, t, sig)
    } else {
        match sig {
            Signature::SimplyIsotropic => trig_jet(phi, t),
            Signature::PseudoIsotropic => hyp_jet(phi, t),
        }
    }
}

fn trig_jet(p: f64, t: f64) -> [PhaseSums; 3] {
    let s = (p / 2.0).sin();
    let s2 = s * s;
    let w = t * p - p / 2.0;
    let v = (t - 1.0) * p;
    let value = PhaseSums {
        c: 0.5 + w.sin() / (2.0 * s),
        s: (t * p / 2.0).sin() * (v / 2.0).sin() / s,
        ct: t / 2.0 + (t * p / 2.0).sin() * ((t - 2.0) * p / 2.0).sin() / (2.0 * s2),
        st: ((t - 1.0) * p.sin() - v.sin()) / (4.0 * s2),
    };
    let d1 = PhaseSums {
        c: p * w.cos() / (2.0 * s),
        s: p * w.sin() / (2.0 * s),
        ct: 0.5 + p * v.sin() / (4.0 * s2),
        st: (p.sin() - p * v.cos()) / (4.0 * s2),
    };
    let d2 = PhaseSums {
        c: -p * p * w.sin() / (2.0 * s),
        s: p * p * w.cos() / (2.0 * s),
        ct: p * p * v.cos() / (4.0 * s2),
        st: p * p * v.sin() / (4.0 * s2),
    };
    [value, d1, d2]
}

fn hyp_jet(p: f64, t: f64) -> [PhaseSums; 3] {
    let s = (p / 2.0).sinh();
    let s2 = s * s;
    let w = t * p - p / 2.0;
    let v = (t - 1.0) * p;
    let value = PhaseSums {
        c: 0.5 + w.sinh() / (2.0 * s),
        s: (t * p / 2.0).sinh() * (v / 2.0).sinh() / s,
        ct: t / 2.0 + (t * p / 2.0).sinh() * ((t - 2.0) * p / 2.0).sinh() / (2.0 * s2),
        st: (v.sinh() - (t - 1.0) * p.sinh()) / (4.0 * s2),
    };
    let d1 = PhaseSums {
        c: p * w.cosh() / (2.0 * s),
        s: p * w.sinh() / (2.0 * s),
        ct: 0.5 + p * v.sinh() / (4.0 * s2),
        st: (p * v.cosh() - p.sinh()) / (4.0 * s2),
    };
    let d2 = PhaseSums {
        c: p * p * w.sinh() / (2.0 * s),
        s: p * p * w.cosh() / (2.0 * s),
        ct: p * p * v.cosh() / (4.0 * s2),
        st: p * p * v.sinh() / (4.0 * s2),
    };
    [value, d1, d2]
}

// Taylor coefficients in phi (index = power of phi), each a polynomial in t
// with ascending powers. Trigonometric case; the hyperbolic case flips the
// sign of the phi^2 and phi^3 rows.
const SER_C: [&[f64]; 5] = [
    &[0.0, 1.0],
    &[],
    &[0.0, -1.0 / 12.0, 1.0 / 4.0, -1.0 / 6.0],
    &[],
    &[0.0, -1.0 / 720.0, 0.0, 1.0 / 72.0, -1.0 / 48.0, 1.0 / 120.0],
];
const SER_S: [&[f64]; 5] = [
    &[],
    &[0.0, -1.0 / 2.0, 1.0 / 2.0],
    &[],
    &[0.0, 0.0, -1.0 / 24.0, 1.0 / 12.0, -1.0 / 24.0],
    &[],
];
const SER_CT: [&[f64]; 5] = [
    &[0.0, -1.0 / 2.0, 1.0 / 2.0],
    &[],
    &[0.0, 1.0 / 12.0, -5.0 / 24.0, 1.0 / 6.0, -1.0 / 24.0],
    &[],
    &[
        0.0,
        1.0 / 720.0,
        1.0 / 480.0,
        -1.0 / 72.0,
        5.0 / 288.0,
        -1.0 / 120.0,
        1.0 / 720.0,
    ],
];
const SER_ST: [&[f64]; 5] = [
    &[],
    &[0.0, 1.0 / 3.0, -1.0 / 2.0, 1.0 / 6.0],
    &[],
    &[
        0.0,
        -1.0 / 180.0,
        1.0 / 24.0,
        -5.0 / 72.0,
        1.0 / 24.0,
        -1.0 / 120.0,
    ],
    &[],
];

/// `d^k/dt^k` of a polynomial with ascending coefficients.
fn poly_deriv(coef: &[f64], t: f64, k: usize) -> f64 {
    let mut acc = 0.0;
    for (i, &a) in coef.iter().enumerate().rev() {
        if i < k {
            break;
        }
        let mut f = a;
        for j in 0..k {
            f *= (i - j) as f64;
        }
        acc = acc * t + f;
    }
    acc
}

fn series_eval(table: &[&[f64]; 5], phi: f64, t: f64, k: usize, hyperbolic: bool) -> f64 {
    let mut out = 0.0;
    let mut pk = 1.0;
    for (n, row) in table.iter().enumerate() {
        let sign = if hyperbolic && (n == 2 || n == 3) {
            -1.0
        } else {
            1.0
        };
        out += sign * pk * poly_deriv(row, t, k);
        pk *= phi;
    }
    out
}

fn series_jet(phi: f64, t: f64, sig: Signature) -> [PhaseSums; 3] {
    let h = sig.is_pseudo();
    let mk = |k| PhaseSums {
        c: series_eval(&SER_C, phi, t, k, h),
        s: series_eval(&SER_S, phi, t, k, h),
        ct: series_eval(&SER_CT, phi, t, k, h),
        st: series_eval(&SER_ST, phi, t, k, h),
    };
    [mk(0), mk(1), mk(2)]
}

/// The seven kinds of 1-parameter subgroups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MotionType {
    #[serde(rename = "I")]
    Rotation,
    #[serde(rename = "II")]
    Helicoidal,
    #[serde(rename = "III")]
    ParabolicRotation,
    #[serde(rename = "IV")]
    WarpedTranslation,
    #[serde(rename = "V")]
    Shear,
    #[serde(rename = "VI")]
    TranslationNonIsotropic,
    #[serde(rename = "VII")]
    TranslationIsotropic,
}

impl MotionType {
    pub const ALL: [MotionType; 7] = [
        MotionType::Rotation,
        MotionType::Helicoidal,
        MotionType::ParabolicRotation,
        MotionType::WarpedTranslation,
        MotionType::Shear,
        MotionType::TranslationNonIsotropic,
        MotionType::TranslationIsotropic,
    ];

    pub fn index(self) -> u8 {
        match self {
            MotionType::Rotation => 1,
            MotionType::Helicoidal => 2,
            MotionType::ParabolicRotation => 3,
            MotionType::WarpedTranslation => 4,
            MotionType::Shear => 5,
            MotionType::TranslationNonIsotropic => 6,
            MotionType::TranslationIsotropic => 7,
        }
    }

    pub fn roman(self) -> &'static str {
        ["I", "II", "III", "IV", "V", "VI", "VII"][self.index() as usize - 1]
    }

    pub fn name(self) -> &'static str {
        match self {
            MotionType::Rotation => "rotation",
            MotionType::Helicoidal => "helicoidal",
            MotionType::ParabolicRotation => "parabolic rotation",
            MotionType::WarpedTranslation => "warped translation",
            MotionType::Shear => "isotropic shear",
            MotionType::TranslationNonIsotropic => "translation",
            MotionType::TranslationIsotropic => "isotropic translation",
        }
    }

    /// Orbit shape of a generic point.
    pub fn orbit(self) -> &'static str {
        match self {
            MotionType::Rotation => "circle",
            MotionType::Helicoidal => "helix",
            MotionType::ParabolicRotation => "parabola",
            _ => "line",
        }
    }

    pub fn is_ruled(self) -> bool {
        self.index() >= 4
    }
}

impl fmt::Display for MotionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.roman(), self.name())
    }
}

/// A 1-parameter subgroup `t -> psi_t` of isotropic or pseudo-isotropic
/// isometries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionSubgroup {
    #[serde(rename = "signature")]
    pub sig: Signature,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
}

impl MotionSubgroup {
    pub fn new(sig: Signature, phi: f64, a: f64, b: f64, c: f64, c1: f64, c2: f64) -> Self {
        Self {
            sig,
            phi,
            a,
            b,
            c,
            c1,
            c2,
        }
    }

    pub fn helicoidal(sig: Signature, phi: f64, c: f64) -> Self {
        Self::new(sig, phi, 0.0, 0.0, c, 0.0, 0.0)
    }

    pub fn limit(sig: Signature, a: f64, b: f64, c: f64, c1: f64, c2: f64) -> Self {
        Self::new(sig, 0.0, a, b, c, c1, c2)
    }

    pub fn d1(&self) -> f64 {
        self.a * self.c1 + self.b * self.c2
    }

    /// Coefficient of the odd phase sum in the (3,4) entry.
    pub fn d2(&self) -> f64 {
        match self.sig {
            Signature::SimplyIsotropic => self.a * self.c2 - self.b * self.c1,
            Signature::PseudoIsotropic => self.a * self.c2 + self.b * self.c1,
        }
    }

    pub fn params(&self) -> [f64; 6] {
        [self.phi, self.a, self.b, self.c, self.c1, self.c2]
    }

    pub fn is_finite(&self) -> bool {
        self.params().iter().all(|v| v.is_finite())
    }

    pub fn evaluate(&self, t: f64) -> Motion4 {
        evaluate(self, t)
    }

    pub fn classify(&self) -> Result<MotionType> {
        classify(self)
    }
}

/// `psi_t` and its first two `t`-derivatives.
pub fn evaluate_jet(g: &MotionSubgroup, t: f64) -> [Matrix4<f64>; 3] {
    let ps = phase_sums_jet(g.phi, t, g.sig);
    let p = g.phi;
    let tp = t * p;
    // rot[k] = (r11, r12, r21, r22) for the k-th derivative.
    let rot: [[f64; 4]; 3] = match g.sig {
        Signature::SimplyIsotropic => {
            let (s, c) = tp.sin_cos();
            [
                [c, -s, s, c],
                [-p * s, -p * c, p * c, -p * s],
                [-p * p * c, p * p * s, -p * p * s, -p * p * c],
            ]
        }
        Signature::PseudoIsotropic => {
            let (s, c) = (tp.sinh(), tp.cosh());
            [
                [c, s, s, c],
                [p * s, p * c, p * c, p * s],
                [p * p * c, p * p * s, p * p * s, p * p * c],
            ]
        }
    };
    let (d1, d2) = (g.d1(), g.d2());
    let half_t = [t / 2.0, 0.5, 0.0];
    let lin_t = [t, 1.0, 0.0];
    let pseudo = g.sig.is_pseudo();
    let mut out = [Matrix4::zeros(); 3];
    for k in 0..3 {
        let q = ps[k];
        let r = rot[k];
        let m = &mut out[k];
        m[(0, 0)] = r[0];
        m[(0, 1)] = r[1];
        m[(1, 0)] = r[2];
        m[(1, 1)] = r[3];
        if pseudo {
            m[(0, 3)] = g.a * q.c + g.b * q.s;
            m[(1, 3)] = g.b * q.c + g.a * q.s;
            m[(2, 0)] = g.c1 * q.c + g.c2 * q.s;
            m[(2, 1)] = g.c2 * q.c + g.c1 * q.s;
        } else {
            m[(0, 3)] = g.a * q.c - g.b * q.s;
            m[(1, 3)] = g.b * q.c + g.a * q.s;
            m[(2, 0)] = g.c1 * q.c + g.c2 * q.s;
            m[(2, 1)] = g.c2 * q.c - g.c1 * q.s;
        }
        m[(2, 3)] = g.c * lin_t[k] + d1 * (q.ct + half_t[k]) + d2 * q.st;
        if k == 0 {
            m[(2, 2)] = 1.0;
            m[(3, 3)] = 1.0;
        }
    }
    out
}

pub fn evaluate(g: &MotionSubgroup, t: f64) -> Motion4 {
    Motion4 {
        m: evaluate_jet(g, t)[0],
    }
}

/// Sorts a subgroup into one of the seven types. Every zero test is exact.
pub fn classify(g: &MotionSubgroup) -> Result<MotionType> {
    let ab = g.a != 0.0 || g.b != 0.0;
    let cc = g.c1 != 0.0 || g.c2 != 0.0;
    let fail = |nearest: MotionType| {
        Err(IsoError::Unclassifiable {
            nearest: nearest.to_string(),
        })
    };
    if g.phi != 0.0 {
        let nearest = if g.c != 0.0 {
            MotionType::Helicoidal
        } else {
            MotionType::Rotation
        };
        if ab || cc {
            return fail(nearest);
        }
        return Ok(nearest);
    }
    if g.d1() != 0.0 {
        return Ok(MotionType::ParabolicRotation);
    }
    match (ab, cc, g.c != 0.0) {
        (true, true, false) => Ok(MotionType::WarpedTranslation),
        (false, true, false) => Ok(MotionType::Shear),
        (true, false, false) => Ok(MotionType::TranslationNonIsotropic),
        (false, false, true) => Ok(MotionType::TranslationIsotropic),
        (true, true, true) => fail(MotionType::WarpedTranslation),
        (false, true, true) => fail(MotionType::Shear),
        (true, false, true) => fail(MotionType::TranslationNonIsotropic),
        // The identity subgroup: translation with zero speed.
        (false, false, false) => fail(MotionType::TranslationIsotropic),
    }
}
