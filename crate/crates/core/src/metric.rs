//! Degenerate metric algebra for the simply isotropic and pseudo-isotropic
//! 3-spaces.
//!
//! Both spaces are `R^3` with a rank-2 metric that only sees the top view
//! `(x, y)`: `dx^2 + dy^2` in the simply isotropic case and `dx^2 - dy^2` in
//! the pseudo-isotropic case. The `z` axis is the isotropic (null) direction.
//! Isotropic vectors are controlled by the codistance `|Δz|`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Which of the two isotropic geometries a computation lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signature {
    #[serde(rename = "simply", alias = "simply_isotropic", alias = "I3")]
    SimplyIsotropic,
    #[serde(rename = "pseudo", alias = "pseudo_isotropic", alias = "I3p")]
    PseudoIsotropic,
}

impl Signature {
    /// Sign in front of the `y` part of the top-view inner product.
    #[inline]
    pub fn sigma(self) -> f64 {
        match self {
            Signature::SimplyIsotropic => 1.0,
            Signature::PseudoIsotropic => -1.0,
        }
    }

    pub fn is_pseudo(self) -> bool {
        matches!(self, Signature::PseudoIsotropic)
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Signature::SimplyIsotropic => "simply",
            Signature::PseudoIsotropic => "pseudo",
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// A vector (or point) of `R^3`, read under one of the degenerate metrics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IsoVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl IsoVector {
    pub const ZERO: IsoVector = IsoVector {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Euclidean length, used only for tolerances and reporting.
    pub fn euclidean_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

impl From<[f64; 3]> for IsoVector {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl Add for IsoVector {
    type Output = IsoVector;
    fn add(self, rhs: IsoVector) -> IsoVector {
        IsoVector::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for IsoVector {
    type Output = IsoVector;
    fn sub(self, rhs: IsoVector) -> IsoVector {
        IsoVector::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for IsoVector {
    type Output = IsoVector;
    fn neg(self) -> IsoVector {
        IsoVector::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for IsoVector {
    type Output = IsoVector;
    fn mul(self, k: f64) -> IsoVector {
        IsoVector::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Mul<IsoVector> for f64 {
    type Output = IsoVector;
    fn mul(self, v: IsoVector) -> IsoVector {
        v * self
    }
}

/// Spacelike / timelike / lightlike classification under the
/// pseudo-isotropic product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
}

/// Isotropic inner product `u1 v1 + σ u2 v2`. The `z` components never
/// contribute.
#[inline]
pub fn dot(u: IsoVector, v: IsoVector, sig: Signature) -> f64 {
    u.x * v.x + sig.sigma() * u.y * v.y
}

/// Co-metric `u3 v3`, the second level of the metric hierarchy.
#[inline]
pub fn co_dot(u: IsoVector, v: IsoVector) -> f64 {
    u.z * v.z
}

/// Codistance `|v3 - u3|`. Meaningful for points with equal top views.
#[inline]
pub fn codistance(u: IsoVector, v: IsoVector) -> f64 {
    (v.z - u.z).abs()
}

/// Projection onto the `xy` plane.
#[inline]
pub fn top_view(u: IsoVector) -> IsoVector {
    IsoVector::new(u.x, u.y, 0.0)
}

/// Vector product of the ambient Euclidean (simply) or Lorentzian (pseudo)
/// space. The Lorentzian one uses the component rule
/// `(u2 v3 - u3 v2, u1 v3 - u3 v1, u1 v2 - u2 v1)`.
pub fn cross(u: IsoVector, v: IsoVector, sig: Signature) -> IsoVector {
    match sig {
        Signature::SimplyIsotropic => IsoVector::new(
            u.y * v.z - u.z * v.y,
            u.z * v.x - u.x * v.z,
            u.x * v.y - u.y * v.x,
        ),
        Signature::PseudoIsotropic => IsoVector::new(
            u.y * v.z - u.z * v.y,
            u.x * v.z - u.z * v.x,
            u.x * v.y - u.y * v.x,
        ),
    }
}

/// Ambient non-degenerate product paired with each isotropic space:
/// Euclidean `u1v1 + u2v2 + u3v3` or Lorentzian `u1v1 - u2v2 + u3v3`.
/// Second fundamental form coefficients are taken with this product.
#[inline]
pub fn ambient_dot(u: IsoVector, v: IsoVector, sig: Signature) -> f64 {
    u.x * v.x + sig.sigma() * u.y * v.y + u.z * v.z
}

/// Causal character from the exact sign of `<u,u>`.
///
/// Under the simply isotropic product every vector with a nonzero top view is
/// reported as spacelike and isotropic vectors as lightlike.
pub fn causal_character(u: IsoVector, sig: Signature) -> CausalCharacter {
    let q = dot(u, u, sig);
    if q > 0.0 {
        CausalCharacter::Spacelike
    } else if q < 0.0 {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Lightlike
    }
}
