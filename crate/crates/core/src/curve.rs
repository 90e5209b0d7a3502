//! Planar generating curves with value, first and second derivative access.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{IsoError, Result};
use crate::metric::{IsoVector, Signature};

/// Plane that carries a generating curve. `XY` is the non-isotropic plane;
/// `XZ` and `YZ` contain the isotropic direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Plane {
    #[serde(rename = "xy", alias = "XY")]
    XY,
    #[serde(rename = "xz", alias = "XZ")]
    XZ,
    #[serde(rename = "yz", alias = "YZ")]
    YZ,
}

impl Plane {
    pub fn is_isotropic(self) -> bool {
        !matches!(self, Plane::XY)
    }

    pub fn allowed_in(self, sig: Signature) -> bool {
        !(self == Plane::YZ && sig == Signature::SimplyIsotropic)
    }

    /// Causal sign of an arc-length curve in an isotropic plane under the
    /// pseudo-isotropic product: +1 in `xz`, -1 in `yz`.
    pub fn causal_sign(self) -> f64 {
        if self == Plane::YZ {
            -1.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Plane::XY => "xy",
            Plane::XZ => "xz",
            Plane::YZ => "yz",
        })
    }
}

type JetFn = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;
type ValueFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function of the curve parameter.
#[derive(Clone)]
pub enum CurveFn {
    /// Polynomial with ascending coefficients.
    Poly(Vec<f64>),
    /// `amp * cos(freq * u + phase)`.
    Cos {
        amp: f64,
        freq: f64,
        phase: f64,
    },
    /// `amp * sin(freq * u + phase)`.
    Sin {
        amp: f64,
        freq: f64,
        phase: f64,
    },
    /// `amp * cosh(freq * u)`.
    Cosh {
        amp: f64,
        freq: f64,
    },
    /// `amp * sinh(freq * u)`.
    Sinh {
        amp: f64,
        freq: f64,
    },
    Sum(Vec<CurveFn>),
    /// Closure returning value, first and second derivative.
    Jet(JetFn),
    /// Value-only closure; derivatives by central differences.
    Value(ValueFn),
}

impl fmt::Debug for CurveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveFn::Poly(c) => write!(f, "Poly({c:?})"),
            CurveFn::Cos { amp, freq, phase } => write!(f, "{amp}*cos({freq}u+{phase})"),
            CurveFn::Sin { amp, freq, phase } => write!(f, "{amp}*sin({freq}u+{phase})"),
            CurveFn::Cosh { amp, freq } => write!(f, "{amp}*cosh({freq}u)"),
            CurveFn::Sinh { amp, freq } => write!(f, "{amp}*sinh({freq}u)"),
            CurveFn::Sum(v) => f.debug_list().entries(v).finish(),
            CurveFn::Jet(_) => f.write_str("Jet(..)"),
            CurveFn::Value(_) => f.write_str("Value(..)"),
        }
    }
}

impl CurveFn {
    pub fn constant(v: f64) -> Self {
        CurveFn::Poly(vec![v])
    }

    pub fn linear(v0: f64, slope: f64) -> Self {
        CurveFn::Poly(vec![v0, slope])
    }

    pub fn jet_fn(f: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        CurveFn::Jet(Arc::new(f))
    }

    pub fn value_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        CurveFn::Value(Arc::new(f))
    }

    /// Value, first and second derivative at `u`.
    pub fn jet(&self, u: f64) -> [f64; 3] {
        match self {
            CurveFn::Poly(c) => {
                let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
                for &a in c.iter().rev() {
                    d2 = d2 * u + 2.0 * d1;
                    d1 = d1 * u + v;
                    v = v * u + a;
                }
                [v, d1, d2]
            }
            CurveFn::Cos { amp, freq, phase } => {
                let (s, c) = (freq * u + phase).sin_cos();
                [amp * c, -amp * freq * s, -amp * freq * freq * c]
            }
            CurveFn::Sin { amp, freq, phase } => {
                let (s, c) = (freq * u + phase).sin_cos();
                [amp * s, amp * freq * c, -amp * freq * freq * s]
            }
            CurveFn::Cosh { amp, freq } => {
                let (s, c) = ((freq * u).sinh(), (freq * u).cosh());
                [amp * c, amp * freq * s, amp * freq * freq * c]
            }
            CurveFn::Sinh { amp, freq } => {
                let (s, c) = ((freq * u).sinh(), (freq * u).cosh());
                [amp * s, amp * freq * c, amp * freq * freq * s]
            }
            CurveFn::Sum(parts) => parts.iter().fold([0.0; 3], |acc, p| {
                let j = p.jet(u);
                [acc[0] + j[0], acc[1] + j[1], acc[2] + j[2]]
            }),
            CurveFn::Jet(f) => f(u),
            CurveFn::Value(f) => {
                let h = f64::EPSILON.cbrt() * u.abs().max(1.0);
                let (lo, mid, hi) = (f(u - h), f(u), f(u + h));
                [mid, (hi - lo) / (2.0 * h), (hi - 2.0 * mid + lo) / (h * h)]
            }
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        self.jet(u)[0]
    }
}

/// A curve in one of the three coordinate planes. `f` and `g` are the two
/// nonzero coordinates in plane order: `(f, g, 0)`, `(f, 0, g)` or
/// `(0, f, g)`.
#[derive(Clone, Debug)]
pub struct GeneratingCurve {
    pub plane: Plane,
    pub f: CurveFn,
    pub g: CurveFn,
    /// Parameter interval used when a routine needs curve samples.
    pub domain: [f64; 2],
}

impl GeneratingCurve {
    pub fn new(plane: Plane, f: CurveFn, g: CurveFn) -> Self {
        Self {
            plane,
            f,
            g,
            domain: [0.0, 1.0],
        }
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = [lo, hi];
        self
    }

    fn embed(&self, a: f64, b: f64) -> IsoVector {
        match self.plane {
            Plane::XY => IsoVector::new(a, b, 0.0),
            Plane::XZ => IsoVector::new(a, 0.0, b),
            Plane::YZ => IsoVector::new(0.0, a, b),
        }
    }

    /// Point, first and second derivative in R^3.
    pub fn jet(&self, u: f64) -> [IsoVector; 3] {
        let (f, g) = (self.f.jet(u), self.g.jet(u));
        [
            self.embed(f[0], g[0]),
            self.embed(f[1], g[1]),
            self.embed(f[2], g[2]),
        ]
    }

    pub fn point(&self, u: f64) -> IsoVector {
        self.jet(u)[0]
    }

    /// `n` evenly spaced parameters across the sampling domain.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let [lo, hi] = self.domain;
        if n <= 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// Straight line `p0 + u * dir` in plane coordinates.
    pub fn line(plane: Plane, p0: [f64; 2], dir: [f64; 2]) -> Self {
        Self::new(
            plane,
            CurveFn::linear(p0[0], dir[0]),
            CurveFn::linear(p0[1], dir[1]),
        )
    }

    /// Circle of radius `r` about `center`.
    pub fn circle(plane: Plane, r: f64, center: [f64; 2]) -> Self {
        Self::new(
            plane,
            CurveFn::Sum(vec![
                CurveFn::constant(center[0]),
                CurveFn::Cos {
                    amp: r,
                    freq: 1.0,
                    phase: 0.0,
                },
            ]),
            CurveFn::Sum(vec![
                CurveFn::constant(center[1]),
                CurveFn::Sin {
                    amp: r,
                    freq: 1.0,
                    phase: 0.0,
                },
            ]),
        )
        .with_domain(0.0, std::f64::consts::TAU)
    }

    /// Hyperbola branch `(r cosh u, r sinh u)` shifted by `center`.
    pub fn hyperbola(plane: Plane, r: f64, center: [f64; 2]) -> Self {
        Self::new(
            plane,
            CurveFn::Sum(vec![
                CurveFn::constant(center[0]),
                CurveFn::Cosh { amp: r, freq: 1.0 },
            ]),
            CurveFn::Sum(vec![
                CurveFn::constant(center[1]),
                CurveFn::Sinh { amp: r, freq: 1.0 },
            ]),
        )
        .with_domain(-1.0, 1.0)
    }

    /// The isotropic circle `(p u, p u^2 / 2)`.
    pub fn parabola(plane: Plane, p: f64) -> Self {
        Self::new(
            plane,
            CurveFn::Poly(vec![0.0, p]),
            CurveFn::Poly(vec![0.0, 0.0, p / 2.0]),
        )
        .with_domain(-1.0, 1.0)
    }

    /// Graph `(u, sum c_k u^k)`.
    pub fn poly_graph(plane: Plane, coeffs: Vec<f64>) -> Self {
        Self::new(plane, CurveFn::Poly(vec![0.0, 1.0]), CurveFn::Poly(coeffs))
    }

    /// Builds a curve from a textual spec.
    pub fn from_spec(spec: &CurveSpec) -> Result<Self> {
        let p = &spec.params;
        let need = |n: usize| {
            if p.len() < n {
                Err(IsoError::InvalidInput(format!(
                    "curve kind '{}' needs at least {n} params, got {}",
                    spec.kind,
                    p.len()
                )))
            } else {
                Ok(())
            }
        };
        let center = |i: usize| {
            [
                p.get(i).copied().unwrap_or(0.0),
                p.get(i + 1).copied().unwrap_or(0.0),
            ]
        };
        let mut curve = match spec.kind.as_str() {
            "line" => {
                need(4)?;
                Self::line(spec.plane, [p[0], p[1]], [p[2], p[3]])
            }
            "circle" => {
                need(1)?;
                Self::circle(spec.plane, p[0], center(1))
            }
            "hyperbola" => {
                need(1)?;
                Self::hyperbola(spec.plane, p[0], center(1))
            }
            "parabola" => {
                need(1)?;
                Self::parabola(spec.plane, p[0])
            }
            "poly" => {
                need(1)?;
                Self::poly_graph(spec.plane, p.clone())
            }
            other => {
                return Err(IsoError::InvalidInput(format!(
                "unknown curve kind '{other}' (expected line, circle, parabola, hyperbola or poly)"
            )))
            }
        };
        if let Some(d) = spec.domain {
            curve.domain = d;
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(IsoError::InvalidInput("curve params must be finite".into()));
        }
        Ok(curve)
    }
}

/// Serializable curve description: `{"plane", "kind", "params"}`.
///
/// Kinds and params:
/// `line [f0, g0, df, dg]`, `circle [r, cf?, cg?]`, `hyperbola [r, cf?, cg?]`,
/// `parabola [p]`, `poly [c0, c1, ...]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub plane: Plane,
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
}
