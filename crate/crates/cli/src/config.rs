//! Job configuration: one JSON file plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use isosurf_core::curve::CurveSpec;
use isosurf_core::prescribed::ProfileSpec;
use isosurf_core::{
    invariant_surface, Domain, GeneratingCurve, InvariantSurface, MotionSubgroup, Plane, Signature,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_OUT: &str = "isosurf-out";
pub const DEFAULT_MESH_GRID: [usize; 2] = [32, 32];

/// Subgroup parameters; anything omitted is zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Signature>,
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

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Prescribed K, helicoidal, curve in the non-isotropic plane.
    KHelicoidalNi,
    /// Prescribed K, helicoidal, curve in an isotropic plane.
    KHelicoidalI,
    /// Prescribed H, helicoidal, curve in an isotropic plane.
    HHelicoidalI,
    /// Prescribed K, parabolic revolution, curve in an isotropic plane.
    KParabolicI,
    /// Prescribed H, parabolic revolution, curve in an isotropic plane.
    HParabolicI,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_samples() -> usize {
    101
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub solver: SolverKind,
    pub profile: ProfileSpec,
    pub s_range: [f64; 2],
    /// Integration constants `(k0, k1)` or `(h0, h1)`.
    #[serde(default)]
    pub constants: [f64; 2],
    /// Causal sign of the curve where the solver needs one.
    #[serde(default = "one")]
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane: Option<Plane>,
    #[serde(default = "yes")]
    pub roundtrip: bool,
    /// Points written to the curve table.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub inject_sign_flip: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Signature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<SubgroupParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
}

/// Flag values; each one that is set replaces the config field.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid: Option<[usize; 2]>,
    pub tol: Option<f64>,
}

/// Parses `NxM` (also `N,M`).
pub fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s
        .split_once(['x', 'X', ','])
        .ok_or_else(|| format!("grid '{s}' is not of the form NxM"))?;
    let n = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|e| format!("grid '{s}': {e}"))
    };
    let g = [n(a)?, n(b)?];
    if g.iter().any(|&v| v < 2) {
        return Err(format!(
            "grid '{s}': resolution must be at least 2 per axis"
        ));
    }
    Ok(g)
}

impl JobConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        if let Some(g) = o.grid {
            self.grid = Some(g);
        }
        if let Some(t) = o.tol {
            self.tol = Some(t);
        }
    }

    /// Checks the fields every command shares.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(g) = self.grid {
            if g.iter().any(|&v| v < 2) {
                return Err(CliError::Config(format!(
                    "grid: resolution must be at least 2 per axis, got {}x{}",
                    g[0], g[1]
                )));
            }
        }
        if let Some(d) = &self.domain {
            if !d.is_valid() {
                return Err(CliError::Config(format!(
                    "domain: empty or non-finite rectangle u={:?} t={:?}",
                    d.u, d.t
                )));
            }
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!(
                    "tol: must be positive and finite, got {t}"
                )));
            }
        }
        if let (
            Some(a),
            Some(SubgroupParams {
                signature: Some(b), ..
            }),
        ) = (self.signature, self.subgroup)
        {
            if a != b {
                return Err(CliError::Config(format!(
                    "subgroup.signature: '{b}' conflicts with signature '{a}'"
                )));
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> Result<Signature, CliError> {
        self.signature
            .or(self.subgroup.and_then(|g| g.signature))
            .ok_or_else(|| CliError::Config("signature: missing".into()))
    }

    pub fn subgroup(&self) -> Result<MotionSubgroup, CliError> {
        let p = self
            .subgroup
            .ok_or_else(|| CliError::Config("subgroup: missing".into()))?;
        let g = MotionSubgroup::new(self.signature()?, p.phi, p.a, p.b, p.c, p.c1, p.c2);
        if !g.is_finite() {
            return Err(CliError::Config(
                "subgroup: parameters must be finite".into(),
            ));
        }
        Ok(g)
    }

    pub fn curve(&self) -> Result<GeneratingCurve, CliError> {
        let spec = self
            .curve
            .as_ref()
            .ok_or_else(|| CliError::Config("curve: missing".into()))?;
        GeneratingCurve::from_spec(spec).map_err(|e| CliError::Config(format!("curve: {e}")))
    }

    pub fn surface(&self) -> Result<InvariantSurface, CliError> {
        Ok(invariant_surface(self.curve()?, self.subgroup()?)?)
    }

    /// The configured rectangle, or the curve domain times `t in [-1, 1]`.
    pub fn domain_for(&self, curve: &GeneratingCurve) -> Domain {
        self.domain.unwrap_or(Domain {
            u: curve.domain,
            t: [-1.0, 1.0],
        })
    }

    pub fn grid_or(&self, default: [usize; 2]) -> [usize; 2] {
        self.grid.unwrap_or(default)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}
