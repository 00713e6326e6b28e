//! Domain files and job parameters.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use billiard_core::{BoundaryCurve, CurvatureProfile};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    /// `toml` already reports the line and column of the offending key.
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Domain { path: PathBuf, source: billiard_core::Error },
    #[error("invalid job parameter: {0}")]
    Job(String),
}

/// A domain file.
///
/// ```toml
/// name = "perturbed-m2"
/// cos_coeffs = [1.0, 0.0, 0.05]   # a0, a1, a2, ...
/// sin_coeffs = [0.0, 0.0]         # b1, b2, ...
/// n_samples = 512
/// # preset = "ellipse"             # replaces the coefficients
/// # axis_ratio = 0.5
/// # rotation = 0.0                 # radians
/// ```
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub name: Option<String>,
    #[serde(default)]
    pub cos_coeffs: Vec<f64>,
    #[serde(default)]
    pub sin_coeffs: Vec<f64>,
    pub n_samples: usize,
    pub preset: Option<String>,
    pub axis_ratio: Option<f64>,
    #[serde(default)]
    pub rotation: f64,
}

/// A parsed domain together with the built boundary.
#[derive(Clone, Debug)]
pub struct Domain {
    pub name: String,
    pub spec: DomainSpec,
    pub profile: CurvatureProfile,
    pub curve: BoundaryCurve,
    /// Sup-norm truncation error of a preset, when known.
    pub truncation_error: Option<f64>,
}

impl Domain {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let spec: DomainSpec =
            toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        let invalid = |message: &str| ConfigError::Invalid { path: path.to_path_buf(), message: message.to_string() };
        let domain_err = |source| ConfigError::Domain { path: path.to_path_buf(), source };
        let (profile, truncation_error) = match spec.preset.as_deref() {
            None => {
                if spec.cos_coeffs.is_empty() {
                    return Err(invalid("cos_coeffs is required without a preset"));
                }
                (CurvatureProfile::new(spec.cos_coeffs.clone(), spec.sin_coeffs.clone()).map_err(domain_err)?, None)
            }
            Some("circle") => (CurvatureProfile::circle(), None),
            Some("ellipse") => {
                let ratio = spec.axis_ratio.ok_or_else(|| invalid("preset \"ellipse\" needs axis_ratio"))?;
                let t = CurvatureProfile::ellipse_truncated(ratio, billiard_core::geometry::ELLIPSE_HARMONICS)
                    .map_err(domain_err)?;
                (t.profile, Some(t.truncation_error))
            }
            Some(other) => return Err(invalid(&format!("unknown preset {other:?} (expected \"circle\" or \"ellipse\")"))),
        };
        if !spec.rotation.is_finite() {
            return Err(invalid("rotation must be finite"));
        }
        let profile = if spec.rotation != 0.0 { profile.rotated(spec.rotation) } else { profile };
        let curve = BoundaryCurve::build(&profile, spec.n_samples).map_err(domain_err)?;
        let name = spec.name.clone().unwrap_or_else(|| {
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "domain".into())
        });
        Ok(Self { name, spec, profile, curve, truncation_error })
    }

    /// Only the constant harmonic is present.
    pub fn is_circle(&self) -> bool {
        let p = &self.profile;
        p.cos_coeffs()[1..].iter().chain(p.sin_coeffs()).all(|c| *c == 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Backend {
    Float,
    Rational,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Float => "float",
            Backend::Rational => "rational",
        })
    }
}

/// Parameters shared by every verb.
#[derive(Clone, Debug)]
pub struct Job {
    pub q_max: i64,
    /// Highest odd degree of the β expansion and of `ζ`.
    pub order: usize,
    /// Entrywise tolerance for spectrum comparison.
    pub tol: f64,
    /// Files go here; `None` sends tables to stdout.
    pub out_dir: Option<PathBuf>,
    /// Worker threads; zero picks the number of cores.
    pub jobs: usize,
    pub backend: Backend,
}

impl Default for Job {
    fn default() -> Self {
        Self { q_max: 20, order: 5, tol: 1e-8, out_dir: None, jobs: 0, backend: Backend::Float }
    }
}

impl Job {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.q_max < 2 {
            return Err(ConfigError::Job(format!("q_max must be at least 2, got {}", self.q_max)));
        }
        if self.order < 3 || self.order.is_multiple_of(2) {
            return Err(ConfigError::Job(format!("order must be odd and at least 3, got {}", self.order)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ConfigError::Job(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}
