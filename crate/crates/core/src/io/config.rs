//! Run configuration: a JSON object with the keys below (unknown keys are
//! rejected at every level).
//!
//! ```json
//! {
//!   "command": "web" | "classify" | "stability" | "verify",
//!   "model": {
//!     "id": "s3body" | "s2body" | "fullbody" | "triatomic" | "rubber-ball" | "ellipsoid",
//!     "potential": "cot" | "inverse-angle",
//!     "masses": [m1, m2] (s2body) or [m1, m2, m3] (triatomic),
//!     "moments": [I1, I2, I3] (fullbody),
//!     "rho": [rho1, rho2] (ellipsoid)
//!   },
//!   "lambda": 1.5,
//!   "family": "euler" | "lagrange" | "planar-iii",
//!   "range": [lo, hi],
//!   "grid": { "resolution": 64, "samples": 500 },
//!   "tolerances": { "boundary": 1e-7, "residual": 1e-8 },
//!   "output": { "dir": ".", "prefix": "web" },
//!   "seed": 1
//! }
//! ```
//!
//! Only `command` is required.  [`RunConfig::resolve`] fills every default
//! so the resolved value, written back out, reproduces the run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::AngularPotential;
use crate::stability::ScanFamily;

pub const MIN_RESOLUTION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Web,
    Classify,
    Stability,
    Verify,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::Web => "web",
            Command::Classify => "classify",
            Command::Stability => "stability",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ModelId {
    #[default]
    #[serde(rename = "s3body")]
    S3Body,
    #[serde(rename = "s2body")]
    S2Body,
    #[serde(rename = "fullbody")]
    FullBody,
    #[serde(rename = "triatomic")]
    Triatomic,
    #[serde(rename = "rubber-ball")]
    RubberBall,
    #[serde(rename = "ellipsoid")]
    Ellipsoid,
}

impl ModelId {
    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown model `{s}`")))
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelId::S3Body => "s3body",
            ModelId::S2Body => "s2body",
            ModelId::FullBody => "fullbody",
            ModelId::Triatomic => "triatomic",
            ModelId::RubberBall => "rubber-ball",
            ModelId::Ellipsoid => "ellipsoid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub id: ModelId,
    #[serde(default)]
    pub potential: AngularPotential,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Cells per axis of the leaf extraction grid.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Points per family curve or scan.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { resolution: default_resolution(), samples: default_samples() }
    }
}

fn default_resolution() -> usize {
    64
}

fn default_samples() -> usize {
    500
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Mesh clipping slack against the shape-space boundary.
    #[serde(default = "default_boundary")]
    pub boundary: f64,
    /// Largest collinearity residual a catalog record may carry.
    #[serde(default = "default_residual")]
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { boundary: default_boundary(), residual: default_residual() }
    }
}

fn default_boundary() -> f64 {
    crate::models::TAU_BD
}

fn default_residual() -> f64 {
    crate::re::RE_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    /// File stem; defaults to the command name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir(), prefix: None }
    }
}

fn default_dir() -> String {
    ".".into()
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<ScanFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            model: ModelConfig::default(),
            lambda: None,
            family: None,
            range: None,
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
            seed: default_seed(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn prefix(&self) -> &str {
        self.output.prefix.as_deref().unwrap_or(self.command.label())
    }

    /// Validated copy with every model- and command-dependent default filled.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = self.clone();
        let cfg = |m: String| Err(Error::Config(m));
        if c.grid.resolution < MIN_RESOLUTION {
            return cfg(format!("grid resolution {} below {MIN_RESOLUTION}", c.grid.resolution));
        }
        if c.grid.samples < MIN_RESOLUTION {
            return cfg(format!("sample count {} below {MIN_RESOLUTION}", c.grid.samples));
        }
        for (name, t) in [("boundary", c.tolerances.boundary), ("residual", c.tolerances.residual)] {
            if !(t > 0.0 && t.is_finite()) {
                return cfg(format!("tolerance `{name}` must be positive, got {t}"));
            }
        }
        if c.output.prefix.as_deref().is_some_and(|p| p.is_empty() || p.contains(['/', '\\'])) {
            return cfg("output prefix must be a plain file stem".into());
        }

        let id = c.model.id;
        let m = &mut c.model;
        match (id, m.masses.as_ref().map(Vec::len)) {
            (ModelId::S2Body, None) => m.masses = Some(vec![1.0, 1.0]),
            (ModelId::Triatomic, None) => m.masses = Some(vec![1.0, 1.0, 1.0]),
            (ModelId::S2Body, Some(2)) | (ModelId::Triatomic, Some(3)) => {}
            (ModelId::S2Body | ModelId::Triatomic, Some(n)) => {
                return cfg(format!("model {} takes {} masses, got {n}", id.label(), if id == ModelId::S2Body { 2 } else { 3 }))
            }
            (_, Some(_)) => return cfg(format!("model {} has no mass parameters", id.label())),
            _ => {}
        }
        if let Some(ms) = &m.masses {
            if ms.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return cfg("masses must be positive".into());
            }
        }
        match (id, m.moments) {
            (ModelId::FullBody, None) => m.moments = Some([1.0, 2.0, 3.0]),
            (ModelId::FullBody, Some(i)) if i.iter().any(|&v| !(v > 0.0 && v.is_finite())) => {
                return cfg("principal moments must be positive".into())
            }
            (ModelId::FullBody, _) | (_, None) => {}
            (_, Some(_)) => return cfg(format!("model {} has no principal moments", id.label())),
        }
        match (id, m.rho) {
            (ModelId::Ellipsoid, None) => m.rho = Some([3.0, 1.0]),
            (ModelId::Ellipsoid, Some(r)) if r.iter().any(|&v| !(v >= 0.0 && v.is_finite())) => {
                return cfg("orbit radii must be nonnegative".into())
            }
            (ModelId::Ellipsoid, _) | (_, None) => {}
            (_, Some(_)) => return cfg(format!("model {} has no orbit radii", id.label())),
        }

        match c.command {
            Command::Web => {
                match c.lambda {
                    None => return cfg("web needs a level `lambda`".into()),
                    Some(l) if !l.is_finite() => return cfg("lambda must be finite".into()),
                    _ => {}
                }
                if matches!(id, ModelId::S2Body | ModelId::Ellipsoid) {
                    return cfg(format!("web extraction is not available for model {}", id.label()));
                }
            }
            Command::Classify => {
                if !matches!(id, ModelId::S3Body | ModelId::S2Body | ModelId::Ellipsoid) {
                    return cfg(format!("classify supports s3body, s2body and ellipsoid, not {}", id.label()));
                }
            }
            Command::Stability => {
                if id != ModelId::S3Body {
                    return cfg("stability scans are defined for the s3body model".into());
                }
                let fam = match c.family {
                    Some(f) => f,
                    None => return cfg("stability needs a `family`".into()),
                };
                let dom = fam.domain();
                let r = c.range.unwrap_or(dom);
                if !(r[0] < r[1] && r[0].is_finite() && r[1].is_finite()) {
                    return cfg(format!("range [{}, {}] is empty", r[0], r[1]));
                }
                if fam != ScanFamily::PlanarIii && (r[0] < dom[0] || r[1] > dom[1]) {
                    return cfg(format!("range outside the {} domain [{}, {}]", fam.label(), dom[0], dom[1]));
                }
                if fam == ScanFamily::PlanarIii && r[0] <= 0.0 {
                    return cfg("planar-iii range must have positive |L|^2".into());
                }
                c.range = Some(r);
            }
            Command::Verify => {}
        }
        if c.command != Command::Web && c.lambda.is_some() {
            return cfg(format!("`lambda` does not apply to {}", c.command.label()));
        }
        if c.command != Command::Stability && (c.family.is_some() || c.range.is_some()) {
            return cfg(format!("`family`/`range` do not apply to {}", c.command.label()));
        }
        if c.output.prefix.is_none() {
            c.output.prefix = Some(c.command.label().to_string());
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_json(r#"{"command":"web","lambda":1.5,"colour":"red"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"command":"web","model":{"id":"s3body","mass":1}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"command":"web","grid":{"res":20}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"command":"web","lambda":1.5}"#).is_ok());
    }

    #[test]
    fn invariants_enforced() {
        let mut c = RunConfig::new(Command::Web);
        assert!(c.resolve().is_err());
        c.lambda = Some(1.5);
        assert!(c.resolve().is_ok());
        c.grid.resolution = 15;
        assert!(c.resolve().is_err());
        c.grid.resolution = 16;
        c.tolerances.boundary = 0.0;
        assert!(c.resolve().is_err());
        c.tolerances.boundary = 1e-7;
        c.model.moments = Some([1.0, 2.0, 3.0]);
        assert!(c.resolve().is_err());
        c.model.id = ModelId::FullBody;
        assert!(c.resolve().is_ok());
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut c = RunConfig::new(Command::Stability);
        c.family = Some(ScanFamily::PlanarIii);
        let r = c.resolve().unwrap();
        assert_eq!(r.range, Some([10.0, 80.0]));
        assert_eq!(r.prefix(), "stability");
        let back = RunConfig::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.resolve().unwrap(), r);
    }

    #[test]
    fn model_defaults() {
        let mut c = RunConfig::new(Command::Classify);
        c.model.id = ModelId::S2Body;
        assert_eq!(c.resolve().unwrap().model.masses, Some(vec![1.0, 1.0]));
        c.model.masses = Some(vec![1.0, 1.0, 1.0]);
        assert!(c.resolve().is_err());
        c.model = ModelConfig { id: ModelId::Ellipsoid, ..Default::default() };
        assert_eq!(c.resolve().unwrap().model.rho, Some([3.0, 1.0]));
        assert_eq!(ModelId::parse("rubber-ball").unwrap(), ModelId::RubberBall);
        assert!(ModelId::parse("s4body").is_err());
    }
}
