use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Attractive pair potential of the mutual angle, with `V'(θ) > 0` on (0, π).
pub trait PairPotential: Send + Sync + Debug {
    fn value(&self, theta: f64) -> Result<f64>;
    fn derivative(&self, theta: f64) -> Result<f64>;
    fn label(&self) -> &'static str;
}

fn check_open(theta: f64, lo_ok: bool, hi_ok: bool) -> Result<()> {
    let eps = 1e-12;
    if !theta.is_finite() || (!lo_ok && theta <= eps) || (!hi_ok && theta >= std::f64::consts::PI - eps) {
        return Err(Error::Singular(format!("pair angle {theta}")));
    }
    Ok(())
}

/// `V = −cot θ`, singular at collisions and antipodes.
#[derive(Debug, Clone, Copy, Default)]
pub struct Cotangent;

impl PairPotential for Cotangent {
    fn value(&self, theta: f64) -> Result<f64> {
        check_open(theta, false, false)?;
        Ok(-theta.cos() / theta.sin())
    }
    fn derivative(&self, theta: f64) -> Result<f64> {
        check_open(theta, false, false)?;
        Ok(1.0 / theta.sin().powi(2))
    }
    fn label(&self) -> &'static str {
        "cot"
    }
}

/// `V = −1/θ`, singular only at collisions.
#[derive(Debug, Clone, Copy, Default)]
pub struct InverseAngle;

impl PairPotential for InverseAngle {
    fn value(&self, theta: f64) -> Result<f64> {
        check_open(theta, false, true)?;
        Ok(-1.0 / theta)
    }
    fn derivative(&self, theta: f64) -> Result<f64> {
        check_open(theta, false, true)?;
        Ok(1.0 / (theta * theta))
    }
    fn label(&self) -> &'static str {
        "inverse-angle"
    }
}

/// Serializable potential selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularPotential {
    #[default]
    #[serde(alias = "cotangent")]
    Cot,
    InverseAngle,
}

impl AngularPotential {
    pub fn build(self) -> Arc<dyn PairPotential> {
        match self {
            AngularPotential::Cot => Arc::new(Cotangent),
            AngularPotential::InverseAngle => Arc::new(InverseAngle),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cot" | "cotangent" => Ok(AngularPotential::Cot),
            "inverse-angle" | "inv" => Ok(AngularPotential::InverseAngle),
            other => Err(Error::Config(format!("unknown potential '{other}'"))),
        }
    }
}
