use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use serde::{Deserialize, Serialize};

use crate::numeric::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdName {
    ThetaScal,
    ThetaIso,
    PhiScal,
    #[serde(rename = "Lsq_gyro")]
    LsqGyro,
}

impl ThresholdName {
    pub const ALL: [ThresholdName; 4] =
        [ThresholdName::ThetaScal, ThresholdName::ThetaIso, ThresholdName::PhiScal, ThresholdName::LsqGyro];

    pub fn label(self) -> &'static str {
        match self {
            ThresholdName::ThetaScal => "theta_scal",
            ThresholdName::ThetaIso => "theta_iso",
            ThresholdName::PhiScal => "phi_scal",
            ThresholdName::LsqGyro => "Lsq_gyro",
        }
    }

    /// Human-readable defining equation.
    pub fn equation(self) -> &'static str {
        match self {
            ThresholdName::ThetaScal => "32cos^6(t) - 2cos^2(t) - 1 = 0",
            ThresholdName::ThetaIso => "cos^4(t) - 1/8 = 0",
            ThresholdName::PhiScal => "sin(p) - 1/sqrt(10) = 0",
            ThresholdName::LsqGyro => "4 - sqrt(3) L^2 / 18 = 0",
        }
    }

    pub fn residual(self, v: f64) -> f64 {
        match self {
            ThresholdName::ThetaScal => {
                let c2 = v.cos().powi(2);
                32.0 * c2 * c2 * c2 - 2.0 * c2 - 1.0
            }
            ThresholdName::ThetaIso => v.cos().powi(4) - 0.125,
            ThresholdName::PhiScal => v.sin() - 0.1f64.sqrt(),
            // slope of V_L along the equilateral line at the equator
            ThresholdName::LsqGyro => 4.0 - 3f64.sqrt() * v / 18.0,
        }
    }

    fn bracket(self) -> (f64, f64) {
        match self {
            ThresholdName::ThetaScal | ThresholdName::ThetaIso => (0.8, 1.0),
            ThresholdName::PhiScal => (0.2, 0.5),
            ThresholdName::LsqGyro => (30.0, 50.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub name: ThresholdName,
    pub equation: &'static str,
    pub value: f64,
    pub residual: f64,
}

pub fn threshold(name: ThresholdName) -> Threshold {
    let (lo, hi) = name.bracket();
    let value = bisect(|v| name.residual(v), lo, hi, 1e-14).expect("threshold brackets change sign");
    Threshold { name, equation: name.equation(), value, residual: name.residual(value).abs() }
}

pub fn thresholds() -> Vec<Threshold> {
    ThresholdName::ALL.iter().map(|&n| threshold(n)).collect()
}

/// Parameter values where a family's signature is expected to change.
pub fn expected_transitions(family: super::ScanFamily) -> Vec<(String, f64)> {
    use super::ScanFamily;
    let v = |n: ThresholdName| threshold(n).value;
    match family {
        ScanFamily::Euler => vec![
            ("theta_scal".into(), v(ThresholdName::ThetaScal)),
            ("theta_iso".into(), v(ThresholdName::ThetaIso)),
            ("pi/3".into(), FRAC_PI_3),
            ("2pi/3".into(), 2.0 * FRAC_PI_3),
        ],
        ScanFamily::Lagrange => {
            let p = v(ThresholdName::PhiScal);
            vec![
                ("pi/2-phi_scal".into(), FRAC_PI_2 - p),
                ("pi/2".into(), FRAC_PI_2),
                ("pi/2+phi_scal".into(), FRAC_PI_2 + p),
            ]
        }
        ScanFamily::PlanarIii => vec![("Lsq_gyro".into(), v(ThresholdName::LsqGyro))],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_and_residuals() {
        let t = thresholds();
        assert!((t[0].value - 0.906).abs() < 5e-4);
        assert!((t[1].value - 0.934).abs() < 5e-4);
        assert!((t[1].value - 0.125f64.powf(0.25).acos()).abs() < 1e-12);
        assert!((t[2].value - (0.1f64.sqrt()).asin()).abs() < 1e-12);
        assert!((t[3].value - 24.0 * 3f64.sqrt()).abs() < 1e-10);
        assert!(t.iter().all(|t| t.residual < 1e-12));
    }
}
