use serde::{Deserialize, Serialize};

use super::ModelSystem;
use crate::error::{Error, Result};
use crate::lie::SymTensor;

/// Potential of a point satellite around a rigid body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FullBodyPotential {
    /// `−μ/|x|`
    Kepler { mu: f64 },
    /// `−μ/|x − d e3|`: symmetric in the planes x1 = 0 and x2 = 0 only.
    OffsetPoint { mu: f64, offset: f64 },
}

impl Default for FullBodyPotential {
    fn default() -> Self {
        FullBodyPotential::Kepler { mu: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullBodySatellite {
    pub moments: [f64; 3],
    pub potential: FullBodyPotential,
    pub body_radius: f64,
}

impl FullBodySatellite {
    pub fn new(moments: [f64; 3]) -> Result<Self> {
        if !(moments[0] > 0.0 && moments[0] < moments[1] && moments[1] < moments[2]) {
            return Err(Error::Config("principal moments must satisfy 0 < I1 < I2 < I3".into()));
        }
        Ok(FullBodySatellite { moments, potential: FullBodyPotential::default(), body_radius: 0.25 })
    }

    /// `det(λI − 𝕀_x)` written through d_j = λ − I_j − |x|².
    pub fn implicit(&self, x: &[f64], lambda: f64) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let d: Vec<f64> = (0..3).map(|j| lambda - self.moments[j] - r2).collect();
        d[0] * d[1] * d[2]
            + x[0] * x[0] * d[1] * d[2]
            + x[1] * x[1] * d[0] * d[2]
            + x[2] * x[2] * d[0] * d[1]
    }
}

/// Conic in the principal plane x_m = 0 where two eigenvalues coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RepeatedCurve {
    /// x_k = a cos t, x_l = b sin t
    Ellipse { m: usize, k: usize, l: usize, a: f64, b: f64 },
    /// x_l = ±b cosh t, x_k = a sinh t
    Hyperbola { m: usize, k: usize, l: usize, a: f64, b: f64 },
}

impl RepeatedCurve {
    /// Points at parameter t; the hyperbola yields both branches.
    pub fn points(&self, t: f64) -> Vec<[f64; 3]> {
        match *self {
            RepeatedCurve::Ellipse { k, l, a, b, .. } => {
                let mut p = [0.0; 3];
                p[k] = a * t.cos();
                p[l] = b * t.sin();
                vec![p]
            }
            RepeatedCurve::Hyperbola { k, l, a, b, .. } => {
                let mut p = [0.0; 3];
                p[k] = a * t.sinh();
                p[l] = b * t.cosh();
                let mut q = p;
                q[l] = -q[l];
                vec![p, q]
            }
        }
    }

    /// Residual of the defining conic at a point.
    pub fn conic_residual(&self, x: &[f64; 3]) -> f64 {
        match *self {
            RepeatedCurve::Ellipse { m, k, l, a, b } => {
                (x[k] / a).powi(2) + (x[l] / b).powi(2) - 1.0 + x[m].abs()
            }
            RepeatedCurve::Hyperbola { m, k, l, a, b } => {
                (x[l] / b).powi(2) - (x[k] / a).powi(2) - 1.0 + x[m].abs()
            }
        }
    }
}

/// The repeated-eigenvalue conic in plane x_m = 0 (m zero-based), if any.
pub fn fullbody_repeated_curves(moments: [f64; 3], m: usize) -> Option<RepeatedCurve> {
    let others: Vec<usize> = (0..3).filter(|&i| i != m).collect();
    let (k, l) = (others[0], others[1]);
    let (dk, dl) = (moments[k] - moments[m], moments[l] - moments[m]);
    match (dk > 0.0, dl > 0.0) {
        (true, true) => Some(RepeatedCurve::Ellipse { m, k, l, a: dk.sqrt(), b: dl.sqrt() }),
        (false, true) => Some(RepeatedCurve::Hyperbola { m, k, l, a: (-dk).sqrt(), b: dl.sqrt() }),
        (true, false) => Some(RepeatedCurve::Hyperbola { m, k: l, l: k, a: (-dl).sqrt(), b: dk.sqrt() }),
        (false, false) => None,
    }
}

impl FullBodySatellite {
    pub fn repeated_curve(&self, m: usize) -> Option<RepeatedCurve> {
        fullbody_repeated_curves(self.moments, m)
    }
}

impl ModelSystem for FullBodySatellite {
    fn name(&self) -> &str {
        "fullbody"
    }

    fn chart_dim(&self) -> usize {
        3
    }

    fn domain_test(&self, x: &[f64]) -> bool {
        x.iter().map(|v| v * v).sum::<f64>() > self.body_radius * self.body_radius
    }

    fn inertia(&self, x: &[f64]) -> Result<SymTensor> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let mut s = SymTensor::zeros(3);
        for i in 0..3 {
            for j in 0..=i {
                let mut v = -x[i] * x[j];
                if i == j {
                    v += self.moments[i] + r2;
                }
                s.set(i, j, v);
            }
        }
        Ok(s)
    }

    fn inertia_partials(&self, x: &[f64]) -> Result<Vec<SymTensor>> {
        Ok((0..3)
            .map(|k| {
                let mut s = SymTensor::zeros(3);
                for i in 0..3 {
                    for j in 0..=i {
                        let mut v = 0.0;
                        if i == j {
                            v += 2.0 * x[k];
                        }
                        if i == k {
                            v -= x[j];
                        }
                        if j == k {
                            v -= x[i];
                        }
                        s.set(i, j, v);
                    }
                }
                s
            })
            .collect())
    }

    fn potential(&self, x: &[f64]) -> Result<f64> {
        let (mu, c) = match self.potential {
            FullBodyPotential::Kepler { mu } => (mu, [0.0; 3]),
            FullBodyPotential::OffsetPoint { mu, offset } => (mu, [0.0, 0.0, offset]),
        };
        let r = ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2)).sqrt();
        if r <= 1e-12 {
            return Err(Error::Singular("satellite at the attracting centre".into()));
        }
        Ok(-mu / r)
    }

    fn grad_potential(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (mu, c) = match self.potential {
            FullBodyPotential::Kepler { mu } => (mu, [0.0; 3]),
            FullBodyPotential::OffsetPoint { mu, offset } => (mu, [0.0, 0.0, offset]),
        };
        let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if r <= 1e-12 {
            return Err(Error::Singular("satellite at the attracting centre".into()));
        }
        Ok(d.iter().map(|v| mu * v / r.powi(3)).collect())
    }

    fn boundary_value(&self, x: &[f64]) -> Option<f64> {
        Some(x.iter().map(|v| v * v).sum::<f64>() - self.body_radius * self.body_radius)
    }
}
