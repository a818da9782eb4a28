use serde::{Deserialize, Serialize};

use super::ModelSystem;
use crate::error::{Error, Result};
use crate::lie::{bracket_so3xso3, SymTensor, Vec3};

/// Self-gravitating ellipsoid with internal vorticity; chart is the singular
/// values x1, x2, x3 > 0 with x1x2x3 = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannEllipsoid {
    pub rho1: f64,
    pub rho2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum SolutionKind {
    /// ω and ξ both along e_k; `sign` is the relative orientation of ξ.
    S { k: usize, sign: i8 },
    /// ω and ξ in the plane orthogonal to e_k with multipliers (u±, u∓).
    R { k: usize, plus: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidSolution {
    pub kind: SolutionKind,
    pub omega: Vec3,
    pub xi: Vec3,
    /// Multipliers with Aω + Bξ = sω and Bω + Aξ = tξ.
    pub s: f64,
    pub t: f64,
}

fn others(k: usize) -> (usize, usize) {
    let o: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    (o[0], o[1])
}

impl RiemannEllipsoid {
    pub fn new(rho1: f64, rho2: f64) -> Result<Self> {
        if !(rho1 >= 0.0 && rho2 >= 0.0) {
            return Err(Error::Config("orbit radii must be nonnegative".into()));
        }
        Ok(RiemannEllipsoid { rho1, rho2 })
    }

    pub fn check_shape(x: &[f64]) -> Result<()> {
        if x.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Domain(format!("{x:?}: singular values must be positive")));
        }
        for i in 0..3 {
            for j in 0..i {
                if (x[i] - x[j]).abs() <= 1e-9 * (x[i].abs() + x[j].abs()) {
                    return Err(Error::DegenerateShape(format!("{x:?}: coinciding singular values")));
                }
            }
        }
        Ok(())
    }

    pub fn a(x: &[f64]) -> [f64; 3] {
        [x[1] * x[1] + x[2] * x[2], x[0] * x[0] + x[2] * x[2], x[0] * x[0] + x[1] * x[1]]
    }

    pub fn b(x: &[f64]) -> [f64; 3] {
        [-2.0 * x[1] * x[2], -2.0 * x[0] * x[2], -2.0 * x[0] * x[1]]
    }

    pub fn d(x: &[f64], k: usize) -> f64 {
        let (l, m) = others(k);
        let (xk, xl, xm) = (x[k], x[l], x[m]);
        (2.0 * xk - xl - xm) * (2.0 * xk + xl - xm) * (2.0 * xk - xl + xm) * (2.0 * xk + xl + xm)
    }

    pub fn sigma(x: &[f64], k: usize) -> f64 {
        let (l, m) = others(k);
        x[l] * x[l] + x[m] * x[m] - 2.0 * x[k] * x[k]
    }

    /// (u+, u−) when D ≥ 0.
    pub fn multipliers(x: &[f64], k: usize) -> Option<(f64, f64)> {
        let d = Self::d(x, k);
        if d < 0.0 {
            return None;
        }
        let s = Self::sigma(x, k);
        Some((0.5 * (s + d.sqrt()), 0.5 * (s - d.sqrt())))
    }

    pub fn inertia_block(x: &[f64]) -> SymTensor {
        SymTensor::block_ab(&Self::a(x), &Self::b(x))
    }

    /// ‖[(ω,ξ), 𝕀(ω,ξ)]‖.
    pub fn bracket_residual(x: &[f64], omega: &Vec3, xi: &Vec3) -> f64 {
        let v = [omega[0], omega[1], omega[2], xi[0], xi[1], xi[2]];
        let iv = Self::inertia_block(x).mul_vec(&v);
        let (p, q) = bracket_so3xso3(&(*omega, *xi), &([iv[0], iv[1], iv[2]], [iv[3], iv[4], iv[5]]));
        (p.iter().chain(q.iter()).map(|c| c * c).sum::<f64>()).sqrt()
    }

    /// Semi-axes of the image ellipse of |ω| = ρ1 under ω ↦ ξ, for branch u.
    fn semi_axes(&self, x: &[f64], k: usize, u: f64) -> (f64, f64) {
        let (l, m) = others(k);
        let (a, b) = (Self::a(x), Self::b(x));
        (self.rho1 * ((u - a[l]) / b[l]).abs(), self.rho1 * ((u - a[m]) / b[m]).abs())
    }

    /// Membership of x in the region R±_k (closed).
    pub fn region_test(&self, x: &[f64], k: usize, plus: bool) -> Result<bool> {
        Self::check_shape(x)?;
        let (up, um) = match Self::multipliers(x, k) {
            Some(u) => u,
            None => return Ok(false),
        };
        let (p, q) = self.semi_axes(x, k, if plus { up } else { um });
        let (lo, hi) = (p.min(q), p.max(q));
        let tol = 1e-12 * (1.0 + hi);
        Ok(self.rho2 >= lo - tol && self.rho2 <= hi + tol)
    }

    /// All Type S and Type R solutions about axis k.
    pub fn solutions(&self, x: &[f64], k: usize) -> Result<Vec<EllipsoidSolution>> {
        Self::check_shape(x)?;
        let (a, b) = (Self::a(x), Self::b(x));
        let mut out = Vec::new();
        for sign in [1i8, -1] {
            let mut omega = [0.0; 3];
            let mut xi = [0.0; 3];
            omega[k] = self.rho1;
            xi[k] = sign as f64 * self.rho2;
            let (s, t) = if self.rho1 > 0.0 && self.rho2 > 0.0 {
                (a[k] + b[k] * xi[k] / omega[k], a[k] + b[k] * omega[k] / xi[k])
            } else {
                (a[k], a[k])
            };
            out.push(EllipsoidSolution { kind: SolutionKind::S { k, sign }, omega, xi, s, t });
        }
        let Some((up, um)) = Self::multipliers(x, k) else {
            return Ok(out);
        };
        let (l, m) = others(k);
        for (plus, s, t) in [(true, up, um), (false, um, up)] {
            let cl = (s - a[l]) / b[l];
            let cm = (s - a[m]) / b[m];
            if self.rho1 == 0.0 {
                continue;
            }
            let r = (self.rho2 / self.rho1).powi(2);
            let den = cl * cl - cm * cm;
            let c2 = if den.abs() < 1e-300 {
                if (r - cl * cl).abs() < 1e-12 {
                    0.5
                } else {
                    continue;
                }
            } else {
                (r - cm * cm) / den
            };
            if !(-1e-12..=1.0 + 1e-12).contains(&c2) {
                continue;
            }
            let c = c2.clamp(0.0, 1.0).sqrt();
            let sn = (1.0 - c2).clamp(0.0, 1.0).sqrt();
            let mut seen: Vec<(f64, f64)> = Vec::new();
            for (pc, ps) in [(c, sn), (c, -sn), (-c, sn), (-c, -sn)] {
                if seen.iter().any(|&(u, v)| (u - pc).abs() < 1e-15 && (v - ps).abs() < 1e-15) {
                    continue;
                }
                seen.push((pc, ps));
                let mut omega = [0.0; 3];
                omega[l] = self.rho1 * pc;
                omega[m] = self.rho1 * ps;
                let mut xi = [0.0; 3];
                xi[l] = cl * omega[l];
                xi[m] = cm * omega[m];
                out.push(EllipsoidSolution { kind: SolutionKind::R { k, plus }, omega, xi, s, t });
            }
        }
        Ok(out)
    }

    /// Type S web value ⟨𝕀(ω,ξ),(ω,ξ)⟩ = (ρ1²+ρ2²)(x_l²+x_m²) ∓ 4ρ1ρ2 x_l x_m.
    pub fn web_s(&self, x: &[f64], k: usize, sign: i8) -> f64 {
        let (l, m) = others(k);
        (self.rho1.powi(2) + self.rho2.powi(2)) * (x[l] * x[l] + x[m] * x[m])
            - sign as f64 * 4.0 * self.rho1 * self.rho2 * x[l] * x[m]
    }

    /// Type R web value u±ρ1² + u∓ρ2², or None outside D ≥ 0.
    pub fn web_r(&self, x: &[f64], k: usize, plus: bool) -> Option<f64> {
        let d = Self::d(x, k);
        if d < 0.0 {
            return None;
        }
        let sg = if plus { 1.0 } else { -1.0 };
        let (r1, r2) = (self.rho1.powi(2), self.rho2.powi(2));
        Some(0.5 * Self::sigma(x, k) * (r1 + r2) + sg * 0.5 * d.sqrt() * (r1 - r2))
    }

    /// Embedding of log-coordinates (z1, z2) of the plane ∑ log x = 0.
    pub fn shape_from_plane(z: [f64; 2]) -> [f64; 3] {
        let s6 = 6f64.sqrt();
        let s2 = 2f64.sqrt();
        let l = [2.0 * z[0] / s6, -z[0] / s6 + z[1] / s2, -z[0] / s6 - z[1] / s2];
        [l[0].exp(), l[1].exp(), l[2].exp()]
    }
}

impl ModelSystem for RiemannEllipsoid {
    fn name(&self) -> &str {
        "ellipsoid"
    }

    fn chart_dim(&self) -> usize {
        3
    }

    fn domain_test(&self, x: &[f64]) -> bool {
        x.iter().all(|&v| v > 0.0) && ((x[0] * x[1] * x[2]) - 1.0).abs() < 1e-9
    }

    fn inertia(&self, x: &[f64]) -> Result<SymTensor> {
        if x.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Domain(format!("{x:?}")));
        }
        Ok(Self::inertia_block(x))
    }

    fn potential(&self, _x: &[f64]) -> Result<f64> {
        Err(Error::Unsupported("ellipsoid self-gravity potential is not modelled".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let x = [2.0, 1.0, 0.5];
        let d = RiemannEllipsoid::d(&x, 0);
        assert!((d - 216.5625).abs() < 1e-12);
        assert!((RiemannEllipsoid::sigma(&x, 0) + 6.75).abs() < 1e-14);
        let (up, um) = RiemannEllipsoid::multipliers(&x, 0).unwrap();
        assert!((up - 0.5 * (-6.75 + d.sqrt())).abs() < 1e-14);
        assert!((um - 0.5 * (-6.75 - d.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn solutions_satisfy_bracket() {
        let e = RiemannEllipsoid::new(3.0, 1.0).unwrap();
        let x = [2.0, 1.0, 0.5];
        for k in 0..3 {
            for s in e.solutions(&x, k).unwrap() {
                let r = RiemannEllipsoid::bracket_residual(&x, &s.omega, &s.xi);
                assert!(r < 1e-9, "{s:?} {r}");
                if let SolutionKind::S { .. } = s.kind {
                    assert_eq!(r, 0.0);
                }
            }
        }
    }

    #[test]
    fn negative_discriminant_has_no_planar_type() {
        let x = [1.0 / 3.0, 2.0, 1.5];
        assert!(RiemannEllipsoid::d(&x, 0) < 0.0);
        let e = RiemannEllipsoid::new(3.0, 1.0).unwrap();
        assert!(e.solutions(&x, 0).unwrap().iter().all(|s| matches!(s.kind, SolutionKind::S { .. })));
        assert!(!e.region_test(&x, 0, true).unwrap());
    }

    #[test]
    fn degenerate_shape_rejected() {
        let e = RiemannEllipsoid::new(1.0, 1.0).unwrap();
        assert!(matches!(e.solutions(&[1.0, 1.0, 1.0], 0), Err(Error::DegenerateShape(_))));
    }
}
