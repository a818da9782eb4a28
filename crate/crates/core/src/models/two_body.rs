use std::sync::Arc;

use super::{Cotangent, ModelSystem, PairPotential};
use crate::error::{Error, Result};
use crate::lie::SymTensor;

/// Two point masses on the unit sphere; chart is the mutual angle θ.
#[derive(Debug, Clone)]
pub struct Sphere2Body {
    pub m1: f64,
    pub m2: f64,
    pub potential: Arc<dyn PairPotential>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBodyEigen {
    pub lambda0: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub d_plus: f64,
    pub d_minus: f64,
    pub disc: f64,
}

/// Closed-form eigenvalues and their θ-derivatives.
pub fn two_body_eigendata(m1: f64, m2: f64, theta: f64) -> Result<TwoBodyEigen> {
    let m = m1 + m2;
    let disc = m1 * m1 + 2.0 * m1 * m2 * (2.0 * theta).cos() + m2 * m2;
    if disc <= 1e-12 * m * m {
        return Err(Error::RepeatedEigenvalue { branch: 0, gap: disc.max(0.0).sqrt() });
    }
    let sd = disc.sqrt();
    let d = m1 * m2 * (2.0 * theta).sin() / sd;
    Ok(TwoBodyEigen {
        lambda0: m,
        lambda_plus: 0.5 * (m + sd),
        lambda_minus: 0.5 * (m - sd),
        d_plus: -d,
        d_minus: d,
        disc,
    })
}

impl Sphere2Body {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        if !(m1 > 0.0 && m2 > 0.0) {
            return Err(Error::Config("masses must be positive".into()));
        }
        Ok(Sphere2Body { m1, m2, potential: Arc::new(Cotangent) })
    }

    /// Particle positions in the section: q1 on e1, q2 in the e1e2 plane.
    pub fn configuration(theta: f64) -> [[f64; 3]; 2] {
        [[1.0, 0.0, 0.0], [theta.cos(), theta.sin(), 0.0]]
    }
}

impl ModelSystem for Sphere2Body {
    fn name(&self) -> &str {
        "s2body"
    }

    fn chart_dim(&self) -> usize {
        1
    }

    fn domain_test(&self, x: &[f64]) -> bool {
        x[0] > 0.0 && x[0] < std::f64::consts::PI
    }

    fn inertia(&self, x: &[f64]) -> Result<SymTensor> {
        if !self.domain_test(x) {
            return Err(Error::Domain(format!("theta = {}", x[0])));
        }
        let (s, c) = x[0].sin_cos();
        let (m1, m2) = (self.m1, self.m2);
        Ok(SymTensor::from_rows(&[
            vec![m2 * s * s, -m2 * c * s, 0.0],
            vec![-m2 * c * s, m1 + m2 * c * c, 0.0],
            vec![0.0, 0.0, m1 + m2],
        ]))
    }

    fn inertia_partials(&self, x: &[f64]) -> Result<Vec<SymTensor>> {
        let (s2, c2) = (2.0 * x[0]).sin_cos();
        let m2 = self.m2;
        Ok(vec![SymTensor::from_rows(&[
            vec![m2 * s2, -m2 * c2, 0.0],
            vec![-m2 * c2, -m2 * s2, 0.0],
            vec![0.0, 0.0, 0.0],
        ])])
    }

    fn potential(&self, x: &[f64]) -> Result<f64> {
        self.potential.value(x[0])
    }

    fn grad_potential(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![self.potential.derivative(x[0])?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{char_poly, eig_sym};
    use std::f64::consts::PI;

    #[test]
    fn equal_masses_right_angle_repeats() {
        let b = Sphere2Body::new(1.0, 1.0).unwrap();
        let f = eig_sym(&b.inertia(&[PI / 2.0]).unwrap(), 1e-8);
        assert!((f.values[0] - 1.0).abs() < 1e-14 && (f.values[1] - 1.0).abs() < 1e-14);
        assert!((f.values[2] - 2.0).abs() < 1e-14);
        assert!(two_body_eigendata(1.0, 1.0, PI / 2.0).is_err());
    }

    #[test]
    fn closed_form_matches_solver() {
        let b = Sphere2Body::new(1.0, 2.0).unwrap();
        let e = two_body_eigendata(1.0, 2.0, PI / 3.0).unwrap();
        let f = eig_sym(&b.inertia(&[PI / 3.0]).unwrap(), 1e-8);
        let mut want = [e.lambda_minus, e.lambda_plus, e.lambda0];
        want.sort_by(f64::total_cmp);
        for k in 0..3 {
            assert!((f.values[k] - want[k]).abs() < 1e-10);
        }
        assert!((e.lambda_plus + e.lambda_minus - 3.0).abs() < 1e-14);
        assert!(e.d_plus * e.d_minus <= 0.0);
    }

    #[test]
    fn char_poly_factorization() {
        // monic det(tI − 𝕀) is (t − M)(t − λ+)(t − λ−); the factored form
        // (M − t)(2t − M − √D)(2t − M + √D) is −4 times it
        let (m1, m2, th) = (1.0, 2.0, PI / 3.0);
        let b = Sphere2Body::new(m1, m2).unwrap();
        let p = char_poly(&b.inertia(&[th]).unwrap());
        let m = m1 + m2;
        let sd = (m1 * m1 + 2.0 * m1 * m2 * (2.0 * th).cos() + m2 * m2).sqrt();
        // expand (M − t)(4t² − 4Mt + M² − D) = −4t³ + 8Mt² ... coefficientwise
        let dd = sd * sd;
        let factored = [m * (m * m - dd), -(m * m - dd) - 4.0 * m * m, 4.0 * m + 4.0 * m, -4.0];
        for k in 0..4 {
            assert!((factored[k] - (-4.0) * p.c[k]).abs() < 1e-12, "coefficient {k}");
        }
    }

    #[test]
    fn collision_limit() {
        let e = two_body_eigendata(1.0, 2.0, 1e-6).unwrap();
        assert!(e.lambda_minus.abs() < 1e-10);
    }
}
