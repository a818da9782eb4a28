use super::ModelSystem;
use crate::error::{Error, Result};
use crate::lie::{SymTensor, Vec3};

/// Harmonic springs between the three atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringPotential {
    pub stiffness: f64,
    /// Rest lengths for the pairs (12, 13, 23).
    pub rest: [f64; 3],
}

impl Default for SpringPotential {
    fn default() -> Self {
        SpringPotential { stiffness: 1.0, rest: [1.0, 1.1, 1.2] }
    }
}

/// Three masses in space with centre of mass at the origin; chart
/// x = (|q1|², |q2|², ⟨q1,q2⟩) in the cone x1x2 ≥ x3².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triatomic {
    pub masses: [f64; 3],
    pub springs: SpringPotential,
}

impl Triatomic {
    pub fn new(masses: [f64; 3]) -> Result<Self> {
        if masses.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::Config("masses must be positive".into()));
        }
        Ok(Triatomic { masses, springs: SpringPotential::default() })
    }

    fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass-weighted Gram matrix (QᵀQ)_ij = √(m_i m_j)⟨q_i, q_j⟩.
    pub fn gram(&self, x: &[f64]) -> SymTensor {
        let [m1, m2, m3] = self.masses;
        let g11 = x[0];
        let g22 = x[1];
        let g12 = x[2];
        let g13 = -(m1 * x[0] + m2 * x[2]) / m3;
        let g23 = -(m1 * x[2] + m2 * x[1]) / m3;
        let g33 = (m1 * m1 * x[0] + 2.0 * m1 * m2 * x[2] + m2 * m2 * x[1]) / (m3 * m3);
        let r = [m1.sqrt(), m2.sqrt(), m3.sqrt()];
        let g = [[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]];
        let mut s = SymTensor::zeros(3);
        for i in 0..3 {
            for j in 0..=i {
                s.set(i, j, r[i] * r[j] * g[i][j]);
            }
        }
        s
    }

    /// π(Q) = |Q|² Id − QᵀQ.
    pub fn pi(&self, x: &[f64]) -> SymTensor {
        let g = self.gram(x);
        SymTensor::identity(3).scaled(g.trace()).minus(&g)
    }

    /// Unit mass vector μ̂.
    pub fn mu_hat(&self) -> Vec3 {
        let m = self.total().sqrt();
        [self.masses[0].sqrt() / m, self.masses[1].sqrt() / m, self.masses[2].sqrt() / m]
    }

    /// Chart point whose π(Q) equals Id + μ̂μ̂ᵀ.
    pub fn s_point(&self) -> [f64; 3] {
        let [m1, m2, _] = self.masses;
        let mt = self.total();
        [(1.0 - m1 / mt) / m1, (1.0 - m2 / mt) / m2, -1.0 / mt]
    }

    pub fn s_matrix(&self) -> SymTensor {
        self.pi(&self.s_point())
    }

    /// Positions with centre of mass at the origin.
    pub fn configuration(&self, x: &[f64]) -> Result<[Vec3; 3]> {
        if !(x[0] > 0.0) || x[0] * x[1] - x[2] * x[2] < -1e-14 {
            return Err(Error::Domain(format!("{x:?} outside the cone")));
        }
        let a = x[0].sqrt();
        let b = x[2] / a;
        let c = (x[1] - b * b).max(0.0).sqrt();
        let q1 = [a, 0.0, 0.0];
        let q2 = [b, c, 0.0];
        let [m1, m2, m3] = self.masses;
        let q3 = [-(m1 * q1[0] + m2 * q2[0]) / m3, -(m1 * q1[1] + m2 * q2[1]) / m3, 0.0];
        Ok([q1, q2, q3])
    }

    /// Squared pair distances (12, 13, 23), linear in x.
    pub fn pair_distances_sq(&self, x: &[f64]) -> [f64; 3] {
        let [m1, m2, m3] = self.masses;
        let r12 = x[0] + x[1] - 2.0 * x[2];
        let r13 = ((m1 + m3).powi(2) * x[0] + 2.0 * (m1 + m3) * m2 * x[2] + m2 * m2 * x[1]) / (m3 * m3);
        let r23 = (m1 * m1 * x[0] + 2.0 * m1 * (m2 + m3) * x[2] + (m2 + m3).powi(2) * x[1]) / (m3 * m3);
        [r12, r13, r23]
    }

    /// Chart point of the triangle at spring rest lengths.
    pub fn rest_point(&self) -> Result<[f64; 3]> {
        let mut rows = Vec::new();
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            rows.push(self.pair_distances_sq(&e).to_vec());
        }
        // columns are images of unit vectors; transpose to get the linear map
        let a: Vec<Vec<f64>> = (0..3).map(|r| (0..3).map(|c| rows[c][r]).collect()).collect();
        let b: Vec<f64> = self.springs.rest.iter().map(|l| l * l).collect();
        let x = crate::numeric::solve(&a, &b)?;
        Ok([x[0], x[1], x[2]])
    }
}

impl ModelSystem for Triatomic {
    fn name(&self) -> &str {
        "triatomic"
    }

    fn chart_dim(&self) -> usize {
        3
    }

    fn domain_test(&self, x: &[f64]) -> bool {
        x[0] >= 0.0 && x[1] >= 0.0 && x[0] * x[1] - x[2] * x[2] >= 0.0
    }

    fn inertia(&self, x: &[f64]) -> Result<SymTensor> {
        Ok(self.pi(x))
    }

    fn inertia_partials(&self, _x: &[f64]) -> Result<Vec<SymTensor>> {
        Ok((0..3)
            .map(|i| {
                let mut e = [0.0; 3];
                e[i] = 1.0;
                self.pi(&e)
            })
            .collect())
    }

    fn potential(&self, x: &[f64]) -> Result<f64> {
        let d = self.pair_distances_sq(x);
        let mut v = 0.0;
        for k in 0..3 {
            if d[k] <= 0.0 {
                return Err(Error::Singular("atoms coincide".into()));
            }
            v += 0.5 * self.springs.stiffness * (d[k].sqrt() - self.springs.rest[k]).powi(2);
        }
        Ok(v)
    }

    fn grad_potential(&self, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.pair_distances_sq(x);
        let mut g = vec![0.0; 3];
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            let de = self.pair_distances_sq(&e);
            for k in 0..3 {
                let r = d[k].sqrt();
                g[i] += self.springs.stiffness * (r - self.springs.rest[k]) * de[k] / (2.0 * r);
            }
        }
        Ok(g)
    }

    fn boundary_value(&self, x: &[f64]) -> Option<f64> {
        Some(x[0] * x[1] - x[2] * x[2])
    }
}
