use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Cotangent, ModelSystem, PairPotential, TAU_BD};
use crate::error::{Error, Result};
use crate::lie::{SymTensor, Vec3};

/// C(x) = 1 + 2x1x2x3 − x1² − x2² − x3² = Δ², the squared signed volume.
pub fn cayley(x: &[f64]) -> f64 {
    1.0 + 2.0 * x[0] * x[1] * x[2] - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]
}

/// Faces of the curvy tetrahedron. F0 is the equatorial face with no
/// particle between the other two; Fk has particle k in the middle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Face {
    F0,
    F1,
    F2,
    F3,
}

impl Face {
    /// Whether q1 and q3 lie on opposite sides of q2 along the great circle.
    pub fn opposite_sides(self) -> bool {
        matches!(self, Face::F0 | Face::F2)
    }
}

/// Three unit masses on the unit sphere.
#[derive(Debug, Clone)]
pub struct Spherical3Body {
    pub potential: Arc<dyn PairPotential>,
}

impl Default for Spherical3Body {
    fn default() -> Self {
        Spherical3Body { potential: Arc::new(Cotangent) }
    }
}

fn outer_sum(q: &[Vec3; 3]) -> SymTensor {
    let mut s = SymTensor::identity(3).scaled(3.0);
    for p in q {
        for i in 0..3 {
            for j in 0..=i {
                s.set(i, j, s.get(i, j) - p[i] * p[j]);
            }
        }
    }
    s
}

/// −(a bᵀ + b aᵀ)
fn sym_outer_neg(a: &Vec3, b: &Vec3) -> SymTensor {
    let mut s = SymTensor::zeros(3);
    for i in 0..3 {
        for j in 0..=i {
            s.set(i, j, -(a[i] * b[j] + b[i] * a[j]));
        }
    }
    s
}

impl Spherical3Body {
    pub fn with_potential(potential: Arc<dyn PairPotential>) -> Self {
        Spherical3Body { potential }
    }

    /// π(Q) = 3Id − QᵀQ in the chart; also the inertia in the square-root section.
    pub fn pi(x: &[f64]) -> SymTensor {
        SymTensor::from_rows(&[
            vec![2.0, -x[0], -x[1]],
            vec![-x[0], 2.0, -x[2]],
            vec![-x[1], -x[2], 2.0],
        ])
    }

    /// Locked inertia 3Id − Σ q qᵀ of explicit unit positions.
    pub fn inertia_of(q: &[Vec3; 3]) -> SymTensor {
        outer_sum(q)
    }

    pub fn x_of(q: &[Vec3; 3]) -> [f64; 3] {
        let d = |a: &Vec3, b: &Vec3| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        [d(&q[0], &q[1]), d(&q[0], &q[2]), d(&q[1], &q[2])]
    }

    /// Positions with q2 at the pole and q1 in the xz half plane, Δ ≥ 0.
    pub fn configuration(x: &[f64]) -> Result<[Vec3; 3]> {
        let c = cayley(x);
        if c < -TAU_BD || x.iter().any(|v| v.abs() > 1.0) {
            return Err(Error::Domain(format!("{x:?} outside the curvy tetrahedron")));
        }
        let s12 = (1.0 - x[0] * x[0]).sqrt();
        if s12 <= 1e-14 {
            return Err(Error::Singular("q1 and q2 collide or are antipodal".into()));
        }
        let a = (x[1] - x[0] * x[2]) / s12;
        let b = (1.0 - a * a - x[2] * x[2]).max(0.0).sqrt();
        Ok([[s12, 0.0, x[0]], [0.0, 0.0, 1.0], [a, b, x[2]]])
    }

    /// The two non-trivial eigenvalues on ∂T (the third is 3).
    pub fn boundary_lambda_pm(x: &[f64]) -> (f64, f64) {
        let r = (4.0 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - 3.0).max(0.0).sqrt();
        (0.5 * (3.0 + r), 0.5 * (3.0 - r))
    }

    pub fn is_boundary(x: &[f64]) -> bool {
        cayley(x).abs() <= TAU_BD
    }

    /// Face containing a boundary point and its face coordinates (θ12, θ23).
    pub fn face_of(x: &[f64]) -> Result<(Face, [f64; 2])> {
        let a = x[0].clamp(-1.0, 1.0).acos();
        let b = x[2].clamp(-1.0, 1.0).acos();
        let opp = ((a + b).cos() - x[1]).abs();
        let same = ((a - b).cos() - x[1]).abs();
        let tol = 1e-6;
        if opp.min(same) > tol {
            return Err(Error::Domain(format!("{x:?} is not on the boundary")));
        }
        let face = if opp <= same {
            if a + b <= std::f64::consts::PI {
                Face::F2
            } else {
                Face::F0
            }
        } else if a < b {
            Face::F1
        } else {
            Face::F3
        };
        Ok((face, [a, b]))
    }

    /// (θ12, θ23, φ) of a point, φ ∈ [0, π] the dihedral angle at q2.
    pub fn angles_of(x: &[f64]) -> Result<[f64; 3]> {
        let a = x[0].clamp(-1.0, 1.0).acos();
        let b = x[2].clamp(-1.0, 1.0).acos();
        let (sa, sb) = (a.sin(), b.sin());
        if sa * sb <= 1e-14 {
            return Err(Error::Singular("q2 collides with or is antipodal to a neighbour".into()));
        }
        let cphi = ((x[1] - x[0] * x[2]) / (sa * sb)).clamp(-1.0, 1.0);
        Ok([a, b, cphi.acos()])
    }

    pub fn face_chart(&self, face: Face) -> FaceChart {
        FaceChart { body: self.clone(), face }
    }

    pub fn angle_chart(&self) -> AngleChart {
        AngleChart { body: self.clone() }
    }

    fn pair(&self, theta: f64) -> Result<f64> {
        self.potential.value(theta)
    }

    fn pair_d(&self, theta: f64) -> Result<f64> {
        self.potential.derivative(theta)
    }
}

impl ModelSystem for Spherical3Body {
    fn name(&self) -> &str {
        "s3body"
    }

    fn chart_dim(&self) -> usize {
        3
    }

    fn domain_test(&self, x: &[f64]) -> bool {
        x.iter().all(|v| v.abs() <= 1.0) && cayley(x) >= -TAU_BD
    }

    fn inertia(&self, x: &[f64]) -> Result<SymTensor> {
        Ok(Self::pi(x))
    }

    fn inertia_partials(&self, _x: &[f64]) -> Result<Vec<SymTensor>> {
        let e = |i: usize, j: usize| {
            let mut s = SymTensor::zeros(3);
            s.set(i, j, -1.0);
            s
        };
        Ok(vec![e(0, 1), e(0, 2), e(1, 2)])
    }

    fn potential(&self, x: &[f64]) -> Result<f64> {
        let mut v = 0.0;
        for &c in x.iter().take(3) {
            if c.abs() >= 1.0 {
                return Err(Error::Singular(format!("pair cosine {c}")));
            }
            v += self.pair(c.acos())?;
        }
        Ok(v)
    }

    fn grad_potential(&self, x: &[f64]) -> Result<Vec<f64>> {
        x.iter()
            .take(3)
            .map(|&c| {
                if c.abs() >= 1.0 {
                    return Err(Error::Singular(format!("pair cosine {c}")));
                }
                Ok(-self.pair_d(c.acos())? / (1.0 - c * c).sqrt())
            })
            .collect()
    }

    fn boundary_value(&self, x: &[f64]) -> Option<f64> {
        Some(cayley(x))
    }
}

/// Boundary face chart (θ12, θ23) with the explicit coplanar section.
#[derive(Debug, Clone)]
pub struct FaceChart {
    pub body: Spherical3Body,
    pub face: Face,
}

impl FaceChart {
    fn sign(&self) -> f64 {
        if self.face.opposite_sides() {
            -1.0
        } else {
            1.0
        }
    }

    pub fn positions(&self, y: &[f64]) -> [Vec3; 3] {
        let (a, b) = (y[0], y[1]);
        [[a.sin(), 0.0, a.cos()], [0.0, 0.0, 1.0], [self.sign() * b.sin(), 0.0, b.cos()]]
    }

    /// Cosine coordinates of a face point.
    pub fn to_x(&self, y: &[f64]) -> [f64; 3] {
        let (a, b) = (y[0], y[1]);
        let x2 = if self.face.opposite_sides() { (a + b).cos() } else { (a - b).cos() };
        [a.cos(), x2, b.cos()]
    }

    /// θ13 and its partials along the face.
    fn theta13(&self, y: &[f64]) -> (f64, f64, f64) {
        let (a, b) = (y[0], y[1]);
        if self.face.opposite_sides() {
            let t = a + b;
            if t <= std::f64::consts::PI {
                (t, 1.0, 1.0)
            } else {
                (2.0 * std::f64::consts::PI - t, -1.0, -1.0)
            }
        } else {
            let s = (a - b).signum();
            ((a - b).abs(), s, -s)
        }
    }

    /// Explicit in-plane eigenvalues (λ+, λ−) along the face.
    pub fn lambda_pm(&self, y: &[f64]) -> (f64, f64) {
        Spherical3Body::boundary_lambda_pm(&self.to_x(y))
    }
}

impl ModelSystem for FaceChart {
    fn name(&self) -> &str {
        "s3body-face"
    }

    fn chart_dim(&self) -> usize {
        2
    }

    fn domain_test(&self, y: &[f64]) -> bool {
        let pi = std::f64::consts::PI;
        y[0] > 0.0 && y[0] < pi && y[1] > 0.0 && y[1] < pi
    }

    fn inertia(&self, y: &[f64]) -> Result<SymTensor> {
        Ok(outer_sum(&self.positions(y)))
    }

    fn inertia_partials(&self, y: &[f64]) -> Result<Vec<SymTensor>> {
        let q = self.positions(y);
        let (a, b) = (y[0], y[1]);
        let dq1 = [a.cos(), 0.0, -a.sin()];
        let dq3 = [self.sign() * b.cos(), 0.0, -b.sin()];
        Ok(vec![sym_outer_neg(&dq1, &q[0]), sym_outer_neg(&dq3, &q[2])])
    }

    fn potential(&self, y: &[f64]) -> Result<f64> {
        let (t13, _, _) = self.theta13(y);
        Ok(self.body.pair(y[0])? + self.body.pair(y[1])? + self.body.pair(t13)?)
    }

    fn grad_potential(&self, y: &[f64]) -> Result<Vec<f64>> {
        let (t13, da, db) = self.theta13(y);
        let d13 = self.body.pair_d(t13)?;
        Ok(vec![self.body.pair_d(y[0])? + d13 * da, self.body.pair_d(y[1])? + d13 * db])
    }
}

/// Smooth chart (θ12, θ23, φ): q2 at the pole, q1 in the xz half plane,
/// q3 at azimuth φ.  φ = π and φ = 0 are the boundary faces.
#[derive(Debug, Clone)]
pub struct AngleChart {
    pub body: Spherical3Body,
}

impl AngleChart {
    pub fn positions(&self, y: &[f64]) -> [Vec3; 3] {
        let (a, b, p) = (y[0], y[1], y[2]);
        [
            [a.sin(), 0.0, a.cos()],
            [0.0, 0.0, 1.0],
            [p.cos() * b.sin(), p.sin() * b.sin(), b.cos()],
        ]
    }

    pub fn to_x(&self, y: &[f64]) -> [f64; 3] {
        let (a, b, p) = (y[0], y[1], y[2]);
        [a.cos(), a.sin() * b.sin() * p.cos() + a.cos() * b.cos(), b.cos()]
    }
}

impl ModelSystem for AngleChart {
    fn name(&self) -> &str {
        "s3body-angles"
    }

    fn chart_dim(&self) -> usize {
        3
    }

    fn domain_test(&self, y: &[f64]) -> bool {
        let pi = std::f64::consts::PI;
        y[0] > 0.0 && y[0] < pi && y[1] > 0.0 && y[1] < pi
    }

    fn inertia(&self, y: &[f64]) -> Result<SymTensor> {
        Ok(outer_sum(&self.positions(y)))
    }

    fn inertia_partials(&self, y: &[f64]) -> Result<Vec<SymTensor>> {
        let q = self.positions(y);
        let (a, b, p) = (y[0], y[1], y[2]);
        let dq1a = [a.cos(), 0.0, -a.sin()];
        let dq3b = [p.cos() * b.cos(), p.sin() * b.cos(), -b.sin()];
        let dq3p = [-p.sin() * b.sin(), p.cos() * b.sin(), 0.0];
        Ok(vec![
            sym_outer_neg(&dq1a, &q[0]),
            sym_outer_neg(&dq3b, &q[2]),
            sym_outer_neg(&dq3p, &q[2]),
        ])
    }

    fn potential(&self, y: &[f64]) -> Result<f64> {
        let x = self.to_x(y);
        if x[1].abs() >= 1.0 {
            return Err(Error::Singular("q1 and q3 collide or are antipodal".into()));
        }
        Ok(self.body.pair(y[0])? + self.body.pair(y[1])? + self.body.pair(x[1].acos())?)
    }

    fn grad_potential(&self, y: &[f64]) -> Result<Vec<f64>> {
        let x = self.to_x(y);
        if x[1].abs() >= 1.0 {
            return Err(Error::Singular("q1 and q3 collide or are antipodal".into()));
        }
        let (a, b, p) = (y[0], y[1], y[2]);
        let dv2 = -self.body.pair_d(x[1].acos())? / (1.0 - x[1] * x[1]).sqrt();
        let dx2 = [
            a.cos() * b.sin() * p.cos() - a.sin() * b.cos(),
            a.sin() * b.cos() * p.cos() - a.cos() * b.sin(),
            -a.sin() * b.sin() * p.sin(),
        ];
        Ok(vec![
            self.body.pair_d(a)? + dv2 * dx2[0],
            self.body.pair_d(b)? + dv2 * dx2[1],
            dv2 * dx2[2],
        ])
    }
}

/// Element of the order-24 symmetry group of T: a particle relabelling
/// composed with reflecting one particle through the centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TetraElement {
    /// new particle i is old particle perm[i]
    pub perm: [usize; 3],
    /// particle negated after relabelling, if any
    pub flip: Option<usize>,
}

impl TetraElement {
    fn signs(&self) -> [f64; 3] {
        let mut e = [1.0; 3];
        if let Some(k) = self.flip {
            e[k] = -1.0;
        }
        e
    }

    /// Signed permutation P with Gram' = P Gram Pᵀ (rows).
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let e = self.signs();
        (0..3)
            .map(|i| (0..3).map(|j| if self.perm[i] == j { e[i] } else { 0.0 }).collect())
            .collect()
    }

    pub fn apply(&self, x: &[f64]) -> [f64; 3] {
        let g = [[1.0, x[0], x[1]], [x[0], 1.0, x[2]], [x[1], x[2], 1.0]];
        let e = self.signs();
        let p = self.perm;
        let gp = |i: usize, j: usize| e[i] * e[j] * g[p[i]][p[j]];
        [gp(0, 1), gp(0, 2), gp(1, 2)]
    }

    pub fn preserves_potential(&self) -> bool {
        self.flip.is_none()
    }
}

pub fn tetrahedral_group() -> Vec<TetraElement> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for perm in perms {
        for flip in [None, Some(0), Some(1), Some(2)] {
            out.push(TetraElement { perm, flip });
        }
    }
    out
}
