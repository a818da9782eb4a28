//! Physical systems behind one interface: charts, inertia tensors, potentials.

mod ellipsoid;
mod full_body;
mod potential;
mod rubber_ball;
mod three_body;
mod triatomic;
mod two_body;

pub use ellipsoid::{EllipsoidSolution, RiemannEllipsoid, SolutionKind};
pub use full_body::{fullbody_repeated_curves, FullBodyPotential, FullBodySatellite, RepeatedCurve};
pub use potential::{AngularPotential, Cotangent, InverseAngle, PairPotential};
pub use rubber_ball::RubberBall;
pub use three_body::{
    cayley, tetrahedral_group, AngleChart, Face, FaceChart, Spherical3Body, TetraElement,
};
pub use triatomic::{SpringPotential, Triatomic};
pub use two_body::{two_body_eigendata, Sphere2Body, TwoBodyEigen};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lie::SymTensor;

/// Boundary tolerance on C(x) for 3-body chart selection and clipping.
pub const TAU_BD: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// The model's primary chart (3-body: x = cosines of mutual angles).
    Standard,
    /// 3-body face chart (θ12, θ23).
    Face(Face),
    /// 3-body smooth chart (θ12, θ23, φ) across the boundary.
    Angles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapePoint {
    pub chart: Chart,
    pub coords: Vec<f64>,
}

impl ShapePoint {
    pub fn standard(coords: &[f64]) -> Self {
        ShapePoint { chart: Chart::Standard, coords: coords.to_vec() }
    }
}

/// Shape space chart with a locked inertia tensor and a potential.
pub trait ModelSystem: Send + Sync {
    fn name(&self) -> &str;

    fn chart_dim(&self) -> usize;

    fn domain_test(&self, x: &[f64]) -> bool;

    fn inertia(&self, x: &[f64]) -> Result<SymTensor>;

    /// ∂𝕀/∂x_i; five-point differences unless the model knows better.
    fn inertia_partials(&self, x: &[f64]) -> Result<Vec<SymTensor>> {
        fd_inertia_partials(self, x)
    }

    fn potential(&self, x: &[f64]) -> Result<f64>;

    fn grad_potential(&self, x: &[f64]) -> Result<Vec<f64>> {
        crate::numeric::gradient(&|y: &[f64]| self.potential(y), x, crate::numeric::FD_STEP)
    }

    /// Nonnegative inside the shape domain and zero on its boundary, when
    /// the domain has a boundary worth clipping against.
    fn boundary_value(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

pub fn fd_inertia_partials<M: ModelSystem + ?Sized>(m: &M, x: &[f64]) -> Result<Vec<SymTensor>> {
    let n = m.chart_dim();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let h = 1e-4 * (1.0 + x[i].abs());
        let at = |t: f64| -> Result<SymTensor> {
            let mut y = x.to_vec();
            y[i] += t;
            m.inertia(&y)
        };
        let stencil = |h: f64| -> Result<SymTensor> {
            let s = at(-2.0 * h)?
                .minus(&at(2.0 * h)?)
                .plus(&at(h)?.minus(&at(-h)?).scaled(8.0));
            Ok(s.scaled(1.0 / (12.0 * h)))
        };
        let (d1, d2) = (stencil(h)?, stencil(0.5 * h)?);
        out.push(d2.scaled(16.0 / 15.0).minus(&d1.scaled(1.0 / 15.0)));
    }
    Ok(out)
}

/// `½⟨∂𝕀/∂x_i ω, ω⟩` for each chart direction.
pub fn grad_kinetic<M: ModelSystem + ?Sized>(m: &M, x: &[f64], omega: &[f64]) -> Result<Vec<f64>> {
    Ok(m.inertia_partials(x)?.iter().map(|d| 0.5 * d.quad(omega)).collect())
}
