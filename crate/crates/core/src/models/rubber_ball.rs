use super::ModelSystem;
use crate::error::{Error, Result};
use crate::lie::SymTensor;

/// Elastic ball whose inertia depends on the ordered strain eigenvalues.
#[derive(Debug, Clone, Copy, Default)]
pub struct RubberBall;

impl ModelSystem for RubberBall {
    fn name(&self) -> &str {
        "rubber-ball"
    }

    fn chart_dim(&self) -> usize {
        3
    }

    // strictly ordered; coincident strain eigenvalues are a chart singularity
    fn domain_test(&self, x: &[f64]) -> bool {
        let eps = 1e-9 * (1.0 + x[0].abs().max(x[2].abs()));
        x[1] - x[0] > eps && x[2] - x[1] > eps
    }

    fn inertia(&self, x: &[f64]) -> Result<SymTensor> {
        Ok(SymTensor::diag(&[
            (x[0] - x[1]).powi(2),
            (x[0] - x[2]).powi(2),
            (x[1] - x[2]).powi(2),
        ]))
    }

    fn inertia_partials(&self, x: &[f64]) -> Result<Vec<SymTensor>> {
        let (a, b, c) = (x[0] - x[1], x[0] - x[2], x[1] - x[2]);
        Ok(vec![
            SymTensor::diag(&[2.0 * a, 2.0 * b, 0.0]),
            SymTensor::diag(&[-2.0 * a, 0.0, 2.0 * c]),
            SymTensor::diag(&[0.0, -2.0 * b, -2.0 * c]),
        ])
    }

    fn potential(&self, _x: &[f64]) -> Result<f64> {
        Err(Error::Unsupported("rubber ball carries no potential".into()))
    }
}
