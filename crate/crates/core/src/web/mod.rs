//! Leaves of the eigenvalue webs: implicit functions, meshes and the
//! repeated-eigenvalue locus.

mod locus;
pub use locus::{locus_descriptor, repeated_locus, LocusDescriptor, RepeatedLocus};
mod mesh;

pub use mesh::{component_count, extract_leaf, extract_with, Grid, IsoMesh, MeshOptions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::char_poly;
use crate::models::{
    FullBodySatellite, ModelSystem, RiemannEllipsoid, RubberBall, Spherical3Body, Triatomic,
};

/// Model whose webs are extracted.
#[derive(Debug, Clone, PartialEq)]
pub enum LeafModel {
    S3Body,
    FullBody(FullBodySatellite),
    Triatomic(Triatomic),
    RubberBall,
    Ellipsoid(RiemannEllipsoid),
}

impl LeafModel {
    pub fn id(&self) -> &'static str {
        match self {
            LeafModel::S3Body => "s3body",
            LeafModel::FullBody(_) => "fullbody",
            LeafModel::Triatomic(_) => "triatomic",
            LeafModel::RubberBall => "rubber-ball",
            LeafModel::Ellipsoid(_) => "ellipsoid",
        }
    }

    pub fn system(&self) -> Option<Box<dyn ModelSystem>> {
        match self {
            LeafModel::S3Body => Some(Box::new(Spherical3Body::default())),
            LeafModel::FullBody(b) => Some(Box::new(b.clone())),
            LeafModel::Triatomic(t) => Some(Box::new(*t)),
            LeafModel::RubberBall => Some(Box::new(RubberBall)),
            LeafModel::Ellipsoid(e) => Some(Box::new(*e)),
        }
    }

    /// Default extraction box.
    pub fn default_bounds(&self) -> [[f64; 2]; 3] {
        match self {
            LeafModel::S3Body => [[-1.0, 1.0]; 3],
            LeafModel::FullBody(_) => [[-3.0, 3.0]; 3],
            LeafModel::Triatomic(_) => [[0.0, 2.0], [0.0, 2.0], [-2.0, 2.0]],
            LeafModel::RubberBall => [[-2.0, 2.0]; 3],
            LeafModel::Ellipsoid(_) => [[0.2, 5.0]; 3],
        }
    }
}

/// Which web function is levelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WebSelector {
    /// Any inertia eigenvalue, through the characteristic polynomial.
    Eigenvalue,
    EllipsoidS { k: usize, sign: i8 },
    EllipsoidR { k: usize, plus: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafSpec {
    pub model: LeafModel,
    pub selector: WebSelector,
    pub level: f64,
}

impl LeafSpec {
    pub fn eigenvalue(model: LeafModel, level: f64) -> Result<Self> {
        let spec = LeafSpec { model, selector: WebSelector::Eigenvalue, level };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.level.is_finite() {
            return Err(Error::Config("level must be finite".into()));
        }
        if self.model == LeafModel::S3Body && !(0.0..=3.0).contains(&self.level) {
            return Err(Error::Config(format!("3-body eigenvalue level {} outside [0, 3]", self.level)));
        }
        let ellipsoid = matches!(self.model, LeafModel::Ellipsoid(_));
        if !ellipsoid && self.selector != WebSelector::Eigenvalue {
            return Err(Error::Config("ellipsoid web selector on a non-ellipsoid model".into()));
        }
        Ok(())
    }

    /// Implicit function without chart checks (used on extraction grids).
    pub fn raw_value(&self, x: &[f64]) -> f64 {
        let l = self.level;
        match (&self.model, self.selector) {
            (LeafModel::S3Body, _) => s3body_implicit(x, l),
            (LeafModel::FullBody(b), _) => b.implicit(x, l),
            (LeafModel::Triatomic(t), _) => char_poly(&t.pi(x)).eval(l),
            (LeafModel::RubberBall, _) => {
                let d = [(x[0] - x[1]).powi(2), (x[0] - x[2]).powi(2), (x[1] - x[2]).powi(2)];
                (l - d[0]) * (l - d[1]) * (l - d[2])
            }
            (LeafModel::Ellipsoid(e), WebSelector::EllipsoidS { k, sign }) => e.web_s(x, k, sign) - l,
            (LeafModel::Ellipsoid(e), WebSelector::EllipsoidR { k, plus }) => {
                e.web_r(x, k, plus).map(|v| v - l).unwrap_or(f64::NAN)
            }
            (LeafModel::Ellipsoid(_), WebSelector::Eigenvalue) => {
                let f = crate::lie::eig_sym(&RiemannEllipsoid::inertia_block(x), 0.0);
                f.values.iter().map(|v| l - v).product()
            }
        }
    }

    pub fn boundary(&self, x: &[f64]) -> Option<f64> {
        match &self.model {
            LeafModel::S3Body => Some(crate::models::cayley(x)),
            LeafModel::FullBody(b) => b.boundary_value(x),
            LeafModel::Triatomic(t) => t.boundary_value(x),
            LeafModel::RubberBall => Some((x[1] - x[0]).min(x[2] - x[1])),
            LeafModel::Ellipsoid(_) => None,
        }
    }
}

/// (λ−2)³ + 2x1x2x3 − (λ−2)(x1²+x2²+x3²) = det(λI − π(x)).
pub fn s3body_implicit(x: &[f64], lambda: f64) -> f64 {
    let m = lambda - 2.0;
    m * m * m + 2.0 * x[0] * x[1] * x[2] - m * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
}

/// Implicit web function at a chart point; zero exactly on the leaf.
pub fn implicit_value(spec: &LeafSpec, x: &[f64]) -> Result<f64> {
    let inside = match &spec.model {
        LeafModel::S3Body => x.iter().all(|v| v.abs() <= 1.0 + 1e-12),
        LeafModel::FullBody(b) => b.domain_test(x),
        LeafModel::Triatomic(t) => t.domain_test(x),
        LeafModel::RubberBall => RubberBall.domain_test(x),
        LeafModel::Ellipsoid(e) => {
            RiemannEllipsoid::check_shape(x)?;
            e.domain_test(x)
        }
    };
    if !inside {
        return Err(Error::Domain(format!("{x:?} outside the {} chart", spec.model.id())));
    }
    let v = spec.raw_value(x);
    if v.is_nan() {
        return Err(Error::Domain(format!("{x:?}: web function undefined (negative discriminant)")));
    }
    Ok(v)
}

/// Membership in R±_k for the ellipsoid Type R webs.
pub fn ellipsoid_region_test(x: &[f64], k: usize, plus: bool, rho1: f64, rho2: f64) -> Result<bool> {
    RiemannEllipsoid::new(rho1, rho2)?.region_test(x, k, plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::eig_sym;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn s3body_special_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            assert!((s3body_implicit(&x, 3.0) - crate::models::cayley(&x)).abs() < 1e-14);
            assert!((s3body_implicit(&x, 2.0) - 2.0 * x[0] * x[1] * x[2]).abs() < 1e-15);
            let p = char_poly(&Spherical3Body::pi(&x));
            for l in [0.3, 1.7, 2.9] {
                assert!((s3body_implicit(&x, l) - p.eval(l)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn full_body_implicit_is_determinant() {
        let b = FullBodySatellite::new([1.0, 2.0, 3.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let l = rng.gen_range(0.0..8.0);
            let det = char_poly(&b.inertia(&x).unwrap()).eval(l);
            assert!((b.implicit(&x, l) - det).abs() < 1e-9);
        }
    }

    #[test]
    fn web_covers_shape_space() {
        let spec = |l| LeafSpec::eigenvalue(LeafModel::S3Body, l).unwrap();
        let x = [0.2, 0.1, -0.3];
        for l in eig_sym(&Spherical3Body::pi(&x), 1e-8).values {
            assert!(implicit_value(&spec(l), &x).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn level_outside_range_rejected() {
        assert!(LeafSpec::eigenvalue(LeafModel::S3Body, 3.5).is_err());
        let s = LeafSpec::eigenvalue(LeafModel::S3Body, 1.0).unwrap();
        assert!(implicit_value(&s, &[1.5, 0.0, 0.0]).is_err());
    }
}
