//! Relative equilibria: gradient collinearity on web leaves, the symmetric
//! 3-body families and the repeated-eigenspace cone test.
//!
//! Normalization: κ is stored with ∇V = κ∇λ_j, so that |ω|² = 2κ and
//! |L|² = 2κλ_j² (the amended potential V + |L|²/(2λ_j) is then critical).

mod abnormal;
mod families;

pub use abnormal::{abnormal_check, abnormal_check_s3, two_body_abnormal, AbnormalReport, Witness};
pub use families::{
    classify_all, classify_two_body, eulerian_family, face_midpoints, isosceles_curve,
    isosceles_residual, isosceles_signed, lagrangian_family, planar_iii, scalene_curve,
    scalene_residual, Catalog, DefiningEquation, FamilyCurve, IsoscelesSign, TwoBodyCatalog,
    THETA_ISO_X1,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{eig_sym, EigenFrame};
use crate::models::{ModelSystem, ShapePoint};
use crate::web::LeafSpec;

/// Eigenvalues closer than this are treated as a cluster.
pub const GAP_TOL: f64 = 1e-4;
/// Relative collinearity tolerance for accepting a normal RE.
pub const RE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "Euler-i")]
    EulerI,
    #[serde(rename = "Euler-ii")]
    EulerII,
    #[serde(rename = "Planar-iii")]
    PlanarIII,
    #[serde(rename = "Scalene-iv")]
    ScaleneIV,
    #[serde(rename = "Lagrange-2i")]
    Lagrange2I,
    #[serde(rename = "Isosceles-2ii")]
    Isosceles2II,
    Abnormal,
    Generic,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::EulerI => "Euler-i",
            Family::EulerII => "Euler-ii",
            Family::PlanarIII => "Planar-iii",
            Family::ScaleneIV => "Scalene-iv",
            Family::Lagrange2I => "Lagrange-2i",
            Family::Isosceles2II => "Isosceles-2ii",
            Family::Abnormal => "Abnormal",
            Family::Generic => "Generic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelEquilibrium {
    pub x: ShapePoint,
    /// The point in the model's standard chart (3-body: pair cosines).
    pub embedded: Vec<f64>,
    pub branch: usize,
    pub lambda: f64,
    pub omega_dir: Vec<f64>,
    pub kappa: f64,
    /// |L|² = 2κλ².
    pub momentum_sq: f64,
    pub family: Family,
    pub normal: bool,
    /// ‖∇V − κ∇λ‖ / ‖∇V‖ (zero at equilibria).
    pub residual: f64,
}

impl RelEquilibrium {
    pub fn from_fit(x: ShapePoint, embedded: Vec<f64>, fit: &LagrangeFit, family: Family) -> Self {
        RelEquilibrium {
            x,
            embedded,
            branch: fit.branch,
            lambda: fit.lambda,
            omega_dir: fit.omega_dir.clone(),
            kappa: fit.kappa,
            momentum_sq: momentum_sq(fit.kappa, fit.lambda),
            family,
            normal: true,
            residual: fit.relative,
        }
    }
}

pub fn momentum_sq(kappa: f64, lambda: f64) -> f64 {
    2.0 * kappa * lambda * lambda
}

/// Least-squares multiplier fit of ∇V against ∇λ_j.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeFit {
    pub branch: usize,
    pub lambda: f64,
    pub omega_dir: Vec<f64>,
    pub kappa: f64,
    pub residual: f64,
    pub relative: f64,
    pub grad_v: Vec<f64>,
    pub grad_lambda: Vec<f64>,
    /// Largest deviation between perturbative and differenced ∇λ_j.
    pub fd_mismatch: f64,
}

impl LagrangeFit {
    pub fn is_normal_re(&self, tol: f64) -> bool {
        self.kappa >= 0.0 && self.relative <= tol
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn check_simple(frame: &EigenFrame, j: usize, gap_tol: f64) -> Result<()> {
    let gap = frame.gap(j);
    if gap < gap_tol * (1.0 + frame.values[j].abs()) {
        return Err(Error::RepeatedEigenvalue { branch: j, gap });
    }
    Ok(())
}

/// ∇λ_j = ⟨v_j, ∂𝕀/∂x_i v_j⟩ for a simple eigenvalue.
pub fn eigen_gradient(sys: &dyn ModelSystem, x: &[f64], frame: &EigenFrame, j: usize) -> Result<Vec<f64>> {
    check_simple(frame, j, GAP_TOL)?;
    Ok(sys.inertia_partials(x)?.iter().map(|p| p.quad(&frame.vectors[j])).collect())
}

/// Central-difference ∇λ_j, following the branch by eigenvector overlap.
pub fn eigen_gradient_fd(sys: &dyn ModelSystem, x: &[f64], j: usize, h_rel: f64) -> Result<Vec<f64>> {
    let frame = eig_sym(&sys.inertia(x)?, 0.0);
    check_simple(&frame, j, GAP_TOL)?;
    let v0 = frame.vectors[j].clone();
    let at = |y: &[f64]| -> Result<f64> {
        let f = eig_sym(&sys.inertia(y)?, 0.0);
        Ok(f.values[f.best_overlap(&v0).0])
    };
    crate::numeric::gradient(&at, x, h_rel)
}

pub fn lagrange_residual(sys: &dyn ModelSystem, x: &[f64], j: usize) -> Result<LagrangeFit> {
    lagrange_residual_gap(sys, x, j, GAP_TOL)
}

/// As [`lagrange_residual`] with a caller-chosen cluster tolerance, for
/// models whose eigenvectors are known to stay separated (e.g. a fixed
/// invariant axis). The difference cross-check is skipped (NaN) below
/// [`GAP_TOL`].
pub fn lagrange_residual_gap(sys: &dyn ModelSystem, x: &[f64], j: usize, gap_tol: f64) -> Result<LagrangeFit> {
    let frame = eig_sym(&sys.inertia(x)?, 0.0);
    if j >= frame.dim() {
        return Err(Error::Config(format!("branch {j} out of range")));
    }
    check_simple(&frame, j, gap_tol)?;
    let gl: Vec<f64> = sys.inertia_partials(x)?.iter().map(|p| p.quad(&frame.vectors[j])).collect();
    let gv = sys.grad_potential(x)?;
    let fd_mismatch = match eigen_gradient_fd(sys, x, j, 1e-5) {
        Ok(fd) => gl.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        Err(_) => f64::NAN,
    };
    let gg = dot(&gl, &gl);
    let nv = norm(&gv);
    let kappa = if gg > 1e-28 { dot(&gv, &gl) / gg } else { 0.0 };
    let r: Vec<f64> = gv.iter().zip(&gl).map(|(a, b)| a - kappa * b).collect();
    let residual = norm(&r);
    let relative = if nv > 0.0 { residual / nv } else { 0.0 };
    Ok(LagrangeFit {
        branch: j,
        lambda: frame.values[j],
        omega_dir: frame.vectors[j].clone(),
        kappa,
        residual,
        relative,
        grad_v: gv,
        grad_lambda: gl,
        fd_mismatch,
    })
}

/// Result of refining a batch of seeds; failures are per seed and not fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafSearch {
    pub found: Vec<RelEquilibrium>,
    pub failures: Vec<(usize, Error)>,
}

/// Index of the eigenvalue nearest `level`.
fn nearest_branch(frame: &EigenFrame, level: f64) -> usize {
    (0..frame.dim())
        .min_by(|&a, &b| (frame.values[a] - level).abs().total_cmp(&(frame.values[b] - level).abs()))
        .unwrap()
}

fn refine_seed(sys: &dyn ModelSystem, level: f64, seed: &[f64]) -> Result<RelEquilibrium> {
    let n = sys.chart_dim();
    if seed.len() != n {
        return Err(Error::Config(format!("seed has {} coordinates, expected {n}", seed.len())));
    }
    let scale = 1.0 + level.abs();
    let resid = |z: &[f64]| -> Result<Vec<f64>> {
        let x = &z[..n];
        if !sys.domain_test(x) {
            return Err(Error::Domain(format!("{x:?}")));
        }
        let frame = eig_sym(&sys.inertia(x)?, 0.0);
        let j = nearest_branch(&frame, level);
        let gv = sys.grad_potential(x)?;
        let parts = sys.inertia_partials(x)?;
        let mut r: Vec<f64> = (0..n).map(|i| gv[i] - z[n] * parts[i].quad(&frame.vectors[j])).collect();
        r.push(frame.values[j] - level);
        Ok(r)
    };
    // start κ from the least-squares fit at the seed
    let frame = eig_sym(&sys.inertia(seed)?, 0.0);
    let j0 = nearest_branch(&frame, level);
    let k0 = match lagrange_residual(sys, seed, j0) {
        Ok(f) => f.kappa.max(0.0),
        Err(_) => 1.0,
    };
    let mut z = seed.to_vec();
    z.push(k0);
    let out = crate::numeric::levenberg_marquardt(&resid, &z, 200, 1e-14 * scale)?;
    let x = &out.x[..n];
    let frame = eig_sym(&sys.inertia(x)?, 0.0);
    let j = nearest_branch(&frame, level);
    if (frame.values[j] - level).abs() > 1e-9 * scale {
        return Err(Error::NoConvergence(format!("left the leaf (λ = {})", frame.values[j])));
    }
    let fit = lagrange_residual(sys, x, j)?;
    if !fit.is_normal_re(RE_TOL) {
        return Err(Error::NotAnRe(fit.relative));
    }
    Ok(RelEquilibrium::from_fit(ShapePoint::standard(x), x.to_vec(), &fit, Family::Generic))
}

/// Normal RE on the leaf λ_j = level by damped Newton on (x, κ) from each seed.
pub fn find_re_with(sys: &dyn ModelSystem, level: f64, seeds: &[Vec<f64>]) -> LeafSearch {
    let results: Vec<Result<RelEquilibrium>> =
        seeds.par_iter().map(|s| refine_seed(sys, level, s)).collect();
    let mut found = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(re) => found.push(re),
            Err(e) => failures.push((i, e)),
        }
    }
    found.sort_by(|a, b| {
        a.embedded.iter().zip(&b.embedded).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut merged: Vec<RelEquilibrium> = Vec::new();
    for re in found {
        let dup = merged.iter().any(|m| {
            m.embedded.iter().zip(&re.embedded).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt() < 1e-6
        });
        if !dup {
            merged.push(re);
        }
    }
    LeafSearch { found: merged, failures }
}

pub fn find_re_on_leaf(spec: &LeafSpec, seeds: &[Vec<f64>]) -> Result<LeafSearch> {
    spec.validate()?;
    if matches!(spec.model, crate::web::LeafModel::Ellipsoid(_)) {
        return Err(Error::Unsupported("the ellipsoid model has no potential".into()));
    }
    let sys = spec.model.system().ok_or_else(|| Error::Unsupported(spec.model.id().into()))?;
    Ok(find_re_with(sys.as_ref(), spec.level, seeds))
}

/// Full-body great-circle RE: x on the axis e_k of the plane x_m = 0 with
/// ω = e_m and λ = I_m + |x|², kept when ∇V is collinear with ∇λ.
pub fn great_circle_candidates(body: &crate::models::FullBodySatellite, level: f64) -> Vec<Vec<f64>> {
    let mut seeds = Vec::new();
    for m in 0..3 {
        let r2 = level - body.moments[m];
        if r2 <= 0.0 {
            continue;
        }
        let r = r2.sqrt();
        for k in 0..3 {
            if k == m {
                continue;
            }
            for s in [1.0, -1.0] {
                let mut x = vec![0.0; 3];
                x[k] = s * r;
                seeds.push(x);
            }
        }
    }
    seeds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{FullBodyPotential, FullBodySatellite, Sphere2Body, Spherical3Body, Triatomic};
    use crate::web::LeafModel;

    #[test]
    fn lagrange_point_multiplier() {
        let b = Spherical3Body::default();
        let x = [0.5, 0.5, 0.5];
        let f = eig_sym(&b.inertia(&x).unwrap(), 0.0);
        let (j, _) = f.best_overlap(&[1.0, 1.0, 1.0]);
        let fit = lagrange_residual(&b, &x, j).unwrap();
        let want = 1.5 * 0.75f64.powf(-1.5);
        assert!((fit.kappa - want).abs() < 1e-12, "{}", fit.kappa);
        assert!(fit.residual < 1e-9);
        assert!(fit.fd_mismatch < 1e-8);
        for g in &fit.grad_lambda {
            assert!((g + 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn antisymmetric_plane_has_no_re() {
        // x1 = −x3: ∇λ is tangent to the plane while ∇V has all entries negative
        let b = Spherical3Body::default();
        for x in [[0.3, 0.1, -0.3], [-0.2, 0.4, 0.2], [0.5, -0.1, -0.5]] {
            for j in 0..3 {
                if let Ok(fit) = lagrange_residual(&b, &x, j) {
                    assert!(!fit.is_normal_re(1e-6), "{x:?} {j} {fit:?}");
                }
            }
        }
    }

    #[test]
    fn two_body_branch_signs() {
        let b = Sphere2Body::new(1.0, 1.0).unwrap();
        for th in [0.3, 0.9, 1.4] {
            let f = eig_sym(&b.inertia(&[th]).unwrap(), 0.0);
            let minus = f.values.iter().position(|&v| v < 1.0).unwrap();
            let plus = f.values.iter().position(|&v| v > 1.0 && v < 2.0 - 1e-9).unwrap();
            let fm = lagrange_residual(&b, &[th], minus).unwrap();
            assert!(fm.kappa > 0.0 && fm.residual < 1e-12);
            let fp = lagrange_residual(&b, &[th], plus).unwrap();
            assert!(fp.kappa < 0.0);
        }
    }

    #[test]
    fn repeated_eigenvalue_rejected() {
        let b = Spherical3Body::default();
        let e = lagrange_residual(&b, &[0.2, 0.2, 0.2], 1).unwrap_err();
        assert!(matches!(e, Error::RepeatedEigenvalue { .. }));
    }

    #[test]
    fn equilateral_on_leaf() {
        let spec = LeafSpec::eigenvalue(LeafModel::S3Body, 1.5).unwrap();
        let seeds: Vec<Vec<f64>> = [0.1, 0.2, 0.3, 0.4].iter().map(|&t| vec![t, t, t]).collect();
        let s = find_re_on_leaf(&spec, &seeds).unwrap();
        assert_eq!(s.found.len(), 1, "{s:?}");
        for c in &s.found[0].embedded {
            assert!((c - 0.25).abs() < 1e-10);
        }
        assert!(s.found[0].kappa > 0.0);
    }

    #[test]
    fn ellipsoid_leaf_search_unsupported() {
        let e = crate::models::RiemannEllipsoid::new(3.0, 1.0).unwrap();
        let spec = LeafSpec::eigenvalue(LeafModel::Ellipsoid(e), 1.0).unwrap();
        assert!(matches!(find_re_on_leaf(&spec, &[]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn full_body_radial_and_great_circle() {
        let mut body = FullBodySatellite::new([1.0, 2.0, 3.0]).unwrap();
        let level = 7.0;
        let radial: Vec<Vec<f64>> = {
            let mut s = Vec::new();
            for k in 0..3 {
                for sg in [1.0, -1.0] {
                    let mut x = vec![0.3, -0.2, 0.25];
                    x[k] = sg * 2.2;
                    s.push(x);
                }
            }
            s
        };
        let found = find_re_with(&body, level, &radial).found;
        assert!(found.len() >= 2, "{found:?}");
        body.potential = FullBodyPotential::OffsetPoint { mu: 1.0, offset: 0.4 };
        let gc = great_circle_candidates(&body, level);
        let found = find_re_with(&body, level, &gc).found;
        let great: Vec<_> = found
            .iter()
            .filter(|re| {
                let x = &re.embedded;
                let w = &re.omega_dir;
                (x[0] * w[0] + x[1] * w[1] + x[2] * w[2]).abs() < 1e-9
            })
            .collect();
        assert!(great.len() >= 4, "{found:?}");
    }

    #[test]
    fn triatomic_equilibrium_bifurcates() {
        let t = Triatomic::new([1.0, 2.0, 3.0]).unwrap();
        let x0 = t.rest_point().unwrap();
        let f0 = eig_sym(&t.inertia(&x0).unwrap(), 0.0);
        for eps in [1e-1, 3e-2, 1e-2] {
            let mut near = 0;
            for j in 0..3 {
                // a leaf slightly above λ_j(x0) has critical points of V near x0
                let level = f0.values[j] * (1.0 + eps * eps);
                let seeds = vec![x0.to_vec()];
                let s = find_re_with(&t, level, &seeds);
                near += s
                    .found
                    .iter()
                    .filter(|re| norm(&re.embedded.iter().zip(&x0).map(|(a, b)| a - b).collect::<Vec<_>>()) < eps)
                    .count();
            }
            assert!(near >= 3, "eps {eps}: {near}");
        }
    }
}
