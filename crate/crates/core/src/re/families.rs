use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lagrange_residual, lagrange_residual_gap, AbnormalReport, Family, LagrangeFit, RelEquilibrium, GAP_TOL, RE_TOL};
use crate::error::{Error, Result};
use crate::lie::eig_sym;
use crate::models::{Chart, Face, FaceChart, ModelSystem, ShapePoint, Sphere2Body, Spherical3Body};

/// cos θ_iso = 8^(−1/4): where the positive isosceles curve meets ∂T.
pub const THETA_ISO_X1: f64 = 0.594_603_557_501_360_5;

const SPECIAL_EPS: f64 = 1e-9;

/// Cluster tolerance for symmetry-fixed principal axes.
const AXIS_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefiningEquation {
    /// Forced by a reflection or permutation symmetry.
    Symmetric,
    Scalene,
    /// Unsquared signed isosceles relation, checked in squared form too.
    Isosceles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoscelesSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCurve {
    pub family: Family,
    pub equation: DefiningEquation,
    pub range: [f64; 2],
    pub params: Vec<f64>,
    pub samples: Vec<RelEquilibrium>,
    /// Parameters where a root was found but failed the collinearity test.
    pub rejected: Vec<f64>,
    /// Parameters where the bracketing sweep found no root.
    pub missing: Vec<f64>,
}

impl FamilyCurve {
    fn empty(family: Family, equation: DefiningEquation, range: [f64; 2]) -> Self {
        FamilyCurve { family, equation, range, params: vec![], samples: vec![], rejected: vec![], missing: vec![] }
    }

    fn push(&mut self, p: f64, r: Result<RelEquilibrium>) {
        match r {
            Ok(re) => {
                self.params.push(p);
                self.samples.push(re);
            }
            Err(Error::NoRoot { .. }) => self.missing.push(p),
            Err(_) => self.rejected.push(p),
        }
    }
}

fn fit_branch<M: ModelSystem>(sys: &M, y: &[f64], j: usize) -> Result<LagrangeFit> {
    let fit = lagrange_residual(sys, y, j)?;
    if !fit.is_normal_re(RE_TOL) {
        return Err(Error::NotAnRe(fit.relative));
    }
    Ok(fit)
}

/// Branch with κ ≥ 0 and the smallest residual among simple eigenvalues.
fn best_branch<M: ModelSystem>(sys: &M, y: &[f64], candidates: &[usize], gap_tol: f64) -> Result<LagrangeFit> {
    let mut best: Option<LagrangeFit> = None;
    let mut worst = f64::INFINITY;
    for &j in candidates {
        match lagrange_residual_gap(sys, y, j, gap_tol) {
            Ok(f) if f.kappa >= 0.0 => {
                worst = worst.min(f.relative);
                if best.as_ref().map_or(true, |b| f.relative < b.relative) {
                    best = Some(f);
                }
            }
            Ok(f) => worst = worst.min(f.relative),
            Err(_) => {}
        }
    }
    match best {
        Some(f) if f.relative <= RE_TOL => Ok(f),
        _ => Err(Error::NotAnRe(worst)),
    }
}

fn face_point(face: Face, y: [f64; 2]) -> ShapePoint {
    ShapePoint { chart: Chart::Face(face), coords: y.to_vec() }
}

/// Coplanar isosceles RE with two particles θ either side of the middle one.
///
/// The rotation axis is whichever in-plane principal axis gives κ ≥ 0:
/// through the middle particle (Type i) or orthogonal to it (Type ii).  For
/// the cotangent potential this switches exactly at 2π/3.
pub fn eulerian_family(body: &Spherical3Body, theta: f64) -> Result<RelEquilibrium> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("theta = {theta}")));
    }
    if (theta - FRAC_PI_3).abs() < SPECIAL_EPS || (theta - 2.0 * FRAC_PI_3).abs() < SPECIAL_EPS {
        return Err(Error::AbnormalAt(theta));
    }
    if (theta - FRAC_PI_2).abs() < SPECIAL_EPS {
        return Err(Error::Singular("outer particles antipodal".into()));
    }
    let face = if theta < FRAC_PI_2 { Face::F2 } else { Face::F0 };
    let chart = body.face_chart(face);
    let y = [theta, theta];
    let frame = eig_sym(&chart.inertia(&y)?, 0.0);
    let (jz, _) = frame.best_overlap(&[0.0, 0.0, 1.0]);
    let (jx, _) = frame.best_overlap(&[1.0, 0.0, 0.0]);
    // the three axes are eigenvectors by the q1 ↔ q3 reflection for every θ,
    // so only exact coincidence makes the branch ambiguous
    let fit = best_branch(&chart, &y, &[jz, jx], AXIS_GAP)?;
    let family = if fit.branch == jz { Family::EulerI } else { Family::EulerII };
    Ok(RelEquilibrium::from_fit(face_point(face, y), chart.to_x(&y).to_vec(), &fit, family))
}

/// Spherical equilateral triangle with side φ rotating about its centre axis.
pub fn lagrangian_family(body: &Spherical3Body, phi: f64) -> Result<RelEquilibrium> {
    if !(phi > 0.0 && phi < 2.0 * FRAC_PI_3) {
        return Err(Error::Domain(format!("phi = {phi}")));
    }
    if (phi - FRAC_PI_2).abs() < SPECIAL_EPS {
        return Err(Error::AbnormalAt(phi));
    }
    let c = phi.cos();
    let x = [c, c, c];
    let frame = eig_sym(&body.inertia(&x)?, 0.0);
    let (j, _) = frame.best_overlap(&[1.0, 1.0, 1.0]);
    let fit = fit_branch(body, &x, j)?;
    Ok(RelEquilibrium::from_fit(ShapePoint::standard(&x), x.to_vec(), &fit, Family::Lagrange2I))
}

/// Equatorial equilateral triangle spinning in its plane with momentum |L|².
/// Here ∇V = ∇λ = 0, so every κ solves the collinearity condition.
pub fn planar_iii(body: &Spherical3Body, lsq: f64) -> Result<RelEquilibrium> {
    if !(lsq >= 0.0) {
        return Err(Error::Config(format!("|L|² = {lsq} must be nonnegative")));
    }
    let chart = body.face_chart(Face::F0);
    let y = [2.0 * FRAC_PI_3; 2];
    let frame = eig_sym(&chart.inertia(&y)?, 0.0);
    let (j, _) = frame.best_overlap(&[0.0, 1.0, 0.0]);
    let fit = lagrange_residual(&chart, &y, j)?;
    let gv = super::norm(&fit.grad_v);
    let gl = super::norm(&fit.grad_lambda);
    if gv > 1e-12 || gl > 1e-12 {
        return Err(Error::NotAnRe(gv.max(gl)));
    }
    let lambda = fit.lambda;
    let kappa = lsq / (2.0 * lambda * lambda);
    Ok(RelEquilibrium {
        x: face_point(Face::F0, y),
        embedded: chart.to_x(&y).to_vec(),
        branch: j,
        lambda,
        omega_dir: fit.omega_dir,
        kappa,
        momentum_sq: lsq,
        family: Family::PlanarIII,
        normal: true,
        residual: 0.0,
    })
}

fn csc2(t: f64) -> f64 {
    1.0 / t.sin().powi(2)
}

/// LHS − RHS of the scalene relation on F2, γ = α + β.
pub fn scalene_residual(alpha: f64, beta: f64) -> f64 {
    let g = alpha + beta;
    (2.0 * beta).sin() * (csc2(alpha) + csc2(g)) + (2.0 * g).sin() * (csc2(alpha) - csc2(beta))
        - (2.0 * alpha).sin() * (csc2(beta) + csc2(g))
}

/// Squared isosceles relation in the apex angle α and base angle β.
pub fn isosceles_residual(alpha: f64, beta: f64) -> f64 {
    let (sa, sb) = (alpha.sin(), beta.sin());
    alpha.cos() * (2.0 * sa.powi(6) - sb.powi(6)) - sa.powi(3) * sb.powi(3) * beta.cos()
}

/// Signed form in cosines: ±(1−x2²)^{3/2}√(8x1²+x2²) − 4x1(1−x1²)^{3/2} + x2(1−x2²)^{3/2}.
pub fn isosceles_signed(sign: IsoscelesSign, x1: f64, x2: f64) -> f64 {
    let s = match sign {
        IsoscelesSign::Plus => 1.0,
        IsoscelesSign::Minus => -1.0,
    };
    let a = (1.0 - x2 * x2).max(0.0).powf(1.5);
    let b = (1.0 - x1 * x1).max(0.0).powf(1.5);
    s * a * (8.0 * x1 * x1 + x2 * x2).sqrt() - 4.0 * x1 * b + x2 * a
}

/// Roots of `f` on (lo, hi) after dividing out the trivial root at `trivial`.
fn deflated_roots<F: Fn(f64) -> f64>(f: F, trivial: f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let d = |t: f64| {
        let den = t - trivial;
        if den.abs() < 1e-13 {
            f64::NAN
        } else {
            f(t) / den
        }
    };
    crate::numeric::all_roots(d, lo, hi, n, 1e-15)
        .into_iter()
        .filter(|r| (r - trivial).abs() > 1e-6)
        .collect()
}

fn require_cot(body: &Spherical3Body) -> Result<()> {
    if body.potential.label() != "cot" {
        return Err(Error::Unsupported("scalene and isosceles families need the cotangent potential".into()));
    }
    Ok(())
}

fn grid(range: [f64; 2], n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(range[0] < range[1]) {
        return Err(Error::Config(format!("bad parameter grid {range:?} × {n}")));
    }
    Ok((0..n).map(|k| range[0] + (range[1] - range[0]) * k as f64 / (n - 1) as f64).collect())
}

fn scalene_at(chart: &FaceChart, alpha: f64) -> Result<RelEquilibrium> {
    let hi = PI - alpha - 1e-9;
    let roots = deflated_roots(|b| scalene_residual(alpha, b), alpha, 1e-9, hi, 4000);
    let beta = *roots.first().ok_or(Error::NoRoot { lo: 0.0, hi })?;
    let y = [alpha, beta];
    let fit = best_branch(chart, &y, &[0, 1], GAP_TOL)?;
    Ok(RelEquilibrium::from_fit(face_point(Face::F2, y), chart.to_x(&y).to_vec(), &fit, Family::ScaleneIV))
}

/// Scalene coplanar RE on F2: for each α, the nontrivial β solving the scalene relation.
pub fn scalene_curve(body: &Spherical3Body, alpha_range: [f64; 2], n: usize) -> Result<FamilyCurve> {
    require_cot(body)?;
    let chart = body.face_chart(Face::F2);
    let ps = grid(alpha_range, n)?;
    let rs: Vec<Result<RelEquilibrium>> = ps.par_iter().map(|&a| scalene_at(&chart, a)).collect();
    let mut c = FamilyCurve::empty(Family::ScaleneIV, DefiningEquation::Scalene, alpha_range);
    for (p, r) in ps.into_iter().zip(rs) {
        c.push(p, r);
    }
    if c.samples.is_empty() {
        return Err(Error::NoRoot { lo: alpha_range[0], hi: alpha_range[1] });
    }
    Ok(c)
}

fn isosceles_at(body: &Spherical3Body, sign: IsoscelesSign, x1: f64) -> Result<RelEquilibrium> {
    // interior of T in the plane x1 = x3: 2x1² − 1 < x2 < 1
    let lo = (2.0 * x1 * x1 - 1.0).max(-1.0) + 1e-12;
    let hi = 1.0 - 1e-12;
    let roots = deflated_roots(|x2| isosceles_signed(sign, x1, x2), x1, lo, hi, 4000);
    let x2 = *roots.first().ok_or(Error::NoRoot { lo, hi })?;
    let x = [x1, x2, x1];
    let fit = best_branch(body, &x, &[0, 1, 2], GAP_TOL)?;
    Ok(RelEquilibrium::from_fit(ShapePoint::standard(&x), x.to_vec(), &fit, Family::Isosceles2II))
}

/// Isosceles RE in the plane x1 = x3, parametrized by the apex cosine x1.
pub fn isosceles_curve(
    body: &Spherical3Body,
    sign: IsoscelesSign,
    x1_range: [f64; 2],
    n: usize,
) -> Result<FamilyCurve> {
    require_cot(body)?;
    let ps = grid(x1_range, n)?;
    let rs: Vec<Result<RelEquilibrium>> = ps.par_iter().map(|&p| isosceles_at(body, sign, p)).collect();
    let mut c = FamilyCurve::empty(Family::Isosceles2II, DefiningEquation::Isosceles, x1_range);
    for (p, r) in ps.into_iter().zip(rs) {
        c.push(p, r);
    }
    if c.samples.is_empty() {
        return Err(Error::NoRoot { lo: x1_range[0], hi: x1_range[1] });
    }
    Ok(c)
}

fn symmetric_curve<F>(family: Family, range: [f64; 2], n: usize, f: F) -> FamilyCurve
where
    F: Fn(f64) -> Result<RelEquilibrium> + Sync,
{
    // open midpoint grid keeps away from the flagged special parameters
    let ps: Vec<f64> = (0..n).map(|k| range[0] + (range[1] - range[0]) * (k as f64 + 0.5) / n as f64).collect();
    let rs: Vec<Result<RelEquilibrium>> = ps.par_iter().map(|&p| f(p)).collect();
    let mut c = FamilyCurve::empty(family, DefiningEquation::Symmetric, range);
    for (p, r) in ps.into_iter().zip(rs) {
        c.push(p, r);
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub potential: String,
    pub curves: Vec<FamilyCurve>,
    pub abnormal: Vec<AbnormalReport>,
}

impl Catalog {
    pub fn families(&self) -> Vec<Family> {
        let mut f: Vec<Family> = self.curves.iter().filter(|c| !c.samples.is_empty()).map(|c| c.family).collect();
        f.sort();
        f.dedup();
        f
    }
}

/// Face midpoints of T: F0 then F1, F2, F3.
pub fn face_midpoints() -> [[f64; 3]; 4] {
    [[-0.5, -0.5, -0.5], [0.5, 0.5, -0.5], [0.5, -0.5, 0.5], [-0.5, 0.5, 0.5]]
}

/// All RE families of the equal-mass 3-body problem sampled with `n` points each.
pub fn classify_all(body: &Spherical3Body, n: usize) -> Result<Catalog> {
    if n < 2 {
        return Err(Error::Config("classification needs at least 2 samples per family".into()));
    }
    let mut curves = vec![
        symmetric_curve(Family::EulerI, [0.0, FRAC_PI_2], n, |t| eulerian_family(body, t)),
        symmetric_curve(Family::EulerI, [FRAC_PI_2, 2.0 * FRAC_PI_3], n, |t| eulerian_family(body, t)),
        symmetric_curve(Family::EulerII, [2.0 * FRAC_PI_3, PI], n, |t| eulerian_family(body, t)),
        symmetric_curve(Family::PlanarIII, [0.0, 80.0], n, |l| planar_iii(body, l)),
        symmetric_curve(Family::Lagrange2I, [0.0, 2.0 * FRAC_PI_3], n, |p| lagrangian_family(body, p)),
    ];
    if body.potential.label() == "cot" {
        curves.push(scalene_curve(body, [0.05, FRAC_PI_2 - 0.05], n)?);
        curves.push(isosceles_curve(body, IsoscelesSign::Plus, [0.02, THETA_ISO_X1 - 0.005], n)?);
        curves.push(isosceles_curve(body, IsoscelesSign::Minus, [-0.98, -0.02], n)?);
    }
    let mut abnormal = vec![super::abnormal_check_s3(body, &[0.0; 3])?];
    for m in face_midpoints() {
        abnormal.push(super::abnormal_check_s3(body, &m)?);
    }
    Ok(Catalog { potential: body.potential.label().to_string(), curves, abnormal })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoBodyCatalog {
    pub thetas: Vec<f64>,
    /// Normal RE found at each θ (one per θ expected).
    pub per_theta: Vec<Vec<RelEquilibrium>>,
    pub abnormal: Option<AbnormalReport>,
}

/// Normal RE over a midpoint θ-grid, plus the θ = π/2 abnormal family for equal masses.
pub fn classify_two_body(body: &Sphere2Body, n: usize) -> Result<TwoBodyCatalog> {
    if n < 2 {
        return Err(Error::Config("need at least 2 θ samples".into()));
    }
    let thetas: Vec<f64> = (0..n).map(|k| PI * (k as f64 + 0.5) / n as f64).collect();
    let per_theta: Vec<Vec<RelEquilibrium>> = thetas
        .par_iter()
        .map(|&t| {
            (0..3)
                .filter_map(|j| super::lagrange_residual_gap(body, &[t], j, 1e-12).ok())
                .filter(|f| f.is_normal_re(RE_TOL) && super::norm(&f.grad_lambda) > 0.0)
                .map(|f| RelEquilibrium::from_fit(ShapePoint::standard(&[t]), vec![t], &f, Family::Generic))
                .collect()
        })
        .collect();
    let abnormal = match super::two_body_abnormal(body) {
        Ok(r) => Some(r),
        Err(Error::NotOnLocus) => None,
        Err(e) => return Err(e),
    };
    Ok(TwoBodyCatalog { thetas, per_theta, abnormal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::InverseAngle;
    use std::sync::Arc;

    #[test]
    fn euler_types_by_interval() {
        let b = Spherical3Body::default();
        let r = eulerian_family(&b, 0.5).unwrap();
        assert_eq!(r.family, Family::EulerI);
        assert!(r.kappa > 0.0 && r.residual < 1e-12);
        assert_eq!(eulerian_family(&b, 2.5).unwrap().family, Family::EulerII);
        assert_eq!(eulerian_family(&b, 1.8).unwrap().family, Family::EulerI);
        assert_eq!(eulerian_family(&b, FRAC_PI_3).unwrap_err(), Error::AbnormalAt(FRAC_PI_3));
        assert!(eulerian_family(&b, FRAC_PI_2).is_err());
    }

    #[test]
    fn euler_eigenvalue_closed_form() {
        let b = Spherical3Body::default();
        for t in [0.3, 0.8, 1.3, 1.9, 2.2, 2.8] {
            let r = eulerian_family(&b, t).unwrap();
            let want = if t < 2.0 * FRAC_PI_3 { 1.0 - (2.0 * t).cos() } else { 2.0 + (2.0 * t).cos() };
            assert!((r.lambda - want).abs() < 1e-12, "{t}");
        }
    }

    #[test]
    fn lagrange_momentum() {
        let b = Spherical3Body::default();
        for phi in [0.4, 1.2, 1.9] {
            let r = lagrangian_family(&b, phi).unwrap();
            let c = phi.cos();
            assert!((r.lambda - 2.0 * (1.0 - c)).abs() < 1e-12);
            let lsq = 12.0 * (1.0 - c).powi(2) / phi.sin().powi(3);
            assert!((r.momentum_sq - lsq).abs() < 1e-9 * lsq);
        }
        assert!(matches!(lagrangian_family(&b, FRAC_PI_2), Err(Error::AbnormalAt(_))));
    }

    #[test]
    fn planar_iii_is_critical() {
        let b = Spherical3Body::default();
        let r = planar_iii(&b, 50.0).unwrap();
        assert!((r.lambda - 3.0).abs() < 1e-12);
        for (c, w) in r.embedded.iter().zip([-0.5; 3]) {
            assert!((c - w).abs() < 1e-12);
        }
    }

    #[test]
    fn scalene_crosses_diagonal_near_threshold() {
        let b = Spherical3Body::default();
        let c = scalene_curve(&b, [0.05, 1.52], 60).unwrap();
        assert!(c.rejected.is_empty() && c.missing.len() <= 1, "{:?} {:?}", c.rejected, c.missing);
        for s in &c.samples {
            let y = &s.x.coords;
            assert!(scalene_residual(y[0], y[1]).abs() < 1e-10);
            assert!(s.kappa >= 0.0 && s.residual < 1e-8);
        }
        // β − α changes sign once, near θ_scal
        let d: Vec<f64> = c.samples.iter().map(|s| s.x.coords[1] - s.x.coords[0]).collect();
        let k = d.windows(2).position(|w| w[0] * w[1] < 0.0).unwrap();
        let a = c.samples[k].x.coords[0];
        assert!((a - 0.906).abs() < 0.03, "{a}");
    }

    #[test]
    fn isosceles_curves_verify() {
        let b = Spherical3Body::default();
        for (sign, range, branch) in [
            (IsoscelesSign::Plus, [0.05, 0.58], 0),
            (IsoscelesSign::Minus, [-0.95, -0.05], 2),
        ] {
            let c = isosceles_curve(&b, sign, range, 30).unwrap();
            assert!(c.rejected.is_empty() && c.missing.is_empty(), "{sign:?} {c:?}");
            for s in &c.samples {
                let x = &s.embedded;
                assert_eq!(s.branch, branch);
                assert!(isosceles_signed(sign, x[0], x[1]).abs() < 1e-12);
                assert!(isosceles_residual(x[0].acos(), x[1].acos()).abs() < 1e-10);
            }
        }
        // sample oracle from the sweep
        let r = isosceles_at(&b, IsoscelesSign::Plus, 0.45).unwrap();
        assert!((r.embedded[1] - 0.00928).abs() < 1e-4);
    }

    #[test]
    fn trivial_branches_satisfy_equations() {
        for a in [0.3, 0.7, 1.1] {
            assert!(scalene_residual(a, a).abs() < 1e-12);
            assert!(isosceles_residual(a, a).abs() < 1e-12);
        }
    }

    #[test]
    fn catalog_families() {
        let b = Spherical3Body::default();
        let cat = classify_all(&b, 24).unwrap();
        assert_eq!(cat.families().len(), 6);
        assert_eq!(cat.abnormal.iter().filter(|a| a.exists).count(), 5);
        for c in &cat.curves {
            assert!(c.rejected.is_empty(), "{:?} {:?}", c.family, c.rejected);
        }
        // a generic attractive potential keeps only the symmetry-forced families
        let g = Spherical3Body::with_potential(Arc::new(InverseAngle));
        let cat = classify_all(&g, 24).unwrap();
        let fam = cat.families();
        assert!(!fam.contains(&Family::ScaleneIV) && !fam.contains(&Family::Isosceles2II));
        for f in [Family::EulerI, Family::PlanarIII, Family::Lagrange2I] {
            assert!(fam.contains(&f));
        }
        for c in &cat.curves {
            assert!(c.rejected.is_empty(), "{:?} {:?}", c.family, c.rejected);
        }
    }

    #[test]
    fn two_body_one_re_per_theta() {
        let b = Sphere2Body::new(1.0, 1.0).unwrap();
        let c = classify_two_body(&b, 400).unwrap();
        assert!(c.per_theta.iter().all(|v| v.len() == 1));
        assert!(c.abnormal.unwrap().exists);
        for (t, v) in c.thetas.iter().zip(&c.per_theta) {
            // λ− below the right angle, λ+ above
            assert_eq!(v[0].lambda < 1.0, *t < FRAC_PI_2);
        }
    }
}
