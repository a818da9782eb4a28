//! Property and oracle suite behind the `verify` command.  Every check
//! reports the worst error it saw against a fixed bound.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::io::{execute, Command, ModelId, RunConfig};
use crate::lie::{char_poly, discriminant, eig_sym, mat_vec, rotation, signature, SymTensor, Vec3};
use crate::models::{
    cayley, tetrahedral_group, Chart, FullBodySatellite, ModelSystem, Sphere2Body, Spherical3Body, Triatomic,
};
use crate::numeric::{bisect, deriv1, deriv2};
use crate::re::{
    classify_all, classify_two_body, isosceles_residual, isosceles_signed, lagrange_residual_gap,
    scalene_residual, Catalog, FamilyCurve, Family, IsoscelesSign, RelEquilibrium,
};
use crate::stability::{
    amended_potential, euler_boundary_printed, hess_vl, signature_scan, threshold, thresholds, ScanFamily,
    ThresholdName, Verdict,
};
use crate::web::{extract_leaf, s3body_implicit, LeafModel, LeafSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

fn bounded(name: &'static str, worst: f64, tol: f64) -> Check {
    Check { name, passed: worst <= tol, detail: format!("worst {worst:.3e} (bound {tol:.0e})") }
}

fn failed(name: &'static str, why: impl std::fmt::Display) -> Check {
    Check { name, passed: false, detail: why.to_string() }
}

fn random_sym(rng: &mut ChaCha8Rng) -> SymTensor {
    let mut s = SymTensor::zeros(3);
    for i in 0..3 {
        for j in 0..=i {
            s.set(i, j, rng.gen_range(-1.0..1.0));
        }
    }
    s
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = crate::lie::norm(&v);
        if n > 0.1 && n <= 1.0 {
            return crate::lie::scale(1.0 / n, &v);
        }
    }
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let r = rotation(&random_unit(rng), rng.gen_range(0.0..2.0 * PI));
    r.iter().map(|row| row.to_vec()).collect()
}

/// Random interior point of the curvy tetrahedron, away from collisions.
fn random_interior(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let x = [rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95)];
        if cayley(&x) > 0.02 {
            return x;
        }
    }
}

/// Random planar triangle in the triatomic cone x0x1 > x2².
fn random_cone_point(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let (a, b) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
    let c = rng.gen_range(-0.95..0.95) * f64::sqrt(a * b);
    [a, b, c]
}

fn poly_gap(a: &SymTensor, b: &SymTensor) -> f64 {
    let (p, q) = (char_poly(a), char_poly(b));
    (0..4).map(|k| (p.c[k] - q.c[k]).abs()).fold(0.0, f64::max)
}

/// Locked inertia Σ m(|q|² Id − q qᵀ) of explicit positions.
fn locked_inertia(masses: &[f64], q: &[Vec3]) -> SymTensor {
    let mut s = SymTensor::zeros(3);
    for (m, p) in masses.iter().zip(q) {
        let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        for i in 0..3 {
            for j in 0..=i {
                let d = if i == j { r2 } else { 0.0 };
                s.set(i, j, s.get(i, j) + m * (d - p[i] * p[j]));
            }
        }
    }
    s
}

fn rotate_all(r: &[Vec<f64>], q: &[Vec3]) -> Vec<Vec3> {
    let m = [[r[0][0], r[0][1], r[0][2]], [r[1][0], r[1][1], r[1][2]], [r[2][0], r[2][1], r[2][2]]];
    q.iter().map(|p| mat_vec(&m, p)).collect()
}

fn eigen_reconstruction(rng: &mut ChaCha8Rng) -> Check {
    let mut worst_rec: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    let mut mats: Vec<SymTensor> = (0..200).map(|_| random_sym(rng)).collect();
    for _ in 0..50 {
        let a = [rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0)];
        let b = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        mats.push(SymTensor::block_ab(&a, &b));
    }
    for s in &mats {
        let f = eig_sym(s, 1e-10);
        let n = s.dim();
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n).map(|k| f.vectors[k][i] * f.values[k] * f.vectors[k][j]).sum();
                worst_rec = worst_rec.max((r - s.get(i, j)).abs() / s.norm().max(1e-300));
                let d: f64 = (0..n).map(|k| f.vectors[i][k] * f.vectors[j][k]).sum();
                worst_orth = worst_orth.max((d - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    let mut c = bounded("eigen-reconstruction", worst_rec, 1e-9);
    c.passed &= worst_orth <= 1e-12;
    c.detail = format!("{}; orthonormality {worst_orth:.3e} (bound 1e-12)", c.detail);
    c
}

fn real_spectrum(rng: &mut ChaCha8Rng) -> Check {
    let worst = (0..500).map(|_| -discriminant(&char_poly(&random_sym(rng)))).fold(f64::MIN, f64::max);
    Check {
        name: "real-spectrum",
        passed: worst <= 1e-12,
        detail: format!("min discriminant {:.3e} (bound -1e-12)", -worst),
    }
}

fn signature_conjugation(rng: &mut ChaCha8Rng) -> Check {
    let bad = (0..200)
        .filter(|_| {
            let s = random_sym(rng);
            let r = random_rotation(rng);
            signature(&s, 1e-10) != signature(&s.conjugate(&r), 1e-10)
        })
        .count();
    Check { name: "signature-conjugation", passed: bad == 0, detail: format!("{bad} of 200 changed") }
}

fn char_poly_coincidence(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let q = [random_unit(rng), random_unit(rng), random_unit(rng)];
        let x = Spherical3Body::x_of(&q);
        worst = worst.max(poly_gap(&locked_inertia(&[1.0; 3], &q), &Spherical3Body::pi(&x)));
    }
    for _ in 0..200 {
        let m = [rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0)];
        let t = Triatomic::new(m).expect("positive masses");
        let x = random_cone_point(rng);
        match t.configuration(&x) {
            Ok(q) => worst = worst.max(poly_gap(&locked_inertia(&m, &q), &t.pi(&x))),
            Err(e) => return failed("char-poly-coincidence", e),
        }
    }
    bounded("char-poly-coincidence", worst, 1e-10)
}

fn conjugation_covariance(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let q: Vec<Vec3> = (0..3).map(|_| random_unit(rng)).collect();
        let r = random_rotation(rng);
        let a = eig_sym(&locked_inertia(&[1.0; 3], &q), 0.0);
        let b = eig_sym(&locked_inertia(&[1.0; 3], &rotate_all(&r, &q)), 0.0);
        for k in 0..3 {
            worst = worst.max((a.values[k] - b.values[k]).abs());
        }
    }
    bounded("conjugation-covariance", worst, 1e-10)
}

/// Best normal-RE residual at `x` for the eigenvalue `lambda`, in the 3-body
/// chart that is regular there.
fn nrm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn re_residual_at(body: &Spherical3Body, x: &[f64; 3], lambda: f64, on_boundary: bool) -> Result<f64> {
    let fits = |sys: &dyn ModelSystem, y: &[f64]| -> f64 {
        (0..3)
            .filter_map(|j| lagrange_residual_gap(sys, y, j, 1e-12).ok())
            .filter(|f| (f.lambda - lambda).abs() < 1e-8 * (1.0 + lambda))
            // ∇V = ∇λ = 0 (planar-iii): every κ solves the condition
            .map(|f| if nrm(&f.grad_v).max(nrm(&f.grad_lambda)) <= 1e-12 { 0.0 } else { f.relative })
            .fold(f64::INFINITY, f64::min)
    };
    if on_boundary {
        let (face, y) = Spherical3Body::face_of(x)?;
        Ok(fits(&body.face_chart(face), &y))
    } else {
        Ok(fits(body, x))
    }
}

fn tetrahedral_symmetry(rng: &mut ChaCha8Rng, body: &Spherical3Body, cat: &Catalog) -> Check {
    let group = tetrahedral_group();
    let mut worst_eig: f64 = 0.0;
    let mut worst_v: f64 = 0.0;
    for _ in 0..50 {
        let x = random_interior(rng);
        let e0 = eig_sym(&Spherical3Body::pi(&x), 0.0);
        let v0 = body.potential(&x).unwrap_or(f64::NAN);
        for g in &group {
            let gx = g.apply(&x);
            let e = eig_sym(&Spherical3Body::pi(&gx), 0.0);
            for k in 0..3 {
                worst_eig = worst_eig.max((e.values[k] - e0.values[k]).abs());
            }
            if g.preserves_potential() {
                let v = body.potential(&gx).unwrap_or(f64::NAN);
                worst_v = worst_v.max(((v - v0) / (1.0 + v0.abs())).abs());
            }
        }
    }
    // images of emitted RE under the potential-preserving subgroup
    let mut worst_re: f64 = 0.0;
    for re in cat.curves.iter().flat_map(|c| c.samples.iter().step_by(4)) {
        let x = [re.embedded[0], re.embedded[1], re.embedded[2]];
        let on_boundary = matches!(re.x.chart, Chart::Face(_));
        for g in group.iter().filter(|g| g.preserves_potential()) {
            match re_residual_at(body, &g.apply(&x), re.lambda, on_boundary) {
                Ok(r) => worst_re = worst_re.max(r),
                Err(e) => return failed("tetrahedral-symmetry", format!("{:?} at {x:?}: {e}", re.family)),
            }
        }
    }
    let passed = worst_eig <= 1e-12 && worst_v <= 1e-12 && worst_re < 1e-8;
    Check {
        name: "tetrahedral-symmetry",
        passed,
        detail: format!(
            "eigenvalues {worst_eig:.3e} over 24 elements; potential {worst_v:.3e} and RE residual {worst_re:.3e} over the 6 that preserve V"
        ),
    }
}

fn kappa_sign(cat: &Catalog, two: &[RelEquilibrium]) -> Check {
    let all: Vec<&RelEquilibrium> = cat.curves.iter().flat_map(|c| &c.samples).chain(two).collect();
    let neg = all.iter().filter(|r| r.kappa < 0.0).count();
    let worst_r = all.iter().map(|r| r.residual).fold(0.0, f64::max);
    // sin of the angle between ∇V and κ∇λ is at most the relative residual
    let cos = (1.0 - worst_r * worst_r).sqrt();
    Check {
        name: "kappa-sign",
        passed: neg == 0 && cos > 1.0 - 1e-10 && !all.is_empty(),
        detail: format!("{} RE, {neg} with kappa < 0, min cos angle {cos:.15}", all.len()),
    }
}

/// Largest ratio of a secant slope of λ along a curve to its neighbours'.
fn branch_jump(c: &FamilyCurve) -> f64 {
    let s: Vec<f64> = c
        .params
        .windows(2)
        .zip(c.samples.windows(2))
        .map(|(p, r)| (r[1].lambda - r[0].lambda).abs() / (p[1] - p[0]).abs())
        .collect();
    let mut worst: f64 = 0.0;
    for k in 1..s.len().saturating_sub(1) {
        let local = s[k - 1].max(s[k + 1]).max(1e-9);
        worst = worst.max(s[k] / local);
    }
    worst
}

fn branch_continuity(cat: &Catalog) -> Check {
    let (mut worst, mut at) = (0.0, String::new());
    for c in &cat.curves {
        let j = branch_jump(c);
        if j > worst {
            worst = j;
            at = c.family.label().to_string();
        }
    }
    let mut ch = bounded("branch-continuity", worst, 10.0);
    ch.detail = format!("largest slope ratio {worst:.3} on {at} (bound 10)");
    ch
}

fn curve_equations(cat: &Catalog) -> Check {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for c in &cat.curves {
        for s in &c.samples {
            let r = match c.family {
                Family::ScaleneIV => scalene_residual(s.x.coords[0], s.x.coords[1]),
                Family::Isosceles2II => isosceles_residual(s.embedded[0].acos(), s.embedded[1].acos()),
                _ => continue,
            };
            worst = worst.max(r.abs());
            n += 1;
        }
    }
    let mut ch = bounded("curve-equations", worst, 1e-10);
    ch.passed &= n > 0;
    ch.detail = format!("{n} scalene/isosceles samples, {}", ch.detail);
    ch
}

fn two_body_completeness() -> Check {
    let body = Sphere2Body::new(1.0, 1.0).expect("unit masses");
    match classify_two_body(&body, 10_000) {
        Ok(cat) => {
            let bad = cat.per_theta.iter().filter(|v| v.len() != 1).count();
            let abn = cat.abnormal.as_ref().is_some_and(|a| a.exists);
            Check {
                name: "two-body-completeness",
                passed: bad == 0 && abn,
                detail: format!("{bad} of 10000 thetas without exactly one normal RE; abnormal family at pi/2: {abn}"),
            }
        }
        Err(e) => failed("two-body-completeness", e),
    }
}

fn web_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut worst_eig: f64 = 0.0;
    let mut worst_dil: f64 = 0.0;
    for level in [0.5, 1.5, 2.5] {
        let spec = LeafSpec::eigenvalue(LeafModel::S3Body, level).expect("valid level");
        let mesh = match extract_leaf(&spec, LeafModel::S3Body.default_bounds(), 32) {
            Ok(m) => m,
            Err(e) => return vec![failed("leaf-eigenvalue", e)],
        };
        for v in &mesh.vertices {
            let f = eig_sym(&Spherical3Body::pi(v), 0.0);
            let d = f.values.iter().map(|l| (l - level).abs()).fold(f64::INFINITY, f64::min);
            worst_eig = worst_eig.max(d / (1.0 + level));
            let m = level - 2.0;
            worst_dil = worst_dil.max(cayley(&[v[0] / m, v[1] / m, v[2] / m]).abs());
        }
    }
    let mut worst_cover: f64 = 0.0;
    for _ in 0..200 {
        let x = random_interior(rng);
        for l in eig_sym(&Spherical3Body::pi(&x), 0.0).values {
            worst_cover = worst_cover.max(s3body_implicit(&x, l).abs());
        }
    }
    let mut worst_param: f64 = 0.0;
    for _ in 0..200 {
        let l = rng.gen_range(0.0..3.0);
        let (a, b) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let x = [(l - 2.0) * a.cos(), (l - 2.0) * b.cos(), (l - 2.0) * (-a - b).cos()];
        worst_param = worst_param.max(s3body_implicit(&x, l).abs());
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let x = [(l - 2.0) * a.cosh(), -(l - 2.0) * b.cosh(), -(l - 2.0) * (-a - b).cosh()];
        worst_param = worst_param.max(s3body_implicit(&x, l).abs());
    }
    vec![
        bounded("leaf-eigenvalue", worst_eig, 1e-6),
        bounded("leaf-dilation", worst_dil, 1e-9),
        bounded("web-covers-shape-space", worst_cover, 1e-10),
        bounded("cayley-parametrization", worst_param, 1e-12),
    ]
}

fn great_circle(rng: &mut ChaCha8Rng) -> Check {
    let body = FullBodySatellite::new([1.0, 2.0, 3.0]).expect("positive moments");
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let m = k % 3;
        let mut x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        x[m] = 0.0;
        let i = match body.inertia(&x) {
            Ok(i) => i,
            Err(e) => return failed("great-circle", e),
        };
        let mut e = [0.0; 3];
        e[m] = 1.0;
        let want = body.moments[m] + x.iter().map(|v| v * v).sum::<f64>();
        let got = i.mul_vec(&e);
        for r in 0..3 {
            worst = worst.max((got[r] - want * e[r]).abs());
        }
    }
    bounded("great-circle", worst, 1e-12)
}

/// Root of `g` near a sign change inside (lo, hi).
fn root(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    bisect(g, lo, hi, 1e-14).ok()
}

fn threshold_cross_identification() -> Check {
    let h = 1e-6;
    let t_scal = threshold(ThresholdName::ThetaScal).value;
    let t_iso = threshold(ThresholdName::ThetaIso).value;
    let p_scal = threshold(ThresholdName::PhiScal).value;
    // the deflated scalene relation vanishes on the diagonal where its β-slope does
    let g = |a: f64| deriv1(|b| Ok(scalene_residual(a, b)), a, h).unwrap_or(f64::NAN);
    let meet = root(g, 0.8, 1.0);
    // positive isosceles curve reaches x2 = 2x1² − 1 on the boundary
    let iso = root(|c| isosceles_signed(IsoscelesSign::Plus, c, 2.0 * c * c - 1.0), 0.5, 0.7);
    // the isosceles curves cross the equilateral line where their x2-slope vanishes
    let eq = |s: IsoscelesSign| move |c: f64| deriv1(|x2| Ok(isosceles_signed(s, c, x2)), c, h).unwrap_or(f64::NAN);
    let plus = root(eq(IsoscelesSign::Plus), 0.0, 0.6).map(f64::acos);
    let minus = root(eq(IsoscelesSign::Minus), -0.6, 0.0).map(f64::acos);
    let errs = [
        meet.map(|a| (a - t_scal).abs()),
        iso.map(|c| (c.acos() - t_iso).abs()),
        plus.zip(minus).map(|(p, m)| {
            let (lo, hi) = (p.min(m), p.max(m));
            (lo - (FRAC_PI_2 - p_scal)).abs().max((hi - (FRAC_PI_2 + p_scal)).abs())
        }),
    ];
    match errs {
        [Some(a), Some(b), Some(c)] => {
            let mut ch = bounded("threshold-cross-identification", a.max(b).max(c), 1e-6);
            ch.detail = format!("scalene {a:.2e}, isosceles-boundary {b:.2e}, equilateral {c:.2e} (bound 1e-6)");
            ch
        }
        _ => failed("threshold-cross-identification", format!("missing intersection: {errs:?}")),
    }
}

/// Critical points of φ ↦ V_L along the equilateral line are minima.
fn vl_minima(body: &Spherical3Body) -> Check {
    let line = |phi: f64| [phi.cos(); 3];
    let branch = |phi: f64| eig_sym(&Spherical3Body::pi(&line(phi)), 0.0).best_overlap(&[1.0, 1.0, 1.0]).0;
    let mut found = 0;
    let mut worst: f64 = f64::INFINITY;
    for k in 0..40 {
        let lsq = 0.5 + 5.0 * k as f64;
        let vl = |phi: f64| amended_potential(body, &line(phi), branch(phi), lsq);
        let dv = |phi: f64| deriv1(vl, phi, 1e-6).unwrap_or(f64::NAN);
        let n = 400;
        let hi = 2.0 * FRAC_PI_3;
        let grid: Vec<f64> = (1..n).map(|i| hi * i as f64 / n as f64).collect();
        for w in grid.windows(2) {
            // φ = π/2 is the abnormal point where the branch is repeated
            if (w[0] - FRAC_PI_2).abs() < 1e-3 || (w[1] - FRAC_PI_2).abs() < 1e-3 {
                continue;
            }
            let (a, b) = (dv(w[0]), dv(w[1]));
            if a.is_finite() && b.is_finite() && a * b < 0.0 {
                if let Some(p) = root(dv, w[0], w[1]) {
                    found += 1;
                    worst = worst.min(deriv2(vl, p, 1e-4).unwrap_or(f64::NAN));
                }
            }
        }
    }
    Check {
        name: "vl-minima",
        passed: found > 0 && worst > 0.0,
        detail: format!("{found} critical points over 40 |L|^2 values, smallest second derivative {worst:.3e}"),
    }
}

fn verdict_parity(body: &Spherical3Body) -> Check {
    let mut n = 0;
    let mut bad = 0;
    for fam in [ScanFamily::Euler, ScanFamily::Lagrange, ScanFamily::PlanarIii] {
        let t = match signature_scan(body, fam, &ScanFamily::grid(fam.domain(), 60)) {
            Ok(t) => t,
            Err(e) => return failed("verdict-parity", e),
        };
        for r in t.rows.iter().filter_map(|r| r.report.as_ref()) {
            n += 1;
            let zeros = r.m_block.zero + r.vl.zero + r.jx.zero;
            let odd = r.total_plus() % 2 == 1 && zeros == 0;
            let all_plus = r.total_plus() == r.m_block.dim() + r.vl.dim() + r.jx.dim();
            let ok = (r.verdict == Verdict::UnstableOddIndex) == (odd && !all_plus)
                && (r.verdict == Verdict::StableByMinimum) == all_plus;
            bad += usize::from(!ok);
        }
    }
    Check { name: "verdict-parity", passed: bad == 0 && n > 0, detail: format!("{bad} of {n} reports inconsistent") }
}

fn boundary_hessian(body: &Spherical3Body) -> Check {
    let mut worst: f64 = 0.0;
    for (lo, hi) in [(0.0, FRAC_PI_2), (FRAC_PI_2, 2.0 * FRAC_PI_3), (2.0 * FRAC_PI_3, PI)] {
        for k in 0..8 {
            let t = lo + (hi - lo) * (k as f64 + 0.5) / 8.0;
            if (t - FRAC_PI_3).abs() < 1e-3 {
                continue;
            }
            let h = crate::re::eulerian_family(body, t).and_then(|re| hess_vl(body, &re));
            let Some((e1, e2)) = h.as_ref().ok().and_then(|h| h.face_quadratics()) else {
                return failed("boundary-hessian", format!("no boundary Hessian at theta {t}"));
            };
            let (p1, p2) = euler_boundary_printed(t);
            worst = worst.max(((e1 - p1) / p1).abs()).max(((e2 - p2) / p2).abs());
        }
    }
    bounded("boundary-hessian", worst, 1e-5)
}

fn small_configs() -> Vec<RunConfig> {
    let mut web = RunConfig::new(Command::Web);
    web.lambda = Some(1.5);
    web.grid.resolution = 24;
    let mut two = RunConfig::new(Command::Classify);
    two.model.id = ModelId::S2Body;
    two.grid.samples = 64;
    let mut stab = RunConfig::new(Command::Stability);
    stab.family = Some(ScanFamily::Lagrange);
    stab.grid.samples = 40;
    let mut ell = RunConfig::new(Command::Classify);
    ell.model.id = ModelId::Ellipsoid;
    ell.grid.resolution = 16;
    vec![web, two, stab, ell]
}

fn determinism() -> Check {
    for cfg in small_configs() {
        let run = || execute(&cfg).map(|o| o.files);
        match (run(), run()) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => return failed("determinism", format!("{} outputs differ", cfg.command.label())),
            (Err(e), _) | (_, Err(e)) => return failed("determinism", e),
        }
    }
    Check { name: "determinism", passed: true, detail: "web, classify (s2body, ellipsoid) and stability outputs repeat byte for byte".into() }
}

fn config_round_trip() -> Check {
    for cfg in small_configs() {
        let ok = cfg.resolve().and_then(|r| Ok((RunConfig::from_json(&r.to_json())?, r)));
        match ok {
            Ok((back, r)) if back == r => {}
            Ok(_) => return failed("config-round-trip", format!("{} config changed on reload", cfg.command.label())),
            Err(e) => return failed("config-round-trip", e),
        }
    }
    Check { name: "config-round-trip", passed: true, detail: "resolved configs reload unchanged".into() }
}

/// Run every check; `seed` drives all random sampling.
pub fn run_suite(seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let body = Spherical3Body::default();
    let mut checks = vec![
        eigen_reconstruction(&mut rng),
        real_spectrum(&mut rng),
        signature_conjugation(&mut rng),
        char_poly_coincidence(&mut rng),
        conjugation_covariance(&mut rng),
        great_circle(&mut rng),
    ];
    checks.extend(web_checks(&mut rng));
    match classify_all(&body, 80) {
        Ok(cat) => {
            checks.push(tetrahedral_symmetry(&mut rng, &body, &cat));
            let two = Sphere2Body::new(1.0, 1.0)
                .and_then(|b| classify_two_body(&b, 200))
                .map(|c| c.per_theta.into_iter().flatten().collect::<Vec<_>>())
                .unwrap_or_default();
            checks.push(kappa_sign(&cat, &two));
            checks.push(branch_continuity(&cat));
            checks.push(curve_equations(&cat));
        }
        Err(e) => checks.push(failed("classification", e)),
    }
    checks.push(two_body_completeness());
    checks.push(threshold_cross_identification());
    checks.push(vl_minima(&body));
    checks.push(verdict_parity(&body));
    checks.push(boundary_hessian(&body));
    let ts = thresholds();
    checks.push(bounded("threshold-residuals", ts.iter().map(|t| t.residual).fold(0.0, f64::max), 1e-12));
    checks.push(determinism());
    checks.push(config_round_trip());
    VerifyReport { seed, checks }
}
