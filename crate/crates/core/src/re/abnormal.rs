use serde::{Deserialize, Serialize};

use super::{norm, GAP_TOL};
use crate::error::{Error, Result};
use crate::lie::eig_sym;
use crate::models::{Chart, ModelSystem, ShapePoint, Sphere2Body, Spherical3Body};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub omega: Vec<f64>,
    /// ‖∇V − ∇K_x(ω)‖
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbnormalReport {
    pub x: ShapePoint,
    pub lambda: f64,
    pub multiplicity: usize,
    pub exists: bool,
    /// ∇V = 0: only the trivial ω = 0 solves the cone condition.
    pub equilibrium: bool,
    pub witnesses: Vec<Witness>,
}

/// Basis of the repeated eigenspace at x with its eigenvalue.
fn repeated_space(sys: &dyn ModelSystem, x: &[f64]) -> Result<(f64, Vec<Vec<f64>>)> {
    let f = eig_sym(&sys.inertia(x)?, 0.0);
    let n = f.dim();
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && f.values[j + 1] - f.values[j] < GAP_TOL * (1.0 + f.values[j].abs()) {
            j += 1;
        }
        if j > i && best.map_or(true, |(a, b)| j - i > b - a) {
            best = Some((i, j));
        }
        i = j + 1;
    }
    let (a, b) = best.ok_or(Error::NotOnLocus)?;
    let lam = f.values[a..=b].iter().sum::<f64>() / (b - a + 1) as f64;
    Ok((lam, f.vectors[a..=b].to_vec()))
}

fn combine(basis: &[Vec<f64>], c: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; basis[0].len()];
    for (e, ci) in basis.iter().zip(c) {
        for (wi, ei) in w.iter_mut().zip(e) {
            *wi += ci * ei;
        }
    }
    w
}

fn unit_directions(k: usize, count: usize) -> Vec<Vec<f64>> {
    match k {
        2 => (0..count)
            .map(|i| {
                let t = std::f64::consts::PI * (i as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci sphere
            let g = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    vec![r * (g * i as f64).cos(), r * (g * i as f64).sin(), z]
                })
                .collect()
        }
        _ => (0..k)
            .map(|i| {
                let mut e = vec![0.0; k];
                e[i] = 1.0;
                e
            })
            .collect(),
    }
}

fn push_unique(ws: &mut Vec<Witness>, w: Witness) {
    let same = |a: &[f64], b: &[f64], s: f64| a.iter().zip(b).all(|(p, q)| (p - s * q).abs() < 1e-6);
    if !ws.iter().any(|o| same(&o.omega, &w.omega, 1.0) || same(&o.omega, &w.omega, -1.0)) {
        ws.push(w);
    }
}

/// Solvability of ∇V = ∇K_x(ω) = ½∇⟨𝕀_x ω, ω⟩ for ω in the repeated eigenspace.
///
/// One-dimensional charts sweep the unit circle of the eigenspace and solve
/// for the magnitude; otherwise a multi-start least-squares search is run.
/// Witnesses are reported up to ω ↦ −ω.
pub fn abnormal_check(sys: &dyn ModelSystem, chart: Chart, x: &[f64]) -> Result<AbnormalReport> {
    let (lambda, basis) = repeated_space(sys, x)?;
    let k = basis.len();
    let gv = sys.grad_potential(x)?;
    let parts = sys.inertia_partials(x)?;
    let nv = norm(&gv);
    let gk = |c: &[f64]| -> Vec<f64> {
        let w = combine(&basis, c);
        parts.iter().map(|p| 0.5 * p.quad(&w)).collect()
    };
    let tol = 1e-10 * (1.0 + nv);
    let mut witnesses = Vec::new();
    let point = ShapePoint { chart, coords: x.to_vec() };
    if nv <= 1e-12 {
        witnesses.push(Witness { omega: vec![0.0; basis[0].len()], residual: nv });
        return Ok(AbnormalReport { x: point, lambda, multiplicity: k, exists: true, equilibrium: true, witnesses });
    }
    let qmax = parts.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    if gv.len() == 1 {
        for u in unit_directions(k.min(3), 72) {
            let g = gk(&u)[0];
            if g.abs() < 1e-9 * qmax || g.signum() != gv[0].signum() {
                continue;
            }
            let r = (gv[0] / g).sqrt();
            let c: Vec<f64> = u.iter().map(|v| v * r).collect();
            let res = (gv[0] - gk(&c)[0]).abs();
            if res <= tol {
                push_unique(&mut witnesses, Witness { omega: combine(&basis, &c), residual: res });
            }
        }
    } else {
        let r0 = (nv / qmax).sqrt();
        let resid = |c: &[f64]| -> Result<Vec<f64>> {
            Ok(gv.iter().zip(gk(c)).map(|(a, b)| a - b).collect())
        };
        for u in unit_directions(k, 24) {
            for s in [0.5, 1.0, 2.0] {
                let c0: Vec<f64> = u.iter().map(|v| v * r0 * s).collect();
                let Ok(out) = crate::numeric::levenberg_marquardt(&resid, &c0, 200, 1e-3 * tol) else {
                    continue;
                };
                if out.residual <= tol {
                    push_unique(&mut witnesses, Witness { omega: combine(&basis, &out.x), residual: out.residual });
                }
            }
        }
    }
    let exists = !witnesses.is_empty();
    Ok(AbnormalReport { x: point, lambda, multiplicity: k, exists, equilibrium: false, witnesses })
}

/// 3-body cone test in pair cosines; boundary points use the smooth angle chart.
pub fn abnormal_check_s3(body: &Spherical3Body, x: &[f64]) -> Result<AbnormalReport> {
    if Spherical3Body::is_boundary(x) {
        let mut y = Spherical3Body::angles_of(x)?;
        // snap the dihedral angle onto the face
        y[2] = if y[2] > std::f64::consts::FRAC_PI_2 { std::f64::consts::PI } else { 0.0 };
        abnormal_check(&body.angle_chart(), Chart::Angles, &y)
    } else {
        abnormal_check(body, Chart::Standard, x)
    }
}

/// Abnormal family of the equal-mass 2-body problem at θ = π/2.
pub fn two_body_abnormal(body: &Sphere2Body) -> Result<AbnormalReport> {
    abnormal_check(body, Chart::Standard, &[std::f64::consts::FRAC_PI_2])
}
