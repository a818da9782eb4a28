use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{eig_sym, SymTensor};
use crate::models::{cayley, Chart, Face, ModelSystem, Spherical3Body};
use crate::numeric::hessian_steps;
use crate::re::{RelEquilibrium, GAP_TOL, RE_TOL};

const MIN_OVERLAP: f64 = 0.9;

/// Smallest λ+ − λ− for the explicit face formulas; below this r² = 4|x|² − 3
/// has lost most of its digits to cancellation.
const FACE_SEP: f64 = 1e-6;

/// Cluster tolerance for axes fixed by the reflection through the face plane.
pub(crate) const AXIS_GAP: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn require_simple(frame: &crate::lie::EigenFrame, j: usize, gap_tol: f64) -> Result<()> {
    let gap = frame.gap(j);
    if gap < gap_tol * (1.0 + frame.values[j].abs()) {
        return Err(Error::RepeatedEigenvalue { branch: j, gap });
    }
    Ok(())
}

/// `V(x) + |L|²/(2λ(x))`, with λ the eigenvalue whose eigenvector continues
/// a fixed reference direction.
pub struct AmendedPotential<'a> {
    sys: &'a dyn ModelSystem,
    reference: Vec<f64>,
    lsq: f64,
}

impl<'a> AmendedPotential<'a> {
    /// Follow branch `j` of the inertia at `x0`.
    pub fn new(sys: &'a dyn ModelSystem, x0: &[f64], j: usize, lsq: f64) -> Result<Self> {
        Self::with_gap(sys, x0, j, lsq, GAP_TOL)
    }

    /// As [`AmendedPotential::new`] with a caller-chosen cluster tolerance.
    pub fn with_gap(sys: &'a dyn ModelSystem, x0: &[f64], j: usize, lsq: f64, gap_tol: f64) -> Result<Self> {
        let frame = eig_sym(&sys.inertia(x0)?, 0.0);
        if j >= frame.dim() {
            return Err(Error::Config(format!("branch {j} out of range")));
        }
        require_simple(&frame, j, gap_tol)?;
        Ok(AmendedPotential { sys, reference: frame.vectors[j].clone(), lsq })
    }

    /// Follow the eigenvalue nearest `lambda` at `x0`.
    pub fn nearest(sys: &'a dyn ModelSystem, x0: &[f64], lambda: f64, lsq: f64, gap_tol: f64) -> Result<Self> {
        let frame = eig_sym(&sys.inertia(x0)?, 0.0);
        let j = (0..frame.dim())
            .min_by(|&a, &b| (frame.values[a] - lambda).abs().total_cmp(&(frame.values[b] - lambda).abs()))
            .ok_or_else(|| Error::Config("empty inertia".into()))?;
        Self::with_gap(sys, x0, j, lsq, gap_tol)
    }

    pub fn lsq(&self) -> f64 {
        self.lsq
    }

    /// Tracked eigenvalue and eigenvector at x.
    pub fn eigen(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let frame = eig_sym(&self.sys.inertia(x)?, 0.0);
        let (k, o) = frame.best_overlap(&self.reference);
        if o < MIN_OVERLAP {
            return Err(Error::BranchLost(format!("overlap {o:.3} at {x:?}")));
        }
        let lam = frame.values[k];
        if lam <= 0.0 {
            return Err(Error::Singular(format!("inertia eigenvalue {lam}")));
        }
        Ok((lam, frame.vectors[k].clone()))
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let (lam, _) = self.eigen(x)?;
        Ok(self.sys.potential(x)? + self.lsq / (2.0 * lam))
    }

    /// ∇V − (|L|²/2λ²)∇λ from the perturbation formula for ∇λ.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (lam, v) = self.eigen(x)?;
        let gv = self.sys.grad_potential(x)?;
        let c = self.lsq / (2.0 * lam * lam);
        Ok(self.sys.inertia_partials(x)?.iter().zip(gv).map(|(p, g)| g - c * p.quad(&v)).collect())
    }
}

/// V_L at x on branch j (no continuation: j is read at x itself).
pub fn amended_potential(sys: &dyn ModelSystem, x: &[f64], j: usize, lsq: f64) -> Result<f64> {
    AmendedPotential::new(sys, x, j, lsq)?.value(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    /// Interior: tangent to the λ-leaf.
    Tangential,
    /// Interior: along ∇λ.
    Normal,
    /// Boundary: out of ∂T.
    Transversal,
    /// Boundary: (1, 1) in face coordinates.
    FaceSymmetric,
    /// Boundary: (1, −1) in face coordinates.
    FaceAntisymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub kind: ModeKind,
    pub value: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HessChart {
    /// Pair cosines.
    Interior,
    /// Basis (transversal, θ12, θ23) at a face point.
    Boundary(Face),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessVl {
    pub chart: HessChart,
    pub matrix: SymTensor,
    /// Eigen-modes in a fixed labelled order.
    pub modes: Vec<Mode>,
    pub lsq: f64,
    /// Boundary only: ∂²V_L/∂θ12∂φ, ∂²V_L/∂θ23∂φ and ∂²V_L/∂φ² in the angle chart.
    pub angle_chart: Option<[f64; 3]>,
}

impl HessVl {
    pub fn values(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.value).collect()
    }

    pub fn det(&self) -> f64 {
        self.modes.iter().map(|m| m.value).product()
    }

    pub fn mode(&self, kind: ModeKind) -> Option<&Mode> {
        self.modes.iter().find(|m| m.kind == kind)
    }

    /// (1,1)H(1,1)ᵀ and (1,−1)H(1,−1)ᵀ of the face block.
    pub fn face_quadratics(&self) -> Option<(f64, f64)> {
        if !matches!(self.chart, HessChart::Boundary(_)) {
            return None;
        }
        let m = &self.matrix;
        let (a, b, d) = (m.get(1, 1), m.get(1, 2), m.get(2, 2));
        Some((a + 2.0 * b + d, a - 2.0 * b + d))
    }
}

fn rows_to_sym(h: &[Vec<f64>]) -> SymTensor {
    SymTensor::from_rows(h)
}

/// Interior step: the stencil must stay clear of collisions and ∂T.
fn interior_steps(x: &[f64]) -> Vec<f64> {
    let gc = cayley_gradient(x);
    let mut rho = x.iter().map(|v| 1.0 - v.abs()).fold(f64::INFINITY, f64::min);
    let ng = norm(&gc);
    if ng > 0.0 {
        rho = rho.min(cayley(x) / ng);
    }
    x.iter().map(|v| (1e-4 * (1.0 + v.abs())).min(0.05 * rho)).collect()
}

fn face_steps(chart: &crate::models::FaceChart, y: &[f64]) -> Vec<f64> {
    let t13 = {
        let x = chart.to_x(y);
        x[1].clamp(-1.0, 1.0).acos()
    };
    let rho = [y[0], PI - y[0], y[1], PI - y[1], t13, PI - t13].into_iter().fold(f64::INFINITY, f64::min);
    y.iter().map(|v| (1e-4 * (1.0 + v.abs())).min(0.05 * rho)).collect()
}

/// Hessian of |L|²/(3 ± √s) in face coordinates, s = 4|x|² − 3 = (λ+ − λ−)².
fn inertia_term_hessian(chart: &crate::models::FaceChart, y: &[f64], sign: f64, lsq: f64) -> [[f64; 2]; 2] {
    let (a, b) = (y[0], y[1]);
    let e = if chart.face.opposite_sides() { 1.0 } else { -1.0 };
    let t = a + e * b;
    let x = [a.cos(), t.cos(), b.cos()];
    let gx = [[-a.sin(), 0.0], [-t.sin(), -e * t.sin()], [0.0, -b.sin()]];
    let hx = [
        [[-a.cos(), 0.0], [0.0, 0.0]],
        [[-t.cos(), -e * t.cos()], [-e * t.cos(), -t.cos()]],
        [[0.0, 0.0], [0.0, -b.cos()]],
    ];
    let s = 4.0 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - 3.0;
    let mut gs = [0.0; 2];
    let mut hs = [[0.0; 2]; 2];
    for i in 0..3 {
        for p in 0..2 {
            gs[p] += 8.0 * x[i] * gx[i][p];
            for q in 0..2 {
                hs[p][q] += 8.0 * (gx[i][p] * gx[i][q] + x[i] * hx[i][p][q]);
            }
        }
    }
    let w = s.sqrt();
    let den = 3.0 + sign * w;
    let gw = -sign * lsq / (den * den);
    let gww = 2.0 * lsq / (den * den * den);
    let d1 = gw / (2.0 * w);
    let d2 = gww / (4.0 * w * w) - gw / (4.0 * w * w * w);
    let mut out = [[0.0; 2]; 2];
    for p in 0..2 {
        for q in 0..2 {
            out[p][q] = d1 * hs[p][q] + d2 * gs[p] * gs[q];
        }
    }
    out
}

pub fn cayley_gradient(x: &[f64]) -> [f64; 3] {
    [
        2.0 * (x[1] * x[2] - x[0]),
        2.0 * (x[0] * x[2] - x[1]),
        2.0 * (x[0] * x[1] - x[2]),
    ]
}

/// Finite-difference Hessian of V_L at an interior critical point, modes
/// labelled against the leaf normal ∇λ.
pub fn hess_vl_interior(sys: &dyn ModelSystem, x: &[f64], j: usize, lsq: f64, steps: &[f64]) -> Result<HessVl> {
    let vl = AmendedPotential::new(sys, x, j, lsq)?;
    let h = hessian_steps(&|y: &[f64]| vl.value(y), x, steps)?;
    let matrix = rows_to_sym(&h);
    let (_, v) = vl.eigen(x)?;
    let n: Vec<f64> = sys.inertia_partials(x)?.iter().map(|p| p.quad(&v)).collect();
    let nn = norm(&n);
    let frame = eig_sym(&matrix, 0.0);
    let align = |k: usize| if nn > 0.0 { dot(&frame.vectors[k], &n).abs() / nn } else { 0.0 };
    let normal = (0..frame.dim()).max_by(|&a, &b| align(a).total_cmp(&align(b))).unwrap_or(0);
    let mut modes: Vec<Mode> = (0..frame.dim())
        .filter(|&k| k != normal)
        .map(|k| Mode { kind: ModeKind::Tangential, value: frame.values[k], vector: frame.vectors[k].clone() })
        .collect();
    modes.push(Mode { kind: ModeKind::Normal, value: frame.values[normal], vector: frame.vectors[normal].clone() });
    Ok(HessVl { chart: HessChart::Interior, matrix, modes, lsq, angle_chart: None })
}

/// Boundary Hessian: face block from the explicit coplanar eigenvalues,
/// transversal scalar C′·F′ along the λ-leaf through the point.
fn hess_vl_boundary(body: &Spherical3Body, re: &RelEquilibrium, face: Face) -> Result<HessVl> {
    let lsq = re.momentum_sq;
    let y = &re.x.coords;
    let chart = body.face_chart(face);

    // explicit λ+, λ− or the out-of-plane 3, whichever carries the RE
    let (lp, lm) = chart.lambda_pm(y);
    let cand = [lp, lm, 3.0];
    let sel = (0..3).min_by(|&a, &b| (cand[a] - re.lambda).abs().total_cmp(&(cand[b] - re.lambda).abs())).unwrap();
    // the out-of-plane axis is fixed by the reflection, so only λ+ against λ− matters
    if sel < 2 && lp - lm < FACE_SEP * (1.0 + re.lambda.abs()) {
        return Err(Error::RepeatedEigenvalue { branch: re.branch, gap: lp - lm });
    }
    let mut hf = hessian_steps(&|z: &[f64]| chart.potential(z), y, &face_steps(&chart, y))?;
    if sel < 2 {
        let sign = if sel == 0 { 1.0 } else { -1.0 };
        let add = inertia_term_hessian(&chart, y, sign, lsq);
        for i in 0..2 {
            for k in 0..2 {
                hf[i][k] += add[i][k];
            }
        }
    }

    // transversal part in pair cosines
    let x = &re.embedded;
    let vl = AmendedPotential::nearest(body, x, re.lambda, lsq, AXIS_GAP)?;
    let (lam_x, v) = vl.eigen(x)?;
    if (lam_x - re.lambda).abs() > 1e-8 * (1.0 + re.lambda) {
        return Err(Error::BranchLost(format!("λ = {lam_x} in the cosine chart, {} on the face", re.lambda)));
    }
    let g = vl.gradient(x)?;
    let gl: Vec<f64> = body.inertia_partials(x)?.iter().map(|p| p.quad(&v)).collect();
    let gc = cayley_gradient(x);
    // critical on the smooth double cover iff ∇V_L ∥ ∇C
    let mu = dot(&g, &gc) / dot(&gc, &gc);
    let off: Vec<f64> = g.iter().zip(&gc).map(|(a, c)| a - mu * c).collect();
    let gv = body.grad_potential(x)?;
    let scale = norm(&gv).max(lsq / (2.0 * re.lambda * re.lambda) * norm(&gl)).max(1e-300);
    if norm(&off) > 1e-6 * scale {
        return Err(Error::NotAnRe(norm(&off) / scale));
    }
    let gll = dot(&gl, &gl);
    let mut u: Vec<f64> = if gll > 0.0 {
        let s = dot(&gc, &gl) / gll;
        gc.iter().zip(&gl).map(|(c, l)| c - s * l).collect()
    } else {
        gc.to_vec()
    };
    // the leaf is tangent to ∂T at the top of the λ = 3 leaf; fall back to the normal
    if norm(&u) < 1e-3 * norm(&gc) {
        u = gc.to_vec();
    }
    let nu = norm(&u);
    u.iter_mut().for_each(|c| *c /= nu);
    let transversal = dot(&gc, &u) * dot(&g, &u);

    let matrix = SymTensor::from_rows(&[
        vec![transversal, 0.0, 0.0],
        vec![0.0, hf[0][0], hf[0][1]],
        vec![0.0, hf[1][0], hf[1][1]],
    ]);
    let block = SymTensor::from_rows(&hf);
    let bf = eig_sym(&block, 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sym_k = if dot(&bf.vectors[0], &[s, s]).abs() >= dot(&bf.vectors[1], &[s, s]).abs() { 0 } else { 1 };
    let lift = |w: &[f64]| vec![0.0, w[0], w[1]];
    let modes = vec![
        Mode { kind: ModeKind::Transversal, value: transversal, vector: vec![1.0, 0.0, 0.0] },
        Mode { kind: ModeKind::FaceSymmetric, value: bf.values[sym_k], vector: lift(&bf.vectors[sym_k]) },
        Mode {
            kind: ModeKind::FaceAntisymmetric,
            value: bf.values[1 - sym_k],
            vector: lift(&bf.vectors[1 - sym_k]),
        },
    ];

    let angle_chart = angle_chart_check(body, re, face).ok();
    Ok(HessVl { chart: HessChart::Boundary(face), matrix, modes, lsq, angle_chart })
}

/// Mixed and transversal second derivatives in the smooth angle chart.
fn angle_chart_check(body: &Spherical3Body, re: &RelEquilibrium, face: Face) -> Result<[f64; 3]> {
    let ac = body.angle_chart();
    let phi = if face.opposite_sides() { PI } else { 0.0 };
    let z = [re.x.coords[0], re.x.coords[1], phi];
    let frame = eig_sym(&ac.inertia(&z)?, 0.0);
    let (j, _) = frame.best_overlap(&re.omega_dir);
    let vl = AmendedPotential::with_gap(&ac, &z, j, re.momentum_sq, AXIS_GAP)?;
    let h0 = face_steps(&body.face_chart(face), &re.x.coords);
    let steps = [h0[0], h0[1], h0[0].min(h0[1])];
    let h = hessian_steps(&|w: &[f64]| vl.value(w), &z, &steps)?;
    Ok([h[0][2], h[1][2], h[2][2]])
}

/// Hessian of the amended potential at a 3-body relative equilibrium.
pub fn hess_vl(body: &Spherical3Body, re: &RelEquilibrium) -> Result<HessVl> {
    if !re.normal || re.residual > RE_TOL {
        return Err(Error::NotAnRe(re.residual));
    }
    match re.x.chart {
        Chart::Face(face) => hess_vl_boundary(body, re, face),
        Chart::Standard => {
            let x = &re.x.coords;
            if cayley(x) <= 0.0 {
                return Err(Error::Unsupported("boundary RE must be given in a face chart".into()));
            }
            hess_vl_interior(body, x, re.branch, re.momentum_sq, &interior_steps(x))
        }
        Chart::Angles => Err(Error::Unsupported("RE in the angle chart".into())),
    }
}
