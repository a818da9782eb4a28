use rayon::prelude::*;

use super::mesh::Grid;
use super::LeafModel;
use crate::error::Result;
use crate::lie::{eig_sym, EigenFrame, SymTensor};
use crate::models::{ModelSystem, RepeatedCurve};

/// Closed-form description of a repeated-eigenvalue set.
#[derive(Debug, Clone, PartialEq)]
pub enum LocusDescriptor {
    /// Segments t·s for the given directions, t in [lo, hi].
    Lines { directions: Vec<[f64; 3]>, lo: f64, hi: f64 },
    /// ⟨n, x⟩ = 0.
    Plane { normal: [f64; 3] },
    Curves(Vec<RepeatedCurve>),
    /// Ray t·d (t ≥ 0) together with the cone x1x2 = x3².
    LineAndCone { direction: [f64; 3] },
}

fn dist_to_segment(x: &[f64; 3], d: &[f64; 3], lo: f64, hi: f64) -> f64 {
    let dd = crate::lie::dot(d, d);
    let t = (crate::lie::dot(x, d) / dd).clamp(lo, hi);
    crate::lie::norm(&crate::lie::sub(x, &crate::lie::scale(t, d)))
}

fn dist_to_curve(c: &RepeatedCurve, x: &[f64; 3]) -> f64 {
    let (t0, t1) = match c {
        RepeatedCurve::Ellipse { .. } => (0.0, std::f64::consts::TAU),
        RepeatedCurve::Hyperbola { .. } => (-4.0, 4.0),
    };
    let d = |t: f64| {
        c.points(t).iter().map(|p| crate::lie::norm(&crate::lie::sub(x, p))).fold(f64::INFINITY, f64::min)
    };
    let n = 2000;
    let step = (t1 - t0) / n as f64;
    let (mut best_t, mut best) = (t0, f64::INFINITY);
    for i in 0..=n {
        let t = t0 + i as f64 * step;
        let v = d(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    // golden-section polish on the bracketing interval
    let (mut a, mut b) = (best_t - step, best_t + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let (c1, c2) = (b - g * (b - a), a + g * (b - a));
        if d(c1) < d(c2) {
            b = c2;
        } else {
            a = c1;
        }
    }
    best.min(d(0.5 * (a + b)))
}

impl LocusDescriptor {
    pub fn distance(&self, x: &[f64; 3]) -> f64 {
        match self {
            LocusDescriptor::Lines { directions, lo, hi } => {
                directions.iter().map(|d| dist_to_segment(x, d, *lo, *hi)).fold(f64::INFINITY, f64::min)
            }
            LocusDescriptor::Plane { normal } => crate::lie::dot(normal, x).abs() / crate::lie::norm(normal),
            LocusDescriptor::Curves(cs) => cs.iter().map(|c| dist_to_curve(c, x)).fold(f64::INFINITY, f64::min),
            LocusDescriptor::LineAndCone { direction } => {
                let ray = dist_to_segment(x, direction, 0.0, f64::INFINITY);
                let c = x[0] * x[1] - x[2] * x[2];
                let gc = (x[1] * x[1] + x[0] * x[0] + 4.0 * x[2] * x[2]).sqrt();
                let cone = if gc > 0.0 { c.abs() / gc } else { 0.0 };
                ray.min(cone)
            }
        }
    }
}

/// Known repeated-eigenvalue set of a model, if any.
pub fn locus_descriptor(model: &LeafModel) -> Option<LocusDescriptor> {
    match model {
        LeafModel::S3Body => Some(LocusDescriptor::Lines {
            directions: vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
            lo: -0.5,
            hi: 1.0,
        }),
        LeafModel::RubberBall => Some(LocusDescriptor::Plane { normal: [1.0, -2.0, 1.0] }),
        LeafModel::FullBody(b) => {
            Some(LocusDescriptor::Curves((0..3).filter_map(|m| b.repeated_curve(m)).collect()))
        }
        LeafModel::Triatomic(t) => Some(LocusDescriptor::LineAndCone { direction: t.s_point() }),
        LeafModel::Ellipsoid(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedLocus {
    pub points: Vec<[f64; 3]>,
    /// Smallest eigenvalue gap at each sample.
    pub gaps: Vec<f64>,
    pub descriptor: Option<LocusDescriptor>,
    pub spacing: f64,
}

impl RepeatedLocus {
    /// Largest distance from a sample to the descriptor.
    pub fn max_descriptor_distance(&self) -> Option<f64> {
        let d = self.descriptor.as_ref()?;
        Some(self.points.iter().map(|p| d.distance(p)).fold(0.0, f64::max))
    }
}

/// Closest pair of adjacent eigenvalues.
fn closest_pair(f: &EigenFrame) -> usize {
    (0..f.values.len() - 1)
        .min_by(|&a, &b| {
            let ga = f.values[a + 1] - f.values[a];
            let gb = f.values[b + 1] - f.values[b];
            ga.partial_cmp(&gb).unwrap()
        })
        .unwrap()
}

/// Gauss–Newton on the traceless part of the 2×2 block of the closest pair.
fn refine(sys: &dyn ModelSystem, x0: &[f64; 3]) -> Option<[f64; 3]> {
    let mut x = *x0;
    for _ in 0..40 {
        let i = sys.inertia(&x).ok()?;
        let fr = eig_sym(&i, 0.0);
        let a = closest_pair(&fr);
        let (va, vb) = (&fr.vectors[a], &fr.vectors[a + 1]);
        let r = [i.quad(va) - i.quad(vb), 2.0 * bilinear(&i, va, vb)];
        let scale = 1.0 + fr.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if r[0].abs() + r[1].abs() < 1e-14 * scale {
            return Some(x);
        }
        let parts = sys.inertia_partials(&x).ok()?;
        let j: Vec<[f64; 3]> = vec![
            [0, 1, 2].map(|k| parts[k].quad(va) - parts[k].quad(vb)),
            [0, 1, 2].map(|k| 2.0 * bilinear(&parts[k], va, vb)),
        ];
        // minimum-norm step x ← x − Jᵀ(JJᵀ)⁺r
        let jjt = [
            vec![crate::lie::dot(&j[0], &j[0]), crate::lie::dot(&j[0], &j[1])],
            vec![crate::lie::dot(&j[1], &j[0]), crate::lie::dot(&j[1], &j[1])],
        ];
        let y = crate::numeric::pinv_solve_sym(&jjt, &r, 1e-10);
        for k in 0..3 {
            x[k] -= y[0] * j[0][k] + y[1] * j[1][k];
        }
        if !x.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    None
}

fn bilinear(s: &SymTensor, u: &[f64], v: &[f64]) -> f64 {
    let su = s.mul_vec(u);
    su.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Sample the set where two inertia eigenvalues coincide on a grid over `bounds`.
pub fn repeated_locus(model: &LeafModel, bounds: [[f64; 2]; 3], n: usize) -> Result<RepeatedLocus> {
    let sys = model.system().expect("every leaf model has a system");
    let sys = sys.as_ref();
    let grid = Grid::new(bounds, n.max(2));
    let h = grid.max_spacing();
    let tau_mult = 1e-8;
    let found: Vec<Option<([f64; 3], f64)>> = (0..grid.num_points())
        .into_par_iter()
        .map(|g| {
            let x = grid.point_of(g);
            if !sys.domain_test(&x) {
                return None;
            }
            let i = sys.inertia(&x).ok()?;
            let fr = eig_sym(&i, 0.0);
            let lip: f64 = sys.inertia_partials(&x).ok()?.iter().map(|p| p.norm()).sum();
            if fr.min_gap() >= 3f64.sqrt() * lip * h {
                return None;
            }
            let y = refine(sys, &x)?;
            let moved = crate::lie::norm(&crate::lie::sub(&y, &x));
            if moved > 2.0 * h || !sys.domain_test(&y) {
                return None;
            }
            let fy = eig_sym(&sys.inertia(&y).ok()?, tau_mult);
            if !fy.has_repeated() {
                return None;
            }
            Some((y, fy.min_gap()))
        })
        .collect();
    let mut points: Vec<[f64; 3]> = Vec::new();
    let mut gaps = Vec::new();
    let cell = 0.5 * h;
    let mut seen: std::collections::HashMap<[i64; 3], Vec<usize>> = std::collections::HashMap::new();
    for (p, gap) in found.into_iter().flatten() {
        let c = p.map(|v| (v / cell).floor() as i64);
        let mut dup = false;
        'scan: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = seen.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        if ids.iter().any(|&k| crate::lie::norm(&crate::lie::sub(&points[k], &p)) < cell) {
                            dup = true;
                            break 'scan;
                        }
                    }
                }
            }
        }
        if !dup {
            seen.entry(c).or_default().push(points.len());
            points.push(p);
            gaps.push(gap);
        }
    }
    Ok(RepeatedLocus { points, gaps, descriptor: locus_descriptor(model), spacing: h })
}
