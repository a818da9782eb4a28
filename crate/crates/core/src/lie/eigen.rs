use serde::{Deserialize, Serialize};

use super::{cross, dot, norm, scale, sub, SymTensor, Vec3};

/// Ascending eigen-decomposition with clustering of near-equal values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenFrame {
    pub values: Vec<f64>,
    /// `vectors[j]` is the unit eigenvector for `values[j]`.
    pub vectors: Vec<Vec<f64>>,
    /// Cluster id per eigenvalue; equal ids mean "repeated" under the tolerance.
    pub clusters: Vec<usize>,
}

impl EigenFrame {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn cluster_size(&self, j: usize) -> usize {
        self.clusters.iter().filter(|&&c| c == self.clusters[j]).count()
    }

    pub fn is_simple(&self, j: usize) -> bool {
        self.cluster_size(j) == 1
    }

    /// Indices sharing the cluster of `j`.
    pub fn cluster_members(&self, j: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.clusters[i] == self.clusters[j]).collect()
    }

    /// Smallest distance from `values[j]` to any other eigenvalue.
    pub fn gap(&self, j: usize) -> f64 {
        (0..self.dim())
            .filter(|&i| i != j)
            .map(|i| (self.values[i] - self.values[j]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_gap(&self) -> f64 {
        self.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Index whose eigenvector has the largest overlap with `v`.
    pub fn best_overlap(&self, v: &[f64]) -> (usize, f64) {
        let mut best = (0, -1.0);
        for (j, e) in self.vectors.iter().enumerate() {
            let o: f64 = e.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().abs();
            if o > best.1 {
                best = (j, o);
            }
        }
        best
    }

    pub fn has_repeated(&self) -> bool {
        (0..self.dim()).any(|j| !self.is_simple(j))
    }
}

/// Symmetric eigensolver: trigonometric closed form for 3×3 polished by
/// Jacobi sweeps, plain cyclic Jacobi otherwise.
pub fn eig_sym(s: &SymTensor, tau_mult: f64) -> EigenFrame {
    let n = s.dim();
    let v0 = if n == 3 { trig_frame(s) } else { identity(n) };
    // A' = V0ᵀ S V0, then diagonalize A' by Jacobi.
    let a = s.to_dense();
    let mut ap = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                for l in 0..n {
                    acc += v0[k][i] * a[k][l] * v0[l][j];
                }
            }
            ap[i][j] = acc;
        }
    }
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (ap[i][j] + ap[j][i]);
            ap[i][j] = m;
            ap[j][i] = m;
        }
    }
    let r = jacobi(&mut ap);
    // columns of V = V0 R
    let mut vecs: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..n).map(|i| (0..n).map(|k| v0[i][k] * r[k][c]).sum()).collect())
        .collect();
    let mut vals: Vec<f64> = (0..n).map(|i| ap[i][i]).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    vals = order.iter().map(|&i| vals[i]).collect();
    vecs = order.iter().map(|&i| vecs[i].clone()).collect();
    for v in vecs.iter_mut() {
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let piv = v.iter().cloned().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let sgn = if piv < 0.0 { -1.0 } else { 1.0 };
        for x in v.iter_mut() {
            *x *= sgn / nv;
        }
    }

    let mut clusters = vec![0; n];
    for j in 1..n {
        let same = (vals[j] - vals[j - 1]).abs() < tau_mult * (1.0 + vals[j - 1].abs());
        clusters[j] = if same { clusters[j - 1] } else { clusters[j - 1] + 1 };
    }
    EigenFrame { values: vals, vectors: vecs, clusters }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn trig_values(s: &SymTensor) -> [f64; 3] {
    let a = |i, j| s.get(i, j);
    let p1 = a(0, 1).powi(2) + a(0, 2).powi(2) + a(1, 2).powi(2);
    let q = s.trace() / 3.0;
    let p2 = (a(0, 0) - q).powi(2) + (a(1, 1) - q).powi(2) + (a(2, 2) - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q, q, q];
    }
    let b = |i: usize, j: usize| (a(i, j) - if i == j { q } else { 0.0 }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
        - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (0.5 * det).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    [hi, 3.0 * q - hi - lo, lo]
}

fn null_vector(s: &SymTensor, lam: f64) -> Option<Vec3> {
    let row = |i: usize| -> Vec3 {
        let mut r = [s.get(i, 0), s.get(i, 1), s.get(i, 2)];
        r[i] -= lam;
        r
    };
    let (r0, r1, r2) = (row(0), row(1), row(2));
    let cands = [cross(&r0, &r1), cross(&r0, &r2), cross(&r1, &r2)];
    let best = cands.iter().max_by(|a, b| norm(a).total_cmp(&norm(b))).unwrap();
    let scale_ref = s.norm().max(f64::MIN_POSITIVE);
    if norm(best) <= 1e-6 * scale_ref * scale_ref {
        None
    } else {
        Some(scale(1.0 / norm(best), best))
    }
}

/// Initial orthonormal frame from the closed-form eigenvalues; columns.
fn trig_frame(s: &SymTensor) -> Vec<Vec<f64>> {
    let lam = trig_values(s);
    let v1 = match null_vector(s, lam[0]) {
        Some(v) => v,
        None => return identity(3),
    };
    let v3 = match null_vector(s, lam[2]) {
        Some(v) => {
            let w = sub(&v, &scale(dot(&v, &v1), &v1));
            if norm(&w) < 1e-8 {
                return identity(3);
            }
            scale(1.0 / norm(&w), &w)
        }
        None => return identity(3),
    };
    let v2 = cross(&v3, &v1);
    // row-major matrix whose columns are v1, v2, v3
    (0..3).map(|i| vec![v1[i], v2[i], v3[i]]).collect()
}

/// Cyclic Jacobi; diagonalizes `a` in place, returns the accumulated rotation
/// (columns are eigenvectors of the input).
fn jacobi(a: &mut [Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut v = identity(n);
    let scale_ref: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if scale_ref == 0.0 {
        return v;
    }
    for sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale_ref {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                let g = 100.0 * apq.abs();
                if apq == 0.0
                    || (sweep > 3 && a[p][p].abs() + g == a[p][p].abs() && a[q][q].abs() + g == a[q][q].abs())
                {
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - sn * vkq;
                    row[q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{char_poly, rotation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> SymTensor {
        let mut s = SymTensor::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                s.set(i, j, rng.gen_range(-3.0..3.0));
            }
        }
        s
    }

    fn check_frame(s: &SymTensor, f: &EigenFrame) {
        let n = s.dim();
        let sn = s.norm().max(1.0);
        for j in 0..n {
            let sv = s.mul_vec(&f.vectors[j]);
            let r: f64 = sv
                .iter()
                .zip(&f.vectors[j])
                .map(|(a, b)| (a - f.values[j] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-10 * sn, "residual {r}");
            for k in 0..n {
                let d: f64 = f.vectors[j].iter().zip(&f.vectors[k]).map(|(a, b)| a * b).sum();
                let e = if j == k { 1.0 } else { 0.0 };
                assert!((d - e).abs() < 1e-12);
            }
        }
        for w in f.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn scalar_matrix_single_cluster() {
        let f = eig_sym(&SymTensor::diag(&[2.0, 2.0, 2.0]), 1e-8);
        assert_eq!(f.values, vec![2.0, 2.0, 2.0]);
        assert_eq!(f.clusters, vec![0, 0, 0]);
        assert_eq!(f.cluster_size(1), 3);
    }

    #[test]
    fn row_sum_zero_matrix() {
        let s = SymTensor::from_rows(&[
            vec![2.0, -1.0, -1.0],
            vec![-1.0, 2.0, -1.0],
            vec![-1.0, -1.0, 2.0],
        ]);
        let f = eig_sym(&s, 1e-8);
        assert!(f.values[0].abs() < 1e-14);
        assert!((f.values[1] - 3.0).abs() < 1e-14 && (f.values[2] - 3.0).abs() < 1e-14);
        let r3 = 1.0 / 3f64.sqrt();
        for k in 0..3 {
            assert!((f.vectors[0][k] - r3).abs() < 1e-14);
        }
        assert_eq!(f.clusters, vec![0, 1, 1]);
        check_frame(&s, &f);
    }

    fn cubic_roots(s: &SymTensor) -> Vec<f64> {
        // bisection on det(λI − S) between Gershgorin bounds, after sign scans
        let p = char_poly(s);
        let r = s.norm() + 1.0;
        let m = 20000;
        let mut roots = Vec::new();
        let mut prev = p.eval(-r);
        for i in 1..=m {
            let t = -r + 2.0 * r * i as f64 / m as f64;
            let cur = p.eval(t);
            if prev == 0.0 || prev * cur < 0.0 {
                let (mut lo, mut hi) = (t - 2.0 * r / m as f64, t);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if p.eval(lo) * p.eval(mid) <= 0.0 {
                        hi = mid
                    } else {
                        lo = mid
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
        roots
    }

    #[test]
    fn random_matrices_match_polynomial_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_sym(&mut rng, 3);
            let f = eig_sym(&s, 1e-8);
            check_frame(&s, &f);
            let roots = cubic_roots(&s);
            if roots.len() == 3 {
                for k in 0..3 {
                    assert!((roots[k] - f.values[k]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn six_by_six_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let s = random_sym(&mut rng, 6);
            let f = eig_sym(&s, 1e-8);
            check_frame(&s, &f);
            for i in 0..6 {
                for j in 0..6 {
                    let r: f64 = (0..6).map(|k| f.vectors[k][i] * f.values[k] * f.vectors[k][j]).sum();
                    assert!((r - s.get(i, j)).abs() <= 1e-9 * s.norm());
                }
            }
        }
    }

    #[test]
    fn near_degenerate_values_stay_accurate() {
        let base = SymTensor::diag(&[1.0, 1.0 + 1e-9, 4.0]);
        let r = rotation(&[0.3, -1.0, 0.2], 1.1);
        let rows: Vec<Vec<f64>> = r.iter().map(|x| x.to_vec()).collect();
        let s = base.conjugate(&rows);
        let f = eig_sym(&s, 1e-12);
        check_frame(&s, &f);
        assert!((f.values[1] - f.values[0] - 1e-9).abs() < 1e-14);
        assert!(f.is_simple(0));
    }
}
