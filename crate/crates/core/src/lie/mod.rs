//! Small dense symmetric linear algebra and so(3) plumbing.

mod eigen;
mod poly;
mod sym;

pub use eigen::{eig_sym, EigenFrame};
pub use poly::{char_poly, discriminant, CubicPoly};
pub use sym::SymTensor;

use serde::{Deserialize, Serialize};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(s: f64, a: &Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn normalize(a: &Vec3) -> Vec3 {
    let n = norm(a);
    scale(1.0 / n, a)
}

/// Antisymmetric matrix with `hat(v) w = v × w`.
pub fn hat(v: &Vec3) -> Mat3 {
    [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]]
}

/// Inverse of [`hat`]; reads the antisymmetric part of `m`.
pub fn unhat(m: &Mat3) -> Vec3 {
    [
        0.5 * (m[2][1] - m[1][2]),
        0.5 * (m[0][2] - m[2][0]),
        0.5 * (m[1][0] - m[0][1]),
    ]
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// Rotation about a unit axis (Rodrigues).
pub fn rotation(axis: &Vec3, angle: f64) -> Mat3 {
    let k = normalize(axis);
    let kh = hat(&k);
    let kk = mat_mul(&kh, &kh);
    let (s, c) = angle.sin_cos();
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            r[i][j] = id + s * kh[i][j] + (1.0 - c) * kk[i][j];
        }
    }
    r
}

/// Lie bracket on so(3) × so(3): componentwise cross products.
pub fn bracket_so3xso3(a: &(Vec3, Vec3), b: &(Vec3, Vec3)) -> (Vec3, Vec3) {
    (cross(&a.0, &b.0), cross(&a.1, &b.1))
}

/// Eigenvalue counts above, within and below `±tau_zero`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub plus: usize,
    pub zero: usize,
    pub minus: usize,
}

impl Signature {
    pub fn from_values(values: &[f64], tau_zero: f64) -> Self {
        let mut s = Signature { plus: 0, zero: 0, minus: 0 };
        for &v in values {
            if v > tau_zero {
                s.plus += 1;
            } else if v < -tau_zero {
                s.minus += 1;
            } else {
                s.zero += 1;
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.plus + self.zero + self.minus
    }

    /// Sorted sign string, e.g. `++-`; zeros print as `0`.
    pub fn pattern(&self) -> String {
        let mut s = String::new();
        s.push_str(&"+".repeat(self.plus));
        s.push_str(&"0".repeat(self.zero));
        s.push_str(&"-".repeat(self.minus));
        s
    }
}

pub fn signature(s: &SymTensor, tau_zero: f64) -> Signature {
    let frame = eig_sym(s, 0.0);
    Signature::from_values(&frame.values, tau_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng) -> Vec3 {
        [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]
    }

    #[test]
    fn hat_matches_cross() {
        assert_eq!(hat(&[0.0; 3]), [[0.0; 3]; 3]);
        assert_eq!(mat_vec(&hat(&[0.0, 0.0, 1.0]), &[1.0, 0.0, 0.0]), [0.0, 1.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let v = rand_vec(&mut rng);
            let w = rand_vec(&mut rng);
            let hv = mat_vec(&hat(&v), &w);
            let cv = cross(&v, &w);
            for k in 0..3 {
                assert!((hv[k] - cv[k]).abs() < 1e-15);
            }
            assert_eq!(unhat(&hat(&v)), v);
        }
    }

    #[test]
    fn bracket_trivial_cases() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        assert_eq!(bracket_so3xso3(&(e1, e2), &(e1, e2)), ([0.0; 3], [0.0; 3]));
    }

    #[test]
    fn bracket_jacobi_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a = (rand_vec(&mut rng), rand_vec(&mut rng));
            let b = (rand_vec(&mut rng), rand_vec(&mut rng));
            let c = (rand_vec(&mut rng), rand_vec(&mut rng));
            let t1 = bracket_so3xso3(&a, &bracket_so3xso3(&b, &c));
            let t2 = bracket_so3xso3(&b, &bracket_so3xso3(&c, &a));
            let t3 = bracket_so3xso3(&c, &bracket_so3xso3(&a, &b));
            for k in 0..3 {
                assert!((t1.0[k] + t2.0[k] + t3.0[k]).abs() < 1e-12);
                assert!((t1.1[k] + t2.1[k] + t3.1[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn signature_counts() {
        let id = SymTensor::identity(6);
        assert_eq!(signature(&id, 1e-8), Signature { plus: 6, zero: 0, minus: 0 });
        let d = SymTensor::diag(&[1.0, -1.0, 0.0]);
        assert_eq!(signature(&d, 1e-8), Signature { plus: 1, zero: 1, minus: 1 });
        assert_eq!(signature(&d, 1e-8).pattern(), "+0-");
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = rotation(&[1.0, 2.0, -0.5], 0.7);
        let rt = mat_mul(&r, &transpose(&r));
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((rt[i][j] - id).abs() < 1e-14);
            }
        }
    }
}
