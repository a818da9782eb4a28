use serde::{Deserialize, Serialize};

use super::SymTensor;

/// Cubic `c[3] λ³ + c[2] λ² + c[1] λ + c[0]`; monic for characteristic polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicPoly {
    pub c: [f64; 4],
}

impl CubicPoly {
    pub fn eval(&self, t: f64) -> f64 {
        ((self.c[3] * t + self.c[2]) * t + self.c[1]) * t + self.c[0]
    }

    pub fn derivative_at(&self, t: f64) -> f64 {
        (3.0 * self.c[3] * t + 2.0 * self.c[2]) * t + self.c[1]
    }
}

/// `det(λI − S)` for a 3×3 symmetric `S`.
pub fn char_poly(s: &SymTensor) -> CubicPoly {
    assert_eq!(s.dim(), 3, "char_poly needs a 3x3 tensor");
    let a = |i, j| s.get(i, j);
    let tr = s.trace();
    let minors = a(0, 0) * a(1, 1) - a(0, 1).powi(2) + a(0, 0) * a(2, 2) - a(0, 2).powi(2)
        + a(1, 1) * a(2, 2)
        - a(1, 2).powi(2);
    let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2).powi(2))
        - a(0, 1) * (a(0, 1) * a(2, 2) - a(1, 2) * a(0, 2))
        + a(0, 2) * (a(0, 1) * a(1, 2) - a(1, 1) * a(0, 2));
    CubicPoly { c: [-det, minors, -tr, 1.0] }
}

/// Discriminant of the cubic, evaluated on the depressed form `μ³ + pμ + q`
/// (shift by the mean root) as `−4p³ − 27q²`, scaled by `c3⁴`.
pub fn discriminant(p: &CubicPoly) -> f64 {
    let [d, c, b, a] = p.c;
    let (b, c, d) = (b / a, c / a, d / a);
    let pp = c - b * b / 3.0;
    let qq = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    a.powi(4) * (-4.0 * pp.powi(3) - 27.0 * qq * qq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::eig_sym;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn repeated_diagonal_has_zero_discriminant() {
        let p = char_poly(&SymTensor::diag(&[1.0, 1.0, 5.0]));
        assert_eq!(p.c, [-5.0, 11.0, -7.0, 1.0]);
        assert!(discriminant(&p).abs() < 1e-12);
    }

    #[test]
    fn discriminant_equals_product_of_squared_gaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut s = SymTensor::zeros(3);
            for i in 0..3 {
                for j in 0..=i {
                    s.set(i, j, rng.gen_range(-1.0..1.0));
                }
            }
            let l = eig_sym(&s, 0.0).values;
            let prod = ((l[1] - l[0]) * (l[2] - l[0]) * (l[2] - l[1])).powi(2);
            let d = discriminant(&char_poly(&s));
            assert!(d >= -1e-12);
            assert!((d - prod).abs() < 1e-10 * (1.0 + prod));
        }
    }
}
