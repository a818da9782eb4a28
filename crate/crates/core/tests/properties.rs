use std::f64::consts::FRAC_PI_3;

use proptest::prelude::*;

use reweb_core::io::{execute, fmt9, round9, Command, RunConfig};
use reweb_core::lie::{char_poly, discriminant, eig_sym, rotation, signature, SymTensor};
use reweb_core::models::{cayley, tetrahedral_group, FullBodySatellite, Spherical3Body};
use reweb_core::re::{eulerian_family, lagrangian_family, RE_TOL};
use reweb_core::stability::{signature_report, ScanFamily, Verdict};
use reweb_core::web::s3body_implicit;
use reweb_core::ModelSystem;

fn sym3(e: [f64; 6]) -> SymTensor {
    SymTensor::from_rows(&[vec![e[0], e[1], e[2]], vec![e[1], e[3], e[4]], vec![e[2], e[4], e[5]]])
}

fn rows(r: [[f64; 3]; 3]) -> Vec<Vec<f64>> {
    r.iter().map(|row| row.to_vec()).collect()
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn entries() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-10.0..10.0f64)
}

fn axis() -> impl Strategy<Value = [f64; 3]> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(t, p)| unit(t, p))
}

fn interior_point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-0.95..0.95f64).prop_filter("inside T", |x| cayley(x) > 0.02)
}

proptest! {
    #[test]
    fn eigen_reconstruction(e in entries()) {
        let s = sym3(e);
        let f = eig_sym(&s, 1e-10);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let r: f64 = (0..3).map(|k| f.values[k] * f.vectors[k][i] * f.vectors[k][j]).sum();
                worst = worst.max((r - s.get(i, j)).abs());
            }
        }
        prop_assert!(worst <= 1e-9 * s.norm().max(1e-300), "{worst}");
    }

    #[test]
    fn real_spectrum(e in entries()) {
        let s = sym3(e);
        let scale = s.norm().max(1.0).powi(6);
        prop_assert!(discriminant(&char_poly(&s)) >= -1e-12 * scale);
    }

    #[test]
    fn signature_survives_rotation(e in entries(), a in axis(), angle in 0.0..6.3f64) {
        let s = sym3(e);
        let r = rows(rotation(&a, angle));
        prop_assert_eq!(signature(&s, 1e-8), signature(&s.conjugate(&r), 1e-8));
    }

    #[test]
    fn three_body_char_poly(t in prop::array::uniform3(0.0..3.14f64), p in prop::array::uniform3(0.0..6.28f64)) {
        let q = [unit(t[0], p[0]), unit(t[1], p[1]), unit(t[2], p[2])];
        let x = Spherical3Body::x_of(&q);
        let (a, b) = (char_poly(&Spherical3Body::inertia_of(&q)), char_poly(&Spherical3Body::pi(&x)));
        for k in 0..4 {
            prop_assert!((a.c[k] - b.c[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn tetrahedral_invariance(x in interior_point()) {
        let body = Spherical3Body::default();
        let f0 = eig_sym(&Spherical3Body::pi(&x), 0.0);
        let v0 = body.potential(&x).unwrap();
        for g in tetrahedral_group() {
            let y = g.apply(&x);
            let f = eig_sym(&Spherical3Body::pi(&y), 0.0);
            for k in 0..3 {
                prop_assert!((f.values[k] - f0.values[k]).abs() < 1e-12);
            }
            if g.preserves_potential() {
                prop_assert!((body.potential(&y).unwrap() - v0).abs() < 1e-12 * (1.0 + v0.abs()));
            }
        }
    }

    #[test]
    fn great_circle_axis(m in 0usize..3, x in prop::array::uniform3(-2.0..2.0f64)) {
        let body = FullBodySatellite::new([1.0, 2.0, 3.0]).unwrap();
        let mut x = x;
        x[m] = 0.0;
        prop_assume!(body.domain_test(&x));
        let mut e = [0.0; 3];
        e[m] = 1.0;
        let want = body.moments[m] + x.iter().map(|v| v * v).sum::<f64>();
        let got = body.inertia(&x).unwrap().mul_vec(&e);
        for r in 0..3 {
            prop_assert!((got[r] - want * e[r]).abs() < 1e-12);
        }
    }

    #[test]
    fn web_covers_shape_space(x in interior_point()) {
        for l in eig_sym(&Spherical3Body::pi(&x), 0.0).values {
            prop_assert!(s3body_implicit(&x, l).abs() < 1e-10);
        }
    }

    #[test]
    fn dilation_of_cayley(x in interior_point(), l in 0.0..3.0f64) {
        prop_assume!((l - 2.0).abs() > 0.05);
        let m = l - 2.0;
        let y = [x[0] / m, x[1] / m, x[2] / m];
        // the implicit is m³ times the Cayley form at x/m, so zero sets agree
        let lhs = s3body_implicit(&x, l);
        prop_assert!((lhs - m.powi(3) * cayley(&y)).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn cayley_parametrization(l in 0.0..3.0f64, p1 in -3.2..3.2f64, p2 in -3.2..3.2f64, hyp in any::<bool>()) {
        let m = l - 2.0;
        let ps = [p1, p2, -p1 - p2];
        let x = if hyp {
            [m * ps[0].cosh(), -m * ps[1].cosh(), -m * ps[2].cosh()]
        } else {
            [m * ps[0].cos(), m * ps[1].cos(), m * ps[2].cos()]
        };
        let scale = 1.0 + x.iter().map(|v| v * v).sum::<f64>().powf(1.5);
        prop_assert!(s3body_implicit(&x, l).abs() < 1e-12 * scale);
    }

    #[test]
    fn format_round_trip(v in prop::num::f64::NORMAL) {
        let r = round9(v);
        prop_assert_eq!(fmt9(r), fmt9(v));
        prop_assert!((r - v).abs() <= 1e-8 * v.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euler_kappa_and_collinearity(t in 0.02..3.12f64) {
        prop_assume!((t - FRAC_PI_3).abs() > 1e-3 && (t - 2.0 * FRAC_PI_3).abs() > 1e-3 && (t - 1.5708).abs() > 1e-3);
        let re = eulerian_family(&Spherical3Body::default(), t).unwrap();
        prop_assert!(re.kappa >= 0.0 && re.residual < RE_TOL);
    }

    #[test]
    fn lagrange_kappa_and_collinearity(p in 0.02..2.08f64) {
        prop_assume!((p - std::f64::consts::FRAC_PI_2).abs() > 1e-3);
        let re = lagrangian_family(&Spherical3Body::default(), p).unwrap();
        prop_assert!(re.kappa >= 0.0 && re.residual < RE_TOL);
    }

    #[test]
    fn verdict_parity(fam in prop::sample::select(vec![ScanFamily::Euler, ScanFamily::Lagrange, ScanFamily::PlanarIii]), u in 0.01..0.99f64) {
        let body = Spherical3Body::default();
        let [lo, hi] = fam.domain();
        let hi = if hi.is_finite() { hi } else { 100.0 };
        let Ok(re) = fam.re_at(&body, lo + u * (hi - lo)) else { return Ok(()) };
        let Ok(r) = signature_report(&body, &re) else { return Ok(()) };
        let zeros = r.m_block.zero + r.vl.zero + r.jx.zero;
        let odd = zeros == 0 && r.total_plus() % 2 == 1;
        let stable = r.vl.plus == r.vl.dim() && r.jx.plus == r.jx.dim();
        prop_assert_eq!(r.verdict == Verdict::StableByMinimum, stable);
        if !stable {
            prop_assert_eq!(r.verdict == Verdict::UnstableOddIndex, odd);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn runs_repeat_byte_for_byte(samples in 16usize..60, lag in any::<bool>()) {
        let mut c = RunConfig::new(Command::Stability);
        c.family = Some(if lag { ScanFamily::Lagrange } else { ScanFamily::Euler });
        c.grid.samples = samples;
        let (a, b) = (execute(&c).unwrap(), execute(&c).unwrap());
        prop_assert_eq!(&a.files, &b.files);
        // the written config reproduces the run
        let again = execute(&RunConfig::from_json(&a.files[0].contents).unwrap()).unwrap();
        prop_assert_eq!(&a.files, &again.files);
    }
}
