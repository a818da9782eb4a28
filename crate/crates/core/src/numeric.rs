//! Finite differences, bracketed root finding and small dense solvers.

use crate::error::{Error, Result};
use crate::lie::{eig_sym, SymTensor};

/// Default relative finite-difference step.
pub const FD_STEP: f64 = 1e-4;

fn step(x: f64, h_rel: f64) -> f64 {
    h_rel * (1.0 + x.abs())
}

/// Five-point central first derivative, one Richardson extrapolation.
pub fn deriv1<F>(f: F, x: f64, h_rel: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    deriv1_step(f, x, step(x, h_rel))
}

/// As [`deriv1`] with an absolute step.
pub fn deriv1_step<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let d = |h: f64| -> Result<f64> {
        Ok((-f(x + 2.0 * h)? + 8.0 * f(x + h)? - 8.0 * f(x - h)? + f(x - 2.0 * h)?) / (12.0 * h))
    };
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    Ok((16.0 * d2 - d1) / 15.0)
}

/// Five-point central second derivative, one Richardson extrapolation.
pub fn deriv2<F>(f: F, x: f64, h_rel: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    deriv2_step(f, x, step(x, h_rel))
}

/// As [`deriv2`] with an absolute step.
pub fn deriv2_step<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let f0 = f(x)?;
    let d = |h: f64| -> Result<f64> {
        Ok((-f(x + 2.0 * h)? + 16.0 * f(x + h)? - 30.0 * f0 + 16.0 * f(x - h)? - f(x - 2.0 * h)?)
            / (12.0 * h * h))
    };
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    Ok((16.0 * d2 - d1) / 15.0)
}

fn shifted(x: &[f64], i: usize, di: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += di;
    y
}

pub fn gradient<F>(f: &F, x: &[f64], h_rel: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    (0..x.len())
        .map(|i| deriv1(|t| f(&shifted(x, i, t - x[i])), x[i], h_rel))
        .collect()
}

pub fn hessian<F>(f: &F, x: &[f64], h_rel: f64) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let h: Vec<f64> = x.iter().map(|&v| step(v, h_rel)).collect();
    hessian_steps(f, x, &h)
}

/// Hessian with a caller-chosen absolute step per coordinate.
pub fn hessian_steps<F>(f: &F, x: &[f64], h: &[f64]) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = x.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        out[i][i] = deriv2_step(|t| f(&shifted(x, i, t - x[i])), x[i], h[i])?;
        for j in 0..i {
            let v = deriv1_step(
                |s| {
                    let y = shifted(x, j, s - x[j]);
                    deriv1_step(|t| f(&shifted(&y, i, t - y[i])), y[i], h[i])
                },
                x[j],
                h[j],
            )?;
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Bisection on a sign-changing bracket until the bracket is below `tol`.
pub fn bisect<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoRoot { lo, hi });
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Illinois-modified regula falsi; converges superlinearly on smooth brackets.
pub fn illinois<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot { lo, hi });
    }
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() < tol {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() < tol {
            return Ok(0.5 * (a + b));
        }
    }
    Ok((a * fb - b * fa) / (fb - fa))
}

/// Sign changes of `f` on a uniform grid, each refined to `tol`.
pub fn all_roots<F>(f: F, lo: f64, hi: f64, n: usize, tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let mut out = Vec::new();
    let xs: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for k in 0..n {
        if vs[k].is_finite() && vs[k + 1].is_finite() && vs[k] * vs[k + 1] < 0.0 {
            if let Ok(r) = bisect(&f, xs[k], xs[k + 1], tol) {
                out.push(r);
            }
        } else if vs[k] == 0.0 {
            out.push(xs[k]);
        }
    }
    out
}

/// Gaussian elimination with partial pivoting.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| {
        let mut r = r.clone();
        r.push(bi);
        r
    }).collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[p][c].abs() <= 1e-14 * scale {
            return Err(Error::Singular("linear system".into()));
        }
        m.swap(c, p);
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            for k in c..=n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    Ok(x)
}

/// Minimum-norm solution of a symmetric system, discarding eigen-directions
/// below `rel_cut` times the largest eigenvalue magnitude.
pub fn pinv_solve_sym(h: &[Vec<f64>], g: &[f64], rel_cut: f64) -> Vec<f64> {
    let s = SymTensor::from_rows(h);
    let f = eig_sym(&s, 0.0);
    let lmax = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut x = vec![0.0; g.len()];
    for (lam, v) in f.values.iter().zip(&f.vectors) {
        if lam.abs() > rel_cut * lmax && lmax > 0.0 {
            let c: f64 = v.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / lam;
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += c * vi;
            }
        }
    }
    x
}

pub struct LmOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Levenberg–Marquardt on `r(x)` with a central-difference Jacobian.
pub fn levenberg_marquardt<F>(r: &F, x0: &[f64], max_iter: usize, tol: f64) -> Result<LmOutcome>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut res = r(&x)?;
    let norm2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
    let mut cost = norm2(&res);
    let mut mu = 1e-3;
    for it in 0..max_iter {
        if cost.sqrt() <= tol {
            return Ok(LmOutcome { x, residual: cost.sqrt(), iterations: it });
        }
        let m = res.len();
        let mut jac = vec![vec![0.0; n]; m];
        for i in 0..n {
            let h = 1e-7 * (1.0 + x[i].abs());
            let rp = r(&shifted(&x, i, h))?;
            let rm = r(&shifted(&x, i, -h))?;
            for k in 0..m {
                jac[k][i] = (rp[k] - rm[k]) / (2.0 * h);
            }
        }
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                jtj[i][j] = (0..m).map(|k| jac[k][i] * jac[k][j]).sum();
            }
            jtr[i] = -(0..m).map(|k| jac[k][i] * res[k]).sum::<f64>();
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[i][i] += mu * (1.0 + jtj[i][i]);
            }
            let dx = match solve(&a, &jtr) {
                Ok(d) => d,
                Err(_) => {
                    mu *= 10.0;
                    continue;
                }
            };
            let xn: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
            if let Ok(rn) = r(&xn) {
                let cn = norm2(&rn);
                if cn.is_finite() && cn < cost {
                    x = xn;
                    res = rn;
                    cost = cn;
                    mu = (mu * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !improved {
            return Ok(LmOutcome { x, residual: cost.sqrt(), iterations: it });
        }
    }
    Ok(LmOutcome { x, residual: cost.sqrt(), iterations: max_iter })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_smooth_functions() {
        let d = deriv1(|t| Ok(t.sin()), 0.7, FD_STEP).unwrap();
        assert!((d - 0.7f64.cos()).abs() < 1e-10);
        let d2 = deriv2(|t| Ok(t.exp()), 0.3, FD_STEP).unwrap();
        assert!((d2 - 0.3f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn hessian_of_quadratic_form() {
        let f = |x: &[f64]| Ok(x[0] * x[0] + 3.0 * x[0] * x[1] - 2.0 * x[1] * x[1] + x[2].powi(3));
        let h = hessian(&f, &[0.2, -0.1, 0.5], FD_STEP).unwrap();
        let want = [[2.0, 3.0, 0.0], [3.0, -4.0, 0.0], [0.0, 0.0, 3.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((h[i][j] - want[i][j]).abs() < 1e-6, "{i}{j} {}", h[i][j]);
            }
        }
    }

    #[test]
    fn brackets() {
        let r = bisect(|t| t * t - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let r = illinois(|t| t.cos() - t, 0.0, 1.0, 1e-15).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
        assert!(bisect(|t| t * t + 1.0, -1.0, 1.0, 1e-9).is_err());
        assert_eq!(all_roots(|t| (3.0 * t).sin(), 0.1, 3.0, 100, 1e-12).len(), 2);
    }

    #[test]
    fn lm_solves_small_system() {
        let r = |x: &[f64]| Ok(vec![x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]]);
        let out = levenberg_marquardt(&r, &[1.0, 0.2], 100, 1e-14).unwrap();
        assert!(out.residual < 1e-12);
        assert!((out.x[0] - 0.5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn linear_solvers() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        let p = pinv_solve_sym(&[vec![1.0, 0.0], vec![0.0, 0.0]], &[2.0, 5.0], 1e-12);
        assert_eq!(p, vec![2.0, 0.0]);
    }
}
