//! Energy-momentum signatures of relative equilibria.
//!
//! The Hessian of the energy-momentum function at a relative equilibrium
//! splits into three blocks: the inverse reduced metric on shape space, the
//! amended potential V_L, and J_x on the momentum sphere.  The metric block is
//! positive definite, so it is declared `+++` and never computed.

mod hessian;
mod scan;
mod thresholds;

pub use hessian::{
    amended_potential, cayley_gradient, hess_vl, hess_vl_interior, AmendedPotential, HessChart, HessVl, Mode, ModeKind,
};
pub use scan::{signature_scan, ScanFamily, ScanRow, ScanTable, Regime, Transition};
pub use thresholds::{expected_transitions, threshold, thresholds, Threshold, ThresholdName};

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{eig_sym, EigenFrame, Signature};
use crate::models::{ModelSystem, Spherical3Body};
use crate::re::{Family, RelEquilibrium, GAP_TOL};

/// Relative zero cut for Hessian eigenvalues.
pub const TAU_ZERO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    StableByMinimum,
    UnstableOddIndex,
    Indeterminate,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::StableByMinimum => "stable-by-minimum",
            Verdict::UnstableOddIndex => "unstable-odd-index",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// Sign string of `values` in the given order; `0` within the relative cut.
pub fn sign_pattern(values: &[f64], tau: f64) -> String {
    values
        .iter()
        .map(|&v| if v > tau { '+' } else if v < -tau { '-' } else { '0' })
        .collect()
}

fn zero_cut(values: &[f64]) -> f64 {
    TAU_ZERO * values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JxBlock {
    /// 1/λ_m − 1/λ_j for m ≠ j in ascending order of λ_m (times |L|²).
    pub values: Vec<f64>,
    pub signature: Signature,
    pub pattern: String,
}

/// Signature of J_x on the momentum sphere at the eigen-axis of branch j.
pub fn jx_signature(frame: &EigenFrame, j: usize) -> Result<JxBlock> {
    jx_signature_gap(frame, j, GAP_TOL)
}

/// As [`jx_signature`] with a caller-chosen cluster tolerance.
pub fn jx_signature_gap(frame: &EigenFrame, j: usize, gap_tol: f64) -> Result<JxBlock> {
    let gap = frame.gap(j);
    if gap < gap_tol * (1.0 + frame.values[j].abs()) {
        return Err(Error::RepeatedEigenvalue { branch: j, gap });
    }
    let lj = frame.values[j];
    let others: Vec<f64> = (0..frame.dim()).filter(|&m| m != j).map(|m| frame.values[m]).collect();
    let values: Vec<f64> = others.iter().map(|lm| 1.0 / lm - 1.0 / lj).collect();
    // each entry against its own scale: a near-collision sends one 1/λ_m to infinity
    let unit: Vec<f64> = values
        .iter()
        .zip(&others)
        .map(|(v, lm)| if v.abs() <= TAU_ZERO * (1.0 / lm.abs() + 1.0 / lj.abs()) { 0.0 } else { v.signum() })
        .collect();
    Ok(JxBlock { signature: Signature::from_values(&unit, 0.5), pattern: sign_pattern(&unit, 0.5), values })
}

/// Verdict from block signatures, the metric block counted as all positive.
pub fn verdict(m: Signature, vl: Signature, jx: Signature) -> Verdict {
    if vl.zero == 0 && vl.minus == 0 && jx.zero == 0 && jx.minus == 0 {
        return Verdict::StableByMinimum;
    }
    let zeros = m.zero + vl.zero + jx.zero;
    if zeros == 0 && (m.plus + vl.plus + jx.plus) % 2 == 1 {
        Verdict::UnstableOddIndex
    } else {
        Verdict::Indeterminate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureReport {
    pub family: Family,
    /// θ (Euler), φ (Lagrange) or |L|² (planar).
    pub param: f64,
    pub lambda: f64,
    pub lsq: f64,
    pub m_block: Signature,
    pub vl: Signature,
    /// V_L signs in mode order (see [`ModeKind`]).
    pub vl_pattern: String,
    pub vl_modes: Vec<Mode>,
    pub jx: Signature,
    pub jx_pattern: String,
    pub verdict: Verdict,
    pub det_vl: f64,
    pub thresholds_nearby: Vec<ThresholdName>,
}

impl SignatureReport {
    /// `(+++,vl,jx)` with blocks in labelled order.
    pub fn key(&self) -> String {
        format!("({},{},{})", self.m_block.pattern(), self.vl_pattern, self.jx_pattern)
    }

    /// Key by sorted counts, for comparison with tables written in any order.
    pub fn count_key(&self) -> String {
        format!("({},{},{})", self.m_block.pattern(), self.vl.pattern(), self.jx.pattern())
    }

    pub fn total_plus(&self) -> usize {
        self.m_block.plus + self.vl.plus + self.jx.plus
    }
}

/// Family parameter of a 3-body RE.
pub fn family_param(re: &RelEquilibrium) -> f64 {
    match re.family {
        Family::EulerI | Family::EulerII => re.x.coords[0],
        Family::Lagrange2I => re.embedded[0].clamp(-1.0, 1.0).acos(),
        Family::PlanarIII => re.momentum_sq,
        _ => f64::NAN,
    }
}

fn nearby(family: Family, p: f64) -> Vec<ThresholdName> {
    let near = |name: ThresholdName, at: f64, w: f64| if (p - at).abs() < w { Some(name) } else { None };
    let t = |n| threshold(n).value;
    match family {
        Family::EulerI | Family::EulerII => [ThresholdName::ThetaScal, ThresholdName::ThetaIso]
            .into_iter()
            .filter_map(|n| near(n, t(n), 1e-2))
            .collect(),
        Family::Lagrange2I => {
            let s = t(ThresholdName::PhiScal);
            [FRAC_PI_2 - s, FRAC_PI_2 + s].into_iter().filter_map(|a| near(ThresholdName::PhiScal, a, 1e-2)).collect()
        }
        Family::PlanarIII => {
            let g = t(ThresholdName::LsqGyro);
            near(ThresholdName::LsqGyro, g, 1e-2 * g).into_iter().collect()
        }
        _ => vec![],
    }
}

/// Full block signature of a normal 3-body RE.
pub fn signature_report(body: &Spherical3Body, re: &RelEquilibrium) -> Result<SignatureReport> {
    let h = hess_vl(body, re)?;
    // on a face the principal axes are fixed by the reflection; hess_vl has
    // already checked the in-plane pair is separated
    let jx = match re.x.chart {
        crate::models::Chart::Face(f) => {
            jx_signature_gap(&eig_sym(&body.face_chart(f).inertia(&re.x.coords)?, 0.0), re.branch, hessian::AXIS_GAP)?
        }
        _ => jx_signature(&eig_sym(&body.inertia(&re.x.coords)?, 0.0), re.branch)?,
    };
    let values = h.values();
    let tau = zero_cut(&values);
    let vl = Signature::from_values(&values, tau);
    let m_block = Signature { plus: 3, zero: 0, minus: 0 };
    let param = family_param(re);
    Ok(SignatureReport {
        family: re.family,
        param,
        lambda: re.lambda,
        lsq: re.momentum_sq,
        m_block,
        vl,
        vl_pattern: sign_pattern(&values, tau),
        vl_modes: h.modes.clone(),
        jx: jx.signature,
        jx_pattern: jx.pattern,
        verdict: verdict(m_block, vl, jx.signature),
        det_vl: h.det(),
        thresholds_nearby: nearby(re.family, param),
    })
}

/// Printed boundary values (E1, E2) of the Euler family, as (1,±1)H(1,±1)ᵀ.
pub fn euler_boundary_printed(theta: f64) -> (f64, f64) {
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let csc3 = 1.0 / s2.powi(3);
    let e2_upper = -4.0 * (2.0 + c2) * (1.0 + 2.0 * c2) * csc3;
    if theta < FRAC_PI_2 {
        let c = theta.cos().powi(2);
        let e1 = 4.0 * (4.0 + c2) * csc3;
        let e2 = -4.0 * (32.0 * c * c * c - 2.0 * c - 1.0) / ((1.0 + 2.0 * c2) * s2.powi(3));
        (e1, e2)
    } else if theta < 2.0 * std::f64::consts::FRAC_PI_3 {
        (6.0 * (4.0 * theta).sin() / s2.powi(4), e2_upper)
    } else {
        let e1 = -6.0 * (7.0 + 8.0 * c2 + 3.0 * (4.0 * theta).cos()) / ((2.0 + c2) * s2.powi(3));
        (e1, e2_upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::re::{eulerian_family, lagrangian_family, planar_iii};

    #[test]
    fn jx_by_rank() {
        let f = eig_sym(&crate::lie::SymTensor::diag(&[1.0, 2.0, 3.0]), 0.0);
        let p: Vec<String> = (0..3).map(|j| jx_signature(&f, j).unwrap().pattern).collect();
        assert_eq!(p, ["--", "+-", "++"]);
        let g = eig_sym(&crate::lie::SymTensor::diag(&[1.0, 1.0, 3.0]), 0.0);
        assert!(matches!(jx_signature(&g, 0), Err(Error::RepeatedEigenvalue { .. })));
    }

    #[test]
    fn verdict_rules() {
        let s = |p, z, m| Signature { plus: p, zero: z, minus: m };
        let m = s(3, 0, 0);
        assert_eq!(verdict(m, s(3, 0, 0), s(2, 0, 0)), Verdict::StableByMinimum);
        assert_eq!(verdict(m, s(2, 0, 1), s(0, 0, 2)), Verdict::UnstableOddIndex);
        assert_eq!(verdict(m, s(3, 0, 0), s(0, 0, 2)), Verdict::Indeterminate);
        assert_eq!(verdict(m, s(1, 1, 1), s(1, 0, 1)), Verdict::Indeterminate);
    }

    #[test]
    fn jx_for_known_families() {
        let b = Spherical3Body::default();
        let r = signature_report(&b, &lagrangian_family(&b, 1.0).unwrap()).unwrap();
        assert_eq!(r.jx_pattern, "--");
        let r = signature_report(&b, &planar_iii(&b, 10.0).unwrap()).unwrap();
        assert_eq!(r.jx_pattern, "++");
        let r = signature_report(&b, &eulerian_family(&b, 1.5).unwrap()).unwrap();
        assert_eq!(r.jx_pattern, "+-");
    }

    #[test]
    fn table_examples() {
        let b = Spherical3Body::default();
        let r = signature_report(&b, &eulerian_family(&b, 0.5).unwrap()).unwrap();
        assert_eq!(r.key(), "(+++,++-,--)");
        assert_eq!(r.total_plus(), 5);
        assert_eq!(r.verdict, Verdict::UnstableOddIndex);
        let r = signature_report(&b, &lagrangian_family(&b, 1.95).unwrap()).unwrap();
        assert_eq!(r.key(), "(+++,+++,++)");
        assert_eq!(r.verdict, Verdict::StableByMinimum);
        let r = signature_report(&b, &planar_iii(&b, 50.0).unwrap()).unwrap();
        assert_eq!(r.count_key(), "(+++,+++,++)");
        assert_eq!(r.verdict, Verdict::StableByMinimum);
    }

    #[test]
    fn printed_quarter_turn() {
        let (e1, e2) = euler_boundary_printed(std::f64::consts::FRAC_PI_4);
        assert!((e1 - 16.0).abs() < 1e-12 && (e2 + 8.0).abs() < 1e-12);
    }
}
