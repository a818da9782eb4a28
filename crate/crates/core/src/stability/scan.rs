use std::f64::consts::{FRAC_PI_3, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{expected_transitions, signature_report, SignatureReport};
use crate::error::{Error, Result};
use crate::models::Spherical3Body;
use crate::re::{eulerian_family, lagrangian_family, planar_iii, RelEquilibrium};

const REFINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanFamily {
    Euler,
    Lagrange,
    PlanarIii,
}

impl ScanFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(ScanFamily::Euler),
            "lagrange" => Ok(ScanFamily::Lagrange),
            "planar-iii" => Ok(ScanFamily::PlanarIii),
            _ => Err(Error::Config(format!("unknown family `{s}` (euler, lagrange, planar-iii)"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScanFamily::Euler => "euler",
            ScanFamily::Lagrange => "lagrange",
            ScanFamily::PlanarIii => "planar-iii",
        }
    }

    /// Open parameter interval of the family; planar-iii is cut at |L|² = 80.
    pub fn domain(self) -> [f64; 2] {
        match self {
            ScanFamily::Euler => [0.0, PI],
            ScanFamily::Lagrange => [0.0, 2.0 * FRAC_PI_3],
            ScanFamily::PlanarIii => [10.0, 80.0],
        }
    }

    /// n cell midpoints of `range`, which never land on an endpoint.
    pub fn grid(range: [f64; 2], n: usize) -> Vec<f64> {
        let w = (range[1] - range[0]) / n as f64;
        (0..n).map(|k| range[0] + w * (k as f64 + 0.5)).collect()
    }

    pub fn re_at(self, body: &Spherical3Body, p: f64) -> Result<RelEquilibrium> {
        match self {
            ScanFamily::Euler => eulerian_family(body, p),
            ScanFamily::Lagrange => lagrangian_family(body, p),
            ScanFamily::PlanarIii => planar_iii(body, p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub param: f64,
    pub report: Option<SignatureReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub key: String,
    /// First and last grid parameter of the run.
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub param: f64,
    pub from: String,
    pub to: String,
    /// Closest expected transition and the distance to it.
    pub nearest: Option<String>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub family: ScanFamily,
    pub rows: Vec<ScanRow>,
    pub regimes: Vec<Regime>,
    pub transitions: Vec<Transition>,
}

fn key_at(body: &Spherical3Body, family: ScanFamily, p: f64) -> Option<String> {
    let re = family.re_at(body, p).ok()?;
    signature_report(body, &re).ok().map(|r| r.key())
}

/// Edge of the region where `key_at` is defined, between a defined `a` and
/// an undefined `b`.
fn defined_edge(f: &dyn Fn(f64) -> Option<String>, mut a: f64, mut b: f64) -> f64 {
    while (b - a).abs() > REFINE_TOL {
        let m = 0.5 * (a + b);
        if f(m).is_some() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Bisect a key change on [a, b].  If the interior hits an undefined zone
/// (a repeated eigenvalue on the family), report the middle of that zone.
fn refine(f: &dyn Fn(f64) -> Option<String>, mut a: f64, ka: &str, mut b: f64) -> f64 {
    while b - a > REFINE_TOL {
        let m = 0.5 * (a + b);
        match f(m) {
            Some(k) if k == ka => a = m,
            Some(_) => b = m,
            None => {
                let lo = defined_edge(f, a, m);
                // the zone may extend past b; then its right edge is between m and b
                let hi = match f(b) {
                    Some(_) => defined_edge(f, b, m),
                    None => b,
                };
                return 0.5 * (lo + hi);
            }
        }
    }
    0.5 * (a + b)
}

/// Signature table along a family, with key changes refined by bisection.
pub fn signature_scan(body: &Spherical3Body, family: ScanFamily, grid: &[f64]) -> Result<ScanTable> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("scan grid must be strictly increasing".into()));
    }
    let rows: Vec<ScanRow> = grid
        .par_iter()
        .map(|&p| match family.re_at(body, p).and_then(|re| signature_report(body, &re)) {
            Ok(r) => ScanRow { param: p, report: Some(r), error: None },
            Err(e) => ScanRow { param: p, report: None, error: Some(e.to_string()) },
        })
        .collect();

    let ok: Vec<(f64, String)> =
        rows.iter().filter_map(|r| r.report.as_ref().map(|rep| (r.param, rep.key()))).collect();
    let mut regimes: Vec<Regime> = Vec::new();
    for (p, k) in &ok {
        match regimes.last_mut() {
            Some(r) if &r.key == k => {
                r.hi = *p;
                r.count += 1;
            }
            _ => regimes.push(Regime { key: k.clone(), lo: *p, hi: *p, count: 1 }),
        }
    }

    let expected = expected_transitions(family);
    let f = |p: f64| key_at(body, family, p);
    let pairs: Vec<(f64, String, f64, String)> = ok
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[0].0, w[0].1.clone(), w[1].0, w[1].1.clone()))
        .collect();
    let transitions = pairs
        .par_iter()
        .map(|(a, ka, b, kb)| {
            let param = refine(&f, *a, ka, *b);
            let near = expected.iter().min_by(|x, y| (x.1 - param).abs().total_cmp(&(y.1 - param).abs()));
            Transition {
                param,
                from: ka.clone(),
                to: kb.clone(),
                nearest: near.map(|n| n.0.clone()),
                offset: near.map_or(f64::NAN, |n| (n.1 - param).abs()),
            }
        })
        .collect();
    Ok(ScanTable { family, rows, regimes, transitions })
}
