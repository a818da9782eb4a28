//! OBJ, CSV and JSON writers.  All output is built in memory and is a pure
//! function of its input, so equal inputs give byte-identical files.

use serde::Serialize;

use super::format::{fmt9, fmt9_opt, round9};
use crate::models::RiemannEllipsoid;
use crate::re::{AbnormalReport, Catalog, RelEquilibrium, TwoBodyCatalog};
use crate::stability::{ScanTable, Threshold};
use crate::web::IsoMesh;

pub const CATALOG_HEADER: [&str; 10] =
    ["family", "x1", "x2", "x3", "theta12", "theta23", "lambda", "kappa", "Lsq", "normal"];
pub const SIGNATURE_HEADER: [&str; 7] = ["family", "param", "sig_m", "sig_vl", "sig_jx", "verdict", "det_vl"];
pub const POINTS_HEADER: [&str; 4] = ["x1", "x2", "x3", "residual"];
pub const ELLIPSOID_HEADER: [&str; 13] = [
    "z1", "z2", "x1", "x2", "x3", "k", "S_plus", "S_minus", "R_plus", "R_minus", "in_R_plus", "in_R_minus",
    "solutions",
];

fn csv_text<I, R>(preamble: &str, header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r.into_iter().collect::<Vec<_>>()).expect("in-memory csv");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv");
    format!("{preamble}{body}")
}

fn json_text<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable export");
    s.push('\n');
    s
}

/// Wavefront OBJ with 1-based faces.
pub fn mesh_obj(mesh: &IsoMesh) -> String {
    let mut s = format!(
        "# level {} vertices {} triangles {}\n",
        fmt9(mesh.level),
        mesh.vertices.len(),
        mesh.triangles.len()
    );
    for v in &mesh.vertices {
        s.push_str(&format!("v {} {} {}\n", fmt9(v[0]), fmt9(v[1]), fmt9(v[2])));
    }
    for t in &mesh.triangles {
        s.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    s
}

pub fn mesh_points_csv(mesh: &IsoMesh) -> String {
    csv_text(
        "",
        &POINTS_HEADER,
        mesh.vertices
            .iter()
            .zip(&mesh.residuals)
            .map(|(v, r)| vec![fmt9(v[0]), fmt9(v[1]), fmt9(v[2]), fmt9(*r)]),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogRecord {
    pub family: String,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub x3: Option<f64>,
    pub theta12: Option<f64>,
    pub theta23: Option<f64>,
    pub lambda: f64,
    pub kappa: Option<f64>,
    #[serde(rename = "Lsq")]
    pub lsq: Option<f64>,
    pub normal: bool,
}

impl CatalogRecord {
    fn fields(&self) -> Vec<String> {
        vec![
            self.family.clone(),
            fmt9_opt(self.x1),
            fmt9_opt(self.x2),
            fmt9_opt(self.x3),
            fmt9_opt(self.theta12),
            fmt9_opt(self.theta23),
            fmt9(self.lambda),
            fmt9_opt(self.kappa),
            fmt9_opt(self.lsq),
            self.normal.to_string(),
        ]
    }

    fn three_body(family: &str, x: &[f64], lambda: f64, kappa: Option<f64>, lsq: Option<f64>, normal: bool) -> Self {
        let acos = |c: f64| round9(c.clamp(-1.0, 1.0).acos());
        CatalogRecord {
            family: family.to_string(),
            x1: Some(round9(x[0])),
            x2: Some(round9(x[1])),
            x3: Some(round9(x[2])),
            theta12: Some(acos(x[0])),
            theta23: Some(acos(x[2])),
            lambda: round9(lambda),
            kappa: kappa.map(round9),
            lsq: lsq.map(round9),
            normal,
        }
    }

    pub fn from_re(re: &RelEquilibrium) -> Self {
        Self::three_body(re.family.label(), &re.embedded, re.lambda, Some(re.kappa), Some(re.momentum_sq), re.normal)
    }

    pub fn from_abnormal(r: &AbnormalReport) -> Self {
        Self::three_body("Abnormal", &r.x.coords, r.lambda, None, None, false)
    }
}

/// Records of a 3-body catalog: every accepted curve sample, then the
/// abnormal points that admit a solution.  Samples with a residual above
/// `max_residual` are dropped; the count of those is returned too.
pub fn catalog_records(cat: &Catalog, max_residual: f64) -> (Vec<CatalogRecord>, usize) {
    let mut out = Vec::new();
    let mut dropped = 0;
    for re in cat.curves.iter().flat_map(|c| &c.samples) {
        if re.residual <= max_residual {
            out.push(CatalogRecord::from_re(re));
        } else {
            dropped += 1;
        }
    }
    out.extend(cat.abnormal.iter().filter(|a| a.exists).map(CatalogRecord::from_abnormal));
    (out, dropped)
}

fn two_body_record(family: &str, theta: f64, lambda: f64, kappa: Option<f64>, lsq: Option<f64>, normal: bool) -> CatalogRecord {
    CatalogRecord {
        family: family.to_string(),
        x1: Some(round9(theta.cos())),
        x2: None,
        x3: None,
        theta12: Some(round9(theta)),
        theta23: None,
        lambda: round9(lambda),
        kappa: kappa.map(round9),
        lsq: lsq.map(round9),
        normal,
    }
}

/// 2-body records: x1 = cos θ and theta12 = θ; the other shape columns are empty.
pub fn two_body_records(cat: &TwoBodyCatalog, max_residual: f64) -> (Vec<CatalogRecord>, usize) {
    let mut out = Vec::new();
    let mut dropped = 0;
    for (t, res) in cat.thetas.iter().zip(&cat.per_theta) {
        for re in res {
            if re.residual <= max_residual {
                out.push(two_body_record(re.family.label(), *t, re.lambda, Some(re.kappa), Some(re.momentum_sq), true));
            } else {
                dropped += 1;
            }
        }
    }
    if let Some(a) = cat.abnormal.as_ref().filter(|a| a.exists) {
        out.push(two_body_record("Abnormal", a.x.coords[0], a.lambda, None, None, false));
    }
    (out, dropped)
}

pub fn catalog_csv(records: &[CatalogRecord]) -> String {
    csv_text("", &CATALOG_HEADER, records.iter().map(|r| r.fields()))
}

pub fn catalog_json(records: &[CatalogRecord]) -> String {
    json_text(records)
}

/// Threshold lines that open the signature CSV.
pub fn threshold_preamble(ts: &[Threshold]) -> String {
    ts.iter().map(|t| format!("# {} = {} ; {}\n", t.name.label(), fmt9(t.value), t.equation)).collect()
}

/// One row per scan point; points where no signature is defined keep their
/// parameter and read `undefined`.
pub fn signature_csv(table: &ScanTable, ts: &[Threshold]) -> String {
    let fam = table.family.label();
    let rows = table.rows.iter().map(|row| match &row.report {
        Some(r) => vec![
            fam.to_string(),
            fmt9(row.param),
            r.m_block.pattern(),
            r.vl_pattern.clone(),
            r.jx_pattern.clone(),
            r.verdict.label().to_string(),
            fmt9(r.det_vl),
        ],
        None => vec![fam.to_string(), fmt9(row.param), String::new(), String::new(), String::new(), "undefined".into(), String::new()],
    });
    csv_text(&threshold_preamble(ts), &SIGNATURE_HEADER, rows)
}

#[derive(Serialize)]
struct ThresholdOut<'a> {
    name: &'a str,
    equation: &'a str,
    value: f64,
    residual: f64,
}

#[derive(Serialize)]
struct RegimeOut<'a> {
    key: &'a str,
    lo: f64,
    hi: f64,
    count: usize,
}

#[derive(Serialize)]
struct TransitionOut<'a> {
    param: f64,
    from: &'a str,
    to: &'a str,
    nearest: Option<&'a str>,
    offset: f64,
}

#[derive(Serialize)]
struct ThresholdFile<'a> {
    family: &'a str,
    thresholds: Vec<ThresholdOut<'a>>,
    regimes: Vec<RegimeOut<'a>>,
    transitions: Vec<TransitionOut<'a>>,
}

/// Thresholds with the scan's regimes and refined transitions.
pub fn thresholds_json(table: &ScanTable, ts: &[Threshold]) -> String {
    json_text(&ThresholdFile {
        family: table.family.label(),
        thresholds: ts
            .iter()
            .map(|t| ThresholdOut { name: t.name.label(), equation: t.equation, value: round9(t.value), residual: round9(t.residual) })
            .collect(),
        regimes: table
            .regimes
            .iter()
            .map(|r| RegimeOut { key: &r.key, lo: round9(r.lo), hi: round9(r.hi), count: r.count })
            .collect(),
        transitions: table
            .transitions
            .iter()
            .map(|t| TransitionOut {
                param: round9(t.param),
                from: &t.from,
                to: &t.to,
                nearest: t.nearest.as_deref(),
                offset: round9(t.offset),
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllipsoidSample {
    pub z1: f64,
    pub z2: f64,
    pub x: [f64; 3],
    pub k: usize,
    #[serde(rename = "S_plus")]
    pub s_plus: f64,
    #[serde(rename = "S_minus")]
    pub s_minus: f64,
    #[serde(rename = "R_plus")]
    pub r_plus: Option<f64>,
    #[serde(rename = "R_minus")]
    pub r_minus: Option<f64>,
    #[serde(rename = "in_R_plus")]
    pub in_r_plus: bool,
    #[serde(rename = "in_R_minus")]
    pub in_r_minus: bool,
    /// Type S and Type R solutions about axis k.
    pub solutions: usize,
}

/// Web functions and region masks on an n×n grid of the log-plane
/// z ∈ [−span, span]², for each axis k.  Shapes with coinciding singular
/// values are skipped.
pub fn ellipsoid_samples(e: &RiemannEllipsoid, n: usize, span: f64) -> Vec<EllipsoidSample> {
    let h = 2.0 * span / n as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = [-span + h * (i as f64 + 0.5), -span + h * (j as f64 + 0.5)];
            let x = RiemannEllipsoid::shape_from_plane(z);
            if RiemannEllipsoid::check_shape(&x).is_err() {
                continue;
            }
            for k in 0..3 {
                let (Ok(ip), Ok(im), Ok(sol)) = (e.region_test(&x, k, true), e.region_test(&x, k, false), e.solutions(&x, k))
                else {
                    continue;
                };
                out.push(EllipsoidSample {
                    z1: round9(z[0]),
                    z2: round9(z[1]),
                    x: x.map(round9),
                    k,
                    s_plus: round9(e.web_s(&x, k, 1)),
                    s_minus: round9(e.web_s(&x, k, -1)),
                    r_plus: e.web_r(&x, k, true).map(round9),
                    r_minus: e.web_r(&x, k, false).map(round9),
                    in_r_plus: ip,
                    in_r_minus: im,
                    solutions: sol.len(),
                });
            }
        }
    }
    out
}

pub fn ellipsoid_csv(samples: &[EllipsoidSample]) -> String {
    csv_text(
        "",
        &ELLIPSOID_HEADER,
        samples.iter().map(|s| {
            vec![
                fmt9(s.z1),
                fmt9(s.z2),
                fmt9(s.x[0]),
                fmt9(s.x[1]),
                fmt9(s.x[2]),
                (s.k + 1).to_string(),
                fmt9(s.s_plus),
                fmt9(s.s_minus),
                fmt9_opt(s.r_plus),
                fmt9_opt(s.r_minus),
                s.in_r_plus.to_string(),
                s.in_r_minus.to_string(),
                s.solutions.to_string(),
            ]
        }),
    )
}

pub fn ellipsoid_json(samples: &[EllipsoidSample]) -> String {
    json_text(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_only_when_needed() {
        let s = csv_text("# a\n", &["name", "v"], vec![vec!["plain".to_string(), "1".into()], vec!["a,b".into(), "say \"hi\"".into()]]);
        assert_eq!(s, "# a\nname,v\nplain,1\n\"a,b\",\"say \"\"hi\"\"\"\n");
    }

    #[test]
    fn obj_is_one_based() {
        let m = IsoMesh {
            vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0 / 3.0, 0.0]],
            triangles: vec![[0, 1, 2]],
            residuals: vec![0.0; 3],
            level: 1.5,
            spacing: 0.1,
        };
        let s = mesh_obj(&m);
        assert!(s.ends_with("v 0 0.333333333 0\nf 1 2 3\n"), "{s}");
        assert!(mesh_points_csv(&m).starts_with("x1,x2,x3,residual\n0,0,0,0\n"));
    }

    #[test]
    fn catalog_record_shape() {
        let b = crate::models::Spherical3Body::default();
        let re = crate::re::lagrangian_family(&b, 1.0).unwrap();
        let r = CatalogRecord::from_re(&re);
        let csv = catalog_csv(&[r.clone()]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CATALOG_HEADER.join(","));
        let f: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(f[0], "Lagrange-2i");
        assert_eq!(f[1], f[2]);
        assert_eq!(f[9], "true");
        let js: serde_json::Value = serde_json::from_str(&catalog_json(&[r])).unwrap();
        let keys: Vec<&String> = js[0].as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), CATALOG_HEADER.len());
        assert!(js[0]["Lsq"].as_f64().unwrap() > 0.0);
    }
}
