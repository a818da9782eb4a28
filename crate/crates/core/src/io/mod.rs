//! Run configuration, export formats and the command runner.  The runner
//! returns file contents instead of writing them so callers decide where
//! bytes go, and so two runs can be compared directly.

mod config;
mod export;
mod format;

pub use config::{Command, GridConfig, ModelConfig, ModelId, OutputConfig, RunConfig, Tolerances, MIN_RESOLUTION};
pub use export::{
    catalog_csv, catalog_json, catalog_records, ellipsoid_csv, ellipsoid_json, ellipsoid_samples, mesh_obj,
    mesh_points_csv, signature_csv, threshold_preamble, thresholds_json, two_body_records, CatalogRecord,
    EllipsoidSample, CATALOG_HEADER, ELLIPSOID_HEADER, POINTS_HEADER, SIGNATURE_HEADER,
};
pub use format::{fmt9, fmt9_opt, round9, SIG_DIGITS};

use crate::error::{Error, Result};
use crate::models::{FullBodySatellite, RiemannEllipsoid, Sphere2Body, Spherical3Body, Triatomic};
use crate::re::{classify_all, classify_two_body};
use crate::stability::{signature_scan, thresholds, ScanFamily};
use crate::web::{component_count, extract_with, LeafModel, LeafSpec, MeshOptions};

/// Half-width of the log-shape square sampled for ellipsoid webs.
pub const ELLIPSOID_SPAN: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// The resolved configuration, also present among `files`.
    pub config: RunConfig,
    pub files: Vec<OutputFile>,
    /// Human-readable result lines.
    pub summary: Vec<String>,
    /// Failed checks (verify only).
    pub failures: usize,
}

impl RunOutput {
    fn file(&mut self, suffix: &str, contents: String) {
        self.files.push(OutputFile { name: format!("{}{suffix}", self.config.prefix()), contents });
    }
}

fn leaf_model(cfg: &RunConfig) -> Result<LeafModel> {
    let m = &cfg.model;
    Ok(match m.id {
        ModelId::S3Body => LeafModel::S3Body,
        ModelId::FullBody => LeafModel::FullBody(FullBodySatellite::new(m.moments.unwrap_or([1.0, 2.0, 3.0]))?),
        ModelId::Triatomic => {
            let ms = m.masses.as_deref().unwrap_or(&[1.0, 1.0, 1.0]);
            LeafModel::Triatomic(Triatomic::new([ms[0], ms[1], ms[2]])?)
        }
        ModelId::RubberBall => LeafModel::RubberBall,
        other => return Err(Error::Config(format!("no leaf model for {}", other.label()))),
    })
}

fn s3body(cfg: &RunConfig) -> Spherical3Body {
    Spherical3Body::with_potential(cfg.model.potential.build())
}

fn run_web(out: &mut RunOutput) -> Result<()> {
    let cfg = out.config.clone();
    let model = leaf_model(&cfg)?;
    let bounds = model.default_bounds();
    let spec = LeafSpec::eigenvalue(model, cfg.lambda.expect("resolved web config has a level"))?;
    let mesh = extract_with(
        &|x: &[f64]| spec.raw_value(x),
        &|x: &[f64]| spec.boundary(x),
        bounds,
        cfg.grid.resolution,
        spec.level,
        MeshOptions { tau_bd: cfg.tolerances.boundary },
    )?;
    out.summary.push(format!("components: {}", component_count(&mesh)));
    out.summary.push(format!("vertices: {}", mesh.vertices.len()));
    out.summary.push(format!("triangles: {}", mesh.triangles.len()));
    out.file(".obj", mesh_obj(&mesh));
    out.file(".csv", mesh_points_csv(&mesh));
    Ok(())
}

fn run_classify(out: &mut RunOutput) -> Result<()> {
    let cfg = out.config.clone();
    let n = cfg.grid.samples;
    let tol = cfg.tolerances.residual;
    match cfg.model.id {
        ModelId::S3Body => {
            let cat = classify_all(&s3body(&cfg), n)?;
            let (records, dropped) = catalog_records(&cat, tol);
            let fams = cat.families();
            let names: Vec<&str> = fams.iter().map(|f| f.label()).collect();
            let abn = records.iter().filter(|r| !r.normal).count();
            out.summary.push(format!("families: {} ({})", fams.len(), names.join(", ")));
            out.summary.push(format!("abnormal records: {abn}"));
            out.summary.push(format!("records: {} ({dropped} above residual tolerance)", records.len()));
            out.file(".csv", catalog_csv(&records));
            out.file(".json", catalog_json(&records));
        }
        ModelId::S2Body => {
            let ms = cfg.model.masses.as_deref().unwrap_or(&[1.0, 1.0]);
            let mut body = Sphere2Body::new(ms[0], ms[1])?;
            body.potential = cfg.model.potential.build();
            let cat = classify_two_body(&body, n)?;
            let (records, dropped) = two_body_records(&cat, tol);
            let single = cat.per_theta.iter().filter(|v| v.len() == 1).count();
            out.summary.push(format!("thetas with exactly one normal RE: {single} of {}", cat.thetas.len()));
            match cat.abnormal.as_ref().filter(|a| a.exists) {
                Some(a) => out.summary.push(format!(
                    "abnormal family at theta = {} (lambda = {}, {} witnesses)",
                    fmt9(a.x.coords[0]),
                    fmt9(a.lambda),
                    a.witnesses.len()
                )),
                None => out.summary.push("abnormal family: none".into()),
            }
            out.summary.push(format!("records: {} ({dropped} above residual tolerance)", records.len()));
            out.file(".csv", catalog_csv(&records));
            out.file(".json", catalog_json(&records));
        }
        ModelId::Ellipsoid => {
            let r = cfg.model.rho.unwrap_or([3.0, 1.0]);
            let e = RiemannEllipsoid::new(r[0], r[1])?;
            let samples = ellipsoid_samples(&e, cfg.grid.resolution, ELLIPSOID_SPAN);
            let plus = samples.iter().filter(|s| s.in_r_plus).count();
            let minus = samples.iter().filter(|s| s.in_r_minus).count();
            let typed_r = samples.iter().filter(|s| s.r_plus.is_some()).count();
            out.summary.push(format!("samples: {} (shape points x axes)", samples.len()));
            out.summary.push(format!("Type R defined: {typed_r}; in R+: {plus}; in R-: {minus}"));
            out.file(".csv", ellipsoid_csv(&samples));
            out.file(".json", ellipsoid_json(&samples));
        }
        other => return Err(Error::Config(format!("classify does not support {}", other.label()))),
    }
    Ok(())
}

fn run_stability(out: &mut RunOutput) -> Result<()> {
    let cfg = out.config.clone();
    let fam = cfg.family.expect("resolved stability config has a family");
    let range = cfg.range.unwrap_or(fam.domain());
    let table = signature_scan(&s3body(&cfg), fam, &ScanFamily::grid(range, cfg.grid.samples))?;
    let ts = thresholds();
    let undefined = table.rows.iter().filter(|r| r.report.is_none()).count();
    out.summary.push(format!("regimes: {}", table.regimes.len()));
    for r in &table.regimes {
        out.summary.push(format!("  {}  [{}, {}]  {} points", r.key, fmt9(r.lo), fmt9(r.hi), r.count));
    }
    for t in &table.transitions {
        out.summary.push(format!(
            "transition at {} ({} -> {}), nearest {} offset {:.1e}",
            fmt9(t.param),
            t.from,
            t.to,
            t.nearest.as_deref().unwrap_or("-"),
            t.offset
        ));
    }
    if undefined > 0 {
        out.summary.push(format!("undefined points: {undefined}"));
    }
    out.file(".csv", signature_csv(&table, &ts));
    out.file(".thresholds.json", thresholds_json(&table, &ts));
    Ok(())
}

fn run_verify(out: &mut RunOutput) -> Result<()> {
    let report = crate::verify::run_suite(out.config.seed);
    for c in &report.checks {
        out.summary.push(format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    out.failures = report.failures();
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    out.file(".json", s);
    Ok(())
}

/// Resolve `config` and run it.  The effective configuration is the first
/// output file.
pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    let config = config.resolve()?;
    let mut out = RunOutput { config: config.clone(), files: vec![], summary: vec![], failures: 0 };
    out.file(".config.json", config.to_json());
    match config.command {
        Command::Web => run_web(&mut out)?,
        Command::Classify => run_classify(&mut out)?,
        Command::Stability => run_stability(&mut out)?,
        Command::Verify => run_verify(&mut out)?,
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn web_run_files() {
        let mut c = RunConfig::new(Command::Web);
        c.lambda = Some(1.5);
        c.grid.resolution = 24;
        let out = execute(&c).unwrap();
        let names: Vec<&str> = out.files.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["web.config.json", "web.obj", "web.csv"]);
        assert_eq!(out.summary[0], "components: 1");
        assert_eq!(RunConfig::from_json(&out.files[0].contents).unwrap(), out.config);
    }

    #[test]
    fn empty_leaf_is_typed() {
        let mut c = RunConfig::new(Command::Web);
        c.model.id = ModelId::FullBody;
        c.model.moments = Some([1.0, 2.0, 3.0]);
        c.lambda = Some(0.5);
        assert_eq!(execute(&c).unwrap_err(), Error::EmptyLeaf);
    }

    #[test]
    fn stability_header_carries_thresholds() {
        let mut c = RunConfig::new(Command::Stability);
        c.family = Some(ScanFamily::PlanarIii);
        c.grid.samples = 20;
        let out = execute(&c).unwrap();
        let csv = &out.files[1].contents;
        assert!(csv.starts_with("# theta_scal = 0.906225809 ; "), "{csv}");
        assert!(csv.contains("# Lsq_gyro = 41.5692194 ; "));
        assert!(csv.contains("\nfamily,param,sig_m,sig_vl,sig_jx,verdict,det_vl\nplanar-iii,11.75,+++,"));
        let js: serde_json::Value = serde_json::from_str(&out.files[2].contents).unwrap();
        assert_eq!(js["regimes"].as_array().unwrap().len(), 2);
    }
}
