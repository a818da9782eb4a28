use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use reweb_core::io::{execute, Command, ModelId, RunConfig, RunOutput};
use reweb_core::models::AngularPotential;
use reweb_core::stability::ScanFamily;

/// Inertia-eigenvalue webs, relative equilibria and their stability signatures.
#[derive(Parser)]
#[command(name = "reweb", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Extract a constant-eigenvalue leaf as an OBJ mesh and a point CSV.
    Web(WebArgs),
    /// Catalog of relative equilibria (s3body, s2body) or ellipsoid web samples.
    Classify(ClassifyArgs),
    /// Signature table along a 3-body family.
    Stability(StabilityArgs),
    /// Run the property and oracle suite; exits 3 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags given alongside override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Output file stem (defaults to the command name).
    #[arg(long)]
    prefix: Option<String>,
    /// Seed for the randomised checks.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ModelArgs {
    /// s3body, s2body, fullbody, triatomic, rubber-ball or ellipsoid.
    #[arg(long)]
    model: Option<String>,
    /// Pair potential: cot or inverse-angle.
    #[arg(long)]
    potential: Option<String>,
    /// Masses, comma separated.
    #[arg(long = "m", value_delimiter = ',')]
    masses: Option<Vec<f64>>,
    /// Principal moments I1,I2,I3 of the full body.
    #[arg(long = "I", value_delimiter = ',')]
    moments: Option<Vec<f64>>,
    /// Orbit radii rho1,rho2 of the ellipsoid.
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<f64>>,
}

#[derive(Args)]
struct WebArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Eigenvalue level of the leaf.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Grid cells per axis (at least 16).
    #[arg(long)]
    res: Option<usize>,
    /// Boundary clipping slack.
    #[arg(long)]
    tau_bd: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Samples per family curve (s3body, s2body).
    #[arg(long)]
    n: Option<usize>,
    /// Grid cells per axis of the ellipsoid shape plane.
    #[arg(long)]
    res: Option<usize>,
    /// Largest collinearity residual written to the catalog.
    #[arg(long)]
    max_residual: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct StabilityArgs {
    /// euler, lagrange or planar-iii.
    #[arg(long)]
    family: Option<String>,
    /// Scan points.
    #[arg(long)]
    n: Option<usize>,
    /// Parameter range lo,hi (defaults to the family domain).
    #[arg(long, value_delimiter = ',')]
    range: Option<Vec<f64>>,
    /// |L|^2 range for planar-iii; same as --range.
    #[arg(long = "Lsq-range", value_delimiter = ',')]
    lsq_range: Option<Vec<f64>>,
    /// Pair potential: cot or inverse-angle.
    #[arg(long)]
    potential: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
}

fn fixed<const N: usize>(name: &str, v: Vec<f64>) -> Result<[f64; N]> {
    v.try_into().map_err(|v: Vec<f64>| anyhow::anyhow!(reweb_core::Error::Config(format!(
        "--{name} takes {N} comma-separated values, got {}",
        v.len()
    ))))
}

fn config_err(msg: String) -> anyhow::Error {
    reweb_core::Error::Config(msg).into()
}

fn base_config(command: Command, common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            let c = RunConfig::from_json(&text)?;
            if c.command != command {
                return Err(config_err(format!("config file is for `{}`, not `{}`", c.command.label(), command.label())));
            }
            c
        }
        None => RunConfig::new(command),
    };
    if let Some(d) = &common.out {
        cfg.output.dir = d.clone();
    }
    if let Some(p) = &common.prefix {
        cfg.output.prefix = Some(p.clone());
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn apply_potential(cfg: &mut RunConfig, p: &Option<String>) -> Result<()> {
    if let Some(p) = p {
        cfg.model.potential = AngularPotential::parse(p)?;
    }
    Ok(())
}

fn apply_model(cfg: &mut RunConfig, m: ModelArgs) -> Result<()> {
    if let Some(id) = &m.model {
        cfg.model.id = ModelId::parse(id)?;
    }
    apply_potential(cfg, &m.potential)?;
    if let Some(ms) = m.masses {
        cfg.model.masses = Some(ms);
    }
    if let Some(i) = m.moments {
        cfg.model.moments = Some(fixed("I", i)?);
    }
    if let Some(r) = m.rho {
        cfg.model.rho = Some(fixed("rho", r)?);
    }
    Ok(())
}

fn build_config(cmd: Cmd) -> Result<RunConfig> {
    Ok(match cmd {
        Cmd::Web(a) => {
            let mut c = base_config(Command::Web, &a.common)?;
            apply_model(&mut c, a.model)?;
            c.lambda = a.lambda.or(c.lambda);
            if let Some(r) = a.res {
                c.grid.resolution = r;
            }
            if let Some(t) = a.tau_bd {
                c.tolerances.boundary = t;
            }
            c
        }
        Cmd::Classify(a) => {
            let mut c = base_config(Command::Classify, &a.common)?;
            apply_model(&mut c, a.model)?;
            if let Some(n) = a.n {
                c.grid.samples = n;
            }
            if let Some(r) = a.res {
                c.grid.resolution = r;
            }
            if let Some(t) = a.max_residual {
                c.tolerances.residual = t;
            }
            c
        }
        Cmd::Stability(a) => {
            let mut c = base_config(Command::Stability, &a.common)?;
            apply_potential(&mut c, &a.potential)?;
            if let Some(f) = &a.family {
                c.family = Some(ScanFamily::parse(f)?);
            }
            if let Some(n) = a.n {
                c.grid.samples = n;
            }
            match (a.range, a.lsq_range) {
                (Some(_), Some(_)) => bail!(config_err("give --range or --Lsq-range, not both".into())),
                (Some(r), None) => c.range = Some(fixed("range", r)?),
                (None, Some(r)) => {
                    if c.family != Some(ScanFamily::PlanarIii) {
                        bail!(config_err("--Lsq-range applies to --family planar-iii".into()));
                    }
                    c.range = Some(fixed("Lsq-range", r)?);
                }
                (None, None) => {}
            }
            c
        }
        Cmd::Verify(a) => base_config(Command::Verify, &a.common)?,
    })
}

// a closed stdout (e.g. piped into head) must not stop files being written
fn say(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn write_outputs(out: &RunOutput) -> Result<()> {
    let dir = Path::new(&out.config.output.dir);
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for f in &out.files {
        let p = dir.join(&f.name);
        std::fs::write(&p, &f.contents).with_context(|| format!("writing {}", p.display()))?;
        say(&format!("wrote {}", p.display()));
    }
    Ok(())
}

fn thread_cap() -> Result<()> {
    let Ok(v) = std::env::var("WEB_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => bail!(config_err(format!("WEB_THREADS must be a positive integer, got `{v}`"))),
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    thread_cap()?;
    let cfg = build_config(cli.cmd)?;
    let out = execute(&cfg)?;
    for line in &out.summary {
        say(line);
    }
    write_outputs(&out)?;
    if out.failures > 0 {
        eprintln!("error: {} check(s) failed", out.failures);
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // bad flags are configuration errors (exit 1); help and version are not
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<reweb_core::Error>() {
                Some(reweb_core::Error::EmptyLeaf) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
