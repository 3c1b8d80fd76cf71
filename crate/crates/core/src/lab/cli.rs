//! Command-line surface of the `conelab` binary.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::config::{parse_body, ScenarioConfig};
use super::report::{write_report, Cell, Report, ReportFormat};
use super::scenario::run_scenario;
use crate::body::Body;
use crate::catalog::{make_body, make_norm, NormRecipe};
use crate::cone::{cone_over_base, order_interval, LiftedPoint};
use crate::error::{LabError, Result};
use crate::geometry::{NormSpec, Point};
use crate::metrics::{rho_both, DistanceMode};
use crate::oracle::{estimate_thickness, SampleBudget};
use crate::rotundity::{mlur_ladder, ChordSearch};

#[derive(Debug, Parser)]
#[command(name = "conelab", version, about = "Order intervals in cones over convex bases")]
pub struct Cli {
    /// Seed for every sampler (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sample count for oracle estimates (overrides the config).
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<ReportFormat>,
    /// Norm on the base space.
    #[arg(long, global = true, value_enum, default_value = "l2")]
    pub norm: NormArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    L1,
    L2,
    Linf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Max,
    Min,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario config file.
    Run {
        config: PathBuf,
        /// `key.path=value` overrides, applied in order.
        #[arg(long = "set")]
        sets: Vec<String>,
    },
    /// Vertices of ⟦0, z⟧; `z` is `t,x1,…,xn`.
    Interval { body: String, z: String },
    /// Thickness of ⟦0, x̂⟧.
    Thickness { body: String, x: String },
    /// Distance between ⟦0, x̂⟧ and ⟦0, ŷ⟧.
    Rho {
        body: String,
        x: String,
        y: String,
        #[arg(long, value_enum, default_value = "max")]
        mode: ModeArg,
    },
    /// Rotundity modulus at a sphere point along a δ-ladder.
    Mlur {
        body: String,
        x: String,
        #[arg(long = "delta-ladder", value_delimiter = ',', default_value = "0.2,0.1,0.05,0.02,0.01")]
        deltas: Vec<f64>,
    },
}

/// Outcome of one invocation.
pub struct Outcome {
    pub text: String,
    pub report: Report,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| LabError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// A body file path, or the document itself when no such file exists.
fn load_body(arg: &str) -> Result<Body> {
    let path = Path::new(arg);
    let text = if path.is_file() { read(path)? } else { arg.to_string() };
    make_body(&parse_body(&text)?)
}

fn parse_vec(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| LabError::Config(format!("bad number `{p}` in `{s}`"))))
        .collect()
}

fn base_point(s: &str, body: &Body) -> Result<Point> {
    let v = parse_vec(s)?;
    if v.len() != crate::body::ConvexBody::dim(body) {
        return Err(LabError::Config(format!("point `{s}` does not match the body dimension")));
    }
    Point::new(v).map_err(|e| LabError::Config(e.to_string()))
}

impl Cli {
    fn norm(&self) -> Result<NormSpec> {
        make_norm(&match self.norm {
            NormArg::L1 => NormRecipe::L1,
            NormArg::L2 => NormRecipe::L2,
            NormArg::Linf => NormRecipe::Linf,
        })
    }

    fn budget(&self) -> SampleBudget {
        SampleBudget::new(self.budget.unwrap_or(2000), self.seed.unwrap_or(0))
    }

    /// Execute the command and write the report.
    pub fn execute(&self) -> Result<Outcome> {
        let (report, format, out) = match &self.command {
            Command::Run { config, sets } => {
                let mut cfg = ScenarioConfig::from_toml(&read(config)?, sets)?;
                if let Some(s) = self.seed {
                    cfg.seed = s;
                }
                if let Some(b) = self.budget {
                    cfg.budget.count = b;
                }
                cfg.validate()?;
                let out = self.out.clone().or(cfg.output.clone());
                (run_scenario(&cfg)?, self.format.unwrap_or(cfg.format), out)
            }
            other => (self.single(other)?, self.format.unwrap_or_default(), self.out.clone()),
        };
        let text = write_report(&report, format, out.as_deref())?;
        Ok(Outcome { text: if out.is_some() { String::new() } else { text }, report })
    }

    fn single(&self, cmd: &Command) -> Result<Report> {
        let norm = self.norm()?;
        match cmd {
            Command::Run { .. } => unreachable!("handled by execute"),
            Command::Interval { body, z } => {
                let body = load_body(body)?;
                let zv = parse_vec(z)?;
                let k = cone_over_base(body, norm)?;
                let iv = order_interval(&k, &LiftedPoint::from_slice(&zv))?;
                let verts = iv.vertices().ok_or_else(|| LabError::Unsupported("interval over a curved base has no vertex list".into()))?;
                let mut cols = vec!["t".to_string()];
                cols.extend((1..zv.len()).map(|i| format!("x{i}")));
                let mut r = Report::new(cols);
                for v in verts {
                    r.push(v.iter().map(|c| Cell::Real(*c)).collect());
                }
                Ok(r)
            }
            Command::Thickness { body, x } => {
                let body = load_body(body)?;
                let x = base_point(x, &body)?;
                let k = cone_over_base(body, norm)?;
                let z = LiftedPoint::hat(&x);
                let (value, exact) = match crate::metrics::thickness(&k, &z) {
                    Err(LabError::NeedsSamplingBudget) => (estimate_thickness(&k, &z, &self.budget())?.value, false),
                    other => (other?, true),
                };
                let mut r = Report::new(["thickness", "exact"]);
                r.push(vec![Cell::Real(value), Cell::Flag(exact)]);
                Ok(r)
            }
            Command::Rho { body, x, y, mode } => {
                let body = load_body(body)?;
                let (x, y) = (base_point(x, &body)?, base_point(y, &body)?);
                let k = cone_over_base(body, norm)?;
                let d = rho_both(&k, &LiftedPoint::hat(&x), &LiftedPoint::hat(&y), Some(&self.budget()))?;
                let mode = match mode {
                    ModeArg::Max => DistanceMode::MaxHausdorff,
                    ModeArg::Min => DistanceMode::MinOneSided,
                };
                let mut r = Report::new(["dtilde_fwd", "dtilde_rev", "rho", "exact"]);
                r.push(vec![Cell::Real(d.forward), Cell::Real(d.reverse), Cell::Real(d.value(mode)), Cell::Flag(d.exact)]);
                Ok(r)
            }
            Command::Mlur { body, x, deltas } => {
                let body = load_body(body)?;
                let x = base_point(x, &body)?;
                let values = mlur_ladder(&body, &x, deltas, &norm, &ChordSearch::default())?;
                let mut r = Report::new(["delta", "mlur_modulus"]);
                for (d, v) in deltas.iter().zip(values) {
                    r.push(vec![Cell::Real(*d), Cell::Real(v)]);
                }
                Ok(r)
            }
        }
    }
}

/// Exit status: 0 on success, 1 for configuration errors, 2 for numerical
/// failures (including rows that carry an error code).
pub fn exit_code(result: &Result<Outcome>) -> u8 {
    match result {
        Ok(o) if o.report.failed_rows() > 0 => 2,
        Ok(_) => 0,
        Err(e) if e.is_config_error() || matches!(e, LabError::Io { .. }) => 1,
        Err(_) => 2,
    }
}
