//! The scenario runners. Each returns one row per trial or ladder step; a
//! numerical failure fills the row with blanks and its error code, while
//! configuration errors abort the run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ScenarioConfig, ScenarioKind};
use super::report::{Cell, Report};
use crate::body::{Body, ConvexBody};
use crate::catalog::{
    make_body, make_norm, random_direction, random_point_in, random_polytope, sequence_toward, BodyRecipe, SequenceKind,
};
use crate::cone::{cone_over_base, order_interval, sandwich_check, ConeOverBase, LiftedPoint};
use crate::error::{LabError, Result};
use crate::geometry::{NormSpec, Point, Polytope};
use crate::metrics::{interval_distances, max_chord, rho_both, thickness, DistanceMode};
use crate::rotundity::{extraneous_point_check, mlur_ladder};

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Table {
    report: Report,
    seed: u64,
}

impl Table {
    fn new(seed: u64, columns: &[&'static str]) -> Self {
        let cols = ["seed"].iter().chain(columns).chain(&["error_code"]).copied();
        Table { report: Report::new(cols), seed }
    }

    /// Append `key` cells and then either the computed cells or blanks with
    /// the error code.
    fn row(&mut self, key: Vec<Cell>, f: impl FnOnce() -> Result<Vec<Cell>>) -> Result<()> {
        let width = self.report.columns.len() - 2 - key.len();
        let mut cells = vec![Cell::Int(self.seed as i64)];
        cells.extend(key);
        match f() {
            Ok(vals) => {
                debug_assert_eq!(vals.len(), width);
                cells.extend(vals);
                cells.push(Cell::Int(0));
            }
            Err(e) if e.is_config_error() => return Err(e),
            Err(e) => {
                cells.extend(std::iter::repeat_n(Cell::Missing, width));
                cells.push(Cell::Int(e.code() as i64));
            }
        }
        self.report.push(cells);
        Ok(())
    }
}

fn hat(x: &Point) -> LiftedPoint {
    LiftedPoint::hat(x)
}

fn lifted_distance(x: &Point, y: &Point, norm: &NormSpec) -> Result<f64> {
    hat(y).sub(&hat(x)).norm_e(norm)
}

fn body_or(cfg: &ScenarioConfig, default: BodyRecipe) -> Result<Body> {
    make_body(cfg.body.as_ref().unwrap_or(&default))
}

fn point_or(cfg: &ScenarioConfig, body: &Body, default: Vec<f64>) -> Result<Point> {
    let x = Point::from(cfg.point.clone().unwrap_or(default));
    if x.dim() != body.dim() {
        return Err(LabError::Config(format!("point has dimension {}, body {}", x.dim(), body.dim())));
    }
    Ok(x)
}

fn e1(n: usize) -> Vec<f64> {
    Point::basis(n, 0).into_vec()
}

fn cone(body: &Body, norm: &NormSpec) -> Result<ConeOverBase> {
    cone_over_base(body.clone(), norm.clone())
}

/// Run one scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Report> {
    cfg.validate()?;
    let norm = make_norm(&cfg.norm)?;
    let table = match cfg.scenario {
        ScenarioKind::Theorem1 => theorem1(cfg, &norm)?,
        ScenarioKind::Theorem2 => theorem2(cfg, &norm)?,
        ScenarioKind::Semicontinuity => semicontinuity(cfg, &norm)?,
        ScenarioKind::LemmaBounds => lemma_bounds(cfg, &norm)?,
        ScenarioKind::ExtraneousLemma => extraneous(cfg, &norm)?,
        ScenarioKind::MlurScan => mlur_scan(cfg, &norm)?,
        ScenarioKind::Theorem4Link => theorem4(cfg, &norm)?,
    };
    Ok(table.report)
}

/// Circle-segment ladder: the nearest vertex to `(1, 0, 0)` approaches it
/// while ρ stays large.
fn theorem1(cfg: &ScenarioConfig, norm: &NormSpec) -> Result<Table> {
    if cfg.body.as_ref().is_some_and(|b| !matches!(b, BodyRecipe::CircleSegment { .. })) {
        return Err(LabError::Config("theorem1 runs on the circle segment family".into()));
    }
    let mut t = Table::new(cfg.seed, &["m", "dist_to_x", "rho_max", "rho_min", "thickness_x"]);
    for &m in &cfg.sequence.m_ladder {
        let body = make_body(&BodyRecipe::CircleSegment { m })?;
        let x = point_or(cfg, &body, vec![1.0, 0.0, 0.0])?;
        t.row(vec![Cell::Int(m as i64)], || {
            let k = cone(&body, norm)?;
            let y = sequence_toward(&body, &x, SequenceKind::VertexWalk, 1)?.pop().ok_or(LabError::Infeasible)?;
            let r = rho_both(&k, &hat(&x), &hat(&y), Some(&cfg.sample_budget()))?;
            Ok(vec![
                Cell::Real(lifted_distance(&x, &y, norm)?),
                Cell::Real(r.value(DistanceMode::MaxHausdorff)),
                Cell::Real(r.value(DistanceMode::MinOneSided)),
                Cell::Real(thickness(&k, &hat(&x))?),
            ])
        })?;
    }
    Ok(t)
}

/// Continuity at an interior point: ρ along shrinking offsets and the
/// sandwich inclusion at the configured ε.
fn theorem2(cfg: &ScenarioConfig, norm: &NormSpec) -> Result<Table> {
    let body = body_or(cfg, BodyRecipe::Square)?;
    let x = point_or(cfg, &body, body.center())?;
    let k = cone(&body, norm)?;
    let mut t = Table::new(cfg.seed, &["radius", "trial", "dist_y_x", "rho_max", "sandwich"]);
    for &r in &cfg.sequence.radii {
        for trial in 0..cfg.sequence.trials {
            let mut rng = trial_rng(cfg.seed, trial as u64);
            let d = random_direction(&mut rng, body.dim());
            t.row(vec![Cell::Real(r), Cell::Int(trial as i64)], || {
                let scale = r / norm.eval(&d)?;
                let y = x.add(&d.scale(scale));
                let rho = rho_both(&k, &hat(&x), &hat(&y), Some(&cfg.sample_budget()))?;
                let base = body.as_polytope().ok_or_else(|| LabError::Unsupported("sandwich needs a polytope".into()))?;
                let s = sandwich_check(base, &x, &y, cfg.sequence.epsilon, norm)?;
                Ok(vec![
                    Cell::Real(lifted_distance(&x, &y, norm)?),
                    Cell::Real(rho.value(DistanceMode::MaxHausdorff)),
                    Cell::Flag(s.holds),
                ])
            })?;
        }
    }
    Ok(t)
}

/// Both one-sided defects along boundary sequences converging to x.
fn semicontinuity(cfg: &ScenarioConfig, norm: &NormSpec) -> Result<Table> {
    let body = body_or(cfg, BodyRecipe::CircleSegment { m: 256 })?;
    let x = point_or(cfg, &body, if body.dim() == 3 { vec![1.0, 0.0, 0.0] } else { e1(body.dim()) })?;
    let k = cone(&body, norm)?;
    let seq = sequence_toward(&body, &x, SequenceKind::RandomBoundary { seed: cfg.seed }, cfg.sequence.count)?;
    let ix = order_interval(&k, &hat(&x))?;
    let mut t = Table::new(cfg.seed, &["n", "dist_to_x", "dtilde_fwd", "dtilde_rev", "exact"]);
    for (n, y) in seq.iter().enumerate() {
        t.row(vec![Cell::Int(n as i64 + 1)], || {
            let iy = order_interval(&k, &hat(y))?;
            let d = interval_distances(&iy, &ix, Some(&cfg.sample_budget().with_stream(n as u64)))?;
            Ok(vec![
                Cell::Real(lifted_distance(&x, y, norm)?),
                Cell::Real(d.forward),
                Cell::Real(d.reverse),
                Cell::Flag(d.exact),
            ])
        })?;
    }
    Ok(t)
}

/// Configured polytope base, or a random one per trial.
fn trial_base(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng, trial: usize) -> Result<Polytope> {
    match &cfg.body {
        Some(r) => match make_body(r)? {
            Body::Polytope(p) => Ok(p),
            _ => Err(LabError::Config("random-trial scenarios need a polytope base".into())),
        },
        None => {
            let dim = 1 + trial % cfg.sequence.max_dim;
            random_polytope(rng, dim, cfg.sequence.max_vertices)
        }
    }
}

/// `l(x)/(4·max(1, ‖x‖)) ≤ thickness(x̂) ≤ l(x)` on random bases and points;
/// inside the unit ball the lower bound is `l(x)/4`.
fn lemma_bounds(cfg: &ScenarioConfig, norm: &NormSpec) -> Result<Table> {
    let mut t = Table::new(cfg.seed, &["trial", "dim", "l_x", "thickness_x", "lower_bound", "pass"]);
    for trial in 0..cfg.sequence.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let base = trial_base(cfg, &mut rng, trial)?;
        let x = random_point_in(&mut rng, &base);
        t.row(vec![Cell::Int(trial as i64), Cell::Int(base.dim() as i64)], || {
            let body = Body::Polytope(base.clone());
            let l = max_chord(&body, &x, norm)?;
            let th = thickness(&cone(&body, norm)?, &hat(&x))?;
            let lower = l / (4.0 * norm.eval(&x)?.max(1.0));
            let pass = lower - 1e-7 <= th && th <= l + 1e-7;
            Ok(vec![Cell::Real(l), Cell::Real(th), Cell::Real(lower), Cell::Flag(pass)])
        })?;
    }
    Ok(t)
}

/// The two sides of the extraneous-point equivalence on random triples.
fn extraneous(cfg: &ScenarioConfig, norm: &NormSpec) -> Result<Table> {
    let cols = ["trial", "segment_in_b", "midpoint_in_interval", "segment_margin", "interval_margin", "decisive", "pass"];
    let mut t = Table::new(cfg.seed, &cols);
    for trial in 0..cfg.sequence.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let base = trial_base(cfg, &mut rng, trial)?;
        let x = random_point_in(&mut rng, &base);
        let d = random_direction(&mut rng, base.dim());
        let stretch: f64 = rng.gen_range(0.0..2.0);
        t.row(vec![Cell::Int(trial as i64)], || {
            let body = Body::Polytope(base.clone());
            let neg = d.scale(-1.0);
            let reach = body.exit_distance(&x, &d, 0.0).min(body.exit_distance(&x, &neg, 0.0));
            let len = if reach > 1e-9 { reach } else { 0.25 * base.bounding_radius().unwrap_or(1.0) };
            let a = d.scale(stretch * len);
            let c = extraneous_point_check(&cone(&body, norm)?, &x, &a)?;
            let decisive = c.decisive(1e-8);
            Ok(vec![
                Cell::Flag(c.segment_in_b),
                Cell::Flag(c.midpoint_in_interval),
                Cell::Real(c.segment_margin),
                Cell::Real(c.interval_margin),
                Cell::Flag(decisive),
                Cell::Flag(!decisive || c.segment_in_b == c.midpoint_in_interval),
            ])
        })?;
    }
    Ok(t)
}

/// The rotundity modulus along the δ-ladder.
fn mlur_scan(cfg: &ScenarioConfig, norm: &NormSpec) -> Result<Table> {
    let body = body_or(cfg, BodyRecipe::LpBall { p: 2.0, n: 2 })?;
    let x = point_or(cfg, &body, e1(body.dim()))?;
    let mut t = Table::new(cfg.seed, &["delta", "mlur_modulus"]);
    let values = mlur_ladder(&body, &x, &cfg.sequence.delta_ladder, norm, &cfg.chord);
    for (i, &delta) in cfg.sequence.delta_ladder.iter().enumerate() {
        t.row(vec![Cell::Real(delta)], || match &values {
            Ok(v) => Ok(vec![Cell::Real(v[i])]),
            Err(e) => Err(e.clone()),
        })?;
    }
    Ok(t)
}

/// ρ along a sequence converging to a sphere point: bounded away from zero
/// for the truncated Hilbert body, vanishing for rotund bodies.
fn theorem4(cfg: &ScenarioConfig, norm: &NormSpec) -> Result<Table> {
    let body = body_or(cfg, BodyRecipe::TruncatedHilbert { n: 6 })?;
    let x = point_or(cfg, &body, e1(body.dim()))?;
    let kind = match &body {
        Body::Hilbert(_) => SequenceKind::RadialCenters,
        Body::Polytope(_) => SequenceKind::VertexWalk,
        Body::Ball(_) => SequenceKind::RandomBoundary { seed: cfg.seed },
    };
    let k = cone(&body, norm)?;
    let seq = sequence_toward(&body, &x, kind, cfg.sequence.count)?;
    let mut t = Table::new(cfg.seed, &["n", "dist_to_x", "rho_max", "rho_min", "exact"]);
    for (n, y) in seq.iter().enumerate() {
        t.row(vec![Cell::Int(n as i64 + 1)], || {
            let r = rho_both(&k, &hat(&x), &hat(y), Some(&cfg.sample_budget().with_stream(n as u64)))?;
            Ok(vec![
                Cell::Real(lifted_distance(&x, y, norm)?),
                Cell::Real(r.value(DistanceMode::MaxHausdorff)),
                Cell::Real(r.value(DistanceMode::MinOneSided)),
                Cell::Flag(r.exact),
            ])
        })?;
    }
    Ok(t)
}
