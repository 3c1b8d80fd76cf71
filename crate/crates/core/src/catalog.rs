//! Named bodies and the point sequences the scenarios walk along.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::body::{Body, ConvexBody, L2Ball, TruncatedHilbert};
use crate::error::{LabError, Result};
use crate::geometry::{dist2, norm2, Halfspace, NormSpec, Point, Polytope, EPS_FEAS};

/// A body by name and parameters, as written in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodyRecipe {
    /// `[0, 1]`.
    UnitInterval,
    /// `[−1, 1]²`.
    Square,
    /// `conv{0, e₁, …, eₙ}`.
    Simplex { n: usize },
    /// Unit ball of the `p`-norm, `p ∈ {1, 2, ∞}`.
    LpBall { p: f64, n: usize },
    /// Polygonal circle in the plane `x₃ = 0` together with `(1, 0, ±1)`.
    CircleSegment { m: usize },
    TruncatedHilbert { n: usize },
    HullOfPoints { points: Vec<Vec<f64>> },
    /// Rows `[a₁, …, aₙ, b]` meaning `a·x ≤ b`.
    HrepBody { rows: Vec<Vec<f64>> },
}

/// A norm on the base space, as written in config files.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormRecipe {
    L1,
    #[default]
    L2,
    Linf,
    /// Gauge of a centrally symmetric polytope.
    Gauge { body: BodyRecipe },
}

fn bad(msg: impl Into<String>) -> LabError {
    LabError::InvalidRecipe(msg.into())
}

fn recipe_err(e: LabError) -> LabError {
    match e {
        LabError::InvalidRecipe(_) => e,
        other => LabError::InvalidRecipe(other.to_string()),
    }
}

fn cube(n: usize) -> Result<Polytope> {
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        rows.push(Halfspace::new(Point::basis(n, i), 1.0));
        rows.push(Halfspace::new(Point::basis(n, i).scale(-1.0), 1.0));
    }
    let mut vs = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << n) {
        vs.push(Point::from((0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect::<Vec<_>>()));
    }
    Polytope::from_both(rows, vs)
}

fn cross_polytope(n: usize) -> Result<Polytope> {
    let mut rows = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << n) {
        let a: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
        rows.push(Halfspace::new(Point::from(a), 1.0));
    }
    let mut vs = Vec::with_capacity(2 * n);
    for i in 0..n {
        vs.push(Point::basis(n, i));
        vs.push(Point::basis(n, i).scale(-1.0));
    }
    Polytope::from_both(rows, vs)
}

fn simplex(n: usize) -> Result<Polytope> {
    let mut rows: Vec<Halfspace> = (0..n).map(|i| Halfspace::new(Point::basis(n, i).scale(-1.0), 0.0)).collect();
    rows.push(Halfspace::new(Point::from(vec![1.0; n]), 1.0));
    let mut vs = vec![Point::zeros(n)];
    vs.extend((0..n).map(|i| Point::basis(n, i)));
    Polytope::from_both(rows, vs)
}

/// Circle vertices `k = 1, …, m−1` and the poles `(1, 0, ±1)`; the circle
/// point at angle 0 is the midpoint of the poles and not a vertex.
fn circle_segment(m: usize) -> Result<Polytope> {
    let v = |k: usize| -> [f64; 3] {
        let a = 2.0 * PI * k as f64 / m as f64;
        [a.cos(), a.sin(), 0.0]
    };
    let up = [1.0, 0.0, 1.0];
    let down = [1.0, 0.0, -1.0];
    let mut vs: Vec<Point> = (1..m).map(|k| Point::from(v(k).to_vec())).collect();
    vs.push(Point::from(up.to_vec()));
    vs.push(Point::from(down.to_vec()));
    let n = vs.len() as f64;
    let inner: Vec<f64> = (0..3).map(|i| vs.iter().map(|p| p[i]).sum::<f64>() / n).collect();

    let plane = |p: [f64; 3], q: [f64; 3], r: [f64; 3]| -> Halfspace {
        let u = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
        let w = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
        let mut nrm = vec![u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
        let len = norm2(&nrm);
        nrm.iter_mut().for_each(|c| *c /= len);
        let mut off: f64 = nrm.iter().zip(p).map(|(a, b)| a * b).sum();
        let at_inner: f64 = nrm.iter().zip(&inner).map(|(a, b)| a * b).sum();
        if at_inner > off {
            nrm.iter_mut().for_each(|c| *c = -*c);
            off = -off;
        }
        Halfspace::new(Point::from(nrm), off)
    };
    let mut rows = Vec::with_capacity(2 * m - 2);
    for k in 1..m - 1 {
        rows.push(plane(up, v(k), v(k + 1)));
        rows.push(plane(down, v(k), v(k + 1)));
    }
    rows.push(plane(up, down, v(1)));
    rows.push(plane(up, down, v(m - 1)));
    Polytope::from_both(rows, vs)
}

fn hrep_rows(rows: &[Vec<f64>]) -> Result<Polytope> {
    let Some(first) = rows.first() else {
        return Err(bad("hrep body needs at least one row"));
    };
    if first.len() < 2 || rows.iter().any(|r| r.len() != first.len()) {
        return Err(bad("hrep rows must share a length of at least 2"));
    }
    let n = first.len() - 1;
    let hs = rows.iter().map(|r| Halfspace::new(Point::from(r[..n].to_vec()), r[n])).collect();
    Polytope::from_hrep(n, hs)
}

/// Instantiate a recipe. Polytopes come back with both representations.
pub fn make_body(recipe: &BodyRecipe) -> Result<Body> {
    let poly = match recipe {
        BodyRecipe::UnitInterval => {
            let rows = vec![Halfspace::new(Point::from(vec![1.0]), 1.0), Halfspace::new(Point::from(vec![-1.0]), 0.0)];
            Polytope::from_both(rows, vec![Point::from(vec![0.0]), Point::from(vec![1.0])])
        }
        BodyRecipe::Square => cube(2),
        BodyRecipe::Simplex { n } if *n >= 1 => simplex(*n),
        BodyRecipe::LpBall { p, n } if *n >= 1 => {
            if *p == 1.0 {
                cross_polytope(*n)
            } else if p.is_infinite() && *p > 0.0 {
                cube(*n)
            } else if *p == 2.0 {
                if *n == 1 {
                    cube(1)
                } else {
                    return Ok(Body::Ball(L2Ball::unit(*n)));
                }
            } else {
                return Err(bad(format!("p must be 1, 2 or inf, got {p}")));
            }
        }
        BodyRecipe::CircleSegment { m } if *m >= 3 => circle_segment(*m),
        BodyRecipe::CircleSegment { m } => return Err(bad(format!("circle segment needs m ≥ 3, got {m}"))),
        BodyRecipe::TruncatedHilbert { n } => return Ok(Body::Hilbert(TruncatedHilbert::new(*n)?)),
        BodyRecipe::HullOfPoints { points } => {
            let pts = points.iter().map(|p| Point::new(p.clone())).collect::<Result<Vec<_>>>().map_err(recipe_err)?;
            Polytope::from_vertices(pts)
        }
        BodyRecipe::HrepBody { rows } => hrep_rows(rows),
        BodyRecipe::Simplex { .. } | BodyRecipe::LpBall { .. } => return Err(bad("dimension must be at least 1")),
    };
    Body::from_polytope(poly.map_err(recipe_err)?).map_err(recipe_err)
}

/// Instantiate a norm; gauge bodies must be centrally symmetric polytopes
/// with the origin inside.
pub fn make_norm(recipe: &NormRecipe) -> Result<NormSpec> {
    match recipe {
        NormRecipe::L1 => Ok(NormSpec::L1),
        NormRecipe::L2 => Ok(NormSpec::L2),
        NormRecipe::Linf => Ok(NormSpec::Linf),
        NormRecipe::Gauge { body } => match make_body(body)? {
            Body::Polytope(p) => NormSpec::poly_gauge(p).map_err(recipe_err),
            _ => Err(bad("gauge norms need a polytope")),
        },
    }
}

/// How `sequence_toward` approaches its target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    /// Vertices of a polytope ordered by decreasing distance to the target,
    /// ending with the nearest ones.
    VertexWalk,
    /// Disc centres `n/(n+1)·e₁` of a truncated Hilbert body.
    RadialCenters,
    /// Random points at radii halving from 1/2, pushed radially onto the
    /// boundary when the target is a boundary point.
    RandomBoundary { seed: u64 },
}

/// `count` members of the body approaching `x`.
pub fn sequence_toward(body: &Body, x: &Point, kind: SequenceKind, count: usize) -> Result<Vec<Point>> {
    body.check_point(x)?;
    if !body.contains(x, EPS_FEAS * (1.0 + norm2(x))) {
        return Err(LabError::NotInBody);
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    match kind {
        SequenceKind::VertexWalk => {
            let Body::Polytope(p) = body else {
                return Err(bad("vertex walks need a polytope"));
            };
            let mut vs: Vec<(f64, &Point)> = p
                .vertices()
                .expect("synchronized")
                .iter()
                .map(|v| (dist2(v, x), v))
                .filter(|(d, _)| *d > 1e-12)
                .collect();
            vs.sort_by(|a, b| a.0.total_cmp(&b.0));
            vs.truncate(count);
            Ok(vs.into_iter().rev().map(|(_, v)| v.clone()).collect())
        }
        SequenceKind::RadialCenters => {
            let Body::Hilbert(h) = body else {
                return Err(bad("radial centres need a truncated Hilbert body"));
            };
            Ok((1..h.n)
                .take(count)
                .map(|k| {
                    let mut y = Point::zeros(h.n).into_vec();
                    y[0] = k as f64 / (k as f64 + 1.0);
                    Point::from(y)
                })
                .collect())
        }
        SequenceKind::RandomBoundary { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let on_boundary = body.margin(x) <= 1e-9;
            let c = body.center();
            let n = x.dim();
            let mut out = Vec::with_capacity(count);
            let mut r = 0.5;
            while out.len() < count {
                let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let gn = norm2(&g);
                if gn == 0.0 {
                    continue;
                }
                let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + r * b / gn).collect();
                let d: Vec<f64> = y.iter().zip(&c).map(|(a, b)| a - b).collect();
                let y = if on_boundary {
                    let s = body.exit_distance(&c, &d, 0.0);
                    c.iter().zip(&d).map(|(a, b)| a + s * b).collect()
                } else if body.contains(&y, 0.0) {
                    y
                } else {
                    let s = body.exit_distance(&c, &d, 0.0).min(1.0);
                    c.iter().zip(&d).map(|(a, b)| a + s * b).collect()
                };
                out.push(Point::from(y));
                r *= 0.5;
            }
            Ok(out)
        }
    }
}

/// Hull of `dim + 1 ..= max_vertices` points drawn uniformly from the unit
/// Euclidean ball; retried until full-dimensional.
pub fn random_polytope<R: Rng>(rng: &mut R, dim: usize, max_vertices: usize) -> Result<Polytope> {
    let lo = dim + 1;
    let hi = max_vertices.max(lo);
    loop {
        let k = rng.gen_range(lo..=hi);
        let pts: Vec<Point> = (0..k)
            .map(|_| {
                let r = rng.gen::<f64>().powf(1.0 / dim as f64);
                random_direction(rng, dim).scale(r)
            })
            .collect();
        let p = Polytope::from_vertices(pts)?.synced()?.into_owned();
        if p.affine_rank() == Some(dim) {
            return Ok(p);
        }
    }
}

/// A random point of a polytope: Dirichlet weights on a random nonempty
/// subset of its vertices, so faces of every dimension are hit.
pub fn random_point_in<R: Rng>(rng: &mut R, p: &Polytope) -> Point {
    let vs = p.vertices().expect("synchronized");
    let k = rng.gen_range(1..=vs.len());
    let mut idx: Vec<usize> = (0..vs.len()).collect();
    for i in 0..k {
        let j = rng.gen_range(i..vs.len());
        idx.swap(i, j);
    }
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    let mut x = vec![0.0; p.dim()];
    for (wi, &i) in w.iter().zip(&idx[..k]) {
        for (xj, vj) in x.iter_mut().zip(vs[i].iter()) {
            *xj += wi / total * vj;
        }
    }
    Point::from(x)
}

/// A uniformly random unit vector.
pub fn random_direction<R: Rng>(rng: &mut R, dim: usize) -> Point {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm2(&g);
        if n > 1e-12 {
            return Point::from(g.into_iter().map(|v| v / n).collect::<Vec<_>>());
        }
    }
}
