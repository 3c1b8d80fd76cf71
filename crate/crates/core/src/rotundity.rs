//! Extreme points, the extraneous-point equivalence, long-chord scans and the
//! MLUR modulus.

use serde::{Deserialize, Serialize};

use crate::body::{Body, ConvexBody};
use crate::cone::ConeOverBase;
use crate::error::{check_dim, LabError, Result};
use crate::geometry::{dist2, dot, norm2, NormSpec, Point, EPS_FEAS, EPS_GEOM};
use crate::metrics::polytope_half_chord;

/// A chord `[midpoint − half_chord, midpoint + half_chord]` of a body.
#[derive(Clone, Debug, PartialEq)]
pub struct ChordWitness {
    pub midpoint: Point,
    pub half_chord: Point,
    /// `norm(half_chord)`.
    pub half_length: f64,
}

impl ChordWitness {
    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }
}

/// Budget of the direction searches used on non-polytopal bodies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChordSearch {
    /// Chord directions tried at each midpoint (coordinate axes first).
    pub directions: usize,
    /// Radial shells per neighbourhood.
    pub shells: usize,
    /// Candidate midpoint directions per shell, besides the inward radius.
    pub probes: usize,
}

impl Default for ChordSearch {
    fn default() -> Self {
        ChordSearch { directions: 64, shells: 4, probes: 8 }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if out.iter().all(|p| !c.is_multiple_of(*p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Deterministic unit directions: the coordinate axes, then a Halton sequence
/// pushed onto the sphere by Box–Muller.
pub fn search_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count.max(dim));
    for i in 0..dim.min(count.max(dim)) {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        out.push(e);
    }
    let pairs = dim.div_ceil(2);
    let bases = primes(2 * pairs);
    let mut index = 1u64;
    while out.len() < count {
        let mut g = Vec::with_capacity(2 * pairs);
        for p in 0..pairs {
            let u1 = radical_inverse(index, bases[2 * p]);
            let u2 = radical_inverse(index, bases[2 * p + 1]);
            let r = (-2.0 * u1.ln()).sqrt();
            let th = 2.0 * std::f64::consts::PI * u2;
            g.push(r * th.cos());
            g.push(r * th.sin());
        }
        g.truncate(dim);
        index += 1;
        let n = norm2(&g);
        if n > 1e-12 {
            out.push(g.iter().map(|v| v / n).collect());
        }
    }
    out
}

fn at(x: &[f64], s: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + s * b).collect()
}

/// Half-length (in the step parameter) of the chord through `x` along `±d`.
fn symmetric_reach(body: &Body, x: &[f64], d: &[f64], tol: f64) -> f64 {
    body.exit_distance(x, d, tol).min(body.exit_distance(x, &d.iter().map(|v| -v).collect::<Vec<_>>(), tol))
}

fn witness(x: &[f64], a: Vec<f64>, norm: &NormSpec) -> ChordWitness {
    let half_length = norm.eval_unchecked(&a);
    ChordWitness { midpoint: Point::from(x.to_vec()), half_chord: Point::from(a), half_length }
}

fn check_member(body: &Body, x: &[f64], norm: &NormSpec) -> Result<()> {
    body.check_point(x)?;
    if let Some(d) = norm.fixed_dim() {
        check_dim(d, x.len())?;
    }
    if !body.contains(x, EPS_FEAS * (1.0 + norm2(x))) {
        return Err(LabError::NotInBody);
    }
    Ok(())
}

/// Longest chord with midpoint `x`, or the first one of half-length at least
/// `stop_at` in the search order.
fn chord_search(body: &Body, x: &[f64], norm: &NormSpec, search: &ChordSearch, tol: f64, stop_at: f64) -> ChordWitness {
    match body {
        Body::Polytope(p) => {
            let (_, a) = polytope_half_chord(p, x, norm).expect("synchronized polytope");
            witness(x, a, norm)
        }
        Body::Ball(b) if matches!(norm, NormSpec::L2) => {
            let w: Vec<f64> = x.iter().zip(b.center.iter()).map(|(p, c)| p - c).collect();
            let s = (b.radius * b.radius - dot(&w, &w)).max(0.0).sqrt();
            let mut d = perpendicular(&w);
            d.iter_mut().for_each(|v| *v *= s);
            witness(x, d, norm)
        }
        _ => {
            let mut best = witness(x, vec![0.0; x.len()], norm);
            for d in search_directions(x.len(), search.directions.max(x.len())) {
                let s = symmetric_reach(body, x, &d, tol);
                if !s.is_finite() {
                    continue;
                }
                let a: Vec<f64> = d.iter().map(|v| v * s).collect();
                let len = norm.eval_unchecked(&a);
                if len > best.half_length + 1e-9 {
                    best = witness(x, a, norm);
                    if len >= stop_at {
                        break;
                    }
                }
            }
            best
        }
    }
}

/// A unit vector orthogonal to `w` (any unit vector when `w = 0`).
fn perpendicular(w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let wn = norm2(w);
    let mut e = vec![0.0; n];
    if n == 1 {
        return e;
    }
    if wn == 0.0 {
        e[0] = 1.0;
        return e;
    }
    let axis = (0..n).min_by(|&i, &j| w[i].abs().total_cmp(&w[j].abs())).unwrap_or(0);
    e[axis] = 1.0;
    let c = w[axis] / (wn * wn);
    for i in 0..n {
        e[i] -= c * w[i];
    }
    let en = norm2(&e);
    e.iter().map(|v| v / en).collect()
}

/// The longest chord found with midpoint `x`: exact for polytopes and for
/// Euclidean balls in L2, a direction-search lower bound otherwise.
pub fn best_chord(body: &Body, x: &[f64], norm: &NormSpec, search: &ChordSearch, tol: f64) -> Result<ChordWitness> {
    check_member(body, x, norm)?;
    Ok(chord_search(body, x, norm, search, tol, f64::INFINITY))
}

/// Extremality: vertex match for polytopes, sphere membership for balls,
/// zero chord length for other bodies.
pub fn is_extreme(body: &Body, x: &Point) -> Result<bool> {
    check_member(body, x, &NormSpec::L2)?;
    match body {
        Body::Polytope(p) => {
            let vs = p.vertices().expect("synchronized polytope");
            Ok(vs.iter().any(|v| dist2(v, x) <= 1e-8))
        }
        Body::Ball(b) => Ok((dist2(x, &b.center) - b.radius).abs() <= EPS_GEOM),
        Body::Hilbert(_) => {
            let w = chord_search(body, x, &NormSpec::L2, &ChordSearch::default(), 0.0, f64::INFINITY);
            Ok(2.0 * w.half_length <= EPS_GEOM)
        }
    }
}

/// Both sides of the extraneous-point equivalence, with their margins.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtraneousCheck {
    /// `[x − a, x + a] ⊂ B`.
    pub segment_in_b: bool,
    /// `(x̂ + a)/2 ∈ ⟦0, x̂⟧`.
    pub midpoint_in_interval: bool,
    pub segment_margin: f64,
    pub interval_margin: f64,
}

impl ExtraneousCheck {
    /// Both memberships are decided outside the guard band.
    pub fn decisive(&self, guard: f64) -> bool {
        self.segment_margin.abs() > guard && self.interval_margin.abs() > guard
    }
}

/// Evaluate `[x−a, x+a] ⊂ B` and `(x̂+a)/2 ∈ ⟦0, x̂⟧` independently, the
/// first through base membership of both endpoints, the second through cone
/// membership of `u` and `x̂ − u`.
pub fn extraneous_point_check(cone: &ConeOverBase, x: &Point, a: &Point) -> Result<ExtraneousCheck> {
    let base = cone.base();
    base.check_point(x)?;
    base.check_point(a)?;
    if !base.contains(x, EPS_FEAS * (1.0 + norm2(x))) {
        return Err(LabError::NotInBody);
    }
    let plus: Vec<f64> = x.iter().zip(a.iter()).map(|(p, q)| p + q).collect();
    let minus: Vec<f64> = x.iter().zip(a.iter()).map(|(p, q)| p - q).collect();
    let segment_margin = base.margin(&plus).min(base.margin(&minus));

    let mut u = vec![0.5];
    u.extend(plus.iter().map(|v| 0.5 * v));
    let mut rest = vec![0.5];
    rest.extend(x.iter().zip(&u[1..]).map(|(p, q)| p - q));
    let interval_margin = cone.slack(&u).min(cone.slack(&rest));

    Ok(ExtraneousCheck {
        segment_in_b: segment_margin >= -EPS_FEAS,
        midpoint_in_interval: interval_margin >= -EPS_FEAS,
        segment_margin,
        interval_margin,
    })
}

/// Candidate midpoints within `radius` of `x`: shells from the outside in,
/// the direction toward the body's centre first on each shell.
fn candidate_midpoints(body: &Body, x: &[f64], radius: f64, norm: &NormSpec, search: &ChordSearch) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut dirs = Vec::new();
    let inward: Vec<f64> = body.center().iter().zip(x).map(|(c, p)| c - p).collect();
    let inn = norm.eval_unchecked(&inward);
    if inn > 1e-12 {
        dirs.push(inward.iter().map(|v| v / inn).collect::<Vec<_>>());
    }
    for d in search_directions(n, search.probes) {
        for sign in [1.0, -1.0] {
            let v: Vec<f64> = d.iter().map(|c| sign * c).collect();
            let vn = norm.eval_unchecked(&v);
            if vn > 1e-12 {
                dirs.push(v.iter().map(|c| c / vn).collect());
            }
        }
    }
    let shells = search.shells.max(1);
    let mut out = Vec::new();
    for j in (1..=shells).rev() {
        let rho = radius * j as f64 / shells as f64;
        for d in &dirs {
            let y = at(x, rho, d);
            if body.contains(&y, EPS_FEAS) {
                out.push(y);
            }
        }
    }
    out
}

/// For each radius, the first candidate midpoint within that distance of `x`
/// carrying a chord of length at least `l_min`.
pub fn long_chord_scan(
    body: &Body,
    x: &Point,
    l_min: f64,
    radii: &[f64],
    norm: &NormSpec,
    search: &ChordSearch,
) -> Result<Vec<Option<ChordWitness>>> {
    if l_min.is_nan() || l_min <= 0.0 || radii.iter().any(|r| r.is_nan() || *r <= 0.0 || r.is_infinite()) {
        return Err(LabError::InvalidParameter("chord scan needs l_min > 0 and positive radii".into()));
    }
    if !is_extreme(body, x)? {
        return Err(LabError::NotExtreme);
    }
    let half = 0.5 * l_min;
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut hit = None;
        for y in candidate_midpoints(body, x, r, norm, search) {
            let w = chord_search(body, &y, norm, search, EPS_FEAS, half);
            if w.half_length >= half {
                hit = Some(w);
                break;
            }
        }
        out.push(hit);
    }
    Ok(out)
}

fn check_sphere(body: &Body, x: &Point, norm: &NormSpec) -> Result<()> {
    check_member(body, x, norm).or_else(|e| match e {
        LabError::NotInBody => Ok(()),
        e => Err(e),
    })?;
    let g = body.gauge(x).ok_or_else(|| LabError::Unsupported("modulus needs the origin inside the body".into()))?;
    if (g - 1.0).abs() > EPS_GEOM {
        return Err(LabError::NotOnSphere { gauge: g });
    }
    Ok(())
}

/// Lower estimate of `sup{norm(v) : norm(x′ − x) ≤ δ, x′ ± v ∈ B}` for `x` on
/// the unit sphere of the body's gauge.
pub fn mlur_modulus(body: &Body, x: &Point, delta: f64, norm: &NormSpec, search: &ChordSearch) -> Result<f64> {
    check_sphere(body, x, norm)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(LabError::InvalidParameter(format!("modulus radius {delta}")));
    }
    let mut best = chord_search(body, x, norm, search, EPS_FEAS, f64::INFINITY).half_length;
    if delta == 0.0 {
        return Ok(best);
    }
    for y in candidate_midpoints(body, x, delta, norm, search) {
        best = best.max(chord_search(body, &y, norm, search, EPS_FEAS, f64::INFINITY).half_length);
    }
    Ok(best)
}

/// Modulus over a ladder of radii, made monotone by a running maximum in
/// increasing radius. Values are returned in the input order.
pub fn mlur_ladder(body: &Body, x: &Point, deltas: &[f64], norm: &NormSpec, search: &ChordSearch) -> Result<Vec<f64>> {
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&i, &j| deltas[i].total_cmp(&deltas[j]));
    let mut out = vec![0.0; deltas.len()];
    let mut running = 0.0_f64;
    for i in order {
        running = running.max(mlur_modulus(body, x, deltas[i], norm, search)?);
        out[i] = running;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{L2Ball, TruncatedHilbert};
    use crate::cone::cone_over_base;
    use crate::geometry::Polytope;

    fn unit_interval() -> Body {
        Body::from_polytope(Polytope::from_vertices(vec![Point::from(vec![0.0]), Point::from(vec![1.0])]).unwrap()).unwrap()
    }

    fn e(n: usize, i: usize) -> Point {
        Point::basis(n, i)
    }

    #[test]
    fn directions_start_with_axes_and_are_unit() {
        let ds = search_directions(3, 20);
        assert_eq!(ds.len(), 20);
        assert_eq!(ds[1], vec![0.0, 1.0, 0.0]);
        for d in &ds {
            assert!((norm2(d) - 1.0).abs() < 1e-12);
        }
        assert_eq!(ds, search_directions(3, 20));
    }

    #[test]
    fn extreme_points_of_the_interval() {
        let b = unit_interval();
        assert!(is_extreme(&b, &Point::from(vec![0.0])).unwrap());
        assert!(!is_extreme(&b, &Point::from(vec![0.5])).unwrap());
        assert_eq!(is_extreme(&b, &Point::from(vec![2.0])).unwrap_err(), LabError::NotInBody);
    }

    #[test]
    fn hilbert_extremality() {
        let h = Body::Hilbert(TruncatedHilbert::new(6).unwrap());
        assert!(is_extreme(&h, &e(6, 0)).unwrap());
        assert!(!is_extreme(&h, &Point::from(vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap());
    }

    #[test]
    fn extraneous_examples() {
        let k = cone_over_base(unit_interval(), NormSpec::L2).unwrap();
        let x = Point::from(vec![0.5]);
        let c = extraneous_point_check(&k, &x, &Point::from(vec![0.5])).unwrap();
        assert!(c.segment_in_b && c.midpoint_in_interval);
        let c = extraneous_point_check(&k, &x, &Point::from(vec![0.6])).unwrap();
        assert!(!c.segment_in_b && !c.midpoint_in_interval);
        let c = extraneous_point_check(&k, &Point::from(vec![0.2]), &Point::from(vec![0.0])).unwrap();
        assert!(c.segment_in_b && c.midpoint_in_interval);
    }

    #[test]
    fn ball_modulus_matches_circle() {
        let b = Body::Ball(L2Ball::unit(2));
        let x = e(2, 0);
        for d in [0.1, 0.02] {
            let m = mlur_modulus(&b, &x, d, &NormSpec::L2, &ChordSearch::default()).unwrap();
            assert!((m - (2.0 * d - d * d).sqrt()).abs() < 1e-3, "{d}: {m}");
        }
        assert!(mlur_modulus(&b, &x, 0.0, &NormSpec::L2, &ChordSearch::default()).unwrap() < 1e-12);
        let bad = mlur_modulus(&b, &Point::from(vec![0.5, 0.0]), 0.1, &NormSpec::L2, &ChordSearch::default());
        assert!(matches!(bad, Err(LabError::NotOnSphere { .. })));
    }

    #[test]
    fn hilbert_modulus_and_scan() {
        let h = Body::Hilbert(TruncatedHilbert::new(6).unwrap());
        let x = e(6, 0);
        let s = ChordSearch { directions: 12, shells: 1, probes: 0 };
        assert!(mlur_modulus(&h, &x, 0.25, &NormSpec::L2, &s).unwrap() >= 1.0);
        let radii = [0.5, 1.0 / 3.0, 0.25, 0.2];
        let hits = long_chord_scan(&h, &x, 1.9, &radii, &NormSpec::L2, &ChordSearch::default()).unwrap();
        for (i, w) in hits.iter().enumerate() {
            let n = i + 1;
            let w = w.as_ref().expect("witness");
            assert!((w.midpoint[0] - n as f64 / (n as f64 + 1.0)).abs() < 1e-12);
            assert!(w.half_chord[n].abs() >= 0.999);
            assert!(w.half_length >= 0.999);
        }
    }

    #[test]
    fn ball_scan_is_empty_and_interior_is_rejected() {
        let b = Body::Ball(L2Ball::unit(3));
        let radii = [0.03, 0.01, 1e-3];
        let hits = long_chord_scan(&b, &e(3, 0), 0.5, &radii, &NormSpec::L2, &ChordSearch::default()).unwrap();
        assert!(hits.iter().all(Option::is_none));
        let err = long_chord_scan(&b, &Point::zeros(3), 0.5, &radii, &NormSpec::L2, &ChordSearch::default());
        assert_eq!(err.unwrap_err(), LabError::NotExtreme);
    }
}
