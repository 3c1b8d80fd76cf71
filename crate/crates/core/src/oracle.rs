//! Sampling estimators: seeded point samplers for polytopes, intervals and
//! bodies, and lower-bound estimates of the metric functionals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::body::{Body, ConvexBody};
use crate::cone::{order_interval, ConeOverBase, LiftedPoint, OrderInterval};
use crate::error::{LabError, Result};
use crate::geometry::linalg::{affine_frame, null_space};
use crate::geometry::{dist2, norm2, solve_lp, Metric, NormSpec, Point, Polytope, EPS_FEAS};
use crate::metrics::Region;
use crate::rotundity::{self, search_directions, ChordSearch};

const WARMUP_DRAWS: usize = 1_000_000;
const BURN_IN: usize = 64;
const ORACLE_EXIT_STEPS: usize = 48;

/// How sample points are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMethod {
    /// Uniform draws in the bounding box, kept when inside.
    RejectionBox,
    /// Hit-and-run chain started at a relative-interior point.
    #[default]
    HitAndRun,
    /// Random rays from a relative-interior point, stopped short of the
    /// boundary by a random fraction concentrated near zero.
    BoundaryShrink,
}

/// Sample count, seed and method. `stream` selects an independent ChaCha
/// stream for the same seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub count: usize,
    pub seed: u64,
    #[serde(default)]
    pub method: SampleMethod,
    #[serde(default)]
    pub stream: u64,
}

impl SampleBudget {
    pub fn new(count: usize, seed: u64) -> Self {
        SampleBudget { count, seed, method: SampleMethod::default(), stream: 0 }
    }

    pub fn with_method(mut self, method: SampleMethod) -> Self {
        self.method = method;
        self
    }

    /// The same budget on a derived stream.
    pub fn with_stream(&self, k: u64) -> Self {
        let stream = self.stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k.wrapping_add(1));
        SampleBudget { stream, ..*self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(LabError::InvalidParameter("sample count must be at least 1".into()));
        }
        Ok(())
    }
}

/// What `estimate_metric` approximates.
#[derive(Clone, Copy, Debug)]
pub enum EstimateKind<'a> {
    OneSided(Region<'a>, Region<'a>, Metric<'a>),
    Thickness(&'a ConeOverBase, &'a LiftedPoint),
    MaxChord(&'a Body, &'a Point, &'a NormSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    LowerBound,
    TwoSided,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub bound: Bound,
    /// Points (or directions) evaluated.
    pub samples: usize,
}

/// Sampling view of a set.
enum Domain<'a> {
    Poly(&'a Polytope),
    Interval(&'a OrderInterval),
    Body(&'a Body),
}

impl Domain<'_> {
    fn from_region<'a>(r: &Region<'a>) -> Domain<'a> {
        match r {
            Region::Polytope(p) => Domain::Poly(p),
            Region::Interval(iv) => match iv.region() {
                Some(p) => Domain::Poly(p),
                None => Domain::Interval(iv),
            },
        }
    }

    fn dim(&self) -> usize {
        match self {
            Domain::Poly(p) => p.dim(),
            Domain::Interval(iv) => iv.lifted_dim(),
            Domain::Body(b) => b.dim(),
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        let tol = EPS_FEAS * (1.0 + norm2(x));
        match self {
            Domain::Poly(p) => p.contains_point(x, tol),
            Domain::Interval(iv) => iv.contains(x, tol),
            Domain::Body(b) => b.contains(x, tol),
        }
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Poly(p) => {
                let d = p.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for v in p.vertices().expect("synchronized") {
                    for i in 0..d {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            Domain::Interval(iv) => iv.bounding_box(),
            Domain::Body(b) => b.bounding_box(),
        }
    }

    fn center(&self) -> Vec<f64> {
        match self {
            Domain::Poly(p) => p.vertex_mean().expect("nonempty polytope").into_vec(),
            Domain::Interval(iv) => iv.source().to_vec().iter().map(|v| 0.5 * v).collect(),
            Domain::Body(b) => b.center(),
        }
    }

    /// Directions spanning the affine hull.
    fn span(&self) -> Vec<Vec<f64>> {
        match self {
            Domain::Poly(p) => {
                let vs: Vec<&[f64]> = p.vertices().expect("synchronized").iter().map(|v| v.as_slice()).collect();
                affine_frame(&vs, p.dim(), 1e-10).basis
            }
            _ => (0..self.dim()).map(|i| Point::basis(self.dim(), i).into_vec()).collect(),
        }
    }

    /// Largest `s ≥ 0` keeping `x + s·d` inside.
    fn exit(&self, x: &[f64], d: &[f64]) -> f64 {
        match self {
            Domain::Poly(p) => {
                let mut s = f64::INFINITY;
                for h in p.hrep().expect("synchronized") {
                    let ad = h.normal.dot(d);
                    if ad > 1e-12 * h.normal.norm2() * norm2(d) {
                        s = s.min(h.slack(x).max(0.0) / ad);
                    }
                }
                s
            }
            Domain::Interval(iv) => {
                let (lo, hi) = iv.bounding_box();
                let dn = norm2(d);
                if dn == 0.0 {
                    return 0.0;
                }
                let (mut a, mut b) = (0.0, dist2(&lo, &hi) / dn + 1e-12);
                for _ in 0..ORACLE_EXIT_STEPS {
                    let m = 0.5 * (a + b);
                    let y: Vec<f64> = x.iter().zip(d).map(|(p, q)| p + m * q).collect();
                    if iv.slack(&y) >= 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                a
            }
            Domain::Body(body) => body.exit_distance(x, d, 0.0),
        }
    }

    fn random_direction(&self, span: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut d = vec![0.0; self.dim()];
        for b in span {
            let g: f64 = rng.sample(StandardNormal);
            for (di, bi) in d.iter_mut().zip(b) {
                *di += g * bi;
            }
        }
        d
    }

    fn sample(&self, budget: &SampleBudget) -> Result<Vec<Vec<f64>>> {
        budget.validate()?;
        let mut rng = budget.rng();
        match budget.method {
            SampleMethod::RejectionBox => self.rejection(budget.count, &mut rng),
            SampleMethod::HitAndRun => Ok(self.hit_and_run(budget.count, &mut rng)),
            SampleMethod::BoundaryShrink => Ok(self.boundary_shrink(budget.count, &mut rng)),
        }
    }

    fn rejection(&self, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::with_capacity(count);
        let mut draws = 0usize;
        let cap = WARMUP_DRAWS.max(1000 * count).saturating_mul(10);
        while out.len() < count {
            let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| if b > a { rng.gen_range(*a..=*b) } else { *a }).collect();
            draws += 1;
            if self.contains(&x) {
                out.push(x);
            }
            let rate = out.len() as f64 / draws as f64;
            if (draws == WARMUP_DRAWS && rate < 1e-6) || draws >= cap {
                return Err(LabError::DegenerateRegion { acceptance: rate });
            }
        }
        Ok(out)
    }

    fn hit_and_run(&self, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let span = self.span();
        let mut x = self.center();
        let mut out = Vec::with_capacity(count);
        if span.is_empty() {
            out.resize(count, x);
            return out;
        }
        for step in 0..BURN_IN + count {
            let d = self.random_direction(&span, rng);
            let neg: Vec<f64> = d.iter().map(|v| -v).collect();
            let (fwd, back) = (self.exit(&x, &d), self.exit(&x, &neg));
            if fwd.is_finite() && back.is_finite() && fwd + back > 0.0 {
                let s = rng.gen_range(-back..=fwd);
                x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += s * di);
            }
            if step >= BURN_IN {
                out.push(x.clone());
            }
        }
        out
    }

    fn boundary_shrink(&self, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let span = self.span();
        let c = self.center();
        (0..count)
            .map(|_| {
                if span.is_empty() {
                    return c.clone();
                }
                let d = self.random_direction(&span, rng);
                let s = self.exit(&c, &d);
                let u: f64 = rng.gen();
                let f = if s.is_finite() { s * (1.0 - u.powi(4)) } else { 0.0 };
                c.iter().zip(&d).map(|(ci, di)| ci + f * di).collect()
            })
            .collect()
    }
}

/// Seeded samples from a region; every point is a member within `EPS_FEAS`.
pub fn sample_points(region: &Region, budget: &SampleBudget) -> Result<Vec<Point>> {
    Ok(Domain::from_region(region).sample(budget)?.into_iter().map(Point::from).collect())
}

/// Seeded samples from a base body.
pub fn sample_body(body: &Body, budget: &SampleBudget) -> Result<Vec<Point>> {
    Ok(Domain::Body(body).sample(budget)?.into_iter().map(Point::from).collect())
}

/// Points of a region worth evaluating: samples, their pushes to the
/// boundary, LP support points, chord-derived points of intervals and the
/// region's reference points.
fn candidates(region: &Region, budget: &SampleBudget) -> Result<Vec<Vec<f64>>> {
    let domain = Domain::from_region(region);
    let samples = domain.sample(budget)?;
    let mut out = region.reference_points()?;
    let center = domain.center();
    let pushes = match domain {
        Domain::Interval(_) => samples.len().min(256),
        _ => samples.len(),
    };
    for s in samples.iter().take(pushes) {
        let d: Vec<f64> = s.iter().zip(&center).map(|(a, b)| a - b).collect();
        let f = domain.exit(s, &d);
        if f.is_finite() && f > 0.0 {
            out.push(s.iter().zip(&d).map(|(a, b)| a + f * b).collect());
        }
    }
    out.extend(samples);

    if let Domain::Poly(p) = domain {
        let mut rng = budget.with_stream(7).rng();
        for _ in 0..budget.count.min(128) {
            let c: Vec<f64> = (0..p.dim()).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(sol) = solve_lp(&Point::from(c), p) {
                out.push(sol.argmax.into_vec());
            }
        }
    }

    if let Region::Interval(iv) = region {
        out.extend(chord_points(iv));
    }
    Ok(out)
}

/// `(ẑ ± (0, t·a))/2` for the longest chord `[x − a, x + a]` of the base at
/// `x = z/t`; both belong to the interval.
fn chord_points(iv: &OrderInterval) -> Vec<Vec<f64>> {
    let z = iv.source();
    if z.t <= 0.0 {
        return Vec::new();
    }
    let x: Vec<f64> = z.x.iter().map(|v| v / z.t).collect();
    let base = iv.cone().base();
    let Ok(w) = rotundity::best_chord(base, &x, &NormSpec::L2, &ChordSearch::default(), 0.0) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        let mut u = vec![0.5 * z.t];
        u.extend(z.x.iter().zip(w.half_chord.iter()).map(|(zx, a)| 0.5 * (zx + sign * z.t * a)));
        if iv.contains(&u, EPS_FEAS * (1.0 + norm2(&u))) {
            out.push(u);
        }
    }
    out
}

/// Lower bound on `d̃(A → B)`: the largest point distance to B over candidate
/// points of A, evaluated in decreasing order of a cheap upper bound.
pub fn estimate_one_sided(a: &Region, b: &Region, metric: Metric, budget: &SampleBudget) -> Result<Estimate> {
    crate::error::check_dim(a.dim(), b.dim())?;
    let pts = candidates(a, budget)?;
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        keyed.push((b.distance_upper_bound(p, metric)?, i));
    }
    keyed.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut best = 0.0_f64;
    for (ub, i) in keyed {
        if ub <= best {
            break;
        }
        best = best.max(b.distance_from(&pts[i], metric)?.0);
    }
    Ok(Estimate { value: best, bound: Bound::LowerBound, samples: pts.len() })
}

/// Lower bound on the interval thickness from sampled interval points.
pub fn estimate_thickness(cone: &ConeOverBase, z: &LiftedPoint, budget: &SampleBudget) -> Result<Estimate> {
    let iv = order_interval(cone, z)?;
    let metric = Metric::Lifted(cone.norm());
    let pts = candidates(&Region::Interval(&iv), budget)?;
    let mut best = 0.0_f64;
    for p in &pts {
        best = best.max(iv.segment_distance(p, metric)?);
    }
    Ok(Estimate { value: best, bound: Bound::LowerBound, samples: pts.len() })
}

/// Directions along which a chord through `x` can have positive length: the
/// span of the face of a polytope containing `x`, the whole space otherwise.
fn chord_span(body: &Body, x: &Point) -> Vec<Vec<f64>> {
    let n = x.dim();
    let Body::Polytope(p) = body else {
        return null_space(&[], n, 0.0);
    };
    let scale = 1.0 + norm2(x);
    let tight: Vec<&[f64]> = p
        .hrep()
        .expect("synchronized")
        .iter()
        .filter(|h| h.slack(x) <= 1e-9 * scale * norm2(&h.normal))
        .map(|h| h.normal.as_slice())
        .collect();
    null_space(&tight, n, 1e-10)
}

/// Lower bound on `l(x)` from deterministic directions in the span of the
/// face containing `x`, the best few refined by a pattern search.
pub fn estimate_max_chord(body: &Body, x: &Point, norm: &NormSpec, budget: &SampleBudget) -> Result<Estimate> {
    budget.validate()?;
    body.check_point(x)?;
    if !body.contains(x, EPS_FEAS * (1.0 + norm2(x))) {
        return Err(LabError::NotInBody);
    }
    let span = chord_span(body, x);
    let k = span.len();
    if k == 0 {
        return Ok(Estimate { value: 0.0, bound: Bound::LowerBound, samples: 0 });
    }
    // `c` holds coordinates in the span basis, which is orthonormal.
    let half = |c: &[f64]| -> f64 {
        let mut d = vec![0.0; x.dim()];
        for (ci, b) in c.iter().zip(&span) {
            d.iter_mut().zip(b).for_each(|(di, bi)| *di += ci * bi);
        }
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        let s = body.exit_distance(x, &d, 0.0).min(body.exit_distance(x, &neg, 0.0));
        if s.is_finite() {
            s * norm.eval_unchecked(&d)
        } else {
            0.0
        }
    };
    let dirs = search_directions(k, budget.count.min(4096).max(k));
    let mut scored: Vec<(f64, usize)> = dirs.iter().enumerate().map(|(i, d)| (half(d), i)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = scored.first().map_or(0.0, |s| s.0);
    for &(v, i) in scored.iter().take(4) {
        let mut d = dirs[i].clone();
        let mut cur = v;
        let mut h = 0.2;
        while h > 1e-7 {
            let mut improved = false;
            for j in 0..k {
                for sign in [1.0, -1.0] {
                    let mut t = d.clone();
                    t[j] += sign * h;
                    let tn = norm2(&t);
                    if tn == 0.0 {
                        continue;
                    }
                    t.iter_mut().for_each(|c| *c /= tn);
                    let val = half(&t);
                    if val > cur {
                        cur = val;
                        d = t;
                        improved = true;
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        best = best.max(cur);
    }
    Ok(Estimate { value: 2.0 * best, bound: Bound::LowerBound, samples: dirs.len() })
}

/// Dispatch to the estimator for `kind`.
pub fn estimate_metric(kind: EstimateKind, budget: &SampleBudget) -> Result<Estimate> {
    match kind {
        EstimateKind::OneSided(a, b, metric) => estimate_one_sided(&a, &b, metric, budget),
        EstimateKind::Thickness(cone, z) => estimate_thickness(cone, z, budget),
        EstimateKind::MaxChord(body, x, norm) => estimate_max_chord(body, x, norm, budget),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::TruncatedHilbert;
    use crate::cone::cone_over_base;

    fn unit_interval() -> Polytope {
        Polytope::from_vertices(vec![Point::from(vec![0.0]), Point::from(vec![1.0])]).unwrap().synced().unwrap().into_owned()
    }

    #[test]
    fn samples_are_reproducible_members() {
        let p = unit_interval();
        for method in [SampleMethod::RejectionBox, SampleMethod::HitAndRun, SampleMethod::BoundaryShrink] {
            let b = SampleBudget::new(5, 42).with_method(method);
            let s = sample_points(&Region::Polytope(&p), &b).unwrap();
            assert_eq!(s.len(), 5);
            assert!(s.iter().all(|x| (-1e-9..=1.0 + 1e-9).contains(&x[0])));
            assert_eq!(s, sample_points(&Region::Polytope(&p), &b).unwrap());
        }
        let other = sample_points(&Region::Polytope(&p), &SampleBudget::new(5, 43)).unwrap();
        assert_ne!(other, sample_points(&Region::Polytope(&p), &SampleBudget::new(5, 42)).unwrap());
    }

    #[test]
    fn interval_samples_satisfy_constraints() {
        let k = cone_over_base(Body::from_polytope(unit_interval()).unwrap(), NormSpec::L2).unwrap();
        let iv = order_interval(&k, &LiftedPoint::new(1.0, Point::from(vec![0.5])).unwrap()).unwrap();
        for method in [SampleMethod::RejectionBox, SampleMethod::HitAndRun] {
            let s = sample_points(&Region::Interval(&iv), &SampleBudget::new(500, 1).with_method(method)).unwrap();
            for u in s {
                let (t, x) = (u[0], u[1]);
                assert!(x >= -1e-9 && x <= t + 1e-9 && x <= 0.5 + 1e-9 && 1.0 - t >= 0.5 - x - 1e-9);
            }
        }
    }

    #[test]
    fn flat_region_defeats_rejection() {
        let seg = Polytope::from_vertices(vec![Point::from(vec![0.0, 0.0]), Point::from(vec![1.0, 0.7])]).unwrap();
        let seg = seg.synced().unwrap().into_owned();
        let b = SampleBudget::new(10, 3).with_method(SampleMethod::RejectionBox);
        assert!(matches!(sample_points(&Region::Polytope(&seg), &b), Err(LabError::DegenerateRegion { .. })));
        let s = sample_points(&Region::Polytope(&seg), &SampleBudget::new(10, 3)).unwrap();
        assert!(s.iter().all(|x| (x[1] - 0.7 * x[0]).abs() < 1e-9));
    }

    #[test]
    fn thickness_estimate_agrees() {
        let k = cone_over_base(Body::from_polytope(unit_interval()).unwrap(), NormSpec::L2).unwrap();
        let z = LiftedPoint::new(1.0, Point::from(vec![0.5])).unwrap();
        let e = estimate_metric(EstimateKind::Thickness(&k, &z), &SampleBudget::new(100_000, 9)).unwrap();
        assert_eq!(e.bound, Bound::LowerBound);
        assert!(e.value <= 0.25 + 1e-9 && e.value >= 0.23, "{}", e.value);
    }

    #[test]
    fn one_sided_self_is_zero() {
        let p = unit_interval();
        let m = Metric::Base(&NormSpec::L2);
        let r = Region::Polytope(&p);
        assert_eq!(estimate_one_sided(&r, &r, m, &SampleBudget::new(100, 0)).unwrap().value, 0.0);
    }

    #[test]
    fn hilbert_chord_estimate() {
        let h = Body::Hilbert(TruncatedHilbert::new(6).unwrap());
        let y4 = Point::from(vec![0.8, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let e = estimate_max_chord(&h, &y4, &NormSpec::L2, &SampleBudget::new(16, 0)).unwrap();
        assert!(e.value >= 1.99, "{}", e.value);
    }
}
