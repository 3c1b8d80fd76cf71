//! The lifted space E = ℝ × X, cones over convex bases and order intervals.
//!
//! Coordinates of a lifted vector are stored as `[t, x₀, x₁, …]`.

use std::sync::Arc;

use crate::body::{Body, ConvexBody, L2Ball};
use crate::error::{check_dim, LabError, Result};
use crate::geometry::{
    convert_rep, dist2, distance_to_polytope, dot, golden_min, inradius_at_origin, norm2, project_l2, ConvertTarget,
    Halfspace, Metric, NormSpec, Point, Polytope, EPS_FEAS,
};

/// A vector `(t × x)` of E.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedPoint {
    pub t: f64,
    pub x: Point,
}

impl LiftedPoint {
    pub fn new(t: f64, x: Point) -> Result<Self> {
        if !t.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite);
        }
        Ok(LiftedPoint { t, x })
    }

    /// `x̂ = (1 × x)`.
    pub fn hat(x: &Point) -> Self {
        LiftedPoint { t: 1.0, x: x.clone() }
    }

    pub fn zero(dim: usize) -> Self {
        LiftedPoint { t: 0.0, x: Point::zeros(dim) }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        LiftedPoint { t: v[0], x: Point::from(v[1..].to_vec()) }
    }

    /// Dimension of the shadow.
    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.x.dim() + 1);
        v.push(self.t);
        v.extend_from_slice(&self.x);
        v
    }

    pub fn scale(&self, s: f64) -> Self {
        LiftedPoint { t: self.t * s, x: self.x.scale(s) }
    }

    pub fn add(&self, o: &LiftedPoint) -> Self {
        LiftedPoint { t: self.t + o.t, x: self.x.add(&o.x) }
    }

    pub fn sub(&self, o: &LiftedPoint) -> Self {
        LiftedPoint { t: self.t - o.t, x: self.x.sub(&o.x) }
    }

    /// `|t| + ‖x‖`.
    pub fn norm_e(&self, norm: &NormSpec) -> Result<f64> {
        crate::geometry::norm_e(self.t, &self.x, norm)
    }
}

/// The cone `K = {t·(1 × b) : b ∈ B, t ≥ 0}` over a base body.
#[derive(Clone, Debug)]
pub struct ConeOverBase {
    base: Arc<Body>,
    norm: NormSpec,
    rows: Option<Vec<Halfspace>>,
}

impl ConeOverBase {
    pub fn base(&self) -> &Body {
        &self.base
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    /// Dimension of X.
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Rows of K in `(t, x)` coordinates (`a·x − b·t ≤ 0` and `−t ≤ 0`) for
    /// polytopal bases.
    pub fn hrep(&self) -> Option<&[Halfspace]> {
        self.rows.as_deref()
    }

    pub fn is_polyhedral(&self) -> bool {
        self.rows.is_some()
    }

    /// Homogeneous membership slack: nonnegative iff the point lies in K.
    pub fn slack(&self, p: &[f64]) -> f64 {
        self.base.cone_slack(p[0], &p[1..])
    }

    pub fn contains(&self, p: &LiftedPoint, tol: f64) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        Ok(self.slack(&p.to_vec()) >= -tol)
    }

    fn scale_tol(p: &[f64]) -> f64 {
        EPS_FEAS * (1.0 + norm2(p))
    }
}

/// Build the cone over `base` carrying `norm` on X.
pub fn cone_over_base(base: Body, norm: NormSpec) -> Result<ConeOverBase> {
    if let Some(d) = norm.fixed_dim() {
        check_dim(d, base.dim())?;
    }
    let base = match base {
        Body::Polytope(p) => Body::from_polytope(p)?,
        other => other,
    };
    let rows = base.as_polytope().map(|p| {
        let n = p.dim();
        let mut rows: Vec<Halfspace> = p
            .hrep()
            .expect("synchronized polytope")
            .iter()
            .map(|h| {
                let mut v = Vec::with_capacity(n + 1);
                v.push(-h.offset);
                v.extend_from_slice(&h.normal);
                Halfspace::new(Point::from(v), 0.0)
            })
            .collect();
        rows.push(Halfspace::new(Point::basis(n + 1, 0).scale(-1.0), 0.0));
        rows
    });
    Ok(ConeOverBase { base: Arc::new(base), norm, rows })
}

/// How an interval is represented.
#[derive(Clone, Debug)]
pub enum IntervalRegion {
    /// Exact polytope in ℝ^{n+1} with both representations.
    Exact(Polytope),
    /// Membership test `u ∈ K` and `z − u ∈ K` only.
    Oracle,
}

/// The order interval `⟦0, z⟧ = K ∩ (z − K)`.
#[derive(Clone, Debug)]
pub struct OrderInterval {
    source: LiftedPoint,
    cone: ConeOverBase,
    region: IntervalRegion,
}

impl OrderInterval {
    pub fn source(&self) -> &LiftedPoint {
        &self.source
    }

    pub fn cone(&self) -> &ConeOverBase {
        &self.cone
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.region, IntervalRegion::Exact(_))
    }

    pub fn region(&self) -> Option<&Polytope> {
        match &self.region {
            IntervalRegion::Exact(p) => Some(p),
            IntervalRegion::Oracle => None,
        }
    }

    pub fn vertices(&self) -> Option<&[Point]> {
        self.region().and_then(|p| p.vertices())
    }

    /// Dimension of the lifted space.
    pub fn lifted_dim(&self) -> usize {
        self.source.dim() + 1
    }

    /// `min(slack(u), slack(z − u))` in K.
    pub fn slack(&self, u: &[f64]) -> f64 {
        let z = self.source.to_vec();
        let rest: Vec<f64> = z.iter().zip(u).map(|(a, b)| a - b).collect();
        self.cone.slack(u).min(self.cone.slack(&rest))
    }

    pub fn contains(&self, u: &[f64], tol: f64) -> bool {
        match &self.region {
            IntervalRegion::Exact(p) => p.contains_point(u, tol),
            IntervalRegion::Oracle => self.slack(u) >= -tol,
        }
    }

    /// Points known to belong to the interval.
    pub fn reference_points(&self) -> Vec<Vec<f64>> {
        match &self.region {
            IntervalRegion::Exact(p) => p.vertices().expect("synchronized").iter().map(|v| v.to_vec()).collect(),
            IntervalRegion::Oracle => {
                let z = self.source.to_vec();
                vec![vec![0.0; z.len()], z.iter().map(|v| 0.5 * v).collect(), z]
            }
        }
    }

    /// Bounding box in lifted coordinates.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.region {
            IntervalRegion::Exact(p) => {
                let vs = p.vertices().expect("synchronized");
                let d = p.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for v in vs {
                    for i in 0..d {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            IntervalRegion::Oracle => {
                let zt = self.source.t;
                let (blo, bhi) = self.cone.base.bounding_box();
                let mut lo = vec![0.0];
                let mut hi = vec![zt];
                for (l, h) in blo.iter().zip(&bhi) {
                    lo.push((zt * l).min(0.0));
                    hi.push((zt * h).max(0.0));
                }
                (lo, hi)
            }
        }
    }

    /// Lower bound on the distance from `p` to the interval and whether it is
    /// exact. Exact for polytopal intervals and for Euclidean-ball bases under
    /// the lifted Euclidean metric; a cutting-plane bound otherwise.
    pub fn distance_from(&self, p: &[f64], metric: Metric) -> Result<(f64, bool)> {
        check_dim(self.lifted_dim(), p.len())?;
        match (&self.region, self.cone.base.as_ref(), metric) {
            (IntervalRegion::Exact(poly), _, _) => Ok((distance_to_polytope(p, poly, metric)?.0, true)),
            (IntervalRegion::Oracle, Body::Ball(ball), Metric::Lifted(NormSpec::L2)) => {
                Ok((ball_interval_distance(ball, &self.source, p)?, true))
            }
            (IntervalRegion::Oracle, _, _) => self.cutting_plane_distance(p, metric),
        }
    }

    /// Distance from `p` to the algebraic segment `[0, z]`, an upper bound on
    /// the distance to the interval.
    pub fn segment_distance(&self, p: &[f64], metric: Metric) -> Result<f64> {
        let z = self.source.to_vec();
        let (_, d) = golden_min(
            |s| {
                let v: Vec<f64> = p.iter().zip(&z).map(|(a, b)| a - s * b).collect();
                Ok(metric.eval(&v))
            },
            0.0,
            1.0,
            1e-13,
        )?;
        Ok(d)
    }

    fn support_rows(&self, c: &[f64], rows: &mut Vec<Halfspace>) {
        let (h, _) = self.cone.base.support(c);
        let z = self.source.to_vec();
        let mut inner = Vec::with_capacity(c.len() + 1);
        inner.push(-h);
        inner.extend_from_slice(c);
        let mut outer: Vec<f64> = inner.iter().map(|v| -v).collect();
        let rhs = h * z[0] - dot(c, &z[1..]);
        rows.push(Halfspace::new(Point::from(inner), 0.0));
        rows.push(Halfspace::new(Point::from(std::mem::take(&mut outer)), rhs.max(0.0)));
    }

    fn cutting_plane_distance(&self, p: &[f64], metric: Metric) -> Result<(f64, bool)> {
        const MAX_ROUNDS: usize = 80;
        let n = self.source.dim();
        let z = self.source.to_vec();
        let mut rows = vec![
            Halfspace::new(Point::basis(n + 1, 0).scale(-1.0), 0.0),
            Halfspace::new(Point::basis(n + 1, 0), z[0]),
        ];
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut c = vec![0.0; n];
                c[i] = s;
                self.support_rows(&c, &mut rows);
            }
        }
        if norm2(&z[1..]) > 0.0 {
            let c: Vec<f64> = z[1..].iter().map(|v| v / norm2(&z[1..])).collect();
            self.support_rows(&c, &mut rows);
            self.support_rows(&c.iter().map(|v| -v).collect::<Vec<_>>(), &mut rows);
        }
        let mid: Vec<f64> = z.iter().map(|v| 0.5 * v).collect();
        let mut upper = self.segment_distance(p, metric)?;
        let mut lower = 0.0;
        for _ in 0..MAX_ROUNDS {
            let outer = Polytope::from_hrep(n + 1, rows.clone())?;
            let (d, q) = distance_to_polytope(p, &outer, metric)?;
            lower = f64::max(lower, d);
            let tol = 1e-9 * (1.0 + norm2(&q));
            if self.slack(&q) >= -tol {
                return Ok((lower, true));
            }
            // feasible point on the way from the middle of the interval to q
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..50 {
                let m = 0.5 * (lo + hi);
                let f: Vec<f64> = mid.iter().zip(&q).map(|(a, b)| a + m * (b - a)).collect();
                if self.slack(&f) >= 0.0 {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            let f: Vec<f64> = mid.iter().zip(&q).map(|(a, b)| a + lo * (b - a)).collect();
            let v: Vec<f64> = p.iter().zip(&f).map(|(a, b)| a - b).collect();
            upper = upper.min(metric.eval(&v));
            if upper - lower <= 1e-7 * (1.0 + lower) {
                break;
            }
            let rest: Vec<f64> = z.iter().zip(&q).map(|(a, b)| a - b).collect();
            let mut added = false;
            for w in [&q, &rest] {
                if self.cone.slack(w) < -tol {
                    let x: Vec<f64> = w[1..].iter().map(|v| v / w[0].max(1e-12)).collect();
                    if let Some(c) = self.cone.base.separate(&x) {
                        self.support_rows(&c, &mut rows);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        Ok((lower, false))
    }
}

/// Nearest point of `Ball(c1, r1) ∩ Ball(c2, r2)` to `p` (intersection assumed nonempty).
fn project_two_balls(p: &[f64], c1: &[f64], r1: f64, c2: &[f64], r2: f64) -> Vec<f64> {
    let onto = |c: &[f64], r: f64| -> Vec<f64> {
        let d = dist2(p, c);
        if d <= r {
            p.to_vec()
        } else {
            c.iter().zip(p).map(|(ci, pi)| ci + r * (pi - ci) / d).collect()
        }
    };
    let q1 = onto(c1, r1);
    if dist2(&q1, c2) <= r2 * (1.0 + 1e-12) + 1e-15 {
        return q1;
    }
    let q2 = onto(c2, r2);
    if dist2(&q2, c1) <= r1 * (1.0 + 1e-12) + 1e-15 {
        return q2;
    }
    // both spheres active: nearest point on their intersection
    let axis: Vec<f64> = c2.iter().zip(c1).map(|(a, b)| a - b).collect();
    let d = norm2(&axis);
    if d == 0.0 {
        return if r1 <= r2 { q1 } else { q2 };
    }
    let u: Vec<f64> = axis.iter().map(|v| v / d).collect();
    let along = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d)).clamp(-r1, r1);
    let rho = (r1 * r1 - along * along).max(0.0).sqrt();
    let m: Vec<f64> = c1.iter().zip(&u).map(|(c, ui)| c + along * ui).collect();
    let pm: Vec<f64> = p.iter().zip(&m).map(|(a, b)| a - b).collect();
    let proj = dot(&pm, &u);
    let mut w: Vec<f64> = pm.iter().zip(&u).map(|(a, ui)| a - proj * ui).collect();
    let wn = norm2(&w);
    if wn <= 1e-300 {
        // p on the axis: any orthogonal direction is nearest
        let k = (0..u.len()).min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap_or(0);
        w = u.iter().map(|ui| -ui * u[k]).collect();
        w[k] += 1.0;
        let n = norm2(&w);
        if n == 0.0 {
            return m;
        }
        w.iter_mut().for_each(|v| *v /= n);
    } else {
        w.iter_mut().for_each(|v| *v /= wn);
    }
    m.iter().zip(&w).map(|(a, b)| a + rho * b).collect()
}

/// Lifted Euclidean distance from `p` to `⟦0, z⟧` over a Euclidean ball: a
/// convex search over the height, each slice being an intersection of two balls.
fn ball_interval_distance(ball: &L2Ball, z: &LiftedPoint, p: &[f64]) -> Result<f64> {
    let zt = z.t;
    let px = &p[1..];
    let slice = |s: f64| -> Result<f64> {
        let c1: Vec<f64> = ball.center.iter().map(|c| s * c).collect();
        let c2: Vec<f64> = z.x.iter().zip(ball.center.iter()).map(|(zx, c)| zx - (zt - s) * c).collect();
        let q = project_two_balls(px, &c1, s * ball.radius, &c2, (zt - s) * ball.radius);
        Ok((p[0] - s).abs() + dist2(px, &q))
    };
    let (_, d) = golden_min(slice, 0.0, zt, 1e-12 * (1.0 + zt))?;
    Ok(d)
}

/// Build `⟦0, z⟧`.
///
/// For polytopal bases the interval lives in the cone over the minimal face
/// of the base containing `z/t`, so only that face's rows enter the vertex
/// enumeration.
pub fn order_interval(cone: &ConeOverBase, z: &LiftedPoint) -> Result<OrderInterval> {
    check_dim(cone.dim(), z.dim())?;
    let zv = z.to_vec();
    if zv.iter().any(|v| !v.is_finite()) {
        return Err(LabError::NonFinite);
    }
    if cone.slack(&zv) < -ConeOverBase::scale_tol(&zv) {
        return Err(LabError::NotInCone);
    }
    let n = cone.dim();
    if z.t <= ConeOverBase::scale_tol(&zv) {
        let origin = Polytope::singleton(&Point::zeros(n + 1));
        return Ok(OrderInterval { source: LiftedPoint::zero(n), cone: cone.clone(), region: IntervalRegion::Exact(origin) });
    }
    let Some(base) = cone.base.as_polytope() else {
        // every sphere point of a ball is extreme, so its interval is the segment
        if let Body::Ball(ball) = cone.base.as_ref() {
            let w: Vec<f64> = z.x.iter().map(|v| v / z.t).collect();
            if (dist2(&w, &ball.center) - ball.radius).abs() <= 1e-12 * (1.0 + ball.radius) {
                let region = algebraic_segment(&LiftedPoint::zero(n), z)?;
                return Ok(OrderInterval { source: z.clone(), cone: cone.clone(), region: IntervalRegion::Exact(region) });
            }
        }
        return Ok(OrderInterval { source: z.clone(), cone: cone.clone(), region: IntervalRegion::Oracle });
    };

    let w: Vec<f64> = z.x.iter().map(|v| v / z.t).collect();
    let base_rows: Vec<Halfspace> = base.hrep().expect("synchronized").iter().map(|h| h.normalized()).collect();
    let tight_tol = 1e-9 * (1.0 + norm2(&w));
    let tight: Vec<&Halfspace> = base_rows.iter().filter(|h| h.slack(&w) <= tight_tol).collect();
    let face_rows: Vec<Halfspace> = if tight.is_empty() {
        base_rows.clone()
    } else {
        let face_vertices: Vec<Point> = base
            .vertices()
            .expect("synchronized")
            .iter()
            .filter(|v| tight.iter().all(|h| h.slack(v).abs() <= 1e-8 * (1.0 + v.norm2())))
            .cloned()
            .collect();
        if face_vertices.is_empty() {
            base_rows.clone()
        } else {
            let face = convert_rep(&Polytope::from_vertices(face_vertices)?, ConvertTarget::ToHalfspaces)?;
            face.hrep().expect("synchronized").to_vec()
        }
    };
    let start = base.vertices().expect("synchronized")[0].to_vec();
    let start = if face_rows.iter().all(|h| h.slack(&start) >= -1e-9) {
        start
    } else {
        base.vertices()
            .expect("synchronized")
            .iter()
            .find(|v| face_rows.iter().all(|h| h.slack(v) >= -1e-9))
            .map(|v| v.to_vec())
            .unwrap_or(w.clone())
    };
    let snapped = if face_rows.iter().all(|h| h.slack(&w) >= 0.0) { w } else { project_l2(&w, &face_rows, &start)? };
    let xs: Vec<f64> = snapped.iter().map(|v| v * z.t).collect();

    let mut rows = Vec::with_capacity(2 * face_rows.len() + 2);
    for h in &face_rows {
        let mut inner = Vec::with_capacity(n + 1);
        inner.push(-h.offset);
        inner.extend_from_slice(&h.normal);
        let outer: Vec<f64> = inner.iter().map(|v| -v).collect();
        let rhs = (h.offset * z.t - h.normal.dot(&xs)).max(0.0);
        rows.push(Halfspace::new(Point::from(inner), 0.0));
        rows.push(Halfspace::new(Point::from(outer), rhs));
    }
    rows.push(Halfspace::new(Point::basis(n + 1, 0).scale(-1.0), 0.0));
    rows.push(Halfspace::new(Point::basis(n + 1, 0), z.t));
    let region = convert_rep(&Polytope::from_hrep(n + 1, rows)?, ConvertTarget::ToVertices)?;
    let source = LiftedPoint { t: z.t, x: Point::from(xs) };
    Ok(OrderInterval { source, cone: cone.clone(), region: IntervalRegion::Exact(region) })
}

/// `⟦a, b⟧ = a + ⟦0, b − a⟧` as an exact polytope (polytopal bases only).
pub fn interval_between(cone: &ConeOverBase, a: &LiftedPoint, b: &LiftedPoint) -> Result<Polytope> {
    let iv = order_interval(cone, &b.sub(a))?;
    match iv.region() {
        Some(p) => Ok(p.translated(&a.to_vec())),
        None => Err(LabError::Unsupported("translated interval over a non-polytopal base".into())),
    }
}

/// The ordinary segment `{a + s(b − a) : s ∈ [0, 1]}`.
pub fn algebraic_segment(a: &LiftedPoint, b: &LiftedPoint) -> Result<Polytope> {
    check_dim(a.dim(), b.dim())?;
    let p = Polytope::from_vertices(vec![Point::from(a.to_vec()), Point::from(b.to_vec())])?;
    Ok(p.synced()?.into_owned())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Height-preserving linear maps of E.
#[derive(Clone, Debug, PartialEq)]
pub enum LayerMap {
    /// `(t × x) ↦ (t × (1 ± ε)x)`.
    ScaleEps { eps: f64, sign: Sign },
    /// `(t × x) ↦ (t × (x − t·y))`.
    Shear { y: Point },
}

impl LayerMap {
    fn factor(&self) -> f64 {
        match self {
            LayerMap::ScaleEps { eps, sign: Sign::Plus } => 1.0 + eps,
            LayerMap::ScaleEps { eps, sign: Sign::Minus } => 1.0 - eps,
            LayerMap::Shear { .. } => 1.0,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            LayerMap::ScaleEps { eps, sign } => {
                if !(*eps > 0.0 && eps.is_finite()) {
                    return Err(LabError::InvalidParameter(format!("scale parameter must be positive, got {eps}")));
                }
                if *sign == Sign::Minus && *eps >= 1.0 {
                    return Err(LabError::InvalidParameter(format!("shrinking by {eps} is not invertible")));
                }
                Ok(())
            }
            LayerMap::Shear { y } => {
                check_dim(dim, y.dim())?;
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(LabError::NonFinite);
                }
                Ok(())
            }
        }
    }

    /// Apply to a lifted coordinate vector without validation.
    pub(crate) fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let t = v[0];
        let mut out = Vec::with_capacity(v.len());
        out.push(t);
        match self {
            LayerMap::ScaleEps { .. } => {
                let f = self.factor();
                out.extend(v[1..].iter().map(|x| f * x));
            }
            LayerMap::Shear { y } => out.extend(v[1..].iter().zip(y.iter()).map(|(x, yi)| x - t * yi)),
        }
        out
    }

    pub fn apply(&self, p: &LiftedPoint) -> Result<LiftedPoint> {
        self.validate(p.dim())?;
        Ok(LiftedPoint::from_slice(&self.apply_vec(&p.to_vec())))
    }

    /// Image of a lifted polytope (both representations carried over).
    pub fn map_region(&self, region: &Polytope) -> Result<Polytope> {
        self.validate(region.dim() - 1)?;
        let synced = region.synced()?;
        let vs = synced.vertices().expect("synchronized").iter().map(|v| Point::from(self.apply_vec(v))).collect();
        // rows transform by the inverse: a·u ≤ b with u = T⁻¹u'
        let rows = synced
            .hrep()
            .expect("synchronized")
            .iter()
            .map(|h| {
                let at = h.normal[0];
                let ax = &h.normal.as_slice()[1..];
                let mut v = Vec::with_capacity(h.normal.dim());
                match self {
                    LayerMap::ScaleEps { .. } => {
                        v.push(at);
                        v.extend(ax.iter().map(|a| a / self.factor()));
                    }
                    LayerMap::Shear { y } => {
                        v.push(at + dot(ax, y));
                        v.extend_from_slice(ax);
                    }
                }
                Halfspace::new(Point::from(v), h.offset)
            })
            .collect();
        Polytope::from_both(rows, vs)
    }

    /// Base of the image cone: `(1 ± ε)B` or `B − y`.
    pub fn map_base(&self, base: &Body) -> Result<Body> {
        self.validate(base.dim())?;
        match (self, base) {
            (LayerMap::ScaleEps { .. }, Body::Polytope(p)) => Ok(Body::Polytope(p.scaled(self.factor()))),
            (LayerMap::Shear { y }, Body::Polytope(p)) => Ok(Body::Polytope(p.translated(&y.scale(-1.0)))),
            (LayerMap::ScaleEps { .. }, Body::Ball(b)) => {
                Ok(Body::Ball(L2Ball::new(b.center.scale(self.factor()), b.radius * self.factor())?))
            }
            (LayerMap::Shear { y }, Body::Ball(b)) => Ok(Body::Ball(L2Ball::new(b.center.sub(y), b.radius)?)),
            (_, Body::Hilbert(_)) => Err(LabError::Unsupported("layer maps of the truncated Hilbert body".into())),
        }
    }

    /// `T(K)` as a cone over the mapped base.
    pub fn map_cone(&self, cone: &ConeOverBase) -> Result<ConeOverBase> {
        cone_over_base(self.map_base(cone.base())?, cone.norm().clone())
    }
}

/// Apply a layer map to a lifted point.
pub fn layer_map(kind: &LayerMap, p: &LiftedPoint) -> Result<LiftedPoint> {
    kind.apply(p)
}

/// Smallest sampled distance from the boundary of `(1 + ε)·base` to `base`.
///
/// Samples are the scaled vertices, the scaled facet centroids and the
/// midpoints between each facet centroid and its vertices.
pub fn boundary_margin(base: &Polytope, eps: f64, norm: &NormSpec) -> Result<f64> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(LabError::InvalidParameter(format!("margin parameter {eps}")));
    }
    let base = base.synced()?;
    inradius_at_origin(&base, norm)?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    let vs = base.vertices().expect("synchronized");
    let s = 1.0 + eps;
    let mut samples: Vec<Vec<f64>> = vs.iter().map(|v| v.scale(s).into_vec()).collect();
    for h in base.hrep().expect("synchronized") {
        let h = h.normalized();
        let on: Vec<&Point> = vs.iter().filter(|v| h.slack(v).abs() <= 1e-9 * (1.0 + v.norm2())).collect();
        if on.is_empty() {
            continue;
        }
        let mut c = vec![0.0; base.dim()];
        for v in &on {
            for (ci, vi) in c.iter_mut().zip(v.iter()) {
                *ci += vi / on.len() as f64;
            }
        }
        samples.push(c.iter().map(|x| s * x).collect());
        for v in &on {
            samples.push(c.iter().zip(v.iter()).map(|(a, b)| s * 0.5 * (a + b)).collect());
        }
    }
    let mut best = f64::INFINITY;
    for p in samples {
        best = best.min(distance_to_polytope(&p, &base, Metric::Base(norm))?.0);
    }
    Ok(best)
}

/// Outcome of the cone sandwich test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichReport {
    /// Both inclusions hold.
    pub holds: bool,
    /// Generators of the shrunk cone satisfy the sheared cone's rows.
    pub inner: bool,
    /// Generators of the sheared cone satisfy the enlarged cone's rows.
    pub outer: bool,
    /// `‖y − x‖`.
    pub shift: f64,
    /// `ε·δ`, δ the inradius of the re-centred base.
    pub eps_delta: f64,
}

/// Check `f₋ε(K) ⊆ G(K) ⊆ f₊ε(K)` where the base is re-centred at `x` and `G`
/// shears by `y − x`, testing generators against rows.
pub fn sandwich_check(base: &Polytope, x: &Point, y: &Point, eps: f64, norm: &NormSpec) -> Result<SandwichReport> {
    check_dim(base.dim(), x.dim())?;
    check_dim(base.dim(), y.dim())?;
    LayerMap::ScaleEps { eps, sign: Sign::Minus }.validate(base.dim())?;
    let centred = base.synced()?.translated(&x.scale(-1.0));
    let delta = inradius_at_origin(&centred, norm)?;
    let shift = y.sub(x);
    let rows = centred.hrep().expect("synchronized");
    let vs = centred.vertices().expect("synchronized");
    let mut inner = true;
    let mut outer = true;
    for h in rows {
        let tol = EPS_FEAS * (1.0 + h.offset.abs()) * h.normal.norm2().max(1.0);
        for v in vs {
            let shrunk: Vec<f64> = v.iter().zip(shift.iter()).map(|(a, b)| (1.0 - eps) * a + b).collect();
            if h.normal.dot(&shrunk) > h.offset + tol {
                inner = false;
            }
            let sheared: Vec<f64> = v.iter().zip(shift.iter()).map(|(a, b)| a - b).collect();
            if h.normal.dot(&sheared) > (1.0 + eps) * h.offset + tol {
                outer = false;
            }
        }
    }
    Ok(SandwichReport { holds: inner && outer, inner, outer, shift: norm.eval(&shift)?, eps_delta: eps * delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval() -> Body {
        Body::from_polytope(Polytope::from_vertices(vec![Point::from(vec![0.0]), Point::from(vec![1.0])]).unwrap()).unwrap()
    }

    fn square() -> Polytope {
        Polytope::from_vertices(vec![
            Point::from(vec![1.0, 1.0]),
            Point::from(vec![-1.0, 1.0]),
            Point::from(vec![1.0, -1.0]),
            Point::from(vec![-1.0, -1.0]),
        ])
        .unwrap()
        .synced()
        .unwrap()
        .into_owned()
    }

    fn lp(t: f64, x: &[f64]) -> LiftedPoint {
        LiftedPoint::new(t, Point::from(x.to_vec())).unwrap()
    }

    fn sorted(vs: &[Point]) -> Vec<Vec<f64>> {
        let mut v: Vec<Vec<f64>> = vs.iter().map(|p| p.to_vec()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn cone_rows_over_unit_interval() {
        let k = cone_over_base(unit_interval(), NormSpec::L2).unwrap();
        assert!(k.contains(&lp(2.0, &[1.0]), 0.0).unwrap());
        assert!(!k.contains(&lp(1.0, &[1.5]), 1e-9).unwrap());
        assert!(!k.contains(&lp(0.0, &[0.1]), 1e-9).unwrap());
        assert_eq!(k.hrep().unwrap().len(), 3);
    }

    #[test]
    fn quadrilateral_interval() {
        let k = cone_over_base(unit_interval(), NormSpec::L2).unwrap();
        let iv = order_interval(&k, &lp(1.0, &[0.5])).unwrap();
        let vs = sorted(iv.vertices().unwrap());
        let expect = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.5], [1.0, 0.5]];
        assert_eq!(vs.len(), 4);
        for (v, e) in vs.iter().zip(expect.iter()) {
            assert!(dist2(v, e) < 1e-9, "{v:?}");
        }
        assert!(!iv.contains(&[0.5, 0.55], EPS_FEAS));
        let best = crate::geometry::solve_lp(&Point::from(vec![1.0, 0.0]), iv.region().unwrap()).unwrap();
        assert!((best.optimum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extreme_interval_is_a_segment() {
        let k = cone_over_base(unit_interval(), NormSpec::L2).unwrap();
        let iv = order_interval(&k, &lp(1.0, &[0.0])).unwrap();
        let vs = sorted(iv.vertices().unwrap());
        assert_eq!(vs.len(), 2);
        assert!(dist2(&vs[0], &[0.0, 0.0]) < 1e-12 && dist2(&vs[1], &[1.0, 0.0]) < 1e-12);
        let zero = order_interval(&k, &LiftedPoint::zero(1)).unwrap();
        assert_eq!(zero.vertices().unwrap().len(), 1);
        assert_eq!(order_interval(&k, &lp(1.0, &[2.0])).unwrap_err(), LabError::NotInCone);
    }

    #[test]
    fn segment_sits_inside_interval() {
        let k = cone_over_base(unit_interval(), NormSpec::L2).unwrap();
        let z = lp(1.0, &[0.5]);
        let seg = algebraic_segment(&LiftedPoint::zero(1), &z).unwrap();
        let iv = order_interval(&k, &z).unwrap();
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            assert!(iv.contains(&[s, 0.5 * s], EPS_FEAS));
        }
        let mid = seg.vertex_mean().unwrap();
        assert!(dist2(&mid, &[0.5, 0.25]) < 1e-15);
        assert_eq!(algebraic_segment(&z, &z).unwrap().vertices().unwrap().len(), 1);
    }

    #[test]
    fn layer_maps() {
        let m = LayerMap::ScaleEps { eps: 0.1, sign: Sign::Plus };
        let p = m.apply(&lp(1.0, &[1.0, 0.0])).unwrap();
        assert!((p.x[0] - 1.1).abs() < 1e-15 && p.t == 1.0);
        let g = LayerMap::Shear { y: Point::from(vec![0.3]) };
        let q = g.apply(&lp(1.0, &[0.5])).unwrap();
        assert!((q.x[0] - 0.2).abs() < 1e-15);
        let r = g.apply(&lp(0.0, &[0.7])).unwrap();
        assert_eq!(r.x[0], 0.7);
        let bad = LayerMap::ScaleEps { eps: 0.0, sign: Sign::Plus };
        assert!(matches!(bad.apply(&lp(1.0, &[1.0])), Err(LabError::InvalidParameter(_))));
    }

    #[test]
    fn intervals_commute_with_layer_maps() {
        let k = cone_over_base(Body::Polytope(square()), NormSpec::L2).unwrap();
        let z = lp(1.0, &[0.3, -0.2]);
        let iv = order_interval(&k, &z).unwrap();
        for map in [LayerMap::ScaleEps { eps: 0.2, sign: Sign::Minus }, LayerMap::Shear { y: Point::from(vec![0.1, 0.4]) }] {
            let mapped = map.map_region(iv.region().unwrap()).unwrap();
            let k2 = map.map_cone(&k).unwrap();
            let direct = order_interval(&k2, &map.apply(&z).unwrap()).unwrap();
            let a = mapped.vertices().unwrap();
            let b = direct.vertices().unwrap();
            assert_eq!(a.len(), b.len());
            for u in a {
                assert!(b.iter().any(|v| dist2(u, v) < 1e-7), "{u:?} missing from {b:?}");
            }
        }
    }

    #[test]
    fn margin_examples() {
        let m = boundary_margin(&square(), 0.1, &NormSpec::L2).unwrap();
        assert!(m >= 0.1 - 1e-7);
        assert_eq!(boundary_margin(&square(), 0.0, &NormSpec::L2).unwrap(), 0.0);
        let tri = Polytope::from_hrep(
            2,
            vec![
                Halfspace::new(Point::from(vec![-1.0, 0.0]), 1.0),
                Halfspace::new(Point::from(vec![0.0, -1.0]), 1.0),
                Halfspace::new(Point::from(vec![1.0, 1.0]), 1.0),
            ],
        )
        .unwrap();
        let m = boundary_margin(&tri, 0.2, &NormSpec::L2).unwrap();
        assert!(m >= 0.2 / 2f64.sqrt() - 1e-7);
        assert_eq!(boundary_margin(&square().translated(&[1.0, 0.0]), 0.1, &NormSpec::L2).unwrap_err(), LabError::NotInterior);
    }

    #[test]
    fn sandwich_examples() {
        let x = Point::zeros(2);
        let near = sandwich_check(&square(), &x, &Point::from(vec![0.05, 0.0]), 0.1, &NormSpec::L2).unwrap();
        assert!(near.holds);
        let far = sandwich_check(&square(), &x, &Point::from(vec![0.5, 0.0]), 0.1, &NormSpec::L2).unwrap();
        assert!(!far.holds);
        for eps in [0.01, 0.1, 0.5] {
            assert!(sandwich_check(&square(), &x, &x, eps, &NormSpec::L2).unwrap().holds);
        }
        let edge = Point::from(vec![1.0, 0.0]);
        assert_eq!(sandwich_check(&square(), &edge, &edge, 0.1, &NormSpec::L2).unwrap_err(), LabError::NotInterior);
    }

    #[test]
    fn two_ball_distance_matches_polygonal_limit() {
        // disc base; interval of an interior point versus a point outside it
        let ball = L2Ball::unit(2);
        let k = cone_over_base(Body::Ball(ball), NormSpec::L2).unwrap();
        let z = lp(1.0, &[0.3, 0.0]);
        let iv = order_interval(&k, &z).unwrap();
        assert!(!iv.is_exact());
        let (d, exact) = iv.distance_from(&[0.5, 0.15, 0.0], Metric::Lifted(&NormSpec::L2)).unwrap();
        assert!(exact && d < 1e-12);
        // the apex of the cone sits at distance 1 from (1, (0,0)) shifted below
        let (d, _) = iv.distance_from(&[-1.0, 0.0, 0.0], Metric::Lifted(&NormSpec::L2)).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        // cutting planes agree with the closed form
        let p = [0.5, 0.2, 0.8];
        let (exact_d, _) = iv.distance_from(&p, Metric::Lifted(&NormSpec::L2)).unwrap();
        let (cut_d, _) = iv.cutting_plane_distance(&p, Metric::Lifted(&NormSpec::L2)).unwrap();
        assert!(cut_d <= exact_d + 1e-9);
        assert!(cut_d >= exact_d - 1e-4, "{cut_d} vs {exact_d}");
    }
}
