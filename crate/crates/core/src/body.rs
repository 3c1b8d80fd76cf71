//! Convex bodies behind a common membership/support interface.

use crate::error::{check_dim, LabError, Result};
use crate::geometry::{dist2, dot, golden_min, norm2, Halfspace, Point, Polytope, EPS_FEAS};

const BISECTION_STEPS: usize = 64;

/// Membership and support oracle for a compact convex set in ℝⁿ.
pub trait ConvexBody {
    fn dim(&self) -> usize;

    /// Membership with an absolute slack `tol`.
    fn contains(&self, x: &[f64], tol: f64) -> bool;

    /// Positive inside, negative outside; inside it is a lower bound on the
    /// Euclidean distance to the boundary.
    fn margin(&self, x: &[f64]) -> f64;

    /// Support value `h(c) = max c·y` and a maximizer.
    fn support(&self, c: &[f64]) -> (f64, Vec<f64>);

    /// A unit normal `c` with `c·x > h(c)`, when `x` is outside.
    fn separate(&self, x: &[f64]) -> Option<Vec<f64>>;

    /// Largest `s ≥ 0` with `x + s·d` in the body (`x` assumed inside).
    fn exit_distance(&self, x: &[f64], d: &[f64], tol: f64) -> f64;

    /// A point of the relative interior.
    fn center(&self) -> Vec<f64>;

    /// Coordinate-wise bounding box.
    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>);

    /// Minkowski gauge when the origin is interior.
    fn gauge(&self, x: &[f64]) -> Option<f64>;

    /// Homogeneous membership slack of `(t, x)` in the cone over the body.
    fn cone_slack(&self, t: f64, x: &[f64]) -> f64;

    /// Analytic flag: every boundary point is extreme.
    fn strictly_convex(&self) -> bool;
}

/// Euclidean ball `‖x − center‖ ≤ radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct L2Ball {
    pub center: Point,
    pub radius: f64,
}

impl L2Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(LabError::InvalidParameter(format!("ball radius {radius}")));
        }
        Ok(L2Ball { center, radius })
    }

    pub fn unit(dim: usize) -> Self {
        L2Ball { center: Point::zeros(dim), radius: 1.0 }
    }
}

/// Finite section of the non-MLUR Hilbert-space body: the convex hull of
/// `±e₁` and the discs `Z_k = {t·e₁ + b : |t| ≤ k/(k+1), b ∈ unit ball of
/// span(e_{k+1}, …, e_N)}` for `k = 1, …, N−1` (coordinates are 0-based, so
/// `e₁` is coordinate 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncatedHilbert {
    pub n: usize,
}

impl TruncatedHilbert {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(LabError::InvalidRecipe(format!("truncated Hilbert body needs N ≥ 2, got {n}")));
        }
        Ok(TruncatedHilbert { n })
    }

    fn level(k: usize) -> f64 {
        k as f64 / (k as f64 + 1.0)
    }

    /// Best value of `Σ u_j c_j` under the nested tail constraints
    /// `‖c_{k..}‖ ≤ 1 − a·k/(k+1)` together with the per-coordinate scale
    /// factors of the maximizer. `u` holds coordinates 1..N.
    fn nested(&self, a: f64, u: &[f64]) -> (f64, Vec<f64>) {
        let m = self.n - 1;
        // tail[k] = Σ_{i ≥ k} u_i² over u-indices; the constraint with level
        // k+1 covers u-indices k.. .
        let mut tail = vec![0.0; m + 1];
        for i in (0..m).rev() {
            tail[i] = tail[i + 1] + u[i] * u[i];
        }
        let r2 = |k: usize| -> f64 {
            if k == m {
                0.0
            } else {
                let r = 1.0 - a * Self::level(k + 1);
                r * r
            }
        };
        // Lower convex hull of (tail[k], r2(k)) from k = m (origin) to k = 0.
        let mut hull: Vec<usize> = Vec::with_capacity(m + 1);
        for k in (0..=m).rev() {
            if let Some(&last) = hull.last() {
                if tail[k] <= tail[last] {
                    // equal V: the lower point (larger k) already present
                    continue;
                }
            }
            while hull.len() >= 2 {
                let (p, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (tail[q] - tail[p]) * (r2(k) - r2(p)) - (r2(q) - r2(p)) * (tail[k] - tail[p]);
                if cross <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(k);
        }
        let mut scale = vec![0.0; m];
        let mut value = 0.0;
        for w in hull.windows(2) {
            let (hi, lo) = (w[0], w[1]);
            let dv = tail[lo] - tail[hi];
            let dr = (r2(lo) - r2(hi)).max(0.0);
            if dv <= 0.0 {
                continue;
            }
            let theta = dr / dv;
            value += (dv * dr).sqrt();
            for s in scale.iter_mut().take(hi).skip(lo) {
                *s = theta.sqrt();
            }
        }
        (value, scale)
    }

    fn best_level(&self, x: &[f64]) -> (f64, f64) {
        let x0 = x[0].abs();
        let u = &x[1..];
        let g = |a: f64| -> Result<f64> { Ok(-(a * x0 + self.nested(a, u).0)) };
        let (a, v) = golden_min(g, 0.0, 1.0, 1e-13).expect("infallible objective");
        (a, -v)
    }

    /// Exact gauge together with a maximizing dual vector `c` (`h(c) ≤ 1`).
    pub fn gauge_with_certificate(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let (a, value) = self.best_level(x);
        let (_, scale) = self.nested(a, &x[1..]);
        let mut c = Vec::with_capacity(self.n);
        c.push(if x[0] < 0.0 { -a } else { a });
        c.extend(x[1..].iter().zip(&scale).map(|(u, s)| u * s));
        (value, c)
    }

    fn support_value(&self, c: &[f64]) -> (f64, Vec<f64>) {
        let c0 = c[0];
        let sign = if c0 < 0.0 { -1.0 } else { 1.0 };
        let mut best = c0.abs();
        let mut arg = vec![0.0; self.n];
        arg[0] = sign;
        let mut tail = 0.0;
        let mut tails = vec![0.0; self.n + 1];
        for i in (1..self.n).rev() {
            tail += c[i] * c[i];
            tails[i] = tail.sqrt();
        }
        for k in 1..self.n {
            let v = Self::level(k) * c0.abs() + tails[k];
            if v > best {
                best = v;
                arg = vec![0.0; self.n];
                arg[0] = sign * Self::level(k);
                if tails[k] > 0.0 {
                    for i in k..self.n {
                        arg[i] = c[i] / tails[k];
                    }
                }
            }
        }
        (best, arg)
    }

    /// Exit along `x + s·d` by Newton steps from outside on the convex map
    /// `s ↦ γ(x + s·d)`; the certificate is a subgradient, so iterates stay
    /// outside and decrease monotonically.
    fn newton_exit(&self, x: &[f64], d: &[f64], tol: f64) -> Option<f64> {
        let dn = norm2(d);
        if dn == 0.0 {
            return Some(f64::INFINITY);
        }
        let at = |s: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + s * b).collect() };
        let mut s = (norm2(x) + 2.0 * self.outer_radius()) / dn;
        for _ in 0..BISECTION_STEPS {
            let (g, c) = self.gauge_with_certificate(&at(s));
            let excess = g - 1.0;
            if excess <= tol {
                return Some(s.max(0.0));
            }
            let slope = dot(&c, d);
            if slope <= 0.0 {
                return None;
            }
            let step = excess / slope;
            if step <= 1e-15 * (1.0 + s) {
                return Some(s.max(0.0));
            }
            s -= step;
            if s < 0.0 {
                return Some(0.0);
            }
        }
        None
    }

    /// Radius of the smallest origin-centred ball containing the body.
    pub fn outer_radius(&self) -> f64 {
        let r = Self::level(self.n - 1);
        (r * r + 1.0).sqrt()
    }
}

/// A base body: polytope, Euclidean ball, or truncated Hilbert body.
#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Polytope(Polytope),
    Ball(L2Ball),
    Hilbert(TruncatedHilbert),
}

impl Body {
    /// Wrap a polytope, computing whichever representation is missing.
    pub fn from_polytope(p: Polytope) -> Result<Body> {
        Ok(Body::Polytope(p.synced()?.into_owned()))
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            Body::Polytope(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_polytope(&self) -> bool {
        matches!(self, Body::Polytope(_))
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite);
        }
        Ok(())
    }

    fn rows(&self) -> &[Halfspace] {
        match self {
            Body::Polytope(p) => p.hrep().expect("synchronized polytope"),
            _ => unreachable!("rows of a non-polytopal body"),
        }
    }

    fn bisect_exit(&self, x: &[f64], d: &[f64], tol: f64) -> f64 {
        let dn = norm2(d);
        if dn == 0.0 {
            return f64::INFINITY;
        }
        let (lo_box, hi_box) = self.bounding_box();
        let diam = dist2(&lo_box, &hi_box);
        let (mut lo, mut hi) = (0.0, 2.0 * diam / dn + 1.0);
        let at = |s: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + s * b).collect() };
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if self.contains(&at(mid), tol) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

impl ConvexBody for Body {
    fn dim(&self) -> usize {
        match self {
            Body::Polytope(p) => p.dim(),
            Body::Ball(b) => b.center.dim(),
            Body::Hilbert(h) => h.n,
        }
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            Body::Polytope(p) => p.contains_point(x, tol),
            Body::Ball(b) => dist2(x, &b.center) <= b.radius + tol,
            Body::Hilbert(h) => h.gauge_with_certificate(x).0 <= 1.0 + tol,
        }
    }

    fn margin(&self, x: &[f64]) -> f64 {
        match self {
            Body::Polytope(p) => p.margin(x),
            Body::Ball(b) => b.radius - dist2(x, &b.center),
            // the body contains the ball of radius 1/2
            Body::Hilbert(h) => 0.5 * (1.0 - h.gauge_with_certificate(x).0),
        }
    }

    fn support(&self, c: &[f64]) -> (f64, Vec<f64>) {
        match self {
            Body::Polytope(p) => {
                let vs = p.vertices().expect("synchronized polytope");
                let mut best = (f64::NEG_INFINITY, 0usize);
                for (i, v) in vs.iter().enumerate() {
                    let s = v.dot(c);
                    if s > best.0 {
                        best = (s, i);
                    }
                }
                (best.0, vs[best.1].to_vec())
            }
            Body::Ball(b) => {
                let n = norm2(c);
                let arg: Vec<f64> = if n > 0.0 {
                    b.center.iter().zip(c).map(|(m, ci)| m + b.radius * ci / n).collect()
                } else {
                    b.center.to_vec()
                };
                (b.center.dot(c) + b.radius * n, arg)
            }
            Body::Hilbert(h) => h.support_value(c),
        }
    }

    fn separate(&self, x: &[f64]) -> Option<Vec<f64>> {
        let c = match self {
            Body::Polytope(p) => {
                let h = p
                    .hrep()
                    .expect("synchronized polytope")
                    .iter()
                    .map(|h| h.normalized())
                    .min_by(|a, b| a.slack(x).total_cmp(&b.slack(x)))?;
                if h.slack(x) >= 0.0 {
                    return None;
                }
                h.normal.to_vec()
            }
            Body::Ball(b) => {
                let d: Vec<f64> = x.iter().zip(b.center.iter()).map(|(a, m)| a - m).collect();
                let n = norm2(&d);
                if n <= b.radius {
                    return None;
                }
                d.iter().map(|v| v / n).collect()
            }
            Body::Hilbert(h) => {
                let (g, c) = h.gauge_with_certificate(x);
                if g <= 1.0 {
                    return None;
                }
                let n = norm2(&c);
                c.iter().map(|v| v / n).collect()
            }
        };
        Some(c)
    }

    fn exit_distance(&self, x: &[f64], d: &[f64], tol: f64) -> f64 {
        match self {
            Body::Polytope(_) => {
                let mut s = f64::INFINITY;
                for h in self.rows() {
                    let ad = h.normal.dot(d);
                    if ad > 1e-15 * h.normal.norm2() * norm2(d) {
                        s = s.min(((h.slack(x) + tol).max(0.0)) / ad);
                    }
                }
                s
            }
            Body::Ball(b) => {
                let w: Vec<f64> = x.iter().zip(b.center.iter()).map(|(a, m)| a - m).collect();
                let dd = dot(d, d);
                if dd == 0.0 {
                    return f64::INFINITY;
                }
                let wd = dot(&w, d);
                let r = b.radius + tol;
                let disc = (wd * wd - dd * (dot(&w, &w) - r * r)).max(0.0);
                ((-wd + disc.sqrt()) / dd).max(0.0)
            }
            Body::Hilbert(h) => h.newton_exit(x, d, tol).unwrap_or_else(|| self.bisect_exit(x, d, tol)),
        }
    }

    fn center(&self) -> Vec<f64> {
        match self {
            Body::Polytope(p) => p.vertex_mean().expect("synchronized polytope").into_vec(),
            Body::Ball(b) => b.center.to_vec(),
            Body::Hilbert(h) => vec![0.0; h.n],
        }
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Body::Polytope(p) => {
                let vs = p.vertices().expect("synchronized polytope");
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
            Body::Ball(b) => (
                b.center.iter().map(|c| c - b.radius).collect(),
                b.center.iter().map(|c| c + b.radius).collect(),
            ),
            Body::Hilbert(h) => (vec![-1.0; h.n], vec![1.0; h.n]),
        }
    }

    fn gauge(&self, x: &[f64]) -> Option<f64> {
        match self {
            Body::Polytope(p) => {
                let rows = p.hrep().expect("synchronized polytope");
                if rows.iter().any(|h| h.offset <= EPS_FEAS * h.normal.norm2()) {
                    return None;
                }
                Some(rows.iter().map(|h| h.normal.dot(x) / h.offset).fold(0.0, f64::max))
            }
            Body::Ball(b) => {
                let cc = dot(&b.center, &b.center);
                let q = b.radius * b.radius - cc;
                if q <= 0.0 {
                    return None;
                }
                let xc = dot(x, &b.center);
                let xx = dot(x, x);
                Some((-xc + (xc * xc + q * xx).sqrt()) / q)
            }
            Body::Hilbert(h) => Some(h.gauge_with_certificate(x).0),
        }
    }

    fn cone_slack(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            Body::Polytope(_) => self
                .rows()
                .iter()
                .map(|h| (h.offset * t - h.normal.dot(x)) / h.normal.norm2().max(1e-300))
                .fold(t, f64::min),
            Body::Ball(b) => {
                let w: Vec<f64> = x.iter().zip(b.center.iter()).map(|(a, m)| a - t * m).collect();
                t * b.radius - norm2(&w)
            }
            Body::Hilbert(h) => 0.5 * (t - h.gauge_with_certificate(x).0),
        }
    }

    fn strictly_convex(&self) -> bool {
        matches!(self, Body::Ball(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn hilbert_gauge_on_known_points() {
        let h = TruncatedHilbert::new(6).unwrap();
        let g = |x: &[f64]| h.gauge_with_certificate(x).0;
        assert!((g(&e(6, 0)) - 1.0).abs() < 1e-12);
        for j in 1..6 {
            assert!((g(&e(6, j)) - 1.0).abs() < 1e-12);
        }
        for k in 1..6 {
            let r = k as f64 / (k as f64 + 1.0);
            let mut y = e(6, 0);
            y[0] = r;
            assert!((g(&y) - r).abs() < 1e-12);
            for j in k..6 {
                let mut p = y.clone();
                p[j] = 1.0;
                assert!((g(&p) - 1.0).abs() < 1e-9, "k={k} j={j}: {}", g(&p));
            }
        }
        // (4/5)e₁ ± e₅ lie in Z₄
        let mut p = vec![0.8, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert!(h.gauge_with_certificate(&p).0 <= 1.0 + 1e-12);
        p[4] = -1.0;
        assert!(h.gauge_with_certificate(&p).0 <= 1.0 + 1e-12);
    }

    #[test]
    fn hilbert_contains_half_ball() {
        let body = Body::Hilbert(TruncatedHilbert::new(5).unwrap());
        let mut rng = 0x9e3779b97f4a7c15u64;
        for _ in 0..200 {
            let v: Vec<f64> = (0..5)
                .map(|_| {
                    rng ^= rng << 13;
                    rng ^= rng >> 7;
                    rng ^= rng << 17;
                    (rng as f64 / u64::MAX as f64) - 0.5
                })
                .collect();
            let n = norm2(&v);
            let p: Vec<f64> = v.iter().map(|x| 0.5 * x / n).collect();
            assert!(body.contains(&p, 1e-12));
        }
    }

    #[test]
    fn e1_is_exposed() {
        let body = Body::Hilbert(TruncatedHilbert::new(6).unwrap());
        let (h, arg) = body.support(&e(6, 0));
        assert_eq!(h, 1.0);
        assert_eq!(arg, e(6, 0));
        let mut beyond = e(6, 0);
        beyond[0] = 1.0 + 1e-6;
        assert!(!body.contains(&beyond, 0.0));
        let c = body.separate(&beyond).unwrap();
        assert!(dot(&c, &beyond) > body.support(&c).0);
    }

    #[test]
    fn ball_formulas() {
        let b = Body::Ball(L2Ball::new(Point::from(vec![0.5, 0.0]), 1.0).unwrap());
        assert!(b.contains(&[1.5, 0.0], 0.0));
        assert!(!b.contains(&[1.6, 0.0], 1e-9));
        assert!((b.exit_distance(&[0.5, 0.0], &[0.0, 2.0], 0.0) - 0.5).abs() < 1e-15);
        let g = b.gauge(&[1.5, 0.0]).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
        let g = b.gauge(&[0.0, 1.0]).unwrap();
        assert!((g - 1.0 / 0.75f64.sqrt()).abs() < 1e-12);
        assert!(b.strictly_convex());
    }

    #[test]
    fn polytope_exit_and_slack() {
        let sq = Polytope::from_vertices(vec![
            Point::from(vec![1.0, 1.0]),
            Point::from(vec![-1.0, 1.0]),
            Point::from(vec![1.0, -1.0]),
            Point::from(vec![-1.0, -1.0]),
        ])
        .unwrap();
        let b = Body::from_polytope(sq).unwrap();
        assert!((b.exit_distance(&[0.0, 0.0], &[1.0, 1.0], 0.0) - 1.0).abs() < 1e-15);
        assert!((b.cone_slack(2.0, &[1.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!(b.cone_slack(1.0, &[2.0, 0.0]) < 0.0);
        assert!(!b.strictly_convex());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn hilbert_certificate_is_dual_feasible(x in proptest::collection::vec(-2.0f64..2.0, 6)) {
            let h = TruncatedHilbert::new(6).unwrap();
            let (g, c) = h.gauge_with_certificate(&x);
            prop_assert!((dot(&c, &x) - g).abs() <= 1e-9 * (1.0 + g));
            prop_assert!(h.support_value(&c).0 <= 1.0 + 1e-9);
        }

        #[test]
        fn hilbert_gauge_dominates_support_ratios(
            x in proptest::collection::vec(-2.0f64..2.0, 6),
            c in proptest::collection::vec(-1.0f64..1.0, 6),
        ) {
            // x/γ ∈ B implies c·x ≤ γ·h(c)
            let h = TruncatedHilbert::new(6).unwrap();
            let (g, _) = h.gauge_with_certificate(&x);
            prop_assert!(dot(&c, &x) <= g * h.support_value(&c).0 + 1e-9);
        }

        #[test]
        fn support_points_are_members(c in proptest::collection::vec(-1.0f64..1.0, 6)) {
            let h = TruncatedHilbert::new(6).unwrap();
            let (v, arg) = h.support_value(&c);
            prop_assert!((dot(&arg, &c) - v).abs() < 1e-12);
            prop_assert!(h.gauge_with_certificate(&arg).0 <= 1.0 + 1e-9);
        }
    }
}
