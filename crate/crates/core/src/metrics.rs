//! Set-distance functionals on regions of E: one-sided and two-sided
//! distances, interval thickness, the max-chord functional and ρ.

use serde::{Deserialize, Serialize};

use crate::body::{Body, ConvexBody};
use crate::cone::{order_interval, ConeOverBase, LiftedPoint, OrderInterval};
use crate::error::{check_dim, LabError, Result};
use crate::geometry::{
    convert_rep, distance_to_polytope, norm2, ConvertTarget, Halfspace, Metric, NormSpec, Point, Polytope, EPS_FEAS,
};
use crate::oracle::{self, SampleBudget};
use crate::rotundity::{self, ChordSearch};

/// How the two one-sided distances are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    MinOneSided,
    #[default]
    MaxHausdorff,
}

/// An operand of the distance functionals.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    Polytope(&'a Polytope),
    Interval(&'a OrderInterval),
}

impl<'a> Region<'a> {
    pub fn exact(&self) -> Option<&'a Polytope> {
        match self {
            Region::Polytope(p) => Some(p),
            Region::Interval(iv) => iv.region(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Polytope(p) => p.dim(),
            Region::Interval(iv) => iv.lifted_dim(),
        }
    }

    /// Points known to lie in the region.
    pub fn reference_points(&self) -> Result<Vec<Vec<f64>>> {
        match self {
            Region::Polytope(p) => Ok(p.synced()?.vertices().expect("synchronized").iter().map(|v| v.to_vec()).collect()),
            Region::Interval(iv) => Ok(iv.reference_points()),
        }
    }

    /// Lower bound on the distance from `p` and whether it is exact.
    pub fn distance_from(&self, p: &[f64], metric: Metric) -> Result<(f64, bool)> {
        match self {
            Region::Polytope(poly) => Ok((distance_to_polytope(p, poly, metric)?.0, true)),
            Region::Interval(iv) => iv.distance_from(p, metric),
        }
    }

    /// Cheap upper bound on the distance from `p`.
    pub fn distance_upper_bound(&self, p: &[f64], metric: Metric) -> Result<f64> {
        let mut best = f64::INFINITY;
        for q in self.reference_points()? {
            let v: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a - b).collect();
            best = best.min(metric.eval(&v));
        }
        if let Region::Interval(iv) = self {
            best = best.min(iv.segment_distance(p, metric)?);
        }
        Ok(best)
    }
}

/// Both one-sided distances between two regions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSided {
    /// `d̃(A → B)`.
    pub forward: f64,
    /// `d̃(B → A)`.
    pub reverse: f64,
    /// False when either value is a sampling lower bound.
    pub exact: bool,
}

impl TwoSided {
    pub fn value(&self, mode: DistanceMode) -> f64 {
        match mode {
            DistanceMode::MinOneSided => self.forward.min(self.reverse),
            DistanceMode::MaxHausdorff => self.forward.max(self.reverse),
        }
    }
}

/// `d̃(A, B) = sup_{a ∈ A} dist(a, B)`, attained at a vertex of A.
pub fn one_sided_distance(a: &Region, b: &Region, metric: Metric) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let Some(pa) = a.exact() else {
        return Err(LabError::NeedsSamplingBudget);
    };
    let pa = pa.synced()?;
    let mut best = 0.0_f64;
    for v in pa.vertices().expect("synchronized") {
        if b.distance_upper_bound(v, metric)? <= best {
            continue;
        }
        let (d, exact) = b.distance_from(v, metric)?;
        if !exact {
            return Err(LabError::NeedsSamplingBudget);
        }
        best = best.max(d);
    }
    Ok(best)
}

/// Two-sided distance in the requested mode.
pub fn set_distance(a: &Region, b: &Region, mode: DistanceMode, metric: Metric) -> Result<f64> {
    Ok(two_sided(a, b, metric)?.value(mode))
}

pub fn two_sided(a: &Region, b: &Region, metric: Metric) -> Result<TwoSided> {
    Ok(TwoSided { forward: one_sided_distance(a, b, metric)?, reverse: one_sided_distance(b, a, metric)?, exact: true })
}

/// Distance from `⟦0, z⟧` to the segment `[0, z]` in the lifted norm.
pub fn thickness(cone: &ConeOverBase, z: &LiftedPoint) -> Result<f64> {
    let iv = order_interval(cone, z)?;
    interval_thickness(&iv)
}

pub fn interval_thickness(iv: &OrderInterval) -> Result<f64> {
    let Some(region) = iv.region() else {
        return Err(LabError::NeedsSamplingBudget);
    };
    let metric = Metric::Lifted(iv.cone().norm());
    let mut best = 0.0_f64;
    for v in region.vertices().expect("synchronized") {
        best = best.max(iv.segment_distance(v, metric)?);
    }
    Ok(best)
}

/// Longest centred chord of a polytope at `x`: a vertex of the symmetric
/// polytope `(P − x) ∩ (x − P)` of largest norm.
pub(crate) fn polytope_half_chord(p: &Polytope, x: &[f64], norm: &NormSpec) -> Result<(f64, Vec<f64>)> {
    let mut rows = Vec::new();
    for h in p.hrep().expect("synchronized") {
        let s = h.slack(x).max(0.0);
        rows.push(Halfspace::new(h.normal.clone(), s));
        rows.push(Halfspace::new(h.normal.scale(-1.0), s));
    }
    let sym = convert_rep(&Polytope::from_hrep(p.dim(), rows)?, ConvertTarget::ToVertices)?;
    let mut best = (0.0, vec![0.0; p.dim()]);
    for v in sym.vertices().expect("synchronized") {
        let n = norm.eval_unchecked(v);
        if n > best.0 + 1e-12 {
            best = (n, v.to_vec());
        }
    }
    Ok(best)
}

/// `l(x)`: supremum of lengths of chords of the body with midpoint `x`.
///
/// Exact for polytopes and for Euclidean balls measured in L2; a
/// direction-search lower bound for other bodies.
pub fn max_chord(base: &Body, x: &Point, norm: &NormSpec) -> Result<f64> {
    base.check_point(x)?;
    if let Some(d) = norm.fixed_dim() {
        check_dim(d, x.dim())?;
    }
    if !base.contains(x, EPS_FEAS * (1.0 + norm2(x))) {
        return Err(LabError::NotInBody);
    }
    match base {
        Body::Polytope(p) => Ok(2.0 * polytope_half_chord(p, x, norm)?.0),
        _ => Ok(2.0 * rotundity::best_chord(base, x, norm, &ChordSearch::default(), EPS_FEAS)?.half_length),
    }
}

/// `ρ(x, y) = dist(⟦0,x⟧, ⟦0,y⟧)` for polytopal bases.
pub fn rho(cone: &ConeOverBase, x: &LiftedPoint, y: &LiftedPoint, mode: DistanceMode) -> Result<f64> {
    Ok(rho_both(cone, x, y, None)?.value(mode))
}

/// Both one-sided interval distances; oracle bases need a sampling budget and
/// then yield lower bounds.
pub fn rho_both(cone: &ConeOverBase, x: &LiftedPoint, y: &LiftedPoint, budget: Option<&SampleBudget>) -> Result<TwoSided> {
    let ix = order_interval(cone, x)?;
    let iy = order_interval(cone, y)?;
    interval_distances(&ix, &iy, budget)
}

pub fn interval_distances(ix: &OrderInterval, iy: &OrderInterval, budget: Option<&SampleBudget>) -> Result<TwoSided> {
    let metric = Metric::Lifted(ix.cone().norm());
    let (a, b) = (Region::Interval(ix), Region::Interval(iy));
    let mut exact = true;
    let mut side = |from: &Region, to: &Region, stream: u64| -> Result<f64> {
        match one_sided_distance(from, to, metric) {
            Err(LabError::NeedsSamplingBudget) => {
                let budget = budget.ok_or(LabError::NeedsSamplingBudget)?;
                exact = false;
                Ok(oracle::estimate_one_sided(from, to, metric, &budget.with_stream(stream))?.value)
            }
            other => other,
        }
    };
    let forward = side(&a, &b, 0)?;
    let reverse = side(&b, &a, 1)?;
    Ok(TwoSided { forward, reverse, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::cone_over_base;

    fn segment(a: f64, b: f64) -> Polytope {
        Polytope::from_vertices(vec![Point::from(vec![a]), Point::from(vec![b])]).unwrap().synced().unwrap().into_owned()
    }

    fn unit_cone() -> ConeOverBase {
        cone_over_base(Body::from_polytope(segment(0.0, 1.0)).unwrap(), NormSpec::L2).unwrap()
    }

    fn lp(t: f64, x: f64) -> LiftedPoint {
        LiftedPoint::new(t, Point::from(vec![x])).unwrap()
    }

    #[test]
    fn overhang_on_the_line() {
        let (a, b) = (segment(0.0, 2.0), segment(0.0, 1.0));
        let m = Metric::Base(&NormSpec::L2);
        let (ra, rb) = (Region::Polytope(&a), Region::Polytope(&b));
        assert!((one_sided_distance(&ra, &rb, m).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(one_sided_distance(&rb, &ra, m).unwrap(), 0.0);
        assert_eq!(set_distance(&ra, &rb, DistanceMode::MinOneSided, m).unwrap(), 0.0);
        assert!((set_distance(&ra, &rb, DistanceMode::MaxHausdorff, m).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(one_sided_distance(&ra, &ra, m).unwrap(), 0.0);
    }

    #[test]
    fn interval_examples() {
        let k = unit_cone();
        let thick = order_interval(&k, &lp(1.0, 0.5)).unwrap();
        let thin = order_interval(&k, &lp(1.0, 0.0)).unwrap();
        let m = Metric::Lifted(&NormSpec::L2);
        let d = one_sided_distance(&Region::Interval(&thick), &Region::Interval(&thin), m).unwrap();
        assert!((d - 0.5).abs() < 1e-9);
        for mode in [DistanceMode::MinOneSided, DistanceMode::MaxHausdorff] {
            let d = set_distance(&Region::Interval(&thin), &Region::Interval(&thick), mode, m).unwrap();
            assert!((d - 0.5).abs() < 1e-9, "{mode:?}: {d}");
        }
        let r = rho(&k, &lp(1.0, 0.0), &lp(1.0, 0.5), DistanceMode::MaxHausdorff).unwrap();
        assert!((r - 0.5).abs() < 1e-9);
        assert_eq!(rho(&k, &lp(1.0, 0.5), &lp(1.0, 0.5), DistanceMode::MaxHausdorff).unwrap(), 0.0);
    }

    #[test]
    fn thickness_examples() {
        let k = unit_cone();
        assert!((thickness(&k, &lp(1.0, 0.5)).unwrap() - 0.25).abs() < 1e-9);
        assert!(thickness(&k, &lp(1.0, 0.0)).unwrap() < 1e-12);
        assert!((thickness(&k, &lp(2.0, 1.0)).unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(thickness(&k, &lp(1.0, 1.5)).unwrap_err(), LabError::NotInCone);
    }

    #[test]
    fn quarter_chord_bound_needs_the_unit_ball() {
        // B = [1, 3], x = 2: l = 2 but the interval is only 1/4 thick
        let b = Body::from_polytope(segment(1.0, 3.0)).unwrap();
        let k = cone_over_base(b.clone(), NormSpec::L2).unwrap();
        let th = thickness(&k, &lp(1.0, 2.0)).unwrap();
        assert!((th - 0.25).abs() < 1e-9);
        let l = max_chord(&b, &Point::from(vec![2.0]), &NormSpec::L2).unwrap();
        assert!((l - 2.0).abs() < 1e-12);
        assert!(th >= l / 8.0 - 1e-9);
    }

    #[test]
    fn chord_examples() {
        let b = Body::from_polytope(segment(0.0, 1.0)).unwrap();
        assert!((max_chord(&b, &Point::from(vec![0.5]), &NormSpec::L2).unwrap() - 1.0).abs() < 1e-12);
        assert!(max_chord(&b, &Point::from(vec![0.0]), &NormSpec::L2).unwrap() < 1e-12);
        assert_eq!(max_chord(&b, &Point::from(vec![1.5]), &NormSpec::L2).unwrap_err(), LabError::NotInBody);
        let sq = Polytope::from_vertices(vec![
            Point::from(vec![1.0, 1.0]),
            Point::from(vec![-1.0, 1.0]),
            Point::from(vec![1.0, -1.0]),
            Point::from(vec![-1.0, -1.0]),
        ])
        .unwrap();
        let sq = Body::from_polytope(sq).unwrap();
        let l = max_chord(&sq, &Point::zeros(2), &NormSpec::L2).unwrap();
        assert!((l - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn oracle_operands_need_a_budget() {
        let k = cone_over_base(Body::Ball(crate::body::L2Ball::unit(2)), NormSpec::L2).unwrap();
        let z = LiftedPoint::new(1.0, Point::from(vec![0.2, 0.1])).unwrap();
        assert_eq!(thickness(&k, &z).unwrap_err(), LabError::NeedsSamplingBudget);
        assert_eq!(rho(&k, &z, &z, DistanceMode::MaxHausdorff).unwrap_err(), LabError::NeedsSamplingBudget);
        // sphere points give exact segments, and the ball distance is exact
        let s = LiftedPoint::new(1.0, Point::from(vec![0.6, 0.8])).unwrap();
        assert!(thickness(&k, &s).unwrap() < 1e-12);
        let fwd = one_sided_distance(
            &Region::Interval(&order_interval(&k, &s).unwrap()),
            &Region::Interval(&order_interval(&k, &z).unwrap()),
            Metric::Lifted(&NormSpec::L2),
        );
        assert!(fwd.unwrap() > 0.1);
    }
}
