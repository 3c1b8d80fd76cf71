use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use super::enumerate::enumerate_vertices;
use super::hull::facets_of_points;
use super::linalg;
use super::point::{dist2, Point};
use super::{EPS_FEAS, MAX_ENUM_DIM, MERGE_TOL};
use crate::error::{check_dim, LabError, Result};

/// Closed half-space `normal · x ≤ offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Point, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    /// `offset − normal·x`; nonnegative inside.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - self.normal.dot(x)
    }

    /// Same half-space with a unit-length normal (zero normals are kept as is).
    pub fn normalized(&self) -> Halfspace {
        let n = self.normal.norm2();
        if n == 0.0 {
            self.clone()
        } else {
            Halfspace { normal: self.normal.scale(1.0 / n), offset: self.offset / n }
        }
    }
}

/// Which representations a [`Polytope`] currently carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RepStatus {
    pub hrep: bool,
    pub vrep: bool,
    pub synchronized: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvertTarget {
    ToVertices,
    ToHalfspaces,
}

/// Bounded convex polytope in ℝⁿ held as half-spaces, vertices, or both.
///
/// Once synchronized, every vertex satisfies every row within `EPS_FEAS`,
/// vertices are pairwise farther apart than `MERGE_TOL`, and `equalities`
/// lists the rows tight at every vertex (nonempty iff `affine_rank < dim`,
/// unless a redundant row happens to be tight everywhere).
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    hrep: Option<Vec<Halfspace>>,
    vrep: Option<Vec<Point>>,
    affine_rank: Option<usize>,
    equalities: Vec<usize>,
}

fn validate_point(p: &[f64], dim: usize) -> Result<()> {
    check_dim(dim, p.len())?;
    if p.iter().any(|c| !c.is_finite()) {
        return Err(LabError::NonFinite);
    }
    Ok(())
}

pub(crate) fn dedupe(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        let scale = 1.0 + p.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !out.iter().any(|q| dist2(q, &p) <= MERGE_TOL * scale) {
            out.push(p);
        }
    }
    out
}

impl Polytope {
    pub fn from_hrep(dim: usize, rows: Vec<Halfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(LabError::InvalidParameter("dimension 0".into()));
        }
        for h in &rows {
            validate_point(&h.normal, dim)?;
            if !h.offset.is_finite() {
                return Err(LabError::NonFinite);
            }
        }
        Ok(Polytope { dim, hrep: Some(rows), vrep: None, affine_rank: None, equalities: Vec::new() })
    }

    /// Convex hull of the given points (V-representation only; points that are
    /// not extreme are dropped when the H-representation is computed).
    pub fn from_vertices(points: Vec<Point>) -> Result<Self> {
        let dim = points.first().map(|p| p.dim()).ok_or(LabError::Infeasible)?;
        if dim == 0 {
            return Err(LabError::InvalidParameter("dimension 0".into()));
        }
        for p in &points {
            validate_point(p, dim)?;
        }
        Ok(Polytope { dim, hrep: None, vrep: Some(dedupe(points)), affine_rank: None, equalities: Vec::new() })
    }

    /// Both representations supplied by the caller; checked for consistency.
    pub fn from_both(hrep: Vec<Halfspace>, vrep: Vec<Point>) -> Result<Self> {
        let mut p = Polytope::from_hrep(
            vrep.first().map(|v| v.dim()).ok_or(LabError::Infeasible)?,
            hrep,
        )?;
        for v in &vrep {
            validate_point(v, p.dim)?;
        }
        p.vrep = Some(dedupe(vrep));
        p.check_consistency()?;
        p.finish_sync();
        Ok(p)
    }

    /// The single point `{x}`.
    pub fn singleton(x: &Point) -> Polytope {
        let d = x.dim();
        let mut rows = Vec::with_capacity(2 * d);
        for i in 0..d {
            rows.push(Halfspace::new(Point::basis(d, i), x[i]));
            rows.push(Halfspace::new(Point::basis(d, i).scale(-1.0), -x[i]));
        }
        let mut p = Polytope { dim: d, hrep: Some(rows), vrep: Some(vec![x.clone()]), affine_rank: None, equalities: Vec::new() };
        p.finish_sync();
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hrep(&self) -> Option<&[Halfspace]> {
        self.hrep.as_deref()
    }

    pub fn vertices(&self) -> Option<&[Point]> {
        self.vrep.as_deref()
    }

    /// Dimension of the affine hull (known once vertices are available).
    pub fn affine_rank(&self) -> Option<usize> {
        self.affine_rank
    }

    /// Indices of rows detected as implicit equalities.
    pub fn equalities(&self) -> &[usize] {
        &self.equalities
    }

    pub fn rep_status(&self) -> RepStatus {
        RepStatus {
            hrep: self.hrep.is_some(),
            vrep: self.vrep.is_some(),
            synchronized: self.hrep.is_some() && self.vrep.is_some() && self.affine_rank.is_some(),
        }
    }

    /// Borrow when already synchronized, otherwise compute the missing side.
    pub fn synced(&self) -> Result<Cow<'_, Polytope>> {
        if self.rep_status().synchronized {
            Ok(Cow::Borrowed(self))
        } else if self.hrep.is_some() {
            Ok(Cow::Owned(convert_rep(self, ConvertTarget::ToVertices)?))
        } else {
            Ok(Cow::Owned(convert_rep(self, ConvertTarget::ToHalfspaces)?))
        }
    }

    /// Membership against the H-representation. Panics if there is none.
    pub fn contains_point(&self, x: &[f64], tol: f64) -> bool {
        self.hrep
            .as_ref()
            .expect("contains_point needs an H-representation")
            .iter()
            .all(|h| h.normal.dot(x) <= h.offset + tol)
    }

    /// Smallest slack over all rows (negative outside).
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.hrep
            .as_ref()
            .expect("margin needs an H-representation")
            .iter()
            .map(|h| h.normalized().slack(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn vertex_mean(&self) -> Option<Point> {
        let vs = self.vrep.as_ref()?;
        let mut c = vec![0.0; self.dim];
        for v in vs {
            for (ci, vi) in c.iter_mut().zip(v.iter()) {
                *ci += vi / vs.len() as f64;
            }
        }
        Some(Point::from(c))
    }

    /// Largest Euclidean norm of a vertex.
    pub fn bounding_radius(&self) -> Option<f64> {
        self.vrep.as_ref().map(|vs| vs.iter().map(|v| v.norm2()).fold(0.0, f64::max))
    }

    pub fn translated(&self, shift: &[f64]) -> Polytope {
        let hrep = self.hrep.as_ref().map(|rows| {
            rows.iter()
                .map(|h| Halfspace::new(h.normal.clone(), h.offset + h.normal.dot(shift)))
                .collect()
        });
        let vrep = self.vrep.as_ref().map(|vs| vs.iter().map(|v| v.add(shift)).collect());
        Polytope { dim: self.dim, hrep, vrep, affine_rank: self.affine_rank, equalities: self.equalities.clone() }
    }

    /// `s · P` for `s > 0`.
    pub fn scaled(&self, s: f64) -> Polytope {
        assert!(s > 0.0, "scale factor must be positive");
        let hrep = self
            .hrep
            .as_ref()
            .map(|rows| rows.iter().map(|h| Halfspace::new(h.normal.clone(), h.offset * s)).collect());
        let vrep = self.vrep.as_ref().map(|vs| vs.iter().map(|v| v.scale(s)).collect());
        Polytope { dim: self.dim, hrep, vrep, affine_rank: self.affine_rank, equalities: self.equalities.clone() }
    }

    fn check_consistency(&self) -> Result<()> {
        let (Some(rows), Some(vs)) = (&self.hrep, &self.vrep) else {
            return Ok(());
        };
        for (vi, v) in vs.iter().enumerate() {
            for (ri, h) in rows.iter().enumerate() {
                let scale = 1.0 + h.normal.norm2() * (1.0 + v.norm2());
                if h.normal.dot(v) > h.offset + EPS_FEAS * scale {
                    return Err(LabError::Inconsistent(format!(
                        "vertex {vi} violates row {ri} by {:e}",
                        h.normal.dot(v) - h.offset
                    )));
                }
            }
        }
        Ok(())
    }

    fn finish_sync(&mut self) {
        let vs = self.vrep.as_ref().expect("vertices present");
        let refs: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        let frame = linalg::affine_frame(&refs, self.dim, 1e-9);
        self.affine_rank = Some(frame.rank());
        if let Some(rows) = &self.hrep {
            self.equalities = rows
                .iter()
                .enumerate()
                .filter(|(_, h)| {
                    let h = h.normalized();
                    vs.iter().all(|v| h.slack(v).abs() <= 1e-8 * (1.0 + v.norm2()))
                })
                .map(|(i, _)| i)
                .collect();
        }
    }
}

/// Populate the missing representation from the present one.
///
/// `ToVertices` enumerates vertices of the H-representation (ambient
/// dimension at most `MAX_ENUM_DIM`), keeping the given rows. `ToHalfspaces`
/// computes an irredundant H-representation of the hull of the vertex list
/// and drops points that are not extreme.
pub fn convert_rep(p: &Polytope, target: ConvertTarget) -> Result<Polytope> {
    match target {
        ConvertTarget::ToVertices => {
            let rows = p
                .hrep
                .as_ref()
                .ok_or_else(|| LabError::InvalidParameter("no H-representation to convert".into()))?;
            if p.dim > MAX_ENUM_DIM {
                return Err(LabError::Unsupported(format!(
                    "vertex enumeration in dimension {} (limit {MAX_ENUM_DIM})",
                    p.dim
                )));
            }
            let vertices = enumerate_vertices(p.dim, rows)?;
            let mut out = Polytope { dim: p.dim, hrep: Some(rows.clone()), vrep: Some(vertices), affine_rank: None, equalities: Vec::new() };
            out.check_consistency()?;
            out.finish_sync();
            Ok(out)
        }
        ConvertTarget::ToHalfspaces => {
            let vs = p
                .vrep
                .as_ref()
                .ok_or_else(|| LabError::InvalidParameter("no V-representation to convert".into()))?;
            let hull = facets_of_points(p.dim, vs)?;
            let mut out = Polytope { dim: p.dim, hrep: Some(hull.rows), vrep: Some(hull.vertices), affine_rank: None, equalities: Vec::new() };
            out.check_consistency()?;
            out.finish_sync();
            Ok(out)
        }
    }
}

/// Membership test against the H-representation within `tol`.
pub fn contains(p: &Polytope, x: &Point, tol: f64) -> Result<bool> {
    check_dim(p.dim, x.dim())?;
    match &p.hrep {
        Some(_) => Ok(p.contains_point(x, tol)),
        None => Ok(convert_rep(p, ConvertTarget::ToHalfspaces)?.contains_point(x, tol)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(n: &[f64], o: f64) -> Halfspace {
        Halfspace::new(Point::from(n.to_vec()), o)
    }

    fn square_hrep() -> Polytope {
        Polytope::from_hrep(
            2,
            vec![hs(&[1.0, 0.0], 1.0), hs(&[-1.0, 0.0], 1.0), hs(&[0.0, 1.0], 1.0), hs(&[0.0, -1.0], 1.0)],
        )
        .unwrap()
    }

    fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn square_vertices() {
        let p = convert_rep(&square_hrep(), ConvertTarget::ToVertices).unwrap();
        let vs = sorted(p.vertices().unwrap().iter().map(|v| v.to_vec()).collect());
        assert_eq!(vs.len(), 4);
        let expect = [[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]];
        for (v, e) in vs.iter().zip(expect.iter()) {
            assert!(dist2(v, e) < 1e-12);
        }
        assert_eq!(p.affine_rank(), Some(2));
        assert!(p.equalities().is_empty());
    }

    #[test]
    fn interval_quadrilateral_vertices() {
        // (t, x): 0 ≤ x ≤ t, x ≤ 1/2, x ≥ t − 1/2
        let p = Polytope::from_hrep(
            2,
            vec![hs(&[0.0, -1.0], 0.0), hs(&[-1.0, 1.0], 0.0), hs(&[0.0, 1.0], 0.5), hs(&[1.0, -1.0], 0.5)],
        )
        .unwrap();
        let p = convert_rep(&p, ConvertTarget::ToVertices).unwrap();
        let vs = sorted(p.vertices().unwrap().iter().map(|v| v.to_vec()).collect());
        let expect = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.5], [1.0, 0.5]];
        assert_eq!(vs.len(), 4);
        for (v, e) in vs.iter().zip(expect.iter()) {
            assert!(dist2(v, e) < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn triangle_halfspaces() {
        let p = Polytope::from_vertices(vec![
            Point::from(vec![0.0, 0.0]),
            Point::from(vec![1.0, 0.0]),
            Point::from(vec![0.0, 1.0]),
        ])
        .unwrap();
        let q = convert_rep(&p, ConvertTarget::ToHalfspaces).unwrap();
        let rows = q.hrep().unwrap();
        assert_eq!(rows.len(), 3);
        assert!(q.contains_point(&[0.2, 0.2], 0.0));
        assert!(!q.contains_point(&[0.6, 0.6], 1e-9));
        assert!(!q.contains_point(&[-0.1, 0.2], 1e-9));
    }

    #[test]
    fn hull_drops_interior_points() {
        let p = Polytope::from_vertices(vec![
            Point::from(vec![0.0, 0.0]),
            Point::from(vec![2.0, 0.0]),
            Point::from(vec![1.0, 0.0]),
            Point::from(vec![0.0, 2.0]),
            Point::from(vec![0.5, 0.5]),
        ])
        .unwrap();
        let q = convert_rep(&p, ConvertTarget::ToHalfspaces).unwrap();
        assert_eq!(q.vertices().unwrap().len(), 3);
    }

    #[test]
    fn segment_in_plane_is_lower_dimensional() {
        let p = Polytope::from_vertices(vec![Point::from(vec![0.0, 0.0]), Point::from(vec![1.0, 1.0])]).unwrap();
        let q = convert_rep(&p, ConvertTarget::ToHalfspaces).unwrap();
        assert_eq!(q.affine_rank(), Some(1));
        assert_eq!(q.equalities().len(), 2);
        let back = convert_rep(&Polytope::from_hrep(2, q.hrep().unwrap().to_vec()).unwrap(), ConvertTarget::ToVertices).unwrap();
        assert_eq!(back.vertices().unwrap().len(), 2);
    }

    #[test]
    fn membership() {
        let p = Polytope::from_hrep(1, vec![hs(&[1.0], 1.0), hs(&[-1.0], 0.0)]).unwrap();
        assert!(contains(&p, &Point::from(vec![0.5]), EPS_FEAS).unwrap());
        assert!(!contains(&p, &Point::from(vec![1.5]), EPS_FEAS).unwrap());
        assert!(matches!(contains(&p, &Point::from(vec![0.5, 0.0]), EPS_FEAS), Err(LabError::DimensionMismatch { .. })));
    }

    #[test]
    fn inconsistent_pair_is_rejected() {
        let rows = vec![hs(&[1.0], 1.0), hs(&[-1.0], 0.0)];
        let err = Polytope::from_both(rows, vec![Point::from(vec![2.0])]).unwrap_err();
        assert!(matches!(err, LabError::Inconsistent(_)));
    }

    #[test]
    fn unbounded_and_empty() {
        let half = Polytope::from_hrep(1, vec![hs(&[1.0], 1.0)]).unwrap();
        assert_eq!(convert_rep(&half, ConvertTarget::ToVertices).unwrap_err(), LabError::Unbounded);
        let empty = Polytope::from_hrep(1, vec![hs(&[1.0], 0.0), hs(&[-1.0], -1.0)]).unwrap();
        assert_eq!(convert_rep(&empty, ConvertTarget::ToVertices).unwrap_err(), LabError::Infeasible);
    }

    #[test]
    fn dimension_limit() {
        let d = MAX_ENUM_DIM + 1;
        let rows = (0..d)
            .flat_map(|i| [Halfspace::new(Point::basis(d, i), 1.0), Halfspace::new(Point::basis(d, i).scale(-1.0), 1.0)])
            .collect();
        let p = Polytope::from_hrep(d, rows).unwrap();
        assert!(matches!(convert_rep(&p, ConvertTarget::ToVertices), Err(LabError::Unsupported(_))));
    }
}
