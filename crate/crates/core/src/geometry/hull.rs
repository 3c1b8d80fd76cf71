//! Facets of the convex hull of a point cloud, via vertex enumeration of the
//! polar body in the cloud's own affine frame.

use super::enumerate::enumerate_vertices;
use super::linalg;
use super::point::{dot, Point};
use super::polytope::{dedupe, Halfspace};
use super::MAX_ENUM_DIM;
use crate::error::{LabError, Result};

pub(crate) struct Hull {
    pub rows: Vec<Halfspace>,
    pub vertices: Vec<Point>,
}

pub(crate) fn facets_of_points(dim: usize, points: &[Point]) -> Result<Hull> {
    let points = dedupe(points.to_vec());
    if points.is_empty() {
        return Err(LabError::Infeasible);
    }
    let refs: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    let frame = linalg::affine_frame(&refs, dim, 1e-9);
    let k = frame.rank();
    if k > MAX_ENUM_DIM {
        return Err(LabError::Unsupported(format!("hull of affine dimension {k}")));
    }

    let mut rows = Vec::new();
    let mut local_normals: Vec<Vec<f64>> = Vec::new();
    if k > 0 {
        let local: Vec<Vec<f64>> = points.iter().map(|p| frame.to_local(p)).collect();
        let polar_rows: Vec<Halfspace> = local.iter().map(|y| Halfspace::new(Point::from(y.clone()), 1.0)).collect();
        let polar = enumerate_vertices(k, &polar_rows)?;
        for w in polar {
            let mut n = vec![0.0; dim];
            for (wi, b) in w.iter().zip(&frame.basis) {
                for (nj, bj) in n.iter_mut().zip(b) {
                    *nj += wi * bj;
                }
            }
            let offset = 1.0 + dot(&n, &frame.center);
            rows.push(Halfspace::new(Point::from(n), offset).normalized());
            local_normals.push(w.into_vec());
        }
    }
    for u in &frame.complement {
        let c = dot(u, &frame.center);
        rows.push(Halfspace::new(Point::from(u.clone()), c));
        rows.push(Halfspace::new(Point::from(u.iter().map(|x| -x).collect::<Vec<_>>()), -c));
    }

    let vertices = if k == 0 {
        vec![Point::from(frame.center.clone())]
    } else {
        let facet_rows = &rows[..local_normals.len()];
        points
            .into_iter()
            .filter(|p| {
                let scale = 1.0 + p.norm2();
                let tight: Vec<&[f64]> = facet_rows
                    .iter()
                    .zip(&local_normals)
                    .filter(|(h, _)| h.slack(p).abs() <= 1e-9 * scale)
                    .map(|(_, w)| w.as_slice())
                    .collect();
                linalg::rank(&tight, k, 1e-9) == k
            })
            .collect()
    };
    Ok(Hull { rows, vertices })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_facets() {
        let mut pts = Vec::new();
        for s in 0..8 {
            pts.push(Point::from((0..3).map(|i| if s >> i & 1 == 1 { 1.0 } else { -1.0 }).collect::<Vec<_>>()));
        }
        pts.push(Point::zeros(3));
        let h = facets_of_points(3, &pts).unwrap();
        assert_eq!(h.rows.len(), 6);
        assert_eq!(h.vertices.len(), 8);
        for r in &h.rows {
            assert!((r.offset - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point() {
        let h = facets_of_points(2, &[Point::from(vec![0.3, -0.2])]).unwrap();
        assert_eq!(h.rows.len(), 4);
        assert_eq!(h.vertices.len(), 1);
    }

    #[test]
    fn triangle_in_space() {
        let pts = vec![
            Point::from(vec![1.0, 0.0, 0.0]),
            Point::from(vec![0.0, 1.0, 0.0]),
            Point::from(vec![0.0, 0.0, 1.0]),
        ];
        let h = facets_of_points(3, &pts).unwrap();
        // three edges plus one equality pair
        assert_eq!(h.rows.len(), 5);
        assert_eq!(h.vertices.len(), 3);
        for p in &pts {
            assert!(h.rows.iter().all(|r| r.slack(p) > -1e-12));
        }
    }
}
