//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

fn matrix_from_rows(rows: &[&[f64]], dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j])
}

/// Numerical rank of the matrix whose rows are given.
pub(crate) fn rank(rows: &[&[f64]], dim: usize, tol: f64) -> usize {
    if rows.is_empty() || dim == 0 {
        return 0;
    }
    let m = matrix_from_rows(rows, dim);
    let sv = m.singular_values();
    let scale = sv.iter().cloned().fold(1.0_f64, f64::max);
    sv.iter().filter(|s| **s > tol * scale).count()
}

/// Orthonormal basis of the null space of the given rows (vectors in ℝ^dim).
pub(crate) fn null_space(rows: &[&[f64]], dim: usize, tol: f64) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return (0..dim)
            .map(|i| {
                let mut v = vec![0.0; dim];
                v[i] = 1.0;
                v
            })
            .collect();
    }
    // Pad with zero rows so the SVD yields a full set of right singular vectors.
    let nrows = rows.len().max(dim);
    let m = DMatrix::from_fn(nrows, dim, |i, j| if i < rows.len() { rows[i][j] } else { 0.0 });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let scale = svd.singular_values.iter().cloned().fold(1.0_f64, f64::max);
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol * scale {
            out.push(vt.row(k).iter().cloned().collect());
        }
    }
    out
}

/// Affine hull of a point cloud: centroid, orthonormal spanning directions and
/// an orthonormal basis of the orthogonal complement.
#[derive(Debug, Clone)]
pub(crate) struct AffineFrame {
    pub center: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub complement: Vec<Vec<f64>>,
}

impl AffineFrame {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn to_local(&self, x: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| b.iter().zip(x).zip(&self.center).map(|((bi, xi), ci)| bi * (xi - ci)).sum())
            .collect()
    }
}

pub(crate) fn affine_frame(points: &[&[f64]], dim: usize, tol: f64) -> AffineFrame {
    let n = points.len().max(1) as f64;
    let mut center = vec![0.0; dim];
    for p in points {
        for (c, x) in center.iter_mut().zip(p.iter()) {
            *c += x / n;
        }
    }
    let nrows = points.len().max(dim);
    let m = DMatrix::from_fn(nrows, dim, |i, j| {
        if i < points.len() {
            points[i][j] - center[j]
        } else {
            0.0
        }
    });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let spread = points
        .iter()
        .map(|p| p.iter().map(|x| x.abs()).fold(0.0, f64::max))
        .fold(1.0, f64::max);
    let mut basis = Vec::new();
    let mut complement = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        let row: Vec<f64> = vt.row(k).iter().cloned().collect();
        if *s > tol * spread {
            basis.push(row);
        } else {
            complement.push(row);
        }
    }
    AffineFrame { center, basis, complement }
}

#[cfg(test)]
/// Solve the square system `rows · x = rhs`; `None` when singular.
pub(crate) fn solve_square(rows: &[&[f64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let d = rhs.len();
    let m = matrix_from_rows(rows, d);
    let b = DVector::from_column_slice(rhs);
    m.lu().solve(&b).map(|x| x.iter().cloned().collect())
}

/// Least-squares solution of `rows · x ≈ rhs` via SVD.
pub(crate) fn least_squares(rows: &[&[f64]], dim: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    let m = matrix_from_rows(rows, dim);
    let b = DVector::from_column_slice(rhs);
    let svd = m.svd(true, true);
    svd.solve(&b, 1e-12).ok().map(|x| x.iter().cloned().collect())
}

/// Solve `(R Rᵀ) μ = R r` for the Gram system of independent rows `R`.
pub(crate) fn gram_solve(rows: &[&[f64]], r: &[f64]) -> Option<Vec<f64>> {
    let k = rows.len();
    let g = DMatrix::from_fn(k, k, |i, j| super::point::dot(rows[i], rows[j]));
    let rhs = DVector::from_fn(k, |i, _| super::point::dot(rows[i], r));
    match g.clone().cholesky() {
        Some(ch) => Some(ch.solve(&rhs).iter().cloned().collect()),
        None => g.lu().solve(&rhs).map(|x| x.iter().cloned().collect()),
    }
}
