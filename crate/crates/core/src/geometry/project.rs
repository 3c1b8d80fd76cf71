//! Euclidean projection onto `{y : a_i·y ≤ b_i}` by a primal active-set
//! method started from a feasible point.

use super::linalg;
use super::point::{dot, norm2};
use super::polytope::Halfspace;
use crate::error::{LabError, Result};

const MAX_ITER: usize = 10_000;

/// Nearest point of the region to `x` in the Euclidean norm.
///
/// `start` must be feasible (within a small tolerance). The working set is
/// kept linearly independent, so every equality-constrained step is a
/// well-posed least-squares problem.
pub(crate) fn project_l2(x: &[f64], rows: &[Halfspace], start: &[f64]) -> Result<Vec<f64>> {
    let rows: Vec<Halfspace> = rows.iter().filter(|h| h.normal.norm2() > 1e-14).map(|h| h.normalized()).collect();
    let n = x.len();
    let scale = 1.0 + norm2(x) + norm2(start);
    let tight_tol = 1e-10 * scale;
    let mut y = start.to_vec();
    let mut work: Vec<usize> = Vec::new();
    for (i, h) in rows.iter().enumerate() {
        if h.slack(&y) <= tight_tol && work.len() < n {
            let mut trial: Vec<&[f64]> = work.iter().map(|&j| rows[j].normal.as_slice()).collect();
            trial.push(&h.normal);
            if linalg::rank(&trial, n, 1e-10) == trial.len() {
                work.push(i);
            }
        }
    }

    let mut last_residual = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let g: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let a: Vec<&[f64]> = work.iter().map(|&j| rows[j].normal.as_slice()).collect();
        let mu = if a.is_empty() {
            Vec::new()
        } else {
            linalg::gram_solve(&a, &g).ok_or(LabError::Convergence { residual: last_residual })?
        };
        let mut p: Vec<f64> = g.iter().map(|v| -v).collect();
        for (m, ai) in mu.iter().zip(&a) {
            for (pj, aj) in p.iter_mut().zip(ai.iter()) {
                *pj += m * aj;
            }
        }
        let step = norm2(&p);
        last_residual = step;
        if step <= 1e-11 * scale {
            // KKT multipliers are −μ; drop the most negative one, if any.
            let (worst, val) = mu
                .iter()
                .enumerate()
                .map(|(k, m)| (k, -m))
                .fold((usize::MAX, -1e-12 * scale), |acc, (k, l)| if l < acc.1 { (k, l) } else { acc });
            if worst == usize::MAX || val >= -1e-12 * scale {
                return Ok(y);
            }
            work.remove(worst);
            continue;
        }
        let mut alpha = 1.0;
        let mut block = None;
        for (i, h) in rows.iter().enumerate() {
            if work.contains(&i) {
                continue;
            }
            let ap = dot(&h.normal, &p);
            if ap > 1e-14 {
                let r = (h.slack(&y)).max(0.0) / ap;
                if r < alpha {
                    alpha = r;
                    block = Some(i);
                }
            }
        }
        for (yi, pi) in y.iter_mut().zip(&p) {
            *yi += alpha * pi;
        }
        if let Some(b) = block {
            work.push(b);
        }
    }
    if last_residual <= 1e-8 * scale {
        return Ok(y);
    }
    Err(LabError::Convergence { residual: last_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn square() -> Vec<Halfspace> {
        (0..2)
            .flat_map(|i| [Halfspace::new(Point::basis(2, i), 1.0), Halfspace::new(Point::basis(2, i).scale(-1.0), 1.0)])
            .collect()
    }

    #[test]
    fn projections_onto_square() {
        let y = project_l2(&[2.0, 0.0], &square(), &[0.0, 0.0]).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-12 && y[1].abs() < 1e-12);
        let y = project_l2(&[2.0, 2.0], &square(), &[-1.0, -1.0]).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-12 && (y[1] - 1.0).abs() < 1e-12);
        let y = project_l2(&[0.3, -0.2], &square(), &[1.0, 1.0]).unwrap();
        assert!((y[0] - 0.3).abs() < 1e-12 && (y[1] + 0.2).abs() < 1e-12);
    }

    #[test]
    fn projection_onto_triangle_edge() {
        let rows = vec![
            Halfspace::new(Point::from(vec![-1.0, 0.0]), 1.0),
            Halfspace::new(Point::from(vec![0.0, -1.0]), 1.0),
            Halfspace::new(Point::from(vec![1.0, 1.0]), 1.0),
        ];
        let y = project_l2(&[1.0, 1.0], &rows, &[-1.0, -1.0]).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-12 && (y[1] - 0.5).abs() < 1e-12);
    }
}
