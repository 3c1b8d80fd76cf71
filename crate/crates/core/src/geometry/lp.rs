//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves `maximize c·x  subject to  A x ≤ b` over free variables. Free
//! variables are split as `x = x⁺ − x⁻`; rows with negative right-hand side
//! get an artificial variable for phase one. Bland's rule makes the pivot
//! sequence (and hence the result) a deterministic function of the input.

use super::linalg;
use super::point::{dot, Point};
use super::polytope::Polytope;
use crate::error::{check_dim, LabError, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;

/// Optimum of a linear program together with an attaining vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub optimum: f64,
    pub argmax: Point,
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.at(pr, pc);
        for c in 0..w {
            self.data[pr * w + c] /= p;
        }
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.data[pr * w + c];
                if v != 0.0 {
                    self.data[r * w + c] -= f * v;
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Rebuild the objective row `z_j − c_j` for the given column costs.
    fn set_objective(&mut self, costs: &[f64]) {
        let w = self.width;
        let obj = self.rows;
        for c in 0..w {
            let mut z = 0.0;
            for r in 0..self.rows {
                z += costs[self.basis[r]] * self.at(r, c);
            }
            let cj = if c < costs.len() { costs[c] } else { 0.0 };
            self.data[obj * w + c] = z - cj;
        }
        // the rhs entry holds the objective value itself
        let mut val = 0.0;
        for r in 0..self.rows {
            val += costs[self.basis[r]] * self.at(r, self.rhs_col());
        }
        let rc = self.rhs_col();
        self.data[obj * w + rc] = val;
    }

    fn run(&mut self, allowed: &[bool]) -> Result<()> {
        let rhs = self.rhs_col();
        for _ in 0..MAX_PIVOTS {
            let obj = self.rows;
            let entering = (0..rhs).find(|&c| allowed[c] && self.at(obj, c) < -COST_TOL);
            let Some(pc) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.at(r, rhs).max(0.0) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-12 * (1.0 + bratio.abs())
                                || (ratio <= bratio + 1e-12 * (1.0 + bratio.abs())
                                    && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Err(LabError::Unbounded),
                Some((pr, _)) => self.pivot(pr, pc),
            }
        }
        Err(LabError::Convergence { residual: f64::NAN })
    }
}

/// Solve `maximize c·x s.t. rows[i]·x ≤ rhs[i]` with free variables.
///
/// Returns the optimal value and a basic optimal solution. The feasible region
/// may be unbounded as long as the objective is bounded above.
pub(crate) fn maximize(c: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = c.len();
    // Normalize rows and drop trivial ones.
    let mut a_rows: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    let mut b: Vec<f64> = Vec::with_capacity(rows.len());
    for (row, &bi) in rows.iter().zip(rhs) {
        check_dim(n, row.len())?;
        let scale = row.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            if bi < -1e-12 {
                return Err(LabError::Infeasible);
            }
            continue;
        }
        a_rows.push(row.iter().map(|v| v / scale).collect());
        b.push(bi / scale);
    }
    let m = a_rows.len();
    if m == 0 {
        if c.iter().any(|v| v.abs() > 0.0) {
            return Err(LabError::Unbounded);
        }
        return Ok((0.0, vec![0.0; n]));
    }
    let art_rows: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
    let k = art_rows.len();
    let ncols = 2 * n + m + k;
    let width = ncols + 1;
    let mut data = vec![0.0; (m + 1) * width];
    let mut basis = vec![0usize; m];
    let mut art_index = 0;
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[i * width + j] = sign * a_rows[i][j];
            data[i * width + n + j] = -sign * a_rows[i][j];
        }
        data[i * width + 2 * n + i] = sign;
        data[i * width + ncols] = sign * b[i];
        if b[i] < 0.0 {
            let col = 2 * n + m + art_index;
            data[i * width + col] = 1.0;
            basis[i] = col;
            art_index += 1;
        } else {
            basis[i] = 2 * n + i;
        }
    }
    let mut tab = Tableau { rows: m, width, data, basis };
    let is_art = |c: usize| c >= 2 * n + m && c < ncols;

    if k > 0 {
        let mut costs = vec![0.0; ncols];
        for c in (2 * n + m)..ncols {
            costs[c] = -1.0;
        }
        tab.set_objective(&costs);
        tab.run(&vec![true; ncols])?;
        let phase1 = tab.at(m, ncols);
        if phase1 < -1e-9 {
            return Err(LabError::Infeasible);
        }
        // Drive remaining artificials out of the basis.
        for r in 0..m {
            if is_art(tab.basis[r]) {
                if let Some(pc) = (0..2 * n + m).find(|&c| tab.at(r, c).abs() > 1e-9) {
                    tab.pivot(r, pc);
                }
            }
        }
    }

    let mut costs = vec![0.0; ncols];
    for j in 0..n {
        costs[j] = c[j];
        costs[n + j] = -c[j];
    }
    tab.set_objective(&costs);
    let allowed: Vec<bool> = (0..ncols).map(|c| !is_art(c)).collect();
    tab.run(&allowed)?;

    let mut x = vec![0.0; n];
    for r in 0..m {
        let col = tab.basis[r];
        let val = tab.at(r, ncols);
        if col < n {
            x[col] += val;
        } else if col < 2 * n {
            x[col - n] -= val;
        }
    }
    Ok((dot(c, &x), x))
}

/// Maximize `objective · x` over the H-representation of `region`.
///
/// The returned argmax is a vertex: a basic optimal solution is purified by
/// moving along null directions of the tight rows until they have full rank.
pub fn solve_lp(objective: &Point, region: &Polytope) -> Result<LpSolution> {
    let rows = region
        .hrep()
        .ok_or_else(|| LabError::Unsupported("solve_lp needs an H-representation".into()))?;
    check_dim(region.dim(), objective.dim())?;
    let a: Vec<Vec<f64>> = rows.iter().map(|h| h.normal.as_slice().to_vec()).collect();
    let b: Vec<f64> = rows.iter().map(|h| h.offset).collect();
    let (_, mut x) = maximize(objective, &a, &b)?;
    purify(&a, &b, &mut x)?;
    Ok(LpSolution { optimum: dot(objective, &x), argmax: Point::from(x) })
}

fn purify(a: &[Vec<f64>], b: &[f64], x: &mut [f64]) -> Result<()> {
    let n = x.len();
    for _ in 0..=n {
        let tight: Vec<&[f64]> = a
            .iter()
            .zip(b)
            .filter(|(row, bi)| (dot(row, x) - **bi).abs() <= 1e-9 * (1.0 + bi.abs()))
            .map(|(row, _)| row.as_slice())
            .collect();
        let null = linalg::null_space(&tight, n, 1e-10);
        let Some(d) = null.first() else {
            return Ok(());
        };
        let mut moved = false;
        for sign in [1.0, -1.0] {
            let mut step = f64::INFINITY;
            for (row, bi) in a.iter().zip(b) {
                let ad = sign * dot(row, d);
                if ad > 1e-12 {
                    step = step.min(((bi - dot(row, x)) / ad).max(0.0));
                }
            }
            if step.is_finite() {
                for (xi, di) in x.iter_mut().zip(d) {
                    *xi += sign * step * di;
                }
                moved = true;
                break;
            }
        }
        if !moved {
            return Err(LabError::Unbounded);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_rows(d: usize, r: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..d {
            for s in [1.0, -1.0] {
                let mut row = vec![0.0; d];
                row[i] = s;
                a.push(row);
                b.push(r);
            }
        }
        (a, b)
    }

    #[test]
    fn box_corner() {
        let (a, b) = box_rows(2, 1.0);
        let (v, x) = maximize(&[1.0, 1.0], &a, &b).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_region() {
        let a = vec![vec![1.0], vec![-1.0]];
        let b = vec![0.0, -1.0];
        assert_eq!(maximize(&[1.0], &a, &b), Err(LabError::Infeasible));
    }

    #[test]
    fn unbounded_objective() {
        let a = vec![vec![-1.0]];
        let b = vec![0.0];
        assert_eq!(maximize(&[1.0], &a, &b), Err(LabError::Unbounded));
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // 2 ≤ x ≤ 3, 1 ≤ y ≤ 4; maximize -x - y -> (2, 1)
        let a = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let b = vec![3.0, -2.0, 4.0, -1.0];
        let (v, x) = maximize(&[-1.0, -1.0], &a, &b).unwrap();
        assert!((v + 3.0).abs() < 1e-12);
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purified_argmax_is_vertex() {
        let (a, b) = box_rows(3, 1.0);
        let p = Polytope::from_hrep(
            3,
            a.iter()
                .zip(&b)
                .map(|(r, o)| super::super::Halfspace::new(Point::from(r.clone()), *o))
                .collect(),
        )
        .unwrap();
        let sol = solve_lp(&Point::from(vec![0.0, 0.0, 1.0]), &p).unwrap();
        assert!((sol.optimum - 1.0).abs() < 1e-12);
        for c in sol.argmax.iter() {
            assert!((c.abs() - 1.0).abs() < 1e-12, "{:?}", sol.argmax);
        }
    }

    #[test]
    fn deterministic() {
        let a = vec![vec![1.0, 2.0], vec![3.0, -1.0], vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]];
        let b = vec![4.0, 6.0, 0.0, 0.0, 3.0];
        let r1 = maximize(&[1.0, 1.0], &a, &b).unwrap();
        let r2 = maximize(&[1.0, 1.0], &a, &b).unwrap();
        assert_eq!(r1.0.to_bits(), r2.0.to_bits());
        assert_eq!(r1.1, r2.1);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn strong_duality(
            n in 1usize..=4,
            extra in proptest::collection::vec((proptest::collection::vec(-1.0f64..1.0, 4), 0.1f64..2.0), 0..4),
            c in proptest::collection::vec(-1.0f64..1.0, 4),
        ) {
            let (mut a, mut b) = box_rows(n, 1.5);
            for (row, off) in &extra {
                a.push(row[..n].to_vec());
                b.push(*off);
            }
            let c = &c[..n];
            let (primal, _) = maximize(c, &a, &b).unwrap();
            // min b·y  s.t.  Aᵀy = c, y ≥ 0
            let m = a.len();
            let mut da = Vec::new();
            let mut db = Vec::new();
            for j in 0..n {
                let col: Vec<f64> = a.iter().map(|r| r[j]).collect();
                da.push(col.clone());
                db.push(c[j]);
                da.push(col.iter().map(|v| -v).collect());
                db.push(-c[j]);
            }
            for i in 0..m {
                let mut row = vec![0.0; m];
                row[i] = -1.0;
                da.push(row);
                db.push(0.0);
            }
            let neg_b: Vec<f64> = b.iter().map(|v| -v).collect();
            let (dual, _) = maximize(&neg_b, &da, &db).unwrap();
            proptest::prop_assert!((primal + dual).abs() < 1e-7, "{} vs {}", primal, -dual);
        }
    }
}
