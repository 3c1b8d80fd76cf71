//! Vertex enumeration by the double description method on the homogenized
//! cone `{(x, λ) : a·x − bλ ≤ 0, λ ≥ 0}`.

use super::linalg;
use super::lp::maximize;
use super::point::{dot, norm2, Point};
use super::polytope::{dedupe, Halfspace};
use crate::error::{LabError, Result};

const ZERO_TOL: f64 = 1e-9;
const LAMBDA_TOL: f64 = 1e-10;

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn contains_all(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    v: Vec<f64>,
    zeros: Bits,
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let n = norm2(&v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

/// Decide between empty and unbounded for a system whose normals do not span
/// the space (the region, if nonempty, contains a line).
fn empty_or_unbounded(dim: usize, rows: &[Halfspace]) -> LabError {
    let a: Vec<Vec<f64>> = rows.iter().map(|h| h.normal.to_vec()).collect();
    let b: Vec<f64> = rows.iter().map(|h| h.offset).collect();
    match maximize(&vec![0.0; dim], &a, &b) {
        Err(LabError::Infeasible) => LabError::Infeasible,
        _ => LabError::Unbounded,
    }
}

/// Vertices of `{x : a_i·x ≤ b_i}`. Errors with `Infeasible` for an empty
/// region and `Unbounded` when it has a recession direction.
pub(crate) fn enumerate_vertices(dim: usize, rows: &[Halfspace]) -> Result<Vec<Point>> {
    let big = dim + 1;
    let mut gens: Vec<Vec<f64>> = Vec::with_capacity(rows.len() + 1);
    let mut kept: Vec<Halfspace> = Vec::with_capacity(rows.len());
    let mut lambda_row = vec![0.0; big];
    lambda_row[dim] = -1.0;
    gens.push(lambda_row);
    for h in rows {
        let n = h.normal.norm2();
        if n <= 1e-14 {
            if h.offset < -ZERO_TOL {
                return Err(LabError::Infeasible);
            }
            continue;
        }
        let mut g: Vec<f64> = h.normal.iter().map(|a| a / n).collect();
        g.push(-h.offset / n);
        gens.push(unit(g));
        kept.push(h.clone());
    }
    let m = gens.len();

    // Greedy choice of `big` independent generators, λ ≥ 0 first.
    let mut basis: Vec<usize> = Vec::with_capacity(big);
    for i in 0..m {
        let mut trial: Vec<&[f64]> = basis.iter().map(|&j| gens[j].as_slice()).collect();
        trial.push(&gens[i]);
        if linalg::rank(&trial, big, 1e-10) == trial.len() {
            basis.push(i);
            if basis.len() == big {
                break;
            }
        }
    }
    if basis.len() < big {
        return Err(empty_or_unbounded(dim, &kept));
    }

    let inv = {
        let mat = nalgebra::DMatrix::from_fn(big, big, |i, j| gens[basis[i]][j]);
        mat.try_inverse().ok_or(LabError::Convergence { residual: f64::NAN })?
    };
    let mut rays: Vec<Ray> = (0..big)
        .map(|j| {
            let v = unit((0..big).map(|i| -inv[(i, j)]).collect());
            let mut zeros = Bits::new(m);
            for (k, &b) in basis.iter().enumerate() {
                if k != j {
                    zeros.set(b);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    let mut in_basis = vec![false; m];
    basis.iter().for_each(|&b| in_basis[b] = true);

    for row in 0..m {
        if in_basis[row] {
            continue;
        }
        let g = &gens[row];
        let s: Vec<f64> = rays.iter().map(|r| dot(g, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| s[k] > ZERO_TOL).collect();
        if pos.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if s[k].abs() <= ZERO_TOL {
                    r.zeros.set(row);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| s[k] < -ZERO_TOL).collect();
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                let c = common.count();
                if c + 2 < big {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(k, r)| {
                    k == p || k == n || r.zeros.count() < c || !r.zeros.contains_all(&common)
                });
                if !adjacent {
                    continue;
                }
                let v: Vec<f64> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(rn, rp)| s[p] * rn - s[n] * rp)
                    .collect();
                let mut zeros = common;
                zeros.set(row);
                fresh.push(Ray { v: unit(v), zeros });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if s[k] > ZERO_TOL {
                continue;
            }
            if s[k] >= -ZERO_TOL {
                r.zeros.set(row);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
        in_basis[row] = true;
    }

    let mut vertices = Vec::new();
    let mut recession = false;
    for r in &rays {
        let lam = r.v[dim];
        if lam > LAMBDA_TOL {
            vertices.push(r.v[..dim].iter().map(|x| x / lam).collect::<Vec<f64>>());
        } else {
            recession = true;
        }
    }
    if vertices.is_empty() {
        return Err(LabError::Infeasible);
    }
    if recession {
        return Err(LabError::Unbounded);
    }
    let polished = vertices.into_iter().map(|v| Point::from(polish(&kept, v))).collect();
    Ok(dedupe(polished))
}

/// Snap a vertex onto the rows it is (nearly) tight at by a minimum-norm
/// least-squares correction.
fn polish(rows: &[Halfspace], x: Vec<f64>) -> Vec<f64> {
    let scale = 1.0 + norm2(&x);
    let tight: Vec<&Halfspace> = rows
        .iter()
        .filter(|h| (h.normal.dot(&x) - h.offset).abs() <= 1e-7 * scale * h.normal.norm2())
        .collect();
    if tight.is_empty() {
        return x;
    }
    let a: Vec<&[f64]> = tight.iter().map(|h| h.normal.as_slice()).collect();
    let r: Vec<f64> = tight.iter().map(|h| h.offset - h.normal.dot(&x)).collect();
    let Some(delta) = linalg::least_squares(&a, x.len(), &r).filter(|d| norm2(d) <= 1e-6 * scale) else {
        return x;
    };
    let y: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + b).collect();
    // A row that only looks tight can drag the point off the true vertex.
    let violation = |p: &[f64]| rows.iter().map(|h| h.normal.dot(p) - h.offset).fold(0.0_f64, f64::max);
    if violation(&y) <= violation(&x) {
        y
    } else {
        x
    }
}

/// Reference enumeration: solve every `dim`-subset of rows and keep the
/// feasible solutions. Exponential; only for cross-checking.
#[cfg(test)]
pub(crate) fn brute_force_vertices(dim: usize, rows: &[Halfspace]) -> Vec<Point> {
    fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            subsets(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut combos = Vec::new();
    subsets(rows.len(), dim, 0, &mut Vec::new(), &mut combos);
    let mut out = Vec::new();
    for c in combos {
        let a: Vec<&[f64]> = c.iter().map(|&i| rows[i].normal.as_slice()).collect();
        if linalg::rank(&a, dim, 1e-10) < dim {
            continue;
        }
        let b: Vec<f64> = c.iter().map(|&i| rows[i].offset).collect();
        if let Some(x) = linalg::solve_square(&a, &b) {
            if rows.iter().all(|h| h.normal.dot(&x) <= h.offset + 1e-9 * (1.0 + norm2(&x))) {
                out.push(Point::from(x));
            }
        }
    }
    dedupe(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point::dist2;
    use proptest::prelude::*;

    fn same_set(a: &[Point], b: &[Point], tol: f64) -> bool {
        a.len() == b.len()
            && a.iter().all(|p| b.iter().any(|q| dist2(p, q) < tol))
            && b.iter().all(|p| a.iter().any(|q| dist2(p, q) < tol))
    }

    fn cube(d: usize) -> Vec<Halfspace> {
        (0..d)
            .flat_map(|i| [Halfspace::new(Point::basis(d, i), 1.0), Halfspace::new(Point::basis(d, i).scale(-1.0), 1.0)])
            .collect()
    }

    #[test]
    fn cube_has_two_to_the_d_vertices() {
        for d in 1..=6 {
            let vs = enumerate_vertices(d, &cube(d)).unwrap();
            assert_eq!(vs.len(), 1 << d, "dimension {d}");
        }
    }

    #[test]
    fn cross_polytope() {
        // |x|+|y|+|z| ≤ 1 written with 8 rows
        let mut rows = Vec::new();
        for s in 0..8 {
            let n: Vec<f64> = (0..3).map(|i| if s >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            rows.push(Halfspace::new(Point::from(n), 1.0));
        }
        let vs = enumerate_vertices(3, &rows).unwrap();
        assert_eq!(vs.len(), 6);
        assert!(same_set(&vs, &brute_force_vertices(3, &rows), 1e-9));
    }

    #[test]
    fn redundant_and_degenerate_rows() {
        // square pyramid: apex is degenerate (4 tight facets in 3D)
        let rows = vec![
            Halfspace::new(Point::from(vec![0.0, 0.0, -1.0]), 0.0),
            Halfspace::new(Point::from(vec![1.0, 0.0, 1.0]), 1.0),
            Halfspace::new(Point::from(vec![-1.0, 0.0, 1.0]), 1.0),
            Halfspace::new(Point::from(vec![0.0, 1.0, 1.0]), 1.0),
            Halfspace::new(Point::from(vec![0.0, -1.0, 1.0]), 1.0),
            Halfspace::new(Point::from(vec![0.0, 0.0, 1.0]), 5.0),
        ];
        let vs = enumerate_vertices(3, &rows).unwrap();
        assert_eq!(vs.len(), 5);
        assert!(same_set(&vs, &brute_force_vertices(3, &rows), 1e-9));
    }

    #[test]
    fn flat_region_in_space() {
        // a triangle in the plane z = 0 written with an equality pair
        let rows = vec![
            Halfspace::new(Point::from(vec![0.0, 0.0, 1.0]), 0.0),
            Halfspace::new(Point::from(vec![0.0, 0.0, -1.0]), 0.0),
            Halfspace::new(Point::from(vec![-1.0, 0.0, 0.0]), 0.0),
            Halfspace::new(Point::from(vec![0.0, -1.0, 0.0]), 0.0),
            Halfspace::new(Point::from(vec![1.0, 1.0, 0.0]), 1.0),
        ];
        let vs = enumerate_vertices(3, &rows).unwrap();
        assert_eq!(vs.len(), 3);
    }

    #[test]
    fn line_through_region_is_unbounded() {
        let rows = vec![Halfspace::new(Point::from(vec![1.0, 0.0]), 1.0), Halfspace::new(Point::from(vec![-1.0, 0.0]), 1.0)];
        assert_eq!(enumerate_vertices(2, &rows).unwrap_err(), LabError::Unbounded);
        let rows = vec![Halfspace::new(Point::from(vec![1.0, 0.0]), -1.0), Halfspace::new(Point::from(vec![-1.0, 0.0]), -1.0)];
        assert_eq!(enumerate_vertices(2, &rows).unwrap_err(), LabError::Infeasible);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_brute_force(
            dirs in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 3), 4..12),
            offs in proptest::collection::vec(0.2f64..1.5, 12),
        ) {
            let mut rows = cube(3).into_iter().map(|h| Halfspace::new(h.normal.scale(1.0), 2.0)).collect::<Vec<_>>();
            for (d, o) in dirs.iter().zip(&offs) {
                if norm2(d) > 1e-3 {
                    rows.push(Halfspace::new(Point::from(d.clone()), *o));
                }
            }
            let fast = enumerate_vertices(3, &rows).unwrap();
            let slow = brute_force_vertices(3, &rows);
            prop_assert!(same_set(&fast, &slow, 1e-7), "{} vs {}", fast.len(), slow.len());
        }
    }
}
