//! Point-to-polytope distances under the base norms and the lifted norm
//! `|t| + ‖x‖` on ℝ × X.

use std::borrow::Cow;

use super::lp::maximize;
use super::norm::NormSpec;
use super::point::{dist2, Point};
use super::polytope::{convert_rep, ConvertTarget, Halfspace, Polytope};
use super::project::project_l2;
use super::EPS_FEAS;
use crate::error::{check_dim, LabError, Result};

/// How a difference vector is measured.
///
/// `Lifted` treats coordinate 0 as the height `t` and the rest as the shadow
/// in X, giving `|t| + ‖x‖`.
#[derive(Clone, Copy, Debug)]
pub enum Metric<'a> {
    Base(&'a NormSpec),
    Lifted(&'a NormSpec),
}

impl Metric<'_> {
    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Metric::Base(n) => n.eval_unchecked(v),
            Metric::Lifted(n) => v[0].abs() + n.eval_unchecked(&v[1..]),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            Metric::Base(n) => n.fixed_dim().map_or(Ok(()), |d| check_dim(d, dim)),
            Metric::Lifted(n) => {
                if dim < 2 {
                    return Err(LabError::DimensionMismatch { expected: 2, got: dim });
                }
                n.fixed_dim().map_or(Ok(()), |d| check_dim(d + 1, dim))
            }
        }
    }

    pub fn norm(&self) -> &NormSpec {
        match self {
            Metric::Base(n) | Metric::Lifted(n) => n,
        }
    }
}

/// Minimize a unimodal function on `[lo, hi]` by golden-section search.
/// Returns `(argmin, min)`; both endpoints are also evaluated.
pub(crate) fn golden_min<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo)?);
    let fh = f(hi)?;
    if fh < best.1 {
        best = (hi, fh);
    }
    if hi - lo <= tol {
        return Ok(best);
    }
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    for (t, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (t, v);
        }
    }
    Ok(best)
}

fn rows_and_rhs(rows: &[Halfspace]) -> (Vec<Vec<f64>>, Vec<f64>) {
    (rows.iter().map(|h| h.normal.to_vec()).collect(), rows.iter().map(|h| h.offset).collect())
}

fn some_feasible_point(dim: usize, rows: &[Halfspace]) -> Result<Vec<f64>> {
    let (a, b) = rows_and_rhs(rows);
    Ok(maximize(&vec![0.0; dim], &a, &b)?.1)
}

/// Polyhedral norms as an LP: minimize the sum of epigraph variables.
fn lp_distance(x: &[f64], rows: &[Halfspace], metric: Metric) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    let mut aux = 0usize;
    let mut terms: Vec<(Vec<(usize, f64)>, f64, usize)> = Vec::new(); // Σ coef·y − s ≤ rhs
    let abs_term = |i: usize, s: usize, terms: &mut Vec<_>| {
        terms.push((vec![(i, 1.0)], x[i], s));
        terms.push((vec![(i, -1.0)], -x[i], s));
    };
    let start = match metric {
        Metric::Lifted(_) => {
            abs_term(0, aux, &mut terms);
            aux += 1;
            1
        }
        Metric::Base(_) => 0,
    };
    match metric.norm() {
        NormSpec::L1 => {
            for i in start..n {
                abs_term(i, aux, &mut terms);
                aux += 1;
            }
        }
        NormSpec::Linf => {
            for i in start..n {
                abs_term(i, aux, &mut terms);
            }
            aux += 1;
        }
        NormSpec::PolyGauge(body) => {
            for h in body.hrep().expect("validated gauge") {
                // c·(x − y)/d ≤ s
                let coefs: Vec<(usize, f64)> =
                    h.normal.iter().enumerate().map(|(j, c)| (start + j, -c / h.offset)).collect();
                let rhs = -h.normal.dot(&x[start..]) / h.offset;
                terms.push((coefs, rhs, aux));
            }
            aux += 1;
        }
        NormSpec::L2 => unreachable!("Euclidean distances use projection"),
    }
    let width = n + aux;
    for h in rows {
        let mut r = h.normal.to_vec();
        r.resize(width, 0.0);
        a.push(r);
        b.push(h.offset);
    }
    for (coefs, rhs, s) in terms {
        let mut r = vec![0.0; width];
        for (i, c) in coefs {
            r[i] += c;
        }
        r[n + s] = -1.0;
        a.push(r);
        b.push(rhs);
    }
    let mut c = vec![0.0; width];
    c[n..].iter_mut().for_each(|v| *v = -1.0);
    let (opt, arg) = maximize(&c, &a, &b)?;
    Ok(((-opt).max(0.0), arg[..n].to_vec()))
}

/// Lifted-Euclidean distance `min |x_t − y_t| + ‖x_s − y_s‖₂` over a
/// polytope: a convex 1-D search over the height of the nearest point, each
/// step a Euclidean projection onto a horizontal slice.
pub(crate) fn lifted_l2_distance_hrep(x: &[f64], rows: &[Halfspace]) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    let (a, b) = rows_and_rhs(rows);
    let mut e0 = vec![0.0; n];
    e0[0] = 1.0;
    let (_, high) = maximize(&e0, &a, &b)?;
    e0[0] = -1.0;
    let (_, low) = maximize(&e0, &a, &b)?;
    let (tl, th) = (low[0], high[0]);
    let slice_point = |tau: f64| -> Result<(f64, Vec<f64>)> {
        let lam = if th - tl > 1e-15 { ((tau - tl) / (th - tl)).clamp(0.0, 1.0) } else { 0.0 };
        let start: Vec<f64> = low.iter().zip(&high).map(|(l, h)| l + lam * (h - l)).collect();
        let slice: Vec<Halfspace> = rows
            .iter()
            .map(|h| Halfspace::new(Point::from(h.normal.as_slice()[1..].to_vec()), h.offset - h.normal[0] * start[0]))
            .collect();
        let y = project_l2(&x[1..], &slice, &start[1..])?;
        let d = (x[0] - start[0]).abs() + dist2(&x[1..], &y);
        let mut full = Vec::with_capacity(n);
        full.push(start[0]);
        full.extend(y);
        Ok((d, full))
    };
    let tol = 1e-11 * (1.0 + th.abs() + tl.abs());
    let (tau, _) = golden_min(|t| Ok(slice_point(t)?.0), tl, th, tol)?;
    slice_point(tau)
}

fn segment_distance(x: &[f64], p: &[f64], q: &[f64], metric: Metric) -> Result<(f64, Vec<f64>)> {
    let at = |s: f64| -> Vec<f64> { p.iter().zip(q).map(|(a, b)| a + s * (b - a)).collect() };
    let value = |s: f64| -> Result<f64> {
        let y = at(s);
        let v: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        Ok(metric.eval(&v))
    };
    let (s, d) = golden_min(value, 0.0, 1.0, 1e-13)?;
    Ok((d, at(s)))
}

/// Distance from `x` to `target` together with a nearest point.
pub(crate) fn distance_to_polytope(x: &[f64], target: &Polytope, metric: Metric) -> Result<(f64, Vec<f64>)> {
    check_dim(target.dim(), x.len())?;
    metric.check_dim(x.len())?;
    if target.hrep().is_some() && target.vertices().is_some_and(|v| !v.is_empty()) && target.contains_point(x, EPS_FEAS) {
        return Ok((0.0, x.to_vec()));
    }
    if let Some(vs) = target.vertices() {
        match vs {
            [] => return Err(LabError::Infeasible),
            [p] => {
                let v: Vec<f64> = x.iter().zip(p.iter()).map(|(a, b)| a - b).collect();
                return Ok((metric.eval(&v), p.to_vec()));
            }
            [p, q] => return segment_distance(x, p, q, metric),
            _ => {}
        }
    }
    let target: Cow<Polytope> = match target.hrep() {
        Some(_) => Cow::Borrowed(target),
        None => Cow::Owned(convert_rep(target, ConvertTarget::ToHalfspaces)?),
    };
    let rows = target.hrep().expect("hrep present");
    if target.contains_point(x, EPS_FEAS) {
        return Ok((0.0, x.to_vec()));
    }
    match metric {
        Metric::Base(NormSpec::L2) => {
            let start = match target.vertices() {
                Some(vs) => vs[0].to_vec(),
                None => some_feasible_point(x.len(), rows)?,
            };
            let y = project_l2(x, rows, &start)?;
            Ok((dist2(x, &y), y))
        }
        Metric::Lifted(NormSpec::L2) => lifted_l2_distance_hrep(x, rows),
        _ => lp_distance(x, rows, metric),
    }
}

/// `inf { ‖x − b‖ : b ∈ target }` under `metric`; zero for points inside.
pub fn point_to_set_distance(x: &Point, target: &Polytope, metric: Metric) -> Result<f64> {
    Ok(distance_to_polytope(x, target, metric)?.0)
}

/// Radius of the largest norm ball centred at the origin inside `b`.
pub fn inradius_at_origin(b: &Polytope, norm: &NormSpec) -> Result<f64> {
    if let Some(d) = norm.fixed_dim() {
        check_dim(d, b.dim())?;
    }
    let b: Cow<Polytope> = match b.hrep() {
        Some(_) => Cow::Borrowed(b),
        None => Cow::Owned(convert_rep(b, ConvertTarget::ToHalfspaces)?),
    };
    let mut delta = f64::INFINITY;
    for h in b.hrep().expect("hrep present") {
        let dn = norm.dual(&h.normal);
        if dn <= 1e-14 {
            if h.offset < 0.0 {
                return Err(LabError::Infeasible);
            }
            continue;
        }
        if h.offset <= EPS_FEAS * dn {
            return Err(LabError::NotInterior);
        }
        delta = delta.min(h.offset / dn);
    }
    if delta.is_infinite() {
        return Err(LabError::Unbounded);
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square() -> Polytope {
        let rows = (0..2)
            .flat_map(|i| [Halfspace::new(Point::basis(2, i), 1.0), Halfspace::new(Point::basis(2, i).scale(-1.0), 1.0)])
            .collect();
        Polytope::from_hrep(2, rows).unwrap()
    }

    fn quad() -> Polytope {
        Polytope::from_vertices(vec![
            Point::from(vec![0.0, 0.0]),
            Point::from(vec![0.5, 0.0]),
            Point::from(vec![1.0, 0.5]),
            Point::from(vec![0.5, 0.5]),
        ])
        .unwrap()
    }

    #[test]
    fn euclidean_examples() {
        let l2 = NormSpec::L2;
        let d = point_to_set_distance(&Point::from(vec![2.0, 0.0]), &square(), Metric::Base(&l2)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let d = point_to_set_distance(&Point::from(vec![2.0, 2.0]), &square(), Metric::Base(&l2)).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lifted_example() {
        let l2 = NormSpec::L2;
        let d = point_to_set_distance(&Point::from(vec![1.0, 0.0]), &quad(), Metric::Lifted(&l2)).unwrap();
        assert!((d - 0.5).abs() < 1e-9, "{d}");
        let hq = convert_rep(&quad(), ConvertTarget::ToHalfspaces).unwrap();
        let (d2, _) = lifted_l2_distance_hrep(&[1.0, 0.0], hq.hrep().unwrap()).unwrap();
        assert!((d2 - 0.5).abs() < 1e-9, "{d2}");
    }

    #[test]
    fn polyhedral_norms() {
        let x = Point::from(vec![3.0, 2.0]);
        let d1 = point_to_set_distance(&x, &square(), Metric::Base(&NormSpec::L1)).unwrap();
        let di = point_to_set_distance(&x, &square(), Metric::Base(&NormSpec::Linf)).unwrap();
        assert!((d1 - 3.0).abs() < 1e-9);
        assert!((di - 2.0).abs() < 1e-9);
        let gauge = NormSpec::poly_gauge(square().scaled(2.0)).unwrap();
        let dg = point_to_set_distance(&x, &square(), Metric::Base(&gauge)).unwrap();
        assert!((dg - 1.0).abs() < 1e-9);
        // lifted L1: |1 − 0.5| + |0 − 0.5|
        let dl = point_to_set_distance(&Point::from(vec![1.0, 0.0, 0.0]), &Polytope::singleton(&Point::from(vec![0.5, 0.5, 0.0])), Metric::Lifted(&NormSpec::L1)).unwrap();
        assert!((dl - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lifted_polyhedral_matches_lifted_euclidean_in_one_dimension() {
        let hq = convert_rep(&quad(), ConvertTarget::ToHalfspaces).unwrap();
        let hq = Polytope::from_hrep(2, hq.hrep().unwrap().to_vec()).unwrap();
        for x in [[1.0, 0.0], [2.0, -1.0], [-0.5, 0.7]] {
            let a = point_to_set_distance(&Point::from(x.to_vec()), &hq, Metric::Lifted(&NormSpec::L1)).unwrap();
            let b = point_to_set_distance(&Point::from(x.to_vec()), &hq, Metric::Lifted(&NormSpec::L2)).unwrap();
            assert!((a - b).abs() < 1e-8, "{x:?}: {a} vs {b}");
        }
    }

    #[test]
    fn empty_target() {
        let p = Polytope::from_hrep(1, vec![Halfspace::new(Point::from(vec![1.0]), 0.0), Halfspace::new(Point::from(vec![-1.0]), -1.0)]).unwrap();
        let err = point_to_set_distance(&Point::from(vec![3.0]), &p, Metric::Base(&NormSpec::L2)).unwrap_err();
        assert_eq!(err, LabError::Infeasible);
    }

    #[test]
    fn inradius_examples() {
        assert!((inradius_at_origin(&square(), &NormSpec::L2).unwrap() - 1.0).abs() < 1e-12);
        assert!((inradius_at_origin(&square(), &NormSpec::L1).unwrap() - 1.0).abs() < 1e-12);
        let tri = Polytope::from_hrep(
            2,
            vec![
                Halfspace::new(Point::from(vec![-1.0, 0.0]), 1.0),
                Halfspace::new(Point::from(vec![0.0, -1.0]), 1.0),
                Halfspace::new(Point::from(vec![1.0, 1.0]), 1.0),
            ],
        )
        .unwrap();
        assert!((inradius_at_origin(&tri, &NormSpec::L2).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let off = square().translated(&[1.0, 0.0]);
        assert_eq!(inradius_at_origin(&off, &NormSpec::L2).unwrap_err(), LabError::NotInterior);
    }

    fn norm_strategy() -> impl Strategy<Value = NormSpec> {
        prop_oneof![Just(NormSpec::L1), Just(NormSpec::L2), Just(NormSpec::Linf)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]
        #[test]
        fn zero_distance_iff_inside(x in -2.0f64..2.0, y in -2.0f64..2.0, norm in norm_strategy()) {
            let p = Point::from(vec![x, y]);
            let d = point_to_set_distance(&p, &square(), Metric::Base(&norm)).unwrap();
            let inside = square().contains_point(&p, 1e-7);
            prop_assert_eq!(d <= 1e-7, inside);
        }

        #[test]
        fn distance_is_one_lipschitz(
            a in proptest::collection::vec(-3.0f64..3.0, 2),
            b in proptest::collection::vec(-3.0f64..3.0, 2),
            norm in norm_strategy(),
            lifted in any::<bool>(),
        ) {
            let target = if lifted { convert_rep(&quad(), ConvertTarget::ToHalfspaces).unwrap() } else { square() };
            let m = if lifted { Metric::Lifted(&norm) } else { Metric::Base(&norm) };
            let da = point_to_set_distance(&Point::from(a.clone()), &target, m).unwrap();
            let db = point_to_set_distance(&Point::from(b.clone()), &target, m).unwrap();
            let diff: Vec<f64> = a.iter().zip(&b).map(|(u, v)| u - v).collect();
            prop_assert!((da - db).abs() <= m.eval(&diff) + 1e-7);
        }
    }
}
