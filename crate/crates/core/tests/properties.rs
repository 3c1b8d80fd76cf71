use conelab::catalog::{random_point_in, random_polytope};
use conelab::geometry::{convert_rep, ConvertTarget, Metric, NormSpec, Point, Polytope};
use conelab::{
    cone_over_base, estimate_one_sided, estimate_thickness, max_chord, one_sided_distance, order_interval, rho,
    thickness, Body, ConeOverBase, DistanceMode, LiftedPoint, Region, SampleBudget,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const L2: NormSpec = NormSpec::L2;

fn instance(seed: u64, dim: usize) -> (Polytope, ConeOverBase, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_polytope(&mut rng, dim, 8).unwrap();
    let cone = cone_over_base(Body::Polytope(p.clone()), L2).unwrap();
    (p, cone, rng)
}

fn same_set(a: &[Point], b: &[Point], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| p.as_slice().iter().zip(q.as_slice()).all(|(x, y)| (x - y).abs() <= tol)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn representations_round_trip(seed in any::<u64>(), dim in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng, dim, 9).unwrap();
        let rows = p.hrep().unwrap().to_vec();
        let back = convert_rep(&Polytope::from_hrep(dim, rows).unwrap(), ConvertTarget::ToVertices).unwrap();
        prop_assert!(same_set(p.vertices().unwrap(), back.vertices().unwrap(), 1e-7));
        let again = convert_rep(&Polytope::from_vertices(back.vertices().unwrap().to_vec()).unwrap(), ConvertTarget::ToHalfspaces).unwrap();
        for v in p.vertices().unwrap() {
            prop_assert!(again.contains_point(v.as_slice(), 1e-7));
        }
        prop_assert_eq!(again.vertices().unwrap().len(), p.vertices().unwrap().len());
    }

    #[test]
    fn interval_holds_its_ends(seed in any::<u64>(), dim in 1usize..=3) {
        let (p, cone, mut rng) = instance(seed, dim);
        let z = LiftedPoint::hat(&random_point_in(&mut rng, &p));
        let iv = order_interval(&cone, &z).unwrap();
        prop_assert!(iv.contains(&vec![0.0; dim + 1], 1e-9));
        prop_assert!(iv.contains(&z.to_vec(), 1e-9));
        for v in iv.vertices().unwrap() {
            prop_assert!(cone.contains(&LiftedPoint::from_slice(v.as_slice()), 1e-8).unwrap());
            let rest = z.sub(&LiftedPoint::from_slice(v.as_slice()));
            prop_assert!(cone.contains(&rest, 1e-8).unwrap());
        }
    }

    #[test]
    fn thickness_sits_between_chord_bounds(seed in any::<u64>(), dim in 1usize..=4) {
        let (p, cone, mut rng) = instance(seed, dim);
        let x = random_point_in(&mut rng, &p);
        let l = max_chord(&Body::Polytope(p.clone()), &x, &L2).unwrap();
        let th = thickness(&cone, &LiftedPoint::hat(&x)).unwrap();
        prop_assert!(th <= l + 1e-7, "thickness {} chord {}", th, l);
        prop_assert!(th >= l / 4.0 - 1e-7, "thickness {} chord {}", th, l);
    }

    #[test]
    fn hausdorff_rho_is_a_metric(seed in any::<u64>(), dim in 1usize..=3) {
        let (p, cone, mut rng) = instance(seed, dim);
        let pts: Vec<LiftedPoint> = (0..3).map(|_| LiftedPoint::hat(&random_point_in(&mut rng, &p))).collect();
        let d = |a: usize, b: usize| rho(&cone, &pts[a], &pts[b], DistanceMode::MaxHausdorff).unwrap();
        prop_assert!(d(0, 0) <= 1e-9);
        prop_assert!((d(0, 1) - d(1, 0)).abs() <= 1e-9);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-7);
    }

    #[test]
    fn sampled_values_never_exceed_exact(seed in any::<u64>(), dim in 1usize..=3) {
        let (p, cone, mut rng) = instance(seed, dim);
        let x = LiftedPoint::hat(&random_point_in(&mut rng, &p));
        let y = LiftedPoint::hat(&random_point_in(&mut rng, &p));
        let budget = SampleBudget::new(300, seed);
        let th = thickness(&cone, &x).unwrap();
        prop_assert!(estimate_thickness(&cone, &x, &budget).unwrap().value <= th + 1e-9);
        let (ix, iy) = (order_interval(&cone, &x).unwrap(), order_interval(&cone, &y).unwrap());
        let (a, b) = (Region::Interval(&ix), Region::Interval(&iy));
        let exact = one_sided_distance(&a, &b, Metric::Lifted(&L2)).unwrap();
        let est = estimate_one_sided(&a, &b, Metric::Lifted(&L2), &budget).unwrap();
        prop_assert!(est.value <= exact + 1e-9);
        prop_assert_eq!(est.value, estimate_one_sided(&a, &b, Metric::Lifted(&L2), &budget).unwrap().value);
    }
}
