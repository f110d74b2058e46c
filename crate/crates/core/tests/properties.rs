use num_complex::Complex64;
use proptest::prelude::*;

use diastasis::ball::{self, BallPoint, MobiusIsometry};
use diastasis::barycentre::{solve_barycentre, BarycentreProblem, DiscreteMeasure, ProblemFile};
use diastasis::domains::{omega1_diastasis, omega1_distance, DomainMatrixPoint, Omega1Isometry};
use diastasis::numerics::{sample_ball, sample_omega1, sample_unitary, seeded_rng};
use diastasis::{Geometry, GeometryPoint};

/// Ball point from raw coordinates, shrunk radially into `|z| <= 0.9`.
fn ball_point(raw: &[(f64, f64)]) -> BallPoint {
    let z: Vec<Complex64> = raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let scale = if norm > 0.9 { 0.9 / norm } else { 1.0 };
    BallPoint::new(z.into_iter().map(|c| c * scale).collect()).unwrap()
}

fn coords(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn diastasis_is_symmetric_and_nonnegative(a in coords(2), b in coords(2)) {
        let (w, z) = (ball_point(&a), ball_point(&b));
        let d1 = ball::diastasis(&w, &z).unwrap();
        let d2 = ball::diastasis(&z, &w).unwrap();
        prop_assert!(d1 >= 0.0);
        prop_assert!((d1 - d2).abs() <= 1e-12 * d1.max(1.0));
    }

    #[test]
    fn distance_satisfies_triangle_inequality(a in coords(3), b in coords(3), c in coords(3)) {
        let (x, y, z) = (ball_point(&a), ball_point(&b), ball_point(&c));
        let xy = ball::distance(&x, &y).unwrap();
        let yz = ball::distance(&y, &z).unwrap();
        let xz = ball::distance(&x, &z).unwrap();
        prop_assert!(xz <= xy + yz + 1e-10);
    }

    #[test]
    fn mobius_round_trip_and_invariance(a in coords(2), b in coords(2), c in coords(2), seed in any::<u64>()) {
        let center = ball_point(&a);
        let g = MobiusIsometry::with_unitary(center, sample_unitary(&mut seeded_rng(seed), 2)).unwrap();
        let (z, w) = (ball_point(&b), ball_point(&c));
        let back = g.inverse_apply(&g.apply(&z).unwrap()).unwrap();
        prop_assert!((back.to_real() - z.to_real()).amax() <= 1e-10);
        let d = ball::diastasis(&w, &z).unwrap();
        let moved = ball::diastasis(&g.apply(&w).unwrap(), &g.apply(&z).unwrap()).unwrap();
        prop_assert!((d - moved).abs() <= 1e-9 * d.max(1.0));
    }

    #[test]
    fn problem_file_round_trip(k in 1usize..6, seed in any::<u64>(), t in 0.0..1.0f64) {
        let mut rng = seeded_rng(seed);
        let atoms = (0..k).map(|i| (sample_ball(&mut rng, 2, 0.9).unwrap(), 0.5 + i as f64)).collect();
        let images = (0..k).map(|_| sample_ball(&mut rng, 2, 0.9).unwrap()).collect();
        let anchor = sample_ball(&mut rng, 2, 0.9).unwrap();
        let p = BarycentreProblem::new(DiscreteMeasure::new(atoms).unwrap(), images, t, anchor).unwrap().with_exponent(3.0);
        let text = ProblemFile::from_problem(&p).to_json();
        let back = ProblemFile::from_json(&text).unwrap().to_problem().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn barycentre_of_rotated_cloud_is_rotated(seed in any::<u64>(), k in 1usize..8) {
        let mut rng = seeded_rng(seed);
        let pts: Vec<BallPoint> = (0..k).map(|_| sample_ball(&mut rng, 2, 0.8).unwrap()).collect();
        let g = MobiusIsometry::with_unitary(BallPoint::origin(2), sample_unitary(&mut rng, 2)).unwrap();
        let solve = |pts: Vec<BallPoint>| {
            let p = BarycentreProblem::plain(DiscreteMeasure::uniform(pts).unwrap());
            solve_barycentre(&p, 1e-12, 200).unwrap().point
        };
        let x = solve(pts.clone());
        let rotated = solve(pts.iter().map(|p| g.apply(p).unwrap()).collect());
        prop_assert!(ball::distance(&g.apply(&x).unwrap(), &rotated).unwrap() <= 1e-8);
    }

    #[test]
    fn omega1_mobius_preserves_distance(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let z = sample_omega1(&mut rng, 2, 0.9).unwrap();
        let w = sample_omega1(&mut rng, 2, 0.9).unwrap();
        let c = sample_omega1(&mut rng, 2, 0.9).unwrap();
        let g = Omega1Isometry::with_rotation(&c, sample_unitary(&mut rng, 2), sample_unitary(&mut rng, 2)).unwrap();
        let d = omega1_distance(&z, &w).unwrap();
        let moved = omega1_distance(&g.apply(&z).unwrap(), &g.apply(&w).unwrap()).unwrap();
        prop_assert!((d - moved).abs() <= 1e-9 * d.max(1.0));
    }
}

#[test]
fn geometry_names_round_trip() {
    for g in [Geometry::Ball { n: 3 }, Geometry::Polydisc { r: 2 }, Geometry::Omega1 { m: 2 }] {
        assert_eq!(g.to_string().parse::<Geometry>().unwrap(), g);
    }
    assert!("ball0".parse::<Geometry>().is_err());
    assert!("disc2".parse::<Geometry>().is_err());
}

#[test]
fn dispatch_agrees_with_model_functions() {
    let mut rng = seeded_rng(5);
    let z = sample_omega1(&mut rng, 2, 0.9).unwrap();
    let w = DomainMatrixPoint::zero(2);
    let p = GeometryPoint::from_real(Geometry::Omega1 { m: 2 }, z.to_real().as_slice()).unwrap();
    let q = GeometryPoint::from_real(Geometry::Omega1 { m: 2 }, w.to_real().as_slice()).unwrap();
    let d = diastasis::geometry::diastasis(&q, &p).unwrap();
    assert!((d - omega1_diastasis(&w, &z).unwrap()).abs() < 1e-14);
}

#[test]
fn points_on_or_outside_the_boundary_are_rejected() {
    assert!(BallPoint::new(vec![Complex64::new(1.0, 0.0)]).is_err());
    assert!(BallPoint::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
    assert!(GeometryPoint::from_real(Geometry::Ball { n: 2 }, &[0.1, 0.1]).is_err());
    assert!(GeometryPoint::from_real(Geometry::Polydisc { r: 2 }, &[0.1, 0.1, 1.0, 0.0]).is_err());
}
