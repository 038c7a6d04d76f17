use certhom::io::{parse_system, serialize_system, SystemFile};
use certhom::poly::kernel_poly;
use certhom::projective::{condition_mu, projective_newton_step};
use certhom::rng::stream;
use certhom::start::{random_initial_pair, sample_sphere};
use certhom::{riemann_distance, DegreeVector, HomoPoly, PolySystem, ProjectivePoint, C64};
use proptest::prelude::*;

fn degrees() -> impl Strategy<Value = Vec<u32>> {
    prop_oneof![
        (1u32..=6).prop_map(|d| vec![d]),
        (1u32..=3, 1u32..=3).prop_map(|(a, b)| vec![a, b]),
        (1u32..=2, 1u32..=2, 1u32..=2).prop_map(|(a, b, c)| vec![a, b, c]),
    ]
}

fn system(d: &[u32], seed: u64) -> PolySystem {
    sample_sphere(
        &DegreeVector::new(d.to_vec()).unwrap(),
        &mut stream(seed, 200, 0),
    )
}

fn point(n: usize, seed: u64) -> ProjectivePoint {
    use rand::Rng;
    let mut rng = stream(seed, 201, 0);
    let coords = (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ProjectivePoint::new(coords).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn system_files_round_trip(d in degrees(), seed in any::<u64>()) {
        let file = SystemFile::new(system(&d, seed));
        let text = serialize_system(&file);
        prop_assert_eq!(parse_system(&text).unwrap(), file);
    }

    #[test]
    fn sphere_samples_have_unit_norm(d in degrees(), seed in any::<u64>()) {
        prop_assert!((system(&d, seed).bw_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_reproduces_evaluation(deg in 1u32..=5, seed in any::<u64>()) {
        let p = system(&[deg], seed).polys()[0].clone();
        let z = point(2, seed ^ 1);
        let k = kernel_poly(z.coords(), deg).unwrap();
        let lhs = p.bw_inner(&k).unwrap();
        let rhs = p.evaluate(z.coords()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!((k.bw_norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn riemann_distance_is_a_bounded_symmetric_phase_invariant(n in 2usize..5, seed in any::<u64>(), theta in 0.0..std::f64::consts::TAU) {
        let z = point(n, seed);
        let w = point(n, seed ^ 7);
        let d = riemann_distance(&z, &w);
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&d));
        prop_assert!((d - riemann_distance(&w, &z)).abs() < 1e-15);
        let rot = ProjectivePoint::new(w.coords().iter().map(|c| c * C64::from_polar(1.0, theta)).collect()).unwrap();
        prop_assert!((d - riemann_distance(&z, &rot)).abs() < 1e-12);
        prop_assert!(riemann_distance(&z, &z) < 1e-15);
    }

    #[test]
    fn condition_and_newton_are_scale_invariant(seed in any::<u64>(), s in 0.1..10.0f64, phase in 0.0..std::f64::consts::TAU) {
        let d = DegreeVector::new(vec![2, 2]).unwrap();
        let pair = random_initial_pair(&d, &mut stream(seed, 202, 0)).unwrap();
        let scaled = pair.system.scale(C64::from_polar(s, phase));
        let z = &pair.starts[0];
        let (a, b) = (condition_mu(&pair.system, z), condition_mu(&scaled, z));
        prop_assert!((a - b).abs() <= 1e-9 * a);
        let y = point(3, seed);
        let n1 = projective_newton_step(&pair.system, &y).unwrap();
        let n2 = projective_newton_step(&scaled, &y).unwrap();
        prop_assert!(riemann_distance(&n1, &n2) < 1e-10);
    }

    #[test]
    fn random_pairs_vanish_at_their_root(d in degrees(), seed in any::<u64>()) {
        let pair = random_initial_pair(&DegreeVector::new(d).unwrap(), &mut stream(seed, 203, 0)).unwrap();
        let v = pair.system.evaluate(pair.starts[0].coords()).unwrap();
        prop_assert!(v.iter().all(|c| c.norm() < 1e-12));
        prop_assert!((pair.system.bw_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bw_inner_is_conjugate_symmetric(deg in 1u32..=4, seed in any::<u64>()) {
        let p: HomoPoly = system(&[deg, deg], seed).polys()[0].clone();
        let q: HomoPoly = system(&[deg, deg], seed ^ 3).polys()[1].clone();
        let a = p.bw_inner(&q).unwrap();
        let b = q.bw_inner(&p).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-14);
    }
}
