//! Invariants as property tests. Random objects are drawn from the crate's
//! seeded generator with the seed itself as the proptest input.

mod common;

use ldlab::classical::{bj_coeff, bj_coeff_exact};
use ldlab::extensions::{self, PerturbationSpec, ThetaFamily};
use ldlab::hscale::{self, ScaleVector};
use ldlab::leftdef::{self, SpectralOperator};
use ldlab::linalg::{self, c, mat_power, CMatrix, LinearRelation, Subspace};
use ldlab::rng;
use ldlab::sl::{self, SLCoefficients};
use proptest::prelude::*;

fn random_relation(seed: u64, n: usize, k: usize) -> LinearRelation {
    let mut g = rng::seeded(seed);
    let f = rng::complex_matrix(&mut g, n, k);
    let h = rng::complex_matrix(&mut g, n, k);
    LinearRelation::from_pairs(&f, &h).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>(), n in 1usize..6, k in 0usize..8) {
        let t = random_relation(seed, n, k.min(2 * n));
        prop_assert!(t.adjoint().adjoint().approx_eq(&t));
    }

    #[test]
    fn adjoint_dimension_formula(seed in any::<u64>(), n in 1usize..6, k in 0usize..8) {
        let t = random_relation(seed, n, k.min(2 * n));
        prop_assert_eq!(t.dim() + t.adjoint().dim(), 2 * n);
    }

    #[test]
    fn complement_of_intersection(seed in any::<u64>(), n in 2usize..7, a in 0usize..7, b in 0usize..7) {
        let mut g = rng::seeded(seed);
        let u = Subspace::span(&rng::complex_matrix(&mut g, n, a.min(n)));
        let v = Subspace::span(&rng::complex_matrix(&mut g, n, b.min(n)));
        let lhs = u.intersect(&v).unwrap().orthocomplement();
        let rhs = u.orthocomplement().sum(&v.orthocomplement()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs));
        // Grassmann dimension formula
        prop_assert_eq!(u.sum(&v).unwrap().dim() + u.intersect(&v).unwrap().dim(), u.dim() + v.dim());
    }

    #[test]
    fn fractional_power_semigroup(seed in any::<u64>(), n in 1usize..12, r in 0.1f64..3.0, s in 0.1f64..3.0) {
        let mut g = rng::seeded(seed);
        let h = rng::positive_definite(&mut g, n, 0.5, 5.0);
        let lhs = mat_power(&h, r).unwrap().entries() * mat_power(&h, s).unwrap().entries();
        let rhs = mat_power(&h, r + s).unwrap();
        let scale = rhs.max_norm().max(1.0);
        prop_assert!(linalg::max_abs(&(lhs - rhs.entries())) <= 1e-10 * scale);
    }

    #[test]
    fn left_definite_suite_holds(seed in any::<u64>(), n in 1usize..10, r in 0.2f64..3.5) {
        let mut g = rng::seeded(seed);
        let a = SpectralOperator::new(rng::positive_definite(&mut g, n, 0.5, 8.0)).unwrap();
        let report = leftdef::verify_ld_properties(&a, r, 20, seed).unwrap();
        prop_assert!(report.passed(), "{}", report.to_text());
    }

    #[test]
    fn friedrichs_domain_nesting(seed in any::<u64>(), dim in 3usize..8, codim in 0usize..3, n in 1u32..4) {
        let mut g = rng::seeded(seed);
        let a = SpectralOperator::new(rng::positive_definite(&mut g, dim, 0.5, 10.0)).unwrap();
        let cs = rng::subspace(&mut g, dim, codim.min(dim - 1));
        let s = extensions::minimal_relation(&a, &cs).unwrap();
        let exp = extensions::friedrichs_power_experiment(&s, n).unwrap();
        prop_assert!(exp.friedrichs_power.contains_subspace(&exp.power_friedrichs));
        let oracle = common::chain_domain_dim(a.matrix().entries(), cs.basis(), n as usize, true);
        prop_assert_eq!(exp.friedrichs_power.dim(), oracle);
    }

    #[test]
    fn friedrichs_is_selfadjoint_extension(seed in any::<u64>(), dim in 2usize..9, codim in 0usize..4) {
        let mut g = rng::seeded(seed);
        let a = SpectralOperator::new(rng::positive_definite(&mut g, dim, 0.1, 10.0)).unwrap();
        let cs = rng::subspace(&mut g, dim, codim.min(dim - 1));
        let s = extensions::minimal_relation(&a, &cs).unwrap();
        let sf = extensions::friedrichs_relation(&s).unwrap();
        prop_assert!(sf.is_selfadjoint());
        prop_assert!(s.is_subset_of(&sf));
        prop_assert!(sf.adjoint().is_subset_of(&s.adjoint()));
        let def = extensions::deficiency_indices(&s).unwrap();
        prop_assert_eq!((def.m_plus, def.m_minus), (cs.dim(), cs.dim()));
    }

    #[test]
    fn rank_one_sweep_is_monotone(seed in any::<u64>(), dim in 2usize..9, mut ts in prop::collection::vec(-5.0f64..20.0, 2..6)) {
        ts.sort_by(f64::total_cmp);
        let mut g = rng::seeded(seed);
        let a0 = SpectralOperator::new(rng::positive_definite(&mut g, dim, 1.0, 10.0)).unwrap();
        let b = rng::complex_matrix(&mut g, dim, 1);
        let sweep = extensions::theta_sweep(&a0, &b, &ThetaFamily::RankOne(ts)).unwrap();
        prop_assert_eq!(sweep.monotone, Some(true));
    }

    #[test]
    fn multivalued_limit_is_below_every_finite_theta(seed in any::<u64>(), dim in 2usize..8, t in 0.0f64..50.0) {
        let mut g = rng::seeded(seed);
        let a0 = SpectralOperator::new(rng::positive_definite(&mut g, dim, 1.0, 10.0)).unwrap();
        let mut phi = rng::complex_vector(&mut g, dim);
        phi /= c(phi.norm());
        let finite = extensions::perturbed_spectrum(&a0, &PerturbationSpec::rank_one(phi.clone(), t).unwrap()).unwrap();
        let limit = extensions::perturbed_spectrum(&a0, &PerturbationSpec::rank_one(phi, f64::INFINITY).unwrap()).unwrap();
        prop_assert_eq!(limit.len(), dim - 1);
        for (i, mu) in limit.iter().enumerate() {
            prop_assert!(finite[i] <= mu + 1e-9 && *mu <= finite[i + 1] + 1e-9);
        }
    }

    #[test]
    fn scale_isometry(seed in any::<u64>(), n in 1usize..40, s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let mut g = rng::seeded(seed);
        let a = SpectralOperator::new(rng::positive_definite(&mut g, n, 0.1, 50.0)).unwrap();
        let phi = ScaleVector::new(rng::complex_vector(&mut g, n));
        prop_assert!(hscale::isometry_check(&a, s, t, &phi).unwrap() <= 1e-10);
        // H_s norms are nested: s ≤ s' ⇒ ‖φ‖_s ≤ ‖φ‖_{s'}
        let lo = hscale::hs_norm(&a, s.min(t), &phi).unwrap();
        let hi = hscale::hs_norm(&a, s.max(t), &phi).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn bj_real_matches_exact(n in 0u32..10, k in 1i64..7) {
        for j in 0..=n {
            let exact = bj_coeff_exact(n, k, j).unwrap() as f64;
            let real = bj_coeff(n, k as f64, j).unwrap();
            prop_assert!((exact - real).abs() <= 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn sl_matrix_is_symmetric(n in 3usize..80, shift in -2.0f64..2.0, alpha in 1.0f64..3.0) {
        let flat = SLCoefficients::flat(0.0, 1.0).unwrap().with_q_shift(shift);
        let jac = SLCoefficients::jacobi(alpha, 1.0).unwrap();
        for co in [flat, jac] {
            let op = sl::discretize(&co, n).unwrap();
            let m = op.matrix();
            prop_assert!(linalg::max_abs(&(m.entries() - m.entries().adjoint())) == 0.0);
            let ev = op.eigenvalues();
            prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn matrix_csv_round_trip(seed in any::<u64>(), r in 1usize..6, cols in 1usize..6) {
        let mut g = rng::seeded(seed);
        let m: CMatrix = rng::complex_matrix(&mut g, r, cols);
        let mut buf = Vec::new();
        linalg::write_matrix_csv(&m, &mut buf).unwrap();
        let back = linalg::read_matrix_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, m);
    }
}
