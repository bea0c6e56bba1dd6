use liouville::criticality::binder_cumulant;
use liouville::meanfield::{solve_unconstrained, Beta, MfParams, SolveOptions};
use liouville::spectral::{check_symmetries, full_spectrum};
use liouville::superket::{devectorize, vectorize};
use liouville::{apply_frame_transform, Complex64, Frame, FrameDirection, LiouvilleParams, Liouvillian, Superket};
use proptest::prelude::*;

fn superket(n: usize) -> impl Strategy<Value = Superket<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1usize << (2 * n))
        .prop_map(move |v| Superket::from_amplitudes(n, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn sized_superket() -> impl Strategy<Value = Superket<f64>> {
    (1usize..=4).prop_flat_map(superket)
}

fn coupling() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.1f64..2.0, 0.0f64..2.0, 0.0f64..2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_is_conserved(rho in sized_superket(), (j, g, gamma) in coupling()) {
        let p = LiouvilleParams::new(rho.n_spins(), j, g, gamma, Frame::Original).unwrap();
        let l = Liouvillian::new(p).unwrap();
        prop_assert!(l.apply(&rho).unwrap().trace().norm() < 1e-12 * (1.0 + rho.norm()));
    }

    #[test]
    fn dagger_anticommutes(rho in sized_superket(), (j, g, gamma) in coupling()) {
        // L(rho^dagger) = -L(rho)^dagger
        let p = LiouvilleParams::new(rho.n_spins(), j, g, gamma, Frame::Original).unwrap();
        let l = Liouvillian::new(p).unwrap();
        let lhs = l.apply(&rho.dagger()).unwrap();
        let rhs = l.apply(&rho).unwrap().dagger().scaled(Complex64::new(-1.0, 0.0));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12 * (1.0 + rho.norm()));
    }

    #[test]
    fn adjoint_is_dual(
        (a, b) in (1usize..=3).prop_flat_map(|n| (superket(n), superket(n))),
        (j, g, gamma) in coupling(),
    ) {
        let p = LiouvilleParams::new(a.n_spins(), j, g, gamma, Frame::Original).unwrap();
        let l = Liouvillian::new(p).unwrap();
        let lhs = a.inner(&l.apply(&b).unwrap());
        let rhs = l.apply_adjoint(&a).unwrap().inner(&b);
        prop_assert!((lhs - rhs).norm() < 1e-11 * a.norm() * b.norm());
    }

    #[test]
    fn frame_transform_round_trips(rho in (1usize..=3).prop_map(|k| 2 * k).prop_flat_map(superket)) {
        let there = apply_frame_transform(&rho, FrameDirection::ToTransformed).unwrap();
        let back = apply_frame_transform(&there, FrameDirection::ToOriginal).unwrap();
        prop_assert!(back.max_abs_diff(&rho) < 1e-14);
        prop_assert!((there.norm() - rho.norm()).abs() < 1e-12);
    }

    #[test]
    fn vectorization_round_trips(rho in sized_superket()) {
        let back = vectorize(&devectorize(&rho)).unwrap();
        prop_assert_eq!(back.amplitudes(), rho.amplitudes());
    }

    #[test]
    fn transformed_generator_is_similar(rho in superket(2), (j, g, gamma) in coupling()) {
        // U L U^dagger = L~ applied to transformed vectors
        let p = LiouvilleParams::new(2, j, g, gamma, Frame::Original).unwrap();
        let l = Liouvillian::new(p).unwrap();
        let lt = Liouvillian::new(p.with_frame(Frame::Transformed)).unwrap();
        let via_orig = apply_frame_transform(&l.apply(&rho).unwrap(), FrameDirection::ToTransformed).unwrap();
        let via_tr = lt.apply(&apply_frame_transform(&rho, FrameDirection::ToTransformed).unwrap()).unwrap();
        prop_assert!(via_orig.max_abs_diff(&via_tr) < 1e-12 * (1.0 + rho.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectrum_symmetries_hold(n in 1usize..=3, (j, g, gamma) in coupling()) {
        let p = LiouvilleParams::new(n, j, g, gamma, Frame::Original).unwrap();
        let spec = full_spectrum(&p).unwrap();
        let r = check_symmetries(&spec, &p, 1e-7);
        prop_assert!(r.conjugation.passed, "{:?}", r.conjugation);
        prop_assert!(r.pt_dihedral.passed, "{:?}", r.pt_dihedral);
        prop_assert!(spec.eigenvalues.iter().all(|z| z.im <= 1e-9));
    }

    #[test]
    fn binder_cumulant_of_diagonal_modes(weights in prop::collection::vec(0.01f64..1.0, 16), scale in 0.1f64..10.0) {
        // a positive diagonal is a probability distribution of M, so
        // <M^4> >= <M^2>^2 and U4 <= 2/3; the overall scale drops out
        let mut s = Superket::zeros(4);
        let mut t = Superket::zeros(4);
        for (k, w) in weights.iter().enumerate() {
            s.set(k, k, Complex64::new(*w, 0.0));
            t.set(k, k, Complex64::new(-scale * w, 0.0));
        }
        let (b, bt) = (binder_cumulant(&s).unwrap(), binder_cumulant(&t).unwrap());
        prop_assert!(b.u4 <= 2.0 / 3.0 + 1e-12, "{}", b.u4);
        prop_assert!(b.u4_imag.abs() < 1e-12);
        prop_assert!((b.u4 - bt.u4).abs() < 1e-12);
    }

    #[test]
    fn mean_field_fixed_points_are_conjugate_pairs(g in 0.0f64..3.0, gamma in 0.0f64..4.0, beta in 0.3f64..2.0) {
        let p = MfParams::new(1.0, g, gamma, Beta::Finite(beta)).unwrap();
        let o = SolveOptions { tol: 1e-13, max_iter: 5000, ..Default::default() };
        let s = solve_unconstrained(&p, Complex64::new(0.8, 0.3), Complex64::new(0.2, -0.1), &o).unwrap();
        if s.converged {
            prop_assert!(s.conjugation_error() < 1e-9, "{:?}", s);
        }
    }
}
