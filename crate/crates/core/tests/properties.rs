//! Property-based invariants over randomized inputs.

use proptest::prelude::*;
use std::f64::consts::PI;

use mollow_g2_core::correlations::{array_factor, csi, g2_chain, g2_two_atom};
use mollow_g2_core::dynamics::{
    evolve, steady_state, steady_state_residual, DynamicsCoefficients, TwoAtomState,
};
use mollow_g2_core::oracle::oracle_g2;
use mollow_g2_core::params::{
    collective_coupling, generalized_rabi, mixing_angle, BandPair, DressedParams, PerBand,
};

fn band_pair() -> impl Strategy<Value = BandPair> {
    (0usize..9).prop_map(|i| BandPair::all()[i])
}

fn phase() -> impl Strategy<Value = f64> {
    -4.0 * PI..4.0 * PI
}

proptest! {
    #[test]
    fn array_factor_bounded_and_even(n in 1usize..60, delta in phase()) {
        let phi = array_factor(n, delta);
        let n2 = (n * n) as f64;
        prop_assert!(phi >= 0.0);
        prop_assert!(phi <= n2 * (1.0 + 1e-9));
        let mirrored = array_factor(n, -delta);
        prop_assert!((phi - mirrored).abs() <= 1e-9 * n2.max(1.0));
    }

    #[test]
    fn array_factor_periodic(n in 1usize..40, delta in phase()) {
        let a = array_factor(n, delta);
        let b = array_factor(n, delta + 2.0 * PI);
        prop_assert!((a - b).abs() <= 1e-6 * ((n * n) as f64));
    }

    #[test]
    fn chain_g2_nonnegative_and_bounded(pair in band_pair(), n in 2usize..80, d1 in phase(), d2 in phase()) {
        let v = g2_chain(pair, n, d1, d2).unwrap();
        prop_assert!(v >= 0.0);
        // the largest closed form is CC with both interference terms peaked
        prop_assert!(v <= 3.0 + 1e-9);
    }

    #[test]
    fn detector_exchange_symmetry(pair in band_pair(), n in 2usize..40, d1 in phase(), d2 in phase()) {
        let a = g2_chain(pair, n, d1, d2).unwrap();
        let b = g2_chain(pair.swapped(), n, d2, d1).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
    }

    #[test]
    fn two_atom_is_the_chain_at_n2(pair in band_pair(), d1 in phase(), d2 in phase()) {
        let chain = g2_chain(pair, 2, d1, d2).unwrap();
        let pair_form = g2_two_atom(pair, d1, d2);
        prop_assert!((chain - pair_form).abs() <= 1e-12);
    }

    #[test]
    fn csi_variants_agree_and_stay_nonnegative(n in 2usize..60, d1 in phase(), d2 in phase()) {
        let v = csi(n, d1, d2).unwrap();
        prop_assert!(v.left >= 0.0);
        prop_assert!((v.left - v.right).abs() <= 1e-12 * v.left.max(1.0));
        prop_assert_eq!(v.violates(), v.left < 1.0 || v.right < 1.0);
    }

    #[test]
    fn oracle_agrees_with_closed_forms(pair in band_pair(), n in 2usize..=4, d1 in phase(), d2 in phase()) {
        let got = oracle_g2(n, pair, d1, d2).unwrap();
        let want = g2_chain(pair, n, d1, d2).unwrap();
        prop_assert!((got - want).abs() < 1e-10, "N={} {}: {} vs {}", n, pair, got, want);
    }

    #[test]
    fn dressing_angle_in_open_quadrant(rabi in 1e-3..50.0, detuning in -50.0..50.0) {
        let theta = mixing_angle(rabi, detuning).unwrap();
        prop_assert!(theta > 0.0 && theta < PI / 2.0);
        let gen = generalized_rabi(rabi, detuning).unwrap();
        prop_assert!(gen >= rabi.max(detuning.abs() / 2.0) * (1.0 - 1e-12));
        // cot 2θ inverts back to the detuning-to-drive ratio
        let recovered = 2.0 * rabi / (2.0 * theta).tan();
        prop_assert!((recovered - detuning).abs() <= 1e-9 * detuning.abs().max(1.0));
    }

    #[test]
    fn coupling_kernel_bounded(x in 1e-4..300.0f64) {
        let c = collective_coupling(x).unwrap();
        prop_assert!(c.chi.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn steady_state_is_a_fixed_point(
        rabi in 0.5..30.0f64,
        detuning in -8.0..8.0f64,
        gl in 0.2..2.0f64,
        gc in 0.2..2.0f64,
        gr in 0.2..2.0f64,
        cl in -0.9..0.9f64,
        cc in -0.9..0.9f64,
        cr in -0.9..0.9f64,
    ) {
        let params = DressedParams::new(rabi, detuning, PerBand { left: gl, center: gc, right: gr }).unwrap();
        let coeffs = DynamicsCoefficients::from_params(&params, &PerBand { left: cl, center: cc, right: cr }).unwrap();
        let fixed = steady_state(&coeffs).unwrap();
        prop_assert!(steady_state_residual(&coeffs, fixed) <= 1e-10 * coeffs.max_rate().max(1.0));
    }

    #[test]
    fn trajectories_conserve_population(
        p0 in 1e-3..1.0f64, p1 in 1e-3..1.0f64, p2 in 1e-3..1.0f64, p3 in 1e-3..1.0f64,
        chi in -0.9..0.9f64,
    ) {
        let total = p0 + p1 + p2 + p3;
        let initial = TwoAtomState::from_populations([p0 / total, p1 / total, p2 / total, p3 / total]).unwrap();
        let params = DressedParams::resonant(10.0).unwrap();
        let coeffs = DynamicsCoefficients::from_params(&params, &PerBand::uniform(chi)).unwrap();
        for (_, state) in evolve(&coeffs, initial, 5.0, 0.02).unwrap() {
            let total: f64 = state.populations().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            prop_assert!(state.is_physical(1e-9));
        }
    }
}
