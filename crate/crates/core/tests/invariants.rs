use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempstep_core::{
    build_solution, match_at_t0, scatter, second_order_residual, sharp_step, Kinematics,
    StepParameters,
};

fn params(p: f64, a2: f64, tau: f64) -> StepParameters {
    StepParameters::new(1.0, 1.0, p, 0.0, a2, 0.0, tau).unwrap()
}

#[test]
fn residual_of_second_order_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let p = rng.random_range(-4.0..4.0);
        let a2 = rng.random_range(-4.0..4.0);
        let tau = 10f64.powf(rng.random_range(-1.0..0.7));
        let t0 = rng.random_range(-2.0..2.0);
        let params = StepParameters::new(1.0, 1.0, p, 0.0, a2, t0, tau).unwrap();
        let sol = match_at_t0(&build_solution(&params).unwrap(), &params).unwrap();
        for _ in 0..20 {
            let t = t0 + tau * rng.random_range(-4.0..4.0);
            let r = second_order_residual(&sol, t, &params).unwrap();
            assert!(r < 1e-7, "{params:?} t = {t}: {r:e}");
        }
    }
}

#[test]
fn tiny_tau_approaches_sharp_step() {
    for (p, a2) in [
        (3f64.sqrt(), 2.0 * 3f64.sqrt()),
        (0.5, 4.0),
        (-2.0, 1.5),
        (4.0, 0.5),
    ] {
        let k = Kinematics::new(1.0, 1.0, p, 0.0, a2).unwrap();
        let sharp = sharp_step(&k).unwrap();
        let soft = scatter(&k.with_transition(0.0, 1e-4).unwrap()).unwrap();
        assert!((soft.forward - sharp.forward).abs() < 1e-3);
        assert!((soft.forward_unitary - sharp.forward_unitary).abs() < 1e-3);
    }
}

#[test]
fn adiabatic_suppression_at_anchor() {
    let r3 = 3f64.sqrt();
    let mut last = f64::INFINITY;
    for i in 0..30 {
        let tau = 1.0 + 0.3 * i as f64;
        let b = scatter(&params(r3, 2.0 * r3, tau))
            .unwrap()
            .backward_unitary;
        assert!(b < last, "tau = {tau}");
        last = b;
    }
    assert!(
        scatter(&params(r3, 2.0 * r3, 10.0))
            .unwrap()
            .backward_unitary
            < 1e-6
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probabilities_are_normalized(p in -5.0..5.0f64, a2 in -5.0..5.0f64, lt in -4.0..1.0f64) {
        let r = scatter(&params(p, a2, 10f64.powf(lt))).unwrap();
        prop_assert!((r.forward + r.backward - 1.0).abs() < 1e-12);
        prop_assert!((r.forward_unitary + r.backward_unitary - 1.0).abs() < 1e-9);
        prop_assert!(r.f >= 0.0 && r.b >= 0.0);
    }

    #[test]
    fn gauge_shift_leaves_results_unchanged(p in -3.0..3.0f64, a2 in -3.0..3.0f64,
                                            shift in -5.0..5.0f64, tau in 0.05..3.0f64) {
        let base = scatter(&params(p, a2, tau)).unwrap();
        let moved = StepParameters::new(1.0, 1.0, p + shift, shift, a2 + shift, 0.0, tau).unwrap();
        let r = scatter(&moved).unwrap();
        // The shifted inputs round differently, so allow a few ulps of pi.
        prop_assert!((r.forward - base.forward).abs() < 1e-9);
        prop_assert!((r.backward_unitary - base.backward_unitary).abs() < 1e-9);
    }

    #[test]
    fn continuous_in_tau(p in -3.0..3.0f64, a2 in -3.0..3.0f64, tau in 0.05..3.0f64) {
        let a = scatter(&params(p, a2, tau)).unwrap();
        let b = scatter(&params(p, a2, tau * (1.0 + 1e-7))).unwrap();
        prop_assert!((a.forward_unitary - b.forward_unitary).abs() < 1e-5);
    }

    #[test]
    fn no_step_means_no_scattering(p in -5.0..5.0f64, a in -5.0..5.0f64, tau in 1e-3..5.0f64) {
        let r = scatter(&StepParameters::new(1.0, 1.0, p, a, a, 0.0, tau).unwrap()).unwrap();
        prop_assert!(r.b < 1e-10);
        prop_assert!((r.f - 1.0).abs() < 1e-10);
    }
}
