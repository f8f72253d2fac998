use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempstep_core::{compare, integrate, scatter, IntegrationConfig, StepParameters};

fn random_params(rng: &mut ChaCha8Rng) -> StepParameters {
    let p = rng.random_range(-3.0..3.0);
    let a2 = rng.random_range(-3.0..3.0);
    let tau = 10f64.powf(rng.random_range(-1.5..0.3));
    let t0 = rng.random_range(-1.0..1.0);
    StepParameters::new(1.0, 1.0, p, 0.0, a2, t0, tau).unwrap()
}

#[test]
fn analytic_matches_integration_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = IntegrationConfig::default();
    for _ in 0..12 {
        let params = random_params(&mut rng);
        let report = compare(&params, &cfg, 1e-7).unwrap();
        assert!(report.passed, "{params:?}: {:?}", report.deviations);
    }
}

#[test]
fn printed_backward_prefactor_disagrees_with_integration() {
    // E1 != E2 here, so the literal prefactor rescales b by e^{pi tau (E1 - E2)/2}.
    let params = StepParameters::new(1.0, 1.0, 1.0, 0.0, 3.5, 0.0, 0.5).unwrap();
    let analytic = scatter(&params).unwrap();
    let oracle = integrate(&params, &IntegrationConfig::default()).unwrap();
    assert!((analytic.b - oracle.b_num).abs() < 1e-8);
    assert!((analytic.b_literal() - oracle.b_num).abs() > 1e-2);
}

#[test]
fn integration_is_converged_in_span_and_tolerance() {
    let r3 = 3f64.sqrt();
    let params = StepParameters::new(1.0, 1.0, r3, 0.0, 2.0 * r3, 0.0, 0.3).unwrap();
    let base_cfg = IntegrationConfig::default();
    let base = integrate(&params, &base_cfg).unwrap();
    let wider = integrate(
        &params,
        &IntegrationConfig {
            span_factor: base_cfg.span_factor + 4.0,
            ..base_cfg
        },
    )
    .unwrap();
    let tighter = integrate(
        &params,
        &IntegrationConfig {
            rel_tol: base_cfg.rel_tol / 10.0,
            ..base_cfg
        },
    )
    .unwrap();
    for other in [wider, tighter] {
        assert!((other.f_num - base.f_num).abs() < 1e-7);
        assert!((other.b_num - base.b_num).abs() < 1e-7);
    }
}

#[test]
fn amplitudes_do_not_depend_on_transition_time() {
    let params = StepParameters::new(1.0, 1.0, 0.8, 0.0, 2.7, 0.0, 0.4).unwrap();
    let cfg = IntegrationConfig::default();
    let base = integrate(&params, &cfg).unwrap();
    let base_analytic = scatter(&params).unwrap();
    for t0 in [-3.0, 1.7, 12.5] {
        let shifted = params.with_t0(t0).unwrap();
        let out = integrate(&shifted, &cfg).unwrap();
        assert!((out.f_num - base.f_num).abs() < 1e-10);
        assert!((out.b_num - base.b_num).abs() < 1e-10);
        let a = scatter(&shifted).unwrap();
        assert!((a.f - base_analytic.f).abs() < 1e-12);
        assert!((a.b - base_analytic.b).abs() < 1e-12);
    }
}

#[test]
fn vanishing_late_momentum_agrees() {
    let params = StepParameters::new(1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.3).unwrap();
    let report = compare(&params, &IntegrationConfig::default(), 1e-7).unwrap();
    assert!(report.passed, "{:?}", report.deviations);
    assert_eq!(report.oracle.b_num, 0.0);
}
