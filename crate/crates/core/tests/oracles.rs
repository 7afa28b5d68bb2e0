//! Reference values worked out independently of the implementation.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use ghz_core::dynamics::{generate_triplet, OscillatorParams};
use ghz_core::ghz::{evaluate_f, lhv_max_f, lhv_optimum, Arrangement};
use ghz_core::homodyne::{
    efficiency_threshold, f_at_efficiency, homodyne_triple_product, octant_probabilities, EfficiencyModel,
    LossModel, QuadratureMethod,
};
use ghz_core::measurement::AngleAssignment;
use ghz_core::phase::{joint_phase_table, projected_phase_table, uniform_binned_table, Binning};
use ghz_core::TripletState;

fn discrete_f(t: &TripletState, arr: &Arrangement) -> f64 {
    evaluate_f(arr, |a| Ok(joint_phase_table(t, a).correlation())).unwrap().f
}

fn homodyne_f(t: &TripletState, arr: &Arrangement, method: QuadratureMethod) -> f64 {
    evaluate_f(arr, |a| Ok(octant_probabilities(t, a, method)?.correlation()))
        .unwrap()
        .f
}

#[test]
fn maximal_state_reaches_four() {
    let t = TripletState::maximal();
    let r = evaluate_f(&Arrangement::triplet(), |a| Ok(joint_phase_table(&t, a).correlation())).unwrap();
    assert!((r.f - 4.0).abs() < 1e-12);
    // yyx: ψ₀ = π, E = +1; the other three have ψ₀ = 0, E = −1.
    let want = [1.0, -1.0, -1.0, -1.0];
    for (got, want) in r.terms.iter().zip(want) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn binary_table_at_maximal_state() {
    let t = TripletState::maximal();
    let p = projected_phase_table(&t, &AngleAssignment::from_psi0(0.0)).unwrap();
    // Outcomes with an odd number of ones vanish.
    for (mu, want) in [
        ([0, 0, 0], 0.25),
        ([1, 1, 0], 0.25),
        ([1, 1, 1], 0.0),
        ([0, 0, 1], 0.0),
        ([1, 0, 0], 0.0),
    ] {
        assert!((p.get(mu) - want).abs() < 1e-12, "{mu:?}");
    }
}

#[test]
fn f_tracks_eight_c0_c1() {
    for (c0, c1) in [(0.6, 0.8), (0.8, 0.6), (1.0, 0.0), (0.28, 0.96)] {
        let t = TripletState::from_real(c0, c1).unwrap();
        assert!((discrete_f(&t, &Arrangement::triplet()) - 8.0 * c0 * c1).abs() < 1e-12);
    }
    // c0c1 = 1/4 sits on the local bound.
    let c0 = ((1.0 + (0.75f64).sqrt()) / 2.0).sqrt();
    let t = TripletState::from_c0(c0).unwrap();
    assert!((discrete_f(&t, &Arrangement::triplet()) - 2.0).abs() < 1e-12);
}

#[test]
fn mermin_ordering_cancels() {
    let t = TripletState::maximal();
    assert!(discrete_f(&t, &Arrangement::mermin()).abs() < 1e-12);
    let flipped = Arrangement::mermin().with_angles(0.0, -FRAC_PI_2);
    assert!(discrete_f(&t, &flipped).abs() < 1e-12);
}

#[test]
fn local_bound_is_two() {
    assert_eq!(lhv_max_f(&Arrangement::triplet()), 2);
    assert_eq!(lhv_max_f(&Arrangement::mermin()), 2);
    let opt = lhv_optimum(&Arrangement::triplet());
    assert_eq!(opt.f_max, 2);
}

#[test]
fn three_level_binning_freezes_at_one() {
    let t = TripletState::maximal();
    let b = Binning::contiguous_halves(3).unwrap();
    let r = evaluate_f(&Arrangement::triplet(), |a| Ok(uniform_binned_table(&t, a, 3, &b)?.correlation())).unwrap();
    assert!((r.f - 1.0).abs() < 1e-12, "{}", r.f);
}

#[test]
fn homodyne_reference_values() {
    let t = TripletState::maximal();
    let want = 8.0 * 2f64.sqrt() / PI.powf(1.5);
    assert!((want - 2.031_796).abs() < 1e-6);
    let closed = homodyne_f(&t, &Arrangement::triplet(), QuadratureMethod::ClosedForm);
    assert!((closed - want).abs() < 1e-12);
    let quad = homodyne_f(&t, &Arrangement::triplet(), QuadratureMethod::Quadrature);
    assert!((quad - want).abs() < 1e-9);

    let e = homodyne_triple_product(&t, &AngleAssignment::from_psi0(0.0));
    assert!((e + (2.0 / PI).powf(1.5)).abs() < 1e-12);
    let p = octant_probabilities(&t, &AngleAssignment::from_psi0(0.0), QuadratureMethod::ClosedForm).unwrap();
    assert!((p.get([1, 1, 1]) - 0.061_51).abs() < 1e-5);
}

#[test]
fn efficiency_thresholds() {
    let t = TripletState::maximal();
    let arr = Arrangement::triplet();
    // F(η) = F(1)·η³ under detector failure, F(1)·η^{3/2} under beamsplitter loss.
    let f1 = 8.0 * 2f64.sqrt() / PI.powf(1.5);
    let failure = efficiency_threshold(&t, &arr, LossModel::DetectorFailure, QuadratureMethod::ClosedForm)
        .unwrap()
        .eta_star()
        .unwrap();
    assert!((failure - (2.0 / f1).powf(1.0 / 3.0)).abs() < 2e-6);
    assert!((failure - 0.99476).abs() < 1e-4);
    let beam = efficiency_threshold(&t, &arr, LossModel::Beamsplitter, QuadratureMethod::ClosedForm)
        .unwrap()
        .eta_star()
        .unwrap();
    assert!((beam - (2.0 / f1).powf(2.0 / 3.0)).abs() < 2e-6);

    let at = |eta, loss| {
        let m = EfficiencyModel::new(eta, loss).unwrap();
        f_at_efficiency(&t, &arr, &m, QuadratureMethod::Quadrature).unwrap().f
    };
    assert!(at(failure + 1e-4, LossModel::DetectorFailure) > 2.0);
    assert!(at(failure - 1e-4, LossModel::DetectorFailure) < 2.0);
}

#[test]
fn oscillator_quarter_period() {
    let p = generate_triplet(&OscillatorParams::at(FRAC_PI_4)).unwrap();
    assert!((p.c0.re - FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((p.c1.re + FRAC_1_SQRT_2).abs() < 1e-12);
    let t = p.triplet().unwrap();
    assert!((discrete_f(&t, &Arrangement::triplet()) - 4.0).abs() < 1e-10);
}
