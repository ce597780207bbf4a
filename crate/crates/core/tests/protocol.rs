use std::f64::consts::FRAC_1_SQRT_2;

use cavity_ghz::analysis::{fidelity, fidelity_to_vector};
use cavity_ghz::dynamics::IntegratorConfig;
use cavity_ghz::hamiltonian::{mhz, DeviceParams};
use cavity_ghz::hilbert::{overlap, reduce_pure, NetworkLayout, QuantumState};
use cavity_ghz::protocol::*;
use cavity_ghz::{Error, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ideal(n: usize) -> DeviceParams {
    DeviceParams::transmon(n, mhz(14.15), 0.0).without_decoherence().without_unwanted_couplings()
}

fn even() -> (C64, C64) {
    (c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0))
}

fn run_ideal(layout: &NetworkLayout, params: &DeviceParams, schedule: &Schedule, ic: &InitialCondition) -> Vec<C64> {
    let traj = execute(layout, params, schedule, &initial_state(layout, ic).unwrap(), &IntegratorConfig::default()).unwrap();
    traj.state.as_vector().unwrap().to_vec()
}

#[test]
fn initial_state_has_equal_amplitudes() {
    let layout = NetworkLayout::chain(1, 3, 2).unwrap();
    let (a, b) = even();
    let psi = initial_state(&layout, &InitialCondition::uniform(a, b, 1).unwrap()).unwrap();
    let psi = psi.as_vector().unwrap();
    let nonzero: Vec<_> = psi.iter().filter(|z| z.norm() > 1e-15).collect();
    assert_eq!(nonzero.len(), 8);
    for z in nonzero {
        assert!((*z - c(1.0 / (2.0 * 2f64.sqrt()), 0.0)).norm() < 1e-15);
    }
}

#[test]
fn single_cavity_target() {
    let layout = NetworkLayout::chain(1, 2, 2).unwrap();
    let (a, b) = even();
    let t = target_state(&layout, &InitialCondition::uniform(a, b, 1).unwrap()).unwrap();
    let t = t.as_vector().unwrap();
    assert!((t[layout.basis_index(&[0, 0, 0]).unwrap()] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    assert!((t[layout.basis_index(&[0, 1, 1]).unwrap()] - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
}

#[test]
fn uniform_relative_phase_matches_closed_form() {
    for n in 1..=4 {
        for m in 2..=4 {
            let layout = NetworkLayout::chain(n, m, 2).unwrap();
            let (a, b) = even();
            let phase = target_relative_phase(&layout, &InitialCondition::uniform(a, b, n).unwrap()).unwrap();
            assert!((phase - ghz_phase(m, n)).norm() < 1e-12, "N={n} m={m}");
        }
    }
}

#[test]
fn split_pattern_phase() {
    let layout = NetworkLayout::chain(4, 3, 2).unwrap();
    let (a, b) = even();
    let ic = InitialCondition::with_pattern_str(a, b, "0011").unwrap();
    let phase = target_relative_phase(&layout, &ic).unwrap();
    assert!((phase - 1.0).norm() < 1e-12);
}

#[test]
fn durations() {
    assert!((dispersive_duration(mhz(2.0)) - 0.25).abs() < 1e-12);
    assert!((resonant_duration(mhz(1.0)) - 0.25).abs() < 1e-12);
    assert!((pulse_duration(mhz(1.0)) - 0.125).abs() < 1e-12);
}

#[test]
fn operation_time() {
    let layout = NetworkLayout::chain(4, 3, 2).unwrap();
    let mut params = DeviceParams::transmon(4, mhz(14.15), 0.1);
    let t = t_op(&main_schedule(&layout, &params, DispersiveModel::Effective).unwrap());
    assert!((t - 0.27).abs() / 0.27 < 0.1, "t_op = {t}");
    params.tau_d = 0.01;
    let with_idle = t_op(&main_schedule(&layout, &params, DispersiveModel::Effective).unwrap());
    assert!((with_idle - t - 0.04).abs() < 1e-12);
}

#[test]
fn operation_time_does_not_depend_on_group_size() {
    let params = ideal(2);
    let times: Vec<f64> = (2..=5)
        .map(|m| t_op(&main_schedule(&NetworkLayout::chain(2, m, 2).unwrap(), &params, DispersiveModel::Effective).unwrap()))
        .collect();
    assert!(times.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-15));
}

#[test]
fn ideal_protocol_phases() {
    for n in 1..=2 {
        for m in 2..=3 {
            let layout = NetworkLayout::chain(n, m, 2).unwrap();
            let params = ideal(n);
            let (a, b) = even();
            let ic = InitialCondition::uniform(a, b, n).unwrap();
            let psi = run_ideal(&layout, &params, &main_schedule(&layout, &params, DispersiveModel::Effective).unwrap(), &ic);
            let (ia, ib) = target_branch_indices(&layout, &ic).unwrap();
            let ratio = psi[ib] / psi[ia];
            assert!((ratio - ghz_phase(m, n)).norm() < 1e-9, "N={n} m={m}: {ratio}");
            assert!((psi[ia].norm() - FRAC_1_SQRT_2).abs() < 1e-9);
        }
    }
}

#[test]
fn mismatched_couplings_require_staggering() {
    let layout = NetworkLayout::chain(2, 2, 2).unwrap();
    let mut params = ideal(2);
    params.cavities[1].g *= 1.1;
    match main_schedule(&layout, &params, DispersiveModel::Effective) {
        Err(Error::RequiresStaggered { spread }) => assert!(spread > 0.1),
        other => panic!("expected RequiresStaggered, got {other:?}"),
    }
}

#[test]
fn staggered_schedule_with_equal_lambdas_matches_main() {
    let layout = NetworkLayout::chain(2, 2, 2).unwrap();
    let params = ideal(2);
    let main = main_schedule(&layout, &params, DispersiveModel::Effective).unwrap();
    let stag = staggered_schedule(&layout, &params, DispersiveModel::Effective).unwrap();
    assert!((t_op(&main) - t_op(&stag)).abs() < 1e-12);
    let (a, b) = even();
    let ic = InitialCondition::uniform(a, b, 2).unwrap();
    let x = run_ideal(&layout, &params, &main, &ic);
    let y = run_ideal(&layout, &params, &stag, &ic);
    assert!((overlap(&x, &y).unwrap().norm() - 1.0).abs() < 1e-12);

    let one = NetworkLayout::chain(1, 3, 2).unwrap();
    let p1 = ideal(1);
    assert_eq!(
        main_schedule(&one, &p1, DispersiveModel::Effective).unwrap(),
        staggered_schedule(&one, &p1, DispersiveModel::Effective).unwrap()
    );
}

#[test]
fn staggered_schedule_reaches_target_with_unequal_lambdas() {
    let layout = NetworkLayout::chain(2, 2, 2).unwrap();
    let mut params = ideal(2);
    // λ₂ = 2 λ₁
    let lambda1 = params.lambda(0).unwrap();
    params.cavities[1].g = (2.0 * lambda1 * params.cavities[1].delta).sqrt();
    assert!((params.lambda(1).unwrap() - 2.0 * lambda1).abs() < 1e-9);
    let schedule = staggered_schedule(&layout, &params, DispersiveModel::Effective).unwrap();
    let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
    let ic = InitialCondition::uniform(a, b, 2).unwrap();
    let psi = run_ideal(&layout, &params, &schedule, &ic);
    let f = fidelity_to_vector(&QuantumState::vector(psi).unwrap(), target_state(&layout, &ic).unwrap().as_vector().unwrap()).unwrap();
    assert!(f > 1.0 - 1e-9, "fidelity {f}");
}

#[test]
fn resonant_step_is_split_by_coupling() {
    let layout = NetworkLayout::chain(2, 2, 2).unwrap();
    let params = ideal(2);
    let schedule = main_schedule(&layout, &params, DispersiveModel::Effective).unwrap();
    let resonant: Vec<_> = schedule.segments.iter().filter(|s| s.generator.kind() == "resonant").collect();
    let total: f64 = resonant.iter().map(|s| s.duration).sum();
    let longest = (0..2).map(|l| resonant_duration(params.cavities[l].g_r)).fold(0.0, f64::max);
    assert!((total - longest).abs() < 1e-12);
    // the slower cavity stays on in every sub-segment, the faster one only in the first
    let slow = if params.cavities[0].g_r < params.cavities[1].g_r { 0 } else { 1 };
    for seg in &resonant {
        if let Generator::Resonant { mask } = &seg.generator {
            assert!(mask[slow]);
        }
    }
    assert_eq!(resonant.len(), 2);
}

#[test]
fn split_pattern_protocol_reaches_target() {
    let layout = NetworkLayout::chain(2, 2, 2).unwrap();
    let params = ideal(2);
    let (a, b) = even();
    let ic = InitialCondition::with_pattern_str(a, b, "01").unwrap();
    let psi = run_ideal(&layout, &params, &main_schedule(&layout, &params, DispersiveModel::Effective).unwrap(), &ic);
    let target = target_state(&layout, &ic).unwrap();
    let f = fidelity(&QuantumState::vector(psi).unwrap(), &target).unwrap();
    assert!(f > 1.0 - 1e-9);
}

#[test]
fn appendix_needs_three_fock_levels() {
    let layout = appendix_layout(2).unwrap();
    assert!(matches!(appendix_initial_state(&layout), Err(Error::Truncation { .. })));
    assert!(matches!(appendix_schedule(&layout, &AppendixParams::default()), Err(Error::Truncation { .. })));
}

#[test]
fn two_photon_transfer() {
    let map = two_photon_rabi_check(mhz(10.0), &IntegratorConfig::default()).unwrap();
    assert!((map.e1_to_g2.norm() - 1.0).abs() < 1e-9);
    assert!((map.f0_to_f0 - 1.0).norm() < 1e-9);
    assert!((map.g0_to_g0 - 1.0).norm() < 1e-9);
}

#[test]
fn appendix_protocol() {
    let layout = appendix_layout(3).unwrap();
    let schedule = appendix_schedule(&layout, &AppendixParams::default()).unwrap();
    let psi0 = appendix_initial_state(&layout).unwrap();
    let cfg = IntegratorConfig::default();
    let params = DeviceParams::default();

    // Through step 4 the outer resonators and couplers are untouched.
    let upto: Vec<_> = schedule.segments.iter().take_while(|s| !s.label.starts_with("step-5")).cloned().collect();
    assert_eq!(upto.len(), 7);
    let partial = Schedule { segments: upto, noisy: false };
    let mid = execute(&layout, &params, &partial, &psi0, &cfg).unwrap();
    let mid = mid.state.as_vector().unwrap();
    for (sub, level) in [(layout.cavity_subsystem(0), 0), (layout.cavity_subsystem(3), 0), (layout.coupler_subsystem(0), 0), (layout.coupler_subsystem(2), 0)] {
        let rho = reduce_pure(mid, &[sub], layout.dims()).unwrap();
        assert!((rho.get(level, level).re - 1.0).abs() < 1e-9, "subsystem {sub}");
    }

    let end = execute(&layout, &params, &schedule, &psi0, &cfg).unwrap();
    let psi = end.state.as_vector().unwrap();
    let cav = reduce_pure(psi, &appendix_cavity_subsystems(&layout), layout.dims()).unwrap();
    let f = fidelity_to_vector(&QuantumState::Density(cav), &appendix_cavity_target(3)).unwrap();
    assert!(f > 1.0 - 1e-9, "fidelity {f}");
    let couplers = reduce_pure(psi, &appendix_coupler_subsystems(&layout), layout.dims()).unwrap();
    assert!(couplers.purity() > 1.0 - 1e-9);
}

#[test]
fn noisy_variant_without_noise_is_ideal() {
    let layout = NetworkLayout::chain(2, 2, 2).unwrap();
    let params = ideal(2);
    let (a, b) = even();
    let ic = InitialCondition::uniform(a, b, 2).unwrap();
    let main = main_schedule(&layout, &params, DispersiveModel::Effective).unwrap();
    let x = run_ideal(&layout, &params, &main, &ic);
    let y = run_ideal(&layout, &params, &noisy_variant(&main), &ic);
    assert!(x.iter().zip(&y).all(|(p, q)| (p - q).norm() < 1e-12));
}

#[test]
fn crosstalk_alone_costs_little() {
    let layout = NetworkLayout::chain(2, 2, 2).unwrap();
    let mut params = DeviceParams::transmon(2, mhz(14.15), 0.0).without_decoherence();
    for c in &mut params.cavities {
        c.g_tilde = 0.0;
        c.g_r_tilde = 0.0;
        c.omega_tilde = 0.0;
    }
    assert!(params.crosstalk.iter().any(|x| x.g > 0.0));
    let (a, b) = even();
    let ic = InitialCondition::uniform(a, b, 2).unwrap();
    let schedule = noisy_variant(&main_schedule(&layout, &params, DispersiveModel::Effective).unwrap());
    let psi = run_ideal(&layout, &params, &schedule, &ic);
    let f = fidelity(&QuantumState::vector(psi).unwrap(), &target_state(&layout, &ic).unwrap()).unwrap();
    assert!(f > 0.95 && f < 1.0, "fidelity {f}");
}

#[test]
fn pulse_phase_is_applied() {
    // φ = 0 instead of π/2 rotates about the other axis: |+> is no longer mapped to |g>.
    let layout = NetworkLayout::chain(1, 2, 2).unwrap();
    let mut params = ideal(1);
    params.pulse_phase = 0.0;
    let (a, b) = even();
    let ic = InitialCondition::uniform(a, b, 1).unwrap();
    let psi = run_ideal(&layout, &params, &main_schedule(&layout, &params, DispersiveModel::Effective).unwrap(), &ic);
    let f = fidelity(&QuantumState::vector(psi).unwrap(), &target_state(&layout, &ic).unwrap()).unwrap();
    assert!(f < 0.9);
}
