//! In the rotating-wave limit a π pulse with a fixed drive ratio is exactly the
//! holonomic gate, for every envelope and every (θ, φ).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use lambda_holo_core::dynamics::{propagate, propagator};
use lambda_holo_core::gates::{ideal_gate, reports_for_inputs};
use lambda_holo_core::qstate::overlap;
use lambda_holo_core::sweeps::ShapeParams;
use lambda_holo_core::{
    EnvelopeKind, GateSpec, InputState, Level, Mode, Preset, PropagationConfig, StateVector,
};

const THETAS: [f64; 5] = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI];
const PHIS: [f64; 5] = [-PI, -FRAC_PI_2, 0.0, 1.0, PI];
const INPUTS: [InputState; 4] = [
    InputState::Zero,
    InputState::One,
    InputState::PlusX,
    InputState::PlusY,
];

fn grid() -> impl Iterator<Item = (EnvelopeKind, GateSpec)> {
    EnvelopeKind::ALL.into_iter().flat_map(|k| {
        THETAS.into_iter().flat_map(move |t| {
            PHIS.into_iter()
                .map(move |p| (k, GateSpec::custom(t, p).unwrap()))
        })
    })
}

#[test]
fn rwa_realizes_ideal_gate() {
    let sys = Preset::Tabulated.transmon();
    let cfg = PropagationConfig::with_mode(Mode::Rwa);
    for (kind, gate) in grid() {
        let drive = gate
            .drive(ShapeParams::default().envelope(kind, 40e-9).unwrap())
            .unwrap();
        let u = propagator(&sys, &drive, &cfg).unwrap();
        assert!(u.matrix().unitary_deviation() <= 1e-9);
        for r in reports_for_inputs(&u, &ideal_gate(&gate), &INPUTS).unwrap() {
            assert!(1.0 - r.fidelity <= 1e-6, "{kind} {gate:?}: {}", r.fidelity);
            assert!(
                r.excited_population <= 1e-10,
                "{kind} {gate:?}: leak {}",
                r.excited_population
            );
        }
    }
}

#[test]
fn dark_state_is_untouched_and_bright_state_flips() {
    let sys = Preset::Tabulated.transmon();
    let cfg = PropagationConfig::with_mode(Mode::Rwa);
    for (kind, gate) in grid() {
        let drive = gate
            .drive(ShapeParams::default().envelope(kind, 40e-9).unwrap())
            .unwrap();
        let dark = StateVector::bloch(gate.theta, gate.phi);
        let out = propagate(&sys, &drive, &dark, &cfg).unwrap();
        let ov = overlap(&dark, &out).unwrap();
        assert!(
            (ov - 1.0).norm() <= 1e-8,
            "{kind} {gate:?}: dark overlap {ov}"
        );

        let bright = StateVector::bloch(PI - gate.theta, gate.phi + PI);
        let out = propagate(&sys, &drive, &bright, &cfg).unwrap();
        let ov = overlap(&bright, &out).unwrap();
        assert!((ov.norm() - 1.0).abs() <= 1e-8);
        assert!(
            (ov.arg().abs() - PI).abs() <= 1e-6,
            "{kind} {gate:?}: bright phase {}",
            ov.arg()
        );
        assert!(out.population(Level::Excited) <= 1e-10);
    }
}
