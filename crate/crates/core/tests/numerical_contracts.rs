use lambda_holo_core::dynamics::propagator;
use lambda_holo_core::sweeps::{self, DURATION_TABLE, FREQUENCY_TABLE};
use lambda_holo_core::{
    EnvelopeKind, GateSpec, InputState, LambdaSystem, Mode, Preset, PropagationConfig, ShapeParams,
};

#[test]
fn propagators_stay_unitary() {
    let cfg = PropagationConfig::default();
    let shape = ShapeParams::default();
    for f in FREQUENCY_TABLE
        .into_iter()
        .chain([Preset::Nominal.transmon().f_e0])
    {
        let sys = LambdaSystem::degenerate(f).unwrap();
        for kind in EnvelopeKind::ALL {
            for tau in DURATION_TABLE {
                let drive = GateSpec::not()
                    .drive(shape.envelope(kind, tau).unwrap())
                    .unwrap();
                let u = propagator(&sys, &drive, &cfg).unwrap();
                assert!(u.matrix().unitary_deviation() <= 1e-9, "{f} {kind} {tau}");
            }
        }
    }
}

#[test]
fn zero_frequency_doubles_the_drive() {
    let sys = LambdaSystem::degenerate(0.0).unwrap();
    let full = PropagationConfig::with_mode(Mode::Full);
    let rwa = PropagationConfig::with_mode(Mode::Rwa);
    for gate in [
        GateSpec::not(),
        GateSpec::hadamard(),
        GateSpec::custom(1.0, -2.0).unwrap(),
    ] {
        for kind in EnvelopeKind::ALL {
            let drive = gate
                .drive(ShapeParams::default().envelope(kind, 40e-9).unwrap())
                .unwrap();
            let a = propagator(&sys, &drive, &full).unwrap();
            let b = propagator(&sys, &drive.scaled(2.0), &rwa).unwrap();
            let d = a.matrix().max_abs_diff(b.matrix());
            assert!(d <= 1e-8, "{kind} {gate:?}: {d:e}");
        }
    }
}

#[test]
fn plateau_is_converged() {
    let sys = Preset::Tabulated.transmon();
    let cfg = PropagationConfig::default();
    let shape = ShapeParams::default();
    let durations = [100e-9, 40e-9];
    let coarse = sweeps::duration_sweep(
        &durations,
        &EnvelopeKind::ALL,
        &sys,
        &GateSpec::not(),
        &shape,
        InputState::Zero,
        &cfg,
    )
    .unwrap();
    let fine = sweeps::duration_sweep(
        &durations,
        &EnvelopeKind::ALL,
        &sys,
        &GateSpec::not(),
        &shape,
        InputState::Zero,
        &cfg.refined(),
    )
    .unwrap();
    let worst = sweeps::check_convergence(&coarse, &fine, 1e-4).unwrap();
    assert!(worst < 1e-4);
}
