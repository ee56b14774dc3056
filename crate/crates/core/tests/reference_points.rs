//! Published fidelity values at individual parameter points.
//!
//! Transmon entries use the tabulated transmon point and the swapped-label
//! Hadamard, see `Preset::Tabulated`.

use lambda_holo_core::gates::{average_fidelity, gate_fidelity, sequence_average_report};
use lambda_holo_core::sweeps::{Preset, ShapeParams};
use lambda_holo_core::{EnvelopeKind, GateSpec, InputState, LambdaSystem, Mode, PropagationConfig};

const NS: f64 = 1e-9;

fn fidelity(
    sys: LambdaSystem,
    gate: GateSpec,
    kind: EnvelopeKind,
    tau_ns: f64,
    input: InputState,
) -> f64 {
    let env = ShapeParams::default().envelope(kind, tau_ns * NS).unwrap();
    let drive = gate.drive(env).unwrap();
    gate_fidelity(
        &sys,
        &gate,
        &drive,
        &input.state(),
        &PropagationConfig::default(),
    )
    .unwrap()
}

fn averaged(sys: LambdaSystem, gate: GateSpec, tau_ns: f64) -> f64 {
    let env = ShapeParams::default()
        .envelope(EnvelopeKind::TruncatedGaussian, tau_ns * NS)
        .unwrap();
    let drive = gate.drive(env).unwrap();
    average_fidelity(&sys, &gate, &drive, &PropagationConfig::default()).unwrap()
}

fn near(label: &str, got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "{label}: got {got:.6}, want {want} ± {tol}"
    );
}

#[test]
#[allow(clippy::approx_constant)]
fn frequency_table_points() {
    use EnvelopeKind::TruncatedGaussian as G;
    let deg = |f| LambdaSystem::degenerate(f).unwrap();
    let h = Preset::Tabulated.hadamard();
    near(
        "NOT 1e10",
        fidelity(deg(1e10), GateSpec::not(), G, 40.0, InputState::Zero),
        1.0,
        5e-4,
    );
    near(
        "NOT 1e6",
        fidelity(deg(1e6), GateSpec::not(), G, 40.0, InputState::Zero),
        0.0037,
        5e-3,
    );
    near(
        "NOT 1e7",
        fidelity(deg(1e7), GateSpec::not(), G, 40.0, InputState::Zero),
        0.0394,
        1e-2,
    );
    near(
        "H 1e9",
        fidelity(deg(1e9), h, G, 40.0, InputState::Zero),
        0.9994,
        2e-3,
    );
    near(
        "H 1e6",
        fidelity(deg(1e6), h, G, 40.0, InputState::Zero),
        0.7071,
        5e-3,
    );
}

#[test]
fn envelope_table_points() {
    let sys = Preset::Tabulated.transmon();
    let not = GateSpec::not();
    let cases = [
        (EnvelopeKind::TruncatedGaussian, InputState::PlusX, 0.9999),
        (EnvelopeKind::TruncatedGaussian, InputState::Zero, 0.9861),
        (EnvelopeKind::Parabola, InputState::Zero, 0.9988),
        (EnvelopeKind::Square, InputState::PlusY, 0.9989),
    ];
    for (kind, input, want) in cases {
        near(
            &format!("{kind} {}", input.label()),
            fidelity(sys, not, kind, 40.0, input),
            want,
            5e-3,
        );
    }
}

#[test]
fn duration_table_points() {
    let sys = Preset::Tabulated.transmon();
    let not = GateSpec::not();
    let z = InputState::Zero;
    near(
        "gaussian 100",
        fidelity(sys, not, EnvelopeKind::TruncatedGaussian, 100.0, z),
        0.9987,
        5e-3,
    );
    near(
        "square 10",
        fidelity(sys, not, EnvelopeKind::Square, 10.0, z),
        0.9991,
        5e-3,
    );
    near(
        "gaussian 2.5",
        fidelity(sys, not, EnvelopeKind::TruncatedGaussian, 2.5, z),
        0.1790,
        5e-2,
    );
}

#[test]
fn averaged_plateau_and_breakdown() {
    let sys = Preset::Tabulated.transmon();
    let not = GateSpec::not();
    assert!(
        fidelity(
            sys,
            not,
            EnvelopeKind::TruncatedGaussian,
            100.0,
            InputState::Zero
        ) >= 0.998
    );
    assert!(averaged(sys, not, 100.0) >= 0.99);
    assert!(averaged(sys, not, 2.5) < 0.9);
}

#[test]
fn gate_order_matters() {
    let sys = Preset::Tabulated.transmon();
    let cfg = PropagationConfig::default();
    let env = ShapeParams::default()
        .envelope(EnvelopeKind::TruncatedGaussian, 40.0 * NS)
        .unwrap();
    let (n, h) = (GateSpec::not(), Preset::Tabulated.hadamard());
    let (dn, dh) = (n.drive(env).unwrap(), h.drive(env).unwrap());
    let hn = sequence_average_report(&sys, &[(h, dh), (n, dn)], &cfg)
        .unwrap()
        .fidelity;
    let nh = sequence_average_report(&sys, &[(n, dn), (h, dh)], &cfg)
        .unwrap()
        .fidelity;
    assert!((hn - nh).abs() > 1e-4, "H-NOT {hn} vs NOT-H {nh}");

    let rwa = PropagationConfig::with_mode(Mode::Rwa);
    let hn = sequence_average_report(&sys, &[(h, dh), (n, dn)], &rwa)
        .unwrap()
        .fidelity;
    near("rwa H-NOT", hn, 1.0, 1e-6);
}
