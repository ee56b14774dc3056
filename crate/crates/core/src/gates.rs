//! Ideal holonomic gates and fidelities against the propagated dynamics.
//!
//! With `Ω₀/Ω₁ = −tan(θ/2)e^{iφ}` and a π-pulse envelope the RWA evolution acts
//! on the computational subspace as `U = sinθ cosφ σx + sinθ sinφ σy + cosθ σz`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    propagate, propagator, sequence_propagator, LambdaSystem, PropagationConfig,
};
use crate::error::{Error, Result};
use crate::pulses::{DriveSpec, Envelope};
use crate::qstate::{overlap, Level, Matrix3, StateVector, Unitary};
use crate::scalar::{cis, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateName {
    Not,
    Hadamard,
    /// Hadamard with the roles of `|0⟩` and `|1⟩` exchanged, `θ = 3π/4`.
    HadamardSwapped,
    Custom,
}

impl GateName {
    pub fn name(self) -> &'static str {
        match self {
            GateName::Not => "not",
            GateName::Hadamard => "hadamard",
            GateName::HadamardSwapped => "hadamard-swapped",
            GateName::Custom => "custom",
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Gate parameterization `(θ, φ)` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSpec<T> {
    pub theta: T,
    pub phi: T,
    pub name: GateName,
}

impl<T: Real> GateSpec<T> {
    /// `(π/2, π)`: unit drive ratio, `U = −σx`.
    pub fn not() -> Self {
        GateSpec {
            theta: T::FRAC_PI_2(),
            phi: T::PI(),
            name: GateName::Not,
        }
    }

    /// `(π/4, 0)`: ratio `−tan(π/8)`, `U = (σx + σz)/√2`.
    pub fn hadamard() -> Self {
        GateSpec {
            theta: T::FRAC_PI_4(),
            phi: T::zero(),
            name: GateName::Hadamard,
        }
    }

    /// `(3π/4, 0)`: ratio `Ω₁/Ω₀ = −tan(π/8)`, `U = (σx − σz)/√2`.
    pub fn hadamard_swapped() -> Self {
        GateSpec {
            theta: T::lit(3.0) * T::FRAC_PI_4(),
            phi: T::zero(),
            name: GateName::HadamardSwapped,
        }
    }

    pub fn custom(theta: T, phi: T) -> Result<Self> {
        // drive_coefficients owns the range checks
        crate::pulses::drive_coefficients(theta, phi)?;
        Ok(GateSpec {
            theta,
            phi,
            name: GateName::Custom,
        })
    }

    /// The drive realizing this gate with the given π-normalized envelope.
    pub fn drive(&self, envelope: Envelope<T>) -> Result<DriveSpec<T>> {
        DriveSpec::new(envelope, self.theta, self.phi)
    }
}

impl<T: Real> FromStr for GateSpec<T> {
    type Err = Error;

    /// `not`, `hadamard`, `hadamard-swapped` or `custom(θ,φ)`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "not" => return Ok(Self::not()),
            "hadamard" => return Ok(Self::hadamard()),
            "hadamard-swapped" => return Ok(Self::hadamard_swapped()),
            _ => {}
        }
        let args = s
            .strip_prefix("custom(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| Error::invalid("gate", format!("unknown gate `{s}`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map(T::lit)
                .map_err(|_| Error::invalid("gate", format!("bad angle `{v}` in `{s}`")))
        };
        match args.split(',').collect::<Vec<_>>().as_slice() {
            [theta, phi] => Self::custom(parse(theta)?, parse(phi)?),
            _ => Err(Error::invalid(
                "gate",
                format!("expected custom(theta,phi), got `{s}`"),
            )),
        }
    }
}

/// `U(C)` on `span{|0⟩, |1⟩}`, identity on `|e⟩`.
pub fn ideal_gate<T: Real>(g: &GateSpec<T>) -> Unitary<T> {
    let (st, ct) = (g.theta.sin(), g.theta.cos());
    let off = cis(g.phi) * st;
    let mut m = Matrix3::zero();
    m.set(Level::Zero, Level::Zero, Complex::new(ct, T::zero()));
    m.set(Level::One, Level::One, Complex::new(-ct, T::zero()));
    // σx ± iσy halves of n·σ
    m.set(Level::One, Level::Zero, off);
    m.set(Level::Zero, Level::One, off.conj());
    m.set(
        Level::Excited,
        Level::Excited,
        Complex::new(T::one(), T::zero()),
    );
    Unitary::from_trusted(m)
}

/// Named computational-subspace inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InputState {
    /// `|0⟩`, the `+1` eigenstate of σz.
    Zero,
    One,
    /// `(|0⟩ + |1⟩)/√2`.
    PlusX,
    /// `(|0⟩ + i|1⟩)/√2`.
    PlusY,
}

impl InputState {
    /// The σx, σy, σz `+1` eigenstates in the reference column order.
    pub const PAULI_EIGENSTATES: [InputState; 3] =
        [InputState::PlusX, InputState::PlusY, InputState::Zero];

    pub fn label(self) -> &'static str {
        match self {
            InputState::Zero => "0",
            InputState::One => "1",
            InputState::PlusX => "+",
            InputState::PlusY => "+i",
        }
    }

    pub fn state<T: Real>(self) -> StateVector<T> {
        match self {
            InputState::Zero => StateVector::basis(Level::Zero),
            InputState::One => StateVector::basis(Level::One),
            InputState::PlusX => StateVector::bloch(T::FRAC_PI_2(), T::zero()),
            InputState::PlusY => StateVector::bloch(T::FRAC_PI_2(), T::FRAC_PI_2()),
        }
    }
}

impl fmt::Display for InputState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for InputState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(InputState::Zero),
            "1" => Ok(InputState::One),
            "+" | "+x" => Ok(InputState::PlusX),
            "+i" | "+y" => Ok(InputState::PlusY),
            other => Err(Error::invalid(
                "input",
                format!("unknown input state `{other}`"),
            )),
        }
    }
}

/// Fidelity of one input together with diagnostics of the exact output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport<T> {
    /// `|⟨ψ₀|U†·ψ_exact⟩|`.
    pub fidelity: T,
    /// `|⟨e|ψ_exact⟩|²`.
    pub excited_population: T,
    /// `arg ⟨Uψ₀|ψ_exact⟩`.
    pub overlap_phase: T,
}

fn check_computational<T: Real>(psi: &StateVector<T>) -> Result<()> {
    let amp = psi.amplitude(Level::Excited).norm();
    if amp > T::lit(1e-12) {
        return Err(Error::ExcitedInput {
            amplitude: amp.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

fn report<T: Real>(ideal: &StateVector<T>, exact: &StateVector<T>) -> Result<FidelityReport<T>> {
    let ov = overlap(ideal, exact)?;
    Ok(FidelityReport {
        fidelity: ov.norm(),
        excited_population: exact.population(Level::Excited),
        overlap_phase: if ov.is_zero() { T::zero() } else { ov.arg() },
    })
}

/// Full report for one input propagated by state stepping.
pub fn gate_fidelity_report<T: Real>(
    sys: &LambdaSystem<T>,
    g: &GateSpec<T>,
    drive: &DriveSpec<T>,
    psi0: &StateVector<T>,
    cfg: &PropagationConfig<T>,
) -> Result<FidelityReport<T>> {
    check_computational(psi0)?;
    let exact = propagate(sys, drive, psi0, cfg)?;
    let ideal = ideal_gate(g).apply(psi0);
    report(&ideal, &exact)
}

/// `|⟨ψ₀|U†(C)·T exp(−i∫H dt)|ψ₀⟩|`.
pub fn gate_fidelity<T: Real>(
    sys: &LambdaSystem<T>,
    g: &GateSpec<T>,
    drive: &DriveSpec<T>,
    psi0: &StateVector<T>,
    cfg: &PropagationConfig<T>,
) -> Result<T> {
    gate_fidelity_report(sys, g, drive, psi0, cfg).map(|r| r.fidelity)
}

/// Per-input reports for an already computed propagator and ideal unitary.
pub fn reports_for_inputs<T: Real>(
    exact: &Unitary<T>,
    ideal: &Unitary<T>,
    inputs: &[InputState],
) -> Result<Vec<FidelityReport<T>>> {
    inputs
        .iter()
        .map(|input| {
            let psi = input.state::<T>();
            report(&ideal.apply(&psi), &exact.apply(&psi))
        })
        .collect()
}

/// Mean over inputs of fidelity and excited population; the phase is not averaged
/// and is left at zero.
pub fn mean_report<T: Real>(reports: &[FidelityReport<T>]) -> FidelityReport<T> {
    let n = T::from_usize_lossy(reports.len().max(1));
    let (f, p) = reports.iter().fold((T::zero(), T::zero()), |(f, p), r| {
        (f + r.fidelity, p + r.excited_population)
    });
    FidelityReport {
        fidelity: f / n,
        excited_population: p / n,
        overlap_phase: T::zero(),
    }
}

/// Mean [`gate_fidelity`] over `|0⟩`, `(|0⟩+|1⟩)/√2`, `(|0⟩+i|1⟩)/√2`.
pub fn average_fidelity<T: Real>(
    sys: &LambdaSystem<T>,
    g: &GateSpec<T>,
    drive: &DriveSpec<T>,
    cfg: &PropagationConfig<T>,
) -> Result<T> {
    average_report(sys, g, drive, cfg).map(|r| r.fidelity)
}

pub fn average_report<T: Real>(
    sys: &LambdaSystem<T>,
    g: &GateSpec<T>,
    drive: &DriveSpec<T>,
    cfg: &PropagationConfig<T>,
) -> Result<FidelityReport<T>> {
    let exact = propagator(sys, drive, cfg)?;
    let reports = reports_for_inputs(&exact, &ideal_gate(g), &InputState::PAULI_EIGENSTATES)?;
    Ok(mean_report(&reports))
}

/// Averaged fidelity of gates applied back to back in the given order; the ideal
/// reference is the product of the ideal unitaries in application order.
pub fn sequence_average_report<T: Real>(
    sys: &LambdaSystem<T>,
    steps: &[(GateSpec<T>, DriveSpec<T>)],
    cfg: &PropagationConfig<T>,
) -> Result<FidelityReport<T>> {
    let drives: Vec<_> = steps.iter().map(|(_, d)| *d).collect();
    let exact = sequence_propagator(sys, &drives, cfg)?;
    let ideal = steps
        .iter()
        .fold(Unitary::identity(), |acc, (g, _)| ideal_gate(g).after(&acc));
    let reports = reports_for_inputs(&exact, &ideal, &InputState::PAULI_EIGENSTATES)?;
    Ok(mean_report(&reports))
}
