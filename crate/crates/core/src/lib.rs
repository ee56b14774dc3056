//! Exact versus rotating-wave propagation of non-adiabatic holonomic single-qubit
//! gates in a three-level Λ system.
//!
//! The numerical modules are generic over the real scalar ([`Real`], implemented
//! for `f32` and `f64`); the aliases at the crate root fix it to `f64`, which is
//! what the sweep harness and the CLI use.

pub mod dynamics;
pub mod error;
pub mod gates;
pub mod pulses;
pub mod qstate;
pub mod scalar;
pub mod sweeps;

pub use error::{Error, Result};
pub use scalar::Real;

pub use dynamics::{Mode, TRANSMON_FE0, TRANSMON_FE1};
pub use gates::{FidelityReport as GenericFidelityReport, GateName, InputState};
pub use pulses::EnvelopeKind;
pub use qstate::Level;
pub use sweeps::{Preset, ShapeParams, SweepPoint};

pub type Complex = num_complex::Complex<f64>;
pub type StateVector = qstate::StateVector<f64>;
pub type Matrix3 = qstate::Matrix3<f64>;
pub type Hermitian = qstate::Hermitian<f64>;
pub type Unitary = qstate::Unitary<f64>;
pub type Envelope = pulses::Envelope<f64>;
pub type DriveSpec = pulses::DriveSpec<f64>;
pub type LambdaSystem = dynamics::LambdaSystem<f64>;
pub type PropagationConfig = dynamics::PropagationConfig<f64>;
pub type GateSpec = gates::GateSpec<f64>;
pub type FidelityReport = gates::FidelityReport<f64>;

pub type StateVector32 = qstate::StateVector<f32>;
pub type LambdaSystem32 = dynamics::LambdaSystem<f32>;
pub type DriveSpec32 = pulses::DriveSpec<f32>;
pub type PropagationConfig32 = dynamics::PropagationConfig<f32>;
