//! Interaction-picture Hamiltonian of the driven Λ system and its time-ordered
//! propagation.
//!
//! ```text
//! H(t) = Ω₀(t−t₀)(1 + e^{−2i f_e0 t})|e⟩⟨0| + Ω₁(t−t₀)(1 + e^{−2i f_e1 t})|e⟩⟨1| + h.c.
//! ```
//!
//! The envelope clock restarts at each pulse origin `t₀`; the counter-rotating
//! phases run on the absolute clock `t`. In [`Mode::Rwa`] the phase factors are
//! dropped (`1 + e^{…}` becomes 1).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulses::DriveSpec;
use crate::qstate::{expm_unitary, tolerance, Hermitian, Level, Matrix3, StateVector, Unitary};
use crate::scalar::{cis, Cplx, Real};

/// Nominal transmon transition frequencies, rad/s.
pub const TRANSMON_FE0: f64 = 5.0806e10;
pub const TRANSMON_FE1: f64 = 4.8580e10;

/// Transition angular frequencies of the two legs of the Λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSystem<T> {
    pub f_e0: T,
    pub f_e1: T,
}

impl<T: Real> LambdaSystem<T> {
    pub fn new(f_e0: T, f_e1: T) -> Result<Self> {
        for (name, f) in [("f_e0", f_e0), ("f_e1", f_e1)] {
            if !f.is_finite() {
                return Err(Error::NonFinite("transition frequency"));
            }
            if f < T::zero() {
                return Err(Error::invalid(name, "must be non-negative"));
            }
        }
        Ok(LambdaSystem { f_e0, f_e1 })
    }

    /// Both legs at the same frequency.
    pub fn degenerate(f: T) -> Result<Self> {
        Self::new(f, f)
    }

    /// `(5.0806e10, 4.8580e10)` rad/s.
    pub fn transmon() -> Self {
        LambdaSystem {
            f_e0: T::lit(TRANSMON_FE0),
            f_e1: T::lit(TRANSMON_FE1),
        }
    }

    /// The transmon frequencies divided by `(2π)²`, i.e. the 8.086 GHz and
    /// 7.732 GHz transitions entered as `ν/2π` instead of `2πν`. The reference
    /// envelope and duration fidelity tables correspond to this point.
    pub fn transmon_tabulated() -> Self {
        let scale = T::lit(4.0) * T::PI() * T::PI();
        LambdaSystem {
            f_e0: T::lit(TRANSMON_FE0) / scale,
            f_e1: T::lit(TRANSMON_FE1) / scale,
        }
    }

    pub fn max_frequency(&self) -> T {
        self.f_e0.max(self.f_e1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Counter-rotating terms retained.
    #[default]
    Full,
    /// Rotating wave approximation.
    Rwa,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Rwa => "rwa",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "rwa" => Ok(Mode::Rwa),
            other => Err(Error::invalid("mode", format!("unknown mode `{other}`"))),
        }
    }
}

pub const DEFAULT_STEPS_PER_CYCLE: usize = 40;
pub const DEFAULT_MIN_STEPS: usize = 2000;
pub const MIN_STEPS_PER_CYCLE: usize = 8;

/// Discretization of the time-ordered exponential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig<T> {
    pub mode: Mode,
    /// Midpoint samples per counter-rotating period `π / max f`.
    pub steps_per_cycle: usize,
    pub min_steps: usize,
    /// Absolute start time of the (first) pulse.
    pub time_origin: T,
}

impl<T: Real> Default for PropagationConfig<T> {
    fn default() -> Self {
        PropagationConfig {
            mode: Mode::Full,
            steps_per_cycle: DEFAULT_STEPS_PER_CYCLE,
            min_steps: DEFAULT_MIN_STEPS,
            time_origin: T::zero(),
        }
    }
}

impl<T: Real> PropagationConfig<T> {
    pub fn with_mode(mode: Mode) -> Self {
        PropagationConfig {
            mode,
            ..Default::default()
        }
    }

    /// Same configuration with the step size halved everywhere.
    pub fn refined(&self) -> Self {
        PropagationConfig {
            steps_per_cycle: self.steps_per_cycle * 2,
            min_steps: self.min_steps * 2,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_cycle < MIN_STEPS_PER_CYCLE {
            return Err(Error::invalid(
                "steps_per_cycle",
                format!(
                    "must be at least {MIN_STEPS_PER_CYCLE}, got {}",
                    self.steps_per_cycle
                ),
            ));
        }
        if self.min_steps == 0 {
            return Err(Error::invalid("min_steps", "must be positive"));
        }
        if !self.time_origin.is_finite() {
            return Err(Error::NonFinite("time origin"));
        }
        Ok(())
    }

    /// `N = max(min_steps, ⌈steps_per_cycle · τ · 2 max f / 2π⌉)`.
    pub fn step_count(&self, sys: &LambdaSystem<T>, duration: T) -> usize {
        let cycles = duration * T::lit(2.0) * sys.max_frequency() / (T::lit(2.0) * T::PI());
        let resolved = (T::from_usize_lossy(self.steps_per_cycle) * cycles).ceil();
        let resolved = resolved.to_usize().unwrap_or(usize::MAX);
        resolved.max(self.min_steps)
    }
}

fn counter_rotating<T: Real>(f: T, t: T, mode: Mode) -> Cplx<T> {
    match mode {
        Mode::Rwa => Cplx::new(T::one(), T::zero()),
        Mode::Full => Cplx::new(T::one(), T::zero()) + cis(-T::lit(2.0) * f * t),
    }
}

/// `H_I(t)` for a pulse whose envelope starts at `origin`.
pub fn hamiltonian_at<T: Real>(
    sys: &LambdaSystem<T>,
    drive: &DriveSpec<T>,
    t: T,
    origin: T,
    mode: Mode,
) -> Hermitian<T> {
    let local = t - origin;
    let e0 = drive.omega0(local) * counter_rotating(sys.f_e0, t, mode);
    let e1 = drive.omega1(local) * counter_rotating(sys.f_e1, t, mode);
    let mut m = Matrix3::zero();
    m.set(Level::Excited, Level::Zero, e0);
    m.set(Level::Excited, Level::One, e1);
    m.set(Level::Zero, Level::Excited, e0.conj());
    m.set(Level::One, Level::Excited, e1.conj());
    Hermitian::from_trusted(m)
}

/// Visits the midpoint-exponential step unitaries of one pulse in time order.
fn for_each_step<T: Real>(
    sys: &LambdaSystem<T>,
    drive: &DriveSpec<T>,
    origin: T,
    steps: usize,
    mode: Mode,
    mut visit: impl FnMut(&Unitary<T>),
) -> Result<()> {
    let h = drive.duration() / T::from_usize_lossy(steps);
    let half = T::lit(0.5);
    for k in 0..steps {
        let t_mid = origin + (T::from_usize_lossy(k) + half) * h;
        let ham = hamiltonian_at(sys, drive, t_mid, origin, mode);
        visit(&expm_unitary(&ham, h)?);
    }
    Ok(())
}

fn check_input<T: Real>(psi: &StateVector<T>) -> Result<()> {
    if !psi.is_finite() {
        return Err(Error::NonFinite("initial state"));
    }
    let drift = (psi.norm() - T::one()).abs();
    if drift > tolerance::<T>(1e-9, 64.0) {
        return Err(Error::invalid("initial state", "not normalized"));
    }
    Ok(())
}

/// Norm guard: 1e-9, or a few ulps per step for coarse scalars.
fn drift_tolerance<T: Real>(steps: usize) -> T {
    tolerance::<T>(1e-9, 4.0 * steps.max(64) as f64)
}

fn check_output<T: Real>(psi: StateVector<T>, steps: usize) -> Result<StateVector<T>> {
    if !psi.is_finite() {
        return Err(Error::NonFinite("propagated state"));
    }
    let drift = (psi.norm() - T::one()).abs();
    if drift > drift_tolerance::<T>(steps) {
        return Err(Error::NormDrift {
            deviation: drift.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(psi)
}

fn check_unitary<T: Real>(u: Unitary<T>, steps: usize) -> Result<Unitary<T>> {
    let dev = u.matrix().unitary_deviation();
    if !dev.is_finite() {
        return Err(Error::NonFinite("propagator"));
    }
    if dev > drift_tolerance::<T>(steps) {
        return Err(Error::NormDrift {
            deviation: dev.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(u)
}

/// Propagates `psi0` through one pulse with an explicit step count.
pub fn propagate_steps<T: Real>(
    sys: &LambdaSystem<T>,
    drive: &DriveSpec<T>,
    psi0: &StateVector<T>,
    cfg: &PropagationConfig<T>,
    steps: usize,
) -> Result<StateVector<T>> {
    cfg.validate()?;
    check_input(psi0)?;
    let required = cfg.step_count(sys, drive.duration());
    if steps < required {
        return Err(Error::StepResolution { steps, required });
    }
    let mut psi = *psi0;
    for_each_step(sys, drive, cfg.time_origin, steps, cfg.mode, |u| {
        psi = u.apply(&psi)
    })?;
    check_output(psi, steps)
}

/// `T exp(−i ∫ H_I dt)·ψ₀` over `[t₀, t₀ + τ]`.
pub fn propagate<T: Real>(
    sys: &LambdaSystem<T>,
    drive: &DriveSpec<T>,
    psi0: &StateVector<T>,
    cfg: &PropagationConfig<T>,
) -> Result<StateVector<T>> {
    let steps = cfg.step_count(sys, drive.duration());
    propagate_steps(sys, drive, psi0, cfg, steps)
}

/// Back-to-back pulses on one clock: pulse `k` starts where pulse `k−1` ended.
/// An empty list returns `psi0`.
pub fn propagate_sequence<T: Real>(
    sys: &LambdaSystem<T>,
    drives: &[DriveSpec<T>],
    psi0: &StateVector<T>,
    cfg: &PropagationConfig<T>,
) -> Result<StateVector<T>> {
    cfg.validate()?;
    check_input(psi0)?;
    let mut psi = *psi0;
    let mut origin = cfg.time_origin;
    let mut total_steps = 0;
    for drive in drives {
        let steps = cfg.step_count(sys, drive.duration());
        for_each_step(sys, drive, origin, steps, cfg.mode, |u| psi = u.apply(&psi))?;
        origin = origin + drive.duration();
        total_steps += steps;
    }
    check_output(psi, total_steps)
}

/// Full 3x3 propagator of one pulse.
pub fn propagator<T: Real>(
    sys: &LambdaSystem<T>,
    drive: &DriveSpec<T>,
    cfg: &PropagationConfig<T>,
) -> Result<Unitary<T>> {
    sequence_propagator(sys, std::slice::from_ref(drive), cfg)
}

/// Full 3x3 propagator of a back-to-back sequence.
pub fn sequence_propagator<T: Real>(
    sys: &LambdaSystem<T>,
    drives: &[DriveSpec<T>],
    cfg: &PropagationConfig<T>,
) -> Result<Unitary<T>> {
    cfg.validate()?;
    let mut total = Matrix3::identity();
    let mut origin = cfg.time_origin;
    let mut total_steps = 0;
    for drive in drives {
        let steps = cfg.step_count(sys, drive.duration());
        for_each_step(sys, drive, origin, steps, cfg.mode, |u| {
            total = *u.matrix() * total
        })?;
        origin = origin + drive.duration();
        total_steps += steps;
    }
    check_unitary(Unitary::from_trusted(total), total_steps)
}

/// `|⟨e|ψ⟩|²`.
pub fn excited_population<T: Real>(psi: &StateVector<T>) -> T {
    psi.population(Level::Excited)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{Envelope, EnvelopeKind};
    use crate::qstate::overlap;
    use num_complex::Complex;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn gaussian_drive(theta: f64, phi: f64, tau: f64) -> DriveSpec<f64> {
        let e = Envelope::standard(EnvelopeKind::TruncatedGaussian, tau).unwrap();
        DriveSpec::new(e, theta, phi).unwrap()
    }

    #[test]
    fn degenerate_frequency_doubles_coupling() {
        let sys = LambdaSystem::degenerate(0.0).unwrap();
        let d = gaussian_drive(FRAC_PI_2, PI, 40e-9);
        for t in [3e-9, 20e-9, 31e-9] {
            let full = hamiltonian_at(&sys, &d, t, 0.0, Mode::Full);
            let want = d.omega0(t) * 2.0;
            assert!((full.matrix().get(Level::Excited, Level::Zero) - want).norm() < 1e-6);
        }
    }

    #[test]
    fn rwa_entry_is_bare_drive() {
        let sys = LambdaSystem::transmon();
        let d = gaussian_drive(1.0, 0.3, 40e-9);
        let t = 13.7e-9;
        let h = hamiltonian_at(&sys, &d, t, 0.0, Mode::Rwa);
        assert_eq!(h.matrix().get(Level::Excited, Level::Zero), d.omega0(t));
        assert_eq!(h.matrix().get(Level::Excited, Level::One), d.omega1(t));
        assert_eq!(
            h.matrix().get(Level::Zero, Level::Excited),
            d.omega0(t).conj()
        );
    }

    #[test]
    fn counter_rotating_factor_cancels() {
        let f = 1e9;
        let sys = LambdaSystem::new(f, 2.0 * f).unwrap();
        let d = gaussian_drive(FRAC_PI_2, PI, 40e-9);
        let t = PI / (2.0 * f);
        let h = hamiltonian_at(&sys, &d, t, 0.0, Mode::Full);
        let entry = h.matrix().get(Level::Excited, Level::Zero);
        assert!(entry.norm() < 1e-9 * d.omega0(t).norm(), "{entry}");
    }

    #[test]
    fn envelope_follows_origin_phase_follows_clock() {
        let sys = LambdaSystem::degenerate(1e9).unwrap();
        let d = gaussian_drive(FRAC_PI_2, PI, 40e-9);
        let origin = 40e-9;
        let t = origin + 5e-9;
        let h = hamiltonian_at(&sys, &d, t, origin, Mode::Full);
        let want = d.omega0(5e-9) * (Complex::new(1.0, 0.0) + cis(-2.0 * 1e9 * t));
        assert!((h.matrix().get(Level::Excited, Level::Zero) - want).norm() < 1e-3);
    }

    #[test]
    fn step_count_formula() {
        let cfg = PropagationConfig::<f64>::default();
        let sys = LambdaSystem::transmon();
        let n = cfg.step_count(&sys, 40e-9);
        let want = (40.0 * 40e-9 * 2.0 * TRANSMON_FE0 / (2.0 * PI)).ceil() as usize;
        assert_eq!(n, want);
        assert_eq!(
            cfg.step_count(&LambdaSystem::degenerate(1e6).unwrap(), 40e-9),
            2000
        );
    }

    #[test]
    fn coarse_config_rejected() {
        let sys = LambdaSystem::transmon();
        let d = gaussian_drive(FRAC_PI_2, PI, 40e-9);
        let psi = StateVector::basis(Level::Zero);
        let cfg = PropagationConfig {
            steps_per_cycle: 4,
            ..Default::default()
        };
        assert!(matches!(
            propagate(&sys, &d, &psi, &cfg),
            Err(Error::InvalidParameter { .. })
        ));
        let cfg = PropagationConfig::default();
        let err = propagate_steps(&sys, &d, &psi, &cfg, 100).unwrap_err();
        assert!(matches!(err, Error::StepResolution { steps: 100, .. }));
        assert!(err.is_numerical());
    }

    #[test]
    fn invalid_systems_rejected() {
        assert!(LambdaSystem::new(-1.0, 0.0).is_err());
        assert!(LambdaSystem::new(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn empty_sequence_is_identity() {
        let sys = LambdaSystem::transmon();
        let psi = StateVector::bloch(0.3, 0.2);
        let out = propagate_sequence(&sys, &[], &psi, &PropagationConfig::default()).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn single_pulse_sequence_matches_propagate() {
        let sys = LambdaSystem::degenerate(1e9).unwrap();
        let d = gaussian_drive(FRAC_PI_2, PI, 40e-9);
        let psi = StateVector::basis(Level::Zero);
        let cfg = PropagationConfig::default();
        let a = propagate(&sys, &d, &psi, &cfg).unwrap();
        let b = propagate_sequence(&sys, &[d], &psi, &cfg).unwrap();
        assert_eq!(a, b);
        let c = propagator(&sys, &d, &cfg).unwrap().apply(&psi);
        assert!((overlap(&a, &c).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rwa_not_squared_is_identity() {
        let sys = LambdaSystem::transmon();
        let d = gaussian_drive(FRAC_PI_2, PI, 40e-9);
        let psi = StateVector::basis(Level::Zero);
        let cfg = PropagationConfig::with_mode(Mode::Rwa);
        let out = propagate_sequence(&sys, &[d, d], &psi, &cfg).unwrap();
        assert!((overlap(&out, &psi).unwrap().norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_frequency_full_equals_doubled_rwa() {
        let sys = LambdaSystem::degenerate(0.0).unwrap();
        let drive = gaussian_drive(0.9, -1.2, 40e-9);
        let doubled = drive.scaled(2.0);
        let psi = StateVector::bloch(1.3, 0.4);
        let full = propagate(&sys, &drive, &psi, &PropagationConfig::default()).unwrap();
        let rwa = propagate(
            &sys,
            &doubled,
            &psi,
            &PropagationConfig::with_mode(Mode::Rwa),
        )
        .unwrap();
        for (a, b) in full.amplitudes().iter().zip(rwa.amplitudes()) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn single_precision_propagation_stays_normalized() {
        let sys = LambdaSystem::<f32>::degenerate(1e8).unwrap();
        let e = Envelope::<f32>::standard(EnvelopeKind::Sin2, 40e-9).unwrap();
        let d = DriveSpec::new(e, std::f32::consts::FRAC_PI_2, std::f32::consts::PI).unwrap();
        let psi = StateVector::basis(Level::Zero);
        let cfg = PropagationConfig {
            mode: Mode::Rwa,
            min_steps: 200,
            ..Default::default()
        };
        let out = propagate(&sys, &d, &psi, &cfg).unwrap();
        assert!(out.population(Level::One) > 0.99);
    }
}
