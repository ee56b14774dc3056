//! Pulse envelopes, π-pulse normalization and the drive coefficient pair.
//!
//! A drive is `Ω_j(t) = c_j · A · g(t)` with one shared envelope `g` so that the
//! ratio `Ω₀/Ω₁` is time independent, and `A` chosen so that `∫ A·g dt = π`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::tolerance;
use crate::scalar::{cis, Cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeKind {
    #[serde(rename = "gaussian")]
    TruncatedGaussian,
    Sech,
    Parabola,
    Sin2,
    Square,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 5] = [
        EnvelopeKind::TruncatedGaussian,
        EnvelopeKind::Sech,
        EnvelopeKind::Parabola,
        EnvelopeKind::Sin2,
        EnvelopeKind::Square,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvelopeKind::TruncatedGaussian => "gaussian",
            EnvelopeKind::Sech => "sech",
            EnvelopeKind::Parabola => "parabola",
            EnvelopeKind::Sin2 => "sin2",
            EnvelopeKind::Square => "square",
        }
    }

    /// Default shape parameter: FWHM as a fraction of the duration for the
    /// Gaussian, the steepness `β` for sech, unused (0) otherwise.
    pub fn default_width(self) -> f64 {
        match self {
            EnvelopeKind::TruncatedGaussian => 0.25,
            EnvelopeKind::Sech => 5.3,
            _ => 0.0,
        }
    }
}

impl fmt::Display for EnvelopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvelopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnvelopeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid("envelope", format!("unknown kind `{s}`")))
    }
}

/// A pulse shape on `[0, τ]` scaled by `amplitude` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope<T> {
    kind: EnvelopeKind,
    duration: T,
    width: T,
    amplitude: T,
}

impl<T: Real> Envelope<T> {
    /// Unit-amplitude shape. `width` is interpreted per [`EnvelopeKind::default_width`].
    pub fn raw(kind: EnvelopeKind, duration: T, width: T) -> Result<Self> {
        if !duration.is_finite() || duration <= T::zero() {
            return Err(Error::invalid("duration", "must be finite and positive"));
        }
        if !width.is_finite() {
            return Err(Error::NonFinite("envelope width"));
        }
        match kind {
            EnvelopeKind::TruncatedGaussian | EnvelopeKind::Sech if width <= T::zero() => {
                return Err(Error::invalid(
                    "width",
                    format!("{kind} needs a positive width"),
                ));
            }
            _ => {}
        }
        Ok(Envelope {
            kind,
            duration,
            width,
            amplitude: T::one(),
        })
    }

    /// Shape with its default width, normalized to a π pulse.
    pub fn standard(kind: EnvelopeKind, duration: T) -> Result<Self> {
        Self::raw(kind, duration, T::lit(kind.default_width()))?.normalize_to_pi()
    }

    pub fn normalized(kind: EnvelopeKind, duration: T, width: T) -> Result<Self> {
        Self::raw(kind, duration, width)?.normalize_to_pi()
    }

    pub fn kind(&self) -> EnvelopeKind {
        self.kind
    }

    pub fn duration(&self) -> T {
        self.duration
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    /// Gaussian standard deviation `s = FWHM / (2√(2 ln 2))`.
    fn sigma(&self) -> T {
        let fwhm = self.width * self.duration;
        fwhm / (T::lit(2.0) * (T::lit(2.0) * T::LN_2()).sqrt())
    }

    /// Unscaled `g(t)`; zero outside `[0, τ]`.
    pub fn shape(&self, t: T) -> T {
        let tau = self.duration;
        if !(t >= T::zero() && t <= tau) {
            return T::zero();
        }
        let two = T::lit(2.0);
        // x ∈ [-1, 1] across the window
        let x = two * t / tau - T::one();
        match self.kind {
            EnvelopeKind::TruncatedGaussian => {
                let s = self.sigma();
                let d = t - tau / two;
                (-(d * d) / (two * s * s)).exp()
            }
            EnvelopeKind::Sech => T::one() / (self.width * x).cosh(),
            EnvelopeKind::Parabola => T::one() - x * x,
            EnvelopeKind::Sin2 => {
                let s = (T::PI() * t / tau).sin();
                s * s
            }
            EnvelopeKind::Square => T::one(),
        }
    }

    /// `A·g(t)` in rad/s.
    pub fn eval(&self, t: T) -> T {
        self.amplitude * self.shape(t)
    }

    /// `∫₀^τ A·g(t) dt`.
    pub fn area(&self) -> Result<T> {
        integrate(|t| self.eval(t), T::zero(), self.duration)
    }

    /// Rescales the amplitude so the pulse area is exactly π.
    pub fn normalize_to_pi(&self) -> Result<Self> {
        let raw_area = integrate(|t| self.shape(t), T::zero(), self.duration)?;
        if !raw_area.is_finite() {
            return Err(Error::NonFinite("envelope area"));
        }
        if raw_area <= T::zero() {
            return Err(Error::ZeroArea);
        }
        Ok(Envelope {
            amplitude: T::PI() / raw_area,
            ..*self
        })
    }
}

/// Free-function form of [`Envelope::eval`].
pub fn eval_envelope<T: Real>(e: &Envelope<T>, t: T) -> T {
    e.eval(t)
}

/// Free-function form of [`Envelope::normalize_to_pi`].
pub fn normalize_to_pi<T: Real>(e: &Envelope<T>) -> Result<Envelope<T>> {
    e.normalize_to_pi()
}

const MIN_PANELS: usize = 4096;
const MAX_PANELS: usize = 1 << 22;

fn simpson<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, panels: usize) -> T {
    let h = (b - a) / T::from_usize_lossy(panels);
    let mut odd = T::zero();
    let mut even = T::zero();
    for i in 1..panels {
        let v = f(a + h * T::from_usize_lossy(i));
        if i % 2 == 1 {
            odd = odd + v;
        } else {
            even = even + v;
        }
    }
    h / T::lit(3.0) * (f(a) + f(b) + T::lit(4.0) * odd + T::lit(2.0) * even)
}

/// Composite Simpson, doubling from 4096 panels until successive estimates agree
/// to 1e-13 relative.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T) -> Result<T> {
    let tol = tolerance::<T>(1e-13, 16.0);
    let mut panels = MIN_PANELS;
    let mut prev = simpson(&f, a, b, panels);
    let mut last_change = T::infinity();
    while panels < MAX_PANELS {
        panels *= 2;
        let next = simpson(&f, a, b, panels);
        if !next.is_finite() {
            return Err(Error::NonFinite("quadrature"));
        }
        let change = (next - prev).abs();
        if change.is_nan() {
            return Err(Error::NonFinite("quadrature"));
        }
        if change <= tol * next.abs() || change == T::zero() {
            return Ok(next);
        }
        last_change = change / next.abs();
        prev = next;
    }
    Err(Error::QuadratureDiverged {
        last_change: last_change.to_f64().unwrap_or(f64::NAN),
    })
}

/// Drive coefficients `(c₀, c₁)` with `c₀/c₁ = −tan(θ/2)e^{iφ}` and `c₁ ≥ 0` real.
///
/// At `θ = π` the ratio is singular; the limit pair `(−e^{iφ}, 0)` is returned.
pub fn drive_coefficients<T: Real>(theta: T, phi: T) -> Result<(Cplx<T>, Cplx<T>)> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::NonFinite("gate angles"));
    }
    if theta < T::zero() || theta > T::PI() {
        return Err(Error::invalid("theta", "must lie in [0, pi]"));
    }
    if phi.abs() > T::PI() {
        return Err(Error::invalid("phi", "must lie in [-pi, pi]"));
    }
    if theta == T::PI() {
        return Ok((-cis(phi), Cplx::zero()));
    }
    let half = theta / T::lit(2.0);
    Ok((-cis(phi) * half.sin(), Complex::new(half.cos(), T::zero())))
}

/// A π-normalized envelope with a fixed coefficient pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec<T> {
    envelope: Envelope<T>,
    c0: Cplx<T>,
    c1: Cplx<T>,
}

impl<T: Real> DriveSpec<T> {
    pub fn new(envelope: Envelope<T>, theta: T, phi: T) -> Result<Self> {
        let (c0, c1) = drive_coefficients(theta, phi)?;
        Ok(DriveSpec { envelope, c0, c1 })
    }

    pub fn envelope(&self) -> &Envelope<T> {
        &self.envelope
    }

    pub fn coefficients(&self) -> (Cplx<T>, Cplx<T>) {
        (self.c0, self.c1)
    }

    pub fn duration(&self) -> T {
        self.envelope.duration
    }

    /// `√(|Ω₀|² + |Ω₁|²) = A·g(t)`.
    /// Same drive with the amplitude multiplied by `factor`; the result is no
    /// longer a π pulse unless `factor == 1`.
    pub fn scaled(&self, factor: T) -> Self {
        let envelope = Envelope {
            amplitude: self.envelope.amplitude * factor,
            ..self.envelope
        };
        DriveSpec { envelope, ..*self }
    }

    pub fn rabi(&self, t: T) -> T {
        self.envelope.eval(t)
    }

    pub fn omega0(&self, t: T) -> Cplx<T> {
        self.c0 * self.envelope.eval(t)
    }

    pub fn omega1(&self, t: T) -> Cplx<T> {
        self.c1 * self.envelope.eval(t)
    }
}
