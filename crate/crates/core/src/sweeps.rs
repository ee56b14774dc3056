//! Parameter sweeps over frequency, envelope, input state, duration and gate order.
//!
//! Points are evaluated in parallel and returned in parameter order. Every point
//! carries its full coordinates so a record can be read without its sweep.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dynamics::Mode;
use crate::error::{Error, Result};
use crate::gates::{average_report, gate_fidelity_report, sequence_average_report, InputState};
use crate::pulses::EnvelopeKind;
use crate::{Envelope, FidelityReport, GateSpec, LambdaSystem, PropagationConfig};

/// Transition frequencies of the frequency table, rad/s.
pub const FREQUENCY_TABLE: [f64; 6] = [1e6, 1e7, 1e8, 5e8, 1e9, 1e10];
/// Durations of the duration table, seconds.
pub const DURATION_TABLE: [f64; 4] = [100e-9, 40e-9, 10e-9, 2.5e-9];
pub const DEFAULT_DURATION: f64 = 40e-9;

/// Which transmon point and Hadamard drive a reproduction run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Transmon at `(5.0806e10, 4.8580e10)` rad/s, Hadamard at `(π/4, 0)`.
    Nominal,
    /// Transmon scaled by `1/(2π)²`, Hadamard at `(3π/4, 0)`; the point at which
    /// the reference fidelity tables are reproduced.
    #[default]
    Tabulated,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Nominal => "nominal",
            Preset::Tabulated => "tabulated",
        }
    }

    pub fn transmon(self) -> LambdaSystem {
        match self {
            Preset::Nominal => LambdaSystem::transmon(),
            Preset::Tabulated => LambdaSystem::transmon_tabulated(),
        }
    }

    pub fn hadamard(self) -> GateSpec {
        match self {
            Preset::Nominal => GateSpec::hadamard(),
            Preset::Tabulated => GateSpec::hadamard_swapped(),
        }
    }

    /// NOT and the preset's Hadamard.
    pub fn gates(self) -> [GateSpec; 2] {
        [GateSpec::not(), self.hadamard()]
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nominal" => Ok(Preset::Nominal),
            "tabulated" => Ok(Preset::Tabulated),
            other => Err(Error::invalid(
                "preset",
                format!("unknown preset `{other}`"),
            )),
        }
    }
}

/// Per-kind shape parameters shared by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeParams {
    /// Gaussian FWHM as a fraction of the duration.
    pub fwhm_fraction: f64,
    pub sech_beta: f64,
}

impl Default for ShapeParams {
    fn default() -> Self {
        ShapeParams {
            fwhm_fraction: EnvelopeKind::TruncatedGaussian.default_width(),
            sech_beta: EnvelopeKind::Sech.default_width(),
        }
    }
}

impl ShapeParams {
    pub fn width(&self, kind: EnvelopeKind) -> f64 {
        match kind {
            EnvelopeKind::TruncatedGaussian => self.fwhm_fraction,
            EnvelopeKind::Sech => self.sech_beta,
            _ => 0.0,
        }
    }

    pub fn envelope(&self, kind: EnvelopeKind, duration: f64) -> Result<Envelope> {
        Envelope::normalized(kind, duration, self.width(kind))
    }
}

/// A coordinate value of a sweep record.
#[derive(Debug, Clone, PartialEq)]
pub enum Coord {
    /// Angular frequency, rad/s; rendered in scientific notation.
    Freq(f64),
    Num(f64),
    Text(String),
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Freq(v) => write!(f, "{v:.4e}"),
            Coord::Num(v) => write!(f, "{v}"),
            Coord::Text(s) => f.write_str(s),
        }
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coord::Freq(v) | Coord::Num(v) => s.serialize_f64(*v),
            Coord::Text(t) => s.serialize_str(t),
        }
    }
}

/// One evaluated parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub coords: BTreeMap<&'static str, Coord>,
    pub fidelity: f64,
    /// Excited-state population of the exact output (mean over inputs when averaged).
    pub excited_population: f64,
    /// `arg ⟨ideal|exact⟩` for single-input points.
    pub overlap_phase: Option<f64>,
}

impl SweepPoint {
    pub fn coord(&self, name: &str) -> Option<&Coord> {
        self.coords.get(name)
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        match self.coords.get(name) {
            Some(Coord::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn number(&self, name: &str) -> Option<f64> {
        match self.coords.get(name) {
            Some(Coord::Freq(v) | Coord::Num(v)) => Some(*v),
            _ => None,
        }
    }
}

/// Coordinates common to every point of a sweep.
#[derive(Debug, Clone, Copy)]
struct Setting<'a> {
    sys: LambdaSystem,
    gate: &'a GateSpec,
    kind: EnvelopeKind,
    shape: &'a ShapeParams,
    tau: f64,
    cfg: &'a PropagationConfig,
}

impl Setting<'_> {
    fn coords(&self, input: &str) -> BTreeMap<&'static str, Coord> {
        let mut c = BTreeMap::new();
        c.insert("envelope", Coord::Text(self.kind.name().to_owned()));
        c.insert("fe0", Coord::Freq(self.sys.f_e0));
        c.insert("fe1", Coord::Freq(self.sys.f_e1));
        c.insert("gate", Coord::Text(self.gate.name.name().to_owned()));
        c.insert("input", Coord::Text(input.to_owned()));
        c.insert("mode", Coord::Text(self.cfg.mode.name().to_owned()));
        c.insert("phi", Coord::Num(self.gate.phi));
        c.insert(
            "steps_per_cycle",
            Coord::Num(self.cfg.steps_per_cycle as f64),
        );
        c.insert("tau_ns", Coord::Num(round_ns(self.tau)));
        c.insert("theta", Coord::Num(self.gate.theta));
        c.insert("width", Coord::Num(self.shape.width(self.kind)));
        c
    }

    fn single(&self, input: InputState) -> Result<SweepPoint> {
        let drive = self.gate.drive(self.shape.envelope(self.kind, self.tau)?)?;
        let r = gate_fidelity_report(&self.sys, self.gate, &drive, &input.state(), self.cfg)?;
        Ok(point(self.coords(input.label()), r, true))
    }

    fn averaged(&self) -> Result<SweepPoint> {
        let drive = self.gate.drive(self.shape.envelope(self.kind, self.tau)?)?;
        let r = average_report(&self.sys, self.gate, &drive, self.cfg)?;
        Ok(point(self.coords("avg"), r, false))
    }
}

/// Seconds to nanoseconds, trimmed of conversion noise.
fn round_ns(tau: f64) -> f64 {
    (tau * 1e9 * 1e9).round() / 1e9
}

fn point(coords: BTreeMap<&'static str, Coord>, r: FidelityReport, phase: bool) -> SweepPoint {
    SweepPoint {
        coords,
        fidelity: r.fidelity,
        excited_population: r.excited_population,
        overlap_phase: phase.then_some(r.overlap_phase),
    }
}

/// Single-input fidelity for each `(f, gate)` with `f_e0 = f_e1 = f`.
pub fn frequency_sweep(
    freqs: &[f64],
    gates: &[GateSpec],
    kind: EnvelopeKind,
    shape: &ShapeParams,
    tau: f64,
    input: InputState,
    cfg: &PropagationConfig,
) -> Result<Vec<SweepPoint>> {
    let jobs: Vec<(f64, &GateSpec)> = freqs
        .iter()
        .flat_map(|&f| gates.iter().map(move |g| (f, g)))
        .collect();
    jobs.par_iter()
        .map(|&(f, gate)| {
            let sys = LambdaSystem::degenerate(f)?;
            Setting {
                sys,
                gate,
                kind,
                shape,
                tau,
                cfg,
            }
            .single(input)
        })
        .collect()
}

/// Single-input fidelity on the `kind × input` grid.
pub fn envelope_input_sweep(
    kinds: &[EnvelopeKind],
    inputs: &[InputState],
    sys: &LambdaSystem,
    gate: &GateSpec,
    shape: &ShapeParams,
    tau: f64,
    cfg: &PropagationConfig,
) -> Result<Vec<SweepPoint>> {
    let jobs: Vec<(EnvelopeKind, InputState)> = kinds
        .iter()
        .flat_map(|&k| inputs.iter().map(move |&i| (k, i)))
        .collect();
    jobs.par_iter()
        .map(|&(kind, input)| {
            Setting {
                sys: *sys,
                gate,
                kind,
                shape,
                tau,
                cfg,
            }
            .single(input)
        })
        .collect()
}

/// Single-input fidelity on the `duration × kind` grid.
pub fn duration_sweep(
    durations: &[f64],
    kinds: &[EnvelopeKind],
    sys: &LambdaSystem,
    gate: &GateSpec,
    shape: &ShapeParams,
    input: InputState,
    cfg: &PropagationConfig,
) -> Result<Vec<SweepPoint>> {
    let jobs: Vec<(f64, EnvelopeKind)> = durations
        .iter()
        .flat_map(|&t| kinds.iter().map(move |&k| (t, k)))
        .collect();
    jobs.par_iter()
        .map(|&(tau, kind)| {
            Setting {
                sys: *sys,
                gate,
                kind,
                shape,
                tau,
                cfg,
            }
            .single(input)
        })
        .collect()
}

/// Input-averaged fidelity on the `gate × duration` grid (gate-major).
pub fn averaged_duration_sweep(
    durations: &[f64],
    gates: &[GateSpec],
    sys: &LambdaSystem,
    kind: EnvelopeKind,
    shape: &ShapeParams,
    cfg: &PropagationConfig,
) -> Result<Vec<SweepPoint>> {
    let jobs: Vec<(&GateSpec, f64)> = gates
        .iter()
        .flat_map(|g| durations.iter().map(move |&t| (g, t)))
        .collect();
    jobs.par_iter()
        .map(|&(gate, tau)| {
            Setting {
                sys: *sys,
                gate,
                kind,
                shape,
                tau,
                cfg,
            }
            .averaged()
        })
        .collect()
}

/// Series labels of [`sequence_sweep`] records.
pub const SERIES_FIRST_SECOND: &str = "first-second";
pub const SERIES_SECOND_FIRST: &str = "second-first";
pub const SERIES_PRODUCT: &str = "product";

/// Averaged fidelities of `first` then `second`, `second` then `first`, and the
/// product of the two single-gate averaged fidelities, for each per-pulse
/// duration. Three records per duration, in that order.
pub fn sequence_sweep(
    durations: &[f64],
    sys: &LambdaSystem,
    first: &GateSpec,
    second: &GateSpec,
    kind: EnvelopeKind,
    shape: &ShapeParams,
    cfg: &PropagationConfig,
) -> Result<Vec<SweepPoint>> {
    let per_tau: Vec<Result<[SweepPoint; 3]>> = durations
        .par_iter()
        .map(|&tau| {
            let envelope = shape.envelope(kind, tau)?;
            let d1 = first.drive(envelope)?;
            let d2 = second.drive(envelope)?;
            let fwd = sequence_average_report(sys, &[(*first, d1), (*second, d2)], cfg)?;
            let rev = sequence_average_report(sys, &[(*second, d2), (*first, d1)], cfg)?;
            let a = average_report(sys, first, &d1, cfg)?;
            let b = average_report(sys, second, &d2, cfg)?;
            let product = FidelityReport {
                fidelity: a.fidelity * b.fidelity,
                excited_population: 0.5 * (a.excited_population + b.excited_population),
                overlap_phase: 0.0,
            };

            let base = Setting {
                sys: *sys,
                gate: first,
                kind,
                shape,
                tau,
                cfg,
            }
            .coords("avg");
            let record = |series: &str, order: String, r: FidelityReport| {
                let mut c = base.clone();
                c.insert("gate", Coord::Text(order));
                c.remove("theta");
                c.remove("phi");
                c.insert("series", Coord::Text(series.to_owned()));
                point(c, r, false)
            };
            let (n1, n2) = (first.name.name(), second.name.name());
            Ok([
                record(SERIES_FIRST_SECOND, format!("{n1}>{n2}"), fwd),
                record(SERIES_SECOND_FIRST, format!("{n2}>{n1}"), rev),
                record(SERIES_PRODUCT, format!("{n1}*{n2}"), product),
            ])
        })
        .collect();
    let mut out = Vec::with_capacity(durations.len() * 3);
    for triple in per_tau {
        out.extend(triple?);
    }
    Ok(out)
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("grid", "bounds must satisfy 0 < lo <= hi"));
    }
    match n {
        0 => Err(Error::invalid("points", "must be positive")),
        1 => Ok(vec![lo]),
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (n - 1) as f64;
            Ok((0..n)
                .map(|i| match i {
                    0 => lo,
                    i if i == n - 1 => hi,
                    i => (a + step * i as f64).exp(),
                })
                .collect())
        }
    }
}

/// Fails when any fidelity moves by more than `tol` between two evaluations of
/// the same grid (e.g. at the default and at a refined step size).
pub fn check_convergence(coarse: &[SweepPoint], fine: &[SweepPoint], tol: f64) -> Result<f64> {
    if coarse.len() != fine.len() {
        return Err(Error::invalid("convergence", "grids differ in size"));
    }
    let worst = coarse
        .iter()
        .zip(fine)
        .map(|(a, b)| (a.fidelity - b.fidelity).abs())
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::NotConverged {
            change: worst,
            tolerance: tol,
        });
    }
    Ok(worst)
}

/// Finds the sech steepness `β` in `[lo, hi]` at which the single-input fidelity
/// equals `target`, by bisection. The fidelity must cross `target` on the bracket.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_sech_beta(
    sys: &LambdaSystem,
    gate: &GateSpec,
    tau: f64,
    input: InputState,
    target: f64,
    (lo, hi): (f64, f64),
    shape: &ShapeParams,
    cfg: &PropagationConfig,
) -> Result<f64> {
    let residual = |beta: f64| -> Result<f64> {
        let shape = ShapeParams {
            sech_beta: beta,
            ..*shape
        };
        let p = Setting {
            sys: *sys,
            gate,
            kind: EnvelopeKind::Sech,
            shape: &shape,
            tau,
            cfg,
        }
        .single(input)?;
        Ok(p.fidelity - target)
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (residual(a)?, residual(b)?);
    if fa * fb > 0.0 {
        return Err(Error::invalid(
            "sech calibration",
            format!("target {target} not bracketed by beta in [{lo}, {hi}]"),
        ));
    }
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let fm = residual(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
        if b - a < 1e-10 * b.abs() {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Propagation configuration for a mode with default discretization.
pub fn config_for(mode: Mode, steps_per_cycle: usize) -> PropagationConfig {
    PropagationConfig {
        mode,
        steps_per_cycle,
        ..Default::default()
    }
}
