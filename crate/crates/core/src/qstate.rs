//! Three-level state vectors and 3x3 complex matrices.
//!
//! Every vector and matrix is expressed in the fixed basis `(|0⟩, |1⟩, |e⟩)`;
//! index 0 and 1 span the computational subspace and index 2 is the auxiliary
//! excited state.

use std::ops::Mul;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, is_finite_c, Cplx, Real};

/// Basis label of the Λ system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Zero,
    One,
    Excited,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Zero, Level::One, Level::Excited];

    pub const fn index(self) -> usize {
        match self {
            Level::Zero => 0,
            Level::One => 1,
            Level::Excited => 2,
        }
    }
}

/// Tolerance `base` for `f64`, widened to a few ulps for coarser scalars.
pub fn tolerance<T: Real>(base: f64, ulps: f64) -> T {
    T::lit(base).max(T::epsilon() * T::lit(ulps))
}

fn norm_tolerance<T: Real>() -> T {
    tolerance(1e-9, 64.0)
}

/// Normalized amplitude vector over `(|0⟩, |1⟩, |e⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector<T> {
    amps: [Cplx<T>; 3],
}

impl<T: Real> StateVector<T> {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(amps: [Cplx<T>; 3]) -> Result<Self> {
        if !amps.iter().all(|&z| is_finite_c(z)) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let state = StateVector { amps };
        let drift = (state.norm() - T::one()).abs();
        if drift > norm_tolerance::<T>() {
            return Err(Error::invalid(
                "state",
                format!(
                    "norm differs from 1 by {:e}",
                    drift.to_f64().unwrap_or(f64::NAN)
                ),
            ));
        }
        Ok(state)
    }

    /// Builds a state by rescaling arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amps: [Cplx<T>; 3]) -> Result<Self> {
        if !amps.iter().all(|&z| is_finite_c(z)) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = amps
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if norm == T::zero() {
            return Err(Error::invalid("state", "zero vector"));
        }
        Ok(StateVector {
            amps: amps.map(|z| z / norm),
        })
    }

    pub fn basis(level: Level) -> Self {
        let mut amps = [Cplx::zero(); 3];
        amps[level.index()] = Cplx::one();
        StateVector { amps }
    }

    /// `cos(θ/2)|0⟩ + sin(θ/2)e^{iφ}|1⟩`, the `+1` eigenstate of `n(θ, φ)·σ`.
    pub fn bloch(theta: T, phi: T) -> Self {
        let half = theta / T::lit(2.0);
        StateVector {
            amps: [
                Complex::new(half.cos(), T::zero()),
                cis(phi) * half.sin(),
                Cplx::zero(),
            ],
        }
    }

    /// Unnormalized result of a matrix product; norm drift stays observable.
    pub(crate) fn from_raw(amps: [Cplx<T>; 3]) -> Self {
        StateVector { amps }
    }

    pub fn amplitudes(&self) -> &[Cplx<T>; 3] {
        &self.amps
    }

    pub fn amplitude(&self, level: Level) -> Cplx<T> {
        self.amps[level.index()]
    }

    pub fn norm(&self) -> T {
        self.amps
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn population(&self, level: Level) -> T {
        self.amps[level.index()].norm_sqr()
    }

    /// Multiplies every amplitude by `e^{iα}`.
    pub fn with_global_phase(&self, alpha: T) -> Self {
        let p = cis(alpha);
        StateVector {
            amps: self.amps.map(|z| z * p),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|&z| is_finite_c(z))
    }
}

/// `⟨a|b⟩`.
pub fn overlap<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Cplx<T>> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite("overlap operand"));
    }
    Ok(a.amps
        .iter()
        .zip(b.amps.iter())
        .fold(Cplx::zero(), |acc, (x, y)| acc + x.conj() * y))
}

/// Dense 3x3 complex matrix, row-major over `(|0⟩, |1⟩, |e⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix3<T> {
    m: [[Cplx<T>; 3]; 3],
}

impl<T: Real> Matrix3<T> {
    pub fn from_rows(m: [[Cplx<T>; 3]; 3]) -> Self {
        Matrix3 { m }
    }

    pub fn zero() -> Self {
        Matrix3 {
            m: [[Cplx::zero(); 3]; 3],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.m[i][i] = Cplx::one();
        }
        m
    }

    pub fn rows(&self) -> &[[Cplx<T>; 3]; 3] {
        &self.m
    }

    pub fn get(&self, row: Level, col: Level) -> Cplx<T> {
        self.m[row.index()][col.index()]
    }

    pub fn set(&mut self, row: Level, col: Level, value: Cplx<T>) {
        self.m[row.index()][col.index()] = value;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        Matrix3 {
            m: self.m.map(|row| row.map(|z| z * s)),
        }
    }

    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|&z| is_finite_c(z))
    }

    /// `max |M - M†|`.
    pub fn hermitian_deviation(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |M†M - I|`.
    pub fn unitary_deviation(&self) -> T {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn apply(&self, psi: &StateVector<T>) -> StateVector<T> {
        let mut out = [Cplx::zero(); 3];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = (0..3).fold(Cplx::zero(), |acc, j| acc + self.m[i][j] * psi.amps[j]);
        }
        StateVector::from_raw(out)
    }
}

impl<T: Real> Mul for Matrix3<T> {
    type Output = Matrix3<T>;

    fn mul(self, rhs: Self) -> Self {
        let mut out = Matrix3::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = (0..3).fold(Cplx::zero(), |acc, k| acc + self.m[i][k] * rhs.m[k][j]);
            }
        }
        out
    }
}

/// `m·ψ` without renormalization.
pub fn apply<T: Real>(m: &Matrix3<T>, psi: &StateVector<T>) -> Result<StateVector<T>> {
    if !m.is_finite() || !psi.is_finite() {
        return Err(Error::NonFinite("apply operand"));
    }
    Ok(m.apply(psi))
}

/// A matrix checked to be Hermitian.
///
/// The check is relative: `max |M - M†| ≤ 1e-12 · max(1, max |M|)`, since drive
/// Hamiltonians carry entries of order 1e8 rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian<T>(Matrix3<T>);

impl<T: Real> Hermitian<T> {
    pub fn new(m: Matrix3<T>) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("hermitian matrix"));
        }
        let dev = m.hermitian_deviation();
        let scale = m.max_abs().max(T::one());
        if dev > tolerance::<T>(1e-12, 8.0) * scale {
            return Err(Error::NotHermitian {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Hermitian(m))
    }

    /// Matrices assembled as `A + A†` by construction.
    pub(crate) fn from_trusted(m: Matrix3<T>) -> Self {
        Hermitian(m)
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.0
    }

    /// Eigenvalues and eigenvectors (columns of the returned matrix) by cyclic
    /// complex Jacobi rotations. Eigenvalues are unsorted.
    pub fn eigh(&self) -> ([T; 3], Matrix3<T>) {
        let mut a = self.0;
        // exact Hermitian symmetry before rotating
        for i in 0..3 {
            a.m[i][i] = Complex::new(a.m[i][i].re, T::zero());
            for j in (i + 1)..3 {
                a.m[j][i] = a.m[i][j].conj();
            }
        }
        let mut v = Matrix3::identity();
        let frob =
            a.m.iter()
                .flatten()
                .map(|z| z.norm_sqr())
                .fold(T::zero(), |x, y| x + y);
        let floor = T::epsilon() * T::epsilon() * frob;

        for _sweep in 0..64 {
            let off = a.m[0][1].norm_sqr() + a.m[0][2].norm_sqr() + a.m[1][2].norm_sqr();
            if off <= floor {
                break;
            }
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                let apq = a.m[p][q];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let phase = apq / mag;
                let app = a.m[p][p].re;
                let aqq = a.m[q][q].re;
                let theta = (aqq - app) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                let mut g = Matrix3::identity();
                g.m[p][p] = Complex::new(c, T::zero());
                g.m[p][q] = Complex::new(s, T::zero());
                g.m[q][p] = phase.conj() * (-s);
                g.m[q][q] = phase.conj() * c;

                a = g.adjoint() * a * g;
                a.m[p][q] = Cplx::zero();
                a.m[q][p] = Cplx::zero();
                v = v * g;
            }
        }
        ([a.m[0][0].re, a.m[1][1].re, a.m[2][2].re], v)
    }
}

/// A matrix known to be unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary<T>(Matrix3<T>);

impl<T: Real> Unitary<T> {
    /// Accepts `m` when `‖M†M − I‖_max ≤ 1e-9`.
    pub fn new(m: Matrix3<T>) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("unitary matrix"));
        }
        let dev = m.unitary_deviation();
        if dev > tolerance::<T>(1e-9, 64.0) {
            return Err(Error::invalid(
                "unitary",
                format!("|M^dagger M - I| = {:e}", dev.to_f64().unwrap_or(f64::NAN)),
            ));
        }
        Ok(Unitary(m))
    }

    /// Products of unitaries built inside the crate.
    pub(crate) fn from_trusted(m: Matrix3<T>) -> Self {
        Unitary(m)
    }

    pub fn identity() -> Self {
        Unitary(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.0
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &Unitary<T>) -> Unitary<T> {
        Unitary(self.0 * first.0)
    }

    pub fn apply(&self, psi: &StateVector<T>) -> StateVector<T> {
        self.0.apply(psi)
    }
}

/// `exp(−i·h·dt)` through the eigendecomposition of `h`.
pub fn expm_unitary<T: Real>(h: &Hermitian<T>, dt: T) -> Result<Unitary<T>> {
    if !dt.is_finite() {
        return Err(Error::NonFinite("time step"));
    }
    let (vals, vecs) = h.eigh();
    let phases = vals.map(|lambda| cis(-lambda * dt));
    let mut out = Matrix3::zero();
    for i in 0..3 {
        for j in 0..3 {
            out.m[i][j] = (0..3).fold(Cplx::zero(), |acc, k| {
                acc + vecs.m[i][k] * phases[k] * vecs.m[j][k].conj()
            });
        }
    }
    Ok(Unitary(out))
}
