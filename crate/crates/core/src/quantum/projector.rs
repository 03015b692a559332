//! Waveplate analyzers and the rank-1 projectors they realize.
//!
//! Jones matrices (fast axis at `theta` from horizontal, global phase dropped):
//!
//! ```text
//! HWP(theta) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]]
//! QWP(theta) = [[cos^2 t + i sin^2 t, (1 - i) sin t cos t],
//!               [(1 - i) sin t cos t, sin^2 t + i cos^2 t]]
//! ```
//!
//! The analyzer transmits the input polarization `psi` for which
//! `QWP(q) HWP(h) psi` is horizontal, i.e. `psi = HWP(h) QWP(q)^dagger |H>`.

use nalgebra::{Complex, Matrix2, Vector2, Vector4};

use super::density::DensityOperator;
use super::pauli::bloch_vector;
use crate::scalar::{lit, Real};

/// Quarter- and half-wave plate angles in radians, reduced modulo pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateSetting<T: Real> {
    qwp: T,
    hwp: T,
}

fn reduce_mod_pi<T: Real>(angle: T) -> T {
    let pi = T::PI();
    let r = angle - (angle / pi).floor() * pi;
    if r >= pi {
        r - pi
    } else {
        r
    }
}

pub fn hwp_jones<T: Real>(theta: T) -> Matrix2<Complex<T>> {
    let (s, c) = (theta + theta).sin_cos();
    let re = |x: T| Complex::new(x, T::zero());
    Matrix2::new(re(c), re(s), re(s), re(-c))
}

pub fn qwp_jones<T: Real>(theta: T) -> Matrix2<Complex<T>> {
    let (s, c) = theta.sin_cos();
    let off = Complex::new(s * c, -(s * c));
    Matrix2::new(
        Complex::new(c * c, s * s),
        off,
        off,
        Complex::new(s * s, c * c),
    )
}

impl<T: Real> WaveplateSetting<T> {
    pub fn new(qwp: T, hwp: T) -> Self {
        Self {
            qwp: reduce_mod_pi(qwp),
            hwp: reduce_mod_pi(hwp),
        }
    }

    pub fn from_degrees(qwp_deg: T, hwp_deg: T) -> Self {
        let k = T::PI() / lit(180.0);
        Self::new(qwp_deg * k, hwp_deg * k)
    }

    /// `(qwp, hwp)` in degrees.
    pub fn degrees(&self) -> (T, T) {
        let k = lit::<T>(180.0) / T::PI();
        (self.qwp * k, self.hwp * k)
    }

    pub fn qwp(&self) -> T {
        self.qwp
    }

    pub fn hwp(&self) -> T {
        self.hwp
    }

    /// Linear analyzer at polarization angle `theta` (QWP at 0, HWP at theta/2).
    pub fn linear_analyzer(theta: T) -> Self {
        Self::new(T::zero(), theta * lit(0.5))
    }

    /// Setting that transmits the given (nonzero) single-qubit polarization.
    pub fn for_state(psi: &Vector2<Complex<T>>) -> Self {
        let psi = psi.normalize();
        let b = bloch_vector(&psi);
        let half = lit::<T>(0.5);
        let azimuth = b.x.atan2(b.z) * half;
        let ellipticity = b.y.max(-T::one()).min(T::one()).asin() * half;
        Self::new(-ellipticity, (azimuth - ellipticity) * half)
    }

    /// Polarization state transmitted by this analyzer.
    pub fn analyzed_state(&self) -> Vector2<Complex<T>> {
        let h = Vector2::new(Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        hwp_jones(self.hwp) * qwp_jones(self.qwp).adjoint() * h
    }

    pub fn projector(&self) -> MeasurementProjector<T> {
        MeasurementProjector {
            ket: self.analyzed_state(),
        }
    }
}

/// The six Pauli eigenstates used by the tomography scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenBasis {
    H,
    V,
    D,
    A,
    /// `(|H> + i|V>)/sqrt 2`
    R,
    /// `(|H> - i|V>)/sqrt 2`
    L,
}

impl EigenBasis {
    pub const ALL: [EigenBasis; 6] = [
        EigenBasis::H,
        EigenBasis::V,
        EigenBasis::D,
        EigenBasis::A,
        EigenBasis::R,
        EigenBasis::L,
    ];

    pub fn setting<T: Real>(self) -> WaveplateSetting<T> {
        let pi = T::PI();
        let q = pi * lit(0.25);
        let e = pi * lit(0.125);
        match self {
            EigenBasis::H => WaveplateSetting::new(T::zero(), T::zero()),
            EigenBasis::V => WaveplateSetting::new(T::zero(), q),
            EigenBasis::D => WaveplateSetting::new(T::zero(), e),
            EigenBasis::A => WaveplateSetting::new(T::zero(), -e),
            EigenBasis::R => WaveplateSetting::new(-q, T::zero()),
            EigenBasis::L => WaveplateSetting::new(q, T::zero()),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EigenBasis::H => "H",
            EigenBasis::V => "V",
            EigenBasis::D => "D",
            EigenBasis::A => "A",
            EigenBasis::R => "R",
            EigenBasis::L => "L",
        }
    }
}

/// Rank-1 single-arm projector `|psi><psi|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementProjector<T: Real> {
    ket: Vector2<Complex<T>>,
}

impl<T: Real> MeasurementProjector<T> {
    pub fn onto(ket: Vector2<Complex<T>>) -> Self {
        Self {
            ket: ket.normalize(),
        }
    }

    pub fn ket(&self) -> &Vector2<Complex<T>> {
        &self.ket
    }

    pub fn operator(&self) -> Matrix2<Complex<T>> {
        self.ket * self.ket.adjoint()
    }

    /// Projector onto the orthogonal polarization (the PBS reflected port).
    pub fn complement(&self) -> Self {
        Self {
            ket: Vector2::new(-self.ket[1].conj(), self.ket[0].conj()),
        }
    }

    /// Two-photon kets for outcomes (pass,pass), (pass,fail), (fail,pass),
    /// (fail,fail) of the analyzer pair `(self, other)`.
    pub fn joint_outcome_kets(&self, other: &Self) -> [Vector4<Complex<T>>; 4] {
        let a = [self.ket, self.complement().ket];
        let c = [other.ket, other.complement().ket];
        let kron = |x: &Vector2<Complex<T>>, y: &Vector2<Complex<T>>| {
            Vector4::new(x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
        };
        [kron(&a[0], &c[0]), kron(&a[0], &c[1]), kron(&a[1], &c[0]), kron(&a[1], &c[1])]
    }
}

pub fn projector_from_waveplates<T: Real>(setting: &WaveplateSetting<T>) -> MeasurementProjector<T> {
    setting.projector()
}

/// Born-rule probabilities of (pass,pass), (pass,fail), (fail,pass), (fail,fail).
pub fn born_probabilities<T: Real>(
    rho: &DensityOperator<T>,
    pa: &MeasurementProjector<T>,
    pc: &MeasurementProjector<T>,
) -> [T; 4] {
    let m = rho.matrix();
    pa.joint_outcome_kets(pc)
        .map(|k| (k.adjoint() * m * k)[(0, 0)].re.max(T::zero()))
}
