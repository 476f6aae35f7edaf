//! Scalar building blocks of the joint spectral amplitude: ring field
//! enhancement factors and the Gaussian pump envelope, in detuned form.

use crate::model::PumpParams;
use crate::HBAR;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Selects the retarded (+) or advanced (-) field enhancement factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnhancementSign {
    Plus,
    Minus,
}

impl EnhancementSign {
    fn signum(self) -> f64 {
        match self {
            EnhancementSign::Plus => 1.0,
            EnhancementSign::Minus => -1.0,
        }
    }
}

/// Field enhancement factor of a ring resonance at detuning `omega`:
///
/// ```text
/// F(Omega) = -i sqrt(v eta / (pi R Gamma)) / (i Omega/Gamma +/- 1)
/// ```
///
/// The physical prefactor is kept (no unit normalization at resonance) so
/// that pair probabilities come out absolute. |F|^2 peaks at Omega = 0 with
/// value v eta / (pi R Gamma) and falls to half at |Omega| = Gamma.
pub fn field_enhancement(
    omega: f64,
    gamma: f64,
    group_velocity: f64,
    coupling_eff: f64,
    radius: f64,
    sign: EnhancementSign,
) -> Complex64 {
    let mag = (group_velocity * coupling_eff / (PI * radius * gamma)).sqrt();
    let denom = Complex64::new(sign.signum(), omega / gamma);
    Complex64::new(0.0, -mag) / denom
}

/// Gaussian pump spectral envelope A(Omega) = T exp(-Omega^2 T^2 / 2) \[s\].
pub fn pump_envelope(omega: f64, duration: f64) -> f64 {
    let x = omega * duration;
    duration * (-0.5 * x * x).exp()
}

/// Pump amplitude alpha = exp(i zeta) sqrt(P / (hbar w_P)), in units of the
/// square root of photon flux.
pub fn pump_amplitude(pump: &PumpParams) -> Complex64 {
    let mag = (pump.peak_power / (HBAR * pump.center)).sqrt();
    Complex64::from_polar(mag, pump.phase)
}
