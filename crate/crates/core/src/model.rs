//! Domain types, unit conventions, and the default four-ring configuration.
//!
//! Conventions: every frequency in this crate is angular (rad/s); detunings
//! are measured from the relevant resonance center. Printed values like
//! "193.415 THz" or "0.0166 GHz" in the literature are ordinary frequencies
//! and are converted with a factor of 2*pi on entry.

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;
use std::f64::consts::TAU;

/// Photon polarization: fundamental TE mode of the waveguide is horizontal
/// (H), fundamental TM is vertical (V).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    /// Eigenvalue of the polarization operator: +1 for H, -1 for V.
    pub fn eigenvalue(self) -> f64 {
        match self {
            Polarization::H => 1.0,
            Polarization::V => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Polarization::H => "H",
            Polarization::V => "V",
        }
    }
}

/// Discrete spectral modes defined by the ring resonances. `Sa` pairs with
/// `Ia` (pump a), `Sb` pairs with `Ib` (pump b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrequencyBin {
    Sa,
    Ia,
    Sb,
    Ib,
}

impl FrequencyBin {
    pub const ALL: [FrequencyBin; 4] = [
        FrequencyBin::Sa,
        FrequencyBin::Ia,
        FrequencyBin::Sb,
        FrequencyBin::Ib,
    ];

    pub fn index(self) -> usize {
        match self {
            FrequencyBin::Sa => 0,
            FrequencyBin::Ia => 1,
            FrequencyBin::Sb => 2,
            FrequencyBin::Ib => 3,
        }
    }

    /// The bin the paired photon is created in.
    pub fn partner(self) -> FrequencyBin {
        match self {
            FrequencyBin::Sa => FrequencyBin::Ia,
            FrequencyBin::Ia => FrequencyBin::Sa,
            FrequencyBin::Sb => FrequencyBin::Ib,
            FrequencyBin::Ib => FrequencyBin::Sb,
        }
    }

    pub fn is_signal(self) -> bool {
        matches!(self, FrequencyBin::Sa | FrequencyBin::Sb)
    }

    pub fn label(self) -> &'static str {
        match self {
            FrequencyBin::Sa => "Sa",
            FrequencyBin::Ia => "Ia",
            FrequencyBin::Sb => "Sb",
            FrequencyBin::Ib => "Ib",
        }
    }
}

/// Geometry, resonances, loss/coupling, and nonlinearity of one ring.
#[derive(Debug, Clone, Copy)]
pub struct RingParams {
    pub ring_id: u8,
    /// Ring radius \[m\].
    pub radius: f64,
    /// Group velocity in the ring \[m/s\].
    pub group_velocity: f64,
    /// Nonlinear parameter for SFWM \[(W m)^-1\].
    pub nonlinear_param: f64,
    /// Intrinsic quality factor.
    pub q_intrinsic: f64,
    /// Coupling efficiency eta = 1 - Q_load/Q_int, in [0, 1].
    pub coupling_eff: f64,
    /// Pump resonance center \[rad/s\].
    pub pump_center: f64,
    /// Signal resonance center \[rad/s\].
    pub signal_center: f64,
    /// Idler resonance center \[rad/s\].
    pub idler_center: f64,
    /// Frequency mismatch 2*wP - wS - wI \[rad/s\], signed.
    pub mismatch: f64,
    pub polarization: Polarization,
    pub signal_bin: FrequencyBin,
    pub idler_bin: FrequencyBin,
}

impl RingParams {
    /// Builds a ring whose mismatch is derived from the three resonance
    /// centers, exact in working precision.
    #[allow(clippy::too_many_arguments)]
    pub fn from_centers(
        ring_id: u8,
        radius: f64,
        group_velocity: f64,
        nonlinear_param: f64,
        q_intrinsic: f64,
        coupling_eff: f64,
        pump_center: f64,
        signal_center: f64,
        idler_center: f64,
        polarization: Polarization,
        signal_bin: FrequencyBin,
        idler_bin: FrequencyBin,
    ) -> Result<Self> {
        let ring = RingParams {
            ring_id,
            radius,
            group_velocity,
            nonlinear_param,
            q_intrinsic,
            coupling_eff,
            pump_center,
            signal_center,
            idler_center,
            mismatch: 2.0 * pump_center - signal_center - idler_center,
            polarization,
            signal_bin,
            idler_bin,
        };
        ring.validate()?;
        Ok(ring)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.ring_id) {
            return Err(Error::InvalidParam(format!(
                "ring_id {} not in 1..4",
                self.ring_id
            )));
        }
        if self.radius <= 0.0 || !self.radius.is_finite() {
            return Err(Error::InvalidParam(format!(
                "radius {} must be positive",
                self.radius
            )));
        }
        if self.group_velocity <= 0.0 {
            return Err(Error::InvalidParam(
                "group_velocity must be positive".into(),
            ));
        }
        if self.nonlinear_param <= 0.0 {
            return Err(Error::InvalidParam(
                "nonlinear_param must be positive".into(),
            ));
        }
        if self.q_intrinsic <= 0.0 {
            return Err(Error::InvalidParam("q_intrinsic must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.coupling_eff) {
            return Err(Error::InvalidParam(format!(
                "coupling_eff {} outside [0, 1]",
                self.coupling_eff
            )));
        }
        for (name, w) in [
            ("pump_center", self.pump_center),
            ("signal_center", self.signal_center),
            ("idler_center", self.idler_center),
        ] {
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::InvalidParam(format!("{name} must be positive")));
            }
        }
        // Stored mismatch must agree with the resonance centers to 1 part in
        // 1e9, floored at the f64 resolution of the center frequencies.
        let derived = 2.0 * self.pump_center - self.signal_center - self.idler_center;
        let scale = 2.0 * self.pump_center + self.signal_center + self.idler_center;
        let tol = (1e-9 * self.mismatch.abs()).max(16.0 * f64::EPSILON * scale);
        if (derived - self.mismatch).abs() > tol {
            return Err(Error::InvalidParam(format!(
                "mismatch {:.6e} inconsistent with 2*wP - wS - wI = {:.6e}",
                self.mismatch, derived
            )));
        }
        Ok(())
    }

    /// Loaded quality factor Q_load = (1 - eta) Q_int.
    pub fn q_load(&self) -> f64 {
        (1.0 - self.coupling_eff) * self.q_intrinsic
    }

    /// Half linewidth of the pump resonance \[rad/s\].
    pub fn gamma_pump(&self) -> f64 {
        linewidth(self.pump_center, self.q_load())
    }

    pub fn gamma_signal(&self) -> f64 {
        linewidth(self.signal_center, self.q_load())
    }

    pub fn gamma_idler(&self) -> f64 {
        linewidth(self.idler_center, self.q_load())
    }

    pub fn max_gamma(&self) -> f64 {
        self.gamma_pump()
            .max(self.gamma_signal())
            .max(self.gamma_idler())
    }

    pub fn min_gamma(&self) -> f64 {
        self.gamma_pump()
            .min(self.gamma_signal())
            .min(self.gamma_idler())
    }

    /// Copy with a different mismatch; the idler center is moved to keep the
    /// resonance bookkeeping consistent.
    pub fn with_mismatch(&self, mismatch: f64) -> Self {
        let mut r = *self;
        r.mismatch = mismatch;
        r.idler_center = 2.0 * r.pump_center - r.signal_center - mismatch;
        r
    }

    /// Copy with a different coupling efficiency.
    pub fn with_coupling(&self, eta: f64) -> Self {
        let mut r = *self;
        r.coupling_eff = eta;
        r
    }
}

/// Incident pump pulse for one ring.
#[derive(Debug, Clone, Copy)]
pub struct PumpParams {
    /// Peak power \[W\].
    pub peak_power: f64,
    /// Pump phase zeta just before the ring \[rad\].
    pub phase: f64,
    /// Pump center frequency \[rad/s\].
    pub center: f64,
    /// Effective pulse duration \[s\].
    pub duration: f64,
}

impl PumpParams {
    pub fn validate(&self) -> Result<()> {
        if self.peak_power < 0.0 || !self.peak_power.is_finite() {
            return Err(Error::InvalidParam(
                "peak_power must be non-negative".into(),
            ));
        }
        if self.duration <= 0.0 || !self.duration.is_finite() {
            return Err(Error::InvalidParam("duration must be positive".into()));
        }
        if self.center <= 0.0 {
            return Err(Error::InvalidParam("pump center must be positive".into()));
        }
        Ok(())
    }

    pub fn with_duration(&self, duration: f64) -> Self {
        let mut p = *self;
        p.duration = duration;
        p
    }

    pub fn with_power(&self, peak_power: f64) -> Self {
        let mut p = *self;
        p.peak_power = peak_power;
        p
    }
}

/// Uniform symmetric detuning grid on [-half_width, +half_width].
///
/// `n_points` is odd so Omega = 0 is a sample. Production grids carry at
/// least 33 points; the brute-force validation layer uses deliberately
/// coarser grids built with [`GridSpec::coarse`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Grid half width \[rad/s\].
    pub half_width: f64,
    /// Number of samples per axis (odd).
    pub n_points: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 33;

    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if n_points < Self::MIN_POINTS {
            return Err(Error::InvalidParam(format!(
                "n_points {} below minimum {}",
                n_points,
                Self::MIN_POINTS
            )));
        }
        Self::coarse(half_width, n_points)
    }

    /// Grid for the brute-force validation layer; allows 5..=41 points.
    pub fn coarse(half_width: f64, n_points: usize) -> Result<Self> {
        if n_points.is_multiple_of(2) || n_points < 5 {
            return Err(Error::InvalidParam(format!(
                "n_points {n_points} must be odd and at least 5"
            )));
        }
        if half_width <= 0.0 || !half_width.is_finite() {
            return Err(Error::InvalidParam("half_width must be positive".into()));
        }
        Ok(GridSpec {
            half_width,
            n_points,
        })
    }

    /// Sample spacing \[rad/s\].
    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    /// i-th detuning sample; the center sample is exactly zero.
    pub fn omega(&self, i: usize) -> f64 {
        let c = (self.n_points - 1) as f64 / 2.0;
        (i as f64 - c) * self.step()
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.omega(i)).collect()
    }

    /// Sum coordinate s_k = Omega_i + Omega_j for k = i + j, exact in fp.
    pub fn sum_coordinate(&self, k: usize) -> f64 {
        (k as f64 - (self.n_points - 1) as f64) * self.step()
    }

    /// The grid must extend at least 6 half-linewidths past the resonance.
    pub fn validate_against(&self, gamma_max: f64) -> Result<()> {
        if self.half_width < 6.0 * gamma_max {
            return Err(Error::InvalidParam(format!(
                "grid half_width {:.3e} below 6*gamma_max = {:.3e}",
                self.half_width,
                6.0 * gamma_max
            )));
        }
        Ok(())
    }
}

/// The full four-ring system: ring and pump parameters, the three relative
/// pump phases, and the detuning grid for spectral computations.
#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub rings: [RingParams; 4],
    pub pumps: [PumpParams; 4],
    /// Relative phase between the pumps incident on rings 2 and 1 \[rad\].
    pub theta1: f64,
    /// Relative phase between the pumps incident on rings 3 and 1 \[rad\].
    pub theta2: f64,
    /// Relative phase between the pumps incident on rings 4 and 1 \[rad\].
    pub theta3: f64,
    pub grid: GridSpec,
    /// Rigid displacement of ring 2's bins against ring 1's on the common
    /// detuning grid \[rad/s\]: signal center at -offset, idler at +offset.
    /// Zero under the aligned-bin approximation.
    pub bin_offset_12: f64,
    /// Same for ring 4 against ring 3.
    pub bin_offset_34: f64,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        use FrequencyBin::*;
        use Polarization::*;
        for (i, r) in self.rings.iter().enumerate() {
            r.validate()?;
            if r.ring_id as usize != i + 1 {
                return Err(Error::InvalidParam(format!(
                    "ring at slot {} has ring_id {}",
                    i + 1,
                    r.ring_id
                )));
            }
        }
        for p in &self.pumps {
            p.validate()?;
        }
        let pols = [H, V, H, V];
        let bins = [(Sa, Ia), (Sa, Ia), (Sb, Ib), (Sb, Ib)];
        for (i, r) in self.rings.iter().enumerate() {
            if r.polarization != pols[i] {
                return Err(Error::InvalidParam(format!(
                    "ring {} must carry {} polarization",
                    i + 1,
                    pols[i].label()
                )));
            }
            if (r.signal_bin, r.idler_bin) != bins[i] {
                return Err(Error::InvalidParam(format!(
                    "ring {} must emit into bins ({}, {})",
                    i + 1,
                    bins[i].0.label(),
                    bins[i].1.label()
                )));
            }
        }
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
        if rel(self.pumps[0].center, self.pumps[1].center) > 1e-12
            || rel(self.pumps[2].center, self.pumps[3].center) > 1e-12
        {
            return Err(Error::InvalidParam(
                "pumps of rings 1,2 and of rings 3,4 must share center frequencies".into(),
            ));
        }
        for i in 0..4 {
            if rel(self.pumps[i].center, self.rings[i].pump_center) > 1e-12 {
                return Err(Error::InvalidParam(format!(
                    "pump {} center differs from ring {} pump resonance",
                    i + 1,
                    i + 1
                )));
            }
        }
        let gamma_max = self.rings.iter().map(|r| r.max_gamma()).fold(0.0, f64::max);
        self.grid.validate_against(gamma_max)?;
        Ok(())
    }

    /// Phase of the pair amplitude of ring n relative to ring 1, i.e.
    /// beta_n/beta_1 = exp(2 i phase); entry 0 is zero by convention.
    pub fn ring_phase(&self, ring_index: usize) -> f64 {
        [0.0, self.theta1, self.theta2, self.theta3][ring_index]
    }

    /// Bin displacement of ring `ring_index` (0-based) on the common grid.
    pub fn bin_offset(&self, ring_index: usize) -> f64 {
        match ring_index {
            1 => self.bin_offset_12,
            3 => self.bin_offset_34,
            _ => 0.0,
        }
    }

    pub fn max_gamma(&self) -> f64 {
        self.rings.iter().map(|r| r.max_gamma()).fold(0.0, f64::max)
    }

    pub fn min_gamma(&self) -> f64 {
        self.rings
            .iter()
            .map(|r| r.min_gamma())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn with_duration(&self, duration: f64) -> Self {
        let mut s = self.clone();
        for p in &mut s.pumps {
            p.duration = duration;
        }
        s
    }
}

/// Coupling efficiency from the loaded and intrinsic quality factors:
/// eta = 1 - Q_load/Q_int.
pub fn coupling_from_qload(q_load: f64, q_int: f64) -> Result<f64> {
    if q_load <= 0.0 || q_int <= 0.0 {
        return Err(Error::InvalidParam(
            "quality factors must be positive".into(),
        ));
    }
    if q_load > q_int {
        return Err(Error::InvalidCoupling { q_load, q_int });
    }
    Ok(1.0 - q_load / q_int)
}

/// Resonance half linewidth Gamma-bar = w0 / (2 Q_load) \[rad/s\].
pub fn linewidth(omega0: f64, q_load: f64) -> f64 {
    omega0 / (2.0 * q_load)
}

/// Free spectral range estimate c / (n_g 2 pi R) \[Hz\], for sanity-checking
/// resonance inputs.
pub fn fsr_estimate(group_index: f64, radius: f64) -> f64 {
    SPEED_OF_LIGHT / (group_index * TAU * radius)
}

/// Frequency mismatch from group-velocity dispersion:
/// delta-w = -2 GVD (mode_gap)^2 / R^2, with GVD = d^2 w / dk^2 at the pump
/// wavenumber \[m^2/s\]. Normal dispersion (GVD > 0) gives a negative mismatch.
pub fn mismatch_from_gvd(gvd: f64, mode_gap: i32, radius: f64) -> f64 {
    -2.0 * gvd * (mode_gap as f64).powi(2) / (radius * radius)
}

/// The reference four-ring configuration: pumps at 193.415 and 192.175 THz,
/// radii 80 um -/+ a trim of tens of nm, n_g = 2.10, Q_int = 1e6, all rings
/// critically coupled, 1 mW peak pumps of 1 ns duration, theta3 = theta1 +
/// theta2 = 0.
pub fn default_system() -> SystemConfig {
    use FrequencyBin::*;
    use Polarization::*;

    let n_g = 2.10;
    let v = SPEED_OF_LIGHT / n_g;
    let q_int = 1e6;
    let eta = 0.5;

    let w_pa = TAU * 193.415e12;
    let w_pb = TAU * 192.175e12;
    // Printed mismatches and FSRs are ordinary frequencies.
    let mismatch = [
        TAU * 0.0166e9,
        TAU * 0.0267e9,
        TAU * 0.0174e9,
        TAU * 0.0279e9,
    ];
    let fsr = [283.9e9, 283.6e9, 283.6e9, 283.9e9];
    let radius = [80e-6 - 20e-9, 80e-6 + 60e-9, 80e-6 + 60e-9, 80e-6 - 20e-9];
    let lambda = [1.48, 1.40, 1.48, 1.40];
    let pump_center = [w_pa, w_pa, w_pb, w_pb];
    let pol = [H, V, H, V];
    let bins = [(Sa, Ia), (Sa, Ia), (Sb, Ib), (Sb, Ib)];

    let mut rings = Vec::with_capacity(4);
    for n in 0..4 {
        let w_p = pump_center[n];
        let w_s = w_p + TAU * fsr[n];
        let w_i = 2.0 * w_p - w_s - mismatch[n];
        rings.push(
            RingParams::from_centers(
                (n + 1) as u8,
                radius[n],
                v,
                lambda[n],
                q_int,
                eta,
                w_p,
                w_s,
                w_i,
                pol[n],
                bins[n].0,
                bins[n].1,
            )
            .expect("default ring parameters are valid"),
        );
    }
    let rings: [RingParams; 4] = rings.try_into().unwrap();

    let pumps: [PumpParams; 4] = std::array::from_fn(|n| PumpParams {
        peak_power: 1e-3,
        phase: 0.0,
        center: pump_center[n],
        duration: 1e-9,
    });

    // 10 half-linewidths at critical coupling, 513 samples.
    let gamma_crit = linewidth(w_pa, 0.5 * q_int);
    let grid = GridSpec::new(10.0 * gamma_crit, 513).expect("default grid is valid");

    let system = SystemConfig {
        rings,
        pumps,
        theta1: 0.0,
        theta2: 0.0,
        theta3: 0.0,
        grid,
        bin_offset_12: 0.0,
        bin_offset_34: 0.0,
    };
    debug_assert!(system.validate().is_ok());
    system
}
