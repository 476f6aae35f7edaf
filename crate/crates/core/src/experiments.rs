//! Reproduces the system-level quantities: power equalization across rings,
//! purity sweeps against coupling and pulse duration, probability-vs-power
//! and rate-vs-duration curves, and amplitude-map exports.

use crate::biphoton::{
    beta_squared_1d, compute_jsa_with_offset, jsa_widths, overlap_1d, sample_jsa,
    JointSpectralAmplitude, MAX_GRID_POINTS_2D,
};
use crate::error::{Error, Result};
use crate::model::{GridSpec, PumpParams, RingParams, SystemConfig};
use crate::quad::next_odd;
use crate::state::{
    build_reduced_density, hyper_fidelity, marginal, Dof, OverlapSet, ReducedDensity,
};
use num_complex::Complex64;
use std::io::Write;

/// Pair probability above which the single-pair approximation is suspect.
pub const MULTIPAIR_WARN_THRESHOLD: f64 = 0.05;

/// Tabulated sweep output: strictly increasing x against named columns.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub x: f64,
    pub values: Vec<f64>,
}

impl SweepResult {
    fn new(axis_name: &str, columns: &[&str]) -> Self {
        SweepResult {
            axis_name: axis_name.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, x: f64, values: Vec<f64>) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if x <= last.x {
                return Err(Error::InvalidParam(
                    "sweep axis values must be strictly increasing".into(),
                ));
            }
        }
        if values.len() != self.columns.len() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Internal("malformed sweep row".into()));
        }
        self.rows.push(SweepRow { x, values });
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }

    /// CSV with header `x,<col1>,...` and 17 significant digits, so repeated
    /// runs are byte-identical.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "x")?;
        for c in &self.columns {
            write!(out, ",{c}")?;
        }
        writeln!(out)?;
        for row in &self.rows {
            write!(out, "{:.16e}", row.x)?;
            for v in &row.values {
                write!(out, ",{v:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Sidecar written next to every sweep CSV: the full configuration, its
/// hash, and the software version, so rows are traceable bit-for-bit.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepMetadata {
    pub command: String,
    pub axis_name: String,
    pub columns: Vec<String>,
    pub config: crate::config::ConfigFile,
    pub config_hash: String,
    pub version: String,
}

impl SweepResult {
    pub fn metadata(&self, command: &str, system: &SystemConfig) -> Result<SweepMetadata> {
        Ok(SweepMetadata {
            command: command.to_string(),
            axis_name: self.axis_name.clone(),
            columns: self.columns.clone(),
            config: crate::config::ConfigFile::from_system(system),
            config_hash: crate::config::config_hash(system)?,
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}

/// Per-ring pair probabilities and rates.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub per_ring_prob: [f64; 4],
    /// |beta_n|^2 / T \[Hz\].
    pub per_ring_rate: [f64; 4],
    pub total_rate: f64,
    /// Set when the summed pair probability leaves the single-pair regime.
    pub warn_multipair: bool,
}

/// Purities and the density operator of one system configuration.
#[derive(Debug, Clone)]
pub struct PurityBreakdown {
    pub overlaps: OverlapSet,
    pub rho: ReducedDensity,
    pub gamma_pol: f64,
    pub gamma_bin: f64,
    pub fidelity: f64,
}

/// Detuning grid for a given pulse duration: half width max(10 Gamma, 20/T)
/// with Gamma the largest pump linewidth, at least 8 samples across
/// min(Gamma_min, 1/T), never below the configured base resolution.
pub fn respec_grid(system: &SystemConfig, duration: f64) -> Result<GridSpec> {
    let gamma_pump_max = system
        .rings
        .iter()
        .map(|r| r.gamma_pump())
        .fold(0.0f64, f64::max);
    let half_width = (10.0 * gamma_pump_max)
        .max(20.0 / duration)
        .max(system.grid.half_width);
    let finest = system.min_gamma().min(1.0 / duration);
    // n - 1 intervals must be at least this many
    let needed = (2.0 * half_width / (finest / 8.0)).ceil() as usize + 1;
    let n_points = next_odd(needed.max(system.grid.n_points));
    GridSpec::new(half_width, n_points)
}

/// The four joint spectral amplitudes of a system on its grid, with the
/// configured bin offsets applied.
pub fn system_jsas(system: &SystemConfig) -> Result<[JointSpectralAmplitude; 4]> {
    system.validate()?;
    let mut jsas = Vec::with_capacity(4);
    for n in 0..4 {
        jsas.push(compute_jsa_with_offset(
            &system.rings[n],
            &system.pumps[n],
            &system.grid,
            system.bin_offset(n),
        )?);
    }
    jsas.try_into()
        .map_err(|_| Error::Internal("ring count".into()))
}

/// Overlaps, density operator, and purities of a system through the 2D
/// grid route.
pub fn system_purities(system: &SystemConfig) -> Result<PurityBreakdown> {
    let jsas = system_jsas(system)?;
    let overlaps = OverlapSet::from_jsas(&jsas)?;
    breakdown_from_overlaps(system, overlaps)
}

/// Same quantities through the 1D reduction, usable at any pulse duration.
pub fn system_purities_1d(system: &SystemConfig) -> Result<PurityBreakdown> {
    system.validate()?;
    let mut o = [[Complex64::new(0.0, 0.0); 4]; 4];
    for n in 0..4 {
        o[n][n] = Complex64::new(1.0, 0.0);
        for m in (n + 1)..4 {
            let v = overlap_1d(
                &system.rings[n],
                &system.pumps[n],
                system.bin_offset(n),
                &system.rings[m],
                &system.pumps[m],
                system.bin_offset(m),
            )?;
            o[n][m] = v;
            o[m][n] = v.conj();
        }
    }
    // the 1D quadrature can land a self-consistent hair above 1
    for row in &mut o {
        for v in row.iter_mut() {
            if v.norm() > 1.0 {
                *v /= v.norm();
            }
        }
    }
    breakdown_from_overlaps(system, OverlapSet::from_matrix(o)?)
}

fn breakdown_from_overlaps(system: &SystemConfig, overlaps: OverlapSet) -> Result<PurityBreakdown> {
    let rho = build_reduced_density(&overlaps, system.theta1, system.theta2, system.theta3)?;
    let gamma_pol = marginal(&rho, Dof::Polarization).purity();
    let gamma_bin = marginal(&rho, Dof::Bin).purity();
    let fidelity = hyper_fidelity(&rho, system.theta1, system.theta2);
    Ok(PurityBreakdown {
        overlaps,
        rho,
        gamma_pol,
        gamma_bin,
        fidelity,
    })
}

/// Purity pipeline choosing the 2D route when the respec'd grid stays
/// desk-scale and the 1D reduction otherwise.
pub fn purities_at_duration(system: &SystemConfig, duration: f64) -> Result<PurityBreakdown> {
    let mut sys = system.with_duration(duration);
    let grid = respec_grid(&sys, duration)?;
    if grid.n_points <= MAX_GRID_POINTS_2D {
        sys.grid = grid;
        system_purities(&sys)
    } else {
        system_purities_1d(&sys)
    }
}

/// Pair probability of one ring, routed like [`purities_at_duration`].
pub fn pair_probability(
    ring: &RingParams,
    pump: &PumpParams,
    system: &SystemConfig,
) -> Result<f64> {
    let grid = respec_grid(system, pump.duration)?;
    if grid.n_points <= MAX_GRID_POINTS_2D {
        Ok(crate::biphoton::compute_jsa(ring, pump, &grid)?.beta_squared)
    } else {
        beta_squared_1d(ring, pump)
    }
}

/// Per-ring probabilities and rates for the current pump settings.
pub fn rate_report(system: &SystemConfig) -> Result<RateReport> {
    system.validate()?;
    let mut prob = [0.0f64; 4];
    let mut rate = [0.0f64; 4];
    for n in 0..4 {
        prob[n] = pair_probability(&system.rings[n], &system.pumps[n], system)?;
        rate[n] = prob[n] / system.pumps[n].duration;
    }
    let total: f64 = prob.iter().sum();
    Ok(RateReport {
        per_ring_prob: prob,
        per_ring_rate: rate,
        total_rate: rate.iter().sum(),
        warn_multipair: total > MULTIPAIR_WARN_THRESHOLD,
    })
}

/// Adjusts the four pump powers so every ring contributes an equal quarter
/// of `target_total_prob`. |beta|^2 = K P^2 with K measured at the current
/// power, so the required power follows in one step; a verification pass
/// recomputes the probabilities from scratch.
pub fn equalize_powers(
    system: &SystemConfig,
    target_total_prob: f64,
    max_power: f64,
) -> Result<SystemConfig> {
    if !(0.0 < target_total_prob && target_total_prob <= MULTIPAIR_WARN_THRESHOLD) {
        return Err(Error::InvalidParam(format!(
            "target_total_prob {target_total_prob} outside the single-pair regime \
             (0, {MULTIPAIR_WARN_THRESHOLD}]"
        )));
    }
    system.validate()?;
    let target = target_total_prob / 4.0;
    let mut out = system.clone();
    for n in 0..4 {
        let pump = &system.pumps[n];
        let p_ref = pump.peak_power;
        let beta_ref = pair_probability(&system.rings[n], pump, system)?;
        let k = beta_ref / (p_ref * p_ref);
        let p_needed = (target / k).sqrt();
        if p_needed > max_power {
            return Err(Error::InfeasiblePower {
                ring_id: system.rings[n].ring_id,
                required: p_needed,
                max: max_power,
            });
        }
        out.pumps[n].peak_power = p_needed;
    }
    // verification pass: recomputed probabilities agree pairwise to 1e-6
    let mut probs = [0.0f64; 4];
    for n in 0..4 {
        probs[n] = pair_probability(&out.rings[n], &out.pumps[n], &out)?;
    }
    for n in 1..4 {
        let rel = (probs[n] - probs[0]).abs() / probs[0];
        if rel > 1e-6 {
            return Err(Error::Internal(format!(
                "equalization verification failed: ring {} off by {rel:e}",
                n + 1
            )));
        }
    }
    Ok(out)
}

/// Purities as a function of the coupling efficiency of the varied rings
/// (1-based ids), all other parameters fixed.
pub fn sweep_eta(system: &SystemConfig, vary: &[u8], eta_values: &[f64]) -> Result<SweepResult> {
    if vary.is_empty() || vary.iter().any(|id| !(1..=4).contains(id)) {
        return Err(Error::InvalidParam(
            "vary must list ring ids in 1..4".into(),
        ));
    }
    let mut sweep = SweepResult::new("eta", &["gamma_pol", "gamma_bin", "hyper_fidelity"]);
    for &eta in eta_values {
        if !(0.0 < eta && eta < 1.0) {
            return Err(Error::InvalidParam(format!("eta {eta} outside (0, 1)")));
        }
        let mut sys = system.clone();
        for &id in vary {
            sys.rings[(id - 1) as usize] = sys.rings[(id - 1) as usize].with_coupling(eta);
        }
        // widen the grid when strong coupling broadens the resonances
        let gamma_max = sys.max_gamma();
        if sys.grid.half_width < 10.0 * gamma_max {
            sys.grid = respec_grid(&sys, sys.pumps[0].duration)?;
        }
        let b = system_purities(&sys)?;
        sweep.push(eta, vec![b.gamma_pol, b.gamma_bin, b.fidelity])?;
    }
    Ok(sweep)
}

/// Purities as a function of the pulse duration, shared by both pumps. The
/// grid is re-specified per point; durations beyond the 2D budget use the
/// 1D reduction.
pub fn sweep_duration(system: &SystemConfig, t_values: &[f64]) -> Result<SweepResult> {
    let mut sweep = SweepResult::new("duration_s", &["gamma_pol", "gamma_bin", "hyper_fidelity"]);
    for &t in t_values {
        if t <= 0.0 {
            return Err(Error::InvalidParam("durations must be positive".into()));
        }
        let b = purities_at_duration(system, t)?;
        sweep.push(t, vec![b.gamma_pol, b.gamma_bin, b.fidelity])?;
    }
    Ok(sweep)
}

/// Pair probability of one ring against peak pump power.
pub fn sweep_power(
    ring: &RingParams,
    pump_template: &PumpParams,
    powers: &[f64],
    system: &SystemConfig,
) -> Result<SweepResult> {
    let mut sweep = SweepResult::new("peak_power_w", &["beta_squared"]);
    for &p in powers {
        if p < 0.0 {
            return Err(Error::InvalidParam("powers must be non-negative".into()));
        }
        let beta = if p == 0.0 {
            0.0
        } else {
            pair_probability(ring, &pump_template.with_power(p), system)?
        };
        sweep.push(p, vec![beta])?;
    }
    Ok(sweep)
}

/// Pair-generation rate |beta|^2 / T of one ring against pulse duration at
/// fixed peak power.
pub fn sweep_rate(
    ring: &RingParams,
    pump_template: &PumpParams,
    t_values: &[f64],
) -> Result<SweepResult> {
    let mut sweep = SweepResult::new("duration_s", &["beta_squared", "rate_hz"]);
    for &t in t_values {
        if t <= 0.0 {
            return Err(Error::InvalidParam("durations must be positive".into()));
        }
        let beta = beta_squared_1d(ring, &pump_template.with_duration(t))?;
        sweep.push(t, vec![beta, beta / t])?;
    }
    Ok(sweep)
}

/// |phi| map of one ring for export, optionally overriding the frequency
/// mismatch (the idler center moves accordingly).
pub fn jsa_map(
    ring: &RingParams,
    pump: &PumpParams,
    mismatch_override: Option<f64>,
    grid: &GridSpec,
) -> Result<JointSpectralAmplitude> {
    let ring = match mismatch_override {
        Some(dw) => ring.with_mismatch(dw),
        None => *ring,
    };
    sample_jsa(&ring, pump, grid, 0.0)
}

/// FWHM pair of a mapped amplitude; re-exported here for CLI use.
pub fn map_widths(jsa: &JointSpectralAmplitude) -> Result<(f64, f64)> {
    jsa_widths(jsa)
}
