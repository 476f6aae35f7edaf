//! Browser bindings for the four-ring hyperentangled pair source model.
//!
//! Three interactive views, all computed from the same core as the CLI:
//! the joint spectral amplitude of ring 1 as a heatmap, and the two purity
//! curves against pulse duration and coupling efficiency. Curves go through
//! the 1D sum-coordinate reduction so they stay responsive at long pulse
//! durations.

use hyperring_core::biphoton::sample_jsa;
use hyperring_core::experiments::system_purities_1d;
use hyperring_core::model::{default_system, GridSpec};
use wasm_bindgen::prelude::wasm_bindgen;

const NS: f64 = 1e-9;
const GHZ: f64 = std::f64::consts::TAU * 1e9;

/// |phi(W, W')| of ring 1 on an n x n grid, row-major, scaled to [0, 1].
///
/// `duration_ns` is the pump pulse duration, `coupling_eff` the ring-bus
/// coupling (critical at 0.5), `mismatch_ghz` the frequency mismatch as an
/// ordinary frequency, and `halfwidth_ghz` the plotted detuning range.
#[wasm_bindgen]
pub fn jsa_amplitude_map(
    duration_ns: f64,
    coupling_eff: f64,
    mismatch_ghz: f64,
    halfwidth_ghz: f64,
    n: usize,
) -> Vec<f64> {
    jsa_map_impl(duration_ns, coupling_eff, mismatch_ghz, halfwidth_ghz, n).unwrap_or_default()
}

fn jsa_map_impl(
    duration_ns: f64,
    coupling_eff: f64,
    mismatch_ghz: f64,
    halfwidth_ghz: f64,
    n: usize,
) -> Option<Vec<f64>> {
    let sys = default_system();
    let ring = sys.rings[0]
        .with_coupling(coupling_eff)
        .with_mismatch(mismatch_ghz * GHZ);
    let pump = sys.pumps[0].with_duration(duration_ns * NS);
    let grid = GridSpec::coarse(halfwidth_ghz * GHZ, n | 1).ok()?;
    let jsa = sample_jsa(&ring, &pump, &grid, 0.0).ok()?;
    let peak = jsa.values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    if peak == 0.0 {
        return None;
    }
    Some(jsa.values.iter().map(|v| v.norm() / peak).collect())
}

/// Purity curves against pulse duration: flattened rows of
/// [T_ns, gamma_pol, gamma_bin, hyper_fidelity].
#[wasm_bindgen]
pub fn purity_vs_duration(tmin_ns: f64, tmax_ns: f64, points: usize) -> Vec<f64> {
    purity_vs_duration_impl(tmin_ns, tmax_ns, points).unwrap_or_default()
}

fn purity_vs_duration_impl(tmin_ns: f64, tmax_ns: f64, points: usize) -> Option<Vec<f64>> {
    if points < 2 || tmin_ns <= 0.0 || tmax_ns <= tmin_ns {
        return None;
    }
    let sys = default_system();
    let mut out = Vec::with_capacity(4 * points);
    for k in 0..points {
        let f = k as f64 / (points - 1) as f64;
        // log spacing matches how the purity falls off
        let t_ns = tmin_ns * (tmax_ns / tmin_ns).powf(f);
        let b = system_purities_1d(&sys.with_duration(t_ns * NS)).ok()?;
        out.extend_from_slice(&[t_ns, b.gamma_pol, b.gamma_bin, b.fidelity]);
    }
    Some(out)
}

/// Purity curves against the coupling efficiency of one ring pair at 1 ns:
/// flattened rows of [eta, gamma_pol, gamma_bin, hyper_fidelity].
///
/// `vary_second_pair` selects rings 3 and 4 (bins vary) instead of rings
/// 2 and 4 (polarization varies).
#[wasm_bindgen]
pub fn purity_vs_eta(
    vary_second_pair: bool,
    eta_min: f64,
    eta_max: f64,
    points: usize,
) -> Vec<f64> {
    purity_vs_eta_impl(vary_second_pair, eta_min, eta_max, points).unwrap_or_default()
}

fn purity_vs_eta_impl(
    vary_second_pair: bool,
    eta_min: f64,
    eta_max: f64,
    points: usize,
) -> Option<Vec<f64>> {
    if points < 2 || !(0.0 < eta_min && eta_min < eta_max && eta_max < 1.0) {
        return None;
    }
    let base = default_system();
    let vary: [usize; 2] = if vary_second_pair { [2, 3] } else { [1, 3] };
    let mut out = Vec::with_capacity(4 * points);
    for k in 0..points {
        let eta = eta_min + (eta_max - eta_min) * k as f64 / (points - 1) as f64;
        let mut sys = base.clone();
        for &idx in &vary {
            sys.rings[idx] = sys.rings[idx].with_coupling(eta);
        }
        let gamma_max = sys.max_gamma();
        if sys.grid.half_width < 6.0 * gamma_max {
            sys.grid.half_width = 10.0 * gamma_max;
        }
        let b = system_purities_1d(&sys).ok()?;
        out.extend_from_slice(&[eta, b.gamma_pol, b.gamma_bin, b.fidelity]);
    }
    Some(out)
}
