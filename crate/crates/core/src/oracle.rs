//! Brute-force validation layer: materializes the two-photon state on an
//! explicit (polarization, bin, detuning-sample) basis, implements the
//! Stokes/polarization/detuning operators, performs numerical partial
//! traces, and checks the analytic reduced density operator against them.
//!
//! The single-photon space is the exact tensor product
//! {H, V} x {Sa, Ia, Sb, Ib} x {W_0 .. W_{n-1}}; a two-photon amplitude
//! tensor over (signal mode, idler mode) stays desk-scale for the coarse
//! grids used here (n <= 41).

use crate::biphoton::{sample_jsa, JointSpectralAmplitude};
use crate::error::{Error, Result};
use crate::model::{FrequencyBin, GridSpec, Polarization, SystemConfig};
use crate::quad::KahanSum;
use crate::state::{build_reduced_density, OverlapSet, ReducedDensity};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// Largest coarse grid the discrete tensor will accept.
pub const MAX_COARSE_N: usize = 41;

/// One single-photon basis mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex {
    pub pol: Polarization,
    pub bin: FrequencyBin,
    pub omega_idx: usize,
}

impl ModeIndex {
    /// Linear index into the single-photon space of `n` detuning samples.
    pub fn linear(&self, n: usize) -> usize {
        (self.pol.index() * 4 + self.bin.index()) * n + self.omega_idx
    }

    pub fn from_linear(idx: usize, n: usize) -> ModeIndex {
        let omega_idx = idx % n;
        let rest = idx / n;
        let bin = FrequencyBin::ALL[rest % 4];
        let pol = if rest / 4 == 0 {
            Polarization::H
        } else {
            Polarization::V
        };
        ModeIndex {
            pol,
            bin,
            omega_idx,
        }
    }
}

/// Single-photon dimension for an n-point coarse grid.
pub fn single_photon_dim(n: usize) -> usize {
    2 * 4 * n
}

/// Discretized two-photon state: complex amplitudes over
/// (signal mode, idler mode), unit total probability.
#[derive(Debug, Clone)]
pub struct DiscreteTwoPhotonState {
    /// Row-major (signal, idler) amplitudes; dimension `dim * dim` with
    /// `dim = single_photon_dim(coarse_n)`.
    pub amplitudes: Vec<Complex64>,
    pub coarse_n: usize,
    pub grid: GridSpec,
    /// Norm of the raw assembly before the final renormalization.
    pub norm: f64,
}

/// Re-evaluates the four rings' joint spectral amplitudes on a coarse grid
/// sharing the production half width, renormalized in the coarse discrete
/// inner product.
pub fn coarse_jsas(system: &SystemConfig, coarse_n: usize) -> Result<[JointSpectralAmplitude; 4]> {
    if coarse_n > MAX_COARSE_N {
        return Err(Error::DimensionOverflow {
            coarse_n,
            max: MAX_COARSE_N,
        });
    }
    let grid = GridSpec::coarse(system.grid.half_width, coarse_n)?;
    let mut jsas = Vec::with_capacity(4);
    for n in 0..4 {
        jsas.push(sample_jsa(
            &system.rings[n],
            &system.pumps[n],
            &grid,
            system.bin_offset(n),
        )?);
    }
    jsas.try_into()
        .map_err(|_| Error::Internal("ring count".into()))
}

/// Assembles the discrete two-photon state with explicit per-ring weights.
/// The standard four-ring state uses weights exp(2 i theta_n)/2.
pub fn assemble_discrete_state(
    system: &SystemConfig,
    jsas: &[JointSpectralAmplitude; 4],
    coarse_n: usize,
    weights: [Complex64; 4],
) -> Result<DiscreteTwoPhotonState> {
    if coarse_n > MAX_COARSE_N {
        return Err(Error::DimensionOverflow {
            coarse_n,
            max: MAX_COARSE_N,
        });
    }
    for jsa in jsas {
        if jsa.grid.n_points != coarse_n {
            return Err(Error::GridMismatch);
        }
    }
    let grid = jsas[0].grid;
    let n = coarse_n;
    let dim = single_photon_dim(n);
    let mut amp = vec![Complex64::new(0.0, 0.0); dim * dim];
    let dw = grid.step();
    for ring_idx in 0..4 {
        let ring = &system.rings[ring_idx];
        let w = weights[ring_idx];
        if w.norm_sqr() == 0.0 {
            continue;
        }
        let jsa = &jsas[ring_idx];
        for i in 0..n {
            let sig = ModeIndex {
                pol: ring.polarization,
                bin: ring.signal_bin,
                omega_idx: i,
            }
            .linear(n);
            for j in 0..n {
                let idl = ModeIndex {
                    pol: ring.polarization,
                    bin: ring.idler_bin,
                    omega_idx: j,
                }
                .linear(n);
                // absorb the grid measure so sum |amp|^2 = 1 per ring
                amp[sig * dim + idl] += w * jsa.value(i, j) * dw;
            }
        }
    }
    let mut norm_acc = KahanSum::new();
    for a in &amp {
        norm_acc.add(a.norm_sqr());
    }
    let norm = norm_acc.value();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::Internal("empty discrete state".into()));
    }
    let scale = 1.0 / norm.sqrt();
    for a in &mut amp {
        *a *= scale;
    }
    Ok(DiscreteTwoPhotonState {
        amplitudes: amp,
        coarse_n: n,
        grid,
        norm,
    })
}

/// The four-ring superposition
/// (phi1 on HH SaIa + e^{2i t1} phi2 on VV SaIa + e^{2i t2} phi3 on HH SbIb
///  + e^{2i t3} phi4 on VV SbIb) / 2, renormalized on the coarse grid.
pub fn build_discrete_state(
    system: &SystemConfig,
    jsas: &[JointSpectralAmplitude; 4],
    coarse_n: usize,
) -> Result<DiscreteTwoPhotonState> {
    let weights: [Complex64; 4] =
        std::array::from_fn(|k| Complex64::from_polar(0.5, 2.0 * system.ring_phase(k)));
    assemble_discrete_state(system, jsas, coarse_n, weights)
}

impl DiscreteTwoPhotonState {
    pub fn dim(&self) -> usize {
        single_photon_dim(self.coarse_n)
    }

    pub fn total_probability(&self) -> f64 {
        let mut acc = KahanSum::new();
        for a in &self.amplitudes {
            acc.add(a.norm_sqr());
        }
        acc.value()
    }

    /// Expectation value of a single-photon operator applied to the signal
    /// (`on_signal = true`) or idler photon.
    pub fn expectation_single(&self, op: &SparseOperator, on_signal: bool) -> Complex64 {
        let dim = self.dim();
        debug_assert_eq!(op.dim, dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(r, c, v) in &op.entries {
            if on_signal {
                for j in 0..dim {
                    acc += self.amplitudes[r * dim + j].conj() * v * self.amplitudes[c * dim + j];
                }
            } else {
                for i in 0..dim {
                    acc += self.amplitudes[i * dim + r].conj() * v * self.amplitudes[i * dim + c];
                }
            }
        }
        acc
    }
}

/// The four allowed (signal pol/bin, idler pol/bin) sectors, ordered as the
/// reduced basis [(HH,SaIa), (HH,SbIb), (VV,SaIa), (VV,SbIb)].
fn sector_modes() -> [(Polarization, FrequencyBin, FrequencyBin); 4] {
    use FrequencyBin::*;
    use Polarization::*;
    [(H, Sa, Ia), (H, Sb, Ib), (V, Sa, Ia), (V, Sb, Ib)]
}

fn sector_blocks(state: &DiscreteTwoPhotonState) -> Vec<Vec<Complex64>> {
    let n = state.coarse_n;
    let dim = state.dim();
    let mut blocks: Vec<Vec<Complex64>> = Vec::with_capacity(4);
    for (pol, sbin, ibin) in sector_modes() {
        let mut block = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let sig = ModeIndex {
                pol,
                bin: sbin,
                omega_idx: i,
            }
            .linear(n);
            for j in 0..n {
                let idl = ModeIndex {
                    pol,
                    bin: ibin,
                    omega_idx: j,
                }
                .linear(n);
                block[i * n + j] = state.amplitudes[sig * dim + idl];
            }
        }
        blocks.push(block);
    }
    blocks
}

/// Population outside the four polarization/bin sectors the ring
/// interactions can reach; structurally zero for assembled states.
pub fn support_leak(state: &DiscreteTwoPhotonState) -> f64 {
    let captured: f64 = sector_blocks(state)
        .iter()
        .map(|b| {
            let mut acc = KahanSum::new();
            for v in b {
                acc.add(v.norm_sqr());
            }
            acc.value()
        })
        .sum();
    (state.total_probability() - captured).abs()
}

/// Traces the detuning indices out of |psi><psi| and projects onto the
/// four-dimensional polarization/bin support.
///
/// Errors with [`Error::SupportLeak`] if more than 1e-12 of the population
/// lies outside the four sectors allowed by the ring interactions.
pub fn trace_out_detuning(state: &DiscreteTwoPhotonState) -> Result<ReducedDensity> {
    let leak = support_leak(state);
    if leak > 1e-12 {
        return Err(Error::SupportLeak { leak });
    }
    let blocks = sector_blocks(state);

    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = crate::quad::KahanSumC64::new();
            for (x, y) in blocks[a].iter().zip(&blocks[b]) {
                acc.add(x * y.conj());
            }
            rho[a][b] = acc.value();
        }
    }
    Ok(ReducedDensity { rho })
}

/// Stokes operator family per frequency bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StokesKind {
    /// Photon number in the bin.
    Sigma0,
    /// H minus V photon number in the bin.
    Sigma1,
    /// Diagonal/anti-diagonal coherence.
    Sigma2,
    /// Circular coherence.
    Sigma3,
}

/// Sparse Hermitian operator on the single-photon space, stored as a
/// coordinate list.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOperator {
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut m = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for &(r, c, v) in &self.entries {
            m[r * self.dim + c] += v;
        }
        m
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let m = self.to_dense();
        let mut dev = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                dev = dev.max((m[r * self.dim + c] - m[c * self.dim + r].conj()).norm());
            }
        }
        dev
    }

    /// Max-entry norm of the commutator [self, other].
    pub fn commutator_norm(&self, other: &SparseOperator) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let a = self.to_dense();
        let b = other.to_dense();
        let mut max = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut ab = Complex64::new(0.0, 0.0);
                let mut ba = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    ab += a[i * d + k] * b[k * d + j];
                    ba += b[i * d + k] * a[k * d + j];
                }
                max = max.max((ab - ba).norm());
            }
        }
        max
    }

    /// Every entry must act as the identity on the factors the operator is
    /// not supposed to touch.
    pub fn is_block_structured(
        &self,
        n: usize,
        touches_pol: bool,
        touches_bin: bool,
        touches_detuning: bool,
    ) -> bool {
        self.entries.iter().all(|&(r, c, _)| {
            let mr = ModeIndex::from_linear(r, n);
            let mc = ModeIndex::from_linear(c, n);
            (touches_pol || mr.pol == mc.pol)
                && (touches_bin || mr.bin == mc.bin)
                && (touches_detuning || mr.omega_idx == mc.omega_idx)
        })
    }
}

/// Discrete Stokes operator for one bin on an n-point coarse grid.
pub fn stokes_operator(kind: StokesKind, bin: FrequencyBin, coarse_n: usize) -> SparseOperator {
    use Polarization::*;
    let n = coarse_n;
    let dim = single_photon_dim(n);
    let mut entries = Vec::new();
    for i in 0..n {
        let h = ModeIndex {
            pol: H,
            bin,
            omega_idx: i,
        }
        .linear(n);
        let v = ModeIndex {
            pol: V,
            bin,
            omega_idx: i,
        }
        .linear(n);
        match kind {
            StokesKind::Sigma0 => {
                entries.push((h, h, Complex64::new(1.0, 0.0)));
                entries.push((v, v, Complex64::new(1.0, 0.0)));
            }
            StokesKind::Sigma1 => {
                entries.push((h, h, Complex64::new(1.0, 0.0)));
                entries.push((v, v, Complex64::new(-1.0, 0.0)));
            }
            StokesKind::Sigma2 => {
                entries.push((h, v, Complex64::new(1.0, 0.0)));
                entries.push((v, h, Complex64::new(1.0, 0.0)));
            }
            StokesKind::Sigma3 => {
                entries.push((h, v, Complex64::new(0.0, -1.0)));
                entries.push((v, h, Complex64::new(0.0, 1.0)));
            }
        }
    }
    SparseOperator { dim, entries }
}

/// Total polarization operator P = sum_B Sigma_1B: +1 on H modes, -1 on V.
pub fn polarization_operator(coarse_n: usize) -> SparseOperator {
    let dim = single_photon_dim(coarse_n);
    let mut entries = Vec::with_capacity(dim);
    for idx in 0..dim {
        let mode = ModeIndex::from_linear(idx, coarse_n);
        entries.push((idx, idx, Complex64::new(mode.pol.eigenvalue(), 0.0)));
    }
    SparseOperator { dim, entries }
}

/// Frequency detuning operator: eigenvalue W_i on every mode with detuning
/// sample i.
pub fn detuning_operator(grid: &GridSpec) -> SparseOperator {
    let n = grid.n_points;
    let dim = single_photon_dim(n);
    let mut entries = Vec::with_capacity(dim);
    for idx in 0..dim {
        let mode = ModeIndex::from_linear(idx, n);
        entries.push((idx, idx, Complex64::new(grid.omega(mode.omega_idx), 0.0)));
    }
    SparseOperator { dim, entries }
}

/// Commutator norms of the three DOF observables, which vanish identically,
/// plus sanity values showing the suite detects non-commuting pairs.
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    /// max over bins of ||[Sigma_0B, P]||.
    pub sigma0_pol: f64,
    /// max over bins of ||[Sigma_0B, W]||.
    pub sigma0_detuning: f64,
    /// ||[P, W]||.
    pub pol_detuning: f64,
    /// ||[Sigma_1B, Sigma_2B]|| for one bin; nonzero by construction.
    pub sigma1_sigma2_same_bin: f64,
    /// max Hermiticity deviation over all Sigma_2B, Sigma_3B.
    pub sigma23_hermiticity: f64,
    /// all operators act as identity on their untouched tensor factors.
    pub block_structured: bool,
}

/// Exercises the commutation relations of the discrete DOF operators.
pub fn check_commutators(coarse_n: usize, half_width: f64) -> Result<CommutatorReport> {
    let grid = GridSpec::coarse(half_width, coarse_n)?;
    let pol = polarization_operator(coarse_n);
    let det = detuning_operator(&grid);
    let mut sigma0_pol = 0.0f64;
    let mut sigma0_det = 0.0f64;
    let mut herm = 0.0f64;
    let mut block = pol.is_block_structured(coarse_n, true, false, false)
        && det.is_block_structured(coarse_n, false, false, true);
    for bin in FrequencyBin::ALL {
        let s0 = stokes_operator(StokesKind::Sigma0, bin, coarse_n);
        sigma0_pol = sigma0_pol.max(s0.commutator_norm(&pol));
        sigma0_det = sigma0_det.max(s0.commutator_norm(&det));
        block &= s0.is_block_structured(coarse_n, false, true, false);
        for kind in [StokesKind::Sigma1, StokesKind::Sigma2, StokesKind::Sigma3] {
            let s = stokes_operator(kind, bin, coarse_n);
            herm = herm.max(s.hermiticity_deviation());
            // Sigma_1..3 act on polarization within one bin
            block &= s.is_block_structured(coarse_n, true, true, false);
        }
    }
    let s1 = stokes_operator(StokesKind::Sigma1, FrequencyBin::Sa, coarse_n);
    let s2 = stokes_operator(StokesKind::Sigma2, FrequencyBin::Sa, coarse_n);
    Ok(CommutatorReport {
        sigma0_pol,
        sigma0_detuning: sigma0_det,
        pol_detuning: pol.commutator_norm(&det),
        sigma1_sigma2_same_bin: s1.commutator_norm(&s2),
        sigma23_hermiticity: herm,
        block_structured: block,
    })
}

/// Expectation-value checks on the assembled state: exactly one signal
/// photon across the signal bins, one idler photon across the idler bins,
/// and zero net polarization for the balanced superposition.
#[derive(Debug, Clone, Serialize)]
pub struct ExpectationChecks {
    pub signal_bin_total: f64,
    pub idler_bin_total: f64,
    pub polarization_total: f64,
}

pub fn expectation_checks(state: &DiscreteTwoPhotonState) -> ExpectationChecks {
    let n = state.coarse_n;
    let s0_sa = stokes_operator(StokesKind::Sigma0, FrequencyBin::Sa, n);
    let s0_sb = stokes_operator(StokesKind::Sigma0, FrequencyBin::Sb, n);
    let s0_ia = stokes_operator(StokesKind::Sigma0, FrequencyBin::Ia, n);
    let s0_ib = stokes_operator(StokesKind::Sigma0, FrequencyBin::Ib, n);
    let pol = polarization_operator(n);
    let signal_bin_total =
        (state.expectation_single(&s0_sa, true) + state.expectation_single(&s0_sb, true)).re;
    let idler_bin_total =
        (state.expectation_single(&s0_ia, false) + state.expectation_single(&s0_ib, false)).re;
    let polarization_total =
        (state.expectation_single(&pol, true) + state.expectation_single(&pol, false)).re;
    ExpectationChecks {
        signal_bin_total,
        idler_bin_total,
        polarization_total,
    }
}

/// Machine-readable verification report for the `verify` command.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub coarse_n: usize,
    pub commutator_norms: CommutatorReport,
    pub support_leak: f64,
    /// entrywise |analytic - traced| on the reference configuration
    pub oracle_max_abs_diff: f64,
    /// same for each randomized configuration
    pub randomized_max_abs_diff: Vec<f64>,
    pub expectation_checks: ExpectationChecks,
    pub passed: bool,
}

/// Analytic reduced density operator with overlaps evaluated on the same
/// coarse grid the discrete state uses, so coarse-grid truncation cancels
/// in the comparison.
pub fn analytic_on_coarse_grid(
    system: &SystemConfig,
    jsas: &[JointSpectralAmplitude; 4],
) -> Result<ReducedDensity> {
    let overlaps = OverlapSet::from_jsas(jsas)?;
    build_reduced_density(&overlaps, system.theta1, system.theta2, system.theta3)
}

/// Maximum entrywise deviation between the brute-force partial trace and
/// the analytic construction for one configuration, plus the support leak.
pub fn oracle_deviation(system: &SystemConfig, coarse_n: usize) -> Result<(f64, f64)> {
    let jsas = coarse_jsas(system, coarse_n)?;
    let state = build_discrete_state(system, &jsas, coarse_n)?;
    let traced = trace_out_detuning(&state)?;
    let analytic = analytic_on_coarse_grid(system, &jsas)?;
    Ok((traced.max_abs_diff(&analytic), support_leak(&state)))
}

/// Randomized but physically valid configuration derived from the default:
/// couplings in [0.25, 0.7], mismatches up to 2 pi x 50 MHz, free phases,
/// pulse durations in [0.5, 2] ns.
pub fn randomized_system(rng: &mut impl Rng) -> SystemConfig {
    let mut sys = crate::model::default_system();
    for ring in &mut sys.rings {
        *ring = ring
            .with_coupling(rng.gen_range(0.25..=0.70))
            .with_mismatch(rng.gen_range(0.0..=std::f64::consts::TAU * 0.05e9));
    }
    let t = rng.gen_range(0.5e-9..=2.0e-9);
    for pump in &mut sys.pumps {
        pump.duration = t;
        pump.peak_power = rng.gen_range(0.5e-3..=2.0e-3);
    }
    sys.theta1 = rng.gen_range(0.0..std::f64::consts::PI);
    sys.theta2 = rng.gen_range(0.0..std::f64::consts::PI);
    sys.theta3 = rng.gen_range(0.0..std::f64::consts::TAU);
    // keep the grid wide enough for the strongest coupling drawn
    let gamma_max = sys.max_gamma();
    if sys.grid.half_width < 6.0 * gamma_max {
        sys.grid.half_width = 10.0 * gamma_max;
    }
    debug_assert!(sys.validate().is_ok());
    sys
}

/// Runs the full verification suite: commutators, support, the oracle
/// equivalence on the given system, and `n_random` randomized systems.
pub fn run_verification(
    system: &SystemConfig,
    coarse_n: usize,
    seed: u64,
    n_random: usize,
) -> Result<VerifyReport> {
    let commutator_norms = check_commutators(coarse_n, system.grid.half_width)?;
    let (oracle_max_abs_diff, support_leak) = oracle_deviation(system, coarse_n)?;
    let jsas = coarse_jsas(system, coarse_n)?;
    let state = build_discrete_state(system, &jsas, coarse_n)?;
    let expectation = expectation_checks(&state);

    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut randomized = Vec::with_capacity(n_random);
    for _ in 0..n_random {
        let sys = randomized_system(&mut rng);
        let (diff, _) = oracle_deviation(&sys, coarse_n)?;
        randomized.push(diff);
    }

    let passed = commutator_norms.sigma0_pol == 0.0
        && commutator_norms.sigma0_detuning == 0.0
        && commutator_norms.pol_detuning == 0.0
        && commutator_norms.sigma1_sigma2_same_bin > 0.0
        && commutator_norms.sigma23_hermiticity == 0.0
        && commutator_norms.block_structured
        && support_leak < 1e-12
        && oracle_max_abs_diff < 1e-8
        && (expectation.signal_bin_total - 1.0).abs() < 1e-12
        && (expectation.idler_bin_total - 1.0).abs() < 1e-12
        && expectation.polarization_total.abs() < 1e-12
        && randomized.iter().all(|d| *d < 1e-8);

    Ok(VerifyReport {
        coarse_n,
        commutator_norms,
        support_leak,
        oracle_max_abs_diff,
        randomized_max_abs_diff: randomized,
        expectation_checks: expectation,
        passed,
    })
}
