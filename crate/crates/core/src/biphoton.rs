//! Joint spectral amplitude of the photon pair emitted by one ring, its
//! normalization, and the absolute pair-generation probability per pulse.
//!
//! The biphoton wavefunction of ring n factorizes as
//!
//! ```text
//! phi_n(W, W') ~ F*_S(W) F*_I(W') g_n(W + W')
//! ```
//!
//! where the pump convolution g_n depends on the detunings only through the
//! sum coordinate s = W + W'. g_n is therefore precomputed on a 1D s-grid
//! and shared across the 2D grid: O(N^2) assembly after an O(N n1)
//! convolution. The same structure collapses the probability and overlap
//! integrals to exact 1D forms, which [`beta_squared_1d`] and [`overlap_1d`]
//! use for pulse durations whose 2D grids would be impractically large; the
//! two routes are tested against each other.

use crate::error::{Error, Result};
use crate::lineshape::{field_enhancement, pump_amplitude, pump_envelope, EnhancementSign};
use crate::model::{GridSpec, PumpParams, RingParams};
use crate::quad::{next_4k1, simpson_weight, simpson_with_refinement, KahanSum, KahanSumC64};
use crate::HBAR;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

/// Relative tolerance for the Simpson refinement gauge of the convolution.
const CONVOLUTION_TOL: f64 = 1e-6;

/// Largest per-axis grid the 2D route will materialize.
pub const MAX_GRID_POINTS_2D: usize = 4097;

/// The pump self-convolution g(s) sampled on a sum-coordinate grid.
///
/// g depends on (W, W') only through s = W + W'; |g| peaks near s equal to
/// the ring mismatch once the pulse is long against the ring dwell time.
#[derive(Debug, Clone)]
pub struct PumpConvolution {
    pub s_samples: Vec<f64>,
    pub g_values: Vec<Complex64>,
    pub mismatch: f64,
    pub duration: f64,
    pub gamma_pump: f64,
    /// Achieved Simpson refinement deviation relative to the peak of |g|.
    pub max_rel_error: f64,
}

/// Normalized joint spectral amplitude phi(W_i, W'_j) on a square detuning
/// grid, plus the absolute pair probability per pulse.
#[derive(Debug, Clone)]
pub struct JointSpectralAmplitude {
    pub grid: GridSpec,
    /// Row-major n x n samples; `values[i * n + j] = phi(W_i, W'_j)` with
    /// units of 1/(rad/s). The plain Riemann sum of |phi|^2 dW^2 is 1.
    pub values: Vec<Complex64>,
    /// Pair-generation probability |beta|^2 per pump pulse.
    pub beta_squared: f64,
    pub ring_id: u8,
}

struct PumpKernel {
    gamma_p: f64,
    mismatch: f64,
    duration: f64,
    group_velocity: f64,
    coupling_eff: f64,
    radius: f64,
}

impl PumpKernel {
    fn new(ring: &RingParams, pump: &PumpParams) -> Self {
        PumpKernel {
            gamma_p: ring.gamma_pump(),
            mismatch: ring.mismatch,
            duration: pump.duration,
            group_velocity: ring.group_velocity,
            coupling_eff: ring.coupling_eff,
            radius: ring.radius,
        }
    }

    /// g at sum coordinate s integrated over [tau/2 - half, tau/2 + half]
    /// with `n1` samples (n1 = 4k + 1); returns the fine and half-resolution
    /// Simpson estimates.
    fn g_windowed(&self, s: f64, half: f64, n1: usize) -> (Complex64, Complex64) {
        let tau = s - self.mismatch;
        let t = self.duration;
        let f = |x: f64| {
            let fa = field_enhancement(
                x,
                self.gamma_p,
                self.group_velocity,
                self.coupling_eff,
                self.radius,
                EnhancementSign::Minus,
            );
            let fb = field_enhancement(
                tau - x,
                self.gamma_p,
                self.group_velocity,
                self.coupling_eff,
                self.radius,
                EnhancementSign::Minus,
            );
            fa * fb * pump_envelope(x, t) * pump_envelope(tau - x, t)
        };
        let center = 0.5 * tau;
        simpson_with_refinement(f, center - half, center + half, n1)
    }

    /// Window of the production route: |W1| <= max(10/T, 10 Gamma_P) plus
    /// half the shift.
    fn production_half(&self, s: f64) -> f64 {
        let tau = s - self.mismatch;
        (10.0 / self.duration).max(10.0 * self.gamma_p) + 0.5 * tau.abs()
    }

    /// Fewest samples that resolve the narrower of the pump bandwidth and
    /// the ring linewidth across the base production window with 24 points.
    fn production_floor(&self) -> usize {
        let half = (10.0 / self.duration).max(10.0 * self.gamma_p);
        let feature = (1.0 / self.duration).min(self.gamma_p);
        next_4k1((2.0 * half / feature * 24.0) as usize).min(40_001)
    }

    /// Window of the 1D reductions: the Gaussian pump product bounds the
    /// integrand to |W1 - tau/2| <= 12/T at any linewidth.
    fn reduced_window(&self) -> (f64, usize) {
        let half = 12.0 / self.duration;
        let feature = (1.0 / self.duration).min(self.gamma_p);
        let n1 = next_4k1((2.0 * half / feature * 48.0) as usize).clamp(257, 40_001);
        (half, n1)
    }
}

fn check_pair_generation_domain(ring: &RingParams) -> Result<()> {
    ring.validate()?;
    if ring.coupling_eff <= 0.0 {
        return Err(Error::InvalidParam(
            "coupling_eff must be positive for pair generation".into(),
        ));
    }
    if ring.coupling_eff >= 1.0 {
        return Err(Error::InvalidParam(
            "coupling_eff = 1 implies a vanishing loaded Q".into(),
        ));
    }
    Ok(())
}

/// Evaluates the pump self-convolution
///
/// ```text
/// g(s) = int dW1 F_P-(W1) F_P-(s - dw - W1) A(W1) A(s - dw - W1)
/// ```
///
/// on the given sum-coordinate grid. The integration window is
/// |W1| <= max(10/T, 10 Gamma_P) plus the shift, sampled with 4n + 1 Simpson
/// points for an s-grid of 2n - 1 samples.
pub fn compute_pump_convolution(
    ring: &RingParams,
    pump: &PumpParams,
    s_grid: &[f64],
) -> Result<PumpConvolution> {
    check_pair_generation_domain(ring)?;
    pump.validate()?;
    if s_grid.is_empty() {
        return Err(Error::InvalidParam("empty sum-coordinate grid".into()));
    }
    let kernel = PumpKernel::new(ring, pump);
    // 4 n_points samples for a 2n - 1 sum grid, floored so coarse
    // validation grids still resolve the integrand
    let n = s_grid.len().div_ceil(2);
    let n1 = next_4k1(4 * n).max(kernel.production_floor());

    let mut g_values = Vec::with_capacity(s_grid.len());
    let mut max_dev = 0.0f64;
    let mut g_peak = 0.0f64;
    for &s in s_grid {
        let (fine, coarse) = kernel.g_windowed(s, kernel.production_half(s), n1);
        max_dev = max_dev.max((fine - coarse).norm());
        g_peak = g_peak.max(fine.norm());
        g_values.push(fine);
    }
    let max_rel_error = if g_peak > 0.0 { max_dev / g_peak } else { 0.0 };
    if max_rel_error > CONVOLUTION_TOL {
        return Err(Error::NumericAccuracy {
            achieved: max_rel_error,
            required: CONVOLUTION_TOL,
        });
    }
    Ok(PumpConvolution {
        s_samples: s_grid.to_vec(),
        g_values,
        mismatch: ring.mismatch,
        duration: pump.duration,
        gamma_pump: kernel.gamma_p,
        max_rel_error,
    })
}

/// Samples the normalized joint spectral amplitude on `grid` without
/// enforcing the production resolution rule. Used by the validation layer
/// (coarse grids) and by visualization; production code goes through
/// [`compute_jsa`].
///
/// `bin_offset` displaces this ring's resonances on the common grid: the
/// signal center sits at -offset and the idler center at +offset. The sum
/// coordinate of the pump convolution is unaffected.
pub fn sample_jsa(
    ring: &RingParams,
    pump: &PumpParams,
    grid: &GridSpec,
    bin_offset: f64,
) -> Result<JointSpectralAmplitude> {
    check_pair_generation_domain(ring)?;
    pump.validate()?;
    if pump.peak_power <= 0.0 {
        return Err(Error::InvalidParam(
            "peak_power must be positive for pair generation".into(),
        ));
    }
    let n = grid.n_points;
    let step = grid.step();
    let gamma_s = ring.gamma_signal();
    let gamma_i = ring.gamma_idler();

    // conj(F_S+) and conj(F_I+) along each axis
    let cf_s: Vec<Complex64> = (0..n)
        .map(|i| {
            field_enhancement(
                grid.omega(i) + bin_offset,
                gamma_s,
                ring.group_velocity,
                ring.coupling_eff,
                ring.radius,
                EnhancementSign::Plus,
            )
            .conj()
        })
        .collect();
    let cf_i: Vec<Complex64> = (0..n)
        .map(|j| {
            field_enhancement(
                grid.omega(j) - bin_offset,
                gamma_i,
                ring.group_velocity,
                ring.coupling_eff,
                ring.radius,
                EnhancementSign::Plus,
            )
            .conj()
        })
        .collect();

    let s_grid: Vec<f64> = (0..2 * n - 1).map(|k| grid.sum_coordinate(k)).collect();
    let conv = compute_pump_convolution(ring, pump, &s_grid)?;

    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] = cf_s[i] * cf_i[j] * conv.g_values[i + j];
        }
    }

    // |beta|^2 = hbar^2 |alpha|^4 Lambda^2 R^2 wS wI * 2D Simpson of the raw
    // |F_S F_I g|^2, which is |values|^2 before normalization.
    let alpha_sq = pump_amplitude(pump).norm_sqr();
    let prefactor = HBAR
        * HBAR
        * alpha_sq
        * alpha_sq
        * ring.nonlinear_param
        * ring.nonlinear_param
        * ring.radius
        * ring.radius
        * ring.signal_center
        * ring.idler_center;
    let mut simpson2d = KahanSum::new();
    let mut riemann = KahanSum::new();
    for i in 0..n {
        let wi = simpson_weight(i, n);
        for j in 0..n {
            let m2 = values[i * n + j].norm_sqr();
            simpson2d.add(wi * simpson_weight(j, n) * m2);
            riemann.add(m2);
        }
    }
    let beta_squared = prefactor * simpson2d.value() * step * step;
    let norm = riemann.value() * step * step;
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::Internal(
            "joint spectral amplitude has zero norm".into(),
        ));
    }

    // Unit normalization in the plain discrete inner product; the leading i
    // of the wavefunction is kept so overlap phases stay deterministic. The
    // pump phase cancels between alpha^2 and the amplitude convention
    // arg(beta) = 2 zeta.
    let scale = Complex64::new(0.0, 1.0 / norm.sqrt());
    for v in &mut values {
        *v *= scale;
    }

    Ok(JointSpectralAmplitude {
        grid: *grid,
        values,
        beta_squared,
        ring_id: ring.ring_id,
    })
}

/// Computes the joint spectral amplitude on a production grid, enforcing
/// that both the ring linewidth and the pump bandwidth 1/T are resolved by
/// at least 8 samples.
pub fn compute_jsa(
    ring: &RingParams,
    pump: &PumpParams,
    grid: &GridSpec,
) -> Result<JointSpectralAmplitude> {
    compute_jsa_with_offset(ring, pump, grid, 0.0)
}

/// [`compute_jsa`] with a bin displacement on the common grid.
pub fn compute_jsa_with_offset(
    ring: &RingParams,
    pump: &PumpParams,
    grid: &GridSpec,
    bin_offset: f64,
) -> Result<JointSpectralAmplitude> {
    if grid.n_points < GridSpec::MIN_POINTS {
        return Err(Error::GridResolution(format!(
            "production grids need at least {} points",
            GridSpec::MIN_POINTS
        )));
    }
    let finest = ring.min_gamma().min(1.0 / pump.duration);
    if grid.step() > finest / 8.0 {
        return Err(Error::GridResolution(format!(
            "grid step {:.3e} rad/s does not resolve the finest feature {:.3e} rad/s \
             with 8 samples",
            grid.step(),
            finest
        )));
    }
    sample_jsa(ring, pump, grid, bin_offset)
}

impl JointSpectralAmplitude {
    pub fn n(&self) -> usize {
        self.grid.n_points
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_points + j]
    }

    /// Discrete norm sum |phi|^2 dW^2; equals 1 after construction.
    pub fn norm(&self) -> f64 {
        let mut acc = KahanSum::new();
        for v in &self.values {
            acc.add(v.norm_sqr());
        }
        acc.value() * self.grid.step() * self.grid.step()
    }

    /// Indices of the sample maximizing |phi|.
    pub fn peak(&self) -> (usize, usize) {
        let n = self.grid.n_points;
        let mut best = (0, 0);
        let mut best_v = -1.0;
        for i in 0..n {
            for j in 0..n {
                let a = self.values[i * n + j].norm_sqr();
                if a > best_v {
                    best_v = a;
                    best = (i, j);
                }
            }
        }
        best
    }

    /// Centroid of |phi|^2 in the sum coordinate s = W + W' \[rad/s\].
    pub fn sum_centroid(&self) -> f64 {
        let n = self.grid.n_points;
        let mut wsum = KahanSum::new();
        let mut tot = KahanSum::new();
        for i in 0..n {
            for j in 0..n {
                let p = self.values[i * n + j].norm_sqr();
                wsum.add(p * self.grid.sum_coordinate(i + j));
                tot.add(p);
            }
        }
        wsum.value() / tot.value()
    }

    /// CSV dump: `omega_rad_s,omega_prime_rad_s,re_phi,im_phi,abs_phi`,
    /// row-major over the grid.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "omega_rad_s,omega_prime_rad_s,re_phi,im_phi,abs_phi")?;
        let n = self.grid.n_points;
        for i in 0..n {
            for j in 0..n {
                let v = self.values[i * n + j];
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.grid.omega(i),
                    self.grid.omega(j),
                    v.re,
                    v.im,
                    v.norm()
                )?;
            }
        }
        Ok(())
    }

    pub fn metadata(&self, config_hash: &str) -> JsaMetadata {
        JsaMetadata {
            ring_id: self.ring_id,
            beta_squared: self.beta_squared,
            grid: GridMetadata {
                half_width_rad_s: self.grid.half_width,
                n_points: self.grid.n_points,
            },
            config_hash: config_hash.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Sidecar metadata written next to a JSA CSV export.
#[derive(Debug, Clone, Serialize)]
pub struct JsaMetadata {
    pub ring_id: u8,
    pub beta_squared: f64,
    pub grid: GridMetadata,
    pub config_hash: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridMetadata {
    pub half_width_rad_s: f64,
    pub n_points: usize,
}

/// Full widths at half maximum of |phi| along the W = W' diagonal and the
/// W = -W' anti-diagonal through the peak sample, measured as arc length in
/// the (W, W') plane.
pub fn jsa_widths(jsa: &JointSpectralAmplitude) -> Result<(f64, f64)> {
    let n = jsa.n();
    let (ip, jp) = jsa.peak();
    if ip == 0 || jp == 0 || ip == n - 1 || jp == n - 1 {
        return Err(Error::PeakOnBoundary);
    }
    let peak = jsa.value(ip, jp).norm();
    let half = peak / 2.0;

    let trace_width = |di: isize, dj: isize| -> Result<f64> {
        let mut total = 0.0;
        for dir in [1isize, -1] {
            let mut t = 0isize;
            loop {
                t += 1;
                let i = ip as isize + dir * t * di;
                let j = jp as isize + dir * t * dj;
                if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
                    return Err(Error::PeakOnBoundary);
                }
                let a = jsa.value(i as usize, j as usize).norm();
                if a < half {
                    let prev = jsa
                        .value(
                            (ip as isize + dir * (t - 1) * di) as usize,
                            (jp as isize + dir * (t - 1) * dj) as usize,
                        )
                        .norm();
                    total += (t - 1) as f64 + (prev - half) / (prev - a);
                    break;
                }
            }
        }
        // one step along (di, dj) moves sqrt(2) dW in the plane
        Ok(total * jsa.grid.step() * std::f64::consts::SQRT_2)
    };

    let diagonal = trace_width(1, 1)?;
    let anti_diagonal = trace_width(1, -1)?;
    Ok((diagonal, anti_diagonal))
}

// ---------------------------------------------------------------------------
// 1D sum-coordinate reductions
//
// With c_g the unit Cauchy density of half width g, the Lorentzian axis
// factors integrate out exactly:
//
//   int |F_S(W)|^2 |F_I(s - W)|^2 dW = (v eta / R)^2 c_{gS + gI}(s)
//
// so |beta|^2 and the overlaps reduce to 1D integrals over s. These routes
// stay cheap at any pulse duration.
// ---------------------------------------------------------------------------

fn cauchy(x: f64, gamma: f64) -> f64 {
    gamma / (PI * (x * x + gamma * gamma))
}

/// s-integration window of a single ring's pump convolution: |g|^2 is
/// Gaussian-bounded around the mismatch at scale 1/T.
fn s_window(ring: &RingParams, pump: &PumpParams) -> (f64, f64, usize) {
    let t = pump.duration;
    let half = 14.0 / t;
    let feature = (1.0 / t)
        .min(ring.gamma_pump())
        .min(ring.gamma_signal() + ring.gamma_idler());
    let n_s = next_4k1((2.0 * half / feature * 48.0) as usize).clamp(257, 40_001);
    (ring.mismatch, half, n_s)
}

/// Pair-generation probability |beta|^2 through the 1D reduction. Agrees
/// with the 2D Simpson route of [`compute_jsa`] and remains tractable for
/// long pulses.
pub fn beta_squared_1d(ring: &RingParams, pump: &PumpParams) -> Result<f64> {
    check_pair_generation_domain(ring)?;
    pump.validate()?;
    let alpha_sq = pump_amplitude(pump).norm_sqr();
    let prefactor = HBAR
        * HBAR
        * alpha_sq
        * alpha_sq
        * ring.nonlinear_param
        * ring.nonlinear_param
        * ring.radius
        * ring.radius
        * ring.signal_center
        * ring.idler_center;
    Ok(prefactor * raw_norm_1d(ring, pump)?)
}

/// Unnormalized norm integral of one ring's raw wavefunction: the quantity
/// |beta|^2 / (hbar^2 |alpha|^4 Lambda^2 R^2 wS wI).
fn raw_norm_1d(ring: &RingParams, pump: &PumpParams) -> Result<f64> {
    let kernel = PumpKernel::new(ring, pump);
    let (g_half, n1) = kernel.reduced_window();
    let (center, half, n_s) = s_window(ring, pump);
    let gsum = ring.gamma_signal() + ring.gamma_idler();
    let h = 2.0 * half / (n_s - 1) as f64;
    let axis = ring.group_velocity * ring.coupling_eff / ring.radius;

    let mut acc = KahanSum::new();
    let mut dev = 0.0f64;
    let mut peak = 0.0f64;
    for k in 0..n_s {
        let s = center - half + k as f64 * h;
        let (g, g_coarse) = kernel.g_windowed(s, g_half, n1);
        dev = dev.max((g - g_coarse).norm());
        peak = peak.max(g.norm());
        acc.add(simpson_weight(k, n_s) * cauchy(s, gsum) * g.norm_sqr());
    }
    if peak > 0.0 && dev / peak > CONVOLUTION_TOL {
        return Err(Error::NumericAccuracy {
            achieved: dev / peak,
            required: CONVOLUTION_TOL,
        });
    }
    let norm = axis * axis * acc.value() * h;
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::Internal("vanishing 1D norm".into()));
    }
    Ok(norm)
}

/// Overlap integral of the normalized biphoton wavefunctions of two rings
/// through the 1D reduction. `offset_a` and `offset_b` are the rings' bin
/// displacements on the common detuning grid.
///
/// The cross kernel K(s) (the convolution of the signal and idler Lorentzian
/// cross products) varies on the linewidth scale only, so it is evaluated on
/// a coarse s-subgrid and quadratically interpolated under the much narrower
/// pump-convolution product.
pub fn overlap_1d(
    ring_a: &RingParams,
    pump_a: &PumpParams,
    offset_a: f64,
    ring_b: &RingParams,
    pump_b: &PumpParams,
    offset_b: f64,
) -> Result<Complex64> {
    check_pair_generation_domain(ring_a)?;
    check_pair_generation_domain(ring_b)?;
    pump_a.validate()?;
    pump_b.validate()?;

    let norm_a = raw_norm_1d(ring_a, pump_a)?;
    let norm_b = raw_norm_1d(ring_b, pump_b)?;

    let kernel_a = PumpKernel::new(ring_a, pump_a);
    let kernel_b = PumpKernel::new(ring_b, pump_b);
    let (ga_half, n1_a) = kernel_a.reduced_window();
    let (gb_half, n1_b) = kernel_b.reduced_window();

    // Both g factors are Gaussian-bounded around their own mismatch.
    let t = pump_a.duration.min(pump_b.duration);
    let center = 0.5 * (ring_a.mismatch + ring_b.mismatch);
    let half = 14.0 / t + 0.5 * (ring_a.mismatch - ring_b.mismatch).abs();
    let g_min = ring_a.min_gamma().min(ring_b.min_gamma());
    let feature = (1.0 / t).min(g_min);
    let n_s = next_4k1((2.0 * half / feature * 48.0) as usize).clamp(257, 40_001);
    let h = 2.0 * half / (n_s - 1) as f64;

    let kq = KernelQuadrature {
        ring_a,
        ring_b,
        offset_a,
        offset_b,
        g_max: ring_a.max_gamma().max(ring_b.max_gamma()),
        g_min,
    };

    // coarse K nodes: 24 per linewidth across the s window
    let coarse_step = g_min / 24.0;
    let n_coarse = ((2.0 * half / coarse_step) as usize + 4).min(n_s) | 1;
    let coarse_h = 2.0 * half / (n_coarse - 1) as f64;
    let k_coarse: Vec<Complex64> = (0..n_coarse)
        .map(|k| kq.eval(center - half + k as f64 * coarse_h))
        .collect();
    let k_at = |s: f64| -> Complex64 {
        if n_coarse >= n_s {
            return kq.eval(s);
        }
        // quadratic Lagrange on the nearest three coarse nodes
        let f = (s - (center - half)) / coarse_h;
        let i0 = (f.round() as usize).clamp(1, n_coarse - 2);
        let u = f - i0 as f64;
        k_coarse[i0 - 1] * (0.5 * u * (u - 1.0))
            + k_coarse[i0] * (1.0 - u * u)
            + k_coarse[i0 + 1] * (0.5 * u * (u + 1.0))
    };

    let mut acc = KahanSumC64::new();
    for ks in 0..n_s {
        let s = center - half + ks as f64 * h;
        let (ga, _) = kernel_a.g_windowed(s, ga_half, n1_a);
        let (gb, _) = kernel_b.g_windowed(s, gb_half, n1_b);
        let gg = ga * gb.conj();
        if gg.norm_sqr() == 0.0 {
            continue;
        }
        acc.add(simpson_weight(ks, n_s) * gg * k_at(s));
    }
    Ok(acc.value() * h / (norm_a * norm_b).sqrt())
}

/// Quadrature of the Lorentzian cross kernel
/// K(s) = int conj(F_aS)(W) F_bS(W) conj(F_aI)(s - W) F_bI(s - W) dW
/// with the bin offsets folded into the arguments.
struct KernelQuadrature<'a> {
    ring_a: &'a RingParams,
    ring_b: &'a RingParams,
    offset_a: f64,
    offset_b: f64,
    g_max: f64,
    g_min: f64,
}

impl KernelQuadrature<'_> {
    fn eval(&self, s: f64) -> Complex64 {
        let spread = self.offset_a.abs() + self.offset_b.abs();
        let half = 20.0 * self.g_max + spread + 0.5 * s.abs();
        let n_k = next_4k1((2.0 * half / (self.g_min / 24.0)) as usize).clamp(257, 20_001);
        let hk = 2.0 * half / (n_k - 1) as f64;
        let (ra, rb) = (self.ring_a, self.ring_b);
        let (gs_a, gi_a) = (ra.gamma_signal(), ra.gamma_idler());
        let (gs_b, gi_b) = (rb.gamma_signal(), rb.gamma_idler());
        let mut acc = KahanSumC64::new();
        for kw in 0..n_k {
            let w = 0.5 * s - half + kw as f64 * hk;
            let v = field_enhancement(
                w + self.offset_a,
                gs_a,
                ra.group_velocity,
                ra.coupling_eff,
                ra.radius,
                EnhancementSign::Plus,
            )
            .conj()
                * field_enhancement(
                    w + self.offset_b,
                    gs_b,
                    rb.group_velocity,
                    rb.coupling_eff,
                    rb.radius,
                    EnhancementSign::Plus,
                )
                * field_enhancement(
                    s - w - self.offset_a,
                    gi_a,
                    ra.group_velocity,
                    ra.coupling_eff,
                    ra.radius,
                    EnhancementSign::Plus,
                )
                .conj()
                * field_enhancement(
                    s - w - self.offset_b,
                    gi_b,
                    rb.group_velocity,
                    rb.coupling_eff,
                    rb.radius,
                    EnhancementSign::Plus,
                );
            acc.add(simpson_weight(kw, n_k) * v);
        }
        acc.value() * hk
    }
}
