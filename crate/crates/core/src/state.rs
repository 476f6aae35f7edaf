//! The four-ring hyperentangled state: overlap integrals, the 4x4 reduced
//! density operator over polarization and frequency bin, its marginals,
//! purities (direct and closed form), and the fidelity to the ideal
//! hyperentangled state.
//!
//! Basis order throughout: `[(HH, SaIa), (HH, SbIb), (VV, SaIa), (VV, SbIb)]`.
//! Rings map onto it as 1 -> 0, 3 -> 1, 2 -> 2, 4 -> 3.

use crate::biphoton::JointSpectralAmplitude;
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues_4;
use crate::quad::KahanSumC64;
use num_complex::Complex64;
use serde::Serialize;

/// Basis labels of the reduced polarization/bin space.
pub const BASIS_LABELS: [&str; 4] = ["HH.SaIa", "HH.SbIb", "VV.SaIa", "VV.SbIb"];

/// Pairwise overlap integrals O\[n\]\[m\] of the four rings' normalized
/// biphoton wavefunctions (0-based ring indices).
#[derive(Debug, Clone)]
pub struct OverlapSet {
    pub o: [[Complex64; 4]; 4],
}

/// Discrete inner product sum phi_a phi_b* dW^2 of two normalized joint
/// spectral amplitudes on identical grids. Self-overlap is exactly 1.
pub fn overlap(a: &JointSpectralAmplitude, b: &JointSpectralAmplitude) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let mut acc = KahanSumC64::new();
    for (x, y) in a.values.iter().zip(&b.values) {
        acc.add(x * y.conj());
    }
    Ok(acc.value() * a.grid.step() * a.grid.step())
}

impl OverlapSet {
    /// All pairwise overlaps of four JSAs on a common grid.
    pub fn from_jsas(jsas: &[JointSpectralAmplitude; 4]) -> Result<Self> {
        let mut o = [[Complex64::new(0.0, 0.0); 4]; 4];
        for n in 0..4 {
            o[n][n] = Complex64::new(1.0, 0.0);
            for m in (n + 1)..4 {
                let v = overlap(&jsas[n], &jsas[m])?;
                o[n][m] = v;
                o[m][n] = v.conj();
            }
        }
        let set = OverlapSet { o };
        set.validate()?;
        Ok(set)
    }

    /// Overlaps given directly (validated): Hermitian, unit diagonal,
    /// magnitudes within Cauchy-Schwarz.
    pub fn from_matrix(o: [[Complex64; 4]; 4]) -> Result<Self> {
        let set = OverlapSet { o };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        for n in 0..4 {
            if (self.o[n][n] - 1.0).norm() > 1e-9 {
                return Err(Error::Internal(format!(
                    "self-overlap O[{n}][{n}] = {} differs from 1",
                    self.o[n][n]
                )));
            }
            for m in 0..4 {
                if (self.o[m][n] - self.o[n][m].conj()).norm() > 1e-9 {
                    return Err(Error::Internal("overlap matrix is not Hermitian".into()));
                }
                if self.o[n][m].norm() > 1.0 + 1e-9 {
                    return Err(Error::Internal(format!(
                        "|O[{n}][{m}]| = {} violates Cauchy-Schwarz",
                        self.o[n][m].norm()
                    )));
                }
            }
        }
        Ok(())
    }

    /// O\[n\]\[m\] with 1-based ring labels.
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.o[n - 1][m - 1]
    }
}

/// 4x4 reduced density operator over polarization and frequency bin in the
/// basis [`BASIS_LABELS`].
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    pub rho: [[Complex64; 4]; 4],
}

/// Which degree of freedom a 2x2 marginal retains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dof {
    /// Basis {HH, VV}.
    Polarization,
    /// Basis {SaIa, SbIb}.
    Bin,
}

/// 2x2 reduced density operator of a single degree of freedom.
#[derive(Debug, Clone)]
pub struct Marginal {
    pub rho2: [[Complex64; 2]; 2],
    pub dof: Dof,
}

/// Assembles the reduced density operator from overlaps and pump phases,
/// assuming equalized per-ring pair probabilities. With U_k = exp(2 i
/// theta_k) the independent entries are (times 1/4)
///
/// ```text
/// rho_12 = U2* O13   rho_13 = U1* O12   rho_14 = U3* O14
/// rho_23 = U1* U2 O32   rho_24 = U3* U2 O34   rho_34 = U1 U3* O24
/// ```
///
/// with unit diagonal entries and the lower triangle fixed by Hermiticity.
pub fn build_reduced_density(
    overlaps: &OverlapSet,
    theta1: f64,
    theta2: f64,
    theta3: f64,
) -> Result<ReducedDensity> {
    overlaps.validate()?;
    let u1 = Complex64::from_polar(1.0, 2.0 * theta1);
    let u2 = Complex64::from_polar(1.0, 2.0 * theta2);
    let u3 = Complex64::from_polar(1.0, 2.0 * theta3);
    let o = |n: usize, m: usize| overlaps.get(n, m);

    let quarter = 0.25;
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (k, row) in rho.iter_mut().enumerate() {
        row[k] = Complex64::new(quarter, 0.0);
    }
    rho[0][1] = quarter * u2.conj() * o(1, 3);
    rho[0][2] = quarter * u1.conj() * o(1, 2);
    rho[0][3] = quarter * u3.conj() * o(1, 4);
    rho[1][2] = quarter * u1.conj() * u2 * o(3, 2);
    rho[1][3] = quarter * u3.conj() * u2 * o(3, 4);
    rho[2][3] = quarter * u1 * u3.conj() * o(2, 4);
    for i in 0..4 {
        for j in 0..i {
            rho[i][j] = rho[j][i].conj();
        }
    }
    Ok(ReducedDensity { rho })
}

impl ReducedDensity {
    pub fn from_matrix(rho: [[Complex64; 4]; 4]) -> Result<Self> {
        let rd = ReducedDensity { rho };
        rd.validate()?;
        Ok(rd)
    }

    /// Hermiticity, unit trace, positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        for i in 0..4 {
            for j in 0..4 {
                if (self.rho[i][j] - self.rho[j][i].conj()).norm() > 1e-12 {
                    return Err(Error::Internal("density operator not Hermitian".into()));
                }
            }
        }
        let trace: Complex64 = (0..4).map(|i| self.rho[i][i]).sum();
        if (trace - 1.0).norm() > 1e-12 {
            return Err(Error::Internal(format!("trace {} differs from 1", trace)));
        }
        if self.min_eigenvalue() < -1e-10 {
            return Err(Error::Internal(format!(
                "density operator has negative eigenvalue {:.3e}",
                self.min_eigenvalue()
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues_4(&self.rho)[0]
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.rho[i][i]).sum()
    }

    /// Largest entrywise deviation from another density operator.
    pub fn max_abs_diff(&self, other: &ReducedDensity) -> f64 {
        let mut m = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.rho[i][j] - other.rho[i][j]).norm());
            }
        }
        m
    }

    /// JSON report with the matrix, both marginal purities, and the
    /// fidelity to the ideal hyperentangled state.
    pub fn report(&self, theta1: f64, theta2: f64, config_hash: &str) -> DensityReport {
        let re = self.rho.map(|row| row.map(|v| v.re));
        let im = self.rho.map(|row| row.map(|v| v.im));
        DensityReport {
            basis: BASIS_LABELS.map(String::from),
            re,
            im,
            purity_pol: purity2(&marginal(self, Dof::Polarization).rho2),
            purity_bin: purity2(&marginal(self, Dof::Bin).rho2),
            hyper_fidelity: hyper_fidelity(self, theta1, theta2),
            config_hash: config_hash.to_string(),
        }
    }
}

/// Density-operator export payload.
#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub basis: [String; 4],
    pub re: [[f64; 4]; 4],
    pub im: [[f64; 4]; 4],
    pub purity_pol: f64,
    pub purity_bin: f64,
    pub hyper_fidelity: f64,
    pub config_hash: String,
}

/// Traces out one degree of freedom of the reduced density operator.
///
/// Polarization keeps {HH, VV} with off-diagonal rho_13 + rho_24; bin keeps
/// {SaIa, SbIb} with off-diagonal rho_12 + rho_34 (Hermitian partners below).
pub fn marginal(rho: &ReducedDensity, dof: Dof) -> Marginal {
    let r = &rho.rho;
    let rho2 = match dof {
        Dof::Polarization => {
            let off = r[0][2] + r[1][3];
            [[r[0][0] + r[1][1], off], [off.conj(), r[2][2] + r[3][3]]]
        }
        Dof::Bin => {
            let off = r[0][1] + r[2][3];
            [[r[0][0] + r[2][2], off], [off.conj(), r[1][1] + r[3][3]]]
        }
    };
    Marginal { rho2, dof }
}

impl Marginal {
    pub fn purity(&self) -> f64 {
        purity2(&self.rho2)
    }
}

/// Tr(rho^2) = sum |rho_ij|^2 for a Hermitian matrix.
pub fn purity2(rho: &[[Complex64; 2]; 2]) -> f64 {
    rho.iter().flatten().map(|v| v.norm_sqr()).sum()
}

/// Tr(rho^2) of the full 4x4 operator.
pub fn purity4(rho: &ReducedDensity) -> f64 {
    rho.rho.iter().flatten().map(|v| v.norm_sqr()).sum()
}

/// Closed-form polarization purity
/// 1/2 + (|O12|^2 + |O34|^2 + 2 Re[e^{2i(t3 - t2 - t1)} O12 O34*]) / 8.
pub fn closed_form_purity_pol(
    o12: Complex64,
    o34: Complex64,
    theta1: f64,
    theta2: f64,
    theta3: f64,
) -> f64 {
    let phase = Complex64::from_polar(1.0, 2.0 * (theta3 - theta2 - theta1));
    0.5 + (o12.norm_sqr() + o34.norm_sqr() + 2.0 * (phase * o12 * o34.conj()).re) / 8.0
}

/// Closed-form frequency-bin purity, same structure with O13 and O24.
pub fn closed_form_purity_bin(
    o13: Complex64,
    o24: Complex64,
    theta1: f64,
    theta2: f64,
    theta3: f64,
) -> f64 {
    let phase = Complex64::from_polar(1.0, 2.0 * (theta3 - theta2 - theta1));
    0.5 + (o13.norm_sqr() + o24.norm_sqr() + 2.0 * (phase * o13 * o24.conj()).re) / 8.0
}

/// Fidelity <psi_HE| rho |psi_HE> with
/// psi_HE = (|HH> + e^{2 i t1}|VV>)(|SaIa> + e^{2 i t2}|SbIb>) / 2.
pub fn hyper_fidelity(rho: &ReducedDensity, theta1: f64, theta2: f64) -> f64 {
    let u1 = Complex64::from_polar(1.0, 2.0 * theta1);
    let u2 = Complex64::from_polar(1.0, 2.0 * theta2);
    let psi = [Complex64::new(0.5, 0.0), 0.5 * u2, 0.5 * u1, 0.5 * u1 * u2];
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += psi[i].conj() * rho.rho[i][j] * psi[j];
        }
    }
    acc.re
}

/// Bell state targeted by a marginal for a given pump phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    /// General phase 2 theta (mod 2 pi) between the two basis states.
    Phi(f64),
}

impl std::fmt::Display for BellLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BellLabel::PhiPlus => write!(f, "Phi+"),
            BellLabel::PhiMinus => write!(f, "Phi-"),
            BellLabel::Phi(phase) => write!(f, "Phi({phase:.4} rad)"),
        }
    }
}

fn bell_label(theta: f64) -> BellLabel {
    let u = Complex64::from_polar(1.0, 2.0 * theta);
    if (u - 1.0).norm() < 1e-9 {
        BellLabel::PhiPlus
    } else if (u + 1.0).norm() < 1e-9 {
        BellLabel::PhiMinus
    } else {
        BellLabel::Phi(u.arg())
    }
}

/// Labels the Bell states the polarization and bin marginals target:
/// Phi+ when e^{2 i theta} = +1, Phi- when -1.
pub fn bell_phase_report(theta1: f64, theta2: f64) -> (BellLabel, BellLabel) {
    (bell_label(theta1), bell_label(theta2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biphoton::{compute_jsa, sample_jsa};
    use crate::model::default_system;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn uniform_overlaps(v: Complex64) -> OverlapSet {
        let mut o = [[v; 4]; 4];
        for (n, row) in o.iter_mut().enumerate() {
            row[n] = c(1.0, 0.0);
            for m in 0..n {
                row[m] = v.conj();
            }
        }
        OverlapSet::from_matrix(o).unwrap()
    }

    /// Gram matrix of four random unit vectors: a physically realizable
    /// overlap set (Hermitian, unit diagonal, PSD).
    fn random_overlaps(rng: &mut impl Rng) -> OverlapSet {
        let dim = 6;
        let mut vecs = Vec::new();
        for _ in 0..4 {
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for x in &mut v {
                *x /= norm;
            }
            vecs.push(v);
        }
        let mut o = [[c(0.0, 0.0); 4]; 4];
        for n in 0..4 {
            for m in 0..4 {
                o[n][m] = vecs[n]
                    .iter()
                    .zip(&vecs[m])
                    .map(|(a, b)| a * b.conj())
                    .sum();
            }
            o[n][n] = c(1.0, 0.0);
        }
        OverlapSet::from_matrix(o).unwrap()
    }

    #[test]
    fn self_overlap_is_unity() {
        let sys = default_system();
        let jsa = compute_jsa(&sys.rings[0], &sys.pumps[0], &sys.grid).unwrap();
        let o = overlap(&jsa, &jsa).unwrap();
        assert!((o - 1.0).norm() < 1e-12);
    }

    #[test]
    fn overlap_demands_identical_grids() {
        let sys = default_system();
        let a = compute_jsa(&sys.rings[0], &sys.pumps[0], &sys.grid).unwrap();
        let other = crate::model::GridSpec::new(sys.grid.half_width, 545).unwrap();
        let b = compute_jsa(&sys.rings[0], &sys.pumps[0], &other).unwrap();
        match overlap(&a, &b) {
            Err(Error::GridMismatch) => {}
            other => panic!("expected GridMismatch, got {other:?}"),
        }
    }

    #[test]
    fn displaced_wavefunctions_are_orthogonal() {
        // mismatch displaced by far more than max(Gamma, 1/T)
        let sys = default_system();
        let grid = sys.grid;
        let a = compute_jsa(&sys.rings[0], &sys.pumps[0], &grid).unwrap();
        let far = sys.rings[0].with_mismatch(sys.rings[0].mismatch + 20.0 * sys.max_gamma());
        let b = sample_jsa(&far, &sys.pumps[0], &grid, 0.0).unwrap();
        assert!(overlap(&a, &b).unwrap().norm() < 1e-3);
    }

    #[test]
    fn reference_point_overlap_regression() {
        // |O12| at the reference configuration, frozen from an independent
        // quadrature; gamma_pol via the closed form lands near 0.9994.
        let sys = default_system();
        let j1 = compute_jsa(&sys.rings[0], &sys.pumps[0], &sys.grid).unwrap();
        let j2 = compute_jsa(&sys.rings[1], &sys.pumps[1], &sys.grid).unwrap();
        let o12 = overlap(&j1, &j2).unwrap();
        assert!(
            (o12.norm() - 0.999406).abs() < 1e-4,
            "|O12| = {}",
            o12.norm()
        );
        let j3 = compute_jsa(&sys.rings[2], &sys.pumps[2], &sys.grid).unwrap();
        let j4 = compute_jsa(&sys.rings[3], &sys.pumps[3], &sys.grid).unwrap();
        let o34 = overlap(&j3, &j4).unwrap();
        let gp = closed_form_purity_pol(o12, o34, 0.0, 0.0, 0.0);
        assert!((0.9990..=0.9999).contains(&gp), "gamma_pol = {gp}");
    }

    #[test]
    fn rank_one_when_overlaps_are_unity() {
        let rho = build_reduced_density(&uniform_overlaps(c(1.0, 0.0)), 0.0, 0.0, 0.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((rho.rho[i][j] - 0.25).norm() < 1e-15);
            }
        }
        assert!((purity4(&rho) - 1.0).abs() < 1e-12);
        rho.validate().unwrap();
    }

    #[test]
    fn fully_dephased_when_overlaps_vanish() {
        let rho = build_reduced_density(&uniform_overlaps(c(0.0, 0.0)), 0.3, 0.9, 1.1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert!((rho.rho[i][j] - want).norm() < 1e-15);
            }
        }
        assert!((purity4(&rho) - 0.25).abs() < 1e-12);
        let mp = marginal(&rho, Dof::Polarization);
        assert!((mp.purity() - 0.5).abs() < 1e-12);
        assert!((mp.rho2[0][0] - 0.5).norm() < 1e-15);
    }

    #[test]
    fn pure_state_structure_with_phases() {
        // all O = 1, theta3 = theta1 + theta2: rho = |psi><psi| with
        // psi = (1, U2, U1, U1 U2)/2
        let (t1, t2) = (0.37, 1.21);
        let rho = build_reduced_density(&uniform_overlaps(c(1.0, 0.0)), t1, t2, t1 + t2).unwrap();
        let u1 = Complex64::from_polar(1.0, 2.0 * t1);
        let u2 = Complex64::from_polar(1.0, 2.0 * t2);
        let psi = [c(0.5, 0.0), 0.5 * u2, 0.5 * u1, 0.5 * u1 * u2];
        for i in 0..4 {
            for j in 0..4 {
                assert!((rho.rho[i][j] - psi[i] * psi[j].conj()).norm() < 1e-12);
            }
        }
        assert!((hyper_fidelity(&rho, t1, t2) - 1.0).abs() < 1e-12);
        let mp = marginal(&rho, Dof::Polarization);
        // Bell projector (1/2)[[1, U1*], [U1, 1]]
        assert!((mp.rho2[0][1] - 0.5 * u1.conj()).norm() < 1e-12);
        assert!((mp.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purity_examples() {
        let half = [[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]];
        assert!((purity2(&half) - 0.5).abs() < 1e-15);
        let proj = [[c(0.5, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(0.5, 0.0)]];
        assert!((purity2(&proj) - 1.0).abs() < 1e-15);
        let rho = build_reduced_density(&uniform_overlaps(c(0.0, 0.0)), 0.0, 0.0, 0.0).unwrap();
        assert!((purity4(&rho) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn closed_form_trivial_points() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert!((closed_form_purity_pol(one, one, 0.4, 0.7, 1.1) - 1.0).abs() < 1e-12);
        assert!((closed_form_purity_pol(zero, zero, 0.1, 0.2, 0.3) - 0.5).abs() < 1e-15);
        // destructive phase: theta3 - theta2 - theta1 = pi/2
        let g = closed_form_purity_pol(one, one, 0.0, 0.0, PI / 2.0);
        assert!((g - 0.5).abs() < 1e-12);
        assert!((closed_form_purity_bin(one, one, 0.2, 0.3, 0.5) - 1.0).abs() < 1e-12);
        assert!((closed_form_purity_bin(zero, zero, 0.0, 0.0, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_direct_trace() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        for _ in 0..1000 {
            let o = random_overlaps(&mut rng);
            let t1 = rng.gen::<f64>() * PI;
            let t2 = rng.gen::<f64>() * PI;
            let t3 = rng.gen::<f64>() * 2.0 * PI;
            let rho = build_reduced_density(&o, t1, t2, t3).unwrap();
            let gp = marginal(&rho, Dof::Polarization).purity();
            let gb = marginal(&rho, Dof::Bin).purity();
            let gp_cf = closed_form_purity_pol(o.get(1, 2), o.get(3, 4), t1, t2, t3);
            let gb_cf = closed_form_purity_bin(o.get(1, 3), o.get(2, 4), t1, t2, t3);
            assert!((gp - gp_cf).abs() < 1e-12, "pol {gp} vs {gp_cf}");
            assert!((gb - gb_cf).abs() < 1e-12, "bin {gb} vs {gb_cf}");
        }
    }

    #[test]
    fn gram_densities_are_positive() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..200 {
            let o = random_overlaps(&mut rng);
            let rho =
                build_reduced_density(&o, rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>())
                    .unwrap();
            assert!(rho.min_eigenvalue() > -1e-10);
            assert!((rho.trace() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn purity_depends_only_on_the_phase_combination() {
        // with real overlaps, purity is a function of theta3 - theta2 -
        // theta1 alone
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        for _ in 0..50 {
            let m12 = rng.gen::<f64>();
            let m34 = rng.gen::<f64>();
            let mut o = [[c(0.0, 0.0); 4]; 4];
            for (n, row) in o.iter_mut().enumerate() {
                row[n] = c(1.0, 0.0);
            }
            o[0][1] = c(m12, 0.0);
            o[1][0] = c(m12, 0.0);
            o[2][3] = c(m34, 0.0);
            o[3][2] = c(m34, 0.0);
            let o = OverlapSet::from_matrix(o).unwrap();
            let d = rng.gen::<f64>() * PI;
            let (a1, a2) = (rng.gen::<f64>(), rng.gen::<f64>());
            let (b1, b2) = (rng.gen::<f64>(), rng.gen::<f64>());
            let pa = marginal(
                &build_reduced_density(&o, a1, a2, d + a1 + a2).unwrap(),
                Dof::Polarization,
            )
            .purity();
            let pb = marginal(
                &build_reduced_density(&o, b1, b2, d + b1 + b2).unwrap(),
                Dof::Polarization,
            )
            .purity();
            assert!((pa - pb).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_purity_for_any_integer_phase_offset() {
        for m in 0..3 {
            let t1 = 0.8;
            let t2 = 0.5;
            let t3 = t1 + t2 + PI * m as f64;
            let o = uniform_overlaps(c(1.0, 0.0));
            let rho = build_reduced_density(&o, t1, t2, t3).unwrap();
            assert!((marginal(&rho, Dof::Polarization).purity() - 1.0).abs() < 1e-12);
            assert!((marginal(&rho, Dof::Bin).purity() - 1.0).abs() < 1e-12);
            assert!((purity4(&rho) - 1.0).abs() < 1e-12);
            assert!((hyper_fidelity(&rho, t1, t2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_of_the_dephased_state() {
        let rho = build_reduced_density(&uniform_overlaps(c(0.0, 0.0)), 0.0, 0.0, 0.0).unwrap();
        assert!((hyper_fidelity(&rho, 0.0, 0.0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bell_labels() {
        assert_eq!(bell_phase_report(PI, 0.0).0, BellLabel::PhiPlus);
        assert_eq!(bell_phase_report(PI / 2.0, 0.0).0, BellLabel::PhiMinus);
        assert_eq!(bell_phase_report(0.0, PI).1, BellLabel::PhiPlus);
        match bell_phase_report(0.7, 0.0).0 {
            BellLabel::Phi(_) => {}
            other => panic!("expected generic phase, got {other}"),
        }
    }

    #[test]
    fn invalid_overlaps_rejected() {
        let mut o = [[c(0.0, 0.0); 4]; 4];
        for (n, row) in o.iter_mut().enumerate() {
            row[n] = c(1.0, 0.0);
        }
        o[0][1] = c(1.5, 0.0);
        o[1][0] = c(1.5, 0.0);
        assert!(OverlapSet::from_matrix(o).is_err());
    }

    #[test]
    fn density_report_serializes() {
        let rho = build_reduced_density(&uniform_overlaps(c(1.0, 0.0)), 0.0, 0.0, 0.0).unwrap();
        let rep = rho.report(0.0, 0.0, "deadbeef");
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"HH.SaIa\""));
        assert!(json.contains("purity_pol"));
        assert!((rep.purity_pol - 1.0).abs() < 1e-12);
    }
}
