//! Small dense linear algebra for 4x4 Hermitian matrices: eigenvalues via
//! cyclic Jacobi on the real symmetric embedding.

use num_complex::Complex64;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps, ascending.
pub fn sym_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p][q].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                // 2x2 rotation annihilating a[p][q]
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Eigenvalues of a 4x4 Hermitian matrix, ascending. Uses the real symmetric
/// embedding [[Re, -Im], [Im, Re]], whose spectrum is the Hermitian spectrum
/// doubled.
pub fn hermitian_eigenvalues_4(h: &[[Complex64; 4]; 4]) -> [f64; 4] {
    let mut a = vec![vec![0.0f64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = h[i][j].re;
            a[i][j + 4] = -h[i][j].im;
            a[i + 4][j] = h[i][j].im;
            a[i + 4][j + 4] = h[i][j].re;
        }
    }
    let eig = sym_eigenvalues(a);
    // each eigenvalue appears twice; take every other of the sorted list
    [eig[0], eig[2], eig[4], eig[6]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let a = vec![
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ];
        let eig = sym_eigenvalues(a);
        assert!((eig[0] + 1.0).abs() < 1e-14);
        assert!((eig[1] - 2.0).abs() < 1e-14);
        assert!((eig[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_x_spectrum() {
        let a = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let eig = sym_eigenvalues(a);
        assert!((eig[0] + 1.0).abs() < 1e-14);
        assert!((eig[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_rank_one_projector() {
        // |psi><psi| with psi = (1, i, -1, -i)/2 has eigenvalues (0,0,0,1)
        let psi = [
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, -0.5),
        ];
        let mut h = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                h[i][j] = psi[i] * psi[j].conj();
            }
        }
        let eig = hermitian_eigenvalues_4(&h);
        for e in &eig[..3] {
            assert!(e.abs() < 1e-13);
        }
        assert!((eig[3] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn hermitian_known_spectrum() {
        // sigma_y embedded in 4x4 with two extra fixed levels 2 and 5
        let i = Complex64::i();
        let z = Complex64::new(0.0, 0.0);
        let h = [
            [z, -i, z, z],
            [i, z, z, z],
            [z, z, Complex64::new(2.0, 0.0), z],
            [z, z, z, Complex64::new(5.0, 0.0)],
        ];
        let eig = hermitian_eigenvalues_4(&h);
        let want = [-1.0, 1.0, 2.0, 5.0];
        for (e, w) in eig.iter().zip(want) {
            assert!((e - w).abs() < 1e-13, "{e} vs {w}");
        }
    }
}
