//! In-repo Hermitian eigensolver: cyclic complex Jacobi rotations.
//!
//! For the dimensions this crate handles (≤ 256) Jacobi is accurate well
//! beyond the required 1e-9 residual and needs no external linear algebra
//! backend. Eigenvalues come back ascending; eigenvectors are orthonormal
//! to machine precision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{cr, ComplexMatrix, Ket, C_ZERO, OP_HERMITIAN_TOL};

const MAX_SWEEPS: usize = 64;

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<Ket>)> {
    let (vals, vecs) = jacobi(m, true)?;
    let vecs = vecs.expect("eigenvectors requested");
    Ok((vals, vecs))
}

/// Ascending eigenvalues only (skips eigenvector accumulation).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (vals, _) = jacobi(m, false)?;
    Ok(vals)
}

/// Largest eigenvalue and its eigenvector.
pub fn top_eigenpair(m: &ComplexMatrix) -> Result<(f64, Ket)> {
    let (vals, mut vecs) = hermitian_eig(m)?;
    let top = vecs.pop().expect("nonempty spectrum");
    Ok((*vals.last().expect("nonempty spectrum"), top))
}

fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<Ket>>)> {
    m.check_hermitian(OP_HERMITIAN_TOL)?;
    let n = m.dim();

    // Work on the symmetrized copy so tiny input asymmetry cannot bias the
    // rotations.
    let mut a: Vec<Complex64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push((m.get(i, j) + m.get(j, i).conj()) * 0.5);
        }
    }
    let mut v: Option<Vec<Complex64>> = if want_vectors {
        let mut id = vec![C_ZERO; n * n];
        for i in 0..n {
            id[i * n + i] = cr(1.0);
        }
        Some(id)
    } else {
        None
    };

    let scale = frob(&a).max(1.0);
    let target = scale * 1e-15;
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_norm(&a, n) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= target / (n as f64) {
                    continue;
                }
                let phase = apq / r; // e^{i φ}
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                // Unitary J: J[p][p]=c, J[q][q]=c, J[p][q]=s·e^{iφ}, J[q][p]=-s·e^{-iφ}.
                let s_pq = phase * sth; // J[p][q]
                let s_qp = -phase.conj() * sth; // J[q][p]

                // Columns: A ← A·J
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * cth + akq * s_qp;
                    a[k * n + q] = akp * s_pq + akq * cth;
                }
                // Rows: A ← J†·A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * cth + aqk * s_qp.conj();
                    a[q * n + k] = apk * s_pq.conj() + aqk * cth;
                }
                // Clean the rotated pair to keep the matrix exactly Hermitian.
                a[p * n + q] = C_ZERO;
                a[q * n + p] = C_ZERO;
                a[p * n + p] = cr(a[p * n + p].re);
                a[q * n + q] = cr(a[q * n + q].re);

                if let Some(vm) = v.as_mut() {
                    for k in 0..n {
                        let vkp = vm[k * n + p];
                        let vkq = vm[k * n + q];
                        vm[k * n + p] = vkp * cth + vkq * s_qp;
                        vm[k * n + q] = vkp * s_pq + vkq * cth;
                    }
                }
            }
        }
    }
    if !converged && off_norm(&a, n) > target {
        return Err(Error::EigenNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vecs = v.map(|vm| {
        order
            .iter()
            .map(|&col| {
                let amps: Vec<Complex64> = (0..n).map(|row| vm[row * n + col]).collect();
                Ket::from_raw(amps)
            })
            .collect()
    });
    Ok((vals, vecs))
}

fn frob(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn off_norm(a: &[Complex64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::hs_distance;
    use crate::test_support::{assert_close, random_hermitian, rng};

    #[test]
    fn identity_spectrum() {
        let (vals, _) = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(vals.len(), 4);
        for v in vals {
            assert_close(v, 1.0, 1e-14);
        }
    }

    #[test]
    fn pauli_x_spectrum() {
        let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (vals, vecs) = hermitian_eig(&sx).unwrap();
        assert_close(vals[0], -1.0, 1e-14);
        assert_close(vals[1], 1.0, 1e-14);
        for (val, vec) in vals.iter().zip(&vecs) {
            // residual ‖m·v − λ·v‖
            let mut res = 0.0;
            for i in 0..2 {
                let mut mv = C_ZERO;
                for j in 0..2 {
                    mv += sx.get(i, j) * vec.get(j);
                }
                res += (mv - vec.get(i) * *val).norm_sqr();
            }
            assert!(res.sqrt() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            hermitian_eig(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn random_hermitian_reconstruction_and_orthonormality() {
        let mut r = rng(97);
        for &dim in &[2usize, 3, 5, 8, 16] {
            let m = random_hermitian(&mut r, dim);
            let (vals, vecs) = hermitian_eig(&m).unwrap();
            // ascending
            for w in vals.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
            // orthonormal within 1e-9
            for i in 0..dim {
                for j in 0..dim {
                    let ip = vecs[i].inner(&vecs[j]).unwrap();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip.norm() - expected).abs() < 1e-9);
                }
            }
            // Σ λ_i Π(v_i) reconstructs the input within 1e-9
            let mut rebuilt = ComplexMatrix::zeros(dim);
            for (val, vec) in vals.iter().zip(&vecs) {
                rebuilt = rebuilt.add(&vec.projector().scale(*val)).unwrap();
            }
            assert!(hs_distance(&rebuilt, &m).unwrap() < 1e-9);
            // residuals per pair
            for (val, vec) in vals.iter().zip(&vecs) {
                let mut res = 0.0;
                for i in 0..dim {
                    let mut mv = C_ZERO;
                    for j in 0..dim {
                        mv += m.get(i, j) * vec.get(j);
                    }
                    res += (mv - vec.get(i) * *val).norm_sqr();
                }
                assert!(res.sqrt() <= 1e-9, "residual {} at dim {}", res.sqrt(), dim);
            }
        }
    }

    #[test]
    fn large_dimension_converges() {
        let mut r = rng(101);
        let m = random_hermitian(&mut r, 64);
        let vals = eigenvalues(&m).unwrap();
        assert_eq!(vals.len(), 64);
        let trace: f64 = (0..64).map(|i| m.get(i, i).re).sum();
        assert_close(vals.iter().sum::<f64>(), trace, 1e-9);
    }
}
