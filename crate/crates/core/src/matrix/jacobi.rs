use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius mass at which iteration stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
/// Sweep cap.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending and eigenvectors in
/// the matching columns.
#[derive(Debug, Clone)]
pub struct JacobiEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigensolver.
///
/// Each sweep visits every off-diagonal pair `(p, q)` once and applies the
/// plane rotation that annihilates `a[p][q]`. Iteration stops once the
/// off-diagonal Frobenius mass is at most `JACOBI_TOLERANCE * ‖a‖_F`.
/// Only the upper triangle's symmetric average of the input is used.
pub fn jacobi_eigen(input: &DMatrix<f64>) -> Result<JacobiEigen> {
    jacobi_eigen_polished(input, 0)
}

/// Like [`jacobi_eigen`], followed by `extra` further sweeps once the
/// tolerance is met. Convergence is quadratic, so two extra sweeps bring the
/// eigenvectors to working precision, which subspace comparisons need.
pub fn jacobi_eigen_polished(input: &DMatrix<f64>, extra: usize) -> Result<JacobiEigen> {
    let n = input.nrows();
    assert_eq!(n, input.ncols(), "jacobi_eigen needs a square matrix");
    let mut a = DMatrix::from_fn(n, n, |i, j| 0.5 * (input[(i, j)] + input[(j, i)]));
    let mut v = DMatrix::<f64>::identity(n, n);
    let frob = a.norm();
    let target = JACOBI_TOLERANCE * frob;

    let mut sweeps = 0;
    let mut polish = 0;
    loop {
        let off = off_diagonal_mass(&a);
        if off <= target {
            if polish == extra || off == 0.0 {
                break;
            }
            polish += 1;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(JacobiEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_mass(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}
