use serde::{Deserialize, Serialize};

use super::{NumericsError, SymMatrix};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition with ascending eigenvalues.
///
/// `vectors[k]` is the eigenvector belonging to `values[k]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi on a full copy. Returns eigenvalues (unsorted), the
/// row-major eigenvector matrix (columns are eigenvectors) and whether the
/// off-diagonal mass dropped below the convergence threshold.
fn jacobi(a: &SymMatrix, want_vectors: bool) -> (Vec<f64>, Vec<f64>, bool) {
    let n = a.dim();
    let mut m = a.to_dense();
    let mut v = vec![0.0; if want_vectors { n * n } else { 0 }];
    if want_vectors {
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
    }
    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut converged = n <= 1 || frob == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let values = (0..n).map(|i| m[i * n + i]).collect();
    (values, v, converged)
}

/// Full symmetric eigen-decomposition, eigenvalues ascending and
/// eigenvectors orthonormal.
pub fn eig_sym(a: &SymMatrix) -> Result<SymEigen, NumericsError> {
    let n = a.dim();
    let (values, v, converged) = jacobi(a, true);
    if !converged {
        return Err(NumericsError::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Ok(SymEigen {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
            .collect(),
    })
}

/// Ascending eigenvalues only. Never fails: after the sweep cap the current
/// diagonal is returned, which is already accurate for any matrix met here.
pub fn eigenvalues_sym(a: &SymMatrix) -> Vec<f64> {
    let (mut values, _, _) = jacobi(a, false);
    values.sort_by(f64::total_cmp);
    values
}

/// Lower Cholesky factor `l` with `a = l l^T`, packed row-major.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

pub fn cholesky(a: &SymMatrix) -> Result<Cholesky, NumericsError> {
    let n = a.dim();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let d = a.get(i, i) - s;
                if !(d > 0.0) {
                    return Err(NumericsError::MassNotPositiveDefinite { row: i, pivot: d });
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (a.get(i, j) - s) / l[j * n + j];
            }
        }
    }
    Ok(Cholesky { n, l })
}

impl Cholesky {
    /// `l^{-1} b`.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.l[i * n + k] * y[k]).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        y
    }

    /// `l^{-T} b`.
    pub fn backward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.l[k * n + i] * y[k]).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        y
    }
}

/// Smallest `p` eigenpairs of `k x = lambda m x` for positive definite `m`,
/// by reduction to `l^{-1} k l^{-T}`. Eigenvectors are `m`-orthonormal.
pub fn eig_gen_sym(k: &SymMatrix, m: &SymMatrix, p: usize) -> Result<SymEigen, NumericsError> {
    let n = k.dim();
    if m.dim() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            got: m.dim(),
        });
    }
    let chol = cholesky(m)?;
    // columns of l^{-1} k, then rows of l^{-1} (l^{-1} k)^T
    let mut w = vec![0.0; n * n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| k.get(i, j)).collect();
        let y = chol.forward(&col);
        for i in 0..n {
            w[i * n + j] = y[i];
        }
    }
    let mut c = SymMatrix::zeros(n);
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| w[i * n + j]).collect();
        let y = chol.forward(&row);
        for (j, &x) in y.iter().enumerate().take(i + 1) {
            c.set(i, j, x);
        }
    }
    let eig = eig_sym(&c)?;
    let p = p.min(n);
    Ok(SymEigen {
        values: eig.values[..p].to_vec(),
        vectors: eig.vectors[..p].iter().map(|y| chol.backward(y)).collect(),
    })
}

/// Eigenvalue sign counts at a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inertia {
    pub n_negative: usize,
    pub n_zero: usize,
    pub n_positive: usize,
    pub zero_tolerance: f64,
}

impl Inertia {
    pub fn is_positive_definite(&self) -> bool {
        self.n_negative == 0 && self.n_zero == 0
    }

    /// Default tolerance `1e-10 * |a|_inf`.
    pub fn default_tolerance(a: &SymMatrix) -> f64 {
        1e-10 * a.norm_inf()
    }
}

/// Counts eigenvalues below `-zero_tol`, within `[-zero_tol, zero_tol]` and
/// above `zero_tol`. Congruent matrices share the same counts.
pub fn inertia(a: &SymMatrix, zero_tol: f64) -> Inertia {
    let values = eigenvalues_sym(a);
    Inertia {
        n_negative: values.iter().filter(|&&x| x < -zero_tol).count(),
        n_zero: values.iter().filter(|&&x| x.abs() <= zero_tol).count(),
        n_positive: values.iter().filter(|&&x| x > zero_tol).count(),
        zero_tolerance: zero_tol,
    }
}
