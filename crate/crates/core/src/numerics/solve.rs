use super::{NumericsError, SymMatrix};

/// Solves `a x = rhs` by Gaussian elimination with partial pivoting, followed
/// by one step of iterative refinement.
///
/// A pivot below `1e-13 * |a|_inf` is reported as
/// [`NumericsError::SingularMatrix`].
pub fn solve_sym(a: &SymMatrix, rhs: &[f64]) -> Result<Vec<f64>, NumericsError> {
    let n = a.dim();
    if rhs.len() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let lu = Lu::factor(a)?;
    let mut x = lu.solve(rhs);
    let ax = a.mul_vec(&x);
    let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, y)| b - y).collect();
    let dx = lu.solve(&r);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    Ok(x)
}

struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &SymMatrix) -> Result<Self, NumericsError> {
        let n = a.dim();
        let tol = 1e-13 * a.norm_inf().max(f64::MIN_POSITIVE);
        let mut lu = a.to_dense();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].abs()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot <= tol {
                return Err(NumericsError::SingularMatrix { row: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * y[j]).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * y[j]).sum();
            y[i] = (y[i] - s) / self.lu[i * n + i];
        }
        y
    }
}
