//! Small dense matrices and a cyclic Jacobi eigensolver.
//!
//! The chaos systems solved here never exceed a few dozen rows, so a
//! dependency-free O(n^3)-per-sweep Jacobi iteration is both adequate and
//! exactly reproducible across platforms.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Max-norm of the matrix entries.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns the orthogonal eigenvector matrix `S` (eigenvectors as columns)
/// and the eigenvalues sorted in descending order, so `S^T A S = diag(Λ)`.
/// The sign of each column is fixed by making its largest-magnitude entry
/// positive, which makes the output reproducible.
///
/// Fails if `A` is not square or not symmetric to within `1e-14` absolute.
pub fn eig_sym(a: &Mat) -> Result<(Mat, Vec<f64>)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::InvalidArgument("eig_sym needs a square matrix".into()));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-14 {
                return Err(Error::InvalidArgument(format!(
                    "matrix not symmetric: |a[{i},{j}] - a[{j},{i}]| = {:e}",
                    (a[(i, j)] - a[(j, i)]).abs()
                )));
            }
        }
    }

    let mut m = a.clone();
    let mut v = Mat::identity(n);
    let fro: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)] * m[(i, j)])
        .sum::<f64>()
        .sqrt();
    let tol = 1e-14 * fro;

    let off = |m: &Mat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&m) > tol && sweeps < 60 {
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
    }
    if off(&m) > tol.max(1e-300) && fro > 0.0 {
        return Err(Error::Internal(format!(
            "Jacobi iteration failed to converge in {sweeps} sweeps"
        )));
    }

    // sort descending by eigenvalue, stable in the original column order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));

    let mut s_mat = Mat::zeros(n, n);
    let mut lambda = vec![0.0; n];
    for (dst, &src) in order.iter().enumerate() {
        lambda[dst] = m[(src, src)];
        // sign fix: largest-magnitude entry positive
        let mut best = 0;
        for i in 1..n {
            if v[(i, src)].abs() > v[(best, src)].abs() {
                best = i;
            }
        }
        let sign = if v[(best, src)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            s_mat[(i, dst)] = sign * v[(i, src)];
        }
    }
    Ok((s_mat, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_matrix() {
        let mut a = Mat::zeros(2, 2);
        a[(0, 0)] = 3.0;
        a[(1, 1)] = 1.0;
        let (s, l) = eig_sym(&a).unwrap();
        assert_eq!(l, vec![3.0, 1.0]);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(s[(i, j)].abs(), expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn off_diagonal_two_by_two() {
        let mut a = Mat::zeros(2, 2);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = 1.0;
        let (s, l) = eig_sym(&a).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(l[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l[1], -1.0, epsilon = 1e-14);
        // columns (1,1)/sqrt(2) and (1,-1)/sqrt(2), up to the sign rule
        assert_abs_diff_eq!(s[(0, 0)], r, epsilon = 1e-14);
        assert_abs_diff_eq!(s[(1, 0)], r, epsilon = 1e-14);
        assert_abs_diff_eq!(s[(0, 0)] * s[(0, 1)] + s[(1, 0)] * s[(1, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn reconstruction_and_orthogonality() {
        // fixed pseudo-random symmetric matrix
        let n = 7;
        let mut a = Mat::zeros(n, n);
        let mut x = 0.123456789f64;
        for i in 0..n {
            for j in i..n {
                x = (x * 997.0 + 0.618).fract();
                a[(i, j)] = x - 0.5;
                a[(j, i)] = a[(i, j)];
            }
        }
        let (s, l) = eig_sym(&a).unwrap();
        let st = s.transpose();
        let sts = st.matmul(&s);
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(sts[(i, j)], expect, epsilon = 1e-12);
            }
        }
        // S diag(L) S^T == A
        let mut dl = Mat::zeros(n, n);
        for i in 0..n {
            dl[(i, i)] = l[i];
        }
        let rec = s.matmul(&dl).matmul(&st);
        for i in 0..n {
            for j in 0..n {
                assert_abs_diff_eq!(rec[(i, j)], a[(i, j)], epsilon = 1e-12 * a.max_norm().max(1.0));
            }
        }
        // descending order
        for w in l.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn non_symmetric_rejected() {
        let mut a = Mat::zeros(2, 2);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = 0.5;
        assert!(eig_sym(&a).is_err());
    }

    #[test]
    fn deterministic_output() {
        let mut a = Mat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = ((i + 1) * (j + 1)) as f64 / 3.0;
            }
        }
        let (s1, l1) = eig_sym(&a).unwrap();
        let (s2, l2) = eig_sym(&a).unwrap();
        assert_eq!(l1, l2);
        assert_eq!(s1, s2);
    }
}
