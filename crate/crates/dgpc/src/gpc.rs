//! Polynomial chaos basis and the Galerkin transport system.
//!
//! The random wave speed lives on `(-1, 1)` with the uniform density
//! `ρ(y) = 1/2`, so the chaos basis is the normalized Legendre family
//! `P̃_n = sqrt(2n+1) P_n` with `E[P̃_n P̃_m] = δ_nm`. Projecting
//! `u_t = c(y) u_x` onto the first `N+1` basis polynomials yields the
//! symmetric system `v_t = A v_x` with
//! `a_nk = ∫ c(y) P̃_n(y) P̃_k(y) ρ(y) dy`, which is diagonalized once at
//! setup into characteristic speeds.

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, Mat};
use crate::quad::GaussRule;

/// Normalized Legendre polynomial `P̃_n(y) = sqrt(2n+1) P_n(y)`,
/// orthonormal under the uniform density `ρ = 1/2` on `(-1, 1)`.
pub fn legendre_orthonormal(n: usize, y: f64) -> f64 {
    (2.0 * n as f64 + 1.0).sqrt() * crate::quad::legendre(n, y)
}

/// Gauss rule for the density `ρ = 1/2`: Legendre nodes with weights
/// rescaled to sum to one. Exact for polynomials of degree `2q - 1`.
pub fn gauss_legendre_rule(q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = GaussRule::legendre(q)?;
    let weights = rule.weights.iter().map(|w| 0.5 * w).collect();
    Ok((rule.nodes, weights))
}

/// Orthonormal chaos basis of maximal degree `N` with its quadrature rule.
///
/// The three-term recurrence is stored in coefficient form
/// `b_{n+1} P̃_{n+1} = (y - a_n) P̃_n - b_n P̃_{n-1}`, which keeps the basis
/// data-driven; for the uniform case `a_n = 0` and `b_n = n / sqrt(4n² - 1)`.
#[derive(Debug, Clone)]
pub struct GpcBasis {
    n_max: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    quad_nodes: Vec<f64>,
    quad_weights: Vec<f64>,
}

impl GpcBasis {
    /// Basis for the uniform distribution on `(-1, 1)`, with a quadrature
    /// rule of `N + 4` nodes (enough margin for low-degree polynomial wave
    /// speeds against degree-`2N` basis products).
    pub fn uniform(n_max: usize) -> Result<Self> {
        Self::uniform_with_quad(n_max, n_max + 4)
    }

    /// Same as [`GpcBasis::uniform`] with an explicit quadrature node count.
    pub fn uniform_with_quad(n_max: usize, q: usize) -> Result<Self> {
        let (quad_nodes, quad_weights) = gauss_legendre_rule(q)?;
        let alpha = vec![0.0; n_max + 2];
        let beta: Vec<f64> = (0..n_max + 2)
            .map(|n| {
                let n = n as f64;
                if n == 0.0 { 0.0 } else { n / (4.0 * n * n - 1.0).sqrt() }
            })
            .collect();
        Ok(Self { n_max, alpha, beta, quad_nodes, quad_weights })
    }

    pub fn degree(&self) -> usize {
        self.n_max
    }

    /// Number of retained basis polynomials, `N + 1`.
    pub fn len(&self) -> usize {
        self.n_max + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn quad_nodes(&self) -> &[f64] {
        &self.quad_nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// Evaluate `P̃_n(y)` from the stored recurrence coefficients.
    pub fn eval(&self, n: usize, y: f64) -> f64 {
        assert!(n <= self.n_max + 1, "degree {n} beyond basis capacity");
        let mut p_prev = 0.0;
        let mut p = 1.0;
        for m in 0..n {
            let p_next = ((y - self.alpha[m]) * p - self.beta[m] * p_prev) / self.beta[m + 1];
            p_prev = p;
            p = p_next;
        }
        p
    }

    /// Evaluate `P̃_0..P̃_n` at `y` in one recurrence pass.
    pub fn eval_all(&self, n: usize, y: f64) -> Vec<f64> {
        assert!(n <= self.n_max + 1);
        let mut out = Vec::with_capacity(n + 1);
        let mut p_prev = 0.0;
        let mut p = 1.0;
        out.push(p);
        for m in 0..n {
            let p_next = ((y - self.alpha[m]) * p - self.beta[m] * p_prev) / self.beta[m + 1];
            p_prev = p;
            p = p_next;
            out.push(p);
        }
        out
    }

    /// Gram matrix of the basis under the stored quadrature; equals the
    /// identity to within quadrature accuracy.
    pub fn gram(&self) -> Mat {
        let n = self.len();
        let mut g = Mat::zeros(n, n);
        for (q, &y) in self.quad_nodes.iter().enumerate() {
            let w = self.quad_weights[q];
            let p = self.eval_all(self.n_max, y);
            for i in 0..n {
                for j in i..n {
                    g[(i, j)] += w * p[i] * p[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        g
    }
}

/// Sign split of an eigenvalue list.
///
/// `plus`/`minus` hold the strictly positive / strictly negative entries in
/// place (zero elsewhere); `zero` lists the indices with `|λ| ≤ tol` where
/// `tol = 1e-12 · max|λ|`.
#[derive(Debug, Clone)]
pub struct SpectrumSplit {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub zero: Vec<usize>,
    pub tol: f64,
}

/// Partition eigenvalues by sign with a relative tolerance for zeros.
pub fn split_spectrum(lambda: &[f64]) -> SpectrumSplit {
    let max_abs = lambda.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * max_abs;
    let mut plus = vec![0.0; lambda.len()];
    let mut minus = vec![0.0; lambda.len()];
    let mut zero = Vec::new();
    for (i, &l) in lambda.iter().enumerate() {
        if l > tol {
            plus[i] = l;
        } else if l < -tol {
            minus[i] = l;
        } else {
            zero.push(i);
        }
    }
    SpectrumSplit { plus, minus, zero, tol }
}

/// The assembled Galerkin system: matrix, eigendecomposition and sign split.
#[derive(Debug, Clone)]
pub struct GpcSystem {
    basis: GpcBasis,
    a: Mat,
    s: Mat,
    lambda: Vec<f64>,
    split: SpectrumSplit,
}

impl GpcSystem {
    /// Assemble `a_nk = Σ_q w_q c(y_q) P̃_n(y_q) P̃_k(y_q)` for `n ≤ k`,
    /// mirror the strict upper triangle, and diagonalize.
    ///
    /// The quadrature is validated by reassembling with eight extra nodes;
    /// a disagreement beyond `1e-12` relative means the stored rule cannot
    /// integrate `c` against the basis products and is reported as a
    /// configuration error.
    pub fn new<F: Fn(f64) -> f64>(basis: GpcBasis, c: F) -> Result<Self> {
        let a = Self::assemble(&basis, &c, basis.quad_nodes(), basis.quad_weights());
        // self-check with a finer rule
        let (nodes, weights) = gauss_legendre_rule(basis.quad_nodes().len() + 8)?;
        let a_fine = Self::assemble(&basis, &c, &nodes, &weights);
        let scale = a.max_norm().max(1.0);
        let n = basis.len();
        for i in 0..n {
            for j in 0..n {
                if (a[(i, j)] - a_fine[(i, j)]).abs() > 1e-12 * scale {
                    return Err(Error::Config(format!(
                        "quadrature with {} nodes cannot resolve the wave speed against \
                         the degree-{} basis (entry ({i},{j}) off by {:e})",
                        basis.quad_nodes().len(),
                        basis.degree(),
                        (a[(i, j)] - a_fine[(i, j)]).abs()
                    )));
                }
            }
        }

        let (s, lambda) = eig_sym(&a)?;
        let split = split_spectrum(&lambda);
        Ok(Self { basis, a, s, lambda, split })
    }

    fn assemble<F: Fn(f64) -> f64>(
        basis: &GpcBasis,
        c: &F,
        nodes: &[f64],
        weights: &[f64],
    ) -> Mat {
        let n = basis.len();
        let mut a = Mat::zeros(n, n);
        for (q, &y) in nodes.iter().enumerate() {
            let wc = weights[q] * c(y);
            let p = basis.eval_all(basis.degree(), y);
            for i in 0..n {
                for j in i..n {
                    a[(i, j)] += wc * p[i] * p[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                a[(i, j)] = a[(j, i)];
            }
        }
        a
    }

    pub fn basis(&self) -> &GpcBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }

    /// Orthogonal eigenvector matrix; column `n` belongs to `λ_n`.
    pub fn eigenvectors(&self) -> &Mat {
        &self.s
    }

    /// Eigenvalues sorted in descending order (positive speeds first).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    pub fn split(&self) -> &SpectrumSplit {
        &self.split
    }

    pub fn n_plus(&self) -> usize {
        self.split.plus.iter().filter(|&&l| l != 0.0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.split.minus.iter().filter(|&&l| l != 0.0).count()
    }

    /// Largest characteristic speed `max |λ|`.
    pub fn lambda_max(&self) -> f64 {
        self.lambda.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn orthonormal_legendre_values() {
        assert_eq!(legendre_orthonormal(0, 0.37), 1.0);
        assert_abs_diff_eq!(legendre_orthonormal(1, 1.0), 3.0f64.sqrt(), epsilon = 1e-15);
        // closed form P̃_2 = sqrt(5) (3y² - 1)/2 at y = 1/2
        let expect = 5.0f64.sqrt() * (3.0 * 0.25 - 1.0) / 2.0;
        assert_abs_diff_eq!(legendre_orthonormal(2, 0.5), expect, epsilon = 1e-15);
    }

    #[test]
    fn basis_recurrence_matches_direct_evaluation() {
        let basis = GpcBasis::uniform(10).unwrap();
        for n in 0..=10 {
            for &y in &[-0.95, -0.4, 0.0, 0.3, 0.99] {
                assert_abs_diff_eq!(
                    basis.eval(n, y),
                    legendre_orthonormal(n, y),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn quadrature_weights_sum_to_one() {
        let (_, w) = gauss_legendre_rule(7).unwrap();
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        let (n3, w3) = gauss_legendre_rule(3).unwrap();
        let second_moment: f64 = n3.iter().zip(&w3).map(|(y, w)| w * y * y).sum();
        assert_abs_diff_eq!(second_moment, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn gram_matrix_is_identity() {
        for n in [0usize, 3, 8, 12] {
            let basis = GpcBasis::uniform(n).unwrap();
            let g = basis.gram();
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(g[(i, j)], expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn constant_speed_gives_identity_matrix() {
        let sys = GpcSystem::new(GpcBasis::uniform(6).unwrap(), |_| 1.0).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(sys.matrix()[(i, j)], expect, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn linear_speed_matrix_is_jacobi_tridiagonal() {
        let sys = GpcSystem::new(GpcBasis::uniform(2).unwrap(), |y| y).unwrap();
        let a = sys.matrix();
        assert_abs_diff_eq!(a[(0, 1)], 1.0 / 3.0f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(a[(1, 2)], 2.0 / 15.0f64.sqrt(), epsilon = 1e-14);
        for i in 0..3 {
            assert_abs_diff_eq!(a[(i, i)], 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(a[(0, 2)], 0.0, epsilon = 1e-14);
        // exact symmetry by construction
        assert_eq!(a[(1, 0)], a[(0, 1)]);
        assert_eq!(a[(2, 1)], a[(1, 2)]);
    }

    #[test]
    fn linear_speed_spectrum_equals_gauss_nodes() {
        // Golub-Welsch: the truncated Jacobi matrix spectrum is the set of
        // roots of P̃_{N+1}; the Newton-based quadrature rule is the
        // independent root-finder here.
        for n in [5usize, 8, 12] {
            let sys = GpcSystem::new(GpcBasis::uniform(n).unwrap(), |y| y).unwrap();
            let mut roots = GaussRule::legendre(n + 1).unwrap().nodes;
            roots.sort_by(|a, b| b.total_cmp(a));
            for (l, r) in sys.eigenvalues().iter().zip(&roots) {
                assert_abs_diff_eq!(l, r, epsilon = 1e-10);
            }
        }
        let sys5 = GpcSystem::new(GpcBasis::uniform(5).unwrap(), |y| y).unwrap();
        assert_abs_diff_eq!(sys5.lambda_max(), 0.932469514203152, epsilon = 1e-10);
    }

    #[test]
    fn spectrum_split_counts() {
        // even size: symmetric nonzero spectrum
        let sys5 = GpcSystem::new(GpcBasis::uniform(5).unwrap(), |y| y).unwrap();
        assert_eq!(sys5.n_plus(), 3);
        assert_eq!(sys5.n_minus(), 3);
        assert!(sys5.split().zero.is_empty());
        // odd size: exactly one zero eigenvalue
        let sys8 = GpcSystem::new(GpcBasis::uniform(8).unwrap(), |y| y).unwrap();
        assert_eq!(sys8.split().zero.len(), 1);
        assert_eq!(sys8.n_plus(), 4);
        assert_eq!(sys8.n_minus(), 4);
        assert!(sys8.n_plus() + sys8.n_minus() <= 9);
    }

    #[test]
    fn split_spectrum_example() {
        let s = split_spectrum(&[1.0, 0.0, -1.0]);
        assert_eq!(s.plus, vec![1.0, 0.0, 0.0]);
        assert_eq!(s.minus, vec![0.0, 0.0, -1.0]);
        assert_eq!(s.zero, vec![1]);
        // plus + minus + zeroed entries reproduce the input exactly
        for (i, &l) in [1.0, 0.0, -1.0].iter().enumerate() {
            if !s.zero.contains(&i) {
                assert_eq!(s.plus[i] + s.minus[i], l);
            } else {
                assert!(l.abs() <= s.tol.max(0.0));
            }
        }
    }

    #[test]
    fn spectrum_antisymmetric_for_odd_speed() {
        let sys = GpcSystem::new(GpcBasis::uniform(7).unwrap(), |y| y * y * y).unwrap();
        let l = sys.eigenvalues();
        let n = l.len();
        for i in 0..n {
            assert_abs_diff_eq!(l[i], -l[n - 1 - i], epsilon = 1e-12);
        }
    }

    #[test]
    fn eigendecomposition_reconstructs_matrix() {
        let sys = GpcSystem::new(GpcBasis::uniform(9).unwrap(), |y| 0.5 + y * y).unwrap();
        let s = sys.eigenvectors();
        let st = s.transpose();
        let stas = st.matmul(sys.matrix()).matmul(s);
        let scale = sys.matrix().max_norm();
        for i in 0..10 {
            for j in 0..10 {
                let expect = if i == j { sys.eigenvalues()[i] } else { 0.0 };
                assert_abs_diff_eq!(stas[(i, j)], expect, epsilon = 1e-12 * scale.max(1.0));
            }
        }
        let sts = st.matmul(s);
        for i in 0..10 {
            for j in 0..10 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(sts[(i, j)], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn insufficient_quadrature_is_a_config_error() {
        // 2 nodes cannot integrate y^4 * P̃_3 * P̃_3
        let basis = GpcBasis::uniform_with_quad(3, 2).unwrap();
        let err = GpcSystem::new(basis, |y| y.powi(4)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
