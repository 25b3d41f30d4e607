//! Legendre polynomials and Gauss–Legendre quadrature.
//!
//! Nodes are the roots of the standard Legendre polynomial `P_q`, found by
//! Newton iteration from the Chebyshev-like initial guesses. The rule is
//! assembled one half at a time and mirrored, so node symmetry about zero is
//! exact and an odd rule contains the node 0 exactly.

use crate::error::{Error, Result};

/// Standard (unnormalized) Legendre polynomial `P_n(x)`.
pub fn legendre(n: usize, x: f64) -> f64 {
    legendre_with_deriv(n, x).0
}

/// `P_n(x)` together with its derivative `P_n'(x)`.
///
/// Uses the three-term recurrence `(m+1) P_{m+1} = (2m+1) x P_m - m P_{m-1}`
/// and the derivative identity `(1-x^2) P_n' = n (P_{n-1} - x P_n)`.
pub fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for m in 1..n {
        let m_f = m as f64;
        let p_next = ((2.0 * m_f + 1.0) * x * p - m_f * p_prev) / (m_f + 1.0);
        p_prev = p;
        p = p_next;
    }
    let n_f = n as f64;
    let denom = 1.0 - x * x;
    let dp = if denom.abs() > 1e-10 {
        n_f * (p_prev - x * p) / denom
    } else {
        // endpoint limit: P_n'(±1) = ±^{n+1} n(n+1)/2
        let sign = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        sign * n_f * (n_f + 1.0) / 2.0
    };
    (p, dp)
}

/// A quadrature rule on `[-1, 1]` with weights summing to 2 (plain `dx`).
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss–Legendre rule with `q` nodes, exact for polynomials of degree
    /// `2q - 1`.
    pub fn legendre(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument(
                "quadrature rule needs at least one node".into(),
            ));
        }
        let mut nodes = vec![0.0; q];
        let mut weights = vec![0.0; q];
        // Compute the positive half and mirror it; the middle node of an odd
        // rule is exactly zero.
        for i in 0..q.div_ceil(2) {
            // guess for the i-th largest root
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
            if 2 * i + 1 == q {
                x = 0.0;
            } else {
                for _ in 0..100 {
                    let (p, dp) = legendre_with_deriv(q, x);
                    let dx = p / dp;
                    x -= dx;
                    if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                        break;
                    }
                }
            }
            let (_, dp) = legendre_with_deriv(q, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[q - 1 - i] = x;
            nodes[i] = -x;
            weights[q - 1 - i] = w;
            weights[i] = w;
        }
        Ok(Self { nodes, weights })
    }

    /// Integrate `f` over `[lo, hi]` with this rule mapped affinely.
    pub fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}
