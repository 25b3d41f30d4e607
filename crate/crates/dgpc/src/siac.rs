//! Smoothness-increasing accuracy-conserving (SIAC) convolution filter.
//!
//! The symmetric kernel is a linear combination of `r + 1` centered cardinal
//! B-splines of order `ℓ` (degree `ℓ - 1`), shifted to the integer offsets
//! `x_γ = -⌈r/2⌉ + γ`:
//!
//! `K(u) = Σ_γ c_γ B_ℓ(u - x_γ)`
//!
//! The weights `c_γ` are fixed by the moment conditions
//! `∫ K(u) u^j du = δ_{j0}` for `j = 0..r`, which make the scaled kernel
//! reproduce polynomials through degree `r` exactly. The moment system is
//! assembled and solved in exact rational arithmetic, so the weights carry
//! no elimination roundoff (for `r = 2, ℓ = 2` they are the rationals
//! `-1/12, 7/6, -1/12`).
//!
//! Filtering a DG field evaluates `(1/H) ∫ K((x-y)/H) field(y) dy` with the
//! integral split at every kernel breakpoint and mesh edge, so each piece is
//! a polynomial integrated exactly by Gauss quadrature.

use crate::dg::{DgField, DgMultiField, Representation};
use crate::error::{Error, Result};
use crate::quad::GaussRule;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Centered cardinal B-spline of order `ℓ` (degree `ℓ - 1`), supported on
/// `[-ℓ/2, ℓ/2)` with unit mass: `B_1` is the indicator of `[-1/2, 1/2)`,
/// `B_{ℓ+1} = B_ℓ ∗ B_1`. Evaluated by the Cox-de Boor recursion on the
/// knots `{-ℓ/2, ..., ℓ/2}`.
///
/// Panics when `ℓ = 0`; kernel constructors reject that case with an error.
pub fn bspline(ell: usize, x: f64) -> f64 {
    assert!(ell >= 1, "B-spline order must be at least 1");
    let half = ell as f64 / 2.0;
    if x < -half || x >= half {
        return 0.0;
    }
    let knot = |i: usize| i as f64 - half;
    let mut vals: Vec<f64> = (0..ell)
        .map(|i| if x >= knot(i) && x < knot(i + 1) { 1.0 } else { 0.0 })
        .collect();
    for m in 2..=ell {
        for i in 0..=(ell - m) {
            let left = (x - knot(i)) / (knot(i + m - 1) - knot(i));
            let right = (knot(i + m) - x) / (knot(i + m) - knot(i + 1));
            vals[i] = left * vals[i] + right * vals[i + 1];
        }
    }
    vals[0]
}

fn big_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Raw moments `∫ B_ℓ(u) u^i du` for `i = 0..=deg`, exact.
///
/// `B_1` has `m_i = ((1/2)^{i+1} - (-1/2)^{i+1}) / (i+1)`; each further
/// convolution order combines binomially:
/// `m_i(B_{s+1}) = Σ_t C(i,t) m_t(B_s) m_{i-t}(B_1)`.
fn bspline_moments(ell: usize, deg: usize) -> Vec<BigRational> {
    let m1: Vec<BigRational> = (0..=deg)
        .map(|i| {
            if i % 2 == 1 {
                BigRational::zero()
            } else {
                BigRational::new(BigInt::one(), (BigInt::one() << i) * BigInt::from(i + 1))
            }
        })
        .collect();
    let mut m = m1.clone();
    for _ in 1..ell {
        let mut next = vec![BigRational::zero(); deg + 1];
        for (i, slot) in next.iter_mut().enumerate() {
            for t in 0..=i {
                *slot += BigRational::from_integer(binomial(i, t)) * &m[t] * &m1[i - t];
            }
        }
        m = next;
    }
    m
}

/// Kernel weights `c_0..c_r` from the moment conditions, solved exactly in
/// rational arithmetic and converted to `f64` at the end.
#[allow(clippy::needless_range_loop)] // elimination touches two rows at once
pub fn kernel_coefficients(r: usize, ell: usize) -> Result<Vec<f64>> {
    if ell == 0 {
        return Err(Error::InvalidArgument("B-spline order must be at least 1".into()));
    }
    let n = r + 1;
    let moments = bspline_moments(ell, r);
    let offsets: Vec<i64> = (0..n).map(|g| g as i64 - r.div_ceil(2) as i64).collect();

    // M[j][γ] = ∫ B_ℓ(u - x_γ) u^j du = Σ_i C(j,i) x_γ^{j-i} m_i
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for (j, row) in m.iter_mut().enumerate() {
        for (g, &s) in offsets.iter().enumerate() {
            let mut acc = BigRational::zero();
            for (i, moment) in moments.iter().enumerate().take(j + 1) {
                let shift_pow = big_int(s).pow((j - i) as i32);
                acc += BigRational::from_integer(binomial(j, i)) * shift_pow * moment;
            }
            row[g] = acc;
        }
    }
    let mut rhs = vec![BigRational::zero(); n];
    rhs[0] = BigRational::one();

    // exact Gaussian elimination with partial pivoting
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()))
            .expect("non-empty range");
        if m[pivot][col].is_zero() {
            return Err(Error::Internal(format!(
                "singular moment system for r={r}, ell={ell}"
            )));
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &m[col][col];
            for j in col..n {
                let sub = &factor * &m[col][j];
                m[row][j] -= sub;
            }
            let sub = &factor * &rhs[col];
            rhs[row] -= sub;
        }
    }
    let mut c = vec![BigRational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for j in (row + 1)..n {
            acc -= &m[row][j] * &c[j];
        }
        c[row] = acc / &m[row][row];
    }
    Ok(c.iter()
        .map(|v| v.to_f64().expect("rational in f64 range"))
        .collect())
}

/// A built symmetric SIAC kernel at scaling `H`.
#[derive(Debug, Clone)]
pub struct SiacKernel {
    r: usize,
    ell: usize,
    scale: f64,
    offsets: Vec<f64>,
    coeffs: Vec<f64>,
    /// knot union in scaled coordinates, sorted ascending
    breakpoints: Vec<f64>,
}

impl SiacKernel {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn order(&self) -> usize {
        self.ell
    }

    /// Kernel scaling `H` in physical length units.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Half-width of the support in scaled coordinates,
    /// `max(⌈r/2⌉, r - ⌈r/2⌉) + ℓ/2`; equals `(r + ℓ)/2` for even `r`.
    pub fn support_radius_scaled(&self) -> f64 {
        let lo = *self.breakpoints.first().expect("kernel has breakpoints");
        let hi = *self.breakpoints.last().expect("kernel has breakpoints");
        lo.abs().max(hi.abs())
    }

    /// Half-width of the support in physical units.
    pub fn support_radius(&self) -> f64 {
        self.support_radius_scaled() * self.scale
    }

    /// Kernel value in scaled coordinates (unit mass, unscaled argument).
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.offsets)
            .map(|(c, x0)| c * bspline(self.ell, u - x0))
            .sum()
    }

    /// `∫ K(u) u^j du` by exact piecewise Gauss quadrature between
    /// breakpoints; equals `δ_{j0}` for `j ≤ r` up to roundoff.
    pub fn moment(&self, j: usize) -> f64 {
        let npts = (self.ell + j) / 2 + 2;
        let rule = GaussRule::legendre(npts).expect("positive node count");
        let mut acc = 0.0;
        for w in self.breakpoints.windows(2) {
            acc += rule.integrate(w[0], w[1], |u| self.eval(u) * u.powi(j as i32));
        }
        acc
    }
}

/// Build the kernel for `r` extra moments, B-spline order `ℓ` and physical
/// scaling `h` (usually the mesh width).
pub fn build_kernel(r: usize, ell: usize, h: f64) -> Result<SiacKernel> {
    if ell == 0 {
        return Err(Error::InvalidArgument("B-spline order must be at least 1".into()));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("kernel scaling must be positive, got {h}")));
    }
    let coeffs = kernel_coefficients(r, ell)?;
    let shift = r.div_ceil(2) as i64;
    let offsets: Vec<f64> = (0..=r as i64).map(|g| (g - shift) as f64).collect();

    // knot union in half-units for exact dedup
    let mut halves: Vec<i64> = Vec::new();
    for g in 0..=r as i64 {
        for i in 0..=ell as i64 {
            halves.push(2 * (g - shift) + 2 * i - ell as i64);
        }
    }
    halves.sort_unstable();
    halves.dedup();
    let breakpoints: Vec<f64> = halves.into_iter().map(|v| v as f64 / 2.0).collect();

    Ok(SiacKernel { r, ell, scale: h, offsets, coeffs, breakpoints })
}

fn check_support(field: &DgField, kernel: &SiacKernel) -> Result<()> {
    let width = 2.0 * kernel.support_radius();
    let len = field.mesh().length();
    if width > len * (1.0 + 1e-12) {
        let min_nx = (2.0 * kernel.support_radius_scaled()).ceil() as usize;
        return Err(Error::Config(format!(
            "kernel support {width:.6} exceeds the domain length {len:.6}; at H = h this \
             configuration needs Nx >= {min_nx}"
        )));
    }
    Ok(())
}

/// Convolve the kernel against a periodic DG field at one point:
/// `(1/H) ∫ K((x-y)/H) field(y) dy`.
pub fn filter_point(field: &DgField, kernel: &SiacKernel, x: f64) -> Result<f64> {
    check_support(field, kernel)?;
    let npts = (field.degree() + kernel.order()).div_ceil(2) + 1;
    let rule = GaussRule::legendre(npts).expect("positive node count");
    Ok(filter_point_with_rule(field, kernel, x, &rule))
}

/// Inner evaluation with a caller-supplied Gauss rule per subinterval.
pub(crate) fn filter_point_with_rule(
    field: &DgField,
    kernel: &SiacKernel,
    x: f64,
    rule: &GaussRule,
) -> f64 {
    let h_scale = kernel.scale();
    let mesh = field.mesh();
    let lo = *kernel.breakpoints().first().expect("kernel has breakpoints");
    let hi = *kernel.breakpoints().last().expect("kernel has breakpoints");

    // integration variable u = (x - y)/H; split at kernel breakpoints and at
    // every mesh edge crossed by the window y ∈ [x - H·hi, x - H·lo]
    let mut cuts: Vec<f64> = kernel.breakpoints().to_vec();
    let m_lo = ((x - h_scale * hi - mesh.a()) / mesh.h()).ceil() as i64;
    let m_hi = ((x - h_scale * lo - mesh.a()) / mesh.h()).floor() as i64;
    for m in m_lo..=m_hi {
        let u = (x - (mesh.a() + m as f64 * mesh.h())) / h_scale;
        if u > lo && u < hi {
            cuts.push(u);
        }
    }
    cuts.sort_by(f64::total_cmp);

    let tiny = 1e-12 * (hi - lo);
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let (u0, u1) = (w[0], w[1]);
        if u1 - u0 <= tiny {
            continue;
        }
        let mid = 0.5 * (u0 + u1);
        let half = 0.5 * (u1 - u0);
        let mut part = 0.0;
        for (g, &node) in rule.nodes.iter().enumerate() {
            let u = mid + half * node;
            part += rule.weights[g] * kernel.eval(u) * field.eval(x - h_scale * u);
        }
        acc += part * half;
    }
    acc
}

/// Filter every mode of a physical-representation multifield at the given
/// sample points; rows are modes, columns are points. Point evaluations run
/// on the worker pool when the `parallel` feature is enabled.
pub fn filter_multifield(
    v: &DgMultiField,
    kernel: &SiacKernel,
    points: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let rule = multifield_rule(v, kernel)?;
    Ok(v.modes()
        .iter()
        .map(|field| filter_field_values(field, kernel, points, &rule))
        .collect())
}

/// Single-threaded variant of [`filter_multifield`]; the reference path for
/// the throughput benchmarks.
pub fn filter_multifield_seq(
    v: &DgMultiField,
    kernel: &SiacKernel,
    points: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let rule = multifield_rule(v, kernel)?;
    Ok(v.modes()
        .iter()
        .map(|field| {
            points.iter().map(|&x| filter_point_with_rule(field, kernel, x, &rule)).collect()
        })
        .collect())
}

fn multifield_rule(v: &DgMultiField, kernel: &SiacKernel) -> Result<GaussRule> {
    if v.representation() != Representation::Physical {
        return Err(Error::State(
            "filtering applies to physical-representation coefficient fields".into(),
        ));
    }
    check_support(v.mode(0), kernel)?;
    let npts = (v.degree() + kernel.order()).div_ceil(2) + 1;
    Ok(GaussRule::legendre(npts).expect("positive node count"))
}

/// Filter one field at many points (support already validated).
pub(crate) fn filter_field_values(
    field: &DgField,
    kernel: &SiacKernel,
    points: &[f64],
    rule: &GaussRule,
) -> Vec<f64> {
    map_points(points, |&x| filter_point_with_rule(field, kernel, x, rule))
}

#[cfg(feature = "parallel")]
fn map_points<F>(points: &[f64], f: F) -> Vec<f64>
where
    F: Fn(&f64) -> f64 + Sync + Send,
{
    use rayon::prelude::*;
    // each point costs microseconds; batch them so task overhead stays small
    points.par_iter().with_min_len(64).map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<F>(points: &[f64], f: F) -> Vec<f64>
where
    F: Fn(&f64) -> f64 + Sync + Send,
{
    points.iter().map(f).collect()
}
