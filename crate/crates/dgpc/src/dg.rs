//! Modal discontinuous Galerkin discretization on a periodic 1D mesh.
//!
//! Each field stores, per cell, modal coefficients with respect to the
//! scaled Legendre basis `φ_j(ξ) = sqrt((2j+1)/2) P_j(ξ)` on the reference
//! interval `ξ ∈ [-1, 1]`, orthonormal under plain `dξ`. With that choice
//! the cell mass matrix is `(h/2) I` and the semidiscrete upwind scheme for
//! `q_t = λ q_x` reads, per cell `i` and mode `m`,
//!
//! `(h/2) ċ_im = λ [ q̃ φ_m ]_{x_{i-1/2}}^{x_{i+1/2}} - λ ∫_{I_i} q φ_m' dx`
//!
//! where `q̃` is the upwind trace: the value from the right of the interface
//! when `λ > 0` (characteristics travel leftward) and from the left when
//! `λ < 0`. Modes with `λ = 0` are steady and skipped.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::quad::{legendre_with_deriv, GaussRule};

/// Uniform periodic partition of `[a, b]` into `nx` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    a: f64,
    b: f64,
    nx: usize,
    h: f64,
}

impl Mesh1D {
    pub fn new(a: f64, b: f64, nx: usize) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidArgument(format!(
                "domain endpoints must satisfy b > a, got ({a}, {b})"
            )));
        }
        if nx == 0 {
            return Err(Error::InvalidArgument("cell count must be at least 1".into()));
        }
        Ok(Self { a, b, nx, h: (b - a) / nx as f64 })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn num_cells(&self) -> usize {
        self.nx
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Left edge `x_{i-1/2}` of cell `i`.
    pub fn left_edge(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h
    }

    pub fn center(&self, i: usize) -> f64 {
        self.a + (i as f64 + 0.5) * self.h
    }

    /// Map `x` (wrapped periodically) to its cell and reference coordinate.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let span = self.length();
        let y = (x - self.a).rem_euclid(span);
        let mut i = (y / self.h) as usize;
        if i >= self.nx {
            i = self.nx - 1;
        }
        let xi = 2.0 * (y - (i as f64 + 0.5) * self.h) / self.h;
        (i, xi.clamp(-1.0, 1.0))
    }
}

/// `φ_0..φ_k` at `ξ` in one recurrence pass.
pub(crate) fn ref_basis_all(k: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    let mut p_prev = 1.0;
    let mut p = xi;
    out.push(std::f64::consts::FRAC_1_SQRT_2);
    if k >= 1 {
        out.push((3.0f64 / 2.0).sqrt() * xi);
    }
    for m in 1..k {
        let m_f = m as f64;
        let p_next = ((2.0 * m_f + 1.0) * xi * p - m_f * p_prev) / (m_f + 1.0);
        p_prev = p;
        p = p_next;
        out.push(((2 * m + 3) as f64 / 2.0).sqrt() * p);
    }
    out
}

/// A degree-`k` modal field on a periodic mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DgField {
    mesh: Mesh1D,
    k: usize,
    /// cell-major: `coeffs[i * (k+1) + j]`
    coeffs: Vec<f64>,
}

impl DgField {
    pub fn zeros(mesh: Mesh1D, k: usize) -> Self {
        Self { mesh, k, coeffs: vec![0.0; mesh.num_cells() * (k + 1)] }
    }

    /// L² projection of `f` onto the broken polynomial space, using a
    /// `k + 6` point Gauss rule per cell.
    pub fn project<F: Fn(f64) -> f64>(mesh: Mesh1D, k: usize, f: F) -> Self {
        let rule = GaussRule::legendre(k + 6).expect("positive node count");
        let mut field = Self::zeros(mesh, k);
        let np = k + 1;
        for i in 0..mesh.num_cells() {
            let xc = mesh.center(i);
            for (g, &xi) in rule.nodes.iter().enumerate() {
                let w = rule.weights[g];
                let fx = f(xc + 0.5 * mesh.h() * xi);
                let phi = ref_basis_all(k, xi);
                for (c, &p) in field.coeffs[i * np..(i + 1) * np].iter_mut().zip(&phi) {
                    *c += w * fx * p;
                }
            }
        }
        field
    }

    pub fn mesh(&self) -> Mesh1D {
        self.mesh
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, cell: usize, mode: usize) -> f64 {
        self.coeffs[cell * (self.k + 1) + mode]
    }

    /// Value of the cell polynomial at reference coordinate `ξ`.
    pub fn eval_in_cell(&self, cell: usize, xi: f64) -> f64 {
        let np = self.k + 1;
        let c = &self.coeffs[cell * np..(cell + 1) * np];
        let mut v = c[0] * std::f64::consts::FRAC_1_SQRT_2;
        if self.k >= 1 {
            v += c[1] * (3.0f64 / 2.0).sqrt() * xi;
        }
        let mut p_prev = 1.0;
        let mut p = xi;
        for m in 1..self.k {
            let m_f = m as f64;
            let p_next = ((2.0 * m_f + 1.0) * xi * p - m_f * p_prev) / (m_f + 1.0);
            p_prev = p;
            p = p_next;
            v += c[m + 1] * ((2 * m + 3) as f64 / 2.0).sqrt() * p;
        }
        v
    }

    /// Evaluate at a physical point, wrapping periodically.
    pub fn eval(&self, x: f64) -> f64 {
        let (i, xi) = self.mesh.locate(x);
        self.eval_in_cell(i, xi)
    }

    /// One-sided trace at the left edge of cell `i` (`ξ = -1`).
    pub fn trace_left(&self, cell: usize) -> f64 {
        let np = self.k + 1;
        let mut v = 0.0;
        for j in 0..np {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            v += self.coeffs[cell * np + j] * sign * ((2 * j + 1) as f64 / 2.0).sqrt();
        }
        v
    }

    /// One-sided trace at the right edge of cell `i` (`ξ = +1`).
    pub fn trace_right(&self, cell: usize) -> f64 {
        let np = self.k + 1;
        let mut v = 0.0;
        for j in 0..np {
            v += self.coeffs[cell * np + j] * ((2 * j + 1) as f64 / 2.0).sqrt();
        }
        v
    }

    /// `∫ field dx` over the whole domain (exact from mode 0, since
    /// `∫_{I_i} field dx = (h/2) c_{i0} ∫ φ_0 dξ = h c_{i0} / √2`).
    pub fn integral(&self) -> f64 {
        let np = self.k + 1;
        let factor = self.mesh.h() * std::f64::consts::FRAC_1_SQRT_2;
        (0..self.mesh.num_cells()).map(|i| factor * self.coeffs[i * np]).sum()
    }

    /// Broken L² norm of the field.
    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|c| c * c).sum::<f64>() * self.mesh.h() / 2.0).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

/// Which variables a multifield currently stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Chaos-coefficient fields `v̂_n`.
    Physical,
    /// Decoupled characteristic fields `q̂_n = (Sᵀ v̂)_n`.
    Characteristic,
}

/// The `N + 1` coefficient fields of a chaos expansion on one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DgMultiField {
    fields: Vec<DgField>,
    repr: Representation,
}

impl DgMultiField {
    pub fn new(fields: Vec<DgField>, repr: Representation) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidArgument("multifield needs at least one mode".into()));
        }
        let mesh = fields[0].mesh();
        let k = fields[0].degree();
        if fields.iter().any(|f| f.mesh() != mesh || f.degree() != k) {
            return Err(Error::InvalidArgument(
                "all modes must share one mesh and one degree".into(),
            ));
        }
        Ok(Self { fields, repr })
    }

    /// Physical-representation initial state: mode 0 is the projection of
    /// `u0`, modes `1..=n` start at zero (deterministic initial data).
    pub fn from_deterministic_initial<F: Fn(f64) -> f64>(
        mesh: Mesh1D,
        k: usize,
        n_modes: usize,
        u0: F,
    ) -> Self {
        let mut fields = Vec::with_capacity(n_modes);
        fields.push(DgField::project(mesh, k, u0));
        for _ in 1..n_modes {
            fields.push(DgField::zeros(mesh, k));
        }
        Self { fields, repr: Representation::Physical }
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn num_modes(&self) -> usize {
        self.fields.len()
    }

    pub fn mode(&self, n: usize) -> &DgField {
        &self.fields[n]
    }

    pub fn mode_mut(&mut self, n: usize) -> &mut DgField {
        &mut self.fields[n]
    }

    pub fn modes(&self) -> &[DgField] {
        &self.fields
    }

    pub fn mesh(&self) -> Mesh1D {
        self.fields[0].mesh()
    }

    pub fn degree(&self) -> usize {
        self.fields[0].degree()
    }

    pub fn is_finite(&self) -> bool {
        self.fields.iter().all(DgField::is_finite)
    }

    /// Apply `Sᵀ` mode-wise: `q̂_n = Σ_m s_{m,n} v̂_m`.
    pub fn to_characteristic(&self, s: &Mat) -> Result<Self> {
        if self.repr != Representation::Physical {
            return Err(Error::State(
                "to_characteristic expects a physical-representation multifield".into(),
            ));
        }
        Ok(self.transform(s, true))
    }

    /// Apply `S` mode-wise: `v̂_m = Σ_n s_{m,n} q̂_n`.
    pub fn from_characteristic(&self, s: &Mat) -> Result<Self> {
        if self.repr != Representation::Characteristic {
            return Err(Error::State(
                "from_characteristic expects a characteristic-representation multifield".into(),
            ));
        }
        Ok(self.transform(s, false))
    }

    fn transform(&self, s: &Mat, transpose: bool) -> Self {
        let n = self.fields.len();
        assert_eq!(s.rows(), n, "eigenvector matrix size must match mode count");
        let len = self.fields[0].coeffs().len();
        let mut out: Vec<DgField> = (0..n)
            .map(|_| DgField::zeros(self.mesh(), self.degree()))
            .collect();
        for (dst, out_field) in out.iter_mut().enumerate() {
            let coeffs = out_field.coeffs_mut();
            for src in 0..n {
                let w = if transpose { s[(src, dst)] } else { s[(dst, src)] };
                if w == 0.0 {
                    continue;
                }
                let src_coeffs = self.fields[src].coeffs();
                for idx in 0..len {
                    coeffs[idx] += w * src_coeffs[idx];
                }
            }
        }
        Self {
            fields: out,
            repr: if transpose { Representation::Characteristic } else { Representation::Physical },
        }
    }
}

/// Precomputed reference-element data for the upwind right-hand side.
#[derive(Debug, Clone)]
pub struct UpwindOperator {
    k: usize,
    lambda: Vec<f64>,
    /// `stiffness[m][j] = ∫ φ_j φ_m' dξ`
    stiffness: Vec<Vec<f64>>,
    /// `φ_j(-1)` and `φ_j(+1)`
    edge_left: Vec<f64>,
    edge_right: Vec<f64>,
    zero_tol: f64,
}

impl UpwindOperator {
    pub fn new(k: usize, lambda: &[f64]) -> Self {
        let np = k + 1;
        // integrand degree ≤ 2k - 1, exact with k+1 nodes
        let rule = GaussRule::legendre(np).expect("positive node count");
        let mut stiffness = vec![vec![0.0; np]; np];
        for (g, &xi) in rule.nodes.iter().enumerate() {
            let w = rule.weights[g];
            let phi = ref_basis_all(k, xi);
            for (m, row) in stiffness.iter_mut().enumerate() {
                let dphi_m =
                    ((2 * m + 1) as f64 / 2.0).sqrt() * legendre_with_deriv(m, xi).1;
                for (entry, &p) in row.iter_mut().zip(&phi) {
                    *entry += w * p * dphi_m;
                }
            }
        }
        let edge_left: Vec<f64> = (0..np)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * ((2 * j + 1) as f64 / 2.0).sqrt()
            })
            .collect();
        let edge_right: Vec<f64> = (0..np).map(|j| ((2 * j + 1) as f64 / 2.0).sqrt()).collect();
        // column 0 in the exact edge-difference form
        // ∫ φ_0 φ_m' dξ = (φ_m(1) - φ_m(-1)) φ_0, so constants are steady to
        // the last bit of the flux/volume cancellation
        for m in 0..np {
            stiffness[m][0] =
                (edge_right[m] - edge_left[m]) * std::f64::consts::FRAC_1_SQRT_2;
        }
        let max_abs = lambda.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Self {
            k,
            lambda: lambda.to_vec(),
            stiffness,
            edge_left,
            edge_right,
            zero_tol: 1e-12 * max_abs,
        }
    }

    /// Semidiscrete time derivative of a characteristic multifield.
    pub fn apply(&self, q: &DgMultiField) -> Result<DgMultiField> {
        if q.representation() != Representation::Characteristic {
            return Err(Error::State(
                "upwind operator expects a characteristic-representation multifield".into(),
            ));
        }
        assert_eq!(q.num_modes(), self.lambda.len());
        assert_eq!(q.degree(), self.k);
        let mesh = q.mesh();
        let fields = map_modes(q.modes(), |n, field| self.apply_mode(self.lambda[n], field, mesh));
        Ok(DgMultiField { fields, repr: Representation::Characteristic })
    }

    fn apply_mode(&self, lambda: f64, q: &DgField, mesh: Mesh1D) -> DgField {
        let mut out = DgField::zeros(mesh, self.k);
        // steady mode: no flux evaluation at all
        if lambda.abs() <= self.zero_tol {
            return out;
        }
        let nx = mesh.num_cells();
        let np = self.k + 1;
        let scale = 2.0 / mesh.h() * lambda;

        // upwind interface values; flux[i] is the value at x_{i+1/2}
        let flux: Vec<f64> = (0..nx)
            .map(|i| {
                if lambda > 0.0 {
                    q.trace_left((i + 1) % nx)
                } else {
                    q.trace_right(i)
                }
            })
            .collect();

        let coeffs = out.coeffs_mut();
        for i in 0..nx {
            let f_right = flux[i];
            let f_left = flux[(i + nx - 1) % nx];
            for m in 0..np {
                let mut vol = 0.0;
                for j in 0..np {
                    vol += self.stiffness[m][j] * q.coeff(i, j);
                }
                coeffs[i * np + m] =
                    scale * (f_right * self.edge_right[m] - f_left * self.edge_left[m] - vol);
            }
        }
        out
    }
}

#[cfg(feature = "parallel")]
fn map_modes<F>(modes: &[DgField], f: F) -> Vec<DgField>
where
    F: Fn(usize, &DgField) -> DgField + Sync,
{
    use rayon::prelude::*;
    modes.par_iter().enumerate().map(|(n, field)| f(n, field)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_modes<F>(modes: &[DgField], f: F) -> Vec<DgField>
where
    F: Fn(usize, &DgField) -> DgField + Sync,
{
    modes.iter().enumerate().map(|(n, field)| f(n, field)).collect()
}

/// One-shot upwind right-hand side (see [`UpwindOperator`]).
pub fn rhs_upwind(q: &DgMultiField, lambda: &[f64]) -> Result<DgMultiField> {
    UpwindOperator::new(q.degree(), lambda).apply(q)
}

impl crate::time::OdeState for DgMultiField {
    fn linear_comb(terms: &[(f64, &Self)]) -> Self {
        let first = terms[0].1;
        debug_assert!(terms.iter().all(|(_, t)| t.repr == first.repr));
        let mut fields: Vec<DgField> = first
            .fields
            .iter()
            .map(|f| DgField::zeros(f.mesh(), f.degree()))
            .collect();
        for (n, out) in fields.iter_mut().enumerate() {
            let coeffs = out.coeffs_mut();
            for (w, t) in terms {
                let src = t.fields[n].coeffs();
                for idx in 0..coeffs.len() {
                    coeffs[idx] += w * src[idx];
                }
            }
        }
        Self { fields, repr: first.repr }
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}
