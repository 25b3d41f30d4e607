//! Mean/variance reconstruction, exact-solution oracles and error measures.
//!
//! For the experiment `u_t = y u_x`, `u(x,0) = cos(x)`, `y ~ U(-1,1)` the
//! exact solution is `cos(x + y t)` with
//!
//! `μ(x,t) = cos(x) sin(t)/t`
//! `σ²(x,t) = 1/2 + cos(2x) sin(2t)/(4t) - cos²(x) sin²(t)/t²`
//!
//! (removable singularities at `t → 0` handled by series). From a chaos
//! multifield the mean is mode 0 and the variance is the pointwise sum of
//! squares of modes `1..=N`; the filtered variance squares the *filtered*
//! mode values, never the other way around.

use crate::dg::{DgMultiField, Mesh1D, Representation};
use crate::error::{Error, Result};
use crate::gpc::{gauss_legendre_rule, legendre_orthonormal};
use crate::quad::GaussRule;
use crate::siac::{filter_field_values, SiacKernel};

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-6 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// Closed-form solution statistics at a fixed time.
#[derive(Debug, Clone, Copy)]
pub struct ExactOracle {
    t: f64,
}

impl ExactOracle {
    pub fn new(t: f64) -> Self {
        Self { t }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// `u(x, t, y) = cos(x + y t)`
    pub fn solution(&self, x: f64, y: f64) -> f64 {
        (x + y * self.t).cos()
    }

    /// `μ(x, t) = cos(x) sin(t)/t`
    pub fn mean(&self, x: f64) -> f64 {
        x.cos() * sinc(self.t)
    }

    /// `σ²(x, t) = 1/2 + cos(2x) sin(2t)/(4t) - cos²(x) sin²(t)/t²`
    pub fn variance(&self, x: f64) -> f64 {
        let c = x.cos();
        0.5 + (2.0 * x).cos() * sinc(2.0 * self.t) / 2.0 - c * c * sinc(self.t) * sinc(self.t)
    }
}

/// Mean of a physical multifield: the mode-0 field.
pub fn mean_field(v: &DgMultiField) -> Result<&crate::dg::DgField> {
    if v.representation() != Representation::Physical {
        return Err(Error::State("mean is read from physical-representation modes".into()));
    }
    Ok(v.mode(0))
}

/// Pointwise variance `Σ_{n≥1} v̂_n(x)²` of a physical multifield.
pub fn variance_at(v: &DgMultiField, x: f64) -> Result<f64> {
    if v.representation() != Representation::Physical {
        return Err(Error::State("variance is read from physical-representation modes".into()));
    }
    Ok((1..v.num_modes()).map(|n| v.mode(n).eval(x).powi(2)).sum())
}

/// One evaluation site of the error grid.
#[derive(Debug, Clone, Copy)]
pub struct GridPoint {
    pub cell: usize,
    pub xi: f64,
    pub x: f64,
    /// Gauss weight on the reference interval; zero marks sup-norm-only
    /// sites (the one-sided cell edge traces).
    pub w: f64,
}

/// Sample sites for the error norms: per cell, a Gauss rule plus the two
/// one-sided edge traces (weightless, sup-norm only).
#[derive(Debug, Clone)]
pub struct ErrorGrid {
    mesh: Mesh1D,
    points: Vec<GridPoint>,
}

impl ErrorGrid {
    /// Gauss-based grid with `q_err` quadrature points per cell.
    pub fn new(mesh: Mesh1D, q_err: usize) -> Self {
        let rule = GaussRule::legendre(q_err).expect("positive node count");
        let mut points = Vec::with_capacity(mesh.num_cells() * (q_err + 2));
        for cell in 0..mesh.num_cells() {
            let xc = mesh.center(cell);
            points.push(GridPoint { cell, xi: -1.0, x: mesh.left_edge(cell), w: 0.0 });
            for (g, &xi) in rule.nodes.iter().enumerate() {
                points.push(GridPoint {
                    cell,
                    xi,
                    x: xc + 0.5 * mesh.h() * xi,
                    w: rule.weights[g],
                });
            }
            points.push(GridPoint { cell, xi: 1.0, x: mesh.left_edge(cell + 1), w: 0.0 });
        }
        Self { mesh, points }
    }

    /// Plot-style grid: `per_cell` uniformly spaced interior points per cell,
    /// no quadrature weights.
    pub fn uniform(mesh: Mesh1D, per_cell: usize) -> Self {
        let mut points = Vec::with_capacity(mesh.num_cells() * per_cell);
        for cell in 0..mesh.num_cells() {
            for j in 0..per_cell {
                let frac = (j as f64 + 0.5) / per_cell as f64;
                points.push(GridPoint {
                    cell,
                    xi: 2.0 * frac - 1.0,
                    x: mesh.left_edge(cell) + frac * mesh.h(),
                    w: 0.0,
                });
            }
        }
        Self { mesh, points }
    }

    pub fn mesh(&self) -> Mesh1D {
        self.mesh
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }
}

/// All chaos-mode values tabulated on an error grid, either directly from
/// the broken polynomials or through the SIAC filter.
#[derive(Debug, Clone)]
pub struct ModeValues {
    /// `values[mode][point]`
    values: Vec<Vec<f64>>,
}

impl ModeValues {
    /// Evaluate every mode of `v` at the grid sites; edge sites use the
    /// one-sided trace from inside their own cell.
    pub fn sample_direct(v: &DgMultiField, grid: &ErrorGrid) -> Result<Self> {
        if v.representation() != Representation::Physical {
            return Err(Error::State("error measures read physical-representation modes".into()));
        }
        let values = v
            .modes()
            .iter()
            .map(|f| grid.points().iter().map(|p| f.eval_in_cell(p.cell, p.xi)).collect())
            .collect();
        Ok(Self { values })
    }

    /// Filter every mode of `v` at the grid sites (filter first; squares
    /// for the variance come later).
    pub fn sample_filtered(
        v: &DgMultiField,
        kernel: &SiacKernel,
        grid: &ErrorGrid,
    ) -> Result<Self> {
        if v.representation() != Representation::Physical {
            return Err(Error::State("filtering applies to physical-representation modes".into()));
        }
        // probe one point so support violations surface as errors
        crate::siac::filter_point(v.mode(0), kernel, grid.points()[0].x)?;
        let npts = (v.degree() + kernel.order()).div_ceil(2) + 1;
        let rule = GaussRule::legendre(npts).expect("positive node count");
        let xs = grid.xs();
        let values = v
            .modes()
            .iter()
            .map(|f| filter_field_values(f, kernel, &xs, &rule))
            .collect();
        Ok(Self { values })
    }

    pub fn num_modes(&self) -> usize {
        self.values.len()
    }

    pub fn mode(&self, n: usize) -> &[f64] {
        &self.values[n]
    }

    /// Mean values: mode 0.
    pub fn mean(&self) -> &[f64] {
        &self.values[0]
    }

    /// Pointwise variance `Σ_{n≥1} (mode_n)²`.
    pub fn variance(&self) -> Vec<f64> {
        let len = self.values[0].len();
        let mut out = vec![0.0; len];
        for mode in &self.values[1..] {
            for (o, v) in out.iter_mut().zip(mode) {
                *o += v * v;
            }
        }
        out
    }
}

/// Broken-L² norm of `approx - exact` over the weighted grid sites.
pub fn error_l2<F: Fn(f64) -> f64>(approx: &[f64], exact: F, grid: &ErrorGrid) -> f64 {
    let half_h = 0.5 * grid.mesh().h();
    let mut acc = 0.0;
    for (p, &a) in grid.points().iter().zip(approx) {
        if p.w > 0.0 {
            let d = a - exact(p.x);
            acc += p.w * half_h * d * d;
        }
    }
    acc.sqrt()
}

/// Sup-norm of `approx - exact` sampled over all grid sites, including the
/// one-sided edge traces.
pub fn error_linf<F: Fn(f64) -> f64>(approx: &[f64], exact: F, grid: &ErrorGrid) -> f64 {
    grid.points()
        .iter()
        .zip(approx)
        .map(|(p, &a)| (a - exact(p.x)).abs())
        .fold(0.0, f64::max)
}

/// Mean-square error `E[ ||u - v_h||²_{L²} ]` by an outer Gauss rule in the
/// random variable and the grid's inner rule in space.
pub fn mean_square_error(
    values: &ModeValues,
    oracle: &ExactOracle,
    grid: &ErrorGrid,
    y_nodes: usize,
) -> f64 {
    let (ys, wys) = gauss_legendre_rule(y_nodes).expect("positive node count");
    let n_modes = values.num_modes();
    let half_h = 0.5 * grid.mesh().h();
    let mut total = 0.0;
    for (q, &y) in ys.iter().enumerate() {
        let basis: Vec<f64> = (0..n_modes).map(|n| legendre_orthonormal(n, y)).collect();
        let mut spatial = 0.0;
        for (ip, p) in grid.points().iter().enumerate() {
            if p.w <= 0.0 {
                continue;
            }
            let mut vh = 0.0;
            for (n, b) in basis.iter().enumerate() {
                vh += values.mode(n)[ip] * b;
            }
            let d = oracle.solution(p.x, y) - vh;
            spatial += p.w * half_h * d * d;
        }
        total += wys[q] * spatial;
    }
    total
}

/// Default spatial quadrature density for error integrals.
pub fn default_err_points(k: usize) -> usize {
    k + 4
}

/// Default node count for the outer random-variable quadrature.
pub fn default_y_nodes(n: usize) -> usize {
    (n + 10).max(32)
}

/// `log₂` error ratios down a mesh-doubling column. Entry 0 is NaN
/// (undefined), as is any entry whose errors are not positive.
pub fn convergence_orders(errors: &[f64]) -> Vec<f64> {
    let mut orders = vec![f64::NAN; errors.len()];
    for i in 1..errors.len() {
        if errors[i - 1] > 0.0 && errors[i] > 0.0 {
            orders[i] = (errors[i - 1] / errors[i]).log2();
        }
    }
    orders
}

/// The five error measures of one case.
///
/// `mean_square` is the plain (unnormalized) `E[||u - v_h||²]`. The `_l2`
/// entries are reported in the domain-averaged convention
/// `sqrt(∫ e² dx / (b - a))`, which is how the reference error tables are
/// normalized; [`error_l2`] itself stays unnormalized.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct ErrorSet {
    pub mean_square: f64,
    pub mean_l2: f64,
    pub mean_linf: f64,
    pub var_l2: f64,
    pub var_linf: f64,
}

impl ErrorSet {
    pub fn all_finite(&self) -> bool {
        [self.mean_square, self.mean_l2, self.mean_linf, self.var_l2, self.var_linf]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
    }

    /// Compute all five measures from tabulated mode values.
    pub fn compute(
        values: &ModeValues,
        oracle: &ExactOracle,
        grid: &ErrorGrid,
        y_nodes: usize,
    ) -> Self {
        let variance = values.variance();
        let rms = 1.0 / grid.mesh().length().sqrt();
        Self {
            mean_square: mean_square_error(values, oracle, grid, y_nodes),
            mean_l2: rms * error_l2(values.mean(), |x| oracle.mean(x), grid),
            mean_linf: error_linf(values.mean(), |x| oracle.mean(x), grid),
            var_l2: rms * error_l2(&variance, |x| oracle.variance(x), grid),
            var_linf: error_linf(&variance, |x| oracle.variance(x), grid),
        }
    }
}
