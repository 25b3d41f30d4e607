//! Experiment harness: case configuration, the full solve pipeline,
//! refinement studies, kernel-parameter sweeps and table emission.
//!
//! A case runs the whole chain: chaos system assembly → initial projection →
//! characteristic transform → TVD-RK3 upwind DG integration → back transform
//! → (optional) SIAC filtering → the five error measures. Cases are
//! independent and run in a worker pool when the `parallel` feature is on;
//! results are merged in sorted case order so emitted files do not depend on
//! the thread count.

use crate::dg::{DgMultiField, Mesh1D};
use crate::error::{Error, Result};
use crate::gpc::{GpcBasis, GpcSystem};
use crate::siac::{build_kernel, SiacKernel};
use crate::stats::{
    convergence_orders, default_err_points, default_y_nodes, ErrorGrid, ErrorSet, ExactOracle,
    ModeValues,
};
use crate::time::{integrate, make_time_plan};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

fn default_t() -> f64 {
    1.0
}

fn default_cfl() -> f64 {
    0.1
}

fn default_domain() -> (f64, f64) {
    (0.0, 2.0 * std::f64::consts::PI)
}

/// SIAC filter parameters: `r` extra moments, B-spline order `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterParams {
    pub r: usize,
    pub ell: usize,
}

impl FilterParams {
    /// The accuracy-default pairing `r = 2k`, `ell = k + 1`.
    pub fn default_for_degree(k: usize) -> Self {
        Self { r: 2 * k, ell: k + 1 }
    }
}

/// Optional overrides for the built-in quadrature densities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadOverrides {
    /// Outer Gauss nodes in the random variable for the mean-square error.
    pub y_nodes: Option<usize>,
    /// Gauss points per cell for the error integrals.
    pub err_points: Option<usize>,
    /// Nodes for assembling the chaos system matrix.
    pub gpc_nodes: Option<usize>,
}

/// One fully specified experiment case. The pipeline is deterministic:
/// identical configs produce identical results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CaseConfig {
    /// Highest retained chaos degree `N`.
    pub n: usize,
    /// DG polynomial degree `k`.
    pub k: usize,
    /// Cell count.
    pub nx: usize,
    /// Final time `T`.
    pub t_final: f64,
    pub cfl: f64,
    pub domain: (f64, f64),
    pub filter: Option<FilterParams>,
    pub quad: QuadOverrides,
}

impl Default for CaseConfig {
    fn default() -> Self {
        Self {
            n: 5,
            k: 1,
            nx: 20,
            t_final: default_t(),
            cfl: default_cfl(),
            domain: default_domain(),
            filter: None,
            quad: QuadOverrides::default(),
        }
    }
}

impl CaseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 {
            return Err(Error::Config("nx must be positive".into()));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::Config(format!("t_final must be positive, got {}", self.t_final)));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::Config(format!("cfl must be positive, got {}", self.cfl)));
        }
        if !(self.domain.1 > self.domain.0) {
            return Err(Error::Config(format!(
                "domain must satisfy b > a, got ({}, {})",
                self.domain.0, self.domain.1
            )));
        }
        Ok(())
    }

    fn mesh(&self) -> Result<Mesh1D> {
        Mesh1D::new(self.domain.0, self.domain.1, self.nx)
    }

    fn kernel(&self) -> Result<Option<SiacKernel>> {
        match self.filter {
            None => Ok(None),
            Some(f) => {
                let mesh = self.mesh()?;
                let kernel = build_kernel(f.r, f.ell, mesh.h())?;
                if 2.0 * kernel.support_radius() > mesh.length() * (1.0 + 1e-12) {
                    let min_nx = (2.0 * kernel.support_radius_scaled()).ceil() as usize;
                    return Err(Error::Config(format!(
                        "filter (r={}, ell={}) does not fit Nx={}; need Nx >= {min_nx}",
                        f.r, f.ell, self.nx
                    )));
                }
                Ok(Some(kernel))
            }
        }
    }
}

/// Five error measures before and (when configured) after filtering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorReport {
    pub config: CaseConfig,
    pub lambda_max: f64,
    pub n_steps: usize,
    pub unfiltered: ErrorSet,
    pub filtered: Option<ErrorSet>,
}

/// Pointwise `|error|(x)` curves for plotting, 10 samples per cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveData {
    pub x: Vec<f64>,
    pub mean_unfiltered: Vec<f64>,
    pub mean_filtered: Option<Vec<f64>>,
    pub var_unfiltered: Vec<f64>,
    pub var_filtered: Option<Vec<f64>>,
}

/// Samples per cell in curve output.
pub const CURVE_POINTS_PER_CELL: usize = 10;

/// Run the full pipeline for one case.
pub fn run_case(config: &CaseConfig) -> Result<ErrorReport> {
    Ok(run_case_full(config, false)?.0)
}

/// Run one case, optionally tabulating pointwise error curves.
pub fn run_case_full(config: &CaseConfig, with_curves: bool) -> Result<(ErrorReport, Option<CurveData>)> {
    config.validate()?;
    let mesh = config.mesh()?;
    // fail fast on unusable filters, before paying for the solve
    let kernel = config.kernel()?;

    let basis = match config.quad.gpc_nodes {
        Some(q) => GpcBasis::uniform_with_quad(config.n, q)?,
        None => GpcBasis::uniform(config.n)?,
    };
    let system = GpcSystem::new(basis, |y| y)?;

    let v0 = DgMultiField::from_deterministic_initial(mesh, config.k, config.n + 1, f64::cos);
    let q0 = v0.to_characteristic(system.eigenvectors())?;

    let plan = make_time_plan(config.t_final, mesh.h(), system.lambda_max(), config.k, config.cfl)?;
    let op = crate::dg::UpwindOperator::new(config.k, system.eigenvalues());
    let q_final = integrate(q0, &plan, &|q: &DgMultiField| op.apply(q))?;
    let v_final = q_final.from_characteristic(system.eigenvectors())?;

    let q_err = config.quad.err_points.unwrap_or_else(|| default_err_points(config.k));
    let y_nodes = config.quad.y_nodes.unwrap_or_else(|| default_y_nodes(config.n));
    let grid = ErrorGrid::new(mesh, q_err);
    let oracle = ExactOracle::new(config.t_final);

    let direct = ModeValues::sample_direct(&v_final, &grid)?;
    let unfiltered = ErrorSet::compute(&direct, &oracle, &grid, y_nodes);

    let filtered = match &kernel {
        Some(k) => {
            let vals = ModeValues::sample_filtered(&v_final, k, &grid)?;
            Some(ErrorSet::compute(&vals, &oracle, &grid, y_nodes))
        }
        None => None,
    };

    let curves = if with_curves {
        let plot_grid = ErrorGrid::uniform(mesh, CURVE_POINTS_PER_CELL);
        let direct_plot = ModeValues::sample_direct(&v_final, &plot_grid)?;
        let abs_err = |vals: &[f64], exact: &dyn Fn(f64) -> f64| -> Vec<f64> {
            plot_grid
                .points()
                .iter()
                .zip(vals)
                .map(|(p, &v)| (v - exact(p.x)).abs())
                .collect()
        };
        let mean_unf = abs_err(direct_plot.mean(), &|x| oracle.mean(x));
        let var_unf = abs_err(&direct_plot.variance(), &|x| oracle.variance(x));
        let (mean_fil, var_fil) = match &kernel {
            Some(k) => {
                let vals = ModeValues::sample_filtered(&v_final, k, &plot_grid)?;
                (
                    Some(abs_err(vals.mean(), &|x| oracle.mean(x))),
                    Some(abs_err(&vals.variance(), &|x| oracle.variance(x))),
                )
            }
            None => (None, None),
        };
        Some(CurveData {
            x: plot_grid.xs(),
            mean_unfiltered: mean_unf,
            mean_filtered: mean_fil,
            var_unfiltered: var_unf,
            var_filtered: var_fil,
        })
    } else {
        None
    };

    let report = ErrorReport {
        config: config.clone(),
        lambda_max: system.lambda_max(),
        n_steps: plan.n_steps,
        unfiltered,
        filtered,
    };
    if !report.unfiltered.all_finite() {
        return Err(Error::Internal("non-finite error measure".into()));
    }
    Ok((report, curves))
}

/// One row of a study: either a report or the failure message.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyRow {
    pub config: CaseConfig,
    pub report: Option<ErrorReport>,
    pub error: Option<String>,
    pub curves: Option<CurveData>,
    pub wall_secs: f64,
}

/// A batch of cases with emission metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    pub version: String,
    pub timestamp_unix: u64,
    pub config_hash: String,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn study_meta<T: Serialize>(config: &T) -> (String, u64, String) {
    let encoded = serde_json::to_string(config).unwrap_or_default();
    let hash = format!("{:016x}", fnv1a(encoded.as_bytes()));
    let ts = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    (env!("CARGO_PKG_VERSION").to_string(), ts, hash)
}

fn run_one_row(config: CaseConfig, with_curves: bool) -> StudyRow {
    let start = Instant::now();
    match run_case_full(&config, with_curves) {
        Ok((report, curves)) => StudyRow {
            config,
            report: Some(report),
            error: None,
            curves,
            wall_secs: start.elapsed().as_secs_f64(),
        },
        Err(e) => StudyRow {
            config,
            report: None,
            error: Some(e.to_string()),
            curves: None,
            wall_secs: start.elapsed().as_secs_f64(),
        },
    }
}

/// Run a batch of cases, in the worker pool when available.
pub fn run_cases(configs: Vec<CaseConfig>, with_curves: bool) -> Vec<StudyRow> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        configs.into_par_iter().map(|c| run_one_row(c, with_curves)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_cases_seq(configs, with_curves)
    }
}

/// Sequential reference path for the same batch; used as the fallback and by
/// the benchmark suite.
pub fn run_cases_seq(configs: Vec<CaseConfig>, with_curves: bool) -> Vec<StudyRow> {
    configs.into_iter().map(|c| run_one_row(c, with_curves)).collect()
}

/// How a study picks filter parameters per case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterPolicy {
    /// No post-processing.
    None,
    /// The same kernel everywhere.
    Fixed(FilterParams),
    /// `r = 2k`, `ell = k + 1` per case.
    DefaultForDegree,
}

/// A mesh-refinement study over a grid of `(N, k, Nx)` cases.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub base: CaseConfig,
    pub n_values: Vec<usize>,
    pub k_values: Vec<usize>,
    pub meshes: Vec<usize>,
    pub filter: FilterPolicy,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            base: CaseConfig::default(),
            n_values: vec![5, 6, 7, 8],
            k_values: vec![1, 2],
            meshes: vec![10, 20, 40, 80, 160],
            filter: FilterPolicy::DefaultForDegree,
        }
    }
}

impl StudyConfig {
    fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.meshes.is_empty() {
            return Err(Error::Config("study needs at least one mesh".into()));
        }
        for w in self.meshes.windows(2) {
            if w[1] != 2 * w[0] {
                return Err(Error::Config(format!(
                    "meshes must double at each refinement (got {} after {})",
                    w[1], w[0]
                )));
            }
        }
        Ok(())
    }

    fn expand(&self) -> Vec<CaseConfig> {
        let mut configs = Vec::new();
        for &n in &self.n_values {
            for &k in &self.k_values {
                for &nx in &self.meshes {
                    let mut c = self.base.clone();
                    c.n = n;
                    c.k = k;
                    c.nx = nx;
                    c.filter = match self.filter {
                        FilterPolicy::None => None,
                        FilterPolicy::Fixed(p) => Some(p),
                        FilterPolicy::DefaultForDegree => Some(FilterParams::default_for_degree(k)),
                    };
                    configs.push(c);
                }
            }
        }
        configs
    }
}

fn sort_rows(rows: &mut [StudyRow]) {
    rows.sort_by_key(|r| {
        (r.config.n, r.config.k, r.config.nx, r.config.filter.map(|f| (f.r, f.ell)))
    });
}

/// Run every `(N, k, Nx)` combination of the study.
pub fn run_convergence_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let (version, timestamp_unix, config_hash) = study_meta(config);
    let mut rows = run_cases(config.expand(), false);
    sort_rows(&mut rows);
    Ok(StudyResult { rows, version, timestamp_unix, config_hash })
}

/// Which kernel parameter a sweep varies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SweepVar {
    /// Vary the B-spline order with `r = 2k` fixed.
    Ell(Vec<usize>),
    /// Vary the moment count with `ell = k + 1` fixed.
    R(Vec<usize>),
}

/// Sweep one kernel parameter on a fixed case, with pointwise error curves.
pub fn run_kernel_sweep(base: &CaseConfig, sweep: &SweepVar) -> Result<StudyResult> {
    base.validate()?;
    let (version, timestamp_unix, config_hash) = study_meta(&(base, sweep));
    let configs: Vec<CaseConfig> = match sweep {
        SweepVar::Ell(ells) => ells
            .iter()
            .map(|&ell| {
                let mut c = base.clone();
                c.filter = Some(FilterParams { r: 2 * base.k, ell });
                c
            })
            .collect(),
        SweepVar::R(rs) => rs
            .iter()
            .map(|&r| {
                let mut c = base.clone();
                c.filter = Some(FilterParams { r, ell: base.k + 1 });
                c
            })
            .collect(),
    };
    let mut rows = run_cases(configs, true);
    sort_rows(&mut rows);
    Ok(StudyResult { rows, version, timestamp_unix, config_hash })
}

fn sci(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.5e}")
    }
}

fn measure_of(set: &ErrorSet, name: &str) -> f64 {
    match name {
        "mean_square" => set.mean_square,
        "mean_l2" => set.mean_l2,
        "mean_linf" => set.mean_linf,
        "var_l2" => set.var_l2,
        "var_linf" => set.var_linf,
        _ => unreachable!("unknown measure {name}"),
    }
}

pub const MEASURES: [&str; 5] = ["mean_square", "mean_l2", "mean_linf", "var_l2", "var_linf"];

/// Write one CSV per error measure, curve CSVs for rows that carry them,
/// and a JSON manifest with the full configuration and per-case wall times.
pub fn emit_tables(result: &StudyResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;

    for measure in MEASURES {
        let mut out = String::new();
        writeln!(
            out,
            "N,k,Nx,error_unfiltered,order_unfiltered,error_filtered,order_filtered"
        )
        .expect("write to string");

        // group rows by (N, k), preserving the sorted mesh order
        let mut idx = 0;
        while idx < result.rows.len() {
            let key = (result.rows[idx].config.n, result.rows[idx].config.k);
            let mut group_end = idx;
            while group_end < result.rows.len()
                && (result.rows[group_end].config.n, result.rows[group_end].config.k) == key
            {
                group_end += 1;
            }
            let group = &result.rows[idx..group_end];
            let unf: Vec<f64> = group
                .iter()
                .map(|r| r.report.as_ref().map_or(f64::NAN, |rep| measure_of(&rep.unfiltered, measure)))
                .collect();
            let fil: Vec<f64> = group
                .iter()
                .map(|r| {
                    r.report
                        .as_ref()
                        .and_then(|rep| rep.filtered.as_ref())
                        .map_or(f64::NAN, |set| measure_of(set, measure))
                })
                .collect();
            let unf_orders = convergence_orders(&unf);
            let fil_orders = convergence_orders(&fil);
            for (g, row) in group.iter().enumerate() {
                let order_cell = |o: f64, first: bool| {
                    if first {
                        String::new()
                    } else if o.is_nan() {
                        "nan".to_string()
                    } else {
                        sci(o)
                    }
                };
                let error_cell = |v: f64, row: &StudyRow| match &row.error {
                    Some(msg) => format!("\"error: {}\"", msg.replace('"', "'")),
                    None if v.is_nan() => String::new(),
                    None => sci(v),
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    row.config.n,
                    row.config.k,
                    row.config.nx,
                    error_cell(unf[g], row),
                    order_cell(unf_orders[g], g == 0),
                    if row.report.as_ref().is_some_and(|r| r.filtered.is_some()) {
                        error_cell(fil[g], row)
                    } else {
                        String::new()
                    },
                    if row.report.as_ref().is_some_and(|r| r.filtered.is_some()) {
                        order_cell(fil_orders[g], g == 0)
                    } else {
                        String::new()
                    },
                )
                .expect("write to string");
            }
            idx = group_end;
        }
        std::fs::write(dir.join(format!("{measure}.csv")), out)?;
    }

    for row in &result.rows {
        let Some(curves) = &row.curves else { continue };
        let tag = match row.config.filter {
            Some(f) => format!(
                "N{}_k{}_Nx{}_r{}_l{}",
                row.config.n, row.config.k, row.config.nx, f.r, f.ell
            ),
            None => format!("N{}_k{}_Nx{}", row.config.n, row.config.k, row.config.nx),
        };
        for (name, unfiltered, filtered) in [
            ("mean", &curves.mean_unfiltered, &curves.mean_filtered),
            ("var", &curves.var_unfiltered, &curves.var_filtered),
        ] {
            let mut out = String::new();
            writeln!(out, "x,error_unfiltered,error_filtered").expect("write to string");
            for (i, &x) in curves.x.iter().enumerate() {
                let fcell = filtered.as_ref().map_or(String::new(), |f| sci(f[i]));
                writeln!(out, "{},{},{}", sci(x), sci(unfiltered[i]), fcell)
                    .expect("write to string");
            }
            std::fs::write(dir.join(format!("curve_{name}_{tag}.csv")), out)?;
        }
    }

    let manifest = serde_json::to_string_pretty(result)?;
    std::fs::write(dir.join("manifest.json"), manifest)?;
    Ok(())
}

/// The full table bundle: `N ∈ {5..8}`, `k ∈ {1,2}`, meshes 10..160,
/// kernel `r = 2k`, `ell = k + 1`.
pub fn paper_tables_config() -> StudyConfig {
    StudyConfig::default()
}

/// The figure bundles: the filtered-vs-unfiltered comparison case and both
/// kernel-parameter sweeps on 20 cells.
pub fn paper_figures(dir: &Path) -> Result<()> {
    // mean/variance error comparison: N=5, P², 20 cells, default kernel
    let comparison = CaseConfig {
        n: 5,
        k: 2,
        nx: 20,
        filter: Some(FilterParams::default_for_degree(2)),
        ..CaseConfig::default()
    };
    let comparison_sweep = run_kernel_sweep(&comparison, &SweepVar::R(vec![4]))?;
    emit_tables(&comparison_sweep, &dir.join("comparison"))?;

    // spline-order sweep at fixed moments r = 2k, k = 1
    let sweep_base = CaseConfig { n: 5, k: 1, nx: 20, ..CaseConfig::default() };
    let ell_sweep = run_kernel_sweep(&sweep_base, &SweepVar::Ell(vec![1, 3, 4]))?;
    emit_tables(&ell_sweep, &dir.join("ell_sweep"))?;

    // moment sweep at fixed order ell = k + 1
    let r_sweep = run_kernel_sweep(&sweep_base, &SweepVar::R(vec![0, 2, 6]))?;
    emit_tables(&r_sweep, &dir.join("r_sweep"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn config_json_roundtrip_and_defaults() {
        let c = CaseConfig { n: 8, k: 2, nx: 40, ..CaseConfig::default() };
        let s = serde_json::to_string(&c).unwrap();
        let back: CaseConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        // sparse config files rely on defaults
        let sparse: CaseConfig = serde_json::from_str(r#"{"n": 6, "k": 1, "nx": 10}"#).unwrap();
        assert_eq!(sparse.t_final, 1.0);
        assert_eq!(sparse.cfl, 0.1);
        assert!(sparse.filter.is_none());
    }

    #[test]
    fn short_time_limit_is_projection_error() {
        let config = CaseConfig { n: 3, k: 1, nx: 20, t_final: 1e-8, ..CaseConfig::default() };
        let report = run_case(&config).unwrap();
        // no dynamics: all errors at the level of the initial projection
        assert!(report.unfiltered.mean_l2 < 1e-2);
        assert!(report.unfiltered.var_l2 < 1e-8);
        assert!(report.unfiltered.mean_square < 1e-4);
    }

    #[test]
    fn unstable_cfl_is_detected() {
        // cfl = 2 is far beyond the RKDG stability limit: either the state
        // blows up to non-finite values or the errors grow by orders of
        // magnitude over the run
        let config = CaseConfig { n: 3, k: 1, nx: 40, cfl: 2.0, t_final: 2.0, ..CaseConfig::default() };
        match run_case(&config) {
            Err(Error::Instability { .. }) => {}
            Ok(report) => assert!(
                report.unfiltered.mean_l2 > 1e2,
                "expected error growth, got mean_l2 = {:e}",
                report.unfiltered.mean_l2
            ),
            Err(other) => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn filter_that_does_not_fit_is_named() {
        let config = CaseConfig {
            n: 3,
            k: 2,
            nx: 4,
            filter: Some(FilterParams { r: 4, ell: 3 }),
            ..CaseConfig::default()
        };
        match run_case(&config) {
            Err(Error::Config(msg)) => assert!(msg.contains("Nx >= 7"), "got {msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn study_rejects_non_doubling_meshes() {
        let bad = StudyConfig { meshes: vec![10, 30], ..StudyConfig::default() };
        assert!(matches!(run_convergence_study(&bad), Err(Error::Config(_))));
        let decreasing = StudyConfig { meshes: vec![40, 20], ..StudyConfig::default() };
        assert!(run_convergence_study(&decreasing).is_err());
    }

    #[test]
    fn single_mesh_study_has_empty_order_column() {
        let cfg = StudyConfig {
            n_values: vec![3],
            k_values: vec![1],
            meshes: vec![10],
            filter: FilterPolicy::None,
            ..StudyConfig::default()
        };
        let result = run_convergence_study(&cfg).unwrap();
        assert_eq!(result.rows.len(), 1);
        let dir = tempfile::tempdir().unwrap();
        emit_tables(&result, dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("mean_l2.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "N,k,Nx,error_unfiltered,order_unfiltered,error_filtered,order_filtered"
        );
        let row = lines.next().unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[0..3], ["3", "1", "10"]);
        assert!(cells[4].is_empty(), "order column should be empty: {row}");
    }

    #[test]
    fn empty_study_emits_header_only() {
        let result = StudyResult {
            rows: vec![],
            version: "test".into(),
            timestamp_unix: 0,
            config_hash: "0".into(),
        };
        let dir = tempfile::tempdir().unwrap();
        emit_tables(&result, dir.path()).unwrap();
        for measure in MEASURES {
            let csv = std::fs::read_to_string(dir.path().join(format!("{measure}.csv"))).unwrap();
            assert_eq!(csv.lines().count(), 1);
        }
        assert!(dir.path().join("manifest.json").exists());
    }

    #[test]
    fn failed_cases_recorded_not_fatal() {
        // second case cannot fit the filter
        let configs = vec![
            CaseConfig { n: 2, k: 1, nx: 16, filter: Some(FilterParams { r: 2, ell: 2 }), ..CaseConfig::default() },
            CaseConfig { n: 2, k: 1, nx: 2, filter: Some(FilterParams { r: 2, ell: 2 }), ..CaseConfig::default() },
        ];
        let rows = run_cases_seq(configs, false);
        assert!(rows[0].report.is_some());
        assert!(rows[1].report.is_none());
        assert!(rows[1].error.as_ref().unwrap().contains("Nx"));
    }

    #[test]
    fn sweep_of_length_one_matches_run_case() {
        let base = CaseConfig { n: 3, k: 1, nx: 20, ..CaseConfig::default() };
        let sweep = run_kernel_sweep(&base, &SweepVar::Ell(vec![2])).unwrap();
        assert_eq!(sweep.rows.len(), 1);
        let mut direct_cfg = base.clone();
        direct_cfg.filter = Some(FilterParams { r: 2, ell: 2 });
        let direct = run_case(&direct_cfg).unwrap();
        let swept = sweep.rows[0].report.as_ref().unwrap();
        assert_abs_diff_eq!(swept.unfiltered.mean_l2, direct.unfiltered.mean_l2);
        assert_abs_diff_eq!(
            swept.filtered.unwrap().mean_l2,
            direct.filtered.unwrap().mean_l2
        );
        assert!(sweep.rows[0].curves.is_some());
        let curves = sweep.rows[0].curves.as_ref().unwrap();
        assert_eq!(curves.x.len(), 20 * CURVE_POINTS_PER_CELL);
    }

    #[test]
    fn identical_configs_give_identical_reports() {
        let config = CaseConfig {
            n: 4,
            k: 1,
            nx: 20,
            filter: Some(FilterParams { r: 2, ell: 2 }),
            ..CaseConfig::default()
        };
        let a = run_case(&config).unwrap();
        let b = run_case(&config).unwrap();
        assert_eq!(a.unfiltered.mean_l2.to_bits(), b.unfiltered.mean_l2.to_bits());
        assert_eq!(a.unfiltered.mean_square.to_bits(), b.unfiltered.mean_square.to_bits());
        assert_eq!(
            a.filtered.unwrap().var_linf.to_bits(),
            b.filtered.unwrap().var_linf.to_bits()
        );
    }
}
