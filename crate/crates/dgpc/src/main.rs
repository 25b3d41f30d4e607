//! Command-line front end for single cases, refinement studies, kernel
//! sweeps and the two prebuilt experiment bundles.

use clap::{Args, Parser, Subcommand};
use dgpc::study::{
    emit_tables, paper_figures, paper_tables_config, run_case, run_convergence_study,
    run_kernel_sweep, CaseConfig, FilterParams, FilterPolicy, StudyConfig, StudyResult, SweepVar,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Worker-count environment variable honored when the `parallel` feature is
/// enabled.
const THREADS_ENV: &str = "DGPC_THREADS";

#[derive(Parser)]
#[command(
    name = "dgpc",
    version,
    about = "Transport with a uniform random wave speed: upwind DG on the chaos system, \
             SIAC post-processing, error tables",
    after_help = "Set DGPC_THREADS to bound the worker pool (parallel builds only)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags mirroring the case-config keys; every flag overrides the config
/// file value of the same name.
#[derive(Args, Clone)]
struct CaseArgs {
    /// JSON case config; omitted keys fall back to defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Chaos truncation degree N
    #[arg(long)]
    n: Option<usize>,
    /// DG polynomial degree k
    #[arg(long)]
    k: Option<usize>,
    /// Cell count Nx
    #[arg(long)]
    nx: Option<usize>,
    /// Final time T
    #[arg(long)]
    t: Option<f64>,
    /// CFL constant
    #[arg(long)]
    cfl: Option<f64>,
    /// SIAC kernel as "r,l" (moments, spline order)
    #[arg(long)]
    filter: Option<String>,
}

impl CaseArgs {
    fn resolve(&self) -> Result<CaseConfig, dgpc::Error> {
        let mut config: CaseConfig = match &self.config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => CaseConfig::default(),
        };
        if let Some(n) = self.n {
            config.n = n;
        }
        if let Some(k) = self.k {
            config.k = k;
        }
        if let Some(nx) = self.nx {
            config.nx = nx;
        }
        if let Some(t) = self.t {
            config.t_final = t;
        }
        if let Some(cfl) = self.cfl {
            config.cfl = cfl;
        }
        if let Some(f) = &self.filter {
            config.filter = Some(parse_filter(f)?);
        }
        Ok(config)
    }
}

fn parse_filter(text: &str) -> Result<FilterParams, dgpc::Error> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| dgpc::Error::Config(format!("bad filter argument '{text}', expected r,l")))
    };
    match parts.as_slice() {
        [r, l] => Ok(FilterParams { r: parse(r)?, ell: parse(l)? }),
        _ => Err(dgpc::Error::Config(format!("bad filter argument '{text}', expected r,l"))),
    }
}

fn parse_list(text: &str) -> Result<Vec<usize>, dgpc::Error> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| dgpc::Error::Config(format!("bad list entry '{s}'")))
        })
        .collect()
}

#[derive(Subcommand)]
enum Command {
    /// Run one case and print its error report
    Run {
        #[command(flatten)]
        case: CaseArgs,
        /// Also write CSV tables and the manifest here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh-refinement study over a (N, k, Nx) grid
    Study {
        /// JSON study config (base case, n_values, k_values, meshes, filter)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the mesh sequence, e.g. 10,20,40,80,160
        #[arg(long)]
        meshes: Option<String>,
        /// Override the filter for every case as "r,l"
        #[arg(long)]
        filter: Option<String>,
        /// Output directory
        #[arg(long, default_value = "out/study")]
        out: PathBuf,
    },
    /// Sweep one kernel parameter on a fixed case, emitting error curves
    Sweep {
        #[command(flatten)]
        case: CaseArgs,
        /// Which parameter to vary: "l" (spline order) or "r" (moments)
        #[arg(long)]
        vary: String,
        /// Comma-separated sweep values
        #[arg(long)]
        values: String,
        /// Output directory
        #[arg(long, default_value = "out/sweep")]
        out: PathBuf,
    },
    /// Reproduce the full error-table bundle (all five measures)
    PaperTables {
        /// Output directory
        #[arg(long, default_value = "out/paper-tables")]
        out: PathBuf,
    },
    /// Reproduce the filtered-vs-unfiltered comparison and both kernel sweeps
    PaperFigures {
        /// Output directory
        #[arg(long, default_value = "out/paper-figures")]
        out: PathBuf,
    },
}

#[cfg(feature = "parallel")]
fn init_worker_pool() {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        match value.parse::<usize>() {
            Ok(threads) if threads > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
            _ => eprintln!("warning: ignoring invalid {THREADS_ENV}='{value}'"),
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn init_worker_pool() {
    if std::env::var_os(THREADS_ENV).is_some() {
        eprintln!("warning: {THREADS_ENV} has no effect in a sequential build");
    }
}

fn print_report(report: &dgpc::ErrorReport) {
    let c = &report.config;
    println!(
        "case N={} k={} Nx={} T={} cfl={} (lambda_max={:.6}, {} steps)",
        c.n, c.k, c.nx, c.t_final, c.cfl, report.lambda_max, report.n_steps
    );
    let line = |tag: &str, set: &dgpc::ErrorSet| {
        println!(
            "  {tag:<10} mean_square={:.5e}  mean_l2={:.5e}  mean_linf={:.5e}  var_l2={:.5e}  var_linf={:.5e}",
            set.mean_square, set.mean_l2, set.mean_linf, set.var_l2, set.var_linf
        );
    };
    line("unfiltered", &report.unfiltered);
    if let (Some(set), Some(f)) = (&report.filtered, &c.filter) {
        line(&format!("siac({},{})", f.r, f.ell), set);
    }
}

fn single_case_study(config: &CaseConfig) -> Result<StudyResult, dgpc::Error> {
    let study = StudyConfig {
        base: config.clone(),
        n_values: vec![config.n],
        k_values: vec![config.k],
        meshes: vec![config.nx],
        filter: match config.filter {
            Some(f) => FilterPolicy::Fixed(f),
            None => FilterPolicy::None,
        },
    };
    run_convergence_study(&study)
}

fn run(cli: Cli) -> Result<(), dgpc::Error> {
    match cli.command {
        Command::Run { case, out } => {
            let config = case.resolve()?;
            let report = run_case(&config)?;
            print_report(&report);
            if let Some(dir) = out {
                emit_tables(&single_case_study(&config)?, &dir)?;
                println!("tables written to {}", dir.display());
            }
        }
        Command::Study { config, meshes, filter, out } => {
            let mut study: StudyConfig = match config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None => StudyConfig::default(),
            };
            if let Some(m) = meshes {
                study.meshes = parse_list(&m)?;
            }
            if let Some(f) = filter {
                study.filter = FilterPolicy::Fixed(parse_filter(&f)?);
            }
            let result = run_convergence_study(&study)?;
            emit_tables(&result, &out)?;
            let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
            println!(
                "{} cases ({} failed), tables written to {}",
                result.rows.len(),
                failed,
                out.display()
            );
        }
        Command::Sweep { case, vary, values, out } => {
            let base = case.resolve()?;
            let list = parse_list(&values)?;
            let sweep = match vary.as_str() {
                "l" | "ell" => SweepVar::Ell(list),
                "r" => SweepVar::R(list),
                other => {
                    return Err(dgpc::Error::Config(format!(
                        "--vary must be 'l' or 'r', got '{other}'"
                    )))
                }
            };
            let result = run_kernel_sweep(&base, &sweep)?;
            emit_tables(&result, &out)?;
            println!("{} sweep cases, output in {}", result.rows.len(), out.display());
        }
        Command::PaperTables { out } => {
            let result = run_convergence_study(&paper_tables_config())?;
            emit_tables(&result, &out)?;
            println!("{} cases, tables written to {}", result.rows.len(), out.display());
        }
        Command::PaperFigures { out } => {
            paper_figures(&out)?;
            println!("figure data written to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    init_worker_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
