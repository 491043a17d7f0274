use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use matdeg::format::{read_instance, InstanceFile, ResultFile, Status};
use matdeg::generate::{generate, ConstraintKind, GeneratorParams};
use matdeg::oracle::verify_solution;
use matdeg::{Error, Instance, SolverConfig};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Minimum-cost spanning trees under per-vertex matroid degree constraints.
#[derive(Parser)]
#[command(name = "matdeg", version)]
struct Cli {
    /// Log progress to stderr (-v for info, -vv for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the result file.
    Solve {
        instance: PathBuf,
        /// Write the result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the iteration trace in the result.
        #[arg(long)]
        trace: bool,
        /// Check the result against the brute-force oracle.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve and verify one instance, or every `.json` file in a directory.
    Verify {
        path: PathBuf,
        /// Result file, or for a directory the directory receiving one result per instance.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trace: bool,
        /// Instances verified concurrently when `path` is a directory.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Generate a random instance with a planted feasible tree.
    Gen {
        /// uniform-deg, partition, laminar or mixed.
        #[arg(long, default_value = "uniform-deg")]
        kind: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Seed for the randomized internal consistency checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Node limit for spanning-tree separation.
    #[arg(long)]
    st_threshold: Option<usize>,
    /// Ground-size limit for enumeration-based matroid routines.
    #[arg(long)]
    matroid_threshold: Option<usize>,
    /// Edge limit for brute-force tree enumeration in the oracle.
    #[arg(long)]
    oracle_threshold: Option<usize>,
    /// Run every lemma-level assertion during the solve.
    #[arg(long)]
    debug_asserts: bool,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig {
            seed: self.seed,
            debug_asserts: self.debug_asserts,
            ..SolverConfig::default()
        };
        if let Some(t) = self.st_threshold {
            cfg.limits.st_nodes = t;
        }
        if let Some(t) = self.matroid_threshold {
            cfg.limits.matroid_ground = t;
        }
        if let Some(t) = self.oracle_threshold {
            cfg.limits.oracle_edges = t;
        }
        cfg
    }
}

const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

/// Solves `inst` and returns the result file with its exit code.
fn solve(inst: &Instance, cfg: &SolverConfig, trace: bool, verify: bool) -> (ResultFile, u8) {
    match matdeg::run(inst, cfg) {
        Ok(res) => {
            let file = ResultFile::optimal(&res, trace);
            if !verify {
                return (file, 0);
            }
            match verify_solution(inst, &res, &cfg.limits) {
                Ok(report) => {
                    let code = if report.passed() { 0 } else { EXIT_ERROR };
                    if code != 0 {
                        log::error!("verification failed: {:?}", report.failures());
                    }
                    (file.with_verification(&report), code)
                }
                Err(e) => (ResultFile::error(format!("verification: {e}")), EXIT_ERROR),
            }
        }
        Err(e @ Error::Infeasible { .. }) => {
            (ResultFile::infeasible(e.to_string()), EXIT_INFEASIBLE)
        }
        Err(e) => (ResultFile::error(e.to_string()), EXIT_ERROR),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve_file(
    path: &Path,
    out: Option<&Path>,
    trace: bool,
    verify: bool,
    args: &SolverArgs,
) -> Result<u8> {
    let (file, code) = match read_instance(path) {
        Ok(f) => solve(&f.instance, &args.config(), trace, verify),
        Err(e) => (ResultFile::error(e.to_string()), EXIT_ERROR),
    };
    if let Some(msg) = &file.error {
        eprintln!("{}: {msg}", path.display());
    }
    write_output(out, &file.to_json())?;
    Ok(code)
}

fn verify_dir(
    dir: &Path,
    out: Option<&Path>,
    trace: bool,
    jobs: usize,
    args: &SolverArgs,
) -> Result<u8> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "json"));
    paths.sort();
    if paths.is_empty() {
        bail!("no .json instances in {}", dir.display());
    }
    if let Some(o) = out {
        std::fs::create_dir_all(o).with_context(|| format!("creating {}", o.display()))?;
    }
    let cfg = args.config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("starting worker threads")?;
    let results: Vec<(ResultFile, u8)> = pool.install(|| {
        paths
            .par_iter()
            .map(|p| match read_instance(p) {
                Ok(f) => solve(&f.instance, &cfg, trace, true),
                Err(e) => (ResultFile::error(e.to_string()), EXIT_ERROR),
            })
            .collect()
    });

    let mut worst = 0;
    for (path, (file, code)) in paths.iter().zip(&results) {
        let name = path.file_name().unwrap_or_default().to_string_lossy();
        let summary = match (&file.status, &file.error) {
            (Status::Optimal, _) => format!(
                "cost {} lp {} max violation {}",
                file.cost.as_deref().unwrap_or("-"),
                file.lp_initial.as_deref().unwrap_or("-"),
                file.violations.values().max().copied().unwrap_or(0)
            ),
            (_, Some(msg)) => msg.clone(),
            (_, None) => String::new(),
        };
        let verdict = match code {
            0 => "ok",
            &EXIT_INFEASIBLE => "infeasible",
            _ => "FAIL",
        };
        println!("{name}: {verdict} {summary}");
        if let Some(o) = out {
            write_output(
                Some(&o.join(path.file_name().unwrap_or_default())),
                &file.to_json(),
            )?;
        }
        // an error outranks infeasibility
        worst = match (worst, *code) {
            (EXIT_ERROR, _) | (_, EXIT_ERROR) => EXIT_ERROR,
            (a, b) => a.max(b),
        };
    }
    Ok(worst)
}

fn gen(kind: &str, n: usize, m: usize, seed: u64, out: Option<&Path>) -> Result<u8> {
    let kind: ConstraintKind = kind.parse()?;
    let g = generate(&GeneratorParams { kind, n, m, seed })?;
    let file = InstanceFile {
        instance: g.instance,
        metadata: Some(g.metadata),
    };
    write_output(out, &file.to_json()?)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    let outcome = match &cli.command {
        Command::Solve {
            instance,
            out,
            trace,
            verify,
            solver,
        } => solve_file(instance, out.as_deref(), *trace, *verify, solver),
        Command::Verify {
            path,
            out,
            trace,
            jobs,
            solver,
        } => {
            if path.is_dir() {
                verify_dir(path, out.as_deref(), *trace, *jobs, solver)
            } else {
                solve_file(path, out.as_deref(), *trace, true, solver)
            }
        }
        Command::Gen {
            kind,
            n,
            m,
            seed,
            out,
        } => gen(kind, *n, *m, *seed, out.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
