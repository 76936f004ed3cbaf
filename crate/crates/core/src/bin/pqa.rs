use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pqa::altproj::{alt_proj, AltProjConfig, DEFAULT_MAX_ITERS, DEFAULT_RESIDUAL_TOL};
use pqa::baselines::{qsvd_tr_report, Convention};
use pqa::drsm::{hybrid_solve, DrsmConfig};
use pqa::experiment::{run_experiment, ExperimentSpec};
use pqa::files::{read_matrix, write_json, write_matrix, write_singular_values_csv, write_trace_csv};
use pqa::generate::{gen_random_pure, gen_random_pure_lowrank, random_quaternion_matrix};
use pqa::image::{image_to_quat, quat_to_image, ImageTensor};
use pqa::qsvd::{qsvd, qsvd_householder};
use pqa::{Error, QuatMatrix, Result};

/// Low-rank pure quaternion approximation.
#[derive(Parser)]
#[command(name = "pqa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Singular value decomposition of a matrix file.
    Qsvd {
        input: PathBuf,
        /// Write U, sigma and V as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write singular values as CSV.
        #[arg(long)]
        sv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Jacobi)]
        method: Method,
    },
    /// Rank-r pure approximation of a matrix file.
    Approx {
        #[arg(value_enum)]
        solver: SolverArg,
        input: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        #[arg(long, default_value_t = DEFAULT_RESIDUAL_TOL)]
        tol: f64,
        /// Warm-start steps for the hybrid solver (counted in --max-iters).
        #[arg(long, default_value_t = 500)]
        drsm_steps: usize,
        #[arg(long, value_enum, default_value_t = ConventionArg::A)]
        convention: ConventionArg,
        /// Trace CSV: phase,step,residual,objective,seconds.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Solution matrix JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report JSON (also printed to stdout).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Random matrix generation.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Quaternion rank before the real part is dropped (lowrank only).
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment described by a JSON spec.
    Experiment {
        spec: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// PPM image to matrix JSON.
    Img2q { input: PathBuf, output: PathBuf },
    /// Pure matrix JSON to PPM image.
    Q2img {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 8)]
        bit_depth: u8,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Jacobi,
    Householder,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Altproj,
    Hybrid,
    Qsvdtr,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    A,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    /// Zero real part, standard-normal imaginary parts.
    Pure,
    /// Pure part of a random rank-r matrix.
    Lowrank,
    /// All four components standard normal.
    Quaternion,
}

#[derive(Serialize)]
struct FactorsJson<'a> {
    sigma: &'a [f64],
    u: pqa::matrix::QuatMatrixJson,
    v: pqa::matrix::QuatMatrixJson,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Qsvd { input, out, sv, method } => {
            let a = read_matrix(&input)?;
            let f = match method {
                Method::Jacobi => qsvd(&a)?,
                Method::Householder => qsvd_householder(&a)?,
            };
            for s in &f.sigma {
                println!("{s:.17e}");
            }
            if let Some(path) = sv {
                write_singular_values_csv(&path, &f.sigma)?;
            }
            if let Some(path) = out {
                let doc = FactorsJson {
                    sigma: &f.sigma,
                    u: (&f.u).into(),
                    v: (&f.v).into(),
                };
                write_json(&path, &doc)?;
            }
            Ok(())
        }
        Command::Approx {
            solver,
            input,
            rank,
            max_iters,
            tol,
            drsm_steps,
            convention,
            trace,
            out,
            report,
        } => {
            let a = read_matrix(&input)?;
            if !a.is_pure() {
                eprintln!("warning: input has a nonzero real part (norm {:.3e})", a.real_part_norm());
            }
            let ap_cfg = AltProjConfig {
                rank,
                max_iters,
                residual_tol: tol,
                trace: trace.is_some(),
            };
            let solution = match solver {
                SolverArg::Altproj | SolverArg::Hybrid => {
                    let rep = if let SolverArg::Hybrid = solver {
                        let drsm = DrsmConfig {
                            steps: drsm_steps,
                            ..DrsmConfig::new(rank)
                        };
                        let cfg = AltProjConfig {
                            max_iters: max_iters.saturating_sub(drsm_steps).max(1),
                            ..ap_cfg
                        };
                        hybrid_solve(&a, &drsm, &cfg)?
                    } else {
                        alt_proj(&a, &a, &ap_cfg)?
                    };
                    if !rep.converged {
                        eprintln!(
                            "warning: residual {:.3e} still above {tol:e} after {} iterations; returning the last iterate",
                            rep.final_residual().unwrap_or(f64::NAN),
                            rep.iterations
                        );
                    }
                    if let Some(path) = &trace {
                        write_trace_csv(path, &rep.trace)?;
                    }
                    emit(&rep, report.as_deref())?;
                    rep.solution
                }
                SolverArg::Qsvdtr => {
                    let conv = match convention {
                        ConventionArg::A => Convention::TargetRank,
                        ConventionArg::B => Convention::QuarterRank,
                    };
                    let rep = qsvd_tr_report(&a, rank, conv)?;
                    emit(&rep, report.as_deref())?;
                    rep.solution
                }
            };
            if let Some(path) = out {
                write_matrix(&path, &solution)?;
            }
            Ok(())
        }
        Command::Gen {
            kind,
            m,
            n,
            rank,
            seed,
            out,
        } => {
            if m == 0 || n == 0 {
                return Err(Error::InvalidShape(format!("{m}x{n}")));
            }
            let a = match kind {
                GenKind::Pure => gen_random_pure(m, n, seed),
                GenKind::Quaternion => random_quaternion_matrix(m, n, seed),
                GenKind::Lowrank => {
                    let r = rank.ok_or_else(|| Error::InvalidConfig("lowrank generation needs --rank".into()))?;
                    gen_random_pure_lowrank(m, n, r, seed)?
                }
            };
            write_matrix(&out, &a)
        }
        Command::Experiment { spec, out_dir } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| Error::Io {
                path: spec.clone(),
                source: e,
            })?;
            let parsed: ExperimentSpec = serde_json::from_str(&text).map_err(|source| Error::Json {
                path: spec.clone(),
                source,
            })?;
            let parsed = resolve_image_path(parsed, &spec);
            let summary = run_experiment(&parsed, &out_dir)?;
            for c in &summary.cells {
                println!(
                    "{:<8} r={:<3} instance={:<3} objective={:.6e} rank={}",
                    c.solver.label(),
                    c.rank,
                    c.instance,
                    c.objective,
                    c.numerical_rank
                );
            }
            Ok(())
        }
        Command::Img2q { input, output } => {
            let img = ImageTensor::read_ppm(&input)?;
            write_matrix(&output, &image_to_quat(&img))
        }
        Command::Q2img { input, output, bit_depth } => {
            let a: QuatMatrix = read_matrix(&input)?;
            quat_to_image(&a, bit_depth)?.write_ppm(&output)
        }
    }
}

/// Relative image paths in a spec are taken relative to the spec file.
fn resolve_image_path(mut spec: ExperimentSpec, spec_path: &Path) -> ExperimentSpec {
    if let (Some(img), Some(dir)) = (&spec.image, spec_path.parent()) {
        if img.is_relative() {
            spec.image = Some(dir.join(img));
        }
    }
    spec
}

fn emit<T: Serialize>(report: &T, path: Option<&Path>) -> Result<()> {
    print_json(report);
    match path {
        Some(p) => write_json(p, report),
        None => Ok(()),
    }
}
