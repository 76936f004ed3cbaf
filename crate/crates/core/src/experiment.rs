//! Batch runs over instances × ranks × solvers, written to a directory.
//!
//! Output layout:
//!
//! ```text
//! summary.json                  spec plus one record per cell
//! input_i{k}[_r{r}]_sv.csv      singular values of each input
//! {solver}_r{r}_i{k}_sv.csv     singular values of each solution
//! {solver}_r{r}_i{k}_trace.csv  solver trace (iterative solvers, if enabled)
//! {solver}_r{r}_i{k}.json|.ppm  solution (if `save_solutions`)
//! ```
//!
//! Everything except the timing fields is a deterministic function of the
//! spec.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::altproj::{alt_proj, AltProjConfig, AltProjReport, DEFAULT_MAX_ITERS, DEFAULT_RESIDUAL_TOL};
use crate::baselines::{qsvd_tr_report, Convention};
use crate::drsm::{hybrid_solve, DrsmConfig};
use crate::error::{Error, Result};
use crate::files::{write_json, write_matrix, write_singular_values_csv, write_trace_csv};
use crate::generate::{gen_random_pure, gen_random_pure_lowrank, synthetic_5x5};
use crate::image::{image_to_quat, psnr, quat_to_image, ImageTensor};
use crate::matrix::QuatMatrix;
use crate::qsvd::{rank_from_singular_values, singular_values, DEFAULT_RANK_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// The fixed 5×5 instance.
    #[serde(rename = "synthetic_5x5")]
    Synthetic5x5,
    /// Pure matrices of exact rank `r` (each listed rank must be a multiple
    /// of 4); AltProj should recover them.
    RandomExactLowrank,
    RandomPure,
    Image,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Altproj,
    Hybrid,
    Qsvdtr,
}

impl Solver {
    pub fn label(self) -> &'static str {
        match self {
            Solver::Altproj => "altproj",
            Solver::Hybrid => "hybrid",
            Solver::Qsvdtr => "qsvdtr",
        }
    }
}

fn default_instances() -> usize {
    1
}
fn default_solvers() -> Vec<Solver> {
    vec![Solver::Altproj, Solver::Qsvdtr]
}
fn default_convention() -> Convention {
    Convention::TargetRank
}
fn default_max_iters() -> usize {
    DEFAULT_MAX_ITERS
}
fn default_tol() -> f64 {
    DEFAULT_RESIDUAL_TOL
}
fn default_drsm_steps() -> usize {
    500
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Size of random instances; ignored for the fixed and image kinds.
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub n: usize,
    pub ranks: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Random instances use seeds `seed, seed+1, …`.
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub image: Option<PathBuf>,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<Solver>,
    #[serde(default = "default_convention")]
    pub convention: Convention,
    /// Iteration budget per solve. For the hybrid solver it covers both
    /// phases, so AltProj gets `max_iters − drsm_steps`.
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_drsm_steps")]
    pub drsm_steps: usize,
    #[serde(default = "default_true")]
    pub trace: bool,
    #[serde(default)]
    pub save_solutions: bool,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, ranks: Vec<usize>) -> Self {
        ExperimentSpec {
            kind,
            m: 0,
            n: 0,
            ranks,
            seed: 0,
            instances: 1,
            image: None,
            solvers: default_solvers(),
            convention: default_convention(),
            max_iters: DEFAULT_MAX_ITERS,
            residual_tol: DEFAULT_RESIDUAL_TOL,
            drsm_steps: default_drsm_steps(),
            trace: true,
            save_solutions: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub instance: usize,
    pub seed: u64,
    pub rank: usize,
    pub solver: Solver,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    pub objective: f64,
    pub numerical_rank: usize,
    /// σ_{r+1} of the solution: zero for an exact rank-r result and at most
    /// the final residual for a converged AltProj run.
    pub sigma_next: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psnr: Option<f64>,
    pub elapsed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub spec: ExperimentSpec,
    pub cells: Vec<CellSummary>,
}

enum Source {
    Fixed(QuatMatrix),
    Image(ImageTensor, QuatMatrix),
    RandomPure,
    ExactLowrank,
}

fn validate(spec: &ExperimentSpec) -> Result<(Source, (usize, usize))> {
    let bad = |msg: String| Err(Error::InvalidConfig(msg));
    if spec.ranks.is_empty() {
        return bad("experiment has no ranks".into());
    }
    if spec.solvers.is_empty() {
        return bad("experiment has no solvers".into());
    }
    if spec.instances == 0 {
        return bad("instances must be positive".into());
    }
    if spec.max_iters == 0 || !(spec.residual_tol >= 0.0) {
        return bad("max_iters must be positive and residual_tol nonnegative".into());
    }
    let (source, shape) = match spec.kind {
        ExperimentKind::Synthetic5x5 => (Source::Fixed(synthetic_5x5()), (5, 5)),
        ExperimentKind::Image => {
            let path = spec.image.as_ref().ok_or_else(|| Error::InvalidConfig("image experiment without an image path".into()))?;
            let img = ImageTensor::read_ppm(path)?;
            let a = image_to_quat(&img);
            let shape = a.shape();
            (Source::Image(img, a), shape)
        }
        ExperimentKind::RandomPure | ExperimentKind::RandomExactLowrank => {
            if spec.m == 0 || spec.n == 0 {
                return bad(format!("random instances need positive m and n, got {}x{}", spec.m, spec.n));
            }
            let src = if spec.kind == ExperimentKind::RandomPure { Source::RandomPure } else { Source::ExactLowrank };
            (src, (spec.m, spec.n))
        }
    };
    let max = shape.0.min(shape.1);
    for &r in &spec.ranks {
        if r == 0 || r > max {
            return Err(Error::RankOutOfRange { rank: r, max });
        }
        if matches!(source, Source::ExactLowrank) && r % 4 != 0 {
            return bad(format!("exact low-rank instances need ranks divisible by 4, got {r}"));
        }
        if spec.solvers.contains(&Solver::Qsvdtr) {
            spec.convention.truncation_rank(r)?;
        }
    }
    if spec.solvers.contains(&Solver::Hybrid) {
        DrsmConfig {
            steps: spec.drsm_steps,
            ..DrsmConfig::new(spec.ranks[0])
        }
        .validate(shape.0, shape.1)?;
    }
    Ok((source, shape))
}

/// Runs every cell and writes the files described in the module docs into
/// `out_dir` (created if missing). The spec is validated before anything is
/// written.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentSummary> {
    let (source, (m, n)) = validate(spec)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let instances = match source {
        Source::Fixed(_) | Source::Image(..) => 1,
        _ => spec.instances,
    };
    let mut cells = Vec::new();
    for inst in 0..instances {
        let seed = spec.seed.wrapping_add(inst as u64);
        let shared = match &source {
            Source::Fixed(a) | Source::Image(_, a) => Some(a.clone()),
            Source::RandomPure => Some(gen_random_pure(m, n, seed)),
            Source::ExactLowrank => None,
        };
        if let Some(a) = &shared {
            write_singular_values_csv(&out_dir.join(format!("input_i{inst}_sv.csv")), &singular_values(a)?)?;
        }
        for &r in &spec.ranks {
            let own;
            let a = match &shared {
                Some(a) => a,
                None => {
                    own = gen_random_pure_lowrank(m, n, r / 4, seed)?;
                    write_singular_values_csv(&out_dir.join(format!("input_i{inst}_r{r}_sv.csv")), &singular_values(&own)?)?;
                    &own
                }
            };
            for &solver in &spec.solvers {
                cells.push(run_cell(spec, &source, a, inst, seed, r, solver, out_dir)?);
            }
        }
    }
    let summary = ExperimentSummary {
        spec: spec.clone(),
        cells,
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    spec: &ExperimentSpec,
    source: &Source,
    a: &QuatMatrix,
    inst: usize,
    seed: u64,
    r: usize,
    solver: Solver,
    out_dir: &Path,
) -> Result<CellSummary> {
    let stem = format!("{}_r{r}_i{inst}", solver.label());
    let ap_cfg = AltProjConfig {
        rank: r,
        max_iters: spec.max_iters,
        residual_tol: spec.residual_tol,
        trace: spec.trace,
    };
    let iterative = |rep: AltProjReport| (rep.solution.clone(), Some(rep));
    let (solution, report, convention, elapsed) = match solver {
        Solver::Altproj => {
            let rep = alt_proj(a, a, &ap_cfg)?;
            let t = rep.elapsed;
            let (s, rep) = iterative(rep);
            (s, rep, None, t)
        }
        Solver::Hybrid => {
            let drsm = DrsmConfig {
                steps: spec.drsm_steps,
                ..DrsmConfig::new(r)
            };
            let cfg = AltProjConfig {
                max_iters: spec.max_iters.saturating_sub(spec.drsm_steps).max(1),
                ..ap_cfg
            };
            let rep = hybrid_solve(a, &drsm, &cfg)?;
            let t = rep.elapsed;
            let (s, rep) = iterative(rep);
            (s, rep, None, t)
        }
        Solver::Qsvdtr => {
            let rep = qsvd_tr_report(a, r, spec.convention)?;
            (rep.solution, None, Some(spec.convention), rep.elapsed)
        }
    };

    let sigma = singular_values(&solution)?;
    write_singular_values_csv(&out_dir.join(format!("{stem}_sv.csv")), &sigma)?;
    if let Some(rep) = &report {
        if spec.trace {
            write_trace_csv(&out_dir.join(format!("{stem}_trace.csv")), &rep.trace)?;
        }
    }
    let psnr_value = match source {
        Source::Image(img, _) => {
            let out = quat_to_image(&solution, img.bit_depth())?;
            if spec.save_solutions {
                out.write_ppm(&out_dir.join(format!("{stem}.ppm")))?;
            }
            Some(psnr(img, &out)?)
        }
        _ => None,
    };
    if spec.save_solutions {
        write_matrix(&out_dir.join(format!("{stem}.json")), &solution)?;
    }

    Ok(CellSummary {
        instance: inst,
        seed,
        rank: r,
        solver,
        convention,
        objective: solution.distance(a),
        numerical_rank: rank_from_singular_values(&sigma, DEFAULT_RANK_TOL),
        sigma_next: sigma.get(r).copied().unwrap_or(0.0),
        iterations: report.as_ref().map(|r| r.iterations),
        converged: report.as_ref().map(|r| r.converged),
        final_residual: report.as_ref().and_then(|r| r.final_residual()),
        tail_ratio: report.as_ref().and_then(|r| r.tail_ratio),
        psnr: psnr_value,
        elapsed,
    })
}
