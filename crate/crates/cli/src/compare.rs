use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use holoflow::solvers::{solve, KACZMARZ_MAX_ELEMENTS};
use holoflow::{Algorithm, SolverConfig};
use rayon::prelude::*;

use crate::args::CompareArgs;
use crate::manifest::{RunManifest, RunTiming, MANIFEST_FILE};
use crate::output::{ensure_dir, image_target, ms, synth_target, write_curve, LoadedTarget};
use crate::{CliError, CliResult};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUMMARY_HEADER: &str = "image,method,learning_rate,psnr_db,final_loss";

struct Job {
    target: usize,
    algo: Algorithm,
    lr: Option<f64>,
    file: String,
}

struct Outcome {
    psnr_db: f64,
    final_loss: f64,
    ms: f64,
}

pub fn run(a: CompareArgs) -> CliResult<()> {
    let start = Instant::now();
    if a.images.is_empty() && a.synths.is_empty() {
        return Err(CliError::Config("compare needs at least one --image or --synth".into()));
    }
    if a.lrs.is_empty() {
        return Err(CliError::Config("--lr needs at least one value".into()));
    }
    let mut targets: Vec<LoadedTarget> = Vec::new();
    for p in &a.images {
        targets.push(image_target(p, a.resize.as_ref())?);
    }
    for s in &a.synths {
        targets.push(synth_target(s, a.seed)?);
    }
    let mut seen = HashSet::new();
    for t in &targets {
        if !seen.insert(t.stem.clone()) {
            return Err(CliError::Config(format!("two targets share the name `{}`", t.stem)));
        }
    }

    let mut jobs = Vec::new();
    for (ti, t) in targets.iter().enumerate() {
        for &algo in &a.methods {
            if algo == Algorithm::Kaczmarz && t.grid.shape().total() > KACZMARZ_MAX_ELEMENTS {
                eprintln!(
                    "skipping kaczmarz on {}: {} elements exceeds its limit of {KACZMARZ_MAX_ELEMENTS}",
                    t.stem,
                    t.grid.shape().total()
                );
                continue;
            }
            let lrs: Vec<Option<f64>> = if algo.uses_learning_rate() {
                a.lrs.iter().copied().map(Some).collect()
            } else {
                vec![None]
            };
            for lr in lrs {
                let file = match lr {
                    Some(lr) if a.lrs.len() > 1 => format!("{}__{}__lr{lr:e}.csv", t.stem, algo),
                    _ => format!("{}__{}.csv", t.stem, algo),
                };
                jobs.push(Job {
                    target: ti,
                    algo,
                    lr,
                    file,
                });
            }
        }
    }

    ensure_dir(&a.out)?;
    let outcomes: Vec<CliResult<Outcome>> = jobs
        .par_iter()
        .map(|job| {
            let mut cfg = SolverConfig::new(job.algo)
                .with_iterations(a.iters)
                .with_seed(a.seed)
                .with_log_stride(a.log_stride);
            if let Some(lr) = job.lr {
                cfg = cfg.with_learning_rate(lr);
            }
            let t0 = Instant::now();
            let res = solve(&targets[job.target].grid, &cfg)?;
            let elapsed = ms(t0.elapsed());
            write_curve(&a.out.join(&job.file), &res.log, a.timing)?;
            Ok(Outcome {
                psnr_db: res.final_psnr,
                final_loss: res.final_loss,
                ms: elapsed,
            })
        })
        .collect();

    let mut summary = String::from(SUMMARY_HEADER);
    summary.push('\n');
    let mut m = RunManifest::new("compare", &a);
    m.inputs = targets.iter().map(|t| t.input.clone()).collect();
    for (job, out) in jobs.iter().zip(outcomes) {
        let out = out?;
        let stem = &targets[job.target].stem;
        let lr = job.lr.map(|v| format!("{v:e}")).unwrap_or_default();
        writeln!(summary, "{stem},{},{lr},{:e},{:e}", job.algo, out.psnr_db, out.final_loss).expect("string write");
        m.outputs.push(job.file.clone());
        m.runs.push(RunTiming {
            name: job.file.trim_end_matches(".csv").to_string(),
            iterations: a.iters,
            total_ms: out.ms,
            per_iteration_ms: out.ms / a.iters as f64,
        });
        println!("{stem:>16} {:>10} {lr:>8} {:8.2} dB", job.algo.name(), out.psnr_db);
    }
    std::fs::write(a.out.join(SUMMARY_FILE), summary)?;
    m.outputs.push(SUMMARY_FILE.into());
    m.outputs.push(MANIFEST_FILE.into());
    m.total_ms = ms(start.elapsed());
    m.write(&a.out)
}
