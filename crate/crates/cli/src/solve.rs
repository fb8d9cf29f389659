use std::time::Instant;

use holoflow::imageio::{save_hologram, save_intensity, ImageFormat};
use holoflow::solvers::solve;
use holoflow::SolverConfig;

use crate::args::SolveArgs;
use crate::manifest::{RunManifest, RunTiming};
use crate::output::{ensure_dir, image_target, ms, raw_target, synth_target, write_curve, LoadedTarget};
use crate::{CliError, CliResult};

pub const HOLOGRAM_FILE: &str = "hologram.holo";
pub const DISPLAYED_FILE: &str = "displayed.png";
pub const CURVE_FILE: &str = "curve.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.json";

pub fn load(a: &SolveArgs) -> CliResult<LoadedTarget> {
    if a.resize.is_some() && a.source.image.is_none() {
        return Err(CliError::Config("--resize applies to --image only".into()));
    }
    if let Some(p) = &a.source.image {
        image_target(p, a.resize.as_ref())
    } else if let Some(s) = &a.source.synth {
        synth_target(s, a.synth_seed.unwrap_or(a.seed))
    } else if let Some(p) = &a.source.target {
        raw_target(p)
    } else {
        Err(CliError::Config("one of --image, --synth, --target is required".into()))
    }
}

pub fn run(a: SolveArgs) -> CliResult<()> {
    let start = Instant::now();
    let target = load(&a)?;
    let mut cfg = SolverConfig::new(a.algo)
        .with_learning_rate(a.lr)
        .with_iterations(a.iters)
        .with_seed(a.seed)
        .with_log_stride(a.log_stride);
    cfg.snapshot_indices = a.track.clone();
    cfg.validate()?;
    ensure_dir(&a.out)?;

    let t0 = Instant::now();
    let res = solve(&target.grid, &cfg)?;
    let solve_ms = ms(t0.elapsed());

    save_hologram(&res.final_phases(), &a.out.join(HOLOGRAM_FILE))?;
    save_intensity(&res.displayed, &a.out.join(DISPLAYED_FILE), ImageFormat::Png)?;
    write_curve(&a.out.join(CURVE_FILE), &res.log, a.timing)?;
    let mut outputs = vec![HOLOGRAM_FILE, DISPLAYED_FILE, CURVE_FILE];
    if let Some(traj) = &res.trajectory {
        let json = serde_json::to_string(traj).map_err(std::io::Error::other)?;
        std::fs::write(a.out.join(TRAJECTORY_FILE), json)?;
        outputs.push(TRAJECTORY_FILE);
    }
    outputs.push(crate::manifest::MANIFEST_FILE);

    let mut m = RunManifest::new("solve", &a);
    m.inputs.push(target.input);
    m.outputs = outputs.iter().map(|s| s.to_string()).collect();
    m.runs.push(RunTiming {
        name: a.algo.to_string(),
        iterations: a.iters,
        total_ms: solve_ms,
        per_iteration_ms: solve_ms / a.iters as f64,
    });
    m.total_ms = ms(start.elapsed());
    m.write(&a.out)?;

    println!(
        "{} on {}: loss {:e} -> {:e}, psnr {:.2} dB ({} iterations, {:.0} ms)",
        a.algo,
        target.stem,
        res.log[0].loss,
        res.final_loss,
        res.final_psnr,
        a.iters,
        solve_ms
    );
    Ok(())
}
