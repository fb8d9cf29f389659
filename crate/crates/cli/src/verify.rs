use std::path::Path;
use std::time::Instant;

use holoflow::diagnostics::{
    check_corollary1, check_theorem1, check_theorem2, inject_radial_fault, synthesize_feasible_target,
    wiener_khinchin_report, TheoremReport,
};
use holoflow::imageio::{load_complex, load_hologram, load_raw_intensity};
use holoflow::propagation::project_phase_only;
use holoflow::solvers::{initial_parameters, solve};
use holoflow::{Algorithm, ComplexGrid, Error, SolverConfig};
use serde::Serialize;

use crate::args::{Checker, Fault, VerifyArgs};
use crate::manifest::{Input, RunManifest, MANIFEST_FILE};
use crate::output::{ensure_dir, ms};
use crate::{CliError, CliResult};

pub const TEXT_REPORT: &str = "report.txt";
pub const JSON_REPORT: &str = "report.json";

#[derive(Serialize)]
struct Report<'a> {
    pass: bool,
    reports: &'a [TheoremReport],
}

fn load_witness(path: &Path) -> CliResult<ComplexGrid> {
    match load_complex(path) {
        Err(Error::BadMagic { .. }) => Ok(load_hologram(path)?.to_hologram()),
        other => Ok(other?),
    }
}

pub fn run(a: VerifyArgs) -> CliResult<()> {
    let start = Instant::now();
    let wants = |c: Checker| a.checkers.contains(&Checker::All) || a.checkers.contains(&c);

    let (target, witness, input) = match &a.target {
        Some(p) => {
            let t = load_raw_intensity(p)?;
            let w = a.witness.as_deref().map(load_witness).transpose()?;
            let input = Input::Raw {
                path: p.clone(),
                shape: t.shape().to_string(),
            };
            (t, w, input)
        }
        None => {
            let (w, t) = synthesize_feasible_target(&a.n, a.seed)?;
            let input = Input::Synth {
                shape: a.n.to_string(),
                seed: a.seed,
            };
            (t, Some(w), input)
        }
    };
    let shape = target.shape().clone();
    let cfg = SolverConfig::new(Algorithm::Wfcf)
        .with_learning_rate(a.lr)
        .with_iterations(a.iters)
        .with_seed(a.seed);
    cfg.validate()?;

    let mut reports = Vec::new();
    if wants(Checker::Theorem1) || wants(Checker::Corollary1) {
        let tracked = cfg.clone().tracking((0..shape.total()).collect());
        let mut traj = solve(&target, &tracked)?.trajectory.expect("tracking was requested");
        if a.fault == Some(Fault::ParallelGrad) {
            inject_radial_fault(&mut traj);
        }
        if wants(Checker::Theorem1) {
            reports.push(check_theorem1(&traj)?);
        }
        if wants(Checker::Corollary1) {
            reports.extend(check_corollary1(&traj, a.lr)?);
        }
    }
    if wants(Checker::Theorem2) {
        let w = witness
            .as_ref()
            .ok_or_else(|| CliError::Config("theorem2 needs a feasible target: pass --witness with --target".into()))?;
        reports.push(check_theorem2(&target, w, &cfg)?);
    }
    if wants(Checker::WienerKhinchin) {
        let h = project_phase_only(&initial_parameters(&shape, &cfg)?)?;
        reports.push(wiener_khinchin_report(&h));
    }

    let text: String = reports.iter().map(TheoremReport::to_text).collect();
    print!("{text}");
    let pass = reports.iter().all(|r| r.pass);

    if let Some(out) = &a.out {
        ensure_dir(out)?;
        std::fs::write(out.join(TEXT_REPORT), &text)?;
        let json = serde_json::to_string_pretty(&Report {
            pass,
            reports: &reports,
        })
        .map_err(std::io::Error::other)?;
        std::fs::write(out.join(JSON_REPORT), json + "\n")?;
        let mut m = RunManifest::new("verify", &a);
        m.inputs.push(input);
        m.outputs = vec![TEXT_REPORT.into(), JSON_REPORT.into(), MANIFEST_FILE.into()];
        m.total_ms = ms(start.elapsed());
        m.write(out)?;
    }

    if pass {
        Ok(())
    } else {
        let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
        Err(CliError::Verify(failed.join(", ")))
    }
}
