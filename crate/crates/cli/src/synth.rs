use std::time::Instant;

use holoflow::diagnostics::synthesize_feasible_target;
use holoflow::imageio::{save_complex, save_hologram, save_intensity, save_raw_intensity, ImageFormat};
use holoflow::init::init_phase_from;

use crate::args::SynthArgs;
use crate::manifest::{Input, RunManifest, MANIFEST_FILE};
use crate::output::{ensure_dir, ms};
use crate::CliResult;

pub const WITNESS_HOLOGRAM: &str = "witness.holo";
pub const WITNESS_COMPLEX: &str = "witness.cx";
pub const TARGET_RAW: &str = "target.raw";
pub const TARGET_IMAGE: &str = "target.png";

pub fn run(a: SynthArgs) -> CliResult<()> {
    let start = Instant::now();
    let (witness, target) = synthesize_feasible_target(&a.n, a.seed)?;
    ensure_dir(&a.out)?;
    save_hologram(&init_phase_from(&witness)?, &a.out.join(WITNESS_HOLOGRAM))?;
    save_complex(&witness, &a.out.join(WITNESS_COMPLEX))?;
    save_raw_intensity(&target, &a.out.join(TARGET_RAW))?;
    save_intensity(&target, &a.out.join(TARGET_IMAGE), ImageFormat::Png)?;

    let mut m = RunManifest::new("synth", &a);
    m.inputs.push(Input::Synth {
        shape: a.n.to_string(),
        seed: a.seed,
    });
    m.outputs = [WITNESS_HOLOGRAM, WITNESS_COMPLEX, TARGET_RAW, TARGET_IMAGE, MANIFEST_FILE]
        .iter()
        .map(|s| s.to_string())
        .collect();
    m.total_ms = ms(start.elapsed());
    m.write(&a.out)?;
    println!("feasible target {} (seed {}) written to {}", a.n, a.seed, a.out.display());
    Ok(())
}
