use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Duration;

use holoflow::diagnostics::synthesize_feasible_target;
use holoflow::imageio::{downscale, load_image, load_raw_intensity};
use holoflow::metrics::write_curve_csv;
use holoflow::{GridShape, IntensityGrid, IterationRecord};

use crate::manifest::Input;
use crate::{CliError, CliResult};

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", dir.display())))
}

/// A target with a file-name stem and its provenance.
pub struct LoadedTarget {
    pub stem: String,
    pub grid: IntensityGrid,
    pub input: Input,
}

pub fn image_target(path: &Path, resize: Option<&GridShape>) -> CliResult<LoadedTarget> {
    let mut grid = load_image(path)?;
    if let Some(to) = resize {
        grid = holoflow::metrics::normalize_target(&downscale(&grid, to)?)?;
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into());
    let input = Input::Image {
        path: path.to_path_buf(),
        shape: grid.shape().to_string(),
    };
    Ok(LoadedTarget { stem, grid, input })
}

pub fn synth_target(shape: &GridShape, seed: u64) -> CliResult<LoadedTarget> {
    let (_, grid) = synthesize_feasible_target(shape, seed)?;
    Ok(LoadedTarget {
        stem: format!("synth{shape}"),
        grid,
        input: Input::Synth {
            shape: shape.to_string(),
            seed,
        },
    })
}

pub fn raw_target(path: &Path) -> CliResult<LoadedTarget> {
    let grid = load_raw_intensity(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "target".into());
    let input = Input::Raw {
        path: path.to_path_buf(),
        shape: grid.shape().to_string(),
    };
    Ok(LoadedTarget { stem, grid, input })
}

pub fn write_curve(path: &Path, log: &[IterationRecord], timing: bool) -> CliResult<()> {
    write_curve_csv(log, BufWriter::new(File::create(path)?), timing)?;
    Ok(())
}

pub fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}
