use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use holoflow::{Algorithm, GridShape};
use serde::Serialize;

use crate::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "holoflow", version, about = "Phase-only hologram optimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Optimize one hologram.
    #[command(args_override_self = true)]
    Solve(SolveArgs),
    /// Run several methods on shared initializations and tabulate final PSNR.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
    /// Check the WFCF gradient properties numerically.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Write a random feasible target and its witness.
    #[command(args_override_self = true)]
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
#[group(required = true, multiple = false, id = "source")]
pub struct TargetArgs {
    /// 8-bit grayscale PGM or PNG.
    #[arg(long, group = "source")]
    pub image: Option<PathBuf>,
    /// Synthesize a feasible target of this shape (`N` or `RxC`).
    #[arg(long, group = "source")]
    pub synth: Option<GridShape>,
    /// Raw intensity grid file, used as is.
    #[arg(long, group = "source")]
    pub target: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub algo: Algorithm,
    #[command(flatten)]
    pub source: TargetArgs,
    /// Seed of the synthetic target; defaults to `--seed`.
    #[arg(long)]
    pub synth_seed: Option<u64>,
    /// Box-downscale an image to this shape first.
    #[arg(long)]
    pub resize: Option<GridShape>,
    #[arg(long, default_value_t = 1e-2)]
    pub lr: f64,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub log_stride: usize,
    /// Record parameters and gradients at these linear indices.
    #[arg(long, value_delimiter = ',')]
    pub track: Option<Vec<usize>>,
    /// Fill the elapsed_ms column of the curve CSV.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CompareArgs {
    #[arg(long = "image", num_args = 1.., action = ArgAction::Set)]
    pub images: Vec<PathBuf>,
    /// Synthetic feasible targets, one per shape.
    #[arg(long = "synth", num_args = 1.., action = ArgAction::Set)]
    pub synths: Vec<GridShape>,
    #[arg(long)]
    pub resize: Option<GridShape>,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Learning rates for the gradient methods; each one is a separate run.
    #[arg(long = "lr", num_args = 1.., action = ArgAction::Set, default_value = "1e-2")]
    pub lrs: Vec<f64>,
    #[arg(
        long,
        num_args = 1..,
        action = ArgAction::Set,
        value_delimiter = ',',
        default_value = "gs,kaczmarz,wfpf,wfpf-adam,wfcf"
    )]
    pub methods: Vec<Algorithm>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub log_stride: usize,
    #[arg(long)]
    pub timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Checker {
    All,
    Theorem1,
    Theorem2,
    Corollary1,
    WienerKhinchin,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Replace every recorded gradient by a radial vector of the same length.
    ParallelGrad,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long = "checker", num_args = 1.., action = ArgAction::Set, value_delimiter = ',', default_value = "all")]
    pub checkers: Vec<Checker>,
    /// Grid shape of the synthetic target (`N` or `RxC`).
    #[arg(long, default_value = "64")]
    pub n: GridShape,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub lr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub fault: Option<Fault>,
    /// Raw intensity target instead of a synthesized one.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Witness for `--target` (complex or hologram file).
    #[arg(long, requires = "target")]
    pub witness: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value = "64")]
    pub n: GridShape,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Replaces `--config FILE` by the file's `key = value` lines as flags,
/// placed before the command-line flags so those take precedence.
///
/// `key = true` becomes a bare switch and `key = false` is dropped. Blank
/// lines and lines starting with `#` are ignored.
pub fn expand_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| CliError::Config("--config needs a file".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    if rest.len() < 2 {
        return Err(CliError::Config("--config needs a subcommand".into()));
    }
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let flags = config_flags(&text)?;
    let mut out: Vec<OsString> = rest.drain(..2).collect();
    out.extend(flags.into_iter().map(OsString::from));
    out.extend(rest);
    Ok(out)
}

fn config_flags(text: &str) -> CliResult<Vec<String>> {
    let mut flags = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", i + 1)))?;
        let key = format!("--{}", k.trim().replace('_', "-"));
        match v.trim() {
            "true" => flags.push(key),
            "false" => {}
            v => {
                flags.push(key);
                flags.extend(v.split_whitespace().map(str::to_string));
            }
        }
    }
    Ok(flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines_become_flags() {
        let f = config_flags("# run\niters = 50\nlog_stride=5\ntiming = true\ntrack=0,3\nimage = a.pgm b.pgm\nx = false\n")
            .unwrap();
        assert_eq!(
            f,
            [
                "--iters", "50", "--log-stride", "5", "--timing", "--track", "0,3", "--image", "a.pgm", "b.pgm"
            ]
        );
        assert!(config_flags("iters 50").is_err());
    }

    #[test]
    fn flags_after_config_win() {
        let dir = std::env::temp_dir().join(format!("holoflow-args-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.conf");
        std::fs::write(&p, "n = 16\nseed = 3\n").unwrap();
        let argv: Vec<OsString> = ["holoflow", "synth", "--config", p.to_str().unwrap(), "--seed", "9", "--out", "x"]
            .iter()
            .map(OsString::from)
            .collect();
        let expanded = expand_config(argv).unwrap();
        let Cli {
            command: Command::Synth(a),
        } = Cli::try_parse_from(&expanded).unwrap()
        else {
            panic!()
        };
        assert_eq!(a.seed, 9);
        assert_eq!(a.n, GridShape::d1(16).unwrap());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
