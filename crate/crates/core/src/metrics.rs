//! PSNR, target normalization and curve extraction.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::IterationRecord;
use crate::error::{Error, Result};
use crate::grid::IntensityGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsnrScaling {
    None,
    /// Multiply the displayed image by the scalar minimizing the MSE first.
    #[default]
    LeastSquares,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsnrOptions {
    pub scaling: PsnrScaling,
    pub peak: f64,
    /// Upper limit on the reported value, also returned for zero MSE.
    pub cap_db: f64,
}

impl Default for PsnrOptions {
    fn default() -> Self {
        Self {
            scaling: PsnrScaling::LeastSquares,
            peak: 1.0,
            cap_db: 99.0,
        }
    }
}

/// Scales a target so that `sum = N^2`, the energy of any unit-amplitude
/// hologram after propagation.
pub fn normalize_target(raw: &IntensityGrid) -> Result<IntensityGrid> {
    let sum = raw.sum();
    if sum.is_nan() || sum <= 0.0 {
        return Err(Error::Config("cannot normalize an all-zero target".into()));
    }
    let n = raw.shape().total() as f64;
    let k = n * n / sum;
    let data = raw.as_slice().iter().map(|v| v * k).collect();
    IntensityGrid::new(raw.shape().clone(), data)
}

pub fn psnr(displayed: &IntensityGrid, reference: &IntensityGrid, opts: PsnrOptions) -> Result<f64> {
    reference.shape().ensure_same(displayed.shape())?;
    psnr_values(displayed.as_slice(), reference.as_slice(), opts)
}

pub(crate) fn psnr_values(displayed: &[f64], reference: &[f64], opts: PsnrOptions) -> Result<f64> {
    if opts.peak.is_nan() || opts.peak <= 0.0 {
        return Err(Error::Config(format!("psnr peak must be positive, got {}", opts.peak)));
    }
    let rmax = reference.iter().copied().fold(0.0, f64::max);
    if rmax <= 0.0 {
        return Err(Error::Config("psnr reference has no positive value".into()));
    }
    let k = opts.peak / rmax;
    let s = match opts.scaling {
        PsnrScaling::None => 1.0,
        PsnrScaling::LeastSquares => {
            let (dr, dd) = displayed
                .iter()
                .zip(reference)
                .fold((0.0, 0.0), |(dr, dd), (d, r)| (dr + d * r, dd + d * d));
            if dd > 0.0 {
                dr / dd
            } else {
                0.0
            }
        }
    };
    let mse = displayed
        .iter()
        .zip(reference)
        .map(|(d, r)| {
            let e = k * (s * d - r);
            e * e
        })
        .sum::<f64>()
        / reference.len() as f64;
    if mse == 0.0 {
        return Ok(opts.cap_db);
    }
    Ok((10.0 * (opts.peak * opts.peak / mse).log10()).min(opts.cap_db))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveField {
    Loss,
    PsnrDb,
    MinAmp,
    MaxGradAmp,
    ElapsedMs,
}

impl std::str::FromStr for CurveField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "loss" => CurveField::Loss,
            "psnr_db" => CurveField::PsnrDb,
            "min_amp" => CurveField::MinAmp,
            "max_grad_amp" => CurveField::MaxGradAmp,
            "elapsed_ms" => CurveField::ElapsedMs,
            _ => return Err(Error::UnknownField(s.to_string())),
        })
    }
}

impl CurveField {
    fn get(self, r: &IterationRecord) -> Option<f64> {
        match self {
            CurveField::Loss => Some(r.loss),
            CurveField::PsnrDb => Some(r.psnr_db),
            CurveField::MinAmp => r.min_amp,
            CurveField::MaxGradAmp => r.max_grad_amp,
            CurveField::ElapsedMs => Some(r.elapsed_ms),
        }
    }
}

/// `(iter, value)` pairs for one field; records without the field are
/// skipped.
pub fn extract_curve(log: &[IterationRecord], field: &str) -> Result<Vec<(usize, f64)>> {
    let field: CurveField = field.parse()?;
    Ok(log
        .iter()
        .filter_map(|r| field.get(r).map(|v| (r.iter, v)))
        .collect())
}

pub const CURVE_HEADER: &str = "iter,loss,psnr_db,min_amp,max_grad_amp,elapsed_ms";

/// Writes a curve CSV. Absent values are empty fields; `elapsed_ms` is left
/// empty unless `timing` is set so that repeated runs produce identical bytes.
pub fn write_curve_csv<W: Write>(log: &[IterationRecord], mut out: W, timing: bool) -> std::io::Result<()> {
    writeln!(out, "{CURVE_HEADER}")?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for r in log {
        writeln!(
            out,
            "{},{:e},{:e},{},{},{}",
            r.iter,
            r.loss,
            r.psnr_db,
            opt(r.min_amp),
            opt(r.max_grad_amp),
            if timing { format!("{:.3}", r.elapsed_ms) } else { String::new() }
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridShape;

    fn grid(v: Vec<f64>) -> IntensityGrid {
        IntensityGrid::new(GridShape::d1(v.len()).unwrap(), v).unwrap()
    }

    fn record(iter: usize, min_amp: Option<f64>) -> IterationRecord {
        IterationRecord {
            iter,
            loss: 1.0 / (iter + 1) as f64,
            psnr_db: 10.0 + iter as f64,
            min_amp,
            max_grad_amp: None,
            elapsed_ms: 0.5,
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_target(&grid(vec![1.0; 4])).unwrap().as_slice(), &[4.0; 4]);
        let once = normalize_target(&grid(vec![0.0, 3.0, 1.0, 2.0])).unwrap();
        let twice = normalize_target(&once).unwrap();
        for (a, b) in once.as_slice().iter().zip(twice.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(once.as_slice()[0], 0.0);
        assert!(normalize_target(&grid(vec![0.0; 4])).is_err());
    }

    #[test]
    fn psnr_examples() {
        let none = PsnrOptions {
            scaling: PsnrScaling::None,
            ..PsnrOptions::default()
        };
        let r = grid(vec![1.0, 0.5, 0.2, 0.0]);
        assert_eq!(psnr(&r, &r, none).unwrap(), 99.0);
        let d = grid(r.as_slice().iter().map(|v| v + 0.1).collect());
        assert!((psnr(&d, &r, none).unwrap() - 20.0).abs() < 1e-12);
        let d2 = grid(r.as_slice().iter().map(|v| 2.0 * v).collect());
        assert_eq!(psnr(&d2, &r, PsnrOptions::default()).unwrap(), 99.0);
    }

    #[test]
    fn psnr_shape_mismatch() {
        assert!(psnr(&grid(vec![1.0; 3]), &grid(vec![1.0; 4]), PsnrOptions::default()).is_err());
    }

    #[test]
    fn curve_extraction() {
        let log = vec![record(0, Some(0.1)), record(1, None), record(2, Some(0.3))];
        let c = extract_curve(&log, "psnr_db").unwrap();
        assert_eq!(c, vec![(0, 10.0), (1, 11.0), (2, 12.0)]);
        assert_eq!(extract_curve(&log, "min_amp").unwrap().len(), 2);
        assert!(extract_curve(&[], "loss").unwrap().is_empty());
        assert!(matches!(extract_curve(&log, "psnr"), Err(Error::UnknownField(_))));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_curve_csv(&[record(0, None)], &mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CURVE_HEADER);
        assert_eq!(lines.next().unwrap(), "0,1e0,1e1,,,");
    }
}
