//! Grayscale images, holograms and raw grids on disk.
//!
//! Images are 8-bit PGM (P5) or 8-bit grayscale PNG. Pixel values are read as
//! intensities: `value / 255`, then scaled so the sum is `N^2`.
//!
//! Grid files are a 16-byte header (4-byte magic, then `ndim`, `dim0`, `dim1`
//! as little-endian `u32`, `dim1 = 0` for 1D) followed by little-endian `f64`
//! values in row-major order. Complex grids store `re, im` pairs.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::{ColorType, ImageEncoder};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexGrid, GridShape, IntensityGrid, PhaseGrid};
use crate::metrics::normalize_target;

pub const HOLOGRAM_MAGIC: [u8; 4] = *b"WFPH";
pub const INTENSITY_MAGIC: [u8; 4] = *b"WFIN";
pub const COMPLEX_MAGIC: [u8; 4] = *b"WFCX";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Png,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("pgm") => Ok(ImageFormat::Pgm),
            Some("png") => Ok(ImageFormat::Png),
            _ => Err(Error::Config(format!("cannot infer image format from {}", path.display()))),
        }
    }
}

/// 8-bit pixels with their shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    /// Intensities `value / 255` before energy normalization.
    pub fn to_intensity(&self) -> Result<IntensityGrid> {
        let data = self.pixels.iter().map(|&v| v as f64 / 255.0).collect();
        IntensityGrid::new(GridShape::d2(self.rows, self.cols)?, data)
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

pub fn read_gray(path: &Path) -> Result<GrayImage> {
    let bytes = read(path)?;
    if bytes.starts_with(b"P5") {
        parse_pgm(&bytes)
    } else if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes)
    } else {
        Err(Error::Parse {
            format: "image",
            reason: "neither a binary PGM nor a PNG signature".into(),
        })
    }
}

/// Loads an image as a normalized target.
pub fn load_image(path: &Path) -> Result<IntensityGrid> {
    normalize_target(&read_gray(path)?.to_intensity()?)
}

fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let bad = |reason: &str| Error::Parse {
        format: "PGM",
        reason: reason.to_string(),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated or non-numeric header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("header value out of range"))?;
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("missing whitespace after header"));
    }
    pos += 1;
    let [cols, rows, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedDepth(format!("PGM maxval {maxval}")));
    }
    if rows == 0 || cols == 0 {
        return Err(bad("zero image dimension"));
    }
    let payload = &bytes[pos..];
    if payload.len() < rows * cols {
        return Err(bad("pixel data truncated"));
    }
    Ok(GrayImage {
        rows,
        cols,
        pixels: payload[..rows * cols].to_vec(),
    })
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png).map_err(|e| Error::Parse {
        format: "PNG",
        reason: e.to_string(),
    })?;
    match img {
        image::DynamicImage::ImageLuma8(g) => Ok(GrayImage {
            rows: g.height() as usize,
            cols: g.width() as usize,
            pixels: g.into_raw(),
        }),
        other => Err(Error::UnsupportedDepth(format!("PNG color type {:?}", other.color()))),
    }
}

/// Maps `grid` to 8 bits by its own maximum (an all-zero grid stays zero).
pub fn to_gray(grid: &IntensityGrid) -> GrayImage {
    let (rows, cols) = grid.shape().rows_cols();
    let max = grid.max();
    let pixels = grid
        .as_slice()
        .iter()
        .map(|&v| if max > 0.0 { (v / max * 255.0).round() as u8 } else { 0 })
        .collect();
    GrayImage { rows, cols, pixels }
}

pub fn save_intensity(grid: &IntensityGrid, path: &Path, format: ImageFormat) -> Result<()> {
    write_gray(&to_gray(grid), path, format)
}

pub fn write_gray(img: &GrayImage, path: &Path, format: ImageFormat) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    match format {
        ImageFormat::Pgm => {
            write!(out, "P5\n{} {}\n255\n", img.cols, img.rows)?;
            out.write_all(&img.pixels)?;
        }
        ImageFormat::Png => {
            image::codecs::png::PngEncoder::new(&mut out)
                .write_image(&img.pixels, img.cols as u32, img.rows as u32, ColorType::L8.into())
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Box-filter downscale of a 2D grid by integer factors. A 1D `to` shape of
/// length `n` is produced from a `1 x n` reduction.
pub fn downscale(grid: &IntensityGrid, to: &GridShape) -> Result<IntensityGrid> {
    let (r0, c0) = grid.shape().rows_cols();
    let (r1, c1) = to.rows_cols();
    if r1 > r0 || c1 > c0 || r0 % r1 != 0 || c0 % c1 != 0 {
        return Err(Error::Config(format!(
            "cannot box-downscale {} to {}: extents must divide evenly",
            grid.shape(),
            to
        )));
    }
    let (fr, fc) = (r0 / r1, c0 / c1);
    let src = grid.as_slice();
    let mut out = vec![0.0; r1 * c1];
    for (i, v) in out.iter_mut().enumerate() {
        let (r, c) = (i / c1, i % c1);
        let mut s = 0.0;
        for rr in r * fr..(r + 1) * fr {
            s += src[rr * c0 + c * fc..rr * c0 + (c + 1) * fc].iter().sum::<f64>();
        }
        *v = s / (fr * fc) as f64;
    }
    IntensityGrid::new(to.clone(), out)
}

fn write_grid(path: &Path, magic: [u8; 4], shape: &GridShape, values: impl Iterator<Item = f64>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    let dims = shape.dims();
    out.write_all(&magic)?;
    out.write_all(&(dims.len() as u32).to_le_bytes())?;
    out.write_all(&(dims[0] as u32).to_le_bytes())?;
    out.write_all(&(dims.get(1).copied().unwrap_or(0) as u32).to_le_bytes())?;
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a grid file, returning its shape and `per_element * N` values.
fn read_grid(path: &Path, magic: [u8; 4], per_element: usize) -> Result<(GridShape, Vec<f64>)> {
    let bytes = read(path)?;
    if bytes.len() < 16 {
        return Err(Error::Parse {
            format: "grid",
            reason: format!("{} bytes is shorter than the header", bytes.len()),
        });
    }
    let found: [u8; 4] = bytes[..4].try_into().expect("length checked");
    if found != magic {
        return Err(Error::BadMagic { found });
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().expect("length checked")) as usize;
    let shape = match word(1) {
        1 => GridShape::d1(word(2))?,
        2 => GridShape::d2(word(2), word(3))?,
        d => {
            return Err(Error::Parse {
                format: "grid",
                reason: format!("unsupported dimension count {d}"),
            })
        }
    };
    let payload = &bytes[16..];
    let declared = shape.total() * per_element;
    if payload.len() % 8 != 0 || payload.len() / 8 != declared {
        return Err(Error::DimensionMismatch {
            declared,
            actual: payload.len() / 8,
        });
    }
    let values = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    Ok((shape, values))
}

pub fn save_hologram(phases: &PhaseGrid, path: &Path) -> Result<()> {
    write_grid(path, HOLOGRAM_MAGIC, phases.shape(), phases.as_slice().iter().copied())
}

pub fn load_hologram(path: &Path) -> Result<PhaseGrid> {
    let (shape, values) = read_grid(path, HOLOGRAM_MAGIC, 1)?;
    PhaseGrid::new(shape, values)
}

/// Stores intensities exactly, without 8-bit quantization.
pub fn save_raw_intensity(grid: &IntensityGrid, path: &Path) -> Result<()> {
    write_grid(path, INTENSITY_MAGIC, grid.shape(), grid.as_slice().iter().copied())
}

pub fn load_raw_intensity(path: &Path) -> Result<IntensityGrid> {
    let (shape, values) = read_grid(path, INTENSITY_MAGIC, 1)?;
    IntensityGrid::new(shape, values)
}

pub fn save_complex(grid: &ComplexGrid, path: &Path) -> Result<()> {
    write_grid(
        path,
        COMPLEX_MAGIC,
        grid.shape(),
        grid.as_slice().iter().flat_map(|z| [z.re, z.im]),
    )
}

pub fn load_complex(path: &Path) -> Result<ComplexGrid> {
    let (shape, values) = read_grid(path, COMPLEX_MAGIC, 2)?;
    let data = values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
    ComplexGrid::new(shape, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header_comments_and_values() {
        let bytes = b"P5\n# c\n2 2\n255\n\x00\xff\xff\x00";
        let img = parse_pgm(bytes).unwrap();
        assert_eq!((img.rows, img.cols), (2, 2));
        assert_eq!(img.pixels, vec![0, 255, 255, 0]);
    }

    #[test]
    fn pgm_errors() {
        assert!(matches!(parse_pgm(b"P5\n2 2\n255\n\x00"), Err(Error::Parse { .. })));
        assert!(matches!(parse_pgm(b"P5\n2"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_pgm(b"P5\n1 1\n65535\n\x00\x00"),
            Err(Error::UnsupportedDepth(_))
        ));
    }

    #[test]
    fn gray_mapping() {
        let s = GridShape::d1(3).unwrap();
        assert_eq!(to_gray(&IntensityGrid::new(s.clone(), vec![0.0; 3]).unwrap()).pixels, vec![0; 3]);
        assert_eq!(to_gray(&IntensityGrid::new(s.clone(), vec![2.5; 3]).unwrap()).pixels, vec![255; 3]);
        assert_eq!(to_gray(&IntensityGrid::new(s, vec![0.0, 1.0, 2.0]).unwrap()).pixels, vec![0, 128, 255]);
    }

    #[test]
    fn box_downscale() {
        let g = IntensityGrid::new(GridShape::d2(2, 4).unwrap(), vec![1.0, 3.0, 0.0, 0.0, 1.0, 3.0, 4.0, 4.0]).unwrap();
        let d = downscale(&g, &GridShape::d2(1, 2).unwrap()).unwrap();
        assert_eq!(d.as_slice(), &[2.0, 2.0]);
        let d = downscale(&g, &GridShape::d1(4).unwrap()).unwrap();
        assert_eq!(d.as_slice(), &[1.0, 3.0, 2.0, 2.0]);
        assert!(downscale(&g, &GridShape::d2(2, 3).unwrap()).is_err());
    }
}
