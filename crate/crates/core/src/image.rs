//! RGB rasters as pure quaternion matrices, with PPM input and output.
//!
//! Channels are stored as reals in `[0, 1]`; R, G and B go to the i, j and
//! k components. Binary (P6) and ASCII (P3) PPM are read, with 16-bit
//! samples when the maximum value exceeds 255. Output is always P6.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::files::write_atomic;
use crate::matrix::QuatMatrix;

/// Real parts below this norm are treated as rounding noise when
/// converting a matrix back to an image.
pub const PURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    width: usize,
    height: usize,
    bit_depth: u8,
    channels: [Array2<f64>; 3],
}

impl ImageTensor {
    /// Channels are `height × width` planes with values in `[0, 1]`.
    pub fn new(channels: [Array2<f64>; 3], bit_depth: u8) -> Result<Self> {
        if bit_depth != 8 && bit_depth != 16 {
            return Err(Error::Image(format!("bit depth {bit_depth} (expected 8 or 16)")));
        }
        let (height, width) = channels[0].dim();
        if height == 0 || width == 0 {
            return Err(Error::Image("empty image".into()));
        }
        if channels.iter().any(|c| c.dim() != (height, width)) {
            return Err(Error::Image("channel planes differ in shape".into()));
        }
        if channels.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Image("channel value outside [0, 1]".into()));
        }
        Ok(ImageTensor {
            width,
            height,
            bit_depth,
            channels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn channels(&self) -> &[Array2<f64>; 3] {
        &self.channels
    }

    fn maxval(&self) -> u32 {
        if self.bit_depth == 8 { 255 } else { 65535 }
    }

    pub fn read_ppm(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse_ppm(&bytes).map_err(|e| match e {
            Error::Image(msg) => Error::Image(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse_ppm(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        let magic = cur.token()?;
        let binary = match magic.as_str() {
            "P6" => true,
            "P3" => false,
            other => return Err(Error::Image(format!("unsupported magic {other:?} (expected P6 or P3)"))),
        };
        let width = cur.number()?;
        let height = cur.number()?;
        let maxval = cur.number()?;
        if width == 0 || height == 0 {
            return Err(Error::Image(format!("invalid size {width}x{height}")));
        }
        if maxval == 0 || maxval > 65535 {
            return Err(Error::Image(format!("invalid maximum value {maxval}")));
        }
        let count = width
            .checked_mul(height)
            .and_then(|p| p.checked_mul(3))
            .ok_or_else(|| Error::Image("image too large".into()))?;
        let samples: Vec<u32> = if binary {
            // exactly one whitespace byte separates the header from the raster
            cur.pos += 1;
            let wide = maxval > 255;
            let need = count * if wide { 2 } else { 1 };
            let raster = bytes
                .get(cur.pos..cur.pos + need)
                .ok_or_else(|| Error::Image(format!("raster truncated: expected {need} bytes")))?;
            if wide {
                raster.chunks_exact(2).map(|b| u32::from(u16::from_be_bytes([b[0], b[1]]))).collect()
            } else {
                raster.iter().map(|&b| u32::from(b)).collect()
            }
        } else {
            (0..count).map(|_| cur.number().map(|v| v as u32)).collect::<Result<_>>()?
        };
        if let Some(&bad) = samples.iter().find(|&&s| s as usize > maxval) {
            return Err(Error::Image(format!("sample {bad} exceeds maximum value {maxval}")));
        }
        let scale = maxval as f64;
        let channels = std::array::from_fn(|c| {
            Array2::from_shape_fn((height, width), |(i, j)| samples[3 * (i * width + j) + c] as f64 / scale)
        });
        Self::new(channels, if maxval > 255 { 16 } else { 8 })
    }

    /// Binary PPM; channel values are rounded to the nearest level.
    pub fn to_ppm(&self) -> Vec<u8> {
        let maxval = self.maxval();
        let mut out = format!("P6\n{} {}\n{}\n", self.width, self.height, maxval).into_bytes();
        for i in 0..self.height {
            for j in 0..self.width {
                for c in &self.channels {
                    let q = (c[[i, j]] * maxval as f64).round() as u32;
                    if self.bit_depth == 8 {
                        out.push(q as u8);
                    } else {
                        out.extend_from_slice(&(q as u16).to_be_bytes());
                    }
                }
            }
        }
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_ppm())
    }

    /// Values after quantization to this image's bit depth.
    pub fn quantized(&self) -> ImageTensor {
        let maxval = self.maxval() as f64;
        let channels = self.channels.clone().map(|c| c.mapv(|v| (v * maxval).round() / maxval));
        ImageTensor { channels, ..*self }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<String> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Image("unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.token()?;
        t.parse().map_err(|_| Error::Image(format!("expected a number, found {t:?}")))
    }
}

/// `A = R·i + G·j + B·k` as a `height × width` matrix.
pub fn image_to_quat(img: &ImageTensor) -> QuatMatrix {
    let [r, g, b] = img.channels.clone();
    QuatMatrix::from_parts_unchecked([Array2::zeros((img.height, img.width)), r, g, b])
}

/// Inverse of [`image_to_quat`]. The real part must vanish (norm below
/// [`PURE_TOLERANCE`]); the imaginary parts are clamped to `[0, 1]`.
pub fn quat_to_image(a: &QuatMatrix, bit_depth: u8) -> Result<ImageTensor> {
    let re = a.real_part_norm();
    if re >= PURE_TOLERANCE {
        return Err(Error::NotPure(re));
    }
    if a.parts().iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("image matrix"));
    }
    let channels = std::array::from_fn(|c| a.part(c + 1).mapv(|v| v.clamp(0.0, 1.0)));
    ImageTensor::new(channels, bit_depth)
}

/// Peak signal-to-noise ratio in dB with peak value 1.
pub fn psnr(reference: &ImageTensor, test: &ImageTensor) -> Result<f64> {
    if (reference.height, reference.width) != (test.height, test.width) {
        return Err(Error::DimensionMismatch {
            op: "psnr",
            left: (reference.height, reference.width),
            right: (test.height, test.width),
        });
    }
    let n = (3 * reference.height * reference.width) as f64;
    let sse: f64 = reference
        .channels
        .iter()
        .zip(&test.channels)
        .map(|(a, b)| (a - b).mapv(|d| d * d).sum())
        .sum();
    Ok(10.0 * (n / sse).log10())
}
