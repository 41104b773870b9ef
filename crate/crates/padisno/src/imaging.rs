//! Image-restoration building blocks: orthonormal multilevel Haar wavelets,
//! a periodic Gaussian blur operator with its adjoint, seeded noise
//! injection, ISNR and binary PGM (P5) reading/writing.
//!
//! Conventions fixed here and relied on elsewhere:
//!
//! * the Haar filters are orthonormal (`1/sqrt(2)` scaling), so synthesis is
//!   both the inverse and the adjoint of analysis and Parseval holds;
//! * blur kernels are nonnegative, sum to one and are symmetric under 180
//!   degree rotation; combined with periodic boundary handling this makes
//!   the blur operator self-adjoint with operator norm at most one, which
//!   is what the Lipschitz constant of the log-misfit objective needs;
//! * noise is generated from an explicit seed and is reproducible.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{DenseVector, Error, Result};

/// A grayscale image with row-major `f64` pixels, nominally in `[0, 1]`.
///
/// Values outside `[0, 1]` are allowed in intermediate computations (noise
/// is not clipped); they are clamped only when quantizing to PGM.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(
                "image dimensions must be positive".into(),
            ));
        }
        if pixels.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: pixels.len(),
            });
        }
        Ok(Image { rows, cols, pixels })
    }

    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        Image::new(rows, cols, vec![value; rows * cols]).expect("positive dimensions")
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                pixels.push(f(i, j));
            }
        }
        Image::new(rows, cols, pixels).expect("positive dimensions")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pixels[i * self.cols + j]
    }

    pub fn to_vector(&self) -> DenseVector {
        DenseVector::new(self.pixels.clone())
    }

    pub fn from_vector(rows: usize, cols: usize, v: &DenseVector) -> Result<Self> {
        Image::new(rows, cols, v.as_slice().to_vec())
    }

    /// Squared Frobenius distance, the building block of ISNR.
    pub fn distance_squared(&self, other: &Image) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.pixels.len(),
                actual: other.pixels.len(),
            });
        }
        Ok(self
            .pixels
            .iter()
            .zip(other.pixels.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }
}

/// Separable 2-D dyadic Haar wavelet transform with orthonormal filters.
///
/// Both dimensions must be divisible by `2^levels` (16 for the default four
/// levels). Coefficients are packed in place: each level leaves its detail
/// subbands in the lower/right quadrants and recurses on the top-left
/// approximation block, so the final layout stores every subband as a
/// contiguous rectangle of the row-major coefficient array.
#[derive(Debug, Clone)]
pub struct HaarTransform {
    rows: usize,
    cols: usize,
    levels: usize,
}

impl HaarTransform {
    /// Four-level transform, the configuration used by the restoration
    /// objective.
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        Self::with_levels(rows, cols, 4)
    }

    pub fn with_levels(rows: usize, cols: usize, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidParameter("levels must be >= 1".into()));
        }
        let factor = 1usize << levels;
        if rows == 0 || cols == 0 || rows % factor != 0 || cols % factor != 0 {
            return Err(Error::InvalidParameter(format!(
                "dimensions {rows}x{cols} must be positive and divisible by {factor} \
                 for {levels} dyadic levels"
            )));
        }
        Ok(HaarTransform { rows, cols, levels })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn pixel_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Forward transform of an image into the packed coefficient vector.
    pub fn analyze(&self, img: &Image) -> Result<DenseVector> {
        if img.rows() != self.rows || img.cols() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.pixel_count(),
                actual: img.rows() * img.cols(),
            });
        }
        let mut data = img.pixels().to_vec();
        self.forward(&mut data);
        Ok(DenseVector::new(data))
    }

    /// Inverse transform; exact inverse (and adjoint) of [`Self::analyze`].
    pub fn synthesize(&self, coeffs: &DenseVector) -> Result<Image> {
        let v = self.synthesize_vec(coeffs)?;
        Image::new(self.rows, self.cols, v.into_iter().collect())
    }

    /// Forward transform of a row-major pixel vector.
    pub fn analyze_vec(&self, v: &DenseVector) -> Result<DenseVector> {
        if v.dim() != self.pixel_count() {
            return Err(Error::DimensionMismatch {
                expected: self.pixel_count(),
                actual: v.dim(),
            });
        }
        let mut data = v.as_slice().to_vec();
        self.forward(&mut data);
        Ok(DenseVector::new(data))
    }

    pub fn synthesize_vec(&self, coeffs: &DenseVector) -> Result<DenseVector> {
        if coeffs.dim() != self.pixel_count() {
            return Err(Error::DimensionMismatch {
                expected: self.pixel_count(),
                actual: coeffs.dim(),
            });
        }
        let mut data = coeffs.as_slice().to_vec();
        self.inverse(&mut data);
        Ok(DenseVector::new(data))
    }

    fn forward(&self, data: &mut [f64]) {
        let mut r = self.rows;
        let mut c = self.cols;
        let mut scratch = vec![0.0; self.rows.max(self.cols)];
        for _ in 0..self.levels {
            for i in 0..r {
                forward_pairs(data, i * self.cols, 1, c, &mut scratch);
            }
            for j in 0..c {
                forward_pairs(data, j, self.cols, r, &mut scratch);
            }
            r /= 2;
            c /= 2;
        }
    }

    fn inverse(&self, data: &mut [f64]) {
        let mut scratch = vec![0.0; self.rows.max(self.cols)];
        for level in (0..self.levels).rev() {
            let r = self.rows >> level;
            let c = self.cols >> level;
            for j in 0..c {
                inverse_pairs(data, j, self.cols, r, &mut scratch);
            }
            for i in 0..r {
                inverse_pairs(data, i * self.cols, 1, c, &mut scratch);
            }
        }
    }
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// One orthonormal analysis step along a strided line of length `len`:
/// averages to the first half, differences to the second half.
fn forward_pairs(data: &mut [f64], base: usize, stride: usize, len: usize, scratch: &mut [f64]) {
    let half = len / 2;
    for k in 0..half {
        let a = data[base + 2 * k * stride];
        let b = data[base + (2 * k + 1) * stride];
        scratch[k] = (a + b) * SQRT_HALF;
        scratch[half + k] = (a - b) * SQRT_HALF;
    }
    for k in 0..len {
        data[base + k * stride] = scratch[k];
    }
}

fn inverse_pairs(data: &mut [f64], base: usize, stride: usize, len: usize, scratch: &mut [f64]) {
    let half = len / 2;
    for k in 0..half {
        let s = data[base + k * stride];
        let d = data[base + (half + k) * stride];
        scratch[2 * k] = (s + d) * SQRT_HALF;
        scratch[2 * k + 1] = (s - d) * SQRT_HALF;
    }
    for k in 0..len {
        data[base + k * stride] = scratch[k];
    }
}

/// Samples `exp(-(i^2 + j^2) / (2 sigma^2))` on the centered `size x size`
/// grid and normalizes the result to sum to one.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<Vec<f64>> {
    if size % 2 == 0 || size == 0 {
        return Err(Error::InvalidParameter(format!(
            "kernel size must be odd and positive, got {size}"
        )));
    }
    if sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let h = (size / 2) as isize;
    let mut kernel = Vec::with_capacity(size * size);
    for i in -h..=h {
        for j in -h..=h {
            kernel.push((-((i * i + j * j) as f64) / (2.0 * sigma * sigma)).exp());
        }
    }
    let sum: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }
    Ok(kernel)
}

/// Periodic 2-D convolution with a normalized, 180-degree-symmetric kernel.
///
/// The symmetry makes the operator self-adjoint and the normalization keeps
/// its operator norm at most one, so constant images are fixed points.
#[derive(Debug, Clone)]
pub struct BlurOperator {
    size: usize,
    kernel: Vec<f64>,
}

impl BlurOperator {
    pub fn new(kernel: Vec<f64>, size: usize) -> Result<Self> {
        if size % 2 == 0 || size == 0 || kernel.len() != size * size {
            return Err(Error::InvalidParameter(
                "kernel must be odd-sized and square".into(),
            ));
        }
        if kernel.iter().any(|&k| !(k >= 0.0)) {
            return Err(Error::InvalidParameter(
                "kernel entries must be nonnegative".into(),
            ));
        }
        let sum: f64 = kernel.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "kernel must sum to 1, got {sum}"
            )));
        }
        let n = kernel.len();
        for i in 0..n {
            if (kernel[i] - kernel[n - 1 - i]).abs() > 1e-15 {
                return Err(Error::InvalidParameter(
                    "kernel must be symmetric under 180 degree rotation".into(),
                ));
            }
        }
        Ok(BlurOperator { size, kernel })
    }

    /// The standard blur of the restoration experiment: 9x9, sigma 4.
    pub fn gaussian(size: usize, sigma: f64) -> Result<Self> {
        BlurOperator::new(gaussian_kernel(size, sigma)?, size)
    }

    /// The 1x1 identity kernel; useful for blur-free observations.
    pub fn identity() -> Self {
        BlurOperator {
            size: 1,
            kernel: vec![1.0],
        }
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn apply(&self, img: &Image) -> Image {
        let rows = img.rows();
        let cols = img.cols();
        let h = (self.size / 2) as isize;
        let mut out = Vec::with_capacity(rows * cols);
        for i in 0..rows as isize {
            for j in 0..cols as isize {
                let mut acc = 0.0;
                let mut k = 0;
                for di in -h..=h {
                    let ii = (i + di).rem_euclid(rows as isize) as usize;
                    for dj in -h..=h {
                        let jj = (j + dj).rem_euclid(cols as isize) as usize;
                        acc += self.kernel[k] * img.get(ii, jj);
                        k += 1;
                    }
                }
                out.push(acc);
            }
        }
        Image::new(rows, cols, out).expect("dimensions preserved")
    }

    /// Adjoint of [`Self::apply`]; identical because the kernel is
    /// 180-degree symmetric and the boundary is periodic.
    pub fn adjoint(&self, img: &Image) -> Image {
        self.apply(img)
    }
}

/// Adds i.i.d. zero-mean Gaussian noise with the given standard deviation.
/// No clipping is performed. Identical seeds give identical outputs.
pub fn add_gaussian_noise(img: &Image, sigma: f64, seed: u64) -> Image {
    assert!(sigma >= 0.0, "noise level must be nonnegative");
    if sigma == 0.0 {
        return img.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| p + normal.sample(&mut rng))
        .collect();
    Image::new(img.rows(), img.cols(), pixels).expect("dimensions preserved")
}

/// Salt-and-pepper corruption: each pixel is independently replaced, with
/// probability `density`, by 0 or 1 (equally likely). Seeded, no clipping
/// of the untouched pixels.
pub fn add_salt_pepper(img: &Image, density: f64, seed: u64) -> Result<Image> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!(
            "noise density must lie in [0, 1], got {density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| {
            if rng.gen::<f64>() < density {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    0.0
                }
            } else {
                p
            }
        })
        .collect();
    Image::new(img.rows(), img.cols(), pixels)
}

/// Improvement in signal-to-noise ratio in dB:
/// `10 log10( |x - b|^2 / |x - x_n|^2 )` for original `x`, observation `b`
/// and estimate `x_n`.
///
/// Degenerate inputs are reported as distinct errors rather than infinities:
/// an estimate equal to the original would be `+inf`, and an observation
/// equal to the original leaves the ratio undefined.
pub fn isnr(original: &Image, observed: &Image, estimate: &Image) -> Result<f64> {
    let observation_error = original.distance_squared(observed)?;
    let estimation_error = original.distance_squared(estimate)?;
    if observation_error == 0.0 {
        return Err(Error::InvalidParameter(
            "observed image equals the original; ISNR is undefined".into(),
        ));
    }
    if estimation_error == 0.0 {
        return Err(Error::InvalidParameter(
            "estimate equals the original; ISNR is infinite".into(),
        ));
    }
    Ok(10.0 * (observation_error / estimation_error).log10())
}

/// Reads a binary PGM (magic `P5`, maxval 255). Comment lines are tolerated
/// anywhere in the header. Pixels are normalized to `[0, 1]`.
pub fn pgm_read(path: impl AsRef<Path>) -> Result<Image> {
    pgm_read_from(&mut BufReader::new(std::fs::File::open(path)?))
}

pub fn pgm_read_from(reader: &mut impl BufRead) -> Result<Image> {
    let magic = pgm_token(reader)?;
    if magic != "P5" {
        return Err(Error::Format(format!(
            "expected binary PGM magic P5, got {magic:?}"
        )));
    }
    let cols: usize = pgm_dimension(&pgm_token(reader)?, "width")?;
    let rows: usize = pgm_dimension(&pgm_token(reader)?, "height")?;
    let maxval = pgm_token(reader)?;
    if maxval != "255" {
        return Err(Error::Format(format!(
            "only maxval 255 is supported, got {maxval}"
        )));
    }
    let mut raw = vec![0u8; rows * cols];
    reader.read_exact(&mut raw).map_err(|e| {
        Error::Format(format!("truncated pixel payload ({rows}x{cols}): {e}"))
    })?;
    let pixels = raw.iter().map(|&b| f64::from(b) / 255.0).collect();
    Image::new(rows, cols, pixels)
}

fn pgm_dimension(token: &str, what: &str) -> Result<usize> {
    let value: usize = token
        .parse()
        .map_err(|_| Error::Format(format!("bad {what}: {token:?}")))?;
    if value == 0 {
        return Err(Error::Format(format!("{what} must be positive")));
    }
    Ok(value)
}

/// Next whitespace-delimited header token, skipping `#` comments.
fn pgm_token(reader: &mut impl BufRead) -> Result<String> {
    let mut token = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        if reader.read(&mut byte)? == 0 {
            if token.is_empty() {
                return Err(Error::Format("unexpected end of header".into()));
            }
            break;
        }
        match byte[0] {
            b'#' if token.is_empty() => {
                // comment runs to end of line
                let mut skipped = Vec::new();
                reader.read_until(b'\n', &mut skipped)?;
            }
            b' ' | b'\t' | b'\r' | b'\n' => {
                if !token.is_empty() {
                    break;
                }
            }
            b => token.push(b),
        }
    }
    String::from_utf8(token).map_err(|_| Error::Format("non-ASCII header token".into()))
}

/// Writes a binary PGM (P5, maxval 255). Pixels are clamped to `[0, 1]` and
/// quantized; no comments are emitted, so `write . read` is the identity on
/// already-quantized images.
pub fn pgm_write(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = BufWriter::new(std::fs::File::create(path)?);
    pgm_write_to(img, &mut writer)?;
    writer.flush()?;
    Ok(())
}

pub fn pgm_write_to(img: &Image, writer: &mut impl Write) -> Result<()> {
    write!(writer, "P5\n{} {}\n255\n", img.cols(), img.rows())?;
    let bytes: Vec<u8> = img
        .pixels()
        .iter()
        .map(|&p| (p.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    writer.write_all(&bytes)?;
    Ok(())
}

/// Deterministic desk-scale test image: a smooth diagonal gradient, a bright
/// disk and a checkerboard patch, giving the restoration experiment both
/// smooth regions and sharp edges.
pub fn synthetic_image(rows: usize, cols: usize) -> Image {
    Image::from_fn(rows, cols, |i, j| {
        let u = i as f64 / rows as f64;
        let v = j as f64 / cols as f64;
        let mut value = 0.15 + 0.5 * (u + v) / 2.0;
        let (du, dv) = (u - 0.62, v - 0.66);
        if (du * du + dv * dv).sqrt() < 0.21 {
            value = 0.92;
        }
        if u < 0.45 && v < 0.45 {
            let cell = 8;
            value = if ((i / cell) + (j / cell)) % 2 == 0 {
                0.82
            } else {
                0.08
            };
        }
        value
    })
}
