//! Image containers, block tiling, gradients and spectral helpers shared by
//! every metric module.
//!
//! Intensities are `f64` in `[0, 1]`, row-major, channel-interleaved. Scalar
//! maps that may leave that range (gradients, spectra, differentials) live in
//! [`Field`].

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Luma weights for RGB to grayscale conversion.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Dense single-channel `f64` grid without any range constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "field data length {} != {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Read with coordinates clamped to the grid (replicate padding).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    /// Bilinear sample with replicate padding outside the grid.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (xi, yi) = (x0 as isize, y0 as isize);
        let a = self.get_clamped(xi, yi);
        let b = self.get_clamped(xi + 1, yi);
        let c = self.get_clamped(xi, yi + 1);
        let d = self.get_clamped(xi + 1, yi + 1);
        let top = a + (b - a) * fx;
        let bottom = c + (d - c) * fx;
        top + (bottom - top) * fy
    }

    /// Copy of the rectangle `[x0, x0 + w) x [y0, y0 + h)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Field {
        assert!(x0 + w <= self.width && y0 + h <= self.height);
        let mut data = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            let row = y * self.width;
            data.extend_from_slice(&self.data[row + x0..row + x0 + w]);
        }
        Field {
            width: w,
            height: h,
            data,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        crate::stats::mean(&self.data)
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        crate::stats::variance(&self.data)
    }
}

/// Row-major, channel-interleaved raster with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!("unsupported channel count {channels}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("empty image".into()));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "data length {} != {}x{}x{}",
                data.len(),
                width,
                height,
                channels
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidImage(format!("intensity {v} outside [0,1]")));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Build from 8-bit samples, dividing by 255.
    pub fn from_u8(width: usize, height: usize, channels: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(
            width,
            height,
            channels,
            bytes.iter().map(|&b| b as f64 / 255.0).collect(),
        )
    }

    /// Grayscale image from a closure; output is clamped into `[0, 1]`.
    pub fn gray_from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Self {
            width,
            height,
            channels: 1,
            data,
        }
    }

    /// RGB image from a closure; output is clamped into `[0, 1]`.
    pub fn rgb_from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend(f(x, y).iter().map(|v| v.clamp(0.0, 1.0)));
            }
        }
        Self {
            width,
            height,
            channels: 3,
            data,
        }
    }

    /// RGB image from three equally sized planes, clamped into `[0, 1]`.
    pub fn from_planes(r: &Field, g: &Field, b: &Field) -> Result<Self> {
        let (w, h) = (r.width(), r.height());
        if g.width() != w || g.height() != h || b.width() != w || b.height() != h {
            return Err(Error::InvalidImage("plane dimensions differ".into()));
        }
        Ok(Self::rgb_from_fn(w, h, |x, y| [r.get(x, y), g.get(x, y), b.get(x, y)]))
    }

    /// Grayscale image from a field, clamped into `[0, 1]`.
    pub fn from_field(field: &Field) -> Self {
        Self::gray_from_fn(field.width(), field.height(), |x, y| field.get(x, y))
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    pub fn same_shape(&self, other: &RasterImage) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    /// Extract one channel plane.
    pub fn plane(&self, c: usize) -> Field {
        assert!(c < self.channels, "channel {c} out of range");
        Field {
            width: self.width,
            height: self.height,
            data: self.data.iter().skip(c).step_by(self.channels).copied().collect(),
        }
    }

    /// Luminance plane (the image itself for 1-channel input).
    pub fn luminance(&self) -> Field {
        let gray = to_grayscale(self);
        Field {
            width: gray.width,
            height: gray.height,
            data: gray.data,
        }
    }

    /// Quantize to 8-bit samples (`round(v * 255)`).
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize_u8(v)).collect()
    }

    /// Snap every intensity onto the 8-bit grid `k / 255`.
    pub fn quantized(&self) -> RasterImage {
        RasterImage {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data: self.data.iter().map(|&v| quantize_u8(v) as f64 / 255.0).collect(),
        }
    }
}

#[inline]
pub fn quantize_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Luminance `Y = 0.299 R + 0.587 G + 0.114 B`; 1-channel input is returned unchanged.
pub fn to_grayscale(img: &RasterImage) -> RasterImage {
    if img.channels == 1 {
        return img.clone();
    }
    let data = img
        .data
        .chunks_exact(3)
        .map(|px| (LUMA_WEIGHTS[0] * px[0] + LUMA_WEIGHTS[1] * px[1] + LUMA_WEIGHTS[2] * px[2]).clamp(0.0, 1.0))
        .collect();
    RasterImage {
        width: img.width,
        height: img.height,
        channels: 1,
        data,
    }
}

pub(crate) fn require_min_size(field: &Field, min: usize) -> Result<()> {
    if field.width() < min || field.height() < min {
        return Err(Error::ImageTooSmall {
            width: field.width(),
            height: field.height(),
            min,
        });
    }
    Ok(())
}

/// 3x3 Sobel gradients with replicate padding.
///
/// `gx` uses `[-1 0 1; -2 0 2; -1 0 1]` applied as a correlation, so a ramp
/// `I(x, y) = s * x` yields `gx = 8 s` in the interior.
pub fn sobel_gradients(img: &Field) -> Result<(Field, Field)> {
    require_min_size(img, 3)?;
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut gx = Field::zeros(img.width(), img.height());
    let mut gy = Field::zeros(img.width(), img.height());
    for y in 0..h {
        for x in 0..w {
            let p = |dx: isize, dy: isize| img.get_clamped(x + dx, y + dy);
            let vx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let vy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            gx.set(x as usize, y as usize, vx);
            gy.set(x as usize, y as usize, vy);
        }
    }
    Ok((gx, gy))
}

/// Separable Gaussian blur with replicate padding. `sigma <= 0` is the identity.
pub fn gaussian_blur(img: &Field, sigma: f64) -> Field {
    if sigma <= 0.0 {
        return img.clone();
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= norm);

    let (w, h) = (img.width(), img.height());
    let mut tmp = Field::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, i) in kernel.iter().zip(-radius..=radius) {
                acc += k * img.get_clamped(x as isize + i, y as isize);
            }
            tmp.set(x, y, acc);
        }
    }
    let mut out = Field::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, i) in kernel.iter().zip(-radius..=radius) {
                acc += k * tmp.get_clamped(x as isize, y as isize + i);
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Non-overlapping square tiling anchored at the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub block_size: usize,
    pub cols: usize,
    pub rows: usize,
}

impl BlockLayout {
    #[inline]
    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Top-left pixel of block `index` (row-major block order).
    #[inline]
    pub fn origin(&self, index: usize) -> (usize, usize) {
        let (col, row) = (index % self.cols, index / self.cols);
        (col * self.block_size, row * self.block_size)
    }

    /// Pixel copy of block `index`.
    pub fn block(&self, field: &Field, index: usize) -> Field {
        let (x0, y0) = self.origin(index);
        field.crop(x0, y0, self.block_size, self.block_size)
    }

    pub fn blocks<'a>(&'a self, field: &'a Field) -> impl Iterator<Item = Field> + 'a {
        (0..self.len()).map(move |i| self.block(field, i))
    }
}

/// Tile `img` into `block_size` squares; trailing partial blocks are dropped.
pub fn block_partition(img: &Field, block_size: usize) -> Result<BlockLayout> {
    layout_for(img.width(), img.height(), block_size, 8)
}

pub(crate) fn layout_for(width: usize, height: usize, block_size: usize, min_block: usize) -> Result<BlockLayout> {
    if block_size < min_block {
        return Err(Error::InvalidParameter(format!(
            "block size {block_size} below minimum {min_block}"
        )));
    }
    let cols = width / block_size;
    let rows = height / block_size;
    if cols == 0 || rows == 0 {
        return Err(Error::BlockTooLarge {
            block: block_size,
            width,
            height,
        });
    }
    Ok(BlockLayout { block_size, cols, rows })
}

/// Per-block scalar map with a validity flag per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockGrid {
    pub layout: BlockLayout,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl BlockGrid {
    pub fn new(layout: BlockLayout, values: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if values.len() != layout.len() || valid.len() != layout.len() {
            return Err(Error::InvalidParameter(format!(
                "block grid expects {} values",
                layout.len()
            )));
        }
        Ok(Self { layout, values, valid })
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Mean over valid blocks, `None` when there are none.
    pub fn valid_mean(&self) -> Option<f64> {
        let n = self.valid_count();
        if n == 0 {
            return None;
        }
        let sum: f64 = self
            .values
            .iter()
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .map(|(v, _)| v)
            .sum();
        Some(sum / n as f64)
    }
}

/// Forward 2-D DFT (unnormalized, DC at index 0).
pub fn fft2(field: &Field) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = field.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_in_place(&mut buf, field.width(), field.height(), false);
    buf
}

/// In-place 2-D DFT over a row-major `width x height` buffer. The inverse is
/// unnormalized as well.
pub fn fft2_in_place(buf: &mut [Complex64], width: usize, height: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(width)
    } else {
        planner.plan_fft_forward(width)
    };
    for row in buf.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let col_fft = if inverse {
        planner.plan_fft_inverse(height)
    } else {
        planner.plan_fft_forward(height)
    };
    let mut col = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            col[y] = buf[y * width + x];
        }
        col_fft.process(&mut col);
        for y in 0..height {
            buf[y * width + x] = col[y];
        }
    }
}

/// `log(1 + |F|)` of the mean-subtracted image, with DC moved to `(w/2, h/2)`.
pub fn fft2_logmag(img: &Field) -> Field {
    let mean = img.mean();
    let centered = img.map(|v| v - mean);
    let spectrum = fft2(&centered);
    let (w, h) = (img.width(), img.height());
    let mut out = Field::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mag = spectrum[y * w + x].norm();
            out.set((x + w / 2) % w, (y + h / 2) % h, mag.ln_1p());
        }
    }
    out
}

/// Radially averaged profile around the centre `(w/2, h/2)`.
///
/// Each pixel's radius is rounded to the nearest integer `r`; pixels with
/// `r < R = min(w, h) / 2` fall into bin `floor(r * n_bins / R)`. Empty bins
/// report 0.
pub fn radial_spectrum(logmag: &Field, n_bins: usize) -> Result<Vec<f64>> {
    if n_bins < 4 {
        return Err(Error::InvalidParameter(format!(
            "radial spectrum needs at least 4 bins, got {n_bins}"
        )));
    }
    let (w, h) = (logmag.width(), logmag.height());
    let (cx, cy) = ((w / 2) as f64, (h / 2) as f64);
    let r_max = (w.min(h) / 2) as f64;
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    if r_max == 0.0 {
        return Ok(sums);
    }
    for y in 0..h {
        for x in 0..w {
            let r = (x as f64 - cx).hypot(y as f64 - cy).round();
            if r >= r_max {
                continue;
            }
            let bin = ((r * n_bins as f64) / r_max).floor() as usize;
            sums[bin] += logmag.get(x, y);
            counts[bin] += 1;
        }
    }
    Ok(sums
        .into_iter()
        .zip(counts)
        .map(|(s, c)| if c == 0 { 0.0 } else { s / c as f64 })
        .collect())
}

/// Ground-truth class of a capture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaptureClass {
    Genuine,
    Spoof,
}

impl CaptureClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CaptureClass::Genuine => "genuine",
            CaptureClass::Spoof => "spoof",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "genuine" => Some(CaptureClass::Genuine),
            "spoof" => Some(CaptureClass::Spoof),
            _ => None,
        }
    }
}

/// Presentation attack instrument family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaiType {
    None,
    Print,
    Screen,
    Molded,
    Model3d,
}

impl PaiType {
    pub const ALL: [PaiType; 5] = [
        PaiType::None,
        PaiType::Print,
        PaiType::Screen,
        PaiType::Molded,
        PaiType::Model3d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PaiType::None => "none",
            PaiType::Print => "print",
            PaiType::Screen => "screen",
            PaiType::Molded => "molded",
            PaiType::Model3d => "model3d",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureLabel {
    pub pair_id: String,
    pub subject_id: String,
    pub session: u32,
    pub class: CaptureClass,
    pub pai_type: PaiType,
}

impl CaptureLabel {
    pub fn new(
        pair_id: impl Into<String>,
        subject_id: impl Into<String>,
        session: u32,
        class: CaptureClass,
        pai_type: PaiType,
    ) -> Result<Self> {
        let label = Self {
            pair_id: pair_id.into(),
            subject_id: subject_id.into(),
            session,
            class,
            pai_type,
        };
        label.validate()?;
        Ok(label)
    }

    /// `genuine` iff `pai_type == none`.
    pub fn validate(&self) -> Result<()> {
        let consistent = (self.class == CaptureClass::Genuine) == (self.pai_type == PaiType::None);
        if !consistent {
            return Err(Error::InvalidParameter(format!(
                "label {} inconsistent with pai_type {}",
                self.class.as_str(),
                self.pai_type.as_str()
            )));
        }
        Ok(())
    }
}

/// Flash and non-flash captures of one presentation.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedCapture {
    pub flash: RasterImage,
    pub nonflash: RasterImage,
    pub label: CaptureLabel,
}

impl PairedCapture {
    pub fn new(flash: RasterImage, nonflash: RasterImage, label: CaptureLabel) -> Result<Self> {
        if !flash.same_shape(&nonflash) {
            return Err(Error::InvalidImage(format!(
                "flash {}x{}x{} and non-flash {}x{}x{} differ",
                flash.width(),
                flash.height(),
                flash.channels(),
                nonflash.width(),
                nonflash.height(),
                nonflash.channels()
            )));
        }
        label.validate()?;
        Ok(Self { flash, nonflash, label })
    }
}
