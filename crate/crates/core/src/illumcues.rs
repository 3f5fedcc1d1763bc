//! Inter-channel dependence (Pearson, mutual information) and specular
//! highlight analysis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{Field, RasterImage};
use crate::stats::{coefficient_of_variation, mean};

/// Channels with a standard deviation at or below this are treated as constant.
pub const CONSTANT_CHANNEL_STD: f64 = 1e-9;

pub const DEFAULT_MI_BINS: usize = 32;

const OFF_DIAGONAL: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn require_rgb(img: &RasterImage) -> Result<[Field; 3]> {
    if img.channels() != 3 {
        return Err(Error::ChannelMismatch {
            expected: 3,
            actual: img.channels(),
        });
    }
    Ok([img.plane(0), img.plane(1), img.plane(2)])
}

/// Sample Pearson correlation, `None` if either input is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    let n = a.len() as f64;
    if n < 2.0 {
        return None;
    }
    let (sa, sb) = ((saa / (n - 1.0)).sqrt(), (sbb / (n - 1.0)).sqrt());
    if sa <= CONSTANT_CHANNEL_STD || sb <= CONSTANT_CHANNEL_STD {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// 3x3 Pearson matrix over the R, G, B planes; entries touching a constant
/// channel are `None`.
pub fn pearson_matrix(img: &RasterImage) -> Result<[[Option<f64>; 3]; 3]> {
    let planes = require_rgb(img)?;
    let mut m = [[None; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = pearson(planes[i].data(), planes[j].data());
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

#[inline]
fn bin_of(v: f64, bins: usize) -> usize {
    ((v * bins as f64).floor() as usize).min(bins - 1)
}

/// Mutual information in bits between two equally long samples in `[0, 1]`.
pub fn mutual_information(a: &[f64], b: &[f64], bins: usize) -> f64 {
    let n = a.len() as f64;
    let mut joint = vec![0usize; bins * bins];
    let mut pa = vec![0usize; bins];
    let mut pb = vec![0usize; bins];
    for (&x, &y) in a.iter().zip(b) {
        let (i, j) = (bin_of(x, bins), bin_of(y, bins));
        joint[i * bins + j] += 1;
        pa[i] += 1;
        pb[j] += 1;
    }
    let mut mi = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let c = joint[i * bins + j];
            if c == 0 {
                continue;
            }
            let pxy = c as f64 / n;
            let px = pa[i] as f64 / n;
            let py = pb[j] as f64 / n;
            mi += pxy * (pxy / (px * py)).log2();
        }
    }
    mi.max(0.0)
}

/// Shannon entropy (bits) of the `bins`-level histogram of `a`.
pub fn histogram_entropy(a: &[f64], bins: usize) -> f64 {
    let mut counts = vec![0usize; bins];
    for &v in a {
        counts[bin_of(v, bins)] += 1;
    }
    let n = a.len() as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

pub fn mutual_info_matrix(img: &RasterImage, bins: usize) -> Result<[[f64; 3]; 3]> {
    if bins < 2 {
        return Err(Error::InvalidParameter(format!("MI needs at least 2 bins, got {bins}")));
    }
    let planes = require_rgb(img)?;
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = mutual_information(planes[i].data(), planes[j].data(), bins);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelCorrelation {
    /// `None` marks an undefined correlation (constant channel).
    pub pearson: [[Option<f64>; 3]; 3],
    /// Bits.
    pub mutual_info: [[f64; 3]; 3],
    /// Mean over the defined entries of (R,G), (R,B), (G,B).
    pub off_diag_mean_pearson: Option<f64>,
    pub off_diag_mean_mi: f64,
}

pub fn channel_correlation(img: &RasterImage, mi_bins: usize) -> Result<ChannelCorrelation> {
    let pearson = pearson_matrix(img)?;
    let mutual_info = mutual_info_matrix(img, mi_bins)?;
    let defined: Vec<f64> = OFF_DIAGONAL.iter().filter_map(|&(i, j)| pearson[i][j]).collect();
    let off_diag_mean_pearson = (!defined.is_empty()).then(|| mean(&defined));
    let off_diag_mean_mi = OFF_DIAGONAL.iter().map(|&(i, j)| mutual_info[i][j]).sum::<f64>() / 3.0;
    Ok(ChannelCorrelation {
        pearson,
        mutual_info,
        off_diag_mean_pearson,
        off_diag_mean_mi,
    })
}

/// Genuine-minus-spoof gap of the mean off-diagonal statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeparation {
    pub delta_pearson: f64,
    pub delta_mi: f64,
}

pub fn correlation_separation(
    genuine: &[ChannelCorrelation],
    spoof: &[ChannelCorrelation],
) -> Result<CorrelationSeparation> {
    if genuine.is_empty() {
        return Err(Error::EmptyClass("genuine".into()));
    }
    if spoof.is_empty() {
        return Err(Error::EmptyClass("spoof".into()));
    }
    let class_means = |set: &[ChannelCorrelation]| -> Result<(f64, f64)> {
        let p: Vec<f64> = set.iter().filter_map(|c| c.off_diag_mean_pearson).collect();
        if p.is_empty() {
            return Err(Error::EmptyClass("no defined Pearson correlations".into()));
        }
        let mi: Vec<f64> = set.iter().map(|c| c.off_diag_mean_mi).collect();
        Ok((mean(&p), mean(&mi)))
    };
    let (gp, gm) = class_means(genuine)?;
    let (sp, sm) = class_means(spoof)?;
    Ok(CorrelationSeparation {
        delta_pearson: gp - sp,
        delta_mi: gm - sm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpecularConfig {
    pub intensity_thresh: f64,
    pub texture_window: usize,
    pub texture_thresh: f64,
}

impl Default for SpecularConfig {
    fn default() -> Self {
        Self {
            intensity_thresh: 0.9,
            texture_window: 5,
            texture_thresh: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecularReport {
    /// Fraction of highlight pixels.
    pub shr: f64,
    pub width: usize,
    pub height: usize,
    #[serde(skip)]
    pub highlight_mask: Vec<bool>,
    pub component_count: usize,
    /// Coefficient of variation of component sizes (0 for fewer than two components).
    pub component_size_cv: f64,
}

/// Population std of the grayscale values inside the window centred at
/// `(x, y)`, clipped to the image.
fn window_std(gray: &Field, x: usize, y: usize, half: usize) -> f64 {
    let x0 = x.saturating_sub(half);
    let y0 = y.saturating_sub(half);
    let x1 = (x + half).min(gray.width() - 1);
    let y1 = (y + half).min(gray.height() - 1);
    let mut sum = 0.0;
    let mut n = 0usize;
    for yy in y0..=y1 {
        for xx in x0..=x1 {
            sum += gray.get(xx, yy);
            n += 1;
        }
    }
    let m = sum / n as f64;
    let mut ss = 0.0;
    for yy in y0..=y1 {
        for xx in x0..=x1 {
            let d = gray.get(xx, yy) - m;
            ss += d * d;
        }
    }
    (ss / n as f64).sqrt()
}

/// Sizes of the 8-connected components of `mask` in raster-scan discovery order.
pub fn connected_component_sizes(mask: &[bool], width: usize, height: usize) -> Vec<usize> {
    let mut seen = vec![false; mask.len()];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut size = 0;
        while let Some(p) = stack.pop() {
            size += 1;
            let (px, py) = ((p % width) as isize, (p / width) as isize);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (px + dx, py + dy);
                    if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                        continue;
                    }
                    let q = ny as usize * width + nx as usize;
                    if mask[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

/// Pixels bright in every channel and locally textureless.
pub fn specular_highlight_ratio(img: &RasterImage, config: &SpecularConfig) -> Result<SpecularReport> {
    if img.channels() != 3 {
        return Err(Error::ChannelMismatch {
            expected: 3,
            actual: img.channels(),
        });
    }
    if config.texture_window < 3 || config.texture_window.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "texture window must be odd and >= 3, got {}",
            config.texture_window
        )));
    }
    let gray = img.luminance();
    let (w, h) = (img.width(), img.height());
    let half = config.texture_window / 2;
    let mut mask = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let bright = (0..3).all(|c| img.get(x, y, c) >= config.intensity_thresh);
            if bright && window_std(&gray, x, y, half) < config.texture_thresh {
                mask[y * w + x] = true;
            }
        }
    }
    let count = mask.iter().filter(|&&m| m).count();
    let sizes: Vec<f64> = connected_component_sizes(&mask, w, h)
        .into_iter()
        .map(|s| s as f64)
        .collect();
    let component_size_cv = if sizes.len() < 2 {
        0.0
    } else {
        coefficient_of_variation(&sizes)
    };
    Ok(SpecularReport {
        shr: count as f64 / (w * h) as f64,
        width: w,
        height: h,
        highlight_mask: mask,
        component_count: sizes.len(),
        component_size_cv,
    })
}
