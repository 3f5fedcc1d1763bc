//! Texture descriptors: LBP histograms, GLCM statistics, spectral realism
//! ratio, and their flash/non-flash deltas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{fft2, fft2_logmag, layout_for, radial_spectrum, require_min_size, Field};

/// Neighbour offsets `(dx, dy)` for LBP bits 0..8: east first, then
/// counter-clockwise (north is `dy = -1`).
pub const LBP_NEIGHBOURS: [(isize, isize); 8] = [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TextureConfig {
    pub glcm_levels: usize,
    pub glcm_offsets: Vec<(isize, isize)>,
    pub realism_block: usize,
    pub peak_factor: f64,
    pub radial_bins: usize,
}

impl Default for TextureConfig {
    fn default() -> Self {
        Self {
            glcm_levels: 16,
            glcm_offsets: vec![(1, 0), (0, 1)],
            realism_block: 32,
            peak_factor: 4.0,
            radial_bins: 16,
        }
    }
}

/// LBP code of the interior pixel `(x, y)`.
#[inline]
pub fn lbp_code(img: &Field, x: usize, y: usize) -> u8 {
    let center = img.get(x, y);
    let mut code = 0u8;
    for (bit, &(dx, dy)) in LBP_NEIGHBOURS.iter().enumerate() {
        let n = img.get((x as isize + dx) as usize, (y as isize + dy) as usize);
        if n >= center {
            code |= 1 << bit;
        }
    }
    code
}

/// Normalized 256-bin histogram of 8-neighbour, radius-1 LBP codes over
/// interior pixels.
pub fn lbp_histogram(img: &Field) -> Result<Vec<f64>> {
    require_min_size(img, 3)?;
    let mut hist = vec![0.0; 256];
    let (w, h) = (img.width(), img.height());
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            hist[lbp_code(img, x, y) as usize] += 1.0;
        }
    }
    let n = ((w - 2) * (h - 2)) as f64;
    hist.iter_mut().for_each(|v| *v /= n);
    Ok(hist)
}

/// Haralick statistics of one symmetric, normalized co-occurrence matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlcmFeatures {
    pub offset: (isize, isize),
    pub contrast: f64,
    pub homogeneity: f64,
    pub energy: f64,
    /// `None` for single-level matrices.
    pub correlation: Option<f64>,
}

#[inline]
pub fn quantize_level(v: f64, levels: usize) -> usize {
    ((v * levels as f64).floor().max(0.0) as usize).min(levels - 1)
}

/// Symmetric normalized co-occurrence matrix (`levels x levels`, row-major).
pub fn glcm_matrix(img: &Field, levels: usize, offset: (isize, isize)) -> Result<Vec<f64>> {
    if levels < 2 {
        return Err(Error::InvalidParameter(format!(
            "GLCM needs at least 2 levels, got {levels}"
        )));
    }
    let (w, h) = (img.width() as isize, img.height() as isize);
    let (dx, dy) = offset;
    let mut m = vec![0.0; levels * levels];
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w || ny >= h {
                continue;
            }
            let i = quantize_level(img.get(x as usize, y as usize), levels);
            let j = quantize_level(img.get(nx as usize, ny as usize), levels);
            m[i * levels + j] += 1.0;
            m[j * levels + i] += 1.0;
            total += 2.0;
        }
    }
    if total == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "offset {offset:?} leaves no pixel pairs"
        )));
    }
    m.iter_mut().for_each(|v| *v /= total);
    Ok(m)
}

pub fn glcm_statistics(p: &[f64], levels: usize, offset: (isize, isize)) -> GlcmFeatures {
    let (mut contrast, mut homogeneity, mut energy, mut mu) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..levels {
        for j in 0..levels {
            let v = p[i * levels + j];
            let d = i as f64 - j as f64;
            contrast += v * d * d;
            homogeneity += v / (1.0 + d.abs());
            energy += v * v;
            mu += v * i as f64;
        }
    }
    // symmetric matrix: row and column marginals coincide
    let mut var = 0.0;
    let mut cov = 0.0;
    for i in 0..levels {
        for j in 0..levels {
            let v = p[i * levels + j];
            var += v * (i as f64 - mu) * (i as f64 - mu);
            cov += v * (i as f64 - mu) * (j as f64 - mu);
        }
    }
    let correlation = (var > 1e-15).then(|| (cov / var).clamp(-1.0, 1.0));
    GlcmFeatures {
        offset,
        contrast,
        homogeneity,
        energy,
        correlation,
    }
}

pub fn glcm_features(img: &Field, levels: usize, offsets: &[(isize, isize)]) -> Result<Vec<GlcmFeatures>> {
    offsets
        .iter()
        .map(|&o| Ok(glcm_statistics(&glcm_matrix(img, levels, o)?, levels, o)))
        .collect()
}

/// Whether a block spectrum has a dominant high-frequency peak.
///
/// The strongest non-DC bin must exceed `peak_factor` times the mean non-DC
/// magnitude and lie beyond a quarter of the Nyquist radius.
pub fn block_has_dominant_peak(block: &Field, peak_factor: f64) -> bool {
    let mean = block.mean();
    let spec = fft2(&block.map(|v| v - mean));
    let (w, h) = (block.width(), block.height());
    let nyquist = (w.min(h) as f64) / 2.0;
    let (mut best, mut best_radius, mut sum) = (0.0f64, 0.0f64, 0.0f64);
    let mut n = 0usize;
    for v in 0..h {
        for u in 0..w {
            if u == 0 && v == 0 {
                continue;
            }
            let mag = spec[v * w + u].norm();
            sum += mag;
            n += 1;
            if mag > best {
                best = mag;
                let fu = u.min(w - u) as f64;
                let fv = v.min(h - v) as f64;
                best_radius = fu.hypot(fv);
            }
        }
    }
    if n == 0 || sum <= 0.0 {
        return false;
    }
    best > peak_factor * (sum / n as f64) && best_radius > nyquist / 4.0
}

/// Fraction of blocks with a dominant high-frequency spectral peak.
pub fn texture_realism_ratio(img: &Field, block: usize, peak_factor: f64) -> Result<f64> {
    let layout = layout_for(img.width(), img.height(), block, 4)?;
    let dominant = layout
        .blocks(img)
        .filter(|b| block_has_dominant_peak(b, peak_factor))
        .count();
    Ok(dominant as f64 / layout.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextureDescriptors {
    pub config: TextureConfig,
    pub lbp_hist: Vec<f64>,
    pub glcm: Vec<GlcmFeatures>,
    pub realism_ratio: f64,
    pub radial_profile: Vec<f64>,
}

impl TextureDescriptors {
    /// Contrast, homogeneity, energy, correlation per offset; undefined
    /// correlations contribute 0.
    pub fn glcm_vector(&self) -> Vec<f64> {
        self.glcm
            .iter()
            .flat_map(|g| [g.contrast, g.homogeneity, g.energy, g.correlation.unwrap_or(0.0)])
            .collect()
    }
}

pub fn texture_descriptors(img: &Field, config: &TextureConfig) -> Result<TextureDescriptors> {
    Ok(TextureDescriptors {
        config: config.clone(),
        lbp_hist: lbp_histogram(img)?,
        glcm: glcm_features(img, config.glcm_levels, &config.glcm_offsets)?,
        realism_ratio: texture_realism_ratio(img, config.realism_block, config.peak_factor)?,
        radial_profile: radial_spectrum(&fft2_logmag(img), config.radial_bins)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextureDelta {
    pub lbp: f64,
    pub glcm: f64,
    pub fourier: f64,
}

/// Chi-square distance `sum (a - b)^2 / (a + b)`, skipping empty cells.
pub fn chi_square_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, y)| *x + *y > 0.0)
        .map(|(x, y)| (x - y) * (x - y) / (x + y))
        .sum()
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn unit_sum(v: &[f64]) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    if s == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / s).collect()
    }
}

pub fn texture_delta(flash: &TextureDescriptors, nonflash: &TextureDescriptors) -> Result<TextureDelta> {
    if flash.config != nonflash.config
        || flash.lbp_hist.len() != nonflash.lbp_hist.len()
        || flash.radial_profile.len() != nonflash.radial_profile.len()
    {
        return Err(Error::ConfigMismatch);
    }
    Ok(TextureDelta {
        lbp: chi_square_distance(&flash.lbp_hist, &nonflash.lbp_hist),
        glcm: l2(&flash.glcm_vector(), &nonflash.glcm_vector()),
        fourier: l2(&unit_sum(&flash.radial_profile), &unit_sum(&nonflash.radial_profile)),
    })
}
