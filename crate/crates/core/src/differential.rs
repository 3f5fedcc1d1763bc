//! Flash-minus-non-flash differential imaging and the material proxies built
//! on it: subsurface smoothness, ridge amplitude variation and highlight
//! irregularity.
//!
//! All inputs are grayscale fields. Pairs are registered by integer phase
//! correlation, the non-flash frame is gain-matched by the ratio of medians,
//! and the residual is analysed for ridge coherence.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::illumcues::SpecularReport;
use crate::imgcore::{fft2, fft2_in_place, Field};
use crate::quality::{ocl_map, OclMap};
use crate::stats::{coefficient_of_variation, median, percentile};

/// Correlation peaks below this are reported as alignment failures.
pub const MIN_ALIGNMENT_PEAK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DifferentialConfig {
    pub max_shift: usize,
    pub structure_block: usize,
}

impl Default for DifferentialConfig {
    fn default() -> Self {
        Self {
            max_shift: 16,
            structure_block: 16,
        }
    }
}

/// Integer translation of the non-flash frame relative to the flash frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub dx: i32,
    pub dy: i32,
    /// Normalized phase-correlation peak in `[0, 1]`.
    pub peak: f64,
}

/// Phase correlation restricted to `|dx|, |dy| <= max_shift`.
///
/// Returns `d` such that `nonflash(x) ~ flash(x - d)`.
pub fn align_pair(flash: &Field, nonflash: &Field, max_shift: usize) -> Result<Alignment> {
    let (w, h) = (flash.width(), flash.height());
    if nonflash.width() != w || nonflash.height() != h {
        return Err(Error::InvalidImage("alignment needs equally sized frames".into()));
    }
    let fm = flash.mean();
    let nm = nonflash.mean();
    let ff = fft2(&flash.map(|v| v - fm));
    let fnf = fft2(&nonflash.map(|v| v - nm));
    let mut cross: Vec<Complex64> = fnf.iter().zip(&ff).map(|(a, b)| a * b.conj()).collect();
    let scale = cross.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in cross.iter_mut() {
        let m = c.norm();
        *c = if m > 1e-12 * scale && m > 0.0 {
            *c / m
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    fft2_in_place(&mut cross, w, h, true);
    let n = (w * h) as f64;

    let max_x = max_shift.min((w - 1) / 2) as i32;
    let max_y = max_shift.min((h - 1) / 2) as i32;
    let mut best = Alignment {
        dx: 0,
        dy: 0,
        peak: f64::NEG_INFINITY,
    };
    for dy in -max_y..=max_y {
        for dx in -max_x..=max_x {
            let ix = dx.rem_euclid(w as i32) as usize;
            let iy = dy.rem_euclid(h as i32) as usize;
            let v = cross[iy * w + ix].re / n;
            if v > best.peak {
                best = Alignment { dx, dy, peak: v };
            }
        }
    }
    if best.peak.is_nan() || best.peak < MIN_ALIGNMENT_PEAK {
        return Err(Error::AlignmentFailed(best.peak.max(0.0)));
    }
    Ok(best)
}

/// Circular shift: `out(x) = img(x - d)`.
pub fn circular_shift(img: &Field, dx: i32, dy: i32) -> Field {
    let (w, h) = (img.width() as i32, img.height() as i32);
    Field::from_fn(img.width(), img.height(), |x, y| {
        let sx = (x as i32 - dx).rem_euclid(w) as usize;
        let sy = (y as i32 - dy).rem_euclid(h) as usize;
        img.get(sx, sy)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialImage {
    /// `flash - gain * aligned_nonflash` over the overlap.
    pub diff: Field,
    /// Top-left of the overlap in flash coordinates.
    pub origin: (usize, usize),
    pub gain: f64,
    /// False when the non-flash median was zero and unit gain was used.
    pub gain_defined: bool,
    pub diff_energy: f64,
    pub diff_structure: f64,
}

/// Gain-matched difference of an aligned pair.
///
/// `diff_structure` is the mean OCL over valid `structure_block` blocks of
/// `|D|`; when the overlap is smaller than one block it falls back to a single
/// OCL over the whole overlap.
pub fn differential_image(
    flash: &Field,
    nonflash: &Field,
    shift: (i32, i32),
    structure_block: usize,
) -> Result<DifferentialImage> {
    let (w, h) = (flash.width() as i32, flash.height() as i32);
    if nonflash.width() as i32 != w || nonflash.height() as i32 != h {
        return Err(Error::InvalidImage("differential needs equally sized frames".into()));
    }
    let (dx, dy) = shift;
    let x0 = 0.max(-dx);
    let x1 = w.min(w - dx);
    let y0 = 0.max(-dy);
    let y1 = h.min(h - dy);
    if x1 <= x0 || y1 <= y0 {
        return Err(Error::EmptyOverlap(dx, dy));
    }
    let (ow, oh) = ((x1 - x0) as usize, (y1 - y0) as usize);
    let f_ov = flash.crop(x0 as usize, y0 as usize, ow, oh);
    let n_ov = nonflash.crop((x0 + dx) as usize, (y0 + dy) as usize, ow, oh);

    let mf = median(f_ov.data());
    let mn = median(n_ov.data());
    let (gain, gain_defined) = if mn > 1e-9 { (mf / mn, true) } else { (1.0, false) };

    let diff = Field::from_fn(ow, oh, |x, y| f_ov.get(x, y) - gain * n_ov.get(x, y));
    let diff_energy = diff.data().iter().map(|v| v * v).sum::<f64>() / diff.len() as f64;
    let abs = diff.map(f64::abs);
    let diff_structure = if ow >= structure_block && oh >= structure_block && ow >= 3 && oh >= 3 {
        ocl_map(&abs, structure_block)?.grid.valid_mean().unwrap_or(0.0)
    } else if ow >= 8 && oh >= 8 {
        crate::quality::ocl_block(&abs)?.ocl
    } else {
        0.0
    };
    Ok(DifferentialImage {
        diff,
        origin: (x0 as usize, y0 as usize),
        gain,
        gain_defined,
        diff_energy,
        diff_structure,
    })
}

/// Sample points `(s, t)` of the ridge-normal profiles for a `size` block:
/// `s` runs along the normal, `t` selects the profile.
fn profile_offsets(size: usize) -> std::ops::Range<isize> {
    let half = (size / 2) as isize;
    -half..(size as isize - half)
}

/// 1-D intensity profiles across the ridges of one block, sampled bilinearly
/// along the block's ridge normal through its centre.
pub fn block_profiles(img: &Field, origin: (usize, usize), size: usize, orientation: f64) -> Vec<Vec<f64>> {
    let (c, s) = (orientation.cos(), orientation.sin());
    let cx = (origin.0 + size / 2) as f64;
    let cy = (origin.1 + size / 2) as f64;
    profile_offsets(size)
        .map(|t| {
            let t = t as f64;
            profile_offsets(size)
                .map(|u| {
                    let u = u as f64;
                    img.sample_bilinear(cx + u * c - t * s, cy + u * s + t * c)
                })
                .collect()
        })
        .collect()
}

/// Mean absolute second difference along ridge-normal profiles of every
/// valid block. Lower means smoother ridge/valley transitions.
pub fn sss_smoothness(img: &Field, orient: &OclMap) -> Result<f64> {
    let layout = orient.layout();
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..layout.len() {
        if !orient.grid.valid[i] {
            continue;
        }
        for profile in block_profiles(img, layout.origin(i), layout.block_size, orient.orientations[i]) {
            for win in profile.windows(3) {
                total += (win[0] - 2.0 * win[1] + win[2]).abs();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::NoValidBlocks);
    }
    Ok(total / count as f64)
}

/// Coefficient of variation of per-block ridge amplitude (95th minus 5th
/// percentile) across valid blocks.
pub fn ridge_amplitude_cv(img: &Field, orient: &OclMap) -> Result<f64> {
    let layout = orient.layout();
    let amplitudes: Vec<f64> = (0..layout.len())
        .filter(|&i| orient.grid.valid[i])
        .map(|i| {
            let block = layout.block(img, i);
            percentile(block.data(), 95.0) - percentile(block.data(), 5.0)
        })
        .collect();
    if amplitudes.len() < 4 {
        return Err(Error::TooFewValidBlocks {
            needed: 4,
            found: amplitudes.len(),
        });
    }
    Ok(coefficient_of_variation(&amplitudes))
}

/// `count_flash * size_cv_flash * max(0, shr_flash - shr_nonflash)`.
pub fn highlight_irregularity(flash: &SpecularReport, nonflash: &SpecularReport) -> f64 {
    flash.component_count as f64 * flash.component_size_cv * (flash.shr - nonflash.shr).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialReport {
    pub shift: (i32, i32),
    pub alignment_peak: f64,
    pub aligned: bool,
    pub gain: f64,
    pub diff_energy: f64,
    pub diff_structure: f64,
    pub sss_smoothness_flash: Option<f64>,
    pub sss_smoothness_nonflash: Option<f64>,
    pub ridge_amplitude_cv_flash: Option<f64>,
    pub ridge_amplitude_cv_nonflash: Option<f64>,
    pub highlight_irregularity: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// Inputs for [`differential_report`] that come from other modules.
pub struct DifferentialInputs<'a> {
    pub flash: &'a Field,
    pub nonflash: &'a Field,
    pub flash_orientation: &'a OclMap,
    pub nonflash_orientation: &'a OclMap,
    pub flash_specular: Option<&'a SpecularReport>,
    pub nonflash_specular: Option<&'a SpecularReport>,
}

pub fn differential_report(inputs: &DifferentialInputs<'_>, config: &DifferentialConfig) -> Result<DifferentialReport> {
    let mut flags = Vec::new();
    let (shift, peak, aligned) = match align_pair(inputs.flash, inputs.nonflash, config.max_shift) {
        Ok(a) => ((a.dx, a.dy), a.peak, true),
        Err(Error::AlignmentFailed(p)) => {
            flags.push(format!("alignment failed (peak {p:.4}); using unaligned pair"));
            ((0, 0), p, false)
        }
        Err(e) => return Err(e),
    };
    let diff = differential_image(inputs.flash, inputs.nonflash, shift, config.structure_block)?;
    if !diff.gain_defined {
        flags.push("non-flash median is zero; unit gain used".to_string());
    }
    let mut optional = |name: &str, r: Result<f64>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            flags.push(format!("{name}: {e}"));
            None
        }
    };
    let sss_f = optional(
        "sss_smoothness_flash",
        sss_smoothness(inputs.flash, inputs.flash_orientation),
    );
    let sss_n = optional(
        "sss_smoothness_nonflash",
        sss_smoothness(inputs.nonflash, inputs.nonflash_orientation),
    );
    let cv_f = optional(
        "ridge_amplitude_cv_flash",
        ridge_amplitude_cv(inputs.flash, inputs.flash_orientation),
    );
    let cv_n = optional(
        "ridge_amplitude_cv_nonflash",
        ridge_amplitude_cv(inputs.nonflash, inputs.nonflash_orientation),
    );
    let irregularity = match (inputs.flash_specular, inputs.nonflash_specular) {
        (Some(f), Some(n)) => Some(highlight_irregularity(f, n)),
        _ => {
            flags.push("highlight_irregularity: specular reports unavailable".to_string());
            None
        }
    };
    Ok(DifferentialReport {
        shift,
        alignment_peak: peak,
        aligned,
        gain: diff.gain,
        diff_energy: diff.diff_energy,
        diff_structure: diff.diff_structure,
        sss_smoothness_flash: sss_f,
        sss_smoothness_nonflash: sss_n,
        ridge_amplitude_cv_flash: cv_f,
        ridge_amplitude_cv_nonflash: cv_n,
        highlight_irregularity: irregularity,
        flags,
    })
}
