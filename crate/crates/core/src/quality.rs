//! Ridge clarity and sharpness metrics: orientation certainty (OCL), local
//! clarity (LCS), patch contrast, edge clarity and Laplacian sharpness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{block_partition, layout_for, sobel_gradients, BlockGrid, BlockLayout, Field};
use crate::stats::percentile_sorted;

/// Blocks whose gradient energy is below this many units per pixel are flat.
pub const FLAT_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QualityConfig {
    pub ocl_block: usize,
    pub lcs_block: usize,
    pub patch_size: usize,
}

impl Default for QualityConfig {
    fn default() -> Self {
        Self {
            ocl_block: 16,
            lcs_block: 32,
            patch_size: 16,
        }
    }
}

/// OCL of one block together with its dominant gradient direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockOrientation {
    /// `1 - lambda_min / lambda_max`, 0 for flat blocks.
    pub ocl: f64,
    /// Angle (radians) of the `lambda_max` eigenvector, i.e. the ridge normal.
    pub orientation: f64,
    pub valid: bool,
}

fn orientation_from_gradients(gx: &[f64], gy: &[f64]) -> BlockOrientation {
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in gx.iter().zip(gy) {
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    let trace = sxx + syy;
    if trace < FLAT_EPSILON * gx.len() as f64 {
        return BlockOrientation {
            ocl: 0.0,
            orientation: 0.0,
            valid: false,
        };
    }
    let disc = ((sxx - syy) * (sxx - syy) + 4.0 * sxy * sxy).sqrt();
    let l_max = 0.5 * (trace + disc);
    let l_min = (0.5 * (trace - disc)).max(0.0);
    BlockOrientation {
        ocl: (1.0 - l_min / l_max).clamp(0.0, 1.0),
        orientation: 0.5 * (2.0 * sxy).atan2(sxx - syy),
        valid: true,
    }
}

/// OCL of a standalone block (gradients computed on the block itself).
pub fn ocl_block(block: &Field) -> Result<BlockOrientation> {
    if block.width() < 8 || block.height() < 8 {
        return Err(Error::ImageTooSmall {
            width: block.width(),
            height: block.height(),
            min: 8,
        });
    }
    let (gx, gy) = sobel_gradients(block)?;
    Ok(orientation_from_gradients(gx.data(), gy.data()))
}

/// Blockwise OCL values plus the per-block ridge-normal angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OclMap {
    pub grid: BlockGrid,
    pub orientations: Vec<f64>,
}

impl OclMap {
    pub fn layout(&self) -> BlockLayout {
        self.grid.layout
    }
}

/// Blockwise orientation analysis from whole-image gradients.
pub fn ocl_map(img: &Field, block_size: usize) -> Result<OclMap> {
    let layout = block_partition(img, block_size)?;
    let (gx, gy) = sobel_gradients(img)?;
    Ok(ocl_map_from_gradients(&gx, &gy, layout))
}

fn ocl_map_from_gradients(gx: &Field, gy: &Field, layout: BlockLayout) -> OclMap {
    let bs = layout.block_size;
    let mut values = Vec::with_capacity(layout.len());
    let mut valid = Vec::with_capacity(layout.len());
    let mut orientations = Vec::with_capacity(layout.len());
    for i in 0..layout.len() {
        let (x0, y0) = layout.origin(i);
        let bx = gx.crop(x0, y0, bs, bs);
        let by = gy.crop(x0, y0, bs, bs);
        let o = orientation_from_gradients(bx.data(), by.data());
        values.push(o.ocl);
        valid.push(o.valid);
        orientations.push(o.orientation);
    }
    OclMap {
        grid: BlockGrid { layout, values, valid },
        orientations,
    }
}

/// Side of the largest axis-aligned square that stays inside a `size` block
/// under any rotation about its centre.
pub fn inscribed_side(size: usize) -> usize {
    ((size as f64) / std::f64::consts::SQRT_2).floor() as usize
}

/// Nearest-neighbour resample of `block` so that the direction `orientation`
/// maps onto the +x axis (ridges become vertical). The output is the
/// inscribed square, so every sample comes from inside the block.
pub fn rotate_to_ridge_frame(block: &Field, orientation: f64) -> Field {
    let size = block.width().min(block.height());
    let side = inscribed_side(size);
    let cx = (block.width() as f64 - 1.0) / 2.0;
    let cy = (block.height() as f64 - 1.0) / 2.0;
    let half = (side as f64 - 1.0) / 2.0;
    let (s, c) = orientation.sin_cos();
    Field::from_fn(side, side, |i, j| {
        let u = i as f64 - half;
        let v = j as f64 - half;
        let sx = (cx + u * c - v * s).round() as isize;
        let sy = (cy + u * s + v * c).round() as isize;
        block.get_clamped(sx, sy)
    })
}

/// Ridge-frame column profile of a block: the mean over each column of the
/// rotated block.
pub fn ridge_profile(block: &Field, orientation: f64) -> Vec<f64> {
    let rot = rotate_to_ridge_frame(block, orientation);
    column_means(&rot)
}

fn column_means(f: &Field) -> Vec<f64> {
    (0..f.width())
        .map(|x| (0..f.height()).map(|y| f.get(x, y)).sum::<f64>() / f.height() as f64)
        .collect()
}

/// Local clarity score of a block given its ridge-normal orientation.
///
/// Returns 0 for flat blocks.
pub fn lcs_block(block: &Field, orientation: f64) -> Result<f64> {
    if block.width() < 16 || block.height() < 16 {
        return Err(Error::ImageTooSmall {
            width: block.width(),
            height: block.height(),
            min: 16,
        });
    }
    if !ocl_block(block)?.valid {
        return Ok(0.0);
    }
    Ok(lcs_unchecked(block, orientation))
}

fn lcs_unchecked(block: &Field, orientation: f64) -> f64 {
    let rot = rotate_to_ridge_frame(block, orientation);
    let profile = column_means(&rot);
    let lo = profile.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = profile.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = 0.5 * (lo + hi);

    let (mut ridge_n, mut ridge_wrong, mut valley_n, mut valley_wrong) = (0usize, 0usize, 0usize, 0usize);
    for (x, &p) in profile.iter().enumerate() {
        let is_ridge = p < threshold;
        for y in 0..rot.height() {
            let v = rot.get(x, y);
            if is_ridge {
                ridge_n += 1;
                ridge_wrong += (v >= threshold) as usize;
            } else {
                valley_n += 1;
                valley_wrong += (v < threshold) as usize;
            }
        }
    }
    let alpha = if ridge_n == 0 {
        0.0
    } else {
        ridge_wrong as f64 / ridge_n as f64
    };
    let beta = if valley_n == 0 {
        0.0
    } else {
        valley_wrong as f64 / valley_n as f64
    };
    (1.0 - 0.5 * (alpha + beta)).clamp(0.0, 1.0)
}

/// Blockwise LCS using orientations from the same blocks' OCL analysis.
pub fn lcs_map(img: &Field, block_size: usize) -> Result<BlockGrid> {
    if block_size < 16 {
        return Err(Error::InvalidParameter(format!(
            "LCS block size {block_size} below minimum 16"
        )));
    }
    let orient = ocl_map(img, block_size)?;
    let layout = orient.layout();
    let mut values = Vec::with_capacity(layout.len());
    for i in 0..layout.len() {
        if orient.grid.valid[i] {
            values.push(lcs_unchecked(&layout.block(img, i), orient.orientations[i]));
        } else {
            values.push(0.0);
        }
    }
    Ok(BlockGrid {
        layout,
        values,
        valid: orient.grid.valid,
    })
}

/// Mean over non-overlapping patches of the population standard deviation.
pub fn local_contrast(img: &Field, patch_size: usize) -> Result<f64> {
    let layout = layout_for(img.width(), img.height(), patch_size, 1)?;
    let total: f64 = layout.blocks(img).map(|p| p.variance().sqrt()).sum();
    Ok(total / layout.len() as f64)
}

fn gradient_magnitude(img: &Field) -> Result<Field> {
    let (gx, gy) = sobel_gradients(img)?;
    Ok(Field::from_fn(img.width(), img.height(), |x, y| {
        gx.get(x, y).hypot(gy.get(x, y))
    }))
}

/// Mean Sobel magnitude over pixels strictly above the 75th-percentile magnitude.
pub fn edge_clarity(img: &Field) -> Result<f64> {
    let mag = gradient_magnitude(img)?;
    let mut sorted = mag.data().to_vec();
    sorted.sort_by(f64::total_cmp);
    let p75 = percentile_sorted(&sorted, 75.0);
    let strong: Vec<f64> = mag.data().iter().copied().filter(|&m| m > p75).collect();
    if strong.is_empty() {
        return Ok(0.0);
    }
    Ok(strong.iter().sum::<f64>() / strong.len() as f64)
}

/// 4-neighbour Laplacian with replicate padding.
pub fn laplacian(img: &Field) -> Field {
    Field::from_fn(img.width(), img.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        img.get_clamped(x - 1, y) + img.get_clamped(x + 1, y) + img.get_clamped(x, y - 1) + img.get_clamped(x, y + 1)
            - 4.0 * img.get_clamped(x, y)
    })
}

/// Variance of the Laplacian response.
pub fn sharpness(img: &Field) -> Result<f64> {
    crate::imgcore::require_min_size(img, 3)?;
    Ok(laplacian(img).variance())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub ocl_map: OclMap,
    /// Mean OCL over valid blocks (0 when every block is flat).
    pub ocl_mean: f64,
    pub lcs_map: BlockGrid,
    pub lcs_mean: f64,
    pub local_contrast: f64,
    pub edge_clarity: f64,
    pub sharpness: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

pub fn quality_report(img: &Field, config: &QualityConfig) -> Result<QualityReport> {
    let ocl = ocl_map(img, config.ocl_block)?;
    let lcs = lcs_map(img, config.lcs_block)?;
    let mut flags = Vec::new();
    let ocl_mean = ocl.grid.valid_mean().unwrap_or_else(|| {
        flags.push("ocl: no valid blocks".to_string());
        0.0
    });
    let lcs_mean = lcs.valid_mean().unwrap_or_else(|| {
        flags.push("lcs: no valid blocks".to_string());
        0.0
    });
    Ok(QualityReport {
        ocl_mean,
        ocl_map: ocl,
        lcs_mean,
        lcs_map: lcs,
        local_contrast: local_contrast(img, config.patch_size)?,
        edge_clarity: edge_clarity(img)?,
        sharpness: sharpness(img)?,
        flags,
    })
}
