//! Per-channel photometric statistics of an RGB capture.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{sobel_gradients, Field, RasterImage};
use crate::quality::local_contrast;

/// Default clipping threshold for 8-bit captures.
pub const SATURATION_THRESHOLD: f64 = 254.0 / 255.0;

/// Minimum mean blue intensity for a defined R/B ratio.
pub const BLUE_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    R,
    G,
    B,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::R => "r",
            Channel::G => "g",
            Channel::B => "b",
        }
    }
}

fn channel_plane(img: &RasterImage, channel: Channel) -> Result<Field> {
    if img.channels() != 3 {
        return Err(Error::ChannelMismatch {
            expected: 3,
            actual: img.channels(),
        });
    }
    Ok(img.plane(channel.index()))
}

pub fn channel_local_contrast(img: &RasterImage, channel: Channel, patch_size: usize) -> Result<f64> {
    local_contrast(&channel_plane(img, channel)?, patch_size)
}

/// Mean of `gx^2 + gy^2` over the channel plane.
pub fn channel_edge_energy(img: &RasterImage, channel: Channel) -> Result<f64> {
    let plane = channel_plane(img, channel)?;
    let (gx, gy) = sobel_gradients(&plane)?;
    let sum: f64 = gx.data().iter().zip(gy.data()).map(|(a, b)| a * a + b * b).sum();
    Ok(sum / plane.len() as f64)
}

/// Fraction of pixels whose channel value is at or above `threshold`.
pub fn saturation_fraction(img: &RasterImage, channel: Channel, threshold: f64) -> Result<f64> {
    let plane = channel_plane(img, channel)?;
    let clipped = plane.data().iter().filter(|&&v| v >= threshold).count();
    Ok(clipped as f64 / plane.len() as f64)
}

/// `mean(R) / mean(B)`.
pub fn color_temperature_ratio(img: &RasterImage) -> Result<f64> {
    let r = channel_plane(img, Channel::R)?.mean();
    let b = channel_plane(img, Channel::B)?.mean();
    if b <= BLUE_EPSILON {
        return Err(Error::DegenerateBlueChannel(b));
    }
    Ok(r / b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPhotometrics {
    /// Indexed R, G, B.
    pub local_contrast: [f64; 3],
    pub edge_energy: [f64; 3],
    pub saturation: [f64; 3],
    /// `None` when the blue channel is degenerate.
    pub color_temp_ratio: Option<f64>,
}

pub fn channel_photometrics(img: &RasterImage, patch_size: usize) -> Result<ChannelPhotometrics> {
    let mut out = ChannelPhotometrics {
        local_contrast: [0.0; 3],
        edge_energy: [0.0; 3],
        saturation: [0.0; 3],
        color_temp_ratio: None,
    };
    for ch in Channel::ALL {
        let i = ch.index();
        out.local_contrast[i] = channel_local_contrast(img, ch, patch_size)?;
        out.edge_energy[i] = channel_edge_energy(img, ch)?;
        out.saturation[i] = saturation_fraction(img, ch, SATURATION_THRESHOLD)?;
    }
    out.color_temp_ratio = match color_temperature_ratio(img) {
        Ok(v) => Some(v),
        Err(Error::DegenerateBlueChannel(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(out)
}
