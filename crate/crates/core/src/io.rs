//! Image decode/encode: binary Netpbm (P5/P6, maxval 255) and 8-bit PNG.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::imgcore::RasterImage;

/// Output container for [`save_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    /// P5 for grayscale, P6 for RGB.
    Pnm,
}

impl ImageFormat {
    pub fn extension(self, channels: usize) -> &'static str {
        match (self, channels) {
            (ImageFormat::Png, _) => "png",
            (ImageFormat::Pnm, 1) => "pgm",
            (ImageFormat::Pnm, _) => "ppm",
        }
    }
}

/// Encode as binary PGM (1 channel) or PPM (3 channels), maxval 255.
pub fn encode_pnm(img: &RasterImage) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_u8());
    out
}

fn skip_ws_and_comments(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        match bytes[*pos] {
            b'#' => {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            }
            b' ' | b'\t' | b'\n' | b'\r' => *pos += 1,
            _ => break,
        }
    }
}

fn read_header_uint(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    skip_ws_and_comments(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::UnsupportedFormat("truncated netpbm header".into()));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::UnsupportedFormat("bad netpbm header field".into()))
}

/// Decode binary P5/P6 with maxval 255.
pub fn decode_pnm(bytes: &[u8]) -> Result<RasterImage> {
    if bytes.len() < 2 {
        return Err(Error::UnsupportedFormat("empty netpbm data".into()));
    }
    let channels = match &bytes[..2] {
        b"P5" => 1,
        b"P6" => 3,
        _ => return Err(Error::UnsupportedFormat("not a binary PGM/PPM".into())),
    };
    let mut pos = 2;
    let width = read_header_uint(bytes, &mut pos)?;
    let height = read_header_uint(bytes, &mut pos)?;
    let maxval = read_header_uint(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "netpbm maxval {maxval} (only 255 supported)"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b' ' | b'\t' | b'\n' | b'\r') => pos += 1,
        _ => return Err(Error::UnsupportedFormat("missing raster separator".into())),
    }
    let expected = width * height * channels;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(Error::UnsupportedFormat(format!(
            "netpbm raster truncated: {} of {expected} bytes",
            raster.len()
        )));
    }
    RasterImage::from_u8(width, height, channels, &raster[..expected])
}

/// Encode as 8-bit grayscale or RGB PNG.
pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(if img.channels() == 1 {
            png::ColorType::Grayscale
        } else {
            png::ColorType::Rgb
        });
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&img.to_u8())?;
    }
    Ok(out)
}

/// Decode an 8-bit PNG. Palette and low bit depths are expanded; alpha is dropped.
pub fn decode_png(bytes: &[u8]) -> Result<RasterImage> {
    let mut decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "png bit depth {:?} (only 8-bit supported)",
            info.bit_depth
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let data = &buf[..info.buffer_size()];
    let (channels, samples): (usize, Vec<u8>) = match info.color_type {
        png::ColorType::Grayscale => (1, data.to_vec()),
        png::ColorType::Rgb => (3, data.to_vec()),
        png::ColorType::GrayscaleAlpha => (1, data.chunks_exact(2).map(|p| p[0]).collect()),
        png::ColorType::Rgba => (3, data.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect()),
        other => {
            return Err(Error::UnsupportedFormat(format!("png color type {other:?}")));
        }
    };
    RasterImage::from_u8(w, h, channels, &samples)
}

/// Decode PNG or binary Netpbm by sniffing the leading bytes.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage> {
    if bytes.starts_with(b"\x89PNG") {
        decode_png(bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        decode_pnm(bytes)
    } else {
        Err(Error::UnsupportedFormat("unrecognized image signature".into()))
    }
}

pub fn load_image(path: &Path) -> Result<RasterImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

pub fn save_image(img: &RasterImage, path: &Path, format: ImageFormat) -> Result<()> {
    let bytes = match format {
        ImageFormat::Png => encode_png(img)?,
        ImageFormat::Pnm => encode_pnm(img),
    };
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}
