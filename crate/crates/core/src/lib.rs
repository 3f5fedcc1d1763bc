//! Illumination-aware feature extraction and presentation-attack detection
//! for paired flash / non-flash contactless fingerprint captures.
//!
//! The crate is organised bottom-up: [`imgcore`] holds raster types and
//! shared signal primitives, the cue modules ([`quality`], [`photometry`],
//! [`illumcues`], [`texture`], [`differential`]) each compute one family of
//! measurements, [`stats`] ranks features by class separation, [`classify`]
//! assembles the canonical feature vector and trains a linear discriminant,
//! and [`synthgen`] produces deterministic synthetic capture pairs.

pub mod classify;
pub mod differential;
pub mod error;
pub mod illumcues;
pub mod imgcore;
pub mod io;
pub mod manifest;
pub mod photometry;
pub mod quality;
pub mod rng;
pub mod stats;
pub mod synthgen;
pub mod texture;

pub use error::{Error, Result};
pub use imgcore::{CaptureClass, CaptureLabel, Field, PaiType, PairedCapture, RasterImage};
