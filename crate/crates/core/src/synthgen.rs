//! Deterministic synthetic flash / non-flash capture pairs for genuine skin
//! and three spoof material families.
//!
//! Every pair starts from an identity ridge pattern drawn from the sample
//! seed alone, so a genuine finger and its spoofs with the same seed share
//! ridge geometry. Material randomness (colour jitter, highlight placement,
//! halftone and pixel-grid phases) comes from a stream keyed by
//! `(seed, material)`, and sensor noise from one stream per image.
//!
//! Numeric constants live in a versioned JSON document (`fnfpad-synth/2`)
//! embedded at build time; [`SynthConfig::default`] parses it.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{gaussian_blur, CaptureClass, CaptureLabel, Field, PaiType, PairedCapture, RasterImage};
use crate::io::{save_image, ImageFormat};
use crate::manifest::ManifestRecord;
use crate::rng::SplitMix64;

pub const CONFIG_VERSION: &str = "fnfpad-synth/2";

const DEFAULT_CONFIG: &str = include_str!("synth_config.json");

const IDENTITY_STREAM: u64 = 0x1D;
const FLASH_NOISE_STREAM: u64 = 0xF1;
const NONFLASH_NOISE_STREAM: u64 = 0xA0;

/// Logistic slope that turns tone minus dot threshold into ink coverage.
const HALFTONE_SHARPNESS: f64 = 12.0;
/// Diffuse reflectance of a screen's cover glass.
const GLASS_REFLECTANCE: f64 = 0.06;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaterialKind {
    Genuine,
    Print,
    Screen,
    Molded,
}

impl MaterialKind {
    pub const ALL: [MaterialKind; 4] = [
        MaterialKind::Genuine,
        MaterialKind::Print,
        MaterialKind::Screen,
        MaterialKind::Molded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MaterialKind::Genuine => "genuine",
            MaterialKind::Print => "print",
            MaterialKind::Screen => "screen",
            MaterialKind::Molded => "molded",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn class(self) -> CaptureClass {
        match self {
            MaterialKind::Genuine => CaptureClass::Genuine,
            _ => CaptureClass::Spoof,
        }
    }

    pub fn pai_type(self) -> PaiType {
        match self {
            MaterialKind::Genuine => PaiType::None,
            MaterialKind::Print => PaiType::Print,
            MaterialKind::Screen => PaiType::Screen,
            MaterialKind::Molded => PaiType::Molded,
        }
    }

    fn stream_tag(self) -> u64 {
        0x100 + self as u64
    }
}

/// Optical behaviour of one material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    pub kind: MaterialKind,
    /// Peak added intensity of specular lobes and micro-highlights under flash.
    pub specular_strength: f64,
    /// Gaussian blur (px) of ridge transitions: subsurface light transport for
    /// skin, ink spread for prints, optics for screens.
    pub subsurface_sigma: f64,
    /// Coefficient of variation of local ridge amplitude.
    pub amplitude_cv: f64,
    /// `tanh` sharpening of the ridge sinusoid; large values give near-square
    /// transitions.
    pub ridge_sharpness: f64,
    /// Expected micro-highlights per 1000 pixels under flash.
    pub micro_highlight_density: f64,
    /// Log-normal highlight radius: `[median px, log standard deviation]`.
    pub micro_highlight_radius: [f64; 2],
    pub base_color: [f64; 3],
    /// Half-width of the uniform per-channel colour perturbation.
    pub color_jitter: f64,
    /// Broad specular lobe radius range (px); print, screen and molded only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lobe_sigma: Option<[f64; 2]>,
    /// Display pixel pitch in image pixels; screen only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_line_depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subpixel_depth: Option<f64>,
    /// Per-channel emission gain reached under flash exposure; values above
    /// one push the display's strongest subpixels into clipping. Screen only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flash_channel_drive: Option<[f64; 3]>,
    /// Per-channel ink gain; print only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ink_channel_skew: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halftone_period: Option<f64>,
    /// Maximum per-channel plate offset (px); print only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub misregistration: Option<f64>,
}

fn check_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo..=hi).contains(&v) {
        return Err(Error::InvalidParameter(format!("{name} = {v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_presence<T>(kind: MaterialKind, name: &str, value: &Option<T>, owner: MaterialKind) -> Result<()> {
    match (kind == owner, value.is_some()) {
        (true, false) => Err(Error::InvalidParameter(format!(
            "{} material requires {name}",
            kind.as_str()
        ))),
        (false, true) => Err(Error::InvalidParameter(format!(
            "{name} is only valid for {} materials",
            owner.as_str()
        ))),
        _ => Ok(()),
    }
}

impl MaterialModel {
    pub fn validate(&self) -> Result<()> {
        let k = self.kind;
        check_range("specular_strength", self.specular_strength, 0.0, 3.0)?;
        check_range("subsurface_sigma", self.subsurface_sigma, 0.0, 8.0)?;
        check_range("amplitude_cv", self.amplitude_cv, 0.0, 1.0)?;
        check_range("ridge_sharpness", self.ridge_sharpness, 0.0, 20.0)?;
        check_range("micro_highlight_density", self.micro_highlight_density, 0.0, 20.0)?;
        check_range(
            "micro_highlight_radius median",
            self.micro_highlight_radius[0],
            0.3,
            8.0,
        )?;
        check_range(
            "micro_highlight_radius spread",
            self.micro_highlight_radius[1],
            0.0,
            1.5,
        )?;
        for c in self.base_color {
            check_range("base_color", c, 0.01, 1.0)?;
        }
        check_range("color_jitter", self.color_jitter, 0.0, 0.2)?;

        match (k, &self.lobe_sigma) {
            (MaterialKind::Genuine, Some(_)) => {
                return Err(Error::InvalidParameter(
                    "genuine material has no broad specular lobe".into(),
                ))
            }
            (MaterialKind::Genuine, None) => {}
            (_, None) => {
                return Err(Error::InvalidParameter(format!(
                    "{} material requires lobe_sigma",
                    k.as_str()
                )))
            }
            (_, Some([lo, hi])) => {
                check_range("lobe_sigma", *lo, 1.0, 64.0)?;
                check_range("lobe_sigma", *hi, *lo, 64.0)?;
            }
        }
        check_presence(k, "grid_period", &self.grid_period, MaterialKind::Screen)?;
        check_presence(k, "grid_line_depth", &self.grid_line_depth, MaterialKind::Screen)?;
        check_presence(k, "subpixel_depth", &self.subpixel_depth, MaterialKind::Screen)?;
        check_presence(
            k,
            "flash_channel_drive",
            &self.flash_channel_drive,
            MaterialKind::Screen,
        )?;
        check_presence(k, "ink_channel_skew", &self.ink_channel_skew, MaterialKind::Print)?;
        check_presence(k, "halftone_period", &self.halftone_period, MaterialKind::Print)?;
        check_presence(k, "misregistration", &self.misregistration, MaterialKind::Print)?;
        if let Some(p) = self.grid_period {
            check_range("grid_period", p, 2.0, 16.0)?;
        }
        if let Some(d) = self.grid_line_depth {
            check_range("grid_line_depth", d, 0.0, 1.0)?;
        }
        if let Some(d) = self.subpixel_depth {
            check_range("subpixel_depth", d, 0.0, 1.0)?;
        }
        if let Some(drive) = self.flash_channel_drive {
            for d in drive {
                check_range("flash_channel_drive", d, 0.5, 3.0)?;
            }
        }
        if let Some(skew) = self.ink_channel_skew {
            for s in skew {
                check_range("ink_channel_skew", s, 0.01, 1.5)?;
            }
        }
        if let Some(p) = self.halftone_period {
            check_range("halftone_period", p, 2.0, 16.0)?;
        }
        if let Some(m) = self.misregistration {
            check_range("misregistration", m, 0.0, 4.0)?;
        }
        Ok(())
    }
}

/// Lighting and sensor parameters for one of the two captures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lighting {
    pub gain: f64,
    pub tint: [f64; 3],
    /// Brightness modulation by ridge height.
    pub relief: f64,
    /// Brightness modulation by ridge slope along the light direction.
    pub slope: f64,
    /// Linear illumination ramp across the frame along the light direction.
    pub gradient: f64,
    /// Radial fall-off at the frame corners.
    pub vignette: f64,
    /// Scale applied to every specular contribution.
    pub specular: f64,
    /// Scale of self-emitted light (screens).
    pub emission: f64,
    /// How far the material's flash channel drive applies: 1 under flash, 0
    /// without.
    #[serde(default)]
    pub channel_drive: f64,
    /// Capture blur (px) from exposure time and focus, applied before noise.
    #[serde(default)]
    pub blur: f64,
    /// Per-channel Gaussian sensor noise standard deviation.
    pub noise: f64,
}

impl Lighting {
    fn validate(&self, name: &str) -> Result<()> {
        check_range(&format!("{name}.gain"), self.gain, 0.0, 4.0)?;
        for t in self.tint {
            check_range(&format!("{name}.tint"), t, 0.0, 4.0)?;
        }
        check_range(&format!("{name}.relief"), self.relief, 0.0, 2.0)?;
        check_range(&format!("{name}.slope"), self.slope, 0.0, 4.0)?;
        check_range(&format!("{name}.gradient"), self.gradient, 0.0, 0.7)?;
        check_range(&format!("{name}.vignette"), self.vignette, 0.0, 0.9)?;
        check_range(&format!("{name}.specular"), self.specular, 0.0, 4.0)?;
        check_range(&format!("{name}.emission"), self.emission, 0.0, 4.0)?;
        check_range(&format!("{name}.channel_drive"), self.channel_drive, 0.0, 1.0)?;
        check_range(&format!("{name}.blur"), self.blur, 0.0, 4.0)?;
        check_range(&format!("{name}.noise"), self.noise, 0.0, 0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlluminationModel {
    pub flash: Lighting,
    pub nonflash: Lighting,
}

impl IlluminationModel {
    /// Both captures under the same neutral, noise-free, specular-free light.
    pub fn uniform(gain: f64) -> Self {
        let l = Lighting {
            gain,
            tint: [1.0; 3],
            relief: 0.5,
            slope: 0.0,
            gradient: 0.0,
            vignette: 0.0,
            specular: 0.0,
            emission: 1.0,
            channel_drive: 0.0,
            blur: 0.0,
            noise: 0.0,
        };
        Self {
            flash: l.clone(),
            nonflash: l,
        }
    }
}

/// Smooth random perturbation of the ridge phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationField {
    /// Distance of the ridge-curvature centre from the frame centre, as a
    /// range of multiples of the frame size.
    pub centre_distance: [f64; 2],
    /// Upper bound of the perturbation's gradient relative to the base ridge
    /// frequency; bounds the local period deviation.
    pub perturbation: f64,
    pub wavelength: [f64; 2],
    pub components: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothFieldParams {
    pub wavelength: [f64; 2],
    pub components: usize,
}

/// Everything needed to render one pair apart from the material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub size: usize,
    pub ridge_period: f64,
    pub orientation: OrientationField,
    pub amplitude_field: SmoothFieldParams,
    pub illumination: IlluminationModel,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size < 128 {
            return Err(Error::InvalidParameter(format!("size {} below 128", self.size)));
        }
        if self.size > 4096 {
            return Err(Error::InvalidParameter(format!("size {} above 4096", self.size)));
        }
        check_range("ridge_period", self.ridge_period, 4.0, 32.0)?;
        let o = &self.orientation;
        check_range("centre_distance", o.centre_distance[0], 0.0, 100.0)?;
        check_range("centre_distance", o.centre_distance[1], o.centre_distance[0], 100.0)?;
        check_range("perturbation", o.perturbation, 0.0, 0.5)?;
        for wl in [o.wavelength, self.amplitude_field.wavelength] {
            check_range("wavelength", wl[0], 2.0, 10_000.0)?;
            check_range("wavelength", wl[1], wl[0], 10_000.0)?;
        }
        if o.components == 0 || self.amplitude_field.components == 0 {
            return Err(Error::InvalidParameter(
                "smooth fields need at least one component".into(),
            ));
        }
        self.illumination.flash.validate("flash")?;
        self.illumination.nonflash.validate("nonflash")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Materials {
    pub genuine: MaterialModel,
    pub print: MaterialModel,
    pub screen: MaterialModel,
    pub molded: MaterialModel,
}

/// Frozen generator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub version: String,
    pub size: usize,
    pub ridge_period: f64,
    pub orientation: OrientationField,
    pub amplitude_field: SmoothFieldParams,
    pub illumination: IlluminationModel,
    pub materials: Materials,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self::from_json(DEFAULT_CONFIG).expect("embedded generator config is valid")
    }
}

impl SynthConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SynthConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::InvalidParameter(format!(
                "generator config version {:?}, expected {CONFIG_VERSION:?}",
                self.version
            )));
        }
        for kind in MaterialKind::ALL {
            let m = self.material(kind);
            if m.kind != kind {
                return Err(Error::InvalidParameter(format!(
                    "materials.{} declares kind {}",
                    kind.as_str(),
                    m.kind.as_str()
                )));
            }
            m.validate()?;
        }
        self.gen_spec(0).validate()
    }

    pub fn material(&self, kind: MaterialKind) -> &MaterialModel {
        match kind {
            MaterialKind::Genuine => &self.materials.genuine,
            MaterialKind::Print => &self.materials.print,
            MaterialKind::Screen => &self.materials.screen,
            MaterialKind::Molded => &self.materials.molded,
        }
    }

    pub fn gen_spec(&self, seed: u64) -> GenSpec {
        GenSpec {
            seed,
            size: self.size,
            ridge_period: self.ridge_period,
            orientation: self.orientation.clone(),
            amplitude_field: self.amplitude_field.clone(),
            illumination: self.illumination.clone(),
        }
    }

    /// Convenience: render `kind` for `seed` with these parameters.
    pub fn generate(&self, seed: u64, kind: MaterialKind) -> Result<PairedCapture> {
        generate_pair(&self.gen_spec(seed), self.material(kind))
    }
}

/// Sum of random plane waves normalized to unit variance.
struct SmoothField {
    waves: Vec<(f64, f64, f64)>,
    scale: f64,
}

impl SmoothField {
    fn draw(rng: &mut SplitMix64, params: &SmoothFieldParams) -> Self {
        let waves = (0..params.components)
            .map(|_| {
                let wl = rng.uniform(params.wavelength[0], params.wavelength[1]);
                let dir = rng.uniform(0.0, TAU);
                let phase = rng.uniform(0.0, TAU);
                let k = TAU / wl;
                (k * dir.cos(), k * dir.sin(), phase)
            })
            .collect();
        Self {
            waves,
            scale: (2.0 / params.components as f64).sqrt(),
        }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.scale
            * self
                .waves
                .iter()
                .map(|(kx, ky, p)| (kx * x + ky * y + p).cos())
                .sum::<f64>()
    }

    fn max_wavenumber(&self) -> f64 {
        self.waves.iter().map(|(kx, ky, _)| kx.hypot(*ky)).fold(0.0, f64::max)
    }
}

/// Identity ridge pattern: phase `k0 * |p - c| + perturbation + phase0`.
struct Identity {
    k0: f64,
    centre: (f64, f64),
    phase: f64,
    perturbation: SmoothField,
    perturbation_gain: f64,
    amplitude: SmoothField,
}

impl Identity {
    fn draw(spec: &GenSpec) -> Self {
        let mut rng = SplitMix64::stream(spec.seed, IDENTITY_STREAM);
        let half = spec.size as f64 / 2.0;
        let o = &spec.orientation;
        let dir = rng.uniform(0.0, TAU);
        let dist = rng.uniform(o.centre_distance[0], o.centre_distance[1]) * spec.size as f64;
        let phase = rng.uniform(0.0, TAU);
        let perturbation = SmoothField::draw(
            &mut rng,
            &SmoothFieldParams {
                wavelength: o.wavelength,
                components: o.components,
            },
        );
        let amplitude = SmoothField::draw(&mut rng, &spec.amplitude_field);
        let k0 = TAU / spec.ridge_period;
        // gradient of scale * sum(cos) is bounded by scale * n * kmax
        let bound = perturbation.scale * o.components as f64 * perturbation.max_wavenumber();
        let perturbation_gain = if bound > 0.0 { o.perturbation * k0 / bound } else { 0.0 };
        Self {
            k0,
            centre: (half + dist * dir.cos(), half + dist * dir.sin()),
            phase,
            perturbation,
            perturbation_gain,
            amplitude,
        }
    }

    fn ridge_phase(&self, x: f64, y: f64) -> f64 {
        self.k0 * (x - self.centre.0).hypot(y - self.centre.1)
            + self.perturbation_gain * self.perturbation.eval(x, y)
            + self.phase
    }

    /// Ridge height in `[0, 1]` with material sharpening and amplitude modulation.
    fn height(&self, x: f64, y: f64, material: &MaterialModel) -> f64 {
        let c = self.ridge_phase(x, y).cos();
        let s = material.ridge_sharpness;
        let profile = if s < 1e-6 { c } else { (s * c).tanh() / s.tanh() };
        let m = (1.0 + material.amplitude_cv * self.amplitude.eval(x, y)).max(0.1);
        (0.5 + 0.5 * m * profile).clamp(0.0, 1.0)
    }
}

/// Gaussian spot added equally to every channel.
#[derive(Debug, Clone, Copy)]
struct Spot {
    x: f64,
    y: f64,
    sigma: f64,
    strength: f64,
}

impl Spot {
    fn add_to(&self, planes: &mut [Field; 3], scale: f64) {
        let amp = self.strength * scale;
        if amp == 0.0 {
            return;
        }
        let (w, h) = (planes[0].width(), planes[0].height());
        let r = (4.0 * self.sigma).ceil();
        let x0 = (self.x - r).floor().max(0.0) as usize;
        let y0 = (self.y - r).floor().max(0.0) as usize;
        let x1 = ((self.x + r).ceil().max(0.0) as usize).min(w.saturating_sub(1));
        let y1 = ((self.y + r).ceil().max(0.0) as usize).min(h.saturating_sub(1));
        let denom = 2.0 * self.sigma * self.sigma;
        for y in y0..=y1 {
            for x in x0..=x1 {
                let d2 = (x as f64 - self.x).powi(2) + (y as f64 - self.y).powi(2);
                let v = amp * (-d2 / denom).exp();
                for p in planes.iter_mut() {
                    let cur = p.get(x, y);
                    p.set(x, y, cur + v);
                }
            }
        }
    }
}

/// Material response before lighting, shared by both captures.
enum Surface {
    /// Reflective relief (skin, molds): per-channel blurred height and albedo.
    Relief { height: [Field; 3], albedo: [f64; 3] },
    /// Flat reflectance (paper prints).
    Flat { reflectance: [Field; 3] },
    /// Self-emissive display behind glass.
    Emissive { emission: [Field; 3], drive: [f64; 3] },
}

struct Scene {
    size: usize,
    surface: Surface,
    light_dir: (f64, f64),
    specular: Vec<Spot>,
}

fn blur(field: Field, sigma: f64) -> Field {
    if sigma < 0.3 {
        field
    } else {
        gaussian_blur(&field, sigma)
    }
}

fn jittered_color(rng: &mut SplitMix64, m: &MaterialModel) -> [f64; 3] {
    let mut c = m.base_color;
    for v in c.iter_mut() {
        *v = (*v + rng.uniform(-m.color_jitter, m.color_jitter)).clamp(0.01, 1.0);
    }
    c
}

fn draw_lobe(rng: &mut SplitMix64, m: &MaterialModel, size: usize) -> Option<Spot> {
    let [lo, hi] = m.lobe_sigma?;
    let n = size as f64;
    Some(Spot {
        x: rng.uniform(0.25 * n, 0.75 * n),
        y: rng.uniform(0.25 * n, 0.75 * n),
        sigma: rng.uniform(lo, hi),
        strength: m.specular_strength,
    })
}

/// Micro-highlights on ridge crests with log-normal radii.
fn draw_micro_highlights(rng: &mut SplitMix64, m: &MaterialModel, id: &Identity, size: usize) -> Vec<Spot> {
    let n = size as f64;
    let count = rng.poisson(m.micro_highlight_density * n * n / 1000.0);
    let mut spots = Vec::with_capacity(count);
    for _ in 0..count {
        let (mut x, mut y) = (rng.uniform(0.0, n), rng.uniform(0.0, n));
        for _ in 0..32 {
            if id.ridge_phase(x, y).cos() > 0.7 {
                break;
            }
            x = rng.uniform(0.0, n);
            y = rng.uniform(0.0, n);
        }
        let radius = (m.micro_highlight_radius[0].ln() + m.micro_highlight_radius[1] * rng.normal()).exp();
        spots.push(Spot {
            x,
            y,
            sigma: radius.clamp(0.5, 6.0),
            strength: m.specular_strength,
        });
    }
    spots
}

fn build_scene(spec: &GenSpec, m: &MaterialModel) -> Scene {
    let id = Identity::draw(spec);
    let mut rng = SplitMix64::stream(spec.seed, m.kind.stream_tag());
    let size = spec.size;
    let color = jittered_color(&mut rng, m);
    let light_angle = rng.uniform(0.0, TAU);
    let light_dir = (light_angle.cos(), light_angle.sin());
    let height = Field::from_fn(size, size, |x, y| id.height(x as f64, y as f64, m));

    let surface = match m.kind {
        MaterialKind::Genuine | MaterialKind::Molded => {
            // red light scatters furthest under the skin, blue least
            let spread = [1.5, 1.0, 0.75];
            Surface::Relief {
                height: spread.map(|k| blur(height.clone(), m.subsurface_sigma * k)),
                albedo: color,
            }
        }
        MaterialKind::Print => {
            let period = m.halftone_period.unwrap_or(4.0);
            let skew = m.ink_channel_skew.unwrap_or([1.0; 3]);
            let misreg = m.misregistration.unwrap_or(0.0);
            let base_angle = rng.uniform(0.0, PI / 2.0);
            let reflectance = [0usize, 1, 2].map(|c| {
                let angle = base_angle + [15.0f64, 75.0, 0.0][c].to_radians();
                let (ca, sa) = (angle.cos(), angle.sin());
                let dx = rng.uniform(-misreg, misreg);
                let dy = rng.uniform(-misreg, misreg);
                let kh = TAU / period;
                let plane = Field::from_fn(size, size, |x, y| {
                    let (xf, yf) = (x as f64, y as f64);
                    let tone = 0.4 + 0.3 * height.sample_bilinear(xf + dx, yf + dy);
                    let demand = 1.0 - tone;
                    let u = xf * ca + yf * sa;
                    let v = -xf * sa + yf * ca;
                    let dot = 0.5 + 0.25 * ((kh * u).cos() + (kh * v).cos());
                    let coverage = 1.0 / (1.0 + (-HALFTONE_SHARPNESS * (demand - dot)).exp());
                    color[c] * skew[c] * (1.0 - 0.75 * coverage)
                });
                blur(plane, m.subsurface_sigma)
            });
            Surface::Flat { reflectance }
        }
        MaterialKind::Screen => {
            let period = m.grid_period.unwrap_or(4.0);
            let line = m.grid_line_depth.unwrap_or(0.0);
            let sub = m.subpixel_depth.unwrap_or(0.0);
            let rot = rng.uniform(-3.0, 3.0).to_radians();
            let (ox, oy) = (rng.uniform(0.0, period), rng.uniform(0.0, period));
            let (cr, sr) = (rot.cos(), rot.sin());
            let kp = TAU / period;
            let emission = [0usize, 1, 2].map(|c| {
                let plane = Field::from_fn(size, size, |x, y| {
                    let (xf, yf) = (x as f64, y as f64);
                    let u = xf * cr + yf * sr + ox;
                    let v = -xf * sr + yf * cr + oy;
                    let lines = |t: f64| (0.5 + 0.5 * (kp * t).cos()).powi(4);
                    let grid = (1.0 - line * lines(u)) * (1.0 - line * lines(v));
                    let subpixel = 1.0 + sub * (kp * u - c as f64 * TAU / 3.0).cos();
                    let tone = 0.3 + 0.4 * height.get(x, y);
                    color[c] * tone * grid * subpixel
                });
                blur(plane, m.subsurface_sigma)
            });
            Surface::Emissive {
                emission,
                drive: m.flash_channel_drive.unwrap_or([1.0; 3]),
            }
        }
    };

    let mut specular: Vec<Spot> = draw_lobe(&mut rng, m, size).into_iter().collect();
    specular.extend(draw_micro_highlights(&mut rng, m, &id, size));
    Scene {
        size,
        surface,
        light_dir,
        specular,
    }
}

fn central_difference(f: &Field, x: usize, y: usize, dir: (f64, f64)) -> f64 {
    let (xi, yi) = (x as isize, y as isize);
    let gx = 0.5 * (f.get_clamped(xi + 1, yi) - f.get_clamped(xi - 1, yi));
    let gy = 0.5 * (f.get_clamped(xi, yi + 1) - f.get_clamped(xi, yi - 1));
    gx * dir.0 + gy * dir.1
}

fn render(scene: &Scene, light: &Lighting, noise_rng: &mut SplitMix64) -> Result<RasterImage> {
    let n = scene.size;
    let half = n as f64 / 2.0;
    let illum = |x: usize, y: usize| {
        let (dx, dy) = ((x as f64 - half) / half, (y as f64 - half) / half);
        let rho2 = (dx * dx + dy * dy) / 2.0;
        let proj = dx * scene.light_dir.0 + dy * scene.light_dir.1;
        (1.0 - light.vignette * rho2) * (1.0 + light.gradient * proj)
    };
    let mut planes: [Field; 3] = [0usize, 1, 2].map(|c| {
        Field::from_fn(n, n, |x, y| match &scene.surface {
            Surface::Relief { height, albedo } => {
                let h = &height[c];
                let shade = 1.0
                    + light.relief * (h.get(x, y) - 0.5)
                    + light.slope * central_difference(h, x, y, scene.light_dir);
                light.gain * light.tint[c] * albedo[c] * illum(x, y) * shade
            }
            Surface::Flat { reflectance } => light.gain * light.tint[c] * reflectance[c].get(x, y) * illum(x, y),
            Surface::Emissive { emission, drive } => {
                let g = 1.0 + light.channel_drive * (drive[c] - 1.0);
                light.emission * g * emission[c].get(x, y)
                    + light.gain * light.tint[c] * GLASS_REFLECTANCE * illum(x, y)
            }
        })
    });
    for spot in &scene.specular {
        spot.add_to(&mut planes, light.specular);
    }
    let planes = planes.map(|p| blur(p, light.blur));
    let mut data = Vec::with_capacity(n * n * 3);
    for y in 0..n {
        for x in 0..n {
            for p in &planes {
                let mut v = p.get(x, y);
                if light.noise > 0.0 {
                    v += light.noise * noise_rng.normal();
                }
                data.push(v.clamp(0.0, 1.0));
            }
        }
    }
    Ok(RasterImage::new(n, n, 3, data)?.quantized())
}

/// Render the flash and non-flash captures of one presentation.
pub fn generate_pair(spec: &GenSpec, material: &MaterialModel) -> Result<PairedCapture> {
    spec.validate()?;
    material.validate()?;
    let scene = build_scene(spec, material);
    let tag = material.kind.stream_tag();
    let mut flash_noise = SplitMix64::stream(spec.seed, (tag << 8) | FLASH_NOISE_STREAM);
    let mut nonflash_noise = SplitMix64::stream(spec.seed, (tag << 8) | NONFLASH_NOISE_STREAM);
    let flash = render(&scene, &spec.illumination.flash, &mut flash_noise)?;
    let nonflash = render(&scene, &spec.illumination.nonflash, &mut nonflash_noise)?;
    let label = CaptureLabel::new(
        format!("{}-{}", material.kind.as_str(), spec.seed),
        format!("subject-{:016x}", spec.seed),
        1,
        material.kind.class(),
        material.kind.pai_type(),
    )?;
    PairedCapture::new(flash, nonflash, label)
}

/// One planned sample of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSpec {
    pub index: u64,
    pub kind: MaterialKind,
    pub seed: u64,
    pub pair_id: String,
}

/// Enumerate samples in canonical material order. The global index runs
/// across materials and each sample's seed is `seed ^ index`, so the plan
/// does not depend on the order in which counts are given.
pub fn dataset_plan(counts: &[(MaterialKind, usize)], seed: u64) -> Vec<SampleSpec> {
    let mut plan = Vec::new();
    let mut index = 0u64;
    for kind in MaterialKind::ALL {
        let n: usize = counts.iter().filter(|(k, _)| *k == kind).map(|(_, n)| n).sum();
        for i in 0..n {
            plan.push(SampleSpec {
                index,
                kind,
                seed: seed ^ index,
                pair_id: format!("{}-{i:04}", kind.as_str()),
            });
            index += 1;
        }
    }
    plan
}

/// Render one planned sample and write `<pair_id>_flash.<ext>` and
/// `<pair_id>_nonflash.<ext>` into `dir`.
pub fn write_sample(
    dir: &Path,
    sample: &SampleSpec,
    config: &SynthConfig,
    format: ImageFormat,
) -> Result<ManifestRecord> {
    let pair = config.generate(sample.seed, sample.kind)?;
    let ext = format.extension(pair.flash.channels());
    let flash_name = format!("{}_flash.{ext}", sample.pair_id);
    let nonflash_name = format!("{}_nonflash.{ext}", sample.pair_id);
    save_image(&pair.flash, &dir.join(&flash_name), format)?;
    save_image(&pair.nonflash, &dir.join(&nonflash_name), format)?;
    Ok(ManifestRecord {
        pair_id: sample.pair_id.clone(),
        subject: pair.label.subject_id,
        session: pair.label.session,
        label: pair.label.class,
        pai_type: pair.label.pai_type,
        flash: flash_name,
        nonflash: nonflash_name,
    })
}

/// Serial dataset generation: images plus `manifest.jsonl` in `dir`.
pub fn generate_dataset(
    dir: &Path,
    counts: &[(MaterialKind, usize)],
    seed: u64,
    config: &SynthConfig,
    format: ImageFormat,
) -> Result<Vec<ManifestRecord>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let records = dataset_plan(counts, seed)
        .iter()
        .map(|s| write_sample(dir, s, config, format))
        .collect::<Result<Vec<_>>>()?;
    crate::manifest::write_manifest(&dir.join(crate::manifest::MANIFEST_FILE), &records)?;
    Ok(records)
}
