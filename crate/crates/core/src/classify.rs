//! Per-pair feature vectors and a closed-form Fisher linear discriminant.
//!
//! [`analyze_pair`] runs every cue module on a capture pair and keeps the
//! full reports; [`PairAnalysis::feature_vector`] flattens them into the
//! canonical order of [`FEATURE_NAMES`]. Metrics that are undefined for a
//! pair are stored as 0, marked imputed and named in the flags; training and
//! scoring treat imputed entries as the z-space mean.

use std::fmt::Write as _;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::differential::{differential_report, DifferentialConfig, DifferentialInputs, DifferentialReport};
use crate::error::{Error, Result};
use crate::illumcues::{
    channel_correlation, specular_highlight_ratio, ChannelCorrelation, SpecularConfig, SpecularReport, DEFAULT_MI_BINS,
};
use crate::imgcore::{CaptureClass, CaptureLabel, PaiType, PairedCapture, RasterImage};
use crate::photometry::{channel_photometrics, ChannelPhotometrics};
use crate::quality::{quality_report, QualityConfig, QualityReport};
use crate::stats::{mean, variance, FeatureColumn};
use crate::texture::{texture_delta, texture_descriptors, TextureConfig, TextureDelta, TextureDescriptors};

pub const FEATURE_COUNT: usize = 53;

/// Canonical feature order. Suffixes `_flash`, `_nonflash` and `_delta`
/// mark the illumination a feature derives from.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "ocl_flash",
    "ocl_nonflash",
    "ocl_delta",
    "lcs_flash",
    "lcs_nonflash",
    "lcs_delta",
    "local_contrast_flash",
    "local_contrast_nonflash",
    "local_contrast_delta",
    "edge_clarity_flash",
    "edge_clarity_nonflash",
    "edge_clarity_delta",
    "sharpness_flash",
    "sharpness_nonflash",
    "sharpness_delta",
    "contrast_r_flash",
    "contrast_g_flash",
    "contrast_b_flash",
    "edge_energy_r_flash",
    "edge_energy_g_flash",
    "edge_energy_b_flash",
    "saturation_r_flash",
    "saturation_g_flash",
    "saturation_b_flash",
    "color_temp_ratio_flash",
    "contrast_r_nonflash",
    "contrast_g_nonflash",
    "contrast_b_nonflash",
    "edge_energy_r_nonflash",
    "edge_energy_g_nonflash",
    "edge_energy_b_nonflash",
    "saturation_r_nonflash",
    "saturation_g_nonflash",
    "saturation_b_nonflash",
    "color_temp_ratio_nonflash",
    "pearson_offdiag_flash",
    "pearson_offdiag_nonflash",
    "mi_offdiag_flash",
    "mi_offdiag_nonflash",
    "shr_flash",
    "shr_nonflash",
    "realism_ratio_flash",
    "realism_ratio_nonflash",
    "lbp_delta",
    "glcm_delta",
    "fourier_delta",
    "diff_energy",
    "diff_structure",
    "sss_smoothness_flash",
    "sss_smoothness_nonflash",
    "ridge_amplitude_cv_flash",
    "ridge_amplitude_cv_nonflash",
    "highlight_irregularity",
];

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    pub quality: QualityConfig,
    pub mi_bins: usize,
    pub specular: SpecularConfig,
    pub texture: TextureConfig,
    pub differential: DifferentialConfig,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            quality: QualityConfig::default(),
            mi_bins: DEFAULT_MI_BINS,
            specular: SpecularConfig::default(),
            texture: TextureConfig::default(),
            differential: DifferentialConfig::default(),
        }
    }
}

/// Every module report for one pair. Colour reports are absent for
/// grayscale captures.
#[derive(Debug, Clone, PartialEq)]
pub struct PairAnalysis {
    pub label: CaptureLabel,
    pub quality_flash: QualityReport,
    pub quality_nonflash: QualityReport,
    pub photometrics_flash: Option<ChannelPhotometrics>,
    pub photometrics_nonflash: Option<ChannelPhotometrics>,
    pub correlation_flash: Option<ChannelCorrelation>,
    pub correlation_nonflash: Option<ChannelCorrelation>,
    pub specular_flash: Option<SpecularReport>,
    pub specular_nonflash: Option<SpecularReport>,
    pub texture_flash: TextureDescriptors,
    pub texture_nonflash: TextureDescriptors,
    pub texture_delta: TextureDelta,
    pub differential: DifferentialReport,
    pub flags: Vec<String>,
}

fn is_size_error(e: &Error) -> bool {
    matches!(e, Error::ImageTooSmall { .. } | Error::BlockTooLarge { .. })
}

/// Keep non-size failures as flags; size errors abort extraction.
fn soft<T>(r: Result<T>, what: &str, flags: &mut Vec<String>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if is_size_error(&e) => Err(e),
        Err(e) => {
            flags.push(format!("{what}: {e}"));
            Ok(None)
        }
    }
}

fn colour_reports(
    img: &RasterImage,
    which: &str,
    config: &ExtractConfig,
    flags: &mut Vec<String>,
) -> Result<(
    Option<ChannelPhotometrics>,
    Option<ChannelCorrelation>,
    Option<SpecularReport>,
)> {
    let specular = soft(
        specular_highlight_ratio(img, &config.specular),
        &format!("specular_{which}"),
        flags,
    )?;
    if img.channels() != 3 {
        flags.push(format!("{which}: grayscale capture, colour features unavailable"));
        return Ok((None, None, specular));
    }
    let photo = soft(
        channel_photometrics(img, config.quality.patch_size),
        &format!("photometrics_{which}"),
        flags,
    )?;
    let corr = soft(
        channel_correlation(img, config.mi_bins),
        &format!("correlation_{which}"),
        flags,
    )?;
    Ok((photo, corr, specular))
}

/// Run every cue module on a pair.
pub fn analyze_pair(pair: &PairedCapture, config: &ExtractConfig) -> Result<PairAnalysis> {
    let mut flags = Vec::new();
    let gray_f = pair.flash.luminance();
    let gray_n = pair.nonflash.luminance();

    let quality_flash = quality_report(&gray_f, &config.quality)?;
    let quality_nonflash = quality_report(&gray_n, &config.quality)?;
    flags.extend(quality_flash.flags.iter().map(|f| format!("flash {f}")));
    flags.extend(quality_nonflash.flags.iter().map(|f| format!("nonflash {f}")));

    let (photometrics_flash, correlation_flash, specular_flash) =
        colour_reports(&pair.flash, "flash", config, &mut flags)?;
    let (photometrics_nonflash, correlation_nonflash, specular_nonflash) =
        colour_reports(&pair.nonflash, "nonflash", config, &mut flags)?;

    let texture_flash = texture_descriptors(&gray_f, &config.texture)?;
    let texture_nonflash = texture_descriptors(&gray_n, &config.texture)?;
    let tdelta = texture_delta(&texture_flash, &texture_nonflash)?;

    let differential = differential_report(
        &DifferentialInputs {
            flash: &gray_f,
            nonflash: &gray_n,
            flash_orientation: &quality_flash.ocl_map,
            nonflash_orientation: &quality_nonflash.ocl_map,
            flash_specular: specular_flash.as_ref(),
            nonflash_specular: specular_nonflash.as_ref(),
        },
        &config.differential,
    )?;
    flags.extend(differential.flags.iter().cloned());

    Ok(PairAnalysis {
        label: pair.label.clone(),
        quality_flash,
        quality_nonflash,
        photometrics_flash,
        photometrics_nonflash,
        correlation_flash,
        correlation_nonflash,
        specular_flash,
        specular_nonflash,
        texture_flash,
        texture_nonflash,
        texture_delta: tdelta,
        differential,
        flags,
    })
}

/// One pair's features in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub pair_id: String,
    pub class: CaptureClass,
    pub pai_type: PaiType,
    pub values: Vec<f64>,
    pub imputed: Vec<bool>,
    pub flags: Vec<String>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).map(|i| self.values[i])
    }
}

struct Builder {
    values: Vec<f64>,
    imputed: Vec<bool>,
    flags: Vec<String>,
}

impl Builder {
    fn push(&mut self, name: &str, value: Option<f64>) {
        let i = self.values.len();
        debug_assert_eq!(FEATURE_NAMES[i], name);
        match value.filter(|v| v.is_finite()) {
            Some(v) => {
                self.values.push(v);
                self.imputed.push(false);
            }
            None => {
                self.values.push(0.0);
                self.imputed.push(true);
                self.flags.push(format!("imputed:{name}"));
            }
        }
    }

    fn triple(&mut self, name: &str, flash: Option<f64>, nonflash: Option<f64>) {
        self.push(&format!("{name}_flash"), flash);
        self.push(&format!("{name}_nonflash"), nonflash);
        let delta = flash.zip(nonflash).map(|(a, b)| a - b);
        self.push(&format!("{name}_delta"), delta);
    }

    fn photometrics(&mut self, which: &str, p: Option<&ChannelPhotometrics>) {
        let channels = ["r", "g", "b"];
        for (i, c) in channels.iter().enumerate() {
            self.push(&format!("contrast_{c}_{which}"), p.map(|p| p.local_contrast[i]));
        }
        for (i, c) in channels.iter().enumerate() {
            self.push(&format!("edge_energy_{c}_{which}"), p.map(|p| p.edge_energy[i]));
        }
        for (i, c) in channels.iter().enumerate() {
            self.push(&format!("saturation_{c}_{which}"), p.map(|p| p.saturation[i]));
        }
        self.push(&format!("color_temp_ratio_{which}"), p.and_then(|p| p.color_temp_ratio));
    }
}

fn valid_mean(q: &QualityReport, ocl: bool) -> Option<f64> {
    if ocl {
        (q.ocl_map.grid.valid_count() > 0).then_some(q.ocl_mean)
    } else {
        (q.lcs_map.valid_count() > 0).then_some(q.lcs_mean)
    }
}

impl PairAnalysis {
    pub fn feature_vector(&self) -> FeatureVector {
        let mut b = Builder {
            values: Vec::with_capacity(FEATURE_COUNT),
            imputed: Vec::with_capacity(FEATURE_COUNT),
            flags: self.flags.clone(),
        };
        let (qf, qn) = (&self.quality_flash, &self.quality_nonflash);
        b.triple("ocl", valid_mean(qf, true), valid_mean(qn, true));
        b.triple("lcs", valid_mean(qf, false), valid_mean(qn, false));
        b.triple("local_contrast", Some(qf.local_contrast), Some(qn.local_contrast));
        b.triple("edge_clarity", Some(qf.edge_clarity), Some(qn.edge_clarity));
        b.triple("sharpness", Some(qf.sharpness), Some(qn.sharpness));
        b.photometrics("flash", self.photometrics_flash.as_ref());
        b.photometrics("nonflash", self.photometrics_nonflash.as_ref());
        let cf = self.correlation_flash.as_ref();
        let cn = self.correlation_nonflash.as_ref();
        b.push("pearson_offdiag_flash", cf.and_then(|c| c.off_diag_mean_pearson));
        b.push("pearson_offdiag_nonflash", cn.and_then(|c| c.off_diag_mean_pearson));
        b.push("mi_offdiag_flash", cf.map(|c| c.off_diag_mean_mi));
        b.push("mi_offdiag_nonflash", cn.map(|c| c.off_diag_mean_mi));
        b.push("shr_flash", self.specular_flash.as_ref().map(|s| s.shr));
        b.push("shr_nonflash", self.specular_nonflash.as_ref().map(|s| s.shr));
        b.push("realism_ratio_flash", Some(self.texture_flash.realism_ratio));
        b.push("realism_ratio_nonflash", Some(self.texture_nonflash.realism_ratio));
        b.push("lbp_delta", Some(self.texture_delta.lbp));
        b.push("glcm_delta", Some(self.texture_delta.glcm));
        b.push("fourier_delta", Some(self.texture_delta.fourier));
        let d = &self.differential;
        b.push("diff_energy", Some(d.diff_energy));
        b.push("diff_structure", Some(d.diff_structure));
        b.push("sss_smoothness_flash", d.sss_smoothness_flash);
        b.push("sss_smoothness_nonflash", d.sss_smoothness_nonflash);
        b.push("ridge_amplitude_cv_flash", d.ridge_amplitude_cv_flash);
        b.push("ridge_amplitude_cv_nonflash", d.ridge_amplitude_cv_nonflash);
        b.push("highlight_irregularity", d.highlight_irregularity);
        debug_assert_eq!(b.values.len(), FEATURE_COUNT);
        FeatureVector {
            pair_id: self.label.pair_id.clone(),
            class: self.label.class,
            pai_type: self.label.pai_type,
            values: b.values,
            imputed: b.imputed,
            flags: b.flags,
        }
    }
}

/// Per-feature genuine/spoof columns for separation statistics. Imputed
/// entries are left out.
pub fn feature_columns(vectors: &[FeatureVector]) -> Vec<FeatureColumn> {
    FEATURE_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let pick = |class: CaptureClass| {
                vectors
                    .iter()
                    .filter(|v| v.class == class && !v.imputed[i])
                    .map(|v| v.values[i])
                    .collect()
            };
            FeatureColumn {
                name: name.to_string(),
                genuine: pick(CaptureClass::Genuine),
                spoof: pick(CaptureClass::Spoof),
            }
        })
        .collect()
}

pub fn extract_features(pair: &PairedCapture, config: &ExtractConfig) -> Result<FeatureVector> {
    Ok(analyze_pair(pair, config)?.feature_vector())
}

/// Labelled feature table for training and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub imputed: Vec<Vec<bool>>,
    pub labels: Vec<CaptureClass>,
}

impl Dataset {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<CaptureClass>) -> Result<Self> {
        let imputed = rows.iter().map(|r| vec![false; r.len()]).collect();
        Self::with_imputed(names, rows, imputed, labels)
    }

    pub fn with_imputed(
        names: Vec<String>,
        rows: Vec<Vec<f64>>,
        imputed: Vec<Vec<bool>>,
        labels: Vec<CaptureClass>,
    ) -> Result<Self> {
        if rows.len() != labels.len() || rows.len() != imputed.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows, {} imputation masks, {} labels",
                rows.len(),
                imputed.len(),
                labels.len()
            )));
        }
        for (r, m) in rows.iter().zip(&imputed) {
            if r.len() != names.len() || m.len() != names.len() {
                return Err(Error::InvalidParameter(format!(
                    "row of length {} for {} features",
                    r.len(),
                    names.len()
                )));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite feature value".into()));
            }
        }
        Ok(Self {
            names,
            rows,
            imputed,
            labels,
        })
    }

    pub fn from_vectors(vectors: &[FeatureVector]) -> Result<Self> {
        Self::with_imputed(
            FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            vectors.iter().map(|v| v.values.clone()).collect(),
            vectors.iter().map(|v| v.imputed.clone()).collect(),
            vectors.iter().map(|v| v.class).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub const MODEL_MAGIC: &str = "FNFPAD-LDA v1";
pub const DEFAULT_RIDGE: f64 = 1e-6;
const MAX_RIDGE: f64 = 1e-2;
const MIN_STD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub feature_names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
}

impl LinearModel {
    fn z(&self, row: &[f64], imputed: &[bool]) -> Vec<f64> {
        row.iter()
            .zip(imputed)
            .enumerate()
            .map(|(i, (&v, &m))| if m { 0.0 } else { (v - self.mean[i]) / self.std[i] })
            .collect()
    }

    /// `w . z + bias`.
    pub fn score(&self, row: &[f64], imputed: &[bool]) -> f64 {
        self.z(row, imputed)
            .iter()
            .zip(&self.weights)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, row: &[f64], imputed: &[bool]) -> CaptureClass {
        if self.score(row, imputed) >= self.threshold {
            CaptureClass::Genuine
        } else {
            CaptureClass::Spoof
        }
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<CaptureClass>> {
        if data.names != self.feature_names {
            return Err(Error::ConfigMismatch);
        }
        Ok(data
            .rows
            .iter()
            .zip(&data.imputed)
            .map(|(r, m)| self.predict(r, m))
            .collect())
    }

    /// Plain-text model document: magic line, feature count, names,
    /// interleaved mean/std pairs, weights, bias, threshold; one value per
    /// line in shortest round-trip decimal form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_MAGIC}");
        let _ = writeln!(out, "{}", self.feature_names.len());
        for n in &self.feature_names {
            let _ = writeln!(out, "{n}");
        }
        for (m, s) in self.mean.iter().zip(&self.std) {
            let _ = writeln!(out, "{m:?}");
            let _ = writeln!(out, "{s:?}");
        }
        for w in &self.weights {
            let _ = writeln!(out, "{w:?}");
        }
        let _ = writeln!(out, "{:?}", self.bias);
        let _ = writeln!(out, "{:?}", self.threshold);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim_end) != Some(MODEL_MAGIC) {
            return Err(Error::UnrecognizedModel);
        }
        let mut next = |what: &str| {
            lines
                .next()
                .map(str::trim_end)
                .ok_or_else(|| Error::MalformedModel(format!("missing {what}")))
        };
        let count: usize = next("feature count")?
            .parse()
            .map_err(|_| Error::MalformedModel("bad feature count".into()))?;
        let mut names = Vec::with_capacity(count);
        for _ in 0..count {
            let n = next("feature name")?;
            if n.is_empty() {
                return Err(Error::MalformedModel("empty feature name".into()));
            }
            names.push(n.to_string());
        }
        let mut number = |what: &str| -> Result<f64> {
            let s = next(what)?;
            let v: f64 = s
                .parse()
                .map_err(|_| Error::MalformedModel(format!("bad {what} {s:?}")))?;
            if !v.is_finite() {
                return Err(Error::MalformedModel(format!("non-finite {what}")));
            }
            Ok(v)
        };
        let (mut mean, mut std) = (Vec::with_capacity(count), Vec::with_capacity(count));
        for _ in 0..count {
            mean.push(number("mean")?);
            let s = number("std")?;
            if s <= 0.0 {
                return Err(Error::MalformedModel("non-positive std".into()));
            }
            std.push(s);
        }
        let weights = (0..count).map(|_| number("weight")).collect::<Result<Vec<_>>>()?;
        let bias = number("bias")?;
        let threshold = number("threshold")?;
        Ok(Self {
            feature_names: names,
            mean,
            std,
            weights,
            bias,
            threshold,
        })
    }
}

/// Per-feature mean and population std over non-imputed entries.
fn normalization(data: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let d = data.names.len();
    let mut means = Vec::with_capacity(d);
    let mut stds = Vec::with_capacity(d);
    for j in 0..d {
        let col: Vec<f64> = data
            .rows
            .iter()
            .zip(&data.imputed)
            .filter(|(_, m)| !m[j])
            .map(|(r, _)| r[j])
            .collect();
        let m = mean(&col);
        let s = variance(&col).sqrt();
        means.push(m);
        stds.push(if s > MIN_STD { s } else { 1.0 });
    }
    (means, stds)
}

fn class_moments(zs: &[&Vec<f64>], d: usize) -> (DVector<f64>, DMatrix<f64>) {
    let n = zs.len() as f64;
    let mut mu = DVector::zeros(d);
    for z in zs {
        for j in 0..d {
            mu[j] += z[j];
        }
    }
    mu /= n;
    let mut cov = DMatrix::zeros(d, d);
    for z in zs {
        let c = DVector::from_iterator(d, z.iter().enumerate().map(|(j, v)| v - mu[j]));
        cov += &c * c.transpose();
    }
    cov /= n;
    (mu, cov)
}

/// Closed-form two-class Fisher LDA in z-space.
///
/// `w = (S_g + S_s + ridge I)^-1 (mu_g - mu_s)`; the ridge grows tenfold
/// until the system is positive definite, failing past `1e-2`. The bias
/// centres the midpoint of the projected class means at the zero threshold.
pub fn train_fisher_lda(data: &Dataset, ridge: f64) -> Result<LinearModel> {
    let count = |c| data.labels.iter().filter(|&&l| l == c).count();
    for class in [CaptureClass::Genuine, CaptureClass::Spoof] {
        if count(class) < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: count(class),
            });
        }
    }
    if ridge.is_nan() || ridge < 0.0 {
        return Err(Error::InvalidParameter(format!("ridge {ridge}")));
    }
    let d = data.names.len();
    let (means, stds) = normalization(data);
    let mut model = LinearModel {
        feature_names: data.names.clone(),
        mean: means,
        std: stds,
        weights: vec![0.0; d],
        bias: 0.0,
        threshold: 0.0,
    };
    let zs: Vec<Vec<f64>> = data
        .rows
        .iter()
        .zip(&data.imputed)
        .map(|(r, m)| model.z(r, m))
        .collect();
    let pick = |c: CaptureClass| -> Vec<&Vec<f64>> {
        zs.iter()
            .zip(&data.labels)
            .filter(|(_, &l)| l == c)
            .map(|(z, _)| z)
            .collect()
    };
    let (mu_g, cov_g) = class_moments(&pick(CaptureClass::Genuine), d);
    let (mu_s, cov_s) = class_moments(&pick(CaptureClass::Spoof), d);
    let scatter = cov_g + cov_s;
    let diff = &mu_g - &mu_s;

    let mut lambda = ridge;
    let w = loop {
        let m = &scatter + DMatrix::identity(d, d) * lambda;
        if let Some(ch) = Cholesky::new(m) {
            break ch.solve(&diff);
        }
        lambda = if lambda == 0.0 { 1e-12 } else { lambda * 10.0 };
        if lambda > MAX_RIDGE * (1.0 + 1e-9) {
            return Err(Error::Singular(lambda / 10.0));
        }
    };
    model.weights = w.iter().copied().collect();
    let proj = |mu: &DVector<f64>| mu.dot(&w);
    model.bias = -0.5 * (proj(&mu_g) + proj(&mu_s));
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n: usize,
    pub accuracy: f64,
    /// Spoofs accepted as genuine; absent without spoof samples.
    pub apcer: Option<f64>,
    /// Genuine captures rejected; absent without genuine samples.
    pub bpcer: Option<f64>,
    pub genuine_accepted: usize,
    pub genuine_rejected: usize,
    pub spoof_accepted: usize,
    pub spoof_rejected: usize,
}

pub fn metrics_from_predictions(truth: &[CaptureClass], predicted: &[CaptureClass]) -> Result<Metrics> {
    if truth.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if truth.len() != predicted.len() {
        return Err(Error::InvalidParameter(
            "prediction count differs from label count".into(),
        ));
    }
    let (mut ga, mut gr, mut sa, mut sr) = (0, 0, 0, 0);
    for (t, p) in truth.iter().zip(predicted) {
        match (t, p) {
            (CaptureClass::Genuine, CaptureClass::Genuine) => ga += 1,
            (CaptureClass::Genuine, CaptureClass::Spoof) => gr += 1,
            (CaptureClass::Spoof, CaptureClass::Genuine) => sa += 1,
            (CaptureClass::Spoof, CaptureClass::Spoof) => sr += 1,
        }
    }
    let rate = |bad: usize, good: usize| (bad + good > 0).then(|| bad as f64 / (bad + good) as f64);
    Ok(Metrics {
        n: truth.len(),
        accuracy: (ga + sr) as f64 / truth.len() as f64,
        apcer: rate(sa, sr),
        bpcer: rate(gr, ga),
        genuine_accepted: ga,
        genuine_rejected: gr,
        spoof_accepted: sa,
        spoof_rejected: sr,
    })
}

pub fn evaluate(model: &LinearModel, data: &Dataset) -> Result<Metrics> {
    let predicted = model.predict_dataset(data)?;
    metrics_from_predictions(&data.labels, &predicted)
}
