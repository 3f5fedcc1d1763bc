//! Seeded synthetic batches and the directional checks run on them.

#![allow(dead_code)]

use fnfpad::classify::{extract_features, feature_columns, feature_index, ExtractConfig, FeatureVector};
use fnfpad::imgcore::{gaussian_blur, sobel_gradients};
use fnfpad::stats::{build_separation_report, FeatureGroup};
use fnfpad::synthgen::{MaterialKind, SynthConfig};
use fnfpad::{CaptureClass, Field};
use nalgebra::{DMatrix, DVector};

pub struct Batch {
    pub kind: MaterialKind,
    pub vectors: Vec<FeatureVector>,
}

pub fn batch(config: &SynthConfig, kind: MaterialKind, seeds: std::ops::Range<u64>) -> Batch {
    let ex = ExtractConfig::default();
    let vectors = seeds
        .map(|s| extract_features(&config.generate(s, kind).expect("generate"), &ex).expect("extract"))
        .collect();
    Batch { kind, vectors }
}

pub fn all_batches(config: &SynthConfig, seeds: std::ops::Range<u64>) -> Vec<Batch> {
    MaterialKind::ALL
        .iter()
        .map(|&k| batch(config, k, seeds.clone()))
        .collect()
}

pub fn column(b: &Batch, name: &str) -> Vec<f64> {
    let i = feature_index(name).expect("feature name");
    b.vectors.iter().map(|v| v.values[i]).collect()
}

pub fn class_mean(batches: &[Batch], class: CaptureClass, name: &str) -> f64 {
    let vals: Vec<f64> = batches
        .iter()
        .filter(|b| b.kind.class() == class)
        .flat_map(|b| column(b, name))
        .collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

pub fn kind_mean(batches: &[Batch], kind: MaterialKind, name: &str) -> f64 {
    let b = batches.iter().find(|b| b.kind == kind).expect("batch");
    let vals = column(b, name);
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// `larger > smaller` with `larger - smaller >= 0.1 * |larger|`.
pub struct Directional {
    pub name: &'static str,
    pub larger: f64,
    pub smaller: f64,
}

impl Directional {
    pub fn margin(&self) -> f64 {
        (self.larger - self.smaller) / self.larger.abs().max(self.smaller.abs())
    }

    pub fn passed(&self) -> bool {
        self.larger > self.smaller && self.larger - self.smaller >= 0.1 * self.larger.abs().max(self.smaller.abs())
    }
}

/// The five genuine-vs-spoof directions of the reproduction check.
pub fn directional_checks(batches: &[Batch]) -> Vec<Directional> {
    let g = CaptureClass::Genuine;
    let s = CaptureClass::Spoof;
    let delta = |name: &str| class_mean(batches, g, name) - class_mean(batches, s, name);
    let vectors: Vec<FeatureVector> = batches.iter().flat_map(|b| b.vectors.clone()).collect();
    let report = build_separation_report(&feature_columns(&vectors), None).expect("separation report");
    let top = |group| report.top_fdr(group).and_then(|f| f.fdr).unwrap_or(0.0);
    vec![
        Directional {
            name: "(a) genuine OCL flash > non-flash",
            larger: class_mean(batches, g, "ocl_flash"),
            smaller: class_mean(batches, g, "ocl_nonflash"),
        },
        Directional {
            name: "(b) Pearson off-diagonal delta flash > non-flash",
            larger: delta("pearson_offdiag_flash"),
            smaller: delta("pearson_offdiag_nonflash"),
        },
        Directional {
            name: "(c) flash SHR spoof > genuine",
            larger: class_mean(batches, s, "shr_flash"),
            smaller: class_mean(batches, g, "shr_flash"),
        },
        Directional {
            name: "(d) flash realism ratio spoof > genuine",
            larger: class_mean(batches, s, "realism_ratio_flash"),
            smaller: class_mean(batches, g, "realism_ratio_flash"),
        },
        Directional {
            name: "(e) top FDR flash > non-flash",
            larger: top(FeatureGroup::Flash),
            smaller: top(FeatureGroup::Nonflash),
        },
    ]
}

/// Band-pass around the ridge frequency.
pub fn ridge_band(f: &Field) -> Field {
    let fine = gaussian_blur(f, 1.5);
    let coarse = gaussian_blur(f, 4.0);
    Field::from_fn(f.width(), f.height(), |x, y| fine.get(x, y) - coarse.get(x, y))
}

/// Multiple correlation of `target` with `basis` and its two gradients.
///
/// Directional light turns ridge height into slope shading, a quarter-period
/// shifted copy of the ridge pattern whose sign depends on the local ridge
/// direction. Regressing on the gradients as well keeps the measure about the
/// shared ridge pattern rather than about the light direction.
pub fn ridge_similarity(target: &Field, basis: &Field) -> f64 {
    let (gx, gy) = sobel_gradients(basis).expect("gradients");
    let n = target.len();
    let cols = [basis.data(), gx.data(), gy.data()];
    let x = DMatrix::from_fn(n, 4, |i, j| if j == 0 { 1.0 } else { cols[j - 1][i] });
    let y = DVector::from_column_slice(target.data());
    let xt = x.transpose();
    let beta = (&xt * &x).cholesky().expect("normal equations").solve(&(&xt * &y));
    let fit = &x * beta;
    let m = target.mean();
    let ss_res: f64 = (0..n).map(|i| (y[i] - fit[i]).powi(2)).sum();
    let ss_tot: f64 = (0..n).map(|i| (y[i] - m).powi(2)).sum();
    (1.0 - ss_res / ss_tot).max(0.0).sqrt()
}
