//! Closed-form examples with exact expected values. Shared by the core
//! `analytic` test target and the acceptance report.

#![allow(dead_code)]

use std::f64::consts::PI;

use fnfpad::classify::{
    analyze_pair, extract_features, metrics_from_predictions, train_fisher_lda, Dataset, ExtractConfig, FEATURE_NAMES,
};
use fnfpad::differential::{
    align_pair, circular_shift, differential_image, highlight_irregularity, ridge_amplitude_cv, sss_smoothness,
};
use fnfpad::illumcues::{
    correlation_separation, mutual_information, pearson_matrix, specular_highlight_ratio, ChannelCorrelation,
    SpecularConfig, SpecularReport,
};
use fnfpad::imgcore::{
    block_partition, fft2_logmag, radial_spectrum, sobel_gradients, to_grayscale, BlockGrid, BlockLayout,
};
use fnfpad::io::ImageFormat;
use fnfpad::photometry::{
    channel_edge_energy, channel_local_contrast, color_temperature_ratio, saturation_fraction, Channel,
    SATURATION_THRESHOLD,
};
use fnfpad::quality::{edge_clarity, lcs_block, local_contrast, ocl_block, sharpness, OclMap};
use fnfpad::stats::{build_separation_report, fisher_discriminant_ratio, mann_whitney_u, FeatureColumn, FeatureGroup};
use fnfpad::synthgen::{generate_dataset, generate_pair, IlluminationModel, MaterialKind, SynthConfig};
use fnfpad::texture::{
    chi_square_distance, glcm_features, lbp_histogram, texture_delta, texture_descriptors, texture_realism_ratio,
    TextureConfig,
};
use fnfpad::{CaptureClass, CaptureLabel, Field, PaiType, PairedCapture, RasterImage};

pub type Check = fn() -> Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    }};
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn cases() -> Vec<(&'static str, Check)> {
    vec![
        ("grayscale_white", grayscale_white),
        ("grayscale_red", grayscale_red),
        ("grayscale_identity", grayscale_identity),
        ("sobel_constant", sobel_constant),
        ("sobel_vertical_ramp", sobel_vertical_ramp),
        ("partition_exact", partition_exact),
        ("partition_floor", partition_floor),
        ("partition_too_small", partition_too_small),
        ("fft_constant", fft_constant),
        ("fft_pure_tone", fft_pure_tone),
        ("radial_zero", radial_zero),
        ("radial_ring", radial_ring),
        ("ocl_grating", ocl_grating),
        ("ocl_constant", ocl_constant),
        ("lcs_square_wave", lcs_square_wave),
        ("lcs_constant", lcs_constant),
        ("local_contrast_constant", local_contrast_constant),
        ("local_contrast_checkerboard", local_contrast_checkerboard),
        ("edge_clarity_constant", edge_clarity_constant),
        ("edge_clarity_scaling", edge_clarity_scaling),
        ("sharpness_constant", sharpness_constant),
        ("sharpness_scaling", sharpness_scaling),
        ("channel_contrast_constant", channel_contrast_constant),
        ("channel_contrast_red_only", channel_contrast_red_only),
        ("channel_contrast_matches_plane", channel_contrast_matches_plane),
        ("edge_energy_constant", edge_energy_constant),
        ("edge_energy_scaling", edge_energy_scaling),
        ("saturation_black", saturation_black),
        ("saturation_white", saturation_white),
        ("saturation_quarter", saturation_quarter),
        ("color_temp_gray", color_temp_gray),
        ("color_temp_two", color_temp_two),
        ("color_temp_zero_blue", color_temp_zero_blue),
        ("pearson_identity", pearson_identity),
        ("pearson_anticorrelation", pearson_anticorrelation),
        ("mi_independent", mi_independent),
        ("mi_one_bit", mi_one_bit),
        ("corr_separation_identical", corr_separation_identical),
        ("corr_separation_gap", corr_separation_gap),
        ("shr_dark", shr_dark),
        ("lbp_constant", lbp_constant),
        ("lbp_bright_centre", lbp_bright_centre),
        ("glcm_constant", glcm_constant),
        ("glcm_transpose", glcm_transpose),
        ("realism_grid", realism_grid),
        ("texture_delta_identical", texture_delta_identical),
        ("texture_delta_disjoint", texture_delta_disjoint),
        ("align_identical", align_identical),
        ("align_circular_shift", align_circular_shift),
        ("diff_identical", diff_identical),
        ("diff_half_gain", diff_half_gain),
        ("sss_square_vs_sine", sss_square_vs_sine),
        ("sss_constant", sss_constant),
        ("amplitude_cv_identical", amplitude_cv_identical),
        ("amplitude_cv_two_populations", amplitude_cv_two_populations),
        ("irregularity_none", irregularity_none),
        ("irregularity_single", irregularity_single),
        ("fdr_equal_means", fdr_equal_means),
        ("fdr_degenerate", fdr_degenerate),
        ("mwu_identical_samples", mwu_identical_samples),
        ("report_identical_classes", report_identical_classes),
        ("report_separated_feature", report_separated_feature),
        ("extract_constant_pair", extract_constant_pair),
        ("extract_deterministic", extract_deterministic),
        ("lda_separated_1d", lda_separated_1d),
        ("lda_identical_classes", lda_identical_classes),
        ("metrics_perfect", metrics_perfect),
        ("metrics_all_genuine", metrics_all_genuine),
        ("synth_deterministic", synth_deterministic),
        ("synth_degenerate_lighting", synth_degenerate_lighting),
        ("dataset_counts", dataset_counts),
        ("dataset_deterministic", dataset_deterministic),
    ]
}

/// Runs every case and returns the names and messages of failures.
pub fn run_all() -> Vec<(&'static str, String)> {
    cases()
        .into_iter()
        .filter_map(|(name, f)| f().err().map(|e| (name, e)))
        .collect()
}

fn constant(w: usize, h: usize, v: f64) -> Field {
    Field::from_fn(w, h, |_, _| v)
}

fn seeded_field(w: usize, h: usize, seed: u64) -> Field {
    let mut rng = fnfpad::rng::SplitMix64::new(seed);
    Field::from_fn(w, h, |_, _| rng.next_f64())
}

fn grayscale_white() -> Result<(), String> {
    let g = to_grayscale(&RasterImage::rgb_from_fn(8, 8, |_, _| [1.0; 3]));
    ensure!(g.channels() == 1, "expected one channel");
    ensure!(g.data().iter().all(|&v| close(v, 1.0, 1e-12)), "white is not 1.0");
    Ok(())
}

fn grayscale_red() -> Result<(), String> {
    let g = to_grayscale(&RasterImage::rgb_from_fn(8, 8, |_, _| [1.0, 0.0, 0.0]));
    ensure!(g.data().iter().all(|&v| v == 0.299), "red is not 0.299");
    Ok(())
}

fn grayscale_identity() -> Result<(), String> {
    let img = RasterImage::from_field(&seeded_field(9, 7, 3));
    ensure!(to_grayscale(&img) == img, "1-channel input changed");
    Ok(())
}

fn sobel_constant() -> Result<(), String> {
    let (gx, gy) = ok(sobel_gradients(&constant(10, 10, 0.3)))?;
    ensure!(
        gx.data().iter().chain(gy.data()).all(|&v| v == 0.0),
        "non-zero gradient"
    );
    Ok(())
}

fn sobel_vertical_ramp() -> Result<(), String> {
    let s = 0.01;
    let (gx, gy) = ok(sobel_gradients(&Field::from_fn(12, 12, |_, y| y as f64 * s)))?;
    for y in 1..11 {
        for x in 1..11 {
            ensure!(
                close(gy.get(x, y), 8.0 * s, 1e-12),
                "gy at ({x},{y}) = {}",
                gy.get(x, y)
            );
            ensure!(gx.get(x, y) == 0.0, "gx at ({x},{y}) = {}", gx.get(x, y));
        }
    }
    Ok(())
}

fn partition_exact() -> Result<(), String> {
    let l = ok(block_partition(&Field::zeros(64, 64), 16))?;
    ensure!((l.cols, l.rows) == (4, 4), "got {}x{}", l.cols, l.rows);
    Ok(())
}

fn partition_floor() -> Result<(), String> {
    let l = ok(block_partition(&Field::zeros(70, 64), 16))?;
    ensure!((l.cols, l.rows) == (4, 4), "got {}x{}", l.cols, l.rows);
    Ok(())
}

fn partition_too_small() -> Result<(), String> {
    ensure!(block_partition(&Field::zeros(15, 15), 16).is_err(), "15x15 accepted");
    Ok(())
}

fn fft_constant() -> Result<(), String> {
    let m = fft2_logmag(&constant(16, 16, 0.7));
    ensure!(m.data().iter().all(|&v| v == 0.0), "non-zero spectrum");
    Ok(())
}

fn fft_pure_tone() -> Result<(), String> {
    let (n, k) = (32usize, 5usize);
    let img = Field::from_fn(n, n, |x, _| 0.5 + 0.3 * (2.0 * PI * (k * x) as f64 / n as f64).cos());
    let m = fft2_logmag(&img);
    let c = n / 2;
    let peak = m.get(c + k, c);
    ensure!(peak > 0.0 && close(m.get(c - k, c), peak, 1e-9), "peaks not symmetric");
    for y in 0..n {
        for x in 0..n {
            if y == c && (x == c + k || x == c - k) {
                continue;
            }
            ensure!(m.get(x, y) <= 1e-9 * peak, "energy at ({x},{y}): {}", m.get(x, y));
        }
    }
    Ok(())
}

fn radial_zero() -> Result<(), String> {
    let p = ok(radial_spectrum(&Field::zeros(32, 32), 8))?;
    ensure!(p.iter().all(|&v| v == 0.0), "non-zero profile");
    Ok(())
}

fn radial_ring() -> Result<(), String> {
    let (n, r, bins) = (64usize, 10.0, 16usize);
    let c = (n / 2) as f64;
    let ring = Field::from_fn(n, n, |x, y| {
        if (x as f64 - c).hypot(y as f64 - c).round() == r {
            1.0
        } else {
            0.0
        }
    });
    let p = ok(radial_spectrum(&ring, bins))?;
    let expected = (r * bins as f64 / c).floor() as usize;
    for (i, &v) in p.iter().enumerate() {
        ensure!((v != 0.0) == (i == expected), "bin {i} = {v}, ring bin {expected}");
    }
    Ok(())
}

fn grating(size: usize, period: f64) -> Field {
    Field::from_fn(size, size, |x, _| 0.5 + 0.4 * (2.0 * PI * x as f64 / period).sin())
}

fn square_wave(w: usize, h: usize, period: usize, lo: f64, hi: f64) -> Field {
    Field::from_fn(w, h, |x, _| if x % period < period / 2 { lo } else { hi })
}

fn ocl_grating() -> Result<(), String> {
    let o = ok(ocl_block(&grating(16, 8.0)))?;
    ensure!(o.valid && close(o.ocl, 1.0, 1e-12), "OCL {}", o.ocl);
    Ok(())
}

fn ocl_constant() -> Result<(), String> {
    let o = ok(ocl_block(&constant(16, 16, 0.4)))?;
    ensure!(o.ocl == 0.0 && !o.valid, "OCL {} valid {}", o.ocl, o.valid);
    Ok(())
}

fn lcs_square_wave() -> Result<(), String> {
    let v = ok(lcs_block(&square_wave(32, 32, 8, 0.2, 0.8), 0.0))?;
    ensure!(v == 1.0, "LCS {v}");
    Ok(())
}

fn lcs_constant() -> Result<(), String> {
    let v = ok(lcs_block(&constant(32, 32, 0.5), 0.0))?;
    ensure!(v == 0.0, "LCS {v}");
    Ok(())
}

fn local_contrast_constant() -> Result<(), String> {
    ensure!(ok(local_contrast(&constant(32, 32, 0.3), 16))? == 0.0, "non-zero");
    Ok(())
}

fn local_contrast_checkerboard() -> Result<(), String> {
    let v = ok(local_contrast(&Field::from_fn(32, 32, |x, y| ((x + y) % 2) as f64), 16))?;
    ensure!(close(v, 0.5, 1e-12), "got {v}");
    Ok(())
}

fn edge_clarity_constant() -> Result<(), String> {
    ensure!(ok(edge_clarity(&constant(16, 16, 0.2)))? == 0.0, "non-zero");
    Ok(())
}

fn edge_clarity_scaling() -> Result<(), String> {
    let f = seeded_field(32, 32, 11);
    let a = 0.37;
    let (e, es) = (ok(edge_clarity(&f))?, ok(edge_clarity(&f.map(|v| a * v)))?);
    ensure!(close(es, a * e, 1e-12), "{es} vs {}", a * e);
    Ok(())
}

fn sharpness_constant() -> Result<(), String> {
    ensure!(ok(sharpness(&constant(9, 9, 0.9)))? == 0.0, "non-zero");
    Ok(())
}

fn sharpness_scaling() -> Result<(), String> {
    let f = seeded_field(32, 32, 12);
    let a = 0.6;
    let (s, ss) = (ok(sharpness(&f))?, ok(sharpness(&f.map(|v| a * v)))?);
    ensure!(close(ss, a * a * s, 1e-12), "{ss} vs {}", a * a * s);
    Ok(())
}

fn channel_contrast_constant() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(32, 32, |_, _| [0.2, 0.5, 0.7]);
    for ch in Channel::ALL {
        ensure!(
            ok(channel_local_contrast(&img, ch, 16))? == 0.0,
            "{} non-zero",
            ch.as_str()
        );
    }
    Ok(())
}

fn channel_contrast_red_only() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(32, 32, |x, y| [((x * 7 + y * 3) % 11) as f64 / 10.0, 0.5, 0.4]);
    ensure!(ok(channel_local_contrast(&img, Channel::R, 16))? > 0.0, "R is zero");
    ensure!(ok(channel_local_contrast(&img, Channel::G, 16))? == 0.0, "G non-zero");
    ensure!(ok(channel_local_contrast(&img, Channel::B, 16))? == 0.0, "B non-zero");
    Ok(())
}

fn channel_contrast_matches_plane() -> Result<(), String> {
    let mut rng = fnfpad::rng::SplitMix64::new(5);
    let img = RasterImage::rgb_from_fn(48, 32, |_, _| [rng.next_f64(), rng.next_f64(), rng.next_f64()]);
    for ch in Channel::ALL {
        let a = ok(channel_local_contrast(&img, ch, 16))?;
        let b = ok(local_contrast(&img.plane(ch.index()), 16))?;
        ensure!(a == b, "{}: {a} vs {b}", ch.as_str());
    }
    Ok(())
}

fn edge_energy_constant() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(16, 16, |_, _| [0.3, 0.3, 0.3]);
    ensure!(ok(channel_edge_energy(&img, Channel::G))? == 0.0, "non-zero");
    Ok(())
}

fn edge_energy_scaling() -> Result<(), String> {
    let mut rng = fnfpad::rng::SplitMix64::new(6);
    let vals: Vec<f64> = (0..256).map(|_| rng.next_f64()).collect();
    let a = 0.5;
    let img = RasterImage::rgb_from_fn(16, 16, |x, y| [vals[y * 16 + x], 0.5, 0.5]);
    let scaled = RasterImage::rgb_from_fn(16, 16, |x, y| [a * vals[y * 16 + x], 0.5, 0.5]);
    let (e, es) = (
        ok(channel_edge_energy(&img, Channel::R))?,
        ok(channel_edge_energy(&scaled, Channel::R))?,
    );
    ensure!(close(es, a * a * e, 1e-12), "{es} vs {}", a * a * e);
    Ok(())
}

fn saturation_black() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(8, 8, |_, _| [0.0; 3]);
    ensure!(
        ok(saturation_fraction(&img, Channel::R, SATURATION_THRESHOLD))? == 0.0,
        "non-zero"
    );
    Ok(())
}

fn saturation_white() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(8, 8, |_, _| [1.0; 3]);
    for ch in Channel::ALL {
        ensure!(ok(saturation_fraction(&img, ch, SATURATION_THRESHOLD))? == 1.0, "not 1");
    }
    Ok(())
}

fn saturation_quarter() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(8, 8, |x, _| [if x < 2 { 1.0 } else { 0.5 }, 0.5, 0.5]);
    ensure!(
        ok(saturation_fraction(&img, Channel::R, SATURATION_THRESHOLD))? == 0.25,
        "not 0.25"
    );
    Ok(())
}

fn color_temp_gray() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(8, 8, |x, y| [((x + y) as f64) / 16.0 + 0.1; 3]);
    ensure!(ok(color_temperature_ratio(&img))? == 1.0, "not 1");
    Ok(())
}

fn color_temp_two() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(8, 8, |_, _| [0.8, 0.3, 0.4]);
    ensure!(close(ok(color_temperature_ratio(&img))?, 2.0, 1e-12), "not 2");
    Ok(())
}

fn color_temp_zero_blue() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(8, 8, |_, _| [0.8, 0.3, 0.0]);
    ensure!(color_temperature_ratio(&img).is_err(), "accepted zero blue");
    Ok(())
}

fn pearson_identity() -> Result<(), String> {
    let mut rng = fnfpad::rng::SplitMix64::new(7);
    let img = RasterImage::rgb_from_fn(8, 8, |_, _| {
        let r = rng.next_f64();
        [r, r, rng.next_f64()]
    });
    let m = ok(pearson_matrix(&img))?;
    ensure!(
        m[0][1].is_some_and(|v| close(v, 1.0, 1e-12)),
        "corr(R,G) = {:?}",
        m[0][1]
    );
    Ok(())
}

fn pearson_anticorrelation() -> Result<(), String> {
    let mut rng = fnfpad::rng::SplitMix64::new(8);
    let img = RasterImage::rgb_from_fn(8, 8, |_, _| {
        let r = rng.next_f64();
        [r, 1.0 - r, rng.next_f64()]
    });
    let m = ok(pearson_matrix(&img))?;
    ensure!(
        m[0][1].is_some_and(|v| close(v, -1.0, 1e-12)),
        "corr(R,G) = {:?}",
        m[0][1]
    );
    Ok(())
}

fn mi_independent() -> Result<(), String> {
    let v = mutual_information(&[0.0, 0.0, 1.0, 1.0], &[0.0, 1.0, 0.0, 1.0], 32);
    ensure!(v.abs() < 1e-15, "MI {v}");
    Ok(())
}

fn mi_one_bit() -> Result<(), String> {
    let r = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
    let v = mutual_information(&r, &r, 32);
    ensure!(close(v, 1.0, 1e-15), "MI {v}");
    Ok(())
}

fn correlation(p: f64) -> ChannelCorrelation {
    let s = Some(p);
    ChannelCorrelation {
        pearson: [[Some(1.0), s, s], [s, Some(1.0), s], [s, s, Some(1.0)]],
        mutual_info: [[1.0, 0.5, 0.5], [0.5, 1.0, 0.5], [0.5, 0.5, 1.0]],
        off_diag_mean_pearson: s,
        off_diag_mean_mi: 0.5,
    }
}

fn corr_separation_identical() -> Result<(), String> {
    let set = vec![correlation(0.7), correlation(0.4)];
    let d = ok(correlation_separation(&set, &set))?;
    ensure!(d.delta_pearson == 0.0 && d.delta_mi == 0.0, "{d:?}");
    Ok(())
}

fn corr_separation_gap() -> Result<(), String> {
    let d = ok(correlation_separation(
        &vec![correlation(0.9); 3],
        &vec![correlation(0.8); 2],
    ))?;
    ensure!(close(d.delta_pearson, 0.1, 1e-12), "{}", d.delta_pearson);
    Ok(())
}

fn shr_dark() -> Result<(), String> {
    let r = ok(specular_highlight_ratio(
        &RasterImage::rgb_from_fn(32, 32, |_, _| [0.05; 3]),
        &SpecularConfig::default(),
    ))?;
    ensure!(
        r.shr == 0.0 && r.component_count == 0,
        "{} {}",
        r.shr,
        r.component_count
    );
    Ok(())
}

fn lbp_constant() -> Result<(), String> {
    let h = ok(lbp_histogram(&constant(8, 8, 0.5)))?;
    ensure!(h[255] == 1.0, "bin 255 = {}", h[255]);
    Ok(())
}

fn lbp_bright_centre() -> Result<(), String> {
    let f = Field::from_fn(3, 3, |x, y| if (x, y) == (1, 1) { 1.0 } else { 0.0 });
    let h = ok(lbp_histogram(&f))?;
    ensure!(h[0] == 1.0, "bin 0 = {}", h[0]);
    Ok(())
}

fn glcm_constant() -> Result<(), String> {
    let g = ok(glcm_features(&constant(8, 8, 0.4), 8, &[(1, 0)]))?;
    let g = g[0];
    ensure!(g.contrast == 0.0 && g.homogeneity == 1.0 && g.energy == 1.0, "{g:?}");
    ensure!(g.correlation.is_none(), "correlation defined");
    Ok(())
}

fn transpose(f: &Field) -> Field {
    Field::from_fn(f.height(), f.width(), |x, y| f.get(y, x))
}

fn glcm_transpose() -> Result<(), String> {
    let f = seeded_field(12, 9, 13);
    let a = ok(glcm_features(&f, 8, &[(1, 0), (2, 1)]))?;
    let b = ok(glcm_features(&transpose(&f), 8, &[(0, 1), (1, 2)]))?;
    for (x, y) in a.iter().zip(&b) {
        ensure!(
            close(x.contrast, y.contrast, 1e-12)
                && close(x.homogeneity, y.homogeneity, 1e-12)
                && close(x.energy, y.energy, 1e-12)
                && close(x.correlation.unwrap_or(0.0), y.correlation.unwrap_or(0.0), 1e-12),
            "{x:?} vs {y:?}"
        );
    }
    Ok(())
}

fn realism_grid() -> Result<(), String> {
    let f = Field::from_fn(128, 128, |x, y| 0.3 + if x % 2 == 0 || y % 2 == 0 { 0.4 } else { 0.0 });
    let v = ok(texture_realism_ratio(&f, 32, 4.0))?;
    ensure!(v == 1.0, "ratio {v}");
    Ok(())
}

fn texture_delta_identical() -> Result<(), String> {
    let d = ok(texture_descriptors(
        &seeded_field(64, 64, 14),
        &TextureConfig::default(),
    ))?;
    let t = ok(texture_delta(&d, &d))?;
    ensure!(t.lbp == 0.0 && t.glcm == 0.0 && t.fourier == 0.0, "{t:?}");
    Ok(())
}

fn texture_delta_disjoint() -> Result<(), String> {
    let mut a = vec![0.0; 256];
    let mut b = vec![0.0; 256];
    a[3] = 1.0;
    b[200] = 1.0;
    ensure!(
        chi_square_distance(&a, &b) == 2.0,
        "distance {}",
        chi_square_distance(&a, &b)
    );
    Ok(())
}

fn textured(w: usize, h: usize) -> Field {
    Field::from_fn(w, h, |x, y| {
        let (x, y) = (x as f64, y as f64);
        0.5 + 0.2 * (0.37 * x + 0.11 * y).sin() + 0.15 * (0.05 * x * y).cos() + 0.1 * (0.9 * y).sin()
    })
}

fn align_identical() -> Result<(), String> {
    let f = textured(64, 64);
    let a = ok(align_pair(&f, &f, 16))?;
    ensure!((a.dx, a.dy) == (0, 0), "shift ({}, {})", a.dx, a.dy);
    Ok(())
}

fn align_circular_shift() -> Result<(), String> {
    let f = textured(64, 64);
    let a = ok(align_pair(&f, &circular_shift(&f, 3, -2), 16))?;
    ensure!((a.dx, a.dy) == (3, -2), "shift ({}, {})", a.dx, a.dy);
    Ok(())
}

fn diff_identical() -> Result<(), String> {
    let f = textured(48, 48);
    let d = ok(differential_image(&f, &f, (0, 0), 16))?;
    ensure!(
        d.diff.data().iter().all(|&v| v == 0.0) && d.diff_energy == 0.0,
        "non-zero D"
    );
    Ok(())
}

fn diff_half_gain() -> Result<(), String> {
    let f = textured(48, 48);
    let d = ok(differential_image(&f, &f.map(|v| 0.5 * v), (0, 0), 16))?;
    ensure!(d.diff.data().iter().all(|v| v.abs() <= 1e-9), "residual after gain");
    Ok(())
}

fn map_of(cols: usize, rows: usize, block: usize, valid: Vec<bool>) -> OclMap {
    let layout = BlockLayout {
        block_size: block,
        cols,
        rows,
    };
    OclMap {
        grid: BlockGrid::new(layout, vec![1.0; cols * rows], valid).expect("grid"),
        orientations: vec![0.0; cols * rows],
    }
}

fn sss_square_vs_sine() -> Result<(), String> {
    let period = 8;
    let sine = Field::from_fn(32, 32, |x, _| 0.5 + 0.3 * (2.0 * PI * x as f64 / period as f64).sin());
    let square = square_wave(32, 32, period, 0.2, 0.8);
    let m = map_of(1, 1, 32, vec![true]);
    let (a, b) = (ok(sss_smoothness(&square, &m))?, ok(sss_smoothness(&sine, &m))?);
    ensure!(a > b, "square {a} <= sine {b}");
    Ok(())
}

fn sss_constant() -> Result<(), String> {
    let f = constant(16, 16, 0.5);
    ensure!(
        ok(sss_smoothness(&f, &map_of(1, 1, 16, vec![true])))? == 0.0,
        "non-zero"
    );
    ensure!(
        sss_smoothness(&f, &map_of(1, 1, 16, vec![false])).is_err(),
        "no error without valid blocks"
    );
    Ok(())
}

fn amplitude_cv_identical() -> Result<(), String> {
    let f = square_wave(32, 32, 4, 0.3, 0.6);
    let v = ok(ridge_amplitude_cv(&f, &map_of(2, 2, 16, vec![true; 4])))?;
    ensure!(v.abs() < 1e-12, "CV {v}");
    Ok(())
}

fn amplitude_cv_two_populations() -> Result<(), String> {
    let f = Field::from_fn(32, 32, |x, _| {
        let amp = if x < 16 { 0.2 } else { 0.4 };
        if x % 4 < 2 {
            0.5 - amp / 2.0
        } else {
            0.5 + amp / 2.0
        }
    });
    let v = ok(ridge_amplitude_cv(&f, &map_of(2, 2, 16, vec![true; 4])))?;
    ensure!(close(v, 1.0 / 3.0, 1e-12), "CV {v}");
    Ok(())
}

fn spec(shr: f64, count: usize, cv: f64) -> SpecularReport {
    SpecularReport {
        shr,
        width: 0,
        height: 0,
        highlight_mask: Vec::new(),
        component_count: count,
        component_size_cv: cv,
    }
}

fn irregularity_none() -> Result<(), String> {
    ensure!(
        highlight_irregularity(&spec(0.0, 0, 0.0), &spec(0.0, 0, 0.0)) == 0.0,
        "non-zero"
    );
    Ok(())
}

fn irregularity_single() -> Result<(), String> {
    ensure!(
        highlight_irregularity(&spec(0.2, 1, 0.0), &spec(0.0, 0, 0.0)) == 0.0,
        "non-zero"
    );
    Ok(())
}

fn fdr_equal_means() -> Result<(), String> {
    ensure!(
        ok(fisher_discriminant_ratio(&[1.0, 3.0], &[0.0, 4.0]))? == 0.0,
        "non-zero"
    );
    Ok(())
}

fn fdr_degenerate() -> Result<(), String> {
    ensure!(fisher_discriminant_ratio(&[0.0, 0.0], &[1.0, 1.0]).is_err(), "no error");
    Ok(())
}

fn mwu_identical_samples() -> Result<(), String> {
    let r = ok(mann_whitney_u(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]))?;
    ensure!(r.u == 4.5 && r.p_value > 0.9, "U {} p {}", r.u, r.p_value);
    Ok(())
}

fn report_identical_classes() -> Result<(), String> {
    let cols: Vec<FeatureColumn> = (0..4)
        .map(|i| {
            let v: Vec<f64> = (0..6).map(|j| (i * 7 + j * 3) as f64 % 5.0).collect();
            FeatureColumn {
                name: format!("f{i}_flash"),
                genuine: v.clone(),
                spoof: v,
            }
        })
        .collect();
    let r = ok(build_separation_report(&cols, None))?;
    for f in &r.features {
        ensure!(
            f.fdr == Some(0.0) && f.delta == 0.0,
            "{}: fdr {:?} delta {}",
            f.name,
            f.fdr,
            f.delta
        );
    }
    Ok(())
}

fn report_separated_feature() -> Result<(), String> {
    let noisy = |k: usize| (0..8).map(|j| ((j * 5 + k) % 7) as f64).collect::<Vec<_>>();
    let cols = vec![
        FeatureColumn {
            name: "a_flash".into(),
            genuine: noisy(0),
            spoof: noisy(3),
        },
        FeatureColumn {
            name: "b_flash".into(),
            genuine: (0..8).map(|j| 10.0 + 0.1 * j as f64).collect(),
            spoof: (0..8).map(|j| 0.1 * j as f64).collect(),
        },
        FeatureColumn {
            name: "c_flash".into(),
            genuine: noisy(1),
            spoof: noisy(2),
        },
    ];
    let r = ok(build_separation_report(&cols, None))?;
    let top = r.top_fdr(FeatureGroup::Flash).map(|f| f.name.as_str());
    ensure!(top == Some("b_flash"), "top feature {top:?}");
    Ok(())
}

fn genuine_label(id: &str) -> CaptureLabel {
    CaptureLabel::new(id, "subject", 1, CaptureClass::Genuine, PaiType::None).expect("label")
}

fn extract_constant_pair() -> Result<(), String> {
    let img = RasterImage::rgb_from_fn(128, 128, |_, _| [0.5, 0.4, 0.3]);
    let pair = ok(PairedCapture::new(img.clone(), img, genuine_label("const")))?;
    let a = ok(analyze_pair(&pair, &ExtractConfig::default()))?;
    let v = a.feature_vector();
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        let is_delta = FeatureGroup::from_name(name) == FeatureGroup::Delta
            || matches!(
                *name,
                "lbp_delta" | "glcm_delta" | "fourier_delta" | "diff_energy" | "diff_structure"
            );
        if is_delta {
            ensure!(v.values[i] == 0.0, "{name} = {}", v.values[i]);
        }
    }
    ensure!(!v.flags.is_empty(), "no flags recorded");
    Ok(())
}

fn extract_deterministic() -> Result<(), String> {
    let cfg = SynthConfig::default();
    let pair = ok(cfg.generate(42, MaterialKind::Genuine))?;
    let a = ok(extract_features(&pair, &ExtractConfig::default()))?;
    let b = ok(extract_features(
        &ok(cfg.generate(42, MaterialKind::Genuine))?,
        &ExtractConfig::default(),
    ))?;
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    ensure!(
        bits(&a.values) == bits(&b.values) && a.flags == b.flags,
        "vectors differ"
    );
    Ok(())
}

fn one_d(values: &[f64], labels: &[CaptureClass]) -> Result<Dataset, String> {
    ok(Dataset::new(
        vec!["x".into()],
        values.iter().map(|&v| vec![v]).collect(),
        labels.to_vec(),
    ))
}

fn lda_separated_1d() -> Result<(), String> {
    use CaptureClass::{Genuine, Spoof};
    let data = one_d(&[0.0, 0.1, 1.0, 1.1], &[Genuine, Genuine, Spoof, Spoof])?;
    let model = ok(train_fisher_lda(&data, 1e-6))?;
    let predicted = ok(model.predict_dataset(&data))?;
    ensure!(predicted == data.labels, "predictions {predicted:?}");
    Ok(())
}

fn lda_identical_classes() -> Result<(), String> {
    let mut rng = fnfpad::rng::SplitMix64::new(21);
    let n = 200;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let row = vec![rng.normal(), rng.normal()];
        rows.push(row.clone());
        labels.push(CaptureClass::Genuine);
        rows.push(row);
        labels.push(CaptureClass::Spoof);
        let _ = i;
    }
    let data = ok(Dataset::new(vec!["a".into(), "b".into()], rows, labels))?;
    let model = ok(train_fisher_lda(&data, 1e-6))?;
    let mean_score = |class: CaptureClass| {
        let s: Vec<f64> = data
            .rows
            .iter()
            .zip(&data.labels)
            .filter(|(_, l)| **l == class)
            .map(|(r, _)| model.score(r, &[false, false]))
            .collect();
        s.iter().sum::<f64>() / s.len() as f64
    };
    let (g, s) = (mean_score(CaptureClass::Genuine), mean_score(CaptureClass::Spoof));
    ensure!(close(g, s, 1e-9), "projected means {g} vs {s}");
    let acc = ok(fnfpad::classify::evaluate(&model, &data))?.accuracy;
    ensure!((acc - 0.5).abs() <= 0.05, "accuracy {acc}");
    Ok(())
}

fn metrics_perfect() -> Result<(), String> {
    use CaptureClass::{Genuine, Spoof};
    let t = [Genuine, Spoof, Spoof, Genuine];
    let m = ok(metrics_from_predictions(&t, &t))?;
    ensure!(
        m.accuracy == 1.0 && m.apcer == Some(0.0) && m.bpcer == Some(0.0),
        "{m:?}"
    );
    Ok(())
}

fn metrics_all_genuine() -> Result<(), String> {
    use CaptureClass::{Genuine, Spoof};
    let m = ok(metrics_from_predictions(
        &[Genuine, Spoof, Genuine, Spoof],
        &[Genuine; 4],
    ))?;
    ensure!(
        m.accuracy == 0.5 && m.apcer == Some(1.0) && m.bpcer == Some(0.0),
        "{m:?}"
    );
    Ok(())
}

fn synth_deterministic() -> Result<(), String> {
    let cfg = SynthConfig::default();
    for kind in MaterialKind::ALL {
        let a = ok(cfg.generate(99, kind))?;
        let b = ok(cfg.generate(99, kind))?;
        ensure!(
            a.flash.to_u8() == b.flash.to_u8() && a.nonflash.to_u8() == b.nonflash.to_u8(),
            "{kind:?} differs"
        );
    }
    Ok(())
}

fn synth_degenerate_lighting() -> Result<(), String> {
    let cfg = SynthConfig::default();
    let mut spec = cfg.gen_spec(5);
    spec.illumination = IlluminationModel::uniform(0.6);
    let mut material = cfg.material(MaterialKind::Genuine).clone();
    material.specular_strength = 0.0;
    material.micro_highlight_density = 0.0;
    let pair = ok(generate_pair(&spec, &material))?;
    ensure!(pair.flash == pair.nonflash, "flash and non-flash differ");
    Ok(())
}

fn scratch_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("fnfpad-analytic-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn dataset_counts() -> Result<(), String> {
    let dir = scratch_dir("counts");
    let counts = [(MaterialKind::Genuine, 2), (MaterialKind::Print, 2)];
    ok(generate_dataset(
        &dir,
        &counts,
        7,
        &SynthConfig::default(),
        ImageFormat::Png,
    ))?;
    let mut images = 0;
    for entry in ok(std::fs::read_dir(&dir))? {
        let name = ok(entry)?.file_name().to_string_lossy().into_owned();
        if name.ends_with(".png") {
            images += 1;
        }
    }
    let manifest = ok(std::fs::read_to_string(dir.join(fnfpad::manifest::MANIFEST_FILE)))?;
    let lines = manifest.lines().filter(|l| !l.trim().is_empty()).count();
    let _ = std::fs::remove_dir_all(&dir);
    ensure!(images == 8 && lines == 4, "{images} images, {lines} manifest lines");
    Ok(())
}

fn dir_contents(dir: &std::path::Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for entry in ok(std::fs::read_dir(dir))? {
        let entry = ok(entry)?;
        out.push((
            entry.file_name().to_string_lossy().into_owned(),
            ok(std::fs::read(entry.path()))?,
        ));
    }
    out.sort();
    Ok(out)
}

fn dataset_deterministic() -> Result<(), String> {
    let (a, b) = (scratch_dir("det-a"), scratch_dir("det-b"));
    let counts = [(MaterialKind::Screen, 1), (MaterialKind::Molded, 1)];
    for d in [&a, &b] {
        ok(generate_dataset(
            d,
            &counts,
            3,
            &SynthConfig::default(),
            ImageFormat::Pnm,
        ))?;
    }
    let same = dir_contents(&a)? == dir_contents(&b)?;
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);
    ensure!(same, "outputs differ");
    Ok(())
}
