//! Subcommand implementations.

use std::path::{Path, PathBuf};

use fnfpad::classify::{
    analyze_pair, feature_columns, metrics_from_predictions, train_fisher_lda, Dataset, ExtractConfig, FeatureVector,
    LinearModel, FEATURE_NAMES,
};
use fnfpad::illumcues::pearson_matrix;
use fnfpad::imgcore::{fft2_logmag, radial_spectrum, CaptureClass};
use fnfpad::io::{load_image, ImageFormat};
use fnfpad::manifest::{read_manifest, write_manifest, ManifestRecord, MANIFEST_FILE};
use fnfpad::quality::{ocl_block, ocl_map, ridge_profile};
use fnfpad::stats::build_separation_report;
use fnfpad::synthgen::{dataset_plan, write_sample, MaterialKind, SynthConfig};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::report::{Prediction, RunReport};
use crate::{svg, table};
use crate::{ClassifyArgs, ExtractArgs, FormatArg, RenderArgs, RenderKind, StatsArgs, SynthArgs};

pub const FEATURES_FILE: &str = "features.csv";
pub const REPORT_FILE: &str = "report.json";
pub const MODEL_FILE: &str = "model.txt";
pub const METRICS_FILE: &str = "metrics.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    /// Some inputs were skipped; maps to exit code 2.
    Partial,
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn parse_classes(names: &[String]) -> CliResult<Vec<MaterialKind>> {
    let mut kinds = Vec::new();
    for name in names {
        let kind = MaterialKind::parse(name.trim()).ok_or_else(|| {
            let valid: Vec<&str> = MaterialKind::ALL.iter().map(|k| k.as_str()).collect();
            CliError::Usage(format!("unknown class {name:?}; valid classes: {}", valid.join(", ")))
        })?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

pub fn synth(args: &SynthArgs) -> CliResult<Outcome> {
    let kinds = parse_classes(&args.classes)?;
    let config = match &args.config {
        Some(path) => SynthConfig::from_json(&read_text(path)?)?,
        None => SynthConfig::default(),
    };
    let format = match args.format {
        FormatArg::Png => ImageFormat::Png,
        FormatArg::Pnm => ImageFormat::Pnm,
    };
    let counts: Vec<(MaterialKind, usize)> = kinds.iter().map(|&k| (k, args.count)).collect();
    let plan = dataset_plan(&counts, args.seed);
    create_dir(&args.out)?;
    let records = pool(args.jobs)?.install(|| {
        plan.par_iter()
            .map(|s| write_sample(&args.out, s, &config, format))
            .collect::<fnfpad::Result<Vec<ManifestRecord>>>()
    })?;
    write_manifest(&args.out.join(MANIFEST_FILE), &records)?;
    Ok(Outcome::Complete)
}

fn extract_config(args: &ExtractArgs) -> CliResult<ExtractConfig> {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str(&read_text(path)?).map_err(|e| CliError::format(path, e.to_string()))?,
        None => ExtractConfig::default(),
    };
    if let Some(b) = args.ocl_block {
        cfg.quality.ocl_block = b;
    }
    if let Some(b) = args.lcs_block {
        cfg.quality.lcs_block = b;
    }
    if let Some(p) = args.patch_size {
        cfg.quality.patch_size = p;
    }
    if let Some(b) = args.realism_block {
        cfg.texture.realism_block = b;
    }
    Ok(cfg)
}

fn extract_one(record: &ManifestRecord, base: &Path, cfg: &ExtractConfig) -> Result<FeatureVector, String> {
    let pair = record
        .load(base)
        .map_err(|e| format!("pair {}: unreadable: {e}", record.pair_id))?;
    let mut v = analyze_pair(&pair, cfg)
        .map_err(|e| format!("pair {}: analysis failed: {e}", record.pair_id))?
        .feature_vector();
    v.pair_id = record.pair_id.clone();
    Ok(v)
}

pub fn extract(args: &ExtractArgs) -> CliResult<Outcome> {
    let cfg = extract_config(args)?;
    let mut records = read_manifest(&args.manifest)?;
    records.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    let base: PathBuf = args.manifest.parent().map(Path::to_path_buf).unwrap_or_default();

    let results: Vec<Result<FeatureVector, String>> =
        pool(args.jobs)?.install(|| records.par_iter().map(|r| extract_one(r, &base, &cfg)).collect());

    let mut report = RunReport::new("extract", serde_json::to_value(&cfg)?, args.deterministic);
    let mut vectors = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => vectors.push(v),
            Err(msg) => {
                eprintln!("warning: {msg}");
                report.warnings.push(msg);
            }
        }
    }
    create_dir(&args.out)?;
    table::write_features(&args.out.join(FEATURES_FILE), &vectors)?;
    report.feature_names = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    report.pairs = vectors.iter().map(Into::into).collect();
    report.write(&args.out.join(REPORT_FILE))?;
    Ok(if report.warnings.is_empty() {
        Outcome::Complete
    } else {
        Outcome::Partial
    })
}

fn class_count(vectors: &[FeatureVector], class: CaptureClass) -> usize {
    vectors.iter().filter(|v| v.class == class).count()
}

pub fn stats(args: &StatsArgs) -> CliResult<Outcome> {
    let vectors = table::read_features(&args.features)?;
    for class in [CaptureClass::Genuine, CaptureClass::Spoof] {
        let n = class_count(&vectors, class);
        if n < 2 {
            return Err(CliError::Usage(format!(
                "{}: need at least 2 {} samples, found {n}",
                args.features.display(),
                class.as_str()
            )));
        }
    }
    let mut report = RunReport::new(
        "stats",
        serde_json::json!({ "features": args.features.display().to_string() }),
        args.deterministic,
    );
    let (usable, dropped): (Vec<_>, Vec<_>) = feature_columns(&vectors)
        .into_iter()
        .partition(|c| c.genuine.len() >= 2 && c.spoof.len() >= 2);
    for c in dropped {
        report.warnings.push(format!(
            "{}: fewer than 2 non-imputed samples in a class, skipped",
            c.name
        ));
    }
    let separation = build_separation_report(&usable, None)?;
    for f in &separation.features {
        report
            .warnings
            .extend(f.flags.iter().map(|flag| format!("{}: {flag}", f.name)));
    }
    report.separation = Some(separation);
    report.write(&args.out)?;
    Ok(Outcome::Complete)
}

fn load_dataset(path: &Path) -> CliResult<(Vec<FeatureVector>, Dataset)> {
    let vectors = table::read_features(path)?;
    if vectors.is_empty() {
        return Err(CliError::format(path, "no feature rows"));
    }
    let data = Dataset::from_vectors(&vectors)?;
    Ok((vectors, data))
}

fn predictions(model: &LinearModel, set: &'static str, vectors: &[FeatureVector]) -> Vec<Prediction> {
    vectors
        .iter()
        .map(|v| Prediction {
            set,
            pair_id: v.pair_id.clone(),
            label: v.class.as_str().into(),
            score: model.score(&v.values, &v.imputed),
            predicted: model.predict(&v.values, &v.imputed).as_str().into(),
        })
        .collect()
}

fn score_set(
    model: &LinearModel,
    set: &'static str,
    vectors: &[FeatureVector],
    data: &Dataset,
    report: &mut RunReport,
) -> CliResult<fnfpad::classify::Metrics> {
    let preds = predictions(model, set, vectors);
    let predicted: Vec<CaptureClass> = model.predict_dataset(data)?;
    report.predictions.extend(preds);
    Ok(metrics_from_predictions(&data.labels, &predicted)?)
}

pub fn classify(args: &ClassifyArgs) -> CliResult<Outcome> {
    if args.model.is_some() && args.test.is_none() {
        return Err(CliError::Usage("--model needs --test data to evaluate".into()));
    }
    let config = serde_json::json!({
        "train": args.train.as_ref().map(|p| p.display().to_string()),
        "test": args.test.as_ref().map(|p| p.display().to_string()),
        "model": args.model.as_ref().map(|p| p.display().to_string()),
        "ridge": args.ridge,
    });
    let mut report = RunReport::new("classify", config, args.deterministic);
    create_dir(&args.out)?;

    let model = match (&args.model, &args.train) {
        (Some(path), _) => LinearModel::from_text(&read_text(path)?)?,
        (None, Some(train)) => {
            let (vectors, data) = load_dataset(train)?;
            let model = train_fisher_lda(&data, args.ridge)?;
            let path = args.out.join(MODEL_FILE);
            std::fs::write(&path, model.to_text()).map_err(|e| CliError::io(&path, e))?;
            report.train_metrics = Some(score_set(&model, "train", &vectors, &data, &mut report)?);
            model
        }
        (None, None) => return Err(CliError::Usage("one of --train or --model is required".into())),
    };
    if let Some(test) = &args.test {
        let (vectors, data) = load_dataset(test)?;
        report.test_metrics = Some(score_set(&model, "test", &vectors, &data, &mut report)?);
    }
    report.feature_names = model.feature_names.clone();
    report.write(&args.out.join(METRICS_FILE))?;
    Ok(Outcome::Complete)
}

pub fn render(args: &RenderArgs) -> CliResult<Outcome> {
    let img = load_image(&args.input)?;
    let title = args.input.display().to_string();
    let svg = match args.kind {
        RenderKind::OclMap => {
            let map = ocl_map(&img.luminance(), args.block_size.unwrap_or(16))?;
            svg::block_map(&map.grid, &title)
        }
        RenderKind::LcsProfile => {
            let lum = img.luminance();
            let bs = args.block_size.unwrap_or(32);
            if bs > lum.width() || bs > lum.height() {
                return Err(fnfpad::Error::BlockTooLarge {
                    block: bs,
                    width: lum.width(),
                    height: lum.height(),
                }
                .into());
            }
            let block = lum.crop((lum.width() - bs) / 2, (lum.height() - bs) / 2, bs, bs);
            let orientation = ocl_block(&block)?;
            svg::profile(
                &ridge_profile(&block, orientation.orientation),
                &title,
                "position across ridges",
            )
        }
        RenderKind::CorrHeatmap => svg::heatmap(&pearson_matrix(&img)?, &title),
        RenderKind::RadialSpectrum => {
            let profile = radial_spectrum(&fft2_logmag(&img.luminance()), args.bins)?;
            svg::profile(&profile, &title, "radial frequency bin")
        }
    };
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    std::fs::write(&args.out, svg).map_err(|e| CliError::io(&args.out, e))?;
    Ok(Outcome::Complete)
}
