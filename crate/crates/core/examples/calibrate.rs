//! Per-class feature means and top separations on the frozen generator.
//!
//! `cargo run --release --example calibrate [count]`

use fnfpad::classify::{extract_features, feature_columns, ExtractConfig, FeatureVector, FEATURE_NAMES};
use fnfpad::stats::{build_separation_report, FeatureGroup};
use fnfpad::synthgen::{MaterialKind, SynthConfig};

fn batch(cfg: &SynthConfig, kind: MaterialKind, count: u64) -> Vec<FeatureVector> {
    let seeds: Vec<u64> = (0..count).collect();
    let ex = &ExtractConfig::default();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(seeds.len().div_ceil(workers).max(1))
            .map(|chunk| {
                s.spawn(move || {
                    chunk
                        .iter()
                        .map(|&sd| extract_features(&cfg.generate(sd, kind).unwrap(), ex).unwrap())
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    })
}

fn main() {
    let count = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50);
    let cfg = SynthConfig::default();
    let t = std::time::Instant::now();
    let sets: Vec<(MaterialKind, Vec<FeatureVector>)> =
        MaterialKind::ALL.iter().map(|&k| (k, batch(&cfg, k, count))).collect();
    eprintln!("extracted {} pairs in {:?}", 4 * count, t.elapsed());

    print!("{:28}", "feature");
    for (k, _) in &sets {
        print!("{:>12}", k.as_str());
    }
    println!();
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        print!("{name:28}");
        for (_, v) in &sets {
            let m = v.iter().map(|f| f.values[i]).sum::<f64>() / v.len() as f64;
            print!("{m:>12.5}");
        }
        println!();
    }
    let all: Vec<FeatureVector> = sets.into_iter().flat_map(|(_, v)| v).collect();
    let imputed: usize = all.iter().map(|f| f.imputed.iter().filter(|&&b| b).count()).sum();
    println!("imputed entries: {imputed}");

    let report = build_separation_report(&feature_columns(&all), None).unwrap();
    for g in [
        FeatureGroup::Flash,
        FeatureGroup::Nonflash,
        FeatureGroup::Delta,
        FeatureGroup::Pair,
    ] {
        if let Some(top) = report.top_fdr(g) {
            println!("top {g:?}: {} fdr {:?}", top.name, top.fdr);
        }
    }
}
