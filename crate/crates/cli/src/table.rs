//! Feature CSV: `pair_id,label,pai_type,<canonical features>,flags`.
//!
//! Numbers use Rust's shortest round-trip formatting; flags are joined with
//! `;`. Imputed entries are recovered from their `imputed:<feature>` flags.

use std::path::Path;

use fnfpad::classify::{FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
use fnfpad::{CaptureClass, PaiType};

use crate::error::{CliError, CliResult};

const FLAG_SEPARATOR: &str = ";";

pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

pub fn header() -> Vec<String> {
    let mut h = vec!["pair_id".to_string(), "label".into(), "pai_type".into()];
    h.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    h.push("flags".into());
    h
}

pub fn write_features(path: &Path, vectors: &[FeatureVector]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(header())?;
    for v in vectors {
        let mut row = vec![v.pair_id.clone(), v.class.as_str().into(), v.pai_type.as_str().into()];
        row.extend(v.values.iter().map(|&x| format_number(x)));
        row.push(v.flags.join(FLAG_SEPARATOR));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

fn csv_io(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::format(path, format!("{other:?}")),
    }
}

pub fn read_features(path: &Path) -> CliResult<Vec<FeatureVector>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_io(path, e))?;
    let expected = header();
    let got: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if got != expected {
        return Err(CliError::format(
            path,
            "header does not match the canonical feature columns",
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |msg: String| CliError::format(path, format!("line {line}: {msg}"));
        let class = CaptureClass::parse(&rec[1]).ok_or_else(|| bad(format!("unknown label {:?}", &rec[1])))?;
        let pai_type = PaiType::parse(&rec[2]).ok_or_else(|| bad(format!("unknown pai_type {:?}", &rec[2])))?;
        let mut values = Vec::with_capacity(FEATURE_COUNT);
        for (j, name) in FEATURE_NAMES.iter().enumerate() {
            let field = &rec[3 + j];
            let v: f64 = field
                .parse()
                .map_err(|_| bad(format!("{name}: not a number: {field:?}")))?;
            if !v.is_finite() {
                return Err(bad(format!("{name}: non-finite value")));
            }
            values.push(v);
        }
        let flag_field = &rec[3 + FEATURE_COUNT];
        let flags: Vec<String> = if flag_field.is_empty() {
            Vec::new()
        } else {
            flag_field.split(FLAG_SEPARATOR).map(str::to_string).collect()
        };
        let imputed = FEATURE_NAMES
            .iter()
            .map(|n| flags.iter().any(|f| f.strip_prefix("imputed:") == Some(n)))
            .collect();
        out.push(FeatureVector {
            pair_id: rec[0].to_string(),
            class,
            pai_type,
            values,
            imputed,
            flags,
        });
    }
    Ok(out)
}
