//! JSON-lines dataset manifest: one capture pair per line.
//!
//! ```text
//! {"pair_id":"genuine-0000","subject":"s1","session":1,"label":"genuine","pai_type":"none","flash":"a_f.png","nonflash":"a_n.png"}
//! ```
//!
//! Image paths are resolved relative to the manifest's directory.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{CaptureClass, CaptureLabel, PaiType, PairedCapture};
use crate::io::load_image;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub pair_id: String,
    pub subject: String,
    pub session: u32,
    pub label: CaptureClass,
    pub pai_type: PaiType,
    pub flash: String,
    pub nonflash: String,
}

impl ManifestRecord {
    pub fn capture_label(&self) -> Result<CaptureLabel> {
        CaptureLabel::new(
            self.pair_id.clone(),
            self.subject.clone(),
            self.session,
            self.label,
            self.pai_type,
        )
    }

    /// Load both images, resolving paths against `base`.
    pub fn load(&self, base: &Path) -> Result<PairedCapture> {
        let flash = load_image(&resolve(base, &self.flash))?;
        let nonflash = load_image(&resolve(base, &self.nonflash))?;
        PairedCapture::new(flash, nonflash, self.capture_label()?)
    }
}

pub fn resolve(base: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Parse manifest text. Blank lines are skipped; line numbers in errors are
/// 1-based.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Manifest { line: line_no, message };
        if line.trim().is_empty() {
            continue;
        }
        let rec: ManifestRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        if rec.pair_id.is_empty() {
            return Err(err("empty pair_id".into()));
        }
        if rec.flash.is_empty() || rec.nonflash.is_empty() {
            return Err(err("empty image path".into()));
        }
        rec.capture_label().map_err(|e| err(e.to_string()))?;
        if !seen.insert(rec.pair_id.clone()) {
            return Err(err(format!("duplicate pair_id {:?}", rec.pair_id)));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text)
}

pub fn format_manifest(records: &[ManifestRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}", serde_json::to_string(r)?);
    }
    Ok(out)
}

pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<()> {
    std::fs::write(path, format_manifest(records)?).map_err(|e| Error::io(path, e))
}
