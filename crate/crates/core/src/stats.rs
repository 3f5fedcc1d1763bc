//! Two-class separation statistics: Fisher discriminant ratio, Mann-Whitney U
//! and per-feature genuine/spoof summaries.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest pooled sample size for which the exact U distribution is enumerated.
pub const EXACT_MWU_MAX_N: usize = 12;

/// Arithmetic mean, accumulated relative to the first sample so constant
/// input returns that constant exactly.
pub fn mean(xs: &[f64]) -> f64 {
    let Some(&x0) = xs.first() else {
        return 0.0;
    };
    x0 + xs.iter().map(|x| x - x0).sum::<f64>() / xs.len() as f64
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Coefficient of variation `std / mean` (population std); 0 when the mean is 0.
pub fn coefficient_of_variation(xs: &[f64]) -> f64 {
    let m = mean(xs);
    if m == 0.0 {
        return 0.0;
    }
    std_dev(xs) / m
}

/// Percentile in `[0, 100]` with linear interpolation between order statistics.
pub fn percentile(xs: &[f64], pct: f64) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    percentile_sorted(&sorted, pct)
}

pub(crate) fn percentile_sorted(sorted: &[f64], pct: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = (pct / 100.0).clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    percentile(xs, 50.0)
}

/// `(mean_a - mean_b)^2 / (var_a + var_b)` with population variances.
pub fn fisher_discriminant_ratio(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len().min(b.len());
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let diff = mean(a) - mean(b);
    let denom = variance(a) + variance(b);
    if denom == 0.0 {
        return if diff == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::DegenerateSeparation)
        };
    }
    Ok(diff * diff / denom)
}

/// Which p-value route [`mann_whitney_u`] took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    /// Two-sided p-value in `(0, 1]`.
    pub p_value: f64,
    pub method: PValueMethod,
}

/// Midranks (1-based) of the pooled sample plus the tie-group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = pooled.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; n];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Exact null distribution of U for sample sizes `(na, nb)` without ties:
/// `counts[u]` labelings give statistic `u`.
fn exact_u_distribution(na: usize, nb: usize) -> Vec<u64> {
    let n = na + nb;
    let mut counts = vec![0u64; na * nb + 1];
    let offset = na * (na + 1) / 2;
    fn walk(next: usize, n: usize, left: usize, rank_sum: usize, offset: usize, counts: &mut [u64]) {
        if left == 0 {
            counts[rank_sum - offset] += 1;
            return;
        }
        for r in next..=n - left + 1 {
            walk(r + 1, n, left - 1, rank_sum + r, offset, counts);
        }
    }
    walk(1, n, na, 0, offset, &mut counts);
    counts
}

fn u_statistic(a: &[f64], b: &[f64]) -> Result<(f64, Vec<usize>)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let na = a.len();
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    Ok((rank_sum_a - (na * (na + 1)) as f64 / 2.0, ties))
}

/// Mann-Whitney U test for sample `a` against `b`, two-sided.
///
/// Exact enumeration when `|a| + |b| <= 12` and there are no ties, otherwise
/// the normal approximation with tie and continuity corrections.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    let (_, ties) = u_statistic(a, b)?;
    if a.len() + b.len() <= EXACT_MWU_MAX_N && ties.is_empty() {
        mann_whitney_exact(a, b)
    } else {
        mann_whitney_normal(a, b)
    }
}

/// Exact two-sided p-value from the permutation distribution of U. Only
/// defined without ties; the cost grows as `C(|a| + |b|, |a|)`.
pub fn mann_whitney_exact(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    let (u, ties) = u_statistic(a, b)?;
    if !ties.is_empty() {
        return Err(Error::InvalidParameter(
            "exact Mann-Whitney test needs untied samples".into(),
        ));
    }
    let dist = exact_u_distribution(a.len(), b.len());
    let total: u64 = dist.iter().sum();
    let u_idx = u.round() as usize;
    let lower: u64 = dist[..=u_idx].iter().sum();
    let upper: u64 = dist[u_idx..].iter().sum();
    let p = (2.0 * lower.min(upper) as f64 / total as f64).min(1.0);
    Ok(MannWhitney {
        u,
        p_value: p,
        method: PValueMethod::Exact,
    })
}

/// Normal approximation with tie and continuity corrections.
pub fn mann_whitney_normal(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    let (u, ties) = u_statistic(a, b)?;
    let (naf, nbf) = (a.len() as f64, b.len() as f64);
    let nf = naf + nbf;
    let mu = naf * nbf / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (nf * (nf - 1.0));
    let var = naf * nbf / 12.0 * ((nf + 1.0) - tie_term);
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(MannWhitney {
        u,
        p_value: p.max(f64::MIN_POSITIVE),
        method: PValueMethod::Normal,
    })
}

/// Illumination a feature is derived from, read off its name suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Flash,
    Nonflash,
    /// Flash minus non-flash difference of a single-image metric.
    Delta,
    /// Metrics defined only on the pair (texture deltas, differential cues).
    Pair,
}

impl FeatureGroup {
    pub fn from_name(name: &str) -> Self {
        if name.ends_with("_nonflash") {
            FeatureGroup::Nonflash
        } else if name.ends_with("_flash") {
            FeatureGroup::Flash
        } else if name.ends_with("_delta") {
            FeatureGroup::Delta
        } else {
            FeatureGroup::Pair
        }
    }
}

/// Per-class samples of one named feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    pub name: String,
    pub genuine: Vec<f64>,
    pub spoof: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSeparation {
    pub name: String,
    pub group: FeatureGroup,
    pub n_genuine: usize,
    pub n_spoof: usize,
    pub genuine_mean: f64,
    pub genuine_std: f64,
    pub spoof_mean: f64,
    pub spoof_std: f64,
    /// `None` when both classes are constant but distinct.
    pub fdr: Option<f64>,
    pub u_statistic: f64,
    pub p_value: f64,
    pub p_method: PValueMethod,
    /// `genuine_mean - spoof_mean`.
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Statistic used for class gaps ("mean").
    pub delta_convention: String,
    pub features: Vec<FeatureSeparation>,
}

impl SeparationReport {
    pub fn get(&self, name: &str) -> Option<&FeatureSeparation> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Feature with the largest finite FDR within `group`.
    pub fn top_fdr(&self, group: FeatureGroup) -> Option<&FeatureSeparation> {
        self.features
            .iter()
            .filter(|f| f.group == group && f.fdr.is_some())
            .max_by(|a, b| a.fdr.unwrap().total_cmp(&b.fdr.unwrap()))
    }
}

pub fn separate_feature(col: &FeatureColumn) -> Result<FeatureSeparation> {
    let mut flags = Vec::new();
    let fdr = match fisher_discriminant_ratio(&col.genuine, &col.spoof) {
        Ok(v) => Some(v),
        Err(Error::DegenerateSeparation) => {
            flags.push("degenerate separation".to_string());
            None
        }
        Err(e) => return Err(e),
    };
    let mw = mann_whitney_u(&col.genuine, &col.spoof)?;
    let (gm, sm) = (mean(&col.genuine), mean(&col.spoof));
    Ok(FeatureSeparation {
        name: col.name.clone(),
        group: FeatureGroup::from_name(&col.name),
        n_genuine: col.genuine.len(),
        n_spoof: col.spoof.len(),
        genuine_mean: gm,
        genuine_std: std_dev(&col.genuine),
        spoof_mean: sm,
        spoof_std: std_dev(&col.spoof),
        fdr,
        u_statistic: mw.u,
        p_value: mw.p_value,
        p_method: mw.method,
        delta: gm - sm,
        flags,
    })
}

/// Per-feature statistics in the column order given, optionally restricted
/// to one illumination group.
pub fn build_separation_report(
    columns: &[FeatureColumn],
    illumination: Option<FeatureGroup>,
) -> Result<SeparationReport> {
    let features = columns
        .iter()
        .filter(|c| illumination.is_none_or(|g| FeatureGroup::from_name(&c.name) == g))
        .map(|c| {
            if c.genuine.is_empty() {
                return Err(Error::EmptyClass(format!("genuine ({})", c.name)));
            }
            if c.spoof.is_empty() {
                return Err(Error::EmptyClass(format!("spoof ({})", c.name)));
            }
            separate_feature(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeparationReport {
        delta_convention: "mean".to_string(),
        features,
    })
}
