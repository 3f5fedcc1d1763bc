//! Naive reference implementations and randomized equivalence runs.
//!
//! Each oracle is written from the textbook definition without sharing code
//! with the library.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashMap;

use fnfpad::illumcues::{mutual_info_matrix, pearson_matrix};
use fnfpad::imgcore::{fft2_logmag, radial_spectrum};
use fnfpad::rng::SplitMix64;
use fnfpad::stats::{fisher_discriminant_ratio, mann_whitney_u, PValueMethod};
use fnfpad::texture::{glcm_features, lbp_histogram};
use fnfpad::{Field, RasterImage};

pub const REL_TOL: f64 = 1e-9;

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300).max(1.0)
}

pub fn random_field(rng: &mut SplitMix64, w: usize, h: usize) -> Field {
    Field::from_fn(w, h, |_, _| rng.next_f64())
}

pub fn random_rgb(rng: &mut SplitMix64, w: usize, h: usize) -> RasterImage {
    RasterImage::rgb_from_fn(w, h, |_, _| [rng.next_f64(), rng.next_f64(), rng.next_f64()])
}

/// Single-pass textbook Pearson: `(n Sxy - Sx Sy) / sqrt((n Sxx - Sx^2)(n Syy - Sy^2))`.
pub fn pearson_oracle(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..a.len() {
        sx += a[i];
        sy += b[i];
        sxx += a[i] * a[i];
        syy += b[i] * b[i];
        sxy += a[i] * b[i];
    }
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}

/// Equal-width bin of a value in `[0, 1]`; 1.0 falls into the last bin.
fn level(v: f64, bins: usize) -> usize {
    ((v * bins as f64) as usize).min(bins - 1)
}

fn entropy_bits<K: std::hash::Hash + Eq>(counts: &HashMap<K, usize>, n: usize) -> f64 {
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

/// `H(X) + H(Y) - H(X, Y)` from hash-map counts.
pub fn mi_oracle(a: &[f64], b: &[f64], bins: usize) -> f64 {
    let mut hx = HashMap::new();
    let mut hy = HashMap::new();
    let mut hxy = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        let (i, j) = (level(x, bins), level(y, bins));
        *hx.entry(i).or_insert(0) += 1;
        *hy.entry(j).or_insert(0) += 1;
        *hxy.entry((i, j)).or_insert(0) += 1;
    }
    let n = a.len();
    (entropy_bits(&hx, n) + entropy_bits(&hy, n) - entropy_bits(&hxy, n)).max(0.0)
}

/// GLCM features by counting every level pair separately, with row and
/// column marginals handled independently.
pub fn glcm_oracle(img: &Field, levels: usize, offset: (isize, isize)) -> [f64; 4] {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let q = |x: isize, y: isize| level(img.get(x as usize, y as usize), levels);
    let mut p = vec![vec![0.0; levels]; levels];
    let mut total = 0.0;
    for i in 0..levels {
        for j in 0..levels {
            for y in 0..h {
                for x in 0..w {
                    let (nx, ny) = (x + offset.0, y + offset.1);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let (a, b) = (q(x, y), q(nx, ny));
                    // symmetric counting: the pair contributes to (a,b) and (b,a)
                    if (a, b) == (i, j) {
                        p[i][j] += 1.0;
                    }
                    if (b, a) == (i, j) {
                        p[i][j] += 1.0;
                    }
                }
            }
            total += p[i][j];
        }
    }
    for row in p.iter_mut() {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    let (mut contrast, mut homog, mut energy) = (0.0, 0.0, 0.0);
    let (mut mu_i, mut mu_j) = (0.0, 0.0);
    for i in 0..levels {
        for j in 0..levels {
            let d = i as f64 - j as f64;
            contrast += d * d * p[i][j];
            homog += p[i][j] / (1.0 + d.abs());
            energy += p[i][j] * p[i][j];
            mu_i += i as f64 * p[i][j];
            mu_j += j as f64 * p[i][j];
        }
    }
    let (mut var_i, mut var_j, mut cov) = (0.0, 0.0, 0.0);
    for i in 0..levels {
        for j in 0..levels {
            var_i += (i as f64 - mu_i).powi(2) * p[i][j];
            var_j += (j as f64 - mu_j).powi(2) * p[i][j];
            cov += (i as f64 - mu_i) * (j as f64 - mu_j) * p[i][j];
        }
    }
    [contrast, homog, energy, cov / (var_i * var_j).sqrt()]
}

/// LBP histogram with neighbour positions generated from angles
/// `k * 45` degrees, counter-clockwise from east, image y pointing down.
pub fn lbp_oracle(img: &Field) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let mut hist = vec![0.0; 256];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let c = img.get(x, y);
            let mut code = 0usize;
            for k in 0..8 {
                let theta = k as f64 * std::f64::consts::FRAC_PI_4;
                let dx = theta.cos().round() as isize;
                let dy = -(theta.sin().round() as isize);
                let v = img.get((x as isize + dx) as usize, (y as isize + dy) as usize);
                if v >= c {
                    code += 1 << k;
                }
            }
            hist[code] += 1.0;
        }
    }
    let n = ((w - 2) * (h - 2)) as f64;
    hist.iter().map(|v| v / n).collect()
}

/// U statistic of `a` by pairwise comparison (ties count one half).
pub fn u_oracle(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for &x in a {
        for &y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Exact two-sided p-value by enumerating every split of the pooled sample.
pub fn mwu_exact_oracle(a: &[f64], b: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (n, na) = (pooled.len(), a.len());
    let u_obs = u_oracle(a, b);
    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (i, &v) in pooled.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    xs.push(v)
                } else {
                    ys.push(v)
                }
            }
            (xs, ys)
        };
        let u = u_oracle(&xs, &ys);
        total += 1;
        if u <= u_obs {
            le += 1;
        }
        if u >= u_obs {
            ge += 1;
        }
    }
    let p = (2.0 * le.min(ge) as f64 / total as f64).min(1.0);
    (u_obs, p)
}

pub fn fdr_oracle(a: &[f64], b: &[f64]) -> f64 {
    let m = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let v = |x: &[f64]| {
        let mu = m(x);
        x.iter().map(|t| (t - mu) * (t - mu)).sum::<f64>() / x.len() as f64
    };
    (m(a) - m(b)).powi(2) / (v(a) + v(b))
}

/// Naive O(N^2) DFT log-magnitude of the mean-subtracted field, DC moved to
/// `(w/2, h/2)`.
pub fn logmag_oracle(img: &Field) -> Field {
    let (w, h) = (img.width(), img.height());
    let mean = img.data().iter().sum::<f64>() / (w * h) as f64;
    let mut out = Field::zeros(w, h);
    for v in 0..h {
        for u in 0..w {
            let (mut re, mut im) = (0.0, 0.0);
            for y in 0..h {
                for x in 0..w {
                    let phase = -2.0 * std::f64::consts::PI * ((u * x) as f64 / w as f64 + (v * y) as f64 / h as f64);
                    let s = img.get(x, y) - mean;
                    re += s * phase.cos();
                    im += s * phase.sin();
                }
            }
            out.set((u + w / 2) % w, (v + h / 2) % h, re.hypot(im).ln_1p());
        }
    }
    out
}

/// Radial profile by scanning all pixels once per bin.
pub fn radial_oracle(f: &Field, bins: usize) -> Vec<f64> {
    let (w, h) = (f.width(), f.height());
    let (cx, cy) = ((w / 2) as f64, (h / 2) as f64);
    let r_max = (w.min(h) / 2) as f64;
    (0..bins)
        .map(|b| {
            let (mut s, mut n) = (0.0, 0);
            for y in 0..h {
                for x in 0..w {
                    let r = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt().round();
                    if r < r_max && ((r * bins as f64) / r_max).floor() as usize == b {
                        s += f.get(x, y);
                        n += 1;
                    }
                }
            }
            if n == 0 {
                0.0
            } else {
                s / n as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub name: &'static str,
    pub instances: usize,
    /// Largest relative error (or mismatch count for exact comparisons).
    pub worst: f64,
    pub failures: Vec<String>,
}

impl OracleRun {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            instances: 0,
            worst: 0.0,
            failures: Vec::new(),
        }
    }

    fn compare(&mut self, what: &str, got: f64, want: f64) {
        let e = rel_err(got, want);
        self.worst = self.worst.max(e);
        if e.is_nan() || e > REL_TOL {
            self.failures.push(format!("{what}: got {got}, oracle {want}"));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.instances >= 20
    }
}

pub fn pearson_run(trials: usize, seed: u64) -> OracleRun {
    let mut run = OracleRun::new("pearson");
    let mut rng = SplitMix64::new(seed);
    for t in 0..trials {
        let (w, h) = (3 + (rng.next_u64() % 10) as usize, 3 + (rng.next_u64() % 10) as usize);
        let img = random_rgb(&mut rng, w, h);
        let m = pearson_matrix(&img).expect("rgb");
        for i in 0..3 {
            for j in 0..3 {
                let want = pearson_oracle(img.plane(i).data(), img.plane(j).data());
                match m[i][j] {
                    Some(got) => run.compare(&format!("trial {t} ({i},{j})"), got, want),
                    None => run.failures.push(format!("trial {t} ({i},{j}): undefined")),
                }
            }
        }
        run.instances += 1;
    }
    run
}

pub fn mi_run(trials: usize, seed: u64) -> OracleRun {
    let mut run = OracleRun::new("mutual_information");
    let mut rng = SplitMix64::new(seed);
    for t in 0..trials {
        let (w, h) = (2 + (rng.next_u64() % 12) as usize, 2 + (rng.next_u64() % 12) as usize);
        let bins = 2 + (rng.next_u64() % 31) as usize;
        // coarse values so that joint cells repeat
        let levels = 1 + rng.next_u64() % 8;
        let img = RasterImage::rgb_from_fn(w, h, |_, _| {
            let mut q = || (rng.next_u64() % (levels + 1)) as f64 / levels as f64;
            [q(), q(), q()]
        });
        let m = mutual_info_matrix(&img, bins).expect("rgb");
        for i in 0..3 {
            for j in 0..3 {
                let want = mi_oracle(img.plane(i).data(), img.plane(j).data(), bins);
                run.compare(&format!("trial {t} ({i},{j})"), m[i][j], want);
            }
        }
        run.instances += 1;
    }
    run
}

pub fn glcm_run(trials: usize, seed: u64) -> OracleRun {
    let mut run = OracleRun::new("glcm");
    let mut rng = SplitMix64::new(seed);
    for t in 0..trials {
        let (w, h) = (4 + (rng.next_u64() % 8) as usize, 4 + (rng.next_u64() % 8) as usize);
        let levels = 2 + (rng.next_u64() % 7) as usize;
        let offset = ((rng.next_u64() % 5) as isize - 2, (rng.next_u64() % 3) as isize);
        let offset = if offset == (0, 0) { (1, 0) } else { offset };
        let img = random_field(&mut rng, w, h);
        let got = glcm_features(&img, levels, &[offset]).expect("glcm")[0];
        let want = glcm_oracle(&img, levels, offset);
        run.compare(&format!("trial {t} contrast"), got.contrast, want[0]);
        run.compare(&format!("trial {t} homogeneity"), got.homogeneity, want[1]);
        run.compare(&format!("trial {t} energy"), got.energy, want[2]);
        match got.correlation {
            Some(c) => run.compare(&format!("trial {t} correlation"), c, want[3]),
            None => run.failures.push(format!("trial {t}: correlation undefined")),
        }
        run.instances += 1;
    }
    run
}

pub fn lbp_run(trials: usize, seed: u64) -> OracleRun {
    let mut run = OracleRun::new("lbp");
    let mut rng = SplitMix64::new(seed);
    for t in 0..trials {
        let (w, h) = (3 + (rng.next_u64() % 8) as usize, 3 + (rng.next_u64() % 8) as usize);
        // few grey levels so that the >= tie rule is exercised
        let img = Field::from_fn(w, h, |_, _| (rng.next_u64() % 4) as f64 / 3.0);
        let got = lbp_histogram(&img).expect("lbp");
        let want = lbp_oracle(&img);
        let mismatches = got.iter().zip(&want).filter(|(a, b)| a != b).count();
        run.worst = run.worst.max(mismatches as f64);
        if mismatches > 0 {
            run.failures.push(format!("trial {t}: {mismatches} bins differ"));
        }
        run.instances += 1;
    }
    run
}

pub fn mwu_run(trials: usize, seed: u64) -> OracleRun {
    let mut run = OracleRun::new("mann_whitney_exact");
    let mut rng = SplitMix64::new(seed);
    for t in 0..trials {
        let na = 1 + (rng.next_u64() % 7) as usize;
        let nb = 1 + (rng.next_u64() % (12 - na as u64).min(7)) as usize;
        let a: Vec<f64> = (0..na).map(|_| rng.normal()).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.normal() + 0.5).collect();
        let got = mann_whitney_u(&a, &b).expect("mwu");
        let (u, p) = mwu_exact_oracle(&a, &b);
        if got.method != PValueMethod::Exact {
            run.failures
                .push(format!("trial {t}: n = {} used {:?}", na + nb, got.method));
        }
        if got.u != u {
            run.failures.push(format!("trial {t}: U {} vs {u}", got.u));
        }
        run.compare(&format!("trial {t} p"), got.p_value, p);
        run.instances += 1;
    }
    run
}

pub fn fdr_run(trials: usize, seed: u64) -> OracleRun {
    let mut run = OracleRun::new("fdr");
    let mut rng = SplitMix64::new(seed);
    for t in 0..trials {
        let na = 2 + (rng.next_u64() % 30) as usize;
        let nb = 2 + (rng.next_u64() % 30) as usize;
        let shift = rng.uniform(-2.0, 2.0);
        let a: Vec<f64> = (0..na).map(|_| rng.normal()).collect();
        let b: Vec<f64> = (0..nb).map(|_| 1.5 * rng.normal() + shift).collect();
        let got = fisher_discriminant_ratio(&a, &b).expect("fdr");
        run.compare(&format!("trial {t}"), got, fdr_oracle(&a, &b));
        run.instances += 1;
    }
    run
}

pub fn radial_run(trials: usize, seed: u64) -> OracleRun {
    let mut run = OracleRun::new("radial_spectrum");
    let mut rng = SplitMix64::new(seed);
    for t in 0..trials {
        let (w, h) = (8 + (rng.next_u64() % 9) as usize, 8 + (rng.next_u64() % 9) as usize);
        let bins = 4 + (rng.next_u64() % 5) as usize;
        let img = random_field(&mut rng, w, h);
        let got = radial_spectrum(&fft2_logmag(&img), bins).expect("radial");
        let want = radial_oracle(&logmag_oracle(&img), bins);
        for (k, (g, o)) in got.iter().zip(&want).enumerate() {
            run.compare(&format!("trial {t} bin {k}"), *g, *o);
        }
        run.instances += 1;
    }
    run
}

/// Every randomized oracle comparison, `trials` instances each.
pub fn all_runs(trials: usize) -> Vec<OracleRun> {
    vec![
        pearson_run(trials, 101),
        mi_run(trials, 102),
        glcm_run(trials, 103),
        lbp_run(trials, 104),
        mwu_run(trials, 105),
        fdr_run(trials, 106),
        radial_run(trials, 107),
    ]
}
