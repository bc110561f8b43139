//! Test-only reference evaluators, written independently of the library's
//! encoder: rings are ordered by sorting on `atan2`, and every code is
//! assembled from the closed-form sector/ordinal formulas for each pixel.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rtlnp::GrayImage;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Bracket {
    Ceil,
    /// The brackets read literally as floor; kept to document that this
    /// reading contradicts the worked examples (it yields 0 pixels on ring 1
    /// for a 36 degree sector).
    Floor,
}

impl Bracket {
    pub fn apply(self, num: u32, den: u32) -> u32 {
        match self {
            Bracket::Ceil => num.div_ceil(den),
            Bracket::Floor => num / den,
        }
    }
}

/// Chebyshev ring `r`, sorted by screen-counterclockwise angle from +col.
pub fn ring_by_angle(r: i32) -> Vec<(i32, i32)> {
    let mut pts: Vec<(i32, i32)> = (-r..=r)
        .flat_map(|dc| (-r..=r).map(move |dr| (dc, dr)))
        .filter(|&(dc, dr)| dc.abs().max(dr.abs()) == r)
        .collect();
    let angle = |&(dc, dr): &(i32, i32)| {
        let a = (-(dr as f64)).atan2(dc as f64);
        if a < 0.0 { a + std::f64::consts::TAU } else { a }
    };
    pts.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).unwrap());
    pts
}

pub fn naive_code(img: &GrayImage, col: usize, row: usize, r_in: u32, r_out: u32, dt: u32, br: Bracket) -> u32 {
    naive_code_with(&oracle_rings(r_out), img, col, row, r_in, r_out, dt, br)
}

/// `rings[n]` is ring `n` in angle order; `rings[0]` is empty.
pub fn oracle_rings(r_out: u32) -> Vec<Vec<(i32, i32)>> {
    (0..=r_out as i32).map(|r| if r == 0 { vec![] } else { ring_by_angle(r) }).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn naive_code_with(
    rings: &[Vec<(i32, i32)>],
    img: &GrayImage,
    col: usize,
    row: usize,
    r_in: u32,
    r_out: u32,
    dt: u32,
    br: Bracket,
) -> u32 {
    let px = |dc: i32, dr: i32| img.get((col as i32 + dc) as usize, (row as i32 + dr) as usize) as u32;
    let s = 360 / dt;
    let mut code = 0u32;
    for j in 1..=s {
        let mut a = [(px(0, 0), 1u32), (0, 0)];
        for n in 1..=r_out {
            let per = br.apply(n * dt, 45);
            for k in 1..=per {
                let mut l = br.apply(n * dt * (j - 1), 45) + k;
                if l > 8 * n {
                    l = 8 * n;
                }
                let (dc, dr) = rings[n as usize][l as usize - 1];
                let side = if n <= r_in { 0 } else { 1 };
                a[side].0 += px(dc, dr);
                a[side].1 += 1;
            }
        }
        let a_in = a[0].0 / a[0].1;
        let a_out = a[1].0.checked_div(a[1].1).unwrap_or(0);
        let c = if a_in <= a_out { 0 } else { 1 };
        code += (1 << (j - 1)) * c;
    }
    code
}

pub fn naive_feature_image(img: &GrayImage, r_in: u32, r_out: u32, dt: u32) -> Vec<u32> {
    let rings = oracle_rings(r_out);
    let m = r_out as usize;
    let mut out = vec![0; img.width() * img.height()];
    for row in m..img.height() - m {
        for col in m..img.width() - m {
            out[row * img.width() + col] = naive_code_with(&rings, img, col, row, r_in, r_out, dt, Bracket::Ceil);
        }
    }
    out
}

pub fn naive_lbp(img: &GrayImage, col: usize, row: usize) -> u32 {
    const N: [(i32, i32); 8] = [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)];
    let c = img.get(col, row);
    let mut code = 0;
    for (p, (dc, dr)) in N.iter().enumerate() {
        let v = img.get((col as i32 + dc) as usize, (row as i32 + dr) as usize);
        if v >= c {
            code += 1 << p;
        }
    }
    code
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut impl Rng, width: usize, height: usize) -> GrayImage {
    GrayImage::new(width, height, (0..width * height).map(|_| rng.gen()).collect()).unwrap()
}

/// Random image with intensities in `lo..=hi`.
pub fn random_image_in(rng: &mut impl Rng, width: usize, height: usize, lo: u8, hi: u8) -> GrayImage {
    GrayImage::new(width, height, (0..width * height).map(|_| rng.gen_range(lo..=hi)).collect()).unwrap()
}

pub fn shifted(img: &GrayImage, b: i32) -> GrayImage {
    let px = img.pixels().iter().map(|&p| (p as i32 + b) as u8).collect();
    GrayImage::new(img.width(), img.height(), px).unwrap()
}

/// Every params combination of the oracle sweep.
pub fn param_grid() -> Vec<(u32, u32, u32)> {
    let mut v = Vec::new();
    for r_in in 1..=3 {
        for r_out in r_in + 1..=6 {
            for dt in [24, 36, 45, 72, 120] {
                v.push((r_in, r_out, dt));
            }
        }
    }
    v
}

/// Independent leave-one-out metrics computed straight from a distance
/// matrix, query by query, following the precision/recall/rank formulas.
pub struct BruteMetrics {
    pub arp: Vec<f64>,
    pub arr: Vec<f64>,
    pub arp_summary: f64,
    pub arr_summary: f64,
    pub f_score: f64,
    pub anmrr: f64,
    pub recognition_rate: f64,
    pub cmc: Vec<f64>,
}

pub fn brute_metrics(labels: &[&str], dist: &[Vec<f64>], lambda_max: usize, literal_recall: bool) -> BruteMetrics {
    let n = labels.len();
    // rank of i for query q: 1 + #{others strictly closer, or equally close with smaller id}
    let rank = |q: usize, i: usize| -> usize {
        1 + (0..n)
            .filter(|&o| o != q && o != i)
            .filter(|&o| dist[q][o] < dist[q][i] || (dist[q][o] == dist[q][i] && o < i))
            .count()
    };
    let size = |c: &str| labels.iter().filter(|&&l| l == c).count();
    let mut classes: Vec<&str> = labels.to_vec();
    classes.sort();
    classes.dedup();

    let delta = |q: usize, i: usize, lambda: usize| i != q && labels[q] == labels[i] && rank(q, i) <= lambda;
    let precision = |q: usize, lambda: usize| (0..n).filter(|&i| delta(q, i, lambda)).count() as f64 / lambda as f64;
    let recall = |q: usize, lambda: usize| {
        let c = size(labels[q]);
        let d = if literal_recall { c } else { c - 1 };
        (0..n).filter(|&i| delta(q, i, lambda)).count() as f64 / d as f64
    };
    let macro_avg = |f: &dyn Fn(usize) -> f64| {
        classes
            .iter()
            .map(|c| {
                let qs: Vec<usize> = (0..n).filter(|&q| labels[q] == *c).collect();
                qs.iter().map(|&q| f(q)).sum::<f64>() / qs.len() as f64
            })
            .sum::<f64>()
            / classes.len() as f64
    };

    let arp: Vec<f64> = (1..=lambda_max).map(|l| macro_avg(&|q| precision(q, l))).collect();
    let arr: Vec<f64> = (1..=lambda_max).map(|l| macro_avg(&|q| recall(q, l))).collect();
    let depth = |q: usize| size(labels[q]).min(n - 1);
    let arp_summary = macro_avg(&|q| precision(q, depth(q)));
    let arr_summary = macro_avg(&|q| recall(q, depth(q)));
    let f_score = 2.0 * arp_summary * arr_summary / (arp_summary + arr_summary);

    let gtm = classes.iter().map(|c| size(c) - 1).max().unwrap() as f64;
    let mut nmrr_sum = 0.0;
    for q in 0..n {
        let ng = (size(labels[q]) - 1) as f64;
        let k = (4.0 * ng).min(2.0 * gtm);
        let mut s = 0.0;
        for i in 0..n {
            if i != q && labels[i] == labels[q] {
                let r = rank(q, i) as f64;
                s += if r <= k { r } else { 1.25 * k };
            }
        }
        let avr = s / ng;
        let mrr = avr - 0.5 * (1.0 + ng);
        nmrr_sum += mrr / (1.25 * k - 0.5 * (1.0 + ng));
    }
    let anmrr = nmrr_sum / n as f64;

    let cmc: Vec<f64> = (1..=n - 1)
        .map(|r| {
            let hits = (0..n).filter(|&q| (0..n).any(|i| delta(q, i, r))).count();
            100.0 * hits as f64 / n as f64
        })
        .collect();
    let nearest_hit = (0..n)
        .filter(|&q| {
            let best = (0..n).filter(|&i| i != q).find(|&i| rank(q, i) == 1).unwrap();
            labels[best] == labels[q]
        })
        .count();
    let recognition_rate = 100.0 * nearest_hit as f64 / n as f64;

    BruteMetrics { arp, arr, arp_summary, arr_summary, f_score, anmrr, recognition_rate, cmc }
}

/// Writes `root/<class>/<i>.pgm` for every image.
pub fn write_dataset(root: &std::path::Path, classes: &[(&str, Vec<GrayImage>)]) {
    for (label, imgs) in classes {
        let dir = root.join(label);
        std::fs::create_dir_all(&dir).unwrap();
        for (i, img) in imgs.iter().enumerate() {
            img.save_pgm(dir.join(format!("{i:02}.pgm"))).unwrap();
        }
    }
}

pub type ClassImages = (&'static str, Vec<GrayImage>);
type Pattern = fn(usize, usize) -> u8;

/// Three texture classes, four noisy images each; classes overlap enough that
/// retrieval is imperfect.
pub fn planted_image_dataset(seed: u64) -> Vec<ClassImages> {
    let mut r = rng(seed);
    let kinds: [(&str, Pattern); 3] = [
        ("bands", |c, _| if (c / 3) % 2 == 0 { 90 } else { 150 }),
        ("rings", |c, r| (((c as f64 - 16.0).hypot(r as f64 - 16.0) * 9.0) as u32 % 200) as u8 + 20),
        ("spots", |c, r| if (c * 7 + r * 13) % 11 < 3 { 170 } else { 80 }),
    ];
    kinds
        .iter()
        .map(|(name, f)| {
            let imgs = (0..4)
                .map(|_| {
                    let noise: i32 = r.gen_range(10..60);
                    GrayImage::from_fn(32, 32, |c, row| {
                        (f(c, row) as i32 + r.gen_range(-noise..=noise)).clamp(0, 255) as u8
                    })
                    .unwrap()
                })
                .collect();
            (*name, imgs)
        })
        .collect()
}

/// Test-side chi-square, summed in index order.
pub fn chi2(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        if x[i] + y[i] != 0.0 {
            s += (x[i] - y[i]) * (x[i] - y[i]) / (x[i] + y[i]);
        }
    }
    0.5 * s
}

pub fn distance_matrix(features: &[Vec<f64>]) -> Vec<Vec<f64>> {
    features.iter().map(|a| features.iter().map(|b| chi2(a, b)).collect()).collect()
}
