//! Leave-one-out retrieval and recognition metrics.
//!
//! Every query's ranked gallery is reduced to the 1-based ranks of its
//! classmates; all metrics are computed from those ranks. Averages are macro
//! averages: first over the queries of a class, then over classes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::retrieval::{rank_gallery, GalleryIndex, RankedList};
use crate::{Error, Result};

/// Denominator of the recall of one query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecallDenominator {
    /// `|C_i|`, the class size including the query.
    #[default]
    Literal,
    /// `|C_i| - 1`, the classmates actually retrievable.
    ExcludeQuery,
}

impl RecallDenominator {
    pub fn as_str(self) -> &'static str {
        match self {
            RecallDenominator::Literal => "literal",
            RecallDenominator::ExcludeQuery => "excl-query",
        }
    }
}

/// Rankings of every entry against all others, with class bookkeeping.
#[derive(Debug, Clone)]
pub struct EvaluationRun {
    class_names: Vec<String>,
    class_of: Vec<usize>,
    class_sizes: Vec<usize>,
    rankings: Vec<RankedList>,
    /// Ascending 1-based ranks of each query's classmates.
    classmate_ranks: Vec<Vec<usize>>,
}

impl EvaluationRun {
    /// Ranks every entry of `index` against the rest on the current rayon pool.
    pub fn from_index(index: &GalleryIndex) -> Result<Self> {
        let rankings = (0..index.len())
            .into_par_iter()
            .map(|q| rank_gallery(q, index))
            .collect::<Result<Vec<_>>>()?;
        let labels = index.entries().iter().map(|e| e.class_label.clone()).collect();
        EvaluationRun::from_rankings(labels, rankings)
    }

    /// `labels[i]` is the class of entry `i`; `rankings[q]` must rank every
    /// entry except `q`.
    pub fn from_rankings(labels: Vec<String>, rankings: Vec<RankedList>) -> Result<Self> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::Metric(format!("need at least 2 entries, got {n}")));
        }
        if rankings.len() != n {
            return Err(Error::Metric(format!("{} rankings for {n} entries", rankings.len())));
        }

        let mut class_index = BTreeMap::new();
        let mut class_names = Vec::new();
        let class_of: Vec<usize> = labels
            .iter()
            .map(|l| {
                *class_index.entry(l.clone()).or_insert_with(|| {
                    class_names.push(l.clone());
                    class_names.len() - 1
                })
            })
            .collect();
        let mut class_sizes = vec![0usize; class_names.len()];
        for &c in &class_of {
            class_sizes[c] += 1;
        }

        let mut classmate_ranks = Vec::with_capacity(n);
        for (q, r) in rankings.iter().enumerate() {
            if r.query_id != q || r.ids.len() != n - 1 || r.distances.len() != n - 1 {
                return Err(Error::Metric(format!("ranking {q} is not a leave-one-out ranking")));
            }
            let mut seen = vec![false; n];
            seen[q] = true;
            for &id in &r.ids {
                if id >= n || std::mem::replace(&mut seen[id], true) {
                    return Err(Error::Metric(format!("ranking {q} is not a permutation of the gallery")));
                }
            }
            let ranks = r
                .ids
                .iter()
                .enumerate()
                .filter(|(_, &id)| class_of[id] == class_of[q])
                .map(|(pos, _)| pos + 1)
                .collect();
            classmate_ranks.push(ranks);
        }

        Ok(EvaluationRun { class_names, class_of, class_sizes, rankings, classmate_ranks })
    }

    pub fn dataset_size(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn class_of(&self, query: usize) -> usize {
        self.class_of[query]
    }

    pub fn rankings(&self) -> &[RankedList] {
        &self.rankings
    }

    /// Largest usable retrieval depth, `N - 1`.
    pub fn max_depth(&self) -> usize {
        self.dataset_size() - 1
    }

    /// Classmates of `query` within the top `lambda`.
    pub fn matches_within(&self, query: usize, lambda: usize) -> usize {
        self.classmate_ranks[query].partition_point(|&r| r <= lambda)
    }

    fn check_lambda(&self, lambda: usize) -> Result<()> {
        if lambda == 0 || lambda > self.max_depth() {
            return Err(Error::Metric(format!("lambda {lambda} outside 1..={}", self.max_depth())));
        }
        Ok(())
    }

    fn query_precision(&self, q: usize, lambda: usize) -> f64 {
        self.matches_within(q, lambda) as f64 / lambda as f64
    }

    fn query_recall(&self, q: usize, lambda: usize, mode: RecallDenominator) -> f64 {
        let size = self.class_sizes[self.class_of[q]];
        let denom = match mode {
            RecallDenominator::Literal => size,
            RecallDenominator::ExcludeQuery => size - 1,
        };
        if denom == 0 {
            return 0.0;
        }
        self.matches_within(q, lambda) as f64 / denom as f64
    }

    /// Mean over classes of the mean over that class's queries of `f(q)`.
    fn macro_average(&self, f: impl Fn(usize) -> f64) -> f64 {
        let mut sums = vec![0.0; self.class_count()];
        for q in 0..self.dataset_size() {
            sums[self.class_of[q]] += f(q);
        }
        let per_class: f64 = sums.iter().zip(&self.class_sizes).map(|(s, &n)| s / n as f64).sum();
        per_class / self.class_count() as f64
    }

    /// Summary depth of a class: its size, capped at `N - 1`.
    fn class_depth(&self, q: usize) -> usize {
        self.class_sizes[self.class_of[q]].min(self.max_depth())
    }
}

/// Fraction of the top `lambda` entries sharing `query_class`.
pub fn precision_at(ranked: &RankedList, classes: &[usize], query_class: usize, lambda: usize) -> Result<f64> {
    let hits = top_matches(ranked, classes, query_class, lambda)?;
    Ok(hits as f64 / lambda as f64)
}

/// Matches in the top `lambda` over `class_size`.
pub fn recall_at(
    ranked: &RankedList,
    classes: &[usize],
    query_class: usize,
    class_size: usize,
    lambda: usize,
) -> Result<f64> {
    let hits = top_matches(ranked, classes, query_class, lambda)?;
    if class_size == 0 {
        return Ok(0.0);
    }
    Ok(hits as f64 / class_size as f64)
}

fn top_matches(ranked: &RankedList, classes: &[usize], query_class: usize, lambda: usize) -> Result<usize> {
    if lambda == 0 || lambda > ranked.len() {
        return Err(Error::Metric(format!("lambda {lambda} outside 1..={}", ranked.len())));
    }
    Ok(ranked.ids[..lambda].iter().filter(|&&id| classes[id] == query_class).count())
}

/// Average retrieval precision at depth `lambda`.
pub fn arp(run: &EvaluationRun, lambda: usize) -> Result<f64> {
    run.check_lambda(lambda)?;
    Ok(run.macro_average(|q| run.query_precision(q, lambda)))
}

/// Average retrieval recall at depth `lambda`.
pub fn arr(run: &EvaluationRun, lambda: usize, mode: RecallDenominator) -> Result<f64> {
    run.check_lambda(lambda)?;
    Ok(run.macro_average(|q| run.query_recall(q, lambda, mode)))
}

/// ARP with each query retrieving as many images as its class holds.
pub fn arp_per_class_depth(run: &EvaluationRun) -> f64 {
    run.macro_average(|q| run.query_precision(q, run.class_depth(q)))
}

/// ARR with each query retrieving as many images as its class holds.
pub fn arr_per_class_depth(run: &EvaluationRun, mode: RecallDenominator) -> f64 {
    run.macro_average(|q| run.query_recall(q, run.class_depth(q), mode))
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_score(arp: f64, arr: f64) -> f64 {
    if arp + arr <= 0.0 {
        0.0
    } else {
        2.0 * arp * arr / (arp + arr)
    }
}

/// Average normalized modified retrieval rank (MPEG-7).
///
/// For a query with `NG` ground-truth classmates, `K = min(4 NG, 2 GTM)`
/// where `GTM` is the largest `NG` in the dataset. Ranks beyond `K` are
/// replaced by `1.25 K`, and the mean rank is normalized so that 0 is
/// perfect retrieval and 1 is a total miss.
pub fn anmrr(run: &EvaluationRun) -> Result<f64> {
    if let Some(c) = run.class_sizes.iter().position(|&s| s < 2) {
        return Err(Error::Metric(format!(
            "ANMRR needs every class to hold at least 2 images; class {:?} has {}",
            run.class_names[c], run.class_sizes[c]
        )));
    }
    let gtm = run.class_sizes.iter().max().copied().unwrap_or(0) - 1;
    let mut total = 0.0;
    for q in 0..run.dataset_size() {
        let ng = run.class_sizes[run.class_of[q]] - 1;
        let k = (4 * ng).min(2 * gtm) as f64;
        let penalized: f64 = run.classmate_ranks[q]
            .iter()
            .map(|&r| if r as f64 <= k { r as f64 } else { 1.25 * k })
            .sum();
        let ng = ng as f64;
        let avr = penalized / ng;
        let mrr = avr - 0.5 * (1.0 + ng);
        total += mrr / (1.25 * k - 0.5 * (1.0 + ng));
    }
    Ok(total / run.dataset_size() as f64)
}

/// Percentage of queries whose nearest gallery entry is a classmate.
pub fn recognition_rate(run: &EvaluationRun) -> f64 {
    let hits = (0..run.dataset_size()).filter(|&q| run.matches_within(q, 1) > 0).count();
    100.0 * hits as f64 / run.dataset_size() as f64
}

/// `cmc[r - 1]` is the percentage of queries with a classmate at rank `<= r`.
pub fn cmc(run: &EvaluationRun, max_rank: usize) -> Result<Vec<f64>> {
    run.check_lambda(max_rank)?;
    let n = run.dataset_size();
    let mut first_hit = vec![0usize; max_rank + 1];
    for q in 0..n {
        if let Some(&r) = run.classmate_ranks[q].first() {
            if r <= max_rank {
                first_hit[r] += 1;
            }
        }
    }
    let mut acc = 0;
    Ok((1..=max_rank)
        .map(|r| {
            acc += first_hit[r];
            100.0 * acc as f64 / n as f64
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub lambda_max: usize,
    pub cmc_max_rank: usize,
    pub recall_denominator: RecallDenominator,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { lambda_max: 10, cmc_max_rank: 10, recall_denominator: RecallDenominator::Literal }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub descriptor: String,
    pub dataset_size: usize,
    pub class_count: usize,
    pub recall_denominator: String,
    pub lambdas: Vec<usize>,
    pub arp_curve: Vec<f64>,
    pub arr_curve: Vec<f64>,
    /// ARP at per-class depth `|C_i|`.
    pub arp: f64,
    /// ARR at per-class depth `|C_i|`.
    pub arr: f64,
    pub f_score: f64,
    /// Absent when some class has a single image.
    pub anmrr: Option<f64>,
    pub recognition_rate: f64,
    pub cmc: Vec<f64>,
    pub notices: Vec<String>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Flat `metric,x,value` rows; `x` is the depth or rank, empty for scalars.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |metric: &str, x: String, v: f64| {
            w.write_record([metric, &x, &v.to_string()]).expect("in-memory csv write");
        };
        row("metric", String::new(), f64::NAN);
        for (i, &l) in self.lambdas.iter().enumerate() {
            row("arp", l.to_string(), self.arp_curve[i]);
        }
        for (i, &l) in self.lambdas.iter().enumerate() {
            row("arr", l.to_string(), self.arr_curve[i]);
        }
        for (i, v) in self.cmc.iter().enumerate() {
            row("cmc", (i + 1).to_string(), *v);
        }
        row("arp_summary", String::new(), self.arp);
        row("arr_summary", String::new(), self.arr);
        row("f_score", String::new(), self.f_score);
        if let Some(a) = self.anmrr {
            row("anmrr", String::new(), a);
        }
        row("recognition_rate", String::new(), self.recognition_rate);
        let bytes = w.into_inner().expect("in-memory csv flush");
        let text = String::from_utf8(bytes).expect("csv is utf-8");
        text.replacen("metric,,NaN", "metric,x,value", 1)
    }
}

/// Computes every metric of `run`. Depths beyond `N - 1` are capped, with a
/// notice in the report.
pub fn evaluate(run: &EvaluationRun, descriptor: &str, config: EvalConfig) -> Result<MetricsReport> {
    if config.lambda_max == 0 || config.cmc_max_rank == 0 {
        return Err(Error::Metric("lambda-max and cmc-max-rank must be >= 1".into()));
    }
    let mut notices = Vec::new();
    let depth = run.max_depth();
    let cap = |what: &str, v: usize, notices: &mut Vec<String>| {
        if v > depth {
            notices.push(format!("{what} {v} capped at N-1 = {depth}"));
            depth
        } else {
            v
        }
    };
    let lambda_max = cap("lambda-max", config.lambda_max, &mut notices);
    let cmc_max = cap("cmc-max-rank", config.cmc_max_rank, &mut notices);
    let mode = config.recall_denominator;

    let lambdas: Vec<usize> = (1..=lambda_max).collect();
    let arp_curve = lambdas.iter().map(|&l| arp(run, l)).collect::<Result<Vec<_>>>()?;
    let arr_curve = lambdas.iter().map(|&l| arr(run, l, mode)).collect::<Result<Vec<_>>>()?;
    let arp_s = arp_per_class_depth(run);
    let arr_s = arr_per_class_depth(run, mode);
    let anmrr = match anmrr(run) {
        Ok(v) => Some(v),
        Err(e) => {
            notices.push(format!("ANMRR skipped: {e}"));
            None
        }
    };

    Ok(MetricsReport {
        descriptor: descriptor.to_owned(),
        dataset_size: run.dataset_size(),
        class_count: run.class_count(),
        recall_denominator: mode.as_str().to_owned(),
        lambdas,
        arp_curve,
        arr_curve,
        arp: arp_s,
        arr: arr_s,
        f_score: f_score(arp_s, arr_s),
        anmrr,
        recognition_rate: recognition_rate(run),
        cmc: cmc(run, cmc_max)?,
        notices,
    })
}
