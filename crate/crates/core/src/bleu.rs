//! Case-insensitive multi-reference BLEU-4, add-one smoothed sentence BLEU,
//! bootstrap confidence intervals and paired bootstrap p-values.
//!
//! Scores are ratios in `[0, 1]`; multiply by 100 for reporting.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{Error, Result};

pub const MAX_ORDER: usize = 4;
pub const DEFAULT_RESAMPLES: usize = 1000;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;
pub const MIN_RESAMPLES: usize = 100;

/// Sufficient statistics of one sentence; corpus statistics are their sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SentenceStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl std::ops::AddAssign for SentenceStats {
    fn add_assign(&mut self, rhs: Self) {
        for n in 0..MAX_ORDER {
            self.matches[n] += rhs.matches[n];
            self.totals[n] += rhs.totals[n];
        }
        self.hyp_len += rhs.hyp_len;
        self.ref_len += rhs.ref_len;
    }
}

fn lowercase<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    tokens.iter().map(|t| t.as_ref().to_lowercase()).collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Closest reference length to `hyp_len`, preferring the shorter on ties.
pub fn closest_ref_len(hyp_len: usize, ref_lens: impl IntoIterator<Item = usize>) -> usize {
    ref_lens
        .into_iter()
        .min_by_key(|&r| (r.abs_diff(hyp_len), r))
        .unwrap_or(0)
}

/// Clipped n-gram matches and totals for one hypothesis against its
/// reference set, after lowercasing.
pub fn sentence_stats<H: AsRef<str>, R: AsRef<str>>(hyp: &[H], refs: &[Vec<R>]) -> SentenceStats {
    let hyp = lowercase(hyp);
    let refs: Vec<Vec<String>> = refs.iter().map(|r| lowercase(r)).collect();
    let mut stats = SentenceStats {
        hyp_len: hyp.len() as u64,
        ref_len: closest_ref_len(hyp.len(), refs.iter().map(Vec::len)) as u64,
        ..Default::default()
    };
    for n in 1..=MAX_ORDER {
        let hyp_counts = ngram_counts(&hyp, n);
        let mut max_ref: HashMap<&[String], u64> = HashMap::new();
        for r in &refs {
            for (gram, count) in ngram_counts(r, n) {
                let slot = max_ref.entry(gram).or_insert(0);
                *slot = (*slot).max(count);
            }
        }
        stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
        stats.matches[n - 1] = hyp_counts
            .iter()
            .map(|(gram, &c)| c.min(max_ref.get(gram).copied().unwrap_or(0)))
            .sum();
    }
    stats
}

fn brevity_penalty(hyp_len: u64, ref_len: u64) -> f64 {
    if hyp_len >= ref_len {
        1.0
    } else if hyp_len == 0 {
        0.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    }
}

/// BLEU from summed statistics: (score, precisions, brevity penalty).
///
/// Orders with no hypothesis n-grams at all (every sentence shorter than
/// n) are left out of the geometric mean, so a hypothesis set scored
/// against itself is always 1.0. An empty hypothesis scores 1.0 against an
/// empty reference and 0.0 otherwise.
pub fn bleu_from_stats(stats: &SentenceStats) -> (f64, [f64; MAX_ORDER], f64) {
    let precisions: [f64; MAX_ORDER] = std::array::from_fn(|n| {
        if stats.totals[n] > 0 {
            stats.matches[n] as f64 / stats.totals[n] as f64
        } else {
            0.0
        }
    });
    let bp = brevity_penalty(stats.hyp_len, stats.ref_len);
    if stats.hyp_len == 0 {
        let score = if stats.ref_len == 0 { 1.0 } else { 0.0 };
        return (score, precisions, if stats.ref_len == 0 { 1.0 } else { 0.0 });
    }
    let orders: Vec<usize> = (0..MAX_ORDER).filter(|&n| stats.totals[n] > 0).collect();
    if orders.iter().any(|&n| stats.matches[n] == 0) {
        return (0.0, precisions, bp);
    }
    let log_mean =
        orders.iter().map(|&n| precisions[n].ln()).sum::<f64>() / orders.len() as f64;
    (bp * log_mean.exp(), precisions, bp)
}

/// Add-one smoothed sentence BLEU-4: orders 2..4 use `(m + 1) / (t + 1)`,
/// unigram precision is unsmoothed.
pub fn sentence_bleu_smoothed<H: AsRef<str>, R: AsRef<str>>(hyp: &[H], refs: &[Vec<R>]) -> f64 {
    smoothed_from_stats(&sentence_stats(hyp, refs))
}

pub fn smoothed_from_stats(stats: &SentenceStats) -> f64 {
    if stats.hyp_len == 0 {
        return if stats.ref_len == 0 { 1.0 } else { 0.0 };
    }
    if stats.matches[0] == 0 {
        return 0.0;
    }
    let mut log_sum = (stats.matches[0] as f64 / stats.totals[0] as f64).ln();
    for n in 1..MAX_ORDER {
        log_sum += ((stats.matches[n] + 1) as f64 / (stats.totals[n] + 1) as f64).ln();
    }
    brevity_penalty(stats.hyp_len, stats.ref_len) * (log_sum / MAX_ORDER as f64).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub corpus_bleu: f64,
    /// Half-width of the bootstrap percentile interval, when computed.
    pub ci_halfwidth: Option<f64>,
    pub n_gram_precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub per_sentence: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
    pub confidence: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            resamples: DEFAULT_RESAMPLES,
            seed: 1,
            confidence: DEFAULT_CONFIDENCE,
        }
    }
}

impl BootstrapConfig {
    pub fn new(resamples: usize, seed: u64) -> Self {
        BootstrapConfig {
            resamples,
            seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.resamples < MIN_RESAMPLES {
            return Err(Error::Config(format!(
                "at least {MIN_RESAMPLES} resamples required, got {}",
                self.resamples
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::Config(format!("confidence {} outside (0, 1)", self.confidence)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTest {
    pub p_value: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Per-sentence statistics for a scored hypothesis set.
#[derive(Debug, Clone)]
pub struct Scored {
    stats: Vec<SentenceStats>,
}

impl Scored {
    pub fn new<H: AsRef<str>, R: AsRef<str>>(hyps: &[Vec<H>], refs: &[Vec<Vec<R>>]) -> Result<Self> {
        if hyps.is_empty() {
            return Err(Error::EmptyHypothesisSet);
        }
        if hyps.len() != refs.len() {
            return Err(Error::LengthMismatch(format!(
                "{} hypotheses but {} reference sets",
                hyps.len(),
                refs.len()
            )));
        }
        if let Some(i) = refs.iter().position(Vec::is_empty) {
            return Err(Error::LengthMismatch(format!("reference set {i} is empty")));
        }
        let stats = hyps
            .iter()
            .zip(refs)
            .map(|(h, r)| sentence_stats(h, r))
            .collect();
        Ok(Scored { stats })
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn sentence_stats(&self) -> &[SentenceStats] {
        &self.stats
    }

    pub fn totals(&self) -> SentenceStats {
        self.sum(0..self.stats.len())
    }

    fn sum(&self, indices: impl IntoIterator<Item = usize>) -> SentenceStats {
        let mut total = SentenceStats::default();
        for i in indices {
            total += self.stats[i];
        }
        total
    }

    pub fn bleu(&self) -> f64 {
        bleu_from_stats(&self.totals()).0
    }

    pub fn bleu_of(&self, indices: &[usize]) -> f64 {
        bleu_from_stats(&self.sum(indices.iter().copied())).0
    }

    pub fn report(&self) -> EvalReport {
        let (corpus_bleu, n_gram_precisions, brevity_penalty) = bleu_from_stats(&self.totals());
        EvalReport {
            corpus_bleu,
            ci_halfwidth: None,
            n_gram_precisions,
            brevity_penalty,
            per_sentence: self.stats.iter().map(smoothed_from_stats).collect(),
        }
    }
}

/// Index draw for resample `k`: its own ChaCha stream under `seed`, so
/// results do not depend on how resamples are scheduled.
pub fn resample_indices(n: usize, seed: u64, k: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

fn bootstrap_scores(scored: &Scored, cfg: &BootstrapConfig) -> Vec<f64> {
    (0..cfg.resamples)
        .into_par_iter()
        .map(|k| scored.bleu_of(&resample_indices(scored.len(), cfg.seed, k)))
        .collect()
}

/// Half-width of the central percentile interval of `scores`.
pub fn percentile_halfwidth(mut scores: Vec<f64>, confidence: f64) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    scores.sort_by(f64::total_cmp);
    let tail = (1.0 - confidence) / 2.0;
    let lo = ((tail * scores.len() as f64).round() as usize).min(scores.len() - 1);
    let hi = scores.len() - 1 - lo;
    ((scores[hi] - scores[lo]) / 2.0).max(0.0)
}

pub fn corpus_bleu<H: AsRef<str>, R: AsRef<str>>(hyps: &[Vec<H>], refs: &[Vec<Vec<R>>]) -> Result<EvalReport> {
    Ok(Scored::new(hyps, refs)?.report())
}

pub fn bootstrap_ci<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[Vec<H>],
    refs: &[Vec<Vec<R>>],
    cfg: &BootstrapConfig,
) -> Result<f64> {
    cfg.validate()?;
    let scored = Scored::new(hyps, refs)?;
    Ok(bootstrap_halfwidth(&scored, cfg))
}

pub fn bootstrap_halfwidth(scored: &Scored, cfg: &BootstrapConfig) -> f64 {
    percentile_halfwidth(bootstrap_scores(scored, cfg), cfg.confidence)
}

/// Corpus BLEU with the bootstrap half-width filled in.
pub fn evaluate<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[Vec<H>],
    refs: &[Vec<Vec<R>>],
    cfg: Option<&BootstrapConfig>,
) -> Result<EvalReport> {
    let scored = Scored::new(hyps, refs)?;
    let mut report = scored.report();
    if let Some(cfg) = cfg {
        cfg.validate()?;
        report.ci_halfwidth = Some(bootstrap_halfwidth(&scored, cfg));
    }
    Ok(report)
}

/// One-sided paired bootstrap: the fraction of shared resamples on which
/// system A does not beat system B.
pub fn paired_pvalue<A: AsRef<str>, B: AsRef<str>, R: AsRef<str>>(
    hyps_a: &[Vec<A>],
    hyps_b: &[Vec<B>],
    refs: &[Vec<Vec<R>>],
    cfg: &BootstrapConfig,
) -> Result<PairedTest> {
    cfg.validate()?;
    if hyps_a.len() != hyps_b.len() {
        return Err(Error::LengthMismatch(format!(
            "system A has {} lines, system B {}",
            hyps_a.len(),
            hyps_b.len()
        )));
    }
    let a = Scored::new(hyps_a, refs)?;
    let b = Scored::new(hyps_b, refs)?;
    Ok(paired_test(&a, &b, cfg))
}

pub fn paired_test(a: &Scored, b: &Scored, cfg: &BootstrapConfig) -> PairedTest {
    let not_better = (0..cfg.resamples)
        .into_par_iter()
        .filter(|&k| {
            let idx = resample_indices(a.len(), cfg.seed, k);
            a.bleu_of(&idx) - b.bleu_of(&idx) <= 0.0
        })
        .count();
    PairedTest {
        p_value: not_better as f64 / cfg.resamples as f64,
        resamples: cfg.resamples,
        seed: cfg.seed,
    }
}
