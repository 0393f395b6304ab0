//! Reference implementations used only by tests. They share no code with
//! the library paths they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

/// BPE learning that recounts every pair from scratch on each iteration.
/// Symbols are rendered strings; the final character of a word carries
/// `eow`. Returns rendered `(left, right)` merges.
pub fn naive_bpe_learn(tokens: &[&str], target_vocab: usize, eow: char, join: &str) -> Vec<(String, String)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.to_string()).or_default() += 1;
    }
    let mut words: Vec<(Vec<String>, u64)> = counts
        .into_iter()
        .map(|(w, c)| {
            let chars: Vec<char> = w.chars().collect();
            let syms = chars
                .iter()
                .enumerate()
                .map(|(i, ch)| {
                    if i + 1 == chars.len() {
                        format!("{ch}{eow}")
                    } else {
                        ch.to_string()
                    }
                })
                .collect();
            (syms, c)
        })
        .collect();
    let alphabet: BTreeSet<String> = words.iter().flat_map(|(s, _)| s.iter().cloned()).collect();
    if target_vocab <= alphabet.len() {
        return Vec::new();
    }
    let budget = target_vocab - alphabet.len();

    let mut merges = Vec::new();
    while merges.len() < budget {
        let mut pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (syms, c) in &words {
            for w in syms.windows(2) {
                *pairs.entry((w[0].clone(), w[1].clone())).or_default() += c;
            }
        }
        let eligible = pairs.into_iter().filter(|((l, r), _)| {
            match r.strip_suffix(eow) {
                Some(body) => !format!("{l}{body}").ends_with(join),
                None => true,
            }
        });
        // BTreeMap iterates keys ascending, so keeping the first maximum
        // gives the lexicographic tie-break.
        let mut best: Option<((String, String), u64)> = None;
        for (pair, c) in eligible {
            if best.as_ref().is_none_or(|(_, bc)| c > *bc) {
                best = Some((pair, c));
            }
        }
        let Some(((l, r), c)) = best else { break };
        if c < 2 {
            break;
        }
        let merged = format!("{l}{r}");
        for (syms, _) in &mut words {
            let mut out = Vec::new();
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == l && syms[i + 1] == r {
                    out.push(merged.clone());
                    i += 2;
                } else {
                    out.push(syms[i].clone());
                    i += 1;
                }
            }
            *syms = out;
        }
        merges.push((l, r));
    }
    merges
}

/// Applies merges by walking the full list once, in order.
pub fn sequential_replay(word: &str, merges: &[(String, String)], eow: char) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut syms: Vec<String> = chars
        .iter()
        .enumerate()
        .map(|(i, c)| if i + 1 == chars.len() { format!("{c}{eow}") } else { c.to_string() })
        .collect();
    for (l, r) in merges {
        let mut out = Vec::new();
        let mut i = 0;
        while i < syms.len() {
            if i + 1 < syms.len() && &syms[i] == l && &syms[i + 1] == r {
                out.push(format!("{l}{r}"));
                i += 2;
            } else {
                out.push(syms[i].clone());
                i += 1;
            }
        }
        syms = out;
    }
    syms
}

fn lower(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| t.to_lowercase()).collect()
}

/// All n-grams of `tokens`, listed explicitly with repetition.
fn enumerate_ngrams(tokens: &[String], n: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    if tokens.len() < n {
        return out;
    }
    for start in 0..=tokens.len() - n {
        out.push(tokens[start..start + n].to_vec());
    }
    out
}

fn occurrences(list: &[Vec<String>], gram: &[String]) -> u64 {
    list.iter().filter(|g| g.as_slice() == gram).count() as u64
}

/// Per-sentence (matches, totals, hyp_len, closest ref_len).
pub fn brute_stats(hyp: &[String], refs: &[Vec<String>]) -> ([u64; 4], [u64; 4], u64, u64) {
    let hyp = lower(hyp);
    let refs: Vec<Vec<String>> = refs.iter().map(|r| lower(r)).collect();
    let mut matches = [0u64; 4];
    let mut totals = [0u64; 4];
    for n in 1..=4 {
        let hyp_grams = enumerate_ngrams(&hyp, n);
        totals[n - 1] = hyp_grams.len() as u64;
        let ref_grams: Vec<Vec<Vec<String>>> = refs.iter().map(|r| enumerate_ngrams(r, n)).collect();
        let mut seen: Vec<Vec<String>> = Vec::new();
        for g in &hyp_grams {
            if seen.contains(g) {
                continue;
            }
            seen.push(g.clone());
            let in_hyp = occurrences(&hyp_grams, g);
            let max_ref = ref_grams.iter().map(|rg| occurrences(rg, g)).max().unwrap_or(0);
            matches[n - 1] += in_hyp.min(max_ref);
        }
    }
    let c = hyp.len() as i64;
    let mut best: Option<i64> = None;
    for r in &refs {
        let r = r.len() as i64;
        best = match best {
            None => Some(r),
            Some(b) if (r - c).abs() < (b - c).abs() || ((r - c).abs() == (b - c).abs() && r < b) => Some(r),
            keep => keep,
        };
    }
    (matches, totals, c as u64, best.unwrap_or(0) as u64)
}

/// Corpus BLEU from brute-force statistics, with orders that have no
/// hypothesis n-grams left out of the mean.
pub fn brute_corpus_bleu(hyps: &[Vec<String>], refs: &[Vec<Vec<String>>]) -> f64 {
    let mut m = [0u64; 4];
    let mut t = [0u64; 4];
    let (mut c, mut r) = (0u64, 0u64);
    for (h, rs) in hyps.iter().zip(refs) {
        let (sm, st, sc, sr) = brute_stats(h, rs);
        for n in 0..4 {
            m[n] += sm[n];
            t[n] += st[n];
        }
        c += sc;
        r += sr;
    }
    if c == 0 {
        return if r == 0 { 1.0 } else { 0.0 };
    }
    let mut logs = Vec::new();
    for n in 0..4 {
        if t[n] == 0 {
            continue;
        }
        if m[n] == 0 {
            return 0.0;
        }
        logs.push((m[n] as f64 / t[n] as f64).ln());
    }
    let bp = if c < r { (1.0 - r as f64 / c as f64).exp() } else { 1.0 };
    bp * (logs.iter().sum::<f64>() / logs.len() as f64).exp()
}

/// Add-one smoothed sentence BLEU from brute-force statistics.
pub fn brute_sentence_bleu(hyp: &[String], refs: &[Vec<String>]) -> f64 {
    let (m, t, c, r) = brute_stats(hyp, refs);
    if c == 0 {
        return if r == 0 { 1.0 } else { 0.0 };
    }
    if m[0] == 0 {
        return 0.0;
    }
    let mut product = m[0] as f64 / t[0] as f64;
    for n in 1..4 {
        product *= (m[n] + 1) as f64 / (t[n] + 1) as f64;
    }
    let bp = if c < r { (1.0 - r as f64 / c as f64).exp() } else { 1.0 };
    bp * product.powf(0.25)
}
