//! Parallel corpora, reference-scheme length filtering, nested
//! learning-curve splits and vocabulary counts.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::normalize::{normalize_text, NormalizeOptions};
use crate::scheme::{tokenize, CliticTable, Scheme};
use crate::{Error, Result};

pub const DEFAULT_MAX_LEN: usize = 100;
pub const DEFAULT_FRACTIONS: [f64; 3] = [0.0625, 0.25, 1.0];

/// Line-aligned source/target pairs, optionally with N references per line.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParallelCorpus {
    pairs: Vec<(String, String)>,
    references: Option<Vec<Vec<String>>>,
}

impl ParallelCorpus {
    pub fn new(pairs: Vec<(String, String)>) -> Result<Self> {
        for (i, (src, tgt)) in pairs.iter().enumerate() {
            if src.trim().is_empty() || tgt.trim().is_empty() {
                return Err(Error::LengthMismatch(format!(
                    "pair {i} has an empty side"
                )));
            }
        }
        Ok(ParallelCorpus {
            pairs,
            references: None,
        })
    }

    /// Attaches one reference set per line.
    pub fn with_references(mut self, references: Vec<Vec<String>>) -> Result<Self> {
        if references.len() != self.pairs.len() {
            return Err(Error::LengthMismatch(format!(
                "{} reference sets for {} pairs",
                references.len(),
                self.pairs.len()
            )));
        }
        if let Some(i) = references.iter().position(Vec::is_empty) {
            return Err(Error::LengthMismatch(format!("reference set {i} is empty")));
        }
        self.references = Some(references);
        Ok(self)
    }

    /// Reads line-aligned UTF-8 files. Reference files, if any, contribute
    /// one translation each to every line's reference set.
    pub fn from_files(source: &Path, target: &Path, references: &[&Path]) -> Result<Self> {
        let src = read_lines(source)?;
        let tgt = read_lines(target)?;
        if src.len() != tgt.len() {
            return Err(Error::Data {
                path: target.to_path_buf(),
                line: tgt.len().min(src.len()) + 1,
                message: format!("{} lines, but {} has {}", tgt.len(), source.display(), src.len()),
            });
        }
        for (path, lines) in [(source, &src), (target, &tgt)] {
            if let Some(i) = lines.iter().position(|l| l.trim().is_empty()) {
                return Err(Error::Data {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: "empty line".into(),
                });
            }
        }
        let mut corpus = ParallelCorpus {
            pairs: src.into_iter().zip(tgt).collect(),
            references: None,
        };
        if !references.is_empty() {
            let sets = read_reference_sets(references, corpus.len())?;
            corpus.references = Some(sets);
        }
        Ok(corpus)
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn references(&self) -> Option<&[Vec<String>]> {
        self.references.as_deref()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|(s, _)| s.as_str())
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|(_, t)| t.as_str())
    }

    /// Keeps the given line indices, in the order given.
    pub fn select(&self, indices: &[usize]) -> ParallelCorpus {
        ParallelCorpus {
            pairs: indices.iter().map(|&i| self.pairs[i].clone()).collect(),
            references: self
                .references
                .as_ref()
                .map(|refs| indices.iter().map(|&i| refs[i].clone()).collect()),
        }
    }
}

/// Reads a UTF-8 file as lines, reporting the first invalid line.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| {
        let valid = &e.as_bytes()[..e.utf8_error().valid_up_to()];
        Error::Data {
            path: path.to_path_buf(),
            line: valid.iter().filter(|&&b| b == b'\n').count() + 1,
            message: "invalid UTF-8".into(),
        }
    })?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect())
}

/// Reads `ref.0 … ref.N-1` style files into per-line reference sets.
pub fn read_reference_sets(paths: &[&Path], expected_lines: usize) -> Result<Vec<Vec<String>>> {
    let mut sets = vec![Vec::with_capacity(paths.len()); expected_lines];
    for path in paths {
        let lines = read_lines(path)?;
        if lines.len() != expected_lines {
            return Err(Error::Data {
                path: path.to_path_buf(),
                line: lines.len().min(expected_lines) + 1,
                message: format!("{} lines, expected {expected_lines}", lines.len()),
            });
        }
        for (set, line) in sets.iter_mut().zip(lines) {
            set.push(line);
        }
    }
    Ok(sets)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterOptions {
    pub max_len: usize,
    pub reference_scheme: Scheme,
    /// Optional whitespace-token limit on the target side.
    pub max_target_len: Option<usize>,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions {
            max_len: DEFAULT_MAX_LEN,
            reference_scheme: Scheme::D3,
            max_target_len: None,
        }
    }
}

/// Result of [`filter_parallel`]: the kept pairs and their original indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtered {
    pub corpus: ParallelCorpus,
    pub indices: Vec<usize>,
}

/// Keeps the pairs whose source, normalized and tokenized under the
/// reference scheme, has at most `max_len` tokens. The same index set can
/// then be applied to every other scheme's tokenization.
pub fn filter_parallel(
    corpus: &ParallelCorpus,
    opts: &FilterOptions,
    table: &CliticTable,
) -> Result<Filtered> {
    if opts.max_len == 0 {
        return Err(Error::Config("max_len must be at least 1".into()));
    }
    let indices: Vec<usize> = corpus
        .pairs
        .iter()
        .enumerate()
        .filter(|(_, (src, tgt))| {
            let normalized = normalize_text(src, NormalizeOptions::default());
            let src_len = tokenize(&normalized, opts.reference_scheme, table).len();
            let tgt_ok = opts
                .max_target_len
                .is_none_or(|limit| tgt.split_whitespace().count() <= limit);
            src_len <= opts.max_len && tgt_ok
        })
        .map(|(i, _)| i)
        .collect();
    Ok(Filtered {
        corpus: corpus.select(&indices),
        indices,
    })
}

/// Writes an index sidecar: one 0-based line number per line.
pub fn format_index_sidecar(indices: &[usize]) -> String {
    indices.iter().map(|i| format!("{i}\n")).collect()
}

pub fn parse_index_sidecar(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("bad index {l:?}: {e}"),
            })
        })
        .collect()
}

/// One learning-curve subset.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSplit {
    pub fraction: f64,
    /// Selected line indices, ascending.
    pub indices: Vec<usize>,
    pub corpus: ParallelCorpus,
}

fn split_size(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64).round() as usize).min(n)
}

/// Nested learning-curve subsets: each fraction takes a prefix of one seeded
/// permutation of the line indices, so smaller splits are contained in
/// larger ones. Lines keep their original relative order.
pub fn curve_splits(corpus: &ParallelCorpus, fractions: &[f64], seed: u64) -> Result<Vec<CurveSplit>> {
    if fractions.is_empty() {
        return Err(Error::BadFraction("no fractions given".into()));
    }
    for (i, &f) in fractions.iter().enumerate() {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::BadFraction(format!("{f} is outside (0, 1]")));
        }
        if i > 0 && f < fractions[i - 1] {
            return Err(Error::BadFraction("fractions must be sorted ascending".into()));
        }
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    Ok(fractions
        .iter()
        .map(|&fraction| {
            let mut indices = order[..split_size(fraction, corpus.len())].to_vec();
            indices.sort_unstable();
            CurveSplit {
                fraction,
                corpus: corpus.select(&indices),
                indices,
            }
        })
        .collect())
}

/// Distinct and total token counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabReport {
    pub label: String,
    pub type_count: usize,
    pub token_count: usize,
}

/// Counts token types and tokens. With `lowercase`, types are counted
/// case-insensitively (used for the English side).
pub fn vocab_stats<I, S>(sentences: I, label: impl Into<String>, lowercase: bool) -> VocabReport
where
    I: IntoIterator<Item = S>,
    S: IntoIterator,
    S::Item: AsRef<str>,
{
    let mut types: HashSet<String> = HashSet::new();
    let mut token_count = 0;
    for sentence in sentences {
        for token in sentence {
            let token = token.as_ref();
            token_count += 1;
            if lowercase {
                types.insert(token.to_lowercase());
            } else if !types.contains(token) {
                types.insert(token.to_string());
            }
        }
    }
    VocabReport {
        label: label.into(),
        type_count: types.len(),
        token_count,
    }
}
