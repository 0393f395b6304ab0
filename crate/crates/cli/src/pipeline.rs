//! End-to-end preprocessing run with a deterministic artifact layout:
//!
//! ```text
//! <out>/
//!   manifest.json
//!   normalized/{source,target}.txt
//!   tokenized/{raw,atb,d3}.txt
//!   filtered/{index,raw,atb,d3,target}.txt
//!   splits/frac-<f>/{index,source,target}.txt
//!   bpe/frac-<f>/{model.bpe,source.txt}      (when BPE is enabled)
//! ```
//!
//! The tree is assembled in a temporary sibling directory and renamed into
//! place only after every stage succeeded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use segsel_core::bpe::{bpe_learn, BpeConfig, BpeEncoder, DEFAULT_TARGET_VOCAB};
use segsel_core::corpus::{
    curve_splits, filter_parallel, format_index_sidecar, vocab_stats, FilterOptions, ParallelCorpus,
    DEFAULT_FRACTIONS, DEFAULT_MAX_LEN,
};
use segsel_core::{normalize_text, tokenize, CliticTable, NormalizeOptions, Scheme};

use crate::{join_lines, write_file, CliError, Result};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    #[serde(with = "scheme_name")]
    pub scheme: Scheme,
    /// BPE symbol budget; `None` disables BPE.
    pub bpe_vocab: Option<usize>,
    pub filter_max_len: usize,
    pub also_target_len: Option<usize>,
    pub fractions: Vec<f64>,
    pub seed: u64,
    pub resamples: usize,
    pub keep_madda: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            scheme: Scheme::Atb,
            bpe_vocab: Some(DEFAULT_TARGET_VOCAB),
            filter_max_len: DEFAULT_MAX_LEN,
            also_target_len: None,
            fractions: DEFAULT_FRACTIONS.to_vec(),
            seed: 1,
            resamples: segsel_core::bleu::DEFAULT_RESAMPLES,
            keep_madda: false,
        }
    }
}

mod scheme_name {
    use segsel_core::Scheme;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(scheme: &Scheme, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(scheme.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scheme, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub types: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitEntry {
    pub fraction: f64,
    pub lines: usize,
    pub bpe_merges: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: PipelineConfig,
    pub inputs: BTreeMap<String, String>,
    pub lines: BTreeMap<String, usize>,
    /// Vocabulary of each scheme over the filtered source side.
    pub vocab: BTreeMap<String, VocabEntry>,
    pub splits: Vec<SplitEntry>,
    /// Relative artifact path -> SHA-256 of its contents.
    pub artifacts: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn split_label(fraction: f64) -> String {
    format!("frac-{fraction}")
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

struct Tree {
    root: PathBuf,
    artifacts: BTreeMap<String, String>,
}

impl Tree {
    fn put(&mut self, rel: &str, contents: &str) -> Result<()> {
        write_file(&self.root.join(rel), contents)?;
        self.artifacts
            .insert(rel.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }
}

/// Runs the whole preprocessing pipeline and returns its manifest.
pub fn run_pipeline(
    config: &PipelineConfig,
    source: &Path,
    target: &Path,
    table: &CliticTable,
    out_dir: &Path,
) -> Result<Manifest> {
    if out_dir.exists() {
        return Err(CliError::Usage(format!(
            "output directory {} already exists",
            out_dir.display()
        )));
    }
    let parent = match out_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| CliError::io(&parent, e))?;
    let staging = tempfile::Builder::new()
        .prefix(".segsel-pipeline-")
        .tempdir_in(&parent)
        .map_err(|e| CliError::io(&parent, e))?;

    let manifest = build(config, source, target, table, staging.path())?;
    let staged = staging.keep();
    fs::rename(&staged, out_dir).map_err(|e| {
        let _ = fs::remove_dir_all(&staged);
        CliError::io(out_dir, e)
    })?;
    Ok(manifest)
}

fn build(
    config: &PipelineConfig,
    source: &Path,
    target: &Path,
    table: &CliticTable,
    root: &Path,
) -> Result<Manifest> {
    let raw_corpus = ParallelCorpus::from_files(source, target, &[])?;
    if raw_corpus.is_empty() {
        return Err(segsel_core::Error::EmptyCorpus.into());
    }
    let mut tree = Tree {
        root: root.to_path_buf(),
        artifacts: BTreeMap::new(),
    };
    let mut inputs = BTreeMap::new();
    for path in [source, target] {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        inputs.insert(file_name(path), sha256_hex(&bytes));
    }

    let opts = NormalizeOptions {
        keep_madda: config.keep_madda,
    };
    let normalized: Vec<_> = raw_corpus
        .sources()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|s| normalize_text(s, opts))
        .collect();
    let targets: Vec<&str> = raw_corpus.targets().collect();
    tree.put("normalized/source.txt", &join_lines(&normalized.iter().map(|n| n.as_str()).collect::<Vec<_>>()))?;
    tree.put("normalized/target.txt", &join_lines(&targets))?;

    let mut tokenized: BTreeMap<Scheme, Vec<String>> = BTreeMap::new();
    for scheme in Scheme::ALL {
        let lines: Vec<String> = normalized
            .par_iter()
            .map(|n| tokenize(n, scheme, table).to_line())
            .collect();
        tree.put(&format!("tokenized/{}.txt", scheme.name()), &join_lines(&lines))?;
        tokenized.insert(scheme, lines);
    }

    let normalized_corpus = ParallelCorpus::new(
        normalized
            .iter()
            .zip(&targets)
            .map(|(s, t)| (s.as_str().to_string(), t.to_string()))
            .collect(),
    )?;
    let filtered = filter_parallel(
        &normalized_corpus,
        &FilterOptions {
            max_len: config.filter_max_len,
            reference_scheme: Scheme::D3,
            max_target_len: config.also_target_len,
        },
        table,
    )?;
    if filtered.corpus.is_empty() {
        return Err(segsel_core::Error::EmptyCorpus.into());
    }
    tree.put("filtered/index.txt", &format_index_sidecar(&filtered.indices))?;
    let mut vocab = BTreeMap::new();
    let mut filtered_tokens: BTreeMap<Scheme, Vec<String>> = BTreeMap::new();
    for (scheme, lines) in &tokenized {
        let kept: Vec<String> = filtered.indices.iter().map(|&i| lines[i].clone()).collect();
        tree.put(&format!("filtered/{}.txt", scheme.name()), &join_lines(&kept))?;
        let stats = vocab_stats(kept.iter().map(|l| l.split_whitespace()), scheme.to_string(), false);
        vocab.insert(
            scheme.name().to_string(),
            VocabEntry {
                types: stats.type_count,
                tokens: stats.token_count,
            },
        );
        filtered_tokens.insert(*scheme, kept);
    }
    let filtered_targets: Vec<&str> = filtered.corpus.targets().collect();
    tree.put("filtered/target.txt", &join_lines(&filtered_targets))?;

    let splits = curve_splits(&filtered.corpus, &config.fractions, config.seed)?;
    let scheme_lines = &filtered_tokens[&config.scheme];
    let mut split_entries = Vec::new();
    for split in &splits {
        let label = split_label(split.fraction);
        let source_lines: Vec<&str> = split.indices.iter().map(|&i| scheme_lines[i].as_str()).collect();
        tree.put(&format!("splits/{label}/index.txt"), &format_index_sidecar(&split.indices))?;
        tree.put(&format!("splits/{label}/source.txt"), &join_lines(&source_lines))?;
        tree.put(
            &format!("splits/{label}/target.txt"),
            &join_lines(&split.corpus.targets().collect::<Vec<_>>()),
        )?;

        let mut bpe_merges = None;
        if let Some(target_vocab) = config.bpe_vocab {
            let words = source_lines.iter().flat_map(|l| l.split_whitespace());
            let model = bpe_learn(words, &BpeConfig::with_target_vocab(target_vocab))?;
            let mut encoder = BpeEncoder::new(&model);
            let applied: Vec<String> = source_lines
                .iter()
                .map(|l| encoder.encode(&l.split_whitespace().collect::<Vec<_>>()).join(" "))
                .collect();
            tree.put(&format!("bpe/{label}/model.bpe"), &model.save())?;
            tree.put(&format!("bpe/{label}/source.txt"), &join_lines(&applied))?;
            bpe_merges = Some(model.merges().len());
        }
        split_entries.push(SplitEntry {
            fraction: split.fraction,
            lines: split.indices.len(),
            bpe_merges,
        });
    }

    let mut lines = BTreeMap::new();
    lines.insert("input".to_string(), raw_corpus.len());
    lines.insert("filtered".to_string(), filtered.indices.len());

    let manifest = Manifest {
        config: config.clone(),
        inputs,
        lines,
        vocab,
        splits: split_entries,
        artifacts: tree.artifacts.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&root.join(MANIFEST), &format!("{json}\n"))?;
    Ok(manifest)
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Core(segsel_core::Error::Data {
            path,
            line: e.line(),
            message: e.to_string(),
        })
    })
}
