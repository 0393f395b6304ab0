use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use segsel_core::bleu::{evaluate, BootstrapConfig, DEFAULT_RESAMPLES};
use segsel_core::bpe::{bpe_learn, bpe_undo, BpeConfig, BpeEncoder, BpeModel, DEFAULT_JOIN_MARKER};
use segsel_core::corpus::{
    curve_splits, filter_parallel, format_index_sidecar, read_reference_sets, vocab_stats,
    FilterOptions, ParallelCorpus, DEFAULT_MAX_LEN,
};
use segsel_core::select::{combine_corpus, Criterion, SelectOptions, System};
use segsel_core::{detokenize, normalize_text, tokenize, CliticTable, NormalizeOptions, Scheme};

use crate::pipeline::{run_pipeline, split_label, PipelineConfig};
use crate::report::{render_jsonl, render_table, report_table, RowInput};
use crate::{join_lines, lines_of, read_file_lines, read_text, write_file, write_out, CliError, Result};

/// Arabic preprocessing, subword segmentation, BLEU evaluation and MT system selection.
#[derive(Debug, Parser)]
#[command(name = "segsel", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize Alif/Ya spelling and strip diacritics (stdin -> stdout)
    Normalize(NormalizeArgs),
    /// Normalize and split clitics under a tokenization scheme (stdin -> stdout)
    Tokenize(TokenizeArgs),
    /// Reattach split clitics (stdin -> stdout)
    Detokenize(DetokenizeArgs),
    /// Learn a BPE merge list from tokenized text on stdin
    BpeLearn(BpeLearnArgs),
    /// Segment tokenized text into subword units (stdin -> stdout)
    BpeApply(BpeApplyArgs),
    /// Join subword units back into tokens (stdin -> stdout)
    BpeUndo(BpeUndoArgs),
    /// Drop parallel pairs whose source is too long under a reference scheme
    Filter(FilterArgs),
    /// Draw nested learning-curve subsets of a parallel corpus
    Split(SplitArgs),
    /// Count token types and tokens of text on stdin
    VocabStats(VocabStatsArgs),
    /// Corpus BLEU-4 of a hypothesis file, optionally with a bootstrap interval
    Bleu(BleuArgs),
    /// Score two systems against shared references with a paired bootstrap test
    Compare(CompareArgs),
    /// Combine two systems line by line by length or oracle criterion
    Select(SelectArgs),
    /// Run the full preprocessing pipeline into an experiment directory
    Pipeline(PipelineArgs),
    /// Build a comparison table over several systems
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Keep Alif Madda instead of mapping it to bare Alif
    #[arg(long)]
    pub keep_madda: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Clitic table override (surface<TAB>proclitic|enclitic<TAB>atb,d3)
    #[arg(long, value_name = "FILE")]
    pub table: Option<PathBuf>,
    /// Minimum number of letters left in a stem after clitic splitting
    #[arg(long, value_name = "N")]
    pub min_stem_len: Option<usize>,
}

impl TableArgs {
    fn load(&self) -> Result<CliticTable> {
        let table = match &self.table {
            Some(path) => {
                let text = read_text(
                    std::fs::File::open(path).map_err(|e| CliError::io(path, e))?,
                    &path.display().to_string(),
                )?;
                CliticTable::parse(&text).map_err(|e| match e {
                    segsel_core::Error::Parse { line, message } => segsel_core::Error::Data {
                        path: path.clone(),
                        line,
                        message,
                    },
                    other => other,
                })?
            }
            None => CliticTable::default(),
        };
        Ok(match self.min_stem_len {
            Some(n) => table.with_min_stem_len(n)?,
            None => table,
        })
    }
}

#[derive(Debug, Args)]
pub struct TokenizeArgs {
    /// Tokenization scheme: raw, atb or d3
    #[arg(long)]
    pub scheme: Scheme,
    #[command(flatten)]
    pub table: TableArgs,
    /// Keep Alif Madda during normalization
    #[arg(long)]
    pub keep_madda: bool,
}

#[derive(Debug, Args)]
pub struct DetokenizeArgs {
    /// Scheme the input was tokenized with (informational; markers carry the structure)
    #[arg(long)]
    pub scheme: Option<Scheme>,
}

#[derive(Debug, Args)]
pub struct BpeLearnArgs {
    /// Target symbol vocabulary (initial alphabet plus merges)
    #[arg(long, default_value_t = segsel_core::bpe::DEFAULT_TARGET_VOCAB)]
    pub vocab_size: usize,
    /// Output model file
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct BpeApplyArgs {
    /// Model written by bpe-learn
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct BpeUndoArgs {
    /// Model whose join marker to use
    #[arg(long, value_name = "FILE", conflicts_with = "join_marker")]
    pub model: Option<PathBuf>,
    /// Join marker, when no model is given
    #[arg(long, default_value = DEFAULT_JOIN_MARKER)]
    pub join_marker: String,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Source side (one sentence per line)
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    /// Target side, line-aligned with the source
    #[arg(long, value_name = "FILE")]
    pub tgt: PathBuf,
    /// Maximum source length in reference-scheme tokens
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    pub max_len: usize,
    /// Scheme used to measure source length
    #[arg(long, default_value = "d3")]
    pub ref_scheme: Scheme,
    /// Also limit the target side to this many whitespace tokens
    #[arg(long, value_name = "N")]
    pub also_target_len: Option<usize>,
    #[command(flatten)]
    pub table: TableArgs,
    /// Retained source lines
    #[arg(long, value_name = "FILE")]
    pub out_src: PathBuf,
    /// Retained target lines
    #[arg(long, value_name = "FILE")]
    pub out_tgt: PathBuf,
    /// Retained 0-based line numbers, one per line
    #[arg(long, value_name = "FILE")]
    pub index: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub tgt: PathBuf,
    /// Comma-separated ascending fractions in (0, 1]
    #[arg(long, value_delimiter = ',', default_value = "0.0625,0.25,1.0")]
    pub fractions: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Directory receiving frac-<f>/{index,source,target}.txt
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VocabStatsArgs {
    /// Label printed in the first column
    #[arg(long, default_value = "-")]
    pub label: String,
    /// Count types case-insensitively
    #[arg(long)]
    pub lowercase: bool,
    /// Emit a JSON record instead of a tab-separated line
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RefArgs {
    /// Comma-separated reference files, each line-aligned with the hypotheses
    #[arg(long, value_name = "FILES", value_delimiter = ',', required = true)]
    pub refs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    /// Bootstrap resamples
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    pub resamples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl BootstrapArgs {
    fn config(&self) -> Result<BootstrapConfig> {
        if self.resamples < segsel_core::bleu::MIN_RESAMPLES {
            return Err(segsel_core::Error::Config(format!(
                "at least {} resamples required, got {}",
                segsel_core::bleu::MIN_RESAMPLES,
                self.resamples
            ))
            .into());
        }
        Ok(BootstrapConfig::new(self.resamples, self.seed))
    }
}

#[derive(Debug, Args)]
pub struct BleuArgs {
    #[arg(long, value_name = "FILE")]
    pub hyp: PathBuf,
    #[command(flatten)]
    pub refs: RefArgs,
    /// Compute the bootstrap confidence half-width
    #[arg(long)]
    pub ci: bool,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    /// Emit a JSON record
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_name = "FILE")]
    pub hyp_a: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub hyp_b: PathBuf,
    #[command(flatten)]
    pub refs: RefArgs,
    /// Row label
    #[arg(long, default_value = "-")]
    pub label: String,
    /// Vocabulary size shown in the #Vocab column
    #[arg(long)]
    pub vocab: Option<usize>,
    /// Leave the CI columns empty
    #[arg(long)]
    pub no_ci: bool,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    /// Emit line-delimited JSON instead of a table
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Selection criterion: length or oracle
    #[arg(long)]
    pub mode: Criterion,
    /// Source sentences (tokenized), line-aligned with the hypotheses
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub hyp_a: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub hyp_b: PathBuf,
    /// Comma-separated reference files (required for oracle mode)
    #[arg(long, value_name = "FILES", value_delimiter = ',')]
    pub refs: Vec<PathBuf>,
    /// System preferred on ties: a or b
    #[arg(long, default_value = "a")]
    pub priority: System,
    /// Expected target/source length ratio for length mode
    #[arg(long, default_value_t = 1.0)]
    pub ratio: f64,
    /// Combined output (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Decision log, tab-separated
    #[arg(long, value_name = "FILE")]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub tgt: PathBuf,
    /// Experiment directory to create (must not exist)
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Scheme used for splits and BPE
    #[arg(long, default_value = "atb")]
    pub scheme: Scheme,
    /// BPE target vocabulary
    #[arg(long, default_value_t = segsel_core::bpe::DEFAULT_TARGET_VOCAB)]
    pub bpe_vocab: usize,
    /// Skip BPE
    #[arg(long)]
    pub no_bpe: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    pub max_len: usize,
    #[arg(long, value_name = "N")]
    pub also_target_len: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.0625,0.25,1.0")]
    pub fractions: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Resamples recorded for downstream evaluation
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    pub resamples: usize,
    #[arg(long)]
    pub keep_madda: bool,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Row LABEL=HYP_A[,HYP_B]; repeatable
    #[arg(long = "row", value_name = "SPEC", required = true)]
    pub rows: Vec<String>,
    /// Vocabulary size for a row, LABEL=N; repeatable
    #[arg(long = "vocab", value_name = "LABEL=N")]
    pub vocab: Vec<String>,
    #[command(flatten)]
    pub refs: RefArgs,
    /// Fill the CI columns
    #[arg(long)]
    pub ci: bool,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    /// Emit line-delimited JSON instead of a table
    #[arg(long)]
    pub json: bool,
}

fn tokens(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_string).collect()
}

fn read_hyps(path: &Path) -> Result<Vec<Vec<String>>> {
    Ok(read_file_lines(path)?.iter().map(|l| tokens(l)).collect())
}

fn read_refs(paths: &[PathBuf], expected: usize) -> Result<Vec<Vec<Vec<String>>>> {
    let paths: Vec<&Path> = paths.iter().map(PathBuf::as_path).collect();
    Ok(read_reference_sets(&paths, expected)?
        .into_iter()
        .map(|set| set.iter().map(|r| tokens(r)).collect())
        .collect())
}

fn read_stdin(stdin: &mut dyn Read) -> Result<String> {
    read_text(stdin, "<stdin>")
}

/// Maps each stdin line through `f` in parallel and writes the results in order.
fn map_lines<F>(stdin: &mut dyn Read, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: Fn(&str) -> Result<String> + Sync,
{
    let text = read_stdin(stdin)?;
    let out: Vec<String> = lines_of(&text).par_iter().map(|l| f(l)).collect::<Result<_>>()?;
    write_out(stdout, &join_lines(&out))
}

fn load_model(path: &Path) -> Result<BpeModel> {
    let text = read_text(std::fs::File::open(path).map_err(|e| CliError::io(path, e))?, &path.display().to_string())?;
    BpeModel::load(&text).map_err(|e| match e {
        segsel_core::Error::Parse { line, message } => segsel_core::Error::Data {
            path: path.to_path_buf(),
            line,
            message,
        }
        .into(),
        other => other.into(),
    })
}

fn parse_label_value(entry: &str, what: &str) -> Result<(String, String)> {
    match entry.split_once('=') {
        Some((label, value)) if !label.is_empty() && !value.is_empty() => {
            Ok((label.to_string(), value.to_string()))
        }
        _ => Err(CliError::Usage(format!("{what} {entry:?} is not LABEL=VALUE"))),
    }
}

#[derive(Serialize)]
struct BleuRecord {
    bleu: f64,
    ci: Option<f64>,
    precisions: [f64; 4],
    brevity_penalty: f64,
    sentences: usize,
}

#[derive(Serialize)]
struct VocabRecord<'a> {
    label: &'a str,
    types: usize,
    tokens: usize,
}

/// Executes a parsed command line against the given streams.
pub fn run(cli: Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Normalize(args) => {
            let opts = NormalizeOptions {
                keep_madda: args.keep_madda,
            };
            map_lines(stdin, stdout, |l| Ok(normalize_text(l, opts).into_string()))
        }
        Command::Tokenize(args) => {
            let table = args.table.load()?;
            let opts = NormalizeOptions {
                keep_madda: args.keep_madda,
            };
            map_lines(stdin, stdout, |l| {
                Ok(tokenize(&normalize_text(l, opts), args.scheme, &table).to_line())
            })
        }
        Command::Detokenize(_) => map_lines(stdin, stdout, |l| Ok(detokenize(&tokens(l))?.into_string())),
        Command::BpeLearn(args) => {
            let text = read_stdin(stdin)?;
            let model = bpe_learn(text.split_whitespace(), &BpeConfig::with_target_vocab(args.vocab_size))?;
            write_file(&args.model, &model.save())
        }
        Command::BpeApply(args) => {
            let model = load_model(&args.model)?;
            let text = read_stdin(stdin)?;
            let mut encoder = BpeEncoder::new(&model);
            let out: Vec<String> = lines_of(&text)
                .iter()
                .map(|l| encoder.encode(&l.split_whitespace().collect::<Vec<_>>()).join(" "))
                .collect();
            write_out(stdout, &join_lines(&out))
        }
        Command::BpeUndo(args) => {
            let marker = match &args.model {
                Some(path) => load_model(path)?.join_marker().to_string(),
                None => args.join_marker.clone(),
            };
            map_lines(stdin, stdout, |l| Ok(bpe_undo(&tokens(l), &marker)?.join(" ")))
        }
        Command::Filter(args) => {
            let table = args.table.load()?;
            let corpus = ParallelCorpus::from_files(&args.src, &args.tgt, &[])?;
            let filtered = filter_parallel(
                &corpus,
                &FilterOptions {
                    max_len: args.max_len,
                    reference_scheme: args.ref_scheme,
                    max_target_len: args.also_target_len,
                },
                &table,
            )?;
            write_file(&args.out_src, &join_lines(&filtered.corpus.sources().collect::<Vec<_>>()))?;
            write_file(&args.out_tgt, &join_lines(&filtered.corpus.targets().collect::<Vec<_>>()))?;
            write_file(&args.index, &format_index_sidecar(&filtered.indices))
        }
        Command::Split(args) => {
            let corpus = ParallelCorpus::from_files(&args.src, &args.tgt, &[])?;
            for split in curve_splits(&corpus, &args.fractions, args.seed)? {
                let dir = args.out_dir.join(split_label(split.fraction));
                write_file(&dir.join("index.txt"), &format_index_sidecar(&split.indices))?;
                write_file(&dir.join("source.txt"), &join_lines(&split.corpus.sources().collect::<Vec<_>>()))?;
                write_file(&dir.join("target.txt"), &join_lines(&split.corpus.targets().collect::<Vec<_>>()))?;
            }
            Ok(())
        }
        Command::VocabStats(args) => {
            let text = read_stdin(stdin)?;
            let report = vocab_stats(
                lines_of(&text).into_iter().map(str::split_whitespace),
                args.label.as_str(),
                args.lowercase,
            );
            let line = if args.json {
                serde_json::to_string(&VocabRecord {
                    label: &report.label,
                    types: report.type_count,
                    tokens: report.token_count,
                })
                .expect("record serializes")
            } else {
                format!("{}\t{}\t{}", report.label, report.type_count, report.token_count)
            };
            write_out(stdout, &format!("{line}\n"))
        }
        Command::Bleu(args) => {
            let hyps = read_hyps(&args.hyp)?;
            let refs = read_refs(&args.refs.refs, hyps.len())?;
            let cfg = if args.ci { Some(args.bootstrap.config()?) } else { None };
            let report = evaluate(&hyps, &refs, cfg.as_ref())?;
            let line = if args.json {
                serde_json::to_string(&BleuRecord {
                    bleu: report.corpus_bleu,
                    ci: report.ci_halfwidth,
                    precisions: report.n_gram_precisions,
                    brevity_penalty: report.brevity_penalty,
                    sentences: hyps.len(),
                })
                .expect("record serializes")
            } else {
                let p = report.n_gram_precisions.map(|p| format!("{:.1}", p * 100.0));
                let ci = report
                    .ci_halfwidth
                    .map_or(String::new(), |h| format!(" ±{:.2}", h * 100.0));
                format!(
                    "BLEU = {:.2}{ci} ({}) BP = {:.3}",
                    report.corpus_bleu * 100.0,
                    p.join("/"),
                    report.brevity_penalty
                )
            };
            write_out(stdout, &format!("{line}\n"))
        }
        Command::Compare(args) => {
            let a = read_hyps(&args.hyp_a)?;
            let b = read_hyps(&args.hyp_b)?;
            if a.len() != b.len() {
                return Err(segsel_core::Error::LengthMismatch(format!(
                    "{} has {} lines, {} has {}",
                    args.hyp_a.display(),
                    a.len(),
                    args.hyp_b.display(),
                    b.len()
                ))
                .into());
            }
            let refs = read_refs(&args.refs.refs, a.len())?;
            let cfg = args.bootstrap.config()?;
            let rows = report_table(
                &[RowInput {
                    label: args.label.clone(),
                    vocab: args.vocab,
                    hyp_a: &a,
                    hyp_b: Some(&b),
                }],
                &refs,
                (!args.no_ci).then_some(&cfg),
                &cfg,
            )?;
            let text = if args.json { render_jsonl(&rows) } else { render_table(&rows) };
            write_out(stdout, &text)
        }
        Command::Select(args) => {
            let srcs = read_file_lines(&args.src)?;
            let a = read_file_lines(&args.hyp_a)?;
            let b = read_file_lines(&args.hyp_b)?;
            let refs = if args.refs.is_empty() {
                None
            } else {
                let paths: Vec<&Path> = args.refs.iter().map(PathBuf::as_path).collect();
                Some(read_reference_sets(&paths, srcs.len())?)
            };
            let combined = combine_corpus(
                &srcs,
                &a,
                &b,
                refs.as_deref(),
                args.mode,
                &SelectOptions {
                    priority: args.priority,
                    ratio: args.ratio,
                },
            )?;
            let body = join_lines(&combined.lines);
            match &args.out {
                Some(path) => write_file(path, &body)?,
                None => write_out(stdout, &body)?,
            }
            if let Some(path) = &args.log {
                write_file(path, &combined.decision_log())?;
            }
            Ok(())
        }
        Command::Pipeline(args) => {
            let table = args.table.load()?;
            let config = PipelineConfig {
                scheme: args.scheme,
                bpe_vocab: (!args.no_bpe).then_some(args.bpe_vocab),
                filter_max_len: args.max_len,
                also_target_len: args.also_target_len,
                fractions: args.fractions.clone(),
                seed: args.seed,
                resamples: args.resamples,
                keep_madda: args.keep_madda,
            };
            let manifest = run_pipeline(&config, &args.src, &args.tgt, &table, &args.out_dir)?;
            write_out(
                stdout,
                &format!(
                    "{}: {} of {} lines kept, {} artifacts\n",
                    args.out_dir.display(),
                    manifest.lines["filtered"],
                    manifest.lines["input"],
                    manifest.artifacts.len()
                ),
            )
        }
        Command::Report(args) => {
            let mut vocab = BTreeMap::new();
            for entry in &args.vocab {
                let (label, n) = parse_label_value(entry, "--vocab")?;
                let n: usize = n
                    .parse()
                    .map_err(|_| CliError::Usage(format!("--vocab {entry:?}: not a count")))?;
                vocab.insert(label, n);
            }
            let mut systems = Vec::new();
            for entry in &args.rows {
                let (label, files) = parse_label_value(entry, "--row")?;
                let files: Vec<&str> = files.split(',').collect();
                if files.len() > 2 {
                    return Err(CliError::Usage(format!("--row {entry:?} names more than two systems")));
                }
                let a = read_hyps(Path::new(files[0]))?;
                let b = files.get(1).map(|f| read_hyps(Path::new(f))).transpose()?;
                systems.push((label, a, b));
            }
            let n = systems[0].1.len();
            let refs = read_refs(&args.refs.refs, n)?;
            let inputs: Vec<RowInput<'_>> = systems
                .iter()
                .map(|(label, a, b)| RowInput {
                    label: label.clone(),
                    vocab: vocab.get(label).copied(),
                    hyp_a: a,
                    hyp_b: b.as_deref(),
                })
                .collect();
            let cfg = args.bootstrap.config()?;
            let rows = report_table(&inputs, &refs, args.ci.then_some(&cfg), &cfg)?;
            let text = if args.json { render_jsonl(&rows) } else { render_table(&rows) };
            write_out(stdout, &text)
        }
    }
}
