//! Per-sentence selection between two systems' hypotheses.
//!
//! Length-based selection keeps the candidate whose token count is closest
//! to the source sentence; oracle selection keeps the one with the higher
//! smoothed sentence BLEU. Exact ties go to the configured priority system.

use std::fmt;
use std::str::FromStr;

use crate::bleu::sentence_bleu_smoothed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum System {
    #[default]
    A,
    B,
}

impl System {
    pub fn other(self) -> System {
        match self {
            System::A => System::B,
            System::B => System::A,
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::A => "A",
            System::B => "B",
        })
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(System::A),
            "b" => Ok(System::B),
            other => Err(Error::Config(format!("unknown system {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Length,
    Oracle,
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "length" => Ok(Criterion::Length),
            "oracle" => Ok(Criterion::Oracle),
            other => Err(Error::Config(format!("unknown selection mode {other:?}"))),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Length => "LENGTH",
            Criterion::Oracle => "ORACLE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionDecision {
    pub line_index: usize,
    pub chosen: System,
    pub len_src: usize,
    pub len_a: usize,
    pub len_b: usize,
    pub tie: bool,
    pub criterion: Criterion,
}

impl SelectionDecision {
    /// `line  chosen  len_src  len_a  len_b  tie`
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.line_index, self.chosen, self.len_src, self.len_a, self.len_b, self.tie
        )
    }
}

pub const DECISION_LOG_HEADER: &str = "line\tchosen\tlen_src\tlen_a\tlen_b\ttie";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectOptions {
    pub priority: System,
    /// Expected target/source length ratio; 1.0 compares raw token counts.
    pub ratio: f64,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions {
            priority: System::A,
            ratio: 1.0,
        }
    }
}

fn pick(a_better: bool, b_better: bool, priority: System) -> (System, bool) {
    match (a_better, b_better) {
        (true, false) => (System::A, false),
        (false, true) => (System::B, false),
        _ => (priority, true),
    }
}

pub fn select_length<S: AsRef<str>>(
    src_len: usize,
    cand_a: &[S],
    cand_b: &[S],
    opts: &SelectOptions,
) -> SelectionDecision {
    let target = opts.ratio * src_len as f64;
    let dist_a = (cand_a.len() as f64 - target).abs();
    let dist_b = (cand_b.len() as f64 - target).abs();
    let (chosen, tie) = pick(dist_a < dist_b, dist_b < dist_a, opts.priority);
    SelectionDecision {
        line_index: 0,
        chosen,
        len_src: src_len,
        len_a: cand_a.len(),
        len_b: cand_b.len(),
        tie,
        criterion: Criterion::Length,
    }
}

pub fn select_oracle<S: AsRef<str>, R: AsRef<str>>(
    src_len: usize,
    cand_a: &[S],
    cand_b: &[S],
    refs: &[Vec<R>],
    priority: System,
) -> SelectionDecision {
    let score_a = sentence_bleu_smoothed(cand_a, refs);
    let score_b = sentence_bleu_smoothed(cand_b, refs);
    let (chosen, tie) = pick(score_a > score_b, score_b > score_a, priority);
    SelectionDecision {
        line_index: 0,
        chosen,
        len_src: src_len,
        len_a: cand_a.len(),
        len_b: cand_b.len(),
        tie,
        criterion: Criterion::Oracle,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Combined {
    pub lines: Vec<String>,
    pub decisions: Vec<SelectionDecision>,
}

impl Combined {
    pub fn decision_log(&self) -> String {
        let mut out = String::from(DECISION_LOG_HEADER);
        out.push('\n');
        for d in &self.decisions {
            out.push_str(&d.to_tsv());
            out.push('\n');
        }
        out
    }
}

fn words(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

/// Combines two line-aligned hypothesis lists. Output line `i` is the
/// chosen candidate's text, verbatim. `refs` holds one reference set per
/// line and is required for [`Criterion::Oracle`].
pub fn combine_corpus<S: AsRef<str>>(
    srcs: &[S],
    hyps_a: &[S],
    hyps_b: &[S],
    refs: Option<&[Vec<String>]>,
    mode: Criterion,
    opts: &SelectOptions,
) -> Result<Combined> {
    let n = srcs.len();
    if hyps_a.len() != n || hyps_b.len() != n {
        return Err(Error::LengthMismatch(format!(
            "source has {n} lines, A {}, B {}",
            hyps_a.len(),
            hyps_b.len()
        )));
    }
    let refs = match (mode, refs) {
        (Criterion::Oracle, None) => return Err(Error::MissingReferences),
        (_, Some(r)) if r.len() != n => {
            return Err(Error::LengthMismatch(format!(
                "source has {n} lines, references {}",
                r.len()
            )))
        }
        (_, r) => r,
    };

    let mut lines = Vec::with_capacity(n);
    let mut decisions = Vec::with_capacity(n);
    for i in 0..n {
        let src_len = words(srcs[i].as_ref()).len();
        let a = words(hyps_a[i].as_ref());
        let b = words(hyps_b[i].as_ref());
        let mut decision = match mode {
            Criterion::Length => select_length(src_len, &a, &b, opts),
            Criterion::Oracle => {
                let set: Vec<Vec<&str>> = refs.unwrap()[i].iter().map(|r| words(r)).collect();
                if set.is_empty() {
                    return Err(Error::MissingReferences);
                }
                select_oracle(src_len, &a, &b, &set, opts.priority)
            }
        };
        decision.line_index = i;
        lines.push(match decision.chosen {
            System::A => hyps_a[i].as_ref().to_string(),
            System::B => hyps_b[i].as_ref().to_string(),
        });
        decisions.push(decision);
    }
    Ok(Combined { lines, decisions })
}
