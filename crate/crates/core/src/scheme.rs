//! Raw, ATB and D3 tokenization schemes.
//!
//! Every scheme first splits punctuation marks and digit runs into their own
//! tokens. ATB then detaches conjunction, preposition, future and pronominal
//! clitics; D3 additionally detaches the definite article. Clitic boundaries
//! are written as `X+` (proclitic) and `+X` (enclitic) so [`detokenize`] can
//! glue them back.
//!
//! Segmentation is a greedy, context-free rule pass over a [`CliticTable`].
//! A single analysis is computed per word and each scheme realizes a prefix
//! of its boundaries, which keeps the ATB split set nested inside D3.

use std::fmt;
use std::str::FromStr;

use crate::normalize::NormalizedText;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Raw,
    Atb,
    D3,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Raw, Scheme::Atb, Scheme::D3];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Raw => "raw",
            Scheme::Atb => "atb",
            Scheme::D3 => "d3",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Raw => "Raw",
            Scheme::Atb => "ATB",
            Scheme::D3 => "D3",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(Scheme::Raw),
            "atb" => Ok(Scheme::Atb),
            "d3" => Ok(Scheme::D3),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Schemes in which a clitic is detached. RAW never detaches anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SplitIn {
    pub atb: bool,
    pub d3: bool,
}

impl SplitIn {
    pub const BOTH: SplitIn = SplitIn { atb: true, d3: true };
    pub const D3_ONLY: SplitIn = SplitIn {
        atb: false,
        d3: true,
    };

    pub fn splits(self, scheme: Scheme) -> bool {
        match scheme {
            Scheme::Raw => false,
            Scheme::Atb => self.atb,
            Scheme::D3 => self.d3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliticEntry {
    pub surface: String,
    pub split_in: SplitIn,
    /// Proclitic position class; slots are stripped in ascending order and
    /// at most one entry per slot attaches to a word. Unused for enclitics.
    pub slot: u8,
}

impl CliticEntry {
    fn new(surface: &str, split_in: SplitIn, slot: u8) -> Self {
        CliticEntry {
            surface: surface.to_string(),
            split_in,
            slot,
        }
    }

    fn len(&self) -> usize {
        self.surface.chars().count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliticTable {
    proclitics: Vec<CliticEntry>,
    enclitics: Vec<CliticEntry>,
    min_stem_len: usize,
}

pub const DEFAULT_MIN_STEM_LEN: usize = 2;

impl Default for CliticTable {
    fn default() -> Self {
        let b = SplitIn::BOTH;
        let proclitics = vec![
            CliticEntry::new("و", b, 0),
            CliticEntry::new("ف", b, 0),
            CliticEntry::new("ب", b, 1),
            CliticEntry::new("ك", b, 1),
            CliticEntry::new("ل", b, 1),
            CliticEntry::new("س", b, 1),
            CliticEntry::new("ال", SplitIn::D3_ONLY, 2),
        ];
        let enclitics = ["ي", "نا", "ك", "كما", "كم", "كن", "ه", "ها", "هما", "هم", "هن"]
            .iter()
            .map(|s| CliticEntry::new(s, b, 0))
            .collect();
        CliticTable {
            proclitics,
            enclitics,
            min_stem_len: DEFAULT_MIN_STEM_LEN,
        }
    }
}

impl CliticTable {
    pub fn new(
        proclitics: Vec<CliticEntry>,
        enclitics: Vec<CliticEntry>,
        min_stem_len: usize,
    ) -> Result<Self> {
        if min_stem_len == 0 {
            return Err(Error::Config("min_stem_len must be at least 1".into()));
        }
        for entry in proclitics.iter().chain(&enclitics) {
            if entry.surface.is_empty() || !entry.surface.chars().all(is_arabic_letter) {
                return Err(Error::Config(format!(
                    "clitic {:?} must be a nonempty run of Arabic letters",
                    entry.surface
                )));
            }
            if !entry.split_in.d3 {
                return Err(Error::Config(format!(
                    "clitic {:?} is split in ATB but not D3",
                    entry.surface
                )));
            }
        }
        Ok(CliticTable {
            proclitics,
            enclitics,
            min_stem_len,
        })
    }

    pub fn with_min_stem_len(mut self, min_stem_len: usize) -> Result<Self> {
        if min_stem_len == 0 {
            return Err(Error::Config("min_stem_len must be at least 1".into()));
        }
        self.min_stem_len = min_stem_len;
        Ok(self)
    }

    pub fn proclitics(&self) -> &[CliticEntry] {
        &self.proclitics
    }

    pub fn enclitics(&self) -> &[CliticEntry] {
        &self.enclitics
    }

    pub fn min_stem_len(&self) -> usize {
        self.min_stem_len
    }

    /// Parses a clitic table file:
    /// `surface<TAB>proclitic|enclitic<TAB>atb,d3[<TAB>slot]`.
    ///
    /// Blank lines and lines starting with `#` are skipped. A proclitic
    /// without an explicit slot gets a slot of its own, after all earlier
    /// proclitics.
    pub fn parse(text: &str) -> Result<Self> {
        let mut proclitics = Vec::new();
        let mut enclitics = Vec::new();
        let mut next_slot: u8 = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| Error::Parse { line, message };
            let trimmed = raw.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(err(format!("expected 3 or 4 tab-separated fields, got {}", fields.len())));
            }
            let surface = fields[0].trim();
            let mut split_in = SplitIn::default();
            for s in fields[2].split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match s.parse::<Scheme>() {
                    Ok(Scheme::Atb) => split_in.atb = true,
                    Ok(Scheme::D3) => split_in.d3 = true,
                    _ => return Err(err(format!("unknown split scheme {s:?}"))),
                }
            }
            if !split_in.d3 {
                return Err(err(format!("clitic {surface:?} must be split in d3")));
            }
            if surface.is_empty() || !surface.chars().all(is_arabic_letter) {
                return Err(err(format!("clitic {surface:?} must be Arabic letters")));
            }
            match fields[1].trim() {
                "proclitic" => {
                    let slot = match fields.get(3) {
                        Some(s) => s
                            .trim()
                            .parse::<u8>()
                            .map_err(|_| err(format!("bad slot {s:?}")))?,
                        None => next_slot,
                    };
                    next_slot = next_slot.max(slot.saturating_add(1));
                    proclitics.push(CliticEntry::new(surface, split_in, slot));
                }
                "enclitic" => enclitics.push(CliticEntry::new(surface, split_in, 0)),
                other => return Err(err(format!("expected proclitic or enclitic, got {other:?}"))),
            }
        }
        CliticTable::new(proclitics, enclitics, DEFAULT_MIN_STEM_LEN)
    }

    fn analyze<'t>(&'t self, word: &'t str) -> Analysis<'t> {
        let mut slots: Vec<u8> = self.proclitics.iter().map(|e| e.slot).collect();
        slots.sort_unstable();
        slots.dedup();

        let mut rest = word;
        let mut remaining = word.chars().count();
        let mut prefixes = Vec::new();
        for slot in slots {
            let best = self
                .proclitics
                .iter()
                .filter(|e| e.slot == slot && rest.starts_with(e.surface.as_str()))
                .filter(|e| remaining >= e.len() + self.min_stem_len)
                .fold(None::<&CliticEntry>, |best, e| match best {
                    Some(b) if b.len() >= e.len() => Some(b),
                    _ => Some(e),
                });
            if let Some(entry) = best {
                rest = &rest[entry.surface.len()..];
                remaining -= entry.len();
                prefixes.push(entry);
            }
        }

        let suffix = self
            .enclitics
            .iter()
            .filter(|e| rest.ends_with(e.surface.as_str()))
            .filter(|e| remaining >= e.len() + self.min_stem_len)
            .fold(None::<&CliticEntry>, |best, e| match best {
                Some(b) if b.len() >= e.len() => Some(b),
                _ => Some(e),
            });
        let stem = match suffix {
            Some(e) => &rest[..rest.len() - e.surface.len()],
            None => rest,
        };
        Analysis {
            prefixes,
            stem,
            suffix,
        }
    }
}

struct Analysis<'a> {
    prefixes: Vec<&'a CliticEntry>,
    stem: &'a str,
    suffix: Option<&'a CliticEntry>,
}

pub fn is_arabic_letter(c: char) -> bool {
    matches!(c,
        '\u{0621}'..='\u{063A}'
        | '\u{0641}'..='\u{064A}'
        | '\u{0671}'..='\u{06D3}'
        | '\u{06D5}'
        | '\u{06EE}'..='\u{06EF}'
        | '\u{06FA}'..='\u{06FC}'
        | '\u{06FF}')
}

pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c,
            '\u{00A1}' | '\u{00A7}' | '\u{00AB}' | '\u{00B6}' | '\u{00B7}' | '\u{00BB}' | '\u{00BF}'
            | '\u{060C}' | '\u{060D}' | '\u{061B}' | '\u{061E}' | '\u{061F}'
            | '\u{066A}'..='\u{066D}'
            | '\u{06D4}'
            | '\u{2010}'..='\u{2027}'
            | '\u{2030}'..='\u{205E}'
            | '\u{3001}'..='\u{3003}'
            | '\u{FD3E}' | '\u{FD3F}')
}

pub fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || matches!(c, '\u{0660}'..='\u{0669}' | '\u{06F0}'..='\u{06F9}')
}

/// Splits one normalized word into clitic-marked subtokens.
///
/// Proclitics are matched left to right, one per slot (conjunction,
/// preposition/future, article), each time taking the longest entry that
/// leaves at least `min_stem_len` letters. One enclitic is then matched from
/// the right under the same constraint. Words containing anything other
/// than Arabic letters come back whole.
pub fn segment_word(word: &str, scheme: Scheme, table: &CliticTable) -> Vec<String> {
    if scheme == Scheme::Raw || word.is_empty() || !word.chars().all(is_arabic_letter) {
        return vec![word.to_string()];
    }
    let analysis = table.analyze(word);

    let mut out = Vec::with_capacity(analysis.prefixes.len() + 2);
    let mut stem = String::new();
    let mut detaching = true;
    for entry in &analysis.prefixes {
        detaching &= entry.split_in.splits(scheme);
        if detaching {
            out.push(format!("{}+", entry.surface));
        } else {
            stem.push_str(&entry.surface);
        }
    }
    stem.push_str(analysis.stem);
    match analysis.suffix {
        Some(entry) if entry.split_in.splits(scheme) => {
            out.push(stem);
            out.push(format!("+{}", entry.surface));
        }
        Some(entry) => {
            stem.push_str(&entry.surface);
            out.push(stem);
        }
        None => out.push(stem),
    }
    out
}

/// Tokens of one sentence plus the scheme that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub scheme: Scheme,
}

impl TokenSequence {
    pub fn new(tokens: Vec<String>, scheme: Scheme) -> Self {
        TokenSequence { tokens, scheme }
    }

    /// Reads a token-file line (tokens separated by whitespace).
    pub fn from_line(line: &str, scheme: Scheme) -> Self {
        TokenSequence {
            tokens: line.split_whitespace().map(str::to_string).collect(),
            scheme,
        }
    }

    pub fn to_line(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn split_raw(chunk: &str, out: &mut Vec<String>) {
    let mut current = String::new();
    let mut in_digits = false;
    for c in chunk.chars() {
        if is_punctuation(c) {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            out.push(c.to_string());
            in_digits = false;
        } else {
            let digit = is_digit(c);
            if digit != in_digits && !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            in_digits = digit;
            current.push(c);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
}

/// Tokenizes a normalized sentence under `scheme`.
pub fn tokenize(text: &NormalizedText, scheme: Scheme, table: &CliticTable) -> TokenSequence {
    let mut raw = Vec::new();
    for chunk in text.as_str().split_whitespace() {
        split_raw(chunk, &mut raw);
    }
    let tokens = match scheme {
        Scheme::Raw => raw,
        _ => raw
            .into_iter()
            .flat_map(|t| segment_word(&t, scheme, table))
            .collect(),
    };
    TokenSequence { tokens, scheme }
}

fn proclitic_body(token: &str) -> Option<&str> {
    token
        .strip_suffix('+')
        .filter(|body| !body.is_empty() && !body.starts_with('+'))
}

fn enclitic_body(token: &str) -> Option<&str> {
    token
        .strip_prefix('+')
        .filter(|body| !body.is_empty() && !body.ends_with('+'))
}

/// Glues clitic-marked tokens back onto their hosts and joins the resulting
/// words with single spaces. A lone `+` is an ordinary punctuation token.
pub fn detokenize(tokens: &[String]) -> Result<NormalizedText> {
    let mut words: Vec<String> = Vec::new();
    let mut pending = String::new();
    for (i, token) in tokens.iter().enumerate() {
        if token.len() > 1 && token.starts_with('+') && token.ends_with('+') {
            return Err(Error::MalformedMarkers(format!(
                "token {i} {token:?} carries markers on both sides"
            )));
        }
        if let Some(body) = proclitic_body(token) {
            pending.push_str(body);
        } else if let Some(body) = enclitic_body(token) {
            if !pending.is_empty() {
                pending.push_str(body);
            } else if let Some(last) = words.last_mut() {
                last.push_str(body);
            } else {
                return Err(Error::MalformedMarkers(format!(
                    "enclitic {token:?} has no preceding host"
                )));
            }
        } else {
            pending.push_str(token);
            words.push(std::mem::take(&mut pending));
        }
    }
    if !pending.is_empty() {
        return Err(Error::MalformedMarkers(format!(
            "proclitic {:?} at end of sequence",
            tokens.last().map(String::as_str).unwrap_or_default()
        )));
    }
    Ok(NormalizedText::from_normalized(words.join(" ")))
}
