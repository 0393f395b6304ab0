//! Byte-pair encoding over scheme-tokenized text.
//!
//! Words are exploded into characters with the end-of-word marker attached
//! to the final character, so `low` starts as `l o w⟨eow⟩`. Learning merges
//! the most frequent adjacent pair (ties go to the lexicographically
//! smallest `(left, right)`) until the symbol budget is spent or no pair
//! occurs at least twice. Applying a model replays its merges in learned
//! order; every non-final unit of a word gets the join marker.
//!
//! Clitic `+` markers are ordinary characters here.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::cmp::Reverse;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const DEFAULT_EOW: char = '\u{E000}';
pub const DEFAULT_JOIN_MARKER: &str = "@@";
pub const DEFAULT_TARGET_VOCAB: usize = 20_000;
pub const MIN_PAIR_FREQUENCY: u64 = 2;

const FORMAT_VERSION: u32 = 1;

/// A BPE symbol. `last` marks a symbol carrying the end-of-word marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub text: String,
    pub last: bool,
}

impl Symbol {
    pub fn new(text: impl Into<String>, last: bool) -> Self {
        Symbol {
            text: text.into(),
            last,
        }
    }

    fn merged(left: &Symbol, right: &Symbol) -> Symbol {
        Symbol {
            text: format!("{}{}", left.text, right.text),
            last: right.last,
        }
    }

    /// Serialized form; also the tie-break key during learning.
    pub fn render(&self, eow: char) -> String {
        let mut s = self.text.clone();
        if self.last {
            s.push(eow);
        }
        s
    }

    fn is_char(&self) -> bool {
        self.text.chars().count() == 1
    }
}

/// Word explosion: characters with the marker attached to the last one.
pub fn initial_symbols(word: &str) -> Vec<Symbol> {
    let count = word.chars().count();
    word.chars()
        .enumerate()
        .map(|(i, c)| Symbol::new(c, i + 1 == count))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeConfig {
    pub target_vocab: usize,
    pub eow: char,
    pub join_marker: String,
}

impl Default for BpeConfig {
    fn default() -> Self {
        BpeConfig {
            target_vocab: DEFAULT_TARGET_VOCAB,
            eow: DEFAULT_EOW,
            join_marker: DEFAULT_JOIN_MARKER.to_string(),
        }
    }
}

impl BpeConfig {
    pub fn with_target_vocab(target_vocab: usize) -> Self {
        BpeConfig {
            target_vocab,
            ..Default::default()
        }
    }
}

/// Learned merge list. Immutable once built.
#[derive(Debug, Clone)]
pub struct BpeModel {
    merges: Vec<(Symbol, Symbol)>,
    eow: char,
    join_marker: String,
    target_vocab: usize,
    ranks: HashMap<(Symbol, Symbol), usize>,
}

impl PartialEq for BpeModel {
    fn eq(&self, other: &Self) -> bool {
        self.merges == other.merges
            && self.eow == other.eow
            && self.join_marker == other.join_marker
            && self.target_vocab == other.target_vocab
    }
}

impl Eq for BpeModel {}

fn check_markers(eow: char, join_marker: &str) -> Result<()> {
    if eow.is_whitespace() {
        return Err(Error::Config("end-of-word marker must not be whitespace".into()));
    }
    // A single-character join marker cannot be told apart from a token that
    // ends in that character.
    if join_marker.chars().count() < 2 || join_marker.contains(char::is_whitespace) {
        return Err(Error::Config(format!(
            "join marker {join_marker:?} must be at least two non-space characters"
        )));
    }
    if join_marker.contains(eow) {
        return Err(Error::Config("join marker must not contain the end-of-word marker".into()));
    }
    Ok(())
}

impl BpeModel {
    /// Builds a model from an explicit merge list, checking that merges are
    /// unique and that each merge only uses characters or symbols created
    /// by an earlier merge.
    pub fn new(
        merges: Vec<(Symbol, Symbol)>,
        eow: char,
        join_marker: impl Into<String>,
        target_vocab: usize,
    ) -> Result<Self> {
        let join_marker = join_marker.into();
        check_markers(eow, &join_marker)?;
        let mut created: HashSet<Symbol> = HashSet::new();
        let mut ranks = HashMap::with_capacity(merges.len());
        for (rank, (left, right)) in merges.iter().enumerate() {
            for sym in [left, right] {
                if sym.text.is_empty() {
                    return Err(Error::Config(format!("merge {rank} has an empty symbol")));
                }
                if !sym.is_char() && !created.contains(sym) {
                    return Err(Error::Config(format!(
                        "merge {rank} uses symbol {:?} before it is created",
                        sym.render(eow)
                    )));
                }
            }
            if left.last {
                return Err(Error::Config(format!(
                    "merge {rank} has an end-of-word symbol on the left"
                )));
            }
            if creates_ambiguous_final(left, right, &join_marker) {
                return Err(Error::Config(format!(
                    "merge {rank} creates a word-final unit ending in the join marker"
                )));
            }
            if ranks.insert((left.clone(), right.clone()), rank).is_some() {
                return Err(Error::Config(format!("merge {rank} is a duplicate")));
            }
            created.insert(Symbol::merged(left, right));
        }
        Ok(BpeModel {
            merges,
            eow,
            join_marker,
            target_vocab,
            ranks,
        })
    }

    pub fn merges(&self) -> &[(Symbol, Symbol)] {
        &self.merges
    }

    pub fn eow(&self) -> char {
        self.eow
    }

    pub fn join_marker(&self) -> &str {
        &self.join_marker
    }

    pub fn target_vocab(&self) -> usize {
        self.target_vocab
    }

    /// Segments one word into symbols by replaying merges in learned order.
    ///
    /// Equivalent to walking the whole merge list once, but only visits
    /// merges whose pair is present: the next merge applied is always the
    /// lowest-ranked present pair above the last applied rank.
    pub fn segment(&self, word: &str) -> Vec<Symbol> {
        let mut symbols = initial_symbols(word);
        let mut floor = 0usize;
        loop {
            let next = symbols
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0].clone(), w[1].clone())).copied())
                .filter(|&r| r >= floor)
                .min();
            let Some(rank) = next else { break };
            let (left, right) = &self.merges[rank];
            symbols = merge_pair(&symbols, left, right);
            floor = rank + 1;
        }
        symbols
    }

    fn encode_word(&self, word: &str, out: &mut Vec<String>) {
        let symbols = self.segment(word);
        let n = symbols.len();
        for (i, sym) in symbols.into_iter().enumerate() {
            if i + 1 < n {
                out.push(format!("{}{}", sym.text, self.join_marker));
            } else {
                out.push(sym.text);
            }
        }
    }

    /// Content hash identifying this model (first 16 hex digits of the
    /// SHA-256 of its saved form).
    pub fn model_id(&self) -> String {
        let digest = Sha256::digest(self.save().as_bytes());
        hex::encode(&digest[..8])
    }

    /// Serializes to the plain-text merge-list format: four `#` header
    /// lines, then one `left right` pair per line.
    pub fn save(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#segsel-bpe version {FORMAT_VERSION}");
        let _ = writeln!(out, "#eow {}", self.eow);
        let _ = writeln!(out, "#join {}", self.join_marker);
        let _ = writeln!(out, "#target_vocab {}", self.target_vocab);
        for (l, r) in &self.merges {
            let _ = writeln!(out, "{} {}", l.render(self.eow), r.render(self.eow));
        }
        out
    }

    pub fn load(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |key: &str| -> Result<String> {
            let (line, raw) = lines.next().ok_or(Error::Parse {
                line: 0,
                message: format!("missing #{key} header"),
            })?;
            let prefix = format!("#{key} ");
            raw.strip_prefix(&prefix)
                .map(str::to_string)
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("expected header {prefix:?}"),
                })
        };
        let version = header("segsel-bpe")?;
        if version != format!("version {FORMAT_VERSION}") {
            return Err(Error::Parse {
                line: 1,
                message: format!("unsupported format {version:?}"),
            });
        }
        let eow_field = header("eow")?;
        let mut eow_chars = eow_field.chars();
        let eow = match (eow_chars.next(), eow_chars.next()) {
            (Some(c), None) => c,
            _ => {
                return Err(Error::Parse {
                    line: 2,
                    message: "end-of-word marker must be one character".into(),
                })
            }
        };
        let join_marker = header("join")?;
        let target_vocab = header("target_vocab")?.parse::<usize>().map_err(|e| Error::Parse {
            line: 4,
            message: format!("bad target_vocab: {e}"),
        })?;

        let parse_symbol = |s: &str, line: usize| -> Result<Symbol> {
            let (text, last) = match s.strip_suffix(eow) {
                Some(t) => (t, true),
                None => (s, false),
            };
            if text.is_empty() || text.contains(eow) {
                return Err(Error::Parse {
                    line,
                    message: format!("bad symbol {s:?}"),
                });
            }
            Ok(Symbol::new(text, last))
        };
        let mut merges = Vec::new();
        for (line, raw) in lines {
            let fields: Vec<&str> = raw.split(' ').collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected two space-separated symbols, got {}", fields.len()),
                });
            }
            merges.push((parse_symbol(fields[0], line)?, parse_symbol(fields[1], line)?));
        }
        BpeModel::new(merges, eow, join_marker, target_vocab).map_err(|e| match e {
            Error::Config(message) => Error::Parse { line: 0, message },
            other => other,
        })
    }
}

/// A word-final unit ending in the join marker would be read back as a
/// continuation, so such merges are never learned or accepted.
fn creates_ambiguous_final(left: &Symbol, right: &Symbol, join_marker: &str) -> bool {
    right.last && format!("{}{}", left.text, right.text).ends_with(join_marker)
}

fn merge_pair(symbols: &[Symbol], left: &Symbol, right: &Symbol) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == *left && symbols[i + 1] == *right {
            out.push(Symbol::merged(left, right));
            i += 2;
        } else {
            out.push(symbols[i].clone());
            i += 1;
        }
    }
    out
}

/// Output of [`bpe_apply`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordSequence {
    pub units: Vec<String>,
    pub model_id: String,
}

/// Number of distinct initial symbols (characters, with and without the
/// end-of-word marker) over a set of words.
pub fn alphabet_size<'a>(words: impl IntoIterator<Item = &'a str>) -> usize {
    words
        .into_iter()
        .flat_map(initial_symbols)
        .collect::<HashSet<_>>()
        .len()
}

struct Learner {
    words: Vec<(Vec<u32>, u64)>,
    symbols: Vec<Symbol>,
    keys: Vec<String>,
    ids: HashMap<Symbol, u32>,
    counts: HashMap<(u32, u32), u64>,
    queue: BTreeSet<(Reverse<u64>, String, String, u32, u32)>,
    index: HashMap<(u32, u32), HashSet<usize>>,
    eow: char,
    join_marker: String,
}

impl Learner {
    fn intern(&mut self, sym: Symbol) -> u32 {
        if let Some(&id) = self.ids.get(&sym) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.keys.push(sym.render(self.eow));
        self.symbols.push(sym.clone());
        self.ids.insert(sym, id);
        id
    }

    fn queue_key(&self, pair: (u32, u32), count: u64) -> (Reverse<u64>, String, String, u32, u32) {
        (
            Reverse(count),
            self.keys[pair.0 as usize].clone(),
            self.keys[pair.1 as usize].clone(),
            pair.0,
            pair.1,
        )
    }

    fn adjust(&mut self, pair: (u32, u32), delta: i64) {
        let old = self.counts.get(&pair).copied().unwrap_or(0);
        let new = (old as i64 + delta) as u64;
        let eligible = !creates_ambiguous_final(
            &self.symbols[pair.0 as usize],
            &self.symbols[pair.1 as usize],
            &self.join_marker,
        );
        if old > 0 && eligible {
            let key = self.queue_key(pair, old);
            self.queue.remove(&key);
        }
        if new > 0 {
            if eligible {
                let key = self.queue_key(pair, new);
                self.queue.insert(key);
            }
            self.counts.insert(pair, new);
        } else {
            self.counts.remove(&pair);
        }
    }

    fn add_word_pairs(&mut self, w: usize, sign: i64) {
        let (syms, count) = (&self.words[w].0, self.words[w].1);
        let pairs: Vec<(u32, u32)> = syms.windows(2).map(|p| (p[0], p[1])).collect();
        for pair in pairs {
            self.adjust(pair, sign * count as i64);
            if sign > 0 {
                self.index.entry(pair).or_default().insert(w);
            }
        }
    }
}

/// Learns a BPE model from a stream of tokens (words).
///
/// The merge budget is `target_vocab - alphabet_size`; learning stops early
/// once the most frequent pair occurs fewer than [`MIN_PAIR_FREQUENCY`]
/// times.
pub fn bpe_learn<'a>(tokens: impl IntoIterator<Item = &'a str>, config: &BpeConfig) -> Result<BpeModel> {
    check_markers(config.eow, &config.join_marker)?;
    let mut vocab: BTreeMap<&str, u64> = BTreeMap::new();
    for t in tokens {
        if t.is_empty() {
            continue;
        }
        if t.contains(config.eow) {
            return Err(Error::ReservedSymbol(config.eow));
        }
        *vocab.entry(t).or_default() += 1;
    }
    if vocab.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let alphabet = alphabet_size(vocab.keys().copied());
    if config.target_vocab <= alphabet {
        return Err(Error::VocabTooSmall {
            target: config.target_vocab,
            alphabet,
        });
    }
    let budget = config.target_vocab - alphabet;

    let mut learner = Learner {
        words: Vec::with_capacity(vocab.len()),
        symbols: Vec::new(),
        keys: Vec::new(),
        ids: HashMap::new(),
        counts: HashMap::new(),
        queue: BTreeSet::new(),
        index: HashMap::new(),
        eow: config.eow,
        join_marker: config.join_marker.clone(),
    };
    for (word, count) in &vocab {
        let ids = initial_symbols(word)
            .into_iter()
            .map(|s| learner.intern(s))
            .collect();
        learner.words.push((ids, *count));
    }
    for w in 0..learner.words.len() {
        learner.add_word_pairs(w, 1);
    }

    let mut merges = Vec::new();
    while merges.len() < budget {
        let Some((Reverse(count), _, _, left, right)) = learner.queue.first().cloned() else {
            break;
        };
        if count < MIN_PAIR_FREQUENCY {
            break;
        }
        let merged = Symbol::merged(&learner.symbols[left as usize], &learner.symbols[right as usize]);
        let new_id = learner.intern(merged);
        merges.push((
            learner.symbols[left as usize].clone(),
            learner.symbols[right as usize].clone(),
        ));

        let mut affected: Vec<usize> = learner
            .index
            .remove(&(left, right))
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        affected.sort_unstable();
        for w in affected {
            let syms = &learner.words[w].0;
            if !syms.windows(2).any(|p| p[0] == left && p[1] == right) {
                continue;
            }
            learner.add_word_pairs(w, -1);
            let syms = &learner.words[w].0;
            let mut next = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == left && syms[i + 1] == right {
                    next.push(new_id);
                    i += 2;
                } else {
                    next.push(syms[i]);
                    i += 1;
                }
            }
            learner.words[w].0 = next;
            learner.add_word_pairs(w, 1);
        }
    }

    BpeModel::new(merges, config.eow, config.join_marker.clone(), config.target_vocab)
}

/// Segments every token of a sequence into join-marked subword units.
pub fn bpe_apply<S: AsRef<str>>(model: &BpeModel, tokens: &[S]) -> SubwordSequence {
    let mut units = Vec::new();
    for t in tokens {
        let t = t.as_ref();
        if !t.is_empty() {
            model.encode_word(t, &mut units);
        }
    }
    SubwordSequence {
        units,
        model_id: model.model_id(),
    }
}

/// Applies a model to many sentences, encoding each distinct word once.
pub struct BpeEncoder<'m> {
    model: &'m BpeModel,
    cache: HashMap<String, Vec<String>>,
}

impl<'m> BpeEncoder<'m> {
    pub fn new(model: &'m BpeModel) -> Self {
        BpeEncoder {
            model,
            cache: HashMap::new(),
        }
    }

    pub fn encode<S: AsRef<str>>(&mut self, tokens: &[S]) -> Vec<String> {
        let mut units = Vec::new();
        for t in tokens {
            let t = t.as_ref();
            if t.is_empty() {
                continue;
            }
            if let Some(cached) = self.cache.get(t) {
                units.extend(cached.iter().cloned());
                continue;
            }
            let mut word_units = Vec::new();
            self.model.encode_word(t, &mut word_units);
            units.extend(word_units.iter().cloned());
            self.cache.insert(t.to_string(), word_units);
        }
        units
    }
}

/// Rejoins subword units into the tokens they came from.
pub fn bpe_undo<S: AsRef<str>>(units: &[S], join_marker: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let mut pending = String::new();
    for u in units {
        let u = u.as_ref();
        match u.strip_suffix(join_marker) {
            Some(body) => pending.push_str(body),
            None => {
                pending.push_str(u);
                tokens.push(std::mem::take(&mut pending));
            }
        }
    }
    if !pending.is_empty() || units.last().is_some_and(|u| u.as_ref().ends_with(join_marker)) {
        return Err(Error::MalformedMarkers(format!(
            "sequence ends with a {join_marker:?}-continued unit"
        )));
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s, false)
    }

    fn classic() -> Vec<&'static str> {
        let mut v = Vec::new();
        for (w, n) in [("low", 5), ("lower", 2), ("newest", 6), ("widest", 3)] {
            v.extend(std::iter::repeat_n(w, n));
        }
        v
    }

    #[test]
    fn classic_corpus_first_merge() {
        let model = bpe_learn(classic(), &BpeConfig::with_target_vocab(1000)).unwrap();
        assert_eq!(model.merges()[0], (sym("e"), sym("s")));
    }

    #[test]
    fn singleton_pair_not_merged() {
        let alphabet = alphabet_size(["ab"]);
        let model = bpe_learn(["ab"], &BpeConfig::with_target_vocab(alphabet + 1)).unwrap();
        assert!(model.merges().is_empty());
    }

    #[test]
    fn vocab_too_small() {
        let alphabet = alphabet_size(classic());
        let err = bpe_learn(classic(), &BpeConfig::with_target_vocab(alphabet)).unwrap_err();
        assert!(matches!(err, Error::VocabTooSmall { .. }));
    }

    #[test]
    fn empty_corpus() {
        let err = bpe_learn(std::iter::empty::<&str>(), &BpeConfig::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus));
    }

    #[test]
    fn reserved_symbol_rejected() {
        let word = format!("a{DEFAULT_EOW}b");
        let err = bpe_learn([word.as_str()], &BpeConfig::default()).unwrap_err();
        assert!(matches!(err, Error::ReservedSymbol(_)));
    }

    #[test]
    fn apply_hand_replay() {
        let model = BpeModel::new(
            vec![(sym("e"), sym("s")), (sym("es"), sym("t"))],
            DEFAULT_EOW,
            "@@",
            100,
        )
        .unwrap();
        assert_eq!(bpe_apply(&model, &["tests"]).units, vec!["t@@", "est@@", "s"]);
    }

    #[test]
    fn apply_without_merges_is_char_level() {
        let model = BpeModel::new(vec![], DEFAULT_EOW, "@@", 100).unwrap();
        assert_eq!(bpe_apply(&model, &["ab"]).units, vec!["a@@", "b"]);
    }

    #[test]
    fn full_word_merge_gives_single_unit() {
        let model = BpeModel::new(
            vec![(sym("a"), Symbol::new("b", true))],
            DEFAULT_EOW,
            "@@",
            100,
        )
        .unwrap();
        assert_eq!(bpe_apply(&model, &["ab"]).units, vec!["ab"]);
    }

    #[test]
    fn final_unit_never_ends_in_join_marker() {
        assert!(BpeModel::new(
            vec![(sym("@"), Symbol::new("@", true))],
            DEFAULT_EOW,
            "@@",
            100,
        )
        .is_err());
        let corpus = ["a@@"; 5];
        let model = bpe_learn(corpus, &BpeConfig::with_target_vocab(100)).unwrap();
        let units = bpe_apply(&model, &["a@@"]).units;
        assert!(!units.last().unwrap().ends_with("@@"));
        assert_eq!(bpe_undo(&units, "@@").unwrap(), vec!["a@@"]);
    }

    #[test]
    fn undo_examples() {
        assert_eq!(bpe_undo(&["t@@", "est@@", "s"], "@@").unwrap(), vec!["tests"]);
        assert_eq!(bpe_undo(&["hello"], "@@").unwrap(), vec!["hello"]);
        assert!(matches!(bpe_undo(&["a@@"], "@@"), Err(Error::MalformedMarkers(_))));
        assert!(bpe_undo::<&str>(&[], "@@").unwrap().is_empty());
    }

    #[test]
    fn model_validation() {
        // uses "es" before it exists
        assert!(BpeModel::new(vec![(sym("es"), sym("t"))], DEFAULT_EOW, "@@", 10).is_err());
        assert!(BpeModel::new(
            vec![(sym("e"), sym("s")), (sym("e"), sym("s"))],
            DEFAULT_EOW,
            "@@",
            10
        )
        .is_err());
        assert!(BpeModel::new(vec![(Symbol::new("e", true), sym("s"))], DEFAULT_EOW, "@@", 10).is_err());
        assert!(BpeModel::new(vec![], DEFAULT_EOW, "@", 10).is_err());
    }

    #[test]
    fn save_format() {
        let model = BpeModel::new(vec![(sym("e"), sym("s"))], DEFAULT_EOW, "@@", 500).unwrap();
        let text = model.save();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["e s"]);
        assert_eq!(BpeModel::load(&text).unwrap(), model);

        let empty = BpeModel::new(vec![], DEFAULT_EOW, "@@", 500).unwrap();
        assert!(empty.save().lines().all(|l| l.starts_with('#')));
        assert_eq!(empty.save().lines().count(), 4);
    }

    #[test]
    fn load_reports_line_numbers() {
        let empty = BpeModel::new(vec![], DEFAULT_EOW, "@@", 500).unwrap().save();
        let bad = format!("{empty}e s\ne\n");
        assert!(matches!(BpeModel::load(&bad), Err(Error::Parse { line: 6, .. })));
        assert!(matches!(BpeModel::load("#eow x\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn header_like_symbol_round_trips() {
        let model = BpeModel::new(vec![(sym("#"), sym("#"))], DEFAULT_EOW, "@@", 50).unwrap();
        assert_eq!(BpeModel::load(&model.save()).unwrap(), model);
    }

    #[test]
    fn learn_is_deterministic() {
        let a = bpe_learn(classic(), &BpeConfig::with_target_vocab(40)).unwrap();
        let b = bpe_learn(classic(), &BpeConfig::with_target_vocab(40)).unwrap();
        assert_eq!(a.save(), b.save());
        assert_eq!(a.model_id(), b.model_id());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn words() -> impl Strategy<Value = Vec<String>> {
            proptest::collection::vec("[abc@+]{1,6}", 1..40)
        }

        proptest! {
            #[test]
            fn undo_inverts_apply(corpus in words(), probe in proptest::collection::vec("[abcd@+]{1,8}", 0..10), extra in 1usize..30) {
                let alphabet = alphabet_size(corpus.iter().map(String::as_str));
                let model = bpe_learn(corpus.iter().map(String::as_str), &BpeConfig::with_target_vocab(alphabet + extra)).unwrap();
                let units = bpe_apply(&model, &probe).units;
                prop_assert_eq!(bpe_undo(&units, model.join_marker()).unwrap(), probe);
            }

            #[test]
            fn save_load_identity(corpus in words(), extra in 1usize..30) {
                let alphabet = alphabet_size(corpus.iter().map(String::as_str));
                let model = bpe_learn(corpus.iter().map(String::as_str), &BpeConfig::with_target_vocab(alphabet + extra)).unwrap();
                let text = model.save();
                let loaded = BpeModel::load(&text).unwrap();
                prop_assert_eq!(loaded.save(), text);
                prop_assert_eq!(loaded, model);
            }

            #[test]
            fn more_merges_never_more_units(corpus in words()) {
                let alphabet = alphabet_size(corpus.iter().map(String::as_str));
                let full = bpe_learn(corpus.iter().map(String::as_str), &BpeConfig::with_target_vocab(alphabet + 50)).unwrap();
                let mut previous = usize::MAX;
                for k in 0..=full.merges().len() {
                    let model = BpeModel::new(full.merges()[..k].to_vec(), DEFAULT_EOW, "@@", alphabet + 50).unwrap();
                    let units = bpe_apply(&model, &corpus).units.len();
                    prop_assert!(units <= previous);
                    previous = units;
                }
            }
        }
    }
}
