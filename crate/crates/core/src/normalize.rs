//! Orthographic normalization applied before every tokenization scheme.
//!
//! Hamzated Alif variants become bare Alif, Alif Maqsura becomes Ya and the
//! short-vowel / gemination diacritics (plus superscript Alif) are dropped.
//! Canonical composition is applied to runs of Arabic-block codepoints
//! first, so a decomposed `ا` + `ٔ` is handled the same way as `أ`.
//! Codepoints outside the Arabic block are never touched.

use std::fmt;

use unicode_normalization::UnicodeNormalization;

const ALIF: char = '\u{0627}';
const YA: char = '\u{064A}';
const ALIF_HAMZA_ABOVE: char = '\u{0623}';
const ALIF_HAMZA_BELOW: char = '\u{0625}';
const ALIF_MADDA: char = '\u{0622}';
const ALIF_MAQSURA: char = '\u{0649}';
const SUPERSCRIPT_ALIF: char = '\u{0670}';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NormalizeOptions {
    /// Leave Alif Madda (U+0622) as is instead of mapping it to bare Alif.
    pub keep_madda: bool,
}

/// A sentence that has been through [`normalize_text`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalizedText(String);

impl NormalizedText {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Wraps text that is already known to be normalized, e.g. the output
    /// of [`crate::detokenize`].
    pub(crate) fn from_normalized(content: String) -> Self {
        NormalizedText(content)
    }
}

impl fmt::Display for NormalizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NormalizedText {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Diacritics removed by normalization: tanwin, short vowels, shadda,
/// sukun and superscript Alif.
pub fn is_diacritic(c: char) -> bool {
    matches!(c, '\u{064B}'..='\u{0652}') || c == SUPERSCRIPT_ALIF
}

fn is_arabic_block(c: char) -> bool {
    matches!(c, '\u{0600}'..='\u{06FF}')
}

fn map_run(run: &str, opts: NormalizeOptions, out: &mut String) {
    for c in run.chars() {
        match c {
            ALIF_HAMZA_ABOVE | ALIF_HAMZA_BELOW => out.push(ALIF),
            ALIF_MADDA if !opts.keep_madda => out.push(ALIF),
            ALIF_MAQSURA => out.push(YA),
            c if is_diacritic(c) => {}
            c => out.push(c),
        }
    }
}

fn normalize_run(run: &str, opts: NormalizeOptions, out: &mut String) {
    let mut current: String = run.nfc().collect();
    loop {
        let mut mapped = String::with_capacity(current.len());
        map_run(&current, opts, &mut mapped);
        // Removing a mark can bring a bare Alif next to a hamza or madda
        // that composes again, so iterate until composition is stable.
        let recomposed: String = mapped.nfc().collect();
        if recomposed == mapped {
            out.push_str(&mapped);
            return;
        }
        current = recomposed;
    }
}

/// Normalizes Alif, Ya and diacritics. Total on valid Unicode.
pub fn normalize_text(text: &str, opts: NormalizeOptions) -> NormalizedText {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while !rest.is_empty() {
        let arabic = rest.starts_with(is_arabic_block);
        let split = rest
            .char_indices()
            .find(|&(_, c)| is_arabic_block(c) != arabic)
            .map_or(rest.len(), |(i, _)| i);
        let (run, tail) = rest.split_at(split);
        if arabic {
            normalize_run(run, opts, &mut out);
        } else {
            out.push_str(run);
        }
        rest = tail;
    }
    NormalizedText(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(s: &str) -> String {
        normalize_text(s, NormalizeOptions::default()).into_string()
    }

    #[test]
    fn hamzated_alif_loses_hamza() {
        assert_eq!(norm("أ"), "ا");
        assert_eq!(norm("إ"), "ا");
        assert_eq!(norm("آ"), "ا");
    }

    #[test]
    fn keep_madda_flag() {
        let opts = NormalizeOptions { keep_madda: true };
        assert_eq!(normalize_text("آخر", opts).as_str(), "آخر");
        assert_eq!(normalize_text("أخر", opts).as_str(), "اخر");
    }

    #[test]
    fn alif_maqsura_becomes_ya() {
        assert_eq!(norm("مستشفى"), "مستشفي");
    }

    #[test]
    fn diacritics_removed() {
        assert_eq!(norm("كَتَبَ"), "كتب");
        assert_eq!(norm("هٰذا"), "هذا");
    }

    #[test]
    fn non_arabic_identity() {
        assert_eq!(norm("The cat sat."), "The cat sat.");
        assert_eq!(norm(""), "");
    }

    #[test]
    fn hamza_seats_untouched() {
        assert_eq!(norm("سؤال مسائل ء"), "سؤال مسائل ء");
        // ta marbuta and tatweel
        assert_eq!(norm("مدرسة ـ"), "مدرسة ـ");
    }

    #[test]
    fn decomposed_hamza_is_composed_first() {
        assert_eq!(norm("\u{0627}\u{0654}"), "ا");
        assert_eq!(norm("\u{0627}\u{0655}"), "ا");
        assert_eq!(norm("\u{0627}\u{0653}"), "ا");
        assert_eq!(norm("\u{0627}\u{064E}\u{0654}"), "ا");
        // Hamza on Waw stays composed, not mapped.
        assert_eq!(norm("\u{0648}\u{0654}"), "\u{0624}");
    }

    #[test]
    fn recomposition_after_mapping_reaches_fixpoint() {
        // أ followed by a madda sign: mapping أ exposes ا + ٓ which composes to آ.
        let once = norm("\u{0623}\u{0653}");
        assert_eq!(once, "ا");
        assert_eq!(norm(&once), once);
    }

    #[test]
    fn combining_marks_outside_block_pass_through() {
        let s = "\u{0627}\u{0301}\u{0654}";
        assert_eq!(norm(s), "\u{0627}\u{0301}\u{0654}");
        assert_eq!(norm(&norm(s)), norm(s));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arabic_heavy() -> impl Strategy<Value = String> {
            let ch = prop_oneof![
                4 => (0x0600u32..=0x06FF).prop_map(|c| char::from_u32(c).unwrap()),
                1 => any::<char>(),
                1 => Just(' '),
            ];
            proptest::collection::vec(ch, 0..24).prop_map(|v| v.into_iter().collect())
        }

        proptest! {
            #[test]
            fn idempotent(s in arabic_heavy()) {
                let once = norm(&s);
                prop_assert_eq!(norm(&once), once);
            }

            #[test]
            fn never_longer(s in arabic_heavy()) {
                prop_assert!(norm(&s).chars().count() <= s.chars().count());
            }

            #[test]
            fn no_forbidden_codepoints(s in arabic_heavy()) {
                let out = norm(&s);
                let forbidden = |c: char| matches!(c, ALIF_MADDA | ALIF_HAMZA_ABOVE | ALIF_HAMZA_BELOW | ALIF_MAQSURA) || is_diacritic(c);
                prop_assert!(!out.chars().any(forbidden), "forbidden codepoint in {:?}", out);
            }

            #[test]
            fn non_arabic_preserved(s in any::<String>()) {
                let kept: String = s.chars().filter(|&c| !is_arabic_block(c)).collect();
                let out: String = norm(&s).chars().filter(|&c| !is_arabic_block(c)).collect();
                prop_assert_eq!(out, kept);
            }
        }
    }
}
