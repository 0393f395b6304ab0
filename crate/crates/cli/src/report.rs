//! Comparison table: one row per scheme with vocabulary size, BLEU and
//! confidence half-width for up to two systems, and the paired p-value.
//!
//! Values are rounded once (BLEU and CI to two decimals on the ×100 scale,
//! p-values to three) and both renderings print the rounded values, so
//! the structured form re-parses to exactly what the table shows.

use serde::{Deserialize, Serialize};

use segsel_core::bleu::{bootstrap_halfwidth, paired_test, BootstrapConfig, Scored};

use crate::Result;

pub type Tokens = Vec<String>;

/// Inputs for one table row.
pub struct RowInput<'a> {
    pub label: String,
    pub vocab: Option<usize>,
    pub hyp_a: &'a [Tokens],
    pub hyp_b: Option<&'a [Tokens]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scheme: String,
    pub vocab: Option<usize>,
    pub bleu_a: f64,
    pub ci_a: Option<f64>,
    pub bleu_b: Option<f64>,
    pub ci_b: Option<f64>,
    pub p_value: Option<f64>,
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

fn bleu100(x: f64) -> f64 {
    round_to(x * 100.0, 2)
}

/// Scores each row. `bootstrap` enables CI columns; the p-value column is
/// filled whenever a row has two systems (using `pvalue_cfg`).
pub fn report_table(
    rows: &[RowInput<'_>],
    refs: &[Vec<Tokens>],
    bootstrap: Option<&BootstrapConfig>,
    pvalue_cfg: &BootstrapConfig,
) -> Result<Vec<ReportRow>> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let a = Scored::new(row.hyp_a, refs)?;
        let b = row.hyp_b.map(|h| Scored::new(h, refs)).transpose()?;
        let ci = |s: &Scored| bootstrap.map(|cfg| bleu100(bootstrap_halfwidth(s, cfg)));
        out.push(ReportRow {
            scheme: row.label.clone(),
            vocab: row.vocab,
            bleu_a: bleu100(a.bleu()),
            ci_a: ci(&a),
            bleu_b: b.as_ref().map(|b| bleu100(b.bleu())),
            ci_b: b.as_ref().and_then(ci),
            p_value: b
                .as_ref()
                .map(|b| round_to(paired_test(&a, b, pvalue_cfg).p_value, 3)),
        });
    }
    Ok(out)
}

pub const COLUMNS: [&str; 7] = ["Scheme", "#Vocab", "BLEU A", "CI A", "BLEU B", "CI B", "p-value"];

const DASH: &str = "-";

impl ReportRow {
    /// Rendered cells in column order.
    pub fn cells(&self) -> [String; 7] {
        let bleu = |x: f64| format!("{x:.2}");
        let ci = |x: Option<f64>| x.map_or(DASH.to_string(), |v| format!("±{v:.2}"));
        [
            self.scheme.clone(),
            self.vocab.map_or(DASH.to_string(), |v| v.to_string()),
            bleu(self.bleu_a),
            ci(self.ci_a),
            self.bleu_b.map_or(DASH.to_string(), bleu),
            ci(self.ci_b),
            self.p_value.map_or(DASH.to_string(), |p| format!("{p:.3}")),
        ]
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("row serializes")
    }
}

/// Markdown-style table with aligned columns.
pub fn render_table(rows: &[ReportRow]) -> String {
    let body: Vec<[String; 7]> = rows.iter().map(ReportRow::cells).collect();
    let mut widths: Vec<usize> = COLUMNS.iter().map(|c| c.chars().count()).collect();
    for cells in &body {
        for (w, c) in widths.iter_mut().zip(cells) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(&COLUMNS.map(String::from));
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for cells in &body {
        out.push_str(&line(cells));
    }
    out
}

/// Line-delimited JSON, one record per row.
pub fn render_jsonl(rows: &[ReportRow]) -> String {
    rows.iter().map(|r| format!("{}\n", r.to_json_line())).collect()
}

/// Splits a rendered table back into body cells (header and rule skipped).
pub fn parse_table(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(2)
        .map(|l| {
            l.trim()
                .trim_start_matches('|')
                .trim_end_matches('|')
                .split('|')
                .map(|c| c.trim().to_string())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Tokens {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn data() -> (Vec<Tokens>, Vec<Tokens>, Vec<Vec<Tokens>>) {
        let refs: Vec<Vec<Tokens>> = (0..12)
            .map(|i| vec![toks(&format!("the report {i} was issued on monday"))])
            .collect();
        let a: Vec<Tokens> = (0..12)
            .map(|i| toks(&format!("the report {i} was issued monday")))
            .collect();
        let b: Vec<Tokens> = (0..12).map(|i| toks(&format!("report {} issued", i % 3))).collect();
        (a, b, refs)
    }

    #[test]
    fn identical_systems_p_one() {
        let (a, _, refs) = data();
        let rows = report_table(
            &[RowInput {
                label: "ATB".into(),
                vocab: Some(10),
                hyp_a: &a,
                hyp_b: Some(&a),
            }],
            &refs,
            Some(&BootstrapConfig::new(200, 1)),
            &BootstrapConfig::new(200, 1),
        )
        .unwrap();
        assert_eq!(rows[0].p_value, Some(1.0));
        assert_eq!(rows[0].cells()[6], "1.000");
    }

    #[test]
    fn single_system_without_ci_dashes() {
        let (a, _, refs) = data();
        let rows = report_table(
            &[RowInput {
                label: "Raw".into(),
                vocab: None,
                hyp_a: &a,
                hyp_b: None,
            }],
            &refs,
            None,
            &BootstrapConfig::new(100, 1),
        )
        .unwrap();
        let cells = rows[0].cells();
        assert_eq!(&cells[3..], &["-", "-", "-", "-"].map(String::from));
    }

    #[test]
    fn structured_matches_printed() {
        let (a, b, refs) = data();
        let rows = report_table(
            &[RowInput {
                label: "D3+BPE".into(),
                vocab: Some(20000),
                hyp_a: &a,
                hyp_b: Some(&b),
            }],
            &refs,
            Some(&BootstrapConfig::new(100, 4)),
            &BootstrapConfig::new(100, 4),
        )
        .unwrap();
        let printed = parse_table(&render_table(&rows));
        let reparsed: Vec<ReportRow> = render_jsonl(&rows)
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(reparsed, rows);
        assert_eq!(printed[0], reparsed[0].cells().to_vec());
    }
}
