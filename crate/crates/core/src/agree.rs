//! Inter-annotator agreement: Cohen's kappa per annotation layer and per
//! feature over identically tokenized words, plus validator audits of the
//! disagreements.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::conllu::{sentence_label, Corpus, Sentence, Word};
use crate::score::{self, Metric, MetricScore, ScoreError};
use crate::validate::{validate_sentence, Ruleset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KappaError {
    #[error("label lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no items to compare")]
    Empty,
    #[error("expected agreement is 1 but the annotators disagree")]
    Degenerate,
}

/// Counts of (label A, label B) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Confusion<L: Eq + Hash> {
    cells: HashMap<(L, L), usize>,
    total: usize,
}

impl<L: Eq + Hash + Clone> Default for Confusion<L> {
    fn default() -> Self {
        Confusion {
            cells: HashMap::new(),
            total: 0,
        }
    }
}

impl<L: Eq + Hash + Clone> Confusion<L> {
    pub fn add(&mut self, a: L, b: L) {
        *self.cells.entry((a, b)).or_default() += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: Confusion<L>) {
        for (k, v) in other.cells {
            *self.cells.entry(k).or_default() += v;
        }
        self.total += other.total;
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn disagreements(&self) -> usize {
        self.cells.iter().filter(|((a, b), _)| a != b).map(|(_, n)| n).sum()
    }

    pub fn kappa(&self) -> Result<f64, KappaError> {
        if self.total == 0 {
            return Err(KappaError::Empty);
        }
        let n = self.total as f64;
        let mut row: HashMap<&L, usize> = HashMap::new();
        let mut col: HashMap<&L, usize> = HashMap::new();
        let mut agree = 0;
        for ((a, b), &c) in &self.cells {
            *row.entry(a).or_default() += c;
            *col.entry(b).or_default() += c;
            if a == b {
                agree += c;
            }
        }
        let p_o = agree as f64 / n;
        let p_e: f64 = row
            .iter()
            .map(|(l, &r)| r as f64 * col.get(l).copied().unwrap_or(0) as f64)
            .sum::<f64>()
            / (n * n);
        if agree == self.total && row.len() == 1 && col.len() == 1 {
            return Ok(1.0);
        }
        if (1.0 - p_e).abs() < 1e-12 {
            return Err(KappaError::Degenerate);
        }
        Ok((p_o - p_e) / (1.0 - p_e))
    }
}

/// Cohen's kappa of two label sequences over the same items.
pub fn cohen_kappa<L: Eq + Hash + Clone>(a: &[L], b: &[L]) -> Result<f64, KappaError> {
    if a.len() != b.len() {
        return Err(KappaError::LengthMismatch(a.len(), b.len()));
    }
    let mut c = Confusion::default();
    for (x, y) in a.iter().zip(b) {
        c.add(x.clone(), y.clone());
    }
    c.kappa()
}

/// Kappa from a square confusion matrix (rows: annotator A).
pub fn kappa_from_matrix(m: &[Vec<usize>]) -> Result<f64, KappaError> {
    let mut c = Confusion::default();
    for (i, row) in m.iter().enumerate() {
        for (j, &n) in row.iter().enumerate() {
            if n > 0 {
                c.cells.insert((i, j), n);
                c.total += n;
            }
        }
    }
    c.kappa()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Layer {
    Lemma,
    #[serde(rename = "UPOS")]
    Upos,
    #[serde(rename = "FEATS")]
    Feats,
    Head,
    Deprel,
    Misc,
}

impl Layer {
    pub const ALL: [Layer; 6] = [Layer::Lemma, Layer::Upos, Layer::Feats, Layer::Head, Layer::Deprel, Layer::Misc];

    pub fn name(self) -> &'static str {
        match self {
            Layer::Lemma => "Lemma",
            Layer::Upos => "UPOS",
            Layer::Feats => "FEATS",
            Layer::Head => "Head",
            Layer::Deprel => "Deprel",
            Layer::Misc => "Misc",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a per-label row comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    Feats,
    Misc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaRow {
    pub label: String,
    pub kappa: f64,
    pub disagreements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelRow {
    pub label: String,
    pub source: LabelSource,
    pub kappa: f64,
    pub disagreements: usize,
}

/// Per-layer and per-feature agreement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaTable {
    pub layers: Vec<KappaRow>,
    /// FEATS keys and MISC keys, sorted by label then source.
    pub labels: Vec<LabelRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub average_kappa: f64,
    pub average_disagreements: f64,
    pub total_disagreements: usize,
}

impl KappaTable {
    pub fn layer(&self, layer: Layer) -> &KappaRow {
        &self.layers[Layer::ALL.iter().position(|l| *l == layer).expect("listed")]
    }

    pub fn label(&self, label: &str, source: LabelSource) -> Option<&LabelRow> {
        self.labels.iter().find(|r| r.label == label && r.source == source)
    }

    /// Label rows with more than `min` disagreements.
    pub fn shown(&self, min: usize) -> Vec<&LabelRow> {
        self.labels.iter().filter(|r| r.disagreements > min).collect()
    }

    /// Average kappa, average and total disagreements over the label rows
    /// with more than `min` disagreements.
    pub fn summary(&self, min: usize) -> Summary {
        summarize(self.shown(min).iter().map(|r| (r.kappa, r.disagreements)))
    }
}

pub fn summarize(rows: impl IntoIterator<Item = (f64, usize)>) -> Summary {
    let rows: Vec<(f64, usize)> = rows.into_iter().collect();
    let n = rows.len();
    let total: usize = rows.iter().map(|r| r.1).sum();
    let (avg_k, avg_d) = if n == 0 {
        (0.0, 0.0)
    } else {
        (
            rows.iter().map(|r| r.0).sum::<f64>() / n as f64,
            total as f64 / n as f64,
        )
    };
    Summary {
        rows: n,
        average_kappa: avg_k,
        average_disagreements: avg_d,
        total_disagreements: total,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IaaReport {
    /// Words F1 of B against A, in percent.
    pub words_accuracy: f64,
    pub words: MetricScore,
    pub aligned_words: usize,
    pub kappa: KappaTable,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgreeError {
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("no identically tokenized words to compare")]
    NoAlignedWords,
}

const ABSENT: &str = "ABSENT";
const NOT_ALIGNED: &str = "NA";

/// An aligned word pair; `head_b` is B's head as an A-side position.
struct Pair<'a> {
    a: &'a Word,
    b: &'a Word,
    head_b: String,
}

fn layer_label(layer: Layer, w: &Word, head: &str) -> String {
    match layer {
        Layer::Lemma => w.lemma.clone(),
        Layer::Upos => w.upos.clone(),
        Layer::Feats => w.feats.to_string(),
        Layer::Head => head.to_string(),
        Layer::Deprel => w.deprel.clone(),
        Layer::Misc => w.misc.to_string(),
    }
}

fn aligned_pairs<'a>(a: &'a Sentence, b: &'a Sentence, index: usize) -> Result<Vec<Pair<'a>>, ScoreError> {
    let alignment = score::align(a, b).map_err(|e| match e {
        ScoreError::TextMismatch {
            position,
            gold,
            system,
            ..
        } => ScoreError::TextMismatch {
            sentence: sentence_label(a, index),
            position,
            gold,
            system,
        },
        other => other,
    })?;
    let mut b_to_a = vec![None; b.words.len()];
    for &(ia, ib) in &alignment.pairs {
        b_to_a[ib] = Some(ia);
    }
    Ok(alignment
        .pairs
        .iter()
        .map(|&(ia, ib)| {
            let wb = &b.words[ib];
            let head_b = match wb.head {
                0 => "0".to_string(),
                h => b_to_a
                    .get(h - 1)
                    .copied()
                    .flatten()
                    .map_or(NOT_ALIGNED.to_string(), |x| (x + 1).to_string()),
            };
            Pair {
                a: &a.words[ia],
                b: wb,
                head_b,
            }
        })
        .collect())
}

#[derive(Default)]
struct Tally {
    layers: Vec<Confusion<String>>,
    labels: BTreeMap<(String, LabelSource), Confusion<String>>,
    aligned: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            layers: vec![Confusion::default(); Layer::ALL.len()],
            ..Tally::default()
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (mine, theirs) in self.layers.iter_mut().zip(other.layers) {
            mine.merge(theirs);
        }
        for (k, v) in other.labels {
            self.labels.entry(k).or_default().merge(v);
        }
        self.aligned += other.aligned;
        self
    }
}

fn label_keys(w: &Word) -> impl Iterator<Item = (String, LabelSource)> + '_ {
    w.feats
        .keys()
        .map(|k| (k.to_string(), LabelSource::Feats))
        .chain(w.misc.iter().map(|(k, _)| (k.to_string(), LabelSource::Misc)))
}

fn label_value(w: &Word, key: &str, source: LabelSource) -> String {
    let v = match source {
        LabelSource::Feats => w.feats.get(key),
        LabelSource::Misc => w.misc.iter().find(|(k, _)| *k == key).map(|(_, v)| v.unwrap_or("")),
    };
    v.unwrap_or(ABSENT).to_string()
}

/// Agreement of annotation B with annotation A.
pub fn iaa(a: &Corpus, b: &Corpus) -> Result<IaaReport, AgreeError> {
    let words = *score::score(a, b, &score::ScoreConfig::default())?.get(Metric::Words);

    // Keys seen anywhere form the universe of per-label tables.
    let pairs: Vec<Vec<Pair>> = a
        .sentences
        .par_iter()
        .zip(b.sentences.par_iter())
        .enumerate()
        .map(|(i, (sa, sb))| aligned_pairs(sa, sb, i))
        .collect::<Result<_, _>>()?;
    let keys: BTreeSet<(String, LabelSource)> = pairs
        .iter()
        .flatten()
        .flat_map(|p| label_keys(p.a).chain(label_keys(p.b)))
        .collect();

    let tally = pairs
        .par_iter()
        .map(|sentence| {
            let mut t = Tally::new();
            for p in sentence {
                t.aligned += 1;
                let head_a = p.a.head.to_string();
                for (i, layer) in Layer::ALL.iter().enumerate() {
                    t.layers[i].add(layer_label(*layer, p.a, &head_a), layer_label(*layer, p.b, &p.head_b));
                }
                for (key, source) in &keys {
                    t.labels
                        .entry((key.clone(), *source))
                        .or_default()
                        .add(label_value(p.a, key, *source), label_value(p.b, key, *source));
                }
            }
            t
        })
        .reduce(Tally::new, Tally::merge);

    if tally.aligned == 0 {
        return Err(AgreeError::NoAlignedWords);
    }
    let kappa_of = |c: &Confusion<String>| c.kappa().expect("non-empty; degenerate tables agree fully");
    let layers = Layer::ALL
        .iter()
        .zip(&tally.layers)
        .map(|(l, c)| KappaRow {
            label: l.name().to_string(),
            kappa: kappa_of(c),
            disagreements: c.disagreements(),
        })
        .collect();
    let labels = tally
        .labels
        .iter()
        .map(|((label, source), c)| LabelRow {
            label: label.clone(),
            source: *source,
            kappa: kappa_of(c),
            disagreements: c.disagreements(),
        })
        .collect();
    Ok(IaaReport {
        words_accuracy: words.f1,
        words,
        aligned_words: tally.aligned,
        kappa: KappaTable { layers, labels },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    /// Aligned words with a disagreement in any layer.
    pub disagreements: usize,
    /// Those where either annotation has a finding binding the word.
    pub flagged: usize,
    /// Per-label (FEATS/MISC key) disagreements, and how many were flagged.
    pub label_disagreements: usize,
    pub label_flagged: usize,
    /// Flagged disagreement words per rule name.
    pub per_rule: BTreeMap<String, usize>,
}

impl AuditReport {
    pub fn fraction(&self) -> f64 {
        if self.disagreements == 0 {
            0.0
        } else {
            self.flagged as f64 / self.disagreements as f64
        }
    }
}

/// Which disagreements a ruleset would have caught on either side.
pub fn audit_disagreements(a: &Corpus, b: &Corpus, ruleset: &Ruleset) -> Result<AuditReport, AgreeError> {
    if a.sentences.len() != b.sentences.len() {
        return Err(ScoreError::SentenceCount {
            gold: a.sentences.len(),
            system: b.sentences.len(),
        }
        .into());
    }
    let parts: Vec<AuditReport> = a
        .sentences
        .par_iter()
        .zip(b.sentences.par_iter())
        .enumerate()
        .map(|(i, (sa, sb))| audit_sentence(sa, sb, i, ruleset))
        .collect::<Result<_, _>>()?;
    let mut out = AuditReport {
        disagreements: 0,
        flagged: 0,
        label_disagreements: 0,
        label_flagged: 0,
        per_rule: BTreeMap::new(),
    };
    for p in parts {
        out.disagreements += p.disagreements;
        out.flagged += p.flagged;
        out.label_disagreements += p.label_disagreements;
        out.label_flagged += p.label_flagged;
        for (rule, n) in p.per_rule {
            *out.per_rule.entry(rule).or_default() += n;
        }
    }
    Ok(out)
}

fn audit_sentence(sa: &Sentence, sb: &Sentence, index: usize, ruleset: &Ruleset) -> Result<AuditReport, ScoreError> {
    let pairs = aligned_pairs(sa, sb, index)?;
    let rules_binding = |id: usize, findings: &[crate::validate::Finding]| -> BTreeSet<String> {
        findings
            .iter()
            .filter(|f| f.bindings.ids().any(|x| x == id))
            .map(|f| f.rule.clone())
            .collect()
    };
    let fa = validate_sentence(sa, &sentence_label(sa, index), ruleset);
    let fb = validate_sentence(sb, &sentence_label(sb, index), ruleset);
    let mut out = AuditReport {
        disagreements: 0,
        flagged: 0,
        label_disagreements: 0,
        label_flagged: 0,
        per_rule: BTreeMap::new(),
    };
    for p in &pairs {
        let head_a = p.a.head.to_string();
        let differs = Layer::ALL
            .iter()
            .any(|&l| layer_label(l, p.a, &head_a) != layer_label(l, p.b, &p.head_b));
        if !differs {
            continue;
        }
        let keys: BTreeSet<(String, LabelSource)> = label_keys(p.a).chain(label_keys(p.b)).collect();
        let label_diffs = keys
            .iter()
            .filter(|(k, s)| label_value(p.a, k, *s) != label_value(p.b, k, *s))
            .count();
        let mut rules = rules_binding(p.a.id, &fa);
        rules.extend(rules_binding(p.b.id, &fb));
        out.disagreements += 1;
        out.label_disagreements += label_diffs;
        if !rules.is_empty() {
            out.flagged += 1;
            out.label_flagged += label_diffs;
        }
        for r in rules {
            *out.per_rule.entry(r).or_default() += 1;
        }
    }
    Ok(out)
}

/// Layer table, per-label table (rows with more than `min` disagreements,
/// then average and total), and the audit when given.
pub fn render_human(report: &IaaReport, min: usize, audit: Option<&AuditReport>) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>8}", "Words");
    for l in Layer::ALL {
        let _ = write!(out, " {:>8}", l.name());
    }
    out.push('\n');
    let _ = write!(out, "{:>7.1}%", report.words_accuracy);
    for row in &report.kappa.layers {
        let _ = write!(out, " {:>8.1}", 100.0 * row.kappa);
    }
    out.push('\n');
    let _ = writeln!(out, "aligned words: {}", report.aligned_words);
    let _ = write!(out, "disagreements:");
    for r in &report.kappa.layers {
        let _ = write!(out, " {}={}", r.label, r.disagreements);
    }
    out.push('\n');
    out.push('\n');
    let _ = writeln!(out, "{:<16} | {:>6} | {:>13}", "Label", "Kappa", "Disagreements");
    for r in report.kappa.shown(min) {
        let _ = writeln!(out, "{:<16} | {:>6.3} | {:>13}", r.label, r.kappa, r.disagreements);
    }
    let s = report.kappa.summary(min);
    let _ = writeln!(out, "{:<16} | {:>6.3} | {:>13.2}", "average", s.average_kappa, s.average_disagreements);
    let _ = writeln!(out, "{:<16} | {:>6} | {:>13}", "total", "", s.total_disagreements);
    if let Some(a) = audit {
        out.push('\n');
        let _ = writeln!(out, "{:<28} | {:>11}", "Rule name", "Differences");
        let mut rules: Vec<(&String, &usize)> = a.per_rule.iter().collect();
        rules.sort_by(|x, y| y.1.cmp(x.1).then(x.0.cmp(y.0)));
        for (rule, n) in rules {
            let _ = writeln!(out, "{rule:<28} | {n:>11}");
        }
        let _ = writeln!(
            out,
            "flagged {} of {} disagreeing words ({:.1}%); {} of {} label disagreements",
            a.flagged,
            a.disagreements,
            100.0 * a.fraction(),
            a.label_flagged,
            a.label_disagreements
        );
    }
    out
}

pub fn render_tsv(report: &IaaReport, min: usize, audit: Option<&AuditReport>) -> String {
    let mut out = String::from("section\tlabel\tkappa\tdisagreements\n");
    let _ = writeln!(out, "words\tWords\t{:.4}\t_", report.words_accuracy / 100.0);
    for r in &report.kappa.layers {
        let _ = writeln!(out, "layer\t{}\t{:.4}\t{}", r.label, r.kappa, r.disagreements);
    }
    for r in report.kappa.shown(min) {
        let _ = writeln!(out, "label\t{}\t{:.4}\t{}", r.label, r.kappa, r.disagreements);
    }
    let s = report.kappa.summary(min);
    let _ = writeln!(out, "summary\taverage\t{:.4}\t{:.2}", s.average_kappa, s.average_disagreements);
    let _ = writeln!(out, "summary\ttotal\t_\t{}", s.total_disagreements);
    if let Some(a) = audit {
        for (rule, n) in &a.per_rule {
            let _ = writeln!(out, "rule\t{rule}\t_\t{n}");
        }
        let _ = writeln!(out, "audit\tflagged\t{:.4}\t{}", a.fraction(), a.flagged);
    }
    out
}

/// One JSON record per line, each tagged with its `kind`.
pub fn render_json(report: &IaaReport, min: usize, audit: Option<&AuditReport>) -> String {
    let mut lines = vec![serde_json::json!({
        "kind": "words",
        "accuracy": report.words_accuracy,
        "aligned_words": report.aligned_words,
    })];
    for r in &report.kappa.layers {
        lines.push(serde_json::json!({"kind": "layer", "label": r.label, "kappa": r.kappa, "disagreements": r.disagreements}));
    }
    for r in report.kappa.shown(min) {
        lines.push(serde_json::json!({"kind": "label", "label": r.label, "source": r.source, "kappa": r.kappa, "disagreements": r.disagreements}));
    }
    let s = report.kappa.summary(min);
    lines.push(serde_json::json!({"kind": "summary", "rows": s.rows, "average_kappa": s.average_kappa, "average_disagreements": s.average_disagreements, "total_disagreements": s.total_disagreements}));
    if let Some(a) = audit {
        for (rule, n) in &a.per_rule {
            lines.push(serde_json::json!({"kind": "rule", "rule": rule, "differences": n}));
        }
        lines.push(serde_json::json!({
            "kind": "audit",
            "disagreements": a.disagreements,
            "flagged": a.flagged,
            "fraction": a.fraction(),
            "label_disagreements": a.label_disagreements,
            "label_flagged": a.label_flagged,
        }));
    }
    lines.iter().map(|l| format!("{l}\n")).collect()
}
