//! CoNLL 2018 shared-task evaluation of system output against gold trees
//! whose tokenization may differ.
//!
//! Words are placed on character spans of the whitespace-free sentence text
//! and aligned when their spans coincide. Sentences are paired by position.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conllu::{sentence_label, Corpus, Sentence, Word};

const CONLL18: &str = include_str!("../data/conll18.toml");

/// Relation classes and the feature subset used by CLAS, MLAS, BLEX and UFeats.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ScoreConfig {
    pub content_deprels: BTreeSet<String>,
    pub functional_deprels: BTreeSet<String>,
    pub universal_features: BTreeSet<String>,
}

impl ScoreConfig {
    pub fn conll18() -> Self {
        Self::from_toml(CONLL18).expect("built-in scorer table is well formed")
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self::conll18()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Metric {
    Tokens,
    Sentences,
    Words,
    #[serde(rename = "MWT")]
    Mwt,
    #[serde(rename = "UPOS")]
    Upos,
    #[serde(rename = "XPOS")]
    Xpos,
    UFeats,
    AllTags,
    Lemmas,
    #[serde(rename = "UAS")]
    Uas,
    #[serde(rename = "LAS")]
    Las,
    #[serde(rename = "CLAS")]
    Clas,
    #[serde(rename = "MLAS")]
    Mlas,
    #[serde(rename = "BLEX")]
    Blex,
}

impl Metric {
    pub const ALL: [Metric; 14] = [
        Metric::Tokens,
        Metric::Sentences,
        Metric::Words,
        Metric::Mwt,
        Metric::Upos,
        Metric::Xpos,
        Metric::UFeats,
        Metric::AllTags,
        Metric::Lemmas,
        Metric::Uas,
        Metric::Las,
        Metric::Clas,
        Metric::Mlas,
        Metric::Blex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Tokens => "Tokens",
            Metric::Sentences => "Sentences",
            Metric::Words => "Words",
            Metric::Mwt => "MWT",
            Metric::Upos => "UPOS",
            Metric::Xpos => "XPOS",
            Metric::UFeats => "UFeats",
            Metric::AllTags => "AllTags",
            Metric::Lemmas => "Lemmas",
            Metric::Uas => "UAS",
            Metric::Las => "LAS",
            Metric::Clas => "CLAS",
            Metric::Mlas => "MLAS",
            Metric::Blex => "BLEX",
        }
    }

    /// Span metrics have no aligned accuracy.
    pub fn has_aligned_accuracy(self) -> bool {
        !matches!(self, Metric::Tokens | Metric::Sentences | Metric::Words | Metric::Mwt)
    }

    fn index(self) -> usize {
        Metric::ALL.iter().position(|m| *m == self).expect("listed")
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub gold: usize,
    pub system: usize,
    pub correct: usize,
    pub aligned: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.gold += o.gold;
        self.system += o.system;
        self.correct += o.correct;
        self.aligned += o.aligned;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricScore {
    pub metric: Metric,
    #[serde(flatten)]
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub aligned_accuracy: Option<f64>,
}

impl MetricScore {
    /// Percentages. A metric with nothing to find on either side scores 100.
    pub fn from_counts(metric: Metric, c: Counts) -> Self {
        let empty = c.gold == 0 && c.system == 0;
        let ratio = |num: usize, den: usize| {
            if den > 0 {
                100.0 * num as f64 / den as f64
            } else if empty {
                100.0
            } else {
                0.0
            }
        };
        MetricScore {
            metric,
            counts: c,
            precision: ratio(c.correct, c.system),
            recall: ratio(c.correct, c.gold),
            f1: ratio(2 * c.correct, c.gold + c.system),
            aligned_accuracy: metric.has_aligned_accuracy().then(|| ratio(c.correct, c.aligned)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub scores: Vec<MetricScore>,
}

impl ScoreReport {
    pub fn get(&self, metric: Metric) -> &MetricScore {
        &self.scores[metric.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("gold has {gold} sentences, system has {system}")]
    SentenceCount { gold: usize, system: usize },
    #[error("sentence {sentence}: character sequences differ at position {position}: gold '{gold}' vs system '{system}'")]
    TextMismatch {
        sentence: String,
        position: usize,
        gold: String,
        system: String,
    },
}

/// Character layout of one sentence: whitespace-free text, token spans and
/// word spans (half-open, in characters).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub chars: Vec<char>,
    pub tokens: Vec<(usize, usize)>,
    pub words: Vec<(usize, usize)>,
    /// Token spans of MWTs with their lowercased word forms.
    pub mwts: Vec<((usize, usize), Vec<String>)>,
}

fn strip_ws(s: &str) -> Vec<char> {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Splits `surface` among `forms`. Exact concatenations split by length;
/// otherwise each form takes the surface characters it shares with it in a
/// longest common subsequence, extended to a contiguous partition.
pub fn partition_surface(surface: &[char], forms: &[Vec<char>]) -> Vec<(usize, usize)> {
    let concat: Vec<char> = forms.iter().flatten().copied().collect();
    let mut out = Vec::with_capacity(forms.len());
    if concat == surface {
        let mut pos = 0;
        for f in forms {
            out.push((pos, pos + f.len()));
            pos += f.len();
        }
        return out;
    }
    let lower = |c: char| c.to_lowercase().next().unwrap_or(c);
    let (n, m) = (concat.len(), surface.len());
    let mut dp = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if lower(concat[i]) == lower(surface[j]) {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    // matched[i] = surface position paired with concat char i.
    let mut matched = vec![None; n];
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if lower(concat[i]) == lower(surface[j]) && dp[i][j] == dp[i + 1][j + 1] + 1 {
            matched[i] = Some(j);
            i += 1;
            j += 1;
        } else if dp[i + 1][j] >= dp[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    let mut start = 0;
    let mut offset = 0;
    for (k, f) in forms.iter().enumerate() {
        let mut end = start;
        for m_pos in matched[offset..offset + f.len()].iter().flatten() {
            end = end.max(m_pos + 1);
        }
        if k + 1 == forms.len() {
            end = m;
        }
        out.push((start, end));
        start = end;
        offset += f.len();
    }
    out
}

pub fn layout(s: &Sentence) -> Layout {
    let mut out = Layout {
        chars: Vec::new(),
        tokens: Vec::new(),
        words: Vec::with_capacity(s.words.len()),
        mwts: Vec::new(),
    };
    let mut id = 1;
    while id <= s.words.len() {
        let base = out.chars.len();
        if let Some(m) = s.mwt_spans.iter().find(|m| m.start == id) {
            let surface = strip_ws(&m.surface_form);
            let words: Vec<&Word> = m.word_ids().filter_map(|i| s.word(i)).collect();
            let forms: Vec<Vec<char>> = words.iter().map(|w| strip_ws(&w.form)).collect();
            for (a, b) in partition_surface(&surface, &forms) {
                out.words.push((base + a, base + b));
            }
            let span = (base, base + surface.len());
            out.tokens.push(span);
            out.mwts.push((span, words.iter().map(|w| w.form.to_lowercase()).collect()));
            out.chars.extend(surface);
            id = m.end.max(id) + 1;
        } else {
            let form = strip_ws(&s.words[id - 1].form);
            let span = (base, base + form.len());
            out.tokens.push(span);
            out.words.push(span);
            out.chars.extend(form);
            id += 1;
        }
    }
    out
}

/// Counts of identical spans between two sorted span lists.
fn span_counts(gold: &[(usize, usize)], system: &[(usize, usize)]) -> Counts {
    // Spans are sorted, so a two-pointer walk finds the identical ones.
    let (mut i, mut j, mut correct) = (0, 0, 0);
    while i < gold.len() && j < system.len() {
        if system[j].0 < gold[i].0 {
            j += 1;
        } else if gold[i].0 < system[j].0 {
            i += 1;
        } else {
            correct += usize::from(gold[i].1 == system[j].1);
            i += 1;
            j += 1;
        }
    }
    Counts {
        gold: gold.len(),
        system: system.len(),
        correct,
        aligned: 0,
    }
}

/// Largest order-preserving set of index pairs with identical spans.
pub fn align_spans(gold: &[(usize, usize)], system: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let (n, m) = (gold.len(), system.len());
    let mut dp = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if gold[i] == system[j] {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    let mut pairs = Vec::with_capacity(dp[0][0] as usize);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if gold[i] == system[j] && dp[i][j] == dp[i + 1][j + 1] + 1 {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if dp[i + 1][j] >= dp[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    pairs
}

/// Aligned word pairs as 0-based word indices (gold, system).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
    pub gold_spans: Vec<(usize, usize)>,
    pub system_spans: Vec<(usize, usize)>,
}

fn check_text(g: &Layout, s: &Layout, label: impl FnOnce() -> String) -> Result<(), ScoreError> {
    if g.chars == s.chars {
        return Ok(());
    }
    let position = g.chars.iter().zip(&s.chars).take_while(|(a, b)| a == b).count();
    let excerpt = |c: &[char]| c.iter().skip(position).take(20).collect::<String>();
    Err(ScoreError::TextMismatch {
        sentence: label(),
        position,
        gold: excerpt(&g.chars),
        system: excerpt(&s.chars),
    })
}

pub fn align(gold: &Sentence, system: &Sentence) -> Result<Alignment, ScoreError> {
    let (g, s) = (layout(gold), layout(system));
    check_text(&g, &s, || sentence_label(gold, 0))?;
    Ok(Alignment {
        pairs: align_spans(&g.words, &s.words),
        gold_spans: g.words,
        system_spans: s.words,
    })
}

/// Head of a word as seen from the gold side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HeadKey {
    Root,
    Gold(usize),
    NotAligned,
}

struct Prepared<'a> {
    word: &'a Word,
    xpos: &'a str,
    feats: String,
    deprel: &'a str,
    content: bool,
    functional_children: Vec<usize>,
}

fn prepare<'a>(s: &'a Sentence, cfg: &ScoreConfig) -> Vec<Prepared<'a>> {
    let mut out: Vec<Prepared> = s
        .words
        .iter()
        .map(|w| {
            let mut feats: Vec<String> = w
                .feats
                .iter()
                .filter(|(k, _)| cfg.universal_features.contains(*k))
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            feats.sort();
            let deprel = w.base_deprel();
            Prepared {
                word: w,
                xpos: if w.xpos.is_empty() { "_" } else { &w.xpos },
                feats: feats.join("|"),
                deprel,
                content: cfg.content_deprels.contains(deprel),
                functional_children: Vec::new(),
            }
        })
        .collect();
    for i in 0..out.len() {
        let head = out[i].word.head;
        if head > 0 && head <= out.len() && cfg.functional_deprels.contains(out[i].deprel) {
            out[head - 1].functional_children.push(i);
        }
    }
    out
}

fn sentence_counts(gold: &Sentence, system: &Sentence, cfg: &ScoreConfig, label: impl FnOnce() -> String) -> Result<[Counts; 14], ScoreError> {
    let (gl, sl) = (layout(gold), layout(system));
    check_text(&gl, &sl, label)?;
    let pairs = align_spans(&gl.words, &sl.words);
    let (gp, sp) = (prepare(gold, cfg), prepare(system, cfg));

    let mut sys_to_gold = vec![None; sp.len()];
    for &(g, s) in &pairs {
        sys_to_gold[s] = Some(g);
    }
    let gold_head = |i: usize| match gp[i].word.head {
        0 => HeadKey::Root,
        h => HeadKey::Gold(h - 1),
    };
    let sys_ref = |i: usize| sys_to_gold[i].map_or(HeadKey::NotAligned, HeadKey::Gold);
    let sys_head = |i: usize| match sp[i].word.head {
        0 => HeadKey::Root,
        h if h <= sp.len() => sys_ref(h - 1),
        _ => HeadKey::NotAligned,
    };

    let mut c = [Counts::default(); 14];
    c[Metric::Tokens.index()] = span_counts(&gl.tokens, &sl.tokens);
    c[Metric::Sentences.index()] = Counts {
        gold: 1,
        system: 1,
        correct: 1,
        aligned: 0,
    };
    c[Metric::Words.index()] = Counts {
        gold: gp.len(),
        system: sp.len(),
        correct: pairs.len(),
        aligned: 0,
    };
    c[Metric::Mwt.index()] = Counts {
        gold: gl.mwts.len(),
        system: sl.mwts.len(),
        correct: gl.mwts.iter().filter(|m| sl.mwts.contains(m)).count(),
        aligned: 0,
    };

    let content_gold = gp.iter().filter(|w| w.content).count();
    let content_sys = sp.iter().filter(|w| w.content).count();
    for m in Metric::ALL.iter().filter(|m| m.has_aligned_accuracy()) {
        let restricted = matches!(m, Metric::Clas | Metric::Mlas | Metric::Blex);
        c[m.index()] = if restricted {
            Counts {
                gold: content_gold,
                system: content_sys,
                ..Counts::default()
            }
        } else {
            Counts {
                gold: gp.len(),
                system: sp.len(),
                ..Counts::default()
            }
        };
    }

    for &(gi, si) in &pairs {
        let (g, s) = (&gp[gi], &sp[si]);
        let upos = g.word.upos == s.word.upos;
        let xpos = g.xpos == s.xpos;
        let feats = g.feats == s.feats;
        let lemma = g.word.lemma == "_" || g.word.lemma == s.word.lemma;
        let uas = gold_head(gi) == sys_head(si);
        let las = uas && g.deprel == s.deprel;
        let children = || {
            let gk = g
                .functional_children
                .iter()
                .map(|&c| (HeadKey::Gold(c), gp[c].deprel, gp[c].word.upos.as_str(), gp[c].feats.as_str()));
            let sk = s
                .functional_children
                .iter()
                .map(|&c| (sys_ref(c), sp[c].deprel, sp[c].word.upos.as_str(), sp[c].feats.as_str()));
            gk.eq(sk)
        };
        let mut hit = |m: Metric, ok: bool| {
            let e = &mut c[m.index()];
            e.aligned += 1;
            e.correct += usize::from(ok);
        };
        hit(Metric::Upos, upos);
        hit(Metric::Xpos, xpos);
        hit(Metric::UFeats, feats);
        hit(Metric::AllTags, upos && xpos && feats);
        hit(Metric::Lemmas, lemma);
        hit(Metric::Uas, uas);
        hit(Metric::Las, las);
        if g.content {
            hit(Metric::Clas, las);
            hit(Metric::Mlas, las && upos && feats && children());
            hit(Metric::Blex, las && lemma);
        }
    }
    Ok(c)
}

pub fn score(gold: &Corpus, system: &Corpus, cfg: &ScoreConfig) -> Result<ScoreReport, ScoreError> {
    if gold.sentences.len() != system.sentences.len() {
        return Err(ScoreError::SentenceCount {
            gold: gold.sentences.len(),
            system: system.sentences.len(),
        });
    }
    let per_sentence: Vec<Result<[Counts; 14], ScoreError>> = gold
        .sentences
        .par_iter()
        .zip(system.sentences.par_iter())
        .enumerate()
        .map(|(i, (g, s))| sentence_counts(g, s, cfg, || sentence_label(g, i)))
        .collect();
    let mut totals = [Counts::default(); 14];
    for counts in per_sentence {
        for (t, c) in totals.iter_mut().zip(counts?) {
            *t += c;
        }
    }
    Ok(ScoreReport {
        scores: Metric::ALL
            .iter()
            .zip(totals)
            .map(|(&m, c)| MetricScore::from_counts(m, c))
            .collect(),
    })
}

pub fn render_table(report: &ScoreReport) -> String {
    let mut out = String::from("Metric     | Precision |    Recall |  F1 Score | AligndAcc\n");
    out.push_str("-----------+-----------+-----------+-----------+-----------\n");
    for s in &report.scores {
        let acc = s.aligned_accuracy.map(|a| format!("{a:10.2}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{:11}|{:10.2} |{:10.2} |{:10.2} |{}",
            s.metric.name(),
            s.precision,
            s.recall,
            s.f1,
            acc
        );
    }
    out
}

pub fn render_tsv(report: &ScoreReport) -> String {
    let mut out = String::from("metric\tprecision\trecall\tf1\taligned_accuracy\tgold\tsystem\tcorrect\taligned\n");
    for s in &report.scores {
        let acc = s.aligned_accuracy.map(|a| format!("{a:.2}")).unwrap_or_else(|| "_".into());
        let aligned = if s.metric.has_aligned_accuracy() {
            s.counts.aligned.to_string()
        } else {
            "_".into()
        };
        let _ = writeln!(
            out,
            "{}\t{:.2}\t{:.2}\t{:.2}\t{}\t{}\t{}\t{}\t{}",
            s.metric.name(),
            s.precision,
            s.recall,
            s.f1,
            acc,
            s.counts.gold,
            s.counts.system,
            s.counts.correct,
            aligned
        );
    }
    out
}

/// One JSON object per metric, one per line.
pub fn render_json(report: &ScoreReport) -> String {
    report
        .scores
        .iter()
        .map(|s| format!("{}\n", serde_json::to_string(s).expect("scores serialize")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::parse_str;

    fn corpus(text: &str) -> Corpus {
        parse_str(text).unwrap()
    }

    const THREE: &str = "1\tא\tא\tNOUN\t_\tNumber=Sing\t2\tnsubj\t_\t_\n2\tב\tב\tVERB\t_\t_\t0\troot\t_\t_\n3\tג\tג\tNOUN\t_\t_\t2\tobj\t_\t_\n\n";

    #[test]
    fn identity_is_perfect() {
        let c = corpus(THREE);
        let r = score(&c, &c, &ScoreConfig::default()).unwrap();
        for s in &r.scores {
            assert_eq!(s.f1, 100.0, "{}", s.metric);
            assert_eq!(s.precision, 100.0);
            assert_eq!(s.recall, 100.0);
            if let Some(a) = s.aligned_accuracy {
                assert_eq!(a, 100.0);
            }
        }
        // No MWTs on either side still reads as 100.
        assert_eq!(r.get(Metric::Mwt).counts.gold, 0);
    }

    #[test]
    fn one_head_error_in_three() {
        let gold = corpus(THREE);
        let sys = corpus(&THREE.replace("3\tג\tג\tNOUN\t_\t_\t2\tobj", "3\tג\tג\tNOUN\t_\t_\t1\tobj"));
        let r = score(&gold, &sys, &ScoreConfig::default()).unwrap();
        assert_eq!(format!("{:.2}", r.get(Metric::Uas).f1), "66.67");
        assert_eq!(format!("{:.2}", r.get(Metric::Las).f1), "66.67");
        assert_eq!(format!("{:.2}", r.get(Metric::Uas).aligned_accuracy.unwrap()), "66.67");
        assert_eq!(r.get(Metric::Upos).f1, 100.0);
    }

    #[test]
    fn unsplit_mwt_aligns_nothing() {
        let gold = corpus("1-2\tבבית\t_\t_\t_\t_\t_\t_\t_\t_\n1\tב\tב\tADP\t_\t_\t2\tcase\t_\t_\n2\tבית\tבית\tNOUN\t_\t_\t0\troot\t_\t_\n\n");
        let sys = corpus("1\tבבית\tבבית\tNOUN\t_\t_\t0\troot\t_\t_\n\n");
        let a = align(&gold.sentences[0], &sys.sentences[0]).unwrap();
        assert_eq!(a.gold_spans, [(0, 1), (1, 4)]);
        assert_eq!(a.system_spans, [(0, 4)]);
        assert!(a.pairs.is_empty());
        let r = score(&gold, &sys, &ScoreConfig::default()).unwrap();
        assert_eq!(format!("{:.2}", r.get(Metric::Words).f1), "0.00");
        assert_eq!(r.get(Metric::Tokens).f1, 100.0);
        assert_eq!(r.get(Metric::Mwt).f1, 0.0);
    }

    #[test]
    fn text_mismatch_is_an_error() {
        let a = corpus("1\tab\t_\t_\t_\t_\t0\troot\t_\t_\n\n");
        let b = corpus("1\tac\t_\t_\t_\t_\t0\troot\t_\t_\n\n");
        assert!(matches!(
            score(&a, &b, &ScoreConfig::default()),
            Err(ScoreError::TextMismatch { position: 1, .. })
        ));
        let two = corpus("1\tab\t_\t_\t_\t_\t0\troot\t_\t_\n\n1\tab\t_\t_\t_\t_\t0\troot\t_\t_\n\n");
        assert_eq!(
            score(&a, &two, &ScoreConfig::default()),
            Err(ScoreError::SentenceCount { gold: 1, system: 2 })
        );
    }

    #[test]
    fn legacy_pseudo_tokens_partition() {
        let chars: Vec<char> = "ביתו".chars().collect();
        let forms: Vec<Vec<char>> = ["בית", "_של_", "הוא"].iter().map(|f| f.chars().collect()).collect();
        assert_eq!(partition_surface(&chars, &forms), [(0, 3), (3, 3), (3, 4)]);
        let forms: Vec<Vec<char>> = ["בית", "ו"].iter().map(|f| f.chars().collect()).collect();
        assert_eq!(partition_surface(&chars, &forms), [(0, 3), (3, 4)]);
    }

    #[test]
    fn subtypes_and_language_features_ignored() {
        let gold = corpus(THREE);
        let sys = corpus(
            &THREE
                .replace("\tnsubj\t", "\tnsubj:pass\t")
                .replace("Number=Sing", "Number=Sing|HebSource=x"),
        );
        let r = score(&gold, &sys, &ScoreConfig::default()).unwrap();
        assert_eq!(r.get(Metric::Las).f1, 100.0);
        assert_eq!(r.get(Metric::UFeats).f1, 100.0);
    }

    #[test]
    fn mlas_sees_functional_children() {
        let gold = corpus("1\tב\tב\tADP\t_\t_\t2\tcase\t_\t_\n2\tבית\tבית\tNOUN\t_\t_\t0\troot\t_\t_\n\n");
        let sys = corpus("1\tב\tב\tADP\t_\tDefinite=Def\t2\tcase\t_\t_\n2\tבית\tבית\tNOUN\t_\t_\t0\troot\t_\t_\n\n");
        let r = score(&gold, &sys, &ScoreConfig::default()).unwrap();
        // Only the root is content; its case child differs in FEATS.
        assert_eq!(r.get(Metric::Clas).counts.gold, 1);
        assert_eq!(r.get(Metric::Clas).f1, 100.0);
        assert_eq!(r.get(Metric::Mlas).f1, 0.0);
        assert_eq!(r.get(Metric::Las).f1, 100.0);
    }

    #[test]
    fn table_layout() {
        let c = corpus(THREE);
        let t = render_table(&score(&c, &c, &ScoreConfig::default()).unwrap());
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 16);
        assert_eq!(lines[2], "Tokens     |    100.00 |    100.00 |    100.00 |");
        assert_eq!(lines[5], "MWT        |    100.00 |    100.00 |    100.00 |");
        assert_eq!(lines[15], "BLEX       |    100.00 |    100.00 |    100.00 |    100.00");
        let json = render_json(&score(&c, &c, &ScoreConfig::default()).unwrap());
        let first: serde_json::Value = serde_json::from_str(json.lines().next().unwrap()).unwrap();
        assert_eq!(first["metric"], "Tokens");
        assert!(first["aligned_accuracy"].is_null());
    }
}
