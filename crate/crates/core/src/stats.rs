//! Corpus profiles: per-domain counts, sentence lengths, POS distribution,
//! and vocabulary comparison between two corpora.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::conllu::{Corpus, Sentence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("document {doc} (sentence {sentence}) has no domain")]
    Unmapped { doc: String, sentence: String },
    #[error("corpus has no sentences")]
    EmptyCorpus,
    #[error("domain manifest line {0}: expected 'newdoc_id<TAB>domain'")]
    Manifest(usize),
}

/// How documents are assigned to domains.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum DomainMap {
    /// The part of `newdoc id` before the first `_` or `-`.
    #[default]
    Prefix,
    /// Explicit `newdoc_id -> domain` table.
    Manifest(HashMap<String, String>),
}

impl DomainMap {
    /// Reads tab-separated `newdoc_id domain` lines.
    pub fn parse_manifest(text: &str) -> Result<Self, StatsError> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split_once('\t') {
                Some((doc, domain)) if !doc.is_empty() && !domain.trim().is_empty() => {
                    map.insert(doc.to_string(), domain.trim().to_string());
                }
                _ => return Err(StatsError::Manifest(i + 1)),
            }
        }
        Ok(DomainMap::Manifest(map))
    }

    pub fn domain_of(&self, doc: &str) -> Option<String> {
        match self {
            DomainMap::Prefix => {
                let prefix = doc.split(['_', '-']).next().unwrap_or("");
                (!prefix.is_empty()).then(|| prefix.to_string())
            }
            DomainMap::Manifest(m) => m.get(doc).cloned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DomainStats {
    pub domain: String,
    pub documents: usize,
    /// Word rows; MWT range lines and empty nodes are not counted.
    pub tokens: usize,
    pub sentences: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    /// Sorted by domain name.
    pub domains: Vec<DomainStats>,
    pub total: DomainStats,
}

pub fn corpus_stats(corpus: &Corpus, map: &DomainMap) -> Result<CorpusStats, StatsError> {
    let mut by_domain: BTreeMap<String, DomainStats> = BTreeMap::new();
    let mut total = DomainStats {
        domain: "total".into(),
        ..DomainStats::default()
    };
    for doc in corpus.documents() {
        let unmapped = || StatsError::Unmapped {
            doc: doc.id.clone().unwrap_or_else(|| "(none)".into()),
            sentence: corpus.sentence_label(doc.sentences.start),
        };
        let domain = doc.id.as_deref().and_then(|id| map.domain_of(id)).ok_or_else(unmapped)?;
        let tokens: usize = corpus.sentences[doc.sentences.clone()].iter().map(Sentence::len).sum();
        let entry = by_domain.entry(domain.clone()).or_insert_with(|| DomainStats {
            domain,
            ..DomainStats::default()
        });
        for s in [&mut *entry, &mut total] {
            s.documents += 1;
            s.tokens += tokens;
            s.sentences += doc.sentences.len();
        }
    }
    Ok(CorpusStats {
        domains: by_domain.into_values().collect(),
        total,
    })
}

/// What a sentence length counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthUnit {
    /// Syntactic words.
    #[default]
    Words,
    /// Surface tokens (an MWT counts once).
    Tokens,
}

pub fn sentence_length(s: &Sentence, unit: LengthUnit) -> usize {
    match unit {
        LengthUnit::Words => s.len(),
        LengthUnit::Tokens => s.len() - s.mwt_spans.iter().map(|m| m.end - m.start).sum::<usize>(),
    }
}

/// Mean and sample standard deviation (n - 1) of sentence lengths in words.
/// A single sentence has deviation 0.
pub fn length_stats(corpus: &Corpus) -> Result<(f64, f64), StatsError> {
    length_stats_by(corpus, LengthUnit::Words)
}

pub fn length_stats_by(corpus: &Corpus, unit: LengthUnit) -> Result<(f64, f64), StatsError> {
    let lengths: Vec<f64> = corpus
        .sentences
        .iter()
        .map(|s| sentence_length(s, unit) as f64)
        .collect();
    let n = lengths.len();
    if n == 0 {
        return Err(StatsError::EmptyCorpus);
    }
    let mean = lengths.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok((mean, 0.0));
    }
    let var = lengths.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, var.sqrt()))
}

pub fn pos_distribution(corpus: &Corpus) -> BTreeMap<String, usize> {
    corpus
        .sentences
        .par_iter()
        .fold(BTreeMap::new, |mut m: BTreeMap<String, usize>, s| {
            for w in &s.words {
                *m.entry(w.upos.clone()).or_default() += 1;
            }
            m
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Key {
    #[default]
    Form,
    Lemma,
}

pub fn frequencies(corpus: &Corpus, key: Key) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for w in corpus.sentences.iter().flat_map(|s| &s.words) {
        let k = match key {
            Key::Form => &w.form,
            Key::Lemma => &w.lemma,
        };
        *m.entry(k.clone()).or_default() += 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioEntry {
    pub item: String,
    pub count_a: usize,
    pub count_b: usize,
    /// `count_b / count_a`; 0 when absent from B, infinite when absent from A.
    pub ratio: f64,
}

impl RatioEntry {
    pub fn ratio_text(&self) -> String {
        if self.ratio.is_infinite() {
            "inf".into()
        } else {
            format!("{:.2}", self.ratio)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ratio = if self.ratio.is_infinite() {
            serde_json::Value::from("inf")
        } else {
            serde_json::Value::from(self.ratio)
        };
        serde_json::json!({"item": self.item, "count_a": self.count_a, "count_b": self.count_b, "ratio": ratio})
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioLists {
    /// Ascending ratio: items over-represented in A first.
    pub a_over: Vec<RatioEntry>,
    /// Descending ratio: items over-represented in B first.
    pub b_over: Vec<RatioEntry>,
}

/// Per-item frequency ratio between two corpora. Equal ratios (notably 0
/// and infinity) are ordered by combined frequency, most frequent first,
/// then by item.
pub fn freq_ratio(a: &Corpus, b: &Corpus, key: Key) -> RatioLists {
    let (fa, fb) = (frequencies(a, key), frequencies(b, key));
    let items: BTreeSet<&String> = fa.keys().chain(fb.keys()).collect();
    let entries: Vec<RatioEntry> = items
        .into_iter()
        .map(|item| {
            let (ca, cb) = (fa.get(item).copied().unwrap_or(0), fb.get(item).copied().unwrap_or(0));
            RatioEntry {
                item: item.clone(),
                count_a: ca,
                count_b: cb,
                ratio: if ca == 0 { f64::INFINITY } else { cb as f64 / ca as f64 },
            }
        })
        .collect();
    let tie = |x: &RatioEntry, y: &RatioEntry| {
        (y.count_a + y.count_b)
            .cmp(&(x.count_a + x.count_b))
            .then_with(|| x.item.cmp(&y.item))
    };
    let mut a_over = entries.clone();
    a_over.sort_by(|x, y| x.ratio.partial_cmp(&y.ratio).unwrap_or(Ordering::Equal).then_with(|| tie(x, y)));
    let mut b_over = entries;
    b_over.sort_by(|x, y| y.ratio.partial_cmp(&x.ratio).unwrap_or(Ordering::Equal).then_with(|| tie(x, y)));
    RatioLists { a_over, b_over }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Overlap {
    pub a: usize,
    pub b: usize,
    pub a_only: usize,
    pub b_only: usize,
    pub both: usize,
}

/// Type-level vocabulary sizes and their intersection and differences.
pub fn vocab_overlap(a: &Corpus, b: &Corpus, key: Key) -> Overlap {
    let (fa, fb) = (frequencies(a, key), frequencies(b, key));
    let both = fa.keys().filter(|k| fb.contains_key(*k)).count();
    Overlap {
        a: fa.len(),
        b: fb.len(),
        a_only: fa.len() - both,
        b_only: fb.len() - both,
        both,
    }
}

pub fn render_domains(stats: &CorpusStats) -> String {
    let mut out = format!("{:<12} {:>9} {:>10} {:>10}\n", "Domain", "Documents", "Tokens", "Sentences");
    for d in stats.domains.iter().chain([&stats.total]) {
        let _ = writeln!(out, "{:<12} {:>9} {:>10} {:>10}", d.domain, d.documents, d.tokens, d.sentences);
    }
    out
}

pub fn render_ratios(lists: &RatioLists, top: usize, label_a: &str, label_b: &str) -> String {
    let mut out = String::new();
    for (title, list) in [
        (format!("over-represented in {label_a}"), &lists.a_over),
        (format!("over-represented in {label_b}"), &lists.b_over),
    ] {
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "{:<24} {:>8} {:>8} {:>8}", "item", label_a, label_b, "ratio");
        for e in list.iter().take(top) {
            let _ = writeln!(out, "{:<24} {:>8} {:>8} {:>8}", e.item, e.count_a, e.count_b, e.ratio_text());
        }
    }
    out
}
