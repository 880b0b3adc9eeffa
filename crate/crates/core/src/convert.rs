//! Conversion between the legacy multiword-token scheme (underscore-marked
//! pseudo-tokens `_של_`, `_את_`, `_ה_`, independent pronoun forms) and the
//! concatenative scheme, where every MWT surface is the concatenation of its
//! words. Also BIES segmentation tags.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::conllu::{check_concatenative, sentence_label, ConcatViolation, Corpus, Feats, Sentence, Word};

const BUILTIN_LEXICON: &str = include_str!("../data/clitics.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliticEntry {
    pub clitic: String,
    pub independent: String,
    pub person: Option<String>,
    pub gender: Option<String>,
    pub number: Option<String>,
}

impl CliticEntry {
    fn fits(&self, feats: &Feats) -> bool {
        feats.get("Person") == self.person.as_deref()
            && feats.get("Gender") == self.gender.as_deref()
            && feats.get("Number") == self.number.as_deref()
    }
}

/// Clitic surface form plus Person/Gender/Number to independent pronoun.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliticLexicon {
    entries: Vec<CliticEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lexicon line {line}: {message}")]
pub struct LexiconError {
    pub line: usize,
    pub message: String,
}

impl CliticLexicon {
    /// Tab-separated `clitic independent Person Gender Number`; `_` marks an
    /// absent feature, `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut entries: Vec<CliticEntry> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| LexiconError { line: i + 1, message: m };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 5 {
                return Err(err(format!("expected 5 columns, found {}", cols.len())));
            }
            let opt = |s: &str| (s != "_").then(|| s.to_string());
            let entry = CliticEntry {
                clitic: cols[0].to_string(),
                independent: cols[1].to_string(),
                person: opt(cols[2]),
                gender: opt(cols[3]),
                number: opt(cols[4]),
            };
            if entry.clitic.is_empty() || entry.independent.is_empty() {
                return Err(err("empty form".into()));
            }
            if let Some(prev) = entries.iter().find(|e| {
                e.clitic == entry.clitic && e.person == entry.person && e.gender == entry.gender && e.number == entry.number
            }) {
                if prev.independent != entry.independent {
                    return Err(err(format!(
                        "clitic '{}' maps to both '{}' and '{}' for one feature bundle",
                        entry.clitic, prev.independent, entry.independent
                    )));
                }
                continue;
            }
            entries.push(entry);
        }
        Ok(CliticLexicon { entries })
    }

    /// The shipped Hebrew pronominal paradigm.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_LEXICON).expect("built-in clitic lexicon is well formed")
    }

    pub fn entries(&self) -> &[CliticEntry] {
        &self.entries
    }

    /// Independent pronoun for a clitic form with the given features.
    pub fn independent(&self, clitic: &str, feats: &Feats) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.clitic == clitic && e.fits(feats))
            .map(|e| e.independent.as_str())
    }
}

impl Default for CliticLexicon {
    fn default() -> Self {
        Self::builtin()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvertOptions {
    pub lexicon: CliticLexicon,
    /// Lemmas whose `mark` relation is `mark:q` in the legacy scheme.
    pub question_lemmas: BTreeSet<String>,
}

impl Default for ConvertOptions {
    fn default() -> Self {
        ConvertOptions {
            lexicon: CliticLexicon::builtin(),
            question_lemmas: ["האם".to_string()].into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PseudoKind {
    /// `_של_`, possessive.
    Shel,
    /// `_את_`, accusative.
    Et,
    /// `_ה_`, article fused into a preposition.
    Ha,
}

impl PseudoKind {
    pub fn lemma(self) -> &'static str {
        match self {
            PseudoKind::Shel => "של",
            PseudoKind::Et => "את",
            PseudoKind::Ha => "ה",
        }
    }

    fn from_lemma(lemma: &str) -> Option<Self> {
        [PseudoKind::Shel, PseudoKind::Et, PseudoKind::Ha]
            .into_iter()
            .find(|k| k.lemma() == lemma)
    }

    /// The canonical legacy word for this pseudo-token.
    pub fn template(self, id: usize, head: usize) -> Word {
        let (upos, feat, deprel) = match self {
            PseudoKind::Shel => ("ADP", ("Case", "Gen"), "case:gen"),
            PseudoKind::Et => ("ADP", ("Case", "Acc"), "case:acc"),
            PseudoKind::Ha => ("DET", ("PronType", "Art"), "det"),
        };
        let mut w = Word::new(id, &format!("_{}_", self.lemma()), head, deprel);
        w.lemma = self.lemma().to_string();
        w.upos = upos.to_string();
        w.feats.set(feat.0, feat.1);
        w
    }
}

impl fmt::Display for PseudoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_{}_", self.lemma())
    }
}

/// True for underscore-wrapped forms such as `_של_`.
pub fn is_pseudo_form(form: &str) -> bool {
    form.chars().count() > 2 && form.starts_with('_') && form.ends_with('_')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("word {word}: pseudo-token outside any multiword token")]
    PseudoOutsideMwt { word: usize },
    #[error("word {word}: unknown pseudo-token lemma '{lemma}'")]
    UnknownPseudo { word: usize, lemma: String },
    #[error("word {word}: pseudo-token has dependents {dependents:?}")]
    PseudoDependents { word: usize, dependents: Vec<usize> },
    #[error("word {word}: {reason}")]
    Misplaced { word: usize, reason: String },
    #[error("word {word}: no clitic lexicon entry for '{form}' with {features}")]
    CliticLookup { word: usize, form: String, features: String },
    #[error("{0}")]
    NotConcatenative(ConcatViolation),
    #[error("word {word}: deprel '{deprel}' with lemma '{lemma}' cannot be converted unambiguously")]
    AmbiguousSubtype { word: usize, deprel: String, lemma: String },
    #[error("word {word}: cannot renumber reference to removed word {target}")]
    DanglingReference { word: String, target: String },
}

/// A non-fatal observation made during conversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvertNote {
    pub word: usize,
    pub message: String,
}

impl fmt::Display for ConvertNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "word {}: {}", self.word, self.message)
    }
}

fn pronoun_bundle(feats: &Feats) -> String {
    let get = |k| feats.get(k).unwrap_or("_");
    format!("Person={} Gender={} Number={}", get("Person"), get("Gender"), get("Number"))
}

/// Personal pronouns are the words that can surface as clitics.
fn is_clitic_pronoun(w: &Word) -> bool {
    w.upos == "PRON" && matches!(w.feats.get("PronType"), None | Some("Prs"))
}

/// The relation a clitic pronoun bears to its host that calls for a
/// pseudo-token in the legacy scheme.
fn expected_pseudo(s: &Sentence, pron: &Word) -> Option<PseudoKind> {
    let span = s.mwt_of(pron.id)?;
    if !span.contains(pron.head) || !is_clitic_pronoun(pron) {
        return None;
    }
    let host = s.word(pron.head)?;
    match (pron.deprel.as_str(), host.upos.as_str()) {
        ("nmod:poss", "NOUN") => Some(PseudoKind::Shel),
        ("obj", "VERB") => Some(PseudoKind::Et),
        _ => None,
    }
}

fn has_def(w: &Word) -> bool {
    w.feats.get("Definite") == Some("Def")
}

struct Item {
    word: Word,
    /// Original id, `None` for inserted words.
    old: Option<usize>,
    mwt: Option<usize>,
}

/// Re-assigns ids after insertions/removals. Heads of all items are in the
/// original id space.
fn assemble(s: &Sentence, items: Vec<Item>) -> Result<Sentence, ConvertError> {
    let mut map: HashMap<usize, usize> = HashMap::new();
    for (i, item) in items.iter().enumerate() {
        if let Some(old) = item.old {
            map.insert(old, i + 1);
        }
    }
    // Position for anything anchored after an original word, removed or not.
    let anchor = |old: usize| -> usize { (1..=old).rev().find_map(|k| map.get(&k).copied()).unwrap_or(0) };
    let remap_ref = |r: &str, owner: &str| -> Result<String, ConvertError> {
        let dangling = || ConvertError::DanglingReference {
            word: owner.to_string(),
            target: r.to_string(),
        };
        match r.split_once('.') {
            Some((n, k)) => {
                let n: usize = n.parse().map_err(|_| dangling())?;
                Ok(format!("{}.{k}", anchor(n)))
            }
            None => {
                let n: usize = r.parse().map_err(|_| dangling())?;
                if n == 0 {
                    Ok("0".into())
                } else {
                    map.get(&n).map(|m| m.to_string()).ok_or_else(dangling)
                }
            }
        }
    };
    let remap_deps = |deps: &str, owner: &str| -> Result<String, ConvertError> {
        if deps.is_empty() || deps == "_" {
            return Ok(deps.to_string());
        }
        deps.split('|')
            .map(|d| match d.split_once(':') {
                Some((h, rel)) => Ok(format!("{}:{rel}", remap_ref(h, owner)?)),
                None => Ok(d.to_string()),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|v| v.join("|"))
    };

    let mut words = Vec::with_capacity(items.len());
    let mut ranges: Vec<Option<(usize, usize)>> = vec![None; s.mwt_spans.len()];
    for (i, item) in items.into_iter().enumerate() {
        let id = i + 1;
        let mut w = item.word;
        let owner = w.id.to_string();
        w.head = if w.head == 0 {
            0
        } else {
            *map.get(&w.head).ok_or_else(|| ConvertError::DanglingReference {
                word: owner.clone(),
                target: w.head.to_string(),
            })?
        };
        w.deps = remap_deps(&w.deps, &owner)?;
        w.id = id;
        if let Some(k) = item.mwt {
            let r = ranges[k].get_or_insert((id, id));
            r.0 = r.0.min(id);
            r.1 = r.1.max(id);
        }
        words.push(w);
    }
    let mut out = Sentence {
        comments: s.comments.clone(),
        words,
        mwt_spans: Vec::new(),
        empty_nodes: Vec::new(),
    };
    for (span, range) in s.mwt_spans.iter().zip(ranges) {
        if let Some((start, end)) = range {
            let mut span = span.clone();
            span.start = start;
            span.end = end;
            out.mwt_spans.push(span);
        }
    }
    for node in &s.empty_nodes {
        let mut cols: Vec<String> = node.line.split('\t').map(str::to_string).collect();
        let after = anchor(node.after);
        let owner = cols[0].clone();
        if let Some((_, k)) = cols[0].split_once('.') {
            cols[0] = format!("{after}.{k}");
        }
        if let Some(deps) = cols.get_mut(8) {
            *deps = remap_deps(deps, &owner)?;
        }
        out.empty_nodes.push(crate::conllu::EmptyNode {
            after,
            line: cols.join("\t"),
        });
    }
    Ok(out)
}

fn mwt_index(s: &Sentence, id: usize) -> Option<usize> {
    s.mwt_spans.iter().position(|m| m.contains(id))
}

/// Legacy to concatenative.
pub fn old_to_new(s: &Sentence, opts: &ConvertOptions) -> Result<Sentence, ConvertError> {
    let children = s.children();
    let mut pseudo: HashMap<usize, PseudoKind> = HashMap::new();
    for w in &s.words {
        check_legacy_subtype(w, opts)?;
        if !is_pseudo_form(&w.form) {
            continue;
        }
        let kind = PseudoKind::from_lemma(&w.lemma).ok_or_else(|| ConvertError::UnknownPseudo {
            word: w.id,
            lemma: w.lemma.clone(),
        })?;
        pseudo.insert(w.id, kind);
    }

    for (&id, &kind) in &pseudo {
        let w = s.word(id).expect("pseudo-token id is a word");
        let span = s.mwt_of(id).ok_or(ConvertError::PseudoOutsideMwt { word: id })?;
        if !children[id].is_empty() {
            return Err(ConvertError::PseudoDependents {
                word: id,
                dependents: children[id].clone(),
            });
        }
        let misplaced = |reason: String| ConvertError::Misplaced { word: id, reason };
        if id == span.start || id == span.end {
            return Err(misplaced(format!("{kind} cannot be first or last in its multiword token")));
        }
        if *w != kind.template(id, w.head) {
            return Err(misplaced(format!("{kind} differs from the canonical pseudo-token")));
        }
        let next = s.word(id + 1).expect("inside span");
        if pseudo.contains_key(&next.id) || w.head != next.id {
            return Err(misplaced(format!("{kind} must attach to the following word")));
        }
        match kind {
            PseudoKind::Ha => {
                let prev = s.word(id - 1).expect("inside span");
                if prev.upos != "ADP" || pseudo.contains_key(&prev.id) {
                    return Err(misplaced(format!("{kind} must follow an ADP")));
                }
                if prev.feats.get("Definite").is_some() {
                    return Err(misplaced(format!("{kind} follows an ADP already marked for Definite")));
                }
            }
            PseudoKind::Shel | PseudoKind::Et => {
                if next.id != span.end || expected_pseudo(s, next) != Some(kind) {
                    let need = match kind {
                        PseudoKind::Shel => "a final nmod:poss pronoun of a NOUN",
                        _ => "a final obj pronoun of a VERB",
                    };
                    return Err(misplaced(format!("{kind} must precede {need} in the same multiword token")));
                }
            }
        }
    }

    // Trees the inverse would read differently are not legacy-conforming.
    for span in &s.mwt_spans {
        for id in span.word_ids() {
            let Some(w) = s.word(id) else { continue };
            if w.upos == "ADP" && has_def(w) && id != span.end && pseudo.get(&(id + 1)) != Some(&PseudoKind::Ha) {
                return Err(ConvertError::Misplaced {
                    word: id,
                    reason: "Definite=Def ADP inside a multiword token without a following _ה_".into(),
                });
            }
        }
        if let (Some(kind), Some(last)) = (s.word(span.end).and_then(|w| expected_pseudo(s, w)), s.word(span.end)) {
            if pseudo.get(&(last.id - 1)) != Some(&kind) {
                return Err(ConvertError::Misplaced {
                    word: last.id,
                    reason: format!("clitic pronoun lacks a preceding {kind}"),
                });
            }
        }
    }

    let mut items: Vec<Item> = Vec::with_capacity(s.words.len());
    for w in &s.words {
        let Some(&kind) = pseudo.get(&w.id) else {
            let mut word = w.clone();
            word.deprel = match word.deprel.as_str() {
                "case:acc" | "case:gen" => "case".into(),
                "mark:q" => "mark".into(),
                _ => word.deprel,
            };
            items.push(Item {
                word,
                old: Some(w.id),
                mwt: mwt_index(s, w.id),
            });
            continue;
        };
        if kind == PseudoKind::Ha {
            let prev = items.last_mut().expect("_ה_ follows an ADP");
            prev.word.feats.set("Definite", "Def");
        }
    }

    // Re-slice pronoun clitics against the surface.
    for (k, span) in s.mwt_spans.iter().enumerate() {
        let members: Vec<usize> = (0..items.len()).filter(|&i| items[i].mwt == Some(k)).collect();
        let concat: String = members.iter().map(|&i| items[i].word.form.as_str()).collect();
        let violation = || {
            ConvertError::NotConcatenative(ConcatViolation {
                start: span.start,
                end: span.end,
                surface_form: span.surface_form.clone(),
                concatenation: concat.clone(),
            })
        };
        let Some((&last, init)) = members.split_last() else { continue };
        if init.is_empty() || !is_clitic_pronoun(&items[last].word) {
            if concat != span.surface_form {
                return Err(violation());
            }
            continue;
        }
        let prefix: String = init.iter().map(|&i| items[i].word.form.as_str()).collect();
        let rest = span.surface_form.strip_prefix(prefix.as_str()).filter(|r| !r.is_empty());
        let pron = &items[last].word;
        let Some(rest) = rest else {
            return Err(violation());
        };
        match opts.lexicon.independent(rest, &pron.feats) {
            Some(ind) if ind == pron.form => {}
            _ => {
                return Err(ConvertError::CliticLookup {
                    word: pron.id,
                    form: rest.to_string(),
                    features: format!("{} (legacy form '{}')", pronoun_bundle(&pron.feats), pron.form),
                })
            }
        }
        items[last].word.form = rest.to_string();
    }

    assemble(s, items)
}

fn check_legacy_subtype(w: &Word, opts: &ConvertOptions) -> Result<(), ConvertError> {
    let q = opts.question_lemmas.contains(&w.lemma);
    let ok = match w.deprel.as_str() {
        "case" => w.lemma != "של" && w.lemma != "את",
        "case:gen" => w.lemma == "של",
        "case:acc" => w.lemma == "את",
        "mark" => !q,
        "mark:q" => q,
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(ConvertError::AmbiguousSubtype {
            word: w.id,
            deprel: w.deprel.clone(),
            lemma: w.lemma.clone(),
        })
    }
}

/// Concatenative to legacy. Notes report `Definite=Def` prepositions that
/// stay as they are because they are not inside a multiword token.
pub fn new_to_old(s: &Sentence, opts: &ConvertOptions) -> Result<(Sentence, Vec<ConvertNote>), ConvertError> {
    if let Some(v) = check_concatenative(s).into_iter().next() {
        return Err(ConvertError::NotConcatenative(v));
    }
    let mut notes = Vec::new();
    let mut items: Vec<Item> = Vec::with_capacity(s.words.len() + 2);
    for w in &s.words {
        if is_pseudo_form(&w.form) {
            return Err(ConvertError::Misplaced {
                word: w.id,
                reason: "pseudo-token in concatenative input".into(),
            });
        }
        if matches!(w.deprel.as_str(), "case:gen" | "case:acc" | "mark:q") {
            return Err(ConvertError::AmbiguousSubtype {
                word: w.id,
                deprel: w.deprel.clone(),
                lemma: w.lemma.clone(),
            });
        }
        let mut word = w.clone();
        let span = s.mwt_of(w.id);
        let mwt = mwt_index(s, w.id);
        word.deprel = match (word.deprel.as_str(), word.lemma.as_str()) {
            ("case", "של") => "case:gen".into(),
            ("case", "את") => "case:acc".into(),
            ("mark", l) if opts.question_lemmas.contains(l) => "mark:q".into(),
            _ => word.deprel,
        };

        let is_final = span.is_some_and(|m| m.end == w.id && m.start != w.id);
        if is_final && is_clitic_pronoun(w) {
            let ind = opts.lexicon.independent(&w.form, &w.feats).ok_or_else(|| ConvertError::CliticLookup {
                word: w.id,
                form: w.form.clone(),
                features: pronoun_bundle(&w.feats),
            })?;
            if let Some(kind) = expected_pseudo(s, w) {
                items.push(Item {
                    word: kind.template(0, w.id),
                    old: None,
                    mwt,
                });
            }
            word.form = ind.to_string();
        }

        let spawn_ha = w.upos == "ADP" && has_def(w);
        if spawn_ha && span.is_some_and(|m| m.end != w.id) {
            word.feats.remove("Definite");
            items.push(Item {
                word,
                old: Some(w.id),
                mwt,
            });
            items.push(Item {
                word: PseudoKind::Ha.template(0, w.id + 1),
                old: None,
                mwt,
            });
            continue;
        }
        if spawn_ha {
            notes.push(ConvertNote {
                word: w.id,
                message: "Definite=Def on a preposition that does not begin a multiword token; left unchanged".into(),
            });
        }
        items.push(Item {
            word,
            old: Some(w.id),
            mwt,
        });
    }
    Ok((assemble(s, items)?, notes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    OldToNew,
    NewToOld,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusConversion {
    /// Converted corpus; sentences that failed are carried over unchanged.
    pub corpus: Corpus,
    pub errors: Vec<(String, ConvertError)>,
    pub notes: Vec<(String, ConvertNote)>,
}

pub fn convert_corpus(corpus: &Corpus, direction: Direction, opts: &ConvertOptions) -> CorpusConversion {
    let results: Vec<_> = corpus
        .sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let label = sentence_label(s, i);
            let res = match direction {
                Direction::OldToNew => old_to_new(s, opts).map(|t| (t, Vec::new())),
                Direction::NewToOld => new_to_old(s, opts),
            };
            (label, s, res)
        })
        .collect();
    let mut out = CorpusConversion {
        corpus: Corpus::default(),
        errors: Vec::new(),
        notes: Vec::new(),
    };
    for (label, s, res) in results {
        match res {
            Ok((t, notes)) => {
                out.corpus.sentences.push(t);
                out.notes.extend(notes.into_iter().map(|n| (label.clone(), n)));
            }
            Err(e) => {
                out.corpus.sentences.push(s.clone());
                out.errors.push((label, e));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bies {
    B,
    I,
    E,
    S,
}

impl fmt::Display for Bies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bies::B => "B",
            Bies::I => "I",
            Bies::E => "E",
            Bies::S => "S",
        })
    }
}

/// Segmentation tag per word: begins, inside, or ends an MWT, or single.
pub fn bies_tags(s: &Sentence) -> Vec<(usize, Bies)> {
    s.words
        .iter()
        .map(|w| {
            let tag = match s.mwt_of(w.id) {
                Some(m) if m.start == w.id => Bies::B,
                Some(m) if m.end == w.id => Bies::E,
                Some(_) => Bies::I,
                None => Bies::S,
            };
            (w.id, tag)
        })
        .collect()
}
