//! CoNLL-U object model, reader, canonical writer and structural checks.
//!
//! Sentences keep their comment lines verbatim. `# sent_id`, `# text` and
//! `# newdoc id` are additionally exposed through accessors that read from
//! (and write back to) those same lines, so serialization never reorders
//! anything the input already had.
//!
//! Empty nodes (`i.1` ids) are kept as opaque lines anchored after word `i`.
//! Nothing else in the crate looks at them.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::io::Read;
use std::ops::Range;

use thiserror::Error;

/// Morphological features, kept in canonical order (keys sorted
/// case-insensitively, ties broken by exact byte order).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Feats {
    entries: Vec<(String, String)>,
}

impl Feats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `A=b|C=d` or `_`. Keys must be unique.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut feats = Feats::new();
        if text == "_" || text.is_empty() {
            return Ok(feats);
        }
        for item in text.split('|') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("malformed feature '{item}'"))?;
            if key.is_empty() || value.is_empty() {
                return Err(format!("malformed feature '{item}'"));
            }
            if feats.get(key).is_some() {
                return Err(format!("duplicate feature '{key}'"));
            }
            feats.set(key, value);
        }
        Ok(feats)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Inserts or replaces `key`, keeping canonical order.
    pub fn set(&mut self, key: &str, value: &str) {
        if let Some(slot) = self.entries.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value.to_string();
            return;
        }
        let pos = self
            .entries
            .iter()
            .position(|(k, _)| feat_key_order(k, key) == std::cmp::Ordering::Greater)
            .unwrap_or(self.entries.len());
        self.entries.insert(pos, (key.to_string(), value.to_string()));
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        let pos = self.entries.iter().position(|(k, _)| k == key)?;
        Some(self.entries.remove(pos).1)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }
}

fn feat_key_order(a: &str, b: &str) -> std::cmp::Ordering {
    a.to_lowercase()
        .cmp(&b.to_lowercase())
        .then_with(|| a.cmp(b))
}

impl fmt::Display for Feats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("_");
        }
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_char('|')?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl<K: AsRef<str>, V: AsRef<str>> FromIterator<(K, V)> for Feats {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        let mut feats = Feats::new();
        for (k, v) in iter {
            feats.set(k.as_ref(), v.as_ref());
        }
        feats
    }
}

/// MISC column: ordered entries, kept in input order. Entries without `=`
/// have no value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Misc {
    entries: Vec<(String, Option<String>)>,
}

impl Misc {
    pub fn parse(text: &str) -> Self {
        if text == "_" || text.is_empty() {
            return Misc::default();
        }
        let entries = text
            .split('|')
            .map(|item| match item.split_once('=') {
                Some((k, v)) => (k.to_string(), Some(v.to_string())),
                None => (item.to_string(), None),
            })
            .collect();
        Misc { entries }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .and_then(|(_, v)| v.as_deref())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<&str>)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_deref()))
    }
}

impl fmt::Display for Misc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("_");
        }
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_char('|')?;
            }
            match v {
                Some(v) => write!(f, "{k}={v}")?,
                None => f.write_str(k)?,
            }
        }
        Ok(())
    }
}

/// One syntactic word. `xpos` and `deps` use the empty string for `_`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: Feats,
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: Misc,
}

impl Word {
    /// A word with `_` everywhere except id, form, head and deprel.
    pub fn new(id: usize, form: &str, head: usize, deprel: &str) -> Self {
        Word {
            id,
            form: form.to_string(),
            lemma: "_".to_string(),
            upos: "_".to_string(),
            xpos: String::new(),
            feats: Feats::new(),
            head,
            deprel: deprel.to_string(),
            deps: String::new(),
            misc: Misc::default(),
        }
    }

    /// Deprel without its language-specific subtype.
    pub fn base_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }
}

/// A multiword token covering words `start..=end`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MwtSpan {
    pub start: usize,
    pub end: usize,
    pub surface_form: String,
    pub misc: Misc,
}

impl MwtSpan {
    pub fn contains(&self, id: usize) -> bool {
        self.start <= id && id <= self.end
    }

    pub fn word_ids(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

/// An `i.k` empty node, preserved verbatim and re-emitted after word `after`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmptyNode {
    pub after: usize,
    pub line: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Sentence {
    /// Raw comment lines, including the leading `#`.
    pub comments: Vec<String>,
    pub words: Vec<Word>,
    pub mwt_spans: Vec<MwtSpan>,
    pub empty_nodes: Vec<EmptyNode>,
}

const SENT_ID: &str = "sent_id";
const TEXT: &str = "text";
const NEWDOC: &str = "newdoc id";
const NEWDOC_BARE: &str = "# newdoc";

fn comment_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.strip_prefix('#')?.trim_start();
    let rest = rest.strip_prefix(key)?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix('=')?;
    Some(rest.strip_prefix(' ').unwrap_or(rest))
}

impl Sentence {
    pub fn sent_id(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| comment_value(c, SENT_ID))
    }

    pub fn text(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| comment_value(c, TEXT))
    }

    /// `Some("")` for a bare `# newdoc` line.
    pub fn newdoc_id(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            if c.trim_end() == NEWDOC_BARE {
                Some("")
            } else {
                comment_value(c, NEWDOC)
            }
        })
    }

    pub fn set_sent_id(&mut self, id: &str) {
        self.set_comment(SENT_ID, id, 0);
    }

    pub fn set_text(&mut self, text: &str) {
        let after_id = self
            .comments
            .iter()
            .position(|c| comment_value(c, SENT_ID).is_some())
            .map_or(0, |p| p + 1);
        self.set_comment(TEXT, text, after_id);
    }

    fn set_comment(&mut self, key: &str, value: &str, default_pos: usize) {
        let line = format!("# {key} = {value}");
        match self
            .comments
            .iter()
            .position(|c| comment_value(c, key).is_some())
        {
            Some(pos) => self.comments[pos] = line,
            None => self.comments.insert(default_pos.min(self.comments.len()), line),
        }
    }

    pub fn word(&self, id: usize) -> Option<&Word> {
        id.checked_sub(1).and_then(|i| self.words.get(i))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The MWT containing word `id`, if any.
    pub fn mwt_of(&self, id: usize) -> Option<&MwtSpan> {
        self.mwt_spans.iter().find(|m| m.contains(id))
    }

    /// Dependents of each word, indexed by head id (index 0 is the root).
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.words.len() + 1];
        for w in &self.words {
            if w.head <= self.words.len() {
                children[w.head].push(w.id);
            }
        }
        children
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
}

/// A run of sentences opened by a `# newdoc` comment (or the leading run of
/// sentences before any such comment, which has no id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: Option<String>,
    pub sentences: Range<usize>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Stable label for sentence `index`: its `sent_id`, or `#<n>` (1-based)
    /// when it has none.
    pub fn sentence_label(&self, index: usize) -> String {
        sentence_label(&self.sentences[index], index)
    }

    pub fn documents(&self) -> Vec<Document> {
        let mut docs: Vec<Document> = Vec::new();
        for (i, s) in self.sentences.iter().enumerate() {
            match (s.newdoc_id(), docs.last_mut()) {
                (None, Some(doc)) => doc.sentences.end = i + 1,
                (id, _) => docs.push(Document {
                    id: id.map(str::to_string),
                    sentences: i..i + 1,
                }),
            }
        }
        docs
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }
}

pub fn sentence_label(sentence: &Sentence, index: usize) -> String {
    match sentence.sent_id() {
        Some(id) => id.to_string(),
        None => format!("#{}", index + 1),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected 10 tab-separated columns, found {0}")]
    ColumnCount(usize),
    #[error("invalid id '{0}'")]
    BadId(String),
    #[error("unexpected word id {found}, expected {expected}")]
    IdSequence { expected: usize, found: usize },
    #[error("invalid multiword range '{0}'")]
    BadRange(String),
    #[error("multiword range {0} overlaps the previous range")]
    OverlappingRange(String),
    #[error("multiword range {range} extends past the last word ({words})")]
    RangePastEnd { range: String, words: usize },
    #[error("invalid head '{0}'")]
    BadHead(String),
    #[error("head out of range: {head} in a sentence of {words} words")]
    HeadOutOfRange { head: usize, words: usize },
    #[error("{0}")]
    BadFeats(String),
    #[error("sentence has no words")]
    EmptySentence,
    #[error("duplicate sent_id '{0}'")]
    DuplicateSentId(String),
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("read failed: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ParseMode {
    /// First error aborts the whole parse.
    #[default]
    Strict,
    /// Malformed sentences are dropped and reported; parsing continues.
    Lenient,
}

/// Strict parse of a whole corpus.
pub fn parse_str(input: &str) -> Result<Corpus, ParseError> {
    let (corpus, mut errors) = parse_with(input, ParseMode::Strict);
    match errors.is_empty() {
        true => Ok(corpus),
        false => Err(errors.remove(0)),
    }
}

/// Lenient parse: returns every well-formed sentence plus the errors of the
/// sentences that were dropped.
pub fn parse_lenient(input: &str) -> (Corpus, Vec<ParseError>) {
    parse_with(input, ParseMode::Lenient)
}

pub fn read_corpus<R: Read>(mut reader: R, mode: ParseMode) -> Result<(Corpus, Vec<ParseError>), ParseError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes).map_err(|e| ParseError {
        line: 0,
        kind: ParseErrorKind::Io(e.to_string()),
    })?;
    let text = String::from_utf8(bytes).map_err(|e| {
        let valid = &e.as_bytes()[..e.utf8_error().valid_up_to()];
        ParseError {
            line: valid.iter().filter(|&&b| b == b'\n').count() + 1,
            kind: ParseErrorKind::Encoding,
        }
    })?;
    let (corpus, mut errors) = parse_with(&text, mode);
    if mode == ParseMode::Strict && !errors.is_empty() {
        return Err(errors.remove(0));
    }
    Ok((corpus, errors))
}

fn parse_with(input: &str, mode: ParseMode) -> (Corpus, Vec<ParseError>) {
    let mut corpus = Corpus::default();
    let mut errors = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut block: Vec<(usize, &str)> = Vec::new();

    let lines = input
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));
    // A trailing sentinel flushes the last block even without a final blank line.
    for (lineno, line) in lines.chain(std::iter::once((0, ""))) {
        if !line.trim().is_empty() {
            block.push((lineno, line));
            continue;
        }
        if block.is_empty() {
            continue;
        }
        let first_line = block[0].0;
        match parse_sentence_lines(&block) {
            Ok(sentence) => {
                let dup = sentence
                    .sent_id()
                    .filter(|id| !seen_ids.insert(id.to_string()))
                    .map(str::to_string);
                match dup {
                    Some(id) => errors.push(ParseError {
                        line: first_line,
                        kind: ParseErrorKind::DuplicateSentId(id),
                    }),
                    None => corpus.sentences.push(sentence),
                }
            }
            Err(e) => errors.push(e),
        }
        block.clear();
        if mode == ParseMode::Strict && !errors.is_empty() {
            break;
        }
    }
    (corpus, errors)
}

/// Parses one blank-line-delimited block.
pub fn parse_sentence_lines(lines: &[(usize, &str)]) -> Result<Sentence, ParseError> {
    let mut sentence = Sentence::default();
    // Word lines are kept until the end so head ranges can be checked.
    let mut head_lines: Vec<usize> = Vec::new();
    let mut pending_ranges: Vec<(usize, String)> = Vec::new();
    let mut last_line = 0;

    for &(lineno, line) in lines {
        last_line = lineno;
        let err = |kind| ParseError { line: lineno, kind };
        if line.starts_with('#') && sentence.words.is_empty() && sentence.mwt_spans.is_empty() {
            sentence.comments.push(line.to_string());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(err(ParseErrorKind::ColumnCount(cols.len())));
        }
        let id = cols[0];
        if let Some((a, b)) = id.split_once('-') {
            let (start, end) = match (a.parse::<usize>(), b.parse::<usize>()) {
                (Ok(s), Ok(e)) if s >= 1 && s < e => (s, e),
                _ => return Err(err(ParseErrorKind::BadRange(id.to_string()))),
            };
            let expected = sentence.words.len() + 1;
            if let Some(prev) = sentence.mwt_spans.last() {
                if start <= prev.end {
                    return Err(err(ParseErrorKind::OverlappingRange(id.to_string())));
                }
            }
            if start != expected {
                return Err(err(ParseErrorKind::IdSequence {
                    expected,
                    found: start,
                }));
            }
            sentence.mwt_spans.push(MwtSpan {
                start,
                end,
                surface_form: cols[1].to_string(),
                misc: Misc::parse(cols[9]),
            });
            pending_ranges.push((lineno, id.to_string()));
        } else if let Some((a, b)) = id.split_once('.') {
            match (a.parse::<usize>(), b.parse::<usize>()) {
                (Ok(after), Ok(_)) if after == sentence.words.len() => {
                    sentence.empty_nodes.push(EmptyNode {
                        after,
                        line: line.to_string(),
                    })
                }
                _ => return Err(err(ParseErrorKind::BadId(id.to_string()))),
            }
        } else {
            let id: usize = id
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| err(ParseErrorKind::BadId(id.to_string())))?;
            let expected = sentence.words.len() + 1;
            if id != expected {
                return Err(err(ParseErrorKind::IdSequence {
                    expected,
                    found: id,
                }));
            }
            let head: usize = cols[6]
                .parse()
                .map_err(|_| err(ParseErrorKind::BadHead(cols[6].to_string())))?;
            let feats = Feats::parse(cols[5]).map_err(|m| err(ParseErrorKind::BadFeats(m)))?;
            sentence.words.push(Word {
                id,
                form: cols[1].to_string(),
                lemma: cols[2].to_string(),
                upos: cols[3].to_string(),
                xpos: empty_if_underscore(cols[4]),
                feats,
                head,
                deprel: cols[7].to_string(),
                deps: empty_if_underscore(cols[8]),
                misc: Misc::parse(cols[9]),
            });
            head_lines.push(lineno);
        }
    }

    let n = sentence.words.len();
    if n == 0 {
        return Err(ParseError {
            line: lines.first().map_or(last_line, |l| l.0),
            kind: ParseErrorKind::EmptySentence,
        });
    }
    for (w, &lineno) in sentence.words.iter().zip(&head_lines) {
        if w.head > n {
            return Err(ParseError {
                line: lineno,
                kind: ParseErrorKind::HeadOutOfRange { head: w.head, words: n },
            });
        }
    }
    for (mwt, (lineno, range)) in sentence.mwt_spans.iter().zip(pending_ranges) {
        if mwt.end > n {
            return Err(ParseError {
                line: lineno,
                kind: ParseErrorKind::RangePastEnd { range, words: n },
            });
        }
    }
    Ok(sentence)
}

fn empty_if_underscore(s: &str) -> String {
    match s {
        "_" => String::new(),
        other => other.to_string(),
    }
}

fn or_underscore(s: &str) -> &str {
    if s.is_empty() {
        "_"
    } else {
        s
    }
}

/// Canonical CoNLL-U: tab separators, `_` for empty fields, LF line ends,
/// every sentence followed by one blank line.
pub fn serialize(corpus: &Corpus) -> String {
    let mut out = String::new();
    for s in &corpus.sentences {
        write_sentence(&mut out, s);
    }
    out
}

pub fn serialize_sentence(sentence: &Sentence) -> String {
    let mut out = String::new();
    write_sentence(&mut out, sentence);
    out
}

fn write_sentence(out: &mut String, s: &Sentence) {
    for c in &s.comments {
        out.push_str(c);
        out.push('\n');
    }
    let mut empties = s.empty_nodes.iter().peekable();
    while let Some(e) = empties.next_if(|e| e.after == 0) {
        out.push_str(&e.line);
        out.push('\n');
    }
    for w in &s.words {
        if let Some(m) = s.mwt_spans.iter().find(|m| m.start == w.id) {
            let _ = writeln!(
                out,
                "{}-{}\t{}\t_\t_\t_\t_\t_\t_\t_\t{}",
                m.start, m.end, m.surface_form, m.misc
            );
        }
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            w.id,
            w.form,
            w.lemma,
            w.upos,
            or_underscore(&w.xpos),
            w.feats,
            w.head,
            w.deprel,
            or_underscore(&w.deps),
            w.misc
        );
        while let Some(e) = empties.next_if(|e| e.after == w.id) {
            out.push_str(&e.line);
            out.push('\n');
        }
    }
    // Anchors beyond the last word are malformed but still preserved.
    for e in empties {
        out.push_str(&e.line);
        out.push('\n');
    }
    out.push('\n');
}

/// A violated sentence-level invariant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StructuralError {
    IdSequence { position: usize, found: usize },
    HeadOutOfRange { word: usize, head: usize },
    NoRoot,
    MultipleRoots { words: Vec<usize> },
    /// head = 0 without deprel `root`, or the reverse.
    RootLabel { word: usize },
    Cycle { words: Vec<usize> },
    BadRange { start: usize, end: usize },
    OverlappingRanges { first: (usize, usize), second: (usize, usize) },
}

impl fmt::Display for StructuralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IdSequence { position, found } => {
                write!(f, "word at position {position} has id {found}")
            }
            Self::HeadOutOfRange { word, head } => {
                write!(f, "head out of range: word {word} has head {head}")
            }
            Self::NoRoot => f.write_str("no root"),
            Self::MultipleRoots { words } => write!(f, "multiple roots: {}", join_ids(words)),
            Self::RootLabel { word } => {
                write!(f, "word {word}: head 0 and deprel root must coincide")
            }
            Self::Cycle { words } => write!(f, "cycle: {}", join_ids(words)),
            Self::BadRange { start, end } => write!(f, "invalid multiword range {start}-{end}"),
            Self::OverlappingRanges { first, second } => write!(
                f,
                "overlapping multiword ranges {}-{} and {}-{}",
                first.0, first.1, second.0, second.1
            ),
        }
    }
}

fn join_ids(ids: &[usize]) -> String {
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Empty iff ids are 1..n, heads are in range, there is exactly one root
/// (labelled `root`), multiword ranges are sane, and the head graph is
/// acyclic. Each distinct cycle is reported once.
pub fn structural_check(sentence: &Sentence) -> Vec<StructuralError> {
    let mut errors = Vec::new();
    let n = sentence.words.len();
    for (i, w) in sentence.words.iter().enumerate() {
        if w.id != i + 1 {
            errors.push(StructuralError::IdSequence {
                position: i + 1,
                found: w.id,
            });
        }
    }
    for w in &sentence.words {
        if w.head > n {
            errors.push(StructuralError::HeadOutOfRange {
                word: w.id,
                head: w.head,
            });
        }
        if (w.head == 0) != (w.deprel == "root") {
            errors.push(StructuralError::RootLabel { word: w.id });
        }
    }
    let roots: Vec<usize> = sentence
        .words
        .iter()
        .filter(|w| w.head == 0)
        .map(|w| w.id)
        .collect();
    match roots.len() {
        0 if n > 0 => errors.push(StructuralError::NoRoot),
        0 | 1 => {}
        _ => errors.push(StructuralError::MultipleRoots { words: roots }),
    }

    // Cycle detection over the functional graph id -> head.
    // 0 = unvisited, 1 = on current path, 2 = done.
    let mut state = vec![0u8; n + 1];
    for start in 1..=n {
        let mut path = Vec::new();
        let mut cur = start;
        while cur >= 1 && cur <= n && state[cur] == 0 {
            state[cur] = 1;
            path.push(cur);
            cur = sentence.words[cur - 1].head;
        }
        if cur >= 1 && cur <= n && state[cur] == 1 {
            let pos = path.iter().position(|&p| p == cur).unwrap_or(0);
            let mut cycle = path[pos..].to_vec();
            cycle.sort_unstable();
            errors.push(StructuralError::Cycle { words: cycle });
        }
        for p in path {
            state[p] = 2;
        }
    }

    let mut prev: Option<&MwtSpan> = None;
    for m in &sentence.mwt_spans {
        if m.start >= m.end || m.start == 0 || m.end > n {
            errors.push(StructuralError::BadRange {
                start: m.start,
                end: m.end,
            });
        }
        if let Some(p) = prev {
            if m.start <= p.end {
                errors.push(StructuralError::OverlappingRanges {
                    first: (p.start, p.end),
                    second: (m.start, m.end),
                });
            }
        }
        prev = Some(m);
    }
    errors
}

/// An MWT whose surface is not the concatenation of its words' forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcatViolation {
    pub start: usize,
    pub end: usize,
    pub surface_form: String,
    pub concatenation: String,
}

impl fmt::Display for ConcatViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "multiword token {}-{} '{}' is not the concatenation of its words ('{}')",
            self.start, self.end, self.surface_form, self.concatenation
        )
    }
}

pub fn check_concatenative(sentence: &Sentence) -> Vec<ConcatViolation> {
    sentence
        .mwt_spans
        .iter()
        .filter_map(|m| {
            let concatenation: String = m
                .word_ids()
                .filter_map(|id| sentence.word(id))
                .map(|w| w.form.as_str())
                .collect();
            (concatenation != m.surface_form).then(|| ConcatViolation {
                start: m.start,
                end: m.end,
                surface_form: m.surface_form.clone(),
                concatenation,
            })
        })
        .collect()
}
