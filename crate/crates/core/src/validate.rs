//! Rule-based treebank validation.
//!
//! A ruleset file is a sequence of blocks:
//!
//! ```text
//! % comment
//! rule cc-child-conj {
//!   level: error
//!   message: "Token {X} has a cc child (token {Y}), but is neither conj, parataxis nor root."
//!   pattern { Y[lemma<>"בין"]; X -[cc]-> Y; }
//!   without { * -[conj|root|parataxis]-> X; }
//!   pass {
//!     1  ...  (inline CoNLL-U, closed by a line holding only `}`)
//!   }
//!   fail { @examples/cc-fail.conllu }
//! }
//! ```
//!
//! Patterns describe non-conformant trees: every match is a finding.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::conllu::{self, sentence_label, Corpus, Sentence};
use crate::pattern::{find_matches, parse_pattern, Match, Pattern, PatternError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Error,
    Warning,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Level::Error => "error",
            Level::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordAttr {
    Id,
    Form,
    Lemma,
    Upos,
    Xpos,
    Deprel,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Piece {
    Text(String),
    Slot { var: String, attr: WordAttr },
}

/// A message with `{X}`, `{X.form}`, `{X.lemma}`, `{X.upos}`, `{X.xpos}`,
/// `{X.deprel}` or Grew-style `{matching[nodes][X]}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MessageTemplate {
    raw: String,
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("unterminated placeholder in message template")]
    Unterminated,
    #[error("malformed placeholder '{{{0}}}'")]
    Malformed(String),
    #[error("placeholder variable '{0}' is not bound by the match")]
    Unbound(String),
}

impl MessageTemplate {
    pub fn parse(raw: &str) -> Result<Self, TemplateError> {
        let mut pieces = Vec::new();
        let mut rest = raw;
        while let Some(open) = rest.find('{') {
            if open > 0 {
                pieces.push(Piece::Text(rest[..open].to_string()));
            }
            let after = &rest[open + 1..];
            let close = after.find('}').ok_or(TemplateError::Unterminated)?;
            // `{matching[nodes][X]}` contains no braces, so the first `}` closes it.
            pieces.push(parse_slot(&after[..close])?);
            rest = &after[close + 1..];
        }
        if !rest.is_empty() {
            pieces.push(Piece::Text(rest.to_string()));
        }
        Ok(MessageTemplate {
            raw: raw.to_string(),
            pieces,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.pieces.iter().filter_map(|p| match p {
            Piece::Slot { var, .. } => Some(var.as_str()),
            Piece::Text(_) => None,
        })
    }

    pub fn render(&self, m: &Match, sentence: &Sentence) -> Result<String, TemplateError> {
        let mut out = String::new();
        for piece in &self.pieces {
            match piece {
                Piece::Text(t) => out.push_str(t),
                Piece::Slot { var, attr } => {
                    let id = m.get(var).ok_or_else(|| TemplateError::Unbound(var.clone()))?;
                    let word = sentence.word(id);
                    let field = |f: fn(&conllu::Word) -> &str| word.map_or("", f).to_string();
                    let text = match attr {
                        WordAttr::Id => id.to_string(),
                        WordAttr::Form => field(|w| &w.form),
                        WordAttr::Lemma => field(|w| &w.lemma),
                        WordAttr::Upos => field(|w| &w.upos),
                        WordAttr::Xpos => field(|w| if w.xpos.is_empty() { "_" } else { &w.xpos }),
                        WordAttr::Deprel => field(|w| &w.deprel),
                    };
                    out.push_str(&text);
                }
            }
        }
        Ok(out)
    }
}

fn parse_slot(inner: &str) -> Result<Piece, TemplateError> {
    let malformed = || TemplateError::Malformed(inner.to_string());
    let (var, attr) = match inner
        .strip_prefix("matching[nodes][")
        .and_then(|s| s.strip_suffix(']'))
    {
        Some(var) => (var, WordAttr::Id),
        None => {
            let (var, attr) = inner.split_once('.').unwrap_or((inner, ""));
            let attr = match attr {
                "" => WordAttr::Id,
                "form" => WordAttr::Form,
                "lemma" => WordAttr::Lemma,
                "upos" => WordAttr::Upos,
                "xpos" => WordAttr::Xpos,
                "deprel" => WordAttr::Deprel,
                _ => return Err(malformed()),
            };
            (var, attr)
        }
    };
    if var.is_empty() || !var.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(malformed());
    }
    Ok(Piece::Slot {
        var: var.to_string(),
        attr,
    })
}

/// Expands `template` against a match.
pub fn render_message(template: &str, m: &Match, sentence: &Sentence) -> Result<String, TemplateError> {
    MessageTemplate::parse(template)?.render(m, sentence)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub name: String,
    pub level: Level,
    pub message: MessageTemplate,
    pub pattern: Pattern,
    pub pass_examples: Vec<Sentence>,
    pub fail_examples: Vec<Sentence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ruleset {
    pub rules: Vec<Rule>,
    /// SHA-256 (hex) of the canonical ruleset text.
    pub version_hash: String,
}

impl Ruleset {
    pub fn empty() -> Self {
        Ruleset {
            rules: Vec::new(),
            version_hash: digest_rules(&[]),
        }
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RulesetErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("duplicate rule name")]
    DuplicateName,
    #[error("missing '{0}'")]
    Missing(&'static str),
    #[error(transparent)]
    Template(TemplateError),
    #[error("placeholder variable '{0}' does not appear in the positive pattern")]
    UnknownPlaceholder(String),
    #[error(transparent)]
    Pattern(PatternError),
    #[error("example: {0}")]
    Example(conllu::ParseError),
    #[error("cannot read file {path}: {message}", path = .0.display(), message = .1)]
    ExampleFile(PathBuf, String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct RulesetError {
    pub rule: Option<String>,
    pub line: usize,
    pub kind: RulesetErrorKind,
}

impl fmt::Display for RulesetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Some(rule) => write!(f, "line {}: rule '{rule}': {}", self.line, self.kind),
            None => write!(f, "line {}: {}", self.line, self.kind),
        }
    }
}

/// Parses a ruleset. `@file` example references resolve against `base_dir`
/// (the current directory when `None`).
pub fn load_ruleset(text: &str, base_dir: Option<&Path>) -> Result<Ruleset, RulesetError> {
    let mut parser = RuleParser {
        text,
        pos: 0,
        base_dir: base_dir.map(Path::to_path_buf).unwrap_or_default(),
        rule: None,
    };
    let mut rules: Vec<Rule> = Vec::new();
    loop {
        parser.skip_ws();
        if parser.rest().is_empty() {
            break;
        }
        let line = parser.line();
        let rule = parser.rule()?;
        if rules.iter().any(|r| r.name == rule.name) {
            return Err(RulesetError {
                rule: Some(rule.name),
                line,
                kind: RulesetErrorKind::DuplicateName,
            });
        }
        rules.push(rule);
    }
    let version_hash = digest_rules(&rules);
    Ok(Ruleset { rules, version_hash })
}

pub fn load_ruleset_file(path: &Path) -> Result<Ruleset, RulesetError> {
    let text = std::fs::read_to_string(path).map_err(|e| RulesetError {
        rule: None,
        line: 0,
        kind: RulesetErrorKind::ExampleFile(path.to_path_buf(), e.to_string()),
    })?;
    load_ruleset(&text, path.parent())
}

/// Digest over rule names, levels, messages and patterns in canonical,
/// whitespace-normalized form, sorted by name. Comments, layout and the
/// self-test examples do not contribute.
fn digest_rules(rules: &[Rule]) -> String {
    let mut lines: Vec<String> = rules
        .iter()
        .map(|r| {
            let message = r.message.as_str().split_whitespace().collect::<Vec<_>>().join(" ");
            format!("rule {} level={} message={:?} {}", r.name, r.level, message, r.pattern)
        })
        .collect();
    lines.sort();
    let digest = Sha256::digest(lines.join("\n").as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

struct RuleParser<'a> {
    text: &'a str,
    pos: usize,
    base_dir: PathBuf,
    rule: Option<String>,
}

impl<'a> RuleParser<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn line(&self) -> usize {
        self.text[..self.pos].matches('\n').count() + 1
    }

    fn fail(&self, kind: RulesetErrorKind) -> RulesetError {
        RulesetError {
            rule: self.rule.clone(),
            line: self.line(),
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> RulesetError {
        self.fail(RulesetErrorKind::Syntax(msg.into()))
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.rest().chars().next()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('%') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    fn word(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_alphanumeric() || "_-.".contains(c)))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn expect(&mut self, token: &str) -> Result<(), RulesetError> {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{token}'")))
        }
    }

    fn quoted(&mut self) -> Result<String, RulesetError> {
        self.skip_ws();
        if !self.rest().starts_with('"') {
            return Err(self.syntax("expected a double-quoted string"));
        }
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c) => out.push(c),
                    None => break,
                },
                Some(c) => out.push(c),
                None => break,
            }
        }
        Err(self.syntax("unterminated string"))
    }

    /// Text of a `{ ... }` group including the braces; quotes are respected.
    fn braced(&mut self) -> Result<&'a str, RulesetError> {
        self.skip_ws();
        let start = self.pos;
        if !self.rest().starts_with('{') {
            return Err(self.syntax("expected '{'"));
        }
        let mut depth = 0usize;
        let mut in_quote = false;
        while let Some(c) = self.bump() {
            match c {
                '\\' if in_quote => {
                    self.bump();
                }
                '"' => in_quote = !in_quote,
                '{' if !in_quote => depth += 1,
                '}' if !in_quote => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(&self.text[start..self.pos]);
                    }
                }
                _ => {}
            }
        }
        self.pos = start;
        Err(self.syntax("unbalanced braces"))
    }

    fn rule(&mut self) -> Result<Rule, RulesetError> {
        self.rule = None;
        if self.word() != "rule" {
            return Err(self.syntax("expected 'rule'"));
        }
        self.skip_ws();
        let name = self.word().to_string();
        if name.is_empty() {
            return Err(self.syntax("expected a rule name"));
        }
        self.rule = Some(name.clone());
        self.expect("{")?;

        let mut level = None;
        let mut message: Option<(String, usize)> = None;
        let mut pattern_text = String::new();
        let mut pattern_line = 0;
        let mut pass_examples = Vec::new();
        let mut fail_examples = Vec::new();
        loop {
            self.skip_ws();
            if self.rest().starts_with('}') {
                self.bump();
                break;
            }
            if self.rest().is_empty() {
                return Err(self.syntax("unterminated rule, expected '}'"));
            }
            let key_line = self.line();
            match self.word() {
                "level" => {
                    self.expect(":")?;
                    self.skip_ws();
                    level = Some(match self.word() {
                        "error" => Level::Error,
                        "warning" => Level::Warning,
                        other => return Err(self.syntax(format!("unknown level '{other}'"))),
                    });
                }
                "message" => {
                    self.expect(":")?;
                    message = Some((self.quoted()?, key_line));
                }
                kw @ ("pattern" | "without") => {
                    if kw == "pattern" && !pattern_text.is_empty() {
                        return Err(self.syntax("a rule has exactly one pattern block"));
                    }
                    if kw == "without" && pattern_text.is_empty() {
                        return Err(self.syntax("'without' must follow 'pattern'"));
                    }
                    if pattern_text.is_empty() {
                        pattern_line = key_line;
                    }
                    let body = self.braced()?;
                    pattern_text.push_str(kw);
                    pattern_text.push(' ');
                    pattern_text.push_str(body);
                    pattern_text.push('\n');
                }
                kind @ ("pass" | "fail") => {
                    let sentences = self.examples()?;
                    match kind {
                        "pass" => pass_examples.extend(sentences),
                        _ => fail_examples.extend(sentences),
                    }
                }
                "" => return Err(self.syntax("unexpected character")),
                other => return Err(self.syntax(format!("unknown rule field '{other}'"))),
            }
        }

        let at = |line: usize, kind: RulesetErrorKind| RulesetError {
            rule: Some(name.clone()),
            line,
            kind,
        };
        let level = level.ok_or_else(|| self.fail(RulesetErrorKind::Missing("level")))?;
        let (raw_message, message_line) =
            message.ok_or_else(|| self.fail(RulesetErrorKind::Missing("message")))?;
        if pattern_text.is_empty() {
            return Err(self.fail(RulesetErrorKind::Missing("pattern")));
        }
        let pattern = parse_pattern(&pattern_text).map_err(|e| {
            let line = pattern_line + e.line - 1;
            at(line, RulesetErrorKind::Pattern(e))
        })?;
        let message = MessageTemplate::parse(&raw_message).map_err(|e| at(message_line, RulesetErrorKind::Template(e)))?;
        for var in message.vars() {
            if !pattern.positive_vars().any(|v| v == var) {
                return Err(at(
                    message_line,
                    RulesetErrorKind::UnknownPlaceholder(var.to_string()),
                ));
            }
        }
        Ok(Rule {
            name,
            level,
            message,
            pattern,
            pass_examples,
            fail_examples,
        })
    }

    fn examples(&mut self) -> Result<Vec<Sentence>, RulesetError> {
        self.expect("{")?;
        let rest = self.rest();
        let eol = rest.find('\n').unwrap_or(rest.len());
        let same_line = rest[..eol].trim();
        if let Some(reference) = same_line.strip_prefix('@') {
            let path = reference
                .strip_suffix('}')
                .ok_or_else(|| self.syntax("expected '}' after example file reference"))?
                .trim();
            let full = self.base_dir.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| self.fail(RulesetErrorKind::ExampleFile(full.clone(), e.to_string())))?;
            self.pos += eol;
            let corpus = conllu::parse_str(&text).map_err(|e| self.fail(RulesetErrorKind::Example(e)))?;
            return Ok(corpus.sentences);
        }
        if !same_line.is_empty() {
            return Err(self.syntax("inline examples start on the line after '{'"));
        }
        self.pos += eol;
        let first_line = self.line() + 1;
        let mut body = String::new();
        loop {
            if self.rest().is_empty() {
                return Err(self.syntax("unterminated example block"));
            }
            self.bump(); // newline
            let rest = self.rest();
            let eol = rest.find('\n').unwrap_or(rest.len());
            let line = &rest[..eol];
            self.pos += eol;
            if line.trim() == "}" {
                break;
            }
            body.push_str(line.trim_start());
            body.push('\n');
        }
        conllu::parse_str(&body).map(|c| c.sentences).map_err(|mut e| {
            e.line += first_line - 1;
            RulesetError {
                rule: self.rule.clone(),
                line: e.line,
                kind: RulesetErrorKind::Example(e),
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Finding {
    pub rule: String,
    pub level: Level,
    pub sent_id: String,
    pub bindings: Match,
    pub message: String,
    pub dismissed: bool,
}

impl Finding {
    pub fn signature(&self) -> String {
        self.bindings.signature()
    }

    /// One JSON object: kind, rule, level, sent_id, bindings, message, dismissed.
    pub fn to_json(&self) -> serde_json::Value {
        let bindings: serde_json::Map<String, serde_json::Value> = self
            .bindings
            .bindings
            .iter()
            .map(|(v, id)| (v.clone(), serde_json::Value::from(*id)))
            .collect();
        serde_json::json!({
            "kind": "finding",
            "rule": self.rule,
            "level": self.level,
            "sent_id": self.sent_id,
            "bindings": bindings,
            "message": self.message,
            "dismissed": self.dismissed,
        })
    }
}

/// Annotator sign-off on one warning-level finding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dismissal {
    pub sent_id: String,
    pub rule: String,
    /// Sorted `var=id` pairs, comma separated.
    pub signature: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dismissals line {line}: {message}")]
pub struct DismissalError {
    pub line: usize,
    pub message: String,
}

/// Reads `sent_id <TAB> rule <TAB> var=id[,var=id...] [<TAB> note]` lines.
/// Blank lines and `#` comments are skipped.
pub fn parse_dismissals(text: &str) -> Result<Vec<Dismissal>, DismissalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: &str| DismissalError {
            line: i + 1,
            message: m.to_string(),
        };
        let cols: Vec<&str> = line.splitn(4, '\t').collect();
        if cols.len() < 3 {
            return Err(err("expected at least 3 tab-separated columns"));
        }
        let mut pairs = Vec::new();
        for pair in cols[2].split(',') {
            let (var, id) = pair
                .split_once('=')
                .ok_or_else(|| err("binding must look like var=id"))?;
            let id: usize = id.trim().parse().map_err(|_| err("binding id must be a number"))?;
            pairs.push((var.trim().to_string(), id));
        }
        pairs.sort();
        let signature = pairs
            .iter()
            .map(|(v, id)| format!("{v}={id}"))
            .collect::<Vec<_>>()
            .join(",");
        out.push(Dismissal {
            sent_id: cols[0].to_string(),
            rule: cols[1].to_string(),
            signature,
            note: cols.get(3).unwrap_or(&"").to_string(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warnings,
    Errors,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Status::Pass => "pass",
            Status::Warnings => "warnings",
            Status::Errors => "errors",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceReport {
    pub sent_id: String,
    pub status: Status,
    pub findings: Vec<Finding>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub sentences: Vec<SentenceReport>,
    pub ruleset_version: String,
}

impl ValidationReport {
    /// All findings, sentence by sentence.
    pub fn findings(&self) -> impl Iterator<Item = &Finding> {
        self.sentences.iter().flat_map(|s| s.findings.iter())
    }

    pub fn dismissed(&self) -> impl Iterator<Item = &Finding> {
        self.findings().filter(|f| f.dismissed)
    }

    pub fn error_count(&self) -> usize {
        self.findings().filter(|f| f.level == Level::Error).count()
    }

    pub fn open_warning_count(&self) -> usize {
        self.findings()
            .filter(|f| f.level == Level::Warning && !f.dismissed)
            .count()
    }

    pub fn status_of(&self, sent_id: &str) -> Option<Status> {
        self.sentences
            .iter()
            .find(|s| s.sent_id == sent_id)
            .map(|s| s.status)
    }
}

struct DismissalIndex<'d>(HashMap<(&'d str, &'d str, &'d str), &'d Dismissal>);

impl<'d> DismissalIndex<'d> {
    fn new(dismissals: &'d [Dismissal]) -> Self {
        DismissalIndex(
            dismissals
                .iter()
                .map(|d| ((d.sent_id.as_str(), d.rule.as_str(), d.signature.as_str()), d))
                .collect(),
        )
    }

    fn covers(&self, f: &Finding) -> bool {
        f.level == Level::Warning
            && self
                .0
                .contains_key(&(f.sent_id.as_str(), f.rule.as_str(), f.signature().as_str()))
    }
}

/// Findings of every rule on one sentence, sorted by (level, rule, bindings).
pub fn validate_sentence(sentence: &Sentence, sent_id: &str, ruleset: &Ruleset) -> Vec<Finding> {
    let mut findings: Vec<Finding> = ruleset
        .rules
        .iter()
        .flat_map(|rule| {
            find_matches(&rule.pattern, sentence).into_iter().map(move |m| {
                let message = rule
                    .message
                    .render(&m, sentence)
                    .unwrap_or_else(|_| rule.message.as_str().to_string());
                Finding {
                    rule: rule.name.clone(),
                    level: rule.level,
                    sent_id: sent_id.to_string(),
                    bindings: m,
                    message,
                    dismissed: false,
                }
            })
        })
        .collect();
    findings.sort_by(|a, b| {
        (a.level, &a.rule, a.bindings.ids().collect::<Vec<_>>())
            .cmp(&(b.level, &b.rule, b.bindings.ids().collect::<Vec<_>>()))
    });
    findings
}

fn status_of(findings: &[Finding]) -> Status {
    if findings.iter().any(|f| f.level == Level::Error) {
        Status::Errors
    } else if findings.iter().any(|f| !f.dismissed) {
        Status::Warnings
    } else {
        Status::Pass
    }
}

/// Runs every rule over every sentence. Warnings covered by a dismissal are
/// marked dismissed; errors never are.
pub fn validate_corpus(corpus: &Corpus, ruleset: &Ruleset, dismissals: &[Dismissal]) -> ValidationReport {
    let index = DismissalIndex::new(dismissals);
    let sentences = corpus
        .sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let sent_id = sentence_label(s, i);
            let mut findings = validate_sentence(s, &sent_id, ruleset);
            for f in &mut findings {
                f.dismissed = index.covers(f);
            }
            SentenceReport {
                status: status_of(&findings),
                sent_id,
                findings,
            }
        })
        .collect();
    ValidationReport {
        sentences,
        ruleset_version: ruleset.version_hash.clone(),
    }
}

/// True iff there are no errors and every warning is dismissed.
pub fn check_final(report: &ValidationReport) -> bool {
    report
        .findings()
        .all(|f| f.level == Level::Warning && f.dismissed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfTestResult {
    pub rule: String,
    pub passed: bool,
    /// Set when the rule has no examples at all (it then passes vacuously).
    pub notice: Option<String>,
    pub failures: Vec<String>,
}

/// A rule passes iff each pass example yields no match and each fail
/// example yields at least one.
pub fn selftest_ruleset(ruleset: &Ruleset) -> Vec<SelfTestResult> {
    ruleset
        .rules
        .iter()
        .map(|rule| {
            let mut failures = Vec::new();
            for (i, s) in rule.pass_examples.iter().enumerate() {
                let n = find_matches(&rule.pattern, s).len();
                if n > 0 {
                    failures.push(format!(
                        "pass example {} ({}) yields {n} match(es)",
                        i + 1,
                        sentence_label(s, i)
                    ));
                }
            }
            for (i, s) in rule.fail_examples.iter().enumerate() {
                if find_matches(&rule.pattern, s).is_empty() {
                    failures.push(format!(
                        "fail example {} ({}) yields no match",
                        i + 1,
                        sentence_label(s, i)
                    ));
                }
            }
            let notice = (rule.pass_examples.is_empty() && rule.fail_examples.is_empty())
                .then(|| "no examples".to_string());
            SelfTestResult {
                rule: rule.name.clone(),
                passed: failures.is_empty(),
                notice,
                failures,
            }
        })
        .collect()
}

/// Sentences recorded as passing under a different ruleset version that now
/// have at least one undismissed finding. Sentences with no record are
/// never stale.
pub fn scan_stale(
    corpus: &Corpus,
    ruleset: &Ruleset,
    dismissals: &[Dismissal],
    last_passed: &BTreeMap<String, String>,
) -> Vec<String> {
    let index = DismissalIndex::new(dismissals);
    corpus
        .sentences
        .par_iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let sent_id = sentence_label(s, i);
            let recorded = last_passed.get(&sent_id)?;
            if *recorded == ruleset.version_hash {
                return None;
            }
            let open = validate_sentence(s, &sent_id, ruleset)
                .iter()
                .any(|f| !index.covers(f));
            open.then_some(sent_id)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pass-state line {line}: expected 'sent_id<TAB>digest'")]
pub struct PassStateError {
    pub line: usize,
}

/// Reads the `sent_id <TAB> ruleset_digest` sidecar.
pub fn parse_pass_state(text: &str) -> Result<BTreeMap<String, String>, PassStateError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| match l.split_once('\t') {
            Some((id, digest)) if !digest.contains('\t') => Ok((id.to_string(), digest.trim().to_string())),
            _ => Err(PassStateError { line: i + 1 }),
        })
        .collect()
}

pub fn write_pass_state(state: &BTreeMap<String, String>) -> String {
    state.iter().map(|(id, d)| format!("{id}\t{d}\n")).collect()
}

/// Records the current ruleset version for every sentence that is final
/// (no errors, all warnings dismissed).
pub fn record_passes(state: &mut BTreeMap<String, String>, report: &ValidationReport) {
    for s in &report.sentences {
        if s.status == Status::Pass {
            state.insert(s.sent_id.clone(), report.ruleset_version.clone());
        }
    }
}

/// Human report: sentences with findings, each finding on one line, then a
/// summary line.
pub fn render_human(report: &ValidationReport) -> String {
    let mut out = String::new();
    for s in report.sentences.iter().filter(|s| !s.findings.is_empty()) {
        let _ = writeln!(out, "{} [{}]", s.sent_id, s.status);
        for f in &s.findings {
            let dismissed = if f.dismissed { " (dismissed)" } else { "" };
            let _ = writeln!(
                out,
                "  {:<7} {} [{}] {}{}",
                f.level,
                f.rule,
                f.signature(),
                f.message,
                dismissed
            );
        }
    }
    let count = |st: Status| report.sentences.iter().filter(|s| s.status == st).count();
    let _ = writeln!(
        out,
        "{} sentences: {} pass, {} with warnings, {} with errors; {} errors, {} open warnings, {} dismissed; ruleset {}",
        report.sentences.len(),
        count(Status::Pass),
        count(Status::Warnings),
        count(Status::Errors),
        report.error_count(),
        report.open_warning_count(),
        report.dismissed().count(),
        report.ruleset_version
    );
    out
}

/// One JSON object per finding, one per line, then a summary record.
pub fn render_json(report: &ValidationReport) -> String {
    let mut out: String = report
        .findings()
        .map(|f| format!("{}\n", f.to_json()))
        .collect();
    let count = |st: Status| report.sentences.iter().filter(|s| s.status == st).count();
    let summary = serde_json::json!({
        "kind": "summary",
        "sentences": report.sentences.len(),
        "pass": count(Status::Pass),
        "with_warnings": count(Status::Warnings),
        "with_errors": count(Status::Errors),
        "errors": report.error_count(),
        "open_warnings": report.open_warning_count(),
        "dismissed": report.dismissed().count(),
        "ruleset": report.ruleset_version,
    });
    let _ = writeln!(out, "{summary}");
    out
}
