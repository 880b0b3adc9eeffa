//! Grew-style graph patterns over dependency trees.
//!
//! ```text
//! pattern { Y[lemma<>"בין"]; X -[cc]-> Y; }
//! without { * -[conj|root|parataxis]-> X; }
//! ```
//!
//! Positive variables bind injectively to words. A match survives only if
//! no `without` block can be satisfied by extending it: new named variables
//! of a block bind to pairwise distinct words (possibly words already bound
//! by the positive block), and each `*` binds to any node including the
//! virtual root, so `* -[root]-> X` holds exactly when X has head 0.
//!
//! Variables mentioned only in an edge are declared implicitly in the block
//! where they first appear.

use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::conllu::{sentence_label, Corpus, Sentence, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Attr {
    Form,
    Lemma,
    Upos,
    Xpos,
    Deprel,
    Feat(String),
}

impl Attr {
    fn from_name(name: &str) -> Attr {
        match name {
            "form" => Attr::Form,
            "lemma" => Attr::Lemma,
            "upos" => Attr::Upos,
            "xpos" => Attr::Xpos,
            "deprel" => Attr::Deprel,
            other => Attr::Feat(other.to_string()),
        }
    }

    fn name(&self) -> &str {
        match self {
            Attr::Form => "form",
            Attr::Lemma => "lemma",
            Attr::Upos => "upos",
            Attr::Xpos => "xpos",
            Attr::Deprel => "deprel",
            Attr::Feat(k) => k,
        }
    }

    pub fn value<'w>(&self, word: &'w Word) -> Option<&'w str> {
        match self {
            Attr::Form => Some(&word.form),
            Attr::Lemma => Some(&word.lemma),
            Attr::Upos => Some(&word.upos),
            Attr::Xpos => Some(if word.xpos.is_empty() { "_" } else { &word.xpos }),
            Attr::Deprel => Some(&word.deprel),
            Attr::Feat(k) => word.feats.get(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TestOp {
    Eq(String),
    Neq(String),
    In(Vec<String>),
    NotIn(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttrTest {
    pub attr: Attr,
    pub op: TestOp,
}

impl AttrTest {
    /// Absent features fail `=` / `in` and satisfy `<>` / `not in`.
    pub fn holds(&self, word: &Word) -> bool {
        let v = self.attr.value(word);
        match &self.op {
            TestOp::Eq(x) => v == Some(x.as_str()),
            TestOp::Neq(x) => v != Some(x.as_str()),
            TestOp::In(xs) => v.is_some_and(|v| xs.iter().any(|x| x == v)),
            TestOp::NotIn(xs) => !v.is_some_and(|v| xs.iter().any(|x| x == v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeConstraint {
    pub var: String,
    pub tests: Vec<AttrTest>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarRef {
    Named(String),
    Wildcard,
}

impl VarRef {
    pub fn name(&self) -> Option<&str> {
        match self {
            VarRef::Named(n) => Some(n),
            VarRef::Wildcard => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeConstraint {
    pub src: VarRef,
    pub tgt: VarRef,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Block {
    pub nodes: Vec<NodeConstraint>,
    pub edges: Vec<EdgeConstraint>,
}

impl Block {
    fn node_mut(&mut self, var: &str) -> Option<&mut NodeConstraint> {
        self.nodes.iter_mut().find(|n| n.var == var)
    }

    fn declares(&self, var: &str) -> bool {
        self.nodes.iter().any(|n| n.var == var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub positive: Block,
    pub withouts: Vec<Block>,
}

impl Pattern {
    /// Positive variables in declaration order (the order of match tuples).
    pub fn positive_vars(&self) -> impl Iterator<Item = &str> {
        self.positive.nodes.iter().map(|n| n.var.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pattern syntax error at {line}:{column}: {message}")]
pub struct PatternError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub fn parse_pattern(text: &str) -> Result<Pattern, PatternError> {
    PatternParser { text, pos: 0 }.parse()
}

impl std::str::FromStr for Pattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pattern(s)
    }
}

struct PatternParser<'a> {
    text: &'a str,
    pos: usize,
}

enum Clause {
    Node(String, Vec<AttrTest>),
    Edge(EdgeConstraint),
}

impl<'a> PatternParser<'a> {
    fn parse(mut self) -> Result<Pattern, PatternError> {
        self.skip_ws();
        self.keyword("pattern")?;
        let positive = self.block(None)?;
        let mut withouts = Vec::new();
        loop {
            self.skip_ws();
            if self.rest().is_empty() {
                break;
            }
            self.keyword("without")?;
            withouts.push(self.block(Some(&positive))?);
        }
        Ok(Pattern { positive, withouts })
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> PatternError {
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        PatternError {
            offset,
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> PatternError {
        self.error_at(self.pos, message)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), PatternError> {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.error(format!("expected '{token}'")))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), PatternError> {
        let start = self.pos;
        match self.ident() {
            Some(word) if word == kw => Ok(()),
            _ => Err(self.error_at(start, format!("expected '{kw}'"))),
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        (self.pos > start).then(|| &self.text[start..self.pos])
    }

    fn block(&mut self, positive: Option<&Block>) -> Result<Block, PatternError> {
        let in_without = positive.is_some();
        self.expect("{")?;
        let mut block = Block::default();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('}') => {
                    self.bump();
                    break;
                }
                Some(';') => {
                    self.bump();
                    continue;
                }
                None => return Err(self.error("unterminated block, expected '}'")),
                _ => {}
            }
            let start = self.pos;
            match self.clause()? {
                Clause::Node(var, tests) => {
                    if var == "*" {
                        return Err(self.error_at(start, "wildcard '*' cannot carry node tests"));
                    }
                    match block.node_mut(&var) {
                        Some(node) => node.tests.extend(tests),
                        None => block.nodes.push(NodeConstraint { var, tests }),
                    }
                }
                Clause::Edge(edge) => {
                    for end in [&edge.src, &edge.tgt] {
                        match end {
                            VarRef::Wildcard if !in_without => {
                                return Err(self.error_at(
                                    start,
                                    "wildcard '*' is only allowed inside without blocks",
                                ))
                            }
                            VarRef::Wildcard => {}
                            VarRef::Named(name) => {
                                let known = block.declares(name)
                                    || positive.is_some_and(|p| p.declares(name));
                                if !known {
                                    block.nodes.push(NodeConstraint {
                                        var: name.clone(),
                                        tests: Vec::new(),
                                    });
                                }
                            }
                        }
                    }
                    block.edges.push(edge);
                }
            }
            self.skip_ws();
            match self.peek() {
                Some(';') => {
                    self.bump();
                }
                Some('}') => {}
                _ => return Err(self.error("expected ';' or '}' after clause")),
            }
        }
        Ok(block)
    }

    fn var(&mut self) -> Result<String, PatternError> {
        self.skip_ws();
        if self.peek() == Some('*') {
            self.bump();
            return Ok("*".to_string());
        }
        self.ident()
            .map(str::to_string)
            .ok_or_else(|| self.error("expected a variable name or '*'"))
    }

    fn clause(&mut self) -> Result<Clause, PatternError> {
        let first = self.var()?;
        self.skip_ws();
        if self.peek() == Some('[') {
            self.bump();
            let tests = self.tests()?;
            return Ok(Clause::Node(first, tests));
        }
        if self.rest().starts_with("-[") {
            self.pos += 2;
            let labels = self.values(&[']'])?;
            if labels.is_empty() {
                return Err(self.error("edge needs at least one label"));
            }
            self.expect("]->")?;
            let tgt = self.var()?;
            return Ok(Clause::Edge(EdgeConstraint {
                src: to_ref(first),
                tgt: to_ref(tgt),
                labels,
            }));
        }
        if self.rest().starts_with("->") {
            return Err(self.error("unlabelled edges are not supported; use -[label]->"));
        }
        if first == "*" {
            return Err(self.error("wildcard '*' must be the end of an edge"));
        }
        Ok(Clause::Node(first, Vec::new()))
    }

    fn tests(&mut self) -> Result<Vec<AttrTest>, PatternError> {
        let mut tests = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() == Some(']') {
                self.bump();
                return Ok(tests);
            }
            let attr_start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_' || c == ':') {
                self.bump();
            }
            if self.pos == attr_start {
                return Err(self.error("expected an attribute name"));
            }
            let attr = Attr::from_name(&self.text[attr_start..self.pos]);
            self.skip_ws();
            let negated = if self.rest().starts_with("<>") {
                self.pos += 2;
                true
            } else if self.peek() == Some('=') {
                self.bump();
                false
            } else {
                return Err(self.error("expected '=' or '<>'"));
            };
            let mut values = self.values(&[',', ']'])?;
            let op = match (negated, values.len()) {
                (_, 0) => return Err(self.error("expected a value")),
                (false, 1) => TestOp::Eq(values.remove(0)),
                (true, 1) => TestOp::Neq(values.remove(0)),
                (false, _) => TestOp::In(values),
                (true, _) => TestOp::NotIn(values),
            };
            tests.push(AttrTest { attr, op });
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(']') => {}
                _ => return Err(self.error("expected ',' or ']'")),
            }
        }
    }

    /// `a|b|"c d"`, stopping before any of `stops`.
    fn values(&mut self, stops: &[char]) -> Result<Vec<String>, PatternError> {
        let mut values = Vec::new();
        loop {
            self.skip_ws();
            let value = if self.peek() == Some('"') {
                self.quoted()?
            } else {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if !c.is_whitespace() && c != '|' && c != '"' && !stops.contains(&c))
                {
                    self.bump();
                }
                if self.pos == start {
                    break;
                }
                self.text[start..self.pos].to_string()
            };
            values.push(value);
            self.skip_ws();
            if self.peek() == Some('|') {
                self.bump();
            } else {
                break;
            }
        }
        Ok(values)
    }

    fn quoted(&mut self) -> Result<String, PatternError> {
        let start = self.pos;
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
        Err(self.error_at(start, "unterminated string"))
    }
}

fn to_ref(name: String) -> VarRef {
    if name == "*" {
        VarRef::Wildcard
    } else {
        VarRef::Named(name)
    }
}

fn quote(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn write_values(f: &mut fmt::Formatter<'_>, values: &[String]) -> fmt::Result {
    let quoted: Vec<String> = values.iter().map(|v| quote(v)).collect();
    f.write_str(&quoted.join("|"))
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarRef::Named(n) => f.write_str(n),
            VarRef::Wildcard => f.write_str("*"),
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut clauses = Vec::new();
        for node in &self.nodes {
            let mut s = format!("{}[", node.var);
            for (i, t) in node.tests.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                s.push_str(&t.to_string());
            }
            s.push(']');
            clauses.push(s);
        }
        for e in &self.edges {
            let labels: Vec<String> = e.labels.iter().map(|l| quote(l)).collect();
            clauses.push(format!("{} -[{}]-> {}", e.src, labels.join("|"), e.tgt));
        }
        if clauses.is_empty() {
            f.write_str("{ }")
        } else {
            write!(f, "{{ {} }}", clauses.join("; "))
        }
    }
}

impl fmt::Display for AttrTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.attr.name();
        match &self.op {
            TestOp::Eq(v) => write!(f, "{name}={}", quote(v)),
            TestOp::Neq(v) => write!(f, "{name}<>{}", quote(v)),
            TestOp::In(vs) => {
                write!(f, "{name}=")?;
                write_values(f, vs)
            }
            TestOp::NotIn(vs) => {
                write!(f, "{name}<>")?;
                write_values(f, vs)
            }
        }
    }
}

/// Canonical single-line form; parses back to an equal pattern.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pattern {}", self.positive)?;
        for w in &self.withouts {
            write!(f, " without {w}")?;
        }
        Ok(())
    }
}

/// Positive-variable bindings, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Match {
    pub bindings: Vec<(String, usize)>,
}

impl Match {
    pub fn get(&self, var: &str) -> Option<usize> {
        self.bindings.iter().find(|(v, _)| v == var).map(|&(_, id)| id)
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.bindings.iter().map(|&(_, id)| id)
    }

    /// `var=id` pairs sorted by variable name, comma separated.
    pub fn signature(&self) -> String {
        let mut pairs: Vec<_> = self.bindings.iter().collect();
        pairs.sort();
        pairs
            .iter()
            .map(|(v, id)| format!("{v}={id}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum End {
    Fixed(usize),
    Slot(usize),
}

struct Slot<'p> {
    tests: Vec<&'p AttrTest>,
    wildcard: bool,
}

struct Edge<'p> {
    src: End,
    tgt: End,
    labels: &'p [String],
}

struct Solver<'s, 'p> {
    sentence: &'s Sentence,
    children: &'s [Vec<usize>],
    slots: Vec<Slot<'p>>,
    edges: Vec<Edge<'p>>,
    /// Named slots bind pairwise distinct words; wildcards are unconstrained.
    values: Vec<Option<usize>>,
}

impl<'s, 'p> Solver<'s, 'p> {
    fn value(&self, end: End) -> Option<usize> {
        match end {
            End::Fixed(v) => Some(v),
            End::Slot(i) => self.values[i],
        }
    }

    fn edge_holds(&self, src: usize, tgt: usize, labels: &[String]) -> bool {
        match self.sentence.word(tgt) {
            Some(w) => w.head == src && labels.contains(&w.deprel),
            None => false,
        }
    }

    /// Next slot to bind: one connected to something bound, else the first free.
    fn pick(&self) -> Option<usize> {
        let free = |i: usize| self.values[i].is_none();
        let connected = self.edges.iter().find_map(|e| match (e.src, e.tgt) {
            (End::Slot(s), t) if free(s) && self.value(t).is_some() => Some(s),
            (s, End::Slot(t)) if free(t) && self.value(s).is_some() => Some(t),
            _ => None,
        });
        connected.or_else(|| (0..self.slots.len()).find(|&i| free(i)))
    }

    fn candidates(&self, slot: usize) -> Vec<usize> {
        let n = self.sentence.len();
        for e in &self.edges {
            if e.tgt == End::Slot(slot) {
                if let Some(src) = self.value(e.src) {
                    return self.children.get(src).cloned().unwrap_or_default();
                }
            }
            if e.src == End::Slot(slot) {
                if let Some(tgt) = self.value(e.tgt) {
                    return match self.sentence.word(tgt) {
                        Some(w) if w.head > 0 || self.slots[slot].wildcard => vec![w.head],
                        _ => Vec::new(),
                    };
                }
            }
        }
        let lo = if self.slots[slot].wildcard { 0 } else { 1 };
        (lo..=n).collect()
    }

    fn consistent(&self, slot: usize, value: usize) -> bool {
        let spec = &self.slots[slot];
        if !spec.wildcard {
            let Some(word) = self.sentence.word(value) else {
                return false;
            };
            if !spec.tests.iter().all(|t| t.holds(word)) {
                return false;
            }
            let taken = self
                .values
                .iter()
                .enumerate()
                .any(|(i, v)| i != slot && !self.slots[i].wildcard && *v == Some(value));
            if taken {
                return false;
            }
        }
        self.edges.iter().all(|e| {
            let touches = e.src == End::Slot(slot) || e.tgt == End::Slot(slot);
            match (touches, self.value(e.src), self.value(e.tgt)) {
                (true, Some(s), Some(t)) => self.edge_holds(s, t, e.labels),
                _ => true,
            }
        })
    }

    fn search<F>(&mut self, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Option<usize>]) -> ControlFlow<()>,
    {
        let Some(slot) = self.pick() else {
            return visit(&self.values);
        };
        for value in self.candidates(slot) {
            self.values[slot] = Some(value);
            if self.consistent(slot, value) {
                self.search(visit)?;
            }
        }
        self.values[slot] = None;
        ControlFlow::Continue(())
    }
}

fn resolve(end: &VarRef, slots: &mut Vec<Slot<'_>>, named: &[&str], fixed: &dyn Fn(&str) -> Option<usize>) -> End {
    match end {
        VarRef::Wildcard => {
            slots.push(Slot {
                tests: Vec::new(),
                wildcard: true,
            });
            End::Slot(slots.len() - 1)
        }
        VarRef::Named(name) => match named.iter().position(|v| v == name) {
            Some(i) => End::Slot(i),
            None => End::Fixed(fixed(name).unwrap_or(usize::MAX)),
        },
    }
}

/// Whether some extension of `binding` satisfies `block`.
fn block_satisfiable(
    block: &Block,
    positive_vars: &[&str],
    binding: &[usize],
    sentence: &Sentence,
    children: &[Vec<usize>],
) -> bool {
    let fixed = |name: &str| -> Option<usize> {
        positive_vars.iter().position(|v| *v == name).map(|i| binding[i])
    };
    let new_vars: Vec<&str> = block
        .nodes
        .iter()
        .map(|n| n.var.as_str())
        .filter(|v| fixed(v).is_none())
        .collect();
    // Tests on already-bound variables are checked directly.
    for node in &block.nodes {
        if let Some(id) = fixed(&node.var) {
            let Some(word) = sentence.word(id) else {
                return false;
            };
            if !node.tests.iter().all(|t| t.holds(word)) {
                return false;
            }
        }
    }
    let mut slots: Vec<Slot> = new_vars
        .iter()
        .map(|v| Slot {
            tests: block
                .nodes
                .iter()
                .filter(|n| n.var == *v)
                .flat_map(|n| n.tests.iter())
                .collect(),
            wildcard: false,
        })
        .collect();
    let mut edges = Vec::new();
    for e in &block.edges {
        let src = resolve(&e.src, &mut slots, &new_vars, &fixed);
        let tgt = resolve(&e.tgt, &mut slots, &new_vars, &fixed);
        edges.push(Edge {
            src,
            tgt,
            labels: &e.labels,
        });
    }
    let mut solver = Solver {
        sentence,
        children,
        values: vec![None; slots.len()],
        slots,
        edges,
    };
    // Edges between two fixed ends are never visited by the search.
    let fixed_ok = solver.edges.iter().all(|e| match (e.src, e.tgt) {
        (End::Fixed(s), End::Fixed(t)) => solver.edge_holds(s, t, e.labels),
        _ => true,
    });
    fixed_ok && solver.search(&mut |_| ControlFlow::Break(())).is_break()
}

/// Every match of `pattern` in `sentence`, ordered by binding tuple.
pub fn find_matches(pattern: &Pattern, sentence: &Sentence) -> Vec<Match> {
    let children = sentence.children();
    let vars: Vec<&str> = pattern.positive_vars().collect();
    let slots = pattern
        .positive
        .nodes
        .iter()
        .map(|n| Slot {
            tests: n.tests.iter().collect(),
            wildcard: false,
        })
        .collect();
    let edges = pattern
        .positive
        .edges
        .iter()
        .filter_map(|e| {
            let idx = |r: &VarRef| r.name().and_then(|n| vars.iter().position(|v| *v == n));
            Some(Edge {
                src: End::Slot(idx(&e.src)?),
                tgt: End::Slot(idx(&e.tgt)?),
                labels: &e.labels,
            })
        })
        .collect();
    let mut solver = Solver {
        sentence,
        children: &children,
        values: vec![None; vars.len()],
        slots,
        edges,
    };
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let _ = solver.search(&mut |values| {
        let binding: Vec<usize> = values.iter().map(|v| v.unwrap_or(0)).collect();
        let rejected = pattern
            .withouts
            .iter()
            .any(|w| block_satisfiable(w, &vars, &binding, sentence, &children));
        if !rejected {
            tuples.push(binding);
        }
        ControlFlow::Continue(())
    });
    tuples.sort();
    tuples.dedup();
    tuples
        .into_iter()
        .map(|t| Match {
            bindings: vars.iter().map(|v| v.to_string()).zip(t).collect(),
        })
        .collect()
}

/// Match counts per sentence, in corpus order, labelled by sentence.
pub fn count_matches(pattern: &Pattern, corpus: &Corpus) -> Vec<(String, usize)> {
    corpus
        .sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| (sentence_label(s, i), find_matches(pattern, s).len()))
        .collect()
}

/// Variables referenced anywhere in the pattern (positive and without blocks).
pub fn all_vars(pattern: &Pattern) -> HashSet<&str> {
    std::iter::once(&pattern.positive)
        .chain(&pattern.withouts)
        .flat_map(|b| b.nodes.iter().map(|n| n.var.as_str()))
        .collect()
}
