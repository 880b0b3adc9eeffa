//! `treelint`: validate, query, convert, score and profile CoNLL-U treebanks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use treelint_core::agree;
use treelint_core::conllu::{self, Corpus, ParseMode};
use treelint_core::convert::{self, ConvertOptions, CliticLexicon, Direction};
use treelint_core::pattern::{self, parse_pattern};
use treelint_core::score::{self, ScoreConfig};
use treelint_core::stats::{self, DomainMap, Key, LengthUnit};
use treelint_core::validate::{self, Ruleset};

#[derive(Parser)]
#[command(name = "treelint", version, about = "Treebank validation and evaluation toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Worker threads for per-sentence work (default: all cores).
    #[arg(long, short = 'j', global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    #[value(alias = "table")]
    Human,
    Tsv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a ruleset over a corpus. Exits 1 when any error-level finding remains.
    Validate(ValidateArgs),
    /// Check each rule against its own pass/fail examples.
    Selftest(RulesArg),
    /// Print all matches of a pattern.
    Query(QueryArgs),
    /// Convert between legacy and concatenative multiword tokens, or print BIES tags.
    Convert(ConvertArgs),
    /// Score a system file against gold with the CoNLL 2018 metrics.
    Score { gold: PathBuf, system: PathBuf },
    /// Inter-annotator agreement between two annotations of the same text.
    Iaa(IaaArgs),
    /// Corpus profile: domains, lengths, POS, and vocabulary comparison.
    Stats(StatsArgs),
}

#[derive(Args)]
struct RulesArg {
    /// Ruleset file.
    #[arg(long, env = "TREELINT_RULES")]
    rules: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    rules: RulesArg,
    /// Warning dismissals (sent_id, rule, bindings, note; tab separated).
    #[arg(long)]
    dismissals: Option<PathBuf>,
    /// Sidecar of sentences last recorded as passing, with the ruleset digest.
    #[arg(long)]
    pass_state: Option<PathBuf>,
    /// Record passing sentences into --pass-state.
    #[arg(long, requires = "pass_state")]
    record_pass: bool,
    /// Undismissed warnings also fail the run.
    #[arg(long)]
    strict_warnings: bool,
    corpus: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Pattern text, e.g. 'pattern { V[upos=VERB] } without { V -[nsubj]-> S }'.
    #[arg(long, short = 'p', conflicts_with = "pattern_file", required_unless_present = "pattern_file")]
    pattern: Option<String>,
    #[arg(long)]
    pattern_file: Option<PathBuf>,
    corpus: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    OldToNew,
    NewToOld,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long, value_enum, required_unless_present = "bies")]
    direction: Option<DirectionArg>,
    /// Print B/I/E/S segmentation tags instead of converting.
    #[arg(long, conflicts_with = "direction")]
    bies: bool,
    /// Clitic lexicon (clitic, independent, Person, Gender, Number).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Lemma taking mark:q in the legacy scheme (repeatable; default האם).
    #[arg(long = "question-lemma")]
    question_lemmas: Vec<String>,
    /// Write the converted corpus here instead of standard output.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    corpus: PathBuf,
}

#[derive(Args)]
struct IaaArgs {
    a: PathBuf,
    b: PathBuf,
    /// Audit disagreements with this ruleset.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Show per-feature rows with more than this many disagreements.
    #[arg(long, default_value_t = 10)]
    min_disagreements: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum KeyArg {
    Form,
    Lemma,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Words,
    Tokens,
}

#[derive(Args)]
struct StatsArgs {
    corpus: PathBuf,
    /// Second corpus for frequency ratios and vocabulary overlap.
    #[arg(long)]
    compare: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = KeyArg::Form)]
    key: KeyArg,
    /// Tab-separated newdoc_id and domain; default is the newdoc id prefix.
    #[arg(long)]
    domains: Option<PathBuf>,
    /// Rows per ratio list.
    #[arg(long, default_value_t = 20)]
    top: usize,
    #[arg(long, value_enum, default_value_t = UnitArg::Words)]
    length_unit: UnitArg,
}

/// Exit status 1: the run completed but the input failed a check.
/// Exit status 2: usage, I/O or format errors.
enum Failure {
    Check(String),
    Input(String),
}

type Outcome = Result<bool, Failure>;

fn input(msg: impl std::fmt::Display) -> Failure {
    Failure::Input(msg.to_string())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| input(format!("<stdin>: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn read_corpus(path: &Path) -> Result<Corpus, Failure> {
    let text = read_text(path)?;
    conllu::read_corpus(text.as_bytes(), ParseMode::Strict)
        .map(|(c, _)| c)
        .map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_rules(path: &Path) -> Result<Ruleset, Failure> {
    validate::load_ruleset_file(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("treelint: {e}");
            return ExitCode::from(2);
        }
    }
    let mut out = String::new();
    let result = run(&cli, &mut out);
    let mut stdout = io::stdout().lock();
    if let Err(e) = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("treelint: {e}");
            return ExitCode::from(2);
        }
    }
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("treelint: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("treelint: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, out: &mut String) -> Outcome {
    let f = cli.format;
    match &cli.command {
        Command::Validate(a) => run_validate(a, f, out),
        Command::Selftest(a) => run_selftest(a, f, out),
        Command::Query(a) => run_query(a, f, out),
        Command::Convert(a) => run_convert(a, f, out),
        Command::Score { gold, system } => run_score(gold, system, f, out),
        Command::Iaa(a) => run_iaa(a, f, out),
        Command::Stats(a) => run_stats(a, f, out),
    }
}

fn run_validate(a: &ValidateArgs, f: Format, out: &mut String) -> Outcome {
    let rules = load_rules(&a.rules.rules)?;
    let corpus = read_corpus(&a.corpus)?;
    let dismissals = match &a.dismissals {
        Some(p) => validate::parse_dismissals(&read_text(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?,
        None => Vec::new(),
    };
    let mut state = match &a.pass_state {
        Some(p) if p.exists() => {
            validate::parse_pass_state(&read_text(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?
        }
        _ => BTreeMap::new(),
    };
    let report = validate::validate_corpus(&corpus, &rules, &dismissals);
    let stale = validate::scan_stale(&corpus, &rules, &dismissals, &state);

    match f {
        Format::Human => {
            out.push_str(&validate::render_human(&report));
            for id in &stale {
                let _ = writeln!(out, "stale: {id} passed under an earlier ruleset and now has findings");
            }
        }
        Format::Tsv => {
            out.push_str("sent_id\tlevel\trule\tbindings\tdismissed\tmessage\n");
            for x in report.findings() {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    x.sent_id,
                    x.level,
                    x.rule,
                    x.signature(),
                    x.dismissed,
                    x.message
                );
            }
            for id in &stale {
                let _ = writeln!(out, "{id}\tstale\t_\t_\tfalse\tpassed under an earlier ruleset");
            }
        }
        Format::Json => {
            out.push_str(&validate::render_json(&report));
            for id in &stale {
                let _ = writeln!(out, "{}", serde_json::json!({"kind": "stale", "sent_id": id}));
            }
        }
    }

    if a.record_pass {
        let path = a.pass_state.as_ref().expect("clap enforces --pass-state");
        validate::record_passes(&mut state, &report);
        fs::write(path, validate::write_pass_state(&state)).map_err(|e| input(format!("{}: {e}", path.display())))?;
    }
    let ok = if a.strict_warnings {
        validate::check_final(&report)
    } else {
        report.error_count() == 0
    };
    Ok(ok)
}

fn run_selftest(a: &RulesArg, f: Format, out: &mut String) -> Outcome {
    let rules = load_rules(&a.rules)?;
    let results = validate::selftest_ruleset(&rules);
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        match f {
            Format::Human => {
                let notice = r.notice.as_ref().map(|n| format!(" ({n})")).unwrap_or_default();
                let _ = writeln!(out, "{status} {}{notice}", r.rule);
                for fail in &r.failures {
                    let _ = writeln!(out, "  {fail}");
                }
            }
            Format::Tsv => {
                let _ = writeln!(out, "{}\t{status}\t{}", r.rule, r.failures.join("; "));
            }
            Format::Json => {
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::json!({"rule": r.rule, "passed": r.passed, "notice": r.notice, "failures": r.failures})
                );
            }
        }
    }
    if f == Format::Human {
        let failed = results.iter().filter(|r| !r.passed).count();
        let _ = writeln!(out, "{} rules, {} failed; ruleset {}", results.len(), failed, rules.version_hash);
    }
    Ok(results.iter().all(|r| r.passed))
}

fn run_query(a: &QueryArgs, f: Format, out: &mut String) -> Outcome {
    let text = match (&a.pattern, &a.pattern_file) {
        (Some(p), _) => p.clone(),
        (None, Some(path)) => read_text(path)?,
        (None, None) => unreachable!("clap requires one of --pattern/--pattern-file"),
    };
    let pat = parse_pattern(&text).map_err(|e| input(format!("pattern: {e}")))?;
    let corpus = read_corpus(&a.corpus)?;
    use rayon::prelude::*;
    let per_sentence: Vec<Vec<pattern::Match>> = corpus
        .sentences
        .par_iter()
        .map(|s| pattern::find_matches(&pat, s))
        .collect();
    let mut total = 0;
    if f == Format::Tsv {
        out.push_str("sent_id\tbindings\n");
    }
    for (i, (s, matches)) in corpus.sentences.iter().zip(&per_sentence).enumerate() {
        let label = corpus.sentence_label(i);
        for m in matches {
            total += 1;
            match f {
                Format::Human => {
                    let words: Vec<String> = m
                        .bindings
                        .iter()
                        .map(|(v, id)| format!("{v}={id}:{}", s.word(*id).map_or("", |w| w.form.as_str())))
                        .collect();
                    let _ = writeln!(out, "{label}\t{}", words.join(" "));
                }
                Format::Tsv => {
                    let _ = writeln!(out, "{label}\t{}", m.signature());
                }
                Format::Json => {
                    let bindings: serde_json::Map<String, serde_json::Value> =
                        m.bindings.iter().map(|(v, id)| (v.clone(), (*id).into())).collect();
                    let _ = writeln!(out, "{}", serde_json::json!({"sent_id": label, "bindings": bindings}));
                }
            }
        }
    }
    if f == Format::Human {
        let _ = writeln!(out, "{total} matches in {} sentences", per_sentence.iter().filter(|m| !m.is_empty()).count());
    }
    Ok(true)
}

fn run_convert(a: &ConvertArgs, f: Format, out: &mut String) -> Outcome {
    let corpus = read_corpus(&a.corpus)?;
    if a.bies {
        if f == Format::Tsv {
            out.push_str("sent_id\tid\tform\ttag\n");
        }
        for (i, s) in corpus.sentences.iter().enumerate() {
            let label = corpus.sentence_label(i);
            let tags = convert::bies_tags(s);
            match f {
                Format::Human => {
                    let line: Vec<String> = tags
                        .iter()
                        .map(|(id, t)| format!("{}/{t}", s.word(*id).map_or("", |w| w.form.as_str())))
                        .collect();
                    let _ = writeln!(out, "{label}\t{}", line.join(" "));
                }
                Format::Tsv => {
                    for (id, t) in &tags {
                        let form = s.word(*id).map_or("", |w| w.form.as_str());
                        let _ = writeln!(out, "{label}\t{id}\t{form}\t{t}");
                    }
                }
                Format::Json => {
                    for (id, t) in &tags {
                        let form = s.word(*id).map_or("", |w| w.form.as_str());
                        let _ = writeln!(
                            out,
                            "{}",
                            serde_json::json!({"sent_id": label, "id": id, "form": form, "tag": t.to_string()})
                        );
                    }
                }
            }
        }
        return Ok(true);
    }

    let mut opts = ConvertOptions::default();
    if let Some(p) = &a.lexicon {
        opts.lexicon = CliticLexicon::parse(&read_text(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?;
    }
    if !a.question_lemmas.is_empty() {
        opts.question_lemmas = a.question_lemmas.iter().cloned().collect();
    }
    let direction = match a.direction.expect("clap requires --direction without --bies") {
        DirectionArg::OldToNew => Direction::OldToNew,
        DirectionArg::NewToOld => Direction::NewToOld,
    };
    let result = convert::convert_corpus(&corpus, direction, &opts);
    for (label, note) in &result.notes {
        eprintln!("note: {label}: {note}");
    }
    for (label, err) in &result.errors {
        eprintln!("error: {label}: {err}");
    }
    let text = conllu::serialize(&result.corpus);
    match &a.output {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display())))?,
        None => out.push_str(&text),
    }
    if !result.errors.is_empty() {
        return Err(Failure::Check(format!(
            "{} sentence(s) could not be converted and were copied unchanged",
            result.errors.len()
        )));
    }
    Ok(true)
}

fn run_score(gold: &Path, system: &Path, f: Format, out: &mut String) -> Outcome {
    let (g, s) = (read_corpus(gold)?, read_corpus(system)?);
    let report = score::score(&g, &s, &ScoreConfig::conll18()).map_err(|e| Failure::Check(e.to_string()))?;
    out.push_str(&match f {
        Format::Human => score::render_table(&report),
        Format::Tsv => score::render_tsv(&report),
        Format::Json => score::render_json(&report),
    });
    Ok(true)
}

fn run_iaa(a: &IaaArgs, f: Format, out: &mut String) -> Outcome {
    let (ca, cb) = (read_corpus(&a.a)?, read_corpus(&a.b)?);
    let report = agree::iaa(&ca, &cb).map_err(|e| Failure::Check(e.to_string()))?;
    let audit = match &a.rules {
        Some(p) => {
            let rules = load_rules(p)?;
            Some(agree::audit_disagreements(&ca, &cb, &rules).map_err(|e| Failure::Check(e.to_string()))?)
        }
        None => None,
    };
    let min = a.min_disagreements;
    out.push_str(&match f {
        Format::Human => agree::render_human(&report, min, audit.as_ref()),
        Format::Tsv => agree::render_tsv(&report, min, audit.as_ref()),
        Format::Json => agree::render_json(&report, min, audit.as_ref()),
    });
    Ok(true)
}

fn run_stats(a: &StatsArgs, f: Format, out: &mut String) -> Outcome {
    let corpus = read_corpus(&a.corpus)?;
    let map = match &a.domains {
        Some(p) => DomainMap::parse_manifest(&read_text(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?,
        None => DomainMap::Prefix,
    };
    let has_docs = a.domains.is_some() || corpus.sentences.iter().any(|s| s.newdoc_id().is_some());
    let domains = if has_docs {
        Some(stats::corpus_stats(&corpus, &map).map_err(|e| Failure::Check(e.to_string()))?)
    } else {
        None
    };
    let unit = match a.length_unit {
        UnitArg::Words => LengthUnit::Words,
        UnitArg::Tokens => LengthUnit::Tokens,
    };
    let lengths = stats::length_stats_by(&corpus, unit).ok();
    let pos = stats::pos_distribution(&corpus);
    let key = match a.key {
        KeyArg::Form => Key::Form,
        KeyArg::Lemma => Key::Lemma,
    };
    let other = a.compare.as_deref().map(read_corpus).transpose()?;
    let name = |p: &Path| p.file_stem().map_or("-".into(), |s| s.to_string_lossy().into_owned());
    let (label_a, label_b) = (name(&a.corpus), a.compare.as_deref().map(name).unwrap_or_default());
    let unit_name = match unit {
        LengthUnit::Words => "words",
        LengthUnit::Tokens => "tokens",
    };

    match f {
        Format::Human => {
            match &domains {
                Some(d) => out.push_str(&stats::render_domains(d)),
                None => {
                    let _ = writeln!(out, "sentences {}, tokens {}", corpus.sentences.len(), corpus.word_count());
                }
            }
            if let Some((m, sd)) = lengths {
                let _ = writeln!(out, "\nsentence length ({unit_name}): M = {m:.2}, SD = {sd:.2}");
            }
            let total: usize = pos.values().sum();
            let _ = writeln!(out, "\n{:<8} {:>8} {:>7}", "UPOS", "count", "%");
            for (tag, n) in &pos {
                let _ = writeln!(out, "{tag:<8} {n:>8} {:>7.2}", 100.0 * *n as f64 / total.max(1) as f64);
            }
            if let Some(b) = &other {
                let o = stats::vocab_overlap(&corpus, b, key);
                let _ = writeln!(
                    out,
                    "\nvocabulary: {label_a} {}, {label_b} {}, only {label_a} {}, only {label_b} {}, shared {}",
                    o.a, o.b, o.a_only, o.b_only, o.both
                );
                out.push('\n');
                out.push_str(&stats::render_ratios(&stats::freq_ratio(&corpus, b, key), a.top, &label_a, &label_b));
            }
        }
        Format::Tsv => {
            out.push_str("section\tlabel\tvalue1\tvalue2\tvalue3\n");
            if let Some(d) = &domains {
                for row in d.domains.iter().chain([&d.total]) {
                    let _ = writeln!(out, "domain\t{}\t{}\t{}\t{}", row.domain, row.documents, row.tokens, row.sentences);
                }
            }
            if let Some((m, sd)) = lengths {
                let _ = writeln!(out, "length\t{unit_name}\t{m:.4}\t{sd:.4}\t_");
            }
            for (tag, n) in &pos {
                let _ = writeln!(out, "pos\t{tag}\t{n}\t_\t_");
            }
            if let Some(b) = &other {
                let o = stats::vocab_overlap(&corpus, b, key);
                let _ = writeln!(out, "overlap\tsizes\t{}\t{}\t{}", o.a, o.b, o.both);
                let lists = stats::freq_ratio(&corpus, b, key);
                for (section, list) in [("ratio_a", &lists.a_over), ("ratio_b", &lists.b_over)] {
                    for e in list.iter().take(a.top) {
                        let _ = writeln!(out, "{section}\t{}\t{}\t{}\t{}", e.item, e.count_a, e.count_b, e.ratio_text());
                    }
                }
            }
        }
        Format::Json => {
            let mut lines = Vec::new();
            if let Some(d) = &domains {
                for row in d.domains.iter().chain([&d.total]) {
                    lines.push(serde_json::json!({"kind": "domain", "domain": row.domain, "documents": row.documents, "tokens": row.tokens, "sentences": row.sentences}));
                }
            }
            if let Some((m, sd)) = lengths {
                lines.push(serde_json::json!({"kind": "length", "unit": unit_name, "mean": m, "sd": sd}));
            }
            for (tag, n) in &pos {
                lines.push(serde_json::json!({"kind": "pos", "upos": tag, "count": n}));
            }
            if let Some(b) = &other {
                let o = stats::vocab_overlap(&corpus, b, key);
                lines.push(serde_json::json!({"kind": "overlap", "a": o.a, "b": o.b, "a_only": o.a_only, "b_only": o.b_only, "both": o.both}));
                let lists = stats::freq_ratio(&corpus, b, key);
                for (side, list) in [("a", &lists.a_over), ("b", &lists.b_over)] {
                    for e in list.iter().take(a.top) {
                        let mut v = e.to_json();
                        v["kind"] = "ratio".into();
                        v["over"] = side.into();
                        lines.push(v);
                    }
                }
            }
            for l in lines {
                let _ = writeln!(out, "{l}");
            }
        }
    }
    Ok(true)
}
