//! Linter-style command line front end for the checking engine.
//!
//! Subcommands:
//! * `check` — report grammar errors and style weaknesses in a document,
//!   with exit status 0 (clean), 1 (weaknesses only), 2 (errors) or 3
//!   (operational failure).
//! * `inject` — turn a clean corpus into (original, mutated, expected code)
//!   pairs for regression testing, one seeded mutation per sentence.
//! * `lexicon-validate` — check a dictionary file's internal consistency.
//!
//! Resource files default to the built-in set; the `LINCE_RESOURCES`
//! environment variable names a directory with `lexicon.tsv`,
//! `grammar.rules` and `messages.tsv`, and the `--lexicon`, `--grammar` and
//! `--messages` flags override both.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lince_core::diagnose::Messages;
use lince_core::grammar::{CheckConfig, Grammar, StyleThresholds, Sublanguage};
use lince_core::inject::{inject_document_of_kind, SiteKind};
use lince_core::lexicon::Lexicon;
use lince_core::pipeline::{Checker, DocumentReport, Record, RecordSeverity, Resources};

const OPERATIONAL_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "lince",
    version,
    about = "Grammar and style checker for Spanish",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a document and report findings.
    Check(CheckArgs),
    /// Mutate a clean corpus into (original, mutated, expected-code) pairs.
    Inject(InjectArgs),
    /// Validate a dictionary file and report violations.
    LexiconValidate(LexiconValidateArgs),
}

#[derive(Args)]
struct ResourceArgs {
    /// Dictionary file (overrides LINCE_RESOURCES and the built-in one).
    #[arg(long, value_name = "PATH")]
    lexicon: Option<PathBuf>,
    /// Grammar rule file (overrides LINCE_RESOURCES and the built-in one).
    #[arg(long, value_name = "PATH")]
    grammar: Option<PathBuf>,
    /// Message catalog (overrides LINCE_RESOURCES and the built-in one).
    #[arg(long, value_name = "PATH")]
    messages: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Findings grouped per sentence, corrections inline.
    Human,
    /// One tab-separated record per finding.
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SublanguageArg {
    Standard,
    Administrative,
}

impl From<SublanguageArg> for Sublanguage {
    fn from(arg: SublanguageArg) -> Sublanguage {
        match arg {
            SublanguageArg::Standard => Sublanguage::Standard,
            SublanguageArg::Administrative => Sublanguage::Administrative,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Inflection-cell flips (gender or number).
    Agreement,
    /// Argument-introducer swaps (prepositions, personal "a").
    Marker,
}

impl From<KindArg> for SiteKind {
    fn from(arg: KindArg) -> SiteKind {
        match arg {
            KindArg::Agreement => SiteKind::Agreement,
            KindArg::Marker => SiteKind::Marker,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Input file; absent or `-` reads standard input.
    input: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Suppress correction proposals.
    #[arg(long)]
    no_corrections: bool,
    /// Sublanguage profile to check against.
    #[arg(long, value_enum, default_value_t = SublanguageArg::Standard)]
    sublanguage: SublanguageArg,
    /// Per-sentence style limits: passive,gerund,adverb counts.
    #[arg(long, value_name = "P,G,A", value_parser = parse_thresholds)]
    style_thresholds: Option<StyleThresholds>,
    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Args)]
struct InjectArgs {
    /// Clean corpus file.
    corpus: PathBuf,
    /// Generator seed; a fixed seed gives byte-identical output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict mutations to one family.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Write the pairs here instead of standard output.
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Sublanguage profile used to parse the corpus.
    #[arg(long, value_enum, default_value_t = SublanguageArg::Standard)]
    sublanguage: SublanguageArg,
    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Args)]
struct LexiconValidateArgs {
    /// Dictionary file to validate.
    path: PathBuf,
}

fn parse_thresholds(s: &str) -> Result<StyleThresholds, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Check(args) => run_check(args),
        Command::Inject(args) => run_inject(args),
        Command::LexiconValidate(args) => run_validate(args),
    };
    ExitCode::from(status)
}

/// Flag > resource directory from the environment > built-in.
fn resource_path(flag: &Option<PathBuf>, env_dir: &Option<PathBuf>, name: &str) -> Option<PathBuf> {
    flag.clone()
        .or_else(|| env_dir.as_ref().map(|dir| dir.join(name)))
}

fn load_resources(args: &ResourceArgs) -> Result<Resources, String> {
    let env_dir = std::env::var_os("LINCE_RESOURCES").map(PathBuf::from);
    let mut resources = Resources::builtin();
    if let Some(path) = resource_path(&args.lexicon, &env_dir, "lexicon.tsv") {
        resources.lexicon = Lexicon::load(&path)
            .map_err(|e| format!("cannot load dictionary {}: {e}", path.display()))?;
    }
    if let Some(path) = resource_path(&args.grammar, &env_dir, "grammar.rules") {
        resources.grammar = Grammar::load(&path)
            .map_err(|e| format!("cannot load grammar {}: {e}", path.display()))?;
    }
    if let Some(path) = resource_path(&args.messages, &env_dir, "messages.tsv") {
        resources.messages = Messages::load(&path)
            .map_err(|e| format!("cannot load message catalog {}: {e}", path.display()))?;
    }
    Ok(resources)
}

fn read_input(input: &Option<PathBuf>) -> Result<String, String> {
    match input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display())),
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| format!("cannot read standard input: {e}"))?;
            Ok(text)
        }
    }
}

fn operational(message: String) -> u8 {
    eprintln!("lince: {message}");
    OPERATIONAL_FAILURE
}

fn run_check(args: CheckArgs) -> u8 {
    let resources = match load_resources(&args.resources) {
        Ok(resources) => resources,
        Err(message) => return operational(message),
    };
    let input = match read_input(&args.input) {
        Ok(text) => text,
        Err(message) => return operational(message),
    };
    let config = CheckConfig {
        sublanguage: args.sublanguage.into(),
        style_thresholds: args.style_thresholds.unwrap_or_default(),
    };
    let checker = Checker::new(&resources, config);
    let report = match checker.check_document(&input) {
        Ok(report) => report,
        Err(e) => return operational(format!("analysis failed: {e}")),
    };
    match args.format {
        Format::Records => print_records(&report, args.no_corrections),
        Format::Human => print_human(&report, args.no_corrections),
    }
    report.exit_code()
}

fn print_records(report: &DocumentReport, no_corrections: bool) {
    for record in &report.records {
        if no_corrections {
            let mut bare = record.clone();
            bare.corrections.clear();
            println!("{}", bare.to_tsv());
        } else {
            println!("{}", record.to_tsv());
        }
    }
}

fn print_human(report: &DocumentReport, no_corrections: bool) {
    if report.records.is_empty() {
        println!("no findings");
        return;
    }
    for sentence in &report.sentences {
        let records: Vec<&Record> = report
            .records
            .iter()
            .filter(|r| r.sentence_index == sentence.index)
            .collect();
        if records.is_empty() {
            continue;
        }
        println!("sentence {}: {}", sentence.index + 1, sentence.text.trim());
        for record in records {
            println!(
                "  {} {} [chars {}-{}]: {}",
                record.severity.as_str(),
                record.code,
                record.start,
                record.end,
                record.message
            );
            if !record.fragment.is_empty() {
                println!("    fragment: {}", record.fragment);
            }
            if !no_corrections && !record.corrections.is_empty() {
                println!("    suggest: {}", record.corrections.join(" | "));
            }
        }
    }
    let errors = count(report, RecordSeverity::Error);
    let weaknesses = count(report, RecordSeverity::Weakness);
    let notices = count(report, RecordSeverity::Notice);
    println!("{errors} error(s), {weaknesses} weakness(es), {notices} notice(s)");
}

fn count(report: &DocumentReport, severity: RecordSeverity) -> usize {
    report
        .records
        .iter()
        .filter(|r| r.severity == severity)
        .count()
}

fn run_inject(args: InjectArgs) -> u8 {
    let resources = match load_resources(&args.resources) {
        Ok(resources) => resources,
        Err(message) => return operational(message),
    };
    let corpus = match std::fs::read_to_string(&args.corpus) {
        Ok(text) => text,
        Err(e) => return operational(format!("cannot read {}: {e}", args.corpus.display())),
    };
    let config = CheckConfig {
        sublanguage: args.sublanguage.into(),
        ..CheckConfig::default()
    };
    let checker = Checker::new(&resources, config);
    let report = match inject_document_of_kind(&checker, &corpus, args.seed, args.kind.map(Into::into)) {
        Ok(report) => report,
        Err(e) => return operational(format!("injection failed: {e}")),
    };
    for (index, reason) in &report.skipped {
        eprintln!("lince: sentence {}: skipped — {reason}", index + 1);
    }
    let pairs = report.to_tsv();
    match &args.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, pairs) {
                return operational(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{pairs}"),
    }
    0
}

fn run_validate(args: LexiconValidateArgs) -> u8 {
    let lexicon = match Lexicon::load(&args.path) {
        Ok(lexicon) => lexicon,
        Err(e) => return operational(format!("cannot load dictionary {}: {e}", args.path.display())),
    };
    let violations = lexicon.validate();
    if violations.is_empty() {
        println!("{}: ok ({} records)", args.path.display(), lexicon.len());
        0
    } else {
        for violation in &violations {
            println!("{violation}");
        }
        eprintln!(
            "lince: {}: {} violation(s)",
            args.path.display(),
            violations.len()
        );
        1
    }
}
