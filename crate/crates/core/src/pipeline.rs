//! Document-level checking: resource loading, per-sentence analysis,
//! parse-independent style scans, and assembly of the report records.
//!
//! A document is split into sentences; each sentence is parsed and its parse
//! tree carries the grammar diagnoses.  Findings that need no parse — flagged
//! vocabulary, uncontracted `de el` / `a el`, over-use counts for passives,
//! gerunds and `-mente` adverbs — come from a token scan so they survive even
//! when the sentence is out of coverage.  Every finding becomes one report
//! record; a sentence with no analysis additionally gets an `UNPARSED` notice.

use std::path::Path;
use std::sync::Arc;

use crate::correct::{self, Correction};
use crate::diagnose::{self, DiagCode, Diagnosis, Messages, MessagesError, Severity};
use crate::fstruct::{Span, VForm};
use crate::grammar::{CheckConfig, Grammar, GrammarError};
use crate::lexicon::{Lexicon, LexiconError, StyleFlag};
use crate::parser::{
    sentences, tree_diagnoses, ParseError, Parser, SentenceAnalysis, SentenceTokens,
};

/// The three data files the checker runs on.
#[derive(Debug)]
pub struct Resources {
    pub lexicon: Lexicon,
    pub grammar: Grammar,
    pub messages: Messages,
}

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Messages(#[from] MessagesError),
}

impl Resources {
    /// The dictionary, rule file and message catalog shipped in the binary.
    pub fn builtin() -> Resources {
        Resources {
            lexicon: Lexicon::parse(include_str!("../resources/lexicon.tsv"))
                .expect("the shipped lexicon is well formed"),
            grammar: Grammar::builtin(),
            messages: Messages::parse(include_str!("../resources/messages.tsv"))
                .expect("the shipped message catalog is well formed"),
        }
    }

    pub fn load(lexicon: &Path, grammar: &Path, messages: &Path) -> Result<Resources, ResourceError> {
        Ok(Resources {
            lexicon: Lexicon::load(lexicon)?,
            grammar: Grammar::load(grammar)?,
            messages: Messages::load(messages)?,
        })
    }
}

/// Row severity: diagnosis severities plus the notice level used for
/// unparsed-sentence rows (notices never affect the exit status).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordSeverity {
    Error,
    Weakness,
    Notice,
}

impl RecordSeverity {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordSeverity::Error => "error",
            RecordSeverity::Weakness => "weakness",
            RecordSeverity::Notice => "notice",
        }
    }
}

impl From<Severity> for RecordSeverity {
    fn from(s: Severity) -> Self {
        match s {
            Severity::Error => RecordSeverity::Error,
            Severity::Weakness => RecordSeverity::Weakness,
        }
    }
}

/// One machine-readable report row.  Offsets count characters in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub sentence_index: usize,
    pub start: usize,
    pub end: usize,
    pub code: String,
    pub severity: RecordSeverity,
    pub fragment: String,
    pub corrections: Vec<String>,
    pub message: String,
}

impl Record {
    /// The documented tab-separated row: sentence_index, start, end, code,
    /// severity, original fragment, corrections joined by `|`, message.
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.sentence_index,
            self.start,
            self.end,
            self.code,
            self.severity.as_str(),
            self.fragment,
            self.corrections.join("|"),
            self.message,
        )
    }
}

/// Everything the checker learned about one sentence.
#[derive(Debug)]
pub struct SentenceReport {
    pub index: usize,
    /// Byte span of the sentence in the document, punctuation included.
    pub span: Span,
    /// The original sentence text.
    pub text: String,
    pub terminal_punctuation: String,
    pub analysis: SentenceAnalysis,
    /// All findings, parse-borne and scanned, sorted by (start, code).
    pub diagnoses: Vec<Diagnosis>,
    pub corrections: Vec<Correction>,
}

#[derive(Debug)]
pub struct DocumentReport {
    pub sentences: Vec<SentenceReport>,
    pub records: Vec<Record>,
}

impl DocumentReport {
    /// Exit status contribution: 2 when any error was found, 1 when only
    /// weaknesses, 0 when clean.  Notices do not count.
    pub fn exit_code(&self) -> u8 {
        let mut worst = 0u8;
        for r in &self.records {
            match r.severity {
                RecordSeverity::Error => worst = worst.max(2),
                RecordSeverity::Weakness => worst = worst.max(1),
                RecordSeverity::Notice => {}
            }
        }
        worst
    }
}

/// A configured checker bound to its resources.
pub struct Checker<'a> {
    resources: &'a Resources,
    config: CheckConfig,
    parser: Parser<'a>,
}

impl<'a> Checker<'a> {
    pub fn new(resources: &'a Resources, config: CheckConfig) -> Checker<'a> {
        Checker {
            parser: Parser::new(&resources.lexicon, &resources.grammar, &config),
            resources,
            config,
        }
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        &self.resources.lexicon
    }

    pub fn parser(&self) -> &Parser<'a> {
        &self.parser
    }

    /// Check a whole document.  `Err` means an operational failure (a
    /// grammar/dictionary inconsistency), not a finding.
    pub fn check_document(&self, text: &str) -> Result<DocumentReport, ParseError> {
        let mut reports = Vec::new();
        for sent in sentences(text) {
            reports.push(self.check_sentence(text, &sent)?);
        }
        let records = assemble_records(text, &reports, &self.resources.messages);
        Ok(DocumentReport {
            sentences: reports,
            records,
        })
    }

    fn check_sentence(
        &self,
        doc: &str,
        sent: &SentenceTokens,
    ) -> Result<SentenceReport, ParseError> {
        let words = sent.words();
        let terminal = sent.terminal_punctuation();
        let analysis = self.parser.parse(&words)?;

        let mut diagnoses: Vec<Diagnosis> = Vec::new();
        let mut corrections: Vec<Correction> = Vec::new();
        match &analysis {
            SentenceAnalysis::Parsed { selected } => {
                diagnoses = tree_diagnoses(selected);
                for scan in self.scans(sent) {
                    let already = diagnoses
                        .iter()
                        .any(|d| d.span == scan.span && d.code == scan.code);
                    if !already {
                        diagnoses.push(scan);
                    }
                }
                corrections =
                    correct::corrections(&self.resources.lexicon, selected, &terminal);
            }
            SentenceAnalysis::UnknownWords { .. } | SentenceAnalysis::NoParse => {
                diagnoses = self.scans(sent);
                // The portmanteau repair is purely textual, so it is still
                // available without a parse.
                if diagnoses.iter().any(|d| d.code == DiagCode::Portmanteau) {
                    let surfaces: Vec<&str> =
                        words.iter().map(|t| t.surface.as_str()).collect();
                    let text = correct::contract_surfaces(&surfaces, &terminal);
                    let span = words
                        .iter()
                        .skip(1)
                        .fold(words[0].span, |acc, w| Span::hull(acc, w.span));
                    corrections.push(Correction {
                        span,
                        text,
                        solution_index: 0,
                        applied: vec![(
                            DiagCode::Portmanteau,
                            "contract the preposition-article pair".to_string(),
                        )],
                    });
                }
            }
            SentenceAnalysis::Empty => {}
        }
        diagnoses.sort_by(|a, b| {
            (a.span.start, a.code.as_str(), a.span.end)
                .cmp(&(b.span.start, b.code.as_str(), b.span.end))
        });

        let span = sent.span();
        Ok(SentenceReport {
            index: sent.index,
            span,
            text: doc[span.start..span.end].to_string(),
            terminal_punctuation: terminal,
            analysis,
            diagnoses,
            corrections,
        })
    }

    /// Parse-independent findings over the raw token stream: flagged
    /// vocabulary, uncontracted portmanteau pairs, and per-sentence over-use
    /// counts of passives, gerunds and manner adverbs.
    fn scans(&self, sent: &SentenceTokens) -> Vec<Diagnosis> {
        let lex = &self.resources.lexicon;
        let mut out = Vec::new();

        for tok in sent.tokens.iter().filter(|t| t.is_word()) {
            let weak = lex
                .lookup(&tok.surface)
                .iter()
                .any(|e| e.style_flag.is_some_and(|f| f.is_lexical_weakness()));
            if weak {
                let mut d = Diagnosis::new(tok.span, DiagCode::StyleLex);
                d.targets = vec![tok.span];
                out.push(d);
            }
        }

        for pair in sent.tokens.windows(2) {
            if let Some(d) = diagnose::check_portmanteau(
                &pair[0].surface,
                pair[0].span,
                &pair[1].surface,
                pair[1].span,
            ) {
                out.push(d);
            }
        }

        let has_flag = |surface: &str, flag: StyleFlag| {
            lex.lookup(surface).iter().any(|e| e.style_flag == Some(flag))
        };
        let is_participle = |surface: &str| {
            lex.lookup(surface).iter().any(|e| e.vform == VForm::Part)
        };

        let mut passive_hits: Vec<Span> = Vec::new();
        for pair in sent.tokens.windows(2) {
            if pair[0].is_word()
                && pair[1].is_word()
                && has_flag(&pair[0].surface, StyleFlag::PassiveAux)
                && is_participle(&pair[1].surface)
            {
                passive_hits.push(Span::hull(pair[0].span, pair[1].span));
            }
        }
        let gerund_hits: Vec<Span> = sent
            .tokens
            .iter()
            .filter(|t| t.is_word() && has_flag(&t.surface, StyleFlag::Gerund))
            .map(|t| t.span)
            .collect();
        let adverb_hits: Vec<Span> = sent
            .tokens
            .iter()
            .filter(|t| t.is_word() && has_flag(&t.surface, StyleFlag::MannerAdverb))
            .map(|t| t.span)
            .collect();

        let thresholds = self.config.style_thresholds;
        let mut abuse = |hits: &[Span], max: usize, code: DiagCode| {
            if hits.len() > max {
                let span = hits.iter().skip(1).fold(hits[0], |acc, s| Span::hull(acc, *s));
                let mut d = Diagnosis::new(span, code);
                d.targets = hits.to_vec();
                out.push(d);
            }
        };
        abuse(&passive_hits, thresholds.passive_max, DiagCode::StyleAbusePassive);
        abuse(&gerund_hits, thresholds.gerund_max, DiagCode::StyleAbuseGerund);
        abuse(&adverb_hits, thresholds.adverb_max, DiagCode::StyleAbuseAdverb);

        out
    }
}

/// Flatten sentence reports into sorted records.
fn assemble_records(doc: &str, reports: &[SentenceReport], messages: &Messages) -> Vec<Record> {
    let mut out = Vec::new();
    for report in reports {
        match &report.analysis {
            SentenceAnalysis::Parsed { .. } => {}
            SentenceAnalysis::UnknownWords { words } => {
                out.push(notice_record(
                    report,
                    format!("sentence skipped: unknown words: {}", words.join(", ")),
                ));
            }
            SentenceAnalysis::NoParse => {
                out.push(notice_record(
                    report,
                    "sentence skipped: no analysis covers it".to_string(),
                ));
            }
            SentenceAnalysis::Empty => continue,
        }
        for diag in &report.diagnoses {
            out.push(diagnosis_record(doc, report, diag, messages));
        }
    }
    out.sort_by(|a, b| {
        (a.sentence_index, a.start, a.code.as_str()).cmp(&(
            b.sentence_index,
            b.start,
            b.code.as_str(),
        ))
    });
    out
}

fn diagnosis_record(
    doc: &str,
    report: &SentenceReport,
    diag: &Diagnosis,
    messages: &Messages,
) -> Record {
    let corrections = if diag.severity() == Severity::Error {
        report.corrections.iter().map(|c| c.text.clone()).collect()
    } else {
        Vec::new()
    };
    Record {
        sentence_index: report.index,
        start: char_offset(doc, diag.span.start),
        end: char_offset(doc, diag.span.end),
        code: diag.code.as_str().to_string(),
        severity: diag.severity().into(),
        fragment: doc[diag.span.start..diag.span.end].to_string(),
        corrections,
        message: messages.text(&diag.message_id),
    }
}

fn notice_record(report: &SentenceReport, message: String) -> Record {
    Record {
        sentence_index: report.index,
        start: 0,
        end: 0,
        code: "UNPARSED".to_string(),
        severity: RecordSeverity::Notice,
        fragment: report.text.clone(),
        corrections: Vec::new(),
        message,
    }
}

/// Character offset of a byte position (spans are byte-based internally; the
/// documented record format counts characters).
fn char_offset(doc: &str, byte: usize) -> usize {
    doc[..byte].chars().count()
}

/// Look up the preferred reading of the first sentence, if any: convenience
/// for tests and the injection harness.
pub fn first_parse(checker: &Checker<'_>, text: &str) -> Option<Arc<crate::fstruct::Sign>> {
    let sents = sentences(text);
    let sent = sents.first()?;
    let words = sent.words();
    match checker.parser().parse(&words).ok()? {
        SentenceAnalysis::Parsed { selected } => Some(selected),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn checker(resources: &Resources) -> Checker<'_> {
        Checker::new(resources, CheckConfig::default())
    }

    #[test]
    fn clean_sentence_yields_no_records() {
        let res = Resources::builtin();
        let report = checker(&res).check_document("La casa es bonita.").unwrap();
        assert!(report.records.is_empty(), "{:#?}", report.records);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn gender_error_yields_record_with_correction() {
        let res = Resources::builtin();
        let report = checker(&res).check_document("el casa").unwrap();
        assert_eq!(report.records.len(), 1);
        let rec = &report.records[0];
        assert_eq!(rec.code, "AGR_GEN");
        assert_eq!(rec.severity, RecordSeverity::Error);
        assert_eq!(rec.fragment, "el casa");
        assert_eq!(rec.corrections, ["la casa"]);
        assert_eq!(report.exit_code(), 2);
    }

    #[test]
    fn latinism_alone_is_a_weakness_exit() {
        let res = Resources::builtin();
        let report = checker(&res).check_document("El ítem es bonito.").unwrap();
        let codes: Vec<&str> = report.records.iter().map(|r| r.code.as_str()).collect();
        assert_eq!(codes, ["STYLE_LEX"]);
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn unparsed_portmanteau_still_gets_textual_correction() {
        let res = Resources::builtin();
        let report = checker(&res).check_document("de el").unwrap();
        let codes: Vec<&str> = report.records.iter().map(|r| r.code.as_str()).collect();
        assert!(codes.contains(&"PORTMANTEAU"), "{codes:?}");
        assert!(codes.contains(&"UNPARSED"), "{codes:?}");
        let rec = report
            .records
            .iter()
            .find(|r| r.code == "PORTMANTEAU")
            .unwrap();
        assert_eq!(rec.corrections, ["del"]);
        assert_eq!(report.exit_code(), 2);
    }

    #[test]
    fn parsed_portmanteau_corrects_via_contraction() {
        let res = Resources::builtin();
        let report = checker(&res)
            .check_document("La casa de el chico es bonita.")
            .unwrap();
        let rec = report
            .records
            .iter()
            .find(|r| r.code == "PORTMANTEAU")
            .expect("portmanteau record");
        assert_eq!(rec.corrections, ["La casa del chico es bonita."]);
        assert_eq!(rec.fragment, "de el");
    }

    #[test]
    fn record_offsets_count_characters_not_bytes() {
        let res = Resources::builtin();
        // `métodos` contains a two-byte character before the error site.
        let report = checker(&res)
            .check_document("Las empresas demandan de métodos.")
            .unwrap();
        let rec = report
            .records
            .iter()
            .find(|r| r.code == "PREP_ADD")
            .expect("PREP_ADD record");
        assert_eq!(rec.corrections, ["Las empresas demandan métodos."]);
        assert_eq!(rec.fragment, "de métodos");
        let text = "Las empresas demandan de métodos.";
        let chars: Vec<char> = text.chars().collect();
        assert_eq!(
            chars[rec.start..rec.end].iter().collect::<String>(),
            "de métodos"
        );
    }
}
