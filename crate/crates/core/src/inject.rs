//! Seeded error injection: mutate known-clean sentences into minimally
//! wrong ones, together with the diagnosis code the checker must raise.
//!
//! Sites come from the clean parse itself, so every mutation is grounded in
//! the same analyses the checker uses:
//!
//! * **Inflection flips** — a word with a declared paradigm swaps one cell
//!   (gender or number) for its opposite.  The site is kept only when another
//!   word of the same agreement unit pins the feature down, and it is
//!   classified by whether the evidence favors the original outright (an
//!   inherent-feature controller, or at least two agreeing words against the
//!   one flipped) or leaves a tie.
//! * **Marker swaps** — a frame-consumed argument changes its introducer:
//!   the right preposition is dropped, replaced by an anticipated wrong one,
//!   or a spurious one (including the personal `a`) is added.
//!
//! One site per sentence is chosen with a seeded generator for the
//! command-line harness; the full enumeration backs the regression suite.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::correct::contract_surfaces;
use crate::diagnose::{open_leaves, DiagCode, PformOutcome};
use crate::fstruct::{Animacy, Gender, Number, Pform, Sign};
use crate::lexicon::{Lexicon, Role, SlotCat};
use crate::parser::{
    argument_marker_check, marker_leaf_span, sentences, ParseError, SentenceAnalysis, Token,
};
use crate::pipeline::Checker;

/// How the corrections for the mutated sentence must relate to the original.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionCheck {
    /// The correction set must be exactly `{original}`.
    Exact,
    /// The original must be among the corrections (tied evidence).
    Member,
}

/// The two mutation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteKind {
    /// An inflection-cell flip (gender or number).
    Agreement,
    /// An argument-introducer swap (preposition or personal `a`).
    Marker,
}

/// One injectable error.
#[derive(Debug, Clone)]
pub struct InjectionSite {
    pub sentence_index: usize,
    /// The clean sentence, whitespace-normalized.
    pub original: String,
    /// The sentence with the error injected.
    pub mutated: String,
    /// The diagnosis the checker must raise for `mutated`.
    pub expected: DiagCode,
    pub check: CorrectionCheck,
    /// Human description of the mutation, for harness output.
    pub description: String,
}

impl InjectionSite {
    /// Which mutation family produced this site, as implied by the
    /// expected diagnosis.
    pub fn kind(&self) -> SiteKind {
        match self.expected {
            DiagCode::AgrGen | DiagCode::AgrNum | DiagCode::AgrGenNum => SiteKind::Agreement,
            _ => SiteKind::Marker,
        }
    }
}

/// Result of injecting over a document: one pair per usable sentence, plus
/// the sentences that had to be skipped and why.
#[derive(Debug)]
pub struct InjectReport {
    pub pairs: Vec<InjectionSite>,
    pub skipped: Vec<(usize, String)>,
}

impl InjectReport {
    /// The documented pairs-file format: original, mutated, expected code.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            out.push_str(&format!("{}\t{}\t{}\n", p.original, p.mutated, p.expected));
        }
        out
    }
}

/// Mutate one seeded-random site per parseable sentence.
pub fn inject_document(
    checker: &Checker<'_>,
    text: &str,
    seed: u64,
) -> Result<InjectReport, ParseError> {
    inject_document_of_kind(checker, text, seed, None)
}

/// Like [`inject_document`], restricted to one mutation family when `kind`
/// is given.
pub fn inject_document_of_kind(
    checker: &Checker<'_>,
    text: &str,
    seed: u64,
    kind: Option<SiteKind>,
) -> Result<InjectReport, ParseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for sent in sentences(text) {
        let words = sent.words();
        if words.is_empty() {
            continue;
        }
        let terminal = sent.terminal_punctuation();
        match checker.parser().parse(&words)? {
            SentenceAnalysis::Parsed { selected } => {
                let mut sites =
                    enumerate_sites(checker.lexicon(), &selected, &words, &terminal, sent.index);
                if let Some(kind) = kind {
                    sites.retain(|s| s.kind() == kind);
                }
                if sites.is_empty() {
                    skipped.push((sent.index, "no mutable site".to_string()));
                } else {
                    let pick = rng.gen_range(0..sites.len());
                    pairs.push(sites.swap_remove(pick));
                }
            }
            _ => skipped.push((sent.index, "sentence does not parse".to_string())),
        }
    }
    Ok(InjectReport { pairs, skipped })
}

/// Every injectable site of every parseable sentence in `text`.
pub fn enumerate_document_sites(
    checker: &Checker<'_>,
    text: &str,
) -> Result<Vec<InjectionSite>, ParseError> {
    let mut out = Vec::new();
    for sent in sentences(text) {
        let words = sent.words();
        if words.is_empty() {
            continue;
        }
        let terminal = sent.terminal_punctuation();
        if let SentenceAnalysis::Parsed { selected } = checker.parser().parse(&words)? {
            out.extend(enumerate_sites(
                checker.lexicon(),
                &selected,
                &words,
                &terminal,
                sent.index,
            ));
        }
    }
    Ok(out)
}

/// Every injectable site of one parsed sentence.
pub fn enumerate_sites(
    lexicon: &Lexicon,
    selected: &Sign,
    words: &[&Token],
    terminal: &str,
    sentence_index: usize,
) -> Vec<InjectionSite> {
    let originals: Vec<String> = words.iter().map(|t| t.surface.clone()).collect();
    let original_text = join_words(&originals, terminal);
    let mut sites = Vec::new();

    let mut units: Vec<Vec<Arc<Sign>>> = Vec::new();
    collect_units(selected, &mut units);
    for unit in &units {
        for leaf in unit {
            flip_sites(
                lexicon,
                unit,
                leaf,
                words,
                &originals,
                &original_text,
                terminal,
                sentence_index,
                &mut sites,
            );
        }
    }

    let mut args: Vec<&Sign> = Vec::new();
    collect_arguments(selected, &mut args);
    for arg in args {
        marker_sites(
            arg,
            words,
            &originals,
            &original_text,
            terminal,
            sentence_index,
            &mut sites,
        );
    }
    sites
}

/// The agreement units of a parse: the open leaves of every finalized node.
fn collect_units(sign: &Sign, out: &mut Vec<Vec<Arc<Sign>>>) {
    if sign.finalized {
        let unit = open_leaves(sign);
        if !unit.is_empty() {
            out.push(unit);
        }
    }
    for d in &sign.daughters {
        collect_units(d, out);
    }
}

/// Frame-consumed arguments (each carries the slot that consumed it).
fn collect_arguments<'s>(sign: &'s Sign, out: &mut Vec<&'s Sign>) {
    for d in &sign.daughters {
        if d.finalized && d.subcat.len() == 1 {
            out.push(d);
        }
        collect_arguments(d, out);
    }
}

/// Gender and number cell flips for one leaf of one agreement unit.
#[allow(clippy::too_many_arguments)]
fn flip_sites(
    lexicon: &Lexicon,
    unit: &[Arc<Sign>],
    leaf: &Sign,
    words: &[&Token],
    originals: &[String],
    original_text: &str,
    terminal: &str,
    sentence_index: usize,
    sites: &mut Vec<InjectionSite>,
) {
    let Some(entry) = lexicon.entry_for(&leaf.surface, &leaf.lemma, leaf.category) else {
        return;
    };
    let Some(paradigm) = entry.paradigm.as_ref() else {
        return;
    };
    let Some(word_idx) = word_position(words, leaf) else {
        return;
    };

    if paradigm.inflects_gender() && entry.gender != Gender::MascFem {
        let flipped = match entry.gender {
            Gender::Masc => Gender::Fem,
            Gender::Fem => Gender::Masc,
            Gender::MascFem => unreachable!(),
        };
        if let Some(new_surface) = paradigm.cell(flipped, entry.number) {
            if !new_surface.eq_ignore_ascii_case(&leaf.surface) {
                if let Some(check) = classify_flip(lexicon, unit, leaf, Feature::Gender) {
                    let mut mutated = originals.to_vec();
                    mutated[word_idx] = preserve_case(&leaf.surface, new_surface);
                    sites.push(InjectionSite {
                        sentence_index,
                        original: original_text.to_string(),
                        mutated: render_mutated(&mutated, terminal),
                        expected: DiagCode::AgrGen,
                        check,
                        description: format!(
                            "gender flip `{}` -> `{}`",
                            leaf.surface, new_surface
                        ),
                    });
                }
            }
        }
    }

    if entry.number != Number::SgPl && !entry.inherent_number {
        let flipped = match entry.number {
            Number::Sg => Number::Pl,
            Number::Pl => Number::Sg,
            Number::SgPl => unreachable!(),
        };
        if let Some(new_surface) = paradigm.cell(entry.gender, flipped) {
            if !new_surface.eq_ignore_ascii_case(&leaf.surface) {
                if let Some(check) = classify_flip(lexicon, unit, leaf, Feature::Number) {
                    let mut mutated = originals.to_vec();
                    mutated[word_idx] = preserve_case(&leaf.surface, new_surface);
                    sites.push(InjectionSite {
                        sentence_index,
                        original: original_text.to_string(),
                        mutated: render_mutated(&mutated, terminal),
                        expected: DiagCode::AgrNum,
                        check,
                        description: format!(
                            "number flip `{}` -> `{}`",
                            leaf.surface, new_surface
                        ),
                    });
                }
            }
        }
    }
}

enum Feature {
    Gender,
    Number,
}

/// Decide whether a flipped leaf is outvoted by the rest of its agreement
/// unit.  `None` means no other word pins the feature down, so the mutation
/// would be undetectable and is not a site.
fn classify_flip(
    lexicon: &Lexicon,
    unit: &[Arc<Sign>],
    flipped: &Sign,
    feature: Feature,
) -> Option<CorrectionCheck> {
    let mut specific_others = 0usize;
    let mut inherent_other = false;
    for other in unit {
        if other.span == flipped.span {
            continue;
        }
        let (value, inherent) = match feature {
            Feature::Gender => (&other.gender.h_value, other.inherent_gender),
            Feature::Number => {
                let inh = lexicon
                    .entry_for(&other.surface, &other.lemma, other.category)
                    .is_some_and(|e| e.inherent_number);
                (&other.number.h_value, inh)
            }
        };
        if value.is_underspecified() {
            continue;
        }
        specific_others += 1;
        inherent_other |= inherent;
    }
    if specific_others == 0 {
        None
    } else if inherent_other || specific_others >= 2 {
        Some(CorrectionCheck::Exact)
    } else {
        Some(CorrectionCheck::Member)
    }
}

/// Marker mutations for one frame-consumed argument: drop, replace, or add
/// an introducer, keeping exactly those variants the checker anticipates.
#[allow(clippy::too_many_arguments)]
fn marker_sites(
    arg: &Sign,
    words: &[&Token],
    originals: &[String],
    original_text: &str,
    terminal: &str,
    sentence_index: usize,
    sites: &mut Vec<InjectionSite>,
) {
    let slot = &arg.subcat[0];
    let observed = &arg.pform;
    let clausal = arg.clause == crate::fstruct::Clause::Clausal;

    let mut alternates: Vec<Pform> = Vec::new();
    if *observed != Pform::None {
        alternates.push(Pform::None);
    }
    for pf in &slot.pforms {
        if matches!(pf, Pform::Prep(_)) && pf != observed && !alternates.contains(pf) {
            alternates.push(pf.clone());
        }
    }
    let personal_a = Pform::Prep("a".to_string());
    if slot.role == Role::Dobj
        && slot.cat == SlotCat::Np
        && arg.animacy == Animacy::Inanimate
        && *observed != personal_a
        && !alternates.contains(&personal_a)
    {
        alternates.push(personal_a);
    }

    for alt in alternates {
        let PformOutcome::Diagnose { code, .. } =
            argument_marker_check(slot, arg.animacy, &alt, clausal)
        else {
            continue;
        };
        let Some(mutated) = apply_marker_mutation(arg, observed, &alt, words, originals) else {
            continue;
        };
        sites.push(InjectionSite {
            sentence_index,
            original: original_text.to_string(),
            mutated: render_mutated(&mutated, terminal),
            expected: code,
            check: CorrectionCheck::Exact,
            description: format!(
                "marker `{}` -> `{}` on the {:?} argument",
                observed.atom_name(),
                alt.atom_name(),
                slot.role
            ),
        });
    }
}

/// Build the mutated word list for one marker change, or `None` when the
/// marker cannot be located.
fn apply_marker_mutation(
    arg: &Sign,
    observed: &Pform,
    alt: &Pform,
    words: &[&Token],
    originals: &[String],
) -> Option<Vec<String>> {
    let mut mutated = originals.to_vec();
    match (observed, alt) {
        (Pform::None, Pform::Prep(q)) => {
            let at = words.iter().position(|t| t.span.start == arg.span.start)?;
            mutated.insert(at, q.clone());
        }
        (Pform::Prep(_), _) => {
            let marker = marker_leaf_span(arg, observed)?;
            let idx = words.iter().position(|t| t.span == marker)?;
            let fused = is_fused_det(&originals[idx]);
            match alt {
                Pform::None => {
                    if fused {
                        mutated[idx] = preserve_case(&originals[idx], "el");
                    } else {
                        mutated.remove(idx);
                    }
                }
                Pform::Prep(q) => {
                    if fused {
                        mutated[idx] = preserve_case(&originals[idx], &format!("{q} el"));
                    } else {
                        mutated[idx] = preserve_case(&originals[idx], q);
                    }
                }
            }
        }
        (Pform::None, Pform::None) => return None,
    }
    Some(mutated)
}

fn is_fused_det(surface: &str) -> bool {
    matches!(surface.to_lowercase().as_str(), "al" | "del")
}

fn word_position(words: &[&Token], leaf: &Sign) -> Option<usize> {
    words.iter().position(|t| t.span == leaf.span)
}

fn join_words(words: &[String], terminal: &str) -> String {
    let mut text = words.join(" ");
    text.push_str(terminal);
    text
}

/// Join the mutated words, fusing any `de el` / `a el` a mutation created
/// (markers inserted before an article contract, as a writer would).
fn render_mutated(words: &[String], terminal: &str) -> String {
    let flat: Vec<&str> = words
        .iter()
        .flat_map(|w| w.split_whitespace())
        .collect();
    contract_surfaces(&flat, terminal)
}

fn preserve_case(original: &str, replacement: &str) -> String {
    let upper = original
        .chars()
        .next()
        .map(|c| c.is_uppercase())
        .unwrap_or(false);
    if !upper {
        return replacement.to_string();
    }
    let mut chars = replacement.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}
