//! Detection and diagnosis: agreement score initialization, percolation and
//! final evaluation; error typing; preposition pattern-list checks; personal
//! `a`; portmanteau contractions; style weaknesses; and the message catalog.
//!
//! The agreement functions here are the direct, deterministic counterparts
//! of the canonical constraint templates in [`crate::csolve`]; an exhaustive
//! equivalence check between the two lives in the acceptance suite.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::fstruct::{
    unify_value, AgreementTrack, FeatureValue, Gender, Number, Pform, Sign,
    Span,
};
use crate::lexicon::{LexEntry, SubcatSlot};

/// Everything the checker can complain about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagCode {
    AgrGen,
    AgrNum,
    AgrGenNum,
    PrepSubst,
    PrepOmit,
    PrepAdd,
    Dequeismo,
    Queismo,
    PersAOmit,
    PersAAdd,
    Portmanteau,
    StyleLex,
    StyleNounAInf,
    StyleAbusePassive,
    StyleAbuseGerund,
    StyleAbuseAdverb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Weakness,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Weakness => "weakness",
        }
    }
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::AgrGen => "AGR_GEN",
            DiagCode::AgrNum => "AGR_NUM",
            DiagCode::AgrGenNum => "AGR_GEN_NUM",
            DiagCode::PrepSubst => "PREP_SUBST",
            DiagCode::PrepOmit => "PREP_OMIT",
            DiagCode::PrepAdd => "PREP_ADD",
            DiagCode::Dequeismo => "DEQUEISMO",
            DiagCode::Queismo => "QUEISMO",
            DiagCode::PersAOmit => "PERS_A_OMIT",
            DiagCode::PersAAdd => "PERS_A_ADD",
            DiagCode::Portmanteau => "PORTMANTEAU",
            DiagCode::StyleLex => "STYLE_LEX",
            DiagCode::StyleNounAInf => "STYLE_NOUN_A_INF",
            DiagCode::StyleAbusePassive => "STYLE_ABUSE_PASSIVE",
            DiagCode::StyleAbuseGerund => "STYLE_ABUSE_GERUND",
            DiagCode::StyleAbuseAdverb => "STYLE_ABUSE_ADVERB",
        }
    }

    /// Grammar violations are errors; style findings are weaknesses.
    pub fn severity(self) -> Severity {
        match self {
            DiagCode::StyleLex
            | DiagCode::StyleNounAInf
            | DiagCode::StyleAbusePassive
            | DiagCode::StyleAbuseGerund
            | DiagCode::StyleAbuseAdverb => Severity::Weakness,
            _ => Severity::Error,
        }
    }

    pub fn is_agreement(self) -> bool {
        matches!(self, DiagCode::AgrGen | DiagCode::AgrNum | DiagCode::AgrGenNum)
    }

    /// Default message catalog key.
    pub fn message_id(self) -> String {
        self.as_str().to_lowercase()
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DiagCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [
            DiagCode::AgrGen,
            DiagCode::AgrNum,
            DiagCode::AgrGenNum,
            DiagCode::PrepSubst,
            DiagCode::PrepOmit,
            DiagCode::PrepAdd,
            DiagCode::Dequeismo,
            DiagCode::Queismo,
            DiagCode::PersAOmit,
            DiagCode::PersAAdd,
            DiagCode::Portmanteau,
            DiagCode::StyleLex,
            DiagCode::StyleNounAInf,
            DiagCode::StyleAbusePassive,
            DiagCode::StyleAbuseGerund,
            DiagCode::StyleAbuseAdverb,
        ];
        all.into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown diagnosis code `{s}`"))
    }
}

/// One way of resolving an agreement error: the right values plus the
/// lexical spans that must be re-inflected to realize them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgrSolution {
    pub right_gender: Option<Gender>,
    pub right_number: Option<Number>,
    pub targets: Vec<Span>,
}

/// A single finding, attached to the sign that exposed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnosis {
    pub span: Span,
    pub code: DiagCode,
    /// Agreement codes: one entry per resolution (two per tied feature).
    pub solutions: Vec<AgrSolution>,
    /// Pform-family codes: the correct introducer.
    pub right_pform: Option<Pform>,
    /// Pform-family codes: what the writer used.
    pub observed_pform: Option<Pform>,
    /// Offending lexical spans (or the insertion point for omissions).
    pub targets: Vec<Span>,
    pub message_id: String,
}

impl Diagnosis {
    pub fn new(span: Span, code: DiagCode) -> Diagnosis {
        Diagnosis {
            span,
            code,
            solutions: Vec::new(),
            right_pform: None,
            observed_pform: None,
            targets: Vec::new(),
            message_id: code.message_id(),
        }
    }

    pub fn severity(&self) -> Severity {
        self.code.severity()
    }
}

// --- score assignment --------------------------------------------------------

/// Weight of an inherent (controlling) feature value.
pub const CONTROLLER_SCORE: u32 = 50;
/// Weight of an ordinary feature value.
pub const UNIT_SCORE: u32 = 10;

/// Initial gender track for a lexical sign: inherent gender anchors with
/// the controller weight, everything else carries the unit weight, and the
/// anticipated opposite starts empty.
pub fn init_gender_track(entry: &LexEntry) -> AgreementTrack {
    let h_score = if entry.inherent_gender && entry.gender != Gender::MascFem {
        CONTROLLER_SCORE
    } else {
        UNIT_SCORE
    };
    AgreementTrack::new(FeatureValue::Gender(entry.gender), h_score, 0)
}

/// Initial number track; inherent number (pluralia tantum) anchors like an
/// inherent gender.
pub fn init_number_track(entry: &LexEntry) -> AgreementTrack {
    let h_score = if entry.inherent_number && entry.number != Number::SgPl {
        CONTROLLER_SCORE
    } else {
        UNIT_SCORE
    };
    AgreementTrack::new(FeatureValue::Number(entry.number), h_score, 0)
}

// --- score percolation -------------------------------------------------------

/// Combine a head's track with a dependent's when they meet in one
/// projection. Agreeing (or underspecified) dependents add slot-wise; a
/// dependent carrying the head's anticipated opposite value adds crosswise,
/// feeding the evidence-against-the-head slot.
pub fn combine_tracks(head: &AgreementTrack, dep: &AgreementTrack) -> AgreementTrack {
    debug_assert_eq!(head.domain(), dep.domain(), "tracks from different domains");
    match unify_value(&head.h_value, &dep.h_value) {
        Ok(Some(meet)) => AgreementTrack::new(
            meet,
            head.h_score + dep.h_score,
            head.m_score + dep.m_score,
        ),
        Ok(None) => {
            debug_assert_eq!(dep.h_value, head.m_value, "binary domain exhausted");
            AgreementTrack::new(
                head.h_value.clone(),
                head.h_score + dep.m_score,
                head.m_score + dep.h_score,
            )
        }
        Err(e) => unreachable!("domain-checked tracks cannot mismatch: {e}"),
    }
}

// --- final evaluation ---------------------------------------------------------

/// Outcome of evaluating one track: no error, or an error with the right
/// value(s) — two on a tied score, winner first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrackVerdict {
    Clean,
    Error { rights: Vec<FeatureValue> },
}

/// Compare the two slots of a finished track. Any evidence on the opposite
/// slot means an error occurred; the heavier slot names the right value and
/// a tie leaves both candidates open (head value enumerated first).
pub fn evaluate_track(track: &AgreementTrack) -> TrackVerdict {
    if track.m_score == 0 {
        return TrackVerdict::Clean;
    }
    let rights = if track.h_score > track.m_score {
        vec![track.h_value.clone()]
    } else if track.m_score > track.h_score {
        vec![track.m_value.clone()]
    } else {
        vec![track.h_value.clone(), track.m_value.clone()]
    };
    TrackVerdict::Error { rights }
}

/// The four-way error-class split on the two opposite-slot scores.
pub fn ertype(m_gen_score: u32, m_num_score: u32) -> Option<DiagCode> {
    match (m_gen_score > 0, m_num_score > 0) {
        (false, false) => None,
        (true, false) => Some(DiagCode::AgrGen),
        (false, true) => Some(DiagCode::AgrNum),
        (true, true) => Some(DiagCode::AgrGenNum),
    }
}

/// Lexical descendants reachable without crossing an already-finalized
/// node; those nodes' evidence was judged separately and stays untouched.
/// The open leaves of each finalized node partition a parse's words into
/// agreement units.
pub fn open_leaves(sign: &Sign) -> Vec<Arc<Sign>> {
    fn walk(sign: &Arc<Sign>, out: &mut Vec<Arc<Sign>>) {
        if sign.is_lexical() {
            out.push(Arc::clone(sign));
            return;
        }
        for d in &sign.daughters {
            if !d.finalized {
                walk(d, out);
            }
        }
    }
    let mut out = Vec::new();
    for d in &sign.daughters {
        if !d.finalized {
            walk(d, &mut out);
        }
    }
    if sign.is_lexical() {
        out.push(Arc::new(sign.clone()));
    }
    out
}

fn gender_of(sign: &Sign) -> &FeatureValue {
    &sign.gender.h_value
}

fn number_of(sign: &Sign) -> &FeatureValue {
    &sign.number.h_value
}

/// Perform the final agreement evaluation on a sign, returning a copy
/// marked finalized, carrying any agreement diagnosis with its full
/// solution set (right values plus the offending lexical spans per
/// resolution).
pub fn finalize(sign: &Sign) -> Sign {
    assert!(!sign.finalized, "sign finalized twice: {}", sign.span);
    let mut out = sign.clone();
    out.finalized = true;

    let code = match ertype(sign.gender.m_score, sign.number.m_score) {
        Some(code) => code,
        None => return out,
    };

    let gender_rights: Vec<FeatureValue> = match evaluate_track(&sign.gender) {
        TrackVerdict::Clean => Vec::new(),
        TrackVerdict::Error { rights } => rights,
    };
    let number_rights: Vec<FeatureValue> = match evaluate_track(&sign.number) {
        TrackVerdict::Clean => Vec::new(),
        TrackVerdict::Error { rights } => rights,
    };

    let leaves = open_leaves(sign);
    let gender_targets = |right: &FeatureValue| -> Vec<Span> {
        leaves
            .iter()
            .filter(|l| !gender_of(l).is_underspecified() && gender_of(l) != right)
            .map(|l| l.span)
            .collect()
    };
    let number_targets = |right: &FeatureValue| -> Vec<Span> {
        leaves
            .iter()
            .filter(|l| !number_of(l).is_underspecified() && number_of(l) != right)
            .map(|l| l.span)
            .collect()
    };

    let mut solutions = Vec::new();
    match (gender_rights.is_empty(), number_rights.is_empty()) {
        (false, true) => {
            for g in &gender_rights {
                solutions.push(AgrSolution {
                    right_gender: as_gender(g),
                    right_number: None,
                    targets: gender_targets(g),
                });
            }
        }
        (true, false) => {
            for n in &number_rights {
                solutions.push(AgrSolution {
                    right_gender: None,
                    right_number: as_number(n),
                    targets: number_targets(n),
                });
            }
        }
        (false, false) => {
            // Gender resolutions enumerate in the outer loop so combined
            // corrections come out in a stable, documented order.
            for g in &gender_rights {
                for n in &number_rights {
                    let mut targets = gender_targets(g);
                    for t in number_targets(n) {
                        if !targets.contains(&t) {
                            targets.push(t);
                        }
                    }
                    targets.sort_by_key(|s| (s.start, s.end));
                    solutions.push(AgrSolution {
                        right_gender: as_gender(g),
                        right_number: as_number(n),
                        targets,
                    });
                }
            }
        }
        (true, true) => unreachable!("ertype reported an error with no offending track"),
    }

    let mut diag = Diagnosis::new(sign.span, code);
    diag.targets = solutions
        .first()
        .map(|s| s.targets.clone())
        .unwrap_or_default();
    diag.solutions = solutions;
    out.diagnoses.push(diag);
    out
}

fn as_gender(v: &FeatureValue) -> Option<Gender> {
    match v {
        FeatureValue::Gender(g) => Some(*g),
        _ => None,
    }
}

fn as_number(v: &FeatureValue) -> Option<Number> {
    match v {
        FeatureValue::Number(n) => Some(*n),
        _ => None,
    }
}

// --- preposition pattern lists -------------------------------------------------

/// Result of matching an observed introducer against a slot's pattern list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PformOutcome {
    /// The observed introducer is the correct one.
    Ok,
    /// The observed introducer is an anticipated mistake; diagnose it.
    Diagnose { code: DiagCode, right: Pform },
    /// The introducer is not in the list at all: this frame reading does
    /// not apply.
    NoMatch,
}

/// Check an argument's introducing preposition against the slot's ordered
/// pattern list: the head of the list is correct, the tail anticipates
/// mistakes, anything else rejects the reading. `clausal` selects the
/// que-clause refinements of omission/addition.
pub fn check_pform(slot: &SubcatSlot, observed: &Pform, clausal: bool) -> PformOutcome {
    let correct = slot.correct_pform();
    if observed == correct {
        return PformOutcome::Ok;
    }
    if !slot.pforms[1..].contains(observed) {
        return PformOutcome::NoMatch;
    }
    let de = Pform::Prep("de".to_string());
    let code = match (observed, correct) {
        (Pform::None, c) if *c != Pform::None => {
            if clausal && *c == de {
                DiagCode::Queismo
            } else {
                DiagCode::PrepOmit
            }
        }
        (o, Pform::None) => {
            if clausal && *o == de {
                DiagCode::Dequeismo
            } else {
                DiagCode::PrepAdd
            }
        }
        _ => DiagCode::PrepSubst,
    };
    PformOutcome::Diagnose {
        code,
        right: correct.clone(),
    }
}

/// Personal `a` on direct objects: animate objects need it, inanimate
/// objects must not take it. Underspecified animacy never triggers.
pub fn check_personal_a(slot: &SubcatSlot, np_animacy: &FeatureValue, observed: &Pform) -> PformOutcome {
    use crate::fstruct::Animacy;
    use crate::lexicon::Role;
    debug_assert_eq!(slot.role, Role::Dobj, "personal `a` applies to direct objects");
    let a = Pform::Prep("a".to_string());
    let animate = FeatureValue::Animacy(Animacy::Animate);
    let inanimate = FeatureValue::Animacy(Animacy::Inanimate);
    if *np_animacy == animate && *observed == Pform::None {
        return PformOutcome::Diagnose {
            code: DiagCode::PersAOmit,
            right: a,
        };
    }
    if *np_animacy == inanimate && *observed == a {
        return PformOutcome::Diagnose {
            code: DiagCode::PersAAdd,
            right: Pform::None,
        };
    }
    PformOutcome::Ok
}

/// Check one adjacent lexical pair for an uncontracted portmanteau: the
/// prepositions `de`/`a` followed by the article `el` (never the accented
/// pronoun `él`).
pub fn check_portmanteau(prep_surface: &str, prep_span: Span, det_surface: &str, det_span: Span) -> Option<Diagnosis> {
    let p = prep_surface.to_lowercase();
    if p != "de" && p != "a" {
        return None;
    }
    if det_surface.to_lowercase() != "el" {
        return None;
    }
    let mut diag = Diagnosis::new(Span::hull(prep_span, det_span), DiagCode::Portmanteau);
    diag.targets = vec![prep_span, det_span];
    diag.right_pform = Some(Pform::Prep(p));
    Some(diag)
}

// --- message catalog ------------------------------------------------------------

/// Text lookup for diagnosis messages: `id<TAB>message` per line, `#`
/// comments, UTF-8.
#[derive(Debug, Default, Clone)]
pub struct Messages {
    map: HashMap<String, String>,
}

#[derive(Debug, thiserror::Error)]
pub enum MessagesError {
    #[error("cannot read message catalog `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("message catalog line {line}: expected `id<TAB>message`")]
    Line { line: usize },
}

impl Messages {
    pub fn parse(src: &str) -> Result<Messages, MessagesError> {
        let mut map = HashMap::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (id, text) = line
                .split_once('\t')
                .ok_or(MessagesError::Line { line: idx + 1 })?;
            map.insert(id.trim().to_string(), text.trim().to_string());
        }
        Ok(Messages { map })
    }

    pub fn load(path: &std::path::Path) -> Result<Messages, MessagesError> {
        let src = std::fs::read_to_string(path).map_err(|source| MessagesError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Messages::parse(&src)
    }

    /// The catalog text for an id, falling back to the id itself so a
    /// sparse catalog still produces readable reports.
    pub fn text(&self, id: &str) -> String {
        self.map.get(id).cloned().unwrap_or_else(|| id.to_string())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fstruct::Animacy;
    use crate::lexicon::{Lexicon, Role, SlotCat};

    fn track(g: Gender, h: u32, m: u32) -> AgreementTrack {
        AgreementTrack::new(FeatureValue::Gender(g), h, m)
    }

    fn entry(src: &str) -> LexEntry {
        Lexicon::parse(src).unwrap().entries()[0].clone()
    }

    #[test]
    fn score_assignment_follows_inherentness() {
        let casa = entry("casa\tcasa\tn\tgender=fem;inherent=yes;number=sg");
        let g = init_gender_track(&casa);
        assert_eq!((g.h_score, g.m_score), (50, 0));
        assert_eq!(g.h_value, FeatureValue::Gender(Gender::Fem));
        assert_eq!(g.m_value, FeatureValue::Gender(Gender::Masc));
        let n = init_number_track(&casa);
        assert_eq!((n.h_score, n.m_score), (10, 0));

        let chico = entry("chico\tchico\tn\tgender=masc;inherent=no;number=sg");
        assert_eq!(init_gender_track(&chico).h_score, 10);

        let tijeras = entry("tijeras\ttijera\tn\tgender=fem;inherent=yes;number=pl;inherent_num=yes");
        assert_eq!(init_number_track(&tijeras).h_score, 50);
    }

    #[test]
    fn disagreeing_dependent_feeds_the_opposite_slot() {
        // "el casa": feminine controller + masculine determiner.
        let casa = track(Gender::Fem, 50, 0);
        let el = track(Gender::Masc, 10, 0);
        let np = combine_tracks(&casa, &el);
        assert_eq!(np, track(Gender::Fem, 50, 10));
    }

    #[test]
    fn two_disagreeing_dependents_can_outweigh_a_plain_head() {
        // "la chico guapa": masculine non-inherent head, two feminine
        // dependents.
        let chico = track(Gender::Masc, 10, 0);
        let guapa = track(Gender::Fem, 10, 0);
        let la = track(Gender::Fem, 10, 0);
        let nbar = combine_tracks(&chico, &guapa);
        assert_eq!(nbar, track(Gender::Masc, 10, 10));
        let np = combine_tracks(&nbar, &la);
        assert_eq!(np, track(Gender::Masc, 10, 20));
        match evaluate_track(&np) {
            TrackVerdict::Error { rights } => {
                assert_eq!(rights, vec![FeatureValue::Gender(Gender::Fem)])
            }
            v => panic!("expected an error verdict, got {v:?}"),
        }
    }

    #[test]
    fn single_disagreement_on_a_plain_head_is_a_tie() {
        // "la chico".
        let np = combine_tracks(&track(Gender::Masc, 10, 0), &track(Gender::Fem, 10, 0));
        assert_eq!(np, track(Gender::Masc, 10, 10));
        match evaluate_track(&np) {
            TrackVerdict::Error { rights } => assert_eq!(
                rights,
                vec![
                    FeatureValue::Gender(Gender::Masc),
                    FeatureValue::Gender(Gender::Fem)
                ]
            ),
            v => panic!("expected a tied error verdict, got {v:?}"),
        }
    }

    #[test]
    fn underspecified_dependent_adds_slotwise() {
        let head = track(Gender::Masc, 10, 0);
        let dep = AgreementTrack::new(FeatureValue::Gender(Gender::MascFem), 10, 0);
        let out = combine_tracks(&head, &dep);
        assert_eq!(out, track(Gender::Masc, 20, 0));
    }

    #[test]
    fn underspecified_head_is_refined_by_its_dependent() {
        let head = AgreementTrack::new(FeatureValue::Gender(Gender::MascFem), 10, 0);
        let dep = track(Gender::Fem, 10, 0);
        let out = combine_tracks(&head, &dep);
        assert_eq!(out.h_value, FeatureValue::Gender(Gender::Fem));
        assert_eq!(out.m_value, FeatureValue::Gender(Gender::Masc));
        assert_eq!((out.h_score, out.m_score), (20, 0));
    }

    #[test]
    fn error_typing_is_the_four_way_split() {
        assert_eq!(ertype(0, 0), None);
        assert_eq!(ertype(10, 0), Some(DiagCode::AgrGen));
        assert_eq!(ertype(0, 10), Some(DiagCode::AgrNum));
        assert_eq!(ertype(20, 10), Some(DiagCode::AgrGenNum));
    }

    fn slot(pforms: &[&str]) -> SubcatSlot {
        SubcatSlot {
            role: Role::Oblique,
            cat: SlotCat::Np,
            pforms: pforms
                .iter()
                .map(|p| {
                    if *p == "none" {
                        Pform::None
                    } else {
                        Pform::Prep(p.to_string())
                    }
                })
                .collect(),
            animacy: Animacy::Any,
        }
    }

    #[test]
    fn pform_head_is_ok_tail_diagnoses_rest_rejects() {
        let s = slot(&["con", "a"]);
        assert_eq!(check_pform(&s, &Pform::Prep("con".into()), false), PformOutcome::Ok);
        assert_eq!(
            check_pform(&s, &Pform::Prep("a".into()), false),
            PformOutcome::Diagnose {
                code: DiagCode::PrepSubst,
                right: Pform::Prep("con".into())
            }
        );
        assert_eq!(check_pform(&s, &Pform::Prep("en".into()), false), PformOutcome::NoMatch);
    }

    #[test]
    fn clausal_de_refines_to_queismo_and_dequeismo() {
        let omission = slot(&["de", "none"]);
        assert_eq!(
            check_pform(&omission, &Pform::None, true),
            PformOutcome::Diagnose {
                code: DiagCode::Queismo,
                right: Pform::Prep("de".into())
            }
        );
        // Same shape over a plain nominal argument is a generic omission.
        assert_eq!(
            check_pform(&omission, &Pform::None, false),
            PformOutcome::Diagnose {
                code: DiagCode::PrepOmit,
                right: Pform::Prep("de".into())
            }
        );
        let addition = slot(&["none", "de"]);
        assert_eq!(
            check_pform(&addition, &Pform::Prep("de".into()), true),
            PformOutcome::Diagnose {
                code: DiagCode::Dequeismo,
                right: Pform::None
            }
        );
        assert_eq!(
            check_pform(&addition, &Pform::Prep("de".into()), false),
            PformOutcome::Diagnose {
                code: DiagCode::PrepAdd,
                right: Pform::None
            }
        );
    }

    #[test]
    fn personal_a_rules() {
        let mut s = slot(&["none", "a"]);
        s.role = Role::Dobj;
        let animate = FeatureValue::Animacy(Animacy::Animate);
        let inanimate = FeatureValue::Animacy(Animacy::Inanimate);
        let a = Pform::Prep("a".into());
        assert_eq!(
            check_personal_a(&s, &animate, &Pform::None),
            PformOutcome::Diagnose {
                code: DiagCode::PersAOmit,
                right: a.clone()
            }
        );
        assert_eq!(
            check_personal_a(&s, &inanimate, &a),
            PformOutcome::Diagnose {
                code: DiagCode::PersAAdd,
                right: Pform::None
            }
        );
        assert_eq!(check_personal_a(&s, &animate, &a), PformOutcome::Ok);
        assert_eq!(check_personal_a(&s, &inanimate, &Pform::None), PformOutcome::Ok);
    }

    #[test]
    fn portmanteau_matches_articles_not_pronouns() {
        let d = check_portmanteau("de", Span::new(0, 2), "el", Span::new(3, 5)).unwrap();
        assert_eq!(d.code, DiagCode::Portmanteau);
        assert_eq!(d.span, Span::new(0, 5));
        assert!(check_portmanteau("de", Span::new(0, 2), "él", Span::new(3, 5)).is_none());
        assert!(check_portmanteau("en", Span::new(0, 2), "el", Span::new(3, 5)).is_none());
        assert!(check_portmanteau("A", Span::new(0, 1), "El", Span::new(2, 4)).is_some());
    }

    #[test]
    fn severities_split_grammar_from_style() {
        assert_eq!(DiagCode::AgrGen.severity(), Severity::Error);
        assert_eq!(DiagCode::Queismo.severity(), Severity::Error);
        assert_eq!(DiagCode::Portmanteau.severity(), Severity::Error);
        assert_eq!(DiagCode::StyleLex.severity(), Severity::Weakness);
        assert_eq!(DiagCode::StyleAbuseAdverb.severity(), Severity::Weakness);
    }

    #[test]
    fn messages_parse_and_fall_back() {
        let m = Messages::parse("# catalog\nagr_gen\tGender agreement error.\n").unwrap();
        assert_eq!(m.text("agr_gen"), "Gender agreement error.");
        assert_eq!(m.text("missing_id"), "missing_id");
        assert!(Messages::parse("no_tab_here").is_err());
    }
}
