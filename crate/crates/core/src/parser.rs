//! Tokenization, sentence segmentation, and the relaxation chart parser.
//!
//! Parsing never fails on a feature clash: agreement features are carried as
//! score-weighted candidate pairs (see [`crate::fstruct::AgreementTrack`]) and
//! wrong prepositions or missing argument markers are absorbed by anticipated
//! mismatch checks that attach a [`Diagnosis`](crate::diagnose::Diagnosis) to
//! the structure instead of rejecting it.  A sentence therefore fails to parse
//! only for out-of-vocabulary words or genuinely uncovered constructions.
//!
//! The chart is a naive fixpoint closure: lexical edges are seeded per
//! dictionary record (verbs once per subcategorization frame), phrase rules
//! combine adjacent edges, and frame-driven verb rules saturate complement
//! slots left to right.  Duplicate edges are pruned by a structural
//! fingerprint so the loop terminates.

use std::collections::HashSet;
use std::str::FromStr;
use std::sync::Arc;

use crate::csolve::{self, Binding, ConstraintExpr, EvalError, Value};
use crate::diagnose::{
    self, check_personal_a, check_pform, DiagCode, Diagnosis, PformOutcome, UNIT_SCORE,
};
use crate::fstruct::{
    AgreementTrack, Animacy, Category, Clause, Domain, FeatureValue, Gender, Number, Pform, Sign,
    Span, VForm,
};
use crate::grammar::{CheckConfig, Grammar, Rule};
use crate::lexicon::{LexEntry, Lexicon, Role, SlotCat, SubcatSlot};

/// A surface token with its byte span in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub span: Span,
    pub sentence_index: usize,
}

impl Token {
    /// A word token is entirely alphanumeric; everything else is punctuation.
    pub fn is_word(&self) -> bool {
        !self.surface.is_empty() && self.surface.chars().all(char::is_alphanumeric)
    }
}

/// The tokens of one sentence, in order, words and punctuation interleaved.
#[derive(Debug, Clone)]
pub struct SentenceTokens {
    pub index: usize,
    pub tokens: Vec<Token>,
}

impl SentenceTokens {
    /// Word tokens only (what the parser consumes).
    pub fn words(&self) -> Vec<&Token> {
        self.tokens.iter().filter(|t| t.is_word()).collect()
    }

    /// Byte span covering the whole sentence, punctuation included.
    pub fn span(&self) -> Span {
        match (self.tokens.first(), self.tokens.last()) {
            (Some(first), Some(last)) => Span::hull(first.span, last.span),
            _ => Span::new(0, 0),
        }
    }

    /// Trailing punctuation tokens (e.g. the sentence-final "."), joined.
    pub fn terminal_punctuation(&self) -> String {
        let mut out = String::new();
        for tok in self.tokens.iter().rev() {
            if tok.is_word() {
                break;
            }
            out.insert_str(0, &tok.surface);
        }
        out
    }
}

/// Split `text` into surface tokens.
///
/// Words are maximal alphanumeric runs; every other non-space character is a
/// single-character token.  Sentence indices advance after `.`, `?` or `!`
/// followed by whitespace or end of input.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut sentence = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphanumeric() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_alphanumeric() {
                j += 1;
            }
            let end = if j < chars.len() { chars[j].0 } else { text.len() };
            tokens.push(Token {
                surface: text[pos..end].to_string(),
                span: Span::new(pos, end),
                sentence_index: sentence,
            });
            i = j;
        } else {
            let end = if i + 1 < chars.len() {
                chars[i + 1].0
            } else {
                text.len()
            };
            tokens.push(Token {
                surface: text[pos..end].to_string(),
                span: Span::new(pos, end),
                sentence_index: sentence,
            });
            let boundary = matches!(c, '.' | '?' | '!')
                && (i + 1 >= chars.len() || chars[i + 1].1.is_whitespace());
            if boundary {
                sentence += 1;
            }
            i += 1;
        }
    }
    tokens
}

/// Group the tokens of `text` into sentences.
pub fn sentences(text: &str) -> Vec<SentenceTokens> {
    let mut out: Vec<SentenceTokens> = Vec::new();
    for tok in tokenize(text) {
        match out.last_mut() {
            Some(s) if s.index == tok.sentence_index => s.tokens.push(tok),
            _ => out.push(SentenceTokens {
                index: tok.sentence_index,
                tokens: vec![tok],
            }),
        }
    }
    out
}

/// Outcome of analysing one sentence.
#[derive(Debug, Clone)]
pub enum SentenceAnalysis {
    /// A spanning structure was found; `selected` is the preferred reading.
    Parsed { selected: Arc<Sign> },
    /// Words missing from the dictionary; the sentence cannot be analysed.
    UnknownWords { words: Vec<String> },
    /// All words are known but no spanning structure was found.
    NoParse,
    /// The sentence contains no word tokens at all.
    Empty,
}

/// Operational parsing failure (grammar/dictionary inconsistencies, not
/// ordinary "sentence not covered" outcomes).
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("constraint of rule '{rule}' failed to evaluate: {source}")]
    Constraint {
        rule: String,
        #[source]
        source: EvalError,
    },
    #[error("rule '{rule}' bound {variable} to a value unusable as {expected}")]
    BadBinding {
        rule: String,
        variable: String,
        expected: &'static str,
    },
}

/// One chart edge: a sign spanning word tokens `start..end`.
#[derive(Debug, Clone)]
struct Edge {
    sign: Arc<Sign>,
    start: usize,
    end: usize,
}

/// The chart parser, configured with a dictionary and the active rules of a
/// sublanguage profile.
pub struct Parser<'a> {
    lexicon: &'a Lexicon,
    rules: Vec<Rule>,
    /// Per rule, per daughter: does the constraint mention that daughter's
    /// agreement tracks?  Unreferenced complete phrases are sealed early.
    tracks_referenced: Vec<Vec<bool>>,
}

impl<'a> Parser<'a> {
    pub fn new(lexicon: &'a Lexicon, grammar: &Grammar, config: &CheckConfig) -> Self {
        let rules: Vec<Rule> = grammar.active_rules(config).into_iter().cloned().collect();
        let tracks_referenced = rules
            .iter()
            .map(|rule| rule.daughter_tracks_referenced())
            .collect();
        Parser {
            lexicon,
            rules,
            tracks_referenced,
        }
    }

    /// Analyse the word tokens of one sentence.
    pub fn parse(&self, words: &[&Token]) -> Result<SentenceAnalysis, ParseError> {
        if words.is_empty() {
            return Ok(SentenceAnalysis::Empty);
        }
        let mut unknown = Vec::new();
        for tok in words {
            if self.lexicon.lookup(&tok.surface).is_empty() {
                unknown.push(tok.surface.clone());
            }
        }
        if !unknown.is_empty() {
            return Ok(SentenceAnalysis::UnknownWords { words: unknown });
        }

        let mut chart: Vec<Edge> = Vec::new();
        let mut seen: HashSet<(usize, usize, String)> = HashSet::new();
        for (i, tok) in words.iter().enumerate() {
            for sign in self.lexical_signs(tok) {
                push_edge(
                    &mut chart,
                    &mut seen,
                    Edge {
                        sign: Arc::new(sign),
                        start: i,
                        end: i + 1,
                    },
                );
            }
        }

        // Fixpoint closure: keep applying rules until the chart stops growing.
        loop {
            let before = chart.len();
            for (rule_idx, rule) in self.rules.iter().enumerate() {
                let prefixes = match_sequences(&chart, &rule.daughters);
                for prefix in prefixes {
                    let daughters: Vec<Arc<Sign>> =
                        prefix.iter().map(|&e| chart[e].sign.clone()).collect();
                    let start = chart[prefix[0]].start;
                    let end = chart[*prefix.last().expect("non-empty rule")].end;
                    if rule.frame_driven {
                        if !passes_constraint(rule, &daughters)? {
                            continue;
                        }
                        let head = daughters[rule.head_index].clone();
                        let new_edges =
                            self.saturate_frames(rule, &daughters, head, start, end, &chart);
                        for edge in new_edges {
                            push_edge(&mut chart, &mut seen, edge);
                        }
                    } else {
                        for sign in self.apply_rule(rule_idx, rule, &daughters)? {
                            push_edge(
                                &mut chart,
                                &mut seen,
                                Edge {
                                    sign: Arc::new(sign),
                                    start,
                                    end,
                                },
                            );
                        }
                    }
                }
            }
            if chart.len() == before {
                break;
            }
        }

        // Candidate readings: spanning sentences or bare noun phrases.
        let n = words.len();
        let mut candidates: Vec<Arc<Sign>> = Vec::new();
        for edge in &chart {
            if edge.start == 0
                && edge.end == n
                && matches!(edge.sign.category, Category::S | Category::Np)
            {
                let sign = if edge.sign.finalized {
                    edge.sign.clone()
                } else {
                    Arc::new(diagnose::finalize(&edge.sign))
                };
                candidates.push(sign);
            }
        }
        match select(candidates) {
            Some(selected) => Ok(SentenceAnalysis::Parsed { selected }),
            None => Ok(SentenceAnalysis::NoParse),
        }
    }

    /// Lexical signs for one token: one per dictionary record, and for verbs
    /// one per subcategorization frame.
    fn lexical_signs(&self, tok: &Token) -> Vec<Sign> {
        let mut out = Vec::new();
        for entry in self.lexicon.lookup(&tok.surface) {
            if entry.frames.is_empty() {
                out.push(lexical_sign(entry, tok, Vec::new()));
            } else {
                for frame in &entry.frames {
                    out.push(lexical_sign(entry, tok, frame.slots.clone()));
                }
            }
        }
        out
    }

    /// Apply a plain phrase rule to one daughter sequence.
    fn apply_rule(
        &self,
        rule_idx: usize,
        rule: &Rule,
        daughters: &[Arc<Sign>],
    ) -> Result<Vec<Sign>, ParseError> {
        let solutions = solve_constraint(rule, daughters)?;
        let mut out = Vec::new();
        for solution in solutions {
            let prepared = self.seal_unreferenced(rule_idx, rule, daughters);
            out.push(build_mother(rule, &prepared, &solution)?);
        }
        Ok(out)
    }

    /// Seal (finalize) complete non-head phrase daughters whose agreement
    /// tracks the rule does not consult: their internal agreement business is
    /// closed, so pending mismatches are diagnosed now rather than leaking
    /// into the mother's evidence.
    fn seal_unreferenced(
        &self,
        rule_idx: usize,
        rule: &Rule,
        daughters: &[Arc<Sign>],
    ) -> Vec<Arc<Sign>> {
        daughters
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let sealable = i != rule.head_index
                    && !d.finalized
                    && matches!(d.category, Category::Np | Category::Pp | Category::CompS)
                    && !self.tracks_referenced[rule_idx][i];
                if sealable {
                    Arc::new(diagnose::finalize(d))
                } else {
                    d.clone()
                }
            })
            .collect()
    }

    /// Saturate the complement slots of a verb's frame, left to right, from
    /// `end` onwards.  Each consumed argument is checked for its marker
    /// (preposition / personal "a") and sealed; attribute arguments instead
    /// merge their agreement tracks into the verb phrase under construction.
    fn saturate_frames(
        &self,
        rule: &Rule,
        prefix: &[Arc<Sign>],
        head: Arc<Sign>,
        start: usize,
        end: usize,
        chart: &[Edge],
    ) -> Vec<Edge> {
        let complements: Vec<SubcatSlot> = head
            .subcat
            .iter()
            .filter(|slot| slot.role != Role::Subject)
            .cloned()
            .collect();
        let subject: Vec<SubcatSlot> = head
            .subcat
            .iter()
            .filter(|slot| slot.role == Role::Subject)
            .cloned()
            .collect();
        let mut results = Vec::new();
        let state = VpState {
            gender: head.gender.clone(),
            number: head.number.clone(),
            consumed: Vec::new(),
        };
        self.saturate(rule, prefix, &head, &subject, &complements, state, start, end, chart, &mut results);
        results
    }

    #[allow(clippy::too_many_arguments)]
    fn saturate(
        &self,
        rule: &Rule,
        prefix: &[Arc<Sign>],
        head: &Arc<Sign>,
        subject: &[SubcatSlot],
        remaining: &[SubcatSlot],
        state: VpState,
        start: usize,
        end: usize,
        chart: &[Edge],
        results: &mut Vec<Edge>,
    ) {
        let Some(slot) = remaining.first() else {
            let mut daughters: Vec<Arc<Sign>> = prefix.to_vec();
            daughters.extend(state.consumed.iter().cloned());
            let span = daughters
                .iter()
                .skip(1)
                .fold(daughters[0].span, |acc, d| Span::hull(acc, d.span));
            let sign = Sign {
                category: Category::Vp,
                gender: state.gender.clone(),
                number: state.number.clone(),
                pform: Pform::None,
                animacy: head.animacy,
                clause: Clause::NonClausal,
                inherent_gender: false,
                vform: head.vform,
                pronominal: head.pronominal,
                style_flag: head.style_flag,
                lemma: head.lemma.clone(),
                surface: String::new(),
                span,
                subcat: subject.to_vec(),
                daughters,
                diagnoses: Vec::new(),
                finalized: false,
                refeatured: false,
                rule_id: Some(rule.id.clone()),
            };
            results.push(Edge {
                sign: Arc::new(sign),
                start,
                end,
            });
            return;
        };
        for edge in chart.iter().filter(|e| e.start == end) {
            let Some(consumed) = consume_slot(slot, &edge.sign) else {
                continue;
            };
            let mut next = state.clone();
            match consumed {
                Consumed::Attribute(arg) => {
                    // An attribute predicates over the subject: its features
                    // join the verb phrase's own tracks.  A copula carries no
                    // gender of its own, so the attribute's gender track
                    // replaces a still-untouched one instead of combining
                    // with it (combining would count the copula's vacuous
                    // underspecified value as evidence).
                    if next.gender.h_value.is_underspecified() && next.gender.m_score == 0 {
                        next.gender = arg.gender.clone();
                    } else {
                        next.gender = diagnose::combine_tracks(&next.gender, &arg.gender);
                    }
                    next.number = diagnose::combine_tracks(&next.number, &arg.number);
                    next.consumed.push(arg);
                }
                Consumed::Argument(arg) => next.consumed.push(arg),
            }
            self.saturate(
                rule,
                prefix,
                head,
                subject,
                &remaining[1..],
                next,
                start,
                edge.end,
                chart,
                results,
            );
        }
    }
}

/// Accumulator for a verb phrase being saturated.
#[derive(Clone)]
struct VpState {
    gender: AgreementTrack,
    number: AgreementTrack,
    consumed: Vec<Arc<Sign>>,
}

enum Consumed {
    /// Ordinary argument, sealed (and possibly diagnosed for its marker).
    Argument(Arc<Sign>),
    /// Predicate attribute: kept open so its leaves take part in the
    /// clause-level agreement evaluation.
    Attribute(Arc<Sign>),
}

/// Try to consume `candidate` for `slot`.  Returns the wrapped daughter, or
/// `None` when the candidate cannot fill the slot at all.
fn consume_slot(slot: &SubcatSlot, candidate: &Arc<Sign>) -> Option<Consumed> {
    let shape_ok = match slot.cat {
        SlotCat::Np => {
            matches!(candidate.category, Category::Np | Category::Pp)
                && candidate.clause == Clause::NonClausal
        }
        SlotCat::CompS => {
            candidate.category == Category::CompS
                || (candidate.category == Category::Pp && candidate.clause == Clause::Clausal)
        }
        SlotCat::Infinitive => {
            candidate.category == Category::Vp && candidate.vform == VForm::Inf
        }
        SlotCat::Ap => matches!(candidate.category, Category::Ap | Category::Np),
    };
    if !shape_ok {
        return None;
    }

    if slot.role == Role::Attribute {
        // Attributes are agreement carriers, not marker-checked arguments.
        return Some(Consumed::Attribute(candidate.clone()));
    }

    let observed = &candidate.pform;
    let clausal = candidate.clause == Clause::Clausal;
    let mut extra: Option<Diagnosis> = None;

    match argument_marker_check(slot, candidate.animacy, observed, clausal) {
        PformOutcome::Ok => {}
        PformOutcome::Diagnose { code, right } => {
            extra = Some(marker_diagnosis(code, right, observed, candidate));
        }
        PformOutcome::NoMatch => return None,
    }

    let mut sealed = if candidate.finalized {
        (**candidate).clone()
    } else {
        diagnose::finalize(candidate)
    };
    // Remember which slot consumed this argument: error seeding inspects it.
    sealed.subcat = vec![slot.clone()];
    if let Some(diag) = extra {
        sealed.diagnoses.push(diag);
    }
    Some(Consumed::Argument(Arc::new(sealed)))
}

/// The full marker (introducer) check for a frame slot consuming an
/// argument: personal-`a` admissibility for direct objects first, then the
/// slot's own introducer pattern list.
pub fn argument_marker_check(
    slot: &SubcatSlot,
    animacy: Animacy,
    observed: &Pform,
    clausal: bool,
) -> PformOutcome {
    if slot.role == Role::Dobj && slot.cat == SlotCat::Np {
        match check_personal_a(slot, &FeatureValue::Animacy(animacy), observed) {
            PformOutcome::Ok => {
                // The personal marker sanctions a bare object, or `a` on an
                // animate one; any other introducer must still pass the
                // slot's own pattern list.
                let personal_a =
                    *observed == Pform::Prep("a".to_string()) && animacy == Animacy::Animate;
                if *observed != Pform::None && !personal_a {
                    return check_pform(slot, observed, clausal);
                }
                PformOutcome::Ok
            }
            other => other,
        }
    } else {
        check_pform(slot, observed, clausal)
    }
}

/// Build the diagnosis for a wrong, missing or spurious argument marker.
/// Omissions target the insertion point before the argument; present
/// markers target the introducing word itself.
fn marker_diagnosis(code: DiagCode, right: Pform, observed: &Pform, arg: &Sign) -> Diagnosis {
    let mut diag = Diagnosis::new(arg.span, code);
    diag.right_pform = Some(right);
    diag.observed_pform = Some(observed.clone());
    diag.targets = match code {
        DiagCode::PrepOmit | DiagCode::Queismo | DiagCode::PersAOmit => {
            vec![Span::new(arg.span.start, arg.span.start)]
        }
        _ => marker_leaf_span(arg, observed).into_iter().collect(),
    };
    diag
}

/// The leaf realizing an observed introducer: a preposition with that lemma,
/// or a fused preposition-article determiner carrying it as its pform.
pub fn marker_leaf_span(arg: &Sign, observed: &Pform) -> Option<Span> {
    arg.leaves().into_iter().find_map(|leaf| {
        let is_prep = leaf.category == Category::Prep
            && Pform::Prep(leaf.lemma.clone()) == *observed;
        let is_fused_det = leaf.category == Category::Det && leaf.pform == *observed;
        if is_prep || is_fused_det {
            Some(leaf.span)
        } else {
            None
        }
    })
}

/// Build the lexical sign for one dictionary record.
fn lexical_sign(entry: &LexEntry, tok: &Token, subcat: Vec<SubcatSlot>) -> Sign {
    Sign {
        category: entry.category,
        gender: diagnose::init_gender_track(entry),
        number: diagnose::init_number_track(entry),
        pform: entry.pform.clone(),
        animacy: entry.animacy,
        clause: Clause::NonClausal,
        inherent_gender: entry.inherent_gender,
        vform: entry.vform,
        pronominal: entry.pronominal,
        style_flag: entry.style_flag,
        lemma: entry.lemma.clone(),
        surface: tok.surface.clone(),
        span: tok.span,
        subcat,
        daughters: Vec::new(),
        diagnoses: Vec::new(),
        finalized: false,
        refeatured: false,
        rule_id: None,
    }
}

/// All ways to line up adjacent chart edges matching the rule's daughter
/// categories.  Returns edge indices, one sequence per match.
fn match_sequences(chart: &[Edge], categories: &[Category]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut partial = Vec::with_capacity(categories.len());
    extend_sequence(chart, categories, None, &mut partial, &mut out);
    out
}

fn extend_sequence(
    chart: &[Edge],
    categories: &[Category],
    at: Option<usize>,
    partial: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let Some(cat) = categories.first() else {
        out.push(partial.clone());
        return;
    };
    for (idx, edge) in chart.iter().enumerate() {
        if edge.sign.category != *cat {
            continue;
        }
        if let Some(pos) = at {
            if edge.start != pos {
                continue;
            }
        }
        partial.push(idx);
        extend_sequence(chart, &categories[1..], Some(edge.end), partial, out);
        partial.pop();
    }
}

/// Evaluate a rule constraint, returning all solutions (empty = rule blocked).
fn solve_constraint(rule: &Rule, daughters: &[Arc<Sign>]) -> Result<Vec<Binding>, ParseError> {
    let Some(constraint) = &rule.constraint else {
        return Ok(vec![Binding::new()]);
    };
    let env = build_env(rule, daughters);
    evaluate_with_env(rule, constraint, &env)
}

fn passes_constraint(rule: &Rule, daughters: &[Arc<Sign>]) -> Result<bool, ParseError> {
    Ok(!solve_constraint(rule, daughters)?.is_empty())
}

fn evaluate_with_env(
    rule: &Rule,
    constraint: &ConstraintExpr,
    env: &Binding,
) -> Result<Vec<Binding>, ParseError> {
    csolve::evaluate(constraint, env).map_err(|source| ParseError::Constraint {
        rule: rule.id.clone(),
        source,
    })
}

/// Bind the per-daughter constraint variables for a rule application.
fn build_env(rule: &Rule, daughters: &[Arc<Sign>]) -> Binding {
    let mut env = Binding::new();
    for (i, d) in daughters.iter().enumerate() {
        let tag = format!("D{}", i + 1);
        bind_daughter(&mut env, &tag, d);
        if i == rule.head_index {
            bind_daughter(&mut env, "HEAD", d);
        }
    }
    env
}

fn bind_daughter(env: &mut Binding, tag: &str, sign: &Sign) {
    let atom = |s: &str| Value::Atom(s.to_string());
    env.bind(&format!("LEMMA_{tag}"), atom(&sign.lemma));
    env.bind(&format!("SURFACE_{tag}"), atom(&sign.surface.to_lowercase()));
    env.bind(&format!("CAT_{tag}"), atom(sign.category.as_str()));
    env.bind(&format!("VFORM_{tag}"), atom(sign.vform.as_str()));
    env.bind(
        &format!("PRON_{tag}"),
        atom(if sign.pronominal { "yes" } else { "no" }),
    );
    env.bind(&format!("PFORM_{tag}"), atom(sign.pform.atom_name()));
    env.bind(
        &format!("ANIM_{tag}"),
        Value::Feature(FeatureValue::Animacy(sign.animacy)),
    );
    env.bind(
        &format!("CLAUSE_{tag}"),
        atom(match sign.clause {
            Clause::Clausal => "clausal",
            Clause::NonClausal => "nonclausal",
        }),
    );
    env.bind(
        &format!("INH_{tag}"),
        atom(if sign.inherent_gender { "yes" } else { "no" }),
    );
    env.bind(
        &format!("FLAG_{tag}"),
        atom(sign.style_flag.map(|f| f.as_str()).unwrap_or("none")),
    );
    env.bind(
        &format!("GEN_{tag}"),
        Value::Feature(sign.gender.h_value.clone()),
    );
    env.bind(
        &format!("GENM_{tag}"),
        Value::Feature(sign.gender.m_value.clone()),
    );
    env.bind(
        &format!("HGEN_SCORE_{tag}"),
        Value::Int(i64::from(sign.gender.h_score)),
    );
    env.bind(
        &format!("MGEN_SCORE_{tag}"),
        Value::Int(i64::from(sign.gender.m_score)),
    );
    env.bind(
        &format!("NUM_{tag}"),
        Value::Feature(sign.number.h_value.clone()),
    );
    env.bind(
        &format!("NUMM_{tag}"),
        Value::Feature(sign.number.m_value.clone()),
    );
    env.bind(
        &format!("HNUM_SCORE_{tag}"),
        Value::Int(i64::from(sign.number.h_score)),
    );
    env.bind(
        &format!("MNUM_SCORE_{tag}"),
        Value::Int(i64::from(sign.number.m_score)),
    );
}

/// Assemble the mother sign from a constraint solution.  Unbound mother
/// variables default to the head daughter's corresponding values; the
/// anticipated-opposite side of each track is rederived from the favored
/// value by the track constructor.
fn build_mother(rule: &Rule, daughters: &[Arc<Sign>], solution: &Binding) -> Result<Sign, ParseError> {
    let head = &daughters[rule.head_index];
    // A sealed head (e.g. the finalized clause under a complementizer) has
    // closed its agreement business; the projection starts over neutral.
    let neutral_gender = AgreementTrack::new(FeatureValue::Gender(Gender::MascFem), UNIT_SCORE, 0);
    let neutral_number = AgreementTrack::new(FeatureValue::Number(Number::SgPl), UNIT_SCORE, 0);
    let (default_gender, default_number) = if head.finalized {
        (&neutral_gender, &neutral_number)
    } else {
        (&head.gender, &head.number)
    };

    let gender = mother_track(rule, solution, "GEN", Domain::Gender, default_gender)?;
    let number = mother_track(rule, solution, "NUM", Domain::Number, default_number)?;

    let pform = match solution.get("PFORM_MOTHER") {
        Some(value) => pform_from_value(rule, value)?,
        None => head.pform.clone(),
    };

    let span = daughters
        .iter()
        .skip(1)
        .fold(daughters[0].span, |acc, d| Span::hull(acc, d.span));

    let mut diagnoses = Vec::new();
    if let Some(value) = solution.get("DIAG") {
        let name = atom_of(rule, "DIAG", value)?;
        let code = DiagCode::from_str(&name.to_uppercase()).map_err(|_| ParseError::BadBinding {
            rule: rule.id.clone(),
            variable: "DIAG".to_string(),
            expected: "diagnosis code",
        })?;
        let mut diag = Diagnosis::new(span, code);
        diag.targets = daughters.iter().map(|d| d.span).collect();
        if code == DiagCode::Portmanteau {
            let prep = Pform::Prep(daughters[0].lemma.clone());
            diag.right_pform = Some(prep.clone());
            diag.observed_pform = Some(prep);
        }
        diagnoses.push(diag);
    }

    let clause = if rule.mother == Category::CompS {
        Clause::Clausal
    } else {
        head.clause
    };
    let subcat = if rule.mother == Category::S {
        Vec::new()
    } else {
        head.subcat.clone()
    };
    let mut mother = Sign {
        category: rule.mother,
        gender,
        number,
        pform,
        animacy: head.animacy,
        clause,
        inherent_gender: head.inherent_gender && !head.finalized,
        vform: head.vform,
        pronominal: head.pronominal,
        style_flag: head.style_flag,
        lemma: head.lemma.clone(),
        surface: String::new(),
        span,
        subcat,
        daughters: daughters.to_vec(),
        diagnoses,
        finalized: false,
        refeatured: false,
        rule_id: Some(rule.id.clone()),
    };
    if rule.mother == Category::S {
        mother = diagnose::finalize(&mother);
    }
    Ok(mother)
}

/// Rebuild one mother agreement track from the solution bindings, falling
/// back to `default` slots for anything the constraint left unbound.
fn mother_track(
    rule: &Rule,
    solution: &Binding,
    feature: &str,
    domain: Domain,
    default: &AgreementTrack,
) -> Result<AgreementTrack, ParseError> {
    let value = match solution.get(&format!("{feature}_MOTHER")) {
        Some(v) => feature_from_value(rule, feature, domain, v)?,
        None => default.h_value.clone(),
    };
    let h_score = match solution.get(&format!("H{feature}_SCORE_MOTHER")) {
        Some(v) => score_of(rule, feature, v)?,
        None => default.h_score,
    };
    let m_score = match solution.get(&format!("M{feature}_SCORE_MOTHER")) {
        Some(v) => score_of(rule, feature, v)?,
        None => default.m_score,
    };
    Ok(AgreementTrack::new(value, h_score, m_score))
}

fn feature_from_value(
    rule: &Rule,
    variable: &str,
    domain: Domain,
    value: &Value,
) -> Result<FeatureValue, ParseError> {
    match value {
        Value::Feature(f) if f.domain() == domain => Ok(f.clone()),
        Value::Atom(name) => {
            FeatureValue::parse_atom(domain, name).map_err(|_| ParseError::BadBinding {
                rule: rule.id.clone(),
                variable: variable.to_string(),
                expected: "agreement feature value",
            })
        }
        _ => Err(ParseError::BadBinding {
            rule: rule.id.clone(),
            variable: variable.to_string(),
            expected: "agreement feature value",
        }),
    }
}

fn score_of(rule: &Rule, variable: &str, value: &Value) -> Result<u32, ParseError> {
    match value {
        Value::Int(i) if *i >= 0 => Ok(*i as u32),
        _ => Err(ParseError::BadBinding {
            rule: rule.id.clone(),
            variable: variable.to_string(),
            expected: "non-negative score",
        }),
    }
}

fn atom_of(rule: &Rule, variable: &str, value: &Value) -> Result<String, ParseError> {
    match value {
        Value::Atom(name) => Ok(name.clone()),
        Value::Feature(f) => Ok(f.atom_name().to_string()),
        _ => Err(ParseError::BadBinding {
            rule: rule.id.clone(),
            variable: variable.to_string(),
            expected: "atom",
        }),
    }
}

fn pform_from_value(rule: &Rule, value: &Value) -> Result<Pform, ParseError> {
    let name = atom_of(rule, "PFORM_MOTHER", value)?;
    Ok(if name == "none" {
        Pform::None
    } else {
        Pform::Prep(name)
    })
}

fn push_edge(chart: &mut Vec<Edge>, seen: &mut HashSet<(usize, usize, String)>, edge: Edge) -> bool {
    let key = (edge.start, edge.end, edge.sign.fingerprint());
    if seen.insert(key) {
        chart.push(edge);
        true
    } else {
        false
    }
}

/// Prefer readings with the fewest hard errors, then the fewest diagnoses of
/// any kind, then the smallest structure, then chart (rule) order.
fn select(candidates: Vec<Arc<Sign>>) -> Option<Arc<Sign>> {
    candidates
        .into_iter()
        .enumerate()
        .min_by_key(|(order, sign)| {
            let diags = tree_diagnoses(sign);
            let errors = diags
                .iter()
                .filter(|d| d.severity() == diagnose::Severity::Error)
                .count();
            (errors, diags.len(), sign.node_count(), *order)
        })
        .map(|(_, sign)| sign)
}

/// All diagnoses attached anywhere in the structure, outside-in.
pub fn tree_diagnoses(sign: &Sign) -> Vec<Diagnosis> {
    let mut out = Vec::new();
    collect_diagnoses(sign, &mut out);
    out
}

fn collect_diagnoses(sign: &Sign, out: &mut Vec<Diagnosis>) {
    out.extend(sign.diagnoses.iter().cloned());
    for d in &sign.daughters {
        collect_diagnoses(d, out);
    }
}
