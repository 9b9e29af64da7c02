//! Flat typed feature values, agreement tracks and linguistic signs.
//!
//! Feature values live in small per-domain lattices with an explicit top
//! element for the domains that can be underspecified (gender, number,
//! animacy). Unification is the lattice meet: top unifies with anything,
//! two distinct specific values fail. Agreement state is carried as a pair
//! of (value, score) slots per feature so that disagreement never blocks a
//! parse; it only accumulates evidence on the opposite track.

use std::fmt;
use std::sync::Arc;

use crate::diagnose::Diagnosis;
use crate::lexicon::{StyleFlag, SubcatSlot};

/// Feature domains. Gender and number are binary (plus top); the others
/// never take part in opposite-track bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Gender,
    Number,
    Pform,
    Animacy,
    Clause,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Domain::Gender => "gender",
            Domain::Number => "number",
            Domain::Pform => "pform",
            Domain::Animacy => "animacy",
            Domain::Clause => "clause",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Masc,
    Fem,
    /// Top element: common gender, compatible with both.
    MascFem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Number {
    Sg,
    Pl,
    /// Top element: number-invariant forms.
    SgPl,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(FeatureValue::Gender(*self).atom_name())
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(FeatureValue::Number(*self).atom_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Animacy {
    Animate,
    Inanimate,
    /// Top element.
    Any,
}

/// Preposition selection feature. A bare nominal argument carries `None`;
/// a prepositional argument carries the lemma of its preposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pform {
    None,
    Prep(String),
}

impl Pform {
    pub fn prep(lemma: &str) -> Self {
        Pform::Prep(lemma.to_string())
    }

    pub fn atom_name(&self) -> &str {
        match self {
            Pform::None => "none",
            Pform::Prep(p) => p,
        }
    }
}

impl fmt::Display for Pform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.atom_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clause {
    Clausal,
    NonClausal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureValue {
    Gender(Gender),
    Number(Number),
    Pform(Pform),
    Animacy(Animacy),
    Clause(Clause),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeatureError {
    /// Unifying values from two different domains is a bug in the caller,
    /// not a linguistic mismatch.
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    /// opposite() is only defined for the binary agreement domains.
    #[error("no opposite value in domain {0}")]
    NonBinaryDomain(Domain),
    #[error("unknown {domain} atom `{atom}`")]
    UnknownAtom { domain: Domain, atom: String },
}

impl FeatureValue {
    pub fn domain(&self) -> Domain {
        match self {
            FeatureValue::Gender(_) => Domain::Gender,
            FeatureValue::Number(_) => Domain::Number,
            FeatureValue::Pform(_) => Domain::Pform,
            FeatureValue::Animacy(_) => Domain::Animacy,
            FeatureValue::Clause(_) => Domain::Clause,
        }
    }

    /// The surface atom used in constraint expressions and resource files.
    pub fn atom_name(&self) -> &str {
        match self {
            FeatureValue::Gender(Gender::Masc) => "masc",
            FeatureValue::Gender(Gender::Fem) => "fem",
            FeatureValue::Gender(Gender::MascFem) => "masc_fem",
            FeatureValue::Number(Number::Sg) => "sg",
            FeatureValue::Number(Number::Pl) => "pl",
            FeatureValue::Number(Number::SgPl) => "sg_pl",
            FeatureValue::Animacy(Animacy::Animate) => "animate",
            FeatureValue::Animacy(Animacy::Inanimate) => "inanimate",
            FeatureValue::Animacy(Animacy::Any) => "any",
            FeatureValue::Clause(Clause::Clausal) => "clausal",
            FeatureValue::Clause(Clause::NonClausal) => "nonclausal",
            FeatureValue::Pform(p) => p.atom_name(),
        }
    }

    pub fn parse_atom(domain: Domain, atom: &str) -> Result<FeatureValue, FeatureError> {
        let v = match (domain, atom) {
            (Domain::Gender, "masc") => FeatureValue::Gender(Gender::Masc),
            (Domain::Gender, "fem") => FeatureValue::Gender(Gender::Fem),
            (Domain::Gender, "masc_fem") => FeatureValue::Gender(Gender::MascFem),
            (Domain::Number, "sg") => FeatureValue::Number(Number::Sg),
            (Domain::Number, "pl") => FeatureValue::Number(Number::Pl),
            (Domain::Number, "sg_pl") => FeatureValue::Number(Number::SgPl),
            (Domain::Animacy, "animate") => FeatureValue::Animacy(Animacy::Animate),
            (Domain::Animacy, "inanimate") => FeatureValue::Animacy(Animacy::Inanimate),
            (Domain::Animacy, "any") => FeatureValue::Animacy(Animacy::Any),
            (Domain::Clause, "clausal") => FeatureValue::Clause(Clause::Clausal),
            (Domain::Clause, "nonclausal") => FeatureValue::Clause(Clause::NonClausal),
            (Domain::Pform, "none") => FeatureValue::Pform(Pform::None),
            (Domain::Pform, p) => FeatureValue::Pform(Pform::prep(p)),
            (d, a) => {
                return Err(FeatureError::UnknownAtom {
                    domain: d,
                    atom: a.to_string(),
                })
            }
        };
        Ok(v)
    }

    /// True for the top element of a domain that has one.
    pub fn is_underspecified(&self) -> bool {
        matches!(
            self,
            FeatureValue::Gender(Gender::MascFem)
                | FeatureValue::Number(Number::SgPl)
                | FeatureValue::Animacy(Animacy::Any)
        )
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.atom_name())
    }
}

/// Lattice meet. `Ok(Some(v))` is the most specific common value,
/// `Ok(None)` a genuine unification failure, `Err` a caller bug.
pub fn unify_value(
    a: &FeatureValue,
    b: &FeatureValue,
) -> Result<Option<FeatureValue>, FeatureError> {
    if a.domain() != b.domain() {
        return Err(FeatureError::DomainMismatch(a.domain(), b.domain()));
    }
    if a == b {
        return Ok(Some(a.clone()));
    }
    if a.is_underspecified() {
        return Ok(Some(b.clone()));
    }
    if b.is_underspecified() {
        return Ok(Some(a.clone()));
    }
    Ok(None)
}

/// The anticipated disagreeing value: masc<->fem, sg<->pl. The top element
/// is its own opposite.
pub fn opposite(v: &FeatureValue) -> Result<FeatureValue, FeatureError> {
    match v {
        FeatureValue::Gender(Gender::Masc) => Ok(FeatureValue::Gender(Gender::Fem)),
        FeatureValue::Gender(Gender::Fem) => Ok(FeatureValue::Gender(Gender::Masc)),
        FeatureValue::Gender(Gender::MascFem) => Ok(FeatureValue::Gender(Gender::MascFem)),
        FeatureValue::Number(Number::Sg) => Ok(FeatureValue::Number(Number::Pl)),
        FeatureValue::Number(Number::Pl) => Ok(FeatureValue::Number(Number::Sg)),
        FeatureValue::Number(Number::SgPl) => Ok(FeatureValue::Number(Number::SgPl)),
        other => Err(FeatureError::NonBinaryDomain(other.domain())),
    }
}

/// Score type. Scores are non-negative multiples of ten; this is asserted
/// where tracks are built rather than encoded in the type.
pub type Score = u32;

/// Dual-track agreement state for one binary feature.
///
/// `h_value` is the value supported by the projection so far, `m_value` its
/// opposite, each with accumulated evidence. `m_value` is derived from
/// `h_value` at construction, so the track invariant (specific head value
/// implies opposite modifier value) holds everywhere by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AgreementTrack {
    pub h_value: FeatureValue,
    pub h_score: Score,
    pub m_value: FeatureValue,
    pub m_score: Score,
}

impl AgreementTrack {
    pub fn new(h_value: FeatureValue, h_score: Score, m_score: Score) -> AgreementTrack {
        debug_assert!(h_score % 10 == 0 && m_score % 10 == 0, "scores are multiples of ten");
        let m_value = opposite(&h_value).expect("agreement tracks live in binary domains");
        AgreementTrack {
            h_value,
            h_score,
            m_value,
            m_score,
        }
    }

    pub fn domain(&self) -> Domain {
        self.h_value.domain()
    }
}

impl fmt::Display for AgreementTrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{} {} | {} {}}}",
            self.h_value, self.h_score, self.m_value, self.m_score
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Det,
    N,
    Adj,
    V,
    Aux,
    Prep,
    Conj,
    Np,
    Nbar,
    Ap,
    Vp,
    Pp,
    S,
    CompS,
}

impl Category {
    pub const ALL: [Category; 14] = [
        Category::Det,
        Category::N,
        Category::Adj,
        Category::V,
        Category::Aux,
        Category::Prep,
        Category::Conj,
        Category::Np,
        Category::Nbar,
        Category::Ap,
        Category::Vp,
        Category::Pp,
        Category::S,
        Category::CompS,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Det => "det",
            Category::N => "n",
            Category::Adj => "adj",
            Category::V => "v",
            Category::Aux => "aux",
            Category::Prep => "prep",
            Category::Conj => "conj",
            Category::Np => "np",
            Category::Nbar => "nbar",
            Category::Ap => "ap",
            Category::Vp => "vp",
            Category::Pp => "pp",
            Category::S => "s",
            Category::CompS => "comp_s",
        }
    }

    pub fn is_lexical(&self) -> bool {
        matches!(
            self,
            Category::Det
                | Category::N
                | Category::Adj
                | Category::V
                | Category::Aux
                | Category::Prep
                | Category::Conj
        )
    }
}

impl std::str::FromStr for Category {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .iter()
            .find(|c| c.as_str() == s.to_ascii_lowercase())
            .copied()
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verb form. `Fin` for agreeing finite forms; participles are adjectival
/// entries marked `Part` so the passive rule can require them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum VForm {
    #[default]
    NotVerbal,
    Fin,
    Inf,
    Ger,
    Part,
}

impl VForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            VForm::NotVerbal => "none",
            VForm::Fin => "fin",
            VForm::Inf => "inf",
            VForm::Ger => "ger",
            VForm::Part => "part",
        }
    }
}

/// Character span, half open, relative to the document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn hull(a: Span, b: Span) -> Span {
        Span::new(a.start.min(b.start), a.end.max(b.end))
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// A lexical or phrasal sign. Signs are immutable once built and shared
/// between chart edges through `Arc`.
#[derive(Debug, Clone)]
pub struct Sign {
    pub category: Category,
    pub gender: AgreementTrack,
    pub number: AgreementTrack,
    pub pform: Pform,
    pub animacy: Animacy,
    pub clause: Clause,
    pub inherent_gender: bool,
    pub vform: VForm,
    pub pronominal: bool,
    /// Style marker inherited from the head's dictionary record.
    pub style_flag: Option<StyleFlag>,
    pub lemma: String,
    pub surface: String,
    pub span: Span,
    /// Remaining subcategorization demands; `[subject]` on a saturated VP.
    pub subcat: Vec<SubcatSlot>,
    pub daughters: Vec<Arc<Sign>>,
    pub diagnoses: Vec<Diagnosis>,
    /// True once agreement has been evaluated; such a sign must not be
    /// combined into further agreement computation.
    pub finalized: bool,
    /// Set by the correction transfer when the sign must be re-inflected.
    pub refeatured: bool,
    /// Identifier of the grammar rule that built this phrase; `None` on
    /// lexical signs.
    pub rule_id: Option<String>,
}

impl Sign {
    pub fn is_lexical(&self) -> bool {
        self.daughters.is_empty()
    }

    /// Phrasal spans must cover exactly their daughters.
    pub fn check_span_invariant(&self) -> bool {
        if self.is_lexical() {
            return true;
        }
        let first = self.daughters.first().map(|d| d.span.start);
        let last = self.daughters.last().map(|d| d.span.end);
        Some(self.span.start) == first && Some(self.span.end) == last
    }

    /// Number of signs in this subtree, the edge-count used by parse
    /// selection.
    pub fn node_count(&self) -> usize {
        1 + self.daughters.iter().map(|d| d.node_count()).sum::<usize>()
    }

    /// In-order lexical leaves of the subtree.
    pub fn leaves(&self) -> Vec<&Sign> {
        let mut out = Vec::new();
        collect_leaves(self, &mut out);
        out
    }

    /// Stable structural key used for chart deduplication.
    pub fn fingerprint(&self) -> String {
        let mut s = String::new();
        fingerprint_into(self, &mut s);
        s
    }
}

fn collect_leaves<'a>(sign: &'a Sign, out: &mut Vec<&'a Sign>) {
    if sign.is_lexical() {
        out.push(sign);
    } else {
        for d in &sign.daughters {
            collect_leaves(d, out);
        }
    }
}

fn fingerprint_into(sign: &Sign, out: &mut String) {
    use std::fmt::Write;
    let _ = write!(
        out,
        "({}:{}:{}@{}-{} g{} n{} p{} f{}",
        sign.category,
        sign.lemma,
        sign.vform.as_str(),
        sign.span.start,
        sign.span.end,
        sign.gender,
        sign.number,
        sign.pform,
        sign.finalized as u8,
    );
    for slot in &sign.subcat {
        let _ = write!(out, " s{}:{}", slot.role.as_str(), slot.cat.as_str());
        for p in &slot.pforms {
            let _ = write!(out, ":{}", p.atom_name());
        }
    }
    for diag in &sign.diagnoses {
        let _ = write!(
            out,
            " d{}:{}",
            diag.code,
            diag.right_pform
                .as_ref()
                .map(|p| p.atom_name())
                .unwrap_or("-")
        );
    }
    for d in &sign.daughters {
        fingerprint_into(d, out);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: Gender) -> FeatureValue {
        FeatureValue::Gender(v)
    }
    fn n(v: Number) -> FeatureValue {
        FeatureValue::Number(v)
    }

    #[test]
    fn meet_with_top_yields_specific() {
        assert_eq!(
            unify_value(&g(Gender::MascFem), &g(Gender::Fem)).unwrap(),
            Some(g(Gender::Fem))
        );
        assert_eq!(
            unify_value(&n(Number::Sg), &n(Number::SgPl)).unwrap(),
            Some(n(Number::Sg))
        );
    }

    #[test]
    fn distinct_specific_values_fail() {
        assert_eq!(unify_value(&g(Gender::Masc), &g(Gender::Fem)).unwrap(), None);
        assert_eq!(unify_value(&n(Number::Pl), &n(Number::Sg)).unwrap(), None);
    }

    #[test]
    fn cross_domain_is_an_error_not_a_failure() {
        let err = unify_value(&g(Gender::Masc), &n(Number::Sg)).unwrap_err();
        assert_eq!(err, FeatureError::DomainMismatch(Domain::Gender, Domain::Number));
    }

    #[test]
    fn unify_is_commutative_and_idempotent() {
        let gender = [g(Gender::Masc), g(Gender::Fem), g(Gender::MascFem)];
        let number = [n(Number::Sg), n(Number::Pl), n(Number::SgPl)];
        for dom in [&gender[..], &number[..]] {
            for a in dom {
                assert_eq!(unify_value(a, a).unwrap(), Some(a.clone()));
                for b in dom {
                    assert_eq!(unify_value(a, b).unwrap(), unify_value(b, a).unwrap());
                }
            }
        }
    }

    #[test]
    fn opposite_is_an_involution_fixing_top() {
        for v in [g(Gender::Masc), g(Gender::Fem), n(Number::Sg), n(Number::Pl)] {
            let o = opposite(&v).unwrap();
            assert_ne!(o, v);
            assert_eq!(opposite(&o).unwrap(), v);
        }
        for v in [g(Gender::MascFem), n(Number::SgPl)] {
            assert_eq!(opposite(&v).unwrap(), v);
        }
        assert!(opposite(&FeatureValue::Animacy(Animacy::Animate)).is_err());
    }

    #[test]
    fn track_constructor_derives_the_opposite_slot() {
        let t = AgreementTrack::new(g(Gender::Fem), 50, 0);
        assert_eq!(t.m_value, g(Gender::Masc));
        let t = AgreementTrack::new(g(Gender::MascFem), 10, 0);
        assert_eq!(t.m_value, g(Gender::MascFem));
    }

    #[test]
    fn pform_atoms_round_trip() {
        let p = FeatureValue::parse_atom(Domain::Pform, "con").unwrap();
        assert_eq!(p, FeatureValue::Pform(Pform::prep("con")));
        assert_eq!(p.atom_name(), "con");
        let none = FeatureValue::parse_atom(Domain::Pform, "none").unwrap();
        assert_eq!(none, FeatureValue::Pform(Pform::None));
    }

    #[test]
    fn category_names_round_trip() {
        for c in Category::ALL {
            assert_eq!(c.as_str().parse::<Category>().unwrap(), c);
        }
        assert!("adv".parse::<Category>().is_err());
    }
}
