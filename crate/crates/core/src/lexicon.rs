//! The dictionary: surface↔lemma maps, agreement features with
//! inherentness, animacy, inflection paradigms for synthesis,
//! subcategorization frames whose preposition lists anticipate known
//! mistakes, and style flags.
//!
//! File format (UTF-8, one record per line, `#` starts a comment line):
//!
//! ```text
//! surface<TAB>lemma<TAB>category<TAB>key=value;key=value;...
//! ```
//!
//! Keys: `gender`, `number`, `inherent`, `inherent_num`, `animacy`,
//! `pform`, `flag`, `vform`, `pron`, `paradigm` (inline cells
//! `msg:chico,fsg:chica,mpl:chicos,fpl:chicas` or `sg:casa,pl:casas`),
//! and `frame` (repeatable; slots `|`-separated, each
//! `role:cat:pform1,pform2:animacy`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use crate::fstruct::{Animacy, Category, Gender, Number, Pform, VForm};

/// What kind of constituent an argument slot accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotCat {
    /// A nominal (or prepositional) argument.
    Np,
    /// A finite clausal argument (bare or preposition-introduced).
    CompS,
    /// An infinitival verb phrase.
    Infinitive,
    /// A predicative adjective phrase.
    Ap,
}

impl SlotCat {
    pub fn as_str(self) -> &'static str {
        match self {
            SlotCat::Np => "np",
            SlotCat::CompS => "comp_s",
            SlotCat::Infinitive => "infinitive",
            SlotCat::Ap => "ap",
        }
    }
}

/// Grammatical function of an argument slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Subject,
    Dobj,
    Iobj,
    Oblique,
    Attribute,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Subject => "subject",
            Role::Dobj => "dobj",
            Role::Iobj => "iobj",
            Role::Oblique => "oblique",
            Role::Attribute => "attribute",
        }
    }
}

/// One argument requirement. `pforms` is ordered: the first member is the
/// correct introducing preposition (`none` for a bare argument) and every
/// later member is an anticipated wrong choice worth diagnosing rather
/// than rejecting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcatSlot {
    pub role: Role,
    pub cat: SlotCat,
    pub pforms: Vec<Pform>,
    pub animacy: Animacy,
}

impl SubcatSlot {
    /// The correct introducer.
    pub fn correct_pform(&self) -> &Pform {
        &self.pforms[0]
    }

    pub fn is_clausal(&self) -> bool {
        self.cat == SlotCat::CompS
    }
}

/// An ordered argument list for one reading of a predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcatFrame {
    pub slots: Vec<SubcatSlot>,
}

impl SubcatFrame {
    /// The subject slot, if the frame declares one.
    pub fn subject(&self) -> Option<&SubcatSlot> {
        self.slots.iter().find(|s| s.role == Role::Subject)
    }

    /// Non-subject slots in declaration order.
    pub fn complements(&self) -> impl Iterator<Item = &SubcatSlot> {
        self.slots.iter().filter(|s| s.role != Role::Subject)
    }
}

/// Lexically attached style markers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StyleFlag {
    Latinism,
    ForeignDerived,
    ForeignReplaceable,
    Cognitive,
    Verbose,
    MannerAdverb,
    Gerund,
    PassiveAux,
}

impl StyleFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            StyleFlag::Latinism => "latinism",
            StyleFlag::ForeignDerived => "foreign_derived",
            StyleFlag::ForeignReplaceable => "foreign_replaceable",
            StyleFlag::Cognitive => "cognitive",
            StyleFlag::Verbose => "verbose",
            StyleFlag::MannerAdverb => "manner_adverb",
            StyleFlag::Gerund => "gerund",
            StyleFlag::PassiveAux => "passive_aux",
        }
    }

    fn parse(s: &str) -> Option<StyleFlag> {
        Some(match s {
            "latinism" => StyleFlag::Latinism,
            "foreign_derived" => StyleFlag::ForeignDerived,
            "foreign_replaceable" => StyleFlag::ForeignReplaceable,
            "cognitive" => StyleFlag::Cognitive,
            "verbose" => StyleFlag::Verbose,
            "manner_adverb" => StyleFlag::MannerAdverb,
            "gerund" => StyleFlag::Gerund,
            "passive_aux" => StyleFlag::PassiveAux,
            _ => return None,
        })
    }

    /// Flags diagnosed as lexical weaknesses on sight.
    pub fn is_lexical_weakness(self) -> bool {
        matches!(
            self,
            StyleFlag::Latinism
                | StyleFlag::ForeignDerived
                | StyleFlag::ForeignReplaceable
                | StyleFlag::Cognitive
                | StyleFlag::Verbose
        )
    }
}

/// An inflection table. Gender-inflecting words declare four cells,
/// gender-invariant words two; cells map to full surface forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Paradigm {
    GenderNumber(BTreeMap<(Gender, Number), String>),
    NumberOnly(BTreeMap<Number, String>),
}

impl Paradigm {
    /// Surface form for a cell; gender is ignored by number-only tables.
    pub fn cell(&self, gender: Gender, number: Number) -> Option<&str> {
        match self {
            Paradigm::GenderNumber(map) => map.get(&(gender, number)).map(String::as_str),
            Paradigm::NumberOnly(map) => map.get(&number).map(String::as_str),
        }
    }

    /// Every declared cell as (gender, number, surface); number-only
    /// tables report the entry-independent underspecified gender.
    pub fn cells(&self) -> Vec<(Gender, Number, &str)> {
        match self {
            Paradigm::GenderNumber(map) => map
                .iter()
                .map(|(&(g, n), s)| (g, n, s.as_str()))
                .collect(),
            Paradigm::NumberOnly(map) => map
                .iter()
                .map(|(&n, s)| (Gender::MascFem, n, s.as_str()))
                .collect(),
        }
    }

    pub fn inflects_gender(&self) -> bool {
        matches!(self, Paradigm::GenderNumber(_))
    }

    fn expected_cell_count(&self) -> usize {
        match self {
            Paradigm::GenderNumber(_) => 4,
            Paradigm::NumberOnly(_) => 2,
        }
    }

    fn len(&self) -> usize {
        match self {
            Paradigm::GenderNumber(m) => m.len(),
            Paradigm::NumberOnly(m) => m.len(),
        }
    }
}

/// One dictionary record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub surface: String,
    pub lemma: String,
    pub category: Category,
    pub gender: Gender,
    pub inherent_gender: bool,
    pub number: Number,
    pub inherent_number: bool,
    pub animacy: Animacy,
    pub pform: Pform,
    pub vform: VForm,
    pub pronominal: bool,
    pub frames: Vec<SubcatFrame>,
    pub style_flag: Option<StyleFlag>,
    pub paradigm: Option<Paradigm>,
    /// 1-based line number of the declaring record, for reporting.
    pub line: usize,
}

impl fmt::Display for LexEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} {})", self.surface, self.lemma, self.category)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read lexicon file `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {message}")]
    Line { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InflectError {
    #[error("no inflection paradigm for ({lemma}, {category})")]
    NoParadigm { lemma: String, category: Category },
    #[error("paradigm for ({lemma}, {category}) has no cell ({gender}, {number})")]
    MissingCell {
        lemma: String,
        category: Category,
        gender: Gender,
        number: Number,
    },
}

/// A non-fatal observation made during load (duplicate records).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadWarning {
    pub line: usize,
    pub message: String,
}

/// An invariant violation found by [`Lexicon::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// The loaded dictionary: immutable, surface-indexed, case-insensitive.
#[derive(Debug, Default)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    by_surface: HashMap<String, Vec<usize>>,
    /// First-declared paradigm per (lemma, category), for synthesis when
    /// no specific source record is known.
    first_paradigm: HashMap<(String, Category), usize>,
    warnings: Vec<LoadWarning>,
}

impl Lexicon {
    pub fn load(path: &Path) -> Result<Lexicon, LexiconError> {
        let src = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Lexicon::parse(&src)
    }

    pub fn parse(src: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::default();
        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let entry = parse_record(line, line_no)?;
            lex.insert(entry);
        }
        Ok(lex)
    }

    fn insert(&mut self, entry: LexEntry) {
        if let Some(prev) = self
            .entries
            .iter()
            .position(|e| records_equal(e, &entry))
        {
            self.warnings.push(LoadWarning {
                line: entry.line,
                message: format!(
                    "duplicate record for `{}` (first declared on line {}); keeping the later one",
                    entry.surface, self.entries[prev].line
                ),
            });
            let first_line = self.entries[prev].line;
            self.entries[prev] = entry;
            self.entries[prev].line = first_line;
            return;
        }
        let idx = self.entries.len();
        self.by_surface
            .entry(fold_case(&entry.surface))
            .or_default()
            .push(idx);
        if entry.paradigm.is_some() {
            self.first_paradigm
                .entry((entry.lemma.clone(), entry.category))
                .or_insert(idx);
        }
        self.entries.push(entry);
    }

    pub fn warnings(&self) -> &[LoadWarning] {
        &self.warnings
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// All entries whose surface matches, case-insensitively; empty when
    /// the word is unknown.
    pub fn lookup(&self, surface: &str) -> Vec<&LexEntry> {
        self.by_surface
            .get(&fold_case(surface))
            .map(|ids| ids.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    /// The entry declaring exactly this (surface, lemma, category), if any.
    pub fn entry_for(&self, surface: &str, lemma: &str, category: Category) -> Option<&LexEntry> {
        self.lookup(surface)
            .into_iter()
            .find(|e| e.lemma == lemma && e.category == category)
    }

    /// Synthesize a surface form from the first-declared paradigm of
    /// (lemma, category).
    pub fn inflect(
        &self,
        lemma: &str,
        category: Category,
        gender: Gender,
        number: Number,
    ) -> Result<String, InflectError> {
        let idx = self
            .first_paradigm
            .get(&(lemma.to_string(), category))
            .copied()
            .ok_or_else(|| InflectError::NoParadigm {
                lemma: lemma.to_string(),
                category,
            })?;
        cell_or_err(&self.entries[idx], gender, number)
    }

    /// Synthesize a surface form preferring the paradigm declared on the
    /// record for `surface` itself, so words whose lemma spans several
    /// inflection series (tense forms of one verb) stay in their series.
    pub fn inflect_for_surface(
        &self,
        surface: &str,
        lemma: &str,
        category: Category,
        gender: Gender,
        number: Number,
    ) -> Result<String, InflectError> {
        match self.entry_for(surface, lemma, category) {
            Some(entry) if entry.paradigm.is_some() => cell_or_err(entry, gender, number),
            _ => self.inflect(lemma, category, gender, number),
        }
    }

    /// Check every lexicon-level invariant, reporting one violation per
    /// finding. An empty result means the dictionary is sound.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for entry in &self.entries {
            let mut report = |message: String| {
                out.push(Violation {
                    line: entry.line,
                    message,
                })
            };
            if entry.inherent_gender && entry.gender == Gender::MascFem {
                report(format!(
                    "`{}`: inherent gender declared but gender is underspecified",
                    entry.surface
                ));
            }
            if entry.inherent_number && entry.number == Number::SgPl {
                report(format!(
                    "`{}`: inherent number declared but number is underspecified",
                    entry.surface
                ));
            }
            for (fi, frame) in entry.frames.iter().enumerate() {
                let subjects = frame
                    .slots
                    .iter()
                    .filter(|s| s.role == Role::Subject)
                    .count();
                if subjects > 1 {
                    report(format!(
                        "`{}` frame {}: more than one subject slot",
                        entry.surface,
                        fi + 1
                    ));
                }
                for slot in &frame.slots {
                    for (i, p) in slot.pforms.iter().enumerate() {
                        if slot.pforms[..i].contains(p) {
                            report(format!(
                                "`{}` frame {}: duplicate pform `{}` in {} slot",
                                entry.surface,
                                fi + 1,
                                p.atom_name(),
                                slot.role.as_str()
                            ));
                        }
                    }
                }
            }
            if let Some(paradigm) = &entry.paradigm {
                if paradigm.len() != paradigm.expected_cell_count() {
                    report(format!(
                        "`{}`: paradigm declares {} of {} cells",
                        entry.surface,
                        paradigm.len(),
                        paradigm.expected_cell_count()
                    ));
                }
                for (gender, number, surface) in paradigm.cells() {
                    let gender = if paradigm.inflects_gender() {
                        gender
                    } else {
                        entry.gender
                    };
                    let hit = self.lookup(surface).into_iter().any(|e| {
                        e.lemma == entry.lemma
                            && e.category == entry.category
                            && e.gender == gender
                            && e.number == number
                    });
                    if !hit {
                        report(format!(
                            "`{}`: paradigm cell ({}, {}) = `{}` has no matching record for lemma `{}`",
                            entry.surface, gender, number, surface, entry.lemma
                        ));
                    }
                }
            }
        }
        out
    }
}

fn cell_or_err(entry: &LexEntry, gender: Gender, number: Number) -> Result<String, InflectError> {
    entry
        .paradigm
        .as_ref()
        .and_then(|p| p.cell(gender, number))
        .map(str::to_string)
        .ok_or_else(|| InflectError::MissingCell {
            lemma: entry.lemma.clone(),
            category: entry.category,
            gender,
            number,
        })
}

/// Two records are duplicates when every declared field matches.
fn records_equal(a: &LexEntry, b: &LexEntry) -> bool {
    let key = |e: &LexEntry| {
        (
            e.surface.clone(),
            e.lemma.clone(),
            e.category,
            e.gender,
            e.inherent_gender,
            e.number,
            e.inherent_number,
            e.animacy,
            e.pform.clone(),
            e.vform,
            e.pronominal,
        )
    };
    key(a) == key(b) && a.frames == b.frames && a.style_flag == b.style_flag && a.paradigm == b.paradigm
}

fn fold_case(s: &str) -> String {
    s.to_lowercase()
}

// --- record parsing ---------------------------------------------------------

fn line_err(line: usize, message: impl Into<String>) -> LexiconError {
    LexiconError::Line {
        line,
        message: message.into(),
    }
}

fn parse_record(line: &str, line_no: usize) -> Result<LexEntry, LexiconError> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() < 3 || fields.len() > 4 {
        return Err(line_err(
            line_no,
            format!(
                "expected 3 or 4 tab-separated fields (surface, lemma, category[, attributes]), got {}",
                fields.len()
            ),
        ));
    }
    let surface = fields[0].trim();
    let lemma = fields[1].trim();
    if surface.is_empty() || lemma.is_empty() {
        return Err(line_err(line_no, "empty surface or lemma field"));
    }
    let category: Category = fields[2]
        .trim()
        .parse()
        .map_err(|e| line_err(line_no, format!("{e}")))?;
    if !category.is_lexical() {
        return Err(line_err(
            line_no,
            format!("`{category}` is a phrasal category; lexicon records must be lexical"),
        ));
    }

    let mut entry = LexEntry {
        surface: surface.to_string(),
        lemma: lemma.to_string(),
        category,
        gender: Gender::MascFem,
        inherent_gender: false,
        number: Number::SgPl,
        inherent_number: false,
        animacy: default_animacy(category),
        pform: Pform::None,
        vform: VForm::default(),
        pronominal: false,
        frames: Vec::new(),
        style_flag: None,
        paradigm: None,
        line: line_no,
    };

    let attrs = fields.get(3).map(|s| s.trim()).unwrap_or("");
    if attrs.is_empty() {
        return Ok(entry);
    }

    let mut seen: Vec<&str> = Vec::new();
    for pair in attrs.split(';') {
        let pair = pair.trim();
        if pair.is_empty() {
            continue;
        }
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| line_err(line_no, format!("attribute `{pair}` is not key=value")))?;
        let (key, value) = (key.trim(), value.trim());
        if key != "frame" {
            if seen.contains(&key) {
                return Err(line_err(line_no, format!("duplicate attribute `{key}`")));
            }
            seen.push(key);
        }
        match key {
            "gender" => entry.gender = parse_gender(value, line_no)?,
            "number" => entry.number = parse_number(value, line_no)?,
            "inherent" => entry.inherent_gender = parse_yes_no(value, line_no)?,
            "inherent_num" => entry.inherent_number = parse_yes_no(value, line_no)?,
            "animacy" => {
                entry.animacy = match value {
                    "animate" => Animacy::Animate,
                    "inanimate" => Animacy::Inanimate,
                    "any" => Animacy::Any,
                    _ => return Err(line_err(line_no, format!("unknown animacy `{value}`"))),
                }
            }
            "pform" => {
                entry.pform = if value == "none" {
                    Pform::None
                } else {
                    Pform::Prep(value.to_string())
                }
            }
            "flag" => {
                entry.style_flag = Some(
                    StyleFlag::parse(value)
                        .ok_or_else(|| line_err(line_no, format!("unknown flag `{value}`")))?,
                )
            }
            "vform" => {
                entry.vform = match value {
                    "fin" => VForm::Fin,
                    "inf" => VForm::Inf,
                    "ger" => VForm::Ger,
                    "part" => VForm::Part,
                    _ => return Err(line_err(line_no, format!("unknown vform `{value}`"))),
                }
            }
            "pron" => entry.pronominal = parse_yes_no(value, line_no)?,
            "paradigm" => entry.paradigm = Some(parse_paradigm(value, line_no)?),
            "frame" => entry.frames.push(parse_frame(value, line_no)?),
            _ => return Err(line_err(line_no, format!("unknown attribute key `{key}`"))),
        }
    }
    Ok(entry)
}

fn default_animacy(category: Category) -> Animacy {
    match category {
        // Most concrete Spanish nouns denote things; animates are tagged
        // explicitly in the dictionary.
        Category::N => Animacy::Inanimate,
        _ => Animacy::Any,
    }
}

fn parse_gender(value: &str, line: usize) -> Result<Gender, LexiconError> {
    match value {
        "masc" => Ok(Gender::Masc),
        "fem" => Ok(Gender::Fem),
        "masc_fem" => Ok(Gender::MascFem),
        _ => Err(line_err(line, format!("unknown gender `{value}`"))),
    }
}

fn parse_number(value: &str, line: usize) -> Result<Number, LexiconError> {
    match value {
        "sg" => Ok(Number::Sg),
        "pl" => Ok(Number::Pl),
        "sg_pl" => Ok(Number::SgPl),
        _ => Err(line_err(line, format!("unknown number `{value}`"))),
    }
}

fn parse_yes_no(value: &str, line: usize) -> Result<bool, LexiconError> {
    match value {
        "yes" => Ok(true),
        "no" => Ok(false),
        _ => Err(line_err(line, format!("expected yes/no, got `{value}`"))),
    }
}

fn parse_paradigm(value: &str, line: usize) -> Result<Paradigm, LexiconError> {
    let mut gn: BTreeMap<(Gender, Number), String> = BTreeMap::new();
    let mut n: BTreeMap<Number, String> = BTreeMap::new();
    for cell in value.split(',') {
        let cell = cell.trim();
        if cell.is_empty() {
            continue;
        }
        let (key, form) = cell
            .split_once(':')
            .ok_or_else(|| line_err(line, format!("paradigm cell `{cell}` is not key:form")))?;
        let form = form.trim().to_string();
        match key.trim() {
            "msg" => gn.insert((Gender::Masc, Number::Sg), form),
            "fsg" => gn.insert((Gender::Fem, Number::Sg), form),
            "mpl" => gn.insert((Gender::Masc, Number::Pl), form),
            "fpl" => gn.insert((Gender::Fem, Number::Pl), form),
            "sg" => n.insert(Number::Sg, form),
            "pl" => n.insert(Number::Pl, form),
            other => {
                return Err(line_err(
                    line,
                    format!("unknown paradigm cell `{other}` (expected msg/fsg/mpl/fpl or sg/pl)"),
                ))
            }
        };
    }
    match (gn.is_empty(), n.is_empty()) {
        (false, true) => Ok(Paradigm::GenderNumber(gn)),
        (true, false) => Ok(Paradigm::NumberOnly(n)),
        (true, true) => Err(line_err(line, "empty paradigm")),
        (false, false) => Err(line_err(
            line,
            "paradigm mixes gender-number cells with number-only cells",
        )),
    }
}

fn parse_frame(value: &str, line: usize) -> Result<SubcatFrame, LexiconError> {
    let mut slots = Vec::new();
    for slot_text in value.split('|') {
        let parts: Vec<&str> = slot_text.trim().split(':').collect();
        if parts.len() != 4 {
            return Err(line_err(
                line,
                format!("frame slot `{slot_text}` must be role:cat:pforms:animacy"),
            ));
        }
        let role = match parts[0] {
            "subject" => Role::Subject,
            "dobj" => Role::Dobj,
            "iobj" => Role::Iobj,
            "oblique" => Role::Oblique,
            "attribute" => Role::Attribute,
            other => return Err(line_err(line, format!("unknown slot role `{other}`"))),
        };
        let cat = match parts[1] {
            "np" => SlotCat::Np,
            "comp_s" => SlotCat::CompS,
            "infinitive" => SlotCat::Infinitive,
            "ap" => SlotCat::Ap,
            other => return Err(line_err(line, format!("unknown slot category `{other}`"))),
        };
        let pforms: Vec<Pform> = parts[2]
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|p| {
                if p == "none" {
                    Pform::None
                } else {
                    Pform::Prep(p.to_string())
                }
            })
            .collect();
        if pforms.is_empty() {
            return Err(line_err(
                line,
                format!("frame slot `{slot_text}` has an empty pform list"),
            ));
        }
        let animacy = match parts[3] {
            "animate" => Animacy::Animate,
            "inanimate" => Animacy::Inanimate,
            "any" => Animacy::Any,
            other => return Err(line_err(line, format!("unknown slot animacy `{other}`"))),
        };
        slots.push(SubcatSlot {
            role,
            cat,
            pforms,
            animacy,
        });
    }
    Ok(SubcatFrame { slots })
}
