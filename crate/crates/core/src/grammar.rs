//! Phrase-structure rules with attached constraint expressions, and the
//! core/satellite rule-set activation mechanism.
//!
//! Rule file format (UTF-8, `#` comment lines):
//!
//! ```text
//! rule <id> <ruleset> : <MOTHER> -> <D1> <D2*head> ... { <constraint> }
//! ```
//!
//! Exactly one daughter carries the `*head` marker. A trailing `+frame`
//! token (instead of further daughters) makes the rule frame-driven: after
//! the listed daughters match, the parser saturates the head verb's
//! subcategorization frame from the chart. The optional `{ ... }` block
//! holds a constraint in the [`crate::csolve`] text notation and may span
//! lines; a rule whose constraint binds the `DIAG` variable is an
//! anticipation rule — it exists to recognize a known incorrect or
//! questionable construction and labels the mother with that diagnosis.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::csolve::{parse_expr, ConstraintExpr};
use crate::fstruct::Category;

/// Which grammar a rule belongs to. Core rules are always active; exactly
/// one satellite is active at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSetId {
    Core,
    Standard,
    Administrative,
}

impl RuleSetId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleSetId::Core => "core",
            RuleSetId::Standard => "standard",
            RuleSetId::Administrative => "administrative",
        }
    }
}

/// The sublanguage the checker is configured for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sublanguage {
    #[default]
    Standard,
    Administrative,
}

impl Sublanguage {
    pub fn as_str(self) -> &'static str {
        match self {
            Sublanguage::Standard => "standard",
            Sublanguage::Administrative => "administrative",
        }
    }

    fn satellite(self) -> RuleSetId {
        match self {
            Sublanguage::Standard => RuleSetId::Standard,
            Sublanguage::Administrative => RuleSetId::Administrative,
        }
    }
}

impl FromStr for Sublanguage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Sublanguage::Standard),
            "administrative" => Ok(Sublanguage::Administrative),
            other => Err(format!(
                "unknown sublanguage `{other}` (expected standard or administrative)"
            )),
        }
    }
}

/// Per-sentence style-abuse limits; counts above a limit are diagnosed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StyleThresholds {
    pub passive_max: usize,
    pub gerund_max: usize,
    pub adverb_max: usize,
}

impl Default for StyleThresholds {
    fn default() -> Self {
        StyleThresholds {
            passive_max: 2,
            gerund_max: 2,
            adverb_max: 2,
        }
    }
}

impl FromStr for StyleThresholds {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err("expected three comma-separated counts: passive,gerund,adverb".into());
        }
        let parse = |p: &str| {
            p.parse::<usize>()
                .map_err(|_| format!("`{p}` is not a count"))
        };
        Ok(StyleThresholds {
            passive_max: parse(parts[0])?,
            gerund_max: parse(parts[1])?,
            adverb_max: parse(parts[2])?,
        })
    }
}

/// Checker configuration: active sublanguage and style limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckConfig {
    pub sublanguage: Sublanguage,
    pub style_thresholds: StyleThresholds,
}

/// One phrase-structure rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub id: String,
    pub mother: Category,
    pub daughters: Vec<Category>,
    /// Index into `daughters` of the head.
    pub head_index: usize,
    pub constraint: Option<ConstraintExpr>,
    pub ruleset: RuleSetId,
    /// True when the constraint labels the mother with a diagnosis: the
    /// rule recognizes a known-bad construction rather than a good one.
    pub anticipation: bool,
    /// True when the parser saturates the head's subcategorization frame
    /// after the listed daughters.
    pub frame_driven: bool,
    /// 1-based line of the `rule` header in its source file.
    pub line: usize,
}

impl Rule {
    /// For each daughter, whether the constraint mentions any of its
    /// agreement-track variables. Non-head nominal daughters whose tracks
    /// go unmentioned contribute no evidence upward, so the parser closes
    /// their agreement evaluation at consumption time.
    pub fn daughter_tracks_referenced(&self) -> Vec<bool> {
        let vars = match &self.constraint {
            Some(c) => c.variables(),
            None => Vec::new(),
        };
        (1..=self.daughters.len())
            .map(|i| {
                let mut names: Vec<String> = track_var_names(&format!("D{i}"));
                if i - 1 == self.head_index {
                    names.extend(track_var_names("HEAD"));
                }
                vars.iter().any(|v| names.iter().any(|n| n == v))
            })
            .collect()
    }
}

fn track_var_names(suffix: &str) -> Vec<String> {
    [
        "GEN_", "GENM_", "HGEN_SCORE_", "MGEN_SCORE_", "NUM_", "NUMM_", "HNUM_SCORE_",
        "MNUM_SCORE_",
    ]
    .iter()
    .map(|p| format!("{p}{suffix}"))
    .collect()
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ->", self.id, self.mother)?;
        for (i, d) in self.daughters.iter().enumerate() {
            write!(f, " {d}")?;
            if i == self.head_index {
                write!(f, "*head")?;
            }
        }
        if self.frame_driven {
            write!(f, " +frame")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GrammarError {
    #[error("cannot read grammar file `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("grammar line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn perr(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Parse {
        line,
        message: message.into(),
    }
}

/// The loaded rule inventory, in file order.
#[derive(Debug, Default)]
pub struct Grammar {
    rules: Vec<Rule>,
}

impl Grammar {
    pub fn load(path: &Path) -> Result<Grammar, GrammarError> {
        let src = std::fs::read_to_string(path).map_err(|source| GrammarError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Grammar::parse(&src)
    }

    /// The grammar fragment shipped with the library.
    pub fn builtin() -> Grammar {
        Grammar::parse(include_str!("../resources/grammar.rules"))
            .expect("the shipped grammar is well formed")
    }

    pub fn parse(src: &str) -> Result<Grammar, GrammarError> {
        let mut rules = Vec::new();
        let lines: Vec<&str> = src.lines().collect();
        let mut i = 0;
        while i < lines.len() {
            let line = lines[i].trim();
            if line.is_empty() || line.starts_with('#') {
                i += 1;
                continue;
            }
            if !line.starts_with("rule ") && line != "rule" {
                return Err(perr(i + 1, format!("expected a `rule` header, got `{line}`")));
            }
            // A constraint block, if any, opens with `{` on the header line
            // and the block runs until its braces balance.
            let start = i;
            let mut text = String::new();
            let mut depth = 0i32;
            let mut saw_brace = false;
            loop {
                let l = lines[i];
                for c in l.chars() {
                    match c {
                        '{' => {
                            depth += 1;
                            saw_brace = true;
                        }
                        '}' => depth -= 1,
                        _ => {}
                    }
                }
                text.push_str(l);
                text.push('\n');
                i += 1;
                if !saw_brace || depth == 0 {
                    break;
                }
                if i >= lines.len() {
                    return Err(perr(start + 1, "unterminated `{` block"));
                }
            }
            rules.push(parse_rule(&text, start + 1)?);
        }
        Ok(Grammar { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Core rules plus exactly the configured satellite's rules, in file
    /// order; the other satellite's rules are absent.
    pub fn active_rules(&self, config: &CheckConfig) -> Vec<&Rule> {
        let satellite = config.sublanguage.satellite();
        self.rules
            .iter()
            .filter(|r| r.ruleset == RuleSetId::Core || r.ruleset == satellite)
            .collect()
    }
}

fn parse_rule(text: &str, line: usize) -> Result<Rule, GrammarError> {
    let (header, constraint_text) = match text.find('{') {
        Some(open) => {
            let close = text
                .rfind('}')
                .ok_or_else(|| perr(line, "unterminated `{` block"))?;
            (&text[..open], Some(&text[open + 1..close]))
        }
        None => (text, None),
    };

    let header = header.trim();
    let rest = header
        .strip_prefix("rule")
        .ok_or_else(|| perr(line, "rule header must start with `rule`"))?
        .trim();
    let (front, daughters_text) = rest
        .split_once("->")
        .ok_or_else(|| perr(line, "rule header is missing `->`"))?;
    let (meta, mother_text) = front
        .split_once(':')
        .ok_or_else(|| perr(line, "rule header is missing `:` before the mother"))?;

    let meta_parts: Vec<&str> = meta.split_whitespace().collect();
    if meta_parts.len() != 2 {
        return Err(perr(line, "expected `rule <id> <ruleset> :`"));
    }
    let id = meta_parts[0].to_string();
    let ruleset = match meta_parts[1] {
        "core" => RuleSetId::Core,
        "standard" => RuleSetId::Standard,
        "administrative" => RuleSetId::Administrative,
        other => return Err(perr(line, format!("unknown ruleset `{other}`"))),
    };

    let mother: Category = mother_text
        .trim()
        .to_lowercase()
        .parse()
        .map_err(|e| perr(line, format!("{e}")))?;

    let mut daughters = Vec::new();
    let mut head_index = None;
    let mut frame_driven = false;
    for token in daughters_text.split_whitespace() {
        if token == "+frame" {
            frame_driven = true;
            continue;
        }
        if frame_driven {
            return Err(perr(line, "`+frame` must be the last daughter token"));
        }
        let (cat_text, is_head) = match token.strip_suffix("*head") {
            Some(t) => (t, true),
            None => (token, false),
        };
        let cat: Category = cat_text
            .to_lowercase()
            .parse()
            .map_err(|e| perr(line, format!("{e}")))?;
        if is_head {
            if head_index.is_some() {
                return Err(perr(line, "more than one daughter is marked *head"));
            }
            head_index = Some(daughters.len());
        }
        daughters.push(cat);
    }
    if daughters.is_empty() {
        return Err(perr(line, "rule has no daughters"));
    }
    let head_index = if daughters.len() == 1 {
        // A unary rule's only daughter is its head, marked or not.
        0
    } else {
        head_index.ok_or_else(|| perr(line, "no daughter is marked *head"))?
    };

    let constraint = match constraint_text {
        None => None,
        Some(t) if t.trim().is_empty() => None,
        Some(t) => Some(
            parse_expr(t.trim())
                .map_err(|e| perr(line, format!("in constraint of `{id}`: {e}")))?,
        ),
    };
    let anticipation = constraint
        .as_ref()
        .map(|c| c.variables().iter().any(|v| v == "DIAG"))
        .unwrap_or(false);

    Ok(Rule {
        id,
        mother,
        daughters,
        head_index,
        constraint,
        ruleset,
        anticipation,
        frame_driven,
        line,
    })
}
