//! A tiny all-solutions constraint language over atoms, integers, lists and
//! feature values.
//!
//! Grammar rules attach expressions in this language instead of performing
//! hard feature checks, which is what lets agreement errors survive parsing
//! as scored evidence. Evaluation enumerates every solution environment,
//! depth first and left to right, with duplicates removed; `or` never
//! commits to its first branch.
//!
//! The same module owns the textual notation used in the grammar rule file
//! (`and(...)`, `or(...)`, `=(...)`, `num_add(...)`, ...) and the four
//! canonical score templates (assignment, percolation, final evaluation,
//! error typing) that the direct scoring functions in `diagnose` are tested
//! against.

use std::collections::BTreeMap;
use std::fmt;

use crate::fstruct::{unify_value, Domain, FeatureError, FeatureValue};

/// A term in an expression: a variable, or a literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Atom(String),
    Int(i64),
    List(Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }
    pub fn atom(name: &str) -> Term {
        Term::Atom(name.to_string())
    }
}

/// A runtime value bound to a variable.
///
/// `Var` only appears as an alias link between two unbound variables that
/// were unified with each other; solutions returned to callers are walked,
/// so callers observe atoms, integers, lists and feature values only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value {
    Atom(String),
    Int(i64),
    List(Vec<Value>),
    Feature(FeatureValue),
    Var(String),
}

impl Value {
    pub fn atom(name: &str) -> Value {
        Value::Atom(name.to_string())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_feature(&self) -> Option<&FeatureValue> {
        match self {
            Value::Feature(f) => Some(f),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => f.write_str(a),
            Value::Int(i) => write!(f, "{i}"),
            Value::Feature(v) => write!(f, "{v}"),
            Value::Var(v) => write!(f, "{v}"),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Constraint expressions. `And`/`Or` are binary; the text notation allows
/// n-ary forms and desugars them right-nested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintExpr {
    And(Box<ConstraintExpr>, Box<ConstraintExpr>),
    Or(Box<ConstraintExpr>, Box<ConstraintExpr>),
    Eq(Term, Term),
    NumAdd(Term, Term, Term),
    NumGt(Term, Term),
    First(Term, Term),
    MemberTail(Term, Term),
}

impl ConstraintExpr {
    pub fn and(l: ConstraintExpr, r: ConstraintExpr) -> ConstraintExpr {
        ConstraintExpr::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: ConstraintExpr, r: ConstraintExpr) -> ConstraintExpr {
        ConstraintExpr::Or(Box::new(l), Box::new(r))
    }

    /// All variable names mentioned anywhere in the expression.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        fn term(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                Term::List(items) => items.iter().for_each(|t| term(t, out)),
                _ => {}
            }
        }
        match self {
            ConstraintExpr::And(l, r) | ConstraintExpr::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            ConstraintExpr::Eq(a, b) | ConstraintExpr::NumGt(a, b) => {
                term(a, out);
                term(b, out);
            }
            ConstraintExpr::NumAdd(a, b, c) => {
                term(a, out);
                term(b, out);
                term(c, out);
            }
            ConstraintExpr::First(l, x) | ConstraintExpr::MemberTail(l, x) => {
                term(l, out);
                term(x, out);
            }
        }
    }
}

/// A solution environment: variable name to value, at most one binding per
/// variable. Unification may refine an existing feature binding to a more
/// specific value of the same domain.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Binding {
    map: BTreeMap<String, Value>,
}

impl Binding {
    pub fn new() -> Binding {
        Binding::default()
    }

    pub fn bind(&mut self, name: &str, value: Value) {
        self.map.insert(name.to_string(), value);
    }

    pub fn with(mut self, name: &str, value: Value) -> Binding {
        self.bind(name, value);
        self
    }

    /// Resolved value of a variable: alias chains are walked; `None` means
    /// unbound.
    pub fn get(&self, name: &str) -> Option<&Value> {
        let mut key = name;
        let mut hops = 0;
        loop {
            match self.map.get(key) {
                Some(Value::Var(next)) => {
                    key = next;
                    hops += 1;
                    debug_assert!(hops <= self.map.len(), "alias cycle");
                }
                other => return other,
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.map.iter()
    }

    /// Root of the alias chain starting at `name`, plus its value if any.
    fn walk(&self, name: &str) -> (String, Option<Value>) {
        let mut key = name.to_string();
        loop {
            match self.map.get(&key) {
                Some(Value::Var(next)) => key = next.clone(),
                Some(v) => return (key, Some(v.clone())),
                None => return (key, None),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    /// num_add / num_gt consumed a term that is not a ground integer.
    #[error("non-ground numeric term `{term}` in {op}")]
    NonGroundNumeric { op: &'static str, term: String },
    /// first / member_tail consumed a term that is not a ground list.
    #[error("non-ground list term `{term}` in {op}")]
    NonGroundList { op: &'static str, term: String },
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

/// A term resolved against an environment: either the root of an unbound
/// variable chain, or a ground value tagged with the variable that holds it
/// (if it came from one) so refinement can rebind it.
enum Resolved {
    Unbound(String),
    Ground(Option<String>, Value),
}

fn resolve(term: &Term, env: &Binding) -> Result<Resolved, EvalError> {
    match term {
        Term::Var(name) => {
            let (root, value) = env.walk(name);
            Ok(match value {
                Some(v) => Resolved::Ground(Some(root), v),
                None => Resolved::Unbound(root),
            })
        }
        Term::Atom(a) => Ok(Resolved::Ground(None, Value::Atom(a.clone()))),
        Term::Int(i) => Ok(Resolved::Ground(None, Value::Int(*i))),
        Term::List(items) => {
            let mut vals = Vec::with_capacity(items.len());
            for it in items {
                match resolve(it, env)? {
                    Resolved::Ground(_, v) => vals.push(v),
                    Resolved::Unbound(name) => {
                        return Err(EvalError::NonGroundList {
                            op: "list literal",
                            term: name,
                        })
                    }
                }
            }
            Ok(Resolved::Ground(None, Value::List(vals)))
        }
    }
}

/// Ground-value unification. Feature values meet in their lattice and the
/// meet is written back through `rebind`; a feature value and a plain atom
/// compare by exact atom name, which is what makes `=(G, masc_fem)` a test
/// for literal underspecification rather than compatibility.
fn unify_ground(
    a: (Option<String>, Value),
    b: (Option<String>, Value),
    env: &mut Binding,
) -> Result<bool, EvalError> {
    let (va, a_val) = a;
    let (vb, b_val) = b;
    match (&a_val, &b_val) {
        (Value::Feature(fa), Value::Feature(fb)) => match unify_value(fa, fb)? {
            None => Ok(false),
            Some(meet) => {
                let meet = Value::Feature(meet);
                if let Some(name) = va {
                    env.bind(&name, meet.clone());
                }
                if let Some(name) = vb {
                    env.bind(&name, meet);
                }
                Ok(true)
            }
        },
        (Value::Feature(f), Value::Atom(at)) | (Value::Atom(at), Value::Feature(f)) => {
            Ok(f.atom_name() == at)
        }
        (Value::List(xs), Value::List(ys)) => {
            if xs.len() != ys.len() {
                return Ok(false);
            }
            for (x, y) in xs.iter().zip(ys) {
                if !unify_ground((None, x.clone()), (None, y.clone()), env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(a_val == b_val),
    }
}

fn unify_terms(t1: &Term, t2: &Term, env: &Binding) -> Result<Option<Binding>, EvalError> {
    let r1 = resolve(t1, env)?;
    let r2 = resolve(t2, env)?;
    let mut out = env.clone();
    let ok = match (r1, r2) {
        (Resolved::Unbound(a), Resolved::Unbound(b)) => {
            if a != b {
                out.bind(&a, Value::Var(b));
            }
            true
        }
        (Resolved::Unbound(a), Resolved::Ground(_, v))
        | (Resolved::Ground(_, v), Resolved::Unbound(a)) => {
            out.bind(&a, v);
            true
        }
        (Resolved::Ground(va, a), Resolved::Ground(vb, b)) => {
            unify_ground((va, a), (vb, b), &mut out)?
        }
    };
    Ok(ok.then_some(out))
}

fn ground_int(term: &Term, env: &Binding, op: &'static str) -> Result<i64, EvalError> {
    match resolve(term, env)? {
        Resolved::Ground(_, Value::Int(i)) => Ok(i),
        Resolved::Ground(_, v) => Err(EvalError::NonGroundNumeric {
            op,
            term: v.to_string(),
        }),
        Resolved::Unbound(name) => Err(EvalError::NonGroundNumeric { op, term: name }),
    }
}

fn ground_list(term: &Term, env: &Binding, op: &'static str) -> Result<Vec<Value>, EvalError> {
    match resolve(term, env)? {
        Resolved::Ground(_, Value::List(items)) => Ok(items),
        Resolved::Ground(_, v) => Err(EvalError::NonGroundList {
            op,
            term: v.to_string(),
        }),
        Resolved::Unbound(name) => Err(EvalError::NonGroundList { op, term: name }),
    }
}

fn push_dedup(out: &mut Vec<Binding>, sol: Binding) {
    if !out.contains(&sol) {
        out.push(sol);
    }
}

/// Every solution of `expr` under `env`, ordered depth first, left branch
/// first, duplicates removed. Failure is the empty list; `Err` is reserved
/// for ill-formed programs (non-ground numerics, cross-domain features).
pub fn evaluate(expr: &ConstraintExpr, env: &Binding) -> Result<Vec<Binding>, EvalError> {
    let mut out = Vec::new();
    match expr {
        ConstraintExpr::And(l, r) => {
            for left in evaluate(l, env)? {
                for sol in evaluate(r, &left)? {
                    push_dedup(&mut out, sol);
                }
            }
        }
        ConstraintExpr::Or(l, r) => {
            for sol in evaluate(l, env)? {
                push_dedup(&mut out, sol);
            }
            for sol in evaluate(r, env)? {
                push_dedup(&mut out, sol);
            }
        }
        ConstraintExpr::Eq(a, b) => {
            if let Some(sol) = unify_terms(a, b, env)? {
                out.push(sol);
            }
        }
        ConstraintExpr::NumAdd(a, b, c) => {
            let x = ground_int(a, env, "num_add")?;
            let y = ground_int(b, env, "num_add")?;
            if let Some(sol) = unify_terms(c, &Term::Int(x + y), env)? {
                out.push(sol);
            }
        }
        ConstraintExpr::NumGt(a, b) => {
            let x = ground_int(a, env, "num_gt")?;
            let y = ground_int(b, env, "num_gt")?;
            if x > y {
                out.push(env.clone());
            }
        }
        ConstraintExpr::First(list, x) => {
            let items = ground_list(list, env, "first")?;
            if let Some(head) = items.first() {
                if let Some(sol) = unify_with_value(x, head, env)? {
                    out.push(sol);
                }
            }
        }
        ConstraintExpr::MemberTail(list, x) => {
            let items = ground_list(list, env, "member_tail")?;
            for item in items.iter().skip(1) {
                if let Some(sol) = unify_with_value(x, item, env)? {
                    push_dedup(&mut out, sol);
                }
            }
        }
    }
    Ok(out)
}

fn unify_with_value(t: &Term, v: &Value, env: &Binding) -> Result<Option<Binding>, EvalError> {
    let mut out = env.clone();
    match resolve(t, env)? {
        Resolved::Unbound(name) => {
            out.bind(&name, v.clone());
            Ok(Some(out))
        }
        Resolved::Ground(var, g) => {
            Ok(unify_ground((var, g), (None, v.clone()), &mut out)?.then_some(out))
        }
    }
}

// --- textual notation -----------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("constraint syntax error at {pos}: {message}")]
pub struct ExprParseError {
    pub pos: usize,
    pub message: String,
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> ExprParser<'a> {
    fn new(src: &'a str) -> Self {
        ExprParser {
            chars: src.chars().collect(),
            pos: 0,
            src,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprParseError> {
        Err(ExprParseError {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> Result<(), ExprParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_alphanumeric() || c == '_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn expr(&mut self) -> Result<ConstraintExpr, ExprParseError> {
        self.skip_ws();
        if self.peek() == Some('=') {
            self.pos += 1;
            let (a, b) = self.two_args()?;
            return Ok(ConstraintExpr::Eq(a, b));
        }
        let name = self.ident();
        if name.is_empty() {
            return self.err("expected operator");
        }
        match name.as_str() {
            "and" | "or" => {
                let args = self.expr_args()?;
                if args.len() < 2 {
                    return self.err(format!("`{name}` needs at least two arguments"));
                }
                let mut it = args.into_iter().rev();
                let mut acc = it.next().unwrap();
                for e in it {
                    acc = if name == "and" {
                        ConstraintExpr::and(e, acc)
                    } else {
                        ConstraintExpr::or(e, acc)
                    };
                }
                Ok(acc)
            }
            "num_add" => {
                let args = self.term_args(3)?;
                let mut it = args.into_iter();
                Ok(ConstraintExpr::NumAdd(
                    it.next().unwrap(),
                    it.next().unwrap(),
                    it.next().unwrap(),
                ))
            }
            "num_gt" => {
                let (a, b) = self.two_args()?;
                Ok(ConstraintExpr::NumGt(a, b))
            }
            "first" => {
                let (a, b) = self.two_args()?;
                Ok(ConstraintExpr::First(a, b))
            }
            "member_tail" => {
                let (a, b) = self.two_args()?;
                Ok(ConstraintExpr::MemberTail(a, b))
            }
            other => self.err(format!("unknown operator `{other}`")),
        }
    }

    fn two_args(&mut self) -> Result<(Term, Term), ExprParseError> {
        let args = self.term_args(2)?;
        let mut it = args.into_iter();
        Ok((it.next().unwrap(), it.next().unwrap()))
    }

    fn expr_args(&mut self) -> Result<Vec<ConstraintExpr>, ExprParseError> {
        self.eat('(')?;
        let mut out = vec![self.expr()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    out.push(self.expr()?);
                }
                Some(')') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return self.err("expected `,` or `)`"),
            }
        }
    }

    fn term_args(&mut self, n: usize) -> Result<Vec<Term>, ExprParseError> {
        self.eat('(')?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.eat(',')?;
            }
            out.push(self.term()?);
        }
        self.eat(')')?;
        Ok(out)
    }

    fn term(&mut self) -> Result<Term, ExprParseError> {
        self.skip_ws();
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let mut items = Vec::new();
                self.skip_ws();
                if self.peek() == Some(']') {
                    self.pos += 1;
                    return Ok(Term::List(items));
                }
                loop {
                    items.push(self.term()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => {
                            self.pos += 1;
                            return Ok(Term::List(items));
                        }
                        _ => return self.err("expected `,` or `]`"),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() || c == '-' => {
                let start = self.pos;
                if c == '-' {
                    self.pos += 1;
                }
                while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                match text.parse() {
                    Ok(i) => Ok(Term::Int(i)),
                    Err(_) => self.err(format!("bad integer `{text}`")),
                }
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = self.ident();
                // Prolog convention: capitalized or underscore-initial
                // identifiers are variables, the rest atoms.
                if c.is_uppercase() || c == '_' {
                    Ok(Term::Var(name))
                } else {
                    Ok(Term::Atom(name))
                }
            }
            _ => self.err(format!("expected a term in `{}`", self.src)),
        }
    }
}

/// Parse the textual notation into an expression tree.
pub fn parse_expr(src: &str) -> Result<ConstraintExpr, ExprParseError> {
    let mut p = ExprParser::new(src);
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return p.err("trailing input after expression");
    }
    Ok(expr)
}

// --- canonical score templates ---------------------------------------------

/// Score assignment for a lexical head: inherent-gender heads anchor gender
/// with weight 50, everything else weighs 10, and dependents start with an
/// empty opposite track.
const ASSIGN: &str = "\
and(=(Score_number_head,10),
    and(or(and(=(Inherentness_head,yes), =(Score_gender_head,50)),
           and(=(Inherentness_head,no),  =(Score_gender_head,10))),
        =(Score_number_mod,0)))";

/// Score percolation for one binary feature. First branch: the dependent
/// agrees (or is underspecified) and both tracks add up slot-wise. Second
/// branch: the dependent matches the anticipated opposite value and the
/// score contributions cross over.
const PERCOLATE_GENDER: &str = "\
or(and(or(=(Gender_head_mother,Gender_mod), =(Gender_mod,masc_fem)),
       and(num_add(MGEN_SCORE_HEAD,MGEN_SCORE_MOD,MGEN_SCORE_MOTHER),
           and(=(Gender_mod_head,Gender_mod_mother),
               num_add(HGEN_SCORE_HEAD,HGEN_SCORE_MOD,HGEN_SCORE_MOTHER)))),
   and(=(Gender_mod,Gender_mod_head),
       and(num_add(HGEN_SCORE_HEAD,MGEN_SCORE_MOD,HGEN_SCORE_MOTHER),
           and(=(Gender_mod_head,Gender_mod_mother),
               num_add(MGEN_SCORE_HEAD,HGEN_SCORE_MOD,MGEN_SCORE_MOTHER)))))";

const PERCOLATE_NUMBER: &str = "\
or(and(or(=(Number_head_mother,Number_mod), =(Number_mod,sg_pl)),
       and(num_add(MNUM_SCORE_HEAD,MNUM_SCORE_MOD,MNUM_SCORE_MOTHER),
           and(=(Number_mod_head,Number_mod_mother),
               num_add(HNUM_SCORE_HEAD,HNUM_SCORE_MOD,HNUM_SCORE_MOTHER)))),
   and(=(Number_mod,Number_mod_head),
       and(num_add(HNUM_SCORE_HEAD,MNUM_SCORE_MOD,HNUM_SCORE_MOTHER),
           and(=(Number_mod_head,Number_mod_mother),
               num_add(MNUM_SCORE_HEAD,HNUM_SCORE_MOD,MNUM_SCORE_MOTHER)))))";

/// Final evaluation: for each feature the heavier track names the right
/// value; on a tie neither branch binds it, leaving both resolutions open.
const FINAL_EVAL: &str = "\
and(or(or(and(num_gt(HGEN_SCORE_NOUN,MGEN_SCORE_NOUN), =(Gender_Noun,Right_Gender)),
          and(num_gt(MGEN_SCORE_NOUN,HGEN_SCORE_NOUN), =(Gender_Mod,Right_Gender))),
       =(HGEN_SCORE_NOUN,MGEN_SCORE_NOUN)),
    or(or(and(num_gt(HNUM_SCORE_NOUN,MNUM_SCORE_NOUN), =(Number_Noun,Right_Number)),
          and(num_gt(MNUM_SCORE_NOUN,HNUM_SCORE_NOUN), =(Number_Mod,Right_Number))),
       =(HNUM_SCORE_NOUN,MNUM_SCORE_NOUN)))";

/// Error typing from the two opposite-track scores of a finalized node.
const ERTYPE: &str = "\
or(and(=(MNUM_SCORE_MOTHER,0),
       or(=(MGEN_SCORE_MOTHER,0),
          and(num_gt(MGEN_SCORE_MOTHER,0), =(ERTYPE,gender)))),
   and(num_gt(MNUM_SCORE_MOTHER,0),
       or(and(=(MGEN_SCORE_MOTHER,0), =(ERTYPE,number)),
          and(num_gt(MGEN_SCORE_MOTHER,0), =(ERTYPE,gender_number)))))";

/// The four canonical score templates, keyed by name: `assign`,
/// `percolate_gender`, `percolate_number`, `final`, `ertype`.
pub struct CanonicalTemplates {
    entries: Vec<(&'static str, ConstraintExpr)>,
}

impl CanonicalTemplates {
    pub fn template(&self, name: &str) -> Option<&ConstraintExpr> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, e)| e)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|(n, _)| *n)
    }
}

pub fn canonical_templates() -> CanonicalTemplates {
    let parse = |src| parse_expr(src).expect("canonical templates are well formed");
    CanonicalTemplates {
        entries: vec![
            ("assign", parse(ASSIGN)),
            ("percolate_gender", parse(PERCOLATE_GENDER)),
            ("percolate_number", parse(PERCOLATE_NUMBER)),
            ("final", parse(FINAL_EVAL)),
            ("ertype", parse(ERTYPE)),
        ],
    }
}

/// Convenience for tests and callers that seed environments with feature
/// values parsed from atoms.
pub fn feature(domain: Domain, atom: &str) -> Value {
    Value::Feature(FeatureValue::parse_atom(domain, atom).expect("valid feature atom"))
}
