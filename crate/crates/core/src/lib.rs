//! Grammar and style checking for Spanish.
//!
//! The library parses sentences with a unification-based chart parser whose
//! agreement features are deliberately soft: instead of rejecting a
//! mismatched determiner or adjective, each nominal projection carries two
//! score-weighted hypotheses per feature (the head's value and its
//! anticipated opposite) and the evidence accumulates as the tree grows.
//! After parsing, the heavier hypothesis names the correct value, the
//! lighter one the offending words, and the same machinery drives automatic
//! rewriting of the sentence. Wrong prepositions, missing or spurious
//! personal `a`, uncontracted `de el`/`a el`, and a set of style weaknesses
//! are diagnosed alongside.
//!
//! Module map:
//! - [`fstruct`]: feature values, agreement tracks, categories, signs.
//! - [`csolve`]: the all-solutions constraint language rules are written in.
//! - [`lexicon`]: dictionary with paradigms and subcategorization frames.
//! - [`grammar`]: rule file format and rule sets.
//! - [`parser`]: tokenizer and the exhaustive bottom-up chart parser.
//! - [`diagnose`]: scoring, error typing, diagnoses and messages.
//! - [`correct`]: tree transfer and surface synthesis of corrections.
//! - [`pipeline`]: end-to-end document checking.
//! - [`inject`]: seeded error injection for regression corpora.

pub mod correct;
pub mod csolve;
pub mod diagnose;
pub mod fstruct;
pub mod grammar;
pub mod inject;
pub mod lexicon;
pub mod parser;
pub mod pipeline;
