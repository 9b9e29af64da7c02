//! Correction realization: transducing a diagnosed parse into corrected
//! sentence variants and regenerating surface text.
//!
//! The transfer works on the lexical leaf stream of the selected parse.
//! Agreement solutions re-inflect exactly their target leaves through the
//! dictionary paradigms; marker (preposition) diagnoses insert, delete or
//! replace the introducing word; uncontracted portmanteau sequences are fused
//! by a final contraction pass.  Everything else — token order, capitalization
//! of untouched words, terminal punctuation — is preserved.

use std::collections::BTreeMap;

use crate::diagnose::{DiagCode, Diagnosis};
use crate::fstruct::{Category, FeatureValue, Gender, Number, Pform, Sign, Span};
use crate::lexicon::Lexicon;
use crate::parser::tree_diagnoses;

/// One corrected variant of a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correction {
    /// The word span of the sentence in the document.
    pub span: Span,
    /// The corrected sentence text, terminal punctuation included.
    pub text: String,
    /// Position in the deterministic enumeration of solution combinations.
    pub solution_index: usize,
    /// What was changed: one (code, description) entry per applied edit.
    pub applied: Vec<(DiagCode, String)>,
}

/// Hard cap on correction variants per sentence: a tie in both features
/// yields the full 2x2 cross product and nothing should yield more.
pub const MAX_CORRECTIONS: usize = 4;

/// Marker edits derived from preposition-family diagnoses.
#[derive(Debug, Clone)]
enum MarkerEdit {
    /// Insert a preposition before the argument (omission family).
    Insert { at: usize, text: String, code: DiagCode },
    /// Remove a spurious marker (addition family).
    Delete { span: Span, code: DiagCode },
    /// Replace a wrong marker with the right one (substitution).
    Replace { span: Span, text: String, code: DiagCode },
}

/// A renderable token: its original document span (empty for insertions)
/// and its current surface text.
#[derive(Debug, Clone)]
struct RenderCell {
    span: Span,
    text: String,
}

/// Compute every corrected variant of the selected parse, in deterministic
/// order (agreement diagnoses in tree order; per diagnosis, its solutions in
/// enumeration order — gender resolutions outer, number inner).  Returns an
/// empty list when the sentence needs no text change or when a change cannot
/// be realized (missing paradigm cell): the diagnosis then stands on its own
/// as a suggestion.
pub fn corrections(
    lexicon: &Lexicon,
    selected: &Sign,
    terminal_punctuation: &str,
) -> Vec<Correction> {
    let diags = tree_diagnoses(selected);

    let agreement: Vec<&Diagnosis> = diags
        .iter()
        .filter(|d| d.code.is_agreement() && !d.solutions.is_empty())
        .collect();

    let mut marker_edits = Vec::new();
    for diag in &diags {
        match derive_marker_edit(diag) {
            MarkerDerivation::NotAMarker => {}
            MarkerDerivation::Edit(edit) => marker_edits.push(edit),
            // An unlocatable marker cannot be edited; the whole sentence
            // stays suggestion-only rather than emitting a half correction.
            MarkerDerivation::Unrealizable => return Vec::new(),
        }
    }

    let leaves: Vec<&Sign> = selected.leaves();
    let mut out: Vec<Correction> = Vec::new();
    let combos = solution_combinations(&agreement);
    for (solution_index, combo) in combos.into_iter().enumerate().take(MAX_CORRECTIONS) {
        let mut applied: Vec<(DiagCode, String)> = Vec::new();
        let mut refeature: BTreeMap<Span, (Option<Gender>, Option<Number>)> = BTreeMap::new();
        for (diag, sol_idx) in agreement.iter().zip(&combo) {
            let sol = &diag.solutions[*sol_idx];
            for target in &sol.targets {
                let slot = refeature.entry(*target).or_insert((None, None));
                slot.0 = slot.0.or(sol.right_gender);
                slot.1 = slot.1.or(sol.right_number);
            }
            applied.push((diag.code, describe_solution(sol)));
        }

        let Some(mut cells) = render_leaves(lexicon, &leaves, &refeature) else {
            continue; // a paradigm cell was missing; skip this variant
        };
        for edit in &marker_edits {
            if !apply_marker_edit(&mut cells, edit, &mut applied) {
                return Vec::new();
            }
        }
        contract(&mut cells);

        let mut text = join_cells(&cells);
        text.push_str(terminal_punctuation);
        if out.iter().any(|c| c.text == text) {
            continue;
        }
        out.push(Correction {
            span: selected.span,
            text,
            solution_index,
            applied,
        });
    }

    // A "correction" identical to the original text (style-only sentences)
    // says nothing; drop it.
    let original = original_text(&leaves, terminal_punctuation);
    out.retain(|c| c.text != original);
    out
}

/// Render the untouched sentence from its parse: the identity synthesis used
/// by the round-trip property and by style-only sentences.
pub fn synthesize_unchanged(selected: &Sign, terminal_punctuation: &str) -> String {
    original_text(&selected.leaves(), terminal_punctuation)
}

/// Fuse uncontracted portmanteau sequences in a plain token stream:
/// the textual correction for sentences that did not parse but still show
/// "de el" / "a el".
pub fn contract_surfaces(words: &[&str], terminal_punctuation: &str) -> String {
    let mut cells: Vec<RenderCell> = words
        .iter()
        .map(|w| RenderCell {
            span: Span::new(0, 0),
            text: (*w).to_string(),
        })
        .collect();
    contract(&mut cells);
    let mut text = join_cells(&cells);
    text.push_str(terminal_punctuation);
    text
}

fn original_text(leaves: &[&Sign], terminal_punctuation: &str) -> String {
    let mut text = leaves
        .iter()
        .map(|l| l.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    text.push_str(terminal_punctuation);
    text
}

/// All combinations of solution indices across the agreement diagnoses, in
/// enumeration order (first diagnosis outermost).
fn solution_combinations(agreement: &[&Diagnosis]) -> Vec<Vec<usize>> {
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for diag in agreement {
        let mut next = Vec::new();
        for combo in &combos {
            for idx in 0..diag.solutions.len() {
                let mut extended = combo.clone();
                extended.push(idx);
                next.push(extended);
            }
        }
        combos = next;
    }
    combos
}

fn describe_solution(sol: &crate::diagnose::AgrSolution) -> String {
    let mut parts = Vec::new();
    if let Some(g) = sol.right_gender {
        parts.push(format!("gender -> {}", FeatureValue::Gender(g).atom_name()));
    }
    if let Some(n) = sol.right_number {
        parts.push(format!("number -> {}", FeatureValue::Number(n).atom_name()));
    }
    parts.join(", ")
}

enum MarkerDerivation {
    NotAMarker,
    Edit(MarkerEdit),
    Unrealizable,
}

fn derive_marker_edit(diag: &Diagnosis) -> MarkerDerivation {
    let omission = matches!(
        diag.code,
        DiagCode::PrepOmit | DiagCode::Queismo | DiagCode::PersAOmit
    );
    let presence = matches!(
        diag.code,
        DiagCode::PrepSubst | DiagCode::PrepAdd | DiagCode::Dequeismo | DiagCode::PersAAdd
    );
    if !omission && !presence {
        return MarkerDerivation::NotAMarker;
    }
    let Some(target) = diag.targets.first().copied() else {
        return MarkerDerivation::Unrealizable;
    };
    if omission {
        match &diag.right_pform {
            Some(Pform::Prep(p)) => MarkerDerivation::Edit(MarkerEdit::Insert {
                at: target.start,
                text: p.clone(),
                code: diag.code,
            }),
            _ => MarkerDerivation::Unrealizable,
        }
    } else {
        match &diag.right_pform {
            Some(Pform::None) => MarkerDerivation::Edit(MarkerEdit::Delete {
                span: target,
                code: diag.code,
            }),
            Some(Pform::Prep(p)) => MarkerDerivation::Edit(MarkerEdit::Replace {
                span: target,
                text: p.clone(),
                code: diag.code,
            }),
            None => MarkerDerivation::Unrealizable,
        }
    }
}

/// Render every leaf, re-inflecting the ones in the refeature map.  Returns
/// `None` when a required paradigm cell does not exist.
fn render_leaves(
    lexicon: &Lexicon,
    leaves: &[&Sign],
    refeature: &BTreeMap<Span, (Option<Gender>, Option<Number>)>,
) -> Option<Vec<RenderCell>> {
    let mut cells = Vec::with_capacity(leaves.len());
    for leaf in leaves {
        let text = match refeature.get(&leaf.span) {
            None => leaf.surface.clone(),
            Some((g_opt, n_opt)) => {
                let gender = g_opt.unwrap_or_else(|| leaf_gender(leaf));
                let number = n_opt.unwrap_or_else(|| leaf_number(leaf));
                let fused = match &leaf.pform {
                    Pform::Prep(p)
                        if leaf.category == Category::Det
                            && fused_article(&leaf.surface).is_some() =>
                    {
                        Some(p.clone())
                    }
                    _ => None,
                };
                let inflected = match &fused {
                    // A fused preposition-article re-inflects its article
                    // part and splits off the preposition: `del` -> `de la`.
                    Some(prep) => {
                        let article = lexicon
                            .inflect(&leaf.lemma, Category::Det, gender, number)
                            .ok()?;
                        format!("{prep} {article}")
                    }
                    None => lexicon
                        .inflect_for_surface(
                            &leaf.surface,
                            &leaf.lemma,
                            leaf.category,
                            gender,
                            number,
                        )
                        .ok()?,
                };
                preserve_initial_case(&leaf.surface, &inflected)
            }
        };
        cells.push(RenderCell {
            span: leaf.span,
            text,
        });
    }
    Some(cells)
}

fn leaf_gender(leaf: &Sign) -> Gender {
    match leaf.gender.h_value {
        FeatureValue::Gender(g) => g,
        _ => Gender::MascFem,
    }
}

fn leaf_number(leaf: &Sign) -> Number {
    match leaf.number.h_value {
        FeatureValue::Number(n) => n,
        _ => Number::SgPl,
    }
}

/// Copy an uppercase initial from the original word onto its replacement.
fn preserve_initial_case(original: &str, replacement: &str) -> String {
    let orig_upper = original
        .chars()
        .next()
        .map(|c| c.is_uppercase())
        .unwrap_or(false);
    if !orig_upper {
        return replacement.to_string();
    }
    let mut chars = replacement.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Apply one marker edit to the cell stream.  Returns false when the edit's
/// target cannot be found (the correction is then abandoned).
fn apply_marker_edit(
    cells: &mut Vec<RenderCell>,
    edit: &MarkerEdit,
    applied: &mut Vec<(DiagCode, String)>,
) -> bool {
    match edit {
        MarkerEdit::Insert { at, text, code } => {
            let Some(pos) = cells.iter().position(|c| c.span.start == *at) else {
                return false;
            };
            cells.insert(
                pos,
                RenderCell {
                    span: Span::new(*at, *at),
                    text: text.clone(),
                },
            );
            applied.push((*code, format!("insert `{text}`")));
            true
        }
        MarkerEdit::Delete { span, code } => {
            let Some(pos) = cells.iter().position(|c| c.span == *span) else {
                return false;
            };
            if let Some(rest) = fused_article(&cells[pos].text) {
                // A fused preposition-article loses only its preposition.
                let detail = format!("drop the marker of `{}`", cells[pos].text);
                cells[pos].text = rest;
                applied.push((*code, detail));
            } else {
                applied.push((*code, format!("delete `{}`", cells[pos].text)));
                cells.remove(pos);
            }
            true
        }
        MarkerEdit::Replace { span, text, code } => {
            let Some(pos) = cells.iter().position(|c| c.span == *span) else {
                return false;
            };
            let old = cells[pos].text.clone();
            let new_text = if let Some(article) = fused_article(&old) {
                // Replacing the preposition of a fused form splits it:
                // "al" with right marker `con` becomes "con el".
                format!("{text} {article}")
            } else {
                preserve_initial_case(&old, text)
            };
            applied.push((*code, format!("replace `{old}` with `{new_text}`")));
            cells[pos].text = new_text;
            true
        }
    }
}

/// The article hiding in a fused preposition-article form, case preserved:
/// "al"/"del" -> "el", "Al"/"Del" -> "El".
fn fused_article(surface: &str) -> Option<String> {
    match surface.to_lowercase().as_str() {
        "al" | "del" => Some(preserve_initial_case(surface, "el")),
        _ => None,
    }
}

/// Fuse `de el` -> `del` and `a el` -> `al` over adjacent cells, carrying
/// the first cell's capitalization.
fn contract(cells: &mut Vec<RenderCell>) {
    let mut i = 0;
    while i + 1 < cells.len() {
        let first = cells[i].text.to_lowercase();
        let second = cells[i + 1].text.to_lowercase();
        let fused = match (first.as_str(), second.as_str()) {
            ("de", "el") => Some("del"),
            ("a", "el") => Some("al"),
            _ => None,
        };
        if let Some(fused) = fused {
            let text = preserve_initial_case(&cells[i].text, fused);
            let span = Span::hull(cells[i].span, cells[i + 1].span);
            cells[i] = RenderCell { span, text };
            cells.remove(i + 1);
        } else {
            i += 1;
        }
    }
}

fn join_cells(cells: &[RenderCell]) -> String {
    cells
        .iter()
        .map(|c| c.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{CheckConfig, Grammar};
    use crate::parser::{sentences, Parser, SentenceAnalysis};

    const LEXICON: &str = "\
el\tel\tdet\tgender=masc;number=sg;paradigm=msg:el,fsg:la,mpl:los,fpl:las
la\tel\tdet\tgender=fem;number=sg;paradigm=msg:el,fsg:la,mpl:los,fpl:las
casa\tcasa\tn\tgender=fem;number=sg;inherent=yes;paradigm=sg:casa,pl:casas
chico\tchico\tn\tgender=masc;number=sg;animacy=animate;paradigm=msg:chico,fsg:chica,mpl:chicos,fpl:chicas
chica\tchico\tn\tgender=fem;number=sg;animacy=animate;paradigm=msg:chico,fsg:chica,mpl:chicos,fpl:chicas
guapa\tguapo\tadj\tgender=fem;number=sg;paradigm=msg:guapo,fsg:guapa,mpl:guapos,fpl:guapas
guapo\tguapo\tadj\tgender=masc;number=sg;paradigm=msg:guapo,fsg:guapa,mpl:guapos,fpl:guapas
";

    const GRAMMAR: &str = "\
rule nbar_n core : NBAR -> N
rule nbar_ap core : NBAR -> NBAR*head AP {
  or(and(=(GEN_D2, GEN_D1),
         and(=(GEN_MOTHER, GEN_D1),
             and(num_add(HGEN_SCORE_D1, HGEN_SCORE_D2, HGEN_SCORE_MOTHER),
                 num_add(MGEN_SCORE_D1, MGEN_SCORE_D2, MGEN_SCORE_MOTHER)))),
     and(or(and(=(GEN_D2, masc), =(GENM_D1, masc)),
            and(=(GEN_D2, fem), =(GENM_D1, fem))),
         and(=(GEN_MOTHER, GEN_D1),
             and(num_add(HGEN_SCORE_D1, MGEN_SCORE_D2, HGEN_SCORE_MOTHER),
                 num_add(MGEN_SCORE_D1, HGEN_SCORE_D2, MGEN_SCORE_MOTHER)))))
}
rule np_det_nbar core : NP -> DET NBAR*head {
  or(and(=(GEN_D1, GEN_D2),
         and(=(GEN_MOTHER, GEN_D2),
             and(num_add(HGEN_SCORE_D2, HGEN_SCORE_D1, HGEN_SCORE_MOTHER),
                 num_add(MGEN_SCORE_D2, MGEN_SCORE_D1, MGEN_SCORE_MOTHER)))),
     and(or(and(=(GEN_D1, masc), =(GENM_D2, masc)),
            and(=(GEN_D1, fem), =(GENM_D2, fem))),
         and(=(GEN_MOTHER, GEN_D2),
             and(num_add(HGEN_SCORE_D2, MGEN_SCORE_D1, HGEN_SCORE_MOTHER),
                 num_add(MGEN_SCORE_D2, HGEN_SCORE_D1, MGEN_SCORE_MOTHER)))))
}
rule ap_adj core : AP -> ADJ
";

    fn best(text: &str) -> (Lexicon, std::sync::Arc<Sign>) {
        let lexicon = Lexicon::parse(LEXICON).expect("test lexicon");
        let grammar = Grammar::parse(GRAMMAR).expect("test grammar");
        let parser = Parser::new(&lexicon, &grammar, &CheckConfig::default());
        let sents = sentences(text);
        let words = sents[0].words();
        let analysis = parser.parse(&words).expect("parse");
        let SentenceAnalysis::Parsed { selected } = analysis else {
            panic!("no parse for {text:?}");
        };
        drop(parser);
        (lexicon, selected)
    }

    fn texts(corrections: &[Correction]) -> Vec<&str> {
        corrections.iter().map(|c| c.text.as_str()).collect()
    }

    #[test]
    fn favored_error_yields_single_correction() {
        let (lexicon, sign) = best("el casa");
        let out = corrections(&lexicon, &sign, "");
        assert_eq!(texts(&out), ["la casa"]);
        assert_eq!(out[0].solution_index, 0);
        assert_eq!(out[0].applied.len(), 1);
        assert_eq!(out[0].applied[0].0, DiagCode::AgrGen);
    }

    #[test]
    fn chain_corrects_only_the_head_noun() {
        let (lexicon, sign) = best("la chico guapa");
        let out = corrections(&lexicon, &sign, "");
        assert_eq!(texts(&out), ["la chica guapa"]);
    }

    #[test]
    fn tie_enumerates_both_variants_head_value_first() {
        let (lexicon, sign) = best("la chico");
        let out = corrections(&lexicon, &sign, "");
        assert_eq!(texts(&out), ["el chico", "la chica"]);
        assert_eq!(out[0].solution_index, 0);
        assert_eq!(out[1].solution_index, 1);
    }

    #[test]
    fn initial_capitalization_is_preserved() {
        let (lexicon, sign) = best("El casa");
        let out = corrections(&lexicon, &sign, ".");
        assert_eq!(texts(&out), ["La casa."]);
    }

    #[test]
    fn clean_sentence_produces_no_corrections() {
        let (lexicon, sign) = best("la casa");
        assert!(corrections(&lexicon, &sign, ".").is_empty());
        assert_eq!(synthesize_unchanged(&sign, "."), "la casa.");
    }

    #[test]
    fn plain_token_contraction() {
        assert_eq!(contract_surfaces(&["de", "el"], ""), "del");
        assert_eq!(contract_surfaces(&["A", "el", "chico"], "."), "Al chico.");
        assert_eq!(contract_surfaces(&["de", "la", "casa"], ""), "de la casa");
    }
}
