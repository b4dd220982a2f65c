//! Converters from testkit's plain synthetic cases into core types.
#![allow(dead_code)] // each test binary uses a different subset

use weralign_core::{
    Casing, EntitySpanRef, NlpToken, ReferenceDocument, TokenSequence, TokenSource,
    TransformRuleSet,
};
use weralign_testkit::{SynthCase, SynthRule};

pub fn doc_from_case(case: &SynthCase) -> ReferenceDocument {
    let mut doc = ReferenceDocument::new(
        case.tokens
            .iter()
            .map(|t| NlpToken::new(t.clone(), "spk1", Casing::Lower))
            .collect(),
    );
    for (i, entity) in case.entities.iter().enumerate() {
        if let Some((class, span_id)) = entity {
            doc.tokens[i].entity = Some(EntitySpanRef {
                class_label: class.clone(),
                span_id: *span_id,
            });
        }
    }
    for (idx, candidates) in &case.norm_spans {
        let norm_id = format!("n{idx}");
        doc.tokens[*idx].norm_id = Some(norm_id.clone());
        doc.norms.insert(norm_id, candidates.clone());
    }
    doc.validate().expect("synthetic docs are well-formed");
    doc.validate_norm_refs().expect("synthetic norms resolve");
    doc
}

pub fn ruleset_from(rules: &[SynthRule]) -> TransformRuleSet {
    let pairs: Vec<(String, String)> = rules
        .iter()
        .map(|r| (r.lhs.join(" "), r.rhs.join(" ")))
        .collect();
    TransformRuleSet::from_pairs(pairs.iter().map(|(l, r)| (l.as_str(), r.as_str())))
        .expect("synthetic rules are well-formed")
}

pub fn seq_of(tokens: &[String]) -> TokenSequence {
    TokenSequence::from_folded(tokens.to_vec(), TokenSource::PlainText)
}
