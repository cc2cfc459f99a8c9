use std::collections::BTreeSet;

use super::lexicon::{is_atom, TopicCategory, TopicLexicon};
use crate::hypergraph::{AtomType, Hyperedge};

fn is_relationship(h: &Hyperedge) -> bool {
    h.atoms().into_iter().any(|a| {
        is_atom(a, "relationship", AtomType::Concept) || is_atom(a, "relationships", AtomType::Concept)
    })
}

/// Conjuncts of every `(between/B relationship/C (and/J X Y ...))` match.
pub fn relationship_terms(h: &Hyperedge) -> Vec<&Hyperedge> {
    let mut out = Vec::new();
    for sub in h.subedges() {
        let [head, first, second, ..] = sub.elements() else {
            continue;
        };
        let between = head
            .as_atom()
            .is_some_and(|a| is_atom(a, "between", AtomType::Builder));
        if !between || !is_relationship(first) {
            continue;
        }
        let conj = second
            .connector()
            .and_then(Hyperedge::as_atom)
            .is_some_and(|a| is_atom(a, "and", AtomType::Conjunction));
        if conj {
            out.extend(second.arguments());
        }
    }
    out
}

/// Categories of all environmental variables named in relationship patterns.
pub fn extract_topics(h: &Hyperedge, lexicon: &TopicLexicon) -> BTreeSet<TopicCategory> {
    relationship_terms(h)
        .into_iter()
        .flat_map(|t| t.atoms())
        .filter_map(|a| lexicon.category(a.label()))
        .collect()
}
