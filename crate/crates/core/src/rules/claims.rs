//! EKC claim detection and classification.
//!
//! A relation is a claim when its connector carries a claim predicate,
//! it refers to the EKC somewhere, and that reference is not inside its
//! subject. Claims are then labelled from the predicate class, the
//! negation rule and the presence of an N-shaped curve.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lexicon::{is_atom, AtomLexicon};
use crate::hypergraph::{Atom, AtomType, Hyperedge, SentenceRecord, StructureError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClaimLabel {
    PositiveResult,
    NegativeResult,
    Unknown,
}

impl ClaimLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimLabel::PositiveResult => "positive",
            ClaimLabel::NegativeResult => "negative",
            ClaimLabel::Unknown => "unknown",
        }
    }
}

impl fmt::Display for ClaimLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(ClaimLabel::PositiveResult),
            "negative" => Ok(ClaimLabel::NegativeResult),
            "unknown" => Ok(ClaimLabel::Unknown),
            other => Err(format!("unknown claim label `{other}`")),
        }
    }
}

/// Which branch of the EKC-reference rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EkcTrigger {
    DirectConcept,
    UCurve,
    NCurve,
}

impl EkcTrigger {
    pub fn as_str(self) -> &'static str {
        match self {
            EkcTrigger::DirectConcept => "direct-concept",
            EkcTrigger::UCurve => "u-curve",
            EkcTrigger::NCurve => "n-curve",
        }
    }
}

impl fmt::Display for EkcTrigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EkcTrigger {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct-concept" => Ok(EkcTrigger::DirectConcept),
            "u-curve" => Ok(EkcTrigger::UCurve),
            "n-curve" => Ok(EkcTrigger::NCurve),
            other => Err(format!("unknown trigger `{other}`")),
        }
    }
}

/// Every EKC-reference branch that holds for an edge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EkcReference {
    pub direct: bool,
    pub u_curve: bool,
    pub n_curve: bool,
}

impl EkcReference {
    pub fn any(&self) -> bool {
        self.direct || self.u_curve || self.n_curve
    }

    /// Reported trigger; an N-curve outranks a U-curve, which outranks a
    /// direct concept.
    pub fn trigger(&self) -> Option<EkcTrigger> {
        if self.n_curve {
            Some(EkcTrigger::NCurve)
        } else if self.u_curve {
            Some(EkcTrigger::UCurve)
        } else if self.direct {
            Some(EkcTrigger::DirectConcept)
        } else {
            None
        }
    }
}

/// Classification of one claim-bearing relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub label: ClaimLabel,
    pub trigger: EkcTrigger,
    pub predicate: Atom,
    pub negated: bool,
    pub n_curve: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub article_id: String,
    pub sentence_index: usize,
    pub label: ClaimLabel,
    pub ekc_trigger: EkcTrigger,
    pub predicate_atom: Atom,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClaimError {
    #[error("sentences from several articles: `{0}` and `{1}`")]
    MixedArticleIds(String, String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractClaims {
    pub has_positive: bool,
    pub has_negative: bool,
    pub records: Vec<ClaimRecord>,
}

/// Rule engine over one lexicon.
#[derive(Debug, Clone)]
pub struct ClaimRules {
    lexicon: AtomLexicon,
}

impl Default for ClaimRules {
    fn default() -> Self {
        ClaimRules::new(AtomLexicon::standard())
    }
}

fn is_curve_shape(h: &Hyperedge, shape: &str) -> bool {
    match h.elements() {
        [head, _] => head
            .as_atom()
            .is_some_and(|a| is_atom(a, shape, AtomType::Concept)),
        _ => false,
    }
}

impl ClaimRules {
    pub fn new(lexicon: AtomLexicon) -> Self {
        ClaimRules { lexicon }
    }

    pub fn lexicon(&self) -> &AtomLexicon {
        &self.lexicon
    }

    fn has_curve_concept(&self, h: &Hyperedge) -> bool {
        h.atoms().into_iter().any(|a| self.lexicon.is_curve_concept(a))
    }

    /// Evaluates all branches of the EKC-reference rule over `h` and its
    /// sub-edges.
    pub fn ekc_reference(&self, h: &Hyperedge) -> EkcReference {
        let mut r = EkcReference::default();
        for sub in h.subedges() {
            match sub {
                Hyperedge::Atom(a) => r.direct |= self.lexicon.is_ekc_concept(a),
                Hyperedge::Edge(v) => {
                    let curve = || self.has_curve_concept(&v[1]);
                    if is_curve_shape(sub, "u") && curve() {
                        r.u_curve = true;
                    }
                    if is_curve_shape(sub, "n") && curve() {
                        r.n_curve = true;
                    }
                }
            }
        }
        r
    }

    pub fn is_ekc_reference(&self, h: &Hyperedge) -> (bool, Option<EkcTrigger>) {
        let r = self.ekc_reference(h);
        (r.any(), r.trigger())
    }

    fn mentions_claim_or_result(&self, h: &Hyperedge) -> bool {
        h.atoms()
            .into_iter()
            .any(|a| self.lexicon.is_claim_predicate(a) || self.lexicon.is_result_concept(a))
            || self.ekc_reference(h).any()
    }

    fn locally_negated(&self, h: &Hyperedge) -> bool {
        let Some(conn) = h.connector() else {
            return false;
        };
        conn.atoms()
            .into_iter()
            .any(|a| self.lexicon.is_negative_modifier(a))
            && h.arguments().iter().any(|a| self.mentions_claim_or_result(a))
    }

    /// Negation rule: some sub-edge (including `h`) has a negative modifier
    /// in its connector and an argument carrying a claim predicate, a
    /// result concept or an EKC reference.
    pub fn is_negated(&self, h: &Hyperedge) -> bool {
        h.subedges().into_iter().any(|s| self.locally_negated(s))
    }

    fn claim_predicate<'a>(&self, h: &'a Hyperedge) -> Option<(&'a Atom, bool)> {
        let atoms = h.connector()?.atoms();
        if let Some(a) = atoms.iter().find(|a| self.lexicon.is_negative_predicate(a)) {
            return Some((a, true));
        }
        atoms
            .into_iter()
            .find(|a| self.lexicon.is_positive_predicate(a))
            .map(|a| (a, false))
    }

    pub fn detect_claim(&self, h: &Hyperedge) -> Result<bool, StructureError> {
        let subject = h.subject_of()?;
        Ok(self.claim_predicate(h).is_some()
            && self.ekc_reference(h).any()
            && subject.is_none_or(|s| !self.ekc_reference(s).any()))
    }

    /// Labels a claim-bearing relation; `None` when `h` is not a claim.
    pub fn classify_claim(&self, h: &Hyperedge) -> Option<Claim> {
        if !self.detect_claim(h).unwrap_or(false) {
            return None;
        }
        let (predicate, negative_class) = self.claim_predicate(h)?;
        let ekc = self.ekc_reference(h);
        let negated = self.is_negated(h);
        let n_curve = ekc.n_curve;
        let label = match (negative_class, negated, n_curve) {
            (false, true, true) => ClaimLabel::Unknown,
            (false, true, false) => ClaimLabel::NegativeResult,
            (false, false, true) => ClaimLabel::NegativeResult,
            (false, false, false) => ClaimLabel::PositiveResult,
            (true, true, _) => ClaimLabel::Unknown,
            (true, false, true) => ClaimLabel::Unknown,
            (true, false, false) => ClaimLabel::NegativeResult,
        };
        Some(Claim {
            label,
            trigger: ekc.trigger()?,
            predicate: predicate.clone(),
            negated,
            n_curve,
        })
    }

    /// Every claim in a sentence; each relation in the edge is tested on
    /// its own, in pre-order.
    pub fn classify_sentence(&self, h: &Hyperedge) -> Vec<Claim> {
        h.subedges()
            .into_iter()
            .filter(|s| !s.is_atom())
            .filter_map(|s| self.classify_claim(s))
            .collect()
    }

    pub fn classify_abstract(
        &self,
        sentences: &[SentenceRecord],
    ) -> Result<AbstractClaims, ClaimError> {
        if let Some(first) = sentences.first() {
            if let Some(other) = sentences.iter().find(|s| s.article_id != first.article_id) {
                return Err(ClaimError::MixedArticleIds(
                    first.article_id.clone(),
                    other.article_id.clone(),
                ));
            }
        }
        let mut out = AbstractClaims::default();
        for s in sentences {
            for c in self.classify_sentence(&s.hyperedge) {
                out.has_positive |= c.label == ClaimLabel::PositiveResult;
                out.has_negative |= c.label == ClaimLabel::NegativeResult;
                out.records.push(ClaimRecord {
                    article_id: s.article_id.clone(),
                    sentence_index: s.sentence_index,
                    label: c.label,
                    ekc_trigger: c.trigger,
                    predicate_atom: c.predicate,
                    negated: c.negated,
                });
            }
        }
        Ok(out)
    }
}

/// Classifier precision and recall per result class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrectionFactors {
    pub precision_pos: f64,
    pub recall_pos: f64,
    pub precision_neg: f64,
    pub recall_neg: f64,
}

impl Default for CorrectionFactors {
    fn default() -> Self {
        CorrectionFactors {
            precision_pos: 0.809,
            recall_pos: 0.847,
            precision_neg: 0.833,
            recall_neg: 0.366,
        }
    }
}

impl CorrectionFactors {
    pub const IDENTITY: CorrectionFactors = CorrectionFactors {
        precision_pos: 1.0,
        recall_pos: 1.0,
        precision_neg: 1.0,
        recall_neg: 1.0,
    };

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("precision_pos", self.precision_pos),
            ("recall_pos", self.recall_pos),
            ("precision_neg", self.precision_neg),
            ("recall_neg", self.recall_neg),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(format!("{name} = {v} is outside (0, 1]"));
            }
        }
        Ok(())
    }

    pub fn correct_pos(&self, raw: f64) -> f64 {
        raw * self.precision_pos / self.recall_pos
    }

    pub fn correct_neg(&self, raw: f64) -> f64 {
        raw * self.precision_neg / self.recall_neg
    }
}

/// Rescales raw detection counts by precision / recall.
pub fn correct_counts(raw_pos: u64, raw_neg: u64, f: &CorrectionFactors) -> (f64, f64) {
    (f.correct_pos(raw_pos as f64), f.correct_neg(raw_neg as f64))
}
