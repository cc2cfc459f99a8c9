//! Rule system over sentence hyperedges: claim detection, claim labels,
//! topic extraction and count correction.

mod claims;
mod lexicon;
mod topics;

pub use claims::{
    correct_counts, AbstractClaims, Claim, ClaimError, ClaimLabel, ClaimRecord, ClaimRules,
    CorrectionFactors, EkcReference, EkcTrigger,
};
pub use lexicon::{AtomLexicon, LexiconError, TopicCategory, TopicLexicon};
pub use topics::{extract_topics, relationship_terms};
