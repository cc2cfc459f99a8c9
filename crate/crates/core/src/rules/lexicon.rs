use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Atom, AtomType};

const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.toml");
const DEFAULT_TOPICS: &str = include_str!("../../data/topics.toml");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("bad atom `{atom}` in [{section}]")]
    BadAtom { section: String, atom: String },
    #[error("atom `{0}` is both a positive and a negative claim predicate")]
    OverlappingPredicates(String),
    #[error("unknown topic category `{0}`")]
    UnknownCategory(String),
    #[error("lemma `{lemma}` listed under both {first} and {second}")]
    OverlappingTopics {
        lemma: String,
        first: TopicCategory,
        second: TopicCategory,
    },
}

#[derive(Debug, Default, Deserialize)]
struct AtomList {
    #[serde(default)]
    atoms: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
struct ClaimPredicateSections {
    #[serde(default)]
    positive: AtomList,
    #[serde(default)]
    negative: AtomList,
}

#[derive(Debug, Default, Deserialize)]
struct LemmaList {
    #[serde(default)]
    lemmas: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
struct RawLexicon {
    #[serde(default)]
    claim_predicates: ClaimPredicateSections,
    #[serde(default)]
    ekc: AtomList,
    #[serde(default)]
    curve: AtomList,
    #[serde(default)]
    negation: AtomList,
    #[serde(default)]
    result: AtomList,
    #[serde(default)]
    lemmas: BTreeMap<String, String>,
    #[serde(default)]
    topics: BTreeMap<String, LemmaList>,
}

fn atom_set(section: &str, list: &AtomList) -> Result<HashSet<Atom>, LexiconError> {
    list.atoms
        .iter()
        .map(|s| {
            s.parse::<Atom>()
                .map(|a| a.root())
                .map_err(|_| LexiconError::BadAtom {
                    section: section.to_owned(),
                    atom: s.clone(),
                })
        })
        .collect()
}

/// Typed atom sets driving claim detection, plus the lemma table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomLexicon {
    pub positive_predicates: HashSet<Atom>,
    pub negative_predicates: HashSet<Atom>,
    pub ekc_concepts: HashSet<Atom>,
    pub curve_concepts: HashSet<Atom>,
    pub negative_modifiers: HashSet<Atom>,
    pub result_concepts: HashSet<Atom>,
    lemmas: HashMap<Atom, String>,
}

impl AtomLexicon {
    /// The shipped lexicon.
    pub fn standard() -> AtomLexicon {
        AtomLexicon::from_toml_str(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }

    /// A lexicon with every set empty. Detects nothing.
    pub fn empty() -> AtomLexicon {
        AtomLexicon::default()
    }

    pub fn from_toml_str(text: &str) -> Result<AtomLexicon, LexiconError> {
        let raw: RawLexicon = toml::from_str(text)?;
        let positive = atom_set("claim_predicates.positive", &raw.claim_predicates.positive)?;
        let negative = atom_set("claim_predicates.negative", &raw.claim_predicates.negative)?;
        if let Some(a) = positive.intersection(&negative).min() {
            return Err(LexiconError::OverlappingPredicates(a.to_string()));
        }
        let mut lemmas = HashMap::new();
        for (form, lemma) in &raw.lemmas {
            let atom = form
                .parse::<Atom>()
                .map_err(|_| LexiconError::BadAtom {
                    section: "lemmas".into(),
                    atom: form.clone(),
                })?
                .root();
            lemmas.insert(atom, lemma.to_lowercase());
        }
        Ok(AtomLexicon {
            positive_predicates: positive,
            negative_predicates: negative,
            ekc_concepts: atom_set("ekc", &raw.ekc)?,
            curve_concepts: atom_set("curve", &raw.curve)?,
            negative_modifiers: atom_set("negation", &raw.negation)?,
            result_concepts: atom_set("result", &raw.result)?,
            lemmas,
        })
    }

    /// Role-free atom with its label replaced by the lemma, if one is listed.
    pub fn lemma(&self, atom: &Atom) -> Atom {
        let root = atom.root();
        match self.lemmas.get(&root) {
            Some(l) => Atom::new(l, root.kind(), None).unwrap_or(root),
            None => root,
        }
    }

    pub fn lemma_count(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_positive_predicate(&self, atom: &Atom) -> bool {
        self.positive_predicates.contains(&self.lemma(atom))
    }

    pub fn is_negative_predicate(&self, atom: &Atom) -> bool {
        self.negative_predicates.contains(&self.lemma(atom))
    }

    pub fn is_claim_predicate(&self, atom: &Atom) -> bool {
        self.is_positive_predicate(atom) || self.is_negative_predicate(atom)
    }

    pub fn is_ekc_concept(&self, atom: &Atom) -> bool {
        self.ekc_concepts.contains(&self.lemma(atom))
    }

    pub fn is_curve_concept(&self, atom: &Atom) -> bool {
        self.curve_concepts.contains(&self.lemma(atom))
    }

    pub fn is_negative_modifier(&self, atom: &Atom) -> bool {
        self.negative_modifiers.contains(&self.lemma(atom))
    }

    pub fn is_result_concept(&self, atom: &Atom) -> bool {
        self.result_concepts.contains(&self.lemma(atom))
    }
}

/// Environmental-variable categories, in reporting order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum TopicCategory {
    #[serde(rename = "GHG")]
    Ghg,
    Energy,
    LocalAirPollutants,
    Water,
    #[serde(rename = "SOx")]
    Sox,
    Waste,
    Footprint,
    #[serde(rename = "NOx")]
    Nox,
}

impl TopicCategory {
    pub const ALL: [TopicCategory; 8] = [
        TopicCategory::Ghg,
        TopicCategory::Energy,
        TopicCategory::LocalAirPollutants,
        TopicCategory::Water,
        TopicCategory::Sox,
        TopicCategory::Waste,
        TopicCategory::Footprint,
        TopicCategory::Nox,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopicCategory::Ghg => "GHG",
            TopicCategory::Energy => "Energy",
            TopicCategory::LocalAirPollutants => "LocalAirPollutants",
            TopicCategory::Water => "Water",
            TopicCategory::Sox => "SOx",
            TopicCategory::Waste => "Waste",
            TopicCategory::Footprint => "Footprint",
            TopicCategory::Nox => "NOx",
        }
    }
}

impl fmt::Display for TopicCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopicCategory {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TopicCategory::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| LexiconError::UnknownCategory(s.to_owned()))
    }
}

/// Concept lemma to category mapping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TopicLexicon {
    map: BTreeMap<String, TopicCategory>,
}

impl TopicLexicon {
    pub fn standard() -> TopicLexicon {
        TopicLexicon::from_toml_str(DEFAULT_TOPICS).expect("bundled topic lexicon is valid")
    }

    /// Reads the `[topics.<Category>]` sections; other sections are ignored.
    pub fn from_toml_str(text: &str) -> Result<TopicLexicon, LexiconError> {
        let raw: RawLexicon = toml::from_str(text)?;
        let mut map: BTreeMap<String, TopicCategory> = BTreeMap::new();
        for (name, list) in &raw.topics {
            let cat: TopicCategory = name.parse()?;
            for lemma in &list.lemmas {
                let lemma = lemma.to_lowercase();
                match map.get(&lemma) {
                    Some(&first) if first != cat => {
                        return Err(LexiconError::OverlappingTopics {
                            lemma,
                            first,
                            second: cat,
                        })
                    }
                    _ => {
                        map.insert(lemma, cat);
                    }
                }
            }
        }
        Ok(TopicLexicon { map })
    }

    pub fn category(&self, label: &str) -> Option<TopicCategory> {
        self.map.get(label).copied()
    }

    pub fn lemmas(&self, cat: TopicCategory) -> BTreeSet<&str> {
        self.map
            .iter()
            .filter(|(_, &c)| c == cat)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

pub(crate) fn is_atom(atom: &Atom, label: &str, kind: AtomType) -> bool {
    atom.label() == label && atom.kind() == kind
}
