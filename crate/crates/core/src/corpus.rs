//! Bibliographic records, internal citation matching and periods.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{parse_records, SentenceRecord};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("duplicate article id `{0}`")]
    DuplicateArticleId(String),
    #[error("line {line}: duplicate sentence {sentence_index} for article `{article_id}`")]
    DuplicateSentence {
        line: usize,
        article_id: String,
        sentence_index: usize,
    },
}

/// Case-folded `surname, initials` author key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AuthorId(String);

impl AuthorId {
    /// Normalizes a metadata author field such as `Stern, D. I.`.
    ///
    /// The surname is lowercased with whitespace runs collapsed; initials
    /// are lowercased with all whitespace removed.
    pub fn new(raw: &str) -> AuthorId {
        let collapse = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
        let key = match raw.split_once(',') {
            Some((surname, initials)) => {
                let initials: String = initials
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .collect();
                let surname = collapse(surname).to_lowercase();
                if initials.is_empty() {
                    surname
                } else {
                    format!("{surname}, {}", initials.to_lowercase())
                }
            }
            None => collapse(raw).to_lowercase(),
        };
        AuthorId(key)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AuthorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawReference {
    pub ref_title: String,
    pub ref_year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub article_id: String,
    pub title: String,
    pub year: i32,
    pub authors: Vec<AuthorId>,
    pub journal: String,
    pub journal_founded: Option<i32>,
    pub references: Vec<RawReference>,
    pub sentences: Vec<SentenceRecord>,
}

/// Lines of the hyperedge file that were set aside while loading.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    /// `(line, article_id)` of sentences naming no loaded article.
    pub unknown_article_lines: Vec<(usize, String)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    articles: Vec<Article>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

#[derive(Debug, Deserialize)]
struct BibRow {
    id: String,
    title: String,
    year: String,
    authors: String,
    journal: String,
    #[serde(default)]
    journal_founded: String,
    #[serde(default)]
    references: String,
}

fn malformed(line: usize, reason: impl Into<String>) -> CorpusError {
    CorpusError::MalformedRecord {
        line,
        reason: reason.into(),
    }
}

fn parse_reference(raw: &str) -> Option<RawReference> {
    let raw = raw.trim();
    if raw.is_empty() {
        return None;
    }
    let (title, year) = match raw.rsplit_once("::") {
        Some((t, y)) => (t, y.trim().parse::<i32>().ok()),
        None => (raw, None),
    };
    let title = title.trim();
    if normalize_title(title).is_empty() {
        return None;
    }
    Some(RawReference {
        ref_title: title.to_owned(),
        ref_year: year,
    })
}

impl Corpus {
    pub fn new(articles: Vec<Article>) -> Result<Corpus, CorpusError> {
        let mut index = HashMap::with_capacity(articles.len());
        for (i, a) in articles.iter().enumerate() {
            if index.insert(a.article_id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateArticleId(a.article_id.clone()));
            }
        }
        Ok(Corpus { articles, index })
    }

    /// Parses the bibliographic CSV and the tab-separated hyperedge file.
    pub fn from_strs(bib_csv: &str, hyperedges: &str) -> Result<(Corpus, LoadReport), CorpusError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(bib_csv.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| malformed(1, e.to_string()))?
            .clone();
        let mut articles = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                malformed(line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let row: BibRow = rec
                .deserialize(Some(&headers))
                .map_err(|e| malformed(line, e.to_string()))?;
            if row.id.is_empty() {
                return Err(malformed(line, "empty id"));
            }
            let year: i32 = row
                .year
                .parse()
                .map_err(|_| malformed(line, format!("bad year `{}`", row.year)))?;
            if !(1900..=2100).contains(&year) {
                return Err(malformed(line, format!("year {year} outside 1900-2100")));
            }
            let authors: Vec<AuthorId> = row
                .authors
                .split(';')
                .map(str::trim)
                .filter(|a| !a.is_empty())
                .map(AuthorId::new)
                .collect();
            if authors.is_empty() {
                return Err(malformed(line, "no authors"));
            }
            let journal_founded = match row.journal_founded.as_str() {
                "" => None,
                s => Some(s.parse().map_err(|_| {
                    malformed(line, format!("bad journal_founded `{s}`"))
                })?),
            };
            articles.push(Article {
                article_id: row.id,
                title: row.title,
                year,
                authors,
                journal: row.journal,
                journal_founded,
                references: row.references.split('|').filter_map(parse_reference).collect(),
                sentences: Vec::new(),
            });
        }
        let mut corpus = Corpus::new(articles)?;
        let report = corpus.attach_sentences(hyperedges)?;
        Ok((corpus, report))
    }

    pub fn load(bib: &Path, hyperedges: &Path) -> Result<(Corpus, LoadReport), CorpusError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| CorpusError::Io {
                path: p.display().to_string(),
                source,
            })
        };
        Corpus::from_strs(&read(bib)?, &read(hyperedges)?)
    }

    fn attach_sentences(&mut self, text: &str) -> Result<LoadReport, CorpusError> {
        let mut report = LoadReport::default();
        let mut seen = BTreeSet::new();
        for rec in parse_records(text) {
            let (line, rec) = rec.map_err(|e| malformed(e.line(), e.to_string()))?;
            let Some(&i) = self.index.get(&rec.article_id) else {
                report.unknown_article_lines.push((line, rec.article_id));
                continue;
            };
            if !seen.insert((i, rec.sentence_index)) {
                return Err(CorpusError::DuplicateSentence {
                    line,
                    article_id: rec.article_id,
                    sentence_index: rec.sentence_index,
                });
            }
            self.articles[i].sentences.push(rec);
        }
        for a in &mut self.articles {
            a.sentences.sort_by_key(|s| s.sentence_index);
        }
        Ok(report)
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn get(&self, article_id: &str) -> Option<&Article> {
        self.index.get(article_id).map(|&i| &self.articles[i])
    }

    pub fn position(&self, article_id: &str) -> Option<usize> {
        self.index.get(article_id).copied()
    }

    /// Rebuilds the id index after deserialization.
    pub fn reindex(&mut self) -> Result<(), CorpusError> {
        let articles = std::mem::take(&mut self.articles);
        *self = Corpus::new(articles)?;
        Ok(())
    }

    /// All distinct authors, sorted.
    pub fn authors(&self) -> BTreeSet<&AuthorId> {
        self.articles.iter().flat_map(|a| &a.authors).collect()
    }
}

/// Case-folds and collapses whitespace runs; nothing else.
pub fn normalize_title(t: &str) -> String {
    t.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguousMatch {
    pub citing_id: String,
    pub ref_title: String,
    pub ref_year: i32,
    pub candidate_ids: Vec<String>,
}

/// Article-level internal citation graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationGraph {
    /// `(citing, cited)` article positions in the corpus.
    pub edges: BTreeSet<(usize, usize)>,
    pub ambiguous: Vec<AmbiguousMatch>,
    /// Articles that cite themselves.
    pub self_citations: Vec<String>,
    /// Edges whose cited article is younger than the citing one.
    pub temporal_violations: usize,
}

impl CitationGraph {
    /// Edges as `(citing_id, cited_id)`, sorted.
    pub fn edge_ids<'a>(&self, corpus: &'a Corpus) -> BTreeSet<(&'a str, &'a str)> {
        self.edges
            .iter()
            .map(|&(a, b)| {
                (
                    corpus.articles[a].article_id.as_str(),
                    corpus.articles[b].article_id.as_str(),
                )
            })
            .collect()
    }

    pub fn to_csv(&self, corpus: &Corpus) -> String {
        let mut out = String::from("citing_id,cited_id\n");
        for (a, b) in self.edge_ids(corpus) {
            out.push_str(&crate::report::csv_row(&[a, b]));
        }
        out
    }
}

enum Resolution {
    Edge(usize),
    Ambiguous(AmbiguousMatch),
}

/// Resolves references to corpus articles by exact normalized title and
/// year. References without a year never match.
pub fn match_citations(corpus: &Corpus) -> CitationGraph {
    let mut by_key: HashMap<(String, i32), Vec<usize>> = HashMap::new();
    for (i, a) in corpus.articles.iter().enumerate() {
        by_key
            .entry((normalize_title(&a.title), a.year))
            .or_default()
            .push(i);
    }

    let per_article: Vec<Vec<Resolution>> = corpus
        .articles
        .par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for r in &a.references {
                let Some(year) = r.ref_year else { continue };
                let Some(cands) = by_key.get(&(normalize_title(&r.ref_title), year)) else {
                    continue;
                };
                match cands.as_slice() {
                    [one] => out.push(Resolution::Edge(*one)),
                    many => {
                        let mut candidate_ids: Vec<String> = many
                            .iter()
                            .map(|&c| corpus.articles[c].article_id.clone())
                            .collect();
                        candidate_ids.sort();
                        out.push(Resolution::Ambiguous(AmbiguousMatch {
                            citing_id: a.article_id.clone(),
                            ref_title: r.ref_title.clone(),
                            ref_year: year,
                            candidate_ids,
                        }))
                    }
                }
            }
            out
        })
        .collect();

    let mut g = CitationGraph::default();
    for (citing, resolved) in per_article.into_iter().enumerate() {
        for r in resolved {
            match r {
                Resolution::Edge(cited) => {
                    g.edges.insert((citing, cited));
                }
                Resolution::Ambiguous(m) => g.ambiguous.push(m),
            }
        }
    }
    for &(a, b) in &g.edges {
        if a == b {
            g.self_citations.push(corpus.articles[a].article_id.clone());
        }
        if corpus.articles[b].year > corpus.articles[a].year {
            g.temporal_violations += 1;
        }
    }
    g.self_citations.sort();
    g.ambiguous
        .sort_by(|x, y| (&x.citing_id, &x.ref_title).cmp(&(&y.citing_id, &y.ref_title)));
    g
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub label: String,
    pub start: i32,
    pub end: i32,
}

impl Period {
    pub fn new(label: &str, start: i32, end: i32) -> Period {
        Period {
            label: label.to_owned(),
            start,
            end,
        }
    }

    pub fn contains(&self, year: i32) -> bool {
        self.start <= year && year <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PeriodScheme {
    pub periods: Vec<Period>,
}

impl Default for PeriodScheme {
    fn default() -> Self {
        PeriodScheme {
            periods: vec![
                Period::new("P1", 1995, 2011),
                Period::new("P2", 2012, 2016),
                Period::new("P3", 2017, 2021),
            ],
        }
    }
}

impl PeriodScheme {
    /// Periods must be non-empty, ordered and disjoint.
    pub fn validate(&self) -> Result<(), String> {
        let mut prev_end = i32::MIN;
        for p in &self.periods {
            if p.start > p.end {
                return Err(format!("period {} ends before it starts", p.label));
            }
            if p.start <= prev_end {
                return Err(format!("period {} overlaps or is out of order", p.label));
            }
            prev_end = p.end;
        }
        Ok(())
    }

    pub fn assign(&self, year: i32) -> Option<&str> {
        self.periods
            .iter()
            .find(|p| p.contains(year))
            .map(|p| p.label.as_str())
    }

    pub fn index_of(&self, year: i32) -> Option<usize> {
        self.periods
            .iter()
            .position(|p| p.contains(year))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.periods.iter().map(|p| p.label.as_str()).collect()
    }
}

pub fn assign_period(year: i32, scheme: &PeriodScheme) -> Option<&str> {
    scheme.assign(year)
}

/// Economics/non-economics journal split.
///
/// Explicit overrides win; otherwise a journal is economic when a word of
/// its name starts with `econ` (covers "Economics", "Econ.", "Economic").
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct JournalClassifier {
    pub economic: Vec<String>,
    pub non_economic: Vec<String>,
}

impl Default for JournalClassifier {
    fn default() -> Self {
        JournalClassifier {
            economic: vec![
                "Environment, Development and Sustainability".into(),
                "Environ. Dev. Sustainability".into(),
            ],
            non_economic: Vec::new(),
        }
    }
}

impl JournalClassifier {
    pub fn is_economic(&self, journal: &str) -> bool {
        let key = normalize_title(journal);
        let listed = |v: &[String]| v.iter().any(|j| normalize_title(j) == key);
        if listed(&self.economic) {
            return true;
        }
        if listed(&self.non_economic) {
            return false;
        }
        key.split(|c: char| !c.is_alphanumeric())
            .any(|w| w.starts_with("econ"))
    }
}
