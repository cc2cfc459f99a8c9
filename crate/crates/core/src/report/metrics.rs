//! Aggregations over classified articles, author graphs and partitions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{csv_row, fmt3, fmt3_opt};
use crate::blockmodel::Partition;
use crate::citenet::AuthorGraph;
use crate::corpus::{normalize_title, AuthorId, CitationGraph, Corpus, JournalClassifier, Period, PeriodScheme};
use crate::rules::{
    correct_counts, extract_topics, ClaimRecord, ClaimRules, CorrectionFactors,
    TopicCategory, TopicLexicon,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("partition author `{0}` does not appear in the corpus")]
    PartitionMismatch(String),
    #[error("anchor author `{0}` does not appear in the corpus")]
    AnchorUnknown(String),
}

/// Per-article classification outcome.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleFacts {
    pub has_positive: bool,
    pub has_negative: bool,
    pub topics: BTreeSet<TopicCategory>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotated {
    /// Parallel to `corpus.articles()`.
    pub facts: Vec<ArticleFacts>,
    pub claims: Vec<ClaimRecord>,
}

pub fn annotate(corpus: &Corpus, rules: &ClaimRules, topics: &TopicLexicon) -> Annotated {
    let per: Vec<(ArticleFacts, Vec<ClaimRecord>)> = corpus
        .articles()
        .par_iter()
        .map(|a| {
            let claims = rules
                .classify_abstract(&a.sentences)
                .expect("sentences are grouped by article");
            let topics = a
                .sentences
                .iter()
                .flat_map(|s| extract_topics(&s.hyperedge, topics))
                .collect();
            let facts = ArticleFacts {
                has_positive: claims.has_positive,
                has_negative: claims.has_negative,
                topics,
            };
            (facts, claims.records)
        })
        .collect();
    let mut out = Annotated::default();
    for (f, c) in per {
        out.facts.push(f);
        out.claims.extend(c);
    }
    out
}

pub fn claims_csv(claims: &[ClaimRecord]) -> String {
    let mut out = String::from("article_id,sentence_index,label,trigger,predicate,negated\n");
    for c in claims {
        out.push_str(&csv_row(&[
            c.article_id.clone(),
            c.sentence_index.to_string(),
            c.label.as_str().to_owned(),
            c.ekc_trigger.as_str().to_owned(),
            c.predicate_atom.to_string(),
            c.negated.to_string(),
        ]));
    }
    out
}

pub fn topics_csv(corpus: &Corpus, facts: &[ArticleFacts]) -> String {
    let mut out = String::from("article_id,year,positive,negative,topics\n");
    for (a, f) in corpus.articles().iter().zip(facts) {
        let topics: Vec<&str> = f.topics.iter().map(|t| t.name()).collect();
        out.push_str(&csv_row(&[
            a.article_id.clone(),
            a.year.to_string(),
            u8::from(f.has_positive).to_string(),
            u8::from(f.has_negative).to_string(),
            topics.join(";"),
        ]));
    }
    out
}

fn topic_header(first: &str) -> Vec<String> {
    std::iter::once(first.to_owned())
        .chain(TopicCategory::ALL.iter().map(|t| t.name().to_owned()))
        .collect()
}

/// Corrected positive and negative shares of `n` articles, clamped to 1.
fn corrected_shares(n: usize, pos: u64, neg: u64, f: &CorrectionFactors) -> (f64, f64, bool) {
    if n == 0 {
        return (0.0, 0.0, false);
    }
    let (cp, cn) = correct_counts(pos, neg, f);
    let (sp, sn) = (cp / n as f64, cn / n as f64);
    let clamped = sp > 1.0 || sn > 1.0;
    (sp.min(1.0), sn.min(1.0), clamped)
}

fn count_posneg<'a>(facts: impl Iterator<Item = &'a ArticleFacts>) -> (usize, u64, u64) {
    facts.fold((0, 0, 0), |(n, p, q), f| {
        (n + 1, p + u64::from(f.has_positive), q + u64::from(f.has_negative))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearShares {
    pub year: i32,
    pub articles: usize,
    pub raw_positive: u64,
    pub raw_negative: u64,
    pub positive: f64,
    pub negative: f64,
    pub clamped: bool,
}

/// Per-year corrected shares of articles with a positive or negative claim.
/// Years without articles are left out.
pub fn posneg_timeseries(
    corpus: &Corpus,
    facts: &[ArticleFacts],
    factors: &CorrectionFactors,
) -> Vec<YearShares> {
    let mut by_year: BTreeMap<i32, Vec<&ArticleFacts>> = BTreeMap::new();
    for (a, f) in corpus.articles().iter().zip(facts) {
        by_year.entry(a.year).or_default().push(f);
    }
    by_year
        .into_iter()
        .map(|(year, fs)| {
            let (n, pos, neg) = count_posneg(fs.into_iter());
            let (positive, negative, clamped) = corrected_shares(n, pos, neg, factors);
            if clamped {
                warn!("corrected share above 1 in {year}; clamped");
            }
            YearShares {
                year,
                articles: n,
                raw_positive: pos,
                raw_negative: neg,
                positive,
                negative,
                clamped,
            }
        })
        .collect()
}

pub fn posneg_csv(series: &[YearShares]) -> String {
    let mut out =
        String::from("year,articles,raw_positive,raw_negative,positive_share,negative_share,clamped\n");
    for y in series {
        out.push_str(&csv_row(&[
            y.year.to_string(),
            y.articles.to_string(),
            y.raw_positive.to_string(),
            y.raw_negative.to_string(),
            fmt3(y.positive),
            fmt3(y.negative),
            u8::from(y.clamped).to_string(),
        ]));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub label: String,
    /// Per topic, in `TopicCategory::ALL` order.
    pub raw_positive: Vec<u64>,
    pub raw_negative: Vec<u64>,
    pub ratios: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicRatioTable {
    /// One row per period, then the all-period aggregate.
    pub rows: Vec<RatioRow>,
}

impl TopicRatioTable {
    pub fn get(&self, label: &str, topic: TopicCategory) -> Option<f64> {
        let t = TopicCategory::ALL.iter().position(|&c| c == topic)?;
        self.rows.iter().find(|r| r.label == label)?.ratios[t]
    }

    /// Period row holding the highest ratio of each topic.
    pub fn max_period(&self) -> Vec<Option<&str>> {
        let periods = &self.rows[..self.rows.len().saturating_sub(1)];
        (0..TopicCategory::ALL.len())
            .map(|t| {
                let mut best: Option<(f64, &str)> = None;
                for r in periods {
                    if let Some(v) = r.ratios[t] {
                        if best.is_none_or(|(b, _)| v > b) {
                            best = Some((v, r.label.as_str()));
                        }
                    }
                }
                best.map(|(_, l)| l)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv_row(&topic_header("period"));
        for r in &self.rows {
            let mut row = vec![r.label.clone()];
            row.extend(r.ratios.iter().map(|&x| fmt3_opt(x)));
            out.push_str(&csv_row(&row));
        }
        let mut row = vec!["max_period".to_owned()];
        row.extend(self.max_period().into_iter().map(|l| l.unwrap_or("").to_owned()));
        out.push_str(&csv_row(&row));
        out
    }

    pub fn counts_csv(&self) -> String {
        let mut out = String::from("period,topic,raw_positive,raw_negative\n");
        for r in &self.rows {
            for (t, topic) in TopicCategory::ALL.iter().enumerate() {
                out.push_str(&csv_row(&[
                    r.label.clone(),
                    topic.name().to_owned(),
                    r.raw_positive[t].to_string(),
                    r.raw_negative[t].to_string(),
                ]));
            }
        }
        out
    }
}

/// Corrected positive / negative ratio per topic and period. Cells with no
/// negative articles are undefined.
pub fn topic_ratio_table(
    corpus: &Corpus,
    facts: &[ArticleFacts],
    scheme: &PeriodScheme,
    factors: &CorrectionFactors,
) -> TopicRatioTable {
    let nt = TopicCategory::ALL.len();
    let np = scheme.periods.len();
    let mut pos = vec![vec![0u64; nt]; np + 1];
    let mut neg = vec![vec![0u64; nt]; np + 1];
    for (a, f) in corpus.articles().iter().zip(facts) {
        let Some(p) = scheme.index_of(a.year) else {
            continue;
        };
        for (t, topic) in TopicCategory::ALL.iter().enumerate() {
            if f.topics.contains(topic) {
                for row in [p, np] {
                    pos[row][t] += u64::from(f.has_positive);
                    neg[row][t] += u64::from(f.has_negative);
                }
            }
        }
    }
    let labels = scheme
        .periods
        .iter()
        .map(|p| p.label.clone())
        .chain(std::iter::once("aggregate".to_owned()));
    let rows = labels
        .enumerate()
        .map(|(i, label)| {
            let ratios = (0..nt)
                .map(|t| {
                    let (cp, cn) = correct_counts(pos[i][t], neg[i][t], factors);
                    (cn > 0.0).then(|| cp / cn)
                })
                .collect();
            RatioRow {
                label,
                raw_positive: pos[i].clone(),
                raw_negative: neg[i].clone(),
                ratios,
            }
        })
        .collect();
    TopicRatioTable { rows }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicShareRow {
    pub label: String,
    pub articles: usize,
    pub covered: usize,
    /// Percent of the row's articles mentioning each topic.
    pub percent: Vec<f64>,
}

impl TopicShareRow {
    pub fn coverage_percent(&self) -> f64 {
        if self.articles == 0 {
            0.0
        } else {
            100.0 * self.covered as f64 / self.articles as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicShares {
    pub periods: Vec<TopicShareRow>,
    /// Whole corpus.
    pub overall: TopicShareRow,
}

impl TopicShares {
    pub fn to_csv(&self) -> String {
        let mut header = topic_header("period");
        header.insert(1, "articles".to_owned());
        header.push("coverage_pct".to_owned());
        let mut out = csv_row(&header);
        for r in self.periods.iter().chain(std::iter::once(&self.overall)) {
            let mut row = vec![r.label.clone(), r.articles.to_string()];
            row.extend(r.percent.iter().map(|&x| fmt3(x)));
            row.push(fmt3(r.coverage_percent()));
            out.push_str(&csv_row(&row));
        }
        out
    }
}

fn share_row<'a>(label: &str, facts: impl Iterator<Item = &'a ArticleFacts>) -> TopicShareRow {
    let mut counts = vec![0usize; TopicCategory::ALL.len()];
    let (mut n, mut covered) = (0, 0);
    for f in facts {
        n += 1;
        covered += usize::from(!f.topics.is_empty());
        for (t, topic) in TopicCategory::ALL.iter().enumerate() {
            counts[t] += usize::from(f.topics.contains(topic));
        }
    }
    let percent = counts
        .iter()
        .map(|&c| if n == 0 { 0.0 } else { 100.0 * c as f64 / n as f64 })
        .collect();
    TopicShareRow {
        label: label.to_owned(),
        articles: n,
        covered,
        percent,
    }
}

/// Percent of articles per period mentioning each topic, with coverage.
pub fn topic_share_chart(corpus: &Corpus, facts: &[ArticleFacts], scheme: &PeriodScheme) -> TopicShares {
    let arts = corpus.articles();
    let periods = scheme
        .periods
        .iter()
        .map(|p| {
            share_row(
                &p.label,
                arts.iter()
                    .zip(facts)
                    .filter(|(a, _)| p.contains(a.year))
                    .map(|(_, f)| f),
            )
        })
        .collect();
    TopicShares {
        periods,
        overall: share_row("all", facts.iter()),
    }
}

/// Article lists and co-authorship per author.
pub struct AuthorIndex<'c> {
    corpus: &'c Corpus,
    articles: HashMap<&'c str, Vec<usize>>,
    coauthors: HashMap<&'c str, BTreeSet<&'c str>>,
}

impl<'c> AuthorIndex<'c> {
    pub fn new(corpus: &'c Corpus) -> Self {
        let mut articles: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut coauthors: HashMap<&str, BTreeSet<&str>> = HashMap::new();
        for (i, a) in corpus.articles().iter().enumerate() {
            for x in &a.authors {
                let list = articles.entry(x.as_str()).or_default();
                if list.last() != Some(&i) {
                    list.push(i);
                }
                let co = coauthors.entry(x.as_str()).or_default();
                co.extend(a.authors.iter().map(AuthorId::as_str).filter(|y| *y != x.as_str()));
            }
        }
        AuthorIndex {
            corpus,
            articles,
            coauthors,
        }
    }

    pub fn contains(&self, author: &str) -> bool {
        self.articles.contains_key(author)
    }

    pub fn articles_of(&self, author: &str) -> &[usize] {
        self.articles.get(author).map_or(&[], Vec::as_slice)
    }

    pub fn coauthors_of(&self, author: &str) -> Option<&BTreeSet<&'c str>> {
        self.coauthors.get(author)
    }

    /// Same author, or at least one shared article.
    pub fn have_coauthored(&self, a: &str, b: &str) -> bool {
        a == b || self.coauthors.get(a).is_some_and(|s| s.contains(b))
    }

    /// Union of the members' articles, each counted once.
    pub fn block_articles<'p>(&self, members: impl IntoIterator<Item = &'p str>) -> BTreeSet<usize> {
        members
            .into_iter()
            .flat_map(|m| self.articles_of(m).iter().copied())
            .collect()
    }

    fn check(&self, p: &Partition) -> Result<(), ReportError> {
        match p.nodes.iter().find(|n| !self.contains(n)) {
            Some(n) => Err(ReportError::PartitionMismatch(n.clone())),
            None => Ok(()),
        }
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }
}

/// Letter label for a block index.
pub fn block_label(i: usize) -> String {
    if i < 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("B{i}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMetrics {
    pub block: usize,
    pub author_count: usize,
    pub articles: usize,
    pub pos_ratio: f64,
    pub neg_ratio: f64,
    pub endogamy: Option<f64>,
    pub mean_year: f64,
    pub mean_articles: f64,
    pub mean_articles_per_year: f64,
    pub mean_unique_coauthors: f64,
}

pub fn block_metrics_csv(rows: &[BlockMetrics]) -> String {
    let mut out = String::from(
        "block,authors,articles,pos_per_article,neg_per_article,endogamy,mean_year,\
         mean_articles,mean_articles_per_year,mean_unique_coauthors\n",
    );
    for b in rows {
        out.push_str(&csv_row(&[
            block_label(b.block),
            b.author_count.to_string(),
            b.articles.to_string(),
            fmt3(b.pos_ratio),
            fmt3(b.neg_ratio),
            fmt3_opt(b.endogamy),
            fmt3(b.mean_year),
            fmt3(b.mean_articles),
            fmt3(b.mean_articles_per_year),
            fmt3(b.mean_unique_coauthors),
        ]));
    }
    out
}

/// Per-block publication, claim and citation metrics. `full` is the
/// unpruned author graph used for endogamy.
pub fn block_metrics(
    index: &AuthorIndex,
    facts: &[ArticleFacts],
    full: &AuthorGraph,
    partition: &Partition,
    factors: &CorrectionFactors,
) -> Result<Vec<BlockMetrics>, ReportError> {
    index.check(partition)?;
    let arts = index.corpus().articles();

    let mut received: HashMap<&str, u64> = HashMap::new();
    let mut endo: HashMap<&str, u64> = HashMap::new();
    for ((s, t), &w) in &full.edges {
        *received.entry(t.as_str()).or_default() += w;
        if index.have_coauthored(s.as_str(), t.as_str()) {
            *endo.entry(t.as_str()).or_default() += w;
        }
    }

    let mut out = Vec::with_capacity(partition.num_blocks);
    for b in 0..partition.num_blocks {
        let members = partition.members(b);
        let set = index.block_articles(members.iter().copied());
        let (n, pos, neg) = count_posneg(set.iter().map(|&i| &facts[i]));
        let (pos_ratio, neg_ratio, clamped) = corrected_shares(n, pos, neg, factors);
        if clamped {
            warn!("corrected share above 1 in block {}; clamped", block_label(b));
        }
        let denom: u64 = members.iter().map(|m| received.get(m).copied().unwrap_or(0)).sum();
        let numer: u64 = members.iter().map(|m| endo.get(m).copied().unwrap_or(0)).sum();
        let endogamy = (denom > 0).then(|| numer as f64 / denom as f64);
        let mean_year = if n == 0 {
            f64::NAN
        } else {
            set.iter().map(|&i| f64::from(arts[i].year)).sum::<f64>() / n as f64
        };

        let (mut sum_a, mut sum_rate, mut sum_k) = (0.0, 0.0, 0.0);
        for m in &members {
            let own = index.articles_of(m);
            let first = own.iter().map(|&i| arts[i].year).min().unwrap_or(0);
            let last = own.iter().map(|&i| arts[i].year).max().unwrap_or(0);
            sum_a += own.len() as f64;
            sum_rate += own.len() as f64 / f64::from(last - first + 1);
            sum_k += index.coauthors_of(m).map_or(0, BTreeSet::len) as f64;
        }
        let k = members.len() as f64;
        out.push(BlockMetrics {
            block: b,
            author_count: members.len(),
            articles: n,
            pos_ratio,
            neg_ratio,
            endogamy,
            mean_year,
            mean_articles: sum_a / k,
            mean_articles_per_year: sum_rate / k,
            mean_unique_coauthors: sum_k / k,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicBlockTable {
    pub articles: Vec<usize>,
    /// shares[block][topic]
    pub shares: Vec<Vec<f64>>,
    /// Block with the highest share of each topic; `None` for all-zero columns.
    pub max_block: Vec<Option<usize>>,
}

impl TopicBlockTable {
    pub fn to_csv(&self) -> String {
        let mut header = topic_header("block");
        header.insert(1, "articles".to_owned());
        let mut out = csv_row(&header);
        for (b, row) in self.shares.iter().enumerate() {
            let mut cells = vec![block_label(b), self.articles[b].to_string()];
            cells.extend(row.iter().map(|&x| fmt3(x)));
            out.push_str(&csv_row(&cells));
        }
        let mut cells = vec!["max_block".to_owned(), String::new()];
        cells.extend(self.max_block.iter().map(|m| m.map(block_label).unwrap_or_default()));
        out.push_str(&csv_row(&cells));
        out
    }
}

/// Share of each block's articles mentioning each topic. An article counts
/// once in every block that contains one of its authors.
pub fn topic_share_by_block(
    index: &AuthorIndex,
    facts: &[ArticleFacts],
    partition: &Partition,
) -> Result<TopicBlockTable, ReportError> {
    index.check(partition)?;
    let nt = TopicCategory::ALL.len();
    let mut articles = Vec::new();
    let mut shares: Vec<Vec<f64>> = Vec::new();
    for b in 0..partition.num_blocks {
        let set = index.block_articles(partition.members(b));
        let row = TopicCategory::ALL
            .iter()
            .map(|t| {
                let c = set.iter().filter(|&&i| facts[i].topics.contains(t)).count();
                if set.is_empty() {
                    0.0
                } else {
                    c as f64 / set.len() as f64
                }
            })
            .collect();
        articles.push(set.len());
        shares.push(row);
    }
    let max_block = (0..nt)
        .map(|t| {
            let mut best: Option<(f64, usize)> = None;
            for (b, row) in shares.iter().enumerate() {
                if row[t] > 0.0 && best.is_none_or(|(v, _)| row[t] > v) {
                    best = Some((row[t], b));
                }
            }
            best.map(|(_, b)| b)
        })
        .collect();
    Ok(TopicBlockTable {
        articles,
        shares,
        max_block,
    })
}

fn anchor_check(corpus: &Corpus, anchor: &AuthorId) -> Result<(), ReportError> {
    if corpus.articles().iter().any(|a| a.authors.contains(anchor)) {
        Ok(())
    } else {
        Err(ReportError::AnchorUnknown(anchor.to_string()))
    }
}

/// Articles with at least one resolved reference to an article by `anchor`.
fn cites_anchor(corpus: &Corpus, citations: &CitationGraph, anchor: &AuthorId) -> Vec<bool> {
    let arts = corpus.articles();
    let mut out = vec![false; arts.len()];
    for &(a, b) in &citations.edges {
        if arts[b].authors.contains(anchor) {
            out[a] = true;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalProfile {
    pub journal: String,
    pub founded: Option<i32>,
    pub article_count: usize,
    pub period_counts: Vec<usize>,
    /// Period counts scaled to their maximum.
    pub profile: Vec<f64>,
    pub share_a: f64,
    pub share_b: f64,
    pub r: Option<f64>,
}

pub fn journal_csv(rows: &[JournalProfile], scheme: &PeriodScheme) -> String {
    let mut header = vec!["founded".to_owned(), "journal".to_owned(), "articles".to_owned()];
    for p in &scheme.periods {
        header.push(format!("n_{}", p.label));
    }
    for p in &scheme.periods {
        header.push(format!("profile_{}", p.label));
    }
    header.extend(["share_citing_a", "share_citing_b", "r"].map(String::from));
    let mut out = csv_row(&header);
    for j in rows {
        let mut row = vec![
            j.founded.map(|y| y.to_string()).unwrap_or_default(),
            j.journal.clone(),
            j.article_count.to_string(),
        ];
        row.extend(j.period_counts.iter().map(usize::to_string));
        row.extend(j.profile.iter().map(|&x| fmt3(x)));
        row.extend([fmt3(j.share_a), fmt3(j.share_b), fmt3_opt(j.r)]);
        out.push_str(&csv_row(&row));
    }
    out
}

struct JournalGroup<'c> {
    name: &'c str,
    members: Vec<usize>,
}

/// Journals keyed by normalized name, in order of first appearance.
fn journal_groups(corpus: &Corpus) -> Vec<JournalGroup<'_>> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut groups: Vec<JournalGroup> = Vec::new();
    for (i, a) in corpus.articles().iter().enumerate() {
        let key = normalize_title(&a.journal);
        let g = *index.entry(key).or_insert_with(|| {
            groups.push(JournalGroup {
                name: a.journal.trim(),
                members: Vec::new(),
            });
            groups.len() - 1
        });
        groups[g].members.push(i);
    }
    groups
}

/// Journals with at least `min_articles` articles, sorted by descending r
/// (undefined r last, then by name).
pub fn journal_table(
    corpus: &Corpus,
    citations: &CitationGraph,
    scheme: &PeriodScheme,
    anchors: (&AuthorId, &AuthorId),
    min_articles: usize,
) -> Result<Vec<JournalProfile>, ReportError> {
    anchor_check(corpus, anchors.0)?;
    anchor_check(corpus, anchors.1)?;
    let ca = cites_anchor(corpus, citations, anchors.0);
    let cb = cites_anchor(corpus, citations, anchors.1);
    let arts = corpus.articles();

    let mut rows: Vec<JournalProfile> = journal_groups(corpus)
        .into_iter()
        .filter(|g| g.members.len() >= min_articles)
        .map(|g| {
            let n = g.members.len();
            let mut period_counts = vec![0; scheme.periods.len()];
            for &i in &g.members {
                if let Some(p) = scheme.index_of(arts[i].year) {
                    period_counts[p] += 1;
                }
            }
            let max = period_counts.iter().copied().max().unwrap_or(0);
            let profile = period_counts
                .iter()
                .map(|&c| if max == 0 { 0.0 } else { c as f64 / max as f64 })
                .collect();
            let share = |v: &[bool]| g.members.iter().filter(|&&i| v[i]).count() as f64 / n as f64;
            let (share_a, share_b) = (share(&ca), share(&cb));
            let r = (share_a + share_b > 0.0).then(|| share_a / (share_a + share_b));
            JournalProfile {
                journal: g.name.to_owned(),
                founded: g.members.iter().filter_map(|&i| arts[i].journal_founded).min(),
                article_count: n,
                period_counts,
                profile,
                share_a,
                share_b,
                r,
            }
        })
        .collect();
    rows.sort_by(|x, y| match (x.r, y.r) {
        (Some(a), Some(b)) => b.total_cmp(&a).then_with(|| x.journal.cmp(&y.journal)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => x.journal.cmp(&y.journal),
    });
    Ok(rows)
}

/// Journals an anchor author cites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldOfReferences {
    pub anchor: AuthorId,
    /// Normalized journal name to display name.
    pub journals: BTreeMap<String, String>,
}

impl WorldOfReferences {
    pub fn contains(&self, journal: &str) -> bool {
        self.journals.contains_key(&normalize_title(journal))
    }

    pub fn len(&self) -> usize {
        self.journals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.journals.is_empty()
    }
}

pub fn world_of_references(
    corpus: &Corpus,
    citations: &CitationGraph,
    anchor: &AuthorId,
) -> Result<WorldOfReferences, ReportError> {
    anchor_check(corpus, anchor)?;
    let arts = corpus.articles();
    let mut journals = BTreeMap::new();
    for &(a, b) in &citations.edges {
        if arts[a].authors.contains(anchor) {
            journals
                .entry(normalize_title(&arts[b].journal))
                .or_insert_with(|| arts[b].journal.trim().to_owned());
        }
    }
    Ok(WorldOfReferences {
        anchor: anchor.clone(),
        journals,
    })
}

pub fn worlds_csv(worlds: &[&WorldOfReferences]) -> String {
    let mut out = String::from("anchor,journal\n");
    for w in worlds {
        for name in w.journals.values() {
            out.push_str(&csv_row(&[w.anchor.as_str(), name]));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldYear {
    pub year: i32,
    pub articles: usize,
    pub share_a: f64,
    pub share_b: f64,
}

/// Per year, the fraction of articles published in each world's journals.
pub fn wor_timeseries(
    corpus: &Corpus,
    a: &WorldOfReferences,
    b: &WorldOfReferences,
) -> Vec<WorldYear> {
    let mut by_year: BTreeMap<i32, (usize, usize, usize)> = BTreeMap::new();
    for art in corpus.articles() {
        let e = by_year.entry(art.year).or_default();
        e.0 += 1;
        e.1 += usize::from(a.contains(&art.journal));
        e.2 += usize::from(b.contains(&art.journal));
    }
    by_year
        .into_iter()
        .map(|(year, (n, x, y))| WorldYear {
            year,
            articles: n,
            share_a: x as f64 / n as f64,
            share_b: y as f64 / n as f64,
        })
        .collect()
}

pub fn wor_csv(series: &[WorldYear]) -> String {
    let mut out = String::from("year,articles,share_world_a,share_world_b\n");
    for y in series {
        out.push_str(&csv_row(&[
            y.year.to_string(),
            y.articles.to_string(),
            fmt3(y.share_a),
            fmt3(y.share_b),
        ]));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockWorldRow {
    pub block: usize,
    pub articles: usize,
    pub share_a: f64,
    pub share_b: f64,
}

/// Share of each block's articles published in each world's journals.
pub fn block_world_shares(
    index: &AuthorIndex,
    partition: &Partition,
    a: &WorldOfReferences,
    b: &WorldOfReferences,
) -> Result<Vec<BlockWorldRow>, ReportError> {
    index.check(partition)?;
    let arts = index.corpus().articles();
    Ok((0..partition.num_blocks)
        .map(|blk| {
            let set = index.block_articles(partition.members(blk));
            assert!(!set.is_empty(), "block {blk} has no articles");
            let n = set.len() as f64;
            let count = |w: &WorldOfReferences| {
                set.iter().filter(|&&i| w.contains(&arts[i].journal)).count() as f64
            };
            BlockWorldRow {
                block: blk,
                articles: set.len(),
                share_a: count(a) / n,
                share_b: count(b) / n,
            }
        })
        .collect())
}

pub fn block_world_csv(rows: &[BlockWorldRow]) -> String {
    let mut out = String::from("block,articles,share_world_a,share_world_b\n");
    for r in rows {
        out.push_str(&csv_row(&[
            block_label(r.block),
            r.articles.to_string(),
            fmt3(r.share_a),
            fmt3(r.share_b),
        ]));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconShare {
    pub label: String,
    pub start: i32,
    pub end: i32,
    pub articles: usize,
    pub economic: usize,
    pub share: Option<f64>,
}

/// Among articles in journals with at least `min_articles` articles, the
/// share per window published in economics journals.
pub fn econ_share_by_period(
    corpus: &Corpus,
    windows: &[Period],
    classifier: &JournalClassifier,
    min_articles: usize,
) -> Vec<EconShare> {
    let arts = corpus.articles();
    let mut eligible: Vec<(i32, bool)> = Vec::new();
    for g in journal_groups(corpus) {
        if g.members.len() >= min_articles {
            let econ = classifier.is_economic(g.name);
            eligible.extend(g.members.iter().map(|&i| (arts[i].year, econ)));
        }
    }
    windows
        .iter()
        .map(|w| {
            let inside: Vec<bool> = eligible
                .iter()
                .filter(|(y, _)| w.contains(*y))
                .map(|&(_, e)| e)
                .collect();
            let economic = inside.iter().filter(|&&e| e).count();
            EconShare {
                label: w.label.clone(),
                start: w.start,
                end: w.end,
                articles: inside.len(),
                economic,
                share: (!inside.is_empty()).then(|| economic as f64 / inside.len() as f64),
            }
        })
        .collect()
}

pub fn econ_csv(rows: &[EconShare]) -> String {
    let mut out = String::from("window,start,end,articles,economic,share\n");
    for r in rows {
        out.push_str(&csv_row(&[
            r.label.clone(),
            r.start.to_string(),
            r.end.to_string(),
            r.articles.to_string(),
            r.economic.to_string(),
            fmt3_opt(r.share),
        ]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn facts(pos: bool, neg: bool, topics: &[TopicCategory]) -> ArticleFacts {
        ArticleFacts {
            has_positive: pos,
            has_negative: neg,
            topics: topics.iter().copied().collect(),
        }
    }

    fn corpus(rows: &[(&str, i32, &str, &str, &str)]) -> Corpus {
        let mut bib = String::from("id,title,year,authors,journal,journal_founded,references\n");
        for (id, year, authors, journal, refs) in rows {
            bib.push_str(&format!("{id},T{id},{year},\"{authors}\",{journal},,{refs}\n"));
        }
        Corpus::from_strs(&bib, "").unwrap().0
    }

    #[test]
    fn posneg_example() {
        let rows: Vec<(String, i32)> = (0..10).map(|i| (format!("a{i}"), 2005)).collect();
        let c = corpus(
            &rows
                .iter()
                .map(|(id, y)| (id.as_str(), *y, "X, x.", "J", ""))
                .collect::<Vec<_>>(),
        );
        let f: Vec<ArticleFacts> = (0..10).map(|i| facts(i < 4, (4..6).contains(&i), &[])).collect();
        let s = posneg_timeseries(&c, &f, &CorrectionFactors::default());
        assert_eq!(s.len(), 1);
        assert!((s[0].positive - 0.382).abs() < 1e-3);
        assert!((s[0].negative - 0.455).abs() < 1e-3);
        let s = posneg_timeseries(&c, &f, &CorrectionFactors::IDENTITY);
        assert_eq!((s[0].positive, s[0].negative), (0.4, 0.2));
    }

    #[test]
    fn clamping() {
        let c = corpus(&[("a", 2000, "X, x.", "J", "")]);
        let s = posneg_timeseries(&c, &[facts(false, true, &[])], &CorrectionFactors::default());
        assert_eq!(s[0].negative, 1.0);
        assert!(s[0].clamped);
    }

    #[test]
    fn ratio_cells() {
        let c = corpus(&[
            ("a", 2000, "X, x.", "J", ""),
            ("b", 2000, "X, x.", "J", ""),
            ("c", 2020, "X, x.", "J", ""),
        ]);
        let g = [TopicCategory::Ghg];
        let f = [facts(true, false, &g), facts(false, true, &g), facts(true, false, &g)];
        let t = topic_ratio_table(&c, &f, &PeriodScheme::default(), &CorrectionFactors::IDENTITY);
        assert_eq!(t.get("P1", TopicCategory::Ghg), Some(1.0));
        assert_eq!(t.get("P3", TopicCategory::Ghg), None);
        assert_eq!(t.get("aggregate", TopicCategory::Ghg), Some(2.0));
        assert_eq!(t.get("P1", TopicCategory::Water), None);
        assert_eq!(t.max_period()[0], Some("P1"));
    }

    #[test]
    fn block_example() {
        let c = corpus(&[
            ("a", 2010, "Solo, s.; Co, c.", "J", ""),
            ("b", 2012, "Solo, s.", "J", ""),
        ]);
        let idx = AuthorIndex::new(&c);
        let p = Partition {
            nodes: vec!["solo, s.".into()],
            blocks: vec![0],
            num_blocks: 1,
            dl: 0.0,
            seed: 0,
            restarts: 1,
            variant: Default::default(),
        };
        let f = vec![ArticleFacts::default(); 2];
        let m = block_metrics(&idx, &f, &AuthorGraph::default(), &p, &CorrectionFactors::IDENTITY)
            .unwrap();
        assert_eq!(m[0].mean_year, 2011.0);
        assert_eq!(m[0].mean_articles, 2.0);
        assert!((m[0].mean_articles_per_year - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(m[0].mean_unique_coauthors, 1.0);
        assert_eq!(m[0].endogamy, None);

        let mut bad = p.clone();
        bad.nodes = vec!["ghost, g.".into()];
        assert_eq!(
            block_metrics(&idx, &f, &AuthorGraph::default(), &bad, &CorrectionFactors::IDENTITY),
            Err(ReportError::PartitionMismatch("ghost, g.".into()))
        );
    }

    #[test]
    fn labels() {
        assert_eq!(block_label(0), "A");
        assert_eq!(block_label(3), "D");
        assert_eq!(block_label(30), "B30");
    }
}
