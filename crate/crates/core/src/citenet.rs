//! Weighted author citation networks and their simplification.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Article, AuthorId, CitationGraph, Corpus, PeriodScheme};
use crate::report::{csv_row, fmt_num};

/// Directed author graph; each edge weight counts author-level citations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorGraph {
    pub label: String,
    pub nodes: BTreeSet<AuthorId>,
    #[serde(with = "edge_map")]
    pub edges: BTreeMap<(AuthorId, AuthorId), u64>,
}

// JSON maps need string keys, so edges travel as a list.
mod edge_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<(AuthorId, AuthorId), u64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|((a, b), w)| (a, b, w)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(AuthorId, AuthorId), u64>, D::Error> {
        let v: Vec<(AuthorId, AuthorId, u64)> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|(a, b, w)| ((a, b), w)).collect())
    }
}

impl AuthorGraph {
    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn self_loop_weight(&self) -> u64 {
        self.edges
            .iter()
            .filter(|((a, b), _)| a == b)
            .map(|(_, w)| w)
            .sum()
    }

    /// Total incoming weight per node, self-loops included.
    pub fn received(&self) -> BTreeMap<AuthorId, u64> {
        let mut out: BTreeMap<AuthorId, u64> =
            self.nodes.iter().map(|n| (n.clone(), 0)).collect();
        for ((_, t), w) in &self.edges {
            *out.entry(t.clone()).or_default() += w;
        }
        out
    }

    pub fn out_degree(&self, node: &AuthorId) -> usize {
        self.edges.keys().filter(|(s, _)| s == node).count()
    }

    pub fn edges_csv(&self) -> String {
        let mut out = String::from("source,target,weight\n");
        for ((s, t), w) in &self.edges {
            out.push_str(&csv_row(&[s.as_str(), t.as_str(), &w.to_string()]));
        }
        out
    }
}

/// Adds weight 1 from every author of the citing article to every author
/// of the cited article, for each citation whose citing article passes
/// `keep`.
pub fn build_author_graph_where<F>(
    corpus: &Corpus,
    citations: &CitationGraph,
    label: &str,
    keep: F,
) -> AuthorGraph
where
    F: Fn(&Article) -> bool + Sync,
{
    let articles = corpus.articles();
    let edges: Vec<&(usize, usize)> = citations.edges.iter().collect();
    let weights: HashMap<(&AuthorId, &AuthorId), u64> = edges
        .par_iter()
        .filter(|(a, _)| keep(&articles[*a]))
        .fold(HashMap::new, |mut acc, &&(a, b)| {
            for s in &articles[a].authors {
                for t in &articles[b].authors {
                    *acc.entry((s, t)).or_insert(0) += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut x, y| {
            for (k, w) in y {
                *x.entry(k).or_insert(0) += w;
            }
            x
        });

    let mut g = AuthorGraph {
        label: label.to_owned(),
        ..AuthorGraph::default()
    };
    for ((s, t), w) in weights {
        g.nodes.insert(s.clone());
        g.nodes.insert(t.clone());
        g.edges.insert((s.clone(), t.clone()), w);
    }
    g
}

pub fn build_author_graph(corpus: &Corpus, citations: &CitationGraph) -> AuthorGraph {
    build_author_graph_where(corpus, citations, "all", |_| true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneParams {
    pub k_out: usize,
    pub min_received: u64,
}

impl Default for PruneParams {
    fn default() -> Self {
        PruneParams {
            k_out: 3,
            min_received: 10,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrunedAuthorGraph {
    pub graph: AuthorGraph,
    pub k_out: usize,
    pub min_received: u64,
    /// Received weight of every node of the unpruned graph.
    pub received: BTreeMap<AuthorId, u64>,
}

impl PrunedAuthorGraph {
    pub fn nodes_csv(&self) -> String {
        let mut out = String::from("author,received_total,retained\n");
        for (a, r) in &self.received {
            let kept = u8::from(self.graph.nodes.contains(a));
            out.push_str(&csv_row(&[a.as_str(), &r.to_string(), &kept.to_string()]));
        }
        out
    }
}

/// Keeps authors with at least `min_received` incoming weight, then each
/// retained author's `k_out` heaviest out-edges to other retained authors.
/// Equal weights prefer the lexicographically smaller target.
pub fn prune(g: &AuthorGraph, params: PruneParams) -> PrunedAuthorGraph {
    let received = g.received();
    let retained: BTreeSet<AuthorId> = received
        .iter()
        .filter(|(_, &r)| r >= params.min_received)
        .map(|(a, _)| a.clone())
        .collect();

    let mut by_source: BTreeMap<&AuthorId, Vec<(&AuthorId, u64)>> = BTreeMap::new();
    for ((s, t), &w) in &g.edges {
        if s != t && retained.contains(s) && retained.contains(t) {
            by_source.entry(s).or_default().push((t, w));
        }
    }
    let kept: Vec<((AuthorId, AuthorId), u64)> = by_source
        .into_par_iter()
        .flat_map_iter(|(s, mut targets)| {
            targets.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            targets
                .into_iter()
                .take(params.k_out)
                .map(move |(t, w)| ((s.clone(), t.clone()), w))
        })
        .collect();

    PrunedAuthorGraph {
        graph: AuthorGraph {
            label: g.label.clone(),
            nodes: retained,
            edges: kept.into_iter().collect(),
        },
        k_out: params.k_out,
        min_received: params.min_received,
        received,
    }
}

/// Unpruned and pruned author graph for one cumulative window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CumulativeNetwork {
    pub label: String,
    pub end_year: i32,
    pub full: AuthorGraph,
    pub pruned: PrunedAuthorGraph,
}

/// One network per period end-year, from citing articles published up to
/// that year.
pub fn cumulative_networks(
    corpus: &Corpus,
    citations: &CitationGraph,
    scheme: &PeriodScheme,
    params: PruneParams,
) -> Vec<CumulativeNetwork> {
    scheme
        .periods
        .iter()
        .map(|p| {
            let full = build_author_graph_where(corpus, citations, &p.label, |a| a.year <= p.end);
            let pruned = prune(&full, params);
            CumulativeNetwork {
                label: p.label.clone(),
                end_year: p.end,
                full,
                pruned,
            }
        })
        .collect()
}

/// Received totals for the top `n` authors of a graph, heaviest first.
pub fn most_cited(g: &AuthorGraph, n: usize) -> Vec<(AuthorId, u64)> {
    let mut v: Vec<_> = g.received().into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v.truncate(n);
    v
}

pub fn most_cited_csv(g: &AuthorGraph, n: usize) -> String {
    let mut out = String::from("author,citations\n");
    for (a, c) in most_cited(g, n) {
        out.push_str(&csv_row(&[a.as_str(), &fmt_num(c as f64, 0)]));
    }
    out
}
