//! Stochastic block model partitions of author citation graphs.
//!
//! Partitions are scored by the microcanonical description length of a
//! directed stochastic block model, with or without degree correction.
//! Edge weights are treated as edge multiplicities.

mod infer;
mod state;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::citenet::AuthorGraph;
use crate::report::{csv_row, fmt3};

pub use infer::{infer, InferConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockModelError {
    #[error("assignment covers {got} of {expected} nodes")]
    IncompleteAssignment { expected: usize, got: usize },
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("unknown model variant {0:?}")]
    UnknownVariant(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DlVariant {
    Standard,
    #[default]
    DegreeCorrected,
}

impl DlVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            DlVariant::Standard => "standard",
            DlVariant::DegreeCorrected => "degree-corrected",
        }
    }
}

impl fmt::Display for DlVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DlVariant {
    type Err = BlockModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(DlVariant::Standard),
            "degree-corrected" => Ok(DlVariant::DegreeCorrected),
            _ => Err(BlockModelError::UnknownVariant(s.to_owned())),
        }
    }
}

/// Directed multigraph in index form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SbmGraph {
    pub names: Vec<String>,
    /// Distinct (source, target, multiplicity) triples, self-loops included.
    pub edges: Vec<(usize, usize, u64)>,
    pub(crate) out_adj: Vec<Vec<(usize, u64)>>,
    pub(crate) in_adj: Vec<Vec<(usize, u64)>>,
    pub(crate) self_loops: Vec<u64>,
    pub k_out: Vec<u64>,
    pub k_in: Vec<u64>,
    pub total_weight: u64,
}

impl SbmGraph {
    /// Nodes are named by index. Repeated pairs accumulate; zero weights are
    /// dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Self {
        Self::with_names((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn with_names(names: Vec<String>, edges: &[(usize, usize, u64)]) -> Self {
        let n = names.len();
        let mut merged: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for &(u, v, w) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range");
            if w > 0 {
                *merged.entry((u, v)).or_insert(0) += w;
            }
        }
        let mut g = SbmGraph {
            names,
            edges: Vec::with_capacity(merged.len()),
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            self_loops: vec![0; n],
            k_out: vec![0; n],
            k_in: vec![0; n],
            total_weight: 0,
        };
        for ((u, v), w) in merged {
            g.edges.push((u, v, w));
            g.k_out[u] += w;
            g.k_in[v] += w;
            g.total_weight += w;
            if u == v {
                g.self_loops[u] += w;
            } else {
                g.out_adj[u].push((v, w));
                g.in_adj[v].push((u, w));
            }
        }
        g
    }

    /// With `binarize`, every edge counts once regardless of weight.
    pub fn from_author_graph(a: &AuthorGraph, binarize: bool) -> Self {
        let names: Vec<String> = a.nodes.iter().map(|n| n.as_str().to_owned()).collect();
        let index: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let edges: Vec<_> = a
            .edges
            .iter()
            .map(|((s, t), &w)| {
                (
                    index[s.as_str()],
                    index[t.as_str()],
                    if binarize { 1 } else { w },
                )
            })
            .collect();
        Self::with_names(names, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Block labels for every node from a name → block map.
    pub fn assignment_from_map(
        &self,
        map: &BTreeMap<String, usize>,
    ) -> Result<Vec<usize>, BlockModelError> {
        let labels: Vec<Option<usize>> = self.names.iter().map(|n| map.get(n).copied()).collect();
        let got = labels.iter().filter(|l| l.is_some()).count();
        if got < labels.len() {
            return Err(BlockModelError::IncompleteAssignment {
                expected: labels.len(),
                got,
            });
        }
        Ok(labels.into_iter().flatten().collect())
    }
}

/// Relabels blocks 0..B-1 in order of first appearance.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map: HashMap<usize, usize> = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Description length in nats of `labels` (one arbitrary block label per
/// node, in node order).
pub fn description_length(
    g: &SbmGraph,
    labels: &[usize],
    variant: DlVariant,
) -> Result<f64, BlockModelError> {
    if labels.len() != g.node_count() {
        return Err(BlockModelError::IncompleteAssignment {
            expected: g.node_count(),
            got: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(BlockModelError::EmptyGraph);
    }
    Ok(state::State::new(g, variant, labels).full_dl())
}

/// Exact description length change when node `i` moves to block `s` (an
/// existing label in `labels`). Exposed for checking the incremental path.
pub fn move_delta(
    g: &SbmGraph,
    labels: &[usize],
    variant: DlVariant,
    i: usize,
    s: usize,
) -> Result<f64, BlockModelError> {
    description_length(g, labels, variant)?;
    let st = state::State::new(g, variant, labels);
    let target = labels
        .iter()
        .position(|&l| l == s)
        .map(|j| st.b[j])
        .expect("target block must be in use");
    Ok(st.move_delta(i, target))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub nodes: Vec<String>,
    pub blocks: Vec<usize>,
    pub num_blocks: usize,
    pub dl: f64,
    pub seed: u64,
    pub restarts: usize,
    pub variant: DlVariant,
}

impl Partition {
    pub fn assignment(&self) -> BTreeMap<&str, usize> {
        self.nodes
            .iter()
            .map(String::as_str)
            .zip(self.blocks.iter().copied())
            .collect()
    }

    pub fn block_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name).map(|i| self.blocks[i])
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.num_blocks];
        for &b in &self.blocks {
            s[b] += 1;
        }
        s
    }

    pub fn members(&self, block: usize) -> BTreeSet<&str> {
        self.nodes
            .iter()
            .zip(&self.blocks)
            .filter(|(_, &b)| b == block)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// Stored dl agrees with a fresh computation on `g`.
    pub fn is_consistent(&self, g: &SbmGraph) -> bool {
        g.names == self.nodes
            && description_length(g, &self.blocks, self.variant)
                .is_ok_and(|d| (d - self.dl).abs() <= 1e-9)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("author,block\n");
        for (n, b) in self.nodes.iter().zip(&self.blocks) {
            out.push_str(&csv_row(&[n.as_str(), &b.to_string()]));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSelection {
    pub standard: Partition,
    pub degree_corrected: Partition,
    pub selected: DlVariant,
}

impl ModelSelection {
    pub fn selected_partition(&self) -> &Partition {
        match self.selected {
            DlVariant::Standard => &self.standard,
            DlVariant::DegreeCorrected => &self.degree_corrected,
        }
    }

    pub fn report(&self) -> String {
        format!(
            "standard_dl\t{:.6}\ndegree_corrected_dl\t{:.6}\nselected\t{}\n",
            self.standard.dl, self.degree_corrected.dl, self.selected
        )
    }
}

/// Infers under both variants and keeps the one with the lower dl; ties go
/// to the standard model.
pub fn model_select(
    g: &SbmGraph,
    restarts: usize,
    seed: u64,
) -> Result<ModelSelection, BlockModelError> {
    let run = |variant| {
        infer(
            g,
            &InferConfig {
                restarts,
                variant,
                seed,
            },
        )
    };
    let standard = run(DlVariant::Standard)?;
    let degree_corrected = run(DlVariant::DegreeCorrected)?;
    let selected = if degree_corrected.dl < standard.dl {
        DlVariant::DegreeCorrected
    } else {
        DlVariant::Standard
    };
    Ok(ModelSelection {
        standard,
        degree_corrected,
        selected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaEdge {
    pub r: usize,
    pub s: usize,
    pub weight: u64,
    pub p: f64,
    pub hidden: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMetaGraph {
    pub sizes: Vec<usize>,
    pub threshold: f64,
    /// All ordered block pairs, row-major.
    pub entries: Vec<MetaEdge>,
}

impl BlockMetaGraph {
    pub fn get(&self, r: usize, s: usize) -> &MetaEdge {
        &self.entries[r * self.sizes.len() + s]
    }

    pub fn visible(&self) -> impl Iterator<Item = &MetaEdge> {
        self.entries.iter().filter(|e| !e.hidden)
    }

    /// `p` is written at full precision so it can be recomputed exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("block_r,block_s,weight,p,hidden\n");
        for e in &self.entries {
            out.push_str(&csv_row(&[
                e.r.to_string(),
                e.s.to_string(),
                e.weight.to_string(),
                format!("{:e}", e.p),
                u8::from(e.hidden).to_string(),
            ]));
        }
        out
    }
}

/// Block-to-block citation density: summed weight from r to s over
/// n_r * n_s. Pairs at or below `threshold` are hidden.
pub fn meta_graph(g: &SbmGraph, p: &Partition, threshold: f64) -> BlockMetaGraph {
    let nb = p.num_blocks;
    let sizes = p.sizes();
    let mut w = vec![0u64; nb * nb];
    for &(u, v, x) in &g.edges {
        w[p.blocks[u] * nb + p.blocks[v]] += x;
    }
    let entries = (0..nb * nb)
        .map(|k| {
            let (r, s) = (k / nb, k % nb);
            let prob = w[k] as f64 / (sizes[r] * sizes[s]) as f64;
            MetaEdge {
                r,
                s,
                weight: w[k],
                p: prob,
                hidden: prob <= threshold,
            }
        })
        .collect();
    BlockMetaGraph {
        sizes,
        threshold,
        entries,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMatch {
    pub early: usize,
    pub matched: usize,
    pub jaccard: f64,
    /// No final block shares a node with this early block.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockAlignment {
    pub matches: Vec<BlockMatch>,
    /// The two partitions share no nodes.
    pub degenerate: bool,
}

impl BlockAlignment {
    pub fn get(&self, early: usize) -> Option<usize> {
        self.matches.get(early).map(|m| m.matched)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("early_block,final_block,jaccard,degenerate\n");
        for m in &self.matches {
            out.push_str(&csv_row(&[
                m.early.to_string(),
                m.matched.to_string(),
                fmt3(m.jaccard),
                u8::from(m.degenerate).to_string(),
            ]));
        }
        out
    }
}

/// Maps each early block to the final block with the highest Jaccard
/// similarity over the nodes both partitions cover. Ties prefer the larger
/// final block, then the lower index.
pub fn align_blocks(early: &Partition, last: &Partition) -> BlockAlignment {
    let common: BTreeSet<&str> = {
        let a: BTreeSet<&str> = early.nodes.iter().map(String::as_str).collect();
        last.nodes.iter().map(String::as_str).filter(|n| a.contains(n)).collect()
    };
    let (eb, fb) = (restrict(early, &common), restrict(last, &common));
    let final_sizes = last.sizes();

    let matches = eb
        .iter()
        .enumerate()
        .map(|(r, a)| {
            let mut best: Option<(f64, usize)> = None;
            for (s, b) in fb.iter().enumerate() {
                let inter = a.intersection(b).count();
                let union = a.len() + b.len() - inter;
                let j = if union == 0 {
                    0.0
                } else {
                    inter as f64 / union as f64
                };
                let better = match best {
                    None => true,
                    Some((bj, bs)) => j > bj || (j == bj && final_sizes[s] > final_sizes[bs]),
                };
                if better {
                    best = Some((j, s));
                }
            }
            let (jaccard, matched) = best.unwrap_or((0.0, 0));
            BlockMatch {
                early: r,
                matched,
                jaccard,
                degenerate: jaccard == 0.0,
            }
        })
        .collect();
    BlockAlignment {
        matches,
        degenerate: common.is_empty(),
    }
}

fn restrict<'a>(p: &'a Partition, keep: &BTreeSet<&str>) -> Vec<BTreeSet<&'a str>> {
    let mut v = vec![BTreeSet::new(); p.num_blocks];
    for (n, &b) in p.nodes.iter().zip(&p.blocks) {
        if keep.contains(n.as_str()) {
            v[b].insert(n.as_str());
        }
    }
    v
}

/// Adjusted Rand index between two labelings of the same nodes.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let pairs = |x: f64| x * (x - 1.0) / 2.0;
    let mut table: HashMap<(usize, usize), f64> = HashMap::new();
    let mut ra: HashMap<usize, f64> = HashMap::new();
    let mut rb: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1.0;
        *ra.entry(x).or_default() += 1.0;
        *rb.entry(y).or_default() += 1.0;
    }
    let mut cells: Vec<f64> = table.values().map(|&c| pairs(c)).collect();
    cells.sort_by(f64::total_cmp);
    let index: f64 = cells.iter().sum();
    let mut sa: Vec<f64> = ra.values().map(|&c| pairs(c)).collect();
    let mut sb: Vec<f64> = rb.values().map(|&c| pairs(c)).collect();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let (sa, sb): (f64, f64) = (sa.iter().sum(), sb.iter().sum());
    let expected = sa * sb / pairs(n);
    let max = (sa + sb) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}
