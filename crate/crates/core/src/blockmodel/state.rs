//! Block-level sufficient statistics with incremental description length.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

use super::{DlVariant, SbmGraph};

const TABLE_LEN: usize = 1 << 16;

fn table() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        (0..TABLE_LEN)
            .map(|k| if k < 2 { 0.0 } else { ln_gamma(k as f64 + 1.0) })
            .collect()
    })
}

/// ln(n!)
pub(crate) fn lnf(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        table()[n as usize]
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// ln C(n, k); zero whenever k == 0, which also covers n = -1.
pub(crate) fn lnc(n: i64, k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let n = n as u64;
    lnf(n) - lnf(k) - lnf(n - k)
}

pub(crate) fn block_term(variant: DlVariant, n: usize, ep: u64, em: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nn = n as i64;
    let t = match variant {
        DlVariant::DegreeCorrected => {
            lnf(ep) + lnf(em) + lnc(nn + ep as i64 - 1, ep) + lnc(nn + em as i64 - 1, em)
        }
        DlVariant::Standard => (ep + em) as f64 * (n as f64).ln(),
    };
    t - lnf(n as u64)
}

pub(crate) fn global_term(nodes: usize, blocks: usize, edges: u64) -> f64 {
    let bb = (blocks * blocks) as i64;
    lnc(bb + edges as i64 - 1, edges) + lnc(nodes as i64 - 1, (blocks - 1) as u64)
}

/// Graph-only part of the description length.
pub(crate) fn constant_term(g: &SbmGraph, variant: DlVariant) -> f64 {
    let n = g.node_count();
    let mut c: f64 = g.edges.iter().map(|&(_, _, w)| lnf(w)).sum();
    if variant == DlVariant::DegreeCorrected {
        c -= g.k_out.iter().map(|&k| lnf(k)).sum::<f64>();
        c -= g.k_in.iter().map(|&k| lnf(k)).sum::<f64>();
    }
    c + lnf(n as u64) + (n as f64).ln()
}

#[derive(Debug, Clone)]
pub(crate) struct State<'g> {
    pub g: &'g SbmGraph,
    pub variant: DlVariant,
    pub b: Vec<usize>,
    pub n: Vec<usize>,
    ep: Vec<u64>,
    em: Vec<u64>,
    /// out[r][s] = e_rs, inn[s][r] = e_rs
    out: Vec<BTreeMap<usize, u64>>,
    inn: Vec<BTreeMap<usize, u64>>,
    pub active: Vec<usize>,
    pos: Vec<usize>,
    pub dl: f64,
}

impl<'g> State<'g> {
    /// Labels are compacted to 0..B-1 in order of first appearance.
    pub fn new(g: &'g SbmGraph, variant: DlVariant, labels: &[usize]) -> Self {
        let b = super::canonical_labels(labels);
        let nb = b.iter().max().map_or(0, |m| m + 1);
        let mut s = State {
            g,
            variant,
            b,
            n: vec![0; nb],
            ep: vec![0; nb],
            em: vec![0; nb],
            out: vec![BTreeMap::new(); nb],
            inn: vec![BTreeMap::new(); nb],
            active: (0..nb).collect(),
            pos: (0..nb).collect(),
            dl: 0.0,
        };
        for &r in &s.b {
            s.n[r] += 1;
        }
        for &(u, v, w) in &g.edges {
            let (r, t) = (s.b[u], s.b[v]);
            *s.out[r].entry(t).or_insert(0) += w;
            *s.inn[t].entry(r).or_insert(0) += w;
            s.ep[r] += w;
            s.em[t] += w;
        }
        s.dl = s.full_dl();
        s
    }

    pub fn num_blocks(&self) -> usize {
        self.active.len()
    }

    fn e(&self, r: usize, s: usize) -> u64 {
        self.out[r].get(&s).copied().unwrap_or(0)
    }

    fn term(&self, r: usize) -> f64 {
        block_term(self.variant, self.n[r], self.ep[r], self.em[r])
    }

    pub fn full_dl(&self) -> f64 {
        let mut dl = constant_term(self.g, self.variant);
        for &r in &self.active {
            dl += self.term(r);
            dl -= self.out[r].values().map(|&e| lnf(e)).sum::<f64>();
        }
        dl + global_term(self.g.node_count(), self.num_blocks(), self.g.total_weight)
    }

    fn entry_changes(&self, i: usize, r: usize, s: usize) -> BTreeMap<(usize, usize), i64> {
        let mut d: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for &(j, w) in &self.g.out_adj[i] {
            let t = self.b[j];
            *d.entry((r, t)).or_insert(0) -= w as i64;
            *d.entry((s, t)).or_insert(0) += w as i64;
        }
        for &(j, w) in &self.g.in_adj[i] {
            let t = self.b[j];
            *d.entry((t, r)).or_insert(0) -= w as i64;
            *d.entry((t, s)).or_insert(0) += w as i64;
        }
        let sl = self.g.self_loops[i] as i64;
        if sl > 0 {
            *d.entry((r, r)).or_insert(0) -= sl;
            *d.entry((s, s)).or_insert(0) += sl;
        }
        d
    }

    /// Change in description length if node `i` moves to existing block `s`.
    pub fn move_delta(&self, i: usize, s: usize) -> f64 {
        let r = self.b[i];
        if r == s {
            return 0.0;
        }
        let mut delta = 0.0;
        for ((x, y), dv) in self.entry_changes(i, r, s) {
            if dv != 0 {
                let e = self.e(x, y);
                delta += lnf(e) - lnf((e as i64 + dv) as u64);
            }
        }
        let (ko, ki) = (self.g.k_out[i], self.g.k_in[i]);
        delta += block_term(self.variant, self.n[r] - 1, self.ep[r] - ko, self.em[r] - ki)
            + block_term(self.variant, self.n[s] + 1, self.ep[s] + ko, self.em[s] + ki)
            - self.term(r)
            - self.term(s);
        if self.n[r] == 1 {
            let (nn, bb, e) = (self.g.node_count(), self.num_blocks(), self.g.total_weight);
            delta += global_term(nn, bb - 1, e) - global_term(nn, bb, e);
        }
        delta
    }

    fn add_entry(&mut self, r: usize, s: usize, dv: i64) {
        let e = self.out[r].entry(s).or_insert(0);
        *e = (*e as i64 + dv) as u64;
        if *e == 0 {
            self.out[r].remove(&s);
            self.inn[s].remove(&r);
        } else {
            let v = *e;
            self.inn[s].insert(r, v);
        }
    }

    pub fn apply_move(&mut self, i: usize, s: usize, delta: f64) {
        let r = self.b[i];
        if r == s {
            return;
        }
        for ((x, y), dv) in self.entry_changes(i, r, s) {
            if dv != 0 {
                self.add_entry(x, y, dv);
            }
        }
        let (ko, ki) = (self.g.k_out[i], self.g.k_in[i]);
        self.ep[r] -= ko;
        self.em[r] -= ki;
        self.ep[s] += ko;
        self.em[s] += ki;
        self.n[r] -= 1;
        self.n[s] += 1;
        self.b[i] = s;
        if self.n[r] == 0 {
            let p = self.pos[r];
            self.active.swap_remove(p);
            if p < self.active.len() {
                self.pos[self.active[p]] = p;
            }
        }
        self.dl += delta;
    }

    /// Change in description length if block `r` is merged into block `s`.
    pub fn merge_delta(&self, r: usize, s: usize) -> f64 {
        debug_assert_ne!(r, s);
        let mut old: f64 = self.out[r]
            .values()
            .chain(self.out[s].values())
            .map(|&e| lnf(e))
            .sum();
        for (&x, &e) in self.inn[r].iter().chain(self.inn[s].iter()) {
            if x != r && x != s {
                old += lnf(e);
            }
        }
        let mut row: BTreeMap<usize, u64> = BTreeMap::new();
        for (&y, &e) in self.out[r].iter().chain(self.out[s].iter()) {
            if y != r && y != s {
                *row.entry(y).or_insert(0) += e;
            }
        }
        let mut col: BTreeMap<usize, u64> = BTreeMap::new();
        for (&x, &e) in self.inn[r].iter().chain(self.inn[s].iter()) {
            if x != r && x != s {
                *col.entry(x).or_insert(0) += e;
            }
        }
        let diag = self.e(r, r) + self.e(r, s) + self.e(s, r) + self.e(s, s);
        let new: f64 =
            row.values().chain(col.values()).map(|&e| lnf(e)).sum::<f64>() + lnf(diag);

        let (nn, bb, e) = (self.g.node_count(), self.num_blocks(), self.g.total_weight);
        (old - new)
            + block_term(
                self.variant,
                self.n[r] + self.n[s],
                self.ep[r] + self.ep[s],
                self.em[r] + self.em[s],
            )
            - self.term(r)
            - self.term(s)
            + global_term(nn, bb - 1, e)
            - global_term(nn, bb, e)
    }
}
