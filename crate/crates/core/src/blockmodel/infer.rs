//! Multi-restart partition search.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::state::State;
use super::{canonical_labels, BlockModelError, DlVariant, Partition, SbmGraph};

const MERGE_CANDIDATES: usize = 10;
const SHRINK: f64 = 1.5;
const STAGE_SWEEPS: usize = 2;
const UNIFORM_PROPOSAL: f64 = 0.1;
const ANNEAL_BETAS: [f64; 8] = [1.0, 1.5, 2.25, 3.4, 5.0, 7.6, 11.4, 17.1];
const MAX_SWEEPS: usize = 1000;
const PATIENCE: usize = 50;
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferConfig {
    pub restarts: usize,
    pub variant: DlVariant,
    pub seed: u64,
}

impl Default for InferConfig {
    fn default() -> Self {
        InferConfig {
            restarts: 100,
            variant: DlVariant::DegreeCorrected,
            seed: 42,
        }
    }
}

/// Runs `restarts` independent chains and keeps the lowest description
/// length, preferring the lowest chain index on ties. Chain `k` draws from
/// stream `k` of a ChaCha8 generator seeded with `seed`, so results do not
/// depend on the worker count.
pub fn infer(g: &SbmGraph, cfg: &InferConfig) -> Result<Partition, BlockModelError> {
    if g.node_count() == 0 {
        return Err(BlockModelError::EmptyGraph);
    }
    let restarts = cfg.restarts.max(1);
    let (dl, _, blocks) = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let labels = run_chain(g, cfg.variant, cfg.seed, k as u64);
            let dl = State::new(g, cfg.variant, &labels).full_dl();
            (dl, k, labels)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("at least one restart");
    let blocks = canonical_labels(&blocks);
    Ok(Partition {
        nodes: g.names.clone(),
        num_blocks: blocks.iter().max().map_or(0, |m| m + 1),
        blocks,
        dl,
        seed: cfg.seed,
        restarts,
        variant: cfg.variant,
    })
}

pub(crate) fn run_chain(g: &SbmGraph, variant: DlVariant, seed: u64, stream: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let start = agglomerate(g, variant, &mut rng);
    let mut st = State::new(g, variant, &start);
    let mut best = (st.dl, st.b.clone());

    for &beta in &ANNEAL_BETAS {
        sweep(&mut st, &mut rng, Some(beta));
        if st.dl < best.0 - EPS {
            best = (st.dl, st.b.clone());
        }
    }
    if st.dl > best.0 {
        st = State::new(g, variant, &best.1);
    }
    let mut idle = 0;
    for _ in 0..MAX_SWEEPS {
        sweep(&mut st, &mut rng, None);
        if st.dl < best.0 - EPS {
            best = (st.dl, st.b.clone());
            idle = 0;
        } else {
            idle += 1;
            if idle >= PATIENCE {
                break;
            }
        }
    }
    best.1
}

fn propose(st: &State, i: usize, rng: &mut ChaCha8Rng) -> usize {
    let nb = st.num_blocks();
    let (out, inn) = (&st.g.out_adj[i], &st.g.in_adj[i]);
    let deg = out.len() + inn.len();
    if deg == 0 || rng.random::<f64>() < UNIFORM_PROPOSAL {
        return st.active[rng.random_range(0..nb)];
    }
    let k = rng.random_range(0..deg);
    let j = if k < out.len() {
        out[k].0
    } else {
        inn[k - out.len()].0
    };
    st.b[j]
}

/// One pass over all nodes in random order. Without `beta` only strictly
/// improving moves are taken.
fn sweep(st: &mut State, rng: &mut ChaCha8Rng, beta: Option<f64>) {
    let mut order: Vec<usize> = (0..st.g.node_count()).collect();
    order.shuffle(rng);
    for i in order {
        if st.num_blocks() < 2 {
            return;
        }
        let s = propose(st, i, rng);
        if s == st.b[i] {
            continue;
        }
        let d = st.move_delta(i, s);
        let accept = match beta {
            _ if d < -EPS => true,
            Some(beta) => rng.random::<f64>() < (-beta * d).exp(),
            None => false,
        };
        if accept {
            st.apply_move(i, s, d);
        }
    }
}

/// Starts from singleton blocks and repeatedly applies the best proposed
/// block merges, returning the lowest-dl intermediate partition.
fn agglomerate(g: &SbmGraph, variant: DlVariant, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let singletons: Vec<usize> = (0..g.node_count()).collect();
    let mut st = State::new(g, variant, &singletons);
    let mut best = (st.dl, st.b.clone());
    while st.num_blocks() > 1 {
        let nb = st.num_blocks();
        let mut members = vec![Vec::new(); nb];
        for (i, &r) in st.b.iter().enumerate() {
            members[r].push(i);
        }
        let mut cands: Vec<(f64, usize, usize)> = Vec::with_capacity(nb);
        for (r, m) in members.iter().enumerate() {
            let mut pick: Option<(f64, usize)> = None;
            for _ in 0..MERGE_CANDIDATES {
                let i = m[rng.random_range(0..m.len())];
                let t = propose(&st, i, rng);
                if t == r {
                    continue;
                }
                let d = st.merge_delta(r, t);
                if pick.is_none_or(|(bd, bt)| d < bd || (d == bd && t < bt)) {
                    pick = Some((d, t));
                }
            }
            if let Some((d, t)) = pick {
                cands.push((d, r, t));
            }
        }
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let target = (nb - ((nb as f64 / SHRINK).ceil() as usize).max(1)).max(1);
        let mut used = vec![false; nb];
        let mut map: Vec<usize> = (0..nb).collect();
        let mut done = 0;
        for (_, r, t) in cands {
            if done == target {
                break;
            }
            if used[r] || used[t] {
                continue;
            }
            map[r] = t;
            used[r] = true;
            used[t] = true;
            done += 1;
        }
        if done == 0 {
            continue;
        }
        let merged: Vec<usize> = st.b.iter().map(|&r| map[r]).collect();
        st = State::new(g, variant, &merged);
        for _ in 0..STAGE_SWEEPS {
            sweep(&mut st, rng, None);
        }
        st = State::new(g, variant, &st.b);
        if st.dl < best.0 - EPS {
            best = (st.dl, st.b.clone());
        }
    }
    best.1
}
