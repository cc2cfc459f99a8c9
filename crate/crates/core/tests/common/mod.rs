//! Independent oracles shared by integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lf(n: u64) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn lc(n: i64, k: u64) -> f64 {
    if k == 0 {
        0.0
    } else {
        lf(n as u64) - lf(k) - lf(n as u64 - k)
    }
}

/// Directed microcanonical SBM description length, written out term by
/// term from dense count matrices.
pub fn dl_oracle(n: usize, edges: &[(usize, usize, u64)], labels: &[usize], dc: bool) -> f64 {
    let mut ids: Vec<usize> = labels.to_vec();
    ids.sort();
    ids.dedup();
    let b: Vec<usize> = labels.iter().map(|l| ids.binary_search(l).unwrap()).collect();
    let nb = ids.len();
    let mut a = vec![vec![0u64; n]; n];
    for &(u, v, w) in edges {
        a[u][v] += w;
    }
    let mut e = vec![vec![0u64; nb]; nb];
    let (mut kout, mut kin) = (vec![0u64; n], vec![0u64; n]);
    for u in 0..n {
        for v in 0..n {
            e[b[u]][b[v]] += a[u][v];
            kout[u] += a[u][v];
            kin[v] += a[u][v];
        }
    }
    let total: u64 = kout.iter().sum();
    let sizes: Vec<u64> = (0..nb).map(|r| b.iter().filter(|&&x| x == r).count() as u64).collect();
    let ep: Vec<u64> = (0..nb).map(|r| e[r].iter().sum()).collect();
    let em: Vec<u64> = (0..nb).map(|r| (0..nb).map(|s| e[s][r]).sum()).collect();

    let mut s = 0.0;
    for row in &a {
        for &x in row {
            s += lf(x);
        }
    }
    for row in &e {
        for &x in row {
            s -= lf(x);
        }
    }
    if dc {
        for r in 0..nb {
            s += lf(ep[r]) + lf(em[r]);
            s += lc(sizes[r] as i64 + ep[r] as i64 - 1, ep[r]);
            s += lc(sizes[r] as i64 + em[r] as i64 - 1, em[r]);
        }
        for i in 0..n {
            s -= lf(kout[i]) + lf(kin[i]);
        }
    } else {
        for r in 0..nb {
            s += (ep[r] + em[r]) as f64 * (sizes[r] as f64).ln();
        }
    }
    s += lc((nb * nb) as i64 + total as i64 - 1, total);
    s += lc(n as i64 - 1, nb as u64 - 1);
    s += lf(n as u64) - sizes.iter().map(|&x| lf(x)).sum::<f64>();
    s + (n as f64).ln()
}

/// Adjusted Rand index by explicit pair counting.
pub fn ari_oracle(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut only_a, mut only_b, mut neither) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in i + 1..n {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => both += 1.0,
                (true, false) => only_a += 1.0,
                (false, true) => only_b += 1.0,
                (false, false) => neither += 1.0,
            }
        }
    }
    let total = both + only_a + only_b + neither;
    let sa = both + only_a;
    let sb = both + only_b;
    let expected = sa * sb / total;
    let max = (sa + sb) / 2.0;
    if max == expected {
        1.0
    } else {
        (both - expected) / (max - expected)
    }
}

/// Every set partition of 0..n as restricted-growth label strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for l in 0..=next {
            prefix.push(l);
            rec(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

pub fn two_cliques() -> Vec<(usize, usize, u64)> {
    let mut e = Vec::new();
    for c in [0..4, 4..8] {
        for i in c.clone() {
            for j in c.clone() {
                if i != j {
                    e.push((i, j, 1));
                }
            }
        }
    }
    e
}

/// Two equal blocks of directed Bernoulli edges; returns edges and labels.
pub fn planted(n: usize, p_in: f64, p_out: f64, seed: u64) -> (Vec<(usize, usize, u64)>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= n / 2)).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((i, j, 1));
            }
        }
    }
    (edges, labels)
}

pub fn random_graph(n: usize, m: usize, max_w: u64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize, u64)> {
    (0..m)
        .map(|_| {
            (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(1..=max_w),
            )
        })
        .collect()
}
