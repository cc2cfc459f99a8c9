mod common;

use common::{ari_oracle, dl_oracle, planted, random_graph, set_partitions, two_cliques};
use ekcmap_core::blockmodel::{
    adjusted_rand_index, description_length, infer, meta_graph, model_select, move_delta,
    DlVariant, InferConfig, SbmGraph,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARIANTS: [DlVariant; 2] = [DlVariant::Standard, DlVariant::DegreeCorrected];

fn is_dc(v: DlVariant) -> bool {
    v == DlVariant::DegreeCorrected
}

#[test]
fn five_node_closed_form() {
    let edges = [(0, 1, 1), (1, 2, 2), (2, 0, 1), (3, 4, 1), (4, 4, 1), (0, 3, 3)];
    let g = SbmGraph::from_edges(5, &edges);
    for v in VARIANTS {
        for labels in [[0, 0, 0, 0, 0], [0, 0, 0, 1, 1], [2, 0, 2, 1, 0]] {
            let got = description_length(&g, &labels, v).unwrap();
            let want = dl_oracle(5, &edges, &labels, is_dc(v));
            assert!((got - want).abs() < 1e-9, "{v} {labels:?}: {got} vs {want}");
        }
    }
}

#[test]
fn exhaustive_minimum_is_planted_bisection() {
    let edges = two_cliques();
    let g = SbmGraph::from_edges(8, &edges);
    let all = set_partitions(8);
    assert_eq!(all.len(), 4140);
    for v in VARIANTS {
        let mut scored: Vec<(f64, &Vec<usize>)> = all
            .iter()
            .map(|p| (dl_oracle(8, &edges, p, is_dc(v)), p))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(scored[0].1, &vec![0, 0, 0, 0, 1, 1, 1, 1]);
        assert!(scored[1].0 > scored[0].0 + 1e-9);

        let p = infer(&g, &InferConfig { restarts: 10, variant: v, seed: 7 }).unwrap();
        assert_eq!(&p.blocks, scored[0].1);
        assert!((p.dl - scored[0].0).abs() < 1e-9);
    }
}

#[test]
fn empty_graph_selects_standard() {
    let g = SbmGraph::from_edges(6, &[]);
    let sel = model_select(&g, 5, 1).unwrap();
    assert_eq!(sel.selected, DlVariant::Standard);
    assert_eq!(sel.standard.num_blocks, 1);
    assert!((sel.standard.dl - 6f64.ln()).abs() < 1e-12);
    assert_eq!(sel.standard.dl, sel.degree_corrected.dl);
}

#[test]
fn move_deltas_match_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..1000 {
        let n = rng.random_range(2..15);
        let edges = random_graph(n, rng.random_range(0..40), 3, &mut rng);
        let g = SbmGraph::from_edges(n, &edges);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let i = rng.random_range(0..n);
        let s = labels[rng.random_range(0..n)];
        let mut moved = labels.clone();
        moved[i] = s;
        for v in VARIANTS {
            let d = move_delta(&g, &labels, v, i, s).unwrap();
            let full = description_length(&g, &moved, v).unwrap()
                - description_length(&g, &labels, v).unwrap();
            assert!((d - full).abs() < 1e-9, "trial {trial}: {d} vs {full}");
        }
    }
}

#[test]
fn seeded_runs_are_identical() {
    let (edges, _) = planted(30, 0.4, 0.05, 3);
    let g = SbmGraph::from_edges(30, &edges);
    let cfg = InferConfig { restarts: 8, variant: DlVariant::DegreeCorrected, seed: 99 };
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| infer(&g, &cfg).unwrap());
    let b = four.install(|| infer(&g, &cfg).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.dl.to_bits(), b.dl.to_bits());
    assert!(a.is_consistent(&g));
}

#[test]
fn more_restarts_never_worse() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let edges = random_graph(25, 60, 2, &mut rng);
    let g = SbmGraph::from_edges(25, &edges);
    let dl = |r| infer(&g, &InferConfig { restarts: r, variant: DlVariant::DegreeCorrected, seed: 4 })
        .unwrap()
        .dl;
    let (d1, d10, d40) = (dl(1), dl(10), dl(40));
    assert!(d10 <= d1 && d40 <= d10);
}

#[test]
fn planted_partition_recovered() {
    for seed in 0..5 {
        let (edges, truth) = planted(40, 0.5, 0.02, seed);
        let g = SbmGraph::from_edges(40, &edges);
        let p = infer(&g, &InferConfig { restarts: 20, variant: DlVariant::DegreeCorrected, seed })
            .unwrap();
        let ari = ari_oracle(&p.blocks, &truth);
        assert!(ari >= 0.9, "seed {seed}: ari {ari}");
        assert!((adjusted_rand_index(&p.blocks, &truth) - ari).abs() < 1e-12);
    }
}

fn draw(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

#[test]
fn heavy_tailed_degrees_favour_degree_correction() {
    // two communities; both endpoints drawn with power-law propensities
    let (size, expo, per) = (30, 1.5, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let w_in: Vec<f64> = (0..size).map(|k| 1.0 / ((k + 1) as f64).powf(expo)).collect();
    let w_out: Vec<f64> = (0..size).map(|k| 1.0 / ((size - k) as f64).powf(expo)).collect();
    let mut edges = Vec::new();
    for c in 0..2 {
        for _ in 0..size * per {
            let (s, t) = (draw(&w_out, &mut rng), draw(&w_in, &mut rng));
            if s != t {
                edges.push((c * size + s, c * size + t, 1));
            }
        }
    }
    let g = SbmGraph::from_edges(2 * size, &edges);
    let sel = model_select(&g, 20, 2).unwrap();
    assert!(
        sel.degree_corrected.dl < sel.standard.dl,
        "{}",
        sel.report()
    );
    assert_eq!(sel.selected, DlVariant::DegreeCorrected);
    assert!(sel.report().contains("selected\tdegree-corrected"));
}

#[test]
fn meta_graph_row_mass() {
    let (edges, _) = planted(30, 0.3, 0.05, 8);
    let g = SbmGraph::from_edges(30, &edges);
    let p = infer(&g, &InferConfig { restarts: 4, ..Default::default() }).unwrap();
    let m = meta_graph(&g, &p, 0.01);
    for r in 0..p.num_blocks {
        let row: u64 = (0..p.num_blocks).map(|s| m.get(r, s).weight).sum();
        let out: u64 = (0..30).filter(|&i| p.blocks[i] == r).map(|i| g.k_out[i]).sum();
        assert_eq!(row, out);
    }
    assert_eq!(m.entries.len(), p.num_blocks * p.num_blocks);
}

proptest! {
    #[test]
    fn relabeling_keeps_dl(
        seed in any::<u64>(),
        perm in Just([3usize, 0, 2, 1]).prop_shuffle(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_graph(10, 25, 3, &mut rng);
        let g = SbmGraph::from_edges(10, &edges);
        let labels: Vec<usize> = (0..10).map(|_| rng.random_range(0..4)).collect();
        let relabeled: Vec<usize> = labels.iter().map(|&l| perm[l] + 10).collect();
        for v in VARIANTS {
            let a = description_length(&g, &labels, v).unwrap();
            let b = description_length(&g, &relabeled, v).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
