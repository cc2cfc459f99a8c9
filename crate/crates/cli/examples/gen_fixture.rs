//! Writes the synthetic fixture corpus used by the golden tests.
//!
//!     cargo run -p ekcmap --example gen_fixture -- fixtures/corpus
//!
//! The corpus is built to hit a handful of exact figures:
//! - 82% of articles mention at least one environmental topic
//! - GHG articles in P3: 48 with a positive claim, 13 with a negative one
//! - Ecological Economics: 63 of 100 articles cite Stern, 2 cite Öztürk
//! - articles in economics journals: 72 of 100 (P1), 26 of 100 (P2), 22 of 200 (P3)

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ekcmap_core::report::csv_row;

const SEED: u64 = 20_240_917;

struct Journal {
    name: &'static str,
    founded: i32,
    /// Articles in P1, P2, P3.
    counts: [usize; 3],
    /// Probability that an article belongs to the economics community.
    econ_community: f64,
}

const JOURNALS: [Journal; 5] = [
    Journal { name: "Ecological Economics", founded: 1989, counts: [70, 20, 10], econ_community: 1.0 },
    Journal { name: "Energy Economics", founded: 1979, counts: [2, 6, 12], econ_community: 1.0 },
    Journal { name: "Energy Policy", founded: 1973, counts: [28, 24, 18], econ_community: 0.5 },
    Journal { name: "Environmental Science and Pollution Research", founded: 1994, counts: [0, 30, 100], econ_community: 0.0 },
    Journal { name: "Sustainability", founded: 2009, counts: [0, 20, 60], econ_community: 0.0 },
];

const PERIODS: [(i32, i32); 3] = [(1995, 2011), (2012, 2016), (2017, 2021)];

const SURNAMES: [&str; 40] = [
    "Grossman", "Krueger", "Selden", "Song", "Holtz-Eakin", "Shafik", "Panayotou", "Cole",
    "Dinda", "Galeotti", "Lanza", "List", "Millimet", "Perman", "Harbaugh", "Levinson",
    "Wagner", "Dasgupta", "Torras", "Boyce", "Apergis", "Payne", "Shahbaz", "Pata",
    "Destek", "Sarkodie", "Strezov", "Bekun", "Alola", "Usman", "Ahmad", "Khan",
    "Zhang", "Wang", "Liu", "Chen", "Li", "Yang", "Rahman", "Ali",
];
const INITIALS: [&str; 6] = ["A.", "B.", "J.", "M.", "K.L.", "R."];

const TOPIC_TERMS: [&str; 8] = [
    "(co2/C emissions/C)",
    "(energy/M consumption/C)",
    "(particulate/M matter/C)",
    "(water/M pollution/C)",
    "(sulphur/M emissions/C)",
    "(municipal/M waste/C)",
    "(ecological/M footprint/C)",
    "(nox/M emissions/C)",
];
const TOPIC_WEIGHTS: [f64; 8] = [0.5, 0.3, 0.08, 0.05, 0.06, 0.04, 0.05, 0.03];

const POSITIVE: [&str; 3] = [
    "(confirm/P.so results/C (the/M (ekc/C hypothesis/C)))",
    "(support/P.so (the/M estimates/C) (validity/C (of/B ekc/C hypothesis/C)))",
    "(reveal/P.so (the/M estimates/C) (u/C (inverted/M curve/C)))",
];
const NEGATIVE: [&str; 3] = [
    "(reject/P.so (the/M tests/C) (the/M (ekc/C hypothesis/C)))",
    "((not/M find/P.so) we/C (evidence/C (of/B ekc/C hypothesis/C)))",
    "(find/P.so we/C (n/C (shaped/M curve/C)))",
];
const FILLER: [&str; 3] = [
    "(use/P.so (this/M paper/C) (panel/M data/C))",
    "(discuss/P.so we/C (policy/M implications/C))",
    "(employ/P.so (the/M study/C) (cointegration/M techniques/C))",
];

const STERN: &str = "Stern, D.I.";
const OZTURK: &str = "Öztürk, I.";

struct Article {
    id: String,
    title: String,
    year: i32,
    period: usize,
    journal: usize,
    econ: bool,
    authors: Vec<String>,
    refs: Vec<String>,
    topics: BTreeSet<usize>,
    positive: bool,
    negative: bool,
}

impl Article {
    fn by(&self, who: &str) -> bool {
        self.authors.iter().any(|a| a == who)
    }
}

/// Thirty distinct authors; the two communities share no surname.
fn author_pool(community: usize) -> Vec<String> {
    (0..30)
        .map(|i| {
            let s = SURNAMES[community * 20 + i % 20];
            let init = INITIALS[(i / 20) * 3 + i % 3];
            format!("{s}, {init}")
        })
        .collect()
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures/corpus".into()));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut arts: Vec<Article> = Vec::new();
    for (j, journal) in JOURNALS.iter().enumerate() {
        for (p, &n) in journal.counts.iter().enumerate() {
            let (lo, hi) = PERIODS[p];
            for _ in 0..n {
                arts.push(Article {
                    id: String::new(),
                    title: String::new(),
                    year: rng.random_range(lo.max(journal.founded)..=hi),
                    period: p,
                    journal: j,
                    econ: rng.random::<f64>() < journal.econ_community,
                    authors: Vec::new(),
                    refs: Vec::new(),
                    topics: BTreeSet::new(),
                    positive: false,
                    negative: false,
                });
            }
        }
    }
    arts.sort_by_key(|a| (a.year, a.journal, !a.econ));
    // Ecological Economics opens with a Stern article so every later
    // one can cite him.
    let first_ee = arts.iter().position(|a| a.journal == 0).unwrap();
    let first_year = arts[0].year;
    arts[first_ee].year = first_year;
    let ee = arts.remove(first_ee);
    arts.insert(0, ee);

    let pools = [author_pool(0), author_pool(1)];
    let zipf: Vec<f64> = (0..30).map(|i| 1.0 / (i as f64 + 1.0).powf(0.9)).collect();
    let pick = WeightedIndex::new(&zipf).unwrap();
    for (i, a) in arts.iter_mut().enumerate() {
        a.id = format!("A{:04}", i + 1);
        let pool = &pools[usize::from(!a.econ)];
        let k = rng.random_range(1..=3);
        while a.authors.len() < k {
            let name = &pool[pick.sample(&mut rng)];
            if !a.authors.contains(name) {
                a.authors.push(name.clone());
            }
        }
        a.title = format!(
            "{} and growth: evidence from {} sample {}",
            ["Emissions", "Pollution", "Energy use", "Environmental quality"][i % 4],
            ["a panel", "a time-series", "a cross-country", "a regional"][(i / 4) % 4],
            i + 1
        );
    }

    // Anchor authorship: Stern on early economics articles, Öztürk on
    // later non-economics ones.
    let econ_ids: Vec<usize> = (0..arts.len()).filter(|&i| arts[i].econ).collect();
    for &i in econ_ids.iter().step_by(12).take(8) {
        arts[i].authors.insert(0, STERN.into());
    }
    let late: Vec<usize> = (0..arts.len())
        .filter(|&i| !arts[i].econ && arts[i].period >= 1)
        .collect();
    for &i in late.iter().step_by(15).take(8) {
        arts[i].authors.insert(0, OZTURK.into());
    }

    // Which articles cite which anchor.
    let n = arts.len();
    let first_by = |who: &str| (0..n).find(|&i| arts[i].by(who)).unwrap();
    let (stern0, oz0) = (first_by(STERN), first_by(OZTURK));
    let mut cites_stern = vec![false; n];
    let mut cites_oz = vec![false; n];
    let ee_oz: Vec<usize> = (0..n)
        .filter(|&i| arts[i].journal == 0 && arts[i].period == 2 && i > oz0)
        .take(2)
        .collect();
    assert_eq!(ee_oz.len(), 2);
    for &i in &ee_oz {
        cites_oz[i] = true;
    }
    let mut ee: Vec<usize> = (0..n)
        .filter(|&i| arts[i].journal == 0 && i > stern0 && !ee_oz.contains(&i))
        .collect();
    ee.shuffle(&mut rng);
    for &i in &ee[..63] {
        cites_stern[i] = true;
    }
    for i in 0..n {
        if arts[i].journal == 0 {
            continue;
        }
        let r: f64 = rng.random();
        if arts[i].econ {
            cites_stern[i] = i > stern0 && r < 0.3;
        } else {
            cites_oz[i] = i > oz0 && r < 0.35;
        }
    }

    // References, with preferential attachment inside each community.
    let mut cited = vec![0usize; n];
    for i in 0..n {
        let anchor_of = |j: usize| arts[j].by(STERN) || arts[j].by(OZTURK);
        let mut chosen: BTreeSet<usize> = BTreeSet::new();
        for (flag, who) in [(cites_stern[i], STERN), (cites_oz[i], OZTURK)] {
            if flag {
                let own: Vec<usize> = (0..i).filter(|&j| arts[j].by(who)).collect();
                chosen.insert(own[rng.random_range(0..own.len())]);
            }
        }
        let plain: Vec<usize> = (0..i).filter(|&j| !anchor_of(j)).collect();
        let want = rng.random_range(2..=6).min(plain.len());
        let mut tries = 0;
        while chosen.len() < want + usize::from(cites_stern[i]) + usize::from(cites_oz[i])
            && tries < 200
        {
            tries += 1;
            let same = rng.random::<f64>() < 0.9;
            let cands: Vec<usize> = plain
                .iter()
                .copied()
                .filter(|&j| (arts[j].econ == arts[i].econ) == same)
                .collect();
            if cands.is_empty() {
                continue;
            }
            let w: Vec<f64> = cands.iter().map(|&j| 1.0 + cited[j] as f64).collect();
            let j = cands[WeightedIndex::new(&w).unwrap().sample(&mut rng)];
            chosen.insert(j);
        }
        for &j in &chosen {
            cited[j] += 1;
            let title = if rng.random::<f64>() < 0.1 {
                arts[j].title.to_uppercase()
            } else {
                arts[j].title.clone()
            };
            let r = format!("{title}::{}", arts[j].year);
            arts[i].refs.push(r);
        }
        for k in 0..rng.random_range(0..=2) {
            let r = format!("Outside work {} on growth {k}::{}", i + 1, arts[i].year - 3);
            arts[i].refs.push(r);
        }
    }

    // Topics: exactly 82% coverage.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let covered = n * 82 / 100;
    let topic_pick = WeightedIndex::new(TOPIC_WEIGHTS).unwrap();
    for &i in &order[..covered] {
        arts[i].topics.insert(topic_pick.sample(&mut rng));
        if rng.random::<f64>() < 0.3 {
            arts[i].topics.insert(topic_pick.sample(&mut rng));
        }
    }

    // Claims: GHG articles in P3 are fixed at 48 positive, 13 negative.
    let mut ghg3: Vec<usize> = (0..n)
        .filter(|&i| arts[i].period == 2 && arts[i].topics.contains(&0))
        .collect();
    assert!(ghg3.len() >= 58, "only {} GHG articles in P3", ghg3.len());
    ghg3.shuffle(&mut rng);
    for (k, &i) in ghg3.iter().enumerate() {
        let (p, q) = match k {
            0..45 => (true, false),
            45..55 => (false, true),
            55..58 => (true, true),
            _ => (false, false),
        };
        arts[i].positive = p;
        arts[i].negative = q;
    }
    let ghg3: BTreeSet<usize> = ghg3.into_iter().collect();
    for (i, a) in arts.iter_mut().enumerate() {
        if ghg3.contains(&i) {
            continue;
        }
        let r: f64 = rng.random();
        (a.positive, a.negative) = match r {
            r if r < 0.45 => (true, false),
            r if r < 0.57 => (false, true),
            r if r < 0.60 => (true, true),
            _ => (false, false),
        };
    }

    let mut bib = csv_row(&["id", "title", "year", "authors", "journal", "journal_founded", "references"]);
    let mut edges = String::from("# article_id\tsentence_index\thyperedge\n");
    for a in &arts {
        let j = &JOURNALS[a.journal];
        bib.push_str(&csv_row(&[
            a.id.clone(),
            a.title.clone(),
            a.year.to_string(),
            a.authors.join("; "),
            j.name.to_owned(),
            j.founded.to_string(),
            a.refs.join("|"),
        ]));
        let mut sentences: Vec<String> = vec![FILLER[rng.random_range(0..FILLER.len())].into()];
        if !a.topics.is_empty() {
            let terms: Vec<&str> = a.topics.iter().map(|&t| TOPIC_TERMS[t]).collect();
            sentences.push(format!(
                "(examine/P.so (this/M study/C) (the/M (between/B relationship/C (and/J {} (economic/M growth/C)))))",
                terms.join(" ")
            ));
        }
        if a.positive {
            sentences.push(POSITIVE[rng.random_range(0..POSITIVE.len())].into());
        }
        if a.negative {
            sentences.push(NEGATIVE[rng.random_range(0..NEGATIVE.len())].into());
        }
        for (k, s) in sentences.iter().enumerate() {
            let _ = writeln!(edges, "{}\t{k}\t{s}", a.id);
        }
    }

    fs::create_dir_all(&dir).expect("create output dir");
    fs::write(dir.join("bibliography.csv"), bib).expect("write bibliography");
    fs::write(dir.join("hyperedges.tsv"), edges).expect("write hyperedges");
    eprintln!("wrote {n} articles to {}", dir.display());
}
