//! Staged end-to-end run with content-hash caching.
//!
//! Stage results are cached as JSON under `<out>/.cache`, keyed by the
//! hashes of their inputs and the configuration they depend on. Outputs
//! are assembled in memory and only written once every requested stage has
//! succeeded.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::blockmodel::{
    adjusted_rand_index, align_blocks, infer, meta_graph, model_select, DlVariant, InferConfig,
    Partition, SbmGraph,
};
use crate::citenet::{cumulative_networks, most_cited_csv, prune, CumulativeNetwork, PruneParams, PrunedAuthorGraph};
use crate::config::{ConfigError, RunConfig};
use crate::corpus::{match_citations, AuthorId, CitationGraph, Corpus, LoadReport};
use crate::hypergraph::{parse_records, RecordError};
use crate::report::{self, csv_row, fmt3, svg, Annotated};
use crate::rules::{AtomLexicon, ClaimRules, CorrectionFactors, TopicCategory, TopicLexicon};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Classify,
    Topics,
    Network,
    Blocks,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Ingest,
        Stage::Classify,
        Stage::Topics,
        Stage::Network,
        Stage::Blocks,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Classify => "classify",
            Stage::Topics => "topics",
            Stage::Network => "network",
            Stage::Blocks => "blocks",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: Stage, message: String },
}

impl PipelineError {
    /// 1 for validation problems, 2 for stage failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Stage { .. } => 2,
        }
    }
}

fn fail(stage: Stage) -> impl Fn(String) -> PipelineError {
    move |message| PipelineError::Stage { stage, message }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Content hashes of every input file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct InputHashes {
    /// (role, file name, sha256)
    pub files: Vec<(String, String, String)>,
}

impl InputHashes {
    fn of(&self, role: &str) -> &str {
        self.files
            .iter()
            .find(|(r, _, _)| r == role)
            .map_or("", |(_, _, h)| h.as_str())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestResult {
    pub corpus: Corpus,
    pub report: LoadReport,
    pub citations: CitationGraph,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkResult {
    pub networks: Vec<CumulativeNetwork>,
    pub robustness: Option<PrunedAuthorGraph>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Selection {
    pub standard_dl: f64,
    pub degree_corrected_dl: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Robustness {
    pub k_out: usize,
    pub partition: Partition,
    pub common_nodes: usize,
    pub ari: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlocksResult {
    pub variant: DlVariant,
    pub selection: Option<Selection>,
    /// One per cumulative network; `None` when the pruned graph is empty.
    pub partitions: Vec<Option<Partition>>,
    pub robustness: Option<Robustness>,
}

impl BlocksResult {
    pub fn final_partition(&self) -> Option<&Partition> {
        self.partitions.last().and_then(Option::as_ref)
    }
}

/// Per-line errors of a hyperedge file.
pub fn parse_check(text: &str) -> (usize, Vec<RecordError>) {
    let mut ok = 0;
    let mut errors = Vec::new();
    for r in parse_records(text) {
        match r {
            Ok(_) => ok += 1,
            Err(e) => errors.push(e),
        }
    }
    (ok, errors)
}

/// Files produced by a run, written together on success.
#[derive(Debug, Default)]
pub struct Outputs {
    files: BTreeMap<String, String>,
}

impl Outputs {
    fn add(&mut self, name: impl Into<String>, content: String) {
        self.files.insert(name.into(), content);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.get(name).map(String::as_str)
    }

    /// Writes every file through a staging directory; on any error the
    /// files written so far are removed.
    pub fn commit(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        let staging = dir.join(".staging");
        if staging.exists() {
            fs::remove_dir_all(&staging)?;
        }
        fs::create_dir_all(&staging)?;
        let write_all = || -> std::io::Result<()> {
            for (name, content) in &self.files {
                fs::write(staging.join(name), content)?;
            }
            Ok(())
        };
        if let Err(e) = write_all() {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
        let mut moved = Vec::new();
        for name in self.files.keys() {
            if let Err(e) = fs::rename(staging.join(name), dir.join(name)) {
                for m in &moved {
                    let _ = fs::remove_file(dir.join(m));
                }
                let _ = fs::remove_dir_all(&staging);
                return Err(e);
            }
            moved.push(name);
        }
        fs::remove_dir_all(&staging)
    }
}

pub struct Pipeline {
    cfg: RunConfig,
    hashes: InputHashes,
    cache_dir: PathBuf,
    use_cache: bool,
}

struct Keys {
    ingest: String,
    classify: String,
    network: String,
    blocks: String,
}

impl Pipeline {
    /// Validates the configuration and hashes every input.
    pub fn new(cfg: RunConfig) -> Result<Pipeline, PipelineError> {
        cfg.validate()?;
        let mut hashes = InputHashes::default();
        let inputs = [
            ("bibliography", Some(&cfg.input.bibliography)),
            ("hyperedges", Some(&cfg.input.hyperedges)),
            ("lexicon", cfg.input.lexicon.as_ref()),
            ("topics", cfg.input.topics.as_ref()),
            ("journals", cfg.input.journals.as_ref()),
        ];
        for (role, path) in inputs {
            let Some(path) = path else { continue };
            let bytes = fs::read(path).map_err(|source| ConfigError::Io {
                path: path.clone(),
                source,
            })?;
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            hashes.files.push((role.into(), name, sha256_hex(&bytes)));
        }
        let cache_dir = cfg.out_dir.join(".cache");
        Ok(Pipeline {
            cfg,
            hashes,
            cache_dir,
            use_cache: true,
        })
    }

    pub fn without_cache(mut self) -> Self {
        self.use_cache = false;
        self
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    fn keys(&self) -> Keys {
        let h = |parts: &[&str]| {
            let mut d = Sha256::new();
            d.update(VERSION.as_bytes());
            for p in parts {
                d.update((p.len() as u64).to_le_bytes());
                d.update(p.as_bytes());
            }
            hex::encode(d.finalize())
        };
        let json = |v: &dyn erased::Json| v.json();
        let ingest = h(&["ingest", self.hashes.of("bibliography"), self.hashes.of("hyperedges")]);
        let classify = h(&[
            "classify",
            &ingest,
            self.hashes.of("lexicon"),
            self.hashes.of("topics"),
        ]);
        let network = h(&[
            "network",
            &ingest,
            &json(&self.cfg.periods),
            &json(&self.cfg.network),
        ]);
        let blocks = h(&["blocks", &network, &json(&self.cfg.sbm)]);
        Keys {
            ingest,
            classify,
            network,
            blocks,
        }
    }

    fn cached<T, F>(&self, stage: Stage, key: &str, compute: F) -> Result<T, PipelineError>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, PipelineError>,
    {
        let path = self.cache_dir.join(format!("{}-{}.json", stage.name(), &key[..16]));
        if self.use_cache {
            if let Ok(text) = fs::read_to_string(&path) {
                match serde_json::from_str(&text) {
                    Ok(v) => {
                        info!("{stage}: using cached result");
                        return Ok(v);
                    }
                    Err(e) => warn!("{stage}: ignoring unreadable cache {}: {e}", path.display()),
                }
            }
        }
        info!("{stage}: computing");
        let v = compute()?;
        if self.use_cache {
            let text = serde_json::to_string(&v).map_err(|e| fail(stage)(e.to_string()))?;
            fs::create_dir_all(&self.cache_dir)
                .and_then(|_| fs::write(&path, text))
                .map_err(|e| fail(stage)(format!("cannot write cache: {e}")))?;
        }
        Ok(v)
    }

    pub fn ingest(&self) -> Result<IngestResult, PipelineError> {
        self.cached(Stage::Ingest, &self.keys().ingest, || {
            let (mut corpus, report) =
                Corpus::load(&self.cfg.input.bibliography, &self.cfg.input.hyperedges)
                    .map_err(|e| fail(Stage::Ingest)(e.to_string()))?;
            for (line, id) in &report.unknown_article_lines {
                warn!("hyperedge line {line}: unknown article `{id}`");
            }
            corpus.reindex().map_err(|e| fail(Stage::Ingest)(e.to_string()))?;
            let citations = match_citations(&corpus);
            Ok(IngestResult {
                corpus,
                report,
                citations,
            })
        })
        .and_then(|mut r: IngestResult| {
            r.corpus
                .reindex()
                .map_err(|e| fail(Stage::Ingest)(e.to_string()))?;
            Ok(r)
        })
    }

    fn rules(&self) -> Result<(ClaimRules, TopicLexicon), PipelineError> {
        let read = |p: &PathBuf| {
            fs::read_to_string(p).map_err(|e| fail(Stage::Classify)(format!("{}: {e}", p.display())))
        };
        let atoms = match &self.cfg.input.lexicon {
            None => AtomLexicon::standard(),
            Some(p) => AtomLexicon::from_toml_str(&read(p)?)
                .map_err(|e| fail(Stage::Classify)(e.to_string()))?,
        };
        let topics = match &self.cfg.input.topics {
            None => TopicLexicon::standard(),
            Some(p) => TopicLexicon::from_toml_str(&read(p)?)
                .map_err(|e| fail(Stage::Classify)(e.to_string()))?,
        };
        Ok((ClaimRules::new(atoms), topics))
    }

    pub fn classify(&self, ingest: &IngestResult) -> Result<Annotated, PipelineError> {
        self.cached(Stage::Classify, &self.keys().classify, || {
            let (rules, topics) = self.rules()?;
            Ok(report::annotate(&ingest.corpus, &rules, &topics))
        })
    }

    pub fn network(&self, ingest: &IngestResult) -> Result<NetworkResult, PipelineError> {
        self.cached(Stage::Network, &self.keys().network, || {
            let params = PruneParams {
                k_out: self.cfg.network.k_out,
                min_received: self.cfg.network.min_received,
            };
            let networks =
                cumulative_networks(&ingest.corpus, &ingest.citations, &self.cfg.periods, params);
            let robustness = (self.cfg.network.robustness_k_out > 0).then(|| {
                let full = &networks.last().expect("at least one period").full;
                prune(
                    full,
                    PruneParams {
                        k_out: self.cfg.network.robustness_k_out,
                        ..params
                    },
                )
            });
            Ok(NetworkResult {
                networks,
                robustness,
            })
        })
    }

    pub fn blocks(&self, net: &NetworkResult) -> Result<BlocksResult, PipelineError> {
        self.cached(Stage::Blocks, &self.keys().blocks, || {
            let sbm = &self.cfg.sbm;
            let err = |e: crate::blockmodel::BlockModelError| fail(Stage::Blocks)(e.to_string());
            let graphs: Vec<SbmGraph> = net
                .networks
                .iter()
                .map(|n| SbmGraph::from_author_graph(&n.pruned.graph, sbm.binarize))
                .collect();
            let last = graphs.last().expect("at least one period");
            if last.node_count() == 0 {
                return Err(fail(Stage::Blocks)(
                    "the final pruned network is empty; lower network.min_received".into(),
                ));
            }
            let run = |g: &SbmGraph, variant| {
                infer(
                    g,
                    &InferConfig {
                        restarts: sbm.restarts,
                        variant,
                        seed: sbm.seed,
                    },
                )
            };
            let (variant, final_partition, selection) = match sbm.variant.fixed() {
                Some(v) => (v, run(last, v).map_err(err)?, None),
                None => {
                    let sel = model_select(last, sbm.restarts, sbm.seed).map_err(err)?;
                    let s = Selection {
                        standard_dl: sel.standard.dl,
                        degree_corrected_dl: sel.degree_corrected.dl,
                    };
                    (sel.selected, sel.selected_partition().clone(), Some(s))
                }
            };
            let mut partitions = Vec::new();
            for g in &graphs[..graphs.len() - 1] {
                partitions.push(if g.node_count() == 0 {
                    None
                } else {
                    Some(run(g, variant).map_err(err)?)
                });
            }
            let robustness = match &net.robustness {
                Some(pg) if !pg.graph.nodes.is_empty() => {
                    let g = SbmGraph::from_author_graph(&pg.graph, sbm.binarize);
                    let p = run(&g, variant).map_err(err)?;
                    let (a, b): (Vec<usize>, Vec<usize>) = final_partition
                        .nodes
                        .iter()
                        .zip(&final_partition.blocks)
                        .filter_map(|(n, &x)| p.block_of(n).map(|y| (x, y)))
                        .unzip();
                    Some(Robustness {
                        k_out: pg.k_out,
                        common_nodes: a.len(),
                        ari: (a.len() > 1).then(|| adjusted_rand_index(&a, &b)),
                        partition: p,
                    })
                }
                _ => None,
            };
            partitions.push(Some(final_partition));
            Ok(BlocksResult {
                variant,
                selection,
                partitions,
                robustness,
            })
        })
    }

    /// Runs everything needed for `only` (or every stage) and returns the
    /// outputs of the requested stage(s), without writing them.
    pub fn execute(&self, only: Option<Stage>) -> Result<Outputs, PipelineError> {
        let wants = |s: Stage| only.is_none_or(|o| o == s);
        let mut out = Outputs::default();
        let ingest = self.ingest()?;
        if wants(Stage::Ingest) {
            ingest_outputs(&ingest, &mut out);
        }
        if only == Some(Stage::Ingest) {
            return Ok(out);
        }
        let needs_classes = only.is_none_or(|o| matches!(o, Stage::Classify | Stage::Topics | Stage::Report));
        let annotated = if needs_classes {
            Some(self.classify(&ingest)?)
        } else {
            None
        };
        if let Some(a) = &annotated {
            if wants(Stage::Classify) {
                out.add("claims.csv", report::claims_csv(&a.claims));
            }
            if wants(Stage::Topics) {
                out.add("article_topics.csv", report::topics_csv(&ingest.corpus, &a.facts));
                let shares = report::topic_share_chart(&ingest.corpus, &a.facts, &self.cfg.periods);
                out.add("fig3_data.csv", shares.to_csv());
            }
        }
        if matches!(only, Some(Stage::Classify | Stage::Topics)) {
            return Ok(out);
        }
        let net = self.network(&ingest)?;
        if wants(Stage::Network) {
            network_outputs(&net, &mut out);
        }
        if only == Some(Stage::Network) {
            return Ok(out);
        }
        let blocks = self.blocks(&net)?;
        if wants(Stage::Blocks) {
            self.blocks_outputs(&net, &blocks, &mut out);
        }
        if wants(Stage::Report) {
            let a = annotated.expect("classified above");
            self.report_outputs(&ingest, &a, &net, &blocks, &mut out)
                .map_err(fail(Stage::Report))?;
        }
        out.add("manifest.txt", self.manifest(Some(&blocks)));
        Ok(out)
    }

    /// `execute` followed by writing the outputs into the output directory.
    pub fn run(&self, only: Option<Stage>) -> Result<Outputs, PipelineError> {
        let out = self.execute(only)?;
        out.commit(&self.cfg.out_dir)
            .map_err(|e| fail(only.unwrap_or(Stage::Report))(format!("writing outputs: {e}")))?;
        Ok(out)
    }

    pub fn manifest(&self, blocks: Option<&BlocksResult>) -> String {
        let mut s = format!("ekcmap_version\t{VERSION}\n");
        for (role, name, hash) in &self.hashes.files {
            s.push_str(&format!("input\t{role}\t{name}\tsha256:{hash}\n"));
        }
        let cfg_json = serde_json::to_string(&ConfigDigest::of(&self.cfg)).expect("serializable");
        s.push_str(&format!("config\tsha256:{}\n", sha256_hex(cfg_json.as_bytes())));
        s.push_str(&format!("seed\t{}\n", self.cfg.sbm.seed));
        s.push_str(&format!("restarts\t{}\n", self.cfg.sbm.restarts));
        if let Some(b) = blocks {
            s.push_str(&format!("variant\t{}\n", b.variant));
            if let Some(p) = b.final_partition() {
                s.push_str(&format!("dl\t{:.6}\n", p.dl));
                s.push_str(&format!("blocks\t{}\n", p.num_blocks));
            }
        }
        s
    }

    fn blocks_outputs(&self, net: &NetworkResult, b: &BlocksResult, out: &mut Outputs) {
        let labels: Vec<&str> = self.cfg.periods.labels();
        let last = b.final_partition();
        for (i, p) in b.partitions.iter().enumerate() {
            let Some(p) = p else { continue };
            out.add(format!("partition_{}.csv", labels[i]), p.to_csv());
            if i + 1 < b.partitions.len() {
                if let Some(f) = last {
                    out.add(format!("alignment_{}.csv", labels[i]), align_blocks(p, f).to_csv());
                }
            }
        }
        if let Some(p) = last {
            let pruned = &net.networks.last().expect("at least one period").pruned;
            let g = SbmGraph::from_author_graph(&pruned.graph, self.cfg.sbm.binarize);
            out.add("metagraph.csv", meta_graph(&g, p, self.cfg.sbm.threshold).to_csv());
        }
        let mut sel = format!("variant\t{}\n", b.variant);
        if let Some(s) = &b.selection {
            sel.push_str(&format!(
                "standard_dl\t{:.6}\ndegree_corrected_dl\t{:.6}\n",
                s.standard_dl, s.degree_corrected_dl
            ));
        }
        out.add("model_selection.txt", sel);
        if let Some(r) = &b.robustness {
            let main = last.map_or(0, |p| p.num_blocks);
            let text = format!(
                "k_out\t{}\t{}\nnodes\t{}\t{}\nblocks\t{}\t{}\ncommon_nodes\t{}\nadjusted_rand\t{}\n",
                self.cfg.network.k_out,
                r.k_out,
                last.map_or(0, |p| p.nodes.len()),
                r.partition.nodes.len(),
                main,
                r.partition.num_blocks,
                r.common_nodes,
                r.ari.map(fmt3).unwrap_or_default()
            );
            out.add("robustness.txt", text);
        }
    }

    fn report_outputs(
        &self,
        ingest: &IngestResult,
        a: &Annotated,
        net: &NetworkResult,
        b: &BlocksResult,
        out: &mut Outputs,
    ) -> Result<(), String> {
        let cfg = &self.cfg;
        let corpus = &ingest.corpus;
        let factors = if cfg.report.raw {
            CorrectionFactors::IDENTITY
        } else {
            cfg.correction
        };

        let series = report::posneg_timeseries(corpus, &a.facts, &factors);
        let data = report::posneg_csv(&series);
        let years: Vec<String> = series.iter().map(|y| y.year.to_string()).collect();
        out.add(
            "fig2.svg",
            svg::line_chart(
                "Articles with positive or negative results",
                "share of articles",
                &years,
                &[
                    ("positive", series.iter().map(|y| y.positive).collect()),
                    ("negative", series.iter().map(|y| y.negative).collect()),
                ],
                &data,
            ),
        );
        out.add("fig2_data.csv", data);

        let ratios = report::topic_ratio_table(corpus, &a.facts, &cfg.periods, &cfg.correction);
        out.add("table2.csv", ratios.to_csv());
        out.add("table2_counts.csv", ratios.counts_csv());

        let shares = report::topic_share_chart(corpus, &a.facts, &cfg.periods);
        let data = shares.to_csv();
        let names: Vec<&str> = TopicCategory::ALL.iter().map(|t| t.name()).collect();
        out.add(
            "fig3.svg",
            svg::bar_chart(
                "Articles per topic",
                "% of articles",
                &shares.periods.iter().map(|p| p.label.clone()).collect::<Vec<_>>(),
                &names,
                &shares.periods.iter().map(|p| p.percent.clone()).collect::<Vec<_>>(),
                &data,
            ),
        );
        out.add("fig3_data.csv", data);

        let index = report::AuthorIndex::new(corpus);
        let full = &net.networks.last().expect("at least one period").full;
        if let Some(p) = b.final_partition() {
            let metrics = report::block_metrics(&index, &a.facts, full, p, &cfg.correction)
                .map_err(|e| e.to_string())?;
            out.add("table3.csv", report::block_metrics_csv(&metrics));
            let topics = report::topic_share_by_block(&index, &a.facts, p).map_err(|e| e.to_string())?;
            out.add("table4.csv", topics.to_csv());

            let pruned = &net.networks.last().expect("at least one period").pruned;
            let g = SbmGraph::from_author_graph(&pruned.graph, cfg.sbm.binarize);
            let meta = meta_graph(&g, p, cfg.sbm.threshold);
            let received = full.received();
            let weight: Vec<f64> = (0..p.num_blocks)
                .map(|blk| {
                    p.members(blk)
                        .iter()
                        .map(|m| received.get(&AuthorId::new(m)).copied().unwrap_or(0) as f64)
                        .sum()
                })
                .collect();
            let labels: Vec<String> = (0..p.num_blocks).map(report::block_label).collect();
            out.add(
                "fig4d.svg",
                svg::meta_graph_svg("Author blocks", &meta, &labels, &weight, &meta.to_csv()),
            );
        }

        let anchors = (
            AuthorId::new(&cfg.report.anchors[0]),
            AuthorId::new(&cfg.report.anchors[1]),
        );
        let journals = report::journal_table(
            corpus,
            &ingest.citations,
            &cfg.periods,
            (&anchors.0, &anchors.1),
            cfg.report.min_journal_articles,
        )
        .map_err(|e| e.to_string())?;
        out.add("table5.csv", report::journal_csv(&journals, &cfg.periods));

        let wa = report::world_of_references(corpus, &ingest.citations, &anchors.0)
            .map_err(|e| e.to_string())?;
        let wb = report::world_of_references(corpus, &ingest.citations, &anchors.1)
            .map_err(|e| e.to_string())?;
        out.add("worlds.csv", report::worlds_csv(&[&wa, &wb]));
        let wor = report::wor_timeseries(corpus, &wa, &wb);
        let data = report::wor_csv(&wor);
        out.add(
            "fig5.svg",
            svg::line_chart(
                "Articles within each world of references",
                "share of articles",
                &wor.iter().map(|y| y.year.to_string()).collect::<Vec<_>>(),
                &[
                    (anchors.0.as_str(), wor.iter().map(|y| y.share_a).collect()),
                    (anchors.1.as_str(), wor.iter().map(|y| y.share_b).collect()),
                ],
                &data,
            ),
        );
        out.add("fig5_data.csv", data);
        if let Some(p) = b.final_partition() {
            let rows = report::block_world_shares(&index, p, &wa, &wb).map_err(|e| e.to_string())?;
            out.add("table6.csv", report::block_world_csv(&rows));
        }

        let classifier = cfg.journal_classifier().map_err(|e| e.to_string())?;
        let windows: Vec<_> = cfg
            .periods
            .periods
            .iter()
            .chain(&cfg.report.econ_windows)
            .cloned()
            .collect();
        let econ = report::econ_share_by_period(
            corpus,
            &windows,
            &classifier,
            cfg.report.min_journal_articles,
        );
        out.add("econ_shares.csv", report::econ_csv(&econ));
        Ok(())
    }
}

fn ingest_outputs(ingest: &IngestResult, out: &mut Outputs) {
    out.add("citations.csv", ingest.citations.to_csv(&ingest.corpus));
    let mut amb = String::from("citing_id,ref_title,ref_year,candidates\n");
    for m in &ingest.citations.ambiguous {
        amb.push_str(&csv_row(&[
            m.citing_id.clone(),
            m.ref_title.clone(),
            m.ref_year.to_string(),
            m.candidate_ids.join(";"),
        ]));
    }
    out.add("ambiguous_citations.csv", amb);
    let c = &ingest.corpus;
    let summary = format!(
        "articles\t{}\nauthors\t{}\nsentences\t{}\ncitations\t{}\nambiguous_references\t{}\nself_citations\t{}\ntemporal_violations\t{}\nunknown_hyperedge_lines\t{}\n",
        c.len(),
        c.authors().len(),
        c.articles().iter().map(|a| a.sentences.len()).sum::<usize>(),
        ingest.citations.edges.len(),
        ingest.citations.ambiguous.len(),
        ingest.citations.self_citations.len(),
        ingest.citations.temporal_violations,
        ingest.report.unknown_article_lines.len(),
    );
    out.add("ingest_summary.txt", summary);
}

fn network_outputs(net: &NetworkResult, out: &mut Outputs) {
    for n in &net.networks {
        out.add(format!("network_{}_full.csv", n.label), n.full.edges_csv());
        out.add(format!("network_{}_pruned.csv", n.label), n.pruned.graph.edges_csv());
        out.add(format!("network_{}_nodes.csv", n.label), n.pruned.nodes_csv());
    }
    if let Some(last) = net.networks.last() {
        out.add("most_cited.csv", most_cited_csv(&last.full, 20));
    }
    if let Some(r) = &net.robustness {
        out.add(format!("network_robustness_k{}_pruned.csv", r.k_out), r.graph.edges_csv());
    }
}

/// Configuration minus paths, so the manifest does not depend on where
/// files live.
#[derive(Serialize)]
struct ConfigDigest<'a> {
    periods: &'a crate::corpus::PeriodScheme,
    correction: &'a CorrectionFactors,
    network: &'a crate::config::NetworkConfig,
    sbm: &'a crate::config::SbmConfig,
    report: &'a crate::config::ReportConfig,
}

impl<'a> ConfigDigest<'a> {
    fn of(c: &'a RunConfig) -> Self {
        ConfigDigest {
            periods: &c.periods,
            correction: &c.correction,
            network: &c.network,
            sbm: &c.sbm,
            report: &c.report,
        }
    }
}

mod erased {
    pub trait Json {
        fn json(&self) -> String;
    }

    impl<T: serde::Serialize> Json for T {
        fn json(&self) -> String {
            serde_json::to_string(self).expect("serializable")
        }
    }
}

/// Sizes the global worker pool; 0 keeps one worker per core.
pub fn init_workers(workers: usize) {
    if workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            warn!("worker pool already initialised: {e}");
        }
    }
}
