//! Run configuration with full defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blockmodel::DlVariant;
use crate::corpus::{JournalClassifier, Period, PeriodScheme};
use crate::rules::CorrectionFactors;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("missing input file {0}")]
    MissingFile(PathBuf),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub bibliography: PathBuf,
    pub hyperedges: PathBuf,
    /// Claim lexicon TOML; the built-in lexicon when unset.
    pub lexicon: Option<PathBuf>,
    /// Topic lexicon TOML; the built-in lexicon when unset.
    pub topics: Option<PathBuf>,
    /// Journal classification TOML (`economic`, `non_economic` lists).
    pub journals: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub k_out: usize,
    pub min_received: u64,
    /// Second pruning used for the robustness comparison; 0 disables it.
    pub robustness_k_out: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            k_out: 3,
            min_received: 10,
            robustness_k_out: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantChoice {
    /// Infer under both variants and keep the lower description length.
    #[default]
    Auto,
    Standard,
    DegreeCorrected,
}

impl VariantChoice {
    pub fn fixed(self) -> Option<DlVariant> {
        match self {
            VariantChoice::Auto => None,
            VariantChoice::Standard => Some(DlVariant::Standard),
            VariantChoice::DegreeCorrected => Some(DlVariant::DegreeCorrected),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SbmConfig {
    pub restarts: usize,
    pub variant: VariantChoice,
    pub seed: u64,
    pub threshold: f64,
    pub binarize: bool,
}

impl Default for SbmConfig {
    fn default() -> Self {
        SbmConfig {
            restarts: 10_000,
            variant: VariantChoice::Auto,
            seed: 42,
            threshold: 0.01,
            binarize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Two anchor authors as "Surname, Initials".
    pub anchors: [String; 2],
    pub min_journal_articles: usize,
    /// Report raw instead of corrected shares in the yearly series.
    pub raw: bool,
    /// Extra windows for the economics-journal shares.
    pub econ_windows: Vec<Period>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            anchors: ["Stern, D.I.".into(), "Öztürk, I.".into()],
            min_journal_articles: 20,
            raw: false,
            econ_windows: vec![
                Period::new("1996-2000", 1996, 2000),
                Period::new("2001-2005", 2001, 2005),
                Period::new("2006-2010", 2006, 2010),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputConfig,
    pub periods: PeriodScheme,
    pub correction: CorrectionFactors,
    pub network: NetworkConfig,
    pub sbm: SbmConfig,
    pub report: ReportConfig,
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: InputConfig::default(),
            periods: PeriodScheme::default(),
            correction: CorrectionFactors::default(),
            network: NetworkConfig::default(),
            sbm: SbmConfig::default(),
            report: ReportConfig::default(),
            out_dir: PathBuf::from("out"),
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    /// Reads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg = RunConfig::from_toml_str(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if !p.as_os_str().is_empty() && p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.input.bibliography);
        fix(&mut self.input.hyperedges);
        for p in [
            &mut self.input.lexicon,
            &mut self.input.topics,
            &mut self.input.journals,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut self.out_dir);
    }

    /// Parameter ranges only.
    pub fn validate_params(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        self.periods.validate().map_err(ConfigError::Invalid)?;
        if self.periods.periods.is_empty() {
            return bad("at least one period is required".into());
        }
        self.correction.validate().map_err(ConfigError::Invalid)?;
        if self.network.k_out < 1 {
            return bad("network.k_out must be at least 1".into());
        }
        if self.sbm.restarts < 1 {
            return bad("sbm.restarts must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.sbm.threshold) {
            return bad(format!("sbm.threshold = {} is outside [0, 1)", self.sbm.threshold));
        }
        for w in &self.report.econ_windows {
            if w.start > w.end {
                return bad(format!("window {} ends before it starts", w.label));
            }
        }
        Ok(())
    }

    /// Parameter ranges plus existence of every referenced input file.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_params()?;
        let required = [&self.input.bibliography, &self.input.hyperedges];
        let optional = [&self.input.lexicon, &self.input.topics, &self.input.journals];
        for p in required
            .into_iter()
            .chain(optional.into_iter().flatten())
        {
            if p.as_os_str().is_empty() || !p.is_file() {
                return Err(ConfigError::MissingFile(p.clone()));
            }
        }
        Ok(())
    }

    pub fn journal_classifier(&self) -> Result<JournalClassifier, ConfigError> {
        match &self.input.journals {
            None => Ok(JournalClassifier::default()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.clone(),
                    source,
                })?;
                toml::from_str(&text).map_err(|e| ConfigError::Syntax(e.to_string()))
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
