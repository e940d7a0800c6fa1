use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::eval::Limits;
use crate::feedback::DEFAULT_EXPLORE_CANDIDATES;
use crate::gpr::{DEFAULT_NOISE, DEFAULT_SIGMA0};
use crate::ideation::{
    HttpChatClient, IdeationConfig, LlmClient, LlmError, MockLlm, Pricing, Problem, RecordingClient, ReplayClient,
    Strategy,
};
use crate::stimuli::{EmbeddingProvider, HttpEmbedding, MockEmbedding};
use crate::trace::SuiteSpec;

pub const DEFAULT_ITERATIONS: u64 = 350;
pub const DEFAULT_S: usize = 4;
pub const DEFAULT_WARMUP: u64 = 100;
pub const DEFAULT_CAPACITY_FRACTION: f64 = 0.10;
pub const DEFAULT_CANDIDATES: usize = 2;
pub const DEFAULT_JOBS: usize = 4;

/// Which steering target each GPR-selected iteration uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Exploit first, then explore, and so on.
    #[default]
    Alternate,
    Exploit,
    Explore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LlmConfig {
    Mock {
        #[serde(default)]
        seed: u64,
    },
    Replay {
        dir: PathBuf,
    },
    Http {
        base_url: String,
        /// Environment variable holding the API key.
        #[serde(default)]
        api_key_env: Option<String>,
    },
    /// Wraps another client and writes every response as a replay fixture.
    Record {
        dir: PathBuf,
        inner: Box<LlmConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EmbeddingConfig {
    Mock {
        #[serde(default)]
        seed: u64,
    },
    Http {
        base_url: String,
        model: String,
        dim: usize,
        #[serde(default)]
        api_key_env: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GprConfig {
    pub sigma0: f64,
    pub noise: f64,
}

impl Default for GprConfig {
    fn default() -> Self {
        Self {
            sigma0: DEFAULT_SIGMA0,
            noise: DEFAULT_NOISE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EvaluatorConfig {
    /// Native simulation of `# forge-builtin:` sources only.
    Builtin,
    /// The external runner, e.g. `["python3", "-m", "forge_runner"]`.
    Sandbox {
        command: Vec<String>,
        #[serde(default)]
        work_dir: Option<PathBuf>,
    },
}

/// Source of `created_at` timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clock {
    #[default]
    Wall,
    /// Iteration `i` is stamped `i` seconds after the epoch.
    Logical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub problem: Problem,
    pub strategy: Strategy,
    /// Ok-status solutions to collect.
    pub iterations: u64,
    pub s: usize,
    pub warmup: u64,
    /// Defaults to the problem's 30-trace feedback suite.
    pub feedback_suite: Option<SuiteSpec>,
    /// Defaults to the problem's held-out 12-trace suite.
    pub eval_suite: Option<SuiteSpec>,
    pub capacity_fraction: f64,
    pub schedule: Schedule,
    pub candidates: usize,
    pub explore_candidates: usize,
    pub retries: u32,
    pub temperature: f64,
    pub ideation_model: String,
    pub coding_model: String,
    pub no_waypoints: bool,
    pub llm: LlmConfig,
    pub embedding: EmbeddingConfig,
    pub gpr: GprConfig,
    pub limits: Limits,
    pub evaluator: EvaluatorConfig,
    pub jobs: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub clock: Clock,
    /// Total records, failures included, before the campaign gives up.
    /// Defaults to four times `iterations`.
    pub max_attempts: Option<u64>,
    /// Pricing table JSON; the built-in table when absent.
    pub pricing: Option<PathBuf>,
    /// Keyword list and stop-word list; the bundled pool when absent.
    pub keywords: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        let ideation = IdeationConfig::default();
        Self {
            problem: Problem::Cache,
            strategy: Strategy::RsdictSf,
            iterations: DEFAULT_ITERATIONS,
            s: DEFAULT_S,
            warmup: DEFAULT_WARMUP,
            feedback_suite: None,
            eval_suite: None,
            capacity_fraction: DEFAULT_CAPACITY_FRACTION,
            schedule: Schedule::default(),
            candidates: DEFAULT_CANDIDATES,
            explore_candidates: DEFAULT_EXPLORE_CANDIDATES,
            retries: ideation.retries,
            temperature: ideation.temperature,
            ideation_model: ideation.ideation_model,
            coding_model: ideation.coding_model,
            no_waypoints: ideation.no_waypoints,
            llm: LlmConfig::Mock { seed: 0 },
            embedding: EmbeddingConfig::Mock { seed: 0 },
            gpr: GprConfig::default(),
            limits: Limits::default(),
            evaluator: EvaluatorConfig::Builtin,
            jobs: DEFAULT_JOBS,
            seed: 0,
            out_dir: PathBuf::from("campaign"),
            clock: Clock::default(),
            max_attempts: None,
            pricing: None,
            keywords: None,
            stopwords: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("environment variable {0} is not set")]
    MissingEnv(String),
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

fn resolve_llm(base: &Path, llm: &mut LlmConfig) {
    match llm {
        LlmConfig::Replay { dir } => resolve(base, dir),
        LlmConfig::Record { dir, inner } => {
            resolve(base, dir);
            resolve_llm(base, inner);
        }
        LlmConfig::Mock { .. } | LlmConfig::Http { .. } => {}
    }
}

fn api_key(env: &Option<String>) -> Result<Option<String>, ConfigError> {
    match env {
        None => Ok(None),
        Some(name) => std::env::var(name)
            .map(Some)
            .map_err(|_| ConfigError::MissingEnv(name.clone())),
    }
}

impl CampaignConfig {
    /// Parses a JSON config; relative paths are taken relative to the file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        resolve(base, &mut self.out_dir);
        resolve_llm(base, &mut self.llm);
        for spec in [&mut self.feedback_suite, &mut self.eval_suite].into_iter().flatten() {
            if let SuiteSpec::Dir(d) = spec {
                resolve(base, d);
            }
        }
        for p in [&mut self.pricing, &mut self.keywords, &mut self.stopwords].into_iter().flatten() {
            resolve(base, p);
        }
        if let EvaluatorConfig::Sandbox { work_dir: Some(d), .. } = &mut self.evaluator {
            resolve(base, d);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.strategy == Strategy::RsdictSf && self.warmup > self.iterations {
            return bad(format!("warmup {} exceeds iterations {}", self.warmup, self.iterations));
        }
        if self.s < 1 {
            return bad("s must be >= 1".into());
        }
        if self.jobs < 1 {
            return bad("jobs must be >= 1".into());
        }
        if self.strategy == Strategy::RsdictSf && self.candidates < 2 {
            return bad(format!("candidates must be >= 2, got {}", self.candidates));
        }
        if !(self.capacity_fraction > 0.0 && self.capacity_fraction <= 1.0) {
            return bad(format!("capacity_fraction must be in (0, 1], got {}", self.capacity_fraction));
        }
        if self.limits.cpu_seconds.is_nan() || self.limits.cpu_seconds <= 0.0 {
            return bad("limits.cpu_seconds must be positive".into());
        }
        if self.keywords.is_some() != self.stopwords.is_some() {
            return bad("keywords and stopwords must be given together".into());
        }
        if self.max_attempts.is_some_and(|m| m < self.iterations) {
            return bad("max_attempts must be >= iterations".into());
        }
        if let EvaluatorConfig::Sandbox { command, .. } = &self.evaluator {
            if command.is_empty() {
                return bad("evaluator.command is empty".into());
            }
        }
        Ok(())
    }

    pub fn feedback_spec(&self) -> SuiteSpec {
        self.feedback_suite.clone().unwrap_or(match self.problem {
            Problem::Cache => SuiteSpec::CacheFeedback,
            Problem::Binpack => SuiteSpec::BinFeedback,
        })
    }

    pub fn eval_spec(&self) -> SuiteSpec {
        self.eval_suite.clone().unwrap_or(match self.problem {
            Problem::Cache => SuiteSpec::CacheEval,
            Problem::Binpack => SuiteSpec::BinEval,
        })
    }

    pub fn max_attempts(&self) -> u64 {
        self.max_attempts.unwrap_or(self.iterations.saturating_mul(4))
    }

    pub fn ideation(&self) -> IdeationConfig {
        IdeationConfig {
            ideation_model: self.ideation_model.clone(),
            coding_model: self.coding_model.clone(),
            temperature: self.temperature,
            retries: self.retries,
            no_waypoints: self.no_waypoints,
        }
    }

    pub fn pricing_table(&self) -> Result<Pricing, ConfigError> {
        match &self.pricing {
            None => Ok(Pricing::builtin()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                Pricing::from_json(&text).map_err(|source| ConfigError::Parse {
                    path: p.display().to_string(),
                    source,
                })
            }
        }
    }
}

pub fn build_llm(cfg: &LlmConfig) -> Result<Box<dyn LlmClient>, ConfigError> {
    Ok(match cfg {
        LlmConfig::Mock { seed } => Box::new(MockLlm::new(*seed)),
        LlmConfig::Replay { dir } => Box::new(ReplayClient::new(dir.clone())),
        LlmConfig::Http { base_url, api_key_env } => Box::new(HttpChatClient::new(base_url, api_key(api_key_env)?)),
        LlmConfig::Record { dir, inner } => {
            let inner = build_llm(inner)?;
            Box::new(RecordingClient::new(inner, dir).map_err(|e: LlmError| ConfigError::Invalid(e.to_string()))?)
        }
    })
}

pub fn build_embedding(cfg: &EmbeddingConfig) -> Result<Box<dyn EmbeddingProvider>, ConfigError> {
    Ok(match cfg {
        EmbeddingConfig::Mock { seed } => Box::new(MockEmbedding::new(*seed)),
        EmbeddingConfig::Http {
            base_url,
            model,
            dim,
            api_key_env,
        } => Box::new(HttpEmbedding::new(base_url, model, api_key(api_key_env)?, *dim)),
    })
}
