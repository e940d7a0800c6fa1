use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{build_embedding, build_llm, CampaignConfig, Clock, ConfigError, EvaluatorConfig, Schedule};
use super::eval::{BuiltinEvaluator, EvalError, Evaluator, ProcessSpawner, SandboxEvaluator};
use super::store::{solution_id, Cost, Models, Selection, SolutionRecord, SolutionStore, Status, Steering, StoreError};
use crate::binpack::DEFAULT_HARMONIC_K;
use crate::feedback::{steering_target, AnalyticsError, FeedbackEmbedding, SteeringMode};
use crate::gpr::{Feature, GprError, GprModel};
use crate::ideation::{
    account_cost, CostError, LlmClient, LlmError, Pipeline, Pricing, StageFailure, Strategy,
};
use crate::stimuli::{
    default_pool, feature_of, load_pool, rsdict_select, rsdict_sf_select, CachedEmbedding, CandidateLog,
    EmbedError, EmbeddingProvider, KeywordPool, StimuliError,
};
use crate::trace::{Suite, TraceError};

pub const SOLUTIONS_FILE: &str = "solutions.jsonl";
pub const ITERATIONS_FILE: &str = "iterations.jsonl";
pub const EMBEDDINGS_FILE: &str = "embeddings.jsonl";
pub const CONFIG_SNAPSHOT: &str = "config.json";

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("loading suite: {0}")]
    Suite(#[from] TraceError),
    #[error("iteration {iteration}: {source}; campaign halted")]
    Llm {
        iteration: u64,
        #[source]
        source: LlmError,
    },
    #[error("iteration {iteration}: {source}; campaign halted")]
    Eval {
        iteration: u64,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Stimuli(#[from] StimuliError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Gpr(#[from] GprError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("gave up after {attempts} attempts with {ok} ok solutions")]
    AttemptsExhausted { attempts: u64, ok: u64 },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CampaignError + '_ {
    move |source| CampaignError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Protocol constants echoed into every iteration log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub s: usize,
    pub n: usize,
    pub w: u64,
    pub capacity_fraction: f64,
    pub temperature: f64,
    pub cpu_seconds: f64,
    pub harmonic_k: u32,
    pub candidates: usize,
    pub retries: u32,
}

/// One line of `iterations.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: u64,
    pub id: String,
    pub selection: Selection,
    /// Ok records the GPR was fitted on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SteeringMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<CandidateLog>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen_index: Option<usize>,
    pub status: Status,
    pub llm_calls: usize,
    pub protocol: Protocol,
}

pub fn read_iteration_log(path: &Path) -> Result<Vec<IterationLog>, CampaignError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CampaignError::Io {
                path: path.display().to_string(),
                source: std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1)),
            })
        })
        .collect()
}

/// Per-iteration generator, independent of how the campaign got there.
pub fn iteration_rng(seed: u64, iteration: u64) -> ChaCha8Rng {
    let mut s = [0u8; 32];
    s[..8].copy_from_slice(&seed.to_le_bytes());
    s[8..16].copy_from_slice(&iteration.to_le_bytes());
    ChaCha8Rng::from_seed(s)
}

/// A fully wired campaign. Fields are public so tests can swap providers.
pub struct Campaign {
    pub cfg: CampaignConfig,
    pub llm: Box<dyn LlmClient>,
    pub embedding: Box<dyn EmbeddingProvider>,
    pub evaluator: Box<dyn Evaluator>,
    pub suite: Suite,
    pub pool: KeywordPool,
    pub pricing: Pricing,
}

struct Chosen {
    selection: Selection,
    stimuli: Option<Vec<String>>,
    steering: Option<Steering>,
    training_size: Option<usize>,
    candidates: Vec<CandidateLog>,
    chosen_index: Option<usize>,
}

impl Campaign {
    pub fn from_config(cfg: CampaignConfig) -> Result<Self, CampaignError> {
        cfg.validate()?;
        std::fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;
        let llm = build_llm(&cfg.llm)?;
        let embedding: Box<dyn EmbeddingProvider> = Box::new(CachedEmbedding::open(
            build_embedding(&cfg.embedding)?,
            &cfg.out_dir.join(EMBEDDINGS_FILE),
        )?);
        let evaluator: Box<dyn Evaluator> = match &cfg.evaluator {
            EvaluatorConfig::Builtin => Box::new(BuiltinEvaluator {
                capacity_fraction: cfg.capacity_fraction,
                jobs: cfg.jobs,
            }),
            EvaluatorConfig::Sandbox { command, work_dir } => Box::new(SandboxEvaluator {
                spawner: ProcessSpawner {
                    command: command.clone(),
                },
                work_dir: work_dir.clone().unwrap_or_else(|| cfg.out_dir.join("sandbox")),
                capacity_fraction: cfg.capacity_fraction,
                limits: cfg.limits,
                jobs: cfg.jobs,
            }),
        };
        let suite = cfg.feedback_spec().load()?;
        let pool = match (&cfg.keywords, &cfg.stopwords) {
            (Some(k), Some(s)) => load_pool(k, s)?,
            _ => default_pool(),
        };
        let pricing = cfg.pricing_table()?;
        Ok(Self {
            cfg,
            llm,
            embedding,
            evaluator,
            suite,
            pool,
            pricing,
        })
    }

    pub fn solutions_path(&self) -> PathBuf {
        self.cfg.out_dir.join(SOLUTIONS_FILE)
    }

    pub fn iterations_path(&self) -> PathBuf {
        self.cfg.out_dir.join(ITERATIONS_FILE)
    }

    fn protocol(&self) -> Protocol {
        Protocol {
            s: self.cfg.s,
            n: self.suite.len(),
            w: self.cfg.warmup,
            capacity_fraction: self.cfg.capacity_fraction,
            temperature: self.cfg.temperature,
            cpu_seconds: self.cfg.limits.cpu_seconds,
            harmonic_k: DEFAULT_HARMONIC_K,
            candidates: self.cfg.candidates,
            retries: self.cfg.retries,
        }
    }

    fn created_at(&self, iteration: u64) -> String {
        let t = match self.cfg.clock {
            Clock::Wall => Utc::now(),
            Clock::Logical => DateTime::from_timestamp(iteration as i64, 0).expect("in range"),
        };
        t.to_rfc3339_opts(SecondsFormat::Secs, true)
    }

    /// Drops log lines for iterations that never reached the store.
    fn truncate_log(&self, persisted: u64) -> Result<(), CampaignError> {
        let path = self.iterations_path();
        let kept: Vec<IterationLog> = read_iteration_log(&path)?
            .into_iter()
            .filter(|l| l.iteration <= persisted)
            .collect();
        let mut text = String::new();
        for l in &kept {
            text.push_str(&serde_json::to_string(l).expect("serializable log"));
            text.push('\n');
        }
        std::fs::write(&path, text).map_err(io_err(&path))
    }

    fn choose(
        &self,
        ok: &[(Feature, FeedbackEmbedding)],
        prior_gpr: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Chosen, CampaignError> {
        let random = |selection, rng: &mut ChaCha8Rng| -> Result<Chosen, CampaignError> {
            Ok(Chosen {
                selection,
                stimuli: Some(rsdict_select(&self.pool, self.cfg.s, rng)?),
                steering: None,
                training_size: None,
                candidates: Vec::new(),
                chosen_index: None,
            })
        };
        match self.cfg.strategy {
            Strategy::Repeated => Ok(Chosen {
                selection: Selection::Unguided,
                stimuli: None,
                steering: None,
                training_size: None,
                candidates: Vec::new(),
                chosen_index: None,
            }),
            Strategy::Rsdict => random(Selection::Random, rng),
            Strategy::RsdictSf if (ok.len() as u64) < self.cfg.warmup.max(1) => random(Selection::Warmup, rng),
            Strategy::RsdictSf => {
                let features: Vec<Feature> = ok.iter().map(|(f, _)| f.clone()).collect();
                let targets: Vec<Vec<f64>> = ok.iter().map(|(_, e)| e.to_f64()).collect();
                let model = GprModel::fit(&features, &targets, self.cfg.gpr.sigma0, self.cfg.gpr.noise)?;
                let mode = match self.cfg.schedule {
                    Schedule::Exploit => SteeringMode::Exploit,
                    Schedule::Explore => SteeringMode::Explore,
                    Schedule::Alternate if prior_gpr.is_multiple_of(2) => SteeringMode::Exploit,
                    Schedule::Alternate => SteeringMode::Explore,
                };
                let history: Vec<FeedbackEmbedding> = ok.iter().map(|(_, e)| e.clone()).collect();
                let target = steering_target(mode, &history, self.suite.len(), self.cfg.explore_candidates, rng)?;
                let sel = rsdict_sf_select(
                    &self.pool,
                    self.cfg.s,
                    &model,
                    &target.0,
                    self.cfg.candidates,
                    self.embedding.as_ref(),
                    rng,
                )?;
                Ok(Chosen {
                    selection: Selection::Gpr,
                    stimuli: Some(sel.chosen.keywords),
                    steering: Some(Steering {
                        mode,
                        target: target.0,
                    }),
                    training_size: Some(ok.len()),
                    candidates: sel.candidates,
                    chosen_index: Some(sel.chosen_index),
                })
            }
        }
    }

    /// Runs (or resumes) the campaign until `iterations` ok records exist.
    pub fn run(&self) -> Result<SolutionStore, CampaignError> {
        std::fs::create_dir_all(&self.cfg.out_dir).map_err(io_err(&self.cfg.out_dir))?;
        let snapshot = self.cfg.out_dir.join(CONFIG_SNAPSHOT);
        let cfg_json = serde_json::to_string_pretty(&self.cfg).expect("serializable config");
        std::fs::write(&snapshot, cfg_json + "\n").map_err(io_err(&snapshot))?;

        let mut store = SolutionStore::open(&self.solutions_path())?;
        self.truncate_log(store.len() as u64)?;
        if !store.is_empty() {
            tracing::info!(records = store.len(), "resuming campaign");
        }

        let mut ok: Vec<(Feature, FeedbackEmbedding)> = Vec::new();
        let mut prior_gpr = 0usize;
        for r in store.records() {
            if r.selection == Selection::Gpr {
                prior_gpr += 1;
            }
            if let (Some(e), Some(kws)) = (&r.embedding, &r.stimuli) {
                ok.push((feature_of(kws, self.embedding.as_ref())?, e.clone()));
            }
        }
        let mut ok_count = store.ok_records().count() as u64;

        let ideation = self.cfg.ideation();
        let pipeline = Pipeline::new(self.llm.as_ref(), self.cfg.problem, ideation.clone());
        let protocol = self.protocol();
        let log_path = self.iterations_path();
        let mut log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .map_err(io_err(&log_path))?;

        while ok_count < self.cfg.iterations {
            let iteration = store.len() as u64 + 1;
            if iteration > self.cfg.max_attempts() {
                return Err(CampaignError::AttemptsExhausted {
                    attempts: store.len() as u64,
                    ok: ok_count,
                });
            }
            let mut rng = iteration_rng(self.cfg.seed, iteration);
            let chosen = self.choose(&ok, prior_gpr, &mut rng)?;
            let outcome = pipeline
                .ideate(chosen.stimuli.as_deref())
                .map_err(|source| CampaignError::Llm { iteration, source })?;

            let (status, embedding, error) = match (&outcome.failure, &outcome.code) {
                (Some(StageFailure::ParseFailed(e)), _) => (Status::ParseFailed, None, Some(e.clone())),
                (Some(StageFailure::BadModule(e)), _) => (Status::BadModule, None, Some(e.clone())),
                (Some(StageFailure::Llm(e)), _) => {
                    return Err(CampaignError::Llm {
                        iteration,
                        source: e.clone(),
                    })
                }
                (None, Some(code)) => {
                    let ev = self
                        .evaluator
                        .evaluate(self.cfg.problem, code, &self.suite)
                        .map_err(|source| CampaignError::Eval { iteration, source })?;
                    (ev.status, ev.embedding, ev.error)
                }
                (None, None) => (Status::BadModule, None, Some("no code produced".into())),
            };

            let usd = account_cost(&outcome.ledger, &self.pricing)?;
            let rec = SolutionRecord {
                id: solution_id(iteration),
                iteration,
                strategy: self.cfg.strategy,
                selection: chosen.selection,
                stimuli: chosen.stimuli.clone(),
                steering: chosen.steering.clone(),
                transcripts: outcome.transcripts,
                design: outcome.design,
                code: outcome.code,
                status,
                embedding,
                cost: Cost {
                    calls: outcome.ledger.len() as u64,
                    prompt_tokens: outcome.ledger.iter().map(|e| e.prompt_tokens).sum(),
                    completion_tokens: outcome.ledger.iter().map(|e| e.completion_tokens).sum(),
                    usd: usd.to_string(),
                },
                models: Models {
                    client: self.llm.id().to_string(),
                    ideation: ideation.ideation_model.clone(),
                    coding: ideation.coding_model.clone(),
                },
                created_at: self.created_at(iteration),
                error,
            };

            let entry = IterationLog {
                iteration,
                id: rec.id.clone(),
                selection: chosen.selection,
                training_size: chosen.training_size,
                mode: chosen.steering.as_ref().map(|s| s.mode),
                target: chosen.steering.as_ref().map(|s| s.target.clone()),
                candidates: chosen.candidates,
                chosen_index: chosen.chosen_index,
                status,
                llm_calls: outcome.ledger.len(),
                protocol,
            };
            let line = serde_json::to_string(&entry).expect("serializable log") + "\n";
            log.write_all(line.as_bytes())
                .and_then(|_| log.flush())
                .map_err(io_err(&log_path))?;

            tracing::info!(iteration, id = %rec.id, status = %status, selection = ?chosen.selection, "solution recorded");
            if chosen.selection == Selection::Gpr {
                prior_gpr += 1;
            }
            if let Some(e) = &rec.embedding {
                if let Some(kws) = &rec.stimuli {
                    ok.push((feature_of(kws, self.embedding.as_ref())?, e.clone()));
                }
                ok_count += 1;
            }
            store.append(rec)?;
        }
        Ok(store)
    }
}

/// Builds every provider from `cfg` and runs the campaign.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<SolutionStore, CampaignError> {
    Campaign::from_config(cfg.clone())?.run()
}
