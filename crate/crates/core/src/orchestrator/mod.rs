//! Campaign orchestration: configuration, evaluation, the solution store,
//! the iteration loop and reporting.

mod campaign;
mod config;
mod eval;
pub mod report;
mod store;

pub use campaign::{
    iteration_rng, read_iteration_log, run_campaign, Campaign, CampaignError, IterationLog, Protocol,
    CONFIG_SNAPSHOT, EMBEDDINGS_FILE, ITERATIONS_FILE, SOLUTIONS_FILE,
};
pub use config::{
    build_embedding, build_llm, CampaignConfig, Clock, ConfigError, EmbeddingConfig, EvaluatorConfig, GprConfig,
    LlmConfig, Schedule, DEFAULT_CANDIDATES, DEFAULT_CAPACITY_FRACTION, DEFAULT_ITERATIONS, DEFAULT_JOBS, DEFAULT_S,
    DEFAULT_WARMUP,
};
pub use eval::{
    fan_out, parse_directive, run_bin_builtin, run_cache_builtin, BuiltinEvaluator, BuiltinPolicy,
    EvalError, Evaluation, Evaluator, Limits, ProcessOutput, ProcessSpawner, RunVerdict,
    SandboxEvaluator, Spawner, TraceMetrics, BUILTIN_DIRECTIVE, WALL_BACKSTOP_FACTOR,
};
pub use store::{
    solution_id, Cost, Models, Selection, SolutionRecord, SolutionStore, Status, Steering, StoreError,
};
