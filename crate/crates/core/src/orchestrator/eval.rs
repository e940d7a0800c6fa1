//! Turning generated source into a feedback embedding: natively for
//! sources that name a built-in policy, or through the external runner.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::Status;
use crate::binpack::{make_bin_heuristic, pack, BinHeuristic, PackError, PackMetrics};
use crate::cache::{
    capacity_for_trace, make_baseline_policy, simulate, BaselineName, CacheMetrics, PolicyParams,
    SimError,
};
use crate::feedback::{FeedbackEmbedding, Fraction};
use crate::ideation::Problem;
use crate::trace::{BinTrace, Suite, SuiteTraces, Trace};

pub const BUILTIN_DIRECTIVE: &str = "# forge-builtin:";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub cpu_seconds: f64,
    pub mem_bytes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            cpu_seconds: 5.0,
            mem_bytes: 1 << 30,
        }
    }
}

/// Per-trace measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TraceMetrics {
    Cache(CacheMetrics),
    Pack(PackMetrics),
}

impl TraceMetrics {
    /// Hit ratio or packing score as an exact fraction.
    pub fn feedback(&self) -> Fraction {
        match self {
            TraceMetrics::Cache(m) => Fraction::new(m.hits, m.accesses.max(1)),
            TraceMetrics::Pack(m) => Fraction::new(m.lower_bound, m.bins_used.max(1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub status: Status,
    pub per_trace: Vec<TraceMetrics>,
    pub embedding: Option<FeedbackEmbedding>,
    pub error: Option<String>,
}

impl Evaluation {
    fn failed(status: Status, error: String) -> Self {
        Self {
            status,
            per_trace: Vec::new(),
            embedding: None,
            error: Some(error),
        }
    }

    fn from_results(suite: &Suite, results: Vec<Result<TraceMetrics, (Status, String)>>) -> Self {
        let mut per_trace = Vec::with_capacity(results.len());
        let ids = suite.trace_ids();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(m) => per_trace.push(m),
                Err((status, e)) => return Self::failed(status, format!("trace {}: {e}", ids[i])),
            }
        }
        let values = per_trace.iter().map(TraceMetrics::feedback).collect();
        Self {
            status: Status::Ok,
            embedding: Some(FeedbackEmbedding::new(suite.id.clone(), values)),
            per_trace,
            error: None,
        }
    }
}

/// Failures of the evaluation machinery itself, as opposed to verdicts
/// about the policy.
#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("suite {suite} holds {kind} traces but the problem is {problem}")]
    WrongSuite { suite: String, kind: &'static str, problem: Problem },
    #[error("runner rejected the invocation: {0}")]
    BadInvocation(String),
    #[error("runner infrastructure failure: {0}")]
    Infrastructure(String),
    #[error("io on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub trait Evaluator: Send + Sync {
    fn evaluate(&self, problem: Problem, source: &str, suite: &Suite) -> Result<Evaluation, EvalError>;
}

/// Runs `f(0..n)` on at most `jobs` threads, preserving index order.
pub fn fan_out<T: Send, F: Fn(usize) -> T + Sync>(n: usize, jobs: usize, f: F) -> Vec<T> {
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, n.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let v = f(i);
                *slots[i].lock().expect("slot lock") = Some(v);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every slot filled"))
        .collect()
}

/// A policy named by a `# forge-builtin: name k=v ...` line.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinPolicy {
    Cache(BaselineName, PolicyParams),
    Bin(BinHeuristic, PolicyParams),
}

/// Finds and validates the directive; `Err` explains why the source is not
/// runnable natively.
pub fn parse_directive(problem: Problem, source: &str) -> Result<BuiltinPolicy, String> {
    let line = source
        .lines()
        .find_map(|l| l.trim().strip_prefix(BUILTIN_DIRECTIVE))
        .ok_or("source has no forge-builtin directive; only native policies run without the sandbox runner")?;
    let line = line.trim();
    let (name, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let params = PolicyParams::parse(rest).map_err(|e| e.to_string())?;
    let policy = match problem {
        Problem::Cache => {
            let n: BaselineName = name.parse().map_err(|e: crate::cache::PolicyError| e.to_string())?;
            make_baseline_policy(n, &params).map_err(|e| e.to_string())?;
            BuiltinPolicy::Cache(n, params)
        }
        Problem::Binpack => {
            let n: BinHeuristic = name.parse().map_err(|e: crate::cache::PolicyError| e.to_string())?;
            make_bin_heuristic(n, &params).map_err(|e| e.to_string())?;
            BuiltinPolicy::Bin(n, params)
        }
    };
    Ok(policy)
}

fn sim_status(e: &SimError) -> Status {
    match e {
        SimError::IllegalEviction { .. } => Status::IllegalEviction,
        _ => Status::RuntimeError,
    }
}

fn pack_status(e: &PackError) -> Status {
    match e {
        PackError::IllegalPlacement { .. } => Status::IllegalPlacement,
        _ => Status::RuntimeError,
    }
}

pub fn run_cache_builtin(
    name: BaselineName,
    params: &PolicyParams,
    trace: &Trace,
    fraction: f64,
) -> Result<CacheMetrics, (Status, String)> {
    let cap = capacity_for_trace(trace, fraction).map_err(|e| (Status::RuntimeError, e.to_string()))?;
    let mut p = make_baseline_policy(name, params).map_err(|e| (Status::BadModule, e.to_string()))?;
    simulate(trace, cap, &mut p).map_err(|e| (sim_status(&e), e.to_string()))
}

pub fn run_bin_builtin(
    name: BinHeuristic,
    params: &PolicyParams,
    trace: &BinTrace,
) -> Result<PackMetrics, (Status, String)> {
    let mut p = make_bin_heuristic(name, params).map_err(|e| (Status::BadModule, e.to_string()))?;
    pack(trace, &mut p).map_err(|e| (pack_status(&e), e.to_string()))
}

fn check_suite(problem: Problem, suite: &Suite) -> Result<(), EvalError> {
    match (problem, &suite.traces) {
        (Problem::Cache, SuiteTraces::Cache(_)) | (Problem::Binpack, SuiteTraces::Bin(_)) => Ok(()),
        (_, t) => Err(EvalError::WrongSuite {
            suite: suite.id.clone(),
            kind: match t {
                SuiteTraces::Cache(_) => "cache",
                SuiteTraces::Bin(_) => "bin",
            },
            problem,
        }),
    }
}

/// Native evaluation of directive-tagged sources.
#[derive(Debug, Clone)]
pub struct BuiltinEvaluator {
    pub capacity_fraction: f64,
    pub jobs: usize,
}

impl BuiltinEvaluator {
    pub fn evaluate_policy(&self, policy: &BuiltinPolicy, suite: &Suite) -> Evaluation {
        let results: Vec<Result<TraceMetrics, (Status, String)>> = match (&suite.traces, policy) {
            (SuiteTraces::Cache(ts), BuiltinPolicy::Cache(n, p)) => fan_out(ts.len(), self.jobs, |i| {
                run_cache_builtin(*n, p, &ts[i], self.capacity_fraction).map(TraceMetrics::Cache)
            }),
            (SuiteTraces::Bin(ts), BuiltinPolicy::Bin(n, p)) => {
                fan_out(ts.len(), self.jobs, |i| run_bin_builtin(*n, p, &ts[i]).map(TraceMetrics::Pack))
            }
            _ => return Evaluation::failed(Status::BadModule, "policy does not match the suite kind".into()),
        };
        Evaluation::from_results(suite, results)
    }
}

impl Evaluator for BuiltinEvaluator {
    fn evaluate(&self, problem: Problem, source: &str, suite: &Suite) -> Result<Evaluation, EvalError> {
        check_suite(problem, suite)?;
        Ok(match parse_directive(problem, source) {
            Ok(p) => self.evaluate_policy(&p, suite),
            Err(e) => Evaluation::failed(Status::BadModule, e),
        })
    }
}

/// What a runner process produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessOutput {
    /// `None` when killed by a signal or by the wall-clock backstop.
    pub code: Option<i32>,
    pub stdout: String,
    pub stderr: String,
    pub killed_by_backstop: bool,
}

/// Launches runner processes. Implementations must block until the
/// process has exited.
pub trait Spawner: Send + Sync {
    fn run(&self, args: &[String], wall_limit: Duration) -> std::io::Result<ProcessOutput>;
}

/// Spawns `command[0] command[1..] args...`.
#[derive(Debug, Clone)]
pub struct ProcessSpawner {
    pub command: Vec<String>,
}

impl Spawner for ProcessSpawner {
    fn run(&self, args: &[String], wall_limit: Duration) -> std::io::Result<ProcessOutput> {
        let (prog, pre) = self
            .command
            .split_first()
            .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty runner command"))?;
        let mut cmd = Command::new(prog);
        cmd.args(pre)
            .args(args)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        #[cfg(unix)]
        std::os::unix::process::CommandExt::process_group(&mut cmd, 0);
        let mut child = cmd.spawn()?;
        let mut out_pipe = child.stdout.take().expect("piped stdout");
        let mut err_pipe = child.stderr.take().expect("piped stderr");
        let out_t = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = out_pipe.read_to_string(&mut s);
            s
        });
        let err_t = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = err_pipe.read_to_string(&mut s);
            s
        });
        let start = Instant::now();
        let mut killed = false;
        let status = loop {
            if let Some(st) = child.try_wait()? {
                break st;
            }
            if start.elapsed() > wall_limit {
                kill_tree(&mut child);
                killed = true;
                break child.wait()?;
            }
            std::thread::sleep(Duration::from_millis(5));
        };
        Ok(ProcessOutput {
            code: if killed { None } else { status.code() },
            stdout: out_t.join().unwrap_or_default(),
            stderr: err_t.join().unwrap_or_default(),
            killed_by_backstop: killed,
        })
    }
}

// Grandchildren would otherwise keep the output pipes open.
fn kill_tree(child: &mut std::process::Child) {
    #[cfg(unix)]
    if let Ok(pid) = libc::pid_t::try_from(child.id()) {
        // SAFETY: signalling a process group we created; no memory is touched.
        unsafe {
            libc::kill(-pid, libc::SIGKILL);
        }
    }
    let _ = child.kill();
}

/// The runner's single-line JSON verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunVerdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub misses: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accesses: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins_used: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunVerdict {
    /// Parses stdout, which must hold exactly one JSON line.
    pub fn parse(stdout: &str) -> Result<Self, String> {
        let lines: Vec<&str> = stdout.lines().filter(|l| !l.trim().is_empty()).collect();
        if lines.len() != 1 {
            return Err(format!("expected one JSON line on stdout, got {}", lines.len()));
        }
        serde_json::from_str(lines[0]).map_err(|e| format!("malformed verdict: {e}"))
    }

    /// Metrics for an `ok` verdict, checked for consistency.
    pub fn metrics(&self, problem: Problem) -> Result<TraceMetrics, String> {
        match problem {
            Problem::Cache => match (self.hits, self.misses, self.accesses) {
                (Some(h), Some(m), Some(a)) if h + m == a => {
                    Ok(TraceMetrics::Cache(CacheMetrics { hits: h, misses: m, accesses: a }))
                }
                _ => Err(format!("inconsistent cache metrics in verdict {self:?}")),
            },
            Problem::Binpack => match (self.bins_used, self.lower_bound) {
                (Some(b), Some(l)) if l >= 1 && b >= l => {
                    Ok(TraceMetrics::Pack(PackMetrics { bins_used: b, lower_bound: l }))
                }
                _ => Err(format!("inconsistent packing metrics in verdict {self:?}")),
            },
        }
    }
}

/// Evaluates arbitrary sources by invoking the external runner once per
/// trace, with at most `jobs` processes alive at a time.
pub struct SandboxEvaluator<S> {
    pub spawner: S,
    pub work_dir: PathBuf,
    pub capacity_fraction: f64,
    pub limits: Limits,
    pub jobs: usize,
}

/// Multiplier on the CPU limit for the wall-clock kill.
pub const WALL_BACKSTOP_FACTOR: f64 = 4.0;

impl<S: Spawner> SandboxEvaluator<S> {
    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> EvalError + '_ {
        move |source| EvalError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Command-line arguments for one runner invocation.
    pub fn runner_args(
        &self,
        problem: Problem,
        policy: &Path,
        trace: &Path,
        capacity: Option<u64>,
    ) -> Vec<String> {
        let mut a = vec![
            problem.as_str().to_string(),
            "--policy".into(),
            policy.display().to_string(),
            "--trace".into(),
            trace.display().to_string(),
        ];
        if let Some(c) = capacity {
            a.push("--capacity".into());
            a.push(c.to_string());
        }
        a.extend([
            "--cpu-limit".into(),
            self.limits.cpu_seconds.to_string(),
            "--mem-limit".into(),
            self.limits.mem_bytes.to_string(),
        ]);
        a
    }

    fn run_one(&self, problem: Problem, args: &[String]) -> Result<Result<TraceMetrics, (Status, String)>, EvalError> {
        let wall = Duration::from_secs_f64(self.limits.cpu_seconds * WALL_BACKSTOP_FACTOR);
        let out = self
            .spawner
            .run(args, wall)
            .map_err(|e| EvalError::Infrastructure(format!("spawning runner: {e}")))?;
        if out.killed_by_backstop {
            return Ok(Err((Status::Timeout, format!("killed after {:.1}s wall-clock backstop", wall.as_secs_f64()))));
        }
        match out.code {
            Some(0) => {}
            Some(2) => return Err(EvalError::BadInvocation(out.stderr.trim().to_string())),
            other => {
                return Err(EvalError::Infrastructure(format!(
                    "runner exited with {other:?}: {}",
                    out.stderr.trim()
                )))
            }
        }
        let v = RunVerdict::parse(&out.stdout).map_err(EvalError::Infrastructure)?;
        if v.status != Status::Ok {
            let detail = v.error.clone().filter(|e| !e.is_empty()).unwrap_or_else(|| v.status.to_string());
            return Ok(Err((v.status, detail)));
        }
        v.metrics(problem).map(Ok).map_err(EvalError::Infrastructure)
    }
}

impl<S: Spawner> Evaluator for SandboxEvaluator<S> {
    fn evaluate(&self, problem: Problem, source: &str, suite: &Suite) -> Result<Evaluation, EvalError> {
        check_suite(problem, suite)?;
        let trace_dir = self.work_dir.join("traces").join(&suite.id);
        if !trace_dir.join(crate::trace::suite::MANIFEST).exists() {
            suite
                .write_dir(&trace_dir)
                .map_err(|e| EvalError::Infrastructure(e.to_string()))?;
        }
        std::fs::create_dir_all(&self.work_dir).map_err(Self::io(&self.work_dir))?;
        let digest = crate::ideation::prompt_hash(source);
        let policy = self.work_dir.join(format!("policy-{}.py", &digest[..16]));
        std::fs::write(&policy, source).map_err(Self::io(&policy))?;

        let ids = suite.trace_ids();
        let capacities: Vec<Option<u64>> = match &suite.traces {
            SuiteTraces::Cache(ts) => ts
                .iter()
                .map(|t| capacity_for_trace(t, self.capacity_fraction).ok())
                .collect(),
            SuiteTraces::Bin(ts) => ts.iter().map(|_| None).collect(),
        };
        let outcomes = fan_out(ids.len(), self.jobs, |i| {
            let args = self.runner_args(problem, &policy, &Suite::trace_path(&trace_dir, &ids[i]), capacities[i]);
            self.run_one(problem, &args)
        });
        let results = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(Evaluation::from_results(suite, results))
    }
}
