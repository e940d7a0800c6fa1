use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::eval::{BuiltinEvaluator, BuiltinPolicy, EvalError, Evaluation, Evaluator, TraceMetrics};
use super::store::{SolutionRecord, SolutionStore, Status};
use crate::binpack::{usage_reduction_vs, BinHeuristic};
use crate::cache::{miss_reduction_vs, BaselineName, PolicyParams};
use crate::feedback::{cluster, select_top, AnalyticsError, CentroidSet, ClusterReport, FeedbackEmbedding};
use crate::ideation::Problem;
use crate::trace::Suite;

pub const DIVERSITY_FILE: &str = "diversity.json";
pub const CLUSTERS_FILE: &str = "clusters.json";
pub const COSTS_FILE: &str = "costs.json";
pub const TOP_FILE: &str = "top.json";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("store is empty")]
    EmptyStore,
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("baseline {name} failed on {suite}: {message}")]
    Baseline { name: String, suite: String, message: String },
    #[error("bad cost {value:?} on {id}")]
    Cost { id: String, value: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Every native baseline of `problem`, in declared order.
pub fn baseline_policies(problem: Problem) -> Vec<(String, BuiltinPolicy)> {
    match problem {
        Problem::Cache => BaselineName::ALL
            .iter()
            .map(|&n| (n.to_string(), BuiltinPolicy::Cache(n, PolicyParams::default())))
            .collect(),
        Problem::Binpack => BinHeuristic::ALL
            .iter()
            .map(|&h| (h.to_string(), BuiltinPolicy::Bin(h, PolicyParams::default())))
            .collect(),
    }
}

/// The baseline reductions are measured against.
pub fn reference_baseline(problem: Problem) -> (String, BuiltinPolicy) {
    match problem {
        Problem::Cache => ("fifo".into(), BuiltinPolicy::Cache(BaselineName::Fifo, PolicyParams::default())),
        Problem::Binpack => (
            "first_fit".into(),
            BuiltinPolicy::Bin(BinHeuristic::FirstFit, PolicyParams::default()),
        ),
    }
}

/// Runs every baseline natively and returns their evaluations in order.
pub fn run_baselines(
    problem: Problem,
    suite: &Suite,
    capacity_fraction: f64,
    jobs: usize,
) -> Result<Vec<(String, Evaluation)>, ReportError> {
    let ev = BuiltinEvaluator { capacity_fraction, jobs };
    baseline_policies(problem)
        .into_iter()
        .map(|(name, p)| {
            let e = ev.evaluate_policy(&p, suite);
            if e.status != Status::Ok {
                return Err(ReportError::Baseline {
                    name,
                    suite: suite.id.clone(),
                    message: e.error.unwrap_or_default(),
                });
            }
            Ok((name, e))
        })
        .collect()
}

pub fn centroids_of(suite_id: &str, baselines: &[(String, Evaluation)]) -> CentroidSet {
    let mut set = CentroidSet::new(suite_id);
    for (name, e) in baselines {
        set.push(name.clone(), e.embedding.clone().expect("ok evaluation has an embedding"));
    }
    set
}

/// Average loss of an embedding: mean miss ratio for caches, mean
/// `1 - lower_bound/bins_used` for packing. Lower is better.
pub fn loss(e: &FeedbackEmbedding) -> f64 {
    1.0 - e.mean()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub iteration: u64,
    pub ok: usize,
    pub distinct: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub records: usize,
    pub ok: usize,
    pub distinct: usize,
    /// Cumulative distinct ok embeddings after each record.
    pub series: Vec<SeriesPoint>,
}

pub fn diversity(store: &SolutionStore) -> DiversityReport {
    let mut seen = HashSet::new();
    let mut ok = 0;
    let mut series = Vec::with_capacity(store.len());
    for r in store.records() {
        if let (Status::Ok, Some(e)) = (r.status, &r.embedding) {
            ok += 1;
            seen.insert(e.values.clone());
        }
        series.push(SeriesPoint {
            iteration: r.iteration,
            ok,
            distinct: seen.len(),
        });
    }
    DiversityReport {
        records: store.len(),
        ok,
        distinct: seen.len(),
        series,
    }
}

fn ok_embeddings(store: &SolutionStore) -> Vec<(String, FeedbackEmbedding)> {
    store
        .ok_records()
        .filter_map(|r| r.embedding.clone().map(|e| (r.id.clone(), e)))
        .collect()
}

pub fn clusters(store: &SolutionStore, centroids: &CentroidSet) -> Result<Vec<ClusterReport>, ReportError> {
    Ok(cluster(&ok_embeddings(store), centroids)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionCost {
    pub id: String,
    pub status: Status,
    pub calls: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub usd: Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub per_solution: Vec<SolutionCost>,
    pub total_usd: Decimal,
    /// Total spend divided by the number of ok solutions.
    pub usd_per_ok_solution: Option<Decimal>,
}

pub fn costs(store: &SolutionStore) -> Result<CostReport, ReportError> {
    let mut per_solution = Vec::with_capacity(store.len());
    let mut total = Decimal::ZERO;
    for r in store.records() {
        let usd: Decimal = r.cost.usd.parse().map_err(|_| ReportError::Cost {
            id: r.id.clone(),
            value: r.cost.usd.clone(),
        })?;
        total += usd;
        per_solution.push(SolutionCost {
            id: r.id.clone(),
            status: r.status,
            calls: r.cost.calls,
            prompt_tokens: r.cost.prompt_tokens,
            completion_tokens: r.cost.completion_tokens,
            usd,
        });
    }
    let ok = store.ok_records().count();
    Ok(CostReport {
        per_solution,
        total_usd: total.normalize(),
        usd_per_ok_solution: (ok > 0).then(|| (total / Decimal::from(ok)).round_dp(10).normalize()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopEntry {
    pub rank: usize,
    pub id: String,
    /// Loss on the feedback suite, the ranking key.
    pub feedback_loss: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_loss: Option<f64>,
    /// Mean of per-trace reductions against the reference baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_trace_reduction: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopReport {
    pub eval_suite: String,
    pub baseline: String,
    pub baseline_loss: f64,
    pub entries: Vec<TopEntry>,
}

fn per_trace_reductions(base: &[TraceMetrics], cand: &[TraceMetrics]) -> Vec<f64> {
    base.iter()
        .zip(cand)
        .filter_map(|(b, c)| match (b, c) {
            (TraceMetrics::Cache(b), TraceMetrics::Cache(c)) => miss_reduction_vs(b, c).ok(),
            (TraceMetrics::Pack(b), TraceMetrics::Pack(c)) => Some(usage_reduction_vs(b, c)),
            _ => None,
        })
        .collect()
}

/// Ranks ok records by feedback-suite loss and re-evaluates the best `k`
/// on `eval_suite`, reporting reductions against FIFO or First Fit.
pub fn top(
    store: &SolutionStore,
    k: usize,
    problem: Problem,
    eval_suite: &Suite,
    evaluator: &dyn Evaluator,
    capacity_fraction: f64,
    jobs: usize,
) -> Result<TopReport, ReportError> {
    let scored: Vec<(String, Option<f64>)> = store
        .ok_records()
        .map(|r| (r.id.clone(), r.embedding.as_ref().map(loss)))
        .collect();
    let ranked = select_top(&scored, k)?;

    let (base_name, base_policy) = reference_baseline(problem);
    let base = BuiltinEvaluator { capacity_fraction, jobs }.evaluate_policy(&base_policy, eval_suite);
    let base_emb = base.embedding.as_ref().ok_or_else(|| ReportError::Baseline {
        name: base_name.clone(),
        suite: eval_suite.id.clone(),
        message: base.error.clone().unwrap_or_default(),
    })?;

    let mut entries = Vec::with_capacity(ranked.len());
    for (i, (id, feedback_loss)) in ranked.into_iter().enumerate() {
        let rec: &SolutionRecord = store.get(&id).expect("ranked from the store");
        let mut entry = TopEntry {
            rank: i + 1,
            id,
            feedback_loss,
            eval_loss: None,
            reduction: None,
            per_trace_reduction: Vec::new(),
            error: None,
        };
        let code = rec.code.as_deref().unwrap_or_default();
        let ev = evaluator.evaluate(problem, code, eval_suite)?;
        match &ev.embedding {
            Some(e) => {
                let red = per_trace_reductions(&base.per_trace, &ev.per_trace);
                entry.eval_loss = Some(loss(e));
                entry.reduction = (!red.is_empty()).then(|| red.iter().sum::<f64>() / red.len() as f64);
                entry.per_trace_reduction = red;
            }
            None => entry.error = Some(ev.error.unwrap_or_else(|| ev.status.to_string())),
        }
        entries.push(entry);
    }
    Ok(TopReport {
        eval_suite: eval_suite.id.clone(),
        baseline: base_name,
        baseline_loss: loss(base_emb),
        entries,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ReportError> {
    let text = serde_json::to_string_pretty(value).expect("serializable report") + "\n";
    std::fs::write(path, text).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub struct Analysis {
    pub diversity: DiversityReport,
    pub clusters: Option<Vec<ClusterReport>>,
    pub costs: CostReport,
}

impl Analysis {
    pub fn summary(&self) -> String {
        let d = &self.diversity;
        let mut s = format!(
            "records: {}\nok: {}\ndistinct feedback embeddings: {}\ntotal cost: {} usd\n",
            d.records, d.ok, d.distinct, self.costs.total_usd
        );
        if let Some(per) = self.costs.usd_per_ok_solution {
            let _ = writeln!(s, "cost per ok solution: {per} usd");
        }
        if let Some(cs) = &self.clusters {
            s.push_str("clusters:\n");
            for c in cs {
                let density = match (c.density, c.degenerate) {
                    (Some(d), _) => format!("{d:.3}"),
                    (None, true) => "degenerate".into(),
                    (None, false) => "-".into(),
                };
                let _ = writeln!(s, "  {:<20} count {:>4}  density {density}", c.centroid, c.count);
            }
        }
        s
    }
}

/// Writes diversity, costs, optional clusters and a text summary to `out_dir`.
pub fn analyze(store: &SolutionStore, centroids: Option<&CentroidSet>, out_dir: &Path) -> Result<Analysis, ReportError> {
    if store.is_empty() {
        return Err(ReportError::EmptyStore);
    }
    let a = Analysis {
        diversity: diversity(store),
        clusters: centroids.map(|c| clusters(store, c)).transpose()?,
        costs: costs(store)?,
    };
    std::fs::create_dir_all(out_dir).map_err(|source| ReportError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    write_json(&out_dir.join(DIVERSITY_FILE), &a.diversity)?;
    if let Some(c) = &a.clusters {
        write_json(&out_dir.join(CLUSTERS_FILE), c)?;
    }
    write_json(&out_dir.join(COSTS_FILE), &a.costs)?;
    let path = out_dir.join(SUMMARY_FILE);
    std::fs::write(&path, a.summary()).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::Fraction;
    use crate::orchestrator::store::{solution_id, Cost, Models, Selection};
    use crate::ideation::Strategy;
    use crate::trace::{SuiteTraces, Trace};

    fn rec(i: u64, emb: Option<Vec<(u64, u64)>>, usd: &str) -> SolutionRecord {
        SolutionRecord {
            id: solution_id(i),
            iteration: i,
            strategy: Strategy::Repeated,
            selection: Selection::Unguided,
            stimuli: None,
            steering: None,
            transcripts: Vec::new(),
            design: None,
            code: Some("# forge-builtin: lru".into()),
            status: if emb.is_some() { Status::Ok } else { Status::RuntimeError },
            embedding: emb.map(|v| FeedbackEmbedding::new("s", v.into_iter().map(|(n, d)| Fraction::new(n, d)).collect())),
            cost: Cost { calls: 2, prompt_tokens: 1000, completion_tokens: 500, usd: usd.into() },
            models: Models { client: "mock".into(), ideation: "gpt-4o".into(), coding: "gpt-4o".into() },
            created_at: "1970-01-01T00:00:01Z".into(),
            error: None,
        }
    }

    fn store(recs: Vec<SolutionRecord>) -> (tempfile::TempDir, SolutionStore) {
        let dir = tempfile::tempdir().unwrap();
        let mut s = SolutionStore::open(&dir.path().join("solutions.jsonl")).unwrap();
        for r in recs {
            s.append(r).unwrap();
        }
        (dir, s)
    }

    #[test]
    fn diversity_counts_ok_only() {
        let (_d, s) = store(vec![
            rec(1, Some(vec![(1, 2)]), "0.0075"),
            rec(2, Some(vec![(1, 2)]), "0.0075"),
            rec(3, None, "0.0075"),
            rec(4, Some(vec![(1, 3)]), "0.0075"),
        ]);
        let d = diversity(&s);
        assert_eq!((d.records, d.ok, d.distinct), (4, 3, 2));
        let distinct: Vec<usize> = d.series.iter().map(|p| p.distinct).collect();
        assert_eq!(distinct, vec![1, 1, 1, 2]);
        let c = costs(&s).unwrap();
        assert_eq!(c.total_usd.to_string(), "0.03");
        assert_eq!(c.usd_per_ok_solution.unwrap().to_string(), "0.01");
    }

    #[test]
    fn analyze_writes_files() {
        let (d, s) = store(vec![rec(1, Some(vec![(1, 2)]), "0.0075")]);
        let mut cs = CentroidSet::new("s");
        cs.push("a", FeedbackEmbedding::new("s", vec![Fraction::new(1, 2)]));
        let out = d.path().join("report");
        let a = analyze(&s, Some(&cs), &out).unwrap();
        assert!(a.clusters.unwrap()[0].degenerate);
        for f in [DIVERSITY_FILE, CLUSTERS_FILE, COSTS_FILE, SUMMARY_FILE] {
            assert!(out.join(f).exists(), "{f}");
        }
        let mut other = CentroidSet::new("t");
        other.push("a", FeedbackEmbedding::new("t", vec![Fraction::new(1, 2)]));
        assert!(matches!(analyze(&s, Some(&other), &out), Err(ReportError::Analytics(_))));
    }

    #[test]
    fn top_against_fifo() {
        let keys: Vec<String> = "a b c a b d a e a b c d a b a c"
            .split(' ')
            .map(String::from)
            .collect();
        let suite = Suite {
            id: "s".into(),
            traces: SuiteTraces::Cache(vec![Trace::from_keys("t1", &keys)]),
        };
        let ev = BuiltinEvaluator { capacity_fraction: 0.5, jobs: 1 };
        let mut lru = rec(1, Some(vec![(1, 2)]), "0");
        lru.code = Some("# forge-builtin: lru".into());
        let mut fifo = rec(2, Some(vec![(1, 4)]), "0");
        fifo.code = Some("# forge-builtin: fifo".into());
        let (_d, s) = store(vec![lru, fifo]);
        let t = top(&s, 5, Problem::Cache, &suite, &ev, 0.5, 1).unwrap();
        assert_eq!(t.entries[0].id, "sol-0001");
        assert_eq!(t.entries[1].reduction, Some(0.0));
        assert_eq!(t.baseline, "fifo");
    }
}
