use indexmap::IndexMap;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::cost::LedgerEntry;
use super::llm::{LlmClient, LlmError};
use super::prompts::{numbered_hints, PromptSet};
use super::{DesignDoc, Problem};

pub(crate) const RETRY_NOTE: &str = "Your previous answer was rejected:";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaypointTranscript {
    pub keyword: String,
    pub response: String,
    pub observation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdeationConfig {
    pub ideation_model: String,
    pub coding_model: String,
    pub temperature: f64,
    pub retries: u32,
    pub no_waypoints: bool,
}

impl Default for IdeationConfig {
    fn default() -> Self {
        Self {
            ideation_model: "gpt-4o".into(),
            coding_model: "gpt-4o".into(),
            temperature: 1.0,
            retries: 3,
            no_waypoints: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StageFailure {
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("parse failed: {0}")]
    ParseFailed(String),
    #[error("bad module: {0}")]
    BadModule(String),
}

/// Everything one ideation produced, ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct IdeationOutcome {
    pub transcripts: Vec<WaypointTranscript>,
    pub design: Option<DesignDoc>,
    pub code: Option<String>,
    /// Set when a stage exhausted its retries.
    pub failure: Option<StageFailure>,
    pub ledger: Vec<LedgerEntry>,
}

/// From the final line starting "Inspired by" to the end; the whole
/// response when there is no such line.
pub fn observation_of(response: &str) -> &str {
    let mut offset = 0;
    let mut found = None;
    for line in response.split_inclusive('\n') {
        if line.trim_start().starts_with("Inspired by") {
            found = Some(offset + (line.len() - line.trim_start().len()));
        }
        offset += line.len();
    }
    response[found.unwrap_or(0)..].trim()
}

fn fence_re() -> Regex {
    Regex::new(r"(?s)```[A-Za-z0-9_+-]*[ \t]*\r?\n(.*?)```").expect("static regex")
}

/// First fenced block, or the whole text, parsed into the problem's fields.
pub fn extract_json(problem: Problem, text: &str) -> Result<DesignDoc, String> {
    let body = fence_re()
        .captures(text)
        .map(|c| c.get(1).unwrap().as_str())
        .unwrap_or(text);
    let value: serde_json::Value =
        serde_json::from_str(body.trim()).map_err(|e| format!("response is not valid JSON ({e})"))?;
    let obj = value.as_object().ok_or("response JSON is not an object")?;
    let mut fields = IndexMap::new();
    for f in problem.design_fields() {
        match obj.get(*f).and_then(|v| v.as_str()) {
            Some(s) if !s.trim().is_empty() => {
                fields.insert(f.to_string(), s.trim().to_string());
            }
            Some(_) => return Err(format!("field \"{f}\" is empty")),
            None => return Err(format!("field \"{f}\" is missing or not a string")),
        }
    }
    Ok(DesignDoc(fields))
}

/// Body of the first fenced block.
pub fn extract_code(text: &str) -> Result<String, String> {
    fence_re()
        .captures(text)
        .map(|c| c[1].to_string())
        .ok_or_else(|| "response has no fenced code block".to_string())
}

/// Rejects missing entry points and any source of randomness.
pub fn static_check(problem: Problem, source: &str) -> Result<(), String> {
    let banned = Regex::new(
        r"(^|[^\w.])(import\s+random\b|from\s+random\s+import|import\s+secrets\b|from\s+secrets\s+import|numpy\.random|np\.random|os\.urandom)",
    )
    .expect("static regex");
    for (i, line) in source.lines().enumerate() {
        let code = line.split('#').next().unwrap_or("");
        if let Some(m) = banned.captures(code) {
            return Err(format!(
                "line {} uses randomness ({}); the policy must be deterministic",
                i + 1,
                m[2].trim()
            ));
        }
    }
    for f in problem.required_functions() {
        let re = Regex::new(&format!(r"(?m)^def\s+{f}\s*\(")).expect("function regex");
        if !re.is_match(source) {
            return Err(format!("function `{f}` is not defined"));
        }
    }
    Ok(())
}

pub struct Pipeline<'a> {
    llm: &'a dyn LlmClient,
    prompts: PromptSet,
    cfg: IdeationConfig,
}

impl<'a> Pipeline<'a> {
    pub fn new(llm: &'a dyn LlmClient, problem: Problem, cfg: IdeationConfig) -> Self {
        Self {
            llm,
            prompts: PromptSet::builtin(problem),
            cfg,
        }
    }

    pub fn problem(&self) -> Problem {
        self.prompts.problem
    }

    pub fn prompts(&self) -> &PromptSet {
        &self.prompts
    }

    /// Up to `1 + retries` calls; each retry carries the previous rejection.
    fn with_retries<T>(
        &self,
        stage: &str,
        model: &str,
        prompt: &str,
        ledger: &mut Vec<LedgerEntry>,
        check: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Result<T, String>, LlmError> {
        let mut reason = String::new();
        for attempt in 0..=self.cfg.retries {
            let text = if attempt == 0 {
                prompt.to_string()
            } else {
                format!("{prompt}\n\n{RETRY_NOTE} {reason}. Answer again following every instruction above.")
            };
            let c = self.llm.complete(model, &text, self.cfg.temperature)?;
            ledger.push(LedgerEntry {
                stage: stage.to_string(),
                model: model.to_string(),
                prompt_tokens: c.prompt_tokens,
                completion_tokens: c.completion_tokens,
            });
            match check(&c.text) {
                Ok(v) => return Ok(Ok(v)),
                Err(r) => reason = r,
            }
        }
        Ok(Err(reason))
    }

    pub fn run_waypoint(
        &self,
        keyword: &str,
        ledger: &mut Vec<LedgerEntry>,
    ) -> Result<WaypointTranscript, StageFailure> {
        if keyword.trim().is_empty() {
            return Err(StageFailure::ParseFailed("empty keyword".into()));
        }
        let prompt = self.prompts.waypoint(keyword).expect("waypoint template");
        let model = self.cfg.ideation_model.clone();
        let got = self.with_retries("waypoint", &model, &prompt, ledger, |text| {
            let obs = observation_of(text);
            if obs.is_empty() {
                Err("the response was empty".to_string())
            } else {
                Ok((text.to_string(), obs.to_string()))
            }
        })?;
        let (response, observation) = got.map_err(StageFailure::ParseFailed)?;
        Ok(WaypointTranscript {
            keyword: keyword.to_string(),
            response,
            observation,
        })
    }

    /// Guided when `observations` is given, otherwise the unguided prompt.
    pub fn formulate(
        &self,
        observations: Option<&[String]>,
        ledger: &mut Vec<LedgerEntry>,
    ) -> Result<DesignDoc, StageFailure> {
        let hints = match observations {
            Some([]) => return Err(StageFailure::ParseFailed("guided formulation needs observations".into())),
            Some(obs) => Some(numbered_hints(obs)),
            None => None,
        };
        let prompt = self.prompts.formulate(hints.as_deref()).expect("ideation template");
        let model = self.cfg.ideation_model.clone();
        let problem = self.problem();
        self.with_retries("formulate", &model, &prompt, ledger, |text| extract_json(problem, text))?
            .map_err(StageFailure::ParseFailed)
    }

    pub fn generate_code(
        &self,
        design: &DesignDoc,
        ledger: &mut Vec<LedgerEntry>,
    ) -> Result<String, StageFailure> {
        let prompt = self.prompts.coding(design).expect("coding template");
        let model = self.cfg.coding_model.clone();
        let problem = self.problem();
        self.with_retries("code", &model, &prompt, ledger, |text| {
            let src = extract_code(text)?;
            static_check(problem, &src)?;
            Ok(src)
        })?
        .map_err(StageFailure::BadModule)
    }

    /// Waypoints per keyword (unless disabled), then formulation, then code.
    /// Only client failures are returned as errors; stage failures are
    /// recorded in the outcome.
    pub fn ideate(&self, stimuli: Option<&[String]>) -> Result<IdeationOutcome, LlmError> {
        let mut out = IdeationOutcome {
            transcripts: Vec::new(),
            design: None,
            code: None,
            failure: None,
            ledger: Vec::new(),
        };
        let observations: Option<Vec<String>> = match stimuli {
            None => None,
            Some(kws) if self.cfg.no_waypoints => Some(kws.to_vec()),
            Some(kws) => {
                for k in kws {
                    match self.run_waypoint(k, &mut out.ledger) {
                        Ok(t) => out.transcripts.push(t),
                        Err(StageFailure::Llm(e)) => return Err(e),
                        Err(f) => {
                            out.failure = Some(f);
                            return Ok(out);
                        }
                    }
                }
                Some(out.transcripts.iter().map(|t| t.observation.clone()).collect())
            }
        };
        let design = match self.formulate(observations.as_deref(), &mut out.ledger) {
            Ok(d) => d,
            Err(StageFailure::Llm(e)) => return Err(e),
            Err(f) => {
                out.failure = Some(f);
                return Ok(out);
            }
        };
        out.design = Some(design.clone());
        match self.generate_code(&design, &mut out.ledger) {
            Ok(src) => out.code = Some(src),
            Err(StageFailure::Llm(e)) => return Err(e),
            Err(f) => out.failure = Some(f),
        }
        Ok(out)
    }
}
