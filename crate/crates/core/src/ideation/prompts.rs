use regex::{Captures, Regex};

use super::{DesignDoc, Problem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("template {template}: no value for placeholder [[{name}]]")]
    Missing { template: String, name: String },
    #[error("template {0}: missing header block")]
    Header(String),
}

/// A prompt body with `[[name]]` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub name: String,
    pub body: String,
}

impl Template {
    /// Parses `---` header lines followed by the body.
    pub fn parse(name: &str, text: &str) -> Result<Self, PromptError> {
        let rest = text
            .strip_prefix("---\n")
            .ok_or_else(|| PromptError::Header(name.to_string()))?;
        let body = match rest.strip_prefix("---\n") {
            Some(body) => body,
            None => rest
                .split_once("\n---\n")
                .ok_or_else(|| PromptError::Header(name.to_string()))?
                .1,
        };
        Ok(Self {
            name: name.to_string(),
            body: body.strip_suffix('\n').unwrap_or(body).to_string(),
        })
    }

    pub fn placeholders(&self) -> Vec<String> {
        placeholder_re()
            .captures_iter(&self.body)
            .map(|c| c[1].to_string())
            .collect()
    }

    /// Substitutes every placeholder in one pass; substituted text is never
    /// rescanned.
    pub fn render(&self, values: &[(&str, &str)]) -> Result<String, PromptError> {
        let mut missing = None;
        let out = placeholder_re().replace_all(&self.body, |c: &Captures| {
            match values.iter().find(|(k, _)| *k == &c[1]) {
                Some((_, v)) => v.to_string(),
                None => {
                    missing.get_or_insert_with(|| c[1].to_string());
                    String::new()
                }
            }
        });
        match missing {
            Some(name) => Err(PromptError::Missing {
                template: self.name.clone(),
                name,
            }),
            None => Ok(out.into_owned()),
        }
    }
}

fn placeholder_re() -> Regex {
    Regex::new(r"\[\[([a-z_]+)\]\]").expect("static regex")
}

/// Observations as `1. ...` lines.
pub fn numbered_hints<S: AsRef<str>>(observations: &[S]) -> String {
    observations
        .iter()
        .enumerate()
        .map(|(i, o)| format!("{}. {}", i + 1, o.as_ref().trim()))
        .collect::<Vec<_>>()
        .join("\n")
}

/// The four templates for one problem.
#[derive(Debug, Clone)]
pub struct PromptSet {
    pub problem: Problem,
    pub waypoint: Template,
    pub ideation: Template,
    pub repeated: Template,
    pub coding: Template,
}

impl PromptSet {
    pub fn builtin(problem: Problem) -> Self {
        let (w, i, r, c) = match problem {
            Problem::Cache => (
                include_str!("../../prompts/cache_waypoint.txt"),
                include_str!("../../prompts/cache_ideation.txt"),
                include_str!("../../prompts/cache_repeated.txt"),
                include_str!("../../prompts/cache_coding.txt"),
            ),
            Problem::Binpack => (
                include_str!("../../prompts/binpack_waypoint.txt"),
                include_str!("../../prompts/binpack_ideation.txt"),
                include_str!("../../prompts/binpack_repeated.txt"),
                include_str!("../../prompts/binpack_coding.txt"),
            ),
        };
        let p = problem.as_str();
        let t = |stage: &str, text| Template::parse(&format!("{p}_{stage}"), text).expect("bundled template");
        Self {
            problem,
            waypoint: t("waypoint", w),
            ideation: t("ideation", i),
            repeated: t("repeated", r),
            coding: t("coding", c),
        }
    }

    pub fn waypoint(&self, word: &str) -> Result<String, PromptError> {
        self.waypoint.render(&[("word", word)])
    }

    pub fn formulate(&self, hints: Option<&str>) -> Result<String, PromptError> {
        match hints {
            Some(h) => self.ideation.render(&[("hints", h)]),
            None => self.repeated.render(&[]),
        }
    }

    pub fn coding(&self, design: &DesignDoc) -> Result<String, PromptError> {
        let concat = design.concat();
        let mut values: Vec<(&str, &str)> = vec![("design", concat.as_str())];
        for f in self.problem.design_fields() {
            values.push((f, design.get(f).unwrap_or("")));
        }
        self.coding.render(&values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use indexmap::IndexMap;

    #[test]
    fn header_is_stripped() {
        let t = Template::parse("x", "---\nstage: test\n---\nHello [[word]].\n").unwrap();
        assert_eq!(t.render(&[("word", "zebra")]).unwrap(), "Hello zebra.");
        assert!(matches!(t.render(&[]), Err(PromptError::Missing { .. })));
        assert!(Template::parse("x", "no header").is_err());
    }

    #[test]
    fn substitution_is_single_pass() {
        let t = Template::parse("x", "---\n---\n[[a]] [[b]]\n").unwrap();
        assert_eq!(t.render(&[("a", "[[b]]"), ("b", "B")]).unwrap(), "[[b]] B");
    }

    #[test]
    fn bundled_placeholders() {
        let c = PromptSet::builtin(Problem::Cache);
        assert_eq!(c.waypoint.placeholders(), ["word"]);
        assert_eq!(c.ideation.placeholders(), ["hints"]);
        assert!(c.repeated.placeholders().is_empty());
        assert_eq!(
            c.coding.placeholders(),
            ["design", "metadata", "evict", "update_after_hit", "update_after_insert", "update_after_evict"]
        );
        let b = PromptSet::builtin(Problem::Binpack);
        assert_eq!(b.coding.placeholders(), ["design", "metadata", "choose_bin"]);
    }

    #[test]
    fn coding_prompt_uses_fields() {
        let p = PromptSet::builtin(Problem::Binpack);
        let mut m = IndexMap::new();
        m.insert("metadata".to_string(), "M".to_string());
        m.insert("choose_bin".to_string(), "C".to_string());
        let text = p.coding(&DesignDoc(m)).unwrap();
        assert!(text.contains("[Begin of bin packing policy]\n\nM\nC\n\n[End"));
        assert!(text.contains("policy below. M\n"));
    }

    #[test]
    fn hints_are_numbered() {
        assert_eq!(numbered_hints(&["a", " b "]), "1. a\n2. b");
    }
}
