use std::collections::HashSet;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::StimuliError;

const WORDS: &str = include_str!("../../data/words.txt");
const STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Ordered, de-duplicated, stop-word-free dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordPool {
    keywords: Vec<String>,
    digest: String,
}

fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
}

impl KeywordPool {
    pub fn from_lists(words: &str, stopwords: &str) -> Result<Self, StimuliError> {
        let stop: HashSet<String> = tokens(stopwords).collect();
        let mut seen = HashSet::new();
        let keywords: Vec<String> = tokens(words)
            .filter(|w| !stop.contains(w) && seen.insert(w.clone()))
            .collect();
        if keywords.is_empty() {
            return Err(StimuliError::EmptyPool);
        }
        let mut h = Sha256::new();
        for k in &keywords {
            h.update(k.as_bytes());
            h.update(b"\n");
        }
        Ok(Self {
            keywords,
            digest: hex::encode(h.finalize()),
        })
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    /// SHA-256 over the filtered keyword list.
    pub fn digest(&self) -> &str {
        &self.digest
    }
}

fn read(path: &Path) -> Result<String, StimuliError> {
    std::fs::read_to_string(path).map_err(|source| StimuliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_pool(words: &Path, stopwords: &Path) -> Result<KeywordPool, StimuliError> {
    KeywordPool::from_lists(&read(words)?, &read(stopwords)?)
}

/// The bundled common-words dictionary minus the bundled stop-words.
pub fn default_pool() -> KeywordPool {
    KeywordPool::from_lists(WORDS, STOPWORDS).expect("bundled pool is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filtering() {
        let p = KeywordPool::from_lists("The\nzebra\nzebra\n", "the\n").unwrap();
        assert_eq!(p.keywords(), ["zebra"]);
        let p = KeywordPool::from_lists("# header\n  Flower \n\nriver\n", "").unwrap();
        assert_eq!(p.keywords(), ["flower", "river"]);
    }

    #[test]
    fn all_stopped_is_error() {
        assert!(matches!(
            KeywordPool::from_lists("the\nand\n", "the\nand\n"),
            Err(StimuliError::EmptyPool)
        ));
    }

    #[test]
    fn digest_tracks_content() {
        let a = KeywordPool::from_lists("a1\nb1\n", "").unwrap();
        let b = KeywordPool::from_lists("b1\na1\n", "").unwrap();
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn bundled_pool() {
        let p = default_pool();
        assert_eq!(p.len(), 2768);
        assert_eq!(&p.keywords()[..3], ["just", "like", "time"]);
    }
}
