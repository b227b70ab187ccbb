use std::collections::{BTreeMap, BTreeSet};

use super::normalize::{normalize_token, Lang};

const DEFAULT_EN: &str = include_str!("stop_en.txt");
const DEFAULT_AR: &str = include_str!("stop_ar.txt");

/// Per-language stop-word sets, stored in normalized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords {
    sets: BTreeMap<Lang, BTreeSet<String>>,
}

/// Reads a term list: one term per line, `#` starts a comment.
pub fn parse_term_list(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

impl StopWords {
    pub fn empty() -> Self {
        StopWords {
            sets: BTreeMap::new(),
        }
    }

    /// Adds every term of a stop-word file; each term goes to the set of
    /// its detected language.
    pub fn extend_from_list(&mut self, text: &str) {
        for term in parse_term_list(text) {
            self.insert(&term);
        }
    }

    pub fn from_list(text: &str) -> Self {
        let mut words = StopWords::empty();
        words.extend_from_list(text);
        words
    }

    pub fn insert(&mut self, term: &str) {
        for token in term.split_whitespace() {
            if let Some((norm, lang)) = normalize_token(token) {
                self.sets.entry(lang).or_default().insert(norm);
            }
        }
    }

    pub fn contains(&self, lang: Lang, norm: &str) -> bool {
        self.sets.get(&lang).is_some_and(|s| s.contains(norm))
    }

    /// True if `norm` is a stop word in any language.
    pub fn contains_any(&self, norm: &str) -> bool {
        self.sets.values().any(|s| s.contains(norm))
    }

    pub fn len(&self) -> usize {
        self.sets.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for StopWords {
    fn default() -> Self {
        let mut words = StopWords::from_list(DEFAULT_EN);
        words.extend_from_list(DEFAULT_AR);
        words
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_cover_both_languages() {
        let w = StopWords::default();
        assert!(w.contains(Lang::En, "the"));
        assert!(w.contains(Lang::En, "of"));
        assert!(w.contains(Lang::Ar, "في"));
        // stored normalized: على -> علي
        assert!(w.contains(Lang::Ar, "علي"));
        assert!(!w.contains(Lang::Ar, "طواف"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let w = StopWords::from_list("# header\n\nfoo # trailing\nBAR\n");
        assert_eq!(w.len(), 2);
        assert!(w.contains(Lang::En, "bar"));
    }
}
