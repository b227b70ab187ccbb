use serde::{Deserialize, Serialize};

use super::StopWords;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    Ar,
    En,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedTerm {
    pub surface: String,
    pub norm: String,
    pub lang: Lang,
}

const TATWEEL: char = '\u{0640}';
const DEFINITE_ARTICLE: &str = "ال";

fn is_arabic_diacritic(c: char) -> bool {
    matches!(c,
        '\u{0610}'..='\u{061A}'
        | '\u{064B}'..='\u{065F}'
        | '\u{0670}'
        | '\u{06D6}'..='\u{06DC}'
        | '\u{06DF}'..='\u{06E8}'
        | '\u{06EA}'..='\u{06ED}')
}

fn is_combining_latin(c: char) -> bool {
    matches!(c, '\u{0300}'..='\u{036F}')
}

fn is_ignorable(c: char) -> bool {
    c == TATWEEL || is_arabic_diacritic(c) || is_combining_latin(c)
}

fn is_arabic_letter(c: char) -> bool {
    matches!(c, '\u{0600}'..='\u{06FF}' | '\u{0750}'..='\u{077F}' | '\u{FB50}'..='\u{FDFF}' | '\u{FE70}'..='\u{FEFF}')
        && c.is_alphabetic()
}

fn fold_arabic(c: char) -> char {
    match c {
        'أ' | 'إ' | 'آ' | 'ٱ' => 'ا',
        'ى' => 'ي',
        'ة' => 'ه',
        other => other,
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_ignorable(c)
}

/// Normalizes one token, without stop-word filtering.
///
/// Returns `None` when nothing survives. The result is a fixed point:
/// `normalize_token(n) == Some((n, lang))` for every returned `n`.
pub fn normalize_token(token: &str) -> Option<(String, Lang)> {
    let mut norm = String::with_capacity(token.len());
    for c in token.chars().filter(|&c| !is_ignorable(c)) {
        for lower in c.to_lowercase() {
            let folded = fold_arabic(lower);
            if folded.is_alphanumeric() {
                norm.push(folded);
            }
        }
    }
    if norm.is_empty() {
        return None;
    }
    let lang = if norm.chars().any(is_arabic_letter) {
        while let Some(rest) = norm.strip_prefix(DEFINITE_ARTICLE) {
            if rest.chars().count() < 2 {
                break;
            }
            norm = rest.to_string();
        }
        Lang::Ar
    } else if norm.chars().any(char::is_alphabetic) {
        Lang::En
    } else {
        Lang::Unknown
    };
    Some((norm, lang))
}

/// Tokenizer plus per-language stop-word filter.
#[derive(Debug, Clone, Default)]
pub struct Normalizer {
    stop_words: StopWords,
}

impl Normalizer {
    pub fn new(stop_words: StopWords) -> Self {
        Normalizer { stop_words }
    }

    pub fn stop_words(&self) -> &StopWords {
        &self.stop_words
    }

    /// Splits `text` on whitespace and punctuation, normalizes each token
    /// and drops stop words.
    pub fn normalize(&self, text: &str) -> Vec<NormalizedTerm> {
        self.tokens(text)
            .filter(|t| !self.stop_words.contains(t.lang, &t.norm))
            .collect()
    }

    /// Like [`Normalizer::normalize`] but keeps stop words.
    pub fn tokens<'a>(&self, text: &'a str) -> impl Iterator<Item = NormalizedTerm> + 'a {
        text.split(|c: char| !is_word_char(c))
            .filter(|s| !s.is_empty())
            .filter_map(|surface| {
                normalize_token(surface).map(|(norm, lang)| NormalizedTerm {
                    surface: surface.to_string(),
                    norm,
                    lang,
                })
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norms(text: &str) -> Vec<String> {
        Normalizer::default()
            .normalize(text)
            .into_iter()
            .map(|t| t.norm)
            .collect()
    }

    #[test]
    fn tawaf_with_diacritics_and_article() {
        let terms = Normalizer::default().normalize("الطَّوَاف");
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].norm, "طواف");
        assert_eq!(terms[0].lang, Lang::Ar);
        assert_eq!(terms[0].surface, "الطَّوَاف");
    }

    #[test]
    fn empty_input() {
        assert!(Normalizer::default().normalize("").is_empty());
        assert!(Normalizer::default().normalize("  ,.; ").is_empty());
    }

    #[test]
    fn english_stop_words_and_case() {
        assert_eq!(norms("the pillars of Hajj"), vec!["pillars", "hajj"]);
    }

    #[test]
    fn arabic_letter_folding() {
        assert_eq!(normalize_token("أإآ").unwrap().0, "ااا");
        assert_eq!(normalize_token("مستشفى").unwrap().0, "مستشفي");
        assert_eq!(normalize_token("عمرة").unwrap().0, "عمره");
        assert_eq!(normalize_token("طـــواف").unwrap().0, "طواف");
    }

    #[test]
    fn article_kept_on_short_words() {
        // stripping would leave a single letter
        assert_eq!(normalize_token("الف").unwrap().0, "الف");
        assert_eq!(normalize_token("الحج").unwrap().0, "حج");
    }

    #[test]
    fn mixed_punctuation_split() {
        assert_eq!(norms("tawaf/arafat,(jamarat)"), vec!["tawaf", "arafat", "jamarat"]);
        assert_eq!(norms("شعيرة الحج"), vec!["شعيره", "حج"]);
    }

    #[test]
    fn digits_are_unknown_language() {
        let t = Normalizer::default().normalize("2024");
        assert_eq!(t[0].lang, Lang::Unknown);
    }

    fn text_strategy() -> impl Strategy<Value = String> {
        let alphabet: Vec<char> = "abcXYZ éالطوافعرفةجمراتأإآىةـَُِّْ٠١ 0123,.;!?-"
            .chars()
            .chain(['e', '\u{0301}'])
            .collect();
        proptest::collection::vec(proptest::sample::select(alphabet), 0..40)
            .prop_map(|cs| cs.into_iter().collect())
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(text in text_strategy()) {
            let n = Normalizer::default();
            for term in n.normalize(&text) {
                let again = n.tokens(&term.norm).collect::<Vec<_>>();
                prop_assert_eq!(again.len(), 1);
                prop_assert_eq!(&again[0].norm, &term.norm);
                prop_assert_eq!(again[0].lang, term.lang);
            }
        }

        #[test]
        fn stop_words_never_survive(text in text_strategy(), extra in proptest::sample::select(vec!["the", "of", "في", "من", "على", "The", "OF"])) {
            let n = Normalizer::default();
            let text = format!("{text} {extra} {text}");
            for term in n.normalize(&text) {
                prop_assert!(!n.stop_words().contains(term.lang, &term.norm));
            }
        }
    }
}
