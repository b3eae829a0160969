use serde::{Deserialize, Serialize};

use super::lang::detect_language;

/// Why a sentence (or document) was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    TooShort,
    LowAlphaRatio,
    WrongLanguage,
    Malformed,
    /// Removed by deduplication; never produced by [`filter_sentence`].
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageGate {
    /// ISO 639-1 code a sentence must be labeled with.
    pub lang: String,
    pub min_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub min_chars: usize,
    pub min_tokens: usize,
    /// Minimum share of letters among non-whitespace characters.
    pub alpha_ratio: f64,
    pub language: Option<LanguageGate>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_chars: 10,
            min_tokens: 3,
            alpha_ratio: 0.4,
            language: Some(LanguageGate {
                lang: "es".to_string(),
                min_score: 0.5,
            }),
        }
    }
}

impl FilterConfig {
    /// Keeps every well-formed sentence.
    pub fn permissive() -> Self {
        FilterConfig {
            min_chars: 0,
            min_tokens: 0,
            alpha_ratio: 0.0,
            language: None,
        }
    }
}

/// Outcome of [`filter_sentence`]: a drop reason exists iff the sentence is
/// rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FilterVerdict {
    keep: bool,
    reason: Option<DropReason>,
}

impl FilterVerdict {
    pub const KEEP: FilterVerdict = FilterVerdict {
        keep: true,
        reason: None,
    };

    pub fn drop(reason: DropReason) -> Self {
        FilterVerdict {
            keep: false,
            reason: Some(reason),
        }
    }

    pub fn keep(&self) -> bool {
        self.keep
    }

    pub fn reason(&self) -> Option<DropReason> {
        self.reason
    }
}

/// Count of maximal runs of non-whitespace characters.
pub fn whitespace_tokens(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Judge one sentence in isolation. Checks run in a fixed order:
/// malformed, too short, letter ratio, language.
pub fn filter_sentence(sentence: &str, config: &FilterConfig) -> FilterVerdict {
    if sentence
        .chars()
        .any(|c| c == char::REPLACEMENT_CHARACTER || (c.is_control() && !c.is_whitespace()))
    {
        return FilterVerdict::drop(DropReason::Malformed);
    }
    if sentence.chars().count() < config.min_chars || whitespace_tokens(sentence) < config.min_tokens {
        return FilterVerdict::drop(DropReason::TooShort);
    }
    let (letters, visible) = sentence
        .chars()
        .filter(|c| !c.is_whitespace())
        .fold((0usize, 0usize), |(l, v), c| {
            (l + usize::from(c.is_alphabetic()), v + 1)
        });
    let ratio = if visible == 0 {
        0.0
    } else {
        letters as f64 / visible as f64
    };
    if ratio < config.alpha_ratio {
        return FilterVerdict::drop(DropReason::LowAlphaRatio);
    }
    if let Some(gate) = &config.language {
        let guess = detect_language(sentence);
        if guess.label != gate.lang || guess.score < gate.min_score {
            return FilterVerdict::drop(DropReason::WrongLanguage);
        }
    }
    FilterVerdict::KEEP
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_short() {
        let config = FilterConfig::default();
        assert_eq!(filter_sentence("ok", &config).reason(), Some(DropReason::TooShort));
        assert_eq!(
            filter_sentence(
                "Hola mundo querido",
                &FilterConfig {
                    min_tokens: 4,
                    ..config
                }
            )
            .reason(),
            Some(DropReason::TooShort)
        );
    }

    #[test]
    fn symbols_only() {
        let config = FilterConfig {
            alpha_ratio: 0.5,
            ..FilterConfig::default()
        };
        let v = filter_sentence("@@@@ #### $$$$", &config);
        assert!(!v.keep());
        assert_eq!(v.reason(), Some(DropReason::LowAlphaRatio));
    }

    #[test]
    fn clean_spanish_sentence_passes_defaults() {
        let v = filter_sentence("El tratamiento con insulina fue efectivo.", &FilterConfig::default());
        assert_eq!(v, FilterVerdict::KEEP);
        assert_eq!(v.reason(), None);
    }

    #[test]
    fn wrong_language_and_malformed() {
        let config = FilterConfig::default();
        assert_eq!(
            filter_sentence("The patient was treated with insulin.", &config).reason(),
            Some(DropReason::WrongLanguage)
        );
        assert_eq!(
            filter_sentence("El paciente \u{FFFD} fue dado de alta.", &config).reason(),
            Some(DropReason::Malformed)
        );
    }

    #[test]
    fn token_counter_matches_definition() {
        assert_eq!(whitespace_tokens(""), 0);
        assert_eq!(whitespace_tokens("  a\tb\n\nc  "), 3);
        assert_eq!(whitespace_tokens("Hola."), 1);
    }
}
