use serde::{Deserialize, Serialize};

use super::{NerError, SchemeMode, Tag, TaggedSentence};

/// A typed entity over tokens `start..end`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub entity_type: String,
    /// Tokens joined by single spaces.
    pub surface: String,
}

/// Maximal `B-X (I-X)*` runs of `sent`. `sentence` only labels errors.
pub fn extract_entities(sent: &TaggedSentence, mode: SchemeMode, sentence: usize) -> Result<Vec<EntitySpan>, NerError> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, &str)> = None;
    let close = |open: Option<(usize, &str)>, end: usize, spans: &mut Vec<EntitySpan>| {
        if let Some((start, ty)) = open {
            spans.push(EntitySpan {
                start,
                end,
                entity_type: ty.to_string(),
                surface: sent.tokens[start..end].join(" "),
            });
        }
    };
    for (i, tag) in sent.tags.iter().enumerate() {
        match tag {
            Tag::Outside => close(open.take(), i, &mut spans),
            Tag::Begin(ty) => {
                close(open.take(), i, &mut spans);
                open = Some((i, ty));
            }
            Tag::Inside(ty) => {
                if open.is_some_and(|(_, t)| t == ty) {
                    continue;
                }
                if mode == SchemeMode::Strict {
                    return Err(NerError::IllegalTransition {
                        sentence,
                        token: i,
                        tag: tag.to_string(),
                    });
                }
                close(open.take(), i, &mut spans);
                open = Some((i, ty));
            }
        }
    }
    close(open, sent.tags.len(), &mut spans);
    Ok(spans)
}
