use std::fs;
use std::path::Path;

use super::{NerError, Tag, TaggedSentence};

/// Parse CoNLL-style text: one token per line, first column the token, last
/// column the tag, blank lines between sentences. Columns are tab-separated
/// when the line has a tab, otherwise whitespace-separated, and every row
/// must have the same column count. `-DOCSTART-` lines are skipped.
pub fn parse_conll_str(text: &str, source_name: &str) -> Result<Vec<TaggedSentence>, NerError> {
    let err = |line: usize, message: String| NerError::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut sentences = Vec::new();
    let mut current = TaggedSentence {
        tokens: Vec::new(),
        tags: Vec::new(),
    };
    let mut columns: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::replace(
                    &mut current,
                    TaggedSentence {
                        tokens: Vec::new(),
                        tags: Vec::new(),
                    },
                ));
            }
            continue;
        }
        if line.starts_with("-DOCSTART-") {
            continue;
        }
        let fields: Vec<&str> = if line.contains('\t') {
            line.split('\t').collect()
        } else {
            line.split_whitespace().collect()
        };
        if fields.len() < 2 {
            return Err(err(line_no, format!("expected token and tag columns, found {line:?}")));
        }
        match columns {
            None => columns = Some(fields.len()),
            Some(n) if n != fields.len() => {
                return Err(err(
                    line_no,
                    format!("row has {} columns, earlier rows have {n}", fields.len()),
                ))
            }
            _ => {}
        }
        let tag_text = fields[fields.len() - 1].trim();
        if tag_text.is_empty() {
            return Err(err(line_no, "empty tag".into()));
        }
        let tag: Tag = tag_text.parse().map_err(|m| err(line_no, m))?;
        current.tokens.push(fields[0].to_string());
        current.tags.push(tag);
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

pub fn parse_conll(path: &Path) -> Result<Vec<TaggedSentence>, NerError> {
    let text = fs::read_to_string(path).map_err(|source| NerError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_conll_str(&text, &path.display().to_string())
}

/// Tag sequences from JSON lines: each line is an array of tags or an
/// object with a `tags` array.
pub fn parse_tag_lines(text: &str, source_name: &str) -> Result<Vec<Vec<Tag>>, NerError> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Line {
        Bare(Vec<Tag>),
        Object { tags: Vec<Tag> },
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, line)| {
            serde_json::from_str::<Line>(line)
                .map(|l| match l {
                    Line::Bare(tags) | Line::Object { tags } => tags,
                })
                .map_err(|e| NerError::Parse {
                    source_name: source_name.to_string(),
                    line: idx + 1,
                    message: format!("expected a tag array: {e}"),
                })
        })
        .collect()
}

/// Pair predicted tag sequences with the gold tokens.
pub fn attach_tags(gold: &[TaggedSentence], tags: Vec<Vec<Tag>>) -> Result<Vec<TaggedSentence>, NerError> {
    if gold.len() != tags.len() {
        return Err(NerError::SentenceCount {
            gold: gold.len(),
            pred: tags.len(),
        });
    }
    gold.iter()
        .zip(tags)
        .enumerate()
        .map(|(i, (g, t))| {
            if g.len() != t.len() {
                return Err(NerError::Misaligned {
                    sentence: i,
                    gold: g.len(),
                    pred: t.len(),
                });
            }
            Ok(TaggedSentence {
                tokens: g.tokens.clone(),
                tags: t,
            })
        })
        .collect()
}

/// Read predictions in either CoNLL or JSON-lines form (chosen by a `.jsonl`
/// or `.json` extension), aligned to `gold` when given as JSON lines.
pub fn read_conll(path: &Path, gold: Option<&[TaggedSentence]>) -> Result<Vec<TaggedSentence>, NerError> {
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("jsonl") || e.eq_ignore_ascii_case("json"));
    if !is_json {
        return parse_conll(path);
    }
    let text = fs::read_to_string(path).map_err(|source| NerError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let tags = parse_tag_lines(&text, &path.display().to_string())?;
    match gold {
        Some(g) => attach_tags(g, tags),
        None => Ok(tags
            .into_iter()
            .map(|t| TaggedSentence {
                tokens: vec![String::new(); t.len()],
                tags: t,
            })
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_token_sentence() {
        let s = parse_conll_str("El\tO\ninsulina\tB-DRUG\n\n", "t").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].tokens, vec!["El", "insulina"]);
        assert_eq!(s[0].tags[1], Tag::Begin("DRUG".into()));
    }

    #[test]
    fn empty_file() {
        assert!(parse_conll_str("", "t").unwrap().is_empty());
        assert!(parse_conll_str("\n\n", "t").unwrap().is_empty());
    }

    #[test]
    fn middle_columns_are_ignored() {
        let s = parse_conll_str("-DOCSTART- -X- O\n\nEl DA O\nDr. NP B-PER\n\nSí RG O", "t").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].tags[1], Tag::Begin("PER".into()));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("El\tO\ninsulina\tX-DRUG\n", 2),
            ("El\tO\ninsulina\n", 2),
            ("El\tDA\tO\ninsulina\tO\n", 2),
            ("El\tO\n\nfoo\t \n", 3),
        ];
        for (text, line) in cases {
            match parse_conll_str(text, "f.conll").unwrap_err() {
                NerError::Parse {
                    line: l, source_name, ..
                } => {
                    assert_eq!(l, line, "{text:?}");
                    assert_eq!(source_name, "f.conll");
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn json_tag_lines() {
        let tags = parse_tag_lines("[\"O\",\"B-DRUG\"]\n{\"tags\":[\"B-DIS\"]}\n", "p").unwrap();
        assert_eq!(tags.len(), 2);
        assert_eq!(tags[1], vec![Tag::Begin("DIS".into())]);
        assert!(parse_tag_lines("[\"Z-1\"]", "p").is_err());
    }

    #[test]
    fn attach_checks_alignment() {
        let gold = parse_conll_str("a\tO\nb\tO\n", "g").unwrap();
        assert!(attach_tags(&gold, vec![vec![Tag::Outside]]).is_err());
        assert!(attach_tags(&gold, vec![]).is_err());
        assert!(attach_tags(&gold, vec![vec![Tag::Outside, Tag::Outside]]).is_ok());
    }
}
