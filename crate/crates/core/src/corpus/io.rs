use std::fmt;
use std::io::{self, BufRead, Write};

use serde::Serialize;

use super::{CorpusStats, DropRecord, RawDocument};

/// An input record that could not be turned into a [`RawDocument`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadIssue {
    pub line: usize,
    pub id: Option<String>,
    pub message: String,
}

impl fmt::Display for ReadIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Documents from JSON lines `{"id","source","text", ...}`; extra keys land
/// in `meta`. Bad lines (invalid UTF-8, bad JSON) come back as issues.
pub fn read_jsonl<R: BufRead>(reader: R) -> impl Iterator<Item = Result<RawDocument, ReadIssue>> {
    reader.split(b'\n').enumerate().filter_map(|(idx, line)| {
        let line_no = idx + 1;
        let issue = |message: String, id: Option<String>| ReadIssue {
            line: line_no,
            id,
            message,
        };
        let bytes = match line {
            Ok(b) => b,
            Err(e) => return Some(Err(issue(e.to_string(), None))),
        };
        let text = match String::from_utf8(bytes) {
            Ok(t) => t,
            Err(_) => return Some(Err(issue("invalid UTF-8".into(), None))),
        };
        let text = text.trim_end_matches('\r');
        if text.trim().is_empty() {
            return None;
        }
        Some(serde_json::from_str::<RawDocument>(text).map_err(|e| {
            let id = serde_json::from_str::<serde_json::Value>(text)
                .ok()
                .and_then(|v| v.get("id")?.as_str().map(String::from));
            issue(e.to_string(), id)
        }))
    })
}

/// Plain text with blank lines between documents. Ids are `{prefix}{n}`
/// counting from 1.
pub fn read_txt<R: BufRead>(
    reader: R,
    source: &str,
    id_prefix: &str,
) -> impl Iterator<Item = Result<RawDocument, ReadIssue>> {
    let source = source.to_string();
    let id_prefix = id_prefix.to_string();
    let mut lines = reader.split(b'\n').enumerate();
    let mut count = 0usize;
    std::iter::from_fn(move || {
        let mut text = String::new();
        let mut first_line = None;
        let mut broken = None;
        for (idx, line) in lines.by_ref() {
            let line = match line
                .map_err(|e| e.to_string())
                .and_then(|b| String::from_utf8(b).map_err(|_| "invalid UTF-8".to_string()))
            {
                Ok(l) => l,
                Err(message) => {
                    broken.get_or_insert((idx + 1, message));
                    first_line.get_or_insert(idx + 1);
                    continue;
                }
            };
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                if first_line.is_some() {
                    break;
                }
                continue;
            }
            first_line.get_or_insert(idx + 1);
            if !text.is_empty() {
                text.push('\n');
            }
            text.push_str(line);
        }
        first_line?;
        count += 1;
        let id = format!("{id_prefix}{count}");
        Some(match broken {
            Some((line, message)) => Err(ReadIssue {
                line,
                id: Some(id),
                message,
            }),
            None => Ok(RawDocument::new(id, source.clone(), text)),
        })
    })
}

/// One JSON object per line, `\n` terminated.
pub fn write_jsonl<W: Write, T: Serialize>(mut writer: W, items: &[T]) -> io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut writer, item)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_drop_log<W: Write>(writer: W, drops: &[DropRecord]) -> io::Result<()> {
    write_jsonl(writer, drops)
}

/// `source,tokens,documents,sentences` rows in source order, then `Total`.
pub fn write_stats_csv<W: Write>(writer: W, stats: &CorpusStats) -> io::Result<()> {
    let mut csv = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    csv.write_record(["source", "tokens", "documents", "sentences"])?;
    let total = stats.total();
    for (source, row) in stats
        .sources
        .iter()
        .chain(std::iter::once((&"Total".to_string(), &total)))
    {
        csv.write_record([
            source.clone(),
            row.tokens.to_string(),
            row.documents.to_string(),
            row.sentences.to_string(),
        ])?;
    }
    csv.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_with_bad_lines() {
        let input: &[u8] =
            b"{\"id\":\"a\",\"source\":\"s\",\"text\":\"Hola.\",\"year\":2020}\n\n{\"id\":\"b\"}\n\xff\xfe\n";
        let items: Vec<_> = read_jsonl(input).collect();
        assert_eq!(items.len(), 3);
        let doc = items[0].as_ref().unwrap();
        assert_eq!(doc.meta["year"], 2020);
        let issue = items[1].as_ref().unwrap_err();
        assert_eq!((issue.line, issue.id.as_deref()), (3, Some("b")));
        assert_eq!(items[2].as_ref().unwrap_err().line, 4);
    }

    #[test]
    fn txt_documents_split_on_blank_lines() {
        let input: &[u8] = b"\nUno.\nDos.\n\n\n  \nTres.\n";
        let docs: Vec<_> = read_txt(input, "books", "b").map(Result::unwrap).collect();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].text, "Uno.\nDos.");
        assert_eq!(docs[1].id, "b2");
        assert_eq!(docs[1].source, "books");
    }

    #[test]
    fn stats_csv_has_total_row() {
        let mut stats = CorpusStats::default();
        stats.record(&super::super::CleanDocument {
            id: "1".into(),
            source: "Medical crawler".into(),
            sentences: vec!["Uno dos.".into(), "Tres.".into()],
        });
        let mut out = Vec::new();
        write_stats_csv(&mut out, &stats).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "source,tokens,documents,sentences\nMedical crawler,3,1,2\nTotal,3,1,2\n"
        );
    }
}
