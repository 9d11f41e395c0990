use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::date::PartialDate;
use super::tokenize::{tokenize, AliasMap, TokenCounts};
use crate::error::{Error, Result};

/// One dated narrative from the archive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    /// Zero-padded sequence number, e.g. `0052`.
    pub seq_id: String,
    /// Alphabetic part of the record id, e.g. `BS`.
    pub prefix: String,
    pub date: PartialDate,
    pub raw_text: String,
    pub tokens: TokenCounts,
}

impl Document {
    pub fn new(seq_id: &str, date: PartialDate, raw_text: &str, aliases: &AliasMap) -> Self {
        Document {
            seq_id: seq_id.to_string(),
            prefix: String::new(),
            date,
            raw_text: raw_text.to_string(),
            tokens: tokenize(raw_text, aliases),
        }
    }

    /// Label used on plots: prefix, sequence number and date.
    pub fn label(&self) -> String {
        format!("{}{} {}", self.prefix, self.seq_id, self.date)
    }

    pub fn token_total(&self) -> u64 {
        self.tokens.values().map(|&c| u64::from(c)).sum()
    }
}

/// Parses the record archive.
///
/// Each record starts with a header line `#<ID> <dd>_<mm>_<yy>`; the body is
/// every following line up to the next header. Unreadable date components
/// become unknown. A header with no body yields a document with empty text.
pub fn parse_archive(text: &str, aliases: &AliasMap) -> Result<Vec<Document>> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut docs: Vec<Document> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut current: Option<(Header, Vec<&str>)> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.starts_with('#') {
            let header = parse_header(line, line_no)?;
            if let Some(&first_line) = seen.get(&header.seq_id) {
                return Err(Error::DuplicateSeqId {
                    seq_id: header.seq_id,
                    first_line,
                    second_line: line_no,
                });
            }
            seen.insert(header.seq_id.clone(), line_no);
            if let Some((h, body)) = current.take() {
                docs.push(finish(h, &body, aliases));
            }
            current = Some((header, Vec::new()));
        } else {
            match current.as_mut() {
                Some((_, body)) => body.push(line),
                None if line.trim().is_empty() => {}
                None => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "text before the first record header".into(),
                    })
                }
            }
        }
    }
    if let Some((h, body)) = current.take() {
        docs.push(finish(h, &body, aliases));
    }
    Ok(docs)
}

/// Pairs of adjacent documents (in sequence order) whose dates provably go
/// backwards; unknown components never count as a violation.
pub fn chronology_violations(docs: &[Document]) -> Vec<(String, String)> {
    let mut sorted: Vec<&Document> = docs.iter().collect();
    sorted.sort_by(|a, b| a.seq_id.cmp(&b.seq_id));
    sorted
        .windows(2)
        .filter(|w| w[1].date.certainly_before(&w[0].date))
        .map(|w| (w[0].seq_id.clone(), w[1].seq_id.clone()))
        .collect()
}

struct Header {
    seq_id: String,
    prefix: String,
    date: PartialDate,
}

fn parse_header(line: &str, line_no: usize) -> Result<Header> {
    let err = |message: String| Error::Parse { line: line_no, message };
    let mut fields = line[1..].split_whitespace();
    let id = fields
        .next()
        .ok_or_else(|| err("header has no record id".into()))?;
    let date = fields
        .next()
        .ok_or_else(|| err(format!("header for {id} has no date field")))?;
    if let Some(extra) = fields.next() {
        return Err(err(format!("unexpected trailing field {extra:?} in header")));
    }
    let split = id.find(|c: char| c.is_ascii_digit()).ok_or_else(|| {
        err(format!("record id {id:?} has no sequence number"))
    })?;
    let (prefix, digits) = id.split_at(split);
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(format!("record id {id:?} has a malformed sequence number")));
    }
    if !date.contains('_') {
        return Err(err(format!("date field {date:?} is not of the form dd_mm_yy")));
    }
    let n: u64 = digits
        .parse()
        .map_err(|_| err(format!("sequence number {digits:?} is out of range")))?;
    Ok(Header {
        seq_id: format!("{n:04}"),
        prefix: prefix.to_string(),
        date: PartialDate::parse_archive(date),
    })
}

fn finish(h: Header, body: &[&str], aliases: &AliasMap) -> Document {
    let raw_text = body.join("\n").trim().to_string();
    let mut doc = Document::new(&h.seq_id, h.date, &raw_text, aliases);
    doc.prefix = h.prefix;
    doc
}
