use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Word multiset of one document, keyed in lexicographic order.
pub type TokenCounts = BTreeMap<String, u32>;

/// Multiword phrases rewritten to a canonical token before counting,
/// e.g. `my mother` -> `mother`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasMap {
    // (phrase words, canonical), longest phrase first
    entries: Vec<(Vec<String>, String)>,
}

impl AliasMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `phrase -> canonical`. Both sides are normalized with the
    /// same rules as document text; the canonical side must be one token.
    pub fn insert(&mut self, phrase: &str, canonical: &str) -> Result<()> {
        let words: Vec<String> = spans(&normalize(phrase)).into_iter().map(|s| s.text).collect();
        if words.is_empty() {
            return Err(Error::InvalidFocus(format!("alias phrase {phrase:?} has no words")));
        }
        let canon: Vec<String> = spans(&normalize(canonical)).into_iter().map(|s| s.text).collect();
        if canon.len() != 1 {
            return Err(Error::InvalidFocus(format!(
                "alias target {canonical:?} must be a single token"
            )));
        }
        let canonical = canon.into_iter().next().unwrap_or_default();
        self.entries.retain(|(w, _)| *w != words);
        self.entries.push((words, canonical));
        self.entries.sort_by(|(a, _), (b, _)| {
            b.len()
                .cmp(&a.len())
                .then_with(|| b.iter().map(String::len).sum::<usize>().cmp(&a.iter().map(String::len).sum()))
                .then_with(|| a.cmp(b))
        });
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// `(phrase, canonical)` pairs in matching priority order.
    pub fn iter(&self) -> impl Iterator<Item = (String, &str)> {
        self.entries.iter().map(|(w, c)| (w.join(" "), c.as_str()))
    }
}

struct Span {
    start: usize,
    end: usize,
    text: String,
}

fn normalize(text: &str) -> String {
    text.chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect()
}

// Maximal runs of alphabetic characters; an apostrophe is kept only when it
// sits between two letters.
fn spans(text: &str) -> Vec<Span> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].1.is_alphabetic() {
            i += 1;
            continue;
        }
        let start = chars[i].0;
        let mut j = i + 1;
        while j < chars.len() {
            let c = chars[j].1;
            if c.is_alphabetic() {
                j += 1;
            } else if c == '\'' && j + 1 < chars.len() && chars[j + 1].1.is_alphabetic() {
                j += 2;
            } else {
                break;
            }
        }
        let end = chars.get(j).map_or(text.len(), |&(o, _)| o);
        out.push(Span {
            start,
            end,
            text: text[start..end].to_string(),
        });
        i = j;
    }
    out
}

/// Splits `text` into lowercase word tokens and counts them.
///
/// Tokens are maximal alphabetic runs with internal apostrophes; digits,
/// hyphens and other punctuation separate tokens. Alias phrases are matched
/// on the lowercased text (words separated only by whitespace) and replaced
/// by their canonical token before counting. No stemming, lemmatization or
/// stop-word removal is applied.
pub fn tokenize(text: &str, aliases: &AliasMap) -> TokenCounts {
    let text = normalize(text);
    let spans = spans(&text);
    let mut counts = TokenCounts::new();
    let mut i = 0;
    'outer: while i < spans.len() {
        for (phrase, canonical) in &aliases.entries {
            if phrase_matches(&text, &spans[i..], phrase) {
                *counts.entry(canonical.clone()).or_insert(0) += 1;
                i += phrase.len();
                continue 'outer;
            }
        }
        *counts.entry(spans[i].text.clone()).or_insert(0) += 1;
        i += 1;
    }
    counts
}

fn phrase_matches(text: &str, spans: &[Span], phrase: &[String]) -> bool {
    if spans.len() < phrase.len() {
        return false;
    }
    for (k, word) in phrase.iter().enumerate() {
        if spans[k].text != *word {
            return false;
        }
        if k > 0 {
            let gap = &text[spans[k - 1].end..spans[k].start];
            if !gap.chars().all(char::is_whitespace) {
                return false;
            }
        }
    }
    true
}
