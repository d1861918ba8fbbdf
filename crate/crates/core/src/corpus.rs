//! Empirical rank-frequency tables from plain text.
//!
//! The default tokenizer is intentionally simple: a token is a maximal run of
//! alphabetic characters, optionally joined by single apostrophes that sit
//! between two letters (`don't`, `o'clock`). Everything else separates
//! tokens. Case folding uses Unicode lowercase mapping.

use std::collections::HashMap;
use std::io::{self, Write};
use std::iter::Peekable;
use std::str::CharIndices;

use crate::error::{Error, Result};
use crate::output::Meta;
use crate::stats::{RankFrequencyTable, SourceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub fold_case: bool,
    /// Keep apostrophes that join two letters.
    pub internal_apostrophes: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig { fold_case: true, internal_apostrophes: true }
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Decodes UTF-8, reporting the byte offset of the first invalid sequence.
pub fn decode(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| Error::Decode { offset: e.valid_up_to() })
}

/// Portion of a text to analyse.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TextSelection {
    /// Lines dropped from the start.
    pub skip_lines: usize,
    /// Keep only text after the first line containing this marker.
    pub start_marker: Option<String>,
    /// Drop text from the first line (after the start) containing this marker.
    pub end_marker: Option<String>,
}

impl TextSelection {
    pub fn apply<'a>(&self, text: &'a str) -> &'a str {
        let mut offset = 0;
        for _ in 0..self.skip_lines {
            match text[offset..].find('\n') {
                Some(i) => offset += i + 1,
                None => return "",
            }
        }
        let mut rest = &text[offset..];
        if let Some(m) = &self.start_marker {
            rest = match rest.find(m.as_str()) {
                Some(i) => {
                    let after = &rest[i..];
                    after.find('\n').map_or("", |j| &after[j + 1..])
                }
                None => "",
            };
        }
        if let Some(m) = &self.end_marker {
            if let Some(i) = rest.find(m.as_str()) {
                let line_start = rest[..i].rfind('\n').map_or(0, |j| j + 1);
                rest = &rest[..line_start];
            }
        }
        rest
    }
}

/// Iterator over the tokens of a text.
pub struct Tokens<'a> {
    text: &'a str,
    chars: Peekable<CharIndices<'a>>,
    config: TokenizerConfig,
}

pub fn tokenize(text: &str, config: TokenizerConfig) -> Tokens<'_> {
    Tokens { text, chars: text.char_indices().peekable(), config }
}

impl Iterator for Tokens<'_> {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        let start = loop {
            let (i, c) = self.chars.next()?;
            if c.is_alphabetic() {
                break i;
            }
        };
        let mut end = self.text.len();
        while let Some(&(i, c)) = self.chars.peek() {
            if c.is_alphabetic() {
                self.chars.next();
            } else if self.config.internal_apostrophes && is_apostrophe(c) {
                let after = self.text[i + c.len_utf8()..].chars().next();
                if after.is_some_and(char::is_alphabetic) {
                    self.chars.next();
                } else {
                    end = i;
                    break;
                }
            } else {
                end = i;
                break;
            }
        }
        let token = &self.text[start..end];
        Some(if self.config.fold_case { token.to_lowercase() } else { token.to_string() })
    }
}

/// Token counts ranked by frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusTable {
    pub table: RankFrequencyTable,
    /// `(token, count)` in rank order.
    pub types: Vec<(String, u64)>,
    pub token_count: u64,
    pub type_count: u64,
    pub source_name: String,
}

impl CorpusTable {
    pub fn relative_frequency(&self, rank: usize) -> Option<f64> {
        self.table.value(rank).map(|c| c / self.token_count as f64)
    }

    /// CSV with columns `rank,token,count`.
    pub fn write_types_csv<W: Write>(&self, mut w: W, meta: &Meta) -> io::Result<()> {
        meta.clone().with("source_name", &self.source_name).write_header(&mut w)?;
        writeln!(w, "rank,token,count")?;
        for (i, (t, c)) in self.types.iter().enumerate() {
            writeln!(w, "{},{},{}", i + 1, t, c)?;
        }
        Ok(())
    }
}

/// Counts tokens and ranks them by count (ties: token order).
pub fn build_corpus_table<I: IntoIterator<Item = String>>(tokens: I, source_name: &str) -> Result<CorpusTable> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut token_count = 0;
    for t in tokens {
        *counts.entry(t).or_insert(0) += 1;
        token_count += 1;
    }
    let mut types: Vec<(String, u64)> = counts.into_iter().collect();
    types.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let table = RankFrequencyTable::new(types.iter().map(|(_, c)| *c as f64).collect(), SourceKind::Corpus)?;
    Ok(CorpusTable { table, type_count: types.len() as u64, types, token_count, source_name: source_name.to_string() })
}
