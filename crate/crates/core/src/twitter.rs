//! Monkey Twitter: sampling fixed-length messages and counting words.
//!
//! Every message has exactly `message_length = n + 1` characters drawn
//! i.i.d. (letter `i` with probability `q_i`, space with probability `s`).
//! The message is split after each space; each piece ending in a space is a
//! word of `0..=n` letters. A trailing run of letters with no space is the
//! message's non-word and is discarded.
//!
//! A word of `L` letters can start at position 0 or after any space, and
//! must end before the message does, so its expected count per message is
//! `P(w) (1 + s (n - L))` rather than a multiple of `P(w)`. Sample relative
//! frequencies converge to [`expected_relative_frequency`], not to the
//! population probabilities themselves.

use std::collections::HashMap;
use std::io::{self, Write};
use std::thread;

use rand::distributions::{Distribution, WeightedIndex};
use rand_chacha::ChaCha8Rng;

use crate::budget::MemoryBudget;
use crate::ensemble::{cutoff_size, word_log_prob, CutoffEnsemble, LogKeyboard, Word};
use crate::error::{Error, Result};
use crate::keyboard::Keyboard;
use crate::numeric::compensated_sum;
use crate::output::Meta;
use crate::rng::{substream, TWITTER_STREAM_BASE};
use crate::stats::{RankFrequencyTable, SourceKind};

/// Estimated bytes per distinct word in the count map.
const COUNT_BYTES_PER_TYPE: u64 = 96;

#[derive(Clone, Debug, PartialEq)]
pub struct TwitterConfig {
    pub keyboard: Keyboard,
    /// Characters per message, `n + 1`.
    pub message_length: usize,
    pub num_messages: u64,
    pub seed: u64,
    /// Independent substreams the messages are split across.
    pub shards: usize,
}

impl TwitterConfig {
    pub fn new(keyboard: Keyboard, message_length: usize, num_messages: u64, seed: u64) -> Result<Self> {
        let cfg = TwitterConfig { keyboard, message_length, num_messages, seed, shards: 1 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_shards(mut self, shards: usize) -> Result<Self> {
        self.shards = shards;
        self.validate()?;
        Ok(self)
    }

    /// Longest countable word, `n`.
    pub fn max_word_len(&self) -> usize {
        self.message_length - 1
    }

    fn validate(&self) -> Result<()> {
        if self.message_length < 1 {
            return Err(Error::InvalidArgument("message length must be at least 1".into()));
        }
        if self.num_messages < 1 {
            return Err(Error::InvalidArgument("need at least one message".into()));
        }
        if self.shards < 1 {
            return Err(Error::InvalidArgument("need at least one shard".into()));
        }
        Ok(())
    }
}

/// One typed character.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Char {
    /// 0-based letter index.
    Letter(u32),
    Space,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedMessage {
    pub words: Vec<Word>,
    /// Trailing letters with no terminating space.
    pub nonword: Option<Vec<u32>>,
}

impl ParsedMessage {
    /// Characters accounted for: each word's letters plus its space, plus the non-word.
    pub fn char_count(&self) -> usize {
        self.words.iter().map(|w| w.len() + 1).sum::<usize>() + self.nonword.as_ref().map_or(0, Vec::len)
    }
}

pub fn parse_message(chars: &[Char]) -> ParsedMessage {
    let mut words = Vec::new();
    let mut current = Vec::new();
    for c in chars {
        match *c {
            Char::Letter(l) => current.push(l),
            Char::Space => words.push(Word::new(std::mem::take(&mut current))),
        }
    }
    ParsedMessage { words, nonword: (!current.is_empty()).then_some(current) }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleResult {
    counts: HashMap<Word, u64>,
    pub total_words: u64,
    pub discarded_nonwords: u64,
    pub distinct_words: u64,
    pub messages: u64,
    pub message_length: usize,
    /// Total letters in discarded non-words.
    pub nonword_chars: u64,
    fingerprint: String,
}

impl SampleResult {
    pub fn counts(&self) -> &HashMap<Word, u64> {
        &self.counts
    }

    pub fn count(&self, word: &Word) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Positions where a word or the non-word begins.
    pub fn word_starts(&self) -> u64 {
        self.total_words + self.discarded_nonwords
    }

    /// Every typed character belongs to exactly one word or non-word.
    pub fn parse_invariant_holds(&self) -> bool {
        let in_words: u64 = self.counts.iter().map(|(w, c)| c * (w.len() as u64 + 1)).sum();
        let counted: u64 = self.counts.values().sum();
        counted == self.total_words
            && in_words + self.nonword_chars == self.messages * self.message_length as u64
            && self.discarded_nonwords <= self.messages
    }

    /// Observed relative frequency `count / total_words`.
    pub fn relative_frequency(&self, word: &Word) -> f64 {
        self.count(word) as f64 / self.total_words as f64
    }
}

trait WordCounter: Send {
    fn push_letter(&mut self, letter: u32);
    /// Counts the pending letters as a word.
    fn finish_word(&mut self);
    /// Clears a pending non-word, returning its length.
    fn drop_pending(&mut self) -> usize;
    fn into_counts(self) -> HashMap<Word, u64>;
}

/// Words packed as base-`(K + 1)` integers with digits `letter + 1`.
struct PackedCounter {
    radix: u128,
    key: u128,
    len: usize,
    map: HashMap<u128, u64>,
}

impl WordCounter for PackedCounter {
    fn push_letter(&mut self, letter: u32) {
        self.key = self.key * self.radix + letter as u128 + 1;
        self.len += 1;
    }

    fn finish_word(&mut self) {
        *self.map.entry(self.key).or_insert(0) += 1;
        self.key = 0;
        self.len = 0;
    }

    fn drop_pending(&mut self) -> usize {
        let len = self.len;
        self.key = 0;
        self.len = 0;
        len
    }

    fn into_counts(self) -> HashMap<Word, u64> {
        let radix = self.radix;
        self.map
            .into_iter()
            .map(|(mut key, c)| {
                let mut letters = Vec::new();
                while key > 0 {
                    letters.push((key % radix) as u32 - 1);
                    key /= radix;
                }
                letters.reverse();
                (Word::new(letters), c)
            })
            .collect()
    }
}

struct PlainCounter {
    buf: Vec<u32>,
    map: HashMap<Word, u64>,
}

impl WordCounter for PlainCounter {
    fn push_letter(&mut self, letter: u32) {
        self.buf.push(letter);
    }

    fn finish_word(&mut self) {
        *self.map.entry(Word::new(self.buf.clone())).or_insert(0) += 1;
        self.buf.clear();
    }

    fn drop_pending(&mut self) -> usize {
        let len = self.buf.len();
        self.buf.clear();
        len
    }

    fn into_counts(self) -> HashMap<Word, u64> {
        self.map
    }
}

struct ShardTally {
    counts: HashMap<Word, u64>,
    total_words: u64,
    discarded: u64,
    nonword_chars: u64,
}

fn run_shard<C: WordCounter>(
    mut counter: C,
    chars: &WeightedIndex<f64>,
    space: usize,
    message_length: usize,
    messages: u64,
    mut rng: ChaCha8Rng,
) -> ShardTally {
    let (mut total_words, mut discarded, mut nonword_chars) = (0, 0, 0);
    for _ in 0..messages {
        for _ in 0..message_length {
            let c = chars.sample(&mut rng);
            if c == space {
                counter.finish_word();
                total_words += 1;
            } else {
                counter.push_letter(c as u32);
            }
        }
        let pending = counter.drop_pending();
        if pending > 0 {
            discarded += 1;
            nonword_chars += pending as u64;
        }
    }
    ShardTally { counts: counter.into_counts(), total_words, discarded, nonword_chars }
}

pub fn run_experiment(cfg: &TwitterConfig) -> Result<SampleResult> {
    run_experiment_with_budget(cfg, &MemoryBudget::from_env()?)
}

/// Runs the experiment; shard `i` uses stream `2^32 + i` of `cfg.seed` and
/// the first `num_messages % shards` shards take one extra message.
pub fn run_experiment_with_budget(cfg: &TwitterConfig, budget: &MemoryBudget) -> Result<SampleResult> {
    cfg.validate()?;
    let kb = &cfg.keyboard;
    let k = kb.size();
    let n = cfg.max_word_len();
    // Distinct words cannot exceed min(N_n, number of words typed).
    let typed = cfg.num_messages.saturating_mul(cfg.message_length as u64);
    let types = cutoff_size(k, n).map_or(typed, |nn| nn.min(typed));
    budget.check(types * cfg.shards as u64, COUNT_BYTES_PER_TYPE)?;

    let mut weights = kb.letters().to_vec();
    weights.push(kb.space());
    let chars = WeightedIndex::new(&weights).map_err(|e| Error::InvalidKeyboard(e.to_string()))?;
    let packable = (n as f64) * ((k + 1) as f64).log2() < 127.0;

    let shards = cfg.shards as u64;
    let tallies: Vec<ShardTally> = thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|i| {
                let messages = cfg.num_messages / shards + u64::from(i < cfg.num_messages % shards);
                let rng = substream(cfg.seed, TWITTER_STREAM_BASE + i);
                let chars = &chars;
                let len = cfg.message_length;
                scope.spawn(move || {
                    if packable {
                        let c = PackedCounter { radix: k as u128 + 1, key: 0, len: 0, map: HashMap::new() };
                        run_shard(c, chars, k, len, messages, rng)
                    } else {
                        let c = PlainCounter { buf: Vec::new(), map: HashMap::new() };
                        run_shard(c, chars, k, len, messages, rng)
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard panicked")).collect()
    });

    let mut counts: HashMap<Word, u64> = HashMap::new();
    let (mut total_words, mut discarded, mut nonword_chars) = (0, 0, 0);
    for t in tallies {
        total_words += t.total_words;
        discarded += t.discarded;
        nonword_chars += t.nonword_chars;
        for (w, c) in t.counts {
            *counts.entry(w).or_insert(0) += c;
        }
    }
    Ok(SampleResult {
        distinct_words: counts.len() as u64,
        counts,
        total_words,
        discarded_nonwords: discarded,
        messages: cfg.num_messages,
        message_length: cfg.message_length,
        nonword_chars,
        fingerprint: kb.fingerprint(),
    })
}

/// Limit of `count(w) / total_words` as the number of messages grows:
/// `P(w) (1 + s (n - L)) / ((n + 1) s)` for a word of `L <= n` letters.
pub fn expected_relative_frequency(kb: &Keyboard, message_length: usize, word: &Word) -> Result<f64> {
    let n = message_length as f64 - 1.0;
    if word.len() + 1 > message_length {
        return Ok(0.0);
    }
    let s = kb.space();
    let p = word_log_prob(kb, word)?.exp();
    Ok(p * (1.0 + s * (n - word.len() as f64)) / ((n + 1.0) * s))
}

/// Large-number-of-rare-events summary of a sample against its population.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnreSummary {
    pub observed_types: u64,
    /// Population words never observed, `N_n - observed_types`.
    pub zero_class: u64,
    /// Population probability of the observed types over the total cutoff mass.
    pub mass_covered: f64,
}

pub fn lnre_summary(res: &SampleResult, cut: &CutoffEnsemble) -> Result<LnreSummary> {
    if res.fingerprint() != cut.fingerprint() {
        return Err(Error::KeyboardMismatch { left: res.fingerprint().to_string(), right: cut.fingerprint() });
    }
    if res.message_length != cut.n() + 1 {
        return Err(Error::InvalidArgument(format!(
            "sample has messages of {} characters, population cutoff is {} letters",
            res.message_length,
            cut.n()
        )));
    }
    let logs = LogKeyboard::new(cut.keyboard());
    let observed = compensated_sum(
        res.counts.keys().map(|w| logs.word_log_prob(w.letters()).map(f64::exp)).collect::<Result<Vec<_>>>()?,
    );
    let total = compensated_sum(cut.log_probs().iter().map(|l| l.exp()));
    let observed_types = res.distinct_words;
    Ok(LnreSummary { observed_types, zero_class: cut.len() as u64 - observed_types, mass_covered: observed / total })
}

/// Observed words, most frequent first (ties: shorter, then lexicographic).
pub fn ranked_words(res: &SampleResult) -> Vec<(Word, u64)> {
    let mut v: Vec<(Word, u64)> = res.counts.iter().map(|(w, &c)| (w.clone(), c)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.tie_break_cmp(&b.0)));
    v
}

pub fn sample_rank_table(res: &SampleResult) -> Result<RankFrequencyTable> {
    if res.counts.is_empty() {
        return Err(Error::InvalidArgument("sample contains no words".into()));
    }
    RankFrequencyTable::new(ranked_words(res).into_iter().map(|(_, c)| c as f64).collect(), SourceKind::Sample)
}

/// CSV with columns `rank,word,count`.
pub fn write_ranked_words<W: Write>(res: &SampleResult, mut w: W, meta: &Meta) -> io::Result<()> {
    meta.write_header(&mut w)?;
    writeln!(w, "rank,word,count")?;
    for (i, (word, c)) in ranked_words(res).iter().enumerate() {
        writeln!(w, "{},{},{}", i + 1, word, c)?;
    }
    Ok(())
}

/// Summary block as a flat JSON object.
pub fn write_summary<W: Write>(res: &SampleResult, lnre: Option<&LnreSummary>, mut w: W) -> io::Result<()> {
    let mut fields = vec![
        ("messages", res.messages.to_string()),
        ("message_length", res.message_length.to_string()),
        ("total_words", res.total_words.to_string()),
        ("discarded_nonwords", res.discarded_nonwords.to_string()),
        ("distinct_words", res.distinct_words.to_string()),
    ];
    if let Some(l) = lnre {
        fields.push(("zero_class", l.zero_class.to_string()));
        fields.push(("mass_covered", l.mass_covered.to_string()));
    }
    writeln!(w, "{{")?;
    for (i, (k, v)) in fields.iter().enumerate() {
        let sep = if i + 1 < fields.len() { "," } else { "" };
        writeln!(w, "  \"{k}\": {v}{sep}")?;
    }
    writeln!(w, "}}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::enumerate_cutoff;

    use Char::{Letter as L, Space as S};

    #[test]
    fn parse_letter_space_letters() {
        let m = parse_message(&[L(0), S, L(1), L(1)]);
        assert_eq!(m.words, vec![Word::new(vec![0])]);
        assert_eq!(m.nonword, Some(vec![1, 1]));
        assert_eq!(m.char_count(), 4);
    }

    #[test]
    fn parse_all_spaces() {
        let m = parse_message(&[S, S, S, S]);
        assert_eq!(m.words, vec![Word::empty(); 4]);
        assert_eq!(m.nonword, None);
    }

    #[test]
    fn single_space_message() {
        let kb = Keyboard::new(vec![0.5, 0.3], 0.2).unwrap();
        let cfg = TwitterConfig::new(kb, 1, 50, 3).unwrap();
        let res = run_experiment(&cfg).unwrap();
        assert!(res.parse_invariant_holds());
        if res.total_words > 0 {
            let t = sample_rank_table(&res).unwrap();
            assert_eq!(t.len(), 1);
            assert_eq!(t.value(1), Some(res.total_words as f64));
        }
    }

    #[test]
    fn config_validation() {
        let kb = Keyboard::new(vec![0.5, 0.3], 0.2).unwrap();
        assert!(TwitterConfig::new(kb.clone(), 0, 1, 0).is_err());
        assert!(TwitterConfig::new(kb.clone(), 3, 0, 0).is_err());
        assert!(TwitterConfig::new(kb, 3, 1, 0).unwrap().with_shards(0).is_err());
    }

    #[test]
    fn deterministic_per_seed_and_shards() {
        let kb = Keyboard::new(vec![0.4, 0.3, 0.1], 0.2).unwrap();
        let cfg = TwitterConfig::new(kb, 5, 2000, 11).unwrap().with_shards(3).unwrap();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ranked_words(&a), ranked_words(&b));
        assert!(a.parse_invariant_holds());
        assert_eq!(a.messages, 2000);
    }

    #[test]
    fn packed_and_plain_counters_agree() {
        let chars = WeightedIndex::new([0.4, 0.3, 0.1, 0.2]).unwrap();
        let packed = PackedCounter { radix: 4, key: 0, len: 0, map: HashMap::new() };
        let plain = PlainCounter { buf: Vec::new(), map: HashMap::new() };
        let a = run_shard(packed, &chars, 3, 6, 500, substream(1, 9));
        let b = run_shard(plain, &chars, 3, 6, 500, substream(1, 9));
        assert_eq!(a.counts, b.counts);
        assert_eq!((a.total_words, a.discarded, a.nonword_chars), (b.total_words, b.discarded, b.nonword_chars));
    }

    #[test]
    fn long_messages_use_plain_keys() {
        let kb = Keyboard::new(vec![0.45, 0.45], 0.1).unwrap();
        let cfg = TwitterConfig::new(kb, 141, 200, 2).unwrap();
        let res = run_experiment(&cfg).unwrap();
        assert!(res.parse_invariant_holds());
        assert!(res.counts().keys().all(|w| w.len() <= 140));
    }

    #[test]
    fn tiny_population_is_exhausted() {
        let kb = Keyboard::new(vec![0.3, 0.3], 0.4).unwrap();
        let cfg = TwitterConfig::new(kb.clone(), 3, 20_000, 5).unwrap();
        let res = run_experiment(&cfg).unwrap();
        let cut = enumerate_cutoff(&kb, 2).unwrap();
        let l = lnre_summary(&res, &cut).unwrap();
        assert_eq!(l.zero_class, 0);
        assert_eq!(l.observed_types + l.zero_class, 7);
        assert!((l.mass_covered - 1.0).abs() < 1e-12);
        assert!(res.count(&Word::empty()) > 0);
    }

    #[test]
    fn lnre_rejects_mismatches() {
        let kb = Keyboard::new(vec![0.3, 0.3], 0.4).unwrap();
        let res = run_experiment(&TwitterConfig::new(kb.clone(), 3, 100, 5).unwrap()).unwrap();
        assert!(lnre_summary(&res, &enumerate_cutoff(&kb, 3).unwrap()).is_err());
        let other = Keyboard::new(vec![0.2, 0.4], 0.4).unwrap();
        assert!(lnre_summary(&res, &enumerate_cutoff(&other, 2).unwrap()).is_err());
    }

    #[test]
    fn expected_frequencies_sum_to_one() {
        // Σ_w P(w)(1 + s(n - L)) = Σ_L (1-s)^L s (1 + s(n - L)) = (n + 1) s
        let kb = Keyboard::new(vec![0.5, 0.2, 0.1], 0.2).unwrap();
        let cut = enumerate_cutoff(&kb, 4).unwrap();
        let mut total = 0.0;
        for len in 0..=4 {
            for i in 0..cut.level(len).len() {
                total += expected_relative_frequency(&kb, 5, &cut.word_at(len, i)).unwrap();
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(expected_relative_frequency(&kb, 3, &Word::new(vec![0, 0, 0])).unwrap(), 0.0);
    }

    #[test]
    fn summary_block() {
        let kb = Keyboard::new(vec![0.3, 0.3], 0.4).unwrap();
        let res = run_experiment(&TwitterConfig::new(kb.clone(), 3, 100, 5).unwrap()).unwrap();
        let l = lnre_summary(&res, &enumerate_cutoff(&kb, 2).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_summary(&res, Some(&l), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(&format!("\"total_words\": {},", res.total_words)));
        assert!(text.contains("\"mass_covered\": "));
        assert!(text.trim_end().ends_with('}'));
    }
}
