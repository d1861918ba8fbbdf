//! Word-probability ensembles.
//!
//! Words are sequences of letter indices followed by a space; the empty
//! sequence is the bare-space word. All probabilities are carried as natural
//! logarithms, so long words never underflow.
//!
//! Ranking uses one total order: larger probability first; on equal
//! probability the shorter word first; on equal length the letter-index
//! sequence compared lexicographically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::budget::MemoryBudget;
use crate::error::{Error, Result};
use crate::keyboard::Keyboard;
use crate::output::Meta;

/// Tolerance used when comparing log-probabilities produced by different
/// enumeration paths.
pub const LOG_EPSILON: f64 = 1e-12;

/// Conservative per-entry cost of a best-first enumeration (output entry plus
/// heap share, including the word allocation).
const TOP_K_BYTES_PER_ENTRY: u64 = 3 * 96;

const CUTOFF_BYTES_PER_ENTRY: u64 = 16;

/// A word: letter indices (0-based internally) terminated by a space.
///
/// Rendered 1-based with hyphens (`1-3-2`); the empty word renders as `_`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// From 0-based letter indices.
    pub fn new(letters: Vec<u32>) -> Self {
        Word(letters)
    }

    /// From 1-based letter indices, as used in rendered output.
    pub fn from_one_based(letters: &[u32]) -> Result<Self> {
        letters
            .iter()
            .map(|&l| l.checked_sub(1).ok_or_else(|| Error::InvalidArgument("letter index 0 in 1-based word".into())))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with_letter(&self, letter: u32) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(letter);
        Word(v)
    }

    /// The tie-break part of the ranking order: shorter first, then lexicographic.
    pub fn tie_break_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{}", l + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "_" {
            return Ok(Word::empty());
        }
        let one_based = s
            .split('-')
            .map(|p| p.parse::<u32>().map_err(|e| Error::InvalidArgument(format!("bad word {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Word::from_one_based(&one_based)
    }
}

/// Ranking order on `(log_prob, word)` pairs; `Less` means "ranks first".
pub fn rank_cmp(a: (f64, &Word), b: (f64, &Word)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.tie_break_cmp(b.1))
}

/// Natural logs of a keyboard's letter and space probabilities.
#[derive(Clone, Debug)]
pub(crate) struct LogKeyboard {
    letters: Vec<f64>,
    space: f64,
}

impl LogKeyboard {
    pub(crate) fn new(kb: &Keyboard) -> Self {
        LogKeyboard { letters: kb.log_letters(), space: kb.space().ln() }
    }

    /// `Σ_j c_j ln q_j + ln s` with letter counts `c_j` summed in index order.
    ///
    /// Summing by counts makes every permutation of a word produce the same
    /// bits, so mathematically tied words are tied exactly.
    pub(crate) fn word_log_prob(&self, word: &[u32]) -> Result<f64> {
        let k = self.letters.len();
        if let Some(&bad) = word.iter().find(|&&l| l as usize >= k) {
            return Err(Error::InvalidArgument(format!("letter index {} out of range 1..={k}", bad + 1)));
        }
        let mut sorted = word.to_vec();
        sorted.sort_unstable();
        let mut acc = 0.0;
        let mut i = 0;
        while i < sorted.len() {
            let letter = sorted[i];
            let run = sorted[i..].iter().take_while(|&&l| l == letter).count();
            acc += run as f64 * self.letters[letter as usize];
            i += run;
        }
        Ok(acc + self.space)
    }
}

/// Natural log of `P(W) = q_{i_1} ... q_{i_n} s`.
pub fn word_log_prob(kb: &Keyboard, word: &Word) -> Result<f64> {
    LogKeyboard::new(kb).word_log_prob(word.letters())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankedEntry {
    pub rank: u64,
    pub word: Word,
    pub log_prob: f64,
}

/// The `k` most probable words of the infinite ensemble, best first.
#[derive(Clone, Debug)]
pub struct RankedEnsemble {
    entries: Vec<RankedEntry>,
    fingerprint: String,
}

impl RankedEnsemble {
    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn log_probs(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.log_prob)
    }

    /// CSV with columns `rank,length,word,log10_prob,log10_rank`.
    pub fn write_csv<W: Write>(&self, mut w: W, meta: &Meta) -> io::Result<()> {
        meta.write_header(&mut w)?;
        writeln!(w, "rank,length,word,log10_prob,log10_rank")?;
        for e in &self.entries {
            writeln!(
                w,
                "{},{},{},{},{}",
                e.rank,
                e.word.len(),
                e.word,
                e.log_prob / std::f64::consts::LN_10,
                (e.rank as f64).log10()
            )?;
        }
        Ok(())
    }
}

struct Frontier {
    log_prob: f64,
    word: Word,
    /// Position of the word's last letter in the descending letter order.
    last: Option<usize>,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Max-heap: the entry that ranks first must compare greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        rank_cmp((other.log_prob, &other.word), (self.log_prob, &self.word))
    }
}

/// The `k` largest word probabilities of the infinite ensemble, in rank order.
pub fn top_k(kb: &Keyboard, k: usize) -> Result<RankedEnsemble> {
    top_k_with_budget(kb, k, &MemoryBudget::from_env()?)
}

/// Best-first search over the lexicographic tree.
///
/// Letters are ordered by decreasing probability (ties by index). A popped
/// word `p·a_j` generates two successors: its first child `p·a_j·a_0` and its
/// next sibling `p·a_{j+1}`. Each successor ranks after its generator (a child
/// is strictly less probable, a sibling no more probable and, on a tie,
/// lexicographically later), and every word has exactly one generator, so
/// popping in heap order emits words in exact rank order while the heap holds
/// at most `k + 1` entries.
pub fn top_k_with_budget(kb: &Keyboard, k: usize, budget: &MemoryBudget) -> Result<RankedEnsemble> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    budget.check(k as u64, TOP_K_BYTES_PER_ENTRY)?;

    let logs = LogKeyboard::new(kb);
    let mut order: Vec<u32> = (0..kb.size() as u32).collect();
    order.sort_by(|&a, &b| logs.letters[b as usize].total_cmp(&logs.letters[a as usize]).then(a.cmp(&b)));

    let mut heap = BinaryHeap::with_capacity(k + 2);
    heap.push(Frontier { log_prob: logs.space, word: Word::empty(), last: None });
    let mut entries = Vec::with_capacity(k);

    while entries.len() < k {
        let Some(node) = heap.pop() else { break };
        let child = node.word.with_letter(order[0]);
        heap.push(Frontier { log_prob: logs.word_log_prob(child.letters())?, word: child, last: Some(0) });
        if let Some(j) = node.last {
            if j + 1 < order.len() {
                let mut sibling = node.word.clone();
                *sibling.0.last_mut().expect("non-root word") = order[j + 1];
                heap.push(Frontier {
                    log_prob: logs.word_log_prob(sibling.letters())?,
                    word: sibling,
                    last: Some(j + 1),
                });
            }
        }
        entries.push(RankedEntry { rank: entries.len() as u64 + 1, word: node.word, log_prob: node.log_prob });
    }
    Ok(RankedEnsemble { entries, fingerprint: kb.fingerprint() })
}

/// All word log-probabilities for word lengths `0..=n`.
///
/// Stored level by level; within level `i` the word at position `p` has the
/// letters given by the base-`K` digits of `p` (most significant first).
#[derive(Clone, Debug)]
pub struct CutoffEnsemble {
    n: usize,
    keyboard: Keyboard,
    log_probs: Vec<f64>,
    offsets: Vec<usize>,
}

impl CutoffEnsemble {
    /// Maximum word length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `N_n = Σ_{i=0}^n K^i`.
    pub fn len(&self) -> usize {
        self.log_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_probs.is_empty()
    }

    pub fn keyboard(&self) -> &Keyboard {
        &self.keyboard
    }

    pub fn fingerprint(&self) -> String {
        self.keyboard.fingerprint()
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    /// Log-probabilities of the words of exactly `len` letters.
    pub fn level(&self, len: usize) -> &[f64] {
        &self.log_probs[self.offsets[len]..self.offsets[len + 1]]
    }

    pub fn word_at(&self, len: usize, index: usize) -> Word {
        let k = self.keyboard.size();
        let mut letters = vec![0u32; len];
        let mut rest = index;
        for slot in letters.iter_mut().rev() {
            *slot = (rest % k) as u32;
            rest /= k;
        }
        Word(letters)
    }

    /// All log-probabilities sorted in descending order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.log_probs.clone();
        v.sort_unstable_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Number of words of length at most `n`, or `None` on overflow.
pub fn cutoff_size(k: usize, n: usize) -> Option<u64> {
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for i in 0..=n {
        total = total.checked_add(level)?;
        if i < n {
            level = level.checked_mul(k as u64)?;
        }
    }
    Some(total)
}

pub fn enumerate_cutoff(kb: &Keyboard, n: usize) -> Result<CutoffEnsemble> {
    enumerate_cutoff_with_budget(kb, n, &MemoryBudget::from_env()?)
}

/// Walks the tree level by level, extending each prefix sum by every letter.
pub fn enumerate_cutoff_with_budget(kb: &Keyboard, n: usize, budget: &MemoryBudget) -> Result<CutoffEnsemble> {
    let size = cutoff_size(kb.size(), n).ok_or(Error::BudgetExceeded { required: u64::MAX, budget: budget.bytes() })?;
    budget.check(size, CUTOFF_BYTES_PER_ENTRY)?;

    let logs = LogKeyboard::new(kb);
    let mut log_probs = Vec::with_capacity(size as usize);
    let mut offsets = vec![0, 1];
    log_probs.push(logs.space);
    for _ in 0..n {
        let (start, end) = (offsets[offsets.len() - 2], offsets[offsets.len() - 1]);
        for p in start..end {
            let prefix = log_probs[p];
            for &l in &logs.letters {
                log_probs.push(prefix + l);
            }
        }
        offsets.push(log_probs.len());
    }
    Ok(CutoffEnsemble { n, keyboard: kb.clone(), log_probs, offsets })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InheritanceCheck {
    /// Length of the longest rank prefix on which both lists agree.
    pub max_equal_rank: u64,
    /// Ranks where the cutoff value exceeds the infinite-ensemble value.
    pub violations: u64,
}

/// Compares the ranked cutoff ensemble with the top of the infinite one,
/// rank by rank over the common length.
pub fn tail_inheritance_check(top: &RankedEnsemble, cut: &CutoffEnsemble) -> Result<InheritanceCheck> {
    let fp = cut.fingerprint();
    if top.fingerprint() != fp {
        return Err(Error::KeyboardMismatch { left: top.fingerprint().to_string(), right: fp });
    }
    let sorted = cut.sorted_desc();
    let mut violations = 0;
    let mut max_equal_rank = 0;
    let mut agreeing = true;
    for (r, (c, t)) in sorted.iter().zip(top.log_probs()).enumerate() {
        if *c > t + LOG_EPSILON {
            violations += 1;
        }
        if agreeing && (c - t).abs() <= LOG_EPSILON {
            max_equal_rank = r as u64 + 1;
        } else {
            agreeing = false;
        }
    }
    Ok(InheritanceCheck { max_equal_rank, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> Keyboard {
        Keyboard::new(vec![0.5, 0.25], 0.25).unwrap()
    }

    #[test]
    fn word_rendering() {
        assert_eq!(Word::empty().to_string(), "_");
        assert_eq!(Word::new(vec![0, 2, 1]).to_string(), "1-3-2");
        assert_eq!("1-3-2".parse::<Word>().unwrap(), Word::new(vec![0, 2, 1]));
        assert_eq!("_".parse::<Word>().unwrap(), Word::empty());
        assert!("0-1".parse::<Word>().is_err());
        assert!("a".parse::<Word>().is_err());
    }

    #[test]
    fn word_probabilities() {
        let kb = fib();
        assert_eq!(word_log_prob(&kb, &Word::empty()).unwrap(), 0.25f64.ln());
        let lp = word_log_prob(&kb, &Word::new(vec![0, 1])).unwrap();
        assert!((lp - (1.0f64 / 32.0).ln()).abs() < 1e-15);
        assert!(word_log_prob(&kb, &Word::new(vec![2])).is_err());
        let a = word_log_prob(&kb, &Word::new(vec![1, 0, 0])).unwrap();
        let b = word_log_prob(&kb, &Word::new(vec![0, 1, 0])).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn appending_lowers_probability() {
        let kb = Keyboard::new(vec![0.4, 0.3, 0.1], 0.2).unwrap();
        let mut w = Word::empty();
        let mut lp = word_log_prob(&kb, &w).unwrap();
        for l in [2, 0, 1, 1, 0] {
            w = w.with_letter(l);
            let next = word_log_prob(&kb, &w).unwrap();
            assert!(next < lp);
            lp = next;
        }
    }

    #[test]
    fn first_rank_is_the_space() {
        let top = top_k(&fib(), 1).unwrap();
        assert_eq!(top.entries(), &[RankedEntry { rank: 1, word: Word::empty(), log_prob: 0.25f64.ln() }]);
        assert!(top_k(&fib(), 0).is_err());
    }

    #[test]
    fn miller_top_k_is_length_ordered() {
        let kb = Keyboard::equal(3, 0.4).unwrap();
        let top = top_k(&kb, 40).unwrap();
        let lens: Vec<usize> = top.entries().iter().map(|e| e.word.len()).collect();
        assert!(lens.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(lens.iter().filter(|&&l| l == 3).count(), 27);
        // within a length block: lexicographic
        assert_eq!(top.entries()[1].word, Word::new(vec![0]));
        assert_eq!(top.entries()[4].word, Word::new(vec![0, 0]));
        assert_eq!(top.entries()[12].word, Word::new(vec![2, 2]));
    }

    #[test]
    fn budget_is_enforced() {
        let kb = fib();
        let tiny = MemoryBudget::new(1000);
        assert!(matches!(top_k_with_budget(&kb, 1000, &tiny), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(enumerate_cutoff_with_budget(&kb, 10, &tiny), Err(Error::BudgetExceeded { .. })));
        let huge = Keyboard::equal(26, 0.18).unwrap();
        assert!(matches!(enumerate_cutoff(&huge, 40), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn cutoff_levels() {
        let kb = Keyboard::new(vec![0.4, 0.3, 0.1], 0.2).unwrap();
        let cut = enumerate_cutoff(&kb, 3).unwrap();
        assert_eq!(cut.len(), 1 + 3 + 9 + 27);
        assert_eq!(cutoff_size(3, 3), Some(40));
        for i in 0..=3 {
            assert_eq!(cut.level(i).len(), 3usize.pow(i as u32));
            let mass: f64 = cut.level(i).iter().map(|l| l.exp()).sum();
            assert!((mass / (0.8f64.powi(i as i32) * 0.2) - 1.0).abs() < 1e-12);
        }
        let w = cut.word_at(3, 5);
        assert_eq!(w, Word::new(vec![0, 1, 2]));
        let direct = word_log_prob(&kb, &w).unwrap();
        assert!((cut.level(3)[5] - direct).abs() < 1e-14);
        let total: f64 = cut.log_probs().iter().map(|l| l.exp()).sum();
        assert!((total - (1.0 - 0.8f64.powi(4))).abs() < 1e-12);
    }

    #[test]
    fn inheritance_on_small_keyboard() {
        let kb = Keyboard::new(vec![0.5, 0.2], 0.3).unwrap();
        let cut = enumerate_cutoff(&kb, 3).unwrap();
        let top = top_k(&kb, cut.len()).unwrap();
        let chk = tail_inheritance_check(&top, &cut).unwrap();
        assert_eq!(chk.violations, 0);
        assert!(chk.max_equal_rank >= 1 && (chk.max_equal_rank as usize) < cut.len());

        let other = enumerate_cutoff(&fib(), 3).unwrap();
        assert!(matches!(tail_inheritance_check(&top, &other), Err(Error::KeyboardMismatch { .. })));
    }

    #[test]
    fn ranked_csv_format() {
        let top = top_k(&fib(), 3).unwrap();
        let mut buf = Vec::new();
        top.write_csv(&mut buf, &Meta::new().with("seed", 1)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# meta:"));
        assert_eq!(lines[1], "rank,length,word,log10_prob,log10_rank");
        assert!(lines[2].starts_with("1,0,_,"));
        assert!(lines[3].starts_with("2,1,1,"));
        assert_eq!(lines.len(), 5);
    }
}
