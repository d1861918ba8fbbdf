#![allow(dead_code)]

use monkeyzipf::ensemble::rank_cmp;
use monkeyzipf::{make_keyboard, make_spacings, word_log_prob, Keyboard, SpacingDistribution, Word};

/// Every word of length `<= depth`, ranked by brute-force sort.
pub fn ranked_words_to_depth(kb: &Keyboard, depth: usize) -> Vec<(Word, f64)> {
    let k = kb.size() as u32;
    let mut all = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..depth {
        let next: Vec<Word> = frontier.iter().flat_map(|w| (0..k).map(move |l| w.with_letter(l))).collect();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    let mut scored: Vec<(Word, f64)> = all.into_iter().map(|w| {
        let lp = word_log_prob(kb, &w).unwrap();
        (w, lp)
    }).collect();
    scored.sort_by(|a, b| rank_cmp((a.1, &a.0), (b.1, &b.0)));
    scored
}

/// The `k` best words by exhaustive enumeration.
///
/// Collects every word whose probability is at least a threshold (a word's
/// prefixes are all more probable, so a pruned depth-first walk finds all of
/// them), lowering the threshold until at least `k` words qualify. Words below
/// the threshold are strictly less probable than everything collected.
pub fn brute_force_top(kb: &Keyboard, k: usize) -> Vec<(Word, f64)> {
    let logs: Vec<f64> = kb.letters().iter().map(|q| q.ln()).collect();
    let ln_s = kb.space().ln();
    let mut threshold = ln_s - 2.0;
    loop {
        let mut found = Vec::new();
        let mut stack = vec![(Word::empty(), 0.0f64)];
        while let Some((w, prefix)) = stack.pop() {
            if prefix + ln_s < threshold - 1e-9 {
                continue;
            }
            let lp = word_log_prob(kb, &w).unwrap();
            if lp >= threshold {
                found.push((w.clone(), lp));
            }
            for (l, ln_q) in logs.iter().enumerate() {
                stack.push((w.with_letter(l as u32), prefix + ln_q));
            }
        }
        if found.len() >= k {
            found.sort_by(|a, b| rank_cmp((a.1, &a.0), (b.1, &b.0)));
            found.truncate(k);
            return found;
        }
        threshold -= 1.0;
    }
}

pub fn uniform_keyboard(k: usize, s: f64, seed: u64) -> Keyboard {
    make_keyboard(&make_spacings(&SpacingDistribution::Uniform, k, seed).unwrap(), s).unwrap()
}

pub fn keyboard(dist: &SpacingDistribution, k: usize, s: f64, seed: u64) -> Keyboard {
    make_keyboard(&make_spacings(dist, k, seed).unwrap(), s).unwrap()
}

pub fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}
