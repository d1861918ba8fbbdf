mod common;

use common::{brute_force_top, keyboard, mean_var, uniform_keyboard};
use monkeyzipf::ensemble::rank_cmp;
use monkeyzipf::keyboard::{fibonacci_beta, DEFAULT_BETA_TOLERANCE};
use monkeyzipf::stats::{entropy_oracle, euler_gamma, length_law_check};
use monkeyzipf::twitter::{parse_message, Char};
use monkeyzipf::corpus::{tokenize, TokenizerConfig};
use monkeyzipf::*;
use proptest::prelude::*;

const CONTINUOUS: [SpacingDistribution; 3] =
    [SpacingDistribution::Uniform, SpacingDistribution::Beta32, SpacingDistribution::Triangular];

fn any_kind() -> impl Strategy<Value = SpacingDistribution> {
    prop_oneof![
        Just(SpacingDistribution::Uniform),
        Just(SpacingDistribution::Beta32),
        Just(SpacingDistribution::Triangular),
        Just(SpacingDistribution::Equal),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spacings_are_divisions(dist in any_kind(), k in 2usize..300, seed in any::<u64>()) {
        let sp = make_spacings(&dist, k, seed).unwrap();
        prop_assert_eq!(sp.len(), k);
        prop_assert!(sp.values().iter().all(|&d| d > 0.0));
        prop_assert!((sp.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(sp, make_spacings(&dist, k, seed).unwrap());
    }

    #[test]
    fn exponent_residual_within_tolerance(dist in any_kind(), k in 2usize..200, s in 0.01f64..0.9, seed in any::<u64>()) {
        let kb = keyboard(&dist, k, s, seed);
        let r = solve_beta(&kb, DEFAULT_BETA_TOLERANCE).unwrap();
        prop_assert!(r.beta > 1.0);
        prop_assert!(r.residual.abs() <= DEFAULT_BETA_TOLERANCE);
        let direct: f64 = kb.letters().iter().map(|q| q.powf(1.0 / r.beta)).sum::<f64>() - 1.0;
        prop_assert!(direct.abs() < 1e-11);
    }

    #[test]
    fn fibonacci_keyboards_match_closed_form(q1 in 0.05f64..0.6) {
        let kb = Keyboard::new(vec![q1, q1 * q1], 1.0 - q1 - q1 * q1).unwrap();
        let r = solve_beta(&kb, DEFAULT_BETA_TOLERANCE).unwrap();
        prop_assert!((r.beta - fibonacci_beta(q1).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn mean_log_letter_bounds_exponent(dist in any_kind(), k in 2usize..65, s in 0.05f64..0.6, seed in any::<u64>()) {
        let kb = keyboard(&dist, k, s, seed);
        let beta = solve_beta(&kb, DEFAULT_BETA_TOLERANCE).unwrap().beta;
        let m = mean_log_letter(&kb);
        if kb.is_equal() {
            prop_assert!((m + beta).abs() < 1e-10);
        } else {
            prop_assert!(m < -beta);
        }
    }

    #[test]
    fn log_moments_shift_under_scaling(k in 2usize..40, seed in any::<u64>(), c in 0.3f64..1.0) {
        let kb = uniform_keyboard(k, 0.3, seed);
        let scaled: Vec<f64> = kb.letters().iter().map(|q| q * c).collect();
        let s = 1.0 - scaled.iter().sum::<f64>();
        let kb2 = Keyboard::new(scaled, s).unwrap();
        let (a, b) = (log_moments(&kb), log_moments(&kb2));
        prop_assert!((b.mu1 - a.mu1 - c.ln()).abs() < 1e-12);
        prop_assert!((b.sigma1_sq - a.sigma1_sq).abs() < 1e-10);
    }

    #[test]
    fn top_k_is_sorted_and_prefix_stable(k in 2usize..5, seed in any::<u64>(), s in 0.05f64..0.5) {
        let kb = uniform_keyboard(k, s, seed);
        let long = top_k(&kb, 300).unwrap();
        let short = top_k(&kb, 120).unwrap();
        prop_assert_eq!(&long.entries()[..120], short.entries());
        for w in long.entries().windows(2) {
            prop_assert_eq!(rank_cmp((w[0].log_prob, &w[0].word), (w[1].log_prob, &w[1].word)), std::cmp::Ordering::Less);
        }
        prop_assert!(long.entries().iter().enumerate().all(|(i, e)| e.rank == i as u64 + 1));
    }

    #[test]
    fn top_k_matches_brute_force(k in 2usize..4, seed in any::<u64>(), s in 0.1f64..0.5, n in 1usize..400) {
        let kb = uniform_keyboard(k, s, seed);
        let top = top_k(&kb, n).unwrap();
        let oracle = brute_force_top(&kb, n);
        for (e, (w, lp)) in top.entries().iter().zip(&oracle) {
            prop_assert_eq!(&e.word, w);
            prop_assert_eq!(e.log_prob.to_bits(), lp.to_bits());
        }
    }

    #[test]
    fn parse_accounts_for_every_character(chars in prop::collection::vec(prop_oneof![Just(None), (0u32..5).prop_map(Some)], 1..40)) {
        let msg: Vec<Char> = chars.iter().map(|c| c.map_or(Char::Space, Char::Letter)).collect();
        let parsed = parse_message(&msg);
        prop_assert_eq!(parsed.char_count(), msg.len());
        prop_assert_eq!(parsed.words.len(), msg.iter().filter(|c| **c == Char::Space).count());
        prop_assert_eq!(parsed.nonword.is_some(), msg.last() != Some(&Char::Space));
    }

    #[test]
    fn tokenizing_is_deterministic_and_folding_idempotent(text in "\\PC{0,80}") {
        let cfg = TokenizerConfig::default();
        let a: Vec<String> = tokenize(&text, cfg).collect();
        prop_assert_eq!(&a, &tokenize(&text, cfg).collect::<Vec<_>>());
        for t in &a {
            prop_assert_eq!(t.to_lowercase(), t.clone());
            prop_assert!(!t.is_empty());
        }
    }
}

#[test]
fn equal_keyboard_exponent_matches_closed_form() {
    for k in 2..=64 {
        for s in [0.1, 0.18, 0.5] {
            let kb = Keyboard::equal(k, s).unwrap();
            let b = solve_beta(&kb, DEFAULT_BETA_TOLERANCE).unwrap().beta;
            assert!((b - miller_beta(k, s).unwrap()).abs() < 1e-10, "K = {k}, s = {s}");
        }
    }
}

#[test]
fn top_k_matches_brute_force_on_fixed_keyboards() {
    for k in [2, 3] {
        for seed in 0..5 {
            let kb = uniform_keyboard(k, 0.2, seed);
            let top = top_k(&kb, 500).unwrap();
            let oracle = brute_force_top(&kb, 500);
            let got: Vec<(Word, f64)> = top.entries().iter().map(|e| (e.word.clone(), e.log_prob)).collect();
            assert_eq!(got, oracle, "K = {k}, seed = {seed}");
        }
    }
}

#[test]
fn top_k_handles_exact_ties() {
    // q2 = q1^2 ties "1-1" with "2"; permutations tie with each other.
    let kb = Keyboard::new(vec![0.5, 0.25], 0.25).unwrap();
    let top = top_k(&kb, 200).unwrap();
    let oracle = brute_force_top(&kb, 200);
    let got: Vec<Word> = top.entries().iter().map(|e| e.word.clone()).collect();
    let want: Vec<Word> = oracle.into_iter().map(|(w, _)| w).collect();
    assert_eq!(got, want);
    let two = top.entries().iter().position(|e| e.word == Word::new(vec![1])).unwrap();
    let one_one = top.entries().iter().position(|e| e.word == Word::new(vec![0, 0])).unwrap();
    assert!(two < one_one, "shorter word ranks first on a tie");
}

#[test]
fn cutoff_conservation_and_slice_moments() {
    for (k, s, seed) in [(3, 0.3, 1), (5, 0.18, 2), (7, 0.1, 3)] {
        let kb = uniform_keyboard(k, s, seed);
        let cut = enumerate_cutoff(&kb, 5).unwrap();
        let total: f64 = cut.log_probs().iter().map(|l| l.exp()).sum();
        assert!((total - (1.0 - (1.0 - s).powi(6))).abs() < 1e-9);
        for c in length_law_check(&cut) {
            assert_eq!(c.count, c.expected_count);
            assert!((c.mass / c.expected_mass - 1.0).abs() < 1e-9);
        }
        let m = log_moments(&kb);
        for n in 1..=5 {
            let (mean, var) = mean_var(cut.level(n));
            assert!((mean - (n as f64 * m.mu1 + s.ln())).abs() < 1e-9);
            assert!((var - n as f64 * m.sigma1_sq).abs() < 1e-9);
        }
    }
}

#[test]
fn uniform_log_spacings_approach_minus_euler_gamma() {
    let sp = make_spacings(&SpacingDistribution::Uniform, 4096, 1).unwrap();
    let k = sp.len() as f64;
    let mean_scaled: f64 = sp.values().iter().map(|d| k * d).sum::<f64>() / k;
    assert!((mean_scaled - 1.0).abs() < 1e-12);
    assert!((shao_hahn_statistic(&sp) + euler_gamma()).abs() < 0.06);

    let kb = make_keyboard(&sp, 0.18).unwrap();
    let expect = -1.0 - euler_gamma() / k.ln() + 0.82f64.ln() / k.ln();
    assert!((mean_log_letter(&kb) - expect).abs() < 0.06);
}

#[test]
fn mean_log_letter_converges_to_minus_one() {
    let s: f64 = 0.18;
    for dist in CONTINUOUS {
        let entropy = entropy_oracle(&dist).unwrap();
        let gap = |k: usize| mean_log_letter(&keyboard(&dist, k, s, 1)) + 1.0;
        let k_big = 1 << 12;
        let predicted = (entropy - euler_gamma() + (1.0 - s).ln()) / (k_big as f64).ln();
        let at_big = gap(k_big);
        assert!((at_big - predicted).abs() < 0.1, "{}: {at_big} vs {predicted}", dist.name());
        assert!(at_big.abs() < gap(1 << 4).abs(), "{}", dist.name());
        for e in [6, 8, 10] {
            assert!(gap(1 << e) < 0.0);
        }
    }
}

#[test]
fn tail_inheritance_on_figure_three_keyboard() {
    let kb = uniform_keyboard(26, 0.18, 1);
    let cut = enumerate_cutoff(&kb, 4).unwrap();
    let top = top_k(&kb, 100_000).unwrap();
    let chk = ensemble::tail_inheritance_check(&top, &cut).unwrap();
    assert_eq!(chk.violations, 0);
    assert!(chk.max_equal_rank >= 1 && (chk.max_equal_rank as usize) < cut.len());

    // Oracle: compare the two sorted lists directly.
    let sorted = cut.sorted_desc();
    let first_diff = sorted.iter().zip(top.log_probs()).position(|(c, t)| (c - t).abs() > 1e-12);
    assert_eq!(first_diff.map(|i| i as u64), Some(chk.max_equal_rank));
}

#[test]
fn miller_top_k_covers_short_words() {
    let kb = Keyboard::equal(26, 0.18).unwrap();
    let cut = enumerate_cutoff(&kb, 4).unwrap();
    let top = top_k(&kb, cut.len()).unwrap();
    assert!(top.entries().iter().all(|e| e.word.len() <= 4));
    let chk = ensemble::tail_inheritance_check(&top, &cut).unwrap();
    assert_eq!(chk.max_equal_rank, 475_255);
    assert_eq!(chk.violations, 0);
    let mut blocks = top.entries().chunk_by(|a, b| a.word.len() == b.word.len());
    for len in 0..=4 {
        let block = blocks.next().unwrap();
        assert_eq!(block.len(), 26usize.pow(len));
        assert!(block.iter().all(|e| e.log_prob == block[0].log_prob));
    }
}

#[test]
fn twitter_coverage_matches_occupancy_oracle() {
    let kb = uniform_keyboard(26, 0.18, 1);
    let cut = enumerate_cutoff(&kb, 4).unwrap();
    let res = run_experiment(&TwitterConfig::new(kb.clone(), 5, 100_000, 1).unwrap()).unwrap();
    let lnre = twitter::lnre_summary(&res, &cut).unwrap();
    assert_eq!(lnre.observed_types + lnre.zero_class, cut.len() as u64);
    assert!((lnre.observed_types as f64) / (cut.len() as f64) < 0.5);

    // Each word type is missed with probability exp(-N f_w) for N sampled words.
    let n_words = res.total_words as f64;
    let (mut covered, mut total) = (0.0, 0.0);
    for len in 0..=4 {
        for (i, lp) in cut.level(len).iter().enumerate() {
            let f = twitter::expected_relative_frequency(&kb, 5, &cut.word_at(len, i)).unwrap();
            covered += lp.exp() * (1.0 - (-n_words * f).exp());
            total += lp.exp();
        }
    }
    let expected = covered / total;
    assert!((lnre.mass_covered - expected).abs() < 0.01, "{} vs {expected}", lnre.mass_covered);
}

#[test]
fn twitter_exhausts_tiny_population() {
    let kb = uniform_keyboard(2, 0.3, 4);
    let cut = enumerate_cutoff(&kb, 2).unwrap();
    let res = run_experiment(&TwitterConfig::new(kb, 3, 200_000, 4).unwrap()).unwrap();
    let lnre = twitter::lnre_summary(&res, &cut).unwrap();
    assert_eq!(lnre.zero_class, 0);
    assert_eq!(lnre.observed_types, 7);
    assert!((lnre.mass_covered - 1.0).abs() < 1e-12);
}

#[test]
fn twitter_bare_space_rate_is_space_probability() {
    let kb = uniform_keyboard(26, 0.18, 1);
    let res = run_experiment(&TwitterConfig::new(kb, 5, 400_000, 9).unwrap().with_shards(3).unwrap()).unwrap();
    assert!(res.parse_invariant_holds());
    let rate = res.count(&Word::empty()) as f64 / res.word_starts() as f64;
    let sd = (0.18f64 * 0.82 / res.word_starts() as f64).sqrt();
    assert!((rate - 0.18).abs() < 4.0 * sd, "{rate}");
}

/// Set `MONKEYZIPF_CORPUS` to a plain-text book (e.g. a Project Gutenberg
/// download) to run this check; it is skipped otherwise.
#[test]
fn natural_text_slope_is_near_minus_one() {
    let Ok(path) = std::env::var("MONKEYZIPF_CORPUS") else {
        eprintln!("MONKEYZIPF_CORPUS not set; skipping corpus slope check");
        return;
    };
    let bytes = std::fs::read(&path).unwrap();
    let text = corpus::decode(&bytes).unwrap();
    let selection = corpus::TextSelection {
        skip_lines: 0,
        start_marker: Some("*** START OF".into()),
        end_marker: Some("*** END OF".into()),
    };
    let table = corpus::build_corpus_table(tokenize(selection.apply(text), TokenizerConfig::default()), &path).unwrap();
    let fit = stats::fit_tail_slope(&table.table, 10, 1000).unwrap();
    assert!((-1.25..=-0.8).contains(&fit.slope), "slope {}", fit.slope);
}
