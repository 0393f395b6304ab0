mod oracles;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segsel_core::bleu::{corpus_bleu, sentence_bleu_smoothed, sentence_stats};

fn sentence(rng: &mut ChaCha8Rng, vocab: &[&str], max_len: usize) -> Vec<String> {
    let n = rng.gen_range(1..=max_len);
    (0..n)
        .map(|_| {
            let w = vocab[rng.gen_range(0..vocab.len())];
            if rng.gen_bool(0.2) { w.to_uppercase() } else { w.to_string() }
        })
        .collect()
}

#[test]
fn clipped_counts_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let vocab = ["the", "a", "cat", "dog", "sat"];
    for _ in 0..300 {
        let hyp = sentence(&mut rng, &vocab, 20);
        let refs: Vec<Vec<String>> = (0..rng.gen_range(1..=4)).map(|_| sentence(&mut rng, &vocab, 20)).collect();
        let s = sentence_stats(&hyp, &refs);
        let (m, t, c, r) = oracles::brute_stats(&hyp, &refs);
        assert_eq!((s.matches, s.totals, s.hyp_len, s.ref_len), (m, t, c, r));
        let smoothed = sentence_bleu_smoothed(&hyp, &refs);
        assert!((smoothed - oracles::brute_sentence_bleu(&hyp, &refs)).abs() < 1e-12);
    }
}

#[test]
fn corpus_bleu_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let vocab = ["x", "y", "z", "w"];
    for _ in 0..100 {
        let n = rng.gen_range(1..6);
        let hyps: Vec<Vec<String>> = (0..n).map(|_| sentence(&mut rng, &vocab, 12)).collect();
        let refs: Vec<Vec<Vec<String>>> = (0..n)
            .map(|_| (0..rng.gen_range(1..=4)).map(|_| sentence(&mut rng, &vocab, 12)).collect())
            .collect();
        let got = corpus_bleu(&hyps, &refs).unwrap().corpus_bleu;
        let want = oracles::brute_corpus_bleu(&hyps, &refs);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!((0.0..=1.0).contains(&got));
    }
}

#[test]
fn geometric_mean_lies_between_precisions() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let vocab = ["a", "b", "c"];
    for _ in 0..200 {
        let hyps = vec![sentence(&mut rng, &vocab, 15)];
        let refs = vec![vec![sentence(&mut rng, &vocab, 15)]];
        let r = corpus_bleu(&hyps, &refs).unwrap();
        if r.brevity_penalty == 1.0 && r.corpus_bleu > 0.0 {
            let used: Vec<f64> = r.n_gram_precisions.iter().copied().filter(|&p| p > 0.0).collect();
            let lo = used.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = used.iter().copied().fold(0.0, f64::max);
            assert!(r.corpus_bleu >= lo - 1e-12 && r.corpus_bleu <= hi + 1e-12);
        }
    }
}
