//! The lattice aligner's cost must equal the minimum, over every enumerated
//! lattice path, of a brute-force textbook edit distance computed by an
//! independent oracle.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weralign_core::{align, build_lattice, levenshtein_align};
use weralign_testkit::{corrupt, lev_cost, random_case, random_tokens, CaseOptions};

#[test]
fn align_cost_equals_brute_force_minimum_over_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x04ac1e);
    let opts = CaseOptions::default();
    let mut checked = 0;
    while checked < 300 {
        let case = random_case(&mut rng, &opts);
        let doc = common::doc_from_case(&case);
        let rules = common::ruleset_from(&case.rules);
        let lat = build_lattice(&doc, &rules).unwrap();
        let paths = match lat.enumerate_paths(20_000) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let hyp_tokens = if rng.random_bool(0.5) {
            random_tokens(&mut rng, 0, 12)
        } else {
            { let edits = rng.random_range(0..4); corrupt(&mut rng, &case.tokens, edits) }
        };
        let hyp = common::seq_of(&hyp_tokens);

        let got = align(&lat, &hyp);
        let want = paths
            .iter()
            .map(|path| lev_cost(path, &hyp_tokens))
            .min()
            .expect("at least the verbatim path exists");
        assert_eq!(
            got.cost as usize, want,
            "case {case:?} hyp {hyp_tokens:?} dump:\n{}",
            lat.dump()
        );

        // replayed ops must account for the whole hypothesis and the cost
        let (correct, subs, dels, inss) = got.op_counts();
        assert_eq!(got.cost, subs + dels + inss);
        assert_eq!(got.best_path_ref_len, correct + subs + dels);
        assert_eq!(
            (correct + subs + inss) as usize,
            hyp_tokens.len(),
            "every hypothesis token consumed exactly once"
        );
        checked += 1;
    }
}

#[test]
fn levenshtein_align_agrees_with_independent_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..500 {
        let a = random_tokens(&mut rng, 0, 12);
        let b = random_tokens(&mut rng, 0, 12);
        let alignment = levenshtein_align(&common::seq_of(&a), &common::seq_of(&b));
        assert_eq!(alignment.cost as usize, lev_cost(&a, &b), "{a:?} vs {b:?}");
        assert_eq!(alignment.best_path_ref_len as usize, a.len());
    }
}
