//! Cross-cutting aligner properties: symmetry, determinism, monotonicity,
//! and cost bounds.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weralign_core::{align, build_lattice, levenshtein_align, OpKind};
use weralign_testkit::{corrupt, random_case, random_rule, random_tokens, CaseOptions};

fn token_vec() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop::sample::select(vec![
            "alpha".to_string(),
            "bravo".to_string(),
            "coral".to_string(),
            "delta".to_string(),
            "ember".to_string(),
        ]),
        0..12,
    )
}

proptest! {
    // Swapping the sides swaps insertions and deletions and preserves
    // substitutions exactly.
    #[test]
    fn levenshtein_counts_are_mirror_symmetric(a in token_vec(), b in token_vec()) {
        let fwd = levenshtein_align(&common::seq_of(&a), &common::seq_of(&b));
        let rev = levenshtein_align(&common::seq_of(&b), &common::seq_of(&a));
        let (fc, fs, fd, fi) = fwd.op_counts();
        let (rc, rs, rd, ri) = rev.op_counts();
        prop_assert_eq!(fwd.cost, rev.cost);
        prop_assert_eq!(fs, rs, "substitution counts must match");
        prop_assert_eq!(fd, ri, "deletions become insertions");
        prop_assert_eq!(fi, rd, "insertions become deletions");
        prop_assert_eq!(fc, rc);
    }

    #[test]
    fn identity_alignment_is_all_correct(a in token_vec()) {
        let alignment = levenshtein_align(&common::seq_of(&a), &common::seq_of(&a));
        prop_assert_eq!(alignment.cost, 0);
        prop_assert!(alignment.ops.iter().all(|op| op.kind == OpKind::Correct));
    }

    #[test]
    fn cost_bounds_hold(a in token_vec(), b in token_vec()) {
        let alignment = levenshtein_align(&common::seq_of(&a), &common::seq_of(&b));
        let (n, m) = (a.len() as u64, b.len() as u64);
        prop_assert!(alignment.cost <= n.max(m));
        prop_assert!(alignment.cost >= n.abs_diff(m));
    }
}

#[test]
fn growing_the_rule_set_never_raises_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9090);
    let opts = CaseOptions::default();
    for _ in 0..200 {
        let case = random_case(&mut rng, &opts);
        let doc = common::doc_from_case(&case);
        let hyp = common::seq_of(&if rng.random_bool(0.5) {
            { let edits = rng.random_range(0..4); corrupt(&mut rng, &case.tokens, edits) }
        } else {
            random_tokens(&mut rng, 0, 12)
        });

        let base_cost = align(&lat_of(&doc, &case.rules), &hyp).cost;
        let mut grown = case.rules.clone();
        grown.push(random_rule(&mut rng, 3, false));
        let grown_cost = align(&lat_of(&doc, &grown), &hyp).cost;
        assert!(
            grown_cost <= base_cost,
            "cost rose from {base_cost} to {grown_cost}: case {case:?}"
        );
    }
}

fn lat_of(
    doc: &weralign_core::ReferenceDocument,
    rules: &[weralign_testkit::SynthRule],
) -> weralign_core::Lattice {
    build_lattice(doc, &common::ruleset_from(rules)).unwrap()
}

#[test]
fn alignment_is_deterministic_across_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1ce);
    let opts = CaseOptions {
        with_entities: true,
        ..CaseOptions::default()
    };
    for _ in 0..100 {
        let case = random_case(&mut rng, &opts);
        let doc = common::doc_from_case(&case);
        let lat = lat_of(&doc, &case.rules);
        let hyp = common::seq_of(&{ let edits = rng.random_range(0..5); corrupt(&mut rng, &case.tokens, edits) });
        let first = align(&lat, &hyp);
        for _ in 0..3 {
            let again = align(&lat, &hyp);
            assert_eq!(first.ops, again.ops, "op sequences must be identical");
        }
    }
}
