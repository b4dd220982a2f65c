//! Language equality: the lattice must accept exactly the set of sequences
//! the brute-force string-rewriting oracle produces, across randomized
//! documents, rules, and normalization tables.

mod common;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weralign_core::{build_lattice, LatticeError};
use weralign_testkit::{collect_alt_spans, expand_language, random_case, CaseOptions};

const ENUM_LIMIT: u64 = 20_000;
/// Oracle subset enumeration is exponential in alternative spans; denser
/// cases are regenerated.
const MAX_ALT_SPANS: usize = 14;

#[test]
fn lattice_language_equals_string_rewriting_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a77);
    let opts = CaseOptions {
        max_tokens: 12,
        max_rules: 3,
        max_norm_spans: 2,
        ..CaseOptions::default()
    };
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 300 {
        attempts += 1;
        assert!(attempts < 10_000, "case generation starved");
        let case = random_case(&mut rng, &opts);
        if collect_alt_spans(&case.tokens, &case.rules, &case.norm_spans).len() > MAX_ALT_SPANS {
            continue;
        }
        let doc = common::doc_from_case(&case);
        let rules = common::ruleset_from(&case.rules);
        let lat = build_lattice(&doc, &rules).expect("build");
        lat.validate().expect("structurally sound");
        let paths = match lat.enumerate_paths(ENUM_LIMIT) {
            Ok(p) => p,
            Err(LatticeError::PathLimitExceeded { .. }) => continue,
            Err(e) => panic!("unexpected error: {e}"),
        };
        let got: BTreeSet<Vec<String>> = paths.into_iter().collect();
        let want = expand_language(&case.tokens, &case.rules, &case.norm_spans);
        assert_eq!(got, want, "case {case:?}");
        checked += 1;
    }
}

#[test]
fn adding_a_rule_never_removes_a_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
    let opts = CaseOptions::default();
    let mut checked = 0;
    while checked < 150 {
        let case = random_case(&mut rng, &opts);
        let extra = weralign_testkit::random_rule(&mut rng, 3, false);
        let doc = common::doc_from_case(&case);

        let base_rules = common::ruleset_from(&case.rules);
        let mut grown = case.rules.clone();
        grown.push(extra);
        let grown_rules = common::ruleset_from(&grown);

        let base = match build_lattice(&doc, &base_rules)
            .unwrap()
            .enumerate_paths(ENUM_LIMIT)
        {
            Ok(p) => p,
            Err(_) => continue,
        };
        let bigger = match build_lattice(&doc, &grown_rules)
            .unwrap()
            .enumerate_paths(ENUM_LIMIT)
        {
            Ok(p) => p,
            Err(_) => continue,
        };
        let base: BTreeSet<_> = base.into_iter().collect();
        let bigger: BTreeSet<_> = bigger.into_iter().collect();
        assert!(
            base.is_subset(&bigger),
            "rule addition removed paths: case {case:?}"
        );
        checked += 1;
    }
}

#[test]
fn adding_a_norm_candidate_never_removes_a_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    let opts = CaseOptions::default();
    let mut checked = 0;
    while checked < 150 {
        let case = random_case(&mut rng, &opts);
        if case.tokens.is_empty() {
            continue;
        }
        let doc = common::doc_from_case(&case);
        let rules = common::ruleset_from(&case.rules);

        let mut extended = doc.clone();
        let extra_candidate = weralign_testkit::random_tokens(&mut rng, 1, 3);
        let target = rand::Rng::random_range(&mut rng, 0..extended.tokens.len());
        let norm_id = match &extended.tokens[target].norm_id {
            Some(id) => id.clone(),
            None => {
                let id = format!("extra{target}");
                extended.tokens[target].norm_id = Some(id.clone());
                id
            }
        };
        extended
            .norms
            .entry(norm_id)
            .or_default()
            .push(extra_candidate);

        let base = match build_lattice(&doc, &rules).unwrap().enumerate_paths(ENUM_LIMIT) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let bigger = match build_lattice(&extended, &rules)
            .unwrap()
            .enumerate_paths(ENUM_LIMIT)
        {
            Ok(p) => p,
            Err(_) => continue,
        };
        let base: BTreeSet<_> = base.into_iter().collect();
        let bigger: BTreeSet<_> = bigger.into_iter().collect();
        assert!(base.is_subset(&bigger), "candidate removed paths");
        checked += 1;
    }
}

#[test]
fn stats_path_count_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    let opts = CaseOptions::default();
    let mut checked = 0;
    while checked < 200 {
        let case = random_case(&mut rng, &opts);
        let doc = common::doc_from_case(&case);
        let rules = common::ruleset_from(&case.rules);
        let lat = build_lattice(&doc, &rules).unwrap();
        let stats = lat.stats();
        let paths = match lat.enumerate_paths(ENUM_LIMIT) {
            Ok(p) => p,
            Err(_) => continue,
        };
        match stats.paths {
            weralign_core::PathCount::Exact(count) => {
                // enumeration dedups label sequences, so it can only be smaller
                assert!(
                    (paths.len() as u64) <= count,
                    "distinct sequences exceed raw path count"
                );
                assert!(count >= 1);
            }
            weralign_core::PathCount::Overflow => panic!("tiny lattice overflowed"),
        }
        checked += 1;
    }
}
