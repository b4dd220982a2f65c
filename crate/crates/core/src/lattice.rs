//! The reference lattice: an acyclic labeled graph whose start-to-final paths
//! enumerate every acceptable realization of a reference document.
//!
//! Construction lays down a linear verbatim backbone (state `i` = "before
//! original token `i`"), then adds parallel branches: one per normalization
//! candidate of a norm-tagged token, and one per synonym-rule side matched in
//! the backbone (emitting the opposite side). Branches attach at backbone
//! states, so every arc can carry provenance back to the span of original
//! tokens it realizes. Synonym matching runs over the verbatim backbone
//! only — branch outputs are never re-matched, which keeps the lattice
//! O(tokens × rules) and the semantics single-application.
//!
//! A token that folds away entirely (pure punctuation) still occupies a
//! backbone position: its arc is an epsilon arc carrying the token's
//! provenance, so path provenance always covers original indices 0..N
//! exactly once.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::doc::ReferenceDocument;
use crate::text::fold_token;
use crate::transforms::TransformRuleSet;

pub type StateId = u32;

/// How an arc's alternative relates to the original reference tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AltKind {
    Verbatim,
    Synonym,
    Normalization,
}

impl AltKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Verbatim => "verbatim",
            Self::Synonym => "synonym",
            Self::Normalization => "normalization",
        }
    }
}

/// Which original tokens an arc's alternative spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProvenanceTag {
    pub ref_token_start: usize,
    pub ref_token_len: usize,
    pub alt_kind: AltKind,
}

/// A labeled transition. `label == None` is an epsilon arc: it consumes no
/// hypothesis token and emits nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeArc {
    pub from: StateId,
    pub to: StateId,
    pub label: Option<String>,
    pub provenance: Option<ProvenanceTag>,
}

/// Acyclic reference lattice with a single start and a single final state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    arcs: Vec<LatticeArc>,
    num_states: usize,
    start: StateId,
    final_state: StateId,
    topo: Vec<StateId>,
    in_arcs: Vec<Vec<u32>>,
    out_arcs: Vec<Vec<u32>>,
    num_ref_tokens: usize,
}

/// Path count of a lattice, or an overflow flag once it passes 2^63 - 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathCount {
    Exact(u64),
    Overflow,
}

/// Shape summary: state count, arc count, and number of start-final paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeStats {
    pub states: usize,
    pub arcs: usize,
    pub paths: PathCount,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("token {token_index}: norm id {norm_id:?} cannot be resolved")]
    UnresolvedNormId { token_index: usize, norm_id: String },
    #[error("norm id {norm_id:?} has an empty candidate")]
    EmptyNormCandidate { norm_id: String },
    #[error("path enumeration exceeds limit {limit}")]
    PathLimitExceeded { limit: u64 },
    #[error("lattice is malformed: {0}")]
    Malformed(&'static str),
}

/// Compile a document and rule set into its reference lattice.
pub fn build_lattice(
    doc: &ReferenceDocument,
    rules: &TransformRuleSet,
) -> Result<Lattice, LatticeError> {
    let n = doc.tokens.len();
    let mut arcs: Vec<LatticeArc> = Vec::new();
    let mut next_state = (n + 1) as StateId;
    let mut seen_branches: BTreeSet<(StateId, StateId, Vec<String>, AltKind)> = BTreeSet::new();

    // Verbatim backbone: one arc per original token, epsilon if it folds away.
    for (i, token) in doc.tokens.iter().enumerate() {
        arcs.push(LatticeArc {
            from: i as StateId,
            to: (i + 1) as StateId,
            label: fold_token(&token.text),
            provenance: Some(ProvenanceTag {
                ref_token_start: i,
                ref_token_len: 1,
                alt_kind: AltKind::Verbatim,
            }),
        });
    }

    let mut add_branch = |arcs: &mut Vec<LatticeArc>,
                          from: StateId,
                          to: StateId,
                          labels: &[String],
                          kind: AltKind| {
        let key = (from, to, labels.to_vec(), kind);
        if !seen_branches.insert(key) {
            return;
        }
        let provenance = Some(ProvenanceTag {
            ref_token_start: from as usize,
            ref_token_len: (to - from) as usize,
            alt_kind: kind,
        });
        let mut cur = from;
        for (k, label) in labels.iter().enumerate() {
            let nxt = if k + 1 == labels.len() {
                to
            } else {
                let fresh = next_state;
                next_state += 1;
                fresh
            };
            arcs.push(LatticeArc {
                from: cur,
                to: nxt,
                label: Some(label.clone()),
                provenance,
            });
            cur = nxt;
        }
    };

    // Normalization branches: every candidate of a norm-tagged token spans
    // exactly that token.
    for (i, token) in doc.tokens.iter().enumerate() {
        if let Some(norm_id) = &token.norm_id {
            let candidates =
                doc.norms
                    .get(norm_id)
                    .ok_or_else(|| LatticeError::UnresolvedNormId {
                        token_index: i,
                        norm_id: norm_id.clone(),
                    })?;
            for candidate in candidates {
                if candidate.is_empty() || candidate.iter().any(String::is_empty) {
                    return Err(LatticeError::EmptyNormCandidate {
                        norm_id: norm_id.clone(),
                    });
                }
                add_branch(
                    &mut arcs,
                    i as StateId,
                    (i + 1) as StateId,
                    candidate,
                    AltKind::Normalization,
                );
            }
        }
    }

    // Synonym branches: match either rule side over the backbone, emit the
    // opposite side across the matched span of original tokens.
    let backbone = doc.comparison_backbone();
    let backbone_tokens: Vec<String> = backbone.iter().map(|(_, t)| t.clone()).collect();
    for pos in 0..backbone_tokens.len() {
        for m in rules.matches_at(&backbone_tokens, pos) {
            let emit = rules.rules()[m.rule_index].side(m.side.opposite());
            let span_start = backbone[pos].0 as StateId;
            let span_end = (backbone[pos + m.len - 1].0 + 1) as StateId;
            add_branch(&mut arcs, span_start, span_end, emit, AltKind::Synonym);
        }
    }

    Lattice::assemble(arcs, next_state as usize, 0, n as StateId, n)
}

impl Lattice {
    /// Wire up adjacency and the topological order; rejects cyclic input.
    pub fn assemble(
        arcs: Vec<LatticeArc>,
        num_states: usize,
        start: StateId,
        final_state: StateId,
        num_ref_tokens: usize,
    ) -> Result<Self, LatticeError> {
        let mut in_arcs: Vec<Vec<u32>> = alloc::vec![Vec::new(); num_states];
        let mut out_degree = alloc::vec![0usize; num_states];
        let mut in_degree = alloc::vec![0usize; num_states];
        for (id, arc) in arcs.iter().enumerate() {
            if arc.from as usize >= num_states || arc.to as usize >= num_states {
                return Err(LatticeError::Malformed("arc endpoint out of range"));
            }
            in_arcs[arc.to as usize].push(id as u32);
            out_degree[arc.from as usize] += 1;
            in_degree[arc.to as usize] += 1;
        }

        // Kahn's algorithm, smallest state id first for a stable order.
        let mut remaining = in_degree.clone();
        let mut ready: BTreeSet<StateId> = (0..num_states as StateId)
            .filter(|&s| remaining[s as usize] == 0)
            .collect();
        let mut topo = Vec::with_capacity(num_states);
        let mut out_adj: Vec<Vec<u32>> = alloc::vec![Vec::new(); num_states];
        for (id, arc) in arcs.iter().enumerate() {
            out_adj[arc.from as usize].push(id as u32);
        }
        while let Some(&s) = ready.iter().next() {
            ready.remove(&s);
            topo.push(s);
            for &arc_id in &out_adj[s as usize] {
                let to = arcs[arc_id as usize].to as usize;
                remaining[to] -= 1;
                if remaining[to] == 0 {
                    ready.insert(to as StateId);
                }
            }
        }
        if topo.len() != num_states {
            return Err(LatticeError::Malformed("cycle detected"));
        }
        if in_degree[start as usize] != 0 {
            return Err(LatticeError::Malformed("start state has incoming arcs"));
        }
        if out_degree[final_state as usize] != 0 {
            return Err(LatticeError::Malformed("final state has outgoing arcs"));
        }
        Ok(Self {
            arcs,
            num_states,
            start,
            final_state,
            topo,
            in_arcs,
            out_arcs: out_adj,
            num_ref_tokens,
        })
    }

    pub fn arcs(&self) -> &[LatticeArc] {
        &self.arcs
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn final_state(&self) -> StateId {
        self.final_state
    }

    pub fn topo_order(&self) -> &[StateId] {
        &self.topo
    }

    pub fn in_arcs(&self, state: StateId) -> &[u32] {
        &self.in_arcs[state as usize]
    }

    pub fn out_arcs(&self, state: StateId) -> &[u32] {
        &self.out_arcs[state as usize]
    }

    pub fn num_ref_tokens(&self) -> usize {
        self.num_ref_tokens
    }

    /// Structural audit used by tests and debug builds: single start/final,
    /// acyclicity (implied by assembly), full reachability, and provenance
    /// bounds on every non-epsilon arc.
    pub fn validate(&self) -> Result<(), LatticeError> {
        let mut forward = alloc::vec![false; self.num_states];
        forward[self.start as usize] = true;
        for &s in &self.topo {
            if !forward[s as usize] {
                continue;
            }
            for &arc_id in &self.out_arcs[s as usize] {
                forward[self.arcs[arc_id as usize].to as usize] = true;
            }
        }
        let mut backward = alloc::vec![false; self.num_states];
        backward[self.final_state as usize] = true;
        for &s in self.topo.iter().rev() {
            for &arc_id in &self.in_arcs[s as usize] {
                if backward[s as usize] {
                    backward[self.arcs[arc_id as usize].from as usize] = true;
                }
            }
        }
        if !(0..self.num_states).all(|s| forward[s] && backward[s]) {
            return Err(LatticeError::Malformed(
                "state not on any start-final path",
            ));
        }
        for arc in &self.arcs {
            match (&arc.label, &arc.provenance) {
                (Some(_), None) => {
                    return Err(LatticeError::Malformed("labeled arc without provenance"))
                }
                (_, Some(p)) => {
                    if p.ref_token_len == 0
                        || p.ref_token_start + p.ref_token_len > self.num_ref_tokens
                    {
                        return Err(LatticeError::Malformed("provenance out of range"));
                    }
                }
                (None, None) => {}
            }
        }
        Ok(())
    }

    /// Shape summary; the path count is a DAG DP, not an enumeration.
    pub fn stats(&self) -> LatticeStats {
        let mut counts = alloc::vec![0u128; self.num_states];
        counts[self.start as usize] = 1;
        let mut overflow = false;
        for &s in &self.topo {
            let c = counts[s as usize];
            if c == 0 {
                continue;
            }
            for &arc_id in &self.out_arcs[s as usize] {
                let to = self.arcs[arc_id as usize].to as usize;
                match counts[to].checked_add(c) {
                    Some(v) => counts[to] = v,
                    None => overflow = true,
                }
            }
        }
        let total = counts[self.final_state as usize];
        let paths = if overflow || total > i64::MAX as u128 {
            PathCount::Overflow
        } else {
            PathCount::Exact(total as u64)
        };
        LatticeStats {
            states: self.num_states,
            arcs: self.arcs.len(),
            paths,
        }
    }

    /// All distinct label sequences from start to final, epsilon-skipped and
    /// lexicographically sorted. Fails once more than `limit` distinct
    /// sequences (or a safety multiple of raw traversals) are seen.
    pub fn enumerate_paths(&self, limit: u64) -> Result<Vec<Vec<String>>, LatticeError> {
        let raw_cap = limit.saturating_mul(16).max(4096);

        struct Frame {
            state: StateId,
            next: usize,
            entered_with_label: bool,
        }
        let mut stack = alloc::vec![Frame {
            state: self.start,
            next: 0,
            entered_with_label: false,
        }];
        let mut labels: Vec<String> = Vec::new();
        let mut sequences: BTreeSet<Vec<String>> = BTreeSet::new();
        let mut raw_paths = 0u64;

        while let Some(top) = stack.last_mut() {
            if top.state == self.final_state && top.next == 0 {
                raw_paths += 1;
                if raw_paths > raw_cap {
                    return Err(LatticeError::PathLimitExceeded { limit });
                }
                sequences.insert(labels.clone());
                if sequences.len() as u64 > limit {
                    return Err(LatticeError::PathLimitExceeded { limit });
                }
            }
            let outs = &self.out_arcs[top.state as usize];
            if top.next < outs.len() {
                let arc = &self.arcs[outs[top.next] as usize];
                top.next += 1;
                let entered_with_label = arc.label.is_some();
                if let Some(label) = &arc.label {
                    labels.push(label.clone());
                }
                stack.push(Frame {
                    state: arc.to,
                    next: 0,
                    entered_with_label,
                });
            } else {
                let frame = stack.pop().expect("stack not empty");
                if frame.entered_with_label {
                    labels.pop();
                }
            }
        }
        Ok(sequences.into_iter().collect())
    }

    /// Debug dump: one arc per line as
    /// `from<TAB>to<TAB>label<TAB>ref_start<TAB>ref_len<TAB>kind`, with the
    /// final state id on the last line. Epsilon arcs print `<eps>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for arc in &self.arcs {
            let label = arc.label.as_deref().unwrap_or("<eps>");
            let (start, len, kind) = match &arc.provenance {
                Some(p) => (
                    p.ref_token_start.to_string(),
                    p.ref_token_len.to_string(),
                    p.alt_kind.name().to_string(),
                ),
                None => ("-".to_string(), "-".to_string(), "-".to_string()),
            };
            out.push_str(&alloc::format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                arc.from,
                arc.to,
                label,
                start,
                len,
                kind
            ));
        }
        out.push_str(&alloc::format!("{}\n", self.final_state));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::{Casing, NlpToken, ReferenceDocument};

    fn doc_of(words: &[&str]) -> ReferenceDocument {
        ReferenceDocument::new(
            words
                .iter()
                .map(|w| NlpToken::new(*w, "spk1", Casing::Lower))
                .collect(),
        )
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn rules(pairs: &[(&str, &str)]) -> TransformRuleSet {
        TransformRuleSet::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn linear_chain_accepts_exactly_verbatim() {
        let lat = build_lattice(&doc_of(&["a", "b", "c"]), &TransformRuleSet::empty()).unwrap();
        lat.validate().unwrap();
        let stats = lat.stats();
        assert_eq!(stats.states, 4);
        assert_eq!(stats.arcs, 3);
        assert_eq!(stats.paths, PathCount::Exact(1));
        assert_eq!(lat.enumerate_paths(10).unwrap(), vec![toks("a b c")]);
    }

    #[test]
    fn synonym_rule_adds_exactly_the_penalty_free_variant() {
        let lat = build_lattice(
            &doc_of(&["I'm", "going", "to", "win"]),
            &rules(&[("going to", "gonna")]),
        )
        .unwrap();
        lat.validate().unwrap();
        let paths = lat.enumerate_paths(10).unwrap();
        assert_eq!(paths, vec![toks("i'm going to win"), toks("i'm gonna win")]);
    }

    #[test]
    fn norm_candidates_become_parallel_branches() {
        let mut doc = doc_of(&["2021"]);
        doc.tokens[0].norm_id = Some("n42".into());
        doc.norms.insert(
            "n42".into(),
            vec![toks("twenty twenty one"), toks("two thousand twenty one")],
        );
        let lat = build_lattice(&doc, &TransformRuleSet::empty()).unwrap();
        lat.validate().unwrap();
        let paths = lat.enumerate_paths(10).unwrap();
        assert_eq!(
            paths,
            vec![
                toks("2021"),
                toks("twenty twenty one"),
                toks("two thousand twenty one"),
            ]
        );
        assert_eq!(lat.stats().paths, PathCount::Exact(3));
    }

    #[test]
    fn independent_branch_spans_multiply() {
        let lat = build_lattice(
            &doc_of(&["going", "to", "x", "i'll"]),
            &rules(&[("going to", "gonna"), ("i'll", "i will")]),
        )
        .unwrap();
        assert_eq!(lat.stats().paths, PathCount::Exact(4));
        assert_eq!(lat.enumerate_paths(10).unwrap().len(), 4);
    }

    #[test]
    fn unresolved_norm_id_is_an_error() {
        let mut doc = doc_of(&["2021"]);
        doc.tokens[0].norm_id = Some("missing".into());
        assert!(matches!(
            build_lattice(&doc, &TransformRuleSet::empty()),
            Err(LatticeError::UnresolvedNormId { token_index: 0, .. })
        ));
    }

    #[test]
    fn path_limit_is_enforced() {
        let lat = build_lattice(
            &doc_of(&["going", "to"]),
            &rules(&[("going to", "gonna")]),
        )
        .unwrap();
        assert!(matches!(
            lat.enumerate_paths(1),
            Err(LatticeError::PathLimitExceeded { limit: 1 })
        ));
        assert_eq!(lat.enumerate_paths(2).unwrap().len(), 2);
    }

    #[test]
    fn empty_document_is_a_single_state() {
        let lat = build_lattice(&doc_of(&[]), &TransformRuleSet::empty()).unwrap();
        lat.validate().unwrap();
        assert_eq!(lat.num_states(), 1);
        assert_eq!(lat.start(), lat.final_state());
        assert_eq!(lat.enumerate_paths(10).unwrap(), vec![Vec::<String>::new()]);
    }

    #[test]
    fn punctuation_only_token_becomes_epsilon_with_provenance() {
        let lat = build_lattice(&doc_of(&["a", "...", "b"]), &TransformRuleSet::empty()).unwrap();
        lat.validate().unwrap();
        let eps: Vec<_> = lat.arcs().iter().filter(|a| a.label.is_none()).collect();
        assert_eq!(eps.len(), 1);
        let prov = eps[0].provenance.unwrap();
        assert_eq!(prov.ref_token_start, 1);
        assert_eq!(prov.ref_token_len, 1);
        assert_eq!(lat.enumerate_paths(10).unwrap(), vec![toks("a b")]);
    }

    #[test]
    fn synonym_match_spans_a_backbone_gap() {
        // "going . to": the punctuation token folds away, but a rule matching
        // "going to" must still span all three original tokens.
        let lat = build_lattice(
            &doc_of(&["going", ".", "to"]),
            &rules(&[("going to", "gonna")]),
        )
        .unwrap();
        lat.validate().unwrap();
        let synonym_arc = lat
            .arcs()
            .iter()
            .find(|a| a.provenance.map(|p| p.alt_kind) == Some(AltKind::Synonym))
            .unwrap();
        let prov = synonym_arc.provenance.unwrap();
        assert_eq!((prov.ref_token_start, prov.ref_token_len), (0, 3));
        assert_eq!(
            lat.enumerate_paths(10).unwrap(),
            vec![toks("going to"), toks("gonna")]
        );
    }

    #[test]
    fn token_with_norm_inside_synonym_span_gets_both_families() {
        let mut doc = doc_of(&["going", "to"]);
        doc.tokens[1].norm_id = Some("n1".into());
        doc.norms.insert("n1".into(), vec![toks("two")]);
        let lat = build_lattice(&doc, &rules(&[("going to", "gonna")])).unwrap();
        let paths = lat.enumerate_paths(10).unwrap();
        assert_eq!(
            paths,
            vec![toks("going to"), toks("going two"), toks("gonna")]
        );
    }

    #[test]
    fn duplicate_branches_are_collapsed() {
        // two identical rules produce one branch
        let lat = build_lattice(
            &doc_of(&["going", "to"]),
            &rules(&[("going to", "gonna"), ("Going  To", "GONNA.")]),
        )
        .unwrap();
        assert_eq!(lat.stats().paths, PathCount::Exact(2));
    }

    #[test]
    fn every_path_provenance_covers_tokens_exactly_once() {
        let mut doc = doc_of(&["i'm", "going", "to", "2021", "..."]);
        doc.tokens[3].norm_id = Some("n1".into());
        doc.norms
            .insert("n1".into(), vec![toks("twenty twenty one")]);
        let lat = build_lattice(&doc, &rules(&[("going to", "gonna")])).unwrap();

        // walk every arc path, checking provenance coverage
        fn walk(lat: &Lattice, state: StateId, cursor: usize, last_span: Option<(usize, usize)>) {
            if state == lat.final_state() {
                assert_eq!(cursor, lat.num_ref_tokens(), "path must cover all tokens");
                return;
            }
            for &arc_id in lat.out_arcs(state) {
                let arc = &lat.arcs()[arc_id as usize];
                let p = arc.provenance.expect("built arcs always carry provenance");
                let span = (p.ref_token_start, p.ref_token_len);
                if last_span == Some(span) {
                    // continuing inside a multi-arc branch
                    walk(lat, arc.to, cursor, Some(span));
                } else {
                    assert_eq!(p.ref_token_start, cursor, "no gaps or overlaps");
                    walk(lat, arc.to, cursor + p.ref_token_len, Some(span));
                }
            }
        }
        walk(&lat, lat.start(), 0, None);
    }

    #[test]
    fn dump_is_tab_separated_with_final_state_last() {
        let lat = build_lattice(&doc_of(&["a"]), &TransformRuleSet::empty()).unwrap();
        let dump = lat.dump();
        assert_eq!(dump, "0\t1\ta\t0\t1\tverbatim\n1\n");
    }
}
