//! Minimum-edit alignment of a hypothesis token sequence against a reference
//! lattice.
//!
//! The aligner runs a dynamic program over (lattice state in topological
//! order) × (hypothesis prefix length) — the lattice is a DAG, so this is a
//! shortest path in the edit graph in O(arcs × |hyp|) time. Unit costs:
//! substitution, deletion, and insertion cost 1; matches and epsilon arcs
//! are free.
//!
//! DP values are lexicographic triples (edit cost, non-verbatim arcs used,
//! substitutions), packed into one integer so a plain `min` compares them.
//! The secondary components pin down one canonical alignment among the
//! cost-optimal ones: verbatim arcs win over synonym and normalization
//! branches when they cost the same (keeping entity attribution stable), and
//! substitution-minimal alignments make counts mirror-symmetric. Backtrace
//! ties prefer Correct > Substitution > Deletion > Insertion, then
//! Verbatim > Synonym > Normalization, then the lower arc id, so repeated
//! runs reproduce identical operation sequences, not just identical costs.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::doc::TokenSequence;
use crate::lattice::{AltKind, Lattice, ProvenanceTag, StateId};

/// Edit operation taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Correct,
    Substitution,
    Deletion,
    Insertion,
}

/// One edit operation with provenance back to the reference tokens.
///
/// Correct and Substitution carry both sides; Deletion carries only the
/// reference side; Insertion carries only the hypothesis side.
#[derive(Debug, Clone, PartialEq)]
pub struct EditOp {
    pub kind: OpKind,
    pub hyp_index: Option<usize>,
    pub provenance: Option<ProvenanceTag>,
    pub ref_label: Option<String>,
    pub hyp_label: Option<String>,
}

/// A complete alignment: ordered operations, total edit cost, and the number
/// of non-epsilon reference arcs on the chosen path (the WER denominator).
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub ops: Vec<EditOp>,
    pub cost: u64,
    pub best_path_ref_len: u64,
}

impl Alignment {
    /// (correct, substitutions, deletions, insertions)
    pub fn op_counts(&self) -> (u64, u64, u64, u64) {
        let mut counts = (0, 0, 0, 0);
        for op in &self.ops {
            match op.kind {
                OpKind::Correct => counts.0 += 1,
                OpKind::Substitution => counts.1 += 1,
                OpKind::Deletion => counts.2 += 1,
                OpKind::Insertion => counts.3 += 1,
            }
        }
        counts
    }
}

// ---------------------------------------------------------------------------
// packed DP cells
// ---------------------------------------------------------------------------

/// A DP value: the triple (cost, non-verbatim arcs, substitutions) packed so
/// integer comparison is lexicographic comparison.
trait Cell: Copy + Eq + Ord {
    const INF: Self;
    fn pack(cost: u64, nv: u64, subs: u64) -> Self;
    fn cost(self) -> u64;
    fn add(self, delta: Self) -> Self;
}

/// Narrow cell for transform-free alignments: (cost:16 | subs:16).
impl Cell for u32 {
    const INF: Self = u32::MAX;

    fn pack(cost: u64, nv: u64, subs: u64) -> Self {
        debug_assert_eq!(nv, 0, "u32 cells carry no non-verbatim component");
        debug_assert!(cost < (1 << 16) && subs < (1 << 16));
        ((cost as u32) << 16) | subs as u32
    }

    fn cost(self) -> u64 {
        (self >> 16) as u64
    }

    fn add(self, delta: Self) -> Self {
        self + delta
    }
}

/// General cell: (cost:24 | nv:16 | subs:24).
impl Cell for u64 {
    const INF: Self = u64::MAX;

    fn pack(cost: u64, nv: u64, subs: u64) -> Self {
        debug_assert!(cost < (1 << 24) && nv < (1 << 16) && subs < (1 << 24));
        (cost << 40) | (nv << 24) | subs
    }

    fn cost(self) -> u64 {
        self >> 40
    }

    fn add(self, delta: Self) -> Self {
        self + delta
    }
}

/// Oversize fallback: (cost:48 | nv:32 | subs:48).
impl Cell for u128 {
    const INF: Self = u128::MAX;

    fn pack(cost: u64, nv: u64, subs: u64) -> Self {
        ((cost as u128) << 80) | ((nv as u128) << 48) | subs as u128
    }

    fn cost(self) -> u64 {
        (self >> 80) as u64
    }

    fn add(self, delta: Self) -> Self {
        self + delta
    }
}

// ---------------------------------------------------------------------------
// lattice alignment
// ---------------------------------------------------------------------------

fn intern<'a>(table: &mut BTreeMap<&'a str, u32>, s: &'a str) -> u32 {
    let next = table.len() as u32;
    *table.entry(s).or_insert(next)
}

struct Workspace<'a> {
    lat: &'a Lattice,
    /// interned symbol per arc, None for epsilon
    arc_syms: Vec<Option<u32>>,
    /// true when the arc belongs to a synonym or normalization branch
    arc_nv: Vec<bool>,
    hyp_syms: Vec<u32>,
    hyp_tokens: &'a [String],
}

impl<'a> Workspace<'a> {
    fn new(lat: &'a Lattice, hyp: &'a TokenSequence) -> Self {
        let mut symbols: BTreeMap<&str, u32> = BTreeMap::new();
        let mut arc_syms = Vec::with_capacity(lat.arcs().len());
        let mut arc_nv = Vec::with_capacity(lat.arcs().len());
        for arc in lat.arcs() {
            arc_syms.push(arc.label.as_deref().map(|l| intern(&mut symbols, l)));
            arc_nv.push(matches!(
                arc.provenance.map(|p| p.alt_kind),
                Some(AltKind::Synonym) | Some(AltKind::Normalization)
            ));
        }
        let hyp_syms = hyp
            .tokens()
            .iter()
            .map(|t| intern(&mut symbols, t.as_str()))
            .collect();
        Self {
            lat,
            arc_syms,
            arc_nv,
            hyp_syms,
            hyp_tokens: hyp.tokens(),
        }
    }

    fn has_non_verbatim(&self) -> bool {
        self.arc_nv.iter().any(|&b| b)
    }

    /// Upper bound on any alignment cost: delete every arc, insert every
    /// hypothesis token.
    fn cost_bound(&self) -> u64 {
        self.lat.arcs().len() as u64 + self.hyp_syms.len() as u64 + 1
    }
}

fn lattice_dp<C: Cell>(ws: &Workspace) -> Vec<C> {
    let m = ws.hyp_syms.len();
    let width = m + 1;
    let num_states = ws.lat.num_states();
    let ins = C::pack(1, 0, 0);
    let mut table = alloc::vec![C::INF; num_states * width];

    // start row: j insertions
    let start_base = ws.lat.start() as usize * width;
    let mut acc = C::pack(0, 0, 0);
    table[start_base] = acc;
    for j in 1..=m {
        acc = acc.add(ins);
        table[start_base + j] = acc;
    }

    struct Incoming<C> {
        pbase: usize,
        sym: Option<u32>,
        correct: C,
        sub: C,
        del: C,
        eps: C,
    }

    for &s in ws.lat.topo_order() {
        if s == ws.lat.start() {
            continue;
        }
        let base = s as usize * width;
        let incoming: Vec<Incoming<C>> = ws
            .lat
            .in_arcs(s)
            .iter()
            .map(|&arc_id| {
                let arc = &ws.lat.arcs()[arc_id as usize];
                let nv = u64::from(ws.arc_nv[arc_id as usize]);
                Incoming {
                    pbase: arc.from as usize * width,
                    sym: ws.arc_syms[arc_id as usize],
                    correct: C::pack(0, nv, 0),
                    sub: C::pack(1, nv, 1),
                    del: C::pack(1, nv, 0),
                    eps: C::pack(0, nv, 0),
                }
            })
            .collect();

        for j in 0..=width - 1 {
            let mut best = C::INF;
            for inc in &incoming {
                match inc.sym {
                    Some(sym) => {
                        if j > 0 {
                            let diag = table[inc.pbase + j - 1];
                            if diag != C::INF {
                                let delta = if ws.hyp_syms[j - 1] == sym {
                                    inc.correct
                                } else {
                                    inc.sub
                                };
                                let cand = diag.add(delta);
                                if cand < best {
                                    best = cand;
                                }
                            }
                        }
                        let up = table[inc.pbase + j];
                        if up != C::INF {
                            let cand = up.add(inc.del);
                            if cand < best {
                                best = cand;
                            }
                        }
                    }
                    None => {
                        let across = table[inc.pbase + j];
                        if across != C::INF {
                            let cand = across.add(inc.eps);
                            if cand < best {
                                best = cand;
                            }
                        }
                    }
                }
            }
            if j > 0 {
                let left = table[base + j - 1];
                if left != C::INF {
                    let cand = left.add(ins);
                    if cand < best {
                        best = cand;
                    }
                }
            }
            table[base + j] = best;
        }
    }
    table
}

fn lattice_backtrace<C: Cell>(ws: &Workspace, table: &[C]) -> Vec<EditOp> {
    let m = ws.hyp_syms.len();
    let width = m + 1;
    let lat = ws.lat;
    let arcs = lat.arcs();
    let kind_rank = |arc_id: u32| -> u8 {
        match arcs[arc_id as usize].provenance.map(|p| p.alt_kind) {
            None | Some(AltKind::Verbatim) => 0,
            Some(AltKind::Synonym) => 1,
            Some(AltKind::Normalization) => 2,
        }
    };
    let ins = C::pack(1, 0, 0);

    let mut ops: Vec<EditOp> = Vec::new();
    let mut state: StateId = lat.final_state();
    let mut j = m;

    while state != lat.start() || j != 0 {
        let cur = table[state as usize * width + j];
        debug_assert!(cur != C::INF, "final cell must be reachable");

        let mut in_ids: Vec<u32> = lat.in_arcs(state).to_vec();
        in_ids.sort_by_key(|&id| (kind_rank(id), id));

        let mut chosen: Option<(OpKind, Option<u32>)> = None;
        // Correct, then Substitution
        for want_correct in [true, false] {
            if chosen.is_some() || j == 0 {
                break;
            }
            for &arc_id in &in_ids {
                let Some(sym) = ws.arc_syms[arc_id as usize] else {
                    continue;
                };
                let matches = ws.hyp_syms[j - 1] == sym;
                if matches != want_correct {
                    continue;
                }
                let nv = u64::from(ws.arc_nv[arc_id as usize]);
                let delta = if matches {
                    C::pack(0, nv, 0)
                } else {
                    C::pack(1, nv, 1)
                };
                let prev = table[arcs[arc_id as usize].from as usize * width + j - 1];
                if prev != C::INF && prev.add(delta) == cur {
                    chosen = Some((
                        if matches {
                            OpKind::Correct
                        } else {
                            OpKind::Substitution
                        },
                        Some(arc_id),
                    ));
                    break;
                }
            }
        }
        // Deletion
        if chosen.is_none() {
            for &arc_id in &in_ids {
                if ws.arc_syms[arc_id as usize].is_none() {
                    continue;
                }
                let nv = u64::from(ws.arc_nv[arc_id as usize]);
                let prev = table[arcs[arc_id as usize].from as usize * width + j];
                if prev != C::INF && prev.add(C::pack(1, nv, 0)) == cur {
                    chosen = Some((OpKind::Deletion, Some(arc_id)));
                    break;
                }
            }
        }
        // Insertion
        if chosen.is_none() && j > 0 {
            let left = table[state as usize * width + j - 1];
            if left != C::INF && left.add(ins) == cur {
                chosen = Some((OpKind::Insertion, None));
            }
        }
        // Epsilon move (no op emitted)
        if chosen.is_none() {
            let mut moved = false;
            for &arc_id in &in_ids {
                if ws.arc_syms[arc_id as usize].is_some() {
                    continue;
                }
                let nv = u64::from(ws.arc_nv[arc_id as usize]);
                let prev = table[arcs[arc_id as usize].from as usize * width + j];
                if prev != C::INF && prev.add(C::pack(0, nv, 0)) == cur {
                    state = arcs[arc_id as usize].from;
                    moved = true;
                    break;
                }
            }
            if moved {
                continue;
            }
            unreachable!("DP table inconsistent with backtrace");
        }

        match chosen.expect("an optimal predecessor always exists") {
            (OpKind::Insertion, None) => {
                ops.push(EditOp {
                    kind: OpKind::Insertion,
                    hyp_index: Some(j - 1),
                    provenance: None,
                    ref_label: None,
                    hyp_label: Some(ws.hyp_tokens[j - 1].clone()),
                });
                j -= 1;
            }
            (kind, Some(arc_id)) => {
                let arc = &arcs[arc_id as usize];
                let (hyp_index, hyp_label, next_j) = match kind {
                    OpKind::Deletion => (None, None, j),
                    _ => (Some(j - 1), Some(ws.hyp_tokens[j - 1].clone()), j - 1),
                };
                ops.push(EditOp {
                    kind,
                    hyp_index,
                    provenance: arc.provenance,
                    ref_label: arc.label.clone(),
                    hyp_label,
                });
                state = arc.from;
                j = next_j;
            }
            _ => unreachable!(),
        }
    }
    ops.reverse();
    ops
}

fn finish(ops: Vec<EditOp>, cost: u64) -> Alignment {
    let best_path_ref_len = ops
        .iter()
        .filter(|op| op.kind != OpKind::Insertion)
        .count() as u64;
    Alignment {
        ops,
        cost,
        best_path_ref_len,
    }
}

/// Align a hypothesis against a reference lattice at global minimum edit
/// cost over all lattice paths. Empty hypotheses and empty lattices are
/// valid inputs.
pub fn align(lat: &Lattice, hyp: &TokenSequence) -> Alignment {
    let ws = Workspace::new(lat, hyp);
    let bound = ws.cost_bound();
    if !ws.has_non_verbatim() && bound < (1 << 16) {
        let table = lattice_dp::<u32>(&ws);
        let cost = table[lat.final_state() as usize * (hyp.len() + 1) + hyp.len()].cost();
        finish(lattice_backtrace(&ws, &table), cost)
    } else if bound < (1 << 24) && ws.lat.arcs().len() < (1 << 16) {
        let table = lattice_dp::<u64>(&ws);
        let cost = table[lat.final_state() as usize * (hyp.len() + 1) + hyp.len()].cost();
        finish(lattice_backtrace(&ws, &table), cost)
    } else {
        let table = lattice_dp::<u128>(&ws);
        let cost = table[lat.final_state() as usize * (hyp.len() + 1) + hyp.len()].cost();
        finish(lattice_backtrace(&ws, &table), cost)
    }
}

// ---------------------------------------------------------------------------
// plain Levenshtein alignment
// ---------------------------------------------------------------------------

fn lev_dp<C: Cell>(ref_syms: &[u32], hyp_syms: &[u32]) -> Vec<C> {
    let n = ref_syms.len();
    let m = hyp_syms.len();
    let width = m + 1;
    let correct = C::pack(0, 0, 0);
    let sub = C::pack(1, 0, 1);
    let gap = C::pack(1, 0, 0); // deletion or insertion
    let mut table = alloc::vec![C::pack(0, 0, 0); (n + 1) * width];
    for j in 1..=m {
        table[j] = table[j - 1].add(gap);
    }
    for i in 1..=n {
        let base = i * width;
        let prev = base - width;
        table[base] = table[prev].add(gap);
        for j in 1..=m {
            let delta = if ref_syms[i - 1] == hyp_syms[j - 1] {
                correct
            } else {
                sub
            };
            let mut best = table[prev + j - 1].add(delta);
            let del = table[prev + j].add(gap);
            if del < best {
                best = del;
            }
            let ins = table[base + j - 1].add(gap);
            if ins < best {
                best = ins;
            }
            table[base + j] = best;
        }
    }
    table
}

fn lev_backtrace<C: Cell>(
    table: &[C],
    ref_tokens: &[String],
    hyp_tokens: &[String],
    ref_syms: &[u32],
    hyp_syms: &[u32],
) -> Vec<EditOp> {
    let m = hyp_syms.len();
    let width = m + 1;
    let correct = C::pack(0, 0, 0);
    let sub = C::pack(1, 0, 1);
    let gap = C::pack(1, 0, 0);

    let mut ops = Vec::new();
    let mut i = ref_syms.len();
    let mut j = m;
    while i > 0 || j > 0 {
        let cur = table[i * width + j];
        // prefer the diagonal (Correct or Substitution), then Deletion, then
        // Insertion — mirroring the lattice backtrace order
        if i > 0 && j > 0 {
            let matches = ref_syms[i - 1] == hyp_syms[j - 1];
            let delta = if matches { correct } else { sub };
            if table[(i - 1) * width + j - 1].add(delta) == cur {
                ops.push(EditOp {
                    kind: if matches {
                        OpKind::Correct
                    } else {
                        OpKind::Substitution
                    },
                    hyp_index: Some(j - 1),
                    provenance: Some(ProvenanceTag {
                        ref_token_start: i - 1,
                        ref_token_len: 1,
                        alt_kind: AltKind::Verbatim,
                    }),
                    ref_label: Some(ref_tokens[i - 1].clone()),
                    hyp_label: Some(hyp_tokens[j - 1].clone()),
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && table[(i - 1) * width + j].add(gap) == cur {
            ops.push(EditOp {
                kind: OpKind::Deletion,
                hyp_index: None,
                provenance: Some(ProvenanceTag {
                    ref_token_start: i - 1,
                    ref_token_len: 1,
                    alt_kind: AltKind::Verbatim,
                }),
                ref_label: Some(ref_tokens[i - 1].clone()),
                hyp_label: None,
            });
            i -= 1;
            continue;
        }
        debug_assert!(j > 0 && table[i * width + j - 1].add(gap) == cur);
        ops.push(EditOp {
            kind: OpKind::Insertion,
            hyp_index: Some(j - 1),
            provenance: None,
            ref_label: None,
            hyp_label: Some(hyp_tokens[j - 1].clone()),
        });
        j -= 1;
    }
    ops.reverse();
    ops
}

/// Classic unit-cost edit alignment of two token sequences. Result contract
/// matches [`align`] run on the linear lattice of `reference`.
pub fn levenshtein_align(reference: &TokenSequence, hyp: &TokenSequence) -> Alignment {
    let mut symbols: BTreeMap<&str, u32> = BTreeMap::new();
    let ref_syms: Vec<u32> = reference
        .tokens()
        .iter()
        .map(|t| intern(&mut symbols, t.as_str()))
        .collect();
    let hyp_syms: Vec<u32> = hyp
        .tokens()
        .iter()
        .map(|t| intern(&mut symbols, t.as_str()))
        .collect();

    let bound = (reference.len() + hyp.len() + 1) as u64;
    let m = hyp.len();
    if bound < (1 << 16) {
        let table = lev_dp::<u32>(&ref_syms, &hyp_syms);
        let cost = table[reference.len() * (m + 1) + m].cost();
        let ops = lev_backtrace(&table, reference.tokens(), hyp.tokens(), &ref_syms, &hyp_syms);
        finish(ops, cost)
    } else if bound < (1 << 24) {
        let table = lev_dp::<u64>(&ref_syms, &hyp_syms);
        let cost = table[reference.len() * (m + 1) + m].cost();
        let ops = lev_backtrace(&table, reference.tokens(), hyp.tokens(), &ref_syms, &hyp_syms);
        finish(ops, cost)
    } else {
        let table = lev_dp::<u128>(&ref_syms, &hyp_syms);
        let cost = table[reference.len() * (m + 1) + m].cost();
        let ops = lev_backtrace(&table, reference.tokens(), hyp.tokens(), &ref_syms, &hyp_syms);
        finish(ops, cost)
    }
}
