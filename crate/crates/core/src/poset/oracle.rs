//! Exhaustive oracle for the morphism preorder `≤_h`.
//!
//! Searches for a monotone label-respecting map directly, with no shortcut
//! through the quadratic decision procedure, so the two can be checked
//! against each other. When the source is a forest the subtrees are
//! independent and candidate images can be enumerated per subtree, which
//! keeps unfoldings of small posets in reach; for a general source every
//! monotone map is enumerated, guarded to 8 nodes a side.

use thiserror::Error;

use crate::bitset::BitSet;

use super::{label_leq, Label, LabeledPoset};

const FOREST_GUARD: usize = 512;
const ENUM_GUARD: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("oracle guard exceeded: {p1} x {p2} nodes (limit {limit} a side{forest_note})")]
pub struct OracleGuardError {
    pub p1: usize,
    pub p2: usize,
    pub limit: usize,
    pub forest_note: &'static str,
}

/// Decide `p1 ≤_h p2` by exhaustive search for a monotone map `f` with
/// `label_leq(c1(x), c2(f(x)))` at every node.
pub fn h_leq_bruteforce(p1: &LabeledPoset, p2: &LabeledPoset) -> Result<bool, OracleGuardError> {
    if p1.is_forest() {
        if p1.len() > FOREST_GUARD || p2.len() > FOREST_GUARD {
            return Err(OracleGuardError {
                p1: p1.len(),
                p2: p2.len(),
                limit: FOREST_GUARD,
                forest_note: ", forest source",
            });
        }
        return Ok(forest_search(p1, p2));
    }
    if p1.len() > ENUM_GUARD || p2.len() > ENUM_GUARD {
        return Err(OracleGuardError {
            p1: p1.len(),
            p2: p2.len(),
            limit: ENUM_GUARD,
            forest_note: "",
        });
    }
    Ok(enumerate_maps(p1, p2))
}

/// Reflexive up-set rows of `p`.
fn reflexive_upsets(p: &LabeledPoset) -> Vec<BitSet> {
    let mut rows = p.strict_upsets();
    for (v, row) in rows.iter_mut().enumerate() {
        row.insert(v);
    }
    rows
}

fn labels_ok(l1: &Label, l2: &Label) -> bool {
    label_leq(l1, l2)
}

/// Subtree-by-subtree search for forest sources: `ok[x]` collects the
/// images `y` such that the subtree at `x` embeds with `f(x) = y`. A child
/// may land anywhere in the reflexive up-set of its parent's image, and
/// distinct subtrees impose no constraints on each other.
fn forest_search(p1: &LabeledPoset, p2: &LabeledPoset) -> bool {
    let m2 = p2.len();
    let up2 = reflexive_upsets(p2);
    let mut ok: Vec<BitSet> = vec![BitSet::new(m2); p1.len()];
    let mut order = p1.topological_order();
    order.reverse();
    for &x in &order {
        let mut row = BitSet::new(m2);
        'candidate: for (y, up_row) in up2.iter().enumerate() {
            if !labels_ok(p1.label(x), p2.label(y)) {
                continue;
            }
            for &c in p1.covers(x) {
                if !up_row.intersects(&ok[c]) {
                    continue 'candidate;
                }
            }
            row.insert(y);
        }
        ok[x] = row;
    }
    p1.minimal_nodes().iter().all(|&r| !ok[r].is_empty())
}

/// Enumerate every label-respecting monotone map from `p1` to `p2`,
/// assigning nodes in topological order and pruning assignments that
/// already violate monotonicity.
fn enumerate_maps(p1: &LabeledPoset, p2: &LabeledPoset) -> bool {
    let order = p1.topological_order();
    let up1 = p1.strict_upsets();
    // Strict predecessors of each p1 node.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); p1.len()];
    for (v, row) in up1.iter().enumerate() {
        for w in row.ones() {
            preds[w].push(v);
        }
    }
    let up2 = reflexive_upsets(p2);
    let mut assignment = vec![usize::MAX; p1.len()];
    assign(0, &order, &preds, &up2, p1, p2, &mut assignment)
}

fn assign(
    pos: usize,
    order: &[usize],
    preds: &[Vec<usize>],
    up2: &[BitSet],
    p1: &LabeledPoset,
    p2: &LabeledPoset,
    assignment: &mut Vec<usize>,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let x = order[pos];
    'candidate: for y in 0..p2.len() {
        if !labels_ok(p1.label(x), p2.label(y)) {
            continue;
        }
        for &z in &preds[x] {
            if !up2[assignment[z]].contains(y) {
                continue 'candidate;
            }
        }
        assignment[x] = y;
        if assign(pos + 1, order, preds, up2, p1, p2, assignment) {
            return true;
        }
        assignment[x] = usize::MAX;
    }
    false
}
