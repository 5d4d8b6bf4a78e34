//! Quadratic decision of the unfolding preorder on labeled posets.
//!
//! `preceq(P1, P2)` holds iff there is a monotone label-respecting map from
//! the unfolding of `P1` to the unfolding of `P2`. The unfoldings are never
//! built: a bit table over node pairs is filled in post-order over both
//! cover DAGs, so the cost is the product of the two input sizes.

use std::collections::HashMap;

use crate::bitset::BitMatrix;

use super::{singleton, Label, LabeledPoset};

/// Counters exposed for the complexity contract: the decision table is
/// filled exactly once per node pair, and label pairs with a nested side
/// are evaluated at most once each.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PreceqStats {
    /// Table entries written, summed over the top-level table and the
    /// tables of nested label comparisons.
    pub table_fills: usize,
    /// Non-trivial label evaluations (at least one side nested) actually
    /// performed, i.e. memo misses.
    pub nested_evals: usize,
    /// Distinct label pairs held by the memo table at the end.
    pub memo_entries: usize,
}

struct Ctx {
    memo: HashMap<(Label, Label), bool>,
    table_fills: usize,
    nested_evals: usize,
}

/// Decide `P1 ⪯ P2`, i.e. whether the unfolding of `P1` maps
/// homomorphically into the unfolding of `P2`.
pub fn preceq(p1: &LabeledPoset, p2: &LabeledPoset) -> bool {
    preceq_with_stats(p1, p2).0
}

/// [`preceq`] with instrumentation counters.
pub fn preceq_with_stats(p1: &LabeledPoset, p2: &LabeledPoset) -> (bool, PreceqStats) {
    let mut ctx = Ctx {
        memo: HashMap::new(),
        table_fills: 0,
        nested_evals: 0,
    };
    let result = preceq_in(p1, p2, &mut ctx);
    let stats = PreceqStats {
        table_fills: ctx.table_fills,
        nested_evals: ctx.nested_evals,
        memo_entries: ctx.memo.len(),
    };
    (result, stats)
}

/// Compare labels in the nested preorder: base values form an antichain,
/// nested labels compare by `preceq` of their posets, and a base value
/// against a nested poset is lifted to the singleton poset carrying it.
///
/// Results are memoized per structural label pair for the duration of one
/// top-level [`preceq`] call.
pub fn label_leq(l1: &Label, l2: &Label) -> bool {
    let mut ctx = Ctx {
        memo: HashMap::new(),
        table_fills: 0,
        nested_evals: 0,
    };
    label_leq_in(l1, l2, &mut ctx)
}

fn label_leq_in(l1: &Label, l2: &Label, ctx: &mut Ctx) -> bool {
    if let (Label::Base(a), Label::Base(b)) = (l1, l2) {
        return a == b;
    }
    let key = (l1.clone(), l2.clone());
    if let Some(&hit) = ctx.memo.get(&key) {
        return hit;
    }
    ctx.nested_evals += 1;
    let result = match (l1, l2) {
        (Label::Base(_), Label::Base(_)) => unreachable!(),
        (Label::Nested(a), Label::Nested(b)) => preceq_in(a.poset(), b.poset(), ctx),
        (Label::Base(a), Label::Nested(b)) => {
            preceq_in(&singleton(Label::Base(*a)), b.poset(), ctx)
        }
        (Label::Nested(a), Label::Base(b)) => {
            preceq_in(a.poset(), &singleton(Label::Base(*b)), ctx)
        }
    };
    ctx.memo.insert(key, result);
    result
}

fn preceq_in(p1: &LabeledPoset, p2: &LabeledPoset, ctx: &mut Ctx) -> bool {
    let m1 = p1.len();
    let m2 = p2.len();
    // Process successors before their predecessors on both sides.
    let post1: Vec<usize> = {
        let mut o = p1.topological_order();
        o.reverse();
        o
    };
    let post2: Vec<usize> = {
        let mut o = p2.topological_order();
        o.reverse();
        o
    };

    // table(v1, v2) = 1 iff the unfolding of the upper cone of v1 maps
    // into the unfolding of the upper cone of v2.
    let mut table = BitMatrix::new(m1, m2);
    for &v1 in &post1 {
        for &v2 in &post2 {
            let via_deeper = p2.covers(v2).iter().any(|&u2| table.get(v1, u2));
            let here = via_deeper
                || (label_leq_in(p1.label(v1), p2.label(v2), ctx)
                    && p1.covers(v1).iter().all(|&u1| table.get(u1, v2)));
            if here {
                table.set(v1, v2);
            }
            ctx.table_fills += 1;
        }
    }
    (0..m1).all(|v1| table.row_any(v1))
}
