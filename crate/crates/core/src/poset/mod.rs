//! Labeled posets with recursively nested labels.
//!
//! A [`LabeledPoset`] stores its order as the cover (Hasse) relation;
//! arbitrary acyclic input relations are normalized on construction. Labels
//! are either base values from a finite antichain or nested pointed posets,
//! which is how iterated invariants are represented: each nesting level is
//! one more label layer.
//!
//! The two preorders of interest are `h_leq` (existence of a monotone
//! label-respecting map, decided here only by the exhaustive
//! [`h_leq_bruteforce`] oracle) and [`preceq`], which compares unfoldings
//! and is decided in quadratic time without materializing them.

mod oracle;
mod parse;
mod preceq;

pub use oracle::{h_leq_bruteforce, OracleGuardError};
pub use parse::{parse_poset, poset_to_sexpr, ParseError};
pub use preceq::{label_leq, preceq, preceq_with_stats, PreceqStats};

use std::collections::VecDeque;

use thiserror::Error;

use crate::bitset::BitSet;

/// Node label: a base value or a nested pointed poset.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Label {
    Base(u32),
    Nested(PointedPoset),
}

/// A finite nonempty labeled poset, stored by its cover relation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LabeledPoset {
    labels: Vec<Label>,
    /// `covers[v]` lists the immediate successors of `v`, sorted.
    covers: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PosetError {
    #[error("poset must be nonempty")]
    Empty,
    #[error("node id {0} out of range")]
    BadNode(usize),
    #[error("order relation has a cycle")]
    CyclicOrder,
    #[error("no unique minimum: pointed poset requires a least element")]
    NoUniqueMinimum,
}

impl LabeledPoset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self, node: usize) -> &Label {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Immediate successors of `node` in the cover relation.
    pub fn covers(&self, node: usize) -> &[usize] {
        &self.covers[node]
    }

    pub fn cover_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.covers
            .iter()
            .enumerate()
            .flat_map(|(v, ws)| ws.iter().map(move |&w| (v, w)))
    }

    pub fn cover_edge_count(&self) -> usize {
        self.covers.iter().map(Vec::len).sum()
    }

    /// Nodes with no predecessor, in id order.
    pub fn minimal_nodes(&self) -> Vec<usize> {
        let mut has_pred = vec![false; self.len()];
        for (_, w) in self.cover_edges() {
            has_pred[w] = true;
        }
        (0..self.len()).filter(|&v| !has_pred[v]).collect()
    }

    /// Whether every node has at most one predecessor.
    pub fn is_forest(&self) -> bool {
        let mut preds = vec![0usize; self.len()];
        for (_, w) in self.cover_edges() {
            preds[w] += 1;
        }
        preds.iter().all(|&p| p <= 1)
    }

    /// Strict up-sets as bit rows: `row(v)` contains `w` iff `v < w`.
    pub(crate) fn strict_upsets(&self) -> Vec<BitSet> {
        let m = self.len();
        let order = self.topological_order();
        let mut up: Vec<BitSet> = (0..m).map(|_| BitSet::new(m)).collect();
        for &v in order.iter().rev() {
            let mut row = BitSet::new(m);
            for &w in &self.covers[v] {
                row.insert(w);
                let other = up[w].clone();
                row.union_with(&other);
            }
            up[v] = row;
        }
        up
    }

    /// A topological order of the cover DAG (predecessors first).
    pub(crate) fn topological_order(&self) -> Vec<usize> {
        let m = self.len();
        let mut indeg = vec![0usize; m];
        for (_, w) in self.cover_edges() {
            indeg[w] += 1;
        }
        let mut queue: VecDeque<usize> = (0..m).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(m);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.covers[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        debug_assert_eq!(order.len(), m);
        order
    }

    /// Nodes plus cover edges plus recursive label sizes.
    pub fn size(&self) -> usize {
        let label_size: usize = self
            .labels
            .iter()
            .map(|l| match l {
                Label::Base(_) => 1,
                Label::Nested(p) => p.poset().size(),
            })
            .sum();
        self.len() + self.cover_edge_count() + label_size
    }
}

/// Normalize an arbitrary acyclic order relation into a [`LabeledPoset`]:
/// the transitive closure is computed and its transitive reduction is kept
/// as the cover relation.
pub fn normalize(
    labels: Vec<Label>,
    relations: &[(usize, usize)],
) -> Result<LabeledPoset, PosetError> {
    let m = labels.len();
    if m == 0 {
        return Err(PosetError::Empty);
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(a, b) in relations {
        if a >= m {
            return Err(PosetError::BadNode(a));
        }
        if b >= m {
            return Err(PosetError::BadNode(b));
        }
        if a == b {
            return Err(PosetError::CyclicOrder);
        }
        adj[a].push(b);
    }
    for row in &mut adj {
        row.sort_unstable();
        row.dedup();
    }

    // Kahn both detects cycles and gives the order for closure building.
    let mut indeg = vec![0usize; m];
    for row in &adj {
        for &w in row {
            indeg[w] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..m).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() != m {
        return Err(PosetError::CyclicOrder);
    }

    // Strict closure rows, then strict predecessor rows.
    let mut up: Vec<BitSet> = (0..m).map(|_| BitSet::new(m)).collect();
    for &v in order.iter().rev() {
        let mut row = BitSet::new(m);
        for &w in &adj[v] {
            row.insert(w);
            let other = up[w].clone();
            row.union_with(&other);
        }
        up[v] = row;
    }
    let mut down: Vec<BitSet> = (0..m).map(|_| BitSet::new(m)).collect();
    for (v, row) in up.iter().enumerate() {
        for w in row.ones() {
            down[w].insert(v);
        }
    }

    // v -< w is a cover edge iff nothing sits strictly between.
    let mut covers: Vec<Vec<usize>> = vec![Vec::new(); m];
    for v in 0..m {
        for w in up[v].ones() {
            if !up[v].intersects(&down[w]) {
                covers[v].push(w);
            }
        }
    }
    Ok(LabeledPoset { labels, covers })
}

/// The one-node poset with the given label.
pub fn singleton(label: Label) -> LabeledPoset {
    LabeledPoset {
        labels: vec![label],
        covers: vec![Vec::new()],
    }
}

/// Side-by-side union with renumbered ids and no cross edges.
pub fn disjoint_union(p1: &LabeledPoset, p2: &LabeledPoset) -> LabeledPoset {
    let offset = p1.len();
    let mut labels = p1.labels.clone();
    labels.extend(p2.labels.iter().cloned());
    let mut covers = p1.covers.clone();
    covers.extend(
        p2.covers
            .iter()
            .map(|row| row.iter().map(|w| w + offset).collect()),
    );
    LabeledPoset { labels, covers }
}

/// A labeled poset with a designated least node.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PointedPoset {
    poset: LabeledPoset,
    least: usize,
}

impl PointedPoset {
    /// Requires a unique minimal node (which, in a finite poset, is then
    /// below every other node).
    pub fn new(poset: LabeledPoset) -> Result<Self, PosetError> {
        let minimals = poset.minimal_nodes();
        if minimals.len() != 1 {
            return Err(PosetError::NoUniqueMinimum);
        }
        Ok(PointedPoset {
            least: minimals[0],
            poset,
        })
    }

    pub fn poset(&self) -> &LabeledPoset {
        &self.poset
    }

    pub fn least(&self) -> usize {
        self.least
    }
}

/// A labeled poset in which every node has at most one predecessor.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Forest {
    poset: LabeledPoset,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("not a forest: some node has more than one predecessor")]
pub struct NotAForest;

impl Forest {
    pub fn try_new(poset: LabeledPoset) -> Result<Self, NotAForest> {
        if poset.is_forest() {
            Ok(Forest { poset })
        } else {
            Err(NotAForest)
        }
    }

    pub fn as_poset(&self) -> &LabeledPoset {
        &self.poset
    }

    pub fn into_poset(self) -> LabeledPoset {
        self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub const DEFAULT_UNFOLD_LIMIT: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unfolding exceeds the node limit of {limit}")]
pub struct UnfoldError {
    pub limit: usize,
}

/// Unfold a poset into the forest of its cover paths, up to
/// [`DEFAULT_UNFOLD_LIMIT`] nodes.
///
/// Nodes of the result are the paths that start at a minimal element and
/// step along cover edges; the order is the prefix order and each path is
/// labeled by its endpoint's label, copied unchanged.
pub fn unfold(p: &LabeledPoset) -> Result<Forest, UnfoldError> {
    unfold_with_limit(p, DEFAULT_UNFOLD_LIMIT)
}

/// [`unfold`] with an explicit node limit; exceeding it is an error, never
/// a truncation.
pub fn unfold_with_limit(p: &LabeledPoset, limit: usize) -> Result<Forest, UnfoldError> {
    let mut labels: Vec<Label> = Vec::new();
    let mut children: Vec<Vec<usize>> = Vec::new();
    // Depth-first in reverse so paths come out in preorder, minimal
    // elements and successors visited in id order.
    let mut stack: Vec<(usize, Option<usize>)> = p
        .minimal_nodes()
        .into_iter()
        .rev()
        .map(|v| (v, None))
        .collect();
    while let Some((v, parent)) = stack.pop() {
        if labels.len() == limit {
            return Err(UnfoldError { limit });
        }
        let id = labels.len();
        labels.push(p.label(v).clone());
        children.push(Vec::new());
        if let Some(par) = parent {
            children[par].push(id);
        }
        for &w in p.covers(v).iter().rev() {
            stack.push((w, Some(id)));
        }
    }
    let poset = LabeledPoset {
        labels,
        covers: children,
    };
    debug_assert!(poset.is_forest());
    Ok(Forest { poset })
}
