//! The cycle set of an automaton.
//!
//! A cycle is a set of states that some run visits infinitely often. This
//! module enumerates elementary cycles of the reachable state digraph, then
//! merges overlapping ones through their intersection graph to obtain the
//! full cycle set, with an exhaustive subset oracle for cross-checking and
//! the counting bound `max(2^d, C^n + n)` on the number of cycles.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::automaton::Automaton;
use crate::bitset::BitSet;

/// A nonempty set of states, canonically encoded as a sorted id list.
///
/// Relative to an automaton, a valid cycle consists of reachable states
/// whose induced subgraph is strongly connected, with a self-loop required
/// for singletons; see [`is_cycle`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Cycle(Vec<usize>);

impl Cycle {
    /// Canonicalize an arbitrary nonempty collection of state ids.
    pub fn new<I: IntoIterator<Item = usize>>(states: I) -> Self {
        let mut v: Vec<usize> = states.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        assert!(!v.is_empty(), "a cycle must contain at least one state");
        Cycle(v)
    }

    pub fn from_bitset(set: &BitSet) -> Self {
        Cycle::new(set.ones())
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, state: usize) -> bool {
        self.0.binary_search(&state).is_ok()
    }

    pub fn to_bitset(&self, universe: usize) -> BitSet {
        BitSet::from_indices(universe, self.0.iter().copied())
    }

    pub fn is_superset_of(&self, other: &Cycle) -> bool {
        other.0.iter().all(|s| self.contains(*s))
    }

    /// Bitstring with one character per state, leftmost = state 0.
    pub fn to_bitstring(&self, universe: usize) -> String {
        (0..universe)
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", ids.join(" "))
    }
}

/// A deduplicated set of cycles in canonical order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CycleSet(BTreeSet<Cycle>);

impl CycleSet {
    pub fn from_cycles<I: IntoIterator<Item = Cycle>>(cycles: I) -> Self {
        CycleSet(cycles.into_iter().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Cycle> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: &Cycle) -> bool {
        self.0.contains(c)
    }
}

impl<'a> IntoIterator for &'a CycleSet {
    type Item = &'a Cycle;
    type IntoIter = std::collections::btree_set::Iter<'a, Cycle>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A closed walk through distinct vertices, stored with the smallest vertex
/// first (rotations are identified).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ElementaryCycle(Vec<usize>);

impl ElementaryCycle {
    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Undirected intersection graph of elementary cycles: two cycles are
/// adjacent when they share at least one state.
#[derive(Clone, Debug)]
pub struct IntersectionGraph {
    /// State set of each elementary cycle.
    pub members: Vec<BitSet>,
    /// Adjacency rows over elementary-cycle indices; symmetric and
    /// irreflexive.
    pub adj: Vec<BitSet>,
}

pub fn intersection_graph(a: &Automaton, cycles: &[ElementaryCycle]) -> IntersectionGraph {
    let n = a.state_count();
    let m = cycles.len();
    let members: Vec<BitSet> = cycles
        .iter()
        .map(|c| BitSet::from_indices(n, c.vertices().iter().copied()))
        .collect();
    let mut adj: Vec<BitSet> = (0..m).map(|_| BitSet::new(m)).collect();
    for i in 0..m {
        for j in i + 1..m {
            if members[i].intersects(&members[j]) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    IntersectionGraph { members, adj }
}

/// All elementary cycles of the reachable state digraph, each exactly once
/// up to rotation. Parallel letters collapse to simple arcs; self-loops are
/// length-1 elementary cycles.
pub fn elementary_cycles(a: &Automaton) -> Vec<ElementaryCycle> {
    let n = a.state_count();
    let adj = a.successor_sets();
    let reachable: Vec<usize> = a.reachable_states().into_iter().collect();

    let mut result = Vec::new();
    let mut blocked = vec![false; n];
    let mut block_list: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];

    // One pass per start vertex `s`, restricted to the strongly connected
    // component of `s` inside the subgraph on reachable vertices >= s, so
    // every cycle is produced exactly once, rooted at its smallest vertex.
    for (si, &s) in reachable.iter().enumerate() {
        let scope_vertices: Vec<usize> = reachable[si..].to_vec();
        let in_scope = BitSet::from_indices(n, scope_vertices.iter().copied());
        let comp = component_of(n, s, &in_scope, &adj);

        let has_self_loop = adj[s].contains(&s);
        if comp.count_ones() == 1 && !has_self_loop {
            continue;
        }
        for v in comp.ones() {
            blocked[v] = false;
            block_list[v].clear();
        }
        let mut path = Vec::new();
        circuit(
            s,
            s,
            &adj,
            &comp,
            &mut blocked,
            &mut block_list,
            &mut path,
            &mut result,
        );
        debug_assert!(path.is_empty());
    }
    result
}

/// Strongly connected component of `s` within `in_scope`.
fn component_of(n: usize, s: usize, in_scope: &BitSet, adj: &[Vec<usize>]) -> BitSet {
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in in_scope.ones() {
        for &w in &adj[v] {
            if in_scope.contains(w) {
                rev[w].push(v);
            }
        }
    }
    let bfs = |edges: &dyn Fn(usize) -> Vec<usize>| -> BitSet {
        let mut seen = BitSet::new(n);
        seen.insert(s);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for w in edges(v) {
                if in_scope.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    queue.push_back(w);
                }
            }
        }
        seen
    };
    let forward = bfs(&|v| adj[v].clone());
    let backward = bfs(&|v| rev[v].clone());
    let mut comp = BitSet::new(n);
    for v in forward.ones() {
        if backward.contains(v) {
            comp.insert(v);
        }
    }
    comp
}

#[allow(clippy::too_many_arguments)]
fn circuit(
    v: usize,
    s: usize,
    adj: &[Vec<usize>],
    scope: &BitSet,
    blocked: &mut [bool],
    block_list: &mut [BTreeSet<usize>],
    path: &mut Vec<usize>,
    out: &mut Vec<ElementaryCycle>,
) -> bool {
    let mut found = false;
    path.push(v);
    blocked[v] = true;
    for &w in &adj[v] {
        if !scope.contains(w) {
            continue;
        }
        if w == s {
            out.push(ElementaryCycle(path.clone()));
            found = true;
        } else if !blocked[w] && circuit(w, s, adj, scope, blocked, block_list, path, out) {
            found = true;
        }
    }
    if found {
        unblock(v, blocked, block_list);
    } else {
        for &w in &adj[v] {
            if scope.contains(w) && w != s {
                block_list[w].insert(v);
            }
        }
    }
    path.pop();
    found
}

fn unblock(v: usize, blocked: &mut [bool], block_list: &mut [BTreeSet<usize>]) {
    let mut todo = vec![v];
    while let Some(u) = todo.pop() {
        if blocked[u] {
            blocked[u] = false;
            todo.extend(std::mem::take(&mut block_list[u]));
        }
    }
}

/// The full cycle set: unions of state sets over induced connected
/// subgraphs of the intersection graph of elementary cycles.
///
/// Worklist over connected subgraphs keyed by their state-set union: seed
/// with single elementary cycles, extend by one overlapping elementary
/// cycle at a time, and keep only unions not seen before. Two subgraphs
/// with the same union have the same neighbors, so pruning by union is
/// lossless.
pub fn all_cycles(a: &Automaton) -> CycleSet {
    let elems = elementary_cycles(a);
    let graph = intersection_graph(a, &elems);
    let m = elems.len();

    // Queue entries are connected subgraphs of the intersection graph,
    // carrying their member set, state-set union and neighbor set.
    struct Subgraph {
        members: BitSet,
        states: BitSet,
        neighbors: BitSet,
    }

    let mut seen: BTreeSet<BitSet> = BTreeSet::new();
    let mut queue: VecDeque<Subgraph> = VecDeque::new();
    for i in 0..m {
        if seen.insert(graph.members[i].clone()) {
            queue.push_back(Subgraph {
                members: BitSet::from_indices(m, [i]),
                states: graph.members[i].clone(),
                neighbors: graph.adj[i].clone(),
            });
        }
    }
    while let Some(current) = queue.pop_front() {
        for j in current.neighbors.ones() {
            let mut states = current.states.clone();
            states.union_with(&graph.members[j]);
            if !seen.insert(states.clone()) {
                continue;
            }
            let mut members = current.members.clone();
            members.insert(j);
            let mut neighbors = current.neighbors.clone();
            neighbors.union_with(&graph.adj[j]);
            let neighbors =
                BitSet::from_indices(m, neighbors.ones().filter(|c| !members.contains(*c)));
            queue.push_back(Subgraph {
                members,
                states,
                neighbors,
            });
        }
    }
    CycleSet(seen.iter().map(Cycle::from_bitset).collect())
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("brute-force cycle enumeration is limited to {limit} states, got {actual}")]
pub struct GuardError {
    pub limit: usize,
    pub actual: usize,
}

/// Whether `states` (sorted, distinct) is a cycle of `a`: all states
/// reachable, induced subgraph strongly connected, and a singleton only
/// with a self-loop.
pub fn is_cycle(a: &Automaton, states: &[usize]) -> bool {
    let reachable = a.reachable_states();
    let adj = a.successor_sets();
    is_cycle_with(&adj, &reachable, a.state_count(), states)
}

fn is_cycle_with(
    adj: &[Vec<usize>],
    reachable: &BTreeSet<usize>,
    n: usize,
    states: &[usize],
) -> bool {
    if states.is_empty() {
        return false;
    }
    if !states.iter().all(|s| reachable.contains(s)) {
        return false;
    }
    if states.len() == 1 {
        let s = states[0];
        return adj[s].contains(&s);
    }
    let in_set = BitSet::from_indices(n, states.iter().copied());
    let start = states[0];
    // Forward closure within the set.
    let mut seen = BitSet::new(n);
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if in_set.contains(w) && !seen.contains(w) {
                seen.insert(w);
                queue.push_back(w);
            }
        }
    }
    if states.iter().any(|s| !seen.contains(*s)) {
        return false;
    }
    // Backward closure within the set.
    let mut seen_back = BitSet::new(n);
    seen_back.insert(start);
    let mut frontier = vec![start];
    while let Some(v) = frontier.pop() {
        for &u in states {
            if !seen_back.contains(u) && adj[u].contains(&v) && in_set.contains(u) {
                seen_back.insert(u);
                frontier.push(u);
            }
        }
    }
    states.iter().all(|s| seen_back.contains(*s))
}

const BRUTE_FORCE_LIMIT: usize = 20;

/// Exhaustive oracle: enumerate every nonempty subset of reachable states
/// and keep those whose induced subgraph is strongly connected (singletons
/// need a self-loop). Guarded to 20 states.
pub fn all_cycles_bruteforce(a: &Automaton) -> Result<CycleSet, GuardError> {
    let n = a.state_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(GuardError {
            limit: BRUTE_FORCE_LIMIT,
            actual: n,
        });
    }
    let reachable: Vec<usize> = a.reachable_states().into_iter().collect();
    let reachable_set: BTreeSet<usize> = reachable.iter().copied().collect();
    let adj = a.successor_sets();
    let mut out = BTreeSet::new();
    for mask in 1u64..(1u64 << reachable.len()) {
        let states: Vec<usize> = (0..reachable.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| reachable[i])
            .collect();
        if is_cycle_with(&adj, &reachable_set, n, &states) {
            out.insert(Cycle(states));
        }
    }
    Ok(CycleSet(out))
}

/// Upper bound `max(2^d, C^n + n)` on the number of cycles of an automaton
/// with `n` states over `d` letters, where
/// `C = 2 (1 - 1/2^(d+1))^(1/(d+1)) < 2`.
pub fn cycle_count_bound(n: usize, d: usize) -> f64 {
    debug_assert!(n >= 1 && d >= 1);
    let dd = d as f64;
    let c = 2.0 * (1.0 - 0.5f64.powi(d as i32 + 1)).powf(1.0 / (dd + 1.0));
    let grown = c.powi(n as i32) + n as f64;
    (2.0f64).powi(d as i32).max(grown)
}

// ---------------------------------------------------------------------------
// Acceptor labeling sections
// ---------------------------------------------------------------------------

/// Labeling section of an automaton file: arity `k` plus either compact
/// cycle-list entries or a subset table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptorSection {
    pub k: u32,
    pub entries: AcceptorEntries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AcceptorEntries {
    /// `cycle: <ids...> -> <label>` lines; ids strictly increasing.
    Cycles(Vec<(Vec<usize>, u32)>),
    /// `subset: <bitstring> -> <label>` lines; bit i = state i.
    Subsets(Vec<(BitSet, u32)>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelingError {
    #[error("unlabeled cycle {{{0}}}")]
    UnlabeledCycle(String),
    #[error("duplicate labeling entry for {{{0}}}")]
    DuplicateEntry(String),
    #[error("strict mode: expected {expected} subset entries, got {got}")]
    IncompleteTable { expected: u128, got: usize },
    #[error("strict mode is limited to 63 states, got {0}")]
    TooManyStatesForStrict(usize),
}

/// Restrict a subset table to the cycle set of `a`.
///
/// Entries for non-cycles are dropped with a warning; a cycle without an
/// entry is an error. In strict mode the table must contain one entry per
/// subset of states.
pub fn subset_table_to_cycles(
    a: &Automaton,
    entries: &[(BitSet, u32)],
    strict: bool,
) -> Result<CycleLabeling, LabelingError> {
    let n = a.state_count();
    let mut table: BTreeMap<BitSet, u32> = BTreeMap::new();
    for (set, label) in entries {
        if table.insert(set.clone(), *label).is_some() {
            return Err(LabelingError::DuplicateEntry(
                Cycle::from_bitset(set).to_string(),
            ));
        }
    }
    if strict {
        if n > 63 {
            return Err(LabelingError::TooManyStatesForStrict(n));
        }
        let expected = 1u128 << n;
        if table.len() as u128 != expected {
            return Err(LabelingError::IncompleteTable {
                expected,
                got: table.len(),
            });
        }
    }
    let cycles = all_cycles(a);
    let mut map = BTreeMap::new();
    let mut used: BTreeSet<BitSet> = BTreeSet::new();
    for cycle in &cycles {
        let key = cycle.to_bitset(n);
        match table.get(&key) {
            Some(&label) => {
                map.insert(cycle.clone(), label);
                used.insert(key);
            }
            None => return Err(LabelingError::UnlabeledCycle(cycle.to_string())),
        }
    }
    let mut warnings = Vec::new();
    for set in table.keys() {
        if !used.contains(set) {
            let bits: String = (0..n)
                .map(|i| if set.contains(i) { '1' } else { '0' })
                .collect();
            warnings.push(format!("subset {bits} is not a cycle; entry dropped"));
        }
    }
    Ok(CycleLabeling { map, warnings })
}

/// A total labeling of the cycle set, plus warnings for dropped entries.
#[derive(Clone, Debug)]
pub struct CycleLabeling {
    pub map: BTreeMap<Cycle, u32>,
    pub warnings: Vec<String>,
}
