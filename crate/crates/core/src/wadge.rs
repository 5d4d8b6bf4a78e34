//! Wadge reducibility between ω-regular k-partitions given as Muller
//! k-acceptors.
//!
//! An acceptor's invariant is an iterated poset: one node per reachable SCC
//! that is itself a cycle, ordered by condensation reachability, each
//! labeled with the pointed poset of that SCC's cycles under reverse
//! inclusion (least element: the SCC itself) with the acceptor's base
//! labels at the leaves. Reducibility between two acceptors is decided by
//! [`crate::poset::preceq`] on their invariants.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::automaton::{
    parse_automaton, Automaton, ParseError, Product, ProductError, ReachabilityMatrix,
    UltimatelyPeriodicWord, WordError,
};
use crate::cycles::{
    all_cycles, subset_table_to_cycles, AcceptorEntries, Cycle, CycleSet, LabelingError,
};
use crate::poset::{normalize, preceq, Label, LabeledPoset, PointedPoset, PosetError};

/// An automaton together with a total labeling of its cycles by `0..k-1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MullerKAcceptor {
    automaton: Automaton,
    k: u32,
    cycles: CycleSet,
    labeling: BTreeMap<Cycle, u32>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AcceptorError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("unlabeled cycle {{{0}}}")]
    UnlabeledCycle(String),
    #[error("labeling entry {{{0}}} is not a cycle of the automaton")]
    NotACycle(String),
    #[error("label {label} out of range for k={k}")]
    LabelOutOfRange { label: u32, k: u32 },
}

/// Errors from reading an acceptor out of an automaton file.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AcceptorFileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("file has no acceptor labeling section")]
    NoLabeling,
    #[error(transparent)]
    Labeling(#[from] LabelingError),
    #[error(transparent)]
    Acceptor(#[from] AcceptorError),
}

impl MullerKAcceptor {
    /// Validates that the labeling domain is exactly the cycle set of the
    /// automaton and that every label is below `k`.
    pub fn new(
        automaton: Automaton,
        k: u32,
        labeling: BTreeMap<Cycle, u32>,
    ) -> Result<Self, AcceptorError> {
        if k == 0 {
            return Err(AcceptorError::ZeroK);
        }
        let cycles = all_cycles(&automaton);
        for (cycle, &label) in &labeling {
            if !cycles.contains(cycle) {
                return Err(AcceptorError::NotACycle(cycle.to_string()));
            }
            if label >= k {
                return Err(AcceptorError::LabelOutOfRange { label, k });
            }
        }
        for cycle in &cycles {
            if !labeling.contains_key(cycle) {
                return Err(AcceptorError::UnlabeledCycle(cycle.to_string()));
            }
        }
        Ok(MullerKAcceptor {
            automaton,
            k,
            cycles,
            labeling,
        })
    }

    /// Read an acceptor from automaton file text with a labeling section
    /// (either format). Returns warnings for dropped subset entries.
    pub fn from_file(text: &str, strict: bool) -> Result<(Self, Vec<String>), AcceptorFileError> {
        let parsed = parse_automaton(text)?;
        let section = parsed.acceptor.ok_or(AcceptorFileError::NoLabeling)?;
        let automaton = parsed.automaton;
        match section.entries {
            AcceptorEntries::Cycles(entries) => {
                let labeling: BTreeMap<Cycle, u32> = entries
                    .into_iter()
                    .map(|(ids, label)| (Cycle::new(ids), label))
                    .collect();
                let acceptor = MullerKAcceptor::new(automaton, section.k, labeling)?;
                Ok((acceptor, Vec::new()))
            }
            AcceptorEntries::Subsets(entries) => {
                let labeled = subset_table_to_cycles(&automaton, &entries, strict)?;
                let acceptor = MullerKAcceptor::new(automaton, section.k, labeled.map)?;
                Ok((acceptor, labeled.warnings))
            }
        }
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn cycles(&self) -> &CycleSet {
        &self.cycles
    }

    pub fn label_of(&self, cycle: &Cycle) -> Option<u32> {
        self.labeling.get(cycle).copied()
    }

    pub fn labeling(&self) -> &BTreeMap<Cycle, u32> {
        &self.labeling
    }

    /// The partition value of an ultimately periodic word: the label of the
    /// infinity set of its run.
    pub fn word_label(&self, word: &UltimatelyPeriodicWord) -> Result<u32, WordError> {
        let infinity = Cycle::new(self.automaton.run_eval(word)?);
        Ok(*self
            .labeling
            .get(&infinity)
            .expect("infinity set of a run is always a cycle"))
    }

    /// Serialize as an automaton file with a compact cycle-list section.
    pub fn to_file_string(&self) -> String {
        let mut out = self.automaton.to_file_string();
        out.push_str(&format!("k: {}\n", self.k));
        for (cycle, label) in &self.labeling {
            out.push_str(&format!("cycle: {cycle} -> {label}\n"));
        }
        out
    }
}

/// Cycle order `≤₀`: some (equivalently, every) state of `d` is reachable
/// from some state of `c`.
pub fn leq0(c: &Cycle, d: &Cycle, reach: &ReachabilityMatrix) -> bool {
    c.states()
        .iter()
        .any(|&p| d.states().iter().any(|&q| reach.reaches(p, q)))
}

/// Cycle order `≤₁`: reverse inclusion, `c ⊇ d`.
pub fn leq1(c: &Cycle, d: &Cycle) -> bool {
    c.is_superset_of(d)
}

/// The iterated-poset invariant of an acceptor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Invariant {
    poset: LabeledPoset,
    /// State set of the SCC behind each outer node, parallel to node ids.
    scc_states: Vec<Vec<usize>>,
}

impl Invariant {
    pub fn poset(&self) -> &LabeledPoset {
        &self.poset
    }

    pub fn scc_states(&self) -> &[Vec<usize>] {
        &self.scc_states
    }
}

/// Build the invariant: outer nodes are the reachable SCCs that are cycles
/// (transient singletons host no cycle and are dropped), ordered by
/// condensation reachability; each node is labeled with the pointed poset
/// of the cycles inside that SCC under reverse inclusion, the SCC itself
/// being the least element.
pub fn build_invariant(acceptor: &MullerKAcceptor) -> Invariant {
    let automaton = acceptor.automaton();
    let scc = automaton.tarjan_scc();
    let adj = automaton.successor_sets();

    let cycle_sccs: Vec<usize> = (0..scc.len())
        .filter(|&ci| {
            let comp = &scc.components()[ci];
            comp.len() >= 2 || adj[comp[0]].contains(&comp[0])
        })
        .collect();
    debug_assert!(!cycle_sccs.is_empty(), "a complete automaton always loops");

    let mut outer_labels = Vec::with_capacity(cycle_sccs.len());
    let mut scc_states = Vec::with_capacity(cycle_sccs.len());
    for &ci in &cycle_sccs {
        let comp = &scc.components()[ci];
        let members: Vec<&Cycle> = acceptor
            .cycles()
            .iter()
            .filter(|c| c.states().iter().all(|s| comp.binary_search(s).is_ok()))
            .collect();
        let labels: Vec<Label> = members
            .iter()
            .map(|c| {
                Label::Base(
                    acceptor
                        .label_of(c)
                        .expect("acceptor labeling is total over its cycles"),
                )
            })
            .collect();
        let mut relation = Vec::new();
        for (i, c) in members.iter().enumerate() {
            for (j, d) in members.iter().enumerate() {
                if i != j && leq1(c, d) {
                    relation.push((i, j));
                }
            }
        }
        let inner = normalize(labels, &relation).expect("reverse inclusion is a partial order");
        let pointed = match PointedPoset::new(inner) {
            Ok(p) => p,
            Err(PosetError::NoUniqueMinimum) => {
                unreachable!("the SCC is the unique inclusion-largest cycle")
            }
            Err(e) => unreachable!("inner poset construction failed: {e}"),
        };
        outer_labels.push(Label::Nested(pointed));
        scc_states.push(comp.clone());
    }

    let mut outer_relation = Vec::new();
    for (i, &ci) in cycle_sccs.iter().enumerate() {
        for (j, &cj) in cycle_sccs.iter().enumerate() {
            if i != j && scc.reaches(ci, cj) {
                outer_relation.push((i, j));
            }
        }
    }
    let poset = normalize(outer_labels, &outer_relation)
        .expect("condensation reachability is a partial order");
    Invariant { poset, scc_states }
}

/// Decide `L(m1) ≤_W L(m2)` by comparing the invariants; the acceptors may
/// be over different alphabets.
pub fn decide_wadge_leq(m1: &MullerKAcceptor, m2: &MullerKAcceptor) -> bool {
    preceq(build_invariant(m1).poset(), build_invariant(m2).poset())
}

/// The four outcomes of comparing both directions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WadgeRelation {
    Lt,
    Gt,
    Eq,
    Incomparable,
}

impl WadgeRelation {
    /// Whether the forward reduction `L(m1) ≤_W L(m2)` holds.
    pub fn forward_holds(self) -> bool {
        matches!(self, WadgeRelation::Lt | WadgeRelation::Eq)
    }
}

impl fmt::Display for WadgeRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WadgeRelation::Lt => "LT",
            WadgeRelation::Gt => "GT",
            WadgeRelation::Eq => "EQ",
            WadgeRelation::Incomparable => "INCOMPARABLE",
        };
        f.write_str(s)
    }
}

/// Compare both directions.
pub fn classify(m1: &MullerKAcceptor, m2: &MullerKAcceptor) -> WadgeRelation {
    let forward = decide_wadge_leq(m1, m2);
    let backward = decide_wadge_leq(m2, m1);
    match (forward, backward) {
        (true, true) => WadgeRelation::Eq,
        (true, false) => WadgeRelation::Lt,
        (false, true) => WadgeRelation::Gt,
        (false, false) => WadgeRelation::Incomparable,
    }
}

/// Label the product of `m`'s automaton with `a` by first projection; the
/// result recognizes the same k-partition as `m`.
pub fn product_acceptor(
    m: &MullerKAcceptor,
    a: &Automaton,
) -> Result<MullerKAcceptor, ProductError> {
    let Product { automaton, pairs } = m.automaton().product(a)?;
    let cycles = all_cycles(&automaton);
    let labeling: BTreeMap<Cycle, u32> = cycles
        .iter()
        .map(|c| {
            let projected = Cycle::new(c.states().iter().map(|&s| pairs[s].0));
            let label = m
                .label_of(&projected)
                .expect("projection of a product cycle is a cycle of the left factor");
            (c.clone(), label)
        })
        .collect();
    Ok(MullerKAcceptor::new(automaton, m.k(), labeling)
        .expect("product labeling is total by construction"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{acceptor_text, E2, EOC};

    fn acceptor(text: &str) -> MullerKAcceptor {
        MullerKAcceptor::from_file(text, false).unwrap().0
    }

    fn e2_acceptor() -> MullerKAcceptor {
        acceptor(&acceptor_text(E2, 2, &[("0", 0), ("1", 1), ("0 1", 0)]))
    }

    fn eoc_open() -> MullerKAcceptor {
        acceptor(&acceptor_text(EOC, 2, &[("0", 0), ("1", 1)]))
    }

    fn eoc_closed() -> MullerKAcceptor {
        acceptor(&acceptor_text(EOC, 2, &[("0", 1), ("1", 0)]))
    }

    fn constant_zero() -> MullerKAcceptor {
        acceptor(&acceptor_text(EOC, 2, &[("0", 0), ("1", 0)]))
    }

    #[test]
    fn leq0_examples() {
        let a = crate::automaton::parse_automaton(EOC).unwrap().automaton;
        let reach = a.reachability_matrix();
        let c0 = Cycle::new([0]);
        let c1 = Cycle::new([1]);
        assert!(leq0(&c0, &c0, &reach));
        assert!(leq0(&c0, &c1, &reach));
        assert!(!leq0(&c1, &c0, &reach));

        let e2 = crate::automaton::parse_automaton(E2).unwrap().automaton;
        let reach = e2.reachability_matrix();
        assert!(leq0(&c0, &c1, &reach) && leq0(&c1, &c0, &reach));
    }

    #[test]
    fn leq1_examples() {
        let c01 = Cycle::new([0, 1]);
        let c1 = Cycle::new([1]);
        assert!(leq1(&c01, &c1));
        assert!(!leq1(&c1, &c01));
        assert!(leq1(&c1, &c1));
    }

    #[test]
    fn invariant_of_e2() {
        let inv = build_invariant(&e2_acceptor());
        let p = inv.poset();
        assert_eq!(p.len(), 1);
        match p.label(0) {
            Label::Nested(pp) => {
                let inner = pp.poset();
                assert_eq!(inner.len(), 3);
                // Canonical cycle order: {0}, {0,1}, {1}; least is {0,1}.
                assert_eq!(pp.least(), 1);
                assert_eq!(inner.label(0), &Label::Base(0));
                assert_eq!(inner.label(1), &Label::Base(0));
                assert_eq!(inner.label(2), &Label::Base(1));
                assert_eq!(inner.covers(1), &[0, 2]);
            }
            other => panic!("expected nested label, got {other:?}"),
        }
        assert_eq!(inv.scc_states(), &[vec![0, 1]]);
    }

    #[test]
    fn invariant_of_eoc() {
        let inv = build_invariant(&eoc_open());
        let p = inv.poset();
        assert_eq!(p.len(), 2);
        assert_eq!(p.covers(0), &[1]);
        for (node, want) in [(0, 0u32), (1, 1u32)] {
            match p.label(node) {
                Label::Nested(pp) => {
                    assert_eq!(pp.poset().len(), 1);
                    assert_eq!(pp.poset().label(0), &Label::Base(want));
                }
                other => panic!("expected nested label, got {other:?}"),
            }
        }
    }

    #[test]
    fn invariant_of_trivial_acceptor() {
        let one = "alphabet: a\nstates: 1\ninitial: 0\ntrans: 0 a 0\nk: 1\ncycle: 0 -> 0\n";
        let inv = build_invariant(&acceptor(one));
        assert_eq!(inv.poset().len(), 1);
    }

    #[test]
    fn transient_singleton_scc_is_dropped() {
        // State 0 has no self-loop and cannot return: not a cycle SCC.
        let text = "alphabet: a b\nstates: 2\ninitial: 0\ntrans: 0 a 1\ntrans: 0 b 1\n\
                    trans: 1 a 1\ntrans: 1 b 1\nk: 1\ncycle: 1 -> 0\n";
        let inv = build_invariant(&acceptor(text));
        assert_eq!(inv.poset().len(), 1);
        assert_eq!(inv.scc_states(), &[vec![1]]);
    }

    #[test]
    fn decide_reflexive() {
        let m = e2_acceptor();
        assert!(decide_wadge_leq(&m, &m));
    }

    #[test]
    fn open_closed_incomparable() {
        let open = eoc_open();
        let closed = eoc_closed();
        assert!(!decide_wadge_leq(&open, &closed));
        assert!(!decide_wadge_leq(&closed, &open));
        assert_eq!(classify(&open, &closed), WadgeRelation::Incomparable);

        // Same verdict through the morphism oracle on the unfolded
        // invariants.
        let inv_open = build_invariant(&open);
        let inv_closed = build_invariant(&closed);
        let u_open = crate::poset::unfold(inv_open.poset()).unwrap();
        let u_closed = crate::poset::unfold(inv_closed.poset()).unwrap();
        assert!(!crate::poset::h_leq_bruteforce(u_open.as_poset(), u_closed.as_poset()).unwrap());
        assert!(!crate::poset::h_leq_bruteforce(u_closed.as_poset(), u_open.as_poset()).unwrap());
    }

    #[test]
    fn constant_below_open() {
        let constant = constant_zero();
        let open = eoc_open();
        assert!(decide_wadge_leq(&constant, &open));
        assert!(!decide_wadge_leq(&open, &constant));
        assert_eq!(classify(&constant, &open), WadgeRelation::Lt);
        assert_eq!(classify(&constant, &constant), WadgeRelation::Eq);
    }

    /// The bottom of the classical hierarchy: open and closed sets sit
    /// strictly below the "infinitely often" sets, and the two
    /// infinitely-often partitions are equivalent to each other.
    #[test]
    fn classical_hierarchy_ladder() {
        // Over E2, state 1 means "last letter was a", so labeling {1} and
        // {0,1} with 1 recognizes "infinitely many a".
        let inf_a = acceptor(&acceptor_text(E2, 2, &[("0", 0), ("1", 1), ("0 1", 1)]));
        let inf_b = acceptor(&acceptor_text(E2, 2, &[("0", 1), ("1", 0), ("0 1", 1)]));
        let open = eoc_open();
        let closed = eoc_closed();

        assert_eq!(classify(&open, &inf_a), WadgeRelation::Lt);
        assert_eq!(classify(&closed, &inf_a), WadgeRelation::Lt);
        assert_eq!(classify(&inf_a, &inf_b), WadgeRelation::Eq);
        assert_eq!(classify(&inf_a, &open), WadgeRelation::Gt);
    }

    #[test]
    fn acceptor_validation_errors() {
        let a = crate::automaton::parse_automaton(E2).unwrap().automaton;
        let mut labeling = BTreeMap::new();
        labeling.insert(Cycle::new([0]), 0u32);
        labeling.insert(Cycle::new([1]), 1u32);
        assert_eq!(
            MullerKAcceptor::new(a.clone(), 2, labeling.clone()).unwrap_err(),
            AcceptorError::UnlabeledCycle("0 1".to_string())
        );
        labeling.insert(Cycle::new([0, 1]), 5u32);
        assert_eq!(
            MullerKAcceptor::new(a.clone(), 2, labeling.clone()).unwrap_err(),
            AcceptorError::LabelOutOfRange { label: 5, k: 2 }
        );
        labeling.insert(Cycle::new([0, 1]), 0u32);
        assert!(MullerKAcceptor::new(a.clone(), 2, labeling.clone()).is_ok());
        labeling.insert(Cycle::new([0]), 0u32);
        let eoc = crate::automaton::parse_automaton(EOC).unwrap().automaton;
        assert_eq!(
            MullerKAcceptor::new(eoc, 2, labeling).unwrap_err(),
            AcceptorError::NotACycle("0 1".to_string())
        );
    }

    #[test]
    fn acceptor_round_trip() {
        let m = e2_acceptor();
        let (again, warnings) = MullerKAcceptor::from_file(&m.to_file_string(), false).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(m, again);
    }

    #[test]
    fn word_labels() {
        let m = e2_acceptor();
        let w = UltimatelyPeriodicWord::new(Vec::<String>::new(), ["a", "b"]).unwrap();
        assert_eq!(m.word_label(&w).unwrap(), 0);
        let w = UltimatelyPeriodicWord::new(["b"], ["a"]).unwrap();
        assert_eq!(m.word_label(&w).unwrap(), 1);
    }

    #[test]
    fn product_acceptor_is_equivalent() {
        let m = eoc_open();
        let e2 = crate::automaton::parse_automaton(E2).unwrap().automaton;
        let prod = product_acceptor(&m, &e2).unwrap();
        assert_eq!(classify(&m, &prod), WadgeRelation::Eq);
        let w = UltimatelyPeriodicWord::new(["a"], ["b", "a"]).unwrap();
        assert_eq!(m.word_label(&w).unwrap(), prod.word_label(&w).unwrap());
    }
}
