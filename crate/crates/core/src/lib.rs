//! Decision algorithms for Wadge reducibility of ω-regular k-partitions.
//!
//! A k-partition of the ω-words over a finite alphabet is represented by a
//! Muller k-acceptor: a complete deterministic automaton plus a labeling of
//! its cycles by `0..k-1`. Reducibility between two such partitions is
//! decided by:
//!
//! 1. computing the cycle set of each automaton ([`cycles`]),
//! 2. folding it into an iterated labeled-poset invariant ([`wadge`]),
//! 3. comparing the two invariants in the unfolding preorder `⪯`, decided
//!    in time proportional to the product of the invariant sizes
//!    ([`poset::preceq`]).
//!
//! Every decision path is paired with an exhaustive oracle
//! ([`cycles::all_cycles_bruteforce`], [`poset::h_leq_bruteforce`]) so the
//! fast algorithms can be cross-checked on small instances, and [`harness`]
//! provides seeded generators for doing so reproducibly.
//!
//! ```
//! use wadgekit_core::automaton::parse_automaton;
//! use wadgekit_core::cycles::all_cycles;
//!
//! let file = "alphabet: a b\nstates: 2\ninitial: 0\n\
//!             trans: 0 a 1\ntrans: 0 b 0\ntrans: 1 a 1\ntrans: 1 b 0\n";
//! let automaton = parse_automaton(file).unwrap().automaton;
//! assert_eq!(all_cycles(&automaton).len(), 3);
//! ```

pub mod automaton;
pub mod bitset;
pub mod cycles;
pub mod harness;
pub mod poset;
pub mod wadge;

pub use automaton::{Alphabet, Automaton, UltimatelyPeriodicWord};
pub use cycles::{Cycle, CycleSet};
pub use poset::{Forest, Label, LabeledPoset, PointedPoset};
pub use wadge::{Invariant, MullerKAcceptor, WadgeRelation};

/// Shared fixtures for the unit-test suites.
#[cfg(test)]
pub(crate) mod fixtures {
    /// Two mutually reachable states: `b` rests at 0, `a` moves to and
    /// stays at 1 until the next `b`.
    pub const E2: &str = "\
alphabet: a b
states: 2
initial: 0
trans: 0 a 1
trans: 0 b 0
trans: 1 a 1
trans: 1 b 0
";

    /// One-way fixture: state 1 is absorbing, so {0} and {1} are the only
    /// cycles and {0} sits strictly below {1}.
    pub const EOC: &str = "\
alphabet: a b
states: 2
initial: 0
trans: 0 a 0
trans: 0 b 1
trans: 1 a 1
trans: 1 b 1
";

    /// Append a compact cycle-list acceptor section to an automaton file.
    pub fn acceptor_text(automaton: &str, k: u32, labels: &[(&str, u32)]) -> String {
        let mut out = String::from(automaton);
        out.push_str(&format!("k: {k}\n"));
        for (ids, label) in labels {
            out.push_str(&format!("cycle: {ids} -> {label}\n"));
        }
        out
    }
}
