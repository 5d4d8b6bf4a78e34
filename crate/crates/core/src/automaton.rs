//! Complete deterministic automata over a finite alphabet.
//!
//! An [`Automaton`] is a total transition structure with an initial state;
//! acceptance is layered on top by [`crate::wadge::MullerKAcceptor`]. This
//! module also owns the line-based automaton file format and the graph
//! analyses the rest of the crate builds on: reachability, strongly
//! connected components with their condensation order, synchronous
//! products, and run evaluation on ultimately periodic words.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::cycles::{AcceptorEntries, AcceptorSection};

/// An ordered, duplicate-free list of letter names.
///
/// Letter order is fixed at construction and preserved by serialization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    letters: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("alphabet must be nonempty")]
    Empty,
    #[error("letter {0:?} is empty or contains whitespace")]
    BadLetter(String),
    #[error("duplicate letter {0:?}")]
    Duplicate(String),
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(AlphabetError::Empty);
        }
        let mut seen = BTreeSet::new();
        for l in &letters {
            if l.is_empty() || l.chars().any(char::is_whitespace) {
                return Err(AlphabetError::BadLetter(l.clone()));
            }
            if !seen.insert(l.clone()) {
                return Err(AlphabetError::Duplicate(l.clone()));
            }
        }
        Ok(Alphabet { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, i: usize) -> &str {
        &self.letters[i]
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn index_of(&self, letter: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == letter)
    }

    /// Split a word written as text into letters of this alphabet.
    ///
    /// Whitespace- or comma-separated tokens are taken verbatim. As a
    /// convenience for single-character alphabets, a single unseparated
    /// token that is not itself a letter is split character by character.
    pub fn parse_word(&self, text: &str) -> Result<Vec<String>, WordError> {
        let tokens: Vec<&str> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        let mut out = Vec::new();
        for t in tokens {
            if self.index_of(t).is_some() {
                out.push(t.to_string());
            } else if t.chars().all(|c| self.index_of(&c.to_string()).is_some()) {
                out.extend(t.chars().map(|c| c.to_string()));
            } else {
                return Err(WordError::UnknownLetter(t.to_string()));
            }
        }
        Ok(out)
    }
}

/// A word of the form `prefix · period^ω` with a nonempty period.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UltimatelyPeriodicWord {
    prefix: Vec<String>,
    period: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(String),
}

impl UltimatelyPeriodicWord {
    pub fn new<P, Q>(prefix: P, period: Q) -> Result<Self, WordError>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        Q: IntoIterator,
        Q::Item: Into<String>,
    {
        let prefix: Vec<String> = prefix.into_iter().map(Into::into).collect();
        let period: Vec<String> = period.into_iter().map(Into::into).collect();
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        Ok(UltimatelyPeriodicWord { prefix, period })
    }

    pub fn prefix(&self) -> &[String] {
        &self.prefix
    }

    pub fn period(&self) -> &[String] {
        &self.period
    }
}

/// A complete deterministic automaton: every (state, letter) pair has
/// exactly one outgoing transition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Automaton {
    alphabet: Alphabet,
    initial: usize,
    /// `transitions[state][letter_index]` is the successor state.
    transitions: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("automaton must have at least one state")]
    NoStates,
    #[error("initial state {0} out of range")]
    BadInitial(usize),
    #[error("transition row for state {state} has {got} entries, expected {expected}")]
    BadRow {
        state: usize,
        got: usize,
        expected: usize,
    },
    #[error("transition target {target} out of range (state {state})")]
    BadTarget { state: usize, target: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProductError {
    #[error("alphabet mismatch between the two automata")]
    AlphabetMismatch,
}

impl Automaton {
    /// Build from a full transition table; `table[q][x]` is the successor
    /// of state `q` on the alphabet's letter `x`.
    pub fn from_table(
        alphabet: Alphabet,
        initial: usize,
        table: Vec<Vec<usize>>,
    ) -> Result<Self, BuildError> {
        let n = table.len();
        if n == 0 {
            return Err(BuildError::NoStates);
        }
        if initial >= n {
            return Err(BuildError::BadInitial(initial));
        }
        for (state, row) in table.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(BuildError::BadRow {
                    state,
                    got: row.len(),
                    expected: alphabet.len(),
                });
            }
            for &target in row {
                if target >= n {
                    return Err(BuildError::BadTarget { state, target });
                }
            }
        }
        Ok(Automaton {
            alphabet,
            initial,
            transitions: table,
        })
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn step(&self, state: usize, letter: usize) -> usize {
        self.transitions[state][letter]
    }

    /// Deduplicated, sorted successor lists: the automaton viewed as a
    /// simple digraph (letters and parallel edges dropped).
    pub fn successor_sets(&self) -> Vec<Vec<usize>> {
        self.transitions
            .iter()
            .map(|row| {
                let mut t: Vec<usize> = row.clone();
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect()
    }

    /// States reachable from the initial state (always contains it).
    pub fn reachable_states(&self) -> BTreeSet<usize> {
        self.reachable_from(self.initial)
    }

    /// States reachable from `start` by a possibly empty path.
    pub fn reachable_from(&self, start: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(q) = queue.pop_front() {
            for &t in &self.transitions[q] {
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Full reachability relation, reflexive by convention: `(p, q)` holds
    /// iff `q` is reachable from `p` by a possibly empty path.
    pub fn reachability_matrix(&self) -> ReachabilityMatrix {
        let n = self.state_count();
        let rows = (0..n)
            .map(|p| BitSet::from_indices(n, self.reachable_from(p)))
            .collect();
        ReachabilityMatrix { rows }
    }

    /// Strongly connected components of the reachable subgraph, with the
    /// reachability order between components.
    pub fn tarjan_scc(&self) -> SccDecomposition {
        let n = self.state_count();
        let adj = self.successor_sets();
        let reachable: Vec<usize> = self.reachable_states().into_iter().collect();
        let in_scope = BitSet::from_indices(n, reachable.iter().copied());
        let mut raw = tarjan(n, &reachable, &in_scope, &adj);
        for comp in &mut raw {
            comp.sort_unstable();
        }
        raw.sort_by_key(|comp| comp[0]);

        let mut component_of = vec![None; n];
        for (ci, comp) in raw.iter().enumerate() {
            for &q in comp {
                component_of[q] = Some(ci);
            }
        }

        // Condensation edges, then reflexive-transitive closure in
        // reverse topological order.
        let m = raw.len();
        let mut succs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
        for comp in &raw {
            for &q in comp {
                let cq = component_of[q].unwrap();
                for &t in &adj[q] {
                    let ct = component_of[t].unwrap();
                    if ct != cq {
                        succs[cq].insert(ct);
                    }
                }
            }
        }
        let order = topo_order(m, &succs);
        let mut reach: Vec<BitSet> = (0..m).map(|_| BitSet::new(m)).collect();
        for &c in order.iter().rev() {
            let mut row = BitSet::new(m);
            row.insert(c);
            for &s in &succs[c] {
                let other = reach[s].clone();
                row.union_with(&other);
            }
            reach[c] = row;
        }
        SccDecomposition {
            components: raw,
            component_of,
            reach,
        }
    }

    /// Synchronous product restricted to reachable state pairs.
    pub fn product(&self, other: &Automaton) -> Result<Product, ProductError> {
        if self.alphabet != other.alphabet {
            return Err(ProductError::AlphabetMismatch);
        }
        let d = self.alphabet.len();
        let start = (self.initial, other.initial);
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![start];
        index.insert(start, 0);
        let mut table: Vec<Vec<usize>> = Vec::new();
        let mut next = 0;
        while next < pairs.len() {
            let (p, q) = pairs[next];
            let mut row = Vec::with_capacity(d);
            for x in 0..d {
                let t = (self.step(p, x), other.step(q, x));
                let id = *index.entry(t).or_insert_with(|| {
                    pairs.push(t);
                    pairs.len() - 1
                });
                row.push(id);
            }
            table.push(row);
            next += 1;
        }
        let automaton = Automaton::from_table(self.alphabet.clone(), 0, table)
            .expect("product table is total by construction");
        Ok(Product { automaton, pairs })
    }

    /// Infinity set of the unique run on `prefix · period^ω`: simulate the
    /// prefix, then iterate the period recording the state at each period
    /// boundary; the first repeated boundary state closes the loop, and the
    /// result is the set of states visited inside the repeating segment.
    pub fn run_eval(&self, word: &UltimatelyPeriodicWord) -> Result<BTreeSet<usize>, WordError> {
        let to_idx = |letters: &[String]| -> Result<Vec<usize>, WordError> {
            letters
                .iter()
                .map(|l| {
                    self.alphabet
                        .index_of(l)
                        .ok_or_else(|| WordError::UnknownLetter(l.clone()))
                })
                .collect()
        };
        let prefix = to_idx(word.prefix())?;
        let period = to_idx(word.period())?;

        let mut q = self.initial;
        for &x in &prefix {
            q = self.step(q, x);
        }
        let mut boundary_index = vec![None; self.state_count()];
        let mut boundaries = Vec::new();
        loop {
            if let Some(first) = boundary_index[q] {
                let laps = boundaries.len() - first;
                let mut s: usize = boundaries[first];
                let mut infinity = BTreeSet::from([s]);
                for _ in 0..laps {
                    for &x in &period {
                        s = self.step(s, x);
                        infinity.insert(s);
                    }
                }
                debug_assert_eq!(s, boundaries[first]);
                return Ok(infinity);
            }
            boundary_index[q] = Some(boundaries.len());
            boundaries.push(q);
            for &x in &period {
                q = self.step(q, x);
            }
        }
    }

    /// Serialize in the automaton file format, transitions sorted by
    /// (source state, letter index).
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "alphabet: {}\n",
            self.alphabet.letters().join(" ")
        ));
        out.push_str(&format!("states: {}\n", self.state_count()));
        out.push_str(&format!("initial: {}\n", self.initial));
        for (q, row) in self.transitions.iter().enumerate() {
            for (x, &t) in row.iter().enumerate() {
                out.push_str(&format!("trans: {} {} {}\n", q, self.alphabet.letter(x), t));
            }
        }
        out
    }
}

/// Reflexive reachability between states.
#[derive(Clone, Debug)]
pub struct ReachabilityMatrix {
    rows: Vec<BitSet>,
}

impl ReachabilityMatrix {
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.rows[from].contains(to)
    }

    pub fn row(&self, from: usize) -> &BitSet {
        &self.rows[from]
    }
}

/// SCCs of the reachable subgraph, sorted by smallest member state.
#[derive(Clone, Debug)]
pub struct SccDecomposition {
    components: Vec<Vec<usize>>,
    component_of: Vec<Option<usize>>,
    reach: Vec<BitSet>,
}

impl SccDecomposition {
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Component index of a state; `None` for unreachable states.
    pub fn component_of(&self, state: usize) -> Option<usize> {
        self.component_of[state]
    }

    /// Condensation order: component `to` is reachable from `from`
    /// (reflexively).
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.reach[from].contains(to)
    }
}

/// Product automaton together with the pair each product state stands for.
#[derive(Clone, Debug)]
pub struct Product {
    pub automaton: Automaton,
    pub pairs: Vec<(usize, usize)>,
}

fn topo_order(m: usize, succs: &[BTreeSet<usize>]) -> Vec<usize> {
    let mut indeg = vec![0usize; m];
    for s in succs {
        for &t in s {
            indeg[t] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..m).filter(|&c| indeg[c] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(c) = queue.pop_front() {
        order.push(c);
        for &t in &succs[c] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push_back(t);
            }
        }
    }
    debug_assert_eq!(order.len(), m, "condensation must be acyclic");
    order
}

/// Iterative Tarjan over the states listed in `scope`.
fn tarjan(n: usize, scope: &[usize], in_scope: &BitSet, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0;
    let mut comps = Vec::new();

    // Explicit call stack: (vertex, next successor position).
    let mut call: Vec<(usize, usize)> = Vec::new();
    for &root in scope {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while !call.is_empty() {
            let top = call.len() - 1;
            let (v, pos) = call[top];
            if pos < adj[v].len() {
                call[top].1 += 1;
                let w = adj[v][pos];
                if !in_scope.contains(w) {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Result of parsing an automaton file: the automaton plus the acceptor
/// labeling section, when one is present.
#[derive(Clone, Debug)]
pub struct ParsedAutomatonFile {
    pub automaton: Automaton,
    pub acceptor: Option<AcceptorSection>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected `{expected}:` before this line")]
    HeaderOrder { expected: &'static str },
    #[error("duplicate `{0}:` line")]
    DuplicateHeader(&'static str),
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("{0}")]
    Alphabet(AlphabetError),
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("state id {0} out of range")]
    BadState(usize),
    #[error("duplicate transition for state {state} on letter {letter:?}")]
    DuplicateTransition { state: usize, letter: String },
    #[error("missing transition for state {state} on letter {letter:?}")]
    MissingTransition { state: usize, letter: String },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("`{0}:` requires a `k:` line first")]
    LabelBeforeK(&'static str),
    #[error("cycle ids must be strictly increasing")]
    CycleIdsNotIncreasing,
    #[error("duplicate labeling entry")]
    DuplicateEntry,
    #[error("label {label} out of range for k={k}")]
    LabelOutOfRange { label: u32, k: u32 },
    #[error("subset bitstring must have length {expected} (one bit per state)")]
    BadBitstring { expected: usize },
    #[error("mixing `cycle:` and `subset:` entries is not allowed")]
    MixedSections,
    #[error("missing `{0}:` line")]
    MissingHeader(&'static str),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Parse the automaton file format.
///
/// ```text
/// # comment
/// alphabet: a b
/// states: 2
/// initial: 0
/// trans: 0 a 1
/// ...
/// ```
///
/// An optional acceptor section (`k:` followed by `cycle:` or `subset:`
/// lines) is returned alongside; see [`crate::wadge::MullerKAcceptor`].
pub fn parse_automaton(text: &str) -> Result<ParsedAutomatonFile, ParseError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<usize> = None;
    let mut grid: Vec<Vec<Option<usize>>> = Vec::new();
    let mut k: Option<u32> = None;
    let mut entries: Option<AcceptorEntries> = None;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content
            .split_once(':')
            .ok_or_else(|| err(line, ParseErrorKind::Malformed(content.to_string())))?;
        let key = key.trim();
        let rest = rest.trim();
        match key {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateHeader("alphabet")));
                }
                let a = Alphabet::new(rest.split_whitespace().map(str::to_string))
                    .map_err(|e| err(line, ParseErrorKind::Alphabet(e)))?;
                alphabet = Some(a);
            }
            "states" => {
                if alphabet.is_none() {
                    return Err(err(
                        line,
                        ParseErrorKind::HeaderOrder {
                            expected: "alphabet",
                        },
                    ));
                }
                if states.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateHeader("states")));
                }
                let n: usize = rest
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                if n == 0 {
                    return Err(err(
                        line,
                        ParseErrorKind::Malformed("states: 0".to_string()),
                    ));
                }
                grid = vec![vec![None; alphabet.as_ref().unwrap().len()]; n];
                states = Some(n);
            }
            "initial" => {
                if states.is_none() {
                    return Err(err(
                        line,
                        ParseErrorKind::HeaderOrder { expected: "states" },
                    ));
                }
                if initial.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateHeader("initial")));
                }
                let q: usize = rest
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                if q >= states.unwrap() {
                    return Err(err(line, ParseErrorKind::BadState(q)));
                }
                initial = Some(q);
            }
            "trans" => {
                let (alphabet, n) = match (&alphabet, states) {
                    (Some(a), Some(n)) => (a, n),
                    _ => {
                        return Err(err(
                            line,
                            ParseErrorKind::HeaderOrder { expected: "states" },
                        ))
                    }
                };
                if initial.is_none() {
                    return Err(err(
                        line,
                        ParseErrorKind::HeaderOrder {
                            expected: "initial",
                        },
                    ));
                }
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(err(line, ParseErrorKind::Malformed(content.to_string())));
                }
                let from: usize = parts[0]
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                let to: usize = parts[2]
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                if from >= n {
                    return Err(err(line, ParseErrorKind::BadState(from)));
                }
                if to >= n {
                    return Err(err(line, ParseErrorKind::BadState(to)));
                }
                let x = alphabet.index_of(parts[1]).ok_or_else(|| {
                    err(line, ParseErrorKind::UnknownLetter(parts[1].to_string()))
                })?;
                if grid[from][x].is_some() {
                    return Err(err(
                        line,
                        ParseErrorKind::DuplicateTransition {
                            state: from,
                            letter: parts[1].to_string(),
                        },
                    ));
                }
                grid[from][x] = Some(to);
            }
            "k" => {
                if states.is_none() {
                    return Err(err(
                        line,
                        ParseErrorKind::HeaderOrder { expected: "states" },
                    ));
                }
                if k.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateHeader("k")));
                }
                let v: u32 = rest
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                if v == 0 {
                    return Err(err(line, ParseErrorKind::ZeroK));
                }
                k = Some(v);
            }
            "cycle" => {
                let kv = k.ok_or_else(|| err(line, ParseErrorKind::LabelBeforeK("cycle")))?;
                let n = states.unwrap();
                let (ids_text, label_text) = rest
                    .split_once("->")
                    .ok_or_else(|| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                let mut ids = Vec::new();
                for tok in ids_text.split_whitespace() {
                    let id: usize = tok
                        .parse()
                        .map_err(|_| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                    if id >= n {
                        return Err(err(line, ParseErrorKind::BadState(id)));
                    }
                    if let Some(&last) = ids.last() {
                        if id <= last {
                            return Err(err(line, ParseErrorKind::CycleIdsNotIncreasing));
                        }
                    }
                    ids.push(id);
                }
                if ids.is_empty() {
                    return Err(err(line, ParseErrorKind::Malformed(content.to_string())));
                }
                let label: u32 = label_text
                    .trim()
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                if label >= kv {
                    return Err(err(line, ParseErrorKind::LabelOutOfRange { label, k: kv }));
                }
                let list = match entries.get_or_insert_with(|| AcceptorEntries::Cycles(Vec::new()))
                {
                    AcceptorEntries::Cycles(list) => list,
                    AcceptorEntries::Subsets(_) => {
                        return Err(err(line, ParseErrorKind::MixedSections))
                    }
                };
                if list.iter().any(|(existing, _)| *existing == ids) {
                    return Err(err(line, ParseErrorKind::DuplicateEntry));
                }
                list.push((ids, label));
            }
            "subset" => {
                let kv = k.ok_or_else(|| err(line, ParseErrorKind::LabelBeforeK("subset")))?;
                let n = states.unwrap();
                let (bits_text, label_text) = rest
                    .split_once("->")
                    .ok_or_else(|| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                let bits_text = bits_text.trim();
                if bits_text.len() != n || !bits_text.chars().all(|c| c == '0' || c == '1') {
                    return Err(err(line, ParseErrorKind::BadBitstring { expected: n }));
                }
                let set = BitSet::from_indices(
                    n,
                    bits_text
                        .chars()
                        .enumerate()
                        .filter(|(_, c)| *c == '1')
                        .map(|(i, _)| i),
                );
                let label: u32 = label_text
                    .trim()
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::Malformed(content.to_string())))?;
                if label >= kv {
                    return Err(err(line, ParseErrorKind::LabelOutOfRange { label, k: kv }));
                }
                let list = match entries.get_or_insert_with(|| AcceptorEntries::Subsets(Vec::new()))
                {
                    AcceptorEntries::Subsets(list) => list,
                    AcceptorEntries::Cycles(_) => {
                        return Err(err(line, ParseErrorKind::MixedSections))
                    }
                };
                if list.iter().any(|(existing, _)| *existing == set) {
                    return Err(err(line, ParseErrorKind::DuplicateEntry));
                }
                list.push((set, label));
            }
            _ => return Err(err(line, ParseErrorKind::Malformed(content.to_string()))),
        }
    }

    let alphabet =
        alphabet.ok_or_else(|| err(last_line, ParseErrorKind::MissingHeader("alphabet")))?;
    let n = states.ok_or_else(|| err(last_line, ParseErrorKind::MissingHeader("states")))?;
    let initial =
        initial.ok_or_else(|| err(last_line, ParseErrorKind::MissingHeader("initial")))?;
    let mut table = Vec::with_capacity(n);
    for (state, row) in grid.into_iter().enumerate() {
        let mut out = Vec::with_capacity(alphabet.len());
        for (x, cell) in row.into_iter().enumerate() {
            match cell {
                Some(t) => out.push(t),
                None => {
                    return Err(err(
                        last_line,
                        ParseErrorKind::MissingTransition {
                            state,
                            letter: alphabet.letter(x).to_string(),
                        },
                    ))
                }
            }
        }
        table.push(out);
    }
    let automaton =
        Automaton::from_table(alphabet, initial, table).expect("validated during parsing");
    let acceptor = match (k, entries) {
        (Some(k), Some(entries)) => Some(AcceptorSection { k, entries }),
        (Some(k), None) => Some(AcceptorSection {
            k,
            entries: AcceptorEntries::Cycles(Vec::new()),
        }),
        (None, _) => None,
    };
    Ok(ParsedAutomatonFile {
        automaton,
        acceptor,
    })
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_file_string())
    }
}
