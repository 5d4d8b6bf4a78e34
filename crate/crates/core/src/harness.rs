//! Deterministic random generators and the scaling benchmark.
//!
//! Everything here is a pure function of a 64-bit seed, so fixtures are
//! reproducible across runs and across reimplementations in other
//! languages. The generator is SplitMix64 (documented below); bounded
//! draws take the raw output modulo the bound.

use std::time::Instant;

use crate::automaton::{Alphabet, Automaton, UltimatelyPeriodicWord};
use crate::cycles::all_cycles;
use crate::poset::{normalize, preceq, Forest, Label, LabeledPoset, PointedPoset};
use crate::wadge::MullerKAcceptor;

/// SplitMix64: a counter-based pseudorandom generator.
///
/// State update and output, in exact arithmetic mod 2^64:
///
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// output = z ^ (z >> 31)
/// ```
///
/// `below(b)` is `next_u64() % b`, and `split()` seeds an independent
/// stream with `next_u64()`. Any implementation following these rules
/// reproduces the same fixtures from the same seed.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw in `0..bound` by modulo reduction.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    /// Inclusive range draw.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as usize
    }

    /// True with probability `num / den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    /// Derive an independent stream.
    pub fn split(&mut self) -> SplitMix64 {
        SplitMix64::new(self.next_u64())
    }
}

/// Shared knobs for the generators.
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    /// Inclusive state-count range for automata.
    pub states: (usize, usize),
    /// Inclusive node-count range for posets and forests.
    pub nodes: (usize, usize),
    pub alphabet_size: usize,
    pub k: u32,
    /// Label nesting depth, at most 2.
    pub depth: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            states: (1, 6),
            nodes: (1, 7),
            alphabet_size: 2,
            k: 2,
            depth: 1,
        }
    }
}

impl GenConfig {
    fn check(&self) {
        assert!(self.states.0 >= 1 && self.states.0 <= self.states.1);
        assert!(self.nodes.0 >= 1 && self.nodes.0 <= self.nodes.1);
        assert!(self.alphabet_size >= 1 && self.alphabet_size <= 26);
        assert!(self.k >= 1);
        assert!(self.depth <= 2);
    }
}

fn letters(count: usize) -> Alphabet {
    Alphabet::new((0..count).map(|i| ((b'a' + i as u8) as char).to_string()))
        .expect("generated letters are valid")
}

/// A complete deterministic automaton with transitions drawn uniformly per
/// (state, letter); the initial state is 0.
pub fn gen_automaton(cfg: &GenConfig) -> Automaton {
    cfg.check();
    let mut rng = SplitMix64::new(cfg.seed);
    gen_automaton_with(&mut rng, cfg)
}

fn gen_automaton_with(rng: &mut SplitMix64, cfg: &GenConfig) -> Automaton {
    let n = rng.range(cfg.states.0, cfg.states.1);
    let table: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            (0..cfg.alphabet_size)
                .map(|_| rng.below(n as u64) as usize)
                .collect()
        })
        .collect();
    Automaton::from_table(letters(cfg.alphabet_size), 0, table).expect("generated table is total")
}

/// A random acceptor: a generated automaton with every cycle labeled
/// uniformly in `0..k`.
pub fn gen_acceptor(cfg: &GenConfig) -> MullerKAcceptor {
    cfg.check();
    let mut rng = SplitMix64::new(cfg.seed);
    let automaton = gen_automaton_with(&mut rng, cfg);
    let labeling = all_cycles(&automaton)
        .iter()
        .map(|c| (c.clone(), rng.below(cfg.k as u64) as u32))
        .collect();
    MullerKAcceptor::new(automaton, cfg.k, labeling).expect("labeling is total by construction")
}

fn gen_label(rng: &mut SplitMix64, k: u32, depth: u32) -> Label {
    if depth == 0 || rng.chance(1, 2) {
        return Label::Base(rng.below(k as u64) as u32);
    }
    // A pointed block: an explicit least element below a few more nodes.
    let extra = rng.range(1, 3);
    let mut labels = vec![gen_label(rng, k, depth - 1)];
    labels.extend((0..extra).map(|_| gen_label(rng, k, depth - 1)));
    let mut relation: Vec<(usize, usize)> = (1..=extra).map(|i| (0, i)).collect();
    for i in 1..=extra {
        for j in i + 1..=extra {
            if rng.chance(1, 3) {
                relation.push((i, j));
            }
        }
    }
    let poset = normalize(labels, &relation).expect("generated relation is acyclic");
    Label::Nested(PointedPoset::new(poset).expect("node 0 is the explicit least element"))
}

/// A random labeled poset: a random DAG on nodes ordered by id, then
/// normalized; labels are generated recursively to the configured depth.
pub fn gen_poset(cfg: &GenConfig) -> LabeledPoset {
    cfg.check();
    let mut rng = SplitMix64::new(cfg.seed);
    gen_poset_with(&mut rng, cfg)
}

fn gen_poset_with(rng: &mut SplitMix64, cfg: &GenConfig) -> LabeledPoset {
    let n = rng.range(cfg.nodes.0, cfg.nodes.1);
    let labels: Vec<Label> = (0..n)
        .map(|_| gen_label(&mut *rng, cfg.k, cfg.depth))
        .collect();
    // Edge density ~30% for small posets, thinning out for large ones so
    // cover relations stay sparse.
    let (num, den) = if n <= 16 { (3, 10) } else { (3, n as u64) };
    let mut relation = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.chance(num, den) {
                relation.push((i, j));
            }
        }
    }
    normalize(labels, &relation).expect("edges point up in id order")
}

/// A random forest: every node picks an earlier parent or stays a root.
pub fn gen_forest(cfg: &GenConfig) -> Forest {
    cfg.check();
    let mut rng = SplitMix64::new(cfg.seed);
    let n = rng.range(cfg.nodes.0, cfg.nodes.1);
    let labels: Vec<Label> = (0..n)
        .map(|_| gen_label(&mut rng, cfg.k, cfg.depth))
        .collect();
    let mut relation = Vec::new();
    for i in 1..n {
        if !rng.chance(1, 3) {
            relation.push((rng.below(i as u64) as usize, i));
        }
    }
    let poset = normalize(labels, &relation).expect("parent edges are acyclic");
    Forest::try_new(poset).expect("single-parent construction yields a forest")
}

/// A random ultimately periodic word over `alphabet`.
pub fn gen_word(
    rng: &mut SplitMix64,
    alphabet: &Alphabet,
    max_prefix: usize,
    max_period: usize,
) -> UltimatelyPeriodicWord {
    let d = alphabet.len() as u64;
    let prefix_len = rng.below(max_prefix as u64 + 1) as usize;
    let period_len = rng.range(1, max_period.max(1));
    let prefix: Vec<String> = (0..prefix_len)
        .map(|_| alphabet.letter(rng.below(d) as usize).to_string())
        .collect();
    let period: Vec<String> = (0..period_len)
        .map(|_| alphabet.letter(rng.below(d) as usize).to_string())
        .collect();
    UltimatelyPeriodicWord::new(prefix, period).expect("period is nonempty")
}

/// Benchmark families for the scaling run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    Chain,
    Antichain,
    Random,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Chain, Family::Antichain, Family::Random];
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chain" => Ok(Family::Chain),
            "antichain" => Ok(Family::Antichain),
            "random" => Ok(Family::Random),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Chain => "chain",
            Family::Antichain => "antichain",
            Family::Random => "random",
        };
        f.write_str(s)
    }
}

/// A same-size pair of posets from the given family.
pub fn family_pair(family: Family, size: usize, seed: u64) -> (LabeledPoset, LabeledPoset) {
    assert!(size >= 1);
    match family {
        Family::Chain => {
            let labels: Vec<Label> = (0..size).map(|i| Label::Base((i % 2) as u32)).collect();
            let edges: Vec<(usize, usize)> = (1..size).map(|i| (i - 1, i)).collect();
            let p = normalize(labels, &edges).expect("a chain is acyclic");
            (p.clone(), p)
        }
        Family::Antichain => {
            let labels: Vec<Label> = (0..size).map(|i| Label::Base((i % 2) as u32)).collect();
            let p = normalize(labels, &[]).expect("an antichain is acyclic");
            (p.clone(), p)
        }
        Family::Random => {
            let mut rng = SplitMix64::new(seed);
            let cfg = GenConfig {
                nodes: (size, size),
                k: 2,
                depth: 0,
                ..GenConfig::default()
            };
            let a = gen_poset_with(&mut rng, &cfg);
            let b = gen_poset_with(&mut rng, &cfg);
            (a, b)
        }
    }
}

/// One row of the scaling table.
#[derive(Clone, Debug)]
pub struct TimingRow {
    pub family: Family,
    pub size: usize,
    pub median_ns: u128,
}

/// Time `preceq` on same-size pairs of the family, returning the median
/// wall-clock time over `reps` repetitions per size.
///
/// Repetitions are interleaved across the sizes (round-robin) so that
/// background load hits every size alike instead of skewing their ratio.
pub fn scaling_run(family: Family, sizes: &[usize], reps: usize, seed: u64) -> Vec<TimingRow> {
    assert!(reps >= 1);
    let pairs: Vec<(usize, (LabeledPoset, LabeledPoset))> = sizes
        .iter()
        .map(|&size| (size, family_pair(family, size, seed)))
        .collect();
    // One untimed pass per size to absorb cache and frequency warmup.
    for (_, (p1, p2)) in &pairs {
        std::hint::black_box(preceq(p1, p2));
    }
    let mut samples: Vec<Vec<u128>> = vec![Vec::with_capacity(reps); pairs.len()];
    for _ in 0..reps {
        for (i, (_, (p1, p2))) in pairs.iter().enumerate() {
            let start = Instant::now();
            std::hint::black_box(preceq(p1, p2));
            samples[i].push(start.elapsed().as_nanos());
        }
    }
    pairs
        .iter()
        .zip(&mut samples)
        .map(|(&(size, _), s)| {
            s.sort_unstable();
            TimingRow {
                family,
                size,
                median_ns: s[s.len() / 2],
            }
        })
        .collect()
}

/// Render timing rows as CSV with a `family,size,median_ns` header.
pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("family,size,median_ns\n");
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row.family, row.size, row.median_ns));
    }
    out
}
