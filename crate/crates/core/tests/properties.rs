//! Cross-module invariants on seeded random fixtures.
//!
//! These stay deliberately smaller than the acceptance suite; they are the
//! fast regression net for the laws connecting automata, cycles, posets
//! and invariants.

use std::collections::BTreeSet;

use wadgekit_core::cycles::{all_cycles, all_cycles_bruteforce, is_cycle, Cycle};
use wadgekit_core::harness::{
    gen_acceptor, gen_automaton, gen_forest, gen_poset, gen_word, GenConfig, SplitMix64,
};
use wadgekit_core::poset::{
    disjoint_union, h_leq_bruteforce, preceq, preceq_with_stats, unfold, Forest, Label,
    LabeledPoset,
};
use wadgekit_core::wadge::{
    build_invariant, classify, decide_wadge_leq, leq0, leq1, product_acceptor, WadgeRelation,
};
use wadgekit_core::UltimatelyPeriodicWord;

fn automaton_cfg(seed: u64, max_states: usize, alphabet: usize) -> GenConfig {
    GenConfig {
        seed,
        states: (1, max_states),
        alphabet_size: alphabet,
        ..GenConfig::default()
    }
}

fn poset_cfg(seed: u64, max_nodes: usize, k: u32, depth: u32) -> GenConfig {
    GenConfig {
        seed,
        nodes: (1, max_nodes),
        k,
        depth,
        ..GenConfig::default()
    }
}

#[test]
fn run_infinity_sets_are_cycles() {
    for seed in 0..60 {
        let a = gen_automaton(&automaton_cfg(seed, 6, 2));
        let cycles = all_cycles(&a);
        let mut rng = SplitMix64::new(seed ^ 0xABCD);
        for _ in 0..20 {
            let w = gen_word(&mut rng, a.alphabet(), 4, 4);
            let infinity = Cycle::new(a.run_eval(&w).unwrap());
            assert!(cycles.contains(&infinity), "{infinity} not in C_M");
        }
    }
}

#[test]
fn product_projects_componentwise() {
    for seed in 0..40 {
        let a1 = gen_automaton(&automaton_cfg(seed, 4, 2));
        let a2 = gen_automaton(&automaton_cfg(seed ^ 0x5555, 4, 2));
        let prod = a1.product(&a2).unwrap();
        let mut rng = SplitMix64::new(seed ^ 0x77);
        for _ in 0..10 {
            let w = gen_word(&mut rng, a1.alphabet(), 3, 3);
            let joint = prod.automaton.run_eval(&w).unwrap();
            let left: BTreeSet<usize> = joint.iter().map(|&s| prod.pairs[s].0).collect();
            let right: BTreeSet<usize> = joint.iter().map(|&s| prod.pairs[s].1).collect();
            assert_eq!(left, a1.run_eval(&w).unwrap());
            assert_eq!(right, a2.run_eval(&w).unwrap());
        }
    }
}

#[test]
fn matrix_agrees_with_per_state_reachability() {
    for seed in 0..40 {
        let a = gen_automaton(&automaton_cfg(seed, 6, 2));
        let matrix = a.reachability_matrix();
        for p in 0..a.state_count() {
            let from_bfs = a.reachable_from(p);
            for q in 0..a.state_count() {
                assert_eq!(matrix.reaches(p, q), from_bfs.contains(&q));
            }
        }
    }
}

#[test]
fn sccs_refine_mutual_reachability() {
    for seed in 0..40 {
        let a = gen_automaton(&automaton_cfg(seed, 7, 2));
        let matrix = a.reachability_matrix();
        let scc = a.tarjan_scc();
        let reachable: Vec<usize> = a.reachable_states().into_iter().collect();
        for &p in &reachable {
            for &q in &reachable {
                let together = scc.component_of(p) == scc.component_of(q);
                let mutual = matrix.reaches(p, q) && matrix.reaches(q, p);
                assert_eq!(together, mutual, "states {p},{q}");
            }
        }
    }
}

#[test]
fn merged_cycles_match_bruteforce_quick() {
    for seed in 0..60 {
        let a = gen_automaton(&automaton_cfg(seed, 8, 3));
        assert_eq!(
            all_cycles(&a),
            all_cycles_bruteforce(&a).unwrap(),
            "mismatch at seed {seed}"
        );
    }
    // A thinner pass at the full 12-state oracle range.
    for seed in 0..30 {
        let a = gen_automaton(&automaton_cfg(seed ^ 0xDEAD, 12, 2));
        assert_eq!(
            all_cycles(&a),
            all_cycles_bruteforce(&a).unwrap(),
            "mismatch at seed {seed}"
        );
    }
}

#[test]
fn merged_cycles_are_sound() {
    for seed in 0..40 {
        let a = gen_automaton(&automaton_cfg(seed, 7, 2));
        for c in &all_cycles(&a) {
            assert!(is_cycle(&a, c.states()));
        }
    }
}

#[test]
fn overlapping_cycles_in_one_scc_union() {
    for seed in 0..40 {
        let a = gen_automaton(&automaton_cfg(seed, 7, 2));
        let cycles = all_cycles(&a);
        let scc = a.tarjan_scc();
        let list: Vec<&Cycle> = cycles.iter().collect();
        for c in &list {
            for d in &list {
                let same_scc = scc.component_of(c.states()[0]) == scc.component_of(d.states()[0]);
                let share = c.states().iter().any(|s| d.contains(*s));
                if same_scc && share {
                    let union = Cycle::new(c.states().iter().chain(d.states()).copied());
                    assert!(cycles.contains(&union), "missing union {union}");
                }
            }
        }
    }
}

#[test]
fn cycle_bearing_sccs_are_cycles() {
    for seed in 0..40 {
        let a = gen_automaton(&automaton_cfg(seed, 7, 2));
        let cycles = all_cycles(&a);
        let adj = a.successor_sets();
        for comp in a.tarjan_scc().components() {
            let has_edge = comp.len() >= 2 || adj[comp[0]].contains(&comp[0]);
            if has_edge {
                assert!(cycles.contains(&Cycle::new(comp.iter().copied())));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Posets
// ---------------------------------------------------------------------------

/// Endpoint poset node of each forest node of `unfold(p)`, reconstructed
/// from the documented traversal order (minimal nodes and successors are
/// visited in id order, nodes come out in preorder).
fn unfold_endpoints(forest: &Forest, p: &LabeledPoset) -> Vec<usize> {
    let mut endpoints = vec![usize::MAX; forest.len()];
    let mut stack: Vec<(usize, usize)> = Vec::new(); // (forest node, poset node)
    let roots: Vec<usize> = forest.as_poset().minimal_nodes();
    for (root, v) in roots.iter().zip(p.minimal_nodes()) {
        stack.push((*root, v));
    }
    while let Some((f, v)) = stack.pop() {
        endpoints[f] = v;
        let children = forest.as_poset().covers(f);
        let succs = p.covers(v);
        assert_eq!(children.len(), succs.len());
        for (c, w) in children.iter().zip(succs) {
            stack.push((*c, *w));
        }
    }
    endpoints
}

/// Order-insensitive canonical encoding of a sub-forest.
fn canon(forest: &LabeledPoset, node: usize) -> String {
    let mut children: Vec<String> = forest
        .covers(node)
        .iter()
        .map(|&c| canon(forest, c))
        .collect();
    children.sort();
    format!("({:?} [{}])", forest.label(node), children.join(","))
}

#[test]
fn subforests_with_same_endpoint_are_isomorphic() {
    for seed in 0..80 {
        let p = gen_poset(&poset_cfg(seed, 7, 2, 0));
        let f = unfold(&p).unwrap();
        let endpoints = unfold_endpoints(&f, &p);
        for v in 0..p.len() {
            let mut forms: Vec<String> = (0..f.len())
                .filter(|&x| endpoints[x] == v)
                .map(|x| canon(f.as_poset(), x))
                .collect();
            forms.dedup();
            assert!(
                forms.len() <= 1,
                "seed {seed}: node {v} has distinct sub-forests"
            );
        }
    }
}

#[test]
fn unfolding_a_forest_changes_nothing() {
    for seed in 0..60 {
        let f = gen_forest(&poset_cfg(seed, 7, 2, 1));
        let u = unfold(f.as_poset()).unwrap();
        assert_eq!(u.len(), f.len());
        let roots_f: Vec<usize> = f.as_poset().minimal_nodes();
        let roots_u: Vec<usize> = u.as_poset().minimal_nodes();
        let mut forms_f: Vec<String> = roots_f.iter().map(|&r| canon(f.as_poset(), r)).collect();
        let mut forms_u: Vec<String> = roots_u.iter().map(|&r| canon(u.as_poset(), r)).collect();
        forms_f.sort();
        forms_u.sort();
        assert_eq!(forms_f, forms_u);
    }
}

#[test]
fn oracle_agreement_quick() {
    for seed in 0..80 {
        let p = gen_poset(&poset_cfg(seed, 6, 2, 1));
        let r = gen_poset(&poset_cfg(seed ^ 0xBEEF, 6, 2, 1));
        let up = unfold(&p).unwrap();
        let ur = unfold(&r).unwrap();
        let expected = h_leq_bruteforce(up.as_poset(), ur.as_poset()).unwrap();
        assert_eq!(preceq(&p, &r), expected, "seed {seed}");
    }
}

#[test]
fn monotone_weakening() {
    let mut hits = 0;
    for seed in 0..120 {
        let p = gen_poset(&poset_cfg(seed, 5, 2, 0));
        let r = gen_poset(&poset_cfg(seed ^ 0xF00D, 5, 2, 0));
        if h_leq_bruteforce(&p, &r).unwrap() {
            hits += 1;
            assert!(preceq(&p, &r), "seed {seed}: h_leq holds but preceq fails");
        }
    }
    assert!(hits > 0, "the premise never fired");
}

#[test]
fn preceq_is_a_preorder() {
    for seed in 0..50 {
        let a = gen_poset(&poset_cfg(seed, 6, 2, 1));
        let b = gen_poset(&poset_cfg(seed ^ 0x11, 6, 2, 1));
        let c = gen_poset(&poset_cfg(seed ^ 0x22, 6, 2, 1));
        assert!(preceq(&a, &a));
        if preceq(&a, &b) && preceq(&b, &c) {
            assert!(preceq(&a, &c), "seed {seed}: transitivity violated");
        }
    }
}

#[test]
fn disjoint_union_is_supremum() {
    let mut premise_hits = 0;
    for seed in 0..60 {
        let a = gen_poset(&poset_cfg(seed, 4, 2, 0));
        let b = gen_poset(&poset_cfg(seed ^ 0x33, 4, 2, 0));
        let r = gen_poset(&poset_cfg(seed ^ 0x44, 5, 2, 0));
        let u = disjoint_union(&a, &b);
        assert!(preceq(&a, &u) && preceq(&b, &u));
        let split = preceq(&a, &r) && preceq(&b, &r);
        assert_eq!(preceq(&u, &r), split, "seed {seed}");
        if split {
            premise_hits += 1;
        }
    }
    assert!(premise_hits > 0);
}

#[test]
fn decision_table_is_filled_once_per_pair() {
    for seed in 0..40 {
        let p = gen_poset(&poset_cfg(seed, 6, 3, 0));
        let r = gen_poset(&poset_cfg(seed ^ 0x99, 6, 3, 0));
        let (_, stats) = preceq_with_stats(&p, &r);
        assert_eq!(stats.table_fills, p.len() * r.len());
        assert_eq!(stats.nested_evals, 0);
    }
    // With nested labels, distinct label pairs are evaluated exactly once.
    for seed in 0..40 {
        let p = gen_poset(&poset_cfg(seed, 6, 2, 2));
        let r = gen_poset(&poset_cfg(seed ^ 0xAA, 6, 2, 2));
        let (_, stats) = preceq_with_stats(&p, &r);
        assert_eq!(stats.nested_evals, stats.memo_entries);
    }
}

// ---------------------------------------------------------------------------
// Invariants and the decision
// ---------------------------------------------------------------------------

fn acceptor_cfg(seed: u64, k: u32) -> GenConfig {
    GenConfig {
        seed,
        states: (1, 5),
        alphabet_size: 2,
        k,
        ..GenConfig::default()
    }
}

#[test]
fn invariant_nested_labels_partition_cycles() {
    for seed in 0..60 {
        let m = gen_acceptor(&acceptor_cfg(seed, 3));
        let inv = build_invariant(&m);
        let p = inv.poset();
        let mut counted = 0;
        for node in 0..p.len() {
            match p.label(node) {
                Label::Nested(pp) => {
                    counted += pp.poset().len();
                    // Pointedness: the designated least is the unique
                    // minimal node of the nested poset.
                    assert_eq!(pp.poset().minimal_nodes(), vec![pp.least()]);
                }
                Label::Base(_) => panic!("invariant labels must be nested"),
            }
        }
        assert_eq!(counted, m.cycles().len(), "seed {seed}");
    }
}

#[test]
fn invariant_outer_order_matches_leq0() {
    for seed in 0..40 {
        let m = gen_acceptor(&acceptor_cfg(seed, 2));
        let inv = build_invariant(&m);
        let reach = m.automaton().reachability_matrix();
        let sccs = inv.scc_states();
        // Recover the order relation from the cover edges via up-sets.
        let p = inv.poset();
        let mut strictly_below = vec![vec![false; p.len()]; p.len()];
        for (i, below) in strictly_below.iter_mut().enumerate() {
            let mut stack: Vec<usize> = p.covers(i).to_vec();
            while let Some(j) = stack.pop() {
                if !below[j] {
                    below[j] = true;
                    stack.extend_from_slice(p.covers(j));
                }
            }
        }
        for i in 0..p.len() {
            for j in 0..p.len() {
                if i == j {
                    continue;
                }
                let ci = Cycle::new(sccs[i].iter().copied());
                let cj = Cycle::new(sccs[j].iter().copied());
                assert_eq!(strictly_below[i][j], leq0(&ci, &cj, &reach), "seed {seed}");
            }
        }
    }
}

#[test]
fn leq1_is_reverse_inclusion_on_random_cycles() {
    for seed in 0..20 {
        let a = gen_automaton(&automaton_cfg(seed, 6, 2));
        let cycles = all_cycles(&a);
        for c in &cycles {
            for d in &cycles {
                let superset = d.states().iter().all(|s| c.contains(*s));
                assert_eq!(leq1(c, d), superset);
            }
        }
    }
}

#[test]
fn wadge_relation_is_reflexive_and_transitive_quick() {
    for seed in 0..25 {
        let a = gen_acceptor(&acceptor_cfg(seed, 2));
        let b = gen_acceptor(&acceptor_cfg(seed ^ 0x1111, 2));
        let c = gen_acceptor(&acceptor_cfg(seed ^ 0x2222, 2));
        assert!(decide_wadge_leq(&a, &a));
        if decide_wadge_leq(&a, &b) && decide_wadge_leq(&b, &c) {
            assert!(decide_wadge_leq(&a, &c), "seed {seed}");
        }
    }
}

#[test]
fn product_acceptor_preserves_the_partition_quick() {
    for seed in 0..20 {
        let m = gen_acceptor(&acceptor_cfg(seed, 2));
        let a = gen_automaton(&automaton_cfg(seed ^ 0x3333, 3, 2));
        let prod = product_acceptor(&m, &a).unwrap();
        assert_eq!(classify(&m, &prod), WadgeRelation::Eq, "seed {seed}");
        let mut rng = SplitMix64::new(seed ^ 0x4444);
        for _ in 0..10 {
            let w = gen_word(&mut rng, m.automaton().alphabet(), 3, 3);
            assert_eq!(m.word_label(&w).unwrap(), prod.word_label(&w).unwrap());
        }
    }
}

#[test]
fn alphabets_do_not_matter_for_the_decision() {
    // The same partition presented over {a,b} and over {x,y}.
    let over_ab = "alphabet: a b\nstates: 2\ninitial: 0\ntrans: 0 a 0\ntrans: 0 b 1\n\
                   trans: 1 a 1\ntrans: 1 b 1\nk: 2\ncycle: 0 -> 0\ncycle: 1 -> 1\n";
    let over_xy = "alphabet: x y\nstates: 2\ninitial: 0\ntrans: 0 x 0\ntrans: 0 y 1\n\
                   trans: 1 x 1\ntrans: 1 y 1\nk: 2\ncycle: 0 -> 0\ncycle: 1 -> 1\n";
    let m1 = wadgekit_core::MullerKAcceptor::from_file(over_ab, false)
        .unwrap()
        .0;
    let m2 = wadgekit_core::MullerKAcceptor::from_file(over_xy, false)
        .unwrap()
        .0;
    assert_eq!(classify(&m1, &m2), WadgeRelation::Eq);
}

#[test]
fn eval_example_from_the_file_formats() {
    let text = "alphabet: a b\nstates: 2\ninitial: 0\ntrans: 0 a 1\ntrans: 0 b 0\n\
                trans: 1 a 1\ntrans: 1 b 0\nk: 2\ncycle: 0 -> 0\ncycle: 0 1 -> 0\ncycle: 1 -> 1\n";
    let (m, _) = wadgekit_core::MullerKAcceptor::from_file(text, false).unwrap();
    let w = UltimatelyPeriodicWord::new(Vec::<String>::new(), ["a", "b"]).unwrap();
    let infinity = m.automaton().run_eval(&w).unwrap();
    assert_eq!(infinity, BTreeSet::from([0, 1]));
    assert_eq!(m.word_label(&w).unwrap(), 0);
}
