//! Independent reference implementations used to cross-check the main
//! algorithms, kept deliberately naive: direct recursions and exhaustive
//! scans with no sharing of code or intermediate results.

use crate::forcing::PiSentence;
use crate::seq::Seq;
use crate::tree::FinTree;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Height of the tree below `s`: zero at childless nodes, otherwise one
/// more than the tallest child. Recomputed from scratch on every call.
pub fn height_below(t: &FinTree, s: &Seq) -> u64 {
    t.children(s)
        .iter()
        .map(|c| 1 + height_below(t, c))
        .max()
        .unwrap_or(0)
}

/// Every tree shape with at most `max_nodes` nodes, entries below
/// `max_entry`, in a canonical order. Children of a node always use an
/// initial segment of entries, which picks one representative per shape
/// up to sibling renaming.
pub fn all_trees(max_nodes: usize, max_entry: u32) -> Vec<FinTree> {
    let mut out = Vec::new();
    let mut nodes = vec![Seq::empty()];
    grow(&mut nodes, max_nodes, max_entry, &mut out);
    out
}

fn grow(nodes: &mut Vec<Seq>, max_nodes: usize, max_entry: u32, out: &mut Vec<FinTree>) {
    out.push(FinTree::new(nodes.iter().cloned()).expect("prefix-closed by construction"));
    if nodes.len() >= max_nodes {
        return;
    }
    // Extend at the lexicographically last node only, by the next unused
    // sibling index, so each shape is produced exactly once.
    let frontier: Vec<Seq> = nodes.clone();
    for s in frontier {
        let used = nodes.iter().filter(|t| t.parent().as_ref() == Some(&s)).count() as u32;
        if used >= max_entry {
            continue;
        }
        let child = s.child(used);
        if nodes.iter().any(|t| child.is_prefix_of(t)) {
            continue;
        }
        if nodes.last().map(|t| child > *t) != Some(true) {
            continue;
        }
        nodes.push(child.clone());
        grow(nodes, max_nodes, max_entry, out);
        nodes.pop();
    }
}

/// A random tree with at most `max_nodes` nodes: repeatedly attach a new
/// child to a random existing node.
pub fn random_tree(rng: &mut ChaCha8Rng, max_nodes: usize, max_entry: u32) -> FinTree {
    let target = rng.gen_range(1..=max_nodes);
    let mut nodes: Vec<Seq> = vec![Seq::empty()];
    while nodes.len() < target {
        let parent = nodes.choose(rng).expect("nonempty").clone();
        let used: BTreeSet<u32> = nodes
            .iter()
            .filter_map(|t| {
                (t.parent().as_ref() == Some(&parent)).then(|| *t.0.last().expect("child"))
            })
            .collect();
        let free = (0..max_entry).find(|n| !used.contains(n));
        if let Some(n) = free {
            nodes.push(parent.child(n));
        }
    }
    FinTree::new(nodes).expect("grown prefix-closed")
}

/// A random prefix-closed scheme of coordinate pairs: a tree of pairs
/// grown level by level with the given branching cap and exact depth
/// for surviving branches.
pub fn random_pair_scheme(
    rng: &mut ChaCha8Rng,
    branching: u32,
    depth: u32,
) -> Vec<(Seq, Seq)> {
    let mut out = vec![(Seq::empty(), Seq::empty())];
    let mut level = vec![(Seq::empty(), Seq::empty())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (u, t) in &level {
            for n in 0..branching {
                for k in 0..branching {
                    if rng.gen_bool(0.4) {
                        next.push((u.child(n), t.child(k)));
                    }
                }
            }
        }
        // Keep the scheme alive: guarantee at least one extension of some
        // surviving node so the final depth is reached.
        if next.is_empty() {
            let (u, t) = level[rng.gen_range(0..level.len())].clone();
            next.push((u.child(0), t.child(0)));
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Satisfying models of a sentence as bitmasks over `2^kappa` subsets,
/// computed by the textbook recursion on sets of models.
pub fn pi_models(sentence: &PiSentence, kappa: u32) -> BTreeSet<u32> {
    let all: BTreeSet<u32> = (0..1u32 << kappa).collect();
    match sentence {
        PiSentence::Atom(k) => all.into_iter().filter(|m| m & (1 << k) != 0).collect(),
        PiSentence::BigAndNeg(members) => {
            let mut out = all;
            for m in members {
                let sat = pi_models(m, kappa);
                out.retain(|y| !sat.contains(y));
            }
            out
        }
    }
}

/// The subalgebra of the powerset of `atoms` points generated by `c`:
/// close under complement, meet, and join until nothing changes.
pub fn generated_subalgebra(atoms: u32, c: &BTreeSet<u64>) -> BTreeSet<u64> {
    let full = if atoms == 64 { u64::MAX } else { (1 << atoms) - 1 };
    let mut out: BTreeSet<u64> = c.clone();
    out.insert(0);
    out.insert(full);
    loop {
        let mut grown = out.clone();
        for &a in &out {
            grown.insert(full & !a);
            for &b in &out {
                grown.insert(a & b);
                grown.insert(a | b);
            }
        }
        if grown == out {
            return out;
        }
        out = grown;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq;
    use rand::SeedableRng;

    #[test]
    fn height_matches_hand_counts() {
        let t = FinTree::new([Seq::empty(), seq![0], seq![0, 0], seq![1]]).unwrap();
        assert_eq!(height_below(&t, &Seq::empty()), 2);
        assert_eq!(height_below(&t, &seq![0]), 1);
        assert_eq!(height_below(&t, &seq![1]), 0);
    }

    #[test]
    fn shape_counts_are_the_catalan_numbers_when_unbounded() {
        // With entry bound >= node bound the catalogue realizes every
        // ordered tree shape, counted by the Catalan numbers.
        let trees = all_trees(7, 7);
        let mut by_size = [0usize; 8];
        for t in &trees {
            by_size[t.len()] += 1;
        }
        assert_eq!(&by_size[1..], &[1, 1, 2, 5, 14, 42, 132]);
        let six: Vec<_> = trees.into_iter().filter(|t| t.len() <= 6).collect();
        assert_eq!(six.len(), 65);
        let distinct: BTreeSet<Vec<Seq>> =
            six.iter().map(|t| t.nodes().iter().cloned().collect()).collect();
        assert_eq!(distinct.len(), six.len());
    }

    #[test]
    fn random_trees_are_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = random_tree(&mut rng, 30, 4);
            assert!(t.len() <= 30);
            assert!(t.nodes().iter().all(|s| s.0.iter().all(|&e| e < 4)));
        }
    }

    #[test]
    fn pi_models_of_small_sentences() {
        let theta = PiSentence::BigAndNeg(vec![PiSentence::Atom(0)]);
        let sat = pi_models(&theta, 2);
        assert_eq!(sat, [0b00, 0b10].into_iter().collect());
        let atom = PiSentence::Atom(1);
        assert_eq!(pi_models(&atom, 2), [0b10, 0b11].into_iter().collect());
    }

    #[test]
    fn subalgebra_of_one_atom_set() {
        let c: BTreeSet<u64> = [0b0011].into_iter().collect();
        let alg = generated_subalgebra(4, &c);
        assert_eq!(alg, [0b0000, 0b0011, 0b1100, 0b1111].into_iter().collect());
    }
}
