//! Level hierarchies inside finite boolean algebras: generated level
//! chains with their stabilization ordinal, the alternating ring closure
//! chain, and quotients of finite fields of sets by ideals.
//!
//! Elements are atom bitmasks. Everything countable in the infinitary
//! versions collapses to "arbitrary subset" here, so stabilization indices
//! are finite surrogates and carry no infinitary meaning.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Largest supported atom count; elements are enumerated explicitly, so
/// the universe of masks must stay small.
pub const MAX_ATOMS: u32 = 16;

/// A boolean algebra of subsets of a finite atom set, not necessarily the
/// full powerset. Elements are bitmasks over the atoms.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "FiniteBARaw", into = "FiniteBARaw")]
pub struct FiniteBA {
    atoms: u32,
    elements: BTreeSet<u64>,
}

#[derive(Serialize, Deserialize)]
struct FiniteBARaw {
    atoms: u32,
    elements: Vec<u64>,
}

impl TryFrom<FiniteBARaw> for FiniteBA {
    type Error = Error;

    fn try_from(raw: FiniteBARaw) -> Result<Self> {
        FiniteBA::new(raw.atoms, raw.elements)
    }
}

impl From<FiniteBA> for FiniteBARaw {
    fn from(b: FiniteBA) -> Self {
        FiniteBARaw { atoms: b.atoms, elements: b.elements.into_iter().collect() }
    }
}

impl FiniteBA {
    pub fn new(atoms: u32, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        if atoms > MAX_ATOMS {
            return Err(Error::InvalidAlgebra(format!("more than {MAX_ATOMS} atoms")));
        }
        let elements: BTreeSet<u64> = elements.into_iter().collect();
        if elements.is_empty() {
            return Err(Error::InvalidAlgebra("no elements".into()));
        }
        let full = full_mask(atoms);
        for &m in &elements {
            if m & !full != 0 {
                return Err(Error::InvalidAlgebra(format!("element {m} outside {atoms} atoms")));
            }
        }
        for &m in &elements {
            if !elements.contains(&(full & !m)) {
                return Err(Error::InvalidAlgebra(format!("complement of {m} missing")));
            }
            for &n in &elements {
                if !elements.contains(&(m & n)) {
                    return Err(Error::InvalidAlgebra(format!("meet of {m} and {n} missing")));
                }
            }
        }
        Ok(FiniteBA { atoms, elements })
    }

    /// The full powerset algebra.
    pub fn full(atoms: u32) -> Result<Self> {
        if atoms > MAX_ATOMS {
            return Err(Error::InvalidAlgebra(format!("more than {MAX_ATOMS} atoms")));
        }
        Ok(FiniteBA { atoms, elements: (0..=full_mask(atoms)).collect() })
    }

    pub fn atoms(&self) -> u32 {
        self.atoms
    }

    pub fn elements(&self) -> &BTreeSet<u64> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.atoms)
    }

    pub fn contains(&self, m: u64) -> bool {
        self.elements.contains(&m)
    }
}

fn full_mask(atoms: u32) -> u64 {
    if atoms == 0 {
        0
    } else {
        (1u64 << atoms) - 1
    }
}

/// All meets of subsets of `gens`, including the empty meet `full`.
fn all_meets(gens: &BTreeSet<u64>, full: u64) -> BTreeSet<u64> {
    let mut acc = BTreeSet::new();
    acc.insert(full);
    for &g in gens {
        let more: Vec<u64> = acc.iter().map(|&m| m & g).collect();
        acc.extend(more);
    }
    acc
}

/// The level chain generated by a set of elements, and where it reaches
/// the whole algebra, if it does.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HierarchyChain {
    /// Level zero is the generating set itself; each later level collects
    /// all meets of complements drawn from every earlier level. The last
    /// entry is the fixpoint.
    pub levels: Vec<BTreeSet<u64>>,
    /// Least level index equal to the whole algebra, when one exists.
    pub ord: Option<u32>,
}

impl HierarchyChain {
    pub fn fixpoint(&self) -> &BTreeSet<u64> {
        self.levels.last().expect("the chain is never empty")
    }
}

pub fn hierarchy_levels(b: &FiniteBA, c: &BTreeSet<u64>) -> Result<HierarchyChain> {
    for &m in c {
        if !b.contains(m) {
            return Err(Error::InvalidAlgebra(format!("generator {m} outside the algebra")));
        }
    }
    let full = b.full_mask();
    let mut levels = vec![c.clone()];
    let mut cumulative = c.clone();
    // Levels past the first are nondecreasing, so a repeat is the fixpoint;
    // the chain is bounded by the algebra, so the loop bound is generous.
    for _ in 0..=b.len() + 1 {
        let duals: BTreeSet<u64> = cumulative.iter().map(|&m| full & !m).collect();
        let next = all_meets(&duals, full);
        if next == *levels.last().unwrap() {
            break;
        }
        cumulative.extend(next.iter().copied());
        levels.push(next);
    }
    let ord = levels
        .iter()
        .position(|lv| lv == b.elements())
        .map(|i| i as u32);
    Ok(HierarchyChain { levels, ord })
}

/// The least reachable ord over generating sets of bounded size, with the
/// first witness in subset order. Unbounded search concedes level zero to
/// the algebra itself, so the size cap is the interesting knob.
pub fn ord_minimize(
    b: &FiniteBA,
    max_generators: Option<usize>,
) -> Result<Option<(u32, BTreeSet<u64>)>> {
    if b.atoms > 4 {
        return Err(Error::InvalidAlgebra(
            "exhaustive minimization is limited to algebras on at most 4 atoms".into(),
        ));
    }
    let elems: Vec<u64> = b.elements.iter().copied().collect();
    let cap = max_generators.unwrap_or(elems.len());
    let mut best: Option<(u32, BTreeSet<u64>)> = None;
    for mask in 0u32..(1 << elems.len()) {
        if (mask.count_ones() as usize) > cap {
            continue;
        }
        let c: BTreeSet<u64> = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &m)| m)
            .collect();
        if let Some(ord) = hierarchy_levels(b, &c)?.ord {
            if best.as_ref().map_or(true, |(o, _)| ord < *o) {
                best = Some((ord, c));
            }
        }
    }
    Ok(best)
}

/// A family of named subsets of a finite labeled universe.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "SetFamilyRaw", into = "SetFamilyRaw")]
pub struct SetFamily {
    universe: Vec<String>,
    members: BTreeSet<u64>,
}

#[derive(Serialize, Deserialize)]
struct SetFamilyRaw {
    universe: Vec<String>,
    members: Vec<Vec<String>>,
}

impl TryFrom<SetFamilyRaw> for SetFamily {
    type Error = Error;

    fn try_from(raw: SetFamilyRaw) -> Result<Self> {
        SetFamily::new(raw.universe, &raw.members)
    }
}

impl From<SetFamily> for SetFamilyRaw {
    fn from(f: SetFamily) -> Self {
        let members = f.members.iter().map(|&m| f.names(m)).collect();
        SetFamilyRaw { universe: f.universe, members }
    }
}

impl SetFamily {
    pub fn new(universe: Vec<String>, members: &[Vec<String>]) -> Result<Self> {
        if universe.len() as u32 > MAX_ATOMS {
            return Err(Error::InvalidFamily(format!(
                "universe larger than {MAX_ATOMS} points"
            )));
        }
        let mut seen = BTreeSet::new();
        for id in &universe {
            if !seen.insert(id) {
                return Err(Error::InvalidFamily(format!("duplicate point {id:?}")));
            }
        }
        let mut family = SetFamily { universe, members: BTreeSet::new() };
        family.members = members
            .iter()
            .map(|set| family.mask_of(set))
            .collect::<Result<_>>()?;
        Ok(family)
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn members(&self) -> &BTreeSet<u64> {
        &self.members
    }

    pub fn universe_mask(&self) -> u64 {
        full_mask(self.universe.len() as u32)
    }

    pub fn mask_of(&self, set: &[String]) -> Result<u64> {
        let mut m = 0u64;
        for id in set {
            let i = self
                .universe
                .iter()
                .position(|u| u == id)
                .ok_or_else(|| Error::InvalidFamily(format!("unknown point {id:?}")))?;
            m |= 1 << i;
        }
        Ok(m)
    }

    /// Names of a mask's points, in universe order.
    pub fn names(&self, mask: u64) -> Vec<String> {
        self.universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, id)| id.clone())
            .collect()
    }

    fn check_intersection_closed(&self) -> Result<()> {
        for &a in &self.members {
            for &b in &self.members {
                if !self.members.contains(&(a & b)) {
                    return Err(Error::InvalidFamily(format!(
                        "intersection of {:?} and {:?} missing",
                        self.names(a),
                        self.names(b)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Ring check: nonempty and intersection-closed. Union closure is what
    /// the chain construction adds, so it is not demanded up front.
    pub fn check_ring(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::InvalidFamily("no members".into()));
        }
        self.check_intersection_closed()
    }

    /// Field check: nonempty, complement-closed, intersection-closed.
    pub fn check_field(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::InvalidFamily("no members".into()));
        }
        let full = self.universe_mask();
        for &a in &self.members {
            if !self.members.contains(&(full & !a)) {
                return Err(Error::InvalidFamily(format!(
                    "complement of {:?} missing",
                    self.names(a)
                )));
            }
        }
        self.check_intersection_closed()
    }

    /// The partition blocks: for each point, the intersection of the
    /// members containing it. In a field these are the atoms.
    pub fn blocks(&self) -> Vec<u64> {
        let full = self.universe_mask();
        let mut out = BTreeSet::new();
        for i in 0..self.universe.len() {
            let mut block = full;
            for &m in &self.members {
                if m & (1 << i) != 0 {
                    block &= m;
                }
            }
            out.insert(block);
        }
        out.into_iter().collect()
    }
}

fn close_under(start: &BTreeSet<u64>, op: impl Fn(u64, u64) -> u64) -> BTreeSet<u64> {
    let mut acc = start.clone();
    loop {
        let mut fresh = Vec::new();
        for &a in &acc {
            for &b in &acc {
                let c = op(a, b);
                if !acc.contains(&c) {
                    fresh.push(c);
                }
            }
        }
        if fresh.is_empty() {
            return acc;
        }
        acc.extend(fresh);
    }
}

/// The alternating closure chain of a ring and its stabilization index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingChain {
    /// Level zero is the ring; even steps close under pairwise unions,
    /// odd steps under pairwise intersections. The last entry is stable.
    pub levels: Vec<BTreeSet<u64>>,
    /// Least index whose successor level adds nothing.
    pub index: u32,
    /// The full lattice closure, computed independently of the chain.
    pub lattice_closure: BTreeSet<u64>,
}

pub fn ring_levels(r: &SetFamily) -> Result<RingChain> {
    r.check_ring()?;
    let mut levels = vec![r.members().clone()];
    loop {
        let n = levels.len() - 1;
        let cur = levels.last().unwrap();
        let next = if n % 2 == 0 {
            close_under(cur, |a, b| a | b)
        } else {
            close_under(cur, |a, b| a & b)
        };
        if next == *cur {
            break;
        }
        levels.push(next);
    }
    let both = close_under(&close_under(r.members(), |a, b| a | b), |a, b| a & b);
    let lattice_closure = close_under(&both, |a, b| a | b);
    Ok(RingChain { levels: levels.clone(), index: (levels.len() - 1) as u32, lattice_closure })
}

/// A field of sets modulo an ideal: the algebra of surviving blocks and
/// the class map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Quotient {
    pub algebra: FiniteBA,
    /// Universe masks of the blocks not swallowed by the ideal; bit `i` of
    /// an algebra element refers to `blocks[i]`.
    pub blocks: Vec<u64>,
    /// Class map from member masks to algebra elements.
    pub map: BTreeMap<u64, u64>,
}

pub fn quotient(f: &SetFamily, ideal_sets: &[Vec<String>]) -> Result<Quotient> {
    f.check_field()?;
    let ideal: BTreeSet<u64> = ideal_sets
        .iter()
        .map(|s| f.mask_of(s))
        .collect::<Result<_>>()?;
    if ideal.is_empty() {
        return Err(Error::InvalidFamily("ideal has no members".into()));
    }
    for &a in &ideal {
        if !f.members().contains(&a) {
            return Err(Error::InvalidFamily(format!(
                "ideal member {:?} is not in the field",
                f.names(a)
            )));
        }
        for &b in &ideal {
            if !ideal.contains(&(a | b)) {
                return Err(Error::InvalidFamily(format!(
                    "ideal misses the union of {:?} and {:?}",
                    f.names(a),
                    f.names(b)
                )));
            }
        }
        for &b in f.members() {
            if b & !a == 0 && !ideal.contains(&b) {
                return Err(Error::InvalidFamily(format!(
                    "ideal is not downward closed: {:?} under {:?}",
                    f.names(b),
                    f.names(a)
                )));
            }
        }
    }
    if ideal.contains(&f.universe_mask()) {
        return Err(Error::InvalidFamily("ideal contains the whole universe".into()));
    }
    let swallowed: u64 = ideal.iter().fold(0, |acc, &m| acc | m);
    let blocks: Vec<u64> = f
        .blocks()
        .into_iter()
        .filter(|&b| b & !swallowed != 0)
        .collect();
    let algebra = FiniteBA::full(blocks.len() as u32)?;
    let mut map = BTreeMap::new();
    for &m in f.members() {
        let mut image = 0u64;
        for (i, &b) in blocks.iter().enumerate() {
            if b & !m == 0 {
                image |= 1 << i;
            }
        }
        map.insert(m, image);
    }
    Ok(Quotient { algebra, blocks, map })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(masks: &[u64]) -> BTreeSet<u64> {
        masks.iter().copied().collect()
    }

    #[test]
    fn algebra_validation() {
        assert!(FiniteBA::new(2, [0b00, 0b01, 0b10, 0b11]).is_ok());
        assert!(FiniteBA::new(2, [0b00, 0b11]).is_ok());
        assert!(FiniteBA::new(2, [0b00, 0b01, 0b11]).is_err());
        assert!(FiniteBA::new(2, [0b01, 0b10]).is_err());
        assert!(FiniteBA::new(1, [0b10, 0b00, 0b01, 0b11]).is_err());
        assert!(FiniteBA::new(17, []).is_err());
    }

    #[test]
    fn one_atom_generator_reaches_the_four_element_algebra_at_two() {
        let b = FiniteBA::full(2).unwrap();
        let chain = hierarchy_levels(&b, &set(&[0b01])).unwrap();
        assert_eq!(chain.levels[0], set(&[0b01]));
        assert_eq!(chain.levels[1], set(&[0b11, 0b10]));
        assert_eq!(chain.levels[2], set(&[0b00, 0b01, 0b10, 0b11]));
        assert_eq!(chain.ord, Some(2));
        assert_eq!(chain.levels.len(), 3);
    }

    #[test]
    fn empty_generators_stabilize_at_the_trivial_subalgebra() {
        let b = FiniteBA::full(2).unwrap();
        let chain = hierarchy_levels(&b, &BTreeSet::new()).unwrap();
        assert_eq!(chain.levels[0], BTreeSet::new());
        assert_eq!(chain.levels[1], set(&[0b11]));
        assert_eq!(*chain.fixpoint(), set(&[0b00, 0b11]));
        assert_eq!(chain.ord, None);
    }

    #[test]
    fn atoms_generate_the_eight_element_algebra_quickly() {
        let b = FiniteBA::full(3).unwrap();
        let chain = hierarchy_levels(&b, &set(&[0b001, 0b010, 0b100])).unwrap();
        assert_eq!(*chain.fixpoint(), *b.elements());
        assert!(chain.ord.unwrap() <= 2);
    }

    #[test]
    fn levels_are_monotone_past_the_first() {
        let b = FiniteBA::full(3).unwrap();
        for c in [set(&[0b011]), set(&[0b001, 0b110]), set(&[])] {
            let chain = hierarchy_levels(&b, &c).unwrap();
            assert!(chain.levels.len() <= b.len() + 1);
            for w in chain.levels[1..].windows(2) {
                assert!(w[0].is_subset(&w[1]));
            }
        }
    }

    #[test]
    fn generators_outside_the_algebra_are_rejected() {
        let b = FiniteBA::new(2, [0b00, 0b11]).unwrap();
        assert!(hierarchy_levels(&b, &set(&[0b01])).is_err());
    }

    #[test]
    fn minimizer_respects_the_generator_cap() {
        let b = FiniteBA::full(2).unwrap();
        let (ord, c) = ord_minimize(&b, None).unwrap().unwrap();
        assert_eq!(ord, 0);
        assert_eq!(c, *b.elements());
        let (ord, c) = ord_minimize(&b, Some(1)).unwrap().unwrap();
        assert_eq!(ord, 2);
        assert_eq!(c, set(&[0b01]));
        assert!(ord_minimize(&FiniteBA::full(5).unwrap(), None).is_err());
    }

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn ring_chain_example() {
        let r = SetFamily::new(ids(&["a", "b", "c"]), &[ids(&[]), ids(&["a"]), ids(&["b"])])
            .unwrap();
        let chain = ring_levels(&r).unwrap();
        assert_eq!(chain.index, 1);
        assert_eq!(chain.levels[1], set(&[0b000, 0b001, 0b010, 0b011]));
        assert_eq!(*chain.levels.last().unwrap(), chain.lattice_closure);
    }

    #[test]
    fn closed_rings_stabilize_immediately() {
        let r = SetFamily::new(
            ids(&["a", "b"]),
            &[ids(&[]), ids(&["a"]), ids(&["a", "b"])],
        )
        .unwrap();
        let chain = ring_levels(&r).unwrap();
        assert_eq!(chain.index, 0);
        assert_eq!(chain.levels.len(), 1);
    }

    #[test]
    fn non_rings_are_rejected() {
        // Missing the intersection of the two members.
        let r = SetFamily::new(ids(&["a", "b"]), &[ids(&["a"]), ids(&["a", "b"])]).unwrap();
        assert!(ring_levels(&r).is_ok());
        let bad = SetFamily::new(ids(&["a", "b"]), &[ids(&["a"]), ids(&["b"])]).unwrap();
        assert!(ring_levels(&bad).is_err());
    }

    fn powerset_family(names: &[&str]) -> SetFamily {
        let universe = ids(names);
        let n = names.len();
        let members: Vec<Vec<String>> = (0u64..(1 << n))
            .map(|m| {
                (0..n)
                    .filter(|i| m & (1 << i) != 0)
                    .map(|i| names[i].to_string())
                    .collect()
            })
            .collect();
        SetFamily::new(universe, &members).unwrap()
    }

    #[test]
    fn trivial_ideal_reproduces_the_field() {
        let f = powerset_family(&["a", "b"]);
        let q = quotient(&f, &[vec![]]).unwrap();
        assert_eq!(q.algebra.len(), 4);
        assert_eq!(q.blocks, vec![0b01, 0b10]);
        // Distinct members stay distinct.
        let images: BTreeSet<u64> = q.map.values().copied().collect();
        assert_eq!(images.len(), 4);
    }

    #[test]
    fn quotient_collapses_what_the_ideal_swallows() {
        let f = powerset_family(&["a", "b"]);
        let q = quotient(&f, &[vec![], ids(&["a"])]).unwrap();
        assert_eq!(q.algebra.len(), 2);
        assert_eq!(q.map[&0b01], 0);
        assert_eq!(q.map[&0b10], 1);
        assert_eq!(q.map[&0b11], 1);
    }

    #[test]
    fn quotient_map_is_a_surjective_homomorphism_with_exact_kernel() {
        let f = powerset_family(&["a", "b", "c", "d"]);
        let ideal: Vec<Vec<String>> =
            vec![vec![], ids(&["a"]), ids(&["b"]), ids(&["a", "b"])];
        let q = quotient(&f, &ideal).unwrap();
        let full = f.universe_mask();
        let ideal_masks: BTreeSet<u64> =
            ideal.iter().map(|s| f.mask_of(s).unwrap()).collect();
        for &a in f.members() {
            assert_eq!(q.map[&a] == 0, ideal_masks.contains(&a), "kernel at {a}");
            assert_eq!(
                q.map[&(full & !a)],
                q.algebra.full_mask() & !q.map[&a],
                "complement at {a}"
            );
            for &b in f.members() {
                assert_eq!(q.map[&(a & b)], q.map[&a] & q.map[&b]);
                assert_eq!(q.map[&(a | b)], q.map[&a] | q.map[&b]);
            }
        }
        let images: BTreeSet<u64> = q.map.values().copied().collect();
        assert_eq!(images.len(), q.algebra.len());
    }

    #[test]
    fn bad_ideals_are_rejected_with_the_violation_named() {
        let f = powerset_family(&["a", "b"]);
        // Not downward closed: {a,b} without {a}.
        let err = quotient(&f, &[vec![], ids(&["a", "b"])]).unwrap_err();
        assert!(err.to_string().contains("downward"), "{err}");
        // Union missing.
        let err = quotient(&f, &[vec![], ids(&["a"]), ids(&["b"])]).unwrap_err();
        assert!(err.to_string().contains("union"), "{err}");
        // Universe inside (via the downward-closed full ideal).
        let all: Vec<Vec<String>> =
            vec![vec![], ids(&["a"]), ids(&["b"]), ids(&["a", "b"])];
        let err = quotient(&f, &all).unwrap_err();
        assert!(err.to_string().contains("universe"), "{err}");
        // Empty ideal list.
        assert!(quotient(&f, &[]).is_err());
    }

    #[test]
    fn family_serialization_round_trips() {
        let f = powerset_family(&["a", "b"]);
        let j = serde_json::to_string(&f).unwrap();
        let back: SetFamily = serde_json::from_str(&j).unwrap();
        assert_eq!(back, f);
        let b = FiniteBA::full(2).unwrap();
        let j = serde_json::to_string(&b).unwrap();
        assert_eq!(j, r#"{"atoms":2,"elements":[0,1,2,3]}"#);
        assert_eq!(serde_json::from_str::<FiniteBA>(&j).unwrap(), b);
    }
}
