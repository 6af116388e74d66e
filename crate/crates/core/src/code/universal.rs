//! Universal sets over the paired space, one per declared level tower.
//!
//! Points of the paired space interleave a binary parameter (even
//! coordinates) with an argument (odd coordinates). The base code selects
//! basis sets by parameter bits; each level step takes complements of the
//! previous level read through the parameter slices
//! `x_n(m) = x(pair_index(n, m))`. Sections of the top code then range over
//! the sets the tower can describe, and the encoder computes the parameter
//! for any target code of matching shape.

use super::{
    dual_in_window, eval, pair_index, pair_points, BasicClopen, BorelCode, Connective,
    CoordWindow, Point,
};
use crate::ordinal::OrdinalNotation;
use crate::seq::Seq;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Largest number of cylinders a single scattered constraint may expand
/// into. Slice substitution moves constraints to pairing-function
/// coordinates, so expansions grow fast with tower height; the cap keeps
/// failure explicit instead of exhausting memory.
const EXPANSION_BUDGET: u128 = 1 << 14;

/// Hard ceiling on the node count of the built code.
const NODE_BUDGET: usize = 200_000;

pub struct UniversalSet {
    code: BorelCode,
    basis: Vec<BasicClopen>,
    branching: u32,
    depth: u32,
    height: usize,
}

/// Builds the universal code for a strictly decreasing level tower ending
/// at level one. The tower height, not the tag values, drives the
/// construction; the tags fix which family of targets is admissible.
/// Argument branching is inferred from the basis (at least binary).
pub fn build_universal(
    levels: &[OrdinalNotation],
    basis: Vec<BasicClopen>,
    depth: u32,
) -> Result<UniversalSet> {
    if levels.is_empty() {
        return Err(Error::InvalidInput("empty level tower".into()));
    }
    for w in levels.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::InvalidInput(format!(
                "level tower must strictly decrease, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if *levels.last().unwrap() != OrdinalNotation::from_nat(1) {
        return Err(Error::InvalidInput("level tower must end at level one".into()));
    }
    let branching = basis
        .iter()
        .filter_map(|b| match b {
            BasicClopen::Empty => None,
            BasicClopen::Cyl(t) => t.0.iter().max().map(|&v| v + 1),
        })
        .max()
        .unwrap_or(0)
        .max(2);
    for b in &basis {
        if let BasicClopen::Cyl(t) = b {
            if t.len() as u32 > depth {
                return Err(Error::InvalidInput(format!(
                    "basis cylinder {t} is longer than the declared depth {depth}"
                )));
            }
        }
    }
    let window = CoordWindow::EvenOdd(2, branching);
    let mut code = base_code(&basis, window)?;
    for _ in 1..levels.len() {
        code = step_code(&code, basis.len(), window)?;
        if code.node_count() > NODE_BUDGET {
            return Err(Error::InvalidInput(format!(
                "universal code exceeds the node budget ({} nodes)",
                code.node_count()
            )));
        }
    }
    Ok(UniversalSet { code, basis, branching, depth, height: levels.len() })
}

/// Expands `{z : z(c) = v for (c, v) in constraints}` into full cylinders
/// within the window, listed lexicographically.
fn expand_scattered(constraints: &BTreeMap<usize, u32>, window: CoordWindow) -> Result<Vec<Seq>> {
    let len = match constraints.keys().next_back() {
        None => return Ok(vec![Seq::empty()]),
        Some(&c) => c + 1,
    };
    let free: Vec<usize> = (0..len).filter(|i| !constraints.contains_key(i)).collect();
    let mut count: u128 = 1;
    for &i in &free {
        count = count.saturating_mul(window.at(i) as u128);
        if count > EXPANSION_BUDGET {
            return Err(Error::InvalidInput(format!(
                "scattered constraint through coordinate {} expands past the budget",
                len - 1
            )));
        }
    }
    let mut template = vec![0u32; len];
    for (&c, &v) in constraints {
        template[c] = v;
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut vals = vec![0u32; free.len()];
    loop {
        for (k, &i) in free.iter().enumerate() {
            template[i] = vals[k];
        }
        out.push(Seq(template.clone()));
        // Odometer, leftmost free coordinate most significant.
        let mut k = free.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            vals[k - 1] += 1;
            if vals[k - 1] < window.at(free[k - 1]) {
                break;
            }
            vals[k - 1] = 0;
            k -= 1;
        }
    }
}

fn union_of_cylinders(cyls: Vec<Seq>) -> BorelCode {
    BorelCode::connect(
        Connective::Union,
        cyls.into_iter().map(|c| BorelCode::basic(BasicClopen::Cyl(c))).collect(),
    )
}

/// The base: parameter bit `n` turns basis set `n` on, so the section at a
/// parameter is the union of the selected basis sets.
fn base_code(basis: &[BasicClopen], window: CoordWindow) -> Result<BorelCode> {
    let mut slices = Vec::with_capacity(basis.len());
    for (n, b) in basis.iter().enumerate() {
        match b {
            BasicClopen::Empty => slices.push(BorelCode::basic(BasicClopen::Empty)),
            BasicClopen::Cyl(t) => {
                let mut constraints = BTreeMap::new();
                constraints.insert(2 * n, 1);
                for (m, &v) in t.0.iter().enumerate() {
                    constraints.insert(2 * m + 1, v);
                }
                slices.push(union_of_cylinders(expand_scattered(&constraints, window)?));
            }
        }
    }
    Ok(BorelCode::connect(Connective::Union, slices))
}

/// One level step: the union over slices of the complement of the previous
/// level read through that slice. Slice `n` rereads parameter coordinate
/// `2m` at `2 * pair_index(n, m)` and leaves argument coordinates alone.
fn step_code(prev: &BorelCode, width: usize, window: CoordWindow) -> Result<BorelCode> {
    let dual = dual_in_window(prev, window)?;
    let mut slices = Vec::with_capacity(width);
    for n in 0..width {
        slices.push(substitute(&dual, &Seq::empty(), n as u32, window)?);
    }
    Ok(BorelCode::connect(Connective::Union, slices))
}

fn substitute(code: &BorelCode, at: &Seq, slice: u32, window: CoordWindow) -> Result<BorelCode> {
    if let Some(b) = code.leaf().get(at) {
        return match b {
            BasicClopen::Empty => Ok(BorelCode::basic(BasicClopen::Empty)),
            BasicClopen::Cyl(t) => {
                let mut constraints = BTreeMap::new();
                for (i, &v) in t.0.iter().enumerate() {
                    let c = if i % 2 == 1 {
                        i
                    } else {
                        let p = 2 * pair_index(slice, (i / 2) as u32);
                        usize::try_from(p).map_err(|_| {
                            Error::InvalidInput("slice coordinate overflows".into())
                        })?
                    };
                    constraints.insert(c, v);
                }
                Ok(union_of_cylinders(expand_scattered(&constraints, window)?))
            }
        };
    }
    let children = code
        .tree()
        .children(at)
        .iter()
        .map(|c| substitute(code, c, slice, window))
        .collect::<Result<Vec<_>>>()?;
    Ok(BorelCode::connect(code.kind()[at], children))
}

impl UniversalSet {
    pub fn code(&self) -> &BorelCode {
        &self.code
    }

    pub fn branching(&self) -> u32 {
        self.branching
    }

    /// All argument points determined within the declared depth.
    pub fn window_points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        let mut w = vec![0u32; self.depth as usize];
        loop {
            out.push(Point::new(w.clone(), 0));
            let mut k = w.len();
            loop {
                if k == 0 {
                    return out;
                }
                w[k - 1] += 1;
                if w[k - 1] < self.branching {
                    break;
                }
                w[k - 1] = 0;
                k -= 1;
            }
        }
    }

    /// Membership of `(p, y)` in the universal set.
    pub fn section_eval(&self, p: &Point, y: &Point) -> Result<bool> {
        Ok(eval(&self.code, &pair_points(p, y)?))
    }

    /// The diagonal: membership of `(x, x)`.
    pub fn diagonal(&self, x: &Point) -> Result<bool> {
        Ok(eval(&self.code, &pair_points(x, x)?))
    }

    /// The parameter whose section evaluates like `target` on every point
    /// determined within the declared depth.
    ///
    /// Admissible targets mirror the tower: at height one, a basis leaf or
    /// a union of basis leaves; above that, a union whose members have
    /// admissible complements one level down. The empty leaf is admissible
    /// everywhere, though above height one it needs the basis to cover the
    /// window (the all-full padding slices must exist).
    pub fn encode(&self, target: &BorelCode) -> Result<Point> {
        let bits = self.encode_bits(target, self.height)?;
        Ok(Point::new(bits, 0))
    }

    fn encode_bits(&self, target: &BorelCode, height: usize) -> Result<Vec<u32>> {
        let target = &collapse_singletons(target);
        let root = Seq::empty();
        if height == 1 {
            let members: Vec<&BasicClopen> = if let Some(b) = target.leaf().get(&root) {
                if *b == BasicClopen::Empty {
                    return Ok(Vec::new());
                }
                vec![b]
            } else {
                if target.kind()[&root] != Connective::Union {
                    return Err(Error::NotRepresentable(
                        "level-one targets must be unions of basis sets".into(),
                    ));
                }
                target
                    .tree()
                    .children(&root)
                    .iter()
                    .map(|c| {
                        target.leaf().get(c).ok_or_else(|| {
                            Error::NotRepresentable(format!(
                                "level-one member at {c} is not a basis leaf"
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            let mut bits = vec![0u32; self.basis.len()];
            for b in members {
                let n = self.basis.iter().position(|x| x == b).ok_or_else(|| {
                    Error::NotRepresentable(format!("{b:?} is not in the basis"))
                })?;
                bits[n] = 1;
            }
            while bits.last() == Some(&0) {
                bits.pop();
            }
            return Ok(bits);
        }
        let children: Vec<BorelCode> = if let Some(b) = target.leaf().get(&root) {
            match b {
                BasicClopen::Empty => Vec::new(),
                _ => vec![BorelCode::basic(b.clone())],
            }
        } else {
            if target.kind()[&root] != Connective::Union {
                return Err(Error::NotRepresentable(
                    "targets above level one must be unions".into(),
                ));
            }
            target
                .tree()
                .children(&root)
                .iter()
                .map(|c| subcode(target, c))
                .collect()
        };
        if children.len() > self.basis.len() {
            return Err(Error::NotRepresentable(format!(
                "{} union members exceed the {} slices available",
                children.len(),
                self.basis.len()
            )));
        }
        let mut slices = Vec::with_capacity(self.basis.len());
        for c in &children {
            let complement = dual_in_window(c, CoordWindow::Uniform(self.branching))?;
            slices.push(self.encode_bits(&complement, height - 1)?);
        }
        if children.is_empty() {
            // Empty union: every slice must contribute nothing, so each
            // lower parameter names the full set.
            let full = self.full_bits(height - 1)?;
            slices = vec![full; self.basis.len()];
        } else {
            while slices.len() < self.basis.len() {
                // Repeating a member is harmless in a union.
                slices.push(slices[0].clone());
            }
        }
        Ok(merge_slices(&slices))
    }

    /// A parameter for the full space at the given height.
    fn full_bits(&self, height: usize) -> Result<Vec<u32>> {
        if height == 1 {
            for y in self.window_points() {
                if !self.basis.iter().any(|b| b.contains(&y)) {
                    return Err(Error::NotRepresentable(format!(
                        "basis does not cover the window (no set contains {y:?})"
                    )));
                }
            }
            return Ok(vec![1; self.basis.len()]);
        }
        // The complement of the empty set, slice by slice.
        let empty = self.empty_bits(height - 1)?;
        Ok(merge_slices(&vec![empty; self.basis.len()]))
    }

    fn empty_bits(&self, height: usize) -> Result<Vec<u32>> {
        if height == 1 {
            return Ok(Vec::new());
        }
        let full = self.full_bits(height - 1)?;
        Ok(merge_slices(&vec![full; self.basis.len()]))
    }
}

/// Collapses connective nodes with exactly one child; such a node denotes
/// the same set as its child. Duals of duals produce these chains, and
/// removing them lets the encoder see through to the basis leaves.
fn collapse_singletons(code: &BorelCode) -> BorelCode {
    fn walk(code: &BorelCode, s: &Seq) -> BorelCode {
        if let Some(b) = code.leaf().get(s) {
            return BorelCode::basic(b.clone());
        }
        let children = code.tree().children(s);
        if children.len() == 1 {
            return walk(code, &children[0]);
        }
        BorelCode::connect(code.kind()[s], children.iter().map(|c| walk(code, c)).collect())
    }
    walk(code, &Seq::empty())
}

/// Copies the subtree of `code` rooted at `s` out as its own code.
fn subcode(code: &BorelCode, s: &Seq) -> BorelCode {
    if let Some(b) = code.leaf().get(s) {
        return BorelCode::basic(b.clone());
    }
    let children = code.tree().children(s).iter().map(|c| subcode(code, c)).collect();
    BorelCode::connect(code.kind()[s], children)
}

/// Interleaves slice parameters into one: bit `pair_index(n, m)` of the
/// result is bit `m` of slice `n`.
fn merge_slices(slices: &[Vec<u32>]) -> Vec<u32> {
    let mut bits = Vec::new();
    for (n, q) in slices.iter().enumerate() {
        for (m, &v) in q.iter().enumerate() {
            if v != 0 {
                let k = pair_index(n as u32, m as u32) as usize;
                if bits.len() <= k {
                    bits.resize(k + 1, 0);
                }
                bits[k] = v;
            }
        }
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::dual;
    use crate::seq;

    fn cyl(s: Seq) -> BorelCode {
        BorelCode::basic(BasicClopen::Cyl(s))
    }

    fn one() -> OrdinalNotation {
        OrdinalNotation::from_nat(1)
    }

    fn two() -> OrdinalNotation {
        OrdinalNotation::from_nat(2)
    }

    fn depth1() -> UniversalSet {
        build_universal(
            &[one()],
            vec![BasicClopen::Cyl(seq![0]), BasicClopen::Cyl(seq![1])],
            1,
        )
        .unwrap()
    }

    fn tower2() -> UniversalSet {
        build_universal(
            &[two(), one()],
            vec![BasicClopen::Cyl(seq![0]), BasicClopen::Cyl(seq![1])],
            1,
        )
        .unwrap()
    }

    #[test]
    fn level_tower_validation() {
        assert!(build_universal(&[], vec![], 1).is_err());
        assert!(build_universal(&[one(), one()], vec![], 1).is_err());
        assert!(build_universal(&[two()], vec![], 1).is_err());
        assert!(build_universal(
            &[one()],
            vec![BasicClopen::Cyl(seq![0, 0])],
            1
        )
        .is_err());
    }

    #[test]
    fn base_section_is_the_selected_union() {
        let u = depth1();
        let p = u.encode(&cyl(seq![0])).unwrap();
        assert_eq!(p, Point::new(vec![1], 0));
        for y in u.window_points() {
            assert_eq!(u.section_eval(&p, &y).unwrap(), eval(&cyl(seq![0]), &y), "{y:?}");
        }
    }

    #[test]
    fn zero_parameter_gives_the_empty_section() {
        let u = depth1();
        let p = u.encode(&BorelCode::basic(BasicClopen::Empty)).unwrap();
        assert_eq!(p, Point::new(vec![], 0));
        for y in u.window_points() {
            assert!(!u.section_eval(&p, &y).unwrap());
        }
    }

    #[test]
    fn base_rejects_targets_outside_the_basis() {
        let u = depth1();
        assert!(u.encode(&cyl(seq![0, 1])).is_err());
        let nested = BorelCode::connect(
            Connective::Union,
            vec![
                cyl(seq![0]),
                BorelCode::connect(Connective::Union, vec![cyl(seq![0]), cyl(seq![1])]),
            ],
        );
        assert!(u.encode(&nested).is_err());
        let meet = BorelCode::connect(Connective::Intersection, vec![cyl(seq![0]), cyl(seq![1])]);
        assert!(u.encode(&meet).is_err());
        // Singleton connective wrappers denote their child and are seen
        // through rather than rejected.
        let wrapped = BorelCode::connect(Connective::Union, vec![cyl(seq![0])]);
        assert_eq!(u.encode(&wrapped).unwrap(), u.encode(&cyl(seq![0])).unwrap());
    }

    #[test]
    fn two_level_sections_reproduce_every_admissible_target() {
        let u = tower2();
        let pool = [cyl(seq![0]), cyl(seq![1])];
        let mut targets = vec![BorelCode::basic(BasicClopen::Empty)];
        for mask in 0u32..4 {
            let members: Vec<BorelCode> = (0..2)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| pool[i as usize].clone())
                .collect();
            targets.push(BorelCode::connect(Connective::Union, members));
        }
        for target in &targets {
            let p = u.encode(target).unwrap();
            for y in u.window_points() {
                assert_eq!(
                    u.section_eval(&p, &y).unwrap(),
                    eval(target, &y),
                    "target {target:?} at {y:?}"
                );
            }
        }
    }

    #[test]
    fn two_level_sections_reproduce_complements_via_duals() {
        // A union of one dual-of-basis member exercises the slice rereading.
        let u = tower2();
        let target = BorelCode::connect(Connective::Union, vec![dual(&cyl(seq![0]), 2).unwrap()]);
        let p = u.encode(&target).unwrap();
        for y in u.window_points() {
            assert_eq!(u.section_eval(&p, &y).unwrap(), eval(&target, &y), "{y:?}");
        }
    }

    #[test]
    fn too_many_union_members_is_an_error() {
        let u = tower2();
        let target = BorelCode::connect(
            Connective::Union,
            vec![cyl(seq![0]), cyl(seq![1]), cyl(seq![0])],
        );
        assert!(u.encode(&target).is_err());
    }

    #[test]
    fn diagonal_is_the_paired_evaluation() {
        let u = depth1();
        for x in [Point::new(vec![1], 0), Point::new(vec![0, 1], 0), Point::constant(0)] {
            let z = pair_points(&x, &x).unwrap();
            assert_eq!(u.diagonal(&x).unwrap(), eval(u.code(), &z));
        }
    }

    #[test]
    fn uncovering_basis_cannot_name_the_full_set_above_level_one() {
        let u = build_universal(&[two(), one()], vec![BasicClopen::Cyl(seq![0])], 1).unwrap();
        // The empty union one level up needs full slices at level one.
        let err = u.encode(&BorelCode::basic(BasicClopen::Empty)).unwrap_err();
        assert!(matches!(err, Error::NotRepresentable(_)));
    }
}
