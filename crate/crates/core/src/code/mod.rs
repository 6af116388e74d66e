//! Borel codes over sequence spaces, and the point plumbing they need.
//!
//! A code is a finite tree whose internal nodes carry a connective and
//! whose terminal nodes carry a basic clopen set; evaluation is structural
//! recursion. Codes only ever constrain finitely many coordinates, so
//! points are finite prefixes with a constant tail.

mod universal;

pub use universal::{build_universal, UniversalSet};

use crate::seq::Seq;
use crate::tree::FinTree;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// An element of a sequence space, determined by a finite prefix and a
/// constant tail. Kept in normal form: the prefix never ends with the tail
/// value, so equal functions compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "PointRaw", into = "PointRaw")]
pub struct Point {
    prefix: Vec<u32>,
    tail: u32,
}

#[derive(Serialize, Deserialize)]
struct PointRaw {
    prefix: Vec<u32>,
    tail: u32,
}

impl From<PointRaw> for Point {
    fn from(raw: PointRaw) -> Self {
        Point::new(raw.prefix, raw.tail)
    }
}

impl From<Point> for PointRaw {
    fn from(p: Point) -> Self {
        PointRaw { prefix: p.prefix, tail: p.tail }
    }
}

impl Point {
    pub fn new(mut prefix: Vec<u32>, tail: u32) -> Self {
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        Point { prefix, tail }
    }

    /// The constant function.
    pub fn constant(tail: u32) -> Self {
        Point::new(Vec::new(), tail)
    }

    pub fn at(&self, i: usize) -> u32 {
        self.prefix.get(i).copied().unwrap_or(self.tail)
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn tail(&self) -> u32 {
        self.tail
    }

    /// True when `s` is an initial segment of this point.
    pub fn extends(&self, s: &Seq) -> bool {
        s.0.iter().enumerate().all(|(i, &v)| self.at(i) == v)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {}...)", self.prefix, self.tail)
    }
}

/// A basic clopen set: empty, or the cylinder of sequences through `s`.
/// Ordered with empty first, then cylinders shortlex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasicClopen {
    Empty,
    Cyl(Seq),
}

impl BasicClopen {
    pub fn contains(&self, x: &Point) -> bool {
        match self {
            BasicClopen::Empty => false,
            BasicClopen::Cyl(s) => x.extends(s),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connective {
    Union,
    Intersection,
}

impl Connective {
    pub fn flip(self) -> Self {
        match self {
            Connective::Union => Connective::Intersection,
            Connective::Intersection => Connective::Union,
        }
    }
}

fn path_string(s: &Seq) -> String {
    s.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
}

fn parse_path(p: &str) -> Result<Seq> {
    if p.is_empty() {
        return Ok(Seq::empty());
    }
    p.split('.')
        .map(|x| x.parse::<u32>().map_err(|_| Error::InvalidCode(format!("bad path {p:?}"))))
        .collect::<Result<Vec<u32>>>()
        .map(Seq)
}

/// A Borel code: a finite tree, a connective for each internal node, and a
/// basic clopen for each terminal node. Connective-labeled nodes may be
/// childless; an empty union denotes the empty set and an empty
/// intersection the whole space.
///
/// Serialized with dot-joined node paths as map keys (the root is `""`).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "BorelCodeRaw", into = "BorelCodeRaw")]
pub struct BorelCode {
    tree: FinTree,
    kind: BTreeMap<Seq, Connective>,
    leaf: BTreeMap<Seq, BasicClopen>,
}

#[derive(Serialize, Deserialize)]
struct BorelCodeRaw {
    tree: Vec<Seq>,
    kind: BTreeMap<String, Connective>,
    leaf: BTreeMap<String, BasicClopen>,
}

impl TryFrom<BorelCodeRaw> for BorelCode {
    type Error = Error;

    fn try_from(raw: BorelCodeRaw) -> Result<Self> {
        let tree = FinTree::new(raw.tree)?;
        let kind = raw
            .kind
            .into_iter()
            .map(|(k, v)| Ok((parse_path(&k)?, v)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let leaf = raw
            .leaf
            .into_iter()
            .map(|(k, v)| Ok((parse_path(&k)?, v)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        BorelCode::new(tree, kind, leaf)
    }
}

impl From<BorelCode> for BorelCodeRaw {
    fn from(c: BorelCode) -> Self {
        BorelCodeRaw {
            tree: c.tree.nodes().iter().cloned().collect(),
            kind: c.kind.iter().map(|(k, v)| (path_string(k), *v)).collect(),
            leaf: c.leaf.iter().map(|(k, v)| (path_string(k), v.clone())).collect(),
        }
    }
}

impl BorelCode {
    /// Validates that the label maps partition the nodes and that labeled
    /// leaves are in fact childless.
    pub fn new(
        tree: FinTree,
        kind: BTreeMap<Seq, Connective>,
        leaf: BTreeMap<Seq, BasicClopen>,
    ) -> Result<Self> {
        for s in tree.nodes() {
            match (kind.contains_key(s), leaf.contains_key(s)) {
                (true, true) => {
                    return Err(Error::InvalidCode(format!("{s} labeled twice")))
                }
                (false, false) => {
                    return Err(Error::InvalidCode(format!("{s} unlabeled")))
                }
                _ => {}
            }
            if leaf.contains_key(s) && !tree.children(s).is_empty() {
                return Err(Error::InvalidCode(format!("leaf-labeled {s} has children")));
            }
        }
        for s in kind.keys().chain(leaf.keys()) {
            if !tree.contains(s) {
                return Err(Error::InvalidCode(format!("label at {s} outside the tree")));
            }
        }
        Ok(BorelCode { tree, kind, leaf })
    }

    /// A single-leaf code.
    pub fn basic(b: BasicClopen) -> Self {
        let mut leaf = BTreeMap::new();
        leaf.insert(Seq::empty(), b);
        BorelCode { tree: FinTree::root_only(), kind: BTreeMap::new(), leaf }
    }

    /// A code with the given connective at the root and the given subtrees
    /// grafted as children 0, 1, ....
    pub fn connect(op: Connective, children: Vec<BorelCode>) -> Self {
        let mut nodes: BTreeSet<Seq> = BTreeSet::new();
        nodes.insert(Seq::empty());
        let mut kind = BTreeMap::new();
        let mut leaf = BTreeMap::new();
        kind.insert(Seq::empty(), op);
        for (i, child) in children.into_iter().enumerate() {
            let graft = |s: &Seq| -> Seq {
                let mut v = vec![i as u32];
                v.extend_from_slice(&s.0);
                Seq(v)
            };
            for s in child.tree.nodes() {
                nodes.insert(graft(s));
            }
            for (s, v) in &child.kind {
                kind.insert(graft(s), *v);
            }
            for (s, v) in &child.leaf {
                leaf.insert(graft(s), v.clone());
            }
        }
        let tree = FinTree::new(nodes).expect("grafted nodes are prefix-closed");
        BorelCode { tree, kind, leaf }
    }

    pub fn tree(&self) -> &FinTree {
        &self.tree
    }

    pub fn kind(&self) -> &BTreeMap<Seq, Connective> {
        &self.kind
    }

    pub fn leaf(&self) -> &BTreeMap<Seq, BasicClopen> {
        &self.leaf
    }

    pub fn node_count(&self) -> usize {
        self.tree.len()
    }

    /// The largest coordinate index the code can look at, as a length:
    /// evaluation only reads `x` below this.
    pub fn support(&self) -> usize {
        self.leaf
            .values()
            .map(|b| match b {
                BasicClopen::Empty => 0,
                BasicClopen::Cyl(s) => s.len(),
            })
            .max()
            .unwrap_or(0)
    }
}

/// Structural evaluation at a point.
pub fn eval(code: &BorelCode, x: &Point) -> bool {
    fn go(code: &BorelCode, s: &Seq, x: &Point) -> bool {
        if let Some(b) = code.leaf.get(s) {
            return b.contains(x);
        }
        let children = code.tree.children(s);
        match code.kind[s] {
            Connective::Union => children.iter().any(|c| go(code, c, x)),
            Connective::Intersection => children.iter().all(|c| go(code, c, x)),
        }
    }
    go(code, &Seq::empty(), x)
}

/// How far coordinates range in a complementation window.
#[derive(Clone, Copy, Debug)]
pub(crate) enum CoordWindow {
    Uniform(u32),
    /// Paired spaces interleave a binary parameter (even coordinates) with
    /// an argument of another branching (odd coordinates).
    EvenOdd(u32, u32),
}

impl CoordWindow {
    pub(crate) fn at(self, i: usize) -> u32 {
        match self {
            CoordWindow::Uniform(b) => b,
            CoordWindow::EvenOdd(e, o) => {
                if i % 2 == 0 {
                    e
                } else {
                    o
                }
            }
        }
    }
}

pub(crate) fn dual_in_window(code: &BorelCode, window: CoordWindow) -> Result<BorelCode> {
    let mut nodes: BTreeSet<Seq> = code.tree.nodes().clone();
    let mut kind: BTreeMap<Seq, Connective> = BTreeMap::new();
    let mut leaf: BTreeMap<Seq, BasicClopen> = BTreeMap::new();
    for (s, op) in &code.kind {
        kind.insert(s.clone(), op.flip());
    }
    for (s, b) in &code.leaf {
        match b {
            // The complement of nothing is everything: an empty meet.
            BasicClopen::Empty => {
                kind.insert(s.clone(), Connective::Intersection);
            }
            BasicClopen::Cyl(t) => {
                // The complement of a cylinder is the union of the
                // cylinders that first disagree with it, coordinate
                // bounds permitting.
                for (i, &v) in t.0.iter().enumerate() {
                    if v >= window.at(i) {
                        return Err(Error::WindowExceeded(format!(
                            "entry {v} at {i} in cylinder {t}"
                        )));
                    }
                }
                kind.insert(s.clone(), Connective::Union);
                let mut j = 0u32;
                for i in 0..t.len() {
                    for m in 0..window.at(i) {
                        if m == t.0[i] {
                            continue;
                        }
                        let mut alt = t.truncate(i);
                        alt.0.push(m);
                        let child = s.child(j);
                        nodes.insert(child.clone());
                        leaf.insert(child, BasicClopen::Cyl(alt));
                        j += 1;
                    }
                }
            }
        }
    }
    let tree = FinTree::new(nodes).expect("children extend existing leaves");
    BorelCode::new(tree, kind, leaf)
}

/// The code of the complement: connectives flip and each cylinder leaf
/// becomes the union of the cylinders disagreeing with it, all entries
/// staying below `branching`. Exact on points whose entries stay in the
/// window; entries at or beyond `branching` in a leaf are an error.
pub fn dual(code: &BorelCode, branching: u32) -> Result<BorelCode> {
    dual_in_window(code, CoordWindow::Uniform(branching))
}

/// The characteristic-function embedding of a declared finite field of
/// sets: point `x` goes to the binary point with `1` at `n` exactly when
/// `x` lies in the `n`-th set.
#[derive(Clone, Debug, Serialize)]
pub struct FieldEncoding {
    pub points: BTreeMap<String, Point>,
    /// For each set index, whether the set equals the trace of the
    /// corresponding coordinate cylinder on the encoded points. True by
    /// construction; recomputed rather than assumed.
    pub trace_ok: bool,
    /// Pairs not separated by any declared set; they collide in the image.
    pub collisions: Vec<(String, String)>,
}

pub fn encode_field(ids: &[String], sets: &[Vec<String>]) -> Result<FieldEncoding> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::InvalidFamily(format!("duplicate point id {id:?}")));
        }
    }
    for (n, set) in sets.iter().enumerate() {
        for id in set {
            if !seen.contains(id) {
                return Err(Error::InvalidFamily(format!("set {n} mentions unknown id {id:?}")));
            }
        }
    }
    let members: Vec<BTreeSet<&String>> = sets.iter().map(|s| s.iter().collect()).collect();
    let mut points = BTreeMap::new();
    for id in ids {
        let bits: Vec<u32> =
            members.iter().map(|m| if m.contains(id) { 1 } else { 0 }).collect();
        points.insert(id.clone(), Point::new(bits, 0));
    }
    let trace_ok = members.iter().enumerate().all(|(n, m)| {
        ids.iter().all(|id| (points[id].at(n) == 1) == m.contains(id))
    });
    let mut collisions = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            if points[a] == points[b] {
                collisions.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(FieldEncoding { points, trace_ok, collisions })
}

/// The standard bijection of pairs of naturals with naturals,
/// `(n, m) -> 2^n * (2m + 1) - 1`.
pub fn pair_index(n: u32, m: u32) -> u128 {
    let odd = 2 * m as u128 + 1;
    assert!(odd.leading_zeros() >= n, "pair_index out of the 128-bit range");
    (odd << n) - 1
}

/// Inverse of [`pair_index`].
pub fn unpair(k: u128) -> (u32, u32) {
    let v = k + 1;
    let n = v.trailing_zeros();
    let m = ((v >> n) - 1) / 2;
    (n, m as u32)
}

/// Interleaves two points into one over the paired space: even coordinates
/// from `x`, odd from `y`. Defined when the tails agree, since the result
/// must itself be finitely determined.
pub fn pair_points(x: &Point, y: &Point) -> Result<Point> {
    if x.tail() != y.tail() {
        return Err(Error::InvalidInput(format!(
            "cannot interleave tails {} and {}",
            x.tail(),
            y.tail()
        )));
    }
    let half = x.prefix.len().max(y.prefix.len());
    let mut prefix = Vec::with_capacity(2 * half);
    for i in 0..half {
        prefix.push(x.at(i));
        prefix.push(y.at(i));
    }
    Ok(Point::new(prefix, x.tail()))
}

/// The parameter slice `x_n` of an interleaved parameter:
/// `x_n(m) = x(pair_index(n, m))` read off the even coordinates.
pub fn parameter_slice(x: &Point, n: u32, len: usize) -> Vec<u32> {
    (0..len).map(|m| x.at(2 * pair_index(n, m as u32) as usize)).collect()
}

/// The block encoding of Baire space into Cantor space: each entry `v`
/// becomes `v` zeros followed by a one. Only eventually-zero inputs have
/// finitely determined images (their blocks become all ones).
pub fn baire_to_cantor(f: &Point) -> Result<Point> {
    if f.tail() != 0 {
        return Err(Error::NotRepresentable(
            "block image of a nonzero tail is periodic, not eventually constant".into(),
        ));
    }
    let mut bits = Vec::new();
    for &v in f.prefix() {
        bits.extend(std::iter::repeat(0).take(v as usize));
        bits.push(1);
    }
    Ok(Point::new(bits, 1))
}

/// Inverse of [`baire_to_cantor`] on its range.
pub fn cantor_to_baire(y: &Point) -> Result<Point> {
    if y.tail() != 1 {
        return Err(Error::NotInRange("image tails are all ones".into()));
    }
    let mut entries = Vec::new();
    let mut zeros = 0u32;
    for &b in y.prefix() {
        match b {
            0 => zeros += 1,
            1 => {
                entries.push(zeros);
                zeros = 0;
            }
            _ => return Err(Error::NotInRange(format!("non-binary entry {b}"))),
        }
    }
    if zeros > 0 {
        // The tail of ones closes the trailing block.
        entries.push(zeros);
    }
    Ok(Point::new(entries, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq;

    fn cyl(s: Seq) -> BorelCode {
        BorelCode::basic(BasicClopen::Cyl(s))
    }

    fn pt(prefix: Vec<u32>) -> Point {
        Point::new(prefix, 0)
    }

    #[test]
    fn point_normal_form() {
        assert_eq!(Point::new(vec![1, 0, 0], 0), pt(vec![1]));
        assert_eq!(Point::new(vec![1, 1], 1), Point::constant(1));
        assert_ne!(Point::new(vec![0], 1), Point::constant(1));
        assert_eq!(Point::new(vec![2, 0], 0).at(0), 2);
        assert_eq!(Point::new(vec![2, 0], 0).at(5), 0);
    }

    #[test]
    fn eval_examples() {
        let union = BorelCode::connect(
            Connective::Union,
            vec![cyl(seq![0]), cyl(seq![1, 1])],
        );
        assert!(eval(&union, &pt(vec![0, 7])));
        assert!(eval(&union, &pt(vec![1, 1, 3])));
        assert!(!eval(&union, &pt(vec![1, 0])));

        let inter = BorelCode::connect(
            Connective::Intersection,
            vec![cyl(seq![1]), cyl(seq![1, 1])],
        );
        assert!(eval(&inter, &Point::constant(1)));
        assert!(!eval(&inter, &pt(vec![1, 0])));
    }

    #[test]
    fn degenerate_connectives() {
        let empty_union = BorelCode::connect(Connective::Union, vec![]);
        let empty_inter = BorelCode::connect(Connective::Intersection, vec![]);
        for x in [pt(vec![]), pt(vec![3, 1]), Point::constant(2)] {
            assert!(!eval(&empty_union, &x));
            assert!(eval(&empty_inter, &x));
        }
    }

    #[test]
    fn validation_rejects_bad_labelings() {
        let t = FinTree::prefix_closure([seq![0]]);
        // Root unlabeled.
        let mut leaf = BTreeMap::new();
        leaf.insert(seq![0], BasicClopen::Empty);
        assert!(BorelCode::new(t.clone(), BTreeMap::new(), leaf.clone()).is_err());
        // Leaf label on a node with children.
        let mut bad_leaf = leaf.clone();
        bad_leaf.insert(Seq::empty(), BasicClopen::Empty);
        assert!(BorelCode::new(t.clone(), BTreeMap::new(), bad_leaf).is_err());
        // Double label.
        let mut kind = BTreeMap::new();
        kind.insert(Seq::empty(), Connective::Union);
        let mut double = leaf.clone();
        double.insert(Seq::empty(), BasicClopen::Empty);
        assert!(BorelCode::new(t, kind, double).is_err());
    }

    #[test]
    fn support_bounds_what_eval_reads() {
        let c = BorelCode::connect(
            Connective::Union,
            vec![cyl(seq![0, 1]), BorelCode::basic(BasicClopen::Empty)],
        );
        assert_eq!(c.support(), 2);
        // Agreeing below the support means agreeing on membership.
        assert_eq!(eval(&c, &pt(vec![0, 1, 9])), eval(&c, &pt(vec![0, 1])));
    }

    #[test]
    fn dual_of_a_union_of_cylinders_covers_the_window() {
        let c = BorelCode::connect(Connective::Union, vec![cyl(seq![0]), cyl(seq![1])]);
        let d = dual(&c, 2).unwrap();
        for x in [pt(vec![0]), pt(vec![1]), pt(vec![0, 1]), Point::constant(1)] {
            assert!(!eval(&d, &x));
            assert!(eval(&c, &x));
        }
    }

    #[test]
    fn dual_flips_empty_to_everything() {
        let d = dual(&BorelCode::basic(BasicClopen::Empty), 2).unwrap();
        assert!(eval(&d, &pt(vec![1, 0, 1])));
    }

    #[test]
    fn dual_is_an_involution_on_window_points() {
        let c = BorelCode::connect(
            Connective::Intersection,
            vec![cyl(seq![1]), BorelCode::connect(Connective::Union, vec![cyl(seq![0, 0])])],
        );
        let dd = dual(&dual(&c, 2).unwrap(), 2).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for t in 0..2 {
                    let x = Point::new(vec![a, b], t);
                    assert_eq!(eval(&c, &x), eval(&dd, &x), "{x:?}");
                }
            }
        }
    }

    #[test]
    fn dual_rejects_leaves_outside_the_window() {
        let c = cyl(seq![5]);
        assert!(dual(&c, 2).is_err());
        assert!(dual(&c, 6).is_ok());
    }

    #[test]
    fn encode_field_example() {
        let ids: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        let sets = vec![vec!["x".to_string()]];
        let enc = encode_field(&ids, &sets).unwrap();
        assert_eq!(enc.points["x"], pt(vec![1]));
        assert_eq!(enc.points["y"], pt(vec![]));
        assert!(enc.trace_ok);
        assert!(enc.collisions.is_empty());
    }

    #[test]
    fn encode_field_reports_unseparated_pairs() {
        let ids: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let sets = vec![vec!["x".to_string()]];
        let enc = encode_field(&ids, &sets).unwrap();
        assert_eq!(enc.collisions, vec![("y".to_string(), "z".to_string())]);
        assert!(encode_field(&[ids[0].clone(), ids[0].clone()], &[]).is_err());
    }

    #[test]
    fn pairing_bijects() {
        assert_eq!(pair_index(0, 0), 0);
        assert_eq!(pair_index(1, 0), 1);
        assert_eq!(pair_index(0, 1), 2);
        let mut seen = BTreeSet::new();
        for n in 0..16 {
            for m in 0..16 {
                let k = pair_index(n, m);
                assert!(seen.insert(k));
                assert_eq!(unpair(k), (n, m));
            }
        }
        for k in 0..256u128 {
            let (n, m) = unpair(k);
            assert_eq!(pair_index(n, m), k);
        }
    }

    #[test]
    fn interleaving_reads_back_coordinatewise() {
        let x = pt(vec![1, 0, 1]);
        let y = pt(vec![2, 2]);
        let z = pair_points(&x, &y).unwrap();
        for i in 0..6 {
            assert_eq!(z.at(2 * i), x.at(i));
            assert_eq!(z.at(2 * i + 1), y.at(i));
        }
        assert!(pair_points(&x, &Point::constant(1)).is_err());
    }

    #[test]
    fn block_encoding_examples() {
        let z = baire_to_cantor(&pt(vec![2, 0, 1])).unwrap();
        let bits: Vec<u32> = (0..6).map(|i| z.at(i)).collect();
        assert_eq!(bits, vec![0, 0, 1, 1, 0, 1]);
        assert_eq!(z.at(6), 1);

        let all_ones = baire_to_cantor(&pt(vec![])).unwrap();
        assert_eq!(all_ones, Point::constant(1));

        assert!(baire_to_cantor(&Point::constant(2)).is_err());
    }

    #[test]
    fn block_encoding_round_trips_and_is_injective() {
        let mut images = BTreeSet::new();
        let mut inputs = BTreeSet::new();
        for len in 0..=4usize {
            let mut idx = vec![0u32; len];
            loop {
                let f = Point::new(idx.clone(), 0);
                if inputs.insert(f.clone()) {
                    let z = baire_to_cantor(&f).unwrap();
                    assert!(images.insert(z.clone()), "collision at {f:?}");
                    assert_eq!(cantor_to_baire(&z).unwrap(), f);
                }
                // Odometer over entries < 4.
                let mut i = len;
                loop {
                    if i == 0 {
                        break;
                    }
                    idx[i - 1] += 1;
                    if idx[i - 1] < 4 {
                        break;
                    }
                    idx[i - 1] = 0;
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
            }
        }
        assert!(cantor_to_baire(&pt(vec![0, 1])).is_err());
    }

    #[test]
    fn code_serialization_round_trips() {
        let c = BorelCode::connect(
            Connective::Union,
            vec![cyl(seq![0]), BorelCode::basic(BasicClopen::Empty)],
        );
        let j = serde_json::to_string(&c).unwrap();
        let back: BorelCode = serde_json::from_str(&j).unwrap();
        assert_eq!(back, c);
        // Unlabeled nodes are rejected at the boundary.
        let bad = r#"{"tree":[[]],"kind":{},"leaf":{}}"#;
        assert!(serde_json::from_str::<BorelCode>(bad).is_err());
    }

    /// A code over a random shape, labeled from a byte stream.
    fn seeded_code(paths: Vec<Vec<u32>>, labels: &[u8]) -> BorelCode {
        let t = FinTree::prefix_closure(paths.into_iter().map(Seq));
        let mut kind = BTreeMap::new();
        let mut leaf = BTreeMap::new();
        for (i, s) in t.nodes().iter().enumerate() {
            let b = labels[i % labels.len()];
            if t.children(s).is_empty() {
                leaf.insert(
                    s.clone(),
                    match b % 3 {
                        0 => BasicClopen::Empty,
                        1 => BasicClopen::Cyl(seq![0]),
                        _ => BasicClopen::Cyl(seq![1, 2]),
                    },
                );
            } else {
                kind.insert(
                    s.clone(),
                    if b % 2 == 0 { Connective::Union } else { Connective::Intersection },
                );
            }
        }
        BorelCode::new(t, kind, leaf).expect("labels partition the shape")
    }

    proptest::proptest! {
        #[test]
        fn prop_eval_reads_nothing_beyond_the_support(
            paths in proptest::collection::vec(
                proptest::collection::vec(0u32..3, 0..4), 0..6),
            labels in proptest::collection::vec(0u8..6, 1..8),
            prefix in proptest::collection::vec(0u32..3, 0..4),
            bump in 0usize..3,
            value in 0u32..3,
        ) {
            let c = seeded_code(paths, &labels);
            let x = Point::new(prefix.clone(), 0);
            let mut far = prefix;
            let at = c.support() + bump;
            while far.len() <= at {
                far.push(0);
            }
            far[at] = value;
            proptest::prop_assert_eq!(eval(&c, &Point::new(far, 0)), eval(&c, &x));
        }
    }
}
