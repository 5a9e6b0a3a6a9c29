//! Random Cantor sets, their product squares and the type map.
//!
//! A tree node is identified by its heap index: the root is `1` and node `i`
//! has children `2i` (left, address digit `1`) and `2i + 1` (right, digit
//! `2`). The level of node `i` is `floor(log2 i)`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::intervals::{Interval, IntervalSet};
use crate::params::Params;
use crate::rng;
use crate::{Error, Result};

/// Tolerance for geometric checks on sampled trees (offsets can come within
/// one ulp of `t`).
pub const GEOMETRY_TOLERANCE: f64 = 1e-12;

/// Either a type in `[-1, 1]` or `None` for "no type".
pub type TypeValue = Option<f64>;

/// Offsets `U_w` of one random Cantor set, stored in heap order.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetTree {
    depth: usize,
    offsets: Vec<f64>,
}

/// Samples the offsets of every node down to `depth`, each uniform on `[0, t]`.
pub fn sample_offset_tree(p: &Params, depth: usize, seed: u64, tree_id: u64) -> OffsetTree {
    assert!(depth >= 1, "depth must be at least 1");
    let t = p.t();
    let n = 1usize << (depth + 1);
    let mut offsets = Vec::with_capacity(n);
    offsets.extend_from_slice(&[0.0, 0.0]);
    let mut stream = rng::tree_stream(seed, tree_id);
    offsets.extend((2..n).map(|_| stream.gen::<f64>() * t));
    OffsetTree { depth, offsets }
}

impl OffsetTree {
    /// Builds a tree from explicit offsets for addresses in heap order
    /// starting at index 2; `offsets.len()` must be `2^(depth+1) - 2`.
    pub fn from_offsets(depth: usize, offsets: &[f64]) -> Result<Self> {
        let want = (1usize << (depth + 1)) - 2;
        if depth == 0 || offsets.len() != want {
            return Err(Error::InvalidParams(format!(
                "a depth-{depth} tree needs {want} offsets, got {}",
                offsets.len()
            )));
        }
        let mut v = vec![0.0, 0.0];
        v.extend_from_slice(offsets);
        Ok(Self { depth, offsets: v })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Offset of the node with the given heap index (`>= 2`).
    pub fn offset(&self, heap_index: usize) -> f64 {
        self.offsets[heap_index]
    }

    /// Offset for an address over `{1, 2}` such as `"121"`.
    pub fn offset_at(&self, address: &str) -> Option<f64> {
        let i = heap_index(address)?;
        (i >= 2 && i < self.offsets.len()).then(|| self.offsets[i])
    }

    /// Heap-indexed left endpoints of every interval up to the full depth.
    pub fn left_endpoints(&self, p: &Params) -> Vec<f64> {
        let (a, b) = (p.a(), p.b());
        let right_shift = 0.5 + 0.5 * a;
        let mut left = vec![0.0; self.offsets.len()];
        let mut len = 1.0;
        for level in 1..=self.depth {
            for i in (1usize << level)..(1usize << (level + 1)) {
                let shift = if i % 2 == 0 { b } else { right_shift };
                left[i] = left[i / 2] + len * (shift + self.offsets[i]);
            }
            len *= a;
        }
        left
    }

    /// Serializable view: address → offset.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Dump {
            depth: usize,
            offsets: BTreeMap<String, f64>,
        }
        let offsets = (2..self.offsets.len())
            .map(|i| (address_of(i), self.offsets[i]))
            .collect();
        serde_json::to_value(Dump {
            depth: self.depth,
            offsets,
        })
        .expect("tree serializes")
    }
}

/// Heap index of an address string over `{1, 2}`; the empty string is the root.
pub fn heap_index(address: &str) -> Option<usize> {
    address.bytes().try_fold(1usize, |i, c| match c {
        b'1' => Some(2 * i),
        b'2' => Some(2 * i + 1),
        _ => None,
    })
}

/// Address string over `{1, 2}` of a heap index.
pub fn address_of(heap_index: usize) -> String {
    assert!(heap_index >= 1);
    let level = heap_index.ilog2();
    (0..level)
        .rev()
        .map(|k| if heap_index >> k & 1 == 0 { '1' } else { '2' })
        .collect()
}

fn check_depth(requested: usize, depth: usize) -> Result<()> {
    if requested > depth {
        return Err(Error::DepthExceeded { requested, depth });
    }
    Ok(())
}

/// The `2^n` level-`n` intervals, in address order.
pub fn level_intervals(tree: &OffsetTree, p: &Params, n: usize) -> Result<IntervalSet> {
    check_depth(n, tree.depth)?;
    let left = tree.left_endpoints(p);
    let len = p.a().powi(n as i32);
    let v = left[(1 << n)..(1 << (n + 1))]
        .iter()
        .map(|&lo| Interval::new(lo, lo + len))
        .collect();
    Ok(IntervalSet::from_sorted_disjoint(v))
}

/// A level-`n` product square `[u, u + side] x [v, v + side]`.
///
/// `x_node` and `y_node` are heap indices into the first (horizontal) and
/// second (vertical) tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Square {
    pub level: usize,
    pub u: f64,
    pub v: f64,
    pub side: f64,
    pub x_node: usize,
    pub y_node: usize,
}

/// Clockwise label of a child square from its two address digits:
/// `(1, 2) -> Q1`, `(2, 2) -> Q2`, `(2, 1) -> Q3`, `(1, 1) -> Q4`.
pub fn label_of(x_digit: u8, y_digit: u8) -> u8 {
    match (x_digit, y_digit) {
        (1, 2) => 1,
        (2, 2) => 2,
        (2, 1) => 3,
        (1, 1) => 4,
        _ => panic!("address digits must be 1 or 2"),
    }
}

impl Square {
    pub fn unit() -> Self {
        Self {
            level: 0,
            u: 0.0,
            v: 0.0,
            side: 1.0,
            x_node: 1,
            y_node: 1,
        }
    }

    /// The 45° projection `[v - u - side, v - u + side]`.
    pub fn project(&self) -> Interval {
        let d = self.v - self.u;
        Interval::new(d - self.side, d + self.side)
    }

    /// Type of the square with respect to the line `y = x' + x`.
    pub fn phi(&self, x: f64) -> TypeValue {
        self.project()
            .contains(x)
            .then(|| ((self.u - self.v + x) / self.side).clamp(-1.0, 1.0))
    }

    pub fn address(&self) -> (String, String) {
        (address_of(self.x_node), address_of(self.y_node))
    }

    /// Q-labels (1..=4) of the square and its ancestors, coarsest first.
    pub fn labels(&self) -> Vec<u8> {
        (0..self.level)
            .rev()
            .map(|k| {
                let dx = (self.x_node >> k & 1) as u8 + 1;
                let dy = (self.y_node >> k & 1) as u8 + 1;
                label_of(dx, dy)
            })
            .collect()
    }
}

/// Free-function form of [`Square::phi`].
pub fn phi(q: &Square, x: f64) -> TypeValue {
    q.phi(x)
}

/// Free-function form of [`Square::project`].
pub fn project(q: &Square) -> Interval {
    q.project()
}

/// Two trees with precomputed endpoints, for walking `C1^n x C2^n`.
#[derive(Debug, Clone)]
pub struct ProductSet {
    left1: Vec<f64>,
    left2: Vec<f64>,
    sides: Vec<f64>,
    depth: usize,
}

impl ProductSet {
    pub fn new(t1: &OffsetTree, t2: &OffsetTree, p: &Params) -> Self {
        let depth = t1.depth.min(t2.depth);
        let sides = (0..=depth).map(|n| p.a().powi(n as i32)).collect();
        Self {
            left1: t1.left_endpoints(p),
            left2: t2.left_endpoints(p),
            sides,
            depth,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn root(&self) -> Square {
        Square::unit()
    }

    /// The four children in label order Q1, Q2, Q3, Q4.
    pub fn children(&self, q: &Square) -> [Square; 4] {
        debug_assert!(q.level < self.depth);
        let level = q.level + 1;
        let side = self.sides[level];
        let make = |xd: usize, yd: usize| {
            let (xi, yi) = (2 * q.x_node + xd, 2 * q.y_node + yd);
            Square {
                level,
                u: self.left1[xi],
                v: self.left2[yi],
                side,
                x_node: xi,
                y_node: yi,
            }
        };
        [make(0, 1), make(1, 1), make(1, 0), make(0, 0)]
    }

    /// All level-`n` squares, depth-first in label order.
    pub fn squares(&self, n: usize) -> Result<Vec<Square>> {
        check_depth(n, self.depth)?;
        let mut out = Vec::with_capacity(1 << (2 * n));
        let mut stack = vec![self.root()];
        while let Some(q) = stack.pop() {
            if q.level == n {
                out.push(q);
            } else {
                stack.extend(self.children(&q).into_iter().rev());
            }
        }
        Ok(out)
    }
}

/// The `4^n` level-`n` squares of `C1^n x C2^n`; `t1` is the horizontal axis.
pub fn product_squares(
    t1: &OffsetTree,
    t2: &OffsetTree,
    p: &Params,
    n: usize,
) -> Result<Vec<Square>> {
    check_depth(n, t1.depth.min(t2.depth))?;
    ProductSet::new(t1, t2, p).squares(n)
}

/// Types of the four level-one squares `Q1..Q4`, each `None` if out of range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Offspring(pub [TypeValue; 4]);

/// Index sets (bit `i - 1` for `Q_i`) that the geometry admits.
pub const ADMISSIBLE_MASKS: [u8; 6] = [0b0000, 0b0001, 0b0010, 0b0100, 0b1000, 0b1010];

impl Offspring {
    /// Present children as `(index in 1..=4, type)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i + 1, v)))
    }

    pub fn mask(&self) -> u8 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |m, (i, v)| if v.is_some() { m | 1 << i } else { m })
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_admissible(&self) -> bool {
        ADMISSIBLE_MASKS.contains(&self.mask())
    }
}

/// Raw (unclipped) types of `Q1..Q4` for a parent of type `x`.
///
/// `u1, u2` are the horizontal tree's level-one offsets, `u3, u4` the
/// vertical tree's.
pub fn offspring_raw(x: f64, u: [f64; 4], p: &Params) -> [f64; 4] {
    let a = p.a();
    let h = p.side_shift();
    let [u1, u2, u3, u4] = u;
    [
        (-h + u1 - u4 + x) / a,
        (u2 - u4 + x) / a,
        (h + u2 - u3 + x) / a,
        (u1 - u3 + x) / a,
    ]
}

pub fn offspring_types(x: f64, u: [f64; 4], p: &Params) -> Offspring {
    let raw = offspring_raw(x, u, p);
    Offspring(raw.map(|v| (-1.0..=1.0).contains(&v).then_some(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, proptest};

    fn simple() -> Params {
        Params::new(0.26, 0.01).unwrap()
    }

    fn general() -> Params {
        Params::new(0.28, 0.05).unwrap()
    }

    #[test]
    fn depth_one_offsets_in_range() {
        let p = simple();
        let tree = sample_offset_tree(&p, 1, 7, 0);
        for addr in ["1", "2"] {
            let u = tree.offset_at(addr).unwrap();
            assert!((0.0..=0.10).contains(&u));
        }
        assert_eq!(tree.offset_at("11"), None);
    }

    #[test]
    fn sampling_is_deterministic_and_seekable() {
        let p = general();
        let t1 = sample_offset_tree(&p, 6, 42, 5);
        assert_eq!(t1, sample_offset_tree(&p, 6, 42, 5));
        assert_ne!(t1, sample_offset_tree(&p, 6, 42, 6));
        let deeper = sample_offset_tree(&p, 8, 42, 5);
        for i in 2..(1 << 7) {
            assert_eq!(t1.offset(i), deeper.offset(i));
            let direct = rng::tree_node_uniform(42, 5, i as u64) * p.t();
            assert_eq!(t1.offset(i), direct);
        }
    }

    #[test]
    fn offsets_have_uniform_mean() {
        let p = simple();
        let tree = sample_offset_tree(&p, 16, 1, 0);
        let n = (1usize << 17) - 2;
        let mean: f64 = (2..n + 2).map(|i| tree.offset(i)).sum::<f64>() / n as f64;
        let sigma = p.t() / 12f64.sqrt() / (n as f64).sqrt();
        assert!((mean - p.t() / 2.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn addresses_round_trip() {
        for i in 1..200 {
            assert_eq!(heap_index(&address_of(i)), Some(i));
        }
        assert_eq!(address_of(2), "1");
        assert_eq!(address_of(7), "22");
        assert_eq!(heap_index("3"), None);
    }

    #[test]
    fn zero_offsets_place_level_one_at_gaps() {
        let p = simple();
        let tree = OffsetTree::from_offsets(1, &[0.0, 0.0]).unwrap();
        let s = level_intervals(&tree, &p, 1).unwrap();
        let (a, b) = (p.a(), p.b());
        let want = [(b, b + a), (0.5 + a / 2.0, 0.5 + a / 2.0 + a)];
        for (iv, (lo, hi)) in s.iter().zip(want) {
            assert!((iv.lo - lo).abs() < 1e-15 && (iv.hi - hi).abs() < 1e-15);
        }
        assert!(matches!(
            level_intervals(&tree, &p, 2),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn json_dump_lists_addresses() {
        let tree = OffsetTree::from_offsets(2, &[0.01, 0.02, 0.03, 0.04, 0.05, 0.06]).unwrap();
        let json = tree.to_json();
        assert_eq!(json["depth"], 2);
        assert_eq!(json["offsets"]["21"], 0.05);
        assert_eq!(json["offsets"].as_object().unwrap().len(), 6);
    }

    #[test]
    fn level_one_square_corners() {
        let p = general();
        let t1 = sample_offset_tree(&p, 2, 3, 0);
        let t2 = sample_offset_tree(&p, 2, 3, 1);
        let (a, b) = (p.a(), p.b());
        let r = 0.5 + a / 2.0;
        let [u1, u2] = [t1.offset(2), t1.offset(3)];
        let [u3, u4] = [t2.offset(2), t2.offset(3)];
        let qs = product_squares(&t1, &t2, &p, 1).unwrap();
        let want = [
            (b + u1, r + u4),
            (r + u2, r + u4),
            (r + u2, b + u3),
            (b + u1, b + u3),
        ];
        for (k, (q, (u, v))) in qs.iter().zip(want).enumerate() {
            assert!(
                (q.u - u).abs() < 1e-15 && (q.v - v).abs() < 1e-15,
                "Q{}",
                k + 1
            );
            assert_eq!(q.labels(), vec![k as u8 + 1]);
            assert!((q.side - a).abs() < 1e-15);
        }
        // the relabeling Q'_{11}=Q4, Q'_{12}=Q1, Q'_{21}=Q3, Q'_{22}=Q2
        let addrs: Vec<_> = qs.iter().map(|q| q.address()).collect();
        let pairs: Vec<(&str, &str)> = addrs
            .iter()
            .map(|(x, y)| (x.as_str(), y.as_str()))
            .collect();
        assert_eq!(pairs, [("1", "2"), ("2", "2"), ("2", "1"), ("1", "1")]);
    }

    #[test]
    fn level_two_squares_nest() {
        let p = simple();
        let t1 = sample_offset_tree(&p, 3, 11, 0);
        let t2 = sample_offset_tree(&p, 3, 11, 1);
        let l1 = product_squares(&t1, &t2, &p, 1).unwrap();
        let l2 = product_squares(&t1, &t2, &p, 2).unwrap();
        assert_eq!(l2.len(), 16);
        for q in &l2 {
            let parents = l1
                .iter()
                .filter(|r| {
                    r.u <= q.u
                        && q.u + q.side <= r.u + r.side
                        && r.v <= q.v
                        && q.v + q.side <= r.v + r.side
                })
                .count();
            assert_eq!(parents, 1);
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(Square::unit().phi(0.5), Some(0.5));
        assert_eq!(Square::unit().project(), Interval::new(-1.0, 1.0));
        let q = Square {
            level: 1,
            u: 0.2,
            v: 0.5,
            side: 0.1,
            x_node: 2,
            y_node: 3,
        };
        let pr = q.project();
        assert!((pr.lo - 0.2).abs() < 1e-15 && (pr.hi - 0.4).abs() < 1e-15);
        assert!((q.phi(0.35).unwrap() - 0.5).abs() < 1e-12);
        // the line through the upper-left corner (u, v + side)
        assert!((q.phi(q.v + q.side - q.u).unwrap() - 1.0).abs() < 1e-12);
        assert!((q.phi(q.v - q.side - q.u).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(q.phi(q.project().hi), Some(1.0));
        assert_eq!(q.phi(0.41), None);
    }

    #[test]
    fn offspring_at_zero_with_equal_offsets() {
        for p in [simple(), general()] {
            let o = offspring_types(0.0, [0.02; 4], &p);
            assert_eq!(o.mask(), 0b1010);
            assert_eq!(o.0[1], Some(0.0));
            assert_eq!(o.0[3], Some(0.0));
            let raw = offspring_raw(0.0, [0.02; 4], &p);
            let h = p.side_shift() / p.a();
            assert!((raw[0] + h).abs() < 1e-12 && (raw[2] - h).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn level_interval_invariants(seed in any::<u64>(), general_case in any::<bool>()) {
            let p = if general_case { general() } else { simple() };
            let tree = sample_offset_tree(&p, 7, seed, 0);
            let left = tree.left_endpoints(&p);
            for n in 1..=7 {
                let s = level_intervals(&tree, &p, n).unwrap();
                let len = p.a().powi(n as i32);
                prop_assert_eq!(s.len(), 1 << n);
                for (k, iv) in s.iter().enumerate() {
                    let i = (1 << n) + k;
                    let plen = len / p.a();
                    prop_assert!((iv.length() - len).abs() < 1e-12);
                    prop_assert!(iv.lo >= left[i / 2] - 1e-12 && iv.hi <= left[i / 2] + plen + 1e-12);
                }
                for w in s.as_slice().windows(2) {
                    prop_assert!(w[1].lo - w[0].hi >= len - GEOMETRY_TOLERANCE);
                }
            }
        }

        #[test]
        fn project_phi_duality(u in 0.0f64..0.9, v in 0.0f64..0.9, level in 1usize..6, x in -1.0f64..1.0) {
            let side = 0.26f64.powi(level as i32);
            let q = Square { level, u, v, side, x_node: 1 << level, y_node: 1 << level };
            prop_assert_eq!(q.project().contains(x), q.phi(x).is_some());
            if let Some(f) = q.phi(x) {
                prop_assert!((-1.0..=1.0).contains(&f));
            }
        }

        #[test]
        fn offspring_reflection(x in -1.0f64..1.0, u in prop::array::uniform4(0.0f64..0.03)) {
            let p = general();
            let [u1, u2, u3, u4] = u;
            let o = offspring_raw(x, u, &p);
            let r = offspring_raw(-x, [u3, u4, u1, u2], &p);
            prop_assert!((r[0] + o[2]).abs() < 1e-12);
            prop_assert!((r[2] + o[0]).abs() < 1e-12);
            prop_assert!((r[1] + o[1]).abs() < 1e-12);
            prop_assert!((r[3] + o[3]).abs() < 1e-12);
        }
    }

    #[test]
    fn offspring_masks_are_admissible() {
        for p in [simple(), general()] {
            let mut rng = rng::trial_stream(5, 0);
            for _ in 0..100_000 {
                let x = rng.gen_range(-1.0..=1.0);
                let u = [(); 4].map(|_| rng.gen::<f64>() * p.t());
                assert!(offspring_types(x, u, &p).is_admissible());
            }
        }
    }
}
