//! Finite unions of closed intervals on the real line.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is reversed");
        Self { lo, hi }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Sorted, pairwise disjoint closed intervals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        Self {
            intervals: vec![Interval::new(lo, hi)],
        }
    }

    /// Normalizes arbitrary intervals: sorts them and merges any two whose gap
    /// is at most `merge_gap`.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I, merge_gap: f64) -> Self {
        let mut v: Vec<Interval> = items.into_iter().filter(|iv| iv.lo <= iv.hi).collect();
        v.sort_unstable_by(|x, y| x.lo.total_cmp(&y.lo));
        Self {
            intervals: merge_sorted(v, merge_gap),
        }
    }

    /// Wraps intervals that are already sorted and disjoint.
    ///
    /// Panics in debug builds if the invariant does not hold.
    pub fn from_sorted_disjoint(intervals: Vec<Interval>) -> Self {
        debug_assert!(intervals.windows(2).all(|w| w[0].hi < w[1].lo));
        Self { intervals }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.intervals.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn longest(&self) -> Option<Interval> {
        self.intervals
            .iter()
            .copied()
            .max_by(|x, y| x.length().total_cmp(&y.length()))
    }

    /// Index of the component containing `x`.
    pub fn component_of(&self, x: f64) -> Option<usize> {
        let i = self.intervals.partition_point(|iv| iv.hi < x);
        (i < self.intervals.len() && self.intervals[i].lo <= x).then_some(i)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.component_of(x).is_some()
    }

    /// Whether `[lo, hi]` lies inside a single component.
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.component_of(lo)
            .is_some_and(|i| self.intervals[i].hi >= hi)
    }

    pub fn union(&self, other: &IntervalSet, merge_gap: f64) -> IntervalSet {
        IntervalSet::from_intervals(
            self.intervals.iter().chain(other.intervals.iter()).copied(),
            merge_gap,
        )
    }

    /// Intersection; pieces of non-positive length are dropped.
    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let x = self.intervals[i];
            let y = other.intervals[j];
            let lo = x.lo.max(y.lo);
            let hi = x.hi.min(y.hi);
            if lo < hi {
                out.push(Interval { lo, hi });
            }
            if x.hi < y.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intersect_interval(&self, lo: f64, hi: f64) -> IntervalSet {
        self.intersect(&IntervalSet::single(lo, hi))
    }

    /// Removes the closed interval `[lo, hi]` (the open remainder is kept as
    /// closed pieces).
    pub fn subtract_interval(&self, lo: f64, hi: f64) -> IntervalSet {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        for iv in &self.intervals {
            if iv.hi < lo || iv.lo > hi {
                out.push(*iv);
                continue;
            }
            if iv.lo < lo {
                out.push(Interval { lo: iv.lo, hi: lo });
            }
            if iv.hi > hi {
                out.push(Interval { lo: hi, hi: iv.hi });
            }
        }
        IntervalSet { intervals: out }
    }

    /// Whether every point of `other` lies in `self`, up to `tol` at joints.
    pub fn contains_set(&self, other: &IntervalSet, tol: f64) -> bool {
        other.intervals.iter().all(|iv| {
            self.component_of(iv.lo + tol.min(iv.length() / 2.0))
                .is_some_and(|i| self.intervals[i].hi >= iv.hi - tol)
        })
    }
}

fn merge_sorted(v: Vec<Interval>, merge_gap: f64) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for iv in v {
        match out.last_mut() {
            Some(last) if iv.lo - last.hi <= merge_gap => {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

impl<'a> IntoIterator for &'a IntervalSet {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;

    fn into_iter(self) -> Self::IntoIter {
        self.intervals.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn merge_and_query() {
        let s = IntervalSet::from_intervals([iv(3.0, 4.0), iv(0.0, 1.0), iv(0.5, 2.0)], 0.0);
        assert_eq!(s.as_slice(), &[iv(0.0, 2.0), iv(3.0, 4.0)]);
        assert!(s.contains(2.0));
        assert!(!s.contains(2.5));
        assert!(s.covers(0.1, 1.9));
        assert!(!s.covers(1.0, 3.5));
        assert_eq!(s.component_of(3.5), Some(1));
        assert!((s.total_length() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn subtract_splits() {
        let s = IntervalSet::single(-1.0, 1.0).subtract_interval(-0.2, 0.3);
        assert_eq!(s.as_slice(), &[iv(-1.0, -0.2), iv(0.3, 1.0)]);
    }

    #[test]
    fn touching_intervals_merge_within_gap() {
        let s = IntervalSet::from_intervals([iv(0.0, 1.0), iv(1.0 + 1e-16, 2.0)], 1e-15);
        assert_eq!(s.len(), 1);
    }

    proptest! {
        #[test]
        fn normalized_sets_are_sorted_and_disjoint(raw in prop::collection::vec((-10.0f64..10.0, 0.0f64..3.0), 0..40)) {
            let s = IntervalSet::from_intervals(raw.iter().map(|&(lo, w)| iv(lo, lo + w)), 0.0);
            for w in s.as_slice().windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
            for &(lo, w) in &raw {
                prop_assert!(s.covers(lo, lo + w));
            }
            let clip = s.intersect_interval(-1.0, 1.0);
            prop_assert!(clip.total_length() <= 2.0 + 1e-12);
        }
    }
}
