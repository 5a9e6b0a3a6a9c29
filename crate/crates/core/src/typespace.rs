//! The type space `T(eps)` and the support sets `E_n(x) = {y : m_n(x, y) > 0}`.
//!
//! In the general case the construction removes `2 * 3^(r-1)` closed holes of
//! length `rho_r` in round `r = 1..=l`, then shrinks each of the `3^l`
//! remaining components by `eps` at both ends.

use serde::Serialize;

use crate::intervals::{Interval, IntervalSet};
use crate::kernel::{stripe, LineFamily};
use crate::params::{Params, RegionClass};
use crate::{Error, Result};

/// Merge gap for support-set arithmetic.
pub const SUPPORT_MERGE_GAP: f64 = 1e-12;

/// One removed hole `[u, v]`. `address` holds `i_1 in {1, 2}` followed by
/// stripe indices `k in {1, 2, 3}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Removal {
    pub round: usize,
    pub address: Vec<u8>,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TypeSpace {
    pub epsilon: f64,
    pub level_l: usize,
    /// Components of `T^l`, before the `eps` shrink.
    pub unshrunk: IntervalSet,
    components: IntervalSet,
    pub ledger: Vec<Removal>,
    pub rho_seq: Vec<f64>,
}

impl TypeSpace {
    pub fn components(&self) -> &IntervalSet {
        &self.components
    }

    pub fn contains(&self, y: f64) -> bool {
        self.components.contains(y)
    }

    pub fn total_length(&self) -> f64 {
        self.components.total_length()
    }

    /// The component containing 0.
    pub fn middle(&self) -> Interval {
        let i = self.components.component_of(0.0).expect("0 lies in T");
        self.components.as_slice()[i]
    }
}

/// The sequence `rho_1, ..., rho_{l+1}` and `l`; empty with `l = 0` in the
/// simple case.
pub fn endpoint_recursion(p: &Params) -> (Vec<f64>, usize) {
    let rho1 = p.derive().rho1;
    if rho1 < 0.0 && p.classify().ok() != Some(RegionClass::General) {
        return (Vec::new(), 0);
    }
    let drop = 1.0 - 3.0 * p.a() - 2.0 * p.b();
    let mut seq = vec![rho1];
    while *seq.last().unwrap() >= 0.0 {
        let next = p.a() * seq.last().unwrap() - drop;
        seq.push(next);
    }
    let l = seq.len() - 1;
    (seq, l)
}

/// Supremum of admissible `eps` values.
pub fn epsilon_bound(p: &Params) -> f64 {
    let (seq, _) = endpoint_recursion(p);
    match seq.last() {
        None => p.t() / (2.0 * p.a()) - p.c(),
        Some(&last) => (-last / (2.0 * p.a())).min(p.t()),
    }
}

pub fn default_epsilon(p: &Params) -> f64 {
    0.5 * epsilon_bound(p)
}

pub fn build(p: &Params, eps: f64) -> Result<TypeSpace> {
    let bound = epsilon_bound(p);
    if !(eps > 0.0 && eps < bound) {
        return Err(Error::EpsilonTooLarge {
            epsilon: eps,
            bound,
        });
    }
    let (a, c) = (p.a(), p.c());
    let (rho_seq, l) = endpoint_recursion(p);
    let lines = LineFamily::new(p);
    let mut pre = IntervalSet::single(-1.0 + c, 1.0 - c);
    let mut ledger = Vec::new();
    if l >= 1 {
        let u1 = -a * (1.0 + c);
        let v1 = a * (c - 1.0) - p.t();
        let mut frontier = vec![
            Removal {
                round: 1,
                address: vec![1],
                u: u1,
                v: v1,
            },
            Removal {
                round: 1,
                address: vec![2],
                u: -v1,
                v: -u1,
            },
        ];
        for round in 1..=l {
            for hole in &frontier {
                pre = pre.subtract_interval(hole.u, hole.v);
            }
            let next = if round < l {
                frontier
                    .iter()
                    .flat_map(|w| {
                        (1..=3).map(move |k| {
                            let mut address = w.address.clone();
                            address.push(k as u8);
                            Removal {
                                round: round + 1,
                                address,
                                u: a * (w.u - lines.intercepts[2 * k - 1]),
                                v: a * (w.v - lines.intercepts[2 * k - 2]),
                            }
                        })
                    })
                    .collect()
            } else {
                Vec::new()
            };
            ledger.append(&mut frontier);
            frontier = next;
        }
    }
    let want = 3usize.pow(l as u32);
    if pre.len() != want {
        return Err(Error::InternalInconsistency(format!(
            "type space has {} components before shrinking, expected {want}",
            pre.len()
        )));
    }
    let shrunk: Vec<Interval> = pre
        .iter()
        .map(|iv| Interval {
            lo: iv.lo + eps,
            hi: iv.hi - eps,
        })
        .collect();
    if shrunk.iter().any(|iv| iv.lo >= iv.hi) {
        return Err(Error::EpsilonTooLarge {
            epsilon: eps,
            bound,
        });
    }
    Ok(TypeSpace {
        epsilon: eps,
        level_l: l,
        unshrunk: pre,
        components: IntervalSet::from_sorted_disjoint(shrunk),
        ledger,
        rho_seq,
    })
}

fn require_in_t(x: f64, ts: &TypeSpace) -> Result<()> {
    if !ts.contains(x) {
        return Err(Error::XOutsideT(x));
    }
    Ok(())
}

/// `E_1(x)`: the stripe slices over `x`, intersected with `T`.
///
/// Near `|x| = 1` two stripes can meet `[-1, 1]`, so the result may come from
/// two slices.
pub fn support_e1(x: f64, p: &Params, ts: &TypeSpace) -> Result<IntervalSet> {
    require_in_t(x, ts)?;
    Ok(e1_unchecked(x, p, ts))
}

fn e1_unchecked(x: f64, p: &Params, ts: &TypeSpace) -> IntervalSet {
    let slices = (1..=3).map(|k| {
        let (lo, hi) = stripe(k, x, p).expect("stripe index in range");
        Interval { lo, hi }
    });
    let slices = IntervalSet::from_intervals(slices, 0.0);
    ts.components().intersect(&slices)
}

/// One propagation step `E -> union_{y in E} E_1(y)`.
pub fn propagate(set: &IntervalSet, p: &Params, ts: &TypeSpace) -> IntervalSet {
    let lines = LineFamily::new(p);
    let a = p.a();
    let images = set.iter().flat_map(|iv| {
        (1..=3).map(move |k| Interval {
            lo: iv.lo / a + lines.intercepts[2 * k - 1],
            hi: iv.hi / a + lines.intercepts[2 * k - 2],
        })
    });
    let images = IntervalSet::from_intervals(images, SUPPORT_MERGE_GAP);
    let out = ts.components().intersect(&images);
    IntervalSet::from_intervals(out.iter().copied(), SUPPORT_MERGE_GAP)
}

/// `E_n(x)` for `n >= 1`.
pub fn iterate_support(x: f64, n: usize, p: &Params, ts: &TypeSpace) -> Result<IntervalSet> {
    let mut e = support_e1(x, p, ts)?;
    for _ in 1..n {
        e = propagate(&e, p, ts);
    }
    Ok(e)
}

/// Whether a support set equals `T` (up to the merge gap at the ends).
pub fn is_full(set: &IntervalSet, ts: &TypeSpace) -> bool {
    set.len() == ts.components().len()
        && set.iter().zip(ts.components()).all(|(s, c)| {
            (s.lo - c.lo).abs() <= SUPPORT_MERGE_GAP && (s.hi - c.hi).abs() <= SUPPORT_MERGE_GAP
        })
}

/// Scanned `kappa` together with the closed-form candidates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KappaReport {
    pub scanned: f64,
    /// `x` attaining the scanned minimum.
    pub argmin: f64,
    pub step: f64,
    /// Full stripe width `(1 - 3a - 2b) / a`.
    pub stripe_width: f64,
    /// Simple case: `kappa_1 = (t/a - 2c) / 2` and the stated `kappa_2 = 2(1 - 3a - 2b)/a`.
    pub kappa1: Option<f64>,
    pub kappa2_stated: Option<f64>,
    /// General case (a), (b), (c) bounds.
    pub general_a: Option<f64>,
    pub general_b: Option<f64>,
    pub general_c: Option<f64>,
}

pub const KAPPA_SCAN_STEP: f64 = 1e-4;

pub fn kappa(p: &Params, ts: &TypeSpace) -> KappaReport {
    kappa_with_step(p, ts, KAPPA_SCAN_STEP)
}

pub fn kappa_with_step(p: &Params, ts: &TypeSpace, step: f64) -> KappaReport {
    let mut best = (f64::INFINITY, 0.0);
    for c in ts.components() {
        let cells = (c.length() / step).ceil().max(1.0) as usize;
        for k in 0..=cells {
            let x = c.lo + c.length() * k as f64 / cells as f64;
            let len = e1_unchecked(x, p, ts)
                .longest()
                .map_or(0.0, |iv| iv.length());
            if len < best.0 {
                best = (len, x);
            }
        }
    }
    let a = p.a();
    let drop = 1.0 - 3.0 * a - 2.0 * p.b();
    let stripe_width = drop / a;
    let eps = ts.epsilon;
    let mut report = KappaReport {
        scanned: best.0,
        argmin: best.1,
        step,
        stripe_width,
        kappa1: None,
        kappa2_stated: None,
        general_a: None,
        general_b: None,
        general_c: None,
    };
    if ts.level_l == 0 {
        report.kappa1 = Some(0.5 * (drop / (2.0 * a) - 2.0 * p.c()));
        report.kappa2_stated = Some(2.0 * drop / a);
    } else {
        let s = ts.middle().length();
        let rho_l = ts.rho_seq[ts.level_l - 1];
        report.general_a = Some(eps / a - eps);
        report.general_b = Some(stripe_width);
        report.general_c = Some(s.min(0.5 * (stripe_width - (rho_l + 2.0 * eps))));
    }
    report
}

/// Number of steps after which `E_n(x) = T` for all `x`, using the scanned
/// `kappa` in both logarithmic terms.
pub fn support_bound(p: &Params, ts: &TypeSpace) -> usize {
    support_bound_from_kappa(p, ts, kappa(p, ts).scanned)
}

pub fn support_bound_from_kappa(p: &Params, ts: &TypeSpace, kappa: f64) -> usize {
    let span = 2.0 * (1.0 - p.c() - ts.epsilon);
    let steps = ((span / kappa).ln() / (1.0 / p.a()).ln()).ceil().max(0.0) as usize;
    (2 * steps + ts.level_l).max(1)
}
