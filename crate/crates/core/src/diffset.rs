//! Monte Carlo evidence that `C2 - C1 = Proj45(C1 x C2)` contains an interval.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cantor::{offspring_types, sample_offset_tree, OffsetTree, ProductSet, Square};
use crate::intervals::{Interval, IntervalSet};
use crate::par;
use crate::params::Params;
use crate::rng::trial_stream;
use crate::stats::{wilson, Proportion, Z95};
use crate::typespace::TypeSpace;
use crate::{Error, Result};

/// Merge gap for projection unions.
pub const UNION_MERGE_GAP: f64 = 1e-15;

/// How the two Cantor sets' randomness is shared between squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The true product `C1 x C2`: squares in the same row or column share
    /// offsets.
    #[default]
    Shared,
    /// Every square draws fresh offsets for its children (the branching
    /// process without the restriction to `T`).
    Iid,
}

/// Square enumeration for either mode.
#[allow(clippy::large_enum_variant)]
enum Walker {
    Shared(ProductSet),
    Iid {
        rng: rand_chacha::ChaCha8Rng,
        p: Params,
        depth: usize,
    },
}

impl Walker {
    fn new(p: &Params, depth: usize, seed: u64, trial: u64, mode: Mode) -> Self {
        match mode {
            Mode::Shared => {
                let t1 = sample_offset_tree(p, depth, seed, 2 * trial);
                let t2 = sample_offset_tree(p, depth, seed, 2 * trial + 1);
                Walker::Shared(ProductSet::new(&t1, &t2, p))
            }
            Mode::Iid => Walker::Iid {
                rng: trial_stream(seed, trial),
                p: *p,
                depth,
            },
        }
    }

    fn depth(&self) -> usize {
        match self {
            Walker::Shared(ps) => ps.depth(),
            Walker::Iid { depth, .. } => *depth,
        }
    }

    fn children(&mut self, q: &Square) -> [Square; 4] {
        match self {
            Walker::Shared(ps) => ps.children(q),
            Walker::Iid { rng, p, .. } => {
                let (a, b, t) = (p.a(), p.b(), p.t());
                let u = [(); 4].map(|_| rng.gen::<f64>() * t);
                let r = 0.5 + 0.5 * a;
                let s = q.side;
                let (xl, xr) = (q.u + s * (b + u[0]), q.u + s * (r + u[1]));
                let (yl, yr) = (q.v + s * (b + u[2]), q.v + s * (r + u[3]));
                let mk = |u, v, xd, yd| Square {
                    level: q.level + 1,
                    u,
                    v,
                    side: s * a,
                    x_node: 2 * q.x_node + xd,
                    y_node: 2 * q.y_node + yd,
                };
                [
                    mk(xl, yr, 0, 1),
                    mk(xr, yr, 1, 1),
                    mk(xr, yl, 1, 0),
                    mk(xl, yl, 0, 0),
                ]
            }
        }
    }
}

/// The target interval `I = [-K a^N, K a^N]`.
pub fn target_interval(p: &Params, k: f64, n: usize) -> Interval {
    let h = k * p.a().powi(n as i32);
    Interval::new(-h, h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageReport {
    pub depth: usize,
    pub trial: u64,
    pub seed: u64,
    pub target: Interval,
    /// `covers[d - 1]`: `I ⊆ Proj45` of the level-`d` squares.
    pub covers: Vec<bool>,
    /// Squares at each level whose projection meets `I`.
    pub hits: Vec<usize>,
    /// Full projection union per level, when requested.
    pub union_length: Option<Vec<f64>>,
    pub union: Option<IntervalSet>,
}

impl CoverageReport {
    pub fn covers_i(&self) -> bool {
        self.covers.last().copied().unwrap_or(false)
    }

    pub fn monotone(&self) -> bool {
        self.covers.windows(2).all(|w| w[0] || !w[1])
    }
}

/// One trial: which depths cover `I`, found by descending only into squares
/// whose projection meets `I`.
pub fn run_trial(
    p: &Params,
    depth: usize,
    target: Interval,
    seed: u64,
    trial: u64,
    mode: Mode,
) -> CoverageReport {
    assert!(depth >= 1);
    let mut walker = Walker::new(p, depth, seed, trial, mode);
    let mut frontier = vec![Square::unit()];
    let mut covers = Vec::with_capacity(depth);
    let mut hits = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut next = Vec::with_capacity(4 * frontier.len());
        for q in &frontier {
            next.extend(
                walker
                    .children(q)
                    .into_iter()
                    .filter(|c| c.project().intersects(&target)),
            );
        }
        let union = IntervalSet::from_intervals(next.iter().map(Square::project), UNION_MERGE_GAP);
        covers.push(union.covers(target.lo, target.hi));
        hits.push(next.len());
        frontier = next;
    }
    CoverageReport {
        depth,
        trial,
        seed,
        target,
        covers,
        hits,
        union_length: None,
        union: None,
    }
}

/// Union of the projections of all `4^d` level-`d` squares, for each
/// `d = 1..=depth`. Costs `O(4^depth)`.
pub fn full_unions(
    p: &Params,
    depth: usize,
    seed: u64,
    trial: u64,
    mode: Mode,
) -> Vec<IntervalSet> {
    let mut walker = Walker::new(p, depth, seed, trial, mode);
    let mut level = vec![Square::unit()];
    let mut out = Vec::with_capacity(depth);
    for _ in 0..walker.depth() {
        let mut next = Vec::with_capacity(4 * level.len());
        for q in &level {
            next.extend(walker.children(q));
        }
        out.push(IntervalSet::from_intervals(
            next.iter().map(Square::project),
            UNION_MERGE_GAP,
        ));
        level = next;
    }
    out
}

/// [`run_trial`] together with the full unions.
pub fn run_trial_with_union(
    p: &Params,
    depth: usize,
    target: Interval,
    seed: u64,
    trial: u64,
    mode: Mode,
) -> CoverageReport {
    let mut report = run_trial(p, depth, target, seed, trial, mode);
    let unions = full_unions(p, depth, seed, trial, mode);
    report.union_length = Some(unions.iter().map(IntervalSet::total_length).collect());
    report.union = unions.into_iter().last();
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IntervalEstimate {
    pub target: Interval,
    pub depth: usize,
    pub mode: Mode,
    /// Coverage proportion at each depth `1..=depth`.
    pub per_depth: Vec<Proportion>,
    pub monotone_violations: u64,
    pub mean_hits: Vec<f64>,
}

impl IntervalEstimate {
    pub fn at_depth(&self) -> Proportion {
        *self.per_depth.last().expect("depth >= 1")
    }
}

pub fn estimate_interval_prob(
    p: &Params,
    target: Interval,
    depth: usize,
    trials: u64,
    seed: u64,
    mode: Mode,
) -> IntervalEstimate {
    let reports = par::map_range(trials as usize, |k| {
        run_trial(p, depth, target, seed, k as u64, mode)
    });
    let per_depth = (0..depth)
        .map(|d| {
            wilson(
                reports.iter().filter(|r| r.covers[d]).count() as u64,
                trials,
                Z95,
            )
        })
        .collect();
    let mean_hits = (0..depth)
        .map(|d| reports.iter().map(|r| r.hits[d] as f64).sum::<f64>() / trials.max(1) as f64)
        .collect();
    IntervalEstimate {
        target,
        depth,
        mode,
        per_depth,
        monotone_violations: reports.iter().filter(|r| !r.monotone()).count() as u64,
        mean_hits,
    }
}

/// Mean full-union length per depth over `trials` trials.
pub fn mean_union_length(p: &Params, depth: usize, trials: u64, seed: u64, mode: Mode) -> Vec<f64> {
    let all = par::map_range(trials as usize, |k| {
        full_unions(p, depth, seed, k as u64, mode)
            .iter()
            .map(IntervalSet::total_length)
            .collect::<Vec<_>>()
    });
    (0..depth)
        .map(|d| all.iter().map(|v| v[d]).sum::<f64>() / trials.max(1) as f64)
        .collect()
}

/// `(l^-, l^+)`: squares with `-K <= Phi <= 0` and `0 <= Phi <= K`. A square
/// with `Phi = 0` counts in both.
pub fn count_nice(squares: &[Square], x: f64, k: f64) -> (usize, usize) {
    squares
        .iter()
        .filter_map(|q| q.phi(x))
        .fold((0, 0), |(lm, lp), f| {
            (
                lm + usize::from((-k..=0.0).contains(&f)),
                lp + usize::from((0.0..=k).contains(&f)),
            )
        })
}

/// Level `q.level + n` descendants of `q` whose projection contains `x`.
pub fn descendants_hit(ps: &ProductSet, q: &Square, x: f64, n: usize) -> Result<Vec<Square>> {
    let requested = q.level + n;
    if requested > ps.depth() {
        return Err(Error::DepthExceeded {
            requested,
            depth: ps.depth(),
        });
    }
    let mut frontier = vec![*q];
    for _ in 0..n {
        frontier = frontier
            .iter()
            .flat_map(|s| ps.children(s))
            .filter(|c| c.project().contains(x))
            .collect();
    }
    Ok(frontier)
}

/// `l^-_n(Q, x) > delta rho^n` and `l^+_n(Q, x) > delta rho^n`.
#[allow(clippy::too_many_arguments)]
pub fn check_event_a(
    ps: &ProductSet,
    q: &Square,
    x: f64,
    n: usize,
    delta: f64,
    rho: f64,
    k: f64,
) -> Result<bool> {
    let (lm, lp) = count_nice(&descendants_hit(ps, q, x, n)?, x, k);
    let thr = delta * rho.powi(n as i32);
    Ok(lm as f64 > thr && lp as f64 > thr)
}

/// Generation sizes of the lineage of `e(x)` through `C1 x C2` where every
/// square on the path has its type in `T`: the shared-offset analogue of
/// `Z_n(A)`. Returns `counts[g][s]`.
pub fn geometric_counts(
    ps: &ProductSet,
    x: f64,
    n: usize,
    sets: &[Interval],
    ts: &TypeSpace,
) -> Result<Vec<Vec<u64>>> {
    if n > ps.depth() {
        return Err(Error::DepthExceeded {
            requested: n,
            depth: ps.depth(),
        });
    }
    if !ts.contains(x) {
        return Err(Error::XOutsideT(x));
    }
    let mut frontier = vec![(ps.root(), x)];
    let snapshot = |f: &[(Square, f64)]| {
        sets.iter()
            .map(|s| f.iter().filter(|(_, z)| s.contains(*z)).count() as u64)
            .collect::<Vec<_>>()
    };
    let mut out = vec![snapshot(&frontier)];
    for _ in 0..n {
        frontier = frontier
            .iter()
            .flat_map(|(q, _)| ps.children(q))
            .filter_map(|c| c.phi(x).filter(|&z| ts.contains(z)).map(|z| (c, z)))
            .collect();
        out.push(snapshot(&frontier));
    }
    Ok(out)
}

/// Types of the children of a square of type `z` in tree coordinates; equals
/// `Phi` of the child squares.
pub fn child_types(
    ps_trees: (&OffsetTree, &OffsetTree),
    q: &Square,
    z: f64,
    p: &Params,
) -> [Option<f64>; 4] {
    let (t1, t2) = ps_trees;
    let u = [
        t1.offset(2 * q.x_node),
        t1.offset(2 * q.x_node + 1),
        t2.offset(2 * q.y_node),
        t2.offset(2 * q.y_node + 1),
    ];
    offspring_types(z, u, p).0
}

/// Level-`k` subdivision of `I` into `4^{[2 + ... + (k+1)] N}` equal intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SubdivisionScheme {
    #[serde(rename = "K")]
    pub k_const: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub level: usize,
    pub exponent: u64,
    pub count: u128,
    pub length: f64,
    pub g_k: u64,
    pub lo: f64,
    /// `length < 2 K a^{g_k}`, checked in log space.
    pub length_ok: bool,
}

impl SubdivisionScheme {
    pub fn center(&self, index: u128) -> Option<f64> {
        (index < self.count).then_some(self.lo + (index as f64 + 0.5) * self.length)
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.lo + (i as f64 + 0.5) * self.length)
    }
}

/// `sum_{j=2}^{k+1} j * N`.
pub fn subdivision_exponent(n: usize, k: usize) -> u64 {
    let k = k as u64;
    n as u64 * ((k + 1) * (k + 2) / 2 - 1)
}

pub fn subdivision(k_const: f64, n: usize, a: f64, k: usize) -> Result<SubdivisionScheme> {
    assert!(k >= 1, "subdivision level starts at 1");
    let exponent = subdivision_exponent(n, k);
    if 2 * exponent >= 128 {
        return Err(Error::Overflow(k));
    }
    let count = 1u128 << (2 * exponent);
    let half = k_const * a.powi(n as i32);
    let length = 2.0 * half * 4f64.powi(-(exponent as i32));
    let g_k = ((k + 1) * (k + 2) * n / 2) as u64;
    let log_len = (2.0 * half).ln() - exponent as f64 * 4f64.ln();
    let log_bound = (2.0 * k_const).ln() + g_k as f64 * a.ln();
    Ok(SubdivisionScheme {
        k_const,
        n,
        level: k,
        exponent,
        count,
        length,
        g_k,
        lo: -half,
        length_ok: log_len < log_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PalisBound {
    pub value: f64,
    pub factors: Vec<f64>,
    /// First `k` from which every factor exceeds `1 - 1e-12`.
    pub tail_k: Option<usize>,
    /// Some factor was clamped at zero.
    pub divergent: bool,
}

/// `q * prod_{k=1}^{kmax} (1 - 4^{[2+...+(k+1)]N} (1-q)^{delta rho^{kN}})`,
/// each factor clamped at 0 and evaluated in log space.
pub fn palis_lower_bound(q: f64, delta: f64, rho: f64, n: usize, kmax: usize) -> PalisBound {
    let ln_miss = (1.0 - q).ln();
    let factors: Vec<f64> = (1..=kmax)
        .map(|k| {
            let growth = rho.powf((k * n) as f64);
            let log_term = subdivision_exponent(n, k) as f64 * 4f64.ln() + delta * growth * ln_miss;
            (1.0 - log_term.exp()).max(0.0)
        })
        .collect();
    let divergent = factors.iter().any(|&f| f <= 0.0);
    let value = if q <= 0.0 {
        0.0
    } else {
        q * factors.iter().product::<f64>()
    };
    let tail_k = (0..factors.len())
        .rev()
        .take_while(|&i| factors[i] > 1.0 - 1e-12)
        .last()
        .map(|i| i + 1);
    PalisBound {
        value,
        factors,
        tail_k,
        divergent,
    }
}
