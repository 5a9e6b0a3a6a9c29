//! Exact simulation of the multitype branching process.
//!
//! Each individual of type `z` draws four fresh uniforms on `[0, t]` and keeps
//! the children of [`offspring_types`] whose type lies in `T`. Surviving
//! siblings never share an offset (the only two-child set is `{2, 4}`), so
//! simulating independent subtrees realizes the process exactly.

use std::ops::RangeInclusive;

use rand::Rng;
use serde::Serialize;

use crate::cantor::offspring_types;
use crate::intervals::Interval;
use crate::kernel::{kernel_mass, kernel_unrestricted, stripe, triangular_cdf};
use crate::par;
use crate::params::Params;
use crate::rng::trial_stream;
use crate::spectral::{build_grid, QuadratureGrid, SpectralResult};
use crate::stats::{ks_two_sample, wilson, Moments, Proportion, Z95};
use crate::typespace::TypeSpace;
use crate::{Error, Result};

pub const DEFAULT_POPULATION_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Population {
    pub generation: usize,
    pub types: Vec<f64>,
}

impl Population {
    pub fn ancestor(x: f64) -> Self {
        Self {
            generation: 0,
            types: vec![x],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn count_in(&self, iv: &Interval) -> u64 {
        self.types.iter().filter(|&&z| iv.contains(z)).count() as u64
    }
}

/// Per-step bookkeeping for sanity checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepTally {
    pub parents: u64,
    /// Parents whose present children (in `[-1, 1]`) formed an index set the
    /// geometry should exclude; only exact endpoint ties can cause this.
    pub ties: u64,
    pub max_children: usize,
}

pub fn step<R: Rng + ?Sized>(
    pop: &Population,
    p: &Params,
    ts: &TypeSpace,
    rng: &mut R,
) -> Population {
    step_tally(pop, p, ts, rng, &mut StepTally::default())
}

pub fn step_tally<R: Rng + ?Sized>(
    pop: &Population,
    p: &Params,
    ts: &TypeSpace,
    rng: &mut R,
    tally: &mut StepTally,
) -> Population {
    let t = p.t();
    let mut types = Vec::with_capacity(pop.types.len() + pop.types.len() / 4 + 1);
    for &z in &pop.types {
        let u = [(); 4].map(|_| rng.gen::<f64>() * t);
        let o = offspring_types(z, u, p);
        tally.parents += 1;
        if !o.is_admissible() {
            tally.ties += 1;
        }
        let before = types.len();
        types.extend(o.iter().map(|(_, y)| y).filter(|&y| ts.contains(y)));
        tally.max_children = tally.max_children.max(types.len() - before);
    }
    Population {
        generation: pop.generation + 1,
        types,
    }
}

/// Counts of one trial: `counts[g][s] = Z_g(sets[s])`, `sizes[g] = Z_g(T)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialCounts {
    pub counts: Vec<Vec<u64>>,
    pub sizes: Vec<u64>,
    /// The population exceeded the cap; later generations are missing.
    pub capped: bool,
    pub tally: StepTally,
}

/// Runs `n` generations from a single ancestor of type `x`.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    x: f64,
    n: usize,
    sets: &[Interval],
    p: &Params,
    ts: &TypeSpace,
    seed: u64,
    trial: u64,
    cap: usize,
) -> TrialCounts {
    let mut rng = trial_stream(seed, trial);
    let mut pop = Population::ancestor(x);
    let mut tally = StepTally::default();
    let snapshot = |pop: &Population| sets.iter().map(|s| pop.count_in(s)).collect::<Vec<u64>>();
    let mut counts = vec![snapshot(&pop)];
    let mut sizes = vec![1];
    for _ in 0..n {
        if pop.types.len() > cap {
            return TrialCounts {
                counts,
                sizes,
                capped: true,
                tally,
            };
        }
        pop = step_tally(&pop, p, ts, &mut rng, &mut tally);
        counts.push(snapshot(&pop));
        sizes.push(pop.types.len() as u64);
    }
    TrialCounts {
        counts,
        sizes,
        capped: false,
        tally,
    }
}

/// Simulation settings shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub cap: usize,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            cap: DEFAULT_POPULATION_CAP,
        }
    }
}

/// All trials from ancestor `x`, in trial order. Trial `k` uses stream `k`
/// offset by `salt`, so independent experiments can share a seed.
pub fn run_trials(
    x: f64,
    n: usize,
    sets: &[Interval],
    p: &Params,
    ts: &TypeSpace,
    cfg: &SimConfig,
    salt: u64,
) -> Vec<TrialCounts> {
    par::map_range(cfg.trials as usize, |k| {
        run_trial(
            x,
            n,
            sets,
            p,
            ts,
            cfg.seed,
            salt.wrapping_add(k as u64),
            cfg.cap,
        )
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SetSummary {
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
    pub std_error: f64,
    pub survival: f64,
    /// 10%, 50% and 90% quantiles of `W_n = Z_n / rho^n`.
    pub w_quantiles: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CountSummary {
    pub x: f64,
    pub n: usize,
    pub trials: u64,
    pub capped: u64,
    pub ties: u64,
    pub max_children: usize,
    pub sets: Vec<SetSummary>,
    /// Fraction of (uncapped) trials extinct by each generation `0..=n`.
    pub extinct: Vec<f64>,
    pub mean_size: Vec<f64>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + frac * (sorted[j] - sorted[i])
}

/// Statistics of `Z_n(A)` for each `A` in `sets`.
pub fn simulate_counts(
    x: f64,
    n: usize,
    sets: &[Interval],
    cfg: &SimConfig,
    p: &Params,
    ts: &TypeSpace,
    rho: Option<f64>,
) -> Result<CountSummary> {
    if !ts.contains(x) {
        return Err(Error::XOutsideT(x));
    }
    let runs = run_trials(x, n, sets, p, ts, cfg, 0);
    Ok(summarize(x, n, sets, &runs, rho))
}

pub fn summarize(
    x: f64,
    n: usize,
    sets: &[Interval],
    runs: &[TrialCounts],
    rho: Option<f64>,
) -> CountSummary {
    let done: Vec<&TrialCounts> = runs.iter().filter(|r| !r.capped).collect();
    let m = done.len().max(1) as f64;
    let sets = sets
        .iter()
        .enumerate()
        .map(|(s, iv)| {
            let vals: Moments = done.iter().map(|r| r.counts[n][s] as f64).collect();
            let alive = done.iter().filter(|r| r.counts[n][s] > 0).count() as f64;
            let w_quantiles = rho.map(|rho| {
                let scale = rho.powi(n as i32);
                let mut w: Vec<f64> = done.iter().map(|r| r.counts[n][s] as f64 / scale).collect();
                w.sort_unstable_by(f64::total_cmp);
                [quantile(&w, 0.1), quantile(&w, 0.5), quantile(&w, 0.9)]
            });
            SetSummary {
                lo: iv.lo,
                hi: iv.hi,
                mean: vals.mean,
                std_error: vals.std_error(),
                survival: alive / m,
                w_quantiles,
            }
        })
        .collect();
    let extinct = (0..=n)
        .map(|g| done.iter().filter(|r| r.sizes[g] == 0).count() as f64 / m)
        .collect();
    let mean_size = (0..=n)
        .map(|g| done.iter().map(|r| r.sizes[g] as f64).sum::<f64>() / m)
        .collect();
    CountSummary {
        x,
        n,
        trials: runs.len() as u64,
        capped: (runs.len() - done.len()) as u64,
        ties: runs.iter().map(|r| r.tally.ties).sum(),
        max_children: runs.iter().map(|r| r.tally.max_children).max().unwrap_or(0),
        sets,
        extinct,
        mean_size,
    }
}

/// Deterministic `E_x Z_n([lo, hi])` for `n = 1..=max_n` by iterating the
/// kernel on a midpoint grid of width `step`; the first generation is exact.
pub fn expected_counts(
    x: f64,
    max_n: usize,
    lo: f64,
    hi: f64,
    p: &Params,
    ts: &TypeSpace,
    step: f64,
) -> Result<Vec<f64>> {
    let grid = build_grid(ts, step)?;
    let mut g: Vec<f64> = par::map_range(grid.len(), |j| kernel_mass(grid.nodes[j], lo, hi, p, ts));
    let mut out = vec![kernel_mass(x, lo, hi, p, ts)];
    for _ in 2..=max_n {
        out.push(integrate_row(x, &grid, &g, p));
        g = par::map_range(grid.len(), |i| integrate_row(grid.nodes[i], &grid, &g, p));
    }
    Ok(out)
}

/// `sum_j m(x, z_j) w_j g_j`, visiting only nodes inside the stripes over `x`.
fn integrate_row(x: f64, grid: &QuadratureGrid, g: &[f64], p: &Params) -> f64 {
    let mut acc = 0.0;
    for k in 1..=3 {
        let (lo, hi) = stripe(k, x, p).expect("stripe index in range");
        let from = grid.nodes.partition_point(|&z| z <= lo);
        let to = grid.nodes.partition_point(|&z| z < hi);
        for ((z, w), gj) in grid.nodes[from..to]
            .iter()
            .zip(&grid.weights[from..to])
            .zip(&g[from..to])
        {
            acc += kernel_unrestricted(x, *z, p) * w * gj;
        }
    }
    acc
}

/// `integral_A nu` from the grid representation of `nu`.
pub fn nu_mass(grid: &QuadratureGrid, s: &SpectralResult, iv: &Interval) -> f64 {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .zip(&s.nu)
        .filter(|((&z, _), _)| iv.contains(z))
        .map(|((_, w), nu)| w * nu)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SurvivalFloor {
    pub rhat: f64,
    pub per_x: Vec<(f64, f64)>,
    /// Two-sample KS distance between the laws of `W_nproxy(A)` and
    /// `W_{nproxy+5}(A)`, pooled over the grid.
    pub stabilization: f64,
    pub stabilized: bool,
}

/// `min_x P_x(W_nproxy(A) > y)` over `xgrid`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_survival_floor(
    xgrid: &[f64],
    a_set: Interval,
    y: f64,
    nproxy: usize,
    rho: f64,
    cfg: &SimConfig,
    p: &Params,
    ts: &TypeSpace,
) -> Result<SurvivalFloor> {
    let mut per_x = Vec::with_capacity(xgrid.len());
    let (mut w_now, mut w_later) = (Vec::new(), Vec::new());
    for (k, &x) in xgrid.iter().enumerate() {
        if !ts.contains(x) {
            return Err(Error::XOutsideT(x));
        }
        let runs = run_trials(x, nproxy + 5, &[a_set], p, ts, cfg, (k as u64) << 32);
        let done: Vec<&TrialCounts> = runs.iter().filter(|r| !r.capped).collect();
        let wn = |r: &TrialCounts, n: usize| r.counts[n][0] as f64 / rho.powi(n as i32);
        let above = done.iter().filter(|r| wn(r, nproxy) > y).count();
        per_x.push((x, above as f64 / done.len().max(1) as f64));
        w_now.extend(done.iter().map(|r| wn(r, nproxy)));
        w_later.extend(done.iter().map(|r| wn(r, nproxy + 5)));
    }
    let stabilization = ks_two_sample(&mut w_now, &mut w_later);
    let rhat = per_x.iter().map(|e| e.1).fold(1.0, f64::min);
    Ok(SurvivalFloor {
        rhat,
        per_x,
        stabilization,
        stabilized: stabilization < 0.05,
    })
}

/// Largest `K` the defaults allow: `min(0.124, 0.9 * dist(0, ∂ middle component))`.
pub fn default_k(ts: &TypeSpace) -> f64 {
    let mid = ts.middle();
    (0.9 * mid.hi.min(-mid.lo)).min(0.124)
}

fn check_k(k: f64, ts: &TypeSpace) -> Result<()> {
    if !(k > 0.0 && k < 0.125 && ts.components().covers(-k, k)) {
        return Err(Error::KTooLarge { k });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaEntry {
    pub x: f64,
    pub n: usize,
    pub prob: Proportion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MainLemmaEstimate {
    #[serde(rename = "K")]
    pub k: f64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub n_max: usize,
    pub table: Vec<LemmaEntry>,
    pub qhat: f64,
    /// Entry attaining `qhat` and its 95% half-width.
    pub argmin: (f64, usize),
    pub ci: f64,
    pub capped: u64,
}

/// Empirical `P_x(Z_n([-K, 0]) > delta rho^n and Z_n([0, K]) > delta rho^n)`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_main_lemma(
    p: &Params,
    ts: &TypeSpace,
    rho: f64,
    k: f64,
    delta: f64,
    n_range: RangeInclusive<usize>,
    xgrid: &[f64],
    cfg: &SimConfig,
) -> Result<MainLemmaEstimate> {
    check_k(k, ts)?;
    if !(delta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let sets = [Interval::new(-k, 0.0), Interval::new(0.0, k)];
    let (n_lo, n_hi) = (*n_range.start(), *n_range.end());
    let mut table = Vec::new();
    let mut capped = 0;
    for (ix, &x) in xgrid.iter().enumerate() {
        let runs = run_trials(x, n_hi, &sets, p, ts, cfg, (ix as u64) << 32);
        let done: Vec<&TrialCounts> = runs.iter().filter(|r| !r.capped).collect();
        capped += (runs.len() - done.len()) as u64;
        for n in n_lo..=n_hi {
            let thr = delta * rho.powi(n as i32);
            let hits = done
                .iter()
                .filter(|r| r.counts[n][0] as f64 > thr && r.counts[n][1] as f64 > thr)
                .count();
            table.push(LemmaEntry {
                x,
                n,
                prob: wilson(hits as u64, done.len() as u64, Z95),
            });
        }
    }
    let worst = table
        .iter()
        .min_by(|a, b| a.prob.estimate.total_cmp(&b.prob.estimate))
        .copied()
        .ok_or_else(|| Error::MissingData("empty x-grid or n-range".into()))?;
    Ok(MainLemmaEstimate {
        k,
        delta,
        n: n_lo,
        n_max: n_hi,
        qhat: worst.prob.estimate,
        argmin: (worst.x, worst.n),
        ci: 0.5 * (worst.prob.hi - worst.prob.lo),
        table,
        capped,
    })
}

/// Pilot-calibrated `(N, delta)` for the Main Lemma experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: f64,
    /// Pilot estimate of `min_x P_x(Z_N^- > 0 and Z_N^+ > 0)`.
    pub pilot_floor: f64,
}

/// Picks `N` as the first generation after which the pilot floor
/// `min_x P_x(Z_n^- > 0 and Z_n^+ > 0)` moves by at most the fraction `tol` of
/// itself over the next
/// three generations, and `delta` as half the smallest (over pilot points)
/// median of `min(W_N^-, W_N^+)` among trials where both counts survive.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_main_lemma(
    p: &Params,
    ts: &TypeSpace,
    rho: f64,
    k: f64,
    pilot_xs: &[f64],
    tol: f64,
    n_cap: usize,
    cfg: &SimConfig,
) -> Result<Calibration> {
    check_k(k, ts)?;
    let sets = [Interval::new(-k, 0.0), Interval::new(0.0, k)];
    let mut horizon = 16usize.min(n_cap);
    loop {
        let runs: Vec<Vec<TrialCounts>> = pilot_xs
            .iter()
            .enumerate()
            .map(|(ix, &x)| run_trials(x, horizon, &sets, p, ts, cfg, (ix as u64) << 32))
            .collect();
        let floor = |n: usize| {
            runs.iter()
                .map(|rs| {
                    let done: Vec<_> = rs.iter().filter(|r| !r.capped).collect();
                    let both = done
                        .iter()
                        .filter(|r| r.counts[n][0] > 0 && r.counts[n][1] > 0)
                        .count();
                    both as f64 / done.len().max(1) as f64
                })
                .fold(1.0, f64::min)
        };
        let floors: Vec<f64> = (0..=horizon).map(floor).collect();
        let found = (1..=horizon.saturating_sub(3)).find(|&n| {
            floors[n] > 0.0 && (1..=3).all(|j| (floors[n + j] - floors[n]).abs() <= tol * floors[n])
        });
        if let Some(n) = found {
            let scale = rho.powi(n as i32);
            let delta = runs
                .iter()
                .map(|rs| {
                    let mut w: Vec<f64> = rs
                        .iter()
                        .filter(|r| !r.capped && r.counts[n][0] > 0 && r.counts[n][1] > 0)
                        .map(|r| r.counts[n][0].min(r.counts[n][1]) as f64 / scale)
                        .collect();
                    w.sort_unstable_by(f64::total_cmp);
                    quantile(&w, 0.5)
                })
                .fold(f64::INFINITY, f64::min);
            return Ok(Calibration {
                n,
                delta: 0.5 * delta,
                pilot_floor: floors[n],
            });
        }
        if horizon >= n_cap {
            let change = floors.last().copied().unwrap_or(0.0);
            return Err(Error::NoConvergence {
                iterations: horizon,
                change,
            });
        }
        horizon = (2 * horizon).min(n_cap);
    }
}

/// Empirical probability that one generation from `x` yields children 2 and 4
/// with both types in `[-K, K]`.
pub fn estimate_p24(x: f64, k: f64, cfg: &SimConfig, p: &Params) -> Proportion {
    let t = p.t();
    let hits = par::map_range(cfg.trials as usize, |i| {
        let mut rng = trial_stream(cfg.seed, i as u64);
        let u = [(); 4].map(|_| rng.gen::<f64>() * t);
        let o = offspring_types(x, u, p);
        matches!((o.0[1], o.0[3]), (Some(y2), Some(y4)) if y2.abs() <= k && y4.abs() <= k)
    });
    let n = hits.iter().filter(|&&h| h).count() as u64;
    wilson(n, cfg.trials, Z95)
}

/// Closed form of the quantity [`estimate_p24`] estimates.
pub fn p24_exact(x: f64, k: f64, p: &Params) -> f64 {
    let (a, t) = (p.a(), p.t());
    let k = k.min(1.0);
    let one = triangular_cdf(a * k - x, t) - triangular_cdf(-a * k - x, t);
    one * one
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel;
    use crate::typespace;

    fn setup(a: f64, b: f64) -> (Params, TypeSpace) {
        let p = Params::new(a, b).unwrap();
        let ts = typespace::build(&p, typespace::default_epsilon(&p)).unwrap();
        (p, ts)
    }

    #[test]
    fn empty_population_is_absorbing() {
        let (p, ts) = setup(0.26, 0.01);
        let mut rng = trial_stream(0, 0);
        let empty = Population {
            generation: 3,
            types: vec![],
        };
        let next = step(&empty, &p, &ts, &mut rng);
        assert!(next.is_empty());
        assert_eq!(next.generation, 4);
    }

    #[test]
    fn generation_zero_is_the_ancestor() {
        let (p, ts) = setup(0.28, 0.05);
        let iv = Interval::new(0.1, 0.1);
        let r = run_trial(0.1, 0, &[iv], &p, &ts, 1, 0, DEFAULT_POPULATION_CAP);
        assert_eq!(r.counts, vec![vec![1]]);
        assert_eq!(r.sizes, vec![1]);
    }

    #[test]
    fn at_most_two_children() {
        for (a, b) in [(0.26, 0.01), (0.28, 0.05)] {
            let (p, ts) = setup(a, b);
            let mut rng = trial_stream(9, 0);
            let mut tally = StepTally::default();
            let xs: Vec<f64> = (0..1000)
                .map(|i| -0.8 + 1.6 * i as f64 / 999.0)
                .filter(|&x| ts.contains(x))
                .collect();
            let pop = Population {
                generation: 0,
                types: xs,
            };
            for _ in 0..100 {
                step_tally(&pop, &p, &ts, &mut rng, &mut tally);
            }
            assert!(tally.max_children <= 2);
            assert_eq!(tally.ties, 0);
        }
    }

    #[test]
    fn first_generation_means_match_kernel() {
        let (p, ts) = setup(0.28, 0.05);
        let cfg = SimConfig::new(50_000, 17);
        for (x, lo, hi) in [(0.0, -0.2, 0.1), (0.4, -0.5, 0.5), (-0.7, -0.9, 0.0)] {
            let s = simulate_counts(x, 1, &[Interval::new(lo, hi)], &cfg, &p, &ts, None).unwrap();
            let want = kernel::kernel_mass(x, lo, hi, &p, &ts);
            let got = &s.sets[0];
            assert!(
                (got.mean - want).abs() < 4.0 * got.std_error.max(1e-3),
                "x={x}: {} vs {want}",
                got.mean
            );
        }
    }

    #[test]
    fn extinction_is_monotone() {
        let (p, ts) = setup(0.26, 0.01);
        let s = simulate_counts(0.3, 12, &[], &SimConfig::new(2000, 5), &p, &ts, None).unwrap();
        assert!(s.extinct.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(s.extinct[0], 0.0);
    }

    #[test]
    fn trials_are_reproducible() {
        let (p, ts) = setup(0.28, 0.05);
        let sets = [Interval::new(-0.1, 0.1)];
        let cfg = SimConfig::new(50, 3);
        assert_eq!(
            run_trials(0.0, 8, &sets, &p, &ts, &cfg, 0),
            run_trials(0.0, 8, &sets, &p, &ts, &cfg, 0)
        );
        let one = run_trial(0.0, 8, &sets, &p, &ts, 3, 7, DEFAULT_POPULATION_CAP);
        assert_eq!(run_trials(0.0, 8, &sets, &p, &ts, &cfg, 0)[7], one);
    }

    #[test]
    fn population_cap_flags_trial() {
        let (p, ts) = setup(0.28, 0.05);
        let pop = run_trial(0.0, 40, &[], &p, &ts, 1, 0, 0);
        assert!(pop.capped || pop.sizes.last() == Some(&0));
    }

    #[test]
    fn p24_matches_closed_form_and_is_monotone() {
        let (p, _) = setup(0.26, 0.01);
        let cfg = SimConfig::new(100_000, 4);
        let mut last = 0.0;
        for k in [0.02, 0.05, 0.124] {
            let est = estimate_p24(0.0, k, &cfg, &p);
            let want = p24_exact(0.0, k, &p);
            assert!(
                est.lo - 1e-3 <= want && want <= est.hi + 1e-3,
                "K={k}: {est:?} vs {want}"
            );
            assert!(est.estimate >= last);
            last = est.estimate;
        }
        assert!(last > 0.0);
    }

    #[test]
    fn k_outside_t_is_rejected() {
        let (p, ts) = setup(0.28, 0.05);
        let err = estimate_main_lemma(&p, &ts, 1.1, 0.2, 0.1, 3..=4, &[0.0], &SimConfig::new(1, 0));
        assert!(matches!(err, Err(Error::KTooLarge { .. })));
        assert!((default_k(&ts) - 0.124).abs() < 1e-15);
    }
}
