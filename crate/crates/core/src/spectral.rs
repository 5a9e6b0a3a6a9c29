//! Nyström discretization of the kernel operator and its Perron-Frobenius
//! triple `(rho, mu, nu)`.

use serde::Serialize;

use crate::kernel::kernel_m;
use crate::par;
use crate::params::Params;
use crate::stats::log_linear_slope;
use crate::typespace::TypeSpace;
use crate::{Error, Result};

pub const MIN_NODES_PER_COMPONENT: usize = 16;
pub const POWER_TOLERANCE: f64 = 1e-12;
pub const POWER_MAX_ITERATIONS: usize = 100_000;
pub const POSITIVITY_MAX_POWER: usize = 64;

/// Midpoint rule on each component of `T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub component: Vec<usize>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the mirror image `-x_i` (the grid is symmetric when `T` is).
    pub fn reflect(&self, i: usize) -> usize {
        self.nodes.len() - 1 - i
    }
}

/// Default step `t / 10`.
pub fn default_step(p: &Params) -> f64 {
    p.t() / 10.0
}

pub fn build_grid(ts: &TypeSpace, step: f64) -> Result<QuadratureGrid> {
    if !(step > 0.0) {
        return Err(Error::StepTooCoarse { step, nodes: 0 });
    }
    let mut grid = QuadratureGrid {
        nodes: Vec::new(),
        weights: Vec::new(),
        component: Vec::new(),
    };
    for (k, c) in ts.components().iter().enumerate() {
        let cells = (c.length() / step).ceil() as usize;
        if cells < MIN_NODES_PER_COMPONENT {
            return Err(Error::StepTooCoarse { step, nodes: cells });
        }
        let w = c.length() / cells as f64;
        for j in 0..cells {
            grid.nodes.push(c.lo + (j as f64 + 0.5) * w);
            grid.weights.push(w);
            grid.component.push(k);
        }
    }
    Ok(grid)
}

/// Dense row-major matrix `M[i][j] = m(x_i, x_j) w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub n: usize,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl KernelMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// `sum_i m(x_i, y_j) w_i` for every `j`.
    pub fn column_masses(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i).iter().enumerate() {
                out[j] += v / self.weights[j] * self.weights[i];
            }
        }
        out
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        par::map_range(self.n, |i| dot(self.row(i), v))
    }

    fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, &vi) in v.iter().enumerate() {
            for (o, m) in out.iter_mut().zip(self.row(i)) {
                *o += m * vi;
            }
        }
        out
    }

    /// `self * b` for a dense `n x n` row-major `b`.
    fn mul_dense(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        par::for_each_chunk_mut(&mut out, n, |i, row| {
            for (k, &m) in self.row(i).iter().enumerate() {
                if m != 0.0 {
                    for (o, bv) in row.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                        *o += m * bv;
                    }
                }
            }
        });
        out
    }

    /// Unweighted kernel values `m(x_i, x_j)`.
    fn kernel_values(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = self.values.clone();
        for row in out.chunks_mut(n) {
            for (v, w) in row.iter_mut().zip(&self.weights) {
                *v /= w;
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn assemble(g: &QuadratureGrid, p: &Params, ts: &TypeSpace) -> KernelMatrix {
    let n = g.len();
    let rows = par::map_range(n, |i| {
        let x = g.nodes[i];
        g.nodes
            .iter()
            .zip(&g.weights)
            .map(|(&y, &w)| kernel_m(x, y, p, ts) * w)
            .collect::<Vec<f64>>()
    });
    KernelMatrix {
        n,
        values: rows.concat(),
        weights: g.weights.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralResult {
    pub rho: f64,
    pub rho_left: f64,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub delta_estimate: Option<f64>,
}

/// Power iteration from the all-ones vector. Returns the eigenvalue estimate,
/// the max-normalized eigenvector and the iteration count.
fn power<F: Fn(&[f64]) -> Vec<f64>>(n: usize, apply: F) -> Result<(f64, Vec<f64>, usize)> {
    let mut v = vec![1.0; n];
    let mut rho = 0.0;
    let mut change = f64::INFINITY;
    for it in 1..=POWER_MAX_ITERATIONS {
        let w = apply(&v);
        let norm = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if norm == 0.0 {
            return Err(Error::ReducibleKernel(
                "the kernel annihilates the start vector".into(),
            ));
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        change = next
            .iter()
            .zip(&v)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let new_rho = w.iter().sum::<f64>() / v.iter().sum::<f64>();
        let rho_change = ((new_rho - rho) / new_rho).abs();
        v = next;
        rho = new_rho;
        if change < POWER_TOLERANCE && rho_change < POWER_TOLERANCE {
            return Ok((rho, v, it));
        }
    }
    Err(Error::NoConvergence {
        iterations: POWER_MAX_ITERATIONS,
        change,
    })
}

pub fn dominant_eigen(m: &KernelMatrix) -> Result<SpectralResult> {
    let (rho, mu, it_r) = power(m.n, |v| m.apply(v))?;
    let (rho_left, psi, it_l) = power(m.n, |v| m.apply_transpose(v))?;
    if mu.iter().chain(&psi).any(|&x| !(x > 0.0)) {
        return Err(Error::ReducibleKernel(
            "an eigenvector has a nonpositive entry".into(),
        ));
    }
    let mut nu: Vec<f64> = psi.iter().zip(&m.weights).map(|(p, w)| p / w).collect();
    let norm: f64 = mu
        .iter()
        .zip(&nu)
        .zip(&m.weights)
        .map(|((a, b), w)| a * b * w)
        .sum();
    nu.iter_mut().for_each(|x| *x /= norm);
    let mm = m.apply(&mu);
    let residual = mm
        .iter()
        .zip(&mu)
        .fold(0.0f64, |r, (a, b)| r.max((a - rho * b).abs()))
        / mu.iter().fold(0.0f64, |r, x| r.max(*x));
    Ok(SpectralResult {
        rho,
        rho_left,
        mu,
        nu,
        residual,
        iterations: it_r.max(it_l),
        delta_estimate: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Positivity {
    pub n0: usize,
    pub min_value: f64,
    pub max_value: f64,
}

/// Smallest `n0 <= 64` with `m_n0(x_i, x_j) > 0` on the whole grid.
pub fn uniform_positivity(m: &KernelMatrix) -> Result<Positivity> {
    let mut d = m.kernel_values();
    for n0 in 1..=POSITIVITY_MAX_POWER {
        let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
        if lo > 0.0 {
            return Ok(Positivity {
                n0,
                min_value: lo,
                max_value: hi,
            });
        }
        d = m.mul_dense(&d);
    }
    Err(Error::NotPositiveBy64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HarrisReport {
    /// `errors[n - 1] = max |m_n / (rho^n mu nu) - 1|`.
    pub errors: Vec<f64>,
    pub delta_estimate: Option<f64>,
}

/// Error floor below which the fit for the decay rate ignores points.
pub const HARRIS_FIT_FLOOR: f64 = 1e-10;

/// Relative error of the asymptotic `m_n ≈ rho^n mu(x) nu(y)` for
/// `n = 1..=nmax`, and the fitted geometric rate over `n >= fit_from`.
pub fn harris_check(
    m: &KernelMatrix,
    s: &SpectralResult,
    nmax: usize,
    fit_from: usize,
) -> HarrisReport {
    let n = m.n;
    let mut d = m.kernel_values();
    d.iter_mut().for_each(|x| *x /= s.rho);
    let mut errors = Vec::with_capacity(nmax);
    for step in 1..=nmax {
        let err = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .fold(0.0f64, |e, (i, j)| {
                e.max((d[i * n + j] / (s.mu[i] * s.nu[j]) - 1.0).abs())
            });
        errors.push(err);
        if step < nmax {
            d = m.mul_dense(&d);
            d.iter_mut().for_each(|x| *x /= s.rho);
        }
    }
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .enumerate()
        .skip(fit_from.saturating_sub(1))
        .filter(|(_, &e)| e > HARRIS_FIT_FLOOR)
        .map(|(k, &e)| ((k + 1) as f64, e))
        .collect();
    let delta_estimate = log_linear_slope(&pts).map(f64::exp);
    HarrisReport {
        errors,
        delta_estimate,
    }
}

/// Table row for an `(eps, step) -> rho` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub step: f64,
    pub rho: f64,
}

/// Dominant eigenvalue for a given `(eps, step)`.
pub fn rho_at(p: &Params, eps: f64, step: f64) -> Result<f64> {
    let ts = crate::typespace::build(p, eps)?;
    let g = build_grid(&ts, step)?;
    Ok(dominant_eigen(&assemble(&g, p, &ts))?.rho)
}

pub fn sweep(p: &Params, epsilons: &[f64], steps: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &epsilon in epsilons {
        for &step in steps {
            rows.push(SweepRow {
                epsilon,
                step,
                rho: rho_at(p, epsilon, step)?,
            });
        }
    }
    Ok(rows)
}
