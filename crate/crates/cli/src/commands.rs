//! One function per subcommand. Each writes its artifacts into the output
//! directory and returns a JSON summary for stdout.

use std::fs;
use std::path::Path;

use cantordiff_core::branching::{self, SimConfig};
use cantordiff_core::cantor::{product_squares, sample_offset_tree};
use cantordiff_core::diffset::{self, Mode};
use cantordiff_core::spectral::{self, assemble, build_grid, dominant_eigen};
use cantordiff_core::{export, params, render, typespace, Interval, Params, TypeSpace};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::Failure;

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::write(dir.join(name), contents)
        .map_err(|e| Failure::Io(format!("{}: {e}", dir.join(name).display())))
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Result<(), Failure> {
    write(
        dir,
        name,
        &(serde_json::to_string_pretty(v).expect("json values serialize") + "\n"),
    )
}

fn setup(cfg: &RunConfig) -> Result<(Params, TypeSpace), Failure> {
    let p = cfg.params();
    let ts = typespace::build(&p, cfg.epsilon)?;
    Ok((p, ts))
}

fn rho(cfg: &RunConfig, p: &Params, ts: &TypeSpace) -> Result<f64, Failure> {
    let g = build_grid(ts, cfg.grid_step)?;
    Ok(dominant_eigen(&assemble(&g, p, ts))?.rho)
}

/// `(N, delta)` from the config, or from a pilot calibration when either is
/// missing.
fn lemma_constants(
    cfg: &RunConfig,
    p: &Params,
    ts: &TypeSpace,
    rho: f64,
) -> Result<(usize, f64, Value), Failure> {
    if let (Some(n), Some(delta)) = (cfg.n, cfg.delta) {
        return Ok((n, delta, Value::Null));
    }
    let k = cfg.k;
    let pilot = SimConfig::new(cfg.pilot_trials, cfg.seed);
    let cal = branching::calibrate_main_lemma(p, ts, rho, k, &[-k, 0.0, k], 0.03, 256, &pilot)?;
    let n = cfg.n.unwrap_or(cal.n);
    let delta = cfg.delta.unwrap_or(cal.delta);
    Ok((n, delta, serde_json::to_value(cal).expect("serializable")))
}

pub fn classify(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let p = cfg.params();
    let v = json!({
        "a": p.a(),
        "b": p.b(),
        "region": params::classify(&p)?.to_string(),
        "dimSum": p.derive().dim_sum,
        "derived": p.derive(),
        "polynomial": params::region_polynomial(p.a(), p.b()),
        "cMargin": params::region_margin(p.a(), p.b()),
    });
    write_json(dir, "classify.json", &v)?;
    Ok(v)
}

pub fn typespace(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let (p, ts) = setup(cfg)?;
    let kappa = typespace::kappa(&p, &ts);
    write(dir, "components.csv", &export::components(&ts))?;
    write(dir, "ledger.csv", &export::ledger(&ts))?;
    let v = json!({
        "epsilon": ts.epsilon,
        "epsilonBound": typespace::epsilon_bound(&p),
        "l": ts.level_l,
        "rhoSeq": ts.rho_seq,
        "components": ts.components(),
        "unshrunk": ts.unshrunk,
        "totalLength": ts.total_length(),
        "kappa": kappa,
        "supportBound": typespace::support_bound(&p, &ts),
    });
    write_json(dir, "typespace.json", &v)?;
    Ok(v)
}

pub fn spectrum(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let (p, ts) = setup(cfg)?;
    let g = build_grid(&ts, cfg.grid_step)?;
    let m = assemble(&g, &p, &ts);
    let s = dominant_eigen(&m)?;
    let pos = spectral::uniform_positivity(&m)?;
    let harris = spectral::harris_check(&m, &s, pos.n0 + 50, pos.n0);
    let bound = typespace::epsilon_bound(&p);
    let eps: Vec<f64> = [0.2, 0.4, 0.6, 0.8].iter().map(|f| f * bound).collect();
    let rows = spectral::sweep(&p, &eps, &[cfg.grid_step, cfg.grid_step / 2.0])?;
    write(dir, "eigenfunctions.csv", &export::eigenfunctions(&g, &s))?;
    write(dir, "harris.csv", &export::harris(&harris.errors))?;
    write(dir, "sweep.csv", &export::sweep(&rows))?;
    write(
        dir,
        "spectrum.csv",
        &format!(
            "epsilon,step,nodes,rho,rho_left,iterations,residual\n{},{},{},{},{},{},{}\n",
            export::num(ts.epsilon),
            export::num(cfg.grid_step),
            g.len(),
            export::num(s.rho),
            export::num(s.rho_left),
            s.iterations,
            export::num(s.residual)
        ),
    )?;
    let v = json!({
        "rho": s.rho,
        "rhoLeft": s.rho_left,
        "iterations": s.iterations,
        "residual": s.residual,
        "nodes": g.len(),
        "upperBound": 4.0 * p.a(),
        "n0": pos.n0,
        "supportBound": typespace::support_bound(&p, &ts),
        "harrisRate": harris.delta_estimate,
    });
    write_json(dir, "spectrum.json", &v)?;
    Ok(v)
}

pub fn branching(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let (p, ts) = setup(cfg)?;
    let rho = rho(cfg, &p, &ts)?;
    let k = cfg.k;
    let sets = [
        Interval::new(-k, 0.0),
        Interval::new(0.0, k),
        Interval::new(-1.0, 1.0),
    ];
    let sim = SimConfig::new(cfg.trials, cfg.seed);
    if !ts.contains(cfg.x) {
        return Err(cantordiff_core::Error::XOutsideT(cfg.x).into());
    }
    let runs = branching::run_trials(cfg.x, cfg.generations, &sets, &p, &ts, &sim, 0);
    let summaries: Vec<_> = (1..=cfg.generations)
        .map(|n| branching::summarize(cfg.x, n, &sets, &runs, Some(rho)))
        .collect();
    let last = summaries
        .last()
        .cloned()
        .unwrap_or_else(|| branching::summarize(cfg.x, 0, &sets, &runs, Some(rho)));
    if last.ties > 0 || last.max_children > 2 {
        return Err(Failure::Invariant(format!(
            "{} excluded offspring sets, at most {} children",
            last.ties, last.max_children
        )));
    }
    write(dir, "counts.csv", &export::counts(&summaries))?;
    let oracle_step = p.t() / 100.0;
    let oracle: Vec<Vec<f64>> = sets
        .iter()
        .map(|s| {
            branching::expected_counts(
                cfg.x,
                cfg.generations.min(8),
                s.lo,
                s.hi,
                &p,
                &ts,
                oracle_step,
            )
        })
        .collect::<Result<_, _>>()?;
    let v = json!({ "rho": rho, "summary": last, "oracleMeans": oracle });
    write_json(dir, "branching.json", &v)?;
    Ok(v)
}

pub fn mainlemma(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let (p, ts) = setup(cfg)?;
    let rho = rho(cfg, &p, &ts)?;
    let (n, delta, calibration) = lemma_constants(cfg, &p, &ts, rho)?;
    let k = cfg.k;
    let xgrid: Vec<f64> = (0..11).map(|i| -k + 2.0 * k * i as f64 / 10.0).collect();
    let sim = SimConfig::new(cfg.trials, cfg.seed.wrapping_add(1));
    let est = branching::estimate_main_lemma(&p, &ts, rho, k, delta, n..=n + 3, &xgrid, &sim)?;
    let mut csv = String::from("x,n,successes,trials,estimate,ci_lo,ci_hi\n");
    for e in &est.table {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            export::num(e.x),
            e.n,
            e.prob.successes,
            e.prob.trials,
            export::num(e.prob.estimate),
            export::num(e.prob.lo),
            export::num(e.prob.hi)
        ));
    }
    write(dir, "mainlemma.csv", &csv)?;
    let v = json!({
        "rho": rho,
        "calibration": calibration,
        "K": est.k,
        "delta": est.delta,
        "N": est.n,
        "qhat": est.qhat,
        "ci": est.ci,
        "argmin": est.argmin,
        "capped": est.capped,
        "positive": est.table.iter().all(|e| e.prob.lo > 0.0),
    });
    write_json(dir, "mainlemma.json", &v)?;
    Ok(v)
}

pub fn diffset(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let (p, ts) = setup(cfg)?;
    let (n, calibration) = match cfg.n {
        Some(n) => (n, Value::Null),
        None => {
            let rho = rho(cfg, &p, &ts)?;
            let (n, _, cal) = lemma_constants(cfg, &p, &ts, rho)?;
            (n, cal)
        }
    };
    let mode = Mode::from(cfg.mode);
    let target = diffset::target_interval(&p, cfg.k, n);
    let est = diffset::estimate_interval_prob(&p, target, cfg.depth, cfg.trials, cfg.seed, mode);
    let lengths = (cfg.union_trials > 0)
        .then(|| diffset::mean_union_length(&p, cfg.depth, cfg.union_trials, cfg.seed, mode));
    if est.monotone_violations > 0 {
        return Err(Failure::Invariant(format!(
            "{} trials with non-monotone coverage",
            est.monotone_violations
        )));
    }
    write(
        dir,
        "coverage.csv",
        &export::coverage(&est, lengths.as_deref()),
    )?;
    let bound: Vec<f64> = (1..=cfg.depth)
        .map(|d| 2.0 * (4.0 * p.a()).powi(d as i32))
        .collect();
    let v = json!({
        "target": target,
        "N": n,
        "calibration": calibration,
        "estimate": est.at_depth(),
        "monotoneViolations": est.monotone_violations,
        "meanUnionLength": lengths,
        "unionLengthBound": bound,
    });
    write_json(dir, "diffset.json", &v)?;
    Ok(v)
}

pub fn bound(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let (p, ts) = setup(cfg)?;
    let rho = rho(cfg, &p, &ts)?;
    let (n, delta, calibration) = lemma_constants(cfg, &p, &ts, rho)?;
    let q = match cfg.q {
        Some(q) => q,
        None => {
            let k = cfg.k;
            let xgrid: Vec<f64> = (0..11).map(|i| -k + 2.0 * k * i as f64 / 10.0).collect();
            let sim = SimConfig::new(cfg.trials, cfg.seed.wrapping_add(1));
            branching::estimate_main_lemma(&p, &ts, rho, k, delta, n..=n + 3, &xgrid, &sim)?.qhat
        }
    };
    let b = diffset::palis_lower_bound(q, delta, rho, n, cfg.kmax);
    let csv: String = std::iter::once("k,factor\n".to_string())
        .chain(
            b.factors
                .iter()
                .enumerate()
                .map(|(i, f)| format!("{},{}\n", i + 1, export::num(*f))),
        )
        .collect();
    write(dir, "bound.csv", &csv)?;
    let v = json!({
        "q": q,
        "delta": delta,
        "rho": rho,
        "N": n,
        "calibration": calibration,
        "value": b.value,
        "tailK": b.tail_k,
        "divergent": b.divergent,
    });
    write_json(dir, "bound.json", &v)?;
    Ok(v)
}

pub fn render_region(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let svg = render::region_map(&[(0.26, 0.01), (0.28, 0.05), (cfg.a, cfg.b)]);
    write(dir, "region.svg", &svg)?;
    Ok(json!({ "files": ["region.svg"] }))
}

pub fn render_squares(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let p = cfg.params();
    let depth = cfg.depth.min(8);
    let t1 = sample_offset_tree(&p, depth, cfg.seed, 0);
    let t2 = sample_offset_tree(&p, depth, cfg.seed, 1);
    write(
        dir,
        "cantor.svg",
        &render::cantor_levels(&t1, &p, depth.min(6))?,
    )?;
    let level = depth.min(2);
    let mut squares = product_squares(&t1, &t2, &p, 1)?;
    if level > 1 {
        squares.extend(product_squares(&t1, &t2, &p, level)?);
    }
    write(
        dir,
        "squares.svg",
        &render::squares_with_line(&squares, cfg.x)?,
    )?;
    Ok(json!({ "files": ["cantor.svg", "squares.svg"], "level": level }))
}

pub fn render_kernel(cfg: &RunConfig, dir: &Path) -> Result<Value, Failure> {
    let (p, ts) = setup(cfg)?;
    write(dir, "kernel.svg", &render::kernel_stripes(&p, &ts))?;
    write(
        dir,
        "kernel_heatmap.csv",
        &export::kernel_heatmap(&p, &ts, 200),
    )?;
    Ok(json!({ "files": ["kernel.svg", "kernel_heatmap.csv"] }))
}
