//! Browser bindings: three operations returning JSON or SVG strings.
//!
//! The plain functions are usable (and tested) natively; the `wasm_bindgen`
//! wrappers turn their errors into JavaScript exceptions.

use cantordiff_core::cantor::{product_squares, sample_offset_tree};
use cantordiff_core::diffset::{self, Mode};
use cantordiff_core::{branching, params, render, typespace, Params};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn params_of(a: f64, b: f64) -> Result<Params, String> {
    Params::new(a, b).map_err(|e| e.to_string())
}

/// Region, derived constants and type space of `(a, b)` as JSON.
pub fn describe(a: f64, b: f64) -> Result<String, String> {
    let p = params_of(a, b)?;
    let region = params::classify(&p).map_err(|e| e.to_string())?;
    let eps = typespace::default_epsilon(&p);
    let ts = typespace::build(&p, eps).map_err(|e| e.to_string())?;
    let v = json!({
        "region": region.to_string(),
        "derived": p.derive(),
        "epsilon": eps,
        "l": ts.level_l,
        "components": ts.components(),
        "K": branching::default_k(&ts),
    });
    Ok(v.to_string())
}

/// Kernel stripes over `T x T`; `epsilon <= 0` selects the default shrink.
pub fn kernel_figure(a: f64, b: f64, epsilon: f64) -> Result<String, String> {
    let p = params_of(a, b)?;
    let eps = if epsilon > 0.0 {
        epsilon
    } else {
        typespace::default_epsilon(&p)
    };
    let ts = typespace::build(&p, eps).map_err(|e| e.to_string())?;
    Ok(render::kernel_stripes(&p, &ts))
}

/// One coverage trial of `I = [-K a^N, K a^N]` up to `depth`, with a picture
/// of the first two levels of the product set and the line `e(0)`.
pub fn coverage_trial(
    a: f64,
    b: f64,
    depth: usize,
    n: usize,
    seed: u64,
    trial: u64,
) -> Result<String, String> {
    let p = params_of(a, b)?;
    if !(1..=12).contains(&depth) {
        return Err(format!("depth {depth} outside 1..=12"));
    }
    let ts = typespace::build(&p, typespace::default_epsilon(&p)).map_err(|e| e.to_string())?;
    let target = diffset::target_interval(&p, branching::default_k(&ts), n);
    let r = diffset::run_trial(&p, depth, target, seed, trial, Mode::Shared);
    let t1 = sample_offset_tree(&p, 2, seed, 2 * trial);
    let t2 = sample_offset_tree(&p, 2, seed, 2 * trial + 1);
    let mut squares = product_squares(&t1, &t2, &p, 1).map_err(|e| e.to_string())?;
    squares.extend(product_squares(&t1, &t2, &p, 2).map_err(|e| e.to_string())?);
    let svg = render::squares_with_line(&squares, 0.0).map_err(|e| e.to_string())?;
    Ok(json!({ "target": target, "covers": r.covers, "hits": r.hits, "svg": svg }).to_string())
}

#[wasm_bindgen(js_name = describe)]
pub fn describe_js(a: f64, b: f64) -> Result<String, JsValue> {
    describe(a, b).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = kernelFigure)]
pub fn kernel_figure_js(a: f64, b: f64, epsilon: f64) -> Result<String, JsValue> {
    kernel_figure(a, b, epsilon).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = coverageTrial)]
pub fn coverage_trial_js(
    a: f64,
    b: f64,
    depth: u32,
    n: u32,
    seed: u32,
    trial: u32,
) -> Result<String, JsValue> {
    coverage_trial(a, b, depth as usize, n as usize, seed.into(), trial.into())
        .map_err(|e| JsValue::from_str(&e))
}
