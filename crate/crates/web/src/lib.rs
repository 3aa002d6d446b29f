//! Browser bindings: three small interactive operations for the static demo page.
//! Each returns a JSON string so the page only needs `JSON.parse`.

use cptwb::channels::{self, is_extreme};
use cptwb::decompose;
use cptwb::numerics::{max_dist, psd_spectrum};
use cptwb::optimize::{self, OptimizerConfig};
use cptwb::{entropy, sample, zoo};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const DEMO_RESTARTS: usize = 6;
const DEMO_TENSOR_RESTARTS: usize = 6;
const MAX_STEPS: usize = 200;

fn config(p: f64, seed: u64) -> OptimizerConfig {
    OptimizerConfig { p, restarts: DEMO_RESTARTS, tensor_restarts: DEMO_TENSOR_RESTARTS, seed, ..OptimizerConfig::default() }
}

/// `nu_p(W)²` against the product-channel lower bound on `steps + 1` evenly spaced p.
pub fn wh_curve_json(d: usize, p_lo: f64, p_hi: f64, steps: usize, seed: u64) -> cptwb::Result<Value> {
    if !(1..=MAX_STEPS).contains(&steps) || p_hi.partial_cmp(&p_lo) != Some(std::cmp::Ordering::Greater) {
        return Err(cptwb::Error::InvalidParameter("need p_hi > p_lo and 1..=200 steps".into()));
    }
    if d > 4 {
        return Err(cptwb::Error::InvalidParameter("the page keeps d <= 4".into()));
    }
    let w = zoo::werner_holevo(d)?;
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let p = p_lo + (p_hi - p_lo) * k as f64 / steps as f64;
        if (p - 1.0).abs() < 1e-9 {
            continue;
        }
        let r = optimize::mult_check(&w, &w, p, &config(p, seed))?;
        points.push(json!({
            "p": p,
            "product_of_singles": r.product_of_singles,
            "product_lb": r.nu_product_lb,
            "gap": r.gap,
            "violated": r.violated,
        }));
    }
    Ok(json!({ "d": d, "points": points }))
}

/// Depolarized Werner-Holevo channel `x·id + (1−x)·W` at one p.
pub fn depolarized_json(d: usize, x: f64, p: f64, seed: u64) -> cptwb::Result<Value> {
    if d > 6 {
        return Err(cptwb::Error::InvalidParameter("the page keeps d <= 6".into()));
    }
    let ch = zoo::depolarized_wh(d, x)?;
    let nu = optimize::estimate_nu_p(&ch, &config(p, seed))?;
    let spectrum = psd_spectrum(&ch.apply_pure(&nu.best_input))?;
    let renyi = entropy::renyi_of_spectrum(&spectrum, p)?;
    let ext = is_extreme(&ch)?;
    Ok(json!({
        "d": d,
        "x": x,
        "p": p,
        "nu_p": nu.best_value,
        "renyi_at_optimum": renyi,
        "output_spectrum": spectrum,
        "choi_rank": channels::choi_rank(&ch),
        "extreme": ext.extreme,
    }))
}

/// Random channel with qubit output split into two channels of Choi rank at most `d_in`.
pub fn split_json(d_in: usize, kraus: usize, seed: u64) -> cptwb::Result<Value> {
    if !(1..=6).contains(&d_in) || !(1..=12).contains(&kraus) {
        return Err(cptwb::Error::InvalidParameter("the page keeps d_in <= 6 and at most 12 Kraus operators".into()));
    }
    let mut rng = sample::stream(seed, 0);
    let ch = sample::channel(&mut rng, d_in, 2, kraus.max(d_in.div_ceil(2)));
    let choi = ch.choi();
    let split = decompose::split_choi(&choi)?;
    let mid = (&split.first.matrix + &split.second.matrix).scale(0.5);
    let horn = decompose::horn_decomposition(&choi.matrix)?;
    Ok(json!({
        "d_in": d_in,
        "choi_rank": choi.rank(),
        "first_rank": split.first.rank(),
        "second_rank": split.second.rank(),
        "midpoint_residual": max_dist(&mid, &choi.matrix),
        "diagonal_block_residual": split.decomposition.residuals.diagonal_blocks,
        "horn_terms": horn.terms.len(),
        "horn_residual": horn.residuals.reconstruction,
        "first_spectrum": psd_spectrum(&split.first.matrix)?,
        "second_spectrum": psd_spectrum(&split.second.matrix)?,
    }))
}

fn to_js(r: cptwb::Result<Value>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn wh_curve(d: usize, p_lo: f64, p_hi: f64, steps: usize, seed: u32) -> Result<String, JsValue> {
    to_js(wh_curve_json(d, p_lo, p_hi, steps, seed as u64))
}

#[wasm_bindgen]
pub fn depolarized(d: usize, x: f64, p: f64, seed: u32) -> Result<String, JsValue> {
    to_js(depolarized_json(d, x, p, seed as u64))
}

#[wasm_bindgen]
pub fn split(d_in: usize, kraus: usize, seed: u32) -> Result<String, JsValue> {
    to_js(split_json(d_in, kraus, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_flags_large_p_only() {
        let v = wh_curve_json(3, 4.0, 6.0, 4, 1).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 5);
        for pt in pts {
            let p = pt["p"].as_f64().unwrap();
            assert_eq!(pt["violated"].as_bool().unwrap(), p > 4.79, "p = {p}");
        }
    }

    #[test]
    fn curve_rejects_bad_ranges() {
        assert!(wh_curve_json(3, 5.0, 4.0, 4, 0).is_err());
        assert!(wh_curve_json(3, 4.0, 5.0, 0, 0).is_err());
        assert!(wh_curve_json(9, 4.0, 5.0, 4, 0).is_err());
    }

    #[test]
    fn depolarized_end_points() {
        let id = depolarized_json(3, 1.0, 2.0, 0).unwrap();
        assert!((id["nu_p"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        let wh = depolarized_json(3, 0.0, 2.0, 0).unwrap();
        assert!((wh["nu_p"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
        assert_eq!(wh["extreme"], true);
    }

    #[test]
    fn split_is_exact() {
        let v = split_json(3, 5, 2).unwrap();
        assert!(v["midpoint_residual"].as_f64().unwrap() < 1e-9);
        assert!(v["first_rank"].as_u64().unwrap() <= 3);
        assert!(v["second_rank"].as_u64().unwrap() <= 3);
        assert!(v["horn_residual"].as_f64().unwrap() < 1e-10);
    }
}
