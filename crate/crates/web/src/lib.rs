//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each operation takes and returns JSON strings. The plain functions are
//! usable natively; the `wasm_bindgen` wrappers turn errors into JS
//! exceptions.

use gridposet::constructions::{
    diamond_free_family, vee_rows_cols_family, vee_three_border_family, vee_weak_family, vee_wedge_sat_chain,
    DiamondVariant,
};
use gridposet::containment::{contains_copy, is_saturated};
use gridposet::engine::{la_exact, sat_exact};
use gridposet::{GridFamily, GridShape, Mode, Poset};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Demo searches stay small so the page never hangs.
pub const DEMO_MAX_POINTS: usize = 20;

fn posets(list: &str) -> Result<Vec<Poset>, String> {
    let out: Vec<Poset> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Poset>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err("no forbidden poset given".into());
    }
    Ok(out)
}

fn mode(m: &str) -> Result<Mode, String> {
    m.parse().map_err(|e: gridposet::Error| e.to_string())
}

/// Builds a named family: `vee-weak` (k, s), `vee-border` (k, l),
/// `vee-rows-cols` (k, s), `diamond-d2` / `diamond-d3` (k),
/// `vee-wedge-sat` (k, l).
pub fn construct_family(kind: &str, k: usize, l: usize, s: usize) -> Result<String, String> {
    let f = match kind {
        "vee-weak" => vee_weak_family(k, s),
        "vee-border" => vee_three_border_family(k, l),
        "vee-rows-cols" => vee_rows_cols_family(k, s),
        "diamond-d2" => diamond_free_family(k, DiamondVariant::D2),
        "diamond-d3" => diamond_free_family(k, DiamondVariant::D3),
        "vee-wedge-sat" => vee_wedge_sat_chain(k, l),
        other => return Err(format!("unknown family `{other}`")),
    }
    .map_err(|e| e.to_string())?;
    Ok(f.to_json_string())
}

/// Exact `la` or `sat` on a grid such as `4x4`, for comma-separated posets.
pub fn exact_search(op: &str, grid: &str, poset_list: &str, mode_name: &str) -> Result<String, String> {
    let shape: GridShape = grid.parse().map_err(|e: gridposet::Error| e.to_string())?;
    if shape.point_count() > DEMO_MAX_POINTS {
        return Err(format!("the demo searches grids of at most {DEMO_MAX_POINTS} points"));
    }
    let ps = posets(poset_list)?;
    let m = mode(mode_name)?;
    let r = match op {
        "la" => la_exact(&shape, &ps, m),
        "sat" => sat_exact(&shape, &ps, m),
        other => return Err(format!("unknown search `{other}`")),
    }
    .map_err(|e| e.to_string())?;
    Ok(r.to_json(true).to_string())
}

/// Reports freeness, saturation and one copy per poset for a family JSON.
pub fn check_family(family_json: &str, poset_list: &str, mode_name: &str) -> Result<String, String> {
    let f = GridFamily::from_json_str(family_json).map_err(|e| e.to_string())?;
    let ps = posets(poset_list)?;
    let m = mode(mode_name)?;
    let mut copies = Vec::new();
    for p in &ps {
        let w = contains_copy(&f, p, m).map_err(|e| e.to_string())?;
        copies.push(w.map_or(serde_json::Value::Null, |w| w.to_json(f.shape(), p)));
    }
    let free = copies.iter().all(serde_json::Value::is_null);
    let saturated = free && is_saturated(&f, &ps, m).map_err(|e| e.to_string())?;
    Ok(json!({ "size": f.len(), "free": free, "saturated": saturated, "copies": copies }).to_string())
}

#[wasm_bindgen(js_name = constructFamily)]
pub fn construct_family_js(kind: &str, k: usize, l: usize, s: usize) -> Result<String, JsError> {
    construct_family(kind, k, l, s).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = exactSearch)]
pub fn exact_search_js(op: &str, grid: &str, posets: &str, mode: &str) -> Result<String, JsError> {
    exact_search(op, grid, posets, mode).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = checkFamily)]
pub fn check_family_js(family: &str, posets: &str, mode: &str) -> Result<String, JsError> {
    check_family(family, posets, mode).map_err(|e| JsError::new(&e))
}
