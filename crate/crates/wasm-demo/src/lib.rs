//! Browser bindings for three operations: the Drisko array with its
//! certificate, the guaranteed-length lookup, and a small #-swap search.
//!
//! Each binding returns a JSON string. The plain functions below them do
//! the work and are what the native tests exercise.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use hashswap::bounds::{guarantee_length, GuaranteeRule, MIN_NK_TABLE};
use hashswap::construction::{certify_no_transversal, drisko};
use hashswap::search::{verify_order, Algorithm, SearchOptions};

/// Largest order the page may search; keeps the browser responsive and the
/// recursion within the default wasm stack.
pub const DEMO_MAX_ORDER: usize = 8;

pub fn drisko_report(m: usize, n: usize) -> Result<Value, String> {
    let a = drisko(m, n).map_err(|e| e.to_string())?;
    let cert = certify_no_transversal(&a).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<String>> = (0..m).map(|i| a.row(i).iter().map(|c| c.to_string()).collect()).collect();
    Ok(json!({
        "m": m,
        "n": n,
        "rows": rows,
        "delta": cert.delta_table,
        "certificate": cert.summary(),
    }))
}

pub fn lookup_report(order: u64) -> Result<Value, String> {
    if order == 0 {
        return Err("order must be positive".into());
    }
    let g = guarantee_length(order);
    let (rule, k, n_k) = match g.rule {
        GuaranteeRule::SmallOrder => ("small_order", None, None),
        GuaranteeRule::Table { k } => ("table", Some(k), Some(MIN_NK_TABLE[k - 2])),
        GuaranteeRule::SquareRoot => ("square_root", None, None),
    };
    Ok(json!({ "n": g.n, "length": g.length, "rule": rule, "k": k, "n_k": n_k }))
}

pub fn search_report(order: usize, advanced: bool) -> Result<Value, String> {
    if !(4..=DEMO_MAX_ORDER).contains(&order) {
        return Err(format!("order must be between 4 and {DEMO_MAX_ORDER}"));
    }
    let alg = if advanced { Algorithm::Advanced } else { Algorithm::Naive };
    let r = verify_order(order, alg, &SearchOptions::default()).map_err(|e| e.to_string())?;
    let first_failure = r.verdict.failures.first().map(|f| f.array.to_grid_string());
    Ok(json!({
        "order": order,
        "algorithm": alg,
        "proved": r.verdict.proved,
        "stats": r.stats,
        "failure_count": r.failure_count(),
        "first_failure": first_failure,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = drisko)]
pub fn drisko_js(m: usize, n: usize) -> Result<String, JsValue> {
    to_js(drisko_report(m, n))
}

#[wasm_bindgen(js_name = lookup)]
pub fn lookup_js(order: u32) -> Result<String, JsValue> {
    to_js(lookup_report(order.into()))
}

#[wasm_bindgen(js_name = search)]
pub fn search_js(order: usize, advanced: bool) -> Result<String, JsValue> {
    to_js(search_report(order, advanced))
}
