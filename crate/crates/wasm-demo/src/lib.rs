//! Browser bindings for the drcss toolkit: ambiguity heatmaps, metric sweeps
//! and IAPR curves. The plain functions are usable natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use drcss::ambiguity::{af_surface, metrics};
use drcss::constructions::{default_set, Construction, SequenceSet};
use drcss::orthomatrix::iapr_curve;
use drcss::toolkit::{example_set, heatmap_gray, table, HeatmapScale};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Default set for `(construction, q)`, or the worked-example set when
/// `worked_example` is set (q must then be 5).
pub fn build_set(construction: &str, q: u32, worked_example: bool) -> Result<SequenceSet, String> {
    let c: Construction = construction.parse().map_err(|e| format!("{e}"))?;
    if worked_example {
        if q != 5 {
            return Err("the worked examples use q = 5".into());
        }
        return example_set(c).map_err(|e| e.to_string());
    }
    default_set(c, q).map_err(|e| e.to_string())
}

/// `{"K","M","N","alphabet","e"}` of the chosen set.
pub fn describe(construction: &str, q: u32, worked_example: bool) -> Result<String, String> {
    let set = build_set(construction, q, worked_example)?;
    let (k, m, n) = set.shape();
    Ok(json!({"K": k, "M": m, "N": n, "alphabet": set.alphabet, "e": set.e}).to_string())
}

/// Gray levels of `|AF(C^k1, C^k2)| / MN`, `(2N-1)^2` bytes with `(0, 0)` at the centre.
pub fn heatmap(
    construction: &str,
    q: u32,
    worked_example: bool,
    k1: usize,
    k2: usize,
    log_scale: bool,
) -> Result<Vec<u8>, String> {
    let set = build_set(construction, q, worked_example)?;
    let (k, m, n) = set.shape();
    if k1 >= k || k2 >= k {
        return Err(format!("pair ({k1}, {k2}) out of range for K = {k}"));
    }
    let surface = af_surface(&set.matrices[k1], &set.matrices[k2]).map_err(|e| e.to_string())?;
    let scale = if log_scale {
        HeatmapScale::Log
    } else {
        HeatmapScale::Linear
    };
    Ok(heatmap_gray(&surface, (m * n) as f64, scale))
}

/// Metrics report JSON over the zone `(zx, zy)`; zero means the full extent `N`.
pub fn metrics_report(
    construction: &str,
    q: u32,
    worked_example: bool,
    zx: usize,
    zy: usize,
) -> Result<String, String> {
    let set = build_set(construction, q, worked_example)?;
    let n = set.shape().2;
    let region = (if zx == 0 { n } else { zx }, if zy == 0 { n } else { zy });
    metrics(&set, region)
        .map(|r| r.to_json())
        .map_err(|e| e.to_string())
}

/// Table rows (q, K, M, N, theta_max, theta_opt, rho) as a JSON array.
pub fn rho_sweep(construction: &str, qs: &[u32]) -> Result<String, String> {
    let c: Construction = construction.parse().map_err(|e| format!("{e}"))?;
    let rows = table(c, qs).map_err(|e| e.to_string())?;
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// IAPR samples of column `t` of `C^k` on an `L M` grid.
pub fn column_iapr(
    construction: &str,
    q: u32,
    worked_example: bool,
    k: usize,
    t: usize,
    oversampling: usize,
) -> Result<Vec<f64>, String> {
    let set = build_set(construction, q, worked_example)?;
    let c = set
        .matrices
        .get(k)
        .ok_or_else(|| format!("no matrix C^{k}"))?;
    if t >= c.cols() {
        return Err(format!("no column {t}; N = {}", c.cols()));
    }
    let column: Vec<_> = c.to_complex().iter().map(|row| row[t]).collect();
    iapr_curve(&column, oversampling).map_err(|e| e.to_string())
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen(js_name = describe)]
pub fn describe_js(construction: &str, q: u32, worked_example: bool) -> Result<String, JsError> {
    describe(construction, q, worked_example).map_err(js)
}

#[wasm_bindgen(js_name = heatmap)]
pub fn heatmap_js(
    construction: &str,
    q: u32,
    worked_example: bool,
    k1: usize,
    k2: usize,
    log_scale: bool,
) -> Result<Vec<u8>, JsError> {
    heatmap(construction, q, worked_example, k1, k2, log_scale).map_err(js)
}

#[wasm_bindgen(js_name = metricsReport)]
pub fn metrics_report_js(
    construction: &str,
    q: u32,
    worked_example: bool,
    zx: usize,
    zy: usize,
) -> Result<String, JsError> {
    metrics_report(construction, q, worked_example, zx, zy).map_err(js)
}

#[wasm_bindgen(js_name = rhoSweep)]
pub fn rho_sweep_js(construction: &str, qs: Vec<u32>) -> Result<String, JsError> {
    rho_sweep(construction, &qs).map_err(js)
}

#[wasm_bindgen(js_name = columnIapr)]
pub fn column_iapr_js(
    construction: &str,
    q: u32,
    worked_example: bool,
    k: usize,
    t: usize,
    oversampling: usize,
) -> Result<Vec<f64>, JsError> {
    column_iapr(construction, q, worked_example, k, t, oversampling).map_err(js)
}
