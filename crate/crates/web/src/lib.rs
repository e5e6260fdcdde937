//! Browser bindings: sample a vertex set and its `G_d` graph, compute an
//! exact Cheeger constant, and estimate a flow bound. Every function
//! returns a JSON string.

use polylab_core::expansion::{exact_cheeger, EXACT_CHEEGER_MAX_VERTICES};
use polylab_core::lab::{cmd_flowbound, ExperimentParams, RouteMode};
use polylab_core::skeleton::{build_exact_skeleton, build_gd, sample_vertex_set, SkeletonGraph};
use polylab_core::{Error, VertexSet};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest dimension the page will sample.
pub const MAX_DEMO_DIM: u32 = 12;

fn check_dim(n: u32) -> Result<(), Error> {
    if n == 0 || n > MAX_DEMO_DIM {
        return Err(Error::SizeCap { what: "demo dimension", size: n as u64, cap: MAX_DEMO_DIM as u64 });
    }
    Ok(())
}

fn graph_json(set: &VertexSet, g: &SkeletonGraph) -> Value {
    json!({
        "n": set.dim(),
        "vertices": set.members().iter().map(|v| v.bits()).collect::<Vec<_>>(),
        "edges": g.edges().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
        "method": g.method().to_string(),
        "min_degree": g.min_degree(),
        "max_degree": g.max_degree(),
    })
}

/// Samples `V` and builds `G_d(V)`.
pub fn sample_graph(n: u32, p: f64, seed: u64, d: u32) -> Result<String, Error> {
    check_dim(n)?;
    let set = sample_vertex_set(n, p, seed)?;
    let g = build_gd(&set, d)?;
    Ok(graph_json(&set, &g).to_string())
}

/// Exact skeleton of a sampled set and its Cheeger constant with witness.
pub fn cheeger(n: u32, p: f64, seed: u64) -> Result<String, Error> {
    check_dim(n)?;
    let set = sample_vertex_set(n, p, seed)?;
    if set.len() > EXACT_CHEEGER_MAX_VERTICES {
        return Err(Error::SizeCap {
            what: "vertices for the exact Cheeger constant",
            size: set.len() as u64,
            cap: EXACT_CHEEGER_MAX_VERTICES as u64,
        });
    }
    let g = build_exact_skeleton(&set)?;
    let h = exact_cheeger(&g)?;
    let mut out = graph_json(&set, &g);
    out["cheeger"] = json!(h.value.to_string());
    out["witness"] = json!(h.witness.iter().map(|v| v.bits()).collect::<Vec<_>>());
    Ok(out.to_string())
}

/// Sampled-mode flow bound through `G_1(V)` with `pairs` routed pairs.
pub fn flow_bound(n: u32, p: f64, seed: u64, pairs: u32) -> Result<String, Error> {
    check_dim(n)?;
    let mut params = ExperimentParams::new(n, &p.to_string(), seed)?;
    params.mode = RouteMode::Sampled;
    params.pairs = pairs.max(1) as u64;
    let set = sample_vertex_set(n, p, seed)?;
    let (report, _) = cmd_flowbound(&params, &set)?;
    Ok(json!({
        "vertices": report.vertices,
        "routed": report.routed,
        "attempted": report.attempted,
        "bound": report.bound.as_ref().map(|b| b.to_string()),
        "bound_kind": report.bound_kind(),
        "degree_upper_bound": report.degree_upper_bound.as_ref().map(|b| b.to_string()),
    })
    .to_string())
}

fn js(r: Result<String, Error>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen(js_name = sampleGraph)]
pub fn sample_graph_js(n: u32, p: f64, seed: u32, d: u32) -> Result<String, JsValue> {
    js(sample_graph(n, p, seed as u64, d))
}

#[wasm_bindgen(js_name = exactCheeger)]
pub fn cheeger_js(n: u32, p: f64, seed: u32) -> Result<String, JsValue> {
    js(cheeger(n, p, seed as u64))
}

#[wasm_bindgen(js_name = flowBound)]
pub fn flow_bound_js(n: u32, p: f64, seed: u32, pairs: u32) -> Result<String, JsValue> {
    js(flow_bound(n, p, seed as u64, pairs))
}
