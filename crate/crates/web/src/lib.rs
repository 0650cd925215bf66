//! Three operations for the static page in `www/`. Each takes the text of
//! an input file and returns a JSON string: either the result or
//! `{"error": ...}`.

use kernelpoly::bridge::{is_good, orientation_from_prefs, CliqueMode};
use kernelpoly::oracles::enumerate_kernels;
use kernelpoly::polyhedra::{build_sigma, enumerate_vertices};
use kernelpoly::stable::enumerate_stable_matchings;
use kernelpoly::{Budget, Digraph, PreferenceSystem};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const BUDGET: Budget = Budget(2_000_000);

fn respond(result: kernelpoly::Result<Value>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Vertices of the fractional kernel polytope of a digraph.
#[wasm_bindgen]
pub fn fk_vertices(digraph: &str) -> String {
    respond((|| {
        let d = Digraph::parse(digraph)?;
        let vs = enumerate_vertices(&build_sigma(&d, CliqueMode::All, BUDGET)?, BUDGET)?;
        let integral = vs.vertices.iter().all(|v| v.is_integral());
        Ok(json!({ "variables": vs.variables, "vertices": vs.tuples(), "integral": integral }))
    })())
}

/// Goodness verdict with its witness.
#[wasm_bindgen]
pub fn goodness(digraph: &str) -> String {
    respond((|| {
        let d = Digraph::parse(digraph)?;
        let r = is_good(&d, BUDGET)?;
        Ok(json!({ "good": r.is_good(), "report": r }))
    })())
}

/// Stable matchings of a preference system next to the kernels of its
/// line-multigraph orientation.
#[wasm_bindgen]
pub fn stable_matchings(prefs: &str) -> String {
    respond((|| {
        let ps = PreferenceSystem::parse(prefs)?;
        let matchings = enumerate_stable_matchings(&ps, BUDGET)?;
        let kernels = enumerate_kernels(&orientation_from_prefs(&ps), BUDGET)?;
        Ok(json!({ "agree": matchings == kernels, "stable_matchings": matchings, "kernels": kernels }))
    })())
}
