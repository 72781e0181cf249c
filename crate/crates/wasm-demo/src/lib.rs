//! Browser front end: three operations returning JSON for `www/index.html`.
//!
//! The plain functions are ordinary Rust and can be exercised natively; the
//! `#[wasm_bindgen]` wrappers only convert errors into JavaScript exceptions.

use std::cell::RefCell;
use std::rc::Rc;

use serde_json::{json, Value};
use tower_primes::asymptotics::trace_log_growth;
use tower_primes::ratio_sets::{find_ratio_witness, ratio_gap_scan};
use tower_primes::{Error, IteratedPrimes, Result, SetFamily};
use wasm_bindgen::prelude::*;

/// Keeps sieve memory in a browser tab bounded.
pub const MAX_DEMO_CEILING: u64 = 200_000_000;

thread_local! {
    static TABLE: RefCell<Option<Rc<IteratedPrimes>>> = const { RefCell::new(None) };
}

/// Shared table for `ceiling`, rebuilt only when the ceiling changes.
fn lattice(ceiling: u64) -> Result<Rc<IteratedPrimes>> {
    if ceiling > MAX_DEMO_CEILING {
        return Err(Error::Config(format!("the demo ceiling is limited to {MAX_DEMO_CEILING}")));
    }
    TABLE.with(|slot| {
        let mut slot = slot.borrow_mut();
        if let Some(lat) = slot.as_ref().filter(|l| l.ceiling() == ceiling) {
            return Ok(Rc::clone(lat));
        }
        let lat = Rc::new(IteratedPrimes::with_ceiling(ceiling)?);
        *slot = Some(Rc::clone(&lat));
        Ok(lat)
    })
}

/// `p^(k)_n` for `1 <= n <= n_max`, `0 <= k <= k_max`; cells above the ceiling are `null`.
pub fn matrix(n_max: u32, k_max: u32, ceiling: u64) -> Result<String> {
    if n_max == 0 || n_max > 64 || k_max > 64 {
        return Err(Error::Domain("choose 1 <= n <= 64 and k <= 64".into()));
    }
    let lat = lattice(ceiling)?;
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max as u64 {
        let mut row = Vec::with_capacity(k_max as usize + 1);
        for k in 0..=k_max {
            row.push(lat.try_iterated_prime(n, k)?.map_or(Value::Null, Value::from));
        }
        rows.push(row);
    }
    Ok(json!({ "ceiling": ceiling, "rows": rows }).to_string())
}

/// Growth along a tower or the diagonal: `log a_j / (j log j)` and `a_{j+1} / a_j`,
/// as far as the ceiling allows.
pub fn growth(family: &str, ceiling: u64) -> Result<String> {
    let family: SetFamily = family.parse()?;
    let lat = lattice(ceiling)?;
    let depth = lat.depth_limit(family)?;
    let trace = trace_log_growth(&lat, family, depth.max(2))?;
    let gaps = if depth >= 2 { ratio_gap_scan(&lat, family, depth - 1)? } else { Vec::new() };
    let members: Vec<u64> = (1..=depth).filter_map(|j| lat.member(family, j).ok().flatten()).collect();
    Ok(json!({
        "family": family.to_string(),
        "members": members,
        "log_growth": trace.samples,
        "consecutive_ratios": gaps,
    })
    .to_string())
}

/// Nearest quotient `a / b` to `target` within the depth-`k` nested set below `bound`.
pub fn witness(k: u32, target: f64, epsilon: f64, bound: u64) -> Result<String> {
    let lat = lattice(bound.max(2))?;
    let w = find_ratio_witness(&lat, k, target, epsilon, bound)?;
    Ok(json!({
        "family": SetFamily::Nested(k).to_string(),
        "target": w.target,
        "a": w.a,
        "b": w.b,
        "error": w.achieved_error,
        "sufficient": w.sufficient,
    })
    .to_string())
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = towerMatrix)]
pub fn tower_matrix(n_max: u32, k_max: u32, ceiling: u64) -> std::result::Result<String, JsError> {
    js(matrix(n_max, k_max, ceiling))
}

#[wasm_bindgen(js_name = towerGrowth)]
pub fn tower_growth(family: &str, ceiling: u64) -> std::result::Result<String, JsError> {
    js(growth(family, ceiling))
}

#[wasm_bindgen(js_name = ratioWitness)]
pub fn ratio_witness(k: u32, target: f64, epsilon: f64, bound: u64) -> std::result::Result<String, JsError> {
    js(witness(k, target, epsilon, bound))
}
