//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function is a thin wrapper over a plain Rust function that
//! returns a flat `Vec` so the page can hand it straight to a canvas plot.
//! The plain functions are what the native tests exercise.

use wasm_bindgen::prelude::*;
use wfai::diffusion::{new_mutant_pfix, pfix_diffusion, Frequency};
use wfai::fixation::{fixation_profile, SolverOptions};
use wfai::{Error, LogBase, WfParams};

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Largest population the page may ask the dense solver for.
pub const MAX_CURVE_N: u32 = 1000;
/// Largest number of points on a selection sweep.
pub const MAX_SWEEP_POINTS: u32 = 2000;
/// Largest simulated trajectory length.
pub const MAX_GENS: u64 = 1_000_000;

/// `[i/N, exact h(i), diffusion p_fix(Ns, i/N)]` for `i = 0..=N`, flattened.
pub fn fixation_curve_impl(n_pop: u32, sel: f64) -> wfai::Result<Vec<f64>> {
    if n_pop > MAX_CURVE_N {
        return Err(invalid("N", format!("at most {MAX_CURVE_N} in the demo")));
    }
    let params = WfParams::with_selection(n_pop, sel)?;
    let prof = fixation_profile(&params, &SolverOptions::default())?;
    let alpha = f64::from(n_pop) * sel;
    let mut out = Vec::with_capacity(3 * prof.h.len());
    for (i, h) in prof.h.iter().enumerate() {
        let p = i as f64 / f64::from(n_pop);
        out.extend([p, *h, pfix_diffusion(alpha, Frequency::new(p)?)]);
    }
    Ok(out)
}

/// `[s, p_fix(1/N), AI in bits]` for `points` evenly spaced selection
/// coefficients in `[s_min, s_max]`, flattened.
pub fn new_mutant_sweep_impl(n_pop: u32, s_min: f64, s_max: f64, points: u32) -> wfai::Result<Vec<f64>> {
    if !(2..=MAX_SWEEP_POINTS).contains(&points) {
        return Err(invalid("points", format!("must lie in 2..={MAX_SWEEP_POINTS}")));
    }
    if !(s_min < s_max) {
        return Err(invalid("s_min", "must be below s_max"));
    }
    let null = 1.0 / f64::from(n_pop);
    let mut out = Vec::with_capacity(3 * points as usize);
    for k in 0..points {
        let s = s_min + (s_max - s_min) * f64::from(k) / f64::from(points - 1);
        let p = new_mutant_pfix(n_pop, s)?;
        let ai = wfai::InfoValue::from_nats((p / null).ln(), LogBase::Bits);
        out.extend([s, p, ai.value]);
    }
    Ok(out)
}

/// Allele-`A` counts of one seeded forward trajectory, stopping at absorption.
pub fn simulate_impl(
    n_pop: u32,
    i0: u32,
    sel: f64,
    mu1: f64,
    mu2: f64,
    max_gens: u64,
    seed: u64,
) -> wfai::Result<Vec<u32>> {
    if max_gens > MAX_GENS {
        return Err(invalid("max_gens", format!("at most {MAX_GENS} in the demo")));
    }
    let params = WfParams::new(n_pop, sel, mu1, mu2)?;
    let traj = wfai::wf_chain::simulate(&params, params.count(i0)?, max_gens, seed, true);
    Ok(traj.counts.iter().map(|c| c.get()).collect())
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn fixation_curve(n_pop: u32, sel: f64) -> Result<Vec<f64>, JsError> {
    fixation_curve_impl(n_pop, sel).map_err(js)
}

#[wasm_bindgen]
pub fn new_mutant_sweep(n_pop: u32, s_min: f64, s_max: f64, points: u32) -> Result<Vec<f64>, JsError> {
    new_mutant_sweep_impl(n_pop, s_min, s_max, points).map_err(js)
}

// Seeds arrive as JS numbers; anything up to 2^53 is exact.
#[wasm_bindgen]
pub fn simulate(
    n_pop: u32,
    i0: u32,
    sel: f64,
    mu1: f64,
    mu2: f64,
    max_gens: f64,
    seed: f64,
) -> Result<Vec<u32>, JsError> {
    let whole = |x: f64, name: &str| {
        if x >= 0.0 && x.fract() == 0.0 && x <= 9_007_199_254_740_992.0 {
            Ok(x as u64)
        } else {
            Err(JsError::new(&format!("{name} must be a non-negative integer")))
        }
    };
    simulate_impl(n_pop, i0, sel, mu1, mu2, whole(max_gens, "max_gens")?, whole(seed, "seed")?).map_err(js)
}
