//! Three browser operations over the core crate. Each returns a flat
//! `Float64Array` so the page can plot without parsing.

use gevrey_nse::gevrey::weight_sweep;
use gevrey_nse::kolmogorov::{closed_form_series, pn_sequence};
use gevrey_nse::spectral::{random_real_field, GridSpec, C64};
use gevrey_nse::taylor::ConformalMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

const MAX_TERMS: usize = 5000;

fn check_terms(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_TERMS {
        return Err(format!("number of terms must lie in 1..={MAX_TERMS}"));
    }
    Ok(())
}

/// `ln |p_n| - ln delta0` for `n = 1..=n` for the eigenmode reduction
/// `u = p(T) g`; the curve flattens at order `(a - 1) ln n` with
/// `a = nu lambda delta0 / 2`.
pub fn pn_growth(lambda: f64, nu: f64, delta: f64, n: usize) -> Result<Vec<f64>, String> {
    check_terms(n)?;
    let d0 = ConformalMap::new(delta).map_err(|e| e.to_string())?.delta0();
    let p = pn_sequence(lambda, nu, d0, n).map_err(|e| e.to_string())?;
    Ok((1..=n).map(|i| p.ln_abs(i) - d0.ln()).collect())
}

/// Rows `(T, partial sum, closed form)` for `samples` points on `(-1, 1)`.
pub fn series_vs_closed_form(lambda: f64, nu: f64, delta: f64, n: usize, samples: usize) -> Result<Vec<f64>, String> {
    check_terms(n)?;
    if samples < 2 {
        return Err("need at least two sample points".into());
    }
    let d0 = ConformalMap::new(delta).map_err(|e| e.to_string())?.delta0();
    let p = pn_sequence(lambda, nu, d0, n).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * samples);
    for s in 0..samples {
        // open interval, symmetric about 0
        let t = -1.0 + 2.0 * (s as f64 + 0.5) / samples as f64;
        let partial = (0..=n).rev().fold(0.0, |acc, i| acc * t + p.get(i));
        out.extend([t, partial, closed_form_series(C64::new(t, 0.0), lambda, nu, d0).re]);
    }
    Ok(out)
}

/// Rows `(b, |E^b u|)` for a seeded random real field with modes `|k|_inf <= max_mode`.
pub fn gevrey_sweep(k_max: usize, max_mode: usize, seed: u64, b_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(1..=32).contains(&k_max) || points < 2 || !(b_max > 0.0) {
        return Err("need 1 <= K <= 32, at least two points and b_max > 0".into());
    }
    let grid = GridSpec::new(k_max, 1.0).map_err(|e| e.to_string())?;
    let u = random_real_field(grid, max_mode, 1.0, &mut ChaCha8Rng::seed_from_u64(seed));
    let bs: Vec<f64> = (0..points).map(|i| b_max * i as f64 / (points - 1) as f64).collect();
    Ok(weight_sweep(&u, &bs).into_iter().flat_map(|(b, v)| [b, v]).collect())
}

#[wasm_bindgen(js_name = pnGrowth)]
pub fn pn_growth_js(lambda: f64, nu: f64, delta: f64, n: usize) -> Result<Vec<f64>, JsError> {
    pn_growth(lambda, nu, delta, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = seriesVsClosedForm)]
pub fn series_vs_closed_form_js(lambda: f64, nu: f64, delta: f64, n: usize, samples: usize) -> Result<Vec<f64>, JsError> {
    series_vs_closed_form(lambda, nu, delta, n, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gevreySweep)]
pub fn gevrey_sweep_js(k_max: usize, max_mode: usize, seed: u32, b_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    gevrey_sweep(k_max, max_mode, seed as u64, b_max, points).map_err(|e| JsError::new(&e))
}
