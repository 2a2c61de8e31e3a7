//! WebAssembly bindings for the demo page in `www/`. Every export returns a
//! JSON string; the `*_json` helpers carry the logic and run natively too.

use caplaw::nfunc::{numeric_conjugate, scaled_conjugate, ConjugateQuery};
use caplaw::slln::running_mean_path;
use caplaw::subgauss::{empirical_tail_capacity, tail_bound};
use caplaw::{GaussianMeanFamily, NFunction};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_POINTS: u32 = 2_000;
const MAX_SAMPLES: u32 = 1_000_000;
const MAX_DRAWS: u64 = 20_000_000;

#[derive(Serialize)]
struct ConjugatePoint {
    y: f64,
    psi: f64,
    analytic: f64,
    numeric: f64,
}

#[derive(Serialize)]
struct ConjugateCurve {
    label: String,
    q: f64,
    points: Vec<ConjugatePoint>,
}

fn grid(lo: f64, hi: f64, count: u32) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&count) {
        return Err(format!("point count must lie in [2, {MAX_POINTS}]"));
    }
    Ok((0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect())
}

/// `psi(x) = a phi_p(b x)` and its conjugate, closed form and numeric, on
/// `count` points of `[-y_max, y_max]`.
pub fn conjugate_curve_json(
    p: f64,
    a: f64,
    b: f64,
    y_max: f64,
    count: u32,
) -> Result<String, String> {
    let phi = NFunction::phi_p(p).map_err(|e| e.to_string())?;
    let q = caplaw::nfunc::phi_p_dual_index(p).map_err(|e| e.to_string())?;
    let psi = NFunction::scaled(a, b, phi.clone()).map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    for y in grid(-y_max, y_max, count)? {
        let analytic = scaled_conjugate(a, b, &phi, y).map_err(|e| e.to_string())?;
        let mut x_max = ConjugateQuery::for_phi_p(p, y / (a * b))
            .map_err(|e| e.to_string())?
            .x_max
            / b.abs();
        let numeric = loop {
            let query = ConjugateQuery::new(y, x_max, 1e-9).map_err(|e| e.to_string())?;
            let v = numeric_conjugate(&psi, &query).map_err(|e| e.to_string())?;
            if !v.truncated {
                break v.value;
            }
            x_max *= 4.0;
        };
        points.push(ConjugatePoint {
            y,
            psi: psi.eval(y),
            analytic,
            numeric,
        });
    }
    serde_json::to_string(&ConjugateCurve {
        label: psi.label(),
        q,
        points,
    })
    .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct TailPoint {
    epsilon: f64,
    bound: f64,
    empirical: f64,
    std_error: f64,
}

/// Two-sided bound `2 exp(-phi_2^*(eps / sigma))` against the sampled tail of
/// `N(0, sigma^2)`.
pub fn tail_curve_json(
    sigma: f64,
    eps_max: f64,
    count: u32,
    samples: u32,
    seed: u64,
) -> Result<String, String> {
    if samples > MAX_SAMPLES {
        return Err(format!("at most {MAX_SAMPLES} samples"));
    }
    let fam = GaussianMeanFamily::new(vec![0.0], sigma).map_err(|e| e.to_string())?;
    let phi = NFunction::phi_2();
    let mut points = Vec::new();
    for eps in grid(eps_max / count as f64, eps_max, count)? {
        let t = tail_bound(&phi, sigma, eps).map_err(|e| e.to_string())?;
        let emp = empirical_tail_capacity(&fam, 0.0, 0.0, eps, samples as usize, seed)
            .map_err(|e| e.to_string())?;
        points.push(TailPoint {
            epsilon: eps,
            bound: t.bound,
            empirical: emp.estimate,
            std_error: emp.std_error,
        });
    }
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ModelPaths {
    m: f64,
    paths: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct PathBundle {
    n: Vec<u64>,
    band: [f64; 2],
    models: Vec<ModelPaths>,
}

/// Running means of `paths` paths per model under `{-spread, 0, spread}`,
/// thinned to about 300 log-spaced times.
pub fn slln_paths_json(
    spread: f64,
    sigma: f64,
    epsilon: f64,
    n_steps: u32,
    paths: u32,
    seed: u64,
) -> Result<String, String> {
    let means = if spread == 0.0 {
        vec![0.0]
    } else {
        vec![-spread, 0.0, spread]
    };
    let fam = GaussianMeanFamily::new(means, sigma).map_err(|e| e.to_string())?;
    let draws = n_steps as u64 * paths as u64 * fam.means().len() as u64;
    if draws > MAX_DRAWS || n_steps == 0 || paths == 0 {
        return Err(format!(
            "need 1 <= n_steps * paths * models <= {MAX_DRAWS}, got {draws}"
        ));
    }
    let mut keep: Vec<u64> = (0..300)
        .map(|k| (n_steps as f64).powf(k as f64 / 299.0).round() as u64)
        .collect();
    keep.dedup();
    let models = fam
        .means()
        .iter()
        .enumerate()
        .map(|(model, &m)| {
            let paths = (0..paths as u64)
                .map(|path| {
                    let full = running_mean_path(&fam, model, seed, path, n_steps as u64)?;
                    Ok(keep.iter().map(|&n| full[n as usize - 1]).collect())
                })
                .collect::<caplaw::Result<Vec<Vec<f64>>>>()?;
            Ok(ModelPaths { m, paths })
        })
        .collect::<caplaw::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&PathBundle {
        n: keep,
        band: [fam.m_under() - epsilon, fam.m_bar() + epsilon],
        models,
    })
    .map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn conjugate_curve(p: f64, a: f64, b: f64, y_max: f64, count: u32) -> Result<String, JsValue> {
    conjugate_curve_json(p, a, b, y_max, count).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn tail_curve(
    sigma: f64,
    eps_max: f64,
    count: u32,
    samples: u32,
    seed: u32,
) -> Result<String, JsValue> {
    tail_curve_json(sigma, eps_max, count, samples, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn slln_paths(
    spread: f64,
    sigma: f64,
    epsilon: f64,
    n_steps: u32,
    paths: u32,
    seed: u32,
) -> Result<String, JsValue> {
    slln_paths_json(spread, sigma, epsilon, n_steps, paths, seed as u64)
        .map_err(|e| JsValue::from_str(&e))
}
