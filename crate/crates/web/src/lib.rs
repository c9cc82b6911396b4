//! Browser bindings for the demo page in `www/`.
//!
//! Each export has a plain Rust twin returning `Result<String, String>` so the
//! logic can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use tracedist::channel::exact_mean_profile;
use tracedist::construct::{hard_pair, intro_pair};
use tracedist::polynomial::{circle_supremum_with, multiplicity_at_one, SupremumOptions};
use tracedist::{BitString, CircleParams, IntPolynomial};

fn parse_pair(x: &str, y: &str) -> Result<(BitString, BitString), String> {
    let x: BitString = x.trim().parse().map_err(|e| format!("x: {e}"))?;
    let y: BitString = y.trim().parse().map_err(|e| format!("y: {e}"))?;
    if x.len() != y.len() {
        return Err(format!("unequal lengths: {} vs {}", x.len(), y.len()));
    }
    if x == y {
        return Err("strings must differ".into());
    }
    Ok((x, y))
}

fn parse_p(p: &str) -> Result<CircleParams, String> {
    p.trim().parse().map_err(|e| format!("{e}"))
}

#[derive(Serialize)]
struct Curve {
    theta: Vec<f64>,
    modulus: Vec<f64>,
    sup_lower: f64,
    sup_upper: f64,
    witness_theta: f64,
    multiplicity: usize,
}

/// `|Q_x - Q_y|` sampled around the circle, with a certified supremum.
pub fn circle_curve_json(x: &str, y: &str, p: &str, samples: usize) -> Result<String, String> {
    let (x, y) = parse_pair(x, y)?;
    let circle = parse_p(p)?;
    let f = &IntPolynomial::from_string(&x) - &IntPolynomial::from_string(&y);
    let samples = samples.clamp(16, 20_000);
    let theta: Vec<f64> = (0..samples)
        .map(|i| {
            -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / (samples - 1) as f64
        })
        .collect();
    let modulus = theta
        .iter()
        .map(|&t| f.eval_complex(circle.point(t)).norm())
        .collect();
    let opts = SupremumOptions {
        grid: 1 << 14,
        ..SupremumOptions::default()
    };
    let cert = circle_supremum_with(&f, &circle, &opts).map_err(|e| e.to_string())?;
    let (multiplicity, _) = multiplicity_at_one(&f).map_err(|e| e.to_string())?;
    let curve = Curve {
        theta,
        modulus,
        sup_lower: cert.lower,
        sup_upper: cert.upper,
        witness_theta: cert.witness_theta,
        multiplicity,
    };
    Ok(serde_json::to_string(&curve).expect("curve serializes"))
}

#[derive(Serialize)]
struct Profiles {
    x: Vec<f64>,
    y: Vec<f64>,
    l1: f64,
}

/// Exact mean profiles `E_j(x)` and `E_j(y)`.
pub fn mean_profiles_json(x: &str, y: &str, p: &str) -> Result<String, String> {
    let (x, y) = parse_pair(x, y)?;
    let circle = parse_p(p)?;
    let ex = exact_mean_profile(&x, &circle);
    let ey = exact_mean_profile(&y, &circle);
    let profiles = Profiles {
        l1: ex.l1_distance(&ey),
        x: ex.values,
        y: ey.values,
    };
    Ok(serde_json::to_string(&profiles).expect("profiles serialize"))
}

#[derive(Serialize)]
struct PairPreset {
    x: String,
    y: String,
    n: usize,
}

/// Order-`k` hard pair with a zero prefix of length `prefix_len`, and the
/// adjacent-swap pair of the same length when one exists.
pub fn hard_pair_json(k: u32, prefix_len: usize) -> Result<String, String> {
    let h = hard_pair(k, &BitString::zeros(prefix_len)).map_err(|e| e.to_string())?;
    let len = h.x.len();
    let swap = (len % 4 == 3).then(|| {
        let (x, y) = intro_pair((len - 3) / 4);
        PairPreset {
            x: x.to_string(),
            y: y.to_string(),
            n: len,
        }
    });
    let out = serde_json::json!({
        "hard": PairPreset { x: h.x.to_string(), y: h.y.to_string(), n: len },
        "swap": swap,
        "k": k,
        "n_r": h.n,
    });
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn circle_curve(x: &str, y: &str, p: &str, samples: usize) -> Result<String, JsError> {
    circle_curve_json(x, y, p, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn mean_profiles(x: &str, y: &str, p: &str) -> Result<String, JsError> {
    mean_profiles_json(x, y, p).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn hard_pair_preset(k: u32, prefix_len: usize) -> Result<String, JsError> {
    hard_pair_json(k, prefix_len).map_err(|e| JsError::new(&e))
}
