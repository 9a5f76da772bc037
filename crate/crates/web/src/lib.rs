//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every entry point samples an expression in `x` on the grid `[-4, 4]` at
//! the given level and returns a JSON object of equally long arrays.

use ballspace::grid::{Grid, GridFunction};
use ballspace::operators::{MaximalKind, MaximalOptions, Normalization};
use ballspace::spaces::SpaceSpec;
use ballspace::wavelets::{analyze, square_function_v, square_function_w, Family, WaveletSpec};
use ballspace::weights::{estimate_operator_norm, norm_probes, rubio_majorant, RubioOptions};
use ballspace::Expr;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const BOX: (f64, f64) = (-4.0, 4.0);
const MAX_LEVEL: u32 = 11;

#[derive(Debug, Serialize, PartialEq)]
pub struct MaximalProfile {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub mf: Vec<f64>,
    pub sup_ratio: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct SquareFunctions {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub norm_f: f64,
    /// `|(V f^2 + W f^2)^{1/2}|_2`
    pub norm_quadratic: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Majorant {
    pub x: Vec<f64>,
    pub k: Vec<f64>,
    pub r: Vec<f64>,
    pub mr: Vec<f64>,
    pub alpha: f64,
    pub norm_m: f64,
    pub terms: usize,
    pub norm_k: f64,
    pub norm_r: f64,
}

fn setup(expr: &str, level: u32) -> Result<(Grid, Vec<f64>, GridFunction), String> {
    if level > MAX_LEVEL {
        return Err(format!("level {level} exceeds {MAX_LEVEL}"));
    }
    let grid = Grid::new(1, &[BOX], level).map_err(|e| e.to_string())?;
    let f = Expr::parse(expr).and_then(|e| GridFunction::sample(&e, grid)).map_err(|e| e.to_string())?;
    let x = (0..grid.len()).map(|i| grid.center(i)[0]).collect();
    Ok((grid, x, f))
}

pub fn maximal_profile_native(expr: &str, level: u32, radius_normalization: bool) -> Result<MaximalProfile, String> {
    let (_, x, f) = setup(expr, level)?;
    let normalization = if radius_normalization { Normalization::Radius } else { Normalization::Measure };
    let kind = MaximalKind::Centered(MaximalOptions { normalization, ..MaximalOptions::exhaustive() });
    let mf = kind.apply(&f).map_err(|e| e.to_string())?;
    let sup_ratio = f
        .values()
        .iter()
        .zip(mf.values())
        .filter(|(a, _)| a.abs() > 0.0)
        .map(|(a, m)| m / a.abs())
        .fold(0.0, f64::max);
    Ok(MaximalProfile { x, f: f.values().to_vec(), mf: mf.into_values(), sup_ratio })
}

pub fn square_functions_native(expr: &str, level: u32, family: &str) -> Result<SquareFunctions, String> {
    let (grid, x, f) = setup(expr, level)?;
    let family: Family = family.to_string().try_into().map_err(|e: ballspace::Error| e.to_string())?;
    let sys = WaveletSpec { family, base_level: 0, cascade_level: 12 }.build(1).map_err(|e| e.to_string())?;
    let c = analyze(&f, &sys, sys.default_j_max(&grid)).map_err(|e| e.to_string())?;
    let v = square_function_v(&c, &grid);
    let w = square_function_w(&c, &grid, 0.0).map_err(|e| e.to_string())?;
    let norm_quadratic = v.zip_with(&w, f64::hypot).lp_norm(2.0);
    Ok(SquareFunctions { x, f: f.values().to_vec(), v: v.into_values(), w: w.into_values(), norm_f: f.lp_norm(2.0), norm_quadratic })
}

pub fn rubio_native(expr: &str, level: u32, p: f64, alpha: f64) -> Result<Majorant, String> {
    let (grid, x, k) = setup(expr, level)?;
    let space = SpaceSpec::lebesgue(p).build(&grid).map_err(|e| e.to_string())?;
    let kind = MaximalKind::default();
    let m = |g: &GridFunction| kind.apply(g);
    let norm_m = estimate_operator_norm(&space, &m, &norm_probes(&grid, 0), 1.0).map_err(|e| e.to_string())?.value;
    let opts = RubioOptions::new(alpha, norm_m).with_kind(kind);
    let maj = rubio_majorant(&k, &space, &opts).map_err(|e| e.to_string())?;
    let mr = kind.apply(&maj.value).map_err(|e| e.to_string())?;
    let norm_k = space.norm(&k).map_err(|e| e.to_string())?;
    let norm_r = space.norm(&maj.value).map_err(|e| e.to_string())?;
    Ok(Majorant {
        x,
        k: k.abs().into_values(),
        r: maj.value.into_values(),
        mr: mr.into_values(),
        alpha,
        norm_m,
        terms: maj.terms,
        norm_k,
        norm_r,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    r.map(|v| serde_json::to_string(&v).expect("plain data serializes")).map_err(|e| JsError::new(&e))
}

/// Centered maximal function of `expr`; JSON `{x, f, mf, sup_ratio}`.
#[wasm_bindgen]
pub fn maximal_profile(expr: &str, level: u32, radius_normalization: bool) -> Result<String, JsError> {
    to_js(maximal_profile_native(expr, level, radius_normalization))
}

/// Wavelet square functions `V f` and `W_0 f`; JSON `{x, f, v, w, norm_f, norm_quadratic}`.
#[wasm_bindgen]
pub fn square_functions(expr: &str, level: u32, family: &str) -> Result<String, JsError> {
    to_js(square_functions_native(expr, level, family))
}

/// Rubio majorant of `|expr|` in `L^p`; JSON `{x, k, r, mr, alpha, norm_m, terms, norm_k, norm_r}`.
#[wasm_bindgen]
pub fn rubio(expr: &str, level: u32, p: f64, alpha: f64) -> Result<String, JsError> {
    to_js(rubio_native(expr, level, p, alpha))
}
