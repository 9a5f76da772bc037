use super::{base_report, drift, Battery};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operators::{bessel_potential, BesselDirection};
use crate::report::{ProbeRecord, VerificationReport};
use crate::spaces::{Space, SpaceSpec};
use crate::wavelets::{analyze, partial_sum, square_function_v, square_function_w, Family, WaveletSpec, WaveletSystem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// How `V f` and `W_s f` are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    /// `V f + W_s f`
    #[default]
    Sum,
    /// `(V f^2 + W_s f^2)^{1/2}`, for which `s = 0` in `L^2` is Parseval.
    Quadratic,
}

/// `V f + W_s f` (or the quadratic combination) with detail levels up to
/// `j_max` (default `L - 2`).
pub fn square_sum(f: &GridFunction, sys: &WaveletSystem, s: f64, j_max: Option<i32>, combine: Combine) -> Result<GridFunction> {
    let g = f.grid();
    let j_max = j_max.unwrap_or_else(|| sys.default_j_max(g));
    let c = analyze(f, sys, j_max)?;
    let v = square_function_v(&c, g);
    let w = square_function_w(&c, g, s)?;
    Ok(match combine {
        Combine::Sum => v.add(&w),
        Combine::Quadratic => v.zip_with(&w, f64::hypot),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquivalenceOptions {
    pub s: f64,
    /// Largest allowed `max r / min r` on the held-out probes.
    pub budget: f64,
    pub train_fraction: f64,
    pub j_max: Option<i32>,
    /// When set, the held-out interval is recomputed one grid level coarser
    /// and its endpoints may move by at most this factor.
    pub drift_budget: Option<f64>,
    pub combine: Combine,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            s: 0.0,
            budget: 50.0,
            train_fraction: 0.5,
            j_max: None,
            drift_budget: None,
            combine: Combine::Sum,
        }
    }
}

struct Ratio {
    id: String,
    num: f64,
    den: f64,
}

fn ratios(x: &Space, sys: &WaveletSystem, probes: &[(String, GridFunction)], opts: &EquivalenceOptions) -> Result<Vec<Ratio>> {
    probes
        .par_iter()
        .map(|(id, f)| {
            let num = x.norm(&square_sum(f, sys, opts.s, opts.j_max, opts.combine)?)?;
            let den = if opts.s == 0.0 { x.norm(f)? } else { x.norm(&bessel_potential(f, opts.s, BesselDirection::Forward)?)? };
            if den == 0.0 {
                return Err(Error::InvalidParameter(format!("probe {id} has zero denominator")));
            }
            Ok(Ratio { id: id.clone(), num, den })
        })
        .collect()
}

fn interval(rs: &[Ratio]) -> (f64, f64) {
    rs.iter().fold((f64::INFINITY, 0.0), |(lo, hi), r| {
        let v = r.num / r.den;
        (lo.min(v), hi.max(v))
    })
}

/// Two-sided comparison of `|V f + W_s f|_X` with `|(1 - Lap)^{s/2} f|_X`
/// (`|f|_X` for `s = 0`): the interval of ratios is calibrated on a training
/// split and asserted on the held-out split.
pub fn wavelet_equivalence_check(
    space: &SpaceSpec,
    grid: &Grid,
    wavelet: &WaveletSpec,
    battery: &Battery,
    opts: &EquivalenceOptions,
) -> Result<VerificationReport> {
    let sys = wavelet.build(grid.dim())?;
    if opts.s < 0.0 || (opts.s > 0.0 && opts.s >= sys.smoothness()) {
        return Err(Error::InvalidParameter(format!(
            "s = {} must be 0 or below the smoothness {} of {}",
            opts.s,
            sys.smoothness(),
            sys.family()
        )));
    }
    if !(opts.budget >= 1.0) {
        return Err(Error::InvalidParameter(format!("equivalence budget must be >= 1, got {}", opts.budget)));
    }
    let mut report = base_report(
        "wavelet_equivalence",
        json!({ "grid": grid.spec(), "space": space, "wavelet": wavelet, "battery": battery, "options": opts }),
    );
    if sys.family() == Family::Haar {
        report.note("baseline: Haar generators have smoothness 0");
    }
    let x = space.build(grid)?;
    let (train, held) = battery.split(grid, opts.train_fraction)?;
    if held.is_empty() {
        return Err(Error::InvalidParameter("held-out probe set is empty".into()));
    }
    let tr = ratios(&x, &sys, &train, opts)?;
    let he = ratios(&x, &sys, &held, opts)?;
    let (c_lo, c_hi) = if tr.is_empty() { (0.0, f64::INFINITY) } else { interval(&tr) };
    let (lo, hi) = interval(&he);
    for (set, rs) in [("train", &tr), ("held", &he)] {
        for r in rs.iter() {
            let v = r.num / r.den;
            let inside = v >= c_lo && v <= c_hi;
            report.push(
                ProbeRecord::new(format!("{set}/{}", r.id), v.is_finite() && v > 0.0)
                    .with("square_sum", r.num)
                    .with("denominator", r.den)
                    .with("ratio", v)
                    .with("in_training_interval", if inside { 1.0 } else { 0.0 }),
            );
        }
    }
    let spread = hi / lo;
    report.aggregate("train_min", c_lo);
    report.aggregate("train_max", c_hi);
    report.aggregate("held_min", lo);
    report.aggregate("held_max", hi);
    report.aggregate("held_spread", spread);
    report.aggregate("held_outside_training", he.iter().filter(|r| !(r.num / r.den >= c_lo && r.num / r.den <= c_hi)).count() as f64);
    let mut ok = lo > 0.0 && spread.is_finite() && spread <= opts.budget;
    if let Some(budget) = opts.drift_budget {
        let coarse = grid.with_level(grid.level() - 1)?;
        let xc = space.build(&coarse)?;
        let (_, held_c) = battery.split(&coarse, opts.train_fraction)?;
        let mut copts = opts.clone();
        copts.j_max = opts.j_max.map(|j| j - 1);
        let (lo_c, hi_c) = interval(&ratios(&xc, &sys, &held_c, &copts)?);
        let d = drift(lo, lo_c).max(drift(hi, hi_c));
        report.aggregate("coarse_held_min", lo_c);
        report.aggregate("coarse_held_max", hi_c);
        report.aggregate("drift", d);
        ok &= d <= budget;
    }
    report.finish(ok);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceOptions {
    /// Cut levels; defaults to every level from the base level to `j_max`.
    pub schedule: Option<Vec<i32>>,
    /// Final error must be at most `tol |f|_X`.
    pub tol: f64,
    /// Defaults to the finest level the system allows on the grid.
    pub j_max: Option<i32>,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions { schedule: None, tol: 1e-9, j_max: None }
    }
}

/// `|f - partial_sum(j_cut)|_X` along a schedule of cut levels. Asserted only
/// for separable `X`: the errors must not increase and must end below `tol |f|_X`.
pub fn convergence_check(
    space: &SpaceSpec,
    wavelet: &WaveletSpec,
    f: &GridFunction,
    opts: &ConvergenceOptions,
) -> Result<VerificationReport> {
    let grid = *f.grid();
    let sys = wavelet.build(grid.dim())?;
    let j_max = opts.j_max.unwrap_or_else(|| sys.max_level(&grid));
    let schedule = opts.schedule.clone().unwrap_or_else(|| (sys.base_level()..=j_max).collect());
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty j_cut schedule".into()));
    }
    let mut report = base_report(
        "convergence",
        json!({ "grid": grid.spec(), "space": space, "wavelet": wavelet, "options": opts }),
    );
    report.asserted = space.is_separable();
    if !report.asserted {
        report.note(format!("{} is not separable; errors are reported without assertion", space.tag()));
    }
    let x = space.build(&grid)?;
    let coeffs = analyze(f, &sys, j_max)?;
    let norm_f = x.norm(f)?;
    let errors: Vec<f64> = schedule
        .par_iter()
        .map(|&j| x.norm(&f.sub(&partial_sum(&coeffs, &sys, &grid, j)?)))
        .collect::<Result<_>>()?;
    let mut monotone = true;
    for (i, (&j, &e)) in schedule.iter().zip(&errors).enumerate() {
        let ok = i == 0 || e <= errors[i - 1] * (1.0 + 1e-9) + 1e-14 * norm_f;
        monotone &= ok;
        report.push(
            ProbeRecord::new(format!("j_cut={j}"), ok)
                .with("j_cut", j as f64)
                .with("error", e)
                .with("relative_error", if norm_f > 0.0 { e / norm_f } else { 0.0 }),
        );
    }
    let last = *errors.last().expect("nonempty");
    report.aggregate("norm_f", norm_f);
    report.aggregate("final_error", last);
    report.finish(monotone && last <= opts.tol * norm_f);
    Ok(report)
}
