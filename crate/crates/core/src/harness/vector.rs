use super::{base_report, drift, extrapolation_check, in_middle_half, middle_half, Battery, ExtrapolationOptions, NFunction, PairFamily, PairGenerator};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, Region};
use crate::numeric::ext_f64;
use crate::operators::{riesz, MaximalKind};
use crate::report::{ProbeRecord, VerificationReport};
use crate::spaces::SpaceSpec;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Indicators of `count` cubes of side `width`, evenly spaced along the first
/// axis of the middle half and centered along the second.
pub fn translated_indicators(grid: &Grid, count: usize, width: f64) -> Result<Vec<GridFunction>> {
    let mh = middle_half(grid);
    if !(width > 0.0 && width <= mh[0].1 - mh[0].0) {
        return Err(Error::InvalidParameter(format!("translate width {width} does not fit the middle half")));
    }
    let span = mh[0].1 - mh[0].0 - width;
    let one = GridFunction::constant(*grid, 1.0);
    Ok((0..count)
        .map(|i| {
            let a = mh[0].0 + if count > 1 { span * i as f64 / (count - 1) as f64 } else { span / 2.0 };
            let c1 = (mh[1].0 + mh[1].1) / 2.0;
            let (lo1, hi1) = if grid.dim() == 2 { (c1 - width / 2.0, c1 + width / 2.0) } else { (0.0, 0.0) };
            one.restrict(&Region::Box { lo: [a, lo1], hi: [a + width, hi1] })
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VectorOptions {
    /// Inner exponent in `(1, inf]`.
    #[serde(with = "ext_f64")]
    pub r: f64,
    pub kind: MaximalKind,
    /// Allowed drift of the ratio across batteries.
    pub drift_budget: f64,
}

impl Default for VectorOptions {
    fn default() -> Self {
        VectorOptions { r: 2.0, kind: MaximalKind::default(), drift_budget: 2.0 }
    }
}

fn lr_combine(fs: &[GridFunction], r: f64) -> GridFunction {
    let mut acc = GridFunction::zeros(*fs[0].grid());
    for f in fs {
        acc = if r.is_infinite() { acc.max_with(&f.abs()) } else { acc.add(&f.abs().powf(r)) };
    }
    if r.is_infinite() {
        acc
    } else {
        acc.powf(1.0 / r)
    }
}

/// `|(sum_j (M f_j)^r)^{1/r}|_X / |(sum_j |f_j|^r)^{1/r}|_X` for each battery,
/// asserted finite with bounded drift across batteries. An all-zero battery
/// gives `0/0`, recorded as a vacuous pass.
pub fn vector_valued_check(
    space: &SpaceSpec,
    batteries: &[(String, Vec<GridFunction>)],
    opts: &VectorOptions,
) -> Result<VerificationReport> {
    if !(opts.r > 1.0) {
        return Err(Error::InvalidParameter(format!("r must be in (1, inf], got {}", opts.r)));
    }
    let mut report = base_report(
        "vector_valued",
        json!({ "space": space, "batteries": batteries.iter().map(|(n, b)| (n.clone(), b.len())).collect::<Vec<_>>(), "options": opts }),
    );
    let rows: Vec<Result<(String, f64, f64)>> = batteries
        .par_iter()
        .map(|(name, fs)| {
            if fs.is_empty() {
                return Err(Error::InvalidParameter(format!("battery {name} is empty")));
            }
            let x = space.build(fs[0].grid())?;
            let mf: Vec<GridFunction> = fs.iter().map(|f| opts.kind.apply(f)).collect::<Result<_>>()?;
            let num = x.norm(&lr_combine(&mf, opts.r))?;
            let den = x.norm(&lr_combine(fs, opts.r))?;
            Ok((name.clone(), num, den))
        })
        .collect();
    let mut ratios = Vec::new();
    for row in rows {
        let (name, num, den) = row?;
        let vacuous = num == 0.0 && den == 0.0;
        let ratio = if vacuous { f64::NAN } else { num / den };
        let rec = ProbeRecord::new(name, vacuous || ratio.is_finite())
            .with("lhs", num)
            .with("rhs", den)
            .with("ratio", ratio);
        report.push(if vacuous { rec.note("vacuous: 0/0") } else { rec });
        if !vacuous {
            ratios.push(ratio);
        }
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let d = if ratios.is_empty() { 1.0 } else { drift(lo, hi) };
    report.aggregate("max_ratio", hi);
    report.aggregate("drift", d);
    report.finish(d <= opts.drift_budget);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RieszOptions {
    /// Truncation radius in cells.
    pub eps_cells: f64,
    /// Allowed disagreement between the direct ratio and the extrapolation route.
    pub agreement: f64,
    /// `N` of the Riesz pair family in the cross-check.
    pub n_function: Option<NFunction>,
    /// Weighted exponent of the pair family.
    pub p: f64,
}

impl Default for RieszOptions {
    fn default() -> Self {
        RieszOptions { eps_cells: 1.0, agreement: 2.0, n_function: None, p: 2.0 }
    }
}

/// `max_j max_f |R_j f|_X / |f|_X` over the battery, cross-checked against
/// [`extrapolation_check`] on the Riesz pair family.
pub fn riesz_boundedness_check(
    space: &SpaceSpec,
    grid: &Grid,
    battery: &Battery,
    opts: &RieszOptions,
) -> Result<VerificationReport> {
    let probes = battery.generate(grid)?;
    if let Some((id, _)) = probes.iter().find(|(_, f)| !in_middle_half(f)) {
        return Err(Error::InvalidParameter(format!("probe {id} is not supported in the middle half of the box")));
    }
    let mut report = base_report(
        "riesz_boundedness",
        json!({ "grid": grid.spec(), "space": space, "battery": battery, "options": opts }),
    );
    let x = space.build(grid)?;
    let rows: Vec<Result<Vec<ProbeRecord>>> = probes
        .par_iter()
        .map(|(id, f)| {
            let nf = x.norm(f)?;
            (0..grid.dim())
                .map(|axis| {
                    let nr = x.norm(&riesz(f, axis, opts.eps_cells * grid.h())?)?;
                    let ratio = nr / nf;
                    Ok(ProbeRecord::new(format!("{id}_R{}", axis + 1), ratio.is_finite())
                        .with("norm_rf", nr)
                        .with("norm_f", nf)
                        .with("ratio", ratio))
                })
                .collect()
        })
        .collect();
    let mut c: f64 = 0.0;
    for row in rows {
        for rec in row? {
            c = c.max(rec.get("ratio").unwrap_or(f64::INFINITY));
            report.push(rec);
        }
    }
    let mut family = PairFamily::new(PairGenerator::RieszPairs { eps_cells: opts.eps_cells }, battery.clone());
    family.n = opts.n_function;
    let xopts = ExtrapolationOptions { p: opts.p, stability: false, ..Default::default() };
    let ext = extrapolation_check(&family, space, grid, &xopts)?;
    let c_ext = ext.get("c_emp").unwrap_or(f64::NAN);
    let agree = drift(c, c_ext);
    report.aggregate("max_ratio", c);
    report.aggregate("extrapolation_c_emp", c_ext);
    report.aggregate("agreement", agree);
    report.aggregate("n_scale_min", ext.get("n_scale_min").unwrap_or(f64::NAN));
    report.finish(c.is_finite() && agree <= opts.agreement);
    Ok(report)
}
