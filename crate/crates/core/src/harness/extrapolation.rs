use super::{base_report, drift, Battery, PairFamily};
use crate::error::{Error, Result};
use crate::grid::{CubeFamily, Grid, GridFunction};
use crate::operators::MaximalKind;
use crate::report::{ProbeRecord, VerificationReport};
use crate::spaces::{kothe_dual, weighted_lebesgue_norm, SpaceSpec};
use crate::weights::{ap_constant, estimate_operator_norm, norm_probes, Weight, WeightSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtrapolationOptions {
    /// Exponent of the weighted inequality defining the family.
    pub p: f64,
    /// Allowed growth of `C_emp` under battery doubling and one grid refinement.
    pub growth_budget: f64,
    /// Run the doubling and refinement passes.
    pub stability: bool,
    /// Maximal operator whose norms on `X` and `X'` are estimated.
    pub kind: MaximalKind,
}

impl Default for ExtrapolationOptions {
    fn default() -> Self {
        ExtrapolationOptions { p: 2.0, growth_budget: 2.0, stability: true, kind: MaximalKind::default() }
    }
}

/// `w = 1` and the capped powers `max(1,|x|)^a` with `a = n(p-1)/2` and `a = -n/2`,
/// all inside the `A_p` range.
pub fn validation_weights(grid: &Grid, p: f64) -> Result<Vec<(String, Weight)>> {
    let n = grid.dim() as f64;
    let specs = [
        ("one".to_string(), WeightSpec::one()),
        (format!("capped_power({})", n * (p - 1.0) / 2.0), WeightSpec::CappedPower { alpha: n * (p - 1.0) / 2.0 }),
        (format!("capped_power({})", -n / 2.0), WeightSpec::CappedPower { alpha: -n / 2.0 }),
    ];
    specs.into_iter().map(|(name, s)| Ok((name, s.build(grid)?))).collect()
}

struct Pass {
    c_emp: f64,
    records: Vec<ProbeRecord>,
    /// Smallest `a` with `N(t) = a t^b` valid for every pair and validation weight.
    a_min: f64,
}

fn run_pass(family: &PairFamily, space: &SpaceSpec, grid: &Grid, battery: &Battery, p: f64, tag: &str) -> Result<Pass> {
    let x = space.build(grid)?;
    let pairs = family.pairs_from(grid, battery)?;
    let nf = family.n_function();
    let weights = validation_weights(grid, p)?;
    let aps: Vec<f64> =
        weights.iter().map(|(_, w)| ap_constant(w, p, &CubeFamily::dyadic()).map(|e| e.value)).collect::<Result<_>>()?;
    let rows: Vec<Result<(ProbeRecord, f64, f64)>> = pairs
        .par_iter()
        .map(|(id, f, g)| {
            let mut a_min: f64 = 0.0;
            for ((name, w), ap) in weights.iter().zip(&aps) {
                let lhs = weighted_lebesgue_norm(p, Some(w), f)?;
                let rhs = weighted_lebesgue_norm(p, Some(w), g)?;
                let allowed = nf.eval(*ap) * rhs;
                if lhs > allowed * (1.0 + 1e-12) {
                    return Err(Error::ContractViolation(format!(
                        "pair {id} violates |f|_L^p(w) <= N([w]_A_p) |g|_L^p(w) for w = {name}: {lhs} > {allowed}"
                    )));
                }
                if lhs > 0.0 {
                    a_min = a_min.max(lhs / (rhs * ap.powf(nf.b)));
                }
            }
            let nfx = x.norm(f)?;
            let ngx = x.norm(g)?;
            let ratio = if nfx == 0.0 { 0.0 } else { nfx / ngx };
            let rec = ProbeRecord::new(format!("{tag}{id}"), ratio.is_finite())
                .with("norm_f", nfx)
                .with("norm_g", ngx)
                .with("ratio", ratio);
            Ok((rec, ratio, a_min))
        })
        .collect();
    let mut out = Pass { c_emp: 0.0, records: Vec::new(), a_min: 0.0 };
    for row in rows {
        let (rec, ratio, a) = row?;
        out.c_emp = out.c_emp.max(ratio);
        out.a_min = out.a_min.max(a);
        out.records.push(rec);
    }
    Ok(out)
}

/// Empirical extrapolation constant `C_emp = max |f|_X / |g|_X` over the pairs
/// of `family`, with the family contract re-validated on [`validation_weights`]
/// and the stability of `C_emp` under battery doubling and grid refinement.
pub fn extrapolation_check(
    family: &PairFamily,
    space: &SpaceSpec,
    grid: &Grid,
    opts: &ExtrapolationOptions,
) -> Result<VerificationReport> {
    if !(opts.p > 1.0 && opts.p.is_finite()) {
        return Err(Error::InvalidParameter(format!("weighted exponent must be in (1, inf), got {}", opts.p)));
    }
    if !(opts.growth_budget >= 1.0) {
        return Err(Error::InvalidParameter(format!("growth budget must be >= 1, got {}", opts.growth_budget)));
    }
    family.n_function().validate()?;
    space.validate()?;
    let mut report = base_report(
        "extrapolation",
        json!({ "grid": grid.spec(), "space": space, "family": family, "options": opts }),
    );

    // M must be bounded on X and its associate space
    let x = space.build(grid)?;
    let probes = norm_probes(grid, 0);
    let m = |f: &GridFunction| opts.kind.apply(f);
    let m_x = estimate_operator_norm(&x, &m, &probes, 1.0)?.value;
    report.aggregate("m_norm_x", m_x);
    let mut bounded = m_x.is_finite();
    match kothe_dual(space) {
        Ok(dual) => {
            let m_dual = estimate_operator_norm(&dual.build(grid)?, &m, &probes, 1.0)?.value;
            report.aggregate("m_norm_dual", m_dual);
            bounded &= m_dual.is_finite();
        }
        Err(_) => report.note("no explicit associate space; M is only estimated on X"),
    }

    let base = run_pass(family, space, grid, &family.battery, opts.p, "")?;
    report.aggregate("c_emp", base.c_emp);
    report.aggregate("pairs", base.records.len() as f64);
    report.aggregate("n_scale_min", base.a_min);
    report.aggregate("n_scale", family.n_function().a);
    report.aggregate("consistency", base.c_emp / m_x);
    report.records.extend(base.records);

    let mut stable = true;
    if opts.stability {
        let doubled = run_pass(family, space, grid, &family.battery.doubled(), opts.p, "doubled/")?;
        let refined = run_pass(family, space, &grid.refine()?, &family.battery, opts.p, "refined/")?;
        let growth = (doubled.c_emp / base.c_emp).max(refined.c_emp / base.c_emp);
        let growth = if base.c_emp == 0.0 && doubled.c_emp == 0.0 && refined.c_emp == 0.0 { 1.0 } else { growth };
        report.aggregate("c_emp_doubled", doubled.c_emp);
        report.aggregate("c_emp_refined", refined.c_emp);
        report.aggregate("growth", growth);
        report.aggregate("drift", drift(base.c_emp, doubled.c_emp).max(drift(base.c_emp, refined.c_emp)));
        report.aggregate("n_scale_min", base.a_min.max(doubled.a_min).max(refined.a_min));
        stable = growth <= opts.growth_budget;
        report.records.extend(doubled.records);
        report.records.extend(refined.records);
    }
    report.finish(bounded && base.c_emp.is_finite() && stable);
    Ok(report)
}
