use super::{base_report, NFunction};
use crate::error::{Error, Result};
use crate::grid::{CubeFamily, Grid, GridFunction};
use crate::numeric::relative_slack;
use crate::operators::MaximalKind;
use crate::report::{ProbeRecord, VerificationReport};
use crate::spaces::{kothe_dual, Space, SpaceSpec};
use crate::weights::{
    composite_extrapolation_weight, default_alpha, estimate_operator_norm, norm_probes, regularize, RubioOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProofChainOptions {
    /// Fixed Rubio parameter; `None` starts at 4 and raises it until the
    /// weighted series margin is positive.
    pub alpha: Option<f64>,
    /// Constant of the weighted maximal bound; measured along the Rubio orbit when absent.
    pub beta: Option<f64>,
    pub epsilon: f64,
    /// `N` of the pair family; the generated triples satisfy `f <= g`, which
    /// puts them in the family for every `N >= 1`.
    pub n_function: NFunction,
    pub cubes: CubeFamily,
    /// Factor applied to the estimated norms of `M` on `X` and `X'`.
    pub safety: f64,
    /// Minimum relative slack.
    pub tol: f64,
}

impl Default for ProofChainOptions {
    fn default() -> Self {
        ProofChainOptions {
            alpha: None,
            beta: None,
            epsilon: 0.25,
            n_function: NFunction::linear(1.0),
            cubes: CubeFamily::dyadic(),
            safety: 2.0,
            tol: 1e-9,
        }
    }
}

/// Smallest `C` with `a b^{p-1} <= C a^p + eps b^p` for all `a, b >= 0`:
/// `C = ((p-1) / (eps p))^{p-1} / p`.
pub fn young_constant(p: f64, eps: f64) -> f64 {
    ((p - 1.0) / (eps * p)).powf(p - 1.0) / p
}

/// `g, h` uniform on `[0, 1)` per cell and `f = u g` with `u` uniform on `[0, 1)`.
pub fn random_triple(grid: &Grid, seed: u64) -> Result<(GridFunction, GridFunction, GridFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.len();
    let g: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let h: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let f: Vec<f64> = g.iter().map(|v| v * rng.gen::<f64>()).collect();
    Ok((GridFunction::new(*grid, f)?, GridFunction::new(*grid, g)?, GridFunction::new(*grid, h)?))
}

struct Step {
    name: &'static str,
    lhs: f64,
    rhs: f64,
}

fn step(name: &'static str, lhs: f64, rhs: f64) -> Step {
    Step { name, lhs, rhs }
}

/// All steps for one `alpha`; returns the steps and the series ratio `2^p beta / (alpha |M|)^p`.
#[allow(clippy::too_many_arguments)]
fn chain(
    f: &GridFunction,
    g: &GridFunction,
    h: &GridFunction,
    p: f64,
    x: &Space,
    xd: &Space,
    primal: &RubioOptions,
    dual: &RubioOptions,
    opts: &ProofChainOptions,
) -> Result<(Vec<Step>, f64, f64)> {
    let cw = composite_extrapolation_weight(f, g, h, p, (x, primal), (xd, dual))?;
    let w = cw.weight.function();
    let r = &cw.r_primal.value;
    let rd = &cw.r_dual.value;
    let k = g.add(f);
    let eps = opts.epsilon;
    let c_eps = young_constant(p, eps);
    let int = |u: &GridFunction| u.integral();
    let mut steps = Vec::new();

    // pointwise Young with a = f, b = R
    let young = f
        .values()
        .iter()
        .zip(r.values())
        .map(|(a, b)| relative_slack(a * b.powf(p - 1.0), c_eps * a.powf(p) + eps * b.powf(p)))
        .fold(f64::INFINITY, f64::min);
    steps.push(step("young_pointwise", 0.0, young));
    steps.push(step("composite_ap_measured", cw.ap.value, cw.measured_bound));
    steps.push(step("composite_ap_bound", cw.measured_bound, cw.bound));

    let fh = int(&f.mul(h));
    let f_rd = int(&f.mul(rd));
    steps.push(step("h_below_dual_majorant", fh, f_rd));

    let t1 = int(&f.powf(p).mul(w));
    let t2 = int(&r.powf(p).mul(w));
    let split = int(&f.mul(&r.powf(p - 1.0)).mul(w));
    steps.push(step("young_split", split, c_eps * t1 + eps * t2));

    let gpw = int(&g.powf(p).mul(w));
    let n_ap = opts.n_function.eval(cw.ap.value).powf(p);
    let n_bound = opts.n_function.eval(cw.bound).powf(p);
    steps.push(step("family_inequality", t1, n_ap * gpw));
    steps.push(step("family_constant", n_ap * gpw, n_bound * gpw));
    let g_rd = int(&g.mul(rd));
    steps.push(step("g_below_majorant", gpw, g_rd));
    let norm_g = x.norm(g)?;
    let norm_rd = xd.norm(rd)?;
    let norm_h = xd.norm(h)?;
    steps.push(step("holder", g_rd, norm_g * norm_rd));
    let geo = dual.alpha / (dual.alpha - 1.0) * (1.0 + dual.tol);
    steps.push(step("dual_majorant_norm", norm_rd, geo * norm_h));
    steps.push(step("first_term", t1, n_bound * norm_g * norm_rd));

    // terms t_l = M^l k / (alpha |M|)^l as summed in the majorant
    let denom = primal.denominator();
    let mut terms = vec![k.abs()];
    for _ in 1..cw.r_primal.terms {
        let next = primal.kind.apply(terms.last().expect("nonempty"))?.scale(1.0 / denom);
        terms.push(next);
    }
    let weighted: Vec<f64> = terms.iter().map(|t| int(&t.powf(p).mul(w))).collect();
    let nested: f64 = weighted.iter().enumerate().map(|(l, v)| 2f64.powf(p * (l as f64 + 1.0)) * v).sum();
    steps.push(step("nested_power_sum", t2, nested));

    // I_l = int (M^l k)^p W; beta is the largest one-step ratio along the orbit
    let i_l: Vec<f64> = weighted.iter().enumerate().map(|(l, v)| v * denom.powf(p * l as f64)).collect();
    let beta = opts.beta.unwrap_or_else(|| {
        i_l.windows(2).map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 }).fold(1.0, f64::max)
    });
    let mut worst = (0.0, 0.0);
    let mut worst_slack = f64::INFINITY;
    for (l, v) in i_l.iter().enumerate().skip(1) {
        let rhs = beta.powi(l as i32) * i_l[0];
        let s = relative_slack(*v, rhs);
        if s < worst_slack {
            worst_slack = s;
            worst = (*v, rhs);
        }
    }
    if i_l.len() > 1 {
        steps.push(step("weighted_maximal_iterates", worst.0, worst.1));
    }
    let q = 2f64.powf(p) * beta / denom.powf(p);
    steps.push(step("series_margin", q, 1.0));
    let series = if q < 1.0 { 1.0 / (1.0 - q) } else { f64::INFINITY };
    let kpw = i_l[0];
    steps.push(step("second_term", t2, 2f64.powf(p) * series * kpw));
    let k_rd = int(&k.mul(rd));
    steps.push(step("majorant_above_sum", kpw, k_rd));
    let norm_f = x.norm(f)?;
    steps.push(step("second_term_holder", k_rd, (norm_f + norm_g) * norm_rd));
    let final_rhs = c_eps * n_bound * norm_g * norm_rd + eps * 2f64.powf(p) * series * (norm_f + norm_g) * norm_rd;
    steps.push(step("final", fh, final_rhs));
    Ok((steps, q, beta))
}

/// Evaluates both sides of every inequality in the extrapolation argument for
/// one triple `(f, g, h)` and weighted exponent `p`; each step passes when its
/// relative slack is at least `-tol`.
pub fn proof_chain_check(
    f: &GridFunction,
    g: &GridFunction,
    h: &GridFunction,
    p: f64,
    space: &SpaceSpec,
    opts: &ProofChainOptions,
) -> Result<VerificationReport> {
    let mut report = base_report(
        "proof_chain",
        json!({ "grid": f.grid().spec(), "space": space, "p": p, "options": opts }),
    );
    run_triple(&mut report, "", f, g, h, p, space, opts)?;
    report.finish(true);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn run_triple(
    report: &mut VerificationReport,
    prefix: &str,
    f: &GridFunction,
    g: &GridFunction,
    h: &GridFunction,
    p: f64,
    space: &SpaceSpec,
    opts: &ProofChainOptions,
) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must be in (1, inf), got {p}")));
    }
    if !(opts.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", opts.epsilon)));
    }
    opts.n_function.validate()?;
    let grid = *f.grid();
    let x = space.build(&grid)?;
    let dual_spec = kothe_dual(space)?;
    let xd = dual_spec.build(&grid)?;
    let kind = MaximalKind::DyadicCubes(opts.cubes);
    let m = |u: &GridFunction| kind.apply(u);
    let probes = norm_probes(&grid, 0);
    let m_x = estimate_operator_norm(&x, &m, &probes, opts.safety)?.value;
    let m_xd = estimate_operator_norm(&xd, &m, &probes, opts.safety)?.value;
    let f = f.abs();
    let g = regularize(g, &x, &kind)?;
    let h = regularize(h, &xd, &kind)?;

    let mut alpha = opts.alpha.unwrap_or(4.0);
    let mut attempts = 0;
    let (steps, q, beta) = loop {
        let primal = RubioOptions::new(alpha, m_x).with_kind(kind);
        let dual = RubioOptions::new(alpha, m_xd).with_kind(kind);
        let (steps, q, beta) = chain(&f, &g, &h, p, &x, &xd, &primal, &dual, opts)?;
        attempts += 1;
        if q < 1.0 || opts.alpha.is_some() || attempts >= 8 {
            break (steps, q, beta);
        }
        alpha = alpha.max(default_alpha(beta, p, m_x)) * 1.25;
    };
    let mut worst = f64::INFINITY;
    for s in &steps {
        let slack = relative_slack(s.lhs, s.rhs);
        let slack = if s.name == "young_pointwise" { s.rhs } else { slack };
        worst = worst.min(slack);
        report.push(
            ProbeRecord::new(format!("{prefix}{}", s.name), slack >= -opts.tol && !slack.is_nan())
                .with("lhs", s.lhs)
                .with("rhs", s.rhs)
                .with("slack", slack),
        );
    }
    report.aggregate(&format!("{prefix}alpha"), alpha);
    report.aggregate(&format!("{prefix}beta"), beta);
    report.aggregate(&format!("{prefix}series_ratio"), q);
    report.aggregate(&format!("{prefix}m_norm_x"), m_x);
    report.aggregate(&format!("{prefix}m_norm_dual"), m_xd);
    report.aggregate(&format!("{prefix}min_slack"), worst);
    Ok(())
}

/// [`proof_chain_check`] over `triples` seeded random triples and each `p`,
/// merged into one report with record ids `t<i>/p<p>/<step>`.
pub fn proof_chain_suite(
    grid: &Grid,
    space: &SpaceSpec,
    ps: &[f64],
    triples: usize,
    seed: u64,
    opts: &ProofChainOptions,
) -> Result<VerificationReport> {
    use rayon::prelude::*;
    let mut report = base_report(
        "proof_chain",
        json!({ "grid": grid.spec(), "space": space, "p": ps, "triples": triples, "seed": seed, "options": opts }),
    );
    let jobs: Vec<(usize, f64)> = (0..triples).flat_map(|t| ps.iter().map(move |&p| (t, p))).collect();
    let parts: Vec<Result<VerificationReport>> = jobs
        .par_iter()
        .map(|&(t, p)| {
            let (f, g, h) = random_triple(grid, seed.wrapping_add(t as u64))?;
            let mut r = VerificationReport::new("proof_chain");
            run_triple(&mut r, &format!("t{t}/p{p}/"), &f, &g, &h, p, space, opts)?;
            Ok(r)
        })
        .collect();
    let mut worst = f64::INFINITY;
    for part in parts {
        let part = part?;
        for (k, v) in &part.aggregates {
            if k.ends_with("min_slack") {
                worst = worst.min(v.0);
            }
        }
        report.records.extend(part.records);
        report.aggregates.extend(part.aggregates);
    }
    report.aggregate("min_slack", worst);
    report.finish(true);
    Ok(report)
}
