use super::Space;
use crate::error::Result;
use crate::grid::{Grid, GridFunction, Region};
use crate::report::{ProbeRecord, VerificationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Probes for the lattice-norm axioms.
#[derive(Clone, Debug)]
pub struct AxiomBattery {
    /// Nonzero probes; signed ones exercise `rho(f) = rho(|f|)`.
    pub probes: Vec<(String, GridFunction)>,
    /// Increasing sequences ending at their limit.
    pub sequences: Vec<(String, Vec<GridFunction>)>,
    pub balls: Vec<(String, Region)>,
}

/// Indicators of three balls, a bump, a signed wave, a random probe and two
/// increasing sequences (truncations of a spike and expanding restrictions).
pub fn standard_battery(grid: &Grid, seed: u64) -> AxiomBattery {
    let g = *grid;
    let n = g.dim();
    let mid = [(g.lo(0) + g.hi(0)) / 2.0, if n == 2 { (g.lo(1) + g.hi(1)) / 2.0 } else { 0.0 }];
    let side = (0..n).map(|a| g.side(a)).fold(f64::INFINITY, f64::min);
    let balls = vec![
        ("ball_small".to_string(), Region::ball(mid, side / 8.0)),
        ("ball_half".to_string(), Region::ball(mid, side / 4.0)),
        ("ball_off".to_string(), Region::ball([mid[0] + side / 4.0, mid[1]], side / 8.0)),
    ];
    let one = GridFunction::constant(g, 1.0);
    let dist = move |x: [f64; 2]| ((x[0] - mid[0]).powi(2) + (x[1] - mid[1]).powi(2)).sqrt();
    let mut probes: Vec<(String, GridFunction)> =
        balls.iter().map(|(name, b)| (format!("chi_{name}"), one.restrict(b))).collect();
    let bump = GridFunction::from_fn(g, |x| (-(dist(x) / side * 4.0).powi(2)).exp()).expect("finite");
    let wave = GridFunction::from_fn(g, |x| (6.0 * (x[0] - mid[0]) / side).sin() + 0.25).expect("finite");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = GridFunction::new(g, (0..g.len()).map(|_| rng.gen::<f64>()).collect()).expect("finite");
    probes.push(("bump".into(), bump));
    probes.push(("wave".into(), wave));
    probes.push(("random".into(), random.clone()));

    let spike = GridFunction::from_fn(g, |x| (dist(x) + g.h()).powf(-0.5)).expect("finite");
    let top = spike.sup();
    let mut trunc: Vec<GridFunction> = (0..8).map(|j| spike.map(|v| v.min(2f64.powi(j) * top / 128.0))).collect();
    trunc.push(spike.clone());
    let mut expand: Vec<GridFunction> =
        (1..6).map(|j| random.restrict(&Region::ball(mid, side * j as f64 / 10.0))).collect();
    expand.push(random);
    AxiomBattery { probes, sequences: vec![("truncated_spike".into(), trunc), ("expanding_random".into(), expand)], balls }
}

/// Runs the axiom checks for `space` on the standard battery of its grid.
pub fn axioms_check(space: &Space, seed: u64) -> Result<VerificationReport> {
    let battery = standard_battery(space.grid(), seed);
    let mut r = axioms_check_with(&|f| space.norm(f), &battery, 1e-6)?;
    r.config = serde_json::to_value(space.spec()).unwrap_or_default();
    Ok(r)
}

/// Axiom checks for an arbitrary evaluator with relative tolerance `tol`.
pub fn axioms_check_with(
    rho: &dyn Fn(&GridFunction) -> Result<f64>,
    battery: &AxiomBattery,
    tol: f64,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("axioms");
    let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()) || a == b;
    let norms: Vec<f64> = battery.probes.iter().map(|(_, f)| rho(f)).collect::<Result<_>>()?;

    if let Some((_, f)) = battery.probes.first() {
        let z = rho(&GridFunction::zeros(*f.grid()))?;
        rep.push(ProbeRecord::new("P1_zero", z == 0.0).with("rho", z));
    }
    for ((name, f), &nf) in battery.probes.iter().zip(&norms) {
        rep.push(ProbeRecord::new(format!("P1_definite_{name}"), nf > 0.0).with("rho", nf));
        for c in [-0.5, 3.0] {
            let scaled = rho(&f.scale(c))?;
            let expect = c.abs() * nf;
            rep.push(
                ProbeRecord::new(format!("P1_homogeneous_{name}_{c}"), close(scaled, expect))
                    .with("rho_cf", scaled)
                    .with("c_rho_f", expect),
            );
        }
        let abs = rho(&f.abs())?;
        rep.push(ProbeRecord::new(format!("P2_abs_{name}"), close(abs, nf)).with("rho_abs", abs).with("rho", nf));
    }
    for a in 0..battery.probes.len() {
        for b in a + 1..battery.probes.len() {
            let (fa, fb) = (&battery.probes[a].1, &battery.probes[b].1);
            let id = format!("{}+{}", battery.probes[a].0, battery.probes[b].0);
            let sum = rho(&fa.add(fb))?;
            let bound = norms[a] + norms[b];
            rep.push(
                ProbeRecord::new(format!("P1_triangle_{id}"), sum <= bound * (1.0 + tol))
                    .with("lhs", sum)
                    .with("rhs", bound),
            );
            let lower = fa.abs().zip_with(&fb.abs(), f64::min);
            let nl = rho(&lower)?;
            let cap = norms[a].min(norms[b]);
            rep.push(
                ProbeRecord::new(format!("P2_lattice_{id}"), nl <= cap * (1.0 + tol)).with("lhs", nl).with("rhs", cap),
            );
        }
    }
    for (name, seq) in &battery.sequences {
        let vals: Vec<f64> = seq.iter().map(rho).collect::<Result<_>>()?;
        let monotone = vals.windows(2).all(|w| w[0] <= w[1] * (1.0 + tol));
        let last = *vals.last().unwrap_or(&0.0);
        let limit = seq.last().map(rho).transpose()?.unwrap_or(0.0);
        let prev = if vals.len() > 1 { vals[vals.len() - 2] } else { 0.0 };
        rep.push(
            ProbeRecord::new(format!("P3_{name}"), monotone && close(last, limit) && limit.is_finite())
                .with("first", vals[0])
                .with("penultimate", prev)
                .with("limit", limit),
        );
    }
    for (name, ball) in &battery.balls {
        let g = *battery.probes[0].1.grid();
        let chi = GridFunction::constant(g, 1.0).restrict(ball);
        let nb = rho(&chi)?;
        rep.push(ProbeRecord::new(format!("P4_{name}"), nb.is_finite() && nb > 0.0).with("rho_chi", nb));
        let mut c_ball: f64 = 0.0;
        for ((_, f), &nf) in battery.probes.iter().zip(&norms) {
            let local = f.abs().integrate(ball);
            if local > 0.0 {
                c_ball = c_ball.max(local / nf);
            }
        }
        rep.push(ProbeRecord::new(format!("P5_{name}"), c_ball.is_finite()).with("C_B", c_ball));
        rep.aggregate(&format!("C_{name}"), c_ball);
    }
    rep.finish(true);
    Ok(rep)
}
