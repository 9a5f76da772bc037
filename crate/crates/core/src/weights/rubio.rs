use super::{ap_constant, ApEstimate, Weight};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, Region};
use crate::operators::MaximalKind;
use crate::spaces::Space;
use serde::{Deserialize, Serialize};

/// Parameters of the Rubio de Francia series `sum_l M^l k / (alpha |M|)^l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RubioOptions {
    pub alpha: f64,
    /// Estimate of the operator norm of `M` on the space.
    pub norm_m: f64,
    pub l_max: usize,
    /// Relative tail tolerance against `|k|_X`.
    pub tol: f64,
    pub kind: MaximalKind,
}

impl RubioOptions {
    pub fn new(alpha: f64, norm_m: f64) -> Self {
        RubioOptions { alpha, norm_m, l_max: 200, tol: 1e-10, kind: MaximalKind::Centered(Default::default()) }
    }

    pub fn with_kind(mut self, kind: MaximalKind) -> Self {
        self.kind = kind;
        self
    }

    /// `alpha |M|`
    pub fn denominator(&self) -> f64 {
        self.alpha * self.norm_m
    }
}

/// `alpha = max(4, 2 beta^{1/p} / |M| + 1)`.
pub fn default_alpha(beta: f64, p: f64, norm_m: f64) -> f64 {
    (2.0 * beta.powf(1.0 / p) / norm_m + 1.0).max(4.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RubioMajorant {
    pub value: GridFunction,
    /// Number of summed terms (`l = 0..terms`); `term_norms` has one more entry.
    pub terms: usize,
    /// Geometric bound on the omitted tail in the norm of the space.
    pub tail_bound: f64,
    /// Largest observed `|M^{l+1} k|_X / (alpha |M| |M^l k|_X)`.
    pub contraction: f64,
    pub term_norms: Vec<f64>,
    /// `max_x M(R)(x) / R(x)`, the measured `A_1`-type constant.
    pub a1: f64,
}

/// Truncated Rubio de Francia majorant of `k` in `space`.
pub fn rubio_majorant(k: &GridFunction, space: &Space, opts: &RubioOptions) -> Result<RubioMajorant> {
    if !(opts.alpha >= 2.0) || !(opts.norm_m > 0.0 && opts.norm_m.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Rubio series needs alpha >= 2 and a finite positive |M|, got alpha = {}, |M| = {}",
            opts.alpha, opts.norm_m
        )));
    }
    let denom = opts.denominator();
    let mut term = k.abs();
    let k_norm = space.norm(&term)?;
    if !k_norm.is_finite() {
        return Err(Error::InvalidParameter("k has infinite norm".into()));
    }
    if k_norm == 0.0 {
        return Ok(RubioMajorant {
            value: term,
            terms: 1,
            tail_bound: 0.0,
            contraction: 0.0,
            term_norms: vec![0.0],
            a1: 0.0,
        });
    }
    let mut sum = term.clone();
    let mut norms = vec![k_norm];
    let mut contraction: f64 = 0.0;
    loop {
        let l = norms.len();
        if l > opts.l_max {
            return Err(Error::NotContracting { terms: l, ratio: contraction });
        }
        term = opts.kind.apply(&term)?.scale(1.0 / denom);
        let n = space.norm(&term)?;
        let ratio = n / norms[l - 1];
        contraction = contraction.max(ratio);
        norms.push(n);
        if !(contraction < 1.0) {
            return Err(Error::NotContracting { terms: l + 1, ratio: contraction });
        }
        // `term` is the first omitted term; stopping needs it small in norm and
        // pointwise, so that `M(sum) <= alpha |M| sum (1 + tol)` holds
        let tail = n / (1.0 - contraction);
        let pointwise = term.values().iter().zip(sum.values()).all(|(t, s)| *t <= opts.tol * s);
        if tail <= opts.tol * k_norm && pointwise {
            let m = opts.kind.apply(&sum)?;
            let a1 = m
                .values()
                .iter()
                .zip(sum.values())
                .map(|(a, b)| if *b > 0.0 { a / b } else { 0.0 })
                .fold(0.0, f64::max);
            return Ok(RubioMajorant { value: sum, terms: l, tail_bound: tail, contraction, term_norms: norms, a1 });
        }
        sum = sum.add(&term);
    }
}

/// Largest observed ratio `|T f|_X / |f|_X` before the safety factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorNormEstimate {
    pub raw: f64,
    pub safety: f64,
    pub value: f64,
    pub witness: usize,
}

/// `safety * max over probes of |T f|_X / |f|_X`.
pub fn estimate_operator_norm(
    space: &Space,
    op: &dyn Fn(&GridFunction) -> Result<GridFunction>,
    probes: &[GridFunction],
    safety: f64,
) -> Result<OperatorNormEstimate> {
    let mut raw: f64 = 0.0;
    let mut witness = 0;
    for (i, f) in probes.iter().enumerate() {
        let nf = space.norm(f)?;
        if !nf.is_finite() || nf == 0.0 {
            return Err(Error::InvalidParameter(format!("probe {i} has norm {nf}")));
        }
        let ratio = space.norm(&op(f)?)? / nf;
        if ratio > raw {
            raw = ratio;
            witness = i;
        }
    }
    Ok(OperatorNormEstimate { raw, safety, value: raw * safety, witness })
}

/// Indicators of balls of radius `side * 2^-j` (j = 3..6), centered on an
/// interior lattice picked by `variant` so that different variants are disjoint.
pub fn norm_probes(grid: &crate::grid::Grid, variant: usize) -> Vec<GridFunction> {
    let g = *grid;
    let n = g.dim();
    let side = (0..n).map(|a| g.side(a)).fold(f64::INFINITY, f64::min);
    let mid: Vec<f64> = (0..2).map(|a| if a < n { (g.lo(a) + g.hi(a)) / 2.0 } else { 0.0 }).collect();
    let shift = if variant.is_multiple_of(2) { -0.125 } else { 0.1875 };
    let one = GridFunction::constant(g, 1.0);
    let mut out = Vec::new();
    for j in 3..=6 {
        let r = side * 2f64.powi(-j);
        for d in [-1.0, 0.0, 1.0] {
            let c0 = mid[0] + side * (shift + 0.125 * d);
            let c = [c0, if n == 2 { mid[1] + side * shift } else { 0.0 }];
            let f = one.restrict(&Region::ball(c, r));
            if !f.is_zero() {
                out.push(f);
            }
        }
    }
    out
}

/// `g + eps M chi_{B(1)}` with `eps = 1e-8 |g|_X`, making `g` strictly positive.
pub fn regularize(g: &GridFunction, space: &Space, kind: &MaximalKind) -> Result<GridFunction> {
    let eps = 1e-8 * space.norm(g)?;
    let chi = GridFunction::constant(*g.grid(), 1.0).restrict(&Region::ball([0.0; 2], 1.0));
    let bump = if chi.is_zero() { GridFunction::constant(*g.grid(), 1.0) } else { chi };
    let m = kind.apply(&bump)?;
    Ok(g.abs().add(&m.scale(eps.max(f64::MIN_POSITIVE))))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositeWeight {
    pub weight: Weight,
    pub ap: ApEstimate,
    /// `(alpha |M|_X)^{p-1} (alpha' |M|_X')`
    pub bound: f64,
    /// Same product with the measured `A_1` constants of the two majorants.
    pub measured_bound: f64,
    pub r_primal: RubioMajorant,
    pub r_dual: RubioMajorant,
}

/// `W = R_{g+f}^{1-p} R'_h` and its `A_p` estimate on the cube family of `kind`.
///
/// Both majorants must use [`MaximalKind::DyadicCubes`] so that their `A_1`
/// bounds refer to the same cubes as the `A_p` estimate.
#[allow(clippy::too_many_arguments)]
pub fn composite_extrapolation_weight(
    f: &GridFunction,
    g: &GridFunction,
    h: &GridFunction,
    p: f64,
    primal: (&Space, &RubioOptions),
    dual: (&Space, &RubioOptions),
) -> Result<CompositeWeight> {
    let family = match (&primal.1.kind, &dual.1.kind) {
        (MaximalKind::DyadicCubes(a), MaximalKind::DyadicCubes(b)) if a == b => *a,
        _ => {
            return Err(Error::InvalidParameter(
                "composite weight needs the same cube-family maximal operator on both sides".into(),
            ))
        }
    };
    if g.values().iter().chain(h.values()).any(|v| !(*v > 0.0)) {
        return Err(Error::ContractViolation("g and h must be strictly positive".into()));
    }
    let r_primal = rubio_majorant(&g.add(f).abs(), primal.0, primal.1)?;
    let r_dual = rubio_majorant(h, dual.0, dual.1)?;
    let w = r_primal.value.powf(1.0 - p).mul(&r_dual.value);
    let weight = Weight::new(w)?;
    let ap = ap_constant(&weight, p, &family)?;
    let slack = (1.0 + primal.1.tol).powf(p - 1.0) * (1.0 + dual.1.tol);
    let bound = primal.1.denominator().powf(p - 1.0) * dual.1.denominator() * slack;
    let measured_bound = r_primal.a1.powf(p - 1.0) * r_dual.a1;
    Ok(CompositeWeight { weight, ap, bound, measured_bound, r_primal, r_dual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CubeFamily, Grid};
    use crate::operators::maximal;
    use crate::spaces::SpaceSpec;

    fn l2(g: Grid) -> Space {
        SpaceSpec::lebesgue(2.0).build(&g).unwrap()
    }

    #[test]
    fn constant_geometric_series() {
        let g = Grid::line(-2.0, 2.0, 6).unwrap();
        let opts = RubioOptions::new(4.0, 1.5);
        let r = rubio_majorant(&GridFunction::constant(g, 3.0), &l2(g), &opts).unwrap();
        let a = opts.denominator();
        let expect = 3.0 * a / (a - 1.0);
        for v in r.value.values() {
            assert!((v - expect).abs() <= r.tail_bound + 1e-12);
        }
        assert!((r.contraction - 1.0 / a).abs() < 1e-12);
    }

    #[test]
    fn indicator_against_long_sum() {
        let g = Grid::line(-4.0, 4.0, 6).unwrap();
        let k = GridFunction::indicator(g, |x| (0.0..1.0).contains(&x[0]));
        let x = l2(g);
        let norm_m = estimate_operator_norm(&x, &|f| Ok(maximal(f, Default::default())), &norm_probes(&g, 0), 2.0)
            .unwrap()
            .value;
        let opts = RubioOptions::new(4.0, norm_m);
        let r = rubio_majorant(&k, &x, &opts).unwrap();
        let mut reference = k.clone();
        let mut term = k.clone();
        for _ in 1..40 {
            term = maximal(&term, Default::default()).scale(1.0 / opts.denominator());
            reference = reference.add(&term);
        }
        assert!(x.norm(&reference.sub(&r.value)).unwrap() <= r.tail_bound * 1.01 + 1e-15);
        assert!(r.value.values().iter().zip(k.values()).all(|(a, b)| a >= b));
        assert!(r.a1 <= opts.denominator() * (1.0 + opts.tol));
        let bound = opts.alpha / (opts.alpha - 1.0) * x.norm(&k).unwrap() * (1.0 + opts.tol);
        assert!(x.norm(&r.value).unwrap() <= bound);
    }

    #[test]
    fn not_contracting_is_reported() {
        let g = Grid::line(-1.0, 1.0, 5).unwrap();
        let opts = RubioOptions::new(2.0, 0.25);
        let err = rubio_majorant(&GridFunction::constant(g, 1.0), &l2(g), &opts).unwrap_err();
        assert!(matches!(err, Error::NotContracting { .. }));
    }

    #[test]
    fn operator_norm_identity_and_maximal() {
        let g = Grid::line(-4.0, 4.0, 7).unwrap();
        let x = l2(g);
        let id = estimate_operator_norm(&x, &|f| Ok(f.clone()), &norm_probes(&g, 0), 2.0).unwrap();
        assert_eq!(id.value, 2.0);
        let m = estimate_operator_norm(&x, &|f| Ok(maximal(f, Default::default())), &norm_probes(&g, 0), 1.0).unwrap();
        assert!(m.value >= 1.0 && m.value.is_finite());
    }

    #[test]
    fn composite_trivial_case() {
        let g = Grid::line(-2.0, 2.0, 5).unwrap();
        let kind = MaximalKind::DyadicCubes(CubeFamily::default());
        let opts = RubioOptions::new(4.0, 1.5).with_kind(kind);
        let x = l2(g);
        let one = GridFunction::constant(g, 1.0);
        let c = composite_extrapolation_weight(&GridFunction::zeros(g), &one, &one, 2.0, (&x, &opts), (&x, &opts)).unwrap();
        let w0 = c.weight.values()[0];
        assert!(c.weight.values().iter().all(|v| (v - w0).abs() < 1e-12 * w0));
        assert!((c.ap.value - 1.0).abs() < 1e-9);
        let direct = c.r_primal.value.powf(-1.0).mul(&c.r_dual.value);
        assert_eq!(direct.values(), c.weight.values());
    }
}
