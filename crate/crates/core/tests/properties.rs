use ballspace::grid::{CubeFamily, Grid, GridFunction, Region};
use ballspace::harness::{Battery, ProbeSpec};
use ballspace::operators::{
    bessel_potential, maximal, maximal_with, riesz, BesselDirection, MaximalKind, MaximalOptions, Normalization,
};
use ballspace::spaces::{luxemburg, pairing_check, ExponentSpec, SpaceSpec, YoungSpec};
use ballspace::wavelets::{analyze, square_function_v, square_function_w, Family, WaveletSpec};
use ballspace::weights::{
    ap_constant, dual_weight, estimate_operator_norm, norm_probes, rubio_majorant, RubioOptions, Weight, WeightSpec,
};
use proptest::prelude::*;

const CELLS: usize = 128;

fn grid() -> Grid {
    Grid::new(1, &[(-4.0, 4.0)], 4).unwrap()
}

fn func(values: Vec<f64>) -> GridFunction {
    GridFunction::new(grid(), values).unwrap()
}

fn values(lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, CELLS)
}

/// Nonzero signed values.
fn signed() -> impl Strategy<Value = Vec<f64>> {
    values(-1.0, 1.0).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

fn weight(values: Vec<f64>) -> Weight {
    Weight::new(func(values)).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn reversed(f: &GridFunction) -> GridFunction {
    let mut v = f.values().to_vec();
    v.reverse();
    GridFunction::new(*f.grid(), v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integrate_is_linear_and_monotone(a in values(-1.0, 1.0), d in values(0.0, 1.0), c in -3.0f64..3.0) {
        let f = func(a);
        let g = f.add(&func(d));
        for region in [Region::All, Region::interval(-1.3, 2.7), Region::ball([0.4, 0.0], 1.9)] {
            prop_assert!(f.integrate(&region) <= g.integrate(&region) + 1e-12);
            let lin = f.scale(c).add(&g).integrate(&region);
            prop_assert!((lin - (c * f.integrate(&region) + g.integrate(&region))).abs() <= 1e-10);
        }
    }

    #[test]
    fn rearrangement_preserves_lp_norms(a in values(-2.0, 2.0)) {
        let f = func(a);
        let r = f.rearrange();
        for p in [1.0, 2.0, 3.5] {
            prop_assert!(close(r.power_integral(p), f.lp_norm(p).powf(p), 1e-12));
        }
    }

    #[test]
    fn maximal_sublinear_homogeneous_dominating(a in signed(), b in signed(), c in -4.0f64..4.0) {
        let (f, g) = (func(a), func(b));
        let mf = maximal(&f, Normalization::Measure);
        let mg = maximal(&g, Normalization::Measure);
        let mfg = maximal(&f.add(&g), Normalization::Measure);
        let mcf = maximal(&f.scale(c), Normalization::Measure);
        for i in 0..CELLS {
            prop_assert!(mfg.values()[i] <= (mf.values()[i] + mg.values()[i]) * (1.0 + 1e-12) + 1e-15);
            prop_assert!(close(mcf.values()[i], c.abs() * mf.values()[i], 1e-12));
            prop_assert!(mf.values()[i] + 1e-15 >= f.values()[i].abs());
        }
    }

    #[test]
    fn radius_normalization_is_twice_measure_in_1d(a in signed()) {
        let f = func(a);
        let m = maximal(&f, Normalization::Measure);
        let p = maximal(&f, Normalization::Radius);
        for i in 0..CELLS {
            prop_assert!(close(p.values()[i], 2.0 * m.values()[i], 1e-12));
        }
    }

    #[test]
    fn exhaustive_ladder_dominates_dyadic(a in signed()) {
        let f = func(a);
        let d = maximal(&f, Normalization::Measure);
        let e = maximal_with(&f, &MaximalOptions::exhaustive());
        for i in 0..CELLS {
            prop_assert!(e.values()[i] + 1e-12 >= d.values()[i]);
        }
    }

    #[test]
    fn riesz_is_linear_and_odd(a in signed(), b in signed(), c in -2.0f64..2.0) {
        let (f, g) = (func(a), func(b));
        let h = grid().h();
        let rf = riesz(&f, 0, h).unwrap();
        let rg = riesz(&g, 0, h).unwrap();
        let lin = riesz(&f.scale(c).add(&g), 0, h).unwrap();
        let scale = rf.sup().max(rg.sup()).max(1.0);
        for i in 0..CELLS {
            prop_assert!((lin.values()[i] - (c * rf.values()[i] + rg.values()[i])).abs() <= 1e-10 * scale);
        }
        let odd = reversed(&riesz(&reversed(&f), 0, h).unwrap());
        for i in 0..CELLS {
            prop_assert!((odd.values()[i] + rf.values()[i]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn bessel_forward_inverts_inverse(a in signed(), s in 0.1f64..2.0) {
        let f = func(a);
        let back = bessel_potential(&bessel_potential(&f, s, BesselDirection::Inverse).unwrap(), s, BesselDirection::Forward).unwrap();
        prop_assert!(back.sub(&f).lp_norm(2.0) <= 1e-10 * f.lp_norm(2.0));
    }

    #[test]
    fn ap_at_least_one_dual_and_monotone(w in values(0.05, 5.0), p in 1.2f64..4.0, dq in 0.0f64..1.0) {
        let w = weight(w);
        let fam = CubeFamily::with_shifts();
        let ap = ap_constant(&w, p, &fam).unwrap().value;
        prop_assert!(ap >= 1.0 - 1e-9);
        let pp = p / (p - 1.0);
        let dual = ap_constant(&dual_weight(&w, p).unwrap(), pp, &fam).unwrap().value;
        prop_assert!(close(dual, ap.powf(pp - 1.0), 1e-9));
        let q = 1.0 + (p - 1.0) * (1.0 - dq).max(0.05);
        prop_assert!(ap <= ap_constant(&w, q, &fam).unwrap().value * (1.0 + 1e-12));
    }

    #[test]
    fn rubio_majorant_contract(k in signed(), alpha in 2.5f64..8.0) {
        let g = grid();
        let x = SpaceSpec::lebesgue(2.0).build(&g).unwrap();
        let kind = MaximalKind::default();
        let m = |f: &GridFunction| kind.apply(f);
        let norm_m = estimate_operator_norm(&x, &m, &norm_probes(&g, 0), 1.0).unwrap().value;
        let k = func(k);
        let opts = RubioOptions::new(alpha, norm_m).with_kind(kind);
        let r = rubio_majorant(&k, &x, &opts).unwrap().value;
        let mr = kind.apply(&r).unwrap();
        for i in 0..CELLS {
            prop_assert!(r.values()[i] >= k.values()[i].abs());
            prop_assert!(mr.values()[i] <= alpha * norm_m * r.values()[i] * (1.0 + 1e-6));
        }
        prop_assert!(x.norm(&r).unwrap() <= alpha / (alpha - 1.0) * x.norm(&k).unwrap() * (1.0 + 1e-6));
    }

    #[test]
    fn every_space_is_a_homogeneous_subadditive_lattice(a in signed(), b in signed(), c in -3.0f64..3.0) {
        let g = grid();
        let (f, h) = (func(a), func(b));
        for spec in catalogue() {
            let x = spec.build(&g).unwrap();
            let nf = x.norm(&f).unwrap();
            let nh = x.norm(&h).unwrap();
            let tol = 1e-6;
            prop_assert!(nf > 0.0, "{}", spec.tag());
            prop_assert!(close(x.norm(&f.scale(c)).unwrap(), c.abs() * nf, tol), "{}", spec.tag());
            prop_assert!(x.norm(&f.add(&h)).unwrap() <= (nf + nh) * (1.0 + tol), "{}", spec.tag());
            prop_assert!(close(x.norm(&f.abs()).unwrap(), nf, 1e-12), "{}", spec.tag());
            let smaller = f.zip_with(&h, |u, v| if u.abs() < v.abs() { u } else { v });
            prop_assert!(x.norm(&smaller).unwrap() <= nf.max(nh) * (1.0 + tol), "{}", spec.tag());
        }
    }

    #[test]
    fn collapse_identities(a in signed(), p in 1.0f64..4.0) {
        let f = func(a);
        let lp = f.lp_norm(p);
        let lorentz = ballspace::spaces::norm(&SpaceSpec::Lorentz { p, q: p }, &f).unwrap();
        prop_assert!(close(lorentz, lp, 1e-9));
        let morrey = ballspace::spaces::norm(&SpaceSpec::Morrey { r0: p, r: p }, &f).unwrap();
        prop_assert!(close(morrey, lp, 1e-9));
        let var = ballspace::spaces::norm(&SpaceSpec::VarLebesgue { p: p.into(), weight: WeightSpec::one() }, &f).unwrap();
        prop_assert!(close(var, lp, 1e-6));
        let orlicz = ballspace::spaces::norm(&SpaceSpec::Orlicz { phi: YoungSpec::Power { p } }, &f).unwrap();
        prop_assert!(close(orlicz, lp, 1e-6));
    }

    #[test]
    fn luxemburg_brackets_its_root(a in signed(), p in 1.0f64..5.0, tol in 1e-10f64..1e-4) {
        let f = func(a);
        let h = grid().h();
        let m = |lam: f64| f.values().iter().map(|v| (v.abs() / lam).powf(p)).sum::<f64>() * h;
        let lam = luxemburg(m, 1.0, tol).unwrap();
        prop_assert!(m(lam * (1.0 + 2.0 * tol)) <= 1.0);
        prop_assert!(m(lam * (1.0 - 2.0 * tol)) >= 1.0);
    }

    #[test]
    fn holder_pairing_at_most_one(a in signed(), b in signed(), w in values(0.1, 3.0), p in 1.1f64..5.0) {
        let g = grid();
        let spec = SpaceSpec::WeightedLebesgue { p, weight: WeightSpec::Values { values: w } };
        let x = spec.build(&g).unwrap();
        prop_assert!(pairing_check(&x, &func(a.clone()), &func(b.clone())).unwrap().ratio <= 1.0 + 1e-9);
        let lorentz = SpaceSpec::Lorentz { p, q: 1.5 }.build(&g).unwrap();
        prop_assert!(pairing_check(&lorentz, &func(a), &func(b)).unwrap().ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn convexified_is_definitional(a in signed(), power in 0.2f64..1.0, q in 1.0f64..4.0) {
        let f = func(a);
        let base = SpaceSpec::Lorentz { p: q, q: q + 1.0 };
        let conv = SpaceSpec::Convexified { base: Box::new(base.clone()), power };
        let lhs = ballspace::spaces::norm(&conv, &f).unwrap();
        let rhs = ballspace::spaces::norm(&base, &f.abs().powf(1.0 / power)).unwrap().powf(power);
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn haar_square_function_identity(a in signed()) {
        let f = func(a);
        let g = grid();
        let sys = WaveletSpec { family: Family::Haar, base_level: 0, cascade_level: 12 }.build(1).unwrap();
        let c = analyze(&f, &sys, g.level() as i32).unwrap();
        let v = square_function_v(&c, &g);
        let w = square_function_w(&c, &g, 0.0).unwrap();
        prop_assert!(close(v.zip_with(&w, f64::hypot).lp_norm(2.0), f.lp_norm(2.0), 1e-9));
    }

    #[test]
    fn batteries_are_seed_deterministic_and_prefix_stable(seed in any::<u64>()) {
        let g = grid();
        let b = Battery::new(seed, vec![ProbeSpec::Indicators { count: 3 }, ProbeSpec::Random { count: 2 }]);
        let one = b.generate(&g).unwrap();
        prop_assert_eq!(&one, &b.generate(&g).unwrap());
        let doubled = b.doubled().generate(&g).unwrap();
        prop_assert_eq!(doubled.len(), 2 * one.len());
        for (p, _) in one.iter() {
            prop_assert!(doubled.iter().any(|(q, _)| q == p));
        }
    }
}

fn catalogue() -> Vec<SpaceSpec> {
    let cap = WeightSpec::CappedPower { alpha: 0.3 };
    vec![
        SpaceSpec::WeightedLebesgue { p: 3.0, weight: cap.clone() },
        SpaceSpec::Lorentz { p: 2.0, q: 1.0 },
        SpaceSpec::Herz { alpha: 0.2, p: 2.0, q: 3.0, homogeneous: true },
        SpaceSpec::VarLebesgue { p: ExponentSpec::Expr("2 + 0.5 * sin(x1)".into()), weight: WeightSpec::one() },
        SpaceSpec::VarHerz {
            alpha: 0.1.into(),
            p: 2.0.into(),
            q: 2.0.into(),
            v: WeightSpec::one(),
            w: WeightSpec::one(),
            homogeneous: true,
        },
        SpaceSpec::Orlicz { phi: YoungSpec::PowerLog { p: 2.0 } },
        SpaceSpec::Morrey { r0: 4.0, r: 2.0 },
        SpaceSpec::Bbm { p: 2.0, q: 1.5, r: 2.0, tau: 2.0 },
        SpaceSpec::Convexified { base: Box::new(SpaceSpec::lebesgue(1.5)), power: 0.5 },
    ]
}
