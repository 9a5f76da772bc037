use super::*;
use crate::grid::GridFunction;
use rand::{Rng, SeedableRng};

fn haar(dim: usize, j: i32) -> WaveletSystem {
    build_system(Family::Haar, dim, j, 8).unwrap()
}

fn db(n: usize, dim: usize) -> WaveletSystem {
    build_system(Family::Daubechies(n), dim, 0, 12).unwrap()
}

fn random(g: Grid, seed: u64) -> GridFunction {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    GridFunction::new(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn bump(g: Grid) -> GridFunction {
    GridFunction::from_fn(g, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 < 1.0 {
            (-1.0 / (1.0 - r2)).exp() * (1.0 + x[0])
        } else {
            0.0
        }
    })
    .unwrap()
}

fn l2sq(f: &GridFunction) -> f64 {
    f.lp_norm(2.0).powi(2)
}

#[test]
fn haar_generators_closed_form() {
    let s = haar(1, 0);
    let per = 1 << 8;
    assert!(s.phi()[..per].iter().all(|&v| v == 1.0) && s.phi()[per] == 0.0);
    assert!(s.psi()[..per / 2].iter().all(|&v| v == 1.0));
    assert!(s.psi()[per / 2..per].iter().all(|&v| v == -1.0));
}

#[test]
fn cascade_invariants() {
    for n in 2..=4 {
        let s = db(n, 1);
        assert_eq!(s.support(), 2 * n - 1);
        assert_eq!(s.phi().len(), s.support() * (1 << 12) + 1);
        assert!(s.refinement_residual() <= 1e-6);
        assert!((s.primitive(Factor::Phi, 100.0) - 1.0).abs() < 1e-8);
        assert!(s.primitive(Factor::Psi, 100.0).abs() < 1e-8);
    }
    assert_eq!(db(2, 1).support(), 3);
}

#[test]
fn db2_shifted_scaling_functions_are_orthogonal() {
    let s = db(2, 1);
    let idx = [BasisIndex { l: 0, j: 0, k: [0, 0] }, BasisIndex { l: 0, j: 0, k: [1, 0] }];
    let g = gram(&s, &idx);
    assert!(g[0][1].abs() < 1e-6, "{}", g[0][1]);
    assert!((g[0][0] - 1.0).abs() < 1e-6);
}

#[test]
fn gram_is_identity() {
    let mut idx = Vec::new();
    for k in -2..=1 {
        idx.push(BasisIndex { l: 0, j: 0, k: [k, 0] });
        idx.push(BasisIndex { l: 1, j: 0, k: [k, 0] });
    }
    for k in -3..=2 {
        idx.push(BasisIndex { l: 1, j: 1, k: [k, 0] });
    }
    for (sys, tol) in [(haar(1, 0), 1e-12), (db(2, 1), 1e-5), (db(3, 1), 1e-5)] {
        let g = gram(&sys, &idx);
        for (a, row) in g.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((v - e).abs() < tol, "{} {a} {b} {v}", sys.family());
            }
        }
    }
    let idx2 = [
        BasisIndex { l: 0, j: 0, k: [0, 1] },
        BasisIndex { l: 1, j: 0, k: [0, 1] },
        BasisIndex { l: 2, j: 0, k: [0, 1] },
        BasisIndex { l: 3, j: 1, k: [1, 2] },
    ];
    let g = gram(&db(2, 2), &idx2);
    for (a, row) in g.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            assert!((v - if a == b { 1.0 } else { 0.0 }).abs() < 1e-5);
        }
    }
}

#[test]
fn haar_single_coefficient_examples() {
    let g = Grid::line(-2.0, 2.0, 6).unwrap();
    let s = haar(1, 0);
    let chi = GridFunction::indicator(g, |x| (0.0..1.0).contains(&x[0]));
    let c = analyze(&chi, &s, 4).unwrap();
    assert_eq!(c.get(BasisIndex { l: 0, j: 0, k: [0, 0] }), Some(1.0));
    assert!((c.sum_of_squares() - 1.0).abs() < 1e-15);
    assert!(c.details().all(|b| b.values.iter().all(|&v| v.abs() < 1e-15)));
    let v = square_function_v(&c, &g);
    assert!(v.values().iter().zip(chi.values()).all(|(a, b)| (a - b).abs() < 1e-15));

    let psi = GridFunction::from_fn(g, |x| if (0.0..0.5).contains(&x[0]) { 1.0 } else if (0.5..1.0).contains(&x[0]) { -1.0 } else { 0.0 })
        .unwrap();
    let c = analyze(&psi, &s, 4).unwrap();
    assert!((c.get(BasisIndex { l: 1, j: 0, k: [0, 0] }).unwrap() - 1.0).abs() < 1e-15);
    assert!((c.sum_of_squares() - 1.0).abs() < 1e-14);
    let w = square_function_w(&c, &g, 0.0).unwrap();
    assert!(w.values().iter().zip(chi.values()).all(|(a, b)| (a - b).abs() < 1e-14));
}

#[test]
fn w_weights_layers_by_two_to_js() {
    let g = Grid::line(-2.0, 2.0, 6).unwrap();
    let s = haar(1, 0);
    // psi_{1,0} = sqrt 2 psi(2x)
    let f = GridFunction::from_fn(g, |x| {
        let t = 2.0 * x[0];
        2f64.sqrt() * if (0.0..0.5).contains(&t) { 1.0 } else if (0.5..1.0).contains(&t) { -1.0 } else { 0.0 }
    })
    .unwrap();
    let c = analyze(&f, &s, 3).unwrap();
    let w0 = square_function_w(&c, &g, 0.0).unwrap();
    let w1 = square_function_w(&c, &g, 1.0).unwrap();
    for (a, b) in w0.values().iter().zip(w1.values()) {
        assert!((b - 2.0 * a).abs() < 1e-13);
    }
    assert!(square_function_w(&c, &g, -1.0).is_err());
}

#[test]
fn zero_function() {
    let g = Grid::line(-2.0, 2.0, 6).unwrap();
    let c = analyze(&GridFunction::zeros(g), &db(2, 1), 4).unwrap();
    assert!(square_function_v(&c, &g).is_zero());
    assert!(square_function_w(&c, &g, 0.5).unwrap().is_zero());
    assert_eq!(c.to_csv(), "l,j,k1,value\n");
}

#[test]
fn square_function_v_matches_direct_sum() {
    let g = Grid::line(-4.0, 4.0, 7).unwrap();
    let s = build_system(Family::Daubechies(2), 1, 1, 12).unwrap();
    let f = random(g, 3);
    let c = analyze(&f, &s, 3).unwrap();
    let v = square_function_v(&c, &g);
    for i in (0..g.len()).step_by(7) {
        let x = g.center(i)[0];
        let direct: f64 = c
            .scaling()
            .entries()
            .map(|(k, val)| {
                let inside = (k[0] as f64) <= 2.0 * x && 2.0 * x < (k[0] + 1) as f64;
                if inside {
                    (val * 2f64.sqrt()).powi(2)
                } else {
                    0.0
                }
            })
            .sum();
        assert!((v.values()[i] - direct.sqrt()).abs() < 1e-13);
    }
}

#[test]
fn parseval_and_square_function_identity() {
    let g = Grid::line(-2.0, 2.0, 8).unwrap();
    let f = random(g, 11);
    let s = haar(1, 0);
    let c = analyze(&f, &s, 8).unwrap();
    assert!((c.sum_of_squares() - l2sq(&f)).abs() < 1e-12 * l2sq(&f));
    let v = square_function_v(&c, &g);
    let w = square_function_w(&c, &g, 0.0).unwrap();
    let sf = v.powf(2.0).add(&w.powf(2.0)).powf(0.5);
    assert!((l2sq(&sf) - l2sq(&f)).abs() < 1e-12 * l2sq(&f));

    // wide enough that every cube Q_{0,k} met by a nonzero coefficient lies in the box
    let g = Grid::line(-8.0, 8.0, 10).unwrap();
    let f = bump(g);
    for n in 2..=4 {
        let s = db(n, 1);
        let c = analyze(&f, &s, s.default_j_max(&g)).unwrap();
        let e = l2sq(&f);
        assert!((c.sum_of_squares() - e).abs() < 1e-4 * e, "db{n}: {} vs {e}", c.sum_of_squares());
        let v = square_function_v(&c, &g);
        let w = square_function_w(&c, &g, 0.0).unwrap();
        let sf = v.powf(2.0).add(&w.powf(2.0));
        assert!((sf.integral() - c.sum_of_squares()).abs() < 1e-12 * e);
    }
}

#[test]
fn parseval_two_dim() {
    let g = Grid::square(-2.0, 2.0, 5).unwrap();
    let f = random(g, 5);
    let c = analyze(&f, &haar(2, 0), 5).unwrap();
    assert!((c.sum_of_squares() - l2sq(&f)).abs() < 1e-12 * l2sq(&f));

    let g = Grid::square(-4.0, 4.0, 7).unwrap();
    let f = bump(g);
    let c = analyze(&f, &db(2, 2), 5).unwrap();
    assert!((c.sum_of_squares() - l2sq(&f)).abs() < 1e-3 * l2sq(&f));
}

#[test]
fn vanishing_moment_on_cells() {
    let g = Grid::line(-4.0, 4.0, 9).unwrap();
    for s in [db(2, 1), db(3, 1), haar(1, 0)] {
        for (j, k) in [(0, -1), (1, 2), (3, -5)] {
            let (_, w) = s.cell_integrals(&g, 0, Factor::Psi, j, k);
            assert!(w.iter().sum::<f64>().abs() < 1e-8);
        }
    }
}

#[test]
fn haar_reconstruction_is_exact() {
    let g = Grid::line(-2.0, 2.0, 6).unwrap();
    let s = haar(1, 0);
    let f = random(g, 2);
    let c = analyze(&f, &s, 6).unwrap();
    let r = partial_sum(&c, &s, &g, 6).unwrap();
    assert!(r.sub(&f).sup() < 1e-10);
    let phi = GridFunction::indicator(g, |x| (0.0..1.0).contains(&x[0]));
    let c = analyze(&phi, &s, 6).unwrap();
    for j in 0..=6 {
        assert!(partial_sum(&c, &s, &g, j).unwrap().sub(&phi).sup() < 1e-6);
    }
    assert!(partial_sum(&c, &s, &g, 7).is_err());
}

#[test]
fn projection_error_decreases() {
    let g = Grid::line(-4.0, 4.0, 9).unwrap();
    let f = random(g, 9).restrict(&crate::grid::Region::interval(-2.0, 2.0));
    for s in [haar(1, 0), db(2, 1)] {
        let c = analyze(&f, &s, 7).unwrap();
        let errs: Vec<f64> = (0..=7).map(|j| partial_sum(&c, &s, &g, j).unwrap().sub(&f).lp_norm(2.0)).collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)), "{errs:?}");
    }
}

#[test]
fn dilation_covariance_haar() {
    let g = Grid::line(-2.0, 2.0, 6).unwrap();
    let f = random(g, 4);
    // f(2x) on [-1, 1] at level 7 has the same cell values
    let g2 = Grid::line(-1.0, 1.0, 7).unwrap();
    let f2 = GridFunction::new(g2, f.values().to_vec()).unwrap();
    let c = analyze(&f, &haar(1, 0), 5).unwrap();
    let c2 = analyze(&f2, &haar(1, 1), 6).unwrap();
    let r = 2f64.powf(-0.5);
    for b in &c.blocks {
        for (k, v) in b.entries() {
            let w = c2.get(BasisIndex { l: b.l, j: b.j + 1, k }).unwrap();
            assert!((w - r * v).abs() < 1e-15);
        }
    }
}

#[test]
fn j_max_guard_and_csv() {
    let g = Grid::line(-2.0, 2.0, 6).unwrap();
    assert!(analyze(&GridFunction::zeros(g), &db(2, 1), 5).is_err());
    assert!(analyze(&GridFunction::zeros(g), &haar(1, 0), 6).is_ok());
    let s = haar(2, 0);
    let g2 = Grid::square(0.0, 1.0, 2).unwrap();
    let c = analyze(&GridFunction::constant(g2, 2.0), &s, 1).unwrap();
    assert_eq!(c.to_csv(), "l,j,k1,k2,value\n0,0,0,0,2e0\n");
    assert!(analyze(&GridFunction::zeros(g), &s, 1).is_err());
}

#[test]
fn spec_serde() {
    let s: WaveletSpec = serde_json::from_str(r#"{"family":"db3","base_level":-1}"#).unwrap();
    assert_eq!(s.family, Family::Daubechies(3));
    assert_eq!(s.cascade_level, 12);
    let sys = s.build(1).unwrap();
    assert!((sys.smoothness() - 1.08).abs() < 1e-12);
    assert_eq!(sys.generators(), 1);
}

