use ballspace_web::{maximal_profile_native, rubio_native, square_functions_native};

#[test]
fn maximal_of_indicator_dominates_and_is_one_inside() {
    let m = maximal_profile_native("ind(x, -1, 1)", 7, false).unwrap();
    assert_eq!(m.x.len(), 1024);
    for ((x, f), mf) in m.x.iter().zip(&m.f).zip(&m.mf) {
        assert!(mf + 1e-12 >= *f);
        if x.abs() < 1.0 {
            assert!((mf - 1.0).abs() < 1e-12);
        }
    }
    // centered at a point of [-1, 1] the ratio never exceeds 1
    assert!((m.sup_ratio - 1.0).abs() < 1e-12);
}

#[test]
fn haar_square_functions_keep_l2_norm() {
    let s = square_functions_native("ind(x, -1, 0.5) + 0.25 * ind(x, 1, 3)", 8, "haar").unwrap();
    assert!((s.norm_quadratic - s.norm_f).abs() <= 1e-9 * s.norm_f);
    assert!(s.v.iter().all(|v| *v >= 0.0) && s.w.iter().all(|w| *w >= 0.0));
}

#[test]
fn rubio_majorant_contract() {
    let alpha = 4.0;
    let r = rubio_native("exp(-x^2)", 7, 2.0, alpha).unwrap();
    for ((k, rv), mr) in r.k.iter().zip(&r.r).zip(&r.mr) {
        assert!(rv >= k);
        assert!(*mr <= alpha * r.norm_m * rv * (1.0 + 1e-6));
    }
    assert!(r.norm_r <= alpha / (alpha - 1.0) * r.norm_k * (1.0 + 1e-6));
}

#[test]
fn bad_input_is_an_error_message() {
    assert!(maximal_profile_native("ind(x,", 6, false).is_err());
    assert!(square_functions_native("x", 6, "db9").is_err());
    assert!(rubio_native("x", 20, 2.0, 4.0).is_err());
}
