use crate::error::{Error, Result};

/// Default relative bracket width for Luxemburg solves.
pub const DEFAULT_TOL: f64 = 1e-8;

const MAX_DOUBLINGS: usize = 1100;

/// `inf { lambda > 0 : m(lambda) <= 1 }` for a nonincreasing modular `m`.
///
/// Starts at `lambda0`, doubles or halves until a bracket `m(lo) > 1 >= m(hi)`
/// is found, then bisects until `hi - lo <= tol * hi` and returns `hi`.
/// Returns `inf` when no bracket exists below the cap and `0` when `m` stays
/// below one all the way down (the zero function).
pub fn luxemburg(modular: impl Fn(f64) -> f64, lambda0: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("Luxemburg tolerance {tol} outside (0, 1)")));
    }
    let mut lambda = if lambda0.is_finite() && lambda0 > 0.0 { lambda0 } else { 1.0 };
    let mut m = modular(lambda);
    if m.is_nan() {
        return Err(Error::NonMonotoneModular(format!("modular is NaN at {lambda}")));
    }
    let (mut lo, mut hi, mut m_lo, mut m_hi);
    if m <= 1.0 {
        if m == 0.0 {
            return Ok(0.0);
        }
        hi = lambda;
        m_hi = m;
        let mut k = 0;
        loop {
            let next = lambda * 0.5;
            let mn = modular(next);
            if mn < m_hi * (1.0 - 1e-12) {
                return Err(non_monotone(next, mn, hi, m_hi));
            }
            if mn > 1.0 {
                lo = next;
                m_lo = mn;
                break;
            }
            lambda = next;
            hi = next;
            m_hi = mn;
            k += 1;
            if k > MAX_DOUBLINGS || next == 0.0 {
                return Ok(0.0);
            }
        }
    } else {
        lo = lambda;
        m_lo = m;
        let mut k = 0;
        loop {
            let next = lambda * 2.0;
            let mn = modular(next);
            if mn > m_lo * (1.0 + 1e-12) && m_lo.is_finite() {
                return Err(non_monotone(lambda, m_lo, next, mn));
            }
            if mn <= 1.0 {
                hi = next;
                m_hi = mn;
                break;
            }
            lambda = next;
            lo = next;
            m_lo = mn;
            k += 1;
            if k > MAX_DOUBLINGS || !next.is_finite() {
                return Ok(f64::INFINITY);
            }
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        m = modular(mid);
        let slack = 1e-12 * m_lo.abs().max(1.0);
        if m > m_lo + slack || m < m_hi - 1e-12 * m_hi.max(1.0) {
            return Err(non_monotone(lo, m_lo, mid, m));
        }
        if m <= 1.0 {
            hi = mid;
            m_hi = m;
        } else {
            lo = mid;
            m_lo = m;
        }
    }
    Ok(hi)
}

fn non_monotone(a: f64, ma: f64, b: f64, mb: f64) -> Error {
    Error::NonMonotoneModular(format!("m({a}) = {ma}, m({b}) = {mb}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_modular() {
        // m(l) = 8 / l^3 -> l = 2
        let l = luxemburg(|l| 8.0 / l.powi(3), 0.1, 1e-12).unwrap();
        assert!((l - 2.0).abs() < 1e-11);
        let l = luxemburg(|l| 8.0 / l.powi(3), 1e5, 1e-12).unwrap();
        assert!((l - 2.0).abs() < 1e-11);
    }

    #[test]
    fn certificate_holds() {
        let m = |l: f64| 0.3 / l.powf(1.7) + 2.0 / l.powi(4);
        let tol = 1e-8;
        let l = luxemburg(m, 1.0, tol).unwrap();
        assert!(m(l * (1.0 + 2.0 * tol)) <= 1.0);
        assert!(m(l * (1.0 - 2.0 * tol)) >= 1.0);
    }

    #[test]
    fn zero_and_infinite() {
        assert_eq!(luxemburg(|_| 0.0, 1.0, 1e-8).unwrap(), 0.0);
        assert_eq!(luxemburg(|_| 5.0, 1.0, 1e-8).unwrap(), f64::INFINITY);
    }

    #[test]
    fn increasing_modular_is_a_contract_violation() {
        let err = luxemburg(|l| l, 2.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NonMonotoneModular(_)));
    }
}
