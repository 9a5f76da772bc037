//! Small numerical helpers shared across modules.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so results are reproducible bit-for-bit.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n`.
pub fn pairwise_sum_by(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    let buf: Vec<f64> = (0..n).map(f).collect();
    pairwise_sum(&buf)
}

/// Conjugate exponent `p' = p / (p - 1)`, with `1' = inf` and `inf' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `l^q` aggregation of non-negative terms; `q = inf` is the max.
pub fn lq_aggregate(terms: &[f64], q: f64) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    if q.is_infinite() {
        return terms.iter().cloned().fold(0.0, f64::max);
    }
    let scale = terms.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let powered: Vec<f64> = terms.iter().map(|t| (t / scale).powf(q)).collect();
    scale * pairwise_sum(&powered).powf(1.0 / q)
}

/// Relative slack `(rhs - lhs) / max(|lhs|, |rhs|)`; zero when both vanish.
pub fn relative_slack(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (rhs - lhs) / scale
    }
}

/// An `f64` that survives formats without infinities: non-finite values are
/// written as the strings `"inf"`, `"-inf"` and `"nan"`, and numbers or those
/// strings are accepted on input.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Float(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Float(v) => Ok(Num(v)),
            Raw::Int(v) => Ok(Num(v as f64)),
            Raw::Text(t) => match t.trim() {
                "inf" | "+inf" | "infinity" => Ok(Num(f64::INFINITY)),
                "-inf" | "-infinity" => Ok(Num(f64::NEG_INFINITY)),
                "nan" => Ok(Num(f64::NAN)),
                other => other.parse().map(Num).map_err(|_| D::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num(v)
    }
}

/// `#[serde(with = "ext_f64")]` for `f64` fields that may be infinite.
pub mod ext_f64 {
    use super::Num;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        Num(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Num::deserialize(d).map(|n| n.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_inputs() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
    }

    #[test]
    fn conjugate_exponents() {
        assert_eq!(conjugate(2.0), 2.0);
        assert_eq!(conjugate(3.0), 1.5);
        assert!(conjugate(1.0).is_infinite());
        assert_eq!(conjugate(f64::INFINITY), 1.0);
    }

    #[test]
    fn lq_of_two_terms() {
        assert!((lq_aggregate(&[3.0, 4.0], 2.0) - 5.0).abs() < 1e-14);
        assert_eq!(lq_aggregate(&[3.0, 4.0], f64::INFINITY), 4.0);
        assert_eq!(lq_aggregate(&[], 2.0), 0.0);
    }

    #[test]
    fn num_round_trips_infinity() {
        let text = serde_json::to_string(&[Num(1.5), Num(f64::INFINITY)]).unwrap();
        assert_eq!(text, r#"[1.5,"inf"]"#);
        let back: Vec<Num> = serde_json::from_str(r#"[1.5,"inf",2]"#).unwrap();
        assert_eq!(back, vec![Num(1.5), Num(f64::INFINITY), Num(2.0)]);
    }
}
