use crate::error::{Error, Result};
use crate::expr::Expr;
use serde::{Deserialize, Serialize};

/// A Young function `Phi` on `[0, inf)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum YoungSpec {
    /// `t^p`
    Power { p: f64 },
    /// `t^p max(1, log(e + t))`
    PowerLog { p: f64 },
    /// An expression in `t`.
    Expr { expr: String },
}

/// Result of the validation pass on the ladder `t in [1e-6, 1e6]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungReport {
    /// `max Phi(2t)/Phi(t)`.
    pub delta2_constant: f64,
    pub delta2: bool,
    /// `min Phi(2t)/(2 Phi(t))`; the nabla_2 condition holds when this exceeds 1.
    pub nabla2_constant: f64,
    pub nabla2: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct YoungFunction {
    spec: YoungSpec,
    expr: Option<Expr>,
    report: YoungReport,
}

const LADDER_POINTS: usize = 241;
/// Doubling ratios above this are treated as unbounded.
const DELTA2_CAP: f64 = 1e3;

impl YoungFunction {
    pub fn new(spec: YoungSpec) -> Result<Self> {
        let expr = match &spec {
            YoungSpec::Power { p } | YoungSpec::PowerLog { p } => {
                if !(*p >= 1.0 && p.is_finite()) {
                    return Err(Error::InvalidParameter(format!("Young power must be >= 1, got {p}")));
                }
                None
            }
            YoungSpec::Expr { expr } => Some(Expr::parse(expr)?),
        };
        let mut y = YoungFunction {
            spec,
            expr,
            report: YoungReport { delta2_constant: 0.0, delta2: false, nabla2_constant: 0.0, nabla2: false },
        };
        y.report = y.validate()?;
        Ok(y)
    }

    pub fn spec(&self) -> &YoungSpec {
        &self.spec
    }

    pub fn report(&self) -> &YoungReport {
        &self.report
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.spec {
            YoungSpec::Power { p } => t.powf(*p),
            YoungSpec::PowerLog { p } => t.powf(*p) * (std::f64::consts::E + t).ln().max(1.0),
            YoungSpec::Expr { .. } => self.expr.as_ref().expect("parsed").eval_scalar(t),
        }
    }

    fn validate(&self) -> Result<YoungReport> {
        let bad = |m: String| Err(Error::InvalidParameter(format!("not a Young function: {m}")));
        if self.eval(0.0) != 0.0 {
            return bad(format!("Phi(0) = {}", self.eval(0.0)));
        }
        let ladder: Vec<f64> =
            (0..LADDER_POINTS).map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / (LADDER_POINTS - 1) as f64)).collect();
        let mut prev = 0.0;
        let mut d2: f64 = 0.0;
        let mut n2 = f64::INFINITY;
        for &t in &ladder {
            let v = self.eval(t);
            if v.is_nan() || v < 0.0 {
                return bad(format!("Phi({t}) = {v}"));
            }
            if v < prev {
                return bad(format!("decreasing near t = {t}"));
            }
            prev = v;
            // midpoint convexity on [t/2, 3t/2] and [0, 2t]
            for (a, b) in [(0.5 * t, 1.5 * t), (0.0, 2.0 * t)] {
                let mid = self.eval(0.5 * (a + b));
                let chord = 0.5 * (self.eval(a) + self.eval(b));
                if chord.is_finite() && mid > chord * (1.0 + 1e-10) + 1e-300 {
                    return bad(format!("not convex on [{a}, {b}]"));
                }
            }
            if v > 0.0 && v.is_finite() {
                let r = self.eval(2.0 * t) / v;
                d2 = d2.max(r);
                n2 = n2.min(r / 2.0);
            }
        }
        Ok(YoungReport {
            delta2_constant: d2,
            delta2: d2 <= DELTA2_CAP,
            nabla2_constant: n2,
            nabla2: n2 > 1.0 + 1e-9,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_flags() {
        let y = YoungFunction::new(YoungSpec::Power { p: 2.0 }).unwrap();
        assert!(y.report().delta2 && y.report().nabla2);
        let lin = YoungFunction::new(YoungSpec::Power { p: 1.0 }).unwrap();
        assert!(!lin.report().nabla2);
        let pl = YoungFunction::new(YoungSpec::PowerLog { p: 2.0 }).unwrap();
        assert!(pl.report().delta2 && pl.report().nabla2);
    }

    #[test]
    fn validation_rejects_non_young() {
        assert!(YoungFunction::new(YoungSpec::Expr { expr: "t + 1".into() }).is_err());
        assert!(YoungFunction::new(YoungSpec::Expr { expr: "sqrt(t)".into() }).is_err());
        assert!(YoungFunction::new(YoungSpec::Expr { expr: "-t".into() }).is_err());
        let e = YoungFunction::new(YoungSpec::Expr { expr: "exp(t) - 1".into() }).unwrap();
        assert!(!e.report().delta2);
    }
}
