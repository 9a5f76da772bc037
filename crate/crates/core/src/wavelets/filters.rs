use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Wavelet family; serialized as `"haar"` or `"db2"`..`"db4"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Family {
    Haar,
    Daubechies(usize),
}

impl Family {
    /// The `N` in `supp = [0, 2N - 1]`.
    pub fn order(self) -> usize {
        match self {
            Family::Haar => 1,
            Family::Daubechies(n) => n,
        }
    }

    /// Length of the support of the generators.
    pub fn support(self) -> usize {
        2 * self.order() - 1
    }

    /// Holder exponent of the generators (metadata only).
    pub fn smoothness(self) -> f64 {
        match self {
            Family::Haar => 0.0,
            Family::Daubechies(2) => 0.55,
            Family::Daubechies(3) => 1.08,
            Family::Daubechies(_) => 1.62,
        }
    }

    /// Low-pass taps `h_k`, `k = 0..2N`.
    pub fn taps(self) -> Vec<f64> {
        match self {
            Family::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            Family::Daubechies(2) => {
                let s3 = 3f64.sqrt();
                let d = 4.0 * 2f64.sqrt();
                vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
            }
            Family::Daubechies(3) => vec![
                0.332_670_552_950_082_6,
                0.806_891_509_311_092_5,
                0.459_877_502_118_491_5,
                -0.135_011_020_010_254_5,
                -0.085_441_273_882_026_7,
                0.035_226_291_885_709_5,
            ],
            Family::Daubechies(_) => vec![
                0.230_377_813_308_896_5,
                0.714_846_570_552_915_6,
                0.630_880_767_929_858_9,
                -0.027_983_769_416_859_9,
                -0.187_034_811_719_093,
                0.030_841_381_835_560_7,
                0.032_883_011_666_885_2,
                -0.010_597_401_785_069_0,
            ],
        }
    }

    /// High-pass taps `g_k = (-1)^k h_{2N-1-k}`.
    pub fn high_pass(self) -> Vec<f64> {
        let h = self.taps();
        let m = h.len();
        (0..m).map(|k| if k % 2 == 0 { h[m - 1 - k] } else { -h[m - 1 - k] }).collect()
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Family::Haar),
            "db2" => Ok(Family::Daubechies(2)),
            "db3" => Ok(Family::Daubechies(3)),
            "db4" => Ok(Family::Daubechies(4)),
            other => Err(Error::InvalidParameter(format!("unknown wavelet family '{other}' (haar, db2, db3, db4)"))),
        }
    }
}

impl TryFrom<String> for Family {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Family> for String {
    fn from(f: Family) -> String {
        f.to_string()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Haar => write!(f, "haar"),
            Family::Daubechies(n) => write!(f, "db{n}"),
        }
    }
}

/// Largest violation of `sum h = sqrt 2` and `sum h_k h_{k+2m} = delta_{m0}`.
pub fn qmf_defect(h: &[f64]) -> f64 {
    let mut worst = (h.iter().sum::<f64>() - 2f64.sqrt()).abs();
    for m in 0..h.len() / 2 {
        let s: f64 = (0..h.len() - 2 * m).map(|k| h[k] * h[k + 2 * m]).sum();
        let target = if m == 0 { 1.0 } else { 0.0 };
        worst = worst.max((s - target).abs());
    }
    worst
}

pub const CASCADE_MAX_ITERATIONS: usize = 200;
pub const CASCADE_TOL: f64 = 1e-12;

/// Samples of `phi` at `m 2^-level`, `m = 0..=S 2^level`, with the iteration count
/// and the final sup-norm change (the refinement residual).
pub fn cascade(h: &[f64], level: u32) -> Result<(Vec<f64>, usize, f64)> {
    let per = 1usize << level;
    let support = h.len() - 1;
    let len = support * per + 1;
    let s2 = 2f64.sqrt();
    // start from the box function, which is the exact answer for Haar
    let mut phi: Vec<f64> = (0..len).map(|m| if m < per { 1.0 } else { 0.0 }).collect();
    let mut next = vec![0.0; len];
    for it in 1..=CASCADE_MAX_ITERATIONS {
        for (m, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, hk) in h.iter().enumerate() {
                let idx = 2 * m as i64 - (k * per) as i64;
                if idx >= 0 && (idx as usize) < len {
                    acc += hk * phi[idx as usize];
                }
            }
            *slot = s2 * acc;
        }
        let residual = phi.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut phi, &mut next);
        if residual < CASCADE_TOL {
            return Ok((phi, it, residual));
        }
        if it == CASCADE_MAX_ITERATIONS {
            return Err(Error::CascadeDiverged { iterations: it, residual });
        }
    }
    unreachable!()
}

/// Sup-norm defect of `phi = sqrt 2 sum h_k phi(2x - k)` on the samples.
pub fn refinement_residual(h: &[f64], phi: &[f64], level: u32) -> f64 {
    mother(phi, h, level).iter().zip(phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// `psi(x) = sqrt 2 sum g_k phi(2x - k)` on the same sample points.
pub fn mother(phi: &[f64], g: &[f64], level: u32) -> Vec<f64> {
    let per = 1usize << level;
    let s2 = 2f64.sqrt();
    (0..phi.len())
        .map(|m| {
            let mut acc = 0.0;
            for (k, gk) in g.iter().enumerate() {
                let idx = 2 * m as i64 - (k * per) as i64;
                if idx >= 0 && (idx as usize) < phi.len() {
                    acc += gk * phi[idx as usize];
                }
            }
            s2 * acc
        })
        .collect()
}
