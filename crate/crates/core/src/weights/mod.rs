//! Weights, Muckenhoupt constants, doubling exponents and the Rubio de Francia majorant.

mod ap;
mod doubling;
mod rubio;
mod spec;

pub use ap::{a1_constant, ap_constant, dual_weight, ApEstimate};
pub use doubling::{doubling_exponents, BallFamily, DoublingEstimate, DoublingPair, SubsetSampler};
pub use rubio::{
    composite_extrapolation_weight, default_alpha, estimate_operator_norm, norm_probes, regularize, rubio_majorant,
    CompositeWeight, OperatorNormEstimate, RubioMajorant, RubioOptions,
};
pub use spec::{Weight, WeightSpec};
