//! Log-densities used by the prior and the samplers.
//!
//! Every function keeps its normalizing constant. Arguments outside the
//! support give `-inf`.

use std::f64::consts::{LN_2, PI};

use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn normal(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * z * z - sd.ln() - LN_SQRT_2PI
}

/// Gamma density with shape/rate parameterization (mean `shape / rate`).
pub fn gamma(x: f64, shape: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
}

pub fn beta(x: f64, a: f64, b: f64) -> f64 {
    if !(x > 0.0 && x < 1.0) {
        return f64::NEG_INFINITY;
    }
    (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)
}

/// Half-Cauchy(0, scale) on `x >= 0`.
pub fn half_cauchy(x: f64, scale: f64) -> f64 {
    if x < 0.0 {
        return f64::NEG_INFINITY;
    }
    let z = x / scale;
    LN_2 - PI.ln() - scale.ln() - (z * z).ln_1p()
}

/// Inverse-gamma with shape/scale parameterization.
pub fn inverse_gamma(x: f64, shape: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    shape * scale.ln() - ln_gamma(shape) - (shape + 1.0) * x.ln() - scale / x
}
