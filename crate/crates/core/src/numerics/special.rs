use libm::erfc;

use crate::error::{Error, Result};

/// `ln √(2π)`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Standard normal density φ(z).
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

/// Upper-tail probability of the standard normal, `Q(z) = ∫_z^∞ φ`.
///
/// Evaluated as `½ erfc(z/√2)`, which keeps full relative precision deep into
/// the upper tail where `1 − Φ(z)` would cancel.
pub fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Closed-form lower bound `φ(z)(1/z − 1/z³)` on `Q(z)`.
///
/// Only meaningful for `z > 1`; at or below 1 the expression is non-positive.
pub fn gaussian_tail_lower(z: f64) -> Result<f64> {
    if !(z > 1.0) || !z.is_finite() {
        return Err(Error::Domain {
            name: "gaussian_tail_lower",
            requirement: "1 < z < ∞",
            value: z,
        });
    }
    let z3 = z * z * z;
    Ok(std_normal_pdf(z) * (1.0 / z - 1.0 / z3))
}

/// `ln Σ exp(xᵢ)` with the max-shift. Returns −∞ for an empty input or when
/// every term is −∞.
pub fn log_sum_exp<I>(terms: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let iter = terms.into_iter();
    let max = iter.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = iter.map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// `ln(1 + eˣ)` without overflow for large `x` or loss of precision for very
/// negative `x`.
pub fn ln1p_exp(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}
