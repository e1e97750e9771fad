//! Sums of a centred Gaussian density over shifted integer lattices,
//! `Σ_{m∈ℤ} f(ε + m)`, truncated once the remaining terms are negligible.

use crate::distributions::GaussianDensity;

/// Terms below this fraction of the running sum end the series.
const SERIES_REL_CUTOFF: f64 = 1e-18;
/// Every direction contributes at least this many terms.
const MIN_TERMS_PER_SIDE: usize = 3;

/// `Σ_{m∈ℤ} f(ε + m)`.
///
/// `ε` is first reduced into `[−½, ½]` by an integer shift, then terms are
/// added in symmetric pairs `f(ε + m) + f(ε − m)` moving outward. Pairing makes
/// the result exactly reflection invariant.
pub fn lattice_sum(g: &GaussianDensity, epsilon: f64) -> f64 {
    let e = epsilon - epsilon.round();
    let mut sum = g.pdf(e);
    let mut m = 1.0;
    let mut k = 0;
    loop {
        k += 1;
        let pair = if e == 0.0 {
            2.0 * g.pdf(m)
        } else {
            g.pdf(e + m) + g.pdf(e - m)
        };
        sum += pair;
        if k >= MIN_TERMS_PER_SIDE && pair < SERIES_REL_CUTOFF * sum {
            break;
        }
        m += 1.0;
    }
    sum
}

/// Scaled series `Σ_{m≠0} exp(q(y+m) − q_ref)` for the exponent
/// `q(x) = −x²/(2σ²)`, returned together with `q_ref`, the largest exponent in
/// the series.
fn series_excluding_zero(sigma: f64, y: f64) -> (f64, f64) {
    let inv_two_var = 0.5 / (sigma * sigma);
    let exponent = |m: f64| {
        let x = y + m;
        -x * x * inv_two_var
    };

    let center = (-y).round();
    let q_ref = [center - 1.0, center, center + 1.0]
        .into_iter()
        .filter(|&m| m != 0.0)
        .map(exponent)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut sum = if center != 0.0 {
        (exponent(center) - q_ref).exp()
    } else {
        0.0
    };
    for dir in [1.0, -1.0] {
        let mut k = 0usize;
        loop {
            k += 1;
            let m = center + dir * k as f64;
            if m == 0.0 {
                continue;
            }
            let term = (exponent(m) - q_ref).exp();
            sum += term;
            if k >= MIN_TERMS_PER_SIDE && term < SERIES_REL_CUTOFF * sum {
                break;
            }
        }
    }
    (q_ref, sum)
}

/// `Σ_{m≠0} f(y + m)`, summed directly rather than as
/// `lattice_sum(y) − f(y)`, which cancels badly when `f(y)` dominates.
pub fn lattice_sum_excluding_zero(g: &GaussianDensity, y: f64) -> f64 {
    let (q_ref, sum) = series_excluding_zero(g.sigma(), y);
    (q_ref - g.ln_normalizer()).exp() * sum
}

/// `ln Σ_{m≠0} f(y + m)`, finite for every finite `y`.
pub fn ln_lattice_sum_excluding_zero(g: &GaussianDensity, y: f64) -> f64 {
    let (q_ref, sum) = series_excluding_zero(g.sigma(), y);
    q_ref + sum.ln() - g.ln_normalizer()
}
