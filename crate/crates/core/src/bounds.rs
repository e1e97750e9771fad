//! Upper and lower bounds on the deficit `δ(X, Z)` for Gaussian `X`, and the
//! sandwich report that checks a computed deficit against all of them.
//!
//! The upper-bound chain for `σ < ½` is
//!
//! ```text
//! δ ≤ ∫ f(y) ln(1 + Σ_{m≠0} f(y+m)/f(y)) dy           (numeric, any Z)
//!   ≤ 2Q_σ(½) + [f(½)/2 + 5Q_σ(½)]                     (near / far split)
//!   ≤ e^{−1/(8σ²)}/√(2π) · (1/(2σ) + 7)                (closed form)
//! ```
//!
//! where `Q_σ(½) = ∫_{½}^∞ f`. For the fair coin on adjacent integers the
//! same exponential factor also appears in a lower bound, which shows the
//! closed form cannot be improved beyond polynomial factors in σ.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::distributions::{DiscreteLattice, GaussianDensity};
use crate::entropy::deficit_direct;
use crate::error::{Error, Result};
use crate::numerics::lattice::ln_lattice_sum_excluding_zero;
use crate::numerics::quadrature::{integrate_relative, QuadratureConfig, QuadratureResult};
use crate::numerics::special::{ln1p_exp, upper_tail, LN_SQRT_2PI};

/// Column order of [`BoundReport::csv_row`].
pub const CSV_HEADER: &str = "sigma,delta,delta_err,lemma1,lemma3,lemma4,thm1,bern_lb,bigsig_lb,ok";

fn require_below_half(name: &'static str, sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma < 0.5 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            requirement: "0 < sigma < 1/2",
            value: sigma,
        })
    }
}

/// `e^{−1/(8σ²)} / √(2π)`, the factor shared by the closed-form upper and
/// lower bounds.
pub fn gaussian_prefactor(sigma: f64) -> f64 {
    (-1.0 / (8.0 * sigma * sigma) - LN_SQRT_2PI).exp()
}

/// Numeric value of `∫ f(y) ln(1 + Σ_{m≠0} f(y+m)/f(y)) dy`, an upper bound on
/// `δ(X, Z)` for every integer-valued `Z`.
pub fn lemma1_upper_bound(g: &GaussianDensity, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let integrand = |y: f64| {
        let lf = g.ln_pdf(y);
        let f = lf.exp();
        if f == 0.0 {
            return 0.0;
        }
        let ratio = ln_lattice_sum_excluding_zero(g, y) - lf;
        f * ln1p_exp(ratio)
    };
    // half-integers are where a neighbouring copy overtakes f(y)
    let reach = (40.0 * g.sigma()).min(20.0);
    let n = (2.0 * reach).floor() as i64;
    let mut pts = vec![f64::NEG_INFINITY];
    pts.extend((-n..=n).map(|h| 0.5 * h as f64));
    pts.push(f64::INFINITY);
    integrate_relative(integrand, &pts, cfg)
}

/// `2∫_{½}^∞ f`: bounds the part of the lemma-1 integral over `|y| ≤ ½`.
pub fn lemma3_near_zero_term(g: &GaussianDensity) -> f64 {
    2.0 * g.tail_mass(0.5)
}

/// `f(½)/2 + 5∫_{½}^∞ f`: bounds the part of the lemma-1 integral over
/// `|y| > ½`. Requires `σ < ½`.
pub fn lemma4_far_term(g: &GaussianDensity) -> Result<f64> {
    require_below_half("lemma4_far_term", g.sigma())?;
    Ok(0.5 * g.pdf(0.5) + 5.0 * g.tail_mass(0.5))
}

/// `e^{−1/(8σ²)}/√(2π) · (1/(2σ) + 7)` for `0 < σ < ½`.
pub fn theorem1_upper_bound(sigma: f64) -> Result<f64> {
    require_below_half("theorem1_upper_bound", sigma)?;
    Ok(gaussian_prefactor(sigma) * (0.5 / sigma + 7.0))
}

/// `e^{−1/(8σ²)}/√(2π) · ln 2 · (2σ − 8σ³)`, a lower bound on `δ` when `Z` is
/// a fair coin on adjacent integers. Positive exactly on `0 < σ < ½`.
pub fn bernoulli_lower_bound(sigma: f64) -> Result<f64> {
    require_below_half("bernoulli_lower_bound", sigma)?;
    Ok(gaussian_prefactor(sigma) * LN_2 * (2.0 * sigma - 8.0 * sigma.powi(3)))
}

/// `ln 2 · Q(1/(2σ))`, a lower bound on `δ` for the fair coin that grows with
/// σ toward `ln 2 / 2`.
pub fn big_sigma_lower_bound(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain {
            name: "big_sigma_lower_bound",
            requirement: "sigma > 0",
            value: sigma,
        });
    }
    Ok(LN_2 * upper_tail(0.5 / sigma))
}

/// A computed deficit alongside every bound that applies to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub sigma: f64,
    pub z_descriptor: DiscreteLattice,
    pub delta_quadrature: f64,
    pub delta_error: f64,
    pub lemma1_numeric_ub: f64,
    pub lemma1_error: f64,
    pub lemma3_term: f64,
    pub lemma4_term: Option<f64>,
    pub theorem1_ub: Option<f64>,
    pub bernoulli_lb: Option<f64>,
    pub big_sigma_lb: Option<f64>,
    pub converged: bool,
    pub sandwich_ok: bool,
}

impl BoundReport {
    pub fn lower_bounds(&self) -> impl Iterator<Item = f64> {
        [self.bernoulli_lb, self.big_sigma_lb].into_iter().flatten()
    }

    /// Upper bounds on δ paired with their own numeric uncertainty.
    pub fn upper_bounds(&self) -> impl Iterator<Item = (f64, f64)> {
        let split = self.lemma4_term.map(|l4| (self.lemma3_term + l4, 0.0));
        [
            Some((self.lemma1_numeric_ub, self.lemma1_error)),
            split,
            self.theorem1_ub.map(|t| (t, 0.0)),
        ]
        .into_iter()
        .flatten()
    }

    fn evaluate_sandwich(&self) -> bool {
        let hi = self.delta_quadrature + self.delta_error;
        let lo = self.delta_quadrature - self.delta_error;
        self.lower_bounds().all(|b| b <= hi) && self.upper_bounds().all(|(b, e)| lo <= b + e)
    }

    /// The `ok` column: converged and inside every bound.
    pub fn ok(&self) -> bool {
        self.converged && self.sandwich_ok
    }

    pub fn csv_row(&self) -> String {
        use crate::format::{csv_num, csv_opt};
        [
            csv_num(self.sigma),
            csv_num(self.delta_quadrature),
            csv_num(self.delta_error),
            csv_num(self.lemma1_numeric_ub),
            csv_num(self.lemma3_term),
            csv_opt(self.lemma4_term),
            csv_opt(self.theorem1_ub),
            csv_opt(self.bernoulli_lb),
            csv_opt(self.big_sigma_lb),
            self.ok().to_string(),
        ]
        .join(",")
    }
}

fn value_or_partial(r: Result<(f64, f64)>, converged: &mut bool) -> Result<(f64, f64)> {
    match r {
        Err(Error::NonConvergence {
            value, abs_error, ..
        }) => {
            *converged = false;
            Ok((value, abs_error))
        }
        other => other,
    }
}

/// Like [`sandwich_report`], but a quadrature that fails to converge yields
/// a report with `converged = false` built from the partial estimates instead
/// of an error.
pub fn sandwich_report_flagged(
    z: &DiscreteLattice,
    sigma: f64,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    let g = GaussianDensity::new(sigma)?;
    let mut converged = true;

    let (delta, delta_err) = value_or_partial(
        deficit_direct(z, g, cfg).map(|d| (d.nats, d.abs_error)),
        &mut converged,
    )?;
    let (lemma1, lemma1_err) = value_or_partial(
        lemma1_upper_bound(&g, cfg).map(|r| (r.value, r.abs_error_estimate)),
        &mut converged,
    )?;

    let below_half = sigma < 0.5;
    let fair_pair = z.is_fair_adjacent_pair();
    let mut report = BoundReport {
        sigma,
        z_descriptor: z.clone(),
        delta_quadrature: delta,
        delta_error: delta_err,
        lemma1_numeric_ub: lemma1,
        lemma1_error: lemma1_err,
        lemma3_term: lemma3_near_zero_term(&g),
        lemma4_term: below_half.then(|| lemma4_far_term(&g)).transpose()?,
        theorem1_ub: below_half
            .then(|| theorem1_upper_bound(sigma))
            .transpose()?,
        bernoulli_lb: (below_half && fair_pair)
            .then(|| bernoulli_lower_bound(sigma))
            .transpose()?,
        big_sigma_lb: (!below_half && fair_pair)
            .then(|| big_sigma_lower_bound(sigma))
            .transpose()?,
        converged,
        sandwich_ok: false,
    };
    report.sandwich_ok = report.evaluate_sandwich();
    Ok(report)
}

/// Computes δ for `(Z, σ)` by quadrature together with every applicable
/// bound, and records whether δ lies between them.
pub fn sandwich_report(
    z: &DiscreteLattice,
    sigma: f64,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    let g = GaussianDensity::new(sigma)?;
    // surface non-convergence as an error rather than a flag
    deficit_direct(z, g, cfg)?;
    lemma1_upper_bound(&g, cfg)?;
    sandwich_report_flagged(z, sigma, cfg)
}
