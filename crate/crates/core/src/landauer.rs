//! Entropy bookkeeping for resetting a one-bit memory.
//!
//! The bit is a particle in one of two wells centred at `−μ` (state 0) and
//! `+μ` (state 1), with Gaussian position noise of width σ in each. Before the
//! reset its position follows the `p₁`-weighted two-Gaussian mixture; after
//! the reset it sits in well 0 alone. The entropy drop is the ideal `H(p₁)`
//! minus the deficit of the mixture, and Landauer's principle ties that drop
//! to the minimum heat released (`k_B T` per nat). Only the entropy side is
//! computed here.

use serde::{Deserialize, Serialize};

use crate::bounds::theorem1_upper_bound;
use crate::distributions::{DiscreteLattice, GaussianDensity, MixtureDensity};
use crate::entropy::{deficit_direct, discrete_entropy, mixture_entropy};
use crate::error::{Error, Result};
use crate::numerics::quadrature::QuadratureConfig;

/// Two-well bit memory: wells at `±mu`, in-well standard deviation `sigma`,
/// and `P(state 1) = p1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitMemoryModel {
    pub mu: f64,
    pub sigma: f64,
    pub p1: f64,
}

impl BitMemoryModel {
    pub fn new(mu: f64, sigma: f64, p1: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive, got {mu}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::InvalidParameter(format!(
                "p1 must lie in [0, 1], got {p1}"
            )));
        }
        Ok(Self { mu, sigma, p1 })
    }
}

/// Unit-lattice form of a [`BitMemoryModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledModel {
    pub lattice: DiscreteLattice,
    pub noise: GaussianDensity,
    /// `ln(2μ)`; add to unit-lattice differential entropies to recover
    /// entropies in position units.
    pub log_jacobian: f64,
}

/// Maps the wells `{−μ, +μ}` to lattice points `{0, 1}` through
/// `x ↦ (x + μ)/(2μ)`.
pub fn rescale_to_unit_lattice(model: &BitMemoryModel) -> Result<RescaledModel> {
    let spacing = 2.0 * model.mu;
    Ok(RescaledModel {
        lattice: DiscreteLattice::new(vec![0, 1], vec![1.0 - model.p1, model.p1])?,
        noise: GaussianDensity::new(model.sigma / spacing)?,
        log_jacobian: spacing.ln(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResetReport {
    pub model: BitMemoryModel,
    /// Entropy of the pre-reset mixture, `H(Z) + h(X) − δ`.
    pub h_before: f64,
    /// The same entropy by direct quadrature of the mixture, as a cross-check.
    pub h_before_quadrature: f64,
    pub h_before_quadrature_error: f64,
    /// Entropy of the single post-reset well.
    pub h_after: f64,
    pub delta_h: f64,
    /// `H(p₁)`, the entropy drop of an ideal reset.
    pub ideal: f64,
    pub deficit_correction: f64,
    pub deficit_error: f64,
    /// Closed-form ceiling on the deficit, when `σ/(2μ) < ½`.
    pub thm1_envelope: Option<f64>,
}

impl ResetReport {
    pub const CSV_HEADER: &'static str =
        "mu,sigma,p1,h_before,h_after,delta_h,ideal,deficit,envelope";

    /// The entropy fields divided by `ln 2`.
    pub fn in_bits(&self) -> Self {
        let b = |x: f64| x / std::f64::consts::LN_2;
        Self {
            h_before: b(self.h_before),
            h_before_quadrature: b(self.h_before_quadrature),
            h_before_quadrature_error: b(self.h_before_quadrature_error),
            h_after: b(self.h_after),
            delta_h: b(self.delta_h),
            ideal: b(self.ideal),
            deficit_correction: b(self.deficit_correction),
            deficit_error: b(self.deficit_error),
            thm1_envelope: self.thm1_envelope.map(b),
            ..*self
        }
    }

    pub fn csv_row(&self) -> String {
        use crate::format::{csv_num, csv_opt};
        [
            csv_num(self.model.mu),
            csv_num(self.model.sigma),
            csv_num(self.model.p1),
            csv_num(self.h_before),
            csv_num(self.h_after),
            csv_num(self.delta_h),
            csv_num(self.ideal),
            csv_num(self.deficit_correction),
            csv_opt(self.thm1_envelope),
        ]
        .join(",")
    }
}

/// Entropy change of resetting the bit to state 0.
///
/// `Δh` is taken as `H(p₁) − δ` with δ from its defining integral: a direct
/// difference of two quadrature entropies cannot resolve deficits near
/// 1e-20, which occur for well-separated wells.
pub fn reset_report(model: &BitMemoryModel, cfg: &QuadratureConfig) -> Result<ResetReport> {
    let r = rescale_to_unit_lattice(model)?;
    let sigma_eff = r.noise.sigma();
    let original_noise = GaussianDensity::new(model.sigma)?;

    let ideal = discrete_entropy(&r.lattice).nats;
    let deficit = deficit_direct(&r.lattice, r.noise, cfg)?;
    let h_after = original_noise.entropy();
    let h_before = ideal + h_after - deficit.nats;
    let direct = mixture_entropy(&MixtureDensity::new(r.noise, r.lattice.clone()), cfg)?;

    Ok(ResetReport {
        model: *model,
        h_before,
        h_before_quadrature: direct.nats + r.log_jacobian,
        h_before_quadrature_error: direct.abs_error,
        h_after,
        delta_h: h_before - h_after,
        ideal,
        deficit_correction: deficit.nats,
        deficit_error: deficit.abs_error,
        thm1_envelope: (sigma_eff < 0.5)
            .then(|| theorem1_upper_bound(sigma_eff))
            .transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn rescale_examples() {
        let r = rescale_to_unit_lattice(&BitMemoryModel::new(0.5, 0.25, 0.5).unwrap()).unwrap();
        assert_eq!(r.lattice.support(), &[0, 1]);
        assert_eq!(r.noise.sigma(), 0.25);
        assert_eq!(r.log_jacobian, 0.0);

        let r = rescale_to_unit_lattice(&BitMemoryModel::new(1.0, 0.2, 0.5).unwrap()).unwrap();
        assert!((r.noise.sigma() - 0.1).abs() < 1e-16);
        assert!((r.log_jacobian - LN_2).abs() < 1e-16);
    }

    #[test]
    fn rescale_round_trip_entropy() {
        // mixture of N(−1, 0.6²) and N(1, 0.6²) integrated in position units
        let model = BitMemoryModel::new(1.0, 0.6, 0.3).unwrap();
        let r = rescale_to_unit_lattice(&model).unwrap();
        let unit =
            mixture_entropy(&MixtureDensity::new(r.noise, r.lattice.clone()), &cfg()).unwrap();
        let (a, b) = (
            GaussianDensity::new(0.6).unwrap(),
            (0.7f64.ln(), 0.3f64.ln()),
        );
        let ln_f = |x: f64| {
            let l0 = b.0 + a.ln_pdf(x + 1.0);
            let l1 = b.1 + a.ln_pdf(x - 1.0);
            let m = l0.max(l1);
            m + ((l0 - m).exp() + (l1 - m).exp()).ln()
        };
        let original = crate::numerics::integrate(
            |x| {
                let l = ln_f(x);
                -l.exp() * l
            },
            -40.0,
            40.0,
            &cfg(),
        )
        .unwrap();
        assert!((original.value - (unit.nats + r.log_jacobian)).abs() < 1e-10);
    }

    #[test]
    fn validation() {
        assert!(BitMemoryModel::new(0.0, 0.1, 0.5).is_err());
        assert!(BitMemoryModel::new(0.5, -0.1, 0.5).is_err());
        assert!(BitMemoryModel::new(0.5, 0.1, 1.5).is_err());
        assert!(BitMemoryModel::new(0.5, 0.1, -0.01).is_err());
    }

    #[test]
    fn well_separated_reset_costs_almost_ln2() {
        let rep = reset_report(&BitMemoryModel::new(0.5, 0.1, 0.5).unwrap(), &cfg()).unwrap();
        assert!(rep.delta_h <= LN_2);
        assert!(rep.delta_h >= LN_2 - 1.79e-5);
        assert!((rep.delta_h - (rep.h_before - rep.h_after)).abs() < 1e-12);
        let env = rep.thm1_envelope.unwrap();
        assert!((LN_2 - rep.delta_h) <= env);
        assert!((rep.h_before - rep.h_before_quadrature).abs() < 1e-9);
    }

    #[test]
    fn already_reset_costs_nothing() {
        let rep = reset_report(&BitMemoryModel::new(0.5, 0.25, 1.0).unwrap(), &cfg()).unwrap();
        assert!(rep.delta_h.abs() < 1e-12);
        assert_eq!(rep.ideal, 0.0);
    }

    #[test]
    fn overlapping_wells_fall_short() {
        let rep = reset_report(&BitMemoryModel::new(0.5, 1.0, 0.5).unwrap(), &cfg()).unwrap();
        assert!(rep.thm1_envelope.is_none());
        assert!(rep.delta_h <= LN_2 - 0.213_861_925_064_822_76);
        assert!(rep.delta_h >= 0.0);
    }

    #[test]
    fn bits_conversion() {
        let rep = reset_report(&BitMemoryModel::new(0.5, 0.1, 0.5).unwrap(), &cfg()).unwrap();
        let bits = rep.in_bits();
        assert!((bits.ideal - 1.0).abs() < 1e-14);
        assert_eq!(bits.model, rep.model);
        assert_eq!(rep.csv_row().split(',').count(), 9);
    }
}
