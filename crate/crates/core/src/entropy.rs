//! Entropies of the discrete part, the continuous part, and their sum, plus
//! the deficit `δ(X, Z) = H(Z) + h(X) − h(X + Z)` computed by two independent
//! routes and a Monte Carlo oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::theorem1_upper_bound;
use crate::distributions::{BaseDensity, DiscreteLattice, GaussianDensity, MixtureDensity};
use crate::error::{Error, Result};
use crate::numerics::quadrature::{
    integrate_relative, integrate_with_breakpoints, QuadratureConfig,
};
use crate::numerics::special::{ln1p_exp, log_sum_exp};

/// Below this σ the deficit is smaller than double precision can resolve
/// through quadrature; the direct route then reports zero with the
/// closed-form upper bound as its error.
pub const SMALL_SIGMA_FLOOR: f64 = 0.02;

const MC_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMethod {
    ClosedForm,
    Quadrature,
    Identity,
    MonteCarlo,
}

/// An entropy in nats with the error attached to how it was obtained
/// (quadrature estimate or Monte Carlo standard error).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub nats: f64,
    pub method: EntropyMethod,
    pub abs_error: f64,
}

impl EntropyValue {
    fn closed_form(nats: f64) -> Self {
        Self {
            nats,
            method: EntropyMethod::ClosedForm,
            abs_error: 0.0,
        }
    }

    pub fn bits(&self) -> f64 {
        self.nats / std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidParameter(format!(
                "Monte Carlo needs at least 2 samples, got {samples}"
            )));
        }
        Ok(Self { samples, seed })
    }
}

/// `H(Z) = −Σ pᵢ ln pᵢ`.
pub fn discrete_entropy(z: &DiscreteLattice) -> EntropyValue {
    let h: f64 = z.probs().iter().map(|&p| -p * p.ln()).sum();
    // a point mass gives -1·ln 1 = -0
    EntropyValue::closed_form(h + 0.0)
}

/// `h(X) = ½ ln(2πeσ²)`.
pub fn gaussian_entropy(g: &GaussianDensity) -> EntropyValue {
    EntropyValue::closed_form(g.entropy())
}

pub fn base_entropy(base: &BaseDensity) -> EntropyValue {
    EntropyValue::closed_form(base.entropy())
}

/// `h(X + Z) = −∫ f ln f` by adaptive quadrature over the atoms' effective
/// support.
pub fn mixture_entropy(m: &MixtureDensity, cfg: &QuadratureConfig) -> Result<EntropyValue> {
    let integrand = |x: f64| {
        let lf = m.log_density(x);
        if lf == f64::NEG_INFINITY {
            return 0.0;
        }
        let f = lf.exp();
        if f == 0.0 {
            0.0
        } else {
            -f * lf
        }
    };
    let r = integrate_with_breakpoints(integrand, &m.breakpoints(), cfg)?;
    Ok(EntropyValue {
        nats: r.value,
        method: EntropyMethod::Quadrature,
        abs_error: r.abs_error_estimate,
    })
}

/// Breakpoints for integrands in the shifted variable `y = x − k`: the
/// effective window of the base plus every half-integer inside it, where the
/// dominant component switches.
fn deficit_breakpoints(base: &BaseDensity, span: i64) -> Vec<f64> {
    let r = base.effective_radius();
    let limit = (2.0 * r).floor().min(2.0 * span as f64 + 2.0) as i64;
    let mut pts: Vec<f64> = (-limit..=limit)
        .map(|h| 0.5 * h as f64)
        .filter(|&p| p > -r && p < r)
        .collect();
    match base {
        BaseDensity::Gaussian(g) => {
            pts.extend(
                [-2.0, 2.0]
                    .map(|c| c * g.sigma())
                    .iter()
                    .filter(|p| p.abs() < r),
            );
        }
        // jumps where a shifted copy of the support starts or ends
        BaseDensity::Uniform(_) => {
            for d in -span..=span {
                pts.extend([-r - d as f64, r - d as f64].iter().filter(|p| p.abs() < r));
            }
        }
    }
    pts.push(-r);
    pts.push(r);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    pts
}

/// The deficit from its defining integral,
/// `Σₖ pₖ ∫ f(y) ln(1 + Σ_{j≠k} pⱼ f(y + k − j) / (pₖ f(y))) dy`.
///
/// The ratio inside the logarithm is carried as a log-difference so that
/// components many orders of magnitude apart never underflow.
pub fn deficit_direct(
    z: &DiscreteLattice,
    base: impl Into<BaseDensity>,
    cfg: &QuadratureConfig,
) -> Result<EntropyValue> {
    let base = base.into();
    if z.len() == 1 {
        return Ok(EntropyValue {
            nats: 0.0,
            method: EntropyMethod::Quadrature,
            abs_error: 0.0,
        });
    }
    if let BaseDensity::Gaussian(g) = base {
        if g.sigma() < SMALL_SIGMA_FLOOR {
            return Ok(EntropyValue {
                nats: 0.0,
                method: EntropyMethod::Quadrature,
                abs_error: theorem1_upper_bound(g.sigma())?,
            });
        }
    }

    let atoms: Vec<(f64, f64)> = z.atoms().map(|(k, p)| (k as f64, p.ln())).collect();
    let integrand = |y: f64| {
        let lf = base.ln_pdf(y);
        let f = lf.exp();
        if f == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (i, &(k, lpk)) in atoms.iter().enumerate() {
            let others = atoms
                .iter()
                .enumerate()
                .filter(move |&(j, _)| j != i)
                .map(move |(_, &(kj, lpj))| lpj + base.ln_ratio(y, k - kj));
            let l = log_sum_exp(others) - lpk;
            acc += lpk.exp() * ln1p_exp(l);
        }
        f * acc
    };

    let span = z.max_support() - z.min_support();
    let pts = deficit_breakpoints(&base, span);
    let r = integrate_relative(integrand, &pts, cfg)?;
    Ok(EntropyValue {
        nats: r.value,
        method: EntropyMethod::Quadrature,
        abs_error: r.abs_error_estimate,
    })
}

/// The deficit as `H(Z) + h(X) − h(X + Z)`, with `h(X + Z)` by quadrature.
pub fn deficit_via_identity(
    z: &DiscreteLattice,
    base: impl Into<BaseDensity>,
    cfg: &QuadratureConfig,
) -> Result<EntropyValue> {
    let base = base.into();
    let h_z = discrete_entropy(z);
    let h_x = base_entropy(&base);
    let mixture = MixtureDensity::new(base, z.clone());
    let h_sum = mixture_entropy(&mixture, cfg)?;
    Ok(EntropyValue {
        nats: h_z.nats + h_x.nats - h_sum.nats,
        method: EntropyMethod::Identity,
        abs_error: h_z.abs_error + h_x.abs_error + h_sum.abs_error,
    })
}

/// Plug-in Monte Carlo estimate `−(1/N) Σ ln f(xᵢ)` at exact samples.
///
/// Samples are drawn in fixed-size chunks; chunk `i` uses stream `i` of a
/// ChaCha8 generator keyed by the seed, and chunk statistics are merged in
/// chunk order, so output depends only on `(samples, seed)`.
pub fn mc_entropy(m: &MixtureDensity, cfg: &McConfig) -> Result<EntropyValue> {
    if cfg.samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "Monte Carlo needs at least 2 samples, got {}",
            cfg.samples
        )));
    }
    let chunks = cfg.samples.div_ceil(MC_CHUNK);
    let partials: Vec<(usize, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = MC_CHUNK.min(cfg.samples - c * MC_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c as u64);
            // Welford within the chunk
            let mut mean = 0.0;
            let mut m2 = 0.0;
            for i in 0..n {
                let x = m.sample(&mut rng);
                let v = -m.log_density(x);
                let d = v - mean;
                mean += d / (i + 1) as f64;
                m2 += d * (v - mean);
            }
            (n, mean, m2)
        })
        .collect();

    let (n, mean, m2) =
        partials
            .into_iter()
            .fold((0usize, 0.0f64, 0.0f64), |(na, ma, sa), (nb, mb, sb)| {
                if na == 0 {
                    return (nb, mb, sb);
                }
                let n = na + nb;
                let d = mb - ma;
                let mean = ma + d * nb as f64 / n as f64;
                let m2 = sa + sb + d * d * (na as f64) * (nb as f64) / n as f64;
                (n, mean, m2)
            });
    let variance = m2 / (n - 1) as f64;
    Ok(EntropyValue {
        nats: mean,
        method: EntropyMethod::MonteCarlo,
        abs_error: (variance / n as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::UniformDensity;

    fn gauss(s: f64) -> GaussianDensity {
        GaussianDensity::new(s).unwrap()
    }

    fn fair() -> DiscreteLattice {
        DiscreteLattice::bernoulli(0.5).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn discrete_entropy_values() {
        assert!((discrete_entropy(&fair()).nats - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(discrete_entropy(&DiscreteLattice::point_mass(3)).nats, 0.0);
        let u4 = DiscreteLattice::uniform(4).unwrap();
        assert!((discrete_entropy(&u4).nats - 4f64.ln()).abs() < 1e-15);
        assert_eq!(discrete_entropy(&u4).method, EntropyMethod::ClosedForm);
    }

    #[test]
    fn gaussian_entropy_values() {
        assert!((gaussian_entropy(&gauss(1.0)).nats - 1.418_938_533_204_672_7).abs() < 1e-15);
        let unit = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E).sqrt();
        assert!(gaussian_entropy(&gauss(unit)).nats.abs() < 1e-15);
        let q = gaussian_entropy(&gauss(0.25)).nats;
        assert!((q - (1.418_938_533_204_672_7 + 0.25f64.ln())).abs() < 1e-15);
        assert!((q - 0.032_644_172_084_782).abs() < 1e-12);
    }

    #[test]
    fn gaussian_entropy_by_quadrature() {
        let m = MixtureDensity::new(gauss(0.25), DiscreteLattice::point_mass(0));
        let h = mixture_entropy(&m, &cfg()).unwrap();
        assert!((h.nats - gaussian_entropy(&gauss(0.25)).nats).abs() < 1e-10);
        assert_eq!(h.method, EntropyMethod::Quadrature);
    }

    #[test]
    fn uniform_equality_case_has_zero_entropy() {
        let m = MixtureDensity::new(UniformDensity::new(0.25).unwrap(), fair());
        let h = mixture_entropy(&m, &cfg()).unwrap();
        assert!(h.nats.abs() < 1e-12, "{h:?}");
        let d = deficit_direct(&fair(), UniformDensity::new(0.25).unwrap(), &cfg()).unwrap();
        assert!(d.nats.abs() < 1e-12);
        let d = deficit_via_identity(&fair(), UniformDensity::new(0.5).unwrap(), &cfg()).unwrap();
        assert!(d.nats.abs() < 1e-12);
    }

    #[test]
    fn uniform_overlap_gives_positive_deficit() {
        let u = UniformDensity::new(0.75).unwrap();
        let a = deficit_direct(&fair(), u, &cfg()).unwrap();
        let b = deficit_via_identity(&fair(), u, &cfg()).unwrap();
        assert!(a.nats > 0.1);
        assert!((a.nats - b.nats).abs() < 1e-9);
    }

    #[test]
    fn point_mass_deficit_is_zero() {
        for s in [0.05, 0.25, 1.0] {
            let z = DiscreteLattice::point_mass(2);
            assert_eq!(deficit_direct(&z, gauss(s), &cfg()).unwrap().nats, 0.0);
            assert!(
                deficit_via_identity(&z, gauss(s), &cfg())
                    .unwrap()
                    .nats
                    .abs()
                    < 1e-10
            );
        }
    }

    // reference deficits from an independent 40-digit integration of the
    // fair-Bernoulli closed form
    #[test]
    fn fair_bernoulli_deficit_reference() {
        for (s, want) in [
            (0.1, 8.631_659_608_453_27e-7),
            (0.25, 0.060_426_986_823_078_33),
            (0.45, 0.307_667_952_254_533_5),
            (1.0, 0.581_725_698_375_209_1),
        ] {
            let d = deficit_direct(&fair(), gauss(s), &cfg()).unwrap();
            assert!(((d.nats - want) / want).abs() < 1e-9, "σ={s}: {d:?}");
            let i = deficit_via_identity(&fair(), gauss(s), &cfg()).unwrap();
            assert!((i.nats - want).abs() < 1e-9, "σ={s}: {i:?}");
        }
    }

    #[test]
    fn mixture_entropy_near_identity_value() {
        let h = mixture_entropy(&MixtureDensity::new(gauss(0.1), fair()), &cfg()).unwrap();
        let upper = std::f64::consts::LN_2 + gaussian_entropy(&gauss(0.1)).nats;
        assert!(h.nats <= upper + 1e-12);
        assert!(h.nats >= upper - 1.79e-5);
    }

    #[test]
    fn small_sigma_floor_reports_bound_as_error() {
        let d = deficit_direct(&fair(), gauss(0.015), &cfg()).unwrap();
        assert_eq!(d.nats, 0.0);
        assert!(d.abs_error > 0.0);
        assert_eq!(d.abs_error, theorem1_upper_bound(0.015).unwrap());
    }

    #[test]
    fn translation_invariance() {
        let z = DiscreteLattice::new(vec![0, 1, 3], vec![0.2, 0.5, 0.3]).unwrap();
        for s in [0.1, 0.7] {
            let a = mixture_entropy(&MixtureDensity::new(gauss(s), z.clone()), &cfg()).unwrap();
            let b = mixture_entropy(&MixtureDensity::new(gauss(s), z.shifted(17)), &cfg()).unwrap();
            assert!((a.nats - b.nats).abs() < 1e-10);
        }
    }

    #[test]
    fn mc_is_deterministic_and_validates() {
        let m = MixtureDensity::new(gauss(0.25), fair());
        let c = McConfig::new(100_000, 7).unwrap();
        let a = mc_entropy(&m, &c).unwrap();
        let b = mc_entropy(&m, &c).unwrap();
        assert_eq!(a.nats.to_bits(), b.nats.to_bits());
        assert_eq!(a.abs_error.to_bits(), b.abs_error.to_bits());
        assert_eq!(a.method, EntropyMethod::MonteCarlo);
        assert!(McConfig::new(1, 0).is_err());
        assert!(mc_entropy(
            &m,
            &McConfig {
                samples: 1,
                seed: 0
            }
        )
        .is_err());
    }

    #[test]
    fn mc_point_mass_standard_normal() {
        let m = MixtureDensity::new(gauss(1.0), DiscreteLattice::point_mass(0));
        let e = mc_entropy(&m, &McConfig::new(1_000_000, 11).unwrap()).unwrap();
        assert!(
            (e.nats - 1.418_938_533_204_672_7).abs() <= 3.0 * e.abs_error,
            "{e:?}"
        );
    }

    #[test]
    fn mc_agrees_with_quadrature() {
        let m = MixtureDensity::new(gauss(0.25), fair());
        let q = mixture_entropy(&m, &cfg()).unwrap();
        let e = mc_entropy(&m, &McConfig::new(1_000_000, 2024).unwrap()).unwrap();
        assert!(
            (e.nats - q.nats).abs() <= 3.0 * e.abs_error,
            "{e:?} vs {q:?}"
        );
    }
}
