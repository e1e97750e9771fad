//! Discrete laws on the integer lattice, the continuous base densities, and
//! their convolution (the mixture law of `X + Z`).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::{log_sum_exp, upper_tail, LN_SQRT_2PI};

/// Probabilities may miss 1 by this much and are then renormalized.
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

/// A probability mass function on integer lattice points.
///
/// Support is sorted, distinct, and carries only strictly positive mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteLattice {
    support: Vec<i64>,
    probs: Vec<f64>,
}

impl DiscreteLattice {
    pub fn new(support: Vec<i64>, probs: Vec<f64>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "support has {} entries but probs has {}",
                support.len(),
                probs.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::InvalidDistribution("support is empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidDistribution(format!(
                "every probability must lie in [0, 1], found {p}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities must sum to 1 (within {PROB_SUM_TOLERANCE:e}), they sum to {total}"
            )));
        }

        let mut atoms: Vec<(i64, f64)> = support
            .into_iter()
            .zip(probs)
            .filter(|&(_, p)| p > 0.0)
            .collect();
        atoms.sort_by_key(|&(k, _)| k);
        if let Some(w) = atoms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution(format!(
                "support entries must be distinct, {} appears twice",
                w[0].0
            )));
        }
        let kept: f64 = atoms.iter().map(|&(_, p)| p).sum();
        Ok(Self {
            support: atoms.iter().map(|&(k, _)| k).collect(),
            probs: atoms.iter().map(|&(_, p)| p / kept).collect(),
        })
    }

    pub fn point_mass(k: i64) -> Self {
        Self {
            support: vec![k],
            probs: vec![1.0],
        }
    }

    /// `P(Z = 1) = p`, `P(Z = 0) = 1 − p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![0, 1], vec![1.0 - p, p])
    }

    /// Uniform on `{0, 1, …, n − 1}`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution(
                "uniform_support must be at least 1".into(),
            ));
        }
        let p = 1.0 / n as f64;
        Self::new((0..n as i64).collect(), vec![p; n])
    }

    /// Parses the JSON law format: `{"support": [...], "probs": [...]}`,
    /// `{"bernoulli": p}` or `{"uniform_support": n}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: LatticeSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidDistribution(format!("malformed law JSON: {e}")))?;
        spec.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("lattice serializes")
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (i64, f64)> + Clone + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn min_support(&self) -> i64 {
        self.support[0]
    }

    pub fn max_support(&self) -> i64 {
        self.support[self.support.len() - 1]
    }

    /// Shifts every atom by `offset`.
    pub fn shifted(&self, offset: i64) -> Self {
        Self {
            support: self.support.iter().map(|k| k + offset).collect(),
            probs: self.probs.clone(),
        }
    }

    /// Two atoms of equal mass on adjacent integers.
    pub fn is_fair_adjacent_pair(&self) -> bool {
        self.support.len() == 2
            && self.support[1] - self.support[0] == 1
            && self.probs[0] == self.probs[1]
    }
}

impl<'de> Deserialize<'de> for DiscreteLattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        LatticeSpec::deserialize(d)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum LatticeSpec {
    Explicit { support: Vec<i64>, probs: Vec<f64> },
    Bernoulli { bernoulli: f64 },
    Uniform { uniform_support: usize },
}

impl LatticeSpec {
    fn build(self) -> Result<DiscreteLattice> {
        match self {
            LatticeSpec::Explicit { support, probs } => DiscreteLattice::new(support, probs),
            LatticeSpec::Bernoulli { bernoulli } => DiscreteLattice::bernoulli(bernoulli),
            LatticeSpec::Uniform { uniform_support } => DiscreteLattice::uniform(uniform_support),
        }
    }
}

/// Centred normal density with standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianDensity {
    sigma: f64,
}

impl GaussianDensity {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `ln(σ√(2π))`.
    pub fn ln_normalizer(&self) -> f64 {
        self.sigma.ln() + LN_SQRT_2PI
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let u = x / self.sigma;
        -0.5 * u * u - self.ln_normalizer()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// `∫_z^∞ f`.
    pub fn tail_mass(&self, z: f64) -> f64 {
        upper_tail(z / self.sigma)
    }

    /// `½ ln(2πeσ²)`.
    pub fn entropy(&self) -> f64 {
        0.5 + self.ln_normalizer()
    }
}

/// Uniform density on `(−half_width, half_width)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformDensity {
    half_width: f64,
}

impl UniformDensity {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        Ok(Self { half_width })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x.abs() < self.half_width {
            -(2.0 * self.half_width).ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn entropy(&self) -> f64 {
        (2.0 * self.half_width).ln()
    }
}

/// The continuous part `X` of `X + Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseDensity {
    Gaussian(GaussianDensity),
    Uniform(UniformDensity),
}

impl From<GaussianDensity> for BaseDensity {
    fn from(g: GaussianDensity) -> Self {
        BaseDensity::Gaussian(g)
    }
}

impl From<UniformDensity> for BaseDensity {
    fn from(u: UniformDensity) -> Self {
        BaseDensity::Uniform(u)
    }
}

impl BaseDensity {
    pub fn ln_pdf(&self, x: f64) -> f64 {
        match self {
            BaseDensity::Gaussian(g) => g.ln_pdf(x),
            BaseDensity::Uniform(u) => u.ln_pdf(x),
        }
    }

    /// `ln f(y + d) − ln f(y)` for `y` inside the support of `f`.
    pub fn ln_ratio(&self, y: f64, d: f64) -> f64 {
        match self {
            BaseDensity::Gaussian(g) => {
                let s = g.sigma();
                -d * (2.0 * y + d) / (2.0 * s * s)
            }
            BaseDensity::Uniform(u) => {
                if (y + d).abs() < u.half_width() {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Closed-form differential entropy.
    pub fn entropy(&self) -> f64 {
        match self {
            BaseDensity::Gaussian(g) => g.entropy(),
            BaseDensity::Uniform(u) => u.entropy(),
        }
    }

    /// Half-width of the region outside which the density is negligible
    /// (`40σ`) or zero.
    pub fn effective_radius(&self) -> f64 {
        match self {
            BaseDensity::Gaussian(g) => 40.0 * g.sigma(),
            BaseDensity::Uniform(u) => u.half_width(),
        }
    }

    /// Offsets from a lattice atom at which the density changes character;
    /// used to seed quadrature subdivisions.
    pub fn feature_offsets(&self) -> Vec<f64> {
        match self {
            BaseDensity::Gaussian(g) => {
                let s = g.sigma();
                [-40.0, -8.0, -2.0, 0.0, 2.0, 8.0, 40.0]
                    .iter()
                    .map(|c| c * s)
                    .collect()
            }
            BaseDensity::Uniform(u) => vec![-u.half_width(), u.half_width()],
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            BaseDensity::Gaussian(g) => {
                let n: f64 = rng.sample(StandardNormal);
                g.sigma() * n
            }
            BaseDensity::Uniform(u) => {
                let w = u.half_width();
                // open interval; the endpoints have probability zero anyway
                loop {
                    let x = rng.random_range(-w..w);
                    if x > -w {
                        return x;
                    }
                }
            }
        }
    }

    pub fn as_gaussian(&self) -> Option<&GaussianDensity> {
        match self {
            BaseDensity::Gaussian(g) => Some(g),
            BaseDensity::Uniform(_) => None,
        }
    }
}

/// Law of `X + Z`: `Σₖ pₖ f(x − k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureDensity {
    base: BaseDensity,
    lattice: DiscreteLattice,
    #[serde(skip)]
    ln_probs: Vec<f64>,
}

impl MixtureDensity {
    pub fn new(base: impl Into<BaseDensity>, lattice: DiscreteLattice) -> Self {
        let ln_probs = lattice.probs().iter().map(|p| p.ln()).collect();
        Self {
            base: base.into(),
            lattice,
            ln_probs,
        }
    }

    pub fn base(&self) -> &BaseDensity {
        &self.base
    }

    pub fn lattice(&self) -> &DiscreteLattice {
        &self.lattice
    }

    /// `ln Σₖ pₖ f(x − k)` via log-sum-exp. −∞ only when every component is
    /// exactly zero at `x`.
    pub fn log_density(&self, x: f64) -> f64 {
        let base = &self.base;
        log_sum_exp(
            self.lattice
                .support()
                .iter()
                .zip(&self.ln_probs)
                .map(move |(&k, &lp)| lp + base.ln_pdf(x - k as f64)),
        )
    }

    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    /// Sorted breakpoints spanning the effective support, with extra points
    /// near every atom and at midpoints between neighbouring atoms.
    pub fn breakpoints(&self) -> Vec<f64> {
        let offsets = self.base.feature_offsets();
        let radius = self.base.effective_radius();
        let lo = self.lattice.min_support() as f64 - radius;
        let hi = self.lattice.max_support() as f64 + radius;
        let mut pts: Vec<f64> = Vec::new();
        for &k in self.lattice.support() {
            let k = k as f64;
            pts.extend(offsets.iter().map(|o| k + o));
        }
        for w in self.lattice.support().windows(2) {
            pts.push(0.5 * (w[0] + w[1]) as f64);
        }
        pts.retain(|&p| p >= lo && p <= hi);
        pts.push(lo);
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
        pts
    }

    /// Draws one `x` from the mixture.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut atom = self.lattice.max_support();
        for (k, p) in self.lattice.atoms() {
            acc += p;
            if u < acc {
                atom = k;
                break;
            }
        }
        atom as f64 + self.base.sample(rng)
    }
}
