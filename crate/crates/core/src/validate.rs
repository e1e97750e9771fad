//! Named numerical checks run by `mixent validate`: the deficit identity,
//! bound sandwiches and orderings, lattice-sum inequality, Monte Carlo
//! agreement, and the equality cases.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    bernoulli_lower_bound, big_sigma_lower_bound, lemma1_upper_bound, lemma3_near_zero_term,
    lemma4_far_term, theorem1_upper_bound,
};
use crate::distributions::{DiscreteLattice, GaussianDensity, MixtureDensity, UniformDensity};
use crate::entropy::{deficit_direct, deficit_via_identity, mc_entropy, mixture_entropy, McConfig};
use crate::error::{Error, Result};
use crate::landauer::{reset_report, BitMemoryModel};
use crate::numerics::lattice::lattice_sum;
use crate::numerics::quadrature::QuadratureConfig;
use crate::numerics::special::{gaussian_tail_lower, upper_tail};

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub quick: bool,
    pub quad: QuadratureConfig,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            quick: false,
            quad: QuadratureConfig::default(),
            mc_samples: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The discrete laws of the test grid: fair and biased coins, uniform on
/// `{−1, 0, 1}`, and a geometric law with ratio ½ truncated to `{0, …, 5}`.
pub fn grid_laws() -> Vec<(&'static str, DiscreteLattice)> {
    let weights: Vec<f64> = (0..6).map(|k| 0.5f64.powi(k)).collect();
    let total: f64 = weights.iter().sum();
    vec![
        ("bernoulli(0.5)", DiscreteLattice::bernoulli(0.5).unwrap()),
        ("bernoulli(0.3)", DiscreteLattice::bernoulli(0.3).unwrap()),
        (
            "uniform{-1,0,1}",
            DiscreteLattice::new(vec![-1, 0, 1], vec![1.0 / 3.0; 3]).unwrap(),
        ),
        (
            "geometric{0..5}",
            DiscreteLattice::new(
                (0..6).collect(),
                weights.iter().map(|w| w / total).collect(),
            )
            .unwrap(),
        ),
    ]
}

pub const GRID_SIGMAS: [f64; 5] = [0.05, 0.1, 0.25, 0.45, 1.0];
pub const SANDWICH_SIGMAS: [f64; 7] = [0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45];

type CheckFn = fn(&ValidateOptions) -> std::result::Result<String, String>;

fn gauss(s: f64) -> Result<GaussianDensity> {
    GaussianDensity::new(s)
}

fn err_str(e: Error) -> String {
    e.to_string()
}

fn grid(opts: &ValidateOptions) -> (Vec<(&'static str, DiscreteLattice)>, Vec<f64>) {
    let laws = grid_laws();
    if opts.quick {
        (laws.into_iter().take(2).collect(), vec![0.1, 0.25, 1.0])
    } else {
        (laws, GRID_SIGMAS.to_vec())
    }
}

fn sandwich_sigmas(opts: &ValidateOptions) -> Vec<f64> {
    if opts.quick {
        vec![0.25, 0.45]
    } else {
        SANDWICH_SIGMAS.to_vec()
    }
}

fn check_identity(opts: &ValidateOptions) -> std::result::Result<String, String> {
    let (laws, sigmas) = grid(opts);
    let mut worst = 0.0f64;
    for (name, z) in &laws {
        for &s in &sigmas {
            let g = gauss(s).map_err(err_str)?;
            let a = deficit_direct(z, g, &opts.quad).map_err(err_str)?;
            let b = deficit_via_identity(z, g, &opts.quad).map_err(err_str)?;
            let gap = (a.nats - b.nats).abs();
            let allowed = a.abs_error + b.abs_error;
            if gap > allowed || gap > 1e-8 {
                return Err(format!(
                    "{name} σ={s}: |{:e} − {:e}| = {gap:e} > min({allowed:e}, 1e-8)",
                    a.nats, b.nats
                ));
            }
            if a.nats < -1e-10 {
                return Err(format!("{name} σ={s}: δ = {:e} < −1e-10", a.nats));
            }
            worst = worst.max(gap);
        }
    }
    Ok(format!("max route gap {worst:.2e}"))
}

fn check_sandwich(opts: &ValidateOptions) -> std::result::Result<String, String> {
    let z = DiscreteLattice::bernoulli(0.5).unwrap();
    for s in sandwich_sigmas(opts) {
        let d = deficit_direct(&z, gauss(s).map_err(err_str)?, &opts.quad).map_err(err_str)?;
        let lo = bernoulli_lower_bound(s).map_err(err_str)?;
        let hi = theorem1_upper_bound(s).map_err(err_str)?;
        if !(lo <= d.nats && d.nats <= hi) {
            return Err(format!("σ={s}: {lo:e} ≤ {:e} ≤ {hi:e} fails", d.nats));
        }
    }
    Ok("bernoulli_lb ≤ δ ≤ theorem1_ub".into())
}

fn check_proof_chain(opts: &ValidateOptions) -> std::result::Result<String, String> {
    let (laws, _) = grid(opts);
    for s in sandwich_sigmas(opts) {
        let g = gauss(s).map_err(err_str)?;
        let l1 = lemma1_upper_bound(&g, &opts.quad).map_err(err_str)?.value;
        let split = lemma3_near_zero_term(&g) + lemma4_far_term(&g).map_err(err_str)?;
        let t1 = theorem1_upper_bound(s).map_err(err_str)?;
        for (name, z) in &laws {
            let d = deficit_direct(z, g, &opts.quad).map_err(err_str)?.nats;
            if l1 - d < -1e-10 {
                return Err(format!("{name} σ={s}: δ {d:e} > lemma1 {l1:e}"));
            }
        }
        if split - l1 < -1e-10 || t1 - split < -1e-10 {
            return Err(format!("σ={s}: chain {l1:e} ≤ {split:e} ≤ {t1:e} fails"));
        }
    }
    Ok("δ ≤ lemma1 ≤ lemma3+lemma4 ≤ theorem1".into())
}

fn check_lattice_sum(opts: &ValidateOptions) -> std::result::Result<String, String> {
    let draws = if opts.quick { 100 } else { 1000 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for i in 1..=10 {
        let s = 0.05 * i as f64;
        let g = gauss(s).map_err(err_str)?;
        for _ in 0..draws {
            let e: f64 = rng.random_range(-5.0..5.0);
            let v = lattice_sum(&g, e);
            if !(v < 1.0 / s) {
                return Err(format!("σ={s} ε={e}: sum {v} ≥ 1/σ"));
            }
            let shifted = lattice_sum(&g, e + 3.0);
            let reflected = lattice_sum(&g, -e);
            if (shifted - v).abs() > 1e-13 || (reflected - v).abs() > 1e-13 {
                return Err(format!("σ={s} ε={e}: shift/reflection differ from {v}"));
            }
        }
    }
    Ok(format!("10 σ × {draws} ε"))
}

fn check_large_sigma(opts: &ValidateOptions) -> std::result::Result<String, String> {
    let z = DiscreteLattice::bernoulli(0.5).unwrap();
    let sigmas: &[f64] = if opts.quick {
        &[1.0]
    } else {
        &[0.5, 1.0, 2.0, 4.0]
    };
    for &s in sigmas {
        let d = deficit_direct(&z, gauss(s).map_err(err_str)?, &opts.quad)
            .map_err(err_str)?
            .nats;
        let lb = big_sigma_lower_bound(s).map_err(err_str)?;
        if d < lb {
            return Err(format!("σ={s}: δ {d:e} < ln2·Q(1/2σ) {lb:e}"));
        }
    }
    let at_one = big_sigma_lower_bound(1.0).map_err(err_str)?;
    let erfc_ref = LN_2 * upper_tail(0.5);
    if (at_one - erfc_ref).abs() > 1e-6 {
        return Err(format!("bound at σ=1 is {at_one}, erfc gives {erfc_ref}"));
    }
    Ok(format!("bound at σ=1: {at_one:.7}"))
}

fn check_rate(_: &ValidateOptions) -> std::result::Result<String, String> {
    for s in [0.1, 0.25, 0.4] {
        let ratio = theorem1_upper_bound(s).map_err(err_str)?
            / bernoulli_lower_bound(s).map_err(err_str)?;
        let algebraic = (0.5 / s + 7.0) / (LN_2 * (2.0 * s - 8.0 * s.powi(3)));
        if ((ratio - algebraic) / algebraic).abs() > 1e-12 {
            return Err(format!("σ={s}: ratio {ratio} vs {algebraic}"));
        }
    }
    Ok("shared e^{-1/(8σ²)} factor".into())
}

fn check_landauer(opts: &ValidateOptions) -> std::result::Result<String, String> {
    for s in [0.05, 0.1, 0.25] {
        let model = BitMemoryModel::new(0.5, s, 0.5).map_err(err_str)?;
        let rep = reset_report(&model, &opts.quad).map_err(err_str)?;
        let env = theorem1_upper_bound(s).map_err(err_str)?;
        let gap = (rep.delta_h - LN_2).abs();
        if gap > env {
            return Err(format!("σ_eff={s}: |Δh − ln2| = {gap:e} > {env:e}"));
        }
    }
    Ok("|Δh − ln 2| ≤ theorem1_ub".into())
}

fn check_equality(opts: &ValidateOptions) -> std::result::Result<String, String> {
    let pm = DiscreteLattice::point_mass(0);
    for s in [0.1, 0.25, 1.0] {
        let d = deficit_direct(&pm, gauss(s).map_err(err_str)?, &opts.quad).map_err(err_str)?;
        if d.nats.abs() > 1e-12 {
            return Err(format!("point mass σ={s}: δ = {:e}", d.nats));
        }
    }
    let fair = DiscreteLattice::bernoulli(0.5).unwrap();
    let u = UniformDensity::new(0.25).map_err(err_str)?;
    let h = mixture_entropy(&MixtureDensity::new(u, fair.clone()), &opts.quad).map_err(err_str)?;
    let d = deficit_direct(&fair, u, &opts.quad).map_err(err_str)?;
    if h.nats.abs() > 1e-12 || d.nats.abs() > 1e-12 {
        return Err(format!("uniform base: h = {:e}, δ = {:e}", h.nats, d.nats));
    }
    Ok("point mass and uniform(¼) give δ = 0".into())
}

fn check_mc(opts: &ValidateOptions) -> std::result::Result<String, String> {
    let (laws, sigmas) = grid(opts);
    let mut worst = 0.0f64;
    for (i, (name, z)) in laws.iter().enumerate() {
        for (j, &s) in sigmas.iter().enumerate() {
            let m = MixtureDensity::new(gauss(s).map_err(err_str)?, z.clone());
            let q = mixture_entropy(&m, &opts.quad).map_err(err_str)?;
            let seed = opts.seed.wrapping_add((i * sigmas.len() + j) as u64);
            let cfg = McConfig::new(opts.mc_samples, seed).map_err(err_str)?;
            let e = mc_entropy(&m, &cfg).map_err(err_str)?;
            let z_score = (e.nats - q.nats).abs() / e.abs_error;
            if z_score > 4.0 {
                return Err(format!(
                    "{name} σ={s}: MC {:.6} vs quadrature {:.6} ({z_score:.1} SE)",
                    e.nats, q.nats
                ));
            }
            worst = worst.max(z_score);
        }
    }
    Ok(format!("N={}, max {worst:.2} SE", opts.mc_samples))
}

fn check_tail(_: &ValidateOptions) -> std::result::Result<String, String> {
    for i in 0..200 {
        let z = 1.01 + (10.0 - 1.01) * i as f64 / 199.0;
        let lo = gaussian_tail_lower(z).map_err(err_str)?;
        let q = upper_tail(z);
        if q - lo < 0.0 {
            return Err(format!("z={z}: {lo:e} > Q(z) = {q:e}"));
        }
    }
    Ok("200 points on [1.01, 10]".into())
}

const CHECKS: [(&str, CheckFn); 10] = [
    ("deficit_identity", check_identity),
    ("theorem1_sandwich", check_sandwich),
    ("proof_chain", check_proof_chain),
    ("lattice_sum_bound", check_lattice_sum),
    ("large_sigma_lower_bound", check_large_sigma),
    ("exponential_rate_match", check_rate),
    ("landauer_reset", check_landauer),
    ("equality_cases", check_equality),
    ("monte_carlo_agreement", check_mc),
    ("gaussian_tail_lower", check_tail),
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|(n, _)| *n)
}

pub fn run_checks(opts: &ValidateOptions) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, f)| match f(opts) {
            Ok(detail) => CheckOutcome {
                name,
                passed: true,
                detail,
            },
            Err(detail) => CheckOutcome {
                name,
                passed: false,
                detail,
            },
        })
        .collect()
}
