//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol·|value|)` or the subdivision budget is
//! spent. Infinite endpoints are mapped onto finite ones by a rational change
//! of variables, so tails are integrated rather than truncated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_593_751,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive (abs_tol={}, rel_tol={})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Same relative tolerance, with the absolute tolerance tightened to
    /// `rel_tol·scale` when that is smaller. Used to resolve integrals whose
    /// value sits far below the configured absolute tolerance.
    pub fn scaled_to(&self, scale: f64) -> Self {
        let target = self.rel_tol * scale.abs();
        let mut out = *self;
        if target > 0.0 && target < self.abs_tol {
            out.abs_tol = target.max(f64::MIN_POSITIVE);
        }
        out
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    fn into_error(self) -> Error {
        Error::NonConvergence {
            value: self.value,
            abs_error: self.abs_error_estimate,
            evaluations: self.evaluations,
        }
    }
}

/// How a segment in the integration variable `t` maps back to `x`.
#[derive(Debug, Clone, Copy)]
enum Segment {
    Finite,
    /// `[a, ∞)`: `x = a + t/(1 − t)`, `t ∈ [0, 1)`.
    UpperTail(f64),
    /// `(−∞, b]`: `x = b − (1 − t)/t`, `t ∈ (0, 1]`.
    LowerTail(f64),
    /// `(−∞, ∞)`: `x = t/(1 − t²)`, `t ∈ (−1, 1)`.
    Whole,
}

impl Segment {
    #[inline]
    fn eval<F: Fn(f64) -> f64>(self, f: &F, t: f64) -> f64 {
        match self {
            Segment::Finite => f(t),
            Segment::UpperTail(a) => {
                let s = 1.0 - t;
                f(a + t / s) / (s * s)
            }
            Segment::LowerTail(b) => f(b - (1.0 - t) / t) / (t * t),
            Segment::Whole => {
                let s = 1.0 - t * t;
                f(t / s) * (1.0 + t * t) / (s * s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    seg: Segment,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod rule with the QUADPACK error heuristic.
fn kronrod21<F: Fn(f64) -> f64>(f: &F, seg: Segment, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = seg.eval(f, center);

    let mut res_g = 0.0;
    let mut res_k = f_center * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    #[allow(clippy::needless_range_loop)]
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = seg.eval(f, center - dx);
        let f2 = seg.eval(f, center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = seg.eval(f, center - dx);
        let f2 = seg.eval(f, center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

const EVALS_PER_RULE: usize = 21;

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    initial: &[(Segment, f64, f64)],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    let mut heap = BinaryHeap::with_capacity(initial.len() + 2 * cfg.max_subdivisions);
    let mut evaluations = 0;
    for &(seg, lo, hi) in initial {
        let (value, error) = kronrod21(f, seg, lo, hi);
        evaluations += EVALS_PER_RULE;
        heap.push(Piece {
            seg,
            lo,
            hi,
            value,
            error,
        });
    }

    let totals = |heap: &BinaryHeap<Piece>| {
        heap.iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };

    let mut subdivisions = 0;
    loop {
        let (value, error) = totals(&heap);
        let result = QuadratureResult {
            value,
            abs_error_estimate: error,
            evaluations,
        };
        if error <= cfg.tolerance_for(value) {
            return Ok(result);
        }
        if subdivisions >= cfg.max_subdivisions || !value.is_finite() {
            return Err(result.into_error());
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // interval is at the resolution limit of f64
            heap.push(worst);
            return Err(result.into_error());
        }
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (value, error) = kronrod21(f, worst.seg, lo, hi);
            evaluations += EVALS_PER_RULE;
            heap.push(Piece {
                seg: worst.seg,
                lo,
                hi,
                value,
                error,
            });
        }
        subdivisions += 1;
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_nan() || b.is_nan() || !(a < b) {
        return Err(Error::InvalidInterval { a, b });
    }
    Ok(())
}

fn segment_for(a: f64, b: f64) -> (Segment, f64, f64) {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => (Segment::Finite, a, b),
        (true, false) => (Segment::UpperTail(a), 0.0, 1.0),
        (false, true) => (Segment::LowerTail(b), 0.0, 1.0),
        (false, false) => (Segment::Whole, -1.0, 1.0),
    }
}

/// Integrates `f` over `[a, b]`; either endpoint may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_interval(a, b)?;
    let (seg, lo, hi) = segment_for(a, b);
    if let Segment::Whole = seg {
        // split at the origin so both halves start with their own rule
        return adaptive(&f, &[(seg, -1.0, 0.0), (seg, 0.0, 1.0)], cfg);
    }
    adaptive(&f, &[(seg, lo, hi)], cfg)
}

/// Integrates `f` over `[points[0], points[last]]` with the interior points as
/// initial subdivision boundaries. The first and last points may be infinite.
///
/// Points must be strictly increasing. Use this when the integrand has kinks
/// or narrow features at known locations.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(
            "at least two breakpoints are required".into(),
        ));
    }
    let mut pieces = Vec::with_capacity(points.len() - 1);
    for (i, w) in points.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        check_interval(a, b)?;
        let interior = i > 0 && i + 2 < points.len();
        if interior && !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidInterval { a, b });
        }
        pieces.push(segment_for(a, b));
    }
    adaptive(&f, &pieces, cfg)
}

/// Integrates a non-negative integrand to relative accuracy even when its
/// value is far below `cfg.abs_tol`: a first pass sizes the result, and a
/// second pass reruns with the absolute tolerance scaled down to match.
pub fn integrate_relative<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let first = integrate_with_breakpoints(&f, points, cfg)?;
    let refined = cfg.scaled_to(first.value);
    if refined.abs_tol < cfg.abs_tol {
        let mut second = integrate_with_breakpoints(&f, points, &refined)?;
        second.evaluations += first.evaluations;
        return Ok(second);
    }
    Ok(first)
}
