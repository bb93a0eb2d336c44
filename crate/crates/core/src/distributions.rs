//! Marginal laws `F`, kernels `h`, and the transformed quantile `H = h ∘ F⁻¹`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Evaluates a real function. Implemented for kernels, transformed quantiles
/// and plain closures so that the L-statistic routines accept any of them.
pub trait RealFn {
    fn eval(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> RealFn for F {
    #[inline]
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

fn zero() -> f64 {
    0.0
}

fn one() -> f64 {
    1.0
}

/// Built-in catalog of marginal distribution functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum DistributionModel {
    Uniform {
        #[serde(default = "zero")]
        lower: f64,
        #[serde(default = "one")]
        upper: f64,
    },
    Exponential {
        #[serde(default = "one")]
        rate: f64,
    },
    #[serde(alias = "standard_normal")]
    Normal {
        #[serde(default = "zero")]
        mean: f64,
        #[serde(default = "one")]
        sd: f64,
    },
    /// `P(X = low) = p_low`, `P(X = high) = 1 - p_low`.
    TwoPoint { low: f64, high: f64, p_low: f64 },
}

impl DistributionModel {
    pub fn standard_uniform() -> Self {
        DistributionModel::Uniform {
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn exponential(rate: f64) -> Self {
        DistributionModel::Exponential { rate }
    }

    pub fn standard_normal() -> Self {
        DistributionModel::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn two_point(low: f64, high: f64, p_low: f64) -> Self {
        DistributionModel::TwoPoint { low, high, p_low }
    }

    pub fn id(&self) -> &'static str {
        match self {
            DistributionModel::Uniform { .. } => "uniform",
            DistributionModel::Exponential { .. } => "exponential",
            DistributionModel::Normal { .. } => "normal",
            DistributionModel::TwoPoint { .. } => "two_point",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DistributionModel::Uniform { lower, upper } => {
                lower.is_finite() && upper.is_finite() && lower < upper
            }
            DistributionModel::Exponential { rate } => rate.is_finite() && rate > 0.0,
            DistributionModel::Normal { mean, sd } => {
                mean.is_finite() && sd.is_finite() && sd > 0.0
            }
            DistributionModel::TwoPoint { low, high, p_low } => {
                low.is_finite() && high.is_finite() && low < high && p_low > 0.0 && p_low < 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid parameters for {self:?}")))
        }
    }

    /// `(lower, upper)` endpoints of the support, possibly infinite.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            DistributionModel::Uniform { lower, upper } => (lower, upper),
            DistributionModel::Exponential { .. } => (0.0, f64::INFINITY),
            DistributionModel::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            DistributionModel::TwoPoint { low, high, .. } => (low, high),
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, DistributionModel::TwoPoint { .. })
    }

    /// Whether `F⁻¹` is finite and continuous on all of `[0, 1]`.
    pub fn quantile_continuous_on_closed_unit(&self) -> bool {
        matches!(self, DistributionModel::Uniform { .. })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionModel::Uniform { lower, upper } => {
                ((x - lower) / (upper - lower)).clamp(0.0, 1.0)
            }
            DistributionModel::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DistributionModel::Normal { mean, sd } => {
                0.5 * erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
            }
            DistributionModel::TwoPoint { low, high, p_low } => {
                if x < low {
                    0.0
                } else if x < high {
                    p_low
                } else {
                    1.0
                }
            }
        }
    }

    /// Left limit `F(x-)`; differs from [`cdf`](Self::cdf) only at atoms.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match *self {
            DistributionModel::TwoPoint { low, high, p_low } => {
                if x <= low {
                    0.0
                } else if x <= high {
                    p_low
                } else {
                    1.0
                }
            }
            _ => self.cdf(x),
        }
    }

    /// Generalized inverse `inf{x : F(x) ≥ t}`; at `t = 0` the right limit,
    /// i.e. the lower support endpoint.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!("quantile level {t} outside [0, 1]")));
        }
        Ok(self.quantile_unchecked(t))
    }

    /// [`quantile`](Self::quantile) without the range check; `t` must lie in `[0, 1]`.
    #[inline]
    pub fn quantile_unchecked(&self, t: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&t), "t = {t}");
        match *self {
            DistributionModel::Uniform { lower, upper } => lower + t * (upper - lower),
            DistributionModel::Exponential { rate } => {
                if t >= 1.0 {
                    f64::INFINITY
                } else {
                    -(-t).ln_1p() / rate
                }
            }
            DistributionModel::Normal { mean, sd } => mean + sd * standard_normal_quantile(t),
            DistributionModel::TwoPoint { low, high, p_low } => {
                if t <= p_low {
                    low
                } else {
                    high
                }
            }
        }
    }
}

/// Standard normal quantile.
///
/// Acklam's rational approximation (relative error below 1.15e-9) followed by
/// one Halley step against `Φ` computed from `erfc`, which brings the result
/// to near machine precision. Returns ±∞ at the endpoints.
pub fn standard_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (-p).ln_1p()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    // Halley refinement. In the upper tail work with the survival function to
    // avoid cancellation in Φ(x) − p.
    let (e, sign) = if p > 0.5 {
        (0.5 * erfc(x / std::f64::consts::SQRT_2) - (1.0 - p), -1.0)
    } else {
        (0.5 * erfc(-x / std::f64::consts::SQRT_2) - p, 1.0)
    };
    let u = sign * e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    let refined = x - u / (1.0 + 0.5 * x * u);
    if refined.is_finite() {
        refined
    } else {
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Nondecreasing,
    Nonincreasing,
}

/// Built-in kernels `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Kernel {
    Identity,
    Square,
    Cube,
    Abs,
    Exp,
    /// `cos(frequency * x)`
    Cos {
        frequency: f64,
    },
    /// `1{x ≤ threshold}`
    Indicator {
        threshold: f64,
    },
    Constant {
        value: f64,
    },
}

impl Kernel {
    pub fn id(&self) -> &'static str {
        match self {
            Kernel::Identity => "identity",
            Kernel::Square => "square",
            Kernel::Cube => "cube",
            Kernel::Abs => "abs",
            Kernel::Exp => "exp",
            Kernel::Cos { .. } => "cos",
            Kernel::Indicator { .. } => "indicator",
            Kernel::Constant { .. } => "constant",
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, Kernel::Indicator { .. })
    }

    /// Monotonicity of `h` restricted to `[lower, upper]`, if any.
    pub fn monotonicity_on(&self, lower: f64, upper: f64) -> Option<Monotonicity> {
        use Monotonicity::*;
        match *self {
            Kernel::Identity | Kernel::Cube | Kernel::Exp | Kernel::Constant { .. } => {
                Some(Nondecreasing)
            }
            Kernel::Indicator { .. } => Some(Nonincreasing),
            Kernel::Square | Kernel::Abs => {
                if lower >= 0.0 {
                    Some(Nondecreasing)
                } else if upper <= 0.0 {
                    Some(Nonincreasing)
                } else {
                    None
                }
            }
            Kernel::Cos { frequency } => {
                if frequency == 0.0 {
                    return Some(Nondecreasing);
                }
                let (a, b) = {
                    let (x, y) = (lower * frequency, upper * frequency);
                    if x <= y {
                        (x, y)
                    } else {
                        (y, x)
                    }
                };
                if !a.is_finite() || !b.is_finite() {
                    return None;
                }
                let pi = std::f64::consts::PI;
                let half = (a / pi).floor();
                if b <= (half + 1.0) * pi {
                    // cos is decreasing on [2jπ, (2j+1)π] and increasing on the next half period.
                    let decreasing_in_arg = (half as i64).rem_euclid(2) == 0;
                    let decreasing = decreasing_in_arg == (frequency > 0.0);
                    Some(if decreasing {
                        Nonincreasing
                    } else {
                        Nondecreasing
                    })
                } else {
                    None
                }
            }
        }
    }
}

impl RealFn for Kernel {
    #[inline]
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Kernel::Identity => x,
            Kernel::Square => x * x,
            Kernel::Cube => x * x * x,
            Kernel::Abs => x.abs(),
            Kernel::Exp => x.exp(),
            Kernel::Cos { frequency } => (frequency * x).cos(),
            Kernel::Indicator { threshold } => {
                if x <= threshold {
                    1.0
                } else {
                    0.0
                }
            }
            Kernel::Constant { value } => value,
        }
    }
}

/// `H(t) = h(F⁻¹(t))` with the flags the condition checks rely on.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedQuantile {
    kernel: Kernel,
    distribution: DistributionModel,
    continuous: bool,
    monotone: Option<Monotonicity>,
}

impl TransformedQuantile {
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn distribution(&self) -> &DistributionModel {
        &self.distribution
    }

    /// `H` continuous (and finite) on `[0, 1]`, as required by condition (i).
    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone.is_some()
    }

    pub fn monotonicity(&self) -> Option<Monotonicity> {
        self.monotone
    }

    pub fn try_eval(&self, t: f64) -> Result<f64> {
        Ok(self.kernel.eval(self.distribution.quantile(t)?))
    }
}

impl RealFn for TransformedQuantile {
    #[inline]
    fn eval(&self, t: f64) -> f64 {
        self.kernel.eval(self.distribution.quantile_unchecked(t))
    }
}

pub fn compose_h(kernel: &Kernel, distribution: &DistributionModel) -> TransformedQuantile {
    let (lower, upper) = distribution.support();
    let constant = matches!(kernel, Kernel::Constant { .. });
    let continuous =
        constant || (distribution.quantile_continuous_on_closed_unit() && kernel.is_continuous());
    let monotone = if constant {
        Some(Monotonicity::Nondecreasing)
    } else {
        kernel.monotonicity_on(lower, upper)
    };
    TransformedQuantile {
        kernel: kernel.clone(),
        distribution: distribution.clone(),
        continuous,
        monotone,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "value")]
pub enum Moment {
    Finite(f64),
    Diverges,
}

impl Moment {
    pub fn value(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Diverges => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Moment::Finite(_))
    }
}

const TRUNCATION_FIRST: i32 = 10;
const TRUNCATION_LAST: i32 = 40;
const TRUNCATION_WATCH_FROM: i32 = 30;
/// Increment ratio at or above which a still-growing truncation sequence is
/// taken as divergent rather than geometrically converging.
const DIVERGENT_INCREMENT_RATIO: f64 = 0.95;

/// `E|h(X₁)|ᵖ = ∫₀¹ |H(t)|ᵖ dt`.
///
/// Integrates over `(ε, 1 − ε)` for `ε = 2⁻ᵏ`, `k = 10..=40`. If some
/// refinement after `k = 30` adds at most `tol` times the current value, the
/// value at `k = 40` is returned. Otherwise the increments must still be
/// shrinking geometrically (largest ratio over the last refinements below
/// 0.95), in which case the geometric tail is added; if they are not, the
/// moment is declared divergent.
pub fn p_moment<H: RealFn + ?Sized>(h: &H, p: f64, tol: f64) -> Result<Moment> {
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(Error::domain(format!(
            "moment exponent p = {p} must be finite and ≥ 1"
        )));
    }
    let f = |t: f64| h.eval(t).abs().powf(p);
    let quad = Tolerance::new(tol, 0.0);
    let eps0 = 0.5f64.powi(TRUNCATION_FIRST);
    let mut value = quadrature::adaptive_simpson(&f, eps0, 1.0 - eps0, quad);
    if !value.is_finite() {
        return Ok(Moment::Diverges);
    }
    let mut always_growing = true;
    let mut increments = Vec::new();
    for k in (TRUNCATION_FIRST + 1)..=TRUNCATION_LAST {
        let outer = 0.5f64.powi(k - 1);
        let inner = 0.5f64.powi(k);
        let increment = quadrature::adaptive_simpson(&f, inner, outer, quad)
            + quadrature::adaptive_simpson(&f, 1.0 - outer, 1.0 - inner, quad);
        if !increment.is_finite() {
            return Ok(Moment::Diverges);
        }
        value += increment;
        if k > TRUNCATION_WATCH_FROM {
            increments.push(increment);
            if increment <= tol * value {
                always_growing = false;
            }
        }
    }
    if !always_growing {
        return Ok(Moment::Finite(value));
    }
    let ratio = increments
        .windows(2)
        .skip(increments.len().saturating_sub(6))
        .map(|w| w[1] / w[0])
        .fold(0.0f64, f64::max);
    if ratio < DIVERGENT_INCREMENT_RATIO {
        let last = *increments.last().expect("ten refinements watched");
        Ok(Moment::Finite(value + last * ratio / (1.0 - ratio)))
    } else {
        Ok(Moment::Diverges)
    }
}
