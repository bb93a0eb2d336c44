//! Weight arrays `c_{ni}`, their step-function view `cₙ(t)`, the norms `Cₙ(q)`,
//! and the probe-based checker for the two sufficient conditions on a weight
//! scheme paired with `H`:
//!
//! * condition (i): `H` continuous on `[0, 1]` and `supₙ Cₙ(1) < ∞`;
//! * condition (ii): `∫|H|ᵖ < ∞` and `supₙ Cₙ(q) < ∞` for the conjugate `q`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{p_moment, Moment, TransformedQuantile};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

pub const REGULAR_WEIGHT_TOL: f64 = 1e-12;
/// Log-log growth slope between the last two probes above which a norm is
/// flagged as still growing with `n`.
pub const GROWTH_SLOPE_WARNING: f64 = 0.05;

/// Integrable generating functions `J` for regular weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum WeightFunction {
    Constant {
        value: f64,
    },
    /// `intercept + slope * t`; may change sign.
    Linear {
        intercept: f64,
        slope: f64,
    },
    /// `1 / (1 - alpha - beta)` on `[alpha, 1 - beta]`, zero elsewhere
    /// (the trimmed mean).
    Trimmed {
        alpha: f64,
        beta: f64,
    },
}

impl WeightFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            WeightFunction::Constant { value } => value,
            WeightFunction::Linear { intercept, slope } => intercept + slope * t,
            WeightFunction::Trimmed { alpha, beta } => {
                if t >= alpha && t <= 1.0 - beta {
                    1.0 / (1.0 - alpha - beta)
                } else {
                    0.0
                }
            }
        }
    }

    /// `J` on a piece between consecutive breakpoints, taking one-sided limits
    /// at the piece's ends so that jumps do not leak into neighbouring pieces.
    fn eval_on_piece(&self, t: f64, piece_mid: f64) -> f64 {
        match *self {
            WeightFunction::Trimmed { .. } => self.eval(piece_mid),
            _ => self.eval(t),
        }
    }

    /// Points in `(0, 1)` where `J` may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            WeightFunction::Trimmed { alpha, beta } => vec![alpha, 1.0 - beta],
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightFunction::Trimmed { alpha, beta }
                if !(alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0) =>
            {
                Err(Error::config(format!(
                    "trimming fractions ({alpha}, {beta}) must be ≥ 0 with sum < 1"
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum WeightScheme {
    Explicit {
        #[serde(deserialize_with = "rows_by_size")]
        rows: BTreeMap<usize, Vec<f64>>,
    },
    /// `c_{ni} = n ∫_{(i-1)/n}^{i/n} J(t) dt`
    Regular {
        #[serde(rename = "J")]
        j: WeightFunction,
    },
    /// Triangle of height `(k-1)/√n` over `2k` indices, `k = ⌊√n⌋`, repeated
    /// periodically. Its `μₙ` tends to 1/4 for `H(t) = t` without `cₙ(t)`
    /// converging to anything.
    TriangularExample,
}

/// JSON object keys are strings; parse them as sample sizes.
fn rows_by_size<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<BTreeMap<usize, Vec<f64>>, D::Error> {
    BTreeMap::<String, Vec<f64>>::deserialize(d)?
        .into_iter()
        .map(|(k, v)| {
            k.trim().parse::<usize>().map(|n| (n, v)).map_err(|_| {
                serde::de::Error::custom(format!("row key {k:?} is not a sample size"))
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    c: Vec<f64>,
}

impl WeightVector {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::domain("weight row must be non-empty"));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("weight row contains non-finite values"));
        }
        Ok(Self { c })
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    /// `cₙ(t)`: `c_{ni}` on `((i-1)/n, i/n]`, and `c_{n1}` at `t = 0`.
    pub fn step_eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!("t = {t} outside [0, 1]")));
        }
        Ok(self.c[cell_index(t, self.n())])
    }

    pub fn norm(&self, q: Exponent) -> Result<WeightNorms> {
        weight_norm(self, q)
    }
}

/// Zero-based index of the cell `((i-1)/n, i/n]` containing `t`, with `t = 0`
/// mapped to the first cell.
pub(crate) fn cell_index(t: f64, n: usize) -> usize {
    let i = (t * n as f64).ceil() as usize;
    i.clamp(1, n) - 1
}

/// `q ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(q) if !(1.0..f64::INFINITY).contains(&q) => Err(Error::domain(
                format!("exponent q = {q} must lie in [1, ∞]"),
            )),
            e => Ok(e),
        }
    }

    /// Hölder conjugate of a moment exponent `p ≥ 1`.
    pub fn conjugate_of(p: f64) -> Result<Self> {
        if !(1.0..f64::INFINITY).contains(&p) {
            return Err(Error::domain(format!(
                "moment exponent p = {p} must be finite and ≥ 1"
            )));
        }
        if p == 1.0 {
            Ok(Exponent::Infinity)
        } else {
            Ok(Exponent::Finite(p / (p - 1.0)))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinity);
        }
        let q: f64 = s
            .parse()
            .map_err(|_| Error::domain(format!("cannot parse exponent {s:?}")))?;
        if q.is_infinite() {
            return Ok(Exponent::Infinity);
        }
        Exponent::Finite(q).validate()
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(q) => s.serialize_f64(*q),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(q) => Exponent::Finite(q).validate(),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightNorms {
    pub q: Exponent,
    /// `Cₙ(q)`
    pub value: f64,
}

impl WeightNorms {
    /// `Cₙ(q)^{1/q}`, or `Cₙ(∞)` itself.
    pub fn root(&self) -> f64 {
        match self.q {
            Exponent::Finite(q) => self.value.powf(1.0 / q),
            Exponent::Infinity => self.value,
        }
    }
}

pub fn materialize(scheme: &WeightScheme, n: usize) -> Result<WeightVector> {
    materialize_with_tol(scheme, n, REGULAR_WEIGHT_TOL)
}

pub fn materialize_with_tol(scheme: &WeightScheme, n: usize, tol: f64) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::domain("sample size n must be ≥ 1"));
    }
    match scheme {
        WeightScheme::Explicit { rows } => {
            let row = rows.get(&n).ok_or_else(|| {
                Error::config(format!("explicit weight scheme has no row for n = {n}"))
            })?;
            if row.len() != n {
                return Err(Error::config(format!(
                    "explicit row for n = {n} has length {}",
                    row.len()
                )));
            }
            WeightVector::new(row.clone())
        }
        WeightScheme::Regular { j } => {
            j.validate()?;
            let breaks = j.breakpoints();
            let nf = n as f64;
            let mut c = Vec::with_capacity(n);
            for i in 1..=n {
                let a = (i - 1) as f64 / nf;
                let b = i as f64 / nf;
                let mut knots = vec![a];
                knots.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
                knots.push(b);
                let integral: f64 = knots
                    .windows(2)
                    .map(|w| {
                        let mid = 0.5 * (w[0] + w[1]);
                        let f = |t: f64| j.eval_on_piece(t, mid);
                        quadrature::adaptive_simpson(&f, w[0], w[1], Tolerance::new(tol, 0.0))
                    })
                    .sum();
                c.push(integral / (b - a));
            }
            WeightVector::new(c)
        }
        WeightScheme::TriangularExample => Ok(WeightVector {
            c: triangular_row(n),
        }),
    }
}

fn triangular_row(n: usize) -> Vec<f64> {
    let k = (n as u64).isqrt() as usize;
    let sqrt_n = (n as f64).sqrt();
    let period = 2 * k;
    (1..=n)
        .map(|i| {
            let j = (i - 1) % period + 1;
            let steps = if j <= k { j - 1 } else { period - j };
            steps as f64 / sqrt_n
        })
        .collect()
}

pub fn weight_norm(w: &WeightVector, q: Exponent) -> Result<WeightNorms> {
    let q = q.validate()?;
    let value = match q {
        Exponent::Finite(q) => {
            let s: f64 = if q == 1.0 {
                w.c.iter().map(|c| c.abs()).sum()
            } else if q == 2.0 {
                w.c.iter().map(|c| c * c).sum()
            } else {
                w.c.iter().map(|c| c.abs().powf(q)).sum()
            };
            s / w.n() as f64
        }
        Exponent::Infinity => w.c.iter().fold(0.0f64, |m, c| m.max(c.abs())),
    };
    Ok(WeightNorms { q, value })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormProbe {
    pub n: usize,
    pub value: f64,
}

/// Probed values of one weight norm across sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTrend {
    pub q: Exponent,
    pub probes: Vec<NormProbe>,
    pub max: f64,
    /// Log-log slope between the last two probes, when defined.
    pub growth_slope: Option<f64>,
    pub growing: bool,
}

impl NormTrend {
    fn probe(scheme: &WeightScheme, q: Exponent, ns: &[usize]) -> Result<Self> {
        let mut probes = Vec::with_capacity(ns.len());
        for &n in ns {
            let w = materialize(scheme, n)?;
            probes.push(NormProbe {
                n,
                value: weight_norm(&w, q)?.value,
            });
        }
        let max = probes.iter().fold(0.0f64, |m, p| m.max(p.value));
        let growth_slope = match probes.as_slice() {
            [.., a, b] if a.n != b.n && a.value > 0.0 && b.value > 0.0 => {
                Some((b.value / a.value).ln() / (b.n as f64 / a.n as f64).ln())
            }
            _ => None,
        };
        let growing = growth_slope.is_some_and(|s| s > GROWTH_SLOPE_WARNING);
        Ok(Self {
            q,
            probes,
            max,
            growth_slope,
            growing,
        })
    }
}

/// Advisory report on conditions (i) and (ii).
///
/// A finite set of probes cannot establish a supremum over all `n`; the
/// probed values and their trend are reported so that readers can judge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub p: f64,
    /// Hölder conjugate of `p`.
    pub q: Exponent,
    pub h_continuous: bool,
    pub cond_i: bool,
    pub cond_ii: bool,
    pub c1: NormTrend,
    pub cq: NormTrend,
    pub p_moment: Moment,
    pub warnings: Vec<String>,
}

pub fn check_conditions(
    h: &TransformedQuantile,
    scheme: &WeightScheme,
    p: f64,
    n_probe: &[usize],
) -> Result<ConditionReport> {
    if n_probe.is_empty() {
        return Err(Error::domain(
            "condition check needs at least one probe size",
        ));
    }
    let q = Exponent::conjugate_of(p)?;
    let mut probes = n_probe.to_vec();
    probes.sort_unstable();
    probes.dedup();
    let c1 = NormTrend::probe(scheme, Exponent::Finite(1.0), &probes)?;
    let cq = NormTrend::probe(scheme, q, &probes)?;
    let moment = p_moment(h, p, quadrature::DEFAULT_REL_TOL)?;

    let mut warnings = Vec::new();
    if !h.is_continuous() {
        warnings.push("H is not continuous on [0, 1]; condition (i) does not apply".to_string());
    }
    if c1.growing {
        warnings.push(format!(
            "C_n(1) still growing across probes (log-log slope {:.3})",
            c1.growth_slope.unwrap_or(f64::NAN)
        ));
    }
    if cq.growing {
        warnings.push(format!(
            "C_n({q}) still growing across probes (log-log slope {:.3})",
            cq.growth_slope.unwrap_or(f64::NAN)
        ));
    }
    if !moment.is_finite() {
        warnings.push(format!(
            "E|h(X)|^{p} appears infinite; condition (ii) fails"
        ));
    }
    let cond_i = h.is_continuous() && c1.max.is_finite();
    let cond_ii = moment.is_finite() && cq.max.is_finite();
    Ok(ConditionReport {
        p,
        q,
        h_continuous: h.is_continuous(),
        cond_i,
        cond_ii,
        c1,
        cq,
        p_moment: moment,
        warnings,
    })
}
