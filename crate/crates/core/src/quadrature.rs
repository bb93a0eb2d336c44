//! Adaptive Simpson quadrature with handling for integrable endpoint blow-ups.

use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;

/// Geometric panels walked toward a singular endpoint before giving up.
const MAX_SINGULAR_PANELS: u32 = 200;
/// Panel-to-panel ratio above which a singular tail counts as non-decaying.
const DIVERGENT_RATIO: f64 = 0.9;

/// Mixed error budget: a panel is accepted once its Richardson error estimate
/// is below `max(abs, rel * |integral|)`, apportioned by panel length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self { rel, abs: 0.0 }
    }

    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::relative(DEFAULT_REL_TOL)
    }
}

/// Adaptive Simpson on a closed interval where `f` is finite everywhere.
///
/// Returns NaN if `f` produces a non-finite value at a node.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    let budget = tol.abs.max(tol.rel * whole.abs());
    simpson_step(f, a, m, b, fa, fm, fb, whole, budget, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let both = left + right;
    let delta = both - whole;
    // `lm == a` etc. means the panel can no longer be bisected in f64.
    if depth == 0 || delta.abs() <= 15.0 * eps || lm <= a || rm >= b || !delta.is_finite() {
        return both + delta / 15.0;
    }
    simpson_step(f, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + simpson_step(f, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

/// Integrates `f` over `[a, b]`, tolerating an integrable blow-up at either
/// endpoint.
///
/// A non-finite endpoint value triggers a walk of geometrically shrinking
/// panels toward that endpoint. The walk stops once the panel contributions
/// decay below the budget; if they stop decaying the integral is reported as
/// divergent.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a > b {
        return Err(Error::domain(format!(
            "integration bounds reversed: [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let left_bad = !f(a).is_finite();
    let right_bad = !f(b).is_finite();
    let value = match (left_bad, right_bad) {
        (false, false) => adaptive_simpson(f, a, b, tol),
        (true, false) | (false, true) => {
            let m = 0.5 * (a + b);
            let (regular, singular) = if left_bad {
                (
                    adaptive_simpson(f, m, b, tol),
                    toward_endpoint(f, m, a, tol)?,
                )
            } else {
                (
                    adaptive_simpson(f, a, m, tol),
                    toward_endpoint(f, m, b, tol)?,
                )
            };
            regular + singular
        }
        (true, true) => {
            let m = 0.5 * (a + b);
            toward_endpoint(f, m, a, tol)? + toward_endpoint(f, m, b, tol)?
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Diverges(format!(
            "non-finite integrand on [{a}, {b}]"
        )))
    }
}

/// Integral from `start` to the singular `end` as a sum of panels whose
/// widths halve toward `end`.
fn toward_endpoint<F: Fn(f64) -> f64>(f: &F, start: f64, end: f64, tol: Tolerance) -> Result<f64> {
    let width = end - start;
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    let mut ratio = 0.0;
    let mut outer = start;
    // Panels narrower than this no longer have distinct Simpson nodes.
    let resolution = 64.0 * f64::EPSILON * end.abs();
    for k in 1..=MAX_SINGULAR_PANELS {
        let inner = end - width * 0.5f64.powi(k as i32);
        if (end - inner).abs() <= resolution || inner == outer {
            // f64 resolution exhausted next to the endpoint.
            if ratio > DIVERGENT_RATIO {
                return Err(Error::Diverges(format!(
                    "integrand not integrable near {end}"
                )));
            }
            return Ok(total);
        }
        let (lo, hi) = if outer < inner {
            (outer, inner)
        } else {
            (inner, outer)
        };
        let panel = adaptive_simpson(f, lo, hi, tol);
        if !panel.is_finite() {
            return Err(Error::Diverges(format!("non-finite panel near {end}")));
        }
        total += panel;
        if let Some(p) = prev {
            ratio = if p == 0.0 { 0.0 } else { (panel / p).abs() };
        }
        prev = Some(panel);
        outer = inner;
        if k >= 3 && ratio < DIVERGENT_RATIO {
            let tail = panel.abs() * ratio / (1.0 - ratio);
            let budget = tol.abs.max(tol.rel * total.abs());
            if tail <= 0.1 * budget || (panel == 0.0 && total == 0.0) {
                return Ok(total + panel * ratio / (1.0 - ratio));
            }
        }
    }
    Err(Error::Diverges(format!(
        "singular tail near {end} does not decay"
    )))
}
