//! Order statistics, the empirical quantile `Gₙ⁻¹`, both evaluations of the
//! L-statistic `Lₙ`, its centering `μₙ`, and the discrepancies that control
//! `|Lₙ − μₙ|`.
//!
//! Cells are `((i−1)/n, i/n]` with the first one closed at 0, matching
//! `cₙ(t)`. Per-cell quantities are always accumulated in index order so that
//! results are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::distributions::{p_moment, DistributionModel, RealFn, TransformedQuantile};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::weights::{Exponent, WeightNorms, WeightVector};

pub const DEFAULT_GRID_PER_CELL: usize = 8;

/// A sample together with its ascending rearrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSample {
    original: Vec<f64>,
    sorted: Vec<f64>,
}

impl OrderedSample {
    /// Stable sort; tied values stay adjacent in input order.
    pub fn new(original: Vec<f64>) -> Result<Self> {
        if original.is_empty() {
            return Err(Error::domain("sample must be non-empty"));
        }
        if original.iter().any(|x| x.is_nan()) {
            return Err(Error::domain("sample contains NaN"));
        }
        let mut sorted = original.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { original, sorted })
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn original(&self) -> &[f64] {
        &self.original
    }
}

/// `Gₙ⁻¹(t) = U_{n:i}` on `((i−1)/n, i/n]`, `Gₙ⁻¹(0) = U_{n:1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalQuantile {
    base: OrderedSample,
}

impl EmpiricalQuantile {
    /// Builds from a uniform-scale sample; values must lie in `[0, 1]`.
    pub fn new(uniform_sample: Vec<f64>) -> Result<Self> {
        if uniform_sample.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(Error::domain(
                "empirical quantile needs a uniform-scale sample in [0, 1]",
            ));
        }
        Ok(Self {
            base: OrderedSample::new(uniform_sample)?,
        })
    }

    pub fn from_ordered(base: OrderedSample) -> Result<Self> {
        if base.sorted[0] < 0.0 || base.sorted[base.n() - 1] > 1.0 {
            return Err(Error::domain(
                "empirical quantile needs a uniform-scale sample in [0, 1]",
            ));
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> &OrderedSample {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!("t = {t} outside [0, 1]")));
        }
        Ok(self.base.sorted[crate::weights::cell_index(t, self.n())])
    }

    /// `((i−1)/n, i/n)` for zero-based cell `i − 1`.
    #[inline]
    fn cell(&self, idx: usize) -> (f64, f64) {
        let n = self.n() as f64;
        (idx as f64 / n, (idx + 1) as f64 / n)
    }
}

fn check_len(w: &WeightVector, n: usize) -> Result<()> {
    if w.n() != n {
        return Err(Error::domain(format!(
            "weight row has length {} but sample has {n}",
            w.n()
        )));
    }
    Ok(())
}

/// `Lₙ = n⁻¹ Σ c_{ni} h(X_{n:i})`.
pub fn l_statistic_sum<K: RealFn + ?Sized>(w: &WeightVector, h: &K, sample: &[f64]) -> Result<f64> {
    let ordered = OrderedSample::new(sample.to_vec())?;
    l_statistic_sorted(w, h, &ordered)
}

/// [`l_statistic_sum`] on an already ordered sample.
pub fn l_statistic_sorted<K: RealFn + ?Sized>(
    w: &WeightVector,
    h: &K,
    ordered: &OrderedSample,
) -> Result<f64> {
    check_len(w, ordered.n())?;
    let s: f64 = w
        .as_slice()
        .iter()
        .zip(ordered.sorted())
        .map(|(&c, &x)| c * h.eval(x))
        .sum();
    Ok(s / ordered.n() as f64)
}

/// `Lₙ = ∫₀¹ cₙ(t) H(Gₙ⁻¹(t)) dt`, exact because both factors are constant
/// on every cell.
pub fn l_statistic_integral<H: RealFn + ?Sized>(
    w: &WeightVector,
    h: &H,
    g: &EmpiricalQuantile,
) -> Result<f64> {
    check_len(w, g.n())?;
    let mut total = 0.0;
    for (idx, (&c, &u)) in w.as_slice().iter().zip(g.base.sorted()).enumerate() {
        let (a, b) = g.cell(idx);
        total += c * h.eval(u) * (b - a);
    }
    Ok(total)
}

/// Guards `μₙ` against a non-integrable `H`.
fn ensure_integrable(h: &TransformedQuantile, tol: f64) -> Result<()> {
    let bounded = h.eval(0.0).is_finite() && h.eval(1.0).is_finite();
    if !bounded && !p_moment(h, 1.0, tol)?.is_finite() {
        return Err(Error::Diverges(
            "μₙ undefined: ∫|H| is infinite".to_string(),
        ));
    }
    Ok(())
}

/// `∫ H` over every cell, at relative tolerance `tol` with an absolute floor
/// of `tol` times the cell length.
pub fn cell_h_integrals(h: &TransformedQuantile, n: usize, tol: f64) -> Result<Vec<f64>> {
    ensure_integrable(h, tol)?;
    let nf = n as f64;
    (0..n)
        .map(|idx| {
            let (a, b) = (idx as f64 / nf, (idx + 1) as f64 / nf);
            quadrature::integrate(
                &|t: f64| h.eval(t),
                a,
                b,
                Tolerance::new(tol, tol * (b - a)),
            )
            .map_err(|e| Error::Diverges(format!("μₙ undefined: {e}")))
        })
        .collect()
}

/// `μₙ = ∫₀¹ cₙ(t) H(t) dt = Σᵢ c_{ni} ∫_{cell i} H`.
pub fn mu_n(w: &WeightVector, h: &TransformedQuantile, tol: f64) -> Result<f64> {
    let cells = cell_h_integrals(h, w.n(), tol)?;
    Ok(w.as_slice()
        .iter()
        .zip(&cells)
        .map(|(&c, &v)| if c == 0.0 { 0.0 } else { c * v })
        .sum())
}

/// Exact `sup_x |Fₙ(x) − F(x)|` over the jump points of `Fₙ`, using the left
/// limit `F(x−)` so that atoms of `F` are handled exactly.
pub fn ks_statistic(sample: &[f64], f: &DistributionModel) -> Result<f64> {
    let ordered = OrderedSample::new(sample.to_vec())?;
    Ok(ks_sorted(ordered.sorted(), f))
}

pub(crate) fn ks_sorted(sorted: &[f64], f: &DistributionModel) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (idx, &x) in sorted.iter().enumerate() {
        let lo = idx as f64 / n;
        let hi = (idx + 1) as f64 / n;
        d = d.max(hi - f.cdf(x)).max(f.cdf_left(x) - lo);
    }
    d.max(0.0)
}

/// `sup_t |H(Gₙ⁻¹(t)) − H(t)|`.
///
/// Both endpoints of every cell are paired with that cell's order statistic,
/// so at a jump of `Gₙ⁻¹` both one-sided values count. Exact for monotone `H`
/// (the supremum on each cell sits at an endpoint).
/// Otherwise a lower approximation from `grid_per_cell` equispaced points per
/// cell, endpoints included; refining along `g ↦ 2g − 1` nests the grids, so
/// the value can only grow.
pub fn sup_discrepancy(
    h: &TransformedQuantile,
    g: &EmpiricalQuantile,
    grid_per_cell: usize,
) -> Result<f64> {
    if grid_per_cell < 2 {
        return Err(Error::domain("grid_per_cell must be ≥ 2"));
    }
    let mut sup: f64 = 0.0;
    for (idx, &u) in g.base.sorted().iter().enumerate() {
        let (a, b) = g.cell(idx);
        let hu = h.eval(u);
        if h.is_monotone() {
            sup = sup.max((hu - h.eval(a)).abs()).max((hu - h.eval(b)).abs());
        } else {
            let step = (b - a) / (grid_per_cell - 1) as f64;
            for j in 0..grid_per_cell {
                let t = if j + 1 == grid_per_cell {
                    b
                } else {
                    a + j as f64 * step
                };
                sup = sup.max((hu - h.eval(t)).abs());
            }
        }
    }
    Ok(sup)
}

/// Per-cell `∫_{cell i} |H(U_{n:i}) − H(t)|ᵖ dt`, each piece split at `U_{n:i}`
/// when it falls inside the cell (the integrand vanishes there).
pub fn cell_lp_integrals(
    h: &TransformedQuantile,
    g: &EmpiricalQuantile,
    p: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(Error::domain(format!("p = {p} must be finite and ≥ 1")));
    }
    let mut out = Vec::with_capacity(g.n());
    for (idx, &u) in g.base.sorted().iter().enumerate() {
        let (a, b) = g.cell(idx);
        let hu = h.eval(u);
        let f = |t: f64| {
            let d = (hu - h.eval(t)).abs();
            if p == 1.0 {
                d
            } else if p == 2.0 {
                d * d
            } else {
                d.powf(p)
            }
        };
        let tol_cell = Tolerance::new(tol, tol * (b - a));
        let v = if u > a && u < b {
            quadrature::integrate(&f, a, u, tol_cell)? + quadrature::integrate(&f, u, b, tol_cell)?
        } else {
            quadrature::integrate(&f, a, b, tol_cell)?
        };
        out.push(v);
    }
    Ok(out)
}

/// `∫₀¹ |H(Gₙ⁻¹(t)) − H(t)|ᵖ dt`.
pub fn lp_discrepancy(
    h: &TransformedQuantile,
    g: &EmpiricalQuantile,
    p: f64,
    tol: f64,
) -> Result<f64> {
    Ok(cell_lp_integrals(h, g, p, tol)?.into_iter().sum())
}

/// `∫₀¹ |f(Gₙ⁻¹(t)) − g(Gₙ⁻¹(t))|ᵖ dt`, exact over cells.
pub fn cellwise_lp_distance<A, B>(f: &A, other: &B, g: &EmpiricalQuantile, p: f64) -> f64
where
    A: RealFn + ?Sized,
    B: RealFn + ?Sized,
{
    let mut total = 0.0;
    for (idx, &u) in g.base.sorted().iter().enumerate() {
        let (a, b) = g.cell(idx);
        total += (f.eval(u) - other.eval(u)).abs().powf(p) * (b - a);
    }
    total
}

/// Hölder bound on `|Lₙ − μₙ|`: `Cₙ(q)^{1/q} · lp8^{1/p}` for `p > 1` and
/// `Cₙ(∞) · lp8` for `p = 1`.
pub fn holder_gap_bound(norms: &WeightNorms, lp8: f64, p: f64) -> Result<f64> {
    let q = Exponent::conjugate_of(p)?;
    let conjugate = match (q, norms.q) {
        (Exponent::Infinity, Exponent::Infinity) => true,
        (Exponent::Finite(a), Exponent::Finite(b)) => (a - b).abs() <= 1e-12 * a.max(b),
        _ => false,
    };
    if !conjugate {
        return Err(Error::domain(format!(
            "norm exponent {} is not conjugate to p = {p}",
            norms.q
        )));
    }
    if p == 1.0 {
        Ok(norms.value * lp8)
    } else {
        Ok(norms.root() * lp8.powf(1.0 / p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupIdentity {
    /// `sup_t |Gₙ⁻¹(t) − t|`
    pub lhs: f64,
    /// `sup_t |Gₙ(t) − t|`
    pub rhs: f64,
}

pub fn quantile_sup_identity(g: &EmpiricalQuantile) -> SupIdentity {
    let mut lhs: f64 = 0.0;
    for (idx, &u) in g.base.sorted().iter().enumerate() {
        let (a, b) = g.cell(idx);
        lhs = lhs.max((u - a).abs()).max((u - b).abs());
    }
    let rhs = ks_sorted(g.base.sorted(), &DistributionModel::standard_uniform());
    SupIdentity { lhs, rhs }
}

/// Every quantity controlling one realized gap `|Lₙ − μₙ|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub l_n: f64,
    pub mu_n: f64,
    pub gap: f64,
    pub ks: f64,
    pub sup7: Option<f64>,
    pub lp8: f64,
    pub holder_bound: f64,
}

/// Options for [`discrepancy_report`].
#[derive(Debug, Clone, Copy)]
pub struct DiscrepancyOptions {
    pub p: f64,
    pub tol: f64,
    pub grid_per_cell: usize,
    pub with_sup: bool,
}

/// Evaluates all discrepancies for one uniform-scale sample. `mu` and `norms`
/// depend only on `n` and are passed in so callers can reuse them.
pub fn discrepancy_report(
    w: &WeightVector,
    h: &TransformedQuantile,
    uniform_sample: Vec<f64>,
    mu: f64,
    norms: &WeightNorms,
    opts: DiscrepancyOptions,
) -> Result<DiscrepancyReport> {
    let f = h.distribution();
    let g = EmpiricalQuantile::new(uniform_sample)?;
    let x_sorted: Vec<f64> = g
        .base
        .sorted()
        .iter()
        .map(|&u| f.quantile_unchecked(u))
        .collect();
    let x = OrderedSample {
        original: Vec::new(),
        sorted: x_sorted,
    };
    let l_n = l_statistic_sorted(w, h.kernel(), &x)?;
    let ks = ks_sorted(x.sorted(), f);
    let sup7 = if opts.with_sup {
        Some(sup_discrepancy(h, &g, opts.grid_per_cell)?)
    } else {
        None
    };
    let lp8 = match lp_discrepancy(h, &g, opts.p, opts.tol) {
        Ok(v) => v,
        Err(Error::Diverges(_)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let holder_bound = holder_gap_bound(norms, lp8, opts.p)?;
    Ok(DiscrepancyReport {
        l_n,
        mu_n: mu,
        gap: (l_n - mu).abs(),
        ks,
        sup7,
        lp8,
        holder_bound,
    })
}
