//! Seeded generators of identically distributed dependent sequences.
//!
//! All dependence is built on the uniform scale and then pushed through
//! `F⁻¹`, so every variant has the same marginal `F` by construction.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionModel, RealFn};
use crate::error::{Error, Result};
use crate::rng::CounterRng;

pub const ROW_SUM_TOL: f64 = 1e-12;
/// Terms of the condition-(4) series below this size end the summation.
pub const SERIES_CUTOFF: f64 = 1e-15;

const LANE_PRIMARY: u64 = 0;
const LANE_REFINE: u64 = 1;

pub fn golden_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn yes() -> bool {
    true
}

/// Row-stochastic matrix of a finite-state chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct TransitionMatrix {
    rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let s = rows.len();
        if s == 0 {
            return Err(Error::config("transition matrix is empty"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != s {
                return Err(Error::config(format!(
                    "transition matrix row {i} has length {} (expected {s})",
                    row.len()
                )));
            }
            if row.iter().any(|&p| !(0.0..f64::INFINITY).contains(&p)) {
                return Err(Error::config(format!(
                    "transition matrix row {i} has a negative or non-finite entry"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::config(format!(
                    "transition matrix row {i} sums to {sum}, not 1"
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Two-state chain with `P(0→1) = a`, `P(1→0) = b`.
    pub fn two_state(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - a, a], vec![b, 1.0 - b]])
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.rows[from][to]
    }

    fn to_matrix(&self) -> DMatrix<f64> {
        let s = self.states();
        DMatrix::from_fn(s, s, |i, j| self.rows[i][j])
    }

    /// Every state reaches every other along positive-probability edges.
    pub fn is_irreducible(&self) -> bool {
        let s = self.states();
        (0..s).all(|start| {
            let mut seen = vec![false; s];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for (y, &p) in self.rows[x].iter().enumerate() {
                    if p > 0.0 && !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            seen.iter().all(|&v| v)
        })
    }

    /// Dobrushin-style minorization mass `Σ_y min_x P(x, y)`.
    pub fn doeblin_mass(&self) -> f64 {
        let s = self.states();
        (0..s)
            .map(|y| {
                (0..s)
                    .map(|x| self.rows[x][y])
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }
}

impl TryFrom<Vec<Vec<f64>>> for TransitionMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<TransitionMatrix> for Vec<Vec<f64>> {
    fn from(m: TransitionMatrix) -> Self {
        m.rows
    }
}

/// Solves `πP = π`, `Σπ = 1` for an irreducible chain.
pub fn stationary_distribution(p: &TransitionMatrix) -> Result<Vec<f64>> {
    if !p.is_irreducible() {
        return Err(Error::NoStationaryLaw);
    }
    let s = p.states();
    // (Pᵀ − I) π = 0 with the last equation replaced by Σπ = 1.
    let mut a = p.to_matrix().transpose() - DMatrix::identity(s, s);
    for j in 0..s {
        a[(s - 1, j)] = 1.0;
    }
    let mut rhs = nalgebra::DVector::zeros(s);
    rhs[s - 1] = 1.0;
    let pi = a.lu().solve(&rhs).ok_or(Error::NoStationaryLaw)?;
    let mut pi: Vec<f64> = pi.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    Ok(pi)
}

fn worst_state_tv(power: &DMatrix<f64>, pi: &[f64]) -> f64 {
    (0..power.nrows())
        .map(|x| {
            0.5 * pi
                .iter()
                .enumerate()
                .map(|(y, &py)| (power[(x, y)] - py).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Worst-state total-variation distance to stationarity,
/// `φ̄(n) = max_x ½ Σ_y |Pⁿ(x, y) − π(y)|`.
///
/// Under a stationary start this bounds the chain's uniform mixing
/// coefficient `φ(n)`.
pub fn markov_phi_bound(p: &TransitionMatrix, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("lag must be ≥ 1"));
    }
    Ok(*markov_phi_profile(p, n)?.last().expect("n ≥ 1"))
}

/// `φ̄(1), …, φ̄(max_lag)`.
pub fn markov_phi_profile(p: &TransitionMatrix, max_lag: usize) -> Result<Vec<f64>> {
    let pi = stationary_distribution(p)?;
    let m = p.to_matrix();
    let mut power = m.clone();
    let mut out = Vec::with_capacity(max_lag);
    for lag in 1..=max_lag {
        if lag > 1 {
            power = &power * &m;
        }
        out.push(worst_state_tv(&power, &pi));
    }
    Ok(out)
}

/// Upper bounds on the mixing coefficients `φ(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiBound {
    /// `φ(n) = 0` for `n > m`; `φ(n) ≤ 1` otherwise.
    ZeroBeyond {
        m: usize,
    },
    /// `φ(n) ≤ c · rhoⁿ`.
    Geometric {
        c: f64,
        rho: f64,
    },
    NoneKnown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition4Verdict {
    Holds,
    Fails,
    Unknown,
}

/// Verdict on `Σ_{n≥1} φ^{1/2}(2ⁿ) < ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition4Report {
    pub verdict: Condition4Verdict,
    /// Upper bound on the full series when it holds.
    pub partial_sum_bound: Option<f64>,
    pub terms: usize,
}

pub fn check_condition4(bound: &PhiBound) -> Condition4Report {
    match *bound {
        PhiBound::ZeroBeyond { m } => {
            // Nonzero terms are n ≥ 1 with 2ⁿ ≤ m, each at most 1.
            let terms = (1..usize::BITS).take_while(|&k| (1usize << k) <= m).count();
            Condition4Report {
                verdict: Condition4Verdict::Holds,
                partial_sum_bound: Some(terms as f64),
                terms,
            }
        }
        PhiBound::Geometric { c, rho } => {
            if c.is_nan() || rho.is_nan() || c < 0.0 || rho < 0.0 {
                return Condition4Report {
                    verdict: Condition4Verdict::Unknown,
                    partial_sum_bound: None,
                    terms: 0,
                };
            }
            if c == 0.0 || rho == 0.0 {
                return Condition4Report {
                    verdict: Condition4Verdict::Holds,
                    partial_sum_bound: Some(0.0),
                    terms: 0,
                };
            }
            if rho >= 1.0 {
                return Condition4Report {
                    verdict: Condition4Verdict::Fails,
                    partial_sum_bound: None,
                    terms: 0,
                };
            }
            // term(k) = (c ρ^{2^k})^{1/2}, with φ ≤ 1 capping each term at 1.
            let term = |k: i32| (c * rho.powf(2f64.powi(k))).sqrt().min(1.0);
            let mut sum = 0.0;
            let mut k = 1;
            loop {
                sum += term(k);
                let next = term(k + 1);
                if next < SERIES_CUTOFF {
                    // Consecutive term ratios ρ^{2^{k-1}} shrink, so the tail
                    // is dominated by a geometric series at the current ratio.
                    let ratio = rho.powf(2f64.powi(k));
                    let tail = next / (1.0 - ratio);
                    return Condition4Report {
                        verdict: Condition4Verdict::Holds,
                        partial_sum_bound: Some(sum + tail),
                        terms: k as usize,
                    };
                }
                k += 1;
            }
        }
        PhiBound::NoneKnown => Condition4Report {
            verdict: Condition4Verdict::Unknown,
            partial_sum_bound: None,
            terms: 0,
        },
    }
}

/// Dependence metadata of a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingProfile {
    pub stationary: bool,
    pub ergodic: bool,
    /// Marginal on the uniform scale is exactly uniform.
    pub uniform_marginal: bool,
    pub phi_bound: PhiBound,
    pub condition4: Condition4Report,
    pub notes: Vec<String>,
}

impl MixingProfile {
    fn new(
        stationary: bool,
        ergodic: bool,
        uniform_marginal: bool,
        phi_bound: PhiBound,
        notes: Vec<String>,
    ) -> Self {
        let condition4 = check_condition4(&phi_bound);
        Self {
            stationary,
            ergodic,
            uniform_marginal,
            phi_bound,
            condition4,
            notes,
        }
    }
}

/// Largest lag searched for a contraction when bounding Markov `φ`.
const MAX_CONTRACTION_LAG: usize = 256;

/// Geometric bound `φ̄(n) ≤ d(m)^{⌊n/m⌋} ≤ d(m)^{-1} (d(m)^{1/m})ⁿ`, where
/// `d(m)` is the largest total-variation distance between two rows of `Pᵐ`
/// (submultiplicative and dominating the worst-state distance).
pub fn markov_geometric_bound(p: &TransitionMatrix) -> Result<PhiBound> {
    stationary_distribution(p)?;
    let m = p.to_matrix();
    let s = p.states();
    let mut power = m.clone();
    for lag in 1..=MAX_CONTRACTION_LAG {
        if lag > 1 {
            power = &power * &m;
        }
        let mut d: f64 = 0.0;
        for x in 0..s {
            for x2 in (x + 1)..s {
                let tv = 0.5
                    * (0..s)
                        .map(|y| (power[(x, y)] - power[(x2, y)]).abs())
                        .sum::<f64>();
                d = d.max(tv);
            }
        }
        if d <= 0.0 {
            return Ok(PhiBound::ZeroBeyond { m: lag - 1 });
        }
        if d < 1.0 {
            return Ok(PhiBound::Geometric {
                c: 1.0 / d,
                rho: d.powf(1.0 / lag as f64),
            });
        }
    }
    // Periodic chains never contract.
    Ok(PhiBound::Geometric { c: 1.0, rho: 1.0 })
}

/// Generator variants on the uniform scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Process {
    IidUniform,
    /// `Uᵢ = frac(U₀ + iα)`; `U₀` uniform when `random_phase`, else 0.
    Rotation {
        #[serde(default = "golden_alpha")]
        alpha: f64,
        #[serde(default = "yes")]
        random_phase: bool,
    },
    /// Stationary chain emitting a uniform draw inside the current state's
    /// quantile bin `[Σ_{y<x} π(y), Σ_{y≤x} π(y))`.
    Markov {
        #[serde(rename = "P")]
        p: TransitionMatrix,
    },
    /// `Uᵢ = frac(εᵢ + … + ε_{i+m})` for iid uniform `ε`.
    MDependent {
        m: usize,
    },
    /// Degenerate `Uᵢ = value`; not identically uniform.
    Constant {
        value: f64,
    },
}

impl Process {
    pub fn id(&self) -> &'static str {
        match self {
            Process::IidUniform => "iid_uniform",
            Process::Rotation { .. } => "rotation",
            Process::Markov { .. } => "markov",
            Process::MDependent { .. } => "m_dependent",
            Process::Constant { .. } => "constant",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Process::Rotation { alpha, .. } if !alpha.is_finite() => {
                Err(Error::config("rotation angle must be finite"))
            }
            Process::Markov { p } => stationary_distribution(p).map(|_| ()).map_err(|e| match e {
                Error::NoStationaryLaw => Error::config("Markov transition matrix is reducible"),
                e => e,
            }),
            Process::Constant { value } if !(0.0..=1.0).contains(value) => {
                Err(Error::config("constant process value must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    pub fn mixing_profile(&self) -> Result<MixingProfile> {
        self.validate()?;
        let profile = match self {
            Process::IidUniform => {
                MixingProfile::new(true, true, true, PhiBound::ZeroBeyond { m: 0 }, vec![])
            }
            Process::Rotation { random_phase, .. } => {
                let mut notes = vec![
                    "irrational rotation: uniquely ergodic but not mixing; φ(n) does not vanish"
                        .to_string(),
                ];
                if !random_phase {
                    notes.push("fixed phase: deterministic, not stationary".to_string());
                }
                MixingProfile::new(
                    *random_phase,
                    *random_phase,
                    *random_phase,
                    PhiBound::Geometric { c: 1.0, rho: 1.0 },
                    notes,
                )
            }
            Process::Markov { p } => MixingProfile::new(
                true,
                true,
                true,
                markov_geometric_bound(p)?,
                vec!["φ bounds assume the chain starts from its stationary law".to_string()],
            ),
            Process::MDependent { m } => {
                MixingProfile::new(true, true, true, PhiBound::ZeroBeyond { m: *m }, vec![])
            }
            Process::Constant { .. } => MixingProfile::new(
                true,
                true,
                false,
                PhiBound::ZeroBeyond { m: 0 },
                vec!["degenerate sequence; marginal is a point mass".to_string()],
            ),
        };
        Ok(profile)
    }
}

/// A process with its seed. Each call builds fresh stream state, so a
/// generator may be shared freely between threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessGenerator {
    pub process: Process,
    pub seed: u64,
}

impl ProcessGenerator {
    pub fn new(process: Process, seed: u64) -> Self {
        Self { process, seed }
    }

    /// `U₁, …, Uₙ` on the uniform scale. Prefixes are nested: the first `m`
    /// values of a length-`n` draw equal a length-`m` draw.
    pub fn uniform_sample(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::domain("sample size must be ≥ 1"));
        }
        self.process.validate()?;
        let mut rng = CounterRng::from_seed(self.seed, LANE_PRIMARY);
        let out = match &self.process {
            Process::IidUniform => (0..n).map(|_| rng.next_f64()).collect(),
            Process::Rotation {
                alpha,
                random_phase,
            } => {
                let phase = if *random_phase { rng.next_f64() } else { 0.0 };
                (1..=n)
                    .map(|i| {
                        let v = (i as f64).mul_add(*alpha, phase);
                        v - v.floor()
                    })
                    .collect()
            }
            Process::Markov { p } => {
                let pi = stationary_distribution(p)?;
                let mut bin_lo = Vec::with_capacity(pi.len());
                let mut acc = 0.0;
                for &w in &pi {
                    bin_lo.push(acc);
                    acc += w;
                }
                let mut refine = CounterRng::from_seed(self.seed, LANE_REFINE);
                let mut state = pick(&pi, rng.next_f64());
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    if i > 0 {
                        state = pick(&p.rows()[state], rng.next_f64());
                    }
                    let u = bin_lo[state] + refine.next_f64() * pi[state];
                    out.push(u.min(1.0 - f64::EPSILON / 2.0));
                }
                out
            }
            Process::MDependent { m } => {
                let mut window: VecDeque<f64> = (0..=*m).map(|_| rng.next_f64()).collect();
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    if i > 0 {
                        window.pop_front();
                        window.push_back(rng.next_f64());
                    }
                    let s: f64 = window.iter().sum();
                    out.push(s - s.floor());
                }
                out
            }
            Process::Constant { value } => vec![*value; n],
        };
        Ok(out)
    }

    /// `Xᵢ = F⁻¹(Uᵢ)`.
    pub fn generate(&self, n: usize, distribution: &DistributionModel) -> Result<Vec<f64>> {
        distribution.validate()?;
        Ok(self
            .uniform_sample(n)?
            .into_iter()
            .map(|u| distribution.quantile_unchecked(u))
            .collect())
    }

    /// Visited chain states alongside the emitted sample; `None` for
    /// non-Markov processes.
    pub fn markov_states(&self, n: usize) -> Result<Option<Vec<usize>>> {
        let Process::Markov { p } = &self.process else {
            return Ok(None);
        };
        let pi = stationary_distribution(p)?;
        let mut rng = CounterRng::from_seed(self.seed, LANE_PRIMARY);
        let mut state = pick(&pi, rng.next_f64());
        let mut states = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                state = pick(&p.rows()[state], rng.next_f64());
            }
            states.push(state);
        }
        Ok(Some(states))
    }
}

/// Inverse-CDF draw from a discrete law.
fn pick(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Rounding left u above the final partial sum; take the last positive state.
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// `n⁻¹ Σ f(Xᵢ)`.
pub fn ergodic_average<F: RealFn + ?Sized>(f: &F, sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::domain("ergodic average of an empty sample"));
    }
    Ok(sample.iter().map(|&x| f.eval(x)).sum::<f64>() / sample.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(a: f64) -> TransitionMatrix {
        TransitionMatrix::two_state(a, a).unwrap()
    }

    #[test]
    fn iid_is_deterministic() {
        let g = ProcessGenerator::new(Process::IidUniform, 1234);
        assert_eq!(g.uniform_sample(5).unwrap(), g.uniform_sample(5).unwrap());
        let other = ProcessGenerator::new(Process::IidUniform, 1235);
        assert_ne!(
            g.uniform_sample(5).unwrap(),
            other.uniform_sample(5).unwrap()
        );
    }

    #[test]
    fn samples_are_nested_prefixes() {
        let procs = [
            Process::IidUniform,
            Process::Rotation {
                alpha: golden_alpha(),
                random_phase: true,
            },
            Process::Markov { p: sym(0.3) },
            Process::MDependent { m: 3 },
        ];
        for p in procs {
            let g = ProcessGenerator::new(p, 99);
            let long = g.uniform_sample(500).unwrap();
            let short = g.uniform_sample(123).unwrap();
            assert_eq!(&long[..123], &short[..]);
        }
    }

    #[test]
    fn rotation_fixed_phase() {
        let g = ProcessGenerator::new(
            Process::Rotation {
                alpha: golden_alpha(),
                random_phase: false,
            },
            0,
        );
        let u = g.uniform_sample(3).unwrap();
        let expected = [
            0.618_033_988_749_894_8,
            0.236_067_977_499_789_7,
            0.854_101_966_249_684_5,
        ];
        for (a, b) in u.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn markov_state_frequencies() {
        let g = ProcessGenerator::new(Process::Markov { p: sym(0.3) }, 5);
        let states = g.markov_states(1_000_000).unwrap().unwrap();
        let ones = states.iter().filter(|&&s| s == 1).count() as f64 / states.len() as f64;
        assert!((ones - 0.5).abs() < 0.005, "{ones}");
        // Emissions sit in the state's bin.
        let u = g.uniform_sample(1000).unwrap();
        for (s, v) in states.iter().zip(&u) {
            assert_eq!(*s, usize::from(*v >= 0.5));
        }
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_distribution(&sym(0.3)).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15 && (pi[1] - 0.5).abs() < 1e-15);
        let p = TransitionMatrix::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let pi = stationary_distribution(&p).unwrap();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-14 && (pi[1] - 1.0 / 3.0).abs() < 1e-14);
        let id = TransitionMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            stationary_distribution(&id),
            Err(Error::NoStationaryLaw)
        ));
    }

    #[test]
    fn stationary_residual_three_states() {
        let p = TransitionMatrix::new(vec![
            vec![0.5, 0.25, 0.25],
            vec![0.1, 0.6, 0.3],
            vec![0.0, 0.7, 0.3],
        ])
        .unwrap();
        let pi = stationary_distribution(&p).unwrap();
        for y in 0..3 {
            let v: f64 = (0..3).map(|x| pi[x] * p.get(x, y)).sum();
            assert!((v - pi[y]).abs() < 1e-12);
        }
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_matrices() {
        assert!(matches!(
            TransitionMatrix::new(vec![vec![0.5, 0.6], vec![0.5, 0.5]]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            TransitionMatrix::new(vec![vec![1.2, -0.2], vec![0.5, 0.5]]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            TransitionMatrix::new(vec![vec![1.0]; 2]),
            Err(Error::Config(_))
        ));
        let json = r#"{"name": "markov", "P": [[0.7, 0.4], [0.3, 0.7]]}"#;
        assert!(serde_json::from_str::<Process>(json).is_err());
    }

    #[test]
    fn phi_bound_examples() {
        let p = sym(0.3);
        assert!((markov_phi_bound(&p, 1).unwrap() - 0.2).abs() < 1e-15);
        assert!((markov_phi_bound(&p, 3).unwrap() - 0.032).abs() < 1e-15);
        let flat = TransitionMatrix::new(vec![vec![0.25, 0.75], vec![0.25, 0.75]]).unwrap();
        for n in 1..5 {
            assert!(markov_phi_bound(&flat, n).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn phi_bound_contracts_by_doeblin_factor() {
        let p = TransitionMatrix::new(vec![
            vec![0.5, 0.3, 0.2],
            vec![0.2, 0.5, 0.3],
            vec![0.1, 0.2, 0.7],
        ])
        .unwrap();
        let factor = 1.0 - p.doeblin_mass();
        let prof = markov_phi_profile(&p, 20).unwrap();
        for w in prof.windows(2) {
            assert!(w[1] <= w[0] * factor + 1e-15);
        }
    }

    #[test]
    fn geometric_bound_dominates_profile() {
        for p in [
            sym(0.3),
            sym(0.05),
            TransitionMatrix::two_state(0.2, 0.6).unwrap(),
        ] {
            let PhiBound::Geometric { c, rho } = markov_geometric_bound(&p).unwrap() else {
                panic!("expected geometric bound");
            };
            assert!(rho < 1.0);
            for (i, v) in markov_phi_profile(&p, 40).unwrap().into_iter().enumerate() {
                assert!(v <= c * rho.powi(i as i32 + 1) + 1e-15);
            }
        }
        let periodic = TransitionMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(
            markov_geometric_bound(&periodic).unwrap(),
            PhiBound::Geometric { c: 1.0, rho: 1.0 }
        );
    }

    #[test]
    fn condition4_examples() {
        let r = check_condition4(&PhiBound::Geometric {
            c: 0.2 * 2.5,
            rho: 0.4,
        });
        assert_eq!(r.verdict, Condition4Verdict::Holds);
        let first = (0.5f64 * 0.4f64.powi(2)).sqrt();
        assert!((first - 0.08f64.sqrt()).abs() < 1e-15);
        // Direct sum of the first terms, which vanish doubly exponentially.
        let direct: f64 = (1..8).map(|k| (0.5 * 0.4f64.powi(1 << k)).sqrt()).sum();
        let bound = r.partial_sum_bound.unwrap();
        assert!(
            bound >= direct && bound - direct < 1e-14,
            "{bound} vs {direct}"
        );

        let r = check_condition4(&PhiBound::ZeroBeyond { m: 3 });
        assert_eq!(r.verdict, Condition4Verdict::Holds);
        assert_eq!(r.terms, 1);
        assert_eq!(r.partial_sum_bound, Some(1.0));

        let r = check_condition4(&PhiBound::Geometric { c: 1.0, rho: 1.0 });
        assert_eq!(r.verdict, Condition4Verdict::Fails);
        assert_eq!(
            check_condition4(&PhiBound::NoneKnown).verdict,
            Condition4Verdict::Unknown
        );
        assert_eq!(
            check_condition4(&PhiBound::ZeroBeyond { m: 0 }).partial_sum_bound,
            Some(0.0)
        );
    }

    #[test]
    fn profiles() {
        let rot = Process::Rotation {
            alpha: golden_alpha(),
            random_phase: true,
        }
        .mixing_profile()
        .unwrap();
        assert!(rot.ergodic && rot.stationary);
        assert_eq!(rot.condition4.verdict, Condition4Verdict::Fails);
        let mk = Process::Markov { p: sym(0.3) }.mixing_profile().unwrap();
        assert_eq!(mk.condition4.verdict, Condition4Verdict::Holds);
        let md = Process::MDependent { m: 4 }.mixing_profile().unwrap();
        assert_eq!(md.phi_bound, PhiBound::ZeroBeyond { m: 4 });
    }

    #[test]
    fn ergodic_average_examples() {
        assert_eq!(ergodic_average(&|x: f64| x, &[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert!(ergodic_average(&|x: f64| x, &[]).is_err());
        let u = ProcessGenerator::new(Process::IidUniform, 3)
            .uniform_sample(1_000_000)
            .unwrap();
        let ind = |x: f64| if x <= 0.5 { 1.0 } else { 0.0 };
        assert!((ergodic_average(&ind, &u).unwrap() - 0.5).abs() < 0.005);
        let rot = ProcessGenerator::new(
            Process::Rotation {
                alpha: golden_alpha(),
                random_phase: false,
            },
            0,
        )
        .uniform_sample(1_000_000)
        .unwrap();
        assert!((ergodic_average(&|x: f64| x, &rot).unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn generate_pushes_through_quantile() {
        let g = ProcessGenerator::new(Process::IidUniform, 8);
        let d = DistributionModel::exponential(2.0);
        let u = g.uniform_sample(50).unwrap();
        let x = g.generate(50, &d).unwrap();
        for (u, x) in u.iter().zip(&x) {
            assert_eq!(*x, d.quantile(*u).unwrap());
        }
    }

    #[test]
    fn process_json_shapes() {
        let p: Process =
            serde_json::from_str(r#"{"name": "markov", "P": [[0.7,0.3],[0.3,0.7]]}"#).unwrap();
        assert_eq!(p, Process::Markov { p: sym(0.3) });
        let p: Process = serde_json::from_str(r#"{"name": "rotation"}"#).unwrap();
        assert_eq!(
            p,
            Process::Rotation {
                alpha: golden_alpha(),
                random_phase: true
            }
        );
        let p: Process = serde_json::from_str(r#"{"name": "iid_uniform"}"#).unwrap();
        assert_eq!(p, Process::IidUniform);
    }
}
