//! Path counting by backward dynamic programming.
//!
//! Rows of a countable transition matrix can be long, but every column is
//! finite, so all counts are propagated from the target column backwards
//! through predecessor lists.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{ArcIndex, CountableMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Successive columns `m_·j(n)`, `n = 0, 1, 2, ...`.
///
/// With `first_return` set, paths may visit `j` only at their two ends, so
/// the entry at `j` of layer `n` is the first-return count `f_jj(n)`.
pub struct BackwardCounts<'a> {
    matrix: &'a dyn CountableMatrix,
    target: ArcIndex,
    first_return: bool,
    layer: HashMap<ArcIndex, BigUint>,
    step: usize,
}

impl<'a> BackwardCounts<'a> {
    pub fn new(matrix: &'a dyn CountableMatrix, target: &ArcIndex, first_return: bool) -> Result<Self> {
        if !matrix.contains(target) {
            return Err(Error::UnknownIndex(target.clone()));
        }
        let layer = HashMap::from([(target.clone(), BigUint::one())]);
        Ok(BackwardCounts { matrix, target: target.clone(), first_return, layer, step: 0 })
    }

    /// Current layer: counts of length-`step` paths ending at the target.
    pub fn layer(&self) -> &HashMap<ArcIndex, BigUint> {
        &self.layer
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn count(&self, i: &ArcIndex) -> BigUint {
        self.layer.get(i).cloned().unwrap_or_default()
    }

    /// Advances to the next layer.
    pub fn advance(&mut self) -> Result<()> {
        let mut next: HashMap<ArcIndex, BigUint> = HashMap::new();
        // deterministic accumulation order
        let mut keys: Vec<&ArcIndex> = self.layer.keys().collect();
        keys.sort();
        for l in keys {
            if self.first_return && self.step > 0 && *l == self.target {
                continue;
            }
            let c = &self.layer[l];
            if c.is_zero() {
                continue;
            }
            for p in self.matrix.predecessors(l)? {
                *next.entry(p).or_default() += c;
            }
        }
        self.layer = next;
        self.step += 1;
        Ok(())
    }

    /// True when no further path can reach the target.
    pub fn exhausted(&self) -> bool {
        self.layer.iter().all(|(k, c)| c.is_zero() || (self.first_return && self.step > 0 && *k == self.target))
    }
}

/// `m_ij(n)`: number of admissible words `i = i0, ..., in = j`.
pub fn power_entry(m: &dyn CountableMatrix, i: &ArcIndex, j: &ArcIndex, n: usize) -> Result<BigUint> {
    if !m.contains(i) {
        return Err(Error::UnknownIndex(i.clone()));
    }
    let mut counts = BackwardCounts::new(m, j, false)?;
    for _ in 0..n {
        counts.advance()?;
        if counts.layer().is_empty() {
            return Ok(BigUint::zero());
        }
    }
    Ok(counts.count(i))
}

/// Diagonal sequence `m_jj(1), ..., m_jj(n)`.
pub fn diagonal_counts(m: &dyn CountableMatrix, j: &ArcIndex, n: usize) -> Result<Vec<BigUint>> {
    let mut counts = BackwardCounts::new(m, j, false)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        counts.advance()?;
        out.push(counts.count(j));
    }
    Ok(out)
}

/// First-return counts `f_jj(1), ..., f_jj(n)`.
pub fn first_return_counts(m: &dyn CountableMatrix, j: &ArcIndex, n: usize) -> Result<(Vec<BigUint>, bool)> {
    let mut counts = BackwardCounts::new(m, j, true)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        counts.advance()?;
        out.push(counts.count(j));
        if counts.exhausted() {
            out.resize(n, BigUint::zero());
            return Ok((out, true));
        }
    }
    Ok((out, counts.exhausted()))
}

/// Natural log of a big integer; `-inf` for zero.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Certification state of a truncated power series.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TailStatus {
    /// The last quarter of terms decays at least geometrically with ratio `q`;
    /// `bound` is the geometric tail `t_last q^(k) / (1 - q)`.
    ConvergentEstimate { q: f64, bound: f64 },
    /// The series terminates: every later term is zero.
    Exact,
    Inconclusive,
    /// Partial sums crossed the configured ceiling.
    Diverging,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions {
    /// Partial sums above this are reported as diverging.
    pub ceiling: f64,
    /// Largest empirical ratio accepted as geometric decay.
    pub max_ratio: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { ceiling: 1e12, max_ratio: 0.999 }
    }
}

/// Truncated sum `Σ_{n ≤ N} c_n z^n` with its tail status.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSum<S> {
    pub partial: S,
    pub terms: usize,
    pub tail: TailStatus,
}

impl<S: Scalar> SeriesSum<S> {
    /// Partial sum plus the geometric tail, as a float.
    pub fn estimate(&self) -> f64 {
        let p = self.partial.to_f64();
        match self.tail {
            TailStatus::ConvergentEstimate { bound, .. } => p + bound,
            _ => p,
        }
    }

    pub fn certified(&self) -> bool {
        matches!(self.tail, TailStatus::ConvergentEstimate { .. } | TailStatus::Exact)
    }
}

/// Empirical ratio test over the last quarter of a term sequence.
///
/// `terms[n]` is the n-th term as a float; zero terms are skipped and gaps
/// between nonzero terms are handled by taking the per-step geometric mean.
pub(crate) fn ratio_tail(terms: &[f64], max_ratio: f64) -> TailStatus {
    let n = terms.len();
    if n < 2 {
        return TailStatus::Inconclusive;
    }
    let start = n - n.div_ceil(4).max(2).min(n);
    let nonzero: Vec<(usize, f64)> =
        (start..n).filter(|&k| terms[k] > 0.0).map(|k| (k, terms[k])).collect();
    if nonzero.len() < 2 {
        return TailStatus::Inconclusive;
    }
    let mut q: f64 = 0.0;
    for w in nonzero.windows(2) {
        let (k0, t0) = w[0];
        let (k1, t1) = w[1];
        q = q.max((t1 / t0).powf(1.0 / (k1 - k0) as f64));
    }
    if !q.is_finite() || q > max_ratio {
        return TailStatus::Inconclusive;
    }
    let (last_k, last_t) = *nonzero.last().unwrap();
    // terms after the horizon are bounded by last_t q^(k - last_k)
    let lead = (n - last_k) as i32;
    let bound = last_t * q.powi(lead) / (1.0 - q);
    TailStatus::ConvergentEstimate { q, bound }
}

/// Generating series `M_ij(z) = Σ_{n ≤ N} m_ij(n) z^n` for every `i` that
/// reaches `j` within `N` steps.
pub fn generating_column<S: Scalar>(
    m: &dyn CountableMatrix,
    j: &ArcIndex,
    z: &S,
    horizon: usize,
    opts: SeriesOptions,
) -> Result<HashMap<ArcIndex, SeriesSum<S>>> {
    if *z <= S::zero() {
        return Err(Error::Parameter(format!("z = {z} must be positive")));
    }
    let mut counts = BackwardCounts::new(m, j, false)?;
    let mut partial: HashMap<ArcIndex, S> = HashMap::new();
    let mut floats: HashMap<ArcIndex, Vec<f64>> = HashMap::new();
    let mut zn = S::one();
    let mut diverged = false;
    let mut terminated = false;
    for n in 0..=horizon {
        if n > 0 {
            counts.advance()?;
            zn = zn * z.clone();
        }
        if counts.layer().is_empty() {
            terminated = true;
            break;
        }
        for (i, c) in counts.layer() {
            let term = S::from_biguint(c) * zn.clone();
            let tf = term.to_f64();
            let seq = floats.entry(i.clone()).or_insert_with(|| vec![0.0; n]);
            seq.resize(n, 0.0);
            seq.push(tf);
            let acc = partial.entry(i.clone()).or_insert_with(S::zero);
            *acc = acc.clone() + term;
            if acc.to_f64() > opts.ceiling {
                diverged = true;
            }
        }
        if diverged {
            break;
        }
    }
    let mut out = HashMap::with_capacity(partial.len());
    for (i, p) in partial {
        let mut seq = floats.remove(&i).unwrap_or_default();
        let tail = if diverged {
            TailStatus::Diverging
        } else if terminated {
            TailStatus::Exact
        } else {
            seq.resize(horizon + 1, 0.0);
            ratio_tail(&seq, opts.max_ratio)
        };
        out.insert(i, SeriesSum { partial: p, terms: horizon, tail });
    }
    Ok(out)
}

/// Generating series `M_ij(z)` truncated at `horizon`.
pub fn generating_fn<S: Scalar>(
    m: &dyn CountableMatrix,
    i: &ArcIndex,
    j: &ArcIndex,
    z: &S,
    horizon: usize,
    opts: SeriesOptions,
) -> Result<SeriesSum<S>> {
    if !m.contains(i) {
        return Err(Error::UnknownIndex(i.clone()));
    }
    let mut column = generating_column(m, j, z, horizon, opts)?;
    Ok(column.remove(i).unwrap_or(SeriesSum { partial: S::zero(), terms: horizon, tail: TailStatus::Exact }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recurrence {
    Recurrent,
    Transient,
    Inconclusive,
}

/// Outcome of the first-return test at a given `λ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VereJonesReport {
    pub class: Recurrence,
    /// `Σ_{n ≤ N} f_jj(n) λ^{-n}`.
    pub first_return_sum: f64,
    pub tail: TailStatus,
    pub horizon: usize,
}

/// Recurrent/transient classification at `λ` through the first-return
/// series `F_jj(1/λ)`: recurrent when it equals 1, transient when below.
pub fn vere_jones_classify(
    m: &dyn CountableMatrix,
    lambda_est: f64,
    j: &ArcIndex,
    horizon: usize,
    tol: f64,
) -> Result<VereJonesReport> {
    if !(lambda_est > 0.0) {
        return Err(Error::Parameter(format!("lambda = {lambda_est} must be positive")));
    }
    let (counts, exhausted) = first_return_counts(m, j, horizon)?;
    let ln_lambda = lambda_est.ln();
    let mut terms = Vec::with_capacity(horizon + 1);
    terms.push(0.0);
    for (k, c) in counts.iter().enumerate() {
        let n = (k + 1) as f64;
        terms.push((ln_biguint(c) - n * ln_lambda).exp());
    }
    let sum: f64 = terms.iter().sum();
    let tail = if exhausted { TailStatus::Exact } else { ratio_tail(&terms, SeriesOptions::default().max_ratio) };
    let tail_bound = match tail {
        TailStatus::Exact => Some(0.0),
        TailStatus::ConvergentEstimate { bound, .. } => Some(bound),
        _ => None,
    };
    let class = match tail_bound {
        Some(t) if (sum - 1.0).abs() <= tol && t <= tol => Recurrence::Recurrent,
        Some(t) if sum + t < 1.0 - tol => Recurrence::Transient,
        _ => Recurrence::Inconclusive,
    };
    Ok(VereJonesReport { class, first_return_sum: sum, tail, horizon })
}
