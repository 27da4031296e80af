//! Horseshoes certified by loop counts, and the entropy lower bounds they give.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{loop_words, transition_matrix, MarkovMapSpec, Refinement};
use crate::transition::{diagonal_counts, ln_biguint, ArcIndex, CountableMatrix, FiniteMatrix};

/// One level of a loop-count sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorseshoeRow {
    pub n: usize,
    #[serde(serialize_with = "decimal")]
    pub count: BigUint,
    /// `(1/n) log count`; `None` when there is no loop of this length.
    pub bound: Option<f64>,
}

fn decimal<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

impl HorseshoeRow {
    fn new(n: usize, count: BigUint) -> Self {
        let bound = (!count.is_zero()).then(|| ln_biguint(&count) / n as f64);
        HorseshoeRow { n, count, bound }
    }

    /// CSV cell for the bound.
    pub fn bound_cell(&self, empty: &str) -> String {
        self.bound.map(|b| format!("{b}")).unwrap_or_else(|| empty.to_string())
    }
}

/// `s_n = m_jj(n)`: `f^n` has an `s_n`-horseshoe over arc `j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorseshoeSequence {
    pub base: ArcIndex,
    pub rows: Vec<HorseshoeRow>,
}

impl HorseshoeSequence {
    /// `sup_{n ≤ N} (1/n) log s_n`, or `None` when no loop was found.
    pub fn best_bound(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.bound).reduce(f64::max)
    }

    /// Running supremum of the bounds.
    pub fn envelope(&self) -> Vec<Option<f64>> {
        let mut best: Option<f64> = None;
        self.rows
            .iter()
            .map(|r| {
                best = match (best, r.bound) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                };
                best
            })
            .collect()
    }
}

pub fn horseshoe_sequence(m: &dyn CountableMatrix, j: &ArcIndex, n_max: usize) -> Result<HorseshoeSequence> {
    if n_max == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    let counts = diagonal_counts(m, j, n_max)?;
    let rows = counts.into_iter().enumerate().map(|(k, c)| HorseshoeRow::new(k + 1, c)).collect();
    Ok(HorseshoeSequence { base: j.clone(), rows })
}

/// The `m_jj(n)` words `[j i1 ... i(n-1) j]`; each marks a subarc of `j`
/// that `f^n` maps homeomorphically over `j`.
pub fn horseshoe_witness(spec: &MarkovMapSpec, j: &ArcIndex, n: usize, budget: usize) -> Result<Refinement> {
    loop_words(&transition_matrix(spec), j, n, budget)
}

/// `(1/n) log tr(A^n)` over the enumeration prefix, a lower bound on the
/// growth of periodic points.
pub fn periodic_growth_report(m: &dyn CountableMatrix, n_max: usize) -> Result<Vec<HorseshoeRow>> {
    if n_max == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    let a = FiniteMatrix::principal(m, m.enumeration().to_vec())?;
    let mut traces = vec![BigUint::zero(); n_max];
    let size = a.size();
    for j in 0..size {
        // counts of paths from each node to j, advanced backwards
        let mut layer = vec![BigUint::zero(); size];
        layer[j] = BigUint::from(1u8);
        for trace in traces.iter_mut() {
            let mut next = vec![BigUint::zero(); size];
            for (k, c) in layer.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for &p in a.column(k) {
                    next[p] += c;
                }
            }
            layer = next;
            *trace += &layer[j];
        }
    }
    Ok(traces.into_iter().enumerate().map(|(k, t)| HorseshoeRow::new(k + 1, t)).collect())
}
