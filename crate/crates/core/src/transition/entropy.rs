use serde::Serialize;

use super::spectral::spectral_radius_with_pivot;
use super::{reachable_ball, ArcIndex, CountableMatrix, FiniteMatrix};
use crate::error::{Error, Result};

/// Radii of the nested truncations visited by [`gurevich_entropy_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepthSchedule {
    /// Step `k` uses radius `k`.
    Linear,
    /// Step `k` uses radius `2^(k-1)`; reaches long cycles in few steps.
    Doubling,
}

impl DepthSchedule {
    pub fn radius(self, step: usize) -> usize {
        match self {
            DepthSchedule::Linear => step,
            DepthSchedule::Doubling => 1usize.checked_shl((step - 1) as u32).unwrap_or(usize::MAX),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyStatus {
    Converged,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyBound {
    pub depth: usize,
    pub size: usize,
    /// `log` of the certified lower end of the spectral radius bracket.
    pub log_radius: f64,
    pub irreducible: bool,
}

/// Lower bounds for `log λ_M` from nested finite truncations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub bounds: Vec<EntropyBound>,
    pub value: f64,
    pub status: EntropyStatus,
    pub tolerance: f64,
}

impl EntropyEstimate {
    /// True when every computed truncation was irreducible.
    pub fn all_irreducible(&self) -> bool {
        self.bounds.iter().all(|b| b.irreducible)
    }
}

/// Gurevich entropy lower bounds over truncations of radius `1..=max_depth`.
pub fn gurevich_entropy(
    m: &dyn CountableMatrix,
    base: &ArcIndex,
    max_depth: usize,
    tol: f64,
) -> Result<EntropyEstimate> {
    gurevich_entropy_with(m, base, max_depth, tol, DepthSchedule::Linear)
}

/// As [`gurevich_entropy`] with an explicit radius schedule.
///
/// Stops early once two consecutive bounds differ by less than `tol`.
/// Truncations identical to the previous one are not recomputed.
pub fn gurevich_entropy_with(
    m: &dyn CountableMatrix,
    base: &ArcIndex,
    max_depth: usize,
    tol: f64,
    schedule: DepthSchedule,
) -> Result<EntropyEstimate> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance {tol} must be positive")));
    }
    if max_depth == 0 {
        return Err(Error::Parameter("max_depth must be at least 1".into()));
    }
    let mut bounds: Vec<EntropyBound> = Vec::new();
    let mut status = EntropyStatus::BudgetExhausted;
    for step in 1..=max_depth {
        let depth = schedule.radius(step);
        let set = reachable_ball(m, depth, base)?;
        let bound = match bounds.last() {
            Some(prev) if prev.size == set.len() => EntropyBound { depth, ..prev.clone() },
            _ => {
                let a = FiniteMatrix::principal(m, set)?;
                let pivot = a.position(base);
                // bracket well inside the stopping tolerance
                let (r, _) = spectral_radius_with_pivot(&a, (tol * 1e-3).max(1e-14), pivot)?;
                EntropyBound { depth, size: a.size(), log_radius: r.lower.ln(), irreducible: r.irreducible }
            }
        };
        let prev = bounds.last().map(|b| b.log_radius);
        bounds.push(bound);
        let cur = bounds.last().unwrap().log_radius;
        if let Some(p) = prev {
            if cur.is_finite() && p.is_finite() && (cur - p).abs() < tol {
                status = EntropyStatus::Converged;
                break;
            }
        }
    }
    // nested truncations give nondecreasing radii; guard against rounding
    let mut running = f64::NEG_INFINITY;
    for b in bounds.iter_mut() {
        running = running.max(b.log_radius);
        b.log_radius = running;
    }
    Ok(EntropyEstimate { value: running, bounds, status, tolerance: tol })
}
