use serde::Serialize;

use super::model::{build_constant_slope_model, summability, ConstantSlopeModel, SummabilityOptions};
use super::vector::{SubEigenvector, Summability};
use crate::error::{Error, Result};
use crate::graph::{transition_matrix, CylinderWord, MarkovMapSpec};
use crate::scalar::Scalar;
use crate::symbolic::delta_of;
use crate::transition::{ArcIndex, CountableMatrix, EntropyEstimate};

/// A nested cylinder chain whose `Δ` does not shrink: its intersection would
/// be an arc of positive length, so the model is not mixing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitCylinderWarning<S> {
    pub word: CylinderWord,
    /// `Δ` at level `n/2`.
    pub delta_half: S,
    /// `Δ` at level `n`.
    pub delta_end: S,
}

impl<S: Scalar> std::fmt::Display for LimitCylinderWarning<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "positive-length limit cylinder: chain from `{}` keeps delta {} at level {}",
            self.word.first(),
            self.delta_end.to_f64(),
            self.word.level()
        )
    }
}

/// Follows, from each of the first `starts` enumerated arcs, the successor
/// that keeps `Δ` largest for `n_max` steps. A chain whose final `Δ` is at
/// least half its mid-level `Δ` is reported.
pub fn limit_cylinder_scan<S: Scalar>(
    m: &dyn CountableMatrix,
    v: &SubEigenvector<S>,
    n_max: usize,
    starts: usize,
) -> Result<Vec<LimitCylinderWarning<S>>> {
    if n_max < 2 {
        return Err(Error::Parameter("scan depth must be at least 2".into()));
    }
    let mut out = Vec::new();
    for start in m.enumeration().iter().take(starts) {
        let mut word = vec![start.clone()];
        let mut deltas = vec![delta_of(&word, v)?];
        let mut stuck = false;
        for _ in 0..n_max {
            let last = word.last().expect("nonempty").clone();
            let mut best: Option<(ArcIndex, S)> = None;
            for j in m.successors(&last)? {
                word.push(j.clone());
                let d = delta_of(&word, v)?;
                word.pop();
                if best.as_ref().is_none_or(|(_, b)| d > *b) {
                    best = Some((j, d));
                }
            }
            match best {
                Some((j, d)) => {
                    word.push(j);
                    deltas.push(d);
                }
                None => {
                    stuck = true;
                    break;
                }
            }
        }
        if stuck {
            continue;
        }
        let half = deltas[n_max / 2].clone();
        let end = deltas[n_max].clone();
        if end.clone() + end.clone() >= half && end > S::zero() {
            out.push(LimitCylinderWarning {
                word: CylinderWord { word, admissible: true },
                delta_half: half,
                delta_end: end,
            });
        }
    }
    Ok(out)
}

/// Outcome of trying to build a conjugate model from `v`.
#[derive(Debug)]
pub struct SlopeAnalysis<S> {
    pub model: Option<ConstantSlopeModel<S>>,
    pub error: Option<Error>,
    pub summability: Summability<S>,
    pub warnings: Vec<LimitCylinderWarning<S>>,
}

/// Runs the summability check, the limit-cylinder scan and, when possible,
/// the model construction.
pub fn analyze_slope<S: Scalar>(spec: &MarkovMapSpec, v: &SubEigenvector<S>, n_max: usize) -> Result<SlopeAnalysis<S>> {
    let m = transition_matrix(spec);
    let sum = summability(&m, v, &SummabilityOptions::default())?;
    let warnings = limit_cylinder_scan(&m, v, n_max, 64)?;
    let (model, error) = match build_constant_slope_model(spec, v) {
        Ok(model) => (Some(model), None),
        Err(e) => (None, Some(e)),
    };
    Ok(SlopeAnalysis { model, error, summability: sum, warnings })
}

/// Entropy against `HD · log⁺ Lip` for a piecewise-affine model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    /// Hausdorff dimension in the length metric; 1 for countably affine graphs.
    pub hausdorff_dimension: f64,
    pub lipschitz: f64,
    /// `HD · log⁺ Lip`.
    pub product: f64,
    pub entropy: f64,
    /// `log Lip − entropy`.
    pub gap: f64,
    pub epsilon: f64,
    /// `product < entropy + ε`.
    pub holds: bool,
}

/// Lipschitz constant of the model is its largest slope.
pub fn lipschitz_report<S: Scalar>(
    model: &ConstantSlopeModel<S>,
    entropy: &EntropyEstimate,
    epsilon: f64,
) -> Result<LipschitzReport> {
    if !(epsilon > 0.0) {
        return Err(Error::Parameter(format!("epsilon {epsilon} must be positive")));
    }
    let mut lip = f64::NEG_INFINITY;
    for a in model.arcs() {
        lip = lip.max(model.slope(a)?.to_f64());
    }
    let log_lip = lip.ln();
    if log_lip < entropy.value - entropy.tolerance {
        return Err(Error::Precondition(format!(
            "log Lip = {log_lip} is below the entropy lower bound {}",
            entropy.value
        )));
    }
    let hd = 1.0;
    let product = hd * log_lip.max(0.0);
    Ok(LipschitzReport {
        hausdorff_dimension: hd,
        lipschitz: lip,
        product,
        entropy: entropy.value,
        gap: log_lip - entropy.value,
        epsilon,
        holds: product < entropy.value + epsilon,
    })
}
