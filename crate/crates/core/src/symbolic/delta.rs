use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::CylinderWord;
use crate::scalar::Scalar;
use crate::slope::SubEigenvector;
use crate::transition::{ArcIndex, CountableMatrix};

/// `Δ([i0 ... in]) = v_in / (λ_i0 ⋯ λ_i(n-1))`, the cylinder length in the
/// model built from `v`.
pub fn delta<S: Scalar>(word: &CylinderWord, v: &SubEigenvector<S>) -> Result<S> {
    if !word.admissible {
        return Err(Error::Inadmissible(word.to_string()));
    }
    delta_of(&word.word, v)
}

pub(crate) fn delta_of<S: Scalar>(word: &[ArcIndex], v: &SubEigenvector<S>) -> Result<S> {
    let (last, head) = word.split_last().ok_or_else(|| Error::Parameter("empty word".into()))?;
    let vn = v.entry(last)?;
    if !(vn > S::zero()) {
        return Err(Error::Precondition(format!("entry at `{last}` is {vn}, must be positive")));
    }
    let mut denom = S::one();
    for a in head {
        denom = denom * v.slope(a);
    }
    Ok(vn / denom)
}

/// A region given as a union of cylinders.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Gamma {
    /// Every arc of the enumeration prefix.
    Whole,
    /// Union of whole partition arcs.
    Arcs { arcs: Vec<ArcIndex> },
    /// Union of admissible cylinders, each of level at most `n`.
    Cylinders { words: Vec<CylinderWord> },
    /// A subarc given by offsets; accepted only in cylinder-aligned form.
    Interval { arc: ArcIndex, from: f64, to: f64 },
}

/// `A_n(γ)`: total `Δ` of the level-`n` cylinders inside `γ`.
///
/// Cylinders may leave the enumeration prefix after their first letter;
/// later letters are followed through the matrix rule.
pub fn arc_measure_n<S: Scalar>(
    m: &dyn CountableMatrix,
    v: &SubEigenvector<S>,
    gamma: &Gamma,
    n: usize,
) -> Result<S> {
    let words: Vec<CylinderWord> = match gamma {
        Gamma::Whole => m
            .enumeration()
            .iter()
            .map(|a| CylinderWord { word: vec![a.clone()], admissible: true })
            .collect(),
        Gamma::Arcs { arcs } => arcs
            .iter()
            .map(|a| {
                if m.contains(a) {
                    Ok(CylinderWord { word: vec![a.clone()], admissible: true })
                } else {
                    Err(Error::UnknownIndex(a.clone()))
                }
            })
            .collect::<Result<_>>()?,
        Gamma::Cylinders { words } => words.clone(),
        Gamma::Interval { arc, from, to } => {
            return Err(Error::Unsupported(format!(
                "subarc [{from}, {to}] of `{arc}` is not given as a union of cylinders"
            )))
        }
    };
    let mut memo = HashMap::new();
    let mut total = S::zero();
    for w in &words {
        if !w.admissible {
            return Err(Error::Inadmissible(w.to_string()));
        }
        let level = w.level();
        if level > n {
            return Err(Error::Unsupported(format!("cylinder {w} is finer than level {n}")));
        }
        // Δ(w u) summed over extensions u = Δ-prefix factor times G_{n-level}(last)
        let mut factor = S::one();
        for a in &w.word[..level] {
            factor = factor / v.slope(a);
        }
        total = total + factor * extension_mass(m, v, w.last(), n - level, &mut memo)?;
    }
    Ok(total)
}

// G_0(i) = v_i, G_k(i) = (1/λ_i) Σ_{j ∈ succ(i)} G_{k-1}(j)
fn extension_mass<S: Scalar>(
    m: &dyn CountableMatrix,
    v: &SubEigenvector<S>,
    i: &ArcIndex,
    k: usize,
    memo: &mut HashMap<(ArcIndex, usize), S>,
) -> Result<S> {
    if k == 0 {
        return v.entry(i);
    }
    if let Some(x) = memo.get(&(i.clone(), k)) {
        return Ok(x.clone());
    }
    let mut sum = S::zero();
    for j in m.successors(i)? {
        sum = sum + extension_mass(m, v, &j, k - 1, memo)?;
    }
    let out = sum / v.slope(i);
    memo.insert((i.clone(), k), out.clone());
    Ok(out)
}

/// Outcome of [`delta_identities_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck<S> {
    /// `Σ_j Δ([w j]) = Δ(w)` over all successors `j` of the last letter.
    pub refinement: bool,
    /// `Δ([i1 ... in]) = λ_i0 Δ([i0 ... in])`; vacuous for one-letter words.
    pub shift: bool,
    pub delta: S,
    pub children_sum: S,
}

impl<S> IdentityCheck<S> {
    pub fn passed(&self) -> bool {
        self.refinement && self.shift
    }
}

/// Checks the refinement and shift identities of `Δ` at `word`; exact
/// scalars compare with `==`, floats to `1e-12` relative.
pub fn delta_identities_check<S: Scalar>(
    m: &dyn CountableMatrix,
    v: &SubEigenvector<S>,
    word: &CylinderWord,
) -> Result<IdentityCheck<S>> {
    let d = delta(word, v)?;
    let mut children_sum = S::zero();
    let mut child = word.word.clone();
    for j in m.successors(word.last())? {
        child.push(j);
        children_sum = children_sum + delta_of(&child, v)?;
        child.pop();
    }
    let refinement = children_sum.close_to(&d, 1e-12);
    let shift = match word.shift() {
        None => true,
        Some(tail) => delta_of(&tail.word, v)?.close_to(&(v.slope(word.first()) * d.clone()), 1e-12),
    };
    Ok(IdentityCheck { refinement, shift, delta: d, children_sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{full_shift, transition_matrix};
    use num_rational::BigRational;

    fn half_tent() -> SubEigenvector<BigRational> {
        let h = BigRational::from_ratio(1, 2);
        SubEigenvector::from_table(BigRational::from_ratio(2, 1), vec![("0".into(), h.clone()), ("1".into(), h)])
            .unwrap()
    }

    #[test]
    fn one_letter_word_is_the_entry() {
        let w = CylinderWord { word: vec!["1".into()], admissible: true };
        assert_eq!(delta(&w, &half_tent()).unwrap(), BigRational::from_ratio(1, 2));
    }

    #[test]
    fn tent_two_letters() {
        let w = CylinderWord { word: vec!["0".into(), "1".into()], admissible: true };
        assert_eq!(delta(&w, &half_tent()).unwrap(), BigRational::from_ratio(1, 4));
    }

    #[test]
    fn tent_arc_measure() {
        let m = transition_matrix(&full_shift(2).unwrap());
        let g = Gamma::Arcs { arcs: vec!["0".into()] };
        assert_eq!(arc_measure_n(&m, &half_tent(), &g, 2).unwrap(), BigRational::from_ratio(1, 2));
        assert_eq!(arc_measure_n(&m, &half_tent(), &Gamma::Whole, 7).unwrap(), BigRational::from_ratio(1, 1));
    }

    #[test]
    fn interval_gamma_unsupported() {
        let m = transition_matrix(&full_shift(2).unwrap());
        let g = Gamma::Interval { arc: "0".into(), from: 0.1, to: 0.2 };
        assert!(matches!(arc_measure_n(&m, &half_tent(), &g, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn perturbation_breaks_refinement() {
        let m = transition_matrix(&full_shift(2).unwrap());
        let v = half_tent().perturbed(&"1".into(), BigRational::from_ratio(1, 100)).unwrap();
        let w = CylinderWord { word: vec!["0".into()], admissible: true };
        let c = delta_identities_check(&m, &v, &w).unwrap();
        assert!(!c.refinement);
    }
}
