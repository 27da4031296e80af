use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::transition::{ArcIndex, CountableMatrix};

type EntryRule<S> = Arc<dyn Fn(&ArcIndex) -> Option<S> + Send + Sync>;

#[derive(Clone)]
enum Entries<S> {
    Table { order: Vec<ArcIndex>, values: HashMap<ArcIndex, S> },
    Rule(EntryRule<S>),
}

/// Whether `Σ v_i` is known to be finite.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Summability<S> {
    /// Every entry is listed and the sum is exact (or exactly rounded).
    Summable { total: S },
    /// Partial sums over growing truncations keep increasing.
    NotSummable { partial: S, arcs: usize },
    Unknown,
}

/// A positive vector `v` with `Mv ≤ λv` and the per-row slopes `λ_i`.
///
/// Rows not listed in the deficiency map have `λ_i = λ`. Entries come from
/// a finite table or from a rule covering a countable index set.
#[derive(Clone)]
pub struct SubEigenvector<S> {
    pub lambda: S,
    entries: Entries<S>,
    deficiency: HashMap<ArcIndex, S>,
    pub sum: Summability<S>,
}

impl<S: Scalar> fmt::Debug for SubEigenvector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("SubEigenvector");
        d.field("lambda", &self.lambda);
        match &self.entries {
            Entries::Table { order, values } => {
                let listed: Vec<(&str, &S)> = order.iter().map(|a| (a.as_str(), &values[a])).collect();
                d.field("entries", &listed)
            }
            Entries::Rule(_) => d.field("entries", &"<rule>"),
        };
        d.field("deficiency", &self.deficiency).field("sum", &self.sum).finish()
    }
}

impl<S: Scalar> SubEigenvector<S> {
    /// Finite table; the sum is recorded as exact over the listed arcs.
    pub fn from_table(lambda: S, entries: Vec<(ArcIndex, S)>) -> Result<Self> {
        let mut order = Vec::with_capacity(entries.len());
        let mut values = HashMap::with_capacity(entries.len());
        let mut total = S::zero();
        for (a, v) in entries {
            if !(v > S::zero()) {
                return Err(Error::Precondition(format!("entry at `{a}` is {v}, must be positive")));
            }
            total = total + v.clone();
            if values.insert(a.clone(), v).is_some() {
                return Err(Error::Parameter(format!("duplicate entry for `{a}`")));
            }
            order.push(a);
        }
        Ok(SubEigenvector {
            lambda,
            entries: Entries::Table { order, values },
            deficiency: HashMap::new(),
            sum: Summability::Summable { total },
        })
    }

    /// Entries given by a rule over a possibly infinite index set.
    pub fn from_rule(lambda: S, rule: impl Fn(&ArcIndex) -> Option<S> + Send + Sync + 'static) -> Self {
        SubEigenvector {
            lambda,
            entries: Entries::Rule(Arc::new(rule)),
            deficiency: HashMap::new(),
            sum: Summability::Unknown,
        }
    }

    /// Records `λ_i` for a deficient row.
    pub fn with_slope(mut self, arc: ArcIndex, slope: S) -> Self {
        self.deficiency.insert(arc, slope);
        self
    }

    pub fn is_table(&self) -> bool {
        matches!(self.entries, Entries::Table { .. })
    }

    /// Listed arcs in insertion order; empty for rule vectors.
    pub fn arcs(&self) -> &[ArcIndex] {
        match &self.entries {
            Entries::Table { order, .. } => order,
            Entries::Rule(_) => &[],
        }
    }

    pub fn get(&self, arc: &ArcIndex) -> Option<S> {
        match &self.entries {
            Entries::Table { values, .. } => values.get(arc).cloned(),
            Entries::Rule(f) => f(arc),
        }
    }

    pub fn entry(&self, arc: &ArcIndex) -> Result<S> {
        self.get(arc).ok_or_else(|| Error::MissingEntry(arc.clone()))
    }

    /// `λ_i`: the recorded slope of a deficient row, `λ` otherwise.
    pub fn slope(&self, arc: &ArcIndex) -> S {
        self.deficiency.get(arc).cloned().unwrap_or_else(|| self.lambda.clone())
    }

    pub fn deficiency(&self) -> &HashMap<ArcIndex, S> {
        &self.deficiency
    }

    /// Deficient rows in a stable order.
    pub fn deficiency_set(&self) -> Vec<ArcIndex> {
        let mut set: Vec<ArcIndex> = self.deficiency.keys().cloned().collect();
        set.sort();
        set
    }

    /// Rescales a table vector to `Σ v_i = 1`.
    pub fn normalized(self) -> Result<Self> {
        let total = match &self.sum {
            Summability::Summable { total } => total.clone(),
            _ => return Err(Error::NotSummable("only summable vectors can be normalized".into())),
        };
        let (order, values) = match self.entries {
            Entries::Table { order, values } => (order, values),
            Entries::Rule(_) => return Err(Error::Unsupported("normalizing a rule vector".into())),
        };
        let values = values.into_iter().map(|(a, v)| (a, v / total.clone())).collect();
        Ok(SubEigenvector {
            lambda: self.lambda,
            entries: Entries::Table { order, values },
            deficiency: self.deficiency,
            sum: Summability::Summable { total: S::one() },
        })
    }

    /// Table of `(arc, v_i)` pairs; errors on rule vectors.
    pub fn table(&self) -> Result<Vec<(ArcIndex, S)>> {
        match &self.entries {
            Entries::Table { order, values } => Ok(order.iter().map(|a| (a.clone(), values[a].clone())).collect()),
            Entries::Rule(_) => Err(Error::Unsupported("rule vectors have no finite table".into())),
        }
    }

    /// Same vector with every entry mapped through `f`.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Send + Sync + Clone + 'static) -> SubEigenvector<T> {
        let entries = match &self.entries {
            Entries::Table { order, values } => Entries::Table {
                order: order.clone(),
                values: values.iter().map(|(a, v)| (a.clone(), f(v))).collect(),
            },
            Entries::Rule(rule) => {
                let rule = rule.clone();
                let g = f.clone();
                Entries::Rule(Arc::new(move |a: &ArcIndex| rule(a).map(|v| g(&v))))
            }
        };
        let sum = match &self.sum {
            Summability::Summable { total } => Summability::Summable { total: f(total) },
            Summability::NotSummable { partial, arcs } => Summability::NotSummable { partial: f(partial), arcs: *arcs },
            Summability::Unknown => Summability::Unknown,
        };
        SubEigenvector {
            lambda: f(&self.lambda),
            entries,
            deficiency: self.deficiency.iter().map(|(a, v)| (a.clone(), f(v))).collect(),
            sum,
        }
    }

    /// Copy with one entry shifted by `eps`, keeping the recorded slopes.
    pub fn perturbed(&self, arc: &ArcIndex, eps: S) -> Result<Self> {
        let mut out = self.clone();
        match &mut out.entries {
            Entries::Table { values, .. } => {
                let v = values.get_mut(arc).ok_or_else(|| Error::MissingEntry(arc.clone()))?;
                *v = v.clone() + eps.clone();
            }
            Entries::Rule(rule) => {
                let rule = rule.clone();
                let target = arc.clone();
                let eps = eps.clone();
                out.entries = Entries::Rule(Arc::new(move |a: &ArcIndex| {
                    rule(a).map(|v| if *a == target { v + eps.clone() } else { v })
                }));
            }
        }
        if let Summability::Summable { total } = &mut out.sum {
            *total = total.clone() + eps;
        }
        Ok(out)
    }

    /// Recomputes `λ_i = (Mv)_i / v_i` on `rows`, keeping only rows where it
    /// differs from `λ`.
    pub fn with_slopes_from(mut self, m: &dyn CountableMatrix, rows: &[ArcIndex]) -> Result<Self> {
        self.deficiency.clear();
        for i in rows {
            let vi = self.entry(i)?;
            let mut image = S::zero();
            for j in m.successors(i)? {
                image = image + self.entry(&j)?;
            }
            let slope = image / vi;
            if !slope.close_to(&self.lambda, 1e-12) {
                self.deficiency.insert(i.clone(), slope);
            }
        }
        Ok(self)
    }
}

/// Classification of one row of `Mv ≤ λv`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowClass {
    Eigen,
    Deficient,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowResidual<S> {
    pub arc: ArcIndex,
    /// `(Mv)_i`.
    pub image: S,
    /// `λ v_i`.
    pub bound: S,
    /// `λ v_i − (Mv)_i`.
    pub slack: S,
    pub class: RowClass,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport<S> {
    pub lambda: S,
    pub rows: Vec<RowResidual<S>>,
    /// `Σ v_i` over the checked rows.
    pub partial_sum: S,
    pub tolerance: f64,
}

impl<S: Scalar> ResidualReport<S> {
    pub fn is_subeigenvector(&self) -> bool {
        self.rows.iter().all(|r| r.class != RowClass::Violation)
    }

    pub fn is_eigenvector(&self) -> bool {
        self.rows.iter().all(|r| r.class == RowClass::Eigen)
    }

    pub fn deficient_rows(&self) -> Vec<&ArcIndex> {
        self.rows.iter().filter(|r| r.class == RowClass::Deficient).map(|r| &r.arc).collect()
    }

    pub fn row(&self, arc: &ArcIndex) -> Option<&RowResidual<S>> {
        self.rows.iter().find(|r| &r.arc == arc)
    }
}

/// Per-row residuals of `Mv ≤ λv`. Exact scalars compare with `==`; floats
/// treat slack within `tol·max(1, λv_i)` as equality.
pub fn check_subeigenvector<S: Scalar>(
    m: &dyn CountableMatrix,
    lambda: &S,
    v: &SubEigenvector<S>,
    rows: &[ArcIndex],
    tol: f64,
) -> Result<ResidualReport<S>> {
    let mut out = Vec::with_capacity(rows.len());
    let mut partial_sum = S::zero();
    for i in rows {
        let vi = v.entry(i)?;
        if !(vi > S::zero()) {
            return Err(Error::Precondition(format!("entry at `{i}` is {vi}, must be positive")));
        }
        partial_sum = partial_sum + vi.clone();
        let mut image = S::zero();
        for j in m.successors(i)? {
            image = image + v.entry(&j)?;
        }
        let bound = lambda.clone() * vi;
        let slack = bound.clone() - image.clone();
        let class = if image.close_to(&bound, tol) {
            RowClass::Eigen
        } else if slack > S::zero() {
            RowClass::Deficient
        } else {
            RowClass::Violation
        };
        out.push(RowResidual { arc: i.clone(), image, bound, slack, class });
    }
    Ok(ResidualReport { lambda: lambda.clone(), rows: out, partial_sum, tolerance: tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transition::FiniteMatrix;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn tent_half_vector_is_eigen() {
        let m = FiniteMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        let v = SubEigenvector::from_table(q(2, 1), vec![("0".into(), q(1, 2)), ("1".into(), q(1, 2))]).unwrap();
        let r = check_subeigenvector(&m, &q(2, 1), &v, m.labels(), 0.0).unwrap();
        assert!(r.is_eigenvector());
        assert_eq!(r.partial_sum, q(1, 1));
    }

    #[test]
    fn ones_at_one_and_a_half_violate() {
        let m = FiniteMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        let v = SubEigenvector::from_table(1.5, vec![("0".into(), 1.0), ("1".into(), 1.0)]).unwrap();
        let r = check_subeigenvector(&m, &1.5, &v, m.labels(), 1e-12).unwrap();
        assert!(r.rows.iter().all(|r| r.class == RowClass::Violation));
    }

    #[test]
    fn missing_entries_are_errors() {
        let m = FiniteMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        let v = SubEigenvector::from_table(2.0, vec![("0".into(), 1.0)]).unwrap();
        assert!(matches!(check_subeigenvector(&m, &2.0, &v, m.labels(), 1e-9), Err(Error::MissingEntry(_))));
    }

    #[test]
    fn normalization_and_slopes() {
        let m = FiniteMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        let v = SubEigenvector::from_table(q(3, 1), vec![("0".into(), q(2, 1)), ("1".into(), q(1, 1))])
            .unwrap()
            .with_slopes_from(&m, m.labels())
            .unwrap()
            .normalized()
            .unwrap();
        assert_eq!(v.entry(&"0".into()).unwrap(), q(2, 3));
        assert_eq!(v.slope(&"0".into()), q(3, 2));
        assert_eq!(v.slope(&"1".into()), q(3, 1));
        assert_eq!(v.deficiency_set(), vec![ArcIndex::from("0")]);
    }

    #[test]
    fn nonpositive_entry_rejected() {
        assert!(SubEigenvector::from_table(2.0, vec![("0".into(), 0.0)]).is_err());
    }
}
