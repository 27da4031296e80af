use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::ArcIndex;
use crate::error::{Error, Result};

/// A 0/1 matrix over a countable index set, accessed through rules.
///
/// Rows may be long, columns are always finite: `predecessors` must return
/// a finite list for every valid index. Only a finite prefix of the index set
/// is ever enumerated.
pub trait CountableMatrix: Send + Sync {
    /// Arcs `j` with `m_ij = 1`, in a fixed order.
    fn successors(&self, i: &ArcIndex) -> Result<Vec<ArcIndex>>;

    /// Arcs `i` with `m_ij = 1`.
    fn predecessors(&self, j: &ArcIndex) -> Result<Vec<ArcIndex>>;

    /// True if `i` is a valid index, whether or not it lies in the prefix.
    fn contains(&self, i: &ArcIndex) -> bool;

    /// The finite enumeration prefix of the index set, in enumeration order.
    fn enumeration(&self) -> &[ArcIndex];

    fn in_enumeration(&self, i: &ArcIndex) -> bool {
        self.enumeration().contains(i)
    }

    /// True when the enumeration is the whole index set.
    fn is_finite(&self) -> bool;

    fn entry(&self, i: &ArcIndex, j: &ArcIndex) -> Result<u8> {
        if !self.contains(j) {
            return Err(Error::UnknownIndex(j.clone()));
        }
        Ok(self.successors(i)?.contains(j) as u8)
    }
}

/// Square 0/1 matrix over a finite, labelled index subset.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteMatrix {
    labels: Vec<ArcIndex>,
    #[serde(skip)]
    position: HashMap<ArcIndex, usize>,
    succ: Vec<Vec<usize>>,
    #[serde(skip)]
    pred: Vec<Vec<usize>>,
}

impl FiniteMatrix {
    /// Builds from successor lists given as positions.
    pub fn from_successors(labels: Vec<ArcIndex>, succ: Vec<Vec<usize>>) -> Result<Self> {
        if labels.len() != succ.len() {
            return Err(Error::Parameter(format!(
                "{} labels for {} rows",
                labels.len(),
                succ.len()
            )));
        }
        let mut position = HashMap::with_capacity(labels.len());
        for (p, label) in labels.iter().enumerate() {
            if position.insert(label.clone(), p).is_some() {
                return Err(Error::Parameter(format!("duplicate label `{label}`")));
            }
        }
        let n = labels.len();
        let mut pred = vec![Vec::new(); n];
        let mut succ = succ;
        for (i, row) in succ.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            for &j in row.iter() {
                if j >= n {
                    return Err(Error::Parameter(format!("column {j} out of range")));
                }
                pred[j].push(i);
            }
        }
        Ok(FiniteMatrix { labels, position, succ, pred })
    }

    /// Builds from a dense 0/1 array.
    pub fn from_dense(labels: Vec<ArcIndex>, rows: &[Vec<u8>]) -> Result<Self> {
        let n = labels.len();
        let mut succ = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parameter(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            let mut out = Vec::new();
            for (j, &e) in row.iter().enumerate() {
                match e {
                    0 => {}
                    1 => out.push(j),
                    _ => return Err(Error::Parameter(format!("entry ({i},{j}) = {e} is not 0/1"))),
                }
            }
            succ.push(out);
        }
        Self::from_successors(labels, succ)
    }

    /// Dense matrix with labels `"0"`, `"1"`, ...
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| ArcIndex::new(i.to_string())).collect();
        Self::from_dense(labels, rows)
    }

    /// Principal submatrix of `m` on `set` (order preserved).
    pub fn principal(m: &dyn CountableMatrix, set: Vec<ArcIndex>) -> Result<Self> {
        let index: HashMap<&ArcIndex, usize> = set.iter().enumerate().map(|(p, l)| (l, p)).collect();
        let mut succ = Vec::with_capacity(set.len());
        for label in &set {
            let row = m
                .successors(label)?
                .iter()
                .filter_map(|j| index.get(j).copied())
                .collect();
            succ.push(row);
        }
        drop(index);
        Self::from_successors(set, succ)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[ArcIndex] {
        &self.labels
    }

    pub fn label(&self, p: usize) -> &ArcIndex {
        &self.labels[p]
    }

    pub fn position(&self, label: &ArcIndex) -> Option<usize> {
        self.position.get(label).copied()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.pred[j]
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.succ[i].binary_search(&j).is_ok() as u8
    }

    pub fn nnz(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.size())
            .map(|i| (0..self.size()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, row) in self.succ.iter().enumerate() {
            y[i] = row.iter().map(|&j| x[j]).sum();
        }
    }

    /// Submatrix on the given positions, in the given order.
    pub fn restrict(&self, positions: &[usize]) -> FiniteMatrix {
        let local: HashMap<usize, usize> = positions.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let labels = positions.iter().map(|&p| self.labels[p].clone()).collect();
        let succ = positions
            .iter()
            .map(|&p| self.succ[p].iter().filter_map(|j| local.get(j).copied()).collect())
            .collect();
        Self::from_successors(labels, succ).expect("restriction of a valid matrix")
    }
}

impl CountableMatrix for FiniteMatrix {
    fn successors(&self, i: &ArcIndex) -> Result<Vec<ArcIndex>> {
        let p = self.position(i).ok_or_else(|| Error::UnknownIndex(i.clone()))?;
        Ok(self.succ[p].iter().map(|&j| self.labels[j].clone()).collect())
    }

    fn predecessors(&self, j: &ArcIndex) -> Result<Vec<ArcIndex>> {
        let p = self.position(j).ok_or_else(|| Error::UnknownIndex(j.clone()))?;
        Ok(self.pred[p].iter().map(|&i| self.labels[i].clone()).collect())
    }

    fn contains(&self, i: &ArcIndex) -> bool {
        self.position.contains_key(i)
    }

    fn enumeration(&self) -> &[ArcIndex] {
        &self.labels
    }

    fn in_enumeration(&self, i: &ArcIndex) -> bool {
        self.contains(i)
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// Principal submatrix on the arcs reachable from `base` in at most `depth`
/// successor steps without leaving the enumeration prefix.
///
/// Truncations are nested: a larger depth never drops an arc.
pub fn truncation(m: &dyn CountableMatrix, depth: usize, base: &ArcIndex) -> Result<FiniteMatrix> {
    let set = reachable_ball(m, depth, base)?;
    FiniteMatrix::principal(m, set)
}

/// Breadth-first ball used by [`truncation`], in discovery order.
pub fn reachable_ball(m: &dyn CountableMatrix, depth: usize, base: &ArcIndex) -> Result<Vec<ArcIndex>> {
    if !m.contains(base) {
        return Err(Error::UnknownIndex(base.clone()));
    }
    if !m.in_enumeration(base) {
        return Err(Error::EmptyTruncation(base.clone()));
    }
    let mut seen: HashSet<ArcIndex> = HashSet::new();
    let mut order = vec![base.clone()];
    seen.insert(base.clone());
    let mut frontier = VecDeque::from([(base.clone(), 0usize)]);
    while let Some((i, d)) = frontier.pop_front() {
        if d == depth {
            continue;
        }
        for j in m.successors(&i)? {
            if !seen.contains(&j) && m.in_enumeration(&j) {
                seen.insert(j.clone());
                order.push(j.clone());
                frontier.push_back((j, d + 1));
            }
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip() {
        let rows = vec![vec![1, 1, 0], vec![0, 0, 1], vec![1, 0, 0]];
        let m = FiniteMatrix::from_rows(&rows).unwrap();
        assert_eq!(m.to_dense(), rows);
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.predecessors(&"0".into()).unwrap(), vec![ArcIndex::from("0"), "2".into()]);
    }

    #[test]
    fn rejects_non_binary_entries() {
        assert!(FiniteMatrix::from_rows(&[vec![2]]).is_err());
        assert!(FiniteMatrix::from_rows(&[vec![1, 0]]).is_err());
    }

    #[test]
    fn truncation_of_finite_matrix_is_whole_matrix_at_diameter() {
        let rows = vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]];
        let m = FiniteMatrix::from_rows(&rows).unwrap();
        let t = truncation(&m, 2, &"0".into()).unwrap();
        assert_eq!(t.size(), 3);
        assert_eq!(t.to_dense(), rows);
        let small = truncation(&m, 1, &"0".into()).unwrap();
        assert_eq!(small.labels(), &[ArcIndex::from("0"), "1".into()]);
    }

    #[test]
    fn unknown_base_is_an_error() {
        let m = FiniteMatrix::from_rows(&[vec![1]]).unwrap();
        assert!(matches!(truncation(&m, 1, &"x".into()), Err(Error::UnknownIndex(_))));
    }
}
