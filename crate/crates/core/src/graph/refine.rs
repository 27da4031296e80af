use serde::Serialize;

use super::model::{transition_matrix, MarkovMapSpec};
use crate::error::{Error, Result};
use crate::transition::{format_word, ArcIndex, CountableMatrix};

/// Word `[i0 ... in]`; admissible when every consecutive pair is a transition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CylinderWord {
    pub word: Vec<ArcIndex>,
    pub admissible: bool,
}

impl CylinderWord {
    /// Checks admissibility against `m`; unknown letters are an error.
    pub fn new(m: &dyn CountableMatrix, word: Vec<ArcIndex>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::Parameter("a cylinder word needs at least one letter".into()));
        }
        for a in &word {
            if !m.contains(a) {
                return Err(Error::UnknownIndex(a.clone()));
            }
        }
        let mut admissible = true;
        for w in word.windows(2) {
            if m.entry(&w[0], &w[1])? == 0 {
                admissible = false;
                break;
            }
        }
        Ok(CylinderWord { word, admissible })
    }

    /// Level of the cylinder: number of letters minus one.
    pub fn level(&self) -> usize {
        self.word.len() - 1
    }

    pub fn first(&self) -> &ArcIndex {
        &self.word[0]
    }

    pub fn last(&self) -> &ArcIndex {
        self.word.last().expect("nonempty word")
    }

    /// Word with the first letter dropped (the image cylinder).
    pub fn shift(&self) -> Option<CylinderWord> {
        (self.word.len() > 1).then(|| CylinderWord { word: self.word[1..].to_vec(), admissible: self.admissible })
    }

    pub fn extend(&self, next: ArcIndex) -> CylinderWord {
        let mut word = self.word.clone();
        word.push(next);
        CylinderWord { word, admissible: self.admissible }
    }

    pub fn prefix(&self, letters: usize) -> CylinderWord {
        CylinderWord { word: self.word[..letters].to_vec(), admissible: self.admissible }
    }
}

impl std::fmt::Display for CylinderWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_word(&self.word))
    }
}

/// Level-`n` cylinders, possibly cut short by the budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refinement {
    pub level: usize,
    pub words: Vec<CylinderWord>,
    pub complete: bool,
}

/// All admissible words of `n + 1` letters inside the enumeration prefix,
/// in lexicographic order of (enumeration, successor order).
pub fn refinement(spec: &MarkovMapSpec, n: usize, budget: usize) -> Result<Refinement> {
    refine_matrix(&transition_matrix(spec), n, budget)
}

/// As [`refinement`], directly on a matrix.
pub fn refine_matrix(m: &dyn CountableMatrix, n: usize, budget: usize) -> Result<Refinement> {
    let mut words = Vec::new();
    let mut complete = true;
    let mut stack: Vec<ArcIndex> = Vec::with_capacity(n + 1);
    'outer: for start in m.enumeration() {
        stack.clear();
        stack.push(start.clone());
        if !extend(m, n, budget, &mut stack, &mut words)? {
            complete = false;
            break 'outer;
        }
    }
    Ok(Refinement { level: n, words, complete })
}

// depth-first extension; returns false when the budget runs out
fn extend(
    m: &dyn CountableMatrix,
    n: usize,
    budget: usize,
    stack: &mut Vec<ArcIndex>,
    out: &mut Vec<CylinderWord>,
) -> Result<bool> {
    if stack.len() == n + 1 {
        if out.len() >= budget {
            return Ok(false);
        }
        out.push(CylinderWord { word: stack.clone(), admissible: true });
        return Ok(true);
    }
    let last = stack.last().expect("nonempty stack").clone();
    for next in m.successors(&last)? {
        if !m.in_enumeration(&next) {
            continue;
        }
        stack.push(next);
        let ok = extend(m, n, budget, stack, out)?;
        stack.pop();
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Words `[j i1 ... i(n-1) j]`, each a subarc of `j` covering `j` under `f^n`.
pub fn loop_words(m: &dyn CountableMatrix, j: &ArcIndex, n: usize, budget: usize) -> Result<Refinement> {
    if n == 0 {
        return Err(Error::Parameter("loop length must be at least 1".into()));
    }
    if !m.contains(j) {
        return Err(Error::UnknownIndex(j.clone()));
    }
    // prune with backward reachability so only words that close up are explored
    let mut reach: Vec<std::collections::HashSet<ArcIndex>> = vec![std::collections::HashSet::new(); n + 1];
    reach[0].insert(j.clone());
    for k in 1..=n {
        let (done, rest) = reach.split_at_mut(k);
        for a in &done[k - 1] {
            for p in m.predecessors(a)? {
                rest[0].insert(p);
            }
        }
    }
    let mut words = Vec::new();
    let mut stack = vec![j.clone()];
    let complete = loop_extend(m, n, budget, &reach, &mut stack, &mut words)?;
    Ok(Refinement { level: n, words, complete })
}

fn loop_extend(
    m: &dyn CountableMatrix,
    n: usize,
    budget: usize,
    reach: &[std::collections::HashSet<ArcIndex>],
    stack: &mut Vec<ArcIndex>,
    out: &mut Vec<CylinderWord>,
) -> Result<bool> {
    let len = stack.len();
    if len == n + 1 {
        if out.len() >= budget {
            return Ok(false);
        }
        out.push(CylinderWord { word: stack.clone(), admissible: true });
        return Ok(true);
    }
    let remaining = n + 1 - len - 1;
    let last = stack.last().expect("nonempty stack").clone();
    for next in m.successors(&last)? {
        if !reach[remaining].contains(&next) {
            continue;
        }
        stack.push(next);
        let ok = loop_extend(m, n, budget, reach, stack, out)?;
        stack.pop();
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{full_shift, golden_mean};

    #[test]
    fn level_zero_is_the_partition() {
        let g = golden_mean();
        let r = refinement(&g, 0, 100).unwrap();
        let letters: Vec<_> = r.words.iter().map(|w| w.word[0].clone()).collect();
        assert_eq!(letters, g.arcs().to_vec());
    }

    #[test]
    fn counts_match_matrix_powers() {
        assert_eq!(refinement(&full_shift(2).unwrap(), 1, 100).unwrap().words.len(), 4);
        assert_eq!(refinement(&golden_mean(), 2, 100).unwrap().words.len(), 5);
    }

    #[test]
    fn budget_cut_is_flagged() {
        let r = refinement(&full_shift(2).unwrap(), 5, 10).unwrap();
        assert!(!r.complete);
        assert_eq!(r.words.len(), 10);
    }

    #[test]
    fn inadmissible_word_detected() {
        let m = transition_matrix(&golden_mean());
        let w = CylinderWord::new(&m, vec!["1".into(), "1".into()]).unwrap();
        assert!(!w.admissible);
        assert!(CylinderWord::new(&m, vec!["7".into()]).is_err());
    }

    #[test]
    fn loop_words_of_tent() {
        let m = transition_matrix(&full_shift(2).unwrap());
        let r = loop_words(&m, &"0".into(), 2, 10).unwrap();
        let shown: Vec<String> = r.words.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, vec!["[0 0 0]", "[0 1 0]"]);
    }
}
