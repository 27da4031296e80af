use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;

use super::point::PointCoord;
use crate::error::{Error, Result};
use crate::graph::{transition_matrix, CylinderWord, Orientation, Vertex};
use crate::scalar::Scalar;
use crate::slope::{evaluate_model, ConstantSlopeModel};
use crate::transition::ArcIndex;

/// The orbit met a partition point shared by several arcs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ambiguity {
    pub step: usize,
    pub vertex: Vertex,
    pub candidates: Vec<ArcIndex>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Itinerary<S> {
    pub word: CylinderWord,
    pub orbit: Vec<PointCoord<S>>,
    /// First step at which the letter was not determined.
    pub ambiguous: Option<Ambiguity>,
}

/// Letters `i0 ... in` with `f^k(x)` in arc `i_k`.
///
/// Points on a vertex with a single incident arc are unambiguous; other
/// vertices are flagged and the canonical arc is used to continue.
pub fn itinerary<S: Scalar>(model: &ConstantSlopeModel<S>, x: &PointCoord<S>, n: usize) -> Result<Itinerary<S>> {
    model.check_point(x)?;
    let mut word = Vec::with_capacity(n + 1);
    let mut orbit = Vec::with_capacity(n + 1);
    let mut ambiguous = None;
    let mut cur = x.clone();
    for k in 0..=n {
        if k > 0 {
            cur = evaluate_model(model, &cur)?;
        }
        if let Some(v) = model.point_vertex(&cur)? {
            let arcs = model.incident(&v);
            if arcs.len() > 1 && ambiguous.is_none() {
                ambiguous = Some(Ambiguity { step: k, vertex: v.clone(), candidates: arcs.to_vec() });
            }
            cur = model.vertex_point(&v)?;
        }
        word.push(cur.arc.clone());
        orbit.push(cur.clone());
    }
    let m = transition_matrix(model.spec());
    let word = CylinderWord::new(&m, word)?;
    Ok(Itinerary { word, orbit, ambiguous })
}

/// Endpoints of the cylinder `[i0 ... in]` inside arc `i0`, lower offset first.
pub fn psi_cylinder<S: Scalar>(
    model: &ConstantSlopeModel<S>,
    word: &CylinderWord,
) -> Result<(PointCoord<S>, PointCoord<S>)> {
    if !word.admissible {
        return Err(Error::Inadmissible(word.to_string()));
    }
    let letters = &word.word;
    let mut lo = S::zero();
    let mut hi = model.length(word.last())?;
    for k in (0..letters.len() - 1).rev() {
        let (from, to) = (&letters[k], &letters[k + 1]);
        let mut before = S::zero();
        let mut placed = None;
        for step in model.spec().image(from)? {
            let len = model.length(&step.arc)?;
            if &step.arc == to {
                placed = Some(match step.dir {
                    Orientation::Forward => (before.clone() + lo.clone(), before.clone() + hi.clone()),
                    Orientation::Reverse => (
                        before.clone() + len.clone() - hi.clone(),
                        before.clone() + len.clone() - lo.clone(),
                    ),
                });
                break;
            }
            before = before + len;
        }
        let (a, b) = placed.ok_or_else(|| Error::Inadmissible(word.to_string()))?;
        let slope = model.slope(from)?;
        lo = a / slope.clone();
        hi = b / slope;
    }
    Ok((PointCoord { arc: letters[0].clone(), offset: lo }, PointCoord { arc: letters[0].clone(), offset: hi }))
}

/// `ρ(x, y)` bracket; the bounds agree on finite partitions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoBracket<S> {
    pub lower: S,
    pub upper: S,
}

impl<S: Scalar> RhoBracket<S> {
    pub fn value(&self) -> &S {
        &self.upper
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

struct Item<S> {
    dist: S,
    node: usize,
}

impl<S: PartialOrd> PartialEq for Item<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist
    }
}
impl<S: PartialOrd> Eq for Item<S> {}
impl<S: PartialOrd> PartialOrd for Item<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: PartialOrd> Ord for Item<S> {
    // reversed for a min-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.partial_cmp(&self.dist).unwrap_or(Ordering::Equal)
    }
}

/// Shortest connecting path in the length metric of the model: arcs
/// weigh their lengths and the end pieces their partial lengths.
pub fn rho_distance<S: Scalar>(
    model: &ConstantSlopeModel<S>,
    x: &PointCoord<S>,
    y: &PointCoord<S>,
) -> Result<RhoBracket<S>> {
    model.check_point(x)?;
    model.check_point(y)?;
    let graph = model.spec().graph()?;
    let index: HashMap<&Vertex, usize> = graph.vertices.iter().enumerate().map(|(k, v)| (v, k)).collect();
    let n = graph.vertices.len();
    let (sx, sy) = (n, n + 1);
    let mut adj: Vec<Vec<(usize, S)>> = vec![Vec::new(); n + 2];
    for arc in &graph.arcs {
        let (a, b) = (index[&arc.ends.start], index[&arc.ends.end]);
        let len = model.length(&arc.id)?;
        adj[a].push((b, len.clone()));
        adj[b].push((a, len));
    }
    for (node, p) in [(sx, x), (sy, y)] {
        let ends = model.spec().ends(&p.arc)?;
        let len = model.length(&p.arc)?;
        let (a, b) = (index[&ends.start], index[&ends.end]);
        adj[node].push((a, p.offset.clone()));
        adj[a].push((node, p.offset.clone()));
        adj[node].push((b, len.clone() - p.offset.clone()));
        adj[b].push((node, len - p.offset.clone()));
    }
    if x.arc == y.arc {
        let d = (x.offset.clone() - y.offset.clone()).abs();
        adj[sx].push((sy, d.clone()));
        adj[sy].push((sx, d));
    }
    let mut dist: Vec<Option<S>> = vec![None; n + 2];
    dist[sx] = Some(S::zero());
    let mut heap = BinaryHeap::from([Item { dist: S::zero(), node: sx }]);
    while let Some(Item { dist: d, node }) = heap.pop() {
        if dist[node].as_ref().is_some_and(|best| *best < d) {
            continue;
        }
        if node == sy {
            break;
        }
        for (next, w) in &adj[node] {
            let cand = d.clone() + w.clone();
            if dist[*next].as_ref().is_none_or(|best| cand < *best) {
                dist[*next] = Some(cand.clone());
                heap.push(Item { dist: cand, node: *next });
            }
        }
    }
    let d = dist[sy].clone().ok_or_else(|| Error::Parameter("points lie in different components".into()))?;
    Ok(RhoBracket { lower: d.clone(), upper: d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::full_shift;
    use crate::slope::{build_constant_slope_model, SubEigenvector};

    fn tent() -> ConstantSlopeModel<f64> {
        let v = SubEigenvector::from_table(2.0, vec![("0".into(), 0.5), ("1".into(), 0.5)]).unwrap();
        build_constant_slope_model(&full_shift(2).unwrap(), &v).unwrap()
    }

    #[test]
    fn tent_itinerary_of_point_three() {
        // 0.3 → 0.6 → 0.8 → 0.4
        let it = itinerary(&tent(), &PointCoord::new("0", 0.3), 3).unwrap();
        let letters: Vec<&str> = it.word.word.iter().map(|a| a.as_str()).collect();
        assert_eq!(letters, vec!["0", "1", "1", "0"]);
        assert!(it.ambiguous.is_none());
    }

    #[test]
    fn fixed_endpoint_has_constant_word() {
        let it = itinerary(&tent(), &PointCoord::new("0", 0.0), 5).unwrap();
        assert!(it.word.word.iter().all(|a| a.as_str() == "0"));
        assert!(it.ambiguous.is_none());
    }

    #[test]
    fn turning_point_is_ambiguous() {
        let it = itinerary(&tent(), &PointCoord::new("0", 0.5), 2).unwrap();
        let amb = it.ambiguous.unwrap();
        assert_eq!(amb.step, 0);
        assert_eq!(amb.candidates.len(), 2);
    }

    #[test]
    fn left_cylinders_shrink_by_half() {
        let m = transition_matrix(tent().spec());
        let w = CylinderWord::new(&m, vec!["0".into(); 4]).unwrap();
        let (a, b) = psi_cylinder(&tent(), &w).unwrap();
        assert_eq!((a.offset, b.offset), (0.0, 0.5 / 8.0));
    }

    #[test]
    fn rho_on_the_interval() {
        let t = tent();
        let d = rho_distance(&t, &PointCoord::new("0", 0.1), &PointCoord::new("1", 0.2)).unwrap();
        assert!((d.value() - 0.6).abs() < 1e-15);
        assert!(d.is_exact());
        let z = rho_distance(&t, &PointCoord::new("0", 0.5), &PointCoord::new("1", 0.0)).unwrap();
        assert_eq!(*z.value(), 0.0);
        let e = rho_distance(&t, &PointCoord::new("0", 0.0), &PointCoord::new("0", 0.5)).unwrap();
        assert_eq!(*e.value(), 0.5);
    }
}
