use super::model::{ArcEnds, MarkovMapSpec, Orientation, PathStep, Vertex};
use crate::error::{Error, Result};
use crate::transition::ArcIndex;

/// Markov interval map on `[p0, pN]` with arcs `"0"`..`"N-1"` left to right.
///
/// Row `i` of `rows` must be a contiguous block of ones; arc `i` is mapped
/// over that block increasing or decreasing according to `orientations[i]`.
pub fn interval_map(rows: &[Vec<u8>], orientations: &[Orientation]) -> Result<MarkovMapSpec> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidSpec("interval map needs at least one arc".into()));
    }
    if orientations.len() != n {
        return Err(Error::InvalidSpec(format!("{} orientations for {n} arcs", orientations.len())));
    }
    let vertices: Vec<Vertex> = (0..=n).map(|k| Vertex::new(format!("p{k}"))).collect();
    let mut arcs = Vec::with_capacity(n);
    let mut images = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidSpec(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        let id = ArcIndex::new(i.to_string());
        arcs.push((id.clone(), ArcEnds { start: vertices[i].clone(), end: vertices[i + 1].clone() }));
        let hits: Vec<usize> = (0..n).filter(|&j| row[j] != 0).collect();
        let (lo, hi) = match (hits.first(), hits.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Err(Error::InvalidSpec(format!("row {i} is empty"))),
        };
        if hits.len() != hi - lo + 1 || row.iter().any(|&e| e > 1) {
            return Err(Error::InvalidSpec(format!("row {i} is not a contiguous 0/1 block")));
        }
        let path = match orientations[i] {
            Orientation::Forward => (lo..=hi).map(|j| PathStep::forward(j.to_string().as_str())).collect(),
            Orientation::Reverse => (lo..=hi).rev().map(|j| PathStep::reverse(j.to_string().as_str())).collect(),
        };
        images.push((id, path));
    }
    MarkovMapSpec::explicit(vertices, arcs, images)
}

/// Full `n`-shift realized as the `n`-lap tent map; laps alternate
/// increasing and decreasing, starting increasing.
pub fn full_shift(n: usize) -> Result<MarkovMapSpec> {
    if n == 0 {
        return Err(Error::Parameter("full shift needs at least one symbol".into()));
    }
    let rows = vec![vec![1u8; n]; n];
    let orientations: Vec<Orientation> =
        (0..n).map(|k| if k % 2 == 0 { Orientation::Forward } else { Orientation::Reverse }).collect();
    interval_map(&rows, &orientations)
}

/// Golden-mean map: arc 0 decreasing over both arcs, arc 1 increasing onto arc 0.
pub fn golden_mean() -> MarkovMapSpec {
    interval_map(&[vec![1, 1], vec![1, 0]], &[Orientation::Reverse, Orientation::Forward])
        .expect("golden-mean table is well formed")
}

/// Orientations of the laps of an interval built-in, read off its images.
pub fn lap_orientations(spec: &MarkovMapSpec) -> Result<Vec<Orientation>> {
    spec.arcs()
        .iter()
        .map(|a| {
            let path = spec.image(a)?;
            path.first().map(|s| s.dir).ok_or_else(|| Error::InvalidSpec(format!("empty image for `{a}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{transition_matrix, validate};
    use crate::transition::{CountableMatrix, FiniteMatrix};

    fn dense(spec: &MarkovMapSpec) -> Vec<Vec<u8>> {
        let m = transition_matrix(spec);
        FiniteMatrix::principal(&m, spec.arcs().to_vec()).unwrap().to_dense()
    }

    #[test]
    fn tent_is_all_ones_and_valid() {
        let tent = full_shift(2).unwrap();
        assert!(validate(&tent).passed());
        assert_eq!(dense(&tent), vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn golden_mean_matrix() {
        let g = golden_mean();
        assert!(validate(&g).passed(), "{:?}", validate(&g));
        assert_eq!(dense(&g), vec![vec![1, 1], vec![1, 0]]);
        let m = transition_matrix(&g);
        assert_eq!(m.predecessors(&"1".into()).unwrap(), vec![ArcIndex::from("0")]);
    }

    #[test]
    fn larger_shifts_validate() {
        for n in 1..6 {
            assert!(validate(&full_shift(n).unwrap()).passed(), "n = {n}");
        }
    }

    #[test]
    fn non_contiguous_row_rejected() {
        let rows = vec![vec![1, 0, 1], vec![1, 1, 1], vec![1, 1, 1]];
        let o = [Orientation::Forward; 3];
        assert!(interval_map(&rows, &o).is_err());
    }

    #[test]
    fn inconsistent_orientations_are_reported() {
        // both laps increasing over everything: p1 goes to p2 and to p0
        let spec = interval_map(&[vec![1, 1], vec![1, 1]], &[Orientation::Forward; 2]).unwrap();
        let report = validate(&spec);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, crate::graph::Violation::InconsistentVertexImage { .. })));
    }
}
