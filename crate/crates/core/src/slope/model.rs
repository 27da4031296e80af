use std::collections::HashMap;

use serde::Serialize;

use super::vector::{SubEigenvector, Summability};
use crate::error::{Error, Result};
use crate::graph::{transition_matrix, MarkovMapSpec, Orientation, Vertex};
use crate::scalar::Scalar;
use crate::symbolic::PointCoord;
use crate::transition::{ArcIndex, CountableMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeMode {
    /// Every piece has slope `λ`.
    Constant,
    /// Slopes `λ_i ≤ λ`, strict on the deficiency set.
    Bounded,
}

/// Piecewise-affine model: arc `i` has length `v_i` and is stretched by `λ_i`
/// along its image path.
#[derive(Clone, Debug)]
pub struct ConstantSlopeModel<S> {
    spec: MarkovMapSpec,
    lambda: S,
    lengths: HashMap<ArcIndex, S>,
    slopes: HashMap<ArcIndex, S>,
    mode: SlopeMode,
    vertex_map: HashMap<Vertex, Vertex>,
    // first incident prefix arc, and whether the vertex is its end
    representative: HashMap<Vertex, (ArcIndex, bool)>,
    incident: HashMap<Vertex, Vec<ArcIndex>>,
}

impl<S: Scalar> ConstantSlopeModel<S> {
    pub fn spec(&self) -> &MarkovMapSpec {
        &self.spec
    }

    pub fn lambda(&self) -> &S {
        &self.lambda
    }

    pub fn mode(&self) -> SlopeMode {
        self.mode
    }

    pub fn arcs(&self) -> &[ArcIndex] {
        self.spec.arcs()
    }

    pub fn length(&self, arc: &ArcIndex) -> Result<S> {
        self.lengths.get(arc).cloned().ok_or_else(|| Error::UnknownIndex(arc.clone()))
    }

    pub fn slope(&self, arc: &ArcIndex) -> Result<S> {
        self.slopes.get(arc).cloned().ok_or_else(|| Error::UnknownIndex(arc.clone()))
    }

    /// Total length of the arcs on the image path of `arc`.
    pub fn image_length(&self, arc: &ArcIndex) -> Result<S> {
        let mut total = S::zero();
        for step in self.spec.image(arc)? {
            total = total + self.length(&step.arc)?;
        }
        Ok(total)
    }

    pub fn vertex_image(&self, v: &Vertex) -> Option<&Vertex> {
        self.vertex_map.get(v)
    }

    /// Arcs incident to `v`, in enumeration order.
    pub fn incident(&self, v: &Vertex) -> &[ArcIndex] {
        self.incident.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Canonical coordinates of a vertex.
    pub fn vertex_point(&self, v: &Vertex) -> Result<PointCoord<S>> {
        let (arc, at_end) = self
            .representative
            .get(v)
            .ok_or_else(|| Error::Parameter(format!("unknown vertex `{v}`")))?;
        let offset = if *at_end { self.length(arc)? } else { S::zero() };
        Ok(PointCoord { arc: arc.clone(), offset })
    }

    /// The vertex at `x`, if `x` is an arc endpoint.
    pub fn point_vertex(&self, x: &PointCoord<S>) -> Result<Option<Vertex>> {
        let len = self.length(&x.arc)?;
        let ends = self.spec.ends(&x.arc)?;
        Ok(if x.offset.is_zero() {
            Some(ends.start)
        } else if x.offset == len {
            Some(ends.end)
        } else {
            None
        })
    }

    /// Endpoint offsets resolved to the vertex representative.
    pub fn canonical(&self, x: PointCoord<S>) -> Result<PointCoord<S>> {
        match self.point_vertex(&x)? {
            Some(v) => self.vertex_point(&v),
            None => Ok(x),
        }
    }

    pub fn check_point(&self, x: &PointCoord<S>) -> Result<()> {
        let len = self.length(&x.arc)?;
        if x.offset < S::zero() || x.offset > len {
            return Err(Error::Parameter(format!("offset {} outside [0, {}] on `{}`", x.offset, len, x.arc)));
        }
        Ok(())
    }
}

/// Builds the model with lengths `v` (normalized to total length 1) and
/// slopes `λ_i = (Mv)_i / v_i`.
///
/// Requires a summable vector with finitely many deficient rows; a finite
/// spec must be covered by a table vector.
pub fn build_constant_slope_model<S: Scalar>(
    spec: &MarkovMapSpec,
    v: &SubEigenvector<S>,
) -> Result<ConstantSlopeModel<S>> {
    let m = transition_matrix(spec);
    if !v.is_table() {
        let verdict = summability(&m, v, &SummabilityOptions::default())?;
        return Err(Error::NotSummable(match verdict {
            Summability::NotSummable { partial, arcs } => format!(
                "partial sums reach {} over {arcs} arcs and keep growing; a conjugate model needs a summable vector",
                partial.cell()
            ),
            _ => "a conjugate model needs a summable vector with finitely many entries listed".into(),
        }));
    }
    if !spec.is_finite() {
        return Err(Error::Unsupported("models are built on finite partitions only".into()));
    }
    let v = v.clone().normalized()?;
    let mut lengths = HashMap::new();
    for a in spec.arcs() {
        lengths.insert(a.clone(), v.entry(a)?);
    }
    let mut slopes = HashMap::new();
    let mut constant = true;
    for a in spec.arcs() {
        let mut image = S::zero();
        for step in spec.image(a)? {
            image = image + lengths.get(&step.arc).cloned().ok_or_else(|| Error::MissingEntry(step.arc.clone()))?;
        }
        let slope = image / lengths[a].clone();
        if slope.close_to(&v.lambda, 1e-12) {
            slopes.insert(a.clone(), v.lambda.clone());
        } else if slope < v.lambda {
            constant = false;
            slopes.insert(a.clone(), slope);
        } else {
            return Err(Error::Precondition(format!(
                "row `{a}` has slope {slope} above lambda = {}",
                v.lambda
            )));
        }
    }
    let graph = spec.graph()?;
    let mut representative = HashMap::new();
    let mut vertex_map = HashMap::new();
    for arc in &graph.arcs {
        for (vert, at_end) in [(&arc.ends.start, false), (&arc.ends.end, true)] {
            representative.entry(vert.clone()).or_insert((arc.id.clone(), at_end));
            if !vertex_map.contains_key(vert) {
                vertex_map.insert(vert.clone(), spec.vertex_image(&arc.id, at_end)?);
            }
        }
    }
    let mut incident: HashMap<Vertex, Vec<ArcIndex>> = HashMap::new();
    for arc in &graph.arcs {
        incident.entry(arc.ends.start.clone()).or_default().push(arc.id.clone());
        incident.entry(arc.ends.end.clone()).or_default().push(arc.id.clone());
    }
    Ok(ConstantSlopeModel {
        spec: spec.clone(),
        lambda: v.lambda.clone(),
        lengths,
        slopes,
        mode: if constant { SlopeMode::Constant } else { SlopeMode::Bounded },
        vertex_map,
        representative,
        incident,
    })
}

/// The model map: an interior point of arc `i` at offset `t` goes to
/// offset `λ_i t` along the image path. Endpoints go through the vertex map.
pub fn evaluate_model<S: Scalar>(model: &ConstantSlopeModel<S>, x: &PointCoord<S>) -> Result<PointCoord<S>> {
    model.check_point(x)?;
    if let Some(v) = model.point_vertex(x)? {
        let image = model
            .vertex_image(&v)
            .ok_or_else(|| Error::Parameter(format!("vertex `{v}` has no image")))?;
        return model.vertex_point(image);
    }
    let mut s = model.slope(&x.arc)? * x.offset.clone();
    let path = model.spec.image(&x.arc)?;
    let last = path.len() - 1;
    for (k, step) in path.iter().enumerate() {
        let len = model.length(&step.arc)?;
        if s <= len || k == last {
            let offset = match step.dir {
                Orientation::Forward => s,
                Orientation::Reverse => len - s,
            };
            return model.canonical(PointCoord { arc: step.arc.clone(), offset });
        }
        s = s - len;
    }
    unreachable!("image paths are nonempty")
}

/// Limits for the summability heuristic.
#[derive(Clone, Debug)]
pub struct SummabilityOptions {
    pub ceiling: f64,
}

impl Default for SummabilityOptions {
    fn default() -> Self {
        SummabilityOptions { ceiling: 1e12 }
    }
}

/// Partial sums of `v` over enumeration prefixes of length `1, 2, 4, ...`.
/// Increments that fail to shrink, or a sum above the ceiling, mean the
/// vector is not summable at this truncation.
pub fn summability<S: Scalar>(
    m: &dyn CountableMatrix,
    v: &SubEigenvector<S>,
    opts: &SummabilityOptions,
) -> Result<Summability<S>> {
    if v.is_table() {
        return Ok(v.sum.clone());
    }
    let arcs = m.enumeration();
    if arcs.is_empty() {
        return Err(Error::Parameter("empty enumeration".into()));
    }
    let mut sums: Vec<(usize, S)> = Vec::new();
    let mut total = S::zero();
    let mut next = 1;
    for (k, a) in arcs.iter().enumerate() {
        total = total + v.entry(a)?;
        if k + 1 == next {
            if total.to_f64() > opts.ceiling {
                return Ok(Summability::NotSummable { partial: total, arcs: next });
            }
            sums.push((next, total.clone()));
            next *= 2;
        }
    }
    let incs: Vec<f64> = sums.windows(2).map(|w| w[1].1.to_f64() - w[0].1.to_f64()).collect();
    let (arcs, partial) = sums.last().cloned().expect("at least one prefix");
    if incs.len() >= 2 {
        let tail = &incs[incs.len() - 2..];
        if tail[1] >= tail[0] && tail[1] > 0.0 {
            return Ok(Summability::NotSummable { partial, arcs });
        }
    }
    Ok(Summability::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{example1, full_shift, golden_mean};
    use crate::slope::{example1_eigenvector, exact_perron_vector};
    use crate::transition::FiniteMatrix;
    use num_rational::BigRational;

    fn half_tent() -> SubEigenvector<BigRational> {
        let h = BigRational::from_ratio(1, 2);
        SubEigenvector::from_table(BigRational::from_ratio(2, 1), vec![("0".into(), h.clone()), ("1".into(), h)])
            .unwrap()
    }

    #[test]
    fn tent_model_is_the_tent_map() {
        let model = build_constant_slope_model(&full_shift(2).unwrap(), &half_tent()).unwrap();
        assert_eq!(model.mode(), SlopeMode::Constant);
        let q = |n, d| BigRational::from_ratio(n, d);
        let x = PointCoord::new("0", q(1, 5));
        assert_eq!(evaluate_model(&model, &x).unwrap(), PointCoord::new("0", q(2, 5)));
        assert_eq!(evaluate_model(&model, &PointCoord::new("0", q(0, 1))).unwrap(), PointCoord::new("0", q(0, 1)));
        // turning point p1 goes to p2, the end of arc 1
        let top = evaluate_model(&model, &PointCoord::new("1", q(0, 1))).unwrap();
        assert_eq!(top, PointCoord::new("1", q(1, 2)));
        // arc 1 is decreasing: offset 1/8 maps to 1 − 1/4
        let y = evaluate_model(&model, &PointCoord::new("1", q(1, 8))).unwrap();
        assert_eq!(y, PointCoord::new("1", q(1, 4)));
    }

    #[test]
    fn golden_model_lengths() {
        let g = golden_mean();
        let a = FiniteMatrix::principal(&transition_matrix(&g), g.arcs().to_vec()).unwrap();
        let v = exact_perron_vector(&a).unwrap();
        let model = build_constant_slope_model(&g, &v).unwrap();
        let phi = model.lambda().clone();
        let l0 = model.length(&"0".into()).unwrap();
        assert_eq!(l0.clone() * (phi.clone() + crate::scalar::Quadratic::from_ratio(1, 1)), phi);
        for a in g.arcs() {
            assert_eq!(model.image_length(a).unwrap(), phi.clone() * model.length(a).unwrap());
        }
    }

    #[test]
    fn example1_is_rejected_as_not_summable() {
        let spec = example1(8).unwrap();
        let v = example1_eigenvector::<BigRational>();
        assert!(matches!(build_constant_slope_model(&spec, &v), Err(Error::NotSummable(_))));
    }

    #[test]
    fn offsets_out_of_range_rejected() {
        let model = build_constant_slope_model(&full_shift(2).unwrap(), &half_tent()).unwrap();
        assert!(evaluate_model(&model, &PointCoord::new("0", BigRational::from_ratio(3, 4))).is_err());
    }
}
