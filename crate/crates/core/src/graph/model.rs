use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transition::{ArcIndex, CountableMatrix};

/// Vertex of the combinatorial graph: a partition endpoint or branchpoint.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(ArcIndex);

impl Vertex {
    pub fn new(label: impl AsRef<str>) -> Self {
        Vertex(ArcIndex::new(label))
    }

    pub fn as_str(&self) -> &str {
        self.0.as_str()
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

impl From<&str> for Vertex {
    fn from(s: &str) -> Self {
        Vertex::new(s)
    }
}

/// Direction in which an image path traverses an arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathStep {
    pub arc: ArcIndex,
    pub dir: Orientation,
}

impl PathStep {
    pub fn forward(arc: impl Into<ArcIndex>) -> Self {
        PathStep { arc: arc.into(), dir: Orientation::Forward }
    }

    pub fn reverse(arc: impl Into<ArcIndex>) -> Self {
        PathStep { arc: arc.into(), dir: Orientation::Reverse }
    }
}

/// Endpoints of an arc; `start` is the origin of its local coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcEnds {
    pub start: Vertex,
    pub end: Vertex,
}

impl ArcEnds {
    pub fn new(start: impl Into<Vertex>, end: impl Into<Vertex>) -> Self {
        ArcEnds { start: start.into(), end: end.into() }
    }

    /// First and last vertex when traversed in direction `dir`.
    pub fn oriented(&self, dir: Orientation) -> (&Vertex, &Vertex) {
        match dir {
            Orientation::Forward => (&self.start, &self.end),
            Orientation::Reverse => (&self.end, &self.start),
        }
    }
}

/// Rule-level description of a countably-Markov map.
///
/// Every valid arc can be queried, but only the enumeration prefix is ever
/// listed. Image paths are finite; preimage lists are finite.
pub trait MapRule: Send + Sync {
    fn family(&self) -> &str;

    /// Enumeration prefix of the partition.
    fn arcs(&self) -> &[ArcIndex];

    fn in_prefix(&self, arc: &ArcIndex) -> bool;

    fn contains(&self, arc: &ArcIndex) -> bool;

    fn ends(&self, arc: &ArcIndex) -> Result<ArcEnds>;

    /// Oriented edge path covered by the image of `arc`.
    fn image(&self, arc: &ArcIndex) -> Result<Vec<PathStep>>;

    /// Arcs whose image path contains `arc`.
    fn preimages(&self, arc: &ArcIndex) -> Result<Vec<ArcIndex>>;

    /// True when the prefix is the whole partition.
    fn is_finite(&self) -> bool;

    /// Vertex list given up front, for maps read from tables.
    fn declared_vertices(&self) -> Option<&[Vertex]> {
        None
    }
}

/// A countably-Markov map on a combinatorial graph.
#[derive(Clone)]
pub struct MarkovMapSpec {
    rule: Arc<dyn MapRule>,
}

impl fmt::Debug for MarkovMapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkovMapSpec")
            .field("family", &self.rule.family())
            .field("arcs", &self.rule.arcs().len())
            .finish()
    }
}

impl MarkovMapSpec {
    pub fn from_rule(rule: impl MapRule + 'static) -> Self {
        MarkovMapSpec { rule: Arc::new(rule) }
    }

    /// Finite map given by explicit tables. Structural problems are left to
    /// [`crate::graph::validate`]; only duplicate arc ids are rejected here.
    pub fn explicit(
        vertices: Vec<Vertex>,
        arcs: Vec<(ArcIndex, ArcEnds)>,
        images: Vec<(ArcIndex, Vec<PathStep>)>,
    ) -> Result<Self> {
        Ok(MarkovMapSpec { rule: Arc::new(ExplicitMap::new(vertices, arcs, images)?) })
    }

    pub fn family(&self) -> &str {
        self.rule.family()
    }

    pub fn arcs(&self) -> &[ArcIndex] {
        self.rule.arcs()
    }

    pub fn contains(&self, arc: &ArcIndex) -> bool {
        self.rule.contains(arc)
    }

    pub fn in_prefix(&self, arc: &ArcIndex) -> bool {
        self.rule.in_prefix(arc)
    }

    pub fn ends(&self, arc: &ArcIndex) -> Result<ArcEnds> {
        self.rule.ends(arc)
    }

    pub fn image(&self, arc: &ArcIndex) -> Result<Vec<PathStep>> {
        self.rule.image(arc)
    }

    pub fn preimages(&self, arc: &ArcIndex) -> Result<Vec<ArcIndex>> {
        self.rule.preimages(arc)
    }

    pub fn is_finite(&self) -> bool {
        self.rule.is_finite()
    }

    pub fn rule(&self) -> &dyn MapRule {
        &*self.rule
    }

    /// Combinatorial graph spanned by the prefix arcs.
    pub fn graph(&self) -> Result<GraphModel> {
        let mut arcs = Vec::with_capacity(self.arcs().len());
        let mut seen = HashSet::new();
        let mut vertices = Vec::new();
        for id in self.arcs() {
            let ends = self.ends(id)?;
            for v in [&ends.start, &ends.end] {
                if seen.insert(v.clone()) {
                    vertices.push(v.clone());
                }
            }
            arcs.push(GraphArc { id: id.clone(), ends });
        }
        Ok(GraphModel { vertices, arcs })
    }

    /// Image of a vertex under the induced vertex map, read off the first
    /// prefix arc incident to it.
    pub fn vertex_image(&self, arc: &ArcIndex, at_end: bool) -> Result<Vertex> {
        let path = self.image(arc)?;
        let step = if at_end { path.last() } else { path.first() };
        let step = step.ok_or_else(|| Error::InvalidSpec(format!("empty image for arc `{arc}`")))?;
        let ends = self.ends(&step.arc)?;
        let (first, last) = ends.oriented(step.dir);
        Ok(if at_end { last.clone() } else { first.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphArc {
    pub id: ArcIndex,
    pub ends: ArcEnds,
}

/// Finite (truncated) combinatorial graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphModel {
    pub vertices: Vec<Vertex>,
    pub arcs: Vec<GraphArc>,
}

impl GraphModel {
    /// Arcs incident to each vertex.
    pub fn incidence(&self) -> HashMap<Vertex, Vec<ArcIndex>> {
        let mut out: HashMap<Vertex, Vec<ArcIndex>> = HashMap::new();
        for a in &self.arcs {
            out.entry(a.ends.start.clone()).or_default().push(a.id.clone());
            out.entry(a.ends.end.clone()).or_default().push(a.id.clone());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let inc = self.incidence();
        let ends: HashMap<&ArcIndex, &ArcEnds> = self.arcs.iter().map(|a| (&a.id, &a.ends)).collect();
        let mut seen: BTreeSet<&Vertex> = BTreeSet::new();
        let mut stack = vec![&self.vertices[0]];
        seen.insert(&self.vertices[0]);
        while let Some(v) = stack.pop() {
            for arc in inc.get(v).into_iter().flatten() {
                let e = ends[arc];
                for w in [&e.start, &e.end] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

/// Transition matrix `m_ij = 1` iff arc `j` lies on the image path of arc `i`.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    spec: MarkovMapSpec,
}

impl TransitionMatrix {
    pub fn spec(&self) -> &MarkovMapSpec {
        &self.spec
    }
}

pub fn transition_matrix(spec: &MarkovMapSpec) -> TransitionMatrix {
    TransitionMatrix { spec: spec.clone() }
}

impl CountableMatrix for TransitionMatrix {
    fn successors(&self, i: &ArcIndex) -> Result<Vec<ArcIndex>> {
        let mut out: Vec<ArcIndex> = Vec::new();
        for step in self.spec.image(i)? {
            if !out.contains(&step.arc) {
                out.push(step.arc);
            }
        }
        Ok(out)
    }

    fn predecessors(&self, j: &ArcIndex) -> Result<Vec<ArcIndex>> {
        self.spec.preimages(j)
    }

    fn contains(&self, i: &ArcIndex) -> bool {
        self.spec.contains(i)
    }

    fn enumeration(&self) -> &[ArcIndex] {
        self.spec.arcs()
    }

    fn in_enumeration(&self, i: &ArcIndex) -> bool {
        self.spec.in_prefix(i)
    }

    fn is_finite(&self) -> bool {
        self.spec.is_finite()
    }
}

/// Map given by finite tables.
#[derive(Clone, Debug)]
pub struct ExplicitMap {
    vertices: Vec<Vertex>,
    order: Vec<ArcIndex>,
    ends: HashMap<ArcIndex, ArcEnds>,
    images: HashMap<ArcIndex, Vec<PathStep>>,
    preimages: HashMap<ArcIndex, Vec<ArcIndex>>,
}

impl ExplicitMap {
    pub fn new(
        vertices: Vec<Vertex>,
        arcs: Vec<(ArcIndex, ArcEnds)>,
        images: Vec<(ArcIndex, Vec<PathStep>)>,
    ) -> Result<Self> {
        let mut order = Vec::with_capacity(arcs.len());
        let mut ends = HashMap::with_capacity(arcs.len());
        for (id, e) in arcs {
            if ends.insert(id.clone(), e).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate arc id `{id}`")));
            }
            order.push(id);
        }
        let mut table = HashMap::new();
        for (id, path) in images {
            if !ends.contains_key(&id) {
                return Err(Error::InvalidSpec(format!("image given for unknown arc `{id}`")));
            }
            if table.insert(id.clone(), path).is_some() {
                return Err(Error::InvalidSpec(format!("two images given for arc `{id}`")));
            }
        }
        let mut preimages: HashMap<ArcIndex, Vec<ArcIndex>> = HashMap::new();
        for id in &order {
            for step in table.get(id).into_iter().flatten() {
                let list = preimages.entry(step.arc.clone()).or_default();
                if !list.contains(id) {
                    list.push(id.clone());
                }
            }
        }
        Ok(ExplicitMap { vertices, order, ends, images: table, preimages })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
}

impl MapRule for ExplicitMap {
    fn family(&self) -> &str {
        "explicit"
    }

    fn arcs(&self) -> &[ArcIndex] {
        &self.order
    }

    fn in_prefix(&self, arc: &ArcIndex) -> bool {
        self.ends.contains_key(arc)
    }

    fn contains(&self, arc: &ArcIndex) -> bool {
        self.ends.contains_key(arc)
    }

    fn ends(&self, arc: &ArcIndex) -> Result<ArcEnds> {
        self.ends.get(arc).cloned().ok_or_else(|| Error::UnknownIndex(arc.clone()))
    }

    fn image(&self, arc: &ArcIndex) -> Result<Vec<PathStep>> {
        if !self.contains(arc) {
            return Err(Error::UnknownIndex(arc.clone()));
        }
        Ok(self.images.get(arc).cloned().unwrap_or_default())
    }

    fn preimages(&self, arc: &ArcIndex) -> Result<Vec<ArcIndex>> {
        if !self.contains(arc) {
            return Err(Error::UnknownIndex(arc.clone()));
        }
        Ok(self.preimages.get(arc).cloned().unwrap_or_default())
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn declared_vertices(&self) -> Option<&[Vertex]> {
        Some(&self.vertices)
    }
}
