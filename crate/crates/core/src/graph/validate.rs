use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::model::{MarkovMapSpec, Vertex};
use crate::transition::ArcIndex;

/// A structural defect found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    LoopArc { arc: ArcIndex },
    EmptyImage { arc: ArcIndex },
    UnknownArc { arc: ArcIndex, in_image_of: ArcIndex },
    PathContinuity { arc: ArcIndex, position: usize },
    RepeatedArc { arc: ArcIndex, repeated: ArcIndex },
    RepeatedVertex { arc: ArcIndex, vertex: Vertex },
    InconsistentVertexImage { vertex: Vertex, first: Vertex, second: Vertex },
    UndeclaredVertex { arc: ArcIndex, vertex: Vertex },
    Disconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LoopArc { arc } => write!(f, "loop arc: `{arc}` has equal endpoints"),
            Violation::EmptyImage { arc } => write!(f, "empty image path for arc `{arc}`"),
            Violation::UnknownArc { arc, in_image_of } => {
                write!(f, "unknown arc `{arc}` in the image path of `{in_image_of}`")
            }
            Violation::PathContinuity { arc, position } => {
                write!(f, "path continuity violation in the image of `{arc}` at step {position}")
            }
            Violation::RepeatedArc { arc, repeated } => {
                write!(f, "repeated arc `{repeated}` in the image path of `{arc}`")
            }
            Violation::RepeatedVertex { arc, vertex } => {
                write!(f, "image path of `{arc}` revisits vertex `{vertex}`")
            }
            Violation::InconsistentVertexImage { vertex, first, second } => {
                write!(f, "inconsistent vertex images: `{vertex}` goes to both `{first}` and `{second}`")
            }
            Violation::UndeclaredVertex { arc, vertex } => {
                write!(f, "arc `{arc}` uses undeclared vertex `{vertex}`")
            }
            Violation::Disconnected => write!(f, "graph is not connected"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub arcs_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Structural check of a map spec over its enumeration prefix.
///
/// Image paths may leave the prefix for rule families; those arcs are
/// checked through the rule, not skipped.
pub fn validate(spec: &MarkovMapSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let mut vertex_map: HashMap<Vertex, Vertex> = HashMap::new();
    let mut note_vertex = |v: &Vertex, image: &Vertex, out: &mut Vec<Violation>| match vertex_map.get(v) {
        Some(prev) if prev != image => {
            let clash = Violation::InconsistentVertexImage {
                vertex: v.clone(),
                first: prev.clone(),
                second: image.clone(),
            };
            if !out.contains(&clash) {
                out.push(clash);
            }
        }
        Some(_) => {}
        None => {
            vertex_map.insert(v.clone(), image.clone());
        }
    };

    let declared: Option<HashSet<Vertex>> = spec.rule().declared_vertices().map(|v| v.iter().cloned().collect());

    for arc in spec.arcs() {
        let ends = match spec.ends(arc) {
            Ok(e) => e,
            Err(_) => continue,
        };
        if ends.start == ends.end {
            violations.push(Violation::LoopArc { arc: arc.clone() });
        }
        if let Some(declared) = &declared {
            for v in [&ends.start, &ends.end] {
                if !declared.contains(v) {
                    violations.push(Violation::UndeclaredVertex { arc: arc.clone(), vertex: v.clone() });
                }
            }
        }
        let path = match spec.image(arc) {
            Ok(p) => p,
            Err(_) => {
                violations.push(Violation::EmptyImage { arc: arc.clone() });
                continue;
            }
        };
        if path.is_empty() {
            violations.push(Violation::EmptyImage { arc: arc.clone() });
            continue;
        }
        let mut seen_arcs = HashSet::new();
        let mut walk: Vec<Vertex> = Vec::with_capacity(path.len() + 1);
        let mut broken = false;
        for (pos, step) in path.iter().enumerate() {
            if !spec.contains(&step.arc) {
                violations.push(Violation::UnknownArc { arc: step.arc.clone(), in_image_of: arc.clone() });
                broken = true;
                continue;
            }
            if !seen_arcs.insert(step.arc.clone()) {
                violations.push(Violation::RepeatedArc { arc: arc.clone(), repeated: step.arc.clone() });
            }
            let step_ends = match spec.ends(&step.arc) {
                Ok(e) => e,
                Err(_) => continue,
            };
            let (first, last) = step_ends.oriented(step.dir);
            match walk.last() {
                None => walk.push(first.clone()),
                Some(prev) if prev == first => {}
                Some(_) => {
                    violations.push(Violation::PathContinuity { arc: arc.clone(), position: pos });
                    broken = true;
                    walk.push(first.clone());
                }
            }
            walk.push(last.clone());
        }
        if broken {
            continue;
        }
        let mut seen_vertices = HashSet::new();
        for v in &walk {
            if !seen_vertices.insert(v) {
                violations.push(Violation::RepeatedVertex { arc: arc.clone(), vertex: v.clone() });
                break;
            }
        }
        note_vertex(&ends.start, &walk[0], &mut violations);
        note_vertex(&ends.end, walk.last().unwrap(), &mut violations);
    }

    match spec.graph() {
        Ok(g) if !g.is_connected() => violations.push(Violation::Disconnected),
        _ => {}
    }
    ValidationReport { arcs_checked: spec.arcs().len(), violations }
}
