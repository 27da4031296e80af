use std::fmt;

use serde::Serialize;

use crate::scalar::Scalar;
use crate::transition::ArcIndex;

/// A point of the model: offset from the `start` endpoint of `arc`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCoord<S> {
    pub arc: ArcIndex,
    pub offset: S,
}

impl<S: Scalar> PointCoord<S> {
    pub fn new(arc: impl Into<ArcIndex>, offset: S) -> Self {
        PointCoord { arc: arc.into(), offset }
    }
}

impl<S: Scalar> fmt::Display for PointCoord<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.arc, self.offset.cell())
    }
}
