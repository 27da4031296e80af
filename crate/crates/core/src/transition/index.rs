use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Label of a partition arc. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcIndex(Arc<str>);

impl ArcIndex {
    pub fn new(label: impl AsRef<str>) -> Self {
        ArcIndex(Arc::from(label.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ArcIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ArcIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for ArcIndex {
    fn from(s: &str) -> Self {
        ArcIndex::new(s)
    }
}

impl From<String> for ArcIndex {
    fn from(s: String) -> Self {
        ArcIndex(Arc::from(s))
    }
}

impl Borrow<str> for ArcIndex {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl Serialize for ArcIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for ArcIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer).map(ArcIndex::from)
    }
}

/// Renders a word as `[i0 i1 ...]`.
pub fn format_word(word: &[ArcIndex]) -> String {
    let inner: Vec<&str> = word.iter().map(ArcIndex::as_str).collect();
    format!("[{}]", inner.join(" "))
}
