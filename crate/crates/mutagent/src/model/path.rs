//! Addresses of elements inside agent files.
//!
//! A [`DocumentPath`] is a slash-separated path into a parsed JSON document
//! tree (`/responses/0/affectedContexts/1/lifespan`). A [`Locator`] pairs a
//! path with the file it belongs to, which is the unit every finder, mutation
//! descriptor and diff entry speaks in.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;

/// Path into a JSON document tree. The empty path addresses the document root.
///
/// Segments are stored unescaped; `/` and `~` inside keys are escaped as `~1`
/// and `~0` when rendered, JSON-Pointer style.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DocumentPath {
    segments: Vec<String>,
}

impl DocumentPath {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn from_segments<I, S>(segments: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            segments: segments.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses the rendered form (`/a/0/b`). The empty string is the root.
    pub fn parse(s: &str) -> Self {
        if s.is_empty() || s == "/" {
            return Self::root();
        }
        let segments = s
            .trim_start_matches('/')
            .split('/')
            .map(|seg| seg.replace("~1", "/").replace("~0", "~"))
            .collect();
        Self { segments }
    }

    pub fn is_root(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn child(&self, segment: impl Into<String>) -> Self {
        let mut segments = self.segments.clone();
        segments.push(segment.into());
        Self { segments }
    }

    pub fn index(&self, idx: usize) -> Self {
        self.child(idx.to_string())
    }

    pub fn parent(&self) -> Option<(Self, &str)> {
        let (last, rest) = self.segments.split_last()?;
        Some((
            Self {
                segments: rest.to_vec(),
            },
            last.as_str(),
        ))
    }

    /// True when `self` addresses `other` or one of its ancestors.
    pub fn is_prefix_of(&self, other: &DocumentPath) -> bool {
        other.segments.len() >= self.segments.len()
            && other.segments[..self.segments.len()] == self.segments[..]
    }

    /// Walks the path inside `doc`, returning the addressed node.
    pub fn resolve<'a>(&self, doc: &'a Value) -> Option<&'a Value> {
        let mut node = doc;
        for seg in &self.segments {
            node = match node {
                Value::Object(map) => map.get(seg)?,
                Value::Array(items) => items.get(seg.parse::<usize>().ok()?)?,
                _ => return None,
            };
        }
        Some(node)
    }

    pub fn resolve_mut<'a>(&self, doc: &'a mut Value) -> Option<&'a mut Value> {
        let mut node = doc;
        for seg in &self.segments {
            node = match node {
                Value::Object(map) => map.get_mut(seg)?,
                Value::Array(items) => items.get_mut(seg.parse::<usize>().ok()?)?,
                _ => return None,
            };
        }
        Some(node)
    }

    /// Replaces the addressed node, returning the previous value.
    pub fn set(&self, doc: &mut Value, value: Value) -> Option<Value> {
        let node = self.resolve_mut(doc)?;
        Some(std::mem::replace(node, value))
    }

    /// Removes the addressed node from its parent container (object key or
    /// array element) and returns it. Root removal is not expressible here;
    /// whole-file removals are handled at the file level.
    pub fn remove(&self, doc: &mut Value) -> Option<Value> {
        let (parent_path, last) = self.parent()?;
        let parent = parent_path.resolve_mut(doc)?;
        match parent {
            Value::Object(map) => map.shift_remove(last),
            Value::Array(items) => {
                let idx = last.parse::<usize>().ok()?;
                if idx < items.len() {
                    Some(items.remove(idx))
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for DocumentPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for seg in &self.segments {
            write!(f, "/{}", seg.replace('~', "~0").replace('/', "~1"))?;
        }
        Ok(())
    }
}

impl Serialize for DocumentPath {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DocumentPath {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(Self::parse(&s))
    }
}

/// A document path qualified by the agent-relative file it points into.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Locator {
    /// Agent-relative file path with forward slashes.
    pub file: String,
    /// Path inside that file's document tree.
    pub path: DocumentPath,
}

impl Locator {
    pub fn new(file: impl Into<String>, path: DocumentPath) -> Self {
        Self {
            file: file.into(),
            path,
        }
    }

    pub fn file_root(file: impl Into<String>) -> Self {
        Self::new(file, DocumentPath::root())
    }

    pub fn child(&self, segment: impl Into<String>) -> Self {
        Self::new(self.file.clone(), self.path.child(segment))
    }

    pub fn index(&self, idx: usize) -> Self {
        Self::new(self.file.clone(), self.path.index(idx))
    }
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.path)
    }
}
