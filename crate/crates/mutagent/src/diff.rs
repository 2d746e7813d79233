//! Structural diff between two JSON document trees.
//!
//! Reports the minimal set of locations where two documents disagree. Arrays
//! whose lengths differ by one are checked for a single insertion or removal
//! before falling back to reporting the whole array as changed, which is the
//! granularity mutation descriptors speak in.
//!
//! This module deliberately shares no code with the mutation applier: tests
//! use it as an independent check that a mutant differs from its source at
//! exactly the declared locations.

use crate::model::DocumentPath;
use serde_json::Value;
use std::collections::BTreeSet;

/// One difference between two documents.
#[derive(Debug, Clone, PartialEq)]
pub enum DiffEntry {
    Changed {
        path: DocumentPath,
        from: Value,
        to: Value,
    },
    Removed {
        path: DocumentPath,
        value: Value,
    },
    Added {
        path: DocumentPath,
        value: Value,
    },
}

impl DiffEntry {
    pub fn path(&self) -> &DocumentPath {
        match self {
            DiffEntry::Changed { path, .. }
            | DiffEntry::Removed { path, .. }
            | DiffEntry::Added { path, .. } => path,
        }
    }
}

/// Diffs two documents, returning every location where they disagree.
pub fn diff(original: &Value, mutated: &Value) -> Vec<DiffEntry> {
    let mut out = Vec::new();
    walk(&DocumentPath::root(), original, mutated, &mut out);
    out
}

fn walk(path: &DocumentPath, original: &Value, mutated: &Value, out: &mut Vec<DiffEntry>) {
    match (original, mutated) {
        (Value::Object(a), Value::Object(b)) => {
            let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
            for key in keys {
                match (a.get(key), b.get(key)) {
                    (Some(av), Some(bv)) => walk(&path.child(key.clone()), av, bv, out),
                    (Some(av), None) => out.push(DiffEntry::Removed {
                        path: path.child(key.clone()),
                        value: av.clone(),
                    }),
                    (None, Some(bv)) => out.push(DiffEntry::Added {
                        path: path.child(key.clone()),
                        value: bv.clone(),
                    }),
                    (None, None) => unreachable!(),
                }
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() => {
            for (i, (av, bv)) in a.iter().zip(b).enumerate() {
                walk(&path.index(i), av, bv, out);
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() + 1 => {
            match single_removal_index(a, b) {
                Some(idx) => out.push(DiffEntry::Removed {
                    path: path.index(idx),
                    value: a[idx].clone(),
                }),
                None => out.push(DiffEntry::Changed {
                    path: path.clone(),
                    from: original.clone(),
                    to: mutated.clone(),
                }),
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() + 1 == b.len() => {
            match single_removal_index(b, a) {
                Some(idx) => out.push(DiffEntry::Added {
                    path: path.index(idx),
                    value: b[idx].clone(),
                }),
                None => out.push(DiffEntry::Changed {
                    path: path.clone(),
                    from: original.clone(),
                    to: mutated.clone(),
                }),
            }
        }
        _ if original == mutated => {}
        _ => out.push(DiffEntry::Changed {
            path: path.clone(),
            from: original.clone(),
            to: mutated.clone(),
        }),
    }
}

/// Index `idx` such that `longer` minus its element at `idx` equals `shorter`,
/// if exactly such a removal explains the difference. The smallest such index
/// is returned.
fn single_removal_index(longer: &[Value], shorter: &[Value]) -> Option<usize> {
    debug_assert_eq!(longer.len(), shorter.len() + 1);
    (0..longer.len()).find(|&idx| longer[..idx] == shorter[..idx] && longer[idx + 1..] == shorter[idx..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn equal_documents_have_empty_diff() {
        let doc = json!({"a": [1, {"b": 2}], "c": null});
        assert!(diff(&doc, &doc.clone()).is_empty());
    }

    #[test]
    fn scalar_change_is_reported_at_its_path() {
        let a = json!({"responses": [{"priority": 5}]});
        let b = json!({"responses": [{"priority": 2}]});
        let d = diff(&a, &b);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].path().to_string(), "/responses/0/priority");
    }

    #[test]
    fn removed_key_is_reported() {
        let a = json!({"name": "x", "priority": 5});
        let b = json!({"priority": 5});
        let d = diff(&a, &b);
        assert_eq!(
            d,
            vec![DiffEntry::Removed {
                path: DocumentPath::parse("/name"),
                value: json!("x"),
            }]
        );
    }

    #[test]
    fn removed_array_element_is_localized() {
        let a = json!(["a", "b", "c"]);
        let b = json!(["a", "c"]);
        let d = diff(&a, &b);
        assert_eq!(
            d,
            vec![DiffEntry::Removed {
                path: DocumentPath::parse("/1"),
                value: json!("b"),
            }]
        );
    }

    #[test]
    fn ambiguous_removal_picks_smallest_index() {
        // Removing either "a" yields the same array; index 0 is reported.
        let a = json!(["a", "a"]);
        let b = json!(["a"]);
        let d = diff(&a, &b);
        assert_eq!(d[0].path().to_string(), "/0");
    }

    #[test]
    fn unexplainable_length_change_falls_back_to_whole_array() {
        let a = json!([1, 2, 3]);
        let b = json!([4, 5]);
        let d = diff(&a, &b);
        assert_eq!(d.len(), 1);
        assert!(d[0].path().is_root());
    }

    #[test]
    fn type_change_is_a_single_change() {
        let a = json!({"speech": "hi"});
        let b = json!({"speech": ["hi"]});
        let d = diff(&a, &b);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].path().to_string(), "/speech");
    }
}
