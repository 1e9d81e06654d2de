//! JSON graph description:
//! `{"vertices":[{"id":"v1","genus":1}],"edges":[{"id":"e1","u":"v1","v":"v2","length":"3/2"}]}`.
//! Lengths are strings `"p/q"` or integers.

use serde::{Deserialize, Serialize};

use super::{GraphError, PmGraph};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawVertex {
    pub id: String,
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEdge {
    pub id: String,
    pub u: String,
    pub v: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub length: Rational,
}

/// Unvalidated graph description as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RawGraph {
    pub vertices: Vec<RawVertex>,
    #[serde(default)]
    pub edges: Vec<RawEdge>,
}

impl RawGraph {
    pub fn from_json(text: &str) -> Result<RawGraph, GraphError> {
        serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))
    }
}

impl PmGraph {
    pub fn from_json(text: &str) -> Result<PmGraph, GraphError> {
        PmGraph::validate(&RawGraph::from_json(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("graph serializes")
    }
}

impl Serialize for PmGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_raw().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PmGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<PmGraph, D::Error> {
        let raw = RawGraph::deserialize(d)?;
        PmGraph::validate(&raw).map_err(serde::de::Error::custom)
    }
}
