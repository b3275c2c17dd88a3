//! JSON curve and divisor files.
//!
//! Curve file:
//! `{"name"?, "vertices": [{"id"}], "edges": [{"id", "tail", "head", "length"}], "basepoint"?}`
//! with rationals written as strings `"p/q"` or `"n"`. Points are
//! `{"vertex": id}` or `{"edge": id, "offset": "p/q"}`.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::curve::{Divisor, MetricGraph, Point, PointSpec};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<PointRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub length: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRecord {
    Vertex { vertex: String },
    Edge { edge: String, offset: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisorFile {
    pub divisor: Vec<DivisorTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisorTerm {
    pub point: PointRecord,
    pub coeff: i64,
}

const INFINITY_MARKERS: [&str; 4] = ["inf", "infinity", "∞", "+inf"];

/// Parses `"p/q"` or `"n"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(t).map(Rational::from_integer).map_err(|_| bad()),
    }
}

/// Exact text form: `"n"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

fn is_infinity_marker(s: &str) -> bool {
    let t = s.trim().to_ascii_lowercase();
    INFINITY_MARKERS.contains(&t.as_str())
}

impl PointRecord {
    pub fn to_spec(&self) -> Result<PointSpec> {
        Ok(match self {
            PointRecord::Vertex { vertex } => PointSpec::Vertex(vertex.clone()),
            PointRecord::Edge { edge, offset } => PointSpec::Edge {
                edge: edge.clone(),
                offset: parse_rational(offset)?,
            },
        })
    }

    pub fn from_point(graph: &MetricGraph, p: &Point) -> Self {
        match graph.describe(p) {
            PointSpec::Vertex(vertex) => PointRecord::Vertex { vertex },
            PointSpec::Edge { edge, offset } => PointRecord::Edge {
                edge,
                offset: format_rational(&offset),
            },
        }
    }
}

impl CurveFile {
    pub fn into_graph(self) -> Result<MetricGraph> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in self.edges {
            if is_infinity_marker(&e.length) {
                return Err(Error::InfiniteLength { edge: e.id });
            }
            let length = parse_rational(&e.length)?;
            edges.push((e.id, e.tail, e.head, length));
        }
        let basepoint = self.basepoint.as_ref().map(PointRecord::to_spec).transpose()?;
        MetricGraph::new(
            self.name,
            self.vertices.into_iter().map(|v| v.id).collect(),
            edges,
            basepoint,
        )
    }

    pub fn from_graph(graph: &MetricGraph) -> Self {
        CurveFile {
            name: graph.name().map(str::to_string),
            vertices: graph
                .vertices()
                .iter()
                .map(|id| VertexRecord { id: id.clone() })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    id: e.id.clone(),
                    tail: graph.vertices()[e.tail].clone(),
                    head: graph.vertices()[e.head].clone(),
                    length: format_rational(&e.length),
                })
                .collect(),
            basepoint: Some(PointRecord::from_point(graph, graph.basepoint())),
        }
    }
}

/// Parses and validates a curve file.
pub fn load_curve(text: &str) -> Result<MetricGraph> {
    let file: CurveFile = serde_json::from_str(text)?;
    file.into_graph()
}

pub fn curve_to_json(graph: &MetricGraph) -> String {
    serde_json::to_string_pretty(&CurveFile::from_graph(graph)).expect("serializable")
}

/// Parses a divisor file against a curve.
pub fn load_divisor(text: &str, graph: &MetricGraph) -> Result<Divisor> {
    let file: DivisorFile = serde_json::from_str(text)?;
    let mut d = Divisor::new();
    for term in file.divisor {
        let p = graph.resolve(&term.point.to_spec()?)?;
        d.add_point(p, term.coeff);
    }
    Ok(d)
}

pub fn divisor_file(graph: &MetricGraph, d: &Divisor) -> DivisorFile {
    DivisorFile {
        divisor: d
            .iter()
            .map(|(p, coeff)| DivisorTerm {
                point: PointRecord::from_point(graph, p),
                coeff,
            })
            .collect(),
    }
}
