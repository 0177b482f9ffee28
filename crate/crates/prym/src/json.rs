//! JSON input and output: graphs, covers (voltage and explicit forms),
//! and polynomial term lists. Lengths are exact rationals written as
//! "p/q" or "n" strings.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cover::{DoubleCover, VoltageSpec};
use crate::graph::{EdgeSet, MetricGraph};
use crate::poly::MultiPoly;
use crate::Error;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeFile {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub length: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverFile {
    pub graph: GraphFile,
    pub cover: CoverForm,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum CoverForm {
    #[serde(rename = "voltage")]
    Voltage {
        #[serde(default)]
        dilated_vertices: Vec<String>,
        #[serde(default)]
        dilated_edges: Vec<String>,
        #[serde(default)]
        signs: BTreeMap<String, i8>,
    },
    #[serde(rename = "explicit")]
    Explicit {
        total: GraphFile,
        vertex_map: BTreeMap<String, String>,
        edge_map: BTreeMap<String, String>,
        degree: DegreeFile,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegreeFile {
    pub vertices: BTreeMap<String, u8>,
    pub edges: BTreeMap<String, u8>,
}

/// Parses a length written as "p/q" or "n"; must be positive.
pub fn parse_length(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid length: {s:?}"));
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            BigRational::new(p, q)
        }
        None => BigRational::from(BigInt::from_str(s).map_err(|_| bad())?),
    };
    if value <= BigRational::zero() {
        return Err(Error::Parse(format!("length must be positive, got {s}")));
    }
    Ok(value)
}

pub fn render_length(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn graph_from_file(file: &GraphFile) -> Result<MetricGraph, Error> {
    let edges = file
        .edges
        .iter()
        .map(|e| {
            Ok((e.id.clone(), e.src.clone(), e.dst.clone(), parse_length(&e.length)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    MetricGraph::new(file.vertices.clone(), edges)
}

pub fn graph_to_file(g: &MetricGraph) -> GraphFile {
    GraphFile {
        vertices: g.vertices().to_vec(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeFile {
                id: e.id.clone(),
                src: g.vertex_name(e.src).to_string(),
                dst: g.vertex_name(e.dst).to_string(),
                length: render_length(&e.length),
            })
            .collect(),
    }
}

pub fn parse_graph(input: &str) -> Result<MetricGraph, Error> {
    let file: GraphFile =
        serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
    graph_from_file(&file)
}

pub fn cover_from_file(file: &CoverFile) -> Result<DoubleCover, Error> {
    let base = graph_from_file(&file.graph)?;
    match &file.cover {
        CoverForm::Voltage { dilated_vertices, dilated_edges, signs } => {
            let spec = VoltageSpec {
                base,
                dilated_vertices: dilated_vertices.iter().cloned().collect(),
                dilated_edges: EdgeSet::new(dilated_edges.iter().cloned()),
                signs: signs.clone(),
            };
            DoubleCover::build_from_voltage(&spec)
        }
        CoverForm::Explicit { total, vertex_map, edge_map, degree } => {
            let total = graph_from_file(total)?;
            DoubleCover::from_parts(
                base,
                total,
                vertex_map,
                edge_map,
                &degree.vertices,
                &degree.edges,
            )
        }
    }
}

pub fn parse_cover(input: &str) -> Result<DoubleCover, Error> {
    let file: CoverFile =
        serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
    cover_from_file(&file)
}

/// Serializes a voltage spec together with its base graph to the cover
/// file format.
pub fn voltage_to_file(spec: &VoltageSpec) -> CoverFile {
    CoverFile {
        graph: graph_to_file(&spec.base),
        cover: CoverForm::Voltage {
            dilated_vertices: spec.dilated_vertices.iter().cloned().collect(),
            dilated_edges: spec.dilated_edges.iter().map(|s| s.to_string()).collect(),
            signs: spec.signs.clone(),
        },
    }
}

/// Polynomial as a machine-diffable term list in canonical order.
pub fn poly_to_json(p: &MultiPoly) -> serde_json::Value {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let monomial: serde_json::Map<String, serde_json::Value> = m
            .exponents()
            .map(|(v, e)| (v.to_string(), serde_json::Value::from(e)))
            .collect();
        terms.push(serde_json::json!({
            "coeff": render_length(c),
            "monomial": serde_json::Value::Object(monomial),
        }));
    }
    terms.reverse(); // canonical descending order, matching render()
    serde_json::json!({ "terms": terms })
}

/// Parses a length assignment file: {"e1": "3/2", ...}.
pub fn parse_lengths(input: &str) -> Result<BTreeMap<String, BigRational>, Error> {
    let raw: BTreeMap<String, String> =
        serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
    raw.iter().map(|(k, v)| Ok((k.clone(), parse_length(v)?))).collect()
}
