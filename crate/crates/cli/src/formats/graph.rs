use graphqec::ffield::Field;
use graphqec::graph::CodingGraph;
use serde::{Deserialize, Serialize};

use super::{sha256_hex, FormatError};

/// `{"d", "inputs", "outputs", "syndromes", "edges": [[u, v, weight]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub d: u32,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub syndromes: Vec<String>,
    pub edges: Vec<(String, String, u64)>,
}

impl GraphSpec {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_graph(g: &CodingGraph) -> Self {
        let labels = g.labels();
        let (ni, nj) = (g.n_inputs(), g.n_outputs());
        Self {
            d: g.field().order(),
            inputs: labels[..ni].to_vec(),
            outputs: labels[ni..ni + nj].to_vec(),
            syndromes: labels[ni + nj..].to_vec(),
            edges: g
                .edges()
                .into_iter()
                .map(|(a, b, w)| (labels[a].clone(), labels[b].clone(), u64::from(w)))
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<CodingGraph, FormatError> {
        let field = Field::new(self.d)?;
        Ok(CodingGraph::new(
            field,
            self.inputs.clone(),
            self.outputs.clone(),
            self.syndromes.clone(),
            &self.edges,
        )?)
    }
}

/// Hash of the canonical (compact, edge-sorted) form of a graph.
pub fn graph_sha256(g: &CodingGraph) -> String {
    let canonical = serde_json::to_string(&GraphSpec::from_graph(g)).expect("serializable");
    sha256_hex(canonical.as_bytes())
}
