//! JSON documents read and written by the command-line tool.

mod graph;
mod noise;
mod pattern;
mod scheme;

pub use graph::{graph_sha256, GraphSpec};
pub use noise::{NoiseSpec, WeylProb};
pub use pattern::{emit_program, parse_program, Pattern, PatternStep};
pub use scheme::{table_sha256, SchemeExport, TableEntry};

use graphqec::ffield::{FVec, Field};
use graphqec::phase::PhaseVec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] graphqec::graph::GraphError),
    #[error(transparent)]
    Field(#[from] graphqec::ffield::FieldError),
    #[error(transparent)]
    Program(#[from] graphqec::oneway::OneWayError),
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable document");
    s.push('\n');
    s
}

/// A phase-space point as residue lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseJson {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
}

impl PhaseJson {
    pub fn from_phase(xi: &PhaseVec) -> Self {
        Self {
            p: xi.p.entries().to_vec(),
            q: xi.q.entries().to_vec(),
        }
    }

    pub fn to_phase(&self, field: Field, sites: usize) -> Result<PhaseVec, FormatError> {
        if self.p.len() != sites || self.q.len() != sites {
            return Err(invalid(format!(
                "phase-space point needs {sites} entries in p and q"
            )));
        }
        Ok(
            PhaseVec::new(residues(field, &self.p)?, residues(field, &self.q)?)
                .expect("equal lengths"),
        )
    }
}

/// Checks that every entry is a residue in `[0, d)`.
pub fn residues(field: Field, entries: &[u32]) -> Result<FVec, FormatError> {
    if let Some(&bad) = entries.iter().find(|&&x| x >= field.order()) {
        return Err(invalid(format!(
            "entry {bad} is not a residue modulo {}",
            field.order()
        )));
    }
    Ok(FVec::new(field, entries.to_vec()))
}
