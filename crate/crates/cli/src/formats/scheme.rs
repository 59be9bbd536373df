use std::collections::BTreeMap;

use graphqec::ffield::{FVec, Field};
use graphqec::scheme::{Scheme, SyndromeTable};
use serde::{Deserialize, Serialize};

use super::{graph_sha256, invalid, residues, sha256_hex, FormatError, PhaseJson};

/// One syndrome and its correction; `null` marks a left-over syndrome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    #[serde(rename = "q_L")]
    pub q_l: Vec<u32>,
    #[serde(rename = "xi_I")]
    pub xi_i: Option<PhaseJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeExport {
    pub d: u32,
    pub t: usize,
    pub graph_sha256: String,
    pub n_inputs: usize,
    pub n_syndromes: usize,
    pub syndromes_used: usize,
    pub leftover: usize,
    pub table_sha256: String,
    pub table: Vec<TableEntry>,
}

fn entries(table: &SyndromeTable) -> Vec<TableEntry> {
    FVec::all(table.field(), table.n_syndromes())
        .map(|q_l| TableEntry {
            q_l: q_l.entries().to_vec(),
            xi_i: table.lookup(&q_l).map(PhaseJson::from_phase),
        })
        .collect()
}

/// Hash of the compact JSON of the full table, every syndrome in order.
pub fn table_sha256(table: &SyndromeTable) -> String {
    let canonical = serde_json::to_string(&entries(table)).expect("serializable");
    sha256_hex(canonical.as_bytes())
}

impl SchemeExport {
    pub fn from_scheme(s: &Scheme) -> Self {
        let table = s.table();
        Self {
            d: s.field().order(),
            t: s.t(),
            graph_sha256: graph_sha256(s.graph()),
            n_inputs: table.n_inputs(),
            n_syndromes: table.n_syndromes(),
            syndromes_used: table.len(),
            leftover: table.leftover().len(),
            table_sha256: table_sha256(table),
            table: entries(table),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_table(&self) -> Result<SyndromeTable, FormatError> {
        let field = Field::new(self.d)?;
        let mut map = BTreeMap::new();
        for e in &self.table {
            if e.q_l.len() != self.n_syndromes {
                return Err(invalid("syndrome has the wrong length"));
            }
            let q_l = residues(field, &e.q_l)?;
            if let Some(xi) = &e.xi_i {
                if map
                    .insert(q_l, xi.to_phase(field, self.n_inputs)?)
                    .is_some()
                {
                    return Err(invalid("syndrome listed twice"));
                }
            }
        }
        let table = SyndromeTable::from_entries(field, self.n_inputs, self.n_syndromes, map);
        if table_sha256(&table) != self.table_sha256 {
            return Err(invalid("table does not match its recorded hash"));
        }
        Ok(table)
    }
}
