use std::collections::BTreeMap;

use graphqec::ffield::{FMat, Field};
use graphqec::oneway::{Basis, ClassicalDevice, OneWayProgram, Step};
use graphqec::scheme::SyndromeTable;
use serde::{Deserialize, Serialize};

use super::{invalid, table_sha256, FormatError};

/// A matrix over `F_d`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<u32>>,
}

impl MatrixJson {
    fn from_mat(m: &FMat) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.to_rows(),
        }
    }

    fn to_mat(&self, field: Field) -> Result<FMat, FormatError> {
        if self.data.len() != self.rows || self.data.iter().any(|r| r.len() != self.cols) {
            return Err(invalid("matrix data does not match its shape"));
        }
        let mut m = FMat::zeros(field, self.rows, self.cols);
        for (r, row) in self.data.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v >= field.order() {
                    return Err(invalid(format!("matrix entry {v} is not a residue")));
                }
                m.set(r, c, v);
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisJson {
    X,
    Z,
}

/// One elementary operation; sites are indices into `ambient`, matrices are
/// referenced by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatternStep {
    Prepare {
        sites: Vec<usize>,
    },
    Dynamics {
        sites: Vec<usize>,
        sign: i8,
        graph: String,
    },
    Measure {
        sites: Vec<usize>,
        basis: BasisJson,
    },
    Feedforward {
        device: String,
        sources: Vec<usize>,
        targets: Vec<usize>,
        p_map: String,
        q_map: String,
        lookup: Option<String>,
    },
}

/// Measurement-pattern document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pattern {
    pub d: u32,
    pub ambient: Vec<String>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub steps: Vec<PatternStep>,
    pub matrices: BTreeMap<String, MatrixJson>,
    pub syndrome_table_ref: Option<String>,
}

impl Pattern {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn matrix(&self, name: &str) -> Result<FMat, FormatError> {
        let field = Field::new(self.d)?;
        self.matrices
            .get(name)
            .ok_or_else(|| invalid(format!("matrix `{name}` is not defined")))?
            .to_mat(field)
    }
}

pub fn emit_program(prog: &OneWayProgram) -> Pattern {
    let mut matrices = BTreeMap::new();
    let mut put = |name: String, m: &FMat| {
        matrices.insert(name.clone(), MatrixJson::from_mat(m));
        name
    };
    let steps = prog
        .steps
        .iter()
        .enumerate()
        .map(|(k, step)| match step {
            Step::Prepare { sites } => PatternStep::Prepare {
                sites: sites.clone(),
            },
            Step::Dynamics { sites, graph, sign } => PatternStep::Dynamics {
                sites: sites.clone(),
                sign: *sign,
                graph: put(format!("step{k}.graph"), graph),
            },
            Step::Measure { sites, basis } => PatternStep::Measure {
                sites: sites.clone(),
                basis: match basis {
                    Basis::X => BasisJson::X,
                    Basis::Z => BasisJson::Z,
                },
            },
            Step::Feedforward { device, targets } => PatternStep::Feedforward {
                device: device.name.clone(),
                sources: device.sources.clone(),
                targets: targets.clone(),
                p_map: put(format!("{}.p", device.name), &device.p_map),
                q_map: put(format!("{}.q", device.name), &device.q_map),
                lookup: device
                    .lookup
                    .as_ref()
                    .map(|s| put(format!("{}.lookup", device.name), s)),
            },
        })
        .collect();
    Pattern {
        d: prog.field.order(),
        ambient: prog.labels.clone(),
        inputs: prog.inputs.clone(),
        outputs: prog.outputs.clone(),
        steps,
        matrices,
        syndrome_table_ref: prog.table.as_ref().map(table_sha256),
    }
}

/// Rebuilds and validates a program. A pattern that references a syndrome
/// table needs the matching table.
pub fn parse_program(
    pattern: &Pattern,
    table: Option<&SyndromeTable>,
) -> Result<OneWayProgram, FormatError> {
    let field = Field::new(pattern.d)?;
    let table = match (&pattern.syndrome_table_ref, table) {
        (None, _) => None,
        (Some(_), None) => return Err(invalid("pattern needs its syndrome table")),
        (Some(r), Some(t)) => {
            if &table_sha256(t) != r {
                return Err(invalid(
                    "syndrome table does not match the pattern's reference",
                ));
            }
            Some(t.clone())
        }
    };
    let steps = pattern
        .steps
        .iter()
        .map(|step| {
            Ok(match step {
                PatternStep::Prepare { sites } => Step::Prepare {
                    sites: sites.clone(),
                },
                PatternStep::Dynamics { sites, sign, graph } => {
                    if sign.abs() != 1 {
                        return Err(invalid("dynamics sign must be +1 or -1"));
                    }
                    Step::Dynamics {
                        sites: sites.clone(),
                        graph: pattern.matrix(graph)?,
                        sign: *sign,
                    }
                }
                PatternStep::Measure { sites, basis } => Step::Measure {
                    sites: sites.clone(),
                    basis: match basis {
                        BasisJson::X => Basis::X,
                        BasisJson::Z => Basis::Z,
                    },
                },
                PatternStep::Feedforward {
                    device,
                    sources,
                    targets,
                    p_map,
                    q_map,
                    lookup,
                } => Step::Feedforward {
                    device: ClassicalDevice {
                        name: device.clone(),
                        sources: sources.clone(),
                        p_map: pattern.matrix(p_map)?,
                        q_map: pattern.matrix(q_map)?,
                        lookup: lookup.as_deref().map(|l| pattern.matrix(l)).transpose()?,
                    },
                    targets: targets.clone(),
                },
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let prog = OneWayProgram {
        field,
        labels: pattern.ambient.clone(),
        inputs: pattern.inputs.clone(),
        outputs: pattern.outputs.clone(),
        steps,
        table,
    };
    prog.validate()?;
    Ok(prog)
}
