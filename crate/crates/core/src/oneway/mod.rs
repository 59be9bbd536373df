//! One-way programs: preparation of shift-invariant qudits, one graph
//! interaction, local x/z measurements and outcome-conditioned Weyl
//! translations driven by affine classical devices.
//!
//! Measurement outcomes are labelled so that x-basis outcome `p` is the
//! eigenvector of every `x(q)` with eigenvalue `χ(p, q)`, i.e. `z(−p)Ω`, and
//! z-basis outcome `q` is the point mass at `q`. A translation by `ξ` acts
//! with Kraus operator `w(−ξ) = z(−p) x(−q)`, which equals `w(ξ)†` up to a
//! phase and composes additively: `w(−ξ) w(0, −a) = w(−ξ − (0, a))`.

mod assemble;
mod compile;
mod verify;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

pub use assemble::{
    assemble_decoder, assemble_decoder_five, assemble_encoder, assemble_syndrome, device_a,
    device_a_double_prime, device_a_prime, device_b,
};
pub use compile::{dynamics_channel, measure_channel, prep_channel, Branch, CompiledProgram};
pub use verify::{
    ablation_deviations, roundtrip_deviation, syndrome_projection_deviation, verify_cor_decode,
    verify_cor_encode, verify_thm_measure, verify_thm_syndrome, AblationReport, MeasureReport,
};

use crate::ffield::{FMat, FVec, Field};
use crate::graph::GraphError;
use crate::phase::PhaseVec;
use crate::scheme::SyndromeTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OneWayError {
    #[error("step {step}: site {site} is already present")]
    SiteCollision { step: usize, site: usize },
    #[error("step {step}: site {site} is not present")]
    MissingSite { step: usize, site: usize },
    #[error("step {step}: site {site} is outside the ambient register")]
    UnknownSite { step: usize, site: usize },
    #[error("step {step}: site list must be strictly increasing")]
    UnsortedSites { step: usize },
    #[error("step {step}: feed-forward source {source_step} is not an earlier measurement")]
    BadSource { step: usize, source_step: usize },
    #[error("step {step}: device matrices do not match its inputs and targets")]
    DeviceShape { step: usize },
    #[error("step {step}: device needs a syndrome table")]
    MissingTable { step: usize },
    #[error("step {step}: graph must be symmetric with zero diagonal on its sites")]
    BadGraph { step: usize },
    #[error("program ends on sites {found:?}, declared outputs {expected:?}")]
    OutputMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("register of {entries} amplitudes exceeds the limit {limit}")]
    TooLarge { entries: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Z,
}

/// An affine map from measured outcomes to a translation on the targets,
/// optionally adding a syndrome-table lookup:
///
/// `ξ(m) = (P m, Q m) + table[S m]`, with `table[·] = 0` on a miss.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalDevice {
    pub name: String,
    /// Step indices of the measurements whose outcomes, concatenated in this
    /// order, form `m`.
    pub sources: Vec<usize>,
    pub p_map: FMat,
    pub q_map: FMat,
    pub lookup: Option<FMat>,
}

impl ClassicalDevice {
    /// Evaluates the device on the concatenated outcome `m`.
    pub fn evaluate(&self, m: &FVec, table: Option<&SyndromeTable>) -> PhaseVec {
        let mut xi = PhaseVec {
            p: self.p_map.mul_vec(m).expect("validated shape"),
            q: self.q_map.mul_vec(m).expect("validated shape"),
        };
        if let Some(s) = &self.lookup {
            let syndrome = s.mul_vec(m).expect("validated shape");
            let table = table.expect("validated table");
            xi = xi
                .add(&table.correction(&syndrome))
                .expect("validated shape");
        }
        xi
    }

    pub fn input_len(&self) -> usize {
        self.p_map.cols()
    }

    pub fn output_len(&self) -> usize {
        self.p_map.rows()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// Fresh qudits in the shift-invariant state `Ω`.
    Prepare { sites: Vec<usize> },
    /// Multiplication by `τ(sign·Γ, ·)` on `sites`; `graph` is indexed by the
    /// positions within `sites`.
    Dynamics {
        sites: Vec<usize>,
        graph: FMat,
        sign: i8,
    },
    /// Measurement in the x or z basis; the sites leave the register.
    Measure { sites: Vec<usize>, basis: Basis },
    /// Conditional translation `w(−ξ)` on `targets` with `ξ` from `device`.
    Feedforward {
        device: ClassicalDevice,
        targets: Vec<usize>,
    },
}

impl Step {
    pub fn kind(&self) -> &'static str {
        match self {
            Step::Prepare { .. } => "prepare",
            Step::Dynamics { .. } => "dynamics",
            Step::Measure { .. } => "measure",
            Step::Feedforward { .. } => "feedforward",
        }
    }
}

/// A measurement-based program on an ambient set of labelled vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneWayProgram {
    pub field: Field,
    pub labels: Vec<String>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub steps: Vec<Step>,
    pub table: Option<SyndromeTable>,
}

fn check_sorted(step: usize, sites: &[usize], ambient: usize) -> Result<(), OneWayError> {
    if !sites.windows(2).all(|w| w[0] < w[1]) {
        return Err(OneWayError::UnsortedSites { step });
    }
    if let Some(&site) = sites.iter().find(|&&s| s >= ambient) {
        return Err(OneWayError::UnknownSite { step, site });
    }
    Ok(())
}

impl OneWayProgram {
    /// Static well-formedness: site bookkeeping, device shapes, feed-forward
    /// only from earlier measurements, and the final register.
    pub fn validate(&self) -> Result<(), OneWayError> {
        let ambient = self.labels.len();
        check_sorted(usize::MAX, &self.inputs, ambient)?;
        check_sorted(usize::MAX, &self.outputs, ambient)?;
        let mut live: BTreeSet<usize> = self.inputs.iter().copied().collect();
        let mut measured: Vec<Option<usize>> = alloc::vec![None; self.steps.len()];
        for (k, step) in self.steps.iter().enumerate() {
            match step {
                Step::Prepare { sites } => {
                    check_sorted(k, sites, ambient)?;
                    for &site in sites {
                        if !live.insert(site) {
                            return Err(OneWayError::SiteCollision { step: k, site });
                        }
                    }
                }
                Step::Dynamics { sites, graph, .. } => {
                    check_sorted(k, sites, ambient)?;
                    if let Some(&site) = sites.iter().find(|s| !live.contains(s)) {
                        return Err(OneWayError::MissingSite { step: k, site });
                    }
                    let n = sites.len();
                    if graph.rows() != n
                        || graph.cols() != n
                        || !graph.is_symmetric()
                        || (0..n).any(|i| graph.get(i, i) != 0)
                    {
                        return Err(OneWayError::BadGraph { step: k });
                    }
                }
                Step::Measure { sites, .. } => {
                    check_sorted(k, sites, ambient)?;
                    for &site in sites {
                        if !live.remove(&site) {
                            return Err(OneWayError::MissingSite { step: k, site });
                        }
                    }
                    measured[k] = Some(sites.len());
                }
                Step::Feedforward { device, targets } => {
                    check_sorted(k, targets, ambient)?;
                    if let Some(&site) = targets.iter().find(|s| !live.contains(s)) {
                        return Err(OneWayError::MissingSite { step: k, site });
                    }
                    let mut input_len = 0;
                    for &src in &device.sources {
                        match measured.get(src).copied().flatten() {
                            Some(len) if src < k => input_len += len,
                            _ => {
                                return Err(OneWayError::BadSource {
                                    step: k,
                                    source_step: src,
                                })
                            }
                        }
                    }
                    let shape_ok = device.p_map.rows() == targets.len()
                        && device.q_map.rows() == targets.len()
                        && device.p_map.cols() == input_len
                        && device.q_map.cols() == input_len;
                    if !shape_ok {
                        return Err(OneWayError::DeviceShape { step: k });
                    }
                    if let Some(s) = &device.lookup {
                        let table = self
                            .table
                            .as_ref()
                            .ok_or(OneWayError::MissingTable { step: k })?;
                        if s.cols() != input_len
                            || s.rows() != table.n_syndromes()
                            || table.n_inputs() != targets.len()
                        {
                            return Err(OneWayError::DeviceShape { step: k });
                        }
                    }
                }
            }
        }
        let found: Vec<usize> = live.into_iter().collect();
        if found != self.outputs {
            return Err(OneWayError::OutputMismatch {
                expected: self.outputs.clone(),
                found,
            });
        }
        Ok(())
    }

    /// The same program with every feed-forward step removed.
    pub fn without_feedforward(&self) -> OneWayProgram {
        OneWayProgram {
            steps: self
                .steps
                .iter()
                .filter(|s| !matches!(s, Step::Feedforward { .. }))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// Step indices of the measurements, in program order.
    pub fn measurement_steps(&self) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Step::Measure { .. }))
            .map(|(k, _)| k)
            .collect()
    }
}
