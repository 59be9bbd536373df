//! The classical devices and the encoder, syndrome and decoder programs of a
//! graph scheme.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::{Basis, ClassicalDevice, OneWayProgram, Step};
use crate::ffield::FMat;
use crate::graph::{inverse_block, CodingGraph, GraphError};
use crate::scheme::Scheme;

fn inverse_inputs(g: &CodingGraph, inverse: &FMat) -> FMat {
    let rows: Vec<usize> = (0..g.n_inputs()).collect();
    let cols: Vec<usize> = (0..g.n_outputs()).collect();
    inverse.block(&rows, &cols)
}

/// `A`: `p^I ↦ (−Λ^J_J Λ̄^J_I p^I, −Λ̄^J_I p^I)` on `J`, with
/// `Λ̄^J_I = (Λ̄^I_J)^T`.
pub fn device_a(g: &CodingGraph, source: usize) -> Result<ClassicalDevice, GraphError> {
    let inverse = inverse_block(g)?;
    let bar_ji = inverse_inputs(g, &inverse).transpose();
    let j = g.output_sites();
    let p_map = g.block(&j, &j).mul(&bar_ji).expect("shape").neg();
    Ok(ClassicalDevice {
        name: "A".to_string(),
        sources: vec![source],
        p_map,
        q_map: bar_ji.neg(),
        lookup: None,
    })
}

/// `A′`: `p^J ↦ (0, Λ̄^{IL}_J p^J)` on `I ∪ L`.
pub fn device_a_prime(g: &CodingGraph, source: usize) -> Result<ClassicalDevice, GraphError> {
    let inverse = inverse_block(g)?;
    Ok(ClassicalDevice {
        name: "A'".to_string(),
        sources: vec![source],
        p_map: FMat::zeros(g.field(), inverse.rows(), inverse.cols()),
        q_map: inverse,
        lookup: None,
    })
}

/// `A″`: `q^L ↦ ξ^I_{[q^L]}` on `I`, by table lookup.
pub fn device_a_double_prime(s: &Scheme, source: usize) -> ClassicalDevice {
    let g = s.graph();
    let f = g.field();
    ClassicalDevice {
        name: "A''".to_string(),
        sources: vec![source],
        p_map: FMat::zeros(f, g.n_inputs(), g.n_syndromes()),
        q_map: FMat::zeros(f, g.n_inputs(), g.n_syndromes()),
        lookup: Some(FMat::identity(f, g.n_syndromes())),
    }
}

/// `B`: `(m^J, m^L) ↦ (p^I, q^I + Λ̄^I_J m^J)` on `I`, where
/// `(p^I, q^I) = ξ^I_{[m^L − Λ̄^L_J m^J]}`.
pub fn device_b(s: &Scheme, source_j: usize, source_l: usize) -> ClassicalDevice {
    let g = s.graph();
    let f = g.field();
    let (ni, nj, nl) = (g.n_inputs(), g.n_outputs(), g.n_syndromes());
    let q_map = s
        .inverse_inputs()
        .hstack(&FMat::zeros(f, ni, nl))
        .expect("shape");
    let lookup = s
        .inverse_syndromes()
        .neg()
        .hstack(&FMat::identity(f, nl))
        .expect("shape");
    ClassicalDevice {
        name: "B".to_string(),
        sources: vec![source_j, source_l],
        p_map: FMat::zeros(f, ni, nj + nl),
        q_map,
        lookup: Some(lookup),
    }
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

/// Prepare `J`, interact along `Λ^{IJ}_{IJ}`, measure `I` in the x-basis,
/// translate `J` by `A`.
pub fn assemble_encoder(g: &CodingGraph) -> Result<OneWayProgram, GraphError> {
    let (i, j) = (g.input_sites(), g.output_sites());
    let ij = union(&i, &j);
    Ok(OneWayProgram {
        field: g.field(),
        labels: g.labels(),
        inputs: i.clone(),
        outputs: j.clone(),
        steps: vec![
            Step::Prepare { sites: j.clone() },
            Step::Dynamics {
                graph: g.block(&ij, &ij),
                sites: ij,
                sign: 1,
            },
            Step::Measure {
                sites: i,
                basis: Basis::X,
            },
            Step::Feedforward {
                device: device_a(g, 2)?,
                targets: j,
            },
        ],
        table: None,
    })
}

fn syndrome_prefix(s: &Scheme) -> Vec<Step> {
    let g = s.graph();
    let all: Vec<usize> = (0..g.n_vertices()).collect();
    vec![
        Step::Prepare {
            sites: g.input_syndrome_sites(),
        },
        Step::Dynamics {
            sites: all,
            graph: g.lambda().clone(),
            sign: -1,
        },
        Step::Measure {
            sites: g.output_sites(),
            basis: Basis::X,
        },
    ]
}

/// Prepare `I ∪ L`, interact along `−Λ`, measure `J` in the x-basis,
/// translate `I ∪ L` by `A′`, measure `L` in the z-basis. The last outcome
/// is the syndrome.
pub fn assemble_syndrome(s: &Scheme) -> OneWayProgram {
    let g = s.graph();
    let mut steps = syndrome_prefix(s);
    steps.push(Step::Feedforward {
        device: device_a_prime(g, 2).expect("scheme graphs are admissible"),
        targets: g.input_syndrome_sites(),
    });
    steps.push(Step::Measure {
        sites: g.syndrome_sites(),
        basis: Basis::Z,
    });
    OneWayProgram {
        field: g.field(),
        labels: g.labels(),
        inputs: g.output_sites(),
        outputs: g.input_sites(),
        steps,
        table: Some(s.table().clone()),
    }
}

/// The syndrome program followed by the correction `A″`.
pub fn assemble_decoder_five(s: &Scheme) -> OneWayProgram {
    let mut prog = assemble_syndrome(s);
    prog.steps.push(Step::Feedforward {
        device: device_a_double_prime(s, 4),
        targets: s.graph().input_sites(),
    });
    prog
}

/// Prepare `I ∪ L`, interact along `−Λ`, measure `J` (x) and `L` (z),
/// translate `I` by `B`.
pub fn assemble_decoder(s: &Scheme) -> OneWayProgram {
    let g = s.graph();
    let mut steps = syndrome_prefix(s);
    steps.push(Step::Measure {
        sites: g.syndrome_sites(),
        basis: Basis::Z,
    });
    steps.push(Step::Feedforward {
        device: device_b(s, 2, 3),
        targets: g.input_sites(),
    });
    OneWayProgram {
        field: g.field(),
        labels: g.labels(),
        inputs: g.output_sites(),
        outputs: g.input_sites(),
        steps,
        table: Some(s.table().clone()),
    }
}
