//! The error-correcting scheme built from a certified coding graph: code
//! isometries `v_{[Λ,q^L]}`, the error basis on `Ξ^J_t`, Weyl corrections on
//! `H_I` and the syndrome table.
//!
//! Phase conventions used throughout (all reduce to the familiar ones at
//! `d = 2`):
//!
//! * `v_{[Λ,q^L]}[q^J, q^I] = d^{-|J|/2} τ(Λ, (q^I, q^J, q^L))`, so that
//!   `v_{[Λ,q^L]} = z(Λ^J_L q^L) v_{[Λ,0]}`.
//! * Error basis `w_{[Λ,ξ^J]} = conj τ(Λ, q^J) · w(ξ^J)`.
//! * An error `ξ^J` has syndrome `q^L` and logical action `ξ^I = (p^I, q^I)`
//!   given by `q^{IL} = Λ̄^{IL}_J (p^J − Λ^J_J q^J)` and `p^I = −Λ^I_J q^J`;
//!   then `w_{[Λ,ξ^J]} v_{[Λ,0]} = conj χ(p^I, q^I) · v_{[Λ,q^L]} w(ξ^I)`.

mod identities;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use thiserror::Error;

pub use identities::{
    id1_deviation, id2_deviation, id3_deviation, linked_error_deviation, stabilizer_eigen_check,
    verify_kl, verify_scheme_conditions, SchemeConditions,
};

use crate::ffield::{FMat, FVec, Field};
use crate::graph::{check_t_error_correcting, inverse_block, CodingGraph, GraphError, TecWitness};
use crate::phase::{epsilon, tau_exponent_unchecked, PhaseBall, PhaseVec};
use crate::qspace::{weyl_left, CMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is not {t}-error-correcting (violating subset {witness:?})")]
    NotErrorCorrecting { t: usize, witness: Box<TecWitness> },
    #[error("syndrome {syndrome:?} is shared by corrections {first:?} and {second:?}")]
    Collision {
        syndrome: FVec,
        first: Box<PhaseVec>,
        second: Box<PhaseVec>,
    },
    #[error("error of weight {weight} exceeds the correctable weight {t}")]
    WeightExceeded { weight: usize, t: usize },
    #[error("q^J is not in the kernel of the input block")]
    NotInKernel,
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

/// A code isometry `v_{[Λ,q^L]} : H_I → H_J`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphIsometry {
    pub label: FVec,
    pub matrix: CMatrix,
}

/// Dense `v_{[Λ,q^L]}`. The graph must have `|I| + |L|` matching `q^L`.
pub(crate) fn isometry_matrix(g: &CodingGraph, q_l: &FVec) -> CMatrix {
    let f = g.field();
    let (ni, nj) = (g.n_inputs(), g.n_outputs());
    let dj = f.space_size(nj);
    let di = f.space_size(ni);
    let norm = 1.0 / libm::sqrt(dj as f64);
    let inputs: Vec<FVec> = FVec::all(f, ni).collect();
    let mut m = CMatrix::zeros(dj, di);
    for (row, q_j) in FVec::all(f, nj).enumerate() {
        for (col, q_i) in inputs.iter().enumerate() {
            let full = g.join(q_i, &q_j, q_l);
            m[(row, col)] = epsilon(f, tau_exponent_unchecked(g.lambda(), full.entries())) * norm;
        }
    }
    m
}

/// `v_{[Λ,q^L]}` for an admissible graph.
pub fn code_isometry(g: &CodingGraph, q_l: &FVec) -> Result<GraphIsometry, SchemeError> {
    inverse_block(g)?;
    if q_l.len() != g.n_syndromes() {
        return Err(SchemeError::LengthMismatch {
            expected: g.n_syndromes(),
            found: q_l.len(),
        });
    }
    Ok(GraphIsometry {
        label: q_l.clone(),
        matrix: isometry_matrix(g, q_l),
    })
}

/// `γ(ξ^J, q^L, ξ^I)`: 0 when the triple is linked, 1 otherwise.
pub fn gamma(g: &CodingGraph, xi_j: &PhaseVec, q_l: &FVec, xi_i: &PhaseVec) -> u8 {
    let f = g.field();
    let all: Vec<usize> = (0..g.n_vertices()).collect();
    let j = g.output_sites();
    let q_all = g.join(&xi_i.q, &xi_j.q, q_l);
    let line1 = xi_j
        .p
        .sub(&g.block(&j, &all).mul_vec(&q_all).expect("shape"))
        .expect("shape");
    let line2 = xi_i
        .p
        .add(
            &g.block(&g.input_sites(), &j)
                .mul_vec(&xi_j.q)
                .expect("shape"),
        )
        .expect("shape");
    debug_assert_eq!(line1.field(), f);
    u8::from(!(line1.is_zero() && line2.is_zero()))
}

/// The unique `(q^L, ξ^I)` linked to `ξ^J` by `γ`.
pub fn resolve_error(g: &CodingGraph, inverse: &FMat, xi_j: &PhaseVec) -> (FVec, PhaseVec) {
    let j = g.output_sites();
    let i = g.input_sites();
    let ni = g.n_inputs();
    let r = xi_j
        .p
        .sub(&g.block(&j, &j).mul_vec(&xi_j.q).expect("shape"))
        .expect("shape");
    let q_il = inverse.mul_vec(&r).expect("shape");
    let q_i = q_il.slice(0, ni);
    let q_l = q_il.slice(ni, q_il.len());
    let p_i = g.block(&i, &j).mul_vec(&xi_j.q).expect("shape").neg();
    (q_l, PhaseVec { p: p_i, q: q_i })
}

/// Syndrome `q^L` → correction `ξ^I`; syndromes never produced by a
/// correctable error are absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndromeTable {
    field: Field,
    n_inputs: usize,
    n_syndromes: usize,
    entries: BTreeMap<FVec, PhaseVec>,
}

impl SyndromeTable {
    pub fn from_entries(
        field: Field,
        n_inputs: usize,
        n_syndromes: usize,
        entries: BTreeMap<FVec, PhaseVec>,
    ) -> Self {
        Self {
            field,
            n_inputs,
            n_syndromes,
            entries,
        }
    }

    pub fn lookup(&self, q_l: &FVec) -> Option<&PhaseVec> {
        self.entries.get(q_l)
    }

    /// Table entry, or the identity correction `ξ^I = 0` for a left-over
    /// syndrome.
    pub fn correction(&self, q_l: &FVec) -> PhaseVec {
        self.lookup(q_l)
            .cloned()
            .unwrap_or_else(|| PhaseVec::zero(self.field, self.n_inputs))
    }

    pub fn entries(&self) -> &BTreeMap<FVec, PhaseVec> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_syndromes(&self) -> usize {
        self.n_syndromes
    }

    /// Syndromes not produced by any correctable error.
    pub fn leftover(&self) -> Vec<FVec> {
        FVec::all(self.field, self.n_syndromes)
            .filter(|s| !self.entries.contains_key(s))
            .collect()
    }
}

/// Tabulates `q^L → ξ^I` over `errors`, failing on two different corrections
/// for one syndrome.
pub fn build_syndrome_table<'a>(
    g: &CodingGraph,
    inverse: &FMat,
    errors: impl IntoIterator<Item = &'a PhaseVec>,
) -> Result<SyndromeTable, SchemeError> {
    let mut entries: BTreeMap<FVec, PhaseVec> = BTreeMap::new();
    for xi_j in errors {
        let (q_l, xi_i) = resolve_error(g, inverse, xi_j);
        match entries.get(&q_l) {
            Some(prev) if *prev != xi_i => {
                return Err(SchemeError::Collision {
                    syndrome: q_l,
                    first: Box::new(prev.clone()),
                    second: Box::new(xi_i),
                })
            }
            Some(_) => {}
            None => {
                entries.insert(q_l, xi_i);
            }
        }
    }
    Ok(SyndromeTable::from_entries(
        g.field(),
        g.n_inputs(),
        g.n_syndromes(),
        entries,
    ))
}

/// The four-tuple `(w_Λ, v_Λ, u_Λ, γ_Λ)` for a certified graph.
#[derive(Clone, Debug)]
pub struct Scheme {
    graph: CodingGraph,
    t: usize,
    inverse: FMat,
    ball: PhaseBall,
    table: SyndromeTable,
    isometries: Vec<CMatrix>,
}

impl Scheme {
    /// Checks admissibility and the `2t`-subset condition, then builds the
    /// isometry family and the syndrome table.
    pub fn build(graph: CodingGraph, t: usize) -> Result<Self, SchemeError> {
        let inverse = inverse_block(&graph)?;
        let report = check_t_error_correcting(&graph, t);
        if let Some(witness) = report.witness {
            return Err(SchemeError::NotErrorCorrecting {
                t,
                witness: Box::new(witness),
            });
        }
        let ball = PhaseBall::new(graph.field(), graph.n_outputs(), t);
        let table = build_syndrome_table(&graph, &inverse, ball.elements())?;
        let isometries = FVec::all(graph.field(), graph.n_syndromes())
            .map(|q_l| isometry_matrix(&graph, &q_l))
            .collect();
        Ok(Self {
            graph,
            t,
            inverse,
            ball,
            table,
            isometries,
        })
    }

    pub fn graph(&self) -> &CodingGraph {
        &self.graph
    }

    pub fn field(&self) -> Field {
        self.graph.field()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `Λ̄^{IL}_J` (rows `I ∪ L`, columns `J`).
    pub fn inverse(&self) -> &FMat {
        &self.inverse
    }

    /// `Λ̄^I_J`.
    pub fn inverse_inputs(&self) -> FMat {
        let rows: Vec<usize> = (0..self.graph.n_inputs()).collect();
        let cols: Vec<usize> = (0..self.graph.n_outputs()).collect();
        self.inverse.block(&rows, &cols)
    }

    /// `Λ̄^L_J`.
    pub fn inverse_syndromes(&self) -> FMat {
        let ni = self.graph.n_inputs();
        let rows: Vec<usize> = (ni..ni + self.graph.n_syndromes()).collect();
        let cols: Vec<usize> = (0..self.graph.n_outputs()).collect();
        self.inverse.block(&rows, &cols)
    }

    /// The error set `Ξ^J_t`.
    pub fn errors(&self) -> &PhaseBall {
        &self.ball
    }

    pub fn table(&self) -> &SyndromeTable {
        &self.table
    }

    pub fn dim_inputs(&self) -> usize {
        self.field().space_size(self.graph.n_inputs())
    }

    pub fn dim_outputs(&self) -> usize {
        self.field().space_size(self.graph.n_outputs())
    }

    /// `v_{[Λ,q^L]}`.
    pub fn isometry(&self, q_l: &FVec) -> &CMatrix {
        &self.isometries[q_l.to_index()]
    }

    /// All isometries indexed by `q^L` in lexicographic order.
    pub fn isometries(&self) -> &[CMatrix] {
        &self.isometries
    }

    /// Correction `ξ^I_{[q^L]}` (zero on a left-over syndrome).
    pub fn correction(&self, q_l: &FVec) -> PhaseVec {
        self.table.correction(q_l)
    }

    /// Syndrome and logical action of an arbitrary `ξ^J`.
    pub fn resolve(&self, xi_j: &PhaseVec) -> (FVec, PhaseVec) {
        resolve_error(&self.graph, &self.inverse, xi_j)
    }

    /// `w_{[Λ,ξ^J]} = conj τ(Λ, q^J) w(ξ^J)` for `weight(ξ^J) ≤ t`.
    pub fn error_op(&self, xi_j: &PhaseVec) -> Result<CMatrix, SchemeError> {
        let weight = xi_j.weight();
        if weight > self.t {
            return Err(SchemeError::WeightExceeded { weight, t: self.t });
        }
        Ok(error_basis_op(&self.graph, xi_j))
    }
}

/// `conj τ(Λ, q^J)` for `q^J` supported on the outputs.
pub(crate) fn error_phase(g: &CodingGraph, q_j: &FVec) -> crate::phase::C64 {
    let f = g.field();
    let full = g.join(
        &FVec::zeros(f, g.n_inputs()),
        q_j,
        &FVec::zeros(f, g.n_syndromes()),
    );
    epsilon(f, tau_exponent_unchecked(g.lambda(), full.entries())).conj()
}

/// `w_{[Λ,ξ^J]}` without a weight check.
pub fn error_basis_op(g: &CodingGraph, xi_j: &PhaseVec) -> CMatrix {
    let dim = g.field().space_size(g.n_outputs());
    weyl_left(xi_j, &CMatrix::identity(dim)).scale(error_phase(g, &xi_j.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn small_graph() -> CodingGraph {
        // I = {i}, J = {j0, j1}, L = {l}; i-j0, j0-j1, j1-l
        let f = Field::new(3).unwrap();
        let lam = FMat::from_rows(
            f,
            &[
                vec![0, 1, 0, 0],
                vec![1, 0, 2, 0],
                vec![0, 2, 0, 1],
                vec![0, 0, 1, 0],
            ],
        )
        .unwrap();
        CodingGraph::from_matrix(1, 2, 1, lam).unwrap()
    }

    #[test]
    fn gamma_zero_triple() {
        let g = small_graph();
        let f = g.field();
        let xi_j = PhaseVec::zero(f, 2);
        assert_eq!(
            gamma(&g, &xi_j, &FVec::zeros(f, 1), &PhaseVec::zero(f, 1)),
            0
        );
        let mut bumped = xi_j.clone();
        bumped.p.set(0, 1);
        assert_eq!(
            gamma(&g, &bumped, &FVec::zeros(f, 1), &PhaseVec::zero(f, 1)),
            1
        );
    }

    #[test]
    fn resolved_triples_satisfy_gamma() {
        let g = small_graph();
        let inv = inverse_block(&g).unwrap();
        for xi in PhaseVec::all(g.field(), 2) {
            let (q_l, xi_i) = resolve_error(&g, &inv, &xi);
            assert_eq!(gamma(&g, &xi, &q_l, &xi_i), 0);
        }
    }

    #[test]
    fn isometry_is_isometric() {
        let g = small_graph();
        for q_l in FVec::all(g.field(), 1) {
            let v = code_isometry(&g, &q_l).unwrap();
            assert!(v.matrix.isometry_defect() < 1e-12);
        }
    }

    #[test]
    fn zero_error_has_zero_syndrome() {
        let g = small_graph();
        let inv = inverse_block(&g).unwrap();
        let zero = PhaseVec::zero(g.field(), 2);
        let table = build_syndrome_table(&g, &inv, [&zero, &zero]).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(
            table.lookup(&FVec::zeros(g.field(), 1)),
            Some(&PhaseVec::zero(g.field(), 1))
        );
    }
}
