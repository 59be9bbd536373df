//! Coding graphs on input, output and syndrome vertices.
//!
//! Vertices are stored in the fixed order inputs `I`, outputs `J`, syndromes
//! `L`; every block of the adjacency matrix is addressed through that order.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ffield::{FMat, FVec, Field, FieldError};
use crate::phase::subsets;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("edge `{0}`-`{1}` listed twice")]
    DuplicateEdge(String, String),
    #[error("edge weight {weight} is outside [1, {d})")]
    WeightOutOfRange { weight: u64, d: u32 },
    #[error("adjacency matrix must be symmetric with zero diagonal")]
    BadAdjacency,
    #[error("graph is not admissible: {0}")]
    NotAdmissible(AdmissibilityFailure),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Which vertex class a vertex belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Input,
    Output,
    Syndrome,
}

/// A weighted graph `Λ` on `I ∪ J ∪ L` over `F_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingGraph {
    field: Field,
    inputs: Vec<String>,
    outputs: Vec<String>,
    syndromes: Vec<String>,
    lambda: FMat,
}

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

impl CodingGraph {
    /// Builds a graph from labelled edges `(u, v, weight)`.
    pub fn new(
        field: Field,
        inputs: Vec<String>,
        outputs: Vec<String>,
        syndromes: Vec<String>,
        edges: &[(String, String, u64)],
    ) -> Result<Self, GraphError> {
        let labels: Vec<&String> = inputs.iter().chain(&outputs).chain(&syndromes).collect();
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(GraphError::DuplicateLabel((*l).clone()));
            }
        }
        let pos = |l: &String| {
            labels
                .iter()
                .position(|x| *x == l)
                .ok_or_else(|| GraphError::UnknownLabel(l.clone()))
        };
        let n = labels.len();
        let mut lambda = FMat::zeros(field, n, n);
        let mut present = BTreeSet::new();
        for (u, v, w) in edges {
            let (a, b) = (pos(u)?, pos(v)?);
            if a == b {
                return Err(GraphError::SelfLoop(u.clone()));
            }
            if *w == 0 || *w >= field.order() as u64 {
                return Err(GraphError::WeightOutOfRange {
                    weight: *w,
                    d: field.order(),
                });
            }
            if !present.insert((a.min(b), a.max(b))) {
                return Err(GraphError::DuplicateEdge(u.clone(), v.clone()));
            }
            lambda.set(a, b, *w as u32);
            lambda.set(b, a, *w as u32);
        }
        Ok(Self {
            field,
            inputs,
            outputs,
            syndromes,
            lambda,
        })
    }

    /// Builds a graph from an adjacency matrix in `I, J, L` order with labels
    /// `i0.., j0.., l0..`.
    pub fn from_matrix(
        n_inputs: usize,
        n_outputs: usize,
        n_syndromes: usize,
        lambda: FMat,
    ) -> Result<Self, GraphError> {
        let n = n_inputs + n_outputs + n_syndromes;
        if lambda.rows() != n || lambda.cols() != n {
            return Err(FieldError::DimensionMismatch {
                expected: n,
                found: lambda.rows(),
            }
            .into());
        }
        if !lambda.is_symmetric() || (0..n).any(|k| lambda.get(k, k) != 0) {
            return Err(GraphError::BadAdjacency);
        }
        Ok(Self {
            field: lambda.field(),
            inputs: default_labels("i", n_inputs),
            outputs: default_labels("j", n_outputs),
            syndromes: default_labels("l", n_syndromes),
            lambda,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn lambda(&self) -> &FMat {
        &self.lambda
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn syndromes(&self) -> &[String] {
        &self.syndromes
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn n_syndromes(&self) -> usize {
        self.syndromes.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.inputs.len() + self.outputs.len() + self.syndromes.len()
    }

    /// All labels in `I, J, L` order.
    pub fn labels(&self) -> Vec<String> {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .chain(&self.syndromes)
            .cloned()
            .collect()
    }

    pub fn role(&self, vertex: usize) -> Role {
        if vertex < self.n_inputs() {
            Role::Input
        } else if vertex < self.n_inputs() + self.n_outputs() {
            Role::Output
        } else {
            Role::Syndrome
        }
    }

    /// Vertex positions of `I`.
    pub fn input_sites(&self) -> Vec<usize> {
        (0..self.n_inputs()).collect()
    }

    /// Vertex positions of `J`.
    pub fn output_sites(&self) -> Vec<usize> {
        let s = self.n_inputs();
        (s..s + self.n_outputs()).collect()
    }

    /// Vertex positions of `L`.
    pub fn syndrome_sites(&self) -> Vec<usize> {
        let s = self.n_inputs() + self.n_outputs();
        (s..s + self.n_syndromes()).collect()
    }

    /// Vertex positions of `I ∪ L`.
    pub fn input_syndrome_sites(&self) -> Vec<usize> {
        let mut v = self.input_sites();
        v.extend(self.syndrome_sites());
        v
    }

    /// The block `Λ^{rows}_{cols}` (rows and columns are vertex positions).
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> FMat {
        self.lambda.block(rows, cols)
    }

    /// Edges `(u, v, weight)` with `u < v` in vertex order.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let n = self.n_vertices();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let w = self.lambda.get(a, b);
                if w != 0 {
                    out.push((a, b, w));
                }
            }
        }
        out
    }

    /// Concatenates `(q^I, q^J, q^L)` into a vector on all vertices.
    pub fn join(&self, q_i: &FVec, q_j: &FVec, q_l: &FVec) -> FVec {
        q_i.concat(q_j).concat(q_l)
    }

    /// Reorders vertices within each class. `perm_x[k]` is the old position
    /// (within the class) of the vertex placed at new position `k`.
    pub fn permuted(&self, perm_i: &[usize], perm_j: &[usize], perm_l: &[usize]) -> CodingGraph {
        let (ni, nj) = (self.n_inputs(), self.n_outputs());
        let order: Vec<usize> = perm_i
            .iter()
            .copied()
            .chain(perm_j.iter().map(|k| k + ni))
            .chain(perm_l.iter().map(|k| k + ni + nj))
            .collect();
        let pick =
            |labels: &[String], perm: &[usize]| perm.iter().map(|&k| labels[k].clone()).collect();
        CodingGraph {
            field: self.field,
            inputs: pick(&self.inputs, perm_i),
            outputs: pick(&self.outputs, perm_j),
            syndromes: pick(&self.syndromes, perm_l),
            lambda: self.lambda.block(&order, &order),
        }
    }
}

/// Why a graph is not admissible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdmissibilityFailure {
    /// `|J| ≠ |I| + |L|`, so `Λ^J_{IL}` cannot be invertible.
    NotSquare {
        outputs: usize,
        inputs_and_syndromes: usize,
    },
    /// `Λ^J_{IL}` is singular.
    Singular,
    /// An edge joins two vertices of `I ∪ L`.
    ForbiddenEdge { u: String, v: String },
}

impl core::fmt::Display for AdmissibilityFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::NotSquare {
                outputs,
                inputs_and_syndromes,
            } => write!(
                f,
                "block J x IL is {outputs}x{inputs_and_syndromes}, not square"
            ),
            Self::Singular => write!(f, "block J x IL is singular"),
            Self::ForbiddenEdge { u, v } => {
                write!(f, "edge {u}-{v} joins input/syndrome vertices")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub ok: bool,
    /// `Λ̄^{IL}_J`: rows `I ∪ L`, columns `J`.
    pub inverse: Option<FMat>,
    pub failure: Option<AdmissibilityFailure>,
}

pub fn check_admissible(g: &CodingGraph) -> AdmissibilityReport {
    let fail = |failure| AdmissibilityReport {
        ok: false,
        inverse: None,
        failure: Some(failure),
    };
    let il = g.input_syndrome_sites();
    for (k, &a) in il.iter().enumerate() {
        for &b in &il[k + 1..] {
            if g.lambda.get(a, b) != 0 {
                let labels = g.labels();
                return fail(AdmissibilityFailure::ForbiddenEdge {
                    u: labels[a].clone(),
                    v: labels[b].clone(),
                });
            }
        }
    }
    if g.n_outputs() != il.len() {
        return fail(AdmissibilityFailure::NotSquare {
            outputs: g.n_outputs(),
            inputs_and_syndromes: il.len(),
        });
    }
    match g.block(&g.output_sites(), &il).inverse() {
        Ok(inv) => AdmissibilityReport {
            ok: true,
            inverse: Some(inv),
            failure: None,
        },
        Err(_) => fail(AdmissibilityFailure::Singular),
    }
}

/// The inverse block `Λ̄^{IL}_J`, or the admissibility failure.
pub fn inverse_block(g: &CodingGraph) -> Result<FMat, GraphError> {
    let report = check_admissible(g);
    match (report.inverse, report.failure) {
        (Some(inv), _) => Ok(inv),
        (None, Some(f)) => Err(GraphError::NotAdmissible(f)),
        (None, None) => unreachable!("failed report always carries a reason"),
    }
}

/// A violating subset `E ⊆ J` and kernel vector `q^{IE}` of `Λ^{J∖E}_{IE}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TecWitness {
    /// Positions within `J`.
    pub subset: Vec<usize>,
    pub subset_labels: Vec<String>,
    /// `(q^I, q^E)` concatenated.
    pub kernel_vector: FVec,
    /// `q^I ≠ 0` (otherwise `Λ^I_E q^E ≠ 0`).
    pub input_nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TecReport {
    pub ok: bool,
    pub t: usize,
    pub subsets_checked: usize,
    pub witness: Option<TecWitness>,
}

/// Checks that for every `E ⊆ J` with `|E| ≤ 2t`, `Λ^{J∖E}_{IE} q^{IE} = 0`
/// forces `q^I = 0` and `Λ^I_E q^E = 0`.
pub fn check_t_error_correcting(g: &CodingGraph, t: usize) -> TecReport {
    let ni = g.n_inputs();
    let inputs = g.input_sites();
    let outputs = g.output_sites();
    let mut checked = 0;
    for size in 0..=(2 * t).min(outputs.len()) {
        for subset in subsets(outputs.len(), size) {
            checked += 1;
            let e: Vec<usize> = subset.iter().map(|&k| outputs[k]).collect();
            let rest: Vec<usize> = outputs.iter().copied().filter(|v| !e.contains(v)).collect();
            let mut cols = inputs.clone();
            cols.extend(&e);
            let a = g.block(&rest, &cols);
            let a_ie = g.block(&inputs, &e);
            for kv in a.kernel_basis() {
                let q_i = kv.slice(0, ni);
                let q_e = kv.slice(ni, kv.len());
                let input_nonzero = !q_i.is_zero();
                let leaks = !a_ie.mul_vec(&q_e).expect("block shape").is_zero();
                if input_nonzero || leaks {
                    let labels = g.outputs();
                    return TecReport {
                        ok: false,
                        t,
                        subsets_checked: checked,
                        witness: Some(TecWitness {
                            subset_labels: subset.iter().map(|&k| labels[k].clone()).collect(),
                            subset,
                            kernel_vector: kv,
                            input_nonzero,
                        }),
                    };
                }
            }
        }
    }
    TecReport {
        ok: true,
        t,
        subsets_checked: checked,
        witness: None,
    }
}

/// Search parameters for [`search_graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchParams {
    pub field: Field,
    pub n_inputs: usize,
    pub n_outputs: usize,
    pub t: usize,
    pub seed: u64,
    /// Maximum number of candidate graphs examined.
    pub budget: u64,
}

/// Candidate edges of an admissible graph: `I–J`, `J–J` and `J–L`.
pub fn candidate_edges(
    n_inputs: usize,
    n_outputs: usize,
    n_syndromes: usize,
) -> Vec<(usize, usize)> {
    let j0 = n_inputs;
    let l0 = n_inputs + n_outputs;
    let mut out = Vec::new();
    for i in 0..n_inputs {
        for j in j0..l0 {
            out.push((i, j));
        }
    }
    for a in j0..l0 {
        for b in a + 1..l0 {
            out.push((a, b));
        }
    }
    for j in j0..l0 {
        for l in l0..l0 + n_syndromes {
            out.push((j, l));
        }
    }
    out
}

/// Up to this many candidate edges every weight assignment is enumerated.
pub const EXHAUSTIVE_EDGE_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub graph: Option<CodingGraph>,
    pub examined: u64,
    pub exhaustive: bool,
    /// True when an exhaustive search finished without exhausting the budget.
    pub complete: bool,
}

/// Finds a graph that is admissible and certified `t`-error-correcting.
///
/// Small instances are enumerated in a fixed order; larger ones draw each
/// candidate edge weight uniformly from `F_d` with a seeded ChaCha stream.
pub fn search_graph(params: &SearchParams) -> SearchOutcome {
    let SearchParams {
        field,
        n_inputs,
        n_outputs,
        t,
        seed,
        budget,
    } = *params;
    let none = |examined, exhaustive, complete| SearchOutcome {
        graph: None,
        examined,
        exhaustive,
        complete,
    };
    if n_outputs < n_inputs {
        return none(0, true, true);
    }
    let n_syndromes = n_outputs - n_inputs;
    let n = n_inputs + n_outputs + n_syndromes;
    let edges = candidate_edges(n_inputs, n_outputs, n_syndromes);
    let d = field.order() as u64;
    let build = |weights: &[u32]| {
        let mut lambda = FMat::zeros(field, n, n);
        for (&(a, b), &w) in edges.iter().zip(weights) {
            lambda.set(a, b, w);
            lambda.set(b, a, w);
        }
        CodingGraph::from_matrix(n_inputs, n_outputs, n_syndromes, lambda).expect("symmetric")
    };
    let accept = |g: &CodingGraph| check_admissible(g).ok && check_t_error_correcting(g, t).ok;

    let exhaustive = edges.len() <= EXHAUSTIVE_EDGE_LIMIT;
    let mut examined = 0;
    if exhaustive {
        let total = d.pow(edges.len() as u32);
        let mut weights = alloc::vec![0u32; edges.len()];
        for code in 0..total {
            if examined >= budget {
                return none(examined, true, false);
            }
            examined += 1;
            let mut rest = code;
            for w in weights.iter_mut().rev() {
                *w = (rest % d) as u32;
                rest /= d;
            }
            let g = build(&weights);
            if accept(&g) {
                return SearchOutcome {
                    graph: Some(g),
                    examined,
                    exhaustive: true,
                    complete: false,
                };
            }
        }
        return none(examined, true, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = alloc::vec![0u32; edges.len()];
    while examined < budget {
        examined += 1;
        for w in weights.iter_mut() {
            *w = rng.gen_range(0..field.order());
        }
        let g = build(&weights);
        if accept(&g) {
            return SearchOutcome {
                graph: Some(g),
                examined,
                exhaustive: false,
                complete: false,
            };
        }
    }
    none(examined, false, false)
}
