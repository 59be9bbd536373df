//! Compilation of a program into Kraus operators by enumerating every
//! measurement outcome and applying the feed-forward of each branch.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{Basis, OneWayError, OneWayProgram, Step};
use crate::channel::{Instrument, QChannel};
use crate::ffield::{FMat, FVec, Field};
use crate::phase::{epsilon, tau_exponent_unchecked, PhaseVec, C64};
use crate::qspace::{graph_unitary, weyl_left, CMatrix, QSpaceError};

/// Default ceiling on `rows × columns` of any intermediate Kraus operator.
pub const DEFAULT_ENTRY_LIMIT: usize = 1 << 24;

/// One outcome branch: the measurement record and its Kraus operator from
/// the input register to the output register.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// `(step index, outcome)` for every measurement, in program order.
    pub outcomes: Vec<(usize, FVec)>,
    pub kraus: CMatrix,
}

impl Branch {
    pub fn outcome(&self, step: usize) -> Option<&FVec> {
        self.outcomes
            .iter()
            .find(|(k, _)| *k == step)
            .map(|(_, o)| o)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledProgram {
    pub field: Field,
    pub in_sites: usize,
    pub out_sites: usize,
    pub branches: Vec<Branch>,
}

impl CompiledProgram {
    /// Channel obtained by summing over all outcomes.
    pub fn channel(&self) -> QChannel {
        QChannel::new(
            self.field,
            self.in_sites,
            self.out_sites,
            self.branches.iter().map(|b| b.kraus.clone()).collect(),
        )
        .expect("compiled shapes are consistent")
    }

    /// Instrument keyed by the concatenated outcomes of `steps`; all other
    /// outcomes are summed over.
    pub fn instrument(&self, steps: &[usize]) -> Instrument {
        let mut groups: BTreeMap<FVec, Vec<CMatrix>> = BTreeMap::new();
        for b in &self.branches {
            let mut key = FVec::zeros(self.field, 0);
            for &s in steps {
                key = key.concat(b.outcome(s).expect("step is a measurement"));
            }
            groups.entry(key).or_default().push(b.kraus.clone());
        }
        Instrument::new(
            groups
                .into_iter()
                .map(|(k, kraus)| {
                    let ch = QChannel::new(self.field, self.in_sites, self.out_sites, kraus)
                        .expect("compiled shapes are consistent");
                    (k, ch)
                })
                .collect(),
        )
    }
}

fn positions(live: &[usize], sites: &[usize]) -> Vec<usize> {
    sites
        .iter()
        .map(|s| live.iter().position(|x| x == s).expect("validated site"))
        .collect()
}

/// New register after inserting `sites`, and for each new row the old row.
fn insertion_map(field: Field, live: &[usize], sites: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut new_live: Vec<usize> = live.iter().chain(sites).copied().collect();
    new_live.sort_unstable();
    let keep = positions(&new_live, live);
    let map = FVec::all(field, new_live.len())
        .map(|a| a.select(&keep).to_index())
        .collect();
    (new_live, map)
}

/// Remaining register after removing `sites`, and the full-register row for
/// every `(rest row, measured configuration)` pair, flattened row-major.
fn removal_map(field: Field, live: &[usize], sites: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let rest: Vec<usize> = live
        .iter()
        .copied()
        .filter(|s| !sites.contains(s))
        .collect();
    let rest_pos = positions(live, &rest);
    let site_pos = positions(live, sites);
    let dm = field.space_size(sites.len());
    let mut map = vec![0; field.space_size(rest.len()) * dm];
    for (a, full) in FVec::all(field, live.len()).enumerate() {
        let r = full.select(&rest_pos).to_index();
        let s = full.select(&site_pos).to_index();
        map[r * dm + s] = a;
    }
    (rest, map)
}

/// Row coefficients of the measurement bra for outcome `m`.
fn bra(field: Field, basis: Basis, m: &FVec) -> Vec<C64> {
    let n = m.len();
    match basis {
        Basis::X => {
            let norm = 1.0 / libm::sqrt(field.space_size(n) as f64);
            FVec::all(field, n)
                .map(|a| epsilon(field, m.dot(&a).expect("shape")) * norm)
                .collect()
        }
        Basis::Z => {
            let mut v = vec![C64::new(0.0, 0.0); field.space_size(n)];
            v[m.to_index()] = C64::new(1.0, 0.0);
            v
        }
    }
}

fn graph_diagonal(
    field: Field,
    live: &[usize],
    sites: &[usize],
    graph: &FMat,
    sign: i8,
) -> Vec<C64> {
    let pos = positions(live, sites);
    FVec::all(field, live.len())
        .map(|a| {
            let e = tau_exponent_unchecked(graph, a.select(&pos).entries());
            epsilon(field, if sign < 0 { field.neg(e) } else { e })
        })
        .collect()
}

fn contract(k: &CMatrix, map: &[usize], rest_dim: usize, coeffs: &[C64]) -> CMatrix {
    let dm = coeffs.len();
    CMatrix::from_fn(rest_dim, k.cols(), |r, c| {
        let mut acc = C64::new(0.0, 0.0);
        for (s, &b) in coeffs.iter().enumerate() {
            if b != C64::new(0.0, 0.0) {
                acc += b * k[(map[r * dm + s], c)];
            }
        }
        acc
    })
}

impl OneWayProgram {
    pub fn compile(&self) -> Result<CompiledProgram, OneWayError> {
        self.compile_with_limit(DEFAULT_ENTRY_LIMIT)
    }

    pub fn compile_with_limit(&self, limit: usize) -> Result<CompiledProgram, OneWayError> {
        self.validate()?;
        let f = self.field;
        let mut live = self.inputs.clone();
        let din = f.space_size(live.len());
        let mut branches = vec![Branch {
            outcomes: Vec::new(),
            kraus: CMatrix::identity(din),
        }];
        for (k, step) in self.steps.iter().enumerate() {
            match step {
                Step::Prepare { sites } => {
                    let (new_live, map) = insertion_map(f, &live, sites);
                    let entries = map.len() * din;
                    if entries > limit {
                        return Err(OneWayError::TooLarge { entries, limit });
                    }
                    let amp = C64::new(1.0 / libm::sqrt(f.space_size(sites.len()) as f64), 0.0);
                    for b in branches.iter_mut() {
                        b.kraus =
                            CMatrix::from_fn(map.len(), din, |r, c| b.kraus[(map[r], c)] * amp);
                    }
                    live = new_live;
                }
                Step::Dynamics { sites, graph, sign } => {
                    let diag = graph_diagonal(f, &live, sites, graph, *sign);
                    for b in branches.iter_mut() {
                        b.kraus =
                            CMatrix::from_fn(diag.len(), din, |r, c| diag[r] * b.kraus[(r, c)]);
                    }
                }
                Step::Measure { sites, basis } => {
                    let (rest, map) = removal_map(f, &live, sites);
                    let rest_dim = f.space_size(rest.len());
                    let bras: Vec<(FVec, Vec<C64>)> = FVec::all(f, sites.len())
                        .map(|m| {
                            let coeffs = bra(f, *basis, &m);
                            (m, coeffs)
                        })
                        .collect();
                    let mut next = Vec::with_capacity(branches.len() * bras.len());
                    for b in &branches {
                        for (m, coeffs) in &bras {
                            let mut outcomes = b.outcomes.clone();
                            outcomes.push((k, m.clone()));
                            next.push(Branch {
                                outcomes,
                                kraus: contract(&b.kraus, &map, rest_dim, coeffs),
                            });
                        }
                    }
                    branches = next;
                    live = rest;
                }
                Step::Feedforward { device, targets } => {
                    let pos = positions(&live, targets);
                    for b in branches.iter_mut() {
                        let mut m = FVec::zeros(f, 0);
                        for &src in &device.sources {
                            m = m.concat(b.outcome(src).expect("validated source"));
                        }
                        let local = device.evaluate(&m, self.table.as_ref()).neg();
                        let mut xi = PhaseVec::zero(f, live.len());
                        for (t, &p) in pos.iter().enumerate() {
                            xi.p.set(p, local.p.get(t));
                            xi.q.set(p, local.q.get(t));
                        }
                        b.kraus = weyl_left(&xi, &b.kraus);
                    }
                }
            }
        }
        Ok(CompiledProgram {
            field: f,
            in_sites: self.inputs.len(),
            out_sites: live.len(),
            branches,
        })
    }
}

/// `ρ ↦ ρ ⊗ |Ω⟩⟨Ω|` with `added` fresh sites appended after `existing`.
pub fn prep_channel(field: Field, existing: usize, added: usize) -> QChannel {
    let live: Vec<usize> = (0..existing).collect();
    let sites: Vec<usize> = (existing..existing + added).collect();
    let (_, map) = insertion_map(field, &live, &sites);
    let din = field.space_size(existing);
    let amp = 1.0 / libm::sqrt(field.space_size(added) as f64);
    let k = CMatrix::from_fn(map.len(), din, |r, c| {
        C64::new(if map[r] == c { amp } else { 0.0 }, 0.0)
    });
    QChannel::new(field, existing, existing + added, vec![k]).expect("shape")
}

/// Measurement of the register positions `sites` (increasing) in `basis`;
/// outcome `m` removes the measured sites.
pub fn measure_channel(field: Field, n: usize, sites: &[usize], basis: Basis) -> Instrument {
    let live: Vec<usize> = (0..n).collect();
    let (rest, map) = removal_map(field, &live, sites);
    let id = CMatrix::identity(field.space_size(n));
    let rest_dim = field.space_size(rest.len());
    Instrument::new(
        FVec::all(field, sites.len())
            .map(|m| {
                let k = contract(&id, &map, rest_dim, &bra(field, basis, &m));
                (
                    m,
                    QChannel::new(field, n, rest.len(), vec![k]).expect("shape"),
                )
            })
            .collect(),
    )
}

/// Conjugation by the graph unitary `u(sign·Γ)` on all `n = Γ.rows()` sites.
pub fn dynamics_channel(graph: &FMat, sign: i8) -> Result<QChannel, QSpaceError> {
    let u = graph_unitary(graph, sign)?;
    Ok(QChannel::new(graph.field(), graph.rows(), graph.rows(), vec![u]).expect("shape"))
}
