//! Dense checks of the structural identities satisfied by a graph scheme.
//! Every function returns a Frobenius-norm deviation.

use alloc::vec::Vec;

use super::{error_phase, isometry_matrix, Scheme, SchemeError};
use crate::ffield::FVec;
use crate::graph::{inverse_block, CodingGraph};
use crate::phase::{chi, epsilon, tau_exponent_unchecked, PhaseBall, PhaseVec, C64};
use crate::qspace::{weyl_left, weyl_right, CMatrix};

fn z_vec(p: FVec) -> PhaseVec {
    let n = p.len();
    let f = p.field();
    PhaseVec {
        p,
        q: FVec::zeros(f, n),
    }
}

fn tau_of(g: &CodingGraph, v: &FVec) -> C64 {
    epsilon(g.field(), tau_exponent_unchecked(g.lambda(), v.entries()))
}

/// `v_{[Λ,q^L]} w(ξ^I) = χ(p^I, q^I) z(Λ^J_I q^I) v_{[Λ,q^L]} z(p^I)`.
pub fn id1_deviation(s: &Scheme, xi_i: &PhaseVec, q_l: &FVec) -> f64 {
    let g = s.graph();
    let v = s.isometry(q_l);
    let lhs = weyl_right(v, xi_i);
    let shift = g
        .block(&g.output_sites(), &g.input_sites())
        .mul_vec(&xi_i.q)
        .expect("shape");
    let phase = chi(&xi_i.p, &xi_i.q).expect("shape");
    let rhs = weyl_right(&weyl_left(&z_vec(shift), v), &z_vec(xi_i.p.clone())).scale(phase);
    lhs.distance(&rhs)
}

/// `w(ξ^J) v_{[Λ,q^L]} = τ(Λ, q^J − q^L) z(p^J − Λ^J_J q^J) v_{[Λ,q^L]} z(−Λ^I_J q^J)`,
/// where `q^J − q^L` is the vector `(0, q^J, −q^L)` on all vertices.
pub fn id2_deviation(s: &Scheme, xi_j: &PhaseVec, q_l: &FVec) -> f64 {
    let g = s.graph();
    let f = g.field();
    let (i, j) = (g.input_sites(), g.output_sites());
    let v = s.isometry(q_l);
    let lhs = weyl_left(xi_j, v);
    let phase = tau_of(g, &g.join(&FVec::zeros(f, i.len()), &xi_j.q, &q_l.neg()));
    let left = xi_j
        .p
        .sub(&g.block(&j, &j).mul_vec(&xi_j.q).expect("shape"))
        .expect("shape");
    let right = g.block(&i, &j).mul_vec(&xi_j.q).expect("shape").neg();
    let rhs = weyl_right(&weyl_left(&z_vec(left), v), &z_vec(right)).scale(phase);
    lhs.distance(&rhs)
}

/// `v_{[Λ,q^L]} = z(Λ^J_L q^L) v_{[Λ,0]}`.
pub fn id3_deviation(s: &Scheme, q_l: &FVec) -> f64 {
    let g = s.graph();
    let f = g.field();
    let shift = g
        .block(&g.output_sites(), &g.syndrome_sites())
        .mul_vec(q_l)
        .expect("shape");
    let v0 = s.isometry(&FVec::zeros(f, q_l.len()));
    s.isometry(q_l).distance(&weyl_left(&z_vec(shift), v0))
}

/// Deviation of `w(Λ^J_J q^J, q^J) v_{[Λ,q^L]} = τ(Λ, q^J − q^L) v_{[Λ,q^L]}`
/// for `q^J` in the kernel of `Λ^I_J`.
pub fn stabilizer_eigen_check(g: &CodingGraph, q_j: &FVec, q_l: &FVec) -> Result<f64, SchemeError> {
    inverse_block(g)?;
    let f = g.field();
    let (i, j) = (g.input_sites(), g.output_sites());
    if q_j.len() != j.len() {
        return Err(SchemeError::LengthMismatch {
            expected: j.len(),
            found: q_j.len(),
        });
    }
    if !g.block(&i, &j).mul_vec(q_j).expect("shape").is_zero() {
        return Err(SchemeError::NotInKernel);
    }
    let v = isometry_matrix(g, q_l);
    let stab = PhaseVec {
        p: g.block(&j, &j).mul_vec(q_j).expect("shape"),
        q: q_j.clone(),
    };
    let phase = tau_of(g, &g.join(&FVec::zeros(f, i.len()), q_j, &q_l.neg()));
    Ok(weyl_left(&stab, &v).distance(&v.scale(phase)))
}

/// `w_{[Λ,ξ^J]} v_{[Λ,0]} = conj χ(p^I, q^I) · v_{[Λ,q^L]} w(ξ^I)` with
/// `(q^L, ξ^I)` linked to `ξ^J`.
pub fn linked_error_deviation(s: &Scheme, xi_j: &PhaseVec) -> f64 {
    let g = s.graph();
    let f = g.field();
    let (q_l, xi_i) = s.resolve(xi_j);
    let v0 = s.isometry(&FVec::zeros(f, g.n_syndromes()));
    let lhs = weyl_left(xi_j, v0).scale(error_phase(g, &xi_j.q));
    let phase = chi(&xi_i.p, &xi_i.q).expect("shape").conj();
    let rhs = weyl_right(s.isometry(&q_l), &xi_i).scale(phase);
    lhs.distance(&rhs)
}

/// Largest off-identity component of `v† w(ξ1)† w(ξ2) v` over all pairs in
/// `Ξ^J_t`, with `v = v_{[Λ,0]}`.
pub fn verify_kl(g: &CodingGraph, t: usize) -> Result<f64, SchemeError> {
    inverse_block(g)?;
    let f = g.field();
    let v0 = isometry_matrix(g, &FVec::zeros(f, g.n_syndromes()));
    let ball = PhaseBall::new(f, g.n_outputs(), t);
    let images: Vec<CMatrix> = ball
        .elements()
        .iter()
        .map(|xi| weyl_left(xi, &v0))
        .collect();
    let di = v0.cols();
    let id = CMatrix::identity(di);
    let mut worst: f64 = 0.0;
    for a in &images {
        let a_adj = a.adjoint();
        for b in &images {
            let m = a_adj.mul(b);
            let c = m.trace() / di as f64;
            worst = worst.max(m.distance(&id.scale(c)));
        }
    }
    Ok(worst)
}

/// Numerical evidence for the three scheme conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeConditions {
    /// Largest `linked_error_deviation` over `Ξ^J_t`.
    pub linked_deviation: f64,
    /// Number of errors whose syndrome is tabulated (always all of `Ξ^J_t`).
    pub tabulated_errors: usize,
    /// Distinct syndromes produced by `Ξ^J_t`.
    pub syndromes_used: usize,
    /// Syndromes never produced by a correctable error.
    pub leftover_syndromes: usize,
}

pub fn verify_scheme_conditions(s: &Scheme) -> SchemeConditions {
    let mut worst: f64 = 0.0;
    let mut tabulated = 0;
    for xi in s.errors().elements() {
        worst = worst.max(linked_error_deviation(s, xi));
        let (q_l, xi_i) = s.resolve(xi);
        if s.table().lookup(&q_l) == Some(&xi_i) {
            tabulated += 1;
        }
    }
    SchemeConditions {
        linked_deviation: worst,
        tabulated_errors: tabulated,
        syndromes_used: s.table().len(),
        leftover_syndromes: s.table().leftover().len(),
    }
}
