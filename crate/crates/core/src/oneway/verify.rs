//! Comparison of compiled programs with the directly constructed channels.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{
    assemble_decoder, assemble_decoder_five, assemble_encoder, assemble_syndrome, OneWayError,
};
use crate::channel::{channel_distance, decoder, syndrome_channel, Instrument, QChannel};
use crate::ffield::FVec;
use crate::graph::CodingGraph;
use crate::phase::{tau, PhaseVec, C64};
use crate::qspace::{fourier, shift_op, weyl_left, CMatrix};
use crate::scheme::{isometry_matrix, Scheme};

fn distance(a: &QChannel, b: &QChannel) -> f64 {
    channel_distance(a, b).expect("same spaces").weyl_max
}

fn instrument_distance(a: &Instrument, b: &Instrument) -> f64 {
    let mut worst: f64 = 0.0;
    for (outcome, ch) in b.branches() {
        let dev = match a.branch(outcome) {
            Some(other) => distance(other, ch),
            None => {
                let zero = QChannel::new(ch.field(), ch.in_sites(), ch.out_sites(), Vec::new())
                    .expect("empty channel");
                distance(&zero, ch)
            }
        };
        worst = worst.max(dev);
    }
    worst
}

/// Compiled encoder program versus `ρ ↦ v ρ v†`.
pub fn verify_cor_encode(g: &CodingGraph) -> Result<f64, OneWayError> {
    let prog = assemble_encoder(g)?;
    let compiled = prog.compile()?.channel();
    let v0 = isometry_matrix(g, &FVec::zeros(g.field(), g.n_syndromes()));
    let direct =
        QChannel::new(g.field(), g.n_inputs(), g.n_outputs(), alloc::vec![v0]).expect("shape");
    Ok(distance(&compiled, &direct))
}

/// Compiled syndrome program versus `S`, outcome by outcome.
pub fn verify_thm_syndrome(s: &Scheme) -> Result<f64, OneWayError> {
    let prog = assemble_syndrome(s);
    let compiled = prog.compile()?;
    let last = *prog
        .measurement_steps()
        .last()
        .expect("syndrome measurement");
    Ok(instrument_distance(
        &compiled.instrument(&[last]),
        &syndrome_channel(s),
    ))
}

/// `max_{q^L} ‖Φ_L† F_L† x(q^L)† u_{[−Λ,J]} − v_{[Λ,q^L]}†‖_F`, where
/// `u_{[−Λ,J]}[q^{IL}, q^J] = d^{-|J|/2} conj τ(Λ, q^{IJL})`.
pub fn syndrome_projection_deviation(s: &Scheme) -> f64 {
    let g = s.graph();
    let f = g.field();
    let (ni, nj, nl) = (g.n_inputs(), g.n_outputs(), g.n_syndromes());
    let dil = f.space_size(ni + nl);
    let dj = f.space_size(nj);
    let norm = 1.0 / libm::sqrt(dj as f64);
    let outputs: Vec<FVec> = FVec::all(f, nj).collect();
    let mut u = CMatrix::zeros(dil, dj);
    for (row, q_il) in FVec::all(f, ni + nl).enumerate() {
        let q_i = q_il.slice(0, ni);
        let q_l = q_il.slice(ni, ni + nl);
        for (col, q_j) in outputs.iter().enumerate() {
            let full = g.join(&q_i, q_j, &q_l);
            u[(row, col)] = tau(g.lambda(), &full).expect("valid graph").conj() * norm;
        }
    }
    let dl = f.space_size(nl);
    let omega_bra = CMatrix::from_vec(
        1,
        dl,
        alloc::vec![C64::new(1.0 / libm::sqrt(dl as f64), 0.0); dl],
    );
    let f_adj = fourier(f, nl).adjoint();
    let id_i = CMatrix::identity(f.space_size(ni));
    let mut worst: f64 = 0.0;
    for q_l in FVec::all(f, nl) {
        let row = omega_bra.mul(&f_adj).mul(&shift_op(&q_l).adjoint());
        let lhs = id_i.kron(&row).mul(&u);
        worst = worst.max(lhs.distance(&s.isometry(&q_l).adjoint()));
    }
    worst
}

/// Kraus-level comparison of the five-step decoder (outcome `(m^J, q^L)`)
/// with the four-step decoder (outcome `(m^J, m^L)`), paired through
/// `q^L = m^L − Λ̄^L_J m^J`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureReport {
    /// `max ‖r − r′‖_F`.
    pub exact: f64,
    /// `max min_φ ‖r − e^{iφ} r′‖_F`, the distance of the rank-one CP maps.
    pub up_to_phase: f64,
    pub outcomes: usize,
}

pub fn verify_thm_measure(s: &Scheme) -> Result<MeasureReport, OneWayError> {
    let five = assemble_decoder_five(s).compile()?;
    let four = assemble_decoder(s).compile()?;
    let mut by_outcome: BTreeMap<(FVec, FVec), &CMatrix> = BTreeMap::new();
    for b in &five.branches {
        let key = (
            b.outcome(2).expect("J").clone(),
            b.outcome(4).expect("L").clone(),
        );
        by_outcome.insert(key, &b.kraus);
    }
    let bar_l = s.inverse_syndromes();
    let mut exact: f64 = 0.0;
    let mut phase: f64 = 0.0;
    for b in &four.branches {
        let m_j = b.outcome(2).expect("J");
        let m_l = b.outcome(3).expect("L");
        let q_l = m_l.sub(&bar_l.mul_vec(m_j).expect("shape")).expect("shape");
        let r = by_outcome[&(m_j.clone(), q_l)];
        let r_prime = &b.kraus;
        exact = exact.max(r.distance(r_prime));
        let overlap = r_prime.inner(r);
        let rot = if overlap.norm() > 1e-300 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        phase = phase.max(r.distance(&r_prime.scale(rot)));
    }
    Ok(MeasureReport {
        exact,
        up_to_phase: phase,
        outcomes: four.branches.len(),
    })
}

/// Compiled four-step and five-step decoders versus `D`.
pub fn verify_cor_decode(s: &Scheme) -> Result<(f64, f64), OneWayError> {
    let direct = decoder(s);
    let four = assemble_decoder(s).compile()?.channel();
    let five = assemble_decoder_five(s).compile()?.channel();
    Ok((distance(&four, &direct), distance(&five, &direct)))
}

/// Deviations of each program with its feed-forward steps removed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AblationReport {
    pub encoder: f64,
    pub syndrome: f64,
    pub decoder: f64,
    pub decoder_five: f64,
}

pub fn ablation_deviations(s: &Scheme) -> Result<AblationReport, OneWayError> {
    let g = s.graph();
    let v0 = s.isometry(&FVec::zeros(g.field(), g.n_syndromes())).clone();
    let enc =
        QChannel::new(g.field(), g.n_inputs(), g.n_outputs(), alloc::vec![v0]).expect("shape");
    let encoder = distance(
        &assemble_encoder(g)?
            .without_feedforward()
            .compile()?
            .channel(),
        &enc,
    );
    let syn_prog = assemble_syndrome(s).without_feedforward();
    let last = *syn_prog
        .measurement_steps()
        .last()
        .expect("syndrome measurement");
    let syndrome = instrument_distance(
        &syn_prog.compile()?.instrument(&[last]),
        &syndrome_channel(s),
    );
    let direct = decoder(s);
    let dec = distance(
        &assemble_decoder(s)
            .without_feedforward()
            .compile()?
            .channel(),
        &direct,
    );
    let dec5 = distance(
        &assemble_decoder_five(s)
            .without_feedforward()
            .compile()?
            .channel(),
        &direct,
    );
    Ok(AblationReport {
        encoder,
        syndrome,
        decoder: dec,
        decoder_five: dec5,
    })
}

/// Encoder program, the error `w(ξ^J)`, decoder program: deviation of the
/// composite from the identity on `H_I`.
pub fn roundtrip_deviation(s: &Scheme, error: &PhaseVec) -> Result<f64, OneWayError> {
    let g = s.graph();
    let enc = assemble_encoder(g)?.compile()?.channel();
    let dec = assemble_decoder(s).compile()?.channel();
    let w = weyl_left(error, &CMatrix::identity(s.dim_outputs()));
    let err =
        QChannel::new(g.field(), g.n_outputs(), g.n_outputs(), alloc::vec![w]).expect("shape");
    let total = enc
        .then(&err)
        .and_then(|c| c.then(&dec))
        .expect("spaces chain");
    Ok(distance(
        &total,
        &QChannel::identity(g.field(), g.n_inputs()),
    ))
}
