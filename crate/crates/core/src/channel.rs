//! Channels and instruments in Kraus form, the scheme's encoder, syndrome
//! measurement, correction and decoder, the noise class, and verification
//! that decoding undoes correctable noise.
//!
//! Channels are stored in the Schrödinger picture, `ρ ↦ Σ K ρ K†`; the
//! Heisenberg action `a ↦ Σ K† a K` is its adjoint.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::ffield::{FVec, Field};
use crate::phase::{PhaseVec, C64};
use crate::qspace::{
    embed, symplectic_transform, weyl_adjoint_left, weyl_coefficients, weyl_entries, weyl_left,
    CMatrix,
};
use crate::scheme::{error_basis_op, Scheme};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("Kraus operator has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("channels act on different spaces")]
    SpaceMismatch,
    #[error("coefficient matrix is not Hermitian")]
    NotHermitian,
    #[error("coefficient matrix is not positive semidefinite")]
    NotPsd,
    #[error("map is not trace preserving (defect {0:e})")]
    NotTracePreserving(f64),
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("error of weight {weight} is outside the correctable set (t = {t})")]
    Unsupported { weight: usize, t: usize },
    #[error("label list has {labels} entries but the matrix is {dim}x{dim}")]
    LabelCount { labels: usize, dim: usize },
}

/// A completely positive map between registers, in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct QChannel {
    field: Field,
    in_sites: usize,
    out_sites: usize,
    kraus: Vec<CMatrix>,
}

impl QChannel {
    pub fn new(
        field: Field,
        in_sites: usize,
        out_sites: usize,
        kraus: Vec<CMatrix>,
    ) -> Result<Self, ChannelError> {
        let expected = (field.space_size(out_sites), field.space_size(in_sites));
        for k in &kraus {
            if k.shape() != expected {
                return Err(ChannelError::ShapeMismatch {
                    expected,
                    found: k.shape(),
                });
            }
        }
        Ok(Self {
            field,
            in_sites,
            out_sites,
            kraus,
        })
    }

    pub fn identity(field: Field, sites: usize) -> Self {
        Self {
            field,
            in_sites: sites,
            out_sites: sites,
            kraus: vec![CMatrix::identity(field.space_size(sites))],
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn in_sites(&self) -> usize {
        self.in_sites
    }

    pub fn out_sites(&self) -> usize {
        self.out_sites
    }

    pub fn in_dim(&self) -> usize {
        self.field.space_size(self.in_sites)
    }

    pub fn out_dim(&self) -> usize {
        self.field.space_size(self.out_sites)
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Schrödinger action `ρ ↦ Σ K ρ K†`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.out_dim(), self.out_dim());
        for k in &self.kraus {
            out.add_assign(&k.mul(rho).mul(&k.adjoint()));
        }
        out
    }

    /// Heisenberg action `a ↦ Σ K† a K`.
    pub fn apply_heisenberg(&self, a: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.in_dim(), self.in_dim());
        for k in &self.kraus {
            out.add_assign(&k.adjoint().mul(a).mul(k));
        }
        out
    }

    /// `next ∘ self`: first `self`, then `next`.
    pub fn then(&self, next: &QChannel) -> Result<QChannel, ChannelError> {
        if self.out_sites != next.in_sites || self.field != next.field {
            return Err(ChannelError::SpaceMismatch);
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b.mul(a));
            }
        }
        Ok(QChannel {
            field: self.field,
            in_sites: self.in_sites,
            out_sites: next.out_sites,
            kraus,
        })
    }

    /// `‖Σ K†K − 1‖_F`; zero for a trace-preserving map.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.in_dim(), self.in_dim());
        for k in &self.kraus {
            sum.add_assign(&k.adjoint().mul(k));
        }
        sum.distance(&CMatrix::identity(self.in_dim()))
    }
}

/// Applies channels left to right in the Schrödinger picture.
pub fn apply_chain(chain: &[&QChannel], rho: &CMatrix) -> CMatrix {
    chain.iter().fold(rho.clone(), |acc, ch| ch.apply(&acc))
}

/// A measurement with outcomes in `F^M`; each outcome carries a CP map.
#[derive(Clone, Debug, PartialEq)]
pub struct Instrument {
    branches: Vec<(FVec, QChannel)>,
}

impl Instrument {
    pub fn new(branches: Vec<(FVec, QChannel)>) -> Self {
        Self { branches }
    }

    pub fn branches(&self) -> &[(FVec, QChannel)] {
        &self.branches
    }

    pub fn branch(&self, outcome: &FVec) -> Option<&QChannel> {
        self.branches
            .iter()
            .find(|(o, _)| o == outcome)
            .map(|(_, c)| c)
    }

    /// The channel obtained by discarding the outcome.
    pub fn channel(&self) -> QChannel {
        let first = &self.branches[0].1;
        QChannel {
            field: first.field,
            in_sites: first.in_sites,
            out_sites: first.out_sites,
            kraus: self
                .branches
                .iter()
                .flat_map(|(_, c)| c.kraus.iter().cloned())
                .collect(),
        }
    }

    /// `tr(T_outcome(ρ))`.
    pub fn probability(&self, outcome: &FVec, rho: &CMatrix) -> f64 {
        self.branch(outcome)
            .map(|c| c.apply(rho).trace().re)
            .unwrap_or(0.0)
    }
}

/// `ρ ↦ v ρ v†` with `v = v_{[Λ,0]}`.
pub fn encoder(s: &Scheme) -> QChannel {
    let g = s.graph();
    let v0 = s.isometry(&FVec::zeros(s.field(), g.n_syndromes()));
    QChannel {
        field: s.field(),
        in_sites: g.n_inputs(),
        out_sites: g.n_outputs(),
        kraus: vec![v0.clone()],
    }
}

/// Outcome `q^L` has the single Kraus operator `v_{[Λ,q^L]}†`.
pub fn syndrome_channel(s: &Scheme) -> Instrument {
    let g = s.graph();
    let branches = FVec::all(s.field(), g.n_syndromes())
        .map(|q_l| {
            let k = s.isometry(&q_l).adjoint();
            let ch = QChannel {
                field: s.field(),
                in_sites: g.n_outputs(),
                out_sites: g.n_inputs(),
                kraus: vec![k],
            };
            (q_l, ch)
        })
        .collect();
    Instrument::new(branches)
}

/// Outcome `q^L` applies `w(ξ^I_{[q^L]})†` on `H_I`; left-over syndromes
/// apply the identity.
pub fn correction_channel(s: &Scheme) -> Instrument {
    let n = s.graph().n_inputs();
    let id = CMatrix::identity(s.dim_inputs());
    let branches = FVec::all(s.field(), s.graph().n_syndromes())
        .map(|q_l| {
            let xi = s.correction(&q_l);
            let ch = QChannel {
                field: s.field(),
                in_sites: n,
                out_sites: n,
                kraus: vec![weyl_adjoint_left(&xi, &id)],
            };
            (q_l, ch)
        })
        .collect();
    Instrument::new(branches)
}

/// `D = SC` with Kraus operators `w(ξ^I_{[q^L]})† v_{[Λ,q^L]}†`.
pub fn decoder(s: &Scheme) -> QChannel {
    let g = s.graph();
    let kraus = FVec::all(s.field(), g.n_syndromes())
        .map(|q_l| weyl_adjoint_left(&s.correction(&q_l), &s.isometry(&q_l).adjoint()))
        .collect();
    QChannel {
        field: s.field(),
        in_sites: g.n_outputs(),
        out_sites: g.n_inputs(),
        kraus,
    }
}

/// Noise `T(a) = Σ t_{x,y} w_x† a w_y` over error labels `x, y ∈ Ξ^J_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseChannel {
    pub labels: Vec<PhaseVec>,
    pub tmat: CMatrix,
}

/// Pivoted Cholesky `t = C†C` of a Hermitian PSD matrix; returns the rows
/// of `C`.
pub fn psd_factor(t: &CMatrix, tol: f64) -> Result<Vec<Vec<C64>>, ChannelError> {
    let n = t.rows();
    if t.cols() != n {
        return Err(ChannelError::NotHermitian);
    }
    if t.distance(&t.adjoint()) > tol {
        return Err(ChannelError::NotHermitian);
    }
    let mut a = t.clone();
    let mut rows = Vec::new();
    for _ in 0..n {
        let (pivot, diag) =
            (0..n)
                .map(|k| (k, a[(k, k)].re))
                .fold((0, f64::NEG_INFINITY), |best, cur| {
                    if cur.1 > best.1 {
                        cur
                    } else {
                        best
                    }
                });
        if diag <= tol {
            break;
        }
        let s = libm::sqrt(diag);
        let r: Vec<C64> = (0..n).map(|y| a[(pivot, y)] / s).collect();
        for x in 0..n {
            for y in 0..n {
                a[(x, y)] -= r[x].conj() * r[y];
            }
        }
        rows.push(r);
    }
    let residual = a.max_abs();
    if residual > tol.max(1e-12) * (1.0 + t.max_abs()) * n as f64 {
        return Err(ChannelError::NotPsd);
    }
    Ok(rows)
}

/// Kraus form of the noise described by `tmat`: `K_k = Σ_y c_{k,y} w_{[Λ,y]}`
/// with `tmat = C†C`. Labels must lie in `Ξ^J_t`.
pub fn noise_from_matrix(
    s: &Scheme,
    noise: &NoiseChannel,
    tol: f64,
) -> Result<QChannel, ChannelError> {
    let n = noise.labels.len();
    if noise.tmat.shape() != (n, n) {
        return Err(ChannelError::LabelCount {
            labels: n,
            dim: noise.tmat.rows(),
        });
    }
    for xi in &noise.labels {
        if xi.weight() > s.t() {
            return Err(ChannelError::Unsupported {
                weight: xi.weight(),
                t: s.t(),
            });
        }
    }
    let g = s.graph();
    let basis: Vec<CMatrix> = noise
        .labels
        .iter()
        .map(|xi| error_basis_op(g, xi))
        .collect();
    let dim = s.dim_outputs();
    let kraus = psd_factor(&noise.tmat, tol)?
        .into_iter()
        .map(|row| {
            let mut k = CMatrix::zeros(dim, dim);
            for (c, w) in row.iter().zip(&basis) {
                k.axpy(*c, w);
            }
            k
        })
        .collect();
    let ch = QChannel::new(s.field(), g.n_outputs(), g.n_outputs(), kraus)?;
    let defect = ch.completeness_defect();
    if defect > tol.max(1e-9) {
        return Err(ChannelError::NotTracePreserving(defect));
    }
    Ok(ch)
}

/// Generalized Pauli channel with Kraus operators `√p_ξ w(ξ)`.
pub fn weyl_diagonal_noise(
    field: Field,
    sites: usize,
    probs: &[(PhaseVec, f64)],
) -> Result<QChannel, ChannelError> {
    let mut total = 0.0;
    for (_, p) in probs {
        if *p < 0.0 {
            return Err(ChannelError::NegativeProbability(*p));
        }
        total += p;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(ChannelError::NotNormalized(total));
    }
    let id = CMatrix::identity(field.space_size(sites));
    let kraus = probs
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(xi, p)| weyl_left(xi, &id).scale(C64::new(libm::sqrt(*p), 0.0)))
        .collect();
    QChannel::new(field, sites, sites, kraus)
}

/// Largest weight among Weyl operators in the expansion of any Kraus
/// operator (coefficients below `tol` are ignored).
pub fn max_error_weight(ch: &QChannel, tol: f64) -> usize {
    let dim = ch.in_dim();
    let mut worst = 0;
    for k in ch.kraus() {
        let coeffs = weyl_coefficients(ch.field(), ch.in_sites(), k);
        for (idx, c) in coeffs.iter().enumerate() {
            if c.norm() > tol {
                let xi = PhaseVec::from_index(ch.field(), ch.in_sites(), idx);
                worst = worst.max(xi.weight());
            }
        }
        debug_assert_eq!(coeffs.len(), dim * dim);
    }
    worst
}

/// Rejects noise whose Kraus operators leave the span of `Ξ^J_t`.
pub fn check_noise_support(s: &Scheme, noise: &QChannel) -> Result<(), ChannelError> {
    if noise.in_sites() != s.graph().n_outputs() || noise.out_sites() != noise.in_sites() {
        return Err(ChannelError::SpaceMismatch);
    }
    let weight = max_error_weight(noise, 1e-10);
    if weight > s.t() {
        return Err(ChannelError::Unsupported { weight, t: s.t() });
    }
    Ok(())
}

/// Random unit-norm complex matrix entries in the unit square.
fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random single-qudit channel with `rank` Kraus operators, from a random
/// isometry `C^d → C^{d·rank}` obtained by Gram–Schmidt.
pub fn random_site_channel<R: Rng + ?Sized>(
    field: Field,
    rank: usize,
    rng: &mut R,
) -> Vec<CMatrix> {
    let d = field.order() as usize;
    let rows = d * rank;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..rows).map(|_| random_entry(rng)).collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let norm = libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>());
        if norm < 1e-6 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        cols.push(v);
    }
    (0..rank)
        .map(|k| CMatrix::from_fn(d, d, |r, c| cols[c][k * d + r]))
        .collect()
}

/// A random member of the noise class for a `t ≥ 1` scheme: a convex mixture
/// of random single-site channels on the outputs, expressed through its
/// coefficient matrix over `Ξ^J_1`.
pub fn random_noise<R: Rng + ?Sized>(s: &Scheme, rng: &mut R) -> NoiseChannel {
    let f = s.field();
    let g = s.graph();
    let nj = g.n_outputs();
    let sites: Vec<usize> = (0..nj).collect();
    let mut weights: Vec<f64> = (0..nj).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let labels: Vec<PhaseVec> = s
        .errors()
        .elements()
        .iter()
        .filter(|xi| xi.weight() <= 1)
        .cloned()
        .collect();
    let basis: Vec<CMatrix> = labels.iter().map(|xi| error_basis_op(g, xi)).collect();
    let dim = s.dim_outputs();
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (site, w) in weights.iter().enumerate() {
        let rank = rng.gen_range(1..=3);
        for a in random_site_channel(f, rank, rng) {
            let k = embed(f, &a, &[site], &sites)
                .expect("site in register")
                .scale(C64::new(libm::sqrt(*w), 0.0));
            rows.push(basis.iter().map(|b| b.inner(&k) / dim as f64).collect());
        }
    }
    let n = labels.len();
    let tmat = CMatrix::from_fn(n, n, |x, y| rows.iter().map(|r| r[x].conj() * r[y]).sum());
    NoiseChannel { labels, tmat }
}

/// Distance proxy between two channels on the same spaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelDistance {
    /// `max_ξ ‖T1(w(ξ)) − T2(w(ξ))‖_F / ‖w(ξ)‖_F` over the input Weyl basis.
    pub weyl_max: f64,
    /// `ℓ1` distance of the Weyl error distributions when both channels are
    /// Weyl-diagonal.
    pub weyl_l1: Option<f64>,
}

impl ChannelDistance {
    /// The `ℓ1` distance when available, the Weyl-basis deviation otherwise.
    pub fn proxy(&self) -> f64 {
        self.weyl_l1.unwrap_or(self.weyl_max)
    }
}

/// Pauli-transfer eigenvalues `λ_ζ = tr(w_ζ† T(w_ζ)) / D` if `T` maps every
/// Weyl operator to a multiple of itself (up to `tol`).
pub fn transfer_eigenvalues(ch: &QChannel, tol: f64) -> Option<Vec<C64>> {
    if ch.in_sites != ch.out_sites {
        return None;
    }
    let dim = ch.in_dim();
    let id = CMatrix::identity(dim);
    let mut out = Vec::with_capacity(dim * dim);
    for xi in PhaseVec::all(ch.field, ch.in_sites) {
        let w = weyl_left(&xi, &id);
        let image = ch.apply(&w);
        let lambda = w.inner(&image) / dim as f64;
        if image.distance(&w.scale(lambda)) > tol {
            return None;
        }
        out.push(lambda);
    }
    Some(out)
}

/// Weyl error distribution `p_η` from Pauli-transfer eigenvalues.
pub fn probabilities_from_eigenvalues(field: Field, sites: usize, eigen: &[C64]) -> Vec<f64> {
    let dim = field.space_size(sites) as f64;
    let dim2 = dim * dim;
    symplectic_transform(field, sites, eigen)
        .into_iter()
        .map(|c| c.re / dim2)
        .collect()
}

/// Pauli-transfer eigenvalues from a Weyl error distribution.
pub fn eigenvalues_from_probabilities(field: Field, sites: usize, probs: &[f64]) -> Vec<C64> {
    let data: Vec<C64> = probs.iter().map(|&p| C64::new(p, 0.0)).collect();
    symplectic_transform(field, sites, &data)
}

/// Weyl error distribution from the diagonal of the process matrix:
/// `p_η = Σ_k |tr(w_η† K_k)|² / D²`.
pub fn weyl_probabilities(ch: &QChannel) -> Vec<f64> {
    let mut out = vec![0.0; ch.in_dim() * ch.in_dim()];
    for k in &ch.kraus {
        for (o, c) in out
            .iter_mut()
            .zip(weyl_coefficients(ch.field, ch.in_sites, k))
        {
            *o += c.norm_sqr();
        }
    }
    out
}

/// Largest superoperator, in entries, that `channel_distance` will form.
const SUPEROPERATOR_LIMIT: usize = 1 << 22;

/// `S[(a, b), (c, e)] = Σ_k K[a, c] conj K[b, e]`, so that
/// `T(ρ)[a, b] = Σ_{c,e} S[(a, b), (c, e)] ρ[c, e]`.
fn superoperator(ch: &QChannel) -> CMatrix {
    let (dout, din) = (ch.out_dim(), ch.in_dim());
    let mut s = CMatrix::zeros(dout * dout, din * din);
    for k in &ch.kraus {
        for a in 0..dout {
            for b in 0..dout {
                let row = a * dout + b;
                for c in 0..din {
                    let kac = k[(a, c)];
                    if kac == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for e in 0..din {
                        s[(row, c * din + e)] += kac * k[(b, e)].conj();
                    }
                }
            }
        }
    }
    s
}

/// `max_ξ ‖T1(w(ξ)) − T2(w(ξ))‖_F / ‖w(ξ)‖_F`.
fn weyl_max_deviation(a: &QChannel, b: &QChannel) -> f64 {
    let dim = a.in_dim();
    let norm = libm::sqrt(dim as f64);
    let mut worst: f64 = 0.0;
    if a.out_dim() * a.out_dim() * dim * dim <= SUPEROPERATOR_LIMIT {
        let diff = superoperator(a).sub(&superoperator(b));
        for xi in PhaseVec::all(a.field, a.in_sites) {
            let w = weyl_entries(&xi);
            let mut sq = 0.0;
            for r in 0..diff.rows() {
                let v: C64 = w
                    .iter()
                    .enumerate()
                    .map(|(c, &(e, x))| diff[(r, c * dim + e)] * x)
                    .sum();
                sq += v.norm_sqr();
            }
            worst = worst.max(libm::sqrt(sq) / norm);
        }
        return worst;
    }
    let id = CMatrix::identity(dim);
    for xi in PhaseVec::all(a.field, a.in_sites) {
        let w = weyl_left(&xi, &id);
        worst = worst.max(a.apply(&w).distance(&b.apply(&w)) / norm);
    }
    worst
}

pub fn channel_distance(a: &QChannel, b: &QChannel) -> Result<ChannelDistance, ChannelError> {
    if a.field != b.field || a.in_sites != b.in_sites || a.out_sites != b.out_sites {
        return Err(ChannelError::SpaceMismatch);
    }
    let worst = weyl_max_deviation(a, b);
    let l1 = match (transfer_eigenvalues(a, 1e-9), transfer_eigenvalues(b, 1e-9)) {
        (Some(ea), Some(eb)) => {
            let pa = probabilities_from_eigenvalues(a.field, a.in_sites, &ea);
            let pb = probabilities_from_eigenvalues(b.field, b.in_sites, &eb);
            Some(pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum())
        }
        _ => None,
    };
    Ok(ChannelDistance {
        weyl_max: worst,
        weyl_l1: l1,
    })
}

/// `max_ξ ‖(D∘T∘E)(w(ξ)) − w(ξ)‖_F / ‖w(ξ)‖_F` over the Weyl basis of `H_I`.
pub fn verify_theorem1(s: &Scheme, noise: &QChannel) -> Result<f64, ChannelError> {
    check_noise_support(s, noise)?;
    let e = encoder(s);
    let d = decoder(s);
    let dim = s.dim_inputs();
    let id = CMatrix::identity(dim);
    let norm = libm::sqrt(dim as f64);
    let mut worst: f64 = 0.0;
    for xi in PhaseVec::all(s.field(), s.graph().n_inputs()) {
        let w = weyl_left(&xi, &id);
        let out = apply_chain(&[&e, noise, &d], &w);
        worst = worst.max(out.distance(&w) / norm);
    }
    Ok(worst)
}
