//! Dense Hilbert-space layer.
//!
//! A register of `n` qudits is the space of functions on `F^n` with
//! dimension `d^n`. Basis states are ordered lexicographically with the first
//! site most significant, matching [`FVec::to_index`]. All operators are
//! expressed in the orthonormal point-mass basis, so the normalized Haar
//! integral `∫dq = d^{-n} Σ_q` together with the `√d^n` prefactors reduces to
//! a single `d^{-n/2} Σ_q`.

mod matrix;

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use thiserror::Error;

pub use matrix::CMatrix;

use crate::ffield::{FMat, FVec, Field, FieldError};
use crate::phase::{chi, epsilon, tau_exponent, PhaseError, PhaseVec, C64};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSpaceError {
    #[error("site {0} is not part of the ambient register")]
    UnknownSite(usize),
    #[error("site list must be strictly increasing")]
    UnsortedSites,
    #[error("operator dimension {found} does not match register dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A pure state on a register of `n` qudits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVec {
    field: Field,
    sites: usize,
    amps: Vec<C64>,
}

impl StateVec {
    pub fn new(field: Field, sites: usize, amps: Vec<C64>) -> Result<Self, QSpaceError> {
        let dim = field.space_size(sites);
        if amps.len() != dim {
            return Err(QSpaceError::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        Ok(Self { field, sites, amps })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn norm(&self) -> f64 {
        Float::sqrt(self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>())
    }

    pub fn apply(&self, op: &CMatrix) -> Result<StateVec, QSpaceError> {
        if op.cols() != self.amps.len() || op.rows() != self.amps.len() {
            return Err(QSpaceError::DimensionMismatch {
                expected: self.amps.len(),
                found: op.cols(),
            });
        }
        Ok(StateVec {
            amps: op.mul_vec(&self.amps),
            ..self.clone()
        })
    }

    pub fn as_column(&self) -> CMatrix {
        CMatrix::column(&self.amps)
    }
}

/// The shift-invariant standard vector: the normalized constant function.
pub fn omega(field: Field, sites: usize) -> StateVec {
    let dim = field.space_size(sites);
    let a = 1.0 / Float::sqrt(dim as f64);
    StateVec {
        field,
        sites,
        amps: vec![C64::new(a, 0.0); dim],
    }
}

/// Digit-wise `a + s·q` on register indices.
fn shift_index(field: Field, sites: usize, a: usize, q: &FVec, negate: bool) -> usize {
    let d = field.order() as usize;
    let mut rest = a;
    let mut out = 0;
    let mut place = 1;
    for k in (0..sites).rev() {
        let digit = (rest % d) as u32;
        rest /= d;
        let shifted = if negate {
            field.sub(digit, q.get(k))
        } else {
            field.add(digit, q.get(k))
        };
        out += shifted as usize * place;
        place *= d;
    }
    out
}

/// `(x(q)ψ)(a) = ψ(a − q)`, i.e. `x(q)|a⟩ = |a + q⟩`.
pub fn shift_op(q: &FVec) -> CMatrix {
    let field = q.field();
    let n = q.len();
    let dim = field.space_size(n);
    let mut m = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        m[(a, shift_index(field, n, a, q, true))] = C64::new(1.0, 0.0);
    }
    m
}

/// `(z(p)ψ)(q) = χ(p, q) ψ(q)`.
pub fn mult_op(p: &FVec) -> CMatrix {
    let diag: Vec<C64> = FVec::all(p.field(), p.len())
        .map(|q| chi(p, &q).expect("same length"))
        .collect();
    CMatrix::diagonal(&diag)
}

/// `w(ξ) = z(p) x(q)`.
pub fn weyl(xi: &PhaseVec) -> CMatrix {
    weyl_left(xi, &CMatrix::identity(xi.field().space_size(xi.len())))
}

fn chi_table(xi_p: &FVec) -> Vec<C64> {
    let f = xi_p.field();
    FVec::all(f, xi_p.len())
        .map(|a| epsilon(f, xi_p.dot(&a).expect("same length")))
        .collect()
}

/// The one nonzero entry of each row of `w(ξ)`: row `a` holds `χ(p, a)` in
/// column `a − q`.
pub fn weyl_entries(xi: &PhaseVec) -> Vec<(usize, C64)> {
    let field = xi.field();
    let n = xi.len();
    chi_table(&xi.p)
        .into_iter()
        .enumerate()
        .map(|(a, phase)| (shift_index(field, n, a, &xi.q, true), phase))
        .collect()
}

/// `w(ξ) · m` without forming `w(ξ)`: `(w m)[a, :] = χ(p, a) m[a − q, :]`.
pub fn weyl_left(xi: &PhaseVec, m: &CMatrix) -> CMatrix {
    let field = xi.field();
    let n = xi.len();
    let dim = field.space_size(n);
    assert_eq!(m.rows(), dim, "operand rows must match the register");
    let phases = chi_table(&xi.p);
    CMatrix::from_fn(dim, m.cols(), |a, c| {
        phases[a] * m[(shift_index(field, n, a, &xi.q, true), c)]
    })
}

/// `w(ξ)† · m`: `(w† m)[a, :] = conj χ(p, a + q) m[a + q, :]`.
pub fn weyl_adjoint_left(xi: &PhaseVec, m: &CMatrix) -> CMatrix {
    let field = xi.field();
    let n = xi.len();
    let dim = field.space_size(n);
    assert_eq!(m.rows(), dim, "operand rows must match the register");
    let phases = chi_table(&xi.p);
    CMatrix::from_fn(dim, m.cols(), |a, c| {
        let b = shift_index(field, n, a, &xi.q, false);
        phases[b].conj() * m[(b, c)]
    })
}

/// `m · w(ξ)`: `(m w)[:, b] = χ(p, b + q) m[:, b + q]`.
pub fn weyl_right(m: &CMatrix, xi: &PhaseVec) -> CMatrix {
    let field = xi.field();
    let n = xi.len();
    let dim = field.space_size(n);
    assert_eq!(m.cols(), dim, "operand columns must match the register");
    let phases = chi_table(&xi.p);
    CMatrix::from_fn(m.rows(), dim, |r, b| {
        let a = shift_index(field, n, b, &xi.q, false);
        phases[a] * m[(r, a)]
    })
}

/// `(F ψ)(p) = d^{-n/2} Σ_q χ(p, q) ψ(q)`; maps the x-basis to the z-basis.
pub fn fourier(field: Field, sites: usize) -> CMatrix {
    let dim = field.space_size(sites);
    let norm = 1.0 / Float::sqrt(dim as f64);
    let pts: Vec<FVec> = FVec::all(field, sites).collect();
    CMatrix::from_fn(dim, dim, |p, q| {
        chi(&pts[p], &pts[q]).expect("same length") * norm
    })
}

/// Diagonal of `u(sign·Γ)`: `τ(sign·Γ, q)` for every `q`.
pub fn graph_phases(gamma: &FMat, sign: i8) -> Result<Vec<C64>, QSpaceError> {
    let f = gamma.field();
    let n = gamma.rows();
    FVec::all(f, n)
        .map(|q| {
            let e = tau_exponent(gamma, &q)?;
            let e = if sign < 0 { f.neg(e) } else { e };
            Ok(epsilon(f, e))
        })
        .collect()
}

/// `(u(Γ)ψ)(q) = τ(Γ, q) ψ(q)`; `sign = -1` realizes the graph `−Γ`.
pub fn graph_unitary(gamma: &FMat, sign: i8) -> Result<CMatrix, QSpaceError> {
    Ok(CMatrix::diagonal(&graph_phases(gamma, sign)?))
}

/// An operator between registers labelled by vertex ids.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOp {
    pub domain: Vec<usize>,
    pub codomain: Vec<usize>,
    pub matrix: CMatrix,
}

fn check_sorted(sites: &[usize]) -> Result<(), QSpaceError> {
    if sites.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(QSpaceError::UnsortedSites)
    }
}

/// Tensors an operator acting on `sites` with the identity on the rest of
/// `ambient`. Both site lists are increasing vertex ids.
pub fn embed(
    field: Field,
    op: &CMatrix,
    sites: &[usize],
    ambient: &[usize],
) -> Result<CMatrix, QSpaceError> {
    check_sorted(sites)?;
    check_sorted(ambient)?;
    let positions: Vec<usize> = sites
        .iter()
        .map(|s| {
            ambient
                .iter()
                .position(|a| a == s)
                .ok_or(QSpaceError::UnknownSite(*s))
        })
        .collect::<Result<_, _>>()?;
    let sub_dim = field.space_size(sites.len());
    if op.rows() != sub_dim || op.cols() != sub_dim {
        return Err(QSpaceError::DimensionMismatch {
            expected: sub_dim,
            found: op.rows(),
        });
    }
    let n = ambient.len();
    let dim = field.space_size(n);
    let mut out = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        let av = FVec::from_index(field, n, a);
        let a_sub = av.select(&positions).to_index();
        for b_sub in 0..sub_dim {
            let v = op[(a_sub, b_sub)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let bs = FVec::from_index(field, sites.len(), b_sub);
            let mut bv = av.clone();
            for (k, &pos) in positions.iter().enumerate() {
                bv.set(pos, bs.get(k));
            }
            out[(a, bv.to_index())] = v;
        }
    }
    Ok(out)
}

impl DenseOp {
    /// Embeds a square operator into a larger ambient register.
    pub fn embed(&self, field: Field, ambient: &[usize]) -> Result<DenseOp, QSpaceError> {
        Ok(DenseOp {
            domain: ambient.to_vec(),
            codomain: ambient.to_vec(),
            matrix: embed(field, &self.matrix, &self.domain, ambient)?,
        })
    }
}

/// In-place multidimensional character transform along every site:
/// `y(k) = Σ_j ε(s·k·j) x(j)` with `s = ±1`.
pub(crate) fn site_dft(field: Field, sites: usize, data: &mut [C64], inverse: bool) {
    let d = field.order() as usize;
    let roots: Vec<C64> = (0..d)
        .map(|k| {
            let e = epsilon(field, k as u32);
            if inverse {
                e.conj()
            } else {
                e
            }
        })
        .collect();
    let mut fiber = vec![C64::new(0.0, 0.0); d];
    let mut stride = 1;
    for _ in 0..sites {
        let block = stride * d;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for (j, slot) in fiber.iter_mut().enumerate() {
                    *slot = data[base + off + j * stride];
                }
                for k in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, &x) in fiber.iter().enumerate() {
                        acc += roots[(k * j) % d] * x;
                    }
                    data[base + off + k * stride] = acc;
                }
            }
        }
        stride = block;
    }
}

/// Weyl expansion `m = Σ_ξ c_ξ w(ξ)` with `c_ξ = tr(w(ξ)† m) / d^n`.
/// Coefficients are indexed by [`PhaseVec::to_index`].
pub fn weyl_coefficients(field: Field, sites: usize, m: &CMatrix) -> Vec<C64> {
    let dim = field.space_size(sites);
    assert_eq!(m.shape(), (dim, dim));
    let mut coeffs = vec![C64::new(0.0, 0.0); dim * dim];
    let mut column = vec![C64::new(0.0, 0.0); dim];
    let scale = 1.0 / dim as f64;
    for qi in 0..dim {
        let q = FVec::from_index(field, sites, qi);
        for (a, slot) in column.iter_mut().enumerate() {
            *slot = m[(a, shift_index(field, sites, a, &q, true))];
        }
        // c(p, q) = d^{-n} Σ_a conj χ(p, a) m[a, a − q]
        site_dft(field, sites, &mut column, true);
        for (p, &v) in column.iter().enumerate() {
            coeffs[p * dim + qi] = v * scale;
        }
    }
    coeffs
}

/// Inverse of [`weyl_coefficients`].
pub fn from_weyl_coefficients(field: Field, sites: usize, coeffs: &[C64]) -> CMatrix {
    let dim = field.space_size(sites);
    assert_eq!(coeffs.len(), dim * dim);
    let mut m = CMatrix::zeros(dim, dim);
    let mut column = vec![C64::new(0.0, 0.0); dim];
    for qi in 0..dim {
        let q = FVec::from_index(field, sites, qi);
        for (p, slot) in column.iter_mut().enumerate() {
            *slot = coeffs[p * dim + qi];
        }
        site_dft(field, sites, &mut column, false);
        for (a, &v) in column.iter().enumerate() {
            m[(a, shift_index(field, sites, a, &q, true))] = v;
        }
    }
    m
}

/// Symplectic Fourier transform on functions of `Ξ^n` indexed by
/// [`PhaseVec::to_index`]:
/// `out(P, Q) = Σ_{(x, y)} ε(x·Q − y·P) f(x, y)`.
///
/// It maps Weyl-channel probabilities to Pauli-transfer eigenvalues, and
/// applying it twice multiplies by `d^{2n}`.
pub fn symplectic_transform(field: Field, sites: usize, f: &[C64]) -> Vec<C64> {
    let dim = field.space_size(sites);
    assert_eq!(f.len(), dim * dim);
    let mut g = f.to_vec();
    for row in g.chunks_mut(dim) {
        site_dft(field, sites, row, true);
    }
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    let mut column = vec![C64::new(0.0, 0.0); dim];
    for big_p in 0..dim {
        for (x, slot) in column.iter_mut().enumerate() {
            *slot = g[x * dim + big_p];
        }
        site_dft(field, sites, &mut column, false);
        for (big_q, &v) in column.iter().enumerate() {
            out[big_p * dim + big_q] = v;
        }
    }
    out
}
