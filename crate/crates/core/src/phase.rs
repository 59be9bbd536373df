//! Discrete phase space `Ξ = F^n ⊕ F^n`, the additive character `ε`, the
//! bicharacter `χ`, graph phases `τ(Λ, ·)` and weight-bounded balls.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::ffield::{FMat, FVec, Field, FieldError};

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("adjacency matrix has nonzero diagonal entry at vertex {0}")]
    NonzeroDiagonal(usize),
    #[error("adjacency matrix is not symmetric")]
    NotSymmetric,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `ε(x) = exp(2πi x / d)`.
pub fn epsilon(field: Field, x: u32) -> C64 {
    let d = field.order();
    let x = x % d;
    if x == 0 {
        return C64::new(1.0, 0.0);
    }
    C64::from_polar(1.0, 2.0 * PI * x as f64 / d as f64)
}

/// `χ(p, q) = Π_i ε(p_i q_i)`.
pub fn chi(p: &FVec, q: &FVec) -> Result<C64, PhaseError> {
    Ok(epsilon(p.field(), p.dot(q)?))
}

fn check_graph(lambda: &FMat) -> Result<(), PhaseError> {
    if !lambda.is_symmetric() {
        return Err(PhaseError::NotSymmetric);
    }
    if let Some(k) = (0..lambda.rows()).find(|&k| lambda.get(k, k) != 0) {
        return Err(PhaseError::NonzeroDiagonal(k));
    }
    Ok(())
}

/// Exponent of the graph phase: `Σ_{k<l} Λ_kl q_k q_l`.
pub fn tau_exponent(lambda: &FMat, q: &FVec) -> Result<u32, PhaseError> {
    check_graph(lambda)?;
    if q.len() != lambda.rows() {
        return Err(FieldError::DimensionMismatch {
            expected: lambda.rows(),
            found: q.len(),
        }
        .into());
    }
    Ok(tau_exponent_unchecked(lambda, q.entries()))
}

pub(crate) fn tau_exponent_unchecked(lambda: &FMat, q: &[u32]) -> u32 {
    let f = lambda.field();
    let mut acc = 0;
    for k in 0..q.len() {
        if q[k] == 0 {
            continue;
        }
        for l in (k + 1)..q.len() {
            let w = lambda.get(k, l);
            if w != 0 && q[l] != 0 {
                acc = f.add(acc, f.mul(w, f.mul(q[k], q[l])));
            }
        }
    }
    acc
}

/// `τ(Λ, q) = ε(Σ_{k<l} Λ_kl q_k q_l)`, a projective representation with
/// `τ(q1+q2) = τ(q1) τ(q2) χ(Λ q1, q2)`.
pub fn tau(lambda: &FMat, q: &FVec) -> Result<C64, PhaseError> {
    Ok(epsilon(lambda.field(), tau_exponent(lambda, q)?))
}

/// A point `ξ = (p, q)` of discrete phase space: momentum `p`, position `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseVec {
    pub p: FVec,
    pub q: FVec,
}

impl PhaseVec {
    pub fn new(p: FVec, q: FVec) -> Result<Self, PhaseError> {
        if p.len() != q.len() {
            return Err(FieldError::DimensionMismatch {
                expected: p.len(),
                found: q.len(),
            }
            .into());
        }
        if p.field() != q.field() {
            return Err(FieldError::ModulusMismatch(p.field().order(), q.field().order()).into());
        }
        Ok(Self { p, q })
    }

    pub fn zero(field: Field, n: usize) -> Self {
        Self {
            p: FVec::zeros(field, n),
            q: FVec::zeros(field, n),
        }
    }

    pub fn field(&self) -> Field {
        self.p.field()
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Number of sites `j` with `(p_j, q_j) ≠ (0, 0)`.
    pub fn weight(&self) -> usize {
        self.p
            .entries()
            .iter()
            .zip(self.q.entries())
            .filter(|(&a, &b)| a != 0 || b != 0)
            .count()
    }

    pub fn add(&self, other: &PhaseVec) -> Result<PhaseVec, PhaseError> {
        Ok(PhaseVec {
            p: self.p.add(&other.p)?,
            q: self.q.add(&other.q)?,
        })
    }

    pub fn sub(&self, other: &PhaseVec) -> Result<PhaseVec, PhaseError> {
        Ok(PhaseVec {
            p: self.p.sub(&other.p)?,
            q: self.q.sub(&other.q)?,
        })
    }

    pub fn neg(&self) -> PhaseVec {
        PhaseVec {
            p: self.p.neg(),
            q: self.q.neg(),
        }
    }

    /// Index into `F^{2n}` with `p` most significant; see [`PhaseVec::from_index`].
    pub fn to_index(&self) -> usize {
        self.p.to_index() * self.field().space_size(self.len()) + self.q.to_index()
    }

    pub fn from_index(field: Field, n: usize, index: usize) -> Self {
        let size = field.space_size(n);
        Self {
            p: FVec::from_index(field, n, index / size),
            q: FVec::from_index(field, n, index % size),
        }
    }

    /// All `d^{2n}` phase-space points in index order.
    pub fn all(field: Field, n: usize) -> impl Iterator<Item = PhaseVec> {
        let size = field.space_size(n);
        (0..size * size).map(move |i| PhaseVec::from_index(field, n, i))
    }

    /// Restriction to the given site positions.
    pub fn select(&self, sites: &[usize]) -> PhaseVec {
        PhaseVec {
            p: self.p.select(sites),
            q: self.q.select(sites),
        }
    }

    /// Exponent `s` with `w(self) w(other) w(self)† = ε(s) w(other)`.
    pub fn commutation_exponent(&self, other: &PhaseVec) -> Result<u32, PhaseError> {
        let f = self.field();
        Ok(f.sub(self.p.dot(&other.q)?, other.p.dot(&self.q)?))
    }
}

/// Size of the weight-≤`t` ball in `Ξ^n` over `F_d`:
/// `Σ_{k≤t} C(n,k) (d²−1)^k`.
pub fn ball_size(field: Field, n: usize, t: usize) -> usize {
    let per_site = (field.order() as usize).pow(2) - 1;
    let mut total = 0;
    let mut binom = 1usize;
    for k in 0..=t.min(n) {
        total += binom * per_site.pow(k as u32);
        binom = binom * (n - k) / (k + 1);
    }
    total
}

/// All phase-space vectors on `n` sites with weight at most `t`, ordered by
/// weight, then support (lexicographic), then values.
#[derive(Clone, Debug)]
pub struct PhaseBall {
    field: Field,
    sites: usize,
    t: usize,
    elements: Vec<PhaseVec>,
    lookup: BTreeMap<PhaseVec, usize>,
}

impl PhaseBall {
    pub fn new(field: Field, sites: usize, t: usize) -> Self {
        let d = field.order();
        let mut elements = Vec::with_capacity(ball_size(field, sites, t));
        for k in 0..=t.min(sites) {
            for support in subsets(sites, k) {
                // each supported site takes one of the d²-1 nonzero (p, q)
                let per_site = (d * d - 1) as usize;
                for code in 0..per_site.pow(k as u32) {
                    let mut xi = PhaseVec::zero(field, sites);
                    let mut rest = code;
                    for &site in support.iter().rev() {
                        let local = (rest % per_site) as u32 + 1;
                        rest /= per_site;
                        xi.p.set(site, local / d);
                        xi.q.set(site, local % d);
                    }
                    elements.push(xi);
                }
            }
        }
        let lookup = elements
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), i))
            .collect();
        Self {
            field,
            sites,
            t,
            elements,
            lookup,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PhaseVec] {
        &self.elements
    }

    pub fn position(&self, xi: &PhaseVec) -> Option<usize> {
        self.lookup.get(xi).copied()
    }

    pub fn contains(&self, xi: &PhaseVec) -> bool {
        self.lookup.contains_key(xi)
    }
}

pub fn phase_ball(field: Field, sites: usize, t: usize) -> PhaseBall {
    PhaseBall::new(field, sites, t)
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn f(d: u32) -> Field {
        Field::new(d).unwrap()
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon(f(7), 0), C64::new(1.0, 0.0));
        assert!(close(epsilon(f(2), 1), C64::new(-1.0, 0.0)));
        let e = epsilon(f(3), 1);
        assert!(close(e * e * e, C64::new(1.0, 0.0)));
        assert!(!close(e, C64::new(1.0, 0.0)));
    }

    #[test]
    fn epsilon_is_faithful_homomorphism() {
        for d in [2, 3, 5, 7] {
            let fd = f(d);
            for a in 0..d {
                if a != 0 {
                    assert!(!close(epsilon(fd, a), C64::new(1.0, 0.0)));
                }
                for b in 0..d {
                    assert!(close(
                        epsilon(fd, fd.add(a, b)),
                        epsilon(fd, a) * epsilon(fd, b)
                    ));
                }
            }
        }
    }

    #[test]
    fn chi_examples() {
        let f2 = f(2);
        let one = FVec::new(f2, vec![1]);
        assert!(close(chi(&one, &one).unwrap(), C64::new(-1.0, 0.0)));
        let f3 = f(3);
        for q in FVec::all(f3, 3) {
            assert!(close(
                chi(&FVec::zeros(f3, 3), &q).unwrap(),
                C64::new(1.0, 0.0)
            ));
        }
    }

    #[test]
    fn chi_symmetric_and_biadditive_exhaustive() {
        for d in [2u32, 3] {
            let fd = f(d);
            for n in 1..=2 {
                let all: Vec<FVec> = FVec::all(fd, n).collect();
                for p1 in &all {
                    for q in &all {
                        let c = chi(p1, q).unwrap();
                        assert!(close(c, chi(q, p1).unwrap()));
                        for p2 in &all {
                            let direct: C64 = (0..n)
                                .map(|i| {
                                    epsilon(fd, fd.mul(fd.add(p1.get(i), p2.get(i)), q.get(i)))
                                })
                                .product();
                            let lhs = chi(&p1.add(p2).unwrap(), q).unwrap();
                            assert!(close(lhs, direct));
                            assert!(close(lhs, c * chi(p2, q).unwrap()));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tau_examples() {
        let f2 = f(2);
        let edge = FMat::from_rows(f2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(close(
            tau(&edge, &FVec::zeros(f2, 2)).unwrap(),
            C64::new(1.0, 0.0)
        ));
        assert!(close(
            tau(&edge, &FVec::new(f2, vec![1, 1])).unwrap(),
            C64::new(-1.0, 0.0)
        ));
        let loopy = FMat::from_rows(f2, &[vec![1, 0], vec![0, 0]]).unwrap();
        assert_eq!(
            tau(&loopy, &FVec::zeros(f2, 2)),
            Err(PhaseError::NonzeroDiagonal(0))
        );
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball_size(f(2), 5, 1), 16);
        assert_eq!(ball_size(f(3), 5, 1), 41);
        assert_eq!(PhaseBall::new(f(2), 5, 1).len(), 16);
        assert_eq!(PhaseBall::new(f(3), 5, 1).len(), 41);
        assert_eq!(PhaseBall::new(f(2), 3, 0).len(), 1);
        assert_eq!(PhaseVec::zero(f(3), 4).weight(), 0);
    }

    #[test]
    fn ball_matches_filtered_space() {
        for d in [2u32, 3] {
            let fd = f(d);
            for n in 1..=3 {
                for t in 0..=n {
                    let ball = PhaseBall::new(fd, n, t);
                    let mut got: Vec<PhaseVec> = ball.elements().to_vec();
                    got.sort();
                    let before = got.len();
                    got.dedup();
                    assert_eq!(before, got.len());
                    let mut want: Vec<PhaseVec> =
                        PhaseVec::all(fd, n).filter(|x| x.weight() <= t).collect();
                    want.sort();
                    assert_eq!(got, want);
                }
            }
        }
    }

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(5, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
    }
}
