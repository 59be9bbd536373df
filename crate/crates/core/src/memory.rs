//! Decoherence semigroup on the output register, decoherence time, and the
//! repeated decode/re-encode quantum memory.
//!
//! The semigroup is the per-site uniform Weyl (depolarizing) family: every
//! non-identity single-site Weyl operator has transfer eigenvalue `e^{−λt}`,
//! so `w(ζ)` decays as `e^{−λt·weight(ζ)}`. The truncated variant keeps only
//! errors of weight at most one, renormalized.
//!
//! Logical channels on `H_I` are handled through their Weyl transfer matrix
//! `M[ζ, η] = tr(w(ζ)† Φ(w(η))) / D`, so `k` cycles cost one matrix power.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::channel::{
    decoder, eigenvalues_from_probabilities, encoder, probabilities_from_eigenvalues,
    weyl_diagonal_noise, ChannelDistance, ChannelError, QChannel,
};
use crate::ffield::Field;
use crate::phase::{PhaseVec, C64};
use crate::qspace::{from_weyl_coefficients, weyl_coefficients, weyl_left, CMatrix};
use crate::scheme::Scheme;

/// Off-diagonal transfer entries below this count as Weyl-diagonal.
const DIAGONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MemoryError {
    #[error("time {0} is negative or not finite")]
    BadTime(f64),
    #[error("rate {0} is negative or not finite")]
    BadRate(f64),
    #[error("threshold {0} must lie in (0, 2)")]
    ThresholdOutOfRange(f64),
    #[error("threshold {eps} is never reached; the distance saturates at {limit}")]
    ThresholdUnreachable { eps: f64, limit: f64 },
    #[error("at least one cycle is required")]
    NoCycles,
    #[error("model acts on {model} sites but the scheme has {scheme} outputs")]
    SiteMismatch { model: usize, scheme: usize },
    #[error("scan needs at least one positive cycle time")]
    EmptyScan,
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// `t ↦ T_t` on `sites` qudits with per-site rate `λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceModel {
    pub field: Field,
    pub sites: usize,
    pub rate: f64,
    /// Keep only errors of weight `≤ 1`.
    pub truncated: bool,
}

impl DecoherenceModel {
    pub fn new(field: Field, sites: usize, rate: f64) -> Result<Self, MemoryError> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(MemoryError::BadRate(rate));
        }
        Ok(Self {
            field,
            sites,
            rate,
            truncated: false,
        })
    }

    pub fn truncated(self) -> Self {
        Self {
            truncated: true,
            ..self
        }
    }

    fn check_time(t: f64) -> Result<(), MemoryError> {
        if !t.is_finite() || t < 0.0 {
            return Err(MemoryError::BadTime(t));
        }
        Ok(())
    }

    /// Single-site probabilities `(p_0, p_ξ)` of the identity and of each of
    /// the `d² − 1` other Weyl operators.
    pub fn site_probabilities(&self, t: f64) -> (f64, f64) {
        let d2 = (self.field.order() * self.field.order()) as f64;
        let decay = libm::exp(-self.rate * t);
        ((1.0 + (d2 - 1.0) * decay) / d2, (1.0 - decay) / d2)
    }

    /// Probability of an error of each weight `0..=sites`, per error.
    fn weight_probabilities(&self, t: f64) -> Vec<f64> {
        let (p0, p1) = self.site_probabilities(t);
        let n = self.sites;
        let mut out: Vec<f64> = (0..=n)
            .map(|w| libm::pow(p0, (n - w) as f64) * libm::pow(p1, w as f64))
            .collect();
        if self.truncated {
            let d2 = (self.field.order() * self.field.order()) as f64;
            let z = out[0]
                + if n > 0 {
                    n as f64 * (d2 - 1.0) * out[1]
                } else {
                    0.0
                };
            for (w, p) in out.iter_mut().enumerate() {
                *p = if w <= 1 { *p / z } else { 0.0 };
            }
        }
        out
    }

    /// Weyl error distribution indexed by [`PhaseVec::to_index`].
    pub fn weyl_probabilities(&self, t: f64) -> Result<Vec<f64>, MemoryError> {
        Self::check_time(t)?;
        let by_weight = self.weight_probabilities(t);
        Ok(PhaseVec::all(self.field, self.sites)
            .map(|xi| by_weight[xi.weight()])
            .collect())
    }

    /// Transfer eigenvalues `λ_ζ`, indexed like [`Self::weyl_probabilities`].
    pub fn transfer_eigenvalues(&self, t: f64) -> Result<Vec<f64>, MemoryError> {
        Self::check_time(t)?;
        if self.truncated {
            let probs = self.weyl_probabilities(t)?;
            return Ok(
                eigenvalues_from_probabilities(self.field, self.sites, &probs)
                    .into_iter()
                    .map(|c| c.re)
                    .collect(),
            );
        }
        let decay = libm::exp(-self.rate * t);
        Ok(PhaseVec::all(self.field, self.sites)
            .map(|xi| libm::pow(decay, xi.weight() as f64))
            .collect())
    }

    /// `ℓ1` distance of the Weyl error distribution of `T_t` from the point
    /// mass at `0`, i.e. `2(1 − P(0))`; equals `channel_distance(T_t, id)`.
    pub fn distance_from_identity(&self, t: f64) -> Result<f64, MemoryError> {
        Self::check_time(t)?;
        Ok(2.0 * (1.0 - self.weight_probabilities(t)[0]))
    }

    /// `lim_{t→∞}` of [`Self::distance_from_identity`].
    pub fn saturation(&self) -> f64 {
        let d2 = (self.field.order() * self.field.order()) as f64;
        let n = self.sites;
        let p_zero = if self.truncated {
            1.0 / (1.0 + n as f64 * (d2 - 1.0))
        } else {
            libm::pow(d2, -(n as f64))
        };
        2.0 * (1.0 - p_zero)
    }

    /// Applies `T_t` to an operator on the register.
    pub fn apply(&self, t: f64, m: &CMatrix) -> Result<CMatrix, MemoryError> {
        let eigen = self.transfer_eigenvalues(t)?;
        let mut coeffs = weyl_coefficients(self.field, self.sites, m);
        for (c, l) in coeffs.iter_mut().zip(&eigen) {
            *c *= *l;
        }
        Ok(from_weyl_coefficients(self.field, self.sites, &coeffs))
    }
}

/// `T_t` in Kraus form, one Kraus operator per Weyl error of nonzero
/// probability.
pub fn semigroup_channel(model: &DecoherenceModel, t: f64) -> Result<QChannel, MemoryError> {
    let probs = model.weyl_probabilities(t)?;
    let labelled: Vec<(PhaseVec, f64)> = PhaseVec::all(model.field, model.sites)
        .zip(probs)
        .filter(|(_, p)| *p > 0.0)
        .collect();
    Ok(weyl_diagonal_noise(model.field, model.sites, &labelled)?)
}

/// Largest `s` with `distance(T_s, id) ≤ ε`, by bisection to relative
/// precision `1e-12`. Infinite for `λ = 0`.
pub fn decoherence_time(model: &DecoherenceModel, eps: f64) -> Result<f64, MemoryError> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(MemoryError::ThresholdOutOfRange(eps));
    }
    let limit = model.saturation();
    if eps >= limit {
        return Err(MemoryError::ThresholdUnreachable { eps, limit });
    }
    if model.rate == 0.0 {
        return Ok(f64::INFINITY);
    }
    let dist = |t: f64| model.distance_from_identity(t).expect("finite time");
    let mut lo = 0.0;
    let mut hi = 1.0 / model.rate;
    while dist(hi) <= eps {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if dist(mid) <= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Weyl transfer matrix of `D ∘ T_{t_c} ∘ E` on `H_I`.
pub fn cycle_transfer(
    s: &Scheme,
    model: &DecoherenceModel,
    t_c: f64,
) -> Result<CMatrix, MemoryError> {
    let g = s.graph();
    if model.sites != g.n_outputs() || model.field != s.field() {
        return Err(MemoryError::SiteMismatch {
            model: model.sites,
            scheme: g.n_outputs(),
        });
    }
    let (e, d) = (encoder(s), decoder(s));
    let n = g.n_inputs();
    let dim = s.dim_inputs();
    let id = CMatrix::identity(dim);
    let basis: Vec<PhaseVec> = PhaseVec::all(s.field(), n).collect();
    let mut columns = Vec::with_capacity(basis.len());
    for eta in &basis {
        let w = weyl_left(eta, &id);
        let out = d.apply(&model.apply(t_c, &e.apply(&w))?);
        columns.push(weyl_coefficients(s.field(), n, &out));
    }
    Ok(CMatrix::from_fn(basis.len(), basis.len(), |r, c| {
        columns[c][r]
    }))
}

/// Distance of the channel with transfer matrix `m` (on `sites` qudits)
/// from the identity, in the same terms as `channel_distance`.
pub fn transfer_distance(field: Field, sites: usize, m: &CMatrix) -> ChannelDistance {
    let n = m.rows();
    let mut weyl_max: f64 = 0.0;
    let mut off_diagonal: f64 = 0.0;
    for c in 0..n {
        let mut col = 0.0;
        for r in 0..n {
            let delta = if r == c { 1.0 } else { 0.0 };
            col += (m[(r, c)] - C64::new(delta, 0.0)).norm_sqr();
            if r != c {
                off_diagonal = off_diagonal.max(m[(r, c)].norm());
            }
        }
        weyl_max = weyl_max.max(libm::sqrt(col));
    }
    let weyl_l1 = (off_diagonal <= DIAGONAL_TOL).then(|| {
        let eigen: Vec<C64> = (0..n).map(|k| m[(k, k)]).collect();
        let probs = probabilities_from_eigenvalues(field, sites, &eigen);
        probs
            .iter()
            .enumerate()
            .map(|(k, p)| if k == 0 { (1.0 - p).abs() } else { p.abs() })
            .sum()
    });
    ChannelDistance { weyl_max, weyl_l1 }
}

/// One memory simulation: `k` cycles of encode, decay for `t_c`, decode.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryRun {
    pub cycle_time: f64,
    pub cycles: usize,
    pub threshold: f64,
    /// Distance of the accumulated channel from the identity after each
    /// cycle.
    pub residuals: Vec<ChannelDistance>,
    /// `distance(T_{k·t_c}, id)` on the output register after each cycle.
    pub free_decay: Vec<f64>,
    /// The same decay applied to `|I|` unencoded qudits.
    pub bare_decay: Vec<f64>,
}

impl MemoryRun {
    pub fn within_threshold(&self) -> bool {
        self.residuals.iter().all(|r| r.proxy() <= self.threshold)
    }

    pub fn final_residual(&self) -> f64 {
        self.residuals.last().map_or(0.0, ChannelDistance::proxy)
    }
}

fn accumulate(m: &CMatrix, k: usize, field: Field, sites: usize) -> Vec<ChannelDistance> {
    let mut acc = CMatrix::identity(m.rows());
    (0..k)
        .map(|_| {
            acc = m.mul(&acc);
            transfer_distance(field, sites, &acc)
        })
        .collect()
}

pub fn simulate_memory(
    s: &Scheme,
    model: &DecoherenceModel,
    t_c: f64,
    k: usize,
    threshold: f64,
) -> Result<MemoryRun, MemoryError> {
    if k == 0 {
        return Err(MemoryError::NoCycles);
    }
    let n = s.graph().n_inputs();
    let m = cycle_transfer(s, model, t_c)?;
    let residuals = accumulate(&m, k, s.field(), n);
    let bare = DecoherenceModel { sites: n, ..*model };
    let mut free_decay = Vec::with_capacity(k);
    let mut bare_decay = Vec::with_capacity(k);
    for c in 1..=k {
        free_decay.push(model.distance_from_identity(c as f64 * t_c)?);
        bare_decay.push(bare.distance_from_identity(c as f64 * t_c)?);
    }
    Ok(MemoryRun {
        cycle_time: t_c,
        cycles: k,
        threshold,
        residuals,
        free_decay,
        bare_decay,
    })
}

/// Result of a storing-time scan.
#[derive(Clone, Debug, PartialEq)]
pub struct StoringReport {
    /// Largest `k·t_c` whose accumulated residuals all stay within the
    /// threshold, or `0` if no grid point qualifies.
    pub storing_time: f64,
    pub cycle_time: f64,
    pub cycles: usize,
    pub decoherence_time: f64,
    /// `storing_time / decoherence_time`; `0` when the decoherence time is
    /// infinite.
    pub ratio: f64,
    /// The scan's largest `k·t_c`.
    pub ceiling: f64,
    pub at_ceiling: bool,
}

/// Scans `cycle_times × 1..=max_cycles` for the longest admissible storage.
pub fn storing_time(
    s: &Scheme,
    model: &DecoherenceModel,
    threshold: f64,
    cycle_times: &[f64],
    max_cycles: usize,
) -> Result<StoringReport, MemoryError> {
    if max_cycles == 0 {
        return Err(MemoryError::NoCycles);
    }
    if !cycle_times.iter().any(|&t| t > 0.0) {
        return Err(MemoryError::EmptyScan);
    }
    let decoherence = decoherence_time(model, threshold)?;
    let n = s.graph().n_inputs();
    let mut best = (0.0, 0.0, 0);
    let mut ceiling: f64 = 0.0;
    for &t_c in cycle_times.iter().filter(|&&t| t > 0.0) {
        ceiling = ceiling.max(t_c * max_cycles as f64);
        let m = cycle_transfer(s, model, t_c)?;
        let good = accumulate(&m, max_cycles, s.field(), n)
            .iter()
            .take_while(|r| r.proxy() <= threshold)
            .count();
        let stored = t_c * good as f64;
        if stored > best.0 {
            best = (stored, t_c, good);
        }
    }
    let (stored, t_c, cycles) = best;
    let ratio = stored / decoherence;
    Ok(StoringReport {
        storing_time: stored,
        cycle_time: t_c,
        cycles,
        decoherence_time: decoherence,
        ratio,
        ceiling,
        at_ceiling: stored >= ceiling,
    })
}

/// Weyl-diagonal entries of `M^k` for every `k ≤ cycles`, as a table of
/// logical error distributions; convenience for reports.
pub fn logical_distributions(
    s: &Scheme,
    model: &DecoherenceModel,
    t_c: f64,
    cycles: usize,
) -> Result<Vec<Vec<f64>>, MemoryError> {
    let n = s.graph().n_inputs();
    let m = cycle_transfer(s, model, t_c)?;
    let mut acc = CMatrix::identity(m.rows());
    let mut out = vec![];
    for _ in 0..cycles {
        acc = m.mul(&acc);
        let eigen: Vec<C64> = (0..acc.rows()).map(|k| acc[(k, k)]).collect();
        out.push(probabilities_from_eigenvalues(s.field(), n, &eigen));
    }
    Ok(out)
}
