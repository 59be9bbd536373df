use graphqec::channel::{noise_from_matrix, weyl_diagonal_noise, NoiseChannel, QChannel};
use graphqec::phase::C64;
use graphqec::qspace::CMatrix;
use graphqec::scheme::Scheme;
use serde::{Deserialize, Serialize};

use super::{invalid, FormatError, PhaseJson};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylProb {
    pub xi: PhaseJson,
    pub p: f64,
}

/// Noise on the output register: a Weyl mixture, or a coefficient matrix
/// `t_{x,y}` over error labels with entries `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    WeylDiagonal {
        t: usize,
        probs: Vec<WeylProb>,
    },
    Psd {
        labels: Vec<PhaseJson>,
        matrix: Vec<Vec<[f64; 2]>>,
    },
}

/// Why a noise document was refused.
#[derive(Debug, thiserror::Error)]
pub enum NoiseError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("noise is outside the correctable class: {0}")]
    Rejected(#[from] graphqec::channel::ChannelError),
}

impl NoiseSpec {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Kraus form on `H_J`; weight and positivity violations are refused.
    pub fn to_channel(&self, s: &Scheme, tol: f64) -> Result<QChannel, NoiseError> {
        let f = s.field();
        let nj = s.graph().n_outputs();
        match self {
            NoiseSpec::WeylDiagonal { t, probs } => {
                let mut labelled = Vec::with_capacity(probs.len());
                for entry in probs {
                    let xi = entry.xi.to_phase(f, nj)?;
                    if xi.weight() > *t {
                        return Err(invalid(format!(
                            "error of weight {} exceeds the declared t = {t}",
                            xi.weight()
                        ))
                        .into());
                    }
                    labelled.push((xi, entry.p));
                }
                let ch = weyl_diagonal_noise(f, nj, &labelled)?;
                graphqec::channel::check_noise_support(s, &ch)?;
                Ok(ch)
            }
            NoiseSpec::Psd { labels, matrix } => {
                let labels = labels
                    .iter()
                    .map(|xi| xi.to_phase(f, nj))
                    .collect::<Result<Vec<_>, _>>()?;
                let n = labels.len();
                if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                    return Err(invalid(format!("matrix must be {n}x{n}")).into());
                }
                let tmat =
                    CMatrix::from_fn(n, n, |r, c| C64::new(matrix[r][c][0], matrix[r][c][1]));
                Ok(noise_from_matrix(s, &NoiseChannel { labels, tmat }, tol)?)
            }
        }
    }
}
