//! Pretty-good measurement decoding: square-root measurement built from a
//! candidate set, sampled against a received state by the Born rule.

use rand::Rng;

use crate::qcore::{CMat, DensityOperator};
use crate::qinfo::SUPPORT_CUTOFF;

use super::CodesimError;

const PGM_DIM_CAP: usize = 4096;

/// Inverse square root of `m` on its support; the kernel maps to zero.
fn pinv_sqrt(m: &CMat) -> CMat {
    let eig = m.clone().symmetric_eigen();
    let dim = m.nrows();
    let mut out = CMat::zeros(dim, dim);
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > SUPPORT_CUTOFF {
            let v = eig.eigenvectors.column(i);
            out += (v * v.adjoint()).scale(1.0 / lam.sqrt());
        }
    }
    out
}

/// Decode `received` against `candidates` with the pretty-good measurement
/// and return the sampled candidate index. The measurement operator for
/// candidate i is S^{-1/2} rho_i S^{-1/2} / N with S the candidate average;
/// the projector onto the kernel of S is folded into candidate 0.
pub fn pgm_decode<R: Rng + ?Sized>(
    candidates: &[DensityOperator],
    received: &DensityOperator,
    rng: &mut R,
) -> Result<usize, CodesimError> {
    if candidates.is_empty() {
        return Err(CodesimError::InvalidConfig {
            context: "pgm needs at least one candidate".to_string(),
        });
    }
    let dim = received.matrix().nrows();
    if dim > PGM_DIM_CAP {
        return Err(CodesimError::DimensionCapExceeded {
            dim,
            cap: PGM_DIM_CAP,
        });
    }
    for c in candidates {
        if c.matrix().nrows() != dim {
            return Err(CodesimError::InvalidConfig {
                context: "candidate dimension differs from received state".to_string(),
            });
        }
    }
    let mut avg = CMat::zeros(dim, dim);
    for c in candidates {
        avg += c.matrix();
    }
    avg.unscale_mut(candidates.len() as f64);
    let root = pinv_sqrt(&avg);
    let kernel_proj = CMat::identity(dim, dim) - &root * &avg * &root;

    let mut probs = Vec::with_capacity(candidates.len());
    for (i, c) in candidates.iter().enumerate() {
        let mut q = &root * c.matrix() * &root;
        q.unscale_mut(candidates.len() as f64);
        if i == 0 {
            q += &kernel_proj;
        }
        let p = (&q * received.matrix()).trace().re.max(0.0);
        probs.push(p);
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(CodesimError::InvalidConfig {
            context: "pgm outcome probabilities sum to zero".to_string(),
        });
    }
    let mut draw = rng.gen_range(0.0..total);
    for (i, &p) in probs.iter().enumerate() {
        if draw < p {
            return Ok(i);
        }
        draw -= p;
    }
    Ok(probs.len() - 1)
}
