//! Entropy, mutual information, relative entropy, and hypothesis-testing
//! divergence. All logarithms are base 2; values are in bits.

mod hypothesis;

pub use hypothesis::{hypothesis_testing_divergence, stein_probe, HypothesisTest};

use thiserror::Error;

use crate::qcore::{DensityOperator, QcoreError};

/// Eigenvalues at or below this are treated as exact zeros for support
/// computations.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum InfoError {
    #[error("states live on different spaces")]
    DimensionMismatch,
    #[error("label sets overlap on `{name}`")]
    LabelOverlap { name: String },
    #[error("unknown label `{name}`")]
    UnknownLabel { name: String },
    #[error("epsilon must lie in [0, 1), got {epsilon}")]
    InvalidEpsilon { epsilon: f64 },
    #[error("tensor-power dimension {dim} exceeds the cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error(transparent)]
    Core(#[from] QcoreError),
}

pub(crate) fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy in bits of a (sub)probability vector.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

/// Binary entropy H2 in bits, with H2(0) = H2(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// von Neumann entropy in bits: -tr(rho log2 rho).
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}

/// Quantum relative entropy D(rho || sigma) in bits; +inf when the support
/// of rho is not contained in the support of sigma.
pub fn quantum_relative_entropy(
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<f64, InfoError> {
    if rho.space() != sigma.space() {
        return Err(InfoError::DimensionMismatch);
    }
    let er = rho.matrix().clone().symmetric_eigen();
    let es = sigma.matrix().clone().symmetric_eigen();
    let d = rho.dim();
    // overlap[i][j] = |<v_i | w_j>|^2
    let cross = er.eigenvectors.adjoint() * &es.eigenvectors;
    let mut value = 0.0;
    let mut escaped = 0.0; // rho-weight outside supp(sigma)
    for i in 0..d {
        let li = er.eigenvalues[i].max(0.0);
        if li <= SUPPORT_CUTOFF {
            continue;
        }
        value += li * li.log2();
        for j in 0..d {
            let w = cross[(i, j)].norm_sqr();
            let mj = es.eigenvalues[j].max(0.0);
            if mj <= SUPPORT_CUTOFF {
                escaped += li * w;
            } else {
                value -= li * w * mj.log2();
            }
        }
    }
    if escaped > 1e-10 {
        return Ok(f64::INFINITY);
    }
    Ok(value.max(0.0))
}

/// Anything that can report the joint entropy of a subset of its labels.
///
/// Implemented by [`DensityOperator`] (via partial traces) and by
/// [`crate::ensemble::CqJointState`] (via the exact classical-quantum
/// decomposition).
pub trait EntropySource {
    fn has_label(&self, name: &str) -> bool;
    /// Entropy in bits of the reduced state on `labels` (empty set gives 0).
    fn subset_entropy(&self, labels: &[&str]) -> Result<f64, InfoError>;
}

impl EntropySource for DensityOperator {
    fn has_label(&self, name: &str) -> bool {
        self.space().contains(name)
    }

    fn subset_entropy(&self, labels: &[&str]) -> Result<f64, InfoError> {
        for l in labels {
            if !self.space().contains(l) {
                return Err(InfoError::UnknownLabel {
                    name: (*l).to_string(),
                });
            }
        }
        if labels.is_empty() {
            return Ok(0.0);
        }
        let red = self.partial_trace(labels)?;
        Ok(von_neumann_entropy(&red))
    }
}

/// Conditional mutual information I(A;B|C) in bits, computed as
/// H(AC) + H(BC) - H(ABC) - H(C). Empty conditioning gives I(A;B).
pub fn mutual_information<S: EntropySource>(
    state: &S,
    part_a: &[&str],
    part_b: &[&str],
    conditioning: &[&str],
) -> Result<f64, InfoError> {
    for (set, other) in [
        (part_a, part_b),
        (part_a, conditioning),
        (part_b, conditioning),
    ] {
        for l in set {
            if other.contains(l) {
                return Err(InfoError::LabelOverlap {
                    name: (*l).to_string(),
                });
            }
        }
    }
    for l in part_a.iter().chain(part_b).chain(conditioning) {
        if !state.has_label(l) {
            return Err(InfoError::UnknownLabel {
                name: (*l).to_string(),
            });
        }
    }
    fn union<'a>(x: &[&'a str], y: &[&'a str]) -> Vec<&'a str> {
        let mut v: Vec<&'a str> = x.to_vec();
        v.extend_from_slice(y);
        v
    }
    let h_ac = state.subset_entropy(&union(part_a, conditioning))?;
    let h_bc = state.subset_entropy(&union(part_b, conditioning))?;
    let h_abc = state.subset_entropy(&union(&union(part_a, part_b), conditioning))?;
    let h_c = state.subset_entropy(conditioning)?;
    Ok(h_ac + h_bc - h_abc - h_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{C64, CMat, DensityOperator, Space};
    use approx::assert_abs_diff_eq;

    #[test]
    fn entropy_of_mixed_and_pure() {
        let s = Space::single("a", 2);
        assert_abs_diff_eq!(
            von_neumann_entropy(&DensityOperator::maximally_mixed(s.clone())),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            von_neumann_entropy(&DensityOperator::basis(0, s).unwrap()),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn entropy_of_half_quarter_quarter() {
        let s = Space::single("a", 3);
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.5, 0.0),
            C64::new(0.25, 0.0),
            C64::new(0.25, 0.0),
        ]));
        let rho = DensityOperator::from_matrix(m, s).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn relative_entropy_cases() {
        let s = Space::single("a", 2);
        let pure0 = DensityOperator::basis(0, s.clone()).unwrap();
        let pure1 = DensityOperator::basis(1, s.clone()).unwrap();
        let mixed = DensityOperator::maximally_mixed(s);
        assert_abs_diff_eq!(
            quantum_relative_entropy(&mixed, &mixed).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            quantum_relative_entropy(&pure0, &mixed).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert!(quantum_relative_entropy(&pure0, &pure1)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn mutual_information_on_density_operators() {
        // Perfectly correlated uniform classical bits: I = 1.
        let s = Space::qubits(&["x", "y"]).unwrap();
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(3, 3)] = C64::new(0.5, 0.0);
        let rho = DensityOperator::from_matrix(m, s).unwrap();
        assert_abs_diff_eq!(
            mutual_information(&rho, &["x"], &["y"], &[]).unwrap(),
            1.0,
            epsilon = 1e-12
        );

        // Product state: I = 0.
        let a = DensityOperator::maximally_mixed(Space::single("x", 2));
        let b = DensityOperator::basis(0, Space::single("y", 2)).unwrap();
        let prod = a.tensor(&b).unwrap();
        assert_abs_diff_eq!(
            mutual_information(&prod, &["x"], &["y"], &[]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn overlap_rejected() {
        let rho = DensityOperator::maximally_mixed(Space::qubits(&["x", "y"]).unwrap());
        assert!(matches!(
            mutual_information(&rho, &["x"], &["x"], &[]),
            Err(InfoError::LabelOverlap { .. })
        ));
    }

    #[test]
    fn binary_entropy_symmetry_and_peak() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        for i in 1..50 {
            let p = i as f64 / 100.0;
            assert_abs_diff_eq!(binary_entropy(p), binary_entropy(1.0 - p), epsilon = 1e-12);
        }
    }

    #[test]
    fn entropy_additivity_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for case in 0..20 {
            let a = random_state(&mut rng, 2, "a");
            let b = random_state(&mut rng, 3, "b");
            let ab = a.tensor(&b).unwrap();
            assert_abs_diff_eq!(
                von_neumann_entropy(&ab),
                von_neumann_entropy(&a) + von_neumann_entropy(&b),
                epsilon = 1e-9
            );
            // tensor trace multiplies
            assert_abs_diff_eq!(ab.trace(), 1.0, epsilon = 1e-9);
            let _ = case;
            let back = ab.partial_trace(&["a"]).unwrap();
            assert!((back.matrix() - a.matrix()).norm() < 1e-12);
            let _: f64 = rng.gen();
        }
    }

    pub(crate) fn random_state(
        rng: &mut impl rand::Rng,
        dim: usize,
        name: &str,
    ) -> DensityOperator {
        let g = CMat::from_fn(dim, dim, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let m = &g * g.adjoint();
        let m = m.unscale(m.trace().re);
        DensityOperator::from_matrix(m, Space::single(name, dim)).unwrap()
    }
}
