use nalgebra::DVector;

use super::{max_abs_diff, C64, CMat, QcoreError, Space, TOL_HERM, TOL_PSD, TOL_TRACE};

/// A validated density operator on a labeled composite Hilbert space.
///
/// Construction enforces hermiticity, positive semidefiniteness (with
/// clipping of eigenvalues in [-TOL_PSD, 0)), and unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    space: Space,
    matrix: CMat,
}

impl DensityOperator {
    /// Validate and build a density operator from a raw matrix.
    pub fn from_matrix(matrix: CMat, space: Space) -> Result<Self, QcoreError> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QcoreError::DimensionMismatch {
                context: "density matrix side vs space dimension".into(),
                expected: d,
                found: matrix.nrows(),
            });
        }
        let dev = max_abs_diff(&matrix, &matrix.adjoint());
        if dev > TOL_HERM {
            return Err(QcoreError::NotHermitian { deviation: dev });
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TOL_TRACE {
            return Err(QcoreError::TraceNotOne { trace: tr });
        }
        // Hermitize exactly before the spectral check.
        let herm = (&matrix + matrix.adjoint()).scale(0.5);
        let eig = herm.clone().symmetric_eigen();
        let min_ev = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_ev < -TOL_PSD {
            return Err(QcoreError::NotPsd {
                min_eigenvalue: min_ev,
            });
        }
        let matrix = if min_ev < 0.0 {
            // Clip negative noise eigenvalues and renormalize.
            let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            let scaled = DVector::from_iterator(
                clipped.len(),
                clipped.iter().map(|&l| C64::new(l / total, 0.0)),
            );
            &eig.eigenvectors * CMat::from_diagonal(&scaled) * eig.eigenvectors.adjoint()
        } else {
            herm
        };
        Ok(Self { space, matrix })
    }

    /// Pure state |psi><psi| from an (unnormalized) amplitude vector.
    pub fn pure(amplitudes: &[C64], space: Space) -> Result<Self, QcoreError> {
        let d = space.dim();
        if amplitudes.len() != d {
            return Err(QcoreError::DimensionMismatch {
                context: "state vector length vs space dimension".into(),
                expected: d,
                found: amplitudes.len(),
            });
        }
        let v = DVector::from_row_slice(amplitudes);
        let norm = v.norm();
        let v = v.unscale(norm);
        let m = &v * v.adjoint();
        Self::from_matrix(m, space)
    }

    /// Computational basis state |i><i|.
    pub fn basis(index: usize, space: Space) -> Result<Self, QcoreError> {
        let d = space.dim();
        let mut amps = vec![C64::new(0.0, 0.0); d];
        if index >= d {
            return Err(QcoreError::DimensionMismatch {
                context: "basis index vs space dimension".into(),
                expected: d,
                found: index,
            });
        }
        amps[index] = C64::new(1.0, 0.0);
        Self::pure(&amps, space)
    }

    /// Identity / dim.
    pub fn maximally_mixed(space: Space) -> Self {
        let d = space.dim();
        let m = CMat::identity(d, d).scale(1.0 / d as f64);
        Self { space, matrix: m }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Real eigenvalues of the (Hermitian) matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect()
    }

    /// Kronecker product of two states on disjoint label sets.
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator, QcoreError> {
        let space = self.space.join(&other.space)?;
        let matrix = super::kron(&self.matrix, &other.matrix);
        Ok(DensityOperator { space, matrix })
    }

    /// Reduced state on `keep`, preserving the original order of survivors.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOperator, QcoreError> {
        for name in keep {
            if !self.space.contains(name) {
                return Err(QcoreError::UnknownLabel {
                    name: (*name).to_string(),
                });
            }
        }
        let keep_mask: Vec<bool> = self
            .space
            .labels()
            .iter()
            .map(|l| keep.contains(&l.name.as_str()))
            .collect();
        let kept_labels: Vec<_> = self
            .space
            .labels()
            .iter()
            .zip(&keep_mask)
            .filter(|(_, &k)| k)
            .map(|(l, _)| l.clone())
            .collect();
        let out_space = Space::new(kept_labels)?;
        let traced_dims: Vec<usize> = self
            .space
            .labels()
            .iter()
            .zip(&keep_mask)
            .filter(|(_, &k)| !k)
            .map(|(l, _)| l.dim)
            .collect();
        let traced_dim: usize = traced_dims.iter().product();
        let dout = out_space.dim();
        let mut out = CMat::zeros(dout, dout);

        // Build full-index digits from (kept digits, traced digits).
        let n = self.space.len();
        let mut full = vec![0usize; n];
        for a in 0..dout {
            let adig = out_space.digits(a);
            for b in 0..dout {
                let bdig = out_space.digits(b);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..traced_dim {
                    // digits of the traced part
                    let mut tt = t;
                    let mut tdig = vec![0usize; traced_dims.len()];
                    for (k, d) in traced_dims.iter().enumerate().rev() {
                        tdig[k] = tt % d;
                        tt /= d;
                    }
                    let (mut ik, mut it) = (0, 0);
                    for (pos, &keep_here) in keep_mask.iter().enumerate() {
                        if keep_here {
                            full[pos] = adig[ik];
                            ik += 1;
                        } else {
                            full[pos] = tdig[it];
                            it += 1;
                        }
                    }
                    let row = self.space.flatten(&full);
                    let (mut ik, mut it) = (0, 0);
                    for (pos, &keep_here) in keep_mask.iter().enumerate() {
                        if keep_here {
                            full[pos] = bdig[ik];
                            ik += 1;
                        } else {
                            full[pos] = tdig[it];
                            it += 1;
                        }
                    }
                    let col = self.space.flatten(&full);
                    acc += self.matrix[(row, col)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityOperator {
            space: out_space,
            matrix: out,
        })
    }

    /// Rename a label without touching the matrix.
    pub fn relabel(&self, from: &str, to: &str) -> Result<DensityOperator, QcoreError> {
        let pos = self
            .space
            .position(from)
            .ok_or_else(|| QcoreError::UnknownLabel {
                name: from.to_string(),
            })?;
        let mut labels = self.space.labels().to_vec();
        labels[pos].name = to.to_string();
        Ok(DensityOperator {
            space: Space::new(labels)?,
            matrix: self.matrix.clone(),
        })
    }
}
