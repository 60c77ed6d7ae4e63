use serde::{Deserialize, Serialize};

use super::QcoreError;

/// A named finite-dimensional Hilbert space factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertLabel {
    pub name: String,
    pub dim: usize,
}

impl HilbertLabel {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self {
            name: name.into(),
            dim,
        }
    }
}

/// An ordered composite of labeled Hilbert space factors.
///
/// The matrix layout of any operator on the composite is the Kronecker
/// product in declaration order: the first label is the most significant
/// digit of the row/column index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Space {
    labels: Vec<HilbertLabel>,
}

impl Space {
    pub fn new(labels: Vec<HilbertLabel>) -> Result<Self, QcoreError> {
        for (i, l) in labels.iter().enumerate() {
            if l.dim < 1 {
                return Err(QcoreError::ZeroDimension {
                    name: l.name.clone(),
                });
            }
            if labels[..i].iter().any(|p| p.name == l.name) {
                return Err(QcoreError::DuplicateLabel {
                    name: l.name.clone(),
                });
            }
        }
        Ok(Self { labels })
    }

    pub fn single(name: impl Into<String>, dim: usize) -> Self {
        Self {
            labels: vec![HilbertLabel::new(name, dim)],
        }
    }

    /// n qubits named by `names`.
    pub fn qubits(names: &[&str]) -> Result<Self, QcoreError> {
        Self::new(names.iter().map(|n| HilbertLabel::new(*n, 2)).collect())
    }

    pub fn labels(&self) -> &[HilbertLabel] {
        &self.labels
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.dim).collect()
    }

    /// Total dimension (product of factor dimensions).
    pub fn dim(&self) -> usize {
        self.labels.iter().map(|l| l.dim).product()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn names(&self) -> Vec<&str> {
        self.labels.iter().map(|l| l.name.as_str()).collect()
    }

    /// Concatenation; fails on label collision.
    pub fn join(&self, other: &Space) -> Result<Space, QcoreError> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Space::new(labels)
    }

    /// Decompose a flat basis index into per-factor digits (row-major).
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.labels.len()];
        for (k, l) in self.labels.iter().enumerate().rev() {
            out[k] = index % l.dim;
            index /= l.dim;
        }
        out
    }

    /// Recompose per-factor digits into a flat basis index.
    pub fn flatten(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.labels.len());
        let mut idx = 0;
        for (d, l) in digits.iter().zip(&self.labels) {
            idx = idx * l.dim + d;
        }
        idx
    }

    /// Whether `other`'s labels equal a contiguous run of this space starting at `at`.
    pub fn matches_run(&self, at: usize, other: &Space) -> bool {
        at + other.len() <= self.len() && self.labels[at..at + other.len()] == other.labels[..]
    }

    /// Find the start of the contiguous run matching `other`, if any.
    pub fn find_run(&self, other: &Space) -> Option<usize> {
        if other.is_empty() {
            return Some(0);
        }
        (0..=self.len().saturating_sub(other.len())).find(|&at| self.matches_run(at, other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_roundtrip() {
        let s = Space::new(vec![
            HilbertLabel::new("a", 2),
            HilbertLabel::new("b", 3),
            HilbertLabel::new("c", 2),
        ])
        .unwrap();
        assert_eq!(s.dim(), 12);
        for i in 0..12 {
            assert_eq!(s.flatten(&s.digits(i)), i);
        }
        assert_eq!(s.digits(11), vec![1, 2, 1]);
    }

    #[test]
    fn rejects_duplicate_and_zero() {
        assert!(Space::qubits(&["a", "a"]).is_err());
        assert!(Space::new(vec![HilbertLabel::new("x", 0)]).is_err());
    }

    #[test]
    fn run_search() {
        let s = Space::qubits(&["a", "b", "c"]).unwrap();
        let sub = Space::qubits(&["b", "c"]).unwrap();
        assert_eq!(s.find_run(&sub), Some(1));
        let nosub = Space::qubits(&["a", "c"]).unwrap();
        assert_eq!(s.find_run(&nosub), None);
    }
}
