//! Multiplicative-band joint typicality over aligned symbol sequences.

use super::CodesimError;

/// Joint probability table over aligned sequences' symbols, flattened
/// row-major with the first sequence's symbol most significant.
#[derive(Clone, Debug)]
pub struct JointDist {
    pub alphabet_sizes: Vec<usize>,
    pub probs: Vec<f64>,
}

impl JointDist {
    pub fn new(alphabet_sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self, CodesimError> {
        let cells: usize = alphabet_sizes.iter().product();
        if probs.len() != cells {
            return Err(CodesimError::LengthMismatch {
                context: format!("joint table has {} cells, expected {cells}", probs.len()),
            });
        }
        Ok(Self { alphabet_sizes, probs })
    }

    pub fn cell(&self, symbols: &[u16]) -> usize {
        let mut idx = 0usize;
        for (k, &s) in symbols.iter().enumerate() {
            idx = idx * self.alphabet_sizes[k] + s as usize;
        }
        idx
    }
}

/// True iff every joint symbol's empirical frequency pi satisfies
/// |pi - p| <= delta * p, and no zero-probability symbol appears.
pub fn typicality_check(
    sequences: &[&[u16]],
    dist: &JointDist,
    delta: f64,
) -> Result<bool, CodesimError> {
    if sequences.is_empty() {
        return Err(CodesimError::LengthMismatch {
            context: "no sequences given".to_string(),
        });
    }
    if sequences.len() != dist.alphabet_sizes.len() {
        return Err(CodesimError::LengthMismatch {
            context: format!(
                "{} sequences for a {}-way joint table",
                sequences.len(),
                dist.alphabet_sizes.len()
            ),
        });
    }
    let n = sequences[0].len();
    for s in sequences {
        if s.len() != n {
            return Err(CodesimError::LengthMismatch {
                context: "sequences have different lengths".to_string(),
            });
        }
    }
    let mut counts = vec![0usize; dist.probs.len()];
    let mut symbol = vec![0u16; sequences.len()];
    for i in 0..n {
        for (k, s) in sequences.iter().enumerate() {
            let v = s[i];
            if v as usize >= dist.alphabet_sizes[k] {
                return Err(CodesimError::LengthMismatch {
                    context: format!("symbol {v} outside alphabet of sequence {k}"),
                });
            }
            symbol[k] = v;
        }
        counts[dist.cell(&symbol)] += 1;
    }
    for (c, &p) in counts.iter().zip(&dist.probs) {
        let pi = *c as f64 / n as f64;
        if p <= 0.0 {
            if *c > 0 {
                return Ok(false);
            }
        } else if (pi - p).abs() > delta * p {
            return Ok(false);
        }
    }
    Ok(true)
}
