use rand::Rng;

use super::{identity, max_abs_diff, CMat, DensityOperator, QcoreError, Space, TOL_PSD, TOL_TRACE};

/// One measurement branch: a classical outcome pair and its Kraus operators.
#[derive(Clone, Debug)]
pub struct InstrumentBranch {
    pub outcome: (u32, u32),
    pub kraus: Vec<CMat>,
}

/// A quantum instrument: a finite family of trace-non-increasing branches,
/// one per classical outcome, that together form a CPTP map.
#[derive(Clone, Debug)]
pub struct QuantumInstrument {
    input: Space,
    output: Space,
    branches: Vec<InstrumentBranch>,
}

/// Result of applying one instrument branch.
#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub outcome: (u32, u32),
    pub probability: f64,
    /// None when the branch probability is below the PSD tolerance.
    pub post_state: Option<DensityOperator>,
}

impl QuantumInstrument {
    pub fn new(
        input: Space,
        output: Space,
        branches: Vec<InstrumentBranch>,
    ) -> Result<Self, QcoreError> {
        let (din, dout) = (input.dim(), output.dim());
        let mut sum = CMat::zeros(din, din);
        for (i, b) in branches.iter().enumerate() {
            if branches[..i].iter().any(|p| p.outcome == b.outcome) {
                return Err(QcoreError::DuplicateOutcome { outcome: b.outcome });
            }
            for k in &b.kraus {
                if k.nrows() != dout || k.ncols() != din {
                    return Err(QcoreError::DimensionMismatch {
                        context: "branch Kraus operator shape vs instrument spaces".into(),
                        expected: dout * din,
                        found: k.nrows() * k.ncols(),
                    });
                }
                sum += k.adjoint() * k;
            }
        }
        let dev = max_abs_diff(&sum, &identity(din));
        if dev > TOL_TRACE {
            return Err(QcoreError::NotTracePreserving { deviation: dev });
        }
        Ok(Self {
            input,
            output,
            branches,
        })
    }

    pub fn input(&self) -> &Space {
        &self.input
    }

    pub fn output(&self) -> &Space {
        &self.output
    }

    pub fn branches(&self) -> &[InstrumentBranch] {
        &self.branches
    }
}

/// Single-branch identity instrument (no measurement, outcome (0,0)).
pub fn identity_instrument(space: Space) -> QuantumInstrument {
    let d = space.dim();
    QuantumInstrument {
        input: space.clone(),
        output: space,
        branches: vec![InstrumentBranch {
            outcome: (0, 0),
            kraus: vec![identity(d)],
        }],
    }
}

/// Apply every branch, returning one record per branch (Born rule).
pub fn apply_instrument(
    inst: &QuantumInstrument,
    rho: &DensityOperator,
) -> Result<Vec<MeasurementRecord>, QcoreError> {
    if rho.space() != inst.input() {
        return Err(QcoreError::DimensionMismatch {
            context: format!(
                "instrument input {:?} vs state space {:?}",
                inst.input().names(),
                rho.space().names()
            ),
            expected: inst.input().dim(),
            found: rho.dim(),
        });
    }
    let dout = inst.output().dim();
    let mut records = Vec::with_capacity(inst.branches().len());
    for b in inst.branches() {
        let mut sigma = CMat::zeros(dout, dout);
        for k in &b.kraus {
            sigma += k * rho.matrix() * k.adjoint();
        }
        let p = sigma.trace().re;
        let post_state = if p > TOL_PSD {
            Some(DensityOperator::from_matrix(
                sigma.unscale(p),
                inst.output().clone(),
            )?)
        } else {
            None
        };
        records.push(MeasurementRecord {
            outcome: b.outcome,
            probability: p.max(0.0),
            post_state,
        });
    }
    Ok(records)
}

/// Draw one outcome with Born-rule probabilities; deterministic given the rng.
pub fn sample_outcome<R: Rng + ?Sized>(
    inst: &QuantumInstrument,
    rho: &DensityOperator,
    rng: &mut R,
) -> Result<MeasurementRecord, QcoreError> {
    let records = apply_instrument(inst, rho)?;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for r in &records {
        acc += r.probability;
        if u < acc {
            return Ok(r.clone());
        }
    }
    // Numerical slack: fall back to the last positive-probability branch.
    Ok(records
        .into_iter()
        .rev()
        .find(|r| r.probability > 0.0)
        .expect("instrument probabilities sum to one"))
}
