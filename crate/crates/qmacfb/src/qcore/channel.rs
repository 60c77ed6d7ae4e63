use super::{identity, kron, max_abs_diff, CMat, DensityOperator, QcoreError, Space, TOL_TRACE};

/// A CPTP map given by Kraus operators from `input` to `output`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    input: Space,
    output: Space,
    kraus: Vec<CMat>,
}

impl KrausChannel {
    pub fn new(input: Space, output: Space, kraus: Vec<CMat>) -> Result<Self, QcoreError> {
        let (din, dout) = (input.dim(), output.dim());
        for k in &kraus {
            if k.nrows() != dout || k.ncols() != din {
                return Err(QcoreError::DimensionMismatch {
                    context: "Kraus operator shape vs channel spaces".into(),
                    expected: dout * din,
                    found: k.nrows() * k.ncols(),
                });
            }
        }
        let mut sum = CMat::zeros(din, din);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let dev = max_abs_diff(&sum, &identity(din));
        if dev > TOL_TRACE {
            return Err(QcoreError::NotTracePreserving { deviation: dev });
        }
        Ok(Self {
            input,
            output,
            kraus,
        })
    }

    pub fn input(&self) -> &Space {
        &self.input
    }

    pub fn output(&self) -> &Space {
        &self.output
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }
}

/// Identity channel on `space`.
pub fn identity_channel(space: Space) -> KrausChannel {
    let d = space.dim();
    KrausChannel {
        input: space.clone(),
        output: space,
        kraus: vec![identity(d)],
    }
}

/// Apply a channel whose input labels form a contiguous run of `rho`'s space,
/// acting as the identity on the rest.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator, QcoreError> {
    let at = rho
        .space()
        .find_run(ch.input())
        .ok_or_else(|| QcoreError::DimensionMismatch {
            context: format!(
                "channel input {:?} is not a contiguous sub-space of {:?}",
                ch.input().names(),
                rho.space().names()
            ),
            expected: ch.input().dim(),
            found: rho.space().dim(),
        })?;
    let pre_labels = rho.space().labels()[..at].to_vec();
    let post_labels = rho.space().labels()[at + ch.input().len()..].to_vec();
    let pre = Space::new(pre_labels)?;
    let post = Space::new(post_labels)?;
    let out_space = pre.join(ch.output())?.join(&post)?;

    let (dpre, dpost) = (pre.dim(), post.dim());
    let dout = out_space.dim();
    let mut acc = CMat::zeros(dout, dout);
    for k in ch.kraus() {
        let full = kron(&kron(&identity(dpre), k), &identity(dpost));
        acc += &full * rho.matrix() * full.adjoint();
    }
    DensityOperator::from_matrix(acc, out_space)
}
