//! The quantum binary adder MAC and its feedback instrument.

use super::instrument::InstrumentBranch;
use super::{C64, CMat, DensityOperator, HilbertLabel, KrausChannel, QcoreError, QuantumInstrument, Space};

/// SWAP on two systems of dimension `d` each: sum over |ji><ij|.
pub fn swap_matrix(d: usize) -> CMat {
    let n = d * d;
    let mut m = CMat::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            m[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// Symmetrize a two-qubit state: rho/2 + SWAP rho SWAP†/2, on the same space.
pub fn binary_adder_channel(rho: &DensityOperator) -> Result<DensityOperator, QcoreError> {
    if rho.space().len() != 2 || rho.dim() != 4 {
        return Err(QcoreError::DimensionMismatch {
            context: "binary adder input must be two qubits".into(),
            expected: 4,
            found: rho.dim(),
        });
    }
    let s = swap_matrix(2);
    let m = (rho.matrix() + &s * rho.matrix() * s.adjoint()).scale(0.5);
    DensityOperator::from_matrix(m, rho.space().clone())
}

/// The adder MAC as a Kraus channel from qubits a1 ⊗ a2 to the 4-dimensional
/// receiver system b.
pub fn adder_channel() -> KrausChannel {
    let input = Space::qubits(&["a1", "a2"]).unwrap();
    let output = Space::new(vec![HilbertLabel::new("b", 4)]).unwrap();
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let kraus = vec![CMat::identity(4, 4).scale(inv), swap_matrix(2).scale(inv)];
    KrausChannel::new(input, output, kraus).unwrap()
}

/// The feedback instrument of the adder example: projectors
/// D0 = |00><00|, D1 = |01><01| + |10><10|, D2 = |11><11|, outcome y
/// written to both feedback registers and to a 3-dimensional classical
/// post-measurement register bbar carrying |y><y|.
pub fn adder_instrument() -> QuantumInstrument {
    let input = Space::new(vec![HilbertLabel::new("b", 4)]).unwrap();
    let output = Space::new(vec![HilbertLabel::new("bbar", 3)]).unwrap();
    // K_{y,j} = |y>_bbar <e_j| for e_j spanning the projector of branch y.
    let ket_bra = |y: usize, col: usize| {
        let mut k = CMat::zeros(3, 4);
        k[(y, col)] = C64::new(1.0, 0.0);
        k
    };
    let branches = vec![
        InstrumentBranch {
            outcome: (0, 0),
            kraus: vec![ket_bra(0, 0)],
        },
        InstrumentBranch {
            outcome: (1, 1),
            kraus: vec![ket_bra(1, 1), ket_bra(1, 2)],
        },
        InstrumentBranch {
            outcome: (2, 2),
            kraus: vec![ket_bra(2, 3)],
        },
    ];
    QuantumInstrument::new(input, output, branches).unwrap()
}
