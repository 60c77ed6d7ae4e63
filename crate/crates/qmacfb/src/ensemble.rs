//! Classical-quantum joint states built from an input ensemble, a channel,
//! and a feedback instrument. Classical registers stay labeled indices so
//! every conditional information quantity reduces to exact classical sums
//! of small quantum entropies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qcore::{
    apply_channel, apply_instrument, CMat, DensityOperator, KrausChannel, QcoreError,
    QuantumInstrument, Space,
};
use crate::qinfo::{shannon_entropy, von_neumann_entropy, EntropySource, InfoError};

const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("distribution `{context}` sums to {sum}, expected 1")]
    InvalidDistribution { context: String, sum: f64 },
    #[error("no state assigned for {register} letter {index}")]
    MissingStateAssignment { register: String, index: usize },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("unknown register label `{name}`")]
    UnknownLabel { name: String },
    #[error(transparent)]
    Core(#[from] QcoreError),
}

/// Product-form input ensemble: (U, V1, X1, V2, X2) distributed as
/// p_U · p_{V1X1|U} · p_{V2X2|U}, with each x letter mapped to a sender
/// state. V1X1 and V2X2 are conditionally independent given U by
/// construction.
#[derive(Clone, Debug)]
pub struct InputEnsemble {
    pub u_size: usize,
    pub v1_size: usize,
    pub v2_size: usize,
    pub x1_size: usize,
    pub x2_size: usize,
    pub p_u: Vec<f64>,
    /// p(v1, x1 | u), indexed [u][v1 * x1_size + x1].
    pub p_v1x1_given_u: Vec<Vec<f64>>,
    /// p(v2, x2 | u), indexed [u][v2 * x2_size + x2].
    pub p_v2x2_given_u: Vec<Vec<f64>>,
    /// Sender-1 state for each x1 letter, all on the same space.
    pub theta: Vec<DensityOperator>,
    /// Sender-2 state for each x2 letter, all on the same space.
    pub phi: Vec<DensityOperator>,
}

impl InputEnsemble {
    pub fn validate(&self) -> Result<(), EnsembleError> {
        let check_dist = |p: &[f64], context: &str| -> Result<(), EnsembleError> {
            if p.iter().any(|&x| x < -PROB_TOL) {
                return Err(EnsembleError::InvalidDistribution {
                    context: context.to_string(),
                    sum: f64::NAN,
                });
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(EnsembleError::InvalidDistribution {
                    context: context.to_string(),
                    sum,
                });
            }
            Ok(())
        };
        if self.p_u.len() != self.u_size {
            return Err(EnsembleError::DimensionMismatch {
                context: format!("p_U has {} entries for |U| = {}", self.p_u.len(), self.u_size),
            });
        }
        check_dist(&self.p_u, "p_U")?;
        for (table, v_size, x_size, name) in [
            (&self.p_v1x1_given_u, self.v1_size, self.x1_size, "p_{V1X1|U}"),
            (&self.p_v2x2_given_u, self.v2_size, self.x2_size, "p_{V2X2|U}"),
        ] {
            if table.len() != self.u_size {
                return Err(EnsembleError::DimensionMismatch {
                    context: format!("{name} has {} rows for |U| = {}", table.len(), self.u_size),
                });
            }
            for (u, row) in table.iter().enumerate() {
                if row.len() != v_size * x_size {
                    return Err(EnsembleError::DimensionMismatch {
                        context: format!("{name} row {u} has {} entries", row.len()),
                    });
                }
                check_dist(row, &format!("{name} row {u}"))?;
            }
        }
        for (states, size, register) in
            [(&self.theta, self.x1_size, "x1"), (&self.phi, self.x2_size, "x2")]
        {
            if states.len() < size {
                return Err(EnsembleError::MissingStateAssignment {
                    register: register.to_string(),
                    index: states.len(),
                });
            }
            for s in &states[1..size.max(1)] {
                if s.space() != states[0].space() {
                    return Err(EnsembleError::DimensionMismatch {
                        context: format!("{register} states live on different spaces"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Joint classical probability of (u, v1, v2, x1, x2).
    pub fn prob(&self, u: usize, v1: usize, v2: usize, x1: usize, x2: usize) -> f64 {
        self.p_u[u]
            * self.p_v1x1_given_u[u][v1 * self.x1_size + x1]
            * self.p_v2x2_given_u[u][v2 * self.x2_size + x2]
    }
}

/// Names of the classical registers of a joint state, in canonical order.
pub const CLASSICAL_REGISTERS: [&str; 7] = ["u", "v1", "v2", "x1", "x2", "z1", "z2"];

#[derive(Clone, Debug)]
pub struct CqEntry {
    pub probability: f64,
    /// Values of the classical registers, aligned with the state's labels.
    pub values: Vec<u32>,
    /// Conditional quantum block; None once the quantum part is traced out.
    pub block: Option<DensityOperator>,
}

/// Block-diagonal classical-quantum state: a distribution over classical
/// register tuples, each carrying a conditional quantum block.
#[derive(Clone, Debug)]
pub struct CqJointState {
    classical: Vec<(String, u32)>,
    quantum: Option<Space>,
    entries: Vec<CqEntry>,
}

impl CqJointState {
    pub fn new(
        classical: Vec<(String, u32)>,
        quantum: Option<Space>,
        entries: Vec<CqEntry>,
    ) -> Result<Self, EnsembleError> {
        let total: f64 = entries.iter().map(|e| e.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(EnsembleError::InvalidDistribution {
                context: "cq joint state".to_string(),
                sum: total,
            });
        }
        for e in &entries {
            if e.values.len() != classical.len() {
                return Err(EnsembleError::DimensionMismatch {
                    context: "entry tuple length".to_string(),
                });
            }
            match (&quantum, &e.block) {
                (Some(q), Some(b)) if b.space() == q => {}
                (None, None) => {}
                _ => {
                    return Err(EnsembleError::DimensionMismatch {
                        context: "entry block space".to_string(),
                    })
                }
            }
        }
        Ok(Self { classical, quantum, entries })
    }

    pub fn classical_labels(&self) -> &[(String, u32)] {
        &self.classical
    }

    pub fn quantum_space(&self) -> Option<&Space> {
        self.quantum.as_ref()
    }

    pub fn entries(&self) -> &[CqEntry] {
        &self.entries
    }

    /// Entropy in bits: H(classical marginal) plus the average block entropy.
    pub fn entropy(&self) -> f64 {
        let probs: Vec<f64> = self.entries.iter().map(|e| e.probability).collect();
        let mut h = shannon_entropy(&probs);
        for e in &self.entries {
            if let Some(b) = &e.block {
                h += e.probability * von_neumann_entropy(b);
            }
        }
        h
    }

    /// Restrict to a subset of registers, summing out the rest. Quantum
    /// labels in `keep` retain (a partial trace of) the block.
    pub fn marginalize(&self, keep: &[&str]) -> Result<CqJointState, EnsembleError> {
        for k in keep {
            let known = self.classical.iter().any(|(n, _)| n == k)
                || self.quantum.as_ref().is_some_and(|q| q.contains(k));
            if !known {
                return Err(EnsembleError::UnknownLabel { name: (*k).to_string() });
            }
        }
        let kept_classical: Vec<usize> = (0..self.classical.len())
            .filter(|&i| keep.contains(&self.classical[i].0.as_str()))
            .collect();
        let kept_quantum: Vec<&str> = match &self.quantum {
            Some(q) => q.names().into_iter().filter(|n| keep.contains(n)).collect(),
            None => Vec::new(),
        };

        let mut grouped: BTreeMap<Vec<u32>, (f64, Option<CMat>)> = BTreeMap::new();
        for e in &self.entries {
            let key: Vec<u32> = kept_classical.iter().map(|&i| e.values[i]).collect();
            let slot = grouped.entry(key).or_insert_with(|| (0.0, None));
            slot.0 += e.probability;
            if !kept_quantum.is_empty() {
                let b = e.block.as_ref().expect("validated block presence");
                let reduced = if kept_quantum.len() == b.space().names().len() {
                    b.clone()
                } else {
                    b.partial_trace(&kept_quantum)?
                };
                let weighted = reduced.matrix().scale(e.probability);
                match &mut slot.1 {
                    Some(acc) => *acc += weighted,
                    none => *none = Some(weighted),
                }
            }
        }

        let quantum = if kept_quantum.is_empty() {
            None
        } else {
            let b = self.entries[0].block.as_ref().expect("validated block presence");
            if kept_quantum.len() == b.space().names().len() {
                Some(b.space().clone())
            } else {
                Some(b.partial_trace(&kept_quantum)?.space().clone())
            }
        };
        let classical: Vec<(String, u32)> =
            kept_classical.iter().map(|&i| self.classical[i].clone()).collect();
        let mut entries = Vec::with_capacity(grouped.len());
        for (values, (p, acc)) in grouped {
            let block = match (acc, &quantum) {
                (Some(m), Some(q)) => {
                    Some(DensityOperator::from_matrix(m.unscale(p), q.clone())?)
                }
                _ => None,
            };
            entries.push(CqEntry { probability: p, values, block });
        }
        CqJointState::new(classical, quantum, entries)
    }
}

impl EntropySource for CqJointState {
    fn has_label(&self, name: &str) -> bool {
        self.classical.iter().any(|(n, _)| n == name)
            || self.quantum.as_ref().is_some_and(|q| q.contains(name))
    }

    fn subset_entropy(&self, labels: &[&str]) -> Result<f64, InfoError> {
        if labels.is_empty() {
            return Ok(0.0);
        }
        let reduced = self.marginalize(labels).map_err(|e| match e {
            EnsembleError::UnknownLabel { name } => InfoError::UnknownLabel { name },
            _ => InfoError::DimensionMismatch,
        })?;
        Ok(reduced.entropy())
    }
}

/// Build the joint state over (U, V1, V2, X1, X2, Bbar, Z1, Z2): for each
/// positive-probability classical tuple, send theta ⊗ phi through the
/// channel, then split on the instrument's outcome branches.
pub fn build_joint_state(
    ens: &InputEnsemble,
    channel: &KrausChannel,
    inst: &QuantumInstrument,
) -> Result<CqJointState, EnsembleError> {
    ens.validate()?;
    let sender_space = ens.theta[0].space().join(ens.phi[0].space())?;
    if &sender_space != channel.input() {
        return Err(EnsembleError::DimensionMismatch {
            context: format!(
                "channel input dim {} does not match sender states dim {}",
                channel.input().dim(),
                sender_space.dim()
            ),
        });
    }
    if channel.output() != inst.input() {
        return Err(EnsembleError::DimensionMismatch {
            context: format!(
                "instrument input dim {} does not match channel output dim {}",
                inst.input().dim(),
                channel.output().dim()
            ),
        });
    }

    let mut entries = Vec::new();
    let (mut z1_size, mut z2_size) = (1u32, 1u32);
    for u in 0..ens.u_size {
        for v1 in 0..ens.v1_size {
            for x1 in 0..ens.x1_size {
                for v2 in 0..ens.v2_size {
                    for x2 in 0..ens.x2_size {
                        let p = ens.prob(u, v1, v2, x1, x2);
                        if p <= 0.0 {
                            continue;
                        }
                        let rho_in = ens.theta[x1].tensor(&ens.phi[x2])?;
                        let rho_out = apply_channel(channel, &rho_in)?;
                        for record in apply_instrument(inst, &rho_out)? {
                            let Some(post) = record.post_state else { continue };
                            let (z1, z2) = record.outcome;
                            z1_size = z1_size.max(z1 + 1);
                            z2_size = z2_size.max(z2 + 1);
                            entries.push(CqEntry {
                                probability: p * record.probability,
                                values: vec![
                                    u as u32, v1 as u32, v2 as u32, x1 as u32, x2 as u32, z1, z2,
                                ],
                                block: Some(post),
                            });
                        }
                    }
                }
            }
        }
    }
    let sizes = [
        ens.u_size as u32,
        ens.v1_size as u32,
        ens.v2_size as u32,
        ens.x1_size as u32,
        ens.x2_size as u32,
        z1_size,
        z2_size,
    ];
    let classical = CLASSICAL_REGISTERS
        .iter()
        .zip(sizes)
        .map(|(n, s)| (n.to_string(), s))
        .collect();
    CqJointState::new(classical, Some(inst.output().clone()), entries)
}

/// Binary-adder input ensemble: uniform binary U, trivial V registers,
/// Bernoulli X letters mapped to computational-basis qubit states.
/// `alpha[u]` and `beta[u]` are the probabilities of x1 = 1 and x2 = 1
/// given U = u.
pub fn adder_ensemble(alpha: [f64; 2], beta: [f64; 2]) -> InputEnsemble {
    let a1 = Space::single("a1", 2);
    let a2 = Space::single("a2", 2);
    let basis_pair = |s: &Space| {
        vec![
            DensityOperator::basis(0, s.clone()).unwrap(),
            DensityOperator::basis(1, s.clone()).unwrap(),
        ]
    };
    InputEnsemble {
        u_size: 2,
        v1_size: 1,
        v2_size: 1,
        x1_size: 2,
        x2_size: 2,
        p_u: vec![0.5, 0.5],
        p_v1x1_given_u: alpha.iter().map(|&a| vec![1.0 - a, a]).collect(),
        p_v2x2_given_u: beta.iter().map(|&b| vec![1.0 - b, b]).collect(),
        theta: basis_pair(&a1),
        phi: basis_pair(&a2),
    }
}

/// Serializable form of an ensemble for configuration files. Matrices are
/// nested rows of [re, im] pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub u_size: usize,
    #[serde(default = "one")]
    pub v1_size: usize,
    #[serde(default = "one")]
    pub v2_size: usize,
    pub x1_size: usize,
    pub x2_size: usize,
    pub p_u: Vec<f64>,
    pub p_v1x1_given_u: Vec<Vec<f64>>,
    pub p_v2x2_given_u: Vec<Vec<f64>>,
    pub theta: Vec<Vec<Vec<[f64; 2]>>>,
    pub phi: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default = "default_a1")]
    pub sender1_label: String,
    #[serde(default = "default_a2")]
    pub sender2_label: String,
}

fn one() -> usize {
    1
}
fn default_a1() -> String {
    "a1".to_string()
}
fn default_a2() -> String {
    "a2".to_string()
}

impl EnsembleConfig {
    pub fn build(&self) -> Result<InputEnsemble, EnsembleError> {
        let to_states = |raw: &[Vec<Vec<[f64; 2]>>],
                         label: &str|
         -> Result<Vec<DensityOperator>, EnsembleError> {
            raw.iter()
                .map(|rows| {
                    let m = crate::qcore::matrix_from_rows(rows).map_err(|_| {
                        EnsembleError::DimensionMismatch {
                            context: format!("state matrix on {label} is not square"),
                        }
                    })?;
                    let space = Space::single(label, m.nrows());
                    Ok(DensityOperator::from_matrix(m, space)?)
                })
                .collect()
        };
        let ens = InputEnsemble {
            u_size: self.u_size,
            v1_size: self.v1_size,
            v2_size: self.v2_size,
            x1_size: self.x1_size,
            x2_size: self.x2_size,
            p_u: self.p_u.clone(),
            p_v1x1_given_u: self.p_v1x1_given_u.clone(),
            p_v2x2_given_u: self.p_v2x2_given_u.clone(),
            theta: to_states(&self.theta, &self.sender1_label)?,
            phi: to_states(&self.phi, &self.sender2_label)?,
        };
        ens.validate()?;
        Ok(ens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{adder_channel, adder_instrument, identity_channel, identity_instrument};
    use crate::qinfo::mutual_information;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_dist(rng: &mut StdRng, n: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    }

    fn random_qubit_state(rng: &mut StdRng, label: &str) -> DensityOperator {
        let g = CMat::from_fn(2, 2, |_, _| {
            crate::qcore::C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        DensityOperator::from_matrix(m.unscale(tr), Space::single(label, 2)).unwrap()
    }

    fn random_ensemble(rng: &mut StdRng) -> InputEnsemble {
        let u_size = rng.gen_range(1..=3);
        let v1_size = rng.gen_range(1..=2);
        let v2_size = rng.gen_range(1..=2);
        let x1_size = 2;
        let x2_size = 2;
        InputEnsemble {
            u_size,
            v1_size,
            v2_size,
            x1_size,
            x2_size,
            p_u: random_dist(rng, u_size),
            p_v1x1_given_u: (0..u_size).map(|_| random_dist(rng, v1_size * x1_size)).collect(),
            p_v2x2_given_u: (0..u_size).map(|_| random_dist(rng, v2_size * x2_size)).collect(),
            theta: (0..x1_size).map(|_| random_qubit_state(rng, "a1")).collect(),
            phi: (0..x2_size).map(|_| random_qubit_state(rng, "a2")).collect(),
        }
    }

    #[test]
    fn trivial_ensemble_identity_channel_single_entry() {
        let a1 = Space::single("a1", 2);
        let a2 = Space::single("a2", 2);
        let theta = DensityOperator::basis(0, a1.clone()).unwrap();
        let phi = DensityOperator::maximally_mixed(a2.clone());
        let ens = InputEnsemble {
            u_size: 1,
            v1_size: 1,
            v2_size: 1,
            x1_size: 1,
            x2_size: 1,
            p_u: vec![1.0],
            p_v1x1_given_u: vec![vec![1.0]],
            p_v2x2_given_u: vec![vec![1.0]],
            theta: vec![theta.clone()],
            phi: vec![phi.clone()],
        };
        let joint_space = a1.join(&a2).unwrap();
        let channel = identity_channel(joint_space.clone());
        let inst = identity_instrument(joint_space);
        let joint = build_joint_state(&ens, &channel, &inst).unwrap();
        assert_eq!(joint.entries().len(), 1);
        let e = &joint.entries()[0];
        assert_abs_diff_eq!(e.probability, 1.0, epsilon = 1e-12);
        let expected = theta.tensor(&phi).unwrap();
        let diff = (e.block.as_ref().unwrap().matrix() - expected.matrix())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn adder_joint_has_eight_entries_with_deterministic_outcomes() {
        let ens = adder_ensemble([0.3, 0.4], [0.2, 0.45]);
        let joint =
            build_joint_state(&ens, &adder_channel(), &adder_instrument()).unwrap();
        assert_eq!(joint.entries().len(), 8);
        let idx = |name: &str| {
            joint
                .classical_labels()
                .iter()
                .position(|(n, _)| n == name)
                .unwrap()
        };
        let (ix1, ix2, iz1, iz2) = (idx("x1"), idx("x2"), idx("z1"), idx("z2"));
        for e in joint.entries() {
            let (x1, x2) = (e.values[ix1], e.values[ix2]);
            let expected_y = x1 + x2;
            assert_eq!(e.values[iz1], expected_y);
            assert_eq!(e.values[iz2], expected_y);
            if x1 != x2 {
                assert_eq!(e.values[iz1], 1);
            }
        }
    }

    #[test]
    fn random_ensembles_conserve_probability() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let ens = random_ensemble(&mut rng);
            let joint =
                build_joint_state(&ens, &adder_channel(), &adder_instrument()).unwrap();
            let total: f64 = joint.entries().iter().map(|e| e.probability).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn adder_x_marginal_is_mixture_of_bernoulli_products() {
        let alpha = [0.3, 0.45];
        let beta = [0.15, 0.4];
        let ens = adder_ensemble(alpha, beta);
        let joint =
            build_joint_state(&ens, &adder_channel(), &adder_instrument()).unwrap();
        let marg = joint.marginalize(&["x1", "x2"]).unwrap();
        for e in marg.entries() {
            let (x1, x2) = (e.values[0] as usize, e.values[1] as usize);
            let mut expected = 0.0;
            for u in 0..2 {
                let pa = if x1 == 1 { alpha[u] } else { 1.0 - alpha[u] };
                let pb = if x2 == 1 { beta[u] } else { 1.0 - beta[u] };
                expected += 0.5 * pa * pb;
            }
            assert_abs_diff_eq!(e.probability, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn marginalize_keep_all_and_keep_none() {
        let ens = adder_ensemble([0.3, 0.4], [0.2, 0.45]);
        let joint =
            build_joint_state(&ens, &adder_channel(), &adder_instrument()).unwrap();
        let mut all: Vec<&str> = CLASSICAL_REGISTERS.to_vec();
        all.push("bbar");
        let full = joint.marginalize(&all).unwrap();
        assert_eq!(full.entries().len(), joint.entries().len());
        assert_abs_diff_eq!(full.entropy(), joint.entropy(), epsilon = 1e-12);
        let none = joint.marginalize(&[]).unwrap();
        assert_eq!(none.entries().len(), 1);
        assert_abs_diff_eq!(none.entries()[0].probability, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(none.entropy(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn senders_conditionally_independent_given_u() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let ens = random_ensemble(&mut rng);
            let joint =
                build_joint_state(&ens, &adder_channel(), &adder_instrument()).unwrap();
            let i = mutual_information(&joint, &["x1"], &["x2"], &["u"]).unwrap();
            assert!(i.abs() < 1e-9, "I(X1;X2|U) = {i}");
        }
    }

    #[test]
    fn trivial_instrument_keeps_channel_output_and_silent_feedback() {
        let ens = adder_ensemble([0.3, 0.4], [0.2, 0.45]);
        let channel = adder_channel();
        let inst = identity_instrument(channel.output().clone());
        let joint = build_joint_state(&ens, &channel, &inst).unwrap();
        let hz = joint.subset_entropy(&["z1", "z2"]).unwrap();
        assert_abs_diff_eq!(hz, 0.0, epsilon = 1e-12);
        assert_eq!(joint.quantum_space().unwrap().dim(), 4);
        // with silent feedback the quantum part is exactly the channel output
        let i = mutual_information(&joint, &["x1", "x2"], &["b"], &[]).unwrap();
        assert!(i > 0.0);
    }

    #[test]
    fn entropy_decomposition_matches_block_diagonal_embedding() {
        let mut rng = StdRng::seed_from_u64(23);
        let ens = random_ensemble(&mut rng);
        let joint =
            build_joint_state(&ens, &adder_channel(), &adder_instrument()).unwrap();
        let probs: Vec<f64> = joint.entries().iter().map(|e| e.probability).collect();
        let mut expected = shannon_entropy(&probs);
        for e in joint.entries() {
            expected += e.probability * von_neumann_entropy(e.block.as_ref().unwrap());
        }
        assert_abs_diff_eq!(joint.entropy(), expected, epsilon = 1e-9);
    }

    #[test]
    fn config_round_trip() {
        let cfg = EnsembleConfig {
            u_size: 1,
            v1_size: 1,
            v2_size: 1,
            x1_size: 2,
            x2_size: 2,
            p_u: vec![1.0],
            p_v1x1_given_u: vec![vec![0.5, 0.5]],
            p_v2x2_given_u: vec![vec![0.5, 0.5]],
            theta: vec![
                vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]],
                vec![vec![[0.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]],
            ],
            phi: vec![
                vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]],
                vec![vec![[0.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]],
            ],
            sender1_label: "a1".to_string(),
            sender2_label: "a2".to_string(),
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: EnsembleConfig = serde_json::from_str(&text).unwrap();
        let ens = back.build().unwrap();
        assert_eq!(ens.x1_size, 2);
        assert_eq!(ens.theta[1].matrix()[(1, 1)].re, 1.0);
    }
}
