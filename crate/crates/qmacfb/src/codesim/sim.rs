//! Monte Carlo simulation of the block-Markov feedback scheme: encode,
//! transmit, Born-sample the receiver's instrument, feed outcomes back,
//! estimate and decode by joint typicality.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::InputEnsemble;
use crate::qcore::{
    apply_channel, apply_instrument, sample_outcome, CMat, DensityOperator, KrausChannel,
    QuantumInstrument, C64,
};

use super::codebook::generate_codebook;
use super::network::{build_qcl_network, message_set_size};
use super::typicality::{typicality_check, JointDist};
use super::CodesimError;

const COMPLETENESS_TOL: f64 = 1e-9;

/// Per-branch fixed post-measurement states of a classical-complete
/// instrument: sigma_y is independent of the input whenever the branch
/// fires; None marks a branch that can never fire.
pub fn classical_complete_states(
    inst: &QuantumInstrument,
) -> Result<Vec<Option<DensityOperator>>, CodesimError> {
    let d = inst.input().dim();
    let dout = inst.output().dim();
    let mut out = Vec::with_capacity(inst.branches().len());
    for (bi, b) in inst.branches().iter().enumerate() {
        let apply = |m: &CMat| -> CMat {
            let mut s = CMat::zeros(dout, dout);
            for k in &b.kraus {
                s += k * m * k.adjoint();
            }
            s
        };
        let mut effect = CMat::zeros(d, d);
        for k in &b.kraus {
            effect += k.adjoint() * k;
        }
        let weight = effect.trace().re;
        if weight <= COMPLETENESS_TOL {
            out.push(None);
            continue;
        }
        let sigma_raw = apply(&CMat::identity(d, d)).unscale(weight);
        // linearity: checking every matrix unit checks every input state
        for r in 0..d {
            for c in 0..d {
                let mut unit = CMat::zeros(d, d);
                unit[(r, c)] = C64::new(1.0, 0.0);
                let got = apply(&unit);
                let dev = (got - sigma_raw.clone() * effect[(c, r)])
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                if dev > COMPLETENESS_TOL {
                    return Err(CodesimError::NotClassicalComplete { branch: bi });
                }
            }
        }
        out.push(Some(DensityOperator::from_matrix(
            sigma_raw,
            inst.output().clone(),
        )?));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimReport {
    pub trials: usize,
    pub r1: f64,
    pub r2: f64,
    pub n: usize,
    pub blocks: usize,
    pub delta: f64,
    pub seed: u64,
    pub message_sizes: (u64, u64),
    /// Fraction of trials where Alice 1 misestimated any fed-back message.
    pub encoder_estimate_error_rate: f64,
    /// Fraction of trials with any wrong decoded message.
    pub decoder_block_error_rate: f64,
    /// Per block (1-based), number of trials whose decode of that block failed.
    pub per_block_error_counts: Vec<u64>,
    /// Histogram of the first erroneous block per failing trial.
    pub first_error_block_counts: Vec<u64>,
    /// Aggregate measurement-outcome counts across all transmitted symbols.
    pub outcome_counts: Vec<u64>,
}

struct TrialResult {
    encoder_err: bool,
    decoder_err: bool,
    block_errors: Vec<bool>,
    outcome_counts: Vec<u64>,
}

/// Simulate the feedback scheme on a classical-complete instrument.
#[allow(clippy::too_many_arguments)]
pub fn simulate_qcl_scheme(
    ens: &InputEnsemble,
    channel: &KrausChannel,
    inst: &QuantumInstrument,
    r1: f64,
    r2: f64,
    n: usize,
    t_blocks: usize,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<SimReport, CodesimError> {
    ens.validate().map_err(|e| CodesimError::InvalidConfig { context: e.to_string() })?;
    classical_complete_states(inst)?;
    if n == 0 || trials == 0 {
        return Err(CodesimError::InvalidConfig {
            context: "need n >= 1 and trials >= 1".to_string(),
        });
    }
    let m1 = message_set_size(r1, n).ok_or(CodesimError::InvalidRates {
        required_bits: r1 * n as f64,
    })?;
    let m2 = message_set_size(r2, n).ok_or(CodesimError::InvalidRates {
        required_bits: r2 * n as f64,
    })?;
    let net = build_qcl_network(ens, t_blocks, r1, r2, n)?;
    // fail fast on memory before any trial runs
    generate_codebook(&net, n, seed).map_err(|e| match e {
        CodesimError::CodebookTooLarge { symbols, .. } => CodesimError::InvalidRates {
            required_bits: (symbols as f64).log2(),
        },
        other => other,
    })?;

    let n_outcomes = inst.branches().len();
    let mut rho_out = Vec::with_capacity(ens.x1_size);
    for x1 in 0..ens.x1_size {
        let mut row = Vec::with_capacity(ens.x2_size);
        for x2 in 0..ens.x2_size {
            let joint = ens.theta[x1].tensor(&ens.phi[x2])?;
            row.push(apply_channel(channel, &joint)?);
        }
        rho_out.push(row);
    }
    // per-symbol classical law p(y | x1, x2)
    let mut p_y = vec![vec![vec![0.0; n_outcomes]; ens.x2_size]; ens.x1_size];
    for x1 in 0..ens.x1_size {
        for x2 in 0..ens.x2_size {
            for (y, rec) in apply_instrument(inst, &rho_out[x1][x2])?.iter().enumerate() {
                p_y[x1][x2][y] = rec.probability;
            }
        }
    }
    let z1_size = inst
        .branches()
        .iter()
        .map(|b| b.outcome.0 as usize + 1)
        .max()
        .unwrap_or(1);
    let p_x1_u: Vec<Vec<f64>> = (0..ens.u_size)
        .map(|u| {
            (0..ens.x1_size)
                .map(|x| (0..ens.v1_size).map(|v| ens.p_v1x1_given_u[u][v * ens.x1_size + x]).sum())
                .collect()
        })
        .collect();
    let p_x2_u: Vec<Vec<f64>> = (0..ens.u_size)
        .map(|u| {
            (0..ens.x2_size)
                .map(|x| (0..ens.v2_size).map(|v| ens.p_v2x2_given_u[u][v * ens.x2_size + x]).sum())
                .collect()
        })
        .collect();

    let mut alice_probs =
        vec![0.0; ens.u_size * ens.x1_size * ens.x2_size * z1_size];
    let mut bob_probs = vec![0.0; ens.u_size * ens.x1_size * ens.x2_size * n_outcomes];
    for u in 0..ens.u_size {
        for x1 in 0..ens.x1_size {
            for x2 in 0..ens.x2_size {
                let base = ens.p_u[u] * p_x1_u[u][x1] * p_x2_u[u][x2];
                for (y, branch) in inst.branches().iter().enumerate() {
                    let p = base * p_y[x1][x2][y];
                    let z1 = branch.outcome.0 as usize;
                    alice_probs[((u * ens.x1_size + x1) * ens.x2_size + x2) * z1_size + z1] += p;
                    bob_probs[((u * ens.x1_size + x1) * ens.x2_size + x2) * n_outcomes + y] += p;
                }
            }
        }
    }
    let alice_dist = JointDist::new(
        vec![ens.u_size, ens.x1_size, ens.x2_size, z1_size],
        alice_probs,
    )?;
    let bob_dist = JointDist::new(
        vec![ens.u_size, ens.x1_size, ens.x2_size, n_outcomes],
        bob_probs,
    )?;

    let u_v = |t: usize| net.vertex_index(&format!("u_{t}")).unwrap();
    let x1_v = |t: usize| net.vertex_index(&format!("x1_{t}")).unwrap();
    let x2_v = |t: usize| net.vertex_index(&format!("x2_{t}")).unwrap();
    let m1_j = |t: usize| t - 1;
    let m2_j = |t: usize| t_blocks + t;

    let run_trial = |trial: usize| -> Result<TrialResult, CodesimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64 + 1);
        let cb_seed: u64 = rng.gen();
        let cb = generate_codebook(&net, n, cb_seed)?;

        let mut msg1 = vec![0u64; t_blocks + 1];
        let mut msg2 = vec![0u64; t_blocks + 1];
        for m in msg1.iter_mut().take(t_blocks + 1).skip(1) {
            *m = rng.gen_range(0..m1);
        }
        for m in msg2.iter_mut().take(t_blocks).skip(1) {
            *m = rng.gen_range(0..m2);
        }

        let mut assignment = vec![0u64; net.messages.len()];
        let mut est_m2 = vec![0u64; t_blocks + 1];
        let mut y_blocks: Vec<Vec<u16>> = Vec::with_capacity(t_blocks);
        let mut outcome_counts = vec![0u64; n_outcomes];

        for t in 1..=t_blocks {
            assignment[m1_j(t)] = msg1[t];
            // Alice 1 keys her codewords on her own estimate of the
            // previous second message; Alice 2 knows hers exactly.
            assignment[m2_j(t - 1)] = est_m2[t - 1];
            let x1_seq = cb.codeword(x1_v(t), &assignment).to_vec();
            let u_seq = cb.codeword(u_v(t), &assignment).to_vec();
            assignment[m2_j(t - 1)] = msg2[t - 1];
            assignment[m2_j(t)] = msg2[t];
            let x2_seq = cb.codeword(x2_v(t), &assignment).to_vec();

            let mut y_seq = Vec::with_capacity(n);
            let mut z1_seq = Vec::with_capacity(n);
            for i in 0..n {
                let rho = &rho_out[x1_seq[i] as usize][x2_seq[i] as usize];
                let rec = sample_outcome(inst, rho, &mut rng)?;
                let y = inst
                    .branches()
                    .iter()
                    .position(|b| b.outcome == rec.outcome)
                    .expect("sampled outcome is a branch");
                outcome_counts[y] += 1;
                y_seq.push(y as u16);
                z1_seq.push(rec.outcome.0 as u16);
            }

            if t < t_blocks {
                // Alice 1: unique jointly typical fresh second message
                let mut found: Option<u64> = None;
                let mut unique = true;
                assignment[m2_j(t - 1)] = est_m2[t - 1];
                for cand in 0..m2 {
                    assignment[m2_j(t)] = cand;
                    let x2_cand = cb.codeword(x2_v(t), &assignment);
                    if typicality_check(
                        &[&u_seq, &x1_seq, x2_cand, &z1_seq],
                        &alice_dist,
                        delta,
                    )? {
                        if found.is_some() {
                            unique = false;
                            break;
                        }
                        found = Some(cand);
                    }
                }
                est_m2[t] = match (found, unique) {
                    (Some(c), true) => c,
                    _ => 0,
                };
            }
            y_blocks.push(y_seq);
        }

        // backward decoding
        let mut dec_m1 = vec![0u64; t_blocks + 1];
        let mut dec_m2 = vec![0u64; t_blocks + 1];
        for t in (1..=t_blocks).rev() {
            let y_seq = &y_blocks[t - 1];
            let mut found: Option<(u64, u64)> = None;
            let mut unique = true;
            assignment[m2_j(t)] = dec_m2[t];
            'search: for prev in 0..net.messages[m2_j(t - 1)].size {
                assignment[m2_j(t - 1)] = prev;
                let u_cand = cb.codeword(u_v(t), &assignment).to_vec();
                let x2_cand = cb.codeword(x2_v(t), &assignment).to_vec();
                for a in 0..m1 {
                    assignment[m1_j(t)] = a;
                    let x1_cand = cb.codeword(x1_v(t), &assignment);
                    if typicality_check(
                        &[&u_cand, x1_cand, &x2_cand, y_seq],
                        &bob_dist,
                        delta,
                    )? {
                        if found.is_some() {
                            unique = false;
                            break 'search;
                        }
                        found = Some((a, prev));
                    }
                }
            }
            let (a, prev) = match (found, unique) {
                (Some(pair), true) => pair,
                _ => (0, 0),
            };
            dec_m1[t] = a;
            dec_m2[t - 1] = prev;
        }

        let mut block_errors = vec![false; t_blocks];
        for t in 1..=t_blocks {
            let mut err = dec_m1[t] != msg1[t];
            if t >= 2 && dec_m2[t - 1] != msg2[t - 1] {
                err = true;
            }
            if err {
                block_errors[t - 1] = true;
            }
        }
        let encoder_err = (1..t_blocks).any(|t| est_m2[t] != msg2[t]);
        Ok(TrialResult {
            encoder_err,
            decoder_err: block_errors.iter().any(|&e| e),
            block_errors,
            outcome_counts,
        })
    };

    let results: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(run_trial)
        .collect::<Result<_, CodesimError>>()?;

    let mut per_block = vec![0u64; t_blocks];
    let mut first_error = vec![0u64; t_blocks];
    let mut outcome_counts = vec![0u64; n_outcomes];
    let mut enc_errs = 0u64;
    let mut dec_errs = 0u64;
    for r in &results {
        if r.encoder_err {
            enc_errs += 1;
        }
        if r.decoder_err {
            dec_errs += 1;
        }
        for (t, &e) in r.block_errors.iter().enumerate() {
            if e {
                per_block[t] += 1;
            }
        }
        if let Some(t) = r.block_errors.iter().position(|&e| e) {
            first_error[t] += 1;
        }
        for (y, &c) in r.outcome_counts.iter().enumerate() {
            outcome_counts[y] += c;
        }
    }

    Ok(SimReport {
        trials,
        r1,
        r2,
        n,
        blocks: t_blocks,
        delta,
        seed,
        message_sizes: (m1, m2),
        encoder_estimate_error_rate: enc_errs as f64 / trials as f64,
        decoder_block_error_rate: dec_errs as f64 / trials as f64,
        per_block_error_counts: per_block,
        first_error_block_counts: first_error,
        outcome_counts,
    })
}
