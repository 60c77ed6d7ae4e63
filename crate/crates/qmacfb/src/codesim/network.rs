//! Multiplex Bayesian networks: a DAG of conditionally distributed
//! vertices where each vertex additionally declares which message indices
//! its codewords may depend on, monotone along edges.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ensemble::InputEnsemble;

use super::CodesimError;

const ROW_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MessageIndex {
    pub name: String,
    pub size: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetVertex {
    pub name: String,
    pub alphabet: usize,
    pub parents: Vec<String>,
    /// Rows indexed by the parents' joint symbol (mixed radix, first parent
    /// most significant), columns by this vertex's alphabet.
    pub conditional: Vec<Vec<f64>>,
    /// Message indices this vertex's codewords depend on.
    pub ind: BTreeSet<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplexBayesNet {
    pub messages: Vec<MessageIndex>,
    pub vertices: Vec<NetVertex>,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl MultiplexBayesNet {
    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    /// Deterministic topological order (stable Kahn), or None on a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertices.len();
        let mut indegree = vec![0usize; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, v) in self.vertices.iter().enumerate() {
            for p in &v.parents {
                let pi = self.vertex_index(p)?;
                indegree[i] += 1;
                children[pi].push(i);
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut ready: BTreeSet<usize> =
            (0..n).filter(|&i| indegree[i] == 0).collect();
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() == n {
            Some(order)
        } else {
            None
        }
    }

    /// DOT-format rendering for inspection.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph multiplex {\n  rankdir=LR;\n");
        for v in &self.vertices {
            let ind: Vec<String> = v
                .ind
                .iter()
                .map(|&j| self.messages[j].name.clone())
                .collect();
            out.push_str(&format!(
                "  \"{}\" [label=\"{}\\nind: {{{}}}\"];\n",
                v.name,
                v.name,
                ind.join(", ")
            ));
        }
        for v in &self.vertices {
            for p in &v.parents {
                out.push_str(&format!("  \"{p}\" -> \"{}\";\n", v.name));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Collect every violated structural invariant; an empty report is a pass.
pub fn validate_network(net: &MultiplexBayesNet) -> ValidationReport {
    let mut issues = Vec::new();
    for (j, m) in net.messages.iter().enumerate() {
        if m.size == 0 {
            issues.push(format!("message index {} (`{}`) has size 0", j, m.name));
        }
    }
    let mut seen = BTreeSet::new();
    for v in &net.vertices {
        if !seen.insert(v.name.clone()) {
            issues.push(format!("duplicate vertex name `{}`", v.name));
        }
        if v.alphabet == 0 {
            issues.push(format!("vertex `{}` has empty alphabet", v.name));
        }
    }
    for v in &net.vertices {
        let mut rows = 1usize;
        let mut parents_ok = true;
        for p in &v.parents {
            match net.vertex_index(p) {
                Some(pi) => {
                    rows = rows.saturating_mul(net.vertices[pi].alphabet);
                    for &j in &net.vertices[pi].ind {
                        if !v.ind.contains(&j) {
                            issues.push(format!(
                                "vertex `{}` lacks message index {} carried by parent `{p}`",
                                v.name, j
                            ));
                        }
                    }
                }
                None => {
                    parents_ok = false;
                    issues.push(format!("vertex `{}` has unknown parent `{p}`", v.name));
                }
            }
        }
        for &j in &v.ind {
            if j >= net.messages.len() {
                issues.push(format!(
                    "vertex `{}` references undeclared message index {j}",
                    v.name
                ));
            }
        }
        if parents_ok {
            if v.conditional.len() != rows {
                issues.push(format!(
                    "vertex `{}` conditional has {} rows, expected {rows}",
                    v.name,
                    v.conditional.len()
                ));
            }
            for (r, row) in v.conditional.iter().enumerate() {
                if row.len() != v.alphabet {
                    issues.push(format!(
                        "vertex `{}` conditional row {r} has {} entries, expected {}",
                        v.name,
                        row.len(),
                        v.alphabet
                    ));
                    continue;
                }
                if row.iter().any(|&x| x < -ROW_TOL) {
                    issues.push(format!(
                        "vertex `{}` conditional row {r} has a negative entry",
                        v.name
                    ));
                }
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > ROW_TOL {
                    issues.push(format!(
                        "vertex `{}` conditional row {r} sums to {s}",
                        v.name
                    ));
                }
            }
        }
    }
    if net.topological_order().is_none() {
        issues.push("graph has a cycle".to_string());
    }
    ValidationReport { issues }
}

/// |M| = max(1, floor(2^{nR})). None when the set cannot be indexed.
pub fn message_set_size(rate: f64, n: usize) -> Option<u64> {
    if !(0.0..=1.0).contains(&rate) {
        return None;
    }
    let bits = rate * n as f64;
    if bits >= 62.0 {
        return None;
    }
    Some((2.0_f64.powf(bits).floor() as u64).max(1))
}

fn marginal_x_given_u(table: &[Vec<f64>], v_size: usize, x_size: usize) -> Vec<Vec<f64>> {
    table
        .iter()
        .map(|row| {
            (0..x_size)
                .map(|x| (0..v_size).map(|v| row[v * x_size + x]).sum())
                .collect()
        })
        .collect()
}

/// Block-Markov feedback codebook structure: T blocks of (u, x1, x2),
/// where u and x2 re-encode the previous block's second message and x1
/// carries the fresh first message, no cross-block edges.
pub fn build_qcl_network(
    ens: &InputEnsemble,
    t_blocks: usize,
    r1: f64,
    r2: f64,
    n: usize,
) -> Result<MultiplexBayesNet, CodesimError> {
    if t_blocks < 2 {
        return Err(CodesimError::InvalidConfig {
            context: format!("need at least 2 blocks, got {t_blocks}"),
        });
    }
    let m1 = message_set_size(r1, n).ok_or(CodesimError::InvalidRates {
        required_bits: r1 * n as f64,
    })?;
    let m2 = message_set_size(r2, n).ok_or(CodesimError::InvalidRates {
        required_bits: r2 * n as f64,
    })?;

    let mut messages = Vec::new();
    // m1 per block t = 1..T, then m2 per block t = 0..T with singleton ends
    for t in 1..=t_blocks {
        messages.push(MessageIndex { name: format!("m1_{t}"), size: m1 });
    }
    for t in 0..=t_blocks {
        let size = if t == 0 || t == t_blocks { 1 } else { m2 };
        messages.push(MessageIndex { name: format!("m2_{t}"), size });
    }
    let m1_idx = |t: usize| t - 1;
    let m2_idx = |t: usize| t_blocks + t;

    let p_x1_u = marginal_x_given_u(&ens.p_v1x1_given_u, ens.v1_size, ens.x1_size);
    let p_x2_u = marginal_x_given_u(&ens.p_v2x2_given_u, ens.v2_size, ens.x2_size);

    let mut vertices = Vec::with_capacity(3 * t_blocks);
    for t in 1..=t_blocks {
        vertices.push(NetVertex {
            name: format!("u_{t}"),
            alphabet: ens.u_size,
            parents: vec![],
            conditional: vec![ens.p_u.clone()],
            ind: BTreeSet::from([m2_idx(t - 1)]),
        });
        vertices.push(NetVertex {
            name: format!("x1_{t}"),
            alphabet: ens.x1_size,
            parents: vec![format!("u_{t}")],
            conditional: p_x1_u.clone(),
            ind: BTreeSet::from([m1_idx(t), m2_idx(t - 1)]),
        });
        vertices.push(NetVertex {
            name: format!("x2_{t}"),
            alphabet: ens.x2_size,
            parents: vec![format!("u_{t}")],
            conditional: p_x2_u.clone(),
            ind: BTreeSet::from([m2_idx(t), m2_idx(t - 1)]),
        });
    }
    Ok(MultiplexBayesNet { messages, vertices })
}

/// Conditional p(x | v, u) extracted from the joint table p(v, x | u).
fn x_given_vu(table: &[Vec<f64>], u_size: usize, v_size: usize, x_size: usize) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(u_size * v_size);
    for u_row in table.iter().take(u_size) {
        for v in 0..v_size {
            let pv: f64 = (0..x_size).map(|x| u_row[v * x_size + x]).sum();
            let row: Vec<f64> = if pv <= 0.0 {
                // unreachable branch; any valid row keeps the table normalized
                let mut r = vec![0.0; x_size];
                r[0] = 1.0;
                r
            } else {
                (0..x_size).map(|x| u_row[v * x_size + x] / pv).collect()
            };
            rows.push(row);
        }
    }
    rows
}

fn v_given_u(table: &[Vec<f64>], v_size: usize, x_size: usize) -> Vec<Vec<f64>> {
    table
        .iter()
        .map(|row| {
            (0..v_size)
                .map(|v| (0..x_size).map(|x| row[v * x_size + x]).sum())
                .collect()
        })
        .collect()
}

/// Rate-splitting block-Markov structure: 5 vertices per block with chains
/// u -> v1 -> x1 and u -> v2 -> x2; each rate R_k is split into a layered
/// part R_k' (re-encoded one block later) and a fresh part R_k''.
#[allow(clippy::too_many_arguments)]
pub fn build_ratesplit_network(
    ens: &InputEnsemble,
    t_blocks: usize,
    r1p: f64,
    r1pp: f64,
    r2p: f64,
    r2pp: f64,
    n: usize,
) -> Result<MultiplexBayesNet, CodesimError> {
    if t_blocks < 2 {
        return Err(CodesimError::InvalidConfig {
            context: format!("need at least 2 blocks, got {t_blocks}"),
        });
    }
    let size_of = |r: f64| {
        message_set_size(r, n).ok_or(CodesimError::InvalidRates {
            required_bits: r * n as f64,
        })
    };
    let (m1p, m1pp, m2p, m2pp) = (size_of(r1p)?, size_of(r1pp)?, size_of(r2p)?, size_of(r2pp)?);

    let mut messages = Vec::new();
    // layered messages exist for t = 0..T with singleton ends
    for t in 0..=t_blocks {
        let boundary = t == 0 || t == t_blocks;
        messages.push(MessageIndex {
            name: format!("m1p_{t}"),
            size: if boundary { 1 } else { m1p },
        });
    }
    for t in 0..=t_blocks {
        let boundary = t == 0 || t == t_blocks;
        messages.push(MessageIndex {
            name: format!("m2p_{t}"),
            size: if boundary { 1 } else { m2p },
        });
    }
    for t in 1..=t_blocks {
        messages.push(MessageIndex { name: format!("m1pp_{t}"), size: m1pp });
    }
    for t in 1..=t_blocks {
        messages.push(MessageIndex { name: format!("m2pp_{t}"), size: m2pp });
    }
    let m1p_idx = |t: usize| t;
    let m2p_idx = |t: usize| t_blocks + 1 + t;
    let m1pp_idx = |t: usize| 2 * (t_blocks + 1) + t - 1;
    let m2pp_idx = |t: usize| 2 * (t_blocks + 1) + t_blocks + t - 1;

    let pv1_u = v_given_u(&ens.p_v1x1_given_u, ens.v1_size, ens.x1_size);
    let pv2_u = v_given_u(&ens.p_v2x2_given_u, ens.v2_size, ens.x2_size);
    let px1_v1u = x_given_vu(&ens.p_v1x1_given_u, ens.u_size, ens.v1_size, ens.x1_size);
    let px2_v2u = x_given_vu(&ens.p_v2x2_given_u, ens.u_size, ens.v2_size, ens.x2_size);

    let mut vertices = Vec::with_capacity(5 * t_blocks);
    for t in 1..=t_blocks {
        let prev = BTreeSet::from([m1p_idx(t - 1), m2p_idx(t - 1)]);
        vertices.push(NetVertex {
            name: format!("u_{t}"),
            alphabet: ens.u_size,
            parents: vec![],
            conditional: vec![ens.p_u.clone()],
            ind: prev.clone(),
        });
        let mut ind_v1 = prev.clone();
        ind_v1.insert(m1p_idx(t));
        vertices.push(NetVertex {
            name: format!("v1_{t}"),
            alphabet: ens.v1_size,
            parents: vec![format!("u_{t}")],
            conditional: pv1_u.clone(),
            ind: ind_v1.clone(),
        });
        let mut ind_x1 = ind_v1;
        ind_x1.insert(m1pp_idx(t));
        vertices.push(NetVertex {
            name: format!("x1_{t}"),
            alphabet: ens.x1_size,
            parents: vec![format!("u_{t}"), format!("v1_{t}")],
            conditional: px1_v1u.clone(),
            ind: ind_x1,
        });
        let mut ind_v2 = prev.clone();
        ind_v2.insert(m2p_idx(t));
        vertices.push(NetVertex {
            name: format!("v2_{t}"),
            alphabet: ens.v2_size,
            parents: vec![format!("u_{t}")],
            conditional: pv2_u.clone(),
            ind: ind_v2.clone(),
        });
        let mut ind_x2 = ind_v2;
        ind_x2.insert(m2pp_idx(t));
        vertices.push(NetVertex {
            name: format!("x2_{t}"),
            alphabet: ens.x2_size,
            parents: vec![format!("u_{t}"), format!("v2_{t}")],
            conditional: px2_v2u.clone(),
            ind: ind_x2,
        });
    }
    Ok(MultiplexBayesNet { messages, vertices })
}

/// Two-sender MAC structure: shared coin u feeding both senders, message 0
/// on x1 and message 1 on x2.
pub fn example_mac_network(ens: &InputEnsemble, m1: u64, m2: u64) -> MultiplexBayesNet {
    let p_x1_u = marginal_x_given_u(&ens.p_v1x1_given_u, ens.v1_size, ens.x1_size);
    let p_x2_u = marginal_x_given_u(&ens.p_v2x2_given_u, ens.v2_size, ens.x2_size);
    MultiplexBayesNet {
        messages: vec![
            MessageIndex { name: "m1".to_string(), size: m1 },
            MessageIndex { name: "m2".to_string(), size: m2 },
        ],
        vertices: vec![
            NetVertex {
                name: "u".to_string(),
                alphabet: ens.u_size,
                parents: vec![],
                conditional: vec![ens.p_u.clone()],
                ind: BTreeSet::new(),
            },
            NetVertex {
                name: "x1".to_string(),
                alphabet: ens.x1_size,
                parents: vec!["u".to_string()],
                conditional: p_x1_u,
                ind: BTreeSet::from([0]),
            },
            NetVertex {
                name: "x2".to_string(),
                alphabet: ens.x2_size,
                parents: vec!["u".to_string()],
                conditional: p_x2_u,
                ind: BTreeSet::from([1]),
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::adder_ensemble;

    fn ens() -> InputEnsemble {
        adder_ensemble([0.5, 0.5], [0.5, 0.5])
    }

    #[test]
    fn example_mac_network_validates() {
        let net = example_mac_network(&ens(), 4, 4);
        assert!(validate_network(&net).is_valid());
    }

    #[test]
    fn parent_with_extra_message_index_is_invalid() {
        let mut net = example_mac_network(&ens(), 4, 4);
        net.vertices[0].ind.insert(0);
        let report = validate_network(&net);
        assert!(!report.is_valid());
        assert!(report.issues[0].contains("lacks message index"));
    }

    #[test]
    fn cycle_is_invalid() {
        let mut net = example_mac_network(&ens(), 2, 2);
        net.vertices[0].parents = vec!["x1".to_string()];
        net.vertices[0].conditional = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        net.vertices[0].ind = BTreeSet::from([0]);
        let report = validate_network(&net);
        assert!(report.issues.iter().any(|i| i.contains("cycle")));
    }

    #[test]
    fn qcl_network_structure() {
        let net = build_qcl_network(&ens(), 2, 0.5, 0.5, 8).unwrap();
        assert_eq!(net.vertices.len(), 6);
        assert!(validate_network(&net).is_valid());
        // u of block 2 re-encodes the first block's second message
        let u2 = &net.vertices[net.vertex_index("u_2").unwrap()];
        let ind: Vec<&str> = u2
            .ind
            .iter()
            .map(|&j| net.messages[j].name.as_str())
            .collect();
        assert_eq!(ind, vec!["m2_1"]);
        for t in 2..=6 {
            let n = build_qcl_network(&ens(), t, 0.25, 0.25, 8).unwrap();
            assert!(validate_network(&n).is_valid());
        }
    }

    #[test]
    fn qcl_network_zero_rate_is_singleton() {
        let net = build_qcl_network(&ens(), 2, 0.5, 0.0, 8).unwrap();
        for m in &net.messages {
            if m.name.starts_with("m2") {
                assert_eq!(m.size, 1);
            }
        }
    }

    #[test]
    fn ratesplit_network_structure() {
        let net = build_ratesplit_network(&ens(), 2, 0.2, 0.2, 0.2, 0.2, 10).unwrap();
        assert_eq!(net.vertices.len(), 10);
        for t in 2..=4 {
            let n = build_ratesplit_network(&ens(), t, 0.2, 0.2, 0.2, 0.2, 10).unwrap();
            assert!(validate_network(&n).is_valid());
        }
        let x1 = &net.vertices[net.vertex_index("x1_1").unwrap()];
        let ind: Vec<&str> = x1
            .ind
            .iter()
            .map(|&j| net.messages[j].name.as_str())
            .collect();
        assert_eq!(ind, vec!["m1p_0", "m1p_1", "m2p_0", "m1pp_1"]);
    }

    #[test]
    fn ratesplit_zero_layered_rates_degenerate() {
        let net = build_ratesplit_network(&ens(), 3, 0.0, 0.3, 0.0, 0.3, 10).unwrap();
        for m in &net.messages {
            if m.name.starts_with("m1p_") || m.name.starts_with("m2p_") {
                assert_eq!(m.size, 1);
            }
        }
        assert!(validate_network(&net).is_valid());
    }

    #[test]
    fn message_sizes() {
        assert_eq!(message_set_size(0.5, 8), Some(16));
        assert_eq!(message_set_size(0.0, 100), Some(1));
        assert_eq!(message_set_size(0.6, 200), None);
        assert_eq!(message_set_size(1.2, 8), None);
    }

    #[test]
    fn dot_export_mentions_all_vertices() {
        let net = example_mac_network(&ens(), 2, 2);
        let dot = net.to_dot();
        for v in &net.vertices {
            assert!(dot.contains(&v.name));
        }
        assert!(dot.contains("\"u\" -> \"x1\""));
    }
}
