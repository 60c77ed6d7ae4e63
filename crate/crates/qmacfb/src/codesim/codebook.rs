//! Random codebook generation over a multiplex Bayesian network: vertices
//! in topological order, one codeword per restricted message tuple, each
//! symbol drawn from the vertex conditional given the parents' codeword
//! symbols at the same position.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{validate_network, MultiplexBayesNet};
use super::CodesimError;

/// Total stored symbols allowed across all tables.
pub const MAX_CODEBOOK_SYMBOLS: u64 = 200_000_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodebookTable {
    pub vertex: String,
    /// Message indices this table is keyed by, ascending.
    pub ind: Vec<usize>,
    /// Sizes of those message sets, aligned with `ind`.
    pub sizes: Vec<u64>,
    /// One codeword per restricted tuple, lexicographic in `ind` order.
    pub words: Vec<Vec<u16>>,
}

impl CodebookTable {
    fn tuple_offset(&self, msgs: &[u64]) -> usize {
        let mut offset = 0u64;
        for (k, &j) in self.ind.iter().enumerate() {
            offset = offset * self.sizes[k] + msgs[j];
        }
        offset as usize
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Codebook {
    pub n: usize,
    pub seed: u64,
    pub tables: Vec<CodebookTable>,
}

impl Codebook {
    /// Codeword of a vertex under a full message assignment (one value per
    /// declared message index); coordinates outside the vertex's restriction
    /// are ignored, so extensions of the same restricted tuple agree.
    pub fn codeword(&self, vertex: usize, msgs: &[u64]) -> &[u16] {
        let t = &self.tables[vertex];
        &t.words[t.tuple_offset(msgs)]
    }

    pub fn stored_codewords(&self) -> usize {
        self.tables.iter().map(|t| t.words.len()).sum()
    }
}

fn sample_row<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> u16 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u16;
        }
    }
    (row.len() - 1) as u16
}

/// Generate every codeword table, deterministically for a given seed.
pub fn generate_codebook(
    net: &MultiplexBayesNet,
    n: usize,
    seed: u64,
) -> Result<Codebook, CodesimError> {
    let report = validate_network(net);
    if !report.is_valid() {
        return Err(CodesimError::InvalidNetwork {
            issues: report.issues.join("; "),
        });
    }
    let order = net.topological_order().expect("validated acyclic");

    let mut total_symbols = 0u64;
    for v in &net.vertices {
        let tuples: u64 = v
            .ind
            .iter()
            .map(|&j| net.messages[j].size)
            .try_fold(1u64, |a, s| a.checked_mul(s))
            .ok_or(CodesimError::InvalidRates { required_bits: f64::INFINITY })?;
        total_symbols = total_symbols
            .checked_add(tuples.checked_mul(n as u64).ok_or(CodesimError::InvalidRates {
                required_bits: f64::INFINITY,
            })?)
            .ok_or(CodesimError::InvalidRates { required_bits: f64::INFINITY })?;
    }
    if total_symbols > MAX_CODEBOOK_SYMBOLS {
        return Err(CodesimError::CodebookTooLarge {
            symbols: total_symbols,
            cap: MAX_CODEBOOK_SYMBOLS,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tables: Vec<Option<CodebookTable>> = vec![None; net.vertices.len()];
    for &vi in &order {
        let v = &net.vertices[vi];
        let ind: Vec<usize> = v.ind.iter().copied().collect();
        let sizes: Vec<u64> = ind.iter().map(|&j| net.messages[j].size).collect();
        let tuples: usize = sizes.iter().product::<u64>() as usize;
        let parent_idx: Vec<usize> = v
            .parents
            .iter()
            .map(|p| net.vertex_index(p).expect("validated parent"))
            .collect();

        let mut words = Vec::with_capacity(tuples);
        let mut msgs = vec![0u64; net.messages.len()];
        for t in 0..tuples {
            // decode lexicographic tuple index into the full assignment
            let mut rem = t as u64;
            for k in (0..ind.len()).rev() {
                msgs[ind[k]] = rem % sizes[k];
                rem /= sizes[k];
            }
            let parent_words: Vec<&[u16]> = parent_idx
                .iter()
                .map(|&pi| {
                    let pt = tables[pi].as_ref().expect("topological order");
                    let w: &[u16] = &pt.words[pt.tuple_offset(&msgs)];
                    // borrow ends with the push below, so copy the reference
                    w
                })
                .collect();
            let mut word = Vec::with_capacity(n);
            #[allow(clippy::needless_range_loop)]
            for i in 0..n {
                let mut row = 0usize;
                for (k, &pi) in parent_idx.iter().enumerate() {
                    row = row * net.vertices[pi].alphabet + parent_words[k][i] as usize;
                }
                word.push(sample_row(&v.conditional[row], &mut rng));
            }
            words.push(word);
        }
        tables[vi] = Some(CodebookTable {
            vertex: v.name.clone(),
            ind,
            sizes,
            words,
        });
    }
    Ok(Codebook {
        n,
        seed,
        tables: tables.into_iter().map(Option::unwrap).collect(),
    })
}
