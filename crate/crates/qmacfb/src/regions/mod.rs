//! Achievable rate bounds and region boundaries for the two-sender MAC
//! with measurement feedback.

pub mod hull;
pub mod optim;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::{CqJointState, EnsembleError};
use crate::qinfo::{binary_entropy, mutual_information, InfoError};

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("parameter `{name}` = {value} outside [{lo}, {hi}]")]
    DomainError {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("joint state is missing register `{name}`")]
    MissingLabel { name: String },
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// Per-sender and sum rate limits, all in bits per channel use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub b1: f64,
    pub b2: f64,
    /// Third line of the layered region; absent for the feedback-only region.
    pub bsum_layered: Option<f64>,
    pub bsum: f64,
}

impl RateBounds {
    pub fn effective_sum(&self) -> f64 {
        match self.bsum_layered {
            Some(l) => l.min(self.bsum),
            None => self.bsum,
        }
    }
}

/// Bernoulli parameters of the adder input family; `alpha[u]`/`beta[u]`
/// are the excitation probabilities of sender 1/2 given the shared
/// coin u. The canonical domain is [0, 1/2] per component; `full_range`
/// widens it to [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdderParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta0: f64,
    pub beta1: f64,
}

impl AdderParams {
    pub fn new(
        alpha0: f64,
        alpha1: f64,
        beta0: f64,
        beta1: f64,
        full_range: bool,
    ) -> Result<Self, RegionError> {
        let hi = if full_range { 1.0 } else { 0.5 };
        for (name, value) in [
            ("alpha0", alpha0),
            ("alpha1", alpha1),
            ("beta0", beta0),
            ("beta1", beta1),
        ] {
            if !(0.0..=hi).contains(&value) || !value.is_finite() {
                return Err(RegionError::DomainError { name, value, lo: 0.0, hi });
            }
        }
        Ok(Self { alpha0, alpha1, beta0, beta1 })
    }

    /// Collision probability of the two senders' letters, recomputed from
    /// the Bernoulli parameters on every call.
    pub fn gamma(&self) -> f64 {
        0.5 * (self.alpha0 * self.beta0
            + (1.0 - self.alpha0) * (1.0 - self.beta0)
            + self.alpha1 * self.beta1
            + (1.0 - self.alpha1) * (1.0 - self.beta1))
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha0, self.alpha1, self.beta0, self.beta1]
    }
}

/// Ordered upper-right boundary of a convex region in the nonnegative
/// quadrant: vertices sorted by R1 ascending with R2 nonincreasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionBoundary {
    pub vertices: Vec<(f64, f64)>,
}

impl RegionBoundary {
    /// Support value along the unit direction (mu, 1-mu)/|(mu, 1-mu)|.
    pub fn support(&self, mu: f64) -> f64 {
        let norm = (mu * mu + (1.0 - mu) * (1.0 - mu)).sqrt();
        self.vertices
            .iter()
            .map(|&(x, y)| (mu * x + (1.0 - mu) * y) / norm)
            .fold(0.0, f64::max)
    }

    /// Whether (r1, r2) lies in the region (within `tol`).
    pub fn contains_point(&self, r1: f64, r2: f64, tol: f64) -> bool {
        if r1 < -tol || r2 < -tol {
            return false;
        }
        let probes = 512;
        for k in 0..=probes {
            let mu = k as f64 / probes as f64;
            let norm = (mu * mu + (1.0 - mu) * (1.0 - mu)).sqrt();
            if (mu * r1 + (1.0 - mu) * r2) / norm > self.support(mu) + tol {
                return false;
            }
        }
        true
    }
}

/// Signed support-function comparison of two regions over a direction fan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContainmentReport {
    /// Whether the first region contains the second (all gaps >= -1e-9).
    pub contains: bool,
    /// max over directions of support_a - support_b.
    pub max_gap: f64,
    /// The mu in [0, 1] achieving the maximal gap.
    pub direction: f64,
    /// min over directions of support_a - support_b.
    pub min_gap: f64,
}

/// Which feedback-region evaluation to use: the symmetric per-sender form,
/// or the asymmetric construction-order form (and its role swap).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QclVariant {
    Statement,
    Outline,
    OutlineSwapped,
}

fn quantum_plus_z(joint: &CqJointState) -> Result<Vec<String>, RegionError> {
    let q = joint
        .quantum_space()
        .ok_or_else(|| RegionError::MissingLabel { name: "bbar".to_string() })?;
    let mut labels: Vec<String> = q.names().into_iter().map(str::to_string).collect();
    labels.push("z1".to_string());
    labels.push("z2".to_string());
    Ok(labels)
}

fn require_labels(joint: &CqJointState, names: &[&str]) -> Result<(), RegionError> {
    for n in names {
        if !joint.classical_labels().iter().any(|(l, _)| l == n) {
            return Err(RegionError::MissingLabel { name: (*n).to_string() });
        }
    }
    Ok(())
}

fn mi(
    joint: &CqJointState,
    a: &[&str],
    b: &[&str],
    cond: &[&str],
) -> Result<f64, RegionError> {
    Ok(mutual_information(joint, a, b, cond)?)
}

/// Feedback-only rate bounds evaluated on the joint state.
pub fn qcl_bounds(joint: &CqJointState) -> Result<RateBounds, RegionError> {
    qcl_bounds_variant(joint, QclVariant::Statement)
}

pub fn qcl_bounds_variant(
    joint: &CqJointState,
    variant: QclVariant,
) -> Result<RateBounds, RegionError> {
    require_labels(joint, &["u", "x1", "x2", "z1", "z2"])?;
    let bz = quantum_plus_z(joint)?;
    let bz_refs: Vec<&str> = bz.iter().map(String::as_str).collect();
    let bsum = mi(joint, &["x1", "x2"], &bz_refs, &[])?;
    let (b1, b2) = match variant {
        QclVariant::Statement => (
            mi(joint, &["x1"], &["z2"], &["u", "x2"])?,
            mi(joint, &["x2"], &["z1"], &["u", "x1"])?,
        ),
        QclVariant::Outline => (
            mi(joint, &["x1"], &bz_refs, &["u", "x2"])?,
            mi(joint, &["x2"], &["z1"], &["u", "x1"])?,
        ),
        QclVariant::OutlineSwapped => (
            mi(joint, &["x1"], &["z2"], &["u", "x2"])?,
            mi(joint, &["x2"], &bz_refs, &["u", "x1"])?,
        ),
    };
    Ok(RateBounds { b1, b2, bsum_layered: None, bsum })
}

/// Layered (superposition-coded) rate bounds evaluated on the joint state.
pub fn general_bounds(joint: &CqJointState) -> Result<RateBounds, RegionError> {
    require_labels(joint, &["u", "v1", "v2", "x1", "x2", "z1", "z2"])?;
    let bz = quantum_plus_z(joint)?;
    let bz_refs: Vec<&str> = bz.iter().map(String::as_str).collect();
    let b1 = mi(joint, &["x1"], &bz_refs, &["u", "v1", "x2"])?
        + mi(joint, &["v1"], &["z2"], &["u", "x2"])?;
    let b2 = mi(joint, &["x2"], &bz_refs, &["u", "v2", "x1"])?
        + mi(joint, &["v2"], &["z1"], &["u", "x1"])?;
    let bsum_layered = mi(joint, &["v1"], &["z2"], &["u", "x2"])?
        + mi(joint, &["v2"], &["z1"], &["u", "x1"])?
        + mi(joint, &["x1", "x2"], &bz_refs, &["u", "v1", "v2"])?;
    let bsum = mi(joint, &["x1", "x2"], &bz_refs, &[])?;
    Ok(RateBounds { b1, b2, bsum_layered: Some(bsum_layered), bsum })
}

/// Closed-form rate bounds of the adder family.
pub fn adder_closed_form(p: &AdderParams) -> RateBounds {
    let b1 = 0.5 * (binary_entropy(p.alpha0) + binary_entropy(p.alpha1));
    let b2 = 0.5 * (binary_entropy(p.beta0) + binary_entropy(p.beta1));
    let gamma = p.gamma();
    let bsum = if gamma < 1e-12 {
        0.0
    } else {
        let inner = (p.alpha0 * p.beta0 + p.alpha1 * p.beta1) / (2.0 * gamma);
        binary_entropy(gamma) + gamma * binary_entropy(inner)
    };
    RateBounds { b1, b2, bsum_layered: None, bsum }
}

/// The pentagon R1 <= 1, R2 <= 1, R1 + R2 <= 3/2.
pub fn no_feedback_adder_region() -> RegionBoundary {
    bounds_to_pentagon(&RateBounds { b1: 1.0, b2: 1.0, bsum_layered: None, bsum: 1.5 })
}

/// Boundary of {0 <= R1 <= b1, 0 <= R2 <= b2, R1 + R2 <= effective sum}.
pub fn bounds_to_pentagon(b: &RateBounds) -> RegionBoundary {
    let b1 = b.b1.max(0.0);
    let b2 = b.b2.max(0.0);
    let s = b.effective_sum().max(0.0).min(b1 + b2);
    let mut vertices: Vec<(f64, f64)> = Vec::new();
    let r2_at_zero = b2.min(s);
    vertices.push((0.0, r2_at_zero));
    if s < b1 + b2 - 1e-15 {
        if s - b2 > 1e-15 {
            vertices.push((s - b2, b2));
        }
        if s - b1 > 1e-15 {
            vertices.push((b1, s - b1));
        }
        if b1.min(s) > 1e-15 {
            vertices.push((b1.min(s), 0.0));
        }
    } else {
        if b1 > 1e-15 && b2 > 1e-15 {
            vertices.push((b1, b2));
        }
        if b1 > 1e-15 {
            vertices.push((b1, 0.0));
        }
    }
    vertices.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    RegionBoundary { vertices }
}

/// Parameter sampling plan: per-dimension value lists, expanded as a
/// cartesian product.
#[derive(Clone, Debug)]
pub struct GridPlan {
    pub axes: Vec<Vec<f64>>,
}

impl GridPlan {
    /// `points` evenly spaced values on [lo, hi] for each of `dims` axes.
    pub fn uniform(dims: usize, lo: f64, hi: f64, points: usize) -> Self {
        let axis: Vec<f64> = (0..points)
            .map(|i| {
                if points == 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (points - 1) as f64
                }
            })
            .collect();
        GridPlan { axes: vec![axis; dims] }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tuple(&self, mut index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for d in (0..self.axes.len()).rev() {
            let n = self.axes[d].len();
            out[d] = self.axes[d][index % n];
            index /= n;
        }
        out
    }

    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let lo = self
            .axes
            .iter()
            .map(|a| a.iter().cloned().fold(f64::INFINITY, f64::min))
            .collect();
        let hi = self
            .axes
            .iter()
            .map(|a| a.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        (lo, hi)
    }
}

/// Number of support directions used for refinement and comparison fans.
pub const REFINE_DIRECTIONS: usize = 64;
pub const COMPARE_DIRECTIONS: usize = 256;

/// Convex hull (upper-right boundary) of the union of the pentagons of
/// `family` over the sampled parameter tuples, with optional simplex
/// refinement along a fan of weighted-sum directions.
pub fn trace_boundary<F>(
    family: F,
    grid: &GridPlan,
    refine: bool,
) -> Result<RegionBoundary, RegionError>
where
    F: Fn(&[f64]) -> Result<RateBounds, RegionError> + Sync,
{
    if grid.is_empty() {
        return Err(RegionError::EmptyGrid);
    }
    let evaluated: Vec<Result<(Vec<f64>, RateBounds), RegionError>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let params = grid.tuple(i);
            let b = family(&params)?;
            Ok((params, b))
        })
        .collect();
    let mut cloud: Vec<(f64, f64)> = Vec::new();
    let mut samples: Vec<(Vec<f64>, RateBounds)> = Vec::with_capacity(grid.len());
    for r in evaluated {
        let (params, b) = r?;
        cloud.extend(bounds_to_pentagon(&b).vertices.iter().copied());
        samples.push((params, b));
    }

    if refine {
        let (lo, hi) = grid.bounds();
        let support_of = |b: &RateBounds, mu: f64| bounds_to_pentagon(b).support(mu);
        let refined: Vec<Vec<(f64, f64)>> = (0..REFINE_DIRECTIONS)
            .into_par_iter()
            .map(|k| {
                let mu = k as f64 / (REFINE_DIRECTIONS - 1) as f64;
                let start = samples
                    .iter()
                    .max_by(|a, b| {
                        support_of(&a.1, mu)
                            .partial_cmp(&support_of(&b.1, mu))
                            .unwrap()
                    })
                    .map(|s| s.0.clone())
                    .unwrap();
                let objective = |p: &[f64]| match family(p) {
                    Ok(b) => support_of(&b, mu),
                    Err(_) => f64::NEG_INFINITY,
                };
                let (best, _) = optim::maximize(objective, &start, &lo, &hi);
                match family(&best) {
                    Ok(b) => bounds_to_pentagon(&b).vertices,
                    Err(_) => Vec::new(),
                }
            })
            .collect();
        for vs in refined {
            cloud.extend(vs);
        }
    }

    Ok(RegionBoundary { vertices: hull::upper_right_boundary(&cloud) })
}

/// Compare region `a` against region `b` along a fan of directions.
pub fn compare_regions(a: &RegionBoundary, b: &RegionBoundary) -> ContainmentReport {
    let gap_at = |mu: f64| a.support(mu) - b.support(mu);
    let mut max_gap = f64::NEG_INFINITY;
    let mut min_gap = f64::INFINITY;
    let mut best_k = 0;
    for k in 0..COMPARE_DIRECTIONS {
        let mu = k as f64 / (COMPARE_DIRECTIONS - 1) as f64;
        let gap = gap_at(mu);
        if gap > max_gap {
            max_gap = gap;
            best_k = k;
        }
        min_gap = min_gap.min(gap);
    }
    // golden-section polish between the neighbors of the best probe
    let step = 1.0 / (COMPARE_DIRECTIONS - 1) as f64;
    let mut lo = (best_k as f64 * step - step).max(0.0);
    let mut hi = (best_k as f64 * step + step).min(1.0);
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    for _ in 0..80 {
        let m1 = lo + phi * (hi - lo);
        let m2 = hi - phi * (hi - lo);
        if gap_at(m1) >= gap_at(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let direction = 0.5 * (lo + hi);
    max_gap = max_gap.max(gap_at(direction));
    ContainmentReport { contains: min_gap >= -1e-9, max_gap, direction, min_gap }
}
