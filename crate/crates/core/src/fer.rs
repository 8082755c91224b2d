//! Frame-error-rate estimators over a truncated error set.
//!
//! A decoder fails when the true error and the correction it applies differ
//! by something outside the stabilizer group. Partitioning an error set by
//! syndrome, and each syndrome bucket by stabilizer coset, yields three
//! estimators of decreasing cost and increasing value:
//!
//! * **MAP**: per bucket, credit the heaviest coset (the optimal decoder).
//! * **SE**: per bucket, credit the coset of the single most probable
//!   error.
//! * **SEO**: per bucket, credit only the single most probable error
//!   itself, ignoring its coset; this equals the frame error rate of the
//!   classical syndrome decoder of the associated binary code.
//!
//! All accumulation runs through exact fixed-point sums, with equal-probability
//! classes flushed as one `count * probability` product per coset, so every
//! estimate is a set function of the error set: independent of enumeration
//! order, and bit-identical under qubit relabelings of the stabilizer.
//!
//! Each estimator also reports a computable upper bound on its relative
//! error against the complete-set value, which the adaptive driver shrinks
//! by growing the set a decade of residual at a time.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use crate::channel::ChannelSpec;
use crate::errorset::ErrorSet;
use crate::numeric::ExactSum;
use crate::pauli::Stabilizer;
use crate::{Error, Result};

/// Which decoder an estimate models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum EstimatorKind {
    #[serde(rename = "map")]
    Map,
    #[serde(rename = "se")]
    Se,
    #[serde(rename = "seo")]
    Seo,
}

impl EstimatorKind {
    pub fn tag(&self) -> &'static str {
        match self {
            EstimatorKind::Map => "map",
            EstimatorKind::Se => "se",
            EstimatorKind::Seo => "seo",
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<EstimatorKind> {
        match s {
            "map" => Ok(EstimatorKind::Map),
            "se" => Ok(EstimatorKind::Se),
            "seo" => Ok(EstimatorKind::Seo),
            _ => Err(Error::InvalidArgument(format!(
                "unknown estimator kind {s:?}; expected map, se, or seo"
            ))),
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A frame-error-rate estimate over one error set.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FerEstimate {
    pub value: f64,
    pub kind: EstimatorKind,
    /// Left-out probability mass of the error set used.
    pub residual: f64,
    /// Upper bound on the relative error versus the complete-set value;
    /// `None` means the bound's denominator was not positive (estimate too
    /// small relative to the residual), i.e. unbounded.
    pub bound: Option<f64>,
    /// The unseen-syndrome term of the SEO bound; `None` for MAP and SE.
    pub alpha: Option<f64>,
    /// Distinct syndromes observed in the error set.
    #[serde(rename = "syndromes")]
    pub syndrome_count: usize,
    /// Size of the error set evaluated.
    pub errors_used: usize,
}

#[derive(Default)]
struct CosetSlot {
    key: u32,
    group_count: u64,
    mass: ExactSum,
}

#[derive(Default)]
struct Bucket {
    cosets: Vec<CosetSlot>,
    /// Probability of the first (hence most probable) error to land here.
    seo_prob: f64,
    /// Tie group that first touched this bucket; its cosets are the
    /// candidates for the single-most-probable-error decoder.
    se_group: u32,
    se_slots: Vec<u32>,
}

/// Evaluates all three estimators in one pass over the error set.
///
/// Probability mass is accumulated per (bucket, coset) as exact integer
/// counts within each tie group of bit-equal class probability, flushed as
/// one `count * probability` product at group boundaries into an exact
/// accumulator. Per-bucket maxima and the final totals therefore depend
/// only on the set of (probability, bucket, coset) triples, not on any
/// enumeration order.
pub fn fer_all(s: &Stabilizer, e: &ErrorSet) -> Result<(FerEstimate, FerEstimate, FerEstimate)> {
    if s.n() != e.n() {
        return Err(Error::InvalidArgument(format!(
            "stabilizer acts on {} qubits but error set is for {}",
            s.n(),
            e.n()
        )));
    }
    let m = s.num_generators();
    let mut buckets: Vec<Bucket> = Vec::new();
    buckets.resize_with(1usize << m, Bucket::default);
    // (bucket, slot) pairs with a nonzero count in the current tie group.
    let mut touched: Vec<(u32, u32)> = Vec::new();

    let mut group: u32 = 0;
    let mut group_prob = 0.0f64;
    for j in 0..e.included() {
        let prob = e.classes()[j].probability;
        if j == 0 {
            group_prob = prob;
        } else if prob.to_bits() != group_prob.to_bits() {
            flush_group(&mut buckets, &mut touched, group_prob);
            group += 1;
            group_prob = prob;
        }
        for &w in e.class_errors(j) {
            let syn = s.syndrome_packed(w) as usize;
            let cos = s.coset_canonical_packed(w);
            let b = &mut buckets[syn];
            if b.cosets.is_empty() {
                b.seo_prob = prob;
                b.se_group = group;
            }
            let slot = match b.cosets.iter().position(|c| c.key == cos) {
                Some(i) => i,
                None => {
                    b.cosets.push(CosetSlot { key: cos, ..CosetSlot::default() });
                    b.cosets.len() - 1
                }
            };
            if b.cosets[slot].group_count == 0 {
                touched.push((syn as u32, slot as u32));
            }
            b.cosets[slot].group_count += 1;
            if b.se_group == group && !b.se_slots.contains(&(slot as u32)) {
                b.se_slots.push(slot as u32);
            }
        }
    }
    if e.included() > 0 {
        flush_group(&mut buckets, &mut touched, group_prob);
    }

    let mut retained_map = ExactSum::new();
    let mut retained_se = ExactSum::new();
    let mut retained_seo = ExactSum::new();
    let mut syndrome_count = 0usize;
    for b in &buckets {
        if b.cosets.is_empty() {
            continue;
        }
        syndrome_count += 1;
        let best_coset = b.cosets.iter().map(|c| c.mass.value()).fold(0.0, f64::max);
        // Among the equally-most-probable candidate errors, credit the one
        // whose coset is heaviest; the value is then well defined and
        // invariant under relabelings that permute tied candidates.
        let best_se = b
            .se_slots
            .iter()
            .map(|&i| b.cosets[i as usize].mass.value())
            .fold(0.0, f64::max);
        retained_map.add(best_coset);
        retained_se.add(best_se);
        retained_seo.add(b.seo_prob);
    }

    let residual = e.residual();
    let errors_used = e.len();
    let make = |kind: EstimatorKind, retained: &ExactSum, alpha: Option<f64>| {
        let value = (1.0 - retained.value()).clamp(0.0, 1.0);
        let bound = match alpha {
            None => ratio_bound(value, residual),
            Some(a) => ratio_bound(value, residual.min(a)),
        };
        FerEstimate { value, kind, residual, bound, alpha, syndrome_count, errors_used }
    };
    let alpha = if e.included() == 0 {
        f64::INFINITY
    } else {
        ((1usize << m) - syndrome_count) as f64 * e.min_included_probability()
    };
    Ok((
        make(EstimatorKind::Map, &retained_map, None),
        make(EstimatorKind::Se, &retained_se, None),
        make(EstimatorKind::Seo, &retained_seo, Some(alpha)),
    ))
}

fn flush_group(buckets: &mut [Bucket], touched: &mut Vec<(u32, u32)>, prob: f64) {
    for &(syn, slot) in touched.iter() {
        let c = &mut buckets[syn as usize].cosets[slot as usize];
        c.mass.add(c.group_count as f64 * prob);
        c.group_count = 0;
    }
    touched.clear();
}

/// `gap / (value - gap)` when positive; `Some(0)` when the gap vanishes;
/// otherwise `None` (unbounded).
fn ratio_bound(value: f64, gap: f64) -> Option<f64> {
    if gap == 0.0 {
        Some(0.0)
    } else if value > gap {
        Some(gap / (value - gap))
    } else {
        None
    }
}

/// Maximum-a-posteriori (coset) decoder estimate.
pub fn fer_map(s: &Stabilizer, e: &ErrorSet) -> Result<FerEstimate> {
    Ok(fer_all(s, e)?.0)
}

/// Single-most-probable-error decoder estimate.
pub fn fer_se(s: &Stabilizer, e: &ErrorSet) -> Result<FerEstimate> {
    Ok(fer_all(s, e)?.1)
}

/// Single-error-only (classical syndrome decoder) estimate.
pub fn fer_seo(s: &Stabilizer, e: &ErrorSet) -> Result<FerEstimate> {
    Ok(fer_all(s, e)?.2)
}

type CacheKey = (u8, (u8, u64, u64));

/// Shared store of error sets, one ladder of decade snapshots per
/// (qubit count, channel). Snapshot `d` is the set built to residual
/// `10^-(d+1)`; because extension reproduces direct construction exactly,
/// snapshot contents are a pure function of the key, whatever order
/// concurrent callers arrive in.
pub struct ErrorSetCache {
    max_errors: usize,
    inner: Mutex<HashMap<CacheKey, Vec<Arc<ErrorSet>>>>,
}

impl ErrorSetCache {
    /// `max_errors` caps the materialized size of any single set.
    pub fn new(max_errors: usize) -> Self {
        ErrorSetCache { max_errors, inner: Mutex::new(HashMap::new()) }
    }

    /// Default cap: 2^24 packed errors (64 MiB per set).
    pub fn with_default_budget() -> Self {
        Self::new(1 << 24)
    }

    fn decade_target(decade: u32) -> f64 {
        10f64.powi(-(decade as i32 + 1))
    }

    /// The error set for `spec` on `n` qubits at residual decade `decade`
    /// (0 → 0.1, 1 → 0.01, ...). Builds or extends on a miss.
    pub fn get(&self, n: u8, spec: &ChannelSpec, decade: u32) -> Result<Arc<ErrorSet>> {
        let key = (n, spec.key());
        let mut inner = self.inner.lock().expect("error-set cache poisoned");
        let ladder = inner.entry(key).or_default();
        while ladder.len() <= decade as usize {
            let next_decade = ladder.len() as u32;
            let target = Self::decade_target(next_decade);
            let next = match ladder.last() {
                None => {
                    let set = ErrorSet::build(n, &spec.resolve()?, target)?;
                    if set.len() > self.max_errors {
                        return Err(budget_error(n, spec, set.len(), self.max_errors));
                    }
                    set
                }
                Some(prev) => {
                    let needed = prev.len() + prev.extension_len(target);
                    if needed > self.max_errors {
                        return Err(budget_error(n, spec, needed, self.max_errors));
                    }
                    let mut set = (**prev).clone();
                    set.extend(target)?;
                    set
                }
            };
            ladder.push(Arc::new(next));
        }
        Ok(ladder[decade as usize].clone())
    }
}

fn budget_error(n: u8, spec: &ChannelSpec, needed: usize, cap: usize) -> Error {
    Error::BudgetExceeded {
        message: format!("error set for n={n}, {spec} needs {needed} errors, cap is {cap}"),
        partial: None,
    }
}

/// Grows the error set a decade of residual at a time until the requested
/// estimator's relative-error bound is at most `target_bound` (a complete
/// set, whose bound is zero, always terminates). A budget failure carries
/// the best estimate computed before the failure.
pub fn fer_adaptive(
    s: &Stabilizer,
    spec: &ChannelSpec,
    kind: EstimatorKind,
    target_bound: f64,
    cache: &ErrorSetCache,
) -> Result<FerEstimate> {
    if !(target_bound > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "target bound must be positive, got {target_bound}"
        )));
    }
    let mut best: Option<FerEstimate> = None;
    let mut decade = 0u32;
    loop {
        let set = match cache.get(s.n(), spec, decade) {
            Ok(set) => set,
            Err(Error::BudgetExceeded { message, .. }) => {
                return Err(Error::BudgetExceeded {
                    message,
                    partial: best.map(Box::new),
                })
            }
            Err(other) => return Err(other),
        };
        let (map, se, seo) = fer_all(s, &set)?;
        let est = match kind {
            EstimatorKind::Map => map,
            EstimatorKind::Se => se,
            EstimatorKind::Seo => seo,
        };
        let done = matches!(est.bound, Some(b) if b <= target_bound) || set.complete();
        best = Some(est);
        if done {
            return Ok(best.expect("estimate just stored"));
        }
        decade += 1;
    }
}

/// Geometric mean of adaptive estimates across channels, with the largest
/// per-channel bound as the combined bound.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GeoMeanFer {
    pub value: f64,
    pub bound: f64,
    pub per_channel: Vec<FerEstimate>,
}

pub fn geometric_mean_fer(
    s: &Stabilizer,
    specs: &[ChannelSpec],
    kind: EstimatorKind,
    target_bound: f64,
    cache: &ErrorSetCache,
) -> Result<GeoMeanFer> {
    if specs.is_empty() {
        return Err(Error::InvalidArgument("geometric mean needs at least one channel".into()));
    }
    let mut per_channel = Vec::with_capacity(specs.len());
    for spec in specs {
        per_channel.push(fer_adaptive(s, spec, kind, target_bound, cache)?);
    }
    // Mean of logs: immune to underflow of the plain product and exact on
    // zero values (ln 0 = -inf, exp -inf = 0).
    let log_sum: f64 = per_channel.iter().map(|e| e.value.ln()).sum();
    let value = (log_sum / specs.len() as f64).exp();
    let bound = per_channel
        .iter()
        .map(|e| e.bound.expect("adaptive estimates terminate with a finite bound"))
        .fold(0.0, f64::max);
    Ok(GeoMeanFer { value, bound, per_channel })
}
