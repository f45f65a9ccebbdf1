//! Population control for weighted tuple collections.
//!
//! [`sparsify`] shrinks the vertex content of one tuple: it colors the
//! tuple's support with a few colors, draws a random subset of color
//! patterns through a Bernoulli hash table, and emits one child tuple per
//! selected pattern, restricting each slot to one color class. A pattern
//! survives with probability `1/k`, and every ordered edge of the parent
//! lies in exactly one pattern, so scaling child weights by `k` preserves
//! the weighted ordered count in expectation while cutting expected
//! population growth to `k^{d-1}` children and slot sizes to about `1/k` of
//! the parent's.
//!
//! [`importance_sample`] caps a population's size: tuples are bucketed by
//! the dyadic magnitude of `weight * estimate`, and each oversized bucket is
//! replaced by a uniform subsample with weights scaled up by the survival
//! ratio, which again preserves weighted sums in expectation. Tuples inside
//! a bucket carry comparable mass, so subsamples sized by the formula in
//! [`importance_sample`] add only a `lambda` fraction of error; a hard
//! [`ImportanceParams::target_total`] trades that guarantee for a strict
//! population bound.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypergraph::{PartedTuple, VertexSet};

/// Colors used by [`sparsify`].
pub const SPARSIFY_COLORS: usize = 4;

/// A tuple with the sampling weight it carries through the pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTuple {
    pub tuple: PartedTuple,
    pub weight: f64,
}

/// A coarse estimate attached to a tuple for importance sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoarseTag {
    /// Estimated ordered count inside the tuple, floored at 1.
    pub estimate: f64,
    /// Claimed multiplicative slack: the true count lies within a factor
    /// `alpha` of `estimate`.
    pub alpha: f64,
}

/// Bernoulli(1/k) table over the `k^d` color patterns.
pub fn build_hash(d: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let size = SPARSIFY_COLORS.pow(d as u32);
    (0..size)
        .map(|_| rng.gen_bool(1.0 / SPARSIFY_COLORS as f64))
        .collect()
}

/// Splits one weighted tuple into color-restricted children.
///
/// Each child's weight is the parent's times [`SPARSIFY_COLORS`]; summing
/// `weight * ordered-count` over the children is an unbiased estimate of the
/// parent's value. Children may carry empty slots; they cost nothing
/// downstream and keeping them keeps the estimate's bookkeeping trivial.
pub fn sparsify(
    parent: &WeightedTuple,
    coloring_rng: &mut ChaCha8Rng,
    hash_rng: &mut ChaCha8Rng,
) -> Vec<WeightedTuple> {
    let k = SPARSIFY_COLORS;
    let parts = parent.tuple.parts();
    let d = parent.tuple.arity() as usize;
    let n = parts[0].0.universe();

    // color every support vertex, part by part in ascending order
    let mut classes: Vec<Vec<VertexSet>> =
        parts.iter().map(|_| vec![VertexSet::empty(n); k]).collect();
    for (pi, (set, _)) in parts.iter().enumerate() {
        for v in set.iter() {
            classes[pi][coloring_rng.gen_range(0..k)].insert(v);
        }
    }

    // slot -> owning part, parts expanded in declaration order
    let mut slot_part = Vec::with_capacity(d);
    for (pi, (_, a)) in parts.iter().enumerate() {
        for _ in 0..*a {
            slot_part.push(pi);
        }
    }

    let hash = build_hash(d, hash_rng);
    let mut children = Vec::new();
    for (code, selected) in hash.iter().enumerate() {
        if !selected {
            continue;
        }
        // decode the color pattern and merge slots sharing (part, color)
        let mut mult: std::collections::BTreeMap<(usize, usize), u32> =
            std::collections::BTreeMap::new();
        let mut rest = code;
        for &pi in &slot_part {
            let color = rest % k;
            rest /= k;
            *mult.entry((pi, color)).or_insert(0) += 1;
        }
        let tuple_parts: Vec<(VertexSet, u32)> = mult
            .into_iter()
            .map(|((pi, color), a)| (classes[pi][color].clone(), a))
            .collect();
        let tuple =
            PartedTuple::new(tuple_parts).expect("distinct (part, color) classes are disjoint");
        children.push(WeightedTuple {
            tuple,
            weight: parent.weight * k as f64,
        });
    }
    children
}

/// Sizing for [`importance_sample`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImportanceParams {
    /// Relative error added to weighted sums by one application.
    pub lambda: f64,
    /// Failure probability budget.
    pub delta: f64,
    /// Hard ceiling on the surviving population. The formula-sized
    /// subsample scales with `alpha^2 / lambda^2` and is meant for
    /// populations that dwarf it; a target forces the cut on small
    /// populations at the price of the error guarantee.
    pub target_total: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImportanceOutcome {
    pub kept: Vec<WeightedTuple>,
    /// Subsample size oversized buckets were cut to.
    pub s_star: usize,
    /// Number of nonempty dyadic key buckets.
    pub buckets: usize,
    /// Weight rescale factors applied, one per cut made.
    pub scales: Vec<f64>,
}

/// Subsamples a weighted population, preserving weighted sums in
/// expectation.
///
/// Each tuple carries a [`CoarseTag`]; weights and estimates must be at
/// least 1. Tuples are bucketed by `floor(log2(weight * estimate))`. Within
/// a bucket of size `count > s*`, a uniform `s*`-subset survives with
/// weights multiplied by `count / s*`; smaller buckets pass through, and
/// survivor order follows input order. The subsample size is
/// `ceil(2 * lambda^-2 * alpha^2 * ln(buckets / delta))`, which keeps the
/// weighted-sum deviation within a `lambda` fraction with probability
/// `1 - delta`; a [`ImportanceParams::target_total`] lowers it to
/// `target / buckets` and trims any remaining excess uniformly across
/// buckets.
pub fn importance_sample(
    tagged: Vec<(WeightedTuple, CoarseTag)>,
    params: &ImportanceParams,
    rng: &mut ChaCha8Rng,
) -> Result<ImportanceOutcome> {
    // NaN fails every comparison and is rejected with the rest
    let in_range = params.lambda > 0.0 && params.delta > 0.0 && params.delta < 1.0;
    if !in_range {
        return Err(Error::Parameter {
            name: "params",
            reason: "need lambda > 0 and delta in (0, 1)".into(),
        });
    }
    let mut alpha: f64 = 1.0;
    let mut keys = Vec::with_capacity(tagged.len());
    for (i, (wt, tag)) in tagged.iter().enumerate() {
        if wt.weight < 1.0 || tag.estimate < 1.0 || tag.alpha < 1.0 {
            return Err(Error::Parameter {
                name: "tagged",
                reason: format!(
                    "tuple {}: weight {}, estimate {} and alpha {} must all be at least 1",
                    i, wt.weight, tag.estimate, tag.alpha
                ),
            });
        }
        alpha = alpha.max(tag.alpha);
        keys.push(wt.weight * tag.estimate);
    }

    // dyadic classes a mass bound of M can span
    let mass_bound: f64 = alpha * keys.iter().sum::<f64>();
    let spannable = mass_bound.max(1.0).log2() as usize + 1;
    let formula = 2.0 / (params.lambda * params.lambda)
        * alpha
        * alpha
        * ((spannable as f64) / params.delta).ln().max(1.0);

    let mut by_bucket: std::collections::BTreeMap<i32, Vec<usize>> =
        std::collections::BTreeMap::new();
    for (i, &key) in keys.iter().enumerate() {
        by_bucket
            .entry(key.log2().floor() as i32)
            .or_default()
            .push(i);
    }
    let buckets = by_bucket.len();

    let mut s_star = if formula >= usize::MAX as f64 {
        usize::MAX
    } else {
        formula.ceil() as usize
    };
    if let Some(target) = params.target_total {
        s_star = s_star.min((target / buckets.max(1)).max(1));
    }

    let mut scales = Vec::new();
    let mut keep: Vec<(usize, f64)> = Vec::new();
    for members in by_bucket.values() {
        if members.len() <= s_star {
            keep.extend(members.iter().map(|&i| (i, 1.0)));
        } else {
            let scale = members.len() as f64 / s_star as f64;
            scales.push(scale);
            let mut chosen = members.clone();
            chosen.shuffle(rng);
            chosen.truncate(s_star);
            keep.extend(chosen.into_iter().map(|i| (i, scale)));
        }
    }

    // per-bucket floors can still overshoot a hard target; trim uniformly
    if let Some(target) = params.target_total {
        if keep.len() > target.max(1) {
            let scale = keep.len() as f64 / target.max(1) as f64;
            scales.push(scale);
            keep.shuffle(rng);
            keep.truncate(target.max(1));
            for entry in &mut keep {
                entry.1 *= scale;
            }
        }
    }
    keep.sort_by_key(|&(i, _)| i);

    let mut index = 0usize;
    let mut kept = Vec::with_capacity(keep.len());
    for (orig, (wt, _)) in tagged.into_iter().enumerate() {
        if index < keep.len() && keep[index].0 == orig {
            let scale = keep[index].1;
            kept.push(WeightedTuple {
                weight: wt.weight * scale,
                tuple: wt.tuple,
            });
            index += 1;
        }
    }
    Ok(ImportanceOutcome {
        kept,
        s_star,
        buckets,
        scales,
    })
}
