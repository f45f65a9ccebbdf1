//! Exact counting of small tuples by budgeted binary splitting.
//!
//! [`exact_count`] decides whether the ordered edge count inside a tuple is
//! at most a threshold, and if so reports it exactly. It grows a splitting
//! tree: each node carries one candidate set per slot, a repeated-set oracle
//! query labels the node dead or alive, and an alive node splits every
//! distinct set into an ordered low/high half, producing one child per way
//! of sending each slot to a half. Alive leaves, where every slot is pinned
//! to a distinct single vertex, are ordered edges; the splitting walk visits
//! each exactly once.
//!
//! A count of `c` keeps at most `c` nodes alive per depth and the depth is
//! logarithmic, so a node budget proportional to `threshold * log n` is
//! crossed only when the count exceeds the threshold. Crossing it is
//! therefore itself a certificate, reported as [`ExactVerdict::Exceeds`]
//! without further queries.

use crate::error::{Error, Result};
use crate::hypergraph::{PartedTuple, VertexSet};
use crate::oracle::OracleHandle;

use crate::coarse::ceil_log2;

/// Outcome of a splitting-tree count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactVerdict {
    /// The ordered count inside the tuple, certified `<=` the threshold.
    AtMost(u64),
    /// The ordered count exceeds the threshold.
    Exceeds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactResult {
    pub verdict: ExactVerdict,
    /// Tree nodes created, root included.
    pub nodes: u64,
}

/// Node allowance for a run at the given threshold; the tree of any tuple
/// whose count is within the threshold fits inside it with room to spare.
pub fn node_budget(d: usize, n: u32, tau: u64) -> u64 {
    (1u64 << (d + 2))
        .saturating_mul(tau)
        .saturating_mul(ceil_log2(n) as u64)
}

/// Counts ordered edges inside `tuple`, giving up once the count provably
/// exceeds `tau`.
///
/// With exact oracle routing the [`ExactVerdict::AtMost`] value equals
/// [`Hypergraph::count_ordered_tuple`](crate::Hypergraph::count_ordered_tuple);
/// with simulated routing it can only undercount, and with the default
/// repetition schedule even that is vanishingly unlikely. Node creation is
/// capped at [`node_budget`] and checked after each expansion, so the cap
/// overshoots by less than one expansion's `2^d` children.
pub fn exact_count(
    oracle: &mut OracleHandle,
    tuple: &PartedTuple,
    tau: u64,
) -> Result<ExactResult> {
    let d = oracle.d();
    if tuple.arity() as usize != d {
        return Err(Error::BadMultiplicity {
            expected: d as u32,
            got: tuple.arity(),
        });
    }
    let budget = node_budget(d, oracle.n(), tau);
    let root: Vec<VertexSet> = tuple.slots().into_iter().cloned().collect();
    let mut stack: Vec<Vec<VertexSet>> = vec![root];
    let mut created: u64 = 1;
    let mut count: u64 = 0;
    while let Some(slots) = stack.pop() {
        let merged = merge_slots(&slots);
        // a part thinner than its multiplicity cannot host distinct vertices
        if merged.parts().iter().any(|(set, a)| set.len() < *a) {
            continue;
        }
        if !oracle.cid1(&merged)? {
            continue;
        }
        if slots.iter().all(|s| s.len() == 1) {
            // alive leaf: each slot pinned to its own vertex, one ordered edge
            count += 1;
            continue;
        }
        for child in expand(&slots) {
            stack.push(child);
        }
        created += 1u64 << d;
        if created > budget {
            return Ok(ExactResult {
                verdict: ExactVerdict::Exceeds,
                nodes: created,
            });
        }
    }
    let verdict = if count <= tau {
        ExactVerdict::AtMost(count)
    } else {
        ExactVerdict::Exceeds
    };
    Ok(ExactResult {
        verdict,
        nodes: created,
    })
}

/// Groups equal slot sets into one part with a multiplicity. Slot sets stem
/// from one hierarchical halving, so distinct sets are disjoint.
fn merge_slots(slots: &[VertexSet]) -> PartedTuple {
    let mut parts: Vec<(VertexSet, u32)> = Vec::with_capacity(slots.len());
    for s in slots {
        match parts.iter_mut().find(|(p, _)| p == s) {
            Some((_, a)) => *a += 1,
            None => parts.push((s.clone(), 1)),
        }
    }
    PartedTuple::new(parts).expect("halving keeps distinct sets disjoint")
}

/// Splits every distinct set into its ordered halves and emits one child
/// per assignment of slots to halves. Children hitting an empty half are
/// culled cheaply at their own visit.
fn expand(slots: &[VertexSet]) -> Vec<Vec<VertexSet>> {
    let d = slots.len();
    let halves: Vec<(VertexSet, VertexSet)> = slots.iter().map(split_set).collect();
    let mut children = Vec::with_capacity(1 << d);
    for mask in 0..(1u32 << d) {
        let child: Vec<VertexSet> = (0..d)
            .map(|i| {
                if mask & (1 << i) == 0 {
                    halves[i].0.clone()
                } else {
                    halves[i].1.clone()
                }
            })
            .collect();
        children.push(child);
    }
    children
}

/// First-half/second-half split by ascending vertex order.
fn split_set(set: &VertexSet) -> (VertexSet, VertexSet) {
    let members = set.members();
    let mid = members.len().div_ceil(2);
    let n = set.universe();
    let mut lo = VertexSet::empty(n);
    let mut hi = VertexSet::empty(n);
    for (i, &v) in members.iter().enumerate() {
        if i < mid {
            lo.insert(v);
        } else {
            hi.insert(v);
        }
    }
    (lo, hi)
}
