//! Monte Carlo re-checks of the statistical guarantees.
//!
//! Each suite measures an advertised bound directly instead of trusting the
//! implementation: acceptance rates of the scale verifier, soundness of the
//! simulated query flavors, the bucket pigeonhole behind the verifier's
//! analysis, unbiasedness of the coloring step, and the end-to-end accuracy
//! target. Suites are deterministic for a fixed seed.

use clap::ValueEnum;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cidcount::coarse::{ceil_log2, verify_scale};
use cidcount::hypergraph::{factorial, generate_random, Hypergraph, PartedTuple, VertexSet};
use cidcount::oracle::{OracleHandle, QueryLedger, SimulationConfig};
use cidcount::pipeline::{estimate, FallbackPolicy, PipelineConfig};
use cidcount::sparsify::{sparsify, WeightedTuple};
use cidcount::Result;

use crate::report::{rate_ci, CheckRow};

/// Which statistical suite to run.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClaimClass {
    /// Every suite below except the known-failing accuracy bound.
    All,
    /// Oversized scale guesses are accepted at most 1/80 of the time.
    RejectionRate,
    /// Guesses a (4 d log n)-th of the true scale are accepted at least a
    /// quarter of the time.
    AcceptanceRate,
    /// Simulated relaxed queries never invent a witness, and one splitting
    /// round finds a lone pair with probability exactly one half.
    SimulationSoundness,
    /// Some vertex bucket always carries a large share of the count, at the
    /// first position and along every continuation chain.
    BucketChain,
    /// Color-restricted survivors estimate the ordered count without bias.
    SparsifyUnbiased,
    /// End-to-end estimates land within the requested error at least 90% of
    /// the time. Known to fail at bench scale; see the README.
    PipelineAccuracy,
}

impl ClaimClass {
    pub fn name(self) -> &'static str {
        match self {
            ClaimClass::All => "all",
            ClaimClass::RejectionRate => "rejection-rate",
            ClaimClass::AcceptanceRate => "acceptance-rate",
            ClaimClass::SimulationSoundness => "simulation-soundness",
            ClaimClass::BucketChain => "bucket-chain",
            ClaimClass::SparsifyUnbiased => "sparsify-unbiased",
            ClaimClass::PipelineAccuracy => "pipeline-accuracy",
        }
    }
}

pub struct ClaimsOutcome {
    pub rows: Vec<CheckRow>,
    pub ledger: QueryLedger,
}

/// Run one suite, or all of the robust ones, with per-suite trial counts
/// taken from `trials` when given.
pub fn run_class(class: ClaimClass, seed: u64, trials: Option<u32>) -> Result<ClaimsOutcome> {
    use ClaimClass::*;
    let selected: Vec<ClaimClass> = match class {
        All => vec![
            RejectionRate,
            AcceptanceRate,
            SimulationSoundness,
            BucketChain,
            SparsifyUnbiased,
        ],
        single => vec![single],
    };

    let mut rows = Vec::new();
    let mut ledger = QueryLedger::default();
    for suite in selected {
        let (mut suite_rows, suite_ledger) = match suite {
            All => unreachable!("expanded above"),
            RejectionRate => rejection_rate(seed, trials.unwrap_or(1000))?,
            AcceptanceRate => acceptance_rate(seed, trials.unwrap_or(1000))?,
            SimulationSoundness => simulation_soundness(seed, trials.unwrap_or(1000))?,
            BucketChain => bucket_chain(seed, trials.unwrap_or(40))?,
            SparsifyUnbiased => sparsify_unbiased(seed, trials.unwrap_or(4000))?,
            PipelineAccuracy => pipeline_accuracy(seed, trials.unwrap_or(10))?,
        };
        for row in &suite_rows {
            log::info!(
                "{}: measured {:.4} vs bound {:.4} ({})",
                row.check,
                row.measured,
                row.bound,
                if row.pass { "pass" } else { "FAIL" }
            );
        }
        rows.append(&mut suite_rows);
        ledger.merge(&suite_ledger);
    }
    Ok(ClaimsOutcome { rows, ledger })
}

fn complete_pairs(n: u32) -> Hypergraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push(vec![u, v]);
        }
    }
    Hypergraph::new(2, n, edges).expect("complete pair instance is valid")
}

/// Random disjoint query sets: every vertex joins at most one set.
fn random_disjoint_sets(rng: &mut ChaCha8Rng, n: u32, d: usize) -> Vec<VertexSet> {
    let mut sets = vec![VertexSet::empty(n); d];
    for v in 0..n {
        let owner = rng.gen_range(0..=d);
        if owner < d {
            sets[owner].insert(v);
        }
    }
    sets
}

/// Random repeated-set query: a composition of d over disjoint sets.
fn random_parted(rng: &mut ChaCha8Rng, n: u32, d: usize) -> PartedTuple {
    let mut mults = Vec::new();
    let mut left = d as u32;
    while left > 0 {
        let take = rng.gen_range(1..=left);
        mults.push(take);
        left -= take;
    }
    let sets = random_disjoint_sets(rng, n, mults.len());
    PartedTuple::new(sets.into_iter().zip(mults).collect()).expect("disjoint parts")
}

/// Random slot sets with no disjointness constraint.
fn random_slots(rng: &mut ChaCha8Rng, n: u32, d: usize) -> Vec<VertexSet> {
    (0..d)
        .map(|_| {
            let mut set = VertexSet::empty(n);
            for v in 0..n {
                if rng.gen_bool(0.2) {
                    set.insert(v);
                }
            }
            set
        })
        .collect()
}

fn rejection_rate(seed: u64, trials: u32) -> Result<(Vec<CheckRow>, QueryLedger)> {
    let h = generate_random(64, 2, 50, seed ^ 0x5245_4A45)?;
    let m_o = h.m_ordered() as u128;
    let log_n = ceil_log2(64) as u128;
    // guess at least 20 * d^(2d-3) * 4^d * m_o * log^(2d-3) n, d = 2
    let r_hat = 20 * 2 * 16 * m_o * log_n;
    let slots = vec![VertexSet::full(64); 2];
    let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), seed);
    let mut accepts = 0u32;
    for _ in 0..trials {
        if verify_scale(&mut oracle, &slots, r_hat)?.accepted {
            accepts += 1;
        }
    }
    let rate = accepts as f64 / trials as f64;
    let p = 1.0 / 80.0;
    let bound = p + 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
    let row = CheckRow {
        check: "oversized guesses are rarely accepted".into(),
        samples: trials as u64,
        measured: rate,
        bound,
        comparison: "<=".into(),
        ci_half_width: rate_ci(rate, trials as u64),
        pass: rate <= bound,
    };
    Ok((vec![row], *oracle.ledger()))
}

fn acceptance_rate(seed: u64, trials: u32) -> Result<(Vec<CheckRow>, QueryLedger)> {
    let h = complete_pairs(64);
    let log_n = ceil_log2(64) as u64;
    // guess at most m_o / (4 d log n)
    let r_hat = (h.m_ordered() / (4 * 2 * log_n)) as u128;
    let slots = vec![VertexSet::full(64); 2];
    let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), seed);
    let mut accepts = 0u32;
    for _ in 0..trials {
        if verify_scale(&mut oracle, &slots, r_hat)?.accepted {
            accepts += 1;
        }
    }
    let rate = accepts as f64 / trials as f64;
    let p = 0.25;
    let bound = p - 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
    let row = CheckRow {
        check: "undersized guesses are accepted often".into(),
        samples: trials as u64,
        measured: rate,
        bound,
        comparison: ">=".into(),
        ci_half_width: rate_ci(rate, trials as u64),
        pass: rate >= bound,
    };
    Ok((vec![row], *oracle.ledger()))
}

fn simulation_soundness(seed: u64, negatives: u32) -> Result<(Vec<CheckRow>, QueryLedger)> {
    let n = 16u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x534F_554E);
    let mut ledger = QueryLedger::default();
    let mut rows = Vec::new();

    // repeated-set simulation: no false positives on ground-truth negatives
    let mut parted_fp = 0u32;
    let mut seen = 0u32;
    while seen < negatives {
        let d = if seen.is_multiple_of(2) { 2 } else { 3 };
        let h = generate_random(n, d, rng.gen_range(0..=6), rng.gen())?;
        let tuple = random_parted(&mut rng, n, d);
        if tuple.arity() as usize != d || h.exists_parted(&tuple)? {
            continue;
        }
        let mut oracle = OracleHandle::new(&h, SimulationConfig::simulated(d, n), rng.gen());
        if oracle.cid1(&tuple)? {
            parted_fp += 1;
        }
        ledger.merge(oracle.ledger());
        seen += 1;
    }
    let rate = parted_fp as f64 / negatives as f64;
    rows.push(CheckRow {
        check: "repeated-set simulation invents no witnesses".into(),
        samples: negatives as u64,
        measured: rate,
        bound: 0.0,
        comparison: "<=".into(),
        ci_half_width: rate_ci(rate, negatives as u64),
        pass: parted_fp == 0,
    });

    // overlapping-set simulation, same soundness requirement
    let mut overlap_fp = 0u32;
    let mut seen = 0u32;
    while seen < negatives {
        let d = if seen % 5 == 4 { 3 } else { 2 };
        let h = generate_random(n, d, rng.gen_range(0..=6), rng.gen())?;
        let slots = random_slots(&mut rng, n, d);
        if h.exists_ordered(&slots)? {
            continue;
        }
        let mut oracle = OracleHandle::new(&h, SimulationConfig::simulated(d, n), rng.gen());
        if oracle.cid2(&slots)? {
            overlap_fp += 1;
        }
        ledger.merge(oracle.ledger());
        seen += 1;
    }
    let rate = overlap_fp as f64 / negatives as f64;
    rows.push(CheckRow {
        check: "overlapping-set simulation invents no witnesses".into(),
        samples: negatives as u64,
        measured: rate,
        bound: 0.0,
        comparison: "<=".into(),
        ci_half_width: rate_ci(rate, negatives as u64),
        pass: overlap_fp == 0,
    });

    // single round, single witness pair: success probability is exactly 1/2
    let h = Hypergraph::new(2, n, vec![vec![3, 4]]).expect("single-pair instance is valid");
    let mut config = SimulationConfig::simulated(2, n);
    config.cid1_repetitions = 1;
    let mut oracle = OracleHandle::new(&h, config, seed);
    let witness = PartedTuple::new(vec![(VertexSet::full(n), 2)]).expect("one full part");
    let calib_trials = negatives as u64 * 20;
    let mut hits = 0u64;
    for _ in 0..calib_trials {
        if oracle.cid1(&witness)? {
            hits += 1;
        }
    }
    ledger.merge(oracle.ledger());
    let rate = hits as f64 / calib_trials as f64;
    let sigma = (0.25 / calib_trials as f64).sqrt();
    rows.push(CheckRow {
        check: "one splitting round hits a lone pair half the time".into(),
        samples: calib_trials,
        measured: rate,
        bound: 0.5,
        comparison: "~".into(),
        ci_half_width: rate_ci(rate, calib_trials),
        pass: (rate - 0.5).abs() <= 3.0 * sigma,
    });

    Ok((rows, ledger))
}

fn bucket_chain(seed: u64, instances: u32) -> Result<(Vec<CheckRow>, QueryLedger)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4255_434B);
    let d = 3usize;
    let n = 32u32;
    let levels = d as u32 * ceil_log2(n);
    let denom = levels as u64 + 1;
    let mut counterexamples = 0u32;
    for _ in 0..instances {
        let m = rng.gen_range(1..=150);
        let h = generate_random(n, d, m, rng.gen())?;
        let m_o = h.m_ordered();

        // some first-position bucket holds a large share of the count
        let profile = h.bucket_profile(&[])?;
        let first_ok = (0..=levels).any(|q| profile.size(1, q) * (1u64 << (q + 1)) * denom > m_o);

        // every populated vertex has a deeper bucket holding a large share
        // of that vertex's continuations
        let mut chain_ok = true;
        for v in 0..n {
            let continuations = factorial(d as u64 - 1) * h.degree(v);
            if continuations == 0 {
                continue;
            }
            let q1 = continuations.ilog2();
            let deeper = h.bucket_profile(&[(q1, v)])?;
            chain_ok &=
                (0..=levels).any(|q2| deeper.size(2, q2) * (1u64 << (q2 + 1)) * denom > 1u64 << q1);
        }

        if !(first_ok && chain_ok) {
            counterexamples += 1;
        }
    }
    let rate = counterexamples as f64 / instances as f64;
    let row = CheckRow {
        check: "a heavy vertex bucket exists at every chain position".into(),
        samples: instances as u64,
        measured: rate,
        bound: 0.0,
        comparison: "<=".into(),
        ci_half_width: rate_ci(rate, instances as u64),
        pass: counterexamples == 0,
    };
    Ok((vec![row], QueryLedger::default()))
}

fn sparsify_unbiased(seed: u64, rounds: u32) -> Result<(Vec<CheckRow>, QueryLedger)> {
    let h = generate_random(32, 2, 200, seed ^ 0x5350_4152)?;
    let m_o = h.m_ordered() as f64;
    let parent = WeightedTuple {
        tuple: PartedTuple::uniform(32, 2),
        weight: 1.0,
    };
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for t in 0..rounds as u64 {
        let mut coloring = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t));
        let mut hash = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t) ^ 0x8000_0000_0000_0000);
        let mut survived = 0.0;
        for child in sparsify(&parent, &mut coloring, &mut hash) {
            survived += child.weight * h.count_ordered_tuple(&child.tuple)? as f64;
        }
        sum += survived;
        sum_sq += survived * survived;
    }
    let mean = sum / rounds as f64;
    let variance = (sum_sq / rounds as f64 - mean * mean).max(0.0);
    let se = (variance / rounds as f64).sqrt();
    let row = CheckRow {
        check: "scaled coloring survivors average to the true count".into(),
        samples: rounds as u64,
        measured: mean,
        bound: m_o,
        comparison: "~".into(),
        ci_half_width: 1.96 * se,
        pass: (mean - m_o).abs() <= 3.0 * se,
    };
    Ok((vec![row], QueryLedger::default()))
}

fn pipeline_accuracy(seed: u64, runs: u32) -> Result<(Vec<CheckRow>, QueryLedger)> {
    let m = 3000u64;
    let epsilon = 0.3;
    let h = generate_random(128, 2, m, seed ^ 0x4143_4355)?;
    let mut config = PipelineConfig::desk(2, 128, epsilon)?;
    config.fallback = FallbackPolicy::PipelineOnly;
    let mut ledger = QueryLedger::default();
    let mut hits = 0u32;
    for t in 0..runs {
        let mut oracle =
            OracleHandle::new(&h, SimulationConfig::exact(), seed.wrapping_add(t as u64));
        // a run that exhausts its iteration cap counts as a miss
        if let Ok(report) = estimate(&mut oracle, &config) {
            if (report.m_hat - m as f64).abs() <= epsilon * m as f64 {
                hits += 1;
            }
        }
        ledger.merge(oracle.ledger());
    }
    let rate = hits as f64 / runs as f64;
    let row = CheckRow {
        check: "pipeline estimates stay within the requested error".into(),
        samples: runs as u64,
        measured: rate,
        bound: 0.9,
        comparison: ">=".into(),
        ci_half_width: rate_ci(rate, runs as u64),
        pass: rate >= 0.9,
    };
    Ok((vec![row], ledger))
}
