//! End-to-end edge-count estimation from decision queries alone.
//!
//! [`estimate`] maintains a weighted population of tuples that starts at the
//! full universe and shrinks until nothing is left:
//!
//! 1. **Drain.** Tuples whose ordered count fits under a threshold `tau` are
//!    counted exactly ([`crate::exact::exact_count`]) and their weighted
//!    counts move into a running total.
//! 2. **Sparsify.** While the population is small, every survivor is split
//!    into color-restricted children ([`crate::sparsify::sparsify`]), which
//!    shrinks slot sizes geometrically while preserving the weighted count
//!    in expectation.
//! 3. **Subsample.** When the population outgrows its cap, each tuple gets a
//!    coarse magnitude estimate ([`crate::coarse::rough_estimation_tuple`])
//!    and an importance subsample cuts the population back down
//!    ([`crate::sparsify::importance_sample`]).
//!
//! Slot sizes halve every two colorings on average, so the loop ends well
//! inside the iteration cap and the total is an unbiased estimate of the
//! ordered edge count. A [`FallbackPolicy`] routes tiny instances to plain
//! exhaustive queries instead, where that is cheaper than the machinery.

use serde::Serialize;

use crate::coarse::{
    ceil_log2, rough_estimation, rough_estimation_tuple, RoughConfig, RoughEstimate,
};
use crate::error::{Error, Result};
use crate::exact::{exact_count, node_budget, ExactVerdict};
use crate::hypergraph::{binomial, factorial, Hypergraph, PartedTuple, VertexSet};
use crate::oracle::{OracleHandle, QueryLedger, StreamTag};
use crate::sparsify::{
    importance_sample, sparsify, CoarseTag, ImportanceParams, WeightedTuple, SPARSIFY_COLORS,
};

/// Which constant schedule a [`PipelineConfig`] was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelinePreset {
    /// Constants sized for the formal error guarantees. The thresholds and
    /// population caps are astronomically large, so on bench-scale
    /// instances this schedule degenerates to exact counting at the root.
    Paper,
    /// Small constants that exercise every pipeline step on bench-scale
    /// instances at the price of wider noise.
    Desk,
    Custom,
}

/// When to replace the pipeline with exhaustive singleton queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackPolicy {
    /// Brute-force when the accuracy target is finer than the instance can
    /// support, or when enumerating every candidate edge is no more
    /// expensive than the pipeline's worst case.
    Auto,
    PipelineOnly,
    BruteForceOnly,
}

/// Parameters for one [`estimate`] run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    /// Target relative error.
    pub epsilon: f64,
    /// Ordered-count threshold below which tuples are counted exactly.
    pub tau: u64,
    /// Population cap: sparsify at or below it, subsample above it.
    pub population_cap: usize,
    /// Relative error budget per subsampling round.
    pub lambda: f64,
    /// Failure probability budget per subsampling round.
    pub delta: f64,
    /// Multiplicative slack claimed for the coarse per-tuple estimates.
    pub alpha: f64,
    /// Ladder schedule for the coarse estimates.
    pub rough: RoughConfig,
    /// Iteration cap; exceeding it is an error, not a wrong answer.
    pub hard_cap: u64,
    pub preset: PipelinePreset,
    pub fallback: FallbackPolicy,
    /// Record the population itself in each trace entry, enabling
    /// [`trace_diagnostics`].
    pub capture_tuples: bool,
}

fn shared_schedule(d: usize, n: u32, epsilon: f64) -> Result<(f64, f64, f64, u64)> {
    // NaN fails both comparisons and is rejected with the rest
    let in_range = epsilon > 0.0 && epsilon < 1.0;
    if !in_range {
        return Err(Error::Parameter {
            name: "epsilon",
            reason: format!("need a relative error in (0, 1), got {}", epsilon),
        });
    }
    let l0 = ceil_log2(n) as f64;
    let lambda = epsilon / (4.0 * d as f64 * l0);
    let delta = (n as f64).powi(-6 * d as i32);
    let hard_cap = (4.0 * d as f64 * l0) as u64 + 4;
    Ok((l0, lambda, delta, hard_cap))
}

fn saturate_u64(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.max(0.0) as u64
    }
}

impl PipelineConfig {
    /// The analysis-faithful schedule.
    ///
    /// The exact-count threshold grows like `d^{2d} log^{d+2} n / eps^2` and
    /// the population cap like `d^{4d} log^{4d} n / eps^2`; both come with
    /// matching error guarantees and are far beyond bench scale.
    pub fn paper(d: usize, n: u32, epsilon: f64) -> Result<Self> {
        let (l0, lambda, delta, hard_cap) = shared_schedule(d, n, epsilon)?;
        let df = d as f64;
        let k = SPARSIFY_COLORS as f64;
        let theta = 2.0 * df;
        let tau = k
            * k
            * 4f64.powi(2 * d as i32)
            * theta.powi(2 * d as i32)
            * 16.0
            * df
            * df
            * factorial(d as u64) as f64
            * l0.powi(d as i32 + 2)
            / (epsilon * epsilon);
        let kappa = 16.0 * 20f64.powi(4) * df.powi(4 * d as i32 - 2) * 2f64.powi(4 * d as i32);
        let cap = kappa * l0.powi(4 * d as i32) / (epsilon * epsilon);
        let alpha = 20.0 * df.powi(d as i32 - 1) * 2f64.powi(d as i32) * l0.powi(d as i32 - 1);
        Ok(PipelineConfig {
            epsilon,
            tau: saturate_u64(tau),
            population_cap: saturate_u64(cap) as usize,
            lambda,
            delta,
            alpha,
            rough: RoughConfig::paper(d, n)?,
            hard_cap,
            preset: PipelinePreset::Paper,
            fallback: FallbackPolicy::Auto,
            capture_tuples: false,
        })
    }

    /// A bench-scale schedule: same structure, small constants.
    ///
    /// The threshold is clamped to at least 64 so the drain step does real
    /// work, the population cap is fixed at 12 so subsampling triggers on
    /// instances that fit in a test, and the claimed coarse slack is a flat
    /// 4. None of the formal error guarantees survive these constants.
    pub fn desk(d: usize, n: u32, epsilon: f64) -> Result<Self> {
        let (l0, lambda, delta, hard_cap) = shared_schedule(d, n, epsilon)?;
        let tau = ((1u64 << d) * factorial(d as u64)).saturating_mul(l0 as u64);
        Ok(PipelineConfig {
            epsilon,
            tau: tau.max(64),
            population_cap: 12,
            lambda,
            delta,
            alpha: 4.0,
            rough: RoughConfig::desk(d, n)?,
            hard_cap,
            preset: PipelinePreset::Desk,
            fallback: FallbackPolicy::Auto,
            capture_tuples: false,
        })
    }
}

/// What an iteration did after its drain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// The starting population, before any iteration.
    Init,
    /// The drain emptied the population; the run is over.
    Drained,
    /// Survivors were split into color-restricted children.
    Sparsified,
    /// Survivors were tagged with coarse estimates and subsampled.
    Subsampled,
}

/// One row of an [`EstimateReport`] trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    /// Weighted count drained so far.
    pub psi: f64,
    /// Population size after the step.
    pub population: usize,
    pub step: StepKind,
    /// Weight rescale factors the subsample applied, empty otherwise.
    pub importance_scales: Vec<f64>,
    /// Cheap progress proxy: `psi` plus the population's weighted coarse
    /// mass (per-tuple estimates when the step produced them, a floor of 1
    /// per tuple otherwise, measured before any subsample cut).
    pub est_proxy: f64,
    /// The population itself, when the run captured tuples.
    #[serde(skip)]
    pub snapshot: Option<Vec<WeightedTuple>>,
}

/// Result of one [`estimate`] run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    /// Estimated edge count.
    pub m_hat: f64,
    /// Estimated ordered edge count; `m_hat` times `d!`.
    pub m_hat_o: f64,
    /// Iterations the loop ran; 0 on the brute-force path.
    pub iterations: u64,
    /// One record per iteration plus the starting row; empty on the
    /// brute-force path.
    pub trace: Vec<IterationRecord>,
    /// The oracle handle's ledger when the run finished.
    pub ledger: QueryLedger,
    pub config: PipelineConfig,
    pub fallback_used: bool,
}

fn auto_prefers_brute_force(config: &PipelineConfig, d: usize, n: u32) -> bool {
    let l0 = ceil_log2(n) as f64;
    let cutoff = ((n as f64).powi(-(d as i32)) * l0.powi(5 * d as i32 + 5)).powf(0.25);
    if config.epsilon <= cutoff {
        return true;
    }
    let candidates = binomial(n as u128, d as u32);
    let projected = (config.hard_cap as u128)
        .saturating_mul(config.population_cap as u128)
        .saturating_mul(node_budget(d, n, config.tau) as u128);
    candidates <= projected
}

/// Counts edges exactly with one singleton query per candidate `d`-set.
///
/// Costs exactly `C(n, d)` base queries.
pub fn brute_force_count(oracle: &mut OracleHandle) -> Result<u64> {
    let d = oracle.d();
    let n = oracle.n();
    if (d as u32) > n {
        return Ok(0);
    }
    let mut combo: Vec<u32> = (0..d as u32).collect();
    let mut count = 0u64;
    loop {
        let sets: Vec<VertexSet> = combo
            .iter()
            .map(|&v| VertexSet::from_members(n, &[v]).expect("vertex in range"))
            .collect();
        if oracle.cid(&sets)? {
            count += 1;
        }
        // advance to the next d-subset in lexicographic order
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            if combo[i] < n - (d - i) as u32 {
                combo[i] += 1;
                for j in i + 1..d {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Estimates the instance's edge count through the decision oracle.
///
/// Population sizes never exceed `4^d` times the cap: the cap gates entry
/// to the sparsify step and each tuple has at most `4^d` color patterns.
/// Runs that fail to drain within the iteration cap return
/// [`Error::IterationCap`] rather than a silently unconverged number.
pub fn estimate(oracle: &mut OracleHandle, config: &PipelineConfig) -> Result<EstimateReport> {
    let d = oracle.d();
    let n = oracle.n();
    let use_brute = match config.fallback {
        FallbackPolicy::BruteForceOnly => true,
        FallbackPolicy::PipelineOnly => false,
        FallbackPolicy::Auto => auto_prefers_brute_force(config, d, n),
    };
    if use_brute {
        let m = brute_force_count(oracle)? as f64;
        return Ok(EstimateReport {
            m_hat: m,
            m_hat_o: m * factorial(d as u64) as f64,
            iterations: 0,
            trace: Vec::new(),
            ledger: *oracle.ledger(),
            config: config.clone(),
            fallback_used: true,
        });
    }

    let mut psi = 0.0f64;
    let mut population = vec![WeightedTuple {
        tuple: PartedTuple::uniform(n, d),
        weight: 1.0,
    }];
    let mut trace = Vec::new();
    let record = |psi: f64,
                  population: &[WeightedTuple],
                  step: StepKind,
                  scales: Vec<f64>,
                  est_proxy: f64,
                  capture: bool| IterationRecord {
        psi,
        population: population.len(),
        step,
        importance_scales: scales,
        est_proxy,
        snapshot: capture.then(|| population.to_vec()),
    };
    trace.push(record(
        psi,
        &population,
        StepKind::Init,
        Vec::new(),
        population.iter().map(|wt| wt.weight).sum(),
        config.capture_tuples,
    ));

    let mut iterations = 0u64;
    loop {
        if iterations >= config.hard_cap {
            return Err(Error::IterationCap {
                cap: config.hard_cap,
                population: population.len(),
            });
        }
        iterations += 1;

        let mut survivors = Vec::new();
        for wt in population.drain(..) {
            match exact_count(oracle, &wt.tuple, config.tau)?.verdict {
                ExactVerdict::AtMost(c) => psi += wt.weight * c as f64,
                ExactVerdict::Exceeds => survivors.push(wt),
            }
        }
        population = survivors;

        if population.is_empty() {
            trace.push(record(
                psi,
                &population,
                StepKind::Drained,
                Vec::new(),
                psi,
                config.capture_tuples,
            ));
            break;
        }

        if population.len() <= config.population_cap {
            let mut next = Vec::new();
            for wt in &population {
                let mut coloring = oracle.stream(StreamTag::SparsifyColoring);
                let mut hash = oracle.stream(StreamTag::SparsifyHash);
                next.extend(sparsify(wt, &mut coloring, &mut hash));
            }
            population = next;
            let mass: f64 = population.iter().map(|wt| wt.weight).sum();
            trace.push(record(
                psi,
                &population,
                StepKind::Sparsified,
                Vec::new(),
                psi + mass,
                config.capture_tuples,
            ));
        } else {
            let mut tagged = Vec::with_capacity(population.len());
            let mut coarse_mass = 0.0;
            for wt in population.drain(..) {
                let estimate = match rough_estimation_tuple(oracle, &wt.tuple, &config.rough)? {
                    RoughEstimate::Found { m_hat_o, .. } => m_hat_o.max(1.0),
                    RoughEstimate::NotFound => 1.0,
                };
                coarse_mass += wt.weight * estimate;
                tagged.push((
                    wt,
                    CoarseTag {
                        estimate,
                        alpha: config.alpha,
                    },
                ));
            }
            let params = ImportanceParams {
                lambda: config.lambda,
                delta: config.delta,
                target_total: Some(config.population_cap),
            };
            let mut rng = oracle.stream(StreamTag::Importance);
            let outcome = importance_sample(tagged, &params, &mut rng)?;
            population = outcome.kept;
            trace.push(record(
                psi,
                &population,
                StepKind::Subsampled,
                outcome.scales,
                psi + coarse_mass,
                config.capture_tuples,
            ));
        }
    }

    Ok(EstimateReport {
        m_hat: psi / factorial(d as u64) as f64,
        m_hat_o: psi,
        iterations,
        trace,
        ledger: *oracle.ledger(),
        config: config.clone(),
        fallback_used: false,
    })
}

/// Coarse whole-instance estimate of the plain (unordered) edge count.
///
/// A ladder hit is divided by `d!`; when no rung is accepted the instance is
/// either confirmed empty with one exact check or reported at the smallest
/// scale the ladder can express.
pub fn rough_estimate_unordered(oracle: &mut OracleHandle, config: &RoughConfig) -> Result<f64> {
    let d = oracle.d();
    let orderings = factorial(d as u64) as f64;
    match rough_estimation(oracle, config)? {
        RoughEstimate::Found { m_hat_o, .. } => Ok(m_hat_o / orderings),
        RoughEstimate::NotFound => {
            let probe = PartedTuple::uniform(oracle.n(), d);
            match exact_count(oracle, &probe, 0)?.verdict {
                ExactVerdict::AtMost(_) => Ok(0.0),
                ExactVerdict::Exceeds => Ok(1.0 / config.output_divisor / orderings),
            }
        }
    }
}

/// A trace re-read against the instance it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckedTrace {
    /// Per record: drained total plus the population's true weighted
    /// ordered count. The first entry is the instance's ordered count and
    /// the last is the reported estimate.
    pub est: Vec<f64>,
    /// Per record: the population's raw (unweighted) ordered count. Weights
    /// grow to compensate exactly for what sparsification and subsampling
    /// discard, so this is the quantity that actually shrinks.
    pub act: Vec<f64>,
    /// Indices `i` where `est[i + 1]` is not within a `(1 + lambda)` factor
    /// of `est[i]`.
    pub drift_violations: Vec<usize>,
    /// Indices `i` where `act[i + 2]` exceeds half of `act[i]`.
    pub halving_violations: Vec<usize>,
}

/// Recomputes the exact invariants a pipeline trace is expected to track.
///
/// Needs a report produced with
/// [`PipelineConfig::capture_tuples`] set, and the instance itself for
/// ground-truth counts.
pub fn trace_diagnostics(report: &EstimateReport, h: &Hypergraph) -> Result<CheckedTrace> {
    let mut est = Vec::with_capacity(report.trace.len());
    let mut act = Vec::with_capacity(report.trace.len());
    for row in &report.trace {
        let snapshot = row.snapshot.as_ref().ok_or(Error::Parameter {
            name: "capture_tuples",
            reason: "trace has no population snapshots to diagnose".into(),
        })?;
        let mut weighted = 0.0;
        let mut raw = 0.0;
        for wt in snapshot {
            let count = h.count_ordered_tuple(&wt.tuple)? as f64;
            weighted += wt.weight * count;
            raw += count;
        }
        act.push(raw);
        est.push(row.psi + weighted);
    }
    let stretch = 1.0 + report.config.lambda;
    let drift_violations = (0..est.len().saturating_sub(1))
        .filter(|&i| est[i + 1] > stretch * est[i] || est[i + 1] * stretch < est[i])
        .collect();
    let halving_violations = (0..act.len().saturating_sub(2))
        .filter(|&i| act[i + 2] > act[i] / 2.0)
        .collect();
    Ok(CheckedTrace {
        est,
        act,
        drift_violations,
        halving_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::generate_random;
    use crate::oracle::SimulationConfig;

    fn pipeline_only(mut config: PipelineConfig) -> PipelineConfig {
        config.fallback = FallbackPolicy::PipelineOnly;
        config
    }

    fn complete_graph(n: u32) -> Hypergraph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push(vec![u, v]);
            }
        }
        Hypergraph::new(2, n, edges).unwrap()
    }

    #[test]
    fn empty_instance_drains_in_one_iteration() {
        let h = Hypergraph::new(2, 8, Vec::<Vec<u32>>::new()).unwrap();
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 1);
        let config = pipeline_only(PipelineConfig::desk(2, 8, 0.5).unwrap());
        let report = estimate(&mut oracle, &config).unwrap();
        assert_eq!(report.m_hat, 0.0);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.trace.len(), 2);
        assert_eq!(report.trace[1].step, StepKind::Drained);
        assert!(!report.fallback_used);
    }

    #[test]
    fn small_instance_is_counted_exactly_at_the_root() {
        let h = generate_random(16, 2, 20, 9).unwrap();
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 2);
        let config = pipeline_only(PipelineConfig::desk(2, 16, 0.5).unwrap());
        // ordered count 40 is at most tau = 64: one drain settles it
        let report = estimate(&mut oracle, &config).unwrap();
        assert_eq!(report.m_hat, 20.0);
        assert_eq!(report.m_hat_o, 40.0);
        assert_eq!(report.iterations, 1);
    }

    #[test]
    fn dense_instance_walks_through_every_step() {
        let h = complete_graph(64);
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 7);
        let mut config = pipeline_only(PipelineConfig::desk(2, 64, 0.5).unwrap());
        // a tiny cap forces the subsample step on a bench-size run
        config.population_cap = 2;
        let report = estimate(&mut oracle, &config).unwrap();

        assert!(!report.fallback_used);
        assert!(report.m_hat > 0.0 && report.m_hat.is_finite());
        assert_eq!(report.trace.len(), report.iterations as usize + 1);
        let steps: Vec<StepKind> = report.trace.iter().map(|row| row.step).collect();
        assert!(steps.contains(&StepKind::Sparsified));
        assert!(steps.contains(&StepKind::Subsampled));
        assert_eq!(*steps.last().unwrap(), StepKind::Drained);
        let bound = 4usize.pow(2) * config.population_cap;
        for row in &report.trace {
            assert!(row.population <= bound, "population {}", row.population);
        }
        // the drained total only grows
        for pair in report.trace.windows(2) {
            assert!(pair[1].psi >= pair[0].psi);
        }
        let subsampled = report
            .trace
            .iter()
            .find(|row| row.step == StepKind::Subsampled)
            .unwrap();
        assert!(!subsampled.importance_scales.is_empty());
    }

    #[test]
    fn iteration_cap_is_an_error_not_an_answer() {
        let h = complete_graph(16);
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 3);
        let mut config = pipeline_only(PipelineConfig::desk(2, 16, 0.5).unwrap());
        config.hard_cap = 1;
        // ordered count 240 exceeds tau = 64, so one iteration cannot drain
        match estimate(&mut oracle, &config) {
            Err(Error::IterationCap { cap: 1, .. }) => {}
            other => panic!("expected the iteration cap, got {:?}", other),
        }
    }

    #[test]
    fn brute_force_spends_one_query_per_candidate() {
        let h = Hypergraph::new(2, 5, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 4);
        assert_eq!(brute_force_count(&mut oracle).unwrap(), 2);
        assert_eq!(oracle.ledger().cid, 10); // C(5, 2)
        assert_eq!(oracle.ledger().total(), 10);
    }

    #[test]
    fn forced_brute_force_reports_the_exact_count() {
        let h = generate_random(32, 3, 40, 11).unwrap();
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 5);
        let mut config = PipelineConfig::desk(3, 32, 0.5).unwrap();
        config.fallback = FallbackPolicy::BruteForceOnly;
        let report = estimate(&mut oracle, &config).unwrap();
        assert_eq!(report.m_hat, 40.0);
        assert_eq!(report.m_hat_o, 240.0);
        assert!(report.fallback_used);
        assert_eq!(report.iterations, 0);
        assert!(report.trace.is_empty());
    }

    #[test]
    fn auto_routes_bench_scale_instances_to_brute_force() {
        // at n = 64 the accuracy cutoff alone is far above any epsilon
        let h = generate_random(64, 2, 100, 13).unwrap();
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 6);
        let config = PipelineConfig::desk(2, 64, 0.5).unwrap();
        assert_eq!(config.fallback, FallbackPolicy::Auto);
        let report = estimate(&mut oracle, &config).unwrap();
        assert!(report.fallback_used);
        assert_eq!(report.m_hat, 100.0);
    }

    #[test]
    fn trace_diagnostics_recompute_the_recorded_run() {
        let h = complete_graph(32);
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 8);
        let mut config = pipeline_only(PipelineConfig::desk(2, 32, 0.5).unwrap());
        config.population_cap = 2;
        config.capture_tuples = true;
        let report = estimate(&mut oracle, &config).unwrap();
        let diag = trace_diagnostics(&report, &h).unwrap();

        assert_eq!(diag.est.len(), report.trace.len());
        assert_eq!(diag.est[0], h.m_ordered() as f64);
        assert_eq!(*diag.est.last().unwrap(), report.m_hat_o);
        assert_eq!(*diag.act.last().unwrap(), 0.0);

        // the flags are exactly the recomputation over est and act
        let stretch = 1.0 + config.lambda;
        let drift: Vec<usize> = (0..diag.est.len() - 1)
            .filter(|&i| {
                diag.est[i + 1] > stretch * diag.est[i] || diag.est[i + 1] * stretch < diag.est[i]
            })
            .collect();
        let halving: Vec<usize> = (0..diag.act.len() - 2)
            .filter(|&i| diag.act[i + 2] > diag.act[i] / 2.0)
            .collect();
        assert_eq!(diag.drift_violations, drift);
        assert_eq!(diag.halving_violations, halving);
    }

    #[test]
    fn diagnostics_need_snapshots() {
        let h = Hypergraph::new(2, 8, Vec::<Vec<u32>>::new()).unwrap();
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 9);
        let config = pipeline_only(PipelineConfig::desk(2, 8, 0.5).unwrap());
        let report = estimate(&mut oracle, &config).unwrap();
        assert!(trace_diagnostics(&report, &h).is_err());
    }

    #[test]
    fn unordered_rough_estimate_confirms_empty_instances() {
        let h = Hypergraph::new(2, 16, Vec::<Vec<u32>>::new()).unwrap();
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 10);
        let rough = RoughConfig::desk(2, 16).unwrap();
        assert_eq!(rough_estimate_unordered(&mut oracle, &rough).unwrap(), 0.0);
    }

    #[test]
    fn unordered_rough_estimate_is_positive_on_dense_instances() {
        let h = complete_graph(64);
        let mut oracle = OracleHandle::new(&h, SimulationConfig::exact(), 11);
        let rough = RoughConfig::desk(2, 64).unwrap();
        let estimate = rough_estimate_unordered(&mut oracle, &rough).unwrap();
        assert!(estimate > 0.0, "estimate {}", estimate);
    }

    #[test]
    fn schedules_scale_as_documented() {
        let paper = PipelineConfig::paper(2, 16, 0.5).unwrap();
        assert_eq!(paper.tau, 1u64 << 37);
        assert!(paper.population_cap > 1 << 50);
        assert_eq!(paper.alpha, 640.0);
        assert_eq!(paper.hard_cap, 36);
        assert_eq!(paper.lambda, 0.5 / 32.0);

        let desk = PipelineConfig::desk(2, 16, 0.5).unwrap();
        assert_eq!(desk.tau, 64);
        assert_eq!(desk.population_cap, 12);
        assert_eq!(desk.hard_cap, 36);
        assert!(PipelineConfig::desk(2, 16, 0.0).is_err());
        assert!(PipelineConfig::desk(2, 16, 1.0).is_err());
    }
}
