//! Coarse estimation of the ordered edge count through guess verification.
//!
//! [`verify_scale`] spot-checks one guessed magnitude: it sweeps dyadic
//! level vectors, samples one random subset per slot at rates tuned so that
//! a correct guess leaves roughly one witness tuple alive, and asks a single
//! ordered-tuple oracle query per vector. [`rough_estimation`] walks a
//! halving ladder of guesses from far above any possible count down to 1,
//! runs a batch of verifiers per rung, and stops at the first rung where the
//! acceptance fraction clears a fixed threshold. The result is a constant
//! confidence, polylog-factor estimate of the ordered count using
//! polylogarithmically many queries per rung; [`coarse_band`] gives the
//! multiplicative window the output lands in with high probability.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypergraph::{PartedTuple, VertexSet};
use crate::oracle::{OracleHandle, StreamTag};

/// Ceiling of the base-2 logarithm; 0 for inputs below 2.
pub fn ceil_log2(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

/// The dyadic levels at which a verifier accepted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessVector {
    pub components: Vec<u32>,
}

/// Result of one verification sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub accepted: bool,
    /// Levels of the accepting vector, when one was found.
    pub guess: Option<GuessVector>,
    /// Ordered-tuple queries issued by this sweep.
    pub queries: u64,
}

/// Tests the guess that the ordered edge count within `slots` is about
/// `r_hat`.
///
/// For each vector of levels `(j_1..j_{d-1})`, each swept from
/// `d * ceil(log2 n)` down to 0, the verifier samples `B_1` from the first
/// slot at rate `2^{j_1} / r_hat`, middle slots at rate
/// `2^{j_i - j_{i-1}} * d * ceil(log2 n)`, and the last slot fresh per
/// vector at rate `2^{-j_{d-1}}`, then asks one ordered-tuple query on the
/// samples. The sweep accepts at the first positive answer.
///
/// Acceptance is monotone in the true count and drops like `1 / r_hat` once
/// the guess overshoots; rejection of a guess far below the count is the
/// rare event the ladder in [`rough_estimation`] relies on.
pub fn verify_scale(
    oracle: &mut OracleHandle,
    slots: &[VertexSet],
    r_hat: u128,
) -> Result<VerifyOutcome> {
    let d = oracle.d();
    if slots.len() != d {
        return Err(Error::SetCount {
            expected: d,
            got: slots.len(),
        });
    }
    if r_hat == 0 {
        return Err(Error::Parameter {
            name: "r_hat",
            reason: "guess must be positive".into(),
        });
    }
    let n = oracle.n();
    let l = d as u32 * ceil_log2(n);
    let mut sweep = Sweep {
        rng: oracle.stream(StreamTag::VerifySample),
        members: slots.iter().map(|s| s.members()).collect(),
        samples: vec![VertexSet::empty(n); d],
        levels: vec![0; d - 1],
        n,
        d,
        l,
        level_scale: l as f64,
        r_hat: r_hat as f64,
        queries: 0,
    };
    let guess = sweep.descend(oracle, 0)?;
    if let Some(g) = &guess {
        log::trace!(
            "verifier accepted guess {} at levels {:?}",
            r_hat,
            g.components
        );
    }
    Ok(VerifyOutcome {
        accepted: guess.is_some(),
        guess,
        queries: sweep.queries,
    })
}

struct Sweep {
    rng: ChaCha8Rng,
    members: Vec<Vec<u32>>,
    samples: Vec<VertexSet>,
    levels: Vec<u32>,
    n: u32,
    d: usize,
    l: u32,
    level_scale: f64,
    r_hat: f64,
    queries: u64,
}

impl Sweep {
    fn descend(&mut self, oracle: &mut OracleHandle, depth: usize) -> Result<Option<GuessVector>> {
        for j in (0..=self.l).rev() {
            self.levels[depth] = j;
            let p = if depth == 0 {
                2f64.powi(j as i32) / self.r_hat
            } else {
                2f64.powi(j as i32 - self.levels[depth - 1] as i32) * self.level_scale
            };
            self.samples[depth] = sample_subset(&self.members[depth], self.n, p, &mut self.rng);
            if depth == self.d - 2 {
                // innermost level: last slot is drawn fresh for this vector
                let p_last = 2f64.powi(-(j as i32));
                self.samples[self.d - 1] =
                    sample_subset(&self.members[self.d - 1], self.n, p_last, &mut self.rng);
                self.queries += 1;
                if oracle.cid2o(&self.samples)? {
                    return Ok(Some(GuessVector {
                        components: self.levels.clone(),
                    }));
                }
            } else if let Some(hit) = self.descend(oracle, depth + 1)? {
                return Ok(Some(hit));
            }
        }
        Ok(None)
    }
}

/// Bernoulli sample of `members` at rate `p`.
fn sample_subset(members: &[u32], n: u32, p: f64, rng: &mut ChaCha8Rng) -> VertexSet {
    let mut out = VertexSet::empty(n);
    if p >= 1.0 {
        for &v in members {
            out.insert(v);
        }
        return out;
    }
    if p <= 0.0 || members.is_empty() {
        return out;
    }
    if p <= 0.125 {
        // geometric jumps between successes beat per-member coin flips
        let ln_q = (1.0 - p).ln();
        let mut i = 0usize;
        loop {
            let u = 1.0 - rng.gen::<f64>();
            let gap = (u.ln() / ln_q).floor();
            if !gap.is_finite() || gap >= (members.len() - i) as f64 {
                return out;
            }
            i += gap as usize;
            out.insert(members[i]);
            i += 1;
            if i >= members.len() {
                return out;
            }
        }
    }
    for &v in members {
        if rng.gen::<f64>() < p {
            out.insert(v);
        }
    }
    out
}

/// Which constant schedule a [`RoughConfig`] was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoughPreset {
    /// Constants sized for the formal guarantees; impractical below huge
    /// instances but exact to the analysis.
    Paper,
    /// Small constants for bench-scale instances; same structure, wider
    /// noise.
    Desk,
    Custom,
}

/// Ladder parameters for [`rough_estimation`].
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct RoughConfig {
    /// Verifier sweeps per rung.
    pub gamma: u64,
    /// A rung is accepted when `accepts * acceptance_den > gamma`.
    pub acceptance_den: u64,
    /// Topmost guess; halved down to 1.
    pub ladder_top: u128,
    /// The accepted guess divided by this yields the count estimate.
    pub output_divisor: f64,
    pub preset: RoughPreset,
}

impl RoughConfig {
    fn with_multiplier(d: usize, n: u32, multiplier: u64, preset: RoughPreset) -> Result<Self> {
        let l0 = ceil_log2(n);
        let top_exp = d as u32 * l0;
        if top_exp > 120 {
            return Err(Error::Parameter {
                name: "n",
                reason: format!("ladder top 2^{} exceeds the supported range", top_exp),
            });
        }
        Ok(RoughConfig {
            gamma: multiplier * l0 as u64,
            acceptance_den: 10u64 << d,
            ladder_top: 1u128 << top_exp,
            output_divisor: (d as f64).powi(d as i32 - 2)
                * 2f64.powi(d as i32)
                * (l0 as f64).powi(d as i32 - 2),
            preset,
        })
    }

    pub fn paper(d: usize, n: u32) -> Result<Self> {
        let multiplier = d as u64 * 4u64.pow(d as u32) * 2000;
        Self::with_multiplier(d, n, multiplier, RoughPreset::Paper)
    }

    pub fn desk(d: usize, n: u32) -> Result<Self> {
        Self::with_multiplier(d, n, 64, RoughPreset::Desk)
    }
}

/// Outcome of a ladder run.
#[derive(Clone, Debug, PartialEq)]
pub enum RoughEstimate {
    Found {
        /// Estimated ordered edge count.
        m_hat_o: f64,
        /// The rung that was accepted.
        r_hat: u128,
    },
    /// No rung was accepted; the count is indistinguishable from zero at
    /// this schedule.
    NotFound,
}

/// Coarse estimate of the whole instance's ordered edge count.
pub fn rough_estimation(oracle: &mut OracleHandle, config: &RoughConfig) -> Result<RoughEstimate> {
    let slots = vec![VertexSet::full(oracle.n()); oracle.d()];
    rough_estimation_slots(oracle, &slots, config)
}

/// Coarse estimate of the ordered count within a tuple's slots.
pub fn rough_estimation_tuple(
    oracle: &mut OracleHandle,
    tuple: &PartedTuple,
    config: &RoughConfig,
) -> Result<RoughEstimate> {
    let slots: Vec<VertexSet> = tuple.slots().into_iter().cloned().collect();
    rough_estimation_slots(oracle, &slots, config)
}

fn rough_estimation_slots(
    oracle: &mut OracleHandle,
    slots: &[VertexSet],
    config: &RoughConfig,
) -> Result<RoughEstimate> {
    if config.gamma == 0 || config.acceptance_den == 0 || config.ladder_top == 0 {
        return Err(Error::Parameter {
            name: "config",
            reason: "gamma, acceptance_den and ladder_top must be positive".into(),
        });
    }
    let mut r_hat = config.ladder_top;
    loop {
        let mut accepts: u64 = 0;
        for _ in 0..config.gamma {
            if verify_scale(oracle, slots, r_hat)?.accepted {
                accepts += 1;
                // passing the threshold is irreversible, stop early;
                // a failing rung always runs its full batch
                if accepts * config.acceptance_den > config.gamma {
                    break;
                }
            }
        }
        if accepts * config.acceptance_den > config.gamma {
            log::debug!(
                "rung {} accepted with {}/{} verifier passes",
                r_hat,
                accepts,
                config.gamma
            );
            return Ok(RoughEstimate::Found {
                m_hat_o: r_hat as f64 / config.output_divisor,
                r_hat,
            });
        }
        if r_hat == 1 {
            return Ok(RoughEstimate::NotFound);
        }
        r_hat /= 2;
    }
}

/// Multiplicative window that contains [`rough_estimation`]'s output with
/// high probability when the true ordered count is `m_o >= 1`: roughly a
/// `poly(d, log n)` factor on each side.
pub fn coarse_band(d: usize, n: u32, m_o: u64) -> (f64, f64) {
    let l0 = ceil_log2(n) as f64;
    let scale = (d as f64).powi(d as i32 - 1) * 2f64.powi(d as i32) * l0.powi(d as i32 - 1);
    (m_o as f64 / (8.0 * scale), 20.0 * scale * m_o as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{generate_random, Hypergraph};
    use crate::oracle::SimulationConfig;

    fn full_slots(n: u32, d: usize) -> Vec<VertexSet> {
        vec![VertexSet::full(n); d]
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(ceil_log2(65), 7);
    }

    #[test]
    fn verifier_sweeps_every_vector_on_an_empty_instance() {
        let h = Hypergraph::new(2, 16, Vec::<Vec<u32>>::new()).unwrap();
        let mut o = OracleHandle::new(&h, SimulationConfig::exact(), 1);
        let out = verify_scale(&mut o, &full_slots(16, 2), 256).unwrap();
        assert!(!out.accepted);
        assert_eq!(out.guess, None);
        // levels 8..=0, one query each
        assert_eq!(out.queries, 9);
        assert_eq!(o.ledger().cid2o, 9);

        let h3 = Hypergraph::new(3, 16, Vec::<Vec<u32>>::new()).unwrap();
        let mut o3 = OracleHandle::new(&h3, SimulationConfig::exact(), 1);
        let out3 = verify_scale(&mut o3, &full_slots(16, 3), 256).unwrap();
        assert_eq!(out3.queries, 13 * 13);
    }

    #[test]
    fn verifier_always_accepts_guess_one_on_a_nonempty_instance() {
        // at the all-zero level vector every sampling rate is 1, so the
        // final query sees the whole universe
        for seed in 0..5 {
            let h = generate_random(16, 2, 3, seed).unwrap();
            let mut o = OracleHandle::new(&h, SimulationConfig::exact(), seed);
            let out = verify_scale(&mut o, &full_slots(16, 2), 1).unwrap();
            assert!(out.accepted);
        }
    }

    #[test]
    fn verifier_rejects_wrong_slot_count_and_zero_guess() {
        let h = generate_random(16, 2, 3, 0).unwrap();
        let mut o = OracleHandle::new(&h, SimulationConfig::exact(), 0);
        assert!(verify_scale(&mut o, &full_slots(16, 3), 4).is_err());
        assert!(verify_scale(&mut o, &full_slots(16, 2), 0).is_err());
    }

    #[test]
    fn ladder_reports_not_found_on_an_empty_instance() {
        let h = Hypergraph::new(2, 16, Vec::<Vec<u32>>::new()).unwrap();
        let mut o = OracleHandle::new(&h, SimulationConfig::exact(), 7);
        let config = RoughConfig::desk(2, 16).unwrap();
        assert_eq!(
            rough_estimation(&mut o, &config).unwrap(),
            RoughEstimate::NotFound
        );
        // every rung runs its full batch: rungs * gamma * queries-per-sweep
        assert_eq!(o.ledger().cid2o, 9 * config.gamma * 9);
    }

    #[test]
    fn ladder_lands_in_the_coarse_band_on_a_complete_instance() {
        let m = 64 * 63 / 2;
        let h = generate_random(64, 2, m, 3).unwrap();
        let mut o = OracleHandle::new(&h, SimulationConfig::exact(), 11);
        let config = RoughConfig::desk(2, 64).unwrap();
        match rough_estimation(&mut o, &config).unwrap() {
            RoughEstimate::Found { m_hat_o, .. } => {
                let (lo, hi) = coarse_band(2, 64, h.m_ordered());
                assert!(
                    lo <= m_hat_o && m_hat_o <= hi,
                    "{} not in [{}, {}]",
                    m_hat_o,
                    lo,
                    hi
                );
            }
            RoughEstimate::NotFound => panic!("dense instance must be detected"),
        }
    }

    #[test]
    fn accepted_rung_stops_early() {
        let m = 64 * 63 / 2;
        let h = generate_random(64, 2, m, 3).unwrap();
        let mut o = OracleHandle::new(&h, SimulationConfig::exact(), 5);
        let config = RoughConfig::desk(2, 64).unwrap();
        let estimate = rough_estimation(&mut o, &config).unwrap();
        assert!(matches!(estimate, RoughEstimate::Found { .. }));
        // a full first rung alone would issue gamma * 13 queries; early
        // acceptance must undercut that by a wide margin
        assert!(
            o.ledger().cid2o < config.gamma * 13 / 4,
            "spent {} queries",
            o.ledger().cid2o
        );
    }

    #[test]
    fn tuple_scoped_ladder_sees_only_the_tuple() {
        // edges inside {0..7} and a big clique outside; scoping to {0..7}
        // must estimate the small side
        let mut edges: Vec<Vec<u32>> = vec![vec![0, 1], vec![2, 3]];
        for a in 8..32u32 {
            for b in (a + 1)..32 {
                edges.push(vec![a, b]);
            }
        }
        let h = Hypergraph::new(2, 32, edges).unwrap();
        let inside = VertexSet::from_members(32, &(0..8).collect::<Vec<_>>()).unwrap();
        let tuple = PartedTuple::new(vec![(inside, 2)]).unwrap();
        let mut o = OracleHandle::new(&h, SimulationConfig::exact(), 2);
        let config = RoughConfig::desk(2, 32).unwrap();
        match rough_estimation_tuple(&mut o, &tuple, &config).unwrap() {
            RoughEstimate::Found { m_hat_o, .. } => {
                // the scoped ordered count is 4, the global one 1104
                let (lo, hi) = coarse_band(2, 32, 4);
                assert!(
                    lo <= m_hat_o && m_hat_o <= hi,
                    "{} not in [{}, {}]",
                    m_hat_o,
                    lo,
                    hi
                );
            }
            RoughEstimate::NotFound => panic!("tuple holds edges"),
        }
    }

    #[test]
    fn ladder_runs_with_simulated_oracle() {
        let m = 16 * 15 / 2;
        let h = generate_random(16, 2, m, 9).unwrap();
        let mut o = OracleHandle::new(&h, SimulationConfig::simulated(2, 16), 13);
        let config = RoughConfig::desk(2, 16).unwrap();
        match rough_estimation(&mut o, &config).unwrap() {
            RoughEstimate::Found { m_hat_o, .. } => {
                let (lo, hi) = coarse_band(2, 16, h.m_ordered());
                assert!(
                    lo <= m_hat_o && m_hat_o <= hi,
                    "{} not in [{}, {}]",
                    m_hat_o,
                    lo,
                    hi
                );
            }
            RoughEstimate::NotFound => panic!("complete instance must be detected"),
        }
    }

    #[test]
    fn sampling_regimes_agree_on_average() {
        let members: Vec<u32> = (0..4000).collect();
        let mut rng = crate::oracle::OracleHandle::new(
            &Hypergraph::new(2, 8, vec![vec![0, 1]]).unwrap(),
            SimulationConfig::exact(),
            3,
        )
        .stream(StreamTag::VerifySample);
        // straddle the geometric/bernoulli switch at p = 1/8
        for &p in &[0.01, 0.1, 0.2, 0.5] {
            let mut total = 0u64;
            let rounds = 200;
            for _ in 0..rounds {
                total += sample_subset(&members, 4000, p, &mut rng).len() as u64;
            }
            let mean = total as f64 / rounds as f64;
            let expect = p * members.len() as f64;
            let sd = (members.len() as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (mean - expect).abs() < 5.0 * sd / (rounds as f64).sqrt() + 1.0,
                "p={} mean={} expect={}",
                p,
                mean,
                expect
            );
        }
        // boundary behavior
        let all = sample_subset(&members, 4000, 1.0, &mut rng);
        assert_eq!(all.len(), 4000);
        let none = sample_subset(&members, 4000, 0.0, &mut rng);
        assert!(none.is_empty());
    }
}
