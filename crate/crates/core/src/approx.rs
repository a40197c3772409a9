//! Randomized approximate learners: randomized binary search over a single
//! ordering, the tolerant direction-voting learner built on top of the exact
//! learner, and the epsilon-exact / realizable learners.

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::error::LearnError;
use crate::exact::{
    ceil_log2, contender, harvest_tail, learn_loop, LoopExit, Recorder,
};
use crate::instance::{ShuffledInstance, ThresholdHypothesis};
use crate::oracle::{LabelSource, Remapped};
use crate::ror::TieBreak;
use crate::rng::{derive_seed, rng_from_seed, stream};
use crate::trace::{LearnObserver, NoopObserver};
use crate::verify::{is_monotone_under, monotone_distance};

/// Accuracy / confidence / seed bundle for the randomized learners. All
/// derived counts round up, which only strengthens the guarantees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
}

impl ApproxParams {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Self {
        assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon in (0,1)");
        assert!(delta > 0.0 && delta < 1.0, "delta in (0,1)");
        Self { epsilon, delta, seed }
    }

    /// Voting rounds: ceil(50 ln(D / delta)).
    pub fn rounds(&self, d: usize) -> usize {
        (50.0 * (d as f64 / self.delta).ln()).ceil().max(1.0) as usize
    }

    /// Per-round sample count: ceil(40 / (epsilon delta)).
    pub fn sample_size(&self) -> usize {
        (40.0 / (self.epsilon * self.delta)).ceil() as usize
    }

    /// Largest tolerated corruption: floor(epsilon delta n / 400).
    pub fn corruption_budget(&self, n: usize) -> usize {
        (self.epsilon * self.delta * n as f64 / 400.0).floor() as usize
    }
}

/// Per-direction vote totals from the sampling rounds.
#[derive(Debug, Clone)]
pub struct VoteTally {
    counts: Vec<i64>,
}

impl VoteTally {
    pub fn new(d: usize) -> Self {
        Self { counts: vec![0; d] }
    }

    pub fn record(&mut self, dir: usize, monotone: bool) {
        self.counts[dir - 1] += if monotone { 1 } else { -1 };
    }

    pub fn count(&self, dir: usize) -> i64 {
        self.counts[dir - 1]
    }

    /// Argmax direction, smallest index on ties.
    pub fn winner(&self) -> usize {
        let mut best = 1;
        for dir in 2..=self.counts.len() {
            if self.count(dir) > self.count(best) {
                best = dir;
            }
        }
        best
    }
}

/// Randomized binary search over ranks 1..=n of a possibly non-monotone
/// function. Maintains a contiguous unknown interval, querying a uniformly
/// random rank from its middle third and discarding the far third, until at
/// most C epsilon n ranks remain (C = 9 / delta); those are filled with 0.
/// The output is always monotone. For intervals too short to split in
/// thirds, the update fixes labels through the queried rank so every step
/// makes progress.
pub fn random_binary_search<F: FnMut(usize) -> bool>(
    n: usize,
    mut f: F,
    epsilon: f64,
    delta: f64,
    rng: &mut ChaCha20Rng,
) -> Vec<bool> {
    assert!(n >= 1);
    let c = 9.0 / delta;
    let target = c * epsilon * n as f64;
    let mut g = vec![false; n];
    let mut lo = 1usize;
    let mut hi = n;
    while lo <= hi && (hi - lo + 1) as f64 > target {
        let len = hi - lo + 1;
        let third = len / 3;
        if third == 0 {
            let q = if len == 2 && rng.random_range(0..2u8) == 1 { hi } else { lo };
            if f(q) {
                for r in q..=hi {
                    g[r - 1] = true;
                }
                hi = q - 1;
                if hi < lo {
                    break;
                }
            } else {
                lo = q + 1;
            }
            continue;
        }
        let q = rng.random_range(lo + third..=hi - third);
        if f(q) {
            for r in hi - third + 1..=hi {
                g[r - 1] = true;
            }
            hi -= third;
        } else {
            lo += third;
        }
    }
    g
}

/// Query bound for `random_binary_search` at the given parameters.
pub fn binary_search_query_bound(epsilon: f64, delta: f64) -> usize {
    let c = 9.0 / delta;
    (1.0 / (c * epsilon)).log(1.5).ceil().max(0.0) as usize + 1
}

/// Tolerant learner: samples restricted sub-instances, runs the exact
/// learner on each, votes for the direction whose orderings keep coming out
/// monotone, then runs randomized binary search along the winner. Succeeds
/// (error at most epsilon) with probability 1 - 2 delta when the oracle is
/// within epsilon delta / 400 of some threshold labeling.
pub fn tolerant_learn<L: LabelSource>(
    oracle: &mut L,
    inst: &ShuffledInstance,
    params: &ApproxParams,
) -> ThresholdHypothesis {
    let n = inst.n();
    let d = inst.num_directions();
    let winner = if d == 1 {
        1
    } else {
        let mut tally = VoteTally::new(d);
        let s = params.sample_size();
        for round in 0..params.rounds(d) {
            let mut rng =
                rng_from_seed(derive_seed(params.seed, stream::ROUND, round as u64));
            let mut ids: Vec<usize> = (0..s).map(|_| rng.random_range(0..n)).collect();
            ids.sort_unstable();
            ids.dedup();
            let (sub, submap) = inst.restrict(&ids).expect("sample set nonempty");
            let labeling = {
                let mut view = Remapped::new(oracle, &submap);
                // A failed exact run on a corrupted sample carries no
                // guarantee; any total labeling will do for the vote.
                crate::exact::shuffled_monotone_learn(&mut view, &sub)
                    .unwrap_or_else(|_| vec![false; sub.n()])
            };
            for dir in sub.directions() {
                tally.record(dir, is_monotone_under(&labeling, &sub, dir));
            }
        }
        tally.winner()
    };
    let mut rng = rng_from_seed(derive_seed(params.seed, stream::BINARY_SEARCH, 0));
    let g = random_binary_search(
        n,
        |r| oracle.query(inst.element_at(winner, r)),
        params.epsilon * params.delta / 10.0,
        params.delta,
        &mut rng,
    );
    let threshold = (1..=n).find(|&r| g[r - 1]).unwrap_or(n + 1);
    ThresholdHypothesis::new(winner, threshold)
}

/// Result of the epsilon-exact learner: a labeling wrong on at most an
/// epsilon fraction of elements, with the threshold hypothesis realizing it
/// when the labeling is monotone under some permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsLearnResult {
    pub labeling: Vec<bool>,
    pub witness: Option<ThresholdHypothesis>,
}

/// Deterministic epsilon-exact learner: the exact learner's loop with the
/// exit threshold raised to max(ceil(epsilon n), 10), finished either
/// exactly (when at most 10 elements remain) or by arbitrating between the
/// candidate-set hypothesis and the learned-labels hypothesis with one
/// disagreement query.
pub fn eps_exact_learn<L: LabelSource>(
    oracle: &mut L,
    inst: &ShuffledInstance,
    epsilon: f64,
) -> Result<EpsLearnResult, LearnError> {
    eps_exact_learn_with(oracle, inst, epsilon, TieBreak::Smallest, &mut NoopObserver)
}

pub fn eps_exact_learn_with<L: LabelSource>(
    oracle: &mut L,
    inst: &ShuffledInstance,
    epsilon: f64,
    tie: TieBreak,
    observer: &mut dyn LearnObserver,
) -> Result<EpsLearnResult, LearnError> {
    assert!(epsilon > 0.0);
    let n = inst.n();
    let z_floor = ((epsilon * n as f64).ceil() as usize).max(10);
    let mut rec = Recorder::new(oracle);
    let mut state = match learn_loop(&mut rec, inst, z_floor, tie, observer) {
        LoopExit::Constant(b) => {
            let labeling = vec![b; n];
            let witness = Some(ThresholdHypothesis::new(1, if b { 1 } else { n + 1 }));
            return Ok(EpsLearnResult { labeling, witness });
        }
        LoopExit::Finished(state) => state,
    };

    if state.instance.n() <= 10 && !state.live.is_empty() {
        // Small enough to finish exactly, as the exact learner would.
        harvest_tail(&mut rec, inst, &mut state, observer);
        observer.contender(state.candidates.len());
        if state.candidates.is_empty() {
            return Err(LearnError::NotRealizable);
        }
        let labeling = contender(&mut rec, &state.candidates, inst)?;
        for (&x, &bit) in &rec.seen {
            if labeling[x] != bit {
                return Err(LearnError::NotRealizable);
            }
        }
        let witness = monotone_witness(&labeling, inst);
        return Ok(EpsLearnResult { labeling, witness });
    }

    // h^Z: learned labels off the live set, zero inside it.
    let h_z: Vec<bool> = (0..n)
        .map(|x| state.learned.get(&x).copied().unwrap_or(false))
        .collect();
    let winner = if state.candidates.is_empty() {
        h_z
    } else {
        observer.contender(state.candidates.len());
        let h_c = contender(&mut rec, &state.candidates, inst)?;
        // Arbitrate on the elements whose labels were learned exactly.
        let disagreement = state
            .learned
            .keys()
            .copied()
            .filter(|&x| h_c[x] != state.learned[&x])
            .min();
        match disagreement {
            None => h_c,
            Some(x) => {
                if rec.query(x) == h_c[x] {
                    h_c
                } else {
                    h_z
                }
            }
        }
    };
    let witness = monotone_witness(&winner, inst);
    Ok(EpsLearnResult { labeling: winner, witness })
}

/// The threshold hypothesis realizing `labeling`, if one exists (smallest
/// direction index).
fn monotone_witness(labeling: &[bool], inst: &ShuffledInstance) -> Option<ThresholdHypothesis> {
    let n = inst.n();
    for i in inst.directions() {
        if is_monotone_under(labeling, inst, i) {
            let j = (1..=n)
                .find(|&r| labeling[inst.element_at(i, r)])
                .unwrap_or(n + 1);
            return Some(ThresholdHypothesis::new(i, j));
        }
    }
    None
}

/// Query budgets of the two realizable strategies; the cheaper one runs.
pub fn realizable_budgets(d: usize, epsilon: f64, delta: f64) -> (usize, usize) {
    let b1 = d + (1.0 / epsilon).log2().ceil().max(0.0) as usize;
    let b2 = ((d as f64 / delta).ln() / (delta * epsilon)).ceil() as usize;
    (b1, b2)
}

/// Realizable learner: deterministic epsilon-exact branch when its budget
/// wins, the tolerant learner otherwise.
pub fn realizable_learn<L: LabelSource>(
    oracle: &mut L,
    inst: &ShuffledInstance,
    params: &ApproxParams,
) -> Result<ThresholdHypothesis, LearnError> {
    let d = inst.num_directions();
    let (b1, b2) = realizable_budgets(d, params.epsilon, params.delta);
    if b1 <= b2 {
        let result = eps_exact_learn(oracle, inst, params.epsilon)?;
        if let Some(h) = result.witness {
            return Ok(h);
        }
        // The arbitration winner is not exactly realizable; project it onto
        // the nearest threshold hypothesis.
        let mut best: Option<(usize, ThresholdHypothesis)> = None;
        for i in inst.directions() {
            let permuted: Vec<bool> = (1..=inst.n())
                .map(|r| result.labeling[inst.element_at(i, r)])
                .collect();
            let dist = monotone_distance(&permuted);
            if best.as_ref().is_none_or(|(m, _)| dist.mismatches < *m) {
                best = Some((
                    dist.mismatches,
                    ThresholdHypothesis::new(i, dist.witness_threshold),
                ));
            }
        }
        Ok(best.expect("at least one direction").1)
    } else {
        Ok(tolerant_learn(oracle, inst, params))
    }
}

/// Query bound of the deterministic branch: 10 D + 12 ceil(log2(1/eps)) + 15.
pub fn eps_exact_query_bound(d: usize, epsilon: f64) -> usize {
    10 * d + 12 * ceil_log2((1.0 / epsilon).ceil() as usize) + 15
}
