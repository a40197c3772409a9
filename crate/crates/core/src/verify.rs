//! Independent verification oracles: monotone distance, realizability scans,
//! monotonicity spot tests, the star condition, and the exhaustive
//! small-case driver that certifies the exact learners.

use serde::Serialize;

use crate::exact::{baseline_learn, ceil_log2, shuffled_monotone_learn_with};
use crate::geometry::{GeometricHypothesis, PointSet};
use crate::instance::{ShuffledInstance, ThresholdHypothesis};
use crate::oracle::{LabelOracle, LabelSource};
use crate::ror::TieBreak;
use crate::trace::NoopObserver;

/// Distance from a rank-indexed bit vector to the closest monotone vector,
/// with the achieving step function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneDistanceResult {
    pub mismatches: usize,
    pub n: usize,
    /// The nearest monotone vector (0-prefix then 1-suffix).
    pub witness: Vec<bool>,
    /// Step threshold of the witness: first rank labeled 1 (n+1 if none).
    pub witness_threshold: usize,
}

impl MonotoneDistanceResult {
    pub fn distance(&self) -> f64 {
        self.mismatches as f64 / self.n as f64
    }
}

/// Minimum Hamming distance from `f` (indexed by rank - 1) to the monotone
/// class, via prefix sums over all n+1 step positions. Ties go to the
/// smallest threshold.
pub fn monotone_distance(f: &[bool]) -> MonotoneDistanceResult {
    let n = f.len();
    assert!(n >= 1);
    let total_ones: usize = f.iter().filter(|&&b| b).count();
    let mut ones_before = 0usize; // ones among ranks < j
    let mut best = (usize::MAX, 0usize);
    for j in 1..=n + 1 {
        if j >= 2 && f[j - 2] {
            ones_before += 1;
        }
        // zeros at ranks >= j = (n - j + 1) - ones at ranks >= j
        let ones_after = total_ones - ones_before;
        let cost = ones_before + (n - (j - 1) - ones_after);
        if cost < best.0 {
            best = (cost, j);
        }
    }
    let (mismatches, j) = best;
    let witness: Vec<bool> = (1..=n).map(|r| r >= j).collect();
    debug_assert_eq!(
        witness.iter().zip(f).filter(|(a, b)| a != b).count(),
        mismatches
    );
    MonotoneDistanceResult { mismatches, n, witness, witness_threshold: j }
}

/// True iff the labeling has no rank-adjacent (1, 0) pair under sigma_dir.
pub fn is_monotone_under(labeling: &[bool], inst: &ShuffledInstance, dir: usize) -> bool {
    let n = inst.n();
    let mut prev = false;
    for r in 1..=n {
        let b = labeling[inst.element_at(dir, r)];
        if prev && !b {
            return false;
        }
        prev = b;
    }
    true
}

/// All threshold hypotheses whose evaluation equals `labeling` everywhere.
/// For each direction the labeling admits at most one threshold, found by a
/// boundary scan; O(D n) total.
pub fn consistent_hypotheses(
    inst: &ShuffledInstance,
    labeling: &[bool],
) -> Vec<ThresholdHypothesis> {
    let n = inst.n();
    let mut out = Vec::new();
    for i in inst.directions() {
        if !is_monotone_under(labeling, inst, i) {
            continue;
        }
        let j = (1..=n)
            .find(|&r| labeling[inst.element_at(i, r)])
            .unwrap_or(n + 1);
        out.push(ThresholdHypothesis::new(i, j));
    }
    out
}

/// Draws `s` ranks i.i.d. uniform and reports whether the sample exhibits a
/// monotonicity violation: two sampled ranks p < q with f(p) = 1, f(q) = 0.
pub fn violation_sample_test(
    f: &[bool],
    s: usize,
    rng: &mut rand_chacha::ChaCha20Rng,
) -> bool {
    use rand::Rng;
    assert!(s >= 2);
    let n = f.len();
    let mut min_one = usize::MAX;
    let mut max_zero = 0usize;
    for _ in 0..s {
        let r = rng.random_range(1..=n);
        if f[r - 1] {
            min_one = min_one.min(r);
        } else {
            max_zero = max_zero.max(r);
        }
    }
    min_one < max_zero
}

/// Star condition: h_0 disagrees with h_i exactly on x_i, for all i, j.
/// `hypotheses` lists h_0 first, then h_1..h_s aligned with the points.
pub fn verify_star_condition(
    points: &PointSet,
    hypotheses: &[GeometricHypothesis],
) -> Result<bool, crate::error::InstanceError> {
    let s = points.len();
    if hypotheses.len() != s + 1 {
        return Err(crate::error::InstanceError::DimensionMismatch {
            points: s + 1,
            directions: hypotheses.len(),
        });
    }
    let h0 = &hypotheses[0];
    for (i, hi) in hypotheses.iter().enumerate().skip(1) {
        for j in 1..=s {
            let x = points.point(j - 1);
            let disagree = h0.evaluate(x) != hi.evaluate(x);
            if disagree != (i == j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One failed case of the exhaustive sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ExhaustiveFailure {
    pub n: usize,
    pub d: usize,
    pub permutation: Vec<usize>,
    pub istar: usize,
    pub jstar: usize,
    pub learner: String,
    pub detail: String,
}

/// Report of the exhaustive small-case verification.
#[derive(Debug, Clone, Serialize)]
pub struct ExhaustiveReport {
    pub cases: usize,
    pub failures: Vec<ExhaustiveFailure>,
    pub max_queries_seen: usize,
}

impl ExhaustiveReport {
    pub fn all_exact(&self) -> bool {
        self.failures.is_empty()
    }
}

fn permutations_of(n: usize) -> Vec<Vec<usize>> {
    // Rank arrays over n elements; fine for n <= 6.
    let mut out = Vec::new();
    let mut ranks: Vec<usize> = (1..=n).collect();
    heap_permute(&mut ranks, n, &mut out);
    out
}

fn heap_permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(v.clone());
        return;
    }
    for i in 0..k {
        heap_permute(v, k - 1, out);
        if k.is_multiple_of(2) {
            v.swap(i, k - 1);
        } else {
            v.swap(0, k - 1);
        }
    }
}

/// Enumerates every instance with sigma_1 = identity and the remaining
/// permutations ranging over all n! rank arrays (a relabeling argument makes
/// fixing sigma_1 lossless), plants every hypothesis h^{(i)}_j, and runs
/// both exact learners under both tie-breaking disciplines. Returns the
/// failure list (expected empty) and the maximum distinct-query count seen.
pub fn exhaustive_verify_exact(n_max: usize, d_max: usize) -> ExhaustiveReport {
    assert!(n_max <= 6 && d_max <= 2, "full enumeration is only feasible small");
    let mut cases = 0usize;
    let mut failures = Vec::new();
    let mut max_queries = 0usize;
    for n in 1..=n_max {
        let identity: Vec<usize> = (1..=n).collect();
        for d in 1..=d_max {
            let seconds: Vec<Vec<usize>> = if d == 1 {
                vec![Vec::new()]
            } else {
                permutations_of(n)
            };
            for second in &seconds {
                let mut perms = vec![identity.clone()];
                if d == 2 {
                    perms.push(second.clone());
                }
                let inst = ShuffledInstance::from_permutations(perms).unwrap();
                for istar in 1..=d {
                    for jstar in 1..=n + 1 {
                        cases += 1;
                        let truth = ThresholdHypothesis::new(istar, jstar).labeling(&inst);
                        for tie in [TieBreak::Smallest, TieBreak::Largest] {
                            let mut oracle = LabelOracle::new(truth.clone());
                            let got = shuffled_monotone_learn_with(
                                &mut oracle,
                                &inst,
                                tie,
                                &mut NoopObserver,
                            );
                            max_queries = max_queries.max(oracle.distinct_queries());
                            if got.as_deref() != Ok(&truth[..]) {
                                failures.push(ExhaustiveFailure {
                                    n,
                                    d,
                                    permutation: second.clone(),
                                    istar,
                                    jstar,
                                    learner: format!("shuffled_monotone({tie:?})"),
                                    detail: format!("{got:?}"),
                                });
                            }
                        }
                        let mut oracle = LabelOracle::new(truth.clone());
                        let got = baseline_learn(&mut oracle, &inst);
                        let budget =
                            n.min(d * (ceil_log2(n + 2) + 1) + d);
                        if oracle.distinct_queries() > budget {
                            failures.push(ExhaustiveFailure {
                                n,
                                d,
                                permutation: second.clone(),
                                istar,
                                jstar,
                                learner: "baseline(budget)".into(),
                                detail: format!(
                                    "{} queries > {budget}",
                                    oracle.distinct_queries()
                                ),
                            });
                        }
                        max_queries = max_queries.max(oracle.distinct_queries());
                        if got.as_deref() != Ok(&truth[..]) {
                            failures.push(ExhaustiveFailure {
                                n,
                                d,
                                permutation: second.clone(),
                                istar,
                                jstar,
                                learner: "baseline".into(),
                                detail: format!("{got:?}"),
                            });
                        }
                    }
                }
            }
        }
    }
    ExhaustiveReport { cases, failures, max_queries_seen: max_queries }
}
