//! Deterministic exact learners: candidate elimination, the D-independent
//! binary-search baseline, and the optimal learner built on the three-query
//! subroutine.

use std::collections::HashMap;

use crate::error::LearnError;
use crate::instance::{ShuffledInstance, ThresholdHypothesis};
use crate::oracle::{LabelSource, Remapped};
use crate::ror::{remove_or_reduce, SubroutineOutcome, TieBreak, WindowFamily};
use crate::trace::{DropReason, LearnObserver, NoopObserver, StepOutcome};

/// Smallest k with 2^k >= x (x >= 1).
pub fn ceil_log2(x: usize) -> usize {
    assert!(x >= 1);
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

/// Oracle wrapper that remembers every bit the learner observed, for the
/// final consistency check against the returned labeling.
pub(crate) struct Recorder<'a, L: LabelSource> {
    inner: &'a mut L,
    pub(crate) seen: HashMap<usize, bool>,
}

impl<'a, L: LabelSource> Recorder<'a, L> {
    pub(crate) fn new(inner: &'a mut L) -> Self {
        Self { inner, seen: HashMap::new() }
    }
}

impl<L: LabelSource> LabelSource for Recorder<'_, L> {
    fn query(&mut self, x: usize) -> bool {
        let b = self.inner.query(x);
        self.seen.insert(x, b);
        b
    }

    fn distinct_queries(&self) -> usize {
        self.inner.distinct_queries()
    }
}

fn pack_bits(bits: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 64] |= 1u64 << (i % 64);
        }
    }
    out
}

/// Smallest position where two packed labelings differ.
fn first_diff(a: &[u64], b: &[u64], n: usize) -> Option<usize> {
    for (w, (&x, &y)) in a.iter().zip(b).enumerate() {
        let d = x ^ y;
        if d != 0 {
            let pos = w * 64 + d.trailing_zeros() as usize;
            return (pos < n).then_some(pos);
        }
    }
    None
}

/// Candidate elimination: queries an element where two surviving candidates
/// disagree (the smallest such id) and discards every candidate that
/// mismatches the observed bit, until all survivors agree. Uses at most |C|
/// queries; if the oracle's labeling is in C, that labeling is returned.
pub fn contender<L: LabelSource>(
    oracle: &mut L,
    hypotheses: &[ThresholdHypothesis],
    inst: &ShuffledInstance,
) -> Result<Vec<bool>, LearnError> {
    if hypotheses.is_empty() {
        return Err(LearnError::EmptyCandidates);
    }
    let n = inst.n();
    let labelings: Vec<Vec<bool>> = hypotheses.iter().map(|h| h.labeling(inst)).collect();
    let packed: Vec<Vec<u64>> = labelings.iter().map(|l| pack_bits(l)).collect();
    let mut live: Vec<usize> = (0..hypotheses.len()).collect();
    loop {
        let lead = live[0];
        let disagreement = live[1..]
            .iter()
            .filter_map(|&k| first_diff(&packed[lead], &packed[k], n))
            .min();
        let Some(x) = disagreement else {
            return Ok(labelings[lead].clone());
        };
        let bit = oracle.query(x);
        live.retain(|&k| labelings[k][x] == bit);
        debug_assert!(!live.is_empty(), "matching candidates survive each query");
    }
}

/// The simple learner: one binary search per permutation (with virtual
/// sentinels at ranks 0 and n+1), then candidate elimination. Falls back to
/// querying everything when n is small. At most
/// min(n, D * (ceil(log2(n + 2)) + 1) + D) distinct queries.
pub fn baseline_learn<L: LabelSource>(
    oracle: &mut L,
    inst: &ShuffledInstance,
) -> Result<Vec<bool>, LearnError> {
    let n = inst.n();
    let d = inst.num_directions();
    let mut rec = Recorder::new(oracle);
    if n < d * ceil_log2(n + 2) {
        return Ok((0..n).map(|x| rec.query(x)).collect());
    }
    let mut candidates = Vec::with_capacity(d);
    for i in inst.directions() {
        // Invariant: label at rank lo is 0, at rank hi is 1 (sentinels).
        let (mut lo, mut hi) = (0usize, n + 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if rec.query(inst.element_at(i, mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        candidates.push(ThresholdHypothesis::new(i, lo + 1));
    }
    let result = contender(&mut rec, &candidates, inst)?;
    for (&x, &bit) in &rec.seen {
        if result[x] != bit {
            return Err(LearnError::NotRealizable);
        }
    }
    Ok(result)
}

/// Live learner state: surviving permutation indices, the restricted
/// instance with its id remap back to the original element space, the
/// candidate hypotheses gathered so far (in original ranks), and the labels
/// learned for elements removed from the live set.
pub struct SearchState {
    pub live: Vec<usize>,
    pub instance: ShuffledInstance,
    /// Restricted id -> original id.
    pub remap: Vec<usize>,
    pub candidates: Vec<ThresholdHypothesis>,
    /// Original id -> learned label, for elements outside the live set.
    pub learned: HashMap<usize, bool>,
}

pub(crate) enum LoopExit {
    Constant(bool),
    Finished(SearchState),
}

/// Runs line 4 and the probe/subroutine loop until |Z| <= z_floor or the
/// live set empties. Shared by the exact and the epsilon-exact learners.
pub(crate) fn learn_loop<L: LabelSource>(
    rec: &mut Recorder<'_, L>,
    inst: &ShuffledInstance,
    z_floor: usize,
    tie: TieBreak,
    observer: &mut dyn LearnObserver,
) -> LoopExit {
    let n = inst.n();
    let d = inst.num_directions();

    let mut endpoint_ids = Vec::with_capacity(2 * d);
    for i in inst.directions() {
        endpoint_ids.push(inst.element_at(i, 1));
        endpoint_ids.push(inst.element_at(i, n));
    }
    let bits: Vec<bool> = endpoint_ids.iter().map(|&x| rec.query(x)).collect();
    if bits.iter().all(|&b| b == bits[0]) {
        observer.constant_check(&endpoint_ids, Some(bits[0]));
        return LoopExit::Constant(bits[0]);
    }
    observer.constant_check(&endpoint_ids, None);

    let mut state = SearchState {
        live: (1..=d).collect(),
        instance: inst.clone(),
        remap: (0..n).collect(),
        candidates: Vec::new(),
        learned: HashMap::new(),
    };

    while state.instance.n() > z_floor && !state.live.is_empty() {
        observer.loop_start(&state);
        let k = match tie {
            TieBreak::Smallest => state.live[0],
            TieBreak::Largest => *state.live.last().unwrap(),
        };
        let nz = state.instance.n();
        let probe_ranks = [1, nz.div_ceil(3), (2 * nz).div_ceil(3), nz];
        let probe_ids: Vec<usize> =
            probe_ranks.iter().map(|&r| state.instance.element_at(k, r)).collect();
        let probe_orig: Vec<usize> = probe_ids.iter().map(|&x| state.remap[x]).collect();
        let probe_bits: Vec<bool> = probe_orig.iter().map(|&x| rec.query(x)).collect();
        observer.probes(k, &probe_orig);

        if probe_bits[0] || !probe_bits[3] {
            state.live.retain(|&i| i != k);
            observer.index_dropped(k, DropReason::EndpointViolation);
            continue;
        }

        // Window per live index: a = max-rank 0-probe, b = min-rank 1-probe.
        let mut windows = std::collections::BTreeMap::new();
        let mut inverted: Option<usize> = None;
        for &i in &state.live {
            let mut a = 0usize;
            let mut b = usize::MAX;
            for (&x, &bit) in probe_ids.iter().zip(&probe_bits) {
                let r = state.instance.rank_of(i, x);
                if bit {
                    b = b.min(r);
                } else {
                    a = a.max(r);
                }
            }
            if a > b {
                inverted = match (inverted, tie) {
                    (None, _) => Some(i),
                    (Some(j), TieBreak::Smallest) => Some(j.min(i)),
                    (Some(j), TieBreak::Largest) => Some(j.max(i)),
                };
            } else {
                windows.insert(i, (a, b));
            }
        }
        if let Some(i) = inverted {
            state.live.retain(|&j| j != i);
            observer.index_dropped(i, DropReason::ProbeInversion);
            continue;
        }
        let w = WindowFamily::new(windows, nz).expect("probe windows are valid");

        let before = rec.distinct_queries();
        let (outcome, report) = {
            let mut view = Remapped::new(rec, &state.remap);
            remove_or_reduce(&mut view, &state.instance, &state.live, &w, tie)
                .expect("window family covers the live set")
        };
        let delta = rec.distinct_queries() - before;
        let queried_orig: Vec<usize> = report.queried.iter().map(|&x| state.remap[x]).collect();

        match outcome {
            SubroutineOutcome::RuleOut { index } => {
                state.live.retain(|&j| j != index);
                observer.subroutine(
                    nz,
                    report.case,
                    &queried_orig,
                    &StepOutcome::RuleOut { index },
                    delta,
                    report.last_resort,
                );
            }
            SubroutineOutcome::BoundaryPair { index, low, high } => {
                state.live.retain(|&j| j != index);
                let orig_high = state.remap[high];
                state
                    .candidates
                    .push(ThresholdHypothesis::new(index, inst.rank_of(index, orig_high)));
                observer.subroutine(
                    nz,
                    report.case,
                    &queried_orig,
                    &StepOutcome::BoundaryPair {
                        index,
                        low: state.remap[low],
                        high: orig_high,
                    },
                    delta,
                    report.last_resort,
                );
            }
            SubroutineOutcome::Reduced { keep, removed } => {
                let removed_orig: Vec<(usize, bool)> =
                    removed.iter().map(|&(x, b)| (state.remap[x], b)).collect();
                for &(x, b) in &removed_orig {
                    state.learned.insert(x, b);
                }
                let (next, submap) =
                    state.instance.restrict(&keep).expect("reduced set nonempty");
                state.remap = submap.iter().map(|&k2| state.remap[k2]).collect();
                state.instance = next;
                observer.subroutine(
                    nz,
                    report.case,
                    &queried_orig,
                    &StepOutcome::Reduced { kept: keep.len(), removed: removed_orig },
                    delta,
                    report.last_resort,
                );
            }
        }
    }
    observer.loop_end(&state);
    LoopExit::Finished(state)
}

/// Tail phase: query every remaining element and harvest one boundary-pair
/// candidate per surviving index (the lowest-rank adjacent 0/1 pair).
pub(crate) fn harvest_tail<L: LabelSource>(
    rec: &mut Recorder<'_, L>,
    inst: &ShuffledInstance,
    state: &mut SearchState,
    observer: &mut dyn LearnObserver,
) {
    let m = state.instance.n();
    let labels: Vec<bool> = (0..m).map(|x| rec.query(state.remap[x])).collect();
    observer.tail(&state.remap);
    for &i in &state.live {
        for r in 1..m {
            let x = state.instance.element_at(i, r);
            let y = state.instance.element_at(i, r + 1);
            if !labels[x] && labels[y] {
                let orig_y = state.remap[y];
                state
                    .candidates
                    .push(ThresholdHypothesis::new(i, inst.rank_of(i, orig_y)));
                break;
            }
        }
    }
}

/// The optimal exact learner. Exactly recovers any labeling that is
/// monotone under one of the instance's permutations, using at most
/// 10 D + 12 ceil(log2 n) + 14 distinct queries.
pub fn shuffled_monotone_learn<L: LabelSource>(
    oracle: &mut L,
    inst: &ShuffledInstance,
) -> Result<Vec<bool>, LearnError> {
    shuffled_monotone_learn_with(oracle, inst, TieBreak::Smallest, &mut NoopObserver)
}

/// Exact learner with explicit tie-breaking and an observer.
pub fn shuffled_monotone_learn_with<L: LabelSource>(
    oracle: &mut L,
    inst: &ShuffledInstance,
    tie: TieBreak,
    observer: &mut dyn LearnObserver,
) -> Result<Vec<bool>, LearnError> {
    let n = inst.n();
    let mut rec = Recorder::new(oracle);
    let mut state = match learn_loop(&mut rec, inst, 10, tie, observer) {
        LoopExit::Constant(b) => return Ok(vec![b; n]),
        LoopExit::Finished(state) => state,
    };
    if !state.live.is_empty() {
        harvest_tail(&mut rec, inst, &mut state, observer);
    }
    observer.contender(state.candidates.len());
    if state.candidates.is_empty() {
        return Err(LearnError::NotRealizable);
    }
    let result = contender(&mut rec, &state.candidates, inst)?;
    for (&x, &bit) in &rec.seen {
        if result[x] != bit {
            return Err(LearnError::NotRealizable);
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::LabelOracle;

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(1024), 10);
        assert_eq!(ceil_log2(1025), 11);
    }

    #[test]
    fn contender_single_candidate_no_queries() {
        let inst = ShuffledInstance::identity(4, 1);
        let h = ThresholdHypothesis::new(1, 3);
        let mut oracle = LabelOracle::new(vec![false; 4]);
        let out = contender(&mut oracle, &[h], &inst).unwrap();
        assert_eq!(out, h.labeling(&inst));
        assert_eq!(oracle.distinct_queries(), 0);
    }

    #[test]
    fn contender_constant_pair_one_query() {
        let inst = ShuffledInstance::identity(4, 1);
        let c = [ThresholdHypothesis::new(1, 5), ThresholdHypothesis::new(1, 1)];
        let mut oracle = LabelOracle::new(vec![true; 4]);
        let out = contender(&mut oracle, &c, &inst).unwrap();
        assert_eq!(out, vec![true; 4]);
        assert_eq!(oracle.distinct_queries(), 1);
    }

    #[test]
    fn contender_smallest_disagreement_trace() {
        // C = {(1,3),(1,4),(1,5)} over the identity: 0011 / 0001 / 0000.
        let inst = ShuffledInstance::identity(4, 1);
        let c = [
            ThresholdHypothesis::new(1, 3),
            ThresholdHypothesis::new(1, 4),
            ThresholdHypothesis::new(1, 5),
        ];
        let truth = vec![false, false, true, true];
        let mut oracle = LabelOracle::new(truth.clone());
        let out = contender(&mut oracle, &c, &inst).unwrap();
        assert_eq!(out, truth);
        assert!(oracle.distinct_queries() <= 2);
        // Smallest disagreement between 0011 and 0001 is element 2.
        assert!(oracle.observed().contains_key(&2));
    }

    #[test]
    fn contender_empty_errors() {
        let inst = ShuffledInstance::identity(2, 1);
        let mut oracle = LabelOracle::new(vec![false; 2]);
        assert_eq!(
            contender(&mut oracle, &[], &inst),
            Err(LearnError::EmptyCandidates)
        );
    }

    #[test]
    fn baseline_constant_zero() {
        let inst = ShuffledInstance::identity(16, 2);
        let mut oracle = LabelOracle::new(vec![false; 16]);
        let out = baseline_learn(&mut oracle, &inst).unwrap();
        assert_eq!(out, vec![false; 16]);
    }

    #[test]
    fn baseline_boundary_search() {
        let inst = ShuffledInstance::identity(4, 1);
        let truth = vec![false, false, true, true];
        let mut oracle = LabelOracle::new(truth.clone());
        let out = baseline_learn(&mut oracle, &inst).unwrap();
        assert_eq!(out, truth);
    }

    #[test]
    fn baseline_small_n_queries_everything() {
        // n < D * ceil(log2(n+2)): query-all path, exact even without
        // any monotone permutation.
        let inst = ShuffledInstance::from_permutations(vec![
            vec![1, 2, 3, 4],
            vec![4, 3, 2, 1],
            vec![2, 1, 4, 3],
        ])
        .unwrap();
        let truth = vec![true, false, true, false];
        let mut oracle = LabelOracle::new(truth.clone());
        let out = baseline_learn(&mut oracle, &inst).unwrap();
        assert_eq!(out, truth);
        assert_eq!(oracle.distinct_queries(), 4);
    }

    #[test]
    fn baseline_detects_non_realizable() {
        // Identity and reversal permutations with a single 1 planted mid
        // sequence: monotone under neither, and the surviving candidate
        // conflicts with a bit observed during the searches.
        let n = 64;
        let mut truth = vec![false; n];
        truth[31] = true;
        let rev: Vec<usize> = (0..n).map(|x| n - x).collect();
        let inst =
            ShuffledInstance::from_permutations(vec![(1..=n).collect(), rev]).unwrap();
        let mut oracle = LabelOracle::new(truth);
        assert_eq!(
            baseline_learn(&mut oracle, &inst),
            Err(LearnError::NotRealizable)
        );
    }

    #[test]
    fn exact_constant_truth_halts_at_line4() {
        let inst = ShuffledInstance::identity(5, 2);
        let mut oracle = LabelOracle::new(vec![true; 5]);
        let out = shuffled_monotone_learn(&mut oracle, &inst).unwrap();
        assert_eq!(out, vec![true; 5]);
        assert!(oracle.distinct_queries() <= 4);
    }

    #[test]
    fn exact_small_instance() {
        let inst = ShuffledInstance::identity(8, 1);
        let truth: Vec<bool> = (0..8).map(|x| x >= 4).collect();
        let mut oracle = LabelOracle::new(truth.clone());
        let out = shuffled_monotone_learn(&mut oracle, &inst).unwrap();
        assert_eq!(out, truth);
    }

    #[test]
    fn exact_large_planted() {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        for trial in 0..20 {
            let n = 200 + trial * 37;
            let d = 1 + (trial % 5);
            let mut perms = Vec::new();
            for _ in 0..d {
                let mut ids: Vec<usize> = (0..n).collect();
                ids.shuffle(&mut rng);
                let mut rank = vec![0; n];
                for (r0, &x) in ids.iter().enumerate() {
                    rank[x] = r0 + 1;
                }
                perms.push(rank);
            }
            let inst = ShuffledInstance::from_permutations(perms).unwrap();
            let istar = rng.random_range(1..=d);
            let jstar = rng.random_range(1..=n + 1);
            let truth = ThresholdHypothesis::new(istar, jstar).labeling(&inst);
            let mut oracle = LabelOracle::new(truth.clone());
            let out = shuffled_monotone_learn(&mut oracle, &inst).unwrap();
            assert_eq!(out, truth, "trial {trial} n={n} d={d} j*={jstar}");
            let bound = 10 * d + 12 * ceil_log2(n) + 14;
            assert!(oracle.distinct_queries() <= bound);
        }
    }

    #[test]
    fn exact_largest_tiebreak_also_exact() {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 150;
            let d = 3;
            let mut perms = Vec::new();
            for _ in 0..d {
                let mut ids: Vec<usize> = (0..n).collect();
                ids.shuffle(&mut rng);
                let mut rank = vec![0; n];
                for (r0, &x) in ids.iter().enumerate() {
                    rank[x] = r0 + 1;
                }
                perms.push(rank);
            }
            let inst = ShuffledInstance::from_permutations(perms).unwrap();
            let istar = rng.random_range(1..=d);
            let jstar = rng.random_range(1..=n + 1);
            let truth = ThresholdHypothesis::new(istar, jstar).labeling(&inst);
            let mut oracle = LabelOracle::new(truth.clone());
            let out = shuffled_monotone_learn_with(
                &mut oracle,
                &inst,
                TieBreak::Largest,
                &mut NoopObserver,
            )
            .unwrap();
            assert_eq!(out, truth);
        }
    }
}
