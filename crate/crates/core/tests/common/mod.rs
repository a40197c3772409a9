//! Shared instrumentation for the integration and acceptance suites.

use shuffled_monotone::exact::SearchState;
use shuffled_monotone::instance::{PlantedTruth, ShuffledInstance};
use shuffled_monotone::trace::{LearnObserver, StepOutcome};

/// Observer that checks the learner's invariants against a planted truth:
/// the loop invariant (i* live implies the boundary pair is live, or the
/// truth is already a candidate), the per-call query budget, the reduction
/// size bound, and the correctness of labels claimed for removed elements.
pub struct InvariantProbe<'a> {
    inst: &'a ShuffledInstance,
    truth: &'a PlantedTruth,
    truth_in_candidates: bool,
    premises_live: bool,
    pub checkpoints: usize,
    pub invariant_violations: usize,
    pub subroutine_calls: usize,
    pub max_delta: usize,
    pub budget_violations: usize,
    pub reduced_size_violations: usize,
    pub label_violations: usize,
    pub boundary_pair_violations: usize,
    pub rule_out_istar: usize,
    pub last_resort_calls: usize,
}

impl<'a> InvariantProbe<'a> {
    pub fn new(inst: &'a ShuffledInstance, truth: &'a PlantedTruth) -> Self {
        Self {
            inst,
            truth,
            truth_in_candidates: false,
            premises_live: false,
            checkpoints: 0,
            invariant_violations: 0,
            subroutine_calls: 0,
            max_delta: 0,
            budget_violations: 0,
            reduced_size_violations: 0,
            label_violations: 0,
            boundary_pair_violations: 0,
            rule_out_istar: 0,
            last_resort_calls: 0,
        }
    }

    pub fn clean(&self) -> bool {
        self.invariant_violations == 0
            && self.budget_violations == 0
            && self.reduced_size_violations == 0
            && self.label_violations == 0
            && self.boundary_pair_violations == 0
            && self.rule_out_istar == 0
    }

    fn check(&mut self, state: &SearchState) {
        if self.truth.is_constant() {
            return;
        }
        let Some(istar) = self.truth.monotone_index else {
            return;
        };
        self.checkpoints += 1;
        let pair_live = {
            let lo = self.truth.boundary_low.unwrap();
            let hi = self.truth.boundary_high.unwrap();
            state.remap.binary_search(&lo).is_ok() && state.remap.binary_search(&hi).is_ok()
        };
        self.premises_live = state.live.contains(&istar) && pair_live;
        if self.premises_live {
            return;
        }
        if !self.truth_in_candidates {
            self.truth_in_candidates = state
                .candidates
                .iter()
                .any(|h| h.labeling(self.inst) == self.truth.labeling);
        }
        if !self.truth_in_candidates {
            self.invariant_violations += 1;
        }
    }
}

impl LearnObserver for InvariantProbe<'_> {
    fn loop_start(&mut self, state: &SearchState) {
        self.check(state);
    }

    fn loop_end(&mut self, state: &SearchState) {
        self.check(state);
    }

    fn subroutine(
        &mut self,
        z_before: usize,
        _case: u8,
        _queried: &[usize],
        outcome: &StepOutcome,
        distinct_delta: usize,
        last_resort: bool,
    ) {
        self.subroutine_calls += 1;
        self.max_delta = self.max_delta.max(distinct_delta);
        if distinct_delta > 3 {
            self.budget_violations += 1;
        }
        if last_resort {
            self.last_resort_calls += 1;
        }
        let istar = self.truth.monotone_index;
        match outcome {
            StepOutcome::RuleOut { index } => {
                if self.premises_live && Some(*index) == istar {
                    self.rule_out_istar += 1;
                }
            }
            StepOutcome::BoundaryPair { index, low, high } => {
                if self.premises_live && Some(*index) == istar {
                    let ok = self.truth.boundary_low == Some(*low)
                        && self.truth.boundary_high == Some(*high);
                    if !ok {
                        self.boundary_pair_violations += 1;
                    }
                }
            }
            StepOutcome::Reduced { kept, removed } => {
                if *kept > (2 * z_before).div_ceil(3) {
                    self.reduced_size_violations += 1;
                }
                if self.premises_live {
                    for &(x, label) in removed {
                        if self.truth.labeling[x] != label
                            || self.truth.boundary_low == Some(x)
                            || self.truth.boundary_high == Some(x)
                        {
                            self.label_violations += 1;
                        }
                    }
                }
            }
        }
    }
}

/// Ordinary least squares for y ~ b0 + b1 x1 + b2 x2 via normal equations.
pub fn fit_two_features(xs: &[(f64, f64)], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for (&(x1, x2), &y) in xs.iter().zip(ys) {
        let row = [1.0, x1, x2];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += row[i] * row[j];
            }
            b[i] += row[i] * y;
        }
    }
    let _ = n;
    // Gaussian elimination with partial pivoting.
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&p, &q| m[p][col].abs().partial_cmp(&m[q][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        let d = m[col][col];
        assert!(d.abs() > 1e-12, "singular design matrix");
        for j in col..4 {
            m[col][j] /= d;
        }
        for row in 0..3 {
            if row != col {
                let f = m[row][col];
                for j in col..4 {
                    m[row][j] -= f * m[col][j];
                }
            }
        }
    }
    (m[0][3], m[1][3], m[2][3])
}
