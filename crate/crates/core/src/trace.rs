//! Execution observers: a callback surface the learners report progress
//! through, plus the JSON-lines trace format built on top of it. Tests use
//! custom observers to check invariants; the CLI uses `JsonTrace`.

use serde::{Deserialize, Serialize};

use crate::exact::SearchState;

/// Why an index left the live set outside the subroutine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    /// Probe at rank 1 read 1 or at rank n read 0.
    EndpointViolation,
    /// The four probe labels were not monotone under the permutation.
    ProbeInversion,
}

/// Subroutine outcome lifted to original element ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    RuleOut { index: usize },
    BoundaryPair { index: usize, low: usize, high: usize },
    Reduced { kept: usize, removed: Vec<(usize, bool)> },
}

impl StepOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            StepOutcome::RuleOut { .. } => "rule_out",
            StepOutcome::BoundaryPair { .. } => "boundary_pair",
            StepOutcome::Reduced { .. } => "reduced",
        }
    }
}

/// Callbacks fired by the exact learners. All element ids are original ids.
#[allow(unused_variables)]
pub trait LearnObserver {
    /// Line-4 constant check; `constant` is the label when it fired.
    fn constant_check(&mut self, queried: &[usize], constant: Option<bool>) {}
    /// Before each while-iteration: the invariant checkpoint.
    fn loop_start(&mut self, state: &SearchState) {}
    /// After the loop exits, with the final state.
    fn loop_end(&mut self, state: &SearchState) {}
    /// The four probe queries of one iteration, under permutation `k`.
    fn probes(&mut self, k: usize, queried: &[usize]) {}
    /// An index left the live set at the probe stage.
    fn index_dropped(&mut self, index: usize, reason: DropReason) {}
    /// One subroutine call: live-set size before, executed case, queried
    /// ids, outcome, distinct-query delta, and whether a fallback fired.
    fn subroutine(
        &mut self,
        z_before: usize,
        case: u8,
        queried: &[usize],
        outcome: &StepOutcome,
        distinct_delta: usize,
        last_resort: bool,
    ) {
    }
    /// Tail phase (|Z| <= 10): every remaining element queried.
    fn tail(&mut self, queried: &[usize]) {}
    /// Candidate elimination ran over `candidates` hypotheses.
    fn contender(&mut self, candidates: usize) {}
}

/// The do-nothing observer.
pub struct NoopObserver;

impl LearnObserver for NoopObserver {}

/// One line of the JSON trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    pub phase: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<u8>,
    pub queried: Vec<usize>,
    pub outcome: String,
    pub s_size: usize,
    pub z_size: usize,
}

/// Observer that accumulates `TraceRecord`s, one per step.
#[derive(Default)]
pub struct JsonTrace {
    pub records: Vec<TraceRecord>,
    s_size: usize,
    z_size: usize,
}

impl JsonTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("trace serializes"));
            out.push('\n');
        }
        out
    }

    fn push(&mut self, phase: &str, case: Option<u8>, queried: &[usize], outcome: String) {
        self.records.push(TraceRecord {
            phase: phase.to_string(),
            case,
            queried: queried.to_vec(),
            outcome,
            s_size: self.s_size,
            z_size: self.z_size,
        });
    }
}

impl LearnObserver for JsonTrace {
    fn constant_check(&mut self, queried: &[usize], constant: Option<bool>) {
        let outcome = match constant {
            Some(b) => format!("constant_{}", b as u8),
            None => "mixed".to_string(),
        };
        self.push("constant_check", None, queried, outcome);
    }

    fn loop_start(&mut self, state: &SearchState) {
        self.s_size = state.live.len();
        self.z_size = state.instance.n();
    }

    fn loop_end(&mut self, state: &SearchState) {
        self.s_size = state.live.len();
        self.z_size = state.instance.n();
    }

    fn probes(&mut self, k: usize, queried: &[usize]) {
        self.push("probe", None, queried, format!("k={k}"));
    }

    fn index_dropped(&mut self, index: usize, reason: DropReason) {
        let outcome = match reason {
            DropReason::EndpointViolation => format!("drop_endpoint:{index}"),
            DropReason::ProbeInversion => format!("drop_inversion:{index}"),
        };
        self.push("probe", None, &[], outcome);
    }

    fn subroutine(
        &mut self,
        _z_before: usize,
        case: u8,
        queried: &[usize],
        outcome: &StepOutcome,
        _distinct_delta: usize,
        last_resort: bool,
    ) {
        let mut tag = outcome.tag().to_string();
        if last_resort {
            tag.push_str(":last_resort");
        }
        self.push("subroutine", Some(case), queried, tag);
    }

    fn tail(&mut self, queried: &[usize]) {
        self.push("tail", None, queried, "queried_all".to_string());
    }

    fn contender(&mut self, candidates: usize) {
        self.push("contender", None, &[], format!("candidates={candidates}"));
    }
}
