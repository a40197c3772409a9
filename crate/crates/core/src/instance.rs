//! Problem data model: element sets with D rank permutations, threshold
//! hypotheses over them, and planted ground truths.
//!
//! Elements carry dense ids `0..n-1`, stable across every permutation.
//! Ranks are 1-based (`1..=n`) and direction indices are 1-based (`1..=D`),
//! matching the convention used by the learners and the JSON format.

use crate::error::InstanceError;

/// A ground set of `n` elements together with `D` permutations, each given
/// both as a rank map (element id -> rank) and its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffledInstance {
    n: usize,
    /// `rank[i][x]` = rank of element `x` under sigma_{i+1}, in `1..=n`.
    rank: Vec<Vec<usize>>,
    /// `inv[i][r-1]` = element of rank `r` under sigma_{i+1}.
    inv: Vec<Vec<usize>>,
}

impl ShuffledInstance {
    /// Builds an instance from rank arrays. `perms[i][x]` must be a bijection
    /// onto `1..=n` for every `i`.
    pub fn from_permutations(perms: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        if perms.is_empty() {
            return Err(InstanceError::EmptyDirectionSet);
        }
        let n = perms[0].len();
        if n == 0 {
            return Err(InstanceError::EmptyPointSet);
        }
        let mut inv = Vec::with_capacity(perms.len());
        for (i, p) in perms.iter().enumerate() {
            if p.len() != n {
                return Err(InstanceError::NotBijection { index: i + 1 });
            }
            let mut seen = vec![usize::MAX; n];
            for (x, &r) in p.iter().enumerate() {
                if r < 1 || r > n || seen[r - 1] != usize::MAX {
                    return Err(InstanceError::NotBijection { index: i + 1 });
                }
                seen[r - 1] = x;
            }
            inv.push(seen);
        }
        Ok(Self { n, rank: perms, inv })
    }

    /// The instance with `d` copies of the identity permutation.
    pub fn identity(n: usize, d: usize) -> Self {
        let perm: Vec<usize> = (1..=n).collect();
        Self::from_permutations(vec![perm; d]).expect("identity is a bijection")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of permutations, `D`.
    pub fn num_directions(&self) -> usize {
        self.rank.len()
    }

    /// Iterator over direction indices `1..=D`.
    pub fn directions(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.num_directions()
    }

    /// Rank of element `x` under sigma_dir (`dir` is 1-based).
    #[inline]
    pub fn rank_of(&self, dir: usize, x: usize) -> usize {
        self.rank[dir - 1][x]
    }

    /// Element of rank `r` under sigma_dir.
    #[inline]
    pub fn element_at(&self, dir: usize, r: usize) -> usize {
        self.inv[dir - 1][r - 1]
    }

    /// Raw rank array for direction `dir`.
    pub fn rank_array(&self, dir: usize) -> &[usize] {
        &self.rank[dir - 1]
    }

    pub fn check_direction(&self, dir: usize) -> Result<(), InstanceError> {
        if dir < 1 || dir > self.num_directions() {
            return Err(InstanceError::DirectionOutOfRange {
                index: dir,
                d: self.num_directions(),
            });
        }
        Ok(())
    }

    /// Restricts the instance to the element subset `keep`, compacting each
    /// permutation's ranks to `1..=keep.len()` while preserving relative
    /// order. Returns the restricted instance and the remap taking new ids to
    /// old ids (new ids are assigned in ascending old-id order).
    pub fn restrict(&self, keep: &[usize]) -> Result<(Self, Vec<usize>), InstanceError> {
        if keep.is_empty() {
            return Err(InstanceError::EmptyRestriction);
        }
        let mut remap: Vec<usize> = keep.to_vec();
        remap.sort_unstable();
        remap.dedup();
        if let Some(&id) = remap.iter().find(|&&id| id >= self.n) {
            return Err(InstanceError::ElementOutOfRange { id, n: self.n });
        }
        let m = remap.len();
        let mut new_id = vec![usize::MAX; self.n];
        for (new, &old) in remap.iter().enumerate() {
            new_id[old] = new;
        }
        let mut rank = vec![vec![0usize; m]; self.num_directions()];
        let mut inv = vec![vec![0usize; m]; self.num_directions()];
        // Walk each permutation in rank order, keeping members; this
        // compacts ranks while preserving relative order in O(D n).
        for i in 0..self.num_directions() {
            let mut r0 = 0usize;
            for &old in &self.inv[i] {
                let new = new_id[old];
                if new != usize::MAX {
                    rank[i][new] = r0 + 1;
                    inv[i][r0] = new;
                    r0 += 1;
                }
            }
            debug_assert_eq!(r0, m);
        }
        Ok((Self { n: m, rank, inv }, remap))
    }
}

/// The hypothesis h^{(i)}_j: labels `x` as 1 iff sigma_i(x) >= j.
///
/// `threshold` ranges over `1..=n+1`; `j = 1` is the all-one labeling and
/// `j = n + 1` the all-zero labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThresholdHypothesis {
    /// Direction index in `1..=D`.
    pub direction: usize,
    /// Threshold rank in `1..=n+1`.
    pub threshold: usize,
}

impl ThresholdHypothesis {
    pub fn new(direction: usize, threshold: usize) -> Self {
        Self { direction, threshold }
    }

    #[inline]
    pub fn evaluate(&self, inst: &ShuffledInstance, x: usize) -> bool {
        inst.rank_of(self.direction, x) >= self.threshold
    }

    /// Full labeling of the instance under this hypothesis.
    pub fn labeling(&self, inst: &ShuffledInstance) -> Vec<bool> {
        (0..inst.n()).map(|x| self.evaluate(inst, x)).collect()
    }

    pub fn validate(&self, inst: &ShuffledInstance) -> Result<(), InstanceError> {
        inst.check_direction(self.direction)?;
        if self.threshold < 1 || self.threshold > inst.n() + 1 {
            return Err(InstanceError::ElementOutOfRange {
                id: self.threshold,
                n: inst.n() + 1,
            });
        }
        Ok(())
    }
}

/// Ground-truth record attached to generated instances. Used only by
/// generators and instrumented tests, never by the learners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedTruth {
    pub labeling: Vec<bool>,
    /// Index i* under which the labeling is monotone, when planted.
    pub monotone_index: Option<usize>,
    /// Maximum-rank 0-labeled element under sigma_{i*} (`None` iff constant).
    pub boundary_low: Option<usize>,
    /// Minimum-rank 1-labeled element under sigma_{i*} (`None` iff constant).
    pub boundary_high: Option<usize>,
}

impl PlantedTruth {
    /// Builds the truth record for the planted hypothesis h^{(i*)}_{j*}.
    pub fn from_hypothesis(
        inst: &ShuffledInstance,
        istar: usize,
        jstar: usize,
    ) -> Result<Self, InstanceError> {
        inst.check_direction(istar)?;
        let n = inst.n();
        if jstar < 1 || jstar > n + 1 {
            return Err(InstanceError::ElementOutOfRange { id: jstar, n: n + 1 });
        }
        let labeling = ThresholdHypothesis::new(istar, jstar).labeling(inst);
        let (lo, hi) = if jstar == 1 || jstar == n + 1 {
            (None, None)
        } else {
            (
                Some(inst.element_at(istar, jstar - 1)),
                Some(inst.element_at(istar, jstar)),
            )
        };
        Ok(Self {
            labeling,
            monotone_index: Some(istar),
            boundary_low: lo,
            boundary_high: hi,
        })
    }

    pub fn is_constant(&self) -> bool {
        self.labeling.iter().all(|&b| b) || self.labeling.iter().all(|&b| !b)
    }

    /// Checks the structural invariants against an instance.
    pub fn validate(&self, inst: &ShuffledInstance) -> Result<(), InstanceError> {
        if self.labeling.len() != inst.n() {
            return Err(InstanceError::BadPlant(format!(
                "labeling length {} != n {}",
                self.labeling.len(),
                inst.n()
            )));
        }
        let Some(istar) = self.monotone_index else {
            return Ok(());
        };
        inst.check_direction(istar)?;
        let mut prev = false;
        for r in 1..=inst.n() {
            let b = self.labeling[inst.element_at(istar, r)];
            if prev && !b {
                return Err(InstanceError::BadPlant(format!(
                    "labeling not monotone under sigma_{istar}"
                )));
            }
            prev = b;
        }
        if self.is_constant() {
            if self.boundary_low.is_some() || self.boundary_high.is_some() {
                return Err(InstanceError::BadPlant(
                    "constant labeling with boundary elements".into(),
                ));
            }
            return Ok(());
        }
        let (Some(lo), Some(hi)) = (self.boundary_low, self.boundary_high) else {
            return Err(InstanceError::BadPlant(
                "non-constant labeling without boundary elements".into(),
            ));
        };
        let rl = inst.rank_of(istar, lo);
        let rh = inst.rank_of(istar, hi);
        if rh != rl + 1 || self.labeling[lo] || !self.labeling[hi] {
            return Err(InstanceError::BadPlant(format!(
                "boundary pair ranks ({rl}, {rh}) or labels wrong"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_inverse_agree() {
        let inst =
            ShuffledInstance::from_permutations(vec![vec![2, 1, 3], vec![3, 2, 1]]).unwrap();
        for i in inst.directions() {
            for x in 0..3 {
                assert_eq!(inst.element_at(i, inst.rank_of(i, x)), x);
            }
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(ShuffledInstance::from_permutations(vec![vec![1, 1, 3]]).is_err());
        assert!(ShuffledInstance::from_permutations(vec![vec![0, 1, 2]]).is_err());
        assert!(ShuffledInstance::from_permutations(vec![vec![1, 2, 4]]).is_err());
    }

    #[test]
    fn threshold_extremes() {
        let inst = ShuffledInstance::identity(4, 1);
        let all_one = ThresholdHypothesis::new(1, 1);
        let all_zero = ThresholdHypothesis::new(1, 5);
        for x in 0..4 {
            assert!(all_one.evaluate(&inst, x));
            assert!(!all_zero.evaluate(&inst, x));
        }
        // n=4, sigma_1 = id, j = 3: rank 3 -> 1, rank 2 -> 0.
        let h = ThresholdHypothesis::new(1, 3);
        assert!(h.evaluate(&inst, 2));
        assert!(!h.evaluate(&inst, 1));
    }

    #[test]
    fn restrict_identity_is_identity() {
        let inst =
            ShuffledInstance::from_permutations(vec![vec![2, 1, 3], vec![3, 2, 1]]).unwrap();
        let (r, remap) = inst.restrict(&[0, 1, 2]).unwrap();
        assert_eq!(r, inst);
        assert_eq!(remap, vec![0, 1, 2]);
    }

    #[test]
    fn restrict_compacts_ranks_preserving_order() {
        // n=5, sigma_1 ranks = identity; keep elements ranked {2, 4, 5}.
        let inst = ShuffledInstance::identity(5, 1);
        let (r, remap) = inst.restrict(&[1, 3, 4]).unwrap();
        assert_eq!(r.n(), 3);
        assert_eq!(remap, vec![1, 3, 4]);
        assert_eq!(r.rank_array(1), &[1, 2, 3]);
    }

    #[test]
    fn restrict_empty_errors() {
        let inst = ShuffledInstance::identity(3, 1);
        assert!(matches!(
            inst.restrict(&[]),
            Err(InstanceError::EmptyRestriction)
        ));
    }

    #[test]
    fn planted_truth_roundtrip() {
        let inst =
            ShuffledInstance::from_permutations(vec![vec![2, 1, 3], vec![3, 2, 1]]).unwrap();
        for i in inst.directions() {
            for j in 1..=inst.n() + 1 {
                let t = PlantedTruth::from_hypothesis(&inst, i, j).unwrap();
                t.validate(&inst).unwrap();
            }
        }
    }
}
