//! Instance generators: planted random instances, the circle and depth-two
//! lower-bound constructions, the star-number construction, and label
//! corruption. All are pure functions of their parameters and seed.

use std::collections::HashSet;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::InstanceError;
use crate::geometry::{DirectionSet, GeometricHypothesis, PointSet};
use crate::instance::{PlantedTruth, ShuffledInstance};
use crate::rng::{derive_seed, rng_from_seed, stream};

/// Generator output: the instance, its ground truth, and the parameters
/// that produced it.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub instance: ShuffledInstance,
    pub truth: PlantedTruth,
    pub geometry: Option<(PointSet, DirectionSet)>,
    pub metadata: GeneratorMetadata,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorMetadata {
    pub generator: String,
    pub params: Vec<(String, String)>,
    pub seed: u64,
}

/// D independent uniform permutations with a uniformly planted hypothesis
/// h^{(i*)}_{j*}, i* in [1..D], j* in [1..n+1].
pub fn gen_random_shuffled(n: usize, d: usize, seed: u64) -> GeneratedInstance {
    assert!(n >= 1 && d >= 1);
    let mut rng = rng_from_seed(derive_seed(seed, stream::GENERATOR, 0));
    let mut perms = Vec::with_capacity(d);
    let mut ids: Vec<usize> = (0..n).collect();
    for _ in 0..d {
        ids.shuffle(&mut rng);
        let mut rank = vec![0usize; n];
        for (r0, &x) in ids.iter().enumerate() {
            rank[x] = r0 + 1;
        }
        perms.push(rank);
    }
    let instance = ShuffledInstance::from_permutations(perms).expect("shuffles are bijections");
    let istar = rng.random_range(1..=d);
    let jstar = rng.random_range(1..=n + 1);
    let truth = PlantedTruth::from_hypothesis(&instance, istar, jstar).expect("valid plant");
    GeneratedInstance {
        instance,
        truth,
        geometry: None,
        metadata: GeneratorMetadata {
            generator: "random".into(),
            params: vec![("n".into(), n.to_string()), ("D".into(), d.to_string())],
            seed,
        },
    }
}

/// n points on the unit circle with, for each point, a halfspace that labels
/// exactly that point 1: direction = the point itself, threshold halfway
/// between 1 and cos(2 pi / n).
pub fn gen_circle_instance(n: usize) -> (PointSet, Vec<GeometricHypothesis>) {
    assert!(n >= 3);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    let t = ((2.0 * PI / n as f64).cos() + 1.0) / 2.0;
    let hypotheses = points
        .iter()
        .map(|p| GeometricHypothesis::new(p.clone(), t))
        .collect();
    (PointSet::new(points).expect("finite circle points"), hypotheses)
}

/// Information-theoretic adversary for a family of singleton labelings:
/// answering 0 everywhere eliminates at most `max_x #{k : f_k(x)=1}`
/// hypotheses per query, so distinguishing the family needs at least
/// (|family| - 1) / that many queries.
pub fn adversary_queries_needed(labelings: &[Vec<bool>]) -> usize {
    assert!(!labelings.is_empty());
    let n = labelings[0].len();
    let max_eliminated = (0..n)
        .map(|x| labelings.iter().filter(|f| f[x]).count())
        .max()
        .unwrap_or(0)
        .max(1);
    (labelings.len() - 1).div_ceil(max_eliminated)
}

/// The depth-two lower-bound set: points (i, -i) for i in [-m..m], and for
/// each i the labeling of 1(x1 >= i and x2 >= -i), which isolates point i.
pub fn gen_depth_two_hard(m: i64) -> (PointSet, Vec<Vec<bool>>) {
    assert!(m >= 1);
    let coords: Vec<i64> = (-m..=m).collect();
    let points: Vec<Vec<f64>> = coords.iter().map(|&i| vec![i as f64, -i as f64]).collect();
    let labelings = coords
        .iter()
        .map(|&i| {
            coords
                .iter()
                .map(|&j| (j as f64 >= i as f64) && (-j as f64 >= -i as f64))
                .collect()
        })
        .collect();
    (PointSet::new(points).expect("finite grid points"), labelings)
}

/// The star construction for decision stumps: 2d points
/// x_{i,-} = -1 + e_i/2 and x_{i,+} = 1 - e_i/2, with hypotheses
/// [h_0, h_{1,-}, h_{1,+}, ..., h_{d,-}, h_{d,+}] where h_0 thresholds
/// coordinate 1 at 0 and h_{i,+-} threshold coordinate i at +-3/4. No point
/// coordinate ever equals a threshold, so strict and non-strict comparisons
/// agree on these instances.
pub fn gen_star_instance(d: usize) -> (PointSet, Vec<GeometricHypothesis>) {
    assert!(d >= 1);
    let stump = |coord: usize, t: f64| {
        let mut u = vec![0.0; d];
        u[coord] = 1.0;
        GeometricHypothesis::new(u, t)
    };
    let mut points = Vec::with_capacity(2 * d);
    let mut hypotheses = vec![stump(0, 0.0)];
    for i in 0..d {
        let mut minus = vec![-1.0; d];
        minus[i] = -0.5;
        let mut plus = vec![1.0; d];
        plus[i] = 0.5;
        points.push(minus);
        points.push(plus);
        hypotheses.push(stump(i, -0.75));
        hypotheses.push(stump(i, 0.75));
    }
    (PointSet::new(points).expect("finite star points"), hypotheses)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionMode {
    Uniform,
    Boundary,
}

/// Picks the elements whose labels get flipped. Uniform mode flips a random
/// size-`budget` subset; boundary mode flips the elements ranked nearest the
/// planted threshold under sigma_{i*} (nearest first, lower rank on ties).
pub fn corrupt_labels(
    truth: &PlantedTruth,
    inst: &ShuffledInstance,
    budget: usize,
    mode: CorruptionMode,
    seed: u64,
) -> Result<HashSet<usize>, InstanceError> {
    let n = inst.n();
    if budget > n {
        return Err(InstanceError::BudgetTooLarge { budget, n });
    }
    match mode {
        CorruptionMode::Uniform => {
            let mut rng = rng_from_seed(derive_seed(seed, stream::CORRUPTION, 0));
            let picks = rand::seq::index::sample(&mut rng, n, budget);
            Ok(picks.into_iter().collect())
        }
        CorruptionMode::Boundary => {
            let istar = truth.monotone_index.ok_or_else(|| {
                InstanceError::BadPlant("boundary corruption needs a monotone index".into())
            })?;
            let jstar = match truth.boundary_high {
                Some(hi) => inst.rank_of(istar, hi),
                None => {
                    if truth.labeling.iter().all(|&b| b) {
                        1
                    } else {
                        n + 1
                    }
                }
            };
            let mut ranks: Vec<usize> = (1..=n).collect();
            ranks.sort_by_key(|&r| (r.abs_diff(jstar), r));
            Ok(ranks[..budget]
                .iter()
                .map(|&r| inst.element_at(istar, r))
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{consistent_hypotheses, is_monotone_under, verify_star_condition};

    #[test]
    fn random_plants_are_monotone() {
        for seed in 0..200 {
            let g = gen_random_shuffled(1 + (seed as usize % 40), 1 + (seed as usize % 5), seed);
            g.truth.validate(&g.instance).unwrap();
            let i = g.truth.monotone_index.unwrap();
            assert!(is_monotone_under(&g.truth.labeling, &g.instance, i));
        }
    }

    #[test]
    fn random_generator_deterministic() {
        let a = gen_random_shuffled(30, 3, 99);
        let b = gen_random_shuffled(30, 3, 99);
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.truth, b.truth);
    }

    #[test]
    fn circle_labels_single_point() {
        let (points, hyps) = gen_circle_instance(4);
        // f_0 labels (1, 0) as 1 and the other three points 0.
        let labels: Vec<bool> = (0..4).map(|x| hyps[0].evaluate(points.point(x))).collect();
        assert_eq!(labels, vec![true, false, false, false]);
        for (k, h) in hyps.iter().enumerate() {
            let ones = (0..4).filter(|&x| h.evaluate(points.point(x))).count();
            assert_eq!(ones, 1, "f_{k} labels exactly one point");
        }
    }

    #[test]
    fn circle_adversary_needs_n_minus_one() {
        for n in [8usize, 16, 64] {
            let (points, hyps) = gen_circle_instance(n);
            let labelings: Vec<Vec<bool>> = hyps
                .iter()
                .map(|h| (0..n).map(|x| h.evaluate(points.point(x))).collect())
                .collect();
            assert_eq!(adversary_queries_needed(&labelings), n - 1);
        }
    }

    #[test]
    fn depth_two_isolates_middle() {
        let (points, labelings) = gen_depth_two_hard(2);
        // i = 0 sits at index m = 2; only (0, 0) is labeled 1.
        assert_eq!(points.point(2), &[0.0, 0.0]);
        assert_eq!(labelings[2], vec![false, false, true, false, false]);
        for f in &labelings {
            assert_eq!(f.iter().filter(|&&b| b).count(), 1);
        }
    }

    #[test]
    fn depth_two_not_threshold_realizable() {
        use crate::geometry::{project_to_instance, DirectionSet};
        // The two extreme singletons sit at the ends of the projection
        // orders and are threshold labelings; every interior one is not.
        for m in [2i64, 3, 5] {
            let (points, labelings) = gen_depth_two_hard(m);
            let dirs =
                DirectionSet::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
            let inst = project_to_instance(&points, &dirs).unwrap();
            for f in &labelings[1..labelings.len() - 1] {
                assert!(consistent_hypotheses(&inst, f).is_empty());
            }
            assert!(!consistent_hypotheses(&inst, &labelings[0]).is_empty());
        }
    }

    #[test]
    fn star_condition_small() {
        for d in 1..=8 {
            let (points, hyps) = gen_star_instance(d);
            assert_eq!(points.len(), 2 * d);
            assert_eq!(hyps.len(), 2 * d + 1);
            assert!(verify_star_condition(&points, &hyps).unwrap());
        }
    }

    #[test]
    fn star_perturbation_breaks_condition() {
        let (points, mut hyps) = gen_star_instance(3);
        // Push h_{1,-}'s threshold past every point on its coordinate.
        hyps[1].threshold = 2.0;
        assert!(!verify_star_condition(&points, &hyps).unwrap());
    }

    #[test]
    fn star_point_labels_match_construction() {
        let (points, hyps) = gen_star_instance(2);
        // x_{1,-} = (-1/2, -1): labeled 1 by h_{1,-} only.
        let x = points.point(0);
        assert_eq!(x, &[-0.5, -1.0]);
        assert!(hyps[1].evaluate(x));
        for (k, h) in hyps.iter().enumerate() {
            if k != 1 {
                assert!(!h.evaluate(x), "h_{k} must label x_{{1,-}} zero");
            }
        }
    }

    #[test]
    fn corruption_modes() {
        let g = gen_random_shuffled(10, 1, 3);
        assert!(corrupt_labels(&g.truth, &g.instance, 0, CorruptionMode::Uniform, 1)
            .unwrap()
            .is_empty());
        let u = corrupt_labels(&g.truth, &g.instance, 4, CorruptionMode::Uniform, 1).unwrap();
        assert_eq!(u.len(), 4);
        assert!(corrupt_labels(&g.truth, &g.instance, 11, CorruptionMode::Uniform, 1).is_err());
    }

    #[test]
    fn boundary_corruption_nearest_ranks() {
        // n = 10, j* = 5: budget 2 flips ranks {5, 4}.
        let inst = ShuffledInstance::identity(10, 1);
        let truth = PlantedTruth::from_hypothesis(&inst, 1, 5).unwrap();
        let flips =
            corrupt_labels(&truth, &inst, 2, CorruptionMode::Boundary, 0).unwrap();
        let ranks: HashSet<usize> =
            flips.iter().map(|&x| inst.rank_of(1, x)).collect();
        assert_eq!(ranks, HashSet::from([4, 5]));
    }
}
