//! Geometric side of the problem: point sets, unit direction sets, halfspace
//! hypotheses, and the reductions onto shuffled-monotone instances.

use crate::error::InstanceError;
use crate::instance::{ShuffledInstance, ThresholdHypothesis};

/// A finite point set in R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, InstanceError> {
        if points.is_empty() {
            return Err(InstanceError::EmptyPointSet);
        }
        let dim = points[0].len();
        for (pi, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(InstanceError::DimensionMismatch {
                    points: p.len(),
                    directions: dim,
                });
            }
            for (ci, &c) in p.iter().enumerate() {
                if !c.is_finite() {
                    return Err(InstanceError::NonFinite { point: pi, coordinate: ci });
                }
            }
        }
        Ok(Self { points, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

/// A set of D unit directions in R^d. Directions are normalized on
/// construction; inputs with zero norm are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    directions: Vec<Vec<f64>>,
    dim: usize,
}

impl DirectionSet {
    pub fn new(directions: Vec<Vec<f64>>) -> Result<Self, InstanceError> {
        if directions.is_empty() {
            return Err(InstanceError::EmptyDirectionSet);
        }
        let dim = directions[0].len();
        let mut out = Vec::with_capacity(directions.len());
        for (di, d) in directions.into_iter().enumerate() {
            if d.len() != dim {
                return Err(InstanceError::DimensionMismatch {
                    points: d.len(),
                    directions: dim,
                });
            }
            for (ci, &c) in d.iter().enumerate() {
                if !c.is_finite() {
                    return Err(InstanceError::NonFinite { point: di, coordinate: ci });
                }
            }
            let norm = d.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(InstanceError::ZeroNorm(di));
            }
            out.push(d.iter().map(|c| c / norm).collect());
        }
        Ok(Self { directions: out, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i]
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }
}

/// A halfspace hypothesis: labels `x` as 1 iff <u, x> > t (strict).
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricHypothesis {
    pub direction: Vec<f64>,
    pub threshold: f64,
}

impl GeometricHypothesis {
    pub fn new(direction: Vec<f64>, threshold: f64) -> Self {
        Self { direction, threshold }
    }

    pub fn evaluate(&self, x: &[f64]) -> bool {
        dot(&self.direction, x) > self.threshold
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orders the points by ascending projection onto each direction, yielding
/// the induced shuffled-monotone instance. Exactly equal projections are
/// tie-broken by ascending element id.
pub fn project_to_instance(
    points: &PointSet,
    directions: &DirectionSet,
) -> Result<ShuffledInstance, InstanceError> {
    if points.dim() != directions.dim() {
        return Err(InstanceError::DimensionMismatch {
            points: points.dim(),
            directions: directions.dim(),
        });
    }
    let n = points.len();
    let mut perms = Vec::with_capacity(directions.len());
    let mut order: Vec<usize> = (0..n).collect();
    for u in directions.directions() {
        let proj: Vec<f64> = (0..n).map(|x| dot(points.point(x), u)).collect();
        order.sort_unstable_by(|&a, &b| {
            proj[a].partial_cmp(&proj[b]).expect("finite projections").then(a.cmp(&b))
        });
        let mut rank = vec![0usize; n];
        for (r0, &x) in order.iter().enumerate() {
            rank[x] = r0 + 1;
        }
        perms.push(rank);
        order.sort_unstable();
    }
    ShuffledInstance::from_permutations(perms)
}

/// Maps each point to its projection vector (<x, u_1>, ..., <x, u_D>). Any
/// halfspace (u_i, t) on the input labels identically to the axis-aligned
/// stump (e_i, t) on the output.
pub fn reduce_to_axis_aligned(
    points: &PointSet,
    directions: &DirectionSet,
) -> Result<PointSet, InstanceError> {
    if points.dim() != directions.dim() {
        return Err(InstanceError::DimensionMismatch {
            points: points.dim(),
            directions: directions.dim(),
        });
    }
    let mapped = points
        .points()
        .iter()
        .map(|p| directions.directions().iter().map(|u| dot(p, u)).collect())
        .collect();
    PointSet::new(mapped)
}

/// Converts a rank-threshold hypothesis to geometric form against the
/// instance's projection values: the threshold is the midpoint of the two
/// adjacent projections, with infinite sentinels at the extremes. The
/// conversion is instance-relative.
pub fn to_geometric(
    hyp: &ThresholdHypothesis,
    points: &PointSet,
    directions: &DirectionSet,
) -> Result<GeometricHypothesis, InstanceError> {
    if hyp.direction < 1 || hyp.direction > directions.len() {
        return Err(InstanceError::DirectionOutOfRange {
            index: hyp.direction,
            d: directions.len(),
        });
    }
    let u = directions.direction(hyp.direction - 1).to_vec();
    let mut proj: Vec<f64> = points.points().iter().map(|p| dot(p, &u)).collect();
    proj.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite projections"));
    let j = hyp.threshold;
    let t = if j == 1 {
        f64::NEG_INFINITY
    } else if j == points.len() + 1 {
        f64::INFINITY
    } else {
        (proj[j - 2] + proj[j - 1]) / 2.0
    };
    Ok(GeometricHypothesis::new(u, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v
    }

    #[test]
    fn project_sorted_1d() {
        let pts = PointSet::new(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let dirs = DirectionSet::new(vec![vec![1.0]]).unwrap();
        let inst = project_to_instance(&pts, &dirs).unwrap();
        assert_eq!(inst.rank_array(1), &[1, 2, 3]);
    }

    #[test]
    fn project_two_directions_symmetry() {
        let pts = PointSet::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let dirs = DirectionSet::new(vec![e(2, 0), e(2, 1)]).unwrap();
        let inst = project_to_instance(&pts, &dirs).unwrap();
        assert_eq!(inst.rank_array(1), &[2, 1]);
        assert_eq!(inst.rank_array(2), &[1, 2]);
    }

    #[test]
    fn project_ties_broken_by_id() {
        let pts = PointSet::new(vec![vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let dirs = DirectionSet::new(vec![e(2, 0)]).unwrap();
        let inst = project_to_instance(&pts, &dirs).unwrap();
        assert_eq!(inst.rank_array(1), &[1, 2]);
    }

    #[test]
    fn project_dimension_mismatch() {
        let pts = PointSet::new(vec![vec![1.0, 1.0]]).unwrap();
        let dirs = DirectionSet::new(vec![vec![1.0]]).unwrap();
        assert!(project_to_instance(&pts, &dirs).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(PointSet::new(vec![vec![f64::NAN]]).is_err());
        assert!(DirectionSet::new(vec![vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn reduce_standard_basis_is_identity() {
        let pts = PointSet::new(vec![vec![1.0, 0.0]]).unwrap();
        let dirs = DirectionSet::new(vec![e(2, 0), e(2, 1)]).unwrap();
        let out = reduce_to_axis_aligned(&pts, &dirs).unwrap();
        assert_eq!(out.point(0), &[1.0, 0.0]);
    }

    #[test]
    fn reduce_diagonal_projection() {
        let pts = PointSet::new(vec![vec![1.0, 1.0]]).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        let dirs = DirectionSet::new(vec![vec![s, s]]).unwrap();
        let out = reduce_to_axis_aligned(&pts, &dirs).unwrap();
        assert!((out.point(0)[0] - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reduce_preserves_labelings() {
        // Brute-force label comparison over random hypotheses.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        let pts = PointSet::new(
            (0..40)
                .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect(),
        )
        .unwrap();
        let dirs = DirectionSet::new(
            (0..5)
                .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect(),
        )
        .unwrap();
        let reduced = reduce_to_axis_aligned(&pts, &dirs).unwrap();
        for _ in 0..100 {
            let i = rng.random_range(0..dirs.len());
            let t = rng.random_range(-3.0..3.0);
            let h = GeometricHypothesis::new(dirs.direction(i).to_vec(), t);
            let stump = GeometricHypothesis::new(
                {
                    let mut v = vec![0.0; dirs.len()];
                    v[i] = 1.0;
                    v
                },
                t,
            );
            for x in 0..pts.len() {
                assert_eq!(h.evaluate(pts.point(x)), stump.evaluate(reduced.point(x)));
            }
        }
    }

    #[test]
    fn geometric_conversion_midpoint() {
        let pts = PointSet::new(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let dirs = DirectionSet::new(vec![vec![1.0]]).unwrap();
        let g = to_geometric(&ThresholdHypothesis::new(1, 2), &pts, &dirs).unwrap();
        assert_eq!(g.threshold, 0.5);
        let all_one = to_geometric(&ThresholdHypothesis::new(1, 1), &pts, &dirs).unwrap();
        assert_eq!(all_one.threshold, f64::NEG_INFINITY);
        let all_zero = to_geometric(&ThresholdHypothesis::new(1, 4), &pts, &dirs).unwrap();
        assert_eq!(all_zero.threshold, f64::INFINITY);
    }
}
