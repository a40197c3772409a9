//! The JSON instance file format.
//!
//! ```json
//! {
//!   "n": 4, "D": 2, "mode": "permutations",
//!   "permutations": [[1,2,3,4],[4,3,2,1]],
//!   "labels": [0,0,1,1],
//!   "planted": {"monotone_index": 1, "boundary_low": 1, "boundary_high": 2},
//!   "metadata": {"generator": "random", "params": [["n","4"],["D","2"]], "seed": 7}
//! }
//! ```
//!
//! Geometry mode stores `points` and `directions` instead of `permutations`
//! and re-derives the rank arrays deterministically on load. Ranks are
//! 1-based; element ids and the planted boundary fields are 0-based. The
//! planted block's labeling is the top-level `labels` array.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::InstanceError;
use crate::generators::{GeneratedInstance, GeneratorMetadata};
use crate::geometry::{project_to_instance, DirectionSet, PointSet};
use crate::instance::{PlantedTruth, ShuffledInstance};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("invalid file: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlantedBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_low: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_high: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutations: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    pub labels: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<PlantedBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<GeneratorMetadata>,
}

/// A loaded instance: the rank structure, the labels the oracle should
/// answer with, optional planted truth and geometry.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: ShuffledInstance,
    pub labels: Vec<bool>,
    pub truth: Option<PlantedTruth>,
    pub geometry: Option<(PointSet, DirectionSet)>,
    pub metadata: Option<GeneratorMetadata>,
}

impl InstanceFile {
    pub fn from_generated(g: &GeneratedInstance) -> Self {
        let (mode, permutations, points, directions) = match &g.geometry {
            None => {
                let perms = (1..=g.instance.num_directions())
                    .map(|i| g.instance.rank_array(i).to_vec())
                    .collect();
                ("permutations".to_string(), Some(perms), None, None)
            }
            Some((pts, dirs)) => (
                "geometry".to_string(),
                None,
                Some(pts.points().to_vec()),
                Some(dirs.directions().to_vec()),
            ),
        };
        Self {
            n: g.instance.n(),
            d: g.instance.num_directions(),
            mode,
            permutations,
            points,
            directions,
            labels: g.truth.labeling.iter().map(|&b| b as u8).collect(),
            planted: Some(PlantedBlock {
                monotone_index: g.truth.monotone_index,
                boundary_low: g.truth.boundary_low,
                boundary_high: g.truth.boundary_high,
            }),
            metadata: Some(g.metadata.clone()),
        }
    }

    pub fn into_loaded(self) -> Result<LoadedInstance, IoError> {
        let (instance, geometry) = match self.mode.as_str() {
            "permutations" => {
                let perms = self
                    .permutations
                    .ok_or_else(|| IoError::Invalid("permutations missing".into()))?;
                (ShuffledInstance::from_permutations(perms)?, None)
            }
            "geometry" => {
                let points = PointSet::new(
                    self.points.ok_or_else(|| IoError::Invalid("points missing".into()))?,
                )?;
                let directions = DirectionSet::new(
                    self.directions
                        .ok_or_else(|| IoError::Invalid("directions missing".into()))?,
                )?;
                let inst = project_to_instance(&points, &directions)?;
                (inst, Some((points, directions)))
            }
            other => return Err(IoError::Invalid(format!("unknown mode {other:?}"))),
        };
        if instance.n() != self.n || instance.num_directions() != self.d {
            return Err(IoError::Invalid("n or D does not match the payload".into()));
        }
        if self.labels.len() != self.n {
            return Err(IoError::Invalid("labels length != n".into()));
        }
        let labels: Vec<bool> = self.labels.iter().map(|&b| b != 0).collect();
        let truth = self.planted.map(|p| PlantedTruth {
            labeling: labels.clone(),
            monotone_index: p.monotone_index,
            boundary_low: p.boundary_low,
            boundary_high: p.boundary_high,
        });
        if let Some(t) = &truth {
            t.validate(&instance)?;
        }
        Ok(LoadedInstance {
            instance,
            labels,
            truth,
            geometry,
            metadata: self.metadata,
        })
    }
}

pub fn save_instance(path: &Path, file: &InstanceFile) -> Result<(), IoError> {
    let json = serde_json::to_string_pretty(file)?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<LoadedInstance, IoError> {
    let data = std::fs::read_to_string(path)?;
    let file: InstanceFile = serde_json::from_str(&data)?;
    file.into_loaded()
}
