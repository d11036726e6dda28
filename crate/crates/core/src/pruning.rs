//! Post-hoc filtering of interchange events by Euclidean separation, shared
//! faces, shared cofaces and meditation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::filtration::dist2;
use crate::mesh::{SimplexId, SurfaceMesh};
use crate::real;
use crate::vineyard::{AxisKind, InterchangeEvent};

/// Distance between the vertices, edge midpoints or triangle barycenters.
pub fn euclidean_separation(mesh: &SurfaceMesh, a: SimplexId, b: SimplexId) -> f64 {
    dist2(mesh.representative_point(a), mesh.representative_point(b)).sqrt()
}

/// Thresholds are inclusive: an event at exactly the threshold survives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PruningCriteria {
    #[serde(with = "real::option", default)]
    pub euclidean_min: Option<f64>,
    #[serde(default)]
    pub face: bool,
    #[serde(default)]
    pub coface: bool,
    #[serde(with = "real::option", default)]
    pub persistence_min: Option<f64>,
}

impl PruningCriteria {
    pub fn survives(&self, e: &InterchangeEvent) -> bool {
        self.euclidean_min.is_none_or(|m| e.euclidean_separation >= m)
            && !(self.face && e.shares_face)
            && !(self.coface && e.shares_coface)
            && self
                .persistence_min
                .is_none_or(|m| e.premeditation.min(e.postmeditation) >= m)
    }

    pub fn is_identity(&self) -> bool {
        !self.face
            && !self.coface
            && self.euclidean_min.is_none_or(|m| m <= 0.0)
            && self.persistence_min.is_none_or(|m| m <= 0.0)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PruningConfig {
    #[serde(default)]
    pub default: PruningCriteria,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_axis: BTreeMap<AxisKind, PruningCriteria>,
}

impl PruningConfig {
    pub fn uniform(criteria: PruningCriteria) -> Self {
        PruningConfig {
            default: criteria,
            per_axis: BTreeMap::new(),
        }
    }

    /// Face pruning on the mid-sphere and circum-sphere axes, coface pruning
    /// on the medial and mid-sphere axes, and the given thresholds everywhere.
    pub fn standard(euclidean_min: Option<f64>, persistence_min: Option<f64>) -> Self {
        let base = PruningCriteria {
            euclidean_min,
            persistence_min,
            ..PruningCriteria::default()
        };
        let per_axis = [
            (AxisKind::Medial, false, true),
            (AxisKind::MidSphere, true, true),
            (AxisKind::CircumSphere, true, false),
        ]
        .into_iter()
        .map(|(k, face, coface)| (k, PruningCriteria { face, coface, ..base }))
        .collect();
        PruningConfig {
            default: base,
            per_axis,
        }
    }

    pub fn criteria(&self, kind: AxisKind) -> &PruningCriteria {
        self.per_axis.get(&kind).unwrap_or(&self.default)
    }

    pub fn survives(&self, e: &InterchangeEvent) -> bool {
        self.criteria(e.axis).survives(e)
    }

    pub fn apply(&self, events: &[InterchangeEvent]) -> Vec<InterchangeEvent> {
        events.iter().filter(|e| self.survives(e)).cloned().collect()
    }
}
