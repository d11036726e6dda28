//! The event database file and the staircase OBJ export.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::SurfaceMesh;
use crate::pruning::PruningConfig;
use crate::sweep::{AxisApproximation, GridSpec};
use crate::vineyard::{AxisKind, InterchangeEvent};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum DatabaseError {
    #[error("malformed event database: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    /// SHA-256 of the mesh tables, hex encoded.
    pub mesh_checksum: String,
    pub grid: GridSpec,
    pub axes: Vec<AxisKind>,
    pub tool_version: String,
    /// Pruning configurations applied so far, oldest first.
    #[serde(default)]
    pub pruning: Vec<PruningConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventDatabase {
    pub header: Header,
    pub events: Vec<InterchangeEvent>,
}

impl EventDatabase {
    pub fn new(
        mesh: &SurfaceMesh,
        grid: GridSpec,
        axes: impl IntoIterator<Item = AxisKind>,
        mut events: Vec<InterchangeEvent>,
    ) -> Self {
        let mut axes: Vec<AxisKind> = axes.into_iter().collect();
        axes.sort();
        axes.dedup();
        events.sort_by(|a, b| a.canonical_cmp(b));
        EventDatabase {
            header: Header {
                mesh_checksum: mesh.checksum(),
                grid,
                axes,
                tool_version: TOOL_VERSION.to_string(),
                pruning: Vec::new(),
            },
            events,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("event database serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, DatabaseError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<(), DatabaseError> {
        out.write_all(self.to_json().as_bytes())?;
        Ok(())
    }

    /// Keep the surviving events and record the configuration. Re-applying
    /// the most recent configuration records nothing new.
    pub fn prune(&self, config: &PruningConfig) -> Self {
        let mut header = self.header.clone();
        if header.pruning.last() != Some(config) {
            header.pruning.push(config.clone());
        }
        EventDatabase {
            header,
            events: config.apply(&self.events),
        }
    }

    pub fn approximation(&self) -> AxisApproximation {
        AxisApproximation::from_events(&self.events)
    }

    pub fn count(&self, kind: AxisKind) -> usize {
        self.events.iter().filter(|e| e.axis == kind).count()
    }

    /// One object per axis kind; every (segment, kind) pair contributes the
    /// bisecting square as two triangles.
    pub fn write_staircase_obj<W: Write>(&self, mut out: W) -> io::Result<()> {
        let grid = &self.header.grid;
        let approx = self.approximation();
        writeln!(out, "# staircase axes, {} squares", approx.total())?;
        let mut base = 1usize;
        for kind in AxisKind::ALL {
            writeln!(out, "o {}", kind.name())?;
            for &seg in approx.segments(kind) {
                for c in grid.square_corners(seg) {
                    writeln!(out, "v {} {} {}", c[0], c[1], c[2])?;
                }
                writeln!(out, "f {} {} {}", base, base + 1, base + 2)?;
                writeln!(out, "f {} {} {}", base, base + 2, base + 3)?;
                base += 4;
            }
        }
        Ok(())
    }
}
