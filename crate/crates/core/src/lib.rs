//! Staircase approximations of the medial, mid-sphere and circum-sphere axes
//! of a closed triangulated surface.
//!
//! A query point is swept along the segments of a lattice. At every point the
//! cells of the surface are ordered by their largest squared distance to the
//! query, and the persistence pairing of that order is maintained by adjacent
//! transpositions. A transposition in which two cells of equal dimension trade
//! their birth and death roles marks a point of one of the three axes.

pub mod database;
pub mod filtration;
pub mod matrix;
pub mod mesh;
pub mod pruning;
pub mod real;
pub mod reduction;
pub mod sweep;
pub mod vineyard;

pub use database::EventDatabase;
pub use filtration::{build_filter, simplex_values, Filter};
pub use mesh::{load_mesh, load_mesh_file, MeshError, MeshFormat, Point3, SimplexId, SurfaceMesh};
pub use pruning::{PruningConfig, PruningCriteria};
pub use reduction::{reduce_from_scratch, Decomposition, Pairing, Role};
pub use sweep::{run_sweep, AxisApproximation, GridSpec, Segment, SweepOptions, SweepOutput};
pub use vineyard::{classify, sweep_segment, AxisKind, InterchangeEvent, TranspositionRecord};
