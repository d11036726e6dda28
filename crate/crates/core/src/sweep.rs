//! Lattice sweeps: plan a traversal of all lattice segments, carry
//! decompositions along it, and collect the Faustian interchanges.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filtration::build_filter;
use crate::mesh::{Point3, SurfaceMesh};
use crate::real;
use crate::reduction::{reduce_from_scratch, Decomposition};
use crate::vineyard::{classify, schedule_swaps, AxisKind, InterchangeEvent, VineyardError};

pub type LatticePoint = [u32; 3];

/// Default jitter of the lattice, in units of the spacing.
#[allow(clippy::approx_constant)]
pub const DEFAULT_OFFSET: [f64; 3] = [0.318, 0.244, 0.172];

/// An affine lattice with `dims[a] + 1` points along axis `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(with = "real::point")]
    pub origin: Point3,
    #[serde(with = "real")]
    pub spacing: f64,
    pub dims: [u32; 3],
    #[serde(with = "real::point")]
    pub offset: [f64; 3],
}

impl GridSpec {
    pub fn new(origin: Point3, spacing: f64, dims: [u32; 3]) -> Self {
        GridSpec {
            origin,
            spacing,
            dims,
            offset: DEFAULT_OFFSET,
        }
    }

    pub fn with_offset(mut self, offset: [f64; 3]) -> Self {
        self.offset = offset;
        self
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(SweepError::Grid(format!("spacing must be positive, got {}", self.spacing)));
        }
        if self.offset.iter().any(|o| !(0.0..1.0).contains(o)) {
            return Err(SweepError::Grid(format!("offset must lie in [0,1)^3, got {:?}", self.offset)));
        }
        if self.origin.iter().any(|o| !o.is_finite()) {
            return Err(SweepError::Grid("origin must be finite".into()));
        }
        Ok(())
    }

    pub fn points_per_axis(&self) -> [usize; 3] {
        self.dims.map(|d| d as usize + 1)
    }

    pub fn num_points(&self) -> usize {
        self.points_per_axis().iter().product()
    }

    pub fn num_segments(&self) -> usize {
        let [gx, gy, gz] = self.dims.map(|d| d as usize);
        gx * (gy + 1) * (gz + 1) + gy * (gx + 1) * (gz + 1) + gz * (gx + 1) * (gy + 1)
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        (0..3).all(|a| p[a] <= self.dims[a])
    }

    pub fn point_index(&self, p: LatticePoint) -> usize {
        let [nx, ny, _] = self.points_per_axis();
        (p[2] as usize * ny + p[1] as usize) * nx + p[0] as usize
    }

    pub fn point_at(&self, index: usize) -> LatticePoint {
        let [nx, ny, _] = self.points_per_axis();
        [(index % nx) as u32, ((index / nx) % ny) as u32, (index / (nx * ny)) as u32]
    }

    /// Position in space of a lattice point, jitter included.
    pub fn position(&self, p: LatticePoint) -> Point3 {
        let h = self.spacing;
        [0, 1, 2].map(|a| self.origin[a] + (self.offset[a] + p[a] as f64) * h)
    }

    /// Lattice neighbours of `p`, in the order -x, +x, -y, +y, -z, +z.
    pub fn neighbors(&self, p: LatticePoint) -> impl Iterator<Item = LatticePoint> + '_ {
        (0..3).flat_map(move |a| {
            let lower = (p[a] > 0).then(|| {
                let mut q = p;
                q[a] -= 1;
                q
            });
            let upper = (p[a] < self.dims[a]).then(|| {
                let mut q = p;
                q[a] += 1;
                q
            });
            lower.into_iter().chain(upper)
        })
    }

    /// Corners of the square bisecting a segment, in cyclic order.
    pub fn square_corners(&self, s: Segment) -> [Point3; 4] {
        let a = s.axis();
        let (u, v) = ((a + 1) % 3, (a + 2) % 3);
        let half = 0.5 * self.spacing;
        let mut mid = self.position(s.from);
        mid[a] += half;
        [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(su, sv)| {
            let mut c = mid;
            c[u] += su * half;
            c[v] += sv * half;
            c
        })
    }

    pub fn square_center(&self, s: Segment) -> Point3 {
        let mut mid = self.position(s.from);
        mid[s.axis()] += 0.5 * self.spacing;
        mid
    }
}

/// A lattice segment between neighbours, stored with `from < to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub from: LatticePoint,
    pub to: LatticePoint,
}

impl Segment {
    /// The segment between two neighbouring points, in canonical direction.
    pub fn between(p: LatticePoint, q: LatticePoint) -> Self {
        debug_assert_eq!(
            (0..3).map(|a| p[a].abs_diff(q[a])).sum::<u32>(),
            1,
            "{p:?} and {q:?} are not neighbours"
        );
        if p < q {
            Segment { from: p, to: q }
        } else {
            Segment { from: q, to: p }
        }
    }

    pub fn axis(&self) -> usize {
        (0..3).find(|&a| self.from[a] != self.to[a]).unwrap_or(0)
    }

    fn key(&self, grid: &GridSpec) -> usize {
        grid.point_index(self.from) * 3 + self.axis()
    }
}

/// One step of a traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanStep {
    /// Reduce from scratch at a point.
    Seed(LatticePoint),
    /// Sweep a segment starting at `segment.to` when `reverse`, else at
    /// `segment.from`.
    Sweep { segment: Segment, reverse: bool },
}

impl PlanStep {
    fn endpoints(&self) -> Option<(LatticePoint, LatticePoint)> {
        match *self {
            PlanStep::Seed(_) => None,
            PlanStep::Sweep { segment, reverse: false } => Some((segment.from, segment.to)),
            PlanStep::Sweep { segment, reverse: true } => Some((segment.to, segment.from)),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Traversal {
    pub steps: Vec<PlanStep>,
    /// Per point index, the number of sweeps that start there.
    pub uses: Vec<u32>,
}

impl Traversal {
    pub fn num_sweeps(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, PlanStep::Sweep { .. })).count()
    }
}

/// Breadth-first traversal of the owned segments, starting at `start` and
/// reseeding at the lowest point with unswept owned segments until every
/// owned segment is swept once.
fn plan_owned(grid: &GridSpec, start: Option<LatticePoint>, owned: impl Fn(Segment) -> bool) -> Traversal {
    let np = grid.num_points();
    let mut swept = vec![false; np * 3];
    let mut visited = vec![false; np];
    let mut uses = vec![0u32; np];
    let mut steps = Vec::new();
    let pending = |p: LatticePoint, swept: &[bool]| {
        grid.neighbors(p).any(|q| {
            let s = Segment::between(p, q);
            owned(s) && !swept[s.key(grid)]
        })
    };

    let mut next_seed = start;
    let mut scan = 0usize;
    loop {
        let seed = match next_seed.take() {
            Some(p) => p,
            None => {
                while scan < np && !pending(grid.point_at(scan), &swept) {
                    scan += 1;
                }
                if scan == np {
                    break;
                }
                grid.point_at(scan)
            }
        };
        if !pending(seed, &swept) {
            continue;
        }
        steps.push(PlanStep::Seed(seed));
        let mut queue = VecDeque::from([seed]);
        visited[grid.point_index(seed)] = true;
        while let Some(p) = queue.pop_front() {
            for q in grid.neighbors(p) {
                let s = Segment::between(p, q);
                if !owned(s) || swept[s.key(grid)] {
                    continue;
                }
                swept[s.key(grid)] = true;
                uses[grid.point_index(p)] += 1;
                steps.push(PlanStep::Sweep {
                    segment: s,
                    reverse: s.from != p,
                });
                if !visited[grid.point_index(q)] {
                    visited[grid.point_index(q)] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    Traversal { steps, uses }
}

/// Breadth-first traversal of every segment of the lattice from `start`.
pub fn plan_segments(grid: &GridSpec, start: LatticePoint) -> Traversal {
    assert!(grid.contains(start), "{start:?} lies outside the lattice");
    plan_owned(grid, Some(start), |_| true)
}

/// Chunk `c` of `k` owns the segments whose lower endpoint lies in the `c`-th
/// slab of points along the longest lattice axis.
pub fn chunk_plans(grid: &GridSpec, chunks: usize) -> Vec<Traversal> {
    let n = grid.points_per_axis();
    let axis = (0..3).max_by_key(|&a| (n[a], std::cmp::Reverse(a))).unwrap();
    let k = chunks.clamp(1, n[axis]);
    let bounds: Vec<usize> = (0..=k).map(|c| c * n[axis] / k).collect();
    (0..k)
        .map(|c| {
            let (lo, hi) = (bounds[c], bounds[c + 1]);
            plan_owned(grid, None, |s| (lo..hi).contains(&(s.from[axis] as usize)))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    /// Chunks run on the rayon pool when the `parallel` feature is enabled.
    Parallel,
    Sequential,
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub axes: BTreeSet<AxisKind>,
    pub chunks: usize,
    pub execution: Execution,
    /// Largest number of decompositions a chunk may keep alive.
    pub max_live: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            axes: AxisKind::ALL.into_iter().collect(),
            chunks: 1,
            execution: Execution::Parallel,
            max_live: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("no axis kinds requested")]
    NoAxes,
    #[error("out of memory budget: {live} live decompositions exceed the limit of {limit}")]
    Resource { live: usize, limit: usize },
    #[error(transparent)]
    Vineyard(#[from] VineyardError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub segments: usize,
    pub seeds: usize,
    pub swaps: u64,
    /// Largest number of decompositions alive at once within one chunk.
    pub peak_live: usize,
}

/// Per axis kind, the segments whose bisecting squares form the staircase.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxisApproximation {
    pub squares: BTreeMap<AxisKind, BTreeSet<Segment>>,
}

impl AxisApproximation {
    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a InterchangeEvent>) -> Self {
        let mut squares: BTreeMap<AxisKind, BTreeSet<Segment>> = BTreeMap::new();
        for e in events {
            squares.entry(e.axis).or_default().insert(e.segment);
        }
        AxisApproximation { squares }
    }

    pub fn segments(&self, kind: AxisKind) -> impl Iterator<Item = &Segment> {
        self.squares.get(&kind).into_iter().flatten()
    }

    pub fn count(&self, kind: AxisKind) -> usize {
        self.squares.get(&kind).map_or(0, |s| s.len())
    }

    pub fn total(&self) -> usize {
        self.squares.values().map(|s| s.len()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    /// Canonically sorted.
    pub events: Vec<InterchangeEvent>,
    pub approximation: AxisApproximation,
    pub stats: SweepStats,
}

impl SweepOutput {
    /// Total number of transpositions performed.
    pub fn swap_counter(&self) -> u64 {
        self.stats.swaps
    }
}

struct ChunkResult {
    events: Vec<InterchangeEvent>,
    stats: SweepStats,
}

fn run_chunk(
    mesh: &SurfaceMesh,
    grid: &GridSpec,
    plan: &Traversal,
    options: &SweepOptions,
    progress: &AtomicU64,
) -> Result<ChunkResult, SweepError> {
    let mut live: Vec<Option<Decomposition<'_>>> = vec![None; grid.num_points()];
    let mut remaining = plan.uses.clone();
    let mut live_count = 0usize;
    let mut stats = SweepStats::default();
    let mut events = Vec::new();
    let check = |live_count: usize, stats: &mut SweepStats| {
        stats.peak_live = stats.peak_live.max(live_count);
        match options.max_live {
            Some(limit) if live_count > limit => Err(SweepError::Resource { live: live_count, limit }),
            _ => Ok(()),
        }
    };

    for step in &plan.steps {
        match *step {
            PlanStep::Seed(p) => {
                let idx = grid.point_index(p);
                if live[idx].is_none() {
                    live[idx] = Some(reduce_from_scratch(mesh, build_filter(mesh, grid.position(p))));
                    live_count += 1;
                    stats.seeds += 1;
                    check(live_count, &mut stats)?;
                }
            }
            PlanStep::Sweep { segment, reverse } => {
                let (src, dst) = step.endpoints().unwrap();
                let (si, di) = (grid.point_index(src), grid.point_index(dst));
                remaining[si] -= 1;
                let mut dec = if remaining[si] == 0 {
                    live_count -= 1;
                    live[si].take().expect("sweep from a disposed decomposition")
                } else {
                    live[si].clone().expect("sweep from a disposed decomposition")
                };
                // The schedule always runs from the lower to the upper endpoint,
                // so the recorded events do not depend on the direction of travel.
                let (x0, x1) = (grid.position(segment.from), grid.position(segment.to));
                let target = build_filter(mesh, grid.position(dst));
                let schedule = if reverse {
                    schedule_swaps(mesh, &target, dec.filter())
                } else {
                    schedule_swaps(mesh, dec.filter(), &target)
                };
                stats.swaps += schedule.len() as u64;
                let mut found = Vec::new();
                dec.apply_schedule(&schedule, reverse, target, |k, tr| {
                    let tr = if reverse { tr.reversed() } else { *tr };
                    if let Some(kind) = classify(&tr) {
                        if options.axes.contains(&kind) {
                            found.push((tr, schedule[k].t, kind));
                        }
                    }
                })?;
                for (tr, t, kind) in found {
                    events.push(InterchangeEvent::from_transposition(mesh, segment, x0, x1, &tr, t, kind));
                }
                stats.segments += 1;
                if live[di].is_none() && remaining[di] > 0 {
                    live[di] = Some(dec);
                    live_count += 1;
                    check(live_count, &mut stats)?;
                }
                let done = progress.fetch_add(1, Ordering::Relaxed) + 1;
                if done.is_multiple_of(500) {
                    log::info!("swept {done} segments");
                }
            }
        }
    }
    debug_assert_eq!(live_count, 0);
    Ok(ChunkResult { events, stats })
}

/// Sweep every segment of the lattice and collect the Faustian interchanges
/// of the requested kinds.
pub fn run_sweep(mesh: &SurfaceMesh, grid: &GridSpec, options: &SweepOptions) -> Result<SweepOutput, SweepError> {
    grid.validate()?;
    if options.axes.is_empty() {
        return Err(SweepError::NoAxes);
    }
    let plans = chunk_plans(grid, options.chunks);
    let progress = AtomicU64::new(0);
    let run = |plan: &Traversal| run_chunk(mesh, grid, plan, options, &progress);
    let results: Vec<Result<ChunkResult, SweepError>> = match options.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            plans.par_iter().map(run).collect()
        }
        _ => plans.iter().map(run).collect(),
    };

    let mut events = Vec::new();
    let mut stats = SweepStats::default();
    for r in results {
        let r = r?;
        events.extend(r.events);
        stats.segments += r.stats.segments;
        stats.seeds += r.stats.seeds;
        stats.swaps += r.stats.swaps;
        stats.peak_live = stats.peak_live.max(r.stats.peak_live);
    }
    events.sort_by(|a, b| a.canonical_cmp(b));
    let approximation = AxisApproximation::from_events(&events);
    Ok(SweepOutput {
        events,
        approximation,
        stats,
    })
}
