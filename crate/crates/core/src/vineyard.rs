//! Vineyard updates: transposing adjacent cells of a filter while keeping the
//! decomposition reduced, sweeping a query point along a segment, and
//! recognizing the transpositions that are Faustian interchanges.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filtration::{build_filter, cell_value, key_cmp, lerp, Filter};
use crate::mesh::{Point3, SimplexId, SurfaceMesh};
use crate::pruning::euclidean_separation;
use crate::real;
use crate::reduction::{Decomposition, Role};
use crate::sweep::Segment;

#[derive(Debug, Error, PartialEq)]
pub enum VineyardError {
    #[error("cannot transpose {face} with its coface {coface} at position {position}")]
    Incident {
        position: usize,
        face: SimplexId,
        coface: SimplexId,
    },
    #[error("position {0} has no right neighbour")]
    OutOfRange(usize),
    #[error("{0} and {1} keep their order along the segment")]
    NoCrossing(SimplexId, SimplexId),
}

/// Which axis a Faustian interchange belongs to, by the dimension of the
/// interchanging cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxisKind {
    #[serde(rename = "medial")]
    Medial,
    #[serde(rename = "mid")]
    MidSphere,
    #[serde(rename = "circum")]
    CircumSphere,
}

impl AxisKind {
    pub const ALL: [AxisKind; 3] = [AxisKind::Medial, AxisKind::MidSphere, AxisKind::CircumSphere];

    pub fn from_dim(dim: i8) -> Option<Self> {
        match dim {
            0 => Some(AxisKind::Medial),
            1 => Some(AxisKind::MidSphere),
            2 => Some(AxisKind::CircumSphere),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AxisKind::Medial => "medial",
            AxisKind::MidSphere => "mid",
            AxisKind::CircumSphere => "circum",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        AxisKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// One adjacent transposition: `cells[0]` sat at `position` and `cells[1]`
/// right after it; roles are listed in the same cell order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transposition {
    pub position: usize,
    pub cells: [SimplexId; 2],
    pub before: [Role; 2],
    pub after: [Role; 2],
}

impl Transposition {
    /// The same exchange seen while moving the other way.
    pub fn reversed(&self) -> Transposition {
        Transposition {
            position: self.position,
            cells: [self.cells[1], self.cells[0]],
            before: [self.after[1], self.after[0]],
            after: [self.before[1], self.before[0]],
        }
    }

    /// Whether the two cells exchanged partners.
    pub fn changes_pairing(&self) -> bool {
        self.before != self.after
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranspositionRecord {
    pub transposition: Transposition,
    /// Segment parameter at which the two cells' values cross.
    pub t: f64,
}

/// An adjacent swap at `position`, due at parameter `t` of the linearly
/// interpolated values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduledSwap {
    pub position: u32,
    pub t: f64,
}

impl<'m> Decomposition<'m> {
    /// Exchange the cells at positions `i` and `i + 1` and restore a reduced
    /// decomposition of the new filter.
    pub fn transpose(&mut self, i: usize) -> Result<Transposition, VineyardError> {
        if i + 1 >= self.len() {
            return Err(VineyardError::OutOfRange(i));
        }
        let (fa, fb) = (self.filter.cell_at(i), self.filter.cell_at(i + 1));
        if self.mesh.is_face_of(fa, fb) {
            return Err(VineyardError::Incident {
                position: i,
                face: self.mesh.simplex(fa),
                coface: self.mesh.simplex(fb),
            });
        }
        let before = [self.role_at(i), self.role_at(i + 1)];
        self.repair_swap(i);
        let after = [self.role_at(i + 1), self.role_at(i)];
        Ok(Transposition {
            position: i,
            cells: [self.mesh.simplex(fa), self.mesh.simplex(fb)],
            before,
            after,
        })
    }

    fn repair_swap(&mut self, i: usize) {
        let a_kills = !self.r.is_column_empty(i);
        let b_kills = !self.r.is_column_empty(i + 1);
        // U[i, i+1], stored at (i+1, i) of the transpose.
        let coupled = self.ut.get(i + 1, i);
        match (a_kills, b_kills) {
            (false, false) => {
                if coupled {
                    // R_i is zero, so this only clears U[i, i+1].
                    self.add_column(i, i + 1);
                }
                let k = self.r.column_with_low(i, None);
                let l = self.r.column_with_low(i + 1, None);
                self.swap_adjacent(i);
                if let (Some(k), Some(l)) = (k, l) {
                    if self.r.low(k) == self.r.low(l) {
                        if k < l {
                            self.add_column(k, l);
                        } else {
                            self.add_column(l, k);
                        }
                    }
                }
            }
            (true, true) => {
                if coupled {
                    let flip = self.r.low(i) > self.r.low(i + 1);
                    self.add_column(i, i + 1);
                    self.swap_adjacent(i);
                    if flip {
                        self.add_column(i, i + 1);
                    }
                } else {
                    self.swap_adjacent(i);
                }
            }
            (true, false) => {
                if coupled {
                    self.add_column(i, i + 1);
                    self.swap_adjacent(i);
                    self.add_column(i, i + 1);
                } else {
                    self.swap_adjacent(i);
                }
            }
            (false, true) => {
                if coupled {
                    self.add_column(i, i + 1);
                }
                self.swap_adjacent(i);
            }
        }
    }

    /// Apply a schedule computed for this filter and install the target
    /// filter's values. With `reverse`, the schedule was computed from the
    /// target towards the current filter and is replayed backwards.
    pub(crate) fn apply_schedule<F>(
        &mut self,
        schedule: &[ScheduledSwap],
        reverse: bool,
        target: Filter,
        mut visit: F,
    ) -> Result<(), VineyardError>
    where
        F: FnMut(usize, &Transposition),
    {
        let steps: Box<dyn Iterator<Item = (usize, &ScheduledSwap)>> = if reverse {
            Box::new(schedule.iter().enumerate().rev())
        } else {
            Box::new(schedule.iter().enumerate())
        };
        for (k, s) in steps {
            let tr = self.transpose(s.position as usize)?;
            visit(k, &tr);
        }
        debug_assert_eq!(self.filter.order(), target.order());
        self.filter.retarget(target.query(), target.values().to_vec());
        Ok(())
    }
}

/// Cell values along the segment from `x0` to `x1`. Every vertex value is
/// `|x1 - x0|^2 t^2` plus an affine function of `t`, so differences of cell
/// values are differences of upper envelopes of at most three lines.
struct Envelopes<'m> {
    mesh: &'m SurfaceMesh,
    /// Per vertex, slope and intercept of the affine part.
    lines: Vec<(f64, f64)>,
}

impl<'m> Envelopes<'m> {
    fn new(mesh: &'m SurfaceMesh, x0: Point3, x1: Point3) -> Self {
        let d = [x1[0] - x0[0], x1[1] - x0[1], x1[2] - x0[2]];
        let lines = mesh
            .vertices()
            .iter()
            .map(|u| {
                let w = [x0[0] - u[0], x0[1] - u[1], x0[2] - u[2]];
                (2.0 * (d[0] * w[0] + d[1] * w[1] + d[2] * w[2]), w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
            })
            .collect();
        Envelopes { mesh, lines }
    }

    /// Slope and intercept of the line attaining the envelope just after
    /// `t`. Two lines are compared through their computed crossing, the same
    /// number that bounds the pieces, so the choice is exact on every piece.
    fn active(&self, flat: usize, t: f64) -> (f64, f64) {
        let beats = |u: (f64, f64), w: (f64, f64)| {
            if u.0 == w.0 {
                u.1 > w.1
            } else {
                let cross = (w.1 - u.1) / (u.0 - w.0);
                if u.0 > w.0 {
                    t >= cross
                } else {
                    t < cross
                }
            }
        };
        let verts = self.mesh.cell_vertices(flat);
        let mut best = self.lines[verts[0] as usize];
        for &v in &verts[1..] {
            let line = self.lines[v as usize];
            if beats(line, best) {
                best = line;
            }
        }
        best
    }

    fn kinks(&self, flat: usize, lo: f64, out: &mut Vec<f64>) {
        let verts = self.mesh.cell_vertices(flat);
        for (i, &u) in verts.iter().enumerate() {
            for &w in &verts[i + 1..] {
                let (bu, cu) = self.lines[u as usize];
                let (bw, cw) = self.lines[w as usize];
                if bu != bw {
                    let t = (cw - cu) / (bu - bw);
                    if t > lo && t < 1.0 {
                        out.push(t);
                    }
                }
            }
        }
    }

    /// First parameter after `now` from which `r` precedes `l` in the filter
    /// key, if any. On each piece between kinks the difference of the two
    /// envelopes is taken from the exact active lines, and a root is the same
    /// number for `(l, r)` and `(r, l)`, so an exchanged pair is never due to
    /// be exchanged back at the same instant.
    fn flip_time(&self, l: usize, r: usize, now: f64, scratch: &mut Vec<f64>) -> Option<f64> {
        scratch.clear();
        self.kinks(l, now, scratch);
        self.kinks(r, now, scratch);
        scratch.push(1.0);
        scratch.sort_unstable_by(f64::total_cmp);
        let mut a = now;
        for &b in scratch.iter() {
            if b <= a {
                continue;
            }
            let (sl, cl) = self.active(l, a);
            let (sr, cr) = self.active(r, a);
            // g(t) = s t + c is the value of l minus the value of r.
            let (s, c) = (sl - sr, cl - cr);
            if s == 0.0 {
                if c > 0.0 || (c == 0.0 && l > r) {
                    return Some(a);
                }
            } else {
                let root = -c / s;
                if s > 0.0 && root < b {
                    return Some(root.max(a));
                }
                if s < 0.0 && root > a {
                    return Some(a);
                }
            }
            a = b;
        }
        None
    }
}

/// Adjacent swaps that carry the order of `start` to the order of `end`.
///
/// The order follows the query point as it moves from `start.query()` to
/// `end.query()`: two neighbours are exchanged whenever their values cross,
/// including pairs that cross and later cross back. A final pass at `t = 1`
/// removes any inversion left by rounding, so the result always ends at the
/// order of `end`.
pub fn schedule_swaps(mesh: &SurfaceMesh, start: &Filter, end: &Filter) -> Vec<ScheduledSwap> {
    let n = start.len();
    let mut order: Vec<u32> = start.order().to_vec();
    let mut pos: Vec<u32> = (0..n).map(|c| start.position_of(c) as u32).collect();
    let env = Envelopes::new(mesh, start.query(), end.query());
    let mut scratch = Vec::with_capacity(8);
    let mut heap = BinaryHeap::new();
    let mut push = |heap: &mut BinaryHeap<_>, l: u32, r: u32, now: f64| {
        // The augmentation cell and a face before its coface never move.
        if l != 0 && !mesh.is_face_of(l as usize, r as usize) {
            if let Some(t) = env.flip_time(l as usize, r as usize, now, &mut scratch) {
                heap.push(Reverse((OrderedFloat(t), l, r)));
            }
        }
    };
    for p in 0..n.saturating_sub(1) {
        push(&mut heap, order[p], order[p + 1], 0.0);
    }

    let mut out = Vec::new();
    let mut now = 0.0f64;
    let mut swap = |order: &mut Vec<u32>, pos: &mut Vec<u32>, p: usize, t: f64| {
        out.push(ScheduledSwap { position: p as u32, t });
        order.swap(p, p + 1);
        pos[order[p] as usize] = p as u32;
        pos[order[p + 1] as usize] = (p + 1) as u32;
    };
    while let Some(Reverse((OrderedFloat(t), l, r))) = heap.pop() {
        let p = pos[l as usize] as usize;
        if pos[r as usize] as usize != p + 1 {
            continue;
        }
        now = now.max(t);
        swap(&mut order, &mut pos, p, now);
        if p > 0 {
            push(&mut heap, order[p - 1], order[p], now);
        }
        push(&mut heap, order[p], order[p + 1], now);
        if p + 2 < n {
            push(&mut heap, order[p + 1], order[p + 2], now);
        }
    }

    let target = |c: u32| end.position_of(c as usize);
    let mut dirty = true;
    while dirty {
        dirty = false;
        for p in 0..n.saturating_sub(1) {
            if target(order[p]) > target(order[p + 1]) {
                swap(&mut order, &mut pos, p, 1.0);
                dirty = true;
            }
        }
    }
    debug_assert_eq!(order, end.order());
    out
}

/// Move the query point of `dec` to `target`, recording every transposition.
pub fn sweep_segment(
    dec: &mut Decomposition<'_>,
    target: Point3,
) -> Result<Vec<TranspositionRecord>, VineyardError> {
    let mesh = dec.mesh();
    let start = dec.filter().query();
    let end = build_filter(mesh, target);
    let schedule = schedule_swaps(mesh, dec.filter(), &end);
    let mut records = Vec::with_capacity(schedule.len());
    dec.apply_schedule(&schedule, false, end, |k, tr| {
        let t = refine_crossing(mesh, tr.cells[0], tr.cells[1], start, target, schedule[k].t);
        records.push(TranspositionRecord { transposition: *tr, t });
    })?;
    Ok(records)
}

/// The axis a transposition witnesses, if it is a Faustian interchange: two
/// cells of equal dimension, one giving death and one giving birth, that
/// exchange these roles.
pub fn classify(tr: &Transposition) -> Option<AxisKind> {
    let [a, b] = tr.cells;
    if a.dim != b.dim {
        return None;
    }
    let before = [tr.before[0].gives_death(), tr.before[1].gives_death()];
    let after = [tr.after[0].gives_death(), tr.after[1].gives_death()];
    if before[0] != before[1] && after == [before[1], before[0]] {
        AxisKind::from_dim(a.dim)
    } else {
        None
    }
}

/// Parameter in `[0, 1]` at which the filter order of two cells flips on the
/// segment from `start` to `end`, located by bisection.
pub fn crossing_parameter(
    mesh: &SurfaceMesh,
    a: SimplexId,
    b: SimplexId,
    start: Point3,
    end: Point3,
) -> Result<f64, VineyardError> {
    crossing_within(mesh, a, b, start, end, 0.0, 1.0).ok_or(VineyardError::NoCrossing(a, b))
}

/// Bisection for a flip of the two cells' order inside `[hint - 1e-6, hint +
/// 1e-6]`; `hint` itself when the order agrees at both ends of that bracket.
pub fn refine_crossing(mesh: &SurfaceMesh, a: SimplexId, b: SimplexId, start: Point3, end: Point3, hint: f64) -> f64 {
    let (lo, hi) = ((hint - 1e-6).max(0.0), (hint + 1e-6).min(1.0));
    crossing_within(mesh, a, b, start, end, lo, hi).unwrap_or(hint)
}

fn crossing_within(
    mesh: &SurfaceMesh,
    a: SimplexId,
    b: SimplexId,
    start: Point3,
    end: Point3,
    mut lo: f64,
    mut hi: f64,
) -> Option<f64> {
    let (fa, fb) = (mesh.flat_index(a), mesh.flat_index(b));
    let a_first = |t: f64| {
        let x = lerp(start, end, t);
        // Same key as the filter: value, then flat index.
        let ord = cell_value(mesh, fa, x)
            .total_cmp(&cell_value(mesh, fb, x))
            .then(fa.cmp(&fb));
        ord == Ordering::Less
    };
    let first = a_first(lo);
    if a_first(hi) == first {
        return None;
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if a_first(mid) == first {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Pre- and post-meditation in length units from squared values: the common
/// value of the interchanging cells, the value of the birth partner they
/// share, and the value of the shared death partner if there is one. A birth
/// partner of value `-inf` (the augmentation cell) counts as distance zero.
pub fn meditations(common_value: f64, birth_value: f64, death_value: Option<f64>) -> (f64, f64) {
    let r = common_value.max(0.0).sqrt();
    let birth = if birth_value.is_finite() {
        birth_value.max(0.0).sqrt()
    } else {
        0.0
    };
    let pre = (r - birth).max(0.0);
    let post = death_value.map_or(f64::INFINITY, |d| (d.max(0.0).sqrt() - r).max(0.0));
    (pre, post)
}

/// A detected Faustian interchange.
///
/// Directional fields (`t`, `before`, `after`, the order of `cells`) refer to
/// the segment traversed from `segment.from` to `segment.to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterchangeEvent {
    pub segment: Segment,
    #[serde(with = "real")]
    pub t: f64,
    #[serde(with = "real::point")]
    pub location: Point3,
    pub axis: AxisKind,
    pub cells: [SimplexId; 2],
    pub before: [Role; 2],
    pub after: [Role; 2],
    #[serde(with = "real")]
    pub radius: f64,
    #[serde(with = "real")]
    pub premeditation: f64,
    #[serde(with = "real")]
    pub postmeditation: f64,
    #[serde(with = "real")]
    pub euclidean_separation: f64,
    pub shares_face: bool,
    pub shares_coface: bool,
    pub involves_essential: bool,
}

impl InterchangeEvent {
    /// Build the event for a Faustian transposition on the segment from
    /// `start` to `end`, scheduled near parameter `t_hint`.
    pub fn from_transposition(
        mesh: &SurfaceMesh,
        segment: Segment,
        start: Point3,
        end: Point3,
        tr: &Transposition,
        t_hint: f64,
        axis: AxisKind,
    ) -> Self {
        let [a, b] = tr.cells;
        let t = refine_crossing(mesh, a, b, start, end, t_hint);
        let x = lerp(start, end, t);
        let value = |c: SimplexId| cell_value(mesh, mesh.flat_index(c), x);
        let common = 0.5 * (value(a) + value(b));

        let mut birth_partner = None;
        let mut death_partner = None;
        let mut involves_essential = false;
        for role in tr.before {
            match role {
                Role::Kills(p) => birth_partner = Some(p),
                Role::KilledBy(p) => death_partner = Some(p),
                Role::Essential => involves_essential = true,
            }
        }
        let birth_partner = birth_partner.expect("a Faustian interchange has a death-giving cell");
        let (pre, post) = meditations(common, value(birth_partner), death_partner.map(value));

        InterchangeEvent {
            segment,
            t,
            location: x,
            axis,
            cells: tr.cells,
            before: tr.before,
            after: tr.after,
            radius: common.max(0.0).sqrt(),
            premeditation: pre,
            postmeditation: post,
            euclidean_separation: euclidean_separation(mesh, a, b),
            shares_face: mesh.shares_face(a, b),
            shares_coface: mesh.shares_coface(a, b),
            involves_essential,
        }
    }

    /// Canonical order: segment, then parameter, then cells.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.segment
            .cmp(&other.segment)
            .then(self.t.total_cmp(&other.t))
            .then(self.cells.cmp(&other.cells))
            .then(self.axis.cmp(&other.axis))
    }
}

/// Order check helper for tests: `a` strictly before `b` in a filter's key.
pub fn precedes(values: &[f64], a: usize, b: usize) -> bool {
    key_cmp(values, a, b) == Ordering::Less
}
