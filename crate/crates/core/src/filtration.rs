//! Squared-distance filters.

use std::cmp::Ordering;

use crate::mesh::{Point3, SimplexId, SurfaceMesh};

pub fn dist2(a: Point3, b: Point3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

pub fn lerp(a: Point3, b: Point3, t: f64) -> Point3 {
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

/// Value of a single flat cell: the largest squared distance from `x` to one of
/// its vertices, `-inf` for the augmentation cell.
pub fn cell_value(mesh: &SurfaceMesh, flat: usize, x: Point3) -> f64 {
    mesh.cell_vertices(flat)
        .iter()
        .map(|&v| dist2(mesh.vertices()[v as usize], x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Per-cell values indexed by flat cell index.
pub fn simplex_values(mesh: &SurfaceMesh, x: Point3) -> Vec<f64> {
    let nv = mesh.num_vertices();
    let mut values = Vec::with_capacity(mesh.num_cells());
    values.push(f64::NEG_INFINITY);
    values.extend(mesh.vertices().iter().map(|&p| dist2(p, x)));
    for &[a, b] in mesh.edges() {
        values.push(values[1 + a as usize].max(values[1 + b as usize]));
    }
    for &[a, b, c] in mesh.triangles() {
        let v = values[1 + a as usize]
            .max(values[1 + b as usize])
            .max(values[1 + c as usize]);
        values.push(v);
    }
    debug_assert_eq!(values.len(), 1 + nv + mesh.num_edges() + mesh.num_triangles());
    values
}

/// Filtration value of a cell at `x(t) = start + t (end - start)`.
pub fn value_at(mesh: &SurfaceMesh, cell: SimplexId, start: Point3, end: Point3, t: f64) -> f64 {
    cell_value(mesh, mesh.flat_index(cell), lerp(start, end, t))
}

/// Total filter order: by value, ties by dimension, then by index. Flat
/// indices already order cells by `(dim, index)`.
#[inline]
pub fn key_cmp(values: &[f64], a: usize, b: usize) -> Ordering {
    values[a].total_cmp(&values[b]).then(a.cmp(&b))
}

/// A total order on the cells of a mesh induced by the squared distance from a
/// query point.
#[derive(Clone, Debug, PartialEq)]
pub struct Filter {
    query: Point3,
    values: Vec<f64>,
    /// Position -> flat cell.
    order: Vec<u32>,
    /// Flat cell -> position.
    position: Vec<u32>,
}

impl Filter {
    pub fn query(&self) -> Point3 {
        self.query
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn cell_at(&self, position: usize) -> usize {
        self.order[position] as usize
    }

    pub fn position_of(&self, flat: usize) -> usize {
        self.position[flat] as usize
    }

    /// Exchange the cells at `i` and `i + 1`. Values are left alone; the
    /// result is an intermediate order of a moving query point.
    pub(crate) fn swap_adjacent(&mut self, i: usize) {
        self.order.swap(i, i + 1);
        self.position[self.order[i] as usize] = i as u32;
        self.position[self.order[i + 1] as usize] = (i + 1) as u32;
    }

    /// Replace query point and values once an order has been transported to
    /// its destination.
    pub(crate) fn retarget(&mut self, query: Point3, values: Vec<f64>) {
        debug_assert!(self
            .order
            .windows(2)
            .all(|w| key_cmp(&values, w[0] as usize, w[1] as usize) == Ordering::Less));
        self.query = query;
        self.values = values;
    }
}

pub fn build_filter(mesh: &SurfaceMesh, x: Point3) -> Filter {
    let values = simplex_values(mesh, x);
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| key_cmp(&values, a as usize, b as usize));
    let mut position = vec![0u32; order.len()];
    for (p, &c) in order.iter().enumerate() {
        position[c as usize] = p as u32;
    }
    Filter {
        query: x,
        values,
        order,
        position,
    }
}
