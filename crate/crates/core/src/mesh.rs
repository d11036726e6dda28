//! Closed triangulated surfaces: loading, validation and cell indexing.
//!
//! Every cell of the surface (plus the augmentation cell, the unique cell of
//! dimension -1) gets a *flat* index: the augmentation cell first, then the
//! vertices, the edges and the triangles, each block in table order. Sorting by
//! flat index is the same as sorting by `(dim, index)`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub type Point3 = [f64; 3];

/// A cell of the augmented complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SimplexId {
    pub dim: i8,
    pub index: u32,
}

impl SimplexId {
    pub const AUGMENTATION: SimplexId = SimplexId { dim: -1, index: 0 };

    pub fn vertex(index: u32) -> Self {
        SimplexId { dim: 0, index }
    }

    pub fn edge(index: u32) -> Self {
        SimplexId { dim: 1, index }
    }

    pub fn triangle(index: u32) -> Self {
        SimplexId { dim: 2, index }
    }
}

impl fmt::Display for SimplexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            -1 => write!(f, "aug"),
            0 => write!(f, "v{}", self.index),
            1 => write!(f, "e{}", self.index),
            _ => write!(f, "t{}", self.index),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    /// Guess the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            _ => None,
        }
    }
}

/// One violated closed-surface invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    DegenerateTriangle { triangle: u32 },
    DuplicateTriangle { triangle: u32, first: u32 },
    EdgeTriangleCount { edge: [u32; 2], count: usize },
    VertexLink { vertex: u32 },
    Disconnected { components: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DegenerateTriangle { triangle } => {
                write!(f, "triangle {triangle} repeats a vertex")
            }
            Diagnostic::DuplicateTriangle { triangle, first } => {
                write!(f, "triangle {triangle} duplicates triangle {first}")
            }
            Diagnostic::EdgeTriangleCount { edge, count } => write!(
                f,
                "edge ({}, {}) belongs to {count} triangle(s), expected 2",
                edge[0], edge[1]
            ),
            Diagnostic::VertexLink { vertex } => {
                write!(f, "link of vertex {vertex} is not a single cycle")
            }
            Diagnostic::Disconnected { components } => {
                write!(f, "surface has {components} connected components")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("not a closed surface: {}", join_diagnostics(.0))]
    Validation(Vec<Diagnostic>),
    #[error("unknown mesh format for {0}")]
    UnknownFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn format_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Format {
        line,
        message: message.into(),
    }
}

/// A triangulated surface with derived edge table and incidences.
///
/// Instances returned by [`load_mesh`] and [`SurfaceMesh::new`] are validated;
/// [`SurfaceMesh::from_parts`] builds the tables without validating so that
/// [`validate_closed_surface`] can report on broken input.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[u32; 3]>,
    edges: Vec<[u32; 2]>,
    triangle_edges: Vec<[u32; 3]>,
    edge_triangles: Vec<Vec<u32>>,
    vertex_edges: Vec<Vec<u32>>,
    /// Vertices of every flat cell, padded with `u32::MAX`.
    cell_vertices: Vec<[u32; 3]>,
}

impl SurfaceMesh {
    /// Build and validate.
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        let mesh = Self::from_parts(vertices, triangles)?;
        let diags = validate_closed_surface(&mesh);
        if diags.is_empty() {
            Ok(mesh)
        } else {
            Err(MeshError::Validation(diags))
        }
    }

    /// Build the incidence tables without checking the closed-surface invariants.
    /// Only out-of-range vertex indices are rejected.
    pub fn from_parts(vertices: Vec<Point3>, triangles: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        if let Some((t, _)) = triangles
            .iter()
            .enumerate()
            .find(|(_, tri)| tri.iter().any(|&v| v as usize >= nv))
        {
            return Err(format_err(0, format!("triangle {t} references a missing vertex")));
        }

        let mut edge_set: Vec<[u32; 2]> = triangles
            .iter()
            .flat_map(|&[a, b, c]| [[a, b], [b, c], [a, c]])
            .filter(|e| e[0] != e[1])
            .map(|[a, b]| [a.min(b), a.max(b)])
            .collect();
        edge_set.sort_unstable();
        edge_set.dedup();
        let edges = edge_set;
        let edge_index: HashMap<[u32; 2], u32> = edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as u32))
            .collect();

        let mut edge_triangles = vec![Vec::new(); edges.len()];
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, &[a, b, c]) in triangles.iter().enumerate() {
            let mut te = [u32::MAX; 3];
            for (slot, [p, q]) in [[a, b], [a, c], [b, c]].into_iter().enumerate() {
                if p == q {
                    continue;
                }
                let e = edge_index[&[p.min(q), p.max(q)]];
                te[slot] = e;
                edge_triangles[e as usize].push(t as u32);
            }
            triangle_edges.push(te);
        }

        let mut vertex_edges = vec![Vec::new(); nv];
        for (i, &[a, b]) in edges.iter().enumerate() {
            vertex_edges[a as usize].push(i as u32);
            vertex_edges[b as usize].push(i as u32);
        }

        let mut cell_vertices = Vec::with_capacity(1 + nv + edges.len() + triangles.len());
        cell_vertices.push([u32::MAX; 3]);
        cell_vertices.extend((0..nv as u32).map(|v| [v, u32::MAX, u32::MAX]));
        cell_vertices.extend(edges.iter().map(|&[a, b]| [a, b, u32::MAX]));
        cell_vertices.extend(triangles.iter().copied());

        Ok(SurfaceMesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            edge_triangles,
            vertex_edges,
            cell_vertices,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Edges as `(low, high)` vertex pairs in lexicographic order.
    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    /// The three edges of each triangle: `ab`, `ac`, `bc` for triangle `[a, b, c]`.
    pub fn triangle_edges(&self) -> &[[u32; 3]] {
        &self.triangle_edges
    }

    pub fn edge_triangles(&self, edge: u32) -> &[u32] {
        &self.edge_triangles[edge as usize]
    }

    pub fn vertex_edges(&self, vertex: u32) -> &[u32] {
        &self.vertex_edges[vertex as usize]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Number of cells including the augmentation cell.
    pub fn num_cells(&self) -> usize {
        self.cell_vertices.len()
    }

    pub fn flat_index(&self, id: SimplexId) -> usize {
        let i = id.index as usize;
        match id.dim {
            -1 => 0,
            0 => 1 + i,
            1 => 1 + self.num_vertices() + i,
            _ => 1 + self.num_vertices() + self.num_edges() + i,
        }
    }

    pub fn simplex(&self, flat: usize) -> SimplexId {
        let nv = self.num_vertices();
        let ne = self.num_edges();
        if flat == 0 {
            SimplexId::AUGMENTATION
        } else if flat <= nv {
            SimplexId::vertex((flat - 1) as u32)
        } else if flat <= nv + ne {
            SimplexId::edge((flat - 1 - nv) as u32)
        } else {
            SimplexId::triangle((flat - 1 - nv - ne) as u32)
        }
    }

    pub fn dim_of(&self, flat: usize) -> i8 {
        let nv = self.num_vertices();
        let ne = self.num_edges();
        if flat == 0 {
            -1
        } else if flat <= nv {
            0
        } else if flat <= nv + ne {
            1
        } else {
            2
        }
    }

    /// Vertex indices of a flat cell (empty for the augmentation cell).
    pub fn cell_vertices(&self, flat: usize) -> &[u32] {
        let n = (self.dim_of(flat) + 1) as usize;
        &self.cell_vertices[flat][..n]
    }

    /// Representative point: the vertex, the edge midpoint or the triangle barycenter.
    pub fn representative_point(&self, id: SimplexId) -> Point3 {
        let verts = self.cell_vertices(self.flat_index(id));
        let mut p = [0.0; 3];
        for &v in verts {
            for (acc, c) in p.iter_mut().zip(self.vertices[v as usize]) {
                *acc += c;
            }
        }
        let n = verts.len().max(1) as f64;
        p.map(|c| c / n)
    }

    /// Whether two equal-dimension cells share a face of dimension >= 0.
    ///
    /// Every vertex has the augmentation cell as a face; that face is not counted.
    pub fn shares_face(&self, a: SimplexId, b: SimplexId) -> bool {
        if a.dim <= 0 || a == b {
            return false;
        }
        let va = self.cell_vertices(self.flat_index(a));
        let vb = self.cell_vertices(self.flat_index(b));
        va.iter().any(|v| vb.contains(v))
    }

    /// Whether two equal-dimension cells are both faces of a common cell.
    pub fn shares_coface(&self, a: SimplexId, b: SimplexId) -> bool {
        if a == b {
            return false;
        }
        match a.dim {
            0 => self.vertex_edges[a.index as usize]
                .iter()
                .any(|&e| self.edges[e as usize].contains(&b.index)),
            1 => {
                let ta = &self.edge_triangles[a.index as usize];
                self.edge_triangles[b.index as usize]
                    .iter()
                    .any(|t| ta.contains(t))
            }
            _ => false,
        }
    }

    /// Whether `face` is a codimension-one face of `coface`.
    pub fn is_face_of(&self, face: usize, coface: usize) -> bool {
        let (df, dc) = (self.dim_of(face), self.dim_of(coface));
        if df + 1 != dc {
            return false;
        }
        if df == -1 {
            return true;
        }
        let vc = self.cell_vertices(coface);
        self.cell_vertices(face).iter().all(|v| vc.contains(v))
    }

    /// SHA-256 over vertex coordinate bits and triangle indices, as lowercase hex.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.vertices.len() as u64).to_le_bytes());
        for v in &self.vertices {
            for c in v {
                hasher.update(c.to_bits().to_le_bytes());
            }
        }
        hasher.update((self.triangles.len() as u64).to_le_bytes());
        for t in &self.triangles {
            for i in t {
                hasher.update(i.to_le_bytes());
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Largest axis-aligned extent of the vertex set.
    pub fn bounding_box(&self) -> (Point3, Point3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }
}

/// Z/2 boundary of every flat cell, as flat indices in ascending order.
///
/// Vertices have the augmentation cell as their only face.
pub fn boundary_columns(mesh: &SurfaceMesh) -> Vec<Vec<u32>> {
    let nv = mesh.num_vertices() as u32;
    let ne = mesh.num_edges() as u32;
    let mut cols = Vec::with_capacity(mesh.num_cells());
    cols.push(Vec::new());
    cols.extend((0..nv).map(|_| vec![0]));
    cols.extend(mesh.edges().iter().map(|&[a, b]| vec![1 + a, 1 + b]));
    cols.extend(mesh.triangle_edges().iter().map(|te| {
        let mut c: Vec<u32> = te.iter().map(|&e| 1 + nv + e).collect();
        c.sort_unstable();
        c
    }));
    debug_assert_eq!(cols.len(), (1 + nv + ne) as usize + mesh.num_triangles());
    cols
}

/// List every violated closed-surface invariant; empty iff the mesh is a
/// connected closed triangulated surface.
pub fn validate_closed_surface(mesh: &SurfaceMesh) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    let mut seen: BTreeMap<[u32; 3], u32> = BTreeMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let t = t as u32;
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            diags.push(Diagnostic::DegenerateTriangle { triangle: t });
            continue;
        }
        let mut key = *tri;
        key.sort_unstable();
        if let Some(&first) = seen.get(&key) {
            diags.push(Diagnostic::DuplicateTriangle { triangle: t, first });
        } else {
            seen.insert(key, t);
        }
    }

    for (e, tris) in mesh.edge_triangles.iter().enumerate() {
        if tris.len() != 2 {
            diags.push(Diagnostic::EdgeTriangleCount {
                edge: mesh.edges[e],
                count: tris.len(),
            });
        }
    }

    // The link of v is the graph of edges opposite v in its triangles; it must
    // be one cycle: every link vertex of degree two and the graph connected.
    let mut link: Vec<Vec<[u32; 2]>> = vec![Vec::new(); mesh.num_vertices()];
    for tri in &mesh.triangles {
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            continue;
        }
        for k in 0..3 {
            link[tri[k] as usize].push([tri[(k + 1) % 3], tri[(k + 2) % 3]]);
        }
    }
    for (v, edges) in link.iter().enumerate() {
        if !is_single_cycle(edges) {
            diags.push(Diagnostic::VertexLink { vertex: v as u32 });
        }
    }

    let components = count_components(mesh);
    if components != 1 {
        diags.push(Diagnostic::Disconnected { components });
    }
    diags
}

fn is_single_cycle(edges: &[[u32; 2]]) -> bool {
    if edges.len() < 3 {
        return false;
    }
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for &[a, b] in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|n| n.len() != 2) {
        return false;
    }
    // All degrees are two, so the graph is a disjoint union of cycles; walk one.
    let start = edges[0][0];
    let mut prev = start;
    let mut cur = adj[&start][0];
    let mut steps = 1;
    while cur != start {
        let n = &adj[&cur];
        let next = if n[0] == prev { n[1] } else { n[0] };
        prev = cur;
        cur = next;
        steps += 1;
    }
    steps == adj.len()
}

fn count_components(mesh: &SurfaceMesh) -> usize {
    let n = mesh.num_vertices();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        components += 1;
        seen[s] = true;
        queue.push_back(s as u32);
        while let Some(v) = queue.pop_front() {
            for &e in mesh.vertex_edges(v) {
                let [a, b] = mesh.edges[e as usize];
                let w = if a == v { b } else { a };
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    components
}

/// Parse and validate a mesh.
pub fn load_mesh<R: BufRead>(source: R, format: MeshFormat) -> Result<SurfaceMesh, MeshError> {
    let (vertices, triangles) = match format {
        MeshFormat::Off => parse_off(source)?,
        MeshFormat::Obj => parse_obj(source)?,
    };
    SurfaceMesh::new(vertices, triangles)
}

/// Load a mesh file, choosing the format by extension.
pub fn load_mesh_file(path: &Path) -> Result<SurfaceMesh, MeshError> {
    let format = MeshFormat::from_path(path)
        .ok_or_else(|| MeshError::UnknownFormat(path.display().to_string()))?;
    let file = std::fs::File::open(path)?;
    load_mesh(std::io::BufReader::new(file), format)
}

type RawMesh = (Vec<Point3>, Vec<[u32; 3]>);

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64, MeshError> {
    let tok = tok.ok_or_else(|| format_err(line, "missing coordinate"))?;
    tok.parse()
        .map_err(|_| format_err(line, format!("bad number {tok:?}")))
}

fn parse_off<R: BufRead>(source: R) -> Result<RawMesh, MeshError> {
    let mut lines = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim().to_string();
        if !content.is_empty() {
            lines.push((i + 1, content));
        }
    }
    let mut it = lines.into_iter();
    let (lno, header) = it.next().ok_or_else(|| format_err(1, "empty file"))?;
    if header != "OFF" {
        return Err(format_err(lno, "expected OFF header"));
    }
    let (lno, counts) = it.next().ok_or_else(|| format_err(lno, "missing counts line"))?;
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| format_err(lno, "bad counts line"))?;
    if counts.len() < 2 {
        return Err(format_err(lno, "counts line needs vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (lno, l) = it.next().ok_or_else(|| format_err(lno, "missing vertex line"))?;
        let mut toks = l.split_whitespace();
        vertices.push([
            parse_f64(toks.next(), lno)?,
            parse_f64(toks.next(), lno)?,
            parse_f64(toks.next(), lno)?,
        ]);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (lno, l) = it.next().ok_or_else(|| format_err(lno, "missing face line"))?;
        let idx: Vec<u64> = l
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| format_err(lno, "bad face record"))?;
        if idx.first() != Some(&3) {
            return Err(format_err(lno, "only triangular faces are supported"));
        }
        if idx.len() < 4 {
            return Err(format_err(lno, "face record is missing vertex indices"));
        }
        let tri = [idx[1], idx[2], idx[3]];
        if tri.iter().any(|&v| v as usize >= nv) {
            return Err(format_err(lno, "face references a missing vertex"));
        }
        triangles.push(tri.map(|v| v as u32));
    }
    Ok((vertices, triangles))
}

fn parse_obj<R: BufRead>(source: R) -> Result<RawMesh, MeshError> {
    let mut vertices = Vec::new();
    let mut faces: Vec<(usize, [i64; 3])> = Vec::new();
    let mut warned: Vec<String> = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let lno = i + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        let mut toks = content.split_whitespace();
        let Some(kind) = toks.next() else { continue };
        match kind {
            "v" => vertices.push([
                parse_f64(toks.next(), lno)?,
                parse_f64(toks.next(), lno)?,
                parse_f64(toks.next(), lno)?,
            ]),
            "f" => {
                let idx: Vec<i64> = toks
                    .map(|t| t.split('/').next().unwrap_or("").parse::<i64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| format_err(lno, "bad face record"))?;
                if idx.len() != 3 {
                    return Err(format_err(lno, "only triangular faces are supported"));
                }
                faces.push((lno, [idx[0], idx[1], idx[2]]));
            }
            other => {
                if !warned.iter().any(|w| w == other) {
                    log::warn!("ignoring OBJ record type {other:?} (first at line {lno})");
                    warned.push(other.to_string());
                }
            }
        }
    }
    let nv = vertices.len() as i64;
    let triangles = faces
        .into_iter()
        .map(|(lno, f)| {
            let mut tri = [0u32; 3];
            for (slot, &i) in tri.iter_mut().zip(&f) {
                // 1-based, negative indices count back from the last vertex.
                let zero = if i > 0 { i - 1 } else { nv + i };
                if i == 0 || zero < 0 || zero >= nv {
                    return Err(format_err(lno, format!("vertex index {i} out of range")));
                }
                *slot = zero as u32;
            }
            Ok(tri)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((vertices, triangles))
}

/// Write in the given format. Coordinates use the shortest representation that
/// parses back to the same bits.
pub fn write_mesh<W: Write>(mesh: &SurfaceMesh, format: MeshFormat, mut out: W) -> std::io::Result<()> {
    match format {
        MeshFormat::Off => {
            writeln!(out, "OFF")?;
            writeln!(out, "{} {} 0", mesh.num_vertices(), mesh.num_triangles())?;
            for v in &mesh.vertices {
                writeln!(out, "{:?} {:?} {:?}", v[0], v[1], v[2])?;
            }
            for t in &mesh.triangles {
                writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
            }
        }
        MeshFormat::Obj => {
            for v in &mesh.vertices {
                writeln!(out, "v {:?} {:?} {:?}", v[0], v[1], v[2])?;
            }
            for t in &mesh.triangles {
                writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TETRA: &str = "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n";

    fn tetra() -> SurfaceMesh {
        load_mesh(TETRA.as_bytes(), MeshFormat::Off).unwrap()
    }

    #[test]
    fn tetrahedron_counts() {
        let m = tetra();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_triangles()), (4, 6, 4));
        assert_eq!(m.num_cells(), 15);
        assert_eq!(m.edges(), &[[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]);
    }

    #[test]
    fn quad_face_is_rejected() {
        let src = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        match load_mesh(src.as_bytes(), MeshFormat::Off) {
            Err(MeshError::Format { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn obj_quad_is_rejected_with_line() {
        let src = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        match load_mesh(src.as_bytes(), MeshFormat::Obj) {
            Err(MeshError::Format { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_vertex_reports_line() {
        let src = "OFF\n4 4 0\n0 0 0\n1 x 0\n";
        match load_mesh(src.as_bytes(), MeshFormat::Off) {
            Err(MeshError::Format { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn obj_slash_and_negative_indices() {
        let src = "o tet\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nvn 0 0 1\n\
                   f 1/1/1 2/2/1 3/3/1\nf 1 2 4\nf -4 -2 -1\nf 2 3 4\n";
        let m = load_mesh(src.as_bytes(), MeshFormat::Obj).unwrap();
        assert_eq!(m.triangles()[2], [0, 2, 3]);
    }

    #[test]
    fn valid_tetrahedron_has_no_diagnostics() {
        assert!(validate_closed_surface(&tetra()).is_empty());
    }

    #[test]
    fn hole_reports_three_boundary_edges() {
        let m = SurfaceMesh::from_parts(
            tetra().vertices().to_vec(),
            vec![[0, 1, 2], [0, 1, 3], [0, 2, 3]],
        )
        .unwrap();
        let diags = validate_closed_surface(&m);
        let open: Vec<_> = diags
            .iter()
            .filter_map(|d| match d {
                Diagnostic::EdgeTriangleCount { edge, count: 1 } => Some(*edge),
                _ => None,
            })
            .collect();
        assert_eq!(open, vec![[1, 2], [1, 3], [2, 3]]);
    }

    #[test]
    fn two_tetrahedra_are_disconnected() {
        let mut verts = tetra().vertices().to_vec();
        verts.extend(tetra().vertices().iter().map(|v| [v[0] + 5.0, v[1], v[2]]));
        let mut tris = tetra().triangles().to_vec();
        tris.extend(tetra().triangles().iter().map(|t| t.map(|i| i + 4)));
        let m = SurfaceMesh::from_parts(verts, tris).unwrap();
        assert_eq!(
            validate_closed_surface(&m),
            vec![Diagnostic::Disconnected { components: 2 }]
        );
    }

    #[test]
    fn pinched_vertex_link_is_reported() {
        // Two tetrahedra glued at vertex 0: every edge has two triangles but
        // the link of vertex 0 is two cycles.
        let mut verts = tetra().vertices().to_vec();
        verts.extend([[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);
        let mut tris = tetra().triangles().to_vec();
        tris.extend([[0, 4, 5], [0, 4, 6], [0, 5, 6], [4, 5, 6]]);
        let m = SurfaceMesh::from_parts(verts, tris).unwrap();
        assert_eq!(validate_closed_surface(&m), vec![Diagnostic::VertexLink { vertex: 0 }]);
    }

    #[test]
    fn degenerate_and_duplicate_triangles() {
        let mut tris = tetra().triangles().to_vec();
        tris.push([2, 1, 0]);
        tris.push([1, 1, 2]);
        let m = SurfaceMesh::from_parts(tetra().vertices().to_vec(), tris).unwrap();
        let diags = validate_closed_surface(&m);
        assert!(diags.contains(&Diagnostic::DuplicateTriangle { triangle: 4, first: 0 }));
        assert!(diags.contains(&Diagnostic::DegenerateTriangle { triangle: 5 }));
    }

    #[test]
    fn boundary_columns_of_tetrahedron() {
        let m = tetra();
        let cols = boundary_columns(&m);
        assert!(cols[0].is_empty());
        assert_eq!(cols[m.flat_index(SimplexId::vertex(2))], vec![0]);
        // edge {0,2}
        assert_eq!(cols[m.flat_index(SimplexId::edge(1))], vec![1, 3]);
        // triangle {0,1,2} -> edges 01, 02, 12
        let expected: Vec<u32> = [0, 1, 3]
            .iter()
            .map(|&e| m.flat_index(SimplexId::edge(e)) as u32)
            .collect();
        assert_eq!(cols[m.flat_index(SimplexId::triangle(0))], expected);
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        let m = tetra();
        let cols = boundary_columns(&m);
        for t in 0..m.num_triangles() {
            let mut count = HashMap::new();
            for &e in &cols[m.flat_index(SimplexId::triangle(t as u32))] {
                for &v in &cols[e as usize] {
                    *count.entry(v).or_insert(0) += 1;
                }
            }
            assert!(count.values().all(|&c| c == 2));
        }
    }

    #[test]
    fn flat_index_round_trip() {
        let m = tetra();
        for f in 0..m.num_cells() {
            assert_eq!(m.flat_index(m.simplex(f)), f);
        }
    }

    #[test]
    fn off_round_trip_is_bit_exact() {
        let verts = vec![
            [0.1, -0.0, 1e-300],
            [1.0 / 3.0, 2.0f64.sqrt(), -7.25],
            [0.0, 1.0, 0.0],
            [std::f64::consts::PI, 0.0, 1.0],
        ];
        let m = SurfaceMesh::new(verts, tetra().triangles().to_vec()).unwrap();
        for format in [MeshFormat::Off, MeshFormat::Obj] {
            let mut buf = Vec::new();
            write_mesh(&m, format, &mut buf).unwrap();
            let back = load_mesh(buf.as_slice(), format).unwrap();
            for (a, b) in m.vertices().iter().zip(back.vertices()) {
                for k in 0..3 {
                    assert_eq!(a[k].to_bits(), b[k].to_bits());
                }
            }
            assert_eq!(m.checksum(), back.checksum());
        }
    }

    #[test]
    fn face_and_coface_sharing() {
        let m = tetra();
        // e01 and e02 share vertex 0; e01 and e23 share nothing.
        assert!(m.shares_face(SimplexId::edge(0), SimplexId::edge(1)));
        assert!(!m.shares_face(SimplexId::edge(0), SimplexId::edge(5)));
        // Vertices never count the augmentation cell as a shared face.
        assert!(!m.shares_face(SimplexId::vertex(0), SimplexId::vertex(1)));
        assert!(m.shares_coface(SimplexId::vertex(0), SimplexId::vertex(1)));
        assert!(m.shares_coface(SimplexId::edge(0), SimplexId::edge(1)));
        assert!(!m.shares_coface(SimplexId::triangle(0), SimplexId::triangle(1)));
    }
}
