//! Planar meshes with straight edges and constant face degree.
//!
//! The mesh stores:
//! - vertex coordinates (used only for validation and output, never by the
//!   variational core),
//! - oriented faces as counterclockwise corner lists,
//! - the directed edge set, closed under reversal and containing a unit loop
//!   `(x, x)` at every vertex,
//! - per-vertex incidence: which faces touch a vertex and at which local index.
//!
//! Index convention, used by every module in this crate: a face with corners
//! `(x_1, ..., x_k)` has edges `[x]_i = (x_{i-1}, x_i)` with indices taken
//! modulo k into `1..=k`, so `[x]_1 = (x_k, x_1)`. The local index of a vertex
//! `u` in a face is the unique `i` with `x_{i-1} = u`; equivalently, the slot
//! whose tangent lift moves the field value at `u`.
//!
//! Meshes are immutable after construction and safe for concurrent reads.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Maps any 1-based index to `1..=k` ("modulo k, plus one").
pub fn mod1(i: i64, k: usize) -> usize {
    ((i - 1).rem_euclid(k as i64) + 1) as usize
}

/// A mesh vertex: dense id plus grid-unit coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub position: [f64; 2],
}

/// A directed edge between vertex ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub src: usize,
    pub dst: usize,
}

impl DirectedEdge {
    pub fn new(src: usize, dst: usize) -> Self {
        DirectedEdge { src, dst }
    }

    pub fn reversed(&self) -> Self {
        DirectedEdge {
            src: self.dst,
            dst: self.src,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.src == self.dst
    }
}

/// An oriented face: corner ids listed counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub corners: Vec<usize>,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.corners.len()
    }

    /// The i-th boundary edge, `[x]_i = (x_{i-1}, x_i)`, for i in `1..=k`.
    pub fn edge(&self, i: usize) -> DirectedEdge {
        let k = self.degree();
        let prev = self.corners[mod1(i as i64 - 1, k) - 1];
        let cur = self.corners[mod1(i as i64, k) - 1];
        DirectedEdge::new(prev, cur)
    }

    /// All k boundary edges in slot order.
    pub fn edges(&self) -> Vec<DirectedEdge> {
        (1..=self.degree()).map(|i| self.edge(i)).collect()
    }
}

/// How the mesh was generated; `Custom` for loaded meshes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeshKind {
    Square { nx: usize, ny: usize },
    Triangular { nx: usize, ny: usize },
    Custom,
}

/// A validated planar mesh with constant face degree.
#[derive(Clone, Debug)]
pub struct MeshTopology {
    k: usize,
    kind: MeshKind,
    vertices: Vec<Vertex>,
    faces: Vec<Face>,
    edges: BTreeSet<DirectedEdge>,
    /// face traversing each directed edge, at most one per direction
    traversed_by: BTreeMap<DirectedEdge, usize>,
    /// per vertex: (face id, local index) pairs
    faces_at: Vec<Vec<(usize, usize)>>,
    interior: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct MeshJson {
    k: usize,
    vertices: Vec<[f64; 2]>,
    faces: Vec<Vec<usize>>,
    /// Undirected edges that lie on no face (present in generated triangular
    /// meshes); omitted when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    extra_edges: Vec<[usize; 2]>,
}

impl MeshTopology {
    /// Regular quadrilateral grid: `nx * ny` vertices, `(nx-1)(ny-1)` faces of
    /// degree 4, all counterclockwise, ids row-major.
    pub fn build_square_mesh(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::DimensionTooSmall { nx, ny });
        }
        if dx <= 0.0 || dy <= 0.0 {
            return Err(Error::InvalidMesh("spacings must be positive".into()));
        }
        let positions: Vec<[f64; 2]> = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| [i as f64 * dx, j as f64 * dy]))
            .collect();
        let id = |i: usize, j: usize| j * nx + i;
        let mut faces = Vec::with_capacity((nx - 1) * (ny - 1));
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut mesh = Self::from_parts(4, positions, faces, &[])?;
        mesh.kind = MeshKind::Square { nx, ny };
        Ok(mesh)
    }

    /// Triangular grid with faces `((i,j), (i+1,j), (i+1,j+1))` and the full
    /// set of horizontal, vertical, and diagonal edges. Grid corners have
    /// degree 2 and are flagged boundary.
    pub fn build_triangular_mesh(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::DimensionTooSmall { nx, ny });
        }
        let positions: Vec<[f64; 2]> = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| [i as f64, j as f64]))
            .collect();
        let id = |i: usize, j: usize| j * nx + i;
        let mut faces = Vec::with_capacity((nx - 1) * (ny - 1));
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            }
        }
        let mut extra = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if i + 1 < nx {
                    extra.push([id(i, j), id(i + 1, j)]);
                }
                if j + 1 < ny {
                    extra.push([id(i, j), id(i, j + 1)]);
                }
                if i + 1 < nx && j + 1 < ny {
                    extra.push([id(i, j), id(i + 1, j + 1)]);
                }
            }
        }
        let mut mesh = Self::from_parts(3, positions, faces, &extra)?;
        mesh.kind = MeshKind::Triangular { nx, ny };
        Ok(mesh)
    }

    /// Builds and validates a mesh from raw parts. `extra_edges` lists
    /// undirected edges that are not on any face.
    pub fn from_parts(
        k: usize,
        positions: Vec<[f64; 2]>,
        face_corners: Vec<Vec<usize>>,
        extra_edges: &[[usize; 2]],
    ) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidMesh(format!(
                "face degree must be at least 3, got {k}"
            )));
        }
        let n = positions.len();
        let vertices: Vec<Vertex> = positions
            .into_iter()
            .enumerate()
            .map(|(id, position)| Vertex { id, position })
            .collect();

        let mut faces = Vec::with_capacity(face_corners.len());
        let mut edges: BTreeSet<DirectedEdge> = BTreeSet::new();
        let mut traversed_by: BTreeMap<DirectedEdge, usize> = BTreeMap::new();
        let mut faces_at: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];

        for (fid, corners) in face_corners.into_iter().enumerate() {
            if corners.len() != k {
                return Err(Error::InvalidMesh(format!(
                    "face {fid} has degree {}, expected {k}",
                    corners.len()
                )));
            }
            let mut seen = BTreeSet::new();
            for &c in &corners {
                if c >= n {
                    return Err(Error::UnknownVertex(c));
                }
                if !seen.insert(c) {
                    return Err(Error::InvalidMesh(format!(
                        "face {fid} repeats vertex {c}"
                    )));
                }
            }
            let face = Face { corners };
            if signed_area(&face, &vertices) <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "face {fid} is not counterclockwise"
                )));
            }
            for (slot, edge) in face.edges().into_iter().enumerate() {
                if traversed_by.insert(edge, fid).is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({}, {}) traversed twice in the same direction",
                        edge.src, edge.dst
                    )));
                }
                edges.insert(edge);
                edges.insert(edge.reversed());
                let _ = slot;
            }
            for (pos, &c) in face.corners.iter().enumerate() {
                // vertex at position p (1-based) is the source of edge p+1
                let slot = mod1(pos as i64 + 2, k);
                faces_at[c].push((fid, slot));
            }
            faces.push(face);
        }

        for &[a, b] in extra_edges {
            if a >= n || b >= n {
                return Err(Error::UnknownVertex(a.max(b)));
            }
            if a == b {
                return Err(Error::InvalidMesh(format!("loop edge at vertex {a}")));
            }
            edges.insert(DirectedEdge::new(a, b));
            edges.insert(DirectedEdge::new(b, a));
        }
        // unit loops at every vertex
        for v in 0..n {
            edges.insert(DirectedEdge::new(v, v));
        }

        for list in faces_at.iter_mut() {
            list.sort_unstable();
        }
        let interior: Vec<bool> = (0..n)
            .map(|v| {
                let mut slots: Vec<usize> = faces_at[v].iter().map(|&(_, s)| s).collect();
                slots.sort_unstable();
                slots == (1..=k).collect::<Vec<_>>()
            })
            .collect();

        let mesh = MeshTopology {
            k,
            kind: MeshKind::Custom,
            vertices,
            faces,
            edges,
            traversed_by,
            faces_at,
            interior,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidMesh("no vertices".into()));
        }
        // connectivity over non-loop edges
        let adjacency = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidMesh("mesh is not connected".into()));
        }
        // interior vertices must have degree > 2
        for (v, neighbors) in adjacency.iter().enumerate() {
            if self.interior[v] && neighbors.len() <= 2 {
                return Err(Error::InvalidMesh(format!(
                    "interior vertex {v} has degree {} <= 2",
                    neighbors.len()
                )));
            }
        }
        // no vertex strictly inside a face
        for (fid, face) in self.faces.iter().enumerate() {
            for vertex in &self.vertices {
                if face.corners.contains(&vertex.id) {
                    continue;
                }
                if point_strictly_inside(vertex.position, face, &self.vertices) {
                    return Err(Error::InvalidMesh(format!(
                        "vertex {} lies inside face {fid}",
                        vertex.id
                    )));
                }
            }
        }
        Ok(())
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            if !e.is_loop() {
                adjacency[e.src].push(e.dst);
            }
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        adjacency
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> Result<&Face> {
        self.faces.get(id).ok_or(Error::UnknownFace(id))
    }

    pub fn edges(&self) -> impl Iterator<Item = &DirectedEdge> {
        self.edges.iter()
    }

    pub fn contains_edge(&self, e: DirectedEdge) -> bool {
        self.edges.contains(&e)
    }

    /// All face ids, for whole-mesh regions.
    pub fn all_faces(&self) -> BTreeSet<usize> {
        (0..self.faces.len()).collect()
    }

    /// Incident faces of `u` with the local index of `u` in each.
    pub fn faces_at_vertex(&self, u: usize) -> Result<&[(usize, usize)]> {
        self.faces_at
            .get(u)
            .map(|v| v.as_slice())
            .ok_or(Error::UnknownVertex(u))
    }

    /// A vertex is interior when its incident faces cover every local index
    /// exactly once; everything else is flagged boundary.
    pub fn is_interior(&self, u: usize) -> bool {
        self.interior.get(u).copied().unwrap_or(false)
    }

    pub fn is_boundary(&self, u: usize) -> bool {
        !self.is_interior(u)
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.interior[v])
            .collect()
    }

    /// Directed edges of `region` whose reverse traversal lies outside it.
    ///
    /// An edge `(u, v)` traversed by a face in the region belongs to the
    /// boundary exactly when the face traversing `(v, u)` is absent from the
    /// region or does not exist.
    pub fn boundary_of(&self, region: &BTreeSet<usize>) -> Result<BTreeSet<DirectedEdge>> {
        for &f in region {
            if f >= self.faces.len() {
                return Err(Error::UnknownFace(f));
            }
        }
        let mut boundary = BTreeSet::new();
        for &f in region {
            for edge in self.faces[f].edges() {
                match self.traversed_by.get(&edge.reversed()) {
                    Some(other) if region.contains(other) => {}
                    _ => {
                        boundary.insert(edge);
                    }
                }
            }
        }
        Ok(boundary)
    }

    /// The face traversing a directed edge, if any.
    pub fn face_traversing(&self, e: DirectedEdge) -> Option<usize> {
        self.traversed_by.get(&e).copied()
    }

    /// Row-major vertex id on generated grid meshes.
    pub fn grid_vertex(&self, i: usize, j: usize) -> Option<usize> {
        match self.kind {
            MeshKind::Square { nx, ny } | MeshKind::Triangular { nx, ny } => {
                (i < nx && j < ny).then_some(j * nx + i)
            }
            MeshKind::Custom => None,
        }
    }

    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        match self.kind {
            MeshKind::Square { nx, ny } | MeshKind::Triangular { nx, ny } => Some((nx, ny)),
            MeshKind::Custom => None,
        }
    }

    /// Serializes as `{k, vertices, faces}` (plus non-face edges when present).
    pub fn to_json(&self) -> Result<String> {
        let face_edge_set: BTreeSet<DirectedEdge> = self
            .faces
            .iter()
            .flat_map(|f| f.edges())
            .flat_map(|e| [e, e.reversed()])
            .collect();
        let extra_edges: Vec<[usize; 2]> = self
            .edges
            .iter()
            .filter(|e| !e.is_loop() && e.src < e.dst && !face_edge_set.contains(e))
            .map(|e| [e.src, e.dst])
            .collect();
        let json = MeshJson {
            k: self.k,
            vertices: self.vertices.iter().map(|v| v.position).collect(),
            faces: self.faces.iter().map(|f| f.corners.clone()).collect(),
            extra_edges,
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    /// Loads a mesh and revalidates every invariant.
    pub fn from_json(text: &str) -> Result<Self> {
        let json: MeshJson = serde_json::from_str(text)?;
        Self::from_parts(json.k, json.vertices, json.faces, &json.extra_edges)
    }
}

fn signed_area(face: &Face, vertices: &[Vertex]) -> f64 {
    let mut acc = 0.0;
    let k = face.degree();
    for i in 0..k {
        let [x1, y1] = vertices[face.corners[i]].position;
        let [x2, y2] = vertices[face.corners[(i + 1) % k]].position;
        acc += x1 * y2 - x2 * y1;
    }
    acc * 0.5
}

fn point_strictly_inside(p: [f64; 2], face: &Face, vertices: &[Vertex]) -> bool {
    // Ray casting with a strictness margin; corners were excluded upstream.
    let k = face.degree();
    let mut inside = false;
    for i in 0..k {
        let [x1, y1] = vertices[face.corners[i]].position;
        let [x2, y2] = vertices[face.corners[(i + 1) % k]].position;
        // on-segment points are not strict interior
        let cross = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1);
        let dot = (p[0] - x1) * (p[0] - x2) + (p[1] - y1) * (p[1] - y2);
        if cross.abs() < 1e-12 && dot <= 1e-12 {
            return false;
        }
        if (y1 > p[1]) != (y2 > p[1]) {
            let t = (p[1] - y1) / (y2 - y1);
            if p[0] < x1 + t * (x2 - x1) {
                inside = !inside;
            }
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_square_grid() {
        let m = MeshTopology::build_square_mesh(2, 2, 1.0, 1.0).unwrap();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_faces(), 1);
        assert_eq!(m.face(0).unwrap().corners, vec![0, 1, 3, 2]);
        assert!(signed_area(m.face(0).unwrap(), m.vertices()) > 0.0);
    }

    #[test]
    fn directed_edge_closure_holds() {
        let m = MeshTopology::build_square_mesh(2, 2, 1.0, 1.0).unwrap();
        for face in m.faces() {
            for e in face.edges() {
                assert!(m.contains_edge(e));
                assert!(m.contains_edge(e.reversed()));
            }
        }
        for v in 0..m.n_vertices() {
            assert!(m.contains_edge(DirectedEdge::new(v, v)));
        }
    }

    #[test]
    fn three_by_three_grid_enumeration() {
        // Hand enumeration: 9 vertices, 4 faces, the center vertex (id 4)
        // belongs to all four faces with local indices 1..4.
        let m = MeshTopology::build_square_mesh(3, 3, 1.0, 1.0).unwrap();
        assert_eq!(m.n_vertices(), 9);
        assert_eq!(m.n_faces(), 4);
        let at_center = m.faces_at_vertex(4).unwrap();
        assert_eq!(at_center.len(), 4);
        let mut slots: Vec<usize> = at_center.iter().map(|&(_, s)| s).collect();
        slots.sort_unstable();
        assert_eq!(slots, vec![1, 2, 3, 4]);
        assert!(m.is_interior(4));
        for v in [0, 1, 2, 3, 5, 6, 7, 8] {
            assert!(m.is_boundary(v));
        }
    }

    #[test]
    fn corner_vertex_touches_one_face() {
        let m = MeshTopology::build_square_mesh(3, 3, 1.0, 1.0).unwrap();
        assert_eq!(m.faces_at_vertex(0).unwrap().len(), 1);
        assert!(m.faces_at_vertex(99).is_err());
    }

    #[test]
    fn rejects_degenerate_dimensions() {
        assert!(matches!(
            MeshTopology::build_square_mesh(1, 5, 1.0, 1.0),
            Err(Error::DimensionTooSmall { .. })
        ));
        assert!(matches!(
            MeshTopology::build_triangular_mesh(2, 1),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn smallest_triangular_grids() {
        let m = MeshTopology::build_triangular_mesh(2, 2).unwrap();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_faces(), 1);
        let m = MeshTopology::build_triangular_mesh(3, 2).unwrap();
        assert_eq!(m.n_vertices(), 6);
        assert_eq!(m.n_faces(), 2);
        for f in m.faces() {
            assert_eq!(f.degree(), 3);
        }
    }

    #[test]
    fn triangular_interior_vertex_covers_each_slot_once() {
        let m = MeshTopology::build_triangular_mesh(3, 3).unwrap();
        let center = m.grid_vertex(1, 1).unwrap();
        let at = m.faces_at_vertex(center).unwrap();
        assert_eq!(at.len(), 3);
        let mut slots: Vec<usize> = at.iter().map(|&(_, s)| s).collect();
        slots.sort_unstable();
        assert_eq!(slots, vec![1, 2, 3]);
        assert!(m.is_interior(center));
    }

    #[test]
    fn triangular_face_shape_matches_the_generator() {
        let m = MeshTopology::build_triangular_mesh(3, 3).unwrap();
        let id = |i: usize, j: usize| m.grid_vertex(i, j).unwrap();
        assert!(m
            .faces()
            .iter()
            .any(|f| f.corners == vec![id(1, 1), id(2, 1), id(2, 2)]));
    }

    #[test]
    fn boundary_of_full_mesh_is_the_perimeter() {
        let m = MeshTopology::build_square_mesh(3, 3, 1.0, 1.0).unwrap();
        let boundary = m.boundary_of(&m.all_faces()).unwrap();
        assert_eq!(boundary.len(), 8);
        // perimeter edges only: none touches the center vertex 4
        for e in &boundary {
            assert_ne!(e.src, 4);
            assert_ne!(e.dst, 4);
        }
    }

    #[test]
    fn boundary_of_empty_region_is_empty() {
        let m = MeshTopology::build_square_mesh(3, 3, 1.0, 1.0).unwrap();
        assert!(m.boundary_of(&BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn boundary_of_single_face_is_its_edge_cycle() {
        // A face sharing two edges with neighbors: boundary is all 4 of its
        // edges (2 rim + 2 shared).
        let m = MeshTopology::build_square_mesh(3, 3, 1.0, 1.0).unwrap();
        let region: BTreeSet<usize> = [0].into_iter().collect();
        let boundary = m.boundary_of(&region).unwrap();
        let expected: BTreeSet<DirectedEdge> =
            m.face(0).unwrap().edges().into_iter().collect();
        assert_eq!(boundary, expected);
    }

    #[test]
    fn merging_regions_cancels_exactly_the_shared_edges() {
        // the boundary of a union differs from the symmetric difference of
        // the boundaries only through the shared edges (both directions)
        let m = MeshTopology::build_square_mesh(3, 3, 1.0, 1.0).unwrap();
        let region_a: BTreeSet<usize> = [0].into_iter().collect();
        let region_b: BTreeSet<usize> = [1].into_iter().collect();
        let union: BTreeSet<usize> = [0, 1].into_iter().collect();
        let ba = m.boundary_of(&region_a).unwrap();
        let bb = m.boundary_of(&region_b).unwrap();
        let bu = m.boundary_of(&union).unwrap();
        let sym_diff: BTreeSet<DirectedEdge> =
            ba.symmetric_difference(&bb).copied().collect();
        let dropped: BTreeSet<DirectedEdge> =
            sym_diff.difference(&bu).copied().collect();
        // faces 0 and 1 share the undirected edge {1, 4}
        let shared: BTreeSet<DirectedEdge> =
            [DirectedEdge::new(1, 4), DirectedEdge::new(4, 1)]
                .into_iter()
                .collect();
        assert_eq!(dropped, shared);
        assert!(bu.is_subset(&sym_diff));
    }

    #[test]
    fn boundary_of_rejects_unknown_faces() {
        let m = MeshTopology::build_square_mesh(2, 2, 1.0, 1.0).unwrap();
        let region: BTreeSet<usize> = [7].into_iter().collect();
        assert!(matches!(m.boundary_of(&region), Err(Error::UnknownFace(7))));
    }

    #[test]
    fn shared_edges_are_traversed_in_opposite_directions() {
        let m = MeshTopology::build_square_mesh(3, 3, 1.0, 1.0).unwrap();
        let mut shared = 0;
        for face in m.faces() {
            for e in face.edges() {
                if m.face_traversing(e.reversed()).is_some() {
                    shared += 1;
                    assert!(m.face_traversing(e).is_some());
                }
            }
        }
        assert_eq!(shared, 8); // 4 interior undirected edges, both directions
    }

    #[test]
    fn clockwise_faces_are_rejected() {
        let positions = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let faces = vec![vec![0, 3, 2, 1]]; // clockwise
        assert!(matches!(
            MeshTopology::from_parts(4, positions, faces, &[]),
            Err(Error::InvalidMesh(_))
        ));
    }

    #[test]
    fn disconnected_meshes_are_rejected() {
        let positions = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [5.0, 5.0],
            [6.0, 5.0],
            [6.0, 6.0],
            [5.0, 6.0],
        ];
        let faces = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]];
        assert!(matches!(
            MeshTopology::from_parts(4, positions, faces, &[]),
            Err(Error::InvalidMesh(_))
        ));
    }

    #[test]
    fn json_round_trip_preserves_topology() {
        for mesh in [
            MeshTopology::build_square_mesh(3, 4, 0.5, 1.0).unwrap(),
            MeshTopology::build_triangular_mesh(3, 3).unwrap(),
        ] {
            let text = mesh.to_json().unwrap();
            let back = MeshTopology::from_json(&text).unwrap();
            assert_eq!(back.k(), mesh.k());
            assert_eq!(back.n_vertices(), mesh.n_vertices());
            assert_eq!(back.n_faces(), mesh.n_faces());
            let a: Vec<_> = mesh.edges().collect();
            let b: Vec<_> = back.edges().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn bfs_reaches_every_vertex() {
        let m = MeshTopology::build_triangular_mesh(4, 3).unwrap();
        // validation already BFS-checks connectivity; assert the adjacency here
        let adj = m.adjacency();
        assert!(adj.iter().all(|l| !l.is_empty()));
    }

    #[test]
    fn mod1_follows_the_cyclic_convention() {
        assert_eq!(mod1(1, 4), 1);
        assert_eq!(mod1(4, 4), 4);
        assert_eq!(mod1(5, 4), 1);
        assert_eq!(mod1(0, 4), 4);
        assert_eq!(mod1(-1, 4), 3);
    }
}
