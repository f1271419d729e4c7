//! Discrete fields: vertex values plus edge arrows satisfying the morphism
//! axioms, their unique extension along paths, induced jets, and variations.
//!
//! A field stores both directions of every edge explicitly; validation checks
//! consistency instead of deriving one direction from the other, so that
//! construction bugs surface as axiom violations. Vertex maps are partial: a
//! boundary-only field is a legal value, and missing entries show up as
//! structured errors from the operations that need them.
//!
//! Infinitesimal variations are vertex-indexed: the varying curve attached to
//! an edge endpoint depends only on the vertex, so one fiber vector per vertex
//! determines the whole variation. Finite variations are realized by flowing
//! every vertex along its alpha-fiber curve.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::groupoid::{AlgebroidVector, BasePoint, Groupoid, GroupoidElement};
use crate::jet::{make_jet, JetElement};
use crate::mesh::{DirectedEdge, MeshTopology};
use crate::Result;

/// A discrete field: `vertex_values` maps vertices to base points and
/// `edge_values` maps directed edges to arrows.
#[derive(Clone, Debug, Default)]
pub struct DiscreteField {
    vertex_values: BTreeMap<usize, BasePoint>,
    edge_values: BTreeMap<(usize, usize), GroupoidElement>,
}

impl DiscreteField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Field generated by one state per vertex: base points for pair
    /// realizations, gauge potentials for groups. Every mesh edge (loops
    /// included) receives the induced arrow.
    pub fn from_vertex_states(
        g: &Groupoid,
        mesh: &MeshTopology,
        states: &[DVector<f64>],
    ) -> Result<Self> {
        if states.len() != mesh.n_vertices() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_vertices(),
                got: states.len(),
            });
        }
        let mut field = DiscreteField::new();
        for (v, s) in states.iter().enumerate() {
            field
                .vertex_values
                .insert(v, g.vertex_value_from_state(s));
        }
        for e in mesh.edges() {
            let val = g.edge_from_states(&states[e.src], &states[e.dst])?;
            field.edge_values.insert((e.src, e.dst), val);
        }
        Ok(field)
    }

    /// Constant field: every vertex at `x`, every edge the unit at `x`.
    pub fn constant(g: &Groupoid, mesh: &MeshTopology, x: &BasePoint) -> Self {
        let mut field = DiscreteField::new();
        for v in 0..mesh.n_vertices() {
            field.vertex_values.insert(v, x.clone());
        }
        let unit = g.identity(x);
        for e in mesh.edges() {
            field.edge_values.insert((e.src, e.dst), unit.clone());
        }
        field
    }

    pub fn set_vertex(&mut self, v: usize, value: BasePoint) {
        self.vertex_values.insert(v, value);
    }

    pub fn set_edge(&mut self, e: DirectedEdge, value: GroupoidElement) {
        self.edge_values.insert((e.src, e.dst), value);
    }

    pub fn vertex_value(&self, v: usize) -> Result<&BasePoint> {
        self.vertex_values
            .get(&v)
            .ok_or(Error::MissingVertexValue(v))
    }

    pub fn edge_value(&self, e: DirectedEdge) -> Result<&GroupoidElement> {
        self.edge_values
            .get(&(e.src, e.dst))
            .ok_or(Error::MissingEdgeValue {
                src: e.src,
                dst: e.dst,
            })
    }

    pub fn has_edge(&self, e: DirectedEdge) -> bool {
        self.edge_values.contains_key(&(e.src, e.dst))
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&usize, &BasePoint)> {
        self.vertex_values.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&(usize, usize), &GroupoidElement)> {
        self.edge_values.iter()
    }

    /// Serializes as flat coefficient arrays keyed by vertex and edge.
    pub fn to_json(&self) -> Result<String> {
        let json = FieldJson {
            vertices: self
                .vertex_values
                .iter()
                .map(|(v, p)| (*v, p.coords().iter().copied().collect()))
                .collect(),
            edges: self
                .edge_values
                .iter()
                .map(|(&(s, d), e)| (s, d, e.to_vec()))
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    /// Loads a field, validating every payload against the realization.
    pub fn from_json(g: &Groupoid, text: &str) -> Result<Self> {
        let json: FieldJson = serde_json::from_str(text)?;
        let mut field = DiscreteField::new();
        for (v, coords) in json.vertices {
            field.vertex_values.insert(v, g.base_point(coords)?);
        }
        for (s, d, data) in json.edges {
            field
                .edge_values
                .insert((s, d), g.element_from_flat(data)?);
        }
        Ok(field)
    }

    /// Vertex values as a row-major grid of scalars, one CSV row per mesh row.
    /// Pair-groupoid fields over R^1 on generated grid meshes only.
    pub fn vertex_grid_csv(&self, mesh: &MeshTopology) -> Result<String> {
        let (nx, ny) = mesh
            .grid_dims()
            .ok_or_else(|| Error::WrongMeshType("grid export needs a generated mesh".into()))?;
        let mut out = String::new();
        for j in 0..ny {
            let mut row = Vec::with_capacity(nx);
            for i in 0..nx {
                let v = mesh.grid_vertex(i, j).unwrap();
                let p = self.vertex_value(v)?;
                row.push(
                    p.coords()
                        .iter()
                        .map(|x| crate::fmt_g17(*x))
                        .collect::<Vec<_>>()
                        .join(";"),
                );
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    vertices: Vec<(usize, Vec<f64>)>,
    edges: Vec<(usize, usize, Vec<f64>)>,
}

/// One morphism-axiom violation, with the offending edge or vertex.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldViolation {
    /// alpha/beta of the edge value disagree with the endpoint vertex values.
    AnchorMismatch { edge: (usize, usize), defect: f64 },
    /// The reverse edge does not carry the inverse arrow.
    InversionMismatch { edge: (usize, usize), defect: f64 },
    /// The loop at a vertex is not the unit at its value.
    UnitMismatch { vertex: usize, defect: f64 },
    /// An edge of the mesh has no value.
    MissingEdge { edge: (usize, usize) },
    /// A vertex of the mesh has no value.
    MissingVertex { vertex: usize },
}

/// Validation outcome; `violations` is empty for a valid field.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<FieldViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&FieldViolation> {
        self.violations.first()
    }
}

/// Checks the three morphism axioms on every mesh edge: anchor compatibility,
/// inversion consistency, and the unit condition on loops. Returns a report,
/// never an error.
pub fn validate_field(g: &Groupoid, field: &DiscreteField, mesh: &MeshTopology) -> ValidationReport {
    let tol = g.tol.compose_tol;
    let mut report = ValidationReport::default();
    for v in 0..mesh.n_vertices() {
        if !field.vertex_values.contains_key(&v) {
            report
                .violations
                .push(FieldViolation::MissingVertex { vertex: v });
        }
    }
    for e in mesh.edges() {
        let key = (e.src, e.dst);
        let Some(value) = field.edge_values.get(&key) else {
            report
                .violations
                .push(FieldViolation::MissingEdge { edge: key });
            continue;
        };
        // axiom 1: anchors match the vertex values
        if let (Some(pu), Some(pv)) = (
            field.vertex_values.get(&e.src),
            field.vertex_values.get(&e.dst),
        ) {
            let defect = g
                .base_distance(&g.alpha(value), pu)
                .max(g.base_distance(&g.beta(value), pv));
            if defect > tol {
                report
                    .violations
                    .push(FieldViolation::AnchorMismatch { edge: key, defect });
            }
        }
        if e.is_loop() {
            // axiom 3: loops carry units
            if let Some(p) = field.vertex_values.get(&e.src) {
                let defect = g.element_distance(value, &g.identity(p));
                if defect > tol {
                    report.violations.push(FieldViolation::UnitMismatch {
                        vertex: e.src,
                        defect,
                    });
                }
            }
        } else if e.src < e.dst {
            // axiom 2: the reverse edge carries the inverse (checked once per
            // undirected edge)
            match field.edge_values.get(&(e.dst, e.src)) {
                Some(reverse) => {
                    if let Ok(inv) = g.inverse(value) {
                        let defect = g.element_distance(reverse, &inv);
                        if defect > tol {
                            report
                                .violations
                                .push(FieldViolation::InversionMismatch { edge: key, defect });
                        }
                    }
                }
                None => {
                    report.violations.push(FieldViolation::MissingEdge {
                        edge: (e.dst, e.src),
                    });
                }
            }
        }
    }
    report
}

/// The unique morphism extension evaluated at `(x, y)`: the product of edge
/// values along a breadth-first path. Valid fields are path independent, so
/// the choice of path does not matter.
pub fn extend_to_morphism(
    g: &Groupoid,
    field: &DiscreteField,
    mesh: &MeshTopology,
    x: usize,
    y: usize,
) -> Result<GroupoidElement> {
    if x >= mesh.n_vertices() {
        return Err(Error::UnknownVertex(x));
    }
    if y >= mesh.n_vertices() {
        return Err(Error::UnknownVertex(y));
    }
    if x == y {
        return Ok(g.identity(field.vertex_value(x)?));
    }
    let path = bfs_path(mesh, x, y).ok_or_else(|| {
        Error::InvalidMesh(format!("no path between vertices {x} and {y}"))
    })?;
    product_along(g, field, &path)
}

/// Product of edge values along explicit path vertices.
pub fn product_along(
    g: &Groupoid,
    field: &DiscreteField,
    path: &[usize],
) -> Result<GroupoidElement> {
    let mut acc = field.edge_value(DirectedEdge::new(path[0], path[1]))?.clone();
    for w in path.windows(2).skip(1) {
        let next = field.edge_value(DirectedEdge::new(w[0], w[1]))?;
        acc = g.compose(&acc, next)?;
    }
    Ok(acc)
}

fn bfs_path(mesh: &MeshTopology, x: usize, y: usize) -> Option<Vec<usize>> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([x]);
    prev.insert(x, x);
    while let Some(u) = queue.pop_front() {
        if u == y {
            let mut path = vec![y];
            let mut cur = y;
            while cur != x {
                cur = prev[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for e in mesh.edges() {
            if e.src == u && !e.is_loop() && !prev.contains_key(&e.dst) {
                prev.insert(e.dst, u);
                queue.push_back(e.dst);
            }
        }
    }
    None
}

/// The jet a field induces on a face: the edge values along the face cycle.
/// Valid fields satisfy the cycle condition automatically.
pub fn jet_of(
    g: &Groupoid,
    field: &DiscreteField,
    mesh: &MeshTopology,
    face_id: usize,
) -> Result<JetElement> {
    let face = mesh.face(face_id)?;
    let mut components = Vec::with_capacity(face.degree());
    for e in face.edges() {
        components.push(field.edge_value(e)?.clone());
    }
    make_jet(g, components)
}

/// A vertex-indexed infinitesimal variation, exactly zero on a frozen set.
#[derive(Clone, Debug, Default)]
pub struct InfinitesimalVariation {
    vectors: BTreeMap<usize, AlgebroidVector>,
    frozen: BTreeSet<usize>,
}

impl InfinitesimalVariation {
    /// Builds a variation; vectors on frozen vertices are rejected.
    pub fn new(
        g: &Groupoid,
        field: &DiscreteField,
        vectors: BTreeMap<usize, AlgebroidVector>,
        frozen: BTreeSet<usize>,
    ) -> Result<Self> {
        for (v, vec) in &vectors {
            if frozen.contains(v) {
                return Err(Error::InvalidMesh(format!(
                    "variation assigns a vector to frozen vertex {v}"
                )));
            }
            let value = field.vertex_value(*v)?;
            let dist = g.base_distance(&vec.base, value);
            if dist > g.tol.compose_tol {
                return Err(Error::BaseMismatch(dist));
            }
        }
        Ok(InfinitesimalVariation { vectors, frozen })
    }

    /// Single-vertex variation `v * delta_u`.
    pub fn single(
        g: &Groupoid,
        field: &DiscreteField,
        u: usize,
        v: AlgebroidVector,
    ) -> Result<Self> {
        Self::new(
            g,
            field,
            [(u, v)].into_iter().collect(),
            BTreeSet::new(),
        )
    }

    pub fn vector_at(&self, g: &Groupoid, field: &DiscreteField, v: usize) -> AlgebroidVector {
        match self.vectors.get(&v) {
            Some(vec) => vec.clone(),
            None => {
                let base = field
                    .vertex_value(v)
                    .cloned()
                    .unwrap_or_else(|_| g.unit_base());
                g.zero_vector(base)
            }
        }
    }

    pub fn vectors(&self) -> &BTreeMap<usize, AlgebroidVector> {
        &self.vectors
    }

    pub fn frozen(&self) -> &BTreeSet<usize> {
        &self.frozen
    }
}

/// Flows the field along the variation for time `t`: every vertex moves to the
/// target of its alpha-fiber curve and every edge `(u, v)` becomes
/// `h_u(t)^-1 phi(u, v) h_v(t)`. Frozen and unassigned vertices stay put, and
/// the result satisfies the field axioms again.
pub fn apply_variation(
    g: &Groupoid,
    field: &DiscreteField,
    mesh: &MeshTopology,
    variation: &InfinitesimalVariation,
    t: f64,
) -> Result<DiscreteField> {
    let mut curves: BTreeMap<usize, GroupoidElement> = BTreeMap::new();
    for v in 0..mesh.n_vertices() {
        let value = field.vertex_value(v)?;
        let vec = variation.vector_at(g, field, v);
        curves.insert(v, g.alpha_curve(value, &vec, t));
    }
    let mut varied = DiscreteField::new();
    for (v, h) in &curves {
        varied.vertex_values.insert(*v, g.beta(h));
    }
    for (&(src, dst), value) in &field.edge_values {
        let hu_inv = g.inverse(&curves[&src])?;
        let hv = &curves[&dst];
        let new_value = g.compose(&g.compose(&hu_inv, value)?, hv)?;
        varied.edge_values.insert((src, dst), new_value);
    }
    Ok(varied)
}
