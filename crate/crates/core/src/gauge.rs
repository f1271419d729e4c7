//! Lattice gauge fields: group elements on directed edges, plaquette field
//! strength, path holonomy, and flatness diagnostics.
//!
//! A gauge field assigns a group element to every directed mesh edge with the
//! orientation convention `psi(e^-1) = psi(e)^-1`, enforced at insertion. The
//! field strength of a face is the ordered product of its counterclockwise
//! edge cycle; fields induced by discrete fields (groupoid morphisms) are flat
//! by the cycle condition, and a flat field's holonomy depends only on the
//! simplicial homotopy class of the path.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::field::DiscreteField;
use crate::groupoid::{Groupoid, GroupoidElement, GroupoidKind};
use crate::mesh::{DirectedEdge, MeshTopology};
use crate::Result;

/// Edge-to-group assignment with inversion consistency.
#[derive(Clone, Debug, Default)]
pub struct GaugeField {
    edges: BTreeMap<(usize, usize), GroupoidElement>,
}

impl GaugeField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a value on an edge and its inverse on the reverse edge.
    pub fn insert(&mut self, g: &Groupoid, e: DirectedEdge, value: GroupoidElement) -> Result<()> {
        if e.is_loop() {
            self.edges.insert((e.src, e.dst), value);
            return Ok(());
        }
        let inverse = g.inverse(&value)?;
        self.edges.insert((e.src, e.dst), value);
        self.edges.insert((e.dst, e.src), inverse);
        Ok(())
    }

    /// The gauge field carried by a group-valued discrete field.
    pub fn from_discrete_field(
        g: &Groupoid,
        field: &DiscreteField,
        mesh: &MeshTopology,
    ) -> Result<Self> {
        if !matches!(g.kind(), GroupoidKind::Group(_)) {
            return Err(Error::WrongRealization {
                expected: "matrix group",
                got: g.spec_string(),
            });
        }
        let mut gauge = GaugeField::new();
        for e in mesh.edges() {
            if e.src <= e.dst {
                gauge.insert(g, *e, field.edge_value(*e)?.clone())?;
            }
        }
        Ok(gauge)
    }

    pub fn value(&self, e: DirectedEdge) -> Result<&GroupoidElement> {
        self.edges.get(&(e.src, e.dst)).ok_or(Error::MissingEdgeValue {
            src: e.src,
            dst: e.dst,
        })
    }

    /// Checks `psi(e^-1) = psi(e)^-1` on every stored pair.
    pub fn orientation_defect(&self, g: &Groupoid) -> f64 {
        let mut worst = 0.0f64;
        for (&(s, d), value) in &self.edges {
            if s < d {
                if let (Some(rev), Ok(inv)) = (self.edges.get(&(d, s)), g.inverse(value)) {
                    worst = worst.max(g.element_distance(rev, &inv));
                }
            }
        }
        worst
    }
}

/// A path in the edge complex: a start vertex and the successive vertices
/// visited, so consecutive edges share their intermediate vertex by
/// construction. The empty path sits at `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathInComplex {
    pub start: usize,
    pub hops: Vec<usize>,
}

impl PathInComplex {
    pub fn new(start: usize, hops: Vec<usize>) -> Self {
        PathInComplex { start, hops }
    }

    pub fn from_vertices(vertices: &[usize]) -> Self {
        PathInComplex {
            start: vertices[0],
            hops: vertices[1..].to_vec(),
        }
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut v = vec![self.start];
        v.extend_from_slice(&self.hops);
        v
    }

    pub fn edges(&self) -> Vec<DirectedEdge> {
        self.vertices()
            .windows(2)
            .map(|w| DirectedEdge::new(w[0], w[1]))
            .collect()
    }

    pub fn end(&self) -> usize {
        *self.hops.last().unwrap_or(&self.start)
    }

    /// The reversed path.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices();
        vertices.reverse();
        Self::from_vertices(&vertices)
    }

    /// Concatenation; the other path must start where this one ends.
    pub fn then(&self, other: &PathInComplex) -> Result<Self> {
        if other.start != self.end() {
            return Err(Error::PathNotComposable(self.hops.len()));
        }
        let mut hops = self.hops.clone();
        hops.extend_from_slice(&other.hops);
        Ok(PathInComplex {
            start: self.start,
            hops,
        })
    }
}

/// Field strength (curvature) of a face: the ordered product of the gauge
/// values along its counterclockwise edge cycle.
pub fn field_strength(
    g: &Groupoid,
    psi: &GaugeField,
    mesh: &MeshTopology,
    face_id: usize,
) -> Result<GroupoidElement> {
    let face = mesh.face(face_id)?;
    let mut product: Option<GroupoidElement> = None;
    for e in face.edges() {
        let value = psi.value(e)?;
        product = Some(match product {
            None => value.clone(),
            Some(acc) => g.compose(&acc, value)?,
        });
    }
    Ok(product.expect("faces have positive degree"))
}

/// Holonomy of a path: the ordered product of gauge values along it. The empty
/// path maps to the unit.
pub fn holonomy(
    g: &Groupoid,
    psi: &GaugeField,
    mesh: &MeshTopology,
    path: &PathInComplex,
) -> Result<GroupoidElement> {
    let mut product = g.identity(&g.unit_base());
    for (step, e) in path.edges().into_iter().enumerate() {
        if !mesh.contains_edge(e) {
            return Err(Error::PathNotComposable(step));
        }
        product = g.compose(&product, psi.value(e)?)?;
    }
    Ok(product)
}

/// Per-face curvature defects and the flatness verdict.
#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub flat: bool,
    /// `(face id, |strength - unit|)` for every face, ascending id.
    pub defects: Vec<(usize, f64)>,
    pub worst_face: usize,
    pub worst_defect: f64,
}

/// A field is flat when every plaquette product is the unit to `cycle_tol`.
pub fn is_flat(g: &Groupoid, psi: &GaugeField, mesh: &MeshTopology) -> Result<FlatnessReport> {
    let unit = g.identity(&g.unit_base());
    let mut defects = Vec::with_capacity(mesh.n_faces());
    let mut worst = (0usize, 0.0f64);
    for f in 0..mesh.n_faces() {
        let strength = field_strength(g, psi, mesh, f)?;
        let defect = g.element_distance(&strength, &unit);
        if defect > worst.1 {
            worst = (f, defect);
        }
        defects.push((f, defect));
    }
    Ok(FlatnessReport {
        flat: worst.1 < g.tol.cycle_tol,
        defects,
        worst_face: worst.0,
        worst_defect: worst.1,
    })
}

/// All single elementary homotopy moves applicable to a path: whenever a
/// contiguous run of path edges traverses part of a face's boundary cycle, the
/// run is replaced by the complementary arc of that face. Flat fields have the
/// same holonomy on both sides of every move.
pub fn elementary_moves(mesh: &MeshTopology, path: &PathInComplex) -> Vec<PathInComplex> {
    let vertices = path.vertices();
    let mut moves = Vec::new();
    for face in mesh.faces() {
        let k = face.degree();
        // face cycle in both traversal directions
        let ring: Vec<usize> = face.corners.clone();
        for direction in [false, true] {
            let cycle: Vec<usize> = if direction {
                let mut r = ring.clone();
                r.reverse();
                r
            } else {
                ring.clone()
            };
            // arcs of length 1..k starting anywhere on the cycle
            for start in 0..k {
                for len in 1..k {
                    let arc: Vec<usize> = (0..=len).map(|o| cycle[(start + o) % k]).collect();
                    // find the arc as a contiguous vertex run of the path
                    for pos in 0..vertices.len() {
                        if pos + len >= vertices.len() {
                            break;
                        }
                        if vertices[pos..=pos + len] == arc[..] {
                            // complement: remaining cycle from arc end to start
                            let mut complement = Vec::with_capacity(k - len + 1);
                            for o in 0..=(k - len) {
                                complement.push(cycle[(start + len + o) % k]);
                            }
                            complement.reverse(); // arc start -> arc end, other way
                            let mut rewired = vertices[..pos].to_vec();
                            rewired.extend_from_slice(&complement);
                            rewired.extend_from_slice(&vertices[pos + len + 1..]);
                            moves.push(PathInComplex::from_vertices(&rewired));
                        }
                    }
                }
            }
        }
    }
    moves
}
