//! Deterministic random data for property tests and the check suites.
//!
//! Everything flows through a caller-supplied RNG so that a single recorded
//! seed reproduces every probe.

use nalgebra::DVector;
use rand::{Rng, RngExt};

use crate::field::DiscreteField;
use crate::groupoid::{AlgebroidVector, BasePoint, Groupoid, GroupoidElement, GroupoidKind};
use crate::jet::{make_jet, JetElement};
use crate::mesh::MeshTopology;
use crate::Result;

pub fn random_coeffs<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.random_range(-scale..scale))
}

/// A random arrow: pair realizations get random endpoint states, groups get
/// the exponential of a random algebra element.
pub fn random_element<R: Rng>(g: &Groupoid, rng: &mut R, scale: f64) -> Result<GroupoidElement> {
    let su = random_state(g, rng, scale);
    let sv = random_state(g, rng, scale);
    g.edge_from_states(&su, &sv)
}

/// A random per-vertex state: coordinates for the pair groupoid over R^n, a
/// group element near the identity otherwise.
pub fn random_state<R: Rng>(g: &Groupoid, rng: &mut R, scale: f64) -> DVector<f64> {
    match g.kind() {
        GroupoidKind::PairRn(n) => random_coeffs(rng, n, scale),
        GroupoidKind::Group(_) | GroupoidKind::PairGroup(_) => {
            let xi = random_coeffs(rng, g.fiber_dim(), scale);
            g.perturb_state(&g.neutral_state(), &xi, 1.0)
        }
    }
}

pub fn random_base_point<R: Rng>(g: &Groupoid, rng: &mut R, scale: f64) -> BasePoint {
    match g.kind() {
        GroupoidKind::Group(_) => g.unit_base(),
        _ => g.vertex_value_from_state(&random_state(g, rng, scale)),
    }
}

pub fn random_vector_at<R: Rng>(
    g: &Groupoid,
    base: BasePoint,
    rng: &mut R,
    scale: f64,
) -> AlgebroidVector {
    AlgebroidVector {
        base,
        coeffs: random_coeffs(rng, g.fiber_dim(), scale),
    }
}

/// A random valid k-gon, built from k random corner states so the cycle
/// condition holds by construction.
pub fn random_jet<R: Rng>(g: &Groupoid, k: usize, rng: &mut R, scale: f64) -> Result<JetElement> {
    let states: Vec<DVector<f64>> = (0..k).map(|_| random_state(g, rng, scale)).collect();
    let mut components = Vec::with_capacity(k);
    for i in 0..k {
        components.push(g.edge_from_states(&states[i], &states[(i + 1) % k])?);
    }
    // rotate so component 1 runs from the last corner to the first
    components.rotate_right(1);
    make_jet(g, components)
}

/// A random valid field on the whole mesh.
pub fn random_field<R: Rng>(
    g: &Groupoid,
    mesh: &MeshTopology,
    rng: &mut R,
    scale: f64,
) -> Result<DiscreteField> {
    let states: Vec<DVector<f64>> = (0..mesh.n_vertices())
        .map(|_| random_state(g, rng, scale))
        .collect();
    DiscreteField::from_vertex_states(g, mesh, &states)
}

/// A random composable pair of arrows (the target of the first anchors the
/// source of the second).
pub fn random_composable_pair<R: Rng>(
    g: &Groupoid,
    rng: &mut R,
    scale: f64,
) -> Result<(GroupoidElement, GroupoidElement)> {
    let a = random_state(g, rng, scale);
    let b = random_state(g, rng, scale);
    let c = random_state(g, rng, scale);
    Ok((g.edge_from_states(&a, &b)?, g.edge_from_states(&b, &c)?))
}

/// A random composable triple.
pub fn random_composable_triple<R: Rng>(
    g: &Groupoid,
    rng: &mut R,
    scale: f64,
) -> Result<(GroupoidElement, GroupoidElement, GroupoidElement)> {
    let a = random_state(g, rng, scale);
    let b = random_state(g, rng, scale);
    let c = random_state(g, rng, scale);
    let d = random_state(g, rng, scale);
    Ok((
        g.edge_from_states(&a, &b)?,
        g.edge_from_states(&b, &c)?,
        g.edge_from_states(&c, &d)?,
    ))
}

/// A uniformly random simple-ish walk from `x` to `y`: a random spanning walk
/// biased toward unvisited vertices, falling back to a breadth-first tail.
pub fn random_path<R: Rng>(
    mesh: &MeshTopology,
    rng: &mut R,
    x: usize,
    y: usize,
    max_len: usize,
) -> Vec<usize> {
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); mesh.n_vertices()];
    for e in mesh.edges() {
        if !e.is_loop() {
            adjacency[e.src].push(e.dst);
        }
    }
    let mut path = vec![x];
    let mut current = x;
    for _ in 0..max_len {
        if current == y {
            return path;
        }
        let neighbors = &adjacency[current];
        let fresh: Vec<usize> = neighbors
            .iter()
            .copied()
            .filter(|v| !path.contains(v))
            .collect();
        let next = if !fresh.is_empty() {
            fresh[rng.random_range(0..fresh.len())]
        } else {
            neighbors[rng.random_range(0..neighbors.len())]
        };
        path.push(next);
        current = next;
    }
    if current != y {
        // deterministic completion: shortest hops via BFS predecessors
        let tail = bfs_tail(&adjacency, current, y);
        path.extend(tail);
    }
    path
}

fn bfs_tail(adjacency: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    use std::collections::{BTreeMap, VecDeque};
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &v in &adjacency[u] {
            prev.entry(v).or_insert_with(|| {
                queue.push_back(v);
                u
            });
        }
    }
    let mut tail = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[&cur];
        tail.push(cur);
    }
    tail.reverse();
    tail.remove(0); // `from` is already on the path
    tail
}
