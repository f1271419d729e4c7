//! The discrete jet space: validated k-gons of composable arrows.
//!
//! A jet is an ordered tuple `(g_1, ..., g_k)` with `beta(g_i) = alpha(g_{i+1})`
//! cyclically and cyclic product `g_1 g_2 ... g_k` equal to the unit at
//! `alpha(g_1)`. Varying the i-th vertex value moves components `i-1` and `i`
//! through curves in the alpha-fibers; directional derivatives of Lagrangians
//! along such variations realize the tangent lifts.

use crate::error::Error;
use crate::groupoid::{AlgebroidVector, BasePoint, Groupoid, GroupoidElement};
use crate::lagrangian::Lagrangian;
use crate::mesh::mod1;
use crate::Result;

/// A validated k-gon in the groupoid.
#[derive(Clone, Debug, PartialEq)]
pub struct JetElement {
    components: Vec<GroupoidElement>,
}

impl JetElement {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// 1-based component access following the cyclic index convention.
    pub fn component(&self, i: usize) -> &GroupoidElement {
        &self.components[mod1(i as i64, self.k()) - 1]
    }

    pub fn components(&self) -> &[GroupoidElement] {
        &self.components
    }

    /// Flat payloads of the components in slot order, for debugging dumps.
    pub fn to_arrays(&self) -> Vec<Vec<f64>> {
        self.components.iter().map(|c| c.to_vec()).collect()
    }
}

/// A jet together with one fiber vector per slot, each based at the slot's
/// source anchor.
#[derive(Clone, Debug)]
pub struct JetVariation {
    pub base: JetElement,
    pub vectors: Vec<AlgebroidVector>,
}

impl JetVariation {
    pub fn new(g: &Groupoid, base: JetElement, vectors: Vec<AlgebroidVector>) -> Result<Self> {
        if vectors.len() != base.k() {
            return Err(Error::DimensionMismatch {
                expected: base.k(),
                got: vectors.len(),
            });
        }
        for (i, v) in vectors.iter().enumerate() {
            let anchor = g.alpha(base.component(i + 1));
            let dist = g.base_distance(&v.base, &anchor);
            if dist > g.tol.compose_tol {
                return Err(Error::BaseMismatch(dist));
            }
        }
        Ok(JetVariation { base, vectors })
    }
}

/// Validates a tuple of arrows as a jet: adjacent composability and the cyclic
/// unit condition. Failing tuples are rejected, never repaired.
pub fn make_jet(g: &Groupoid, components: Vec<GroupoidElement>) -> Result<JetElement> {
    if components.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    let k = components.len();
    for i in 0..k {
        let next = (i + 1) % k;
        let defect = g.base_distance(&g.beta(&components[i]), &g.alpha(&components[next]));
        if defect > g.tol.compose_tol {
            return Err(Error::JetNotComposable {
                slot: i + 1,
                next_slot: next + 1,
            });
        }
    }
    let mut product = components[0].clone();
    for c in &components[1..] {
        product = g.compose(&product, c)?;
    }
    let unit = g.identity(&g.alpha(&components[0]));
    let defect = g.element_distance(&product, &unit);
    if defect > g.tol.cycle_tol {
        return Err(Error::CycleDefect {
            defect,
            tol: g.tol.cycle_tol,
        });
    }
    Ok(JetElement { components })
}

/// The inverse k-gon `(g_k^-1, ..., g_1^-1)`.
pub fn invert_jet(g: &Groupoid, jet: &JetElement) -> Result<JetElement> {
    let mut components = Vec::with_capacity(jet.k());
    for c in jet.components().iter().rev() {
        components.push(g.inverse(c)?);
    }
    make_jet(g, components)
}

/// Generalized source map: `alpha(g_i)` for 1-based `i`.
pub fn source_map(g: &Groupoid, i: usize, jet: &JetElement) -> Result<BasePoint> {
    if i < 1 || i > jet.k() {
        return Err(Error::IndexOutOfRange { index: i, k: jet.k() });
    }
    Ok(g.alpha(jet.component(i)))
}

/// Moves each component through the alpha-fiber curves of its endpoints:
/// component i becomes `h_i(t)^-1 g_i h_{i+1}(t)` with `h_i` the curve at
/// `alpha(g_i)` with velocity `v_i`. The curves telescope, so the result
/// satisfies the cycle condition structurally.
pub fn vary_jet(
    g: &Groupoid,
    jet: &JetElement,
    vectors: &[AlgebroidVector],
    t: f64,
) -> Result<JetElement> {
    let variation = JetVariation::new(g, jet.clone(), vectors.to_vec())?;
    let k = jet.k();
    let curves: Vec<GroupoidElement> = (0..k)
        .map(|i| {
            let anchor = g.alpha(jet.component(i + 1));
            g.alpha_curve(&anchor, &variation.vectors[i], t)
        })
        .collect();
    let mut components = Vec::with_capacity(k);
    for i in 0..k {
        let h_inv = g.inverse(&curves[i])?;
        let mid = g.compose(&h_inv, jet.component(i + 1))?;
        components.push(g.compose(&mid, &curves[(i + 1) % k])?);
    }
    make_jet(g, components)
}

/// Derivative of `L` along the variation with the full vector tuple.
///
/// Central finite difference with step `fd_h`, unless the Lagrangian carries an
/// exact lift-derivative hook, which is then summed over slots.
pub fn directional_derivative(
    g: &Groupoid,
    lagrangian: &Lagrangian,
    jet: &JetElement,
    vectors: &[AlgebroidVector],
) -> Result<f64> {
    if let Some(total) = exact_directional(lagrangian, jet, vectors)? {
        return Ok(total);
    }
    fd_directional_derivative(g, lagrangian, jet, vectors)
}

/// Finite-difference path of `directional_derivative`, always available.
pub fn fd_directional_derivative(
    g: &Groupoid,
    lagrangian: &Lagrangian,
    jet: &JetElement,
    vectors: &[AlgebroidVector],
) -> Result<f64> {
    let h = g.tol.fd_h;
    let plus = lagrangian.evaluate(&vary_jet(g, jet, vectors, h)?);
    let minus = lagrangian.evaluate(&vary_jet(g, jet, vectors, -h)?);
    Ok((plus - minus) / (2.0 * h))
}

fn exact_directional(
    lagrangian: &Lagrangian,
    jet: &JetElement,
    vectors: &[AlgebroidVector],
) -> Result<Option<f64>> {
    if !lagrangian.has_exact_derivative() {
        return Ok(None);
    }
    let mut total = 0.0;
    for (i, v) in vectors.iter().enumerate() {
        if v.coeffs.iter().all(|c| *c == 0.0) {
            continue;
        }
        total += lagrangian.exact_lift_derivative(jet, i + 1, v).ok_or(
            Error::IndexOutOfRange {
                index: i + 1,
                k: jet.k(),
            },
        )?;
    }
    Ok(Some(total))
}

/// The i-th tangent lift derivative: `v` in slot `i`, zeros elsewhere. Only
/// components `i-1` and `i` of the jet move.
pub fn tangent_lift_derivative(
    g: &Groupoid,
    lagrangian: &Lagrangian,
    jet: &JetElement,
    i: usize,
    v: &AlgebroidVector,
) -> Result<f64> {
    if i < 1 || i > jet.k() {
        return Err(Error::IndexOutOfRange { index: i, k: jet.k() });
    }
    let anchor = g.alpha(jet.component(i));
    let dist = g.base_distance(&v.base, &anchor);
    if dist > g.tol.compose_tol {
        return Err(Error::BaseMismatch(dist));
    }
    if lagrangian.has_exact_derivative() {
        if let Some(value) = lagrangian.exact_lift_derivative(jet, i, v) {
            return Ok(value);
        }
    }
    fd_tangent_lift_derivative(g, lagrangian, jet, i, v)
}

/// Finite-difference path of `tangent_lift_derivative`, always available.
pub fn fd_tangent_lift_derivative(
    g: &Groupoid,
    lagrangian: &Lagrangian,
    jet: &JetElement,
    i: usize,
    v: &AlgebroidVector,
) -> Result<f64> {
    let h = g.tol.fd_h;
    let plus = lagrangian.evaluate(&single_slot_variation(g, jet, i, v, h)?);
    let minus = lagrangian.evaluate(&single_slot_variation(g, jet, i, v, -h)?);
    Ok((plus - minus) / (2.0 * h))
}

/// Jet with slot-i variation applied: components `i-1` and `i` move, the rest
/// are cloned.
fn single_slot_variation(
    g: &Groupoid,
    jet: &JetElement,
    i: usize,
    v: &AlgebroidVector,
    t: f64,
) -> Result<JetElement> {
    let k = jet.k();
    let anchor = g.alpha(jet.component(i));
    let curve = g.alpha_curve(&anchor, v, t);
    let prev = mod1(i as i64 - 1, k);
    let mut components = jet.components().to_vec();
    components[prev - 1] = g.compose(jet.component(prev), &curve)?;
    components[i - 1] = g.compose(&g.inverse(&curve)?, jet.component(i))?;
    make_jet(g, components)
}
