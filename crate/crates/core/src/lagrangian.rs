//! Discrete Lagrangians on the jet space, Poincare-Cartan forms, Legendre
//! transforms, and the action sum.
//!
//! A Lagrangian is a real function on k-gons. Its i-th Poincare-Cartan form is
//! the covector of slot-i tangent-lift derivatives; summed over slots these
//! reproduce the full differential, which is the linearity identity the tests
//! pin down. The Legendre transform shares the same numeric content and is
//! exposed separately to mirror the pullback identity it satisfies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::Error;
use crate::field::{jet_of, DiscreteField};
use crate::groupoid::{AlgebroidCovector, AlgebroidVector, Groupoid, GroupoidKind, MatrixGroup};
use crate::jet::{tangent_lift_derivative, JetElement};
use crate::linalg;
use crate::mesh::{mod1, MeshTopology};
use crate::Result;

type EvalFn = dyn Fn(&JetElement) -> f64 + Send + Sync;
type ExactFn = dyn Fn(&JetElement, usize, &AlgebroidVector) -> Option<f64> + Send + Sync;

/// A real-valued function on k-gons, with an optional exact directional
/// derivative hook that bypasses finite differencing.
#[derive(Clone)]
pub struct Lagrangian {
    k: usize,
    eval: Arc<EvalFn>,
    exact: Option<Arc<ExactFn>>,
}

impl fmt::Debug for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lagrangian")
            .field("k", &self.k)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl Lagrangian {
    pub fn from_fn(k: usize, eval: impl Fn(&JetElement) -> f64 + Send + Sync + 'static) -> Self {
        Lagrangian {
            k,
            eval: Arc::new(eval),
            exact: None,
        }
    }

    /// Registers an exact slot-derivative hook; return `None` to fall back to
    /// finite differences for a particular probe.
    pub fn with_exact(
        mut self,
        exact: impl Fn(&JetElement, usize, &AlgebroidVector) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    /// Drops the exact hook; used to force the finite-difference path.
    pub fn without_exact(mut self) -> Self {
        self.exact = None;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn evaluate(&self, jet: &JetElement) -> f64 {
        (self.eval)(jet)
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_lift_derivative(
        &self,
        jet: &JetElement,
        slot: usize,
        v: &AlgebroidVector,
    ) -> Option<f64> {
        self.exact.as_ref().and_then(|f| f(jet, slot, v))
    }
}

/// The value of the i-th Poincare-Cartan form at a jet: a covector at the
/// slot's source anchor.
#[derive(Clone, Debug)]
pub struct PcFormValue {
    pub slot: usize,
    pub covector: AlgebroidCovector,
}

/// The i-th Poincare-Cartan form: coefficients are the slot-i lift derivatives
/// against the fixed fiber basis.
pub fn pc_form(
    g: &Groupoid,
    lagrangian: &Lagrangian,
    jet: &JetElement,
    i: usize,
) -> Result<PcFormValue> {
    if i < 1 || i > jet.k() {
        return Err(Error::IndexOutOfRange { index: i, k: jet.k() });
    }
    let base = g.alpha(jet.component(i));
    let mut coeffs = DVector::zeros(g.fiber_dim());
    for j in 0..g.fiber_dim() {
        let e_j = g.basis_vector(base.clone(), j);
        coeffs[j] = tangent_lift_derivative(g, lagrangian, jet, i, &e_j)?;
    }
    Ok(PcFormValue {
        slot: i,
        covector: AlgebroidCovector { base, coeffs },
    })
}

/// The i-th Legendre transform base map. Numerically identical to the i-th
/// Poincare-Cartan covector (the canonical-section pullback identity); the
/// computation is shared.
pub fn legendre(
    g: &Groupoid,
    lagrangian: &Lagrangian,
    jet: &JetElement,
    i: usize,
) -> Result<AlgebroidCovector> {
    Ok(pc_form(g, lagrangian, jet, i)?.covector)
}

/// Action sum over a region: the Lagrangian summed over the jets its faces
/// induce. Face order is ascending id, so the reduction is deterministic.
pub fn action_sum(
    g: &Groupoid,
    lagrangian: &Lagrangian,
    field: &DiscreteField,
    mesh: &MeshTopology,
    region: &BTreeSet<usize>,
) -> Result<f64> {
    let mut total = 0.0;
    for &f in region {
        total += lagrangian.evaluate(&jet_of(g, field, mesh, f)?);
    }
    Ok(total)
}

/// Parameters for catalog Lagrangians.
#[derive(Clone, Debug, Default)]
pub struct LagrangianParams {
    /// Face degree; zero means take it from context.
    pub k: usize,
    /// Per-slot edge coefficients (signed); defaults to all ones.
    pub coefficients: Option<Vec<f64>>,
    /// Quadratic potential strength.
    pub potential: f64,
}

/// Quadratic edge Lagrangian on the pair groupoid over R^n:
/// `L = 1/2 sum_i c_i |q_i - q_{i-1}|^2 - p/2 sum_i |q_{i-1}|^2`
/// where `q_i - q_{i-1}` is the displacement along slot i. Signed coefficients
/// select elliptic (all positive) or hyperbolic (mixed sign) behavior.
///
/// Carries an exact derivative hook; the finite-difference path remains
/// available for cross validation.
pub fn quadratic_edge_lagrangian(
    g: &Groupoid,
    k: usize,
    coefficients: Vec<f64>,
    potential: f64,
) -> Result<Lagrangian> {
    if !matches!(g.kind(), GroupoidKind::PairRn(_)) {
        return Err(Error::WrongRealization {
            expected: "pair groupoid over R^n",
            got: g.spec_string(),
        });
    }
    if coefficients.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: coefficients.len(),
        });
    }
    let n = g.base_dim();
    let c_eval = coefficients.clone();
    let eval = move |jet: &JetElement| {
        let mut acc = 0.0;
        for i in 1..=jet.k() {
            let d = jet.component(i).data();
            let diff = d.rows(n, n) - d.rows(0, n);
            acc += 0.5 * c_eval[i - 1] * diff.norm_squared();
            acc -= 0.5 * potential * d.rows(0, n).norm_squared();
        }
        acc
    };
    let c_exact = coefficients;
    let exact = move |jet: &JetElement, slot: usize, v: &AlgebroidVector| -> Option<f64> {
        // dL/dq at the slot's source anchor: the two incident edge terms plus
        // the potential gradient.
        let k = jet.k();
        if slot < 1 || slot > k {
            return None;
        }
        let anchor = jet.component(slot).data().rows(0, n).into_owned();
        let prev = jet.component(mod1(slot as i64 - 1, k));
        let prev_src = prev.data().rows(0, n).into_owned();
        let next_dst = jet.component(slot).data().rows(n, n).into_owned();
        let grad = (&anchor - prev_src) * c_exact[mod1(slot as i64 - 1, k) - 1]
            - (next_dst - &anchor) * c_exact[slot - 1]
            - &anchor * potential;
        Some(grad.dot(&v.coeffs))
    };
    Ok(Lagrangian::from_fn(k, eval).with_exact(exact))
}

/// Chiral-field Lagrangian on a matrix group: the squared logarithm norms of
/// the first k-1 components, `L = 1/2 sum_{i<k} |log g_i|^2`. With k = 3 this
/// is the discrete harmonic-map energy in the two independent directions.
pub fn chiral_field_lagrangian(g: &Groupoid, k: usize) -> Result<Lagrangian> {
    let group = match g.kind() {
        GroupoidKind::Group(grp) => grp,
        _ => {
            return Err(Error::WrongRealization {
                expected: "matrix group",
                got: g.spec_string(),
            })
        }
    };
    Ok(Lagrangian::from_fn(k, move |jet| {
        (1..jet.k())
            .map(|i| 0.5 * log_norm_squared(group, jet.component(i).data()))
            .sum()
    }))
}

/// Left-invariant Lagrangian on the pair groupoid over a matrix group whose
/// reduction is `chiral_field_lagrangian`: each of the first k-1 arrows
/// `(h, h')` contributes `1/2 |log(h^-1 h')|^2`.
pub fn invariant_chiral_pair_lagrangian(g: &Groupoid, k: usize) -> Result<Lagrangian> {
    let group = match g.kind() {
        GroupoidKind::PairGroup(grp) => grp,
        _ => {
            return Err(Error::WrongRealization {
                expected: "pair groupoid over a matrix group",
                got: g.spec_string(),
            })
        }
    };
    let n = group.n();
    Ok(Lagrangian::from_fn(k, move |jet| {
        (1..jet.k())
            .map(|i| {
                let d = jet.component(i).data();
                let h1 = crate::groupoid::flat_to_matrix(&d.rows(0, n * n).into_owned(), n);
                let h2 = crate::groupoid::flat_to_matrix(&d.rows(n * n, n * n).into_owned(), n);
                let rel = h1.try_inverse().map(|inv| inv * h2);
                match rel {
                    Some(m) => 0.5 * log_norm_squared(group, &crate::groupoid::matrix_to_flat(&m)),
                    None => f64::NAN,
                }
            })
            .sum()
    }))
}

fn log_norm_squared(group: MatrixGroup, flat: &DVector<f64>) -> f64 {
    match group {
        MatrixGroup::SO3 => {
            let m = crate::groupoid::flat_to_matrix(flat, 3);
            let r = nalgebra::Matrix3::from_fn(|i, j| m[(i, j)]);
            let theta = linalg::so3_angle(&r);
            theta * theta
        }
        MatrixGroup::GL(n) => {
            let m = crate::groupoid::flat_to_matrix(flat, n);
            match linalg::logm(&m) {
                Some(l) => l.norm_squared(),
                None => f64::NAN,
            }
        }
    }
}

type BuilderFn = dyn Fn(&Groupoid, &LagrangianParams) -> Result<Lagrangian> + Send + Sync;

/// Named Lagrangian builders; `wave`, `harmonic`, and `chiral` are registered
/// by default and user Lagrangians hook in through `register`.
pub struct LagrangianRegistry {
    builders: BTreeMap<String, Arc<BuilderFn>>,
}

impl Default for LagrangianRegistry {
    fn default() -> Self {
        let mut registry = LagrangianRegistry {
            builders: BTreeMap::new(),
        };
        let quadratic = |g: &Groupoid, params: &LagrangianParams| {
            let k = if params.k == 0 { 4 } else { params.k };
            let c = params
                .coefficients
                .clone()
                .unwrap_or_else(|| vec![1.0; k]);
            quadratic_edge_lagrangian(g, k, c, params.potential)
        };
        registry.register("wave", quadratic);
        registry.register("harmonic", quadratic);
        registry.register("chiral", |g, params| {
            let k = if params.k == 0 { 3 } else { params.k };
            chiral_field_lagrangian(g, k)
        });
        registry
    }
}

impl LagrangianRegistry {
    pub fn register(
        &mut self,
        name: &str,
        builder: impl Fn(&Groupoid, &LagrangianParams) -> Result<Lagrangian> + Send + Sync + 'static,
    ) {
        self.builders.insert(name.to_string(), Arc::new(builder));
    }

    pub fn build(
        &self,
        name: &str,
        g: &Groupoid,
        params: &LagrangianParams,
    ) -> Result<Lagrangian> {
        let builder = self
            .builders
            .get(name)
            .ok_or_else(|| Error::UnknownSpec(format!("lagrangian:{name}")))?;
        builder(g, params)
    }

    pub fn names(&self) -> Vec<&str> {
        self.builders.keys().map(|s| s.as_str()).collect()
    }
}
