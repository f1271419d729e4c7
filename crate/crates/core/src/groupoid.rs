//! Lie groupoid realizations and their algebroid fibers.
//!
//! A groupoid is a set of arrows over a base of identities, with source and
//! target anchors `alpha`, `beta`, a partial multiplication defined when
//! `beta(g) == alpha(h)`, and an inversion. Three concrete realizations are
//! provided:
//!
//! * the pair groupoid over `R^n` — arrows are ordered pairs `(q1, q2)`,
//! * matrix Lie groups over a single unit — `SO(3)` and `GL(n, R)`,
//! * the pair groupoid over a matrix group, used by Lie-Poisson reduction.
//!
//! Elements carry a flat coefficient payload (pair: the two base points
//! concatenated; group: the matrix in row-major order), so every tolerance in
//! this crate is a Euclidean norm on coefficients. Algebroid fibers use a fixed
//! global basis: the standard basis of `R^n` for the pair groupoid, the three
//! standard generators for `so(3)`, elementary matrices in row-major order for
//! `gl(n)`, and the left-trivialized Lie algebra basis for the pair groupoid
//! over a group.
//!
//! All operations are pure functions of their inputs; realizations carry no
//! mutable state and are safe for unrestricted parallel use.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg;
use crate::Result;

/// Numerical tolerances shared by the groupoid, jet, and field layers.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Maximum anchor mismatch accepted by composition.
    pub compose_tol: f64,
    /// Accepted defect for exp/log round trips.
    pub exp_tol: f64,
    /// Step for central finite differences of Lagrangians.
    pub fd_h: f64,
    /// Accepted defect for finite-difference cross checks.
    pub fd_tol: f64,
    /// Matrices with |det| below this are treated as singular.
    pub det_tol: f64,
    /// Orthogonality defect threshold for rotation matrices.
    pub ortho_tol: f64,
    /// Injectivity radius for the group logarithm (rotation angle for SO(3)).
    pub log_radius: f64,
    /// Accepted deviation of a jet's cyclic product from the unit.
    pub cycle_tol: f64,
    /// Accepted deviation between exact and finite-difference lift derivatives.
    pub fd_cross_tol: f64,
    /// Accepted defect in linearity identities built from lifts.
    pub linearity_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            compose_tol: 1e-9,
            exp_tol: 1e-10,
            fd_h: 1e-5,
            fd_tol: 1e-6,
            det_tol: 1e-12,
            ortho_tol: 1e-9,
            log_radius: std::f64::consts::PI - 0.1,
            cycle_tol: 1e-8,
            fd_cross_tol: 1e-5,
            linearity_tol: 1e-6,
        }
    }
}

/// Supported matrix Lie groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixGroup {
    /// Rotations of R^3; algebra basis: the three standard generators.
    SO3,
    /// Invertible n x n matrices; algebra basis: elementary matrices, row-major.
    GL(usize),
}

impl MatrixGroup {
    pub fn n(&self) -> usize {
        match self {
            MatrixGroup::SO3 => 3,
            MatrixGroup::GL(n) => *n,
        }
    }

    pub fn algebra_dim(&self) -> usize {
        match self {
            MatrixGroup::SO3 => 3,
            MatrixGroup::GL(n) => n * n,
        }
    }

    /// Maps algebra coordinates to the matrix of the corresponding generator sum.
    pub fn algebra_matrix(&self, coeffs: &DVector<f64>) -> DMatrix<f64> {
        match self {
            MatrixGroup::SO3 => {
                let k = linalg::skew3(&Vector3::new(coeffs[0], coeffs[1], coeffs[2]));
                DMatrix::from_fn(3, 3, |i, j| k[(i, j)])
            }
            MatrixGroup::GL(n) => DMatrix::from_fn(*n, *n, |i, j| coeffs[i * n + j]),
        }
    }

    /// Exponential of the algebra element with the given coordinates.
    pub fn exp(&self, coeffs: &DVector<f64>) -> DMatrix<f64> {
        match self {
            MatrixGroup::SO3 => {
                let r = linalg::so3_exp(&Vector3::new(coeffs[0], coeffs[1], coeffs[2]));
                DMatrix::from_fn(3, 3, |i, j| r[(i, j)])
            }
            MatrixGroup::GL(_) => linalg::expm(&self.algebra_matrix(coeffs)),
        }
    }
}

/// Realization of the groupoid: which concrete arrows this instance manipulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupoidKind {
    /// Pair groupoid over R^n: arrows (q1, q2), composition by matching middles.
    PairRn(usize),
    /// A matrix Lie group seen as a groupoid over a single unit.
    Group(MatrixGroup),
    /// Pair groupoid over a matrix group manifold: arrows (h1, h2).
    PairGroup(MatrixGroup),
}

/// A groupoid realization together with its numerical tolerances.
#[derive(Clone, Debug)]
pub struct Groupoid {
    kind: GroupoidKind,
    pub tol: Tolerances,
}

/// A point of the base manifold in chart coordinates.
///
/// For a Lie group realization the base is a single unit: the empty vector.
#[derive(Clone, Debug, PartialEq)]
pub struct BasePoint {
    coords: DVector<f64>,
}

impl BasePoint {
    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// An arrow of the groupoid, stored as a flat real payload.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidElement {
    data: DVector<f64>,
}

impl GroupoidElement {
    pub fn data(&self) -> &DVector<f64> {
        &self.data
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.data.iter().copied().collect()
    }

    pub(crate) fn from_vector(data: DVector<f64>) -> Self {
        GroupoidElement { data }
    }
}

/// A fiber vector of the algebroid at a base point, in the fixed fiber basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebroidVector {
    pub base: BasePoint,
    pub coeffs: DVector<f64>,
}

/// A fiber covector at a base point, in the dual of the fixed fiber basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebroidCovector {
    pub base: BasePoint,
    pub coeffs: DVector<f64>,
}

impl Groupoid {
    pub fn pair_rn(n: usize) -> Self {
        Groupoid {
            kind: GroupoidKind::PairRn(n),
            tol: Tolerances::default(),
        }
    }

    pub fn so3() -> Self {
        Groupoid {
            kind: GroupoidKind::Group(MatrixGroup::SO3),
            tol: Tolerances::default(),
        }
    }

    pub fn gl(n: usize) -> Self {
        Groupoid {
            kind: GroupoidKind::Group(MatrixGroup::GL(n)),
            tol: Tolerances::default(),
        }
    }

    pub fn pair_group(group: MatrixGroup) -> Self {
        Groupoid {
            kind: GroupoidKind::PairGroup(group),
            tol: Tolerances::default(),
        }
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Parses a realization from a configuration string:
    /// `pair:R<n>`, `group:SO3`, `group:GL<n>`, `pair:SO3`, `pair:GL<n>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parse_group = |name: &str| -> Option<MatrixGroup> {
            if name == "SO3" {
                Some(MatrixGroup::SO3)
            } else if let Some(n) = name.strip_prefix("GL") {
                n.parse::<usize>().ok().filter(|n| *n > 0).map(MatrixGroup::GL)
            } else {
                None
            }
        };
        match spec.split_once(':') {
            Some(("pair", rest)) => {
                if let Some(n) = rest.strip_prefix('R') {
                    let n: usize = n
                        .parse()
                        .map_err(|_| Error::UnknownSpec(spec.to_string()))?;
                    if n == 0 {
                        return Err(Error::UnknownSpec(spec.to_string()));
                    }
                    Ok(Groupoid::pair_rn(n))
                } else if let Some(g) = parse_group(rest) {
                    Ok(Groupoid::pair_group(g))
                } else {
                    Err(Error::UnknownSpec(spec.to_string()))
                }
            }
            Some(("group", rest)) => parse_group(rest)
                .map(|g| Groupoid {
                    kind: GroupoidKind::Group(g),
                    tol: Tolerances::default(),
                })
                .ok_or_else(|| Error::UnknownSpec(spec.to_string())),
            _ => Err(Error::UnknownSpec(spec.to_string())),
        }
    }

    pub fn spec_string(&self) -> String {
        match self.kind {
            GroupoidKind::PairRn(n) => format!("pair:R{n}"),
            GroupoidKind::Group(MatrixGroup::SO3) => "group:SO3".to_string(),
            GroupoidKind::Group(MatrixGroup::GL(n)) => format!("group:GL{n}"),
            GroupoidKind::PairGroup(MatrixGroup::SO3) => "pair:SO3".to_string(),
            GroupoidKind::PairGroup(MatrixGroup::GL(n)) => format!("pair:GL{n}"),
        }
    }

    pub fn kind(&self) -> GroupoidKind {
        self.kind
    }

    /// Dimension of the base manifold chart.
    pub fn base_dim(&self) -> usize {
        match self.kind {
            GroupoidKind::PairRn(n) => n,
            GroupoidKind::Group(_) => 0,
            GroupoidKind::PairGroup(g) => g.n() * g.n(),
        }
    }

    /// Dimension of the algebroid fiber.
    pub fn fiber_dim(&self) -> usize {
        match self.kind {
            GroupoidKind::PairRn(n) => n,
            GroupoidKind::Group(g) => g.algebra_dim(),
            GroupoidKind::PairGroup(g) => g.algebra_dim(),
        }
    }

    /// Length of the flat element payload.
    pub fn element_len(&self) -> usize {
        match self.kind {
            GroupoidKind::PairRn(n) => 2 * n,
            GroupoidKind::Group(g) => g.n() * g.n(),
            GroupoidKind::PairGroup(g) => 2 * g.n() * g.n(),
        }
    }

    fn group(&self) -> Option<MatrixGroup> {
        match self.kind {
            GroupoidKind::Group(g) => Some(g),
            _ => None,
        }
    }

    /// True when the realization composes by matrix multiplication somewhere.
    pub fn is_matrix_backed(&self) -> bool {
        !matches!(self.kind, GroupoidKind::PairRn(_))
    }

    // ---- base points -----------------------------------------------------

    /// Validates chart coordinates as a base point.
    pub fn base_point(&self, coords: Vec<f64>) -> Result<BasePoint> {
        if coords.len() != self.base_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.base_dim(),
                got: coords.len(),
            });
        }
        let v = DVector::from_vec(coords);
        if let GroupoidKind::PairGroup(g) = self.kind {
            let m = flat_to_matrix(&v, g.n());
            check_invertible(&m, self.tol.det_tol)?;
        }
        Ok(BasePoint { coords: v })
    }

    /// The unit base point of a Lie group realization.
    pub fn unit_base(&self) -> BasePoint {
        match self.kind {
            GroupoidKind::Group(_) => BasePoint {
                coords: DVector::zeros(0),
            },
            GroupoidKind::PairGroup(g) => {
                let n = g.n();
                BasePoint {
                    coords: matrix_to_flat(&DMatrix::identity(n, n)),
                }
            }
            GroupoidKind::PairRn(n) => BasePoint {
                coords: DVector::zeros(n),
            },
        }
    }

    pub fn base_distance(&self, a: &BasePoint, b: &BasePoint) -> f64 {
        (&a.coords - &b.coords).norm()
    }

    // ---- elements ---------------------------------------------------------

    /// Validates a flat payload as an element of this realization.
    pub fn element_from_flat(&self, data: Vec<f64>) -> Result<GroupoidElement> {
        if data.len() != self.element_len() {
            return Err(Error::DimensionMismatch {
                expected: self.element_len(),
                got: data.len(),
            });
        }
        let v = DVector::from_vec(data);
        match self.kind {
            GroupoidKind::PairRn(_) => {}
            GroupoidKind::Group(g) => {
                check_invertible(&flat_to_matrix(&v, g.n()), self.tol.det_tol)?;
            }
            GroupoidKind::PairGroup(g) => {
                let n = g.n();
                let (a, b) = split_halves(&v);
                check_invertible(&flat_to_matrix(&a, n), self.tol.det_tol)?;
                check_invertible(&flat_to_matrix(&b, n), self.tol.det_tol)?;
            }
        }
        Ok(GroupoidElement { data: v })
    }

    /// Pair-type realizations: the arrow from `a` to `b`.
    pub fn pair(&self, a: &BasePoint, b: &BasePoint) -> Result<GroupoidElement> {
        match self.kind {
            GroupoidKind::PairRn(_) | GroupoidKind::PairGroup(_) => {
                let mut data = DVector::zeros(2 * self.base_dim());
                data.rows_mut(0, self.base_dim()).copy_from(&a.coords);
                data.rows_mut(self.base_dim(), self.base_dim())
                    .copy_from(&b.coords);
                Ok(GroupoidElement { data })
            }
            _ => Err(Error::WrongRealization {
                expected: "pair groupoid",
                got: self.spec_string(),
            }),
        }
    }

    /// Group realization: the element with the given matrix.
    pub fn element_from_matrix(&self, m: &DMatrix<f64>) -> Result<GroupoidElement> {
        let g = self.group().ok_or(Error::WrongRealization {
            expected: "matrix group",
            got: self.spec_string(),
        })?;
        if m.nrows() != g.n() || m.ncols() != g.n() {
            return Err(Error::DimensionMismatch {
                expected: g.n(),
                got: m.nrows(),
            });
        }
        check_invertible(m, self.tol.det_tol)?;
        Ok(GroupoidElement {
            data: matrix_to_flat(m),
        })
    }

    /// Group realization: the matrix payload of an element.
    pub fn matrix_of(&self, g: &GroupoidElement) -> Result<DMatrix<f64>> {
        let grp = self.group().ok_or(Error::WrongRealization {
            expected: "matrix group",
            got: self.spec_string(),
        })?;
        Ok(flat_to_matrix(&g.data, grp.n()))
    }

    /// Coefficient-norm distance between two elements.
    pub fn element_distance(&self, a: &GroupoidElement, b: &GroupoidElement) -> f64 {
        (&a.data - &b.data).norm()
    }

    // ---- structure maps ----------------------------------------------------

    /// Source anchor.
    pub fn alpha(&self, g: &GroupoidElement) -> BasePoint {
        match self.kind {
            GroupoidKind::PairRn(_) | GroupoidKind::PairGroup(_) => BasePoint {
                coords: g.data.rows(0, self.base_dim()).into_owned(),
            },
            GroupoidKind::Group(_) => self.unit_base(),
        }
    }

    /// Target anchor.
    pub fn beta(&self, g: &GroupoidElement) -> BasePoint {
        match self.kind {
            GroupoidKind::PairRn(_) | GroupoidKind::PairGroup(_) => BasePoint {
                coords: g.data.rows(self.base_dim(), self.base_dim()).into_owned(),
            },
            GroupoidKind::Group(_) => self.unit_base(),
        }
    }

    /// The unit arrow at a base point.
    pub fn identity(&self, x: &BasePoint) -> GroupoidElement {
        match self.kind {
            GroupoidKind::PairRn(_) | GroupoidKind::PairGroup(_) => {
                self.pair(x, x).expect("pair realization")
            }
            GroupoidKind::Group(g) => {
                let n = g.n();
                GroupoidElement {
                    data: matrix_to_flat(&DMatrix::identity(n, n)),
                }
            }
        }
    }

    /// Partial multiplication; defined when `beta(g)` matches `alpha(h)`.
    pub fn compose(&self, g: &GroupoidElement, h: &GroupoidElement) -> Result<GroupoidElement> {
        let defect = self.base_distance(&self.beta(g), &self.alpha(h));
        if defect > self.tol.compose_tol {
            return Err(Error::NotComposable {
                defect,
                tol: self.tol.compose_tol,
            });
        }
        match self.kind {
            GroupoidKind::PairRn(_) | GroupoidKind::PairGroup(_) => {
                self.pair(&self.alpha(g), &self.beta(h))
            }
            GroupoidKind::Group(grp) => {
                let n = grp.n();
                let mut m = flat_to_matrix(&g.data, n) * flat_to_matrix(&h.data, n);
                if grp == MatrixGroup::SO3 {
                    // Re-project when accumulated drift leaves the rotation group.
                    let defect = (m.transpose() * &m - DMatrix::identity(n, n)).norm();
                    if defect > self.tol.ortho_tol / 10.0 {
                        let fixed = linalg::polar_rotation(&Matrix3::from_fn(|i, j| m[(i, j)]));
                        m = DMatrix::from_fn(3, 3, |i, j| fixed[(i, j)]);
                    }
                }
                Ok(GroupoidElement {
                    data: matrix_to_flat(&m),
                })
            }
        }
    }

    /// Inversion: `g^-1 g = beta(g)` and `g g^-1 = alpha(g)`.
    pub fn inverse(&self, g: &GroupoidElement) -> Result<GroupoidElement> {
        match self.kind {
            GroupoidKind::PairRn(_) | GroupoidKind::PairGroup(_) => {
                let (a, b) = split_halves(&g.data);
                let mut data = DVector::zeros(g.data.len());
                data.rows_mut(0, a.len()).copy_from(&b);
                data.rows_mut(a.len(), a.len()).copy_from(&a);
                Ok(GroupoidElement { data })
            }
            GroupoidKind::Group(grp) => {
                let n = grp.n();
                let m = flat_to_matrix(&g.data, n);
                let inv = if grp == MatrixGroup::SO3 {
                    m.transpose()
                } else {
                    m.try_inverse().ok_or(Error::SingularMatrix(self.tol.det_tol))?
                };
                Ok(GroupoidElement {
                    data: matrix_to_flat(&inv),
                })
            }
        }
    }

    // ---- fiber algebra ------------------------------------------------------

    /// Validates a coefficient vector as a fiber vector at `base`.
    pub fn algebroid_vector(&self, base: BasePoint, coeffs: Vec<f64>) -> Result<AlgebroidVector> {
        if coeffs.len() != self.fiber_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.fiber_dim(),
                got: coeffs.len(),
            });
        }
        if base.dim() != self.base_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.base_dim(),
                got: base.dim(),
            });
        }
        Ok(AlgebroidVector {
            base,
            coeffs: DVector::from_vec(coeffs),
        })
    }

    /// Same validation for covectors (the dual carries the same coordinates).
    pub fn algebroid_covector(
        &self,
        base: BasePoint,
        coeffs: Vec<f64>,
    ) -> Result<AlgebroidCovector> {
        let v = self.algebroid_vector(base, coeffs)?;
        Ok(AlgebroidCovector {
            base: v.base,
            coeffs: v.coeffs,
        })
    }

    pub fn zero_vector(&self, base: BasePoint) -> AlgebroidVector {
        AlgebroidVector {
            base,
            coeffs: DVector::zeros(self.fiber_dim()),
        }
    }

    /// The j-th vector (0-based) of the fixed fiber basis at `base`.
    pub fn basis_vector(&self, base: BasePoint, j: usize) -> AlgebroidVector {
        let mut coeffs = DVector::zeros(self.fiber_dim());
        coeffs[j] = 1.0;
        AlgebroidVector { base, coeffs }
    }

    /// Duality pairing: Euclidean dot of coefficients in the fixed dual bases.
    pub fn pairing(&self, p: &AlgebroidCovector, v: &AlgebroidVector) -> Result<f64> {
        if p.coeffs.len() != v.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: p.coeffs.len(),
                got: v.coeffs.len(),
            });
        }
        let dist = self.base_distance(&p.base, &v.base);
        if dist > self.tol.compose_tol {
            return Err(Error::BaseMismatch(dist));
        }
        Ok(p.coeffs.dot(&v.coeffs))
    }

    /// The alpha-fiber curve through the unit at `x` with initial velocity `v`:
    /// `h(0) = identity(x)`, `h'(0) = v`. Pair groupoid over R^n: the straight
    /// line `(x, x + t v)`; groups: `exp(t xi)`; pair over a group: `(h, h exp(t xi))`.
    pub fn alpha_curve(&self, x: &BasePoint, v: &AlgebroidVector, t: f64) -> GroupoidElement {
        match self.kind {
            GroupoidKind::PairRn(_) => {
                let moved = BasePoint {
                    coords: &x.coords + &v.coeffs * t,
                };
                self.pair(x, &moved).expect("pair realization")
            }
            GroupoidKind::Group(g) => {
                let m = g.exp(&(&v.coeffs * t));
                GroupoidElement {
                    data: matrix_to_flat(&m),
                }
            }
            GroupoidKind::PairGroup(g) => {
                let n = g.n();
                let h = flat_to_matrix(&x.coords, n);
                let moved = BasePoint {
                    coords: matrix_to_flat(&(&h * g.exp(&(&v.coeffs * t)))),
                };
                self.pair(x, &moved).expect("pair realization")
            }
        }
    }

    /// Group logarithm in fiber coordinates; inverse of `alpha_curve(unit, ., 1)`.
    ///
    /// Only defined for matrix group realizations. For SO(3) the injectivity
    /// bound is the rotation angle; for GL(n) failure of the inverse
    /// scaling-and-squaring iteration reports the same error.
    pub fn log_group(&self, g: &GroupoidElement) -> Result<AlgebroidVector> {
        let grp = self.group().ok_or(Error::WrongRealization {
            expected: "matrix group",
            got: self.spec_string(),
        })?;
        let m = flat_to_matrix(&g.data, grp.n());
        let coeffs = match grp {
            MatrixGroup::SO3 => {
                let r = Matrix3::from_fn(|i, j| m[(i, j)]);
                let angle = linalg::so3_angle(&r);
                if angle >= self.tol.log_radius {
                    return Err(Error::OutsideInjectivityRadius {
                        value: angle,
                        radius: self.tol.log_radius,
                    });
                }
                let w = linalg::so3_log(&r);
                DVector::from_vec(vec![w.x, w.y, w.z])
            }
            MatrixGroup::GL(n) => {
                check_invertible(&m, self.tol.det_tol)?;
                let l = linalg::logm(&m).ok_or(Error::OutsideInjectivityRadius {
                    value: (&m - DMatrix::identity(n, n)).norm(),
                    radius: self.tol.log_radius,
                })?;
                matrix_to_flat(&l)
            }
        };
        Ok(AlgebroidVector {
            base: self.unit_base(),
            coeffs,
        })
    }

    /// Group exponential as an element; convenience for `alpha_curve` at the unit.
    pub fn exp_group(&self, coeffs: &DVector<f64>) -> Result<GroupoidElement> {
        let grp = self.group().ok_or(Error::WrongRealization {
            expected: "matrix group",
            got: self.spec_string(),
        })?;
        Ok(GroupoidElement {
            data: matrix_to_flat(&grp.exp(coeffs)),
        })
    }

    // ---- per-vertex states ---------------------------------------------------
    //
    // A discrete field over any realization is generated by one flat state per
    // vertex: the base point for pair realizations, a group element (the gauge
    // potential) for group realizations. Solvers parametrize their unknowns this
    // way; the multiplicative update for groups keeps iterates on the group.

    /// Length of the per-vertex state vector.
    pub fn state_len(&self) -> usize {
        match self.kind {
            GroupoidKind::PairRn(n) => n,
            GroupoidKind::Group(g) | GroupoidKind::PairGroup(g) => g.n() * g.n(),
        }
    }

    /// The neutral state (origin, or the identity matrix).
    pub fn neutral_state(&self) -> DVector<f64> {
        match self.kind {
            GroupoidKind::PairRn(n) => DVector::zeros(n),
            GroupoidKind::Group(g) | GroupoidKind::PairGroup(g) => {
                matrix_to_flat(&DMatrix::identity(g.n(), g.n()))
            }
        }
    }

    /// Moves a state along the fiber direction `xi`: additive for the pair
    /// groupoid over R^n, right multiplication by `exp(t xi)` otherwise.
    pub fn perturb_state(&self, state: &DVector<f64>, xi: &DVector<f64>, t: f64) -> DVector<f64> {
        match self.kind {
            GroupoidKind::PairRn(_) => state + xi * t,
            GroupoidKind::Group(g) | GroupoidKind::PairGroup(g) => {
                let m = flat_to_matrix(state, g.n()) * g.exp(&(xi * t));
                matrix_to_flat(&m)
            }
        }
    }

    /// The arrow induced between the states of two vertices: `(s_u, s_v)` for
    /// pair realizations and `s_u^-1 s_v` for groups.
    pub fn edge_from_states(&self, su: &DVector<f64>, sv: &DVector<f64>) -> Result<GroupoidElement> {
        match self.kind {
            GroupoidKind::PairRn(_) | GroupoidKind::PairGroup(_) => {
                let a = BasePoint { coords: su.clone() };
                let b = BasePoint { coords: sv.clone() };
                self.pair(&a, &b)
            }
            GroupoidKind::Group(g) => {
                let n = g.n();
                let mu = flat_to_matrix(su, n);
                let inv = if g == MatrixGroup::SO3 {
                    mu.transpose()
                } else {
                    mu.try_inverse().ok_or(Error::SingularMatrix(self.tol.det_tol))?
                };
                Ok(GroupoidElement {
                    data: matrix_to_flat(&(inv * flat_to_matrix(sv, n))),
                })
            }
        }
    }

    /// The vertex value induced by a state: the base point itself for pair
    /// realizations, the unique unit for groups.
    pub fn vertex_value_from_state(&self, s: &DVector<f64>) -> BasePoint {
        match self.kind {
            GroupoidKind::PairRn(_) | GroupoidKind::PairGroup(_) => BasePoint { coords: s.clone() },
            GroupoidKind::Group(_) => self.unit_base(),
        }
    }
}

fn split_halves(v: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let half = v.len() / 2;
    (v.rows(0, half).into_owned(), v.rows(half, half).into_owned())
}

pub(crate) fn flat_to_matrix(v: &DVector<f64>, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| v[i * n + j])
}

pub(crate) fn matrix_to_flat(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    DVector::from_fn(n * n, |k, _| m[(k / n, k % n)])
}

fn check_invertible(m: &DMatrix<f64>, det_tol: f64) -> Result<()> {
    let det = m.clone().lu().determinant();
    if det.abs() <= det_tol {
        return Err(Error::SingularMatrix(det_tol));
    }
    Ok(())
}
