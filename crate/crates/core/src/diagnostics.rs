//! Seeded invariant suites: groupoid axioms, differential decomposition, path
//! independence, reduction commutation, and the multisymplectic boundary
//! identity. The CLI `check` subcommand runs these; the acceptance tests pin
//! the same quantities against independent oracles.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{validate_field, DiscreteField, InfinitesimalVariation};
use crate::groupoid::Groupoid;
use crate::jet::directional_derivative;
use crate::lagrangian::{
    chiral_field_lagrangian, pc_form, quadratic_edge_lagrangian, Lagrangian,
};
use crate::mesh::MeshTopology;
use crate::sample;
use crate::solver::{
    lie_poisson_residual, multisymplectic_defect, residual_at, solve_boundary_value, NewtonParams,
};
use crate::Result;

/// Outcome of one named check: the measured defect against its threshold.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, measured: f64, threshold: f64, detail: String) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed: measured <= threshold,
            measured,
            threshold,
            detail,
        }
    }
}

/// Worst defect of the groupoid axioms over random composable triples:
/// associativity, units, and inverses.
pub fn groupoid_axiom_defect<R: Rng>(g: &Groupoid, rng: &mut R, triples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..triples {
        let (a, b, c) = sample::random_composable_triple(g, rng, 0.8)?;
        // associativity
        let left = g.compose(&g.compose(&a, &b)?, &c)?;
        let right = g.compose(&a, &g.compose(&b, &c)?)?;
        worst = worst.max(g.element_distance(&left, &right));
        // units
        let ua = g.compose(&g.identity(&g.alpha(&a)), &a)?;
        let au = g.compose(&a, &g.identity(&g.beta(&a)))?;
        worst = worst.max(g.element_distance(&ua, &a));
        worst = worst.max(g.element_distance(&au, &a));
        // inverses
        let inv = g.inverse(&a)?;
        worst = worst.max(g.element_distance(&g.compose(&inv, &a)?, &g.identity(&g.beta(&a))));
        worst = worst.max(g.element_distance(&g.compose(&a, &inv)?, &g.identity(&g.alpha(&a))));
        // anchors of products
        worst = worst.max(g.base_distance(&g.alpha(&left), &g.alpha(&a)));
        worst = worst.max(g.base_distance(&g.beta(&left), &g.beta(&c)));
    }
    Ok(worst)
}

/// Worst defect of `DL[v] = sum_i <theta_i, v_i>` over random jets and tuples.
pub fn dl_decomposition_defect<R: Rng>(
    g: &Groupoid,
    lagrangian: &Lagrangian,
    rng: &mut R,
    jets: usize,
) -> Result<f64> {
    let k = lagrangian.k();
    let mut worst = 0.0f64;
    for _ in 0..jets {
        let jet = sample::random_jet(g, k, rng, 0.5)?;
        let vectors: Vec<_> = (1..=k)
            .map(|i| sample::random_vector_at(g, g.alpha(jet.component(i)), rng, 1.0))
            .collect();
        let full = directional_derivative(g, lagrangian, &jet, &vectors)?;
        let mut split = 0.0;
        for (i, v) in vectors.iter().enumerate() {
            let theta = pc_form(g, lagrangian, &jet, i + 1)?;
            split += g.pairing(&theta.covector, v)?;
        }
        worst = worst.max((full - split).abs());
    }
    Ok(worst)
}

/// Worst disagreement of path products between random path pairs on a random
/// valid field.
pub fn path_independence_defect<R: Rng>(
    g: &Groupoid,
    mesh: &MeshTopology,
    rng: &mut R,
    vertex_pairs: usize,
    paths_per_pair: usize,
) -> Result<f64> {
    let field = sample::random_field(g, mesh, rng, 0.6)?;
    debug_assert!(validate_field(g, &field, mesh).is_ok());
    let n = mesh.n_vertices();
    let mut worst = 0.0f64;
    for _ in 0..vertex_pairs {
        let x = rng.random_range(0..n);
        let mut y = rng.random_range(0..n);
        while y == x {
            y = rng.random_range(0..n);
        }
        let mut reference = None;
        for _ in 0..paths_per_pair {
            let path = sample::random_path(mesh, rng, x, y, 4 * n);
            let product = crate::field::product_along(g, &field, &path)?;
            match &reference {
                None => reference = Some(product),
                Some(r) => worst = worst.max(g.element_distance(r, &product)),
            }
        }
    }
    Ok(worst)
}

/// Cross-assembly defect between the Lie-Poisson residual and the generic
/// residual on a random group-valued field over the triangular mesh.
pub fn reduction_commutation_defect<R: Rng>(
    g: &Groupoid,
    mesh: &MeshTopology,
    rng: &mut R,
) -> Result<f64> {
    let lagrangian = chiral_field_lagrangian(g, 3)?;
    let l_hat = {
        let g = g.clone();
        move |a: &crate::groupoid::GroupoidElement, b: &crate::groupoid::GroupoidElement| {
            let jet = crate::jet::make_jet(
                &g,
                vec![
                    a.clone(),
                    b.clone(),
                    g.inverse(&g.compose(a, b).unwrap()).unwrap(),
                ],
            )
            .expect("triple closes into a 3-gon");
            chiral_field_lagrangian(&g, 3).unwrap().evaluate(&jet)
        }
    };
    let field = sample::random_field(g, mesh, rng, 0.4)?;
    let mut worst = 0.0f64;
    for u in mesh.interior_vertices() {
        let lp = lie_poisson_residual(g, &l_hat, &field, mesh, u)?;
        let generic = residual_at(g, &lagrangian, &field, mesh, u)?;
        worst = worst.max((lp.coeffs - generic.covector.coeffs).norm());
    }
    Ok(worst)
}

/// First variations of a solved boundary-value problem, by differentiating the
/// solution family with respect to a random boundary perturbation.
#[allow(clippy::too_many_arguments)]
pub fn linearized_solution_variation<R: Rng>(
    g: &Groupoid,
    lagrangian: &Lagrangian,
    mesh: &MeshTopology,
    region: &BTreeSet<usize>,
    solution: &DiscreteField,
    params: NewtonParams,
    rng: &mut R,
    step: f64,
) -> Result<InfinitesimalVariation> {
    let unknowns: BTreeSet<usize> =
        crate::solver::region_interior_vertices(mesh, region).into_iter().collect();
    let mut states = crate::solver::extract_states(g, solution, mesh)?;
    // random frozen-vertex perturbation direction
    let direction: BTreeMap<usize, nalgebra::DVector<f64>> = (0..mesh.n_vertices())
        .filter(|v| !unknowns.contains(v))
        .map(|v| (v, sample::random_coeffs(rng, g.fiber_dim(), 1.0)))
        .collect();
    let mut solved = Vec::new();
    for sign in [1.0, -1.0] {
        for (&v, xi) in &direction {
            states[v] = g.perturb_state(
                &crate::solver::extract_states(g, solution, mesh)?[v],
                xi,
                sign * step,
            );
        }
        let perturbed = DiscreteField::from_vertex_states(g, mesh, &states)?;
        let (sol, _) =
            solve_boundary_value(g, lagrangian, mesh, region, &perturbed, &perturbed, params)?;
        solved.push(sol);
    }
    let mut vectors = BTreeMap::new();
    for v in 0..mesh.n_vertices() {
        let plus = crate::solver::extract_states(g, &solved[0], mesh)?[v].clone();
        let minus = crate::solver::extract_states(g, &solved[1], mesh)?[v].clone();
        let coeffs = (plus - minus) / (2.0 * step);
        if coeffs.norm() > 0.0 {
            vectors.insert(
                v,
                crate::groupoid::AlgebroidVector {
                    base: solution.vertex_value(v)?.clone(),
                    coeffs,
                },
            );
        }
    }
    InfinitesimalVariation::new(g, solution, vectors, BTreeSet::new())
}

/// The default seeded suite behind `check`: every registered invariant with
/// its threshold.
pub fn default_suite(seed: u64, workers: usize) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::new();

    for spec in ["pair:R2", "group:SO3", "group:GL2", "pair:SO3"] {
        let g = Groupoid::parse(spec)?;
        let defect = groupoid_axiom_defect(&g, &mut rng, 250)?;
        outcomes.push(CheckOutcome::new(
            &format!("groupoid-axioms[{spec}]"),
            defect,
            1e-9,
            "250 random composable triples".into(),
        ));
    }

    {
        let g = Groupoid::pair_rn(2);
        let lagrangian = quadratic_edge_lagrangian(&g, 4, vec![1.0, -0.5, 0.25, 1.5], 0.3)?;
        let defect = dl_decomposition_defect(&g, &lagrangian.clone().without_exact(), &mut rng, 50)?;
        outcomes.push(CheckOutcome::new(
            "dl-decomposition[pair:R2,wave]",
            defect,
            1e-6,
            "50 random jets, finite-difference path".into(),
        ));
        let defect = dl_decomposition_defect(&g, &lagrangian, &mut rng, 50)?;
        outcomes.push(CheckOutcome::new(
            "dl-decomposition[pair:R2,wave,exact]",
            defect,
            1e-6,
            "50 random jets, exact-derivative path".into(),
        ));
        let so3 = Groupoid::so3();
        let chiral = chiral_field_lagrangian(&so3, 3)?;
        let defect = dl_decomposition_defect(&so3, &chiral, &mut rng, 50)?;
        outcomes.push(CheckOutcome::new(
            "dl-decomposition[group:SO3,chiral]",
            defect,
            1e-6,
            "50 random jets".into(),
        ));
    }

    {
        let mesh = MeshTopology::build_square_mesh(5, 5, 1.0, 1.0)?;
        for spec in ["pair:R2", "group:SO3"] {
            let g = Groupoid::parse(spec)?;
            let defect = path_independence_defect(&g, &mesh, &mut rng, 5, 10)?;
            outcomes.push(CheckOutcome::new(
                &format!("path-independence[{spec}]"),
                defect,
                1e-9,
                "5 vertex pairs, 10 random paths each".into(),
            ));
        }
    }

    {
        let g = Groupoid::so3();
        let mesh = MeshTopology::build_triangular_mesh(4, 4)?;
        let defect = reduction_commutation_defect(&g, &mesh, &mut rng)?;
        outcomes.push(CheckOutcome::new(
            "reduction-commutation[group:SO3]",
            defect,
            1e-6,
            "Lie-Poisson vs generic residual on a random field".into(),
        ));
    }

    {
        let g = Groupoid::pair_rn(1);
        let mesh = MeshTopology::build_square_mesh(4, 4, 1.0, 1.0)?;
        let lagrangian = quadratic_edge_lagrangian(&g, 4, vec![1.0; 4], 0.0)?;
        let region = mesh.all_faces();
        let boundary = sample::random_field(&g, &mesh, &mut rng, 0.5)?;
        let params = NewtonParams::for_groupoid(&g).with_workers(workers);
        let (solution, _) = solve_boundary_value(
            &g, &lagrangian, &mesh, &region, &boundary, &boundary, params,
        )?;
        let mut worst = 0.0f64;
        for _ in 0..2 {
            let gamma1 = linearized_solution_variation(
                &g, &lagrangian, &mesh, &region, &solution, params, &mut rng, 1e-4,
            )?;
            let gamma2 = linearized_solution_variation(
                &g, &lagrangian, &mesh, &region, &solution, params, &mut rng, 1e-4,
            )?;
            let defect = multisymplectic_defect(
                &g, &lagrangian, &solution, &mesh, &region, &gamma1, &gamma2, 1e-4, 1e-8,
            )?;
            worst = worst.max(defect);
        }
        outcomes.push(CheckOutcome::new(
            "multisymplectic-defect[pair:R1,laplace]",
            worst,
            1e-5,
            "2 linearized first-variation pairs on a solved 4x4 problem".into(),
        ));
    }

    Ok(outcomes)
}
