//! Subcommand implementations. Configuration is resolved completely before any
//! artifact is written, so configuration errors leave no partial output.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use varfield::fmt_g17;
use varfield::field::DiscreteField;
use varfield::gauge::{holonomy, is_flat, GaugeField, PathInComplex};
use varfield::groupoid::{Groupoid, GroupoidKind};
use varfield::lagrangian::{action_sum, Lagrangian};
use varfield::mesh::{DirectedEdge, MeshTopology};
use varfield::solver::{
    max_interior_residual, multisymplectic_defect, solve_boundary_value, solve_time_march,
    MarchStep, NewtonParams, SolveReport,
};

use crate::config::ExperimentConfig;

pub enum CommandError {
    Config(String),
    Runtime(String),
}

type CmdResult = Result<(), CommandError>;

fn config_err<T>(message: String) -> Result<T, CommandError> {
    Err(CommandError::Config(message))
}

fn runtime<E: std::fmt::Display>(e: E) -> CommandError {
    CommandError::Runtime(e.to_string())
}

/// Everything `run` needs, resolved up front.
struct Resolved {
    mesh: MeshTopology,
    groupoid: Groupoid,
    lagrangian: Lagrangian,
    states: Vec<DVector<f64>>,
    params: NewtonParams,
    out: PathBuf,
}

fn resolve(config: &ExperimentConfig) -> Result<Resolved, CommandError> {
    let mesh = config.mesh.build().or_else(config_err)?;
    let groupoid = config.groupoid.build().or_else(config_err)?;
    let lagrangian = config
        .lagrangian
        .build(&groupoid, mesh.k())
        .or_else(config_err)?;
    let states = config.data.states(&groupoid, &mesh).or_else(config_err)?;
    let params = config.solver.newton_params(&groupoid, config.workers);
    let out = PathBuf::from(config.out.clone().unwrap_or_else(|| "out".into()));
    Ok(Resolved {
        mesh,
        groupoid,
        lagrangian,
        states,
        params,
        out,
    })
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    command: String,
    config: ExperimentConfig,
    converged: bool,
    iterations: usize,
    residual: f64,
    wall_time: f64,
    action: f64,
    multisymplectic_defects: Vec<f64>,
    artifacts: Vec<String>,
}

pub fn run(config: &ExperimentConfig) -> CmdResult {
    let resolved = resolve(config)?;
    match config.solver.mode.as_str() {
        "boundary_value" => run_boundary_value(config, resolved),
        "time_march" => run_time_march(config, resolved),
        other => config_err(format!("unknown solver mode: {other}")),
    }
}

fn run_boundary_value(config: &ExperimentConfig, r: Resolved) -> CmdResult {
    let field = DiscreteField::from_vertex_states(&r.groupoid, &r.mesh, &r.states)
        .map_err(runtime)?;
    let region = r.mesh.all_faces();
    let (solution, report) = solve_boundary_value(
        &r.groupoid,
        &r.lagrangian,
        &r.mesh,
        &region,
        &field,
        &field,
        r.params,
    )
    .map_err(runtime)?;
    let action =
        action_sum(&r.groupoid, &r.lagrangian, &solution, &r.mesh, &region).map_err(runtime)?;
    let residual_sup =
        max_interior_residual(&r.groupoid, &r.lagrangian, &solution, &r.mesh, &region)
            .map_err(runtime)?;

    let ms_defects = if config.diagnostics.multisymplectic {
        multisymplectic_probe(config, &r, &solution, &region)?
    } else {
        Vec::new()
    };

    fs::create_dir_all(&r.out).map_err(runtime)?;
    let mut artifacts = Vec::new();
    artifacts.push(write_field(&r, &solution)?);
    artifacts.push(write_convergence(&r.out, &report)?);
    artifacts.push(write_diagnostics(
        &r.out,
        &[
            ("action".into(), action),
            ("residual_sup".into(), residual_sup),
        ],
        &ms_defects,
    )?);
    if let Some(grid) = grid_artifact(&r, &solution)? {
        artifacts.push(grid);
    }
    let manifest = Manifest {
        command: "run".into(),
        config: config.clone(),
        converged: report.converged,
        iterations: report.iterations,
        residual: report.residual,
        wall_time: report.wall_time,
        action,
        multisymplectic_defects: ms_defects,
        artifacts: artifacts.clone(),
    };
    write_manifest(&r.out, &manifest)?;
    println!(
        "converged={} iterations={} residual={} action={}",
        report.converged,
        report.iterations,
        fmt_g17(report.residual),
        fmt_g17(action)
    );
    Ok(())
}

fn run_time_march(config: &ExperimentConfig, r: Resolved) -> CmdResult {
    // marching uses nx columns from the mesh config and steps+2 rows
    let nx = r.mesh.grid_dims().map(|(nx, _)| nx).unwrap_or(0);
    let ny = config.solver.steps + 2;
    let mesh = MeshTopology::build_square_mesh(nx, ny, config.mesh.dx, config.mesh.dy)
        .map_err(|e| CommandError::Config(format!("march mesh: {e}")))?;
    let states = config
        .data
        .states(&r.groupoid, &mesh)
        .or_else(config_err)?;
    let row0: Vec<DVector<f64>> = (0..nx).map(|i| states[i].clone()).collect();
    let row1: Vec<DVector<f64>> = (0..nx).map(|i| states[nx + i].clone()).collect();
    let (solution, steps) = solve_time_march(
        &r.groupoid,
        &r.lagrangian,
        &mesh,
        &row0,
        &row1,
        r.params,
    )
    .map_err(runtime)?;
    let region = mesh.all_faces();
    let action =
        action_sum(&r.groupoid, &r.lagrangian, &solution, &mesh, &region).map_err(runtime)?;

    fs::create_dir_all(&r.out).map_err(runtime)?;
    let marched = Resolved { mesh, ..r };
    let mut artifacts = Vec::new();
    artifacts.push(write_field(&marched, &solution)?);
    artifacts.push(write_march(&marched.out, &steps)?);
    if let Some(grid) = grid_artifact(&marched, &solution)? {
        artifacts.push(grid);
    }
    let last = steps.last();
    let manifest = Manifest {
        command: "run".into(),
        config: config.clone(),
        converged: steps.iter().all(|s| s.report.converged),
        iterations: steps.iter().map(|s| s.report.iterations).sum(),
        residual: last.map(|s| s.report.residual).unwrap_or(0.0),
        wall_time: steps.iter().map(|s| s.report.wall_time).sum(),
        action,
        multisymplectic_defects: Vec::new(),
        artifacts: artifacts.clone(),
    };
    write_manifest(&marched.out, &manifest)?;
    println!(
        "marched {} rows, total action {}",
        steps.len(),
        fmt_g17(action)
    );
    Ok(())
}

fn multisymplectic_probe(
    config: &ExperimentConfig,
    r: &Resolved,
    solution: &DiscreteField,
    region: &BTreeSet<usize>,
) -> Result<Vec<f64>, CommandError> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let mut defects = Vec::new();
    for _ in 0..config.diagnostics.variation_pairs {
        let gamma1 = varfield::diagnostics::linearized_solution_variation(
            &r.groupoid,
            &r.lagrangian,
            &r.mesh,
            region,
            solution,
            r.params,
            &mut rng,
            1e-4,
        )
        .map_err(runtime)?;
        let gamma2 = varfield::diagnostics::linearized_solution_variation(
            &r.groupoid,
            &r.lagrangian,
            &r.mesh,
            region,
            solution,
            r.params,
            &mut rng,
            1e-4,
        )
        .map_err(runtime)?;
        let defect = multisymplectic_defect(
            &r.groupoid,
            &r.lagrangian,
            solution,
            &r.mesh,
            region,
            &gamma1,
            &gamma2,
            1e-4,
            r.params.tol * 100.0,
        )
        .map_err(runtime)?;
        defects.push(defect);
    }
    Ok(defects)
}

fn write_field(r: &Resolved, field: &DiscreteField) -> Result<String, CommandError> {
    let path = r.out.join("solution.json");
    fs::write(&path, field.to_json().map_err(runtime)?).map_err(runtime)?;
    Ok("solution.json".into())
}

fn grid_artifact(r: &Resolved, field: &DiscreteField) -> Result<Option<String>, CommandError> {
    if !matches!(r.groupoid.kind(), GroupoidKind::PairRn(_)) || r.mesh.grid_dims().is_none() {
        return Ok(None);
    }
    let csv = field.vertex_grid_csv(&r.mesh).map_err(runtime)?;
    fs::write(r.out.join("solution_grid.csv"), csv).map_err(runtime)?;
    Ok(Some("solution_grid.csv".into()))
}

fn write_convergence(out: &Path, report: &SolveReport) -> Result<String, CommandError> {
    let mut csv = String::from("iter,residual,step\n");
    for rec in &report.history {
        csv.push_str(&format!(
            "{},{},{}\n",
            rec.iter,
            fmt_g17(rec.residual),
            fmt_g17(rec.step)
        ));
    }
    fs::write(out.join("convergence.csv"), csv).map_err(runtime)?;
    Ok("convergence.csv".into())
}

fn write_march(out: &Path, steps: &[MarchStep]) -> Result<String, CommandError> {
    let mut csv = String::from("row,iterations,residual,band_action\n");
    for step in steps {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            step.row,
            step.report.iterations,
            fmt_g17(step.report.residual),
            fmt_g17(step.band_action)
        ));
    }
    fs::write(out.join("march.csv"), csv).map_err(runtime)?;
    Ok("march.csv".into())
}

fn write_diagnostics(
    out: &Path,
    values: &[(String, f64)],
    ms_defects: &[f64],
) -> Result<String, CommandError> {
    let mut csv = String::from("name,value\n");
    for (name, value) in values {
        csv.push_str(&format!("{name},{}\n", fmt_g17(*value)));
    }
    for (i, defect) in ms_defects.iter().enumerate() {
        csv.push_str(&format!("multisymplectic_defect_{i},{}\n", fmt_g17(*defect)));
    }
    fs::write(out.join("diagnostics.csv"), csv).map_err(runtime)?;
    Ok("diagnostics.csv".into())
}

fn write_manifest(out: &Path, manifest: &Manifest) -> CmdResult {
    let text = serde_json::to_string_pretty(manifest).map_err(runtime)?;
    fs::write(out.join("manifest.json"), text).map_err(runtime)?;
    Ok(())
}

pub fn check(config: &ExperimentConfig) -> CmdResult {
    // a field fixture supplied through the data section is validated first,
    // with the violated axiom spelled out
    if config.data.kind == "file" {
        let mesh = config.mesh.build().or_else(config_err)?;
        let groupoid = config.groupoid.build().or_else(config_err)?;
        let path = config
            .data
            .file
            .as_deref()
            .ok_or_else(|| CommandError::Config("data.kind = \"file\" needs data.file".into()))?;
        let text = fs::read_to_string(path).map_err(runtime)?;
        let field = DiscreteField::from_json(&groupoid, &text).map_err(runtime)?;
        let verdict = varfield::field::validate_field(&groupoid, &field, &mesh);
        if !verdict.is_ok() {
            for violation in &verdict.violations {
                println!("FAIL field-axioms[{path}]: {violation:?}");
            }
            return Err(CommandError::Runtime(format!(
                "field fixture violates {} axiom instance(s)",
                verdict.violations.len()
            )));
        }
        println!("PASS field-axioms[{path}]: all morphism axioms hold");
    }

    let outcomes =
        varfield::diagnostics::default_suite(config.seed, config.workers).map_err(runtime)?;
    let mut all_passed = true;
    let mut csv = String::from("name,measured,threshold,passed\n");
    for outcome in &outcomes {
        all_passed &= outcome.passed;
        println!(
            "{} {:<44} {:>12.3e} (<= {:.0e})  {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.name,
            outcome.measured,
            outcome.threshold,
            outcome.detail
        );
        csv.push_str(&format!(
            "{},{},{},{}\n",
            outcome.name,
            fmt_g17(outcome.measured),
            fmt_g17(outcome.threshold),
            outcome.passed
        ));
    }
    if let Some(out) = &config.out {
        fs::create_dir_all(out).map_err(runtime)?;
        fs::write(Path::new(out).join("check_report.csv"), csv).map_err(runtime)?;
    }
    if all_passed {
        println!("all {} checks passed (seed {})", outcomes.len(), config.seed);
        Ok(())
    } else {
        Err(CommandError::Runtime("some checks failed".into()))
    }
}

pub fn mesh(config: &ExperimentConfig) -> CmdResult {
    let mesh = config.mesh.build().or_else(config_err)?;
    let interior = mesh.interior_vertices().len();
    let edges = mesh.edges().filter(|e| !e.is_loop()).count() / 2;
    println!(
        "mesh: kind={} k={} vertices={} undirected_edges={} faces={} interior={} boundary={}",
        config.mesh.kind,
        mesh.k(),
        mesh.n_vertices(),
        edges,
        mesh.n_faces(),
        interior,
        mesh.n_vertices() - interior
    );
    if let Some(out) = &config.out {
        fs::create_dir_all(out).map_err(runtime)?;
        fs::write(Path::new(out).join("mesh.json"), mesh.to_json().map_err(runtime)?)
            .map_err(runtime)?;
        println!("wrote mesh.json");
    }
    Ok(())
}

pub fn gauge(config: &ExperimentConfig) -> CmdResult {
    let mesh = config.mesh.build().or_else(config_err)?;
    let groupoid = config.groupoid.build().or_else(config_err)?;
    if !matches!(groupoid.kind(), GroupoidKind::Group(_)) {
        return config_err(format!(
            "gauge diagnostics need a matrix group realization, got {}",
            groupoid.spec_string()
        ));
    }
    let states = config.data.states(&groupoid, &mesh).or_else(config_err)?;
    let field =
        DiscreteField::from_vertex_states(&groupoid, &mesh, &states).map_err(runtime)?;
    let mut psi = GaugeField::from_discrete_field(&groupoid, &field, &mesh).map_err(runtime)?;

    if let Some(gauge_config) = &config.gauge {
        if let Some([src, dst]) = gauge_config.perturb_edge {
            let edge = DirectedEdge::new(src, dst);
            let mut xi = DVector::zeros(groupoid.fiber_dim());
            xi[0] = gauge_config.magnitude;
            let bump = groupoid.exp_group(&xi).map_err(runtime)?;
            let value = groupoid
                .compose(psi.value(edge).map_err(runtime)?, &bump)
                .map_err(runtime)?;
            psi.insert(&groupoid, edge, value).map_err(runtime)?;
        }
    }

    let report = is_flat(&groupoid, &psi, &mesh).map_err(runtime)?;
    // holonomy between opposite corners along two perimeter routes
    let (nx, ny) = mesh.grid_dims().unwrap_or((2, 2));
    let corner = |i: usize, j: usize| mesh.grid_vertex(i, j).unwrap_or(0);
    let along_bottom: Vec<usize> = (0..nx)
        .map(|i| corner(i, 0))
        .chain((1..ny).map(|j| corner(nx - 1, j)))
        .collect();
    let along_left: Vec<usize> = (0..ny)
        .map(|j| corner(0, j))
        .chain((1..nx).map(|i| corner(i, ny - 1)))
        .collect();
    let h1 = holonomy(&groupoid, &psi, &mesh, &PathInComplex::from_vertices(&along_bottom))
        .map_err(runtime)?;
    let h2 = holonomy(&groupoid, &psi, &mesh, &PathInComplex::from_vertices(&along_left))
        .map_err(runtime)?;
    let holonomy_gap = groupoid.element_distance(&h1, &h2);

    println!(
        "flat={} worst_face={} worst_defect={} holonomy_gap={}",
        report.flat,
        report.worst_face,
        fmt_g17(report.worst_defect),
        fmt_g17(holonomy_gap)
    );
    if let Some(out) = &config.out {
        fs::create_dir_all(out).map_err(runtime)?;
        let mut csv = String::from("face,defect\n");
        for (face, defect) in &report.defects {
            csv.push_str(&format!("{face},{}\n", fmt_g17(*defect)));
        }
        fs::write(Path::new(out).join("flatness.csv"), csv).map_err(runtime)?;
        println!("wrote flatness.csv");
    }
    Ok(())
}
