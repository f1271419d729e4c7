//! End-to-end tests of the `varfield` binary: artifact layout, exit codes,
//! determinism, and the manifest round trip.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_varfield")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("varfield-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().unwrap()
}

const WAVE_CONFIG: &str = r#"
seed = 0

[mesh]
kind = "square"
nx = 8
ny = 8

[groupoid]
spec = "pair:R1"

[lagrangian]
kind = "harmonic"

[solver]
mode = "boundary_value"

[data]
kind = "function"
function = "linear"
amplitude = 1.0

[diagnostics]
multisymplectic = true
variation_pairs = 2
"#;

#[test]
fn run_solves_the_wave_config_and_emits_artifacts() {
    let dir = scratch("run");
    let config = write_config(&dir, WAVE_CONFIG);
    let out = dir.join("out");
    let result = run_cli(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    for artifact in [
        "manifest.json",
        "solution.json",
        "solution_grid.csv",
        "convergence.csv",
        "diagnostics.csv",
    ] {
        assert!(out.join(artifact).exists(), "missing {artifact}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["converged"], serde_json::Value::Bool(true));
    let residual = manifest["residual"].as_f64().unwrap();
    assert!(residual <= 1e-10, "residual {residual}");
    for defect in manifest["multisymplectic_defects"].as_array().unwrap() {
        assert!(defect.as_f64().unwrap() < 1e-5);
    }
}

#[test]
fn identical_configs_produce_byte_identical_artifacts() {
    let dir = scratch("determinism");
    let config = write_config(&dir, WAVE_CONFIG);
    let (out1, out2) = (dir.join("a"), dir.join("b"));
    for out in [&out1, &out2] {
        let result = run_cli(&[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(result.status.success());
    }
    for artifact in ["solution_grid.csv", "convergence.csv", "diagnostics.csv"] {
        let a = fs::read(out1.join(artifact)).unwrap();
        let b = fs::read(out2.join(artifact)).unwrap();
        assert_eq!(a, b, "{artifact} differs between identical runs");
    }
}

#[test]
fn manifest_config_round_trips_through_toml() {
    let dir = scratch("roundtrip");
    let config = write_config(&dir, WAVE_CONFIG);
    let out = dir.join("out");
    let result = run_cli(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    // config as embedded in the manifest -> TOML -> rerun must be identical;
    // JSON nulls are absent optional keys, dropped before conversion
    fn strip_nulls(value: &mut serde_json::Value) {
        if let serde_json::Value::Object(map) = value {
            map.retain(|_, v| !v.is_null());
            map.values_mut().for_each(strip_nulls);
        }
    }
    let mut config_value = manifest["config"].clone();
    strip_nulls(&mut config_value);
    let embedded: toml::Value = serde_json::from_value(config_value).unwrap();
    let regenerated = dir.join("regenerated.toml");
    fs::write(&regenerated, toml::to_string(&embedded).unwrap()).unwrap();
    let out2 = dir.join("out2");
    let result = run_cli(&[
        "run",
        "--config",
        regenerated.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert_eq!(
        fs::read(out.join("solution_grid.csv")).unwrap(),
        fs::read(out2.join("solution_grid.csv")).unwrap()
    );
}

#[test]
fn time_march_runs_and_records_band_actions() {
    let dir = scratch("march");
    let config = write_config(
        &dir,
        r#"
[mesh]
kind = "square"
nx = 6

ny = 2

[groupoid]
spec = "pair:R1"

[lagrangian]
kind = "wave"
coefficients = [25.0, -4.0, 0.0, 0.0]

[solver]
mode = "time_march"
steps = 12

[data]
kind = "function"
function = "sine"
amplitude = 0.5
"#,
    );
    let out = dir.join("out");
    let result = run_cli(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    let march = fs::read_to_string(out.join("march.csv")).unwrap();
    assert_eq!(march.lines().count(), 13, "12 steps plus header");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["converged"], serde_json::Value::Bool(true));
}

#[test]
fn gauge_flatness_of_an_induced_field() {
    let dir = scratch("gauge");
    let config = write_config(
        &dir,
        r#"
[mesh]
kind = "square"
nx = 3
ny = 3

[groupoid]
spec = "group:SO3"

[data]
kind = "function"
function = "rotor"
amplitude = 0.4
"#,
    );
    let out = dir.join("out");
    let result = run_cli(&[
        "gauge",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("flat=true"), "stdout: {stdout}");
    let flatness = fs::read_to_string(out.join("flatness.csv")).unwrap();
    for line in flatness.lines().skip(1) {
        let defect: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(defect < 1e-8);
    }
}

#[test]
fn gauge_perturbation_shows_curvature() {
    let dir = scratch("gauge-perturbed");
    let config = write_config(
        &dir,
        r#"
[mesh]
kind = "square"
nx = 3
ny = 3

[groupoid]
spec = "group:SO3"

[data]
kind = "constant"

[gauge]
perturb_edge = [1, 4]
magnitude = 0.2
"#,
    );
    let result = run_cli(&["gauge", "--config", config.to_str().unwrap()]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("flat=false"), "stdout: {stdout}");
}

#[test]
fn invalid_groupoid_spec_exits_with_config_error_and_no_artifacts() {
    let dir = scratch("bad-spec");
    let config = write_config(
        &dir,
        r#"
[groupoid]
spec = "ring:Z7"
"#,
    );
    let out = dir.join("out");
    let result = run_cli(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
    assert!(!out.exists(), "no artifacts on config errors");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = scratch("bad-key");
    let config = write_config(&dir, "banana = 3\n");
    let result = run_cli(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn mesh_subcommand_writes_a_reloadable_mesh() {
    let dir = scratch("mesh");
    let config = write_config(
        &dir,
        r#"
[mesh]
kind = "triangular"
nx = 4
ny = 4
"#,
    );
    let out = dir.join("out");
    let result = run_cli(&[
        "mesh",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let text = fs::read_to_string(out.join("mesh.json")).unwrap();
    let mesh = varfield::mesh::MeshTopology::from_json(&text).unwrap();
    assert_eq!(mesh.k(), 3);
    assert_eq!(mesh.n_vertices(), 16);
    assert_eq!(mesh.n_faces(), 9);
}

#[test]
fn check_reports_the_violated_axiom_of_a_corrupted_fixture() {
    use varfield::field::DiscreteField;
    use varfield::groupoid::Groupoid;
    use varfield::mesh::{DirectedEdge, MeshTopology};

    let dir = scratch("corrupted-field");
    let g = Groupoid::pair_rn(1);
    let mesh = MeshTopology::build_square_mesh(2, 2, 1.0, 1.0).unwrap();
    let x = g.base_point(vec![0.5]).unwrap();
    let mut field = DiscreteField::constant(&g, &mesh, &x);
    // corrupt the loop at vertex 0: unit axiom violated
    let bad = g
        .pair(&g.base_point(vec![0.5]).unwrap(), &g.base_point(vec![2.5]).unwrap())
        .unwrap();
    field.set_edge(DirectedEdge::new(0, 0), bad);
    let fixture = dir.join("field.json");
    fs::write(&fixture, field.to_json().unwrap()).unwrap();

    let config = write_config(
        &dir,
        &format!(
            r#"
[mesh]
kind = "square"
nx = 2
ny = 2

[groupoid]
spec = "pair:R1"

[data]
kind = "file"
file = "{}"
"#,
            fixture.to_str().unwrap().replace('\\', "/")
        ),
    );
    let result = run_cli(&["check", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(
        stdout.contains("UnitMismatch") || stdout.contains("AnchorMismatch"),
        "stdout: {stdout}"
    );
}

#[test]
fn check_suite_passes_under_the_time_budget() {
    let start = std::time::Instant::now();
    let result = run_cli(&["check", "--seed", "0"]);
    let elapsed = start.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(
        result.status.success(),
        "stdout: {stdout}\nstderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(stdout.contains("all"), "stdout: {stdout}");
    assert!(!stdout.contains("FAIL"), "stdout: {stdout}");
    assert!(elapsed < 60.0, "check took {elapsed:.1} s");
}
