//! Experiment configuration: one TOML file wiring a mesh, a groupoid
//! realization, a Lagrangian, a solver mode, and the boundary/initial data.
//! The full configuration is echoed into the run manifest, so a manifest
//! round-trips back into a runnable configuration.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use varfield::field::DiscreteField;
use varfield::groupoid::{Groupoid, GroupoidKind};
use varfield::lagrangian::{Lagrangian, LagrangianParams, LagrangianRegistry};
use varfield::mesh::MeshTopology;
use varfield::solver::NewtonParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for every randomized probe; recorded in the manifest.
    #[serde(default)]
    pub seed: u64,
    /// Worker threads for residual and Jacobian assembly; 1 = serial.
    #[serde(default = "one")]
    pub workers: usize,
    /// Output directory; `--out` overrides.
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub groupoid: GroupoidConfig,
    #[serde(default)]
    pub lagrangian: LagrangianConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub gauge: Option<GaugeConfig>,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub kind: String,
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "unit")]
    pub dx: f64,
    #[serde(default = "unit")]
    pub dy: f64,
}

fn unit() -> f64 {
    1.0
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig {
            kind: "square".into(),
            nx: 8,
            ny: 8,
            dx: 1.0,
            dy: 1.0,
        }
    }
}

impl MeshConfig {
    pub fn build(&self) -> Result<MeshTopology, String> {
        match self.kind.as_str() {
            "square" => MeshTopology::build_square_mesh(self.nx, self.ny, self.dx, self.dy),
            "triangular" => MeshTopology::build_triangular_mesh(self.nx, self.ny),
            other => return Err(format!("unknown mesh kind: {other}")),
        }
        .map_err(|e| format!("mesh construction failed: {e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidConfig {
    /// Realization string: `pair:R<n>`, `group:SO3`, `group:GL<n>`, `pair:SO3`.
    pub spec: String,
}

impl Default for GroupoidConfig {
    fn default() -> Self {
        GroupoidConfig {
            spec: "pair:R1".into(),
        }
    }
}

impl GroupoidConfig {
    pub fn build(&self) -> Result<Groupoid, String> {
        Groupoid::parse(&self.spec).map_err(|e| format!("groupoid spec error: {e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianConfig {
    pub kind: String,
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default)]
    pub potential: f64,
}

impl Default for LagrangianConfig {
    fn default() -> Self {
        LagrangianConfig {
            kind: "wave".into(),
            coefficients: None,
            potential: 0.0,
        }
    }
}

impl LagrangianConfig {
    pub fn build(&self, g: &Groupoid, k: usize) -> Result<Lagrangian, String> {
        let registry = LagrangianRegistry::default();
        let params = LagrangianParams {
            k,
            coefficients: self.coefficients.clone(),
            potential: self.potential,
        };
        registry
            .build(&self.kind, g, &params)
            .map_err(|e| format!("lagrangian error: {e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub mode: String,
    #[serde(default)]
    pub newton_tol: Option<f64>,
    #[serde(default = "fifty")]
    pub max_iter: usize,
    /// Rows to advance in time-march mode.
    #[serde(default = "ten")]
    pub steps: usize,
}

fn fifty() -> usize {
    50
}

fn ten() -> usize {
    10
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: "boundary_value".into(),
            newton_tol: None,
            max_iter: 50,
            steps: 10,
        }
    }
}

impl SolverConfig {
    pub fn newton_params(&self, g: &Groupoid, workers: usize) -> NewtonParams {
        let mut params = NewtonParams::for_groupoid(g).with_workers(workers);
        if let Some(tol) = self.newton_tol {
            params.tol = tol;
        }
        params.max_iter = self.max_iter;
        params
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// `constant`, `function`, or `file`.
    pub kind: String,
    #[serde(default)]
    pub constant: Option<Vec<f64>>,
    /// Builtin profile: `sine`, `linear`, or `rotor`.
    #[serde(default)]
    pub function: Option<String>,
    #[serde(default = "unit")]
    pub amplitude: f64,
    #[serde(default)]
    pub file: Option<String>,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            kind: "function".into(),
            constant: None,
            function: Some("sine".into()),
            amplitude: 1.0,
            file: None,
        }
    }
}

impl DataConfig {
    /// One state per vertex from the configured profile.
    pub fn states(&self, g: &Groupoid, mesh: &MeshTopology) -> Result<Vec<DVector<f64>>, String> {
        match self.kind.as_str() {
            "constant" => {
                let state = self.constant_state(g)?;
                Ok(vec![state; mesh.n_vertices()])
            }
            "function" => {
                let name = self.function.as_deref().unwrap_or("sine");
                let extent = mesh.vertices().iter().fold([1e-12f64; 2], |acc, v| {
                    [acc[0].max(v.position[0]), acc[1].max(v.position[1])]
                });
                mesh.vertices()
                    .iter()
                    .map(|v| self.profile_state(g, name, v.position, extent))
                    .collect()
            }
            "file" => {
                let path = self
                    .file
                    .as_deref()
                    .ok_or_else(|| "data.kind = \"file\" needs data.file".to_string())?;
                let text =
                    std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
                let field = DiscreteField::from_json(g, &text)
                    .map_err(|e| format!("field file error: {e}"))?;
                varfield::solver::extract_states(g, &field, mesh)
                    .map_err(|e| format!("field file error: {e}"))
            }
            other => Err(format!("unknown data kind: {other}")),
        }
    }

    fn constant_state(&self, g: &Groupoid) -> Result<DVector<f64>, String> {
        match &self.constant {
            None => Ok(g.neutral_state()),
            Some(values) => match g.kind() {
                GroupoidKind::PairRn(n) => {
                    if values.len() != n {
                        return Err(format!(
                            "data.constant needs {n} coordinates for {}",
                            g.spec_string()
                        ));
                    }
                    Ok(DVector::from_vec(values.clone()))
                }
                _ => {
                    if values.len() != g.fiber_dim() {
                        return Err(format!(
                            "data.constant needs {} fiber coordinates for {}",
                            g.fiber_dim(),
                            g.spec_string()
                        ));
                    }
                    Ok(g.perturb_state(&g.neutral_state(), &DVector::from_vec(values.clone()), 1.0))
                }
            },
        }
    }

    fn profile_state(
        &self,
        g: &Groupoid,
        name: &str,
        position: [f64; 2],
        extent: [f64; 2],
    ) -> Result<DVector<f64>, String> {
        let [x, y] = position;
        let [lx, ly] = extent;
        let scalar = match name {
            "sine" => {
                self.amplitude
                    * (std::f64::consts::PI * x / lx).sin()
                    * (std::f64::consts::PI * y / ly).sin()
            }
            "linear" => self.amplitude * (x + y) / (lx + ly),
            "rotor" => self.amplitude * (x / lx - 0.5 * y / ly),
            other => return Err(format!("unknown data function: {other}")),
        };
        match g.kind() {
            GroupoidKind::PairRn(n) => {
                let mut state = DVector::zeros(n);
                state[0] = scalar;
                Ok(state)
            }
            _ => {
                let d = g.fiber_dim();
                let mut xi = DVector::zeros(d);
                xi[0] = scalar;
                if d > 1 {
                    xi[1] = 0.5 * self.amplitude * y / ly;
                }
                if d > 2 {
                    xi[2] = 0.25 * self.amplitude * (x + y) / (lx + ly);
                }
                Ok(g.perturb_state(&g.neutral_state(), &xi, 1.0))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default)]
    pub multisymplectic: bool,
    #[serde(default = "five")]
    pub variation_pairs: usize,
}

fn five() -> usize {
    5
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            multisymplectic: false,
            variation_pairs: 5,
        }
    }
}

/// Optional single-edge perturbation for flatness experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    pub perturb_edge: Option<[usize; 2]>,
    #[serde(default = "tenth")]
    pub magnitude: f64,
}

fn tenth() -> f64 {
    0.1
}
