//! JSON run configurations.
//!
//! A config names one problem kind together with its discretisation and the
//! reference solution used for error reporting. Parsing reports the line and
//! column of the offending field; [`RunConfig::validate`] runs the solver
//! library's own precondition checks so no work starts on bad input.

use std::path::PathBuf;

use dualfem::dual_euler::EulerConfig;
use dualfem::dual_heat::HeatProblem;
use dualfem::dual_transport::{StagePlan, TransportProblem};
use dualfem::oracles::EllipticParams;
use dualfem::Profile;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub problem: ProblemConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemConfig {
    Heat(HeatConfig),
    Transport(TransportConfig),
    Euler(EulerRunConfig),
    Algebraic(AlgebraicConfig),
}

impl ProblemConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemConfig::Heat(_) => "heat",
            ProblemConfig::Transport(_) => "transport",
            ProblemConfig::Euler(_) => "euler",
            ProblemConfig::Algebraic(_) => "algebraic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatConfig {
    pub problem: HeatProblem,
    /// `[nx, nt]` per run; the first mesh produces the field files.
    pub meshes: Vec<[usize; 2]>,
    /// Errors are reported for `t ≤ t_report`; later rows form the top layer.
    pub t_report: f64,
    pub oracle: HeatOracle,
}

/// Reference solution for a heat run. Conductivity comes from the problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeatOracle {
    None,
    /// `θ = 3x + 1`
    Steady,
    /// `θ = sin(πx/2) e^{−π²kt/4} + 1`
    Transient,
    /// Fourier series for the smoothed-jump profile.
    FourierJump { beta: f64, eps: f64, n_terms: usize },
    /// Fourier series for the discontinuous profile with shift `beta`.
    Discontinuous { beta: f64, n_terms: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    pub problem: TransportProblem,
    pub nx: usize,
    pub nt_stage: usize,
    pub plan: StagePlan,
    /// compare against the characteristic solution of step data
    #[serde(default)]
    pub step_oracle: bool,
    /// half-width of the excluded band around the jump, in elements
    #[serde(default = "default_band")]
    pub band_cells: f64,
    /// half-width of the over/undershoot window, in elements
    #[serde(default = "default_window")]
    pub window_cells: f64,
    /// width of the excluded layer at `x = L`
    #[serde(default = "default_right_layer")]
    pub right_layer: f64,
}

fn default_band() -> f64 {
    6.0
}

fn default_window() -> f64 {
    10.0
}

fn default_right_layer() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EulerReference {
    None,
    Elliptic,
    Rk45,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerRunConfig {
    pub config: EulerConfig,
    pub reference: EulerReference,
    /// further `[ne_per_stage, n_c]` levels for a convergence study
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refinements: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraicConfig {
    /// row-major `Ā`
    pub matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        if text.trim().is_empty() {
            return Err(CliError::config("config is empty"));
        }
        serde_json::from_str(text).map_err(|e| {
            CliError::config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn label(&self) -> String {
        self.preset.clone().unwrap_or_else(|| self.problem.kind().to_string())
    }

    pub fn validate(&self) -> CliResult<()> {
        let v = |ctx: &str, r: dualfem::Result<()>| r.map_err(|e| CliError::from_validation(ctx, e));
        match &self.problem {
            ProblemConfig::Heat(h) => {
                v("problem", h.problem.validate())?;
                if h.meshes.is_empty() {
                    return Err(CliError::config("meshes: at least one [nx, nt] is required"));
                }
                if h.meshes.iter().any(|m| m[0] == 0 || m[1] == 0) {
                    return Err(CliError::config("meshes: element counts must be positive"));
                }
                if !(h.t_report > 0.0 && h.t_report <= h.problem.duration) {
                    return Err(CliError::config(format!(
                        "t_report: must lie in (0, {}], got {}",
                        h.problem.duration, h.t_report
                    )));
                }
                match h.oracle {
                    HeatOracle::FourierJump { n_terms, eps, .. } if n_terms == 0 || !(eps > 0.0 && eps < 0.5) => {
                        Err(CliError::config("oracle: need n_terms > 0 and 0 < eps < 1/2"))
                    }
                    HeatOracle::Discontinuous { n_terms: 0, .. } => Err(CliError::config("oracle: need n_terms > 0")),
                    _ => Ok(()),
                }
            }
            ProblemConfig::Transport(t) => {
                v("problem", t.problem.validate())?;
                v("plan", t.plan.validate())?;
                if t.nx == 0 || t.nt_stage == 0 {
                    return Err(CliError::config("nx, nt_stage: element counts must be positive"));
                }
                if t.step_oracle {
                    step_data(&t.problem)?;
                }
                if !(t.band_cells >= 0.0 && t.window_cells > 0.0 && t.right_layer >= 0.0) {
                    return Err(CliError::config("band_cells, window_cells, right_layer: must be non-negative"));
                }
                Ok(())
            }
            ProblemConfig::Euler(e) => {
                v("config", e.config.validate())?;
                for (k, lv) in e.refinements.iter().enumerate() {
                    let mut c = e.config.clone();
                    c.ne_per_stage = lv[0];
                    c.n_c = lv[1];
                    v(&format!("refinements[{k}]"), c.validate())?;
                }
                if e.reference == EulerReference::Elliptic {
                    if e.config.body.nu != 0.0 {
                        return Err(CliError::config("reference: the elliptic solution needs nu = 0"));
                    }
                    EllipticParams::new(e.config.body.inertia, e.config.omega0)
                        .map_err(|err| CliError::from_solver("reference", err))?;
                }
                Ok(())
            }
            ProblemConfig::Algebraic(a) => {
                let cols = a.matrix.first().map_or(0, Vec::len);
                if a.matrix.is_empty() || cols == 0 || a.matrix.iter().any(|r| r.len() != cols) {
                    return Err(CliError::config("matrix: rows must be non-empty and of equal length"));
                }
                if a.rhs.len() != a.matrix.len() {
                    return Err(CliError::config(format!(
                        "rhs: length {} does not match {} matrix rows",
                        a.rhs.len(),
                        a.matrix.len()
                    )));
                }
                if a.matrix.iter().flatten().chain(&a.rhs).any(|v| !v.is_finite()) {
                    return Err(CliError::config("matrix, rhs: entries must be finite"));
                }
                Ok(())
            }
        }
    }
}

/// Step initial data transported at speed `c`: jump location, left and right
/// states and the value on the jump itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepData {
    pub at: f64,
    pub left: f64,
    pub right: f64,
    pub at_value: f64,
    pub c: f64,
}

impl StepData {
    pub fn locus(&self, t: f64) -> f64 {
        self.at + self.c * t
    }

    pub fn exact(&self, x: f64, t: f64) -> f64 {
        let xj = self.locus(t);
        if (x - xj).abs() <= 1e-12 {
            self.at_value
        } else if x < xj {
            self.left
        } else {
            self.right
        }
    }
}

pub fn step_data(p: &TransportProblem) -> CliResult<StepData> {
    match (&p.u0, &p.u_left) {
        (Profile::Step { at, left, right, at_value }, Profile::Constant { value }) if value == left => Ok(StepData {
            at: *at,
            left: *left,
            right: *right,
            at_value: *at_value,
            c: p.c,
        }),
        _ => Err(CliError::config(
            "step_oracle: needs step initial data and a constant inflow equal to its left state",
        )),
    }
}
