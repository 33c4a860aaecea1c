//! Dual formulation of linear transport `∂t u + c ∂x u = 0` with inflow at
//! `x = 0`, and the time-slicing driver that chains short space-time stages.
//!
//! The dual field `λ` satisfies a degenerate second-order problem whose
//! stationarity recovers `u = ∂t λ + c ∂x λ`. Initial and inflow data are
//! natural; `λ` is prescribed on the top and right sides.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{self, ElementKernel, GaussSamples, LocalSystem, NodalField, QuadPoint};
use crate::mesh::{Side, SpaceTimeMesh};
use crate::profile::Profile;
use crate::projection::{self, ProjectionJob};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportProblem {
    pub c: f64,
    pub length: f64,
    pub total_time: f64,
    pub u0: Profile,
    pub u_left: Profile,
    /// `λ(x, T)` of every stage
    #[serde(default = "Profile::zero")]
    pub lambda_top: Profile,
    /// `λ(L, t)` of every stage
    #[serde(default = "Profile::zero")]
    pub lambda_right: Profile,
}

impl TransportProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("wave speed must be positive, got {}", self.c)));
        }
        if !(self.length > 0.0) || !(self.total_time > 0.0) {
            return Err(Error::invalid("domain extents must be positive"));
        }
        for p in [&self.u0, &self.u_left, &self.lambda_top, &self.lambda_right] {
            p.validate().map_err(Error::InvalidArgument)?;
        }
        Ok(())
    }

    fn check_corner(&self, duration: f64) -> Result<()> {
        let (a, b) = (self.lambda_top.eval(self.length), self.lambda_right.eval(duration));
        if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
            return Err(Error::invalid(format!(
                "dual corner data incompatible at (L, T): λ_T(L) = {a}, λ_r(T) = {b}"
            )));
        }
        Ok(())
    }
}

/// Initial state of a stage: the analytic datum for the first stage, nodal
/// values inherited from the previous stage afterwards.
#[derive(Debug, Clone, PartialEq)]
pub enum StageInitial {
    Profile(Profile),
    Nodal(Vec<f64>),
}

impl StageInitial {
    fn eval(&self, mesh: &SpaceTimeMesh, x: f64) -> f64 {
        match self {
            StageInitial::Profile(p) => p.eval(x),
            StageInitial::Nodal(v) => {
                let s = (x / mesh.hx()).clamp(0.0, mesh.nx() as f64);
                let i = (s.floor() as usize).min(mesh.nx() - 1);
                let f = s - i as f64;
                (1.0 - f) * v[i] + f * v[i + 1]
            }
        }
    }

    fn nodal(&self, mesh: &SpaceTimeMesh, i: usize) -> f64 {
        match self {
            StageInitial::Profile(p) => p.eval(mesh.node(mesh.node_id(i, 0))[0]),
            StageInitial::Nodal(v) => v[i],
        }
    }
}

struct TransportKernel<'a> {
    problem: &'a TransportProblem,
    initial: &'a StageInitial,
    mesh: &'a SpaceTimeMesh,
    t_offset: f64,
}

impl ElementKernel for TransportKernel<'_> {
    fn n_fields(&self) -> usize {
        1
    }

    fn volume(&self, _e: usize, points: &[QuadPoint; 4], local: &mut LocalSystem) {
        let c = self.problem.c;
        for q in points {
            let s = &q.shape;
            for a in 0..4 {
                let da = s.grad_t[a] + c * s.grad_x[a];
                for b in 0..4 {
                    let db = s.grad_t[b] + c * s.grad_x[b];
                    local.add(a, 0, b, 0, -q.weight * da * db);
                }
            }
        }
    }

    fn loaded_sides(&self) -> Vec<Side> {
        vec![Side::Left, Side::Bottom]
    }

    fn edge_load(&self, side: Side, x: f64, t: f64, load: &mut [f64]) {
        match side {
            Side::Left => load[0] = self.problem.c * self.problem.u_left.eval(self.t_offset + t),
            Side::Bottom => load[0] = self.initial.eval(self.mesh, x),
            _ => {}
        }
    }
}

/// Assembles `K λ = R` for one stage starting at global time `t_offset`.
pub fn assemble_transport(
    problem: &TransportProblem,
    mesh: &SpaceTimeMesh,
    initial: &StageInitial,
    t_offset: f64,
) -> Result<fem::BlockLinearSystem> {
    problem.validate()?;
    problem.check_corner(mesh.duration())?;
    if (mesh.length() - problem.length).abs() > 1e-12 * problem.length {
        return Err(Error::invalid(format!(
            "mesh length {} does not match problem length {}",
            mesh.length(),
            problem.length
        )));
    }
    if let StageInitial::Nodal(v) = initial {
        if v.len() != mesh.nx() + 1 {
            return Err(Error::invalid(format!(
                "stage initial data has {} values for {} nodes",
                v.len(),
                mesh.nx() + 1
            )));
        }
    }
    let kernel = TransportKernel {
        problem,
        initial,
        mesh,
        t_offset,
    };
    let mut system = fem::assemble(mesh, &kernel)?;
    for n in mesh.boundary_nodes(Side::Top) {
        system.constrain(n, problem.lambda_top.eval(mesh.node(n)[0]))?;
    }
    for n in mesh.boundary_nodes(Side::Right) {
        system.constrain(n, problem.lambda_right.eval(mesh.node(n)[1]))?;
    }
    Ok(system)
}

/// `u = ∂t λ + c ∂x λ` at every Gauss point.
pub fn dtp_transport(mesh: &SpaceTimeMesh, lambda: &NodalField, c: f64) -> Result<GaussSamples> {
    (0..mesh.element_count())
        .map(|e| {
            let q = fem::element_quadrature(mesh, e)?;
            let mut u = [0.0; 4];
            for (i, p) in q.iter().enumerate() {
                let (_, lx, lt) = lambda.eval(mesh, e, &p.shape);
                u[i] = lt + c * lx;
            }
            Ok(u)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct StageSolution {
    pub lambda: NodalField,
    pub samples: GaussSamples,
    pub u: NodalField,
    pub relative_residual: f64,
}

/// Solves one stage and projects `u` with initial and inflow values pinned.
pub fn solve_transport_stage(
    problem: &TransportProblem,
    mesh: &SpaceTimeMesh,
    initial: &StageInitial,
    t_offset: f64,
) -> Result<StageSolution> {
    let system = assemble_transport(problem, mesh, initial, t_offset)?;
    let (lambda, relative_residual) = fem::solve_constrained(&system)?;
    let lambda = NodalField::new(lambda);
    let samples = dtp_transport(mesh, &lambda, problem.c)?;
    let mut pinned = BTreeMap::new();
    for i in 0..=mesh.nx() {
        pinned.insert(mesh.node_id(i, 0), initial.nodal(mesh, i));
    }
    for n in mesh.boundary_nodes(Side::Left) {
        pinned
            .entry(n)
            .or_insert_with(|| problem.u_left.eval(t_offset + mesh.node(n)[1]));
    }
    let u = projection::l2_project(&ProjectionJob {
        mesh,
        samples: &samples,
        pinned,
    })?;
    Ok(StageSolution {
        lambda,
        samples,
        u,
        relative_residual,
    })
}

/// Stage lengths for time slicing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StagePlan {
    pub t_stage: f64,
    pub t_keep: f64,
}

impl StagePlan {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_keep > 0.0 && self.t_keep < self.t_stage) {
            return Err(Error::invalid(format!(
                "retained length {} must lie in (0, {})",
                self.t_keep, self.t_stage
            )));
        }
        Ok(())
    }

    /// Smallest stage count whose retained lengths reach `total`.
    pub fn n_stages(&self, total: f64) -> usize {
        ((total / self.t_keep) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Retained field over the whole time interval.
#[derive(Debug, Clone)]
pub struct StitchedField {
    pub xs: Vec<f64>,
    pub times: Vec<f64>,
    /// `values[level][i]`
    pub values: Vec<Vec<f64>>,
    pub stage_of_level: Vec<usize>,
    pub stages: Vec<StageSolution>,
    pub stage_mesh: SpaceTimeMesh,
    pub keep_rows: usize,
}

/// Runs stages of length `t_stage` on copies of `stage_mesh`, keeping the
/// first `t_keep` of each and seeding the next stage from the row at `t_keep`.
pub fn run_time_sliced(problem: &TransportProblem, plan: StagePlan, stage_mesh: &SpaceTimeMesh) -> Result<StitchedField> {
    problem.validate()?;
    plan.validate()?;
    if (stage_mesh.duration() - plan.t_stage).abs() > 1e-12 * plan.t_stage {
        return Err(Error::invalid("stage mesh duration must equal the stage length"));
    }
    let keep = plan.t_keep / stage_mesh.ht();
    if (keep - keep.round()).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "retained length {} is not a multiple of the time step {}",
            plan.t_keep,
            stage_mesh.ht()
        )));
    }
    let keep_rows = keep.round() as usize;
    let n_stages = plan.n_stages(problem.total_time);
    let xs: Vec<f64> = (0..=stage_mesh.nx()).map(|i| stage_mesh.node(i)[0]).collect();
    let mut out = StitchedField {
        xs,
        times: Vec::new(),
        values: Vec::new(),
        stage_of_level: Vec::new(),
        stages: Vec::with_capacity(n_stages),
        stage_mesh: stage_mesh.clone(),
        keep_rows,
    };
    let mut initial = StageInitial::Profile(problem.u0.clone());
    for s in 0..n_stages {
        let offset = s as f64 * plan.t_keep;
        let stage = solve_transport_stage(problem, stage_mesh, &initial, offset).map_err(|e| e.at_stage(s))?;
        let last = s + 1 == n_stages;
        let rows = if last { keep_rows + 1 } else { keep_rows };
        for j in 0..rows {
            let t = offset + stage_mesh.node(stage_mesh.node_id(0, j))[1];
            if t > problem.total_time + 1e-9 {
                break;
            }
            out.times.push(t);
            out.values
                .push(stage_mesh.row_nodes(j).map(|n| stage.u.values[n]).collect());
            out.stage_of_level.push(s);
        }
        initial = StageInitial::Nodal(
            stage_mesh
                .row_nodes(keep_rows)
                .map(|n| stage.u.values[n])
                .collect(),
        );
        out.stages.push(stage);
    }
    Ok(out)
}

/// Excess above the upper state and deficit below the lower state within a
/// window around the jump locus, per retained time level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpTrack {
    pub times: Vec<f64>,
    pub overshoot: Vec<f64>,
    pub undershoot: Vec<f64>,
}

pub fn track_jump(
    xs: &[f64],
    times: &[f64],
    values: &[Vec<f64>],
    locus: impl Fn(f64) -> f64,
    half_width: f64,
    (low, high): (f64, f64),
) -> JumpTrack {
    let mut track = JumpTrack {
        times: times.to_vec(),
        overshoot: Vec::with_capacity(times.len()),
        undershoot: Vec::with_capacity(times.len()),
    };
    for (t, row) in times.iter().zip(values) {
        let xj = locus(*t);
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for (x, u) in xs.iter().zip(row) {
            if (x - xj).abs() <= half_width + 1e-12 {
                hi = hi.max(*u);
                lo = lo.min(*u);
            }
        }
        track.overshoot.push((hi - high).max(0.0));
        track.undershoot.push((low - lo).max(0.0));
    }
    track
}

/// Quadratic form of the principal part, `(∂t λ + c ∂x λ)²`, for the
/// gradient `(∂x λ, ∂t λ)`.
pub fn principal_form(grad: [f64; 2], c: f64) -> f64 {
    let a = grad[1] + c * grad[0];
    a * a
}
