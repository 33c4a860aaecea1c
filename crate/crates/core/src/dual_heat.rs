//! Dual formulation of the 1-D heat equation.
//!
//! The primal system `∂x θ − π = 0`, `∂t θ − ∂x(kπ) = 0` is replaced by a
//! second-order boundary value problem in the multiplier fields `(p, l)` on
//! the whole space-time rectangle. Primal fields are recovered pointwise by
//!
//! ```text
//! θ = ∂x p + ∂t l,    π = p − k ∂x l
//! ```
//!
//! Primal initial and boundary data enter only as natural (load) terms; the
//! dual Dirichlet data on the left, right and top sides are arbitrary up to
//! corner compatibility.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{self, BlockLinearSystem, ElementKernel, GaussSamples, LocalSystem, NodalField, QuadPoint};
use crate::mesh::{Side, SpaceTimeMesh};
use crate::profile::Profile;
use crate::projection::{self, ProjectionJob};

pub const FIELD_P: usize = 0;
pub const FIELD_L: usize = 1;

/// Primal condition at `x = L` and the dual datum that accompanies it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RightBoundary {
    /// Flux `π(L, t) = π_r(t)`; the dual field `p(L, t) = p_r(t)` is prescribed.
    NeumannPi { pi_r: Profile, p_r: Profile },
    /// Temperature `θ(L, t) = θ_r(t)`; the dual field `l(L, t) = l_r(t)` is prescribed.
    DirichletTheta { theta_r: Profile, l_r: Profile },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatProblem {
    pub k: f64,
    pub length: f64,
    pub duration: f64,
    pub theta0: Profile,
    pub theta_l: Profile,
    pub right: RightBoundary,
    /// `l(0, t)`
    pub l_left: Profile,
    /// `l(x, T)`
    pub l_top: Profile,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl HeatProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::invalid(format!("conductivity must be positive, got {}", self.k)));
        }
        if !(self.length > 0.0) || !(self.duration > 0.0) {
            return Err(Error::invalid("domain extents must be positive"));
        }
        let mut profiles = vec![&self.theta0, &self.theta_l, &self.l_left, &self.l_top];
        match &self.right {
            RightBoundary::NeumannPi { pi_r, p_r } => profiles.extend([pi_r, p_r]),
            RightBoundary::DirichletTheta { theta_r, l_r } => profiles.extend([theta_r, l_r]),
        }
        for p in profiles {
            p.validate().map_err(Error::InvalidArgument)?;
        }
        let (top0, left_t) = (self.l_top.eval(0.0), self.l_left.eval(self.duration));
        if !close(top0, left_t) {
            return Err(Error::invalid(format!(
                "dual corner data incompatible at (0, T): l_T(0) = {top0}, l_l(T) = {left_t}"
            )));
        }
        if let RightBoundary::DirichletTheta { l_r, .. } = &self.right {
            let (top_l, right_t) = (self.l_top.eval(self.length), l_r.eval(self.duration));
            if !close(top_l, right_t) {
                return Err(Error::invalid(format!(
                    "dual corner data incompatible at (L, T): l_T(L) = {top_l}, l_r(T) = {right_t}"
                )));
            }
        }
        Ok(())
    }

    fn check_mesh(&self, mesh: &SpaceTimeMesh) -> Result<()> {
        if !close(mesh.length(), self.length) || !close(mesh.duration(), self.duration) {
            return Err(Error::invalid(format!(
                "mesh extents {}×{} do not match problem {}×{}",
                mesh.length(),
                mesh.duration(),
                self.length,
                self.duration
            )));
        }
        Ok(())
    }
}

struct HeatKernel<'a> {
    problem: &'a HeatProblem,
}

impl ElementKernel for HeatKernel<'_> {
    fn n_fields(&self) -> usize {
        2
    }

    fn volume(&self, _e: usize, points: &[QuadPoint; 4], local: &mut LocalSystem) {
        let k = self.problem.k;
        for q in points {
            let s = &q.shape;
            let w = q.weight;
            for a in 0..4 {
                for b in 0..4 {
                    let k11 = -s.grad_x[a] * s.grad_x[b] - s.values[a] * s.values[b];
                    let k12 = -s.grad_x[a] * s.grad_t[b] + k * s.values[a] * s.grad_x[b];
                    let k21 = -s.grad_t[a] * s.grad_x[b] + k * s.grad_x[a] * s.values[b];
                    let k22 = -s.grad_t[a] * s.grad_t[b] - k * k * s.grad_x[a] * s.grad_x[b];
                    local.add(a, FIELD_P, b, FIELD_P, w * k11);
                    local.add(a, FIELD_P, b, FIELD_L, w * k12);
                    local.add(a, FIELD_L, b, FIELD_P, w * k21);
                    local.add(a, FIELD_L, b, FIELD_L, w * k22);
                }
            }
        }
    }

    fn loaded_sides(&self) -> Vec<Side> {
        vec![Side::Left, Side::Bottom, Side::Right]
    }

    fn edge_load(&self, side: Side, x: f64, t: f64, load: &mut [f64]) {
        let pb = self.problem;
        match side {
            Side::Left => load[FIELD_P] = pb.theta_l.eval(t),
            Side::Bottom => load[FIELD_L] = pb.theta0.eval(x),
            Side::Right => match &pb.right {
                RightBoundary::NeumannPi { pi_r, .. } => load[FIELD_L] = pb.k * pi_r.eval(t),
                RightBoundary::DirichletTheta { theta_r, .. } => {
                    load[FIELD_P] = -theta_r.eval(t)
                }
            },
            Side::Top => {}
        }
    }
}

/// Assembles the block system `K_ij^{AB} d_j^B = R_i^A` with the dual
/// Dirichlet constraints recorded.
pub fn assemble_heat(problem: &HeatProblem, mesh: &SpaceTimeMesh) -> Result<BlockLinearSystem> {
    problem.validate()?;
    problem.check_mesh(mesh)?;
    let mut system = fem::assemble(mesh, &HeatKernel { problem })?;
    for n in mesh.boundary_nodes(Side::Left) {
        let t = mesh.node(n)[1];
        system.constrain(system.dof(n, FIELD_L), problem.l_left.eval(t))?;
    }
    for n in mesh.boundary_nodes(Side::Top) {
        let x = mesh.node(n)[0];
        system.constrain(system.dof(n, FIELD_L), problem.l_top.eval(x))?;
    }
    for n in mesh.boundary_nodes(Side::Right) {
        let t = mesh.node(n)[1];
        match &problem.right {
            RightBoundary::NeumannPi { p_r, .. } => {
                system.constrain(system.dof(n, FIELD_P), p_r.eval(t))?
            }
            RightBoundary::DirichletTheta { l_r, .. } => {
                system.constrain(system.dof(n, FIELD_L), l_r.eval(t))?
            }
        }
    }
    Ok(system)
}

#[derive(Debug, Clone)]
pub struct HeatDualSolution {
    pub p: NodalField,
    pub l: NodalField,
    pub relative_residual: f64,
}

pub fn solve_heat(problem: &HeatProblem, mesh: &SpaceTimeMesh) -> Result<HeatDualSolution> {
    let system = assemble_heat(problem, mesh)?;
    let (d, relative_residual) = fem::solve_constrained(&system)?;
    let (p, l) = split_fields(&d);
    Ok(HeatDualSolution {
        p: NodalField::new(p),
        l: NodalField::new(l),
        relative_residual,
    })
}

fn split_fields(d: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = d.iter().step_by(2).copied().collect();
    let l = d.iter().skip(1).step_by(2).copied().collect();
    (p, l)
}

/// Primal fields at the Gauss points of every element.
#[derive(Debug, Clone)]
pub struct HeatPrimalSamples {
    pub theta: GaussSamples,
    pub pi: GaussSamples,
}

pub fn dtp_heat(mesh: &SpaceTimeMesh, dual: &HeatDualSolution, k: f64) -> Result<HeatPrimalSamples> {
    let mut theta = Vec::with_capacity(mesh.element_count());
    let mut pi = Vec::with_capacity(mesh.element_count());
    for e in 0..mesh.element_count() {
        let q = fem::element_quadrature(mesh, e)?;
        let mut th = [0.0; 4];
        let mut pe = [0.0; 4];
        for (i, point) in q.iter().enumerate() {
            let (p, px, _) = dual.p.eval(mesh, e, &point.shape);
            let (_, lx, lt) = dual.l.eval(mesh, e, &point.shape);
            th[i] = px + lt;
            pe[i] = p - k * lx;
        }
        theta.push(th);
        pi.push(pe);
    }
    Ok(HeatPrimalSamples { theta, pi })
}

/// Dual solve followed by DtP evaluation and projection of `θ`.
#[derive(Debug, Clone)]
pub struct HeatRun {
    pub dual: HeatDualSolution,
    pub samples: HeatPrimalSamples,
    pub theta: NodalField,
}

/// Known primal temperatures: initial data on the bottom row, then the
/// Dirichlet sides. Bottom values take precedence at the corners.
pub fn heat_pins(problem: &HeatProblem, mesh: &SpaceTimeMesh) -> BTreeMap<usize, f64> {
    let mut pins = BTreeMap::new();
    for n in mesh.boundary_nodes(Side::Bottom) {
        pins.insert(n, problem.theta0.eval(mesh.node(n)[0]));
    }
    for n in mesh.boundary_nodes(Side::Left) {
        pins.entry(n).or_insert_with(|| problem.theta_l.eval(mesh.node(n)[1]));
    }
    if let RightBoundary::DirichletTheta { theta_r, .. } = &problem.right {
        for n in mesh.boundary_nodes(Side::Right) {
            pins.entry(n).or_insert_with(|| theta_r.eval(mesh.node(n)[1]));
        }
    }
    pins
}

pub fn run_heat(problem: &HeatProblem, mesh: &SpaceTimeMesh) -> Result<HeatRun> {
    let dual = solve_heat(problem, mesh)?;
    let samples = dtp_heat(mesh, &dual, problem.k)?;
    let theta = projection::l2_project(&ProjectionJob {
        mesh,
        samples: &samples.theta,
        pinned: heat_pins(problem, mesh),
    })?;
    Ok(HeatRun {
        dual,
        samples,
        theta,
    })
}

/// Quadratic form of the principal part, `(∂x p + ∂t l)² + k² (∂x l)²`, for
/// the gradient matrix `[[∂x p, ∂t p], [∂x l, ∂t l]]`.
pub fn principal_form(grad: [[f64; 2]; 2], k: f64) -> f64 {
    let a = grad[0][0] + grad[1][1];
    a * a + k * k * grad[1][0] * grad[1][0]
}
