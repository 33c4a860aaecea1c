//! Dual formulation of Euler's equations for a rotating rigid body,
//!
//! ```text
//! I_i ω̇_i + c_i ω_{i+1} ω_{i+2} + ν I_i ω_i = 0,    c_i = I_{i+2} − I_{i+1}
//! ```
//!
//! solved stage by stage with Newton's method on the dual fields `λ_i(t)`.
//! Indices are taken mod 3 throughout.
//!
//! The primal field follows from pointwise stationarity of the dual
//! functional with the potential `H = ½ a |ω − ω̃|²`:
//!
//! ```text
//! 𝕂(λ) ω = a ω̃ + b,    b_j = I_j λ̇_j − ν I_j λ_j
//! ```
//!
//! Differentiating this relation gives `∂ω/∂λ_k = 𝕂⁻¹ f_k` and
//! `∂ω/∂λ̇_k = 𝕂⁻¹ g_k` with the vectors `f_k`, `g_k` built below.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{self, GAUSS_2};
use crate::linalg::{self, BandMatrix};
use crate::mesh::TimeMesh;
use crate::projection;

/// Inertias, damping and potential stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBody {
    pub inertia: [f64; 3],
    #[serde(default)]
    pub nu: f64,
    #[serde(default = "default_a")]
    pub a: f64,
}

fn default_a() -> f64 {
    1.0
}

impl RigidBody {
    pub fn new(inertia: [f64; 3], nu: f64) -> Self {
        Self { inertia, nu, a: 1.0 }
    }

    /// `c_i = I_{i+2} − I_{i+1}`
    pub fn c(&self) -> [f64; 3] {
        let i = self.inertia;
        [i[2] - i[1], i[0] - i[2], i[1] - i[0]]
    }

    pub fn validate(&self) -> Result<()> {
        if !self.inertia.iter().all(|&v| v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("inertias must be positive, got {:?}", self.inertia)));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid(format!("damping must be non-negative, got {}", self.nu)));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::invalid(format!("potential stiffness must be positive, got {}", self.a)));
        }
        Ok(())
    }

    pub fn energy(&self, w: [f64; 3]) -> f64 {
        0.5 * (0..3).map(|i| self.inertia[i] * w[i] * w[i]).sum::<f64>()
    }

    pub fn momentum(&self, w: [f64; 3]) -> f64 {
        (0..3).map(|i| (self.inertia[i] * w[i]).powi(2)).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerConfig {
    pub body: RigidBody,
    pub omega0: [f64; 3],
    pub total_time: f64,
    pub t_stage: f64,
    pub ne_per_stage: usize,
    pub n_c: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub lambda_t: [f64; 3],
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    50
}

impl EulerConfig {
    pub fn validate(&self) -> Result<()> {
        self.body.validate()?;
        if !(self.total_time > 0.0 && self.t_stage > 0.0) {
            return Err(Error::invalid("total and stage lengths must be positive"));
        }
        if self.ne_per_stage == 0 || self.n_c >= self.ne_per_stage {
            return Err(Error::invalid(format!(
                "discarded elements {} must be fewer than elements per stage {}",
                self.n_c, self.ne_per_stage
            )));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::invalid("Newton tolerance and iteration cap must be positive"));
        }
        if !self.omega0.iter().chain(&self.lambda_t).all(|v| v.is_finite()) {
            return Err(Error::invalid("initial data must be finite"));
        }
        Ok(())
    }
}

/// `ω̂` and its derivatives at one point; `d_lambda[k][i] = ∂ω̂_i/∂λ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtpEval {
    pub omega: [f64; 3],
    pub d_lambda: [[f64; 3]; 3],
    pub d_lambdadot: [[f64; 3]; 3],
}

fn inverse3(m: [[f64; 3]; 3], tiny: f64, t: f64) -> Result<[[f64; 3]; 3]> {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    if !(det.abs() >= tiny) {
        return Err(Error::SingularDtp { t, det });
    }
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            inv[r][c] = adj[r][c] / det;
        }
    }
    Ok(inv)
}

fn matvec3(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|r| m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2])
}

/// Dual-to-primal map at time `t` (used only for error context).
pub fn dtp_euler(lambda: [f64; 3], lambdadot: [f64; 3], base: [f64; 3], body: &RigidBody, t: f64) -> Result<DtpEval> {
    let a = body.a;
    let c = body.c();
    let i = body.inertia;
    let k = [
        [a, c[2] * lambda[2], c[1] * lambda[1]],
        [c[2] * lambda[2], a, c[0] * lambda[0]],
        [c[1] * lambda[1], c[0] * lambda[0], a],
    ];
    let kinv = inverse3(k, 1e-12 * a * a * a, t)?;
    let rhs = [0, 1, 2].map(|j| a * base[j] + i[j] * lambdadot[j] - body.nu * i[j] * lambda[j]);
    let w = matvec3(&kinv, rhs);
    let f = [
        [-body.nu * i[0], -c[0] * w[2], -c[0] * w[1]],
        [-c[1] * w[2], -body.nu * i[1], -c[1] * w[0]],
        [-c[2] * w[1], -c[2] * w[0], -body.nu * i[2]],
    ];
    let mut d_lambda = [[0.0; 3]; 3];
    let mut d_lambdadot = [[0.0; 3]; 3];
    for kk in 0..3 {
        d_lambda[kk] = matvec3(&kinv, f[kk]);
        let mut g = [0.0; 3];
        g[kk] = i[kk];
        d_lambdadot[kk] = matvec3(&kinv, g);
    }
    Ok(DtpEval {
        omega: w,
        d_lambda,
        d_lambdadot,
    })
}

/// Per Gauss point: time, weight, shape values and shape derivatives.
fn line_points(mesh: &TimeMesh, e: usize) -> [(f64, f64, [f64; 2], [f64; 2]); 2] {
    let [t0, t1] = mesh.element(e);
    [-GAUSS_2, GAUSS_2].map(|xi| {
        let (n, dn) = fem::eval_shapes_line(t0, t1, xi);
        let t = n[0] * t0 + n[1] * t1;
        (t, 0.5 * (t1 - t0), n, dn)
    })
}

fn interpolate(lambda: &[[f64; 3]], e: usize, n: [f64; 2], dn: [f64; 2]) -> ([f64; 3], [f64; 3]) {
    let (l0, l1) = (lambda[e], lambda[e + 1]);
    (
        [0, 1, 2].map(|i| n[0] * l0[i] + n[1] * l1[i]),
        [0, 1, 2].map(|i| dn[0] * l0[i] + dn[1] * l1[i]),
    )
}

/// Residual over the free dofs (every node but the last), ordered
/// `node · 3 + component`. `base(t)` is the base state `ω̃`.
pub fn residual(
    body: &RigidBody,
    mesh: &TimeMesh,
    lambda: &[[f64; 3]],
    base: &dyn Fn(f64) -> [f64; 3],
    omega0: [f64; 3],
) -> Result<Vec<f64>> {
    let ne = mesh.element_count();
    check_len(mesh, lambda)?;
    let c = body.c();
    let inr = body.inertia;
    let mut r = vec![0.0; 3 * (ne + 1)];
    for e in 0..ne {
        for (t, w, n, dn) in line_points(mesh, e) {
            let (l, ld) = interpolate(lambda, e, n, dn);
            let d = dtp_euler(l, ld, base(t), body, t)?;
            let om = d.omega;
            for a in 0..2 {
                for i in 0..3 {
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    r[3 * (e + a) + i] += w
                        * (-inr[i] * om[i] * dn[a] + c[i] * om[j] * om[k] * n[a] + body.nu * inr[i] * om[i] * n[a]);
                }
            }
        }
    }
    for i in 0..3 {
        r[i] -= inr[i] * omega0[i];
    }
    r.truncate(3 * ne);
    Ok(r)
}

/// Exact derivative of [`residual`] with respect to the free dofs, in band
/// storage with `kl = ku = 5`.
pub fn jacobian(
    body: &RigidBody,
    mesh: &TimeMesh,
    lambda: &[[f64; 3]],
    base: &dyn Fn(f64) -> [f64; 3],
) -> Result<BandMatrix> {
    let ne = mesh.element_count();
    check_len(mesh, lambda)?;
    let c = body.c();
    let inr = body.inertia;
    let nfree = 3 * ne;
    let mut jac = BandMatrix::zeros(nfree, 5, 5);
    for e in 0..ne {
        for (t, w, n, dn) in line_points(mesh, e) {
            let (l, ld) = interpolate(lambda, e, n, dn);
            let d = dtp_euler(l, ld, base(t), body, t)?;
            let om = d.omega;
            for b in 0..2 {
                let col_node = e + b;
                if col_node == ne {
                    continue;
                }
                for jj in 0..3 {
                    // dω̂_m / dλ_jj^B for every component m
                    let dw = [0, 1, 2].map(|m| d.d_lambda[jj][m] * n[b] + d.d_lambdadot[jj][m] * dn[b]);
                    for a in 0..2 {
                        let row_node = e + a;
                        if row_node == ne {
                            continue;
                        }
                        for i in 0..3 {
                            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                            let v = (-inr[i] * dn[a] + body.nu * inr[i] * n[a]) * dw[i]
                                + c[i] * n[a] * om[k] * dw[j]
                                + c[i] * n[a] * om[j] * dw[k];
                            jac.add(3 * row_node + i, 3 * col_node + jj, w * v);
                        }
                    }
                }
            }
        }
    }
    Ok(jac)
}

fn check_len(mesh: &TimeMesh, lambda: &[[f64; 3]]) -> Result<()> {
    if lambda.len() != mesh.node_count() {
        return Err(Error::invalid(format!(
            "{} nodal values for {} nodes",
            lambda.len(),
            mesh.node_count()
        )));
    }
    Ok(())
}

/// Primal field at the Gauss points, paired per element.
pub fn omega_samples(
    body: &RigidBody,
    mesh: &TimeMesh,
    lambda: &[[f64; 3]],
    base: &dyn Fn(f64) -> [f64; 3],
) -> Result<Vec<[[f64; 3]; 2]>> {
    (0..mesh.element_count())
        .map(|e| {
            let p = line_points(mesh, e);
            let mut out = [[0.0; 3]; 2];
            for (q, (t, _, n, dn)) in p.into_iter().enumerate() {
                let (l, ld) = interpolate(lambda, e, n, dn);
                out[q] = dtp_euler(l, ld, base(t), body, t)?.omega;
            }
            Ok(out)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageResult {
    /// global times of the retained nodes
    pub times: Vec<f64>,
    pub omega_nodes: Vec<[f64; 3]>,
    pub t_f: f64,
    pub newton_iters: usize,
    pub final_increment: f64,
    pub increments: Vec<f64>,
    #[serde(skip)]
    pub lambda: Vec<[f64; 3]>,
}

/// Newton solve of one stage starting at global time `t_i` from `omega0`,
/// with the constant base state `ω̃ = omega0`.
pub fn newton_stage(cfg: &EulerConfig, t_i: f64, omega0: [f64; 3]) -> Result<StageResult> {
    let body = &cfg.body;
    let mesh = TimeMesh::new(cfg.t_stage, cfg.ne_per_stage)?;
    let ne = mesh.element_count();
    let base = move |_t: f64| omega0;
    let mut lambda = vec![[0.0; 3]; ne + 1];
    lambda[ne] = cfg.lambda_t;
    let mut increments = Vec::new();
    let mut growth = 0;
    loop {
        if increments.len() == cfg.max_iter {
            return Err(Error::NonConvergence {
                iterations: increments.len(),
                history: increments,
            });
        }
        let r = residual(body, &mesh, &lambda, &base, omega0)?;
        let jac = jacobian(body, &mesh, &lambda, &base)?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let d = if rhs.iter().all(|&v| v == 0.0) {
            vec![0.0; rhs.len()]
        } else {
            linalg::solve_checked(&jac, &rhs)?.x
        };
        let mut inc: f64 = 0.0;
        for (node, l) in lambda.iter_mut().take(ne).enumerate() {
            for i in 0..3 {
                l[i] += d[3 * node + i];
                inc = inc.max(d[3 * node + i].abs());
            }
        }
        if !inc.is_finite() {
            increments.push(inc);
            return Err(Error::NonConvergence {
                iterations: increments.len(),
                history: increments,
            });
        }
        if let Some(&prev) = increments.last() {
            growth = if inc > prev { growth + 1 } else { 0 };
        }
        increments.push(inc);
        if inc < cfg.tol {
            break;
        }
        if growth >= 3 {
            return Err(Error::NonConvergence {
                iterations: increments.len(),
                history: increments,
            });
        }
    }
    let samples = omega_samples(body, &mesh, &lambda, &base)?;
    let pins = BTreeMap::from([(0usize, omega0)]);
    let projected = projection::l2_project_time(&mesh, &samples, &pins)?;
    let keep = ne - cfg.n_c;
    let times: Vec<f64> = mesh.nodes()[..=keep].iter().map(|t| t_i + t).collect();
    Ok(StageResult {
        t_f: *times.last().unwrap(),
        times,
        omega_nodes: projected[..=keep].to_vec(),
        newton_iters: increments.len(),
        final_increment: *increments.last().unwrap(),
        increments,
        lambda,
    })
}

/// Concatenated angular velocity over `[0, total_time]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerRun {
    pub times: Vec<f64>,
    pub omega: Vec<[f64; 3]>,
    pub stages: Vec<StageResult>,
}

impl EulerRun {
    pub fn energy(&self, body: &RigidBody) -> Vec<f64> {
        self.omega.iter().map(|w| body.energy(*w)).collect()
    }

    pub fn momentum(&self, body: &RigidBody) -> Vec<f64> {
        self.omega.iter().map(|w| body.momentum(*w)).collect()
    }
}

pub fn run_euler(cfg: &EulerConfig) -> Result<EulerRun> {
    cfg.validate()?;
    let mut run = EulerRun {
        times: vec![0.0],
        omega: vec![cfg.omega0],
        stages: Vec::new(),
    };
    let mut t_f = 0.0;
    let mut w = cfg.omega0;
    let eps = 1e-9 * cfg.total_time;
    while t_f < cfg.total_time - eps {
        let s = run.stages.len();
        let stage = newton_stage(cfg, t_f, w).map_err(|e| e.at_stage(s))?;
        for (t, om) in stage.times.iter().zip(&stage.omega_nodes).skip(1) {
            if *t <= cfg.total_time + eps {
                run.times.push(*t);
                run.omega.push(*om);
            }
        }
        t_f = stage.t_f;
        w = *stage.omega_nodes.last().unwrap();
        run.stages.push(stage);
    }
    Ok(run)
}
