//! Named configurations for the reference experiments.

use dualfem::dual_euler::{EulerConfig, RigidBody};
use dualfem::dual_heat::{HeatProblem, RightBoundary};
use dualfem::dual_transport::{StagePlan, TransportProblem};
use dualfem::oracles::steady_dual_family;
use dualfem::Profile;

use crate::config::{
    AlgebraicConfig, EulerReference, EulerRunConfig, HeatConfig, HeatOracle, ProblemConfig, RunConfig,
    TransportConfig,
};

/// Terms kept in the Fourier reference series.
pub const SERIES_TERMS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    /// ASCII spelling for names containing `β`
    pub alias: Option<&'static str>,
    pub description: &'static str,
    pub config: RunConfig,
}

pub fn list_presets() -> Vec<Preset> {
    vec![
        preset("heat-steady", None, "steady heat, zero dual data, 100x110", heat_steady(false)),
        preset(
            "heat-steady-gauge",
            None,
            "steady heat with dual data from the exact steady dual family",
            heat_steady(true),
        ),
        preset("heat-transient", None, "decaying sine mode, k = 0.2, 100x110", heat_transient()),
        preset("heat-jump", None, "discontinuous linear profile, beta = 10, 200x25", heat_jump()),
        preset(
            "heat-smoothed-jump-β10",
            Some("heat-smoothed-jump-beta10"),
            "smoothed jump, beta = 10, eps = 0.01, at 200x25 and 400x50",
            heat_smoothed(10.0, vec![[200, 25], [400, 50]]),
        ),
        preset(
            "heat-smoothed-jump-β0",
            Some("heat-smoothed-jump-beta0"),
            "smoothed jump, beta = 0, eps = 0.01, 200x25",
            heat_smoothed(0.0, vec![[200, 25]]),
        ),
        preset("transport-step", None, "step transported at c = 0.25, 10 stages of 200x55", transport_step()),
        preset("euler-free", None, "free rotation, I = [1,2,3], 20 elements per stage", euler_free(Vec::new())),
        preset(
            "euler-free-convergence",
            None,
            "free rotation at 20, 40 and 80 elements per stage",
            euler_free(vec![[40, 10], [80, 20]]),
        ),
        preset("euler-damped", None, "damped rotation, nu = 0.4, against RK45", euler_damped()),
        preset("algebraic-demo", None, "finite-dimensional dual solve of a 4x6 system", algebraic_demo()),
    ]
}

pub fn find_preset(name: &str) -> Option<Preset> {
    list_presets()
        .into_iter()
        .find(|p| p.name == name || p.alias == Some(name))
}

fn preset(
    name: &'static str,
    alias: Option<&'static str>,
    description: &'static str,
    problem: ProblemConfig,
) -> Preset {
    Preset {
        name,
        alias,
        description,
        config: RunConfig { preset: Some(name.to_string()), out_dir: None, problem },
    }
}

fn heat_steady(exact_dual: bool) -> ProblemConfig {
    let (l_top, l_r) = if exact_dual {
        let d = steady_dual_family(1.0, 0.0);
        (Profile::Polynomial { coeffs: d.l_coeffs() }, Profile::constant(d.l(1.0)))
    } else {
        (Profile::zero(), Profile::zero())
    };
    ProblemConfig::Heat(HeatConfig {
        problem: HeatProblem {
            k: 1.0,
            length: 1.0,
            duration: 1.1,
            theta0: Profile::Polynomial { coeffs: vec![1.0, 3.0] },
            theta_l: Profile::constant(1.0),
            right: RightBoundary::DirichletTheta { theta_r: Profile::constant(4.0), l_r },
            l_left: Profile::zero(),
            l_top,
        },
        meshes: vec![[100, 110]],
        t_report: 1.0,
        oracle: HeatOracle::Steady,
    })
}

fn heat_transient() -> ProblemConfig {
    ProblemConfig::Heat(HeatConfig {
        problem: HeatProblem {
            k: 0.2,
            length: 1.0,
            duration: 1.1,
            theta0: Profile::Sine { amplitude: 1.0, frequency: std::f64::consts::FRAC_PI_2, offset: 1.0 },
            theta_l: Profile::constant(1.0),
            right: RightBoundary::NeumannPi { pi_r: Profile::zero(), p_r: Profile::zero() },
            l_left: Profile::zero(),
            l_top: Profile::zero(),
        },
        meshes: vec![[100, 110]],
        t_report: 1.0,
        oracle: HeatOracle::Transient,
    })
}

fn jump_problem(theta0: Profile, beta: f64) -> HeatProblem {
    HeatProblem {
        k: 0.1,
        length: 1.0,
        duration: 0.125,
        theta0,
        theta_l: Profile::constant(beta),
        right: RightBoundary::DirichletTheta { theta_r: Profile::constant(beta), l_r: Profile::zero() },
        l_left: Profile::zero(),
        l_top: Profile::zero(),
    }
}

fn heat_jump() -> ProblemConfig {
    let beta = 10.0;
    ProblemConfig::Heat(HeatConfig {
        problem: jump_problem(Profile::LinearJump { beta }, beta),
        meshes: vec![[200, 25]],
        t_report: 0.125,
        oracle: HeatOracle::Discontinuous { beta, n_terms: SERIES_TERMS },
    })
}

fn heat_smoothed(beta: f64, meshes: Vec<[usize; 2]>) -> ProblemConfig {
    let eps = 0.01;
    ProblemConfig::Heat(HeatConfig {
        problem: jump_problem(Profile::SmoothedJump { beta, eps }, beta),
        meshes,
        t_report: 0.125,
        oracle: HeatOracle::FourierJump { beta, eps, n_terms: SERIES_TERMS },
    })
}

fn transport_step() -> ProblemConfig {
    ProblemConfig::Transport(TransportConfig {
        problem: TransportProblem {
            c: 0.25,
            length: 2.0,
            total_time: 5.0,
            u0: Profile::Step { at: 0.2, left: 2.0, right: 4.0, at_value: 3.0 },
            u_left: Profile::constant(2.0),
            lambda_top: Profile::zero(),
            lambda_right: Profile::zero(),
        },
        nx: 200,
        nt_stage: 55,
        plan: StagePlan { t_stage: 0.55, t_keep: 0.5 },
        step_oracle: true,
        band_cells: 6.0,
        window_cells: 10.0,
        right_layer: 0.1,
    })
}

fn euler_base(inertia: [f64; 3], omega0: [f64; 3], nu: f64, total_time: f64, t_stage: f64) -> EulerConfig {
    EulerConfig {
        body: RigidBody::new(inertia, nu),
        omega0,
        total_time,
        t_stage,
        ne_per_stage: 20,
        n_c: 5,
        tol: 1e-10,
        max_iter: 50,
        lambda_t: [0.0; 3],
    }
}

fn euler_free(refinements: Vec<[usize; 2]>) -> ProblemConfig {
    ProblemConfig::Euler(EulerRunConfig {
        config: euler_base([1.0, 2.0, 3.0], [1.0, 0.0, 3.0], 0.0, 3.0, 0.5),
        reference: EulerReference::Elliptic,
        refinements,
    })
}

fn euler_damped() -> ProblemConfig {
    ProblemConfig::Euler(EulerRunConfig {
        config: euler_base([1.0, 2.0, 5.0], [5.0, 3.0, 0.0], 0.4, 5.0, 0.3),
        reference: EulerReference::Rk45,
        refinements: Vec::new(),
    })
}

fn algebraic_demo() -> ProblemConfig {
    let matrix = vec![
        vec![2.0, -1.0, 0.0, 1.0, 0.5, 0.0],
        vec![0.0, 1.0, 3.0, -1.0, 0.0, 2.0],
        vec![1.0, 0.0, -2.0, 0.0, 1.0, 1.0],
        vec![-1.0, 2.0, 1.0, 0.0, -3.0, 0.5],
    ];
    let y = [1.0, -1.0, 2.0, 0.0, 0.5, -2.0];
    let rhs = matrix
        .iter()
        .map(|r| r.iter().zip(&y).map(|(a, b)| a * b).sum())
        .collect();
    ProblemConfig::Algebraic(AlgebraicConfig { matrix, rhs })
}
