//! Executes a validated [`RunConfig`] and collects tables and a summary.

use std::collections::BTreeMap;
use std::time::Instant;

use dualfem::dual_euler::{run_euler, EulerConfig, EulerRun};
use dualfem::dual_heat::{run_heat, HeatRun};
use dualfem::dual_transport::{run_time_sliced, track_jump, JumpTrack, StitchedField};
use dualfem::metrics::{err1, err2, err_omega, pct_error, retained_rows};
use dualfem::oracles::{
    algebraic_dual_demo, euler_free_exact, heat_discontinuous_series, heat_steady, heat_transient,
    rk45_reference, AlgebraicOutcome, FourierJumpSolution,
};
use dualfem::SpaceTimeMesh;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::{
    step_data, AlgebraicConfig, EulerReference, EulerRunConfig, HeatConfig, HeatOracle, ProblemConfig,
    RunConfig, TransportConfig,
};
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub label: String,
    pub config: RunConfig,
    /// residual norms, iteration counts
    pub diagnostics: BTreeMap<String, f64>,
    /// error maxima and conservation drifts
    pub metrics: BTreeMap<String, f64>,
    pub series: BTreeMap<String, Vec<f64>>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Table { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct HeatLevel {
    pub mesh: SpaceTimeMesh,
    pub run: HeatRun,
    /// worst % error for `t ≤ t_report`, `None` without an oracle
    pub max_pct_error: Option<f64>,
    pub max_pct_error_top: Option<f64>,
    pub max_err1: Option<f64>,
    pub err2_series: Vec<(f64, f64)>,
}

impl HeatLevel {
    pub fn max_err2(&self) -> Option<f64> {
        (!self.err2_series.is_empty()).then(|| self.err2_series.iter().fold(0.0_f64, |a, b| a.max(b.1)))
    }
}

pub struct TransportDetail {
    pub field: StitchedField,
    pub track: Option<JumpTrack>,
    pub max_pct_error: Option<f64>,
    /// `(max h_t, max h_b)` per stage
    pub stage_extremes: Vec<(f64, f64)>,
}

pub struct EulerLevel {
    pub config: EulerConfig,
    pub run: EulerRun,
    pub reference: Option<Vec<[f64; 3]>>,
    pub max_err_omega: Option<f64>,
    pub energy_drift: f64,
    pub momentum_drift: f64,
    /// relative deviation of `L(t)` from `L(0) e^{−νt}`
    pub momentum_decay_error: f64,
}

pub enum RunDetail {
    Heat(Vec<HeatLevel>),
    Transport(Box<TransportDetail>),
    Euler(Vec<EulerLevel>),
    Algebraic(AlgebraicOutcome),
}

pub struct RunOutput {
    pub summary: RunSummary,
    pub tables: Vec<Table>,
    pub detail: RunDetail,
}

#[derive(Default)]
struct Collected {
    diagnostics: BTreeMap<String, f64>,
    metrics: BTreeMap<String, f64>,
    series: BTreeMap<String, Vec<f64>>,
    tables: Vec<Table>,
}

impl Collected {
    fn metric(&mut self, key: impl Into<String>, v: Option<f64>) {
        if let Some(v) = v {
            self.metrics.insert(key.into(), v);
        }
    }
}

pub fn run(config: &RunConfig) -> CliResult<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    let mut out = Collected::default();
    let detail = match &config.problem {
        ProblemConfig::Heat(h) => RunDetail::Heat(run_heat_config(h, &mut out)?),
        ProblemConfig::Transport(t) => RunDetail::Transport(Box::new(run_transport_config(t, &mut out)?)),
        ProblemConfig::Euler(e) => RunDetail::Euler(run_euler_config(e, &mut out)?),
        ProblemConfig::Algebraic(a) => RunDetail::Algebraic(run_algebraic(a, &mut out)),
    };
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        label: config.label(),
        config: config.clone(),
        diagnostics: out.diagnostics,
        metrics: out.metrics,
        series: out.series,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutput { summary, tables: out.tables, detail })
}

fn heat_reference(h: &HeatConfig) -> Option<Box<dyn Fn(f64, f64) -> f64>> {
    let k = h.problem.k;
    match h.oracle {
        HeatOracle::None => None,
        HeatOracle::Steady => Some(Box::new(|x, _| heat_steady(x))),
        HeatOracle::Transient => Some(Box::new(move |x, t| heat_transient(x, t, k))),
        HeatOracle::FourierJump { beta, eps, n_terms } => {
            let s = FourierJumpSolution::new(beta, eps, k, n_terms);
            Some(Box::new(move |x, t| s.eval(x, t)))
        }
        // the series is written for shift 10; other shifts move it rigidly
        HeatOracle::Discontinuous { beta, n_terms } => {
            Some(Box::new(move |x, t| heat_discontinuous_series(x, t, k, n_terms) + beta - 10.0))
        }
    }
}

fn mesh_tag(m: [usize; 2]) -> String {
    format!("{}x{}", m[0], m[1])
}

fn run_heat_config(h: &HeatConfig, out: &mut Collected) -> CliResult<Vec<HeatLevel>> {
    let reference = heat_reference(h);
    let mut levels = Vec::new();
    for (lvl, m) in h.meshes.iter().enumerate() {
        let tag = mesh_tag(*m);
        let mesh = SpaceTimeMesh::new(h.problem.length, h.problem.duration, m[0], m[1])
            .map_err(|e| CliError::from_validation("meshes", e))?;
        let run = run_heat(&h.problem, &mesh).map_err(|e| CliError::from_solver(&format!("heat {tag}"), e))?;
        out.diagnostics.insert(format!("{tag}.relative_residual"), run.dual.relative_residual);

        let mut level = HeatLevel {
            mesh,
            run,
            max_pct_error: None,
            max_pct_error_top: None,
            max_err1: None,
            err2_series: Vec::new(),
        };
        let mesh = &level.mesh;
        let theta = &level.run.theta;
        let rows = retained_rows(mesh, h.t_report);
        let mut err_table = Table::new(
            if lvl == 0 { "error".to_string() } else { format!("error_{tag}") },
            &["x", "t", "theta", "exact", "pct_error", "err1"],
        );
        if let Some(exact) = &reference {
            let exact_nodes: Vec<f64> = mesh.nodes().iter().map(|p| exact(p[0], p[1])).collect();
            let pct = pct_error(&theta.values, &exact_nodes);
            let (mut inner, mut top, mut e1max) = (0.0_f64, None::<f64>, 0.0_f64);
            for j in 0..=mesh.nt() {
                let e1 = err1(mesh, theta, exact, j).map_err(|e| CliError::from_solver("err1", e))?;
                for (n, e1v) in mesh.row_nodes(j).zip(e1) {
                    let [x, t] = mesh.node(n);
                    if let Some(p) = pct[n] {
                        if j < rows {
                            inner = inner.max(p);
                        } else {
                            top = Some(top.unwrap_or(0.0).max(p));
                        }
                    }
                    if j < rows {
                        e1max = e1max.max(e1v);
                    }
                    err_table.push(vec![x.into(), t.into(), theta.values[n].into(), exact_nodes[n].into(), pct[n].into(), e1v.into()]);
                }
            }
            level.max_pct_error = Some(inner);
            level.max_pct_error_top = top;
            level.max_err1 = Some(e1max);
            level.err2_series = err2(mesh, theta, exact, rows).map_err(|e| CliError::from_solver("err2", e))?;
            out.metric(format!("{tag}.max_pct_error"), level.max_pct_error);
            out.metric(format!("{tag}.max_pct_error_top_layer"), level.max_pct_error_top);
            out.metric(format!("{tag}.max_err1"), level.max_err1);
            out.metric(format!("{tag}.max_err2"), level.max_err2());
            out.series.insert(format!("{tag}.err2"), level.err2_series.iter().map(|p| p.1).collect());

            let mut e2 = Table::new(if lvl == 0 { "err2".to_string() } else { format!("err2_{tag}") }, &["t", "err2"]);
            for (t, e) in &level.err2_series {
                e2.push(vec![(*t).into(), (*e).into()]);
            }
            out.tables.push(err_table);
            out.tables.push(e2);
        }
        if lvl == 0 {
            let mut field = Table::new("field", &["x", "t", "theta"]);
            let mut dual = Table::new("dual", &["x", "t", "p", "l"]);
            for n in 0..mesh.node_count() {
                let [x, t] = mesh.node(n);
                field.push(vec![x.into(), t.into(), theta.values[n].into()]);
                dual.push(vec![x.into(), t.into(), level.run.dual.p.values[n].into(), level.run.dual.l.values[n].into()]);
            }
            out.tables.push(field);
            out.tables.push(dual);
        }
        levels.push(level);
    }
    Ok(levels)
}

fn run_transport_config(tc: &TransportConfig, out: &mut Collected) -> CliResult<TransportDetail> {
    let p = &tc.problem;
    let mesh = SpaceTimeMesh::new(p.length, tc.plan.t_stage, tc.nx, tc.nt_stage)
        .map_err(|e| CliError::from_validation("nx, nt_stage", e))?;
    let field = run_time_sliced(p, tc.plan, &mesh).map_err(|e| CliError::from_solver("transport", e))?;
    let worst_residual = field.stages.iter().fold(0.0_f64, |a, s| a.max(s.relative_residual));
    out.diagnostics.insert("max_relative_residual".into(), worst_residual);
    out.diagnostics.insert("stages".into(), field.stages.len() as f64);

    let mut table = Table::new("field", &["x", "t_global", "u"]);
    for (t, row) in field.times.iter().zip(&field.values) {
        for (x, u) in field.xs.iter().zip(row) {
            table.push(vec![(*x).into(), (*t).into(), (*u).into()]);
        }
    }
    out.tables.push(table);

    let mut detail = TransportDetail { field, track: None, max_pct_error: None, stage_extremes: Vec::new() };
    if tc.step_oracle {
        let step = step_data(p)?;
        let h = mesh.hx();
        let f = &detail.field;
        let mut err = Table::new("error", &["x", "t_global", "u", "exact", "pct_error"]);
        let mut worst = 0.0_f64;
        for (t, row) in f.times.iter().zip(&f.values) {
            for (x, u) in f.xs.iter().zip(row) {
                let r = step.exact(*x, *t);
                let excluded = (x - step.locus(*t)).abs() <= tc.band_cells * h + 1e-12
                    || *x > p.length - tc.right_layer + 1e-12
                    || r.abs() < dualfem::metrics::REFERENCE_FLOOR;
                let pct = (!excluded).then(|| ((u - r) / r).abs() * 100.0);
                if let Some(v) = pct {
                    worst = worst.max(v);
                }
                err.push(vec![(*x).into(), (*t).into(), (*u).into(), r.into(), pct.into()]);
            }
        }
        out.tables.push(err);
        detail.max_pct_error = Some(worst);
        out.metric("max_pct_error", Some(worst));

        let track = track_jump(&f.xs, &f.times, &f.values, |t| step.locus(t), tc.window_cells * h, (step.left, step.right));
        let mut jt = Table::new("jump_track", &["t_global", "h_t", "h_b"]);
        let mut extremes = vec![(0.0_f64, 0.0_f64); f.stages.len()];
        for (k, t) in track.times.iter().enumerate() {
            jt.push(vec![(*t).into(), track.overshoot[k].into(), track.undershoot[k].into()]);
            let s = f.stage_of_level[k];
            extremes[s].0 = extremes[s].0.max(track.overshoot[k]);
            extremes[s].1 = extremes[s].1.max(track.undershoot[k]);
        }
        out.tables.push(jt);
        out.series.insert("stage_max_overshoot".into(), extremes.iter().map(|e| e.0).collect());
        out.series.insert("stage_max_undershoot".into(), extremes.iter().map(|e| e.1).collect());
        out.metric("max_overshoot", Some(extremes.iter().fold(0.0, |a, e| a.max(e.0))));
        out.metric("max_undershoot", Some(extremes.iter().fold(0.0, |a, e| a.max(e.1))));
        detail.track = Some(track);
        detail.stage_extremes = extremes;
    }
    Ok(detail)
}

fn run_euler_level(cfg: &EulerConfig, reference: EulerReference) -> CliResult<EulerLevel> {
    let run = run_euler(cfg).map_err(|e| CliError::from_solver("euler", e))?;
    let inertia = cfg.body.inertia;
    let refs = match reference {
        EulerReference::None => None,
        EulerReference::Elliptic => Some(
            run.times
                .iter()
                .map(|&t| euler_free_exact(t, inertia, cfg.omega0))
                .collect::<dualfem::Result<Vec<_>>>()
                .map_err(|e| CliError::from_solver("elliptic reference", e))?,
        ),
        EulerReference::Rk45 => {
            let end = *run.times.last().expect("run has the initial sample");
            let dense = rk45_reference(inertia, cfg.omega0, cfg.body.nu, end.max(f64::MIN_POSITIVE))
                .map_err(|e| CliError::from_solver("rk45 reference", e))?;
            Some(run.times.iter().map(|&t| dense.eval(t)).collect())
        }
    };
    let max_err_omega = match &refs {
        Some(r) => Some(
            err_omega(&run.omega, r)
                .map_err(|e| CliError::from_solver("err(omega)", e))?
                .into_iter()
                .fold(0.0, f64::max),
        ),
        None => None,
    };
    let drift = |v: &[f64]| {
        if v[0] == 0.0 {
            0.0
        } else {
            v.iter().map(|a| (a / v[0] - 1.0).abs()).fold(0.0, f64::max)
        }
    };
    let e = run.energy(&cfg.body);
    let l = run.momentum(&cfg.body);
    let nu = cfg.body.nu;
    let decay = if l[0] == 0.0 {
        0.0
    } else {
        l.iter()
            .zip(&run.times)
            .map(|(v, t)| (v / (l[0] * (-nu * t).exp()) - 1.0).abs())
            .fold(0.0, f64::max)
    };
    Ok(EulerLevel {
        config: cfg.clone(),
        energy_drift: drift(&e),
        momentum_drift: drift(&l),
        momentum_decay_error: decay,
        max_err_omega,
        reference: refs,
        run,
    })
}

fn run_euler_config(ec: &EulerRunConfig, out: &mut Collected) -> CliResult<Vec<EulerLevel>> {
    let mut configs = vec![ec.config.clone()];
    for lv in &ec.refinements {
        let mut c = ec.config.clone();
        c.ne_per_stage = lv[0];
        c.n_c = lv[1];
        configs.push(c);
    }
    let mut levels = Vec::new();
    for (k, cfg) in configs.iter().enumerate() {
        let level = run_euler_level(cfg, ec.reference)?;
        let tag = format!("ne{}", cfg.ne_per_stage);
        let iters: Vec<f64> = level.run.stages.iter().map(|s| s.newton_iters as f64).collect();
        let worst_inc = level.run.stages.iter().fold(0.0_f64, |a, s| a.max(s.final_increment));
        out.diagnostics.insert(format!("{tag}.max_newton_iterations"), iters.iter().cloned().fold(0.0, f64::max));
        out.diagnostics.insert(format!("{tag}.max_final_increment"), worst_inc);
        out.series.insert(format!("{tag}.newton_iterations"), iters);
        out.metric(format!("{tag}.max_err_omega"), level.max_err_omega);
        out.metric(format!("{tag}.energy_drift"), Some(level.energy_drift));
        out.metric(format!("{tag}.momentum_drift"), Some(level.momentum_drift));
        out.metric(format!("{tag}.momentum_decay_error"), Some(level.momentum_decay_error));

        if k == 0 {
            let e = level.run.energy(&cfg.body);
            let l = level.run.momentum(&cfg.body);
            let mut om = Table::new("omega", &["t", "omega1", "omega2", "omega3", "E", "L"]);
            for (n, (t, w)) in level.run.times.iter().zip(&level.run.omega).enumerate() {
                om.push(vec![(*t).into(), w[0].into(), w[1].into(), w[2].into(), e[n].into(), l[n].into()]);
            }
            out.tables.push(om);
            let mut conv = Table::new("convergence", &["stage", "iteration", "increment"]);
            for (s, st) in level.run.stages.iter().enumerate() {
                for (i, inc) in st.increments.iter().enumerate() {
                    conv.push(vec![s.into(), (i + 1).into(), (*inc).into()]);
                }
            }
            out.tables.push(conv);
            if let Some(r) = &level.reference {
                let errs = err_omega(&level.run.omega, r).map_err(|e| CliError::from_solver("err(omega)", e))?;
                let mut et = Table::new("error", &["t", "ref1", "ref2", "ref3", "err_omega"]);
                for ((t, w), e) in level.run.times.iter().zip(r).zip(errs) {
                    et.push(vec![(*t).into(), w[0].into(), w[1].into(), w[2].into(), e.into()]);
                }
                out.tables.push(et);
            }
        }
        levels.push(level);
    }
    let errs: Vec<Option<f64>> = levels.iter().map(|l| l.max_err_omega).collect();
    for (k, w) in errs.windows(2).enumerate() {
        if let (Some(a), Some(b)) = (w[0], w[1]) {
            out.metric(format!("refinement_ratio_{}", k + 1), Some(a / b));
        }
    }
    Ok(levels)
}

fn run_algebraic(a: &AlgebraicConfig, out: &mut Collected) -> AlgebraicOutcome {
    let rows = a.matrix.len();
    let cols = a.matrix[0].len();
    let m = DMatrix::from_fn(rows, cols, |i, j| a.matrix[i][j]);
    let b = DVector::from_column_slice(&a.rhs);
    let outcome = algebraic_dual_demo(&m, &b);
    let mut table = Table::new("solution", &["index", "x"]);
    match &outcome {
        AlgebraicOutcome::Solved { x, relative_residual } => {
            out.metrics.insert("solved".into(), 1.0);
            out.metrics.insert("relative_residual".into(), *relative_residual);
            for (i, v) in x.iter().enumerate() {
                table.push(vec![i.into(), (*v).into()]);
            }
        }
        AlgebraicOutcome::NoSolution { relative_residual } => {
            out.metrics.insert("solved".into(), 0.0);
            out.metrics.insert("relative_residual".into(), *relative_residual);
        }
    }
    out.tables.push(table);
    outcome
}
