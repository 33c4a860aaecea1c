//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs the named presets through the library entry point.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use dualfem::dual_euler::{jacobian, residual, RigidBody};
use dualfem::oracles::{
    algebraic_dual_demo, euler_free_exact, jacobi, rk45_reference, AlgebraicOutcome,
};
use dualfem::{dual_heat, dual_transport, TimeMesh};
use dualfem_cli::run::{EulerLevel, HeatLevel, TransportDetail};
use dualfem_cli::{find_preset, run, RunDetail};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn heat_levels(name: &str) -> Vec<HeatLevel> {
    let p = find_preset(name).expect("preset exists");
    match run(&p.config).expect("preset runs").detail {
        RunDetail::Heat(levels) => levels,
        _ => panic!("{name} is not a heat preset"),
    }
}

fn euler_levels(name: &str) -> Vec<EulerLevel> {
    let p = find_preset(name).expect("preset exists");
    match run(&p.config).expect("preset runs").detail {
        RunDetail::Euler(levels) => levels,
        _ => panic!("{name} is not an euler preset"),
    }
}

fn transport(name: &str) -> TransportDetail {
    let p = find_preset(name).expect("preset exists");
    match run(&p.config).expect("preset runs").detail {
        RunDetail::Transport(d) => *d,
        _ => panic!("{name} is not a transport preset"),
    }
}

fn gauge_invariance() -> Verdict {
    let start = Instant::now();
    let a = heat_levels("heat-steady").remove(0);
    let b = heat_levels("heat-steady-gauge").remove(0);
    let secs = start.elapsed().as_secs_f64();
    let mesh = &a.mesh;
    let diff = (0..mesh.node_count())
        .filter(|&n| mesh.node(n)[1] <= 1.0 + 1e-9)
        .map(|n| (a.run.theta.values[n] - b.run.theta.values[n]).abs())
        .fold(0.0, f64::max);
    let ea = a.max_pct_error.unwrap();
    let eb = b.max_pct_error.unwrap();
    verdict(
        diff <= 1e-2 && ea <= 1.0 && eb <= 1.0 && secs <= 120.0,
        format!("max |dtheta| {diff:.3e} (<= 1e-2), errors {ea:.4}% / {eb:.4}% (<= 1%), {secs:.1}s"),
    )
}

fn transient_heat() -> Verdict {
    let l = heat_levels("heat-transient").remove(0);
    let inner = l.max_pct_error.unwrap();
    let top = l.max_pct_error_top.unwrap();
    verdict(
        inner <= 1.0 && inner < top,
        format!("max error {inner:.4}% (<= 1%), top layer {top:.4}% (interior must be smaller)"),
    )
}

fn smoothed_jump() -> Verdict {
    let start = Instant::now();
    let levels = heat_levels("heat-smoothed-jump-β10");
    let secs = start.elapsed().as_secs_f64();
    let coarse = levels[0].max_err2().unwrap();
    let fine = levels[1].max_err2().unwrap();
    let ok = (coarse - 0.93).abs() <= 0.15 && (fine - 0.82).abs() <= 0.15 && fine < coarse && secs <= 360.0;
    verdict(
        ok,
        format!(
            "max err2 {coarse:.4}% at 200x25 (target 0.93 +/- 0.15), {fine:.4}% at 400x50 (target 0.82 +/- 0.15), {secs:.1}s"
        ),
    )
}

fn transport_step() -> Verdict {
    let d = transport("transport-step");
    let worst = d.max_pct_error.unwrap();
    let s = &d.stage_extremes;
    let n = s.len();
    let fold = |r: &[(f64, f64)]| r.iter().fold((0.0_f64, 0.0_f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let first = fold(&s[..3]);
    let last = fold(&s[n - 3..]);
    let stable = last.0 <= 1.2 * first.0 && last.1 <= 1.2 * first.1;
    verdict(
        n == 10 && worst <= 1.0 && stable,
        format!(
            "(a) max error away from jump and layers {worst:.3}% (<= 1%); (b) h_t {:.4} -> {:.4}, h_b {:.4} -> {:.4} (last 3 <= 1.2 x first 3)",
            first.0, last.0, first.1, last.1
        ),
    )
}

fn euler_free() -> Verdict {
    let start = Instant::now();
    let free = euler_levels("euler-free").remove(0);
    let conv = euler_levels("euler-free-convergence");
    let secs = start.elapsed().as_secs_f64();
    let err = free.max_err_omega.unwrap();
    let e: Vec<f64> = conv.iter().map(|l| l.max_err_omega.unwrap()).collect();
    let r1 = e[0] / e[1];
    let r2 = e[1] / e[2];
    verdict(
        free.energy_drift <= 0.01 && free.momentum_drift <= 0.01 && err <= 2.0 && r1 >= 3.5 && r2 >= 3.5 && secs <= 60.0,
        format!(
            "drift E {:.2e} L {:.2e} (<= 1e-2), max err(omega) {err:.4}% (<= 2%), refinement ratios {r1:.3} {r2:.3} (>= 3.5), {secs:.2}s",
            free.energy_drift, free.momentum_drift
        ),
    )
}

fn euler_damped() -> Verdict {
    let l = euler_levels("euler-damped").remove(0);
    let err = l.max_err_omega.unwrap();
    verdict(
        err <= 2.0 && l.momentum_decay_error <= 0.01,
        format!(
            "max err(omega) vs RK45 {err:.4}% (<= 2%), L vs L(0)exp(-0.4t) {:.2e} (<= 1e-2)",
            l.momentum_decay_error
        ),
    )
}

fn oracle_cross_checks() -> Verdict {
    let inertia = [1.0, 2.0, 3.0];
    let w0 = [1.0, 0.0, 3.0];
    let rk = rk45_reference(inertia, w0, 0.0, 3.0).unwrap();
    let mut agree: f64 = 0.0;
    for k in 0..=600 {
        let t = 3.0 * k as f64 / 600.0;
        let a = rk.eval(t);
        let b = euler_free_exact(t, inertia, w0).unwrap();
        for i in 0..3 {
            agree = agree.max((a[i] - b[i]).abs());
        }
    }
    let mut ident: f64 = 0.0;
    for mi in 0..=20 {
        let m = 0.99 * mi as f64 / 20.0;
        for ui in 0..=200 {
            let u = -10.0 + 20.0 * ui as f64 / 200.0;
            let j = jacobi(u, m);
            ident = ident.max((j.sn * j.sn + j.cn * j.cn - 1.0).abs());
            ident = ident.max((j.dn * j.dn + m * j.sn * j.sn - 1.0).abs());
        }
    }
    verdict(
        agree <= 1e-8 && ident <= 1e-12,
        format!("RK45 vs elliptic {agree:.2e} (<= 1e-8), identity defect {ident:.2e} (<= 1e-12)"),
    )
}

fn jacobian_check() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mesh = TimeMesh::new(0.5, 20).unwrap();
    let n = 3 * mesh.element_count();
    let h = 1e-6;
    let mut worst_rel: f64 = 0.0;
    for draw in 0..20 {
        let body = if draw % 2 == 0 {
            RigidBody::new([1.0, 2.0, 3.0], 0.0)
        } else {
            RigidBody::new([1.0, 2.0, 5.0], 0.4)
        };
        let w0: [f64; 3] = [0; 3].map(|_| rng.random_range(-4.0..4.0));
        let lam: Vec<[f64; 3]> = (0..=mesh.element_count())
            .map(|_| [0; 3].map(|_| rng.random_range(-0.1..0.1)))
            .collect();
        let base = move |_t: f64| w0;
        let jac = jacobian(&body, &mesh, &lam, &base).unwrap();
        let (mut scale, mut worst) = (0.0_f64, 0.0_f64);
        for col in 0..n {
            let (mut lp, mut lm) = (lam.clone(), lam.clone());
            lp[col / 3][col % 3] += h;
            lm[col / 3][col % 3] -= h;
            let rp = residual(&body, &mesh, &lp, &base, w0).unwrap();
            let rm = residual(&body, &mesh, &lm, &base, w0).unwrap();
            for row in 0..n {
                let fd = (rp[row] - rm[row]) / (2.0 * h);
                let an = jac.get(row, col);
                scale = scale.max(an.abs());
                worst = worst.max((fd - an).abs());
            }
        }
        worst_rel = worst_rel.max(worst / scale);
    }
    verdict(worst_rel <= 1e-6, format!("worst relative FD mismatch over 20 iterates {worst_rel:.2e} (<= 1e-6)"))
}

fn degenerate_forms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut negative = 0;
    for _ in 0..10_000 {
        let g: [[f64; 2]; 2] = [[rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)], [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]];
        let k = rng.random_range(0.01..5.0);
        if dual_heat::principal_form(g, k) < 0.0 {
            negative += 1;
        }
        let c = rng.random_range(0.01..5.0);
        if dual_transport::principal_form(g[0], c) < 0.0 {
            negative += 1;
        }
    }
    let mut nonzero = 0;
    for _ in 0..1000 {
        let a = rng.random_range(-10.0..10.0);
        let k = rng.random_range(0.01..5.0);
        let c = rng.random_range(0.01..5.0);
        // heat: (a, 0) ⊗ (0, 1); transport: a (1, −c)
        if dual_heat::principal_form([[0.0, a], [0.0, 0.0]], k) != 0.0 {
            nonzero += 1;
        }
        if dual_transport::principal_form([a, -c * a], c) != 0.0 {
            nonzero += 1;
        }
    }
    verdict(
        negative == 0 && nonzero == 0,
        format!("negative values {negative} of 20000, non-zero on degenerate directions {nonzero} of 2000"),
    )
}

fn algebraic_demo() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut solved, mut worst) = (0, 0.0_f64);
    for case in 0..100 {
        // alternate wide systems with tall rank-deficient ones
        let (m, n) = if case % 2 == 0 { (rng.random_range(1..6), rng.random_range(6..10)) } else { (rng.random_range(5..9), rng.random_range(1..5)) };
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let y = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let b = &a * y;
        if let AlgebraicOutcome::Solved { x, .. } = algebraic_dual_demo(&a, &b) {
            let r = (&a * x - &b).norm() / b.norm();
            worst = worst.max(r);
            if r <= 1e-10 {
                solved += 1;
            }
        }
    }
    let mut rejected = 0;
    for _ in 0..100 {
        let (m, n) = (rng.random_range(4..9), rng.random_range(1..4));
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let b = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        if matches!(algebraic_dual_demo(&a, &b), AlgebraicOutcome::NoSolution { .. }) {
            rejected += 1;
        }
    }
    verdict(
        solved == 100 && rejected == 100,
        format!("consistent solved {solved}/100 (worst residual {worst:.2e}), inconsistent rejected {rejected}/100"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("gauge invariance (heat)", gauge_invariance),
        ("transient heat", transient_heat),
        ("smoothed-jump refinement", smoothed_jump),
        ("transport step", transport_step),
        ("euler free rotation", euler_free),
        ("euler damped rotation", euler_damped),
        ("oracle cross-checks", oracle_cross_checks),
        ("euler jacobian", jacobian_check),
        ("degenerate ellipticity", degenerate_forms),
        ("algebraic dual demo", algebraic_demo),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<26} {}  {}", k + 1, name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
