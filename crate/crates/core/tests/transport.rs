use dualfem::dual_transport::{
    run_time_sliced, solve_transport_stage, track_jump, StageInitial, StagePlan, TransportProblem,
};
use dualfem::oracles::transport_exact;
use dualfem::{Profile, SpaceTimeMesh};

fn jump(total_time: f64) -> TransportProblem {
    TransportProblem {
        c: 0.25,
        length: 2.0,
        total_time,
        u0: Profile::Step { at: 0.2, left: 2.0, right: 4.0, at_value: 3.0 },
        u_left: Profile::constant(2.0),
        lambda_top: Profile::zero(),
        lambda_right: Profile::zero(),
    }
}

fn pct(v: f64, r: f64) -> f64 {
    ((v - r) / r).abs() * 100.0
}

#[test]
fn stitched_field_covers_the_interval() {
    let mesh = SpaceTimeMesh::new(2.0, 0.55, 100, 55).unwrap();
    let out = run_time_sliced(&jump(2.0), StagePlan { t_stage: 0.55, t_keep: 0.5 }, &mesh).unwrap();
    assert_eq!(out.stages.len(), 4);
    assert_eq!(out.keep_rows, 50);
    assert_eq!(out.times.len(), out.values.len());
    assert!((out.times[0]).abs() < 1e-15);
    assert!((out.times.last().unwrap() - 2.0).abs() < 1e-9);
    for w in out.times.windows(2) {
        assert!(w[1] > w[0]);
    }
    for s in &out.stages {
        assert!(s.relative_residual < 1e-8);
    }
}

#[test]
fn primal_is_continuous_and_dual_jumps_at_stage_joints() {
    let mesh = SpaceTimeMesh::new(2.0, 0.55, 100, 55).unwrap();
    let out = run_time_sliced(&jump(1.5), StagePlan { t_stage: 0.55, t_keep: 0.5 }, &mesh).unwrap();
    let nx = mesh.nx();
    let mut dual_jump: f64 = 0.0;
    for s in 1..out.stages.len() {
        let prev = &out.stages[s - 1];
        let next = &out.stages[s];
        for i in 0..=nx {
            let a = prev.u.values[mesh.node_id(i, out.keep_rows)];
            let b = next.u.values[mesh.node_id(i, 0)];
            assert!((a - b).abs() < 1e-12, "u jumps by {} at stage {s}", (a - b).abs());
            let la = prev.lambda.values[mesh.node_id(i, out.keep_rows)];
            let lb = next.lambda.values[mesh.node_id(i, 0)];
            dual_jump = dual_jump.max((la - lb).abs());
        }
    }
    assert!(dual_jump > 1e-3, "dual field unexpectedly continuous ({dual_jump})");
}

#[test]
fn right_boundary_layer_shrinks_under_refinement() {
    let pb = jump(0.5);
    let mut layer = Vec::new();
    let mut outside = Vec::new();
    for (nx, nt) in [(100, 28), (200, 55), (400, 110)] {
        let mesh = SpaceTimeMesh::new(2.0, 0.55, nx, nt).unwrap();
        let st = solve_transport_stage(&pb, &mesh, &StageInitial::Profile(pb.u0.clone()), 0.0).unwrap();
        let (mut w, mut v) = (0.0_f64, 0.0_f64);
        for n in 0..mesh.node_count() {
            let [x, t] = mesh.node(n);
            if t > 0.5 + 1e-9 || x < 1.0 {
                continue;
            }
            let e = pct(st.u.values[n], transport_exact(x, t));
            if x >= 1.9 - 1e-12 {
                w = w.max(e);
            } else {
                v = v.max(e);
            }
        }
        layer.push(w);
        outside.push(v);
    }
    assert!(layer[0] > layer[1] && layer[1] > layer[2], "layer {layer:?}");
    assert!(outside[0] > outside[1] && outside[1] > outside[2], "outside {outside:?}");
}

#[test]
fn jump_oscillations_stay_bounded_over_stages() {
    let mesh = SpaceTimeMesh::new(2.0, 0.55, 200, 55).unwrap();
    let out = run_time_sliced(&jump(5.0), StagePlan { t_stage: 0.55, t_keep: 0.5 }, &mesh).unwrap();
    let h = mesh.hx();
    let tr = track_jump(&out.xs, &out.times, &out.values, |t| 0.2 + 0.25 * t, 10.0 * h, (2.0, 4.0));
    let n = out.stages.len();
    let mut per_stage = vec![(0.0_f64, 0.0_f64); n];
    for (k, s) in out.stage_of_level.iter().enumerate() {
        per_stage[*s].0 = per_stage[*s].0.max(tr.overshoot[k]);
        per_stage[*s].1 = per_stage[*s].1.max(tr.undershoot[k]);
    }
    let first = per_stage[..3].iter().fold((0.0_f64, 0.0_f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let last = per_stage[n - 3..].iter().fold((0.0_f64, 0.0_f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    assert!(last.0 <= 1.2 * first.0, "overshoot {first:?} -> {last:?}");
    assert!(last.1 <= 1.2 * first.1, "undershoot {first:?} -> {last:?}");
}

#[test]
fn upstream_region_is_exact_constant() {
    // left of the characteristic through the jump the exact state is u_l = 2
    let mesh = SpaceTimeMesh::new(2.0, 0.55, 200, 55).unwrap();
    let out = run_time_sliced(&jump(1.0), StagePlan { t_stage: 0.55, t_keep: 0.5 }, &mesh).unwrap();
    let mut worst: f64 = 0.0;
    for (t, row) in out.times.iter().zip(&out.values) {
        for (x, u) in out.xs.iter().zip(row) {
            if *x < 0.2 + 0.25 * t - 20.0 * mesh.hx() {
                worst = worst.max((u - 2.0).abs());
            }
        }
    }
    assert!(worst < 0.05, "upstream deviation {worst}");
}
