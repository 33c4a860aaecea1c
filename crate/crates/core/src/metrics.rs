//! Error measures: pointwise percent error, rms-normalised local and global
//! errors, and the relative vector error for angular velocities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{NodalField, GAUSS_2};
use crate::mesh::SpaceTimeMesh;

/// References with magnitude below this are excluded from percent errors.
pub const REFERENCE_FLOOR: f64 = 1e-12;

/// `|u − u_ref| / |u_ref| · 100` per entry; `None` where the reference is
/// too small for the ratio to mean anything.
pub fn pct_error(u: &[f64], u_ref: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(u.len(), u_ref.len());
    u.iter()
        .zip(u_ref)
        .map(|(&v, &r)| (r.abs() >= REFERENCE_FLOOR).then(|| ((v - r) / r).abs() * 100.0))
        .collect()
}

/// Summary of an error field restricted to a retained region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub pointwise: Vec<Option<f64>>,
    pub max_pointwise: f64,
    pub excluded: usize,
    pub err2_series: Vec<(f64, f64)>,
    pub max_err2: f64,
    pub notes: String,
}

impl ErrorReport {
    pub fn new(pointwise: Vec<Option<f64>>, err2_series: Vec<(f64, f64)>, notes: impl Into<String>) -> Self {
        let max_pointwise = pointwise.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        let excluded = pointwise.iter().filter(|v| v.is_none()).count();
        let max_err2 = err2_series.iter().fold(0.0f64, |a, &(_, e)| a.max(e));
        Self {
            pointwise,
            max_pointwise,
            excluded,
            err2_series,
            max_err2,
            notes: notes.into(),
        }
    }
}

/// Number of node rows with `t ≤ t_keep`.
pub fn retained_rows(mesh: &SpaceTimeMesh, t_keep: f64) -> usize {
    let rows = ((t_keep / mesh.ht()) + 1e-9).floor() as usize + 1;
    rows.min(mesh.nt() + 1)
}

/// `√((1/L)∫₀ᴸ f² dx)` with two Gauss points per element of the mesh row.
fn rms_on_row(mesh: &SpaceTimeMesh, f: impl Fn(usize, f64) -> f64) -> f64 {
    let hx = mesh.hx();
    let mut sum = 0.0;
    for i in 0..mesh.nx() {
        for g in [-GAUSS_2, GAUSS_2] {
            let s = 0.5 * (1.0 + g);
            let v = f(i, s);
            sum += 0.5 * hx * v * v;
        }
    }
    (sum / mesh.length()).sqrt()
}

fn row_values(mesh: &SpaceTimeMesh, u: &NodalField, j: usize) -> Vec<f64> {
    mesh.row_nodes(j).map(|n| u.values[n]).collect()
}

fn exact_rms(mesh: &SpaceTimeMesh, t: f64, exact: &impl Fn(f64, f64) -> f64) -> Result<f64> {
    let hx = mesh.hx();
    let r = rms_on_row(mesh, |i, s| exact((i as f64 + s) * hx, t));
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Undefined(format!("rms of the reference vanishes at t = {t}")));
    }
    Ok(r)
}

/// `err₁(x_i, t_j) = |u − uᵉ| / rms(uᵉ, t_j) · 100` at the nodes of row `j`.
pub fn err1(mesh: &SpaceTimeMesh, u: &NodalField, exact: impl Fn(f64, f64) -> f64, j: usize) -> Result<Vec<f64>> {
    let t = mesh.node(mesh.node_id(0, j))[1];
    let r = exact_rms(mesh, t, &exact)?;
    Ok(mesh
        .row_nodes(j)
        .map(|n| {
            let [x, t] = mesh.node(n);
            (u.values[n] - exact(x, t)).abs() / r * 100.0
        })
        .collect())
}

/// `err₂(t_j) = rms(u − uᵉ, t_j) / rms(uᵉ, t_j) · 100` for rows `0..rows`,
/// with `u` interpolated linearly between nodes.
pub fn err2(
    mesh: &SpaceTimeMesh,
    u: &NodalField,
    exact: impl Fn(f64, f64) -> f64,
    rows: usize,
) -> Result<Vec<(f64, f64)>> {
    let hx = mesh.hx();
    (0..rows)
        .map(|j| {
            let t = mesh.node(mesh.node_id(0, j))[1];
            let vals = row_values(mesh, u, j);
            let r = exact_rms(mesh, t, &exact)?;
            let d = rms_on_row(mesh, |i, s| {
                let uh = (1.0 - s) * vals[i] + s * vals[i + 1];
                uh - exact((i as f64 + s) * hx, t)
            });
            Ok((t, d / r * 100.0))
        })
        .collect()
}

/// `100 · |ω − ωᵉ| / |ωᵉ|` per time level.
pub fn err_omega(omega: &[[f64; 3]], reference: &[[f64; 3]]) -> Result<Vec<f64>> {
    if omega.len() != reference.len() {
        return Err(Error::invalid("series lengths differ"));
    }
    omega
        .iter()
        .zip(reference)
        .enumerate()
        .map(|(n, (w, r))| {
            let num: f64 = (0..3).map(|i| (w[i] - r[i]).powi(2)).sum();
            let den: f64 = r.iter().map(|v| v * v).sum();
            if den == 0.0 {
                return Err(Error::Undefined(format!("zero reference vector at sample {n}")));
            }
            Ok(100.0 * (num / den).sqrt())
        })
        .collect()
}
