//! L2 projection of Gauss-point data onto the continuous finite element
//! space, with known primal values pinned at nodes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fem::{self, ElementKernel, GaussSamples, LocalSystem, NodalField, QuadPoint};
use crate::linalg::{self, BandMatrix};
use crate::mesh::{SpaceTimeMesh, TimeMesh};

/// Space-time projection input.
#[derive(Debug, Clone)]
pub struct ProjectionJob<'a> {
    pub mesh: &'a SpaceTimeMesh,
    pub samples: &'a GaussSamples,
    pub pinned: BTreeMap<usize, f64>,
}

struct MassWithSamples<'a> {
    samples: &'a GaussSamples,
}

impl ElementKernel for MassWithSamples<'_> {
    fn n_fields(&self) -> usize {
        1
    }

    fn volume(&self, e: usize, points: &[QuadPoint; 4], local: &mut LocalSystem) {
        for (q, p) in points.iter().enumerate() {
            let u = self.samples[e][q];
            for a in 0..4 {
                let wa = p.weight * p.shape.values[a];
                local.add_rhs(a, 0, wa * u);
                for b in 0..4 {
                    local.add(a, 0, b, 0, wa * p.shape.values[b]);
                }
            }
        }
    }
}

pub fn l2_project(job: &ProjectionJob<'_>) -> Result<NodalField> {
    let mesh = job.mesh;
    if job.samples.len() != mesh.element_count() {
        return Err(Error::invalid(format!(
            "{} sample groups for {} elements",
            job.samples.len(),
            mesh.element_count()
        )));
    }
    let mut system = fem::assemble(mesh, &MassWithSamples { samples: job.samples })?;
    for (&node, &value) in &job.pinned {
        if node >= mesh.node_count() {
            return Err(Error::invalid(format!("pinned node {node} out of range")));
        }
        if mesh.tags(node).is_empty() {
            return Err(Error::invalid(format!("pinned node {node} is not on the boundary")));
        }
        system.constrain(node, value)?;
    }
    let (values, _) = fem::solve_constrained(&system)?;
    Ok(NodalField::new(values))
}

/// Projects several components sampled at the two Gauss points of every
/// element of a time mesh. `pinned` maps node → known component values.
pub fn l2_project_time<const C: usize>(
    mesh: &TimeMesh,
    samples: &[[[f64; C]; 2]],
    pinned: &BTreeMap<usize, [f64; C]>,
) -> Result<Vec<[f64; C]>> {
    let ne = mesh.element_count();
    if samples.len() != ne {
        return Err(Error::invalid(format!(
            "{} sample pairs for {} elements",
            samples.len(),
            ne
        )));
    }
    let nn = mesh.node_count();
    let mut mass = BandMatrix::zeros(nn, 1, 1);
    let mut rhs = vec![[0.0; C]; nn];
    let gauss = [-fem::GAUSS_2, fem::GAUSS_2];
    for e in 0..ne {
        let [t0, t1] = mesh.element(e);
        let half = 0.5 * (t1 - t0);
        for (q, &xi) in gauss.iter().enumerate() {
            let (n, _) = fem::eval_shapes_line(t0, t1, xi);
            for a in 0..2 {
                for b in 0..2 {
                    mass.add(e + a, e + b, half * n[a] * n[b]);
                }
                for c in 0..C {
                    rhs[e + a][c] += half * n[a] * samples[e][q][c];
                }
            }
        }
    }
    for &node in pinned.keys() {
        if node >= nn {
            return Err(Error::invalid(format!("pinned node {node} out of range")));
        }
    }
    let free: Vec<usize> = (0..nn).filter(|a| !pinned.contains_key(a)).collect();
    let mut index = vec![usize::MAX; nn];
    for (k, &a) in free.iter().enumerate() {
        index[a] = k;
    }
    let mut reduced = BandMatrix::zeros(free.len(), 1, 1);
    let mut out = vec![[0.0; C]; nn];
    for (&a, value) in pinned {
        out[a] = *value;
    }
    let mut b = vec![vec![0.0; free.len()]; C];
    for (k, &a) in free.iter().enumerate() {
        for c in 0..C {
            b[c][k] = rhs[a][c];
        }
        for (col, m) in mass.row(a) {
            if index[col] == usize::MAX {
                for c in 0..C {
                    b[c][k] -= m * out[col][c];
                }
            } else {
                reduced.add(k, index[col], m);
            }
        }
    }
    if !free.is_empty() {
        let lu = linalg::BandLu::factor(&reduced)?;
        for (c, bc) in b.iter().enumerate() {
            let x = lu.solve(bc);
            let rel = linalg::relative_residual(&reduced, &x, bc);
            if !(rel <= linalg::RESIDUAL_LIMIT) {
                return Err(Error::Residual {
                    relative: rel,
                    limit: linalg::RESIDUAL_LIMIT,
                });
            }
            for (k, &a) in free.iter().enumerate() {
                out[a][c] = x[k];
            }
        }
    }
    Ok(out)
}

/// Samples a closed-form function at the Gauss points of every element.
pub fn sample_gauss(mesh: &SpaceTimeMesh, f: impl Fn(f64, f64) -> f64) -> Result<GaussSamples> {
    (0..mesh.element_count())
        .map(|e| {
            let q = fem::element_quadrature(mesh, e)?;
            Ok(q.map(|p| f(p.x, p.t)))
        })
        .collect()
}
