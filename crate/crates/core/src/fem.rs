//! Bilinear/linear shape functions, two-point Gauss rules, block assembly
//! and Dirichlet elimination.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, BandMatrix, Solved};
use crate::mesh::{Side, SpaceTimeMesh};

/// Parent coordinates of the bilinear element nodes, counter-clockwise.
pub const PARENT_NODES: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

/// Abscissa of the two-point Gauss rule on `[-1, 1]`.
pub const GAUSS_2: f64 = 0.577_350_269_189_625_8;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

/// Two-point rule per direction; for `dim = 1` the second coordinate is zero.
pub fn gauss_rule(dim: usize) -> Result<QuadratureRule> {
    let g = [-GAUSS_2, GAUSS_2];
    match dim {
        1 => Ok(QuadratureRule {
            points: g.iter().map(|&p| [p, 0.0]).collect(),
            weights: vec![1.0, 1.0],
        }),
        2 => Ok(QuadratureRule {
            // tensor product, xi fastest
            points: g.iter().flat_map(|&e| g.iter().map(move |&x| [x, e])).collect(),
            weights: vec![1.0; 4],
        }),
        d => Err(Error::invalid(format!("quadrature dimension must be 1 or 2, got {d}"))),
    }
}

/// Shape function values and physical gradients at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShapeEval {
    pub values: [f64; 4],
    pub grad_x: [f64; 4],
    pub grad_t: [f64; 4],
}

/// Evaluates the bilinear shape functions at a parent point; returns the
/// Jacobian determinant alongside.
pub fn eval_shapes_quad(coords: &[[f64; 2]; 4], xi: f64, eta: f64) -> Result<(ShapeEval, f64)> {
    let mut values = [0.0; 4];
    let mut d_xi = [0.0; 4];
    let mut d_eta = [0.0; 4];
    for (a, [pa, qa]) in PARENT_NODES.iter().enumerate() {
        values[a] = 0.25 * (1.0 + pa * xi) * (1.0 + qa * eta);
        d_xi[a] = 0.25 * pa * (1.0 + qa * eta);
        d_eta[a] = 0.25 * qa * (1.0 + pa * xi);
    }
    let (mut j11, mut j12, mut j21, mut j22) = (0.0, 0.0, 0.0, 0.0);
    for a in 0..4 {
        j11 += d_xi[a] * coords[a][0];
        j12 += d_xi[a] * coords[a][1];
        j21 += d_eta[a] * coords[a][0];
        j22 += d_eta[a] * coords[a][1];
    }
    let det = j11 * j22 - j12 * j21;
    let scale = (j11.abs() + j12.abs()) * (j21.abs() + j22.abs());
    if !(det > 1e-14 * scale) || !det.is_finite() {
        return Err(Error::Degenerate(format!(
            "Jacobian determinant {det:e} at parent point ({xi}, {eta})"
        )));
    }
    let mut grad_x = [0.0; 4];
    let mut grad_t = [0.0; 4];
    for a in 0..4 {
        grad_x[a] = (j22 * d_xi[a] - j12 * d_eta[a]) / det;
        grad_t[a] = (-j21 * d_xi[a] + j11 * d_eta[a]) / det;
    }
    Ok((
        ShapeEval {
            values,
            grad_x,
            grad_t,
        },
        det,
    ))
}

/// Linear shape functions on `[t0, t1]` at parent coordinate `xi`:
/// `(values, derivatives)`.
pub fn eval_shapes_line(t0: f64, t1: f64, xi: f64) -> ([f64; 2], [f64; 2]) {
    let h = t1 - t0;
    ([0.5 * (1.0 - xi), 0.5 * (1.0 + xi)], [-1.0 / h, 1.0 / h])
}

/// Quadrature point with physical location, shapes and `weight · det J`.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub x: f64,
    pub t: f64,
    pub weight: f64,
    pub shape: ShapeEval,
}

/// The four Gauss points of an element, ordered as in [`gauss_rule`]`(2)`.
pub fn element_quadrature(mesh: &SpaceTimeMesh, e: usize) -> Result<[QuadPoint; 4]> {
    let coords = mesh.element_coords(e);
    let rule = gauss_rule(2)?;
    let mut out = [QuadPoint {
        x: 0.0,
        t: 0.0,
        weight: 0.0,
        shape: ShapeEval::default(),
    }; 4];
    for (q, (p, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
        let (shape, det) = eval_shapes_quad(&coords, p[0], p[1])?;
        let x = (0..4).map(|a| shape.values[a] * coords[a][0]).sum();
        let t = (0..4).map(|a| shape.values[a] * coords[a][1]).sum();
        out[q] = QuadPoint {
            x,
            t,
            weight: w * det,
            shape,
        };
    }
    Ok(out)
}

/// Values attached to the Gauss points of every element, element-major.
pub type GaussSamples = Vec<[f64; 4]>;

/// Scalar field in the continuous bilinear space, one value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    pub values: Vec<f64>,
}

impl NodalField {
    pub fn new(values: Vec<f64>) -> Self {
        NodalField { values }
    }

    pub fn from_fn(mesh: &SpaceTimeMesh, f: impl Fn(f64, f64) -> f64) -> Self {
        NodalField {
            values: mesh.nodes().iter().map(|&[x, t]| f(x, t)).collect(),
        }
    }

    /// `(value, ∂x, ∂t)` of the interpolant at a quadrature point of element `e`.
    pub fn eval(&self, mesh: &SpaceTimeMesh, e: usize, shape: &ShapeEval) -> (f64, f64, f64) {
        let nodes = mesh.element(e);
        let mut v = 0.0;
        let mut gx = 0.0;
        let mut gt = 0.0;
        for a in 0..4 {
            let d = self.values[nodes[a]];
            v += d * shape.values[a];
            gx += d * shape.grad_x[a];
            gt += d * shape.grad_t[a];
        }
        (v, gx, gt)
    }

    /// Value of the interpolant at an arbitrary point of the rectangle.
    pub fn value_at(&self, mesh: &SpaceTimeMesh, x: f64, t: f64) -> f64 {
        let hx = mesh.hx();
        let ht = mesh.ht();
        let i = ((x / hx).floor() as isize).clamp(0, mesh.nx() as isize - 1) as usize;
        let j = ((t / ht).floor() as isize).clamp(0, mesh.nt() as isize - 1) as usize;
        let xi = 2.0 * (x - i as f64 * hx) / hx - 1.0;
        let eta = 2.0 * (t - j as f64 * ht) / ht - 1.0;
        let nodes = mesh.element(mesh.element_id(i, j));
        PARENT_NODES
            .iter()
            .zip(nodes)
            .map(|([p, q], n)| 0.25 * (1.0 + p * xi) * (1.0 + q * eta) * self.values[n])
            .sum()
    }
}

/// Element matrix and vector over `(local node, field)` dofs, `a·n_fields + f`.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    pub n_fields: usize,
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl LocalSystem {
    pub fn new(n_fields: usize) -> Self {
        let n = 4 * n_fields;
        LocalSystem {
            n_fields,
            matrix: vec![0.0; n * n],
            rhs: vec![0.0; n],
        }
    }

    fn clear(&mut self) {
        self.matrix.iter_mut().for_each(|v| *v = 0.0);
        self.rhs.iter_mut().for_each(|v| *v = 0.0);
    }

    #[inline]
    pub fn add(&mut self, a: usize, f: usize, b: usize, g: usize, v: f64) {
        let n = 4 * self.n_fields;
        self.matrix[(a * self.n_fields + f) * n + b * self.n_fields + g] += v;
    }

    #[inline]
    pub fn add_rhs(&mut self, a: usize, f: usize, v: f64) {
        self.rhs[a * self.n_fields + f] += v;
    }
}

/// Element-level contributions supplied to [`assemble`].
pub trait ElementKernel {
    fn n_fields(&self) -> usize;

    /// Volume integrals over element `e`, accumulated into `local`.
    fn volume(&self, e: usize, points: &[QuadPoint; 4], local: &mut LocalSystem);

    /// Sides carrying line-integral loads.
    fn loaded_sides(&self) -> Vec<Side> {
        Vec::new()
    }

    /// Load density per field at a boundary point; the assembler integrates
    /// `∫ N^A · load_f` along the side.
    fn edge_load(&self, _side: Side, _x: f64, _t: f64, _load: &mut [f64]) {}
}

/// Global system over `(node, field)` dofs with Dirichlet bookkeeping.
///
/// Dof `node·n_fields + field` addresses the public API; internally rows are
/// stored in the mesh's bandwidth-minimising order.
#[derive(Debug, Clone)]
pub struct BlockLinearSystem {
    n_fields: usize,
    position: Vec<usize>,
    matrix: BandMatrix,
    rhs: Vec<f64>,
    constrained: BTreeMap<usize, f64>,
}

impl BlockLinearSystem {
    pub fn new(mesh: &SpaceTimeMesh, n_fields: usize) -> Self {
        let n = mesh.node_count() * n_fields;
        let bw = (mesh.node_bandwidth() + 1) * n_fields - 1;
        BlockLinearSystem {
            n_fields,
            position: mesh.band_order(),
            matrix: BandMatrix::zeros(n, bw, bw),
            rhs: vec![0.0; n],
            constrained: BTreeMap::new(),
        }
    }

    pub fn n_fields(&self) -> usize {
        self.n_fields
    }

    pub fn dof_count(&self) -> usize {
        self.rhs.len()
    }

    pub fn dof(&self, node: usize, field: usize) -> usize {
        node * self.n_fields + field
    }

    #[inline]
    fn row(&self, dof: usize) -> usize {
        self.position[dof / self.n_fields] * self.n_fields + dof % self.n_fields
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(self.row(i), self.row(j))
    }

    pub fn add_entry(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = (self.row(i), self.row(j));
        self.matrix.add(r, c, v);
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn add_rhs(&mut self, i: usize, v: f64) {
        self.rhs[i] += v;
    }

    pub fn constraints(&self) -> &BTreeMap<usize, f64> {
        &self.constrained
    }

    /// Prescribes `value` at `dof`; a second, different value for the same
    /// dof is rejected.
    pub fn constrain(&mut self, dof: usize, value: f64) -> Result<()> {
        if dof >= self.dof_count() {
            return Err(Error::invalid(format!(
                "constraint dof {dof} out of range ({} dofs)",
                self.dof_count()
            )));
        }
        if !value.is_finite() {
            return Err(Error::invalid(format!("non-finite constraint value at dof {dof}")));
        }
        match self.constrained.get(&dof) {
            Some(&old) if (old - value).abs() > 1e-12 * old.abs().max(value.abs()).max(1.0) => {
                Err(Error::invalid(format!(
                    "conflicting constraints on dof {dof}: {old} vs {value}"
                )))
            }
            Some(_) => Ok(()),
            None => {
                self.constrained.insert(dof, value);
                Ok(())
            }
        }
    }

    /// `A x` for a full dof vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut xr = vec![0.0; x.len()];
        for (d, &v) in x.iter().enumerate() {
            xr[self.row(d)] = v;
        }
        let yr = self.matrix.matvec(&xr);
        (0..x.len()).map(|d| yr[self.row(d)]).collect()
    }
}

/// Scatter-adds element kernels over the mesh, including boundary loads.
pub fn assemble(mesh: &SpaceTimeMesh, kernel: &dyn ElementKernel) -> Result<BlockLinearSystem> {
    let nf = kernel.n_fields();
    if nf == 0 {
        return Err(Error::invalid("kernel must have at least one field"));
    }
    let mut system = BlockLinearSystem::new(mesh, nf);
    let mut local = LocalSystem::new(nf);
    let n_local = 4 * nf;
    for e in 0..mesh.element_count() {
        let points = element_quadrature(mesh, e)?;
        local.clear();
        kernel.volume(e, &points, &mut local);
        if let Some(bad) = local.matrix.iter().chain(&local.rhs).find(|v| !v.is_finite()) {
            return Err(Error::Assembly {
                element: e,
                detail: format!("entry {bad}"),
            });
        }
        let nodes = mesh.element(e);
        for la in 0..n_local {
            let gi = system.dof(nodes[la / nf], la % nf);
            for lb in 0..n_local {
                let v = local.matrix[la * n_local + lb];
                if v != 0.0 {
                    let gj = system.dof(nodes[lb / nf], lb % nf);
                    system.add_entry(gi, gj, v);
                }
            }
            system.add_rhs(gi, local.rhs[la]);
        }
    }

    let rule = gauss_rule(1)?;
    let mut load = vec![0.0; nf];
    for side in kernel.loaded_sides() {
        for (e, pair) in mesh.boundary_edges(side) {
            let nodes = mesh.element(e);
            let [p0, p1] = pair.map(|a| mesh.node(nodes[a]));
            let len = ((p1[0] - p0[0]).powi(2) + (p1[1] - p0[1]).powi(2)).sqrt();
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let s = [0.5 * (1.0 - p[0]), 0.5 * (1.0 + p[0])];
                let x = s[0] * p0[0] + s[1] * p1[0];
                let t = s[0] * p0[1] + s[1] * p1[1];
                load.iter_mut().for_each(|v| *v = 0.0);
                kernel.edge_load(side, x, t, &mut load);
                if let Some(bad) = load.iter().find(|v| !v.is_finite()) {
                    return Err(Error::Assembly {
                        element: e,
                        detail: format!("boundary load {bad} on {side:?}"),
                    });
                }
                for (k, &a) in pair.iter().enumerate() {
                    for (f, &g) in load.iter().enumerate() {
                        let d = system.dof(nodes[a], f);
                        system.add_rhs(d, w * 0.5 * len * s[k] * g);
                    }
                }
            }
        }
    }
    Ok(system)
}

/// Free-dof system left after eliminating the constraints.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: BandMatrix,
    pub rhs: Vec<f64>,
    /// Full-system dof of each reduced unknown.
    pub free: Vec<usize>,
    prescribed: Vec<f64>,
}

impl ReducedSystem {
    /// Inserts reduced unknowns into a full dof vector carrying the
    /// prescribed values.
    pub fn recover(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = self.prescribed.clone();
        for (&d, &v) in self.free.iter().zip(reduced) {
            full[d] = v;
        }
        full
    }
}

/// Symmetric elimination: constrained rows and columns are removed and
/// their known values moved to the right-hand side.
pub fn apply_dirichlet(system: &BlockLinearSystem) -> ReducedSystem {
    let n = system.dof_count();
    let mut dof_of_row = vec![0; n];
    for d in 0..n {
        dof_of_row[system.row(d)] = d;
    }
    let mut prescribed = vec![0.0; n];
    for (&d, &v) in &system.constrained {
        prescribed[d] = v;
    }
    let mut reduced_index = vec![usize::MAX; n];
    let mut free = Vec::with_capacity(n - system.constrained.len());
    for r in 0..n {
        let d = dof_of_row[r];
        if !system.constrained.contains_key(&d) {
            reduced_index[r] = free.len();
            free.push(d);
        }
    }
    let kl = system.matrix.lower_bandwidth();
    let ku = system.matrix.upper_bandwidth();
    let mut matrix = BandMatrix::zeros(free.len(), kl, ku);
    let mut rhs = Vec::with_capacity(free.len());
    for r in 0..n {
        let ri = reduced_index[r];
        if ri == usize::MAX {
            continue;
        }
        let mut b = system.rhs[dof_of_row[r]];
        for (c, a) in system.matrix.row(r) {
            if a == 0.0 {
                continue;
            }
            let ci = reduced_index[c];
            if ci == usize::MAX {
                b -= a * prescribed[dof_of_row[c]];
            } else {
                matrix.add(ri, ci, a);
            }
        }
        rhs.push(b);
    }
    ReducedSystem {
        matrix,
        rhs,
        free,
        prescribed,
    }
}

/// Direct solve of the reduced system with the residual check.
pub fn solve_linear(reduced: &ReducedSystem) -> Result<Solved> {
    linalg::solve_checked(&reduced.matrix, &reduced.rhs)
}

/// Eliminates constraints, solves, and returns the full dof vector with the
/// relative residual of the reduced solve.
pub fn solve_constrained(system: &BlockLinearSystem) -> Result<(Vec<f64>, f64)> {
    let reduced = apply_dirichlet(system);
    let solved = solve_linear(&reduced)?;
    Ok((reduced.recover(&solved.x), solved.relative_residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> [[f64; 2]; 4] {
        [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    }

    #[test]
    fn centroid_and_corner_values() {
        let (s, det) = eval_shapes_quad(&unit_square(), 0.0, 0.0).unwrap();
        assert!(s.values.iter().all(|&v| (v - 0.25).abs() < 1e-16));
        assert!((det - 0.25).abs() < 1e-16);
        let (s, _) = eval_shapes_quad(&unit_square(), -1.0, -1.0).unwrap();
        assert_eq!(s.values, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_of_node_one_at_centroid() {
        let (hx, ht) = (0.3, 0.07);
        let c = [[1.0, 2.0], [1.0 + hx, 2.0], [1.0 + hx, 2.0 + ht], [1.0, 2.0 + ht]];
        let (s, _) = eval_shapes_quad(&c, 0.0, 0.0).unwrap();
        assert!((s.grad_x[1] - 1.0 / (2.0 * hx)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_element_is_rejected() {
        let c = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
        assert!(matches!(eval_shapes_quad(&c, 0.0, 0.0), Err(Error::Degenerate(_))));
        // clockwise ordering flips the determinant sign
        let c = [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        assert!(eval_shapes_quad(&c, 0.0, 0.0).is_err());
    }

    #[test]
    fn gauss_rules() {
        let r1 = gauss_rule(1).unwrap();
        assert_eq!(r1.weights, vec![1.0, 1.0]);
        assert!((r1.points[1][0] - 0.5773502691896258).abs() < 1e-16);
        let x2: f64 = r1.points.iter().zip(&r1.weights).map(|(p, w)| w * p[0] * p[0]).sum();
        assert!((x2 - 2.0 / 3.0).abs() < 1e-15);
        let r2 = gauss_rule(2).unwrap();
        assert_eq!(r2.points.len(), 4);
        assert_eq!(r2.weights.iter().sum::<f64>(), 4.0);
        assert!(gauss_rule(3).is_err());
    }

    #[test]
    fn partition_of_unity_on_every_quadrature_point() {
        let mesh = SpaceTimeMesh::new(1.3, 0.4, 5, 3).unwrap();
        for e in 0..mesh.element_count() {
            for q in element_quadrature(&mesh, e).unwrap() {
                let s = q.shape;
                assert!((s.values.iter().sum::<f64>() - 1.0).abs() < 1e-13);
                assert!(s.grad_x.iter().sum::<f64>().abs() < 1e-13);
                assert!(s.grad_t.iter().sum::<f64>().abs() < 1e-13);
            }
        }
    }

    struct Mass;
    impl ElementKernel for Mass {
        fn n_fields(&self) -> usize {
            1
        }
        fn volume(&self, _e: usize, pts: &[QuadPoint; 4], local: &mut LocalSystem) {
            for q in pts {
                for a in 0..4 {
                    for b in 0..4 {
                        local.add(a, 0, b, 0, q.weight * q.shape.values[a] * q.shape.values[b]);
                    }
                }
            }
        }
    }

    struct Source;
    impl ElementKernel for Source {
        fn n_fields(&self) -> usize {
            1
        }
        fn volume(&self, _e: usize, pts: &[QuadPoint; 4], local: &mut LocalSystem) {
            for q in pts {
                for a in 0..4 {
                    local.add_rhs(a, 0, q.weight * q.shape.values[a]);
                }
            }
        }
    }

    struct Zero;
    impl ElementKernel for Zero {
        fn n_fields(&self) -> usize {
            2
        }
        fn volume(&self, _e: usize, _pts: &[QuadPoint; 4], _local: &mut LocalSystem) {}
    }

    struct Broken;
    impl ElementKernel for Broken {
        fn n_fields(&self) -> usize {
            1
        }
        fn volume(&self, e: usize, _pts: &[QuadPoint; 4], local: &mut LocalSystem) {
            if e == 2 {
                local.add(0, 0, 0, 0, f64::NAN);
            }
        }
    }

    #[test]
    fn mass_row_sums_equal_quarter_area() {
        let mesh = SpaceTimeMesh::new(1.0, 1.0, 1, 1).unwrap();
        let sys = assemble(&mesh, &Mass).unwrap();
        for a in 0..4 {
            let s: f64 = (0..4).map(|b| sys.entry(a, b)).sum();
            assert!((s - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_kernel_gives_zero_matrix() {
        let mesh = SpaceTimeMesh::new(1.0, 1.0, 2, 2).unwrap();
        let sys = assemble(&mesh, &Zero).unwrap();
        for i in 0..sys.dof_count() {
            for j in 0..sys.dof_count() {
                assert_eq!(sys.entry(i, j), 0.0);
            }
        }
    }

    #[test]
    fn shared_nodes_collect_both_elements() {
        let mesh = SpaceTimeMesh::new(2.0, 1.0, 2, 1).unwrap();
        let sys = assemble(&mesh, &Source).unwrap();
        // each element of area 1 gives 1/4 per node
        assert!((sys.rhs()[0] - 0.25).abs() < 1e-15);
        assert!((sys.rhs()[1] - 0.5).abs() < 1e-15);
        assert!((sys.rhs()[4] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_finite_kernel_identifies_element() {
        let mesh = SpaceTimeMesh::new(1.0, 1.0, 2, 2).unwrap();
        match assemble(&mesh, &Broken) {
            Err(Error::Assembly { element, .. }) => assert_eq!(element, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    /// Three-dof 1-D Laplacian assembled by hand.
    fn laplace3(mesh: &SpaceTimeMesh) -> BlockLinearSystem {
        let mut sys = BlockLinearSystem::new(mesh, 1);
        let k = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        for (i, row) in k.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    sys.add_entry(i, j, v);
                }
            }
        }
        for d in 3..6 {
            sys.add_entry(d, d, 1.0);
        }
        sys
    }

    #[test]
    fn laplace_with_fixed_ends() {
        let mesh = SpaceTimeMesh::new(1.0, 1.0, 2, 1).unwrap();
        let mut sys = laplace3(&mesh);
        sys.constrain(0, 0.0).unwrap();
        sys.constrain(2, 1.0).unwrap();
        let (x, _) = solve_constrained(&sys).unwrap();
        assert!((x[1] - 0.5).abs() < 1e-15);
        assert_eq!(x[0], 0.0);
        assert_eq!(x[2], 1.0);
    }

    #[test]
    fn all_constrained_and_unconstrained() {
        let mesh = SpaceTimeMesh::new(1.0, 1.0, 2, 1).unwrap();
        let mut sys = laplace3(&mesh);
        for (d, v) in [(0, 0.3), (1, -0.7), (2, 0.1), (3, 2.0), (4, 1.0), (5, 0.5)] {
            sys.constrain(d, v).unwrap();
        }
        let reduced = apply_dirichlet(&sys);
        assert!(reduced.free.is_empty());
        let x = reduced.recover(&[]);
        assert_eq!(x, vec![0.3, -0.7, 0.1, 2.0, 1.0, 0.5]);

        // no constraints: reduced system is the full system
        let mesh = SpaceTimeMesh::new(1.0, 1.0, 1, 1).unwrap();
        let sys = assemble(&mesh, &Mass).unwrap();
        let reduced = apply_dirichlet(&sys);
        assert_eq!(reduced.free.len(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let (fi, fj) = (reduced.free[i], reduced.free[j]);
                assert_eq!(reduced.matrix.get(i, j), sys.entry(fi, fj));
            }
        }
    }

    #[test]
    fn conflicting_constraints_rejected() {
        let mesh = SpaceTimeMesh::new(1.0, 1.0, 1, 1).unwrap();
        let mut sys = BlockLinearSystem::new(&mesh, 1);
        sys.constrain(1, 2.0).unwrap();
        sys.constrain(1, 2.0).unwrap();
        assert!(sys.constrain(1, 2.5).is_err());
        assert!(sys.constrain(99, 0.0).is_err());
    }

    #[test]
    fn nodal_field_interpolates_bilinear_functions() {
        let mesh = SpaceTimeMesh::new(2.0, 1.0, 4, 3).unwrap();
        let f = |x: f64, t: f64| 1.0 + 2.0 * x - t + 0.5 * x * t;
        let field = NodalField::from_fn(&mesh, f);
        for &(x, t) in &[(0.1, 0.2), (1.99, 0.95), (0.73, 0.5)] {
            assert!((field.value_at(&mesh, x, t) - f(x, t)).abs() < 1e-13);
        }
        let e = 5;
        let q = element_quadrature(&mesh, e).unwrap();
        let (v, gx, gt) = field.eval(&mesh, e, &q[0].shape);
        assert!((v - f(q[0].x, q[0].t)).abs() < 1e-13);
        assert!((gx - (2.0 + 0.5 * q[0].t)).abs() < 1e-12);
        assert!((gt - (-1.0 + 0.5 * q[0].x)).abs() < 1e-12);
    }
}
