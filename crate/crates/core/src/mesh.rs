//! Structured space-time and time meshes.
//!
//! Space-time nodes are numbered row-major with `x` varying fastest:
//! node `(i, j)` at `x = i·hx`, `t = j·ht` has id `j·(nx+1) + i`.
//! Element `(i, j)` has id `j·nx + i` and counter-clockwise connectivity
//! starting at its lower-left node.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Subset of {left, right, bottom, top} attached to a node.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryTags(u8);

impl BoundaryTags {
    pub const LEFT: BoundaryTags = BoundaryTags(1);
    pub const RIGHT: BoundaryTags = BoundaryTags(2);
    pub const BOTTOM: BoundaryTags = BoundaryTags(4);
    pub const TOP: BoundaryTags = BoundaryTags(8);

    pub fn empty() -> Self {
        BoundaryTags(0)
    }

    pub fn contains(self, other: BoundaryTags) -> bool {
        self.0 & other.0 == other.0 && other.0 != 0
    }

    pub fn insert(&mut self, other: BoundaryTags) {
        self.0 |= other.0;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    /// `left|bottom` style label; empty string for interior nodes.
    pub fn label(self) -> String {
        let names = [
            (Self::LEFT, "left"),
            (Self::RIGHT, "right"),
            (Self::BOTTOM, "bottom"),
            (Self::TOP, "top"),
        ];
        names
            .iter()
            .filter(|(t, _)| self.contains(*t))
            .map(|(_, n)| *n)
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// One side of the rectangular space-time domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub fn tag(self) -> BoundaryTags {
        match self {
            Side::Left => BoundaryTags::LEFT,
            Side::Right => BoundaryTags::RIGHT,
            Side::Bottom => BoundaryTags::BOTTOM,
            Side::Top => BoundaryTags::TOP,
        }
    }
}

/// Uniform quadrilateral mesh of `(0, L) × (0, T)`.
#[derive(Debug, Clone)]
pub struct SpaceTimeMesh {
    length: f64,
    duration: f64,
    nx: usize,
    nt: usize,
    nodes: Vec<[f64; 2]>,
    elements: Vec<[usize; 4]>,
    tags: Vec<BoundaryTags>,
}

impl SpaceTimeMesh {
    pub fn new(length: f64, duration: f64, nx: usize, nt: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) || !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid(format!(
                "mesh extents must be positive, got L={length}, T={duration}"
            )));
        }
        if nx == 0 || nt == 0 {
            return Err(Error::invalid(format!(
                "element counts must be at least 1, got {nx}×{nt}"
            )));
        }
        let mut nodes = Vec::with_capacity((nx + 1) * (nt + 1));
        let mut tags = Vec::with_capacity((nx + 1) * (nt + 1));
        for j in 0..=nt {
            let t = if j == nt {
                duration
            } else {
                duration * j as f64 / nt as f64
            };
            for i in 0..=nx {
                let x = if i == nx {
                    length
                } else {
                    length * i as f64 / nx as f64
                };
                nodes.push([x, t]);
                let mut tag = BoundaryTags::empty();
                if i == 0 {
                    tag.insert(BoundaryTags::LEFT);
                }
                if i == nx {
                    tag.insert(BoundaryTags::RIGHT);
                }
                if j == 0 {
                    tag.insert(BoundaryTags::BOTTOM);
                }
                if j == nt {
                    tag.insert(BoundaryTags::TOP);
                }
                tags.push(tag);
            }
        }
        let row = nx + 1;
        let mut elements = Vec::with_capacity(nx * nt);
        for j in 0..nt {
            for i in 0..nx {
                let n0 = j * row + i;
                elements.push([n0, n0 + 1, n0 + 1 + row, n0 + row]);
            }
        }
        Ok(SpaceTimeMesh {
            length,
            duration,
            nx,
            nt,
            nodes,
            elements,
            tags,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn hx(&self) -> f64 {
        self.length / self.nx as f64
    }

    pub fn ht(&self) -> f64 {
        self.duration / self.nt as f64
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> [f64; 2] {
        self.nodes[id]
    }

    pub fn elements(&self) -> &[[usize; 4]] {
        &self.elements
    }

    pub fn element(&self, e: usize) -> [usize; 4] {
        self.elements[e]
    }

    pub fn element_coords(&self, e: usize) -> [[f64; 2]; 4] {
        self.elements[e].map(|n| self.nodes[n])
    }

    pub fn tags(&self, node: usize) -> BoundaryTags {
        self.tags[node]
    }

    pub fn node_id(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    /// `(i, j)` grid indices of a node.
    pub fn node_ij(&self, id: usize) -> (usize, usize) {
        (id % (self.nx + 1), id / (self.nx + 1))
    }

    pub fn element_id(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn element_ij(&self, e: usize) -> (usize, usize) {
        (e % self.nx, e / self.nx)
    }

    /// Nodes carrying the given side tag.
    pub fn boundary_nodes(&self, side: Side) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&n| self.tags[n].contains(side.tag()))
            .collect()
    }

    /// Node ids of time row `j`, ordered by increasing `x`.
    pub fn row_nodes(&self, j: usize) -> std::ops::Range<usize> {
        let start = j * (self.nx + 1);
        start..start + self.nx + 1
    }

    /// Boundary edges on a side as `(element, local node pair)`, in increasing
    /// coordinate order along the side.
    pub fn boundary_edges(&self, side: Side) -> Vec<(usize, [usize; 2])> {
        match side {
            Side::Bottom => (0..self.nx).map(|i| (self.element_id(i, 0), [0, 1])).collect(),
            Side::Top => (0..self.nx)
                .map(|i| (self.element_id(i, self.nt - 1), [3, 2]))
                .collect(),
            Side::Left => (0..self.nt).map(|j| (self.element_id(0, j), [0, 3])).collect(),
            Side::Right => (0..self.nt)
                .map(|j| (self.element_id(self.nx - 1, j), [1, 2]))
                .collect(),
        }
    }

    /// Position of every node in a numbering that runs along the shorter
    /// grid direction, which minimises the bandwidth of assembled systems.
    pub fn band_order(&self) -> Vec<usize> {
        if self.nx <= self.nt {
            (0..self.node_count()).collect()
        } else {
            let col = self.nt + 1;
            (0..self.node_count())
                .map(|n| {
                    let (i, j) = self.node_ij(n);
                    i * col + j
                })
                .collect()
        }
    }

    /// Largest difference in [`band_order`](Self::band_order) positions of
    /// two nodes sharing an element.
    pub fn node_bandwidth(&self) -> usize {
        self.nx.min(self.nt) + 2
    }

    /// CSV dump with columns `node_id,x,t,tags`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id,x,t,tags\n");
        for (id, [x, t]) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "{id},{x:.17e},{t:.17e},{}", self.tags[id].label());
        }
        out
    }
}

/// Uniform 1-D mesh of `(0, T)`.
#[derive(Debug, Clone)]
pub struct TimeMesh {
    duration: f64,
    nodes: Vec<f64>,
}

impl TimeMesh {
    pub fn new(duration: f64, elements: usize) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid(format!(
                "time mesh length must be positive, got {duration}"
            )));
        }
        if elements == 0 {
            return Err(Error::invalid("time mesh needs at least one element"));
        }
        let nodes = (0..=elements)
            .map(|a| {
                if a == elements {
                    duration
                } else {
                    duration * a as f64 / elements as f64
                }
            })
            .collect();
        Ok(TimeMesh { duration, nodes })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn element(&self, e: usize) -> [f64; 2] {
        [self.nodes[e], self.nodes[e + 1]]
    }
}
