//! Banded storage and a direct LU solver with partial pivoting.
//!
//! All linear systems in this crate come from structured meshes, so the
//! matrices are banded once the unknowns are numbered along the shorter
//! mesh direction. Row interchanges can widen the upper band by `kl`; the
//! factorization allocates that fill up front.

use crate::error::{Error, Result};

/// Relative residual accepted by [`solve_checked`].
pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// Square matrix with `kl` sub-diagonals and `ku` super-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandMatrix {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.n && j < self.n && self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    /// Adds `v` to entry `(i, j)`.
    ///
    /// Panics if the entry lies outside the band; the bandwidth is a
    /// property of the numbering and a miss is a programming error.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            i < self.n && j < self.n && self.in_band(i, j),
            "entry ({i}, {j}) outside band (n={}, kl={}, ku={})",
            self.n,
            self.kl,
            self.ku
        );
        let k = self.offset(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.n && j < self.n && self.in_band(i, j));
        let k = self.offset(i, j);
        self.data[k] = v;
    }

    /// Iterates the stored columns of row `i` as `(j, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        (lo..=hi).map(move |j| (j, self.data[self.offset(i, j)]))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).map(|(j, a)| a * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// LU factors of a [`BandMatrix`], stored LAPACK `gbtrf` style: `A = P1 L1 P2 L2 ... U`.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    width: usize,
    upper: Vec<f64>,
    multipliers: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &BandMatrix) -> Result<Self> {
        let n = a.n;
        let kl = a.kl;
        let ku = a.ku;
        let width = 2 * kl + ku + 1;
        let mut u = vec![0.0; n * width];
        // row i, column j lives at i*width + (j + kl - i)
        for i in 0..n {
            for (j, v) in a.row(i) {
                u[i * width + (j + kl - i)] = v;
            }
        }
        let scale = a.max_abs();
        if scale == 0.0 && n > 0 {
            return Err(Error::Singular {
                column: 0,
                pivot: 0.0,
                scale,
            });
        }
        let tiny = 1e-14 * scale;
        let mut multipliers = vec![0.0; n * kl.max(1)];
        let mut pivots = vec![0; n];

        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = u[k * width + kl].abs();
            for i in k + 1..=last_row {
                let v = u[i * width + (k + kl - i)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(Error::Singular {
                    column: k,
                    pivot: best,
                    scale,
                });
            }
            pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a_k = k * width + (j + kl - k);
                    let a_p = p * width + (j + kl - p);
                    u.swap(a_k, a_p);
                }
            }
            let pivot = u[k * width + kl];
            for i in k + 1..=last_row {
                let ik = i * width + (k + kl - i);
                let m = u[ik] / pivot;
                u[ik] = 0.0;
                multipliers[k * kl + (i - k - 1)] = m;
                if m != 0.0 {
                    let row_k = k * width + kl - k;
                    let row_i = i * width + kl - i;
                    for j in k + 1..=last_col {
                        u[row_i + j] -= m * u[row_k + j];
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            width,
            upper: u,
            multipliers,
            pivots,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let kl = self.kl;
        let w = self.width;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                    x[i] -= self.multipliers[k * kl + (i - k - 1)] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let row = k * w + kl - k;
            let mut s = x[k];
            for j in k + 1..=(k + w - 1 - kl).min(n - 1) {
                s -= self.upper[row + j] * x[j];
            }
            x[k] = s / self.upper[row + k];
        }
        x
    }
}

/// Solution of a checked direct solve.
#[derive(Debug, Clone)]
pub struct Solved {
    pub x: Vec<f64>,
    pub relative_residual: f64,
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `‖Ax − b‖ / ‖b‖`, or the absolute residual when `b = 0`.
pub fn relative_residual(a: &BandMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let r: Vec<f64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    let nb = norm2(b);
    if nb > 0.0 {
        norm2(&r) / nb
    } else {
        norm2(&r)
    }
}

/// Factor, solve, and verify the residual against [`RESIDUAL_LIMIT`].
pub fn solve_checked(a: &BandMatrix, b: &[f64]) -> Result<Solved> {
    if a.dim() != b.len() {
        return Err(Error::invalid(format!(
            "matrix dimension {} does not match rhs length {}",
            a.dim(),
            b.len()
        )));
    }
    if a.dim() == 0 {
        return Ok(Solved {
            x: Vec::new(),
            relative_residual: 0.0,
        });
    }
    let lu = BandLu::factor(a)?;
    let x = lu.solve(b);
    let rel = relative_residual(a, &x, b);
    if !(rel <= RESIDUAL_LIMIT) {
        return Err(Error::Residual {
            relative: rel,
            limit: RESIDUAL_LIMIT,
        });
    }
    Ok(Solved {
        x,
        relative_residual: rel,
    })
}
