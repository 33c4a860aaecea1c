//! Jacobi elliptic functions and the closed-form free rotation of a rigid
//! body about its axis of largest inertia.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    /// amplitude φ with `sn = sin φ`, `cn = cos φ`
    pub am: f64,
}

/// `sn, cn, dn` of argument `u` and parameter `m = k²` in `[0, 1)`, by the
/// arithmetic–geometric mean with descending Landen transformations.
pub fn jacobi(u: f64, m: f64) -> Jacobi {
    assert!((0.0..1.0).contains(&m), "parameter must lie in [0, 1), got {m}");
    if m < 1e-300 {
        let (s, c) = u.sin_cos();
        return Jacobi { sn: s, cn: c, dn: 1.0, am: u };
    }
    const MAX: usize = 32;
    let mut a = [0.0; MAX];
    let mut c = [0.0; MAX];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while c[n].abs() > f64::EPSILON * a[n] && n + 1 < MAX {
        let (an, bn) = (a[n], b);
        a[n + 1] = 0.5 * (an + bn);
        c[n + 1] = 0.5 * (an - bn);
        b = (an * bn).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for i in (1..=n).rev() {
        phi = 0.5 * (phi + (c[i] / a[i] * phi.sin()).asin());
    }
    let (s, co) = phi.sin_cos();
    // dn > 0 for m < 1; this form avoids the 0/0 of the Landen ratio near φ = π/2
    let dn = (1.0 - m * s * s).sqrt();
    Jacobi { sn: s, cn: co, dn, am: phi }
}

/// Carlson's symmetric integral `R_F(x, y, z)`.
fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    const ERRTOL: f64 = 1e-3;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        let mean = (x + y + z) / 3.0;
        let (dx, dy, dz) = ((mean - x) / mean, (mean - y) / mean, (mean - z) / mean);
        if dx.abs().max(dy.abs()).max(dz.abs()) < ERRTOL {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / mean.sqrt();
        }
    }
}

/// Incomplete elliptic integral of the first kind for `|φ| ≤ π/2`.
pub fn elliptic_f(phi: f64, m: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    s * carlson_rf(c * c, 1.0 - m * s * s, 1.0)
}

/// Invariants and scalings of the free-rotation solution.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticParams {
    pub energy: f64,
    pub momentum: f64,
    pub tau_scale: f64,
    pub k2: f64,
    pub amplitudes: [f64; 3],
    /// elliptic argument at `t = 0`
    pub tau0: f64,
    /// component signs restoring the original initial octant
    pub signs: [f64; 3],
}

impl EllipticParams {
    pub fn new(inertia: [f64; 3], omega0: [f64; 3]) -> Result<Self> {
        let [i1, i2, i3] = inertia;
        if !(0.0 < i1 && i1 < i2 && i2 < i3) {
            return Err(Error::UnsupportedBranch(format!(
                "closed form needs I1 < I2 < I3, got {inertia:?}"
            )));
        }
        let energy = 0.5 * (0..3).map(|i| inertia[i] * omega0[i] * omega0[i]).sum::<f64>();
        let l2: f64 = (0..3).map(|i| (inertia[i] * omega0[i]).powi(2)).sum();
        let upper = 2.0 * energy * i3 - l2;
        let lower = l2 - 2.0 * energy * i1;
        let k2 = (i2 - i1) * upper / ((i3 - i2) * lower);
        if !(lower > 0.0 && upper >= 0.0 && k2 < 1.0) {
            return Err(Error::UnsupportedBranch(format!(
                "closed form covers rotation about the I3 axis (k² < 1); got k² = {k2}"
            )));
        }
        let tau_scale = ((i3 - i2) * lower / (i1 * i2 * i3)).sqrt();
        let amplitudes = [
            (upper / (i1 * (i3 - i1))).sqrt(),
            (upper / (i2 * (i3 - i2))).sqrt(),
            (lower / (i3 * (i3 - i1))).sqrt(),
        ];

        // Pairwise sign flips are symmetries of the free equations; use them
        // to bring ω₃ > 0 and ω₁ ≥ 0, where the sn/cn/dn form applies.
        let mut signs = [1.0; 3];
        let mut w = omega0;
        if w[2] < 0.0 {
            signs[1] = -signs[1];
            signs[2] = -signs[2];
            w[1] = -w[1];
            w[2] = -w[2];
        }
        if w[0] < 0.0 {
            signs[0] = -signs[0];
            signs[1] = -signs[1];
            w[1] = -w[1];
        }
        let s0 = if amplitudes[1] > 0.0 {
            (w[1] / amplitudes[1]).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        let tau0 = elliptic_f(s0.asin(), k2);
        Ok(Self {
            energy,
            momentum: l2.sqrt(),
            tau_scale,
            k2,
            amplitudes,
            tau0,
            signs,
        })
    }

    pub fn omega(&self, t: f64) -> [f64; 3] {
        let j = jacobi(self.tau0 + self.tau_scale * t, self.k2);
        [
            self.signs[0] * self.amplitudes[0] * j.cn,
            self.signs[1] * self.amplitudes[1] * j.sn,
            self.signs[2] * self.amplitudes[2] * j.dn,
        ]
    }
}

/// Angular velocity of the free body at time `t`. The zero initial state is
/// an equilibrium and returns zero for any inertia.
pub fn euler_free_exact(t: f64, inertia: [f64; 3], omega0: [f64; 3]) -> Result<[f64; 3]> {
    if omega0 == [0.0; 3] {
        return Ok([0.0; 3]);
    }
    Ok(EllipticParams::new(inertia, omega0)?.omega(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn degenerate_parameter_is_trigonometric() {
        for u in [-2.0, 0.0, 0.3, 5.0] {
            let j = jacobi(u, 0.0);
            assert_eq!(j.sn, u.sin());
            assert_eq!(j.dn, 1.0);
            let j = jacobi(u, 1e-14);
            assert!((j.sn - u.sin()).abs() < 1e-13 && (j.dn - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn reference_values() {
        // sn(K(m), m) = 1 with K from R_F
        for m in [0.1, 0.5, 0.9, 0.999] {
            let k = elliptic_f(FRAC_PI_2, m);
            let j = jacobi(k, m);
            assert!((j.sn - 1.0).abs() < 1e-12 && j.cn.abs() < 1e-12);
            assert!((j.dn - (1.0 - m).sqrt()).abs() < 1e-12);
        }
        // K(1/2) = 1.854074677301372
        assert!((elliptic_f(FRAC_PI_2, 0.5) - 1.854_074_677_301_372).abs() < 1e-14);
        // sn(0.5 | 0.3) from the series u − (1+m)u³/6 + (1+14m+m²)u⁵/120 − ...
        let (u, m) = (0.5f64, 0.3f64);
        let series = u - (1.0 + m) * u.powi(3) / 6.0 + (1.0 + 14.0 * m + m * m) * u.powi(5) / 120.0
            - (1.0 + 135.0 * m + 135.0 * m * m + m.powi(3)) * u.powi(7) / 5040.0;
        assert!((jacobi(u, m).sn - series).abs() < 1e-5);
    }

    #[test]
    fn amplitude_inverse() {
        for &(phi, m) in &[(0.3, 0.2), (1.2, 0.7), (-0.9, 0.5)] {
            let u = elliptic_f(phi, m);
            assert!((jacobi(u, m).am - phi).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn identities_hold(u in -20.0f64..20.0, m in 0.0f64..0.99) {
            let j = jacobi(u, m);
            prop_assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-12);
            prop_assert!((j.dn * j.dn + m * j.sn * j.sn - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn free_rotation_initial_state_and_invariants() {
        let inertia = [1.0, 2.0, 3.0];
        for w0 in [[1.0, 0.0, 3.0], [-1.0, 0.5, 3.0], [0.4, -0.7, -2.5]] {
            let p = EllipticParams::new(inertia, w0).unwrap();
            let w = p.omega(0.0);
            for i in 0..3 {
                assert!((w[i] - w0[i]).abs() < 1e-12, "{w:?} vs {w0:?}");
            }
            for n in 0..=300 {
                let w = p.omega(n as f64 * 0.01);
                let e = 0.5 * (0..3).map(|i| inertia[i] * w[i] * w[i]).sum::<f64>();
                let l = (0..3).map(|i| (inertia[i] * w[i]).powi(2)).sum::<f64>().sqrt();
                assert!((e - p.energy).abs() < 1e-12 * p.energy);
                assert!((l - p.momentum).abs() < 1e-12 * p.momentum);
            }
        }
        let p = EllipticParams::new(inertia, [1.0, 0.0, 3.0]).unwrap();
        assert!((p.k2 - 1.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn free_rotation_satisfies_equations() {
        let inertia = [1.0, 2.0, 3.0];
        let p = EllipticParams::new(inertia, [1.0, 0.2, 3.0]).unwrap();
        let h = 1e-5;
        for n in 0..30 {
            let t = 0.1 * n as f64;
            let (wp, wm, w) = (p.omega(t + h), p.omega(t - h), p.omega(t));
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let lhs = inertia[i] * (wp[i] - wm[i]) / (2.0 * h);
                let rhs = -(inertia[k] - inertia[j]) * w[j] * w[k];
                assert!((lhs - rhs).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn unsupported_branches() {
        assert!(matches!(
            EllipticParams::new([2.0, 1.0, 3.0], [1.0, 0.0, 3.0]),
            Err(Error::UnsupportedBranch(_))
        ));
        // rotation near the I1 axis gives k² > 1
        assert!(matches!(
            EllipticParams::new([1.0, 2.0, 3.0], [3.0, 0.0, 0.1]),
            Err(Error::UnsupportedBranch(_))
        ));
        assert_eq!(euler_free_exact(1.0, [1.0, 1.0, 1.0], [0.0; 3]).unwrap(), [0.0; 3]);
    }
}
