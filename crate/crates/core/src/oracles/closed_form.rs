use std::f64::consts::PI;

/// Steady temperature `3x + 1` between `θ(0) = 1` and `θ(1) = 4`.
pub fn heat_steady(x: f64) -> f64 {
    3.0 * x + 1.0
}

/// `sin(πx/2) e^{−π²kt/4} + 1`
pub fn heat_transient(x: f64, t: f64, k: f64) -> f64 {
    (PI * x / 2.0).sin() * (-PI * PI * k * t / 4.0).exp() + 1.0
}

/// Step `2 → 4` transported with speed 0.25 from `x = 0.2`; the locus
/// itself takes the average.
pub fn transport_exact(x: f64, t: f64) -> f64 {
    let xj = 0.2 + 0.25 * t;
    if x < xj {
        2.0
    } else if x > xj {
        4.0
    } else {
        3.0
    }
}

/// Time-independent dual fields mapping to `θ = 3x + 1`, `π = 3` for any
/// conductivity `k`:
///
/// ```text
/// p = 3x²/2 + x + C,    l = (x³/2 + x²/2 + (C − 3)x) / k
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyDual {
    pub k: f64,
    pub c: f64,
}

pub fn steady_dual_family(k: f64, c: f64) -> SteadyDual {
    SteadyDual { k, c }
}

impl SteadyDual {
    pub fn p(&self, x: f64) -> f64 {
        1.5 * x * x + x + self.c
    }

    pub fn l(&self, x: f64) -> f64 {
        (0.5 * x * x * x + 0.5 * x * x + (self.c - 3.0) * x) / self.k
    }

    /// Coefficients of `l` in ascending powers of `x`.
    pub fn l_coeffs(&self) -> Vec<f64> {
        vec![0.0, (self.c - 3.0) / self.k, 0.5 / self.k, 0.5 / self.k]
    }
}
