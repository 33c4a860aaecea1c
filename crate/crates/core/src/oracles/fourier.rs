//! Fourier-series solutions of the heat equation on `[0, 1]` with
//! `θ(0, t) = θ(1, t) = β` and initial data antisymmetric about `x = 1/2`.

use std::f64::consts::PI;

/// Terms whose decay factor `e^{−4m²π²kt}` falls below this are dropped.
const DECAY_CUTOFF: f64 = 1e-300;

/// Exact solution for the smoothed-jump initial profile.
///
/// `coefficient(m)` is the projection `∫₀¹ θ₀ sin(2πmx) dx`; the series
/// amplitude is twice that because `‖sin(2πmx)‖² = 1/2` on the unit interval.
#[derive(Debug, Clone)]
pub struct FourierJumpSolution {
    pub beta: f64,
    pub eps: f64,
    pub k: f64,
    pub n_terms: usize,
    coefficients: Vec<f64>,
}

impl FourierJumpSolution {
    pub fn new(beta: f64, eps: f64, k: f64, n_terms: usize) -> Self {
        assert!(eps > 0.0 && eps < 0.5, "smoothing half-width must lie in (0, 1/2)");
        assert!(n_terms >= 1);
        let coefficients = (1..=n_terms).map(|m| coefficient(beta, eps, m)).collect();
        Self {
            beta,
            eps,
            k,
            n_terms,
            coefficients,
        }
    }

    pub fn coefficient(&self, m: usize) -> f64 {
        self.coefficients[m - 1]
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let mut sum = 0.0;
        for (i, a) in self.coefficients.iter().enumerate() {
            let m = (i + 1) as f64;
            let decay = (-4.0 * m * m * PI * PI * self.k * t).exp();
            if decay < DECAY_CUTOFF {
                break;
            }
            sum += 2.0 * a * (2.0 * PI * m * x).sin() * decay;
        }
        self.beta + sum
    }
}

/// `a_m = a_{m1} + a_{m2} + a_{m3}` with `l = 1/2 − ε`, `r = 1/2 + ε`.
fn coefficient(beta: f64, eps: f64, m: usize) -> f64 {
    let m = m as f64;
    let l = 0.5 - eps;
    let r = 0.5 + eps;
    let slope = (2.0 * eps - 1.0) / eps;
    let c = beta - (2.0 * eps - 1.0) / (2.0 * eps);
    let (pm, pm2) = (PI * m, PI * PI * m * m);
    let (sl, cl) = (2.0 * pm * l).sin_cos();
    let (sr, cr) = (2.0 * pm * r).sin_cos();

    let a1 = sl / (2.0 * pm2) - l / pm * cl + beta / (2.0 * pm) * (1.0 - cl);
    let a2 = (2.0 * PI * c * m * (cl - cr) + slope * (-2.0 * pm * r * cr + sr + 2.0 * pm * l * cl - sl))
        / (4.0 * pm2);
    let a3 = (-beta * pm + (beta - 2.0 + 2.0 * r) * pm * cr + (2.0 * pm).sin() - sr) / (2.0 * pm2);
    a1 + a2 + a3
}

pub fn heat_fourier_jump(x: f64, t: f64, beta: f64, eps: f64, k: f64, n_terms: usize) -> f64 {
    FourierJumpSolution::new(beta, eps, k, n_terms).eval(x, t)
}

/// Solution for the genuinely discontinuous profile `10 + 2x` / `8 + 2x`:
/// `10 + 2 Σ (−1)^{m+1}/(πm) sin(2πmx) e^{−4m²π²kt}`.
pub fn heat_discontinuous_series(x: f64, t: f64, k: f64, n_terms: usize) -> f64 {
    let mut sum = 0.0;
    for m in 1..=n_terms {
        let mf = m as f64;
        let decay = (-4.0 * mf * mf * PI * PI * k * t).exp();
        if decay < DECAY_CUTOFF {
            break;
        }
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign / (PI * mf) * (2.0 * PI * mf * x).sin() * decay;
    }
    10.0 + 2.0 * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;

    /// Composite Gauss–Legendre quadrature on `[a, b]` with `n` panels.
    fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let g = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let h = (b - a) / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let mid = a + (i as f64 + 0.5) * h;
            for (xi, w) in g {
                s += w * f(mid + 0.5 * h * xi) * 0.5 * h;
            }
        }
        s
    }

    /// Piecewise quadrature aligned with the kinks of the smoothed profile.
    fn project(beta: f64, eps: f64, m: usize) -> f64 {
        let p = Profile::SmoothedJump { beta, eps };
        let f = |x: f64| p.eval(x) * (2.0 * PI * m as f64 * x).sin();
        let (l, r) = (0.5 - eps, 0.5 + eps);
        integrate(f, 0.0, l, 400) + integrate(f, l, r, 400) + integrate(f, r, 1.0, 400)
    }

    #[test]
    fn coefficients_match_quadrature() {
        for &(beta, eps) in &[(10.0, 0.01), (0.0, 0.01), (3.0, 0.2)] {
            for m in [1, 2, 3, 7, 20, 51] {
                let want = project(beta, eps, m);
                let got = coefficient(beta, eps, m);
                assert!((got - want).abs() < 1e-11, "β={beta} ε={eps} m={m}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn long_time_limit_is_beta() {
        let s = FourierJumpSolution::new(10.0, 0.01, 0.1, 1000);
        for x in [0.1, 0.5, 0.77] {
            assert!((s.eval(x, 50.0) - 10.0).abs() < 1e-12);
        }
        assert!((heat_discontinuous_series(0.3, 50.0, 0.1, 1000) - 10.0).abs() < 1e-12);
    }

    /// `‖θ₀ − β‖²` by quadrature, minus the Parseval sum of the retained
    /// modes, gives the squared L2 truncation error at `t = 0`.
    #[test]
    fn initial_profile_recovered_in_l2() {
        let (beta, eps) = (10.0, 0.01);
        let p = Profile::SmoothedJump { beta, eps };
        let f = |x: f64| (p.eval(x) - beta).powi(2);
        let (l, r) = (0.5 - eps, 0.5 + eps);
        let norm2 = integrate(f, 0.0, l, 50) + integrate(f, l, r, 10) + integrate(f, r, 1.0, 50);
        // tail summed directly far beyond the truncation, where cancellation
        // in the Parseval difference would dominate
        let n = 100_000;
        let tail: f64 = (n + 1..=20_000_000)
            .map(|m| 2.0 * coefficient(beta, eps, m).powi(2))
            .sum();
        let head: f64 = (1..=n).map(|m| 2.0 * coefficient(beta, eps, m).powi(2)).sum();
        assert!((norm2 - head - tail).abs() < 1e-12 * norm2);
        assert!(tail.sqrt() < 1e-6, "L2 distance {}", tail.sqrt());
    }

    #[test]
    fn partial_sums_settle_after_first_instant() {
        // at t > 0 the modes past 10^4 carry factors below e^{-4e8·π²·k·t}
        let a = FourierJumpSolution::new(10.0, 0.01, 0.1, 10_000);
        let b = FourierJumpSolution::new(10.0, 0.01, 0.1, 100_000);
        for t in [1e-4, 0.005, 0.125] {
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                assert!((a.eval(x, t) - b.eval(x, t)).abs() < 1e-8);
                let d = heat_discontinuous_series(x, t, 0.1, 10_000)
                    - heat_discontinuous_series(x, t, 0.1, 100_000);
                assert!(d.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn discontinuous_series_matches_profile_away_from_jump() {
        for x in [0.1, 0.3, 0.7, 0.9] {
            let want = if x < 0.5 { 10.0 + 2.0 * x } else { 8.0 + 2.0 * x };
            assert!((heat_discontinuous_series(x, 1e-7, 0.1, 100_000) - want).abs() < 1e-3);
        }
        assert!((heat_discontinuous_series(0.5, 0.0, 0.1, 1000) - 10.0).abs() < 1e-12);
    }
}
