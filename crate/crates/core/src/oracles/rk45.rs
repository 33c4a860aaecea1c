//! Dormand–Prince 5(4) integrator with continuous output, used as the
//! reference for the damped rigid body.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk45Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Rk45Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// continuous extension weights (Hairer, Nørsett and Wanner)
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug, Clone)]
struct Step<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

/// Accepted steps with their interpolation coefficients.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    steps: Vec<Step<N>>,
    t_end: f64,
}

impl<const N: usize> DenseSolution<N> {
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let idx = self
            .steps
            .partition_point(|s| s.t0 + s.h < t)
            .min(self.steps.len() - 1);
        let s = &self.steps[idx];
        let th = ((t - s.t0) / s.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = s.r[0][i] + th * (s.r[1][i] + th1 * (s.r[2][i] + th * (s.r[3][i] + th1 * s.r[4][i])));
        }
        y
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], coeffs: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(coeffs) {
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// Integrates `y' = f(t, y)` on `[0, t_end]`.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_end: f64,
    opts: Rk45Options,
) -> Result<DenseSolution<N>> {
    if !(t_end > 0.0) {
        return Err(Error::invalid("integration interval must be positive"));
    }
    let mut t = 0.0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    let mut h = (t_end * 1e-3).min(0.01);
    let mut steps = Vec::new();
    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Ok(DenseSolution { steps, t_end });
        }
        h = h.min(t_end - t);
        if h < 1e-14 * t_end.max(1.0) {
            return Err(Error::StepUnderflow { t, h });
        }
        for s in 1..7 {
            let ys = axpy(&y, h, &k[..s], &A[s][..s]);
            k[s] = f(t + C[s] * h, &ys);
        }
        let y1 = axpy(&y, h, &k[..6], &A[6][..6]);
        let err_vec = axpy(&[0.0; N], h, &k, &E);
        let mut norm = 0.0;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            norm += (err_vec[i] / sc).powi(2);
        }
        let norm = (norm / N as f64).sqrt();
        if norm <= 1.0 {
            let mut r = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y1[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                r[0][i] = y[i];
                r[1][i] = ydiff;
                r[2][i] = bspl;
                r[3][i] = ydiff - h * k[6][i] - bspl;
                r[4][i] = h * (0..7).map(|s| D[s] * k[s][i]).sum::<f64>();
            }
            steps.push(Step { t0: t, h, r });
            t += h;
            y = y1;
            k[0] = k[6];
        }
        let factor = if norm == 0.0 { 5.0 } else { 0.9 * norm.powf(-0.2) };
        h *= factor.clamp(0.2, 5.0);
    }
    Err(Error::StepUnderflow { t, h })
}

/// Damped Euler equations `I_i ω̇_i + (I_{i+2} − I_{i+1}) ω_{i+1} ω_{i+2} + ν I_i ω_i = 0`.
pub fn rk45_reference(
    inertia: [f64; 3],
    omega0: [f64; 3],
    nu: f64,
    t_end: f64,
) -> Result<DenseSolution<3>> {
    let rhs = move |_t: f64, w: &[f64; 3]| {
        let mut d = [0.0; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            d[i] = -((inertia[k] - inertia[j]) * w[j] * w[k] + nu * inertia[i] * w[i]) / inertia[i];
        }
        d
    };
    integrate(rhs, omega0, t_end, Rk45Options::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_oscillator() {
        let s = integrate(|_, y: &[f64; 1]| [y[0]], [1.0], 2.0, Rk45Options::default()).unwrap();
        for i in 0..=200 {
            let t = i as f64 * 0.01;
            assert!((s.eval(t)[0] - t.exp()).abs() < 1e-9 * t.exp(), "t={t}");
        }
        let s = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], [0.0, 1.0], 10.0, Rk45Options::default())
            .unwrap();
        for i in 0..=1000 {
            let t = i as f64 * 0.01;
            let y = s.eval(t);
            assert!((y[0] - t.sin()).abs() < 1e-9 && (y[1] - t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn rest_state_stays_at_rest() {
        let s = rk45_reference([1.0, 2.0, 5.0], [0.0; 3], 0.4, 5.0).unwrap();
        assert_eq!(s.eval(3.3), [0.0; 3]);
    }

    #[test]
    fn damped_momentum_decays_exponentially() {
        let inertia = [1.0, 2.0, 5.0];
        let w0 = [5.0, 3.0, 0.0];
        let s = rk45_reference(inertia, w0, 0.4, 5.0).unwrap();
        let mag = |w: [f64; 3]| (0..3).map(|i| (inertia[i] * w[i]).powi(2)).sum::<f64>().sqrt();
        let l0 = mag(w0);
        for i in 0..=500 {
            let t = i as f64 * 0.01;
            let want = l0 * (-0.4 * t).exp();
            assert!((mag(s.eval(t)) - want).abs() < 1e-8 * want);
        }
    }
}
