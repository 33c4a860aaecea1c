//! Closed-form scalar functions of one variable used for initial, boundary
//! and dual data.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    /// `Σ coeffs[n] · s^n`
    Polynomial { coeffs: Vec<f64> },
    /// `amplitude · sin(frequency · s) + offset`
    Sine {
        amplitude: f64,
        frequency: f64,
        offset: f64,
    },
    /// `left` below `at`, `right` above, `at_value` exactly at `at`.
    Step {
        at: f64,
        left: f64,
        right: f64,
        at_value: f64,
    },
    /// `β + 2s` on `[0, ½)`, `β − 2 + 2s` on `(½, 1]`, `β` at `½`.
    LinearJump { beta: f64 },
    /// [`LinearJump`](Profile::LinearJump) with the jump replaced by a
    /// straight ramp over `[½ − ε, ½ + ε]`.
    SmoothedJump { beta: f64, eps: f64 },
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    pub fn zero() -> Self {
        Profile::constant(0.0)
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
            Profile::Sine {
                amplitude,
                frequency,
                offset,
            } => amplitude * (frequency * s).sin() + offset,
            Profile::Step {
                at,
                left,
                right,
                at_value,
            } => {
                if s < *at {
                    *left
                } else if s > *at {
                    *right
                } else {
                    *at_value
                }
            }
            Profile::LinearJump { beta } => {
                if s < 0.5 {
                    beta + 2.0 * s
                } else if s > 0.5 {
                    beta - 2.0 + 2.0 * s
                } else {
                    *beta
                }
            }
            Profile::SmoothedJump { beta, eps } => {
                let (l, r) = (0.5 - eps, 0.5 + eps);
                if s < l {
                    beta + 2.0 * s
                } else if s > r {
                    beta - 2.0 + 2.0 * s
                } else {
                    let slope = (2.0 * eps - 1.0) / eps;
                    let intercept = beta - (2.0 * eps - 1.0) / (2.0 * eps);
                    slope * s + intercept
                }
            }
        }
    }

    /// Points where the profile is discontinuous.
    pub fn jumps(&self) -> Vec<f64> {
        match self {
            Profile::Step { at, left, right, .. } if left != right => vec![*at],
            Profile::LinearJump { .. } => vec![0.5],
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("profile parameter {name} is not finite"))
            }
        };
        match self {
            Profile::Constant { value } => finite(*value, "value"),
            Profile::Polynomial { coeffs } => coeffs.iter().try_for_each(|c| finite(*c, "coeff")),
            Profile::Sine {
                amplitude,
                frequency,
                offset,
            } => {
                finite(*amplitude, "amplitude")?;
                finite(*frequency, "frequency")?;
                finite(*offset, "offset")
            }
            Profile::Step {
                at,
                left,
                right,
                at_value,
            } => {
                finite(*at, "at")?;
                finite(*left, "left")?;
                finite(*right, "right")?;
                finite(*at_value, "at_value")
            }
            Profile::LinearJump { beta } => finite(*beta, "beta"),
            Profile::SmoothedJump { beta, eps } => {
                finite(*beta, "beta")?;
                if *eps > 0.0 && *eps < 0.5 {
                    Ok(())
                } else {
                    Err(format!("smoothing half-width must lie in (0, 0.5), got {eps}"))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_horner() {
        let p = Profile::Polynomial {
            coeffs: vec![1.0, -3.0, 0.5, 0.5],
        };
        let s: f64 = 0.7;
        assert!((p.eval(s) - (1.0 - 3.0 * s + 0.5 * s * s + 0.5 * s.powi(3))).abs() < 1e-15);
    }

    #[test]
    fn smoothed_jump_is_continuous() {
        let p = Profile::SmoothedJump { beta: 10.0, eps: 0.01 };
        for x in [0.49, 0.51] {
            let lo = p.eval(x - 1e-12);
            let hi = p.eval(x + 1e-12);
            assert!((lo - hi).abs() < 1e-9, "{lo} vs {hi}");
        }
        assert!((p.eval(0.5) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn step_returns_average_at_jump() {
        let p = Profile::Step {
            at: 0.2,
            left: 2.0,
            right: 4.0,
            at_value: 3.0,
        };
        assert_eq!(p.eval(0.0), 2.0);
        assert_eq!(p.eval(0.2), 3.0);
        assert_eq!(p.eval(1.9), 4.0);
        assert_eq!(p.jumps(), vec![0.2]);
    }
}
