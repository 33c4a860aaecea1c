//! Reference solutions used to verify the dual solvers.

pub mod algebraic;
pub mod closed_form;
pub mod elliptic;
pub mod fourier;
pub mod rk45;

pub use algebraic::{algebraic_dual_demo, AlgebraicOutcome};
pub use closed_form::{heat_steady, heat_transient, steady_dual_family, transport_exact, SteadyDual};
pub use elliptic::{euler_free_exact, jacobi, EllipticParams, Jacobi};
pub use fourier::{heat_discontinuous_series, heat_fourier_jump, FourierJumpSolution};
pub use rk45::{rk45_reference, DenseSolution, Rk45Options};
