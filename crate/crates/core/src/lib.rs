//! Exponential cubic B-spline collocation for the coupled viscous Burgers system.
//!
//! The solver expands `U` and `V` in exponential (tension) B-splines, collocates
//! the Crank–Nicolson discretisation at the knots and linearises the products
//! around the previous time level, so each step is a single banded solve.
//!
//! ```no_run
//! use burgers_core::{analysis, problems, stepper, SplineParams};
//!
//! let problem = problems::problem1();
//! let params = SplineParams::new(problem.a, problem.b, 200, 1.0).unwrap();
//! let out = stepper::run(&problem, &params, 1e-3, 0.1, &[]).unwrap();
//! let err = analysis::linf_error(&out.final_state, &problem, &params, 1e-3).unwrap();
//! println!("L_inf(U) = {:e}", err.linf_u);
//! ```

pub mod analysis;
pub mod banded;
pub mod basis;
mod error;
pub mod harness;
pub mod init;
pub mod problems;
pub mod stepper;

pub use basis::{nodal_weights, NodalWeights, SplineParams};
pub use error::{BurgersError, Result};
pub use init::{fit_initial, CoefficientState};
pub use problems::ProblemSpec;
