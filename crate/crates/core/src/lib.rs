//! Variational quantum power method (VQPM) for quadratic unconstrained
//! binary optimization, simulated on a dense state vector.
//!
//! A QUBO objective is scaled into `[-π/4, π/4]`, shifted by `π/4`, and
//! encoded as the phases of a diagonal unitary `U`. Repeated application of
//! `(I+U)` amplifies the basis state with the smallest phase, which is the
//! minimizer. The variational loop keeps the register in a product state,
//! feeding measured single-qubit marginals back as rotation angles and
//! freezing qubits whose value is decided.
//!
//! ```
//! use vqpm::qubo::{generate_random, scale_problem, brute_force_solve};
//! use vqpm::vqpm::{run_exact_power, VqpmConfig};
//!
//! let p = generate_random(5, 1).unwrap();
//! let s = scale_problem(&p).unwrap();
//! let r = run_exact_power(&s, &VqpmConfig::default()).unwrap();
//! assert_eq!(r.found, brute_force_solve(&p).unwrap().0);
//! ```

pub mod cli;
pub mod error;
pub mod experiments;
pub mod par;
pub mod qubo;
pub mod spectrum;
pub mod state;
pub mod vqpm;

pub use error::{Result, VqpmError};
pub use qubo::{Bitstring, QuboInstance, ScaledProblem};
pub use spectrum::DiagonalOracle;
pub use state::StateVector;
pub use vqpm::{AnsatzState, VqpmConfig, VqpmResult};
