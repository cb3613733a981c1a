//! MAX-CUT by recursive quantum random access optimization.
//!
//! Binary node labels are packed into fewer qubits with (m,1) quantum random
//! access codes, the resulting relaxed Hamiltonian is maximized over matrix
//! product states, and edge parities are fixed recursively from ensemble edge
//! energies until the residual graph is small enough for exhaustive search.
//!
//! Module map:
//!
//! - [`graph`]: graph model, rudy/JSON I/O, generators, reduction, spanning forests
//! - [`qrac`]: Pauli assignment, QRAC Hamiltonian terms, magic states, Pauli rounding
//! - [`tensornet`]: MPS/MPO engine, analytic gradients, L-BFGS optimizer
//! - [`shadows`]: random magic measurements and the classical-shadow estimator
//! - [`oracle`]: dense and exhaustive ground truth for every identity above
//! - [`solver`]: the recursive solver and its baselines

pub mod error;
pub mod graph;
pub mod oracle;
pub mod pauli;
pub mod qrac;
pub mod rng;
pub mod shadows;
pub mod solver;
pub mod tensornet;

pub use error::{Error, Result};
pub use graph::{BitString, Graph};
