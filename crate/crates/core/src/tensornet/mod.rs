//! Matrix product states and the sparse term-channel MPO used for QRAC
//! Hamiltonians, with analytic gradients of the Rayleigh quotient and an
//! L-BFGS maximizer.

mod contract;
pub mod lbfgs;
mod mpo;
mod mps;
mod optimize;
mod sample;

pub use contract::{edge_energies, evaluate, expectation, gradient, site_expectations, term_values, Evaluation};
pub use lbfgs::{LbfgsStatus, OptimizerConfig};
pub use mpo::{build_mpo, Mpo};
pub use mps::{init_mps, bond_dims, Mps, Site};
pub use optimize::{optimize, Optimized};
pub use sample::sample_bits;
