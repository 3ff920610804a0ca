//! Cable routing as per-cable QUBO blocks, solved by a sampling VQE on a
//! statevector simulator and checked against classical oracles.

pub mod bits;
pub mod cli;
pub mod error;
pub mod instance;
pub mod metrics;
pub mod oracle;
pub mod quantum;
pub mod qubo;
pub mod seed;
pub mod vqe;

pub use bits::Bitstring;
pub use error::{Error, Result};
pub use instance::{bundled_layout, parse_instance, Cable, Instance};
