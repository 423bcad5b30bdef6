//! Phase extraction with quantum signal processing, simulated classically.
//!
//! The crate follows one pipeline:
//!
//! 1. [`phasefn`] builds the smoothed sawtooth `g_p` exactly as a piecewise
//!    polynomial and truncates its Fourier series into a [`LaurentPoly`].
//! 2. [`synthesis`] completes each parity component into an SU(2)-valued
//!    Laurent polynomial and peels it into a QSP rotation sequence.
//! 3. [`blockenc`] evaluates those sequences per eigenphase of a diagonal
//!    unitary, sums the two parity blocks, and amplifies the success branch.
//! 4. [`sampler`] budgets the errors and runs proportional sampling end to end.
//!
//! [`cli`] wires the pieces into the `phasekit` binary.

pub mod blockenc;
pub mod cli;
pub mod error;
pub mod laurent;
pub mod mat2;
pub mod phasefn;
pub mod sampler;
pub mod synthesis;

pub use error::{Error, Result};
pub use laurent::{CircleGrid, LaurentPoly, Parity, SupNorm};
