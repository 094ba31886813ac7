//! Capacity-energy trade-offs for multi-user channels that must deliver
//! both information and received energy.
//!
//! * [`channel`]: finite alphabets, pmfs, discrete memoryless channels,
//!   cost and energy tables, and the channel file format.
//! * [`info`]: entropy and (conditional) mutual information.
//! * [`mac`]: the multiple access capacity-energy region and the Gaussian
//!   time-sharing example.
//! * [`mhc`]: the two-hop capacity-energy function with a harvesting relay.
//! * [`sim`]: Monte Carlo checks of the operational definitions.
//! * [`cli`]: the command line front end.

pub mod channel;
pub mod cli;
pub mod error;
pub mod info;
mod lp;
pub mod mac;
pub mod mhc;
pub mod sim;
mod simplex;

pub use error::{Error, Result};
