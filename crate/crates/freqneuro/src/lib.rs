//! Frequency-domain encoding for neuroevolution.
//!
//! Recurrent network controllers are encoded as short genomes of DCT
//! coefficients. Decoding fills per-chromosome coefficient arrays in a
//! frequency-importance order, applies a separable inverse DCT, and places
//! the resulting values into the network's weight matrices, so a handful of
//! low-frequency coefficients can stand in for thousands of weights.
//! Genomes are optimized with separable natural evolution strategies against
//! a simulated 2D muscled arm that has to touch a goal with its tip.
//!
//! Module map:
//!
//! * [`dct`] -- forward/inverse cosine transforms, 1D to 4D.
//! * [`ordering`] -- the cell ordering that makes genome prefixes
//!   band-limited approximations, and chromosome-to-array filling.
//! * [`encoding`] -- genomes, mapping schemes, decode/encode/resize.
//! * [`rnn`] -- the recurrent controller runtime.
//! * [`snes`] -- the ask/tell optimizer.
//! * [`arm`] -- the muscled-arm environment and fitness.
//! * [`harness`] -- experiment configuration, evolution loops,
//!   generalization tests, and persistence.
//! * [`selftest`] -- independent oracle implementations used by tests and
//!   the `selftest` CLI subcommand.

pub mod arm;
pub mod dct;
pub mod encoding;
mod error;
pub mod harness;
pub mod ordering;
pub mod rnn;
pub mod selftest;
pub mod snes;

pub use error::{Error, Result};
