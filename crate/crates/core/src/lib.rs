//! Mean-based distinguishing of binary strings from deletion-channel traces.
//!
//! A string `x` sent through a deletion channel loses each bit independently
//! with probability `p`. A *mean-based* distinguisher only looks at the
//! per-position averages of the received traces. The difficulty of telling two
//! strings `x`, `y` apart this way is governed by the maximum modulus of the
//! Littlewood-type polynomial `Q_x - Q_y` on the circle `{p + q e^{iθ}}`.
//!
//! The crate is organised as:
//!
//! - [`strings`]: bit strings, Hamming/indel distances, block decompositions.
//! - [`polynomial`]: exact integer polynomials, multiplicity of the root 1,
//!   Descartes sign changes and certified circle suprema.
//! - [`channel`]: reproducible trace sampling and exact/empirical mean profiles.
//! - [`distinguish`]: the potential-function and profile-distance distinguishers.
//! - [`construct`]: the explicit edit-distance-4 hard pair, PTE extraction and
//!   the aggregate pair analysis.

pub mod channel;
pub mod construct;
pub mod distinguish;
mod error;
pub mod polynomial;
pub mod strings;

pub use channel::{MeanProfile, TraceBatch};
pub use construct::{analyze_pair, hard_pair, HardPairSpec, PairAnalysis};
pub use distinguish::{Decision, Hypothesis};
pub use error::{Error, Result};
pub use polynomial::{circle_supremum, CircleParams, IntPolynomial, SupremumCertificate};
pub use strings::{edit_distance, hamming_distance, BitString};
