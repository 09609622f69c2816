//! Classical and quantum information carriers for N-bit oracle tasks.
//!
//! Conditional probability tables `P(a|x)` live in [`behavior`]. Their
//! Walsh–Hadamard spectra are computed in [`hadamard`], and [`interference`]
//! decides up to which order a behavior interferes.
//!
//! Truth tables and the enumeration of `K`-juntas are in [`boolean`] and
//! [`juntas`]. The junta polytopes themselves are handled exactly in
//! [`polytope`], with membership certificates in [`membership`] and the
//! hyperoctahedral action in [`symmetry`].
//!
//! Hyperplanes over behaviors become oracle games in [`games`]. Single-particle
//! quantum strategies and their optimizer are in [`quantum`], while
//! [`interference_lp`] solves the second-order interference program exactly.

pub mod behavior;
pub mod boolean;
pub mod error;
pub mod exact;
pub mod exec;
pub mod games;
pub mod hadamard;
pub mod interference;
pub mod interference_lp;
pub mod juntas;
pub mod membership;
pub mod polytope;
pub mod quantum;
pub mod scalar;
pub mod simplex;
pub mod symmetry;

pub use behavior::{Behavior, FloatBehavior, RationalBehavior};
pub use boolean::BooleanFunction;
pub use error::{Error, Result};
pub use exact::Rational;
pub use exec::Exec;
pub use games::{Hyperplane, OracleGame};
pub use scalar::Scalar;
