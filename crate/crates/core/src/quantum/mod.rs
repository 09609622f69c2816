//! Single-particle quantum strategies for oracle games.
//!
//! * [`strategy`]: the canonical strategy form and the states it prepares.
//! * [`helstrom`]: two-state discrimination and the behaviors it induces.
//! * [`symmetric`]: closed forms for uniform weights and a common qubit encoding.
//! * [`optimize`] and [`minimize`]: the restart optimizer and its local searches.

pub mod helstrom;
pub mod minimize;
pub mod optimize;
pub mod strategy;
pub mod symmetric;

pub use helstrom::{
    build_discrimination, fingerprinting_operator, fingerprinting_value, fingerprinting_violation, helstrom_value, strategy_behavior, trace_norm,
    DiscriminationInstance,
};
pub use minimize::Backend;
pub use optimize::{lemma3_check, optimize_violation, optimize_weights, DimensionSaturationReport, OptimizeOptions, OptimizeOutcome, RestartRecord};
pub use strategy::{encoded_pure_state, reference_state, QuantumStrategy};
pub use symmetric::{block_circulant_eigenvalues, optimal_theta, symmetric_m, theorem1_delta, theorem1_delta_exact, trace_norm_ms_closed_form};
