//! Measure theory on the boolean topos of actions of a finite groupoid.
//!
//! - [`groupoid`]: finite groupoids, their actions, subobjects and maps.
//! - [`valuation`]: valuations on subobject algebras, integration, Radon–Nikodym.
//! - [`invariant`]: invariant measures, change of variables, extension, descent
//!   and the modular bundle `χ` through its sections.
//! - [`modular`]: the commutant algebra on `l²(X)`, weights, the modular flow
//!   `θ_t`, the KMS boundary function, trace detection and states.
//! - [`cli`]: configuration files, reports and the subcommands of the binary.

pub mod cli;
pub mod groupoid;
pub mod invariant;
pub mod modular;
pub mod random;
pub mod report;
pub mod tolerance;
pub mod valuation;
