//! Monotonicity-based shape reconstruction and the numerical bound checks.

mod bounds;
mod config;
mod definite;
mod indefinite;
mod loewner;
mod result;

pub use bounds::{verify_monotonicity_bounds, BoundTriple, BoundsCase, BoundsReport, BoundsSetup};
pub use config::{default_beta, default_tau, TestConfig, TestMode};
pub use definite::{
    linearized_definite_test, nonlinear_definite_test, pixel_element_masks, reconstruct_definite, DefinitePipeline,
};
pub use indefinite::{default_dictionary, indefinite_test, reconstruct_indefinite, IndefinitePhantom, NdCache};
pub use loewner::{loewner_test, LoewnerOutcome};
pub use result::{DictionaryOutcome, ReconstructionResult};
