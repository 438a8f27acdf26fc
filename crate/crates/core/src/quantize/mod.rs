//! Truncated star products, quantized derivations and their inner
//! automorphisms.

pub mod crossed;
pub mod derivation;
pub mod lift;
pub mod ops;
pub mod star;

pub use crossed::{euler_check, semiclassical_bracket_check, CrossedAlgebra, CrossedElement};
pub use derivation::{
    exp_derivation, inner_derivation, inner_derivation_witness, quantized_derivation,
    QuantDerivation,
};
pub use lift::{
    conjugating_unit, lift_log_hamiltonian, modular_automorphism_candidate, relative_twist,
    twist_is_inner, Lift,
};
pub use ops::{BiDiffOp, DiffOp};
pub use star::{CertificationReport, ProviderKind, StarProvider};
