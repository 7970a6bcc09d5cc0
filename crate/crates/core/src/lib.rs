//! Entanglement detection for two-mode continuous-variable states from
//! cumulants up to fourth order.
//!
//! States are represented in the characteristic-function picture as finite
//! mixtures of exponential-quadratic terms ([`states::MixtureState`]). The
//! pipeline is
//!
//! 1. Weyl-ordered central moments ([`states::weyl_central_moments`]),
//! 2. cumulants and their partial transpose ([`cumulants`]),
//! 3. the witness matrix over linear-plus-quadratic test operators and its
//!    minimum eigenvalue ([`criterion`]).
//!
//! A negative minimum eigenvalue certifies that the partial transpose of the
//! density matrix is not positive, i.e. the state is entangled.
//!
//! Built-in models are the two-mode cat-like state ([`states::cat_state`]) and
//! a pair of gravitationally coupled mirrors driven by cavity photons
//! ([`optomech`]). [`fock_oracle`] recomputes everything by brute force in a
//! truncated Fock basis for cross-validation.

pub mod criterion;
pub mod cumulants;
pub mod error;
pub mod fock_oracle;
pub mod numerics;
pub mod optomech;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
