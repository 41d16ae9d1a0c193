//! Two-component public-key secret establishment over safe-prime groups.
//!
//! Each party holds three private exponents (x, y, z) and publishes the pair
//! (P, Q) = (g^(x+z), g^(y+z)) mod p. One message per direction, an
//! inverse-exponent finalization step, and both sides hold the same group
//! element. The crate also ships the classical single-exponent baselines
//! (Diffie-Hellman, ElGamal), a byte-exact wire format plus text key files,
//! and a cryptanalysis harness that measures how far public data pins down a
//! private key on groups small enough to take discrete logs directly.
//!
//! Module map:
//! - [`modmath`]: modular arithmetic, primality, safe-prime groups
//! - [`keys`]: three-exponent keypairs and public-key validation
//! - [`protocol`]: session state machine, finalization, key ratchet
//! - [`baselines`]: Diffie-Hellman and ElGamal over the same groups
//! - [`cryptanalysis`]: discrete logs, constraint systems, solution counting
//! - [`wire`]: framed binary codec, fixed-width encodings, armored key text
//! - [`groups`]: embedded canonical groups for demos and benchmarks
//!
//! The shared key is exposed as a raw group element, deliberately: no key
//! derivation function is layered on top, so callers can see exactly what
//! the exchange produces (including the degenerate value 1, which
//! [`protocol::SharedSecret::is_degenerate`] flags). Nothing here
//! authenticates peers; transport-level identity is out of scope.

pub mod baselines;
pub mod cryptanalysis;
pub mod groups;
pub mod keys;
pub mod modmath;
pub mod protocol;
pub mod wire;

pub use num_bigint::BigUint;

pub use keys::{generate_keypair, keypair_from_exponents, validate_public_key, Keypair, PrivateKey, PublicKey};
pub use modmath::{DomainParams, MathError};
pub use protocol::{ratchet_next_key, IntermediateValue, Role, Session, SessionState, SharedSecret};
