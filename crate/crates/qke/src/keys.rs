//! Three-exponent keypairs.
//!
//! A private key is a triple (x, y, z) of exponents mod p - 1 together with
//! the cached finalization inverse w = (x + y)^-1 mod (p - 1). The matching
//! public key is the residue pair (P, Q) = (g^(x+z), g^(y+z)) mod p. The
//! shared offset z appears in both halves, which is what lets a session
//! strip it off again during finalization.
//!
//! Generation resamples y until gcd(x + y, p - 1) = 1; without that, w does
//! not exist and the exchange cannot complete.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;

use crate::modmath::{self, DomainParams, MathError};

/// Private exponent triple with its cached finalization inverse.
///
/// Invariants held by construction: x, y, z < p - 1, gcd(x + y, p - 1) = 1,
/// and w * (x + y) = 1 mod (p - 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    pub(crate) x: BigUint,
    pub(crate) y: BigUint,
    pub(crate) z: BigUint,
    pub(crate) w: BigUint,
    pub(crate) params: DomainParams,
}

/// Public residue pair (P, Q).
///
/// Honest keys satisfy 1 <= P, Q <= p - 1, but received values may not;
/// [`validate_public_key`] checks exactly that before a session will accept
/// a peer key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub(crate) first: BigUint,
    pub(crate) second: BigUint,
    pub(crate) params: DomainParams,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keypair {
    pub private: PrivateKey,
    pub public: PublicKey,
}

impl PrivateKey {
    pub fn x(&self) -> &BigUint {
        &self.x
    }

    pub fn y(&self) -> &BigUint {
        &self.y
    }

    pub fn z(&self) -> &BigUint {
        &self.z
    }

    /// Finalization exponent w = (x + y)^-1 mod (p - 1).
    pub fn w(&self) -> &BigUint {
        &self.w
    }

    pub fn params(&self) -> &DomainParams {
        &self.params
    }

    /// Recomputes the public half from the private exponents.
    pub fn public_key(&self) -> PublicKey {
        let p = self.params.p();
        let g = self.params.g();
        PublicKey {
            first: g.modpow(&(&self.x + &self.z), p),
            second: g.modpow(&(&self.y + &self.z), p),
            params: self.params.clone(),
        }
    }
}

impl PublicKey {
    /// Wraps received residues without range validation; run
    /// [`validate_public_key`] before trusting the pair.
    pub fn new(first: BigUint, second: BigUint, params: DomainParams) -> Self {
        PublicKey { first, second, params }
    }

    /// First residue P = g^(x+z) mod p.
    pub fn first(&self) -> &BigUint {
        &self.first
    }

    /// Second residue Q = g^(y+z) mod p.
    pub fn second(&self) -> &BigUint {
        &self.second
    }

    pub fn params(&self) -> &DomainParams {
        &self.params
    }
}

/// Draws a fresh keypair: x and z uniform over [0, p - 2], y resampled until
/// x + y is a unit mod p - 1.
pub fn generate_keypair<R: Rng + ?Sized>(params: &DomainParams, rng: &mut R) -> Keypair {
    let x = modmath::sample_exponent(params, None, rng);
    let y = modmath::sample_exponent(params, Some(&x), rng);
    let z = modmath::sample_exponent(params, None, rng);
    keypair_from_exponents(params, &x, &y, &z)
        .expect("resampled y guarantees gcd(x + y, p - 1) = 1")
}

/// Builds a keypair from caller-chosen exponents, reduced mod p - 1.
///
/// Fails with the offending gcd when x + y is not invertible; such a triple
/// can never finish an exchange.
pub fn keypair_from_exponents(
    params: &DomainParams,
    x: &BigUint,
    y: &BigUint,
    z: &BigUint,
) -> Result<Keypair, MathError> {
    let order = params.order();
    let x = x % &order;
    let y = y % &order;
    let z = z % &order;
    let w = modmath::mod_inv(&((&x + &y) % &order), &order)?;
    let private = PrivateKey { x, y, z, w, params: params.clone() };
    let public = private.public_key();
    Ok(Keypair { private, public })
}

/// Range check on a received residue pair: both components in [1, p - 1].
pub fn validate_public_key(key: &PublicKey) -> bool {
    let p = key.params.p();
    let in_range = |v: &BigUint| !v.is_zero() && v < p;
    in_range(&key.first) && in_range(&key.second)
}
