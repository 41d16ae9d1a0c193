//! Classical single-exponent baselines over the same safe-prime groups.
//!
//! Diffie-Hellman and ElGamal as reference points: same [`DomainParams`],
//! same exponent sampling, one secret exponent per party instead of three.
//! The comparison harness and the demo subcommand use these to line the
//! three-exponent exchange up against the textbook constructions.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

use crate::modmath::{self, DomainParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    /// A group element argument fell outside [1, p - 1].
    #[error("{0} must lie in [1, p - 1]")]
    OutOfRange(&'static str),
}

/// One-exponent keypair: secret x, public g^x mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DhKeypair {
    secret: BigUint,
    public: BigUint,
    params: DomainParams,
}

impl DhKeypair {
    pub fn generate<R: Rng + ?Sized>(params: &DomainParams, rng: &mut R) -> Self {
        let secret = modmath::sample_exponent(params, None, rng);
        Self::from_exponent(params, &secret)
    }

    /// Builds from a caller-chosen exponent, reduced mod p - 1.
    pub fn from_exponent(params: &DomainParams, secret: &BigUint) -> Self {
        let secret = secret % params.order();
        let public = params.g().modpow(&secret, params.p());
        DhKeypair { secret, public, params: params.clone() }
    }

    pub fn secret(&self) -> &BigUint {
        &self.secret
    }

    pub fn public(&self) -> &BigUint {
        &self.public
    }

    pub fn params(&self) -> &DomainParams {
        &self.params
    }
}

/// Classic shared value peer_public^secret mod p.
pub fn dh_shared(local: &DhKeypair, peer_public: &BigUint) -> Result<BigUint, BaselineError> {
    let p = local.params.p();
    if peer_public.is_zero() || peer_public >= p {
        return Err(BaselineError::OutOfRange("peer public key"));
    }
    Ok(peer_public.modpow(&local.secret, p))
}

/// ElGamal ciphertext pair (g^y, m * P^y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElgamalCiphertext {
    pub ephemeral: BigUint,
    pub body: BigUint,
}

/// Encrypts group element m under the receiver's public residue with the
/// given ephemeral exponent y.
pub fn elgamal_encrypt(
    peer_public: &BigUint,
    m: &BigUint,
    ephemeral_exponent: &BigUint,
    params: &DomainParams,
) -> Result<ElgamalCiphertext, BaselineError> {
    let p = params.p();
    if m.is_zero() || m >= p {
        return Err(BaselineError::OutOfRange("message"));
    }
    if peer_public.is_zero() || peer_public >= p {
        return Err(BaselineError::OutOfRange("peer public key"));
    }
    let ephemeral = params.g().modpow(ephemeral_exponent, p);
    let mask = peer_public.modpow(ephemeral_exponent, p);
    Ok(ElgamalCiphertext { ephemeral, body: m * mask % p })
}

/// Recovers m = body * (ephemeral^x)^-1 mod p.
pub fn elgamal_decrypt(
    ciphertext: &ElgamalCiphertext,
    secret: &BigUint,
    params: &DomainParams,
) -> Result<BigUint, BaselineError> {
    let p = params.p();
    if ciphertext.ephemeral.is_zero() || &ciphertext.ephemeral >= p {
        return Err(BaselineError::OutOfRange("ephemeral"));
    }
    if ciphertext.body.is_zero() || &ciphertext.body >= p {
        return Err(BaselineError::OutOfRange("body"));
    }
    let mask = ciphertext.ephemeral.modpow(secret, p);
    let unmask = modmath::mod_inv(&mask, p).expect("nonzero residue mod prime inverts");
    Ok(&ciphertext.body * unmask % p)
}
