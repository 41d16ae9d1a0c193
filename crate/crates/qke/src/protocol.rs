//! Session state machine and key ratchet.
//!
//! One exchange per direction: each side raises the peer's residue pair to
//! its own (x, y), applies its finalization exponent w, and sends the result.
//! The incoming value still carries the sender's blinding term g^z, which the
//! receiver strips with g^-z before applying w again. Both sides then hold
//!
//!   g^(w_a * w_b * (x_a * x_b + y_a * y_b)) mod p,
//!
//! which is symmetric in the two keys. The exchange is unauthenticated and
//! the result is a raw group element; no key derivation step is applied, so
//! degenerate outcomes (shared value 1) are visible to the caller rather
//! than being hashed away.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::keys::{validate_public_key, Keypair, PublicKey};
use crate::modmath::{self, DomainParams};

/// Which side of the transport opened the exchange. The math is symmetric;
/// the role only drives message ordering in transports and transcripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Initiator,
    Responder,
}

/// Linear session progress; each operation admits exactly one state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionState {
    /// Keypair bound, peer key not yet seen.
    Fresh,
    /// Peer key accepted; ready to compute the outgoing message.
    PeerKeySet,
    /// Outgoing message computed; waiting on the incoming one.
    IntermediateComputed,
    /// Shared key available.
    Established,
}

/// A one-direction protocol message: (P_peer^x * Q_peer^y)^w mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntermediateValue(pub BigUint);

/// Final shared group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedSecret(BigUint);

impl SharedSecret {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    /// True when the exchange collapsed to the identity element. Happens
    /// exactly when x_a * x_b + y_a * y_b = 0 mod (p - 1); such a key is
    /// useless and callers must reject the session.
    pub fn is_degenerate(&self) -> bool {
        self.0.is_one()
    }

    /// Lowercase hex with no leading zeros, matching the key-file notation.
    pub fn to_hex(&self) -> String {
        format!("{:x}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    /// Operation invoked out of sequence.
    #[error("session is in state {found:?}, operation requires {expected:?}")]
    OutOfOrder { expected: SessionState, found: SessionState },
    /// Peer residues fail the [1, p - 1] range check.
    #[error("peer public key fails range validation")]
    InvalidPeerKey,
    /// Peer key was built over a different group.
    #[error("peer public key belongs to a different group")]
    ParamsMismatch,
    /// Incoming message outside [1, p - 1].
    #[error("incoming intermediate value must lie in [1, p - 1]")]
    IntermediateOutOfRange,
}

/// One side of an exchange. Create with [`Session::new`], then drive
/// [`receive_peer_public`](Session::receive_peer_public) →
/// [`compute_intermediate`](Session::compute_intermediate) →
/// [`finalize`](Session::finalize).
#[derive(Debug, Clone)]
pub struct Session {
    role: Role,
    keypair: Keypair,
    peer_public: Option<PublicKey>,
    outgoing: Option<IntermediateValue>,
    incoming: Option<IntermediateValue>,
    shared: Option<SharedSecret>,
    state: SessionState,
}

impl Session {
    pub fn new(role: Role, keypair: Keypair) -> Self {
        Session {
            role,
            keypair,
            peer_public: None,
            outgoing: None,
            incoming: None,
            shared: None,
            state: SessionState::Fresh,
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn params(&self) -> &DomainParams {
        self.keypair.private.params()
    }

    pub fn local_public(&self) -> &PublicKey {
        &self.keypair.public
    }

    pub fn peer_public(&self) -> Option<&PublicKey> {
        self.peer_public.as_ref()
    }

    /// Shared key, once [`finalize`](Session::finalize) has run.
    pub fn shared_secret(&self) -> Option<&SharedSecret> {
        self.shared.as_ref()
    }

    fn require_state(&self, expected: SessionState) -> Result<(), ProtocolError> {
        if self.state == expected {
            Ok(())
        } else {
            Err(ProtocolError::OutOfOrder { expected, found: self.state })
        }
    }

    /// Accepts the peer's residue pair after range and group checks.
    pub fn receive_peer_public(&mut self, peer: PublicKey) -> Result<(), ProtocolError> {
        self.require_state(SessionState::Fresh)?;
        if !validate_public_key(&peer) {
            return Err(ProtocolError::InvalidPeerKey);
        }
        if peer.params() != self.params() {
            return Err(ProtocolError::ParamsMismatch);
        }
        self.peer_public = Some(peer);
        self.state = SessionState::PeerKeySet;
        Ok(())
    }

    /// Computes the outgoing message (P_peer^x * Q_peer^y)^w mod p.
    pub fn compute_intermediate(&mut self) -> Result<IntermediateValue, ProtocolError> {
        self.require_state(SessionState::PeerKeySet)?;
        let peer = self.peer_public.as_ref().expect("set on entry to PeerKeySet");
        let p = self.params().p().clone();
        let sk = &self.keypair.private;
        let mixed = peer.first().modpow(sk.x(), &p) * peer.second().modpow(sk.y(), &p) % &p;
        let value = IntermediateValue(mixed.modpow(sk.w(), &p));
        self.outgoing = Some(value.clone());
        self.state = SessionState::IntermediateComputed;
        Ok(value)
    }

    /// Strips the local blinding term from the incoming message and applies
    /// w a final time, yielding the shared key.
    pub fn finalize(&mut self, incoming: IntermediateValue) -> Result<SharedSecret, ProtocolError> {
        self.require_state(SessionState::IntermediateComputed)?;
        let p = self.params().p().clone();
        if incoming.0.is_zero() || incoming.0 >= p {
            return Err(ProtocolError::IntermediateOutOfRange);
        }
        let sk = &self.keypair.private;
        let blind = self.params().g().modpow(sk.z(), &p);
        let unblind = modmath::mod_inv(&blind, &p).expect("nonzero residue mod prime inverts");
        let stripped = &incoming.0 * unblind % &p;
        let shared = SharedSecret(stripped.modpow(sk.w(), &p));
        self.incoming = Some(incoming);
        self.shared = Some(shared.clone());
        self.state = SessionState::Established;
        Ok(shared)
    }
}

/// Next ratchet key g^k0 * g^k1 mod p = g^(k0 + k1 mod (p - 1)).
///
/// Splitting the exponent across two stored halves means compromise of
/// either half alone does not reveal the combined key. Total over all
/// exponent pairs; k = 0 inputs simply contribute a factor of 1.
pub fn ratchet_next_key(params: &DomainParams, k0: &BigUint, k1: &BigUint) -> BigUint {
    let p = params.p();
    let g = params.g();
    g.modpow(k0, p) * g.modpow(k1, p) % p
}
