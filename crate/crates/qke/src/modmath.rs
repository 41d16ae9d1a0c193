//! Modular arithmetic over safe-prime groups.
//!
//! Everything else in the crate is built from the operations here: modular
//! exponentiation and inversion, primality testing, safe-prime generation,
//! primitive-root validation, and exponent sampling. Values are
//! arbitrary-precision unsigned integers ([`BigUint`]).
//!
//! A *safe prime* is a prime p = 2q + 1 with q prime. The multiplicative
//! group mod p then has order p - 1 = 2q, so an element g is a generator
//! exactly when g^2 != 1 and g^q != 1 (mod p), which is what
//! [`validate_primitive_root`] checks.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

/// Default Miller-Rabin round count used by validating constructors.
pub const DEFAULT_PRIME_ROUNDS: u32 = 40;

/// Minimum bit length accepted by [`generate_safe_prime`].
pub const MIN_SAFE_PRIME_BITS: u64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    /// Modulus below 2; no multiplicative structure to work in.
    #[error("modulus must be at least 2")]
    ModulusTooSmall,
    /// Inversion target shares a factor with the modulus.
    #[error("value is not invertible: gcd {gcd} with modulus {modulus}")]
    NotInvertible { gcd: BigUint, modulus: BigUint },
    /// Candidate generator outside the usable range for the given prime.
    #[error("generator {g} outside [2, p-1] for p = {p}")]
    GeneratorOutOfRange { g: BigUint, p: BigUint },
    /// A claimed prime failed a primality or safety check.
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    /// p passed primality but (p - 1) / 2 did not.
    #[error("{p} is not a safe prime: (p - 1) / 2 is composite")]
    NotSafePrime { p: BigUint },
    /// Group generator is not a primitive root mod p.
    #[error("{g} is not a primitive root mod {p}")]
    NotPrimitiveRoot { g: BigUint, p: BigUint },
    /// Requested size too small to hold a safe prime with a usable group.
    #[error("bit length {bits} below minimum {min}")]
    BitsTooSmall { bits: u64, min: u64 },
}

/// Computes base^exponent mod modulus. Requires modulus >= 2.
pub fn mod_exp(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint, MathError> {
    if modulus < &BigUint::from(2u32) {
        return Err(MathError::ModulusTooSmall);
    }
    Ok(base.modpow(exponent, modulus))
}

/// Computes the multiplicative inverse of `a` mod `modulus` via extended gcd.
///
/// Fails with the offending gcd when `a` and the modulus share a factor;
/// in particular a = 0 reports gcd = modulus.
pub fn mod_inv(a: &BigUint, modulus: &BigUint) -> Result<BigUint, MathError> {
    if modulus < &BigUint::from(2u32) {
        return Err(MathError::ModulusTooSmall);
    }
    let reduced = a % modulus;
    let ext = BigInt::from(reduced).extended_gcd(&BigInt::from(modulus.clone()));
    if !ext.gcd.is_one() {
        return Err(MathError::NotInvertible {
            gcd: ext.gcd.magnitude().clone(),
            modulus: modulus.clone(),
        });
    }
    let inv = ext.x.mod_floor(&BigInt::from(modulus.clone()));
    Ok(inv.magnitude().clone())
}

/// Primality test, exact for every input that fits in 64 bits.
///
/// Below 2^16 this is trial division. Up to 2^64 it is Miller-Rabin with
/// the first 12 primes as witnesses, a set known to be deterministic far
/// beyond that range. Larger inputs get Miller-Rabin with the first
/// `rounds` primes as bases: deterministic for a given input, error bound
/// at most 4^-rounds.
pub fn is_probable_prime(n: &BigUint, rounds: u32) -> bool {
    let rounds = rounds.max(1);
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    miller_rabin(n, rounds)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 1 << 16 {
        trial_division_is_prime(n)
    } else {
        miller_rabin_u64(n)
    }
}

fn trial_division_is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Deterministic Miller-Rabin for n >= 2^16 in native arithmetic. The
/// witness set covers everything below 3.3 * 10^24, so all of u64.
fn miller_rabin_u64(n: u64) -> bool {
    if n % 2 == 0 {
        return false;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witnesses: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witnesses;
            }
        }
        return false;
    }
    true
}

fn mulmod_u64(a: u64, b: u64, n: u64) -> u64 {
    (a as u128 * b as u128 % n as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, n);
        }
        base = mulmod_u64(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Miller-Rabin on odd n > 2^64 with the first `rounds` primes as bases.
fn miller_rabin(n: &BigUint, rounds: u32) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("n - 1 of odd n >= 3 is nonzero");
    let d = &n_minus_1 >> s;
    'bases: for base in small_primes(rounds as usize) {
        let mut x = BigUint::from(base).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// First `count` primes, ascending.
fn small_primes(count: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes.iter().all(|p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// All 168 primes below 1000, used as a trial-division prescreen.
fn prescreen_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| small_primes(168))
}

/// Generates a safe prime p = 2q + 1 with exactly `bits` bits, returning (p, q).
///
/// Candidates for q are drawn with the top and low bits forced so p lands on
/// the requested size; q = 1 mod 6 is rejected up front since it forces
/// 3 | p. Expected cost grows with bits^2 / log-density; 512-bit generation
/// takes seconds, which is why the CLI ships embedded groups for benchmarks.
pub fn generate_safe_prime<R: Rng + ?Sized>(
    bits: u64,
    rng: &mut R,
) -> Result<(BigUint, BigUint), MathError> {
    if bits < MIN_SAFE_PRIME_BITS {
        return Err(MathError::BitsTooSmall { bits, min: MIN_SAFE_PRIME_BITS });
    }
    if bits <= 64 {
        let (p, q) = generate_safe_prime_u64(bits, rng);
        return Ok((p.into(), q.into()));
    }
    let top = BigUint::one() << (bits - 2);
    loop {
        let mut q = rng.gen_biguint(bits - 1);
        q |= &top;
        q |= BigUint::one();
        if (&q % 6u32).to_u64() != Some(5) {
            continue;
        }
        if has_small_factor(&q) || !is_probable_prime(&q, DEFAULT_PRIME_ROUNDS) {
            continue;
        }
        let p = (&q << 1) | BigUint::one();
        if has_small_factor(&p) || !is_probable_prime(&p, DEFAULT_PRIME_ROUNDS) {
            continue;
        }
        return Ok((p, q));
    }
}

/// Native-width generation path; bits in [5, 64] so q fits in 63 bits.
fn generate_safe_prime_u64<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> (u64, u64) {
    let qbits = bits - 1;
    let top = 1u64 << (qbits - 1);
    let mask = (1u64 << qbits) - 1;
    let table = prescreen_primes();
    let has_factor = |v: u64| table.iter().any(|&d| d < v && v % d == 0);
    loop {
        let q = (rng.gen::<u64>() & mask) | top | 1;
        if q % 6 != 5 {
            continue;
        }
        if has_factor(q) || !is_prime_u64(q) {
            continue;
        }
        let p = (q << 1) | 1;
        if has_factor(p) || !is_prime_u64(p) {
            continue;
        }
        return (p, q);
    }
}

/// Cheap pre-screen: divisibility by a prime below 1000 (for n above them all).
fn has_small_factor(n: &BigUint) -> bool {
    prescreen_primes().iter().any(|p| (n % p).is_zero())
}

/// Checks whether g generates the full group mod p for safe prime p = 2q + 1.
///
/// Two exponentiations suffice: g is a primitive root iff g^2 != 1 and
/// g^q != 1. Accepts g in [2, p-1]; g = p-1 is in range but always fails
/// (it squares to 1).
pub fn validate_primitive_root(g: &BigUint, params: &DomainParams) -> Result<bool, MathError> {
    let p = params.p();
    if g < &BigUint::from(2u32) || g > &(p - 1u32) {
        return Err(MathError::GeneratorOutOfRange { g: g.clone(), p: p.clone() });
    }
    let one = BigUint::one();
    Ok(g.modpow(&BigUint::from(2u32), p) != one && g.modpow(params.q(), p) != one)
}

/// Draws a uniform exponent from [0, p - 2], i.e. the full residue ring mod p - 1.
///
/// With `require_unit_sum_with = Some(s)`, redraws until the result o
/// satisfies gcd(o + s, p - 1) = 1, which is how keypair generation keeps
/// x + y invertible while leaving x fixed.
pub fn sample_exponent<R: Rng + ?Sized>(
    params: &DomainParams,
    require_unit_sum_with: Option<&BigUint>,
    rng: &mut R,
) -> BigUint {
    let order = params.order();
    loop {
        let drawn = rng.gen_biguint_below(&order);
        match require_unit_sum_with {
            None => return drawn,
            Some(s) => {
                let sum = (&drawn + s) % &order;
                if sum.gcd(&order).is_one() {
                    return drawn;
                }
            }
        }
    }
}

/// A safe-prime group: modulus p = 2q + 1, subgroup order q, generator g.
///
/// Construction validates everything, so a value of this type is always a
/// usable group. Equality ignores the optional label.
#[derive(Debug, Clone)]
pub struct DomainParams {
    p: BigUint,
    q: BigUint,
    g: BigUint,
    label: Option<String>,
}

impl PartialEq for DomainParams {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.q == other.q && self.g == other.g
    }
}

impl Eq for DomainParams {}

impl DomainParams {
    /// Validates p (prime, safe) and g (range, primitive root) and builds the group.
    pub fn new(p: BigUint, g: BigUint) -> Result<Self, MathError> {
        if p < BigUint::from(5u32) || !is_probable_prime(&p, DEFAULT_PRIME_ROUNDS) {
            return Err(MathError::NotPrime(p));
        }
        let q: BigUint = (&p - 1u32) >> 1;
        if !is_probable_prime(&q, DEFAULT_PRIME_ROUNDS) {
            return Err(MathError::NotSafePrime { p });
        }
        if g < BigUint::from(2u32) || g > &p - 2u32 {
            return Err(MathError::GeneratorOutOfRange { g, p });
        }
        let params = DomainParams { p, q, g, label: None };
        if !validate_primitive_root(&params.g.clone(), &params)? {
            return Err(MathError::NotPrimitiveRoot { g: params.g, p: params.p });
        }
        Ok(params)
    }

    /// Generates a fresh group of exactly `bits` bits with the smallest
    /// primitive root as generator.
    pub fn generate<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> Result<Self, MathError> {
        let (p, q) = generate_safe_prime(bits, rng)?;
        let mut params = DomainParams { p, q, g: BigUint::from(2u32), label: None };
        loop {
            if validate_primitive_root(&params.g.clone(), &params)? {
                return Ok(params);
            }
            params.g += 1u32;
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Group modulus p.
    pub fn p(&self) -> &BigUint {
        &self.p
    }

    /// Sophie Germain factor q = (p - 1) / 2.
    pub fn q(&self) -> &BigUint {
        &self.q
    }

    /// Generator of the full multiplicative group.
    pub fn g(&self) -> &BigUint {
        &self.g
    }

    /// Exponent modulus p - 1; private exponents live mod this.
    pub fn order(&self) -> BigUint {
        &self.p - 1u32
    }

    pub fn bits(&self) -> u64 {
        self.p.bits()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
}
