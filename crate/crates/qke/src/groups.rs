//! Embedded canonical groups.
//!
//! Each constant is the largest safe prime below 2^k paired with its
//! smallest primitive root. Benchmarks and demos use these so a run does
//! not pay safe-prime generation (seconds at 512 bits); construction still
//! revalidates every constant through [`DomainParams::new`].

use num_bigint::BigUint;

use crate::modmath::DomainParams;

fn from_hex(hex: &str) -> BigUint {
    BigUint::parse_bytes(hex.as_bytes(), 16).expect("embedded constant is valid hex")
}

fn build(p_hex: &str, g: u32, label: &str) -> DomainParams {
    DomainParams::new(from_hex(p_hex), g.into())
        .expect("embedded constant is a validated safe-prime group")
        .with_label(label)
}

/// The 5-bit teaching group p = 23, g = 5 used by demos and worked traces.
pub fn demo23() -> DomainParams {
    build("17", 5, "demo-23")
}

/// Largest 64-bit safe prime, generator 2.
pub fn safe64() -> DomainParams {
    build("fffffffffffffa43", 2, "safe-64")
}

/// Largest 128-bit safe prime, generator 5.
pub fn safe128() -> DomainParams {
    build("ffffffffffffffffffffffffffffc3a7", 5, "safe-128")
}

/// Largest 256-bit safe prime, generator 5.
pub fn safe256() -> DomainParams {
    build(
        "ffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff72ef",
        5,
        "safe-256",
    )
}

/// Largest 512-bit safe prime, generator 2.
pub fn safe512() -> DomainParams {
    build(
        "ffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff\
         ffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff6b1b",
        2,
        "safe-512",
    )
}

/// Embedded group for a supported benchmark size, if any.
pub fn bench_group(bits: u64) -> Option<DomainParams> {
    match bits {
        64 => Some(safe64()),
        128 => Some(safe128()),
        256 => Some(safe256()),
        512 => Some(safe512()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_groups_validate_and_have_exact_sizes() {
        assert_eq!(demo23().p(), &BigUint::from(23u32));
        for (params, bits) in [
            (safe64(), 64),
            (safe128(), 128),
            (safe256(), 256),
            (safe512(), 512),
        ] {
            assert_eq!(params.bits(), bits);
            assert_eq!(bench_group(bits).as_ref(), Some(&params));
        }
        assert_eq!(bench_group(100), None);
    }

    #[test]
    fn embedded_generators_are_smallest() {
        use crate::modmath::validate_primitive_root;
        for params in [demo23(), safe64(), safe128(), safe256(), safe512()] {
            let g = params.g().clone();
            let mut candidate = BigUint::from(2u32);
            while candidate < g {
                assert!(!validate_primitive_root(&candidate, &params).unwrap());
                candidate += 1u32;
            }
        }
    }
}
