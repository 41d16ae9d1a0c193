//! Desk-scale adversary harness.
//!
//! On groups small enough to take discrete logs directly, every public
//! residue collapses to a linear constraint on exponents mod p - 1. This
//! module builds the three constraint systems an adversary can write down,
//! then exhaustively counts the private-key triples consistent with them:
//!
//! - [`AdversaryModel::PublicOnly`]: Alice's public pair alone, two
//!   constraints x + z = c1, y + z = c2.
//! - [`AdversaryModel::Channel`]: both public pairs plus both transit
//!   messages, six constraints over eight unknowns.
//! - [`AdversaryModel::Insider`]: a legitimate peer using its own secrets
//!   plus the message it received, three constraints over four unknowns.
//!
//! The finalization exponent w can be treated two ways, and the choice
//! changes the counts materially. [`WInterpretation::DerivedFromKey`] binds
//! w = (x + y)^-1 mod (p - 1), which is what the protocol actually computes.
//! [`WInterpretation::FreeVariable`] lets w range over anything that makes
//! its equations solvable, i.e. counts w as an independent unknown. The
//! harness reports measured counts under both and draws no conclusions.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::keys::{PrivateKey, PublicKey};
use crate::modmath::{self, DomainParams};
use crate::protocol::IntermediateValue;

/// Discrete logs refuse moduli above this many bits.
pub const DLOG_MODULUS_CAP_BITS: u64 = 40;

/// Exhaustive enumeration refuses group orders above this.
pub const ENUMERATION_ORDER_CAP: u64 = 1 << 16;

/// Explicit candidates retained in a report; the count is always exact.
pub const MAX_REPORTED_CANDIDATES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    /// Modulus too large for the baby-step giant-step table.
    #[error("modulus has {bits} bits, discrete logs are capped at {cap} bits")]
    DlogScaleExceeded { bits: u64, cap: u64 },
    /// Group order too large to sweep exhaustively.
    #[error("group order {order} exceeds the enumeration cap {cap}")]
    EnumerationScaleExceeded { order: BigUint, cap: u64 },
    /// Discrete-log target outside [1, p - 1].
    #[error("target must lie in [1, p - 1]")]
    TargetOutOfRange,
    /// Inputs built over different groups.
    #[error("all inputs must share one group")]
    MixedGroups,
}

/// Computes e with g^e = target mod p by baby-step giant-step.
///
/// O(sqrt(p)) time and space; the cap keeps the table under a few hundred
/// megabytes. Deterministic, so tests can freeze expected exponents.
pub fn discrete_log(target: &BigUint, params: &DomainParams) -> Result<BigUint, AnalysisError> {
    if params.bits() > DLOG_MODULUS_CAP_BITS {
        return Err(AnalysisError::DlogScaleExceeded {
            bits: params.bits(),
            cap: DLOG_MODULUS_CAP_BITS,
        });
    }
    let p = params.p().to_u64().expect("modulus fits after bit cap");
    let g = params.g().to_u64().expect("generator below modulus");
    let t = match target.to_u64() {
        Some(t) if t >= 1 && t < p => t,
        _ => return Err(AnalysisError::TargetOutOfRange),
    };
    let order = p - 1;
    let m = isqrt_ceil(order);
    let mut table: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
    let mut acc = 1u64;
    for j in 0..m {
        table.entry(acc).or_insert(j);
        acc = mulmod(acc, g, p);
    }
    // acc is now g^m; its inverse is g^(order - m).
    let giant = modmath::mod_exp(&g.into(), &(order - m).into(), params.p())
        .expect("validated modulus")
        .to_u64()
        .expect("residue fits");
    let mut e = t;
    for i in 0..=m {
        if let Some(j) = table.get(&e) {
            return Ok(BigUint::from((i * m + j) % order));
        }
        e = mulmod(e, giant, p);
    }
    unreachable!("g generates the full group, every target in [1, p-1] has a log")
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn isqrt_ceil(n: u64) -> u64 {
    let mut m = (n as f64).sqrt() as u64;
    while m * m < n {
        m += 1;
    }
    while m > 1 && (m - 1) * (m - 1) >= n {
        m -= 1;
    }
    m.max(1)
}

/// Whose observations the constraint system encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryModel {
    /// Alice's public pair only: 2 constraints, 3 unknowns.
    PublicOnly,
    /// Both public pairs and both messages: 6 constraints, 8 unknowns.
    Channel,
    /// A peer's own secrets plus the message it received: 3 constraints, 4 unknowns.
    Insider,
}

/// How the finalization exponent w is treated during enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WInterpretation {
    /// w = (x + y)^-1 mod (p - 1), as the protocol computes it.
    DerivedFromKey,
    /// w is an independent unknown; a candidate survives if any w value
    /// satisfies its equations.
    FreeVariable,
}

/// Linear constraints on Alice's exponents mod p - 1.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    modulus: BigUint,
    residues: Vec<BigUint>,
    model: AdversaryModel,
    insider_key: Option<PrivateKey>,
    interpretation: WInterpretation,
}

impl ConstraintSystem {
    /// Exponent modulus p - 1.
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Constraint residues c1..cN in model order.
    pub fn residues(&self) -> &[BigUint] {
        &self.residues
    }

    pub fn model(&self) -> AdversaryModel {
        self.model
    }

    /// Eve's own key, present under [`AdversaryModel::Insider`] only.
    pub fn insider_key(&self) -> Option<&PrivateKey> {
        self.insider_key.as_ref()
    }

    pub fn interpretation(&self) -> WInterpretation {
        self.interpretation
    }

    pub fn with_interpretation(mut self, interpretation: WInterpretation) -> Self {
        self.interpretation = interpretation;
        self
    }
}

/// Constraints visible to anyone holding Alice's public key:
/// x + z = c1, y + z = c2 with c1 = dlog(P), c2 = dlog(Q).
pub fn constraints_from_public_key(pk: &PublicKey) -> Result<ConstraintSystem, AnalysisError> {
    let params = pk.params();
    let c1 = discrete_log(pk.first(), params)?;
    let c2 = discrete_log(pk.second(), params)?;
    Ok(ConstraintSystem {
        modulus: params.order(),
        residues: vec![c1, c2],
        model: AdversaryModel::PublicOnly,
        insider_key: None,
        interpretation: WInterpretation::DerivedFromKey,
    })
}

/// Constraints visible to a full channel observer: both public pairs plus
/// both transit messages. Residues in order c1..c6 where c5 = dlog(msg_ab)
/// = w_a(x_a x_b + y_a y_b) + z_b and c6 = dlog(msg_ba) symmetrically.
pub fn constraints_from_transcript(
    pk_a: &PublicKey,
    pk_b: &PublicKey,
    msg_ab: &IntermediateValue,
    msg_ba: &IntermediateValue,
) -> Result<ConstraintSystem, AnalysisError> {
    let params = pk_a.params();
    if pk_b.params() != params {
        return Err(AnalysisError::MixedGroups);
    }
    let residues = vec![
        discrete_log(pk_a.first(), params)?,
        discrete_log(pk_a.second(), params)?,
        discrete_log(pk_b.first(), params)?,
        discrete_log(pk_b.second(), params)?,
        discrete_log(&msg_ab.0, params)?,
        discrete_log(&msg_ba.0, params)?,
    ];
    Ok(ConstraintSystem {
        modulus: params.order(),
        residues,
        model: AdversaryModel::Channel,
        insider_key: None,
        interpretation: WInterpretation::DerivedFromKey,
    })
}

/// Constraints available to a legitimate peer ("Eve") targeting Alice:
/// x + z = c1, y + z = c2, and w(x x_e + y y_e) = c3, where c3 is the
/// message Eve received with her own blinding term g^z_e stripped.
pub fn constraints_from_insider(
    pk_a: &PublicKey,
    eve_key: &PrivateKey,
    msg_from_alice: &IntermediateValue,
) -> Result<ConstraintSystem, AnalysisError> {
    let params = pk_a.params();
    if eve_key.params() != params {
        return Err(AnalysisError::MixedGroups);
    }
    let p = params.p();
    let blind = params.g().modpow(eve_key.z(), p);
    let unblind = modmath::mod_inv(&blind, p).expect("nonzero residue mod prime inverts");
    let stripped = &msg_from_alice.0 * unblind % p;
    let residues = vec![
        discrete_log(pk_a.first(), params)?,
        discrete_log(pk_a.second(), params)?,
        discrete_log(&stripped, params)?,
    ];
    Ok(ConstraintSystem {
        modulus: params.order(),
        residues,
        model: AdversaryModel::Insider,
        insider_key: Some(eve_key.clone()),
        interpretation: WInterpretation::DerivedFromKey,
    })
}

/// Exhaustive solution-space measurement for one constraint system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionReport {
    /// Exact number of admissible (x, y, z) triples for the targeted key.
    pub candidate_count: u64,
    /// Whether the supplied true key appears among the solutions. Always
    /// false when no true key was given.
    pub contains_true_key: bool,
    /// The first [`MAX_REPORTED_CANDIDATES`] triples in ascending z order.
    pub candidates: Vec<(BigUint, BigUint, BigUint)>,
    pub interpretation: WInterpretation,
}

/// Counts every private-key triple consistent with the system and the
/// key-validity rule gcd(x + y, p - 1) = 1.
///
/// Enumeration sweeps the free variable z (PublicOnly, Insider) or the pair
/// (z_a, z_b) (Channel, quadratic in p); everything else is substitution.
/// A Channel candidate is Alice's triple; it counts once no matter how many
/// peer reconstructions support it.
pub fn enumerate_solutions(
    system: &ConstraintSystem,
    true_key: Option<&PrivateKey>,
) -> Result<SolutionReport, AnalysisError> {
    let n = match system.modulus.to_u64() {
        Some(n) if n <= ENUMERATION_ORDER_CAP => n,
        _ => {
            return Err(AnalysisError::EnumerationScaleExceeded {
                order: system.modulus.clone(),
                cap: ENUMERATION_ORDER_CAP,
            })
        }
    };
    let c: Vec<u64> = system
        .residues
        .iter()
        .map(|r| r.to_u64().expect("residues are reduced mod the order"))
        .collect();
    let truth: Option<(u64, u64, u64)> = true_key.map(|k| {
        (
            k.x().to_u64().expect("true key exponent fits at desk scale"),
            k.y().to_u64().expect("true key exponent fits at desk scale"),
            k.z().to_u64().expect("true key exponent fits at desk scale"),
        )
    });

    let mut report = SolutionReport {
        candidate_count: 0,
        contains_true_key: false,
        candidates: Vec::new(),
        interpretation: system.interpretation,
    };
    let mut admit = |x: u64, y: u64, z: u64| {
        report.candidate_count += 1;
        if truth == Some((x, y, z)) {
            report.contains_true_key = true;
        }
        if report.candidates.len() < MAX_REPORTED_CANDIDATES {
            report.candidates.push((x.into(), y.into(), z.into()));
        }
    };

    match system.model {
        AdversaryModel::PublicOnly => {
            for z in 0..n {
                let x = (c[0] + n - z) % n;
                let y = (c[1] + n - z) % n;
                if gcd((x + y) % n, n) == 1 {
                    admit(x, y, z);
                }
            }
        }
        AdversaryModel::Insider => {
            let eve = system.insider_key.as_ref().expect("insider systems carry Eve's key");
            let xe = eve.x().to_u64().expect("desk-scale exponent");
            let ye = eve.y().to_u64().expect("desk-scale exponent");
            for z in 0..n {
                let x = (c[0] + n - z) % n;
                let y = (c[1] + n - z) % n;
                let sum = (x + y) % n;
                if gcd(sum, n) != 1 {
                    continue;
                }
                let s = (x * xe + y * ye) % n;
                let satisfiable = match system.interpretation {
                    WInterpretation::DerivedFromKey => {
                        let w = inv(sum, n).expect("sum is a unit");
                        mulmod(w, s, n) == c[2]
                    }
                    WInterpretation::FreeVariable => c[2] % gcd(s, n) == 0,
                };
                if satisfiable {
                    admit(x, y, z);
                }
            }
        }
        AdversaryModel::Channel => {
            for za in 0..n {
                let xa = (c[0] + n - za) % n;
                let ya = (c[1] + n - za) % n;
                let sum_a = (xa + ya) % n;
                if gcd(sum_a, n) != 1 {
                    continue;
                }
                let wa = inv(sum_a, n);
                let mut witnessed = false;
                for zb in 0..n {
                    let xb = (c[2] + n - zb) % n;
                    let yb = (c[3] + n - zb) % n;
                    let sum_b = (xb + yb) % n;
                    if gcd(sum_b, n) != 1 {
                        continue;
                    }
                    let s = (mulmod(xa, xb, n) + mulmod(ya, yb, n)) % n;
                    let ok = match system.interpretation {
                        WInterpretation::DerivedFromKey => {
                            let wa = wa.expect("sum_a is a unit");
                            let wb = inv(sum_b, n).expect("sum_b is a unit");
                            (mulmod(wa, s, n) + zb) % n == c[4]
                                && (mulmod(wb, s, n) + za) % n == c[5]
                        }
                        WInterpretation::FreeVariable => {
                            let d = gcd(s, n);
                            (c[4] + n - zb) % n % d == 0 && (c[5] + n - za) % n % d == 0
                        }
                    };
                    if ok {
                        witnessed = true;
                        break;
                    }
                }
                if witnessed {
                    admit(xa, ya, za);
                }
            }
        }
    }
    Ok(report)
}

fn gcd(a: u64, b: u64) -> u64 {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

/// Inverse of a mod n when gcd(a, n) = 1.
fn inv(a: u64, n: u64) -> Option<u64> {
    let (mut r0, mut r1) = (n as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(n as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::keypair_from_exponents;
    use crate::protocol::{Role, Session};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn group23() -> DomainParams {
        DomainParams::new(23u32.into(), 5u32.into()).unwrap()
    }

    struct Trace {
        alice: crate::keys::Keypair,
        bob: crate::keys::Keypair,
        msg_ab: IntermediateValue,
        msg_ba: IntermediateValue,
    }

    fn run_exchange(params: &DomainParams, a: (u32, u32, u32), b: (u32, u32, u32)) -> Trace {
        let alice = keypair_from_exponents(params, &a.0.into(), &a.1.into(), &a.2.into()).unwrap();
        let bob = keypair_from_exponents(params, &b.0.into(), &b.1.into(), &b.2.into()).unwrap();
        let mut sa = Session::new(Role::Initiator, alice.clone());
        let mut sb = Session::new(Role::Responder, bob.clone());
        sa.receive_peer_public(bob.public.clone()).unwrap();
        sb.receive_peer_public(alice.public.clone()).unwrap();
        let msg_ab = sa.compute_intermediate().unwrap();
        let msg_ba = sb.compute_intermediate().unwrap();
        Trace { alice, bob, msg_ab, msg_ba }
    }

    fn worked_trace() -> Trace {
        run_exchange(&group23(), (3, 6, 4), (7, 8, 2))
    }

    #[test]
    fn discrete_log_worked_values() {
        let params = group23();
        let cases = [(17u32, 7u32), (1, 0), (9, 10), (11, 9), (15, 17), (21, 13), (5, 1)];
        for (t, e) in cases {
            assert_eq!(discrete_log(&t.into(), &params).unwrap(), e.into(), "dlog({t})");
        }
    }

    #[test]
    fn discrete_log_range_and_scale_errors() {
        let params = group23();
        for bad in [0u32, 23, 24] {
            assert_eq!(
                discrete_log(&bad.into(), &params),
                Err(AnalysisError::TargetOutOfRange)
            );
        }
        let big = crate::groups::safe64();
        assert_eq!(
            discrete_log(&17u32.into(), &big),
            Err(AnalysisError::DlogScaleExceeded { bits: 64, cap: DLOG_MODULUS_CAP_BITS })
        );
    }

    #[test]
    fn discrete_log_matches_exhaustive_oracle() {
        for p in [23u64, 59, 107] {
            let params = DomainParams::new(p.into(), smallest_root(p).into()).unwrap();
            let g = params.g().to_u64().unwrap();
            let mut acc = 1u64;
            for e in 0..p - 1 {
                assert_eq!(
                    discrete_log(&acc.into(), &params).unwrap(),
                    e.into(),
                    "p={p} target={acc}"
                );
                acc = acc * g % p;
            }
        }
    }

    fn smallest_root(p: u64) -> u64 {
        let params = DomainParams::new(p.into(), 2u32.into())
            .or_else(|_| DomainParams::new(p.into(), 3u32.into()))
            .or_else(|_| DomainParams::new(p.into(), 5u32.into()))
            .or_else(|_| DomainParams::new(p.into(), 6u32.into()))
            .unwrap();
        params.g().to_u64().unwrap()
    }

    #[test]
    fn public_key_constraints_worked() {
        let trace = worked_trace();
        let sys = constraints_from_public_key(&trace.alice.public).unwrap();
        assert_eq!(sys.modulus(), &BigUint::from(22u32));
        assert_eq!(sys.residues(), &[BigUint::from(7u32), BigUint::from(10u32)]);
        assert_eq!(sys.model(), AdversaryModel::PublicOnly);
        assert!(sys.insider_key().is_none());
    }

    #[test]
    fn public_key_constraints_of_trivial_key() {
        let params = group23();
        let kp = keypair_from_exponents(&params, &0u32.into(), &1u32.into(), &0u32.into()).unwrap();
        let sys = constraints_from_public_key(&kp.public).unwrap();
        assert_eq!(sys.residues(), &[BigUint::from(0u32), BigUint::from(1u32)]);
    }

    #[test]
    fn shifted_keys_yield_identical_systems() {
        // (x, y, z) -> (x - d, y - d, z + d) leaves both sums unchanged.
        let params = group23();
        let base = keypair_from_exponents(&params, &3u32.into(), &6u32.into(), &4u32.into()).unwrap();
        let shifted = keypair_from_exponents(&params, &1u32.into(), &4u32.into(), &6u32.into()).unwrap();
        let s1 = constraints_from_public_key(&base.public).unwrap();
        let s2 = constraints_from_public_key(&shifted.public).unwrap();
        assert_eq!(s1.residues(), s2.residues());
    }

    #[test]
    fn transcript_constraints_worked() {
        let trace = worked_trace();
        let sys = constraints_from_transcript(
            &trace.alice.public,
            &trace.bob.public,
            &trace.msg_ab,
            &trace.msg_ba,
        )
        .unwrap();
        let want: Vec<BigUint> =
            [7u32, 10, 9, 10, 17, 13].iter().map(|&v| v.into()).collect();
        assert_eq!(sys.residues(), &want[..]);
        assert_eq!(sys.model(), AdversaryModel::Channel);

        // True assignment satisfies all six residues by direct substitution.
        let n = 22u64;
        let (xa, ya, za, wa) = (3u64, 6, 4, 5);
        let (xb, yb, zb, wb) = (7u64, 8, 2, 3);
        let s = (xa * xb + ya * yb) % n;
        assert_eq!((xa + za) % n, 7);
        assert_eq!((ya + za) % n, 10);
        assert_eq!((xb + zb) % n, 9);
        assert_eq!((yb + zb) % n, 10);
        assert_eq!((wa * s + zb) % n, 17);
        assert_eq!((wb * s + za) % n, 13);
    }

    #[test]
    fn insider_constraints_worked() {
        let trace = worked_trace();
        let sys =
            constraints_from_insider(&trace.alice.public, &trace.bob.private, &trace.msg_ab)
                .unwrap();
        let want: Vec<BigUint> = [7u32, 10, 15].iter().map(|&v| v.into()).collect();
        assert_eq!(sys.residues(), &want[..]);
        assert_eq!(sys.model(), AdversaryModel::Insider);
        assert_eq!(sys.insider_key(), Some(&trace.bob.private));
        // True key satisfies c3 under the derived interpretation.
        assert_eq!(5 * (3 * 7 + 6 * 8) % 22, 15);
    }

    #[test]
    fn public_enumeration_worked_count() {
        let trace = worked_trace();
        let sys = constraints_from_public_key(&trace.alice.public).unwrap();
        let report = enumerate_solutions(&sys, Some(&trace.alice.private)).unwrap();
        assert_eq!(report.candidate_count, 20);
        assert!(report.contains_true_key);
        assert_eq!(report.candidates.len(), 20);
        // Exactly the shift orbit {(c1 - z, c2 - z, z)} filtered by validity:
        // z = 3 and z = 14 make x + y = 22 - 2z share a factor with 22.
        let excluded: Vec<u64> = (0..22)
            .filter(|z| num_integer::gcd((7 + 10 + 2 * (22 - z)) % 22, 22) != 1)
            .collect();
        assert_eq!(excluded, vec![3, 14]);
        for (x, y, z) in &report.candidates {
            let z64 = z.to_u64().unwrap();
            assert_eq!(x, &BigUint::from((7 + 22 - z64) % 22));
            assert_eq!(y, &BigUint::from((10 + 22 - z64) % 22));
            assert!(!excluded.contains(&z64));
        }
    }

    #[test]
    fn insider_enumeration_derived_is_unique() {
        let trace = worked_trace();
        let sys =
            constraints_from_insider(&trace.alice.public, &trace.bob.private, &trace.msg_ab)
                .unwrap();
        let report = enumerate_solutions(&sys, Some(&trace.alice.private)).unwrap();
        assert_eq!(report.interpretation, WInterpretation::DerivedFromKey);
        assert_eq!(report.candidate_count, 1);
        assert!(report.contains_true_key);
        assert_eq!(
            report.candidates,
            vec![(3u32.into(), 6u32.into(), 4u32.into())]
        );
    }

    #[test]
    fn insider_enumeration_free_matches_zw_brute_force() {
        let trace = worked_trace();
        let sys =
            constraints_from_insider(&trace.alice.public, &trace.bob.private, &trace.msg_ab)
                .unwrap()
                .with_interpretation(WInterpretation::FreeVariable);
        let report = enumerate_solutions(&sys, Some(&trace.alice.private)).unwrap();

        // Independent oracle: scan every (z, w) pair and collect triples.
        let n = 22u64;
        let (c1, c2, c3) = (7u64, 10, 15);
        let (xe, ye) = (7u64, 8);
        let mut oracle: Vec<(u64, u64, u64)> = Vec::new();
        for z in 0..n {
            let x = (c1 + n - z) % n;
            let y = (c2 + n - z) % n;
            if num_integer::gcd((x + y) % n, n) != 1 {
                continue;
            }
            let s = (x * xe + y * ye) % n;
            if (0..n).any(|w| w * s % n == c3) {
                oracle.push((x, y, z));
            }
        }
        assert_eq!(report.candidate_count, oracle.len() as u64);
        assert_eq!(report.candidate_count, 9);
        assert!(report.candidate_count > 1, "free interpretation must widen the space");
        assert!(report.contains_true_key);
        let got: Vec<(u64, u64, u64)> = report
            .candidates
            .iter()
            .map(|(x, y, z)| {
                (x.to_u64().unwrap(), y.to_u64().unwrap(), z.to_u64().unwrap())
            })
            .collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn channel_enumeration_worked_counts() {
        let trace = worked_trace();
        let sys = constraints_from_transcript(
            &trace.alice.public,
            &trace.bob.public,
            &trace.msg_ab,
            &trace.msg_ba,
        )
        .unwrap();
        let derived = enumerate_solutions(&sys, Some(&trace.alice.private)).unwrap();
        assert_eq!(derived.candidate_count, 1);
        assert!(derived.contains_true_key);

        let free = enumerate_solutions(
            &sys.clone().with_interpretation(WInterpretation::FreeVariable),
            Some(&trace.alice.private),
        )
        .unwrap();
        assert!(free.contains_true_key);
        // Oracle: brute force over (z_a, z_b, w_a, w_b) with set semantics.
        let n = 22u64;
        let c = [7u64, 10, 9, 10, 17, 13];
        let mut oracle = std::collections::BTreeSet::new();
        for za in 0..n {
            let xa = (c[0] + n - za) % n;
            let ya = (c[1] + n - za) % n;
            if num_integer::gcd((xa + ya) % n, n) != 1 {
                continue;
            }
            for zb in 0..n {
                let xb = (c[2] + n - zb) % n;
                let yb = (c[3] + n - zb) % n;
                if num_integer::gcd((xb + yb) % n, n) != 1 {
                    continue;
                }
                let s = (xa * xb + ya * yb) % n;
                let wa_ok = (0..n).any(|w| (w * s + zb) % n == c[4]);
                let wb_ok = (0..n).any(|w| (w * s + za) % n == c[5]);
                if wa_ok && wb_ok {
                    oracle.insert((xa, ya, za));
                }
            }
        }
        assert_eq!(free.candidate_count, oracle.len() as u64);
        assert_eq!(free.candidate_count, 20);
    }

    #[test]
    fn swapped_transcript_relabels_without_losing_solutions() {
        let trace = worked_trace();
        let swapped = constraints_from_transcript(
            &trace.bob.public,
            &trace.alice.public,
            &trace.msg_ba,
            &trace.msg_ab,
        )
        .unwrap();
        let want: Vec<BigUint> =
            [9u32, 10, 7, 10, 13, 17].iter().map(|&v| v.into()).collect();
        assert_eq!(swapped.residues(), &want[..]);
        // The relabeled system targets Bob; his triple must be inside, with
        // the same solution-space size as the original targeting Alice.
        let report = enumerate_solutions(&swapped, Some(&trace.bob.private)).unwrap();
        assert_eq!(report.candidate_count, 1);
        assert!(report.contains_true_key);
    }

    #[test]
    fn count_formula_holds_for_all_small_safe_primes() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for p in [5u64, 7, 11, 23, 47, 59, 83, 107, 167, 179] {
            let params = DomainParams::new(p.into(), smallest_root(p).into()).unwrap();
            let kp = crate::keys::generate_keypair(&params, &mut rng);
            let sys = constraints_from_public_key(&kp.public).unwrap();
            let n = p - 1;
            let c1 = sys.residues()[0].to_u64().unwrap();
            let c2 = sys.residues()[1].to_u64().unwrap();
            let formula = (0..n)
                .filter(|z| num_integer::gcd((c1 + c2 + 2 * (n - z)) % n, n) == 1)
                .count() as u64;
            let report = enumerate_solutions(&sys, Some(&kp.private)).unwrap();
            assert_eq!(report.candidate_count, formula, "p={p}");
            assert!(report.contains_true_key, "p={p}");
        }
    }

    #[test]
    fn soundness_and_interpretation_gap_over_random_runs() {
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let primes = [23u64, 47, 59, 83, 107];
        for i in 0..100 {
            let p = primes[i % primes.len()];
            let params = DomainParams::new(p.into(), smallest_root(p).into()).unwrap();
            let alice = crate::keys::generate_keypair(&params, &mut rng);
            let bob = crate::keys::generate_keypair(&params, &mut rng);
            let mut sa = Session::new(Role::Initiator, alice.clone());
            let mut sb = Session::new(Role::Responder, bob.clone());
            sa.receive_peer_public(bob.public.clone()).unwrap();
            sb.receive_peer_public(alice.public.clone()).unwrap();
            let msg_ab = sa.compute_intermediate().unwrap();
            let msg_ba = sb.compute_intermediate().unwrap();

            let systems = [
                constraints_from_public_key(&alice.public).unwrap(),
                constraints_from_transcript(&alice.public, &bob.public, &msg_ab, &msg_ba)
                    .unwrap(),
                constraints_from_insider(&alice.public, &bob.private, &msg_ab).unwrap(),
            ];
            for sys in systems {
                let derived = enumerate_solutions(&sys, Some(&alice.private)).unwrap();
                let free = enumerate_solutions(
                    &sys.clone().with_interpretation(WInterpretation::FreeVariable),
                    Some(&alice.private),
                )
                .unwrap();
                assert!(derived.contains_true_key, "p={p} model={:?}", sys.model());
                assert!(free.contains_true_key, "p={p} model={:?}", sys.model());
                assert!(
                    free.candidate_count >= derived.candidate_count,
                    "p={p} model={:?}: free {} < derived {}",
                    sys.model(),
                    free.candidate_count,
                    derived.candidate_count
                );
            }
        }
    }

    #[test]
    fn enumeration_rejects_oversized_groups() {
        // 21-bit group: discrete logs fine, exhaustive sweep refused.
        let params = DomainParams::new(1048703u64.into(), 5u32.into()).unwrap();
        let kp = keypair_from_exponents(&params, &11u32.into(), &22u32.into(), &7u32.into())
            .unwrap();
        let sys = constraints_from_public_key(&kp.public).unwrap();
        match enumerate_solutions(&sys, None) {
            Err(AnalysisError::EnumerationScaleExceeded { cap, .. }) => {
                assert_eq!(cap, ENUMERATION_ORDER_CAP)
            }
            other => panic!("expected scale error, got {other:?}"),
        }
    }

    #[test]
    fn mixed_group_inputs_rejected() {
        let trace = worked_trace();
        let other = DomainParams::new(47u32.into(), 5u32.into()).unwrap();
        let foreign = keypair_from_exponents(&other, &3u32.into(), &6u32.into(), &4u32.into())
            .unwrap();
        assert_eq!(
            constraints_from_transcript(
                &trace.alice.public,
                &foreign.public,
                &trace.msg_ab,
                &trace.msg_ba
            )
            .err(),
            Some(AnalysisError::MixedGroups)
        );
        assert_eq!(
            constraints_from_insider(&trace.alice.public, &foreign.private, &trace.msg_ab).err(),
            Some(AnalysisError::MixedGroups)
        );
    }

    #[test]
    fn report_caps_explicit_candidates_but_counts_exactly() {
        // 2063 is a safe prime; a public-only system over it has ~1000+
        // admissible z values, exceeding the retention cap.
        let params = DomainParams::new(2063u64.into(), 5u32.into()).unwrap();
        let kp = keypair_from_exponents(&params, &100u32.into(), &201u32.into(), &300u32.into())
            .unwrap();
        let sys = constraints_from_public_key(&kp.public).unwrap();
        let report = enumerate_solutions(&sys, Some(&kp.private)).unwrap();
        assert!(report.candidate_count > MAX_REPORTED_CANDIDATES as u64);
        assert_eq!(report.candidates.len(), MAX_REPORTED_CANDIDATES);
        assert!(report.contains_true_key);
    }
}
