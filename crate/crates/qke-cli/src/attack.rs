//! The `attack` subcommand: runs the constraint builders for one adversary
//! model and prints the measured solution space as `name=value` lines.
//!
//! Counts are exact; candidate lines are capped at the library's reporting
//! limit while `count*` still reflects the full total. Residues and
//! candidates print in decimal, message inputs arrive as hex (matching what
//! a wire capture shows).

use num_bigint::BigUint;
use qke::cryptanalysis::{
    constraints_from_insider, constraints_from_public_key, constraints_from_transcript,
    enumerate_solutions, AnalysisError, ConstraintSystem, SolutionReport, WInterpretation,
};
use qke::keys::PrivateKey;
use qke::protocol::IntermediateValue;
use qke::wire;
use std::fs;
use std::path::{Path, PathBuf};

use crate::errors::CliError;
use crate::{AttackArgs, AttackMode};

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|err| CliError::Io(format!("cannot read {}: {err}", path.display())))
}

fn read_public(path: &Path) -> Result<qke::PublicKey, CliError> {
    wire::parse_public_key(&read_text(path)?)
        .map_err(|err| CliError::Io(format!("invalid public key {}: {err}", path.display())))
}

fn read_private(path: &Path) -> Result<PrivateKey, CliError> {
    wire::parse_private_key(&read_text(path)?)
        .map_err(|err| CliError::Io(format!("invalid private key {}: {err}", path.display())))
}

fn require<'a>(flag: &'static str, value: &'a Option<PathBuf>, mode: &str) -> Result<&'a Path, CliError> {
    value
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required in {mode} mode")))
}

fn parse_hex_message(flag: &'static str, value: &Option<String>, mode: &str) -> Result<IntermediateValue, CliError> {
    let raw = value
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required in {mode} mode")))?;
    BigUint::parse_bytes(raw.trim().as_bytes(), 16)
        .map(IntermediateValue)
        .ok_or_else(|| CliError::Usage(format!("--{flag} expects a hex integer, got {raw:?}")))
}

fn analysis_err(err: AnalysisError) -> CliError {
    match err {
        AnalysisError::DlogScaleExceeded { .. } | AnalysisError::EnumerationScaleExceeded { .. } => {
            CliError::Scale(err.to_string())
        }
        other => CliError::Usage(other.to_string()),
    }
}

fn print_header(mode: &str, system: &ConstraintSystem, params: &qke::DomainParams) {
    println!("mode={mode}");
    println!("p={}", params.p());
    println!("g={}", params.g());
    println!("modulus={}", system.modulus());
    for (index, residue) in system.residues().iter().enumerate() {
        println!("c{}={}", index + 1, residue);
    }
}

fn print_report(report: &SolutionReport, suffix: &str, with_truth: bool) {
    println!("count{suffix}={}", report.candidate_count);
    if with_truth {
        println!(
            "contains_truth{suffix}={}",
            if report.contains_true_key { "yes" } else { "no" }
        );
    }
    for (x, y, z) in &report.candidates {
        println!("candidate{suffix}={x},{y},{z}");
    }
}

/// Runs the system under both readings of the finalization exponent and
/// prints each; the gap between the two counts is the whole point of the
/// harness, so neither is privileged.
fn print_both_interpretations(
    system: ConstraintSystem,
    truth: Option<&PrivateKey>,
) -> Result<(), CliError> {
    for (interpretation, suffix) in [
        (WInterpretation::DerivedFromKey, "_derived_w"),
        (WInterpretation::FreeVariable, "_free_w"),
    ] {
        let report = enumerate_solutions(&system.clone().with_interpretation(interpretation), truth)
            .map_err(analysis_err)?;
        print_report(&report, suffix, truth.is_some());
    }
    Ok(())
}

pub fn run_attack(args: &AttackArgs) -> Result<(), CliError> {
    let mode = match args.mode {
        AttackMode::Public => "public",
        AttackMode::Channel => "channel",
        AttackMode::Insider => "insider",
    };
    let target = read_public(require("target-pub", &args.target_pub, mode)?)?;
    let truth = match &args.truth {
        Some(path) => Some(read_private(path)?),
        None => None,
    };
    if let Some(truth_key) = &truth {
        if truth_key.params() != target.params() {
            return Err(CliError::Usage(
                "--truth key belongs to a different group than --target-pub".into(),
            ));
        }
    }
    let params = target.params().clone();

    match args.mode {
        AttackMode::Public => {
            let system = constraints_from_public_key(&target).map_err(analysis_err)?;
            print_header(mode, &system, &params);
            let report = enumerate_solutions(&system, truth.as_ref()).map_err(analysis_err)?;
            print_report(&report, "", truth.is_some());
        }
        AttackMode::Channel => {
            let peer = read_public(require("peer-pub", &args.peer_pub, mode)?)?;
            let msg_from = parse_hex_message("msg-from-target", &args.msg_from_target, mode)?;
            let msg_to = parse_hex_message("msg-to-target", &args.msg_to_target, mode)?;
            let system = constraints_from_transcript(&target, &peer, &msg_from, &msg_to)
                .map_err(analysis_err)?;
            print_header(mode, &system, &params);
            print_both_interpretations(system, truth.as_ref())?;
        }
        AttackMode::Insider => {
            let own = read_private(require("own-key", &args.own_key, mode)?)?;
            let msg_from = parse_hex_message("msg-from-target", &args.msg_from_target, mode)?;
            let system =
                constraints_from_insider(&target, &own, &msg_from).map_err(analysis_err)?;
            print_header(mode, &system, &params);
            print_both_interpretations(system, truth.as_ref())?;
        }
    }
    Ok(())
}
