//! `qke` — operator front end for the two-component key-establishment
//! toolkit: group/key generation, a live TCP peer, the solution-space
//! analysis harness, a key-size bench, and textbook baseline demos.
//!
//! Machine-readable output is line-oriented `name=value`; commentary lines
//! start with `#`. Exit codes are documented in [`errors`].

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::path::PathBuf;
use std::process;

mod attack;
mod commands;
mod errors;
mod peer;

#[derive(Debug, Parser)]
#[command(name = "qke", version, about = "Two-component key establishment over safe-prime groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a safe-prime group and print it as a params block
    Params(ParamsArgs),
    /// Generate a keypair for a group and write PREFIX.priv / PREFIX.pub
    Keygen(KeygenArgs),
    /// Establish a shared key with a remote peer over TCP
    Peer(PeerArgs),
    /// Enumerate the private keys consistent with an adversary's view
    Attack(AttackArgs),
    /// Measure serialized key sizes against the declared size table
    Bench(BenchArgs),
    /// Run an annotated baseline transcript on the demo group
    Demo(DemoArgs),
}

#[derive(Debug, clap::Args)]
struct ParamsArgs {
    /// Bit length of the prime modulus (minimum 5)
    #[arg(long)]
    bits: u64,
    /// Seed for reproducible generation; omitted means OS entropy
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, clap::Args)]
struct KeygenArgs {
    /// Params block file describing the group
    #[arg(long)]
    params: PathBuf,
    /// Output path prefix; writes PREFIX.priv and PREFIX.pub
    #[arg(long)]
    out: String,
    /// Seed for reproducible generation; omitted means OS entropy
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated decimal exponents x,y,z instead of random ones
    #[arg(long, hide = true)]
    exponents: Option<String>,
}

#[derive(Debug, clap::Args)]
struct PeerArgs {
    /// Accept one connection on this address (e.g. 127.0.0.1:0)
    #[arg(long, conflicts_with = "connect")]
    listen: Option<String>,
    /// Connect to a listening peer at this address
    #[arg(long)]
    connect: Option<String>,
    /// Private key file (.priv)
    #[arg(long)]
    key: PathBuf,
    /// Refuse to run unless the key's group equals this params block
    #[arg(long)]
    expect_params: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AttackMode {
    /// Only the target's public key is known
    Public,
    /// Both public keys and both intermediate messages were observed
    Channel,
    /// The attacker is the target's legitimate correspondent
    Insider,
}

#[derive(Debug, clap::Args)]
struct AttackArgs {
    /// Adversary model to evaluate
    #[arg(long, value_enum)]
    mode: AttackMode,
    /// Public key file of the key under attack (all modes)
    #[arg(long)]
    target_pub: Option<PathBuf>,
    /// Public key file of the target's correspondent (channel mode)
    #[arg(long)]
    peer_pub: Option<PathBuf>,
    /// Attacker's own private key file (insider mode)
    #[arg(long)]
    own_key: Option<PathBuf>,
    /// Intermediate message sent by the target, lowercase hex (channel, insider)
    #[arg(long)]
    msg_from_target: Option<String>,
    /// Intermediate message sent to the target, lowercase hex (channel mode)
    #[arg(long)]
    msg_to_target: Option<String>,
    /// Target's real private key file; enables the contains_truth line
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct BenchArgs {
    /// Modulus size to measure: 128, 256, or 512
    #[arg(long)]
    bits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DemoKind {
    /// Plain discrete-log key agreement
    Dh,
    /// ElGamal encryption round trip
    Elgamal,
}

#[derive(Debug, clap::Args)]
struct DemoArgs {
    /// Which baseline to run
    #[arg(value_enum)]
    which: DemoKind,
    /// Seed for random inputs; omitted means the fixed worked example
    #[arg(long)]
    seed: Option<u64>,
}

/// One RNG policy for every subcommand: seeded runs are bit-reproducible,
/// unseeded runs draw from OS entropy.
fn rng_from(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn main() {
    // Die quietly when downstream closes the pipe (`qke attack | head`),
    // like any other line-oriented tool, instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Params(args) => commands::run_params(&args),
        Command::Keygen(args) => commands::run_keygen(&args),
        Command::Peer(args) => peer::run_peer(&args),
        Command::Attack(args) => attack::run_attack(&args),
        Command::Bench(args) => commands::run_bench(&args),
        Command::Demo(args) => commands::run_demo(&args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err}");
        process::exit(err.exit_code());
    }
}
