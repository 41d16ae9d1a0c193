//! Helpers shared by the CLI test binaries: spawning the `qke` executable,
//! preparing key material on disk, and picking apart `name=value` output.

#![allow(dead_code)]

use num_bigint::BigUint;
use qke::{keypair_from_exponents, wire, DomainParams, Keypair};
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{Shutdown, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdout, Command, Output, Stdio};

pub fn qke() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qke"))
}

/// Runs the binary to completion and returns (exit code, stdout, stderr).
pub fn run(args: &[&str]) -> (i32, String, String) {
    let Output { status, stdout, stderr } =
        qke().args(args).output().expect("binary should spawn");
    (
        status.code().expect("binary should exit normally"),
        String::from_utf8(stdout).expect("stdout should be UTF-8"),
        String::from_utf8(stderr).expect("stderr should be UTF-8"),
    )
}

/// Fresh scratch directory for one test; the tag keeps tests apart inside
/// the shared test-binary process.
pub fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qke-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).expect("temp dir should be creatable");
    dir
}

pub fn demo_params() -> DomainParams {
    DomainParams::new(BigUint::from(23u32), BigUint::from(5u32))
        .expect("23 is a safe prime with primitive root 5")
}

pub fn keypair(params: &DomainParams, x: u32, y: u32, z: u32) -> Keypair {
    keypair_from_exponents(
        params,
        &BigUint::from(x),
        &BigUint::from(y),
        &BigUint::from(z),
    )
    .expect("exponents chosen to be admissible")
}

/// Writes a private/public key-file pair and returns their paths.
pub fn write_key_files(dir: &Path, name: &str, keypair: &Keypair) -> (PathBuf, PathBuf) {
    let priv_path = dir.join(format!("{name}.priv"));
    let pub_path = dir.join(format!("{name}.pub"));
    fs::write(&priv_path, wire::render_private_key(&keypair.private)).unwrap();
    fs::write(&pub_path, wire::render_public_key(&keypair.public)).unwrap();
    (priv_path, pub_path)
}

/// The worked exchange: Alice (3, 6, 4) and Bob (7, 8, 2) on the demo group.
/// Returns (alice.priv, alice.pub, bob.priv, bob.pub).
pub fn write_worked_keys(dir: &Path) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    let params = demo_params();
    let (a_priv, a_pub) = write_key_files(dir, "alice", &keypair(&params, 3, 6, 4));
    let (b_priv, b_pub) = write_key_files(dir, "bob", &keypair(&params, 7, 8, 2));
    (a_priv, a_pub, b_priv, b_pub)
}

/// First value for `name=` in line-oriented output.
pub fn field<'a>(output: &'a str, name: &str) -> Option<&'a str> {
    output
        .lines()
        .find_map(|line| line.strip_prefix(name).and_then(|rest| rest.strip_prefix('=')))
}

/// Every value for a repeated `name=` line, in order.
pub fn fields<'a>(output: &'a str, name: &str) -> Vec<&'a str> {
    output
        .lines()
        .filter_map(|line| line.strip_prefix(name).and_then(|rest| rest.strip_prefix('=')))
        .collect()
}

/// A `qke peer --listen` child that has already announced its address.
pub struct Listener {
    child: Child,
    stdout: BufReader<ChildStdout>,
    pub addr: String,
}

pub fn spawn_listener(key: &Path, extra: &[&str]) -> Listener {
    let mut child = qke()
        .args(["peer", "--listen", "127.0.0.1:0", "--key"])
        .arg(key)
        .args(extra)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("listener should spawn");
    let mut stdout = BufReader::new(child.stdout.take().expect("stdout is piped"));
    let mut line = String::new();
    stdout.read_line(&mut line).expect("listener stdout should be readable");
    let addr = line
        .trim()
        .strip_prefix("listening=")
        .unwrap_or_else(|| panic!("listener should announce its address, got {line:?}"))
        .to_string();
    Listener { child, stdout, addr }
}

impl Listener {
    /// Waits for exit; returns (exit code, rest of stdout).
    pub fn finish(mut self) -> (i32, String) {
        let mut rest = String::new();
        self.stdout.read_to_string(&mut rest).expect("listener stdout should drain");
        let status = self.child.wait().expect("listener should be waitable");
        (status.code().expect("listener should exit normally"), rest)
    }
}

/// Plays a raw TCP counterpart: sends exactly `octets`, half-closes, and
/// drains whatever the victim says before it exits.
pub fn send_raw(addr: &str, octets: &[u8]) {
    let mut stream = TcpStream::connect(addr).expect("victim should be accepting");
    stream.write_all(octets).expect("short raw write");
    stream.shutdown(Shutdown::Write).ok();
    let mut sink = Vec::new();
    let _ = stream.read_to_end(&mut sink);
}
