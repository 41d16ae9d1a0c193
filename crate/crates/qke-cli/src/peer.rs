//! The `peer` subcommand: one live key establishment over TCP.
//!
//! The connecting side opens with its group; the listening side validates the
//! offer (safe prime, primitive root, equality with its own key's group)
//! before revealing anything. Both directions then exchange public keys and
//! intermediate values, confirm with Close frames, and print the shared key.
//!
//! A listener serves exactly one connection and exits; independent sessions
//! come from independent processes.

use qke::wire::{self, Frame, FrameReader};
use qke::{DomainParams, Keypair, PublicKey, Role, Session, SharedSecret};
use qke::protocol::IntermediateValue;
use std::fs;
use std::io::{self, Read, Write};
use std::net::{TcpListener, TcpStream};

use crate::errors::CliError;
use crate::PeerArgs;

fn net_err(context: &str, err: io::Error) -> CliError {
    CliError::Network(format!("{context}: {err}"))
}

fn proto_err(err: impl std::fmt::Display) -> CliError {
    CliError::Protocol(err.to_string())
}

fn frame_name(frame: &Frame) -> &'static str {
    match frame {
        Frame::ParamsOffer { .. } => "params offer",
        Frame::PublicKeyMsg { .. } => "public key",
        Frame::IntermediateMsg { .. } => "intermediate value",
        Frame::Close => "close",
    }
}

fn unexpected(frame: &Frame, wanted: &str) -> CliError {
    CliError::Protocol(format!("peer sent {} while {wanted} was expected", frame_name(frame)))
}

fn send_frame(stream: &mut TcpStream, frame: &Frame) -> Result<(), CliError> {
    stream
        .write_all(&wire::encode_frame(frame))
        .map_err(|err| net_err("write failed", err))
}

/// Blocks until one whole frame is available. A clean end of stream counts as
/// a protocol violation, not a network failure: the peer walked away from an
/// exchange it had started.
fn read_frame(stream: &mut TcpStream, reader: &mut FrameReader) -> Result<Frame, CliError> {
    loop {
        if let Some(frame) = reader.next_frame().map_err(proto_err)? {
            return Ok(frame);
        }
        let mut buf = [0u8; 4096];
        let count = stream.read(&mut buf).map_err(|err| net_err("read failed", err))?;
        if count == 0 {
            return Err(CliError::Protocol("peer closed the stream mid-exchange".into()));
        }
        reader.push(&buf[..count]);
    }
}

pub fn run_peer(args: &PeerArgs) -> Result<(), CliError> {
    let key_text = fs::read_to_string(&args.key)
        .map_err(|err| CliError::Io(format!("cannot read {}: {err}", args.key.display())))?;
    let private = wire::parse_private_key(&key_text)
        .map_err(|err| CliError::Io(format!("invalid key file {}: {err}", args.key.display())))?;
    if let Some(path) = &args.expect_params {
        let text = fs::read_to_string(path)
            .map_err(|err| CliError::Io(format!("cannot read {}: {err}", path.display())))?;
        let expected = wire::parse_params(&text)
            .map_err(|err| CliError::Io(format!("invalid params file {}: {err}", path.display())))?;
        if &expected != private.params() {
            return Err(CliError::Protocol(
                "key file group does not match --expect-params".into(),
            ));
        }
    }
    let keypair = Keypair { public: private.public_key(), private };

    let secret = match (&args.listen, &args.connect) {
        (Some(addr), None) => listen_once(addr, keypair)?,
        (None, Some(addr)) => connect_once(addr, keypair)?,
        _ => {
            return Err(CliError::Usage(
                "exactly one of --listen or --connect is required".into(),
            ))
        }
    };
    println!("shared_key={}", secret.to_hex());
    Ok(())
}

fn listen_once(addr: &str, keypair: Keypair) -> Result<SharedSecret, CliError> {
    let listener =
        TcpListener::bind(addr).map_err(|err| net_err(&format!("cannot listen on {addr}"), err))?;
    let local = listener.local_addr().map_err(|err| net_err("cannot resolve bound address", err))?;
    println!("listening={local}");
    io::stdout().flush().ok();
    let (stream, _) = listener.accept().map_err(|err| net_err("accept failed", err))?;
    responder_session(stream, keypair)
}

fn connect_once(addr: &str, keypair: Keypair) -> Result<SharedSecret, CliError> {
    let stream = TcpStream::connect(addr)
        .map_err(|err| net_err(&format!("cannot connect to {addr}"), err))?;
    initiator_session(stream, keypair)
}

fn initiator_session(mut stream: TcpStream, keypair: Keypair) -> Result<SharedSecret, CliError> {
    let mut session = Session::new(Role::Initiator, keypair);
    let params = session.params().clone();
    let mut reader = FrameReader::new();

    send_frame(
        &mut stream,
        &Frame::ParamsOffer { p: params.p().clone(), g: params.g().clone() },
    )?;
    let (first, second) = match read_frame(&mut stream, &mut reader)? {
        Frame::PublicKeyMsg { first, second } => (first, second),
        other => return Err(unexpected(&other, "the responder's public key")),
    };
    session
        .receive_peer_public(PublicKey::new(first, second, params))
        .map_err(proto_err)?;
    let own_public = session.local_public().clone();
    send_frame(
        &mut stream,
        &Frame::PublicKeyMsg {
            first: own_public.first().clone(),
            second: own_public.second().clone(),
        },
    )?;
    finish_session(stream, reader, session)
}

fn responder_session(mut stream: TcpStream, keypair: Keypair) -> Result<SharedSecret, CliError> {
    let mut session = Session::new(Role::Responder, keypair);
    let mut reader = FrameReader::new();

    let (p, g) = match read_frame(&mut stream, &mut reader)? {
        Frame::ParamsOffer { p, g } => (p, g),
        other => return Err(unexpected(&other, "a params offer")),
    };
    let offered = DomainParams::new(p, g)
        .map_err(|err| CliError::Protocol(format!("offered group rejected: {err}")))?;
    if &offered != session.params() {
        return Err(CliError::Protocol(
            "offered group differs from this key's group".into(),
        ));
    }
    let own_public = session.local_public().clone();
    send_frame(
        &mut stream,
        &Frame::PublicKeyMsg {
            first: own_public.first().clone(),
            second: own_public.second().clone(),
        },
    )?;
    let (first, second) = match read_frame(&mut stream, &mut reader)? {
        Frame::PublicKeyMsg { first, second } => (first, second),
        other => return Err(unexpected(&other, "the initiator's public key")),
    };
    session
        .receive_peer_public(PublicKey::new(first, second, offered))
        .map_err(proto_err)?;
    finish_session(stream, reader, session)
}

/// Shared tail once both public keys are in place: swap intermediates,
/// finalize, refuse a degenerate key, confirm with Close frames.
fn finish_session(
    mut stream: TcpStream,
    mut reader: FrameReader,
    mut session: Session,
) -> Result<SharedSecret, CliError> {
    let outgoing = session.compute_intermediate().map_err(proto_err)?;
    send_frame(&mut stream, &Frame::IntermediateMsg { value: outgoing.0 })?;
    let incoming = match read_frame(&mut stream, &mut reader)? {
        Frame::IntermediateMsg { value } => IntermediateValue(value),
        other => return Err(unexpected(&other, "an intermediate value")),
    };
    let secret = session.finalize(incoming).map_err(proto_err)?;
    if secret.is_degenerate() {
        return Err(CliError::DegenerateKey);
    }
    send_frame(&mut stream, &Frame::Close)?;
    match read_frame(&mut stream, &mut reader)? {
        Frame::Close => {}
        other => return Err(unexpected(&other, "a close confirmation")),
    }
    Ok(secret)
}
