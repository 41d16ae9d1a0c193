//! Error type shared by every subcommand, carrying the process exit code.
//!
//! The taxonomy is part of the tool's contract: scripts and tests dispatch on
//! the code, not on message text.
//!
//! | code | meaning                                         |
//! |------|-------------------------------------------------|
//! | 0    | success                                         |
//! | 1    | internal self-check failed                      |
//! | 2    | usage or local I/O problem                      |
//! | 3    | exchange produced the degenerate shared key 1   |
//! | 4    | network failure (connect, bind, socket I/O)     |
//! | 5    | peer violated the wire protocol                 |
//! | 6    | group too large for the analysis caps           |

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Flag combinations or argument values the parser cannot catch.
    #[error("{0}")]
    Usage(String),

    /// Unreadable, unwritable, or unparsable local files.
    #[error("{0}")]
    Io(String),

    /// The exchange landed on the fixed point 1; such a key is useless and
    /// publicly detectable, so the tool refuses to print it.
    #[error("refusing degenerate shared key 1")]
    DegenerateKey,

    #[error("{0}")]
    Network(String),

    /// The remote peer sent something the wire contract forbids, including
    /// closing the stream mid-exchange.
    #[error("{0}")]
    Protocol(String),

    /// An analysis cap was exceeded; the message names the cap.
    #[error("{0}")]
    Scale(String),

    /// A self-check that should never fail did.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::DegenerateKey => 3,
            CliError::Network(_) => 4,
            CliError::Protocol(_) => 5,
            CliError::Scale(_) => 6,
            CliError::Internal(_) => 1,
        }
    }
}
