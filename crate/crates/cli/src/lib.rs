//! Command-line wallets, revocation flows and demos over the `revsig` core.
//!
//! Every command prints one JSON document. Exit status is 0 when the
//! checked property holds, 1 when it does not, and 2 on any error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

mod demos;
mod dsrkey_cmd;
mod dsrsign_cmd;
pub mod params;
pub mod wallet;

use wallet::WalletError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Wallet(#[from] WalletError),
    #[error("{0}")]
    Scheme(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Wallet(WalletError::MalformedBlob { .. }) => "MalformedBlob",
            CliError::Wallet(WalletError::SpentId(_)) => "SpentId",
            CliError::Wallet(WalletError::VersionMismatch { .. }) => "VersionMismatch",
            CliError::Wallet(WalletError::Locked(_)) => "Locked",
            CliError::Wallet(WalletError::Io { .. }) => "Io",
            CliError::Scheme(_) => "Scheme",
        }
    }
}

macro_rules! scheme_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Scheme(e.to_string())
            }
        }
    )*};
}

scheme_error!(
    revsig::primitives::PrimitiveError,
    revsig::tts::TtsError,
    revsig::ttoss::TtossError,
    revsig::dsrkey::DsrKeyError,
    revsig::dsrsign::DsrSignError,
    revsig::grouplight::GroupLightError
);

impl From<revsig::qkernel::KernelError> for CliError {
    fn from(e: revsig::qkernel::KernelError) -> Self {
        match e {
            revsig::qkernel::KernelError::SpentId(id) => CliError::Wallet(WalletError::SpentId(id.to_hex())),
            revsig::qkernel::KernelError::MalformedBlob(reason) => {
                CliError::Wallet(WalletError::MalformedBlob { path: "state blob".into(), reason })
            }
            other => CliError::Scheme(other.to_string()),
        }
    }
}

impl From<revsig::games::GamesError> for CliError {
    fn from(e: revsig::games::GamesError) -> Self {
        use revsig::games::GamesError::*;
        match e {
            UnknownGame(_) | UnknownAdversary(_) | AdversaryMismatch { .. } | BadParams(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Scheme(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "revsig", version, about = "Revocable quantum signatures, simulated classically")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags accepted by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for all randomness drawn by this command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON parameter file.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Wallet directory.
    #[arg(long, global = true, default_value = ".")]
    pub wallet: PathBuf,
    /// Write the command's artifact here instead of embedding it in stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Signing keys that can be revoked.
    Dsrkey {
        #[command(subcommand)]
        action: DsrKeyCmd,
    },
    /// Signatures that can be deleted.
    Dsrsign {
        #[command(subcommand)]
        action: DsrSignCmd,
    },
    /// Two-tier tokenized signatures.
    Tts {
        #[command(subcommand)]
        action: DemoCmd,
    },
    /// Two-tier quantum lightning.
    Lightning {
        #[command(subcommand)]
        action: DemoCmd,
    },
    /// Quantum-revocable one-time keys from lightning.
    Qrk {
        #[command(subcommand)]
        action: DemoCmd,
    },
    /// Security and correctness games.
    Games {
        #[command(subcommand)]
        action: GamesCmd,
    },
}

#[derive(Debug, Subcommand)]
enum DsrKeyCmd {
    /// Create public parameters and the check key.
    Setup,
    /// Create a signing key in the wallet.
    Keygen,
    Sign {
        #[arg(long)]
        message: String,
    },
    Verify {
        #[arg(long)]
        message: String,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Destroy the signing key and emit a revocation certificate.
    Revoke,
    /// Check a revocation certificate against the messages signed.
    Check {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long = "signed")]
        signed: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
enum DsrSignCmd {
    Keygen,
    Sign {
        #[arg(long)]
        message: String,
    },
    Verify {
        #[arg(long)]
        message: String,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Delete a signature and emit a deletion certificate.
    Revoke {
        #[arg(long)]
        sig: PathBuf,
    },
    Check {
        #[arg(long)]
        sig: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum DemoCmd {
    /// Run an honest flow and a cheating attempt.
    Demo,
}

#[derive(Debug, Subcommand)]
enum GamesCmd {
    Run {
        game: String,
        #[arg(long)]
        adversary: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// List builtin games and adversaries.
    List,
}

/// What a command reports: whether its check held, and its JSON body.
pub struct Report {
    pub accepted: bool,
    pub body: Value,
}

impl Report {
    fn ok(body: Value) -> Self {
        Self { accepted: true, body }
    }

    fn verdict(accepted: bool, body: Value) -> Self {
        Self { accepted, body }
    }
}

/// Writes `artifact` to `--out`, or returns it for embedding in stdout.
fn emit(common: &Common, artifact: Value) -> Result<Value, CliError> {
    match &common.out {
        Some(path) => {
            let mut text = serde_json::to_string_pretty(&artifact).expect("json");
            text.push('\n');
            wallet::write_atomic(path, text.as_bytes())?;
            Ok(json!(path.display().to_string()))
        }
        None => Ok(artifact),
    }
}

fn dispatch(cli: Cli) -> Result<Report, CliError> {
    let c = &cli.common;
    match cli.command {
        Command::Dsrkey { action } => match action {
            DsrKeyCmd::Setup => dsrkey_cmd::setup(c),
            DsrKeyCmd::Keygen => dsrkey_cmd::keygen(c),
            DsrKeyCmd::Sign { message } => dsrkey_cmd::sign(c, &message),
            DsrKeyCmd::Verify { message, sig } => dsrkey_cmd::verify(c, &message, &sig),
            DsrKeyCmd::Revoke => dsrkey_cmd::revoke(c),
            DsrKeyCmd::Check { cert, signed } => dsrkey_cmd::check(c, &cert, &signed),
        },
        Command::Dsrsign { action } => match action {
            DsrSignCmd::Keygen => dsrsign_cmd::keygen(c),
            DsrSignCmd::Sign { message } => dsrsign_cmd::sign(c, &message),
            DsrSignCmd::Verify { message, sig } => dsrsign_cmd::verify(c, &message, &sig),
            DsrSignCmd::Revoke { sig } => dsrsign_cmd::revoke(c, &sig),
            DsrSignCmd::Check { sig, cert } => dsrsign_cmd::check(c, &sig, &cert),
        },
        Command::Tts { action: DemoCmd::Demo } => demos::tts(c),
        Command::Lightning { action: DemoCmd::Demo } => demos::lightning(c),
        Command::Qrk { action: DemoCmd::Demo } => demos::qrk(c),
        Command::Games { action } => match action {
            GamesCmd::Run { game, adversary, trials } => demos::game(c, &game, &adversary, trials),
            GamesCmd::List => demos::list_games(),
        },
    }
}

/// Runs one command line. Returns the exit status and stdout.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let (code, body) = match dispatch(cli) {
        Ok(r) => (if r.accepted { 0 } else { 1 }, r.body),
        Err(e) => (2, json!({ "error": e.kind(), "message": e.to_string() })),
    };
    let mut out = serde_json::to_string_pretty(&body).expect("json");
    out.push('\n');
    (code, out)
}
