//! On-disk wallets, the spent-id ledger and keystores.
//!
//! Every file is versioned JSON written through a temporary file and a
//! rename. A wallet directory is locked for the duration of a command.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use revsig::qkernel::{StateBlob, TokenId};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;
pub const NOTICE: &str = "SIMULATION ONLY";

pub const WALLET_FILE: &str = "wallet.json";
pub const LEDGER_FILE: &str = "ledger.json";
const LOCK_FILE: &str = ".lock";

#[derive(Debug, Error)]
pub enum WalletError {
    #[error("malformed {path}: {reason}")]
    MalformedBlob { path: String, reason: String },
    #[error("state {0} is recorded as spent in the ledger")]
    SpentId(String),
    #[error("{path} has format version {found}, this tool reads version {FORMAT_VERSION}")]
    VersionMismatch { path: String, found: u32 },
    #[error("wallet {0} is locked by another command")]
    Locked(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> WalletError + '_ {
    move |source| WalletError::Io { path: path.display().to_string(), source }
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    v: u32,
    #[serde(default)]
    notice: Option<String>,
    #[serde(flatten)]
    body: T,
}

#[derive(Deserialize)]
struct VersionProbe {
    v: u32,
}

/// Reads a versioned JSON file.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, WalletError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let malformed = |reason: String| WalletError::MalformedBlob { path: path.display().to_string(), reason };
    let probe: VersionProbe = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
    if probe.v != FORMAT_VERSION {
        return Err(WalletError::VersionMismatch { path: path.display().to_string(), found: probe.v });
    }
    let env: Envelope<T> = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
    Ok(env.body)
}

/// Writes a versioned JSON file atomically. Files holding secrets or states
/// carry the simulation notice.
pub fn save<T: Serialize>(path: &Path, body: &T, with_notice: bool) -> Result<(), WalletError> {
    let env = Envelope { v: FORMAT_VERSION, notice: with_notice.then(|| NOTICE.to_string()), body };
    let mut text = serde_json::to_string_pretty(&env).expect("wallet files serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), WalletError> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Exclusive hold on a wallet directory, released on drop.
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(dir: &Path) -> Result<Self, WalletError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(Self { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(WalletError::Locked(dir.display().to_string()))
            }
            Err(e) => Err(WalletError::Io { path: path.display().to_string(), source: e }),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Ids of states consumed by earlier commands.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    pub spent: BTreeSet<String>,
}

impl Ledger {
    pub fn load_or_default(dir: &Path) -> Result<Self, WalletError> {
        let path = dir.join(LEDGER_FILE);
        if path.exists() {
            load(&path)
        } else {
            Ok(Self::default())
        }
    }

    pub fn save(&self, dir: &Path) -> Result<(), WalletError> {
        save(&dir.join(LEDGER_FILE), self, false)
    }

    pub fn ids(&self) -> Result<Vec<TokenId>, WalletError> {
        self.spent
            .iter()
            .map(|s| {
                TokenId::from_hex(s)
                    .map_err(|e| WalletError::MalformedBlob { path: LEDGER_FILE.into(), reason: e.to_string() })
            })
            .collect()
    }

    pub fn record<I: IntoIterator<Item = TokenId>>(&mut self, ids: I) {
        self.spent.extend(ids.into_iter().map(TokenId::to_hex));
    }

    /// Fails on the first state already recorded as spent.
    pub fn check<'a, I: IntoIterator<Item = &'a StateBlob>>(&self, blobs: I) -> Result<(), WalletError> {
        for b in blobs {
            if self.spent.contains(&b.id) {
                return Err(WalletError::SpentId(b.id.clone()));
            }
        }
        Ok(())
    }
}

/// A wallet: scheme tag, a nonce advanced by every command that draws
/// randomness, and scheme-specific state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wallet<B> {
    pub scheme: String,
    pub nonce: u64,
    /// Ledger file recording this wallet's consumed states.
    pub ledger: String,
    pub body: B,
}

impl<B: Serialize + DeserializeOwned> Wallet<B> {
    pub fn new(scheme: &str, body: B) -> Self {
        Self { scheme: scheme.into(), nonce: 1, ledger: LEDGER_FILE.into(), body }
    }

    pub fn load(dir: &Path, scheme: &str) -> Result<Self, WalletError> {
        let path = dir.join(WALLET_FILE);
        let w: Self = load(&path)?;
        if w.scheme != scheme {
            return Err(WalletError::MalformedBlob {
                path: path.display().to_string(),
                reason: format!("wallet holds a {} key, expected {scheme}", w.scheme),
            });
        }
        Ok(w)
    }

    pub fn save(&self, dir: &Path) -> Result<(), WalletError> {
        save(&dir.join(WALLET_FILE), self, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    struct Body {
        items: Vec<u32>,
    }

    #[test]
    fn save_load_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let w = Wallet::new("x", Body { items: vec![1, 2] });
        w.save(dir.path()).unwrap();
        let first = fs::read(dir.path().join(WALLET_FILE)).unwrap();
        let back: Wallet<Body> = Wallet::load(dir.path(), "x").unwrap();
        assert_eq!(back, w);
        back.save(dir.path()).unwrap();
        assert_eq!(fs::read(dir.path().join(WALLET_FILE)).unwrap(), first);
        assert!(String::from_utf8(first).unwrap().contains(NOTICE));
    }

    #[test]
    fn version_zero_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join(WALLET_FILE),
            r#"{"v":0,"scheme":"x","nonce":0,"ledger":"ledger.json","body":{"items":[]}}"#,
        )
        .unwrap();
        assert!(matches!(Wallet::<Body>::load(dir.path(), "x"), Err(WalletError::VersionMismatch { found: 0, .. })));
        fs::write(dir.path().join(WALLET_FILE), "not json").unwrap();
        assert!(matches!(Wallet::<Body>::load(dir.path(), "x"), Err(WalletError::MalformedBlob { .. })));
    }

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let held = DirLock::acquire(dir.path()).unwrap();
        assert!(matches!(DirLock::acquire(dir.path()), Err(WalletError::Locked(_))));
        drop(held);
        DirLock::acquire(dir.path()).unwrap();
    }
}
