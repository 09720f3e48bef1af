//! `dsrkey` workflows. Files in the wallet directory:
//! `pp.json` (public parameters), `ck.json` (check key, also needed to
//! prepare fresh states), `vk.json`, `wallet.json` and `ledger.json`.

use std::path::Path;

use revsig::dsrkey::{
    ChainCertificate, ChainScheme, ChainSignature, ChainSigningState, ChainStateBlob, MbkVerificationKey,
};
use revsig::qkernel::{Registry, StateBlob};
use revsig::rng;
use revsig::ttoss::{oss_setup, OssPublicParams, OssSecretKey};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::params::Params;
use crate::wallet::{self, DirLock, Ledger, Wallet, WalletError};
use crate::{emit, CliError, Common, Report};

const SCHEME: &str = "dsrkey";
const PP_FILE: &str = "pp.json";
const CK_FILE: &str = "ck.json";
const VK_FILE: &str = "vk.json";

#[derive(Serialize, Deserialize)]
struct PublicParamsFile {
    scheme: ChainScheme,
    pp: OssPublicParams,
}

#[derive(Serialize, Deserialize)]
struct CheckKeyFile {
    ck: OssSecretKey,
}

#[derive(Serialize, Deserialize)]
struct VerificationKeyFile {
    vk: MbkVerificationKey,
}

/// The live signing state, or `None` once revoked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsrKeyBody {
    pub state: Option<ChainStateBlob>,
}

#[derive(Serialize, Deserialize)]
struct SignatureFile {
    message: String,
    signature: ChainSignature,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    certificate: ChainCertificate,
}

pub(crate) fn state_blobs(blob: &ChainStateBlob) -> Vec<&StateBlob> {
    use revsig::dsrkey::OtkKeyBlob;
    blob.keys
        .iter()
        .flatten()
        .flat_map(|k| match k {
            OtkKeyBlob::Fresh { halves } => halves.iter().flatten().collect::<Vec<_>>(),
            OtkKeyBlob::Used { key, .. } => key.iter().collect(),
        })
        .collect()
}

/// A registry for one command: its randomness comes from `(seed, nonce)`
/// and it refuses every id already in the ledger.
pub(crate) fn session(seed: u64, nonce: u64, ledger: &Ledger) -> Result<Registry, CliError> {
    let mut reg = Registry::from_rng(rng::derived(seed, nonce));
    reg.extend_spent(ledger.ids()?);
    Ok(reg)
}

fn read<T: serde::de::DeserializeOwned>(dir: &Path, name: &str) -> Result<T, CliError> {
    Ok(wallet::load(&dir.join(name))?)
}

/// Public parameters with state preparation enabled by the check key.
fn prepared(dir: &Path) -> Result<(ChainScheme, OssPublicParams, OssSecretKey), CliError> {
    let PublicParamsFile { scheme, mut pp } = read(dir, PP_FILE)?;
    let CheckKeyFile { ck } = read(dir, CK_FILE)?;
    pp.attach_preparer(&ck)?;
    Ok((scheme, pp, ck))
}

fn live_state(w: &Wallet<DsrKeyBody>) -> Result<&ChainStateBlob, CliError> {
    w.body.state.as_ref().ok_or_else(|| CliError::Usage("the signing key in this wallet has been revoked".into()))
}

pub fn setup(c: &Common) -> Result<Report, CliError> {
    let params = Params::load(c.params.as_deref())?;
    let _lock = DirLock::acquire(&c.wallet)?;
    if c.wallet.join(PP_FILE).exists() {
        return Err(CliError::Usage(format!("{} already holds public parameters", c.wallet.display())));
    }
    let family = params.family();
    let (pp, ck) = oss_setup(&mut rng::derived(c.seed, 0), params.n, &family)?;
    let scheme = ChainScheme::new(params.crh()?);
    wallet::save(&c.wallet.join(CK_FILE), &CheckKeyFile { ck }, true)?;
    wallet::save(&c.wallet.join(PP_FILE), &PublicParamsFile { scheme, pp: pp.public_view() }, false)?;
    Ok(Report::ok(json!({
        "command": "dsrkey setup",
        "family": family,
        "n": params.n,
        "hash_bits": params.hash_bits,
        "files": [PP_FILE, CK_FILE],
    })))
}

pub fn keygen(c: &Common) -> Result<Report, CliError> {
    let _lock = DirLock::acquire(&c.wallet)?;
    if c.wallet.join(wallet::WALLET_FILE).exists() {
        return Err(CliError::Usage(format!("{} already holds a wallet", c.wallet.display())));
    }
    let (scheme, pp, _) = prepared(&c.wallet)?;
    let ledger = Ledger::load_or_default(&c.wallet)?;
    let mut w = Wallet::new(SCHEME, DsrKeyBody { state: None });
    let mut reg = session(c.seed, w.nonce, &ledger)?;
    let (state, vk) = scheme.keygen(&mut reg, &pp)?;
    w.body.state = Some(state.export(&reg)?);
    w.nonce += 1;
    wallet::save(&c.wallet.join(VK_FILE), &VerificationKeyFile { vk }, false)?;
    w.save(&c.wallet)?;
    Ok(Report::ok(json!({
        "command": "dsrkey keygen",
        "states": state_blobs(w.body.state.as_ref().expect("just set")).len(),
        "files": [VK_FILE, wallet::WALLET_FILE],
    })))
}

pub fn sign(c: &Common, message: &str) -> Result<Report, CliError> {
    let _lock = DirLock::acquire(&c.wallet)?;
    let (scheme, pp, _) = prepared(&c.wallet)?;
    let mut ledger = Ledger::load_or_default(&c.wallet)?;
    let mut w: Wallet<DsrKeyBody> = Wallet::load(&c.wallet, SCHEME)?;
    let blob = live_state(&w)?;
    ledger.check(state_blobs(blob))?;
    let mut reg = session(c.seed, w.nonce, &ledger)?;
    let mut state = ChainSigningState::import(&mut reg, blob)?;
    let signature = scheme.sign(&mut reg, &pp, &mut state, message.as_bytes())?;
    w.body.state = Some(state.export(&reg)?);
    w.nonce += 1;
    ledger.record(reg.spent_ids());
    ledger.save(&c.wallet)?;
    w.save(&c.wallet)?;
    let sig = emit(c, serde_json::to_value(SignatureFile { message: message.into(), signature }).expect("json"))?;
    Ok(Report::ok(json!({
        "command": "dsrkey sign",
        "message": message,
        "signatures_issued": state.signatures_issued(),
        "signature": sig,
    })))
}

pub fn verify(c: &Common, message: &str, sig: &Path) -> Result<Report, CliError> {
    let PublicParamsFile { scheme, pp } = read(&c.wallet, PP_FILE)?;
    let VerificationKeyFile { vk } = read(&c.wallet, VK_FILE)?;
    let file: SignatureFile = load_artifact(sig)?;
    let ok = scheme.verify(&pp, &vk, message.as_bytes(), &file.signature);
    Ok(Report::verdict(ok, json!({ "command": "dsrkey verify", "message": message, "valid": ok })))
}

pub fn revoke(c: &Common) -> Result<Report, CliError> {
    let _lock = DirLock::acquire(&c.wallet)?;
    let (scheme, pp, _) = prepared(&c.wallet)?;
    let mut ledger = Ledger::load_or_default(&c.wallet)?;
    let mut w: Wallet<DsrKeyBody> = Wallet::load(&c.wallet, SCHEME)?;
    let blob = live_state(&w)?;
    ledger.check(state_blobs(blob))?;
    let mut reg = session(c.seed, w.nonce, &ledger)?;
    let state = ChainSigningState::import(&mut reg, blob)?;
    let certificate = scheme.del(&mut reg, &pp, &state)?;
    w.body.state = None;
    w.nonce += 1;
    ledger.record(reg.spent_ids());
    ledger.save(&c.wallet)?;
    w.save(&c.wallet)?;
    let cert = emit(c, serde_json::to_value(CertificateFile { certificate }).expect("json"))?;
    Ok(Report::ok(json!({
        "command": "dsrkey revoke",
        "signatures_issued": state.signatures_issued(),
        "certificate": cert,
    })))
}

pub fn check(c: &Common, cert: &Path, signed: &[String]) -> Result<Report, CliError> {
    let PublicParamsFile { scheme, pp } = read(&c.wallet, PP_FILE)?;
    let CheckKeyFile { ck } = read(&c.wallet, CK_FILE)?;
    let VerificationKeyFile { vk } = read(&c.wallet, VK_FILE)?;
    let file: CertificateFile = load_artifact(cert)?;
    let messages: Vec<Vec<u8>> = signed.iter().map(|m| m.as_bytes().to_vec()).collect();
    let ok = scheme.cert(&pp, &vk, &ck, &file.certificate, &messages);
    Ok(Report::verdict(ok, json!({ "command": "dsrkey check", "signed": signed, "valid": ok })))
}

/// Artifacts are the plain JSON written by `--out` or copied from stdout.
pub(crate) fn load_artifact<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| WalletError::Io { path: path.display().to_string(), source: e })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Wallet(WalletError::MalformedBlob { path: path.display().to_string(), reason: e.to_string() })
    })
}
