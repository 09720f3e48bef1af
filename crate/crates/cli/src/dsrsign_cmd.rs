//! `dsrsign` workflows. The wallet holds the classical signing key and the
//! token states of every signature it issued; check keys live in a private
//! `keystore.json` keyed by signature id.

use std::collections::BTreeMap;
use std::path::Path;

use revsig::dsrsign::{MtScheme, MtSignature, NqParams, NqVerificationKey};
use revsig::primitives::{ChainSignature, ChainSigningKey, LamportChain, LamportPublicKey};
use revsig::qkernel::StateBlob;
use revsig::tts::{TtsSecretKey, TtsSignature, TtsToken};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dsrkey_cmd::{load_artifact, session};
use crate::params::Params;
use crate::wallet::{self, DirLock, Ledger, Wallet, WalletError};
use crate::{emit, CliError, Common, Report};

const SCHEME: &str = "dsrsign";
const VK_FILE: &str = "vk.json";
const KEYSTORE_FILE: &str = "keystore.json";

#[derive(Serialize, Deserialize)]
struct VerificationKeyFile {
    classical: LamportChain,
    nq: NqParams,
    vk: LamportPublicKey,
}

impl VerificationKeyFile {
    fn scheme(&self) -> MtScheme<LamportChain> {
        MtScheme::new(self.classical.clone(), self.nq.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DsrSignBody {
    pub signing_key: ChainSigningKey,
    /// Token states by signature id.
    pub tokens: BTreeMap<String, Vec<StateBlob>>,
}

#[derive(Default, Serialize, Deserialize)]
struct Keystore {
    keys: BTreeMap<String, TtsSecretKey>,
}

/// The public part of a signature; the token itself stays in the wallet.
#[derive(Serialize, Deserialize)]
struct SignatureFile {
    id: String,
    message: String,
    token_ids: Vec<String>,
    sig: ChainSignature,
    nq_vk: NqVerificationKey,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    id: String,
    certificate: TtsSignature,
}

pub fn keygen(c: &Common) -> Result<Report, CliError> {
    let params = Params::load(c.params.as_deref())?;
    let _lock = DirLock::acquire(&c.wallet)?;
    if c.wallet.join(wallet::WALLET_FILE).exists() {
        return Err(CliError::Usage(format!("{} already holds a wallet", c.wallet.display())));
    }
    let owf = params.owf(c.seed)?;
    let scheme = MtScheme::new(LamportChain::new(owf.clone(), params.crh()?), NqParams { n: params.n, owf });
    let ledger = Ledger::load_or_default(&c.wallet)?;
    let mut reg = session(c.seed, 1, &ledger)?;
    let (sk, vk) = scheme.keygen(&mut reg);
    let keys = VerificationKeyFile { classical: scheme.classical, nq: scheme.nq, vk };
    let mut w = Wallet::new(SCHEME, DsrSignBody { signing_key: sk, tokens: BTreeMap::new() });
    w.nonce += 1;
    wallet::save(&c.wallet.join(VK_FILE), &keys, false)?;
    wallet::save(&c.wallet.join(KEYSTORE_FILE), &Keystore::default(), true)?;
    w.save(&c.wallet)?;
    Ok(Report::ok(json!({
        "command": "dsrsign keygen",
        "n": params.n,
        "ell": params.ell,
        "owf": params.owf,
        "files": [VK_FILE, KEYSTORE_FILE, wallet::WALLET_FILE],
    })))
}

pub fn sign(c: &Common, message: &str) -> Result<Report, CliError> {
    let _lock = DirLock::acquire(&c.wallet)?;
    let keys: VerificationKeyFile = wallet::load(&c.wallet.join(VK_FILE))?;
    let mut store: Keystore = wallet::load(&c.wallet.join(KEYSTORE_FILE))?;
    let ledger = Ledger::load_or_default(&c.wallet)?;
    let mut w: Wallet<DsrSignBody> = Wallet::load(&c.wallet, SCHEME)?;
    let mut reg = session(c.seed, w.nonce, &ledger)?;
    let (psi, ck) = keys.scheme().sign(&mut reg, &mut w.body.signing_key, message.as_bytes())?;
    let blobs = psi.token.export(&reg)?;
    let id = blobs.first().map(|b| b.id.clone()).ok_or_else(|| CliError::Scheme("empty token".into()))?;
    let token_ids = blobs.iter().map(|b| b.id.clone()).collect();
    w.body.tokens.insert(id.clone(), blobs);
    w.nonce += 1;
    store.keys.insert(id.clone(), ck);
    wallet::save(&c.wallet.join(KEYSTORE_FILE), &store, true)?;
    w.save(&c.wallet)?;
    let file = SignatureFile { id: id.clone(), message: message.into(), token_ids, sig: psi.sig, nq_vk: psi.nq_vk };
    let sig = emit(c, serde_json::to_value(file).expect("json"))?;
    Ok(Report::ok(json!({ "command": "dsrsign sign", "id": id, "message": message, "signature": sig })))
}

/// Rebuilds a signature from its public file and the wallet's token.
fn open(
    c: &Common,
    w: &Wallet<DsrSignBody>,
    ledger: &Ledger,
    file: SignatureFile,
) -> Result<(revsig::qkernel::Registry, MtSignature<ChainSignature>, String), CliError> {
    let blobs = w
        .body
        .tokens
        .get(&file.id)
        .ok_or_else(|| CliError::Usage(format!("signature {} is not held by this wallet", file.id)))?;
    ledger.check(blobs)?;
    if blobs.iter().map(|b| &b.id).ne(file.token_ids.iter()) {
        return Err(WalletError::MalformedBlob {
            path: "signature".into(),
            reason: "token ids do not match the wallet".into(),
        }
        .into());
    }
    let mut reg = session(c.seed, w.nonce, ledger)?;
    let token = TtsToken::import(&mut reg, blobs)?;
    Ok((reg, MtSignature { token, sig: file.sig, nq_vk: file.nq_vk }, file.id))
}

pub fn verify(c: &Common, message: &str, sig: &Path) -> Result<Report, CliError> {
    let _lock = DirLock::acquire(&c.wallet)?;
    let keys: VerificationKeyFile = wallet::load(&c.wallet.join(VK_FILE))?;
    let ledger = Ledger::load_or_default(&c.wallet)?;
    let mut w: Wallet<DsrSignBody> = Wallet::load(&c.wallet, SCHEME)?;
    let (mut reg, psi, id) = open(c, &w, &ledger, load_artifact(sig)?)?;
    let ok = keys.scheme().verify(&mut reg, &keys.vk, &psi, message.as_bytes())?;
    let after = psi.token.export(&reg)?;
    if w.body.tokens.get(&id) != Some(&after) {
        w.body.tokens.insert(id.clone(), after);
        w.save(&c.wallet)?;
    }
    Ok(Report::verdict(ok, json!({ "command": "dsrsign verify", "id": id, "message": message, "valid": ok })))
}

pub fn revoke(c: &Common, sig: &Path) -> Result<Report, CliError> {
    let _lock = DirLock::acquire(&c.wallet)?;
    let keys: VerificationKeyFile = wallet::load(&c.wallet.join(VK_FILE))?;
    let mut ledger = Ledger::load_or_default(&c.wallet)?;
    let mut w: Wallet<DsrSignBody> = Wallet::load(&c.wallet, SCHEME)?;
    let (mut reg, psi, id) = open(c, &w, &ledger, load_artifact(sig)?)?;
    let certificate = keys.scheme().del(&mut reg, &psi)?;
    w.body.tokens.remove(&id);
    w.nonce += 1;
    ledger.record(reg.spent_ids());
    ledger.save(&c.wallet)?;
    w.save(&c.wallet)?;
    let cert = emit(c, serde_json::to_value(CertificateFile { id: id.clone(), certificate }).expect("json"))?;
    Ok(Report::ok(json!({ "command": "dsrsign revoke", "id": id, "certificate": cert })))
}

pub fn check(c: &Common, sig: &Path, cert: &Path) -> Result<Report, CliError> {
    let keys: VerificationKeyFile = wallet::load(&c.wallet.join(VK_FILE))?;
    let store: Keystore = wallet::load(&c.wallet.join(KEYSTORE_FILE))?;
    let sig: SignatureFile = load_artifact(sig)?;
    let cert: CertificateFile = load_artifact(cert)?;
    let ck =
        store.keys.get(&sig.id).ok_or_else(|| CliError::Usage(format!("no check key for signature {}", sig.id)))?;
    let ok = cert.id == sig.id && keys.scheme().cert(ck, &cert.certificate);
    Ok(Report::verdict(ok, json!({ "command": "dsrsign check", "id": sig.id, "valid": ok })))
}
