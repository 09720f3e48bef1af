//! Signatures with revocable signatures.
//!
//! The no-query scheme signs a bit `m` by handing out a fresh two-tier token
//! for the `m`-th of two key halves; verification checks the token against
//! the public half without disturbing it, and deletion signs the token on 1
//! so the holder of that half's secret key can check it. The many-time
//! compiler binds a fresh no-query key to each message with an ordinary
//! signature scheme.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::primitives::{OwfInstance, PrimitiveError, SignatureScheme};
use crate::qkernel::{KernelError, Registry};
use crate::tts::{self, TtsError, TtsPublicKey, TtsSecretKey, TtsSignature, TtsToken};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsrSignError {
    #[error("signature token already consumed")]
    ConsumedToken,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Tts(TtsError),
    #[error(transparent)]
    Classical(#[from] PrimitiveError),
}

impl From<TtsError> for DsrSignError {
    fn from(e: TtsError) -> Self {
        match e {
            TtsError::ConsumedToken | TtsError::Kernel(KernelError::ConsumedHandle(_)) => DsrSignError::ConsumedToken,
            TtsError::BadParams(s) => DsrSignError::BadParams(s),
            other => DsrSignError::Tts(other),
        }
    }
}

impl From<KernelError> for DsrSignError {
    fn from(e: KernelError) -> Self {
        TtsError::from(e).into()
    }
}

/// Token size and one-way function for the two-tier keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NqParams {
    pub n: usize,
    pub owf: OwfInstance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NqSigningKey {
    pub halves: [TtsSecretKey; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NqVerificationKey {
    pub halves: [TtsPublicKey; 2],
}

impl NqVerificationKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let a = self.halves[0].to_bytes();
        let b = self.halves[1].to_bytes();
        let mut out = (a.len() as u64).to_be_bytes().to_vec();
        out.extend(a);
        out.extend(b);
        out
    }
}

pub fn nq_keygen(reg: &mut Registry, params: &NqParams) -> Result<(NqSigningKey, NqVerificationKey), DsrSignError> {
    let (sk0, pk0) = tts::keygen(reg, params.n, &params.owf)?;
    let (sk1, pk1) = tts::keygen(reg, params.n, &params.owf)?;
    Ok((NqSigningKey { halves: [sk0, sk1] }, NqVerificationKey { halves: [pk0, pk1] }))
}

/// A fresh token for bit `m` and its check key.
pub fn nq_sign(reg: &mut Registry, sigk: &NqSigningKey, m: bool) -> Result<(TtsToken, TtsSecretKey), DsrSignError> {
    let half = &sigk.halves[m as usize];
    Ok((tts::stategen(reg, half)?, half.clone()))
}

/// Checks every state of the token against the `m`-th public half by a
/// measurement that only reveals whether the predicate holds.
pub fn nq_verify(reg: &mut Registry, vk: &NqVerificationKey, token: &TtsToken, m: bool) -> Result<bool, DsrSignError> {
    if !token.is_live(reg) {
        return Err(DsrSignError::ConsumedToken);
    }
    let pk = &vk.halves[m as usize];
    if token.handles.len() != pk.len() {
        return Ok(false);
    }
    for (i, h) in token.handles.iter().enumerate() {
        if !reg.measure_function(h, |z| pk.accepts(i, z))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn nq_del(reg: &mut Registry, token: &TtsToken) -> Result<TtsSignature, DsrSignError> {
    Ok(tts::sign(reg, token, true)?)
}

pub fn nq_cert(ck: &TtsSecretKey, cert: &TtsSignature) -> bool {
    matches!(tts::ver1(ck, cert), Ok(true))
}

/// Multi-bit no-query signing: one independent key pair per message bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelNqSigningKey {
    pub keys: Vec<NqSigningKey>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelNqVerificationKey {
    pub keys: Vec<NqVerificationKey>,
}

pub fn parallel_keygen(
    reg: &mut Registry,
    params: &NqParams,
    bits: usize,
) -> Result<(ParallelNqSigningKey, ParallelNqVerificationKey), DsrSignError> {
    if bits == 0 {
        return Err(DsrSignError::BadParams("message width must be at least 1".into()));
    }
    let (keys, vks) = (0..bits).map(|_| nq_keygen(reg, params)).collect::<Result<Vec<_>, _>>()?.into_iter().unzip();
    Ok((ParallelNqSigningKey { keys }, ParallelNqVerificationKey { keys: vks }))
}

pub fn parallel_sign(
    reg: &mut Registry,
    sigk: &ParallelNqSigningKey,
    m: &BitString,
) -> Result<(Vec<TtsToken>, Vec<TtsSecretKey>), DsrSignError> {
    if m.width() != sigk.keys.len() {
        return Err(DsrSignError::BadParams(format!("message must be {} bits", sigk.keys.len())));
    }
    let pairs = sigk.keys.iter().enumerate().map(|(i, k)| nq_sign(reg, k, m.get(i))).collect::<Result<Vec<_>, _>>()?;
    Ok(pairs.into_iter().unzip())
}

pub fn parallel_verify(
    reg: &mut Registry,
    vk: &ParallelNqVerificationKey,
    tokens: &[TtsToken],
    m: &BitString,
) -> Result<bool, DsrSignError> {
    if m.width() != vk.keys.len() || tokens.len() != vk.keys.len() {
        return Ok(false);
    }
    for (i, (k, t)) in vk.keys.iter().zip(tokens).enumerate() {
        if !nq_verify(reg, k, t, m.get(i))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn parallel_del(reg: &mut Registry, tokens: &[TtsToken]) -> Result<Vec<TtsSignature>, DsrSignError> {
    if tokens.iter().any(|t| !t.is_live(reg)) {
        return Err(DsrSignError::ConsumedToken);
    }
    tokens.iter().map(|t| nq_del(reg, t)).collect()
}

pub fn parallel_cert(cks: &[TtsSecretKey], certs: &[TtsSignature]) -> bool {
    cks.len() == certs.len() && cks.iter().zip(certs).all(|(ck, c)| nq_cert(ck, c))
}

/// Many-time compiler over a classical signature scheme.
#[derive(Debug, Clone)]
pub struct MtScheme<S> {
    pub classical: S,
    pub nq: NqParams,
}

/// A quantum signature: the token, the classical signature binding the
/// no-query key to the message, and that key.
#[derive(Debug)]
pub struct MtSignature<Sig> {
    pub token: TtsToken,
    pub sig: Sig,
    pub nq_vk: NqVerificationKey,
}

/// `nq_vk ‖ m` with a length prefix on the key.
pub fn bound_message(nq_vk: &NqVerificationKey, m: &[u8]) -> Vec<u8> {
    let vk = nq_vk.to_bytes();
    let mut out = (vk.len() as u64).to_be_bytes().to_vec();
    out.extend(vk);
    out.extend(m);
    out
}

impl<S: SignatureScheme> MtScheme<S> {
    pub fn new(classical: S, nq: NqParams) -> Self {
        Self { classical, nq }
    }

    pub fn keygen(&self, reg: &mut Registry) -> (S::SigningKey, S::VerifyingKey) {
        self.classical.keygen(reg.rng())
    }

    pub fn sign(
        &self,
        reg: &mut Registry,
        sigk: &mut S::SigningKey,
        m: &[u8],
    ) -> Result<(MtSignature<S::Signature>, TtsSecretKey), DsrSignError> {
        let (nq_sk, nq_vk) = nq_keygen(reg, &self.nq)?;
        let sig = self.classical.sign(sigk, reg.rng(), &bound_message(&nq_vk, m))?;
        let (token, ck) = nq_sign(reg, &nq_sk, false)?;
        Ok((MtSignature { token, sig, nq_vk }, ck))
    }

    /// The classical check first, then the non-destructive token check.
    pub fn verify(
        &self,
        reg: &mut Registry,
        vk: &S::VerifyingKey,
        psi: &MtSignature<S::Signature>,
        m: &[u8],
    ) -> Result<bool, DsrSignError> {
        if !self.classical.verify(vk, &bound_message(&psi.nq_vk, m), &psi.sig) {
            return Ok(false);
        }
        nq_verify(reg, &psi.nq_vk, &psi.token, false)
    }

    pub fn del(&self, reg: &mut Registry, psi: &MtSignature<S::Signature>) -> Result<TtsSignature, DsrSignError> {
        nq_del(reg, &psi.token)
    }

    pub fn cert(&self, ck: &TtsSecretKey, cert: &TtsSignature) -> bool {
        nq_cert(ck, cert)
    }
}
