//! Signatures with revocable signing keys.
//!
//! Three layers: a one-time single-bit scheme made of two one-shot keys, its
//! lift to byte messages by signing each bit of a hash, and a chain of lifted
//! keys where every signature also certifies the next verification key.
//! Deleting a key signs all unused one-shot halves on 1; the certificate is
//! checked with the one-shot trapdoors against the set of messages the
//! holder admits to having signed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::primitives::{link_message, CrhInstance};
use crate::qkernel::{Registry, StateBlob};
use crate::ttoss::{
    oss_keygen, oss_sign, oss_ver0, oss_ver1, OssPublicParams, OssSecretKey, OssSignature, OssSigningKey,
    OssVerificationKey, TtossError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsrKeyError {
    #[error("one-time key already used")]
    AlreadyUsed,
    #[error("signing key already consumed")]
    ConsumedToken,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Oss(TtossError),
}

impl From<TtossError> for DsrKeyError {
    fn from(e: TtossError) -> Self {
        match e {
            TtossError::ConsumedToken => DsrKeyError::ConsumedToken,
            TtossError::ShapeMismatch(s) => DsrKeyError::ShapeMismatch(s),
            other => DsrKeyError::Oss(other),
        }
    }
}

impl From<crate::qkernel::KernelError> for DsrKeyError {
    fn from(e: crate::qkernel::KernelError) -> Self {
        TtossError::from(e).into()
    }
}

fn idx(bit: bool) -> usize {
    bit as usize
}

// ---- one-time, single bit ----

#[derive(Debug)]
pub enum OtkSigningKey {
    Fresh { halves: [OssSigningKey; 2] },
    Used { remaining: bool, key: OssSigningKey },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OtkVerificationKey {
    pub halves: [OssVerificationKey; 2],
}

impl OtkVerificationKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.halves[0].to_bytes();
        out.extend(self.halves[1].to_bytes());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum OtkCertificate {
    Fresh { sigs: [OssSignature; 2] },
    Used { index: bool, sig: OssSignature },
}

/// Serialized form of an [`OtkSigningKey`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum OtkKeyBlob {
    Fresh { halves: [Vec<StateBlob>; 2] },
    Used { remaining: bool, key: Vec<StateBlob> },
}

impl OtkSigningKey {
    pub fn is_fresh(&self) -> bool {
        matches!(self, OtkSigningKey::Fresh { .. })
    }

    fn live_keys(&self) -> Vec<&OssSigningKey> {
        match self {
            OtkSigningKey::Fresh { halves } => halves.iter().collect(),
            OtkSigningKey::Used { key, .. } => vec![key],
        }
    }

    pub fn export(&self, reg: &Registry) -> Result<OtkKeyBlob, DsrKeyError> {
        Ok(match self {
            OtkSigningKey::Fresh { halves } => {
                OtkKeyBlob::Fresh { halves: [halves[0].export(reg)?, halves[1].export(reg)?] }
            }
            OtkSigningKey::Used { remaining, key } => OtkKeyBlob::Used { remaining: *remaining, key: key.export(reg)? },
        })
    }

    pub fn import(reg: &mut Registry, blob: &OtkKeyBlob) -> Result<Self, DsrKeyError> {
        Ok(match blob {
            OtkKeyBlob::Fresh { halves } => OtkSigningKey::Fresh {
                halves: [OssSigningKey::import(reg, &halves[0])?, OssSigningKey::import(reg, &halves[1])?],
            },
            OtkKeyBlob::Used { remaining, key } => {
                OtkSigningKey::Used { remaining: *remaining, key: OssSigningKey::import(reg, key)? }
            }
        })
    }
}

pub fn otk_keys(reg: &mut Registry, pp: &OssPublicParams) -> Result<(OtkSigningKey, OtkVerificationKey), DsrKeyError> {
    let (k0, v0) = oss_keygen(reg, pp)?;
    let (k1, v1) = oss_keygen(reg, pp)?;
    Ok((OtkSigningKey::Fresh { halves: [k0, k1] }, OtkVerificationKey { halves: [v0, v1] }))
}

/// Signs bit `m` with the `m`-th half on 0, leaving the other half.
pub fn otk_sign(
    reg: &mut Registry,
    pp: &OssPublicParams,
    sigk: &mut OtkSigningKey,
    m: bool,
) -> Result<OssSignature, DsrKeyError> {
    let OtkSigningKey::Fresh { halves } = sigk else {
        return Err(DsrKeyError::AlreadyUsed);
    };
    let sig = oss_sign(reg, pp, &halves[idx(m)], false)?;
    let placeholder = OtkSigningKey::Used { remaining: !m, key: OssSigningKey { handles: Vec::new() } };
    if let OtkSigningKey::Fresh { halves: [k0, k1] } = std::mem::replace(sigk, placeholder) {
        *sigk = OtkSigningKey::Used { remaining: !m, key: if m { k0 } else { k1 } };
    }
    Ok(sig)
}

pub fn otk_verify(
    pp: &OssPublicParams,
    vk: &OtkVerificationKey,
    m: bool,
    sig: &OssSignature,
) -> Result<bool, DsrKeyError> {
    Ok(oss_ver0(pp, &vk.halves[idx(m)], sig)?)
}

pub fn otk_del(reg: &mut Registry, pp: &OssPublicParams, sigk: &OtkSigningKey) -> Result<OtkCertificate, DsrKeyError> {
    if !sigk.live_keys().iter().all(|k| k.is_live(reg)) {
        return Err(DsrKeyError::ConsumedToken);
    }
    Ok(match sigk {
        OtkSigningKey::Fresh { halves } => {
            OtkCertificate::Fresh { sigs: [oss_sign(reg, pp, &halves[0], true)?, oss_sign(reg, pp, &halves[1], true)?] }
        }
        OtkSigningKey::Used { remaining, key } => {
            OtkCertificate::Used { index: *remaining, sig: oss_sign(reg, pp, key, true)? }
        }
    })
}

/// Checks a deletion certificate against the set of bits the holder signed.
pub fn otk_cert(
    pp: &OssPublicParams,
    vk: &OtkVerificationKey,
    ck: &OssSecretKey,
    cert: &OtkCertificate,
    signed: &[bool],
) -> bool {
    let ver1 = |b: bool, sig: &OssSignature| matches!(oss_ver1(pp, ck, &vk.halves[idx(b)], sig), Ok(true));
    let has0 = signed.contains(&false);
    let has1 = signed.contains(&true);
    match (has0, has1, cert) {
        (true, true, _) => false,
        (false, false, OtkCertificate::Fresh { sigs }) => ver1(false, &sigs[0]) && ver1(true, &sigs[1]),
        (true, false, OtkCertificate::Used { index, sig }) | (false, true, OtkCertificate::Used { index, sig }) => {
            *index == !has1 && ver1(*index, sig)
        }
        _ => false,
    }
}

// ---- hashed multi-bit lift ----

/// One one-time key per bit of `H(m)`.
#[derive(Debug)]
pub struct MbkSigningKey {
    pub keys: Vec<OtkSigningKey>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MbkVerificationKey {
    pub keys: Vec<OtkVerificationKey>,
}

impl MbkVerificationKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = (self.keys.len() as u64).to_be_bytes().to_vec();
        for k in &self.keys {
            out.extend(k.to_bytes());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbkSignature {
    pub sigs: Vec<OssSignature>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbkCertificate {
    pub certs: Vec<OtkCertificate>,
}

impl MbkSigningKey {
    pub fn export(&self, reg: &Registry) -> Result<Vec<OtkKeyBlob>, DsrKeyError> {
        self.keys.iter().map(|k| k.export(reg)).collect()
    }

    pub fn import(reg: &mut Registry, blobs: &[OtkKeyBlob]) -> Result<Self, DsrKeyError> {
        Ok(Self { keys: blobs.iter().map(|b| OtkSigningKey::import(reg, b)).collect::<Result<_, _>>()? })
    }
}

/// The one-time scheme lifted to byte messages through a hash of `bits` bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiBitScheme {
    pub crh: CrhInstance,
}

impl MultiBitScheme {
    pub fn new(crh: CrhInstance) -> Self {
        Self { crh }
    }

    pub fn bits(&self) -> usize {
        self.crh.output_bits
    }

    fn digest_bits(&self, m: &[u8]) -> Vec<bool> {
        let h = self.crh.hash(m);
        (0..h.width()).map(|i| h.get(i)).collect()
    }

    pub fn keygen(
        &self,
        reg: &mut Registry,
        pp: &OssPublicParams,
    ) -> Result<(MbkSigningKey, MbkVerificationKey), DsrKeyError> {
        let mut keys = Vec::with_capacity(self.bits());
        let mut vks = Vec::with_capacity(self.bits());
        for _ in 0..self.bits() {
            let (k, v) = otk_keys(reg, pp)?;
            keys.push(k);
            vks.push(v);
        }
        Ok((MbkSigningKey { keys }, MbkVerificationKey { keys: vks }))
    }

    pub fn sign(
        &self,
        reg: &mut Registry,
        pp: &OssPublicParams,
        sigk: &mut MbkSigningKey,
        m: &[u8],
    ) -> Result<MbkSignature, DsrKeyError> {
        if sigk.keys.len() != self.bits() {
            return Err(DsrKeyError::ShapeMismatch(format!("expected {} one-time keys", self.bits())));
        }
        if sigk.keys.iter().any(|k| !k.is_fresh()) {
            return Err(DsrKeyError::AlreadyUsed);
        }
        let bits = self.digest_bits(m);
        let sigs = sigk.keys.iter_mut().zip(bits).map(|(k, b)| otk_sign(reg, pp, k, b)).collect::<Result<_, _>>()?;
        Ok(MbkSignature { sigs })
    }

    pub fn verify(&self, pp: &OssPublicParams, vk: &MbkVerificationKey, m: &[u8], sig: &MbkSignature) -> bool {
        if vk.keys.len() != self.bits() || sig.sigs.len() != self.bits() {
            return false;
        }
        let bits = self.digest_bits(m);
        vk.keys.iter().zip(&sig.sigs).zip(bits).all(|((k, s), b)| matches!(otk_verify(pp, k, b, s), Ok(true)))
    }

    pub fn del(
        &self,
        reg: &mut Registry,
        pp: &OssPublicParams,
        sigk: &MbkSigningKey,
    ) -> Result<MbkCertificate, DsrKeyError> {
        for k in &sigk.keys {
            if !k.live_keys().iter().all(|h| h.is_live(reg)) {
                return Err(DsrKeyError::ConsumedToken);
            }
        }
        let certs = sigk.keys.iter().map(|k| otk_del(reg, pp, k)).collect::<Result<_, _>>()?;
        Ok(MbkCertificate { certs })
    }

    /// Accepts only if at most one distinct message was signed and every
    /// bitwise certificate matches it.
    pub fn cert(
        &self,
        pp: &OssPublicParams,
        vk: &MbkVerificationKey,
        ck: &OssSecretKey,
        cert: &MbkCertificate,
        signed: &[Vec<u8>],
    ) -> bool {
        if vk.keys.len() != self.bits() || cert.certs.len() != self.bits() {
            return false;
        }
        let per_bit: Vec<Vec<bool>> = match signed {
            [] => vec![Vec::new(); self.bits()],
            [first, rest @ ..] if rest.iter().all(|m| m == first) => {
                self.digest_bits(first).into_iter().map(|b| vec![b]).collect()
            }
            _ => return false,
        };
        vk.keys.iter().zip(&cert.certs).zip(&per_bit).all(|((k, c), s)| otk_cert(pp, k, ck, c, s))
    }
}

// ---- chained many-time scheme ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    #[serde(with = "crate::serde_hex::bytes")]
    pub message: Vec<u8>,
    pub next_vk: MbkVerificationKey,
    pub sig: MbkSignature,
}

/// A many-time signature: every link so far, the last one on the message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSignature {
    pub links: Vec<ChainRecord>,
}

/// One certificate per key `vk_0..vk_i`, plus the transcript naming them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCertificate {
    pub certs: Vec<MbkCertificate>,
    pub transcript: Vec<ChainRecord>,
}

/// Stateful signer: `keys[j]` is the key behind `vk_j`; all but the last
/// have signed once.
#[derive(Debug)]
pub struct ChainSigningState {
    pub keys: Vec<MbkSigningKey>,
    pub transcript: Vec<ChainRecord>,
    pub root_vk: MbkVerificationKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStateBlob {
    pub keys: Vec<Vec<OtkKeyBlob>>,
    pub transcript: Vec<ChainRecord>,
    pub root_vk: MbkVerificationKey,
}

impl ChainSigningState {
    pub fn signatures_issued(&self) -> usize {
        self.transcript.len()
    }

    pub fn export(&self, reg: &Registry) -> Result<ChainStateBlob, DsrKeyError> {
        Ok(ChainStateBlob {
            keys: self.keys.iter().map(|k| k.export(reg)).collect::<Result<_, _>>()?,
            transcript: self.transcript.clone(),
            root_vk: self.root_vk.clone(),
        })
    }

    pub fn import(reg: &mut Registry, blob: &ChainStateBlob) -> Result<Self, DsrKeyError> {
        if blob.keys.len() != blob.transcript.len() + 1 {
            return Err(DsrKeyError::ShapeMismatch("key count must exceed transcript length by one".into()));
        }
        Ok(Self {
            keys: blob.keys.iter().map(|k| MbkSigningKey::import(reg, k)).collect::<Result<_, _>>()?,
            transcript: blob.transcript.clone(),
            root_vk: blob.root_vk.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainScheme {
    pub inner: MultiBitScheme,
}

impl ChainScheme {
    pub fn new(crh: CrhInstance) -> Self {
        Self { inner: MultiBitScheme::new(crh) }
    }

    pub fn keygen(
        &self,
        reg: &mut Registry,
        pp: &OssPublicParams,
    ) -> Result<(ChainSigningState, MbkVerificationKey), DsrKeyError> {
        let (k0, vk0) = self.inner.keygen(reg, pp)?;
        Ok((ChainSigningState { keys: vec![k0], transcript: Vec::new(), root_vk: vk0.clone() }, vk0))
    }

    pub fn sign(
        &self,
        reg: &mut Registry,
        pp: &OssPublicParams,
        state: &mut ChainSigningState,
        m: &[u8],
    ) -> Result<ChainSignature, DsrKeyError> {
        let (next_key, next_vk) = self.inner.keygen(reg, pp)?;
        let current = state.keys.last_mut().ok_or_else(|| DsrKeyError::ShapeMismatch("empty chain state".into()))?;
        let sig = self.inner.sign(reg, pp, current, &link_message(m, &next_vk.to_bytes()))?;
        state.keys.push(next_key);
        state.transcript.push(ChainRecord { message: m.to_vec(), next_vk, sig });
        Ok(ChainSignature { links: state.transcript.clone() })
    }

    pub fn verify(&self, pp: &OssPublicParams, vk0: &MbkVerificationKey, m: &[u8], sig: &ChainSignature) -> bool {
        let Some(last) = sig.links.last() else {
            return false;
        };
        if last.message != m {
            return false;
        }
        let mut prev = vk0;
        for link in &sig.links {
            if !self.inner.verify(pp, prev, &link_message(&link.message, &link.next_vk.to_bytes()), &link.sig) {
                return false;
            }
            prev = &link.next_vk;
        }
        true
    }

    pub fn del(
        &self,
        reg: &mut Registry,
        pp: &OssPublicParams,
        state: &ChainSigningState,
    ) -> Result<ChainCertificate, DsrKeyError> {
        for k in &state.keys {
            for otk in &k.keys {
                if !otk.live_keys().iter().all(|h| h.is_live(reg)) {
                    return Err(DsrKeyError::ConsumedToken);
                }
            }
        }
        let certs = state.keys.iter().map(|k| self.inner.del(reg, pp, k)).collect::<Result<_, _>>()?;
        Ok(ChainCertificate { certs, transcript: state.transcript.clone() })
    }

    /// Accepts iff `signed` is exactly the multiset of transcript messages
    /// and each key's certificate matches the one message it signed.
    pub fn cert(
        &self,
        pp: &OssPublicParams,
        vk0: &MbkVerificationKey,
        ck: &OssSecretKey,
        cert: &ChainCertificate,
        signed: &[Vec<u8>],
    ) -> bool {
        if cert.certs.len() != cert.transcript.len() + 1 {
            return false;
        }
        let mut claimed: Vec<&Vec<u8>> = signed.iter().collect();
        let mut actual: Vec<&Vec<u8>> = cert.transcript.iter().map(|r| &r.message).collect();
        claimed.sort();
        actual.sort();
        if claimed != actual {
            return false;
        }
        let mut prev = vk0;
        for (c, link) in cert.certs.iter().zip(&cert.transcript) {
            let linked = link_message(&link.message, &link.next_vk.to_bytes());
            if !self.inner.cert(pp, prev, ck, c, &[linked]) {
                return false;
            }
            prev = &link.next_vk;
        }
        self.inner.cert(pp, prev, ck, cert.certs.last().expect("non-empty"), &[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::ttoss::{oss_setup, FamilyParams};

    fn setup(n: usize) -> (OssPublicParams, OssSecretKey, Registry) {
        let (pp, sk) = oss_setup(&mut seeded(17), n, &FamilyParams::KernelIdeal { width: 8 }).unwrap();
        (pp, sk, Registry::new(23))
    }

    #[test]
    fn otk_sign_verify_and_one_time() {
        let (pp, _, mut reg) = setup(3);
        for m in [false, true] {
            let (mut k, vk) = otk_keys(&mut reg, &pp).unwrap();
            assert_ne!(vk.halves[0], vk.halves[1]);
            let sig = otk_sign(&mut reg, &pp, &mut k, m).unwrap();
            assert!(otk_verify(&pp, &vk, m, &sig).unwrap());
            assert!(!otk_verify(&pp, &vk, !m, &sig).unwrap());
            assert_eq!(otk_sign(&mut reg, &pp, &mut k, m).unwrap_err(), DsrKeyError::AlreadyUsed);
        }
    }

    #[test]
    fn otk_cert_cases() {
        let (pp, ck, mut reg) = setup(3);
        let (k, vk) = otk_keys(&mut reg, &pp).unwrap();
        let cert = otk_del(&mut reg, &pp, &k).unwrap();
        assert!(otk_cert(&pp, &vk, &ck, &cert, &[]));
        assert!(!otk_cert(&pp, &vk, &ck, &cert, &[false]));
        assert!(!otk_cert(&pp, &vk, &ck, &cert, &[false, true]));
        assert_eq!(otk_del(&mut reg, &pp, &k).unwrap_err(), DsrKeyError::ConsumedToken);

        for m in [false, true] {
            let (mut k, vk) = otk_keys(&mut reg, &pp).unwrap();
            otk_sign(&mut reg, &pp, &mut k, m).unwrap();
            let cert = otk_del(&mut reg, &pp, &k).unwrap();
            assert!(otk_cert(&pp, &vk, &ck, &cert, &[m]));
            assert!(!otk_cert(&pp, &vk, &ck, &cert, &[!m]));
            assert!(!otk_cert(&pp, &vk, &ck, &cert, &[]));
            let OtkCertificate::Used { index, mut sig } = cert else { panic!() };
            sig.entries[0].bit ^= true;
            assert!(!otk_cert(&pp, &vk, &ck, &OtkCertificate::Used { index, sig }, &[m]));
        }
    }

    #[test]
    fn mbk_sign_and_revoke() {
        let (pp, ck, mut reg) = setup(2);
        let scheme = MultiBitScheme::new(CrhInstance::new(16).unwrap());
        let (mut k, vk) = scheme.keygen(&mut reg, &pp).unwrap();
        let sig = scheme.sign(&mut reg, &pp, &mut k, b"hello").unwrap();
        assert!(scheme.verify(&pp, &vk, b"hello", &sig));
        assert!(!scheme.verify(&pp, &vk, b"hellp", &sig));
        let cert = scheme.del(&mut reg, &pp, &k).unwrap();
        assert!(scheme.cert(&pp, &vk, &ck, &cert, &[b"hello".to_vec()]));
        assert!(!scheme.cert(&pp, &vk, &ck, &cert, &[b"other".to_vec()]));
        assert!(!scheme.cert(&pp, &vk, &ck, &cert, &[]));
        assert!(!scheme.cert(&pp, &vk, &ck, &cert, &[b"hello".to_vec(), b"other".to_vec()]));

        let (k, vk) = scheme.keygen(&mut reg, &pp).unwrap();
        let cert = scheme.del(&mut reg, &pp, &k).unwrap();
        assert!(scheme.cert(&pp, &vk, &ck, &cert, &[]));
    }

    #[test]
    fn chain_flow() {
        let (pp, ck, mut reg) = setup(2);
        let scheme = ChainScheme::new(CrhInstance::new(8).unwrap());
        let (mut st, vk0) = scheme.keygen(&mut reg, &pp).unwrap();
        let msgs: Vec<Vec<u8>> = vec![b"m1".to_vec(), b"m2".to_vec(), b"m3".to_vec()];
        let mut sigs = Vec::new();
        for m in &msgs {
            sigs.push(scheme.sign(&mut reg, &pp, &mut st, m).unwrap());
        }
        assert_eq!(sigs[2].links.len(), 3);
        for (m, s) in msgs.iter().zip(&sigs) {
            assert!(scheme.verify(&pp, &vk0, m, s));
        }
        let mut truncated = sigs[2].clone();
        truncated.links.pop();
        assert!(scheme.verify(&pp, &vk0, b"m2", &truncated));
        let mut swapped = sigs[2].clone();
        swapped.links.swap(0, 1);
        assert!(!scheme.verify(&pp, &vk0, b"m3", &swapped));

        let cert = scheme.del(&mut reg, &pp, &st).unwrap();
        assert_eq!(cert.certs.len(), 4);
        let mut reversed = msgs.clone();
        reversed.reverse();
        assert!(scheme.cert(&pp, &vk0, &ck, &cert, &reversed));
        assert!(!scheme.cert(&pp, &vk0, &ck, &cert, &msgs[..2]));
        assert_eq!(scheme.del(&mut reg, &pp, &st).unwrap_err(), DsrKeyError::ConsumedToken);
    }

    #[test]
    fn chain_cert_rejects_used_form_tail() {
        let (pp, ck, mut reg) = setup(2);
        let scheme = ChainScheme::new(CrhInstance::new(4).unwrap());
        let (mut st, vk0) = scheme.keygen(&mut reg, &pp).unwrap();
        scheme.sign(&mut reg, &pp, &mut st, b"a").unwrap();
        let mut cert = scheme.del(&mut reg, &pp, &st).unwrap();
        assert!(scheme.cert(&pp, &vk0, &ck, &cert, &[b"a".to_vec()]));
        cert.certs[1] = cert.certs[0].clone();
        assert!(!scheme.cert(&pp, &vk0, &ck, &cert, &[b"a".to_vec()]));
    }

    #[test]
    fn chain_state_round_trips_through_blobs() {
        let (pp, ck, mut reg) = setup(2);
        let scheme = ChainScheme::new(CrhInstance::new(4).unwrap());
        let (mut st, vk0) = scheme.keygen(&mut reg, &pp).unwrap();
        scheme.sign(&mut reg, &pp, &mut st, b"x").unwrap();
        let blob = st.export(&reg).unwrap();
        let json = serde_json::to_string(&blob).unwrap();
        let mut reg2 = Registry::new(99);
        let mut st2 = ChainSigningState::import(&mut reg2, &serde_json::from_str(&json).unwrap()).unwrap();
        let sig = scheme.sign(&mut reg2, &pp, &mut st2, b"y").unwrap();
        assert!(scheme.verify(&pp, &vk0, b"y", &sig));
        let cert = scheme.del(&mut reg2, &pp, &st2).unwrap();
        assert!(scheme.cert(&pp, &vk0, &ck, &cert, &[b"x".to_vec(), b"y".to_vec()]));
    }
}
