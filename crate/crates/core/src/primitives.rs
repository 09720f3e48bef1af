//! Classical building blocks: one-way functions, a collision-resistant hash,
//! and a many-time signature scheme built from the one-way function alone.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bits::BitString;
use crate::rng::SimRng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimitiveError {
    #[error("input width mismatch: expected {expected}, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },
    #[error("preimages are only enumerable for the ideal-toy function")]
    NotEnumerable,
    #[error("one-time key already used")]
    KeyExhausted,
    #[error("bad parameters: {0}")]
    BadParams(String),
}

/// Largest input width of an ideal-toy function.
pub const MAX_TOY_WIDTH: usize = 20;

fn sha256(parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    let mut out = [0u8; 32];
    out.copy_from_slice(h.finalize().as_slice());
    out
}

/// A one-way function `{0,1}^ℓ -> {0,1}^κ`.
///
/// `StandardHash` is SHA-256 with a domain tag (κ = 256). `IdealToy` is a
/// seeded random-oracle table over a small domain; it serializes as its seed
/// and widths only, and its preimages can be enumerated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum OwfInstance {
    StandardHash { input_width: usize },
    IdealToy { seed: u64, input_width: usize, output_width: usize },
}

impl OwfInstance {
    pub fn standard(input_width: usize) -> Self {
        OwfInstance::StandardHash { input_width }
    }

    pub fn ideal_toy(seed: u64, input_width: usize, output_width: usize) -> Result<Self, PrimitiveError> {
        if input_width == 0 || input_width > MAX_TOY_WIDTH {
            return Err(PrimitiveError::BadParams(format!("toy input width {input_width} not in 1..={MAX_TOY_WIDTH}")));
        }
        if output_width == 0 || output_width > 256 {
            return Err(PrimitiveError::BadParams(format!("output width {output_width} not in 1..=256")));
        }
        Ok(OwfInstance::IdealToy { seed, input_width, output_width })
    }

    pub fn input_width(&self) -> usize {
        match *self {
            OwfInstance::StandardHash { input_width } | OwfInstance::IdealToy { input_width, .. } => input_width,
        }
    }

    pub fn output_width(&self) -> usize {
        match *self {
            OwfInstance::StandardHash { .. } => 256,
            OwfInstance::IdealToy { output_width, .. } => output_width,
        }
    }

    pub fn eval(&self, x: &BitString) -> Result<BitString, PrimitiveError> {
        if x.width() != self.input_width() {
            return Err(PrimitiveError::WidthMismatch { expected: self.input_width(), actual: x.width() });
        }
        Ok(match *self {
            OwfInstance::StandardHash { input_width } => {
                let digest = sha256(&[b"revsig/owf", &(input_width as u64).to_be_bytes(), &x.to_bytes()]);
                BitString::from_be_bytes_prefix(&digest, 256)
            }
            OwfInstance::IdealToy { seed, output_width, .. } => {
                let row = x.to_u64().expect("toy inputs fit in 64 bits");
                let digest = sha256(&[b"revsig/owf-toy", &seed.to_be_bytes(), &row.to_be_bytes()]);
                BitString::from_be_bytes_prefix(&digest, output_width)
            }
        })
    }

    /// The full table `x -> f(x)` in input order.
    pub fn table(&self) -> Result<Vec<BitString>, PrimitiveError> {
        match self {
            OwfInstance::StandardHash { .. } => Err(PrimitiveError::NotEnumerable),
            OwfInstance::IdealToy { input_width, .. } => BitString::all(*input_width).map(|x| self.eval(&x)).collect(),
        }
    }

    /// Every `x` with `f(x) = y`, by exhaustive search.
    pub fn preimages(&self, y: &BitString) -> Result<Vec<BitString>, PrimitiveError> {
        match self {
            OwfInstance::StandardHash { .. } => Err(PrimitiveError::NotEnumerable),
            OwfInstance::IdealToy { input_width, .. } => {
                let mut out = Vec::new();
                for x in BitString::all(*input_width) {
                    if &self.eval(&x)? == y {
                        out.push(x);
                    }
                }
                Ok(out)
            }
        }
    }
}

/// SHA-256 truncated to `output_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrhInstance {
    pub output_bits: usize,
}

impl Default for CrhInstance {
    fn default() -> Self {
        Self { output_bits: 256 }
    }
}

impl CrhInstance {
    pub fn new(output_bits: usize) -> Result<Self, PrimitiveError> {
        if output_bits == 0 || output_bits > 256 {
            return Err(PrimitiveError::BadParams(format!("hash width {output_bits} not in 1..=256")));
        }
        Ok(Self { output_bits })
    }

    pub fn hash(&self, message: &[u8]) -> BitString {
        let digest = sha256(&[b"revsig/crh", message]);
        BitString::from_be_bytes_prefix(&digest, self.output_bits)
    }
}

/// An EUF-CMA signature scheme. Signing keys may be stateful.
pub trait SignatureScheme {
    type SigningKey;
    type VerifyingKey: Clone;
    type Signature: Clone;

    fn keygen(&self, rng: &mut SimRng) -> (Self::SigningKey, Self::VerifyingKey);
    fn sign(
        &self,
        key: &mut Self::SigningKey,
        rng: &mut SimRng,
        message: &[u8],
    ) -> Result<Self::Signature, PrimitiveError>;
    fn verify(&self, vk: &Self::VerifyingKey, message: &[u8], signature: &Self::Signature) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LamportPublicKey {
    /// `images[i] = (f(x_i^0), f(x_i^1))` for each digest bit `i`.
    pub images: Vec<(BitString, BitString)>,
}

impl LamportPublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (a, b) in &self.images {
            out.extend(a.to_bytes());
            out.extend(b.to_bytes());
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LamportSecretKey {
    preimages: Vec<(BitString, BitString)>,
    used: bool,
}

/// One revealed preimage per digest bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LamportSignature {
    pub revealed: Vec<BitString>,
}

/// One-time Lamport signatures over `crh(message)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lamport {
    pub owf: OwfInstance,
    pub crh: CrhInstance,
}

impl Lamport {
    pub fn keygen(&self, rng: &mut SimRng) -> (LamportSecretKey, LamportPublicKey) {
        let width = self.owf.input_width();
        let preimages: Vec<_> =
            (0..self.crh.output_bits).map(|_| (BitString::random(rng, width), BitString::random(rng, width))).collect();
        let images = preimages
            .iter()
            .map(|(a, b)| (self.owf.eval(a).expect("width"), self.owf.eval(b).expect("width")))
            .collect();
        (LamportSecretKey { preimages, used: false }, LamportPublicKey { images })
    }

    pub fn sign(&self, key: &mut LamportSecretKey, message: &[u8]) -> Result<LamportSignature, PrimitiveError> {
        if key.used {
            return Err(PrimitiveError::KeyExhausted);
        }
        key.used = true;
        let digest = self.crh.hash(message);
        let revealed = key
            .preimages
            .iter()
            .enumerate()
            .map(|(i, (a, b))| if digest.get(i) { b.clone() } else { a.clone() })
            .collect();
        Ok(LamportSignature { revealed })
    }

    pub fn verify(&self, vk: &LamportPublicKey, message: &[u8], sig: &LamportSignature) -> bool {
        if vk.images.len() != self.crh.output_bits || sig.revealed.len() != vk.images.len() {
            return false;
        }
        let digest = self.crh.hash(message);
        vk.images.iter().zip(&sig.revealed).enumerate().all(|(i, ((y0, y1), x))| {
            let expected = if digest.get(i) { y1 } else { y0 };
            matches!(self.owf.eval(x), Ok(ref y) if y == expected)
        })
    }
}

/// One link of a chained signature: `sig` signs `message ‖ next_vk` under
/// the previous link's key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    #[serde(with = "crate::serde_hex::bytes")]
    pub message: Vec<u8>,
    pub next_vk: LamportPublicKey,
    pub sig: LamportSignature,
}

pub fn link_message(message: &[u8], next_vk: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + message.len() + next_vk.len());
    out.extend((message.len() as u64).to_be_bytes());
    out.extend(message);
    out.extend(next_vk);
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainSigningKey {
    current: LamportSecretKey,
    transcript: Vec<ChainLink>,
}

impl ChainSigningKey {
    pub fn signatures_issued(&self) -> usize {
        self.transcript.len()
    }
}

/// Full transcript up to and including the signed message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSignature {
    pub scheme: String,
    pub links: Vec<ChainLink>,
}

pub const LAMPORT_CHAIN_TAG: &str = "lamport-chain";

/// Many-time signatures: each one-time Lamport key signs the message
/// together with the next key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LamportChain {
    pub lamport: Lamport,
}

impl LamportChain {
    pub fn new(owf: OwfInstance, crh: CrhInstance) -> Self {
        Self { lamport: Lamport { owf, crh } }
    }
}

impl Default for LamportChain {
    fn default() -> Self {
        Self::new(OwfInstance::standard(256), CrhInstance::default())
    }
}

impl SignatureScheme for LamportChain {
    type SigningKey = ChainSigningKey;
    type VerifyingKey = LamportPublicKey;
    type Signature = ChainSignature;

    fn keygen(&self, rng: &mut SimRng) -> (ChainSigningKey, LamportPublicKey) {
        let (current, vk) = self.lamport.keygen(rng);
        (ChainSigningKey { current, transcript: Vec::new() }, vk)
    }

    fn sign(
        &self,
        key: &mut ChainSigningKey,
        rng: &mut SimRng,
        message: &[u8],
    ) -> Result<ChainSignature, PrimitiveError> {
        let (next_sk, next_vk) = self.lamport.keygen(rng);
        let sig = self.lamport.sign(&mut key.current, &link_message(message, &next_vk.to_bytes()))?;
        key.current = next_sk;
        key.transcript.push(ChainLink { message: message.to_vec(), next_vk, sig });
        Ok(ChainSignature { scheme: LAMPORT_CHAIN_TAG.into(), links: key.transcript.clone() })
    }

    fn verify(&self, vk: &LamportPublicKey, message: &[u8], signature: &ChainSignature) -> bool {
        if signature.scheme != LAMPORT_CHAIN_TAG {
            return false;
        }
        let Some(last) = signature.links.last() else { return false };
        if last.message != message {
            return false;
        }
        let mut current = vk;
        for link in &signature.links {
            let signed = link_message(&link.message, &link.next_vk.to_bytes());
            if !self.lamport.verify(current, &signed, &link.sig) {
                return false;
            }
            current = &link.next_vk;
        }
        true
    }
}
