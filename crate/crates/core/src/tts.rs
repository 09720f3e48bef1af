//! Two-tier tokenized signatures from a one-way function.
//!
//! The token is `n` independent pair states `|x_i^0> + (-1)^{c_i}|x_i^1>`.
//! Signing 0 measures every pair computationally and is checked publicly
//! against `f(x_i^0), f(x_i^1)`; signing 1 measures in the Hadamard basis
//! and is checked with the secret parities `c_i`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::primitives::{OwfInstance, PrimitiveError};
use crate::qkernel::{KernelError, Registry, StateBlob, TokenHandle};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TtsError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("token already consumed")]
    ConsumedToken,
    #[error("signature shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtsSecretEntry {
    pub phase: bool,
    pub x0: BitString,
    pub x1: BitString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtsSecretKey {
    pub entries: Vec<TtsSecretEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtsPublicKey {
    pub owf: OwfInstance,
    pub images: Vec<(BitString, BitString)>,
}

impl TtsPublicKey {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Whether `f(z)` is one of the two images at index `i`.
    pub fn accepts(&self, i: usize, z: &BitString) -> bool {
        let (y0, y1) = &self.images[i];
        matches!(self.owf.eval(z), Ok(ref y) if y == y0 || y == y1)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (a, b) in &self.images {
            out.extend(a.to_bytes());
            out.extend(b.to_bytes());
        }
        out
    }
}

/// `n` registry handles, one per index.
#[derive(Debug)]
pub struct TtsToken {
    pub handles: Vec<TokenHandle>,
}

impl TtsToken {
    pub fn is_live(&self, reg: &Registry) -> bool {
        self.handles.iter().all(|h| reg.is_live(h))
    }

    pub fn export(&self, reg: &Registry) -> Result<Vec<StateBlob>, TtsError> {
        self.handles.iter().map(|h| reg.export_state(h).map_err(TtsError::from)).collect()
    }

    pub fn import(reg: &mut Registry, blobs: &[StateBlob]) -> Result<Self, TtsError> {
        let handles = blobs.iter().map(|b| reg.import_state(b)).collect::<Result<_, _>>()?;
        Ok(Self { handles })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtsSignature {
    /// The signed bit; payload is `{z_i}` for 0 and `{d_i}` for 1.
    pub message: bool,
    pub payload: Vec<BitString>,
}

/// Draws two distinct strings from `sample`, resampling the second on collision.
pub(crate) fn distinct_pair(mut sample: impl FnMut() -> BitString) -> (BitString, BitString) {
    let x0 = sample();
    loop {
        let x1 = sample();
        if x1 != x0 {
            return (x0, x1);
        }
    }
}

pub fn keygen(reg: &mut Registry, n: usize, owf: &OwfInstance) -> Result<(TtsSecretKey, TtsPublicKey), TtsError> {
    let width = owf.input_width();
    keygen_with(reg, n, owf, |rng| BitString::random(rng, width))
}

/// [`keygen`] with a caller-supplied string sampler.
pub fn keygen_with<F>(
    reg: &mut Registry,
    n: usize,
    owf: &OwfInstance,
    mut sample: F,
) -> Result<(TtsSecretKey, TtsPublicKey), TtsError>
where
    F: FnMut(&mut crate::rng::SimRng) -> BitString,
{
    let width = owf.input_width();
    if n == 0 {
        return Err(TtsError::BadParams("n must be at least 1".into()));
    }
    if width < 2 {
        return Err(TtsError::BadParams("string width must be at least 2".into()));
    }
    let mut entries = Vec::with_capacity(n);
    let mut images = Vec::with_capacity(n);
    for _ in 0..n {
        let (x0, x1) = distinct_pair(|| sample(reg.rng()));
        if x0.width() != width || x1.width() != width {
            return Err(TtsError::BadParams("sampler returned wrong width".into()));
        }
        let phase = crate::rng::random_bit(reg.rng());
        images.push((owf.eval(&x0)?, owf.eval(&x1)?));
        entries.push(TtsSecretEntry { phase, x0, x1 });
    }
    Ok((TtsSecretKey { entries }, TtsPublicKey { owf: owf.clone(), images }))
}

pub fn stategen(reg: &mut Registry, sk: &TtsSecretKey) -> Result<TtsToken, TtsError> {
    let handles =
        sk.entries.iter().map(|e| reg.new_pair_state(e.x0.clone(), e.x1.clone(), e.phase)).collect::<Result<_, _>>()?;
    Ok(TtsToken { handles })
}

pub fn sign(reg: &mut Registry, token: &TtsToken, message: bool) -> Result<TtsSignature, TtsError> {
    if !token.is_live(reg) {
        return Err(TtsError::ConsumedToken);
    }
    let payload = token
        .handles
        .iter()
        .map(|h| if message { reg.measure_hadamard(h) } else { reg.measure_computational(h) })
        .collect::<Result<_, _>>()?;
    Ok(TtsSignature { message, payload })
}

fn check_shape(sig: &TtsSignature, message: bool, n: usize, width: usize) -> Result<(), TtsError> {
    if sig.message != message {
        return Err(TtsError::ShapeMismatch(format!("expected a signature on {}", message as u8)));
    }
    if sig.payload.len() != n {
        return Err(TtsError::ShapeMismatch(format!("expected {n} entries, got {}", sig.payload.len())));
    }
    if sig.payload.iter().any(|z| z.width() != width) {
        return Err(TtsError::ShapeMismatch(format!("entries must be {width} bits")));
    }
    Ok(())
}

/// Public check of a signature on 0.
pub fn ver0(pk: &TtsPublicKey, sig: &TtsSignature) -> Result<bool, TtsError> {
    check_shape(sig, false, pk.len(), pk.owf.input_width())?;
    Ok(sig.payload.iter().enumerate().all(|(i, z)| pk.accepts(i, z)))
}

/// Secret-key check of a signature on 1.
pub fn ver1(sk: &TtsSecretKey, sig: &TtsSignature) -> Result<bool, TtsError> {
    let width = sk.entries.first().map_or(0, |e| e.x0.width());
    check_shape(sig, true, sk.entries.len(), width)?;
    Ok(sk.entries.iter().zip(&sig.payload).all(|(e, d)| d.dot(&e.x0.xor(&e.x1)) == e.phase))
}
