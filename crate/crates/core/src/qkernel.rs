//! Symbolic quantum kernel.
//!
//! Every quantum register the schemes touch is either a computational-basis
//! string or an equal superposition of two distinct strings with a relative
//! sign, `(|x0> + (-1)^c |x1>)/sqrt(2)`. Both families are closed under the
//! measurements and classical reversible maps the protocols use, so the
//! kernel tracks them exactly and samples measurement outcomes from their
//! true distributions.
//!
//! States live in a [`Registry`] and are reached through non-clonable
//! [`TokenHandle`]s. A destructive measurement moves the id to the spent
//! ledger; every later use of the handle fails. This is the only place
//! no-cloning is enforced, so exported blobs are marked as simulation data.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::rng::{self, SimRng};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("pair state needs two distinct support strings")]
    EqualSupport,
    #[error("width mismatch: expected {expected}, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },
    #[error("handle {0} has already been consumed")]
    ConsumedHandle(TokenId),
    #[error("handle {0} belongs to a different registry")]
    ForeignHandle(TokenId),
    #[error("bit index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("map is not a bijection on {0}-bit strings")]
    NotBijective(usize),
    #[error("state id {0} is in the spent ledger")]
    SpentId(TokenId),
    #[error("state id {0} is already live in this registry")]
    LiveId(TokenId),
    #[error("malformed state blob: {0}")]
    MalformedBlob(String),
    #[error("registry is sealed: amplitudes are not observable")]
    Sealed,
}

/// Opaque registry identifier, rendered as 32 hex digits.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(pub u128);

impl TokenId {
    pub fn to_hex(self) -> String {
        format!("{:032x}", self.0)
    }

    pub fn from_hex(hex: &str) -> Result<Self, KernelError> {
        if hex.is_empty() || hex.len() > 32 {
            return Err(KernelError::MalformedBlob(format!("bad id {hex:?}")));
        }
        u128::from_str_radix(hex, 16).map(TokenId).map_err(|_| KernelError::MalformedBlob(format!("bad id {hex:?}")))
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TokenId({})", self.to_hex())
    }
}

impl Serialize for TokenId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for TokenId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        TokenId::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// `(|x0> + (-1)^phase |x1>)/sqrt(2)` with `x0 < x1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasedPairState {
    x0: BitString,
    x1: BitString,
    phase: bool,
}

impl PhasedPairState {
    /// Canonicalizes the support order. Swapping the labels only changes the
    /// global phase, so the relative phase carries over unchanged.
    pub fn new(a: BitString, b: BitString, phase: bool) -> Result<Self, KernelError> {
        if a.width() != b.width() {
            return Err(KernelError::WidthMismatch { expected: a.width(), actual: b.width() });
        }
        if a == b {
            return Err(KernelError::EqualSupport);
        }
        let (x0, x1) = if a < b { (a, b) } else { (b, a) };
        Ok(Self { x0, x1, phase })
    }

    pub fn width(&self) -> usize {
        self.x0.width()
    }
    pub fn x0(&self) -> &BitString {
        &self.x0
    }
    pub fn x1(&self) -> &BitString {
        &self.x1
    }
    pub fn phase(&self) -> bool {
        self.phase
    }
    pub fn difference(&self) -> BitString {
        self.x0.xor(&self.x1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingletonState {
    value: BitString,
}

impl SingletonState {
    pub fn new(value: BitString) -> Self {
        Self { value }
    }
    pub fn width(&self) -> usize {
        self.value.width()
    }
    pub fn value(&self) -> &BitString {
        &self.value
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuantumState {
    Pair(PhasedPairState),
    Singleton(SingletonState),
}

impl QuantumState {
    pub fn width(&self) -> usize {
        match self {
            QuantumState::Pair(p) => p.width(),
            QuantumState::Singleton(s) => s.width(),
        }
    }

    /// Computational-basis support.
    pub fn support(&self) -> Vec<&BitString> {
        match self {
            QuantumState::Pair(p) => vec![&p.x0, &p.x1],
            QuantumState::Singleton(s) => vec![&s.value],
        }
    }
}

/// Consume-once capability for one registry state.
///
/// Handles are deliberately not `Clone`: the only way to obtain a second
/// handle to the same id is [`Registry::import_state`], which refuses ids
/// that are live or spent.
#[derive(Debug, PartialEq, Eq)]
pub struct TokenHandle {
    id: TokenId,
    registry: u64,
}

impl TokenHandle {
    pub fn id(&self) -> TokenId {
        self.id
    }
}

/// JSON wire form of one state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateBlob {
    pub v: u32,
    pub kind: String,
    pub id: String,
    pub width: usize,
    pub x0: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<u8>,
}

pub const STATE_BLOB_VERSION: u32 = 1;

impl StateBlob {
    fn decode(&self) -> Result<(TokenId, QuantumState), KernelError> {
        let malformed = |m: &str| KernelError::MalformedBlob(m.to_string());
        if self.v != STATE_BLOB_VERSION {
            return Err(malformed("unsupported blob version"));
        }
        let id = TokenId::from_hex(&self.id)?;
        let parse =
            |hex: &str| BitString::from_hex(hex, self.width).map_err(|e| KernelError::MalformedBlob(e.to_string()));
        let x0 = parse(&self.x0)?;
        let state = match self.kind.as_str() {
            "pair" => {
                let x1 = parse(self.x1.as_deref().ok_or_else(|| malformed("pair without x1"))?)?;
                let phase = match self.phase {
                    Some(0) => false,
                    Some(1) => true,
                    _ => return Err(malformed("phase must be 0 or 1")),
                };
                if x0 >= x1 {
                    return Err(malformed("pair support not in canonical order"));
                }
                QuantumState::Pair(PhasedPairState::new(x0, x1, phase)?)
            }
            "singleton" => {
                if self.x1.is_some() || self.phase.is_some() {
                    return Err(malformed("singleton carries pair fields"));
                }
                QuantumState::Singleton(SingletonState::new(x0))
            }
            _ => return Err(malformed("unknown kind")),
        };
        Ok((id, state))
    }

    fn encode(id: TokenId, state: &QuantumState) -> Self {
        match state {
            QuantumState::Pair(p) => StateBlob {
                v: STATE_BLOB_VERSION,
                kind: "pair".into(),
                id: id.to_hex(),
                width: p.width(),
                x0: p.x0.to_hex(),
                x1: Some(p.x1.to_hex()),
                phase: Some(p.phase as u8),
            },
            QuantumState::Singleton(s) => StateBlob {
                v: STATE_BLOB_VERSION,
                kind: "singleton".into(),
                id: id.to_hex(),
                width: s.width(),
                x0: s.value.to_hex(),
                x1: None,
                phase: None,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state blob serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, KernelError> {
        serde_json::from_str(text).map_err(|e| KernelError::MalformedBlob(e.to_string()))
    }
}

/// Samples `d` uniformly from `{d : d·delta = phase}`.
///
/// Draws `d` uniformly and, if it lands in the wrong coset, flips the leftmost
/// coordinate where `delta` is set. That flip is a bijection between the two
/// cosets, so the result is uniform on the target one.
fn sample_affine(rng: &mut SimRng, delta: &BitString, phase: bool) -> BitString {
    let mut d = BitString::random(rng, delta.width());
    if d.dot(delta) != phase {
        let j = delta.first_one().expect("pair difference is nonzero");
        d.flip(j);
    }
    d
}

/// Live states, spent ledger and the randomness that drives measurements.
///
/// A registry belongs to one logical thread. Parallel trials each get their
/// own registry.
pub struct Registry {
    tag: u64,
    live: BTreeMap<TokenId, QuantumState>,
    spent: BTreeSet<TokenId>,
    rng: SimRng,
    sealed: bool,
    peeked: Cell<bool>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("tag", &self.tag)
            .field("live", &self.live.len())
            .field("spent", &self.spent.len())
            .finish()
    }
}

impl Registry {
    pub fn new(seed: u64) -> Self {
        Self::from_rng(rng::seeded(seed))
    }

    pub fn from_rng(mut rng: SimRng) -> Self {
        let tag = rng.gen();
        Self { tag, live: BTreeMap::new(), spent: BTreeSet::new(), rng, sealed: false, peeked: Cell::new(false) }
    }

    /// The registry's random stream, shared with the schemes so one seed
    /// fixes a whole run.
    pub fn rng(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    /// While sealed, [`inspect`](Self::inspect) and
    /// [`export_state`](Self::export_state) fail with [`KernelError::Sealed`];
    /// only measurements and unitaries reach the states.
    pub(crate) fn set_sealed(&mut self, sealed: bool) {
        self.sealed = sealed;
    }

    /// Whether anything tried to observe amplitudes while sealed; clears the flag.
    pub(crate) fn take_peek_attempt(&self) -> bool {
        self.peeked.replace(false)
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    fn fresh_id(&mut self) -> TokenId {
        loop {
            let id = TokenId(self.rng.gen());
            if !self.live.contains_key(&id) && !self.spent.contains(&id) {
                return id;
            }
        }
    }

    fn register(&mut self, state: QuantumState) -> TokenHandle {
        let id = self.fresh_id();
        self.live.insert(id, state);
        TokenHandle { id, registry: self.tag }
    }

    pub fn new_pair_state(&mut self, x0: BitString, x1: BitString, phase: bool) -> Result<TokenHandle, KernelError> {
        let pair = PhasedPairState::new(x0, x1, phase)?;
        Ok(self.register(QuantumState::Pair(pair)))
    }

    pub fn new_singleton(&mut self, value: BitString) -> TokenHandle {
        self.register(QuantumState::Singleton(SingletonState::new(value)))
    }

    fn check(&self, h: &TokenHandle) -> Result<(), KernelError> {
        if h.registry != self.tag {
            return Err(KernelError::ForeignHandle(h.id));
        }
        if !self.live.contains_key(&h.id) {
            return Err(KernelError::ConsumedHandle(h.id));
        }
        Ok(())
    }

    fn take(&mut self, h: &TokenHandle) -> Result<QuantumState, KernelError> {
        self.check(h)?;
        let state = self.live.remove(&h.id).expect("checked live");
        self.spent.insert(h.id);
        Ok(state)
    }

    fn state_mut(&mut self, h: &TokenHandle) -> Result<&mut QuantumState, KernelError> {
        self.check(h)?;
        Ok(self.live.get_mut(&h.id).expect("checked live"))
    }

    pub fn is_live(&self, h: &TokenHandle) -> bool {
        self.check(h).is_ok()
    }

    /// Read-only view of a live state, for tests and wallet tooling.
    pub fn inspect(&self, h: &TokenHandle) -> Result<&QuantumState, KernelError> {
        if self.sealed {
            self.peeked.set(true);
            return Err(KernelError::Sealed);
        }
        self.state(h)
    }

    fn state(&self, h: &TokenHandle) -> Result<&QuantumState, KernelError> {
        self.check(h)?;
        Ok(&self.live[&h.id])
    }

    pub fn width(&self, h: &TokenHandle) -> Result<usize, KernelError> {
        Ok(self.state(h)?.width())
    }

    /// Computational-basis measurement. Consumes the handle.
    pub fn measure_computational(&mut self, h: &TokenHandle) -> Result<BitString, KernelError> {
        let state = self.take(h)?;
        Ok(match state {
            QuantumState::Pair(p) => {
                if self.rng.gen::<bool>() {
                    p.x1
                } else {
                    p.x0
                }
            }
            QuantumState::Singleton(s) => s.value,
        })
    }

    /// Hadamard-basis measurement of every qubit. Consumes the handle.
    pub fn measure_hadamard(&mut self, h: &TokenHandle) -> Result<BitString, KernelError> {
        let state = self.take(h)?;
        Ok(match state {
            QuantumState::Pair(p) => sample_affine(&mut self.rng, &p.difference(), p.phase),
            QuantumState::Singleton(s) => BitString::random(&mut self.rng, s.width()),
        })
    }

    /// Measures qubit `j` alone in the Hadamard basis. The register loses that
    /// qubit; the handle stays live on the residual state.
    pub fn measure_hadamard_bit(&mut self, h: &TokenHandle, j: usize) -> Result<bool, KernelError> {
        let coin: bool = {
            self.check(h)?;
            self.rng.gen()
        };
        let state = self.state_mut(h)?;
        let width = state.width();
        if j >= width {
            return Err(KernelError::IndexOutOfRange { index: j, width });
        }
        let (outcome, next) = match &*state {
            QuantumState::Singleton(s) => (coin, QuantumState::Singleton(SingletonState::new(s.value.remove_bit(j)))),
            QuantumState::Pair(p) => {
                let delta = p.x0.get(j) != p.x1.get(j);
                let r0 = p.x0.remove_bit(j);
                let r1 = p.x1.remove_bit(j);
                if r0 == r1 {
                    // (|0> + (-1)^c |1>)|r> = |±>|r>: the outcome is the phase
                    (p.phase, QuantumState::Singleton(SingletonState::new(r0)))
                } else {
                    let phase = p.phase ^ (delta && coin);
                    (coin, QuantumState::Pair(PhasedPairState::new(r0, r1, phase)?))
                }
            }
        };
        *state = next;
        Ok(outcome)
    }

    /// Non-destructive measurement of a classical function of the register.
    ///
    /// If `g` agrees on the support the state is untouched; otherwise it
    /// collapses onto the branch whose value is returned.
    pub fn measure_function<T, G>(&mut self, h: &TokenHandle, g: G) -> Result<T, KernelError>
    where
        T: PartialEq,
        G: Fn(&BitString) -> T,
    {
        self.check(h)?;
        let coin: bool = self.rng.gen();
        let state = self.state_mut(h)?;
        match &*state {
            QuantumState::Singleton(s) => Ok(g(&s.value)),
            QuantumState::Pair(p) => {
                let v0 = g(&p.x0);
                let v1 = g(&p.x1);
                if v0 == v1 {
                    return Ok(v0);
                }
                let (value, kept) = if coin { (v1, p.x1.clone()) } else { (v0, p.x0.clone()) };
                *state = QuantumState::Singleton(SingletonState::new(kept));
                Ok(value)
            }
        }
    }

    /// Applies a classical bijection to every support string, keeping the phase.
    pub fn apply_bijection<F>(&mut self, h: &TokenHandle, forward: F) -> Result<(), KernelError>
    where
        F: Fn(&BitString) -> BitString,
    {
        let state = self.state_mut(h)?;
        let width = state.width();
        let map = |v: &BitString| {
            let out = forward(v);
            if out.width() == width {
                Ok(out)
            } else {
                Err(KernelError::NotBijective(width))
            }
        };
        let next = match &*state {
            QuantumState::Singleton(s) => QuantumState::Singleton(SingletonState::new(map(&s.value)?)),
            QuantumState::Pair(p) => {
                let a = map(&p.x0)?;
                let b = map(&p.x1)?;
                if a == b {
                    return Err(KernelError::NotBijective(width));
                }
                QuantumState::Pair(PhasedPairState::new(a, b, p.phase)?)
            }
        };
        *state = next;
        Ok(())
    }

    /// [`apply_bijection`](Self::apply_bijection) with validation: at widths up
    /// to [`EXHAUSTIVE_BIJECTION_WIDTH`] the forward map is checked on the whole
    /// domain, and `inverse` is checked against it wherever it is evaluated.
    pub fn apply_bijection_checked<F, I>(&mut self, h: &TokenHandle, forward: F, inverse: I) -> Result<(), KernelError>
    where
        F: Fn(&BitString) -> BitString,
        I: Fn(&BitString) -> BitString,
    {
        let width = self.width(h)?;
        if width <= EXHAUSTIVE_BIJECTION_WIDTH {
            let mut seen = BTreeSet::new();
            for v in BitString::all(width) {
                let image = forward(&v);
                if image.width() != width || inverse(&image) != v || !seen.insert(image) {
                    return Err(KernelError::NotBijective(width));
                }
            }
        } else {
            for v in self.state(h)?.support() {
                if inverse(&forward(v)) != *v {
                    return Err(KernelError::NotBijective(width));
                }
            }
        }
        self.apply_bijection(h, forward)
    }

    /// Serializes a live state with its id. The handle stays live.
    pub fn export_state(&self, h: &TokenHandle) -> Result<StateBlob, KernelError> {
        let state = self.inspect(h)?;
        Ok(StateBlob::encode(h.id, state))
    }

    /// Re-registers an exported state under its original id.
    pub fn import_state(&mut self, blob: &StateBlob) -> Result<TokenHandle, KernelError> {
        let (id, state) = blob.decode()?;
        if self.spent.contains(&id) {
            return Err(KernelError::SpentId(id));
        }
        if self.live.contains_key(&id) {
            return Err(KernelError::LiveId(id));
        }
        self.live.insert(id, state);
        Ok(TokenHandle { id, registry: self.tag })
    }

    /// Drops a live state without measuring it.
    pub fn discard(&mut self, h: &TokenHandle) -> Result<(), KernelError> {
        self.take(h).map(|_| ())
    }

    pub fn spent_ids(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.spent.iter().copied()
    }

    pub fn live_ids(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.live.keys().copied()
    }

    /// Loads an external spent ledger.
    pub fn extend_spent<I: IntoIterator<Item = TokenId>>(&mut self, ids: I) {
        self.spent.extend(ids);
    }
}

pub const EXHAUSTIVE_BIJECTION_WIDTH: usize = 16;
