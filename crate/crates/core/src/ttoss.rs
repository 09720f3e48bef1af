//! Two-tier one-shot signatures over exact trapdoor claw-free pairs.
//!
//! Two families are provided. `blum-integer` is the squaring pair
//! `x -> x^2`, `x -> 4x^2` on the Jacobi-one half of `Z_N^*` for a Blum
//! integer `N`; `kernel-ideal` is `x -> σ(x ⊕ b·s)` for a seeded random
//! permutation `σ` and shift `s`, evaluated through an oracle object.
//!
//! A signing key is one pair state `|0‖J(x0)> + |1‖J(x1)>` per instance,
//! where `(x0, x1)` is the claw over the published image `y`.

use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::qkernel::{KernelError, Registry, StateBlob, TokenHandle};
use crate::rng::SimRng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TtossError {
    #[error("bad primes: {0}")]
    BadPrimes(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("value is not in the image of the function")]
    InversionFailed,
    #[error("string is not an encoding of a domain element: {0}")]
    DecodeError(String),
    #[error("signing key already consumed")]
    ConsumedToken,
    #[error("signature shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("public parameters carry no state preparer")]
    NoPreparer,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Largest modulus, in bits, of a generated Blum integer.
pub const MAX_BLUM_BITS: u32 = 62;
/// Smallest modulus, in bits, of a generated Blum integer.
pub const MIN_BLUM_BITS: u32 = 16;
/// Largest width of a kernel-ideal family.
pub const MAX_KERNEL_IDEAL_WIDTH: usize = 20;

mod arith {
    pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
        ((a as u128 * b as u128) % m as u128) as u64
    }

    pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
        let mut acc = 1 % m;
        base %= m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(acc, base, m);
            }
            base = mul_mod(base, base, m);
            exp >>= 1;
        }
        acc
    }

    pub fn jacobi(a: u64, n: u64) -> i32 {
        debug_assert!(n % 2 == 1);
        let (mut a, mut n) = (a % n, n);
        let mut t = 1;
        while a != 0 {
            while a % 2 == 0 {
                a /= 2;
                if n % 8 == 3 || n % 8 == 5 {
                    t = -t;
                }
            }
            std::mem::swap(&mut a, &mut n);
            if a % 4 == 3 && n % 4 == 3 {
                t = -t;
            }
            a %= n;
        }
        if n == 1 {
            t
        } else {
            0
        }
    }

    pub fn is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        if n.is_multiple_of(2) {
            return n == 2;
        }
        let mut d = 3;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 2;
        }
        true
    }

    pub fn bit_length(n: u64) -> usize {
        (64 - n.leading_zeros()) as usize
    }
}

/// Public key of the Blum squaring pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BlumPublicRepr", into = "BlumPublicRepr")]
pub struct BlumPublicKey {
    modulus: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlumPublicRepr {
    #[serde(with = "crate::serde_hex::u64_hex")]
    modulus: u64,
    #[serde(with = "crate::serde_hex::u64_hex")]
    multiplier: u64,
}

impl TryFrom<BlumPublicRepr> for BlumPublicKey {
    type Error = String;
    fn try_from(r: BlumPublicRepr) -> Result<Self, String> {
        if r.multiplier != 4 {
            return Err(format!("multiplier must be 4, got {}", r.multiplier));
        }
        if r.modulus < 15 || r.modulus.is_multiple_of(2) || arith::bit_length(r.modulus) > MAX_BLUM_BITS as usize {
            return Err(format!("bad modulus {}", r.modulus));
        }
        Ok(BlumPublicKey { modulus: r.modulus })
    }
}

impl From<BlumPublicKey> for BlumPublicRepr {
    fn from(k: BlumPublicKey) -> Self {
        BlumPublicRepr { modulus: k.modulus, multiplier: 4 }
    }
}

impl BlumPublicKey {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn width(&self) -> usize {
        arith::bit_length(self.modulus)
    }

    /// Membership in the domain: a unit with Jacobi symbol +1 below `N/2`.
    pub fn contains(&self, x: u64) -> bool {
        let n = self.modulus;
        x > 0 && x < n.div_ceil(2) && x.gcd(&n) == 1 && arith::jacobi(x, n) == 1
    }

    pub fn eval(&self, b: bool, x: u64) -> u64 {
        let sq = arith::mul_mod(x, x, self.modulus);
        if b {
            arith::mul_mod(4, sq, self.modulus)
        } else {
            sq
        }
    }
}

/// The factorization of a Blum modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlumTrapdoor {
    #[serde(with = "crate::serde_hex::u64_hex")]
    p: u64,
    #[serde(with = "crate::serde_hex::u64_hex")]
    q: u64,
}

impl BlumTrapdoor {
    pub fn new(p: u64, q: u64) -> Result<Self, TtossError> {
        for r in [p, q] {
            if r % 4 != 3 {
                return Err(TtossError::BadPrimes(format!("{r} is not 3 mod 4")));
            }
            if !arith::is_prime(r) {
                return Err(TtossError::BadPrimes(format!("{r} is composite")));
            }
        }
        if p == q {
            return Err(TtossError::BadPrimes("p and q must differ".into()));
        }
        let n = p.checked_mul(q).filter(|n| arith::bit_length(*n) <= MAX_BLUM_BITS as usize);
        if n.is_none() {
            return Err(TtossError::BadPrimes(format!("modulus exceeds {MAX_BLUM_BITS} bits")));
        }
        Ok(Self { p, q })
    }

    /// Deterministic primes with `p ≡ 7`, `q ≡ 3 (mod 8)` so that 2 is a Jacobi non-residue.
    pub fn generate(rng: &mut SimRng, modulus_bits: u32) -> Result<Self, TtossError> {
        if !(MIN_BLUM_BITS..=MAX_BLUM_BITS).contains(&modulus_bits) {
            return Err(TtossError::BadParams(format!(
                "modulus bits {modulus_bits} not in {MIN_BLUM_BITS}..={MAX_BLUM_BITS}"
            )));
        }
        let p_bits = modulus_bits / 2;
        let q_bits = modulus_bits - p_bits;
        loop {
            let p = random_prime(rng, p_bits, 7);
            let q = random_prime(rng, q_bits, 3);
            if arith::bit_length(p * q) == modulus_bits as usize {
                return Self::new(p, q);
            }
        }
    }

    pub fn public(&self) -> BlumPublicKey {
        BlumPublicKey { modulus: self.p * self.q }
    }

    fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
        let r = arith::pow_mod(a, (p + 1) / 4, p);
        (arith::mul_mod(r, r, p) == a % p).then_some(r)
    }

    /// The unique domain element `x` with `eval(b, x) = y`.
    pub fn invert(&self, b: bool, y: u64) -> Result<u64, TtossError> {
        let pk = self.public();
        let n = pk.modulus;
        if y == 0 || y >= n || y.gcd(&n) != 1 {
            return Err(TtossError::InversionFailed);
        }
        let target = if b {
            let half = n.div_ceil(2);
            arith::mul_mod(y, arith::mul_mod(half, half, n), n)
        } else {
            y
        };
        let rp = Self::sqrt_mod_prime(target, self.p).ok_or(TtossError::InversionFailed)?;
        let rq = Self::sqrt_mod_prime(target, self.q).ok_or(TtossError::InversionFailed)?;
        let q_inv_p = arith::pow_mod(self.q % self.p, self.p - 2, self.p);
        let p_inv_q = arith::pow_mod(self.p % self.q, self.q - 2, self.q);
        for (sp, sq) in [(rp, rq), (rp, self.q - rq), (self.p - rp, rq), (self.p - rp, self.q - rq)] {
            let x = (arith::mul_mod(arith::mul_mod(sp, self.q, n), q_inv_p, n)
                + arith::mul_mod(arith::mul_mod(sq, self.p, n), p_inv_q, n))
                % n;
            if pk.contains(x) && pk.eval(b, x) == y {
                return Ok(x);
            }
        }
        Err(TtossError::InversionFailed)
    }
}

fn random_prime(rng: &mut SimRng, bits: u32, residue_mod_8: u64) -> u64 {
    loop {
        let c = rng.gen_range((1u64 << (bits - 1))..(1u64 << bits));
        let c = (c & !7) | residue_mod_8;
        if arith::bit_length(c) == bits as usize && arith::is_prime(c) {
            return c;
        }
    }
}

struct KernelTables {
    forward: Vec<u32>,
    backward: Vec<u32>,
    shift: u32,
}

/// Oracle for `f_b(x) = σ(x ⊕ b·s)` on `w`-bit strings.
///
/// It serializes as `(width, seed)`; `σ` and `s` are regenerated from the
/// seed on first use. Whoever holds the serialized form can recover `s`,
/// so protocol code passes the oracle around only through its methods.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "KernelIdealRepr", into = "KernelIdealRepr")]
pub struct KernelIdealOracle {
    width: usize,
    seed: u64,
    tables: Arc<OnceLock<KernelTables>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelIdealRepr {
    width: usize,
    #[serde(with = "crate::serde_hex::u64_hex")]
    seed: u64,
}

impl TryFrom<KernelIdealRepr> for KernelIdealOracle {
    type Error = TtossError;
    fn try_from(r: KernelIdealRepr) -> Result<Self, TtossError> {
        KernelIdealOracle::new(r.width, r.seed)
    }
}

impl From<KernelIdealOracle> for KernelIdealRepr {
    fn from(o: KernelIdealOracle) -> Self {
        KernelIdealRepr { width: o.width, seed: o.seed }
    }
}

impl PartialEq for KernelIdealOracle {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.seed == other.seed
    }
}

impl Eq for KernelIdealOracle {}

impl std::fmt::Debug for KernelIdealOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KernelIdealOracle(w={}, seed={:#x})", self.width, self.seed)
    }
}

impl KernelIdealOracle {
    pub fn new(width: usize, seed: u64) -> Result<Self, TtossError> {
        if width == 0 || width > MAX_KERNEL_IDEAL_WIDTH {
            return Err(TtossError::BadParams(format!("width {width} not in 1..={MAX_KERNEL_IDEAL_WIDTH}")));
        }
        Ok(Self { width, seed, tables: Arc::new(OnceLock::new()) })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn tables(&self) -> &KernelTables {
        self.tables.get_or_init(|| {
            let mut rng = crate::rng::seeded(self.seed);
            let size = 1u32 << self.width;
            let mut forward: Vec<u32> = (0..size).collect();
            forward.shuffle(&mut rng);
            let mut backward = vec![0u32; size as usize];
            for (x, &y) in forward.iter().enumerate() {
                backward[y as usize] = x as u32;
            }
            let shift = rng.gen_range(1..size);
            KernelTables { forward, backward, shift }
        })
    }

    pub fn eval(&self, b: bool, x: u32) -> u32 {
        let t = self.tables();
        t.forward[(x ^ if b { t.shift } else { 0 }) as usize]
    }

    pub fn invert(&self, b: bool, y: u32) -> u32 {
        let t = self.tables();
        t.backward[y as usize] ^ if b { t.shift } else { 0 }
    }

    /// The secret shift; the claw of `x` is `x ⊕ s`.
    pub fn shift(&self) -> u32 {
        self.tables().shift
    }
}

/// Parameters for generating one claw-free instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyParams {
    BlumInteger { modulus_bits: u32 },
    BlumPrimes { p: u64, q: u64 },
    KernelIdeal { width: usize },
}

impl FamilyParams {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilyParams::BlumInteger { .. } | FamilyParams::BlumPrimes { .. } => "blum-integer",
            FamilyParams::KernelIdeal { .. } => "kernel-ideal",
        }
    }
}

/// Public half of a claw-free instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ClawFreePublicKey {
    BlumInteger(BlumPublicKey),
    KernelIdeal(KernelIdealOracle),
}

/// Secret half of a claw-free instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ClawTrapdoor {
    BlumInteger(BlumTrapdoor),
    KernelIdeal(KernelIdealOracle),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClawFreeFamily {
    pub public: ClawFreePublicKey,
    pub trapdoor: ClawTrapdoor,
}

pub fn clawfree_family(rng: &mut SimRng, params: &FamilyParams) -> Result<ClawFreeFamily, TtossError> {
    match *params {
        FamilyParams::BlumInteger { modulus_bits } => {
            let td = BlumTrapdoor::generate(rng, modulus_bits)?;
            Ok(ClawFreeFamily {
                public: ClawFreePublicKey::BlumInteger(td.public()),
                trapdoor: ClawTrapdoor::BlumInteger(td),
            })
        }
        FamilyParams::BlumPrimes { p, q } => {
            let td = BlumTrapdoor::new(p, q)?;
            Ok(ClawFreeFamily {
                public: ClawFreePublicKey::BlumInteger(td.public()),
                trapdoor: ClawTrapdoor::BlumInteger(td),
            })
        }
        FamilyParams::KernelIdeal { width } => {
            let oracle = KernelIdealOracle::new(width, rng.gen())?;
            Ok(ClawFreeFamily {
                public: ClawFreePublicKey::KernelIdeal(oracle.clone()),
                trapdoor: ClawTrapdoor::KernelIdeal(oracle),
            })
        }
    }
}

impl ClawFreeFamily {
    pub fn invert(&self, b: bool, y: &BitString) -> Result<BitString, TtossError> {
        self.trapdoor.invert(b, y)
    }
}

impl ClawFreePublicKey {
    pub fn tag(&self) -> &'static str {
        match self {
            ClawFreePublicKey::BlumInteger(_) => "blum-integer",
            ClawFreePublicKey::KernelIdeal(_) => "kernel-ideal",
        }
    }

    /// Width `w` of the domain encoding `J`.
    pub fn domain_width(&self) -> usize {
        match self {
            ClawFreePublicKey::BlumInteger(k) => k.width(),
            ClawFreePublicKey::KernelIdeal(o) => o.width(),
        }
    }

    pub fn image_width(&self) -> usize {
        self.domain_width()
    }

    /// Whether `x` lies in the range of `J`.
    pub fn contains(&self, x: &BitString) -> bool {
        if x.width() != self.domain_width() {
            return false;
        }
        match self {
            ClawFreePublicKey::BlumInteger(k) => x.to_u64().is_some_and(|v| k.contains(v)),
            ClawFreePublicKey::KernelIdeal(_) => true,
        }
    }

    pub fn encode(&self, x: u64) -> Result<BitString, TtossError> {
        let s = BitString::from_u64(x, self.domain_width());
        if s.to_u64() != Some(x) || !self.contains(&s) {
            return Err(TtossError::DecodeError(format!("{x} is not a domain element")));
        }
        Ok(s)
    }

    pub fn decode(&self, x: &BitString) -> Result<u64, TtossError> {
        if !self.contains(x) {
            return Err(TtossError::DecodeError(x.to_hex()));
        }
        Ok(x.to_u64().expect("domain fits in 64 bits"))
    }

    pub fn eval(&self, b: bool, x: &BitString) -> Result<BitString, TtossError> {
        let v = self.decode(x)?;
        let y = match self {
            ClawFreePublicKey::BlumInteger(k) => k.eval(b, v),
            ClawFreePublicKey::KernelIdeal(o) => o.eval(b, v as u32) as u64,
        };
        Ok(BitString::from_u64(y, self.image_width()))
    }

    /// Public check that `y = f_b(x)`.
    pub fn check(&self, b: bool, x: &BitString, y: &BitString) -> bool {
        matches!(self.eval(b, x), Ok(ref fy) if fy == y)
    }
}

impl ClawTrapdoor {
    pub fn public(&self) -> ClawFreePublicKey {
        match self {
            ClawTrapdoor::BlumInteger(td) => ClawFreePublicKey::BlumInteger(td.public()),
            ClawTrapdoor::KernelIdeal(o) => ClawFreePublicKey::KernelIdeal(o.clone()),
        }
    }

    pub fn invert(&self, b: bool, y: &BitString) -> Result<BitString, TtossError> {
        let pk = self.public();
        if y.width() != pk.image_width() {
            return Err(TtossError::InversionFailed);
        }
        let v = y.to_u64().ok_or(TtossError::InversionFailed)?;
        let x = match self {
            ClawTrapdoor::BlumInteger(td) => td.invert(b, v)?,
            ClawTrapdoor::KernelIdeal(o) => o.invert(b, v as u32) as u64,
        };
        pk.encode(x)
    }

    /// A uniformly random claw `(x0, x1, y)`.
    fn sample_claw(&self, rng: &mut SimRng) -> (BitString, BitString, BitString) {
        let pk = self.public();
        let x0 = match self {
            ClawTrapdoor::BlumInteger(td) => {
                let k = td.public();
                loop {
                    let x = rng.gen_range(1..k.modulus.div_ceil(2));
                    if k.contains(x) {
                        break x;
                    }
                }
            }
            ClawTrapdoor::KernelIdeal(o) => rng.gen_range(0..(1u64 << o.width())),
        };
        let x0 = pk.encode(x0).expect("sampled from the domain");
        let y = pk.eval(false, &x0).expect("domain element");
        let x1 = self.invert(true, &y).expect("every image point has a claw");
        (x0, x1, y)
    }
}

/// Public parameters: one claw-free public key per instance.
///
/// Key generation needs to prepare claw superpositions, which a classical
/// simulator can only do with the trapdoors. The preparer is attached in
/// memory by [`oss_setup`] or [`OssPublicParams::attach_preparer`] and is
/// never serialized.
#[derive(Clone, Serialize, Deserialize)]
pub struct OssPublicParams {
    pub families: Vec<ClawFreePublicKey>,
    #[serde(skip)]
    preparer: Option<Arc<Vec<ClawTrapdoor>>>,
}

impl std::fmt::Debug for OssPublicParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OssPublicParams")
            .field("families", &self.families)
            .field("preparer", &self.preparer.is_some())
            .finish()
    }
}

impl PartialEq for OssPublicParams {
    fn eq(&self, other: &Self) -> bool {
        self.families == other.families
    }
}

impl Eq for OssPublicParams {}

impl OssPublicParams {
    pub fn new(families: Vec<ClawFreePublicKey>) -> Self {
        Self { families, preparer: None }
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub fn has_preparer(&self) -> bool {
        self.preparer.is_some()
    }

    pub fn attach_preparer(&mut self, sk: &OssSecretKey) -> Result<(), TtossError> {
        let matches = sk.trapdoors.len() == self.families.len()
            && sk.trapdoors.iter().zip(&self.families).all(|(td, pk)| &td.public() == pk);
        if !matches {
            return Err(TtossError::BadParams("secret key does not match public parameters".into()));
        }
        self.preparer = Some(Arc::new(sk.trapdoors.clone()));
        Ok(())
    }

    /// The same parameters without the preparer.
    pub fn public_view(&self) -> Self {
        Self::new(self.families.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OssSecretKey {
    pub trapdoors: Vec<ClawTrapdoor>,
}

pub fn oss_setup(
    rng: &mut SimRng,
    n: usize,
    params: &FamilyParams,
) -> Result<(OssPublicParams, OssSecretKey), TtossError> {
    if n == 0 {
        return Err(TtossError::BadParams("n must be at least 1".into()));
    }
    let mut families = Vec::with_capacity(n);
    let mut trapdoors = Vec::with_capacity(n);
    for _ in 0..n {
        let fam = clawfree_family(rng, params)?;
        families.push(fam.public);
        trapdoors.push(fam.trapdoor);
    }
    let sk = OssSecretKey { trapdoors };
    let mut pp = OssPublicParams::new(families);
    pp.attach_preparer(&sk)?;
    Ok((pp, sk))
}

#[derive(Debug)]
pub struct OssSigningKey {
    pub handles: Vec<TokenHandle>,
}

impl OssSigningKey {
    pub fn is_live(&self, reg: &Registry) -> bool {
        self.handles.iter().all(|h| reg.is_live(h))
    }

    pub fn export(&self, reg: &Registry) -> Result<Vec<StateBlob>, TtossError> {
        self.handles.iter().map(|h| reg.export_state(h).map_err(TtossError::from)).collect()
    }

    pub fn import(reg: &mut Registry, blobs: &[StateBlob]) -> Result<Self, TtossError> {
        let handles = blobs.iter().map(|b| reg.import_state(b)).collect::<Result<_, _>>()?;
        Ok(Self { handles })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OssVerificationKey {
    pub images: Vec<BitString>,
}

impl OssVerificationKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = (self.images.len() as u64).to_be_bytes().to_vec();
        for y in &self.images {
            out.extend((y.width() as u64).to_be_bytes());
            out.extend(y.to_bytes());
        }
        out
    }
}

/// One entry of a signature: `(b, x)` on 0 or `(c, d)` on 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OssSigEntry {
    pub bit: bool,
    pub value: BitString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OssSignature {
    pub message: bool,
    pub entries: Vec<OssSigEntry>,
}

pub fn oss_keygen(reg: &mut Registry, pp: &OssPublicParams) -> Result<(OssSigningKey, OssVerificationKey), TtossError> {
    let preparer = pp.preparer.clone().ok_or(TtossError::NoPreparer)?;
    let mut handles = Vec::with_capacity(pp.len());
    let mut images = Vec::with_capacity(pp.len());
    for td in preparer.iter() {
        let (x0, x1, y) = td.sample_claw(reg.rng());
        let h = reg.new_pair_state(x0.with_prefix_bit(false), x1.with_prefix_bit(true), false)?;
        handles.push(h);
        images.push(y);
    }
    Ok((OssSigningKey { handles }, OssVerificationKey { images }))
}

pub fn oss_sign(
    reg: &mut Registry,
    pp: &OssPublicParams,
    sigk: &OssSigningKey,
    message: bool,
) -> Result<OssSignature, TtossError> {
    if !sigk.is_live(reg) {
        return Err(TtossError::ConsumedToken);
    }
    if sigk.handles.len() != pp.len() {
        return Err(TtossError::ShapeMismatch("signing key and parameters differ in length".into()));
    }
    let mut entries = Vec::with_capacity(pp.len());
    for (h, pk) in sigk.handles.iter().zip(&pp.families) {
        let z = if message { reg.measure_hadamard(h)? } else { reg.measure_computational(h)? };
        let (bit, value) = z.split_first().ok_or_else(|| TtossError::DecodeError("empty measurement".into()))?;
        if !message {
            pk.decode(&value)?;
        }
        entries.push(OssSigEntry { bit, value });
    }
    Ok(OssSignature { message, entries })
}

fn check_shape(
    pp: &OssPublicParams,
    vk: &OssVerificationKey,
    sig: &OssSignature,
    message: bool,
) -> Result<(), TtossError> {
    if sig.message != message {
        return Err(TtossError::ShapeMismatch(format!("expected a signature on {}", message as u8)));
    }
    let n = pp.len();
    if vk.images.len() != n || sig.entries.len() != n {
        return Err(TtossError::ShapeMismatch(format!(
            "expected {n} entries, got vk {} and signature {}",
            vk.images.len(),
            sig.entries.len()
        )));
    }
    for (e, pk) in sig.entries.iter().zip(&pp.families) {
        if e.value.width() != pk.domain_width() {
            return Err(TtossError::ShapeMismatch(format!("entries must be {} bits", pk.domain_width())));
        }
    }
    Ok(())
}

/// Public verification of a signature on 0.
pub fn oss_ver0(pp: &OssPublicParams, vk: &OssVerificationKey, sig: &OssSignature) -> Result<bool, TtossError> {
    check_shape(pp, vk, sig, false)?;
    Ok(pp.families.iter().zip(&sig.entries).zip(&vk.images).all(|((pk, e), y)| pk.check(e.bit, &e.value, y)))
}

/// Trapdoor verification of a signature on 1.
pub fn oss_ver1(
    pp: &OssPublicParams,
    sk: &OssSecretKey,
    vk: &OssVerificationKey,
    sig: &OssSignature,
) -> Result<bool, TtossError> {
    check_shape(pp, vk, sig, true)?;
    if sk.trapdoors.len() != pp.len() {
        return Err(TtossError::ShapeMismatch("trapdoor count differs from parameters".into()));
    }
    for ((td, e), y) in sk.trapdoors.iter().zip(&sig.entries).zip(&vk.images) {
        let x0 = td.invert(false, y)?;
        let x1 = td.invert(true, y)?;
        if e.value.dot(&x0.xor(&x1)) != e.bit {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::QuantumState;
    use crate::rng::seeded;

    fn blum77() -> ClawFreeFamily {
        clawfree_family(&mut seeded(0), &FamilyParams::BlumPrimes { p: 7, q: 11 }).unwrap()
    }

    #[test]
    fn blum_77_claw() {
        let fam = blum77();
        let pk = &fam.public;
        let four = pk.encode(4).unwrap();
        let sixteen = BitString::from_u64(16, 7);
        assert_eq!(pk.eval(false, &four).unwrap(), sixteen);
        assert_eq!(fam.invert(true, &sixteen).unwrap().to_u64(), Some(9));
        assert_eq!(pk.eval(true, &pk.encode(9).unwrap()).unwrap(), sixteen);
        assert!(pk.check(false, &four, &sixteen));
        assert!(!pk.check(false, &BitString::from_u64(5, 7), &sixteen));
    }

    #[test]
    fn blum_rejects_bad_primes() {
        let mut r = seeded(0);
        for (p, q) in [(5, 11), (7, 13), (15, 7), (7, 7)] {
            assert!(matches!(
                clawfree_family(&mut r, &FamilyParams::BlumPrimes { p, q }),
                Err(TtossError::BadPrimes(_))
            ));
        }
        assert!(matches!(
            clawfree_family(&mut r, &FamilyParams::BlumInteger { modulus_bits: 8 }),
            Err(TtossError::BadParams(_))
        ));
    }

    #[test]
    fn generated_moduli_are_blum() {
        let mut r = seeded(3);
        for bits in [16, 24, 40, 62] {
            let td = BlumTrapdoor::generate(&mut r, bits).unwrap();
            assert_eq!(td.public().width(), bits as usize);
            assert_eq!(arith::jacobi(2, td.public().modulus()), -1);
        }
    }

    #[test]
    fn kernel_ideal_claw_is_shift() {
        let fam = clawfree_family(&mut seeded(9), &FamilyParams::KernelIdeal { width: 4 }).unwrap();
        let ClawTrapdoor::KernelIdeal(o) = &fam.trapdoor else { panic!() };
        let s = o.shift();
        assert_ne!(s, 0);
        for x in 0..16u32 {
            assert_eq!(o.eval(false, x), o.eval(true, x ^ s));
        }
    }

    #[test]
    fn jacobi_matches_euler_on_primes() {
        for p in [7u64, 11, 13, 101, 1009] {
            for a in 1..p {
                let e = arith::pow_mod(a, (p - 1) / 2, p);
                let expected = if e == 1 { 1 } else { -1 };
                assert_eq!(arith::jacobi(a, p), expected);
            }
        }
    }

    #[test]
    fn pp_has_no_trapdoor_fields() {
        let mut r = seeded(1);
        let (pp, sk) = oss_setup(&mut r, 2, &FamilyParams::BlumInteger { modulus_bits: 24 }).unwrap();
        let json = serde_json::to_value(&pp).unwrap();
        let text = json.to_string();
        assert!(!text.contains("\"p\"") && !text.contains("\"q\""));
        let back: OssPublicParams = serde_json::from_value(json).unwrap();
        assert_eq!(back, pp);
        assert!(!back.has_preparer());
        let td_json = serde_json::to_string(&sk).unwrap();
        assert_eq!(serde_json::from_str::<OssSecretKey>(&td_json).unwrap(), sk);
    }

    #[test]
    fn keygen_without_preparer_fails() {
        let mut r = seeded(1);
        let (pp, _) = oss_setup(&mut r, 1, &FamilyParams::KernelIdeal { width: 6 }).unwrap();
        let mut reg = Registry::new(0);
        assert!(matches!(oss_keygen(&mut reg, &pp.public_view()), Err(TtossError::NoPreparer)));
    }

    #[test]
    fn keygen_state_shape_at_77() {
        let fam = blum77();
        let sk = OssSecretKey { trapdoors: vec![fam.trapdoor.clone()] };
        let mut pp = OssPublicParams::new(vec![fam.public.clone()]);
        pp.attach_preparer(&sk).unwrap();
        let mut reg = Registry::new(5);
        for _ in 0..40 {
            let (sigk, vk) = oss_keygen(&mut reg, &pp).unwrap();
            let y = &vk.images[0];
            let x0 = fam.invert(false, y).unwrap();
            let x1 = fam.invert(true, y).unwrap();
            assert!(fam.public.check(false, &x0, y));
            let QuantumState::Pair(st) = reg.inspect(&sigk.handles[0]).unwrap() else { panic!() };
            assert_eq!(st.x0(), &x0.with_prefix_bit(false));
            assert_eq!(st.x1(), &x1.with_prefix_bit(true));
            assert!(!st.phase());
            if y.to_u64() == Some(16) {
                assert_eq!((x0.to_u64(), x1.to_u64()), (Some(4), Some(9)));
            }
        }
    }

    #[test]
    fn honest_sign_verify_both_families() {
        for params in [FamilyParams::BlumInteger { modulus_bits: 32 }, FamilyParams::KernelIdeal { width: 10 }] {
            let mut r = seeded(4);
            let (pp, sk) = oss_setup(&mut r, 4, &params).unwrap();
            let mut reg = Registry::new(8);
            let (k0, vk0) = oss_keygen(&mut reg, &pp).unwrap();
            let s0 = oss_sign(&mut reg, &pp, &k0, false).unwrap();
            assert!(oss_ver0(&pp, &vk0, &s0).unwrap());
            assert_eq!(oss_sign(&mut reg, &pp, &k0, true), Err(TtossError::ConsumedToken));

            let (k1, vk1) = oss_keygen(&mut reg, &pp).unwrap();
            let s1 = oss_sign(&mut reg, &pp, &k1, true).unwrap();
            assert!(oss_ver1(&pp, &sk, &vk1, &s1).unwrap());
            let mut flipped = s1.clone();
            flipped.entries[2].bit ^= true;
            assert!(!oss_ver1(&pp, &sk, &vk1, &flipped).unwrap());
            assert!(matches!(oss_ver0(&pp, &vk1, &s1), Err(TtossError::ShapeMismatch(_))));
        }
    }

    #[test]
    fn tampered_signature_on_zero_fails() {
        let fam = blum77();
        let sk = OssSecretKey { trapdoors: vec![fam.trapdoor.clone()] };
        let mut pp = OssPublicParams::new(vec![fam.public.clone()]);
        pp.attach_preparer(&sk).unwrap();
        let mut reg = Registry::new(6);
        let (k, vk) = oss_keygen(&mut reg, &pp).unwrap();
        let sig = oss_sign(&mut reg, &pp, &k, false).unwrap();
        assert!(oss_ver0(&pp, &vk, &sig).unwrap());
        let x = sig.entries[0].value.to_u64().unwrap();
        let mut bumped = sig.clone();
        bumped.entries[0].value = BitString::from_u64(x + 1, 7);
        assert!(!oss_ver0(&pp, &vk, &bumped).unwrap());
        let mut wrong_bit = sig.clone();
        wrong_bit.entries[0].bit ^= true;
        assert!(!oss_ver0(&pp, &vk, &wrong_bit).unwrap());
    }

    #[test]
    fn adversarial_image_fails_inversion() {
        let fam = blum77();
        let sk = OssSecretKey { trapdoors: vec![fam.trapdoor.clone()] };
        let pp = OssPublicParams::new(vec![fam.public.clone()]);
        // 2 has Jacobi -1 mod 77, so it is not a square
        let vk = OssVerificationKey { images: vec![BitString::from_u64(2, 7)] };
        let sig = OssSignature { message: true, entries: vec![OssSigEntry { bit: false, value: BitString::zeros(7) }] };
        assert_eq!(oss_ver1(&pp, &sk, &vk, &sig), Err(TtossError::InversionFailed));
    }
}
