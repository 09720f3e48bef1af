//! Group actions, swap-trapdoor function pairs, two-tier quantum lightning,
//! and signatures whose signing keys are revoked by returning quantum states.
//!
//! The action is `a ⋆ s = s·h^a mod p` for `h` of prime order `q` in
//! `Z_p^*`, which is free and transitive on each coset `s<h>`. Group
//! elements are encoded as fixed-width integers of `bitlen(q)` bits.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::qkernel::{KernelError, Registry, StateBlob, TokenHandle};
use crate::rng::SimRng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupLightError {
    #[error("bad group order: {0}")]
    BadOrder(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("state already consumed")]
    ConsumedToken,
    #[error("one-time key already used")]
    AlreadyUsed,
    #[error(transparent)]
    Kernel(KernelError),
}

impl From<KernelError> for GroupLightError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::ConsumedHandle(_) => GroupLightError::ConsumedToken,
            other => GroupLightError::Kernel(other),
        }
    }
}

const SMALL_PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin with the first twelve primes as bases; exact below 3.3e24.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &sp in &SMALL_PRIMES {
        let sp = BigUint::from(sp);
        if n == &sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for &a in &SMALL_PRIMES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// `a ⋆ s = s·h^a mod p` with `h` of order `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupActionRepr")]
pub struct GroupAction {
    #[serde(with = "crate::serde_hex::biguint")]
    p: BigUint,
    #[serde(with = "crate::serde_hex::biguint")]
    q: BigUint,
    #[serde(with = "crate::serde_hex::biguint")]
    h: BigUint,
}

#[derive(Deserialize)]
struct GroupActionRepr {
    #[serde(with = "crate::serde_hex::biguint")]
    p: BigUint,
    #[serde(with = "crate::serde_hex::biguint")]
    q: BigUint,
    #[serde(with = "crate::serde_hex::biguint")]
    h: BigUint,
}

impl TryFrom<GroupActionRepr> for GroupAction {
    type Error = GroupLightError;
    fn try_from(r: GroupActionRepr) -> Result<Self, GroupLightError> {
        GroupAction::new(r.p, r.q, r.h)
    }
}

impl GroupAction {
    pub fn new(p: BigUint, q: BigUint, h: BigUint) -> Result<Self, GroupLightError> {
        if !is_probable_prime(&p) || !is_probable_prime(&q) {
            return Err(GroupLightError::BadOrder("p and q must be prime".into()));
        }
        if !((&p - 1u32) % &q).is_zero() {
            return Err(GroupLightError::BadOrder("q must divide p - 1".into()));
        }
        let h = h % &p;
        if h.is_one() || h.is_zero() || !h.modpow(&q, &p).is_one() {
            return Err(GroupLightError::BadOrder("h must have order q".into()));
        }
        Ok(Self { p, q, h })
    }

    /// The instance `p = 11, q = 5, h = 3`.
    pub fn toy() -> Self {
        Self::new(11u32.into(), 5u32.into(), 3u32.into()).expect("valid toy instance")
    }

    /// A random instance with a `q_bits`-bit order inside a `p_bits`-bit field.
    pub fn generate(rng: &mut SimRng, p_bits: u64, q_bits: u64) -> Result<Self, GroupLightError> {
        if q_bits < 3 || p_bits < q_bits + 2 || p_bits > 4096 {
            return Err(GroupLightError::BadParams(format!("unsupported sizes p={p_bits}, q={q_bits}")));
        }
        let q = loop {
            let mut c = rng.gen_biguint(q_bits);
            c.set_bit(q_bits - 1, true);
            c.set_bit(0, true);
            if is_probable_prime(&c) {
                break c;
            }
        };
        let k_bits = p_bits - q_bits;
        let p = loop {
            let mut k = rng.gen_biguint(k_bits);
            k.set_bit(k_bits - 1, true);
            k.set_bit(0, false);
            let c = &k * &q + 1u32;
            if c.bits() == p_bits && is_probable_prime(&c) {
                break c;
            }
        };
        let cofactor = (&p - 1u32) / &q;
        let h = loop {
            let x = rng.gen_biguint_range(&BigUint::from(2u32), &p);
            let h = x.modpow(&cofactor, &p);
            if !h.is_one() {
                break h;
            }
        };
        Self::new(p, q, h)
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn order(&self) -> &BigUint {
        &self.q
    }

    pub fn generator(&self) -> &BigUint {
        &self.h
    }

    /// Width of the group-element encoding.
    pub fn width(&self) -> usize {
        self.q.bits() as usize
    }

    pub fn act(&self, a: &BigUint, s: &BigUint) -> BigUint {
        (s * self.h.modpow(a, &self.p)) % &self.p
    }

    /// The orbit `{a ⋆ s : a ∈ Z_q}` in order of `a`. Toy sizes only.
    pub fn orbit(&self, s: &BigUint) -> Vec<BigUint> {
        let mut out = Vec::new();
        let mut a = BigUint::zero();
        while a < self.q {
            out.push(self.act(&a, s));
            a += 1u32;
        }
        out
    }

    pub fn sample_group(&self, rng: &mut SimRng) -> BigUint {
        rng.gen_biguint_below(&self.q)
    }

    pub fn sample_set(&self, rng: &mut SimRng) -> BigUint {
        rng.gen_biguint_range(&BigUint::one(), &self.p)
    }

    pub fn encode(&self, a: &BigUint) -> BitString {
        BitString::from_biguint(a, self.width())
    }

    /// Inverse of [`encode`](Self::encode); `None` outside `Z_q`.
    pub fn decode(&self, x: &BitString) -> Option<BigUint> {
        let v = x.to_biguint();
        (x.width() == self.width() && v < self.q).then_some(v)
    }

    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.q
    }

    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + &self.q - (b % &self.q)) % &self.q
    }
}

/// Public half of a swap-trapdoor pair: `f_b(h) = h ⋆ s_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StfPublic {
    #[serde(flatten)]
    pub action: GroupAction,
    #[serde(with = "crate::serde_hex::biguint")]
    pub s0: BigUint,
    #[serde(with = "crate::serde_hex::biguint")]
    pub s1: BigUint,
}

/// The group element `g` with `s_1 = g ⋆ s_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StfTrapdoor {
    #[serde(with = "crate::serde_hex::biguint")]
    pub g: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stf {
    pub public: StfPublic,
    pub trapdoor: StfTrapdoor,
}

impl Stf {
    pub fn setup(rng: &mut SimRng, action: GroupAction) -> Self {
        let s0 = action.sample_set(rng);
        let g = rng.gen_biguint_range(&BigUint::one(), action.order());
        Self::from_parts(action, s0, g)
    }

    pub fn from_parts(action: GroupAction, s0: BigUint, g: BigUint) -> Self {
        let s1 = action.act(&g, &s0);
        Self { public: StfPublic { action, s0, s1 }, trapdoor: StfTrapdoor { g } }
    }

    /// `h - g` for `b = 0`, `h + g` for `b = 1`.
    pub fn swap(&self, b: bool, h: &BigUint) -> BigUint {
        let a = &self.public.action;
        if b {
            a.add(h, &self.trapdoor.g)
        } else {
            a.sub(h, &self.trapdoor.g)
        }
    }
}

impl StfPublic {
    pub fn eval(&self, b: bool, h: &BigUint) -> BigUint {
        self.action.act(h, if b { &self.s1 } else { &self.s0 })
    }

    /// `f_b` on an encoded `b ‖ enc(h)`; `None` if the suffix is not in `Z_q`.
    fn eval_encoded(&self, x: &BitString) -> Option<BigUint> {
        let (b, rest) = x.split_first()?;
        Some(self.eval(b, &self.action.decode(&rest)?))
    }
}

// ---- two-tier quantum lightning ----

#[derive(Debug)]
pub struct LightningState {
    pub handles: Vec<TokenHandle>,
}

impl LightningState {
    pub fn is_live(&self, reg: &Registry) -> bool {
        self.handles.iter().all(|h| reg.is_live(h))
    }

    pub fn export(&self, reg: &Registry) -> Result<Vec<StateBlob>, GroupLightError> {
        self.handles.iter().map(|h| reg.export_state(h).map_err(GroupLightError::from)).collect()
    }

    pub fn import(reg: &mut Registry, blobs: &[StateBlob]) -> Result<Self, GroupLightError> {
        let handles = blobs.iter().map(|b| reg.import_state(b)).collect::<Result<_, _>>()?;
        Ok(Self { handles })
    }
}

/// The serial number `{y_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerialNumber {
    #[serde(with = "biguint_vec")]
    pub values: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightningCertEntry {
    pub bit: bool,
    #[serde(with = "crate::serde_hex::biguint")]
    pub value: BigUint,
}

/// Deletion certificate `{(b_i, z_i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightningCert {
    pub entries: Vec<LightningCertEntry>,
}

mod biguint_vec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_str_radix(16)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|t| {
                BigUint::parse_bytes(t.as_bytes(), 16).ok_or_else(|| serde::de::Error::custom(format!("bad hex {t:?}")))
            })
            .collect()
    }
}

/// Mints `n` lightning states and their serial number.
pub fn ql_stategen(reg: &mut Registry, sk: &Stf, n: usize) -> Result<(LightningState, SerialNumber), GroupLightError> {
    if n == 0 {
        return Err(GroupLightError::BadParams("n must be at least 1".into()));
    }
    let action = &sk.public.action;
    let mut handles = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let h0 = action.sample_group(reg.rng());
        let y = sk.public.eval(false, &h0);
        let h1 = sk.swap(false, &h0);
        let handle = reg.new_pair_state(
            action.encode(&h0).with_prefix_bit(false),
            action.encode(&h1).with_prefix_bit(true),
            false,
        )?;
        handles.push(handle);
        values.push(y);
    }
    Ok((LightningState { handles }, SerialNumber { values }))
}

/// Measures every state computationally.
pub fn ql_del(reg: &mut Registry, state: &LightningState) -> Result<LightningCert, GroupLightError> {
    if !state.is_live(reg) {
        return Err(GroupLightError::ConsumedToken);
    }
    let mut entries = Vec::with_capacity(state.handles.len());
    for h in &state.handles {
        let z = reg.measure_computational(h)?;
        let (bit, rest) = z.split_first().ok_or_else(|| GroupLightError::BadParams("empty register".into()))?;
        entries.push(LightningCertEntry { bit, value: rest.to_biguint() });
    }
    Ok(LightningCert { entries })
}

/// Public check that `f_{b_i}(z_i) = y_i` for all `i`.
pub fn ql_semiver(pk: &StfPublic, snum: &SerialNumber, cert: &LightningCert) -> bool {
    cert.entries.len() == snum.values.len()
        && cert
            .entries
            .iter()
            .zip(&snum.values)
            .all(|(e, y)| &e.value < pk.action.order() && &pk.eval(e.bit, &e.value) == y)
}

/// Full verification with the trapdoor: checks the image, swaps the `1`
/// branch onto the `0` branch, and requires the first qubit to read `+`.
pub fn ql_fullver(
    reg: &mut Registry,
    sk: &Stf,
    snum: &SerialNumber,
    state: &LightningState,
) -> Result<bool, GroupLightError> {
    if !state.is_live(reg) {
        return Err(GroupLightError::ConsumedToken);
    }
    if state.handles.len() != snum.values.len() {
        return Ok(false);
    }
    let action = &sk.public.action;
    let width = action.width() + 1;
    let swap_suffix = |x: &BitString, b: bool| -> BitString {
        match x.split_first() {
            Some((true, rest)) => match action.decode(&rest) {
                Some(v) => action.encode(&sk.swap(b, &v)).with_prefix_bit(true),
                None => x.clone(),
            },
            _ => x.clone(),
        }
    };
    for (h, y) in state.handles.iter().zip(&snum.values) {
        if reg.width(h)? != width {
            return Ok(false);
        }
        if reg.measure_function(h, |x| sk.public.eval_encoded(x))?.as_ref() != Some(y) {
            return Ok(false);
        }
        reg.apply_bijection_checked(h, |x| swap_suffix(x, true), |x| swap_suffix(x, false))?;
        if reg.measure_hadamard_bit(h, 0)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- signatures with quantum-revocable signing keys ----

#[derive(Debug)]
pub enum QrkSigningKey {
    Fresh { halves: [LightningState; 2] },
    Used { remaining: bool, state: LightningState },
}

impl QrkSigningKey {
    fn states(&self) -> Vec<&LightningState> {
        match self {
            QrkSigningKey::Fresh { halves } => halves.iter().collect(),
            QrkSigningKey::Used { state, .. } => vec![state],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QrkVerificationKey {
    pub pk: StfPublic,
    pub serials: [SerialNumber; 2],
}

pub fn qrk_setup(rng: &mut SimRng, action: GroupAction) -> Stf {
    Stf::setup(rng, action)
}

pub fn qrk_keygen(
    reg: &mut Registry,
    sk: &Stf,
    n: usize,
) -> Result<(QrkSigningKey, QrkVerificationKey), GroupLightError> {
    let (s0, y0) = ql_stategen(reg, sk, n)?;
    let (s1, y1) = ql_stategen(reg, sk, n)?;
    Ok((QrkSigningKey::Fresh { halves: [s0, s1] }, QrkVerificationKey { pk: sk.public.clone(), serials: [y0, y1] }))
}

/// Signs bit `m` by deleting the `m`-th lightning state.
pub fn qrk_sign(reg: &mut Registry, sigk: &mut QrkSigningKey, m: bool) -> Result<LightningCert, GroupLightError> {
    let QrkSigningKey::Fresh { halves } = sigk else {
        return Err(GroupLightError::AlreadyUsed);
    };
    let sig = ql_del(reg, &halves[m as usize])?;
    let placeholder = QrkSigningKey::Used { remaining: !m, state: LightningState { handles: Vec::new() } };
    if let QrkSigningKey::Fresh { halves: [a, b] } = std::mem::replace(sigk, placeholder) {
        *sigk = QrkSigningKey::Used { remaining: !m, state: if m { a } else { b } };
    }
    Ok(sig)
}

pub fn qrk_verify(vk: &QrkVerificationKey, m: bool, sig: &LightningCert) -> bool {
    ql_semiver(&vk.pk, &vk.serials[m as usize], sig)
}

/// Checks the returned signing key against the set of bits signed.
pub fn qrk_cert(
    reg: &mut Registry,
    sk: &Stf,
    vk: &QrkVerificationKey,
    returned: &QrkSigningKey,
    signed: &[bool],
) -> Result<bool, GroupLightError> {
    if returned.states().iter().any(|s| !s.is_live(reg)) {
        return Err(GroupLightError::ConsumedToken);
    }
    let has0 = signed.contains(&false);
    let has1 = signed.contains(&true);
    match (has0, has1, returned) {
        (true, true, _) => Ok(false),
        (false, false, QrkSigningKey::Fresh { halves }) => {
            Ok(ql_fullver(reg, sk, &vk.serials[0], &halves[0])? & ql_fullver(reg, sk, &vk.serials[1], &halves[1])?)
        }
        (_, _, QrkSigningKey::Used { remaining, state }) if has0 != has1 && *remaining == !has1 => {
            ql_fullver(reg, sk, &vk.serials[*remaining as usize], state)
        }
        _ => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::QuantumState;
    use crate::rng::seeded;

    fn big(v: u32) -> BigUint {
        BigUint::from(v)
    }

    fn toy_stf() -> Stf {
        Stf::from_parts(GroupAction::toy(), big(9), big(2))
    }

    #[test]
    fn toy_orbit_and_action() {
        let ga = GroupAction::toy();
        assert_eq!(ga.orbit(&big(9)), [9u32, 5, 4, 1, 3].map(big));
        assert_eq!(ga.act(&big(2), &big(9)), big(4));
        for s in ga.orbit(&big(9)) {
            assert_eq!(ga.act(&big(0), &s), s);
            for a in 0..5u32 {
                for b in 0..5u32 {
                    assert_eq!(ga.act(&big((a + b) % 5), &s), ga.act(&big(a), &ga.act(&big(b), &s)));
                }
            }
        }
    }

    #[test]
    fn bad_orders_rejected() {
        for (p, q, h) in [(11, 5, 2), (11, 3, 3), (12, 5, 3), (11, 5, 1)] {
            assert!(matches!(GroupAction::new(big(p), big(q), big(h)), Err(GroupLightError::BadOrder(_))));
        }
    }

    #[test]
    fn generated_actions_are_valid() {
        let mut r = seeded(5);
        let ga = GroupAction::generate(&mut r, 64, 32).unwrap();
        assert_eq!(ga.modulus().bits(), 64);
        assert_eq!(ga.order().bits(), 32);
        let ga = GroupAction::generate(&mut r, 256, 64).unwrap();
        assert_eq!(ga.modulus().bits(), 256);
    }

    #[test]
    fn primality_against_trial_division() {
        for n in 0u32..2000 {
            let trial = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_probable_prime(&big(n)), trial, "{n}");
        }
    }

    #[test]
    fn stf_toy_values() {
        let stf = toy_stf();
        assert_eq!(stf.public.s1, big(4));
        assert_eq!(stf.public.eval(false, &big(3)), big(1));
        assert_eq!(stf.swap(false, &big(3)), big(1));
        assert_eq!(stf.public.eval(true, &big(1)), big(1));
        for h in 0..5u32 {
            for b in [false, true] {
                let h2 = stf.swap(b, &big(h));
                assert_eq!(stf.public.eval(!b, &h2), stf.public.eval(b, &big(h)));
                assert_eq!(stf.swap(!b, &h2), big(h));
            }
        }
    }

    #[test]
    fn brute_force_claws_exist_on_toy() {
        let stf = toy_stf();
        let claws: Vec<(u32, u32)> = (0..5u32)
            .flat_map(|a| (0..5u32).map(move |b| (a, b)))
            .filter(|&(a, b)| stf.public.eval(false, &big(a)) == stf.public.eval(true, &big(b)))
            .collect();
        assert_eq!(claws.len(), 5);
        assert!(claws.iter().all(|&(a, b)| big(b) == stf.swap(false, &big(a))));
    }

    #[test]
    fn lightning_flow() {
        let stf = toy_stf();
        let mut reg = Registry::new(3);
        let (state, snum) = ql_stategen(&mut reg, &stf, 6).unwrap();
        assert_eq!(snum.values.len(), 6);
        for (h, y) in state.handles.iter().zip(&snum.values) {
            let QuantumState::Pair(p) = reg.inspect(h).unwrap() else { panic!() };
            let h0 = p.x0().remove_bit(0).to_biguint();
            let h1 = p.x1().remove_bit(0).to_biguint();
            assert_eq!(&stf.public.eval(false, &h0), y);
            assert_eq!(&stf.public.eval(true, &h1), y);
        }
        assert!(ql_fullver(&mut reg, &stf, &snum, &state).unwrap());

        let (state, snum) = ql_stategen(&mut reg, &stf, 6).unwrap();
        let cert = ql_del(&mut reg, &state).unwrap();
        assert!(ql_semiver(&stf.public, &snum, &cert));
        let mut bumped = cert.clone();
        bumped.entries[0].value = (&bumped.entries[0].value + 1u32) % 5u32;
        assert!(!ql_semiver(&stf.public, &snum, &bumped));
        let mut flipped = cert.clone();
        flipped.entries[0].bit ^= true;
        assert!(!ql_semiver(&stf.public, &snum, &flipped));
        assert_eq!(ql_del(&mut reg, &state).unwrap_err(), GroupLightError::ConsumedToken);
    }

    #[test]
    fn fullver_rejects_wrong_serial() {
        let stf = toy_stf();
        let mut reg = Registry::new(4);
        let (state, snum) = ql_stategen(&mut reg, &stf, 4).unwrap();
        let mut wrong = snum.clone();
        wrong.values[0] = (&wrong.values[0] * 3u32) % 11u32;
        assert!(!ql_fullver(&mut reg, &stf, &wrong, &state).unwrap());
    }

    #[test]
    fn qrk_cases() {
        let stf = toy_stf();
        let mut reg = Registry::new(5);
        let (k, vk) = qrk_keygen(&mut reg, &stf, 8).unwrap();
        assert!(qrk_cert(&mut reg, &stf, &vk, &k, &[]).unwrap());

        for m in [false, true] {
            let (mut k, vk) = qrk_keygen(&mut reg, &stf, 8).unwrap();
            let sig = qrk_sign(&mut reg, &mut k, m).unwrap();
            assert!(qrk_verify(&vk, m, &sig));
            assert!(!qrk_verify(&vk, !m, &sig));
            assert_eq!(qrk_sign(&mut reg, &mut k, m).unwrap_err(), GroupLightError::AlreadyUsed);
            assert!(!qrk_cert(&mut reg, &stf, &vk, &k, &[!m]).unwrap());
            assert!(!qrk_cert(&mut reg, &stf, &vk, &k, &[false, true]).unwrap());
            assert!(qrk_cert(&mut reg, &stf, &vk, &k, &[m]).unwrap());
        }
    }

    #[test]
    fn pp_json_shape() {
        let v = serde_json::to_value(&toy_stf().public).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["h", "p", "q", "s0", "s1"]);
        assert_eq!(v["s1"], "4");
        let back: StfPublic = serde_json::from_value(v).unwrap();
        assert_eq!(back, toy_stf().public);
        let bad = serde_json::json!({"p": "b", "q": "5", "h": "2", "s0": "9", "s1": "4"});
        assert!(serde_json::from_value::<StfPublic>(bad).is_err());
    }
}
