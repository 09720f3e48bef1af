//! Security games, baseline adversaries and win-rate statistics.
//!
//! Every trial runs on its own registry seeded from `(seed, trial index)`,
//! so a run is reproducible and trials can execute in parallel. While an
//! adversary has the floor its registry is sealed: it can measure and
//! transform the states it was handed, but any attempt to read amplitudes
//! aborts the run with [`GamesError::AdversaryContractViolation`].

use std::fmt::Write as _;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::dsrkey::{
    ChainCertificate, ChainRecord, ChainScheme, ChainSignature, ChainSigningState, MbkSignature, MbkVerificationKey,
};
use crate::dsrsign::{MtScheme, MtSignature, NqParams};
use crate::grouplight::{
    ql_del, ql_fullver, ql_semiver, ql_stategen, qrk_cert, qrk_keygen, qrk_sign, qrk_verify, GroupAction,
    LightningCert, LightningState, QrkSigningKey, QrkVerificationKey, SerialNumber, Stf, StfPublic,
};
use crate::primitives::{
    ChainSignature as ClassicalChainSignature, CrhInstance, LamportChain, LamportPublicKey, OwfInstance,
};
use crate::qkernel::{Registry, TokenHandle, TokenId};
use crate::rng::{self, SimRng};
use crate::ttoss::{
    oss_keygen, oss_setup, oss_sign, oss_ver0, oss_ver1, FamilyParams, OssPublicParams, OssSigEntry, OssSignature,
    OssVerificationKey,
};
use crate::tts::{self, TtsPublicKey, TtsSignature, TtsToken};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GamesError {
    #[error("unknown game {0:?}")]
    UnknownGame(String),
    #[error("unknown adversary {0:?}")]
    UnknownAdversary(String),
    #[error("adversary {adversary:?} does not play game {game:?}")]
    AdversaryMismatch { adversary: String, game: String },
    #[error("adversary contract violation: {0}")]
    AdversaryContractViolation(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("challenger failed: {0}")]
    Challenger(String),
    #[error("adversary failed: {0}")]
    Adversary(String),
}

macro_rules! adversary_error {
    ($($t:ty),*) => {$(
        impl From<$t> for GamesError {
            fn from(e: $t) -> Self {
                GamesError::Adversary(e.to_string())
            }
        }
    )*};
}

adversary_error!(
    crate::qkernel::KernelError,
    crate::tts::TtsError,
    crate::ttoss::TtossError,
    crate::dsrkey::DsrKeyError,
    crate::dsrsign::DsrSignError,
    crate::grouplight::GroupLightError
);

fn challenger<E: std::fmt::Display>(e: E) -> GamesError {
    GamesError::Challenger(e.to_string())
}

// ---- statistics ----

/// Wins out of trials with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub wins: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

const Z95: f64 = 1.959963984540054;

pub fn wilson_interval(wins: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = wins as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    let low = if wins == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if wins == trials { 1.0 } else { (centre + half).min(1.0) };
    (low, high)
}

impl TrialStats {
    pub fn from_counts(wins: u64, trials: u64) -> Self {
        assert!(wins <= trials, "more wins than trials");
        let (wilson_low, wilson_high) = wilson_interval(wins, trials, Z95);
        let rate = if trials == 0 { 0.0 } else { wins as f64 / trials as f64 };
        Self { trials, wins, rate, wilson_low, wilson_high }
    }

    pub fn merge(&self, other: &Self) -> Self {
        Self::from_counts(self.wins + other.wins, self.trials + other.trials)
    }
}

/// How an observed rate is compared with an analytic target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum Tolerance {
    /// `|rate - target| <= k·σ` with the binomial σ at the target.
    Sigma { k: f64 },
    /// `rate <= target + k·σ`.
    AtMost { k: f64 },
    /// `rate == target`.
    Exact,
    /// The target lies in the Wilson interval.
    Wilson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatCheck {
    pub pass: bool,
    pub observed: f64,
    pub target: f64,
    pub lower: f64,
    pub upper: f64,
    pub tolerance: Tolerance,
}

pub fn stat_check(stats: &TrialStats, target: f64, tolerance: Tolerance) -> StatCheck {
    let sigma = (target * (1.0 - target) / stats.trials.max(1) as f64).sqrt();
    let (lower, upper) = match tolerance {
        Tolerance::Sigma { k } => (target - k * sigma, target + k * sigma),
        Tolerance::AtMost { k } => (0.0, target + k * sigma),
        Tolerance::Exact => (target, target),
        Tolerance::Wilson => (stats.wilson_low, stats.wilson_high),
    };
    let pass = match tolerance {
        Tolerance::Exact => stats.wins as f64 == target * stats.trials as f64,
        Tolerance::Wilson => lower <= target && target <= upper,
        _ => lower <= stats.rate && stats.rate <= upper,
    };
    StatCheck { pass, observed: stats.rate, target, lower, upper, tolerance }
}

// ---- adversary interfaces ----

/// What an adversary may touch: its sealed registry and randomness.
pub struct AdversaryCtx<'a> {
    reg: &'a mut Registry,
}

impl AdversaryCtx<'_> {
    pub fn reg(&mut self) -> &mut Registry {
        self.reg
    }

    pub fn rng(&mut self) -> &mut SimRng {
        self.reg.rng()
    }
}

/// The hardcore-bit challenge: `f`, image pairs, and one phased pair per copy.
pub struct AhbChallenge {
    pub f: OwfInstance,
    pub images: Vec<(BitString, BitString)>,
    pub states: Vec<TokenHandle>,
}

/// A preimage guess and a parity guess for one copy.
#[derive(Debug, Clone)]
pub struct AhbAnswer {
    pub x: BitString,
    pub d: BitString,
}

pub trait AhbAdversary: Send + Sync {
    fn attack(&self, ctx: &mut AdversaryCtx<'_>, challenge: AhbChallenge) -> Result<Vec<AhbAnswer>, GamesError>;
}

/// Produce a signature on 0 from the public key alone.
pub trait TtsForger: Send + Sync {
    fn forge(&self, ctx: &mut AdversaryCtx<'_>, pk: &TtsPublicKey) -> Result<TtsSignature, GamesError>;
}

/// Produce signatures on both bits from one token.
pub trait TtsAttacker: Send + Sync {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        pk: &TtsPublicKey,
        token: TtsToken,
    ) -> Result<(TtsSignature, TtsSignature), GamesError>;
}

/// Produce a verification key with signatures on both bits, given only the
/// public parameters (with honest key generation available).
pub trait OssAttacker: Send + Sync {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        pp: &OssPublicParams,
    ) -> Result<(OssVerificationKey, OssSignature, OssSignature), GamesError>;
}

pub struct DsrKeyChallenge {
    pub pp: OssPublicParams,
    pub scheme: ChainScheme,
    pub vk: MbkVerificationKey,
    pub key: ChainSigningState,
}

pub struct DsrKeyAnswer {
    pub cert: ChainCertificate,
    pub revoked: Vec<Vec<u8>>,
    pub message: Vec<u8>,
    pub sig: ChainSignature,
}

/// Revoke the signing key and still sign a message outside the revoked set.
pub trait DsrKeyAttacker: Send + Sync {
    fn attack(&self, ctx: &mut AdversaryCtx<'_>, challenge: DsrKeyChallenge) -> Result<DsrKeyAnswer, GamesError>;
}

pub struct DsrSignChallenge {
    pub scheme: MtScheme<LamportChain>,
    pub vk: LamportPublicKey,
    pub message: Vec<u8>,
    pub psi: MtSignature<ClassicalChainSignature>,
}

/// Return a deletion certificate for the signature and still present a
/// verifying signature on the same message.
pub trait DsrSignAttacker: Send + Sync {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        challenge: DsrSignChallenge,
    ) -> Result<(TtsSignature, MtSignature<ClassicalChainSignature>), GamesError>;
}

/// Honest minting of lightning states without access to the trapdoor.
pub struct LightningMinter {
    stf: Stf,
}

impl LightningMinter {
    pub fn public(&self) -> &StfPublic {
        &self.stf.public
    }

    pub fn mint(&self, reg: &mut Registry, n: usize) -> Result<(LightningState, SerialNumber), GamesError> {
        Ok(ql_stategen(reg, &self.stf, n)?)
    }
}

/// Produce a serial number with both a passing certificate and a passing state.
pub trait QlAttacker: Send + Sync {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        minter: &LightningMinter,
        n: usize,
    ) -> Result<(SerialNumber, LightningCert, LightningState), GamesError>;
}

pub struct QrkAnswer {
    pub returned: QrkSigningKey,
    pub revoked: Vec<bool>,
    pub message: bool,
    pub sig: LightningCert,
}

/// Return the signing key and still sign a bit outside the revoked set.
pub trait QrkAttacker: Send + Sync {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        vk: &QrkVerificationKey,
        key: QrkSigningKey,
    ) -> Result<QrkAnswer, GamesError>;
}

pub enum Adversary {
    Ahb(Box<dyn AhbAdversary>),
    TtsForger(Box<dyn TtsForger>),
    Tts(Box<dyn TtsAttacker>),
    Oss(Box<dyn OssAttacker>),
    DsrKey(Box<dyn DsrKeyAttacker>),
    DsrSign(Box<dyn DsrSignAttacker>),
    Ql(Box<dyn QlAttacker>),
    Qrk(Box<dyn QrkAttacker>),
    /// Plays the correctness games, which have no adversary.
    Honest,
}

// ---- games ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Game {
    Ahb { width: usize, copies: usize },
    TtsOneWayness { n: usize, width: usize },
    TtsSecurity { n: usize, width: usize },
    OssSecurity { n: usize, family: FamilyParams },
    DsrKeyDeletion { n: usize, family: FamilyParams, hash_bits: usize },
    DsrSignDeletion { n: usize, width: usize },
    QlSecurity { n: usize, action: GroupAction },
    QrkSecurity { n: usize, action: GroupAction },
    TtsCorrectness { n: usize, width: usize },
    OssCorrectness { n: usize, family: FamilyParams },
    DsrKeyCorrectness { n: usize, family: FamilyParams, hash_bits: usize, max_messages: usize },
    DsrSignCorrectness { n: usize, width: usize },
    LightningCorrectness { n: usize, action: GroupAction },
    QrkCorrectness { n: usize, action: GroupAction },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub name: String,
    pub game: Game,
}

const TOY_OUTPUT_BITS: usize = 64;
const GAME_NAMES: [&str; 16] = [
    "ahb",
    "ahb-amplified",
    "tts-one-wayness",
    "tts-security",
    "oss-security",
    "dsrkey-deletion",
    "dsrsign-deletion",
    "ql-security",
    "qrk-security",
    "tts-correctness",
    "oss-correctness",
    "oss-correctness-kernel",
    "dsrkey-correctness",
    "dsrsign-correctness",
    "lightning-correctness",
    "qrk-correctness",
];

pub fn builtin_games() -> &'static [&'static str] {
    &GAME_NAMES
}

/// The 64-bit action used by the larger lightning instances.
pub fn action_64() -> GroupAction {
    GroupAction::generate(&mut rng::seeded(64), 64, 32).expect("fixed 64-bit instance")
}

impl GameSpec {
    /// A builtin game at its default parameters. `lightning-correctness-64`
    /// and `qrk-correctness-64` use a 64-bit field instead of `p = 11`.
    pub fn by_name(name: &str) -> Result<Self, GamesError> {
        let blum16 = FamilyParams::BlumInteger { modulus_bits: 16 };
        let kernel12 = FamilyParams::KernelIdeal { width: 12 };
        let game = match name {
            "ahb" => Game::Ahb { width: 12, copies: 1 },
            "ahb-amplified" => Game::Ahb { width: 12, copies: 10 },
            "tts-one-wayness" => Game::TtsOneWayness { n: 4, width: 12 },
            "tts-security" => Game::TtsSecurity { n: 8, width: 12 },
            "oss-security" => Game::OssSecurity { n: 8, family: blum16 },
            "dsrkey-deletion" => Game::DsrKeyDeletion { n: 2, family: kernel12, hash_bits: 8 },
            "dsrsign-deletion" => Game::DsrSignDeletion { n: 8, width: 12 },
            "ql-security" => Game::QlSecurity { n: 8, action: GroupAction::toy() },
            "qrk-security" => Game::QrkSecurity { n: 8, action: GroupAction::toy() },
            "tts-correctness" => Game::TtsCorrectness { n: 8, width: 12 },
            "oss-correctness" => Game::OssCorrectness { n: 8, family: blum16 },
            "oss-correctness-kernel" => Game::OssCorrectness { n: 8, family: kernel12 },
            "dsrkey-correctness" => Game::DsrKeyCorrectness { n: 8, family: kernel12, hash_bits: 16, max_messages: 8 },
            "dsrsign-correctness" => Game::DsrSignCorrectness { n: 8, width: 12 },
            "lightning-correctness" => Game::LightningCorrectness { n: 8, action: GroupAction::toy() },
            "lightning-correctness-64" => Game::LightningCorrectness { n: 8, action: action_64() },
            "qrk-correctness" => Game::QrkCorrectness { n: 8, action: GroupAction::toy() },
            "qrk-correctness-64" => Game::QrkCorrectness { n: 8, action: action_64() },
            _ => return Err(GamesError::UnknownGame(name.to_string())),
        };
        Ok(Self { name: name.to_string(), game })
    }

    pub fn is_correctness(&self) -> bool {
        matches!(
            self.game,
            Game::TtsCorrectness { .. }
                | Game::OssCorrectness { .. }
                | Game::DsrKeyCorrectness { .. }
                | Game::DsrSignCorrectness { .. }
                | Game::LightningCorrectness { .. }
                | Game::QrkCorrectness { .. }
        )
    }

    pub fn accepts(&self, adversary: &Adversary) -> bool {
        matches!(
            (&self.game, adversary),
            (Game::Ahb { .. }, Adversary::Ahb(_))
                | (Game::TtsOneWayness { .. }, Adversary::TtsForger(_))
                | (Game::TtsSecurity { .. }, Adversary::Tts(_))
                | (Game::OssSecurity { .. }, Adversary::Oss(_))
                | (Game::DsrKeyDeletion { .. }, Adversary::DsrKey(_))
                | (Game::DsrSignDeletion { .. }, Adversary::DsrSign(_))
                | (Game::QlSecurity { .. }, Adversary::Ql(_))
                | (Game::QrkSecurity { .. }, Adversary::Qrk(_))
        ) || (self.is_correctness() && matches!(adversary, Adversary::Honest))
    }
}

/// Result of one trial and every state id its registry ever issued.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub win: bool,
    pub ids: Vec<TokenId>,
}

/// Runs the adversary on a sealed registry. Ordinary failures count as a
/// loss; peeking at amplitudes is a contract violation.
fn turn<T>(
    reg: &mut Registry,
    f: impl FnOnce(&mut AdversaryCtx<'_>) -> Result<T, GamesError>,
) -> Result<Option<T>, GamesError> {
    reg.set_sealed(true);
    let out = f(&mut AdversaryCtx { reg: &mut *reg });
    reg.set_sealed(false);
    if reg.take_peek_attempt() {
        return Err(GamesError::AdversaryContractViolation("adversary tried to read amplitudes".into()));
    }
    match out {
        Ok(v) => Ok(Some(v)),
        Err(e @ GamesError::AdversaryContractViolation(_)) => Err(e),
        Err(_) => Ok(None),
    }
}

fn toy_owf(reg: &mut Registry, width: usize) -> Result<OwfInstance, GamesError> {
    let seed = reg.rng().gen();
    OwfInstance::ideal_toy(seed, width, TOY_OUTPUT_BITS).map_err(challenger)
}

fn random_message(rng: &mut SimRng) -> Vec<u8> {
    let mut m = vec![0u8; 8];
    rng.fill_bytes(&mut m);
    m
}

fn game_classical() -> LamportChain {
    LamportChain::new(OwfInstance::standard(128), CrhInstance::new(64).expect("valid width"))
}

pub fn run_trial(spec: &GameSpec, adversary: &Adversary, seed: u64, index: u64) -> Result<TrialOutcome, GamesError> {
    if !spec.accepts(adversary) {
        return Err(GamesError::AdversaryMismatch {
            adversary: adversary_kind(adversary).into(),
            game: spec.name.clone(),
        });
    }
    let mut reg = Registry::from_rng(rng::derived(seed, index));
    let win = play(&spec.game, adversary, &mut reg)?;
    let mut ids: Vec<TokenId> = reg.live_ids().chain(reg.spent_ids()).collect();
    ids.sort();
    Ok(TrialOutcome { win, ids })
}

fn adversary_kind(a: &Adversary) -> &'static str {
    match a {
        Adversary::Ahb(_) => "ahb",
        Adversary::TtsForger(_) => "tts-forger",
        Adversary::Tts(_) => "tts",
        Adversary::Oss(_) => "oss",
        Adversary::DsrKey(_) => "dsrkey",
        Adversary::DsrSign(_) => "dsrsign",
        Adversary::Ql(_) => "ql",
        Adversary::Qrk(_) => "qrk",
        Adversary::Honest => "honest",
    }
}

pub fn run_game(spec: &GameSpec, adversary: &Adversary, trials: u64, seed: u64) -> Result<TrialStats, GamesError> {
    if trials == 0 {
        return Err(GamesError::BadParams("at least one trial is required".into()));
    }
    let wins = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(spec, adversary, seed, t).map(|o| o.win as u64))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(TrialStats::from_counts(wins, trials))
}

fn play(game: &Game, adversary: &Adversary, reg: &mut Registry) -> Result<bool, GamesError> {
    match (game, adversary) {
        (&Game::Ahb { width, copies }, Adversary::Ahb(a)) => play_ahb(reg, a.as_ref(), width, copies),
        (&Game::TtsOneWayness { n, width }, Adversary::TtsForger(a)) => {
            let f = toy_owf(reg, width)?;
            let (_, pk) = tts::keygen(reg, n, &f).map_err(challenger)?;
            let Some(sig) = turn(reg, |ctx| a.forge(ctx, &pk))? else { return Ok(false) };
            Ok(matches!(tts::ver0(&pk, &sig), Ok(true)))
        }
        (&Game::TtsSecurity { n, width }, Adversary::Tts(a)) => {
            let f = toy_owf(reg, width)?;
            let (sk, pk) = tts::keygen(reg, n, &f).map_err(challenger)?;
            let token = tts::stategen(reg, &sk).map_err(challenger)?;
            let Some((s0, s1)) = turn(reg, |ctx| a.attack(ctx, &pk, token))? else { return Ok(false) };
            Ok(matches!(tts::ver0(&pk, &s0), Ok(true)) && matches!(tts::ver1(&sk, &s1), Ok(true)))
        }
        (Game::OssSecurity { n, family }, Adversary::Oss(a)) => {
            let (pp, sk) = oss_setup(reg.rng(), *n, family).map_err(challenger)?;
            let Some((vk, s0, s1)) = turn(reg, |ctx| a.attack(ctx, &pp))? else { return Ok(false) };
            Ok(matches!(oss_ver0(&pp, &vk, &s0), Ok(true)) && matches!(oss_ver1(&pp, &sk, &vk, &s1), Ok(true)))
        }
        (Game::DsrKeyDeletion { n, family, hash_bits }, Adversary::DsrKey(a)) => {
            let (pp, ck) = oss_setup(reg.rng(), *n, family).map_err(challenger)?;
            let scheme = ChainScheme::new(CrhInstance::new(*hash_bits).map_err(challenger)?);
            let (key, vk) = scheme.keygen(reg, &pp).map_err(challenger)?;
            let challenge = DsrKeyChallenge { pp: pp.clone(), scheme: scheme.clone(), vk: vk.clone(), key };
            let Some(ans) = turn(reg, |ctx| a.attack(ctx, challenge))? else { return Ok(false) };
            Ok(!ans.revoked.contains(&ans.message)
                && scheme.cert(&pp, &vk, &ck, &ans.cert, &ans.revoked)
                && scheme.verify(&pp, &vk, &ans.message, &ans.sig))
        }
        (&Game::DsrSignDeletion { n, width }, Adversary::DsrSign(a)) => {
            let f = toy_owf(reg, width)?;
            let scheme = MtScheme::new(game_classical(), NqParams { n, owf: f });
            let (mut sk, vk) = scheme.keygen(reg);
            let message = random_message(reg.rng());
            let (psi, ck) = scheme.sign(reg, &mut sk, &message).map_err(challenger)?;
            let challenge = DsrSignChallenge { scheme: scheme.clone(), vk: vk.clone(), message: message.clone(), psi };
            let Some((cert, psi2)) = turn(reg, |ctx| a.attack(ctx, challenge))? else { return Ok(false) };
            Ok(scheme.cert(&ck, &cert) && matches!(scheme.verify(reg, &vk, &psi2, &message), Ok(true)))
        }
        (Game::QlSecurity { n, action }, Adversary::Ql(a)) => {
            let stf = Stf::setup(reg.rng(), action.clone());
            let minter = LightningMinter { stf: stf.clone() };
            let Some((snum, cert, state)) = turn(reg, |ctx| a.attack(ctx, &minter, *n))? else { return Ok(false) };
            Ok(ql_semiver(&stf.public, &snum, &cert) && matches!(ql_fullver(reg, &stf, &snum, &state), Ok(true)))
        }
        (Game::QrkSecurity { n, action }, Adversary::Qrk(a)) => {
            let stf = Stf::setup(reg.rng(), action.clone());
            let (key, vk) = qrk_keygen(reg, &stf, *n).map_err(challenger)?;
            let Some(ans) = turn(reg, |ctx| a.attack(ctx, &vk, key))? else { return Ok(false) };
            Ok(!ans.revoked.contains(&ans.message)
                && qrk_verify(&vk, ans.message, &ans.sig)
                && matches!(qrk_cert(reg, &stf, &vk, &ans.returned, &ans.revoked), Ok(true)))
        }
        (game, Adversary::Honest) => play_correctness(game, reg),
        _ => Err(GamesError::AdversaryMismatch {
            adversary: adversary_kind(adversary).into(),
            game: format!("{game:?}"),
        }),
    }
}

fn play_ahb(reg: &mut Registry, adversary: &dyn AhbAdversary, width: usize, copies: usize) -> Result<bool, GamesError> {
    let f = toy_owf(reg, width)?;
    let mut secrets = Vec::with_capacity(copies);
    let mut images = Vec::with_capacity(copies);
    let mut states = Vec::with_capacity(copies);
    for _ in 0..copies {
        let (x0, x1) = tts::distinct_pair(|| BitString::random(reg.rng(), width));
        let c = rng::random_bit(reg.rng());
        images.push((f.eval(&x0).map_err(challenger)?, f.eval(&x1).map_err(challenger)?));
        states.push(reg.new_pair_state(x0.clone(), x1.clone(), c).map_err(challenger)?);
        secrets.push((x0.xor(&x1), c));
    }
    let challenge = AhbChallenge { f: f.clone(), images: images.clone(), states };
    let Some(answers) = turn(reg, |ctx| adversary.attack(ctx, challenge))? else { return Ok(false) };
    if answers.len() != copies {
        return Ok(false);
    }
    Ok(answers.iter().zip(&images).zip(&secrets).all(|((ans, (y0, y1)), (delta, c))| {
        let preimage = matches!(f.eval(&ans.x), Ok(ref y) if y == y0 || y == y1);
        preimage && ans.d.width() == width && ans.d.dot(delta) == *c
    }))
}

fn play_correctness(game: &Game, reg: &mut Registry) -> Result<bool, GamesError> {
    match game {
        &Game::TtsCorrectness { n, width } => {
            let f = toy_owf(reg, width)?;
            let (sk, pk) = tts::keygen(reg, n, &f).map_err(challenger)?;
            let t0 = tts::stategen(reg, &sk).map_err(challenger)?;
            let t1 = tts::stategen(reg, &sk).map_err(challenger)?;
            let s0 = tts::sign(reg, &t0, false).map_err(challenger)?;
            let s1 = tts::sign(reg, &t1, true).map_err(challenger)?;
            Ok(tts::ver0(&pk, &s0).map_err(challenger)? && tts::ver1(&sk, &s1).map_err(challenger)?)
        }
        Game::OssCorrectness { n, family } => {
            let (pp, sk) = oss_setup(reg.rng(), *n, family).map_err(challenger)?;
            let (k0, vk0) = oss_keygen(reg, &pp).map_err(challenger)?;
            let (k1, vk1) = oss_keygen(reg, &pp).map_err(challenger)?;
            let s0 = oss_sign(reg, &pp, &k0, false).map_err(challenger)?;
            let s1 = oss_sign(reg, &pp, &k1, true).map_err(challenger)?;
            Ok(oss_ver0(&pp, &vk0, &s0).map_err(challenger)? && oss_ver1(&pp, &sk, &vk1, &s1).map_err(challenger)?)
        }
        Game::DsrKeyCorrectness { n, family, hash_bits, max_messages } => {
            let (pp, ck) = oss_setup(reg.rng(), *n, family).map_err(challenger)?;
            let scheme = ChainScheme::new(CrhInstance::new(*hash_bits).map_err(challenger)?);
            let (mut state, vk) = scheme.keygen(reg, &pp).map_err(challenger)?;
            let count = reg.rng().gen_range(0..=*max_messages);
            let mut messages = Vec::with_capacity(count);
            let mut ok = true;
            for _ in 0..count {
                let m = random_message(reg.rng());
                let sig = scheme.sign(reg, &pp, &mut state, &m).map_err(challenger)?;
                ok &= scheme.verify(&pp, &vk, &m, &sig);
                messages.push(m);
            }
            let cert = scheme.del(reg, &pp, &state).map_err(challenger)?;
            Ok(ok && scheme.cert(&pp, &vk, &ck, &cert, &messages))
        }
        &Game::DsrSignCorrectness { n, width } => {
            let f = toy_owf(reg, width)?;
            let scheme = MtScheme::new(game_classical(), NqParams { n, owf: f });
            let (mut sk, vk) = scheme.keygen(reg);
            let m = random_message(reg.rng());
            let (psi, ck) = scheme.sign(reg, &mut sk, &m).map_err(challenger)?;
            let verified = scheme.verify(reg, &vk, &psi, &m).map_err(challenger)?;
            let cert = scheme.del(reg, &psi).map_err(challenger)?;
            Ok(verified && scheme.cert(&ck, &cert))
        }
        Game::LightningCorrectness { n, action } => {
            let stf = Stf::setup(reg.rng(), action.clone());
            let (a, snum_a) = ql_stategen(reg, &stf, *n).map_err(challenger)?;
            let (b, snum_b) = ql_stategen(reg, &stf, *n).map_err(challenger)?;
            let full = ql_fullver(reg, &stf, &snum_a, &a).map_err(challenger)?;
            let cert = ql_del(reg, &b).map_err(challenger)?;
            Ok(full && ql_semiver(&stf.public, &snum_b, &cert))
        }
        Game::QrkCorrectness { n, action } => {
            let stf = Stf::setup(reg.rng(), action.clone());
            let (fresh, vk_fresh) = qrk_keygen(reg, &stf, *n).map_err(challenger)?;
            let unused = qrk_cert(reg, &stf, &vk_fresh, &fresh, &[]).map_err(challenger)?;
            let (mut key, vk) = qrk_keygen(reg, &stf, *n).map_err(challenger)?;
            let m = rng::random_bit(reg.rng());
            let sig = qrk_sign(reg, &mut key, m).map_err(challenger)?;
            let used = qrk_cert(reg, &stf, &vk, &key, &[m]).map_err(challenger)?;
            Ok(unused && used && qrk_verify(&vk, m, &sig))
        }
        _ => Err(GamesError::AdversaryMismatch { adversary: "honest".into(), game: format!("{game:?}") }),
    }
}

// ---- builtin adversaries ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdversaryInfo {
    pub name: &'static str,
    pub game: &'static str,
    pub summary: &'static str,
}

const ADVERSARIES: [AdversaryInfo; 12] = [
    AdversaryInfo { name: "ahb-naive", game: "ahb", summary: "measure computationally, guess the parity" },
    AdversaryInfo {
        name: "ahb-hadamard-only",
        game: "ahb",
        summary: "measure in the Hadamard basis, guess the preimage",
    },
    AdversaryInfo {
        name: "tts-fabricate-token",
        game: "tts-one-wayness",
        summary: "sign 0 with a token built from random strings",
    },
    AdversaryInfo {
        name: "tts-measure-then-guess",
        game: "tts-security",
        summary: "sign 0 honestly, guess the signature on 1",
    },
    AdversaryInfo { name: "oss-random-phase", game: "oss-security", summary: "sign 0 honestly, guess the phase bits" },
    AdversaryInfo {
        name: "dsrkey-delete-then-forge",
        game: "dsrkey-deletion",
        summary: "revoke honestly, forge a random chain",
    },
    AdversaryInfo {
        name: "dsrsign-delete-then-resubmit",
        game: "dsrsign-deletion",
        summary: "delete honestly, resubmit a random token",
    },
    AdversaryInfo {
        name: "dsrsign-keep-and-forge-cert",
        game: "dsrsign-deletion",
        summary: "keep the token, guess the certificate",
    },
    AdversaryInfo {
        name: "ql-measure-then-return",
        game: "ql-security",
        summary: "certify deletion, return the measured basis states",
    },
    AdversaryInfo {
        name: "qrk-measure-then-return",
        game: "qrk-security",
        summary: "sign both bits, return a measured half",
    },
    AdversaryInfo { name: "honest", game: "*-correctness", summary: "the honest parties of a correctness game" },
    AdversaryInfo { name: "peeker", game: "ahb", summary: "tries to read amplitudes; always rejected" },
];

pub fn builtin_adversaries() -> &'static [AdversaryInfo] {
    &ADVERSARIES
}

pub fn adversary(name: &str) -> Result<Adversary, GamesError> {
    Ok(match name {
        "ahb-naive" => Adversary::Ahb(Box::new(AhbNaive)),
        "ahb-hadamard-only" => Adversary::Ahb(Box::new(AhbHadamardOnly)),
        "peeker" => Adversary::Ahb(Box::new(Peeker)),
        "tts-fabricate-token" => Adversary::TtsForger(Box::new(TtsFabricateToken)),
        "tts-measure-then-guess" => Adversary::Tts(Box::new(TtsMeasureThenGuess)),
        "oss-random-phase" => Adversary::Oss(Box::new(OssRandomPhase)),
        "dsrkey-delete-then-forge" => Adversary::DsrKey(Box::new(DsrKeyDeleteThenForge)),
        "dsrsign-delete-then-resubmit" => Adversary::DsrSign(Box::new(DsrSignDeleteThenResubmit)),
        "dsrsign-keep-and-forge-cert" => Adversary::DsrSign(Box::new(DsrSignKeepAndForgeCert)),
        "ql-measure-then-return" => Adversary::Ql(Box::new(QlMeasureThenReturn)),
        "qrk-measure-then-return" => Adversary::Qrk(Box::new(QrkMeasureThenReturn)),
        "honest" => Adversary::Honest,
        _ => return Err(GamesError::UnknownAdversary(name.to_string())),
    })
}

/// The analytic win rate of a builtin adversary in a game, with the
/// tolerance it is judged by.
pub fn baseline(spec: &GameSpec, adversary_name: &str) -> Option<(f64, Tolerance)> {
    let band = Tolerance::Sigma { k: 3.0 };
    let cap = Tolerance::AtMost { k: 3.0 };
    let half_pow = |n: usize| 0.5f64.powi(n as i32);
    Some(match (&spec.game, adversary_name) {
        (_, "honest") if spec.is_correctness() => (1.0, Tolerance::Exact),
        (&Game::Ahb { copies, .. }, "ahb-naive") => (half_pow(copies), band),
        (&Game::Ahb { width, copies }, "ahb-hadamard-only") => ((2.0 * half_pow(width)).powi(copies as i32), cap),
        (&Game::TtsOneWayness { n, width }, "tts-fabricate-token") => (n as f64 * 2.0 * half_pow(width), cap),
        (&Game::TtsSecurity { n, .. }, "tts-measure-then-guess") => (half_pow(n), band),
        (Game::OssSecurity { n, .. }, "oss-random-phase") => (half_pow(*n), band),
        (Game::DsrKeyDeletion { n, family, hash_bits }, "dsrkey-delete-then-forge") => {
            let width = match family {
                FamilyParams::KernelIdeal { width } => *width,
                FamilyParams::BlumInteger { modulus_bits } => *modulus_bits as usize,
                FamilyParams::BlumPrimes { .. } => return None,
            };
            (*n as f64 * 2.0 * half_pow(width) * *hash_bits as f64, cap)
        }
        (&Game::DsrSignDeletion { n, width }, "dsrsign-delete-then-resubmit") => {
            (n as f64 * 2.0 * half_pow(width), cap)
        }
        (&Game::DsrSignDeletion { n, .. }, "dsrsign-keep-and-forge-cert") => (half_pow(n), band),
        (Game::QlSecurity { n, .. }, "ql-measure-then-return") => (half_pow(*n), band),
        (Game::QrkSecurity { n, .. }, "qrk-measure-then-return") => (half_pow(*n), band),
        _ => return None,
    })
}

struct AhbNaive;

impl AhbAdversary for AhbNaive {
    fn attack(&self, ctx: &mut AdversaryCtx<'_>, ch: AhbChallenge) -> Result<Vec<AhbAnswer>, GamesError> {
        ch.states
            .iter()
            .map(|h| {
                let x = ctx.reg().measure_computational(h)?;
                let d = BitString::random(ctx.rng(), x.width());
                Ok(AhbAnswer { x, d })
            })
            .collect()
    }
}

struct AhbHadamardOnly;

impl AhbAdversary for AhbHadamardOnly {
    fn attack(&self, ctx: &mut AdversaryCtx<'_>, ch: AhbChallenge) -> Result<Vec<AhbAnswer>, GamesError> {
        ch.states
            .iter()
            .map(|h| {
                let d = ctx.reg().measure_hadamard(h)?;
                let x = BitString::random(ctx.rng(), d.width());
                Ok(AhbAnswer { x, d })
            })
            .collect()
    }
}

struct Peeker;

impl AhbAdversary for Peeker {
    fn attack(&self, ctx: &mut AdversaryCtx<'_>, ch: AhbChallenge) -> Result<Vec<AhbAnswer>, GamesError> {
        let state = ctx.reg().inspect(&ch.states[0])?.clone();
        let x = state.support()[0].clone();
        Ok(vec![AhbAnswer { d: BitString::zeros(x.width()), x }])
    }
}

fn random_tts_payload(rng: &mut SimRng, n: usize, width: usize) -> Vec<BitString> {
    (0..n).map(|_| BitString::random(rng, width)).collect()
}

struct TtsFabricateToken;

impl TtsForger for TtsFabricateToken {
    fn forge(&self, ctx: &mut AdversaryCtx<'_>, pk: &TtsPublicKey) -> Result<TtsSignature, GamesError> {
        let width = pk.owf.input_width();
        let mut handles = Vec::with_capacity(pk.len());
        for _ in 0..pk.len() {
            let (a, b) = tts::distinct_pair(|| BitString::random(ctx.rng(), width));
            let phase = rng::random_bit(ctx.rng());
            handles.push(ctx.reg().new_pair_state(a, b, phase)?);
        }
        Ok(tts::sign(ctx.reg(), &TtsToken { handles }, false)?)
    }
}

struct TtsMeasureThenGuess;

impl TtsAttacker for TtsMeasureThenGuess {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        pk: &TtsPublicKey,
        token: TtsToken,
    ) -> Result<(TtsSignature, TtsSignature), GamesError> {
        let s0 = tts::sign(ctx.reg(), &token, false)?;
        let payload = random_tts_payload(ctx.rng(), pk.len(), pk.owf.input_width());
        Ok((s0, TtsSignature { message: true, payload }))
    }
}

struct OssRandomPhase;

impl OssAttacker for OssRandomPhase {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        pp: &OssPublicParams,
    ) -> Result<(OssVerificationKey, OssSignature, OssSignature), GamesError> {
        let (key, vk) = oss_keygen(ctx.reg(), pp)?;
        let s0 = oss_sign(ctx.reg(), pp, &key, false)?;
        let entries = pp
            .families
            .iter()
            .map(|f| OssSigEntry {
                bit: rng::random_bit(ctx.rng()),
                value: BitString::random(ctx.rng(), f.domain_width()),
            })
            .collect();
        Ok((vk, s0, OssSignature { message: true, entries }))
    }
}

fn random_oss_zero_signature(rng: &mut SimRng, pp: &OssPublicParams) -> OssSignature {
    let entries = pp
        .families
        .iter()
        .map(|f| OssSigEntry { bit: rng::random_bit(rng), value: BitString::random(rng, f.domain_width()) })
        .collect();
    OssSignature { message: false, entries }
}

struct DsrKeyDeleteThenForge;

impl DsrKeyAttacker for DsrKeyDeleteThenForge {
    fn attack(&self, ctx: &mut AdversaryCtx<'_>, ch: DsrKeyChallenge) -> Result<DsrKeyAnswer, GamesError> {
        let DsrKeyChallenge { pp, scheme, vk, mut key } = ch;
        let mut revoked = Vec::new();
        for _ in 0..2 {
            let m = random_message(ctx.rng());
            scheme.sign(ctx.reg(), &pp, &mut key, &m)?;
            revoked.push(m);
        }
        let cert = scheme.del(ctx.reg(), &pp, &key)?;
        let message = loop {
            let m = random_message(ctx.rng());
            if !revoked.contains(&m) {
                break m;
            }
        };
        let sigs = (0..scheme.inner.bits()).map(|_| random_oss_zero_signature(ctx.rng(), &pp)).collect();
        let link = ChainRecord { message: message.clone(), next_vk: vk, sig: MbkSignature { sigs } };
        Ok(DsrKeyAnswer { cert, revoked, message, sig: ChainSignature { links: vec![link] } })
    }
}

struct DsrSignDeleteThenResubmit;

impl DsrSignAttacker for DsrSignDeleteThenResubmit {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        ch: DsrSignChallenge,
    ) -> Result<(TtsSignature, MtSignature<ClassicalChainSignature>), GamesError> {
        let cert = ch.scheme.del(ctx.reg(), &ch.psi)?;
        let width = ch.scheme.nq.owf.input_width();
        let mut handles = Vec::with_capacity(ch.scheme.nq.n);
        for _ in 0..ch.scheme.nq.n {
            let (a, b) = tts::distinct_pair(|| BitString::random(ctx.rng(), width));
            let phase = rng::random_bit(ctx.rng());
            handles.push(ctx.reg().new_pair_state(a, b, phase)?);
        }
        let MtSignature { sig, nq_vk, .. } = ch.psi;
        Ok((cert, MtSignature { token: TtsToken { handles }, sig, nq_vk }))
    }
}

struct DsrSignKeepAndForgeCert;

impl DsrSignAttacker for DsrSignKeepAndForgeCert {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        ch: DsrSignChallenge,
    ) -> Result<(TtsSignature, MtSignature<ClassicalChainSignature>), GamesError> {
        let payload = random_tts_payload(ctx.rng(), ch.scheme.nq.n, ch.scheme.nq.owf.input_width());
        Ok((TtsSignature { message: true, payload }, ch.psi))
    }
}

/// Replaces each lightning state by the basis state its deletion measured.
fn measured_copy(reg: &mut Registry, action: &GroupAction, cert: &LightningCert) -> LightningState {
    let handles =
        cert.entries.iter().map(|e| reg.new_singleton(action.encode(&e.value).with_prefix_bit(e.bit))).collect();
    LightningState { handles }
}

struct QlMeasureThenReturn;

impl QlAttacker for QlMeasureThenReturn {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        minter: &LightningMinter,
        n: usize,
    ) -> Result<(SerialNumber, LightningCert, LightningState), GamesError> {
        let (state, snum) = minter.mint(ctx.reg(), n)?;
        let cert = ql_del(ctx.reg(), &state)?;
        let copy = measured_copy(ctx.reg(), &minter.public().action, &cert);
        Ok((snum, cert, copy))
    }
}

struct QrkMeasureThenReturn;

impl QrkAttacker for QrkMeasureThenReturn {
    fn attack(
        &self,
        ctx: &mut AdversaryCtx<'_>,
        vk: &QrkVerificationKey,
        mut key: QrkSigningKey,
    ) -> Result<QrkAnswer, GamesError> {
        qrk_sign(ctx.reg(), &mut key, false)?;
        let QrkSigningKey::Used { state, .. } = key else {
            return Err(GamesError::Adversary("key should be used".into()));
        };
        let sig = ql_del(ctx.reg(), &state)?;
        let copy = measured_copy(ctx.reg(), &vk.pk.action, &sig);
        Ok(QrkAnswer {
            returned: QrkSigningKey::Used { remaining: true, state: copy },
            revoked: vec![false],
            message: true,
            sig,
        })
    }
}

// ---- reports ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub game: String,
    pub adversary: String,
    pub seed: u64,
    pub stats: TrialStats,
    pub check: Option<StatCheck>,
}

/// Runs a builtin game against a builtin adversary and judges the rate
/// against its baseline when one is known.
pub fn run_named(game: &str, adversary_name: &str, trials: u64, seed: u64) -> Result<GameReport, GamesError> {
    let spec = GameSpec::by_name(game)?;
    let adv = adversary(adversary_name)?;
    let stats = run_game(&spec, &adv, trials, seed)?;
    let check = baseline(&spec, adversary_name).map(|(target, tol)| stat_check(&stats, target, tol));
    Ok(GameReport { game: game.into(), adversary: adversary_name.into(), seed, stats, check })
}

impl GameReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let s = &self.stats;
        let _ = writeln!(out, "game       {}", self.game);
        let _ = writeln!(out, "adversary  {}", self.adversary);
        let _ = writeln!(out, "seed       {}", self.seed);
        let _ = writeln!(out, "wins       {} / {}", s.wins, s.trials);
        let _ = writeln!(out, "rate       {:.6}  (95% Wilson [{:.6}, {:.6}])", s.rate, s.wilson_low, s.wilson_high);
        if let Some(c) = &self.check {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "baseline   {:.6} in [{:.6}, {:.6}]  {verdict}", c.target, c.lower, c.upper);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stat_check_examples() {
        let s = TrialStats::from_counts(5010, 10_000);
        assert!(stat_check(&s, 0.5, Tolerance::Sigma { k: 3.0 }).pass);
        let s = TrialStats::from_counts(6000, 10_000);
        assert!(!stat_check(&s, 0.5, Tolerance::Sigma { k: 3.0 }).pass);
        let s = TrialStats::from_counts(200, 200);
        assert!(stat_check(&s, 1.0, Tolerance::Exact).pass);
        assert!(!stat_check(&TrialStats::from_counts(199, 200), 1.0, Tolerance::Exact).pass);
        assert!(stat_check(&TrialStats::from_counts(0, 1000), 0.01, Tolerance::AtMost { k: 3.0 }).pass);
    }

    #[test]
    fn wilson_contains_rate() {
        for (w, t) in [(0, 10), (5, 10), (10, 10), (37, 1000)] {
            let s = TrialStats::from_counts(w, t);
            assert!(s.wilson_low <= s.rate && s.rate <= s.wilson_high);
        }
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn merge_is_order_independent() {
        let a = TrialStats::from_counts(3, 10);
        let b = TrialStats::from_counts(7, 30);
        assert_eq!(a.merge(&b), b.merge(&a));
        assert_eq!(a.merge(&b), TrialStats::from_counts(10, 40));
    }

    #[test]
    fn registry_lists_every_builtin() {
        assert!(builtin_adversaries().len() >= 7);
        for info in builtin_adversaries() {
            assert!(adversary(info.name).is_ok());
        }
        assert!(matches!(adversary("nobody"), Err(GamesError::UnknownAdversary(_))));
        assert!(matches!(GameSpec::by_name("nothing"), Err(GamesError::UnknownGame(_))));
        for g in builtin_games() {
            GameSpec::by_name(g).unwrap();
        }
    }

    #[test]
    fn peeking_is_a_contract_violation() {
        let spec = GameSpec::by_name("ahb").unwrap();
        let err = run_game(&spec, &adversary("peeker").unwrap(), 4, 1).unwrap_err();
        assert!(matches!(err, GamesError::AdversaryContractViolation(_)));
    }

    #[test]
    fn mismatched_adversary_is_rejected() {
        let spec = GameSpec::by_name("tts-security").unwrap();
        assert!(matches!(
            run_game(&spec, &adversary("ahb-naive").unwrap(), 1, 1),
            Err(GamesError::AdversaryMismatch { .. })
        ));
        assert!(matches!(run_game(&spec, &Adversary::Honest, 1, 1), Err(GamesError::AdversaryMismatch { .. })));
        assert!(matches!(
            run_game(&spec, &adversary("tts-measure-then-guess").unwrap(), 0, 1),
            Err(GamesError::BadParams(_))
        ));
    }

    #[test]
    fn every_builtin_adversary_runs_in_its_game() {
        for info in builtin_adversaries() {
            if info.name == "honest" || info.name == "peeker" {
                continue;
            }
            let spec = GameSpec::by_name(info.game).unwrap();
            run_game(&spec, &adversary(info.name).unwrap(), 20, 3).unwrap();
            assert!(baseline(&spec, info.name).is_some(), "{}", info.name);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let a = run_named("tts-security", "tts-measure-then-guess", 300, 9).unwrap();
        let b = run_named("tts-security", "tts-measure-then-guess", 300, 9).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.to_table().contains("tts-measure-then-guess"));
    }

    #[test]
    fn trials_use_disjoint_ids() {
        let spec = GameSpec::by_name("ahb-amplified").unwrap();
        let adv = adversary("ahb-naive").unwrap();
        let mut all = std::collections::BTreeSet::new();
        let mut total = 0;
        for t in 0..50 {
            let o = run_trial(&spec, &adv, 5, t).unwrap();
            total += o.ids.len();
            all.extend(o.ids);
        }
        assert_eq!(all.len(), total);
    }

    #[test]
    fn correctness_games_are_perfect() {
        for g in builtin_games().iter().filter(|g| g.ends_with("correctness") || g.ends_with("kernel")) {
            let spec = GameSpec::by_name(g).unwrap();
            let stats = run_game(&spec, &Adversary::Honest, 10, 2).unwrap();
            assert_eq!(stats.wins, 10, "{g}");
        }
    }
}
