//! Self-contained demo flows and the games runner. Demos keep everything in
//! memory and report each step next to the outcome it should have.

use revsig::games::{builtin_adversaries, builtin_games, run_named};
use revsig::grouplight::{
    ql_del, ql_fullver, ql_semiver, ql_stategen, qrk_cert, qrk_keygen, qrk_setup, qrk_sign, qrk_verify, Stf,
};
use revsig::qkernel::Registry;
use revsig::rng;
use revsig::tts::{self, TtsSignature};
use serde_json::{json, Value};

use crate::params::Params;
use crate::{emit, CliError, Common, Report};

/// Demo steps and whether each went as expected.
struct Steps {
    steps: Vec<Value>,
    all_expected: bool,
}

impl Steps {
    fn new() -> Self {
        Self { steps: Vec::new(), all_expected: true }
    }

    fn check(&mut self, step: &str, expected: bool, observed: bool) {
        self.all_expected &= expected == observed;
        self.steps.push(json!({ "step": step, "expected": expected, "observed": observed }));
    }

    /// Records an operation that must be refused.
    fn refused<T, E: std::fmt::Display>(&mut self, step: &str, r: Result<T, E>) {
        let error = r.err().map(|e| e.to_string());
        self.all_expected &= error.is_some();
        self.steps.push(json!({ "step": step, "expected": "error", "observed": error }));
    }

    fn report(self, command: &str, extra: Value) -> Report {
        Report::verdict(
            self.all_expected,
            json!({ "command": command, "setup": extra, "steps": self.steps, "all_expected": self.all_expected }),
        )
    }
}

fn demo_registry(seed: u64) -> Registry {
    Registry::from_rng(rng::derived(seed, 1))
}

pub fn tts(c: &Common) -> Result<Report, CliError> {
    let params = Params::load(c.params.as_deref())?;
    let owf = params.owf(c.seed)?;
    let mut reg = demo_registry(c.seed);
    let (sk, pk) = tts::keygen(&mut reg, params.n, &owf)?;
    let mut s = Steps::new();

    let first = tts::stategen(&mut reg, &sk)?;
    let sig0 = tts::sign(&mut reg, &first, false)?;
    s.check("token 1 signs 0, public check", true, tts::ver0(&pk, &sig0)?);
    let second = tts::stategen(&mut reg, &sk)?;
    let sig1 = tts::sign(&mut reg, &second, true)?;
    s.check("token 2 signs 1, secret check", true, tts::ver1(&sk, &sig1)?);
    s.refused("token 1 signs again", tts::sign(&mut reg, &first, true));

    let third = tts::stategen(&mut reg, &sk)?;
    let honest = tts::sign(&mut reg, &third, false)?;
    let guess = TtsSignature { message: true, payload: honest.payload };
    s.check("measured token passed off as a signature on 1", false, tts::ver1(&sk, &guess)?);

    Ok(s.report("tts demo", json!({ "n": params.n, "owf": owf })))
}

fn stf(c: &Common, params: &Params) -> Result<Stf, CliError> {
    Ok(qrk_setup(&mut rng::derived(c.seed, 0), params.group_action(c.seed)?))
}

pub fn lightning(c: &Common) -> Result<Report, CliError> {
    let params = Params::load(c.params.as_deref())?;
    let sk = stf(c, &params)?;
    let mut reg = demo_registry(c.seed);
    let mut s = Steps::new();

    let (kept, kept_serial) = ql_stategen(&mut reg, &sk, params.n)?;
    let (bolt, serial) = ql_stategen(&mut reg, &sk, params.n)?;
    let cert = ql_del(&mut reg, &bolt)?;
    s.check("deletion certificate, public check", true, ql_semiver(&sk.public, &serial, &cert));
    s.check("certificate checked against another serial", false, ql_semiver(&sk.public, &kept_serial, &cert));
    s.refused("full verification after deletion", ql_fullver(&mut reg, &sk, &serial, &bolt));
    s.check("state checked against another serial", false, ql_fullver(&mut reg, &sk, &serial, &kept)?);

    let (fresh, fresh_serial) = ql_stategen(&mut reg, &sk, params.n)?;
    s.check("full verification of a fresh state", true, ql_fullver(&mut reg, &sk, &fresh_serial, &fresh)?);

    Ok(s.report("lightning demo", json!({ "n": params.n, "public": sk.public, "serial": serial })))
}

pub fn qrk(c: &Common) -> Result<Report, CliError> {
    let params = Params::load(c.params.as_deref())?;
    let sk = stf(c, &params)?;
    let mut reg = demo_registry(c.seed);
    let mut s = Steps::new();

    let (mut key, vk) = qrk_keygen(&mut reg, &sk, params.n)?;
    let sig = qrk_sign(&mut reg, &mut key, false)?;
    s.check("signature on 0 verifies", true, qrk_verify(&vk, false, &sig));
    s.check("signature on 0 passed off for 1", false, qrk_verify(&vk, true, &sig));
    s.refused("second signature from a one-time key", qrk_sign(&mut reg, &mut key, true));
    s.check("revocation claiming 1 was signed", false, qrk_cert(&mut reg, &sk, &vk, &key, &[true])?);
    s.check("revocation claiming 0 and 1 were signed", false, qrk_cert(&mut reg, &sk, &vk, &key, &[false, true])?);
    s.check("revocation claiming 0 was signed", true, qrk_cert(&mut reg, &sk, &vk, &key, &[false])?);

    Ok(s.report("qrk demo", json!({ "n": params.n, "vk": vk })))
}

pub fn game(c: &Common, name: &str, adversary: &str, trials: u64) -> Result<Report, CliError> {
    let report = run_named(name, adversary, trials, c.seed)?;
    let pass = report.check.as_ref().is_none_or(|k| k.pass);
    let body = emit(c, serde_json::to_value(&report).expect("json"))?;
    Ok(Report::verdict(pass, body))
}

pub fn list_games() -> Result<Report, CliError> {
    Ok(Report::ok(json!({ "games": builtin_games(), "adversaries": builtin_adversaries() })))
}
