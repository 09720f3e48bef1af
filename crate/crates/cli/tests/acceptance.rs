//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::collections::{HashMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;
use revsig::bits::BitString;
use revsig::dsrkey::ChainScheme;
use revsig::dsrsign::{nq_keygen, nq_sign, nq_verify, NqParams};
use revsig::games::{adversary, builtin_adversaries, builtin_games, run_named, GameReport, GameSpec};
use revsig::grouplight::{GroupAction, Stf};
use revsig::primitives::{CrhInstance, OwfInstance};
use revsig::qkernel::Registry;
use revsig::rng;
use revsig::ttoss::{clawfree_family, oss_setup, ClawFreePublicKey, ClawTrapdoor, FamilyParams};

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

// ---- 1: Hadamard sampler fidelity ----

/// Exact outcome probabilities by a fast Walsh-Hadamard transform of the
/// amplitude vector.
fn hadamard_distribution(x0: u64, x1: u64, phase: bool, width: usize) -> Vec<f64> {
    let mut v = vec![0.0f64; 1 << width];
    let a = std::f64::consts::FRAC_1_SQRT_2;
    v[x0 as usize] = a;
    v[x1 as usize] = if phase { -a } else { a };
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (p, q) = (v[j], v[j + h]);
                v[j] = p + q;
                v[j + h] = p - q;
            }
        }
        h *= 2;
    }
    let norm = (1u64 << width) as f64;
    v.iter().map(|amp| amp * amp / norm).collect()
}

fn sampler_tvd(reg: &mut Registry, x0: u64, x1: u64, phase: bool, width: usize, samples: usize) -> f64 {
    let mut counts = vec![0u64; 1 << width];
    for _ in 0..samples {
        let h = reg.new_pair_state(BitString::from_u64(x0, width), BitString::from_u64(x1, width), phase).unwrap();
        counts[reg.measure_hadamard(&h).unwrap().to_u64().unwrap() as usize] += 1;
    }
    let p = hadamard_distribution(x0, x1, phase, width);
    p.iter().zip(&counts).map(|(p, &k)| (p - k as f64 / samples as f64).abs()).sum::<f64>() / 2.0
}

/// Every pair state up to width 4; at widths 5 and 6 one state per
/// (difference, phase) class, which fixes the outcome distribution.
fn hadamard_fidelity() -> Outcome {
    const SAMPLES: usize = 10_000;
    let start = Instant::now();
    let mut reg = Registry::new(1);
    let mut states = Vec::new();
    for w in 1..=4usize {
        for x0 in 0..1u64 << w {
            for x1 in x0 + 1..1u64 << w {
                states.extend([(w, x0, x1, false), (w, x0, x1, true)]);
            }
        }
    }
    for w in 5..=6usize {
        for delta in 1..1u64 << w {
            let x0 = (delta * 0x9e37) % (1 << w);
            let (a, b) = (x0.min(x0 ^ delta), x0.max(x0 ^ delta));
            states.extend([(w, a, b, false), (w, a, b, true)]);
        }
    }
    let mut worst = [0.0f64; 7];
    let mut failing = [0usize; 7];
    let mut tested = [0usize; 7];
    for &(w, x0, x1, c) in &states {
        let d = sampler_tvd(&mut reg, x0, x1, c, w, SAMPLES);
        worst[w] = worst[w].max(d);
        failing[w] += (d >= 0.02) as usize;
        tested[w] += 1;
    }
    let elapsed = start.elapsed();
    let per_width: Vec<String> =
        (1..=6).map(|w| format!("l={w}: worst {:.4}, {}/{} >= 0.02", worst[w], failing[w], tested[w])).collect();
    let pass = failing.iter().all(|&f| f == 0) && within(elapsed, 10.0);
    outcome(pass, format!("{}; {:.1}s", per_width.join("; "), elapsed.as_secs_f64()))
}

// ---- 2: affine law ----

fn affine_law() -> Outcome {
    let mut reg = Registry::new(2);
    let mut r = rng::seeded(2);
    let mut exceptions = 0;
    for _ in 0..100_000 {
        let w = r.gen_range(1..=64usize);
        let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
        let x0 = r.gen::<u64>() & mask;
        let x1 = loop {
            let x = r.gen::<u64>() & mask;
            if x != x0 {
                break x;
            }
        };
        let c: bool = r.gen();
        let (a, b) = (BitString::from_u64(x0, w), BitString::from_u64(x1, w));
        let delta = a.xor(&b);
        let h = reg.new_pair_state(a, b, c).unwrap();
        let d = reg.measure_hadamard(&h).unwrap();
        exceptions += (d.dot(&delta) != c) as u32;
    }
    outcome(exceptions == 0, format!("{exceptions} exceptions in 100000"))
}

// ---- 3-7: games ----

fn correctness_games() -> Outcome {
    let start = Instant::now();
    let mut names: Vec<&str> = builtin_games().iter().copied().filter(|g| g.contains("correctness")).collect();
    names.extend(["lightning-correctness-64", "qrk-correctness-64"]);
    let mut short = Vec::new();
    for g in &names {
        let r = run_named(g, "honest", 200, 3).unwrap();
        if r.stats.wins != 200 {
            short.push(format!("{g} {}/200", r.stats.wins));
        }
    }
    let elapsed = start.elapsed();
    let detail = if short.is_empty() { format!("{} games at 200/200", names.len()) } else { short.join(", ") };
    outcome(short.is_empty() && within(elapsed, 60.0), format!("{detail}; {:.1}s", elapsed.as_secs_f64()))
}

fn sigma_band(game: &str, adversary: &str, trials: u64, target: f64) -> (bool, String) {
    let r: GameReport = run_named(game, adversary, trials, 7).unwrap();
    let sigma = (target * (1.0 - target) / trials as f64).sqrt();
    let (lo, hi) = (target - 3.0 * sigma, target + 3.0 * sigma);
    let pass = (lo..=hi).contains(&r.stats.rate);
    (pass, format!("{game}/{adversary}: {}/{} = {:.5} in [{lo:.5}, {hi:.5}]", r.stats.wins, trials, r.stats.rate))
}

fn game_criterion(runs: &[(&str, &str, u64, f64)]) -> Outcome {
    let results: Vec<(bool, String)> = runs.iter().map(|&(g, a, t, p)| sigma_band(g, a, t, p)).collect();
    let pass = results.iter().all(|r| r.0);
    outcome(pass, results.into_iter().map(|r| r.1).collect::<Vec<_>>().join("; "))
}

// ---- 8: claw-free family laws ----

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn legendre(a: u64, p: u64) -> i64 {
    let mut r = 1u64;
    let (mut base, mut e) = (a % p, (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Injective encoding and branches, equal images, inversion, and exactly one
/// claw partner per image point.
fn family_laws(pk: &ClawFreePublicKey, td: &ClawTrapdoor, xs: &[u64]) -> Result<(), String> {
    let mut seen = HashSet::new();
    let mut images: [HashMap<BitString, u64>; 2] = Default::default();
    for &x in xs {
        let j = pk.encode(x).map_err(|e| e.to_string())?;
        if pk.decode(&j) != Ok(x) || !seen.insert(j.clone()) {
            return Err(format!("encoding not injective at {x}"));
        }
        for b in [false, true] {
            let y = pk.eval(b, &j).map_err(|e| e.to_string())?;
            if td.invert(b, &y).as_ref() != Ok(&j) {
                return Err(format!("invert(f_{}({x})) != {x}", b as u8));
            }
            if !pk.check(b, &j, &y) {
                return Err(format!("check rejects f_{}({x})", b as u8));
            }
            if images[b as usize].insert(y, x).is_some() {
                return Err(format!("f_{} not injective at {x}", b as u8));
            }
        }
    }
    let (i0, i1) = (&images[0], &images[1]);
    if i0.len() != i1.len() || i0.keys().any(|y| !i1.contains_key(y)) {
        return Err("f_0 and f_1 images differ".into());
    }
    Ok(())
}

fn swapping_laws(stf: &Stf) -> Result<(), String> {
    let q = stf.public.action.order().clone();
    let mut h = BigUint::from(0u8);
    while h < q {
        for b in [false, true] {
            let moved = stf.swap(b, &h);
            if stf.public.eval(!b, &moved) != stf.public.eval(b, &h) || stf.swap(!b, &moved) != h {
                return Err(format!("swap({b}, {h})"));
            }
        }
        h += 1u8;
    }
    Ok(())
}

fn claw_free_laws() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let primes: Vec<u64> = (3..=10_000 / 3).filter(|&p| p % 4 == 3 && is_prime(p)).collect();
    let mut moduli = 0;
    for (i, &p) in primes.iter().enumerate() {
        for &q in primes[i + 1..].iter().take_while(|&&q| p * q <= 10_000) {
            moduli += 1;
            let n = p * q;
            let fam = clawfree_family(&mut rng::seeded(0), &FamilyParams::BlumPrimes { p, q }).unwrap();
            let xs: Vec<u64> =
                (1..n.div_ceil(2)).filter(|&x| gcd(x, n) == 1 && legendre(x, p) * legendre(x, q) == 1).collect();
            if xs.len() as u64 != (p - 1) * (q - 1) / 4 {
                failures.push(format!("N={n}: domain size {}", xs.len()));
            }
            if let Err(e) = family_laws(&fam.public, &fam.trapdoor, &xs) {
                failures.push(format!("N={n}: {e}"));
            }
        }
    }
    let mut r = rng::seeded(8);
    for w in 1..=10usize {
        let fam = clawfree_family(&mut r, &FamilyParams::KernelIdeal { width: w }).unwrap();
        let xs: Vec<u64> = (0..1u64 << w).collect();
        if let Err(e) = family_laws(&fam.public, &fam.trapdoor, &xs) {
            failures.push(format!("kernel-ideal w={w}: {e}"));
        }
    }
    let toy = GroupAction::toy();
    for s0 in toy.orbit(toy.generator()) {
        for g in 1u8..5 {
            if let Err(e) = swapping_laws(&Stf::from_parts(toy.clone(), s0.clone(), BigUint::from(g))) {
                failures.push(format!("toy action: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && within(elapsed, 5.0);
    let detail = format!(
        "{moduli} Blum moduli, kernel-ideal w<=10, toy swapping; {} failures; {:.1}s",
        failures.len(),
        elapsed.as_secs_f64()
    );
    outcome(pass, failures.first().map_or(detail.clone(), |f| format!("{detail}; first: {f}")))
}

// ---- 9: chain scheme end to end ----

fn multiset_perturbations(signed: &[Vec<u8>]) -> Vec<Vec<Vec<u8>>> {
    let fresh = b"never signed".to_vec();
    let mut out = Vec::new();
    for i in 0..signed.len() {
        let mut removed = signed.to_vec();
        removed.remove(i);
        out.push(removed);
        let mut replaced = signed.to_vec();
        replaced[i] = fresh.clone();
        out.push(replaced);
        let mut doubled = signed.to_vec();
        doubled.push(signed[i].clone());
        out.push(doubled);
    }
    let mut added = signed.to_vec();
    added.push(fresh);
    out.push(added);
    out
}

fn chain_end_to_end() -> Outcome {
    let (pp, ck) = oss_setup(&mut rng::seeded(9), 8, &FamilyParams::KernelIdeal { width: 10 }).unwrap();
    let scheme = ChainScheme::new(CrhInstance::new(8).unwrap());
    let mut good = 0;
    let mut rejected = 0;
    let mut perturbed = 0;
    for trial in 0..100u64 {
        let mut reg = Registry::new(900 + trial);
        let (mut state, vk) = scheme.keygen(&mut reg, &pp).unwrap();
        let mut signed = Vec::new();
        let mut verified = true;
        for i in 0..8u8 {
            let m = vec![i, trial as u8, reg.rng().gen()];
            let sig = scheme.sign(&mut reg, &pp, &mut state, &m).unwrap();
            verified &= scheme.verify(&pp, &vk, &m, &sig);
            signed.push(m);
        }
        let cert = scheme.del(&mut reg, &pp, &state).unwrap();
        good += (verified && scheme.cert(&pp, &vk, &ck, &cert, &signed)) as u32;
        for s in multiset_perturbations(&signed) {
            perturbed += 1;
            rejected += !scheme.cert(&pp, &vk, &ck, &cert, &s) as u32;
        }
    }
    outcome(
        good == 100 && rejected == perturbed,
        format!("{good}/100 honest accepted; {rejected}/{perturbed} perturbations rejected"),
    )
}

// ---- 10: non-destructive verification ----

fn nondestructive_verification() -> Outcome {
    let mut reg = Registry::new(10);
    let owf = OwfInstance::ideal_toy(10, 12, 64).unwrap();
    let (sk, vk) = nq_keygen(&mut reg, &NqParams { n: 8, owf }).unwrap();
    let mut changed = 0;
    let mut accepted = 0;
    for m in [false, true] {
        let (token, _) = nq_sign(&mut reg, &sk, m).unwrap();
        let snapshot = |reg: &Registry| serde_json::to_vec(&token.export(reg).unwrap()).unwrap();
        let before = snapshot(&reg);
        for _ in 0..10 {
            accepted += nq_verify(&mut reg, &vk, &token, m).unwrap() as u32;
            changed += (snapshot(&reg) != before) as u32;
        }
    }
    outcome(changed == 0 && accepted == 20, format!("{accepted}/20 accepted; {changed} state changes"))
}

// ---- 11: determinism ----

fn cli(args: &[&str]) -> (i32, String) {
    let mut argv = vec!["revsig"];
    argv.extend(args);
    revsig_cli::run(argv)
}

fn determinism() -> Outcome {
    let mut runs: Vec<Vec<String>> = ["tts", "lightning", "qrk"]
        .iter()
        .map(|d| vec!["--seed".into(), "11".into(), d.to_string(), "demo".into()])
        .collect();
    for g in builtin_games() {
        let spec = GameSpec::by_name(g).unwrap();
        for a in builtin_adversaries() {
            if spec.accepts(&adversary(a.name).unwrap()) {
                runs.push(
                    ["--seed", "11", "games", "run", g, "--adversary", a.name, "--trials", "200"]
                        .map(String::from)
                        .to_vec(),
                );
            }
        }
    }
    let mut differing = Vec::new();
    for args in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (cli(&args), cli(&args));
        if a != b {
            differing.push(args[2..].join(" "));
        }
    }
    outcome(differing.is_empty(), format!("{} reruns, {} differ: {differing:?}", runs.len(), differing.len()))
}

fn main() -> ExitCode {
    let n8 = 1.0 / 256.0;
    let criteria: Vec<Criterion> = vec![
        ("Hadamard sampler fidelity", Box::new(hadamard_fidelity)),
        ("exact affine law", Box::new(affine_law)),
        ("honest correctness", Box::new(correctness_games)),
        ("single-copy AHB baseline", Box::new(|| game_criterion(&[("ahb", "ahb-naive", 10_000, 0.5)]))),
        (
            "amplified AHB baseline",
            Box::new(|| game_criterion(&[("ahb-amplified", "ahb-naive", 50_000, 1.0 / 1024.0)])),
        ),
        (
            "one-shot and tokenized security baselines",
            Box::new(move || {
                game_criterion(&[
                    ("tts-security", "tts-measure-then-guess", 20_000, n8),
                    ("oss-security", "oss-random-phase", 20_000, n8),
                ])
            }),
        ),
        (
            "revocation cheat detection",
            Box::new(move || game_criterion(&[("qrk-security", "qrk-measure-then-return", 20_000, n8)])),
        ),
        ("claw-free family laws", Box::new(claw_free_laws)),
        ("chain scheme end to end", Box::new(chain_end_to_end)),
        ("non-destructive verification", Box::new(nondestructive_verification)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        failed += !o.pass as u32;
        println!(
            "criterion {:>2} {} {name} ({:.1}s): {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() as u32 - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
