use rand::{Rng, RngCore};
use revsig::bits::BitString;
use revsig::dsrkey::{
    otk_cert, otk_del, otk_keys, otk_sign, otk_verify, ChainScheme, OtkCertificate, OtkKeyBlob, OtkSigningKey,
};
use revsig::dsrsign::{nq_keygen, nq_sign, nq_verify, NqParams};
use revsig::games::{adversary, run_game, run_named, run_trial, GameSpec};
use revsig::primitives::{CrhInstance, LamportChain, OwfInstance, SignatureScheme};
use revsig::qkernel::Registry;
use revsig::rng;
use revsig::ttoss::{oss_setup, FamilyParams, OssSignature};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Sign(bool),
    Delete,
    Export,
    Import,
}

const OPS: [Op; 5] = [Op::Sign(false), Op::Sign(true), Op::Delete, Op::Export, Op::Import];

fn traces(max_len: usize) -> Vec<Vec<Op>> {
    let mut all = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for t in &frontier {
            for op in OPS {
                let mut t2: Vec<Op> = t.clone();
                t2.push(op);
                next.push(t2);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

#[test]
fn one_time_keys_never_sign_and_revoke_the_same_bit() {
    let (pp, ck) = oss_setup(&mut rng::seeded(1), 2, &FamilyParams::KernelIdeal { width: 6 }).unwrap();
    let all = traces(6);
    assert_eq!(all.len(), (5usize.pow(7) - 1) / 4);
    let mut honest_pairs = 0;
    for (t, trace) in all.iter().enumerate() {
        let mut reg = Registry::new(t as u64);
        let (mut key, vk) = otk_keys(&mut reg, &pp).unwrap();
        let mut stored: Option<OtkKeyBlob> = None;
        let mut sigs: Vec<(bool, OssSignature)> = Vec::new();
        let mut certs: Vec<OtkCertificate> = Vec::new();
        for op in trace {
            match op {
                Op::Sign(m) => {
                    if let Ok(s) = otk_sign(&mut reg, &pp, &mut key, *m) {
                        sigs.push((*m, s));
                    }
                }
                Op::Delete => {
                    if let Ok(c) = otk_del(&mut reg, &pp, &key) {
                        certs.push(c);
                    }
                }
                Op::Export => stored = key.export(&reg).ok(),
                Op::Import => {
                    if let Some(k) = stored.as_ref().and_then(|b| OtkSigningKey::import(&mut reg, b).ok()) {
                        key = k;
                    }
                }
            }
        }
        for (m, sig) in &sigs {
            assert!(otk_verify(&pp, &vk, *m, sig).unwrap(), "{trace:?}");
            for cert in &certs {
                for excluded in [vec![], vec![!*m]] {
                    assert!(
                        !otk_cert(&pp, &vk, &ck, cert, &excluded),
                        "{trace:?} signed {m} yet revoked with {excluded:?}"
                    );
                }
                if otk_cert(&pp, &vk, &ck, cert, &[*m]) {
                    honest_pairs += 1;
                }
            }
        }
    }
    assert!(honest_pairs > 0);
}

fn perturbations(signed: &[Vec<u8>], fresh: &[u8]) -> Vec<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    for i in 0..signed.len() {
        let mut removed = signed.to_vec();
        removed.remove(i);
        out.push(removed);
        let mut replaced = signed.to_vec();
        replaced[i] = fresh.to_vec();
        out.push(replaced);
        let mut doubled = signed.to_vec();
        doubled.push(signed[i].clone());
        out.push(doubled);
    }
    let mut added = signed.to_vec();
    added.push(fresh.to_vec());
    out.push(added);
    out
}

#[test]
fn chain_revocation_checks_the_exact_multiset() {
    let (pp, ck) = oss_setup(&mut rng::seeded(2), 4, &FamilyParams::KernelIdeal { width: 10 }).unwrap();
    let scheme = ChainScheme::new(CrhInstance::new(8).unwrap());
    for trial in 0..10u64 {
        let mut reg = Registry::new(trial);
        let (mut state, vk) = scheme.keygen(&mut reg, &pp).unwrap();
        let mut signed: Vec<Vec<u8>> = Vec::new();
        for i in 0..8u8 {
            let m = if i == 3 { signed[1].clone() } else { vec![i, trial as u8, reg.rng().gen()] };
            let sig = scheme.sign(&mut reg, &pp, &mut state, &m).unwrap();
            assert!(scheme.verify(&pp, &vk, &m, &sig));
            signed.push(m);
        }
        let cert = scheme.del(&mut reg, &pp, &state).unwrap();
        assert!(scheme.cert(&pp, &vk, &ck, &cert, &signed));
        let mut shuffled = signed.clone();
        shuffled.reverse();
        assert!(scheme.cert(&pp, &vk, &ck, &cert, &shuffled));
        for s in perturbations(&signed, b"never signed") {
            assert!(!scheme.cert(&pp, &vk, &ck, &cert, &s), "accepted {s:?}");
        }
        assert!(scheme.sign(&mut reg, &pp, &mut state, b"after").is_err());
    }
}

#[test]
fn repeated_verification_leaves_states_byte_identical() {
    let mut reg = Registry::new(3);
    let owf = OwfInstance::ideal_toy(3, 12, 64).unwrap();
    let (sk, vk) = nq_keygen(&mut reg, &NqParams { n: 8, owf }).unwrap();
    for m in [false, true] {
        let (token, _) = nq_sign(&mut reg, &sk, m).unwrap();
        let snapshot = |reg: &Registry| {
            let blobs = token.export(reg).unwrap();
            let ids: Vec<_> = reg.live_ids().chain(reg.spent_ids()).collect();
            (serde_json::to_vec(&blobs).unwrap(), ids)
        };
        let before = snapshot(&reg);
        for _ in 0..10 {
            assert!(nq_verify(&mut reg, &vk, &token, m).unwrap());
            assert_eq!(snapshot(&reg), before);
        }
        assert!(!nq_verify(&mut reg, &vk, &token, !m).unwrap());
        assert_eq!(snapshot(&reg), before);
    }
}

#[test]
fn classical_chain_rejects_single_bit_perturbations() {
    let scheme = LamportChain::new(OwfInstance::ideal_toy(4, 12, 64).unwrap(), CrhInstance::new(64).unwrap());
    let mut r = rng::seeded(4);
    let (mut sk, vk) = scheme.keygen(&mut r);
    let mut sigs = Vec::new();
    for i in 0..100u32 {
        let m = i.to_be_bytes().repeat(3);
        let sig = scheme.sign(&mut sk, &mut r, &m).unwrap();
        assert!(scheme.verify(&vk, &m, &sig));
        sigs.push((m, sig));
    }
    let mut rejected = 0;
    for t in 0..1000 {
        let (m, sig) = &sigs[t % sigs.len()];
        let (mut m, mut sig) = (m.clone(), sig.clone());
        if t % 2 == 0 {
            let bit = r.gen_range(0..m.len() * 8);
            m[bit / 8] ^= 1 << (bit % 8);
        } else {
            let link = sig.links.last_mut().unwrap();
            let k = r.gen_range(0..link.sig.revealed.len());
            let x: &mut BitString = &mut link.sig.revealed[k];
            let j = r.gen_range(0..x.width());
            x.flip(j);
        }
        rejected += !scheme.verify(&vk, &m, &sig) as u32;
    }
    assert!(rejected >= 990, "{rejected}");
}

#[test]
fn games_are_deterministic_and_isolated() {
    let a = run_named("oss-security", "oss-random-phase", 500, 77).unwrap();
    let b = run_named("oss-security", "oss-random-phase", 500, 77).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let c = run_named("oss-security", "oss-random-phase", 500, 78).unwrap();
    assert_eq!(c.seed, 78);

    let spec = GameSpec::by_name("qrk-security").unwrap();
    let adv = adversary("qrk-measure-then-return").unwrap();
    let mut seen = std::collections::HashSet::new();
    for t in 0..100 {
        for id in run_trial(&spec, &adv, 1, t).unwrap().ids {
            assert!(seen.insert(id), "id {id:?} reused across trials");
        }
    }
    let whole = run_game(&spec, &adv, 100, 1).unwrap();
    let split = run_game(&spec, &adv, 100, 1).unwrap();
    assert_eq!(whole, split);
}

#[test]
fn random_messages_have_random_digests() {
    let crh = CrhInstance::new(16).unwrap();
    let mut r = rng::seeded(5);
    let mut ones = 0;
    for _ in 0..2000 {
        let mut m = [0u8; 16];
        r.fill_bytes(&mut m);
        ones += crh.hash(&m).count_ones();
    }
    let mean = ones as f64 / 2000.0;
    assert!((mean - 8.0).abs() < 0.2, "{mean}");
}
