//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use pqpki_bench::{grover_adjust, mosca_check, reference_table, shor_resource_estimate, MoscaParams, MoscaVerdict};
use pqpki_core::cert::{
    self_sign_root, validate_chain, Certificate, CertificateAuthority, CertificateSigningRequest, Extension,
    IssueProfile, KeyUsage, Role, SubjectInfo, ValidationPolicy,
};
use pqpki_core::enrollment::{
    provision_device, run_enrollment, run_scenario, setup_hierarchy, AdversaryConfig, AttackOutcome, EnrollmentOptions,
    EnrollmentOutcome, ScenarioConfig, SessionProtection,
};
use pqpki_core::revocation::{
    issue_revocation_list, AccessControlList, Permission, Reason, RevocationEntry, RevocationList, RevocationSlot,
    Scope,
};
use pqpki_core::sig::DlGroup;
use pqpki_core::{keygen, verify, Error, KeyPair, SchemeDescriptor, SchemeId, SeedSource, SignatureValue};
use rand::Rng;

const NOW: u64 = 1_700_000_000;
const GOLDEN: &str = include_str!("../../bench/data/reference_tables.csv");

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let held: bool = $cond;
        if !held {
            return Err(format!($($msg)+));
        }
    };
}

fn toy() -> SchemeDescriptor {
    SchemeDescriptor::toy_dl(DlGroup::standard())
}

fn hybrid(h: u8) -> SchemeDescriptor {
    SchemeDescriptor::hybrid(toy(), SchemeDescriptor::xmss(16, 4, h).unwrap()).unwrap()
}

fn key(d: &SchemeDescriptor, rng: &mut SeedSource) -> KeyPair {
    keygen(d, rng).unwrap()
}

/// Flips one bit somewhere in the signature's payload bytes, components
/// included.
fn flip_signature_bit(sig: &mut SignatureValue, rng: &mut SeedSource) {
    let mut leaves: Vec<&mut Vec<u8>> = Vec::new();
    fn collect<'a>(s: &'a mut SignatureValue, out: &mut Vec<&'a mut Vec<u8>>) {
        if !s.payload.is_empty() {
            out.push(&mut s.payload);
        }
        for c in s.components.iter_mut().flatten() {
            collect(c, out);
        }
    }
    collect(sig, &mut leaves);
    let total: usize = leaves.iter().map(|p| p.len() * 8).sum();
    let mut bit = rng.gen_range(0..total);
    for p in leaves {
        if bit < p.len() * 8 {
            p[bit / 8] ^= 1 << (bit % 8);
            return;
        }
        bit -= p.len() * 8;
    }
}

fn criterion_1() -> Verdict {
    let started = Instant::now();
    let schemes = [
        toy(),
        SchemeDescriptor::wots(32, 16).unwrap(),
        SchemeDescriptor::xmss(16, 16, 4).unwrap(),
        SchemeDescriptor::hybrid(toy(), SchemeDescriptor::xmss(16, 16, 4).unwrap()).unwrap(),
    ];
    let mut rng = SeedSource::from_u64(1);
    for d in &schemes {
        let (mut round_trips, mut rejected) = (0, 0);
        let mut current: Option<KeyPair> = None;
        for i in 0..1000u32 {
            if current.as_ref().is_none_or(|k| k.remaining() == Some(0)) {
                current = Some(key(d, &mut rng));
            }
            let k = current.as_ref().unwrap();
            let msg: Vec<u8> = (0..rng.gen_range(1..64)).map(|_| rng.gen()).collect();
            let sig = k.sign(&msg).unwrap();
            round_trips += verify(k.public_key(), d, &msg, &sig).unwrap() as u32;
            let (mut m2, mut s2) = (msg.clone(), sig.clone());
            if i % 2 == 0 {
                flip_signature_bit(&mut s2, &mut rng);
            } else {
                let bit = rng.gen_range(0..m2.len() * 8);
                m2[bit / 8] ^= 1 << (bit % 8);
            }
            rejected += !verify(k.public_key(), d, &m2, &s2).unwrap() as u32;
        }
        ensure!(
            round_trips == 1000 && rejected == 1000,
            "{d}: {round_trips}/1000 verified, {rejected}/1000 mutations rejected"
        );
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("4 schemes x 1000 round trips and 1000 mutations in {:.1} s", elapsed.as_secs_f64()))
}

/// Chain lengths counted digit by digit, without the library.
fn oracle_len(n: usize, w: usize) -> usize {
    let log_w = w.trailing_zeros() as usize;
    let len1 = (8 * n).div_ceil(log_w);
    let (mut len2, mut v) = (0, len1 * (w - 1));
    while v > 0 {
        v /= w;
        len2 += 1;
    }
    len1 + len2
}

fn criterion_2() -> Verdict {
    let mut rng = SeedSource::from_u64(2);
    let wots_expected = oracle_len(32, 16) * 32;
    let xmss_expected = 4 + 32 + wots_expected + 10 * 32;
    ensure!(wots_expected == 2144 && xmss_expected == 2500, "oracle gives {wots_expected}/{xmss_expected}");
    let w = key(&SchemeDescriptor::wots(32, 16).unwrap(), &mut rng).sign(b"size").unwrap().payload.len();
    let x = key(&SchemeDescriptor::xmss(32, 16, 10).unwrap(), &mut rng).sign(b"size").unwrap().payload.len();
    ensure!(w == wots_expected && x == xmss_expected, "measured WOTS+ {w}, XMSS {x}");
    Ok(format!("WOTS+ n=32 w=16: {w} bytes, XMSS h=10: {x} bytes"))
}

fn criterion_3() -> Verdict {
    let mut rng = SeedSource::from_u64(3);
    let root_keys = Arc::new(key(&hybrid(3), &mut rng));
    let root_cert = self_sign_root(&root_keys, SubjectInfo::new("Root", Role::Maintainer), 1 << 30, NOW).unwrap();
    let root = CertificateAuthority::new(root_keys, root_cert);
    let line_keys = Arc::new(key(&hybrid(7), &mut rng));
    let line_csr = CertificateSigningRequest::create(
        SubjectInfo::new("Line", Role::ProductionLine),
        &[&line_keys],
        KeyUsage::SignCerts,
        None,
    )
    .unwrap();
    let line =
        CertificateAuthority::new(line_keys, root.issue(&line_csr, &IssueProfile::sub_ca(1 << 28), NOW).unwrap());
    let device_keys = key(&hybrid(7), &mut rng);
    let policy = ValidationPolicy::new(root.cert.clone(), NOW + 10);
    let mut rejected = 0;
    for i in 0..100 {
        let csr = CertificateSigningRequest::create(
            SubjectInfo::device("dev", format!("M{}", i % 7), format!("SN{i}")),
            &[&device_keys],
            KeyUsage::SignData,
            None,
        )
        .unwrap();
        let cert = line.issue(&csr, &IssueProfile::end_entity(3600).hybrid_required(true), NOW).unwrap();
        ensure!(
            cert.body.extensions.iter().any(|e| *e == Extension::HybridRequired(true)),
            "cert {i} is not hybrid-required"
        );
        let intact = [cert.clone(), line.cert.clone(), root.cert.clone()];
        ensure!(validate_chain(&intact, &policy).unwrap().is_ok(), "intact chain {i} fails");
        let mut stripped = cert;
        stripped.signatures.retain(|s| s.scheme_id != SchemeId::XmssMt);
        let chain = [stripped, line.cert.clone(), root.cert.clone()];
        rejected += !validate_chain(&chain, &policy).unwrap().is_ok() as u32;
    }
    ensure!(rejected == 100, "{rejected}/100 stripped chains rejected");
    Ok("100/100 chains with the post-quantum signature stripped rejected".into())
}

fn criterion_4() -> Verdict {
    let mut rng = SeedSource::from_u64(4);
    let h = 4;
    let k = key(&SchemeDescriptor::xmss(16, 16, h).unwrap(), &mut rng);
    let mut indices = BTreeSet::new();
    let mut exhausted = 0;
    for i in 0..(1u32 << h) + 1 {
        match k.sign(&i.to_be_bytes()) {
            Ok(sig) => {
                indices.insert(sig.leaf_index.unwrap());
            }
            Err(Error::StateExhausted { .. }) => exhausted += 1,
            Err(e) => return Err(format!("unexpected {e}")),
        }
    }
    ensure!(indices.len() == 1 << h && exhausted == 1, "{} distinct indices, {exhausted} exhausted", indices.len());

    let d = SchemeDescriptor::xmss(16, 4, 2).unwrap();
    for trial in 0..1000 {
        let k = Arc::new(key(&d, &mut rng));
        let released: Vec<u32> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..16u8)
                .map(|t| {
                    let k = Arc::clone(&k);
                    s.spawn(move || k.sign(&[t]).ok().and_then(|sig| sig.leaf_index))
                })
                .collect();
            handles.into_iter().filter_map(|h| h.join().unwrap()).collect()
        });
        let distinct: BTreeSet<_> = released.iter().collect();
        ensure!(distinct.len() == released.len() && released.len() == 4, "trial {trial}: released {released:?}");
    }
    Ok(format!(
        "{} sign attempts gave {} indices and 1 StateExhausted; 1000 trials of 16 signers without reuse",
        (1 << h) + 1,
        1 << h
    ))
}

fn criterion_5() -> Verdict {
    let h = setup_hierarchy(5).unwrap();
    let mut rng = SeedSource::from_u64(5);
    let mut device = provision_device(&h, "M1", "SN-HAPPY", &mut rng).unwrap();
    let t = run_enrollment(&h, &mut device, &mut AdversaryConfig::default(), &EnrollmentOptions::default()).unwrap();
    ensure!(t.outcome == EnrollmentOutcome::Success, "happy path gave {}", t.outcome);
    let cert = t.issued_certificate.clone().unwrap();
    let chain = [cert, h.production_line.certificate.clone().unwrap(), h.root_certificate().clone()];
    let mut policy = ValidationPolicy::new(h.root_certificate().clone(), h.now);
    policy.require_hybrid = true;
    ensure!(validate_chain(&chain, &policy).unwrap().is_ok(), "issued chain does not validate to the root");

    let mut successes = 0;
    for run in 0..100u64 {
        let mut device = provision_device(&h, "M1", &format!("SN-T{run}"), &mut SeedSource::from_u64(run)).unwrap();
        let mut adversary = AdversaryConfig { modify_probability: 1.0, random_seed: run, ..Default::default() };
        let options = EnrollmentOptions { seed: run, ..Default::default() };
        let t = run_enrollment(&h, &mut device, &mut adversary, &options).unwrap();
        successes += (t.outcome == EnrollmentOutcome::Success) as u32;
    }
    ensure!(successes == 0, "{successes}/100 tampered runs succeeded");

    let mut device = provision_device(&h, "M1", "SN-SUB", &mut rng).unwrap();
    let mut adversary = AdversaryConfig { substitute_frontend: true, ..Default::default() };
    let t = run_enrollment(&h, &mut device, &mut adversary, &EnrollmentOptions::default()).unwrap();
    ensure!(t.outcome == EnrollmentOutcome::PinningMismatch, "substitution gave {}", t.outcome);
    Ok("happy path SUCCESS and validates; 0/100 SUCCESS at modify=1; substitution PINNING_MISMATCH".into())
}

fn criterion_6() -> Verdict {
    let q_bits = 64 - DlGroup::breakable().q.leading_zeros();
    ensure!(q_bits == 21, "breakable subgroup order has {q_bits} bits");
    let recorded = |protection| {
        let config = ScenarioConfig {
            seed: 6,
            protection,
            adversary: AdversaryConfig { record_for_later: true, ..Default::default() },
            ..Default::default()
        };
        run_scenario(&config).unwrap().attack.unwrap()
    };
    let classical = recorded(SessionProtection::Classical);
    ensure!(classical.outcome == AttackOutcome::Recovered, "classical session: {}", classical.outcome);
    ensure!(classical.elapsed < Duration::from_secs(10), "recovery took {:?}", classical.elapsed);
    let hybrid = recorded(SessionProtection::Hybrid);
    ensure!(hybrid.outcome == AttackOutcome::Infeasible, "hybrid session: {}", hybrid.outcome);
    Ok(format!("classical recovered in {:.1} ms; hybrid INFEASIBLE", classical.elapsed.as_secs_f64() * 1e3))
}

fn criterion_7() -> Verdict {
    let mut rng = SeedSource::from_u64(7);
    let acl = AccessControlList::standard();
    let root_keys = Arc::new(key(&hybrid(5), &mut rng));
    let root_cert = self_sign_root(&root_keys, SubjectInfo::new("Root", Role::Maintainer), 1 << 30, NOW).unwrap();
    let root = CertificateAuthority::new(root_keys, root_cert);
    let line_keys = Arc::new(key(&toy(), &mut rng));
    let line_csr = CertificateSigningRequest::create(
        SubjectInfo::new("Line", Role::ProductionLine),
        &[&line_keys],
        KeyUsage::SignCerts,
        None,
    )
    .unwrap();
    let line_cert = root.issue(&line_csr, &IssueProfile::sub_ca(1 << 28).hybrid_required(false), NOW).unwrap();
    let line = CertificateAuthority::new(line_keys, line_cert);
    let device_keys = key(&toy(), &mut rng);
    let corpus: Vec<Certificate> = (0..500)
        .map(|i| {
            let subject = SubjectInfo::device("dev", format!("MODEL-{}", i % 10), format!("SN{i}"));
            let csr = CertificateSigningRequest::create(subject, &[&device_keys], KeyUsage::SignData, None).unwrap();
            line.issue(&csr, &IssueProfile::end_entity(3600), NOW).unwrap()
        })
        .collect();
    let target = "MODEL-3";
    let entry =
        RevocationEntry { scope: Scope::DeviceModel(target.into()), reason: Reason::Compromise, revoked_at: NOW };
    let rl = issue_revocation_list(&root.keys, &root.cert, &acl, 0, vec![entry], NOW).unwrap();
    ensure!(rl.verify(&root.cert).is_valid(), "scoped list does not verify");
    let hits: Vec<_> = corpus.iter().filter(|c| rl.is_revoked(c)).map(|c| *c.serial()).collect();
    let oracle: Vec<_> =
        corpus.iter().filter(|c| c.subject().device_model.as_deref() == Some(target)).map(|c| *c.serial()).collect();
    ensure!(hits == oracle && hits.len() == 50, "{} matched, oracle {}", hits.len(), oracle.len());

    let lists: Vec<RevocationList> =
        (0..11).map(|v| issue_revocation_list(&root.keys, &root.cert, &acl, v, Vec::new(), NOW).unwrap()).collect();
    let slot = RevocationSlot::new(root.cert.clone());
    slot.offer(&lists[10]).unwrap();
    let mut rollbacks = 0;
    for _ in 0..100 {
        let older = &lists[rng.gen_range(0..lists.len())];
        rollbacks += matches!(slot.offer(older), Err(Error::RollbackRejected { .. })) as u32;
    }
    ensure!(rollbacks == 100 && slot.version() == 11, "{rollbacks}/100 rollbacks rejected, slot at {}", slot.version());

    let mut rogue_acl = AccessControlList::empty();
    rogue_acl.grant(Role::Maintainer, Permission::IssueRl).unwrap();
    let mut foreign = 0;
    for i in 0..100u64 {
        let k = key(&toy(), &mut rng);
        let impostor = self_sign_root(&k, root.cert.subject().clone(), 1 << 30, NOW).unwrap();
        let rl = issue_revocation_list(&k, &impostor, &rogue_acl, 100 + i, Vec::new(), NOW).unwrap();
        foreign += slot.offer(&rl).is_err() as u32;
    }
    ensure!(foreign == 100 && slot.version() == 11, "{foreign}/100 non-root lists rejected");
    Ok("model scope exact over 500 certs; 100/100 rollbacks and 100/100 non-root lists rejected".into())
}

fn criterion_8() -> Verdict {
    let out =
        Command::new(env!("CARGO_BIN_EXE_pqpki")).args(["bench", "reference"]).output().map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "exit {:?}", out.status);
    ensure!(out.stdout == GOLDEN.as_bytes(), "output differs from the golden file");
    let rows = reference_table();
    let falcon = rows.iter().find(|r| r.algorithm == "Falcon" && r.variant == "n=768").ok_or("no Falcon row")?;
    ensure!(
        falcon.classical_bits == [195.0]
            && falcon.quantum_bits == [172.0]
            && falcon.public_key_bytes == 1441.0
            && falcon.secret_key_bytes == 6145.0,
        "Falcon row {falcon:?}"
    );
    let dilithium = rows.iter().find(|r| r.variant == "Very high").ok_or("no Dilithium row")?;
    ensure!(
        (dilithium.keygen_micros, dilithium.sign_micros, dilithium.verify_micros) == (88.0, 203.0, 89.0),
        "Dilithium row {dilithium:?}"
    );
    Ok(format!("{} bytes identical to the golden CSV", out.stdout.len()))
}

fn criterion_9() -> Verdict {
    let m = |x, y, z| {
        mosca_check(&MoscaParams { secrecy_lifetime_years: x, migration_years: y, quantum_break_years: z }).unwrap()
    };
    ensure!(m(5.0, 3.0, 7.0) == MoscaVerdict::AtRisk, "mosca(5,3,7)");
    ensure!(m(3.0, 4.0, 7.0) == MoscaVerdict::SafeMargin(0.0), "mosca boundary");
    ensure!(grover_adjust(256).unwrap() == 128, "grover(256)");
    let q = shor_resource_estimate(2048).unwrap().logical_qubits;
    ensure!((q - 6189.056).abs() <= 0.01, "logical qubits {q}");
    Ok(format!("AT_RISK, SAFE_MARGIN(0), 128, {q:.3} logical qubits"))
}

fn criterion_10() -> Verdict {
    let mut rng = SeedSource::from_u64(10);
    let acl = AccessControlList::standard();
    // 2001 root signatures in total, within the 2^11 one-time keys.
    let ca_keys = Arc::new(key(&hybrid(11), &mut rng));
    let ca_cert = self_sign_root(&ca_keys, SubjectInfo::new("Root", Role::Maintainer), 1 << 30, NOW).unwrap();
    let ca = CertificateAuthority::new(ca_keys, ca_cert);
    let pq = key(&SchemeDescriptor::xmss(16, 4, 11).unwrap(), &mut rng);
    let legacy: Vec<KeyPair> = (0..4).map(|_| key(&toy(), &mut rng)).collect();
    for i in 0..1000u64 {
        let role = Role::ALL[rng.gen_range(0..Role::ALL.len())];
        let subject = if role == Role::Device {
            SubjectInfo::device(
                format!("d{i}"),
                format!("M{}", rng.gen_range(0..50)),
                format!("SN{}", rng.gen::<u32>()),
            )
        } else {
            SubjectInfo::new(format!("party {i}"), role)
        };
        let mut keys = vec![&legacy[rng.gen_range(0..legacy.len())]];
        if rng.gen_bool(0.3) {
            keys.push(&pq);
        }
        let usage = [KeyUsage::SignData, KeyUsage::Attest][rng.gen_range(0..2)];
        let csr = CertificateSigningRequest::create(subject, &keys, usage, None).unwrap();
        let bytes = csr.encode().unwrap();
        ensure!(
            CertificateSigningRequest::decode(&bytes).unwrap().encode().unwrap() == bytes,
            "CSR {i} re-encodes differently"
        );

        let mut profile = IssueProfile::end_entity(rng.gen_range(1..1 << 30));
        profile.hybrid_required = keys.len() > 1 && rng.gen_bool(0.5);
        if rng.gen_bool(0.3) {
            profile.service_zone_state = Some(format!("zone-{}", rng.gen::<u16>()));
        }
        let cert = ca.issue(&csr, &profile, NOW + i).unwrap();
        let bytes = cert.encode().unwrap();
        ensure!(
            Certificate::decode(&bytes).unwrap().encode().unwrap() == bytes,
            "certificate {i} re-encodes differently"
        );

        let entries = (0..rng.gen_range(0..5))
            .map(|_| {
                let scope = match rng.gen_range(0..3) {
                    0 => Scope::Serial(rng.gen()),
                    1 => Scope::DeviceModel(format!("M{}", rng.gen_range(0..50))),
                    _ => Scope::Ca(ca.cert.subject().clone()),
                };
                let reason = [Reason::Compromise, Reason::ExpiryPolicy, Reason::Superseded][rng.gen_range(0..3)];
                RevocationEntry { scope, reason, revoked_at: NOW + rng.gen_range(0..1000) }
            })
            .collect();
        let rl = issue_revocation_list(&ca.keys, &ca.cert, &acl, i, entries, NOW).unwrap();
        let bytes = rl.encode();
        ensure!(
            RevocationList::decode(&bytes).unwrap().encode() == bytes,
            "revocation list {i} re-encodes differently"
        );
    }
    Ok("1000 certificates, 1000 CSRs and 1000 revocation lists re-encode byte for byte".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("signature correctness", criterion_1),
        ("size exactness", criterion_2),
        ("hybrid downgrade", criterion_3),
        ("XMSS state safety", criterion_4),
        ("enrollment simulation", criterion_5),
        ("store-now-decrypt-later", criterion_6),
        ("revocation scoping", criterion_7),
        ("reference data fidelity", criterion_8),
        ("calculators", criterion_9),
        ("format stability", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
