use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use pqpki_core::cert::{
    pin_digest, self_sign_root, validate_chain, AttestationEvidence, Certificate, CertificateAuthority,
    CertificateBody, CertificateSigningRequest, CsrBody, Extension, Extensions, Failure, IssueProfile, KeyUsage,
    PublicKeyEntry, Role, SubjectInfo, ValidationPolicy, CERT_VERSION,
};
use pqpki_core::revocation::{Reason, RevocationEntry, RevocationList, RevocationListBody, Scope};
use pqpki_core::sig::DlGroup;
use pqpki_core::{keygen, KeyPair, SchemeDescriptor, SeedSource, SignatureValue};
use proptest::prelude::*;
use rand::Rng;

const NOW: u64 = 1_700_000_000;

struct Pool {
    keys: Vec<KeyPair>,
    pq_signatures: Vec<SignatureValue>,
}

fn pool() -> &'static Pool {
    static POOL: OnceLock<Pool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut rng = SeedSource::from_u64(99);
        let descs = [
            SchemeDescriptor::toy_dl(DlGroup::standard()),
            SchemeDescriptor::toy_dl(DlGroup::breakable()),
            SchemeDescriptor::wots(16, 16).unwrap(),
            SchemeDescriptor::xmss(16, 4, 3).unwrap(),
            SchemeDescriptor::hybrid(
                SchemeDescriptor::toy_dl(DlGroup::standard()),
                SchemeDescriptor::xmss(16, 4, 3).unwrap(),
            )
            .unwrap(),
        ];
        let keys: Vec<KeyPair> = descs.iter().map(|d| keygen(d, &mut rng).unwrap()).collect();
        let pq = keygen(&SchemeDescriptor::xmss(16, 4, 3).unwrap(), &mut rng).unwrap();
        let pq_signatures = (0..8).map(|i| pq.sign(&[i]).unwrap()).collect();
        Pool { keys, pq_signatures }
    })
}

fn text(rng: &mut SeedSource) -> String {
    let len = rng.gen_range(1..24);
    (0..len).map(|_| char::from(rng.gen_range(b' '..=b'~'))).collect()
}

fn subject(rng: &mut SeedSource) -> SubjectInfo {
    let role = Role::ALL[rng.gen_range(0..Role::ALL.len())];
    if role == Role::Device {
        SubjectInfo::device(text(rng), text(rng), text(rng))
    } else {
        let mut s = SubjectInfo::new(text(rng), role);
        if rng.gen_bool(0.3) {
            s.device_model = Some(text(rng));
        }
        s
    }
}

fn key_entries(rng: &mut SeedSource) -> Vec<PublicKeyEntry> {
    let keys = &pool().keys;
    let usage = [KeyUsage::SignCerts, KeyUsage::SignData, KeyUsage::Attest][rng.gen_range(0..3)];
    (0..rng.gen_range(1..=3))
        .flat_map(|_| PublicKeyEntry::from_key(&keys[rng.gen_range(0..keys.len())], usage))
        .collect()
}

fn signatures(rng: &mut SeedSource, body: &[u8]) -> Vec<SignatureValue> {
    let mut sigs = vec![pool().keys[0].sign(body).unwrap()];
    if rng.gen_bool(0.5) {
        let pq = &pool().pq_signatures;
        sigs.push(pq[rng.gen_range(0..pq.len())].clone());
    }
    sigs
}

fn random_certificate(seed: u64) -> Certificate {
    let mut rng = SeedSource::from_u64(seed);
    let public_keys = key_entries(&mut rng);
    let mut extensions = Extensions::new();
    extensions.insert(Extension::PathLen(rng.gen_range(0..4)));
    if public_keys.iter().any(|k| !k.quantum_vulnerable()) && rng.gen_bool(0.5) {
        extensions.insert(Extension::HybridRequired(true));
    }
    if rng.gen_bool(0.5) {
        extensions.insert(Extension::AttestationDigest(rng.bytes()));
    }
    if rng.gen_bool(0.5) {
        extensions.insert(Extension::ServiceZoneState(text(&mut rng)));
    }
    if rng.gen_bool(0.3) {
        let len = rng.gen_range(0..40);
        extensions.insert(Extension::DeviceBinding(rng.vec(len)));
    }
    let not_before = rng.gen_range(0..u64::MAX / 2);
    let body = CertificateBody {
        version: CERT_VERSION,
        serial: rng.bytes(),
        issuer: subject(&mut rng),
        subject: subject(&mut rng),
        not_before,
        not_after: not_before + rng.gen_range(1..u64::MAX / 4),
        public_keys,
        extensions,
    };
    let signatures = signatures(&mut rng, &body.canonical_encode().unwrap());
    Certificate { body, signatures }
}

fn random_csr(seed: u64) -> CertificateSigningRequest {
    let mut rng = SeedSource::from_u64(seed ^ 0x5a5a);
    let attestation = rng.gen_bool(0.5).then(|| AttestationEvidence {
        hardware_ids: (0..rng.gen_range(0..4)).map(|_| text(&mut rng)).collect(),
        peripheral_ids: (0..rng.gen_range(0..3)).map(|_| text(&mut rng)).collect(),
        nonce: rng.bytes(),
        tee_signature: pool().keys[0].sign(b"evidence").unwrap(),
    });
    let body = CsrBody { subject: subject(&mut rng), public_keys: key_entries(&mut rng), attestation };
    let proofs = signatures(&mut rng, &body.canonical_encode().unwrap());
    CertificateSigningRequest { body, proofs }
}

fn random_revocation_list(seed: u64) -> RevocationList {
    let mut rng = SeedSource::from_u64(seed ^ 0xa5a5);
    let entries = (0..rng.gen_range(0..6))
        .map(|_| RevocationEntry {
            scope: match rng.gen_range(0..3) {
                0 => Scope::Serial(rng.bytes()),
                1 => Scope::DeviceModel(text(&mut rng)),
                _ => Scope::Ca(subject(&mut rng)),
            },
            reason: [Reason::Compromise, Reason::ExpiryPolicy, Reason::Superseded][rng.gen_range(0..3)],
            revoked_at: rng.gen(),
        })
        .collect();
    let body = RevocationListBody { version: rng.gen(), issuer: subject(&mut rng), issued_at: rng.gen(), entries };
    let signatures = signatures(&mut rng, &body.canonical_encode());
    RevocationList { body, signatures }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn certificates_round_trip(seed: u64) {
        let c = random_certificate(seed);
        let bytes = c.encode().unwrap();
        let back = Certificate::decode(&bytes).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.encode().unwrap(), bytes);
        prop_assert_eq!(Certificate::from_armor(&c.to_armor().unwrap()).unwrap(), c);
    }

    #[test]
    fn csrs_round_trip(seed: u64) {
        let c = random_csr(seed);
        let bytes = c.encode().unwrap();
        let back = CertificateSigningRequest::decode(&bytes).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.encode().unwrap(), bytes);
    }

    #[test]
    fn revocation_lists_round_trip(seed: u64) {
        let rl = random_revocation_list(seed);
        let bytes = rl.encode();
        let back = RevocationList::decode(&bytes).unwrap();
        prop_assert_eq!(&back, &rl);
        prop_assert_eq!(back.encode(), bytes);
    }

    #[test]
    fn truncation_never_decodes(seed: u64, cut in 1usize..64) {
        let bytes = random_certificate(seed).encode().unwrap();
        let cut = cut.min(bytes.len());
        prop_assert!(Certificate::decode(&bytes[..bytes.len() - cut]).is_err());
    }
}

struct Fixture {
    root: CertificateAuthority,
    pl: CertificateAuthority,
    leaf_csr: CertificateSigningRequest,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let mut rng = SeedSource::from_u64(7);
        let hybrid = |h: u8, rng: &mut SeedSource| {
            let d = SchemeDescriptor::hybrid(
                SchemeDescriptor::toy_dl(DlGroup::standard()),
                SchemeDescriptor::xmss(16, 4, h).unwrap(),
            )
            .unwrap();
            keygen(&d, rng).unwrap()
        };
        let root_keys = Arc::new(hybrid(3, &mut rng));
        let root_cert = self_sign_root(&root_keys, SubjectInfo::new("Root", Role::Maintainer), 1 << 30, NOW).unwrap();
        let root = CertificateAuthority::new(root_keys, root_cert);
        let pl_keys = Arc::new(hybrid(9, &mut rng));
        let csr = CertificateSigningRequest::create(
            SubjectInfo::new("PL", Role::ProductionLine),
            &[&pl_keys],
            KeyUsage::SignCerts,
            None,
        )
        .unwrap();
        let pl_cert = root.issue(&csr, &IssueProfile::sub_ca(1 << 29), NOW).unwrap();
        let leaf_keys = hybrid(1, &mut rng);
        let leaf_csr = CertificateSigningRequest::create(
            SubjectInfo::device("d", "M", "S"),
            &[&leaf_keys],
            KeyUsage::SignData,
            None,
        )
        .unwrap();
        Fixture { root, pl: CertificateAuthority::new(pl_keys, pl_cert), leaf_csr }
    })
}

fn leaf(ttl: u64, hybrid_required: bool) -> Vec<Certificate> {
    let f = fixture();
    let cert = f.pl.issue(&f.leaf_csr, &IssueProfile::end_entity(ttl).hybrid_required(hybrid_required), NOW).unwrap();
    vec![cert, f.pl.cert.clone(), f.root.cert.clone()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expiry_is_monotone_in_time(ttl in 1u64..100_000, t in 0u64..200_000, dt in 1u64..1_000_000) {
        let chain = leaf(ttl, false);
        let anchor = fixture().root.cert.clone();
        let at = |time| validate_chain(&chain, &ValidationPolicy::new(anchor.clone(), time)).unwrap();
        if at(NOW + t).has_failure(Failure::Expired) {
            prop_assert!(at(NOW + t + dt).has_failure(Failure::Expired));
        }
        prop_assert_eq!(at(NOW + t).has_failure(Failure::Expired), t > ttl);
    }

    #[test]
    fn legacy_alone_never_suffices(zero: bool, byte in 0usize..64) {
        let mut chain = leaf(3600, true);
        let anchor = fixture().root.cert.clone();
        let pq = chain[0].signatures.iter().position(|s| s.scheme_id != chain[0].signatures[0].scheme_id).unwrap();
        if zero {
            chain[0].signatures[pq].payload.iter_mut().for_each(|b| *b = 0);
        } else {
            let len = chain[0].signatures[pq].payload.len();
            chain[0].signatures[pq].payload[byte % len] ^= 0xff;
        }
        let report = validate_chain(&chain, &ValidationPolicy::new(anchor.clone(), NOW)).unwrap();
        prop_assert!(!report.is_ok());
        prop_assert!(report.has_failure(Failure::Downgrade));
        chain[0].signatures.remove(pq);
        let report = validate_chain(&chain, &ValidationPolicy::new(anchor, NOW)).unwrap();
        prop_assert!(report.has_failure(Failure::Downgrade));
    }
}

#[test]
fn pin_digests_do_not_collide() {
    let digests: BTreeSet<_> = (0..10_000u64).map(|s| pin_digest(&random_certificate(s)).unwrap()).collect();
    assert_eq!(digests.len(), 10_000);
}

#[test]
fn concurrent_issuance_keeps_serials_unique() {
    let mut rng = SeedSource::from_u64(3);
    let keys = keygen(&SchemeDescriptor::toy_dl(DlGroup::standard()), &mut rng).unwrap();
    let legacy_ca = {
        let k = Arc::new(keygen(&SchemeDescriptor::toy_dl(DlGroup::standard()), &mut rng).unwrap());
        let c = self_sign_root(&k, SubjectInfo::new("Legacy root", Role::Maintainer), 1 << 20, NOW).unwrap();
        CertificateAuthority::new(k, c)
    };
    let csr = CertificateSigningRequest::create(SubjectInfo::device("d", "M", "S"), &[&keys], KeyUsage::SignData, None)
        .unwrap();
    let serials: Vec<[u8; 16]> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..16)
            .map(|_| {
                s.spawn(|| {
                    (0..64)
                        .map(|_| *legacy_ca.issue(&csr, &IssueProfile::end_entity(60), NOW).unwrap().serial())
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(serials.iter().collect::<BTreeSet<_>>().len(), 16 * 64);
    let journal: BTreeSet<_> = legacy_ca.journal.records().into_iter().map(|r| r.serial).collect();
    assert_eq!(journal.len(), 16 * 64);
}
