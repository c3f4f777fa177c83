//! The enrollment exchange.
//!
//! ```text
//! requester -> frontend  CONTROL        INJECT_REQUEST  serial             unkeyed tag
//! frontend  -> device    CERT_MATERIAL  FRONTEND_CHAIN  [frontend, root]   unkeyed tag, pinned
//! frontend  -> device    CONTROL        KEY_SHARE       g^a, signed        unkeyed tag
//! device    -> frontend  CONTROL        KEY_SHARE       g^b                unkeyed tag
//! frontend  -> device    CONTROL        CHALLENGE       nonce              sealed
//! device    -> frontend  CERT_MATERIAL  CSR             keys, evidence     sealed
//! frontend  -> device    CERT_MATERIAL  PROVISION       chain, config      sealed
//! ```
//!
//! The requester is the device itself on the frontend path and the injecting
//! manufacturer or operator on the device-API path, which also relays every
//! device message. The session key hashes the agreed value together with all
//! handshake payloads, so any change to an earlier message breaks every
//! sealed message after it. A hybrid session additionally mixes in a secret
//! the frontend shares with the device TEE.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cert::{
    check_signatures, pin_digest, self_sign_root, sign_flat, validate_chain, Certificate, CertificateAuthority,
    CertificateSigningRequest, IssueProfile, KeyUsage, PublicKeyEntry, Role, SignatureCheck, ValidationPolicy,
};
use crate::encoding::{tags, TlvReader, TlvWriter};
use crate::enrollment::adversary::{AdversaryConfig, Interceptor};
use crate::enrollment::channel::{ChannelKind, ChannelMessage};
use crate::enrollment::party::{device_generate_csr, verify_attestation, Hierarchy, Party};
use crate::enrollment::wrap::{unwrap_key, wrap_key};
use crate::error::{Error, Result};
use crate::hash::{expand, sha256_parts, xor_in_place, Digest32};
use crate::revocation::Permission;
use crate::rng::SeedSource;
use crate::sig::{keygen, DlGroup, SchemeDescriptor, SignatureValue};

const DEVICE_TTL: u64 = 5 * 365 * 86_400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectionPath {
    Frontend,
    DeviceApi { via: Role },
}

impl InjectionPath {
    pub fn name(self) -> &'static str {
        match self {
            InjectionPath::Frontend => "FRONTEND",
            InjectionPath::DeviceApi { .. } => "DEVICE_API",
        }
    }

    fn relay(self) -> Option<Role> {
        match self {
            InjectionPath::Frontend => None,
            InjectionPath::DeviceApi { via } => Some(via),
        }
    }
}

impl fmt::Display for InjectionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InjectionPath::Frontend => f.write_str("FRONTEND"),
            InjectionPath::DeviceApi { via } => write!(f, "DEVICE_API via {via}"),
        }
    }
}

/// How the session's confidentiality is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionProtection {
    /// Toy-DL agreement in the breakable group only.
    Classical,
    /// Standard group plus the TEE pre-shared secret.
    Hybrid,
}

impl SessionProtection {
    pub fn name(self) -> &'static str {
        match self {
            SessionProtection::Classical => "CLASSICAL",
            SessionProtection::Hybrid => "HYBRID",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            SessionProtection::Classical => 1,
            SessionProtection::Hybrid => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(SessionProtection::Classical),
            2 => Ok(SessionProtection::Hybrid),
            _ => Err(Error::decode(format!("unknown session protection {code}"))),
        }
    }

    pub fn group(self) -> DlGroup {
        match self {
            SessionProtection::Classical => DlGroup::breakable(),
            SessionProtection::Hybrid => DlGroup::standard(),
        }
    }
}

impl std::str::FromStr for SessionProtection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [SessionProtection::Classical, SessionProtection::Hybrid]
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown session protection {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnrollmentOutcome {
    Success,
    DetectedTampering,
    PinningMismatch,
    AttestationFailed,
    TokenRequired,
    /// Operator injection for a device no manufacturer has reported.
    Refused,
}

impl EnrollmentOutcome {
    pub const ALL: [EnrollmentOutcome; 6] = [
        EnrollmentOutcome::Success,
        EnrollmentOutcome::DetectedTampering,
        EnrollmentOutcome::PinningMismatch,
        EnrollmentOutcome::AttestationFailed,
        EnrollmentOutcome::TokenRequired,
        EnrollmentOutcome::Refused,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnrollmentOutcome::Success => "SUCCESS",
            EnrollmentOutcome::DetectedTampering => "DETECTED_TAMPERING",
            EnrollmentOutcome::PinningMismatch => "PINNING_MISMATCH",
            EnrollmentOutcome::AttestationFailed => "ATTESTATION_FAILED",
            EnrollmentOutcome::TokenRequired => "TOKEN_REQUIRED",
            EnrollmentOutcome::Refused => "REFUSED",
        }
    }
}

impl fmt::Display for EnrollmentOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EnrollmentOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::decode(format!("unknown enrollment outcome {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrollmentOptions {
    pub path: InjectionPath,
    pub protection: SessionProtection,
    pub seed: u64,
    pub ttl_seconds: u64,
}

impl Default for EnrollmentOptions {
    fn default() -> Self {
        Self { path: InjectionPath::Frontend, protection: SessionProtection::Hybrid, seed: 0, ttl_seconds: DEVICE_TTL }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrollmentTranscript {
    pub seed: u64,
    pub path: InjectionPath,
    pub protection: SessionProtection,
    /// Every hop as its sender put it on the wire.
    pub ordered_messages: Vec<ChannelMessage>,
    /// Bytes as they reached each receiver, after the adversary.
    pub delivered: Vec<Vec<u8>>,
    pub outcome: EnrollmentOutcome,
    /// The certificate the device accepted.
    pub issued_certificate: Option<Certificate>,
    /// The certificate the frontend signed, if it got that far.
    pub frontend_issued: Option<Certificate>,
    pub detail: String,
}

enum Abort {
    Outcome(EnrollmentOutcome, String),
    Fatal(Error),
}

impl From<Error> for Abort {
    fn from(e: Error) -> Self {
        Abort::Fatal(e)
    }
}

type Step<T> = std::result::Result<T, Abort>;

fn tampered(detail: impl Into<String>) -> Abort {
    Abort::Outcome(EnrollmentOutcome::DetectedTampering, detail.into())
}

pub(crate) fn unkeyed_tag(kind: ChannelKind, payload: &[u8]) -> Digest32 {
    sha256_parts(&[b"pqpki unkeyed", &[kind.code()], payload])
}

pub(crate) const TO_DEVICE: &[u8] = b"f2d";
pub(crate) const TO_FRONTEND: &[u8] = b"d2f";

/// One side's view of the sealed channel.
pub(crate) struct Session {
    key: Digest32,
    sent: u64,
    received: u64,
    outbound: &'static [u8],
    inbound: &'static [u8],
}

impl Session {
    pub(crate) fn derive(shared: u64, handshake: &[&[u8]], psk: Option<&Digest32>) -> Digest32 {
        let transcript = sha256_parts(handshake);
        sha256_parts(&[b"pqpki session", &DlGroup::element_bytes(shared), &transcript, psk.map_or(&[][..], |p| &p[..])])
    }

    fn new(key: Digest32, outbound: &'static [u8], inbound: &'static [u8]) -> Self {
        Self { key, sent: 0, received: 0, outbound, inbound }
    }

    pub(crate) fn keystream(key: &Digest32, direction: &[u8], counter: u64, len: usize) -> Vec<u8> {
        let k = sha256_parts(&[key, b"enc", direction, &counter.to_be_bytes()]);
        expand(&k, b"pqpki stream", len)
    }

    fn tag(key: &Digest32, direction: &[u8], counter: u64, kind: ChannelKind, payload: &[u8]) -> Digest32 {
        sha256_parts(&[key, b"tag", direction, &counter.to_be_bytes(), &[kind.code()], payload])
    }

    fn seal(&mut self, kind: ChannelKind, payload_type: u8, plaintext: &[u8]) -> (Vec<u8>, Digest32) {
        let mut ct = plaintext.to_vec();
        let pad = Self::keystream(&self.key, self.outbound, self.sent, ct.len());
        xor_in_place(&mut ct, &pad);
        let mut w = TlvWriter::new();
        w.bytes(payload_type, &ct);
        let payload = w.into_bytes();
        let tag = Self::tag(&self.key, self.outbound, self.sent, kind, &payload);
        self.sent += 1;
        (payload, tag)
    }

    fn open(&mut self, kind: ChannelKind, payload_type: u8, payload: &[u8], tag: &Digest32) -> Step<Vec<u8>> {
        if &Self::tag(&self.key, self.inbound, self.received, kind, payload) != tag {
            return Err(tampered("integrity tag does not verify"));
        }
        let mut r = TlvReader::new(payload);
        let mut pt = r.read(payload_type).map_err(|_| tampered("unexpected payload type"))?.to_vec();
        r.finish().map_err(|_| tampered("trailing payload bytes"))?;
        let pad = Self::keystream(&self.key, self.inbound, self.received, pt.len());
        xor_in_place(&mut pt, &pad);
        self.received += 1;
        Ok(pt)
    }
}

/// Builds the impostor frontend chain used by `substitute_frontend`.
struct Forgery<'h> {
    h: &'h Hierarchy,
}

impl Forgery<'_> {
    fn forge(&self, rng: &mut SeedSource, msg: &ChannelMessage) -> Option<ChannelMessage> {
        if msg.payload_type() != Some(tags::MSG_FRONTEND_CHAIN) {
            return None;
        }
        let build = |rng: &mut SeedSource| -> Result<Vec<Certificate>> {
            let scheme = SchemeDescriptor::toy_dl(DlGroup::standard());
            let root_keys = Arc::new(keygen(&scheme, rng)?);
            let root =
                self_sign_root(&root_keys, self.h.root_certificate().subject().clone(), 86_400 * 365, self.h.now)?;
            let ca = CertificateAuthority::new(root_keys, root.clone());
            let frontend_keys = keygen(&scheme, rng)?;
            let subject = self.h.production_line.subject.clone();
            let csr = CertificateSigningRequest::create(subject, &[&frontend_keys], KeyUsage::SignCerts, None)?;
            let cert = ca.issue(&csr, &IssueProfile::sub_ca(86_400 * 365).hybrid_required(false), self.h.now)?;
            Ok(vec![cert, root])
        };
        let chain = build(rng).ok()?;
        let payload = chain_payload(tags::MSG_FRONTEND_CHAIN, &chain, None).ok()?;
        Some(ChannelMessage { integrity_tag: unkeyed_tag(msg.channel_kind, &payload), payload, ..msg.clone() })
    }
}

fn chain_fields(w: &mut TlvWriter, chain: &[Vec<u8>], extra: Option<&[u8]>) {
    for c in chain {
        w.bytes(tags::CHAIN, c);
    }
    if let Some(e) = extra {
        w.bytes(tags::CONFIG_SECRET, e);
    }
}

fn chain_payload(payload_type: u8, chain: &[Certificate], extra: Option<&[u8]>) -> Result<Vec<u8>> {
    let encoded = chain.iter().map(Certificate::encode).collect::<Result<Vec<_>>>()?;
    let mut w = TlvWriter::new();
    w.nested(payload_type, |b| chain_fields(b, &encoded, extra));
    Ok(w.into_bytes())
}

fn chain_body(chain: &[Certificate], extra: Option<&[u8]>) -> Result<Vec<u8>> {
    let encoded = chain.iter().map(Certificate::encode).collect::<Result<Vec<_>>>()?;
    let mut w = TlvWriter::new();
    chain_fields(&mut w, &encoded, extra);
    Ok(w.into_bytes())
}

/// Parses `CHAIN*` then an optional `CONFIG_SECRET`.
pub(crate) fn parse_chain(r: &mut TlvReader<'_>) -> Result<(Vec<Certificate>, Option<Vec<u8>>)> {
    let chain = r.repeated(tags::CHAIN)?.into_iter().map(Certificate::decode).collect::<Result<Vec<_>>>()?;
    let extra = r.optional(tags::CONFIG_SECRET)?.map(<[u8]>::to_vec);
    Ok((chain, extra))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct KeyShare {
    pub(crate) group: DlGroup,
    pub(crate) share: u64,
    pub(crate) protection: SessionProtection,
}

impl KeyShare {
    fn fields(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        w.u64(tags::GROUP_P, self.group.p)
            .u64(tags::GROUP_Q, self.group.q)
            .u64(tags::GROUP_G, self.group.g)
            .u64(tags::SHARE, self.share)
            .u8(tags::PROTECTION, self.protection.code());
        w.into_bytes()
    }

    fn payload(&self, signatures: &[SignatureValue]) -> Vec<u8> {
        let fields = self.fields();
        let mut w = TlvWriter::new();
        w.nested(tags::MSG_KEY_SHARE, |b| {
            if !signatures.is_empty() {
                b.nested(tags::SIGNATURE_LIST, |s| signatures.iter().for_each(|sig| sig.encode_into(s)));
            }
            b.raw(&fields);
        });
        w.into_bytes()
    }

    pub(crate) fn parse(payload: &[u8]) -> Result<(Self, Vec<SignatureValue>)> {
        let mut r = TlvReader::new(payload);
        let mut b = r.nested(tags::MSG_KEY_SHARE)?;
        let mut signatures = Vec::new();
        if b.peek_tag() == Some(tags::SIGNATURE_LIST) {
            let mut s = b.nested(tags::SIGNATURE_LIST)?;
            while !s.is_empty() {
                signatures.push(SignatureValue::decode_from(&mut s)?);
            }
        }
        let group = DlGroup { p: b.u64(tags::GROUP_P)?, q: b.u64(tags::GROUP_Q)?, g: b.u64(tags::GROUP_G)? };
        let share = b.u64(tags::SHARE)?;
        let protection = SessionProtection::from_code(b.u8(tags::PROTECTION)?)?;
        b.finish()?;
        r.finish()?;
        Ok((Self { group, share, protection }, signatures))
    }

    fn signed_bytes(chain_payload: &[u8], fields: &[u8]) -> Digest32 {
        sha256_parts(&[b"pqpki key share", chain_payload, fields])
    }
}

struct Wire<'a, 'h> {
    interceptor: Interceptor<'a>,
    forgery: Forgery<'h>,
    relay: Option<Role>,
    sent: Vec<ChannelMessage>,
    delivered: Vec<Vec<u8>>,
    next_seq: BTreeMap<(Role, Role, ChannelKind), u64>,
    expected_seq: BTreeMap<(Role, Role, ChannelKind), u64>,
}

impl Wire<'_, '_> {
    /// Carries `(payload, tag)` from `from` to `to`, through the relay if
    /// one sits between them. Returns what the final receiver accepted.
    fn transmit(
        &mut self,
        from: Role,
        to: Role,
        kind: ChannelKind,
        payload: Vec<u8>,
        tag: Digest32,
    ) -> Step<(Vec<u8>, Digest32)> {
        let hops = match self.relay {
            Some(r) if r != from && r != to => vec![(from, r), (r, to)],
            _ => vec![(from, to)],
        };
        let (mut payload, mut tag) = (payload, tag);
        for (sender, receiver) in hops {
            let key = (sender, receiver, kind);
            let seq = self.next_seq.entry(key).or_insert(0);
            *seq += 1;
            let msg =
                ChannelMessage { channel_kind: kind, sender, receiver, sequence: *seq, payload, integrity_tag: tag };
            let forgery = &self.forgery;
            let arrivals = self.interceptor.intercept(&msg, |rng, m| forgery.forge(rng, m));
            self.sent.push(msg);
            let mut accepted = None;
            for bytes in arrivals {
                self.delivered.push(bytes.clone());
                let m = ChannelMessage::decode(&bytes).map_err(|e| tampered(format!("undecodable message: {e}")))?;
                let expected = self.expected_seq.entry(key).or_insert(1);
                if (m.sender, m.receiver, m.channel_kind) != key {
                    return Err(tampered("message header altered"));
                }
                if m.sequence != *expected {
                    return Err(tampered(format!("sequence {} where {} was expected", m.sequence, expected)));
                }
                if !m.is_separated() {
                    return Err(tampered("payload type does not belong to this channel"));
                }
                *expected += 1;
                accepted = Some(m);
            }
            let m = accepted.expect("the adversary always delivers the current message");
            payload = m.payload;
            tag = m.integrity_tag;
        }
        Ok((payload, tag))
    }
}

fn check_unkeyed(kind: ChannelKind, payload: &[u8], tag: &Digest32) -> Step<()> {
    if &unkeyed_tag(kind, payload) != tag {
        return Err(tampered("integrity tag does not verify"));
    }
    Ok(())
}

fn device_policy(device: &Party, now: u64) -> Step<ValidationPolicy> {
    let anchor = device.trust_store.first().ok_or_else(|| Error::param("device has no trust anchor"))?;
    let mut policy = ValidationPolicy::new(anchor.clone(), now);
    policy.trust_anchors = device.trust_store.clone();
    policy.pinned_digests = device.pinned_digests.clone();
    policy.require_hybrid = true;
    policy.revocation_list = device.revocation.as_ref().and_then(|slot| slot.current());
    Ok(policy)
}

/// Runs one enrollment of `device` and records it. Protocol failures are
/// outcomes; errors are reserved for misconfiguration and exhausted keys.
pub fn run_enrollment(
    h: &Hierarchy,
    device: &mut Party,
    adversary: &mut AdversaryConfig,
    options: &EnrollmentOptions,
) -> Result<EnrollmentTranscript> {
    if device.role() != Role::Device || device.tee_state.is_none() {
        return Err(Error::param("enrollment target must be a device with a TEE"));
    }
    let serial = device.subject.serial_number.clone().ok_or_else(|| Error::param("device has no serial number"))?;
    if let InjectionPath::DeviceApi { via } = options.path {
        if !matches!(via, Role::Manufacturer | Role::Operator) {
            return Err(Error::param(format!("{via} cannot inject certificates")));
        }
    }
    if options.ttl_seconds == 0 {
        return Err(Error::param("ttl must be positive"));
    }

    let mut wire = Wire {
        interceptor: Interceptor::new(adversary),
        forgery: Forgery { h },
        relay: options.path.relay(),
        sent: Vec::new(),
        delivered: Vec::new(),
        next_seq: BTreeMap::new(),
        expected_seq: BTreeMap::new(),
    };
    let mut issued = None;
    let result = exchange(h, device, &serial, &mut wire, options, &mut issued);
    let (outcome, detail) = match result {
        Ok(()) => (EnrollmentOutcome::Success, String::new()),
        Err(Abort::Outcome(o, d)) => (o, d),
        Err(Abort::Fatal(e)) => return Err(e),
    };
    Ok(EnrollmentTranscript {
        seed: options.seed,
        path: options.path,
        protection: options.protection,
        ordered_messages: wire.sent,
        delivered: wire.delivered,
        outcome,
        issued_certificate: if outcome == EnrollmentOutcome::Success { device.certificate.clone() } else { None },
        frontend_issued: issued,
        detail,
    })
}

fn exchange(
    h: &Hierarchy,
    device: &mut Party,
    serial: &str,
    wire: &mut Wire<'_, '_>,
    options: &EnrollmentOptions,
    issued: &mut Option<Certificate>,
) -> Step<()> {
    use ChannelKind::{CertMaterial, Control};
    const FRONTEND: Role = Role::ProductionLine;
    const DEVICE: Role = Role::Device;

    let mut rng = SeedSource::from_u64(options.seed);
    let mut frontend_rng = rng.fork("frontend");
    let mut device_rng = rng.fork("device");
    let now = h.now;
    let protection = options.protection;
    let tee_psk = *device.tee_state.as_ref().expect("checked").session_secret();

    // Injection request.
    let requester = match options.path {
        InjectionPath::Frontend => DEVICE,
        InjectionPath::DeviceApi { via } => via,
    };
    let mut w = TlvWriter::new();
    w.nested(tags::MSG_INJECT_REQUEST, |b| {
        b.text(tags::DEVICE_SERIAL, serial);
    });
    let m0 = w.into_bytes();
    let (m0, tag) = wire.transmit(requester, FRONTEND, Control, m0.clone(), unkeyed_tag(Control, &m0))?;
    check_unkeyed(Control, &m0, &tag)?;
    let requested_serial = (|| -> Result<String> {
        let mut r = TlvReader::new(&m0);
        let mut b = r.nested(tags::MSG_INJECT_REQUEST)?;
        let s = b.text(tags::DEVICE_SERIAL)?;
        b.finish()?;
        r.finish()?;
        Ok(s)
    })()
    .map_err(|e| tampered(format!("injection request: {e}")))?;
    if options.path == (InjectionPath::DeviceApi { via: Role::Operator }) && !h.injection_reported(&requested_serial)? {
        return Err(Abort::Outcome(
            EnrollmentOutcome::Refused,
            format!("no injection report for device {requested_serial}"),
        ));
    }

    // Frontend chain, checked against the digest embedded in the TEE.
    let frontend_chain = h.production_line.chain();
    let m1 = chain_payload(tags::MSG_FRONTEND_CHAIN, &frontend_chain, None)?;
    let (m1_rx, tag) = wire.transmit(FRONTEND, DEVICE, CertMaterial, m1.clone(), unkeyed_tag(CertMaterial, &m1))?;
    check_unkeyed(CertMaterial, &m1_rx, &tag)?;
    let seen_chain = (|| -> Result<Vec<Certificate>> {
        let mut r = TlvReader::new(&m1_rx);
        let mut b = r.nested(tags::MSG_FRONTEND_CHAIN)?;
        let (chain, extra) = parse_chain(&mut b)?;
        b.finish()?;
        r.finish()?;
        if chain.is_empty() || extra.is_some() {
            return Err(Error::decode("frontend chain must list certificates only"));
        }
        Ok(chain)
    })()
    .map_err(|e| tampered(format!("frontend chain: {e}")))?;
    let tee = device.tee_state.as_ref().expect("checked");
    let presented_pin = pin_digest(&seen_chain[0]).map_err(|e| tampered(e.to_string()))?;
    if !tee.embedded_frontend_digests.contains(&presented_pin) {
        return Err(Abort::Outcome(
            EnrollmentOutcome::PinningMismatch,
            "frontend certificate does not match the embedded digest".into(),
        ));
    }
    let policy = device_policy(device, now)?;
    let report = validate_chain(&seen_chain, &policy).map_err(|e| tampered(e.to_string()))?;
    if !report.is_ok() {
        return Err(tampered(format!("frontend chain rejected: {:?}", report.failures())));
    }

    // Key shares. The frontend signs its share together with the chain.
    let group = protection.group();
    let a = group.random_exponent(&mut frontend_rng);
    let offer = KeyShare { group, share: group.pow(group.g, a), protection };
    let signatures = sign_flat(&h.frontend_ca.keys, &KeyShare::signed_bytes(&m1, &offer.fields()))?;
    let m2 = offer.payload(&signatures);
    let (m2_rx, tag) = wire.transmit(FRONTEND, DEVICE, Control, m2.clone(), unkeyed_tag(Control, &m2))?;
    check_unkeyed(Control, &m2_rx, &tag)?;
    let (seen_offer, seen_sigs) = KeyShare::parse(&m2_rx).map_err(|e| tampered(format!("key share: {e}")))?;
    let signer_keys = &seen_chain[0].body.public_keys;
    let signed = KeyShare::signed_bytes(&m1_rx, &seen_offer.fields());
    if check_signatures(&signed, &seen_sigs, signer_keys, true) != SignatureCheck::Valid {
        return Err(tampered("frontend key share signature does not verify"));
    }
    if seen_offer.protection != protection || seen_offer.group != protection.group() {
        return Err(tampered("session protection downgraded"));
    }
    let b = group.random_exponent(&mut device_rng);
    let answer = KeyShare { group, share: group.pow(group.g, b), protection };
    let m3 = answer.payload(&[]);
    let (m3_rx, tag) = wire.transmit(DEVICE, FRONTEND, Control, m3.clone(), unkeyed_tag(Control, &m3))?;
    check_unkeyed(Control, &m3_rx, &tag)?;
    let (seen_answer, _) = KeyShare::parse(&m3_rx).map_err(|e| tampered(format!("key share: {e}")))?;
    if seen_answer.group != group || seen_answer.protection != protection || !group.contains(seen_answer.share) {
        return Err(tampered("device key share does not match the offer"));
    }
    if !group.contains(seen_offer.share) {
        return Err(tampered("frontend key share is not a group element"));
    }

    let frontend_psk = h.device_session_secret(&requested_serial);
    let psk = |p: &Digest32| (protection == SessionProtection::Hybrid).then_some(*p);
    let frontend_key =
        Session::derive(group.pow(seen_answer.share, a), &[&m1, &m2, &m3_rx], psk(&frontend_psk).as_ref());
    let device_key = Session::derive(group.pow(seen_offer.share, b), &[&m1_rx, &m2_rx, &m3], psk(&tee_psk).as_ref());
    let mut frontend = Session::new(frontend_key, TO_DEVICE, TO_FRONTEND);
    let mut dev = Session::new(device_key, TO_FRONTEND, TO_DEVICE);

    // Challenge and attested CSR.
    let nonce: [u8; 32] = frontend_rng.bytes();
    let (m4, tag) = frontend.seal(Control, tags::MSG_CHALLENGE, &nonce);
    let (m4, tag) = wire.transmit(FRONTEND, DEVICE, Control, m4, tag)?;
    let seen_nonce: [u8; 32] =
        dev.open(Control, tags::MSG_CHALLENGE, &m4, &tag)?.try_into().map_err(|_| tampered("challenge length"))?;

    let (csr, new_keys) = device_generate_csr(device, &seen_nonce, &mut device_rng)?;
    let (m5, tag) = dev.seal(CertMaterial, tags::MSG_CSR, &csr.encode()?);
    let (m5, tag) = wire.transmit(DEVICE, FRONTEND, CertMaterial, m5, tag)?;
    let csr_rx = frontend.open(CertMaterial, tags::MSG_CSR, &m5, &tag)?;
    let csr = CertificateSigningRequest::decode(&csr_rx).map_err(|e| tampered(format!("csr: {e}")))?;
    if csr.body.subject.role != Role::Device || csr.body.subject.serial_number.as_deref() != Some(&requested_serial) {
        return Err(tampered("csr subject does not match the injection request"));
    }
    csr.verify_proofs().map_err(|e| tampered(e.to_string()))?;
    let Some(record) = h.device_record(&requested_serial) else {
        return Err(Abort::Outcome(EnrollmentOutcome::AttestationFailed, "unknown device".into()));
    };
    match verify_attestation(&csr, &record.hardware_ids, &h.manufacturer_verifying_key(), &nonce) {
        Ok(true) => {}
        Ok(false) | Err(_) => {
            return Err(Abort::Outcome(EnrollmentOutcome::AttestationFailed, "attestation evidence rejected".into()))
        }
    }

    // Issuance and provisioning.
    h.acl.require(h.frontend_ca.cert.subject().role, Permission::IssueCert)?;
    let cert = h.frontend_ca.issue(&csr, &IssueProfile::end_entity(options.ttl_seconds).hybrid_required(true), now)?;
    *issued = Some(cert.clone());
    let config_secret: [u8; 32] = frontend_rng.bytes();
    let wrapped = wrap_key(&config_secret, &record.tee_public, &mut frontend_rng)?;
    let mut provision_chain = vec![cert];
    provision_chain.extend(frontend_chain);
    let (m6, tag) = frontend.seal(CertMaterial, tags::MSG_PROVISION, &chain_body(&provision_chain, Some(&wrapped))?);
    let (m6, tag) = wire.transmit(FRONTEND, DEVICE, CertMaterial, m6, tag)?;
    let body = dev.open(CertMaterial, tags::MSG_PROVISION, &m6, &tag)?;
    let (chain, wrapped) = (|| -> Result<_> {
        let mut r = TlvReader::new(&body);
        let parsed = parse_chain(&mut r)?;
        r.finish()?;
        Ok(parsed)
    })()
    .map_err(|e| tampered(format!("provisioning: {e}")))?;
    let leaf = chain.first().ok_or_else(|| tampered("empty provisioning chain"))?;
    if leaf.body.public_keys.iter().map(|k| (&k.descriptor, &k.key_bytes)).ne(PublicKeyEntry::from_key(
        &new_keys,
        KeyUsage::SignData,
    )
    .iter()
    .map(|k| (&k.descriptor, &k.key_bytes)))
        || leaf.subject() != &device.subject
    {
        return Err(tampered("provisioned certificate does not match the request"));
    }
    let report = validate_chain(&chain, &device_policy(device, now)?).map_err(|e| tampered(e.to_string()))?;
    if !report.is_ok() {
        return Err(tampered(format!("provisioned chain rejected: {:?}", report.failures())));
    }
    let tee = device.tee_state.as_mut().expect("checked");
    let secret = unwrap_key(wrapped.as_deref().unwrap_or_default(), tee.encryption_key())
        .map_err(|_| tampered("configuration secret does not unwrap"))?;
    tee.config_secret = Some(secret);
    device.certificate = Some(chain[0].clone());
    device.issuer_chain = chain[1..].to_vec();
    device.keys = Arc::new(new_keys);

    if options.path == (InjectionPath::DeviceApi { via: Role::Manufacturer }) {
        h.report_injection(Role::Manufacturer, serial, *chain[0].serial())?;
    }
    Ok(())
}
