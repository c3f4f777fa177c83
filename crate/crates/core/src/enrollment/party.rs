use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};

use crate::cert::{
    pin_digest, self_sign_root, AttestationEvidence, Certificate, CertificateAuthority, CertificateSigningRequest,
    IssueProfile, KeyUsage, Role, SubjectInfo,
};
use crate::enrollment::token::{hardware_token_confirm, request_digest, HardwareToken, TokenDecision};
use crate::enrollment::wrap::{TeeEncryptionKey, TeePublicKey};
use crate::error::{Error, Result};
use crate::hash::{sha256_parts, Digest32};
use crate::keyserver::KeyServer;
use crate::revocation::{AccessControlList, Permission, RevocationSlot};
use crate::rng::SeedSource;
use crate::sig::{keygen, DlGroup, KeyPair, SchemeDescriptor, VerifyingKey};

/// Default simulation clock, seconds since the Unix epoch.
pub const DEFAULT_EPOCH: u64 = 1_700_000_000;

const ROOT_TTL: u64 = 20 * 365 * 86_400;
const CA_TTL: u64 = 10 * 365 * 86_400;
const PARTY_TTL: u64 = 5 * 365 * 86_400;
const TOKEN_TTL: u64 = 3_600;

// XMSS heights bound how many signatures each party can make.
const ROOT_HEIGHT: u8 = 6;
const FRONTEND_HEIGHT: u8 = 9;
const MANUFACTURER_HEIGHT: u8 = 8;
const OPERATOR_HEIGHT: u8 = 3;
const DEVICE_HEIGHT: u8 = 2;
const TOKEN_HEIGHT: u8 = 4;

/// Hybrid toy-DL + XMSS(n=16, w=4, h) used by every simulated party. Small
/// parameters keep key generation cheap; security levels are nominal.
pub fn simulation_scheme(h: u8) -> SchemeDescriptor {
    SchemeDescriptor::hybrid(
        SchemeDescriptor::toy_dl(DlGroup::standard()),
        SchemeDescriptor::xmss(16, 4, h).expect("valid simulation parameters"),
    )
    .expect("valid hybrid")
}

/// Simulated TPM/TEE. The manufacturer key and the encryption key are only
/// used inside; nothing here is ever serialized onto a channel.
pub struct TeeState {
    manufacturer_key: Arc<KeyPair>,
    encryption_key: TeeEncryptionKey,
    session_secret: Digest32,
    pub hardware_ids: Vec<String>,
    pub peripheral_ids: Vec<String>,
    pub embedded_frontend_digests: BTreeSet<Digest32>,
    /// Configuration secret unwrapped at provisioning time.
    pub config_secret: Option<Vec<u8>>,
}

impl std::fmt::Debug for TeeState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TeeState")
            .field("hardware_ids", &self.hardware_ids)
            .field("peripheral_ids", &self.peripheral_ids)
            .finish_non_exhaustive()
    }
}

impl TeeState {
    pub fn attest(&self, nonce: &[u8; 32]) -> Result<AttestationEvidence> {
        let body = AttestationEvidence::signed_body(&self.hardware_ids, &self.peripheral_ids, nonce);
        Ok(AttestationEvidence {
            hardware_ids: self.hardware_ids.clone(),
            peripheral_ids: self.peripheral_ids.clone(),
            nonce: *nonce,
            tee_signature: self.manufacturer_key.sign(&body)?,
        })
    }

    pub fn encryption_public(&self) -> TeePublicKey {
        self.encryption_key.public()
    }

    pub(crate) fn encryption_key(&self) -> &TeeEncryptionKey {
        &self.encryption_key
    }

    pub(crate) fn session_secret(&self) -> &Digest32 {
        &self.session_secret
    }
}

#[derive(Debug)]
pub struct Party {
    pub subject: SubjectInfo,
    pub keys: Arc<KeyPair>,
    pub certificate: Option<Certificate>,
    /// Issuer certificates above `certificate`, ending at the root.
    pub issuer_chain: Vec<Certificate>,
    pub trust_store: Vec<Certificate>,
    pub pinned_digests: BTreeSet<Digest32>,
    pub tee_state: Option<TeeState>,
    pub revocation: Option<RevocationSlot>,
    pub firmware: Option<Vec<u8>>,
}

impl Party {
    pub fn new(subject: SubjectInfo, keys: Arc<KeyPair>, tee_state: Option<TeeState>) -> Result<Self> {
        subject.validate()?;
        if subject.role == Role::Device && tee_state.is_none() {
            return Err(Error::param("device parties need a TEE"));
        }
        Ok(Self {
            subject,
            keys,
            certificate: None,
            issuer_chain: Vec::new(),
            trust_store: Vec::new(),
            pinned_digests: BTreeSet::new(),
            tee_state,
            revocation: None,
            firmware: None,
        })
    }

    pub fn role(&self) -> Role {
        self.subject.role
    }

    /// Own certificate followed by its issuers; empty before enrollment.
    pub fn chain(&self) -> Vec<Certificate> {
        match &self.certificate {
            Some(c) => std::iter::once(c.clone()).chain(self.issuer_chain.iter().cloned()).collect(),
            None => Vec::new(),
        }
    }
}

/// What the manufacturer knows about a device it built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DeviceRecord {
    pub(crate) hardware_ids: Vec<String>,
    pub(crate) tee_public: TeePublicKey,
}

/// The four infrastructure parties plus the services they share.
pub struct Hierarchy {
    pub maintainer: Party,
    pub production_line: Party,
    pub manufacturer: Party,
    pub operator: Party,
    pub root_ca: CertificateAuthority,
    pub frontend_ca: CertificateAuthority,
    pub token: HardwareToken,
    pub keyserver: KeyServer,
    pub acl: AccessControlList,
    pub now: u64,
    passwords: BTreeMap<Role, String>,
    tee_master: Digest32,
    /// Manufacturing records by device serial.
    device_registry: Mutex<BTreeMap<String, DeviceRecord>>,
}

impl std::fmt::Debug for Hierarchy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hierarchy")
            .field("root", &self.maintainer.subject)
            .field("frontend", &self.production_line.subject)
            .finish_non_exhaustive()
    }
}

fn party_id(role: Role) -> String {
    role.name().to_ascii_lowercase()
}

impl Hierarchy {
    pub fn root_certificate(&self) -> &Certificate {
        &self.root_ca.cert
    }

    pub fn frontend_pin(&self) -> Digest32 {
        pin_digest(&self.frontend_ca.cert).expect("issued certificates encode")
    }

    pub fn manufacturer_verifying_key(&self) -> VerifyingKey {
        self.manufacturer.keys.verifying_key()
    }

    pub(crate) fn device_record(&self, serial: &str) -> Option<DeviceRecord> {
        self.device_registry.lock().unwrap_or_else(|p| p.into_inner()).get(serial).cloned()
    }

    pub(crate) fn device_session_secret(&self, serial: &str) -> Digest32 {
        sha256_parts(&[b"pqpki tee psk", &self.tee_master, serial.as_bytes()])
    }

    /// Authenticates `role` at the key server with its simulation password.
    pub fn keyserver_token(&self, role: Role) -> Result<[u8; 32]> {
        let password =
            self.passwords.get(&role).ok_or_else(|| Error::param(format!("{role} has no key server account")))?;
        Ok(self.keyserver.authenticate(&party_id(role), password, TOKEN_TTL, self.now)?.token_bytes)
    }

    pub fn report_injection(&self, reporter: Role, device_serial: &str, cert_serial: [u8; 16]) -> Result<()> {
        let token = self.keyserver_token(reporter)?;
        self.keyserver.report_injection(&token, device_serial, cert_serial, self.now)?;
        Ok(())
    }

    pub fn injection_reported(&self, device_serial: &str) -> Result<bool> {
        let token = self.keyserver_token(Role::Maintainer)?;
        Ok(!self.keyserver.query_injections(&token, device_serial, self.now)?.is_empty())
    }
}

fn issue_party(
    ca: &CertificateAuthority,
    ca_issuers: &[Certificate],
    acl: &AccessControlList,
    subject: SubjectInfo,
    keys: Arc<KeyPair>,
    usage: KeyUsage,
    now: u64,
) -> Result<Party> {
    acl.require(ca.cert.subject().role, Permission::IssueCert)?;
    let csr = CertificateSigningRequest::create(subject.clone(), &[&keys], usage, None)?;
    let profile = IssueProfile { usage, ..IssueProfile::end_entity(PARTY_TTL).hybrid_required(true) };
    let cert = ca.issue(&csr, &profile, now)?;
    let mut party = Party::new(subject, keys, None)?;
    party.certificate = Some(cert);
    party.issuer_chain = std::iter::once(ca.cert.clone()).chain(ca_issuers.iter().cloned()).collect();
    Ok(party)
}

#[derive(Debug)]
pub enum FrontendProvisioning {
    Provisioned(Box<Party>, Box<CertificateAuthority>),
    TokenRequired,
}

/// Issues a mirror frontend (2nd-level CA) under the root. The request must
/// be co-signed by the hardware token; without it nothing is generated.
pub fn provision_mirror_frontend(
    root_ca: &CertificateAuthority,
    acl: &AccessControlList,
    token: &HardwareToken,
    token_present: bool,
    rng: &mut SeedSource,
    now: u64,
) -> Result<FrontendProvisioning> {
    if !token_present {
        return Ok(FrontendProvisioning::TokenRequired);
    }
    let keys = Arc::new(keygen(&simulation_scheme(FRONTEND_HEIGHT), rng)?);
    let subject = SubjectInfo::new("Production Line Frontend", Role::ProductionLine);
    let csr = CertificateSigningRequest::create(subject.clone(), &[&keys], KeyUsage::SignCerts, None)?;
    let approval = match hardware_token_confirm(token, &csr, token_present)? {
        TokenDecision::Approved(a) => a,
        TokenDecision::TokenRequired => return Ok(FrontendProvisioning::TokenRequired),
    };
    if !approval.verify(&request_digest(&csr)?, &token.public_keys()) {
        return Err(Error::SignatureInvalid("token approval".into()));
    }
    acl.require(root_ca.cert.subject().role, Permission::IssueCert)?;
    let cert = root_ca.issue(&csr, &IssueProfile::sub_ca(CA_TTL), now)?;
    let ca = CertificateAuthority::new(keys.clone(), cert.clone());
    let mut party = Party::new(subject, keys, None)?;
    party.certificate = Some(cert);
    party.issuer_chain = vec![root_ca.cert.clone()];
    Ok(FrontendProvisioning::Provisioned(Box::new(party), Box::new(ca)))
}

pub fn setup_hierarchy(seed: u64) -> Result<Hierarchy> {
    setup_hierarchy_at(seed, DEFAULT_EPOCH)
}

/// Builds root, mirror frontend (approved by the hardware token),
/// manufacturer and operator, and registers the external parties at the key
/// server.
pub fn setup_hierarchy_at(seed: u64, now: u64) -> Result<Hierarchy> {
    let mut rng = SeedSource::from_u64(seed);
    let acl = AccessControlList::standard();

    let root_keys = Arc::new(keygen(&simulation_scheme(ROOT_HEIGHT), &mut rng)?);
    let root_subject = SubjectInfo::new("Maintainer Root", Role::Maintainer);
    let root_cert = self_sign_root(&root_keys, root_subject.clone(), ROOT_TTL, now)?;
    let root_ca = CertificateAuthority::new(root_keys.clone(), root_cert.clone());
    let token = HardwareToken::new(keygen(&simulation_scheme(TOKEN_HEIGHT), &mut rng)?);

    let FrontendProvisioning::Provisioned(production_line, frontend_ca) =
        provision_mirror_frontend(&root_ca, &acl, &token, true, &mut rng, now)?
    else {
        unreachable!("token is present");
    };
    let (production_line, frontend_ca) = (*production_line, *frontend_ca);

    let manufacturer_keys = Arc::new(keygen(&simulation_scheme(MANUFACTURER_HEIGHT), &mut rng)?);
    let manufacturer = issue_party(
        &frontend_ca,
        &production_line.issuer_chain,
        &acl,
        SubjectInfo::new("Manufacturer", Role::Manufacturer),
        manufacturer_keys,
        KeyUsage::Attest,
        now,
    )?;
    let operator_keys = Arc::new(keygen(&simulation_scheme(OPERATOR_HEIGHT), &mut rng)?);
    let operator = issue_party(
        &frontend_ca,
        &production_line.issuer_chain,
        &acl,
        SubjectInfo::new("Operator", Role::Operator),
        operator_keys,
        KeyUsage::SignData,
        now,
    )?;

    let mut maintainer = Party::new(root_subject, root_keys, None)?;
    maintainer.certificate = Some(root_cert.clone());

    let pins: BTreeSet<Digest32> = [pin_digest(&root_cert)?, pin_digest(&frontend_ca.cert)?].into();
    let mut parties = [maintainer, production_line, manufacturer, operator];
    for p in &mut parties {
        p.trust_store = vec![root_cert.clone()];
        p.pinned_digests = pins.clone();
        p.revocation = Some(RevocationSlot::new(root_cert.clone()));
    }
    let [maintainer, production_line, manufacturer, operator] = parties;

    let keyserver = KeyServer::new(rng.fork("keyserver"));
    let mut passwords = BTreeMap::new();
    for role in [Role::Maintainer, Role::Manufacturer, Role::Operator] {
        let password = hex::encode(rng.bytes::<12>());
        keyserver.register_party(&party_id(role), &password, role)?;
        passwords.insert(role, password);
    }

    Ok(Hierarchy {
        maintainer,
        production_line,
        manufacturer,
        operator,
        root_ca,
        frontend_ca,
        token,
        keyserver,
        acl,
        now,
        passwords,
        tee_master: rng.bytes(),
        device_registry: Mutex::new(BTreeMap::new()),
    })
}

/// Manufactures a device: fresh hardware ids, a TEE holding the
/// manufacturer key, and the frontend digest embedded for pinning.
pub fn provision_device(h: &Hierarchy, model: &str, serial: &str, rng: &mut SeedSource) -> Result<Party> {
    let subject = SubjectInfo::device(format!("{model} {serial}"), model, serial);
    let mut ids = |prefix: &str| format!("{prefix}:{}", hex::encode(rng.bytes::<6>()));
    let hardware_ids = vec![ids("cpu"), ids("tpm")];
    let peripheral_ids = vec![ids("sensor"), ids("radio")];
    let frontend_pin = h.frontend_pin();
    let encryption_key = TeeEncryptionKey::generate(DlGroup::standard(), rng);
    let tee_public = encryption_key.public();
    let tee = TeeState {
        manufacturer_key: h.manufacturer.keys.clone(),
        encryption_key,
        session_secret: h.device_session_secret(serial),
        hardware_ids: hardware_ids.clone(),
        peripheral_ids,
        embedded_frontend_digests: [frontend_pin].into(),
        config_secret: None,
    };
    let factory_keys = Arc::new(keygen(&simulation_scheme(DEVICE_HEIGHT), rng)?);
    let mut device = Party::new(subject, factory_keys, Some(tee))?;
    device.trust_store = vec![h.root_certificate().clone()];
    device.pinned_digests = [frontend_pin].into();
    device.revocation = Some(RevocationSlot::new(h.root_certificate().clone()));
    let record = DeviceRecord { hardware_ids, tee_public };
    h.device_registry.lock().unwrap_or_else(|p| p.into_inner()).insert(serial.to_string(), record);
    Ok(device)
}

/// CSR with fresh device keys and TEE evidence over `challenge`. Returns
/// the new key pair alongside.
pub fn device_generate_csr(
    device: &Party,
    challenge: &[u8; 32],
    rng: &mut SeedSource,
) -> Result<(CertificateSigningRequest, KeyPair)> {
    let tee = device.tee_state.as_ref().ok_or(Error::AttestationUnavailable)?;
    let keys = keygen(&simulation_scheme(DEVICE_HEIGHT), rng)?;
    let evidence = tee.attest(challenge)?;
    let csr = CertificateSigningRequest::create(device.subject.clone(), &[&keys], KeyUsage::SignData, Some(evidence))?;
    Ok((csr, keys))
}

pub fn verify_attestation(
    csr: &CertificateSigningRequest,
    expected_hardware_ids: &[String],
    manufacturer_key: &VerifyingKey,
    issued_nonce: &[u8; 32],
) -> Result<bool> {
    let evidence = csr.body.attestation.as_ref().ok_or(Error::AttestationUnavailable)?;
    if &evidence.nonce != issued_nonce || evidence.hardware_ids != expected_hardware_ids {
        return Ok(false);
    }
    // Structurally broken signatures count as a failed attestation.
    Ok(manufacturer_key.verify(&evidence.body(), &evidence.tee_signature).unwrap_or(false))
}
