//! Scenario files and transcript export.
//!
//! A scenario is flat `key=value` text. A transcript export is a header line
//! followed by one base64 TLV record per channel message and, on success,
//! one for the issued certificate.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cert::{Certificate, Role};
use crate::encoding::{read_records, tags, write_record, TlvReader};
use crate::enrollment::adversary::AdversaryConfig;
use crate::enrollment::channel::{ChannelKind, ChannelMessage};
use crate::enrollment::party::{provision_device, provision_mirror_frontend, setup_hierarchy_at, FrontendProvisioning};
use crate::enrollment::protocol::{
    run_enrollment, EnrollmentOptions, EnrollmentOutcome, EnrollmentTranscript, InjectionPath, SessionProtection,
};
use crate::enrollment::sndl::{simulate_store_now_decrypt_later, AttackReport, DEFAULT_QUANTUM_BUDGET};
use crate::error::{Error, Result};
use crate::hash::{sha256, Digest32};
use crate::rng::SeedSource;

const HEADER: &str = "PQPKI-TRANSCRIPT";

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub now: u64,
    pub path: InjectionPath,
    pub protection: SessionProtection,
    pub device_model: String,
    pub device_serial: String,
    /// Has the manufacturer already reported this device to the key server?
    pub manufacturer_report: bool,
    pub token_present: bool,
    pub adversary: AdversaryConfig,
    pub quantum_budget: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            now: crate::enrollment::DEFAULT_EPOCH,
            path: InjectionPath::Frontend,
            protection: SessionProtection::Hybrid,
            device_model: "SENSOR-X1".into(),
            device_serial: "SN-0001".into(),
            manufacturer_report: false,
            token_present: true,
            adversary: AdversaryConfig::default(),
            quantum_budget: DEFAULT_QUANTUM_BUDGET,
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::param(format!("{key}: expected a boolean, got {v:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::param(format!("{key}: cannot parse {v:?}")))
}

fn path_text(path: InjectionPath) -> String {
    match path {
        InjectionPath::Frontend => "FRONTEND".into(),
        InjectionPath::DeviceApi { via } => format!("DEVICE_API:{via}"),
    }
}

fn parse_path(v: &str) -> Result<InjectionPath> {
    let v = v.trim();
    if v.eq_ignore_ascii_case("FRONTEND") {
        return Ok(InjectionPath::Frontend);
    }
    match v.split_once(':') {
        Some((p, via)) if p.eq_ignore_ascii_case("DEVICE_API") => Ok(InjectionPath::DeviceApi { via: via.parse()? }),
        None if v.eq_ignore_ascii_case("DEVICE_API") => Ok(InjectionPath::DeviceApi { via: Role::Manufacturer }),
        _ => Err(Error::param(format!("unknown injection path {v:?}"))),
    }
}

impl ScenarioConfig {
    /// Unknown keys are rejected; missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let mut injector = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line.split_once('=').ok_or_else(|| Error::param(format!("expected key=value: {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            let a = &mut c.adversary;
            match k {
                "seed" => c.seed = parse_num(k, v)?,
                "now" => c.now = parse_num(k, v)?,
                "path" => c.path = parse_path(v)?,
                "injector" => injector = Some(v.parse::<Role>()?),
                "protection" => c.protection = v.parse()?,
                "device_model" => c.device_model = v.to_string(),
                "device_serial" => c.device_serial = v.to_string(),
                "manufacturer_report" => c.manufacturer_report = parse_bool(k, v)?,
                "token_present" => c.token_present = parse_bool(k, v)?,
                "quantum_budget" => c.quantum_budget = parse_num(k, v)?,
                "eavesdrop" => a.eavesdrop = parse_bool(k, v)?,
                "modify_probability" => {
                    let p: f64 = parse_num(k, v)?;
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::param("modify_probability must lie in [0, 1]"));
                    }
                    a.modify_probability = p;
                }
                "modify_channel" => {
                    a.modify_channel =
                        if v.eq_ignore_ascii_case("ANY") { None } else { Some(v.parse::<ChannelKind>()?) }
                }
                "replay" => a.replay = parse_bool(k, v)?,
                "record_for_later" => a.record_for_later = parse_bool(k, v)?,
                "substitute_frontend" => a.substitute_frontend = parse_bool(k, v)?,
                "adversary_seed" => a.random_seed = parse_num(k, v)?,
                _ => return Err(Error::param(format!("unknown scenario key {k:?}"))),
            }
        }
        if let Some(via) = injector {
            c.path = InjectionPath::DeviceApi { via };
        }
        Ok(c)
    }

    /// Canonical text; parsing it yields an equal config.
    pub fn to_text(&self) -> String {
        let a = &self.adversary;
        let mut m = BTreeMap::new();
        m.insert("seed", self.seed.to_string());
        m.insert("now", self.now.to_string());
        m.insert("path", path_text(self.path));
        m.insert("protection", self.protection.name().into());
        m.insert("device_model", self.device_model.clone());
        m.insert("device_serial", self.device_serial.clone());
        m.insert("manufacturer_report", self.manufacturer_report.to_string());
        m.insert("token_present", self.token_present.to_string());
        m.insert("quantum_budget", self.quantum_budget.to_string());
        m.insert("eavesdrop", a.eavesdrop.to_string());
        m.insert("modify_probability", a.modify_probability.to_string());
        m.insert("modify_channel", a.modify_channel.map_or("ANY".into(), |k| k.name().to_string()));
        m.insert("replay", a.replay.to_string());
        m.insert("record_for_later", a.record_for_later.to_string());
        m.insert("substitute_frontend", a.substitute_frontend.to_string());
        m.insert("adversary_seed", a.random_seed.to_string());
        m.into_iter().fold(String::new(), |mut s, (k, v)| {
            let _ = writeln!(s, "{k}={v}");
            s
        })
    }

    pub fn digest(&self) -> Digest32 {
        sha256(self.to_text().as_bytes())
    }
}

/// Everything a scenario run produced.
#[derive(Debug)]
pub struct ScenarioRun {
    pub config: ScenarioConfig,
    pub transcript: EnrollmentTranscript,
    pub adversary: AdversaryConfig,
    /// Present when the adversary recorded the session.
    pub attack: Option<AttackReport>,
}

/// Sets up a fresh hierarchy and device from the config and enrolls it.
/// Without the hardware token the run stops at the mirror-frontend refresh
/// with `TOKEN_REQUIRED`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun> {
    let h = setup_hierarchy_at(config.seed, config.now)?;
    let mut rng = SeedSource::from_u64(config.seed).fork("scenario");
    let mut adversary = config.adversary.clone();
    let options =
        EnrollmentOptions { path: config.path, protection: config.protection, seed: config.seed, ..Default::default() };
    if !config.token_present {
        let decision = provision_mirror_frontend(&h.root_ca, &h.acl, &h.token, false, &mut rng, h.now)?;
        debug_assert!(matches!(decision, FrontendProvisioning::TokenRequired));
        let transcript = EnrollmentTranscript {
            seed: config.seed,
            path: config.path,
            protection: config.protection,
            ordered_messages: Vec::new(),
            delivered: Vec::new(),
            outcome: EnrollmentOutcome::TokenRequired,
            issued_certificate: None,
            frontend_issued: None,
            detail: "mirror frontend refresh needs the hardware token".into(),
        };
        return Ok(ScenarioRun { config: config.clone(), transcript, adversary, attack: None });
    }
    let mut device = provision_device(&h, &config.device_model, &config.device_serial, &mut rng)?;
    if config.manufacturer_report {
        h.report_injection(Role::Manufacturer, &config.device_serial, [0; 16])?;
    }
    let transcript = run_enrollment(&h, &mut device, &mut adversary, &options)?;
    let attack = if adversary.recorded_log.is_empty() {
        None
    } else {
        Some(simulate_store_now_decrypt_later(&transcript, &adversary, config.quantum_budget)?)
    };
    Ok(ScenarioRun { config: config.clone(), transcript, adversary, attack })
}

impl EnrollmentTranscript {
    pub fn export(&self, config_digest: &Digest32) -> Result<String> {
        let mut out = format!(
            "{HEADER} outcome={} seed={} path={} protection={} config={}\n",
            self.outcome,
            self.seed,
            path_text(self.path),
            self.protection.name(),
            hex::encode(config_digest)
        );
        for m in &self.ordered_messages {
            out.push_str(&write_record(&m.encode()));
        }
        if let Some(c) = &self.issued_certificate {
            out.push_str(&write_record(&c.encode()?));
        }
        Ok(out)
    }

    /// Inverse of [`export`](Self::export). Delivered bytes and the
    /// frontend's copy of the certificate are not part of the export.
    pub fn import(text: &str) -> Result<(Self, Digest32)> {
        let (header, body) = text.split_once('\n').unwrap_or((text, ""));
        let mut fields = header.split_whitespace();
        if fields.next() != Some(HEADER) {
            return Err(Error::decode("missing transcript header"));
        }
        let kv: BTreeMap<&str, &str> = fields.filter_map(|f| f.split_once('=')).collect();
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| Error::decode(format!("transcript header lacks {k}")));
        let outcome: EnrollmentOutcome = get("outcome")?.parse()?;
        let seed = get("seed")?.parse().map_err(|_| Error::decode("bad seed"))?;
        let path = parse_path(get("path")?).map_err(|e| Error::decode(e.to_string()))?;
        let protection = get("protection")?.parse().map_err(|e: Error| Error::decode(e.to_string()))?;
        let digest: Digest32 = hex::decode(get("config")?)
            .ok()
            .and_then(|d| d.try_into().ok())
            .ok_or_else(|| Error::decode("bad config digest"))?;
        let mut messages = Vec::new();
        let mut issued = None;
        for record in read_records(body)? {
            match TlvReader::new(&record).peek_tag() {
                Some(tags::CHANNEL_MESSAGE) => messages.push(ChannelMessage::decode(&record)?),
                Some(tags::CERTIFICATE) => issued = Some(Certificate::decode(&record)?),
                _ => return Err(Error::decode("unexpected transcript record")),
            }
        }
        let transcript = Self {
            seed,
            path,
            protection,
            ordered_messages: messages,
            delivered: Vec::new(),
            outcome,
            issued_certificate: issued,
            frontend_issued: None,
            detail: String::new(),
        };
        Ok((transcript, digest))
    }

    /// The messages as an adversary that recorded every hop would hold them.
    pub fn as_recording(&self) -> AdversaryConfig {
        AdversaryConfig {
            record_for_later: true,
            recorded_log: self.ordered_messages.iter().map(ChannelMessage::encode).collect(),
            ..Default::default()
        }
    }
}
