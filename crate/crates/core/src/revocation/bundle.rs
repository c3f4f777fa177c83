use crate::cert::{
    check_signatures, has_post_quantum_signer, sign_flat, validate_chain, Certificate, SignatureCheck, ValidationPolicy,
};
use crate::encoding::{armor, dearmor, tags, ArmorKind, TlvReader, TlvWriter};
use crate::enrollment::Party;
use crate::error::{Error, Result};
use crate::revocation::RevocationList;
use crate::sig::{KeyPair, SignatureValue};

/// Offline update: an opaque firmware image and a revocation list under
/// one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirmwareBundle {
    pub firmware_blob: Vec<u8>,
    pub revocation_list: RevocationList,
    /// Covers the framed blob followed by the list encoding.
    pub signatures: Vec<SignatureValue>,
    /// Signer certificate first, ending at the root.
    pub signer_chain: Vec<Certificate>,
}

fn signed_bytes(blob: &[u8], rl: &RevocationList) -> Vec<u8> {
    let mut w = TlvWriter::new();
    w.bytes(tags::FIRMWARE_BLOB, blob);
    rl.encode_into(&mut w);
    w.into_bytes()
}

pub fn pack_firmware_bundle(
    firmware_blob: Vec<u8>,
    revocation_list: RevocationList,
    signer_keys: &KeyPair,
    signer_chain: Vec<Certificate>,
) -> Result<FirmwareBundle> {
    if signer_chain.is_empty() {
        return Err(Error::param("firmware signer needs a certificate chain"));
    }
    let signatures = sign_flat(signer_keys, &signed_bytes(&firmware_blob, &revocation_list))?;
    Ok(FirmwareBundle { firmware_blob, revocation_list, signatures, signer_chain })
}

impl FirmwareBundle {
    /// Checks the signer chain against `anchors` at `now` and the bundle
    /// signature under the signer's keys.
    pub fn verify(&self, anchors: &[Certificate], now: u64) -> Result<()> {
        let Some(signer) = self.signer_chain.first() else {
            return Err(Error::BundleInvalid("no signer certificate".into()));
        };
        let Some(anchor) = anchors.first() else {
            return Err(Error::BundleInvalid("device has no trust anchor".into()));
        };
        let mut policy = ValidationPolicy::new(anchor.clone(), now);
        policy.trust_anchors = anchors.to_vec();
        let report = validate_chain(&self.signer_chain, &policy).map_err(|e| Error::BundleInvalid(e.to_string()))?;
        if !report.is_ok() {
            return Err(Error::BundleInvalid(format!("signer chain rejected: {:?}", report.failures())));
        }
        let keys = &signer.body.public_keys;
        match check_signatures(
            &signed_bytes(&self.firmware_blob, &self.revocation_list),
            &self.signatures,
            keys,
            has_post_quantum_signer(keys),
        ) {
            SignatureCheck::Valid => Ok(()),
            SignatureCheck::Downgrade(d) | SignatureCheck::Invalid(d) => Err(Error::BundleInvalid(d)),
        }
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let certs = self.signer_chain.iter().map(Certificate::encode).collect::<Result<Vec<_>>>()?;
        let mut w = TlvWriter::new();
        w.nested(tags::FIRMWARE_BUNDLE, |b| {
            self.revocation_list.encode_into(b);
            b.bytes(tags::FIRMWARE_BLOB, &self.firmware_blob);
            b.nested(tags::BUNDLE_SIGNATURES, |s| self.signatures.iter().for_each(|sig| sig.encode_into(s)));
            certs.iter().for_each(|c| {
                b.bytes(tags::SIGNER_CERT, c);
            });
        });
        Ok(w.into_bytes())
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let mut b = r.nested(tags::FIRMWARE_BUNDLE)?;
        let revocation_list = RevocationList::decode_from(&mut b)?;
        let firmware_blob = b.read(tags::FIRMWARE_BLOB)?.to_vec();
        let mut s = b.nested(tags::BUNDLE_SIGNATURES)?;
        let mut signatures = Vec::new();
        while !s.is_empty() {
            signatures.push(SignatureValue::decode_from(&mut s)?);
        }
        let signer_chain =
            b.repeated(tags::SIGNER_CERT)?.into_iter().map(Certificate::decode).collect::<Result<_>>()?;
        b.finish()?;
        r.finish()?;
        Ok(Self { firmware_blob, revocation_list, signatures, signer_chain })
    }

    pub fn to_armor(&self) -> Result<String> {
        Ok(armor(ArmorKind::FirmwareBundle, &self.encode()?))
    }

    pub fn from_armor(text: &str) -> Result<Self> {
        Self::decode(&dearmor(ArmorKind::FirmwareBundle, text)?)
    }
}

/// Installs `bundle` on `device` or changes nothing. The firmware is
/// accepted only if the signature holds and the carried list is newer than
/// the stored one. Returns the device's new list version.
pub fn apply_offline_update(device: &mut Party, bundle: &FirmwareBundle, now: u64) -> Result<u64> {
    bundle.verify(&device.trust_store, now)?;
    let slot = device.revocation.as_ref().ok_or_else(|| Error::param("device has no revocation store"))?;
    let version = slot.offer(&bundle.revocation_list)?;
    device.firmware = Some(bundle.firmware_blob.clone());
    Ok(version)
}
