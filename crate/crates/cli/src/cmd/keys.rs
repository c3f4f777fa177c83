use pqpki_core::encoding::{armor, dearmor, ArmorKind};
use pqpki_core::{keygen as generate, SignatureValue};
use serde_json::json;

use crate::args::{KeygenArgs, SignArgs, VerifyArgs};
use crate::cmd::descriptor;
use crate::support::{
    load_verifying_key, read_bytes, read_text, save_key, with_key, write_file, CliResult, Context, Report,
};

pub fn keygen(a: KeygenArgs, ctx: &Context) -> CliResult<Report> {
    let d = descriptor(a.scheme, &a.params)?;
    let key = generate(&d, &mut ctx.rng())?;
    save_key(&a.out, &key)?;
    if let Some(p) = &a.pub_out {
        write_file(p, armor(ArmorKind::PublicKey, &key.verifying_key().to_bytes()))?;
    }
    let capacity = key.capacity();
    let text = format!(
        "{d}\npublic key {} bytes, capacity {}\n",
        key.public_key().len(),
        capacity.map_or("unbounded".to_string(), |c| c.to_string())
    );
    let doc = json!({
        "scheme": d.display_name,
        "public_key_bytes": key.public_key().len(),
        "capacity": capacity,
        "key_file": a.out,
    });
    Ok(Report::new(text, doc))
}

pub fn sign(a: SignArgs) -> CliResult<Report> {
    let message = read_bytes(&a.input)?;
    let (sig, remaining) = with_key(&a.key, |k| Ok((k.sign(&message)?, k.remaining())))?;
    write_file(&a.out, armor(ArmorKind::Signature, &sig.to_bytes()))?;
    let mut text = format!("signed {} bytes, signature {} bytes", message.len(), sig.size());
    if let Some(i) =
        sig.leaf_index.or_else(|| sig.components.as_ref().and_then(|c| c.iter().find_map(|s| s.leaf_index)))
    {
        text.push_str(&format!(", leaf {i}"));
    }
    if let Some(r) = remaining {
        text.push_str(&format!(", {r} remaining"));
    }
    text.push('\n');
    let doc = json!({ "signature_bytes": sig.size(), "leaf_index": sig.leaf_index, "remaining": remaining });
    Ok(Report::new(text, doc))
}

pub fn verify(a: VerifyArgs) -> CliResult<Report> {
    let vk = load_verifying_key(&a.public)?;
    let message = read_bytes(&a.input)?;
    let sig = SignatureValue::from_bytes(&dearmor(ArmorKind::Signature, &read_text(&a.sig)?)?)?;
    let ok = vk.verify(&message, &sig)?;
    let verdict = if ok { "VALID" } else { "INVALID" };
    let report =
        Report::new(format!("{verdict}\n"), json!({ "verdict": verdict, "scheme": vk.descriptor.display_name }));
    Ok(if ok { report } else { report.negative("SIGNATURE_INVALID") })
}
