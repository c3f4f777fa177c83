use pqpki_bench::{
    emit_table, grover_adjust, mosca_check, recommended_symmetric_bits, reference_csv, reference_table, run_benchmark,
    shor_resource_estimate, AdapterRegistry, MoscaParams, MoscaVerdict, TableFormat,
};
use serde_json::json;

use crate::args::{BenchCommand, FormatKind, GroverArgs, MoscaArgs, SchemeKind, ShorArgs};
use crate::cmd::descriptor;
use crate::support::{write_file, CliResult, Report};

fn native(name: &str) -> Option<SchemeKind> {
    match name.to_ascii_lowercase().as_str() {
        "toy-dl" | "toy_dl" => Some(SchemeKind::ToyDl),
        "wots" | "wots+" => Some(SchemeKind::Wots),
        "xmss" => Some(SchemeKind::Xmss),
        "hybrid" => Some(SchemeKind::Hybrid),
        _ => None,
    }
}

pub fn bench(c: BenchCommand) -> CliResult<Report> {
    match c {
        BenchCommand::Run { scheme, params, iterations, message_bytes, format, out } => {
            let adapters = AdapterRegistry::new();
            let mut records = Vec::new();
            for name in &scheme {
                records.push(match native(name) {
                    Some(kind) => run_benchmark(&descriptor(kind, &params)?, iterations, message_bytes)?,
                    None => adapters.run(name, iterations, message_bytes)?,
                });
            }
            let format = match format {
                FormatKind::Csv => TableFormat::Csv,
                FormatKind::Markdown => TableFormat::Markdown,
            };
            let table = emit_table(&records, format)?;
            if let Some(p) = &out {
                write_file(p, &table)?;
            }
            let rows: Vec<_> = records
                .iter()
                .map(|r| {
                    json!({
                        "algorithm": r.algorithm,
                        "variant": r.variant,
                        "keygen_micros": r.keygen_micros,
                        "sign_micros": r.sign_micros,
                        "verify_micros": r.verify_micros,
                        "public_key_bytes": r.public_key_bytes,
                        "signature_bytes": r.signature_bytes,
                        "secret_key_bytes": r.secret_key_bytes,
                    })
                })
                .collect();
            Ok(Report::new(table, json!({ "records": rows })))
        }
        BenchCommand::Reference { out } => {
            let csv = reference_csv();
            if let Some(p) = &out {
                write_file(p, &csv)?;
            }
            let rows: Vec<_> = reference_table()
                .iter()
                .map(|r| {
                    json!({
                        "algorithm": r.algorithm,
                        "approach": r.approach,
                        "variant": r.variant,
                        "classical_bits": r.classical_bits,
                        "quantum_bits": r.quantum_bits,
                        "security_basis": r.security_basis,
                        "keygen_micros": r.keygen_micros,
                        "sign_micros": r.sign_micros,
                        "verify_micros": r.verify_micros,
                        "public_key_bytes": r.public_key_bytes,
                        "signature_bytes": r.signature_bytes,
                        "secret_key_bytes": r.secret_key_bytes,
                        "note": r.note,
                    })
                })
                .collect();
            Ok(Report::new(csv, json!({ "rows": rows })))
        }
    }
}

pub fn mosca(a: MoscaArgs) -> CliResult<Report> {
    let verdict =
        mosca_check(&MoscaParams { secrecy_lifetime_years: a.x, migration_years: a.y, quantum_break_years: a.z })?;
    let margin = match verdict {
        MoscaVerdict::AtRisk => None,
        MoscaVerdict::SafeMargin(m) => Some(m),
    };
    let label = if margin.is_some() { "SAFE_MARGIN" } else { "AT_RISK" };
    Ok(Report::new(format!("{verdict}\n"), json!({ "verdict": label, "years_to_spare": margin })))
}

pub fn grover(a: GroverArgs) -> CliResult<Report> {
    match (a.bits, a.target) {
        (Some(bits), _) => {
            let q = grover_adjust(bits)?;
            Ok(Report::new(format!("{q}\n"), json!({ "classical_bits": bits, "quantum_bits": q })))
        }
        (None, Some(target)) => {
            let bits = recommended_symmetric_bits(target)?;
            Ok(Report::new(format!("{bits}\n"), json!({ "target_quantum_bits": target, "symmetric_bits": bits })))
        }
        (None, None) => unreachable!("clap requires one of --bits and --target"),
    }
}

pub fn shor(a: ShorArgs) -> CliResult<Report> {
    let e = shor_resource_estimate(a.bits)?;
    let doc = json!({
        "input_bits": e.input_bits,
        "logical_qubits": e.logical_qubits,
        "toffoli_count": e.toffoli_count,
        "measurement_depth": e.measurement_depth,
    });
    Ok(Report::new(e.report(), doc))
}
