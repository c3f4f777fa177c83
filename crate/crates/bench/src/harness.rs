use std::fmt::Write as _;
use std::time::Instant;

use pqpki_core::{keygen, verify, Error, Result, SchemeDescriptor, SeedSource};

/// Output columns, in order.
pub const TABLE_COLUMNS: [&str; 8] = [
    "Algorithm",
    "Variant",
    "Key generation µs",
    "Signing µs",
    "Signature verification µs",
    "Public key size byte",
    "Signature size byte",
    "Secret key size byte",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub algorithm: String,
    pub variant: String,
    pub keygen_micros: f64,
    pub sign_micros: f64,
    pub verify_micros: f64,
    pub public_key_bytes: u64,
    pub signature_bytes: u64,
    pub secret_key_bytes: u64,
}

impl BenchmarkRecord {
    fn cells(&self) -> [String; 8] {
        [
            self.algorithm.clone(),
            self.variant.clone(),
            format!("{:.3}", self.keygen_micros),
            format!("{:.3}", self.sign_micros),
            format!("{:.3}", self.verify_micros),
            self.public_key_bytes.to_string(),
            self.signature_bytes.to_string(),
            self.secret_key_bytes.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    }
}

fn micros(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e6
}

/// Times keygen, sign and verify on a fresh key per iteration, after one
/// untimed warm-up round. A fresh key per round keeps one-time and stateful
/// schemes on the same footing.
///
/// Sizes come from the produced artifacts, not from the descriptor.
pub fn run_benchmark(
    descriptor: &SchemeDescriptor,
    iterations: usize,
    message_bytes: usize,
) -> Result<BenchmarkRecord> {
    if iterations < 3 {
        return Err(Error::Parameter(format!("need at least 3 iterations, got {iterations}")));
    }
    descriptor.validate()?;
    let mut rng = SeedSource::from_u64(0x62_656e_6368);
    let message: Vec<u8> = (0..message_bytes).map(|i| (i * 31 + 7) as u8).collect();
    let (mut kg, mut sg, mut vf) = (Vec::new(), Vec::new(), Vec::new());
    let mut sizes = None;
    for round in 0..=iterations {
        let t = Instant::now();
        let key = keygen(descriptor, &mut rng)?;
        let keygen_time = micros(t);
        let t = Instant::now();
        let sig = key.sign(&message)?;
        let sign_time = micros(t);
        let t = Instant::now();
        let ok = verify(key.public_key(), descriptor, &message, &sig)?;
        let verify_time = micros(t);
        if !ok {
            return Err(Error::SignatureInvalid(format!("{descriptor} failed to verify its own signature")));
        }
        let measured = (key.public_key().len() as u64, sig.size() as u64, key.private_key().len() as u64);
        if *sizes.get_or_insert(measured) != measured {
            return Err(Error::Parameter(format!("{descriptor} produced artifacts of varying size")));
        }
        if round > 0 {
            kg.push(keygen_time);
            sg.push(sign_time);
            vf.push(verify_time);
        }
    }
    let (public_key_bytes, signature_bytes, secret_key_bytes) = sizes.expect("at least one round ran");
    Ok(BenchmarkRecord {
        algorithm: descriptor.id().name().to_string(),
        variant: descriptor.display_name.clone(),
        keygen_micros: median(kg),
        sign_micros: median(sg),
        verify_micros: median(vf),
        public_key_bytes,
        signature_bytes,
        secret_key_bytes,
    })
}

/// Renders records under the fixed column header, in input order.
pub fn emit_table(records: &[BenchmarkRecord], format: TableFormat) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Parameter("no records to emit".into()));
    }
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(&TABLE_COLUMNS.join(","));
            out.push('\n');
            for r in records {
                let cells = r.cells();
                if cells.iter().any(|c| c.contains(',')) {
                    return Err(Error::Parameter(format!("field of {} contains a comma", r.variant)));
                }
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        TableFormat::Markdown => {
            let _ = writeln!(out, "| {} |", TABLE_COLUMNS.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(TABLE_COLUMNS.len()));
            for r in records {
                let _ = writeln!(out, "| {} |", r.cells().join(" | "));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pqpki_core::sig::DlGroup;

    fn record(variant: &str) -> BenchmarkRecord {
        BenchmarkRecord {
            algorithm: "X".into(),
            variant: variant.into(),
            keygen_micros: 1.0,
            sign_micros: 2.5,
            verify_micros: 0.25,
            public_key_bytes: 1,
            signature_bytes: 2,
            secret_key_bytes: 3,
        }
    }

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn csv_has_header_and_rows_in_order() {
        let text = emit_table(&[record("a"), record("b")], TableFormat::Csv).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "Algorithm,Variant,Key generation µs,Signing µs,Signature verification µs,Public key size byte,Signature size byte,Secret key size byte"
        );
        assert_eq!(lines[1], "X,a,1.000,2.500,0.250,1,2,3");
        assert!(lines[2].starts_with("X,b,"));
        assert_eq!(emit_table(&[record("a")], TableFormat::Csv).unwrap().lines().count(), 2);
    }

    #[test]
    fn markdown_has_separator_row() {
        let text = emit_table(&[record("a")], TableFormat::Markdown).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("| Algorithm | Variant |"));
        assert_eq!(lines[1], "|---|---|---|---|---|---|---|---|");
        assert_eq!(lines[2].matches('|').count(), 9);
    }

    #[test]
    fn empty_or_comma_input_is_rejected() {
        assert!(matches!(emit_table(&[], TableFormat::Csv), Err(Error::Parameter(_))));
        assert!(matches!(emit_table(&[record("a,b")], TableFormat::Csv), Err(Error::Parameter(_))));
    }

    #[test]
    fn too_few_iterations() {
        let d = SchemeDescriptor::toy_dl(DlGroup::standard());
        assert!(matches!(run_benchmark(&d, 1, 16), Err(Error::Parameter(_))));
        assert!(matches!(run_benchmark(&d, 2, 16), Err(Error::Parameter(_))));
        assert!(run_benchmark(&d, 3, 16).is_ok());
    }

    #[test]
    fn named_after_the_scheme() {
        let d = SchemeDescriptor::wots(16, 16).unwrap();
        let r = run_benchmark(&d, 3, 0).unwrap();
        assert_eq!(r.algorithm, "WOTS_PLUS");
        assert_eq!(r.variant, "WOTS+ n=16 w=16");
        assert!(r.keygen_micros >= 0.0 && r.sign_micros >= 0.0 && r.verify_micros >= 0.0);
    }
}
