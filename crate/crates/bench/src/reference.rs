/// Reference columns: the security levels followed by the benchmark columns.
pub const REFERENCE_COLUMNS: [&str; 13] = [
    "Algorithm",
    "Basic approach",
    "Variant",
    "Classical security bit",
    "Quantum security bit",
    "Security basis",
    "Key generation µs",
    "Signing µs",
    "Signature verification µs",
    "Public key size byte",
    "Signature size byte",
    "Secret key size byte",
    "Note",
];

/// Published figures for third-party schemes. Timings are reference data
/// from other hardware and are never asserted against local measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub algorithm: &'static str,
    pub approach: &'static str,
    pub variant: &'static str,
    /// Two values when the level is given per hardness assumption; see
    /// `security_basis`.
    pub classical_bits: &'static [f64],
    pub quantum_bits: &'static [f64],
    pub security_basis: &'static str,
    pub keygen_micros: f64,
    pub sign_micros: f64,
    pub verify_micros: f64,
    pub public_key_bytes: f64,
    /// Fractional where the published figure is an average.
    pub signature_bytes: f64,
    pub secret_key_bytes: f64,
    pub note: &'static str,
}

const AVERAGE: &str = "signature size is a published average";

macro_rules! row {
    ($alg:expr, $approach:expr, $variant:expr, $cb:expr, $qb:expr, $basis:expr,
     $kg:expr, $sg:expr, $vf:expr, $pk:expr, $sig:expr, $sk:expr, $note:expr) => {
        ReferenceRow {
            algorithm: $alg,
            approach: $approach,
            variant: $variant,
            classical_bits: &$cb,
            quantum_bits: &$qb,
            security_basis: $basis,
            keygen_micros: $kg as f64,
            sign_micros: $sg as f64,
            verify_micros: $vf as f64,
            public_key_bytes: $pk as f64,
            signature_bytes: $sig as f64,
            secret_key_bytes: $sk as f64,
            note: $note,
        }
    };
}

const MV: &str = "Multivariate cryptography";
const ZK: &str = "Zero-knowledge proof systems";
const HASH: &str = "Hash functions";

#[rustfmt::skip]
static ROWS: [ReferenceRow; 13] = [
    row!("Falcon", "Lattice", "n=768", [195.0], [172.0], "", 13882, 562, 87, 1441, 1036.02, 6145, AVERAGE),
    row!("CRYSTALS-DILITHIUM", "Lattice", "Very high", [176.0, 174.0], [160.0, 158.0], "SIS/LWE", 88, 203, 89, 1760, 3366, 3856, ""),
    row!("Rainbow", "Multivariate", "Classic", [207.0], [169.0], "", 34980, 277, 317, 710640, 156, 511448, ""),
    row!("Rainbow", "Multivariate", "Compressed", [207.0], [169.0], "", 41371, 24707, 7094, 206744, 156, 64, ""),
    row!("GeMSS", MV, "GeMSS192", [192.0], [112.2], "", 79817, 900851, 478, 1304192, 52, 40280, ""),
    row!("GeMSS", MV, "BlueGeMSS192", [192.0], [112.2], "", 81263, 132560, 557, 1331744, 53, 41720, ""),
    row!("GeMSS", MV, "RedGeMSS192", [192.0], [112.2], "", 83529, 3672, 447, 1359584, 55, 40760, ""),
    row!("Picnic", ZK, "picnic-L3-FS", [192.0], [96.0], "", 18, 10064, 8608, 49, 74191.2, 73, AVERAGE),
    row!("Picnic", ZK, "picnic-L3-UR", [192.0], [96.0], "", 24, 13224, 11088, 49, 121849, 73, ""),
    row!("Picnic", ZK, "picnic2-L3-FS", [192.0], [96.0], "", 20, 443936, 157228, 49, 27062.15, 73, AVERAGE),
    row!("SPHINCS+", HASH, "sphincs-haraka-192f", [194.0], [97.0], "", 14844, 439211, 21963, 48, 35664, 96, ""),
    row!("SPHINCS+", HASH, "sphincs-sha256-192s", [196.0], [98.0], "", 195818, 4390120, 3486, 48, 17064, 96, ""),
    row!("SPHINCS+", HASH, "sphincs-shake256-192f", [194.0], [97.0], "", 8767, 240173, 12405, 48, 35664, 96, ""),
];

pub fn reference_table() -> Vec<ReferenceRow> {
    ROWS.to_vec()
}

fn joined(bits: &[f64]) -> String {
    bits.iter().map(f64::to_string).collect::<Vec<_>>().join("/")
}

impl ReferenceRow {
    pub fn cells(&self) -> [String; 13] {
        [
            self.algorithm.to_string(),
            self.approach.to_string(),
            self.variant.to_string(),
            joined(self.classical_bits),
            joined(self.quantum_bits),
            self.security_basis.to_string(),
            self.keygen_micros.to_string(),
            self.sign_micros.to_string(),
            self.verify_micros.to_string(),
            self.public_key_bytes.to_string(),
            self.signature_bytes.to_string(),
            self.secret_key_bytes.to_string(),
            self.note.to_string(),
        ]
    }
}

/// The embedded rows as CSV. Shipped verbatim as `data/reference_tables.csv`.
pub fn reference_csv() -> String {
    let mut out = REFERENCE_COLUMNS.join(",");
    out.push('\n');
    for row in &ROWS {
        out.push_str(&row.cells().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(variant: &str) -> ReferenceRow {
        reference_table().into_iter().find(|r| r.variant == variant).unwrap()
    }

    #[test]
    fn spot_values() {
        let falcon = find("n=768");
        assert_eq!((falcon.classical_bits, falcon.quantum_bits), (&[195.0][..], &[172.0][..]));
        assert_eq!(
            (falcon.public_key_bytes, falcon.signature_bytes, falcon.secret_key_bytes),
            (1441.0, 1036.02, 6145.0)
        );
        assert_eq!((falcon.keygen_micros, falcon.sign_micros, falcon.verify_micros), (13882.0, 562.0, 87.0));
        let dilithium = find("Very high");
        assert_eq!((dilithium.keygen_micros, dilithium.sign_micros, dilithium.verify_micros), (88.0, 203.0, 89.0));
        assert_eq!(dilithium.classical_bits, &[176.0, 174.0]);
        assert_eq!(dilithium.security_basis, "SIS/LWE");
        assert_eq!(find("sphincs-sha256-192s").signature_bytes, 17064.0);
        assert_eq!(find("GeMSS192").quantum_bits, &[112.2]);
    }

    #[test]
    fn csv_shape() {
        let csv = reference_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 14);
        assert!(lines.iter().all(|l| l.split(',').count() == REFERENCE_COLUMNS.len()));
        assert!(lines.contains(
            &"Falcon,Lattice,n=768,195,172,,13882,562,87,1441,1036.02,6145,signature size is a published average"
        ));
        assert!(
            lines.contains(&"CRYSTALS-DILITHIUM,Lattice,Very high,176/174,160/158,SIS/LWE,88,203,89,1760,3366,3856,")
        );
    }

    #[test]
    fn fractional_sizes_are_annotated() {
        for row in reference_table() {
            assert_eq!(row.signature_bytes.fract() != 0.0, row.note == AVERAGE, "{}", row.variant);
            assert_eq!(row.classical_bits.len(), row.quantum_bits.len());
            assert_eq!(row.classical_bits.len() > 1, !row.security_basis.is_empty());
        }
    }
}
