use std::fmt;

use pqpki_core::sig::grover_bits;
use pqpki_core::{Error, Result};

/// Years, all non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoscaParams {
    /// How long the data must stay confidential.
    pub secrecy_lifetime_years: f64,
    pub migration_years: f64,
    /// Until a quantum computer breaks the current scheme.
    pub quantum_break_years: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MoscaVerdict {
    AtRisk,
    SafeMargin(f64),
}

impl fmt::Display for MoscaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoscaVerdict::AtRisk => f.write_str("AT_RISK"),
            MoscaVerdict::SafeMargin(years) => write!(f, "SAFE_MARGIN({years})"),
        }
    }
}

/// At risk when secrecy lifetime plus migration time strictly exceeds the
/// time to a quantum break; equality still leaves a zero margin.
pub fn mosca_check(p: &MoscaParams) -> Result<MoscaVerdict> {
    let values = [p.secrecy_lifetime_years, p.migration_years, p.quantum_break_years];
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Parameter(format!("year counts must be finite and non-negative: {values:?}")));
    }
    let needed = p.secrecy_lifetime_years + p.migration_years;
    Ok(if needed > p.quantum_break_years {
        MoscaVerdict::AtRisk
    } else {
        MoscaVerdict::SafeMargin(p.quantum_break_years - needed)
    })
}

/// Effective bits against Grover search.
pub fn grover_adjust(classical_bits: u32) -> Result<u32> {
    if classical_bits == 0 {
        return Err(Error::Parameter("classical bits must be positive".into()));
    }
    Ok(grover_bits(classical_bits))
}

/// Symmetric key length that leaves `target_quantum_bits` after Grover.
pub fn recommended_symmetric_bits(target_quantum_bits: u32) -> Result<u32> {
    if target_quantum_bits == 0 {
        return Err(Error::Parameter("target bits must be positive".into()));
    }
    target_quantum_bits.checked_mul(2).ok_or_else(|| Error::Parameter("target bits too large".into()))
}

/// Logical-level cost of factoring an `input_bits` RSA modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumResourceEstimate {
    pub input_bits: u64,
    pub logical_qubits: f64,
    pub toffoli_count: f64,
    pub measurement_depth: f64,
}

/// Physical-scale context printed under every estimate.
pub const PHYSICAL_SCALE_NOTE: &str =
    "Physical scale for n = 2048 under published surface-code estimates: about 20 million noisy qubits, about 8 hours.";

impl QuantumResourceEstimate {
    pub fn report(&self) -> String {
        format!(
            "RSA modulus bits: {}\nlogical qubits: {:.3}\nToffoli gates: {:.3}\nmeasurement depth: {:.3}\n\n{PHYSICAL_SCALE_NOTE}\n",
            self.input_bits, self.logical_qubits, self.toffoli_count, self.measurement_depth
        )
    }
}

pub fn shor_resource_estimate(n: u64) -> Result<QuantumResourceEstimate> {
    if n < 2 {
        return Err(Error::Parameter(format!("modulus must have at least 2 bits, got {n}")));
    }
    let nf = n as f64;
    let lg = nf.log2();
    Ok(QuantumResourceEstimate {
        input_bits: n,
        logical_qubits: 3.0 * nf + 0.002 * nf * lg,
        toffoli_count: 0.3 * nf * nf + 0.0005 * nf.powi(3) * lg,
        measurement_depth: 500.0 * nf * nf + nf * nf * lg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mosca(x: f64, y: f64, z: f64) -> Result<MoscaVerdict> {
        mosca_check(&MoscaParams { secrecy_lifetime_years: x, migration_years: y, quantum_break_years: z })
    }

    #[test]
    fn mosca_examples() {
        assert_eq!(mosca(5.0, 3.0, 7.0).unwrap(), MoscaVerdict::AtRisk);
        assert_eq!(mosca(1.0, 1.0, 10.0).unwrap(), MoscaVerdict::SafeMargin(8.0));
        assert_eq!(mosca(4.0, 3.0, 7.0).unwrap(), MoscaVerdict::SafeMargin(0.0));
        assert!(matches!(mosca(-1.0, 0.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(mosca(f64::NAN, 0.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(mosca(0.0, f64::INFINITY, 1.0), Err(Error::Parameter(_))));
        assert_eq!(MoscaVerdict::AtRisk.to_string(), "AT_RISK");
        assert_eq!(MoscaVerdict::SafeMargin(0.0).to_string(), "SAFE_MARGIN(0)");
        assert_eq!(MoscaVerdict::SafeMargin(2.5).to_string(), "SAFE_MARGIN(2.5)");
    }

    #[test]
    fn grover_examples() {
        assert_eq!(grover_adjust(256).unwrap(), 128);
        assert_eq!(grover_adjust(255).unwrap(), 127);
        assert_eq!(recommended_symmetric_bits(128).unwrap(), 256);
        assert!(grover_adjust(0).is_err());
        assert!(recommended_symmetric_bits(0).is_err());
        assert!(recommended_symmetric_bits(u32::MAX).is_err());
    }

    #[test]
    fn shor_at_2048() {
        let e = shor_resource_estimate(2048).unwrap();
        // log2 2048 = 11; the oracle works in thousandths to stay in integers.
        let qubits_milli = 3 * 2048 * 1000 + 2 * 2048 * 11;
        assert!((e.logical_qubits - qubits_milli as f64 / 1000.0).abs() < 1e-9);
        assert!((e.logical_qubits - 6189.056).abs() < 0.01);
        assert_eq!(e.measurement_depth, (2048u64 * 2048 * 511) as f64);
        assert_eq!(e.measurement_depth, 2_143_289_344.0);
        let toffoli = 0.3 * 2048.0 * 2048.0 + (2048u64.pow(3) * 11) as f64 / 2000.0;
        assert!((e.toffoli_count - toffoli).abs() < 1e-3);
        assert!(matches!(shor_resource_estimate(1), Err(Error::Parameter(_))));
        assert!(shor_resource_estimate(2).is_ok());
    }

    #[test]
    fn report_mentions_physical_scale() {
        let text = shor_resource_estimate(2048).unwrap().report();
        assert!(text.contains("8 hours"));
        assert!(text.contains("20 million"));
        assert!(text.contains("logical qubits: 6189.056"));
    }
}
