//! Benchmark harness, reference data and quantum-threat calculators.
//!
//! [`run_benchmark`] times the native schemes from `pqpki-core` and
//! [`emit_table`] renders results in the same column layout as the embedded
//! [`reference_table`]. Schemes without a native implementation can only be
//! benchmarked through an [`AdapterRegistry`], which ships empty.

mod adapter;
mod calc;
mod harness;
mod reference;

pub use adapter::{AdapterRegistry, SchemeAdapter};
pub use calc::{
    grover_adjust, mosca_check, recommended_symmetric_bits, shor_resource_estimate, MoscaParams, MoscaVerdict,
    QuantumResourceEstimate,
};
pub use harness::{emit_table, run_benchmark, BenchmarkRecord, TableFormat, TABLE_COLUMNS};
pub use pqpki_core::{Error, Result};
pub use reference::{reference_csv, reference_table, ReferenceRow, REFERENCE_COLUMNS};
