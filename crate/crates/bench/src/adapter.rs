use std::collections::BTreeMap;

use pqpki_core::{Error, Result};

use crate::harness::BenchmarkRecord;

/// Hook for benchmarking a scheme implemented outside this workspace.
pub trait SchemeAdapter: Send + Sync {
    fn name(&self) -> &str;
    fn run(&self, iterations: usize, message_bytes: usize) -> Result<BenchmarkRecord>;
}

/// Adapters by case-insensitive name. Empty by default.
#[derive(Default)]
pub struct AdapterRegistry {
    adapters: BTreeMap<String, Box<dyn SchemeAdapter>>,
}

impl AdapterRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, adapter: Box<dyn SchemeAdapter>) -> Result<()> {
        let key = adapter.name().to_ascii_lowercase();
        if self.adapters.contains_key(&key) {
            return Err(Error::Parameter(format!("adapter {key} already registered")));
        }
        self.adapters.insert(key, adapter);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.adapters.keys().map(String::as_str)
    }

    pub fn run(&self, name: &str, iterations: usize, message_bytes: usize) -> Result<BenchmarkRecord> {
        if iterations < 3 {
            return Err(Error::Parameter(format!("need at least 3 iterations, got {iterations}")));
        }
        let adapter = self
            .adapters
            .get(&name.to_ascii_lowercase())
            .ok_or_else(|| Error::SchemeUnavailable(format!("{name} has no native implementation or adapter")))?;
        adapter.run(iterations, message_bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed;

    impl SchemeAdapter for Fixed {
        fn name(&self) -> &str {
            "Fixed"
        }

        fn run(&self, _: usize, _: usize) -> Result<BenchmarkRecord> {
            Ok(BenchmarkRecord {
                algorithm: "Fixed".into(),
                variant: "v".into(),
                keygen_micros: 0.0,
                sign_micros: 0.0,
                verify_micros: 0.0,
                public_key_bytes: 0,
                signature_bytes: 0,
                secret_key_bytes: 0,
            })
        }
    }

    #[test]
    fn empty_registry_has_nothing() {
        let r = AdapterRegistry::new();
        assert_eq!(r.names().count(), 0);
        assert!(matches!(r.run("falcon", 3, 32), Err(Error::SchemeUnavailable(_))));
    }

    #[test]
    fn registered_adapter_runs() {
        let mut r = AdapterRegistry::new();
        r.register(Box::new(Fixed)).unwrap();
        assert!(r.register(Box::new(Fixed)).is_err());
        assert_eq!(r.run("FIXED", 3, 0).unwrap().algorithm, "Fixed");
        assert!(matches!(r.run("fixed", 1, 0), Err(Error::Parameter(_))));
    }
}
