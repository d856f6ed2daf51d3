use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SINGLE_QUBIT_DEFAULTS: &[&str] = &[
    "x", "y", "z", "h", "s", "t", "x90", "y90", "x180", "y180", "mx90", "my90",
];
const TWO_QUBIT_DEFAULTS: &[&str] = &["cnot", "cx", "cz"];

/// Platform timing and resource limits used by the scheduler.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineProperties {
    pub n_qubits: usize,
    /// Cycles per gate name.
    pub durations: BTreeMap<String, u32>,
    /// Gates sharing a class never run in overlapping cycles, even on disjoint qubits.
    #[serde(default)]
    pub exclusion_classes: Vec<BTreeSet<String>>,
}

impl MachineProperties {
    /// Single-qubit gates take 1 cycle, two-qubit gates 2, `measure` 4 and
    /// `swap` 6. Measurements may not overlap.
    pub fn with_defaults(n_qubits: usize) -> Self {
        let mut durations = BTreeMap::new();
        for name in SINGLE_QUBIT_DEFAULTS {
            durations.insert(name.to_string(), 1);
        }
        for name in TWO_QUBIT_DEFAULTS {
            durations.insert(name.to_string(), 2);
        }
        durations.insert("measure".into(), 4);
        durations.insert("swap".into(), 6);
        Self {
            n_qubits,
            durations,
            exclusion_classes: vec![BTreeSet::from(["measure".to_string()])],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::InvalidParameter(
                "machine needs at least one qubit".into(),
            ));
        }
        if let Some((name, _)) = self.durations.iter().find(|(_, d)| **d == 0) {
            return Err(Error::InvalidParameter(format!(
                "duration of `{name}` must be positive"
            )));
        }
        Ok(())
    }

    pub fn duration(&self, name: &str) -> Result<u32> {
        self.durations
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGate(name.to_string()))
    }

    /// Index of the first exclusion class containing `name`.
    pub fn exclusion_class(&self, name: &str) -> Option<usize> {
        self.exclusion_classes.iter().position(|c| c.contains(name))
    }

    /// Stable 1-based id per known gate name (0 is reserved for padding).
    pub fn gate_type_id(&self, name: &str) -> Option<usize> {
        self.durations.keys().position(|k| k == name).map(|i| i + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table() {
        let props = MachineProperties::with_defaults(2);
        assert_eq!(props.duration("x").unwrap(), 1);
        assert_eq!(props.duration("cnot").unwrap(), 2);
        assert_eq!(props.duration("measure").unwrap(), 4);
        assert_eq!(props.duration("swap").unwrap(), 6);
        assert_eq!(props.exclusion_class("measure"), Some(0));
        assert_eq!(props.exclusion_class("x"), None);
        assert!(matches!(
            props.duration("toffoli"),
            Err(Error::UnknownGate(_))
        ));
        props.validate().unwrap();
    }

    #[test]
    fn zero_duration_rejected() {
        let mut props = MachineProperties::with_defaults(1);
        props.durations.insert("x".into(), 0);
        assert!(props.validate().is_err());
    }
}
