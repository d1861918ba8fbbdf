//! Memory budgets for enumerations and sample maps.
//!
//! Budgets are expressed in bytes and compared against a conservative
//! estimate computed before any large allocation; exceeding the budget is an
//! explicit error, never a partial result.

use crate::error::{Error, Result};

/// Environment variable overriding the default budget, in bytes.
pub const BUDGET_ENV: &str = "MONKEYZIPF_MEMORY_BUDGET";

/// 2 GiB.
pub const DEFAULT_BUDGET_BYTES: u64 = 2 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryBudget {
    bytes: u64,
}

impl MemoryBudget {
    pub fn new(bytes: u64) -> Self {
        MemoryBudget { bytes }
    }

    /// The default budget, or the value of `MONKEYZIPF_MEMORY_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .map(MemoryBudget::new)
                .map_err(|_| Error::InvalidArgument(format!("{BUDGET_ENV}={v:?} is not a byte count"))),
            Err(_) => Ok(MemoryBudget::default()),
        }
    }

    pub fn bytes(&self) -> u64 {
        self.bytes
    }

    /// Fails if `entries` items of `bytes_per_entry` bytes do not fit.
    pub fn check(&self, entries: u64, bytes_per_entry: u64) -> Result<()> {
        let required = entries.saturating_mul(bytes_per_entry);
        if required > self.bytes {
            Err(Error::BudgetExceeded { required, budget: self.bytes })
        } else {
            Ok(())
        }
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget::new(DEFAULT_BUDGET_BYTES)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_reports_required_bytes() {
        let b = MemoryBudget::new(1000);
        assert!(b.check(10, 100).is_ok());
        match b.check(11, 100) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 1100);
                assert_eq!(budget, 1000);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(b.check(u64::MAX, 2).is_err());
    }
}
