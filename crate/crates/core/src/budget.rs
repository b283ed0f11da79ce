//! Guard rail for the exponential enumerations at the heart of the mixed
//! characteristic computations.

use crate::error::{MdpError, Result};

/// Default cap on enumerated terms (2²⁴ ≈ 1.7·10⁷), sized so that a full
/// k=2, n=24 enumeration is the largest thing that runs by default.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;

/// Maximum number of terms an enumeration may visit before erroring out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    limit: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { limit: DEFAULT_ENUMERATION_BUDGET }
    }
}

impl EnumerationBudget {
    pub fn new(limit: u64) -> Self {
        EnumerationBudget { limit }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Check that `required` terms fit; `required` is u128 because kⁿ
    /// overflows u64 long before anyone could enumerate it.
    pub fn check(&self, required: u128) -> Result<()> {
        if required > self.limit as u128 {
            Err(MdpError::BudgetExceeded { required, budget: self.limit })
        } else {
            Ok(())
        }
    }

    /// Number of ordered k-block set partitions of an n-set, i.e. kⁿ.
    pub fn partition_count(k: usize, n: usize) -> u128 {
        (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_budget() {
        let b = EnumerationBudget::default();
        assert_eq!(b.limit(), 1 << 24);
        assert!(b.check(1 << 24).is_ok());
        assert!(b.check((1 << 24) + 1).is_err());
    }

    #[test]
    fn partition_counts() {
        assert_eq!(EnumerationBudget::partition_count(2, 10), 1024);
        assert_eq!(EnumerationBudget::partition_count(3, 4), 81);
        assert_eq!(EnumerationBudget::partition_count(1, 64), 1);
        // k=2, n=24 fits the default budget exactly
        assert!(EnumerationBudget::default()
            .check(EnumerationBudget::partition_count(2, 24))
            .is_ok());
        assert!(EnumerationBudget::default()
            .check(EnumerationBudget::partition_count(2, 25))
            .is_err());
    }
}
