//! Machine parameters bounding every theory and every evaluation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The bounded machine envelope `mach`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachParams {
    /// Number of characters in the alphabet.
    pub nchar: u32,
    /// Maximum string length of a name token.
    pub nstr: usize,
    /// Maximum list length (program length, vector dimension).
    pub nlst: usize,
    /// Maximum absolute machine integer.
    pub nint: i64,
    /// Maximum premise length of a stored rule.
    pub nprem: usize,
    /// Execution budget in statement executions.
    pub tcpu: u64,
    /// Rational resolution exponent: epsilon is `10^-eps_denom`.
    pub eps_denom: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachError {
    #[error("machine parameter {0} must be strictly positive")]
    NotPositive(&'static str),
    #[error("nprem ({nprem}) exceeds nlst ({nlst})")]
    PremiseTooLong { nprem: usize, nlst: usize },
    #[error("eps_denom {0} is too large for the integer range")]
    Resolution(u32),
}

impl Default for MachParams {
    fn default() -> Self {
        MachParams {
            nchar: 41,
            nstr: 16,
            nlst: 256,
            nint: 1_000_000_000,
            nprem: 12,
            tcpu: 1_000_000,
            eps_denom: 3,
        }
    }
}

impl MachParams {
    pub fn validate(&self) -> Result<(), MachError> {
        if self.nchar == 0 {
            return Err(MachError::NotPositive("nchar"));
        }
        if self.nstr == 0 {
            return Err(MachError::NotPositive("nstr"));
        }
        if self.nlst == 0 {
            return Err(MachError::NotPositive("nlst"));
        }
        if self.nint <= 0 {
            return Err(MachError::NotPositive("nint"));
        }
        if self.nprem == 0 {
            return Err(MachError::NotPositive("nprem"));
        }
        if self.tcpu == 0 {
            return Err(MachError::NotPositive("tcpu"));
        }
        if self.eps_denom == 0 {
            return Err(MachError::NotPositive("eps_denom"));
        }
        if self.eps_denom > 18 {
            return Err(MachError::Resolution(self.eps_denom));
        }
        if self.nprem > self.nlst {
            return Err(MachError::PremiseTooLong { nprem: self.nprem, nlst: self.nlst });
        }
        Ok(())
    }

    /// `10^eps_denom`, the number of rational steps per unit.
    pub fn scale(&self) -> i64 {
        10i64.pow(self.eps_denom)
    }

    pub fn with_nint(mut self, nint: i64) -> Self {
        self.nint = nint;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        assert!(MachParams::default().validate().is_ok());
    }

    #[test]
    fn rejects_bad_envelopes() {
        let m = MachParams { nint: 0, ..Default::default() };
        assert_eq!(m.validate(), Err(MachError::NotPositive("nint")));
        let m = MachParams { nprem: 10, nlst: 4, ..Default::default() };
        assert!(matches!(m.validate(), Err(MachError::PremiseTooLong { .. })));
    }
}
