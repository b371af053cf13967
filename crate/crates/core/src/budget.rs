//! Work budgets threaded through every semi-decidable operation.
//!
//! Zero-testing a lazy series and sign-testing a polynomial in log-atoms
//! are only semi-decidable, so each such operation takes an explicit
//! budget and reports "undecided" instead of looping.

/// Budgets for leading-term searches, sign refinement and grid growth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of grid slots scanned when hunting for a nonzero term.
    pub zero_terms: u32,
    /// Cap on the exponent denominator (series ramification).
    pub ram_cap: u32,
    /// Maximum precision, in bits, spent on numeric sign decisions.
    pub sign_bits: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { zero_terms: 64, ram_cap: 64, sign_bits: 128 }
    }
}

impl Budget {
    pub fn with_zero_terms(mut self, n: u32) -> Self {
        self.zero_terms = n;
        self
    }

    pub fn with_ram_cap(mut self, n: u32) -> Self {
        self.ram_cap = n;
        self
    }

    pub fn with_sign_bits(mut self, n: u32) -> Self {
        self.sign_bits = n;
        self
    }
}
