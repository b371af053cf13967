//! Engine-wide error type.
//!
//! Budget exhaustion that has a meaningful "don't know" answer (sign tests,
//! limits) is reported through dedicated result enums, not through this
//! type; `Error` covers conditions that stop a computation outright.

use alloc::string::String;
use core::fmt;

use crate::arith::Exponent;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Logarithm of a rational that is not strictly positive.
    NonPositiveArgument,
    /// A prime factor needed for a log-atom exceeds the supported range.
    AtomTooLarge,
    /// No nonzero leading series term was found within the zero budget.
    LeadingTermUndecided { scanned: u32 },
    /// Inversion (or leading-term factorization) of an exactly-zero series.
    ExactZero,
    /// The leading coefficient carries log-atoms where a plain rational is
    /// required (series inversion, fractional powers, unit logarithms).
    NonConstantLeading,
    /// Logarithm of a series whose leading coefficient is not positive.
    NonPositiveLeading,
    /// Fractional power of a series whose leading coefficient is not positive.
    NegativeLeading,
    /// c^q is irrational for the leading coefficient c (e.g. 2^(1/2)).
    NonRationalRadicand,
    /// Unit logarithm requested for a series of nonzero order.
    NonZeroOrder,
    /// The exponent lattice would grow past the configured cap.
    RamificationCapExceeded { needed: u32, cap: u32 },
    /// A shift or evaluation point lies outside the working domain.
    PointOutsideDomain,
    /// Interval evaluation hit a log/power/division domain violation at a
    /// concrete sample point.
    DomainViolationAtPoint { detail: String },
    /// An exponent left the supported range during evaluation.
    ExponentOverflow { at: Exponent },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveArgument => write!(f, "logarithm of a non-positive rational"),
            Error::AtomTooLarge => write!(f, "prime factor too large for a log-atom"),
            Error::LeadingTermUndecided { scanned } => {
                write!(f, "no nonzero leading term within budget ({scanned} slots scanned)")
            }
            Error::ExactZero => write!(f, "operation undefined on the exactly-zero series"),
            Error::NonConstantLeading => {
                write!(f, "leading coefficient carries log-atoms where a rational is required")
            }
            Error::NonPositiveLeading => {
                write!(f, "logarithm requires a positive leading coefficient")
            }
            Error::NegativeLeading => {
                write!(f, "fractional power requires a positive leading coefficient")
            }
            Error::NonRationalRadicand => {
                write!(f, "leading coefficient has no rational root of the requested order")
            }
            Error::NonZeroOrder => write!(f, "unit logarithm requires a series of order zero"),
            Error::RamificationCapExceeded { needed, cap } => {
                write!(f, "exponent denominator {needed} exceeds the cap {cap}")
            }
            Error::PointOutsideDomain => write!(f, "point outside the working domain"),
            Error::DomainViolationAtPoint { detail } => {
                write!(f, "domain violation at sample point: {detail}")
            }
            Error::ExponentOverflow { at } => write!(f, "exponent out of range near {at}"),
        }
    }
}

#[cfg(test)]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
