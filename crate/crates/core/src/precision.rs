//! Working-precision context for all extended-real arithmetic.

use crate::error::{Error, Result};
use rug::{ops::Pow, Float, Rational};

/// Binary guard bits added on top of the requested decimal precision so that
/// intermediate rounding stays below one decimal ulp of the stated digits.
const GUARD_BITS: u32 = 32;

/// Decimal working precision plus the absolute bisection tolerance on E.
///
/// Everything that touches extended-real arithmetic takes one of these; two
/// runs with the same context are bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionContext {
    decimal_digits: u32,
    root_tolerance: Float,
}

impl PrecisionContext {
    /// Minimum supported precision; below this the large Hankel determinants
    /// are numerically meaningless.
    pub const MIN_DIGITS: u32 = 30;

    /// Context with the default root tolerance for the given digit count:
    /// 10^-25, floored at the 10^(-digits+10) validity bound.
    pub fn new(decimal_digits: u32) -> Result<Self> {
        let bits = bits_for(decimal_digits);
        let exp = -(decimal_digits.min(35) as i32) + 10;
        let tol = Float::with_val(bits, 10).pow(exp);
        Self::with_root_tolerance(decimal_digits, tol)
    }

    /// Context with an explicit root tolerance.
    pub fn with_root_tolerance(decimal_digits: u32, root_tolerance: Float) -> Result<Self> {
        if decimal_digits < Self::MIN_DIGITS {
            return Err(Error::InvalidInput(format!(
                "decimal_digits must be >= {}, got {decimal_digits}",
                Self::MIN_DIGITS
            )));
        }
        let bits = bits_for(decimal_digits);
        let floor = Float::with_val(bits, 10).pow(-(decimal_digits as i32) + 10);
        if !(root_tolerance.is_finite() && root_tolerance.is_sign_positive())
            || root_tolerance.is_zero()
        {
            return Err(Error::InvalidInput(
                "root_tolerance must be positive and finite".into(),
            ));
        }
        if root_tolerance < floor {
            return Err(Error::InvalidInput(format!(
                "root_tolerance {root_tolerance:e} below 10^(-{decimal_digits}+10)"
            )));
        }
        Ok(Self {
            decimal_digits,
            root_tolerance,
        })
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn root_tolerance(&self) -> &Float {
        &self.root_tolerance
    }

    /// Binary precision used for every `Float` built under this context.
    pub fn prec_bits(&self) -> u32 {
        bits_for(self.decimal_digits)
    }

    /// A fresh `Float` at working precision.
    pub fn float<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec_bits(), value)
    }

    /// Exact rational rounded once into working precision.
    pub fn float_from_rational(&self, value: &Rational) -> Float {
        Float::with_val(self.prec_bits(), value)
    }

    /// 10^exp at working precision.
    pub fn pow10(&self, exp: i32) -> Float {
        Float::with_val(self.prec_bits(), 10).pow(exp)
    }

    /// Same digits, doubled: used by precision auto-escalation.
    pub fn doubled(&self) -> Self {
        // Tolerance keeps its value; it already satisfies the looser floor.
        Self {
            decimal_digits: self.decimal_digits * 2,
            root_tolerance: Float::with_val(
                bits_for(self.decimal_digits * 2),
                &self.root_tolerance,
            ),
        }
    }
}

/// log2(10) ≈ 3.3219...; round up and add guard bits.
pub fn bits_for(decimal_digits: u32) -> u32 {
    ((decimal_digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}
