//! Floating point backends for the recurrences and root polishing.
//!
//! Continuant recurrences lose digits roughly linearly in the block size, so the
//! hot loops are generic over [`Real`] and can run either in `f64` or in a
//! binary big-float with a chosen significand width.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

/// Significand width of IEEE binary64.
pub const DOUBLE_BITS: u32 = 53;

/// Arbitrary precision binary float used when `f64` is not enough.
pub type Extended = FBig<HalfEven, 2>;

pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Lift an `f64` exactly, tagging the value with `bits` of working precision.
    fn from_f64(x: f64, bits: u32) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64, _bits: u32) -> Self {
        x
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    #[inline]
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Real for Extended {
    fn from_f64(x: f64, bits: u32) -> Self {
        let bits = bits.max(DOUBLE_BITS) as usize;
        Extended::try_from(x)
            .expect("finite input")
            .with_precision(bits)
            .value()
    }
    fn to_f64(&self) -> f64 {
        FBig::to_f64(self).value()
    }
    fn abs(&self) -> Self {
        if *self < Extended::ZERO {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn is_zero(&self) -> bool {
        *self == Extended::ZERO
    }
}

/// How the spectral pipeline chooses its working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrecisionPolicy {
    /// Start in `f64` (or 128 bits for large blocks) and escalate on residual failure.
    #[default]
    Auto,
    /// Use exactly this many significand bits, no escalation.
    Fixed(u32),
}

impl PrecisionPolicy {
    /// Block size above which `Auto` skips straight to extended precision.
    pub const LARGE_BLOCK: usize = 20;
    pub const ESCALATION: [u32; 3] = [DOUBLE_BITS, 128, 256];

    /// Ladder of significand widths to try for a block of polynomial degree `n`.
    pub fn ladder(self, n: usize) -> Vec<u32> {
        match self {
            PrecisionPolicy::Fixed(bits) => vec![bits.max(DOUBLE_BITS)],
            PrecisionPolicy::Auto => Self::ESCALATION
                .iter()
                .copied()
                .filter(|&b| n <= Self::LARGE_BLOCK || b > DOUBLE_BITS)
                .collect(),
        }
    }

    /// Reads `HEUN_SPECTRA_PRECISION` (significand bits); falls back to `Auto`.
    pub fn from_env() -> std::result::Result<Self, String> {
        match std::env::var("HEUN_SPECTRA_PRECISION") {
            Ok(raw) => raw
                .trim()
                .parse::<u32>()
                .map_err(|e| format!("HEUN_SPECTRA_PRECISION={raw:?}: {e}"))
                .and_then(|bits| {
                    if bits < DOUBLE_BITS {
                        Err(format!(
                            "HEUN_SPECTRA_PRECISION must be at least {DOUBLE_BITS} bits"
                        ))
                    } else {
                        Ok(PrecisionPolicy::Fixed(bits))
                    }
                }),
            Err(_) => Ok(PrecisionPolicy::Auto),
        }
    }
}

/// Runs `f` with the backend matching `bits`.
pub(crate) fn dispatch<R>(
    bits: u32,
    f64_path: impl FnOnce() -> R,
    extended_path: impl FnOnce() -> R,
) -> R {
    if bits <= DOUBLE_BITS {
        f64_path()
    } else {
        extended_path()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_keeps_bits_f64_loses() {
        // (1 + 2^-80) - 1 vanishes in f64 but not at 128 bits
        let one = Extended::from_f64(1.0, 128);
        let tiny = Extended::from_f64(2f64.powi(-80), 128);
        let diff = (one.clone() + tiny) - one;
        assert_eq!(Real::to_f64(&diff), 2f64.powi(-80));
        assert_eq!((1.0 + 2f64.powi(-80)) - 1.0, 0.0);
    }

    #[test]
    fn abs_and_zero() {
        let x = Extended::from_f64(-2.5, 128);
        assert_eq!(Real::to_f64(&Real::abs(&x)), 2.5);
        assert!(Extended::from_f64(0.0, 128).is_zero());
        assert!(!x.is_zero());
    }

    #[test]
    fn ladder_shapes() {
        assert_eq!(PrecisionPolicy::Auto.ladder(3), vec![53, 128, 256]);
        assert_eq!(PrecisionPolicy::Auto.ladder(30), vec![128, 256]);
        assert_eq!(PrecisionPolicy::Fixed(200).ladder(3), vec![200]);
    }
}
