//! Scalar arithmetic with a configurable unit roundoff.
//!
//! Every numerical kernel in this crate is written against the [`Arith`]
//! trait instead of using `+ - * /` directly. [`PrecisionConfig`] rounds the
//! result of each elementary operation to `p` significand bits (round to
//! nearest, ties to even), so the roundoff phenomena that appear near
//! `mu ~ sqrt(u)` in double precision can be moved to a larger `mu` by
//! lowering `p`. [`ExtendedArith`] runs the same kernels in double-double
//! arithmetic and is used to build reference ("exact") quantities.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

/// Significand width of an IEEE binary64 value, including the hidden bit.
pub const DOUBLE_BITS: u32 = 53;
/// Smallest significand width accepted by [`PrecisionConfig::emulated`].
pub const MIN_BITS: u32 = 11;

/// Elementary operations on some real-number representation.
///
/// Implementations decide how (and whether) each result is rounded. Negation
/// and absolute value are always exact.
pub trait Arith {
    type Real: Copy + PartialOrd + Debug + PartialEq + 'static;

    /// Converts a literal into this representation (rounding if needed).
    fn lit(&self, x: f64) -> Self::Real;
    fn add(&self, a: Self::Real, b: Self::Real) -> Self::Real;
    fn sub(&self, a: Self::Real, b: Self::Real) -> Self::Real;
    fn mul(&self, a: Self::Real, b: Self::Real) -> Self::Real;
    fn div(&self, a: Self::Real, b: Self::Real) -> Self::Real;
    fn sqrt(&self, a: Self::Real) -> Self::Real;
    fn neg(&self, a: Self::Real) -> Self::Real;
    fn abs(&self, a: Self::Real) -> Self::Real;
    fn to_f64(&self, a: Self::Real) -> f64;

    fn zero(&self) -> Self::Real {
        self.lit(0.0)
    }

    fn one(&self) -> Self::Real {
        self.lit(1.0)
    }

    /// `a / b` for two literals, e.g. `frac(1.0, 3.0)` for the constant 1/3.
    fn frac(&self, a: f64, b: f64) -> Self::Real {
        self.div(self.lit(a), self.lit(b))
    }

    fn square(&self, a: Self::Real) -> Self::Real {
        self.mul(a, a)
    }

    fn is_finite(&self, a: Self::Real) -> bool {
        self.to_f64(a).is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionMode {
    /// Plain IEEE double operations.
    Native,
    /// Double operations whose results are re-rounded to `bits` significand bits.
    Emulated,
}

/// Working precision of a solve. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    bits: u32,
    mode: PrecisionMode,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self::native()
    }
}

impl PrecisionConfig {
    pub const fn native() -> Self {
        Self {
            bits: DOUBLE_BITS,
            mode: PrecisionMode::Native,
        }
    }

    /// Emulates a binary format with `bits` significand bits (hidden bit
    /// included). Returns `None` outside `[11, 53]`.
    pub fn emulated(bits: u32) -> Option<Self> {
        (MIN_BITS..=DOUBLE_BITS).contains(&bits).then_some(Self {
            bits,
            mode: PrecisionMode::Emulated,
        })
    }

    /// Native for 53 bits, emulated otherwise.
    pub fn from_bits(bits: u32) -> Option<Self> {
        if bits == DOUBLE_BITS {
            Some(Self::native())
        } else {
            Self::emulated(bits)
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mode(&self) -> PrecisionMode {
        self.mode
    }

    /// Unit roundoff `u = 2^-p`.
    pub fn unit_roundoff(&self) -> f64 {
        (-(self.bits as f64)).exp2()
    }

    #[inline]
    pub fn round(&self, x: f64) -> f64 {
        match self.mode {
            PrecisionMode::Native => x,
            PrecisionMode::Emulated => round_to_bits(x, self.bits),
        }
    }
}

/// Rounds `x` to `bits` significand bits, nearest-even.
///
/// Works on the raw binary64 encoding: a carry out of the significand bumps
/// the exponent, and a carry out of the largest finite binade yields
/// infinity. Subnormal inputs are rounded on the same absolute grid as the
/// smallest normal binade.
pub fn round_to_bits(x: f64, bits: u32) -> f64 {
    if bits >= DOUBLE_BITS || !x.is_finite() || x == 0.0 {
        return x;
    }
    let drop = DOUBLE_BITS - bits;
    let raw = x.to_bits();
    let mask = (1u64 << drop) - 1;
    let half = 1u64 << (drop - 1);
    let low = raw & mask;
    let mut kept = raw & !mask;
    let lsb_odd = (kept >> drop) & 1 == 1;
    if low > half || (low == half && lsb_odd) {
        kept += 1u64 << drop;
    }
    f64::from_bits(kept)
}

impl Arith for PrecisionConfig {
    type Real = f64;

    #[inline]
    fn lit(&self, x: f64) -> f64 {
        self.round(x)
    }

    #[inline]
    fn add(&self, a: f64, b: f64) -> f64 {
        self.round(a + b)
    }

    #[inline]
    fn sub(&self, a: f64, b: f64) -> f64 {
        self.round(a - b)
    }

    #[inline]
    fn mul(&self, a: f64, b: f64) -> f64 {
        self.round(a * b)
    }

    #[inline]
    fn div(&self, a: f64, b: f64) -> f64 {
        self.round(a / b)
    }

    #[inline]
    fn sqrt(&self, a: f64) -> f64 {
        self.round(a.sqrt())
    }

    #[inline]
    fn neg(&self, a: f64) -> f64 {
        -a
    }

    #[inline]
    fn abs(&self, a: f64) -> f64 {
        a.abs()
    }

    #[inline]
    fn to_f64(&self, a: f64) -> f64 {
        a
    }
}

/// Double-double arithmetic (about 106 significand bits).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtendedArith;

impl Arith for ExtendedArith {
    type Real = TwoFloat;

    fn lit(&self, x: f64) -> TwoFloat {
        TwoFloat::from(x)
    }

    fn add(&self, a: TwoFloat, b: TwoFloat) -> TwoFloat {
        a + b
    }

    fn sub(&self, a: TwoFloat, b: TwoFloat) -> TwoFloat {
        a - b
    }

    fn mul(&self, a: TwoFloat, b: TwoFloat) -> TwoFloat {
        a * b
    }

    /// Long division with three quotient digits. The `TwoFloat / TwoFloat`
    /// operator of the twofloat crate loses the low word when `b.hi * (1 /
    /// b.hi)` rounds to one, so it is not used.
    fn div(&self, a: TwoFloat, b: TwoFloat) -> TwoFloat {
        let q1 = a.hi() / b.hi();
        let r = a - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        TwoFloat::new_add(q1, q2) + q3
    }

    fn sqrt(&self, a: TwoFloat) -> TwoFloat {
        a.sqrt()
    }

    fn neg(&self, a: TwoFloat) -> TwoFloat {
        -a
    }

    fn abs(&self, a: TwoFloat) -> TwoFloat {
        a.abs()
    }

    fn to_f64(&self, a: TwoFloat) -> f64 {
        a.hi() + a.lo()
    }
}
