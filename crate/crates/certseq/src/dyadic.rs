//! Exact dyadic rationals `mant * 2^exp`.
//!
//! Addition, subtraction and multiplication never round; precision is lost
//! only through the explicit rounding helpers, which report a bound on the
//! error they introduced. That split keeps the ball layer honest: every
//! radius adjustment is tied to a rounding step that actually happened.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest exponent gap (in bits) an exact add is willing to bridge.
/// Gaps anywhere near this indicate a logic error upstream, not a precision
/// need, and aligning them would allocate gigabyte mantissas.
const MAX_ALIGN_BITS: i64 = 1 << 26;

#[derive(Clone, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Self { mant, exp }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn zero() -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    /// 2^k.
    pub fn pow2(k: i64) -> Self {
        Self {
            mant: BigInt::one(),
            exp: k,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::new(v.into(), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    /// Bits in the mantissa magnitude (0 for zero).
    pub fn mant_bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Exponent of the leading bit: value magnitude lies in [2^(k-1), 2^k).
    pub fn magnitude_exp(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64)
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let sa = self.exp - e;
        let sb = other.exp - e;
        assert!(
            sa < MAX_ALIGN_BITS && sb < MAX_ALIGN_BITS,
            "dyadic add: exponent gap {} too large",
            sa.max(sb)
        );
        let m = (&self.mant << sa as u64) + (&other.mant << sb as u64);
        Self::new(m, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        if k.is_zero() || self.is_zero() {
            return Self::zero();
        }
        Self::new(&self.mant * k, self.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn cmp_val(&self, other: &Self) -> Ordering {
        // Cheap sign triage first; otherwise compare via an exact subtraction.
        match (self.mant.sign(), other.mant.sign()) {
            (num_bigint::Sign::Minus, num_bigint::Sign::NoSign)
            | (num_bigint::Sign::Minus, num_bigint::Sign::Plus)
            | (num_bigint::Sign::NoSign, num_bigint::Sign::Plus) => return Ordering::Less,
            (num_bigint::Sign::Plus, num_bigint::Sign::NoSign)
            | (num_bigint::Sign::Plus, num_bigint::Sign::Minus)
            | (num_bigint::Sign::NoSign, num_bigint::Sign::Minus) => return Ordering::Greater,
            (num_bigint::Sign::NoSign, num_bigint::Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let ma = self.magnitude_exp().unwrap();
        let mb = other.magnitude_exp().unwrap();
        // Same sign: magnitudes in disjoint binades decide without aligning.
        if ma < mb - 1 || mb < ma - 1 {
            let bigger_is_self = ma > mb;
            return if self.mant.is_positive() == bigger_is_self {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        let diff = self.sub(other);
        if diff.mant.is_zero() {
            Ordering::Equal
        } else if diff.mant.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    /// Exact comparison against p/q (q > 0).
    pub fn cmp_rational(&self, rat: &BigRational) -> Ordering {
        let (p, q) = (rat.numer(), rat.denom());
        // self = m * 2^e; compare m * 2^e * q vs p.
        let (lhs, rhs) = if self.exp >= 0 {
            ((&self.mant << self.exp as u64) * q, p.clone())
        } else {
            (&self.mant * q, p << (-self.exp) as u64)
        };
        lhs.cmp(&rhs)
    }

    /// Round to at most `prec` mantissa bits. Returns the rounded value and an
    /// upper bound on the absolute error introduced.
    pub fn round(&self, prec: u32, dir: Round) -> (Self, Self) {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return (self.clone(), Self::zero());
        }
        let shift = bits - prec as u64;
        let denom = BigInt::one() << shift;
        let q = match dir {
            Round::Down => self.mant.div_floor(&denom),
            Round::Up => self.mant.div_ceil(&denom),
            Round::Nearest => {
                let half = BigInt::one() << (shift - 1);
                (&self.mant + half).div_floor(&denom)
            }
        };
        let err_exp = self.exp + shift as i64 - if dir == Round::Nearest { 1 } else { 0 };
        (
            Self::new(q, self.exp + shift as i64),
            Self::pow2(err_exp),
        )
    }

    /// Greatest integer <= self.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            let s = (-self.exp) as u64;
            assert!(s < MAX_ALIGN_BITS as u64, "dyadic floor: exponent too negative");
            self.mant.div_floor(&(BigInt::one() << s))
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Directed conversion from a rational, accurate to ~`prec` bits.
    pub fn from_rational(rat: &BigRational, prec: u32, dir: Round) -> Self {
        if rat.numer().is_zero() {
            return Self::zero();
        }
        let n = rat.numer();
        let d = rat.denom();
        let k = prec as i64 + d.bits() as i64 - n.bits() as i64 + 2;
        let (num, den, exp) = if k >= 0 {
            (n << k as u64, d.clone(), -k)
        } else {
            (n.clone(), d << (-k) as u64, -k)
        };
        let q = match dir {
            Round::Down => num.div_floor(&den),
            Round::Up => num.div_ceil(&den),
            Round::Nearest => {
                let (fl, rem) = num.div_mod_floor(&den);
                if &rem * 2u32 >= den {
                    fl + 1
                } else {
                    fl
                }
            }
        };
        Self::new(q, exp)
    }

    /// Exact quotient helper used by the ball layer: round self/other to
    /// `prec` bits in the given direction (other must be nonzero).
    pub fn div(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        let rat = BigRational::new(
            self.mant.clone(),
            other.mant.clone(),
        );
        let mut out = Self::from_rational(&rat, prec, dir);
        out.exp += self.exp - other.exp;
        out.normalized()
    }

    /// Floor of the square root, rounded in the requested direction with
    /// roughly `prec` significant bits. Requires self >= 0.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "dyadic sqrt of negative value");
        if self.is_zero() {
            return Self::zero();
        }
        let bits = self.mant.bits();
        let want = 2 * prec as u64 + 4;
        let mut extra = want.saturating_sub(bits);
        if (self.exp - extra as i64) % 2 != 0 {
            extra += 1;
        }
        let m = &self.mant << extra;
        let u = m.to_biguint().expect("nonnegative");
        let s = u.sqrt();
        let out_exp = (self.exp - extra as i64) / 2;
        let exact = &s * &s == u;
        let root = BigInt::from(s);
        match dir {
            Round::Down => Self::new(root, out_exp),
            Round::Up => {
                if exact {
                    Self::new(root, out_exp)
                } else {
                    Self::new(root + 1, out_exp)
                }
            }
            Round::Nearest => Self::new(root, out_exp),
        }
    }

    /// Lossy view for planning and display only; certified paths never use it.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        // Extract the top 64 bits and scale.
        let shift = (bits - 64).max(0);
        let top = (&self.mant >> shift as u64).to_f64().unwrap_or(0.0);
        let e = self.exp + shift;
        if e > 2000 {
            if self.mant.is_positive() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else if e < -2000 {
            0.0
        } else {
            top * 2f64.powi(e as i32)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{} (~{})", self.mant, self.exp, self.to_f64())
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn normalization_strips_trailing_zeros() {
        let x = d(8, -2);
        assert_eq!(x.mant(), &BigInt::from(1));
        assert_eq!(x.exp(), 1);
    }

    #[test]
    fn exact_ring_ops() {
        let a = d(3, -1); // 1.5
        let b = d(5, -2); // 1.25
        assert_eq!(a.add(&b).to_rational(), BigRational::new(11.into(), 4.into()));
        assert_eq!(a.sub(&b).to_rational(), BigRational::new(1.into(), 4.into()));
        assert_eq!(a.mul(&b).to_rational(), BigRational::new(15.into(), 8.into()));
    }

    #[test]
    fn floor_handles_negatives() {
        assert_eq!(d(-3, -1).floor_int(), BigInt::from(-2)); // -1.5 -> -2
        assert_eq!(d(3, -1).floor_int(), BigInt::from(1));
        assert_eq!(d(-4, 0).floor_int(), BigInt::from(-4));
    }

    #[test]
    fn rounding_error_bounds_hold() {
        let x = d(0b100110101110111, -7);
        for dir in [Round::Down, Round::Up, Round::Nearest] {
            let (r, err) = x.round(6, dir);
            let diff = r.sub(&x).abs();
            assert!(diff.cmp_val(&err) != Ordering::Greater, "{dir:?}");
            match dir {
                Round::Down => assert!(r.cmp_val(&x) != Ordering::Greater),
                Round::Up => assert!(r.cmp_val(&x) != Ordering::Less),
                Round::Nearest => {}
            }
        }
    }

    #[test]
    fn from_rational_directed() {
        let third = BigRational::new(1.into(), 3.into());
        let lo = Dyadic::from_rational(&third, 30, Round::Down);
        let hi = Dyadic::from_rational(&third, 30, Round::Up);
        assert!(lo.cmp_rational(&third) != Ordering::Greater);
        assert!(hi.cmp_rational(&third) != Ordering::Less);
        let width = hi.sub(&lo);
        assert!(width.cmp_val(&Dyadic::pow2(-29)) == Ordering::Less);
    }

    #[test]
    fn sqrt_directed() {
        let two = d(2, 0);
        let lo = two.sqrt(60, Round::Down);
        let hi = two.sqrt(60, Round::Up);
        assert!(lo.mul(&lo).cmp_val(&two) != Ordering::Greater);
        assert!(hi.mul(&hi).cmp_val(&two) != Ordering::Less);
        assert!(hi.sub(&lo).cmp_val(&Dyadic::pow2(-55)) == Ordering::Less);
    }

    #[test]
    fn cmp_rational_exact() {
        let x = d(1, -1); // 0.5
        assert_eq!(x.cmp_rational(&BigRational::new(1.into(), 2.into())), Ordering::Equal);
        assert_eq!(x.cmp_rational(&BigRational::new(2.into(), 3.into())), Ordering::Less);
        assert_eq!(x.cmp_rational(&BigRational::new(1.into(), 3.into())), Ordering::Greater);
    }
}
