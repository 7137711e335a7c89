//! Real-number sources: exact descriptions of the reals the library can
//! evaluate, each able to produce a certified enclosure at any precision.
//!
//! Quadratic surds additionally support exact integer-arithmetic floors,
//! fractional parts, and sign tests, which the sequence layer uses to avoid
//! precision escalation entirely for those sources.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

use crate::ball::{self, Ball};
use crate::cf::ContinuedFraction;
use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};

pub(crate) fn pow10(k: u64) -> BigInt {
    BigInt::from(10u32).pow(k as u32)
}

/// Exact value (a + b√d)/c with d ≥ 2 non-square, b ≠ 0, c > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    a: BigInt,
    b: BigInt,
    d: BigUint,
    c: BigInt,
}

fn is_square(n: &BigUint) -> bool {
    let s = n.sqrt();
    &s * &s == *n
}

impl Surd {
    pub fn new(a: BigInt, b: BigInt, d: BigUint, c: BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidParameter("surd denominator is zero".into()));
        }
        if b.is_zero() {
            return Err(Error::InvalidParameter(
                "surd with zero radical coefficient is a rational".into(),
            ));
        }
        if d < BigUint::from(2u32) || is_square(&d) {
            return Err(Error::InvalidParameter(format!(
                "radicand {d} is a perfect square or below 2"
            )));
        }
        let (a, b, c) = if c.is_negative() { (-a, -b, -c) } else { (a, b, c) };
        let g = a.gcd(&b).gcd(&c);
        Ok(Self {
            a: &a / &g,
            b: &b / &g,
            d,
            c: &c / &g,
        })
    }

    pub fn golden_ratio() -> Self {
        Self::new(BigInt::one(), BigInt::one(), BigUint::from(5u32), BigInt::from(2))
            .expect("static parameters")
    }

    pub fn sqrt_int(d: u64) -> Result<Self> {
        Self::new(BigInt::zero(), BigInt::one(), BigUint::from(d), BigInt::one())
    }

    pub fn parts(&self) -> (&BigInt, &BigInt, &BigUint, &BigInt) {
        (&self.a, &self.b, &self.d, &self.c)
    }

    /// Exact floor of b√d (b may be negative; √d is irrational).
    fn floor_b_sqrt_d(b: &BigInt, d: &BigUint) -> BigInt {
        let mag = (b.magnitude() * b.magnitude() * d).sqrt();
        if b.is_positive() {
            BigInt::from(mag)
        } else if b.is_zero() {
            BigInt::zero()
        } else {
            // b√d = -|b|√d, irrational: floor = -(isqrt + 1).
            -(BigInt::from(mag) + BigInt::one())
        }
    }

    /// Exact ⌊n · self⌋ using only integer square roots.
    pub fn floor_times(&self, n: &BigUint) -> BigInt {
        let n = BigInt::from(n.clone());
        let na = &self.a * &n;
        let nb = &self.b * &n;
        // floor((na + nb√d)/c) with c > 0: since nb√d is irrational, the
        // open interval (s, s+1) around it contains no integer multiple
        // crossing, so the floor equals floor((na + s)/c) with s = ⌊nb√d⌋.
        let s = Self::floor_b_sqrt_d(&nb, &self.d);
        (na + s).div_floor(&self.c)
    }

    /// Exact ⌊n · self + 1/2⌋ (round half up to the nearest integer).
    pub fn round_times_half_up(&self, n: &BigUint) -> BigInt {
        let n = BigInt::from(n.clone());
        // n·self + 1/2 = (2na + c + 2nb√d) / (2c)
        let na2 = BigInt::from(2) * &self.a * &n + &self.c;
        let nb2 = BigInt::from(2) * &self.b * &n;
        let s = Self::floor_b_sqrt_d(&nb2, &self.d);
        (na2 + s).div_floor(&(BigInt::from(2) * &self.c))
    }

    /// Exact {n · self} as a surd in the same field.
    pub fn frac_times(&self, n: &BigUint) -> Surd {
        let f = self.floor_times(n);
        let n = BigInt::from(n.clone());
        Surd {
            a: &self.a * &n - f * &self.c,
            b: &self.b * &n,
            d: self.d.clone(),
            c: self.c.clone(),
        }
    }

    /// Exact n·self − m as a surd (not reduced to lowest terms).
    pub fn times_minus_int(&self, n: &BigInt, m: &BigInt) -> Surd {
        Surd {
            a: &self.a * n - m * &self.c,
            b: &self.b * n,
            d: self.d.clone(),
            c: self.c.clone(),
        }
    }

    /// Exact square, still in ℚ(√d).
    pub fn square(&self) -> Surd {
        Surd {
            a: &self.a * &self.a + &self.b * &self.b * BigInt::from(self.d.clone()),
            b: BigInt::from(2) * &self.a * &self.b,
            d: self.d.clone(),
            c: &self.c * &self.c,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Surd {
        Surd {
            a: &self.a * k,
            b: &self.b * k,
            d: self.d.clone(),
            c: self.c.clone(),
        }
    }

    /// Exact product of two values in the same ℚ(√d).
    pub fn mul_surd(&self, o: &Surd) -> Surd {
        assert_eq!(self.d, o.d, "products require a common radicand");
        Surd {
            a: &self.a * &o.a + &self.b * &o.b * BigInt::from(self.d.clone()),
            b: &self.a * &o.b + &self.b * &o.a,
            d: self.d.clone(),
            c: &self.c * &o.c,
        }
    }

    /// Exact e-th power (e ≥ 1).
    pub fn pow_u32(&self, e: u32) -> Surd {
        assert!(e >= 1);
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul_surd(self);
        }
        acc
    }

    /// Exact negation / absolute value.
    pub fn neg_val(&self) -> Surd {
        Surd { a: -&self.a, b: -&self.b, d: self.d.clone(), c: self.c.clone() }
    }

    pub fn abs_val(&self) -> Surd {
        if self.is_negative() { self.neg_val() } else { self.clone() }
    }

    /// Exact three-way comparison against a rational.
    pub fn cmp_rational(&self, rat: &BigRational) -> Ordering {
        // (a + b√d)/c vs p/q  ⟺  q·b√d vs p·c − q·a   (c > 0, q > 0)
        let p = rat.numer();
        let q = rat.denom();
        let l = q * &self.b;
        let r = p * &self.c - q * &self.a;
        match (l.sign(), r.sign()) {
            (num_bigint::Sign::NoSign, _) => BigInt::zero().cmp(&r),
            (num_bigint::Sign::Plus, num_bigint::Sign::Minus)
            | (num_bigint::Sign::Plus, num_bigint::Sign::NoSign) => Ordering::Greater,
            (num_bigint::Sign::Minus, num_bigint::Sign::Plus)
            | (num_bigint::Sign::Minus, num_bigint::Sign::NoSign) => Ordering::Less,
            (num_bigint::Sign::Plus, num_bigint::Sign::Plus) => {
                let lhs = &l * &l * BigInt::from(self.d.clone());
                let rhs = &r * &r;
                match lhs.cmp(&rhs) {
                    Ordering::Equal => unreachable!("non-square radicand cannot yield equality"),
                    o => o,
                }
            }
            (num_bigint::Sign::Minus, num_bigint::Sign::Minus) => {
                let lhs = &l * &l * BigInt::from(self.d.clone());
                let rhs = &r * &r;
                match rhs.cmp(&lhs) {
                    Ordering::Equal => unreachable!("non-square radicand cannot yield equality"),
                    o => o,
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.cmp_rational(&BigRational::zero()) == Ordering::Less
    }

    /// Certified enclosure with absolute radius at most 2^−bits.
    pub fn approx(&self, bits: u32) -> Ball {
        let wp = bits + self.b.bits() as u32 + 16;
        let dd = Dyadic::from_int(BigInt::from(self.d.clone()));
        let slo = dd.sqrt(wp, Round::Down);
        let shi = dd.sqrt(wp, Round::Up);
        let (slo, shi) = if self.b.is_negative() { (shi, slo) } else { (slo, shi) };
        let lo_rat = (BigRational::from_integer(self.a.clone())
            + BigRational::from_integer(self.b.clone()) * slo.to_rational())
            / BigRational::from_integer(self.c.clone());
        let hi_rat = (BigRational::from_integer(self.a.clone())
            + BigRational::from_integer(self.b.clone()) * shi.to_rational())
            / BigRational::from_integer(self.c.clone());
        let lo = Dyadic::from_rational(&lo_rat, wp, Round::Down);
        let hi = Dyadic::from_rational(&hi_rat, wp, Round::Up);
        Ball::from_endpoints(lo, hi)
    }
}

/// Decimal series Σ 10^(−d_i): an explicit strictly increasing prefix with
/// an optional tail rule that keeps doubling the last exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecimalSchedule {
    prefix: Vec<u64>,
    doubling_tail: bool,
}

impl DecimalSchedule {
    pub fn new(prefix: Vec<u64>, doubling_tail: bool) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::InvalidParameter("empty decimal schedule".into()));
        }
        if prefix[0] == 0 || !prefix.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "decimal schedule must be strictly increasing and positive".into(),
            ));
        }
        Ok(Self { prefix, doubling_tail })
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn has_tail(&self) -> bool {
        self.doubling_tail
    }

    /// The i-th exponent (0-based), if the schedule extends that far.
    pub fn exponent(&self, i: usize) -> Option<u64> {
        if i < self.prefix.len() {
            return Some(self.prefix[i]);
        }
        if !self.doubling_tail {
            return None;
        }
        let extra = (i - self.prefix.len() + 1) as u32;
        let last = *self.prefix.last().unwrap();
        last.checked_mul(1u64.checked_shl(extra)?)
    }

    /// Exact value when the series is finite.
    pub fn exact_value(&self) -> Option<BigRational> {
        if self.doubling_tail {
            return None;
        }
        let dmax = *self.prefix.last().unwrap();
        let den = pow10(dmax);
        let mut num = BigInt::zero();
        for &d in &self.prefix {
            num += pow10(dmax - d);
        }
        Some(BigRational::new(num, den))
    }

    pub fn approx(&self, bits: u32) -> Ball {
        let digits = (bits as f64 * std::f64::consts::LOG10_2).ceil() as u64 + 1;
        let mut included: Vec<u64> = Vec::new();
        let mut i = 0usize;
        let next = loop {
            match self.exponent(i) {
                Some(d) if d <= digits => {
                    included.push(d);
                    i += 1;
                }
                other => break other,
            }
        };
        let dmax = *included.last().unwrap_or(&1);
        let den = pow10(dmax);
        let mut num = BigInt::zero();
        for &d in &included {
            num += pow10(dmax - d);
        }
        let sum = BigRational::new(num, den);
        let b = Ball::from_rational(&sum, bits + 16);
        match next {
            None if !self.doubling_tail => b,
            // A doubling tail whose next exponent overflows u64 contributes
            // less than 10^(−2^63); bound it by a coarse dyadic margin.
            None => b.widen(&Dyadic::pow2(-(bits as i64) - 8)),
            Some(dn) => {
                let tail = BigRational::new(BigInt::from(2), pow10(dn));
                b.widen(&Dyadic::from_rational(&tail, 16, Round::Up))
            }
        }
    }
}

/// A real number the library can both describe exactly and enclose at any
/// requested precision.
#[derive(Debug, Clone)]
pub enum RealSource {
    Rational(BigRational),
    QuadraticSurd(Surd),
    CfDefined(ContinuedFraction),
    DecimalSeries(DecimalSchedule),
    /// s·π for exact rational s ≠ 0.
    PiMultiple(BigRational),
    EulerE,
}

impl RealSource {
    pub fn rational_i64(p: i64, q: i64) -> Self {
        RealSource::Rational(BigRational::new(p.into(), q.into()))
    }

    pub fn phi() -> Self {
        RealSource::QuadraticSurd(Surd::golden_ratio())
    }

    pub fn sqrt2() -> Self {
        RealSource::QuadraticSurd(Surd::sqrt_int(2).expect("2 is not a square"))
    }

    /// The exact rational value, when this source is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            RealSource::Rational(r) => Some(r.clone()),
            RealSource::CfDefined(cf) => cf.exact_rational(),
            RealSource::DecimalSeries(ds) => ds.exact_value(),
            RealSource::QuadraticSurd(_) | RealSource::EulerE => None,
            RealSource::PiMultiple(_) => None,
        }
    }

    /// True when the value is provably irrational from its description.
    pub fn provably_irrational(&self) -> bool {
        match self {
            RealSource::Rational(_) => false,
            RealSource::QuadraticSurd(_) => true,
            RealSource::PiMultiple(s) => !s.is_zero(),
            RealSource::EulerE => true,
            RealSource::DecimalSeries(ds) => ds.has_tail(),
            RealSource::CfDefined(cf) => !cf.is_finite(),
        }
    }

    /// Certified enclosure with absolute radius at most 2^−bits.
    pub fn approx(&self, bits: u32) -> Ball {
        match self {
            RealSource::Rational(r) => {
                let pad = (r.numer().bits() as i64 - r.denom().bits() as i64).max(0) as u32;
                Ball::from_rational(r, bits + pad + 8)
            }
            RealSource::QuadraticSurd(s) => s.approx(bits),
            RealSource::CfDefined(cf) => cf.approx(bits),
            RealSource::DecimalSeries(ds) => ds.approx(bits),
            RealSource::PiMultiple(s) => {
                let pad = (s.numer().bits() as i64 - s.denom().bits() as i64).max(0) as u32 + 4;
                let p = ball::pi(bits + pad + 8);
                let sb = Ball::from_rational(s, bits + pad + 8);
                p.mul(&sb, bits + pad + 8)
            }
            RealSource::EulerE => ball::euler_e(bits + 8),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn surd_rejects_degenerate_parameters() {
        assert!(Surd::new(1.into(), 1.into(), 4u32.into(), 1.into()).is_err());
        assert!(Surd::new(1.into(), 0.into(), 5u32.into(), 1.into()).is_err());
        assert!(Surd::new(1.into(), 1.into(), 5u32.into(), 0.into()).is_err());
    }

    #[test]
    fn surd_comparison_is_exact() {
        let phi = Surd::golden_ratio();
        // φ = 1.6180339887...
        assert_eq!(phi.cmp_rational(&rat(1618033, 1000000)), Ordering::Greater);
        assert_eq!(phi.cmp_rational(&rat(1618034, 1000000)), Ordering::Less);
        let neg = Surd::new(BigInt::from(-3), BigInt::one(), 2u32.into(), BigInt::one()).unwrap();
        // √2 − 3 = −1.5857...
        assert_eq!(neg.cmp_rational(&rat(-2, 1)), Ordering::Greater);
        assert_eq!(neg.cmp_rational(&rat(-1, 1)), Ordering::Less);
        assert!(neg.is_negative());
    }

    #[test]
    fn surd_floor_times_matches_isqrt_oracle() {
        let s2 = Surd::sqrt_int(2).unwrap();
        for n in [1u64, 2, 3, 10, 99, 12345, 1_000_000] {
            let nb = BigUint::from(n);
            let expect = BigInt::from((BigUint::from(2u32) * &nb * &nb).sqrt());
            assert_eq!(s2.floor_times(&nb), expect, "n={n}");
        }
        let phi = Surd::golden_ratio();
        // ⌊nφ⌋ = (n + ⌊√(5n²)⌋) div 2
        for n in [1u64, 2, 5, 100, 987654] {
            let nb = BigUint::from(n);
            let s = BigInt::from((BigUint::from(5u32) * &nb * &nb).sqrt());
            let expect = (BigInt::from(n) + s).div_floor(&BigInt::from(2));
            assert_eq!(phi.floor_times(&nb), expect, "n={n}");
        }
    }

    #[test]
    fn surd_frac_times_two_phi_is_sqrt5_minus_2() {
        let phi = Surd::golden_ratio();
        let f = phi.frac_times(&BigUint::from(2u32));
        // {2φ} = √5 − 2 = 0.2360679...
        assert_eq!(f.cmp_rational(&rat(236067, 1000000)), Ordering::Greater);
        assert_eq!(f.cmp_rational(&rat(236068, 1000000)), Ordering::Less);
    }

    #[test]
    fn surd_approx_contains_value() {
        let s2 = Surd::sqrt_int(2).unwrap();
        let b = s2.approx(90);
        assert_eq!(b.cmp_rational(&rat(141421356237309504, 100000000000000000)).unwrap(), Ordering::Greater);
        assert_eq!(b.cmp_rational(&rat(141421356237309505, 100000000000000000)).unwrap(), Ordering::Less);
        assert!(b.rad().to_f64() <= 2f64.powi(-90));
    }

    #[test]
    fn decimal_schedule_finite_is_exact() {
        let ds = DecimalSchedule::new(vec![3, 6], false).unwrap();
        assert_eq!(ds.exact_value().unwrap(), rat(1001, 1_000_000));
        let b = ds.approx(64);
        assert!(b.contains_rational(&rat(1001, 1_000_000)));
    }

    #[test]
    fn decimal_schedule_doubling_tail_bounds() {
        let ds = DecimalSchedule::new(vec![2, 5, 10], true).unwrap();
        assert_eq!(ds.exponent(3), Some(20));
        assert_eq!(ds.exponent(4), Some(40));
        assert!(ds.exact_value().is_none());
        let b = ds.approx(64);
        // value = 0.01001000010000000001…
        assert_eq!(b.cmp_rational(&rat(1001, 100000)).unwrap(), Ordering::Greater);
        assert_eq!(b.cmp_rational(&rat(10011, 1000000)).unwrap(), Ordering::Less);
    }

    #[test]
    fn pi_multiple_approx() {
        let x = RealSource::PiMultiple(rat(1, 2));
        let b = x.approx(70);
        // π/2 = 1.5707963267948966...
        assert_eq!(b.cmp_rational(&rat(15707963267948966, 10000000000000000)).unwrap(), Ordering::Greater);
        assert_eq!(b.cmp_rational(&rat(15707963267948967, 10000000000000000)).unwrap(), Ordering::Less);
    }

    #[test]
    fn approx_radius_honors_absolute_target() {
        for bits in [10u32, 53, 100] {
            for x in [
                RealSource::sqrt2(),
                RealSource::phi(),
                RealSource::PiMultiple(rat(1, 4)),
                RealSource::EulerE,
                RealSource::Rational(rat(22, 7)),
            ] {
                let b = x.approx(bits);
                assert!(
                    b.rad().to_f64() <= 2f64.powi(-(bits as i32)),
                    "{x:?} at {bits} bits: rad {}",
                    b.rad().to_f64()
                );
            }
        }
    }
}
