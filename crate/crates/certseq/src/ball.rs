//! Ball arithmetic: enclosures `mid ± rad` with exact dyadic midpoints.
//!
//! Every operation returns a ball that contains the exact image of every
//! point of its input balls (inclusion isotonicity). Midpoints are rounded
//! to the working precision and the rounding error is folded into the
//! radius, which is itself only ever rounded upward. Elementary functions
//! carry explicit truncation bounds for their series tails.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};

/// Radii never need more than a few correct digits.
const RADIUS_BITS: u32 = 24;

#[derive(Clone)]
pub struct Ball {
    mid: Dyadic,
    rad: Dyadic,
}

impl Ball {
    pub fn exact(mid: Dyadic) -> Self {
        Self {
            mid,
            rad: Dyadic::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::exact(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::exact(Dyadic::one())
    }

    pub fn from_parts(mid: Dyadic, rad: Dyadic) -> Self {
        assert!(!rad.is_negative());
        Self { mid, rad }
    }

    pub fn from_endpoints(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo.cmp_val(&hi) != Ordering::Greater, "endpoints out of order");
        let mid = lo.add(&hi).mul_pow2(-1);
        let rad = hi.sub(&lo).mul_pow2(-1);
        Self { mid, rad }
    }

    /// Enclosure of p/q with a radius bounded by the actual conversion error.
    pub fn from_rational(rat: &BigRational, prec: u32) -> Self {
        let mid = Dyadic::from_rational(rat, prec + 2, Round::Nearest);
        let resid = (mid.to_rational() - rat).abs();
        if resid.is_zero() {
            return Self::exact(mid);
        }
        let rad = Dyadic::from_rational(&resid, 16, Round::Up);
        Self { mid, rad }
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn lo(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn hi(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    /// Upper bound on |x| over the ball.
    pub fn abs_hi(&self) -> Dyadic {
        self.mid.abs().add(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs().cmp_val(&self.rad) != Ordering::Greater
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo().is_positive()
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.hi().is_negative()
    }

    pub fn contains_rational(&self, rat: &BigRational) -> bool {
        self.lo().cmp_rational(rat) != Ordering::Greater
            && self.hi().cmp_rational(rat) != Ordering::Less
    }

    /// Certified three-way comparison against an exact rational. `None` when
    /// the ball straddles the value without pinning it.
    pub fn cmp_rational(&self, rat: &BigRational) -> Option<Ordering> {
        if self.rad.is_zero() {
            return Some(self.mid.cmp_rational(rat));
        }
        if self.hi().cmp_rational(rat) == Ordering::Less {
            return Some(Ordering::Less);
        }
        if self.lo().cmp_rational(rat) == Ordering::Greater {
            return Some(Ordering::Greater);
        }
        None
    }

    /// Certified three-way comparison against another ball.
    pub fn cmp_ball(&self, other: &Ball) -> Option<Ordering> {
        if self.rad.is_zero() && other.rad.is_zero() {
            return Some(self.mid.cmp_val(&other.mid));
        }
        if self.hi().cmp_val(&other.lo()) == Ordering::Less {
            return Some(Ordering::Less);
        }
        if self.lo().cmp_val(&other.hi()) == Ordering::Greater {
            return Some(Ordering::Greater);
        }
        None
    }

    /// Round the midpoint to `prec` significant bits, folding the rounding
    /// error into the (upward-rounded, short-mantissa) radius.
    pub fn shrink(&self, prec: u32) -> Ball {
        let (m, e) = self.mid.round(prec, Round::Nearest);
        let r = self.rad.add(&e);
        let (r2, _) = r.round(RADIUS_BITS, Round::Up);
        Ball { mid: m, rad: r2 }
    }

    /// Grow the radius by `extra` (for explicit tail bounds).
    pub fn widen(&self, extra: &Dyadic) -> Ball {
        debug_assert!(!extra.is_negative());
        let r = self.rad.add(extra);
        let (r2, _) = r.round(RADIUS_BITS, Round::Up);
        Ball {
            mid: self.mid.clone(),
            rad: r2,
        }
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
        }
    }

    /// Enclosure of |x| over the ball.
    pub fn abs(&self) -> Ball {
        if !self.contains_zero() {
            return Ball {
                mid: self.mid.abs(),
                rad: self.rad.clone(),
            };
        }
        let lo_abs = self.lo().abs();
        let hi_abs = self.hi().abs();
        let top = if lo_abs.cmp_val(&hi_abs) == Ordering::Greater {
            lo_abs
        } else {
            hi_abs
        };
        Ball::from_endpoints(Dyadic::zero(), top)
    }

    pub fn add(&self, other: &Ball, prec: u32) -> Ball {
        Ball {
            mid: self.mid.add(&other.mid),
            rad: self.rad.add(&other.rad),
        }
        .shrink(prec)
    }

    pub fn sub(&self, other: &Ball, prec: u32) -> Ball {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Ball, prec: u32) -> Ball {
        let mid = self.mid.mul(&other.mid);
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        Ball { mid, rad }.shrink(prec)
    }

    /// Exact scaling by an integer (no rounding).
    pub fn mul_int(&self, k: &BigInt) -> Ball {
        Ball {
            mid: self.mid.mul_int(k),
            rad: self.rad.mul_int(&k.abs()),
        }
    }

    /// Exact scaling by 2^k.
    pub fn mul_pow2(&self, k: i64) -> Ball {
        Ball {
            mid: self.mid.mul_pow2(k),
            rad: self.rad.mul_pow2(k),
        }
    }

    /// Division by a positive machine integer, with the midpoint rounding
    /// error bounded by the exact residual.
    pub fn div_int(&self, j: u64, prec: u32) -> Ball {
        assert!(j > 0);
        let jd = Dyadic::from_int(j);
        let q = self.mid.div(&jd, prec + 4, Round::Nearest);
        let resid = q.mul(&jd).sub(&self.mid).abs();
        let err = resid.div(&jd, RADIUS_BITS, Round::Up);
        let rr = self.rad.div(&jd, RADIUS_BITS, Round::Up);
        Ball {
            mid: q,
            rad: rr.add(&err),
        }
    }

    /// Interval division; fails when the divisor ball contains zero.
    pub fn div(&self, other: &Ball, prec: u32) -> Result<Ball> {
        let (flip, ob) = if other.mid.is_negative() {
            (true, other.neg())
        } else {
            (false, other.clone())
        };
        let lo = ob.lo();
        if !lo.is_positive() {
            return Err(Error::precision(prec, "division by an enclosure containing zero"));
        }
        let one = Dyadic::one();
        let inv_lo = one.div(&ob.hi(), prec + 8, Round::Down);
        let inv_hi = one.div(&lo, prec + 8, Round::Up);
        let inv = Ball::from_endpoints(inv_lo, inv_hi);
        let q = self.mul(&inv, prec);
        Ok(if flip { q.neg() } else { q })
    }

    /// Square root by monotone endpoint rounding. A ball that dips below
    /// zero is treated as a nonnegative quantity known only up to its upper
    /// endpoint; an entirely negative ball is rejected.
    pub fn sqrt(&self, prec: u32) -> Result<Ball> {
        if self.hi().is_negative() {
            return Err(Error::InvalidParameter(
                "square root of a negative enclosure".into(),
            ));
        }
        let lo = self.lo();
        if !lo.is_positive() {
            let hi_root = self.hi().sqrt(prec + 4, Round::Up);
            return Ok(Ball::from_endpoints(Dyadic::zero(), hi_root));
        }
        let rlo = lo.sqrt(prec + 4, Round::Down);
        let rhi = self.hi().sqrt(prec + 4, Round::Up);
        Ok(Ball::from_endpoints(rlo, rhi).shrink(prec + 8))
    }

    /// exp of the ball: argument reduction by a power of two, then the
    /// Taylor series with an explicit geometric tail bound.
    pub fn exp(&self, prec: u32) -> Ball {
        let wp = prec + 24;
        let xf = self.mid.to_f64();
        let kf = if xf.is_finite() {
            (xf / std::f64::consts::LN_2).round()
        } else {
            0.0
        };
        let k = if kf.abs() < 4.0e18 { kf as i64 } else { 0 };
        let r = if k == 0 {
            self.shrink(wp)
        } else {
            let kb = 64 - k.unsigned_abs().leading_zeros();
            let l2 = ln2(wp + kb);
            self.sub(&l2.mul_int(&BigInt::from(k)).shrink(wp + kb), wp)
        };
        let r_hi = r.abs_hi().to_f64();
        assert!(
            r_hi.is_finite() && r_hi < 1.0e6,
            "exp argument reduction failed (|r| ~ {r_hi})"
        );
        // Stop only once the term ratio |r|/(j+1) is at most 1/2, so the
        // tail is dominated by a geometric series: tail <= 2 * last term.
        let jmin = (2.0 * r_hi).ceil() as u64 + 2;
        let cutoff = -(prec as i64) - 8;
        let mut s = Ball::one();
        let mut term = Ball::one();
        let mut j: u64 = 1;
        loop {
            term = term.mul(&r, wp).div_int(j, wp);
            s = s.add(&term, wp);
            let tb = term.abs_hi();
            let small = tb.magnitude_exp().map_or(true, |m| m < cutoff);
            if small && j >= jmin {
                s = s.widen(&tb.mul_pow2(1));
                break;
            }
            j += 1;
            assert!(j < 64 * (prec as u64) + 4096, "exp series failed to converge");
        }
        s.mul_pow2(k).shrink(prec + 8)
    }

    /// Natural log. Fails when the ball touches zero or is too wide for the
    /// atanh series to contract.
    pub fn ln(&self, prec: u32) -> Result<Ball> {
        let wp = prec + 24;
        if !self.lo().is_positive() {
            return Err(Error::precision(prec, "logarithm of an enclosure touching zero"));
        }
        let e = self.mid.magnitude_exp().expect("positive ball") - 1;
        let m = self.mul_pow2(-e); // midpoint now in [1, 2)
        let num = m.sub(&Ball::one(), wp);
        let den = m.add(&Ball::one(), wp);
        let u = num.div(&den, wp)?;
        if u.abs_hi().to_f64() > 0.4 {
            return Err(Error::precision(prec, "logarithm input too wide"));
        }
        // ln m = 2*atanh(u); terms shrink by at least u^2 <= 0.16, so the
        // tail is below 0.2 * last term; widening by the last term covers it.
        let u2 = u.mul(&u, wp);
        let cutoff = -(prec as i64) - 8;
        let mut s = u.clone();
        let mut pow = u;
        let mut kk: u64 = 1;
        loop {
            pow = pow.mul(&u2, wp);
            let term = pow.div_int(2 * kk + 1, wp);
            s = s.add(&term, wp);
            let tb = term.abs_hi();
            if tb.magnitude_exp().map_or(true, |m2| m2 < cutoff) {
                s = s.widen(&tb);
                break;
            }
            kk += 1;
            assert!(kk < 16 * (prec as u64) + 1024, "log series failed to converge");
        }
        let two_atanh = s.mul_pow2(1);
        if e == 0 {
            return Ok(two_atanh.shrink(prec + 8));
        }
        let eb = 64 - e.unsigned_abs().leading_zeros();
        let l2 = ln2(wp + eb);
        Ok(two_atanh.add(&l2.mul_int(&BigInt::from(e)).shrink(wp + eb), prec + 8))
    }

    /// x^n for a nonnegative quantity. A ball that touches zero yields the
    /// enclosure [0, hi^n]; an entirely nonpositive ball yields zero.
    pub fn pow_uint(&self, n: &BigUint, prec: u32) -> Result<Ball> {
        if n.is_zero() {
            return Ok(Ball::one());
        }
        if n.is_one() {
            return Ok(self.shrink(prec + 8));
        }
        let lo = self.lo();
        if lo.is_positive() {
            let wp = prec + n.bits() as u32 + 16;
            let l = self.ln(wp)?;
            let arg = l.mul_int(&BigInt::from(n.clone())).shrink(wp);
            return Ok(arg.exp(prec + 8));
        }
        let hi = self.hi();
        if !hi.is_positive() {
            return Ok(Ball::zero());
        }
        let p = Ball::exact(hi).pow_uint(n, prec)?;
        Ok(Ball::from_endpoints(Dyadic::zero(), p.hi()))
    }

    /// Intersect with [-1, 1] (used after cosine evaluation).
    fn clamp_unit(&self) -> Ball {
        let one = Dyadic::one();
        let neg_one = one.neg();
        let lo = self.lo();
        let hi = self.hi();
        let clo = if lo.cmp_val(&neg_one) == Ordering::Less {
            neg_one
        } else {
            lo
        };
        let chi = if hi.cmp_val(&one) == Ordering::Greater {
            one
        } else {
            hi
        };
        Ball::from_endpoints(clo, chi)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo().to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi().to_f64()
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.mid.to_f64(), self.rad.to_f64())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.mid.to_f64(), self.rad.to_f64())
    }
}

/// cos(pi * x). Reduction mod 2 is exact on the dyadic midpoint, so integer
/// and half-integer inputs with zero radius evaluate exactly to ±1 and 0.
pub fn cos_pi(x: &Ball, prec: u32) -> Ball {
    let wp = prec + 24;
    let quarter = Dyadic::new(BigInt::one(), -2);
    if x.rad.cmp_val(&quarter) == Ordering::Greater {
        return Ball::from_endpoints(Dyadic::one().neg(), Dyadic::one());
    }
    let f = x.mid.floor_int();
    let mut flip = f.is_odd();
    let mut r_mid = x.mid.sub(&Dyadic::from_int(f));
    let half = Dyadic::new(BigInt::one(), -1);
    if r_mid.cmp_val(&half) == Ordering::Greater {
        r_mid = Dyadic::one().sub(&r_mid);
        flip = !flip;
    }
    if x.rad.is_zero() {
        if r_mid.is_zero() {
            let one = if flip {
                Dyadic::one().neg()
            } else {
                Dyadic::one()
            };
            return Ball::exact(one);
        }
        if r_mid == half {
            return Ball::zero();
        }
    }
    let r = Ball {
        mid: r_mid,
        rad: x.rad.clone(),
    };
    // |t| <= pi * (1/2 + 1/4) < 2.4, so from the second term on the ratio
    // t^2/((2k+1)(2k+2)) is below 1/2 and the alternating tail is geometric.
    let t = pi(wp).mul(&r, wp);
    let neg_t2 = t.mul(&t, wp).neg();
    let cutoff = -(prec as i64) - 8;
    let mut s = Ball::one();
    let mut term = Ball::one();
    let mut k: u64 = 1;
    loop {
        term = term.mul(&neg_t2, wp).div_int((2 * k - 1) * 2 * k, wp);
        s = s.add(&term, wp);
        let tb = term.abs_hi();
        if k >= 2 && tb.magnitude_exp().map_or(true, |m| m < cutoff) {
            s = s.widen(&tb.mul_pow2(1));
            break;
        }
        k += 1;
        assert!(k < 16 * (prec as u64) + 4096, "cosine series failed to converge");
    }
    let s = if flip { s.neg() } else { s };
    s.clamp_unit().shrink(prec + 8)
}

// ---------------------------------------------------------------------------
// Shared constants, computed by scaled-integer series with ulp accounting.
// ---------------------------------------------------------------------------

/// atan(1/x) * 2^w with an error bound in ulps. Alternating series; every
/// floor division costs at most one ulp and the propagated error contracts
/// by x^2 each step, so 4*iterations + 8 is a generous envelope that also
/// covers the truncated tail.
fn atan_recip_scaled(x: u32, w: u64) -> (BigInt, BigInt) {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut t = (BigInt::one() << w) / BigInt::from(x);
    let mut s = BigInt::zero();
    let mut k: u64 = 0;
    while !t.is_zero() {
        let term = &t / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            s += &term;
        } else {
            s -= &term;
        }
        t /= &x2;
        k += 1;
    }
    (s, BigInt::from(4 * k + 8))
}

fn pi_raw(w: u64) -> Ball {
    // Machin: pi = 16*atan(1/5) - 4*atan(1/239).
    let (a5, e5) = atan_recip_scaled(5, w);
    let (a239, e239) = atan_recip_scaled(239, w);
    let s = a5 * BigInt::from(16) - a239 * BigInt::from(4);
    let err = e5 * BigInt::from(16) + e239 * BigInt::from(4);
    Ball {
        mid: Dyadic::new(s, -(w as i64)),
        rad: Dyadic::new(err, -(w as i64)),
    }
}

fn ln2_raw(w: u64) -> Ball {
    // ln 2 = 2*atanh(1/3); positive terms, tail under a few ulps once the
    // scaled numerator reaches zero.
    let mut t = (BigInt::one() << w) / BigInt::from(3);
    let mut s = BigInt::zero();
    let mut k: u64 = 0;
    while !t.is_zero() {
        s += &t / BigInt::from(2 * k + 1);
        t /= BigInt::from(9);
        k += 1;
    }
    Ball {
        mid: Dyadic::new(s, 1 - w as i64),
        rad: Dyadic::new(BigInt::from(4 * k + 8), 1 - w as i64),
    }
}

fn e_raw(w: u64) -> Ball {
    let mut t = BigInt::one() << w;
    let mut s = t.clone();
    let mut k: u64 = 1;
    while !t.is_zero() {
        t /= BigInt::from(k);
        s += &t;
        k += 1;
    }
    Ball {
        mid: Dyadic::new(s, -(w as i64)),
        rad: Dyadic::new(BigInt::from(4 * k + 8), -(w as i64)),
    }
}

type ConstCache = OnceLock<Mutex<(u32, Ball)>>;

static PI_CACHE: ConstCache = OnceLock::new();
static LN2_CACHE: ConstCache = OnceLock::new();
static E_CACHE: ConstCache = OnceLock::new();

fn cached_const(cell: &ConstCache, prec: u32, raw: fn(u64) -> Ball) -> Ball {
    let m = cell.get_or_init(|| Mutex::new((0, Ball::zero())));
    let mut guard = m.lock().unwrap();
    if guard.0 < prec.max(1) {
        let w = prec as u64 + 32;
        *guard = (prec.max(1), raw(w));
    }
    guard.1.shrink(prec + 16)
}

/// Enclosure of pi to roughly `prec` bits.
pub fn pi(prec: u32) -> Ball {
    cached_const(&PI_CACHE, prec, pi_raw)
}

/// Enclosure of ln 2 to roughly `prec` bits.
pub fn ln2(prec: u32) -> Ball {
    cached_const(&LN2_CACHE, prec, ln2_raw)
}

/// Enclosure of Euler's number e to roughly `prec` bits.
pub fn euler_e(prec: u32) -> Ball {
    cached_const(&E_CACHE, prec, e_raw)
}
