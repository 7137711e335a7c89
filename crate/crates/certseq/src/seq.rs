//! Certified evaluation of the powered sequences: fractional parts {n·x},
//! powered fractional parts {n·x}^n, and powered cosines |cos(πnx)|^n.
//!
//! Rational and quadratic-surd sources are reduced by exact integer
//! arithmetic (no precision escalation can ever be needed); all other
//! sources go through enclosures whose working precision doubles until the
//! fractional part is pinned inside [0, 1) or the configured cap is hit.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::ball::{cos_pi, Ball};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::real::RealSource;
use crate::Precision;

/// Outcome of a certified comparison against a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifiedOrder {
    Less,
    Greater,
    Unresolved,
}

/// Compare an enclosure against a rational threshold: `Less` iff the whole
/// ball lies below it, `Greater` iff wholly above, `Unresolved` otherwise.
pub fn compare(b: &Ball, threshold: &BigRational) -> CertifiedOrder {
    match b.cmp_rational(threshold) {
        Some(Ordering::Less) => CertifiedOrder::Less,
        Some(Ordering::Greater) => CertifiedOrder::Greater,
        _ => CertifiedOrder::Unresolved,
    }
}

/// A real source together with a cache of enclosures, so scans over many n
/// pay for each working precision only once.
pub struct SourceCtx {
    x: RealSource,
    cache: Mutex<BTreeMap<u32, Ball>>,
}

impl SourceCtx {
    pub fn new(x: RealSource) -> Self {
        Self { x, cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn source(&self) -> &RealSource {
        &self.x
    }

    /// Enclosure with absolute radius at most 2^−bits, reusing any cached
    /// enclosure at least that precise.
    pub fn ball(&self, bits: u32) -> Ball {
        let quantized = bits.div_ceil(64) * 64;
        let mut cache = self.cache.lock().unwrap();
        if let Some((_, b)) = cache.range(quantized..).next() {
            return b.clone();
        }
        let b = self.x.approx(quantized);
        let out = b.clone();
        cache.insert(quantized, b);
        out
    }
}

/// Certified enclosure of {n·x} with absolute radius at most 2^−target.
pub fn frac_part(ctx: &SourceCtx, n: &BigUint, prec: &Precision) -> Result<Ball> {
    if n.is_zero() {
        return Ok(Ball::zero());
    }
    if let Some(r) = ctx.x.as_rational() {
        let np = r.numer() * BigInt::from(n.clone());
        let rem = np.mod_floor(r.denom());
        let frac = BigRational::new(rem, r.denom().clone());
        return Ok(Ball::from_rational(&frac, prec.target + 8));
    }
    if let RealSource::QuadraticSurd(s) = &ctx.x {
        return Ok(s.frac_times(n).approx(prec.target + 8));
    }
    let nbits = n.bits() as u32;
    let mut w = prec.target + nbits + 16;
    loop {
        let xb = ctx.ball(w);
        let nb = xb.mul_int(&BigInt::from(n.clone()));
        let fl = nb.mid().floor_int();
        let f = nb.sub(&Ball::exact(Dyadic::from_int(fl)), w + 8);
        if !f.lo().is_negative() && f.hi().cmp_val(&Dyadic::one()) == Ordering::Less {
            return Ok(f.shrink(prec.target + 16));
        }
        if w >= prec.cap {
            return Err(Error::precision(w, "fractional part straddles an integer"));
        }
        w = (w.saturating_mul(2)).min(prec.cap);
    }
}

/// Certified enclosure of {n·x}^n (n ≥ 1).
pub fn pow_frac(ctx: &SourceCtx, n: &BigUint, prec: &Precision) -> Result<Ball> {
    if n.is_zero() {
        return Err(Error::InvalidParameter("power index must be positive".into()));
    }
    let nbits = n.bits() as u32;
    let inner = Precision { target: prec.target + nbits + 8, cap: prec.cap };
    let f = frac_part(ctx, n, &inner)?;
    f.pow_uint(n, prec.target + 8)
}

/// Certified enclosure of |cos(πnx)|^n (n ≥ 1).
pub fn cos_pow(ctx: &SourceCtx, n: &BigUint, prec: &Precision) -> Result<Ball> {
    if n.is_zero() {
        return Err(Error::InvalidParameter("power index must be positive".into()));
    }
    let nbits = n.bits() as u32;
    let inner = Precision { target: prec.target + nbits + 16, cap: prec.cap };
    let t = frac_part(ctx, n, &inner)?;
    let c = cos_pi(&t, inner.target);
    c.abs().pow_uint(n, prec.target + 8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn ctx(x: RealSource) -> SourceCtx {
        SourceCtx::new(x)
    }

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn integer_multiples_are_exact() {
        let c = ctx(RealSource::rational_i64(1, 1));
        let f = frac_part(&c, &n(3), &Precision::default()).unwrap();
        assert!(f.is_exact() && f.mid().is_zero());
        let p = pow_frac(&c, &n(3), &Precision::default()).unwrap();
        assert!(p.is_exact() && p.mid().is_zero());
        let v = cos_pow(&c, &n(3), &Precision::default()).unwrap();
        assert!(v.is_exact());
        assert_eq!(v.mid().to_rational(), rat(1, 1));
    }

    #[test]
    fn half_integer_cosine_is_exact_zero() {
        let c = ctx(RealSource::rational_i64(1, 2));
        let v = cos_pow(&c, &n(1), &Precision::default()).unwrap();
        assert!(v.is_exact() && v.mid().is_zero());
        let p = pow_frac(&c, &n(1), &Precision::default()).unwrap();
        assert!(p.contains_rational(&rat(1, 2)));
    }

    #[test]
    fn phi_powered_fraction_reference_values() {
        let c = ctx(RealSource::phi());
        // {φ} = 0.6180339887...
        let f = frac_part(&c, &n(1), &Precision::default()).unwrap();
        assert_eq!(f.cmp_rational(&rat(618033, 1000000)), Some(Ordering::Greater));
        assert_eq!(f.cmp_rational(&rat(618034, 1000000)), Some(Ordering::Less));
        // {10φ}^10 = 0.1803398875^10 = 3.6384628e-8 (0.18034 = 10φ − 16).
        let p = pow_frac(&c, &n(10), &Precision::default()).unwrap();
        assert_eq!(p.cmp_rational(&rat(36384628, 1_000_000_000_000_000)), Some(Ordering::Greater));
        assert_eq!(p.cmp_rational(&rat(36384629, 1_000_000_000_000_000)), Some(Ordering::Less));
    }

    #[test]
    fn cos_pow_sqrt2_reference_value() {
        let c = ctx(RealSource::sqrt2());
        // |cos(π√2)| = cos(π·0.41421356...) = 0.26625534204141...
        let v = cos_pow(&c, &n(1), &Precision::default()).unwrap();
        assert_eq!(v.cmp_rational(&rat(26625534204141, 100000000000000)), Some(Ordering::Greater));
        assert_eq!(v.cmp_rational(&rat(26625534204142, 100000000000000)), Some(Ordering::Less));
    }

    #[test]
    fn cos_pow_euler_e_reference_value() {
        let c = ctx(RealSource::EulerE);
        // {2e} = 0.43656365691...; |cos(π·0.43656...)|^2 = 0.19775390...
        // cos(1.371511...) = 0.1984652...; square = 0.0393884...
        let v = cos_pow(&c, &n(2), &Precision::default()).unwrap();
        let est = v.to_f64();
        let reference = {
            let t = 2.0 * std::f64::consts::E;
            let frac = t - t.floor();
            (std::f64::consts::PI * frac).cos().abs().powi(2)
        };
        assert!((est - reference).abs() < 1e-12, "est {est} vs reference {reference}");
        assert!(v.rad().to_f64() < 1e-14);
    }

    #[test]
    fn compare_three_ways() {
        let b = Ball::from_rational(&rat(1, 3), 60);
        assert_eq!(compare(&b, &rat(1, 2)), CertifiedOrder::Less);
        assert_eq!(compare(&b, &rat(1, 4)), CertifiedOrder::Greater);
        assert_eq!(compare(&b, &rat(1, 3)), CertifiedOrder::Unresolved);
    }

    #[test]
    fn refinement_never_widens() {
        let c = ctx(RealSource::phi());
        let coarse = pow_frac(&c, &n(97), &Precision { target: 53, cap: 1 << 16 }).unwrap();
        let fine = pow_frac(&c, &n(97), &Precision { target: 212, cap: 1 << 16 }).unwrap();
        assert!(fine.rad().cmp_val(coarse.rad()) != Ordering::Greater);
        // The tighter enclosure sits inside the coarser one.
        assert!(coarse.lo().cmp_val(&fine.lo()) != Ordering::Greater);
        assert!(fine.hi().cmp_val(&coarse.hi()) != Ordering::Greater);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn surd_and_interval_paths_agree(nv in 1u64..4000) {
            // Evaluate {n√2} both exactly (surd path) and through a
            // CF-defined description of √2 (interval path): the enclosures
            // must overlap, since both contain the same real.
            let exact_ctx = ctx(RealSource::sqrt2());
            let cf = crate::cf::ContinuedFraction::periodic(
                BigInt::one(), vec![], vec![BigUint::from(2u32)]).unwrap();
            let cf_ctx = ctx(RealSource::CfDefined(cf));
            let a = frac_part(&exact_ctx, &n(nv), &Precision::default()).unwrap();
            let b = frac_part(&cf_ctx, &n(nv), &Precision::default()).unwrap();
            prop_assert!(a.lo().cmp_val(&b.hi()) != Ordering::Greater);
            prop_assert!(b.lo().cmp_val(&a.hi()) != Ordering::Greater);
        }

        #[test]
        fn rational_frac_matches_modular_arithmetic(nv in 1u64..5000, p in -400i64..400, q in 1i64..300) {
            let c = ctx(RealSource::Rational(rat(p, q)));
            let f = frac_part(&c, &n(nv), &Precision::default()).unwrap();
            let expect = {
                let prod = rat(p, q) * BigRational::from_integer(nv.into());
                &prod - prod.floor()
            };
            prop_assert!(f.contains_rational(&expect));
        }
    }
}
