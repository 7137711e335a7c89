//! Certified counting of large cosine-power values and the quarter-power
//! lower bound that predicts how many there must be.
//!
//! Three layers build on each other.  `close_rational_count` counts indices n
//! whose multiple n·x sits unusually close to an integer, in the scaled sense
//! |x − m/n| < a/n^{3/2}.  `lemma7_witness_n` turns one good continued-fraction
//! convergent u/v into a certified family of such indices d·v, d ≤ d_max, and
//! with it a scan length N = d_max·v.  `verify_t5` closes the loop: every
//! index that close forces |cos(πnx)|^n above the threshold r when the scale
//! is a = √(1−r)/π, so a certified exceedance scan over 1..N must find at
//! least (5(1−r)N)^{1/4}/(2√π) of them.
//!
//! All comparisons are decided exactly (rationals, quadratic surds) or by
//! enclosures widened only outward; whatever stays undecidable at the
//! precision cap is reported, never guessed.

use std::cmp::Ordering;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::{self, Ball};
use crate::cf;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::real::{RealSource, Surd};
use crate::seq::{self, CertifiedOrder, SourceCtx};
use crate::Precision;

/// Scale a of the close-approximation predicate |x − m/n| < a/n^{3/2},
/// equivalently n(nx − m)² < a².
#[derive(Debug, Clone, PartialEq)]
pub enum CloseScale {
    /// The scale itself as an exact rational.
    Rational(BigRational),
    /// a = √s/π for exact rational s > 0, so a² = s/π².  This is the scale
    /// the threshold pipeline uses with s = 1 − r; comparisons against it
    /// multiply through by π² and stay decidable because π² times a nonzero
    /// rational or quadratic-surd residual is never rational.
    SqrtOverPi(BigRational),
}

impl CloseScale {
    fn validate(&self) -> Result<()> {
        let positive = match self {
            CloseScale::Rational(a) => a.is_positive(),
            CloseScale::SqrtOverPi(s) => s.is_positive(),
        };
        if positive {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "close-approximation scale must be positive".into(),
            ))
        }
    }
}

/// Result of a close-approximation scan over 1..=N.
#[derive(Debug, Clone)]
pub struct CloseCount {
    /// Number of indices certified to qualify.
    pub count: u64,
    /// The qualifying indices with their integer witnesses (n, m).
    pub qualifying: Vec<(u64, BigInt)>,
    /// Indices whose comparison stayed undecided at the precision cap.
    pub undecided: Vec<u64>,
}

/// Residual value n(nx − m)² in a form that keeps exact comparisons exact.
enum Residual {
    Rational(BigRational),
    Surd(Surd),
}

/// Decide π²·v < s by enclosure, escalating up to the cap.  Terminates for
/// nonzero rational or quadratic-surd v because π² is transcendental.
fn pi_squared_times_below(v: &Residual, s: &BigRational, prec: &Precision) -> Result<Option<bool>> {
    let mut w = prec.target.max(64);
    loop {
        let vb = match v {
            Residual::Rational(r) => Ball::from_rational(r, w),
            Residual::Surd(su) => su.approx(w),
        };
        let p = ball::pi(w);
        match vb.mul(&p.mul(&p, w), w).cmp_rational(s) {
            Some(Ordering::Less) => return Ok(Some(true)),
            Some(_) => return Ok(Some(false)),
            None => {
                if w >= prec.cap {
                    return Ok(None);
                }
                w = w.saturating_mul(2).min(prec.cap);
            }
        }
    }
}

/// Decide n(nx − m)² < a² for one integer candidate m.  `Ok(None)` means the
/// comparison stayed undecided at the precision cap.
fn close_holds(
    ctx: &SourceCtx,
    n: &BigInt,
    m: &BigInt,
    scale: &CloseScale,
    prec: &Precision,
) -> Result<Option<bool>> {
    if let Some(r) = ctx.source().as_rational() {
        let diff = r * BigRational::from(n.clone()) - BigRational::from(m.clone());
        let resid = &diff * &diff * BigRational::from(n.clone());
        return match scale {
            CloseScale::Rational(a) => Ok(Some(resid < a * a)),
            CloseScale::SqrtOverPi(s) => {
                if resid.is_zero() {
                    return Ok(Some(true));
                }
                pi_squared_times_below(&Residual::Rational(resid), s, prec)
            }
        };
    }
    if let RealSource::QuadraticSurd(su) = ctx.source() {
        let resid = su.times_minus_int(n, m).square().mul_int(n);
        return match scale {
            CloseScale::Rational(a) => Ok(Some(resid.cmp_rational(&(a * a)) == Ordering::Less)),
            CloseScale::SqrtOverPi(s) => pi_squared_times_below(&Residual::Surd(resid), s, prec),
        };
    }
    let mut w = prec.target.max(64);
    loop {
        let t = ctx
            .ball(w)
            .mul_int(n)
            .sub(&Ball::exact(Dyadic::from_int(m.clone())), w + 8);
        let v = t.mul(&t, w + 8).mul_int(n);
        let decided = match scale {
            CloseScale::Rational(a) => v.cmp_rational(&(a * a)),
            CloseScale::SqrtOverPi(s) => {
                let p = ball::pi(w);
                v.mul(&p.mul(&p, w), w).cmp_rational(s)
            }
        };
        match decided {
            Some(Ordering::Less) => return Ok(Some(true)),
            Some(_) => return Ok(Some(false)),
            None => {
                if w >= prec.cap {
                    return Ok(None);
                }
                w = w.saturating_mul(2).min(prec.cap);
            }
        }
    }
}

/// Integer candidates for the best numerator m at index n, nearest first.
/// Exact sources yield the true nearest integer; enclosure sources yield the
/// two consecutive integers bracketing n·x, which contain every integer
/// within distance 1/2 of it once the enclosure radius is below 1/4.
fn nearest_candidates(ctx: &SourceCtx, n: u64, prec: &Precision) -> Result<Vec<BigInt>> {
    let nb = BigInt::from(n);
    if let Some(r) = ctx.source().as_rational() {
        let two = BigInt::from(2);
        let num = r.numer() * &nb;
        let m = (&two * &num + r.denom()).div_floor(&(&two * r.denom()));
        return Ok(vec![m]);
    }
    if let RealSource::QuadraticSurd(su) = ctx.source() {
        return Ok(vec![su.round_times_half_up(&BigUint::from(n))]);
    }
    let mut w = prec.target.max(64);
    loop {
        let nxb = ctx.ball(w).mul_int(&nb);
        if nxb.rad().cmp_val(&Dyadic::pow2(-2)) == Ordering::Less {
            let g = nxb.mid().floor_int();
            let frac = nxb.mid().sub(&Dyadic::from_int(g.clone()));
            let upper_first = frac.cmp_val(&Dyadic::pow2(-1)) != Ordering::Less;
            let above = &g + 1;
            return Ok(if upper_first { vec![above, g] } else { vec![g, above] });
        }
        if w >= prec.cap {
            return Err(Error::precision(w, "nearest integer to n·x"));
        }
        w = w.saturating_mul(2).min(prec.cap);
    }
}

/// Per-index precision schedule for long scans: 64 bits plus ⌈log2 n⌉, with
/// one 4× escalation allowed before an index is reported undecided.
fn scan_precision(n: u64, prec: &Precision) -> Precision {
    let clog2 = u64::BITS - n.saturating_sub(1).leading_zeros();
    let target = 64 + clog2;
    let cap = (target * 4).clamp(target, prec.cap.max(target));
    Precision { target, cap }
}

/// Count the indices n ≤ N admitting an integer m with |x − m/n| < a/n^{3/2}.
///
/// The witness m is the nearest integer to n·x (for enclosure-only sources,
/// both bracketing integers are tried, which decides the same predicate).
/// Undecidable indices are listed in `undecided`, never counted.
pub fn close_rational_count(
    x: &RealSource,
    scale: &CloseScale,
    n_max: u64,
    prec: &Precision,
) -> Result<CloseCount> {
    scale.validate()?;
    let ctx = SourceCtx::new(x.clone());
    let mut qualifying = Vec::new();
    let mut undecided = Vec::new();
    for n in 1..=n_max {
        let sched = scan_precision(n, prec);
        let nb = BigInt::from(n);
        let mut hit = None;
        let mut stuck = false;
        for m in nearest_candidates(&ctx, n, &sched)? {
            match close_holds(&ctx, &nb, &m, scale, &sched)? {
                Some(true) => {
                    hit = Some(m);
                    break;
                }
                Some(false) => {}
                None => stuck = true,
            }
        }
        match hit {
            Some(m) => qualifying.push((n, m)),
            None if stuck => undecided.push(n),
            None => {}
        }
    }
    Ok(CloseCount {
        count: qualifying.len() as u64,
        qualifying,
        undecided,
    })
}

/// A certified family of close approximations built from one convergent u/v:
/// every n = d·v with 1 ≤ d ≤ d_max satisfies n(nx − d·u)² < a².
#[derive(Debug, Clone)]
pub struct Lemma7Witness {
    /// 1-based rank of the convergent among those passing the 1/(√5 q²) test.
    pub t: u32,
    /// Denominator of the selected convergent.
    pub v: BigInt,
    /// Numerator of the selected convergent.
    pub u: BigInt,
    /// Largest certified multiplier: d_max = ⌊(5a²v)^{1/3}⌋.
    pub d_max: u64,
    /// Scan length d_max·v.
    pub n_max: BigInt,
    /// The certified index/witness pairs (d·v, d·u) for d = 1..=d_max.
    pub pairs: Vec<(BigInt, BigInt)>,
}

/// d_max = ⌊(5a²v)^{1/3}⌋, guarded by the size precondition 5a²v > 8 (so that
/// d_max ≥ 2 and the construction is non-degenerate).
fn certified_multiplier_cap(scale: &CloseScale, v: &BigInt, prec: &Precision) -> Result<u64> {
    let five_v = BigRational::from(BigInt::from(5) * v);
    match scale {
        CloseScale::Rational(a) => {
            let x = five_v * a * a;
            if x <= BigRational::from(BigInt::from(8)) {
                return Err(Error::TooSmall);
            }
            let d = x.numer().div_floor(x.denom()).nth_root(3);
            d.to_u64()
                .ok_or_else(|| Error::InvalidParameter("multiplier cap exceeds machine range".into()))
        }
        CloseScale::SqrtOverPi(s) => {
            // 5a²v = 5sv/π²; the precondition reads 8π² < 5sv.
            let five_sv = five_v * s;
            let mut w = prec.target.max(64);
            let big_enough = loop {
                let p = ball::pi(w);
                match p.mul(&p, w).mul_pow2(3).cmp_rational(&five_sv) {
                    Some(Ordering::Less) => break true,
                    Some(_) => break false,
                    None => {
                        if w >= prec.cap {
                            return Err(Error::precision(w, "witness size precondition"));
                        }
                        w = w.saturating_mul(2).min(prec.cap);
                    }
                }
            };
            if !big_enough {
                return Err(Error::TooSmall);
            }
            let mut w = prec.target.max(96);
            loop {
                let p = ball::pi(w);
                let x = Ball::from_rational(&five_sv, w).div(&p.mul(&p, w), w)?;
                let root = x.ln(w)?.div_int(3, w).exp(w);
                let lo = root.lo().floor_int();
                if lo == root.hi().floor_int() {
                    return lo.to_u64().ok_or_else(|| {
                        Error::InvalidParameter("multiplier cap exceeds machine range".into())
                    });
                }
                if w >= prec.cap {
                    return Err(Error::precision(w, "cube-root floor"));
                }
                w = w.saturating_mul(2).min(prec.cap);
            }
        }
    }
}

/// Build the certified close-approximation family at the t-th convergent of x
/// passing the 1/(√5 q²) quality test (1-based, scanning the first 3t+6
/// convergents — at least one of any three consecutive convergents passes, so
/// the supply never runs short for irrational x).
///
/// For the selected u/v the quality bound gives v(vx − u)² < 1/5, hence for
/// n = d·v, m = d·u: n(nx − m)² = d³·v(vx − u)² < d³/(5v) ≤ a² whenever
/// d³ ≤ 5a²v.  Each pair is nevertheless certified directly.
pub fn lemma7_witness_n(
    x: &RealSource,
    scale: &CloseScale,
    t: u32,
    prec: &Precision,
) -> Result<Lemma7Witness> {
    scale.validate()?;
    if t == 0 {
        return Err(Error::InvalidParameter("witness rank t must be positive".into()));
    }
    let depth = 3 * u64::from(t) + 6;
    let passing = cf::hurwitz_filter(x, depth, prec)?;
    if (passing.len() as u64) < u64::from(t) {
        return Err(Error::DepthExceeded {
            requested: u64::from(t),
            available: passing.len() as u64,
        });
    }
    let chosen = &passing[(t - 1) as usize];
    let v = chosen.q.clone();
    let u = chosen.p.clone();
    let d_max = certified_multiplier_cap(scale, &v, prec)?;
    let n_max = BigInt::from(d_max) * &v;
    let ctx = SourceCtx::new(x.clone());
    let mut pairs = Vec::with_capacity(d_max as usize);
    for d in 1..=d_max {
        let db = BigInt::from(d);
        let n = &db * &v;
        let m = &db * &u;
        match close_holds(&ctx, &n, &m, scale, prec)? {
            Some(true) => pairs.push((n, m)),
            Some(false) => {
                // Ruled out above; a definite failure here means the arithmetic
                // itself is broken, not the input.
                panic!("convergent multiple d={d} violated its certified close bound")
            }
            None => return Err(Error::precision(prec.cap, "close-approximation certificate")),
        }
    }
    Ok(Lemma7Witness {
        t,
        v,
        u,
        d_max,
        n_max,
        pairs,
    })
}

fn check_threshold(r: &BigRational) -> Result<()> {
    if r.is_positive() && *r < BigRational::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "threshold must lie strictly between 0 and 1".into(),
        ))
    }
}

/// Certified enclosure of the quarter-power count bound
/// (5(1−r)N)^{1/4} / (2√π), with radius at most 2^−40.
pub fn theorem5_bound(r: &BigRational, n: &BigInt, prec: &Precision) -> Result<Ball> {
    check_threshold(r)?;
    if !n.is_positive() {
        return Err(Error::InvalidParameter("scan length must be positive".into()));
    }
    let inner = BigRational::from(BigInt::from(5)) * (BigRational::one() - r)
        * BigRational::from(n.clone());
    let goal = Dyadic::pow2(-40);
    let mut w = prec.target.max(96);
    loop {
        let q = Ball::from_rational(&inner, w);
        let quarter_power = q.ln(w)?.mul_pow2(-2).exp(w);
        let denom = ball::pi(w).sqrt(w)?.mul_pow2(1);
        let b = quarter_power.div(&denom, w)?;
        if b.rad().cmp_val(&goal) != Ordering::Greater {
            return Ok(b);
        }
        if w >= prec.cap {
            return Err(Error::precision(w, "quarter-power bound radius"));
        }
        w = w.saturating_mul(2).min(prec.cap);
    }
}

/// Result of a certified exceedance scan: how many indices n in the scanned
/// range have |cos(πnx)|^n certifiably above r, and how many stayed
/// undecided.  The true count lies in
/// [count_certain, count_certain + count_unresolved].
#[derive(Debug, Clone)]
pub struct CountReport {
    /// Upper end of the scanned index range.
    pub n_max: u64,
    /// The threshold compared against.
    pub r: BigRational,
    /// Indices certified strictly above the threshold.
    pub count_certain: u64,
    /// Indices undecided at the precision cap.
    pub count_unresolved: u64,
    /// Wall-clock seconds spent scanning; informational only.
    pub elapsed_hint: f64,
}

/// Three-way certified comparison of |cos(πnx)|^n against r at one index,
/// using the per-index schedule with a single 4× escalation.
fn exceed_once(ctx: &SourceCtx, n: u64, r: &BigRational, prec: &Precision) -> CertifiedOrder {
    let sched = scan_precision(n, prec);
    let nb = BigUint::from(n);
    let base = Precision {
        target: sched.target,
        cap: sched.cap,
    };
    if let Ok(b) = seq::cos_pow(ctx, &nb, &base) {
        match seq::compare(&b, r) {
            CertifiedOrder::Unresolved => {}
            decided => return decided,
        }
    }
    let escalated = Precision {
        target: (sched.target * 4).clamp(sched.target, prec.cap.max(sched.target)),
        cap: prec.cap.max(sched.target * 4),
    };
    match seq::cos_pow(ctx, &nb, &escalated) {
        Ok(b) => seq::compare(&b, r),
        Err(_) => CertifiedOrder::Unresolved,
    }
}

/// Certified count of indices n in lo..=hi with |cos(πnx)|^n > r.
/// Partition-friendly: counts over disjoint ranges add up to the full scan.
pub fn count_exceed_range(
    x: &RealSource,
    r: &BigRational,
    n_lo: u64,
    n_hi: u64,
    prec: &Precision,
) -> Result<CountReport> {
    check_threshold(r)?;
    let started = Instant::now();
    let ctx = SourceCtx::new(x.clone());
    let mut count_certain = 0u64;
    let mut count_unresolved = 0u64;
    for n in n_lo.max(1)..=n_hi {
        match exceed_once(&ctx, n, r, prec) {
            CertifiedOrder::Greater => count_certain += 1,
            CertifiedOrder::Less => {}
            CertifiedOrder::Unresolved => count_unresolved += 1,
        }
    }
    Ok(CountReport {
        n_max: n_hi,
        r: r.clone(),
        count_certain,
        count_unresolved,
        elapsed_hint: started.elapsed().as_secs_f64(),
    })
}

/// Certified count of indices n ≤ N with |cos(πnx)|^n > r.
pub fn count_exceed(
    x: &RealSource,
    r: &BigRational,
    n_max: u64,
    prec: &Precision,
) -> Result<CountReport> {
    count_exceed_range(x, r, 1, n_max, prec)
}

/// Outcome of the full quarter-power pipeline at one convergent rank.
#[derive(Debug, Clone)]
pub struct T5Verification {
    /// Convergent rank the scan length was built from.
    pub t: u32,
    /// Denominator of the selected convergent.
    pub v_t: BigInt,
    /// Scan length N_t = d_max·v_t.
    pub n_t: BigInt,
    /// Certified multiplier cap.
    pub d_max: u64,
    /// Enclosure of the predicted lower bound (5(1−r)N_t)^{1/4}/(2√π).
    pub bound: Ball,
    /// The certified exceedance scan over 1..=N_t.
    pub count: CountReport,
    /// Whether every constructed multiple d·v_t was itself certified to
    /// exceed the threshold (the close bound forces
    /// |cos(πnx)|^n > (1 − π²a²/n)^n > 1 − π²a² = r when a = √(1−r)/π).
    pub multiples_certified: bool,
    /// count_certain ≥ upper end of the bound enclosure.
    pub pass: bool,
}

/// Run the whole pipeline for threshold r at convergent rank t: build the
/// close family with scale a = √(1−r)/π, scan up to N_t, and compare the
/// certified count against the quarter-power bound.  The comparison uses the
/// upper end of the bound enclosure, so `pass` is never a rounding artifact.
pub fn verify_t5(
    x: &RealSource,
    r: &BigRational,
    t: u32,
    prec: &Precision,
) -> Result<T5Verification> {
    check_threshold(r)?;
    let scale = CloseScale::SqrtOverPi(BigRational::one() - r);
    let witness = lemma7_witness_n(x, &scale, t, prec)?;
    let n_scan = witness
        .n_max
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("scan length exceeds machine range".into()))?;
    let count = count_exceed(x, r, n_scan, prec)?;
    let bound = theorem5_bound(r, &witness.n_max, prec)?;
    let ctx = SourceCtx::new(x.clone());
    let mut multiples_certified = true;
    for (n, _) in &witness.pairs {
        let nb = n.to_biguint().expect("multiples are positive");
        let base = Precision {
            target: 128 + 2 * (n.bits() as u32),
            cap: prec.cap,
        };
        let mut decided = match seq::cos_pow(&ctx, &nb, &base) {
            Ok(b) => seq::compare(&b, r),
            Err(_) => CertifiedOrder::Unresolved,
        };
        if decided == CertifiedOrder::Unresolved {
            let escalated = Precision {
                target: (base.target * 4).clamp(base.target, prec.cap.max(base.target)),
                cap: prec.cap.max(base.target * 4),
            };
            decided = match seq::cos_pow(&ctx, &nb, &escalated) {
                Ok(b) => seq::compare(&b, r),
                Err(_) => CertifiedOrder::Unresolved,
            };
        }
        if decided != CertifiedOrder::Greater {
            multiples_certified = false;
        }
    }
    let pass = BigRational::from(BigInt::from(count.count_certain)) >= bound.hi().to_rational();
    Ok(T5Verification {
        t,
        v_t: witness.v,
        n_t: witness.n_max,
        d_max: witness.d_max,
        bound,
        count,
        multiples_certified,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn sqrt2() -> RealSource {
        RealSource::sqrt2()
    }

    fn prec() -> Precision {
        Precision::expand_default()
    }

    fn mid_f64(b: &Ball) -> f64 {
        b.to_f64()
    }

    #[test]
    fn bound_matches_direct_high_precision_evaluation() {
        let b = theorem5_bound(&rat(1, 2), &BigInt::from(10_000), &prec()).unwrap();
        assert!((mid_f64(&b) - 3.547154215).abs() < 1e-6);
        assert!(b.rad().cmp_val(&Dyadic::pow2(-40)) != Ordering::Greater);

        let b1 = theorem5_bound(&rat(1, 2), &BigInt::from(1), &prec()).unwrap();
        assert!((mid_f64(&b1) - 0.3547154215).abs() < 1e-7);
    }

    #[test]
    fn bound_shrinks_as_threshold_approaches_one() {
        let near_one = theorem5_bound(&rat(999, 1000), &BigInt::from(1), &prec()).unwrap();
        let half = theorem5_bound(&rat(1, 2), &BigInt::from(1), &prec()).unwrap();
        assert!((mid_f64(&near_one) - 0.0750132).abs() < 1e-5);
        assert!(mid_f64(&near_one) < mid_f64(&half));
    }

    #[test]
    fn bound_rejects_degenerate_inputs() {
        for bad in [rat(0, 1), rat(1, 1), rat(3, 2), rat(-1, 2)] {
            assert!(matches!(
                theorem5_bound(&bad, &BigInt::from(10), &prec()),
                Err(Error::InvalidParameter(_))
            ));
        }
        assert!(matches!(
            theorem5_bound(&rat(1, 2), &BigInt::zero(), &prec()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn bound_is_stable_under_factored_regrouping() {
        // (5(1−r)N)^{1/4} computed in one shot versus 5^{1/4}·(1−r)^{1/4}·N^{1/4}
        // assembled factor by factor: the enclosures must agree to well inside
        // their stated radii.
        let r = rat(1, 2);
        let n = BigInt::from(1632);
        let direct = theorem5_bound(&r, &n, &prec()).unwrap();
        let w = 160;
        let quarter = |v: &BigRational| -> Ball {
            Ball::from_rational(v, w).ln(w).unwrap().mul_pow2(-2).exp(w)
        };
        let num = quarter(&rat(5, 1))
            .mul(&quarter(&(BigRational::one() - &r)), w)
            .mul(&quarter(&BigRational::from(n.clone())), w);
        let den = ball::pi(w).sqrt(w).unwrap().mul_pow2(1);
        let refactored = num.div(&den, w).unwrap();
        assert!((mid_f64(&direct) - mid_f64(&refactored)).abs() < 2.0_f64.powi(-38));
        assert!((mid_f64(&direct) - 2.254551233).abs() < 1e-6);
    }

    #[test]
    fn close_count_exact_surd_small_table() {
        let got = close_rational_count(
            &sqrt2(),
            &CloseScale::Rational(rat(1, 2)),
            10,
            &prec(),
        )
        .unwrap();
        let want: Vec<(u64, BigInt)> = [(1u64, 1i64), (2, 3), (3, 4), (5, 7), (7, 10), (10, 14)]
            .iter()
            .map(|&(n, m)| (n, BigInt::from(m)))
            .collect();
        assert_eq!(got.count, 6);
        assert_eq!(got.qualifying, want);
        assert!(got.undecided.is_empty());
    }

    #[test]
    fn close_count_saturates_with_large_scale() {
        let all = close_rational_count(&sqrt2(), &CloseScale::Rational(rat(4, 1)), 10, &prec())
            .unwrap();
        assert_eq!(all.count, 10);
        let none = close_rational_count(&sqrt2(), &CloseScale::Rational(rat(1, 100)), 1, &prec())
            .unwrap();
        assert_eq!(none.count, 0);
        assert!(none.undecided.is_empty());
    }

    #[test]
    fn close_count_exact_rational_source() {
        // x = 1/2: even n land exactly on integers (residual 0); odd n sit at
        // distance 1/2, residual n/4, never below 1/4.
        let got = close_rational_count(
            &RealSource::rational_i64(1, 2),
            &CloseScale::Rational(rat(1, 2)),
            6,
            &prec(),
        )
        .unwrap();
        let want: Vec<(u64, BigInt)> = [(2u64, 1i64), (4, 2), (6, 3)]
            .iter()
            .map(|&(n, m)| (n, BigInt::from(m)))
            .collect();
        assert_eq!(got.qualifying, want);
    }

    #[test]
    fn close_count_enclosure_source() {
        let got = close_rational_count(
            &RealSource::EulerE,
            &CloseScale::Rational(rat(1, 2)),
            8,
            &prec(),
        )
        .unwrap();
        let want: Vec<(u64, BigInt)> = [(1u64, 3i64), (3, 8), (4, 11), (7, 19)]
            .iter()
            .map(|&(n, m)| (n, BigInt::from(m)))
            .collect();
        assert_eq!(got.qualifying, want);
        assert!(got.undecided.is_empty());
    }

    #[test]
    fn close_count_pi_scaled_predicate() {
        let scale = CloseScale::SqrtOverPi(rat(1, 2));
        let small = close_rational_count(&sqrt2(), &scale, 10, &prec()).unwrap();
        assert_eq!(small.qualifying, vec![(5u64, BigInt::from(7))]);

        let wide = close_rational_count(&sqrt2(), &scale, 200, &prec()).unwrap();
        let ns: Vec<u64> = wide.qualifying.iter().map(|(n, _)| *n).collect();
        assert_eq!(ns, vec![5, 12, 17, 29, 41, 58, 70, 99, 128, 140, 169, 198]);
        assert!(wide.undecided.is_empty());
    }

    #[test]
    fn witness_family_from_eighth_convergent_of_sqrt2() {
        let w = lemma7_witness_n(&sqrt2(), &CloseScale::SqrtOverPi(rat(1, 2)), 8, &prec())
            .unwrap();
        assert_eq!(w.v, BigInt::from(408));
        assert_eq!(w.u, BigInt::from(577));
        assert_eq!(w.d_max, 4);
        assert_eq!(w.n_max, BigInt::from(1632));
        let want: Vec<(BigInt, BigInt)> = [(408i64, 577i64), (816, 1154), (1224, 1731), (1632, 2308)]
            .iter()
            .map(|&(n, m)| (BigInt::from(n), BigInt::from(m)))
            .collect();
        assert_eq!(w.pairs, want);
    }

    #[test]
    fn witness_family_table_for_golden_ratio_and_e() {
        let scale = CloseScale::SqrtOverPi(rat(1, 2));
        let table = [
            (RealSource::phi(), 5u32, 55u64, 2u64, 110u64),
            (RealSource::phi(), 6, 144, 3, 432),
            (RealSource::EulerE, 3, 71, 2, 142),
            (RealSource::EulerE, 4, 1001, 6, 6006),
        ];
        for (x, t, v, d_max, n_max) in table {
            let w = lemma7_witness_n(&x, &scale, t, &prec()).unwrap();
            assert_eq!(w.v, BigInt::from(v), "rank {t}");
            assert_eq!(w.d_max, d_max, "rank {t}");
            assert_eq!(w.n_max, BigInt::from(n_max), "rank {t}");
            assert_eq!(w.pairs.len(), d_max as usize);
        }
    }

    #[test]
    fn witness_family_guards() {
        let scale = CloseScale::SqrtOverPi(rat(1, 2));
        assert!(matches!(
            lemma7_witness_n(&RealSource::EulerE, &scale, 2, &prec()),
            Err(Error::TooSmall)
        ));
        assert!(matches!(
            lemma7_witness_n(&RealSource::rational_i64(3, 7), &scale, 1, &prec()),
            Err(Error::NotIrrational)
        ));
        assert!(matches!(
            lemma7_witness_n(&sqrt2(), &scale, 0, &prec()),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            lemma7_witness_n(&sqrt2(), &CloseScale::Rational(rat(1, 100)), 8, &prec()),
            Err(Error::TooSmall)
        ));
        // A rational scale equal to the usual one to five digits lands on the
        // same family.
        let w = lemma7_witness_n(&sqrt2(), &CloseScale::Rational(rat(22508, 100_000)), 8, &prec())
            .unwrap();
        assert_eq!(w.d_max, 4);
        assert_eq!(w.n_max, BigInt::from(1632));
    }

    #[test]
    fn exceed_counts_match_independent_scan() {
        let r = rat(1, 2);
        let c20 = count_exceed(&sqrt2(), &r, 20, &prec()).unwrap();
        assert_eq!((c20.count_certain, c20.count_unresolved), (5, 0));
        let c50 = count_exceed(&sqrt2(), &r, 50, &prec()).unwrap();
        assert_eq!((c50.count_certain, c50.count_unresolved), (9, 0));

        // x = 1/2: |cos(πn/2)| is exactly 1 for even n, 0 for odd n.
        let ch = count_exceed(&RealSource::rational_i64(1, 2), &r, 4, &prec()).unwrap();
        assert_eq!((ch.count_certain, ch.count_unresolved), (2, 0));

        let c0 = count_exceed(&sqrt2(), &r, 0, &prec()).unwrap();
        assert_eq!((c0.count_certain, c0.count_unresolved), (0, 0));
    }

    #[test]
    fn exceed_count_merges_across_partitions() {
        let r = rat(1, 2);
        let full = count_exceed(&sqrt2(), &r, 50, &prec()).unwrap();
        let lo = count_exceed_range(&sqrt2(), &r, 1, 25, &prec()).unwrap();
        let hi = count_exceed_range(&sqrt2(), &r, 26, 50, &prec()).unwrap();
        assert_eq!(full.count_certain, lo.count_certain + hi.count_certain);
        assert_eq!(
            full.count_unresolved,
            lo.count_unresolved + hi.count_unresolved
        );
    }

    #[test]
    fn exceed_count_monotone_in_threshold_and_length() {
        let lo_r = count_exceed(&sqrt2(), &rat(3, 10), 30, &prec()).unwrap();
        let hi_r = count_exceed(&sqrt2(), &rat(7, 10), 30, &prec()).unwrap();
        assert!(
            lo_r.count_certain + lo_r.count_unresolved
                >= hi_r.count_certain + hi_r.count_unresolved
        );
        let short = count_exceed(&sqrt2(), &rat(1, 2), 30, &prec()).unwrap();
        let long = count_exceed(&sqrt2(), &rat(1, 2), 50, &prec()).unwrap();
        assert!(long.count_certain >= short.count_certain);
    }

    #[test]
    fn close_indices_all_exceed_threshold() {
        // With a = √(1−r)/π, n(nx−m)² < a² forces |cos(πnx)|^n above r.
        let r = rat(1, 2);
        let close = close_rational_count(&sqrt2(), &CloseScale::SqrtOverPi(rat(1, 2)), 200, &prec())
            .unwrap();
        assert!(!close.qualifying.is_empty());
        let ctx = SourceCtx::new(sqrt2());
        for (n, _) in &close.qualifying {
            let b = seq::cos_pow(&ctx, &BigUint::from(*n), &prec()).unwrap();
            assert_eq!(
                seq::compare(&b, &r),
                CertifiedOrder::Greater,
                "index {n} fails the exceedance implication"
            );
        }
    }

    #[test]
    fn pipeline_verifies_quarter_power_bound_for_sqrt2() {
        let out = verify_t5(&sqrt2(), &rat(1, 2), 8, &prec()).unwrap();
        assert_eq!(out.v_t, BigInt::from(408));
        assert_eq!(out.n_t, BigInt::from(1632));
        assert_eq!(out.d_max, 4);
        assert!((mid_f64(&out.bound) - 2.254551233).abs() < 1e-6);
        assert_eq!(out.count.count_certain, 60);
        assert_eq!(out.count.count_unresolved, 0);
        assert!(out.multiples_certified);
        assert!(out.pass);
    }

    #[test]
    fn pipeline_verifies_quarter_power_bound_for_golden_ratio() {
        let out = verify_t5(&RealSource::phi(), &rat(1, 2), 5, &prec()).unwrap();
        assert_eq!(out.v_t, BigInt::from(55));
        assert_eq!(out.n_t, BigInt::from(110));
        assert_eq!(out.d_max, 2);
        assert!((mid_f64(&out.bound) - 1.148757187).abs() < 1e-6);
        assert_eq!(out.count.count_certain, 15);
        assert_eq!(out.count.count_unresolved, 0);
        assert!(out.multiples_certified);
        assert!(out.pass);
    }

    #[test]
    fn pipeline_rejects_degenerate_inputs() {
        assert!(matches!(
            verify_t5(&sqrt2(), &rat(5, 4), 8, &prec()),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            verify_t5(&RealSource::rational_i64(2, 3), &rat(1, 2), 3, &prec()),
            Err(Error::NotIrrational)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn exceed_scan_partitions_merge(p in 1i64..40, q in 1i64..40, split in 1u64..29, n_max in 2u64..30) {
            let split = split.min(n_max - 1);
            let x = RealSource::rational_i64(p, q);
            let r = rat(1, 2);
            let full = count_exceed(&x, &r, n_max, &prec()).unwrap();
            let lo = count_exceed_range(&x, &r, 1, split, &prec()).unwrap();
            let hi = count_exceed_range(&x, &r, split + 1, n_max, &prec()).unwrap();
            prop_assert_eq!(full.count_certain, lo.count_certain + hi.count_certain);
            prop_assert_eq!(full.count_unresolved, lo.count_unresolved + hi.count_unresolved);
        }

        #[test]
        fn huge_scale_counts_every_index(p in 1i64..50, q in 1i64..50, n_max in 1u64..20) {
            // a ≥ √N makes |x − m/n| ≤ 1/(2n) < a/n^{3/2} hold for every n ≤ N.
            let x = RealSource::rational_i64(p, q);
            let scale = CloseScale::Rational(BigRational::from(BigInt::from(n_max)));
            let got = close_rational_count(&x, &scale, n_max, &prec()).unwrap();
            prop_assert_eq!(got.count, n_max);
        }
    }
}
