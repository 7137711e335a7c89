//! Recursive construction of angles α whose decimal structure forces many
//! large sequence values, plus a per-stage verifier.
//!
//! The construction interleaves two pressures. A decay profile f fixes how
//! many indices up to N should exceed a threshold r (namely about N·f(N));
//! the angle α = Σ 10^(−d_i) is then built so that every multiple of
//! 10^(d_{i−1}) up to N_i has {n·α} within ~n·10^(−d_i) of an integer,
//! which keeps |cos(π n α)|^n above r. Each stage chooses
//!
//! * N_{i+1} = the least index with f(N_{i+1}) ≤ 10^(−d_i), and
//! * d_{i+1} = max(2·d_i, ⌊L(N_{i+1})⌋ + 1), where
//!   L(N) = log10(2π N^{3/2} / sqrt(−2 ln r′)),
//!
//! with r′ a margin threshold strictly between r and 1. The doubling keeps
//! the tail Σ_{j>i} 10^(−d_j) dominated by its first term; the L bound makes
//! that tail small enough that the cosine stays above r′ > r with room for
//! the certification to succeed.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::{self, Ball};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::real::{pow10, DecimalSchedule, RealSource};
use crate::seq::{self, CertifiedOrder, SourceCtx};
use crate::Precision;

use std::cmp::Ordering;

/// Schedules whose indices would exceed this magnitude are rejected as
/// infeasible rather than silently truncated.
pub const T4_MAGNITUDE_CAP: u64 = 1_000_000_000_000;

/// Decay profile f(n) for the per-stage count target N·f(N).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FSpec {
    /// f(n) = n^(−β) for rational β > 0 (numerator/denominator ≤ 64, so the
    /// exact integer-power comparisons stay bounded).
    Pow(BigRational),
    /// f(n) = 1 / ln n, defined for n ≥ 2.
    LogInv,
    /// f(n) = exp(−λ n) for rational λ > 0.
    ExpInv(BigRational),
}

impl FSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FSpec::Pow(beta) => {
                if !beta.is_positive() {
                    return Err(Error::InvalidParameter("decay exponent must be positive".into()));
                }
                let ok = beta.numer().to_u32().is_some_and(|v| (1..=64).contains(&v))
                    && beta.denom().to_u32().is_some_and(|v| (1..=64).contains(&v));
                if !ok {
                    return Err(Error::InvalidParameter(
                        "decay exponent must have numerator and denominator at most 64".into(),
                    ));
                }
                Ok(())
            }
            FSpec::LogInv => Ok(()),
            FSpec::ExpInv(lambda) => {
                if !lambda.is_positive() {
                    return Err(Error::InvalidParameter("decay rate must be positive".into()));
                }
                Ok(())
            }
        }
    }

    fn pow_parts(&self) -> Option<(u32, u32)> {
        match self {
            FSpec::Pow(beta) => Some((
                beta.numer().to_u32().expect("validated"),
                beta.denom().to_u32().expect("validated"),
            )),
            _ => None,
        }
    }

    /// Least n ≥ 1 with f(n) < 1.
    pub fn least_n_below_one(&self) -> BigInt {
        match self {
            FSpec::Pow(_) => BigInt::from(2), // n^−β < 1 iff n ≥ 2
            FSpec::LogInv => BigInt::from(3), // 1/ln n < 1 iff ln n > 1
            FSpec::ExpInv(_) => BigInt::one(), // e^−λn < 1 for every n ≥ 1
        }
    }

    /// Least n with f(n) ≤ 10^−d, or None when every such n provably exceeds
    /// [`T4_MAGNITUDE_CAP`].
    fn least_n_at_most(&self, d: u64, prec: &Precision) -> Result<Option<BigInt>> {
        let cap = BigInt::from(T4_MAGNITUDE_CAP);
        match self {
            FSpec::Pow(_) => {
                let (p, q) = self.pow_parts().unwrap();
                // n^−(p/q) ≤ 10^−d  ⟺  n^p ≥ 10^(d·q), decided exactly.
                // Any n ≤ cap has n^p ≤ 10^(12p), so d·q > 12p is infeasible.
                if d.saturating_mul(q as u64) > 12 * p as u64 {
                    return Ok(None);
                }
                let target = BigUint::from(10u32).pow((d * q as u64) as u32);
                let root = target.nth_root(p);
                let n = if root.pow(p) >= target { root } else { root + BigUint::one() };
                let n = BigInt::from(n);
                Ok(if n > cap { None } else { Some(n) })
            }
            FSpec::LogInv => {
                // 1/ln n ≤ 10^−d  ⟺  n ≥ e^(10^d); e^t > cap once t > 12·ln 10.
                if d >= 2 {
                    return Ok(None);
                }
                let t = BigRational::from_integer(pow10(d));
                let n = ceil_of(|w| Ok(Ball::from_rational(&t, w).exp(w)), prec)?;
                Ok(if n > cap { None } else { Some(n) })
            }
            FSpec::ExpInv(lambda) => {
                // e^−λn ≤ 10^−d  ⟺  n ≥ d·ln 10 / λ.
                let d_rat = BigRational::from_integer(BigInt::from(d));
                let lam = lambda.clone();
                let n = ceil_of(
                    |w| {
                        let ln10 = ln_ten(w)?;
                        let num = ln10.mul(&Ball::from_rational(&d_rat, w), w);
                        num.div(&Ball::from_rational(&lam, w), w)
                    },
                    prec,
                )?;
                Ok(if n > cap { None } else { Some(n.max(BigInt::one())) })
            }
        }
    }

    /// Enclosure of f(n); n ≥ 2 required for the logarithmic profile.
    pub fn ball(&self, n: &BigInt, prec: u32) -> Result<Ball> {
        let w = prec + 24;
        let nb = Ball::from_rational(&BigRational::from_integer(n.clone()), w);
        match self {
            FSpec::Pow(beta) => {
                let lnn = nb.ln(w)?;
                let e = lnn.mul(&Ball::from_rational(&-beta.clone(), w), w);
                Ok(e.exp(w).shrink(prec))
            }
            FSpec::LogInv => {
                let lnn = nb.ln(w)?;
                Ok(Ball::exact(Dyadic::one()).div(&lnn, w)?.shrink(prec))
            }
            FSpec::ExpInv(lambda) => {
                let e = nb.mul(&Ball::from_rational(&-lambda.clone(), w), w);
                Ok(e.exp(w).shrink(prec))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FSpec::Pow(beta) => format!("n^(-{beta})"),
            FSpec::LogInv => "1/ln(n)".into(),
            FSpec::ExpInv(lambda) => format!("exp(-{lambda}·n)"),
        }
    }
}

fn ln_ten(w: u32) -> Result<Ball> {
    Ball::from_rational(&BigRational::from_integer(BigInt::from(10)), w).ln(w)
}

/// Certified ceiling of a positive non-integer quantity given by enclosures.
fn ceil_of(mk: impl Fn(u32) -> Result<Ball>, prec: &Precision) -> Result<BigInt> {
    let mut w = 96u32;
    loop {
        let b = mk(w)?;
        let fl = b.lo().floor_int();
        let fd = Dyadic::from_int(fl.clone());
        let fd1 = Dyadic::from_int(&fl + 1);
        if b.lo().cmp_val(&fd) == Ordering::Greater && b.hi().cmp_val(&fd1) == Ordering::Less {
            return Ok(fl + 1);
        }
        if w >= prec.cap {
            return Err(Error::precision(w, "ceiling of enclosure straddles an integer"));
        }
        w = (w * 2).min(prec.cap);
    }
}

/// Enclosure of L(N) = log10(2π N^{3/2} / sqrt(−2 ln r′)).
fn stage_log_ball(n: &BigInt, r_prime: &BigRational, w: u32) -> Result<Ball> {
    let ln2pi = ball::pi(w).mul_pow2(1).ln(w)?;
    let lnn = Ball::from_rational(&BigRational::from_integer(n.clone()), w).ln(w)?;
    let lnrp = Ball::from_rational(r_prime, w).ln(w)?; // < 0
    let t = lnrp.mul_int(&BigInt::from(-2)); // −2 ln r′ > 0
    let lnt = t.ln(w)?;
    let num = ln2pi.add(&lnn.mul_int(&BigInt::from(3)).mul_pow2(-1), w).sub(&lnt.mul_pow2(-1), w);
    num.div(&ln_ten(w)?, w)
}

/// ⌊L(N)⌋ + 1, clamped to at least 1, with a certified floor.
fn stage_digits(n: &BigInt, r_prime: &BigRational, prec: &Precision) -> Result<u64> {
    let mut w = 96u32;
    loop {
        let b = stage_log_ball(n, r_prime, w)?;
        let fl = b.mid().floor_int();
        let fd = Dyadic::from_int(fl.clone());
        let fd1 = Dyadic::from_int(&fl + 1);
        if b.lo().cmp_val(&fd) != Ordering::Less && b.hi().cmp_val(&fd1) == Ordering::Less {
            let d = (fl + BigInt::one()).max(BigInt::one());
            return Ok(d.to_u64().expect("digit count fits in u64"));
        }
        if w >= prec.cap {
            return Err(Error::precision(w, "digit bound straddles an integer"));
        }
        w = (w * 2).min(prec.cap);
    }
}

/// A fully constructed schedule: the thresholds, the decay profile, the
/// (digits, index) pairs per stage, and the angle α = Σ 10^(−d_i) continued
/// by exponent doubling past the last constructed stage.
#[derive(Debug, Clone)]
pub struct T4Construction {
    pub r: BigRational,
    pub r_prime: BigRational,
    pub f: FSpec,
    /// Stage data (d_i, N_i), i = 1..=k.
    pub steps: Vec<(u64, BigInt)>,
    /// The decimal-series angle; its schedule prefix is `steps`' digits.
    pub alpha: RealSource,
}

/// Build the stage schedule and the angle for a threshold r, margin r′
/// (default (1 + r)/2), decay profile f, and `k_max` stages.
pub fn construct_t4_alpha(
    r: &BigRational,
    r_prime: Option<&BigRational>,
    f: &FSpec,
    k_max: u32,
    prec: &Precision,
) -> Result<T4Construction> {
    if !r.is_positive() || *r >= BigRational::one() {
        return Err(Error::InvalidParameter("threshold must lie strictly between 0 and 1".into()));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rp = match r_prime {
        Some(v) => v.clone(),
        None => (BigRational::one() + r) * &half,
    };
    if rp <= *r || rp >= BigRational::one() {
        return Err(Error::InvalidParameter(
            "margin threshold must lie strictly between the threshold and 1".into(),
        ));
    }
    f.validate()?;
    if k_max == 0 {
        return Err(Error::InvalidParameter("schedule needs at least one stage".into()));
    }

    let cap = BigInt::from(T4_MAGNITUDE_CAP);
    let mut steps: Vec<(u64, BigInt)> = Vec::with_capacity(k_max as usize);
    let mut n_i = f.least_n_below_one();
    let mut d_i = stage_digits(&n_i, &rp, prec)?;
    steps.push((d_i, n_i.clone()));
    for _ in 1..k_max {
        let Some(candidate) = f.least_n_at_most(d_i, prec)? else {
            return Err(Error::InfeasibleSchedule { cap: T4_MAGNITUDE_CAP });
        };
        let n_next = candidate.max(&n_i + 1);
        if n_next > cap {
            return Err(Error::InfeasibleSchedule { cap: T4_MAGNITUDE_CAP });
        }
        let d_next = (2 * d_i).max(stage_digits(&n_next, &rp, prec)?);
        steps.push((d_next, n_next.clone()));
        n_i = n_next;
        d_i = d_next;
    }

    // Structural invariants of the finished schedule.
    for w in steps.windows(2) {
        assert!(w[1].0 >= 2 * w[0].0, "digit exponents at least double");
        assert!(w[1].1 > w[0].1, "stage indices strictly increase");
    }
    if let Some((p, q)) = f.pow_parts() {
        for w in steps.windows(2) {
            let lhs = num_traits::pow(w[1].1.clone(), p as usize);
            let rhs = pow10(w[0].0 * q as u64);
            assert!(lhs >= rhs, "decay target met exactly at each stage");
        }
    }
    for (d, n) in &steps {
        // d > L(N): guaranteed by ⌊L⌋ + 1 ≤ d; recheck with a one-shot ball.
        let b = stage_log_ball(n, &rp, 128)?;
        assert!(
            b.hi().cmp_rational(&BigRational::from_integer(BigInt::from(*d))) == Ordering::Less,
            "digit exponent dominates the stage logarithm"
        );
    }

    let alpha = RealSource::DecimalSeries(DecimalSchedule::new(
        steps.iter().map(|s| s.0).collect(),
        true,
    )?);
    Ok(T4Construction { r: r.clone(), r_prime: rp, f: f.clone(), steps, alpha })
}

/// Verification record for one stage k ≥ 2: every multiple of 10^(d_{k−1})
/// up to N_k, the certified side of its sequence value against r, and the
/// two count-bound readings.
#[derive(Debug, Clone)]
pub struct T4Report {
    pub k: u32,
    pub d_prev: u64,
    pub n_k: BigInt,
    /// (n, side of |cos(π n α)|^n versus r) for each multiple.
    pub multiples: Vec<(BigInt, CertifiedOrder)>,
    /// True when every multiple certified strictly above r.
    pub all_exceed: bool,
    /// Number of multiples, ⌊N_k / 10^(d_{k−1})⌋.
    pub implied_count_bound: BigInt,
    /// Enclosure of the stage count target N_k · f(N_k).
    pub nf_lo: f64,
    pub nf_hi: f64,
    /// Whether implied_count_bound ≥ N_k·f(N_k); exact for power decay,
    /// None when an enclosure comparison stays unresolved at the cap.
    pub count_bound_holds: Option<bool>,
    /// Whether the untruncated chain N_k/10^(d_{k−1}) ≥ N_k·f(N_k) holds,
    /// i.e. 10^(−d_{k−1}) ≥ f(N_k); exact for power decay.
    pub chain_holds: bool,
}

/// Certify stage k of a construction: at most `MULTIPLE_LIMIT` multiples are
/// evaluated (more means the stage is not certifiable by enumeration here).
pub fn verify_t4(c: &T4Construction, k: u32, prec: &Precision) -> Result<T4Report> {
    const MULTIPLE_LIMIT: u64 = 4096;
    let ki = k as usize;
    if ki < 2 || ki > c.steps.len() {
        return Err(Error::InvalidParameter(format!(
            "stage index must lie between 2 and {}",
            c.steps.len()
        )));
    }
    let d_prev = c.steps[ki - 2].0;
    let n_k = c.steps[ki - 1].1.clone();
    let modulus = pow10(d_prev);
    let implied = n_k.div_floor(&modulus);
    if implied > BigInt::from(MULTIPLE_LIMIT) {
        return Err(Error::InvalidParameter(format!(
            "stage {k} has {implied} multiples; enumeration is capped at {MULTIPLE_LIMIT}"
        )));
    }

    let ctx = SourceCtx::new(c.alpha.clone());
    let mut multiples = Vec::new();
    let mut all_exceed = true;
    let mut j = BigInt::one();
    while j <= implied {
        let n = &j * &modulus;
        let nu = n.to_biguint().expect("multiples are positive");
        let mut tgt = prec.target;
        let order = loop {
            let val = seq::cos_pow(&ctx, &nu, &Precision { target: tgt, cap: prec.cap })?;
            match seq::compare(&val, &c.r) {
                CertifiedOrder::Unresolved if tgt < prec.cap => tgt = (tgt * 2).min(prec.cap),
                o => break o,
            }
        };
        all_exceed &= order == CertifiedOrder::Greater;
        multiples.push((n, order));
        j += 1;
    }
    if implied.is_zero() {
        all_exceed = false;
    }

    let nf = c.f.ball(&n_k, 64)?.mul_int(&n_k);
    let implied_rat = BigRational::from_integer(implied.clone());
    let count_bound_holds = match c.f.pow_parts() {
        Some((p, q)) => {
            // implied ≥ N^(1 − p/q)  ⟺  implied^q · N^max(p−q,0) ≥ N^max(q−p,0).
            let lhs = num_traits::pow(implied.clone(), q as usize)
                * num_traits::pow(n_k.clone(), p.saturating_sub(q) as usize);
            let rhs = num_traits::pow(n_k.clone(), q.saturating_sub(p) as usize);
            Some(lhs >= rhs)
        }
        None => {
            let mut w = 96u32;
            loop {
                let b = c.f.ball(&n_k, w)?.mul_int(&n_k);
                match b.cmp_rational(&implied_rat) {
                    Some(o) => break Some(o != Ordering::Greater),
                    None if w < prec.cap => w = (w * 4).min(prec.cap),
                    None => break None,
                }
            }
        }
    };
    let chain_holds = match c.f.pow_parts() {
        // 10^(−d) ≥ N^(−p/q)  ⟺  N^p ≥ 10^(d·q).
        Some((p, q)) => num_traits::pow(n_k.clone(), p as usize) >= pow10(d_prev * q as u64),
        None => {
            // 10^(−d) ≥ f(N): compare f(N) against the rational 10^(−d).
            let thr = BigRational::new(BigInt::one(), pow10(d_prev));
            let mut w = 96u32;
            loop {
                let b = c.f.ball(&n_k, w)?;
                match b.cmp_rational(&thr) {
                    Some(o) => break o != Ordering::Greater,
                    None if w < prec.cap => w = (w * 4).min(prec.cap),
                    None => break false,
                }
            }
        }
    };

    Ok(T4Report {
        k,
        d_prev,
        n_k,
        multiples,
        all_exceed,
        implied_count_bound: implied,
        nf_lo: nf.lo().to_f64(),
        nf_hi: nf.hi().to_f64(),
        count_bound_holds,
        chain_holds,
    })
}
