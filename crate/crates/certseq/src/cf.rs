//! Continued fractions: representations (finite lists, eventually periodic
//! expansions, explicit quotient rules), convergents, certified expansion of
//! real sources, quotient-parity classification, and the Hurwitz filter.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;

use crate::ball::Ball;
use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};
use crate::real::{RealSource, Surd};
use crate::Precision;

/// Explicit quotient rules with known closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfRule {
    /// a_0 = 1, a_{2i} = i + 1, a_{2i+1} = 1: even-indexed quotients ramp.
    EvenRamp,
    /// a_0 = 2, a_{3k+2} = 2(k+1), all other quotients 1.
    EulerPattern,
}

impl CfRule {
    pub fn integer_part(self) -> BigInt {
        match self {
            CfRule::EvenRamp => BigInt::one(),
            CfRule::EulerPattern => BigInt::from(2),
        }
    }

    /// Quotient a_i for i ≥ 1.
    pub fn quotient(self, i: u64) -> BigUint {
        match self {
            CfRule::EvenRamp => {
                if i % 2 == 0 {
                    BigUint::from(i / 2 + 1)
                } else {
                    BigUint::one()
                }
            }
            CfRule::EulerPattern => {
                if i % 3 == 2 {
                    BigUint::from(2 * (i / 3 + 1))
                } else {
                    BigUint::one()
                }
            }
        }
    }

    /// Even-indexed quotients grow without bound under both rules.
    pub fn even_quotients_unbounded(self) -> bool {
        match self {
            // a_{2i} = i + 1.
            CfRule::EvenRamp => true,
            // a_{3k+2} with 3k+2 even (k even) equals 2(k+1).
            CfRule::EulerPattern => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quotients {
    Finite(Vec<BigUint>),
    Periodic { pre: Vec<BigUint>, cycle: Vec<BigUint> },
    Rule(CfRule),
}

/// A continued fraction a_0 + 1/(a_1 + 1/(a_2 + …)).
///
/// `exact` records whether the object describes its real value completely
/// (finite canonical form, a full eventually-periodic expansion, or a rule)
/// or is merely a certified prefix of a longer expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    a0: BigInt,
    quotients: Quotients,
    exact: bool,
}

impl ContinuedFraction {
    pub fn finite(a0: BigInt, rest: Vec<BigUint>, exact: bool) -> Result<Self> {
        if rest.iter().any(|a| a.is_zero()) {
            return Err(Error::InvalidCf("quotients after a0 must be positive".into()));
        }
        if exact {
            if let Some(last) = rest.last() {
                if last.is_one() && rest.len() >= 1 {
                    return Err(Error::InvalidCf(
                        "canonical finite form requires a final quotient of at least 2".into(),
                    ));
                }
            }
        }
        Ok(Self { a0, quotients: Quotients::Finite(rest), exact })
    }

    pub fn periodic(a0: BigInt, pre: Vec<BigUint>, cycle: Vec<BigUint>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidCf("empty period".into()));
        }
        if pre.iter().chain(cycle.iter()).any(|a| a.is_zero()) {
            return Err(Error::InvalidCf("quotients after a0 must be positive".into()));
        }
        Ok(Self { a0, quotients: Quotients::Periodic { pre, cycle }, exact: true })
    }

    pub fn from_rule(rule: CfRule) -> Self {
        Self { a0: rule.integer_part(), quotients: Quotients::Rule(rule), exact: true }
    }

    pub fn integer_part(&self) -> &BigInt {
        &self.a0
    }

    pub fn quotients(&self) -> &Quotients {
        &self.quotients
    }

    pub fn is_exact_value(&self) -> bool {
        self.exact
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.quotients, Quotients::Finite(_))
    }

    /// Number of quotients after a0, when finite.
    pub fn tail_len(&self) -> Option<u64> {
        match &self.quotients {
            Quotients::Finite(v) => Some(v.len() as u64),
            _ => None,
        }
    }

    /// Quotient a_i; None past the end of a finite expansion.
    pub fn quotient(&self, i: u64) -> Option<BigInt> {
        if i == 0 {
            return Some(self.a0.clone());
        }
        match &self.quotients {
            Quotients::Finite(v) => v.get((i - 1) as usize).cloned().map(BigInt::from),
            Quotients::Periodic { pre, cycle } => {
                let j = (i - 1) as usize;
                if j < pre.len() {
                    Some(BigInt::from(pre[j].clone()))
                } else {
                    Some(BigInt::from(cycle[(j - pre.len()) % cycle.len()].clone()))
                }
            }
            Quotients::Rule(rule) => Some(BigInt::from(rule.quotient(i))),
        }
    }

    /// Exact rational value of a finite expansion flagged exact.
    pub fn exact_rational(&self) -> Option<BigRational> {
        if !self.exact || !self.is_finite() {
            return None;
        }
        let n = self.tail_len().unwrap() + 1;
        let cs = convergents(self, n).ok()?;
        let last = cs.last()?;
        Some(BigRational::new(last.p.clone(), last.q.clone()))
    }

    /// Certified enclosure of the value.  For exact objects the radius is at
    /// most 2^−bits; a truncated prefix cannot be located more precisely than
    /// 1/q² of its last convergent, and the returned radius says so honestly.
    pub fn approx(&self, bits: u32) -> Ball {
        if let Some(r) = self.exact_rational() {
            let pad = (r.numer().bits() as i64 - r.denom().bits() as i64).max(0) as u32;
            return Ball::from_rational(&r, bits + pad + 8);
        }
        let mut prev = Convergent {
            index: 0,
            p: self.a0.clone(),
            q: BigInt::one(),
            side: Side::Below,
        };
        let mut pm1 = BigInt::one();
        let mut qm1 = BigInt::zero();
        let target = BigUint::one() << (bits as u64 + 2);
        let mut i = 1u64;
        loop {
            match self.quotient(i) {
                Some(a) => {
                    let p = &a * &prev.p + &pm1;
                    let q = &a * &prev.q + &qm1;
                    pm1 = std::mem::replace(&mut prev.p, p);
                    qm1 = std::mem::replace(&mut prev.q, q);
                    prev.index = i;
                    if (prev.q.magnitude() * qm1.magnitude()) >= target {
                        // x lies strictly between consecutive convergents.
                        let r1 = BigRational::new(pm1.clone(), qm1.clone());
                        let r2 = BigRational::new(prev.p.clone(), prev.q.clone());
                        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
                        return Ball::from_endpoints(
                            Dyadic::from_rational(&lo, bits + 16, Round::Down),
                            Dyadic::from_rational(&hi, bits + 16, Round::Up),
                        );
                    }
                    i += 1;
                }
                None => {
                    // Truncated prefix: the value lies within 1/q² of p/q.
                    let r = BigRational::new(prev.p.clone(), prev.q.clone());
                    let b = Ball::from_rational(&r, bits + 16);
                    let slack = BigRational::new(BigInt::one(), &prev.q * &prev.q);
                    return b.widen(&Dyadic::from_rational(&slack, 16, Round::Up));
                }
            }
        }
    }
}

/// Which side of the limit an (infinite-expansion) convergent falls on:
/// below for even indices, above for odd indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: u64,
    pub p: BigInt,
    pub q: BigInt,
    pub side: Side,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

/// First k convergents p_0/q_0 … p_{k−1}/q_{k−1}.
pub fn convergents(cf: &ContinuedFraction, k: u64) -> Result<Vec<Convergent>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    if let Some(len) = cf.tail_len() {
        let available = len + 1;
        if k > available {
            return Err(Error::DepthExceeded { requested: k, available });
        }
    }
    let mut out = Vec::with_capacity(k.min(1 << 20) as usize);
    let (mut pm1, mut qm1) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (cf.a0.clone(), BigInt::one());
    out.push(Convergent { index: 0, p: p.clone(), q: q.clone(), side: Side::Below });
    for i in 1..k {
        let a = cf.quotient(i).expect("length checked above");
        let pn = &a * &p + &pm1;
        let qn = &a * &q + &qm1;
        pm1 = std::mem::replace(&mut p, pn);
        qm1 = std::mem::replace(&mut q, qn);
        out.push(Convergent {
            index: i,
            p: p.clone(),
            q: q.clone(),
            side: if i % 2 == 0 { Side::Below } else { Side::Above },
        });
    }
    Ok(out)
}

/// Expansion of a real source into a continued fraction.
///
/// Rationals expand by exact Euclidean division; quadratic surds by the exact
/// periodic-state algorithm (returning the full eventually-periodic
/// expansion); CF-defined sources pass through; every other source goes
/// through certified interval quotient extraction, doubling the working
/// precision from 64 bits up to the configured cap.
pub fn expand_real(x: &RealSource, max_terms: u64, prec: &Precision) -> Result<ContinuedFraction> {
    if let Some(r) = x.as_rational() {
        return Ok(expand_rational(&r, max_terms));
    }
    match x {
        RealSource::QuadraticSurd(s) => expand_surd(s, max_terms),
        RealSource::CfDefined(cf) => Ok(cf.clone()),
        _ => expand_by_interval(x, max_terms, prec),
    }
}

fn expand_rational(r: &BigRational, max_terms: u64) -> ContinuedFraction {
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    let a0 = num.div_floor(&den);
    num -= &a0 * &den;
    // Invariant: value = a0 + num/den with 0 <= num < den.
    let mut rest: Vec<BigUint> = Vec::new();
    let mut truncated = false;
    while !num.is_zero() {
        if rest.len() as u64 + 1 >= max_terms {
            truncated = true;
            break;
        }
        let (q, rem) = den.div_rem(&num);
        rest.push(q.magnitude().clone());
        den = std::mem::replace(&mut num, rem);
    }
    ContinuedFraction::finite(a0, rest, !truncated)
        .expect("euclidean expansion is canonical")
}

fn expand_surd(s: &Surd, max_terms: u64) -> Result<ContinuedFraction> {
    let _ = max_terms; // the full periodic description is returned regardless
    let (a, b, d, c) = s.parts();
    // Normalize to (P + √D)/Q with Q | D − P².
    let (mut pp, dd, mut qq) = if b.is_positive() {
        (a * c, b * b * BigInt::from(d.clone()) * c * c, c * c)
    } else {
        (-(a * c), b * b * BigInt::from(d.clone()) * c * c, -(c * c))
    };
    let dmag = dd.magnitude().clone();
    let sq = BigInt::from(dmag.sqrt());
    debug_assert!((&dd - (&pp * &pp)).mod_floor(&qq).is_zero());

    let floor_state = |p: &BigInt, q: &BigInt| -> BigInt {
        // floor((p + √D)/q) with √D irrational.
        if q.is_positive() {
            (p + &sq).div_floor(q)
        } else {
            let qa = -q.clone();
            -((p + &sq).div_floor(&qa)) - 1
        }
    };

    let a0 = floor_state(&pp, &qq);
    let mut quots: Vec<BigUint> = Vec::new();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let cap = 400_000usize;
    loop {
        // Advance: x' = 1/(x − a)  ⇒  P' = aQ − P, Q' = (D − P'²)/Q.
        let a = if quots.is_empty() { a0.clone() } else { BigInt::from(quots.last().unwrap().clone()) };
        let pn = &a * &qq - &pp;
        debug_assert!(((&dd - &pn * &pn) % &qq).is_zero());
        let qn = (&dd - &pn * &pn) / &qq;
        pp = pn;
        qq = qn;
        debug_assert!(!qq.is_zero(), "surd state cannot terminate");
        if let Some(&start) = seen.get(&(pp.clone(), qq.clone())) {
            let cycle = quots.split_off(start);
            return ContinuedFraction::periodic(a0, quots, cycle);
        }
        seen.insert((pp.clone(), qq.clone()), quots.len());
        let an = floor_state(&pp, &qq);
        quots.push(an.magnitude().clone());
        if quots.len() >= cap {
            return Err(Error::InvalidParameter(format!(
                "surd period exceeds {cap} states"
            )));
        }
    }
}

fn expand_by_interval(x: &RealSource, max_terms: u64, prec: &Precision) -> Result<ContinuedFraction> {
    expand_from_enclosures(|w| x.approx(w), max_terms, prec)
}

/// Certified quotient extraction from arbitrary enclosures: `approx(w)` must
/// return an enclosure of one fixed (irrational) real with radius at most
/// 2^−w.  Returns a certified prefix of its expansion.
pub fn expand_from_enclosures(
    approx: impl Fn(u32) -> Ball,
    max_terms: u64,
    prec: &Precision,
) -> Result<ContinuedFraction> {
    let mut w = prec.target.max(64);
    loop {
        let b = approx(w);
        let mut lo = b.lo().to_rational();
        let mut hi = b.hi().to_rational();
        let mut terms: Vec<BigInt> = Vec::new();
        while (terms.len() as u64) < max_terms {
            let flo = lo.floor().to_integer();
            let fhi = hi.floor().to_integer();
            if flo != fhi {
                break;
            }
            terms.push(flo.clone());
            let frac_lo = &lo - BigRational::from_integer(flo.clone());
            let frac_hi = &hi - BigRational::from_integer(flo);
            if frac_lo.is_zero() || frac_hi.is_zero() {
                break; // cannot certify the next quotient from this interval
            }
            // Reciprocal swaps the endpoints.
            lo = frac_hi.recip();
            hi = frac_lo.recip();
        }
        if terms.len() as u64 == max_terms {
            let a0 = terms[0].clone();
            let rest: Vec<BigUint> = terms[1..].iter().map(|t| t.magnitude().clone()).collect();
            return ContinuedFraction::finite(a0, rest, false);
        }
        if w >= prec.cap {
            return Err(Error::precision(w, "continued-fraction quotient extraction"));
        }
        w = (w * 2).min(prec.cap);
    }
}

/// Verdict on the even-indexed partial quotients of an expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvenQuotientVerdict {
    /// All even-indexed quotients are provably < m (least such bound).
    BoundedEven { m: BigUint },
    /// Even-indexed quotients are provably unbounded.
    UnboundedEven,
    /// Only a finite prefix is known; nothing is provable.
    UnknownAtDepth { scanned: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenQuotientClassification {
    pub verdict: EvenQuotientVerdict,
    pub observed_even_max: BigUint,
    pub observed_odd_max: BigUint,
    pub depth: u64,
}

/// Classify the even-indexed quotients of `cf`, scanning `depth` terms for
/// the observed maxima.  Provable verdicts come only from periodic
/// expansions or explicit rules; a0 counts as index 0 (clamped at 0 when
/// negative).
pub fn classify_even_pq(cf: &ContinuedFraction, depth: u64) -> EvenQuotientClassification {
    let mut even_max = BigUint::zero();
    let mut odd_max = BigUint::zero();
    let mut scanned = 0u64;
    for i in 0..depth {
        match cf.quotient(i) {
            None => break,
            Some(a) => {
                let mag = if a.is_negative() { BigUint::zero() } else { a.magnitude().clone() };
                if i % 2 == 0 {
                    even_max = even_max.max(mag);
                } else {
                    odd_max = odd_max.max(mag);
                }
                scanned += 1;
            }
        }
    }
    let verdict = match &cf.quotients {
        Quotients::Finite(_) => EvenQuotientVerdict::UnknownAtDepth { scanned },
        Quotients::Rule(rule) => {
            if rule.even_quotients_unbounded() {
                EvenQuotientVerdict::UnboundedEven
            } else {
                EvenQuotientVerdict::UnknownAtDepth { scanned }
            }
        }
        Quotients::Periodic { pre, cycle } => {
            let mut bound = if cf.a0.is_negative() {
                BigUint::zero()
            } else {
                cf.a0.magnitude().clone()
            };
            for (j, a) in pre.iter().enumerate() {
                let idx = j + 1;
                if idx % 2 == 0 {
                    bound = bound.max(a.clone());
                }
            }
            let start = pre.len() + 1; // index of cycle position 0
            let p = cycle.len();
            for (j, a) in cycle.iter().enumerate() {
                // Even indices i ≥ start hit cycle position j iff
                // i ≡ start + j (mod p) has even solutions: always when p is
                // odd, and exactly when start + j is even otherwise.
                let reachable = p % 2 == 1 || (start + j) % 2 == 0;
                if reachable {
                    bound = bound.max(a.clone());
                }
            }
            EvenQuotientVerdict::BoundedEven { m: bound + BigUint::one() }
        }
    };
    EvenQuotientClassification { verdict, observed_even_max: even_max, observed_odd_max: odd_max, depth: scanned }
}

/// min(1/2, 1/(2(m+1))): the approximation constant certified by an even-
/// quotient bound m ≥ 1.
pub fn badly_approx_constant(m: &BigUint) -> Result<BigRational> {
    if m.is_zero() {
        return Err(Error::InvalidParameter("even-quotient bound must be at least 1".into()));
    }
    let c = BigRational::new(BigInt::one(), BigInt::from(2u32) * (BigInt::from(m.clone()) + 1));
    Ok(c.min(BigRational::new(BigInt::one(), BigInt::from(2))))
}

/// The subset of the first k convergents p/q of x with |x − p/q| < 1/(√5 q²).
///
/// Exact for quadratic surds; certified ball comparisons with precision
/// escalation otherwise.  Rational or truncated sources are rejected.
pub fn hurwitz_filter(x: &RealSource, k: u64, prec: &Precision) -> Result<Vec<Convergent>> {
    if !x.provably_irrational() {
        return Err(Error::NotIrrational);
    }
    let cf = expand_real(x, k + 2, prec)?;
    let avail = cf.tail_len().map(|l| l + 1).unwrap_or(u64::MAX).min(k);
    let cs = convergents(&cf, avail)?;
    let mut out = Vec::new();
    for c in cs {
        if hurwitz_passes(x, &c, prec)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Decide 5q²(qx − p)² < 1 for a convergent p/q of x.
fn hurwitz_passes(x: &RealSource, c: &Convergent, prec: &Precision) -> Result<bool> {
    let one = BigRational::one();
    let five_q2 = BigInt::from(5) * &c.q * &c.q;
    match x {
        RealSource::QuadraticSurd(s) => {
            let resid = s.times_minus_int(&c.q, &c.p).square().mul_int(&five_q2);
            Ok(resid.cmp_rational(&one) == Ordering::Less)
        }
        _ => {
            let mut w = prec.target.max(64);
            loop {
                let xb = x.approx(w);
                let t = xb.mul_int(&c.q).sub(&Ball::exact(Dyadic::from_int(c.p.clone())), w + 8);
                let v = t.mul(&t, w + 8).mul_int(&five_q2);
                match v.cmp_rational(&one) {
                    Some(Ordering::Less) => return Ok(true),
                    Some(_) => return Ok(false),
                    None => {
                        if w >= prec.cap {
                            return Err(Error::precision(w, "hurwitz comparison"));
                        }
                        w = (w * 2).min(prec.cap);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn cf_lit(a0: i64, rest: &[u64], exact: bool) -> ContinuedFraction {
        ContinuedFraction::finite(
            BigInt::from(a0),
            rest.iter().map(|&a| BigUint::from(a)).collect(),
            exact,
        )
        .unwrap()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn rational_expansion_round_trips() {
        for (p, q) in [(17i64, 12i64), (355, 113), (-7, 3), (0, 1), (8, 1), (1, 1000000)] {
            let r = rat(p, q);
            let cf = expand_real(&RealSource::Rational(r.clone()), 64, &Precision::eval_default()).unwrap();
            assert!(cf.is_exact_value(), "{p}/{q}");
            assert_eq!(cf.exact_rational().unwrap(), r, "{p}/{q}");
        }
    }

    #[test]
    fn canonical_form_rejects_trailing_one() {
        assert!(ContinuedFraction::finite(BigInt::zero(), vec![3u32.into(), 1u32.into()], true).is_err());
        assert!(ContinuedFraction::finite(BigInt::zero(), vec![3u32.into(), 1u32.into()], false).is_ok());
    }

    #[test]
    fn sqrt2_and_phi_periods() {
        let p = Precision::eval_default();
        let cf = expand_real(&RealSource::sqrt2(), 10, &p).unwrap();
        assert_eq!(cf.integer_part(), &BigInt::one());
        assert_eq!(
            cf.quotients(),
            &Quotients::Periodic { pre: vec![], cycle: vec![BigUint::from(2u32)] }
        );
        let cf = expand_real(&RealSource::phi(), 10, &p).unwrap();
        assert_eq!(
            cf.quotients(),
            &Quotients::Periodic { pre: vec![], cycle: vec![BigUint::one()] }
        );
        let cf = expand_real(
            &RealSource::QuadraticSurd(Surd::sqrt_int(3).unwrap()),
            10,
            &p,
        )
        .unwrap();
        assert_eq!(
            cf.quotients(),
            &Quotients::Periodic { pre: vec![], cycle: vec![BigUint::one(), BigUint::from(2u32)] }
        );
    }

    #[test]
    fn surd_expansion_matches_interval_extraction() {
        let p = Precision::eval_default();
        let cases = [
            Surd::new(5.into(), BigInt::from(-1), 2u32.into(), 2.into()).unwrap(),
            Surd::new(3.into(), 2.into(), 7u32.into(), 5.into()).unwrap(),
            Surd::new(BigInt::from(-4), 3.into(), 13u32.into(), 6.into()).unwrap(),
        ];
        for s in cases {
            let periodic = expand_surd(&s, 24).unwrap();
            let by_interval =
                expand_by_interval(&RealSource::QuadraticSurd(s.clone()), 24, &p).unwrap();
            for i in 0..24 {
                assert_eq!(
                    periodic.quotient(i),
                    by_interval.quotient(i),
                    "{s:?} term {i}"
                );
            }
        }
    }

    #[test]
    fn convergents_of_euler_rule_match_reference() {
        let cf = ContinuedFraction::from_rule(CfRule::EulerPattern);
        let cs = convergents(&cf, 8).unwrap();
        let expect: [(i64, i64); 8] =
            [(2, 1), (3, 1), (8, 3), (11, 4), (19, 7), (87, 32), (106, 39), (193, 71)];
        for (c, (p, q)) in cs.iter().zip(expect) {
            assert_eq!((c.p.clone(), c.q.clone()), (BigInt::from(p), BigInt::from(q)));
        }
        assert_eq!(cs[3].side, Side::Above);
        assert_eq!(cs[4].side, Side::Below);
    }

    #[test]
    fn determinant_identity_on_rule_cf() {
        let cf = ContinuedFraction::from_rule(CfRule::EvenRamp);
        let cs = convergents(&cf, 60).unwrap();
        for w in cs.windows(2) {
            let det = &w[0].p * &w[1].q - &w[1].p * &w[0].q;
            let expect = if w[1].index % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            assert_eq!(det, expect, "at index {}", w[1].index);
        }
    }

    #[test]
    fn depth_error_reports_available_terms() {
        let cf = cf_lit(0, &[3], true);
        match convergents(&cf, 5) {
            Err(Error::DepthExceeded { requested, available }) => {
                assert_eq!((requested, available), (5, 2));
            }
            other => panic!("expected depth error, got {other:?}"),
        }
    }

    #[test]
    fn classify_examples() {
        // Finite prefix: nothing provable.
        let cf = cf_lit(0, &[1, 5, 1, 7, 1], false);
        let cl = classify_even_pq(&cf, 5);
        assert_eq!(cl.verdict, EvenQuotientVerdict::UnknownAtDepth { scanned: 5 });
        assert_eq!(cl.observed_even_max, BigUint::from(7u32));
        assert_eq!(cl.observed_odd_max, BigUint::one());

        // φ: all quotients 1, provably bounded with least strict bound 2.
        let phi = expand_surd(&Surd::golden_ratio(), 10).unwrap();
        let cl = classify_even_pq(&phi, 100);
        assert_eq!(cl.verdict, EvenQuotientVerdict::BoundedEven { m: BigUint::from(2u32) });
        assert_eq!(cl.observed_even_max, BigUint::one());

        // Even-ramp rule: provably unbounded; depth-100 scan sees a_98 = 50.
        let ramp = ContinuedFraction::from_rule(CfRule::EvenRamp);
        let cl = classify_even_pq(&ramp, 100);
        assert_eq!(cl.verdict, EvenQuotientVerdict::UnboundedEven);
        assert_eq!(cl.observed_even_max, BigUint::from(50u32));
        assert_eq!(cl.observed_odd_max, BigUint::one());

        let euler = ContinuedFraction::from_rule(CfRule::EulerPattern);
        let cl = classify_even_pq(&euler, 100);
        assert_eq!(cl.verdict, EvenQuotientVerdict::UnboundedEven);
    }

    #[test]
    fn classify_period_parity_reachability() {
        // Period (1, 9) starting at index 1: position of 9 is reached at even
        // indices (index 2, 4, … alternate; start = 1, p = 2: reachable j has
        // (1 + j) even ⇒ j = 1, the entry 9).
        let cf = ContinuedFraction::periodic(
            BigInt::one(),
            vec![],
            vec![BigUint::one(), BigUint::from(9u32)],
        )
        .unwrap();
        let cl = classify_even_pq(&cf, 16);
        assert_eq!(cl.verdict, EvenQuotientVerdict::BoundedEven { m: BigUint::from(10u32) });
        // Same cycle shifted by a one-element preamble: now only the entry 1
        // lands on even indices, and a0 = 1 also counts.
        let cf = ContinuedFraction::periodic(
            BigInt::one(),
            vec![BigUint::from(3u32)],
            vec![BigUint::one(), BigUint::from(9u32)],
        )
        .unwrap();
        let cl = classify_even_pq(&cf, 16);
        assert_eq!(cl.verdict, EvenQuotientVerdict::BoundedEven { m: BigUint::from(2u32) });
    }

    #[test]
    fn badly_approx_constant_examples() {
        assert_eq!(badly_approx_constant(&BigUint::one()).unwrap(), rat(1, 4));
        assert_eq!(badly_approx_constant(&BigUint::from(2u32)).unwrap(), rat(1, 6));
        assert_eq!(badly_approx_constant(&BigUint::from(10u32)).unwrap(), rat(1, 22));
        assert!(badly_approx_constant(&BigUint::zero()).is_err());
    }

    #[test]
    fn hurwitz_sqrt2_all_pass_phi_odd_only() {
        let p = Precision::eval_default();
        let pass = hurwitz_filter(&RealSource::sqrt2(), 8, &p).unwrap();
        assert_eq!(pass.len(), 8);
        let qs: Vec<i64> = pass.iter().map(|c| c.q.to_i64().unwrap()).collect();
        assert_eq!(qs, vec![1, 2, 5, 12, 29, 70, 169, 408]);

        let pass = hurwitz_filter(&RealSource::phi(), 12, &p).unwrap();
        let idx: Vec<u64> = pass.iter().map(|c| c.index).collect();
        assert_eq!(idx, vec![1, 3, 5, 7, 9, 11]);
        assert_eq!(pass.last().unwrap().q, BigInt::from(144));
    }

    #[test]
    fn hurwitz_euler_e_reference_indices() {
        let p = Precision::eval_default();
        let pass = hurwitz_filter(&RealSource::EulerE, 11, &p).unwrap();
        let pairs: Vec<(u64, i64)> = pass.iter().map(|c| (c.index, c.q.to_i64().unwrap())).collect();
        assert_eq!(pairs, vec![(1, 1), (4, 7), (7, 71), (10, 1001)]);
    }

    #[test]
    fn hurwitz_rejects_rational() {
        let p = Precision::eval_default();
        assert!(matches!(
            hurwitz_filter(&RealSource::rational_i64(22, 7), 5, &p),
            Err(Error::NotIrrational)
        ));
    }

    #[test]
    fn expand_euler_e_interval_extraction() {
        let p = Precision::eval_default();
        let cf = expand_real(&RealSource::EulerE, 12, &p).unwrap();
        assert!(!cf.is_exact_value());
        let want: [i64; 12] = [2, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(cf.quotient(i as u64), Some(BigInt::from(*w)), "term {i}");
        }
    }

    #[test]
    fn expand_pi_interval_extraction() {
        let p = Precision::eval_default();
        let cf = expand_real(&RealSource::PiMultiple(rat(1, 1)), 6, &p).unwrap();
        let want: [i64; 6] = [3, 7, 15, 1, 292, 1];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(cf.quotient(i as u64), Some(BigInt::from(*w)), "term {i}");
        }
    }

    #[test]
    fn cf_approx_encloses_value() {
        let cf = ContinuedFraction::from_rule(CfRule::EvenRamp);
        let b = cf.approx(80);
        // Hand recurrence: convergents 1113/641 and 1304/751 pin the value
        // to 1.73635... .
        assert_eq!(b.cmp_rational(&rat(173635, 100000)), Some(Ordering::Greater));
        assert_eq!(b.cmp_rational(&rat(173636, 100000)), Some(Ordering::Less));
        assert!(b.rad().to_f64() <= 2f64.powi(-80));
    }
}
