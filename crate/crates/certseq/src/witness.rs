//! Density witnesses: certified indices n at which a sequence value lands
//! within a requested tolerance of a target in [0, 1].
//!
//! Three searches are provided, one per sequence family:
//!
//! * [`find_frac_witness`] — values {n·x}^n, candidates built from odd-index
//!   continued-fraction convergents of x (which land {n·x} just below 1);
//! * [`find_cos_witness`] — values |g(cos(x·n))|^n (or the sine variant),
//!   candidates near integer multiples of convergent denominators of x/π;
//! * [`find_square_witness`] — values |g(cos(x·n²))|^n, an ascending scan
//!   with an exact-integer phase screen.
//!
//! Every reported hit is certified by evaluating the value as a ball and
//! comparing its endpoints against [target − tol, target + tol] with exact
//! dyadic/rational comparisons. Floating-point appears only in screening
//! heuristics and in display fields.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::{self, Ball};
use crate::cf;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::gpoly::GPoly;
use crate::real::{RealSource, Surd};
use crate::seq::{self, SourceCtx};
use crate::Precision;

/// Outcome of a witness search. `certified` is decided by exact dyadic
/// comparison; the f64 fields are display-grade views of the certified
/// enclosures.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    /// Index achieving (or closest to) the target; may exceed u64.
    pub n: BigUint,
    /// Certified enclosure of the sequence value at `n`.
    pub value_lo: f64,
    pub value_hi: f64,
    pub target: f64,
    pub tolerance: f64,
    /// Certified upper bound on |value - target|.
    pub distance_hi: f64,
    /// True when distance_hi <= tolerance held under exact comparison.
    pub certified: bool,
    /// Candidates fully evaluated with certified enclosures.
    pub evaluations: u64,
    /// Candidates rejected by the cheap low-precision screen.
    pub screened: u64,
    /// Working precision (bits) at the final evaluation.
    pub precision_bits: u32,
    /// Human-readable note on how the candidate was generated.
    pub detail: String,
}

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Certified upper bound on |value − y| as a display f64.
fn distance_hi_f64(val: &Ball, y: &BigRational) -> f64 {
    let lo = (val.lo().to_rational() - y).abs();
    let hi = (val.hi().to_rational() - y).abs();
    rat_f64(&lo.max(hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HitStatus {
    /// Enclosure certified inside [y − tol, y + tol].
    Hit,
    /// Enclosure certified outside the window.
    Miss,
    /// Enclosure straddles a window edge at this precision.
    Unresolved,
}

fn classify_hit(val: &Ball, y: &BigRational, tol: &BigRational) -> HitStatus {
    let lo_thr = y - tol;
    let hi_thr = y + tol;
    let lo = val.lo();
    let hi = val.hi();
    if lo.cmp_rational(&lo_thr) != Ordering::Less && hi.cmp_rational(&hi_thr) != Ordering::Greater {
        HitStatus::Hit
    } else if lo.cmp_rational(&hi_thr) == Ordering::Greater
        || hi.cmp_rational(&lo_thr) == Ordering::Less
    {
        HitStatus::Miss
    } else {
        HitStatus::Unresolved
    }
}

fn check_target_tolerance(y: &BigRational, tol: &BigRational) -> Result<()> {
    if !y.is_positive() || *y >= BigRational::one() {
        return Err(Error::TargetOutOfRange);
    }
    if !tol.is_positive() {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Local vanishing order of 1 − g(cos(s·t)) at t = 0
// ---------------------------------------------------------------------------

/// Period of the profile t ↦ g(cos(s·t)), kept symbolic so that π is never
/// rounded prematurely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Period {
    /// The value s·π for a rational s.
    PiRational(BigRational),
    /// A plain rational period.
    Rational(BigRational),
}

impl Period {
    pub fn ball(&self, prec: u32) -> Ball {
        match self {
            Period::PiRational(s) => {
                let wp = prec + 8;
                ball::pi(wp).mul(&Ball::from_rational(s, wp), wp).shrink(prec)
            }
            Period::Rational(t) => Ball::from_rational(t, prec),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.ball(64).to_f64()
    }
}

/// Taylor data of h(t) = g(cos(s·t)) at t = 0: h(t) = 1 + coeff·t^order + …
/// with `order` even and `coeff` < 0 for any certified g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingData {
    pub order: u32,
    pub coeff: BigRational,
    pub period: Period,
}

fn mul_trunc(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            if bj.is_zero() {
                continue;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Exact Taylor analysis of h(t) = g(cos(scale·t)) at t = 0.
///
/// Returns the least positive order d with a nonzero coefficient, that
/// coefficient, and the period 2π/scale of h. The truncation order
/// 2·deg(g) + 8 always suffices: 1 − g(y) has a root of order at most deg(g)
/// at y = 1, and cos(scale·t) − 1 vanishes to order exactly 2.
pub fn vanishing_order(g: &GPoly, scale: &BigRational) -> Result<VanishingData> {
    if !scale.is_positive() {
        return Err(Error::InvalidParameter("profile scale must be positive".into()));
    }
    let deg = g.degree();
    let len = 2 * deg + 9;

    // Even-order Taylor coefficients of cos(scale·t).
    let mut cos_series = vec![BigRational::zero(); len];
    cos_series[0] = BigRational::one();
    let s2 = scale * scale;
    let mut k = 2usize;
    while k < len {
        let step = BigRational::from_integer(BigInt::from(((k - 1) * k) as u64));
        cos_series[k] = -(&cos_series[k - 2] * &s2) / step;
        k += 2;
    }

    // Compose g with the cosine series, truncating at t^(len−1).
    let mut h = vec![BigRational::zero(); len];
    h[0] = g.coeffs()[0].clone();
    let mut pow = vec![BigRational::zero(); len];
    pow[0] = BigRational::one();
    for j in 1..=deg {
        pow = mul_trunc(&pow, &cos_series, len);
        let gc = &g.coeffs()[j];
        if gc.is_zero() {
            continue;
        }
        for i in 0..len {
            if !pow[i].is_zero() {
                h[i] += gc * &pow[i];
            }
        }
    }
    assert!(h[0].is_one(), "profile must equal 1 at t = 0");

    let d = match (1..len).find(|&i| !h[i].is_zero()) {
        Some(d) => d,
        None => return Err(Error::DegenerateG),
    };
    debug_assert!(d % 2 == 0, "even profile has even vanishing order");
    let coeff = h[d].clone();
    if !coeff.is_negative() {
        return Err(Error::InvalidG(
            "leading profile coefficient must be negative for a unit-modulus maximum".into(),
        ));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    Ok(VanishingData { order: d as u32, coeff, period: Period::PiRational(two / scale) })
}

/// Rate c with h(c·u)^{u·T/…} → y along the profile: c = (ln y / coeff)^{1/d} / T,
/// where d, coeff, T are the vanishing data. Enclosed as a ball.
pub fn target_to_rate(y: &BigRational, v: &VanishingData, prec: &Precision) -> Result<Ball> {
    if !y.is_positive() || *y >= BigRational::one() {
        return Err(Error::TargetOutOfRange);
    }
    let wp = prec.target + 32;
    let lny = Ball::from_rational(y, wp).ln(wp)?;
    let qb = Ball::from_rational(&v.coeff, wp);
    let ratio = lny.div(&qb, wp)?;
    let lr = ratio.ln(wp)?;
    let root = lr.div_int(v.order as u64, wp).exp(wp);
    let t = v.period.ball(wp);
    Ok(root.div(&t, wp)?.shrink(prec.target))
}

// ---------------------------------------------------------------------------
// Curvature pairs: indices n with |n²·ζ − m| · n^θ < 1
// ---------------------------------------------------------------------------

/// Indices n ≤ n_max whose squared multiple n²·ζ sits unusually close to an
/// integer m, in the sense |n²·ζ − m| · n^θ < 1. `skipped` lists indices the
/// enclosure backend could not decide at the precision cap.
#[derive(Debug, Clone, Default)]
pub struct ZaharescuPairs {
    pub pairs: Vec<(u64, BigInt)>,
    pub skipped: Vec<u64>,
}

fn split_theta(theta: &BigRational) -> Result<(u32, u32)> {
    let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
    if !theta.is_positive() || *theta >= two_thirds {
        return Err(Error::InvalidParameter(
            "closeness exponent must lie strictly between 0 and 2/3".into(),
        ));
    }
    let p = theta.numer().to_u32().filter(|&v| (1..=64).contains(&v));
    let q = theta.denom().to_u32().filter(|&v| (1..=64).contains(&v));
    match (p, q) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(Error::InvalidParameter(
            "closeness exponent must have numerator and denominator at most 64".into(),
        )),
    }
}

/// θ = p/q; the test |v|·n^θ < 1 is decided as |v|^q·n^p < 1 so that exact
/// integer/surd arithmetic applies.
fn z_pairs_rational(r: &BigRational, p: u32, q: u32, n_max: u64) -> ZaharescuPairs {
    let a = r.numer();
    let b = r.denom(); // > 0 after normalization
    let two_b = BigInt::from(2) * b;
    let rhs = num_traits::pow(b.clone(), q as usize);
    let mut pairs = Vec::new();
    for n in 1..=n_max {
        let n2 = BigInt::from(n) * BigInt::from(n);
        let m = (BigInt::from(2) * &n2 * a + b).div_floor(&two_b);
        let v_num = (&n2 * a - &m * b).abs();
        let lhs = num_traits::pow(v_num, q as usize) * num_traits::pow(BigInt::from(n), p as usize);
        if lhs < rhs {
            pairs.push((n, m));
        }
    }
    ZaharescuPairs { pairs, skipped: Vec::new() }
}

fn z_pairs_surd(s: &Surd, p: u32, q: u32, n_max: u64) -> ZaharescuPairs {
    let one = BigRational::one();
    let mut pairs = Vec::new();
    for n in 1..=n_max {
        let n2u = BigUint::from(n) * BigUint::from(n);
        let m = s.round_times_half_up(&n2u);
        let v = s.times_minus_int(&BigInt::from(n2u), &m);
        let x = v.abs_val().pow_u32(q).mul_int(&num_traits::pow(BigInt::from(n), p as usize));
        // Strict inequality: an exactly rational power equal to 1 is not a pair.
        if x.cmp_rational(&one) == Ordering::Less {
            pairs.push((n, m));
        }
    }
    ZaharescuPairs { pairs, skipped: Vec::new() }
}

fn z_pairs_enclosure(
    approx: impl Fn(u32) -> Ball,
    p: u32,
    q: u32,
    n_max: u64,
    prec: &Precision,
) -> ZaharescuPairs {
    let ctx = EnclosureCtx::new(approx);
    let one = BigRational::one();
    let half = Dyadic::new(BigInt::one(), -1);
    let qe = BigUint::from(q);
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    'indices: for n in 1..=n_max {
        let n2 = BigInt::from(n) * BigInt::from(n);
        let npow = num_traits::pow(BigInt::from(n), p as usize);
        let mut w = 64 + n2.bits() as u32;
        loop {
            let nb = ctx.ball(w).mul_int(&n2);
            let m = nb.mid().add(&half).floor_int();
            let md = Dyadic::from_int(m.clone());
            let contained = nb.lo().cmp_val(&md.sub(&half)) == Ordering::Greater
                && nb.hi().cmp_val(&md.add(&half)) == Ordering::Less;
            if contained {
                let v = nb.sub(&Ball::exact(md), w).abs();
                if let Ok(powed) = v.pow_uint(&qe, w) {
                    match powed.mul_int(&npow).cmp_rational(&one) {
                        Some(Ordering::Less) => {
                            pairs.push((n, m));
                            continue 'indices;
                        }
                        Some(_) => continue 'indices,
                        None => {}
                    }
                }
            }
            if w >= prec.cap {
                skipped.push(n);
                continue 'indices;
            }
            w = (w * 2).min(prec.cap);
        }
    }
    ZaharescuPairs { pairs, skipped }
}

/// Scan n = 1..=n_max for curvature pairs of ζ with exponent θ = p/q.
///
/// Rational and quadratic-surd ζ are decided exactly; other sources fall back
/// to enclosures with per-index precision escalation, reporting undecidable
/// indices in `skipped` instead of guessing.
pub fn zaharescu_pairs(
    zeta: &RealSource,
    theta: &BigRational,
    n_max: u64,
    prec: &Precision,
) -> Result<ZaharescuPairs> {
    let (p, q) = split_theta(theta)?;
    if let Some(r) = zeta.as_rational() {
        return Ok(z_pairs_rational(&r, p, q, n_max));
    }
    if let RealSource::QuadraticSurd(s) = zeta {
        return Ok(z_pairs_surd(s, p, q, n_max));
    }
    let zeta = zeta.clone();
    Ok(z_pairs_enclosure(move |w| zeta.approx(w), p, q, n_max, prec))
}

// ---------------------------------------------------------------------------
// Cached enclosure contexts for derived reals (x/π and x/(2π))
// ---------------------------------------------------------------------------

struct EnclosureCtx<F: Fn(u32) -> Ball> {
    f: F,
    cache: Mutex<std::collections::BTreeMap<u32, Ball>>,
}

impl<F: Fn(u32) -> Ball> EnclosureCtx<F> {
    fn new(f: F) -> Self {
        Self { f, cache: Mutex::new(std::collections::BTreeMap::new()) }
    }

    fn ball(&self, bits: u32) -> Ball {
        let quantized = bits.div_ceil(64) * 64;
        let mut cache = self.cache.lock().unwrap();
        if let Some((_, b)) = cache.range(quantized..).next() {
            return b.clone();
        }
        let b = (self.f)(quantized);
        let out = b.clone();
        cache.insert(quantized, b);
        out
    }
}

type DynCtx = EnclosureCtx<Box<dyn Fn(u32) -> Ball>>;

/// Context for ζ = x/π (or 1/2 − x/π when `sin_shift`), optionally halved to
/// ζ = x/(2π).
fn pi_ratio_ctx(x: &RealSource, sin_shift: bool, halve: bool) -> DynCtx {
    let pad = x
        .approx(16)
        .mid()
        .magnitude_exp()
        .unwrap_or(0)
        .max(0) as u32
        + 16;
    let x = x.clone();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    EnclosureCtx::new(Box::new(move |w: u32| {
        let wp = w + pad;
        let xb = x.approx(wp);
        let pb = ball::pi(wp);
        let q = xb.div(&pb, wp).expect("pi enclosure is strictly positive");
        let q = if sin_shift { Ball::from_rational(&half, wp).sub(&q, wp) } else { q };
        if halve {
            q.mul_pow2(-1)
        } else {
            q
        }
    }))
}

// ---------------------------------------------------------------------------
// Witness search for {n·x}^n
// ---------------------------------------------------------------------------

/// Search for a certified index n with |{n·x}^n − y| ≤ tol.
///
/// x must classify as having unbounded even-index quotients (the only case
/// this candidate construction covers); otherwise `NotDenseCandidate`.
/// Candidates are n = N·v for odd-index convergents u/v, where
/// N = ⌊√(−ln y / f) + 1⌋ and f = v·(u − x·v); then {n·x} ≈ 1 − N·f/…,
/// giving {n·x}^n ≈ exp(−N²·f) ≈ y. Up to `t_max` odd convergent levels are
/// tried in order, so the search is deterministic.
pub fn find_frac_witness(
    x: &RealSource,
    y: &BigRational,
    tol: &BigRational,
    t_max: u32,
    prec: &Precision,
) -> Result<WitnessReport> {
    check_target_tolerance(y, tol)?;
    let one = BigRational::one();
    let y_f64 = rat_f64(y);

    let cf = cf::expand_real(x, 4 * t_max as u64 + 8, &Precision::expand_default())?;
    let class = cf::classify_even_pq(&cf, 4 * t_max as u64 + 8);
    if class.verdict != cf::EvenQuotientVerdict::UnboundedEven {
        return Err(Error::NotDenseCandidate);
    }

    let convs = match cf::convergents(&cf, 2 * t_max as u64) {
        Ok(cs) => cs,
        Err(Error::DepthExceeded { available, .. }) => cf::convergents(&cf, available)?,
        Err(e) => return Err(e),
    };

    let ctx = SourceCtx::new(x.clone());
    let mut evaluations = 0u64;
    let mut skipped_levels = 0u64;
    let mut best: Option<(f64, WitnessReport)> = None;

    for (t, conv) in convs.iter().filter(|c| c.index % 2 == 1).take(t_max as usize).enumerate() {
        let t = t as u32 + 1;
        let u = &conv.p;
        let v = &conv.q;

        // Certify f = v·(u − x·v) ∈ (0, 1) and N = ⌊√(−ln y / f) + 1⌋.
        let mut wf = 2 * v.bits() as u32 + 96;
        let resolved = loop {
            let xb = ctx.ball(wf);
            let xv = xb.mul_int(v);
            let diff = Ball::exact(Dyadic::from_int(u.clone())).sub(&xv, wf);
            let f = diff.mul_int(v);
            if f.lo().is_positive() && f.hi().cmp_rational(&one) == Ordering::Less {
                let a_ball = Ball::from_rational(y, wf).ln(wf)?.mul_int(&BigInt::from(-1));
                let ratio = a_ball.div(&f, wf)?;
                let n_real = ratio.sqrt(wf)?.add(&Ball::exact(Dyadic::one()), wf);
                let fl = n_real.mid().floor_int();
                let floor_ok = n_real.lo().cmp_val(&Dyadic::from_int(fl.clone()))
                    != Ordering::Less
                    && n_real.hi().cmp_val(&Dyadic::from_int(&fl + 1)) == Ordering::Less;
                if floor_ok {
                    break Some((f, a_ball, fl));
                }
            }
            if wf >= prec.cap {
                break None;
            }
            wf = (wf * 2).min(prec.cap);
        };
        let Some((f, a_ball, big_n)) = resolved else {
            skipped_levels += 1;
            continue;
        };

        let n = (&big_n * v).to_biguint().expect("candidate index is positive");

        // Evaluate {n·x}^n with escalating certification precision.
        let mut tgt = prec.target;
        let outcome = loop {
            let val = match seq::pow_frac(&ctx, &n, &Precision { target: tgt, cap: prec.cap }) {
                Ok(v) => v,
                Err(Error::PrecisionExhausted { .. }) => break None,
                Err(e) => return Err(e),
            };
            evaluations += 1;
            match classify_hit(&val, y, tol) {
                HitStatus::Hit => break Some((true, val, tgt)),
                HitStatus::Miss => break Some((false, val, tgt)),
                HitStatus::Unresolved => {
                    if tgt >= prec.cap {
                        break Some((false, val, tgt));
                    }
                    tgt = (tgt * 2).min(prec.cap);
                }
            }
        };
        let Some((hit, val, used)) = outcome else {
            skipped_levels += 1;
            continue;
        };

        let sandwich = f.mul_int(&(&big_n * &big_n)).sub(&a_ball, wf);
        let detail = format!(
            "level {t} (convergent index {idx}): denominator v of {vb} bits, \
             f = v·(u − x·v) ≈ {fv:.4e}, N = {big_n}, n = N·v; \
             N²·f − (−ln y) ∈ [{slo:.3e}, {shi:.3e}]",
            idx = conv.index,
            vb = v.bits(),
            fv = f.to_f64(),
            slo = sandwich.lo().to_f64(),
            shi = sandwich.hi().to_f64(),
        );
        let report = WitnessReport {
            n: n.clone(),
            value_lo: val.lo().to_f64(),
            value_hi: val.hi().to_f64(),
            target: y_f64,
            tolerance: rat_f64(tol),
            distance_hi: distance_hi_f64(&val, y),
            certified: hit,
            evaluations,
            screened: skipped_levels,
            precision_bits: used,
            detail,
        };
        if hit {
            return Ok(report);
        }
        let est = (val.to_f64() - y_f64).abs();
        if best.as_ref().map_or(true, |(b, _)| est < *b) {
            best = Some((est, report));
        }
    }
    Err(Error::BudgetExhausted { best: best.map(|(_, r)| Box::new(r)) })
}

// ---------------------------------------------------------------------------
// Witness search for |g(cos(x·n))|^n
// ---------------------------------------------------------------------------

/// Budget knobs for [`find_cos_witness`]. Candidates are k·q ± δ for
/// convergent denominators q of x/π (indices up to `max_cf_index`),
/// multipliers k ≤ `max_multiplier`, offsets |δ| ≤ `neighborhood`; at most
/// `max_evaluations` candidates are fully certified.
#[derive(Debug, Clone)]
pub struct CosSearchBudget {
    pub max_cf_index: u32,
    pub max_multiplier: u64,
    pub neighborhood: u64,
    pub max_evaluations: u64,
}

impl Default for CosSearchBudget {
    fn default() -> Self {
        Self { max_cf_index: 40, max_multiplier: 10_000, neighborhood: 2, max_evaluations: 4_000 }
    }
}

/// Search for a certified index n with ||g(cos(x·n))|^n − y| ≤ tol.
///
/// With `sin_mode` the inner angle profile is sin instead of cos, realized by
/// replacing ζ = x/π with 1/2 − x/π. `congruence`, when given, keeps only
/// candidates with n ≡ r (mod 4) and nearest-integer m of n·ζ/2 with
/// m ≡ s (mod 2); a candidate whose parity cannot be resolved at the
/// precision cap is kept (evaluation still decides it).
///
/// Candidates are streamed in ascending order from a heap of multiplier
/// multiples of convergent denominators of ζ, each with a ±neighborhood
/// window, so the returned hit is the least certified hit in the stream.
#[allow(clippy::too_many_arguments)]
pub fn find_cos_witness(
    x: &RealSource,
    g: &GPoly,
    y: &BigRational,
    tol: &BigRational,
    budget: &CosSearchBudget,
    congruence: Option<(u8, u8)>,
    sin_mode: bool,
    prec: &Precision,
) -> Result<WitnessReport> {
    check_target_tolerance(y, tol)?;
    if matches!(x, RealSource::PiMultiple(_)) {
        // x/π rational: cos(x·n) visits finitely many values, no density.
        return Err(Error::NotIrrational);
    }
    if x.as_rational().map_or(false, |r| r.is_zero()) {
        return Err(Error::InvalidParameter("angle must be nonzero".into()));
    }

    // Rate prediction for the trace: c with |g(cos(c·u))|^{…} → y.
    let vd = vanishing_order(g, &BigRational::one())?;
    let rate = target_to_rate(y, &vd, &Precision { target: 64, cap: prec.cap })?.to_f64();

    let zctx = pi_ratio_ctx(x, sin_mode, false);
    let y_f64 = rat_f64(y);
    let tol_f64 = rat_f64(tol);

    let cfz = cf::expand_from_enclosures(
        |w| zctx.ball(w),
        budget.max_cf_index as u64 + 2,
        &Precision::expand_default(),
    )?;
    let convs = match cf::convergents(&cfz, budget.max_cf_index as u64 + 1) {
        Ok(cs) => cs,
        Err(Error::DepthExceeded { available, .. }) => cf::convergents(&cfz, available)?,
        Err(e) => return Err(e),
    };
    let qs: Vec<BigUint> = convs
        .iter()
        .filter_map(|c| c.q.to_biguint())
        .filter(|q| !q.is_zero())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if qs.is_empty() {
        return Err(Error::BudgetExhausted { best: None });
    }

    // Low-precision magnitude estimate used only for screening.
    let estimate = |n: &BigUint| -> f64 {
        let w = n.bits() as u32 + 80;
        let fb = zctx.ball(w).mul_int(&BigInt::from(n.clone()));
        let c = ball::cos_pi(&fb, 96);
        let gmid = g.eval_ball(&c, 96).mid().to_f64().abs();
        if gmid <= 0.0 {
            return 0.0;
        }
        let ln_est = n.to_f64().unwrap_or(f64::INFINITY) * gmid.ln();
        if ln_est.is_nan() {
            return 1.0;
        }
        ln_est.exp().min(1.0)
    };

    // Full certification with precision escalation.
    let certify = |n: &BigUint| -> Result<(HitStatus, Ball, u32)> {
        let mut tgt = prec.target;
        loop {
            let w = tgt + n.bits() as u32 + 32;
            let fb = zctx.ball(w).mul_int(&BigInt::from(n.clone()));
            let c = ball::cos_pi(&fb, w);
            let gv = g.eval_ball(&c, w).abs();
            let val = match gv.pow_uint(n, tgt + 8) {
                Ok(v) => v,
                Err(Error::PrecisionExhausted { .. }) if tgt < prec.cap => {
                    tgt = (tgt * 2).min(prec.cap);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let status = classify_hit(&val, y, tol);
            if status == HitStatus::Unresolved && tgt < prec.cap {
                tgt = (tgt * 2).min(prec.cap);
                continue;
            }
            return Ok((status, val, tgt));
        }
    };

    // Congruence filter: n mod 4, and parity of the nearest integer to n·ζ/2.
    let half = Dyadic::new(BigInt::one(), -1);
    let congruence_pass = |n: &BigUint| -> bool {
        let Some((rn, rm)) = congruence else { return true };
        if n % 4u32 != BigUint::from(rn as u32 % 4) {
            return false;
        }
        let mut w = n.bits() as u32 + 80;
        for _ in 0..2 {
            let b = zctx.ball(w).mul_int(&BigInt::from(n.clone())).mul_pow2(-1);
            let m = b.mid().add(&half).floor_int();
            let md = Dyadic::from_int(m.clone());
            if b.lo().cmp_val(&md.sub(&half)) == Ordering::Greater
                && b.hi().cmp_val(&md.add(&half)) == Ordering::Less
            {
                return m.mod_floor(&BigInt::from(2)) == BigInt::from(rm % 2);
            }
            w *= 4;
        }
        true // parity unresolved at cap: let evaluation decide
    };

    let mut heap: BinaryHeap<Reverse<(BigUint, usize)>> = BinaryHeap::new();
    let mut ks: Vec<u64> = vec![1; qs.len()];
    for (j, q) in qs.iter().enumerate() {
        heap.push(Reverse((q.clone(), j)));
    }
    let window = BigUint::from(budget.neighborhood + 4);
    let mut recent: BTreeSet<BigUint> = BTreeSet::new();
    let mut evaluations = 0u64;
    let mut screened = 0u64;
    let mut hits: Vec<(BigUint, Ball, u32, String)> = Vec::new();
    let mut min_hit: Option<BigUint> = None;
    let mut best: Option<(f64, BigUint, Ball, u32, String)> = None;

    'stream: while let Some(Reverse((center, j))) = heap.pop() {
        if let Some(mh) = &min_hit {
            if center > mh + BigUint::from(budget.neighborhood) {
                break;
            }
        }
        let k = ks[j];
        ks[j] += 1;
        if ks[j] <= budget.max_multiplier {
            heap.push(Reverse((&qs[j] * BigUint::from(ks[j]), j)));
        }
        if &center > &window {
            let cutoff = &center - &window;
            while let Some(first) = recent.first().cloned() {
                if first < cutoff {
                    recent.remove(&first);
                } else {
                    break;
                }
            }
        }
        for off in -(budget.neighborhood as i64)..=(budget.neighborhood as i64) {
            let cand = if off >= 0 {
                &center + BigUint::from(off as u64)
            } else {
                let o = BigUint::from((-off) as u64);
                if center > o { &center - &o } else { continue }
            };
            if cand.is_zero() || recent.contains(&cand) {
                continue;
            }
            recent.insert(cand.clone());
            if !congruence_pass(&cand) {
                screened += 1;
                continue;
            }
            let est = estimate(&cand);
            if (est - y_f64).abs() > tol_f64 * 1.5 + 0.02 {
                screened += 1;
                continue;
            }
            if evaluations >= budget.max_evaluations {
                if hits.is_empty() {
                    return Err(Error::BudgetExhausted {
                        best: best.map(|b| Box::new(make_cos_report(b, y, tol, evaluations, screened, rate))),
                    });
                }
                break 'stream;
            }
            evaluations += 1;
            let origin = format!(
                "n = {k}·{q} {sign} {mag} (multiplier {k} of convergent denominator {q})",
                q = qs[j],
                sign = if off >= 0 { "+" } else { "−" },
                mag = off.abs(),
            );
            let (status, val, used) = certify(&cand)?;
            match status {
                HitStatus::Hit => {
                    if min_hit.as_ref().map_or(true, |m| &cand < m) {
                        min_hit = Some(cand.clone());
                    }
                    hits.push((cand, val, used, origin));
                }
                _ => {
                    let d = (val.to_f64() - y_f64).abs();
                    if best.as_ref().map_or(true, |(b, ..)| d < *b) {
                        best = Some((d, cand, val, used, origin));
                    }
                }
            }
        }
    }

    if let Some((n, val, used, origin)) = hits.into_iter().min_by(|a, b| a.0.cmp(&b.0)) {
        return Ok(WitnessReport {
            value_lo: val.lo().to_f64(),
            value_hi: val.hi().to_f64(),
            target: y_f64,
            tolerance: rat_f64(tol),
            distance_hi: distance_hi_f64(&val, y),
            certified: true,
            evaluations,
            screened,
            precision_bits: used,
            detail: format!("{origin}; predicted angle rate c ≈ {rate:.6}"),
            n,
        });
    }
    Err(Error::BudgetExhausted {
        best: best.map(|b| Box::new(make_cos_report(b, y, tol, evaluations, screened, rate))),
    })
}

fn make_cos_report(
    (_, n, val, used, origin): (f64, BigUint, Ball, u32, String),
    y: &BigRational,
    tol: &BigRational,
    evaluations: u64,
    screened: u64,
    rate: f64,
) -> WitnessReport {
    WitnessReport {
        value_lo: val.lo().to_f64(),
        value_hi: val.hi().to_f64(),
        target: rat_f64(y),
        tolerance: rat_f64(tol),
        distance_hi: distance_hi_f64(&val, y),
        certified: false,
        evaluations,
        screened,
        precision_bits: used,
        detail: format!("closest uncertified candidate: {origin}; predicted rate c ≈ {rate:.6}"),
        n,
    }
}

// ---------------------------------------------------------------------------
// Witness search for |g(cos(x·n²))|^n
// ---------------------------------------------------------------------------

/// Search for the least n ≤ n_max with ||g(cos(x·n²))|^n − y| ≤ tol,
/// certified.
///
/// The scan is ascending with a high-accuracy screen: the phase frac(n²·x/(2π))
/// is computed from a 192-bit fixed-point integer image of x/(2π), so the
/// screen stays meaningful for n up to 10^9 and beyond (error ≤ n²·2^−191).
/// Candidates surviving the screen are certified with escalating-precision
/// balls; the first certified hit is returned (it is minimal among candidates
/// the screen let through). Curvature pairs of x/(2π) with exponent 1/2 are
/// reported in the detail string as context for why close squared multiples
/// exist.
pub fn find_square_witness(
    x: &RealSource,
    g: &GPoly,
    y: &BigRational,
    tol: &BigRational,
    n_max: u64,
    max_evaluations: u64,
    prec: &Precision,
) -> Result<WitnessReport> {
    check_target_tolerance(y, tol)?;
    if matches!(x, RealSource::PiMultiple(_)) {
        return Err(Error::NotIrrational);
    }
    if x.as_rational().map_or(false, |r| r.is_zero()) {
        return Err(Error::InvalidParameter("angle must be nonzero".into()));
    }
    let zctx = pi_ratio_ctx(x, false, true); // x/(2π)
    let y_f64 = rat_f64(y);
    let tol_f64 = rat_f64(tol);

    // Curvature-pair context for the trace.
    let seed_cap = n_max.min(400);
    let seeds = z_pairs_enclosure(|w| zctx.ball(w), 1, 2, seed_cap, prec);
    let seed_note = {
        let shown: Vec<String> =
            seeds.pairs.iter().take(8).map(|(n, _)| n.to_string()).collect();
        format!(
            "{} close squared multiples at indices ≤ {seed_cap} (first: {}){}",
            seeds.pairs.len(),
            shown.join(", "),
            if seeds.skipped.is_empty() {
                String::new()
            } else {
                format!("; {} undecided", seeds.skipped.len())
            },
        )
    };

    // 192-bit fixed-point image of frac-generator for the screen.
    let two192 = BigInt::one() << 192_u32;
    let zfix = {
        let zr = zctx.ball(224).mid().to_rational();
        (zr * BigRational::from_integer(two192.clone()))
            .floor()
            .to_integer()
            .mod_floor(&two192)
            .to_biguint()
            .expect("nonnegative after floor-mod")
    };
    let mask = (BigUint::one() << 192_u32) - BigUint::one();

    let mut evaluations = 0u64;
    let mut screened = 0u64;
    let mut best: Option<(f64, WitnessReport)> = None;

    for n in 1..=n_max {
        let n2 = BigUint::from(n) * BigUint::from(n);
        // Screen: phase = frac(n²·x/(2π)) to ~2^−64 absolute accuracy.
        let ph = (&zfix * &n2) & &mask;
        let top = (&ph >> 128_u32).to_u64().unwrap_or(0);
        let u = top as f64 / 2f64.powi(64);
        let est = {
            let gval = g.eval_f64((2.0 * std::f64::consts::PI * u).cos()).abs();
            if gval <= 0.0 {
                0.0
            } else {
                let ln_est = n as f64 * gval.ln();
                if ln_est.is_nan() { 1.0 } else { ln_est.exp().min(1.0) }
            }
        };
        if (est - y_f64).abs() > tol_f64 * 1.5 + 0.02 {
            screened += 1;
            continue;
        }
        if evaluations >= max_evaluations {
            break;
        }
        evaluations += 1;

        let n_big = BigUint::from(n);
        let n2_int = BigInt::from(n2.clone());
        let mut tgt = prec.target;
        let (status, val, used) = loop {
            let w = tgt + n2.bits() as u32 + 32;
            let angle2 = zctx.ball(w).mul_int(&n2_int).mul_pow2(1); // n²·x/π
            let c = ball::cos_pi(&angle2, w);
            let gv = g.eval_ball(&c, w).abs();
            let val = match gv.pow_uint(&n_big, tgt + 8) {
                Ok(v) => v,
                Err(Error::PrecisionExhausted { .. }) if tgt < prec.cap => {
                    tgt = (tgt * 2).min(prec.cap);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let status = classify_hit(&val, y, tol);
            if status == HitStatus::Unresolved && tgt < prec.cap {
                tgt = (tgt * 2).min(prec.cap);
                continue;
            }
            break (status, val, tgt);
        };
        let report = WitnessReport {
            n: n_big,
            value_lo: val.lo().to_f64(),
            value_hi: val.hi().to_f64(),
            target: y_f64,
            tolerance: tol_f64,
            distance_hi: distance_hi_f64(&val, y),
            certified: status == HitStatus::Hit,
            evaluations,
            screened,
            precision_bits: used,
            detail: format!("ascending scan over squared-angle values; {seed_note}"),
        };
        if status == HitStatus::Hit {
            return Ok(report);
        }
        let d = (val.to_f64() - y_f64).abs();
        if best.as_ref().map_or(true, |(b, _)| d < *b) {
            best = Some((d, report));
        }
    }
    Err(Error::BudgetExhausted { best: best.map(|(_, r)| Box::new(r)) })
}
