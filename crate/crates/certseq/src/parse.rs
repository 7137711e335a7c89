//! Text mini-language for describing the objects the command line works on:
//! real numbers, admissible polynomials, and decay functions.
//!
//! Real-number forms (`parse_real`):
//!
//! | form                      | meaning                                      |
//! |---------------------------|----------------------------------------------|
//! | `phi`                     | the golden ratio (1+√5)/2                    |
//! | `e`                       | Euler's number                               |
//! | `pi`                      | π                                            |
//! | `pi*R`                    | R·π for a nonzero rational literal R         |
//! | `sqrt:D`                  | √D for a non-square integer D ≥ 2            |
//! | `surd:(A,B,D,C)`          | (A + B·√D)/C                                 |
//! | `cf:[a0;a1,a2,...]`       | exact finite continued fraction              |
//! | `cf:[a0;a1,(c1,...)]`     | eventually periodic continued fraction       |
//! | `cf-rule:even-ramp`       | quotients a_{2i} = i+1, a_{2i+1} = 1         |
//! | `cf-rule:e`               | the quotient pattern 2; 1,2,1, 1,4,1, …      |
//! | `decseq:[d1,d2,...]`      | Σ 10^{−d_i} over the listed exponents        |
//! | `decseq-rule:doubling(…)` | listed exponents, then each twice the last   |
//! | rational literal          | `3/7`, `-2`, `0.25`, …                       |
//!
//! Rational literals (`parse_rational`) accept `p/q`, plain integers, and
//! decimal strings, with an optional leading sign.  Polynomials
//! (`parse_gpoly`) are written `poly:[c0,c1,...]` with rational-literal
//! coefficients, and decay functions (`parse_fspec`) as `pow:B` (n^−B),
//! `loginv` (1/ln n), or `expinv:L` (e^−Ln).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cf::{CfRule, ContinuedFraction};
use crate::error::{Error, Result};
use crate::gpoly::GPoly;
use crate::real::{DecimalSchedule, RealSource, Surd};
use crate::t4::FSpec;

/// One-screen description of every accepted input form, for command-line help.
pub const GRAMMAR_HELP: &str = "\
Real numbers (--alpha and friends):
  phi                      golden ratio (1+sqrt 5)/2
  e                        Euler's number
  pi                       pi
  pi*R                     R times pi, R a nonzero rational literal
  sqrt:D                   square root of a non-square integer D >= 2
  surd:(A,B,D,C)           (A + B*sqrt(D))/C with integer entries
  cf:[a0;a1,a2,...]        exact finite continued fraction
  cf:[a0;a1,(c1,c2,...)]   eventually periodic continued fraction
  cf-rule:even-ramp        quotients a_{2i} = i+1, a_{2i+1} = 1
  cf-rule:e                quotient pattern 2; 1,2,1, 1,4,1, 1,6,1, ...
  decseq:[d1,d2,...]       sum of 10^(-d_i) over the listed exponents
  decseq-rule:doubling(d1,...)  listed exponents, then doubling forever
  rational literal         3/7, -2, 0.25, ...

Polynomials (--g):
  poly:[c0,c1,...]         c0 + c1*y + ... with rational-literal coefficients;
                           must map [-1,1] into [-1,1] with sum c_i = 1

Decay functions (--f):
  pow:B                    n^(-B) for rational B > 0
  loginv                   1/ln n
  expinv:L                 exp(-L*n) for rational L > 0";

fn invalid(what: &str, spec: &str) -> Error {
    Error::InvalidParameter(format!("cannot parse {what} from {spec:?}"))
}

/// Parse a rational literal: `p/q`, a plain integer, or a decimal string,
/// each with an optional leading sign.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(invalid("rational", s));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| invalid("rational", s))?;
        let d: BigInt = den.trim().parse().map_err(|_| invalid("rational", s))?;
        if d.is_zero() {
            return Err(Error::InvalidParameter(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (sign, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if frac_part.is_empty()
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || !(int_digits.is_empty() || int_digits.bytes().all(|b| b.is_ascii_digit()))
        {
            return Err(invalid("rational", s));
        }
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac_part);
        let num: BigInt = digits.parse().map_err(|_| invalid("rational", s))?;
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(BigRational::new(BigInt::from(sign) * num, den));
    }
    let n: BigInt = s.parse().map_err(|_| invalid("rational", s))?;
    Ok(BigRational::from(n))
}

fn parse_int_list<T: std::str::FromStr>(body: &str, what: &str, spec: &str) -> Result<Vec<T>> {
    let body = body.trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|p| p.trim().parse().map_err(|_| invalid(what, spec)))
        .collect()
}

fn parse_cf_body(body: &str, spec: &str) -> Result<ContinuedFraction> {
    let inner = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| invalid("continued fraction", spec))?;
    let (head, rest) = match inner.split_once(';') {
        Some((h, r)) => (h, Some(r)),
        None => (inner, None),
    };
    let a0: BigInt = head.trim().parse().map_err(|_| invalid("continued fraction", spec))?;
    let rest = match rest {
        None => return ContinuedFraction::finite(a0, Vec::new(), true),
        Some(r) => r.trim(),
    };
    if let Some(open) = rest.find('(') {
        let close = rest.rfind(')').ok_or_else(|| invalid("continued fraction", spec))?;
        if close != rest.len() - 1 || close < open {
            return Err(invalid("continued fraction", spec));
        }
        let prefix_part = rest[..open].trim().trim_end_matches(',');
        let prefix: Vec<BigUint> = parse_int_list(prefix_part, "continued fraction", spec)?;
        let cycle: Vec<BigUint> = parse_int_list(&rest[open + 1..close], "continued fraction", spec)?;
        if cycle.is_empty() {
            return Err(invalid("continued fraction", spec));
        }
        ContinuedFraction::periodic(a0, prefix, cycle)
    } else {
        let terms: Vec<BigUint> = parse_int_list(rest, "continued fraction", spec)?;
        ContinuedFraction::finite(a0, terms, true)
    }
}

fn parse_surd_tuple(body: &str, spec: &str) -> Result<Surd> {
    let inner = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| invalid("surd", spec))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(invalid("surd", spec));
    }
    let a: BigInt = parts[0].parse().map_err(|_| invalid("surd", spec))?;
    let b: BigInt = parts[1].parse().map_err(|_| invalid("surd", spec))?;
    let d: BigUint = parts[2].parse().map_err(|_| invalid("surd", spec))?;
    let c: BigInt = parts[3].parse().map_err(|_| invalid("surd", spec))?;
    Surd::new(a, b, d, c)
}

/// Parse a real-number description.  See the module docs for the grammar.
pub fn parse_real(spec: &str) -> Result<RealSource> {
    let s = spec.trim();
    match s {
        "phi" => return Ok(RealSource::phi()),
        "e" => return Ok(RealSource::EulerE),
        "pi" => return Ok(RealSource::PiMultiple(BigRational::one())),
        _ => {}
    }
    if let Some(body) = s.strip_prefix("pi*") {
        let r = parse_rational(body)?;
        if r.is_zero() {
            return Err(Error::InvalidParameter("pi multiplier must be nonzero".into()));
        }
        return Ok(RealSource::PiMultiple(r));
    }
    if let Some(body) = s.strip_prefix("sqrt:") {
        let d: u64 = body.trim().parse().map_err(|_| invalid("square root", spec))?;
        return Ok(RealSource::QuadraticSurd(Surd::sqrt_int(d)?));
    }
    if let Some(body) = s.strip_prefix("surd:") {
        return Ok(RealSource::QuadraticSurd(parse_surd_tuple(body.trim(), spec)?));
    }
    if let Some(body) = s.strip_prefix("cf-rule:") {
        return match body.trim() {
            "even-ramp" => Ok(RealSource::CfDefined(ContinuedFraction::from_rule(CfRule::EvenRamp))),
            "e" => Ok(RealSource::CfDefined(ContinuedFraction::from_rule(CfRule::EulerPattern))),
            _ => Err(invalid("continued-fraction rule", spec)),
        };
    }
    if let Some(body) = s.strip_prefix("cf:") {
        return Ok(RealSource::CfDefined(parse_cf_body(body.trim(), spec)?));
    }
    if let Some(body) = s.strip_prefix("decseq-rule:") {
        let inner = body
            .trim()
            .strip_prefix("doubling(")
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| invalid("decimal-series rule", spec))?;
        let prefix: Vec<u64> = parse_int_list(inner, "decimal-series rule", spec)?;
        return Ok(RealSource::DecimalSeries(DecimalSchedule::new(prefix, true)?));
    }
    if let Some(body) = s.strip_prefix("decseq:") {
        let inner = body
            .trim()
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| invalid("decimal series", spec))?;
        let exps: Vec<u64> = parse_int_list(inner, "decimal series", spec)?;
        return Ok(RealSource::DecimalSeries(DecimalSchedule::new(exps, false)?));
    }
    Ok(RealSource::Rational(parse_rational(s)?))
}

/// Parse a polynomial description `poly:[c0,c1,...]` into a certified
/// admissible polynomial.
pub fn parse_gpoly(spec: &str) -> Result<GPoly> {
    let s = spec.trim();
    let body = s
        .strip_prefix("poly:")
        .ok_or_else(|| invalid("polynomial", spec))?
        .trim();
    let inner = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| invalid("polynomial", spec))?;
    let coeffs = inner
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    GPoly::new(coeffs)
}

/// Parse a decay-function description: `pow:B`, `loginv`, or `expinv:L`.
pub fn parse_fspec(spec: &str) -> Result<FSpec> {
    let s = spec.trim();
    let f = if s == "loginv" {
        FSpec::LogInv
    } else if let Some(body) = s.strip_prefix("pow:") {
        FSpec::Pow(parse_rational(body)?)
    } else if let Some(body) = s.strip_prefix("expinv:") {
        FSpec::ExpInv(parse_rational(body)?)
    } else {
        return Err(invalid("decay function", spec));
    };
    f.validate()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn rational_literals_cover_all_forms() {
        assert_eq!(parse_rational("3/7").unwrap(), rat(3, 7));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("1.50").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 9/10 ").unwrap(), rat(9, 10));
        for bad in ["", "1/0", "2.", "1.2.3", "abc", "1e3", "--2"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn named_constants_parse() {
        match parse_real("phi").unwrap() {
            RealSource::QuadraticSurd(s) => {
                let (a, b, d, c) = s.parts();
                assert_eq!(
                    (a.clone(), b.clone(), d.clone(), c.clone()),
                    (BigInt::from(1), BigInt::from(1), BigUint::from(5u32), BigInt::from(2))
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_real(" e ").unwrap(), RealSource::EulerE));
        match parse_real("pi").unwrap() {
            RealSource::PiMultiple(s) => assert_eq!(s, rat(1, 1)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_real("pi*-3/4").unwrap() {
            RealSource::PiMultiple(s) => assert_eq!(s, rat(-3, 4)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_real("pi*0").is_err());
    }

    #[test]
    fn surd_forms_parse_and_validate() {
        match parse_real("sqrt:2").unwrap() {
            RealSource::QuadraticSurd(s) => {
                let (a, b, d, c) = s.parts();
                assert_eq!(
                    (a.clone(), b.clone(), d.clone(), c.clone()),
                    (BigInt::from(0), BigInt::from(1), BigUint::from(2u32), BigInt::from(1))
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_real("surd:(1, 1, 5, 2)").unwrap() {
            RealSource::QuadraticSurd(s) => {
                assert_eq!(s.parts().2, &BigUint::from(5u32));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_real("sqrt:4").is_err());
        assert!(parse_real("sqrt:x").is_err());
        assert!(parse_real("surd:(1,2,3)").is_err());
    }

    #[test]
    fn continued_fraction_forms_parse() {
        match parse_real("cf:[1;2,2]").unwrap() {
            RealSource::CfDefined(cf) => {
                assert_eq!(cf.exact_rational().unwrap(), rat(7, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_real("cf:[1;(2)]").unwrap() {
            RealSource::CfDefined(cf) => {
                let v = cf.approx(64).to_f64();
                assert!((v - std::f64::consts::SQRT_2).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_real("cf:[0;3,(1,2)]").unwrap() {
            RealSource::CfDefined(cf) => {
                assert_eq!(cf.quotient(1).unwrap(), BigInt::from(3));
                assert!(cf.tail_len().is_none());
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_real("cf:[5]").unwrap() {
            RealSource::CfDefined(cf) => assert_eq!(cf.exact_rational().unwrap(), rat(5, 1)),
            other => panic!("unexpected {other:?}"),
        }
        for bad in ["cf:[1;2,(3]", "cf:[1;(2),3]", "cf:[1;()]", "cf:[;2]", "cf:1;2"] {
            assert!(parse_real(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn rule_continued_fractions_parse() {
        match parse_real("cf-rule:even-ramp").unwrap() {
            RealSource::CfDefined(cf) => {
                // a_{2i} = i+1, a_{2i+1} = 1.
                assert_eq!(cf.quotient(0).unwrap(), BigInt::from(1));
                assert_eq!(cf.quotient(4).unwrap(), BigInt::from(3));
                assert_eq!(cf.quotient(5).unwrap(), BigInt::from(1));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_real("cf-rule:e").unwrap() {
            RealSource::CfDefined(cf) => {
                assert_eq!(cf.quotient(0).unwrap(), BigInt::from(2));
                assert_eq!(cf.quotient(5).unwrap(), BigInt::from(4));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_real("cf-rule:bogus").is_err());
    }

    #[test]
    fn decimal_series_forms_parse() {
        match parse_real("decseq:[1,2,4]").unwrap() {
            RealSource::DecimalSeries(sched) => {
                assert_eq!(sched.exact_value().unwrap(), rat(1101, 10_000));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_real("decseq-rule:doubling(2,5)").unwrap() {
            RealSource::DecimalSeries(sched) => {
                assert!(sched.has_tail());
                assert_eq!(sched.prefix(), &[2, 5]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_real("decseq:[2,1]").is_err()); // exponents must increase
        assert!(parse_real("decseq-rule:tripling(2)").is_err());
    }

    #[test]
    fn bare_literals_become_rationals() {
        match parse_real("22/7").unwrap() {
            RealSource::Rational(r) => assert_eq!(r, rat(22, 7)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_real("0.125").unwrap() {
            RealSource::Rational(r) => assert_eq!(r, rat(1, 8)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_real("nonsense").is_err());
    }

    #[test]
    fn polynomial_specs_parse_and_certify() {
        let ident = parse_gpoly("poly:[0,1]").unwrap();
        assert_eq!(ident.degree(), 1);
        let mixed = parse_gpoly("poly:[0, 1/2, 0.5]").unwrap();
        assert_eq!(mixed.degree(), 2);
        assert!(parse_gpoly("poly:[1]").is_err()); // constant
        assert!(parse_gpoly("poly:[0,2]").is_err()); // escapes [-1,1]
        assert!(parse_gpoly("[0,1]").is_err()); // missing tag
    }

    #[test]
    fn decay_function_specs_parse() {
        assert_eq!(parse_fspec("pow:0.9").unwrap(), FSpec::Pow(rat(9, 10)));
        assert_eq!(parse_fspec("pow:9/10").unwrap(), FSpec::Pow(rat(9, 10)));
        assert_eq!(parse_fspec("loginv").unwrap(), FSpec::LogInv);
        assert_eq!(parse_fspec("expinv:1").unwrap(), FSpec::ExpInv(rat(1, 1)));
        for bad in ["pow:0", "pow:-1", "expinv:0", "linear", "pow:1/65"] {
            assert!(parse_fspec(bad).is_err(), "{bad:?} should fail");
        }
    }
}
