//! Polynomials g with rational coefficients, normalized by g(1) = 1 and
//! certified to satisfy |g(y)| ≤ 1 on [−1, 1].
//!
//! The bound certificate factors out the exact (1−y) and (1+y) root powers
//! of 1∓g at the endpoints, then proves strict positivity of the quotient by
//! adaptive interval bisection.  Polynomials whose modulus touches 1 in the
//! interior cannot be certified this way and are rejected.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::Ball;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

fn poly_eval_rational(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_trim(mut coeffs: Vec<BigRational>) -> Vec<BigRational> {
    while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
        coeffs.pop();
    }
    coeffs
}

/// Divide p by (1 − y), given p(1) = 0; exact synthetic division.
fn poly_div_one_minus_y(p: &[BigRational]) -> Vec<BigRational> {
    debug_assert!(poly_eval_rational(p, &BigRational::one()).is_zero());
    let m = p.len() - 1;
    // p = (y − 1)·s with s from synthetic division at root 1; the quotient
    // by (1 − y) is then −s.
    let mut s = vec![BigRational::zero(); m];
    s[m - 1] = p[m].clone();
    for j in (1..m).rev() {
        s[j - 1] = &p[j] + &s[j];
    }
    s.iter().map(|c| -c).collect()
}

/// Divide p by (1 + y), given p(−1) = 0; exact synthetic division.
fn poly_div_one_plus_y(p: &[BigRational]) -> Vec<BigRational> {
    debug_assert!(poly_eval_rational(p, &-BigRational::one()).is_zero());
    let m = p.len() - 1;
    // p = (y + 1)·s with s via synthetic division at root −1.
    let mut s = vec![BigRational::zero(); m];
    s[m - 1] = p[m].clone();
    for j in (1..m).rev() {
        s[j - 1] = &p[j] - &s[j];
    }
    s
}

fn poly_eval_ball(coeffs: &[BigRational], x: &Ball, prec: u32) -> Ball {
    let mut acc = Ball::zero();
    for c in coeffs.iter().rev() {
        let cb = Ball::from_rational(c, prec);
        acc = acc.mul(x, prec).add(&cb, prec);
    }
    acc
}

/// Prove p > 0 on [lo, hi] by bisection with interval evaluation.
fn certify_strictly_positive(p: &[BigRational], lo: Dyadic, hi: Dyadic, depth: u32) -> bool {
    let x = Ball::from_endpoints(lo.clone(), hi.clone());
    let v = poly_eval_ball(p, &x, 96);
    if v.is_strictly_positive() {
        return true;
    }
    if v.is_strictly_negative() || depth == 0 {
        return false;
    }
    let mid = lo.add(&hi).mul_pow2(-1);
    certify_strictly_positive(p, lo, mid.clone(), depth - 1)
        && certify_strictly_positive(p, mid, hi, depth - 1)
}

/// Prove p ≥ 0 on [−1, 1]: strip endpoint roots exactly, then require the
/// quotient to be strictly positive.
fn certify_nonnegative_on_unit(p: &[BigRational]) -> bool {
    let mut p = poly_trim(p.to_vec());
    if p.is_empty() {
        return true; // identically zero
    }
    loop {
        if p.len() == 1 {
            return p[0].is_positive();
        }
        if poly_eval_rational(&p, &BigRational::one()).is_zero() {
            p = poly_trim(poly_div_one_minus_y(&p));
            continue;
        }
        if poly_eval_rational(&p, &-BigRational::one()).is_zero() {
            p = poly_trim(poly_div_one_plus_y(&p));
            continue;
        }
        break;
    }
    certify_strictly_positive(&p, Dyadic::from_int(-1), Dyadic::from_int(1), 24)
}

/// A polynomial g with g(1) = 1 (exact), |g| ≤ 1 on [−1, 1] (certified at
/// construction), and g not identically 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPoly {
    coeffs: Vec<BigRational>,
}

impl GPoly {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        let coeffs = poly_trim(coeffs);
        let sum: BigRational = coeffs.iter().sum();
        if !sum.is_one() {
            return Err(Error::InvalidG(format!("g(1) = {sum}, expected exactly 1")));
        }
        if coeffs.len() == 1 {
            return Err(Error::InvalidG("g is identically 1".into()));
        }
        // 1 − g ≥ 0 and 1 + g ≥ 0 on [−1, 1].
        let mut upper: Vec<BigRational> = coeffs.iter().map(|c| -c).collect();
        upper[0] += BigRational::one();
        let mut lower = coeffs.clone();
        lower[0] += BigRational::one();
        if !certify_nonnegative_on_unit(&upper) || !certify_nonnegative_on_unit(&lower) {
            return Err(Error::InvalidG(
                "could not certify |g| <= 1 on [-1, 1] by endpoint factoring and bisection".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    /// The identity g(y) = y.
    pub fn identity() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()]).expect("|y| <= 1 certifies")
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval_ball(&self, y: &Ball, prec: u32) -> Ball {
        poly_eval_ball(&self.coeffs, y, prec)
    }

    pub fn eval_rational(&self, y: &BigRational) -> BigRational {
        poly_eval_rational(&self.coeffs, y)
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        let mut acc = 0.0f64;
        for c in self.coeffs.iter().rev() {
            let cf = c.numer().to_string().parse::<f64>().unwrap_or(f64::NAN)
                / c.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
            acc = acc * y + cf;
        }
        acc
    }
}

#[cfg(test)]
pub(crate) fn big(i: i64) -> BigRational {
    BigRational::from_integer(num_bigint::BigInt::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn accepts_reference_polynomials() {
        // g(y) = y
        assert!(GPoly::new(vec![big(0), big(1)]).is_ok());
        // g(y) = (1+y)/2
        assert!(GPoly::new(vec![rat(1, 2), rat(1, 2)]).is_ok());
        // g(y) = 2y² − y⁴ = 1 − (1−y²)²
        assert!(GPoly::new(vec![big(0), big(0), big(2), big(0), big(-1)]).is_ok());
        // g(y) = y³
        assert!(GPoly::new(vec![big(0), big(0), big(0), big(1)]).is_ok());
    }

    #[test]
    fn rejects_wrong_normalization_and_overshoot() {
        // g(1) = 2
        assert!(matches!(GPoly::new(vec![big(0), big(2)]), Err(Error::InvalidG(_))));
        // |g(−1)| = 3 > 1
        assert!(matches!(GPoly::new(vec![big(-1), big(2)]), Err(Error::InvalidG(_))));
        // identically 1
        assert!(matches!(GPoly::new(vec![big(1)]), Err(Error::InvalidG(_))));
        // empty (g ≡ 0, g(1) ≠ 1)
        assert!(GPoly::new(vec![]).is_err());
    }

    #[test]
    fn rejects_interior_touching_modulus() {
        // g = y² + y − 1 has |g(0)| = 1; the bisection certificate cannot
        // separate it from the bound and must reject.
        assert!(GPoly::new(vec![big(-1), big(1), big(1)]).is_err());
    }

    #[test]
    fn eval_matches_rational_arithmetic() {
        let g = GPoly::new(vec![big(0), big(0), big(2), big(0), big(-1)]).unwrap();
        assert_eq!(g.eval_rational(&rat(1, 2)), rat(7, 16));
        let b = g.eval_ball(&Ball::from_rational(&rat(1, 2), 80), 80);
        assert!(b.contains_rational(&rat(7, 16)));
        assert!((g.eval_f64(0.5) - 0.4375).abs() < 1e-12);
        assert_eq!(g.degree(), 4);
    }

    #[test]
    fn synthetic_division_is_exact() {
        // 1 − (2y² − y⁴) = (1−y)²(1+y)²: peel all four endpoint factors.
        let p = vec![big(1), big(0), big(-2), big(0), big(1)];
        let q1 = poly_div_one_minus_y(&p);
        let q2 = poly_div_one_minus_y(&q1);
        let q3 = poly_div_one_plus_y(&q2);
        let q4 = poly_div_one_plus_y(&q3);
        assert_eq!(poly_trim(q4), vec![big(1)]);
    }
}
