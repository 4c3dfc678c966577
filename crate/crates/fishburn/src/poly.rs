//! Exact polynomials over Z, dense with trailing zeros trimmed.
//!
//! These carry the dissection bookkeeping: the parts A_p(N, i, x) of the
//! strange series are plain integer polynomials, and the structural lemmas
//! amount to exact divisibility statements about them.  Division by a power
//! of (1-q) runs through repeated synthetic division (the remainder at each
//! stage is just the value at q = 1); division by anything else falls back
//! to ordinary long division, which stays in Z whenever the divisibility
//! actually holds.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::series::{CoefficientRing, SeriesError, TruncatedSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("not divisible at power {power}: remainder coefficient {coefficient} at q^{index}")]
    NotDivisible { power: usize, index: usize, coefficient: BigInt },
    #[error("leading coefficient {coefficient} of the remainder at q^{index} is not divisible by the divisor's leading coefficient")]
    NonIntegerQuotient { index: usize, coefficient: BigInt },
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

/// A polynomial over Z; the zero polynomial stores no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

/// JSON form: the dense coefficient array, constant term first, each
/// coefficient a decimal string.
impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// 1 - q, the divisor the dissection lemmas revolve around.
    pub fn one_minus_q() -> Self {
        Self::from_i64(&[1, -1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of q^k (zero beyond the degree).
    pub fn coefficient(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|i| self.coefficient(i) + other.coefficient(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|i| self.coefficient(i) - other.coefficient(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by q^k.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        IntPolynomial { coeffs: out }
    }

    /// Substitute q -> q^e (e >= 1).
    pub fn substitute_power(&self, e: usize) -> Self {
        assert!(e >= 1, "substitution exponent must be positive");
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); (self.coeffs.len() - 1) * e + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * e] = c.clone();
        }
        IntPolynomial { coeffs: out }
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Long division: self = quotient * divisor + remainder with
    /// deg(remainder) < deg(divisor), staying in Z.  Errors if a leading
    /// coefficient fails to divide, which over Z means the quotient would
    /// not be integral.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![
            BigInt::zero();
            self.coeffs.len().saturating_sub(divisor.coeffs.len()).saturating_add(1)
        ];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let (t, r) = num_integer::div_rem(rem[rem.len() - 1].clone(), lead.clone());
            if !r.is_zero() {
                return Err(PolyError::NonIntegerQuotient {
                    index: rem.len() - 1,
                    coefficient: rem[rem.len() - 1].clone(),
                });
            }
            for i in 0..=dd {
                let prod = &divisor.coeffs[i] * &t;
                rem[k + i] -= prod;
            }
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) && rem.len() > k {
                rem.pop();
            }
            quot[k] = t;
        }
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Synthetic division by 1-q: returns (quotient, remainder) where the
    /// remainder is the constant self(1).
    fn div_one_minus_q(&self) -> (Self, BigInt) {
        let Some(d) = self.degree() else {
            return (Self::zero(), BigInt::zero());
        };
        if d == 0 {
            return (Self::zero(), self.coeffs[0].clone());
        }
        // self = (1-q) * b + self(1) with b_i = -(a_{i+1} + ... + a_d)
        let mut b = vec![BigInt::zero(); d];
        let mut suffix = BigInt::zero();
        for i in (0..d).rev() {
            suffix += &self.coeffs[i + 1];
            b[i] = -&suffix;
        }
        (Self::new(b), self.eval_at_one())
    }

    /// Render as a series over the given ring, truncated at `order`.
    pub fn to_series(&self, ring: &CoefficientRing, order: usize) -> TruncatedSeries {
        let mut coeffs: Vec<BigInt> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, BigInt::zero());
        TruncatedSeries::from_bigint_coeffs(ring, &coeffs).expect("order + 1 >= 1 coefficients")
    }

    /// Evaluate at a truncated series argument (Horner).  The argument must
    /// have positive valuation or the substitution is still well defined but
    /// expensive; callers here always pass series with constant term 1 or 0.
    pub fn eval_series(&self, x: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        let ring = x.ring().clone();
        let order = x.order();
        let mut acc = TruncatedSeries::zero(&ring, order);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?;
            let c_series = TruncatedSeries::from_bigint_coeffs(&ring, &{
                let mut v = vec![BigInt::zero(); order + 1];
                v[0] = c.clone();
                v
            })?;
            acc = acc.add(&c_series)?;
        }
        Ok(acc)
    }
}

/// Exact quotient self / base^n over Z.  base = 1-q takes the synthetic
/// path, checking the value at q = 1 at every stage; other bases run `n`
/// long divisions.  The error reports the stage (1-based) and the first
/// offending remainder coefficient.
pub fn divide_exact_by_power(
    poly: &IntPolynomial,
    base: &IntPolynomial,
    n: usize,
) -> Result<IntPolynomial, PolyError> {
    if base.is_zero() {
        return Err(PolyError::DivisionByZero);
    }
    let one_minus_q = IntPolynomial::one_minus_q();
    let mut current = poly.clone();
    for stage in 1..=n {
        if base == &one_minus_q {
            let (q, r) = current.div_one_minus_q();
            if !r.is_zero() {
                return Err(PolyError::NotDivisible { power: stage, index: 0, coefficient: r });
            }
            current = q;
        } else {
            let (q, r) = current.div_rem(base).map_err(|e| match e {
                PolyError::NonIntegerQuotient { index, coefficient } => {
                    PolyError::NotDivisible { power: stage, index, coefficient }
                }
                other => other,
            })?;
            if let Some(idx) = r.coefficients().iter().position(|c| !c.is_zero()) {
                return Err(PolyError::NotDivisible {
                    power: stage,
                    index: idx,
                    coefficient: r.coefficient(idx),
                });
            }
            current = q;
        }
    }
    Ok(current)
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if wrote {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}*q")?,
                (_, true) => write!(f, "q^{k}")?,
                (_, false) => write!(f, "{mag}*q^{k}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trims_trailing_zeros() {
        let p = IntPolynomial::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(IntPolynomial::from_i64(&[0, 0]).degree(), None);
    }

    #[test]
    fn divide_by_one_minus_q() {
        // 1 - x over (1-x): quotient 1
        let p = IntPolynomial::from_i64(&[1, -1]);
        let q = divide_exact_by_power(&p, &IntPolynomial::one_minus_q(), 1).unwrap();
        assert_eq!(q, IntPolynomial::one());
        // (q;q)_2 = (1-q)^2 (1+q)
        let qq2 = IntPolynomial::from_i64(&[1, -1, -1, 1]);
        let q = divide_exact_by_power(&qq2, &IntPolynomial::one_minus_q(), 2).unwrap();
        assert_eq!(q, IntPolynomial::from_i64(&[1, 1]));
    }

    #[test]
    fn not_divisible_carries_the_remainder() {
        let p = IntPolynomial::from_i64(&[1, 1]);
        let err = divide_exact_by_power(&p, &IntPolynomial::one_minus_q(), 1).unwrap_err();
        assert_eq!(
            err,
            PolyError::NotDivisible { power: 1, index: 0, coefficient: BigInt::from(2) }
        );
        // divisible once but not twice: the stage is reported
        let p = IntPolynomial::from_i64(&[1, -2, 1]).mul(&IntPolynomial::from_i64(&[1, 1]));
        let err = divide_exact_by_power(&p, &IntPolynomial::one_minus_q(), 3).unwrap_err();
        assert!(matches!(err, PolyError::NotDivisible { power: 3, .. }));
    }

    #[test]
    fn long_division_by_general_base() {
        // (1+q)(1-q-q^2+q^3) / (q;q)_2 = 1+q
        let qq2 = IntPolynomial::from_i64(&[1, -1, -1, 1]);
        let p = qq2.mul(&IntPolynomial::from_i64(&[1, 1]));
        let (q, r) = p.div_rem(&qq2).unwrap();
        assert_eq!(q, IntPolynomial::from_i64(&[1, 1]));
        assert!(r.is_zero());
        // remainder survives
        let (q, r) = IntPolynomial::from_i64(&[3, 0, 0, 1]).div_rem(&qq2).unwrap();
        assert_eq!(q.mul(&qq2).add(&r), IntPolynomial::from_i64(&[3, 0, 0, 1]));
        assert!(!r.is_zero());
    }

    #[test]
    fn substitution_and_shift() {
        let p = IntPolynomial::from_i64(&[1, 0, -2]);
        assert_eq!(p.substitute_power(3), IntPolynomial::from_i64(&[1, 0, 0, 0, 0, 0, -2]));
        assert_eq!(p.shift_up(2), IntPolynomial::from_i64(&[0, 0, 1, 0, -2]));
        assert_eq!(p.eval_at_one(), BigInt::from(-1));
    }

    #[test]
    fn eval_series_substitutes() {
        // p(x) = 1 + x + x^2 at x = (1-q)^2, truncated at order 3
        let p = IntPolynomial::from_i64(&[1, 1, 1]);
        let ring = CoefficientRing::exact();
        let x = crate::series::binomial_series(2, &ring, 3);
        let got = p.eval_series(&x).unwrap();
        let want = TruncatedSeries::one(&ring, 3)
            .add(&x)
            .unwrap()
            .add(&x.mul(&x).unwrap())
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn display_matches_convention() {
        assert_eq!(IntPolynomial::from_i64(&[-4, -1]).to_string(), "-4 - q");
        assert_eq!(IntPolynomial::from_i64(&[5, 3, 1]).to_string(), "5 + 3*q + q^2");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
    }

    proptest! {
        // p * base^n / base^n = p for arbitrary nonzero base
        #[test]
        fn divide_round_trips(
            pc in proptest::collection::vec(-9i64..10, 0..8),
            bc in proptest::collection::vec(-9i64..10, 1..5),
            n in 0usize..8,
        ) {
            let p = IntPolynomial::from_i64(&pc);
            let base = IntPolynomial::from_i64(&bc);
            prop_assume!(!base.is_zero());
            let mut prod = p.clone();
            for _ in 0..n {
                prod = prod.mul(&base);
            }
            let q = divide_exact_by_power(&prod, &base, n).unwrap();
            prop_assert_eq!(q, p);
        }
    }
}
