//! p-adic digits of rationals and valuations of binomial coefficients.
//!
//! A rational x with denominator coprime to p has a p-adic expansion
//! x = sum_{k>=0} d_k p^k with digits d_k in [0, p); the digits come from
//! iterating d = x mod p, x <- (x - d)/p, with the modular inverse of the
//! denominator standing in for division.  Integers and rationals share this
//! one code path.
//!
//! Valuations of binomial coefficients are counted by Kummer's theorem:
//! v_p(binomial(n, k)) is the number of carries when adding k and n-k in
//! base p.  Negative n works through the infinite expansion of negative
//! integers (eventually all digits p-1); equivalently
//! v_p(binomial(n, k)) = v_p(binomial(p^t + n, k)) once p^t > k - n.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{is_prime, mod_inverse};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("reduced denominator is divisible by p = {p}; digits below the valuation are out of scope")]
    DenominatorDivisibleByP { p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} is too small here; this computation needs p >= 5")]
    PrimeTooSmall(u64),
}

/// A p-adic valuation: finite, or infinite for the zero input (and for
/// binomial coefficients that vanish).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

/// JSON form: the integer itself, or the string "infinity".
impl serde::Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => serializer.serialize_i64(*v),
            Valuation::Infinite => serializer.serialize_str("infinity"),
        }
    }
}

impl Valuation {
    /// Whether the valuation is at least `bound` (infinite passes).
    pub fn at_least(&self, bound: i64) -> bool {
        match self {
            Valuation::Finite(v) => *v >= bound,
            Valuation::Infinite => true,
        }
    }
}

impl std::fmt::Display for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "infinity"),
        }
    }
}

/// Leading part of a p-adic expansion: digits[k] is the digit of p^k, so
/// sum digits[k] p^k is congruent to the input modulo p^(digit count).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PAdicExpansion {
    pub p: u64,
    pub valuation: Valuation,
    pub digits: Vec<u64>,
}

/// Expand num/den p-adically to `count` digits.  The denominator (after
/// reducing the fraction) must be coprime to p; zero expands to the
/// infinite-valuation marker with zero digits.
pub fn expand(num: &BigInt, den: &BigInt, p: u64, count: usize) -> Result<PAdicExpansion, PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    if den.is_zero() {
        return Err(PadicError::ZeroDenominator);
    }
    if num.is_zero() {
        return Ok(PAdicExpansion { p, valuation: Valuation::Infinite, digits: vec![0; count] });
    }
    let g = num.gcd(den);
    let mut num = num / &g;
    let mut den = den / &g;
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    let pb = BigInt::from(p);
    if (&den % &pb).is_zero() {
        return Err(PadicError::DenominatorDivisibleByP { p });
    }
    let mut valuation = 0i64;
    let mut stripped = num.clone();
    while (&stripped % &pb).is_zero() {
        stripped /= &pb;
        valuation += 1;
    }
    let den_inv = mod_inverse(den.mod_floor(&pb).to_u64().unwrap(), p)
        .expect("denominator coprime to p");
    let mut digits = Vec::with_capacity(count);
    for _ in 0..count {
        let d = (num.mod_floor(&pb) * den_inv).mod_floor(&pb).to_u64().unwrap();
        digits.push(d);
        num = (num - BigInt::from(d) * &den) / &pb;
    }
    Ok(PAdicExpansion { p, valuation: Valuation::Finite(valuation), digits })
}

/// digit_k(num/den; p): the k-th p-adic digit.
pub fn digit(num: &BigInt, den: &BigInt, p: u64, k: usize) -> Result<u64, PadicError> {
    Ok(expand(num, den, p, k + 1)?.digits[k])
}

/// Carries when adding k and n-k in base p; by Kummer's theorem this is
/// v_p(binomial(n, k)).  Returns Infinite exactly when the binomial
/// coefficient vanishes, that is when 0 <= n < k.  Negative n-k is handled
/// digit by digit: its expansion ends in an infinite run of p-1, and the
/// carry chain provably dies out whenever the coefficient is nonzero.
pub fn kummer_carries(n: i64, k: u64, p: u64) -> Result<Valuation, PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    if k == 0 {
        return Ok(Valuation::Finite(0));
    }
    if n >= 0 && (n as u64) < k {
        return Ok(Valuation::Infinite);
    }
    let pi = p as i128;
    let mut rk = k; // remaining digits of k
    let mut m = n as i128 - k as i128; // remaining digits of n-k; -1 is the all-(p-1) tail
    let mut carry = 0u64;
    let mut carries = 0i64;
    while rk != 0 || (m != 0 && m != -1) {
        let dk = rk % p;
        rk /= p;
        let dm = m.rem_euclid(pi);
        m = (m - dm) / pi;
        if dk + dm as u64 + carry >= p {
            carry = 1;
            carries += 1;
        } else {
            carry = 0;
        }
    }
    // A pending carry into the all-(p-1) tail would never resolve, which is
    // impossible for n < 0 (the coefficient is nonzero there); into the zero
    // tail it is absorbed without a further carry.
    debug_assert!(m == 0 || carry == 0);
    Ok(Valuation::Finite(carries))
}

/// v_p(binomial(n, k)) — Kummer's carry count.
pub fn binom_valuation(n: i64, k: u64, p: u64) -> Result<Valuation, PadicError> {
    kummer_carries(n, k, p)
}

/// Jacobi symbol (a|n) for odd n >= 1.
fn jacobi(a: i64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// The Legendre symbol (12|p) for primes p >= 5: +1 exactly when
/// p = +/-1 (mod 12).  This sign is the one the strange-series dissection
/// attaches to its distinguished part.
pub fn jacobi_12(p: u64) -> Result<i8, PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    if p < 5 {
        return Err(PadicError::PrimeTooSmall(p));
    }
    Ok(jacobi(12, p))
}
